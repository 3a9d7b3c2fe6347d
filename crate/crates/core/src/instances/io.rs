//! Binary instance format and JSON sidecar.
//!
//! ```text
//! magic    8 bytes  "RANDOPT\0"
//! version  u16 LE
//! tag      u8       1 = graph, 2 = tensor, 3 = ksat
//! params   u32 LE length, then the parameter block
//!            graph:  n u64, edge_prob f64, has_d u8, d f64
//!            tensor: n u64, p u64
//!            ksat:   n u64, m u64, k u64
//! seed     u64 LE
//! label    u32 LE length, then UTF-8 bytes
//! payload  u64 LE length, then
//!            graph:  pair bits in lexicographic pair order, LSB first
//!            tensor: C(n, p) f64 LE in colex order
//!            ksat:   m clauses of k i32 LE signed 1-based literals
//! ```
//!
//! The content hash is the hex SHA-256 of the whole byte string.

use super::{ErGraph, GaussianTensor, Instance, InstanceKind, KSatFormula, Literal};
use crate::error::FormatError;
use crate::rng::RngStream;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MAGIC: [u8; 8] = *b"RANDOPT\0";
pub const FORMAT_VERSION: u16 = 1;

/// Metadata mirror of a binary instance file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub kind: InstanceKind,
    pub version: u16,
    pub params: serde_json::Value,
    pub seed: u64,
    pub label: String,
    pub content_hash: String,
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, x: u8) {
        self.0.push(x);
    }
    fn u16(&mut self, x: u16) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn u32(&mut self, x: u32) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn u64(&mut self, x: u64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
    fn f64(&mut self, x: f64) {
        self.0.extend_from_slice(&x.to_le_bytes());
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], FormatError> {
        if self.buf.len() - self.pos < k {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: k - (self.buf.len() - self.pos),
            });
        }
        let s = &self.buf[self.pos..self.pos + k];
        self.pos += k;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, FormatError> {
        Ok(self.take(1)?[0])
    }
    fn u16(&mut self) -> Result<u16, FormatError> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }
    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn usize(&mut self) -> Result<usize, FormatError> {
        let x = self.u64()?;
        usize::try_from(x).map_err(|_| FormatError::InvalidPayload(format!("size {x} too large")))
    }
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::InvalidPayload(msg.into())
}

impl Instance {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(&MAGIC);
        w.u16(FORMAT_VERSION);
        w.u8(self.kind().tag());

        let mut params = Writer(Vec::new());
        let mut payload = Writer(Vec::new());
        match self {
            Instance::Graph(g) => {
                params.u64(g.n() as u64);
                params.f64(g.edge_prob());
                params.u8(g.avg_degree().is_some() as u8);
                params.f64(g.avg_degree().unwrap_or(0.0));
                let mut bits = vec![0u8; g.pair_count().div_ceil(8)];
                let mut k = 0;
                for i in 0..g.n() {
                    for j in i + 1..g.n() {
                        if g.has_edge(i, j) {
                            bits[k / 8] |= 1 << (k % 8);
                        }
                        k += 1;
                    }
                }
                payload.0 = bits;
            }
            Instance::Tensor(t) => {
                params.u64(t.n() as u64);
                params.u64(t.p() as u64);
                for &x in t.entries() {
                    payload.f64(x);
                }
            }
            Instance::KSat(f) => {
                params.u64(f.n() as u64);
                params.u64(f.m() as u64);
                params.u64(f.k() as u64);
                for c in f.clauses() {
                    for l in c {
                        payload.0.extend_from_slice(&l.to_dimacs().to_le_bytes());
                    }
                }
            }
        }
        w.u32(params.0.len() as u32);
        w.0.extend_from_slice(&params.0);
        let origin = self.origin();
        w.u64(origin.seed);
        w.u32(origin.label.len() as u32);
        w.0.extend_from_slice(origin.label.as_bytes());
        w.u64(payload.0.len() as u64);
        w.0.extend_from_slice(&payload.0);
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        decode(bytes, None)
    }

    pub fn content_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_bytes()))
    }

    pub fn sidecar(&self) -> Sidecar {
        let params = match self {
            Instance::Graph(g) => serde_json::json!({
                "n": g.n(),
                "edge_prob": g.edge_prob(),
                "avg_degree": g.avg_degree(),
                "edges": g.edge_count(),
            }),
            Instance::Tensor(t) => serde_json::json!({ "n": t.n(), "p": t.p() }),
            Instance::KSat(f) => serde_json::json!({ "n": f.n(), "m": f.m(), "k": f.k() }),
        };
        Sidecar {
            kind: self.kind(),
            version: FORMAT_VERSION,
            params,
            seed: self.origin().seed,
            label: self.origin().label.clone(),
            content_hash: self.content_hash(),
        }
    }
}

impl ErGraph {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        match decode(bytes, Some(InstanceKind::Graph))? {
            Instance::Graph(g) => Ok(g),
            _ => unreachable!(),
        }
    }
}

impl GaussianTensor {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        match decode(bytes, Some(InstanceKind::Tensor))? {
            Instance::Tensor(t) => Ok(t),
            _ => unreachable!(),
        }
    }
}

impl KSatFormula {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, FormatError> {
        match decode(bytes, Some(InstanceKind::KSat))? {
            Instance::KSat(f) => Ok(f),
            _ => unreachable!(),
        }
    }
}

fn decode(bytes: &[u8], expected: Option<InstanceKind>) -> Result<Instance, FormatError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let magic = r
        .take(8)
        .map_err(|_| FormatError::CorruptHeader("file shorter than magic".into()))?;
    if magic != MAGIC {
        return Err(FormatError::CorruptHeader("bad magic".into()));
    }
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(FormatError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let tag = r.u8()?;
    let kind = InstanceKind::from_tag(tag).ok_or_else(|| FormatError::CorruptHeader(format!("unknown type tag {tag}")))?;
    if let Some(e) = expected {
        if e != kind {
            return Err(FormatError::TypeMismatch {
                expected: e.name(),
                found: kind.name(),
            });
        }
    }
    let plen = r.u32()? as usize;
    let mut params = Reader {
        buf: r.take(plen)?,
        pos: 0,
    };
    let seed = r.u64()?;
    let llen = r.u32()? as usize;
    let label = String::from_utf8(r.take(llen)?.to_vec()).map_err(|_| invalid("label is not UTF-8"))?;
    let paylen = r.usize()?;
    let mut payload = Reader {
        buf: r.take(paylen)?,
        pos: 0,
    };
    if r.pos != bytes.len() {
        return Err(invalid(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    let origin = RngStream::new(seed, label);

    let inst = match kind {
        InstanceKind::Graph => {
            let n = params.usize()?;
            let p = params.f64()?;
            let has_d = params.u8()?;
            let d = params.f64()?;
            if n == 0 || !(0.0..=1.0).contains(&p) {
                return Err(invalid("graph parameters out of range"));
            }
            let pairs = n * (n - 1) / 2;
            if paylen != pairs.div_ceil(8) {
                return Err(invalid(format!("graph payload of {paylen} bytes, expected {}", pairs.div_ceil(8))));
            }
            let bits = payload.take(paylen)?;
            let mut g = ErGraph::empty(n).with_model(p, (has_d == 1).then_some(d));
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if (bits[k / 8] >> (k % 8)) & 1 == 1 {
                        g.set_edge(i, j, true);
                    }
                    k += 1;
                }
            }
            g.origin = origin;
            Instance::Graph(g)
        }
        InstanceKind::Tensor => {
            let n = params.usize()?;
            let p = params.usize()?;
            let len = super::binomial(n, p).ok_or_else(|| invalid("C(n, p) overflows"))?;
            if paylen != len * 8 {
                return Err(invalid(format!("tensor payload of {paylen} bytes, expected {}", len * 8)));
            }
            let entries = (0..len).map(|_| payload.f64()).collect::<Result<Vec<_>, _>>()?;
            let mut t = GaussianTensor::from_entries(n, p, entries).map_err(|e| invalid(e.to_string()))?;
            t.origin = origin;
            Instance::Tensor(t)
        }
        InstanceKind::KSat => {
            let n = params.usize()?;
            let m = params.usize()?;
            let k = params.usize()?;
            if paylen != m * k * 4 {
                return Err(invalid(format!("ksat payload of {paylen} bytes, expected {}", m * k * 4)));
            }
            let mut clauses = Vec::with_capacity(m);
            for _ in 0..m {
                let mut c = Vec::with_capacity(k);
                for _ in 0..k {
                    let x = i32::from_le_bytes(payload.take(4)?.try_into().unwrap());
                    c.push(Literal::from_dimacs(x).ok_or_else(|| invalid("zero literal"))?);
                }
                clauses.push(c);
            }
            let mut f = KSatFormula::new(n, clauses).map_err(|e| invalid(e.to_string()))?.with_k(k);
            f.origin = origin;
            Instance::KSat(f)
        }
    };
    if params.pos != plen {
        return Err(invalid("parameter block has trailing bytes"));
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_er_graph, gen_gaussian_tensor, gen_ksat, gen_sparse_graph};
    use proptest::prelude::*;

    fn samples() -> Vec<Instance> {
        let s = RngStream::new(9, "io");
        vec![
            gen_er_graph(1, 0.5, &s).unwrap().into(),
            gen_er_graph(17, 0.5, &s).unwrap().into(),
            gen_sparse_graph(30, 3.0, &s).unwrap().into(),
            gen_gaussian_tensor(5, 2, &s).unwrap().into(),
            gen_gaussian_tensor(6, 4, &s).unwrap().into(),
            gen_ksat(10, 0, 3, &s).unwrap().into(),
            gen_ksat(10, 31, 4, &s).unwrap().into(),
        ]
    }

    #[test]
    fn round_trip_all_kinds() {
        for inst in samples() {
            let bytes = inst.to_bytes();
            assert_eq!(Instance::from_bytes(&bytes).unwrap(), inst);
        }
    }

    #[test]
    fn flipped_tag_is_type_mismatch() {
        let g: Instance = gen_er_graph(8, 0.5, &RngStream::new(1, "g")).unwrap().into();
        let mut bytes = g.to_bytes();
        bytes[10] = InstanceKind::Tensor.tag();
        assert_eq!(
            ErGraph::from_bytes(&bytes),
            Err(FormatError::TypeMismatch {
                expected: "graph",
                found: "tensor"
            })
        );
    }

    #[test]
    fn header_errors_are_distinct() {
        let g: Instance = gen_er_graph(8, 0.5, &RngStream::new(1, "g")).unwrap().into();
        let bytes = g.to_bytes();

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(Instance::from_bytes(&bad), Err(FormatError::CorruptHeader(_))));

        let mut bad = bytes.clone();
        bad[8] = 9;
        assert!(matches!(
            Instance::from_bytes(&bad),
            Err(FormatError::VersionMismatch { found: 9, .. })
        ));

        let mut bad = bytes.clone();
        bad[10] = 42;
        assert!(matches!(Instance::from_bytes(&bad), Err(FormatError::CorruptHeader(_))));

        let bad = &bytes[..bytes.len() - 1];
        assert!(matches!(Instance::from_bytes(bad), Err(FormatError::Truncated { .. })));

        let mut bad = bytes.clone();
        bad.push(0);
        assert!(matches!(Instance::from_bytes(&bad), Err(FormatError::InvalidPayload(_))));
    }

    #[test]
    fn hash_is_stable() {
        let a: Instance = gen_ksat(20, 50, 3, &RngStream::new(5, "h")).unwrap().into();
        let b: Instance = gen_ksat(20, 50, 3, &RngStream::new(5, "h")).unwrap().into();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_eq!(a.sidecar().content_hash, a.content_hash());
        assert_eq!(a.content_hash().len(), 64);
    }

    proptest! {
        #[test]
        fn graph_round_trip(n in 1usize..40, p in 0.0f64..=1.0, seed in any::<u64>()) {
            let g: Instance = gen_er_graph(n, p, &RngStream::new(seed, "prop")).unwrap().into();
            prop_assert_eq!(Instance::from_bytes(&g.to_bytes()).unwrap(), g);
        }
    }
}
