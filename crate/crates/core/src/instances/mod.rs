//! Seeded random instances and interpolation paths.

mod graph;
mod io;
mod ksat;
mod path;
mod tensor;

pub use graph::{gen_er_graph, gen_sparse_graph, pair_index, pair_of_index, ErGraph};
pub use io::{Sidecar, FORMAT_VERSION, MAGIC};
pub use ksat::{gen_ksat, KSatFormula, Literal};
pub use path::{make_interpolation_path, InterpolationPath};
pub use tensor::{binomial, gen_gaussian_tensor, GaussianTensor};

use crate::rng::RngStream;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceKind {
    Graph,
    Tensor,
    KSat,
}

impl InstanceKind {
    pub fn tag(self) -> u8 {
        match self {
            InstanceKind::Graph => 1,
            InstanceKind::Tensor => 2,
            InstanceKind::KSat => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(InstanceKind::Graph),
            2 => Some(InstanceKind::Tensor),
            3 => Some(InstanceKind::KSat),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Graph => "graph",
            InstanceKind::Tensor => "tensor",
            InstanceKind::KSat => "ksat",
        }
    }
}

/// Any generated instance. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Graph(ErGraph),
    Tensor(GaussianTensor),
    KSat(KSatFormula),
}

impl Instance {
    pub fn kind(&self) -> InstanceKind {
        match self {
            Instance::Graph(_) => InstanceKind::Graph,
            Instance::Tensor(_) => InstanceKind::Tensor,
            Instance::KSat(_) => InstanceKind::KSat,
        }
    }

    pub fn origin(&self) -> &RngStream {
        match self {
            Instance::Graph(g) => &g.origin,
            Instance::Tensor(t) => &t.origin,
            Instance::KSat(f) => &f.origin,
        }
    }

    /// Number of variables / vertices / spins.
    pub fn n(&self) -> usize {
        match self {
            Instance::Graph(g) => g.n(),
            Instance::Tensor(t) => t.n(),
            Instance::KSat(f) => f.n(),
        }
    }

    /// Number of independent resampling units: vertex pairs, tensor
    /// entries, or clauses.
    pub fn unit_count(&self) -> usize {
        match self {
            Instance::Graph(g) => g.pair_count(),
            Instance::Tensor(t) => t.len(),
            Instance::KSat(f) => f.m(),
        }
    }

    pub fn as_graph(&self) -> Option<&ErGraph> {
        match self {
            Instance::Graph(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_tensor(&self) -> Option<&GaussianTensor> {
        match self {
            Instance::Tensor(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_ksat(&self) -> Option<&KSatFormula> {
        match self {
            Instance::KSat(f) => Some(f),
            _ => None,
        }
    }
}

impl From<ErGraph> for Instance {
    fn from(g: ErGraph) -> Self {
        Instance::Graph(g)
    }
}

impl From<GaussianTensor> for Instance {
    fn from(t: GaussianTensor) -> Self {
        Instance::Tensor(t)
    }
}

impl From<KSatFormula> for Instance {
    fn from(f: KSatFormula) -> Self {
        Instance::KSat(f)
    }
}
