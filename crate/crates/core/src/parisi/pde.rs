//! Backward solver for the zero-temperature Parisi PDE
//!
//! ```text
//! ∂_t Ψ = -(ξ''(t)/2) (∂_xx Ψ + μ(t) (∂_x Ψ)^2),    Ψ(1, x) = |x|
//! ```
//!
//! On a piece where `μ ≡ m` the Cole–Hopf transform gives
//! `Ψ(t_a, x) = (1/m) log E exp(m Ψ(t_b, x + √Δv Z))` with
//! `Δv = ξ'(t_b) - ξ'(t_a)`, and `Ψ(t_a, x) = E Ψ(t_b, x + √Δv Z)` when
//! `m = 0`. The piece touching `t = 1` is integrated in closed form against
//! `|x|`. Earlier pieces work on a uniform grid. When the kernel width
//! `√Δv` is at least 1.5 grid spacings the Gaussian integral is a trapezoid
//! sum over the nodes, which is spectrally accurate for a Gaussian times an
//! exponential of any tilt. Narrower kernels integrate the Gaussian exactly
//! against the piecewise-linear interpolant of `m Ψ` instead. Both stay
//! accurate when `m √Δv` is large and the integrand is sharply tilted or
//! bimodal.
//!
//! `Ψ(t, ·)` is even and 1-Lipschitz, so only `x >= 0` is stored and each
//! target only needs the part of the previous profile within a window
//! outside of which the integrand is below `e^{-40}` of its value at the
//! target.

use super::normal::{self, LogSum};
use super::{MixtureSpec, OrderParam};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SPACING: f64 = 0.02;
pub const DEFAULT_MAX_HALF_WIDTH: f64 = 1000.0;
const WINDOW_NATS: f64 = 40.0;
/// Below this `m` the log-exp transform is replaced by a plain expectation.
const LINEAR_M: f64 = 1e-7;
/// Narrowest kernel, in grid spacings, handled by the trapezoid rule.
const TRAPEZOID_MIN_WIDTH: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeGrid {
    /// Spacing `h` of the uniform x-grid.
    pub spacing: f64,
    /// Largest admissible half-width `X`; the half-width itself is sized
    /// from the order parameter.
    pub max_half_width: f64,
}

impl Default for PdeGrid {
    fn default() -> Self {
        Self {
            spacing: DEFAULT_SPACING,
            max_half_width: DEFAULT_MAX_HALF_WIDTH,
        }
    }
}

impl PdeGrid {
    pub fn with_spacing(spacing: f64) -> Self {
        Self {
            spacing,
            ..Self::default()
        }
    }

    pub fn refined(&self) -> Self {
        Self {
            spacing: self.spacing / 2.0,
            ..*self
        }
    }

    pub fn coarsened(&self) -> Self {
        Self {
            spacing: self.spacing * 2.0,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(Error::Grid(format!("spacing {} must be positive", self.spacing)));
        }
        if !(self.max_half_width > 0.0) {
            return Err(Error::Grid("max_half_width must be positive".into()));
        }
        Ok(())
    }
}

/// `Ψ(t, x)` at the grid nodes `x = i h`, `i >= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    pub t: f64,
    pub spacing: f64,
    pub values: Vec<f64>,
}

impl Profile {
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.spacing
    }

    /// Linear interpolation, even in `x`, linear extrapolation past the
    /// last node.
    pub fn at(&self, x: f64) -> f64 {
        let x = x.abs();
        let n = self.values.len();
        if n == 1 {
            return self.values[0];
        }
        let u = x / self.spacing;
        let i = (u.floor() as usize).min(n - 2);
        let f = u - i as f64;
        self.values[i] + f * (self.values[i + 1] - self.values[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeSolution {
    pub psi00: f64,
    pub spacing: f64,
    /// Half-width `X` of the widest profile (the boundary at `t = 1`).
    pub half_width: f64,
    /// From `t = 1` backward to `t = 0`, one per breakpoint.
    pub profiles: Vec<Profile>,
}

impl PdeSolution {
    pub fn profile_at(&self, t: f64) -> Option<&Profile> {
        self.profiles.iter().find(|p| p.t == t)
    }
}

struct Piece {
    t_start: f64,
    m: f64,
    s: f64,
    /// Nodes needed at the start of the piece.
    nodes: usize,
}

fn window(m: f64, s: f64) -> f64 {
    let ms = m * s;
    m * s * s + s * (ms * ms + 2.0 * WINDOW_NATS).sqrt()
}

fn plan(mu: &OrderParam, spec: &MixtureSpec, grid: &PdeGrid) -> Result<(Vec<Piece>, usize)> {
    grid.validate()?;
    let h = grid.spacing;
    let mut pieces = Vec::new();
    let mut nodes = 0usize;
    for (a, b, m) in mu.intervals() {
        let dv = spec.xi_prime(b) - spec.xi_prime(a);
        if !(dv >= 0.0) {
            return Err(Error::param("xi' must be nondecreasing"));
        }
        let s = dv.sqrt();
        pieces.push(Piece {
            t_start: a,
            m,
            s,
            nodes,
        });
        nodes += (window(m, s) / h).ceil() as usize;
    }
    let half_width = nodes as f64 * h;
    let var = spec.xi_prime(1.0);
    if half_width > grid.max_half_width {
        return Err(Error::Grid(format!(
            "half-width {half_width:.2} needed for accumulated variance {var:.3} exceeds limit {}",
            grid.max_half_width
        )));
    }
    debug_assert!(half_width + h >= 6.0 * var.sqrt());
    Ok((pieces, nodes))
}

/// Closed form of the first piece: `Ψ(t, x)` from `|x|` over variance `s²`.
fn from_boundary(x: f64, m: f64, s: f64) -> f64 {
    if s == 0.0 {
        return x.abs();
    }
    if m < LINEAR_M {
        let u = x / s;
        return x * (1.0 - 2.0 * normal::cdf(-u)) + 2.0 * s * normal::pdf(u);
    }
    let c = 0.5 * m * m * s * s;
    let pos = m * x + c + normal::log_cdf((x + m * s * s) / s);
    let neg = -m * x + c + normal::log_cdf((-x + m * s * s) / s);
    normal::log_add_exp(pos, neg) / m
}

/// One Cole–Hopf step on grid data.
fn convolve(input: &[f64], h: f64, m: f64, s: f64, out_nodes: usize) -> Vec<f64> {
    if s == 0.0 {
        return input[..=out_nodes].to_vec();
    }
    if s >= TRAPEZOID_MIN_WIDTH * h {
        return convolve_trapezoid(input, h, m, s, out_nodes);
    }
    let w = window(m, s);
    let last = input.len() - 1;
    let tail_slope = (input[last] - input[last - 1]) / h;
    let linear = m < LINEAR_M;
    (0..=out_nodes)
        .map(|i| {
            let x = i as f64 * h;
            let mut log_acc = LogSum::new();
            let mut lin_acc = 0.0;
            for z in [x, -x] {
                let lo = (z - w).max(0.0);
                let hi = z + w;
                if hi <= 0.0 {
                    continue;
                }
                let c0 = (lo / h).floor() as usize;
                let c1 = ((hi / h).ceil() as usize).min(last);
                for c in c0..c1 {
                    let y0 = c as f64 * h;
                    let slope = (input[c + 1] - input[c]) / h;
                    let a = (y0 - z) / s;
                    let b = a + h / s;
                    if linear {
                        lin_acc += cell_linear(z, y0, input[c], slope, s, a, b);
                    } else {
                        log_acc.add(cell_log(z, y0, input[c], slope, m, s, a, b));
                    }
                }
                if hi > last as f64 * h {
                    let y0 = last as f64 * h;
                    let a = (y0 - z) / s;
                    if linear {
                        lin_acc += cell_linear(z, y0, input[last], tail_slope, s, a, f64::INFINITY);
                    } else {
                        log_acc.add(cell_log(z, y0, input[last], tail_slope, m, s, a, f64::INFINITY));
                    }
                }
            }
            if linear {
                lin_acc
            } else {
                log_acc.value() / m
            }
        })
        .collect()
}

/// Value at node `i`, extended linearly past the last node.
#[inline]
fn node_value(input: &[f64], i: usize, tail_slope: f64, h: f64) -> f64 {
    let last = input.len() - 1;
    if i <= last {
        input[i]
    } else {
        input[last] + tail_slope * (i - last) as f64 * h
    }
}

fn convolve_trapezoid(input: &[f64], h: f64, m: f64, s: f64, out_nodes: usize) -> Vec<f64> {
    let w = window(m, s);
    let last = input.len() - 1;
    let tail_slope = (input[last] - input[last - 1]) / h;
    let linear = m < LINEAR_M;
    let inv_s = 1.0 / s;
    // h φ_s normalization
    let log_norm = (h * inv_s).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
    let norm = log_norm.exp();
    let mut scratch: Vec<f64> = Vec::new();
    (0..=out_nodes)
        .map(|i| {
            let x = i as f64 * h;
            scratch.clear();
            let mut lin_acc = 0.0;
            for z in [x, -x] {
                let hi = z + w;
                if hi <= 0.0 {
                    continue;
                }
                let n0 = ((z - w).max(0.0) / h).floor() as usize;
                let n1 = (hi / h).ceil() as usize;
                for j in n0..=n1 {
                    let y = j as f64 * h;
                    let d = (y - z) * inv_s;
                    let psi = node_value(input, j, tail_slope, h);
                    // the node at 0 is shared by the direct and mirrored sums
                    let half = if j == 0 { 0.5 } else { 1.0 };
                    if linear {
                        lin_acc += half * psi * (-0.5 * d * d).exp();
                    } else {
                        scratch.push(m * psi - 0.5 * d * d + half.ln());
                    }
                }
            }
            if linear {
                norm * lin_acc
            } else {
                let mx = scratch.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = scratch.iter().map(|v| (v - mx).exp()).sum();
                (mx + sum.ln() + log_norm) / m
            }
        })
        .collect()
}

/// `∫ φ_s(y - z) (ψ0 + slope (y - y0)) dy` over the cell with standardized
/// ends `a`, `b`.
#[inline]
fn cell_linear(z: f64, y0: f64, psi0: f64, slope: f64, s: f64, a: f64, b: f64) -> f64 {
    let (cb, pb) = if b.is_finite() { (normal::cdf(b), normal::pdf(b)) } else { (1.0, 0.0) };
    (psi0 + slope * (z - y0)) * (cb - normal::cdf(a)) + slope * s * (normal::pdf(a) - pb)
}

/// `log ∫ φ_s(y - z) exp(m ψ0 + m slope (y - y0)) dy` over the cell.
#[inline]
#[allow(clippy::too_many_arguments)]
fn cell_log(z: f64, y0: f64, psi0: f64, slope: f64, m: f64, s: f64, a: f64, b: f64) -> f64 {
    let beta = m * slope;
    let bs = beta * s;
    m * psi0 + beta * (z - y0) + 0.5 * bs * bs + normal::log_cdf_diff(a - bs, b - bs)
}

fn run(mu: &OrderParam, spec: &MixtureSpec, grid: &PdeGrid, keep: bool) -> Result<PdeSolution> {
    let (pieces, boundary_nodes) = plan(mu, spec, grid)?;
    let h = grid.spacing;
    let mut profiles = Vec::new();
    if keep {
        profiles.push(Profile {
            t: 1.0,
            spacing: h,
            values: (0..=boundary_nodes).map(|i| i as f64 * h).collect(),
        });
    }
    let k = pieces.len();
    let first = &pieces[k - 1];
    // a second node keeps interpolation and tail slopes defined
    let n_first = first.nodes.max(1);
    let mut current: Vec<f64> = (0..=n_first).map(|i| from_boundary(i as f64 * h, first.m, first.s)).collect();
    if keep {
        profiles.push(Profile {
            t: first.t_start,
            spacing: h,
            values: current.clone(),
        });
    }
    for piece in pieces[..k - 1].iter().rev() {
        let n_out = piece.nodes.max(1);
        current = convolve(&current, h, piece.m, piece.s, n_out);
        if keep {
            profiles.push(Profile {
                t: piece.t_start,
                spacing: h,
                values: current.clone(),
            });
        }
    }
    Ok(PdeSolution {
        psi00: current[0],
        spacing: h,
        half_width: boundary_nodes as f64 * h,
        profiles,
    })
}

/// Solve backward from `t = 1` and keep `Ψ(t_j, ·)` at every breakpoint.
pub fn solve_parisi_pde(mu: &OrderParam, spec: &MixtureSpec, grid: &PdeGrid) -> Result<PdeSolution> {
    run(mu, spec, grid, true)
}

/// `Ψ_μ(0, 0)` only.
pub fn psi00(mu: &OrderParam, spec: &MixtureSpec, grid: &PdeGrid) -> Result<f64> {
    Ok(run(mu, spec, grid, false)?.psi00)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parisi::ParamClass;
    use std::f64::consts::PI;

    /// `(1/m) log E exp(m f(Z))` by a fine midpoint rule over `[-60, 60]`.
    fn gaussian_log_mgf(f: impl Fn(f64) -> f64, m: f64) -> f64 {
        let n = 600_000;
        let h = 120.0 / n as f64;
        let vals: Vec<f64> = (0..n)
            .map(|i| {
                let z = -60.0 + (i as f64 + 0.5) * h;
                -0.5 * z * z + m * f(z)
            })
            .collect();
        let mx = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = vals.iter().map(|v| (v - mx).exp()).sum::<f64>() * h / (2.0 * PI).sqrt();
        (mx + s.ln()) / m
    }

    #[test]
    fn boundary_closed_form_matches_quadrature() {
        for &(x, m, s) in &[(0.0, 0.5, 0.7), (0.3, 2.0, 0.4), (1.5, 10.0, 0.3), (0.0, 30.0, 0.5)] {
            let direct = gaussian_log_mgf(|z: f64| (x + s * z).abs(), m);
            assert!((from_boundary(x, m, s) - direct).abs() < 1e-7, "{x} {m} {s}");
        }
        // m -> 0 limit is E|x + sZ|
        let e = from_boundary(0.0, 0.0, 1.0);
        assert!((e - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((from_boundary(0.2, 1e-9, 0.5) - from_boundary(0.2, 0.0, 0.5)).abs() < 1e-8);
    }

    #[test]
    fn linear_case_matches_heat_kernel() {
        for p in 2..=4 {
            let spec = MixtureSpec::monomial(p).unwrap();
            let v = psi00(&OrderParam::zero(), &spec, &PdeGrid::default()).unwrap();
            assert!((v - (2.0 * p as f64 / PI).sqrt()).abs() < 1e-12);
            // the same μ ≡ 0 split into pieces goes through the grid steps
            let mu = OrderParam::new(vec![0.0, 0.3, 0.7, 1.0], vec![0.0; 3], ParamClass::U).unwrap();
            let v = psi00(&mu, &spec, &PdeGrid::default()).unwrap();
            assert!((v - (2.0 * p as f64 / PI).sqrt()).abs() < 1e-4, "p = {p}: {v}");
        }
    }

    #[test]
    fn boundary_profile_is_abs() {
        let mu = OrderParam::from_atoms(&[0.4, 0.8], &[1.0, 2.0], ParamClass::U).unwrap();
        let sol = solve_parisi_pde(&mu, &MixtureSpec::pure(2).unwrap(), &PdeGrid::default()).unwrap();
        let b = &sol.profiles[0];
        assert_eq!(b.t, 1.0);
        for (i, v) in b.values.iter().enumerate() {
            assert_eq!(*v, i as f64 * b.spacing);
        }
        assert_eq!(sol.profiles.last().unwrap().t, 0.0);
        assert_eq!(sol.profiles.len(), mu.values().len() + 1);
        assert!(sol.half_width >= 6.0 * MixtureSpec::pure(2).unwrap().xi_prime(1.0).sqrt());
    }

    #[test]
    fn grid_step_matches_direct_quadrature() {
        // two pieces: closed form then one grid convolution
        let spec = MixtureSpec::pure(2).unwrap();
        let (q, m1, m2) = (0.5, 1.5, 4.0);
        let mu = OrderParam::new(vec![0.0, q, 1.0], vec![m1, m2], ParamClass::U).unwrap();
        let s1 = q.sqrt();
        let s2 = (1.0 - q).sqrt();
        let inner = |y: f64| from_boundary(y, m2, s2);
        let direct = gaussian_log_mgf(|z| inner(s1 * z), m1);
        let v = psi00(&mu, &spec, &PdeGrid::with_spacing(0.005)).unwrap();
        assert!((v - direct).abs() < 2e-5, "{v} vs {direct}");
    }

    #[test]
    fn large_tilt_stays_accurate() {
        let spec = MixtureSpec::pure(2).unwrap();
        let mu = OrderParam::new(vec![0.0, 0.5, 1.0], vec![40.0, 80.0], ParamClass::U).unwrap();
        let inner = |y: f64| from_boundary(y, 80.0, 0.5f64.sqrt());
        let direct = gaussian_log_mgf(|z| inner(0.5f64.sqrt() * z), 40.0);
        let v = psi00(&mu, &spec, &PdeGrid::with_spacing(0.01)).unwrap();
        assert!((v - direct).abs() < 1e-3, "{v} vs {direct}");
    }

    #[test]
    fn grid_error_when_width_limit_too_small() {
        let mu = OrderParam::from_atoms(&[0.5], &[100.0], ParamClass::U).unwrap();
        let grid = PdeGrid {
            spacing: 0.02,
            max_half_width: 5.0,
        };
        assert!(matches!(
            psi00(&mu, &MixtureSpec::pure(2).unwrap(), &grid),
            Err(Error::Grid(_))
        ));
        assert!(matches!(
            psi00(&mu, &MixtureSpec::pure(2).unwrap(), &PdeGrid::with_spacing(-1.0)),
            Err(Error::Grid(_))
        ));
    }
}
