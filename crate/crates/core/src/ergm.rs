//! Edge–triangle exponential random graph model: Hamiltonian, mean-field
//! fixed point and the concentration experiment.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exec;
use crate::graph::Graph;

/// Model weights: `beta` on edges, `gamma / n` on triangles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErgmModel {
    pub beta: f64,
    pub gamma: f64,
}

impl ErgmModel {
    pub fn new(beta: f64, gamma: f64) -> Result<Self> {
        if !beta.is_finite() || !gamma.is_finite() {
            return Err(invalid(format!("model weights must be finite, got ({beta}, {gamma})")));
        }
        Ok(ErgmModel { beta, gamma })
    }

    pub fn is_ferromagnetic(&self) -> bool {
        self.gamma > 0.0
    }

    /// `φ(x) = σ(β + γx)`.
    pub fn phi(&self, x: f64) -> f64 {
        sigmoid(self.beta + self.gamma * x)
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn phi_beta(m: &ErgmModel, x: f64) -> f64 {
    m.phi(x)
}

/// `β · edges + (γ / n) · triangles`.
pub fn hamiltonian(g: &Graph, m: &ErgmModel) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    m.beta * g.edge_count() as f64 + m.gamma / g.n() as f64 * g.triangle_count() as f64
}

/// Probability that an edge is present given the rest of the graph, where
/// `normalized_codegree` is its endpoints' co-degree divided by `n`.
pub fn glauber_conditional(m: &ErgmModel, normalized_codegree: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&normalized_codegree) {
        return Err(invalid(format!("normalized co-degree must lie in [0, 1], got {normalized_codegree}")));
    }
    Ok(m.phi(normalized_codegree))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    HighTemperature,
    NotHighTemperature,
    /// A root's slope is numerically indistinguishable from 1.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointResult {
    /// Solutions of `p = φ(p²)` in increasing order.
    pub roots: Vec<f64>,
    /// `d/dp φ(p²)` at each root.
    pub slopes: Vec<f64>,
    pub regime: Regime,
}

impl FixedPointResult {
    /// The unique root when there is exactly one.
    pub fn unique_root(&self) -> Option<(f64, f64)> {
        match (self.roots.as_slice(), self.slopes.as_slice()) {
            ([p], [s]) => Some((*p, *s)),
            _ => None,
        }
    }
}

pub const DEFAULT_GRID: usize = 10_000;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Finds every `p ∈ (0,1)` with `p = φ(p²)` by scanning `ψ(u) = φ(u)² − u`
/// on a uniform grid and bisecting each sign change.
pub fn solve_fixed_point(m: &ErgmModel, grid: usize, tol: f64) -> Result<FixedPointResult> {
    if grid < 100 {
        return Err(invalid(format!("grid must have at least 100 cells, got {grid}")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }
    let psi = |u: f64| {
        let f = m.phi(u);
        f * f - u
    };
    let mut u_roots: Vec<f64> = Vec::new();
    let mut prev_u = 0.0;
    let mut prev = psi(0.0);
    for i in 1..=grid {
        let u = i as f64 / grid as f64;
        let val = psi(u);
        if val == 0.0 {
            u_roots.push(u);
        } else if prev != 0.0 && (prev > 0.0) != (val > 0.0) {
            let (mut lo, mut hi) = (prev_u, u);
            let lo_positive = prev > 0.0;
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (psi(mid) > 0.0) == lo_positive {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            u_roots.push(0.5 * (lo + hi));
        }
        prev_u = u;
        prev = val;
    }
    let mut roots: Vec<f64> = Vec::new();
    for p in u_roots.into_iter().map(f64::sqrt) {
        match roots.last() {
            Some(&last) if p - last < 10.0 * tol => {}
            _ => roots.push(p),
        }
    }
    let slopes: Vec<f64> = roots
        .iter()
        .map(|&p| {
            let f = m.phi(p * p);
            2.0 * p * m.gamma * f * (1.0 - f)
        })
        .collect();
    let regime = if slopes.iter().any(|s| (s - 1.0).abs() <= tol) {
        Regime::Indeterminate
    } else if slopes.len() == 1 && slopes[0] < 1.0 {
        Regime::HighTemperature
    } else {
        Regime::NotHighTemperature
    };
    Ok(FixedPointResult { roots, slopes, regime })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReplicaStats {
    pub seed: u64,
    pub edge_density: f64,
    /// `max_v | deg(v) − n p* | / √(n ln n)`.
    pub max_deg_dev_norm: f64,
    /// `max_{u<v} | codeg(u,v) − n p*² | / √(n ln n)`.
    pub max_codeg_dev_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErgmExperiment {
    pub beta: f64,
    pub gamma: f64,
    pub n: usize,
    pub sweeps: usize,
    pub seed: u64,
    pub p_star: f64,
    pub slope: f64,
    pub regime: Regime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    pub replicas: Vec<ReplicaStats>,
    /// Largest normalized degree and co-degree deviations over replicas.
    pub k_degree: f64,
    pub k_codegree: f64,
}

/// Samples `replicas` graphs by Glauber dynamics and reports their degree and
/// co-degree deviations from the mean-field prediction.
pub fn concentration_experiment(
    m: &ErgmModel,
    n: usize,
    sweeps: usize,
    replicas: usize,
    seed: u64,
) -> Result<ErgmExperiment> {
    if n < 2 {
        return Err(invalid(format!("experiment needs n >= 2, got {n}")));
    }
    if replicas == 0 {
        return Err(invalid("experiment needs at least one replica"));
    }
    let fp = solve_fixed_point(m, DEFAULT_GRID, DEFAULT_TOL)?;
    let (p_star, slope, warning) = match fp.unique_root() {
        Some((p, s)) if fp.regime == Regime::HighTemperature => (p, s, None),
        _ => {
            let p = fp.roots.first().copied().unwrap_or(0.5);
            let s = fp.slopes.first().copied().unwrap_or(f64::NAN);
            (p, s, Some(format!("model is not in the high-temperature regime ({:?}); using root {p}", fp.regime)))
        }
    };
    let scale = (n as f64 * (n as f64).ln()).sqrt();
    let stats = exec::map_collect(0..replicas, |r| {
        let replica_seed = crate::rng::derive_seed(seed, r as u64);
        let g = crate::generators::gen_ergm(n, m, sweeps, replica_seed);
        let deg_target = n as f64 * p_star;
        let codeg_target = n as f64 * p_star * p_star;
        let max_deg = (0..n).map(|v| (g.degree(v) as f64 - deg_target).abs()).fold(0.0, f64::max);
        let mut max_codeg = 0.0f64;
        for u in 0..n {
            for v in u + 1..n {
                let c = crate::graph::and_count(g.row(u), g.row(v)) as f64;
                max_codeg = max_codeg.max((c - codeg_target).abs());
            }
        }
        ReplicaStats {
            seed: replica_seed,
            edge_density: g.edge_count() as f64 / (n * (n - 1) / 2) as f64,
            max_deg_dev_norm: max_deg / scale,
            max_codeg_dev_norm: max_codeg / scale,
        }
    });
    let k_degree = stats.iter().map(|s| s.max_deg_dev_norm).fold(0.0, f64::max);
    let k_codegree = stats.iter().map(|s| s.max_codeg_dev_norm).fold(0.0, f64::max);
    Ok(ErgmExperiment {
        beta: m.beta,
        gamma: m.gamma,
        n,
        sweeps,
        seed,
        p_star,
        slope,
        regime: fp.regime,
        warning,
        replicas: stats,
        k_degree,
        k_codegree,
    })
}
