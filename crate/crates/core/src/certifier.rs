//! Degree and co-degree deviation scans, fitted density and exponent, and the
//! admissible motif size they imply.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::graph::Graph;
use crate::rng;

/// Largest `n` for which orders 3 and 4 are scanned exhaustively.
pub const EXACT_HIGH_ORDER_LIMIT: usize = 300;
pub const DEFAULT_SAMPLED_TUPLES: u64 = 1_000_000;

/// How an order-`k` deviation is scanned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanMode {
    /// Every `k`-subset. Orders 3 and 4 require `n <= 300`.
    Exact,
    /// `tuples` uniform random `k`-subsets; the result is a lower bound.
    Sampled { tuples: u64, seed: u64 },
    /// Exact where allowed, otherwise sampled.
    Auto { tuples: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Deviation {
    pub order: usize,
    pub max_deviation: f64,
    /// False when only a sample of tuples was scanned.
    pub exact: bool,
    pub tuples_scanned: u128,
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("edge probability must lie in (0, 1), got {p}")))
    }
}

/// Max over `k`-subsets of `| common neighbors − n p^k |` (order 1: degrees).
pub fn assumption_deviation(g: &Graph, p: f64, order: usize, mode: ScanMode) -> Result<Deviation> {
    check_p(p)?;
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidArity(order as u32));
    }
    let n = g.n();
    if n < order {
        return Err(invalid(format!("order {order} needs at least {order} vertices, graph has {n}")));
    }
    let target = n as f64 * p.powi(order as i32);
    let exact_allowed = order <= 2 || n <= EXACT_HIGH_ORDER_LIMIT;
    let sampled = match mode {
        ScanMode::Exact if !exact_allowed => {
            let required = crate::combinatorics::binomial_u128(n as u64, order as u64);
            let budget = crate::combinatorics::binomial_u128(EXACT_HIGH_ORDER_LIMIT as u64, order as u64);
            return Err(Error::BudgetExceeded { required, budget });
        }
        ScanMode::Exact => None,
        ScanMode::Auto { .. } if exact_allowed => None,
        ScanMode::Auto { tuples, seed } | ScanMode::Sampled { tuples, seed } => Some((tuples, seed)),
    };
    if let Some((tuples, seed)) = sampled {
        if order == 1 {
            // Degrees are always cheap; sampling them would only lose information.
            return assumption_deviation(g, p, 1, ScanMode::Exact);
        }
        return Ok(sampled_deviation(g, order, target, tuples, seed));
    }
    let worst = match order {
        1 => (0..n).map(|v| (g.degree(v) as f64 - target).abs()).fold(0.0, f64::max),
        _ => exact_deviation(g, order, target),
    };
    Ok(Deviation {
        order,
        max_deviation: worst,
        exact: true,
        tuples_scanned: crate::combinatorics::binomial_u128(n as u64, order as u64),
    })
}

fn exact_deviation(g: &Graph, order: usize, target: f64) -> f64 {
    let n = g.n();
    let words = g.row_words();
    let per_first = exec::map_collect(0..n, |u| {
        let mut worst = 0.0f64;
        let ru = g.row(u);
        let mut uv = vec![0u64; words];
        let mut uvw = vec![0u64; words];
        for v in u + 1..n {
            let rv = g.row(v);
            if order == 2 {
                let c = crate::graph::and_count(ru, rv);
                worst = worst.max((c as f64 - target).abs());
                continue;
            }
            for i in 0..words {
                uv[i] = ru[i] & rv[i];
            }
            for w in v + 1..n {
                let rw = g.row(w);
                if order == 3 {
                    let c = crate::graph::and_count(&uv, rw);
                    worst = worst.max((c as f64 - target).abs());
                    continue;
                }
                for i in 0..words {
                    uvw[i] = uv[i] & rw[i];
                }
                for x in w + 1..n {
                    let c = crate::graph::and_count(&uvw, g.row(x));
                    worst = worst.max((c as f64 - target).abs());
                }
            }
        }
        worst
    });
    per_first.into_iter().fold(0.0, f64::max)
}

const TUPLE_BATCH: u64 = 1 << 14;

fn sampled_deviation(g: &Graph, order: usize, target: f64, tuples: u64, seed: u64) -> Deviation {
    let n = g.n();
    let batches = tuples.div_ceil(TUPLE_BATCH) as usize;
    let per_batch = exec::map_collect(0..batches, |b| {
        let mut rng = rng::stream(seed, b as u64);
        let count = TUPLE_BATCH.min(tuples - b as u64 * TUPLE_BATCH);
        let mut worst = 0.0f64;
        let mut vs = Vec::with_capacity(order);
        for _ in 0..count {
            vs.clear();
            vs.extend(rand::seq::index::sample(&mut rng, n, order).iter());
            let c = g.codegree_unchecked(&vs);
            worst = worst.max((c as f64 - target).abs());
        }
        worst
    });
    Deviation {
        order,
        max_deviation: per_batch.into_iter().fold(0.0, f64::max),
        exact: false,
        tuples_scanned: tuples as u128,
    }
}

/// `p̂ = 2m / (n(n−1))`.
pub fn estimate_p(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return Err(invalid("density needs at least two vertices"));
    }
    let m = g.edge_count();
    let total = n * (n - 1) / 2;
    if m == 0 || m == total {
        return Err(Error::DegenerateDensity);
    }
    Ok(m as f64 / total as f64)
}

/// `ln(max(dev, 1)) / ln n`, clipped to `[0, 1]`.
pub fn delta_hat(deviation: f64, n: usize) -> f64 {
    if n < 2 {
        return 0.0;
    }
    (deviation.max(1.0).ln() / (n as f64).ln()).clamp(0.0, 1.0)
}

/// Which assumptions the size bound relies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionSet {
    /// Degrees and pairwise co-degrees: exponent cap 1/2.
    A12,
    /// Co-degrees up to order 4: exponent cap 2/3.
    A14,
}

impl AssumptionSet {
    fn cap(self) -> f64 {
        match self {
            AssumptionSet::A12 => 0.5,
            AssumptionSet::A14 => 2.0 / 3.0,
        }
    }
}

/// `γ_p = max(1/p, 1/(1−p))`.
pub fn gamma_p(p: f64) -> f64 {
    (1.0 / p).max(1.0 / (1.0 - p))
}

fn size_bound(n: f64, base: f64, delta: f64, c0_prime: f64, set: AssumptionSet) -> usize {
    let exponent = (1.0 - delta).min(set.cap());
    let bound = exponent * n.ln() / base.ln() - c0_prime * n.ln().ln();
    // The nudge keeps exact integers like ln 2^20 / ln 2 from flooring to 19.
    if bound.is_finite() && bound > 2.0 {
        (bound + 1e-9).floor() as usize
    } else {
        2
    }
}

/// Largest motif size `s` with `s ≤ ((1−δ) ∧ cap) ln n / ln γ_p − C0' ln ln n`,
/// at least 2.
pub fn admissible_motif_size(n: f64, p: f64, delta: f64, c0_prime: f64, set: AssumptionSet) -> Result<usize> {
    check_p(p)?;
    if n < 3.0 || n.is_nan() {
        return Err(invalid(format!("admissible size needs n >= 3, got {n}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid(format!("delta must lie in (0, 1), got {delta}")));
    }
    if c0_prime.is_nan() {
        return Err(invalid("C0' is NaN"));
    }
    Ok(size_bound(n, gamma_p(p), delta, c0_prime, set))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CertifyConfig {
    /// Density to test against; estimated from the graph when absent.
    pub p: Option<f64>,
    pub c: f64,
    pub c0_prime: f64,
    /// Random tuples per order when orders 3 and 4 cannot be scanned exactly.
    pub sampled_tuples: u64,
    pub seed: u64,
    /// Highest order scanned (2 or 4).
    pub max_order: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { p: None, c: 3.0, c0_prime: 1.0, sampled_tuples: DEFAULT_SAMPLED_TUPLES, seed: 0, max_order: 4 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrderReport {
    pub order: usize,
    pub max_deviation: f64,
    pub exact: bool,
    pub tuples_scanned: u128,
    pub delta_hat: f64,
    /// Whether `max_deviation ≤ C n^{delta_hat}`.
    pub within_c: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub c: f64,
    pub c0_prime: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub p_hat: f64,
    pub p_assumed: bool,
    pub orders: Vec<OrderReport>,
    pub gamma_p: f64,
    /// Base for clique-only statements, `1/p`.
    pub clique_gamma: f64,
    /// Base for independent-set-only statements, `1/(1−p)`.
    pub independent_gamma: f64,
    pub s_max_a12: usize,
    /// Absent when orders 3 and 4 were not scanned.
    pub s_max_a14: Option<usize>,
    pub s_max_clique_a12: usize,
    pub s_max_independent_a12: usize,
    pub constants: Constants,
}

impl Certificate {
    pub fn order(&self, k: usize) -> Option<&OrderReport> {
        self.orders.iter().find(|o| o.order == k)
    }

    /// Whether orders `1..=max_order` all satisfy `dev ≤ C n^δ` for the given δ.
    pub fn holds_at(&self, delta: f64, max_order: usize) -> bool {
        let scale = self.constants.c * (self.n as f64).powf(delta);
        self.orders.iter().filter(|o| o.order <= max_order).all(|o| o.max_deviation <= scale)
    }

    fn max_delta(&self, max_order: usize) -> f64 {
        self.orders.iter().filter(|o| o.order <= max_order).map(|o| o.delta_hat).fold(0.0, f64::max)
    }
}

pub fn certify(g: &Graph, config: &CertifyConfig) -> Result<Certificate> {
    let n = g.n();
    if n == 0 {
        return Err(invalid("cannot certify a graph without vertices"));
    }
    if !matches!(config.max_order, 1..=4) {
        return Err(invalid(format!("max order must be 1 to 4, got {}", config.max_order)));
    }
    let (p_hat, p_assumed) = match config.p {
        Some(p) => {
            check_p(p)?;
            (p, true)
        }
        None => (estimate_p(g)?, false),
    };
    let mode = ScanMode::Auto { tuples: config.sampled_tuples, seed: config.seed };
    let mut orders = Vec::new();
    for order in 1..=config.max_order.min(n) {
        let d = assumption_deviation(g, p_hat, order, mode)?;
        let delta = delta_hat(d.max_deviation, n);
        orders.push(OrderReport {
            order,
            max_deviation: d.max_deviation,
            exact: d.exact,
            tuples_scanned: d.tuples_scanned,
            delta_hat: delta,
            within_c: d.max_deviation <= config.c * (n as f64).powf(delta),
        });
    }
    let mut cert = Certificate {
        n,
        p_hat,
        p_assumed,
        orders,
        gamma_p: gamma_p(p_hat),
        clique_gamma: 1.0 / p_hat,
        independent_gamma: 1.0 / (1.0 - p_hat),
        s_max_a12: 2,
        s_max_a14: None,
        s_max_clique_a12: 2,
        s_max_independent_a12: 2,
        constants: Constants { c: config.c, c0_prime: config.c0_prime },
    };
    let nf = n.max(3) as f64;
    let d12 = cert.max_delta(2);
    cert.s_max_a12 = size_bound(nf, cert.gamma_p, d12, config.c0_prime, AssumptionSet::A12);
    cert.s_max_clique_a12 = size_bound(nf, cert.clique_gamma, d12, config.c0_prime, AssumptionSet::A12);
    cert.s_max_independent_a12 = size_bound(nf, cert.independent_gamma, d12, config.c0_prime, AssumptionSet::A12);
    if config.max_order >= 4 && n >= 4 {
        let d14 = cert.max_delta(4);
        cert.s_max_a14 = Some(size_bound(nf, cert.gamma_p, d14, config.c0_prime, AssumptionSet::A14));
    }
    Ok(cert)
}
