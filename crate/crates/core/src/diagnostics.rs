//! Good/bad vertex sets, averaged common-neighborhood sizes, good chains, the
//! motif error functional and the recursion bound that drives the census proof.

use rand::seq::IndexedRandom;
use serde::Serialize;

use crate::census::{count_induced_exact_with_budget, count_induced_sampled, Budget};
use crate::combinatorics::{factorial, pairs};
use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::graph::{Graph, Sign, VertexSet, VertexTuple};
use crate::rng;

pub const DEFAULT_C0_BAR: f64 = 4.0;

/// Parameters of the good-vertex threshold
/// `C̃ |B| p^ξ q^{1−ξ} n^{ε(δ−1)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GoodSetParams {
    pub c_tilde: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub p: f64,
}

impl GoodSetParams {
    pub fn new(c_tilde: f64, epsilon: f64, delta: f64, p: f64) -> Result<Self> {
        if !(c_tilde > 0.0) || !c_tilde.is_finite() {
            return Err(invalid(format!("C~ must be positive, got {c_tilde}")));
        }
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1], got {epsilon}")));
        }
        if !(delta < 1.0) || delta.is_nan() {
            return Err(invalid(format!("delta must be below 1, got {delta}")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("p must lie in [0, 1], got {p}")));
        }
        Ok(GoodSetParams { c_tilde, epsilon, delta, p })
    }

    /// `ε = C̄₀ ln ln n / ((1−δ) ln n)`, capped at 1 (the raw value exceeds 1 for small `n`).
    pub fn default_epsilon(n: usize, delta: f64, c0_bar: f64) -> Result<f64> {
        if n < 3 {
            return Err(invalid(format!("default epsilon needs n >= 3, got {n}")));
        }
        if !(delta < 1.0) || !(c0_bar > 0.0) {
            return Err(invalid(format!("default epsilon needs delta < 1 and C0 > 0, got ({delta}, {c0_bar})")));
        }
        let ln_n = (n as f64).ln();
        Ok((c0_bar * ln_n.ln() / ((1.0 - delta) * ln_n)).min(1.0))
    }

    pub fn with_default_epsilon(n: usize, c_tilde: f64, delta: f64, p: f64) -> Result<Self> {
        Self::new(c_tilde, Self::default_epsilon(n, delta, DEFAULT_C0_BAR)?, delta, p)
    }

    fn weight(&self, sign: Sign) -> f64 {
        match sign {
            Sign::Adjacent => self.p,
            Sign::NonAdjacent => 1.0 - self.p,
        }
    }

    /// `n^{ε(δ−1)/2}`
    pub fn shrink(&self, n: usize) -> f64 {
        (n as f64).powf(self.epsilon * (self.delta - 1.0) / 2.0)
    }

    pub fn threshold(&self, n: usize, set_size: usize, sign: Sign) -> f64 {
        self.c_tilde * set_size as f64 * self.weight(sign) * self.shrink(n)
    }
}

/// Vertices `v` with `| |N_v^ξ ∩ B| − |B| p^ξ q^{1−ξ} | ≤ threshold`.
pub fn good_set(g: &Graph, set: &VertexSet, sign: Sign, params: &GoodSetParams) -> Result<VertexSet> {
    if set.is_empty() {
        return Err(invalid("good set needs a nonempty base set"));
    }
    let n = g.n();
    let threshold = params.threshold(n, set.len(), sign);
    if !(threshold > 0.0) {
        return Err(invalid(format!("threshold must be positive, got {threshold}")));
    }
    let expected = set.len() as f64 * params.weight(sign);
    let mut good = VertexSet::empty(n);
    for v in 0..n {
        let observed = g.neighborhood_in_set(v, set, sign)? as f64;
        if (observed - expected).abs() <= threshold {
            good.insert(v);
        }
    }
    Ok(good)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TupleConvention {
    /// Tuples may repeat vertices.
    AllTuples,
    /// Ordered tuples of distinct vertices.
    DistinctTuples,
}

pub const DISTINCT_TUPLES_MAX_R: usize = 3;
pub const DISTINCT_TUPLES_MAX_N: usize = 60;

/// Summed common-neighborhood size over a family of tuples, normalized by `(n)_r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FBar {
    pub r: usize,
    pub zeros: usize,
    pub convention: TupleConvention,
    /// Exact tuple sum of `f_r`.
    pub sum: u128,
    /// `(n)_r`
    pub normalizer: u128,
    pub value: f64,
}

fn falling_u128(n: usize, r: usize) -> Option<u128> {
    (0..r).try_fold(1u128, |acc, i| acc.checked_mul((n - i) as u128))
}

/// Average of `f_r(ν̄, ξ̄)` over the chosen tuple family, divided by `(n)_r`.
/// With repetition allowed the sum collapses to `Σ_v |N_v^0|^{zeros} |N_v^1|^{ones}`.
pub fn f_bar(g: &Graph, signs: &[Sign], convention: TupleConvention) -> Result<FBar> {
    let r = signs.len();
    let n = g.n();
    if r == 0 {
        return Err(invalid("f_bar needs r >= 1"));
    }
    if r > n {
        return Err(invalid(format!("r = {r} exceeds n = {n}")));
    }
    let zeros = signs.iter().filter(|s| !s.is_adjacent()).count();
    let overflow = || invalid(format!("tuple sum overflows at n = {n}, r = {r}"));
    let normalizer = falling_u128(n, r).ok_or_else(overflow)?;
    let sum = match convention {
        TupleConvention::AllTuples => {
            let mut total: u128 = 0;
            for v in 0..n {
                let ones = g.degree(v) as u128;
                let nons = (n - 1 - g.degree(v)) as u128;
                let term = nons
                    .checked_pow(zeros as u32)
                    .and_then(|a| ones.checked_pow((r - zeros) as u32).and_then(|b| a.checked_mul(b)))
                    .ok_or_else(overflow)?;
                total = total.checked_add(term).ok_or_else(overflow)?;
            }
            total
        }
        TupleConvention::DistinctTuples => {
            if r > DISTINCT_TUPLES_MAX_R || n > DISTINCT_TUPLES_MAX_N {
                return Err(Error::BudgetExceeded {
                    required: normalizer,
                    budget: falling_u128(DISTINCT_TUPLES_MAX_N, DISTINCT_TUPLES_MAX_R).unwrap_or(u128::MAX),
                });
            }
            exec::map_sum(0..n, |first| {
                let mut acc = 0u128;
                let mut tuple = vec![first];
                distinct_sum(g, signs, &mut tuple, &mut acc);
                acc
            })
        }
    };
    Ok(FBar { r, zeros, convention, sum, normalizer, value: sum as f64 / normalizer as f64 })
}

fn distinct_sum(g: &Graph, signs: &[Sign], tuple: &mut Vec<usize>, acc: &mut u128) {
    if tuple.len() == signs.len() {
        let t = VertexTuple::new(tuple.clone(), signs.to_vec()).expect("distinct by construction");
        *acc += g.tuple_common_neighborhood(&t).expect("vertices in range") as u128;
        return;
    }
    for v in 0..g.n() {
        if !tuple.contains(&v) {
            tuple.push(v);
            distinct_sum(g, signs, tuple, acc);
            tuple.pop();
        }
    }
}

/// Common generalized neighborhood of a tuple prefix.
fn prefix_set(g: &Graph, vertices: &[usize], signs: &[Sign]) -> Result<VertexSet> {
    let mut set = VertexSet::full(g.n());
    for (&v, &s) in vertices.iter().zip(signs) {
        let nb = g.generalized_neighborhood(v, s)?;
        set.intersect_with(nb.words());
    }
    Ok(set)
}

/// Index (1-based) of the first chain vertex from the third on that is not
/// good for its prefix's common neighborhood.
fn first_bad_link(g: &Graph, chain: &VertexTuple, params: &GoodSetParams) -> Result<Option<usize>> {
    let (vs, ss) = (chain.vertices(), chain.signs());
    for j in 2..chain.len() {
        let base = prefix_set(g, &vs[..j], &ss[..j])?;
        if base.is_empty() {
            return Ok(Some(j + 1));
        }
        let observed = g.neighborhood_in_set(vs[j], &base, ss[j])? as f64;
        let expected = base.len() as f64 * params.weight(ss[j]);
        if (observed - expected).abs() > params.threshold(g.n(), base.len(), ss[j]) {
            return Ok(Some(j + 1));
        }
    }
    Ok(None)
}

/// Builds a chain with the given signs. The first two vertices are drawn
/// uniformly; each later vertex uniformly from the good set of the current
/// prefix, excluding vertices already used.
pub fn greedy_good_chain(g: &Graph, signs: &[Sign], params: &GoodSetParams, seed: u64) -> Result<VertexTuple> {
    let n = g.n();
    if signs.len() > n || signs.is_empty() {
        return Err(invalid(format!("chain length must lie in 1..={n}, got {}", signs.len())));
    }
    let mut r = rng::stream(seed, 0);
    let mut chain = VertexTuple::new(Vec::new(), Vec::new())?;
    for (j, &sign) in signs.iter().enumerate() {
        let candidates: Vec<usize> = if j < 2 {
            (0..n).filter(|v| !chain.vertices().contains(v)).collect()
        } else {
            let base = prefix_set(g, chain.vertices(), chain.signs())?;
            if base.is_empty() {
                return Err(Error::PreconditionFailed {
                    index: Some(j + 1),
                    reason: "prefix has no common generalized neighbors".into(),
                });
            }
            let good = good_set(g, &base, sign, params)?;
            good.iter().filter(|v| !chain.vertices().contains(v)).collect()
        };
        let &v = candidates.choose(&mut r).ok_or_else(|| Error::PreconditionFailed {
            index: Some(j + 1),
            reason: "no good vertex left to extend the chain".into(),
        })?;
        chain.push(v, sign)?;
    }
    Ok(chain)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainEstimate {
    pub r: usize,
    pub f_r: usize,
    /// `n p^{ones} q^{zeros}`
    pub expected: f64,
    /// `3 C̃ r n^{ε(δ−1)/2} · expected`
    pub bound: f64,
    pub deviation: f64,
    pub holds: bool,
}

/// Checks `| f_r − n p^{ones} q^{zeros} | ≤ 3 C̃ r n^{ε(δ−1)/2} n p^{ones} q^{zeros}`
/// for a chain whose links from the third on are all good.
pub fn good_chain_estimate(g: &Graph, chain: &VertexTuple, params: &GoodSetParams) -> Result<ChainEstimate> {
    if chain.is_empty() {
        return Err(invalid("empty chain"));
    }
    if let Some(index) = first_bad_link(g, chain, params)? {
        return Err(Error::PreconditionFailed {
            index: Some(index),
            reason: format!("chain vertex {index} is not good for its prefix"),
        });
    }
    let n = g.n();
    let r = chain.len();
    let zeros = chain.zeros();
    let f_r = g.tuple_common_neighborhood(chain)?;
    let expected = n as f64 * params.p.powi((r - zeros) as i32) * (1.0 - params.p).powi(zeros as i32);
    let bound = 3.0 * params.c_tilde * r as f64 * params.shrink(n) * expected;
    let deviation = (f_r as f64 - expected).abs();
    Ok(ChainEstimate { r, f_r, expected, bound, deviation, holds: deviation <= bound })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassError {
    pub canon_hex: String,
    pub edges: u32,
    /// `n_G(H) / ((n)_r / |Aut H|)`
    pub observed: f64,
    /// `(p/q)^{|E|} q^{C(r,2)}`
    pub expected: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorFunctional {
    pub r: usize,
    pub value: f64,
    pub exact: bool,
    pub classes: Vec<ClassError>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FunctionalMode {
    Exact,
    Sampled { samples: u64, seed: u64 },
    /// Exact within the budget, sampled beyond it.
    Auto { samples: u64, seed: u64 },
}

/// `E_n(r) = max_H | n_G(H) / ((n)_r / |Aut H|) − (p/q)^{|E(H)|} q^{C(r,2)} |`.
pub fn error_functional(g: &Graph, r: usize, p: f64, mode: FunctionalMode, budget: Budget) -> Result<ErrorFunctional> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("p must lie in (0, 1), got {p}")));
    }
    let q = 1.0 - p;
    let expected = |edges: u32| (p / q).powi(edges as i32) * q.powi(pairs(r) as i32);
    let r_factorial = factorial(r) as f64;
    let exact = match mode {
        FunctionalMode::Exact => Some(count_induced_exact_with_budget(g, r, budget)?),
        FunctionalMode::Auto { .. } => match count_induced_exact_with_budget(g, r, budget) {
            Err(Error::BudgetExceeded { .. }) => None,
            other => Some(other?),
        },
        FunctionalMode::Sampled { .. } => None,
    };
    let classes: Vec<ClassError> = match (exact, mode) {
        (Some(counts), _) => {
            let ln_scale = crate::combinatorics::ln_falling(g.n() as f64, r);
            counts
                .counts
                .iter()
                .map(|(c, x)| ClassError {
                    canon_hex: c.canon_hex(),
                    edges: c.edge_count,
                    observed: *x as f64 * ((c.aut_size as f64).ln() - ln_scale).exp(),
                    expected: expected(c.edge_count),
                    stderr: None,
                })
                .collect()
        }
        (None, FunctionalMode::Sampled { samples, seed } | FunctionalMode::Auto { samples, seed }) => {
            // C(n, r) / ((n)_r / aut) = aut / r!
            count_induced_sampled(g, r, samples, seed)?
                .into_iter()
                .map(|s| {
                    let scale = s.class.aut_size as f64 / r_factorial;
                    ClassError {
                        canon_hex: s.class.canon_hex(),
                        edges: s.class.edge_count,
                        observed: s.frequency * scale,
                        expected: expected(s.class.edge_count),
                        stderr: Some(s.frequency_stderr * scale),
                    }
                })
                .collect()
        }
        (None, FunctionalMode::Exact) => unreachable!("exact mode always counts"),
    };
    let value = classes.iter().map(|c| (c.observed - c.expected).abs()).fold(0.0, f64::max);
    Ok(ErrorFunctional { r, value, exact: classes.iter().all(|c| c.stderr.is_none()), classes })
}

fn check_recursion_args(r: usize, n: f64, c_star: f64) -> Result<f64> {
    if r < 2 || !(n >= 4.0) || !(c_star >= 0.0) {
        return Err(invalid(format!("recursion bound needs r >= 2, n >= 4, C* >= 0, got ({r}, {n}, {c_star})")));
    }
    Ok(n.log2())
}

/// `E_{r+1} ≤ E_r 2^{−r} (1 + C* r / (log₂ n)³) + C* r / (log₂ n)³ · 2^{−C(r+1,2)}`.
pub fn recursion_bound(e_r: f64, r: usize, n: f64, c_star: f64) -> Result<f64> {
    let log_n = check_recursion_args(r, n, c_star)?;
    if !(e_r >= 0.0) {
        return Err(invalid(format!("E_r must be non-negative, got {e_r}")));
    }
    let slack = c_star * r as f64 / log_n.powi(3);
    Ok(e_r * 0.5f64.powi(r as i32) * (1.0 + slack) + slack * 0.5f64.powi(pairs(r + 1) as i32))
}

/// Accumulated form `E_s ≤ 2 E_2 2^{−C(s,2)} + 2 C* / (log₂ n)² · 2^{−C(s,2)}`.
pub fn recursion_closed_form(e_2: f64, s: usize, n: f64, c_star: f64) -> Result<f64> {
    let log_n = check_recursion_args(s, n, c_star)?;
    let scale = 0.5f64.powi(pairs(s) as i32);
    Ok(2.0 * e_2 * scale + 2.0 * c_star / (log_n * log_n) * scale)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecursionStep {
    /// Size the bound applies to.
    pub r: usize,
    pub bound: f64,
    pub observed: f64,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GoodFraction {
    pub adjacent: f64,
    pub non_adjacent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagReport {
    pub n: usize,
    pub p: f64,
    pub c_star: f64,
    pub params: GoodSetParams,
    #[serde(rename = "E_n")]
    pub e_n: Vec<ErrorFunctional>,
    pub recursion_bounds: Vec<RecursionStep>,
    /// Share of vertices good for `B = V` under each sign.
    pub good_fraction: GoodFraction,
}

/// Error functional for `r = 2..=max_r`, the recursion bound between
/// consecutive sizes, and the good-vertex fraction for the whole vertex set.
pub fn diag_report(
    g: &Graph,
    p: f64,
    max_r: usize,
    c_star: f64,
    params: &GoodSetParams,
    mode: FunctionalMode,
) -> Result<DiagReport> {
    let n = g.n();
    if max_r < 2 || max_r > n {
        return Err(invalid(format!("max_r must lie in 2..={n}, got {max_r}")));
    }
    let e_n = (2..=max_r)
        .map(|r| error_functional(g, r, p, mode, Budget::default()))
        .collect::<Result<Vec<_>>>()?;
    let mut recursion_bounds = Vec::new();
    for w in e_n.windows(2) {
        let bound = recursion_bound(w[0].value, w[0].r, n as f64, c_star)?;
        recursion_bounds.push(RecursionStep { r: w[1].r, bound, observed: w[1].value, holds: w[1].value <= bound });
    }
    let all = VertexSet::full(n);
    let frac = |sign| good_set(g, &all, sign, params).map(|s| s.len() as f64 / n as f64);
    let good_fraction = GoodFraction { adjacent: frac(Sign::Adjacent)?, non_adjacent: frac(Sign::NonAdjacent)? };
    Ok(DiagReport { n, p, c_star, params: *params, e_n, recursion_bounds, good_fraction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_binary, gen_er};
    use crate::graph::tests::random_graph;
    use proptest::prelude::*;

    fn all(n: usize) -> VertexSet {
        VertexSet::full(n)
    }

    #[test]
    fn good_set_examples() {
        // K_n against p = 1: every deviation is exactly 1.
        let g = Graph::complete(8);
        let loose = GoodSetParams::new(1.0, 0.5, 0.0, 1.0).unwrap();
        assert!(loose.threshold(8, 8, Sign::Adjacent) >= 1.0);
        assert_eq!(good_set(&g, &all(8), Sign::Adjacent, &loose).unwrap().len(), 8);
        let tiny = GoodSetParams::new(0.05, 1.0, 0.0, 1.0).unwrap();
        assert!(tiny.threshold(8, 8, Sign::Adjacent) < 1.0);
        assert!(good_set(&g, &all(8), Sign::Adjacent, &tiny).unwrap().is_empty());

        let b = gen_binary(7).unwrap();
        let params = GoodSetParams::new(1.0, 0.1, 0.0, 0.5).unwrap();
        assert!(params.threshold(63, 63, Sign::Adjacent) >= 1.5);
        assert_eq!(good_set(&b, &all(63), Sign::Adjacent, &params).unwrap().len(), 63);

        let e = Graph::empty(64);
        let params = GoodSetParams::with_default_epsilon(64, 1.0, 0.5, 0.5).unwrap();
        assert!(good_set(&e, &all(64), Sign::Adjacent, &params).unwrap().is_empty());
        assert!(good_set(&e, &VertexSet::empty(64), Sign::Adjacent, &params).is_err());
    }

    #[test]
    fn binary_graph_all_good() {
        for k in [5, 7, 9, 11, 13] {
            let g = gen_binary(k).unwrap();
            let n = g.n();
            let params = GoodSetParams::with_default_epsilon(n, 3.0, 0.0, 0.5).unwrap();
            for sign in [Sign::Adjacent, Sign::NonAdjacent] {
                assert_eq!(good_set(&g, &all(n), sign, &params).unwrap().len(), n, "k={k}");
            }
        }
    }

    #[test]
    fn default_epsilon_is_capped() {
        assert_eq!(GoodSetParams::default_epsilon(15, 0.0, 4.0).unwrap(), 1.0);
        let e = GoodSetParams::default_epsilon(1 << 40, 0.0, 4.0).unwrap();
        let ln_n = 40.0 * std::f64::consts::LN_2;
        assert!((e - 4.0 * ln_n.ln() / ln_n).abs() < 1e-15);
        assert!(GoodSetParams::default_epsilon(2, 0.0, 4.0).is_err());
    }

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn f_bar_examples() {
        let g = path3();
        for conv in [TupleConvention::AllTuples, TupleConvention::DistinctTuples] {
            let f = f_bar(&g, &[Sign::Adjacent], conv).unwrap();
            assert_eq!((f.sum, f.normalizer), (4, 3));
        }
        let f = f_bar(&Graph::complete(4), &[Sign::Adjacent; 2], TupleConvention::AllTuples).unwrap();
        assert_eq!(f.value, 3.0);
        let er = random_graph(30, 0.5, 3);
        let a = f_bar(&er, &[Sign::Adjacent; 2], TupleConvention::AllTuples).unwrap().value;
        let d = f_bar(&er, &[Sign::Adjacent; 2], TupleConvention::DistinctTuples).unwrap().value;
        assert!((a - d).abs() <= 2.0 * 4.0 / 30.0 * a);
        assert!(matches!(
            f_bar(&random_graph(61, 0.5, 1), &[Sign::Adjacent; 2], TupleConvention::DistinctTuples),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(f_bar(&g, &[], TupleConvention::AllTuples).is_err());
    }

    /// Sum of `f_r` over every tuple with repetition, by brute force.
    fn with_repetition_sum(g: &Graph, signs: &[Sign]) -> u128 {
        let n = g.n();
        let r = signs.len();
        let mut total = 0u128;
        for idx in 0..n.pow(r as u32) {
            let tuple: Vec<usize> = (0..r).map(|i| idx / n.pow(i as u32) % n).collect();
            for w in 0..n {
                let inside = tuple.iter().zip(signs).all(|(&v, s)| {
                    w != v && g.has_edge(v, w) == s.is_adjacent()
                });
                total += inside as u128;
            }
        }
        total
    }

    #[test]
    fn all_tuples_matches_repetition_sum() {
        let g = random_graph(9, 0.4, 2);
        for signs in [vec![Sign::Adjacent, Sign::NonAdjacent, Sign::Adjacent], vec![Sign::NonAdjacent; 2]] {
            let f = f_bar(&g, &signs, TupleConvention::AllTuples).unwrap();
            assert_eq!(f.sum, with_repetition_sum(&g, &signs));
        }
    }

    #[test]
    fn chain_examples() {
        let g = gen_er(512, 0.5, 6).unwrap();
        let params = GoodSetParams::with_default_epsilon(512, 1.0, 0.7, 0.5).unwrap();
        let chain = greedy_good_chain(&g, &[Sign::Adjacent; 4], &params, 3).unwrap();
        let est = good_chain_estimate(&g, &chain, &params).unwrap();
        assert!(est.holds, "{est:?}");

        let b = gen_binary(11).unwrap();
        let params = GoodSetParams::with_default_epsilon(b.n(), 3.0, 0.0, 0.5).unwrap();
        let chain = greedy_good_chain(&b, &[Sign::Adjacent; 3], &params, 1).unwrap();
        let est = good_chain_estimate(&b, &chain, &params).unwrap();
        assert!(est.holds);
        assert!((est.f_r as f64 - 128.0).abs() <= 4.0, "{}", est.f_r);
    }

    #[test]
    fn bad_third_vertex_is_rejected() {
        // Star centered at 0 plus isolated vertices: 1 and 2 share only 0;
        // vertex 3 sees nothing of that set, far from half of it.
        let g = Graph::from_edges(40, (1..30).map(|v| (0, v))).unwrap();
        let params = GoodSetParams::new(0.1, 1.0, 0.0, 0.5).unwrap();
        let chain = VertexTuple::adjacent(vec![1, 2, 35]).unwrap();
        match good_chain_estimate(&g, &chain, &params) {
            Err(Error::PreconditionFailed { index, .. }) => assert_eq!(index, Some(3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn error_functional_examples() {
        let e = error_functional(&Graph::complete(4), 2, 0.5, FunctionalMode::Exact, Budget::default()).unwrap();
        assert!((e.value - 0.5).abs() < 1e-15);

        // Binary graph k = 9: edge density 126/254 against 1/2.
        let b = gen_binary(9).unwrap();
        let e = error_functional(&b, 2, 0.5, FunctionalMode::Exact, Budget::default()).unwrap();
        let density = 126.0 / 254.0;
        assert!((e.value - (0.5 - density)).abs() < 1e-12, "{}", e.value);

        let g = random_graph(40, 0.5, 5);
        let exact = error_functional(&g, 3, 0.5, FunctionalMode::Exact, Budget::default()).unwrap();
        let auto = error_functional(&g, 3, 0.5, FunctionalMode::Auto { samples: 10, seed: 1 }, Budget::default()).unwrap();
        assert_eq!(exact, auto);
        let sampled =
            error_functional(&g, 3, 0.5, FunctionalMode::Sampled { samples: 50_000, seed: 1 }, Budget::default())
                .unwrap();
        assert!(!sampled.exact);
        assert!((sampled.value - exact.value).abs() < 0.03);
    }

    #[test]
    fn recursion_examples() {
        let v = recursion_bound(0.01, 2, 1024.0, 1.0).unwrap();
        assert!((v - 0.002_755).abs() < 1e-15, "{v}");
        let v = recursion_bound(0.0, 3, 1024.0, 2.0).unwrap();
        assert!((v - 6.0 / 1000.0 / 64.0).abs() < 1e-15);
        assert!(recursion_bound(0.1, 1, 1024.0, 1.0).is_err());
        assert!(recursion_bound(0.1, 2, 2.0, 1.0).is_err());
        let c = recursion_closed_form(0.01, 3, 1024.0, 1.0).unwrap();
        assert!((c - (0.02 / 8.0 + 0.02 / 8.0)).abs() < 1e-15);
    }

    #[test]
    fn recursion_bound_not_monotone_in_r() {
        let a = recursion_bound(0.1, 2, 4096.0, 1.0).unwrap();
        let b = recursion_bound(0.1, 3, 4096.0, 1.0).unwrap();
        assert!(b < a);
    }

    #[test]
    fn diag_report_shape() {
        let g = random_graph(48, 0.5, 8);
        let params = GoodSetParams::with_default_epsilon(48, 3.0, 0.5, 0.5).unwrap();
        let rep = diag_report(&g, 0.5, 4, 32.0, &params, FunctionalMode::Exact).unwrap();
        assert_eq!(rep.e_n.len(), 3);
        assert_eq!(rep.recursion_bounds.len(), 2);
        let json = serde_json::to_value(&rep).unwrap();
        assert!(json["E_n"].is_array() && json["good_fraction"]["adjacent"].is_number());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn good_set_monotone_in_c(seed in any::<u64>(), c in 0.01f64..2.0) {
            let g = random_graph(40, 0.5, seed);
            let small = GoodSetParams::new(c, 0.5, 0.5, 0.5).unwrap();
            let big = GoodSetParams::new(c * 1.5, 0.5, 0.5, 0.5).unwrap();
            let a = good_set(&g, &all(40), Sign::Adjacent, &small).unwrap();
            let b = good_set(&g, &all(40), Sign::Adjacent, &big).unwrap();
            prop_assert!(a.iter().all(|v| b.contains(v)));
        }

        #[test]
        fn recursion_monotone(e in 0.0f64..1.0, r in 2usize..8, c in 0.0f64..50.0) {
            let n = 4096.0;
            let base = recursion_bound(e, r, n, c).unwrap();
            prop_assert!(recursion_bound(e + 0.01, r, n, c).unwrap() >= base);
            prop_assert!(recursion_bound(e, r, n, c + 1.0).unwrap() >= base);
        }

        #[test]
        fn all_tuples_identity(seed in any::<u64>(), n in 2usize..8, mask in 0u8..8, r in 1usize..4) {
            let g = random_graph(n, 0.5, seed);
            let signs: Vec<Sign> = (0..r).map(|i| Sign::from_bit(mask >> i & 1 == 1)).collect();
            prop_assume!(r <= n);
            let f = f_bar(&g, &signs, TupleConvention::AllTuples).unwrap();
            prop_assert_eq!(f.sum, with_repetition_sum(&g, &signs));
        }
    }
}
