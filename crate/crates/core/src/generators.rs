//! Graph families: Erdős–Rényi, dense random regular, the GF(2) binary graph,
//! planted cliques, spherical geometric graphs and edge–triangle ERGMs.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::{index, SliceRandom};
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::ergm::ErgmModel;
use crate::error::{invalid, Result};
use crate::exec;
use crate::geometric::threshold_tpd;
use crate::graph::{iter_bits, words_for, Graph, GraphBuilder};
use crate::rng;

/// Stream index reserved for the Glauber dynamics, away from the per-row streams.
const DYNAMICS_STREAM: u64 = u64::MAX;

/// Largest `k` for which [`gen_binary`] materializes the graph (about 0.5 GiB of rows).
pub const BINARY_MATERIALIZE_MAX_K: u32 = 17;

/// Combines per-row upper-triangle bitsets into a symmetric graph.
fn from_upper_rows(n: usize, upper: Vec<Vec<u64>>) -> Graph {
    let words = words_for(n);
    let mut rows = vec![0u64; n * words];
    for (u, row) in upper.iter().enumerate() {
        for v in iter_bits(row) {
            rows[u * words + v / 64] |= 1 << (v % 64);
            rows[v * words + u / 64] |= 1 << (u % 64);
        }
    }
    Graph::from_rows_trusted(n, rows)
}

/// Erdős–Rényi graph: each pair independently with probability `p`. Row `u`
/// decides pairs `(u, v > u)` from its own stream.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let words = words_for(n);
    let upper = exec::map_collect(0..n, |u| {
        let mut r = rng::stream(seed, u as u64);
        let mut row = vec![0u64; words];
        for v in u + 1..n {
            if r.random_bool(p) {
                row[v / 64] |= 1 << (v % 64);
            }
        }
        row
    });
    Ok(from_upper_rows(n, upper))
}

/// Circulant `d`-regular graph: `i ~ i ± 1, …, i ± ⌊d/2⌋`, plus the antipode when `d` is odd.
pub fn circulant(n: usize, d: usize) -> Result<Graph> {
    if d >= n.max(1) || (n * d) % 2 == 1 {
        return Err(invalid(format!("no circulant {d}-regular graph on {n} vertices")));
    }
    let mut b = GraphBuilder::new(n);
    for i in 0..n {
        for j in 1..=d / 2 {
            b.add_edge_unchecked(i, (i + j) % n);
        }
        if d % 2 == 1 {
            b.add_edge_unchecked(i, (i + n / 2) % n);
        }
    }
    Ok(b.build())
}

/// Default number of switch proposals for [`gen_regular_switch`].
pub fn default_switches(n: usize, d: usize) -> usize {
    10 * n * d
}

/// Random `d`-regular graph from the circulant start after `switches` proposed
/// double-edge switches `{a,b},{c,d} -> {a,d},{c,b}`. Proposals that would
/// create a loop or a repeated edge are rejected and still count.
pub fn gen_regular_switch(n: usize, d: usize, switches: usize, seed: u64) -> Result<Graph> {
    if (n * d) % 2 == 1 {
        return Err(invalid(format!("n * d must be even, got n = {n}, d = {d}")));
    }
    if d >= n {
        return Err(invalid(format!("degree {d} must be below n = {n}")));
    }
    let start = circulant(n, d)?;
    let mut edges: Vec<(usize, usize)> = start.edges().collect();
    if edges.len() < 2 {
        return Ok(start);
    }
    let mut b = GraphBuilder::from_graph(&start);
    let mut r = rng::stream(seed, 0);
    let m = edges.len();
    for _ in 0..switches {
        let i = r.random_range(0..m);
        let j = r.random_range(0..m);
        if i == j {
            continue;
        }
        let (a, bb) = oriented(edges[i], r.random_bool(0.5));
        let (c, dd) = oriented(edges[j], r.random_bool(0.5));
        if a == dd || c == bb || b.has_edge(a, dd) || b.has_edge(c, bb) {
            continue;
        }
        b.remove_edge_unchecked(a, bb);
        b.remove_edge_unchecked(c, dd);
        b.add_edge_unchecked(a, dd);
        b.add_edge_unchecked(c, bb);
        edges[i] = (a, dd);
        edges[j] = (c, bb);
    }
    Ok(b.build())
}

fn oriented((u, v): (usize, usize), flip: bool) -> (usize, usize) {
    if flip {
        (v, u)
    } else {
        (u, v)
    }
}

/// Parameters of the binary graph on odd-weight `k`-bit vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BinaryGraphSpec {
    pub k: u32,
    pub n: u64,
    pub degree: u64,
    /// Negative only for `k = 3`, where the graph has no edges.
    pub codegree_adjacent: i64,
    pub codegree_nonadjacent: i64,
}

impl BinaryGraphSpec {
    pub fn new(k: u32) -> Result<Self> {
        if k.is_multiple_of(2) || !(3..=25).contains(&k) {
            return Err(invalid(format!("binary graph needs odd k in 3..=25, got {k}")));
        }
        Ok(BinaryGraphSpec {
            k,
            n: (1 << (k - 1)) - 1,
            degree: (1 << (k - 2)) - 2,
            codegree_adjacent: (1i64 << (k - 3)) - 3,
            codegree_nonadjacent: (1i64 << (k - 3)) - 1,
        })
    }

    fn all_ones(&self) -> u64 {
        (1 << self.k) - 1
    }

    /// Bit vector of vertex `index` (odd-weight, not all ones, increasing order).
    pub fn vector(&self, index: u64) -> u64 {
        // Each pair {2j, 2j+1} holds exactly one odd-weight value.
        let base = 2 * index;
        if base.count_ones() % 2 == 1 {
            base
        } else {
            base + 1
        }
    }

    /// Vertex id of an odd-weight vector other than all ones.
    pub fn index_of(&self, x: u64) -> Option<u64> {
        if x.count_ones().is_multiple_of(2) || x >= self.all_ones() {
            return None;
        }
        Some(x / 2)
    }
}

/// The binary graph: vertices are odd-weight `k`-bit vectors other than all
/// ones, adjacent iff their GF(2) inner product is 1.
pub fn gen_binary(k: u32) -> Result<Graph> {
    let spec = BinaryGraphSpec::new(k)?;
    if k > BINARY_MATERIALIZE_MAX_K {
        return Err(invalid(format!(
            "materializing the binary graph is limited to k <= {BINARY_MATERIALIZE_MAX_K}, got {k}"
        )));
    }
    let n = spec.n as usize;
    let words = words_for(n);
    let vectors: Vec<u64> = (0..spec.n).map(|i| spec.vector(i)).collect();
    let rows = exec::map_collect(0..n, |u| {
        let x = vectors[u];
        let mut row = vec![0u64; words];
        for (v, &y) in vectors.iter().enumerate() {
            if (x & y).count_ones() % 2 == 1 {
                row[v / 64] |= 1 << (v % 64);
            }
        }
        row
    });
    // ⟨x, x⟩ = |x| mod 2 = 1, so the diagonal is set; clear it.
    let mut flat: Vec<u64> = rows.into_iter().flatten().collect();
    for v in 0..n {
        flat[v * words + v / 64] &= !(1 << (v % 64));
    }
    Ok(Graph::from_rows_trusted(n, flat))
}

/// `∏_{ℓ=1}^{r} (2^{k−ℓ} − [ℓ odd]) / r!`, the product count of independent
/// `r`-sets in the binary graph. Zero for `r > k`.
pub fn binary_independent_count(k: u32, r: u32) -> BigUint {
    if r > k {
        return BigUint::zero();
    }
    let mut product = BigUint::one();
    let mut r_factorial = BigUint::one();
    for l in 1..=r {
        product *= (BigUint::one() << (k - l) as usize) - BigUint::from(l % 2);
        r_factorial *= l;
    }
    product / r_factorial
}

/// Clique in the binary graph from the span of `t = (k−1)/2` disjoint
/// even-weight pairs `e_{2i−1} + e_{2i}`, complemented back to odd weight.
/// Returns the `t` basis images plus `extra` further span elements
/// (all `2^t − 1 − t` of them when `extra` is `None`), as sorted vertex ids.
pub fn binary_clique_construct(k: u32, extra: Option<usize>) -> Result<Vec<usize>> {
    let spec = BinaryGraphSpec::new(k)?;
    let t = (k - 1) / 2;
    let span = (1usize << t) - 1;
    let max_extra = span - t as usize;
    let extra = extra.unwrap_or(max_extra);
    if extra > max_extra {
        return Err(invalid(format!("at most {max_extra} extra clique vertices for k = {k}, got {extra}")));
    }
    let mut masks: Vec<usize> = (1..=span).filter(|m| m.count_ones() == 1).collect();
    masks.extend((1..=span).filter(|m| m.count_ones() > 1).take(extra));
    let vectors: Vec<u64> = masks
        .iter()
        .map(|&mask| {
            let even: u64 = (0..t).filter(|i| mask >> i & 1 == 1).map(|i| 0b11u64 << (2 * i)).sum();
            even ^ spec.all_ones()
        })
        .collect();
    for (i, &x) in vectors.iter().enumerate() {
        for &y in &vectors[i + 1..] {
            if (x & y).count_ones() % 2 != 1 {
                return Err(invalid(format!("construction produced non-adjacent pair {x:#b}, {y:#b}")));
            }
        }
    }
    let mut ids: Vec<usize> = vectors
        .iter()
        .map(|&x| spec.index_of(x).map(|i| i as usize).ok_or_else(|| invalid(format!("{x:#b} is not a vertex"))))
        .collect::<Result<_>>()?;
    ids.sort_unstable();
    Ok(ids)
}

/// Adds a clique on `r` uniformly chosen vertices; returns the graph and the
/// sorted clique members.
pub fn plant_clique_with_members(g: &Graph, r: usize, seed: u64) -> Result<(Graph, Vec<usize>)> {
    if r > g.n() {
        return Err(invalid(format!("cannot plant a clique of size {r} in {} vertices", g.n())));
    }
    let mut rr = rng::stream(seed, 0);
    let mut members = index::sample(&mut rr, g.n(), r).into_vec();
    members.sort_unstable();
    let mut b = GraphBuilder::from_graph(g);
    for (i, &u) in members.iter().enumerate() {
        for &v in &members[i + 1..] {
            b.add_edge_unchecked(u, v);
        }
    }
    Ok((b.build(), members))
}

pub fn plant_clique(g: &Graph, r: usize, seed: u64) -> Result<Graph> {
    plant_clique_with_members(g, r, seed).map(|(g, _)| g)
}

/// `n` uniform points on the sphere in `R^d` (row-major), one stream per point.
pub fn sphere_points(n: usize, d: usize, seed: u64) -> Vec<f64> {
    exec::map_collect(0..n, |v| {
        let mut r = rng::stream(seed, v as u64);
        let mut x: Vec<f64> = (0..d).map(|_| r.sample(StandardNormal)).collect();
        let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        x.iter_mut().for_each(|a| *a /= norm);
        x
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Spherical random geometric graph with marginal edge probability `p`:
/// `i ~ j` iff `<X_i, X_j> >= t_{p,d}`.
pub fn gen_geometric(n: usize, d: usize, p: f64, seed: u64) -> Result<Graph> {
    let spec = threshold_tpd(p, d)?;
    let points = sphere_points(n, d, seed);
    let words = words_for(n);
    let upper = exec::map_collect(0..n, |u| {
        let x = &points[u * d..(u + 1) * d];
        let mut row = vec![0u64; words];
        for v in u + 1..n {
            let y = &points[v * d..(v + 1) * d];
            let dot: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            if dot >= spec.t {
                row[v / 64] |= 1 << (v % 64);
            }
        }
        row
    });
    Ok(from_upper_rows(n, upper))
}

/// Glauber dynamics for the edge–triangle model started from `ER(n, φ(0))`.
/// Each sweep visits all pairs in a fresh random order and resamples the pair
/// with probability `φ(codeg / n)`.
pub fn gen_ergm(n: usize, m: &ErgmModel, sweeps: usize, seed: u64) -> Graph {
    let start = gen_er(n, m.phi(0.0), seed).expect("sigmoid lies in [0, 1]");
    if n < 2 {
        return start;
    }
    let mut b = GraphBuilder::from_graph(&start);
    let mut r = rng::stream(seed, DYNAMICS_STREAM);
    let mut pairs: Vec<(u32, u32)> =
        (0..n as u32).flat_map(|u| (u + 1..n as u32).map(move |v| (u, v))).collect();
    let inv_n = 1.0 / n as f64;
    for _ in 0..sweeps {
        pairs.shuffle(&mut r);
        for &(u, v) in &pairs {
            let (u, v) = (u as usize, v as usize);
            let prob = m.phi(b.codegree(u, v) as f64 * inv_n);
            let present = r.random_bool(prob);
            b.set_edge(u, v, present);
        }
    }
    b.build()
}
