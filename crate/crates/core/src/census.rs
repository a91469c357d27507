//! Induced motif counts and their Erdős–Rényi baselines.

use serde::Serialize;

use crate::combinatorics::{binomial_u128, ln_binomial, ln_falling, pairs};
use crate::error::{invalid, Error, Result};
use crate::exec;
use crate::graph::{Graph, WORD};
use crate::motif::{canonical_code, extend_code, labeled_code, motif_table, MotifClass, MotifTable};
use crate::rng;

/// Upper bound on the estimated number of 64-bit word operations an exact
/// count may perform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(500_000_000_000)
    }
}

impl Budget {
    fn check(self, required: u128) -> Result<()> {
        if required > self.0 {
            Err(Error::BudgetExceeded { required, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

/// Exact induced counts, one entry per class in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExactCounts {
    pub s: usize,
    pub counts: Vec<(MotifClass, u64)>,
}

impl ExactCounts {
    pub fn get(&self, canon: u32) -> Option<u64> {
        self.counts.iter().find(|(c, _)| c.canon == canon).map(|&(_, n)| n)
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&(_, n)| n as u128).sum()
    }
}

fn check_census_size(g: &Graph, s: usize) -> Result<&'static MotifTable> {
    let table = motif_table(s)?;
    if s > g.n() {
        return Err(invalid(format!("motif size {s} exceeds vertex count {}", g.n())));
    }
    Ok(table)
}

pub fn count_induced_exact(g: &Graph, s: usize) -> Result<ExactCounts> {
    count_induced_exact_with_budget(g, s, Budget::default())
}

pub fn count_induced_exact_with_budget(g: &Graph, s: usize, budget: Budget) -> Result<ExactCounts> {
    let table = check_census_size(g, s)?;
    let raw = if s == 4 { four_vertex_counts(g, table, budget)? } else { subset_counts(g, table, budget)? };
    Ok(ExactCounts { s, counts: table.classes().iter().copied().zip(raw).collect() })
}

/// Exact counts by enumerating `(s-1)`-subsets in colex order and counting,
/// with bitset intersections, how many larger vertices complete each
/// adjacency pattern. Sharded by smallest vertex.
pub fn count_induced_enumerate(g: &Graph, s: usize, budget: Budget) -> Result<ExactCounts> {
    let table = check_census_size(g, s)?;
    let raw = subset_counts(g, table, budget)?;
    Ok(ExactCounts { s, counts: table.classes().iter().copied().zip(raw).collect() })
}

fn subset_counts(g: &Graph, table: &MotifTable, budget: Budget) -> Result<Vec<u64>> {
    let (n, s) = (g.n(), table.s());
    let words = g.row_words().max(1) as u128;
    budget.check(binomial_u128(n as u64, (s - 1) as u64) * (1u128 << (s - 1)) * words)?;
    let shards = exec::map_collect(0..n, |v| {
        let mut state = Dfs::new(g, table);
        state.root(v);
        state.counts
    });
    let mut counts = vec![0u64; table.classes().len()];
    for shard in shards {
        for (c, x) in counts.iter_mut().zip(shard) {
            *c += x;
        }
    }
    Ok(counts)
}

struct Dfs<'a> {
    g: &'a Graph,
    s: usize,
    classifier: crate::motif::Classifier<'a>,
    counts: Vec<u64>,
    /// `levels[j]` holds `2^(j+1)` pattern sets of `words` words each.
    levels: Vec<Vec<u64>>,
    words: usize,
}

impl<'a> Dfs<'a> {
    fn new(g: &'a Graph, table: &'a MotifTable) -> Self {
        let s = table.s();
        let words = g.row_words();
        let levels = (1..s).map(|j| vec![0u64; (1 << j) * words]).collect();
        Dfs { g, s, classifier: table.classifier(), counts: vec![0; table.classes().len()], levels, words }
    }

    /// Splits the sets of the previous level (or the whole vertex range at the
    /// root) by adjacency to `v`, keeping only vertices above `v`.
    fn split(&mut self, depth: usize, v: usize) {
        let words = self.words;
        let start = (v + 1) / WORD;
        let low_mask = if (v + 1).is_multiple_of(WORD) { u64::MAX } else { !((1u64 << ((v + 1) % WORD)) - 1) };
        let row = self.g.row(v);
        let n = self.g.n();
        let (before, rest) = self.levels.split_at_mut(depth);
        let out = &mut rest[0];
        let parents = if depth == 0 { 1 } else { 1 << depth };
        for xi in 0..parents {
            for i in start..words {
                let parent = if depth == 0 {
                    if (i + 1) * WORD <= n {
                        u64::MAX
                    } else {
                        (1u64 << (n % WORD)) - 1
                    }
                } else {
                    before[depth - 1][xi * words + i]
                };
                let parent = if i == start { parent & low_mask } else { parent };
                out[(2 * xi + 1) * words + i] = parent & row[i];
                out[(2 * xi) * words + i] = parent & !row[i];
            }
        }
    }

    fn root(&mut self, v: usize) {
        self.split(0, v);
        self.descend(1, v, 0);
    }

    /// `depth` vertices are chosen, the last being `last`, with labeled code `code`.
    fn descend(&mut self, depth: usize, last: usize, code: u32) {
        let words = self.words;
        let start = (last + 1) / WORD;
        if depth == self.s - 1 {
            let sets = &self.levels[depth - 1];
            for xi in 0..1usize << depth {
                let c: u64 =
                    sets[xi * words + start..(xi + 1) * words].iter().map(|w| w.count_ones() as u64).sum();
                if c > 0 {
                    let class = self.classifier.classify(extend_code(code, self.s, xi as u32));
                    self.counts[class] += c;
                }
            }
            return;
        }
        let remaining = self.s - 1 - depth;
        for w in last + 1..self.g.n().saturating_sub(remaining) {
            // The pattern of w against the chosen vertices is the set it lies in.
            let sets = &self.levels[depth - 1];
            let (i, bit) = (w / WORD, w % WORD);
            let xi = (0..1usize << depth)
                .find(|&xi| sets[xi * words + i] >> bit & 1 == 1)
                .expect("every later vertex lies in exactly one pattern set");
            self.split(depth, w);
            self.descend(depth + 1, w, extend_code(code, depth + 1, xi as u32));
        }
    }
}

/// Class index of the 4-vertex graph with the given edges.
fn class_of(table: &MotifTable, edges: &[(usize, usize)]) -> usize {
    let mut adj = vec![vec![false; 4]; 4];
    for &(u, v) in edges {
        adj[u][v] = true;
        adj[v][u] = true;
    }
    let (canon, _) = canonical_code(&adj).expect("four vertices");
    table.index_of_canon(canon).expect("class exists")
}

struct PairSums {
    cherries: u128,
    c4_pairs: u128,
    diamonds: u128,
    p4: u128,
    claws: u128,
    paws: u128,
    triangles3: u128,
    k4: u128,
}

/// Exact 4-vertex counts from subgraph (non-induced) counts computed by
/// closed formulas over degrees and co-degrees plus a clique enumeration,
/// converted to induced counts by inverting the containment matrix.
fn four_vertex_counts(g: &Graph, table: &MotifTable, budget: Budget) -> Result<Vec<u64>> {
    let n = g.n();
    let words = g.row_words().max(1) as u128;
    budget.check(binomial_u128(n as u64, 2) * words * 2)?;
    let degrees = g.degrees();
    let per_vertex = exec::map_collect(0..n, |u| {
        let ru = g.row(u);
        let du = degrees[u] as u128;
        let mut sums = PairSums {
            cherries: du * du.saturating_sub(1) / 2,
            c4_pairs: 0,
            diamonds: 0,
            p4: 0,
            claws: du * du.saturating_sub(1) * du.saturating_sub(2) / 6,
            paws: 0,
            triangles3: 0,
            k4: 0,
        };
        let mut tu = 0u128;
        for v in 0..n {
            if v == u {
                continue;
            }
            let c = crate::graph::and_count(ru, g.row(v)) as u128;
            let adjacent = g.has_edge(u, v);
            if adjacent {
                tu += c;
            }
            if v > u {
                sums.c4_pairs += c * c.saturating_sub(1) / 2;
                if adjacent {
                    sums.diamonds += c * c.saturating_sub(1) / 2;
                    sums.p4 += (du - 1) * (degrees[v] as u128 - 1);
                    sums.triangles3 += c;
                }
            }
        }
        let tu = tu / 2;
        sums.paws = tu * du.saturating_sub(2);
        sums
    });
    let mut total = PairSums {
        cherries: 0,
        c4_pairs: 0,
        diamonds: 0,
        p4: 0,
        claws: 0,
        paws: 0,
        triangles3: 0,
        k4: 0,
    };
    for s in &per_vertex {
        total.cherries += s.cherries;
        total.c4_pairs += s.c4_pairs;
        total.diamonds += s.diamonds;
        total.p4 += s.p4;
        total.claws += s.claws;
        total.paws += s.paws;
        total.triangles3 += s.triangles3;
    }
    let triangles = total.triangles3 / 3;
    budget.check(binomial_u128(n as u64, 2) * words * 2 + triangles * words)?;
    total.k4 = exec::map_sum(0..n, |u| count_k4_from(g, u));

    let m = g.edge_count() as u128;
    let n128 = n as u128;
    let idx = |edges: &[(usize, usize)]| class_of(table, edges);
    let mut subgraph = vec![0i128; table.classes().len()];
    subgraph[idx(&[])] = binomial_u128(n as u64, 4) as i128;
    subgraph[idx(&[(0, 1)])] = (m * binomial_u128(n as u64 - 2, 2)) as i128;
    subgraph[idx(&[(0, 1), (1, 2)])] = (total.cherries * (n128 - 3)) as i128;
    subgraph[idx(&[(0, 1), (2, 3)])] = (m * m.saturating_sub(1) / 2) as i128 - total.cherries as i128;
    subgraph[idx(&[(0, 1), (1, 2), (0, 2)])] = (triangles * (n128 - 3)) as i128;
    subgraph[idx(&[(0, 1), (0, 2), (0, 3)])] = total.claws as i128;
    subgraph[idx(&[(0, 1), (1, 2), (2, 3)])] = total.p4 as i128 - 3 * triangles as i128;
    subgraph[idx(&[(0, 1), (1, 2), (2, 3), (3, 0)])] = (total.c4_pairs / 2) as i128;
    subgraph[idx(&[(0, 1), (1, 2), (0, 2), (2, 3)])] = total.paws as i128;
    subgraph[idx(&[(0, 1), (1, 2), (0, 2), (1, 3), (2, 3)])] = total.diamonds as i128;
    subgraph[idx(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])] = total.k4 as i128;

    // containment[h][h2]: spanning subgraphs of class h2 isomorphic to class h.
    let classes = table.classes();
    let k = classes.len();
    let mut classifier = table.classifier();
    let mut containment = vec![vec![0i128; k]; k];
    for (j, c) in classes.iter().enumerate() {
        let mut sub = c.canon;
        loop {
            containment[classifier.classify(sub)][j] += 1;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & c.canon;
        }
    }
    // Back substitution from the densest class down.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(classes[i].edge_count));
    let mut induced = vec![0i128; k];
    for &h in &order {
        let mut rest = subgraph[h];
        for &h2 in &order {
            if h2 != h && classes[h2].edge_count > classes[h].edge_count {
                rest -= containment[h][h2] * induced[h2];
            }
        }
        induced[h] = rest / containment[h][h];
    }
    Ok(induced.into_iter().map(|x| u64::try_from(x).expect("induced counts are nonnegative")).collect())
}

/// Four-cliques whose smallest vertex is `u`.
fn count_k4_from(g: &Graph, u: usize) -> u128 {
    let words = g.row_words();
    let ru = g.row(u);
    let mut common = vec![0u64; words];
    let mut total = 0u128;
    for v in crate::graph::iter_bits(ru).filter(|&v| v > u) {
        let rv = g.row(v);
        let start = (v + 1) / WORD;
        for i in start..words {
            common[i] = ru[i] & rv[i];
        }
        if (v + 1) % WORD != 0 {
            common[start] &= !((1u64 << ((v + 1) % WORD)) - 1);
        }
        for i in start..words {
            let mut bits = common[i];
            while bits != 0 {
                let w = i * WORD + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let rw = g.row(w);
                // Fourth vertex above w: common[i] & rw[i] with bits up to w cleared.
                let mut c = (bits & rw[i]).count_ones() as u128;
                for j in i + 1..words {
                    c += (common[j] & rw[j]).count_ones() as u128;
                }
                total += c;
            }
        }
    }
    total
}

/// One class's sampled estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampledCount {
    pub class: MotifClass,
    pub hits: u64,
    pub frequency: f64,
    pub frequency_stderr: f64,
    /// `frequency · C(n, s)`.
    pub estimate: f64,
    pub stderr: f64,
}

const SAMPLE_BATCH: u64 = 1 << 14;

/// Classifies `samples` uniform `s`-subsets. Batch `b` draws from stream `b`
/// of `seed`, so the result does not depend on the thread count.
pub fn count_induced_sampled(g: &Graph, s: usize, samples: u64, seed: u64) -> Result<Vec<SampledCount>> {
    let table = check_census_size(g, s)?;
    if samples == 0 {
        return Err(invalid("sampled census needs at least one sample"));
    }
    let n = g.n();
    let batches = samples.div_ceil(SAMPLE_BATCH) as usize;
    let per_batch = exec::map_collect(0..batches, |b| {
        let mut rng = rng::stream(seed, b as u64);
        let mut classifier = table.classifier();
        let mut hits = vec![0u64; table.classes().len()];
        let count = SAMPLE_BATCH.min(samples - b as u64 * SAMPLE_BATCH);
        let mut vs = Vec::with_capacity(s);
        for _ in 0..count {
            vs.clear();
            vs.extend(rand::seq::index::sample(&mut rng, n, s).iter());
            hits[classifier.classify(labeled_code(g, &vs))] += 1;
        }
        hits
    });
    let mut hits = vec![0u64; table.classes().len()];
    for batch in per_batch {
        for (h, x) in hits.iter_mut().zip(batch) {
            *h += x;
        }
    }
    let total_ln = ln_binomial(n as f64, s as f64);
    let m = samples as f64;
    Ok(table
        .classes()
        .iter()
        .zip(hits)
        .map(|(&class, h)| {
            let f = h as f64 / m;
            let se = (f * (1.0 - f) / m).sqrt();
            let scale = total_ln.exp();
            SampledCount { class, hits: h, frequency: f, frequency_stderr: se, estimate: f * scale, stderr: se * scale }
        })
        .collect())
}

/// Natural log of the expected induced count of `motif` in `G(n, p)`.
pub fn ln_er_expectation(n: usize, p: f64, motif: &MotifClass) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(invalid(format!("edge probability must lie in (0, 1), got {p}")));
    }
    if motif.s > n {
        return Err(invalid(format!("motif size {} exceeds vertex count {n}", motif.s)));
    }
    let q = 1.0 - p;
    Ok(ln_falling(n as f64, motif.s) - (motif.aut_size as f64).ln()
        + motif.edge_count as f64 * (p / q).ln()
        + pairs(motif.s) as f64 * q.ln())
}

/// Expected induced count of `motif` in `G(n, p)`.
pub fn er_expectation(n: usize, p: f64, motif: &MotifClass) -> Result<f64> {
    ln_er_expectation(n, p, motif).map(f64::exp)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum CountMode {
    Exact,
    Sampled { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub canon_hex: String,
    pub edges: u32,
    pub aut: u64,
    pub count: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    pub er_expectation: f64,
    pub ratio_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusReport {
    pub n: usize,
    pub p: f64,
    pub s: usize,
    #[serde(flatten)]
    pub mode: CountMode,
    pub classes: Vec<ClassReport>,
    pub max_ratio_error: f64,
}

pub fn census_report(g: &Graph, p: f64, s: usize, mode: CountMode) -> Result<CensusReport> {
    census_report_with_budget(g, p, s, mode, Budget::default())
}

pub fn census_report_with_budget(
    g: &Graph,
    p: f64,
    s: usize,
    mode: CountMode,
    budget: Budget,
) -> Result<CensusReport> {
    let n = g.n();
    let observed: Vec<(MotifClass, f64, Option<f64>)> = match mode {
        CountMode::Exact => count_induced_exact_with_budget(g, s, budget)?
            .counts
            .into_iter()
            .map(|(c, x)| (c, x as f64, None))
            .collect(),
        CountMode::Sampled { samples, seed } => count_induced_sampled(g, s, samples, seed)?
            .into_iter()
            .map(|c| (c.class, c.estimate, Some(c.stderr)))
            .collect(),
    };
    let mut classes = Vec::with_capacity(observed.len());
    let mut max_ratio_error = 0.0f64;
    for (class, count, stderr) in observed {
        let expected = er_expectation(n, p, &class)?;
        let ratio_error = (count / expected - 1.0).abs();
        max_ratio_error = max_ratio_error.max(ratio_error);
        classes.push(ClassReport {
            canon_hex: class.canon_hex(),
            edges: class.edge_count,
            aut: class.aut_size,
            count,
            stderr,
            er_expectation: expected,
            ratio_error,
        });
    }
    Ok(CensusReport { n, p, s, mode, classes, max_ratio_error })
}

/// Both sides of the double-counting identity for an `(r+1)`-vertex motif
/// whose vertex `marked` is the one added last.
///
/// The left side is `|Aut(H)| · n_G(H)`, the number of labeled induced
/// embeddings of `H`. The right side sums `f_r(ν, ξ)` over ordered tuples `ν`
/// inducing `H - marked` exactly as labeled, with `ξ` the marked vertex's
/// adjacency pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IdentitySides {
    pub lhs: u128,
    pub rhs: u128,
}

impl IdentitySides {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn recursion_identity_sides(g: &Graph, motif: &MotifClass, marked: usize) -> Result<IdentitySides> {
    let s = motif.s;
    if !(3..=6).contains(&s) {
        return Err(invalid(format!("identity check supports motifs on 3 to 6 vertices, got {s}")));
    }
    if marked >= s {
        return Err(invalid(format!("marked vertex {marked} outside motif on {s} vertices")));
    }
    let r = s - 1;
    let n = g.n();
    let required = (n as u128).pow(r as u32) * g.row_words().max(1) as u128;
    Budget::default().check(required)?;

    let order: Vec<usize> = (0..s).filter(|&v| v != marked).collect();
    let sub_code = {
        let h = motif.to_graph();
        labeled_code(&h, &order)
    };
    let h = motif.to_graph();
    let signs: Vec<bool> = order.iter().map(|&v| h.has_edge(v, marked)).collect();

    let census = count_induced_exact(g, s)?;
    let lhs = motif.aut_size as u128 * census.get(motif.canon).unwrap_or(0) as u128;

    let rhs = exec::map_sum(0..n, |first| {
        let mut tuple = vec![first];
        let mut scratch = vec![0u64; g.row_words()];
        let mut acc = vec![0u64; g.row_words()];
        sum_embeddings(g, r, sub_code, &signs, &mut tuple, &mut acc, &mut scratch)
    });
    Ok(IdentitySides { lhs, rhs })
}

fn sum_embeddings(
    g: &Graph,
    r: usize,
    code: u32,
    signs: &[bool],
    tuple: &mut Vec<usize>,
    acc: &mut [u64],
    scratch: &mut [u64],
) -> u128 {
    let t = tuple.len();
    // Induced edges among the tuple must match the target labeling so far.
    let prefix = labeled_code(g, tuple);
    if prefix != code >> (pairs(r) - pairs(t)) {
        return 0;
    }
    if t == r {
        use crate::graph::Sign;
        g.neighborhood_words(tuple[0], Sign::from_bit(signs[0]), acc);
        for (&v, &sgn) in tuple.iter().zip(signs).skip(1) {
            g.neighborhood_words(v, Sign::from_bit(sgn), scratch);
            for (a, b) in acc.iter_mut().zip(scratch.iter()) {
                *a &= b;
            }
        }
        return acc.iter().map(|w| w.count_ones() as u128).sum();
    }
    let mut total = 0;
    for v in 0..g.n() {
        if tuple.contains(&v) {
            continue;
        }
        tuple.push(v);
        total += sum_embeddings(g, r, code, signs, tuple, acc, scratch);
        tuple.pop();
    }
    total
}

pub fn recursion_identity_check(g: &Graph, motif: &MotifClass, marked: usize) -> Result<bool> {
    recursion_identity_sides(g, motif, marked).map(|s| s.holds())
}
