//! Isomorphism classes of small graphs (2 to 8 vertices).
//!
//! A graph on `s` labeled vertices is encoded as a `u32` whose bits hold the
//! upper triangle of its adjacency matrix. Pairs are ordered colexicographically,
//! `(0,1), (0,2), (1,2), (0,3), ...`, and the first pair is the most significant
//! bit, so comparing codes as integers compares the bit strings
//! lexicographically. The canonical code of a class is the smallest code over
//! all `s!` relabelings.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use serde::Serialize;

use crate::combinatorics::pairs;
use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};

pub const MAX_MOTIF: usize = 8;

fn check_size(s: usize) -> Result<()> {
    if (2..=MAX_MOTIF).contains(&s) {
        Ok(())
    } else {
        Err(Error::SizeUnsupported(s))
    }
}

/// Bit position of the pair `{i, j}` (`i != j`) in an `s`-vertex code.
#[inline]
pub fn pair_bit(s: usize, i: usize, j: usize) -> u32 {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    (pairs(s) - 1 - (pairs(j) + i)) as u32
}

/// Code of the graph induced on `vertices`, labeled in the given order.
pub fn labeled_code(g: &Graph, vertices: &[usize]) -> u32 {
    let mut code = 0u32;
    for (j, &v) in vertices.iter().enumerate() {
        for &u in &vertices[..j] {
            code = code << 1 | g.has_edge(u, v) as u32;
        }
    }
    code
}

/// Code of a graph on `s` vertices obtained from an `(s-1)`-vertex code by
/// appending a last vertex whose neighbors are given by `pattern`
/// (bit `s-2-i` set iff adjacent to vertex `i`).
#[inline]
pub fn extend_code(prefix: u32, s: usize, pattern: u32) -> u32 {
    prefix << (s - 1) | pattern
}

pub fn code_has_edge(s: usize, code: u32, i: usize, j: usize) -> bool {
    code >> pair_bit(s, i, j) & 1 == 1
}

pub fn code_to_graph(s: usize, code: u32) -> Graph {
    let mut b = GraphBuilder::new(s);
    for j in 1..s {
        for i in 0..j {
            if code_has_edge(s, code, i, j) {
                b.add_edge_unchecked(i, j);
            }
        }
    }
    b.build()
}

pub fn complement_code(s: usize, code: u32) -> u32 {
    !code & ((1u64 << pairs(s)) - 1) as u32
}

/// Relabels so vertex `perm[t]` of the input becomes vertex `t`.
pub fn permute_code(s: usize, code: u32, perm: &[usize]) -> u32 {
    let mut out = 0u32;
    for t in 1..s {
        for i in 0..t {
            out = out << 1 | code_has_edge(s, code, perm[i], perm[t]) as u32;
        }
    }
    out
}

struct Search {
    s: usize,
    adj: [u8; MAX_MOTIF],
    perm: [usize; MAX_MOTIF],
    used: u8,
    best: u32,
    best_count: u64,
    found: bool,
}

impl Search {
    fn run(&mut self, t: usize, prefix: u32, prefix_bits: u32) {
        if t == self.s {
            if !self.found || prefix < self.best {
                self.best = prefix;
                self.best_count = 1;
                self.found = true;
            } else if prefix == self.best {
                self.best_count += 1;
            }
            return;
        }
        let total = pairs(self.s) as u32;
        for v in 0..self.s {
            if self.used >> v & 1 == 1 {
                continue;
            }
            let mut next = prefix;
            for &u in &self.perm[..t] {
                next = next << 1 | (self.adj[u] >> v & 1) as u32;
            }
            let bits = prefix_bits + t as u32;
            if self.found {
                let best_prefix = if bits == 0 { 0 } else { self.best >> (total - bits) };
                if next > best_prefix {
                    continue;
                }
            }
            self.perm[t] = v;
            self.used |= 1 << v;
            self.run(t + 1, next, bits);
            self.used &= !(1 << v);
        }
    }
}

/// Canonical code and automorphism count of the `s`-vertex graph `code`.
///
/// The relabelings reaching the minimum form a coset of the automorphism
/// group, so counting them gives `|Aut|`.
pub fn canonical_form(s: usize, code: u32) -> Result<(u32, u64)> {
    check_size(s)?;
    let mut adj = [0u8; MAX_MOTIF];
    for j in 1..s {
        for i in 0..j {
            if code_has_edge(s, code, i, j) {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
    }
    let mut search =
        Search { s, adj, perm: [0; MAX_MOTIF], used: 0, best: 0, best_count: 0, found: false };
    search.run(0, 0, 0);
    Ok((search.best, search.best_count))
}

/// Canonical code and `|Aut|` of a symmetric 0/1 matrix.
pub fn canonical_code(adj: &[Vec<bool>]) -> Result<(u32, u64)> {
    let s = adj.len();
    check_size(s)?;
    let mut code = 0u32;
    for j in 1..s {
        if adj[j].len() != s {
            return Err(Error::InvalidParameter("adjacency matrix is not square".into()));
        }
        for i in 0..j {
            if adj[i][j] != adj[j][i] {
                return Err(Error::InvalidParameter("adjacency matrix is not symmetric".into()));
            }
            code = code << 1 | adj[i][j] as u32;
        }
    }
    if (0..s).any(|i| adj[i][i]) {
        return Err(Error::InvalidParameter("adjacency matrix has a self-loop".into()));
    }
    canonical_form(s, code)
}

/// One isomorphism class on `s` vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MotifClass {
    pub s: usize,
    pub canon: u32,
    pub edge_count: u32,
    pub aut_size: u64,
}

impl MotifClass {
    pub fn canon_hex(&self) -> String {
        format!("{:0width$x}", self.canon, width = pairs(self.s).div_ceil(4).max(1))
    }

    pub fn to_graph(&self) -> Graph {
        code_to_graph(self.s, self.canon)
    }
}

/// All classes on `s` vertices with a labeled-code classifier.
#[derive(Debug)]
pub struct MotifTable {
    s: usize,
    classes: Vec<MotifClass>,
    by_canon: HashMap<u32, usize>,
    /// Class index of every labeled code, for `s <= DENSE_LIMIT`.
    dense: Vec<u16>,
}

const DENSE_LIMIT: usize = 6;

impl MotifTable {
    fn build(s: usize) -> Result<Self> {
        check_size(s)?;
        let mut found: BTreeMap<u32, u64> = BTreeMap::new();
        if s == 2 {
            found.insert(0, 2);
            found.insert(1, 2);
        } else {
            let smaller = motif_table(s - 1)?;
            for c in &smaller.classes {
                for pattern in 0..1u32 << (s - 1) {
                    let code = extend_code(c.canon, s, pattern);
                    let (canon, aut) = canonical_form(s, code)?;
                    found.insert(canon, aut);
                }
            }
        }
        let classes: Vec<MotifClass> = found
            .into_iter()
            .map(|(canon, aut_size)| MotifClass { s, canon, edge_count: canon.count_ones(), aut_size })
            .collect();
        let by_canon = classes.iter().enumerate().map(|(i, c)| (c.canon, i)).collect();
        let mut table = MotifTable { s, classes, by_canon, dense: Vec::new() };
        if s <= DENSE_LIMIT {
            table.dense = (0..1u32 << pairs(s))
                .map(|code| {
                    let (canon, _) = canonical_form(s, code).expect("size checked");
                    table.by_canon[&canon] as u16
                })
                .collect();
        }
        Ok(table)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Classes sorted by canonical code.
    pub fn classes(&self) -> &[MotifClass] {
        &self.classes
    }

    pub fn index_of_canon(&self, canon: u32) -> Option<usize> {
        self.by_canon.get(&canon).copied()
    }

    pub fn classifier(&self) -> Classifier<'_> {
        Classifier { table: self, cache: HashMap::new() }
    }
}

/// Maps labeled codes to class indices, caching canonicalizations.
pub struct Classifier<'a> {
    table: &'a MotifTable,
    cache: HashMap<u32, usize>,
}

impl Classifier<'_> {
    #[inline]
    pub fn classify(&mut self, code: u32) -> usize {
        if !self.table.dense.is_empty() {
            return self.table.dense[code as usize] as usize;
        }
        let table = self.table;
        *self.cache.entry(code).or_insert_with(|| {
            let (canon, _) = canonical_form(table.s, code).expect("size checked");
            table.by_canon[&canon]
        })
    }
}

/// Shared table for `s`, built on first use.
pub fn motif_table(s: usize) -> Result<&'static MotifTable> {
    static TABLES: [OnceLock<MotifTable>; MAX_MOTIF + 1] = [const { OnceLock::new() }; MAX_MOTIF + 1];
    check_size(s)?;
    if let Some(t) = TABLES[s].get() {
        return Ok(t);
    }
    let built = MotifTable::build(s)?;
    Ok(TABLES[s].get_or_init(|| built))
}

pub fn enumerate_motif_classes(s: usize) -> Result<Vec<MotifClass>> {
    Ok(motif_table(s)?.classes.clone())
}
