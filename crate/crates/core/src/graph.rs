//! Immutable simple graphs stored as bitset adjacency rows.

use crate::error::{Error, Result};

pub(crate) const WORD: usize = 64;

pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Mask of the valid bits in the last word of an `n`-bit row.
fn tail_mask(n: usize) -> u64 {
    match n % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A set of vertices of a graph on `n` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VertexSet {
    n: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn empty(n: usize) -> Self {
        VertexSet { n, words: vec![0; words_for(n)] }
    }

    /// All of `[n]`.
    pub fn full(n: usize) -> Self {
        let mut s = VertexSet { n, words: vec![u64::MAX; words_for(n)] };
        if let Some(last) = s.words.last_mut() {
            *last &= tail_mask(n);
        }
        s
    }

    pub fn from_vertices(n: usize, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for v in vertices {
            if v >= n {
                return Err(Error::InvalidVertex { vertex: v, n });
            }
            s.insert(v);
        }
        Ok(s)
    }

    pub(crate) fn from_words(n: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(n));
        debug_assert!(words.last().is_none_or(|w| w & !tail_mask(n) == 0));
        VertexSet { n, words }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, v: usize) {
        self.words[v / WORD] |= 1 << (v % WORD);
    }

    pub fn remove(&mut self, v: usize) {
        self.words[v / WORD] &= !(1 << (v % WORD));
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.n && self.words[v / WORD] >> (v % WORD) & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect_with(&mut self, other: &[u64]) {
        for (a, b) in self.words.iter_mut().zip(other) {
            *a &= b;
        }
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        and_count(&self.words, &other.words)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.words)
    }
}

/// Iterates the set bit positions of a word slice.
pub(crate) fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let b = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * WORD + b)
        })
    })
}

pub(crate) fn and_count(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
}

/// Which generalized neighborhood of a vertex: neighbors (`Adjacent`) or
/// non-neighbors other than the vertex itself (`NonAdjacent`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    NonAdjacent = 0,
    Adjacent = 1,
}

impl Sign {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            Sign::Adjacent
        } else {
            Sign::NonAdjacent
        }
    }

    pub fn is_adjacent(self) -> bool {
        self == Sign::Adjacent
    }
}

/// Ordered distinct vertices, each paired with a neighborhood sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexTuple {
    vertices: Vec<usize>,
    signs: Vec<Sign>,
}

impl VertexTuple {
    pub fn new(vertices: Vec<usize>, signs: Vec<Sign>) -> Result<Self> {
        if vertices.len() != signs.len() {
            return Err(Error::InvalidTuple(format!(
                "{} vertices but {} signs",
                vertices.len(),
                signs.len()
            )));
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(Error::InvalidTuple(format!("vertex {v} repeated")));
            }
        }
        Ok(VertexTuple { vertices, signs })
    }

    /// All signs `Adjacent`.
    pub fn adjacent(vertices: Vec<usize>) -> Result<Self> {
        let signs = vec![Sign::Adjacent; vertices.len()];
        Self::new(vertices, signs)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn push(&mut self, v: usize, sign: Sign) -> Result<()> {
        if self.vertices.contains(&v) {
            return Err(Error::InvalidTuple(format!("vertex {v} repeated")));
        }
        self.vertices.push(v);
        self.signs.push(sign);
        Ok(())
    }

    /// Number of `NonAdjacent` signs.
    pub fn zeros(&self) -> usize {
        self.signs.iter().filter(|s| !s.is_adjacent()).count()
    }
}

/// Simple undirected graph with bitset adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    edge_count: usize,
}

impl Graph {
    /// Graph with no edges.
    pub fn empty(n: usize) -> Self {
        let words = words_for(n);
        Graph { n, words, rows: vec![0; n * words], edge_count: 0 }
    }

    pub fn complete(n: usize) -> Self {
        let mut b = GraphBuilder::new(n);
        for u in 0..n {
            for v in u + 1..n {
                b.add_edge_unchecked(u, v);
            }
        }
        b.build()
    }

    /// Builds a graph from an edge list. Duplicate edges collapse.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut b = GraphBuilder::new(n);
        for (u, v) in edges {
            b.add_edge(u, v)?;
        }
        Ok(b.build())
    }

    /// Builds a graph from raw rows, validating symmetry, loops and padding.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Result<Self> {
        let words = words_for(n);
        if rows.len() != n * words {
            return Err(Error::Format(format!("expected {} words, got {}", n * words, rows.len())));
        }
        let g = Graph { n, words, rows, edge_count: 0 };
        let mask = tail_mask(n);
        let mut total = 0usize;
        for v in 0..n {
            let row = g.row(v);
            if words > 0 && row[words - 1] & !mask != 0 {
                return Err(Error::Format(format!("row {v} has nonzero padding bits")));
            }
            if g.has_edge(v, v) {
                return Err(Error::Format(format!("self-loop at vertex {v}")));
            }
            for u in iter_bits(row) {
                if !g.has_edge(u, v) {
                    return Err(Error::Format(format!("adjacency not symmetric at ({v}, {u})")));
                }
            }
            total += row.iter().map(|w| w.count_ones() as usize).sum::<usize>();
        }
        Ok(Graph { edge_count: total / 2, ..g })
    }

    /// Rows already known to be symmetric, loop-free and zero-padded.
    pub(crate) fn from_rows_trusted(n: usize, rows: Vec<u64>) -> Self {
        debug_assert_eq!(rows.len(), n * words_for(n));
        GraphBuilder { n, words: words_for(n), rows }.build()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Words per adjacency row.
    pub fn row_words(&self) -> usize {
        self.words
    }

    /// Raw rows, `n * row_words()` words.
    pub fn raw_rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.row(u)[v / WORD] >> (v % WORD) & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|v| self.degree(v)).collect()
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        iter_bits(self.row(v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::InvalidVertex { vertex: v, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Writes the words of `N_v^sign` into `out`. `v` itself is never included.
    pub(crate) fn neighborhood_words(&self, v: usize, sign: Sign, out: &mut [u64]) {
        let row = self.row(v);
        match sign {
            Sign::Adjacent => out.copy_from_slice(row),
            Sign::NonAdjacent => {
                for (o, w) in out.iter_mut().zip(row) {
                    *o = !w;
                }
                if let Some(last) = out.last_mut() {
                    *last &= tail_mask(self.n);
                }
                out[v / WORD] &= !(1 << (v % WORD));
            }
        }
    }

    /// Neighbors of `v` (`Adjacent`) or its non-neighbors other than `v` (`NonAdjacent`).
    pub fn generalized_neighborhood(&self, v: usize, sign: Sign) -> Result<VertexSet> {
        self.check_vertex(v)?;
        let mut words = vec![0; self.words];
        self.neighborhood_words(v, sign, &mut words);
        Ok(VertexSet::from_words(self.n, words))
    }

    /// `|N_v^sign ∩ B|`.
    pub fn neighborhood_in_set(&self, v: usize, set: &VertexSet, sign: Sign) -> Result<usize> {
        self.check_vertex(v)?;
        if set.universe() != self.n {
            return Err(Error::InvalidParameter(format!(
                "vertex set over {} vertices used with graph on {}",
                set.universe(),
                self.n
            )));
        }
        let row = self.row(v);
        let mut count = match sign {
            Sign::Adjacent => and_count(row, set.words()),
            Sign::NonAdjacent => {
                row.iter().zip(set.words()).map(|(r, b)| (!r & b).count_ones() as usize).sum()
            }
        };
        if sign == Sign::NonAdjacent && set.contains(v) {
            count -= 1;
        }
        Ok(count)
    }

    /// `f_r`: size of the intersection of the tuple's generalized neighborhoods.
    pub fn tuple_common_neighborhood(&self, t: &VertexTuple) -> Result<usize> {
        if t.is_empty() {
            return Err(Error::InvalidTuple("empty tuple".into()));
        }
        for &v in t.vertices() {
            self.check_vertex(v)?;
        }
        let mut acc = vec![0; self.words];
        let mut scratch = vec![0; self.words];
        self.neighborhood_words(t.vertices()[0], t.signs()[0], &mut acc);
        for (&v, &s) in t.vertices().iter().zip(t.signs()).skip(1) {
            self.neighborhood_words(v, s, &mut scratch);
            for (a, b) in acc.iter_mut().zip(&scratch) {
                *a &= b;
            }
        }
        Ok(acc.iter().map(|w| w.count_ones() as usize).sum())
    }

    /// Common neighbors of 2 to 4 distinct vertices.
    pub fn codegree_order_k(&self, vertices: &[usize]) -> Result<usize> {
        let k = vertices.len();
        if !(2..=4).contains(&k) {
            return Err(Error::InvalidArity(k as u32));
        }
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            if vertices[..i].contains(&v) {
                return Err(Error::InvalidTuple(format!("vertex {v} repeated")));
            }
        }
        Ok(self.codegree_unchecked(vertices))
    }

    #[inline]
    pub(crate) fn codegree_unchecked(&self, vertices: &[usize]) -> usize {
        match *vertices {
            [a, b] => and_count(self.row(a), self.row(b)),
            [a, b, c] => {
                let (ra, rb, rc) = (self.row(a), self.row(b), self.row(c));
                (0..self.words).map(|i| (ra[i] & rb[i] & rc[i]).count_ones() as usize).sum()
            }
            [a, b, c, d] => {
                let (ra, rb, rc, rd) = (self.row(a), self.row(b), self.row(c), self.row(d));
                (0..self.words)
                    .map(|i| (ra[i] & rb[i] & rc[i] & rd[i]).count_ones() as usize)
                    .sum()
            }
            _ => unreachable!("codegree arity checked by caller"),
        }
    }

    /// Number of triangles.
    pub fn triangle_count(&self) -> u64 {
        let mut total = 0u64;
        for (u, v) in self.edges() {
            total += and_count(self.row(u), self.row(v)) as u64;
        }
        total / 3
    }

    /// Complement graph.
    pub fn complement(&self) -> Graph {
        let mut rows = vec![0; self.rows.len()];
        let mask = tail_mask(self.n);
        for v in 0..self.n {
            let out = &mut rows[v * self.words..(v + 1) * self.words];
            self.neighborhood_words(v, Sign::NonAdjacent, out);
            if let Some(last) = out.last_mut() {
                *last &= mask;
            }
        }
        let total = self.n * self.n.saturating_sub(1) / 2;
        Graph { n: self.n, words: self.words, rows, edge_count: total - self.edge_count }
    }

    /// Subgraph induced on `vertices`, relabeled `0..len` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut b = GraphBuilder::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    b.add_edge_unchecked(i, j);
                }
            }
        }
        b.build()
    }
}

/// Mutable builder used by the generators.
#[derive(Clone, Debug)]
pub struct GraphBuilder {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        let words = words_for(n);
        GraphBuilder { n, words, rows: vec![0; n * words] }
    }

    pub fn from_graph(g: &Graph) -> Self {
        GraphBuilder { n: g.n, words: g.words, rows: g.rows.clone() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        for w in [u, v] {
            if w >= self.n {
                return Err(Error::InvalidVertex { vertex: w, n: self.n });
            }
        }
        if u == v {
            return Err(Error::InvalidEdge(u, v));
        }
        self.add_edge_unchecked(u, v);
        Ok(())
    }

    #[inline]
    pub(crate) fn add_edge_unchecked(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / WORD] |= 1 << (v % WORD);
        self.rows[v * self.words + u / WORD] |= 1 << (u % WORD);
    }

    #[inline]
    pub(crate) fn remove_edge_unchecked(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / WORD] &= !(1 << (v % WORD));
        self.rows[v * self.words + u / WORD] &= !(1 << (u % WORD));
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / WORD] >> (v % WORD) & 1 == 1
    }

    #[inline]
    pub(crate) fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        if present {
            self.add_edge_unchecked(u, v)
        } else {
            self.remove_edge_unchecked(u, v)
        }
    }

    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    pub fn codegree(&self, u: usize, v: usize) -> usize {
        and_count(self.row(u), self.row(v))
    }

    pub fn build(self) -> Graph {
        let total: usize = self.rows.iter().map(|w| w.count_ones() as usize).sum();
        Graph { n: self.n, words: self.words, rows: self.rows, edge_count: total / 2 }
    }
}
