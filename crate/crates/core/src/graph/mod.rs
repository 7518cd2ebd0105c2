//! Bit-encoded labeled graphs and motif counting.
//!
//! A simple graph on `n` vertices is a point of `{0,1}^N`, `N = n(n-1)/2`,
//! with one coordinate per vertex pair. Pairs `(i, j)`, `i < j`, are ranked
//! lexicographically, so `(0,1)` is coordinate 0 and `(n-2, n-1)` is `N - 1`.

mod config;
mod count;
mod motif;

pub use config::Config;
pub use count::{
    delta2_t, delta_t, injection_count, injection_count_backtrack, r_h, t_norm,
    delta2_t_backtrack, delta_t_backtrack, falling,
};
pub(crate) use count::r_from_delta;
pub use motif::{Motif, MotifKind};

use crate::error::{domain, Result};

/// Number of vertex pairs, `n(n-1)/2`.
pub fn num_pairs(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A vertex pair `i < j` together with its lexicographic rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeIndex {
    pub i: usize,
    pub j: usize,
    pub linear: usize,
}

impl EdgeIndex {
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        Ok(EdgeIndex {
            i,
            j,
            linear: edge_linear(i, j, n)?,
        })
    }

    pub fn from_linear(linear: usize, n: usize) -> Result<Self> {
        let (i, j) = edge_pair(linear, n)?;
        Ok(EdgeIndex { i, j, linear })
    }

    /// True when the two pairs have a vertex in common.
    pub fn touches(&self, other: &EdgeIndex) -> bool {
        self.i == other.i || self.i == other.j || self.j == other.i || self.j == other.j
    }
}

/// Lexicographic rank of the pair `(i, j)` among all pairs of `0..n`.
pub fn edge_linear(i: usize, j: usize, n: usize) -> Result<usize> {
    if i >= j || j >= n {
        return domain(format!("invalid pair ({i},{j}) for n = {n}"));
    }
    Ok(linear_unchecked(i, j, n))
}

#[inline]
pub(crate) fn linear_unchecked(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`edge_linear`].
pub fn edge_pair(linear: usize, n: usize) -> Result<(usize, usize)> {
    if linear >= num_pairs(n) {
        return domain(format!("pair index {linear} out of range for n = {n}"));
    }
    let mut rest = linear;
    let mut i = 0;
    loop {
        let row = n - i - 1;
        if rest < row {
            return Ok((i, i + 1 + rest));
        }
        rest -= row;
        i += 1;
    }
}

/// All pairs of `0..n` in lexicographic order.
pub fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(num_pairs(n));
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

/// Read access to the adjacency of a graph on `order()` vertices.
pub trait EdgeSet {
    fn order(&self) -> usize;
    /// Adjacency of two distinct vertices, in either argument order.
    fn has_edge(&self, u: usize, v: usize) -> bool;
}

/// A borrowed graph: a vertex count and the edge bits of a [`Config`].
#[derive(Debug, Clone, Copy)]
pub struct GraphView<'a> {
    pub n: usize,
    pub bits: &'a Config,
}

impl<'a> GraphView<'a> {
    pub fn new(n: usize, bits: &'a Config) -> Self {
        debug_assert_eq!(bits.len(), num_pairs(n));
        GraphView { n, bits }
    }

    pub fn degree(&self, v: usize) -> usize {
        (0..self.n).filter(|&w| w != v && self.has_edge(v, w)).count()
    }
}

impl EdgeSet for GraphView<'_> {
    fn order(&self) -> usize {
        self.n
    }

    #[inline]
    fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.bits.get(linear_unchecked(a, b, self.n))
    }
}

/// A vertex-labeled simple graph stored as `C(n,2)` edge bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledGraph {
    n: usize,
    bits: Config,
}

impl LabeledGraph {
    pub fn empty(n: usize) -> Self {
        LabeledGraph {
            n,
            bits: Config::zeros(num_pairs(n)),
        }
    }

    pub fn complete(n: usize) -> Self {
        LabeledGraph {
            n,
            bits: Config::ones(num_pairs(n)),
        }
    }

    pub fn from_config(n: usize, bits: Config) -> Result<Self> {
        if bits.len() != num_pairs(n) {
            return domain(format!(
                "{} bits cannot encode a graph on {n} vertices ({} needed)",
                bits.len(),
                num_pairs(n)
            ));
        }
        Ok(LabeledGraph { n, bits })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u == v {
                return domain(format!("self-loop at vertex {u}"));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            let s = edge_linear(a, b, n)?;
            g.bits.set(s, true);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_pairs(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &Config {
        &self.bits
    }

    pub fn into_config(self) -> Config {
        self.bits
    }

    pub fn view(&self) -> GraphView<'_> {
        GraphView::new(self.n, &self.bits)
    }

    pub fn get(&self, s: usize) -> bool {
        self.bits.get(s)
    }

    pub fn set(&mut self, s: usize, value: bool) {
        self.bits.set(s, value);
    }

    pub fn toggle(&mut self, s: usize) {
        self.bits.toggle(s);
    }

    /// Copy of the graph with coordinate `s` forced to `value`
    /// (`x^{(s,1)}` for `true`, `x^{(s,0)}` for `false`).
    pub fn with(&self, s: usize, value: bool) -> Self {
        let mut g = self.clone();
        g.bits.set(s, value);
        g
    }

    pub fn num_edges(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.view().degree(v)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.bits
            .iter_ones()
            .map(|s| edge_pair(s, self.n).expect("bit index within range"))
            .collect()
    }
}

impl EdgeSet for LabeledGraph {
    fn order(&self) -> usize {
        self.n
    }

    #[inline]
    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.view().has_edge(u, v)
    }
}

/// Hamming distance between two graphs on the same vertex set.
pub fn hamming(x: &LabeledGraph, y: &LabeledGraph) -> Result<usize> {
    if x.n != y.n {
        return domain(format!("vertex counts differ: {} vs {}", x.n, y.n));
    }
    Ok(x.bits.hamming(&y.bits))
}

/// Reads a whitespace- or comma-separated edge list. Lines starting with `#`
/// and blank lines are skipped. Vertex names may be arbitrary tokens; ids are
/// assigned in order of first appearance, and a line with a single token
/// declares an isolated vertex.
pub fn read_edge_list(text: &str) -> Result<(LabeledGraph, Vec<String>)> {
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let id = |name: &str, names: &mut Vec<String>| -> usize {
        match names.iter().position(|x| x == name) {
            Some(k) => k,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        }
    };
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        match tokens.as_slice() {
            [a] => {
                id(a, &mut names);
            }
            [a, b] => {
                let u = id(a, &mut names);
                let v = id(b, &mut names);
                if u == v {
                    return Err(crate::Error::Parse(format!(
                        "line {}: self-loop on {a}",
                        lineno + 1
                    )));
                }
                edges.push((u, v));
            }
            _ => {
                return Err(crate::Error::Parse(format!(
                    "line {}: expected one or two vertex names",
                    lineno + 1
                )))
            }
        }
    }
    let g = LabeledGraph::from_edges(names.len(), &edges)?;
    Ok((g, names))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_linear_examples() {
        assert_eq!(edge_linear(0, 1, 4).unwrap(), 0);
        assert_eq!(edge_linear(2, 3, 4).unwrap(), 5);
        assert_eq!(edge_linear(0, 3, 4).unwrap(), 2);
    }

    #[test]
    fn edge_linear_matches_enumeration() {
        for n in 2..9 {
            let pairs = all_pairs(n);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                assert_eq!(edge_linear(i, j, n).unwrap(), k);
                assert_eq!(edge_pair(k, n).unwrap(), (i, j));
            }
        }
    }

    #[test]
    fn edge_linear_rejects_bad_pairs() {
        assert!(edge_linear(1, 1, 4).is_err());
        assert!(edge_linear(2, 1, 4).is_err());
        assert!(edge_linear(0, 4, 4).is_err());
        assert!(edge_pair(6, 4).is_err());
    }

    #[test]
    fn hamming_examples() {
        let e = LabeledGraph::empty(4);
        let k = LabeledGraph::complete(4);
        assert_eq!(hamming(&k, &k).unwrap(), 0);
        assert_eq!(hamming(&e, &k).unwrap(), 6);
        assert_eq!(hamming(&e, &e.with(3, true)).unwrap(), 1);
        assert!(hamming(&e, &LabeledGraph::empty(5)).is_err());
    }

    #[test]
    fn set_and_clear_touch_one_bit() {
        let g = LabeledGraph::from_edges(5, &[(0, 1), (2, 4)]).unwrap();
        for s in 0..g.num_pairs() {
            for v in [false, true] {
                let h = g.with(s, v);
                for t in 0..g.num_pairs() {
                    if t != s {
                        assert_eq!(h.get(t), g.get(t));
                    }
                }
                assert_eq!(h.get(s), v);
            }
        }
    }

    #[test]
    fn edge_list_reader() {
        let (g, names) = read_edge_list("# x\na b\nb,c\nd\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(names, vec!["a", "b", "c", "d"]);
        assert!(read_edge_list("a a\n").is_err());
        assert!(read_edge_list("a b c\n").is_err());
    }
}
