use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Shape tag used to pick closed-form counting paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MotifKind {
    Edge,
    TwoStar,
    Triangle,
    Other,
}

/// A small graph `H` whose edge-preserving injections are counted.
///
/// Motifs used as model terms are connected. [`Motif::without_edge`] builds
/// `H \ e`, which keeps every vertex and may leave some of them isolated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Motif {
    v: usize,
    edges: Vec<(usize, usize)>,
    name: Option<String>,
    kind: MotifKind,
    allow_isolated: bool,
}

impl Motif {
    /// Builds a connected motif on vertices `0..v`.
    pub fn new(v: usize, edges: Vec<(usize, usize)>, name: Option<String>) -> Result<Self> {
        let m = Self::build(v, edges, name, false)?;
        if !m.is_connected() {
            return Err(Error::Domain(format!("motif {m} is not connected")));
        }
        Ok(m)
    }

    fn build(
        v: usize,
        edges: Vec<(usize, usize)>,
        name: Option<String>,
        allow_isolated: bool,
    ) -> Result<Self> {
        if v < 2 {
            return Err(Error::Domain("a motif needs at least two vertices".into()));
        }
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b {
                return Err(Error::Domain(format!("motif self-loop at {a}")));
            }
            if a >= v || b >= v {
                return Err(Error::Domain(format!("motif edge {a}-{b} exceeds v = {v}")));
            }
            let e = if a < b { (a, b) } else { (b, a) };
            if norm.contains(&e) {
                return Err(Error::Domain(format!("duplicate motif edge {}-{}", e.0, e.1)));
            }
            norm.push(e);
        }
        if norm.is_empty() {
            return Err(Error::Domain("a motif needs at least one edge".into()));
        }
        let mut m = Motif {
            v,
            edges: norm,
            name,
            kind: MotifKind::Other,
            allow_isolated,
        };
        if !allow_isolated || m.is_connected() {
            m.kind = match (m.v, m.edges.len()) {
                (2, 1) => MotifKind::Edge,
                (3, 2) => MotifKind::TwoStar,
                (3, 3) => MotifKind::Triangle,
                _ => MotifKind::Other,
            };
        }
        Ok(m)
    }

    pub fn edge() -> Self {
        Self::build(2, vec![(0, 1)], Some("edge".into()), false).unwrap()
    }

    /// Path on three vertices, center 0.
    pub fn two_star() -> Self {
        Self::build(3, vec![(0, 1), (0, 2)], Some("twostar".into()), false).unwrap()
    }

    pub fn triangle() -> Self {
        Self::build(3, vec![(0, 1), (0, 2), (1, 2)], Some("triangle".into()), false).unwrap()
    }

    /// `H \ e`: the motif with edge `e` removed and all vertices retained.
    pub fn without_edge(&self, e: usize) -> Result<Self> {
        if e >= self.edges.len() {
            return Err(Error::Domain(format!("motif has no edge #{e}")));
        }
        let mut edges = self.edges.clone();
        edges.remove(e);
        let name = self.name.as_ref().map(|n| format!("{n}-minus-{e}"));
        Self::build(self.v, edges, name, true)
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn e(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn kind(&self) -> MotifKind {
        self.kind
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn allows_isolated(&self) -> bool {
        self.allow_isolated
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => self.to_string(),
        }
    }

    pub(crate) fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter_map(move |&(a, b)| {
            if a == u {
                Some(b)
            } else if b == u {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.v];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

impl fmt::Display for Motif {
    /// Text form `v=3; edges=0-1,0-2,1-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "v={}; edges={}", self.v, edges.join(","))
    }
}

impl FromStr for Motif {
    type Err = Error;

    /// Accepts the built-in names `edge`, `twostar` (also `2-star`) and
    /// `triangle`, or the text form `v=3; edges=0-1,0-2,1-2`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "edge" => return Ok(Self::edge()),
            "twostar" | "two-star" | "2-star" | "2star" => return Ok(Self::two_star()),
            "triangle" => return Ok(Self::triangle()),
            _ => {}
        }
        let mut v = None;
        let mut edges = None;
        for part in t.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("motif field without '=': {part:?}")))?;
            match key.trim() {
                "v" => {
                    v = Some(val.trim().parse::<usize>().map_err(|e| {
                        Error::Parse(format!("bad motif vertex count {val:?}: {e}"))
                    })?)
                }
                "edges" => {
                    let mut list = Vec::new();
                    for pair in val.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                        let (a, b) = pair
                            .split_once('-')
                            .ok_or_else(|| Error::Parse(format!("bad motif edge {pair:?}")))?;
                        let a = a.trim().parse::<usize>();
                        let b = b.trim().parse::<usize>();
                        match (a, b) {
                            (Ok(a), Ok(b)) => list.push((a, b)),
                            _ => return Err(Error::Parse(format!("bad motif edge {pair:?}"))),
                        }
                    }
                    edges = Some(list);
                }
                other => return Err(Error::Parse(format!("unknown motif field {other:?}"))),
            }
        }
        match (v, edges) {
            (Some(v), Some(edges)) => Motif::new(v, edges, None),
            _ => Err(Error::Parse(format!(
                "motif {t:?} is neither a built-in name nor 'v=..; edges=..'"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_and_text_form() {
        let t: Motif = "v=3; edges=0-1,0-2,1-2".parse().unwrap();
        assert_eq!(t.kind(), MotifKind::Triangle);
        assert_eq!("twostar".parse::<Motif>().unwrap(), Motif::two_star());
        let p: Motif = Motif::two_star().to_string().parse().unwrap();
        assert_eq!(p.edges(), Motif::two_star().edges());
        let c4: Motif = "v=4; edges=0-1,1-2,2-3,3-0".parse().unwrap();
        assert_eq!(c4.kind(), MotifKind::Other);
        assert_eq!(c4.e(), 4);
    }

    #[test]
    fn rejects_invalid_motifs() {
        assert!("v=3; edges=0-1".parse::<Motif>().is_err()); // disconnected
        assert!("v=2; edges=0-0".parse::<Motif>().is_err());
        assert!("v=2; edges=0-1,1-0".parse::<Motif>().is_err());
        assert!("v=1; edges=".parse::<Motif>().is_err());
        assert!("square".parse::<Motif>().is_err());
        assert!("v=3; edges=0-5".parse::<Motif>().is_err());
    }

    #[test]
    fn removing_an_edge_keeps_vertices() {
        let h = Motif::two_star().without_edge(0).unwrap();
        assert_eq!(h.v(), 3);
        assert_eq!(h.e(), 1);
        assert!(!h.is_connected());
        assert_eq!(h.kind(), MotifKind::Other);
        let p = Motif::triangle().without_edge(2).unwrap();
        assert_eq!(p.kind(), MotifKind::TwoStar);
    }
}
