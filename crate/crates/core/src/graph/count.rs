//! Edge-preserving injection counts `t(H, x)` and their discrete derivatives.
//!
//! Every quantity has two evaluation routes: a backtracking search over
//! partial vertex maps, which works for any motif, and closed forms for the
//! edge, the two-star and the triangle. The backtracking route is public so
//! tests can use it as the oracle for the closed forms.

use super::{EdgeIndex, EdgeSet, Motif, MotifKind};
use crate::error::{domain, Error, Result};

/// `n (n-1) ... (n-k+1)` as a float; the empty product is 1.
pub fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| n as f64 - i as f64).product()
}

fn check_fits<G: EdgeSet + ?Sized>(h: &Motif, g: &G) -> Result<()> {
    if h.v() > g.order() {
        return domain(format!(
            "motif with {} vertices does not fit in a graph on {} vertices",
            h.v(),
            g.order()
        ));
    }
    Ok(())
}

fn check_pair<G: EdgeSet + ?Sized>(g: &G, s: EdgeIndex) -> Result<()> {
    if s.i >= s.j || s.j >= g.order() {
        return domain(format!("pair ({},{}) invalid for n = {}", s.i, s.j, g.order()));
    }
    Ok(())
}

/// Number of injections `V(H) -> V(x)` that map every edge of `H` onto an edge of `x`.
pub fn injection_count<G: EdgeSet + ?Sized>(h: &Motif, g: &G) -> Result<u64> {
    check_fits(h, g)?;
    let n = g.order();
    Ok(match h.kind() {
        MotifKind::Edge => {
            let mut m = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    m += u64::from(g.has_edge(i, j));
                }
            }
            2 * m
        }
        MotifKind::TwoStar => (0..n)
            .map(|v| {
                let d = degree(g, v) as u64;
                d * d.saturating_sub(1)
            })
            .sum(),
        MotifKind::Triangle => {
            let mut acc = 0u64;
            for i in 0..n {
                for j in i + 1..n {
                    if g.has_edge(i, j) {
                        acc += common_neighbors(g, i, j) as u64;
                    }
                }
            }
            2 * acc
        }
        MotifKind::Other => injection_count_backtrack(h, g)?,
    })
}

/// [`injection_count`] by exhaustive backtracking, ignoring closed forms.
pub fn injection_count_backtrack<G: EdgeSet + ?Sized>(h: &Motif, g: &G) -> Result<u64> {
    check_fits(h, g)?;
    Search::new(h, g, &[]).count(&[])
}

/// `t(H,x) / (n (n-1) ... (n - v_H + 3))`, the normalized count used in model exponents.
pub fn t_norm<G: EdgeSet + ?Sized>(h: &Motif, g: &G) -> Result<f64> {
    let t = injection_count(h, g)?;
    Ok(t as f64 / falling(g.order(), h.v() - 2))
}

/// `Δ_s t(H, x) = t(H, x^{(s,1)}) - t(H, x^{(s,0)})`: injections into `x^{(s,1)}`
/// whose edge image contains `s`.
pub fn delta_t<G: EdgeSet + ?Sized>(h: &Motif, g: &G, s: EdgeIndex) -> Result<u64> {
    check_fits(h, g)?;
    check_pair(g, s)?;
    let (a, b) = (s.i, s.j);
    let n = g.order();
    Ok(match h.kind() {
        MotifKind::Edge => 2,
        MotifKind::TwoStar => {
            let mut da = 0u64;
            let mut db = 0u64;
            for w in 0..n {
                if w == a || w == b {
                    continue;
                }
                da += u64::from(g.has_edge(a, w));
                db += u64::from(g.has_edge(b, w));
            }
            2 * (da + db)
        }
        MotifKind::Triangle => 6 * common_neighbors(g, a, b) as u64,
        MotifKind::Other => delta_t_backtrack(h, g, s)?,
    })
}

/// [`delta_t`] by backtracking with one motif edge pinned onto `s`.
pub fn delta_t_backtrack<G: EdgeSet + ?Sized>(h: &Motif, g: &G, s: EdgeIndex) -> Result<u64> {
    check_fits(h, g)?;
    check_pair(g, s)?;
    let forced = [(s.i, s.j)];
    let search = Search::new(h, g, &forced);
    let mut total = 0u64;
    for &(u, w) in h.edges() {
        for (a, b) in [(s.i, s.j), (s.j, s.i)] {
            let c = search.count(&[(u, a), (w, b)])?;
            total = total.checked_add(c).ok_or(Error::Overflow("summing Δt"))?;
        }
    }
    Ok(total)
}

/// `Δ_s Δ_r t(H, x)`: injections into `(x^{(s,1)})^{(r,1)}` that use both `s` and `r`.
pub fn delta2_t<G: EdgeSet + ?Sized>(
    h: &Motif,
    g: &G,
    s: EdgeIndex,
    r: EdgeIndex,
) -> Result<u64> {
    check_fits(h, g)?;
    check_pair(g, s)?;
    check_pair(g, r)?;
    if (s.i, s.j) == (r.i, r.j) {
        return domain("Δ_sΔ_r t needs two distinct pairs");
    }
    Ok(match h.kind() {
        MotifKind::Edge => 0,
        MotifKind::TwoStar => {
            if s.touches(&r) {
                2
            } else {
                0
            }
        }
        MotifKind::Triangle => match shared_vertex(s, r) {
            Some((_, u, w)) => 6 * u64::from(g.has_edge(u, w)),
            None => 0,
        },
        MotifKind::Other => delta2_t_backtrack(h, g, s, r)?,
    })
}

/// [`delta2_t`] by backtracking with two motif edges pinned onto `s` and `r`.
pub fn delta2_t_backtrack<G: EdgeSet + ?Sized>(
    h: &Motif,
    g: &G,
    s: EdgeIndex,
    r: EdgeIndex,
) -> Result<u64> {
    check_fits(h, g)?;
    check_pair(g, s)?;
    check_pair(g, r)?;
    if (s.i, s.j) == (r.i, r.j) {
        return domain("Δ_sΔ_r t needs two distinct pairs");
    }
    let forced = [(s.i, s.j), (r.i, r.j)];
    let search = Search::new(h, g, &forced);
    let mut total = 0u64;
    for (ei, &(u1, w1)) in h.edges().iter().enumerate() {
        for (fi, &(u2, w2)) in h.edges().iter().enumerate() {
            if ei == fi {
                continue;
            }
            for (a1, b1) in [(s.i, s.j), (s.j, s.i)] {
                for (a2, b2) in [(r.i, r.j), (r.j, r.i)] {
                    let c = search.count(&[(u1, a1), (w1, b1), (u2, a2), (w2, b2)])?;
                    total = total.checked_add(c).ok_or(Error::Overflow("summing ΔΔt"))?;
                }
            }
        }
    }
    Ok(total)
}

/// `r_H(x; ij) = (Δ_ij t(H,x) / (2 e_H n (n-1) ... (n-v_H+3)))^{1/(e_H-1)}`.
pub fn r_h<G: EdgeSet + ?Sized>(h: &Motif, g: &G, ij: EdgeIndex) -> Result<f64> {
    if h.e() < 2 {
        return domain("r_H is undefined for motifs with a single edge");
    }
    let d = delta_t(h, g, ij)? as f64;
    Ok(r_from_delta(h, g.order(), d))
}

pub(crate) fn r_from_delta(h: &Motif, n: usize, delta: f64) -> f64 {
    let base = delta / (2.0 * h.e() as f64 * falling(n, h.v() - 2));
    base.max(0.0).powf(1.0 / (h.e() as f64 - 1.0))
}

fn degree<G: EdgeSet + ?Sized>(g: &G, v: usize) -> usize {
    (0..g.order()).filter(|&w| w != v && g.has_edge(v, w)).count()
}

fn common_neighbors<G: EdgeSet + ?Sized>(g: &G, a: usize, b: usize) -> usize {
    (0..g.order())
        .filter(|&w| w != a && w != b && g.has_edge(a, w) && g.has_edge(b, w))
        .count()
}

/// For two distinct pairs sharing a vertex, returns `(shared, other_of_s, other_of_r)`.
pub(crate) fn shared_vertex(s: EdgeIndex, r: EdgeIndex) -> Option<(usize, usize, usize)> {
    if s.i == r.i {
        Some((s.i, s.j, r.j))
    } else if s.i == r.j {
        Some((s.i, s.j, r.i))
    } else if s.j == r.i {
        Some((s.j, s.i, r.j))
    } else if s.j == r.j {
        Some((s.j, s.i, r.i))
    } else {
        None
    }
}

/// Depth-first extension of a partial injection.
struct Search<'a, G: ?Sized> {
    h: &'a Motif,
    g: &'a G,
    forced: &'a [(usize, usize)],
}

const UNSET: usize = usize::MAX;

impl<'a, G: EdgeSet + ?Sized> Search<'a, G> {
    fn new(h: &'a Motif, g: &'a G, forced: &'a [(usize, usize)]) -> Self {
        Search { h, g, forced }
    }

    fn present(&self, a: usize, b: usize) -> bool {
        let p = if a < b { (a, b) } else { (b, a) };
        self.forced.contains(&p) || self.g.has_edge(a, b)
    }

    /// Counts injections extending `pins` (motif vertex -> graph vertex).
    fn count(&self, pins: &[(usize, usize)]) -> Result<u64> {
        let v = self.h.v();
        let n = self.g.order();
        let mut assign = vec![UNSET; v];
        let mut used = vec![false; n];
        for &(hv, gv) in pins {
            if assign[hv] == UNSET {
                if used[gv] {
                    return Ok(0);
                }
                assign[hv] = gv;
                used[gv] = true;
            } else if assign[hv] != gv {
                return Ok(0);
            }
        }
        for &(a, b) in self.h.edges() {
            if assign[a] != UNSET && assign[b] != UNSET && !self.present(assign[a], assign[b]) {
                return Ok(0);
            }
        }
        let order = self.order(&assign);
        let mut total = 0u64;
        self.extend(&order, 0, &mut assign, &mut used, &mut total)?;
        Ok(total)
    }

    /// Unassigned motif vertices, most-constrained first.
    fn order(&self, assign: &[usize]) -> Vec<usize> {
        let v = self.h.v();
        let mut placed: Vec<bool> = assign.iter().map(|&a| a != UNSET).collect();
        let mut order = Vec::new();
        while let Some(u) = (0..v).filter(|&u| !placed[u]).max_by_key(|&u| {
            let k = self.h.neighbors(u).filter(|&w| placed[w]).count();
            (k, std::cmp::Reverse(u))
        }) {
            placed[u] = true;
            order.push(u);
        }
        order
    }

    fn extend(
        &self,
        order: &[usize],
        depth: usize,
        assign: &mut [usize],
        used: &mut [bool],
        total: &mut u64,
    ) -> Result<()> {
        if depth == order.len() {
            *total = total.checked_add(1).ok_or(Error::Overflow("counting injections"))?;
            return Ok(());
        }
        let u = order[depth];
        for c in 0..self.g.order() {
            if used[c] {
                continue;
            }
            let ok = self
                .h
                .neighbors(u)
                .all(|w| assign[w] == UNSET || self.present(c, assign[w]));
            if !ok {
                continue;
            }
            assign[u] = c;
            used[c] = true;
            self.extend(order, depth + 1, assign, used, total)?;
            used[c] = false;
            assign[u] = UNSET;
        }
        Ok(())
    }
}
