//! Explicit bounds on `|E h(X) - E h(Y)|` and the quantities they consume.
//!
//! Unless a test function is supplied, every reported value is the bound
//! divided by `‖Δh‖ = sup_s ‖Δ_s h‖`.

mod ergm;
mod general;
mod variance;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub use ergm::{
    alphas, bound_negbetas, bound_negbetas_with, bound_smallbetas, bound_smallbetas_with,
    bound_triangle, bound_twostar, check_hightemp, florentine_displayed, hightemp_f,
    HighTempReport,
};
pub use general::{
    bound_general_pnorm, bound_ising, bound_key1, expected_v_norm, matrix_norm,
    mean_abs_deviation_delta_l, Estimator, PNorm,
};
pub use variance::{
    injections_through, term_variances, var_delta_t, VarMode, INJECTION_PAIR_LIMIT,
};

use crate::error::{Error, Result};
use crate::graph::{falling, injection_count, num_pairs, Config, GraphView, Motif};

/// Which result a report evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Theorem {
    /// General contraction bound `(4Nρ)⁻¹ Σ_s E|Δ_s L(Y) - E Δ_s L(Y)|`.
    Key1,
    IsingCwbd,
    SmallBetas,
    NegBetas,
    TwoStar,
    Triangle,
    /// Influence-matrix bound `ε⁻¹ ‖c‖_q E‖v(Y)‖_p`.
    KeyPnorm,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Theorem::Key1,
        Theorem::IsingCwbd,
        Theorem::SmallBetas,
        Theorem::NegBetas,
        Theorem::TwoStar,
        Theorem::Triangle,
        Theorem::KeyPnorm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Theorem::Key1 => "key1",
            Theorem::IsingCwbd => "ising_cwbd",
            Theorem::SmallBetas => "smallbetas",
            Theorem::NegBetas => "negbetas",
            Theorem::TwoStar => "twostar",
            Theorem::Triangle => "triangle",
            Theorem::KeyPnorm => "key_pnorm",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Theorem::ALL.iter().map(|t| t.name()).collect();
                Error::Parse(format!("unknown theorem {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// One checked hypothesis. Informational entries (`required = false`) are
/// reported but do not gate the value.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub name: &'static str,
    pub ok: bool,
    pub required: bool,
    pub detail: String,
}

impl Hypothesis {
    pub fn required(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Hypothesis {
            name,
            ok,
            required: true,
            detail: detail.into(),
        }
    }

    pub fn informational(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Hypothesis {
            name,
            ok,
            required: false,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theorem: Theorem,
    /// The bound, or `None` when a required hypothesis fails.
    pub value: Option<f64>,
    /// The formula evaluated regardless of hypotheses, for diagnostics.
    pub formula_value: f64,
    pub hypotheses: Vec<Hypothesis>,
    pub constants: BTreeMap<String, f64>,
    /// How the value was normalized and which variance convention fed it.
    pub convention: String,
    /// `‖Δh‖` already multiplied into `value`, if any.
    pub delta_norm: Option<f64>,
}

impl BoundReport {
    pub(crate) fn new(
        theorem: Theorem,
        formula_value: f64,
        hypotheses: Vec<Hypothesis>,
        constants: BTreeMap<String, f64>,
        convention: impl Into<String>,
    ) -> Self {
        let ok = hypotheses.iter().all(|h| h.ok || !h.required);
        BoundReport {
            theorem,
            value: ok.then_some(formula_value),
            formula_value,
            hypotheses,
            constants,
            convention: convention.into(),
            delta_norm: None,
        }
    }

    pub fn hypotheses_ok(&self) -> bool {
        self.value.is_some()
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }

    /// The report with `‖Δh‖` multiplied in.
    pub fn scaled(mut self, delta_norm: f64) -> Self {
        let base = self.delta_norm.unwrap_or(1.0);
        let k = delta_norm / base;
        self.value = self.value.map(|v| v * k);
        self.formula_value *= k;
        self.delta_norm = Some(delta_norm);
        self
    }

    pub fn failed_hypotheses(&self) -> impl Iterator<Item = &Hypothesis> {
        self.hypotheses.iter().filter(|h| h.required && !h.ok)
    }
}

pub(crate) fn constants<const K: usize>(pairs: [(&str, f64); K]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Shape of a test function `h : {0,1}^N → ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub enum TestKind {
    /// `h(x) = Σ x_s / N`.
    EdgeDensity,
    /// `h(x) = t(H, x) / n^{v_H}` on graphs with `n` vertices.
    HomDensity { motif: Motif, n: usize },
    /// `h(x) = Σ w_s x_s`.
    Linear(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub kind: TestKind,
    /// `‖Δh‖`.
    pub delta_norm: f64,
    /// `c_s = ‖Δ_s h‖`.
    pub c: Vec<f64>,
}

impl TestFunction {
    pub fn edge_density(dim: usize) -> Self {
        let w = 1.0 / dim as f64;
        TestFunction {
            kind: TestKind::EdgeDensity,
            delta_norm: w,
            c: vec![w; dim],
        }
    }

    pub fn hom_density(motif: Motif, n: usize) -> Result<Self> {
        let d = delta_norm_hom(&motif, n)?;
        Ok(TestFunction {
            kind: TestKind::HomDensity { motif, n },
            delta_norm: d,
            c: vec![d; num_pairs(n)],
        })
    }

    pub fn linear(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Domain("linear test function weights must be finite".into()));
        }
        let c: Vec<f64> = weights.iter().map(|w| w.abs()).collect();
        Ok(TestFunction {
            kind: TestKind::Linear(weights),
            delta_norm: c.iter().copied().fold(0.0, f64::max),
            c,
        })
    }

    /// Reads one weight per coordinate from CSV: either a single column or
    /// `coordinate,weight` rows, with an optional header.
    pub fn linear_from_csv(text: &str, dim: usize) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut w = vec![0.0; dim];
        let mut seen = vec![false; dim];
        let mut next = 0usize;
        for rec in rdr.records() {
            let rec = rec?;
            let parsed: Vec<std::result::Result<f64, _>> =
                rec.iter().map(|f| f.parse::<f64>()).collect();
            if parsed.iter().any(|p| p.is_err()) {
                if next == 0 && !seen.iter().any(|s| *s) {
                    continue;
                }
                return Err(Error::Parse(format!("bad weight row {:?}", rec)));
            }
            let vals: Vec<f64> = parsed.into_iter().map(|p| p.unwrap()).collect();
            let (s, v) = match vals.as_slice() {
                [v] => (next, *v),
                [s, v] if s.fract() == 0.0 && *s >= 0.0 => (*s as usize, *v),
                _ => return Err(Error::Parse(format!("bad weight row {:?}", rec))),
            };
            if s >= dim {
                return Err(Error::Parse(format!("coordinate {s} outside 0..{dim}")));
            }
            w[s] = v;
            seen[s] = true;
            next = s + 1;
        }
        Self::linear(w)
    }

    pub fn name(&self) -> String {
        match &self.kind {
            TestKind::EdgeDensity => "edge_density".into(),
            TestKind::HomDensity { motif, .. } => format!("hom_density({})", motif.label()),
            TestKind::Linear(_) => "linear".into(),
        }
    }

    pub fn eval(&self, x: &Config) -> f64 {
        match &self.kind {
            TestKind::EdgeDensity => x.count_ones() as f64 / x.len() as f64,
            TestKind::HomDensity { motif, n } => {
                let g = GraphView::new(*n, x);
                injection_count(motif, &g).expect("motif fits") as f64 / (*n as f64).powi(motif.v() as i32)
            }
            TestKind::Linear(w) => x.iter_ones().map(|s| w[s]).sum(),
        }
    }
}

/// `‖Δh‖` for `h(x) = t(H,x)/n^{v_H}`: `2 e_H (n-2)(n-3)...(n-v_H+1) / n^{v_H}`,
/// attained at the complete graph.
pub fn delta_norm_hom(h: &Motif, n: usize) -> Result<f64> {
    if h.v() > n {
        return Err(Error::Domain(format!(
            "motif with {} vertices does not fit in n = {n}",
            h.v()
        )));
    }
    Ok(2.0 * h.e() as f64 * falling(n - 2, h.v() - 2) / (n as f64).powi(h.v() as i32))
}
