//! The Euler characteristic valuation `E(a) = χ(supp a)`.
//!
//! Two independent routes:
//!
//! * geometric: with `n` the hat bound, `supp a` retracts onto
//!   `oneset((n+1).a) = {a >= 1/(n+1)}`, whose Euler characteristic is read
//!   off the cells cut out of `a`'s triangulation at that level;
//! * recursive: inclusion-exclusion over the distinct Schauder hats of `a`,
//!   splitting `b_0 ∧ Σ b_i` into hats by basis reduction.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::complex::{Subcomplex, Triangulation};
use crate::formula::Formula;
use crate::linearize::{
    linearizing_triangulation, refine_at_level, restrict_to_theory, LinearizeError, McNaughtonRep,
    DEFAULT_BLOWUP_CAP,
};
use crate::numeric::Rational;
use crate::schauder::{basis_reduction, hat_decomposition, HatDecomposition, ReductionTrace, SampleCheck, SchauderError};

/// Default cap on basis reductions performed by one recursive evaluation.
pub const DEFAULT_REDUCTION_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Geometric,
    Recursive,
    Both,
}

impl Method {
    pub fn runs_geometric(self) -> bool {
        matches!(self, Method::Geometric | Method::Both)
    }

    pub fn runs_recursive(self) -> bool {
        matches!(self, Method::Recursive | Method::Both)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Geometric => "geometric",
            Method::Recursive => "recursive",
            Method::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    pub blowup_cap: usize,
    pub reduction_cap: usize,
    pub check: SampleCheck,
}

impl Default for Options {
    fn default() -> Self {
        Options { blowup_cap: DEFAULT_BLOWUP_CAP, reduction_cap: DEFAULT_REDUCTION_CAP, check: SampleCheck::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// `a ≡ 0` on `P`, so `E = 0` without further work.
    ZeroElement,
    /// `oneset(θ)` is empty; `E = 0` by convention.
    InconsistentTheory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangulationStats {
    pub vertices: usize,
    pub maximal_simplexes: usize,
    pub max_denominator: String,
}

impl TriangulationStats {
    pub fn of(t: &Triangulation) -> Self {
        TriangulationStats {
            vertices: t.num_vertices(),
            maximal_simplexes: t.simplices().len(),
            max_denominator: t.max_denominator().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationReport {
    pub formula: String,
    pub theory: Option<String>,
    pub dim: usize,
    pub method: Method,
    #[serde(rename = "E")]
    pub e: i64,
    pub n_bound: u64,
    pub triangulation: TriangulationStats,
    /// Cell counts of `oneset((n+1).a)` by dimension (see [`level_cells`]);
    /// empty when the geometric route did not run or the oneset is empty.
    pub oneset_faces: Vec<u64>,
    pub flags: Vec<Flag>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error(transparent)]
    Linearize(LinearizeError),
    #[error(transparent)]
    Schauder(#[from] SchauderError),
    #[error("recursive method exceeded {cap} basis reductions; try --method geometric")]
    ReductionCapExceeded { cap: usize },
    #[error("hat bound {0} does not fit in 64 bits")]
    BoundTooLarge(BigInt),
    #[error("the theory has no models; E = 0 by convention")]
    InconsistentTheory { report: Box<ValuationReport> },
    #[error("methods disagree: geometric E = {geometric}, recursive E = {recursive}")]
    MethodsDisagree { geometric: i64, recursive: i64 },
}

impl From<LinearizeError> for ValuationError {
    fn from(e: LinearizeError) -> Self {
        ValuationError::Linearize(e)
    }
}

impl ValuationError {
    /// True for errors caused by a resource cap rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            ValuationError::Linearize(LinearizeError::CapExceeded { .. })
                | ValuationError::ReductionCapExceeded { .. }
                | ValuationError::BoundTooLarge(_)
        )
    }
}

/// `max_i ceil(d_i / m_i)`, the least `n` with `n.m_i/d_i >= 1` for all hat
/// terms. `None` for the empty decomposition.
pub fn n_bound(dec: &HatDecomposition) -> Option<BigInt> {
    dec.terms.iter().map(|t| t.denominator.div_ceil(&t.multiplicity)).max()
}

/// `oneset(k.a)` as a subcomplex of a refinement of `a`'s triangulation.
pub fn oneset_of_multiple(rep: &McNaughtonRep, k: &BigInt, cap: usize) -> Result<Subcomplex, ValuationError> {
    let level = Rational::new(BigInt::one(), k.clone());
    let (refined, _) = refine_at_level(rep, &level, cap)?;
    let one = Rational::one();
    let scaled: Vec<Rational> = refined
        .values
        .iter()
        .map(|v| (v * Rational::from_integer(k.clone())).min(one.clone()))
        .collect();
    refined
        .triangulation
        .subcomplex_where(&scaled, &one)
        .map_err(|e| LinearizeError::from(e).into())
}

/// Cell counts by dimension of `{a >= level}` for `level > 0`.
///
/// On each face `F` of `a`'s triangulation, `a` is linear, so `{a >= level}`
/// is a polyhedral complex: the faces with every vertex at or above the
/// level, and for each face where `a - level` takes both strict signs the
/// two cells `F ∩ {a >= level}` and `F ∩ {a = level}`. Trailing zeros are
/// dropped, so the result is empty exactly when the set is.
pub fn level_cells(rep: &McNaughtonRep, level: &Rational) -> Vec<u64> {
    let t = &rep.triangulation;
    let mut counts = vec![0u64; t.dim() + 1];
    for face in t.faces() {
        let j = face.len() - 1;
        let (mut above, mut below) = (false, false);
        for &v in &face {
            match rep.values[v].cmp(level) {
                std::cmp::Ordering::Greater => above = true,
                std::cmp::Ordering::Less => below = true,
                std::cmp::Ordering::Equal => {}
            }
        }
        if !below {
            counts[j] += 1;
        } else if above {
            counts[j] += 1;
            counts[j - 1] += 1;
        }
    }
    while counts.last() == Some(&0) {
        counts.pop();
    }
    counts
}

fn alternating_sum(counts: &[u64]) -> i64 {
    counts.iter().enumerate().map(|(j, &f)| if j % 2 == 0 { f as i64 } else { -(f as i64) }).sum()
}

/// `χ(oneset(k.a)) = χ({a >= 1/k})`.
pub fn euler_of_multiple(rep: &McNaughtonRep, k: &BigInt) -> i64 {
    alternating_sum(&level_cells(rep, &Rational::new(BigInt::one(), k.clone())))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeometricOutcome {
    pub e: i64,
    pub n_bound: BigInt,
    /// Cell counts of `oneset((n+1).a)`; empty for `a ≡ 0`.
    pub cells: Vec<u64>,
}

pub fn geometric_on(rep: &McNaughtonRep) -> Result<GeometricOutcome, ValuationError> {
    let dec = hat_decomposition(rep)?;
    let Some(n) = n_bound(&dec) else {
        return Ok(GeometricOutcome { e: 0, n_bound: BigInt::zero(), cells: Vec::new() });
    };
    let cells = level_cells(rep, &Rational::new(BigInt::one(), &n + 1u32));
    Ok(GeometricOutcome { e: alternating_sum(&cells), n_bound: n, cells })
}

/// `E` of the sum of the distinct hats at `hats` (canonically sorted vertex
/// indices of `t`).
///
/// With `H = {h_0 < ... < h_u}` the recursion
/// `E(H) = 1 + E(H \ {h_0}) - E(C_0)` unrolls to
/// `E(H) = 1 + Σ_{j<u} (1 - E(C_j))`, where `C_j` are the hats produced by
/// reducing `h_j ∧ (h_{j+1} + ... + h_u)`.
pub fn euler_of_hats(
    t: &Triangulation,
    hats: &[usize],
    opts: &Options,
    budget: &mut usize,
    mut traces: Option<&mut Vec<ReductionTrace>>,
) -> Result<i64, ValuationError> {
    if hats.is_empty() {
        return Ok(0);
    }
    let mut e = 1;
    for j in 0..hats.len() - 1 {
        if *budget == 0 {
            return Err(ValuationError::ReductionCapExceeded { cap: opts.reduction_cap });
        }
        *budget -= 1;
        let red = basis_reduction(t, hats[j], &hats[j + 1..], opts.check)?;
        let mut cs = red.c_hats.clone();
        cs.sort_unstable();
        let sub = euler_of_hats(&red.triangulation, &cs, opts, budget, traces.as_deref_mut())?;
        if let Some(out) = traces.as_deref_mut() {
            out.push(red);
        }
        e += 1 - sub;
    }
    Ok(e)
}

pub fn recursive_on(
    rep: &McNaughtonRep,
    opts: &Options,
    traces: Option<&mut Vec<ReductionTrace>>,
) -> Result<i64, ValuationError> {
    let dec = hat_decomposition(rep)?;
    let mut budget = opts.reduction_cap;
    euler_of_hats(&rep.triangulation, &dec.support_vertices(), opts, &mut budget, traces)
}

/// `φ` linearized jointly with `θ` and restricted to `P = oneset(θ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub dim: usize,
    /// Joint linearizing triangulation of `[0,1]^d`.
    pub ambient: Triangulation,
    /// `φ|P` over the triangulation of `P`.
    pub rep: McNaughtonRep,
}

/// Errors with `LinearizeError::InconsistentTheory` when `oneset(θ) = ∅`.
pub fn present(phi: &Formula, theory: Option<&Formula>, d: usize, opts: &Options) -> Result<Presentation, LinearizeError> {
    let mut fs = vec![phi.clone()];
    fs.extend(theory.cloned());
    let lin = linearizing_triangulation(&fs, d, opts.blowup_cap)?;
    let rep = if theory.is_some() {
        restrict_to_theory(&lin, 1)?.reps.swap_remove(0)
    } else {
        lin.rep(0)
    };
    Ok(Presentation { dim: d, ambient: lin.triangulation, rep })
}

/// A report together with what produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub report: ValuationReport,
    pub presentation: Presentation,
    pub traces: Vec<ReductionTrace>,
}

/// How [`evaluate_with`] picks the method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Fixed(Method),
    /// Both methods when `φ|P` has at most `max_hats` distinct hats, else
    /// geometric only.
    Auto { max_hats: usize },
}

impl MethodChoice {
    pub fn resolve(self, hats: usize) -> Method {
        match self {
            MethodChoice::Fixed(m) => m,
            MethodChoice::Auto { max_hats } if hats <= max_hats => Method::Both,
            MethodChoice::Auto { .. } => Method::Geometric,
        }
    }
}

/// Hat count up to which the automatic choice still cross-checks.
pub const AUTO_BOTH_MAX_HATS: usize = 64;

impl Default for MethodChoice {
    fn default() -> Self {
        MethodChoice::Auto { max_hats: AUTO_BOTH_MAX_HATS }
    }
}

pub fn evaluate(
    phi: &Formula,
    theory: Option<&Formula>,
    d: usize,
    method: Method,
    opts: &Options,
    collect_traces: bool,
) -> Result<Evaluation, ValuationError> {
    evaluate_with(phi, theory, d, MethodChoice::Fixed(method), opts, collect_traces)
}

pub fn evaluate_with(
    phi: &Formula,
    theory: Option<&Formula>,
    d: usize,
    choice: MethodChoice,
    opts: &Options,
    collect_traces: bool,
) -> Result<Evaluation, ValuationError> {
    let base = |method: Method, e: i64, n: u64, stats: TriangulationStats, faces: Vec<u64>, flags: Vec<Flag>| {
        ValuationReport {
            formula: phi.to_string(),
            theory: theory.map(ToString::to_string),
            dim: d,
            method,
            e,
            n_bound: n,
            triangulation: stats,
            oneset_faces: faces,
            flags,
        }
    };
    let presentation = match present(phi, theory, d, opts) {
        Ok(p) => p,
        Err(LinearizeError::InconsistentTheory) => {
            let mut fs = vec![phi.clone()];
            fs.extend(theory.cloned());
            let lin = linearizing_triangulation(&fs, d, opts.blowup_cap)?;
            let stats = TriangulationStats::of(&lin.triangulation);
            let report = base(choice.resolve(0), 0, 0, stats, Vec::new(), vec![Flag::InconsistentTheory]);
            return Err(ValuationError::InconsistentTheory { report: Box::new(report) });
        }
        Err(e) => return Err(e.into()),
    };
    let rep = &presentation.rep;
    let stats = TriangulationStats::of(&rep.triangulation);
    let dec = hat_decomposition(rep)?;
    let method = choice.resolve(dec.terms.len());
    let Some(n) = n_bound(&dec) else {
        let report = base(method, 0, 0, stats, Vec::new(), vec![Flag::ZeroElement]);
        return Ok(Evaluation { report, presentation, traces: Vec::new() });
    };
    let n64 = n.to_u64().ok_or_else(|| ValuationError::BoundTooLarge(n.clone()))?;

    let geometric = if method.runs_geometric() { Some(geometric_on(rep)?) } else { None };
    let mut traces = Vec::new();
    let recursive = if method.runs_recursive() {
        Some(recursive_on(rep, opts, collect_traces.then_some(&mut traces))?)
    } else {
        None
    };
    let e = match (&geometric, recursive) {
        (Some(g), Some(r)) if g.e != r => {
            return Err(ValuationError::MethodsDisagree { geometric: g.e, recursive: r })
        }
        (Some(g), _) => g.e,
        (None, Some(r)) => r,
        (None, None) => unreachable!("every method runs at least one route"),
    };
    let faces = geometric.map(|g| g.cells).unwrap_or_default();
    let report = base(method, e, n64, stats, faces, Vec::new());
    Ok(Evaluation { report, presentation, traces })
}

pub fn euler_geometric(phi: &Formula, theory: Option<&Formula>, d: usize) -> Result<ValuationReport, ValuationError> {
    evaluate(phi, theory, d, Method::Geometric, &Options::default(), false).map(|ev| ev.report)
}

pub fn euler_recursive(phi: &Formula, theory: Option<&Formula>, d: usize) -> Result<ValuationReport, ValuationError> {
    evaluate(phi, theory, d, Method::Recursive, &Options::default(), false).map(|ev| ev.report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stabilization {
    pub n_bound: u64,
    /// `(k, χ(oneset(k.φ)))`.
    pub values: Vec<(u64, i64)>,
}

impl Stabilization {
    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0].1 == w[1].1)
    }
}

/// `χ(oneset(k.φ))` over `ks`, by default `n+1 ..= n+4`.
pub fn stabilization_check(
    phi: &Formula,
    theory: Option<&Formula>,
    d: usize,
    ks: Option<RangeInclusive<u64>>,
    opts: &Options,
) -> Result<Stabilization, ValuationError> {
    let p = present(phi, theory, d, opts)?;
    stabilization_on(&p.rep, ks)
}

pub fn stabilization_on(
    rep: &McNaughtonRep,
    ks: Option<RangeInclusive<u64>>,
) -> Result<Stabilization, ValuationError> {
    let dec = hat_decomposition(rep)?;
    let n = n_bound(&dec).unwrap_or_default();
    let n64 = n.to_u64().ok_or_else(|| ValuationError::BoundTooLarge(n.clone()))?;
    let ks = ks.unwrap_or(n64 + 1..=n64 + 4);
    let values = ks.map(|k| (k, euler_of_multiple(rep, &BigInt::from(k)))).collect();
    Ok(Stabilization { n_bound: n64, values })
}
