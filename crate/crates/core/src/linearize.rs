//! From formulas to McNaughton representations.
//!
//! A formula is linearized over a regular triangulation by evaluating it
//! symbolically on each simplex. Every truncation or comparison node has an
//! affine witness whose sign picks the branch; when the witness takes
//! strictly opposite signs at two vertices of a simplex, the simplex is
//! refined by blowing up such an edge at its Farey mediant. Among all
//! offending edges the one with the smallest mediant denominator goes first,
//! ties broken by the canonical order of simplexes.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::complex::{ComplexError, Subcomplex, Triangulation};
use crate::formula::Formula;
use crate::numeric::{rational_in_unit_interval, HomogeneousPoint, Rational};

/// Default cap on blow-ups per refinement run.
pub const DEFAULT_BLOWUP_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinearizeError {
    #[error("formula uses x{needed} but the ambient dimension is {given}")]
    DimensionTooSmall { needed: usize, given: usize },
    #[error("refinement exceeded the cap of {cap} blow-ups ({} simplexes so far)", partial.simplices().len())]
    CapExceeded { cap: usize, partial: Box<Triangulation> },
    #[error("the theory has no models: its oneset is empty")]
    InconsistentTheory,
    #[error("value at vertex {0} lies outside [0,1]")]
    ValueOutOfRange(usize),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Integer affine function `x -> coeffs . x + constant` on `R^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineFunctional {
    pub coeffs: Vec<BigInt>,
    pub constant: BigInt,
}

impl AffineFunctional {
    pub fn constant(d: usize, c: i64) -> Self {
        AffineFunctional { coeffs: vec![BigInt::zero(); d], constant: c.into() }
    }

    /// The coordinate function `x_i` (1-based).
    pub fn coordinate(d: usize, i: usize) -> Self {
        let mut f = Self::constant(d, 0);
        f.coeffs[i - 1] = BigInt::one();
        f
    }

    fn zip(&self, other: &Self, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> Self {
        AffineFunctional {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| op(a, b)).collect(),
            constant: op(&self.constant, &other.constant),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, n: i64) -> Self {
        AffineFunctional {
            coeffs: self.coeffs.iter().map(|c| c * n).collect(),
            constant: &self.constant * n,
        }
    }

    pub fn add_constant(&self, c: i64) -> Self {
        AffineFunctional { coeffs: self.coeffs.clone(), constant: &self.constant + c }
    }

    /// `den * f(p)` for a homogeneous point: an integer with the sign of
    /// `f(p)`.
    pub fn eval_homogeneous(&self, p: &HomogeneousPoint) -> BigInt {
        let dot: BigInt = self.coeffs.iter().zip(p.coords()).map(|(a, x)| a * x).sum();
        dot + &self.constant * p.den()
    }

    pub fn eval(&self, p: &[Rational]) -> Rational {
        let dot: Rational = self.coeffs.iter().zip(p).map(|(a, x)| x * a).sum();
        dot + Rational::from_integer(self.constant.clone())
    }
}

impl fmt::Display for AffineFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let mag = if mag.is_one() { String::new() } else { mag.to_string() };
            write!(f, "{}{sign}{mag}x{}", if first { "" } else { " " }, i + 1)?;
            first = false;
        }
        if first {
            return write!(f, "{}", self.constant);
        }
        if !self.constant.is_zero() {
            let sign = if self.constant.is_negative() { "-" } else { "+" };
            write!(f, " {sign} {}", self.constant.abs())?;
        }
        Ok(())
    }
}

/// Result of evaluating a formula symbolically on one simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolicValue {
    /// The formula restricted to the simplex is this affine function.
    Affine(AffineFunctional),
    /// Some truncation or comparison is indefinite; the witness changes sign
    /// strictly across the simplex.
    NeedsSplit(AffineFunctional),
}

/// The sign pattern of `g` on the simplex: `Some(true)` if `g >= 0` at every
/// vertex, `Some(false)` if `g <= 0` at every vertex, `None` if mixed.
fn sign_on(g: &AffineFunctional, simplex: &[HomogeneousPoint]) -> Option<bool> {
    let mut pos = false;
    let mut neg = false;
    for v in simplex {
        let s = g.eval_homogeneous(v);
        pos |= s.is_positive();
        neg |= s.is_negative();
    }
    match (pos, neg) {
        (_, false) => Some(true),
        (false, true) => Some(false),
        (true, true) => None,
    }
}

/// Bottom-up symbolic evaluation of `f` over the simplex with the given
/// vertices, in ambient dimension `d`.
pub fn symbolic_eval(f: &Formula, d: usize, simplex: &[HomogeneousPoint]) -> SymbolicValue {
    match eval_node(f, d, simplex) {
        Ok(a) => SymbolicValue::Affine(a),
        Err(w) => SymbolicValue::NeedsSplit(w),
    }
}

fn eval_node(f: &Formula, d: usize, s: &[HomogeneousPoint]) -> Result<AffineFunctional, AffineFunctional> {
    let branch = |g: AffineFunctional,
                  nonneg: &dyn Fn(AffineFunctional) -> AffineFunctional,
                  nonpos: &dyn Fn(AffineFunctional) -> AffineFunctional| {
        match sign_on(&g, s) {
            Some(true) => Ok(nonneg(g)),
            Some(false) => Ok(nonpos(g)),
            None => Err(g),
        }
    };
    match f {
        Formula::Zero => Ok(AffineFunctional::constant(d, 0)),
        Formula::One => Ok(AffineFunctional::constant(d, 1)),
        Formula::Var(i) => Ok(AffineFunctional::coordinate(d, *i)),
        Formula::Neg(g) => Ok(eval_node(g, d, s)?.scale(-1).add_constant(1)),
        Formula::OPlus(a, b) => {
            let sum = eval_node(a, d, s)?.add(&eval_node(b, d, s)?);
            let d0 = d;
            branch(sum.add_constant(-1), &|_| AffineFunctional::constant(d0, 1), &|g| g.add_constant(1))
        }
        Formula::OTimes(a, b) => {
            let g = eval_node(a, d, s)?.add(&eval_node(b, d, s)?).add_constant(-1);
            branch(g, &|g| g, &|_| AffineFunctional::constant(d, 0))
        }
        Formula::Join(a, b) => {
            let (fa, fb) = (eval_node(a, d, s)?, eval_node(b, d, s)?);
            branch(fa.sub(&fb), &|_| fa.clone(), &|_| fb.clone())
        }
        Formula::Meet(a, b) => {
            let (fa, fb) = (eval_node(a, d, s)?, eval_node(b, d, s)?);
            branch(fa.sub(&fb), &|_| fb.clone(), &|_| fa.clone())
        }
        Formula::Minus(a, b) => {
            let g = eval_node(a, d, s)?.sub(&eval_node(b, d, s)?);
            branch(g, &|g| g, &|_| AffineFunctional::constant(d, 0))
        }
        Formula::Scalar(n, a) => {
            let scaled = eval_node(a, d, s)?.scale(i64::from(*n));
            branch(scaled.add_constant(-1), &|_| AffineFunctional::constant(d, 1), &|g| g.add_constant(1))
        }
    }
}

/// A function affine on every simplex of a triangulation, given by its
/// vertex values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McNaughtonRep {
    pub triangulation: Triangulation,
    pub values: Vec<Rational>,
}

impl McNaughtonRep {
    pub fn new(triangulation: Triangulation, values: Vec<Rational>) -> Result<Self, LinearizeError> {
        if values.len() != triangulation.num_vertices() {
            return Err(ComplexError::WrongValueCount {
                expected: triangulation.num_vertices(),
                got: values.len(),
            }
            .into());
        }
        if let Some(i) = values.iter().position(|v| !rational_in_unit_interval(v)) {
            return Err(LinearizeError::ValueOutOfRange(i));
        }
        Ok(McNaughtonRep { triangulation, values })
    }

    /// Value at an arbitrary point of the carrier, by affine interpolation on
    /// a simplex containing it.
    pub fn evaluate(&self, p: &[Rational]) -> Option<Rational> {
        let (i, bary) = self.triangulation.locate(p)?;
        Some(self.interpolate(&self.triangulation.simplices()[i], &bary))
    }

    pub fn interpolate(&self, simplex: &[usize], bary: &[Rational]) -> Rational {
        simplex.iter().zip(bary).map(|(&v, l)| l * &self.values[v]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Blow-up that keeps the represented function.
    pub fn blow_up(&self, a: usize, b: usize) -> Result<McNaughtonRep, ComplexError> {
        let (t, info) = self.triangulation.blow_up_tracked(a, b)?;
        let values = info.carry_values(&self.triangulation, &self.values);
        Ok(McNaughtonRep { triangulation: t, values })
    }
}

/// A jointly linearizing triangulation and each formula's vertex values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Linearization {
    pub triangulation: Triangulation,
    pub values: Vec<Vec<Rational>>,
    pub blowups: usize,
}

impl Linearization {
    pub fn rep(&self, i: usize) -> McNaughtonRep {
        McNaughtonRep { triangulation: self.triangulation.clone(), values: self.values[i].clone() }
    }
}

fn first_split(fs: &[Formula], d: usize, pts: &[HomogeneousPoint]) -> Option<AffineFunctional> {
    fs.iter().find_map(|f| match symbolic_eval(f, d, pts) {
        SymbolicValue::NeedsSplit(w) => Some(w),
        SymbolicValue::Affine(_) => None,
    })
}

fn simplex_points(t: &Triangulation, s: &[usize]) -> Vec<HomogeneousPoint> {
    s.iter().map(|&i| t.vertex(i).clone()).collect()
}

/// A sign-changing edge of a simplex and the denominator of its mediant.
type Split = ((usize, usize), BigInt);

/// Among the edges of `s` whose endpoints have strictly opposite signs under
/// `sign`, the one with the smallest mediant denominator.
fn sign_changing_edge(t: &Triangulation, s: &[usize], sign: impl Fn(usize) -> Ordering) -> Option<Split> {
    let signs: Vec<Ordering> = s.iter().map(|&v| sign(v)).collect();
    let mut best: Option<Split> = None;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            if signs[i] == Ordering::Equal || signs[j] != signs[i].reverse() {
                continue;
            }
            let den = t.vertex(s[i]).den() + t.vertex(s[j]).den();
            if best.as_ref().is_none_or(|(_, b)| den < *b) {
                best = Some(((s[i], s[j]), den));
            }
        }
    }
    best
}

/// Generic refinement loop. `split` inspects a simplex of the current
/// complex and returns the edge to blow up, if any; `on_blow_up` lets the
/// caller carry per-vertex data along.
fn refine<S, B>(mut t: Triangulation, cap: usize, split: S, mut on_blow_up: B) -> Result<(Triangulation, usize), LinearizeError>
where
    S: Fn(&Triangulation, &[usize]) -> Option<Split>,
    B: FnMut(&Triangulation, &crate::complex::BlowUp),
{
    // Offending simplexes keyed by the denominator of the mediant they would
    // receive, then by their vertex points. Splitting the coarsest edge first
    // refines breadth-first in the Farey order; depth-first splitting
    // produces slivers that every later hyperplane has to cut again.
    type Key = (BigInt, Vec<HomogeneousPoint>);
    let key_of = |t: &Triangulation, s: &[usize]| -> Option<Key> {
        let (_, den) = split(t, s)?;
        Some((den, simplex_points(t, s)))
    };
    let mut pending: BTreeSet<Key> = t.simplices().iter().filter_map(|s| key_of(&t, s)).collect();
    let mut blowups = 0;
    while let Some((_, points)) = pending.first() {
        if blowups >= cap {
            return Err(LinearizeError::CapExceeded { cap, partial: Box::new(t) });
        }
        let s: Vec<usize> = points.iter().map(|p| t.index_of(p).expect("pending simplex is current")).collect();
        let ((a, b), _) = split(&t, &s).expect("pending simplex needs a split");
        let (va, vb) = (t.vertex(a).clone(), t.vertex(b).clone());
        let (next, info) = t.blow_up_tracked(a, b)?;
        on_blow_up(&t, &info);
        pending.retain(|(_, k)| !(k.contains(&va) && k.contains(&vb)));
        t = next;
        let star: Vec<usize> = t.star(info.mediant).collect();
        for i in star {
            if let Some(k) = key_of(&t, &t.simplices()[i]) {
                pending.insert(k);
            }
        }
        blowups += 1;
    }
    Ok((t, blowups))
}

/// Refines `t` until every formula is affine on every maximal simplex.
pub fn refine_until_linear(
    t: Triangulation,
    fs: &[Formula],
    cap: usize,
) -> Result<(Triangulation, usize), LinearizeError> {
    let d = t.dim();
    if let Some(needed) = fs.iter().map(Formula::max_var).max().filter(|&m| m > d) {
        return Err(LinearizeError::DimensionTooSmall { needed, given: d });
    }
    let split = |t: &Triangulation, s: &[usize]| {
        let w = first_split(fs, d, &simplex_points(t, s))?;
        sign_changing_edge(t, s, |v| w.eval_homogeneous(t.vertex(v)).cmp(&BigInt::zero()))
    };
    refine(t, cap, split, |_, _| {})
}

/// Starting from the Kuhn triangulation of `[0,1]^d`, builds a regular
/// triangulation on which every formula in `fs` is linear.
pub fn linearizing_triangulation(fs: &[Formula], d: usize, cap: usize) -> Result<Linearization, LinearizeError> {
    let seed = Triangulation::kuhn(d)?;
    let (triangulation, blowups) = refine_until_linear(seed, fs, cap)?;
    let values = fs
        .iter()
        .map(|f| {
            triangulation
                .vertices()
                .iter()
                .map(|v| f.eval_unchecked(&v.to_rationals()))
                .collect()
        })
        .collect();
    Ok(Linearization { triangulation, values, blowups })
}

/// Refines a representation so that no simplex has vertices strictly on both
/// sides of `a = level`. Afterwards `{a >= level}` is the subcomplex spanned
/// by the vertices with value `>= level`.
pub fn refine_at_level(rep: &McNaughtonRep, level: &Rational, cap: usize) -> Result<(McNaughtonRep, usize), LinearizeError> {
    use std::cell::RefCell;
    let values = RefCell::new(rep.values.clone());
    let split = |t: &Triangulation, s: &[usize]| {
        let vals = values.borrow();
        sign_changing_edge(t, s, |v| vals[v].cmp(level))
    };
    let carry = |before: &Triangulation, info: &crate::complex::BlowUp| {
        let next = info.carry_values(before, &values.borrow());
        *values.borrow_mut() = next;
    };
    let (triangulation, blowups) = refine(rep.triangulation.clone(), cap, split, carry)?;
    Ok((McNaughtonRep { triangulation, values: values.into_inner() }, blowups))
}

/// The polyhedron `P = oneset(θ)` of a jointly linearized theory, together
/// with every linearized formula restricted to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub polyhedron: Subcomplex,
    pub reps: Vec<McNaughtonRep>,
}

pub fn restrict_to_theory(joint: &Linearization, theory: usize) -> Result<Restriction, LinearizeError> {
    let polyhedron = joint.triangulation.subcomplex_where(&joint.values[theory], &Rational::one())?;
    if polyhedron.triangulation.is_empty() {
        return Err(LinearizeError::InconsistentTheory);
    }
    let reps = joint
        .values
        .iter()
        .map(|vals| McNaughtonRep {
            triangulation: polyhedron.triangulation.clone(),
            values: polyhedron.restrict(vals),
        })
        .collect();
    Ok(Restriction { polyhedron, reps })
}
