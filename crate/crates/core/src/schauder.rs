//! Schauder hats, hat decompositions and basis reduction.
//!
//! The hat of vertex `v` in a regular triangulation takes the value
//! `1/den(v)` at `v` and `0` at every other vertex. A function linear on the
//! triangulation with McNaughton vertex values is the plain sum
//! `sum m_v * hat_v` with `m_v = den(v) * a(v)` a nonnegative integer.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::complex::{BlowUp, ComplexError, Triangulation};
use crate::linearize::McNaughtonRep;
use crate::numeric::{HomogeneousPoint, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchauderError {
    #[error("vertex index {0} out of range")]
    NotAVertex(usize),
    #[error("den(v) * a(v) is not an integer at vertex {0}: function is not linear with integer pieces here")]
    NotIntegral(usize),
    #[error("vertex {0} listed twice")]
    DuplicateVertex(usize),
    #[error("basis reduction invariant violated: {0}")]
    ReductionInvariant(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Vertex values of the hat at `v`.
pub fn hat_values(t: &Triangulation, v: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); t.num_vertices()];
    out[v] = Rational::new(BigInt::one(), t.vertex(v).den().clone());
    out
}

pub fn hat_function(t: &Triangulation, v: usize) -> Result<McNaughtonRep, SchauderError> {
    if v >= t.num_vertices() {
        return Err(SchauderError::NotAVertex(v));
    }
    Ok(McNaughtonRep { triangulation: t.clone(), values: hat_values(t, v) })
}

/// If `values` is a hat of `t`, the vertex it peaks at.
pub fn as_hat(t: &Triangulation, values: &[Rational]) -> Option<usize> {
    let mut nonzero = values.iter().enumerate().filter(|(_, x)| !x.is_zero());
    let (v, x) = nonzero.next()?;
    if nonzero.next().is_some() {
        return None;
    }
    (*x == Rational::new(BigInt::one(), t.vertex(v).den().clone())).then_some(v)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatTerm {
    pub vertex: usize,
    pub multiplicity: BigInt,
    pub denominator: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatDecomposition {
    pub triangulation: Triangulation,
    /// Sorted by vertex, zero multiplicities omitted.
    pub terms: Vec<HatTerm>,
}

impl HatDecomposition {
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Distinct hat vertices, dropping multiplicities.
    pub fn support_vertices(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.vertex).collect()
    }

    /// `sum m_i * hat_i` as vertex values.
    pub fn recompose(&self) -> McNaughtonRep {
        let mut values = vec![Rational::zero(); self.triangulation.num_vertices()];
        for term in &self.terms {
            values[term.vertex] = Rational::new(term.multiplicity.clone(), term.denominator.clone());
        }
        McNaughtonRep { triangulation: self.triangulation.clone(), values }
    }
}

pub fn hat_decomposition(a: &McNaughtonRep) -> Result<HatDecomposition, SchauderError> {
    let t = &a.triangulation;
    let mut terms = Vec::new();
    for (v, value) in a.values.iter().enumerate() {
        let den = t.vertex(v).den();
        let m = value * Rational::from_integer(den.clone());
        if !m.is_integer() {
            return Err(SchauderError::NotIntegral(v));
        }
        let m = m.to_integer();
        if m.is_positive() {
            terms.push(HatTerm { vertex: v, multiplicity: m, denominator: den.clone() });
        }
    }
    Ok(HatDecomposition { triangulation: t.clone(), terms })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionStep {
    pub k: usize,
    pub vertex: HomogeneousPoint,
    pub blown_edge: Option<[HomogeneousPoint; 2]>,
    pub mediant: Option<HomogeneousPoint>,
    pub c_nonzero: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub b0: HomogeneousPoint,
    pub rest: Vec<HomogeneousPoint>,
    /// `Δ(u)`.
    pub triangulation: Triangulation,
    /// Vertices (in `Δ(u)`) of the nonzero `c_k`, in order of `k`.
    pub c_hats: Vec<usize>,
    pub steps: Vec<ReductionStep>,
}

#[derive(Serialize)]
struct TraceJson<'a> {
    b0: &'a HomogeneousPoint,
    rest: &'a [HomogeneousPoint],
    steps: &'a [ReductionStep],
    c_hats: Vec<&'a HomogeneousPoint>,
    triangulation: &'a Triangulation,
}

impl Serialize for ReductionTrace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TraceJson {
            b0: &self.b0,
            rest: &self.rest,
            steps: &self.steps,
            c_hats: self.c_hats.iter().map(|&v| self.triangulation.vertex(v)).collect(),
            triangulation: &self.triangulation,
        }
        .serialize(serializer)
    }
}

/// Runtime self-check performed by [`basis_reduction`]: the number of random
/// points of `Δ(u)` at which `b_0 ∧ Σ b_i = Σ c_k` is verified, and the seed
/// for choosing them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleCheck {
    pub samples: usize,
    pub seed: u64,
}

impl Default for SampleCheck {
    fn default() -> Self {
        SampleCheck { samples: 4, seed: 0x5eed }
    }
}

/// Random point of a random maximal simplex, returned as (simplex, bary).
pub fn random_simplex_point<R: Rng>(t: &Triangulation, rng: &mut R) -> (usize, Vec<Rational>) {
    let i = rng.gen_range(0..t.simplices().len());
    let k = t.simplices()[i].len();
    let weights: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=12)).collect();
    let total: i64 = weights.iter().sum();
    let bary = if total == 0 {
        let mut b = vec![Rational::zero(); k];
        b[rng.gen_range(0..k)] = Rational::one();
        b
    } else {
        weights.iter().map(|&w| Rational::new(w.into(), total.into())).collect()
    };
    (i, bary)
}

/// A function linear on a triangulation, by its nonzero vertex values.
type Sparse = BTreeMap<usize, Rational>;

fn sparse_hat(t: &Triangulation, v: usize) -> Sparse {
    BTreeMap::from([(v, Rational::new(BigInt::one(), t.vertex(v).den().clone()))])
}

fn carry_sparse(before: &Triangulation, info: &BlowUp, f: &Sparse) -> Sparse {
    let (a, b) = info.edge;
    let mut out: Sparse = f.iter().map(|(&v, x)| (info.remap[v], x.clone())).collect();
    if f.contains_key(&a) || f.contains_key(&b) {
        let da = Rational::from_integer(before.vertex(a).den().clone());
        let db = Rational::from_integer(before.vertex(b).den().clone());
        let zero = Rational::zero();
        let fa = f.get(&a).unwrap_or(&zero);
        let fb = f.get(&b).unwrap_or(&zero);
        out.insert(info.mediant, (&da * fa + &db * fb) / (da + db));
    }
    out
}

fn interpolate(simplex: &[usize], bary: &[Rational], f: &Sparse) -> Rational {
    simplex.iter().zip(bary).filter_map(|(v, l)| f.get(v).map(|x| l * x)).sum()
}

fn neighbours(t: &Triangulation, v: usize) -> BTreeSet<usize> {
    t.star(v).flat_map(|i| t.simplices()[i].iter().copied()).filter(|&w| w != v).collect()
}

/// Reduces `b_0 ∧ (b_1 + ... + b_u)` to a sum of distinct hats.
///
/// For k = 1..u: if `v_0 v_k` is an edge of `Δ(k-1)` it is blown up at the
/// Farey mediant, giving `Δ(k)`; otherwise `Δ(k) = Δ(k-1)`. Then
/// `c_k = b_k ∧ b_0^(k-1)` (vertexwise minimum on `Δ(k)`) and
/// `b_0^k = b_0^(k-1) - c_k`.
///
/// Checked at runtime: `c_k ≠ 0` exactly when the edge was present, every
/// nonzero `c_k` is the hat of its mediant in `Δ(u)`, and
/// `b_0 ∧ Σ b_i = Σ c_k` at `check.samples` random points of `Δ(u)`.
pub fn basis_reduction(
    t: &Triangulation,
    b0: usize,
    rest: &[usize],
    check: SampleCheck,
) -> Result<ReductionTrace, SchauderError> {
    for &v in std::iter::once(&b0).chain(rest) {
        if v >= t.num_vertices() {
            return Err(SchauderError::NotAVertex(v));
        }
    }
    let mut seen = vec![false; t.num_vertices()];
    for &v in std::iter::once(&b0).chain(rest) {
        if std::mem::replace(&mut seen[v], true) {
            return Err(SchauderError::DuplicateVertex(v));
        }
    }

    let v0 = t.vertex(b0).clone();
    let rest_points: Vec<HomogeneousPoint> = rest.iter().map(|&v| t.vertex(v).clone()).collect();
    let mut tri = t.clone();
    let mut original_b0 = sparse_hat(t, b0);
    let mut b0k = original_b0.clone();
    let mut rest_sum: Sparse = rest.iter().flat_map(|&v| sparse_hat(t, v)).collect();
    let mut cs: Vec<Sparse> = Vec::new();
    let mut steps = Vec::with_capacity(rest.len());
    let mut adjacent = neighbours(&tri, b0);

    for (k, vk) in rest_points.iter().enumerate() {
        let i0 = tri.index_of(&v0).expect("b0 vertex persists");
        let ik = tri.index_of(vk).expect("rest vertex persists");
        // No earlier blow-up touched v_k, so b_k is still its hat here.
        let mut bk = sparse_hat(&tri, ik);
        let mut blown_edge = None;
        let mut mediant = None;
        if adjacent.contains(&ik) {
            let (next, info) = tri.blow_up_tracked(i0, ik)?;
            for f in [&mut b0k, &mut original_b0, &mut rest_sum, &mut bk].into_iter().chain(cs.iter_mut()) {
                *f = carry_sparse(&tri, &info, f);
            }
            mediant = Some(next.vertex(info.mediant).clone());
            blown_edge = Some([v0.clone(), vk.clone()]);
            tri = next;
            adjacent = neighbours(&tri, tri.index_of(&v0).expect("b0 vertex persists"));
        }
        let ck: Sparse = bk
            .iter()
            .filter_map(|(v, x)| b0k.get(v).map(|y| (*v, x.min(y).clone())))
            .filter(|(_, x)| !x.is_zero())
            .collect();
        let nonzero = !ck.is_empty();
        if nonzero != blown_edge.is_some() {
            return Err(SchauderError::ReductionInvariant(format!(
                "step {}: c_k nonzero = {nonzero} but edge present = {}",
                k + 1,
                blown_edge.is_some()
            )));
        }
        if let Some(m) = &mediant {
            let w = tri.index_of(m).expect("mediant was just inserted");
            if ck != sparse_hat(&tri, w) {
                return Err(SchauderError::ReductionInvariant(format!("step {}: c_k is not the mediant hat", k + 1)));
            }
        }
        for (v, c) in &ck {
            let left = b0k.get(v).expect("c_k is below b_0^(k-1)") - c;
            if left.is_zero() {
                b0k.remove(v);
            } else {
                b0k.insert(*v, left);
            }
        }
        steps.push(ReductionStep { k: k + 1, vertex: vk.clone(), blown_edge, mediant, c_nonzero: nonzero });
        cs.push(ck);
    }

    let mut c_hats = Vec::new();
    for (k, ck) in cs.iter().enumerate() {
        if ck.is_empty() {
            continue;
        }
        match ck.iter().next() {
            Some((&v, _)) if ck.len() == 1 && *ck == sparse_hat(&tri, v) && !c_hats.contains(&v) => c_hats.push(v),
            _ => {
                return Err(SchauderError::ReductionInvariant(format!(
                    "c_{} is not a distinct hat of the final triangulation",
                    k + 1
                )))
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
    for _ in 0..check.samples {
        let (i, bary) = random_simplex_point(&tri, &mut rng);
        let s = &tri.simplices()[i];
        let lhs = interpolate(s, &bary, &original_b0).min(interpolate(s, &bary, &rest_sum));
        let rhs: Rational = cs.iter().map(|f| interpolate(s, &bary, f)).sum();
        if lhs != rhs {
            return Err(SchauderError::ReductionInvariant(format!(
                "b0 ∧ Σ b_i ≠ Σ c_k at {:?}",
                tri.point_at(s, &bary)
            )));
        }
    }

    Ok(ReductionTrace { b0: v0, rest: rest_points, triangulation: tri, c_hats, steps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[i64], den: i64) -> HomogeneousPoint {
        HomogeneousPoint::new(coords.iter().map(|&c| c.into()).collect(), den.into()).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn halves() -> Triangulation {
        Triangulation::kuhn(1).unwrap().blow_up(0, 1).unwrap()
    }

    #[test]
    fn hat_examples() {
        let t = Triangulation::kuhn(1).unwrap();
        let h = hat_function(&t, 1).unwrap();
        assert_eq!(h.values, vec![q(0, 1), q(1, 1)]);
        assert_eq!(h.evaluate(&[q(2, 7)]), Some(q(2, 7)));

        let t = halves();
        let mid = t.index_of(&pt(&[1], 2)).unwrap();
        let h = hat_function(&t, mid).unwrap();
        assert_eq!(h.evaluate(&[q(1, 2)]), Some(q(1, 2)));
        assert_eq!(h.evaluate(&[q(1, 4)]), Some(q(1, 4)));
        assert_eq!(h.evaluate(&[q(1, 1)]), Some(q(0, 1)));

        let t = Triangulation::kuhn(2).unwrap();
        let o = t.index_of(&pt(&[0, 0], 1)).unwrap();
        let h = hat_function(&t, o).unwrap();
        assert_eq!(h.evaluate(&[q(0, 1), q(0, 1)]), Some(q(1, 1)));
        for corner in [[1, 0], [0, 1], [1, 1]] {
            assert_eq!(h.evaluate(&[q(corner[0], 1), q(corner[1], 1)]), Some(q(0, 1)));
        }
        assert_eq!(hat_function(&t, 9), Err(SchauderError::NotAVertex(9)));
    }

    #[test]
    fn decomposition_examples() {
        let t = Triangulation::kuhn(1).unwrap();
        let x = McNaughtonRep::new(t.clone(), vec![q(0, 1), q(1, 1)]).unwrap();
        let d = hat_decomposition(&x).unwrap();
        assert_eq!(d.terms, vec![HatTerm { vertex: 1, multiplicity: 1.into(), denominator: 1.into() }]);

        let h = halves();
        let mut vals = vec![q(0, 1); 3];
        vals[h.index_of(&pt(&[0], 1)).unwrap()] = q(1, 1);
        vals[h.index_of(&pt(&[1], 1)).unwrap()] = q(1, 1);
        let d = hat_decomposition(&McNaughtonRep::new(h.clone(), vals.clone()).unwrap()).unwrap();
        assert_eq!(
            d.terms,
            vec![
                HatTerm { vertex: 0, multiplicity: 1.into(), denominator: 1.into() },
                HatTerm { vertex: 1, multiplicity: 1.into(), denominator: 1.into() },
            ]
        );
        assert_eq!(d.recompose().values, vals);

        let zero = McNaughtonRep::new(t.clone(), vec![q(0, 1), q(0, 1)]).unwrap();
        assert!(hat_decomposition(&zero).unwrap().is_empty());

        let bad = McNaughtonRep::new(t, vec![q(1, 2), q(0, 1)]).unwrap();
        assert_eq!(hat_decomposition(&bad), Err(SchauderError::NotIntegral(0)));
    }

    #[test]
    fn reduction_example_with_blow_up() {
        let t = halves();
        let zero = t.index_of(&pt(&[0], 1)).unwrap();
        let half = t.index_of(&pt(&[1], 2)).unwrap();
        let one = t.index_of(&pt(&[1], 1)).unwrap();
        let check = SampleCheck { samples: 100, seed: 1 };
        let r = basis_reduction(&t, zero, &[half, one], check).unwrap();
        assert_eq!(r.steps.len(), 2);
        assert_eq!(r.steps[0].mediant, Some(pt(&[1], 3)));
        assert!(r.steps[0].c_nonzero);
        assert!(r.steps[1].blown_edge.is_none());
        assert!(!r.steps[1].c_nonzero);
        assert_eq!(r.c_hats.len(), 1);
        assert_eq!(r.triangulation.vertex(r.c_hats[0]), &pt(&[1], 3));
        assert_eq!(r.triangulation.num_vertices(), 4);
    }

    #[test]
    fn reduction_trivial_cases() {
        let t = halves();
        let r = basis_reduction(&t, 0, &[], SampleCheck::default()).unwrap();
        assert!(r.c_hats.is_empty());
        assert_eq!(r.triangulation, t);

        // 0 and 1 in {0, 1/3, 1/2, 1}: not adjacent, disjoint hat supports.
        let t4 = t.blow_up(0, t.index_of(&pt(&[1], 2)).unwrap()).unwrap();
        assert_eq!(t4.num_vertices(), 4);
        let a = t4.index_of(&pt(&[0], 1)).unwrap();
        let b = t4.index_of(&pt(&[1], 1)).unwrap();
        let r = basis_reduction(&t4, a, &[b], SampleCheck { samples: 50, seed: 2 }).unwrap();
        assert!(r.c_hats.is_empty());
        assert!(!r.steps[0].c_nonzero);
        assert_eq!(r.triangulation, t4);
    }

    #[test]
    fn reduction_rejects_bad_input() {
        let t = halves();
        assert_eq!(basis_reduction(&t, 0, &[0], SampleCheck::default()).unwrap_err(), SchauderError::DuplicateVertex(0));
        assert_eq!(basis_reduction(&t, 0, &[5], SampleCheck::default()).unwrap_err(), SchauderError::NotAVertex(5));
    }

    #[test]
    fn reduction_in_the_square() {
        let t = Triangulation::kuhn(2).unwrap();
        let o = t.index_of(&pt(&[0, 0], 1)).unwrap();
        let rest: Vec<usize> = (0..t.num_vertices()).filter(|&v| v != o).collect();
        let r = basis_reduction(&t, o, &rest, SampleCheck { samples: 100, seed: 3 }).unwrap();
        // origin is adjacent to all three other corners
        assert_eq!(r.c_hats.len(), 3);
        assert!(r.triangulation.is_regular());
        r.triangulation.verify().unwrap();
    }

    #[test]
    fn trace_json_shape() {
        let t = halves();
        let r = basis_reduction(&t, 0, &[2], SampleCheck::default()).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["steps"][0]["k"], 1);
        assert_eq!(v["steps"][0]["mediant"]["den"], "3");
        assert_eq!(v["c_hats"][0]["num"][0], "1");
        assert_eq!(v["triangulation"]["dim"], 1);
    }
}
