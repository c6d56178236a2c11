use num_traits::{One, Signed, Zero};

use super::linalg::{maximize, LpOutcome};
use super::{ComplexError, Triangulation};
use crate::numeric::Rational;

struct Bounds {
    lo: Vec<Rational>,
    hi: Vec<Rational>,
}

fn bounds(t: &Triangulation, s: &[usize]) -> Bounds {
    let pts: Vec<Vec<Rational>> = s.iter().map(|&i| t.vertex(i).to_rationals()).collect();
    let lo = (0..t.dim()).map(|a| pts.iter().map(|p| p[a].clone()).min().unwrap()).collect();
    let hi = (0..t.dim()).map(|a| pts.iter().map(|p| p[a].clone()).max().unwrap()).collect();
    Bounds { lo, hi }
}

fn boxes_meet(a: &Bounds, b: &Bounds) -> bool {
    a.lo.iter().zip(&a.hi).zip(b.lo.iter().zip(&b.hi)).all(|((al, ah), (bl, bh))| al <= bh && bl <= ah)
}

/// `conv(s) ∩ conv(t) = conv(s ∩ t)` decided by one LP: maximize the weight a
/// common point puts on vertices of `s` outside the shared face. Affine
/// independence makes barycentric weights unique, so a positive optimum is
/// exactly an intersection point outside the common face.
fn meet_properly(t: &Triangulation, s: &[usize], u: &[usize]) -> bool {
    let ps: Vec<Vec<Rational>> = s.iter().map(|&i| t.vertex(i).to_rationals()).collect();
    let pu: Vec<Vec<Rational>> = u.iter().map(|&i| t.vertex(i).to_rationals()).collect();
    let n = s.len() + u.len();
    let mut a = Vec::with_capacity(t.dim() + 2);
    for axis in 0..t.dim() {
        let mut row: Vec<Rational> = ps.iter().map(|p| p[axis].clone()).collect();
        row.extend(pu.iter().map(|p| -p[axis].clone()));
        a.push(row);
    }
    let mut sum_s = vec![Rational::zero(); n];
    let mut sum_u = vec![Rational::zero(); n];
    for x in &mut sum_s[..s.len()] {
        *x = Rational::one();
    }
    for x in &mut sum_u[s.len()..] {
        *x = Rational::one();
    }
    a.push(sum_s);
    a.push(sum_u);
    let mut b = vec![Rational::zero(); t.dim()];
    b.push(Rational::one());
    b.push(Rational::one());
    let mut c = vec![Rational::zero(); n];
    for (j, v) in s.iter().enumerate() {
        if !u.contains(v) {
            c[j] = Rational::one();
        }
    }
    match maximize(&a, &b, &c) {
        LpOutcome::Infeasible => true,
        LpOutcome::Optimal(v) => !v.is_positive(),
        LpOutcome::Unbounded => unreachable!("weights are bounded by 1"),
    }
}

pub(super) fn check(t: &Triangulation) -> Result<(), ComplexError> {
    let simplices = t.simplices();
    let boxes: Vec<Bounds> = simplices.iter().map(|s| bounds(t, s)).collect();
    for i in 0..simplices.len() {
        for j in i + 1..simplices.len() {
            if !boxes_meet(&boxes[i], &boxes[j]) {
                continue;
            }
            let (s, u) = (&simplices[i], &simplices[j]);
            if !meet_properly(t, s, u) || !meet_properly(t, u, s) {
                return Err(ComplexError::Improper(s.clone(), u.clone()));
            }
        }
    }
    Ok(())
}
