//! Small exact linear-algebra kernels: integer determinants, rational
//! linear solves and a dense simplex-method LP. Sizes here never exceed a
//! handful of rows, so everything is dense and allocation-happy.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::numeric::Rational;

/// Determinant of a square integer matrix by fraction-free (Bareiss)
/// elimination.
pub fn det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// All `k`-element subsets of `0..n`, in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Gcd of all maximal minors of a `k x n` integer matrix (`k <= n`). Zero iff
/// the rows are linearly dependent.
pub fn maximal_minor_gcd(rows: &[Vec<BigInt>]) -> BigInt {
    use num_integer::Integer;
    let k = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut g = BigInt::zero();
    for cols in combinations(n, k) {
        let sub = rows.iter().map(|r| cols.iter().map(|&c| r[c].clone()).collect()).collect();
        g = g.gcd(&det(sub));
        if g.is_one() {
            break;
        }
    }
    g
}

/// Solves `A x = b` for `A` with full column rank (rows >= columns). Returns
/// `None` when the system is inconsistent or rank-deficient.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let mut row = 0;
    for col in 0..cols {
        let pivot = (row..rows).find(|&r| !m[r][col].is_zero())?;
        m.swap(row, pivot);
        let inv = Rational::one() / &m[row][col];
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        let pivot = m[row].clone();
        for (r, line) in m.iter_mut().enumerate() {
            if r != row && !line[col].is_zero() {
                let factor = line[col].clone();
                for (x, p) in line[col..=cols].iter_mut().zip(&pivot[col..=cols]) {
                    *x -= &factor * p;
                }
            }
        }
        row += 1;
    }
    if m[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    Some(m[..cols].iter().map(|r| r[cols].clone()).collect())
}

/// Outcome of [`maximize`].
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal(Rational),
}

/// Maximizes `c.x` subject to `A x = b`, `x >= 0`, exactly, with a two-phase
/// dense tableau and Bland's rule.
pub fn maximize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    // Columns: n structural, m artificial, then rhs.
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i].is_negative();
        let mut r = vec![Rational::zero(); width];
        for j in 0..n {
            r[j] = if flip { -row[j].clone() } else { row[j].clone() };
        }
        r[n + i] = Rational::one();
        r[width - 1] = if flip { -b[i].clone() } else { b[i].clone() };
        t.push(r);
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase I: maximize -sum(artificials).
    let mut phase1 = vec![Rational::zero(); n + m];
    for cost in phase1.iter_mut().skip(n) {
        *cost = -Rational::one();
    }
    if run_simplex(&mut t, &mut basis, &phase1, n + m).is_none() {
        unreachable!("phase one is bounded");
    }
    let infeasibility: Rational = basis
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= n)
        .map(|(i, _)| t[i][width - 1].clone())
        .sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }
    // Drive remaining (zero-level) artificials out of the basis.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t[i][j].is_zero()) {
                pivot(&mut t, &mut basis, i, j);
            }
        }
    }
    let mut phase2 = vec![Rational::zero(); n + m];
    phase2[..n].clone_from_slice(c);
    // Redundant rows keep their artificial at zero; forbid re-entry.
    match run_simplex(&mut t, &mut basis, &phase2, n) {
        None => LpOutcome::Unbounded,
        Some(()) => {
            let value = basis
                .iter()
                .enumerate()
                .map(|(i, &j)| &phase2[j] * &t[i][width - 1])
                .sum();
            LpOutcome::Optimal(value)
        }
    }
}

fn pivot(t: &mut [Vec<Rational>], basis: &mut [usize], row: usize, col: usize) {
    let inv = Rational::one() / &t[row][col];
    for x in t[row].iter_mut() {
        *x *= &inv;
    }
    let pivot_row = t[row].clone();
    for (r, line) in t.iter_mut().enumerate() {
        if r != row && !line[col].is_zero() {
            let factor = line[col].clone();
            for (x, p) in line.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
    }
    basis[row] = col;
}

/// Primal simplex on a tableau already in canonical form. Only columns
/// `< allowed` may enter. Returns `None` if unbounded.
fn run_simplex(t: &mut [Vec<Rational>], basis: &mut [usize], cost: &[Rational], allowed: usize) -> Option<()> {
    let width = t.first().map_or(0, Vec::len);
    loop {
        // Reduced cost of column j: c_j - sum_i c_{basis_i} t_ij.
        let entering = (0..allowed).find(|&j| {
            if basis.contains(&j) {
                return false;
            }
            let z: Rational = basis.iter().enumerate().map(|(i, &bj)| &cost[bj] * &t[i][j]).sum();
            (&cost[j] - z).is_positive()
        });
        let Some(entering) = entering else {
            return Some(());
        };
        let mut best: Option<(usize, Rational)> = None;
        for i in 0..t.len() {
            if t[i][entering].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][entering];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let (row, _) = best?;
        pivot(t, basis, row, entering);
    }
}
