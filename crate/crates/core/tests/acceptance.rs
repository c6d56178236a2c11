//! Acceptance gate. Every criterion is an exact integer or exact rational
//! comparison (tolerance 0); each prints one PASS/FAIL line and the binary
//! exits nonzero if any fails.

use std::process::ExitCode;

use mveuler::axioms::{self, HarnessConfig};
use mveuler::complex::Triangulation;
use mveuler::formula::{parse, FormulaGenerator};
use mveuler::numeric::{HomogeneousPoint, Rational};
use mveuler::schauder::{basis_reduction, hat_function, random_simplex_point, SampleCheck};
use mveuler::valuation::{
    euler_geometric, euler_recursive, evaluate, geometric_on, oneset_of_multiple, present, recursive_on,
    stabilization_check, Method, Options,
};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ABS: &str = "(x1*x1) | !(x1+x1)";
const RING: &str = "((x1*x1)|!(x1+x1)) | ((x2*x2)|!(x2+x2))";

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn generator(d: usize) -> FormulaGenerator {
    FormulaGenerator::new(d, 25).with_depth(6)
}

/// `Kuhn(d)` followed by up to `max_blowups` blow-ups of random edges.
fn random_triangulation(rng: &mut ChaCha8Rng, d: usize, max_blowups: usize) -> Triangulation {
    let mut t = Triangulation::kuhn(d).unwrap();
    for _ in 0..rng.gen_range(0..=max_blowups) {
        t = random_blow_up(rng, &t);
    }
    t
}

fn random_blow_up(rng: &mut ChaCha8Rng, t: &Triangulation) -> Triangulation {
    let s = &t.simplices()[rng.gen_range(0..t.simplices().len())];
    let i = rng.gen_range(0..s.len());
    let j = (i + rng.gen_range(1..s.len())) % s.len();
    t.blow_up(s[i], s[j]).unwrap()
}

fn random_cube_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<Rational> {
    (0..d)
        .map(|_| {
            let den = rng.gen_range(1..=24i64);
            q(rng.gen_range(0..=den), den)
        })
        .collect()
}

/// Value at `p` of the hat of vertex `v`: its barycentric weight over `den(v)`.
fn hat_at(t: &Triangulation, v: usize, p: &[Rational]) -> Rational {
    let (i, bary) = t.locate(p).expect("point lies in the carrier");
    match t.simplices()[i].iter().position(|&w| w == v) {
        Some(k) => &bary[k] / Rational::from_integer(t.vertex(v).den().clone()),
        None => Rational::zero(),
    }
}

fn axiom_suite() -> Outcome {
    let config = HarnessConfig {
        trials: 200,
        vars: 2,
        max_depth: 6,
        max_size: 25,
        seed: 42,
        options: Options::default(),
    };
    let s = axioms::run(&config);
    let counts: Vec<String> = s.properties.iter().map(|p| format!("{} {}/{}", p.name, p.passed, s.trials)).collect();
    let detail = format!("{} pairs, d=2, size<=25, both methods: {}", s.trials, counts.join(", "));
    match (&s.first_counterexample, s.all_passed() && s.trials >= 200) {
        (None, true) => pass(detail),
        (Some(c), _) => fail(format!("{detail}; first failure {c:?}")),
        (None, false) => fail(detail),
    }
}

fn method_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut agreed = 0;
    for i in 0..200 {
        let d = 1 + i % 2;
        let f = generator(d).generate(&mut rng);
        let g = euler_geometric(&f, None, d);
        let r = euler_recursive(&f, None, d);
        match (g, r) {
            (Ok(g), Ok(r)) if g.e == r.e => agreed += 1,
            (g, r) => return fail(format!("{f} (d={d}): geometric {:?}, recursive {:?}", g.map(|x| x.e), r.map(|x| x.e))),
        }
    }
    pass(format!("{agreed}/200 formulas, d<=2, geometric == recursive"))
}

fn named_instances() -> Outcome {
    // (formula, theory, d, E); the values follow from the homotopy type of
    // the support: empty, cube, (0,1], two half-open intervals, punctured
    // square, and the single point {1} of P = {0,1}.
    let cases: [(&str, Option<&str>, usize, i64); 8] = [
        ("0", None, 1, 0),
        ("1", None, 1, 1),
        ("1", None, 2, 1),
        ("1", None, 3, 1),
        ("x1", None, 1, 1),
        (ABS, None, 1, 2),
        (RING, None, 2, 0),
        ("x1", Some("x1 | !x1"), 1, 1),
    ];
    for (text, theory, d, expected) in cases {
        let f = parse(text).unwrap();
        let th = theory.map(|t| parse(t).unwrap());
        for method in [Method::Geometric, Method::Recursive] {
            let got = evaluate(&f, th.as_ref(), d, method, &Options::default(), false).map(|ev| ev.report.e);
            if got.as_ref().ok() != Some(&expected) {
                return fail(format!("E({text}) mod {theory:?}, d={d}, {method}: {got:?}, expected {expected}"));
            }
        }
    }
    pass(format!("{} instances, both methods", cases.len()))
}

fn hat_normalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let opts = Options::default();
    let mut hats = 0;
    for i in 0..50 {
        let d = 1 + i % 2;
        let t = random_triangulation(&mut rng, d, 10);
        if !t.is_regular() {
            return fail(format!("triangulation {i} is not regular"));
        }
        for v in 0..t.num_vertices() {
            let h = hat_function(&t, v).unwrap();
            let g = geometric_on(&h).map(|o| o.e);
            let r = recursive_on(&h, &opts, None);
            if g.as_ref().ok() != Some(&1) || r.as_ref().ok() != Some(&1) {
                return fail(format!("hat at {} in triangulation {i}: geometric {g:?}, recursive {r:?}", t.vertex(v)));
            }
            hats += 1;
        }
    }
    pass(format!("50 triangulations, {hats} hats, E = 1 under both methods"))
}

fn stabilization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let opts = Options::default();
    let mut refined = 0;
    for i in 0..100 {
        let d = 1 + i % 2;
        let f = generator(d).generate(&mut rng);
        let s = match stabilization_check(&f, None, d, None, &opts) {
            Ok(s) => s,
            Err(e) => return fail(format!("{f}: {e}")),
        };
        if s.values.len() != 4 || !s.is_constant() {
            return fail(format!("{f} (d={d}): n = {}, values {:?}", s.n_bound, s.values));
        }
        let e = euler_geometric(&f, None, d).unwrap().e;
        if s.values[0].1 != e {
            return fail(format!("{f} (d={d}): stable value {} but E = {e}", s.values[0].1));
        }
        // Where it is cheap, recompute each oneset on a regular refinement
        // that puts the level set on vertices.
        if s.n_bound <= 3 {
            let rep = present(&f, None, d, &opts).unwrap().rep;
            for &(k, chi) in &s.values {
                let Ok(sub) = oneset_of_multiple(&rep, &BigInt::from(k), 20_000) else { continue };
                if sub.triangulation.euler_characteristic() != chi {
                    return fail(format!("{f} (d={d}) at k={k}: cells {chi}, refinement {}", sub.triangulation.euler_characteristic()));
                }
                refined += 1;
            }
        }
    }
    pass(format!("100 formulas, d<=2, chi(oneset(k.f)) constant for k in n+1..=n+4; {refined} onesets re-derived by refinement"))
}

fn reduction_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut c_total = 0;
    for i in 0..100 {
        let d = 1 + i % 2;
        let t = random_triangulation(&mut rng, d, 6);
        let n = t.num_vertices();
        let b0 = rng.gen_range(0..n);
        let mut others: Vec<usize> = (0..n).filter(|&v| v != b0).collect();
        let len = rng.gen_range(1..=others.len().min(5));
        let mut rest = Vec::new();
        for _ in 0..len {
            rest.push(others.swap_remove(rng.gen_range(0..others.len())));
        }
        let trace = match basis_reduction(&t, b0, &rest, SampleCheck { samples: 0, seed: 0 }) {
            Ok(tr) => tr,
            Err(e) => return fail(format!("instance {i}: {e}")),
        };
        let tu = &trace.triangulation;
        if !tu.is_regular() {
            return fail(format!("instance {i}: reduced triangulation is not regular"));
        }
        // Each c_k is the hat of a distinct vertex of Δ(u) sitting at the
        // Farey mediant of v_0 and some v_k.
        let v0 = t.vertex(b0);
        let mut seen = std::collections::BTreeSet::new();
        for &c in &trace.c_hats {
            let p = tu.vertex(c);
            let is_mediant = rest.iter().any(|&w| {
                let vk = t.vertex(w);
                let coords: Vec<BigInt> = v0.coords().iter().zip(vk.coords()).map(|(a, b)| a + b).collect();
                HomogeneousPoint::new(coords, v0.den() + vk.den()).as_ref() == Ok(p)
            });
            if !is_mediant || !seen.insert(c) {
                return fail(format!("instance {i}: c-hat at {p} is not a fresh mediant"));
            }
        }
        c_total += trace.c_hats.len();
        for s in 0..100 {
            let p = if s % 2 == 0 {
                random_cube_point(&mut rng, d)
            } else {
                let (j, bary) = random_simplex_point(tu, &mut rng);
                tu.point_at(&tu.simplices()[j], &bary)
            };
            let sum_rest: Rational = rest.iter().map(|&w| hat_at(&t, w, &p)).sum();
            let lhs = hat_at(&t, b0, &p).min(sum_rest);
            let rhs: Rational = trace.c_hats.iter().map(|&c| hat_at(tu, c, &p)).sum();
            if lhs != rhs {
                return fail(format!("instance {i} at {p:?}: b0 ∧ Σb = {lhs}, Σc = {rhs}"));
            }
        }
    }
    pass(format!("100 reductions x 100 exact points, {c_total} c-hats verified"))
}

/// Independent exact model of a one-variable McNaughton function: sorted
/// breakpoints `(x, y)` spanning `[0,1]`, linear in between.
mod pl {
    use super::Rational;
    use mveuler::formula::Formula;
    use num_traits::{One, Signed, Zero};

    pub type Pl = Vec<(Rational, Rational)>;
    type Kink<'a> = &'a dyn Fn(&Rational, &Rational) -> Rational;

    pub fn value(f: &Pl, x: &Rational) -> Rational {
        let k = f.partition_point(|(bx, _)| bx < x);
        if &f[k].0 == x {
            return f[k].1.clone();
        }
        let ((x0, y0), (x1, y1)) = (&f[k - 1], &f[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn constant(c: Rational) -> Pl {
        vec![(Rational::zero(), c.clone()), (Rational::one(), c)]
    }

    /// Pointwise `op`, with extra breakpoints wherever one of the `kinks`
    /// (affine in the two arguments) changes sign inside a common piece.
    fn combine(
        a: &Pl,
        b: &Pl,
        op: impl Fn(&Rational, &Rational) -> Rational,
        kinks: &[Kink],
    ) -> Pl {
        let mut xs: Vec<Rational> = a.iter().chain(b).map(|(x, _)| x.clone()).collect();
        xs.sort();
        xs.dedup();
        let mut all = xs.clone();
        for w in xs.windows(2) {
            let (ua, ub) = (value(a, &w[0]), value(a, &w[1]));
            let (va, vb) = (value(b, &w[0]), value(b, &w[1]));
            for k in kinks {
                let (c0, c1) = (k(&ua, &va), k(&ub, &vb));
                if (c0.is_positive() && c1.is_negative()) || (c0.is_negative() && c1.is_positive()) {
                    all.push(&w[0] + (&w[1] - &w[0]) * &c0 / (&c0 - &c1));
                }
            }
        }
        all.sort();
        all.dedup();
        all.into_iter().map(|x| (x.clone(), op(&value(a, &x), &value(b, &x)))).collect()
    }

    pub fn of(f: &Formula) -> Pl {
        let one = Rational::one;
        let zero = Rational::zero;
        let sum_minus_one = |u: &Rational, v: &Rational| u + v - one();
        let diff = |u: &Rational, v: &Rational| u - v;
        match f {
            Formula::Zero => constant(zero()),
            Formula::One => constant(one()),
            Formula::Var(_) => vec![(zero(), zero()), (one(), one())],
            Formula::Neg(g) => of(g).into_iter().map(|(x, y)| (x, one() - y)).collect(),
            Formula::OPlus(g, h) => combine(&of(g), &of(h), |u, v| (u + v).min(one()), &[&sum_minus_one]),
            Formula::OTimes(g, h) => combine(&of(g), &of(h), |u, v| (u + v - one()).max(zero()), &[&sum_minus_one]),
            Formula::Join(g, h) => combine(&of(g), &of(h), |u, v| u.max(v).clone(), &[&diff]),
            Formula::Meet(g, h) => combine(&of(g), &of(h), |u, v| u.min(v).clone(), &[&diff]),
            Formula::Minus(g, h) => combine(&of(g), &of(h), |u, v| (u - v).max(zero()), &[&diff]),
            Formula::Scalar(n, g) => {
                let n = Rational::from_integer((*n).into());
                let g = of(g);
                let scaled = |u: &Rational, _: &Rational| &n * u - one();
                combine(&g, &g, |u, _| (&n * u).min(one()), &[&scaled])
            }
        }
    }

    /// Connected components of `{f > 0}`. The set is the union of the
    /// breakpoints with positive value and of the open pieces with a
    /// positive endpoint; components are maximal runs of such cells.
    pub fn positive_components(f: &Pl) -> usize {
        let mut cells = Vec::with_capacity(2 * f.len());
        for (i, (_, y)) in f.iter().enumerate() {
            cells.push(y.is_positive());
            if let Some((_, next)) = f.get(i + 1) {
                cells.push(y.is_positive() || next.is_positive());
            }
        }
        cells.iter().enumerate().filter(|&(i, &c)| c && (i == 0 || !cells[i - 1])).count()
    }
}

fn one_dimensional_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for _ in 0..100 {
        let f = generator(1).generate(&mut rng);
        let model = pl::of(&f);
        for x in [q(0, 1), q(1, 3), q(5, 7), q(1, 1)] {
            assert_eq!(pl::value(&model, &x), f.evaluate(std::slice::from_ref(&x)).unwrap(), "{f} at {x}");
        }
        let expected = pl::positive_components(&model) as i64;
        let got = evaluate(&f, None, 1, Method::Both, &Options::default(), false).map(|ev| ev.report.e);
        if got.as_ref().ok() != Some(&expected) {
            return fail(format!("{f}: E = {got:?}, components of support = {expected}"));
        }
        checked += 1;
    }
    pass(format!("{checked} one-variable formulas, E == components of {{a > 0}}, both methods"))
}

fn geometry_suite() -> Outcome {
    let mut factorial = 1;
    for d in 1..=3 {
        factorial *= d;
        let k = Triangulation::kuhn(d).unwrap();
        if k.simplices().len() != factorial || k.euler_characteristic() != 1 || !k.is_regular() || !k.volume().is_one() {
            return fail(format!("Kuhn({d}): {} simplexes, chi {}", k.simplices().len(), k.euler_characteristic()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut blowups = 0;
    for i in 0..30 {
        let d = 1 + i % 3;
        let mut t = Triangulation::kuhn(d).unwrap();
        for _ in 0..8 {
            let next = random_blow_up(&mut rng, &t);
            if !next.is_regular() {
                return fail(format!("sequence {i}: blow-up broke regularity"));
            }
            if next.volume() != t.volume() || next.euler_characteristic() != t.euler_characteristic() {
                return fail(format!("sequence {i}: volume or chi changed"));
            }
            if let Err(e) = next.verify() {
                return fail(format!("sequence {i}: {e}"));
            }
            for _ in 0..10 {
                let p = random_cube_point(&mut rng, d);
                if next.locate(&p).is_none() {
                    return fail(format!("sequence {i}: {p:?} left the carrier"));
                }
            }
            t = next;
            blowups += 1;
        }
    }
    pass(format!("Kuhn(d) for d<=3: d! simplexes, chi 1; {blowups} random blow-ups kept regularity, carrier, volume and chi"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("axiom suite", axiom_suite),
        ("method agreement", method_agreement),
        ("named instances", named_instances),
        ("hat normalization", hat_normalization),
        ("stabilization", stabilization),
        ("basis reduction identity", reduction_identity),
        ("one-variable oracle", one_dimensional_oracle),
        ("geometry suite", geometry_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let o = run();
        failed += usize::from(!o.ok);
        println!(
            "{} [{}] {name} (tolerance: exact) {:.1}s: {}",
            if o.ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
