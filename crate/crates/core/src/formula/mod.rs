//! Łukasiewicz-logic formulas: syntax tree, exact evaluation on `[0,1]^d`,
//! printing and parsing.
//!
//! Operator precedence, loosest to tightest: `|` (join), `&` (meet),
//! `-` (truncated difference), `+` (truncated sum), `*` (Łukasiewicz
//! product), then the prefix forms `!f` and `n.f`. Binary operators associate
//! to the left.

mod generate;
mod parse;

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::numeric::{format_rational, rational_in_unit_interval, Rational};

pub use generate::{FormulaGenerator, OperatorWeights};
pub use parse::{parse, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Zero,
    One,
    /// Variable `x_i`, `i >= 1`.
    Var(usize),
    Neg(Box<Formula>),
    OPlus(Box<Formula>, Box<Formula>),
    OTimes(Box<Formula>, Box<Formula>),
    Join(Box<Formula>, Box<Formula>),
    Meet(Box<Formula>, Box<Formula>),
    Minus(Box<Formula>, Box<Formula>),
    /// `n.f`, the n-fold truncated sum of `f` with itself.
    Scalar(u32, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("formula uses x{needed} but the point has only {given} coordinates")]
    MissingCoordinate { needed: usize, given: usize },
    #[error("coordinate {index} = {value} lies outside [0,1]")]
    OutOfRange { index: usize, value: String },
}

impl Formula {
    pub fn var(i: usize) -> Self {
        Formula::Var(i)
    }
    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Self {
        Formula::Neg(Box::new(f))
    }
    pub fn oplus(f: Formula, g: Formula) -> Self {
        Formula::OPlus(Box::new(f), Box::new(g))
    }
    pub fn otimes(f: Formula, g: Formula) -> Self {
        Formula::OTimes(Box::new(f), Box::new(g))
    }
    pub fn join(f: Formula, g: Formula) -> Self {
        Formula::Join(Box::new(f), Box::new(g))
    }
    pub fn meet(f: Formula, g: Formula) -> Self {
        Formula::Meet(Box::new(f), Box::new(g))
    }
    pub fn minus(f: Formula, g: Formula) -> Self {
        Formula::Minus(Box::new(f), Box::new(g))
    }
    pub fn scalar(n: u32, f: Formula) -> Self {
        assert!(n >= 1, "scalar multiplier must be at least 1");
        Formula::Scalar(n, Box::new(f))
    }

    /// The n-fold `⊕` of `f`, left-nested, without scalar sugar.
    pub fn repeated_oplus(n: u32, f: &Formula) -> Self {
        assert!(n >= 1);
        (1..n).fold(f.clone(), |acc, _| Formula::oplus(acc, f.clone()))
    }

    /// Largest variable index, 0 for closed formulas.
    pub fn max_var(&self) -> usize {
        match self {
            Formula::Zero | Formula::One => 0,
            Formula::Var(i) => *i,
            Formula::Neg(f) | Formula::Scalar(_, f) => f.max_var(),
            Formula::OPlus(f, g)
            | Formula::OTimes(f, g)
            | Formula::Join(f, g)
            | Formula::Meet(f, g)
            | Formula::Minus(f, g) => f.max_var().max(g.max_var()),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Zero | Formula::One | Formula::Var(_) => 1,
            Formula::Neg(f) | Formula::Scalar(_, f) => 1 + f.size(),
            Formula::OPlus(f, g)
            | Formula::OTimes(f, g)
            | Formula::Join(f, g)
            | Formula::Meet(f, g)
            | Formula::Minus(f, g) => 1 + f.size() + g.size(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Zero | Formula::One | Formula::Var(_) => 1,
            Formula::Neg(f) | Formula::Scalar(_, f) => 1 + f.depth(),
            Formula::OPlus(f, g)
            | Formula::OTimes(f, g)
            | Formula::Join(f, g)
            | Formula::Meet(f, g)
            | Formula::Minus(f, g) => 1 + f.depth().max(g.depth()),
        }
    }

    /// Evaluates the formula at a point of the cube in the standard
    /// MV-algebra `[0,1]`.
    pub fn evaluate(&self, p: &[Rational]) -> Result<Rational, FormulaError> {
        let needed = self.max_var();
        if p.len() < needed {
            return Err(FormulaError::MissingCoordinate { needed, given: p.len() });
        }
        for (i, x) in p.iter().enumerate() {
            if !rational_in_unit_interval(x) {
                return Err(FormulaError::OutOfRange { index: i + 1, value: format_rational(x) });
            }
        }
        Ok(self.eval_unchecked(p))
    }

    pub(crate) fn eval_unchecked(&self, p: &[Rational]) -> Rational {
        let one = Rational::one;
        let zero = Rational::zero;
        match self {
            Formula::Zero => zero(),
            Formula::One => one(),
            Formula::Var(i) => p[*i - 1].clone(),
            Formula::Neg(f) => one() - f.eval_unchecked(p),
            Formula::OPlus(f, g) => (f.eval_unchecked(p) + g.eval_unchecked(p)).min(one()),
            Formula::OTimes(f, g) => (f.eval_unchecked(p) + g.eval_unchecked(p) - one()).max(zero()),
            Formula::Join(f, g) => f.eval_unchecked(p).max(g.eval_unchecked(p)),
            Formula::Meet(f, g) => f.eval_unchecked(p).min(g.eval_unchecked(p)),
            Formula::Minus(f, g) => (f.eval_unchecked(p) - g.eval_unchecked(p)).max(zero()),
            Formula::Scalar(n, f) => (Rational::from_integer((*n).into()) * f.eval_unchecked(p)).min(one()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Join(..) => 0,
            Formula::Meet(..) => 1,
            Formula::Minus(..) => 2,
            Formula::OPlus(..) => 3,
            Formula::OTimes(..) => 4,
            Formula::Neg(_) | Formula::Scalar(..) => 5,
            Formula::Zero | Formula::One | Formula::Var(_) => 6,
        }
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Prints with the fewest parentheses that still reparse to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn operand(out: &mut fmt::Formatter<'_>, child: &Formula, parens: bool) -> fmt::Result {
            if parens {
                write!(out, "({child})")
            } else {
                write!(out, "{child}")
            }
        }
        let prec = self.precedence();
        let binary = |out: &mut fmt::Formatter<'_>, l: &Formula, op: &str, r: &Formula| {
            operand(out, l, l.precedence() < prec)?;
            write!(out, " {op} ")?;
            operand(out, r, r.precedence() <= prec)
        };
        match self {
            Formula::Zero => f.write_str("0"),
            Formula::One => f.write_str("1"),
            Formula::Var(i) => write!(f, "x{i}"),
            Formula::Neg(g) => {
                f.write_str("!")?;
                operand(f, g, g.precedence() < prec)
            }
            Formula::Scalar(n, g) => {
                write!(f, "{n}.")?;
                operand(f, g, g.precedence() < prec)
            }
            Formula::OPlus(l, r) => binary(f, l, "+", r),
            Formula::OTimes(l, r) => binary(f, l, "*", r),
            Formula::Join(l, r) => binary(f, l, "|", r),
            Formula::Meet(l, r) => binary(f, l, "&", r),
            Formula::Minus(l, r) => binary(f, l, "-", r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ev(text: &str, p: &[Rational]) -> Rational {
        parse(text).unwrap().evaluate(p).unwrap()
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(ev("!x1", &[q(1, 3)]), q(2, 3));
        assert_eq!(ev("x1 + x1", &[q(3, 4)]), q(1, 1));
        assert_eq!(ev("x1 * x2", &[q(3, 4), q(1, 2)]), q(1, 4));
        assert_eq!(ev("x1 - x2", &[q(1, 4), q(1, 2)]), q(0, 1));
        assert_eq!(ev("x1 - x2", &[q(3, 4), q(1, 2)]), q(1, 4));
        assert_eq!(ev("3.x1", &[q(1, 5)]), q(3, 5));
        assert_eq!(ev("3.x1", &[q(2, 5)]), q(1, 1));
        assert_eq!(ev("(x1*x1) | !(x1+x1)", &[q(1, 3)]), q(1, 3));
    }

    #[test]
    fn evaluation_errors() {
        let f = parse("x2").unwrap();
        assert_eq!(
            f.evaluate(&[q(1, 2)]),
            Err(FormulaError::MissingCoordinate { needed: 2, given: 1 })
        );
        assert!(matches!(f.evaluate(&[q(1, 2), q(3, 2)]), Err(FormulaError::OutOfRange { index: 2, .. })));
    }

    #[test]
    fn printing_examples() {
        let f = Formula::oplus(Formula::var(1), Formula::neg(Formula::var(1)));
        assert_eq!(f.to_string(), "x1 + !x1");
        assert_eq!(Formula::Zero.to_string(), "0");
        assert_eq!(Formula::scalar(3, Formula::var(2)).to_string(), "3.x2");
        let g = Formula::otimes(Formula::var(1), Formula::oplus(Formula::var(2), Formula::var(3)));
        assert_eq!(g.to_string(), "x1 * (x2 + x3)");
        let h = Formula::minus(Formula::var(1), Formula::minus(Formula::var(2), Formula::var(3)));
        assert_eq!(h.to_string(), "x1 - (x2 - x3)");
        let k = Formula::minus(Formula::minus(Formula::var(1), Formula::var(2)), Formula::var(3));
        assert_eq!(k.to_string(), "x1 - x2 - x3");
        assert_eq!(Formula::neg(Formula::join(Formula::One, Formula::var(1))).to_string(), "!(1 | x1)");
    }

    #[test]
    fn metrics() {
        let f = parse("(x1*x1) | !(x1+x3)").unwrap();
        assert_eq!(f.max_var(), 3);
        assert_eq!(f.size(), 8);
        assert_eq!(f.depth(), 4);
        assert_eq!(Formula::One.max_var(), 0);
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::Zero),
            Just(Formula::One),
            (1usize..4).prop_map(Formula::Var),
        ];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::neg),
                (1u32..5, inner.clone()).prop_map(|(n, f)| Formula::scalar(n, f)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::oplus(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::otimes(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::join(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::meet(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::minus(a, b)),
            ]
        })
    }

    fn unit_rational() -> impl Strategy<Value = Rational> {
        (1i64..30).prop_flat_map(|d| (0..=d, Just(d))).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(f in arb_formula()) {
            prop_assert_eq!(parse(&f.to_string()).unwrap(), f);
        }

        #[test]
        fn mv_identities(x in unit_rational(), y in unit_rational()) {
            let p = [x, y];
            let same = |a: &str, b: &str| ev(a, &p) == ev(b, &p);
            prop_assert!(same("!!x1", "x1"));
            prop_assert!(same("x1 + x2", "!(!x1 * !x2)"));
            prop_assert!(same("x1 - x2", "x1 * !x2"));
            prop_assert!(same("x1 | x2", "(x1 - x2) + x2"));
            prop_assert!(same("x1 & x2", "!(!x1 | !x2)"));
        }

        #[test]
        fn scalar_matches_repeated_sum(n in 1u32..=8, f in arb_formula(),
                                       p in proptest::collection::vec(unit_rational(), 3)) {
            let s = Formula::scalar(n, f.clone());
            prop_assert_eq!(s.evaluate(&p).unwrap(), Formula::repeated_oplus(n, &f).evaluate(&p).unwrap());
        }
    }

    #[test]
    fn generator_roundtrips_and_respects_limits() {
        let gen = FormulaGenerator::new(2, 25);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let f = gen.generate(&mut rng);
            assert!(f.size() <= 25);
            assert!(f.max_var() <= 2);
            assert_eq!(parse(&f.to_string()).unwrap(), f);
        }
    }
}
