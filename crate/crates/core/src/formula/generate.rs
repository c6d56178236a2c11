use rand::Rng;

use super::Formula;

/// Relative weights of the node kinds drawn by [`FormulaGenerator`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorWeights {
    pub var: u32,
    pub constant: u32,
    pub neg: u32,
    pub scalar: u32,
    pub oplus: u32,
    pub otimes: u32,
    pub join: u32,
    pub meet: u32,
    pub minus: u32,
}

impl Default for OperatorWeights {
    fn default() -> Self {
        OperatorWeights {
            var: 6,
            constant: 1,
            neg: 3,
            scalar: 2,
            oplus: 3,
            otimes: 3,
            join: 3,
            meet: 3,
            minus: 2,
        }
    }
}

/// Seeded random formula source for the property harness.
///
/// Output depends only on the configuration and the RNG state, so a fixed
/// seed on a portable RNG (ChaCha) reproduces the same corpus everywhere.
#[derive(Debug, Clone)]
pub struct FormulaGenerator {
    pub vars: usize,
    pub max_size: usize,
    pub max_depth: usize,
    pub max_scalar: u32,
    pub weights: OperatorWeights,
}

impl FormulaGenerator {
    pub fn new(vars: usize, max_size: usize) -> Self {
        assert!(vars >= 1 && max_size >= 1);
        FormulaGenerator {
            vars,
            max_size,
            max_depth: usize::MAX,
            max_scalar: 3,
            weights: OperatorWeights::default(),
        }
    }

    pub fn with_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth.max(1);
        self
    }

    pub fn generate<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        let budget = rng.gen_range(1..=self.max_size);
        self.node(rng, budget, self.max_depth)
    }

    fn leaf<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        let w = &self.weights;
        if rng.gen_range(0..w.var + w.constant) < w.constant {
            if rng.gen_bool(0.5) {
                Formula::Zero
            } else {
                Formula::One
            }
        } else {
            Formula::Var(rng.gen_range(1..=self.vars))
        }
    }

    fn node<R: Rng + ?Sized>(&self, rng: &mut R, budget: usize, depth: usize) -> Formula {
        if budget <= 1 || depth <= 1 {
            return self.leaf(rng);
        }
        let w = &self.weights;
        let unary = w.neg + w.scalar;
        let binary = if budget >= 3 { w.oplus + w.otimes + w.join + w.meet + w.minus } else { 0 };
        let mut pick = rng.gen_range(0..w.var + w.constant + unary + binary);
        if pick < w.var + w.constant {
            return self.leaf(rng);
        }
        pick -= w.var + w.constant;
        if pick < unary {
            let child = self.node(rng, budget - 1, depth - 1);
            return if pick < w.neg {
                Formula::neg(child)
            } else {
                Formula::scalar(rng.gen_range(2..=self.max_scalar.max(2)), child)
            };
        }
        pick -= unary;
        let left_budget = rng.gen_range(1..=budget - 2);
        let l = self.node(rng, left_budget, depth - 1);
        let r = self.node(rng, budget - 1 - left_budget, depth - 1);
        let cuts = [w.oplus, w.otimes, w.join, w.meet, w.minus];
        let builders: [fn(Formula, Formula) -> Formula; 5] =
            [Formula::oplus, Formula::otimes, Formula::join, Formula::meet, Formula::minus];
        for (cut, build) in cuts.iter().zip(builders) {
            if pick < *cut {
                return build(l, r);
            }
            pick -= cut;
        }
        unreachable!("weights exhausted")
    }
}
