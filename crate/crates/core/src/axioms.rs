//! Randomized check of the characterizing properties of `E`:
//! `E(0) = 0`, `E(hat) = 1`, `E(p ⊕ q) = E(p ∨ q)` and
//! `E(p ∨ q) + E(p ∧ q) = E(p) + E(q)`, each under both methods, plus
//! agreement of the two methods.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::formula::{Formula, FormulaGenerator};
use crate::schauder::hat_function;
use crate::valuation::{geometric_on, present, recursive_on, Options, ValuationError};

pub const PROPERTIES: [&str; 5] = ["zero", "normalization", "idempotency", "additivity", "agreement"];

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub trials: usize,
    pub vars: usize,
    pub max_depth: usize,
    pub max_size: usize,
    pub seed: u64,
    pub options: Options,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyCount {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub seed: u64,
    pub p: String,
    pub q: String,
    pub property: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HarnessSummary {
    pub trials: usize,
    pub seed: u64,
    pub vars: usize,
    pub depth: usize,
    pub size: usize,
    pub passed: usize,
    pub failed: usize,
    pub properties: Vec<PropertyCount>,
    pub first_counterexample: Option<Counterexample>,
}

impl HarnessSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// `E` of a formula in `[0,1]^d` by both methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BothValues {
    pub geometric: i64,
    pub recursive: i64,
}

pub fn both_values(f: &Formula, d: usize, opts: &Options) -> Result<BothValues, ValuationError> {
    let p = present(f, None, d, opts)?;
    Ok(BothValues { geometric: geometric_on(&p.rep)?.e, recursive: recursive_on(&p.rep, opts, None)? })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trial {
    pub index: usize,
    pub p: Formula,
    pub q: Formula,
    /// Selects the hat checked for normalization.
    pub hat_pick: u64,
}

/// The corpus a configuration runs on, in trial order.
pub fn trials(config: &HarnessConfig) -> Vec<Trial> {
    let generator = FormulaGenerator::new(config.vars, config.max_size).with_depth(config.max_depth);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    (0..config.trials)
        .map(|index| {
            let p = generator.generate(&mut rng);
            let q = generator.generate(&mut rng);
            Trial { index, p, q, hat_pick: rng.gen() }
        })
        .collect()
}

/// Outcome per property, in [`PROPERTIES`] order; `Err` holds the detail.
pub fn check_trial(trial: &Trial, d: usize, opts: &Options) -> Vec<Result<(), String>> {
    let mut out = Vec::with_capacity(PROPERTIES.len());
    let (p, q) = (&trial.p, &trial.q);

    out.push(both_values(&Formula::Zero, d, opts).map_err(|e| e.to_string()).and_then(|v| {
        if v.geometric == 0 && v.recursive == 0 {
            Ok(())
        } else {
            Err(format!("E(0) = {v:?}"))
        }
    }));

    out.push(normalization(p, d, trial.hat_pick, opts));

    let values = [
        p.clone(),
        q.clone(),
        Formula::oplus(p.clone(), q.clone()),
        Formula::join(p.clone(), q.clone()),
        Formula::meet(p.clone(), q.clone()),
    ]
    .iter()
    .map(|f| both_values(f, d, opts))
    .collect::<Result<Vec<_>, _>>();
    match values {
        Err(e) => {
            let msg = e.to_string();
            out.extend([Err(msg.clone()), Err(msg.clone()), Err(msg)]);
        }
        Ok(v) => {
            let [ep, eq, eplus, ejoin, emeet] = [v[0], v[1], v[2], v[3], v[4]];
            let pick = |b: BothValues, geometric: bool| if geometric { b.geometric } else { b.recursive };
            let mut idem = Ok(());
            let mut add = Ok(());
            for (geometric, name) in [(true, "geometric"), (false, "recursive")] {
                let (a, b) = (pick(eplus, geometric), pick(ejoin, geometric));
                if a != b && idem.is_ok() {
                    idem = Err(format!("{name}: E(p+q) = {a}, E(p|q) = {b}"));
                }
                let lhs = pick(ejoin, geometric) + pick(emeet, geometric);
                let rhs = pick(ep, geometric) + pick(eq, geometric);
                if lhs != rhs && add.is_ok() {
                    add = Err(format!("{name}: E(p|q) + E(p&q) = {lhs}, E(p) + E(q) = {rhs}"));
                }
            }
            out.push(idem);
            out.push(add);
            let names = ["p", "q", "p+q", "p|q", "p&q"];
            out.push(
                match v.iter().zip(names).find(|(b, _)| b.geometric != b.recursive) {
                    None => Ok(()),
                    Some((b, name)) => Err(format!("{name}: geometric {} vs recursive {}", b.geometric, b.recursive)),
                },
            );
        }
    }
    out
}

fn normalization(p: &Formula, d: usize, pick: u64, opts: &Options) -> Result<(), String> {
    let pres = present(p, None, d, opts).map_err(|e| e.to_string())?;
    let t = &pres.rep.triangulation;
    let v = (pick % t.num_vertices() as u64) as usize;
    let hat = hat_function(t, v).map_err(|e| e.to_string())?;
    let g = geometric_on(&hat).map_err(|e| e.to_string())?.e;
    let r = recursive_on(&hat, opts, None).map_err(|e| e.to_string())?;
    if g == 1 && r == 1 {
        Ok(())
    } else {
        Err(format!("hat at {}: geometric {g}, recursive {r}", t.vertex(v)))
    }
}

pub fn run(config: &HarnessConfig) -> HarnessSummary {
    let corpus = trials(config);
    let results: Vec<Vec<Result<(), String>>> =
        corpus.par_iter().map(|t| check_trial(t, config.vars, &config.options)).collect();

    let mut properties: Vec<PropertyCount> =
        PROPERTIES.iter().map(|&name| PropertyCount { name, passed: 0, failed: 0 }).collect();
    let mut passed = 0;
    let mut first_counterexample = None;
    for (trial, outcome) in corpus.iter().zip(&results) {
        let mut ok = true;
        for (count, res) in properties.iter_mut().zip(outcome) {
            match res {
                Ok(()) => count.passed += 1,
                Err(detail) => {
                    count.failed += 1;
                    ok = false;
                    first_counterexample.get_or_insert_with(|| Counterexample {
                        trial: trial.index,
                        seed: config.seed,
                        p: trial.p.to_string(),
                        q: trial.q.to_string(),
                        property: count.name,
                        detail: detail.clone(),
                    });
                }
            }
        }
        passed += usize::from(ok);
    }
    HarnessSummary {
        trials: config.trials,
        seed: config.seed,
        vars: config.vars,
        depth: config.max_depth,
        size: config.max_size,
        passed,
        failed: config.trials - passed,
        properties,
        first_counterexample,
    }
}
