//! Randomized refutation of the affine-scaling monotonicity properties.
//!
//! Property 1: `f(s) ≤ max{f(Ds), f(D⁻¹s)}`.
//! Property 2: if `f(s⁰) ≤ f(Ds⁰)` for one `s⁰`, then `f(s) ≤ f(Ds)` for all `s`.
//! A pass only means no counterexample was found.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::UtilitySpec;
use crate::serde_util;

const TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum NdasReport {
    Pass {
        trials: usize,
    },
    Counterexample {
        property: u8,
        #[serde(with = "serde_util::dvector")]
        #[schemars(with = "Vec<f64>")]
        s: DVector<f64>,
        #[serde(with = "serde_util::dvector")]
        #[schemars(with = "Vec<f64>")]
        d: DVector<f64>,
        /// The base point on which the scaling did not decrease `f`
        /// (property 2 only).
        #[serde(with = "serde_util::opt_dvector", default)]
        #[schemars(with = "Option<Vec<f64>>")]
        s0: Option<DVector<f64>>,
    },
}

impl NdasReport {
    pub fn passed(&self) -> bool {
        matches!(self, NdasReport::Pass { .. })
    }
}

/// Property 1 at one `(s, d)`; `None` when it holds or `f` is undefined there.
pub fn ndas_witness(spec: &UtilitySpec, s: &DVector<f64>, d: &DVector<f64>) -> Option<NdasReport> {
    let f = spec.value(s).ok()?;
    let up = spec.value(&s.component_mul(d)).ok()?;
    let down = spec.value(&s.component_div(d)).ok()?;
    (f > up.max(down) + TOL * (1.0 + f.abs()))
        .then(|| NdasReport::Counterexample { property: 1, s: s.clone(), d: d.clone(), s0: None })
}

fn sample(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    // Half of the draws have equal entries, where pairwise utilities peak.
    if rng.random_bool(0.5) {
        DVector::from_element(m, rng.random_range(-2.0f64..2.0).exp())
    } else {
        DVector::from_fn(m, |_, _| rng.random_range(-2.0f64..2.0).exp())
    }
}

/// Samples `trials` draws of `(s, s⁰, d)` in `ℝᵐ₊₊` and tests both properties.
pub fn ndas_check(spec: &UtilitySpec, m: usize, trials: usize, seed: u64) -> NdasReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let s = sample(&mut rng, m);
        let d = DVector::from_fn(m, |_, _| rng.random_range(-1.5f64..1.5).exp());
        if let Some(w) = ndas_witness(spec, &s, &d) {
            return w;
        }
        let s0 = sample(&mut rng, m);
        let vals = (
            spec.value(&s0),
            spec.value(&s0.component_mul(&d)),
            spec.value(&s),
            spec.value(&s.component_mul(&d)),
        );
        if let (Ok(f0), Ok(fd0), Ok(f), Ok(fd)) = vals {
            if f0 <= fd0 && f > fd + TOL * (1.0 + f.abs()) {
                return NdasReport::Counterexample { property: 2, s, d, s0: Some(s0) };
            }
        }
    }
    NdasReport::Pass { trials }
}
