//! Violation probability bounds for uncertain right-hand sides and the
//! robust-weight test for weighted centers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DVector;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::wac::{geometry::wy_membership_residual, CenterTriple, Polytope};

/// Relative residual above which `(w, y)` is not a weight and its dual.
const CONSISTENCY_TOL: f64 = 1e-8;

/// `b̃_i = b_i + Σ_l Δb_i^l z̃_i^l` with independent `z̃_i^l ∈ [−1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RowUncertainty {
    pub delta: Vec<f64>,
    #[serde(rename = "N")]
    pub n: usize,
}

impl RowUncertainty {
    pub fn equal(n: usize, each: f64) -> Self {
        RowUncertainty { delta: vec![each; n], n }
    }

    pub fn l1(&self) -> f64 {
        self.delta.iter().sum()
    }

    fn max(&self) -> f64 {
        self.delta.iter().copied().fold(0.0, f64::max)
    }
}

/// Uncertain rows by 0-based index; rows not listed are certain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct UncertaintySpec {
    pub rows: BTreeMap<usize, RowUncertainty>,
    /// Whether every `z̃` is symmetric about zero.
    #[serde(default = "default_symmetric")]
    pub symmetric: bool,
}

fn default_symmetric() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundsError {
    #[error("uncertain row {row} is out of range for {m} rows")]
    RowOutOfRange { row: usize, m: usize },
    #[error("invalid uncertainty for row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },
    #[error("weight and dual vector are inconsistent (residual {residual:.3e})")]
    Inconsistent { residual: f64 },
}

impl UncertaintySpec {
    pub fn new(symmetric: bool) -> Self {
        UncertaintySpec { rows: BTreeMap::new(), symmetric }
    }

    pub fn with_row(mut self, row: usize, unc: RowUncertainty) -> Self {
        self.rows.insert(row, unc);
        self
    }

    /// Checks positivity, counts and row indices against `m` rows.
    pub fn validate(&self, m: usize) -> Result<(), BoundsError> {
        for (&row, unc) in &self.rows {
            if row >= m {
                return Err(BoundsError::RowOutOfRange { row, m });
            }
            let invalid = |reason: String| BoundsError::InvalidRow { row, reason };
            if unc.delta.is_empty() {
                return Err(invalid("delta is empty".into()));
            }
            if unc.delta.len() != unc.n {
                return Err(invalid(format!("N = {} but delta has {} entries", unc.n, unc.delta.len())));
            }
            if unc.delta.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
                return Err(invalid("delta entries must be positive and finite".into()));
            }
        }
        Ok(())
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// `B(N, p)` as an exact rational. `p` is taken at its exact binary value.
pub fn binomial_tail_exact(n: u64, p: f64) -> BigRational {
    assert!(n >= 1 && p >= 0.0 && p.is_finite(), "binomial tail needs N ≥ 1 and finite p ≥ 0");
    let p = BigRational::from_float(p).expect("finite");
    let big_n = BigRational::from_integer(BigInt::from(n));
    if p > big_n {
        return BigRational::zero();
    }
    let nu = (&big_n + &p) / BigRational::from_integer(BigInt::from(2));
    let fl = nu.floor();
    let mu = &nu - &fl;
    let k = fl.to_integer().to_u64().expect("floor of ν is at most N");
    let mut total = (BigRational::one() - mu) * BigRational::from_integer(binomial(n, k));
    let mut c = binomial(n, k);
    for i in k + 1..=n {
        c = c * BigInt::from(n - i + 1) / BigInt::from(i);
        total += BigRational::from_integer(c.clone());
    }
    total / BigRational::from_integer(BigInt::one() << n as usize)
}

/// Smallest `f64` not below `r`.
pub fn round_up(r: &BigRational) -> f64 {
    let mut f = ratio_to_f64(r);
    while BigRational::from_float(f).is_some_and(|q| &q < r) {
        f = f.next_up();
    }
    f
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    // Scale the quotient to 64 significant bits before converting.
    let (num, den) = (r.numer(), r.denom());
    let shift = num.bits() as i64 - den.bits() as i64 - 64;
    let q = if shift >= 0 { num / (den << shift as usize) } else { (num << (-shift) as usize) / den };
    q.to_f64().expect("64-bit quotient") * 2f64.powi(shift as i32)
}

/// Tail bound for a sum of independent symmetric variables in `[−1, 1]`,
/// rounded up.
pub fn binomial_tail_bound(n: u64, p: f64) -> f64 {
    round_up(&binomial_tail_exact(n, p)).min(1.0)
}

/// `exp(−δ²‖Δb‖₁² / (2Σ(Δb^l)²))`, one ulp up and capped at one.
pub fn hoeffding_bound(delta: f64, delta_b: &[f64]) -> f64 {
    assert!(delta >= 0.0 && !delta_b.is_empty(), "Hoeffding bound needs δ ≥ 0 and nonempty Δb");
    let l1: f64 = delta_b.iter().sum();
    let sq: f64 = delta_b.iter().map(|d| d * d).sum();
    (-(delta * delta) * l1 * l1 / (2.0 * sq)).exp().next_up().min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RowReport {
    pub row: usize,
    /// `s_i / ‖Δb_i‖₁`.
    pub delta_ratio: f64,
    pub robust_feasible: bool,
    pub hoeffding_bound: f64,
    /// Absent when the uncertainty is not symmetric.
    pub binomial_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FeasibilityReport {
    pub rows: Vec<RowReport>,
}

impl FeasibilityReport {
    /// Aligned table with 1-based row numbers.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>6} {:>12} {:>7} {:>12} {:>12}", "row", "delta", "robust", "hoeffding", "binomial");
        for r in &self.rows {
            let binom = r.binomial_bound.map_or_else(|| "-".to_string(), |b| format!("{b:.4}"));
            let _ = writeln!(
                out,
                "{:>6} {:>12.4} {:>7} {:>12.4} {:>12}",
                r.row + 1,
                r.delta_ratio,
                if r.robust_feasible { "yes" } else { "no" },
                r.hoeffding_bound,
                binom
            );
        }
        out
    }

    pub fn all_robust(&self) -> bool {
        self.rows.iter().all(|r| r.robust_feasible)
    }
}

/// Bounds on `Pr{⟨a_i, x⟩ > b̃_i}` for every uncertain row at a center.
/// Rows with `δ_i ≥ 1` hold for every realization and report zero.
pub fn feasibility_report(center: &CenterTriple, unc: &UncertaintySpec) -> Result<FeasibilityReport, BoundsError> {
    unc.validate(center.s.len())?;
    let rows = unc
        .rows
        .iter()
        .map(|(&row, u)| {
            let delta = center.s[row] / u.l1();
            if delta >= 1.0 {
                return RowReport {
                    row,
                    delta_ratio: delta,
                    robust_feasible: true,
                    hoeffding_bound: 0.0,
                    binomial_bound: unc.symmetric.then_some(0.0),
                };
            }
            let delta_c = delta.max(0.0);
            let binomial_bound =
                unc.symmetric.then(|| binomial_tail_bound(u.n as u64, delta_c * u.l1() / u.max()));
            RowReport {
                row,
                delta_ratio: delta,
                robust_feasible: false,
                hoeffding_bound: hoeffding_bound(delta_c, &u.delta),
                binomial_bound,
            }
        })
        .collect();
    Ok(FeasibilityReport { rows })
}

/// Whether `w_i ≥ y_i‖Δb_i‖₁` on every uncertain row, which makes the
/// `w`-center robust feasible. `(w, y)` must be a weight and its dual.
pub fn robust_weight_membership(
    poly: &Polytope,
    w: &DVector<f64>,
    y: &DVector<f64>,
    unc: &UncertaintySpec,
) -> Result<bool, BoundsError> {
    let m = poly.m();
    unc.validate(m)?;
    if w.len() != m || y.len() != m || y.iter().any(|&v| !(v > 0.0)) || w.iter().any(|&v| !(v > 0.0)) {
        return Err(BoundsError::Inconsistent { residual: f64::INFINITY });
    }
    let residual = wy_membership_residual(poly, y, w);
    let scale = 1.0 + poly.b.amax() + w.component_div(y).amax();
    if !(residual <= CONSISTENCY_TOL * scale) {
        return Err(BoundsError::Inconsistent { residual });
    }
    Ok(unc.rows.iter().all(|(&i, u)| w[i] >= y[i] * u.l1()))
}

/// Exact `Pr{Σ z_i ≥ p}` for `n` fair signs by enumeration.
pub fn enumerated_sign_tail(n: u32, p: f64) -> BigRational {
    let count = (0u64..1 << n)
        .filter(|mask| {
            let ones = mask.count_ones() as f64;
            2.0 * ones - n as f64 >= p
        })
        .count();
    BigRational::new(BigInt::from(count), BigInt::one() << n as usize)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wac::{weighted_center, CenterOptions};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_tail_exact(10, 10.0), q(1, 1024));
        assert_eq!(binomial_tail_exact(5, 3.0), q(6, 32));
        assert_eq!(binomial_tail_exact(5, 3.0), enumerated_sign_tail(5, 3.0));
        assert_eq!(binomial_tail_exact(2, 1.0), q(1, 2));
        assert_eq!(enumerated_sign_tail(2, 1.0), q(1, 4));
        assert_eq!(binomial_tail_exact(10, 6.0), q(56, 1024));
        assert_eq!(binomial_tail_bound(4, 4.5), 0.0);
        assert_relative_eq!(binomial_tail_bound(10, 10.0), 9.765625e-4);
    }

    #[test]
    fn rounding_never_understates() {
        for (n, d) in [(1, 3), (2, 7), (1, 10), (5, 9)] {
            let r = q(n, d);
            let f = round_up(&r);
            assert!(BigRational::from_float(f).unwrap() >= r);
            assert!(BigRational::from_float(f.next_down()).unwrap() < r);
        }
    }

    #[test]
    fn hoeffding_examples() {
        let eq = vec![0.1; 10];
        assert_relative_eq!(hoeffding_bound(1.0, &eq), (-5.0f64).exp(), max_relative = 1e-14);
        assert_eq!(hoeffding_bound(0.0, &eq), 1.0);
        let h = hoeffding_bound(0.6, &eq);
        assert_relative_eq!(h, (-1.8f64).exp(), max_relative = 1e-14);
        assert!(binomial_tail_bound(10, 6.0) <= h);
    }

    #[test]
    fn exact_under_tightness_hypothesis() {
        for n in 1..=12u32 {
            for p in 1..=n + 2 {
                if (p + n) % 2 == 0 {
                    assert_eq!(binomial_tail_exact(n as u64, p as f64), enumerated_sign_tail(n, p as f64), "N={n} p={p}");
                }
            }
        }
    }

    #[test]
    fn sound_for_every_threshold() {
        for n in 1..=12u32 {
            for k in 0..=4 * (n + 1) {
                let p = k as f64 / 4.0;
                assert!(binomial_tail_exact(n as u64, p) >= enumerated_sign_tail(n, p), "N={n} p={p}");
            }
        }
    }

    #[test]
    fn binomial_dominates_hoeffding_for_equal_entries() {
        for n in 1..=20u64 {
            for k in 1..=20 {
                let delta = k as f64 * 0.05;
                let eq = vec![1.0; n as usize];
                let b = binomial_tail_bound(n, delta * n as f64);
                assert!(b <= (-(delta * delta) * n as f64 / 2.0).exp() + 1e-12, "N={n} δ={delta}");
                assert!(b <= hoeffding_bound(delta, &eq));
            }
        }
    }

    #[test]
    fn large_counts_stay_cheap() {
        let t = std::time::Instant::now();
        let b = binomial_tail_bound(2000, 150.0);
        assert!(b > 0.0 && b < (-(150.0f64 * 150.0) / 4000.0).exp());
        assert!(t.elapsed().as_secs_f64() < 2.0);
    }

    fn triangle() -> Polytope {
        Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0])
    }

    fn barycenter_center() -> CenterTriple {
        weighted_center(&triangle(), &DVector::from_element(3, 1.0 / 3.0), &CenterOptions::default(), None).unwrap()
    }

    #[test]
    fn triangle_membership() {
        let p = triangle();
        let c = barycenter_center();
        assert!(robust_weight_membership(&p, &c.w, &c.y, &UncertaintySpec::new(true)).unwrap());
        let loose = UncertaintySpec::new(true).with_row(0, RowUncertainty::equal(1, 0.25));
        assert!(robust_weight_membership(&p, &c.w, &c.y, &loose).unwrap());
        let tight = UncertaintySpec::new(true).with_row(0, RowUncertainty::equal(1, 0.5));
        assert!(!robust_weight_membership(&p, &c.w, &c.y, &tight).unwrap());
        // x = 2/3 against b̃₁ = 1 − 0.5 at z̃ = −1.
        assert!(c.x[0] > 1.0 - 0.5);
        let wrong_y = DVector::from_vec(vec![1.0, 0.9, 0.5]);
        assert!(matches!(
            robust_weight_membership(&p, &c.w, &wrong_y, &loose),
            Err(BoundsError::Inconsistent { .. })
        ));
    }

    #[test]
    fn report_rows() {
        let c = barycenter_center();
        // s₁ = 1/3 against ten entries summing to 5/9: δ = 0.6.
        let unc = UncertaintySpec::new(true)
            .with_row(0, RowUncertainty::equal(10, 1.0 / 18.0))
            .with_row(1, RowUncertainty::equal(2, 0.1));
        let rep = feasibility_report(&c, &unc).unwrap();
        let r0 = &rep.rows[0];
        assert_relative_eq!(r0.delta_ratio, 0.6, epsilon = 1e-9);
        assert!(!r0.robust_feasible);
        assert_relative_eq!(r0.binomial_bound.unwrap(), 56.0 / 1024.0, epsilon = 1e-8);
        assert_relative_eq!(r0.hoeffding_bound, (-1.8f64).exp(), epsilon = 1e-8);
        let r1 = &rep.rows[1];
        assert!(r1.robust_feasible);
        assert_eq!((r1.hoeffding_bound, r1.binomial_bound), (0.0, Some(0.0)));
        assert!(!rep.all_robust());
        let table = rep.to_table();
        assert_eq!(table.lines().count(), 3);
        assert!(table.lines().nth(1).unwrap().trim_start().starts_with('1'));

        let asym = UncertaintySpec { symmetric: false, ..unc };
        assert_eq!(feasibility_report(&c, &asym).unwrap().rows[0].binomial_bound, None);
    }

    #[test]
    fn report_rejects_bad_rows() {
        let c = barycenter_center();
        let out = UncertaintySpec::new(true).with_row(3, RowUncertainty::equal(1, 0.1));
        assert_eq!(feasibility_report(&c, &out), Err(BoundsError::RowOutOfRange { row: 3, m: 3 }));
        let bad = UncertaintySpec::new(true).with_row(0, RowUncertainty { delta: vec![0.1, 0.2], n: 3 });
        assert!(matches!(feasibility_report(&c, &bad), Err(BoundsError::InvalidRow { .. })));
    }

    #[test]
    fn spec_json_shape() {
        let text = r#"{"rows": {"2": {"delta": [0.5, 0.25], "N": 2}}, "symmetric": false}"#;
        let spec: UncertaintySpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.rows[&2].l1(), 0.75);
        assert!(!spec.symmetric);
        let back: UncertaintySpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
    }

    proptest! {
        #[test]
        fn tail_is_nonincreasing_in_p(n in 1u64..30, a in 0.0f64..32.0, b in 0.0f64..32.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(binomial_tail_exact(n, lo) >= binomial_tail_exact(n, hi));
        }

        #[test]
        fn delta_formulas_agree(w in proptest::collection::vec(0.05f64..1.0, 3), l1 in 0.05f64..2.0) {
            let w = DVector::from_vec(w);
            let w = &w / w.sum();
            let c = weighted_center(&triangle(), &w, &CenterOptions::default(), None).unwrap();
            for i in 0..3 {
                let a = c.s[i] / l1;
                let b = c.w[i] / (c.y[i] * l1);
                prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()));
            }
        }
    }
}
