//! Standing-assumption checks: full column rank, nonempty interior, bounded.

use nalgebra::{DMatrix, DVector};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::AugmentedLp;
use crate::lp::{Cmp, LinearProgram, LpError, Sense};
use crate::serde_util;
use crate::wac::{find_interior_point, geometry, Polytope, WacError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ValidationReport {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub full_column_rank: bool,
    #[serde(with = "serde_util::opt_dvector")]
    #[schemars(with = "Option<Vec<f64>>")]
    pub interior_point: Option<DVector<f64>>,
    pub bounded: bool,
    /// A nonzero `d` with `Ad ≤ 0` when the region is unbounded.
    #[serde(with = "serde_util::opt_dvector")]
    #[schemars(with = "Option<Vec<f64>>")]
    pub recession_direction: Option<DVector<f64>>,
    pub problems: Vec<String>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.full_column_rank && self.interior_point.is_some() && self.bounded
    }
}

/// Finds `d` with `Ad ≤ 0` and `Ad ≠ 0` by maximizing `−Σ a_i d` over
/// `−1 ≤ Ad ≤ 0`. For full column rank `A` no such `d` means `{d : Ad ≤ 0} = {0}`.
fn recession_direction(poly: &Polytope) -> Result<Option<DVector<f64>>, LpError> {
    let (m, n) = poly.a.shape();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let col_sums: Vec<f64> = (0..n).map(|j| -poly.a.column(j).sum()).collect();
    lp.add_free_vars(&col_sums);
    for i in 0..m {
        let row: Vec<f64> = poly.a.row(i).iter().copied().collect();
        lp.add_dense_row(0, &row, Cmp::Le, 0.0);
        lp.add_dense_row(0, &row, Cmp::Ge, -1.0);
    }
    let sol = lp.solve()?;
    if sol.objective > 1e-9 {
        Ok(Some(sol.x))
    } else {
        Ok(None)
    }
}

pub fn validate(aug: &AugmentedLp) -> ValidationReport {
    let poly = aug.polytope();
    let (m, n) = poly.a.shape();
    let mut problems = Vec::new();
    let rank = geometry::numerical_rank(&poly.a, geometry::RANK_TOL);
    let full_column_rank = rank == n && n <= m;
    if !full_column_rank {
        problems.push(format!("numerical rank {rank} is below the column count {n}"));
    }
    let interior_point = match find_interior_point(poly) {
        Ok(x) => Some(x),
        Err(WacError::EmptyInterior { t }) => {
            problems.push(format!("empty interior (largest uniform slack {t:.3e})"));
            None
        }
        Err(e) => {
            problems.push(format!("interior point search failed: {e}"));
            None
        }
    };
    // A null vector of A is a recession direction in both signs.
    let mut direction = if full_column_rank {
        None
    } else {
        let null = geometry::left_null_basis(&poly.a.transpose());
        (null.ncols() > 0).then(|| null.column(0).into_owned())
    };
    if direction.is_none() {
        match recession_direction(poly) {
            Ok(d) => direction = d,
            Err(e) => problems.push(format!("boundedness check failed: {e}")),
        }
    }
    let bounded = direction.is_none() && full_column_rank;
    if let Some(d) = &direction {
        problems.push(format!("unbounded: recession direction with {} nonzero entries", d.iter().filter(|v| v.abs() > 1e-12).count()));
    }
    ValidationReport {
        rows: m,
        cols: n,
        rank,
        full_column_rank,
        interior_point,
        bounded,
        recession_direction: direction,
        problems,
    }
}

/// Appends rows, keeping the objective floor row (when present) last.
fn append_rows(aug: &AugmentedLp, rows: &[(usize, f64, String)], big_m: f64) -> AugmentedLp {
    let (m, n) = aug.polytope.a.shape();
    let k = rows.len();
    let floor = aug.v.is_some() && m > 0;
    let keep = if floor { m - 1 } else { m };
    let mut a = DMatrix::zeros(m + k, n);
    let mut b = DVector::zeros(m + k);
    a.rows_mut(0, keep).copy_from(&aug.polytope.a.rows(0, keep));
    b.rows_mut(0, keep).copy_from(&aug.polytope.b.rows(0, keep));
    let mut labels: Vec<String> = aug.row_labels.iter().take(keep).cloned().collect();
    for (r, (j, sign, label)) in rows.iter().enumerate() {
        a[(keep + r, *j)] = *sign;
        b[keep + r] = big_m;
        labels.push(label.clone());
    }
    if floor {
        a.row_mut(m + k - 1).copy_from(&aug.polytope.a.row(m - 1));
        b[m + k - 1] = aug.polytope.b[m - 1];
        labels.extend(aug.row_labels.get(m - 1).cloned());
    }
    AugmentedLp { polytope: Polytope::new(a, b), row_labels: labels, ..aug.clone() }
}

fn box_label(j: usize, sign: f64) -> String {
    format!("box:{}x{}", if sign > 0.0 { "+" } else { "-" }, j + 1)
}

/// Appends `x_j ≤ M` and `−x_j ≤ M` for every variable.
pub fn with_bounding_box(aug: &AugmentedLp, big_m: f64) -> AugmentedLp {
    let rows: Vec<_> = (0..aug.num_cols())
        .flat_map(|j| [(j, 1.0, box_label(j, 1.0)), (j, -1.0, box_label(j, -1.0))])
        .collect();
    append_rows(aug, &rows, big_m)
}

/// Appends only the box faces `±x_j ≤ M` that cut the recession directions
/// reported by [`validate`], until the region is bounded. Returns the
/// repaired instance and the labels of the added rows.
pub fn with_recession_bounds(aug: &AugmentedLp, big_m: f64) -> Result<(AugmentedLp, Vec<String>), ValidationReport> {
    let mut cur = aug.clone();
    let mut added = Vec::new();
    for _ in 0..=2 * aug.num_cols() {
        let rep = validate(&cur);
        let Some(d) = rep.recession_direction.as_ref().filter(|_| !rep.bounded) else {
            return if rep.bounded { Ok((cur, added)) } else { Err(rep) };
        };
        let top = d.amax();
        let rows: Vec<_> = (0..d.len())
            .filter(|&j| d[j].abs() > 1e-9 * top)
            .map(|j| {
                let sign = d[j].signum();
                (j, sign, box_label(j, sign))
            })
            .filter(|(_, _, l)| !added.contains(l))
            .collect();
        if rows.is_empty() {
            return Err(rep);
        }
        added.extend(rows.iter().map(|r| r.2.clone()));
        cur = append_rows(&cur, &rows, big_m);
    }
    Err(validate(&cur))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aug(m: usize, n: usize, a: &[f64], b: &[f64]) -> AugmentedLp {
        AugmentedLp::from_polytope(Polytope::from_rows(m, n, a, b))
    }

    #[test]
    fn triangle_is_valid() {
        let r = validate(&aug(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0]));
        assert_eq!(r.rank, 1);
        assert!(r.bounded && r.interior_point.is_some() && r.ok());
    }

    #[test]
    fn contradictory_rows_flag_interior() {
        let r = validate(&aug(2, 1, &[1.0, -1.0], &[-1.0, 0.0]));
        assert!(r.interior_point.is_none());
        assert!(!r.ok());
    }

    #[test]
    fn half_line_is_unbounded_along_minus_one() {
        let r = validate(&aug(1, 1, &[1.0], &[1.0]));
        assert!(!r.bounded);
        let d = r.recession_direction.unwrap();
        assert!(d[0] < 0.0);
    }

    #[test]
    fn rank_deficient_matrix_is_flagged() {
        let r = validate(&aug(2, 2, &[1.0, 0.0, -1.0, 0.0], &[1.0, 1.0]));
        assert!(!r.full_column_rank && !r.bounded);
        let d = r.recession_direction.unwrap();
        assert!(d[0].abs() < 1e-12 && d[1].abs() > 0.5);
    }

    #[test]
    fn bounding_box_repairs_half_line() {
        let fixed = with_bounding_box(&aug(1, 1, &[1.0], &[1.0]), 10.0);
        assert_eq!(fixed.num_rows(), 3);
        assert!(validate(&fixed).ok());
    }

    #[test]
    fn recession_bounds_add_only_needed_faces() {
        let (fixed, added) = with_recession_bounds(&aug(1, 1, &[1.0], &[1.0]), 10.0).unwrap();
        assert_eq!(added, vec!["box:-x1".to_string()]);
        assert_eq!(fixed.num_rows(), 2);
        assert_eq!(fixed.polytope.b[1], 10.0);
        assert!(validate(&fixed).ok());
    }

    #[test]
    fn box_keeps_floor_row_last() {
        let mut a = aug(2, 1, &[1.0, -1.0], &[1.0, 5.0]);
        a.v = Some(-5.0);
        a.row_labels = vec!["r".into(), "objective".into()];
        let fixed = with_bounding_box(&a, 3.0);
        assert_eq!(fixed.row_labels, vec!["r", "box:+x1", "box:-x1", "objective"]);
        assert_eq!(fixed.polytope.b.as_slice(), &[1.0, 3.0, 3.0, 5.0]);
        assert_eq!(fixed.polytope.a[(3, 0)], -1.0);
    }
}
