//! Phase-1 points, centric dual vectors and the weight of a given point.

use nalgebra::DVector;

use super::{geometry, Polytope, SimplexPoint, WacError};
use crate::lp::{Cmp, LinearProgram, LpError, Sense};

fn lp_err(e: LpError) -> WacError {
    WacError::Lp(e.to_string())
}

/// Solves `max t` subject to `Ax + t·e ≤ b`. Returns `(x, t)`.
fn max_min_slack(poly: &Polytope, cap: Option<f64>) -> Result<(DVector<f64>, f64), LpError> {
    let (m, n) = poly.a.shape();
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_free_vars(&vec![0.0; n]);
    let t = lp.add_var(1.0, f64::NEG_INFINITY, cap.unwrap_or(f64::INFINITY));
    for i in 0..m {
        let mut row: Vec<(usize, f64)> = (0..n).map(|j| (j, poly.a[(i, j)])).collect();
        row.push((t, 1.0));
        lp.add_row(row, Cmp::Le, poly.b[i]);
    }
    let sol = lp.solve()?;
    Ok((sol.x.rows(0, n).into_owned(), sol.x[t]))
}

/// A point maximizing the smallest slack. Unbounded regions fall back to the
/// same problem with the slack capped at 1.
pub fn find_interior_point(poly: &Polytope) -> Result<DVector<f64>, WacError> {
    let (x, t) = match max_min_slack(poly, None) {
        Ok(r) => r,
        Err(LpError::Unbounded) => max_min_slack(poly, Some(1.0)).map_err(lp_err)?,
        Err(LpError::Infeasible) => return Err(WacError::EmptyInterior { t: f64::NEG_INFINITY }),
        Err(e) => return Err(lp_err(e)),
    };
    let scale = 1.0 + poly.b.amax();
    if !(t > 1e-12 * scale) {
        return Err(WacError::EmptyInterior { t });
    }
    let min_slack = poly.slacks(&x).min();
    if !(min_slack > 0.0) {
        return Err(WacError::EmptyInterior { t: min_slack });
    }
    Ok(x)
}

/// Some `y > 0` with `Aᵀy = 0` and `⟨b,y⟩ = 1`, from the LP maximizing the
/// smallest coordinate, projected back onto `null(Aᵀ)`.
pub fn centric_y(poly: &Polytope) -> Result<DVector<f64>, WacError> {
    let (m, n) = poly.a.shape();
    let mut lp = LinearProgram::new(Sense::Maximize);
    for _ in 0..m {
        lp.add_var(0.0, 0.0, f64::INFINITY);
    }
    let tau = lp.add_var(1.0, f64::NEG_INFINITY, 1.0);
    for j in 0..n {
        let col: Vec<f64> = poly.a.column(j).iter().copied().collect();
        lp.add_dense_row(0, &col, Cmp::Eq, 0.0);
    }
    lp.add_dense_row(0, poly.b.as_slice(), Cmp::Eq, 1.0);
    for i in 0..m {
        lp.add_row(vec![(i, 1.0), (tau, -1.0)], Cmp::Ge, 0.0);
    }
    let sol = match lp.solve() {
        Ok(s) => s,
        Err(LpError::Infeasible) => return Err(WacError::NoCentricY),
        Err(e) => return Err(lp_err(e)),
    };
    if !(sol.x[tau] > 0.0) {
        return Err(WacError::NoCentricY);
    }
    let y = sol.x.rows(0, m).into_owned();
    let range = geometry::range_basis(&poly.a);
    let y = &y - &range * (range.transpose() * &y);
    let by = poly.b.dot(&y);
    if !(by > 0.0) {
        return Err(WacError::NoCentricY);
    }
    let y = y / by;
    if y.iter().any(|&v| !(v > 0.0)) {
        return Err(WacError::NoCentricY);
    }
    Ok(y)
}

/// The weight `w = S y` whose center is `x`, for interior `x` and centric `y`.
pub fn weight_of_point(
    poly: &Polytope,
    x: &DVector<f64>,
    y: &DVector<f64>,
    tol: f64,
) -> Result<SimplexPoint, WacError> {
    let s = poly.slacks(x);
    let min_slack = s.min();
    if !(min_slack > 0.0) {
        return Err(WacError::NotInterior { min_slack });
    }
    if y.len() != poly.m() || y.iter().any(|&v| !(v > 0.0)) {
        return Err(WacError::NotCentric("y must have one strictly positive entry per row".into()));
    }
    let scale = poly.a.amax().max(1.0) * y.amax();
    let aty = (poly.a.transpose() * y).amax();
    if aty > tol * scale {
        return Err(WacError::NotCentric(format!("|A^T y| = {aty:.3e}")));
    }
    let by = poly.b.dot(y);
    if (by - 1.0).abs() > tol {
        return Err(WacError::NotCentric(format!("<b,y> = {by}")));
    }
    SimplexPoint::normalized(s.component_mul(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triangle() -> Polytope {
        Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0])
    }

    #[test]
    fn interior_point_maximizes_min_slack() {
        let x = find_interior_point(&triangle()).unwrap();
        assert_relative_eq!(x[0], 0.5, epsilon = 1e-12);
        let p = Polytope::from_rows(2, 1, &[1.0, -1.0], &[1.0, 1.0]);
        assert!(find_interior_point(&p).unwrap()[0].abs() < 1e-12);
    }

    #[test]
    fn contradictory_rows_have_empty_interior() {
        let p = Polytope::from_rows(2, 1, &[1.0, -1.0], &[-1.0, 0.0]);
        assert!(matches!(find_interior_point(&p), Err(WacError::EmptyInterior { .. })));
    }

    #[test]
    fn half_line_still_yields_interior_point() {
        let p = Polytope::from_rows(1, 1, &[1.0], &[1.0]);
        let x = find_interior_point(&p).unwrap();
        assert!(p.is_interior(&x));
    }

    #[test]
    fn centric_y_examples() {
        let y = centric_y(&triangle()).unwrap();
        assert_relative_eq!(y[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(y[1] + y[2], 1.0, epsilon = 1e-12);
        assert!(y[1] > 0.0 && y[2] > 0.0);

        let p = Polytope::from_rows(2, 1, &[1.0, -1.0], &[1.0, 1.0]);
        assert_relative_eq!(centric_y(&p).unwrap(), DVector::from_element(2, 0.5), epsilon = 1e-12);

        let p = Polytope::from_rows(3, 1, &[1.0, -1.0, 0.0], &[1.0, 0.0, 1.0]);
        let y = centric_y(&p).unwrap();
        assert_relative_eq!(y[0], y[1], epsilon = 1e-12);
        assert_relative_eq!(y[0] + y[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn half_line_has_no_centric_y() {
        let p = Polytope::from_rows(1, 1, &[1.0], &[1.0]);
        assert!(matches!(centric_y(&p), Err(WacError::NoCentricY)));
    }

    #[test]
    fn weight_of_point_examples() {
        let t = triangle();
        let y = DVector::from_vec(vec![1.0, 0.5, 0.5]);
        let w = weight_of_point(&t, &DVector::from_element(1, 2.0 / 3.0), &y, 1e-9).unwrap();
        assert_relative_eq!(w.0, DVector::from_element(3, 1.0 / 3.0), epsilon = 1e-15);
        let w = weight_of_point(&t, &DVector::from_element(1, 0.8), &y, 1e-9).unwrap();
        assert_relative_eq!(w.0, DVector::from_vec(vec![0.2, 0.4, 0.4]), epsilon = 1e-15);
        let y0 = DVector::from_vec(vec![1.0, 1.0 / 6.0, 5.0 / 6.0]);
        let w = weight_of_point(&t, &DVector::from_element(1, 0.5), &y0, 1e-9).unwrap();
        assert_relative_eq!(w.0, DVector::from_vec(vec![0.5, 1.0 / 12.0, 5.0 / 12.0]), epsilon = 1e-15);
    }

    #[test]
    fn weight_of_point_rejects_non_centric() {
        let t = triangle();
        let y = DVector::from_vec(vec![1.0, 0.7, 0.5]);
        assert!(matches!(
            weight_of_point(&t, &DVector::from_element(1, 0.5), &y, 1e-9),
            Err(WacError::NotCentric(_))
        ));
    }
}
