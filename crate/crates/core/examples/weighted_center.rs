//! Weighted analytic centers of a small polytope and the converse map from
//! an interior point back to its weight.

use nalgebra::DVector;
use robust_wac::wac::{centric_y, find_interior_point, weight_of_point, weighted_center, CenterOptions, Polytope};

fn main() {
    // 0 ≤ x ≤ 1 written as x ≤ 1, −x ≤ 0, −x ≤ 0.
    let triangle = Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0]);
    let opts = CenterOptions::default();

    for w in [[1.0 / 3.0; 3], [0.4, 0.1, 0.5], [0.2, 0.4, 0.4]] {
        let w = DVector::from_row_slice(&w);
        let c = weighted_center(&triangle, &w, &opts, None).expect("bounded with interior");
        println!("w = {:?}\n  x = {:.6}  s = {:.6?}  y = {:.6?}", w.as_slice(), c.x[0], c.s.as_slice(), c.y.as_slice());
    }

    let x0 = find_interior_point(&triangle).unwrap();
    let y = centric_y(&triangle).unwrap();
    let w = weight_of_point(&triangle, &x0, &y, 1e-9).unwrap();
    let back = weighted_center(&triangle, w.as_vector(), &opts, None).unwrap();
    println!("interior point {:.6} has weight {:.6?}; its center is {:.6}", x0[0], w.as_vector().as_slice(), back.x[0]);
}
