//! The barrier utility for interval uncertainty in the matrix entries. Its
//! maximizer is within `mμ` of the robust optimum.

use nalgebra::{DMatrix, DVector};
use robust_wac::utility::{Margins, RobustBarrier};

fn main() {
    // −1 ≤ x_j ≤ 1 with uncertain coefficients.
    let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
    let b = DVector::from_element(4, 1.0);
    let c = DVector::from_vec(vec![1.0, 0.5]);
    let a_hat = DMatrix::from_element(4, 2, 0.05);
    for mu in [1e-1, 1e-2, 1e-3] {
        let rb = RobustBarrier { a: a.clone(), b: b.clone(), c: c.clone(), mu, margins: Margins::AbsLinear { a_hat: a_hat.clone() }, log_floor: 1e-9 };
        let hat = rb.maximize(None).unwrap();
        println!(
            "mu = {mu:.0e}: x = ({:.5}, {:.5}), objective {:.6}, smallest robust margin {:.2e}, gap bound {:.0e}",
            hat.x[0],
            hat.x[1],
            hat.objective,
            hat.min_margin,
            4.0 * mu
        );
    }
}
