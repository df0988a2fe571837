//! Violation bounds for rows with bounded symmetric perturbations, and the
//! report table the CLI prints.

use nalgebra::DVector;
use robust_wac::prob_bounds::{binomial_tail_bound, feasibility_report, hoeffding_bound, RowUncertainty, UncertaintySpec};
use robust_wac::wac::{weighted_center, CenterOptions, Polytope};

fn main() {
    for (n, delta) in [(10u64, 0.3), (20, 0.5), (100, 0.25)] {
        let b = binomial_tail_bound(n, delta * n as f64);
        let h = hoeffding_bound(delta, &vec![1.0; n as usize]);
        println!("N = {n:3}, delta = {delta:.2}: binomial {b:.4e}, Hoeffding {h:.4e}");
    }

    let poly = Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0]);
    let center = weighted_center(&poly, &DVector::from_vec(vec![0.5, 0.25, 0.25]), &CenterOptions::default(), None).unwrap();
    let unc = UncertaintySpec::new(true)
        .with_row(0, RowUncertainty::equal(10, 0.12))
        .with_row(1, RowUncertainty { delta: vec![0.3, 0.2, 0.2], n: 3 });
    let report = feasibility_report(&center, &unc).unwrap();
    print!("{}", report.to_table());
}
