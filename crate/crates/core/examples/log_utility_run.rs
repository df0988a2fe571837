//! A simulated DM with a weighted-log utility: the weight-space run lands
//! on the utility's maximizer, which is the weighted center for `t`.

use nalgebra::DVector;
use robust_wac::cutting_plane::{run_w_space, RunConfig, Strategy};
use robust_wac::lp_model::AugmentedLp;
use robust_wac::utility::{SyntheticOracle, UtilitySpec};
use robust_wac::wac::{weighted_center, CenterOptions, Polytope};

fn main() {
    // A pentagon around the origin.
    let a = [1.0, 0.0, 0.0, 1.0, -1.0, -1.0, -1.0, 0.3, 0.2, -1.0];
    let poly = Polytope::from_rows(5, 2, &a, &[1.0, 1.0, 1.2, 1.0, 1.0]);
    let t = vec![0.1, 0.3, 0.2, 0.25, 0.15];
    let target = weighted_center(&poly, &DVector::from_vec(t.clone()), &CenterOptions::default(), None).unwrap();

    let aug = AugmentedLp::from_polytope(poly);
    for strategy in [Strategy::TowardScaledGradient, Strategy::AnalyticCenter] {
        let mut dm = SyntheticOracle::new(UtilitySpec::LogWeighted { t: t.clone() });
        let config = RunConfig { strategy, max_iter: 200, ..RunConfig::default() };
        let trace = run_w_space(&aug, &mut dm, &config).expect("run");
        let last = trace.last().unwrap();
        let err = (&last.center.s - &target.s).norm() / target.s.norm();
        println!("{strategy:?}: {} iterations, stop {:?}, relative slack error {err:.2e}", trace.entries.len(), trace.stop_reason);
    }
}
