//! A two-piece utility on the unit interval. Cuts with normal `Y⁻¹g` drop
//! every weight of the optimum after two steps, while the anchored u-cuts
//! keep `Y⁰s_opt` for the whole run.

use nalgebra::DVector;
use robust_wac::cutting_plane::{naive_cut, run_w_space, RunConfig, Strategy};
use robust_wac::lp_model::AugmentedLp;
use robust_wac::utility::{two_piece_counterexample, SyntheticOracle};
use robust_wac::wac::{CenterTriple, Polytope};

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn main() {
    let p = Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0]);
    let spec = two_piece_counterexample();
    let c0 = CenterTriple::from_parts(&p, v(&[0.6]), v(&[1.0, 1.0 / 6.0, 5.0 / 6.0]));
    let c1 = CenterTriple::from_parts(&p, v(&[0.4]), v(&[1.0, 0.475, 0.525]));
    let cuts: Vec<_> = [&c0, &c1].iter().map(|c| naive_cut(c, &spec.evaluate(&c.s).unwrap().1)).collect();
    let kept = (0..=100)
        .map(|i| v(&[0.5, i as f64 / 200.0, (100 - i) as f64 / 200.0]))
        .filter(|w| cuts.iter().all(|c| c.margin(w) >= 0.0))
        .count();
    println!("naive cuts keep {kept} of 101 sampled optimal weights");

    let mut dm = SyntheticOracle::new(spec);
    let config = RunConfig { strategy: Strategy::TowardScaledGradient, w0: Some(v(&[0.4, 0.1, 0.5])), max_iter: 60, ..RunConfig::default() };
    let trace = run_w_space(&AugmentedLp::from_polytope(p), &mut dm, &config).unwrap();
    let target = trace.y0.component_mul(&v(&[0.5, 0.5, 0.5]));
    let worst = trace.entries.iter().filter_map(|e| e.cut.as_ref()).map(|c| c.margin(&target)).fold(f64::INFINITY, f64::min);
    println!("u-cuts: {} iterations, smallest margin at Y0 s_opt {worst:.2e}", trace.entries.len());
    println!("final x = {:.8}", trace.last().unwrap().center.x[0]);
}
