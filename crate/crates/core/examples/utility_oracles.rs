//! Utility families, supergradients recovered from pairwise priorities and
//! the scaling check that decides when naive cuts are safe.

use nalgebra::DVector;
use robust_wac::utility::{approx_gradient, NdasReport, default_eps, ndas_check, probe_points, synthetic_priorities, two_piece_counterexample, UtilitySpec};

fn main() {
    let s = DVector::from_vec(vec![0.5, 1.5, 1.0]);
    let families = [
        UtilitySpec::LogWeighted { t: vec![0.2, 0.5, 0.3] },
        UtilitySpec::QuadraticPair { i: 0, j: 1 },
        two_piece_counterexample(),
    ];
    for spec in &families {
        let (value, g) = spec.evaluate(&s).unwrap();
        let eps = default_eps(&s);
        let p = synthetic_priorities(spec, &s, &eps).unwrap();
        let approx = approx_gradient(&p, &eps).unwrap();
        println!("{spec:?}\n  U = {value:.4}, g = {:.4?}, from priorities {:.4?}", g.as_slice(), approx.as_slice());
        match ndas_check(spec, 3, 2000, 1) {
            NdasReport::Pass { trials } => println!("  scaling check passed {trials} trials"),
            NdasReport::Counterexample { property, s, d, .. } => {
                println!("  scaling check fails property {property} at s = {:.3?}, d = {:.3?}", s.as_slice(), d.as_slice())
            }
        }
    }
    println!("{} probe points around s", probe_points(&s, &default_eps(&s)).len());
}
