//! A DM who judges two driving factors instead of every slack. Answers in
//! factor space are lifted through `Cᵀ`.

use nalgebra::DMatrix;
use robust_wac::lp_model::AugmentedLp;
use robust_wac::session::{Mode, Problem, Session, SessionConfig};
use robust_wac::utility::{QueryKind, UtilitySpec};
use robust_wac::cutting_plane::RunConfig;
use robust_wac::wac::Polytope;

fn main() {
    let pentagon = Polytope::from_rows(5, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, -1.0, -1.0, 0.3, 0.2, -1.0], &[1.0, 1.0, 1.2, 1.0, 1.0]);
    // ξ₁ = s₁ + s₂ and ξ₂ = s₃.
    let factors = DMatrix::from_row_slice(2, 5, &[1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    let problem = Problem { factors: Some(factors), ..Problem::new(AugmentedLp::from_polytope(pentagon)) };
    let config = SessionConfig { run: RunConfig { max_iter: 40, ..RunConfig::default() }, question: QueryKind::PairwisePriorities };
    let mode = Mode::Simulated { utility: UtilitySpec::LogWeighted { t: vec![0.7, 0.3] } };
    let mut session = Session::create(problem, config, mode).unwrap();
    session.step().unwrap();
    let view = session.view();
    println!("{} iterations, stop {:?}", view.iteration, session.stop_reason());
    println!("factors {:.4?}, slacks {:.4?}", view.factors.unwrap().as_slice(), view.center.s.as_slice());
}
