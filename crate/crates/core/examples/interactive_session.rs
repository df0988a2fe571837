//! An interactive session answered with pairwise priorities, then rewound
//! and exported.

use nalgebra::DVector;
use robust_wac::lp_model::AugmentedLp;
use robust_wac::session::{AnswerInput, Mode, Phase, Problem, Session, SessionConfig};
use robust_wac::wac::Polytope;

/// A DM who prefers large first slacks: priorities rise with `s_1`.
fn priorities(probes: &[DVector<f64>]) -> Vec<f64> {
    probes.iter().map(|p| 1.0 + p[0] + 0.2 * (p[1] * p[2]).ln()).map(|v| v.max(1e-3)).collect()
}

fn main() {
    let pentagon = Polytope::from_rows(5, 2, &[1.0, 0.0, 0.0, 1.0, -1.0, -1.0, -1.0, 0.3, 0.2, -1.0], &[1.0, 1.0, 1.2, 1.0, 1.0]);
    let mut session = Session::create(Problem::new(AugmentedLp::from_polytope(pentagon)), SessionConfig::default(), Mode::Interactive).unwrap();
    for _ in 0..6 {
        let Phase::AwaitingAnswer { query } = &session.phase else { break };
        let p = priorities(&query.probes);
        session.submit_answer(AnswerInput::Priorities { p, satisfied: false }).unwrap();
        if session.phase == Phase::ReadyToStep {
            session.step().unwrap();
        }
        let view = session.view();
        println!("iteration {}: s = {:.4?}", view.iteration, view.center.s.as_slice());
    }
    session.submit_answer(AnswerInput::Satisfied).unwrap();
    println!("stopped: {:?}", session.stop_reason());

    let rewound = session.fork(2).unwrap();
    println!("fork at iterate 2 reopens s = {:.4?}", rewound.run.current.s.as_slice());
    let text = session.to_json();
    assert_eq!(Session::from_json(&text).unwrap().to_json(), text);
    println!("export is {} bytes; trace has {} JSON lines", text.len(), session.trace_jsonl().lines().count());
}
