//! ADLITTLE end to end: MPS parsing, conversion to inequality form, a
//! quadratic-pair run and the classical robust box baseline.
//!
//! Run with `cargo run --release --example adlittle [path/to/adlittle.mps]`.

use robust_wac::cutting_plane::{run_w_space, RunConfig, StationarityMeasure};
use robust_wac::lp_model::{parse_mps, robust_box_baseline, to_inequality_form, with_recession_bounds};
use robust_wac::utility::{SyntheticOracle, UtilitySpec};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/adlittle.mps").into());
    let inst = parse_mps(&std::fs::read_to_string(&path).expect("readable MPS")).expect("valid MPS");
    let form = to_inequality_form(&inst).unwrap();
    let aug = form.embed(Some(1.5e5)).unwrap();
    println!("{}: {}x{} in inequality form with the objective floor", inst.name.split_whitespace().next().unwrap_or(""), aug.num_rows(), aug.num_cols());
    let (aug, added) = with_recession_bounds(&aug, 1e7).unwrap();
    println!("recession repair added {added:?}");

    // s₂ and s₃ as close as possible; indices are 0-based here.
    let mut dm = SyntheticOracle::new(UtilitySpec::QuadraticPair { i: 1, j: 2 });
    let config = RunConfig { max_iter: 100, grad_tol: 1e-6, stationarity: StationarityMeasure::FullGradient, ..RunConfig::default() };
    let trace = run_w_space(&aug, &mut dm, &config).unwrap();
    let last = trace.last().unwrap();
    println!(
        "U23 = {:.3e} after {} iterations ({:?}), objective {:.2}",
        last.value.unwrap(),
        trace.entries.len(),
        trace.stop_reason,
        aug.reported_objective(&last.center.x)
    );

    let (baseline, _) = robust_box_baseline(&form.lp, &[67, 70, 73], 0.2).unwrap();
    println!("box-robust baseline with rows 68, 71, 74 shifted by 20%: {baseline:.2}");
}
