//! One PASS/FAIL line per acceptance criterion. Reference values come from
//! oracles written here, independent of the solver internals they check.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robust_wac::cutting_plane::{cut_normal, naive_cut, run_w_space, RunConfig, StationarityMeasure, Strategy};
use robust_wac::lp::{Cmp, LinearProgram, Sense};
use robust_wac::lp_model::{parse_mps, robust_box_baseline, to_inequality_form, validate, with_recession_bounds, AugmentedLp};
use robust_wac::prob_bounds::{binomial_tail_bound, binomial_tail_exact, enumerated_sign_tail};
use robust_wac::utility::{two_piece_counterexample, Margins, RobustBarrier, SyntheticOracle, UtilitySpec};
use robust_wac::wac::geometry::affine_dimension;
use robust_wac::wac::{centric_y, weight_of_point, weighted_center, CenterOptions, CenterTriple, Polytope};

type Outcome = Result<String, String>;

fn v(x: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(x)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn triangle() -> Polytope {
    Polytope::from_rows(3, 1, &[1.0, -1.0, -1.0], &[1.0, 0.0, 0.0])
}

/// A bounded polytope around a random interior point. Row `n` is minus the
/// sum of the first `n`, so the rows span positively.
fn random_polytope(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Polytope {
    assert!(m > n);
    loop {
        let mut a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        for j in 0..n {
            let sum: f64 = (0..n).map(|i| a[(i, j)]).sum();
            a[(n, j)] = -sum + rng.random_range(-0.1..0.1);
        }
        let x0 = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let b = &a * &x0 + DVector::from_fn(m, |_, _| rng.random_range(0.2..1.5));
        let poly = Polytope::new(a, b);
        if validate(&AugmentedLp::from_polytope(poly.clone())).ok() {
            return poly;
        }
    }
}

fn random_simplex(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    let w = DVector::from_fn(m, |_, _| rng.random_range(0.05..1.0));
    let sum = w.sum();
    w / sum
}

fn phi(poly: &Polytope, w: &DVector<f64>, x: &DVector<f64>) -> f64 {
    let s = poly.slacks(x);
    if s.iter().any(|&v| v <= 0.0) {
        return f64::INFINITY;
    }
    -s.iter().zip(w.iter()).map(|(s, w)| w * s.ln()).sum::<f64>()
}

/// Minimizes a unimodal `f` on `(lo, hi)`: a 64-point grid, then golden
/// section on the bracket around the best grid point.
fn grid_golden(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    const N: usize = 64;
    let h = (hi - lo) / N as f64;
    let pts: Vec<f64> = (0..N).map(|k| lo + (k as f64 + 0.5) * h).collect();
    let best = (0..N).min_by(|&i, &j| f(pts[i]).total_cmp(&f(pts[j]))).unwrap();
    let (mut a, mut b) = (pts[best] - h, pts[best] + h);
    a = a.max(lo);
    b = b.min(hi);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Feasible interval of coordinate `j` when the other coordinates of `x`
/// are fixed.
fn line_interval(poly: &Polytope, x: &DVector<f64>, j: usize) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..poly.m() {
        let aij = poly.a[(i, j)];
        let rest: f64 = (0..poly.n()).filter(|&k| k != j).map(|k| poly.a[(i, k)] * x[k]).sum();
        let r = poly.b[i] - rest;
        if aij > 0.0 {
            hi = hi.min(r / aij);
        } else if aij < 0.0 {
            lo = lo.max(r / aij);
        }
    }
    (lo, hi)
}

/// Range of `x_0` over a 2-D polytope from its feasible vertices.
fn x0_range(poly: &Polytope) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..poly.m() {
        for k in i + 1..poly.m() {
            let m2 = DMatrix::from_rows(&[poly.a.row(i).clone_owned(), poly.a.row(k).clone_owned()]);
            if let Some(p) = m2.lu().solve(&v(&[poly.b[i], poly.b[k]])) {
                if poly.slacks(&p).iter().all(|&s| s >= -1e-9) {
                    lo = lo.min(p[0]);
                    hi = hi.max(p[0]);
                }
            }
        }
    }
    (lo, hi)
}

/// Brute-force minimizer of `φ` for `n ≤ 2`.
fn brute_center(poly: &Polytope, w: &DVector<f64>) -> DVector<f64> {
    match poly.n() {
        1 => {
            let (lo, hi) = line_interval(poly, &v(&[0.0]), 0);
            v(&[grid_golden(lo, hi, |t| phi(poly, w, &v(&[t]))).0])
        }
        2 => {
            let inner = |x0: f64| {
                let (lo, hi) = line_interval(poly, &v(&[x0, 0.0]), 1);
                if hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
                    return (0.0, f64::INFINITY);
                }
                grid_golden(lo, hi, |t| phi(poly, w, &v(&[x0, t])))
            };
            let (lo, hi) = x0_range(poly);
            let (x0, _) = grid_golden(lo, hi, |t| inner(t).1);
            v(&[x0, inner(x0).0])
        }
        _ => unreachable!(),
    }
}

fn kkt(poly: &Polytope, c: &CenterTriple, w: &DVector<f64>) -> f64 {
    (poly.a.transpose() * w.component_div(&c.s)).amax()
}

fn weighted_center_vs_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let opts = CenterOptions::default();
    let (mut worst_x, mut worst_kkt) = (0.0f64, 0.0f64);
    let mut newton = std::time::Duration::ZERO;
    for case in 0..100 {
        let n = 1 + case % 2;
        let m = rng.random_range(n + 1..=5);
        let poly = random_polytope(&mut rng, n, m);
        let w = random_simplex(&mut rng, m);
        let start = Instant::now();
        let c = weighted_center(&poly, &w, &opts, None).map_err(|e| format!("case {case}: {e}"))?;
        newton += start.elapsed();
        let brute = brute_center(&poly, &w);
        worst_x = worst_x.max((&c.x - &brute).amax());
        worst_kkt = worst_kkt.max(kkt(&poly, &c, &w));
    }
    ensure(worst_x <= 1e-5, || format!("max |x - x_brute| = {worst_x:.2e}"))?;
    ensure(worst_kkt <= 1e-8, || format!("max KKT residual {worst_kkt:.2e}"))?;
    let secs = newton.as_secs_f64();
    ensure(secs < 5.0, || format!("Newton solves took {secs:.1} s"))?;
    Ok(format!("max |x - x_brute| {worst_x:.1e}, max KKT {worst_kkt:.1e}, solves {secs:.3} s"))
}

fn weight_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let opts = CenterOptions::default();
    let (mut worst_w, mut worst_x) = (0.0f64, 0.0f64);
    for case in 0..100 {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(n + 1..=7);
        let poly = random_polytope(&mut rng, n, m);
        let w = random_simplex(&mut rng, m);
        let c = weighted_center(&poly, &w, &opts, None).map_err(|e| format!("case {case}: {e}"))?;
        let back = weight_of_point(&poly, &c.x, &c.y, 1e-8).map_err(|e| format!("case {case}: {e}"))?;
        worst_w = worst_w.max((back.as_vector() - &w).amax());
        // Converse: a point between two centers, weighted against one
        // centric y, is the center of its weight.
        let other = weighted_center(&poly, &random_simplex(&mut rng, m), &opts, None).map_err(|e| e.to_string())?;
        let t = rng.random_range(0.1..0.9);
        let x = &c.x * t + &other.x * (1.0 - t);
        let y0 = centric_y(&poly).map_err(|e| e.to_string())?;
        let wx = weight_of_point(&poly, &x, &y0, 1e-8).map_err(|e| format!("case {case}: {e}"))?;
        let cx = weighted_center(&poly, wx.as_vector(), &opts, None).map_err(|e| e.to_string())?;
        worst_x = worst_x.max((&cx.x - &x).amax() / (1.0 + x.amax()));
    }
    ensure(worst_w <= 1e-7 && worst_x <= 1e-7, || format!("max weight error {worst_w:.2e}, max point error {worst_x:.2e}"))?;
    Ok(format!("max weight error {worst_w:.1e}, max point error {worst_x:.1e}"))
}

fn appendix_d_regression() -> Outcome {
    let p = triangle();
    let spec = two_piece_counterexample();
    let y0 = v(&[1.0, 1.0 / 6.0, 5.0 / 6.0]);
    let c0 = CenterTriple::from_parts(&p, v(&[0.6]), y0.clone());
    let c1 = CenterTriple::from_parts(&p, v(&[0.4]), v(&[1.0, 0.475, 0.525]));
    let g0 = spec.evaluate(&c0.s).map_err(|e| e.to_string())?.1;
    let g1 = spec.evaluate(&c1.s).map_err(|e| e.to_string())?.1;
    let cuts = [naive_cut(&c0, &g0), naive_cut(&c1, &g1)];
    let rows = [cuts[0].u.transpose(), cuts[1].u.transpose(), DVector::from_element(3, 1.0).transpose()];
    let w_star = DMatrix::from_rows(&rows).lu().solve(&v(&[cuts[0].rhs, cuts[1].rhs, 1.0])).ok_or("singular")?;
    ensure((&w_star - v(&[0.57, 0.185, 0.245])).amax() <= 5e-3, || format!("w* = {:?}", w_star.as_slice()))?;
    // W_{s_opt} is the segment (1/2, z/2, (1−z)/2); every point is cut off.
    for i in 0..=1000 {
        let z = i as f64 / 1000.0;
        let w = v(&[0.5, z / 2.0, (1.0 - z) / 2.0]);
        ensure(cuts.iter().any(|c| c.margin(&w) < 0.0), || format!("naive cuts keep w = {:?}", w.as_slice()))?;
    }
    let aug = AugmentedLp::from_polytope(p);
    let mut oracle = SyntheticOracle::new(spec);
    let config = RunConfig {
        strategy: Strategy::TowardScaledGradient,
        w0: Some(v(&[0.4, 0.1, 0.5])),
        max_iter: 60,
        ..RunConfig::default()
    };
    let trace = run_w_space(&aug, &mut oracle, &config).map_err(|f| f.error.to_string())?;
    let target = trace.y0.component_mul(&v(&[0.5, 0.5, 0.5]));
    let margins: Vec<f64> = trace.entries.iter().filter_map(|e| e.cut.as_ref().map(|c| c.margin(&target))).collect();
    let worst = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(margins.len() >= 50, || format!("only {} u-cuts", margins.len()))?;
    ensure(worst >= -1e-8, || format!("u-cut margin {worst:.2e}"))?;
    Ok(format!("w* = ({:.4}, {:.4}, {:.4}); {} u-cuts keep Y0 s_opt, min margin {worst:.1e}", w_star[0], w_star[1], w_star[2], margins.len()))
}

fn cut_consistency() -> Outcome {
    let p = triangle();
    let y0 = v(&[1.0, 1.0 / 6.0, 5.0 / 6.0]);
    let c1 = CenterTriple::from_parts(&p, v(&[0.4]), v(&[1.0, 0.475, 0.525]));
    let g1 = v(&[-1.0, 3.0, 0.0]);
    let cut = cut_normal(&c1, &g1, &y0, &p.a).map_err(|e| e.to_string())?;
    let s_opt = v(&[0.5, 0.5, 0.5]);
    let lhs = cut.u.dot(&(y0.component_mul(&s_opt) - &c1.w));
    let rhs = g1.dot(&(&s_opt - &c1.s));
    ensure((&cut.u - v(&[-1.6, 2.4, 2.4])).amax() <= 1e-9, || format!("u1 = {:?}", cut.u.as_slice()))?;
    ensure((lhs - 0.4).abs() <= 1e-9 && (rhs - 0.4).abs() <= 1e-9, || format!("lhs {lhs}, rhs {rhs}"))?;
    Ok(format!("u1 = (-1.6, 2.4, 2.4), both sides {lhs:.12}"))
}

fn log_utility_convergence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    let mut max_iters = 0;
    for case in 0..20 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(n + 1..=10);
        let poly = random_polytope(&mut rng, n, m);
        let t: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
        let tv = DVector::from_column_slice(&t);
        // The t-center is where Aᵀ(t/s) = 0; Newton on φ with weights t/Σt.
        let reference = weighted_center(&poly, &(&tv / tv.sum()), &CenterOptions::default(), None).map_err(|e| e.to_string())?;
        ensure(kkt(&poly, &reference, &tv) <= 1e-8, || format!("case {case}: reference is not stationary"))?;
        let mut oracle = SyntheticOracle::new(UtilitySpec::LogWeighted { t });
        let config = RunConfig { max_iter: 200, ..RunConfig::default() };
        let trace = run_w_space(&AugmentedLp::from_polytope(poly), &mut oracle, &config).map_err(|f| format!("case {case}: {}", f.error))?;
        let s = &trace.last().ok_or("empty trace")?.center.s;
        let rel = (s - &reference.s).norm() / reference.s.norm();
        worst = worst.max(rel);
        max_iters = max_iters.max(trace.entries.len());
    }
    ensure(worst <= 1e-3, || format!("max relative error {worst:.2e}"))?;
    Ok(format!("max relative error {worst:.1e}, at most {max_iters} iterations"))
}

fn bound_suite() -> Outcome {
    let start = Instant::now();
    for n in 1..=12u32 {
        for p in (0..=n).filter(|p| (p + n) % 2 == 0) {
            let exact = binomial_tail_exact(n as u64, p as f64);
            let enumerated = enumerated_sign_tail(n, p as f64);
            ensure(exact == enumerated, || format!("N={n} p={p}: {exact} vs {enumerated}"))?;
        }
        for k in 0..=(4 * n) {
            let p = k as f64 * 0.25;
            let exact = binomial_tail_exact(n as u64, p);
            ensure(exact >= enumerated_sign_tail(n, p), || format!("N={n} p={p} understates"))?;
            ensure(binomial_tail_bound(n as u64, p) >= rational_to_f64_down(&exact), || format!("N={n} p={p} rounding"))?;
        }
    }
    let mut worst = f64::NEG_INFINITY;
    for n in 1..=20u64 {
        for k in 1..=20 {
            let delta = k as f64 * 0.05;
            let b = binomial_tail_bound(n, delta * n as f64);
            let h = (-delta * delta * n as f64 / 2.0).exp();
            ensure(b <= h + 1e-12, || format!("N={n} delta={delta}: {b} > {h}"))?;
            worst = worst.max(b - h);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, || format!("took {secs:.1} s"))?;
    Ok(format!("exact and sound for N <= 12, max B - H {worst:.1e}, {secs:.2} s"))
}

fn rational_to_f64_down(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap().next_down()
}

/// `max cᵀx` subject to `a_iᵀx + â_iᵀ|x| ≤ b_i`, with `τ ≥ |x|`.
fn robust_lp(a: &DMatrix<f64>, a_hat: &DMatrix<f64>, b: &DVector<f64>, c: &DVector<f64>) -> f64 {
    let (m, n) = a.shape();
    let mut lp = LinearProgram::new(Sense::Maximize);
    lp.add_free_vars(c.as_slice());
    let tau = lp.add_free_vars(&vec![0.0; n]);
    for i in 0..m {
        let mut row: Vec<(usize, f64)> = (0..n).map(|j| (j, a[(i, j)])).collect();
        row.extend((0..n).map(|j| (tau.start + j, a_hat[(i, j)])));
        lp.add_row(row, Cmp::Le, b[i]);
    }
    for j in 0..n {
        lp.add_row(vec![(j, 1.0), (tau.start + j, -1.0)], Cmp::Le, 0.0);
        lp.add_row(vec![(j, -1.0), (tau.start + j, -1.0)], Cmp::Le, 0.0);
    }
    lp.solve().unwrap().objective
}

fn barrier_gap_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut worst = f64::NEG_INFINITY;
    for case in 0..10 {
        let m = 4;
        let mut a = DMatrix::from_row_slice(m, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0]);
        a.iter_mut().for_each(|v| *v += rng.random_range(-0.2..0.2));
        let b = DVector::from_fn(m, |_, _| rng.random_range(0.8..1.5));
        let a_hat = DMatrix::from_fn(m, 2, |_, _| rng.random_range(0.0..0.1));
        let c = DVector::from_fn(2, |_, _| rng.random_range(-1.0..1.0));
        let best = robust_lp(&a, &a_hat, &b, &c);
        for mu in [1e-2, 1e-3] {
            let rb = RobustBarrier { a: a.clone(), b: b.clone(), c: c.clone(), mu, margins: Margins::AbsLinear { a_hat: a_hat.clone() }, log_floor: 1e-9 };
            let hat = rb.maximize(None).map_err(|e| format!("case {case}: {e}"))?;
            let gap = best - hat.objective;
            ensure(gap <= m as f64 * mu + 1e-6, || format!("case {case} mu {mu}: gap {gap:.3e}"))?;
            worst = worst.max(gap / (m as f64 * mu));
        }
    }
    Ok(format!("largest gap is {worst:.2} of m*mu"))
}

fn netlib_desk_scale() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/adlittle.mps");
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let form = to_inequality_form(&parse_mps(&text).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let aug = form.embed(Some(1.5e5)).map_err(|e| e.to_string())?;
    // Dual inequality rows plus the objective floor.
    let shape = aug.polytope.a.shape();
    ensure(shape == (139, 56), || format!("converted shape {shape:?}"))?;
    let (aug, _) = with_recession_bounds(&aug, 1e7).map_err(|r| r.problems.join("; "))?;
    let mut oracle = SyntheticOracle::new(UtilitySpec::QuadraticPair { i: 1, j: 2 });
    let config = RunConfig {
        max_iter: 100,
        grad_tol: 1e-6,
        stationarity: StationarityMeasure::FullGradient,
        ..RunConfig::default()
    };
    let trace = run_w_space(&aug, &mut oracle, &config).map_err(|f| f.error.to_string())?;
    let last = trace.last().ok_or("empty trace")?;
    let u = last.value.ok_or("no utility value")?;
    let g = last.g.norm();
    ensure(u.abs() <= 1e-6 && g <= 1e-6, || format!("|U| {:.2e}, |g| {g:.2e} after {} iterations", u.abs(), trace.entries.len()))?;
    let (baseline, _) = robust_box_baseline(&form.lp, &[67, 70, 73], 0.2).map_err(|e| e.to_string())?;
    let rel = (baseline - 1.6894e5).abs() / 1.6894e5;
    ensure(rel <= 5e-3, || format!("baseline {baseline:.2} is {:.2}% off", 100.0 * rel))?;
    Ok(format!("139x56; U23 = {u:.1e}, |g| {g:.1e} in {} iterations; baseline {baseline:.1}", trace.entries.len()))
}

/// Orthonormal basis of `null(Aᵀ)` from a full SVD of `A`.
fn left_null(a: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, n) = a.shape();
    let padded = DMatrix::from_fn(m, m, |i, j| if j < n { a[(i, j)] } else { 0.0 });
    let svd = padded.svd(true, false);
    let u = svd.u.unwrap();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    DMatrix::from_columns(&order[n..].iter().map(|&k| u.column(k).clone_owned()).collect::<Vec<_>>())
}

fn geometry_invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let opts = CenterOptions::default();
    let mut fixtures = vec![triangle(), Polytope::from_rows(4, 1, &[1.0, -1.0, -1.0, 1.0], &[1.0, 0.0, 0.2, 1.5])];
    for _ in 0..8 {
        let n = rng.random_range(1..=3);
        let m = rng.random_range(n + 2..=7);
        fixtures.push(random_polytope(&mut rng, n, m));
    }
    let (mut orth, mut comb, mut sum_err, mut member) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (f, poly) in fixtures.iter().enumerate() {
        let (m, n) = (poly.m(), poly.n());
        let null = left_null(&poly.a);
        // Orthogonality: s − ŝ ∈ range(A) ⟂ null(Aᵀ).
        let c1 = weighted_center(poly, &random_simplex(&mut rng, m), &opts, None).map_err(|e| e.to_string())?;
        let c2 = weighted_center(poly, &random_simplex(&mut rng, m), &opts, None).map_err(|e| e.to_string())?;
        let ybar = &null * DVector::from_fn(m - n, |_, _| rng.random_range(-1.0..1.0));
        let ds = &c1.s - &c2.s;
        orth = orth.max(ds.dot(&ybar).abs() / (ybar.norm() * ds.norm()));
        // Combination law under a shared centric y⁰.
        let y0 = centric_y(poly).map_err(|e| e.to_string())?;
        let xs: Vec<DVector<f64>> = (0..3)
            .map(|_| {
                let t = random_simplex(&mut rng, m);
                weighted_center(poly, &t, &opts, None).map(|c| c.x)
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let beta = random_simplex(&mut rng, 3);
        let ws: Vec<DVector<f64>> = xs.iter().map(|x| y0.component_mul(&poly.slacks(x))).collect();
        let w: DVector<f64> = ws.iter().zip(beta.iter()).map(|(w, b)| w * *b).sum();
        let x_mix: DVector<f64> = xs.iter().zip(beta.iter()).map(|(x, b)| x * *b).sum();
        sum_err = sum_err.max((w.sum() - 1.0).abs());
        let cw = weighted_center(poly, &w, &opts, None).map_err(|e| e.to_string())?;
        comb = comb.max((&cw.x - &x_mix).norm() / (1.0 + x_mix.norm()));
        comb = comb.max((&cw.s - poly.slacks(&x_mix)).norm() / cw.s.norm());
        // Affine dimensions: W_y over varying s, W_s over varying centric y.
        let w_y: Vec<DVector<f64>> = (0..m + 3)
            .map(|_| {
                let d = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
                let x = &c1.x + &d * (0.5 * c1.s.min() / (&poly.a * &d).amax());
                y0.component_mul(&poly.slacks(&x))
            })
            .collect();
        let dim_y = affine_dimension(&w_y, 1e-8);
        ensure(dim_y == n, || format!("fixture {f}: dim W_y = {dim_y}, expected {n}"))?;
        // Directions z with Aᵀz = 0 and bᵀz = 0 keep y centric.
        let bn = null.transpose() * &poly.b;
        let keep = left_null(&DMatrix::from_column_slice(m - n, 1, bn.as_slice()));
        let dirs = &null * keep;
        let step = 0.3 * y0.min() / dirs.amax().max(1e-300);
        let w_s: Vec<DVector<f64>> = (0..m + 3)
            .map(|_| {
                let coef = DVector::from_fn(dirs.ncols(), |_, _| rng.random_range(-1.0..1.0) / dirs.ncols() as f64);
                c1.s.component_mul(&(&y0 + &dirs * coef * step))
            })
            .collect();
        let dim_s = affine_dimension(&w_s, 1e-8);
        ensure(dim_s == m - n - 1, || format!("fixture {f}: dim W_s = {dim_s}, expected {}", m - n - 1))?;
        // Membership in W_y: B Y⁻¹ w = B b.
        let bb = null.transpose() * &poly.b;
        for w in &w_y {
            member = member.max((null.transpose() * w.component_div(&y0) - &bb).amax());
        }
    }
    ensure(orth <= 1e-8, || format!("orthogonality {orth:.2e}"))?;
    ensure(comb <= 1e-7, || format!("combination law {comb:.2e}"))?;
    ensure(sum_err <= 1e-12, || format!("weight sum {sum_err:.2e}"))?;
    ensure(member <= 1e-8, || format!("W_y membership {member:.2e}"))?;
    Ok(format!("orthogonality {orth:.0e}, combination {comb:.0e}, sum {sum_err:.0e}, membership {member:.0e}, dimensions n and m-n-1"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("weighted center matches brute force on 100 instances", weighted_center_vs_brute_force),
        ("weight_of_point and weighted_center invert each other", weight_round_trip),
        ("naive cuts lose and u-cuts keep the two-piece optimum", appendix_d_regression),
        ("triangle cut-consistency identity", cut_consistency),
        ("log utility converges to the t-center on 20 instances", log_utility_convergence),
        ("binomial and Hoeffding bound suite", bound_suite),
        ("robust barrier gap within m*mu", barrier_gap_bound),
        ("ADLITTLE conversion, U23 run and robust baseline", netlib_desk_scale),
        ("geometry invariants", geometry_invariants),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail} [{secs:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{secs:.2} s]");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
