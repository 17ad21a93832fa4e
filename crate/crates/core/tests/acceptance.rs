//! Acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::Command;

use nematic::diagnostics::{fit_decay, gn_check};
use nematic::harness::{parse_config, run, run_to_dir, truncation_study, Quantity, RunConfig, RunStatus, TruncationStudy};
use nematic::lcd::{make_initial_conditions, step_imex, ModelParams, Scheme, State};
use nematic::spectral::{
    dealias, divergence, gradient, leray_project, vector_laplacian, GridSpec, ScalarField, SpectralMask,
    VectorField, apply_mask, partial,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Writes straight to stderr so the line shows up without `--nocapture`.
fn report(n: u32, passed: bool, detail: String) {
    let line = format!("criterion {n}: {} {detail}\n", if passed { "PASS" } else { "FAIL" });
    std::io::stderr().write_all(line.as_bytes()).unwrap();
    assert!(passed, "criterion {n}: {detail}");
}

fn config(text: &str) -> RunConfig {
    parse_config(text).expect("valid test configuration")
}

#[test]
fn criterion_1_stationary_state() {
    let c = config("[grid]\nn = 32\nbox_length = 20.0\n[time]\ndt = 0.01\nt_end = 1.0\n");
    let out = run(&c).unwrap();
    let u = out.records.iter().map(|r| r.velocity_l2sq.sqrt()).fold(0.0, f64::max);
    let d = out.records.iter().map(|r| r.lp_director[1]).fold(0.0, f64::max);
    let steps = out.summary.steps;
    report(
        1,
        steps == 100 && u <= 1e-14 && d <= 1e-14,
        format!("{steps} steps, max ||u|| = {u:e}, max ||d - w0|| = {d:e}"),
    );
}

#[test]
fn criterion_2_linear_oracle() {
    let (a, l) = (0.3, 2.0 * PI);
    let c = config(&format!(
        "[grid]\nn = 32\nbox_length = {l}\n[model]\neta = 0.5\nlinear = true\n[time]\ndt = 0.01\nt_end = 1.0\n\
         [init]\nnormalize = false\n[init.director]\nkind = \"sine-mode\"\nmode = [1, 0, 0]\n\
         direction = [1.0, 0.0, 0.0]\namplitude = {a}\n"
    ));
    let out = run(&c).unwrap();
    let k2 = (2.0 * PI / l).powi(2);
    let worst = out
        .records
        .iter()
        .map(|r| {
            let exact = a * (-k2 * r.t).exp() * (l.powi(3) / 2.0).sqrt();
            (r.lp_director[1] - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    report(
        2,
        worst <= 1e-8,
        format!("{} samples, max relative error {worst:e}", out.records.len()),
    );
}

fn energy_run(dt: f64) -> (f64, f64) {
    let c = config(&format!(
        "[grid]\nn = 48\nbox_length = {}\n[model]\neta = 0.5\n[time]\ndt = {dt}\nt_end = 2.0\n\
         scheme = \"predictor-corrector\"\n\
         [init.velocity]\nkind = \"gaussian-jet\"\nsigma = 4.0\ndirection = [1.0, 0.0, 0.0]\namplitude = 0.05\n\
         [init.director]\nkind = \"gaussian-bump\"\nsigma = 4.0\ndirection = [1.0, 1.0, 0.0]\namplitude = 0.2\n",
        16.0 * PI
    ));
    let out = run(&c).unwrap();
    let audit = out.summary.audit.unwrap();
    (audit.max_violation, audit.initial_energy)
}

#[test]
fn criterion_3_energy_law() {
    let (coarse, e0) = energy_run(0.02);
    let (fine, _) = energy_run(0.01);
    let ratio = coarse / fine;
    report(
        3,
        ratio >= 3.0 && fine <= 1e-6 * e0,
        format!("violation {coarse:e} -> {fine:e} (ratio {ratio:.2}), E(0) = {e0:e}"),
    );
}

#[test]
fn criterion_4_maximum_principle() {
    let c = config(&format!(
        "[grid]\nn = 32\nbox_length = {}\n[time]\ndt = 0.02\nt_end = 3.0\n\
         scheme = \"predictor-corrector\"\n\
         [init.velocity]\nkind = \"curl-gaussian\"\nsigma = 4.0\namplitude = 0.3\n\
         [init.director]\nkind = \"gaussian-bump\"\nsigma = 4.0\ndirection = [1.0, 0.0, 0.0]\namplitude = 0.6\n\
         [checks]\nsmallness = 1e9\n",
        12.0 * PI
    ));
    let out = run(&c).unwrap();
    let d_max = out.records.iter().map(|r| r.d_max).fold(0.0, f64::max);
    let d_min = out.records.iter().map(|r| r.d_min).fold(f64::INFINITY, f64::min);
    report(
        4,
        (out.init.d_max - 1.0).abs() <= 1e-14 && d_max <= 1.0 + 1e-6 && d_min >= 0.5 && out.status() == RunStatus::Completed,
        format!("max|d0| = {}, max|d| = {d_max}, min|d| = {d_min}", out.init.d_max),
    );
}

fn random_band_limited(grid: GridSpec, radius: f64, rng: &mut ChaCha8Rng) -> VectorField {
    let comps = [(); 3].map(|_| {
        let values = ndarray::Array3::from_shape_simple_fn(grid.physical_shape(), || rng.gen_range(-1.0..1.0));
        ScalarField::from_physical(grid, values).unwrap()
    });
    let v = VectorField::from_components(comps).unwrap().forward().unwrap();
    apply_mask(&v, &SpectralMask::ball(&grid, radius)).unwrap()
}

#[test]
fn criterion_5_gagliardo_nirenberg() {
    let grid = GridSpec::cube(16, 2.0 * PI).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let radius = 1.0 + (i % 7) as f64;
        worst = worst.max(gn_check(&random_band_limited(grid, radius, &mut rng)).unwrap());
    }
    let mut single = 0.0f64;
    for m in [[1, 0, 0], [0, 2, 1], [3, -1, 2], [-2, 4, 0]] {
        let k = m.map(|c| c as f64);
        let v = VectorField::from_fn(grid, |x| {
            let phase = k[0] * x[0] + k[1] * x[1] + k[2] * x[2];
            [phase.sin(), 0.0, phase.cos()]
        })
        .forward()
        .unwrap();
        single = single.max((gn_check(&v).unwrap() - 1.0).abs());
    }
    report(
        5,
        worst <= 1.0 && single <= 1e-12,
        format!("max ratio over 1000 fields {worst}, single-mode |ratio - 1| <= {single:e}"),
    );
}

#[test]
fn criterion_6a_synthetic_fits() {
    let mut worst = 0.0f64;
    for q in Quantity::DECAYING {
        let alpha = q.target().unwrap();
        let s: Vec<(f64, f64)> = (0..64).map(|i| {
            let t = 0.5 * i as f64;
            (t, 2.5 * (1.0 + t).powf(alpha))
        })
        .collect();
        worst = worst.max((fit_decay(&s, [1.0, 30.0]).unwrap().exponent - alpha).abs());
    }
    report(6, worst <= 1e-9, format!("(a) max exponent error {worst:e}"));
}

#[test]
fn criterion_6b_truncation_trends() {
    let base = config(&format!(
        "[grid]\nn = 24\nbox_length = {}\n[model]\neta = 1.0\n[time]\ndt = 0.05\nt_end = 1.0\n\
         scheme = \"predictor-corrector\"\n\
         [init.velocity]\nkind = \"gaussian-jet\"\nsigma = 1.4142135623730951\ndirection = [0.0, 0.0, 1.0]\namplitude = 0.02\n\
         [init.director]\nkind = \"gaussian-bump\"\nsigma = 1.4142135623730951\ndirection = [1.0, 0.0, 0.0]\namplitude = 0.05\n",
        8.0 * PI
    ));
    let study = TruncationStudy::new(base, vec![8.0 * PI, 16.0 * PI, 32.0 * PI]);
    let (r, _) = truncation_study(&study).unwrap();
    let d = r.trend(Quantity::DL2sq).unwrap();
    let u = r.trend(Quantity::UL2sq).unwrap();
    report(
        6,
        d.toward_target && u.toward_target,
        format!(
            "(b) d_l2sq exponents {:?} toward -1.5: {}; u_l2sq exponents {:?} toward [-1.5, -0.5]: {}",
            d.exponents, d.toward_target, u.exponents, u.toward_target
        ),
    );
}

fn splitting_run(n: usize) -> nematic::harness::RunOutcome {
    run(&config(&format!(
        "[grid]\nn = {n}\nbox_length = {}\n[model]\neta = 1.0\n[time]\ndt = 0.05\nt_end = 8.0\n\
         scheme = \"predictor-corrector\"\n\
         [init.velocity]\nkind = \"gaussian-jet\"\nsigma = 3.0\ndirection = [0.0, 1.0, 0.0]\namplitude = 0.05\n\
         [init.director]\nkind = \"gaussian-bump\"\nsigma = 3.0\ndirection = [1.0, 0.0, 0.0]\namplitude = 0.2\n",
        16.0 * PI
    )))
    .unwrap()
}

#[test]
fn criterion_7_fourier_splitting() {
    let coarse = splitting_run(32);
    let fine = splitting_run(64);
    let low: Vec<f64> = coarse.records.iter().filter_map(|r| r.lowmode_sup).collect();
    let half = low.len() / 2;
    let first = low[..half].iter().copied().fold(0.0, f64::max);
    let second = low[half..].iter().copied().fold(0.0, f64::max);
    let g_c = coarse.records.last().unwrap().g_ratio_sup;
    let g_f = fine.records.last().unwrap().g_ratio_sup;
    let change = match (g_c, g_f) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() && a > 0.0 => (b - a).abs() / a,
        _ => f64::INFINITY,
    };
    report(
        7,
        low.len() >= 2 && second <= 1.1 * first && change <= 0.1,
        format!(
            "lowmode_sup halves {first:e} / {second:e}; g_ratio_sup n=32 {g_c:?}, n=64 {g_f:?} (change {change:e})"
        ),
    );
}

/// Fully explicit RK4 for the same semi-discrete system, written against the
/// spectral operators only.
fn oracle_rhs(u: &VectorField, d: &VectorField, params: &ModelParams) -> (VectorField, VectorField) {
    let grid = *u.grid();
    let up = u.to_physical().unwrap();
    let dp = d.to_physical().unwrap();
    let grads: Vec<[Vec<f64>; 3]> = (0..3)
        .map(|a| {
            let g = gradient(d.component(a)).unwrap().to_physical().unwrap();
            [0, 1, 2].map(|j| g.component(j).physical().unwrap().iter().copied().collect())
        })
        .collect();
    let ugrads: Vec<[Vec<f64>; 3]> = (0..3)
        .map(|a| {
            let g = gradient(u.component(a)).unwrap().to_physical().unwrap();
            [0, 1, 2].map(|j| g.component(j).physical().unwrap().iter().copied().collect())
        })
        .collect();
    let uv: [Vec<f64>; 3] = [0, 1, 2].map(|j| up.component(j).physical().unwrap().iter().copied().collect());
    let dv: [Vec<f64>; 3] = [0, 1, 2].map(|j| dp.component(j).physical().unwrap().iter().copied().collect());
    let len = uv[0].len();
    let shape = grid.physical_shape();
    let to_field = |v: Vec<f64>| ScalarField::from_physical(grid, ndarray::Array3::from_shape_vec(shape, v).unwrap()).unwrap();

    let mut du = Vec::new();
    let mut dd = Vec::new();
    for i in 0..3 {
        let adv: Vec<f64> = (0..len).map(|p| (0..3).map(|j| uv[j][p] * ugrads[i][j][p]).sum()).collect();
        let mut stress = to_field(vec![0.0; len]).forward().unwrap();
        for j in 0..3 {
            let t: Vec<f64> = (0..len).map(|p| (0..3).map(|a| grads[a][i][p] * grads[a][j][p]).sum()).collect();
            let dj = partial(&to_field(t).forward().unwrap(), j).unwrap();
            stress = ScalarField::from_spectral(grid, stress.spectral().unwrap() + dj.spectral().unwrap()).unwrap();
        }
        let adv = to_field(adv).forward().unwrap();
        du.push(ScalarField::from_spectral(grid, -(adv.spectral().unwrap() + stress.spectral().unwrap())).unwrap());

        let transport: Vec<f64> = (0..len).map(|p| (0..3).map(|j| uv[j][p] * grads[i][j][p]).sum()).collect();
        let force: Vec<f64> = (0..len)
            .map(|p| {
                let s = dv[0][p].powi(2) + dv[1][p].powi(2) + dv[2][p].powi(2);
                (s - 1.0) * dv[i][p] / (params.eta * params.eta)
            })
            .collect();
        let transport = to_field(transport).forward().unwrap();
        let force = to_field(force).forward().unwrap();
        dd.push(ScalarField::from_spectral(grid, -(transport.spectral().unwrap() + force.spectral().unwrap())).unwrap());
    }
    let du = leray_project(&dealias(&VectorField::from_components(du.try_into().unwrap()).unwrap()).unwrap()).unwrap();
    let dd = dealias(&VectorField::from_components(dd.try_into().unwrap()).unwrap()).unwrap();
    let lu = vector_laplacian(u).unwrap();
    let ld = vector_laplacian(d).unwrap();
    (axpy(&du, params.nu, &lu), axpy(&dd, 1.0, &ld))
}

fn axpy(a: &VectorField, s: f64, b: &VectorField) -> VectorField {
    let (x, y) = (a.spectral().unwrap(), b.spectral().unwrap());
    let comps = [0, 1, 2].map(|i| ScalarField::from_spectral(*a.grid(), x[i] + &y[i].mapv(|z| z * s)).unwrap());
    VectorField::from_components(comps).unwrap()
}

fn rk4(u: &VectorField, d: &VectorField, params: &ModelParams, dt: f64, steps: usize) -> (VectorField, VectorField) {
    let (mut u, mut d) = (u.clone(), d.clone());
    for _ in 0..steps {
        let (k1u, k1d) = oracle_rhs(&u, &d, params);
        let (k2u, k2d) = oracle_rhs(&axpy(&u, dt / 2.0, &k1u), &axpy(&d, dt / 2.0, &k1d), params);
        let (k3u, k3d) = oracle_rhs(&axpy(&u, dt / 2.0, &k2u), &axpy(&d, dt / 2.0, &k2d), params);
        let (k4u, k4d) = oracle_rhs(&axpy(&u, dt, &k3u), &axpy(&d, dt, &k3d), params);
        let su = axpy(&axpy(&axpy(&k1u, 2.0, &k2u), 2.0, &k3u), 1.0, &k4u);
        let sd = axpy(&axpy(&axpy(&k1d, 2.0, &k2d), 2.0, &k3d), 1.0, &k4d);
        u = axpy(&u, dt / 6.0, &su);
        d = axpy(&d, dt / 6.0, &sd);
    }
    (u, d)
}

fn deviation_norm(d: &VectorField, w0: [f64; 3]) -> f64 {
    let p = d.to_physical().unwrap();
    let mut s = 0.0;
    for a in 0..3 {
        s += p.component(a).physical().unwrap().iter().map(|v| (v - w0[a]).powi(2)).sum::<f64>();
    }
    (s * d.grid().cell_volume()).sqrt()
}

#[test]
fn criterion_8_dynamics_oracle() {
    let c = config(
        "seed = 8\n[grid]\nn = 16\nbox_length = 6.283185307179586\n[model]\neta = 1.0\n\
         [init.velocity]\nkind = \"random\"\nkmax = 2\namplitude = 0.3\n\
         [init.director]\nkind = \"random\"\nkmax = 2\namplitude = 0.3\n",
    )
    .validated()
    .unwrap();
    let params = c.model;
    let (s0, _) = make_initial_conditions(&c.init, &c.grid, &params).unwrap();
    let s0 = State::new(dealias(&s0.u).unwrap(), dealias(&s0.d).unwrap(), 0.0).unwrap();
    let (dt, steps) = (0.01, 10);
    let mut s = s0.clone();
    for _ in 0..steps {
        s = step_imex(&s, &params, dt, Scheme::PredictorCorrector).unwrap();
    }
    let (u_ref, d_ref) = rk4(&s0.u, &s0.d, &params, dt / 100.0, 100 * steps);
    let u_err = (s.u.l2_norm_sq().sqrt() - u_ref.l2_norm_sq().sqrt()).abs() / u_ref.l2_norm_sq().sqrt();
    let d_exact = deviation_norm(&d_ref, params.w0);
    let d_err = (deviation_norm(&s.d, params.w0) - d_exact).abs() / d_exact;
    let div = divergence(&u_ref).unwrap().l2_norm_sq().sqrt();
    report(
        8,
        u_err <= 1e-5 && d_err <= 1e-5,
        format!("relative discrepancy ||u|| {u_err:e}, ||d - w0|| {d_err:e} (oracle div {div:e})"),
    );
}

fn identical_dirs(a: &Path, b: &Path) -> bool {
    let mut names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    names.iter().all(|p| {
        let q = b.join(p.file_name().unwrap());
        if p.is_dir() {
            identical_dirs(p, &q)
        } else {
            fs::read(p).unwrap() == fs::read(q).unwrap()
        }
    })
}

#[test]
fn criterion_9_determinism_and_blow_up() {
    let c = config(
        "seed = 42\n[grid]\nn = 16\nbox_length = 20.0\n[time]\ndt = 0.02\nt_end = 0.4\n\
         [init.velocity]\nkind = \"random\"\nkmax = 2\namplitude = 0.2\n\
         [init.director]\nkind = \"random\"\nkmax = 2\namplitude = 0.2\n",
    );
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_to_dir(&c, &a).unwrap();
    run_to_dir(&c, &b).unwrap();
    let same = identical_dirs(&a, &b) && identical_dirs(&b, &a);

    let blow = tmp.path().join("blow");
    fs::create_dir_all(&blow).unwrap();
    fs::write(
        blow.join("config.toml"),
        "seed = 1\n[grid]\nn = 16\nbox_length = 20.0\n[model]\neta = 0.1\n\
         [time]\ndt = 1.0\nt_end = 100.0\nclamp = false\n\
         [init.director]\nkind = \"random\"\nkmax = 3\namplitude = 0.5\n",
    )
    .unwrap();
    let out = blow.join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_lcsim"))
        .args(["run", "--config"])
        .arg(blow.join("config.toml"))
        .env("LCSIM_OUTPUT_DIR", &out)
        .output()
        .unwrap();
    let code = status.status.code();
    let rows = fs::read_to_string(out.join("records.csv")).map(|s| s.lines().count()).unwrap_or(0);
    report(
        9,
        same && code == Some(4) && rows >= 2,
        format!("repeat runs identical: {same}; blow-up exit {code:?} with {} CSV data rows", rows.saturating_sub(1)),
    );
}
