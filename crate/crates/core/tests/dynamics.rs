use std::f64::consts::PI;

use proptest::prelude::*;

use nematic::diagnostics::velocity_l2sq_physical;
use nematic::harness::{parse_config, run};
use nematic::lcd::init::{DirectorInit, VelocityInit};
use nematic::lcd::{make_initial_conditions, DirectorPattern, InitSpec, ModelParams, TimeSpec, VelocityPattern};
use nematic::spectral::{divergence, GridSpec};

#[test]
fn gaussian_bump_follows_the_heat_kernel() {
    // Oracle: G_sigma * heat kernel = A (s^2/(s^2+2t))^{3/2} exp(-|x|^2/(2(s^2+2t))),
    // whose squared L^2 norm is A^2 (s^2/(s^2+2t))^3 (pi (s^2+2t))^{3/2}.
    let (a, sigma) = (0.1, 2.0);
    let c = parse_config(&format!(
        "[grid]\nn = 48\nbox_length = {}\n[model]\neta = 0.5\nlinear = true\n\
         [time]\ndt = 0.25\nt_end = 4.0\n[init]\nnormalize = false\n\
         [init.director]\nkind = \"gaussian-bump\"\nsigma = {sigma}\ndirection = [0.0, 1.0, 0.0]\namplitude = {a}\n",
        16.0 * PI
    ))
    .unwrap();
    let out = run(&c).unwrap();
    assert_eq!(out.records.len(), 17);
    for r in &out.records {
        let s2 = sigma * sigma + 2.0 * r.t;
        let exact = a * a * (sigma * sigma / s2).powi(3) * (PI * s2).powf(1.5);
        let got = r.lp_director[1].powi(2);
        assert!((got - exact).abs() <= 1e-10 * exact, "t = {}: {got} vs {exact}", r.t);
    }
    // Frozen from the formula above at t = 4: 0.1^2 (4/12)^3 (12 pi)^{3/2}.
    let last = out.records.last().unwrap().lp_director[1].powi(2);
    assert!((last - 8.5730017811e-2).abs() <= 1e-11);
}

#[test]
fn pure_heat_energy_matches_exact_mode_decay() {
    let c = parse_config(
        "seed = 4\n[grid]\nn = 16\nbox_length = 9.0\n[model]\nnu = 0.7\neta = 0.5\nlinear = true\n\
         [time]\ndt = 0.1\nt_end = 1.5\n\
         [init.velocity]\nkind = \"random\"\nkmax = 3\namplitude = 0.4\n\
         [init.director]\nkind = \"random\"\nkmax = 3\namplitude = 0.3\n",
    )
    .unwrap()
    .validated()
    .unwrap();
    let (s0, _) = make_initial_conditions(&c.init, &c.grid, &c.model).unwrap();
    let grid = c.grid;
    let l3 = grid.volume();
    let (u, d) = (s0.u.spectral().unwrap(), s0.d.spectral().unwrap());
    // Derivatives vanish on the Nyquist planes, so those modes neither carry
    // gradient energy nor decay.
    let xi = |i: usize| {
        let m = grid.mode_xy(i);
        if m.unsigned_abs() as usize == grid.n / 2 {
            0.0
        } else {
            2.0 * PI * m as f64 / grid.box_length
        }
    };
    let exact = |t: f64| {
        let mut e = 0.0;
        for ((ix, iy, iz), _) in u[0].indexed_iter() {
            let w = if iz == 0 || iz == grid.n / 2 { 1.0 } else { 2.0 };
            let kz = if iz == grid.n / 2 { 0.0 } else { 2.0 * PI * iz as f64 / grid.box_length };
            let k2 = xi(ix).powi(2) + xi(iy).powi(2) + kz * kz;
            for a in 0..3 {
                e += 0.5 * w * l3 * u[a][[ix, iy, iz]].norm_sqr() * (-2.0 * c.model.nu * k2 * t).exp();
                e += 0.5 * w * l3 * k2 * d[a][[ix, iy, iz]].norm_sqr() * (-2.0 * k2 * t).exp();
            }
        }
        e
    };
    let out = run(&c).unwrap();
    for r in &out.records {
        let e = exact(r.t);
        assert!((r.energy_basic - e).abs() <= 1e-10 * e, "t = {}: {} vs {e}", r.t, r.energy_basic);
    }
}

#[test]
fn velocity_norm_agrees_between_representations() {
    let c = parse_config(
        "seed = 9\n[grid]\nn = 16\nbox_length = 11.0\n[model]\neta = 0.5\n\
         [init.velocity]\nkind = \"random\"\nkmax = 4\namplitude = 0.5\n",
    )
    .unwrap()
    .validated()
    .unwrap();
    let (s, _) = make_initial_conditions(&c.init, &c.grid, &c.model).unwrap();
    let spectral = s.u.l2_norm_sq();
    let physical = velocity_l2sq_physical(&s).unwrap();
    assert!((spectral - physical).abs() <= 1e-11 * spectral);
}

fn velocity(kind: u8, amplitude: f64) -> VelocityInit {
    let pattern = match kind {
        0 => VelocityPattern::TaylorGreen,
        1 => VelocityPattern::GaussianJet {
            sigma: 1.5,
            direction: [1.0, 2.0, 0.5],
        },
        2 => VelocityPattern::CurlGaussian { sigma: 1.2 },
        _ => VelocityPattern::Random { kmax: 3 },
    };
    VelocityInit { pattern, amplitude }
}

fn director(kind: u8, amplitude: f64) -> DirectorInit {
    let pattern = match kind {
        0 => DirectorPattern::SineMode {
            mode: [1, -1, 2],
            direction: [1.0, 0.0, 0.0],
        },
        1 => DirectorPattern::GaussianBump {
            sigma: 1.5,
            direction: [0.0, 1.0, 1.0],
        },
        _ => DirectorPattern::Random { kmax: 2 },
    };
    DirectorInit { pattern, amplitude }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_data_satisfy_constraints(
        seed in any::<u64>(),
        vk in 0u8..4,
        dk in 0u8..3,
        ua in 0.0f64..2.0,
        da in 0.0f64..0.45,
    ) {
        let grid = GridSpec::cube(12, 8.0).unwrap();
        let params = ModelParams::new(1.0, 0.5, [0.3, 0.0, 1.0]).unwrap();
        let spec = InitSpec { velocity: velocity(vk, ua), director: director(dk, da), normalize: true, seed };
        let (s, report) = make_initial_conditions(&spec, &grid, &params).unwrap();
        let m = s.d.to_physical().unwrap().magnitude().unwrap();
        prop_assert!(m.iter().all(|v| (v - 1.0).abs() <= 1e-12));
        prop_assert!((report.d_max - 1.0).abs() <= 1e-12);
        let div = divergence(&s.u).unwrap().l2_norm_sq().sqrt();
        let grad: f64 = report.grad_u_l2;
        prop_assert!(div <= 1e-10 * grad.max(1e-300));
        let mean: f64 = s.u.spectral().unwrap().iter().map(|c| c[[0, 0, 0]].norm()).sum();
        prop_assert_eq!(mean, 0.0);
    }

    #[test]
    fn step_size_respects_both_limits(
        dt in 1e-4f64..1.0,
        cfl in 0.05f64..=1.0,
        vmax in 0.0f64..50.0,
        eta in 0.05f64..2.0,
        n in (4usize..40).prop_map(|h| 2 * h),
    ) {
        let grid = GridSpec::cube(n, 10.0).unwrap();
        let params = ModelParams::new(1.0, eta, [0.0, 0.0, 1.0]).unwrap();
        let spec = TimeSpec { dt, t_end: 1.0, cfl_safety: cfl, output_every: 1, scheme: Default::default(), clamp: true };
        let h = spec.step_size(&grid, &params, vmax);
        prop_assert!(h > 0.0 && h <= dt);
        prop_assert!(vmax * h <= cfl * grid.spacing() * (1.0 + 1e-12));
        prop_assert!(h <= cfl * eta * eta / 4.0 * (1.0 + 1e-12));
        let linear = spec.step_size(&grid, &params.linearized(), 0.0);
        prop_assert_eq!(linear, dt);
    }
}
