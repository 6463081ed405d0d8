//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `--nocapture` to see them). Every tolerance is pinned
//! here, in code.
//!
//!  1. mass conservation over 1000 IMEX steps within 1e-8
//!  2. v maximum principle on 20 randomized runs, no tolerance
//!  3. discrete lower bound min v >= min(v0)(1 + dt (m+1)^s)^-n, same runs
//!  4. homogeneous ODE oracle, error <= 5 dt and Richardson slope 1 +- 0.1
//!  5. decoupled heat oracle, spatial order in [1.8, 2.2]
//!  6. m-coincidence of m = 8 and m = 16 trajectories to 1e-12
//!  7. integral identities: pi^4 within 1% and gap slopes >= 1.8
//!  8. energy constant on homogeneous runs, nonincreasing under diffusion
//!  9. truncation algebra: seams, bounds, power gap, zero violations
//! 10. byte-identical diagnostics.csv across reruns

use chemotaxis_core::diagnostics::{collect, energy_residuals, verify_identity_boundary,
    verify_identity_sqrt_z, RunBaseline};
use chemotaxis_core::grid::{Field, Grid};
use chemotaxis_core::ops::{integrate, FluxScheme};
use chemotaxis_core::oracles::heat_eigen_solution;
use chemotaxis_core::solver::{run, Mode, ModelParams, SchemeParams, State};
use chemotaxis_core::truncation::{power_gap, Truncation};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

fn scheme(dt: f64, t_end: f64, lin_tol: f64) -> SchemeParams<f64> {
    SchemeParams { dt, t_end, flux: FluxScheme::Centered, lin_tol, lin_maxit: 50_000, mode: Mode::Imex }
}

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("[{}] {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion}: {detail}");
}

#[test]
fn criterion_01_mass_conservation() {
    let start = std::time::Instant::now();
    let g = Grid::unit_box(1, 128).unwrap();
    let u0 = Field::from_fn(&g, |x: f64, _, _| 1.0 + 0.5 * (PI * x).cos());
    let v0 = Field::from_fn(&g, |x: f64, _, _| 1.0 + 0.5 * (2.0 * PI * x).cos());
    let init = State::new(u0, v0).unwrap();
    let mass0 = integrate(&init.u);
    let mp = ModelParams::new(2.0, Truncation::Level(4), 1e-2).unwrap();
    let sp = scheme(1e-3, 1.0, 1e-12); // 1000 steps
    let mut worst: f64 = 0.0;
    run(init, &mp, &sp, 100, |_, st| {
        worst = worst.max((integrate(&st.u) - mass0).abs());
    })
    .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "criterion 1 — mass conservation",
        worst <= 1e-8 && elapsed < 5.0,
        &format!("max |drift| = {worst:.3e} (<= 1e-8) over 1000 steps in {elapsed:.2} s (< 5 s)"),
    );
}

/// The twenty randomized runs shared by criteria 2 and 3.
fn randomized_runs(mut check: impl FnMut(usize, &[(usize, f64, f64, f64)])) {
    let mut rng = StdRng::seed_from_u64(0x5eed_2024);
    for case in 0..20usize {
        let dim = if case % 5 < 3 { 1 } else { 2 };
        let n = if dim == 1 { 32 + 16 * (case % 4) } else { 12 + 4 * (case % 3) };
        let g = Grid::unit_box(dim, n).unwrap();
        let s = [1.0, 1.5, 2.0, 3.0][case % 4];
        let m = [2u32, 4, 8][case % 3];
        let dt = [5e-4, 1e-3][case % 2];
        let flux = if case % 2 == 0 { FluxScheme::Centered } else { FluxScheme::Upwind };
        let u_vals: Vec<f64> = (0..g.len()).map(|_| rng.random_range(0.2..3.0)).collect();
        let v_vals: Vec<f64> = (0..g.len()).map(|_| rng.random_range(0.05..2.0)).collect();
        let init = State::new(
            Field::from_values(&g, u_vals).unwrap(),
            Field::from_values(&g, v_vals).unwrap(),
        )
        .unwrap();
        let mp = ModelParams::new(s, Truncation::Level(m), 1e-2).unwrap();
        let mut sp = scheme(dt, 60.0 * dt, 1e-12);
        sp.flux = flux;
        let baseline = RunBaseline::from_state(&init);
        // rows: (step index, min_v, max_v, v_lower_bound_ref)
        let mut rows = Vec::new();
        run(init, &mp, &sp, 5, |k, st| {
            let row = collect(st, &mp, &sp, k, &baseline).unwrap();
            rows.push((k, row.min_v, row.max_v, row.v_lower_bound_ref));
        })
        .unwrap();
        check(case, &rows);
    }
}

#[test]
fn criterion_02_v_maximum_principle() {
    let mut checked = 0usize;
    randomized_runs(|case, rows| {
        for w in rows.windows(2) {
            assert!(
                w[1].2 <= w[0].2,
                "case {case}: max_v grew {} -> {} at step {}",
                w[0].2,
                w[1].2,
                w[1].0
            );
        }
        for r in rows {
            assert!(r.1 >= 0.0, "case {case}: min_v = {} < 0 at step {}", r.1, r.0);
        }
        checked += rows.len();
    });
    report(
        "criterion 2 — v maximum principle",
        true,
        &format!("max_v nonincreasing and min_v >= 0 at all {checked} recorded rows of 20 randomized runs"),
    );
}

#[test]
fn criterion_03_discrete_lower_bound() {
    let mut checked = 0usize;
    randomized_runs(|case, rows| {
        for r in rows {
            assert!(
                r.1 >= r.3,
                "case {case}: min_v = {} under reference bound {} at step {}",
                r.1,
                r.3,
                r.0
            );
        }
        checked += rows.len();
    });
    report(
        "criterion 3 — discrete lower bound",
        true,
        &format!("min_v >= min(v0)(1+dt(m+1)^s)^-n at all {checked} recorded rows"),
    );
}

#[test]
fn criterion_04_homogeneous_ode_oracle() {
    let exact = 3.0 * (-4.0_f64).exp();
    let mut errs = Vec::new();
    let dts = [1e-2, 5e-3, 2.5e-3];
    for &dt in &dts {
        let g = Grid::unit_box(1, 32).unwrap();
        let init = State::new(Field::constant(&g, 2.0), Field::constant(&g, 3.0)).unwrap();
        let mp = ModelParams::new(2.0, Truncation::Level(8), 1e-2).unwrap();
        let end = run(init, &mp, &scheme(dt, 1.0, 1e-12), usize::MAX, |_, _| {}).unwrap();
        let err = (end.v.values()[0] - exact).abs();
        assert!(err <= 5.0 * dt, "dt {dt}: err {err} > {}", 5.0 * dt);
        errs.push(err);
    }
    // least-squares Richardson slope over the three points
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let xb = xs.iter().sum::<f64>() / 3.0;
    let yb = ys.iter().sum::<f64>() / 3.0;
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - xb) * (y - yb)).sum::<f64>()
        / xs.iter().map(|x| (x - xb) * (x - xb)).sum::<f64>();
    report(
        "criterion 4 — homogeneous ODE oracle",
        (0.9..=1.1).contains(&slope),
        &format!("errors {errs:?} all <= 5 dt; Richardson slope {slope:.3} in [0.9, 1.1]"),
    );
}

#[test]
fn criterion_05_decoupled_heat_oracle() {
    // u = 0 decouples v into the heat equation; dt is scaled with h^2 so
    // the spatial error dominates at every level
    let t_end = 0.1;
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for (level, n) in [32usize, 64, 128, 256].into_iter().enumerate() {
        let g = Grid::unit_box(1, n).unwrap();
        let init = State::new(
            Field::constant(&g, 0.0),
            heat_eigen_solution(&g, 1.0, 0.5, 1, 0.0),
        )
        .unwrap();
        let mp = ModelParams::new(1.0, Truncation::Level(4), 1e-2).unwrap();
        let dt = 2e-3 / 4f64.powi(level as i32);
        let end = run(init, &mp, &scheme(dt, t_end, 1e-11), usize::MAX, |_, _| {}).unwrap();
        let exact = heat_eigen_solution(&g, 1.0, 0.5, 1, t_end);
        errs.push(end.v.max_abs_diff(&exact).unwrap());
        hs.push(1.0 / n as f64);
    }
    let xb = hs.iter().map(|h| h.ln()).sum::<f64>() / hs.len() as f64;
    let yb = errs.iter().map(|e| e.ln()).sum::<f64>() / errs.len() as f64;
    let order = hs
        .iter()
        .zip(&errs)
        .map(|(h, e)| (h.ln() - xb) * (e.ln() - yb))
        .sum::<f64>()
        / hs.iter().map(|h| (h.ln() - xb) * (h.ln() - xb)).sum::<f64>();
    report(
        "criterion 5 — decoupled heat oracle",
        (1.8..=2.2).contains(&order),
        &format!("errors {errs:?} over n = 32..256, spatial order {order:.3} in [1.8, 2.2]"),
    );
}

#[test]
fn criterion_06_m_coincidence() {
    let g = Grid::unit_box(1, 64).unwrap();
    let u0 = Field::from_fn(&g, |x: f64, _, _| 1.0 + 0.5 * (PI * x).cos());
    let v0 = Field::from_fn(&g, |x: f64, _, _| 1.0 + 0.5 * (PI * x).cos());
    let init = State::new(u0, v0).unwrap();
    let sp = scheme(1e-3, 0.2, 1e-12);

    let mut trajectories = Vec::new();
    let mut sup_u: f64 = 0.0;
    for m in [8u32, 16] {
        let mp = ModelParams::new(2.0, Truncation::Level(m), 1e-2).unwrap();
        let mut states = Vec::new();
        run(init.clone(), &mp, &sp, 10, |_, st| {
            sup_u = sup_u.max(st.u.max());
            states.push((st.u.clone(), st.v.clone()));
        })
        .unwrap();
        trajectories.push(states);
    }
    assert!(sup_u <= 3.0, "data not bounded by 3: sup u = {sup_u}");
    let mut gap: f64 = 0.0;
    for (a, b) in trajectories[0].iter().zip(&trajectories[1]) {
        gap = gap.max(a.0.max_abs_diff(&b.0).unwrap());
        gap = gap.max(a.1.max_abs_diff(&b.1).unwrap());
    }
    report(
        "criterion 6 — m-coincidence",
        gap <= 1e-12,
        &format!("sup u = {sup_u:.3} <= 3; m=8 vs m=16 trajectory gap {gap:e} <= 1e-12"),
    );
}

#[test]
fn criterion_07_integral_identities() {
    let pi4 = PI.powi(4);
    let mut hs = Vec::new();
    let mut gaps_b = Vec::new();
    let mut gaps_w = Vec::new();
    let mut lhs_finest = 0.0;
    for n in [32usize, 64, 128] {
        let g = Grid::unit_box(2, n).unwrap();
        let z = Field::from_fn(&g, |x: f64, y: f64, _| 2.0 + (PI * x).cos() * (PI * y).cos());
        let b = verify_identity_boundary(&z).unwrap();
        let w = verify_identity_sqrt_z(&z, 1.0).unwrap();
        hs.push(b.h);
        gaps_b.push(b.abs_gap);
        gaps_w.push(w.abs_gap);
        lhs_finest = b.lhs;
    }
    let slope = |gaps: &[f64]| (gaps[0] / gaps[2]).log2() / (hs[0] / hs[2]).log2();
    let sb = slope(&gaps_b);
    let sw = slope(&gaps_w);
    let lhs_ok = (lhs_finest - pi4).abs() / pi4 <= 0.01;
    report(
        "criterion 7 — integral identities",
        sb >= 1.8 && sw >= 1.8 && lhs_ok,
        &format!(
            "lhs(128) = {lhs_finest:.5} vs pi^4 = {pi4:.5} (within 1%: {lhs_ok}); gap slopes {sb:.3} and {sw:.3} >= 1.8"
        ),
    );
}

#[test]
fn criterion_08_energy_behavior() {
    // homogeneous run: E constant to 1e-12, all residuals <= 0 at C_fit = 0
    let g = Grid::unit_box(1, 32).unwrap();
    let init = State::new(Field::constant(&g, 2.0), Field::constant(&g, 3.0)).unwrap();
    let mp = ModelParams::new(2.0, Truncation::Level(8), 1e-2).unwrap();
    let sp = scheme(1e-3, 0.1, 1e-12);
    let baseline = RunBaseline::from_state(&init);
    let mut rows = Vec::new();
    run(init, &mp, &sp, 10, |k, st| {
        rows.push(collect(st, &mp, &sp, k, &baseline).unwrap());
    })
    .unwrap();
    let e0 = rows[0].energy;
    let drift = rows.iter().map(|r| (r.energy - e0).abs()).fold(0.0, f64::max);
    let res = energy_residuals(&rows, 0.0).unwrap();
    let homog_ok = drift <= 1e-12
        && res.c_fit == 0.0
        && res.residuals.iter().all(|&r| r <= 0.0);

    // pure diffusion run: E strictly nonincreasing
    let v0 = Field::from_fn(&g, |x: f64, _, _| 1.0 + 0.5 * (PI * x).cos());
    let init = State::new(Field::constant(&g, 0.0), v0).unwrap();
    let mp_d = ModelParams::new(1.0, Truncation::Level(4), 1e-2).unwrap();
    let baseline = RunBaseline::from_state(&init);
    let mut energies = Vec::new();
    run(init, &mp_d, &sp, 10, |k, st| {
        energies.push(collect(st, &mp_d, &sp, k, &baseline).unwrap().energy);
    })
    .unwrap();
    let diffusion_ok = energies.windows(2).all(|w| w[1] < w[0]);

    report(
        "criterion 8 — energy behavior",
        homog_ok && diffusion_ok,
        &format!(
            "homogeneous: |E - E0| <= {drift:e}, C_fit = {}, residuals <= 0: {}; diffusion: E strictly decreasing over {} rows",
            res.c_fit,
            res.residuals.iter().all(|&r| r <= 0.0),
            energies.len()
        ),
    );
}

#[test]
fn criterion_09_truncation_algebra() {
    let mut violations = 0usize;

    // C2 seams: the seam arguments themselves evaluate exactly to the values
    // both adjacent pieces prescribe
    for m in [1u32, 4, 12] {
        let t = Truncation::Level(m);
        let mf = m as f64;
        let seam_checks = [
            (-1.0, -1.0, 0.0, 0.0),
            (0.0, 0.0, 1.0, 0.0),
            (mf, mf, 1.0, 0.0),
            (mf + 2.0, mf + 1.0, 0.0, 0.0),
        ];
        for (u, a, ap, app) in seam_checks {
            if (t.eval_a(u) - a).abs() > 1e-12
                || (t.eval_a_prime(u) - ap).abs() > 1e-12
                || (t.eval_a_second(u) - app).abs() > 1e-12
            {
                violations += 1;
            }
        }
        // one-sided limits approach the seam values at the expected rate
        for (u, _, ap, _) in seam_checks {
            for eps in [1e-6, 1e-7] {
                let lim = 3.75 * eps + 1e-12;
                if (t.eval_a_prime(u - eps) - ap).abs() > lim
                    || (t.eval_a_prime(u + eps) - ap).abs() > lim
                {
                    violations += 1;
                }
            }
        }
    }

    // bound checks on a dense sample plus random arguments
    let mut rng = StdRng::seed_from_u64(0xa110f17);
    for m in [1u32, 3, 8, 40] {
        let t = Truncation::Level(m);
        let mf = m as f64;
        let dense = (0..=20_000).map(|i| -3.0 + (mf + 6.0) * i as f64 / 20_000.0);
        let random = (0..5_000).map(|_| rng.random_range(-3.0..mf + 4.0));
        for u in dense.chain(random) {
            let a = t.eval_a(u);
            let ap = t.eval_a_prime(u);
            let app = t.eval_a_second(u);
            if a.abs() > mf + 1.0 || !(0.0..=23.0 / 16.0).contains(&ap) || app.abs() > 3.75 {
                violations += 1;
            }
            if u >= 0.0 && a > u {
                violations += 1;
            }
        }
    }

    // Lemma-9 style power gap over 1e5 random triples
    for _ in 0..100_000 {
        let w1 = rng.random_range(0.0..100.0);
        let w2 = rng.random_range(0.0..100.0);
        let s = rng.random_range(1.0..5.0);
        let (lhs, rhs) = power_gap(w1, w2, s);
        if lhs > rhs {
            violations += 1;
        }
    }

    report(
        "criterion 9 — truncation algebra",
        violations == 0,
        &format!("{violations} violations across seam, bound and power-gap checks"),
    );
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let outdir = dir.path().join(format!("out{i}"));
        let cfg_path = dir.path().join(format!("cfg{i}.cfg"));
        std::fs::write(
            &cfg_path,
            format!(
                "dim=1\nn=96\nextent=1\nt_end=0.05\ndt=5e-4\ns=2\nm=6\nu0=eigen 1.5 0.5 1\nv0=eigen 1 0.5 2\nevery=10\nlin_tol=1e-11\noutdir={}\n",
                outdir.display()
            ),
        )
        .unwrap();
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_chemotaxis"))
            .arg("run")
            .arg(&cfg_path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(outdir.join("diagnostics.csv")).unwrap());
    }
    report(
        "criterion 10 — determinism",
        outputs[0] == outputs[1],
        &format!("two runs of one config: {} bytes, byte-identical", outputs[0].len()),
    );
}
