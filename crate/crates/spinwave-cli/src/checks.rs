//! The `oracle-check` battery: every closed-form quantity that has an
//! independent brute-force counterpart is compared against it, plus the
//! structural self-checks (symplectic condition, equation-of-motion
//! residual, initial criterion values).

use clap::ValueEnum;
use num_complex::Complex64;
use spinwave::{
    closed_form_vs_exact, duan_v, evolve_moments, exact_moments, fock_evolve, initial_moments,
    ode_residual, oscillation_period, spin_moments_bruteforce, tripartite_verdict,
    vlf_correlations, vlf_gains, BogoliubovTransform, CouplingParams, FockState, HamiltonianSpec,
    SpinConvention,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Level {
    /// Small truncations and sparse grids; about a second.
    Fast,
    /// Larger truncations, denser grids, and the truncation-30 evolution.
    Full,
}

struct Battery {
    failures: usize,
    total: usize,
}

impl Battery {
    fn new() -> Self {
        Battery {
            failures: 0,
            total: 0,
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: &str) {
        self.total += 1;
        if !pass {
            self.failures += 1;
        }
        println!(
            "check {name}: {} — {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
}

fn presets() -> Vec<CouplingParams> {
    vec![
        CouplingParams::bipartite(1.0, 0.3, 30.0).unwrap(),
        CouplingParams::bipartite(1.0, 1.1, 30.0).unwrap(),
        CouplingParams::bipartite(1.0, 3.0, 30.0).unwrap(),
        CouplingParams::tripartite(1.0, 1.0, 0.6, 30.0).unwrap(),
        CouplingParams::tripartite(1.0, 1.0, 1.0, 30.0).unwrap(),
        CouplingParams::tripartite(1.0, 1.0, 3.0, 30.0).unwrap(),
    ]
}

/// Rotate a1 by -i and move the squeezed (spin, a1) pair into the two
/// field slots, putting the evolved pure-squeezing state into the
/// standard form whose Duan sum is 4 e^{-2r}.
fn squeezing_relabel() -> BogoliubovTransform {
    BogoliubovTransform::mode_permutation(3, &[2, 1, 0])
        .unwrap()
        .compose(&BogoliubovTransform::mode_phase(3, 1, Complex64::new(0.0, -1.0)).unwrap())
        .unwrap()
}

fn check_spin_moments(b: &mut Battery) {
    let mut worst = 0.0f64;
    for n in 2..=12u64 {
        let m = spin_moments_bruteforce(n).unwrap();
        let nf = n as f64;
        worst = worst
            .max((m.mean - nf.sqrt() / 2.0).abs())
            .max((m.s_squared - (nf - 1.0) / 4.0).abs())
            .max((m.sdag_s - (nf + 1.0) / 4.0).abs())
            .max((m.sdag_s_centered() - 0.25).abs())
            .max((m.s_squared_centered() + 0.25).abs());
    }
    b.check(
        "spin-moments",
        worst <= 1e-12,
        &format!("max deviation from closed forms {worst:.3e} (bound 1e-12), N in 2..=12"),
    );
}

fn check_squeezing_duan(b: &mut Battery) {
    let p = CouplingParams::bipartite(1.0, 0.0, 0.0).unwrap();
    let relabel = squeezing_relabel();
    let vacuum = initial_moments(SpinConvention::BosonicVacuum, 3, 1).unwrap();
    let mut worst = 0.0f64;
    for r in [0.5, 1.0] {
        let full = relabel
            .compose(&BogoliubovTransform::for_params(&p, r))
            .unwrap();
        let v = duan_v(&evolve_moments(&full, &vacuum).unwrap()).unwrap();
        worst = worst.max((v - 4.0 * (-2.0 * r).exp()).abs());
    }
    b.check(
        "squeezing-duan",
        worst <= 1e-8,
        &format!("max |V - 4e^(-2r)| = {worst:.3e} (bound 1e-8), r in {{0.5, 1}}"),
    );
}

fn check_squeezing_sign(b: &mut Battery) {
    let r = 0.5;
    let p = CouplingParams::bipartite(1.0, 0.0, 0.0).unwrap();
    let spec = HamiltonianSpec::from_params(&p);
    let result = fock_evolve(&spec, &FockState::vacuum(&[14, 14, 2]).unwrap(), r)
        .and_then(|psi| exact_moments(&psi))
        .and_then(|m| evolve_moments(&squeezing_relabel(), &m))
        .and_then(|m| duan_v(&m));
    match result {
        Ok(v) => {
            let squeezed = 4.0 * (-2.0 * r).exp();
            let anti = 4.0 * (2.0 * r).exp();
            let ok = (v - squeezed).abs() < 1e-6 && (v - anti).abs() > 1.0;
            b.check(
                "squeezing-sign",
                ok,
                &format!("oracle Duan {v:.9} vs squeezed {squeezed:.6} / antisqueezed {anti:.6}"),
            );
        }
        Err(e) => b.check("squeezing-sign", false, &format!("oracle failed: {e}")),
    }
}

fn check_symplectic(b: &mut Battery, n_times: usize, inject_error: bool) {
    let mut worst = 0.0f64;
    for p in presets() {
        let t_max = 2.0 * oscillation_period(&p).unwrap().exact;
        for i in 0..n_times {
            let t = t_max * i as f64 / (n_times - 1) as f64;
            let mut m = BogoliubovTransform::for_params(&p, t);
            if inject_error {
                m = m.perturbed(1, 0, Complex64::new(1e-3, 0.0));
            }
            worst = worst.max(m.symplectic_defect());
        }
    }
    let note = if inject_error {
        " [with injected coefficient corruption]"
    } else {
        ""
    };
    b.check(
        "symplectic",
        worst < 1e-9,
        &format!(
            "max |MJM† - J| = {worst:.3e} (bound 1e-9) over 6 presets x {n_times} times{note}"
        ),
    );
}

fn check_ode_residual(b: &mut Battery) {
    let mut worst = 0.0f64;
    for k2 in [0.3, 3.0] {
        let p = CouplingParams::bipartite(1.0, k2, 30.0).unwrap();
        let t_max = 2.0 * oscillation_period(&p).unwrap().exact;
        let grid: Vec<f64> = (0..201).map(|i| t_max * i as f64 / 200.0).collect();
        worst = worst.max(ode_residual(&p, &grid, 1e-4).unwrap());
    }
    b.check(
        "ode-residual",
        worst < 1e-5,
        &format!("max relative residual {worst:.3e} (bound 1e-5), k2 in {{0.3, 3}}"),
    );
}

fn check_closed_vs_exact(b: &mut Battery, level: Level) {
    let (bi_dims, tri_dims, t): (&[usize], &[usize], f64) = match level {
        Level::Fast => (&[18, 18, 14], &[16, 14, 2, 10], 0.5),
        Level::Full => (&[38, 38, 20], &[46, 40, 2, 16], 1.0),
    };
    let bi = CouplingParams::bipartite(1.0, 0.5, 0.0).unwrap();
    match closed_form_vs_exact(&bi, t, bi_dims) {
        Ok(d) => b.check(
            "closed-vs-exact-bipartite",
            d < 1e-6,
            &format!("discrepancy {d:.3e} (bound 1e-6) at t={t}, truncation {bi_dims:?}"),
        ),
        Err(e) => b.check("closed-vs-exact-bipartite", false, &format!("{e}")),
    }
    let tri = CouplingParams::tripartite(1.0, 0.0, 0.5, 0.0).unwrap();
    match closed_form_vs_exact(&tri, t, tri_dims) {
        Ok(d) => b.check(
            "closed-vs-exact-tripartite",
            d < 1e-6,
            &format!("discrepancy {d:.3e} (bound 1e-6) at t={t}, truncation {tri_dims:?}"),
        ),
        Err(e) => b.check("closed-vs-exact-tripartite", false, &format!("{e}")),
    }
}

/// Full level only: the uniform-truncation-30 bipartite evolution. At
/// this truncation the comparison floors near 3.4e-6 (pure truncation
/// bias; see the converged checks above for the rigorous 1e-6 bound), so
/// this check documents that floor against a 5e-6 sanity bound.
fn check_truncation_floor(b: &mut Battery) {
    let bi = CouplingParams::bipartite(1.0, 0.5, 0.0).unwrap();
    match closed_form_vs_exact(&bi, 1.0, &[30, 30, 30]) {
        Ok(d) => b.check(
            "truncation-floor-bipartite-30",
            d < 5e-6,
            &format!("discrepancy {d:.3e} at uniform truncation 30 (documented floor, bound 5e-6)"),
        ),
        Err(e) => b.check("truncation-floor-bipartite-30", false, &format!("{e}")),
    }
}

fn check_initial_values(b: &mut Battery) {
    let mut worst = 0.0f64;
    let mut verdict_ok = true;
    for conv in [SpinConvention::BosonicVacuum, SpinConvention::ProductState] {
        for p in presets() {
            let m0 = initial_moments(conv, p.n_modes(), 1_000_000).unwrap();
            let id = BogoliubovTransform::for_params(&p, 0.0);
            let m = evolve_moments(&id, &m0).unwrap();
            if p.is_tripartite() {
                let gains = vlf_gains(&m).unwrap();
                let (v12, v13, v23) = vlf_correlations(&m, &gains).unwrap();
                for v in [v12, v13, v23] {
                    worst = worst.max((v - 4.0).abs());
                }
                verdict_ok &= !tripartite_verdict((v12, v13, v23));
            } else {
                worst = worst.max((duan_v(&m).unwrap() - 4.0).abs());
            }
        }
    }
    verdict_ok &= tripartite_verdict((3.9, 3.9, 4.1)) && !tripartite_verdict((4.1, 4.2, 3.9));
    b.check(
        "initial-values",
        worst <= 1e-12 && verdict_ok,
        &format!("max |V(0) - 4| = {worst:.3e} (bound 1e-12) over presets x conventions; verdict logic consistent: {verdict_ok}"),
    );
}

/// Run the battery; returns the process exit code (0 pass, 3 any failure).
pub fn run(level: Level, inject_error: bool) -> i32 {
    let name = match level {
        Level::Fast => "fast",
        Level::Full => "full",
    };
    println!("oracle-check level: {name}");
    let start = std::time::Instant::now();
    let mut b = Battery::new();

    check_spin_moments(&mut b);
    check_squeezing_duan(&mut b);
    check_squeezing_sign(&mut b);
    let n_times = match level {
        Level::Fast => 200,
        Level::Full => 1000,
    };
    check_symplectic(&mut b, n_times, inject_error);
    check_ode_residual(&mut b);
    check_closed_vs_exact(&mut b, level);
    if level == Level::Full {
        check_truncation_floor(&mut b);
    }
    check_initial_values(&mut b);

    let elapsed = start.elapsed().as_secs_f64();
    let passed = b.total - b.failures;
    println!(
        "oracle-check ({name}): {passed}/{} passed in {elapsed:.2}s",
        b.total
    );
    if b.failures == 0 {
        0
    } else {
        3
    }
}
