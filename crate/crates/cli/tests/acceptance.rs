//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fail.

use std::f64::consts::{FRAC_PI_2, PI};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use dickelab::circuit::{derive_model_params, validate_regime, CircuitParams, DerivedSingleAtom};
use dickelab::diagnostics::{
    converge_cutoff, degeneracy_classes, oracle_spectrum_equivalence, spin_model_levels,
    splitting_and_gap,
};
use dickelab::eigen::lanczos_lowest;
use dickelab::model::build_full_hamiltonian;
use dickelab::semiclassics::{
    energy_gradient, energy_surface, find_minima, interference_factor, PhasePoint,
};
use dickelab::sweep::{parse_config, run_sweep, scaling_fit_of};
use dickelab::{ModelParams, SolverOptions, SparseOperator};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn params(n: usize, u: f64, v: f64) -> ModelParams {
    ModelParams::from_u(n, 1.0, u, v).expect("valid parameters")
}

fn full_levels(p: &ModelParams, k: usize) -> Vec<f64> {
    converge_cutoff(p, 1e-10, k)
        .expect("cutoff converges")
        .spectrum
        .eigenvalues
}

fn odd_degeneracy() -> Outcome {
    let mut worst = 0.0f64;
    for n in [3, 5, 7] {
        for ratio in [0.1, 0.5, 0.9] {
            let e = full_levels(&params(n, ratio, 1.0), 3);
            worst = worst.max((e[1] - e[0]) / e[0].abs());
        }
    }
    outcome(worst < 1e-10, format!("max d/|E0| = {worst:.2e}"))
}

const EVEN_SWEEP: &str = "\
[model]
N_list = 4,6,8,10,12
omega = 1
u_list = 0.2
v_list = 1
[engine]
mode = spin-only
k = 6
[outputs]
path = even.csv
emit = splitting, scaling-fit
";

fn even_scaling() -> Outcome {
    let cfg = parse_config(EVEN_SWEEP).expect("config parses");
    let rows = run_sweep(&cfg).expect("sweep runs").rows;
    let all_positive = rows.len() == 5 && rows.iter().all(|r| r.d > 0.0);
    match scaling_fit_of(&rows) {
        Ok(fit) => outcome(
            all_positive && fit.r_squared > 0.99 && fit.slope < 0.0,
            format!(
                "slope = {:.4}, r^2 = {:.6}, all d > 0: {all_positive}",
                fit.slope, fit.r_squared
            ),
        ),
        Err(e) => outcome(false, format!("fit failed: {e}")),
    }
}

fn parity_alternation() -> Outcome {
    let mut mismatches = Vec::new();
    for n in 3..=8usize {
        let factor = interference_factor(n as i64).expect("factor");
        let expected = if n % 2 == 1 { 0.0 } else { 1.0 };
        let e = full_levels(&params(n, 0.2, 1.0), 3);
        let d_vanishes = e[1] - e[0] < 1e-10 * e[0].abs();
        if factor != expected || d_vanishes != (factor == 0.0) {
            mismatches.push(n);
        }
    }
    outcome(
        mismatches.is_empty(),
        format!("N = 3..8, mismatches at {mismatches:?}"),
    )
}

fn gap_laws() -> Outcome {
    let gaps: Vec<f64> = (3..=15)
        .step_by(2)
        .map(|n| {
            let e = spin_model_levels(&params(n, 0.2, 1.0), 3)
                .unwrap()
                .eigenvalues;
            splitting_and_gap(&e).unwrap().delta
        })
        .collect();
    let increasing = gaps.windows(2).all(|w| w[1] > w[0]);

    let u = 1.0;
    let equal: Vec<f64> = [3, 5, 7, 9]
        .iter()
        .map(|&n| {
            let e = spin_model_levels(&params(n, u, u), 3).unwrap().eigenvalues;
            splitting_and_gap(&e).unwrap().delta
        })
        .collect();
    let worst = equal
        .iter()
        .fold(0.0f64, |a, d| a.max((d - 2.0 * u).abs() / (2.0 * u)));
    outcome(
        increasing && worst <= 1e-12,
        format!("u/v = 0.2 gaps increasing: {increasing}; u = v max |Delta/2u - 1| = {worst:.2e}"),
    )
}

fn polaron_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    let mut pass = true;
    let mut points = Vec::new();
    for n in [2, 3, 4] {
        for ratio in [0.2, 0.8] {
            match oracle_spectrum_equivalence(&params(n, ratio, 1.0), 6, 1e-8) {
                Ok(r) => {
                    worst = worst.max(r.max_abs_deviation);
                    pass &= r.pass;
                    points.push(format!("N={n} u/v={ratio}: {:.2e}", r.max_abs_deviation));
                }
                Err(e) => return outcome(false, format!("N = {n}, u/v = {ratio}: {e}")),
            }
        }
    }
    outcome(
        pass,
        format!(
            "max |E_full - E_ladder| = {worst:.3e}, tolerance 1e-8 [{}]",
            points.join(", ")
        ),
    )
}

fn semiclassical_minima() -> Outcome {
    let mut worst_coord = 0.0f64;
    let mut worst_energy = 0.0f64;
    let mut counts_ok = true;
    for n in [2, 4, 7] {
        for ratio in [0.2, 0.8] {
            let p = params(n, ratio, 1.0);
            let minima = match find_minima(&p) {
                Ok(m) => m,
                Err(e) => return outcome(false, format!("N = {n}: {e}")),
            };
            counts_ok &= minima.len() == 2;
            let s = p.spin();
            for (m, phi) in minima.iter().zip([0.0, PI]) {
                let pt = m.point;
                let dphi = (pt.phi - phi + PI).rem_euclid(2.0 * PI) - PI;
                let dev = [pt.x, pt.y, pt.theta - FRAC_PI_2, dphi]
                    .iter()
                    .fold(0.0f64, |a, x| a.max(x.abs()));
                worst_coord = worst_coord.max(dev);
                worst_energy = worst_energy.max((m.energy + p.v() * s * s).abs() / (p.v() * s * s));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_grad = 0.0f64;
    let h = 1e-6;
    for _ in 0..100 {
        let p = params(
            rng.gen_range(1..12),
            rng.gen_range(0.05..2.0),
            rng.gen_range(0.1..2.0),
        );
        let x = [
            rng.gen_range(-2.0..2.0),
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.05..PI - 0.05),
            rng.gen_range(0.0..2.0 * PI),
        ];
        let analytic = energy_gradient(&p, &PhasePoint::new(x[0], x[1], x[2], x[3]));
        let mut err = 0.0f64;
        let mut norm = 0.0f64;
        for i in 0..4 {
            let mut plus = x;
            let mut minus = x;
            plus[i] += h;
            minus[i] -= h;
            let f = |y: [f64; 4]| energy_surface(&p, &PhasePoint::new(y[0], y[1], y[2], y[3]));
            let fd = (f(plus) - f(minus)) / (2.0 * h);
            err += (fd - analytic[i]).powi(2);
            norm += analytic[i].powi(2);
        }
        worst_grad = worst_grad.max(err.sqrt() / norm.sqrt().max(1.0));
    }
    outcome(
        counts_ok && worst_coord < 1e-8 && worst_energy < 1e-8 && worst_grad < 1e-6,
        format!(
            "two minima: {counts_ok}; coord dev {worst_coord:.1e}; energy dev {worst_energy:.1e}; gradient rel err {worst_grad:.1e}"
        ),
    )
}

fn circuit_regime() -> Outcome {
    let mhz = 2.0 * PI * 1e6;
    let device = CircuitParams {
        e_c: 5000.0 * mhz,
        e_j: 1000.0 * mhz,
        n_g: 0.5,
        phi_x: FRAC_PI_2,
        phi_e: FRAC_PI_2,
        inductance: 10e-9,
        critical_current: 3.64e-9,
        omega: 6e3 * mhz,
        g: 5.8 * mhz,
        n_atoms: 3,
    };
    let derived = match derive_model_params(&device) {
        Ok(d) => d,
        Err(e) => return outcome(false, e.to_string()),
    };
    let u_over_2pi_mhz = derived.model.u() / mhz;
    let direct = 5.8 * 5.8 / 6e3;
    let rel = (u_over_2pi_mhz / direct - 1.0).abs();
    let printed = (u_over_2pi_mhz - 5.607e-3).abs() < 5e-7;

    let regime = |v: f64| {
        let m = ModelParams::new(3, device.omega, device.g, v).unwrap();
        let atom = DerivedSingleAtom {
            epsilon: 0.0,
            eta: 0.0,
            kappa: derived.single_atom.kappa,
        };
        validate_regime(&m, &atom).u_lt_v
    };
    let both = regime(100.0 * mhz) && regime(100.0 * 1e6);
    let derived_ok = validate_regime(&derived.model, &derived.single_atom).all_ok();
    outcome(
        rel <= 1e-6 && printed && both && derived_ok,
        format!(
            "u/2pi = {u_over_2pi_mhz:.6e} MHz (rel {rel:.1e}); u < v for v = 2pi*100 MHz and 100 MHz: {both}; derived v/2pi = {:.2} MHz",
            derived.model.v() / mhz
        ),
    )
}

fn random_symmetric(rng: &mut ChaCha8Rng, dim: usize) -> SparseOperator {
    let mut t = Vec::new();
    for i in 0..dim {
        t.push((i, i, rng.gen_range(-10.0..10.0)));
        for _ in 0..4 {
            let j = rng.gen_range(0..dim);
            if j != i {
                let x = rng.gen_range(-1.0..1.0);
                t.push((i, j, x));
                t.push((j, i, x));
            }
        }
    }
    SparseOperator::from_triplets(dim, t).unwrap()
}

/// `A ⊕ A`: every level exactly doubled.
fn doubled(a: &SparseOperator) -> SparseOperator {
    let n = a.dim();
    let t = a
        .triplets()
        .chain(a.triplets().map(|(i, j, x)| (i + n, j + n, x)))
        .collect();
    SparseOperator::from_triplets(2 * n, t).unwrap()
}

fn dense_lowest(m: &DMatrix<f64>, k: usize) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    e.sort_by(f64::total_cmp);
    e.truncate(k);
    e
}

fn multiplicities(e: &[f64]) -> Vec<usize> {
    let scale = e.iter().fold(1.0f64, |a, x| a.max(x.abs()));
    degeneracy_classes(e, 1e-8 * scale)
        .classes
        .iter()
        .map(|c| c.1)
        .collect()
}

fn solver_cross_validation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut operators: Vec<(String, SparseOperator)> = Vec::new();
    for i in 0..50 {
        let h = if i % 5 == 0 {
            let half = rng.gen_range(25..250);
            doubled(&random_symmetric(&mut rng, half))
        } else {
            let dim = rng.gen_range(50..=500);
            random_symmetric(&mut rng, dim)
        };
        operators.push((format!("random #{i}"), h));
    }
    for (n, ratio, cutoff) in [
        (3, 0.2, 60),
        (4, 0.5, 50),
        (5, 0.9, 60),
        (6, 0.2, 40),
        (7, 0.5, 50),
    ] {
        let p = params(n, ratio, 1.0);
        operators.push((
            format!("model N={n}"),
            build_full_hamiltonian(&p, cutoff).unwrap(),
        ));
    }

    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (name, h) in &operators {
        let opts = SolverOptions::with_k(6);
        let lz = match lanczos_lowest(h, &opts) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("{name}: {e}")),
        };
        let reference = dense_lowest(&h.to_dense(), 6);
        let dev = lz
            .eigenvalues
            .iter()
            .zip(&reference)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs() / y.abs().max(1.0)));
        worst = worst.max(dev);
        if !lz.converged
            || dev > 1e-9
            || multiplicities(&lz.eigenvalues) != multiplicities(&reference)
        {
            failures.push(name.clone());
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} operators, max rel dev {worst:.1e}, failures {failures:?}",
            operators.len()
        ),
    )
}

fn sweep_determinism() -> Outcome {
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return outcome(false, e.to_string()),
    };
    std::fs::write(dir.path().join("even.cfg"), EVEN_SWEEP).unwrap();
    let runs = [
        ("1", "w1a.csv"),
        ("1", "w1b.csv"),
        ("8", "w8a.csv"),
        ("8", "w8b.csv"),
    ];
    let mut outputs = Vec::new();
    for (workers, out) in runs {
        let status = Command::new(env!("CARGO_BIN_EXE_dickelab"))
            .current_dir(dir.path())
            .args(["sweep", "even.cfg", "--workers", workers, "--out", out])
            .output()
            .expect("binary runs");
        if !status.status.success() {
            return outcome(false, format!("sweep exited with {}", status.status));
        }
        outputs.push(std::fs::read(dir.path().join(out)).unwrap());
    }
    let identical = outputs.windows(2).all(|w| w[0] == w[1]);
    outcome(
        identical && !outputs[0].is_empty(),
        format!(
            "4 runs (workers 1, 1, 8, 8), {} bytes each, identical: {identical}",
            outputs[0].len()
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            1,
            "odd-N exact degeneracy",
            odd_degeneracy,
            Some(Duration::from_secs(60)),
        ),
        (
            2,
            "even-N exponential splitting",
            even_scaling,
            Some(Duration::from_secs(5)),
        ),
        (3, "parity alternation", parity_alternation, None),
        (
            4,
            "gap growth and u = v law",
            gap_laws,
            Some(Duration::from_secs(5)),
        ),
        (
            5,
            "polaron reference equivalence",
            polaron_equivalence,
            Some(Duration::from_secs(120)),
        ),
        (
            6,
            "semiclassical minima",
            semiclassical_minima,
            Some(Duration::from_secs(5)),
        ),
        (
            7,
            "circuit regime check",
            circuit_regime,
            Some(Duration::from_secs(1)),
        ),
        (
            8,
            "solver cross-validation",
            solver_cross_validation,
            Some(Duration::from_secs(60)),
        ),
        (9, "sweep determinism", sweep_determinism, None),
    ];

    let mut passed = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = result.pass && in_time;
        passed += pass as usize;
        let budget = limit.map_or(String::new(), |l| format!(" of {} s", l.as_secs()));
        println!(
            "criterion {id} [{name}]: {} ({}; {:.2} s{budget})",
            if pass { "PASS" } else { "FAIL" },
            result.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if passed == criteria.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
