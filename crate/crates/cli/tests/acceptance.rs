//! Acceptance suite: twelve end-to-end checks covering the analytic line
//! solution, equilibrium structure, samplers, transient solver, hitting
//! times, tuning, achievability, and byte-level reproducibility. Each test
//! prints one `acceptance k/12 PASS|FAIL` line with its pinned tolerances
//! (visible with `--nocapture`; always visible on failure).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use rydnet_core::dynamics::{
    default_hitting_cap, estimate_ensemble, estimate_time_average, hitting_time, simulate,
    transient_solve, Generator,
};
use rydnet_core::equilibrium::{
    dominant_limit_gap, stationary_distribution, stationarity_residual, verify_detailed_balance,
};
use rydnet_core::physics::{single_atom_transient, TWO_PI_MHZ};
use rydnet_core::rng::subseed;
use rydnet_core::statespace::StateSpace;
use rydnet_core::tuner::{
    check_achievable, line_analytic_solution, tune_exact, Achievability, CountRule, HorizonRule,
    Schedule, StepRule,
};
use rydnet_core::{Configuration, InterferenceGraph, RateVector};

const PHI_SIXTH: f64 = 1.0 / 6.0;

fn report(idx: usize, what: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {idx:>2}/12 {verdict}  {what}  [{detail}]");
    assert!(pass, "acceptance {idx}/12 FAIL  {what}  [{detail}]");
}

/// The line instance all tuning checks target: 9 particles, blocking
/// range 4, uniform target 1/6, unit-ratio start.
fn line_9_4() -> InterferenceGraph {
    InterferenceGraph::line(9, 4).unwrap()
}

/// Analytic drive amplitudes for that instance: (1, √2, 2, 2√2, 4, 2√2,
/// 2, √2, 1) in units of omega_r.
fn analytic_9_4(omega_r: f64) -> Vec<f64> {
    let s = 2.0f64.sqrt();
    [1.0, s, 2.0, 2.0 * s, 4.0, 2.0 * s, 2.0, s, 1.0]
        .iter()
        .map(|v| v * omega_r)
        .collect()
}

fn max_rel_err(got: &[f64], want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .map(|(g, w)| ((g - w) / w).abs())
        .fold(0.0, f64::max)
}

fn max_abs_err(got: &[f64], want: &[f64]) -> f64 {
    got.iter()
        .zip(want)
        .map(|(g, w)| (g - w).abs())
        .fold(0.0, f64::max)
}

#[test]
fn a01_line_drive_solution_matches_analytic_values() {
    let got = line_analytic_solution(9, 4, PHI_SIXTH, TWO_PI_MHZ).unwrap();
    let err = max_rel_err(&got, &analytic_9_4(TWO_PI_MHZ));
    report(
        1,
        "closed-form line drives equal (1,√2,2,2√2,4,2√2,2,√2,1)·2π MHz",
        err <= 1e-12,
        &format!("max rel err {err:.2e} ≤ 1e-12"),
    );
}

#[test]
fn a02_analytic_drives_round_trip_through_equilibrium() {
    // Every feasible (n ≤ 10, b < n, φ) combination must reproduce its
    // target exactly; φ at or past the 1/(1+b) feasibility edge must be
    // rejected rather than extrapolated.
    let mut worst = 0.0f64;
    let mut combos = 0usize;
    let mut rejected = 0usize;
    for n in 1..=10usize {
        for b in 0..n {
            for phi in [0.05, PHI_SIXTH, 0.8 / (1.0 + b as f64)] {
                if phi >= 1.0 / (1.0 + b as f64) {
                    assert!(
                        line_analytic_solution(n, b, phi, 1.0).is_err(),
                        "infeasible target φ={phi} accepted for n={n}, b={b}"
                    );
                    rejected += 1;
                    continue;
                }
                let drives = line_analytic_solution(n, b, phi, 1.0).unwrap();
                let nu: Vec<f64> = drives.iter().map(|w| w * w).collect();
                let rates = RateVector::new(nu, vec![1.0; n]).unwrap();
                let graph = InterferenceGraph::line(n, b).unwrap();
                let space = StateSpace::enumerate(&graph).unwrap();
                let eq = stationary_distribution(&space, &rates).unwrap();
                let err = max_abs_err(eq.excitation_probabilities(), &vec![phi; n]);
                worst = worst.max(err);
                combos += 1;
            }
        }
    }
    report(
        2,
        "analytic drives reproduce their target probabilities",
        worst <= 1e-10,
        &format!("{combos} feasible combos, max |θ-φ| {worst:.2e} ≤ 1e-10; {rejected} infeasible combos rejected"),
    );
}

#[test]
fn a03_exact_feedback_tuning_converges_on_line_9_4() {
    let schedule = Schedule::new(
        StepRule::Constant(2.0),
        HorizonRule::Constant(1.0),
        CountRule::Constant(1),
        500,
    )
    .unwrap();
    let omega_r = vec![TWO_PI_MHZ; 9];
    let result = tune_exact(
        &line_9_4(),
        &omega_r,
        6.0 * TWO_PI_MHZ,
        &[PHI_SIXTH; 9],
        &schedule,
    )
    .unwrap();
    let drive_err = max_rel_err(result.state.omega_e(), &analytic_9_4(TWO_PI_MHZ));
    let iterations = result.state.iteration();
    report(
        3,
        "exact-feedback tuning converges on the 9-particle line",
        result.converged && result.final_error <= 1e-6 && drive_err <= 1e-3,
        &format!(
            "{iterations} ≤ 500 iterations, final |θ-φ| {:.2e} ≤ 1e-6, drive rel err {drive_err:.2e} ≤ 1e-3",
            result.final_error
        ),
    );
}

/// Runs the CLI binary, panicking with its stderr if it fails.
fn run_cli(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_rydnet"))
        .args(args)
        .output()
        .expect("spawn rydnet");
    assert!(
        out.status.success(),
        "rydnet {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 stdout")
}

/// Parses a headered CSV into its data rows (split on ", ").
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .skip(1)
        .map(|l| l.split(", ").map(str::to_owned).collect())
        .collect()
}

#[test]
fn a04_stochastic_tuning_approaches_line_solution() {
    // Ensemble-fed tuning with the production schedule (T = 250 µs,
    // m(n) = 25n², a(n) = 100/(10+√n)) on the 9-particle line. Two pinned
    // checks over master seeds 1, 2, 3, each passed by at least 2 of 3:
    //   - exact excitation probabilities at the n=10 iterate within 0.03
    //     of the 1/6 target;
    //   - drive amplitudes within 15% of the analytic solution at n=20
    //     (the measured iteration count this schedule needs to reach 15%;
    //     at n=10 the exact-feedback trajectory is still 24% out).
    let analytic = analytic_9_4(1.0);
    let mut theta_pass = 0usize;
    let mut drive_pass = 0usize;
    let mut detail = String::new();
    for seed in ["1", "2", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        run_cli(&[
            "tune",
            "--preset",
            "fig7",
            "--iterations",
            "20",
            "--seed",
            seed,
            "--out",
            out,
            "--reproducible",
        ]);

        let mut theta_err = 0.0f64;
        for row in csv_rows(&dir.path().join("theta_checkpoints.csv")) {
            if row[0] == "10" {
                let theta: f64 = row[2].parse().unwrap();
                let target: f64 = row[3].parse().unwrap();
                theta_err = theta_err.max((theta - target).abs());
            }
        }

        let drives_at = |n: &str| -> Vec<f64> {
            let mut by_particle = BTreeMap::new();
            for row in csv_rows(&dir.path().join("tuner_history.csv")) {
                if row[0] == n {
                    by_particle
                        .insert(row[1].parse::<usize>().unwrap(), row[2].parse::<f64>().unwrap());
                }
            }
            assert_eq!(by_particle.len(), 9, "missing history rows at n={n}");
            by_particle.into_values().collect()
        };
        let drive_err_10 = max_rel_err(&drives_at("10"), &analytic);
        let drive_err_20 = max_rel_err(&drives_at("20"), &analytic);

        if theta_err <= 0.03 {
            theta_pass += 1;
        }
        if drive_err_20 <= 0.15 {
            drive_pass += 1;
        }
        detail.push_str(&format!(
            "seed {seed}: |θ-φ|@10 {theta_err:.4}, drive err @10 {drive_err_10:.3} / @20 {drive_err_20:.3}; "
        ));
    }
    report(
        4,
        "stochastic tuning tracks the line solution (2 of 3 seeds)",
        theta_pass >= 2 && drive_pass >= 2,
        &format!("{detail}θ ≤ 0.03 at n=10: {theta_pass}/3, drives within 15% at n=20: {drive_pass}/3"),
    );
}

/// The four small benchmark graphs used by the equilibrium checks.
fn benchmark_graphs() -> Vec<(&'static str, InterferenceGraph)> {
    vec![
        ("line(9,1)", InterferenceGraph::line(9, 1).unwrap()),
        ("line(9,4)", line_9_4()),
        ("lattice(4,4)", InterferenceGraph::lattice(4, 4).unwrap()),
        ("lattice(3,3)", InterferenceGraph::lattice(3, 3).unwrap()),
    ]
}

#[test]
fn a05_equilibrium_satisfies_detailed_balance_and_stationarity() {
    let mut worst_balance = 0.0f64;
    let mut worst_stationarity = 0.0f64;
    for (_, graph) in benchmark_graphs() {
        let space = StateSpace::enumerate(&graph).unwrap();
        for rho in [0.1, 1.0, 10.0, 1e4] {
            let rates = RateVector::from_ratio(graph.n_particles(), rho).unwrap();
            let eq = stationary_distribution(&space, &rates).unwrap();
            let gen = Generator::build(&space, &rates).unwrap();
            worst_balance = worst_balance.max(verify_detailed_balance(&eq, &gen).unwrap());
            worst_stationarity = worst_stationarity.max(stationarity_residual(&eq, &gen).unwrap());
        }
    }
    report(
        5,
        "equilibrium is reversible and stationary on 4 graphs × 4 ratios",
        worst_balance <= 1e-12 && worst_stationarity <= 1e-10,
        &format!(
            "max balance residual {worst_balance:.2e} ≤ 1e-12, max πQ residual {worst_stationarity:.2e} ≤ 1e-10"
        ),
    );
}

/// The two checkerboard configurations of an n×m grid (even parity first;
/// the odd one exists as a same-size packing only when n·m is even).
fn checkerboards(n: usize, m: usize) -> Vec<Configuration> {
    let mut configs = Vec::new();
    let parities: &[usize] = if (n * m) % 2 == 0 { &[0, 1] } else { &[0] };
    for &parity in parities {
        let mut bits = vec![false; n * m];
        for (k, bit) in bits.iter_mut().enumerate() {
            *bit = (k % n + k / n) % 2 == parity;
        }
        configs.push(Configuration::from_occupancy(&bits));
    }
    configs
}

#[test]
fn a06_maximum_independent_sets_on_lattices() {
    let space44 = StateSpace::enumerate(&InterferenceGraph::lattice(4, 4).unwrap()).unwrap();
    let mis44 = space44.maximum_independent_sets();
    let boards = checkerboards(4, 4);
    let both_checkerboards = mis44.len() == 2
        && mis44.iter().all(|c| c.n_excited() == 8)
        && boards.iter().all(|b| mis44.contains(b));

    let graph95 = InterferenceGraph::lattice(9, 5).unwrap();
    let space95 = StateSpace::enumerate_with_budget(&graph95, 300_000_000).unwrap();
    let mis95 = space95.maximum_independent_sets();
    let unique23 =
        mis95.len() == 1 && mis95[0].n_excited() == 23 && mis95[0] == checkerboards(9, 5)[0];

    report(
        6,
        "grid packings: 4×4 has the two size-8 checkerboards, 9×5 one of size 23",
        both_checkerboards && unique23,
        &format!(
            "4×4: {} packings of size {}; 9×5: {} packing of size {} among {} states",
            mis44.len(),
            mis44[0].n_excited(),
            mis95.len(),
            mis95[0].n_excited(),
            space95.len()
        ),
    );
}

#[test]
fn a07_high_ratio_equilibrium_concentrates_on_checkerboards() {
    let space = StateSpace::enumerate(&InterferenceGraph::lattice(4, 4).unwrap()).unwrap();
    let gap = dominant_limit_gap(&space, 1e4).unwrap();
    let eq = stationary_distribution(&space, &RateVector::from_ratio(16, 1e4).unwrap()).unwrap();
    let mut board_err = 0.0f64;
    for board in checkerboards(4, 4) {
        let idx = space.index_of(&board).expect("checkerboard is feasible");
        board_err = board_err.max((2.0 * eq.pi()[idx] - 1.0).abs());
    }
    report(
        7,
        "at ν/μ = 10⁴ the 4×4 grid sits on its checkerboards, half each",
        gap.mass_off_dominant < 1e-2 && board_err <= 0.01,
        &format!(
            "off-packing mass {:.2e} < 1e-2, checkerboard mass within {board_err:.2e} ≤ 0.01 of 1/2",
            gap.mass_off_dominant
        ),
    );
}

#[test]
fn a08_stochastic_estimators_match_exact_probabilities() {
    // Ensemble: 10⁴ restarts to T = 100/min-rate. Time average: one run of
    // total length 10⁴·T with the first 10% discarded; its variance is
    // below the restart estimator's, so the same 3-standard-error band
    // applies to both.
    let m = 10_000usize;
    let mut detail = String::new();
    let mut pass = true;
    for (label, graph, seed) in [
        ("line(5,1)", InterferenceGraph::line(5, 1).unwrap(), 11u64),
        ("lattice(3,3)", InterferenceGraph::lattice(3, 3).unwrap(), 12u64),
    ] {
        let n = graph.n_particles();
        let rates = RateVector::from_ratio(n, 1.0).unwrap();
        let space = StateSpace::enumerate(&graph).unwrap();
        let exact = stationary_distribution(&space, &rates)
            .unwrap()
            .excitation_probabilities()
            .to_vec();
        let horizon = 100.0 / rates.min_rate();
        let band: Vec<f64> = exact
            .iter()
            .map(|t| 3.0 * (t * (1.0 - t) / m as f64).sqrt())
            .collect();

        let ensemble = estimate_ensemble(&graph, &rates, m, horizon, seed).unwrap();
        let ens_ok = ensemble
            .iter()
            .zip(&exact)
            .zip(&band)
            .all(|((g, e), b)| (g - e).abs() <= *b);

        let total = m as f64 * horizon;
        let trajectory = simulate(
            &graph,
            &rates,
            total,
            &Configuration::empty(n),
            subseed(seed, 1),
        )
        .unwrap();
        let averaged = estimate_time_average(&trajectory, 0.1 * total, total).unwrap();
        let avg_ok = averaged
            .iter()
            .zip(&exact)
            .zip(&band)
            .all(|((g, e), b)| (g - e).abs() <= *b);

        let ens_err = max_abs_err(&ensemble, &exact);
        let avg_err = max_abs_err(&averaged, &exact);
        let worst_band = band.iter().fold(0.0f64, |a, &b| a.max(b));
        detail.push_str(&format!(
            "{label}: ensemble {ens_err:.4}, time-avg {avg_err:.4}, 3σ band ≤ {worst_band:.4}; "
        ));
        pass = pass && ens_ok && avg_ok;
    }
    report(
        8,
        "both estimators agree with exact probabilities within 3 standard errors",
        pass,
        detail.trim_end_matches("; "),
    );
}

#[test]
fn a09_transient_solver_matches_closed_form_and_sampling() {
    // Single particle: solver vs the explicit relaxation formula.
    let (nu, mu) = (2.0, 1.0);
    let graph1 = InterferenceGraph::line(1, 0).unwrap();
    let space1 = StateSpace::enumerate(&graph1).unwrap();
    let rates1 = RateVector::new(vec![nu], vec![mu]).unwrap();
    let gen1 = Generator::build(&space1, &rates1).unwrap();
    let excited_idx = space1
        .index_of(&Configuration::from_occupancy(&[true]))
        .unwrap();
    let ground_idx = space1
        .index_of(&Configuration::from_occupancy(&[false]))
        .unwrap();
    let mut p0 = vec![0.0; 2];
    p0[ground_idx] = 1.0;
    let mut closed_form_err = 0.0f64;
    for k in 1..=20 {
        let t = k as f64 * 0.25 / (nu + mu);
        let p = transient_solve(&gen1, &p0, t).unwrap();
        let want = single_atom_transient(nu, mu, 0.0, t);
        closed_form_err = closed_form_err.max((p[excited_idx] - want).abs());
    }

    // Three particles: solver vs empirical state frequencies from 10⁴
    // independent runs, at early, middle, and near-stationary times.
    let graph3 = InterferenceGraph::line(3, 1).unwrap();
    let space3 = StateSpace::enumerate(&graph3).unwrap();
    let rates3 = RateVector::uniform(3, 2.0, 1.0).unwrap();
    let gen3 = Generator::build(&space3, &rates3).unwrap();
    let m = 10_000usize;
    let empty = Configuration::empty(3);
    let mut p0_3 = vec![0.0; space3.len()];
    p0_3[space3.index_of(&empty).unwrap()] = 1.0;
    let mut sampling_gap = 0.0f64;
    let mut sampling_ok = true;
    for (which, t) in [0.1, 1.0, 10.0].iter().enumerate() {
        let p = transient_solve(&gen3, &p0_3, *t).unwrap();
        let mut counts = vec![0u64; space3.len()];
        for s in 0..m {
            let run = simulate(
                &graph3,
                &rates3,
                *t,
                &empty,
                subseed(21 + which as u64, s as u64),
            )
            .unwrap();
            counts[space3.index_of(&run.final_configuration()).unwrap()] += 1;
        }
        for (idx, &c) in counts.iter().enumerate() {
            let freq = c as f64 / m as f64;
            let band = 4.0 * (p[idx] * (1.0 - p[idx]) / m as f64).sqrt();
            sampling_ok = sampling_ok && (freq - p[idx]).abs() <= band;
            sampling_gap = sampling_gap.max((freq - p[idx]).abs());
        }
    }
    report(
        9,
        "transient solver matches the 1-particle formula and 3-particle sampling",
        closed_form_err <= 1e-8 && sampling_ok,
        &format!(
            "closed-form gap {closed_form_err:.2e} ≤ 1e-8 over 20 times; worst state-frequency gap {sampling_gap:.4} within 4σ (m = 10⁴, t ∈ {{0.1, 1, 10}})"
        ),
    );
}

/// Mean hitting times to the checkerboards on an n×n grid under the
/// reference laser parameters (γ = 2π·6 MHz, Ω_e = 2π·3 MHz,
/// Ω_r = 2π·1 MHz), plus the Welch statistic pieces.
fn hitting_sample(n: usize, runs: usize, seed: u64) -> (f64, f64) {
    use rydnet_core::physics::{rates_from_rabi, LaserParams};
    let graph = InterferenceGraph::lattice(n, n).unwrap();
    let params = LaserParams::uniform(
        n * n,
        3.0 * TWO_PI_MHZ,
        TWO_PI_MHZ,
        6.0 * TWO_PI_MHZ,
    )
    .unwrap();
    let rates = rates_from_rabi(&params);
    let targets = checkerboards(n, n);
    let cap = default_hitting_cap(&rates);
    let times: Vec<f64> = (0..runs)
        .map(|s| {
            hitting_time(&graph, &rates, &targets, subseed(seed, s as u64), cap)
                .unwrap()
                .time()
                .expect("cap is 10⁴/min-rate; no run should time out")
        })
        .collect();
    let mean = times.iter().sum::<f64>() / runs as f64;
    let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
    (mean, var)
}

/// One-sided Welch statistic for mean(b) > mean(a).
fn welch_z(a: (f64, f64), b: (f64, f64), runs: usize) -> f64 {
    (b.0 - a.0) / ((a.1 + b.1) / runs as f64).sqrt()
}

#[test]
fn a10_hitting_time_grows_with_lattice_size() {
    let runs = 500;
    let small = hitting_sample(4, runs, 44);
    let large = hitting_sample(6, runs, 66);
    let z = welch_z(small, large, runs);
    report(
        10,
        "mean time to reach a checkerboard: 4×4 < 6×6 at 99% confidence",
        small.0 < large.0 && z >= 2.326,
        &format!(
            "mean(4×4) {:.3e} s < mean(6×6) {:.3e} s over {runs} runs each, Welch z {z:.1} ≥ 2.326",
            small.0, large.0
        ),
    );
}

/// 8×8 continuation of the ordering check; ~10⁶⁺ events per run, so it
/// stays behind `--ignored`.
#[test]
#[ignore]
fn a10_hitting_time_grows_to_8x8() {
    let runs = 500;
    let mid = hitting_sample(6, runs, 66);
    let big = hitting_sample(8, runs, 88);
    let z = welch_z(mid, big, runs);
    report(
        10,
        "mean time to reach a checkerboard: 6×6 < 8×8 at 99% confidence",
        mid.0 < big.0 && z >= 2.326,
        &format!(
            "mean(6×6) {:.3e} s < mean(8×8) {:.3e} s over {runs} runs each, Welch z {z:.1} ≥ 2.326",
            mid.0, big.0
        ),
    );
}

#[test]
fn a11_achievability_separates_feasible_targets() {
    // Two mutually blocking particles cannot both be excited 60% of the
    // time (the probabilities of the three feasible states sum to 1).
    let k2 = InterferenceGraph::from_edges(2, &[(0, 1)]).unwrap();
    let space2 = StateSpace::enumerate(&k2).unwrap();
    let rejected = matches!(
        check_achievable(&space2, &[0.6, 0.6]).unwrap(),
        Achievability::NotAchievable { .. }
    );

    // Every exact equilibrium probability vector must come back achievable
    // with a witness that reconstructs it.
    let mut worst_residual = 0.0f64;
    let mut accepted = 0usize;
    let mut all_accepted = true;
    for (_, graph) in benchmark_graphs() {
        let space = StateSpace::enumerate(&graph).unwrap();
        for rho in [0.1, 1.0, 10.0, 1e4] {
            let rates = RateVector::from_ratio(graph.n_particles(), rho).unwrap();
            let theta = stationary_distribution(&space, &rates)
                .unwrap()
                .excitation_probabilities()
                .to_vec();
            match check_achievable(&space, &theta).unwrap() {
                Achievability::Achievable { max_residual, .. } => {
                    worst_residual = worst_residual.max(max_residual);
                    accepted += 1;
                }
                Achievability::NotAchievable { .. } => all_accepted = false,
            }
        }
    }
    report(
        11,
        "achievability: (0.6, 0.6) on a blocked pair rejected, all exact θ accepted",
        rejected && all_accepted && worst_residual <= 1e-8,
        &format!("{accepted}/16 θ vectors accepted, worst witness residual {worst_residual:.2e} ≤ 1e-8"),
    );
}

/// Byte map of every file in a directory.
fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut map = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        map.insert(
            entry.file_name().into_string().unwrap(),
            fs::read(entry.path()).unwrap(),
        );
    }
    map
}

#[test]
fn a12_reproducible_runs_are_byte_identical() {
    // Each command runs three times with the same seed: twice with the
    // same worker-thread count (rerun stability) and once with a different
    // one (schedule independence); all emitted files must match byte for
    // byte.
    let cases: Vec<(&str, Vec<&str>)> = vec![
        (
            "equilibrium",
            vec![
                "equilibrium", "--line", "5", "1", "--rho", "2.5", "--dump-states",
            ],
        ),
        (
            "simulate",
            vec![
                "simulate", "--line", "5", "1", "--rho", "2.5", "--horizon", "50", "--seed", "42",
            ],
        ),
        (
            "hitting-time",
            vec![
                "hitting-time", "--lattice", "3", "3", "--rho", "9", "--samples", "200", "--seed",
                "7", "--curve",
            ],
        ),
        (
            "tune",
            vec!["tune", "--preset", "fig6", "--iterations", "3", "--seed", "5"],
        ),
    ];
    let mut detail = String::new();
    let mut all_identical = true;
    for (label, args) in cases {
        let mut snapshots = Vec::new();
        for threads in ["2", "2", "1"] {
            let dir = tempfile::tempdir().unwrap();
            let mut full: Vec<&str> = args.clone();
            full.extend_from_slice(&[
                "--reproducible",
                "--threads",
                threads,
                "--out",
                dir.path().to_str().unwrap(),
            ]);
            run_cli(&full);
            snapshots.push(dir_bytes(dir.path()));
        }
        let identical = snapshots[0] == snapshots[1] && snapshots[1] == snapshots[2];
        assert!(
            !snapshots[0].is_empty(),
            "{label} produced no output files"
        );
        all_identical = all_identical && identical;
        detail.push_str(&format!("{label}: {} files; ", snapshots[0].len()));
    }
    report(
        12,
        "reruns with the same seed are byte-identical across thread counts",
        all_identical,
        detail.trim_end_matches("; "),
    );
}
