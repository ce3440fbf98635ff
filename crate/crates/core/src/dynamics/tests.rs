use std::sync::OnceLock;

use approx::assert_abs_diff_eq;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::bath::{tabulate_kernels, BathKernels, SpectralParams};
use crate::graphs::{complete_graph, random_removal_graph, select_sink, Graph, SinkChoice};
use crate::noise::sample_trajectory;

const TUP: f64 = std::f64::consts::PI;

fn params(environment: EnvironmentModel, n_steps: usize) -> SimParams {
    SimParams {
        environment,
        n_steps,
        ..SimParams::default()
    }
}

fn sink_of(g: &Graph) -> usize {
    match select_sink(g, 0).unwrap() {
        SinkChoice::Node(s) => s,
        SinkChoice::Degenerate => panic!("degenerate sink in test graph"),
    }
}

/// Kernels for the default bath at a reduced test grid, shared across
/// tests because tabulation runs a few hundred quadratures.
fn test_kernels() -> &'static BathKernels {
    static KERNELS: OnceLock<BathKernels> = OnceLock::new();
    KERNELS.get_or_init(|| {
        let p = SpectralParams::from_coupling(2.0, 1.0).unwrap();
        tabulate_kernels(TimeGrid::new(TUP, 200).unwrap(), 0.5, 2.0, &p).unwrap()
    })
}

fn test_kernels_800() -> &'static BathKernels {
    static KERNELS: OnceLock<BathKernels> = OnceLock::new();
    KERNELS.get_or_init(|| {
        let p = SpectralParams::from_coupling(2.0, 1.0).unwrap();
        tabulate_kernels(TimeGrid::new(TUP, 800).unwrap(), 0.5, 2.0, &p).unwrap()
    })
}

fn zero_kernels() -> &'static BathKernels {
    static KERNELS: OnceLock<BathKernels> = OnceLock::new();
    KERNELS.get_or_init(|| {
        let p = SpectralParams::from_coupling(0.0, 1.0).unwrap();
        tabulate_kernels(TimeGrid::new(TUP, 200).unwrap(), 0.0, 2.0, &p).unwrap()
    })
}

#[test]
fn hamiltonian_shapes() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let h = hamiltonian_at(&g, 2.0, &[0.0, 0.0]).unwrap();
    assert_eq!(h[[0, 1]], C64::new(2.0, 0.0));
    assert_eq!(h[[1, 0]], C64::new(2.0, 0.0));
    assert_eq!(h[[0, 0]], C64::new(0.0, 0.0));

    let empty = Graph::new(3, []).unwrap();
    let h = hamiltonian_at(&empty, 2.0, &[1.0, -1.0, 0.5]).unwrap();
    assert_eq!(h[[1, 1]], C64::new(-1.0, 0.0));
    assert_eq!(h[[0, 1]], C64::new(0.0, 0.0));

    assert!(hamiltonian_at(&empty, 2.0, &[0.0]).is_err());
}

#[test]
fn two_site_run_traps_population() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let rec = evolve(&g, 1, &params(EnvironmentModel::Noiseless, 800), None, None, None).unwrap();
    let eta = efficiency(&rec, 0.5).unwrap();
    assert!(rec.final_trace() < 1.0);
    assert!(eta > 0.0);
}

// golden value from an independent 2x2 matrix-exponential evaluation
const TWO_SITE_GOLDEN_ETA: f64 = 0.794_681_588_402_632_3;

#[test]
fn closed_form_matches_two_site_golden_value() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let eta = closed_form_noiseless(&g, 1, 2.0, 0.5, TUP).unwrap();
    assert_abs_diff_eq!(eta, TWO_SITE_GOLDEN_ETA, epsilon = 1e-10);
}

#[test]
fn closed_form_without_trap_gives_zero() {
    let g = complete_graph(6).unwrap();
    let eta = closed_form_noiseless(&g, 3, 2.0, 0.0, TUP).unwrap();
    assert!(eta.abs() < 1e-12);
}

#[test]
fn integrator_matches_closed_form_on_complete_graph() {
    let g = complete_graph(10).unwrap();
    let sink = sink_of(&g);
    let rec = evolve(&g, sink, &params(EnvironmentModel::Noiseless, 800), None, None, None)
        .unwrap();
    let eta = efficiency(&rec, 0.5).unwrap();
    let oracle = closed_form_noiseless(&g, sink, 2.0, 0.5, TUP).unwrap();
    assert!(
        (eta - oracle).abs() < 1e-6,
        "eta {eta} vs closed form {oracle}"
    );
}

#[test]
fn severed_source_sink_link_boosts_efficiency() {
    let g = complete_graph(10).unwrap();
    let sink = sink_of(&g);
    let full = closed_form_noiseless(&g, sink, 2.0, 0.5, TUP).unwrap();
    let cut = Graph::new(
        10,
        g.edges().iter().copied().filter(|&e| e != (0, sink)),
    )
    .unwrap();
    // the far node is now the removed partner again
    let cut_sink = sink_of(&cut);
    assert_eq!(cut_sink, sink);
    let removed = closed_form_noiseless(&cut, cut_sink, 2.0, 0.5, TUP).unwrap();
    assert!(removed > full, "{removed} should exceed {full}");
}

#[test]
fn rtn_with_zero_amplitude_reduces_to_noiseless() {
    let g = random_removal_graph(10, 7, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
    let sink = sink_of(&g);
    let noiseless =
        evolve(&g, sink, &params(EnvironmentModel::Noiseless, 400), None, None, None).unwrap();
    let traj = sample_trajectory(1.0, TUP, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
    let rtn = RtnParams::new(0.0, 1.0).unwrap();
    let with_rtn = evolve(
        &g,
        sink,
        &params(EnvironmentModel::RtnOnly, 400),
        Some(&traj),
        None,
        Some(&rtn),
    )
    .unwrap();
    for (a, b) in noiseless.rho_ss.iter().zip(with_rtn.rho_ss.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
    for (a, b) in noiseless.trace.iter().zip(with_rtn.trace.iter()) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn efficiency_edge_cases() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let rec = evolve(&g, 1, &params(EnvironmentModel::Noiseless, 200), None, None, None).unwrap();
    assert_eq!(efficiency(&rec, 0.0).unwrap(), 0.0);

    let zero = RunRecord {
        grid: TimeGrid::new(TUP, 4).unwrap(),
        rho_ss: vec![0.0; 5],
        trace: vec![1.0; 5],
        final_rho: ndarray::Array2::zeros((2, 2)),
        herm_defect: 0.0,
        dissipative: false,
    };
    assert_eq!(efficiency(&zero, 0.5).unwrap(), 0.0);

    let bogus = RunRecord {
        grid: TimeGrid::new(TUP, 4).unwrap(),
        rho_ss: vec![1.0; 5],
        trace: vec![1.0; 5],
        final_rho: ndarray::Array2::zeros((2, 2)),
        herm_defect: 0.0,
        dissipative: false,
    };
    assert!(matches!(
        efficiency(&bogus, 0.5),
        Err(Error::Consistency(_))
    ));
}

/// One run per environment model. Bath models use a smaller graph
/// because the driven memory convolution is quadratic in the step count;
/// the trapezoid quadrature that defines eta has O(h^2) error, so the
/// strongly oscillating RTN-only runs get a finer grid to keep the
/// trace-identity margin.
fn run_model(env: EnvironmentModel, seed: u64) -> (RunRecord, f64) {
    let (n_sites, n_removed) = if env.needs_bath() { (6, 5) } else { (10, 6) };
    let n_steps = if env == EnvironmentModel::RtnOnly { 1600 } else { 800 };
    let g = random_removal_graph(n_sites, n_removed, &mut ChaCha8Rng::seed_from_u64(seed))
        .unwrap();
    let sink = sink_of(&g);
    let traj = sample_trajectory(1.0, TUP, &mut ChaCha8Rng::seed_from_u64(seed + 1)).unwrap();
    let rtn = RtnParams::new(10.0, 1.0).unwrap();
    let p = params(env, n_steps);
    let rec = evolve(
        &g,
        sink,
        &p,
        env.needs_rtn().then_some(&traj),
        env.needs_bath().then_some(test_kernels_800()),
        env.needs_rtn().then_some(&rtn),
    )
    .unwrap();
    let eta = efficiency(&rec, p.kappa).unwrap();
    (rec, eta)
}

#[test]
fn trace_identity_holds_for_all_models() {
    for (env, seed) in [
        (EnvironmentModel::Noiseless, 3),
        (EnvironmentModel::RtnOnly, 4),
        (EnvironmentModel::BathOnly, 5),
        (EnvironmentModel::BathRtn, 6),
    ] {
        let (rec, eta) = run_model(env, seed);
        let deficit = 1.0 - rec.final_trace();
        assert!(
            (eta - deficit).abs() < 1e-6,
            "{env:?}: eta {eta} vs trace deficit {deficit}"
        );
    }
}

#[test]
fn hermiticity_stays_tight() {
    for (env, seed) in [
        (EnvironmentModel::Noiseless, 7),
        (EnvironmentModel::RtnOnly, 8),
        (EnvironmentModel::BathRtn, 9),
    ] {
        let (rec, _) = run_model(env, seed);
        assert!(rec.herm_defect < 1e-9, "{env:?}: defect {}", rec.herm_defect);
    }
}

#[test]
fn halving_the_step_barely_moves_eta() {
    let g = random_removal_graph(10, 10, &mut ChaCha8Rng::seed_from_u64(21)).unwrap();
    let sink = sink_of(&g);
    let coarse =
        evolve(&g, sink, &params(EnvironmentModel::Noiseless, 800), None, None, None).unwrap();
    let fine =
        evolve(&g, sink, &params(EnvironmentModel::Noiseless, 1600), None, None, None).unwrap();
    let d_noiseless =
        (efficiency(&coarse, 0.5).unwrap() - efficiency(&fine, 0.5).unwrap()).abs();
    assert!(d_noiseless < 1e-4, "noiseless step sensitivity {d_noiseless}");

    let traj = sample_trajectory(1.0, TUP, &mut ChaCha8Rng::seed_from_u64(22)).unwrap();
    let rtn = RtnParams::new(10.0, 1.0).unwrap();
    let coarse = evolve(
        &g,
        sink,
        &params(EnvironmentModel::RtnOnly, 800),
        Some(&traj),
        None,
        Some(&rtn),
    )
    .unwrap();
    let fine = evolve(
        &g,
        sink,
        &params(EnvironmentModel::RtnOnly, 1600),
        Some(&traj),
        None,
        Some(&rtn),
    )
    .unwrap();
    let d_rtn = (efficiency(&coarse, 0.5).unwrap() - efficiency(&fine, 0.5).unwrap()).abs();
    assert!(d_rtn < 1e-4, "rtn step sensitivity {d_rtn}");
}

#[test]
fn efficiency_is_invariant_under_relabeling() {
    let g = random_removal_graph(8, 9, &mut ChaCha8Rng::seed_from_u64(31)).unwrap();
    let sink = sink_of(&g);
    let p = params(EnvironmentModel::Noiseless, 400);
    let base = efficiency(&evolve(&g, sink, &p, None, None, None).unwrap(), 0.5).unwrap();

    let perm = [5, 2, 7, 0, 4, 6, 1, 3];
    let relabeled = g.relabel(&perm).unwrap();
    let rec = evolve_from(&relabeled, perm[0], perm[sink], &p, None, None, None).unwrap();
    let eta = efficiency(&rec, 0.5).unwrap();
    assert!((eta - base).abs() < 1e-10, "{eta} vs {base}");
}

#[test]
fn decoupled_bath_equals_noiseless() {
    let g = complete_graph(10).unwrap();
    let sink = sink_of(&g);
    let plain =
        evolve(&g, sink, &params(EnvironmentModel::Noiseless, 200), None, None, None).unwrap();
    let bath = evolve(
        &g,
        sink,
        &params(EnvironmentModel::BathOnly, 200),
        None,
        Some(zero_kernels()),
        None,
    )
    .unwrap();
    for (a, b) in plain.rho_ss.iter().zip(bath.rho_ss.iter()) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn faint_telegraph_drive_approaches_bath_only() {
    // flips present but amplitude ~0 exercises the general convolution
    // engine against the incremental eigenbasis engine
    let g = Graph::new(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
    let sink = sink_of(&g);
    let traj = RtnTrajectory {
        initial_sign: 1,
        flip_times: vec![0.7, 1.3, 2.2],
        t_up: TUP,
    };
    let rtn = RtnParams::new(1e-9, 1.0).unwrap();
    let driven = evolve(
        &g,
        sink,
        &params(EnvironmentModel::BathRtn, 200),
        Some(&traj),
        Some(test_kernels()),
        Some(&rtn),
    )
    .unwrap();
    let still = evolve(
        &g,
        sink,
        &params(EnvironmentModel::BathOnly, 200),
        None,
        Some(test_kernels()),
        None,
    )
    .unwrap();
    let eta_driven = efficiency(&driven, 0.5).unwrap();
    let eta_still = efficiency(&still, 0.5).unwrap();
    assert!(
        (eta_driven - eta_still).abs() < 1e-7,
        "{eta_driven} vs {eta_still}"
    );
}

#[test]
fn missing_inputs_are_rejected() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let p = params(EnvironmentModel::RtnOnly, 100);
    assert!(matches!(
        evolve(&g, 1, &p, None, None, None),
        Err(Error::InvalidArgument(_))
    ));

    let p = params(EnvironmentModel::BathOnly, 100);
    assert!(matches!(
        evolve(&g, 1, &p, None, None, None),
        Err(Error::InvalidArgument(_))
    ));

    // kernel grid mismatch
    let p = params(EnvironmentModel::BathOnly, 150);
    assert!(matches!(
        evolve(&g, 1, &p, None, Some(test_kernels()), None),
        Err(Error::InvalidArgument(_))
    ));

    // kernels tabulated for a different bare coupling
    let mut p = params(EnvironmentModel::BathOnly, 200);
    p.v = 3.0;
    assert!(matches!(
        evolve(&g, 1, &p, None, Some(test_kernels()), None),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn record_csv_shape() {
    let g = Graph::new(2, [(0, 1)]).unwrap();
    let rec =
        evolve(&g, 1, &params(EnvironmentModel::Noiseless, 100), None, None, None).unwrap();
    let csv = rec.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 102);
    assert_eq!(lines[0], "t,rho_ss,trace");
    assert!(lines[1].starts_with("0.0000000000000000e0,"));
    assert_eq!(lines[1].split(',').count(), 3);
}

