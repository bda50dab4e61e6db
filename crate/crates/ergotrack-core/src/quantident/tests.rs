use super::*;
use crate::dynsys::{CostFunction, ObservationSource, ObservedWindow, TopologicalSystem};
use crate::tracking::{optimal_tracking, TrackingOptions, TrackingProblem};

fn sqrt2_over_4() -> f64 {
    2.0f64.sqrt() / 4.0
}

#[test]
fn fixed_point_run_is_all_zeros() {
    let run = generate(
        Angle::rational(0, 1).unwrap(),
        0.0,
        4,
        RngStream::new(1),
        &Partition::halves(),
        Some(0.25),
    )
    .unwrap();
    assert_eq!(run.observed, vec![0, 0, 0, 0]);
    assert_eq!(run.clean, run.observed);
}

#[test]
fn quarter_turn_run_codes_its_orbit() {
    let run = generate(
        Angle::rational(1, 4).unwrap(),
        0.0,
        8,
        RngStream::new(1),
        &Partition::halves(),
        Some(0.0),
    )
    .unwrap();
    assert_eq!(run.observed, vec![0, 0, 1, 1, 0, 0, 1, 1]);
}

#[test]
fn near_fair_noise_makes_near_fair_bits() {
    let run = generate(
        Angle::rational(1, 4).unwrap(),
        0.499,
        100_000,
        RngStream::new(5),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let ones: u64 = run.observed.iter().map(|&b| b as u64).sum();
    let bias = (ones as f64 / 100_000.0 - 0.5).abs();
    assert!(bias <= 0.02, "bias {bias}");
}

#[test]
fn flip_probability_must_stay_below_one_half() {
    for p in [0.5, 0.7, 1.0, -0.1] {
        assert!(matches!(
            generate(
                Angle::rational(1, 4).unwrap(),
                p,
                10,
                RngStream::new(1),
                &Partition::halves(),
                None,
            ),
            Err(Error::ProbabilityRange { .. })
        ));
    }
}

#[test]
fn generate_matches_the_observation_source_byte_for_byte() {
    let partition = Partition::halves();
    for (seed, angle) in [
        (3u64, Angle::float(sqrt2_over_4()).unwrap()),
        (4, Angle::rational(2, 7).unwrap()),
    ] {
        let stream = RngStream::new(seed);
        let run = generate(angle, 0.2, 500, stream, &partition, None).unwrap();
        let source = ObservationSource::noisy_label(
            ObservationSource::rotation(angle, None).unwrap(),
            partition.clone(),
            0.2,
        )
        .unwrap();
        let sampled = source.sample(500, stream).unwrap();
        assert_eq!(run.observed.as_slice(), sampled.as_symbols().unwrap());
    }
}

#[test]
fn risk_at_the_truth_is_zero_without_noise() {
    let astar = sqrt2_over_4();
    let run = generate(
        Angle::float(astar).unwrap(),
        0.0,
        5_000,
        RngStream::new(9),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let r = hamming_risk(&Partition::halves(), astar, run.u_init, &run.observed).unwrap();
    assert_eq!(r, 0.0);
}

#[test]
fn risk_at_the_truth_concentrates_at_the_flip_rate() {
    let astar = sqrt2_over_4();
    let run = generate(
        Angle::float(astar).unwrap(),
        0.2,
        100_000,
        RngStream::new(9),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let r = hamming_risk(&Partition::halves(), astar, run.u_init, &run.observed).unwrap();
    assert!((r - 0.2).abs() <= 0.01, "risk {r}");
}

#[test]
fn constant_candidate_against_fair_coin_sits_at_one_half() {
    let w = ObservationSource::iid_binary(0.5)
        .unwrap()
        .sample(100_000, RngStream::new(17))
        .unwrap();
    let ys = w.as_symbols().unwrap();
    let r = hamming_risk(&Partition::halves(), 0.0, 0.25, ys).unwrap();
    assert!((r - 0.5).abs() <= 0.01, "risk {r}");
}

#[test]
fn rational_labels_are_periodic_with_the_denominator() {
    let p = Partition::halves();
    let labels = rotation_labels(Angle::rational(1, 3).unwrap(), 0.1, &p, 12).unwrap();
    for k in 0..9 {
        assert_eq!(labels[k], labels[k + 3]);
    }
}

#[test]
fn sweep_agrees_with_direct_grid_minimization() {
    let partition = Partition::halves();
    let u_grid = Grid::new(0.0, 0.04, 25).unwrap();
    let src = ObservationSource::iid_binary(0.5).unwrap();
    for seed in 0..12u64 {
        let w = src.sample(400, RngStream::new(40 + seed)).unwrap();
        let ys = w.as_symbols().unwrap();
        for theta in [0.0, 0.25, sqrt2_over_4(), 0.1234, 0.5] {
            let (c_sweep, u_sweep) = super::sweep_theta(theta, &u_grid, &partition, ys).unwrap();
            let mut best = (u64::MAX, f64::INFINITY);
            for j in 0..u_grid.len() {
                let u = u_grid.point(j);
                let c = super::count_mismatches(theta, u, &partition, ys).unwrap();
                if c < best.0 {
                    best = (c, u);
                }
            }
            assert_eq!((c_sweep, u_sweep), best, "theta {theta} seed {seed}");
        }
    }
}

#[test]
fn sweep_handles_grids_that_start_above_zero() {
    let partition = Partition::halves();
    let u_grid = Grid::new(0.37, 0.031, 17).unwrap();
    let w = ObservationSource::iid_binary(0.4)
        .unwrap()
        .sample(300, RngStream::new(77))
        .unwrap();
    let ys = w.as_symbols().unwrap();
    for theta in [0.051, 0.33] {
        let (c_sweep, u_sweep) = super::sweep_theta(theta, &u_grid, &partition, ys).unwrap();
        let mut best = (u64::MAX, f64::INFINITY);
        for j in 0..u_grid.len() {
            let u = u_grid.point(j);
            let c = super::count_mismatches(theta, u, &partition, ys).unwrap();
            if c < best.0 {
                best = (c, u);
            }
        }
        assert_eq!((c_sweep, u_sweep), best, "theta {theta}");
    }
}

#[test]
fn exactly_representable_angle_is_recovered_exactly() {
    let family = RotationFamily::new(
        Grid::covering(0.0, 0.5, 0.01).unwrap(),
        Grid::new(0.0, 0.01, 100).unwrap(),
        Partition::halves(),
    )
    .unwrap();
    // the window must be long enough to starve the refinement ladder: a rung
    // one fine step (1e-4) below 1/4 drifts by n*1e-4 > 1/4 across the
    // window, so no start point keeps its labels clean
    let run = generate(
        Angle::rational(1, 4).unwrap(),
        0.0,
        4_000,
        RngStream::new(2),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let est = estimate_theta(&family, &run.observed).unwrap();
    assert_eq!(est.theta, 0.25);
    assert_eq!(est.risk, 0.0);
    assert_eq!(est.u, run.u_init);
}

#[test]
fn on_grid_float_angle_is_recovered_bitwise() {
    let family = RotationFamily::new(
        Grid::covering(0.3, 0.36, 1e-3).unwrap(),
        Grid::new(0.0, 0.02, 50).unwrap(),
        Partition::halves(),
    )
    .unwrap();
    // truth on both grids, so the zero-risk pair is itself a candidate
    let astar = family.theta_grid().point(33);
    let ustar = family.u_grid().point(36);
    let run = generate(
        Angle::float(astar).unwrap(),
        0.0,
        2_000,
        RngStream::new(6),
        &Partition::halves(),
        Some(ustar),
    )
    .unwrap();
    let est = estimate_theta(&family, &run.observed).unwrap();
    assert_eq!(est.theta, astar);
    assert_eq!(est.risk, 0.0);
    // the start-point ladder may slide to an equally clean start a few fine
    // steps below the truth; the angle itself must not move
    assert!((est.u - ustar).abs() <= 1e-3, "u {} vs {}", est.u, ustar);
}

#[test]
fn coarse_minimum_respects_the_noise_floor() {
    let family = RotationFamily::standard();
    let run = generate(
        Angle::float(sqrt2_over_4()).unwrap(),
        0.2,
        20_000,
        RngStream::new(12),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let scan = grid_risk_scan(
        &family.theta_grid(),
        &family.u_grid(),
        family.partition(),
        &run.observed,
        false,
    )
    .unwrap();
    let sigma = (0.2f64 * 0.8 / 20_000.0).sqrt();
    assert!(scan.risk >= 0.2 - 3.0 * sigma, "risk {}", scan.risk);
}

#[test]
fn shifting_all_risks_keeps_the_same_argmin() {
    let family = RotationFamily::new(
        Grid::covering(0.0, 0.5, 0.01).unwrap(),
        Grid::new(0.0, 0.05, 20).unwrap(),
        Partition::halves(),
    )
    .unwrap();
    let run = generate(
        Angle::float(0.17).unwrap(),
        0.1,
        300,
        RngStream::new(8),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let scan = grid_risk_scan(
        &family.theta_grid(),
        &family.u_grid(),
        family.partition(),
        &run.observed,
        false,
    )
    .unwrap();
    // maximize 1 - risk by brute force under the same tie-break
    let mut best = (f64::NEG_INFINITY, f64::INFINITY, f64::INFINITY);
    let tg = family.theta_grid();
    let ug = family.u_grid();
    for i in 0..tg.len() {
        for j in 0..ug.len() {
            let (th, u) = (tg.point(i), ug.point(j));
            let score = 1.0 - hamming_risk(family.partition(), th, u, &run.observed).unwrap();
            if score > best.0 || (score == best.0 && (th, u) < (best.1, best.2)) {
                best = (score, th, u);
            }
        }
    }
    assert_eq!((scan.theta, scan.u), (best.1, best.2));
    assert_eq!(scan.risk, 1.0 - best.0);
}

#[test]
fn fiber_tracking_and_the_estimator_are_one_route() {
    let family = RotationFamily::new(
        Grid::covering(0.0, 0.5, 0.01).unwrap(),
        Grid::new(0.0, 0.05, 20).unwrap(),
        Partition::halves(),
    )
    .unwrap();
    let run = generate(
        Angle::float(0.29).unwrap(),
        0.05,
        400,
        RngStream::new(30),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let est = estimate_theta(&family, &run.observed).unwrap();
    let problem = TrackingProblem {
        reference: TopologicalSystem::FiberProduct {
            theta_grid: family.theta_grid(),
            u_grid: family.u_grid(),
            partition: family.partition().clone(),
        },
        cost: CostFunction::hamming(),
    };
    let w = ObservedWindow::Symbols(run.observed.clone());
    let r = optimal_tracking(&problem, &w, &TrackingOptions::default()).unwrap();
    assert_eq!(r.value, est.risk);
    match r.argmin.unwrap() {
        crate::dynsys::SystemState::Fiber { theta, .. } => assert_eq!(theta, est.theta),
        other => panic!("unexpected argmin {other:?}"),
    }
}

#[test]
fn trace_rows_estimate_prefixes() {
    let family = RotationFamily::new(
        Grid::covering(0.0, 0.5, 0.02).unwrap(),
        Grid::new(0.0, 0.1, 10).unwrap(),
        Partition::halves(),
    )
    .unwrap();
    let run = generate(
        Angle::float(0.41).unwrap(),
        0.0,
        600,
        RngStream::new(14),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let rows = estimate_trace(&family, &run.observed, &[150, 300, 600]).unwrap();
    assert_eq!(rows.len(), 3);
    for (n, est) in rows {
        let direct = estimate_theta(&family, &run.observed[..n]).unwrap();
        assert_eq!(est, direct);
    }
    assert!(estimate_trace(&family, &run.observed, &[0, 10]).is_err());
    assert!(estimate_trace(&family, &run.observed, &[300, 150]).is_err());
    assert!(estimate_trace(&family, &run.observed, &[150, 601]).is_err());
}

#[test]
fn noise_floor_is_an_identity_without_noise() {
    let family = RotationFamily::standard();
    let run = generate(
        Angle::float(0.23).unwrap(),
        0.0,
        2_000,
        RngStream::new(3),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let rep = noise_floor_check(&family, &run, 0.4, 0.0).unwrap();
    assert_eq!(rep.slack, 0.0);
    assert!(rep.holds);
}

#[test]
fn noise_floor_binds_near_the_truth() {
    let astar = sqrt2_over_4();
    let run = generate(
        Angle::float(astar).unwrap(),
        0.2,
        50_000,
        RngStream::new(9),
        &Partition::halves(),
        None,
    )
    .unwrap();
    let family = RotationFamily::standard();
    let rep = noise_floor_check(&family, &run, astar, 0.02).unwrap();
    assert!(rep.holds, "slack {}", rep.slack);
    assert!((rep.noisy_risk - 0.2).abs() <= 0.03, "noisy {}", rep.noisy_risk);
}

#[test]
fn grids_outside_their_ranges_are_rejected() {
    let halves = Partition::halves();
    assert!(RotationFamily::new(
        Grid::new(0.0, 0.1, 7).unwrap(), // reaches 0.6 > 1/2
        Grid::new(0.0, 0.01, 100).unwrap(),
        halves.clone(),
    )
    .is_err());
    assert!(RotationFamily::new(
        Grid::new(0.0, 1e-3, 501).unwrap(),
        Grid::new(0.5, 0.1, 6).unwrap(), // reaches 1.0
        halves,
    )
    .is_err());
}

#[test]
fn labels_must_fit_the_partition() {
    let family = RotationFamily::standard();
    let bad = vec![0u8, 1, 2, 0];
    assert!(estimate_theta(&family, &bad).is_err());
    assert!(estimate_theta(&family, &[]).is_err());
}
