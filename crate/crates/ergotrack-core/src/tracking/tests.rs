use super::*;
use crate::dynsys::{DensityKind, ObservationSource, Partition, RngStream, SftGraph};

fn hamming_subshift(graph: SftGraph) -> TrackingProblem {
    TrackingProblem {
        reference: TopologicalSystem::subshift(graph),
        cost: CostFunction::hamming(),
    }
}

#[test]
fn window_cost_counts_mismatches_on_words() {
    let problem = hamming_subshift(SftGraph::full_shift(2).unwrap());
    let x0 = SystemState::word(vec![0, 1, 1, 0], false).unwrap();
    let w = ObservedWindow::Symbols(vec![0, 1, 0, 0]);
    assert_eq!(window_cost_sum(&problem, &x0, &w).unwrap(), 1.0);
    assert_eq!(empirical_cost(&problem, &x0, &w).unwrap(), 0.25);
}

#[test]
fn periodic_words_wrap_and_finite_words_do_not() {
    let problem = hamming_subshift(SftGraph::golden_mean());
    let w = ObservedWindow::Symbols(vec![0, 1, 0, 1, 0]);
    let periodic = SystemState::word(vec![0, 1], true).unwrap();
    assert_eq!(window_cost_sum(&problem, &periodic, &w).unwrap(), 0.0);
    let finite = SystemState::word(vec![0, 1], false).unwrap();
    assert!(matches!(
        window_cost_sum(&problem, &finite, &w),
        Err(Error::WindowTooShort { .. })
    ));
}

#[test]
fn circle_cost_follows_the_orbit() {
    // quarter turn from 0 visits 0, 1/4, 1/2, 3/4: labels 0 0 1 1
    let problem = TrackingProblem {
        reference: TopologicalSystem::circle(Angle::rational(1, 4).unwrap()),
        cost: CostFunction::hamming(),
    };
    let x0 = SystemState::circle(0.0).unwrap();
    let w = ObservedWindow::Symbols(vec![0, 0, 1, 1]);
    assert_eq!(window_cost_sum(&problem, &x0, &w).unwrap(), 0.0);
    let w_flip = ObservedWindow::Symbols(vec![1, 0, 1, 0]);
    assert_eq!(window_cost_sum(&problem, &x0, &w_flip).unwrap(), 2.0);
}

#[test]
fn float_and_rational_angles_cost_the_same_quarter_orbit() {
    let w = ObservedWindow::Symbols(vec![0, 0, 1, 1, 0, 0, 1, 1]);
    let x0 = SystemState::circle(0.0).unwrap();
    for angle in [Angle::float(0.25).unwrap(), Angle::rational(1, 4).unwrap()] {
        let problem = TrackingProblem {
            reference: TopologicalSystem::circle(angle),
            cost: CostFunction::hamming(),
        };
        assert_eq!(window_cost_sum(&problem, &x0, &w).unwrap(), 0.0);
    }
}

#[test]
fn golden_mean_blocks_the_all_ones_window() {
    let problem = hamming_subshift(SftGraph::golden_mean());
    let w = ObservedWindow::Symbols(vec![1, 1, 1, 1]);
    let r = optimal_tracking(&problem, &w, &TrackingOptions::default()).unwrap();
    assert_eq!(r.value, 0.5);
    assert_eq!(
        r.argmin,
        Some(SystemState::word(vec![0, 1, 0, 1], false).unwrap())
    );
}

#[test]
fn full_shift_tracks_any_window_perfectly() {
    let problem = hamming_subshift(SftGraph::full_shift(2).unwrap());
    let src = ObservationSource::iid_binary(0.5).unwrap();
    let w = src.sample(100, RngStream::new(3)).unwrap();
    let r = optimal_tracking(&problem, &w, &TrackingOptions::default()).unwrap();
    assert_eq!(r.value, 0.0);
    match r.argmin.unwrap() {
        SystemState::Word { symbols, .. } => assert_eq!(&symbols[..], w.as_symbols().unwrap()),
        other => panic!("unexpected argmin {other:?}"),
    }
}

#[test]
fn infeasible_instances_report_infinite_value() {
    // both rows infinite against observation 1: nothing tracks it
    let table = vec![vec![0.0, f64::INFINITY], vec![0.5, f64::INFINITY]];
    let problem = TrackingProblem {
        reference: TopologicalSystem::subshift(SftGraph::full_shift(2).unwrap()),
        cost: CostFunction::custom(table).unwrap(),
    };
    let w = ObservedWindow::Symbols(vec![0, 1]);
    let r = optimal_tracking(&problem, &w, &TrackingOptions::default()).unwrap();
    assert!(r.is_infeasible());
    assert_eq!(r.value, f64::INFINITY);
    assert_eq!(r.argmin_id(), "infeasible");
}

#[test]
fn circle_tracking_recovers_a_rotation_window() {
    // period-8 orbit from 0.412: every start in [0.375, 0.5) produces the
    // same label word, so tracking is perfect and the tie-break pins the
    // argmin to the left edge of that interval
    let angle = Angle::rational(1, 8).unwrap();
    let src = ObservationSource::noisy_label(
        ObservationSource::rotation(angle, Some(0.412)).unwrap(),
        Partition::halves(),
        0.0,
    )
    .unwrap();
    let w = src.sample(50, RngStream::new(11)).unwrap();
    let problem = TrackingProblem {
        reference: TopologicalSystem::circle(angle),
        cost: CostFunction::hamming(),
    };
    let r = optimal_tracking(&problem, &w, &TrackingOptions::default()).unwrap();
    assert_eq!(r.value, 0.0);
    match r.argmin.unwrap() {
        SystemState::Circle { x, .. } => {
            assert!((x - 0.375).abs() <= 2e-5, "start {x} not at the interval edge")
        }
        other => panic!("unexpected argmin {other:?}"),
    }
}

#[test]
fn circle_tracking_tie_breaks_toward_smaller_start() {
    // constant window: every start with the right label ties; the smallest
    // grid point in the label cell must win
    let problem = TrackingProblem {
        reference: TopologicalSystem::circle(Angle::rational(0, 1).unwrap()),
        cost: CostFunction::hamming(),
    };
    let w = ObservedWindow::Symbols(vec![0, 0, 0]);
    let r = optimal_tracking(&problem, &w, &TrackingOptions::default()).unwrap();
    assert_eq!(r.value, 0.0);
    match r.argmin.unwrap() {
        SystemState::Circle { x, .. } => assert_eq!(x, 0.0),
        other => panic!("unexpected argmin {other:?}"),
    }
}

#[test]
fn param_tracking_matches_the_empirical_frequency() {
    let grid = Grid::covering(0.0, 1.0, 0.01).unwrap();
    let problem = TrackingProblem {
        reference: TopologicalSystem::IdentityOnParams { grid },
        cost: CostFunction::NegLogDensity {
            family: DensityKind::Bernoulli,
        },
    };
    let src = ObservationSource::iid_binary(0.3).unwrap();
    let w = src.sample(2000, RngStream::new(9)).unwrap();
    let ones: usize = w.as_symbols().unwrap().iter().map(|&b| b as usize).sum();
    let freq = ones as f64 / 2000.0;
    let r = optimal_tracking(&problem, &w, &TrackingOptions::default()).unwrap();
    let theta = phi_estimate(&r, ParamProjection::Theta).unwrap();
    // refinement reaches within one fine step of the frequency
    assert!((theta - freq).abs() <= 1e-4 + 1e-12, "theta {theta} vs freq {freq}");
}

#[test]
fn param_tracking_without_refinement_stays_on_the_grid() {
    let grid = Grid::covering(0.0, 1.0, 0.1).unwrap();
    let problem = TrackingProblem {
        reference: TopologicalSystem::IdentityOnParams { grid },
        cost: CostFunction::NegLogDensity {
            family: DensityKind::Bernoulli,
        },
    };
    let w = ObservedWindow::Symbols(vec![1, 0, 1, 1, 0, 1, 1, 1, 0, 1]);
    let opts = TrackingOptions {
        refine: false,
        ..TrackingOptions::default()
    };
    let r = optimal_tracking(&problem, &w, &opts).unwrap();
    let theta = phi_estimate(&r, ParamProjection::Theta).unwrap();
    assert_eq!(theta, grid.point(7), "frequency 0.7 has a dedicated grid point");
}

#[test]
fn refine_points_ladder_shape() {
    let pts = refine_points(0.5, 0.01, 0.0, 1.0);
    assert_eq!(pts.len(), 201);
    assert_eq!(pts[0], 0.5 - 0.01);
    assert_eq!(pts[100], 0.5);
    assert_eq!(pts[200], 0.5 + 0.01);
    // clamped at the span edge
    let clamped = refine_points(0.0, 0.01, 0.0, 1.0);
    assert_eq!(clamped.len(), 101);
    assert_eq!(clamped[0], 0.0);
}

#[test]
fn wrapped_refinement_stays_in_the_unit_interval() {
    for center in [0.0, 1e-9, 0.9999, 0.5] {
        for p in refine_points_wrapped(center, 0.01) {
            assert!((0.0..1.0).contains(&p), "{p} escaped [0, 1)");
        }
    }
}

#[test]
fn trace_rows_track_prefixes_of_one_sample() {
    let problem = hamming_subshift(SftGraph::golden_mean());
    let src = ObservationSource::iid_binary(0.5).unwrap();
    let stream = RngStream::new(21);
    let schedule = [4usize, 16, 64];
    let trace =
        track_limit_estimate(&problem, &src, &schedule, stream, &TrackingOptions::default())
            .unwrap();
    assert_eq!(trace.rows.len(), 3);
    let full = src.sample(64, stream).unwrap();
    for (row, &n) in trace.rows.iter().zip(&schedule) {
        assert_eq!(row.n, n);
        let direct = optimal_tracking(&problem, &full.slice(0, n), &TrackingOptions::default())
            .unwrap();
        assert_eq!(row.value, direct.value);
        assert_eq!(row.argmin_id, direct.argmin_id());
    }
}

#[test]
fn schedules_must_increase_from_a_positive_start() {
    let problem = hamming_subshift(SftGraph::golden_mean());
    let src = ObservationSource::iid_binary(0.5).unwrap();
    let opts = TrackingOptions::default();
    for bad in [vec![], vec![0, 4], vec![4, 4], vec![8, 4]] {
        assert!(matches!(
            track_limit_estimate(&problem, &src, &bad, RngStream::new(1), &opts),
            Err(Error::BadSchedule)
        ));
    }
}

#[test]
fn formatted_floats_round_trip() {
    for x in [0.0, -0.0, 1.0 / 3.0, 0.1, 6.02e23, -4.9e-324, f64::MAX] {
        let s = fmt_f64(x);
        let back: f64 = s.parse().unwrap();
        assert_eq!(back.to_bits(), x.to_bits(), "{s}");
    }
    assert_eq!(fmt_f64(f64::NAN), "nan");
    assert_eq!(fmt_f64(f64::INFINITY), "inf");
    assert_eq!(fmt_f64(f64::NEG_INFINITY), "-inf");
}

#[test]
fn mismatched_states_are_rejected() {
    let problem = hamming_subshift(SftGraph::golden_mean());
    let w = ObservedWindow::Symbols(vec![0, 1]);
    let wrong = SystemState::circle(0.25).unwrap();
    assert!(window_cost_sum(&problem, &wrong, &w).is_err());
}
