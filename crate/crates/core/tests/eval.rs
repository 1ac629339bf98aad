use edae::eval::{
    emit_report, nmse, nmse_with_scope, run_experiment, DataSource, ExperimentPlan, NmseScope, ReportFormat,
};
use edae::models::TrainConfig;
use edae::series::{corrupt_series, csv_io, TimeSeries};
use edae::synthetic::{generate_random_sequence, RandomSeqConfig};
use edae::Error;
use proptest::prelude::*;

fn small_plan() -> ExperimentPlan {
    ExperimentPlan {
        dataset: DataSource::Random(RandomSeqConfig {
            n: 200,
            ..Default::default()
        }),
        methods: vec!["IM".into(), "DAE".into(), "EDAE_NN".into()],
        proportions: vec![0.1, 0.3],
        repeats: 2,
        train: TrainConfig {
            epochs: 2,
            hidden: 6,
            ..Default::default()
        },
        ..Default::default()
    }
}

#[test]
fn calibration_zero_and_perfect() {
    let clean = generate_random_sequence(&RandomSeqConfig::default()).unwrap();
    let c = corrupt_series(&clean, 0.2, 1).unwrap();
    assert_eq!(nmse(&clean, c.series(), c.mask()).unwrap(), 1.0);
    assert_eq!(nmse(&clean, &clean, c.mask()).unwrap(), 0.0);
}

#[test]
fn scopes_differ_only_in_denominator_and_support() {
    let clean = TimeSeries::from_column(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    let rec = TimeSeries::from_column(vec![1.0, 0.0, 3.0, 4.0]).unwrap();
    let mask = edae::series::CorruptionMask::new(vec![false, true, false, false], 4, 1).unwrap();
    assert_eq!(nmse_with_scope(&clean, &rec, &mask, NmseScope::Masked).unwrap(), 1.0);
    assert_eq!(nmse_with_scope(&clean, &rec, &mask, NmseScope::All).unwrap(), 4.0 / 30.0);
}

#[test]
fn undefined_and_empty_cases() {
    let zeros = TimeSeries::from_column(vec![0.0, 0.0]).unwrap();
    let mask = edae::series::CorruptionMask::new(vec![true, false], 2, 1).unwrap();
    assert!(matches!(nmse(&zeros, &zeros, &mask), Err(Error::UndefinedMetric(_))));
    let none = edae::series::CorruptionMask::empty(2, 1);
    assert!(matches!(nmse(&zeros, &zeros, &none), Err(Error::InvalidArgument(_))));
}

proptest! {
    #[test]
    fn nmse_is_scale_invariant(
        values in prop::collection::vec(-5.0f64..5.0, 20..60),
        noise in prop::collection::vec(-1.0f64..1.0, 60),
        scale in 0.01f64..100.0,
    ) {
        let n = values.len();
        let clean = TimeSeries::from_column(values.clone()).unwrap();
        let rec = TimeSeries::from_column(values.iter().zip(&noise).map(|(v, e)| v + e).collect()).unwrap();
        let mask = corrupt_series(&clean, 0.5, 3).unwrap().mask().clone();
        prop_assume!(values.iter().enumerate().any(|(i, v)| mask.flags()[i] && *v != 0.0));
        let a = nmse(&clean, &rec, &mask).unwrap();
        let sc = TimeSeries::from_column(clean.values().iter().map(|v| v * scale).collect()).unwrap();
        let sr = TimeSeries::from_column(rec.values().iter().map(|v| v * scale).collect()).unwrap();
        let b = nmse(&sc, &sr, &mask).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0), "{} vs {} (n={})", a, b, n);
    }
}

#[test]
fn grid_is_deterministic_and_reports_are_byte_identical() {
    let plan = small_plan();
    let a = run_experiment(&plan).unwrap();
    let b = run_experiment(&plan).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.cells.len(), 6);
    assert!(a.cells.iter().all(|c| c.runs.len() == 2 && !c.failed()));

    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    for format in [ReportFormat::Table, ReportFormat::PlotData] {
        let f1 = emit_report(&a, format, d1.path()).unwrap();
        let f2 = emit_report(&b, format, d2.path()).unwrap();
        assert_eq!(f1.len(), f2.len());
        for (p, q) in f1.iter().zip(&f2) {
            assert_eq!(p.file_name(), q.file_name());
            assert_eq!(std::fs::read(p).unwrap(), std::fs::read(q).unwrap(), "{}", p.display());
        }
    }
    let cells = std::fs::read_to_string(d1.path().join("nmse_cells.csv")).unwrap();
    assert!(cells.starts_with("method,rho,seed,nmse,seconds\n"));
    assert_eq!(cells.lines().count(), 1 + 6 * 2);
}

#[test]
fn plot_data_has_one_row_per_time_step() {
    let plan = small_plan();
    let report = run_experiment(&plan).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = emit_report(&report, ReportFormat::PlotData, dir.path()).unwrap();
    assert_eq!(files.len(), 3);
    for f in files {
        let text = std::fs::read_to_string(&f).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,clean,corrupted,reconstructed"));
        assert_eq!(lines.count(), 200, "{}", f.display());
    }
}

#[test]
fn adding_a_method_leaves_other_cells_unchanged() {
    let plan = small_plan();
    let wider = ExperimentPlan {
        methods: vec!["ELM".into(), "IM".into(), "DAE".into(), "EDAE_NN".into()],
        ..plan.clone()
    };
    let a = run_experiment(&plan).unwrap();
    let b = run_experiment(&wider).unwrap();
    for cell in &a.cells {
        assert_eq!(Some(cell), b.cell(&cell.method, cell.rho));
    }
}

#[test]
fn failed_cells_are_isolated() {
    let plan = ExperimentPlan {
        methods: vec!["IM".into()],
        proportions: vec![0.2, 1.0],
        repeats: 1,
        ..small_plan()
    };
    let report = run_experiment(&plan).unwrap();
    assert!(report.cell("IM", 0.2).unwrap().mean().is_some());
    let failed: Vec<_> = report.failed_cells().collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0].rho, 1.0);
    assert!(edae::eval::table_text(&report).contains("FAILED"));
}

#[test]
fn csv_dataset_is_split_in_time() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let s = generate_random_sequence(&RandomSeqConfig {
        n: 300,
        seed: 5,
        ..Default::default()
    })
    .unwrap();
    csv_io::write_series(&path, &s).unwrap();
    let source = DataSource::Csv {
        path: path.clone(),
        train_fraction: 0.5,
    };
    let (train, test) = edae::eval::load_split(&source, 0, 0).unwrap();
    assert_eq!(train.len(), 150);
    assert_eq!(test.len(), 150);
    assert_eq!(train.values(), &s.values()[..150]);
    assert_eq!(test.values(), &s.values()[150..]);

    let plan = ExperimentPlan {
        dataset: source,
        methods: vec!["IM".into()],
        repeats: 1,
        ..Default::default()
    };
    assert!(run_experiment(&plan).unwrap().failed_cells().next().is_none());
}
