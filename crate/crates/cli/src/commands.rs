use std::path::Path;

use edae::eval::{emit_report, run_experiment_with, ReportFormat};
use edae::io::write_atomic;
use edae::models::{load_model, reconstruct, save_model, MethodRegistry, TrainingData};
use edae::rng::derive_seed;
use edae::series::{corrupt_series, csv_io, CorruptedSeries};
use edae::synthetic::{generate_power_profile, generate_random_sequence};
use edae::Result;

use crate::config::{echo_path, required, to_json, BenchRun, CorruptRun, GenerateKind, GenerateRun, ReconstructRun, TrainRun};

fn echo<T: serde::Serialize>(run: &T, path: &Path) -> Result<()> {
    write_atomic(path, &to_json(run)?)
}

pub fn generate(run: &GenerateRun) -> Result<()> {
    let out = required(&run.out, "out")?;
    let series = match run.kind {
        GenerateKind::Random => {
            run.random.validate()?;
            generate_random_sequence(&run.random)?
        }
        GenerateKind::Power => {
            run.power.validate()?;
            generate_power_profile(&run.power)?
        }
    };
    csv_io::write_series(out, &series)?;
    echo(run, &echo_path(out))?;
    eprintln!("wrote {} rows x {} channels to {}", series.len(), series.channels(), out.display());
    Ok(())
}

pub fn corrupt(run: &CorruptRun) -> Result<()> {
    let input = required(&run.input, "input")?;
    let out = required(&run.out, "out")?;
    let mask_out = required(&run.mask_out, "mask_out")?;
    let clean = csv_io::read_series(input)?;
    let corrupted = corrupt_series(&clean, run.rho, run.seed)?;
    csv_io::write_series(out, corrupted.series())?;
    csv_io::write_mask(mask_out, corrupted.mask(), corrupted.series())?;
    echo(run, &echo_path(out))?;
    eprintln!("corrupted {} entries", corrupted.mask().corrupted_count());
    Ok(())
}

pub fn train(run: &TrainRun) -> Result<()> {
    let input = required(&run.input, "input")?;
    let model_out = required(&run.model_out, "model_out")?;
    run.train.validate()?;
    let registry = MethodRegistry::builtin();
    let method = registry.get(&run.method)?;
    let clean = csv_io::read_series(input)?;
    let corrupted = match &run.mask {
        Some(mask) => CorruptedSeries::from_parts(clean.clone(), csv_io::read_mask(mask)?)?,
        None => corrupt_series(
            &clean,
            run.train.resolved_rho_train(),
            derive_seed(run.train.seed, b"cli/train-mask"),
        )?,
    };
    let model = method.fit(
        TrainingData {
            clean: &clean,
            corrupted: &corrupted,
        },
        &run.train,
    )?;
    save_model(&model, model_out)?;
    echo(run, &echo_path(model_out))?;
    if let Some(loss) = model.meta.final_loss {
        eprintln!("{} trained, final loss {loss:.6}", model.kind);
    }
    Ok(())
}

pub fn reconstruct_cmd(run: &ReconstructRun) -> Result<()> {
    let model_path = required(&run.model, "model")?;
    let input = required(&run.input, "input")?;
    let mask = required(&run.mask, "mask")?;
    let out = required(&run.out, "out")?;
    let model = load_model(model_path)?;
    let corrupted = csv_io::read_corrupted(input, mask)?;
    let rec = reconstruct(&model, &corrupted)?;
    csv_io::write_series(out, &rec)?;
    echo(run, &echo_path(out))?;
    Ok(())
}

pub fn bench(run: &BenchRun) -> Result<()> {
    let out_dir = required(&run.out_dir, "out_dir")?;
    let registry = MethodRegistry::builtin();
    run.plan.validate(&registry)?;
    let report = run_experiment_with(&run.plan, &registry)?;
    emit_report(&report, ReportFormat::Table, out_dir)?;
    emit_report(&report, ReportFormat::PlotData, out_dir)?;
    echo(run, &out_dir.join("config.json"))?;
    for cell in report.failed_cells() {
        let reason = cell
            .runs
            .iter()
            .find_map(|r| r.error.as_deref())
            .unwrap_or("unknown error");
        eprintln!("warning: {} at rho={} FAILED: {reason}", cell.method, cell.rho);
    }
    print!("{}", edae::eval::table_text(&report));
    Ok(())
}
