//! Command runners.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use detnet_envelope::regress::{default_load_grid, fit_quadratic};
use detnet_envelope::rng::derive_seed;
use detnet_envelope::{
    AggregationScenario, EnvelopeGrid, Error, Mm1Params, PacketSizeDistribution, QuadraticModel, SimConfig,
    SweepPolicy, dimension_delay, find_envelope_load_with, mm1_mean_sojourn, mm1_quantile, pk_mean_sojourn,
    service_time, simulate_mg1,
};
use serde::Serialize;

use crate::cli::{
    AnalyzeArgs, Command, CompareArgs, DimensionArgs, DistArgs, EnvelopeArgs, FitArgs, ModelArgs, ReplayArgs,
    SimulateArgs,
};
use crate::error::{CliError, Result};
use crate::formats;
use crate::manifest::RunManifest;
use crate::parallel::{compare_rows, par_sweep};
use crate::records::{AnalyzeRecord, DimensionRecord, EnvelopeRecord, ModelRecord, SimulationSummary};

/// Seed offset for the model that `compare` fits when none is given, so its
/// sweep never shares streams with the comparison runs.
pub const COMPARE_FIT_SEED_INDEX: u64 = 1 << 32;

pub fn run(command: Command) -> Result<()> {
    let name = command.name();
    match &command {
        Command::Simulate(a) => simulate(a, RunManifest::new(name, a, Some(a.seed))?),
        Command::Envelope(a) => envelope(a, RunManifest::new(name, a, None)?),
        Command::Fit(a) => fit(a, RunManifest::new(name, a, a.points.is_none().then_some(a.seed))?),
        Command::Analyze(a) => analyze(a, RunManifest::new(name, a, None)?),
        Command::Dimension(a) => dimension(a, RunManifest::new(name, a, None)?),
        Command::Compare(a) => compare(a, RunManifest::new(name, a, Some(a.seed))?),
        Command::Replay(a) => replay(a),
    }
}

fn resolve_dist(args: &DistArgs) -> Result<Option<PacketSizeDistribution>> {
    if let Some(path) = &args.dist_file {
        return formats::load_distribution(path).map(Some);
    }
    Ok(args
        .dist
        .as_deref()
        .map(|name| PacketSizeDistribution::builtin(name).expect("clap restricts --dist to built-in names")))
}

fn require_dist(args: &DistArgs) -> Result<PacketSizeDistribution> {
    resolve_dist(args)?.ok_or_else(|| CliError::Usage("one of --dist or --dist-file is required".into()))
}

fn resolve_model(args: &ModelArgs) -> Result<Option<QuadraticModel>> {
    if let Some(path) = &args.model_file {
        let record: ModelRecord = serde_json::from_str(&formats::read_text(path)?)?;
        return Ok(Some(QuadraticModel::from(&record)));
    }
    Ok(args.model.as_deref().map(|name| QuadraticModel::builtin(name).expect("clap restricts --model")))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| CliError::io(path, e))
}

fn emit_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn print(text: &str) -> Result<()> {
    io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e))
}

fn simulate(args: &SimulateArgs, manifest: RunManifest) -> Result<()> {
    let dist = require_dist(&args.dist)?;
    let mut config = SimConfig::new(dist, args.capacity, args.load, args.seed).with_packets(args.packets);
    if let Some(w) = args.warmup {
        config = config.with_warmup(w);
    }
    let sample = simulate_mg1(&config)?;
    if let Some(out) = &args.out {
        formats::write_delays(create(out)?, sample.sojourns()).map_err(|e| CliError::io(out, e))?;
        manifest.write_sidecar(out)?;
    }
    let mut summary = SimulationSummary::new(
        sample.mean()?,
        &args.q.0,
        &sample.quantiles(&args.q.0)?,
        sample.len(),
        config.mean_service(),
        args.load,
    );
    summary.manifest = Some(manifest);
    emit_json(args.summary.as_deref(), &summary)
}

/// E(X) for a delay file: flag, distribution, or the simulate manifest that
/// sits next to the file.
fn envelope_mean_service(args: &EnvelopeArgs) -> Result<f64> {
    if let Some(ex) = args.ex {
        return Ok(ex);
    }
    if let Some(dist) = resolve_dist(&args.dist)? {
        return Ok(service_time(dist.mean_bytes(), args.capacity)?);
    }
    let sidecar = RunManifest::sidecar_path(&args.input);
    if args.input == Path::new("-") || !sidecar.exists() {
        return Err(CliError::Usage(format!(
            "no --ex, --dist or --dist-file, and no manifest at {}",
            sidecar.display()
        )));
    }
    let m = RunManifest::load(&sidecar)?;
    if m.command != "simulate" {
        return Err(CliError::Usage(format!("{} was written by `{}`, not `simulate`", sidecar.display(), m.command)));
    }
    let sim: SimulateArgs = serde_json::from_value(m.params)?;
    Ok(service_time(require_dist(&sim.dist)?.mean_bytes(), sim.capacity)?)
}

fn envelope(args: &EnvelopeArgs, manifest: RunManifest) -> Result<()> {
    let delays = formats::load_delays(&args.input)?;
    let mean_service = envelope_mean_service(args)?;
    let grid = EnvelopeGrid::with_load_step(args.grid_step)?;
    let result = find_envelope_load_with(&delays, mean_service, &grid)?;
    let mut record = EnvelopeRecord::from(&result);
    record.manifest = Some(manifest);
    emit_json(args.json.as_deref(), &record)
}

fn distinct_loads(loads: &[f64]) -> usize {
    let mut v = loads.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v.len()
}

fn fit(args: &FitArgs, manifest: RunManifest) -> Result<()> {
    let (points, label) = match &args.points {
        Some(path) => {
            let points = formats::parse_sweep(&path.display().to_string(), &formats::read_text(path)?)?;
            (points, "fitted".to_string())
        }
        None => {
            let dist = require_dist(&args.dist)?;
            // Reject a degenerate grid before spending time on simulation.
            let distinct = distinct_loads(&args.grid.0);
            if distinct < 3 {
                return Err(Error::DegenerateDesign { distinct }.into());
            }
            let policy = SweepPolicy {
                grid: EnvelopeGrid::with_load_step(args.grid_step)?,
                ..SweepPolicy::new(args.seed).with_packets(args.packets)
            };
            let points = par_sweep(&dist, args.capacity, &args.grid.0, &policy)?;
            (points, format!("fitted-{}", dist.name()))
        }
    };
    if let Some(out) = &args.sweep_out {
        formats::write_sweep(create(out)?, &points)?;
        manifest.write_sidecar(out)?;
    }
    let model = QuadraticModel { label, ..fit_quadratic(&points)? };
    let mut record = ModelRecord::from(&model);
    record.manifest = Some(manifest);
    emit_json(args.model_out.as_deref(), &record)
}

fn analyze(args: &AnalyzeArgs, manifest: RunManifest) -> Result<()> {
    let params = Mm1Params::new(args.ex, args.rho)?;
    let quantiles = args.q.0.iter().map(|&q| Ok((q, mm1_quantile(q, params)?))).collect::<Result<Vec<_>>>()?;
    let pk = args.scv.map(|scv| pk_mean_sojourn(args.ex, args.rho, scv)).transpose()?;
    let mean = mm1_mean_sojourn(params);

    let mut table = format!("{:<10} {:>15}\n", "E(X)", format!("{:.6e}", args.ex));
    table += &format!("{:<10} {:>15}\n", "rho", args.rho);
    table += &format!("{:<10} {:>15}\n", "mean", format!("{mean:.6e}"));
    if let Some(pk) = pk {
        table += &format!("{:<10} {:>15}\n", "pk_mean", format!("{pk:.6e}"));
    }
    for (q, d) in &quantiles {
        table += &format!("{:<10} {:>15}\n", format!("q={q}"), format!("{d:.6e}"));
    }
    print(&table)?;

    if let Some(path) = &args.json {
        let mut record = AnalyzeRecord::new(args.ex, args.rho, mean, &quantiles, pk);
        record.manifest = Some(manifest);
        emit_json(Some(path), &record)?;
    }
    Ok(())
}

fn dimension(args: &DimensionArgs, manifest: RunManifest) -> Result<()> {
    let model = resolve_model(&args.model)?
        .ok_or_else(|| CliError::Usage("one of --model or --model-file is required".into()))?;
    let dist = require_dist(&args.dist)?;
    let scenario =
        AggregationScenario::new(args.users, args.user_mean, args.user_sd, args.capacity).with_sigma_multiplier(args.k);
    let report = dimension_delay(&scenario, &model, &dist, &args.q.0)?;

    let row = |name: &str, value: String| format!("{name:<20} {value:>15}\n");
    let mut table = row("aggregate_mean_bps", format!("{:.6e}", report.aggregate_mean_bps));
    table += &row("aggregate_sd_bps", format!("{:.6e}", report.aggregate_sd_bps));
    table += &row("peak_bps", format!("{:.6e}", report.peak_bps));
    table += &row("rho_real", format!("{:.6}", report.rho_real));
    table += &row("rho_env", format!("{:.6}", report.rho_env));
    table += &row("mean_service_s", format!("{:.6e}", report.mean_service_s));
    table += &row("mean_delay_s", format!("{:.6e}", report.mean_delay_s));
    for (q, d) in &report.percentiles {
        table += &row(&format!("delay_q{q}_s"), format!("{d:.6e}"));
    }
    print(&table)?;

    if let Some(path) = &args.json {
        let mut record = DimensionRecord::new(&report, &model.label);
        record.manifest = Some(manifest);
        emit_json(Some(path), &record)?;
    }
    Ok(())
}

fn compare(args: &CompareArgs, manifest: RunManifest) -> Result<()> {
    let dist = require_dist(&args.dist)?;
    let model = match resolve_model(&args.model)? {
        Some(m) => m,
        None => {
            let policy = SweepPolicy::new(derive_seed(args.seed, COMPARE_FIT_SEED_INDEX)).with_packets(args.packets);
            let points = par_sweep(&dist, args.capacity, &default_load_grid(), &policy)?;
            let model = QuadraticModel { label: format!("fitted-{}", dist.name()), ..fit_quadratic(&points)? };
            if let Some(path) = &args.model_out {
                let mut record = ModelRecord::from(&model);
                record.manifest = Some(manifest.clone());
                emit_json(Some(path), &record)?;
            }
            model
        }
    };
    let rows = compare_rows(&dist, args.capacity, &args.grid.0, &model, args.packets, args.seed)?;
    match &args.out {
        Some(out) => {
            formats::write_compare(create(out)?, &rows)?;
            manifest.write_sidecar(out)?;
        }
        None => formats::write_compare(io::stdout().lock(), &rows)?,
    }
    Ok(())
}

fn replay(args: &ReplayArgs) -> Result<()> {
    let m = RunManifest::load(&args.manifest)?;
    let tagged = serde_json::json!({ m.command.clone(): m.params });
    let mut command: Command =
        serde_json::from_value(tagged).map_err(|e| CliError::Usage(format!("cannot replay `{}`: {e}", m.command)))?;
    if let Some(out) = &args.out {
        match &mut command {
            Command::Simulate(a) => a.out = Some(out.clone()),
            Command::Fit(a) => a.sweep_out = Some(out.clone()),
            Command::Compare(a) => a.out = Some(out.clone()),
            other => return Err(CliError::Usage(format!("`{}` has no CSV output to redirect", other.name()))),
        }
    }
    run(command)
}
