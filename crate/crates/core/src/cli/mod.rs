//! The `spikewise` command line: synth, encode, train, sweep, pareto, select,
//! energy and report.
//!
//! Exit codes: 0 on success, 1 on a runtime failure, 2 on a usage or
//! configuration error. Failures print one JSON line on stderr, e.g.
//! `{"error":"invalid_parameter","field":"dist.theta_min","message":"..."}`.

mod config;

pub use config::{FileConfig, OUT_DIR_ENV};

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{evaluate, sweep, Baseline, SweepReport, ThetaGrid};
use crate::data::{
    digest_hex, load_dataset, load_rasters, load_ucihar_raw, make_synthetic, save_dataset,
    save_rasters, EncodedDataset, SyntheticSpec,
};
use crate::encoder::{Encoder, EncoderConfig};
use crate::error::{Error, Result};
use crate::lif::Surrogate;
use crate::network::{NetworkModel, SynNetBuilder, DEFAULT_TAU_CONFIG};
use crate::pareto::{
    battery_days, build_front, select_multi, select_single, spikes_to_power, Budget, Choice,
    EnergyModel, Manifest, ParetoFront,
};
use crate::trainer::{train, Schedule, ThresholdDistribution, TrainConfig};
use config::{pick, resolve_out_dir, Snapshot};

#[derive(Debug, Parser)]
#[command(name = "spikewise", version, about = "Threshold-adaptive spiking networks for IMU activity recognition")]
pub struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (else $SPIKEWISE_OUT_DIR, else the config, else `.`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 lets the pool decide. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic 3-class IMU dataset archive.
    Synth(SynthArgs),
    /// Encode a dataset archive or a UCI-HAR split directory into spike rasters.
    Encode(EncodeArgs),
    /// Train a network on encoded rasters.
    Train(TrainArgs),
    /// Evaluate a trained model over a threshold grid.
    Sweep(SweepArgs),
    /// Build the accuracy/spike front from sweep reports.
    Pareto(ParetoArgs),
    /// Pick the most accurate (model, threshold) within a budget.
    Select(SelectArgs),
    /// Convert spikes or power into battery life.
    Energy(EnergyArgs),
    /// Join sweep reports into one plot-ready table with power and battery life.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub windows_per_class: Option<usize>,
    #[arg(long)]
    pub noise_std: Option<f64>,
    #[arg(long)]
    pub amplitude_jitter: Option<f64>,
    #[arg(long, default_value = "synthetic")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// `.swd` dataset archive, or a UCI-HAR `train`/`test` directory.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub iaf_threshold: Option<f64>,
    #[arg(long)]
    pub filter_order: Option<usize>,
    /// Output stem; defaults to the input's file stem.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// `.swr` raster archive.
    #[arg(long)]
    pub data: PathBuf,
    /// `fixed:T`, `uniform:LO:HI`, `discrete:LO:HI:STEP` or `set:T1,T2,...`.
    #[arg(long)]
    pub dist: Option<String>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// `constant` or `cosine:T0:T_MULT`.
    #[arg(long)]
    pub scheduler: Option<String>,
    #[arg(long)]
    pub init_gain: Option<f64>,
    #[arg(long)]
    pub readout_gain: Option<f64>,
    /// Comma-separated pyramid levels per hidden layer, e.g. `2,4,8`.
    #[arg(long, value_delimiter = ',')]
    pub tau_config: Option<Vec<u32>>,
    #[arg(long)]
    pub surrogate_width: Option<f64>,
    /// Weight-init seed; defaults to the global seed.
    #[arg(long)]
    pub model_seed: Option<u64>,
    #[arg(long, default_value = "model")]
    pub name: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// `start:stop:step`.
    #[arg(long)]
    pub grid: Option<String>,
    /// Model id in the report; defaults to the model file stem.
    #[arg(long)]
    pub id: Option<String>,
    /// Model the relative columns are measured against; defaults to `--model`.
    #[arg(long)]
    pub baseline_model: Option<PathBuf>,
    #[arg(long)]
    pub baseline_theta: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ParetoArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub sweeps: Vec<PathBuf>,
    #[arg(long, default_value = "front")]
    pub name: String,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["front", "sweep"]))]
#[command(group = clap::ArgGroup::new("cap").required(true).args(["max_spikes", "max_joules"]))]
pub struct SelectArgs {
    #[arg(long)]
    pub front: Option<PathBuf>,
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    #[arg(long)]
    pub max_spikes: Option<f64>,
    /// Joules per inference window.
    #[arg(long)]
    pub max_joules: Option<f64>,
    #[command(flatten)]
    pub energy: EnergyFlags,
}

#[derive(Debug, Args, Default)]
pub struct EnergyFlags {
    /// Joules per spike.
    #[arg(long)]
    pub e_spike: Option<f64>,
    /// Idle power, watts.
    #[arg(long)]
    pub p_idle: Option<f64>,
    /// Seconds per inference window.
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("load").required(true).args(["power_w", "spikes"]))]
pub struct EnergyArgs {
    pub capacity_mah: f64,
    pub voltage_v: f64,
    /// Average power, watts.
    pub power_w: Option<f64>,
    /// Mean spikes per window, converted through the energy model.
    #[arg(long)]
    pub spikes: Option<f64>,
    #[command(flatten)]
    pub energy: EnergyFlags,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub sweeps: Vec<PathBuf>,
    #[arg(long, default_value_t = 100.0)]
    pub capacity_mah: f64,
    #[arg(long, default_value_t = 3.7)]
    pub voltage_v: f64,
    #[command(flatten)]
    pub energy: EnergyFlags,
    #[arg(long, default_value = "report")]
    pub name: String,
}

/// How a failed command ends.
#[derive(Debug)]
pub enum Failure {
    Usage(Error),
    Runtime(Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    pub fn to_json_line(&self) -> String {
        let e = match self {
            Failure::Usage(e) | Failure::Runtime(e) => e,
        };
        let (kind, field) = match e {
            Error::InvalidParameter { field, .. } => ("invalid_parameter", Some(field.clone())),
            Error::NonFinite { what, .. } => ("non_finite", Some(what.to_string())),
            Error::ShapeMismatch { what, .. } => ("shape_mismatch", Some(what.to_string())),
            Error::Empty(what) => ("empty", Some(what.to_string())),
            Error::NanLoss { .. } => ("nan_loss", None),
            Error::Parse { path, .. } => ("parse", Some(path.display().to_string())),
            Error::Truncated { .. } => ("truncated", None),
            Error::Version { .. } => ("version", None),
            Error::Checksum => ("checksum", None),
            Error::Magic => ("magic", None),
            Error::Io { path, .. } => ("io", Some(path.display().to_string())),
            Error::Json(_) => ("json", None),
        };
        #[derive(Serialize)]
        struct Line<'a> {
            error: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            field: Option<String>,
            message: String,
        }
        serde_json::to_string(&Line {
            error: kind,
            field,
            message: e.to_string(),
        })
        .expect("plain struct serializes")
    }
}

/// Configuration mistakes are usage errors; everything else is a runtime
/// failure.
fn classify(e: Error) -> Failure {
    match e {
        Error::InvalidParameter { .. } => Failure::Usage(e),
        _ => Failure::Runtime(e),
    }
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e)
}

/// Parse `std::env::args`, run, and return the process exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            let f = Failure::Usage(Error::invalid("arguments", first.to_owned()));
            eprintln!("{}", f.to_json_line());
            return 2;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("{}", f.to_json_line());
            f.exit_code()
        }
    }
}

struct Ctx {
    file: FileConfig,
    out_dir: PathBuf,
    seed: u64,
    threads: usize,
}

impl Ctx {
    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf, Failure> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| Failure::Runtime(Error::io(&self.out_dir, e)))?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Failure::Runtime(Error::io(&path, e)))?;
        Ok(path)
    }

    fn out_path(&self, name: &str) -> Result<PathBuf, Failure> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| Failure::Runtime(Error::io(&self.out_dir, e)))?;
        Ok(self.out_dir.join(name))
    }

    fn snapshot<T: Serialize>(&self, command: &str, stem: &str, settings: T) -> Result<(), Failure> {
        let text = Snapshot {
            command,
            seed: self.seed,
            threads: self.threads,
            out_dir: &self.out_dir,
            settings,
        }
        .to_toml()
        .map_err(Failure::Runtime)?;
        self.write(&format!("{stem}.{command}.toml"), text)?;
        Ok(())
    }

    fn energy_model(&self, flags: &EnergyFlags) -> Result<EnergyModel, Failure> {
        let d = EnergyModel::default();
        let f = &self.file.energy;
        let em = EnergyModel {
            e_spike: pick(flags.e_spike, f.e_spike, d.e_spike),
            p_idle: pick(flags.p_idle, f.p_idle, d.p_idle),
            window: pick(flags.window, f.window, d.window),
        };
        em.validate().map_err(usage)?;
        Ok(em)
    }
}

fn require(path: &Path) -> Result<(), Failure> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::Usage(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "input not found"),
        )))
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    require(path)?;
    std::fs::read_to_string(path).map_err(|e| Failure::Runtime(Error::io(path, e)))
}

fn file_digest(path: &Path) -> Result<String, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::Runtime(Error::io(path, e)))?;
    Ok(digest_hex(&bytes))
}

pub fn execute(cli: &Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => {
            require(p)?;
            FileConfig::load(p).map_err(usage)?
        }
        None => FileConfig::default(),
    };
    let ctx = Ctx {
        out_dir: resolve_out_dir(cli.out.clone(), file.out_dir.clone()),
        seed: pick(cli.seed, file.seed, 0),
        threads: pick(cli.threads, file.threads, 0),
        file,
    };
    if ctx.threads > 0 {
        // A second build in the same process fails harmlessly.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(ctx.threads)
            .build_global();
    }
    match &cli.command {
        Command::Synth(a) => cmd_synth(&ctx, a),
        Command::Encode(a) => cmd_encode(&ctx, a),
        Command::Train(a) => cmd_train(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Pareto(a) => cmd_pareto(&ctx, a),
        Command::Select(a) => cmd_select(&ctx, a),
        Command::Energy(a) => cmd_energy(&ctx, a),
        Command::Report(a) => cmd_report(&ctx, a),
    }
}

fn cmd_synth(ctx: &Ctx, a: &SynthArgs) -> Result<(), Failure> {
    let f = &ctx.file.synth;
    let mut spec = SyntheticSpec::three_class(pick(a.windows_per_class, f.windows_per_class, 100), ctx.seed);
    spec.noise_std = pick(a.noise_std, f.noise_std, spec.noise_std);
    spec.amplitude_jitter = pick(a.amplitude_jitter, f.amplitude_jitter, spec.amplitude_jitter);
    let ds = make_synthetic(&spec).map_err(classify)?;
    if ds.is_empty() {
        eprintln!("warning: windows_per_class is 0, dataset is empty");
    }
    let path = ctx.out_path(&format!("{}.swd", a.name))?;
    save_dataset(&ds, &path).map_err(Failure::Runtime)?;
    ctx.snapshot("synth", &a.name, &spec)?;
    println!("{} windows={} sha256={}", path.display(), ds.len(), file_digest(&path)?);
    Ok(())
}

fn cmd_encode(ctx: &Ctx, a: &EncodeArgs) -> Result<(), Failure> {
    require(&a.input)?;
    let ds = if a.input.is_dir() {
        load_ucihar_raw(&a.input).map_err(classify)?
    } else {
        load_dataset(&a.input).map_err(classify)?
    };
    let first = ds.windows().first().ok_or(Failure::Runtime(Error::Empty("input dataset")))?;
    let mut cfg = EncoderConfig::default_for(first.imu.sample_rate());
    let f = &ctx.file.encode;
    cfg.iaf.threshold = pick(a.iaf_threshold, f.iaf_threshold, cfg.iaf.threshold);
    cfg.filterbank.filter_order = pick(a.filter_order, f.filter_order, cfg.filterbank.filter_order);
    if !(cfg.iaf.threshold > 0.0) {
        return Err(usage(Error::invalid("encode.iaf_threshold", "must be > 0")));
    }
    let encoder = Encoder::new(cfg.clone()).map_err(classify)?;
    let encoded = EncodedDataset::encode(&encoder, &ds).map_err(classify)?;
    let stem = a.name.clone().unwrap_or_else(|| {
        a.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "encoded".into())
    });
    let path = ctx.out_path(&format!("{stem}.swr"))?;
    save_rasters(&encoded, &path).map_err(Failure::Runtime)?;
    #[derive(Serialize)]
    struct S<'a> {
        input: &'a Path,
        encoder: &'a EncoderConfig,
    }
    ctx.snapshot("encode", &stem, S { input: &a.input, encoder: &cfg })?;
    let spikes: u64 = encoded.rasters().iter().map(|r| r.spike_count()).sum();
    println!(
        "{} windows={} spikes={} sha256={}",
        path.display(),
        encoded.len(),
        spikes,
        file_digest(&path)?
    );
    Ok(())
}

#[derive(Debug, Serialize)]
struct TrainSettings<'a> {
    data: &'a Path,
    model_seed: u64,
    init_gain: f64,
    readout_gain: f64,
    tau_config: Vec<u32>,
    train: &'a TrainConfig,
}

fn cmd_train(ctx: &Ctx, a: &TrainArgs) -> Result<(), Failure> {
    let f = &ctx.file.train;
    let dist = match a.dist.as_ref().or(f.dist.as_ref()) {
        Some(s) => ThresholdDistribution::parse(s).map_err(usage)?,
        None => ThresholdDistribution::fixed(1.0),
    };
    let scheduler = match a.scheduler.as_ref().or(f.scheduler.as_ref()) {
        Some(s) => Schedule::parse(s).map_err(usage)?,
        None => Schedule::Constant,
    };
    let d = TrainConfig::default();
    let config = TrainConfig {
        lr: pick(a.lr, f.lr, d.lr),
        epochs: pick(a.epochs, f.epochs, d.epochs),
        batch_size: pick(a.batch_size, f.batch_size, d.batch_size),
        scheduler,
        seed: ctx.seed,
        dist,
        adam: d.adam,
        surrogate: Surrogate {
            width: pick(a.surrogate_width, f.surrogate_width, d.surrogate.width),
        },
    };
    config.validate().map_err(usage)?;
    require(&a.data)?;
    let data = load_rasters(&a.data).map_err(classify)?;
    let model_seed = a.model_seed.unwrap_or(ctx.seed);
    let builder = SynNetBuilder::new(data.n_classes(), model_seed)
        .tau_config(&pick(a.tau_config.clone(), f.tau_config.clone(), DEFAULT_TAU_CONFIG.to_vec()))
        .init_gain(pick(a.init_gain, f.init_gain, SynNetBuilder::DEFAULT_INIT_GAIN))
        .readout_gain(pick(a.readout_gain, f.readout_gain, SynNetBuilder::DEFAULT_READOUT_GAIN));
    let model = builder.build().map_err(usage)?;
    let (trained, history) = train(&model, &data, &config).map_err(classify)?;
    let model_path = ctx.out_path(&format!("{}.model.json", a.name))?;
    trained.save(&model_path).map_err(Failure::Runtime)?;
    ctx.write(&format!("{}.history.csv", a.name), history.to_csv())?;
    ctx.snapshot(
        "train",
        &a.name,
        TrainSettings {
            data: &a.data,
            model_seed,
            init_gain: builder.init_gain,
            readout_gain: builder.readout_gain,
            tau_config: builder.tau_config.clone(),
            train: &config,
        },
    )?;
    if let Some(e) = history.epochs.last() {
        println!(
            "{} epochs={} loss={:.4} train_acc={:.4} mean_spikes={:.1}",
            model_path.display(),
            history.epochs.len(),
            e.mean_loss,
            e.accuracy,
            e.mean_spikes
        );
    }
    Ok(())
}

fn model_stem(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "model".into());
    name.strip_suffix(".model.json")
        .or_else(|| name.strip_suffix(".json"))
        .unwrap_or(&name)
        .to_owned()
}

fn cmd_sweep(ctx: &Ctx, a: &SweepArgs) -> Result<(), Failure> {
    let f = &ctx.file.sweep;
    let grid = match a.grid.as_ref().or(f.grid.as_ref()) {
        Some(s) => ThetaGrid::parse(s).map_err(usage)?,
        None => ThetaGrid::default(),
    };
    let thetas = grid.points().map_err(usage)?;
    let baseline_theta = pick(a.baseline_theta, f.baseline_theta, 1.0);
    if !(baseline_theta > 0.0) {
        return Err(usage(Error::invalid("sweep.baseline_theta", "must be > 0")));
    }
    require(&a.model)?;
    require(&a.data)?;
    let model = NetworkModel::load(&a.model).map_err(classify)?;
    let data = load_rasters(&a.data).map_err(classify)?;
    let id = a.id.clone().unwrap_or_else(|| model_stem(&a.model));
    let curve = sweep(&model, &data, &thetas, &id).map_err(classify)?;
    let (baseline_id, baseline_model) = match &a.baseline_model {
        Some(p) => {
            require(p)?;
            (model_stem(p), NetworkModel::load(p).map_err(classify)?)
        }
        None => (id.clone(), model.clone()),
    };
    let point = evaluate(&baseline_model, &data, baseline_theta).map_err(classify)?;
    let train_dist = model
        .train_dist
        .as_ref()
        .map(|d| d.label())
        .unwrap_or_else(|| "none".into());
    let report = SweepReport {
        curve,
        baseline: Baseline {
            model_id: baseline_id,
            point,
        },
        meta: vec![
            ("spike_count".into(), "hidden_layers".into()),
            ("model_path".into(), a.model.display().to_string()),
            ("train_dist".into(), train_dist),
            ("split_hash".into(), file_digest(&a.data)?),
        ],
    };
    let csv = report.to_csv().map_err(classify)?;
    let path = ctx.write(&format!("{id}.sweep.csv"), csv)?;
    #[derive(Serialize)]
    struct S<'a> {
        model: &'a Path,
        data: &'a Path,
        grid: ThetaGrid,
        baseline_theta: f64,
        baseline_model: Option<&'a Path>,
    }
    ctx.snapshot(
        "sweep",
        &id,
        S {
            model: &a.model,
            data: &a.data,
            grid,
            baseline_theta,
            baseline_model: a.baseline_model.as_deref(),
        },
    )?;
    println!("{} points={}", path.display(), thetas.len());
    Ok(())
}

fn load_report(path: &Path) -> Result<SweepReport, Failure> {
    SweepReport::from_csv(&read_text(path)?, path).map_err(classify)
}

fn cmd_pareto(ctx: &Ctx, a: &ParetoArgs) -> Result<(), Failure> {
    let mut curves = Vec::new();
    let mut manifest = Manifest::default();
    for p in &a.sweeps {
        let r = load_report(p)?;
        if curves.iter().any(|c: &crate::analysis::SweepCurve| c.model_id == r.curve.model_id) {
            return Err(usage(Error::invalid(
                "sweeps",
                format!("model id {:?} appears twice", r.curve.model_id),
            )));
        }
        manifest.models.push((
            r.curve.model_id.clone(),
            PathBuf::from(r.meta("model_path").unwrap_or("")),
        ));
        curves.push(r.curve);
    }
    let front = build_front(&curves).map_err(classify)?;
    let path = ctx.write(&format!("{}.csv", a.name), front.to_csv())?;
    ctx.write(&format!("{}.manifest.csv", a.name), manifest.to_csv())?;
    ctx.snapshot("pareto", &a.name, &a.sweeps)?;
    println!(
        "{} entries={} segments={}",
        path.display(),
        front.entries.len(),
        front.segments.len()
    );
    Ok(())
}

fn print_choice(choice: Option<Choice>) {
    match choice {
        Some(c) => println!(
            "{} {} {} {}",
            c.model_id, c.point.theta, c.point.accuracy, c.point.mean_spikes
        ),
        None => println!("INFEASIBLE"),
    }
}

fn cmd_select(ctx: &Ctx, a: &SelectArgs) -> Result<(), Failure> {
    let budget = match (a.max_spikes, a.max_joules) {
        (Some(s), _) => Budget::spikes(s).map_err(usage)?,
        (None, Some(j)) => Budget::energy(j, ctx.energy_model(&a.energy)?).map_err(usage)?,
        (None, None) => unreachable!("clap enforces one cap"),
    };
    let choice = if let Some(p) = &a.front {
        let front = ParetoFront::from_csv(&read_text(p)?, p).map_err(classify)?;
        select_multi(&front, &budget).map_err(classify)?
    } else {
        let p = a.sweep.as_ref().expect("clap enforces one source");
        select_single(&load_report(p)?.curve, &budget).map_err(classify)?
    };
    print_choice(choice);
    Ok(())
}

fn cmd_energy(ctx: &Ctx, a: &EnergyArgs) -> Result<(), Failure> {
    let power = match (a.power_w, a.spikes) {
        (Some(p), _) => p,
        (None, Some(s)) => {
            if !(s >= 0.0) {
                return Err(usage(Error::invalid("spikes", "must be >= 0")));
            }
            spikes_to_power(s, &ctx.energy_model(&a.energy)?)
        }
        (None, None) => unreachable!("clap enforces one load"),
    };
    let days = battery_days(a.capacity_mah, a.voltage_v, power).map_err(usage)?;
    println!("power {power:e} W");
    println!("{days:.1} days");
    Ok(())
}

fn cmd_report(ctx: &Ctx, a: &ReportArgs) -> Result<(), Failure> {
    use std::fmt::Write as _;
    let em = ctx.energy_model(&a.energy)?;
    battery_days(a.capacity_mah, a.voltage_v, 1.0).map_err(usage)?;
    let mut out = String::from(
        "model_id,theta,accuracy,mean_spikes,dAcc_rel,dSpk_rel,power_w,battery_days\n",
    );
    for p in &a.sweeps {
        let r = load_report(p)?;
        let mut best = None::<(f64, f64)>;
        for pt in &r.curve.points {
            let (da, ds) = crate::analysis::delta_metrics(pt, &r.baseline.point).map_err(classify)?;
            let power = spikes_to_power(pt.mean_spikes, &em);
            let days = battery_days(a.capacity_mah, a.voltage_v, power).map_err(classify)?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.curve.model_id, pt.theta, pt.accuracy, pt.mean_spikes, da, ds, power, days
            )
            .unwrap();
            if best.is_none_or(|(acc, _)| pt.accuracy > acc) {
                best = Some((pt.accuracy, pt.theta));
            }
        }
        if let Some((acc, theta)) = best {
            println!(
                "{} best_accuracy={acc} at theta={theta} split_hash={}",
                r.curve.model_id,
                r.meta("split_hash").unwrap_or("-")
            );
        }
    }
    let path = ctx.write(&format!("{}.csv", a.name), out)?;
    #[derive(Serialize)]
    struct S<'a> {
        sweeps: &'a [PathBuf],
        capacity_mah: f64,
        voltage_v: f64,
        energy: EnergyModel,
    }
    ctx.snapshot(
        "report",
        &a.name,
        S {
            sweeps: &a.sweeps,
            capacity_mah: a.capacity_mah,
            voltage_v: a.voltage_v,
            energy: em,
        },
    )?;
    println!("{}", path.display());
    Ok(())
}
