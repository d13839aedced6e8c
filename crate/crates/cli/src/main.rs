//! Command-line front end: Monte-Carlo FER sweeps, analytic ML bounds,
//! ensemble weight spectra, erasure list analysis, and girth inspection.
//!
//! Exit codes: 0 on success, 1 for usage or input problems, 2 for numeric
//! failures (infeasible parameters, non-converging quadrature).

use bpled_core::bounds::{
    avg_list_bound, critical_alpha, shannon_lower, sigma_from_ebn0_db, QuadratureConfig, TsbEval,
};
use bpled_core::bpled::{BpLedParams, MaskMode};
use bpled_core::codes::{expand_qc, girth, sample_gallager, DegreeMatrix, ParityCheck};
use bpled_core::sim::{run_fer, write_fer_csv};
use bpled_core::spectra::{
    gallager_avg_spectrum, nb_image_avg_spectrum, random_linear_spectrum, SpectrumTable,
};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

// ============================================================================
// Argument surface
// ============================================================================

#[derive(Parser)]
#[command(
    name = "bpled",
    about = "LDPC toolkit: FER simulation, ML bounds, weight spectra, erasure list analysis",
    version
)]
struct Cli {
    /// Master seed for code sampling and channel noise.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Config file of `key = value` lines overriding the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo frame-error-rate sweep over an SNR grid (CSV out).
    Simulate(SimulateArgs),
    /// Sphere-packing lower and tangential-sphere upper bounds (CSV out).
    Bounds(BoundsArgs),
    /// Ensemble-average weight spectrum table (text out).
    Spectrum(SpectrumArgs),
    /// Closed-form erasure list analysis (single number out).
    Analyze(AnalyzeArgs),
    /// Tanner-graph girth of a degree-matrix file.
    Girth(GirthArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Degree-matrix file defining the code by circulant lifting.
    #[arg(long, value_name = "FILE", conflicts_with = "gallager")]
    code: Option<PathBuf>,
    /// Sample a (J,K)-regular code of length N instead: J K N.
    #[arg(long, num_args = 3, value_names = ["J", "K", "N"])]
    gallager: Vec<usize>,
    /// E_b/N_0 grid in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
          default_values_t = vec![2.0, 3.0, 4.0])]
    snr: Vec<f64>,
    /// Stop an SNR point after this many BP-LED block errors.
    #[arg(long, default_value_t = 100)]
    stop_errors: u64,
    /// Trial budget per SNR point (0 = no trials, empty CSV).
    #[arg(long, default_value_t = 1_000_000)]
    max_trials: u64,
    /// Erasure budget scale: nu = round(alpha (1-R) n).
    #[arg(long)]
    alpha: Option<f64>,
    /// Mask-window scale: l2 from round/floor of beta n.
    #[arg(long)]
    beta: Option<f64>,
    /// Erasure masks tried per failed frame.
    #[arg(long)]
    n_masks: Option<usize>,
    /// Candidate budget per erasure pattern.
    #[arg(long)]
    j_max: Option<u64>,
    /// BP iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Reliability window (defaults to the code's girth).
    #[arg(long)]
    window: Option<usize>,
    /// Seed for the mask-selection shuffle.
    #[arg(long)]
    mask_seed: Option<u64>,
    /// Mask family for the second erasure stage.
    #[arg(long, value_enum)]
    mask_mode: Option<MaskModeArg>,
}

#[derive(Args)]
struct BoundsArgs {
    /// Block length (defaults to the spectrum file's length).
    #[arg(long)]
    n: Option<usize>,
    /// Code rate (defaults to 1 - J/K when --gallager is given).
    #[arg(long)]
    rate: Option<f64>,
    /// Ensemble for the tsb_ensemble column: J K.
    #[arg(long, num_args = 2, value_names = ["J", "K"], conflicts_with = "spectrum")]
    gallager: Vec<usize>,
    /// Spectrum file for the tsb_ensemble column.
    #[arg(long, value_name = "FILE")]
    spectrum: Option<PathBuf>,
    /// E_b/N_0 grid in dB, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true,
          default_values_t = vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0])]
    snr: Vec<f64>,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Strips (column weight).
    j: usize,
    /// Row weight.
    k: usize,
    /// Length: bits when binary, field symbols when M is given.
    n: usize,
    /// Bits per symbol for a nonbinary ensemble's binary image.
    m: Option<usize>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct AnalyzeArgs {
    /// Largest erasure fraction nu/r with zero list exponent: J K.
    #[arg(long, num_args = 2, value_names = ["J", "K"])]
    critical_alpha: Vec<usize>,
    /// Ensemble-average list-size bound: NU N R K.
    #[arg(long, num_args = 4, value_names = ["NU", "N", "R", "K"])]
    list_bound: Vec<usize>,
}

#[derive(Args)]
struct GirthArgs {
    /// Degree-matrix file defining the code by circulant lifting.
    #[arg(long, value_name = "FILE")]
    code: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MaskModeArg {
    ReedMuller,
    Random,
}

impl From<MaskModeArg> for MaskMode {
    fn from(m: MaskModeArg) -> Self {
        match m {
            MaskModeArg::ReedMuller => MaskMode::ReedMuller,
            MaskModeArg::Random => MaskMode::Random,
        }
    }
}

impl FromStr for MaskModeArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reed-muller" => Ok(Self::ReedMuller),
            "random" => Ok(Self::Random),
            other => Err(format!("unknown mask mode `{other}`")),
        }
    }
}

// ============================================================================
// Errors and config
// ============================================================================

enum CliError {
    Usage(String),
    Numeric(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }
    fn numeric(msg: impl std::fmt::Display) -> Self {
        Self::Numeric(msg.to_string())
    }
}

/// `key = value` lines; `#` starts a comment line; later keys win.
struct Config(HashMap<String, String>);

impl Config {
    fn empty() -> Self {
        Self(HashMap::new())
    }

    fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut map = HashMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::usage(format!(
                    "config line {}: expected `key = value`, got `{line}`",
                    no + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::usage(format!("config key `{key}`: cannot parse `{raw}`"))),
        }
    }

    /// Overrides `slot` when the key is present.
    fn apply<T: FromStr>(&self, key: &str, slot: &mut T) -> Result<(), CliError> {
        if let Some(v) = self.get(key)? {
            *slot = v;
        }
        Ok(())
    }

    /// Overrides an optional setting when the key is present.
    fn apply_opt<T: FromStr>(&self, key: &str, slot: &mut Option<T>) -> Result<(), CliError> {
        if let Some(v) = self.get(key)? {
            *slot = Some(v);
        }
        Ok(())
    }

    /// Whitespace- or comma-separated list value.
    fn apply_list<T: FromStr>(&self, key: &str, slot: &mut Vec<T>) -> Result<(), CliError> {
        if let Some(raw) = self.0.get(key) {
            let parsed: Result<Vec<T>, _> = raw
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect();
            *slot = parsed.map_err(|_| {
                CliError::usage(format!("config key `{key}`: cannot parse list `{raw}`"))
            })?;
        }
        Ok(())
    }
}

// ============================================================================
// Entry point
// ============================================================================

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numeric failure: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(mut cli: Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::empty(),
    };
    cfg.apply("seed", &mut cli.seed)?;
    cfg.apply("threads", &mut cli.threads)?;
    if let Some(raw) = cfg.0.get("out") {
        cli.out = Some(PathBuf::from(raw));
    }
    if cli.threads > 0 {
        // Ignore failure: the pool can only be configured once per process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match cli.cmd {
        Command::Simulate(args) => cmd_simulate(args, &cfg, cli.seed, cli.out.as_ref()),
        Command::Bounds(args) => cmd_bounds(args, &cfg, cli.out.as_ref()),
        Command::Spectrum(args) => cmd_spectrum(args, &cfg, cli.out.as_ref()),
        Command::Analyze(args) => cmd_analyze(args, &cfg, cli.out.as_ref()),
        Command::Girth(args) => cmd_girth(args, &cfg, cli.out.as_ref()),
    }
}

fn write_output(out: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_code(path: &PathBuf) -> Result<ParityCheck, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let base = DegreeMatrix::parse(&text).map_err(|e| CliError::usage(e.to_string()))?;
    expand_qc(&base, base.lift).map_err(|e| CliError::usage(e.to_string()))
}

// ============================================================================
// Subcommands
// ============================================================================

fn cmd_simulate(
    mut args: SimulateArgs,
    cfg: &Config,
    seed: u64,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    if let Some(raw) = cfg.0.get("code") {
        args.code = Some(PathBuf::from(raw));
        args.gallager.clear();
    }
    cfg.apply_list("gallager", &mut args.gallager)?;
    cfg.apply_list("snr", &mut args.snr)?;
    cfg.apply("stop_errors", &mut args.stop_errors)?;
    cfg.apply("max_trials", &mut args.max_trials)?;
    cfg.apply_opt("alpha", &mut args.alpha)?;
    cfg.apply_opt("beta", &mut args.beta)?;
    cfg.apply_opt("n_masks", &mut args.n_masks)?;
    cfg.apply_opt("j_max", &mut args.j_max)?;
    cfg.apply_opt("max_iter", &mut args.max_iter)?;
    cfg.apply_opt("window", &mut args.window)?;
    cfg.apply_opt("mask_seed", &mut args.mask_seed)?;
    cfg.apply_opt("mask_mode", &mut args.mask_mode)?;

    let code = match (&args.code, args.gallager.as_slice()) {
        (Some(path), _) => load_code(path)?,
        (None, &[j, k, n]) => {
            sample_gallager(j, k, n, seed).map_err(|e| CliError::usage(e.to_string()))?
        }
        (None, _) => {
            return Err(CliError::usage(
                "simulate needs a code: --code FILE or --gallager J K N",
            ))
        }
    };
    if args.snr.is_empty() {
        return Err(CliError::usage("SNR grid must be nonempty"));
    }
    if args.stop_errors == 0 {
        return Err(CliError::usage("stop_errors must be at least 1"));
    }

    let mut params = BpLedParams::default();
    if let Some(v) = args.alpha {
        params.alpha = v;
    }
    if let Some(v) = args.beta {
        params.beta = v;
    }
    if let Some(v) = args.n_masks {
        params.n_masks = v;
    }
    if let Some(v) = args.j_max {
        params.j_max = v;
    }
    if let Some(v) = args.max_iter {
        params.max_iter = v;
    }
    if args.window.is_some() {
        params.window = args.window;
    }
    if let Some(v) = args.mask_seed {
        params.mask_seed = v;
    }
    if let Some(m) = args.mask_mode {
        params.mask_mode = m.into();
    }

    let records = run_fer(
        &code,
        params,
        &args.snr,
        args.stop_errors,
        args.max_trials,
        seed,
    )
    .map_err(CliError::numeric)?;
    let mut buf = Vec::new();
    write_fer_csv(&records, &mut buf).map_err(CliError::numeric)?;
    write_output(out, &String::from_utf8(buf).expect("CSV is UTF-8"))
}

fn cmd_bounds(mut args: BoundsArgs, cfg: &Config, out: Option<&PathBuf>) -> Result<(), CliError> {
    cfg.apply_opt("n", &mut args.n)?;
    cfg.apply_opt("rate", &mut args.rate)?;
    cfg.apply_list("gallager", &mut args.gallager)?;
    if let Some(raw) = cfg.0.get("spectrum") {
        args.spectrum = Some(PathBuf::from(raw));
        args.gallager.clear();
    }
    cfg.apply_list("snr", &mut args.snr)?;

    let ensemble: SpectrumTable = match (&args.spectrum, args.gallager.as_slice()) {
        (Some(path), _) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            SpectrumTable::parse(&text).map_err(|e| CliError::usage(e.to_string()))?
        }
        (None, &[j, k]) => {
            let n = args
                .n
                .ok_or_else(|| CliError::usage("--gallager needs --n"))?;
            gallager_avg_spectrum(j, k, n).map_err(|e| CliError::usage(e.to_string()))?
        }
        (None, _) => {
            return Err(CliError::usage(
                "bounds needs an ensemble: --gallager J K or --spectrum FILE",
            ))
        }
    };
    let n = match args.n {
        Some(n) if n != ensemble.n => {
            return Err(CliError::usage(format!(
                "--n {} disagrees with the spectrum length {}",
                n, ensemble.n
            )))
        }
        Some(n) => n,
        None => ensemble.n,
    };
    let rate = match (args.rate, args.gallager.as_slice()) {
        (Some(r), _) => r,
        (None, &[j, k]) => 1.0 - j as f64 / k as f64,
        (None, _) => return Err(CliError::usage("bounds needs --rate")),
    };
    if !(0.0..1.0).contains(&rate) || rate == 0.0 {
        return Err(CliError::usage(format!("rate {rate} outside (0, 1)")));
    }
    if args.snr.is_empty() {
        return Err(CliError::usage("SNR grid must be nonempty"));
    }

    let redundancy = ((n as f64) * (1.0 - rate)).round() as usize;
    let random = random_linear_spectrum(n, redundancy);
    let quad = QuadratureConfig::default();
    let tsb_random = TsbEval::new(&random);
    let tsb_ensemble = TsbEval::new(&ensemble);

    let mut csv = String::from("snr_db,shannon_lower,tsb_random,tsb_ensemble\n");
    for &db in &args.snr {
        let sigma = sigma_from_ebn0_db(rate, db);
        let lower = shannon_lower(n, rate, sigma).map_err(CliError::numeric)?;
        let upper_rand = tsb_random.fer(sigma, &quad).map_err(CliError::numeric)?;
        let upper_ens = tsb_ensemble.fer(sigma, &quad).map_err(CliError::numeric)?;
        writeln!(csv, "{db},{lower},{upper_rand},{upper_ens}").expect("string write");
    }
    write_output(out, &csv)
}

fn cmd_spectrum(
    mut args: SpectrumArgs,
    cfg: &Config,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    cfg.apply("j", &mut args.j)?;
    cfg.apply("k", &mut args.k)?;
    cfg.apply("n", &mut args.n)?;
    cfg.apply_opt("m", &mut args.m)?;
    let m = args.m.unwrap_or(1);
    let table = if m == 1 {
        gallager_avg_spectrum(args.j, args.k, args.n)
    } else {
        nb_image_avg_spectrum(args.j, args.k, args.n, m)
    }
    .map_err(|e| CliError::usage(e.to_string()))?;
    write_output(out, &table.to_export_string(args.j, args.k, m))
}

fn cmd_analyze(mut args: AnalyzeArgs, cfg: &Config, out: Option<&PathBuf>) -> Result<(), CliError> {
    cfg.apply_list("critical_alpha", &mut args.critical_alpha)?;
    cfg.apply_list("list_bound", &mut args.list_bound)?;
    let value = match (args.critical_alpha.as_slice(), args.list_bound.as_slice()) {
        (&[j, k], &[]) => {
            if j < 2 || k <= j {
                return Err(CliError::usage(format!(
                    "critical alpha needs K > J >= 2, got ({j},{k})"
                )));
            }
            critical_alpha(j, k)
        }
        (&[], &[nu, n, r, k]) => {
            if nu > n {
                return Err(CliError::usage(format!("nu {nu} exceeds n {n}")));
            }
            avg_list_bound(nu, n, r, k)
        }
        _ => {
            return Err(CliError::usage(
                "analyze needs exactly one of --critical-alpha J K or --list-bound NU N R K",
            ))
        }
    };
    write_output(out, &format!("{value}\n"))
}

fn cmd_girth(mut args: GirthArgs, cfg: &Config, out: Option<&PathBuf>) -> Result<(), CliError> {
    if let Some(raw) = cfg.0.get("code") {
        args.code = PathBuf::from(raw);
    }
    let code = load_code(&args.code)?;
    let text = match girth(&code) {
        Some(g) => format!("{g}\n"),
        None => "acyclic\n".to_string(),
    };
    write_output(out, &text)
}
