//! Command-line entry points: experiment configuration, deterministic
//! sweeps and CSV emission.
//!
//! Sweep commands read a flat sectioned key=value config file; command-line
//! flags override file keys. Unknown keys are rejected, physical quantities
//! carry their unit in the key name, and a master seed is mandatory so
//! every run is reproducible by default. Result files are written to a
//! temporary sibling and renamed, so an interrupted run never leaves a
//! partial file at the target path.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use crate::awgn::{self, Detector, Modem, RunParams};
use crate::codec::{Labeling, VoronoiConstellation};
use crate::error::Error;
use crate::fiber::{self, FiberConfig, FiberFormat, SignalParams};
use crate::lattice::{LatticeFamily, LatticeSpec};
use crate::metrics;
use crate::shaping;
use crate::Result;

/// Geometric-shaping toolkit: encode and decode lattice constellations,
/// compute figures of merit, and run channel sweeps.
#[derive(Parser)]
#[command(name = "voronoi-shaping", version, about)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map bits (or indices) to channel symbols.
    Encode(CodecArgs),
    /// Map channel symbols back to bits (or indices).
    Decode(CodecArgs),
    /// Print the figures of merit of a constellation as CSV.
    Metrics(MetricsArgs),
    /// Search for a low-energy shift vector.
    ShiftOpt(ShiftOptArgs),
    /// Monte-Carlo error rates on the Gaussian channel (config driven).
    Awgn(SweepArgs),
    /// Split-step fiber transmission sweep (config driven).
    Fiber(SweepArgs),
}

#[derive(Args)]
struct ConstellationArgs {
    /// Lattice family: cubic, a2, d4, e8, leech24.
    #[arg(long)]
    lattice: String,
    /// Dimension (required for cubic, implied otherwise).
    #[arg(long)]
    n: Option<usize>,
    /// Scale factor (2, 4, 8 or 16).
    #[arg(long)]
    r: u32,
    /// Bit labeling: natural-binary or quasi-gray.
    #[arg(long, default_value = "quasi-gray")]
    labeling: String,
    /// Shift source: random or optimized.
    #[arg(long, default_value = "random")]
    shift: String,
    /// Seed for the shift source.
    #[arg(long, default_value_t = 1)]
    shift_seed: u64,
}

#[derive(Args)]
struct CodecArgs {
    #[command(flatten)]
    constellation: ConstellationArgs,
    /// Input path.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output path.
    #[arg(long = "out")]
    output: PathBuf,
    /// Treat the text side as decimal indices instead of bits.
    #[arg(long)]
    indices: bool,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    constellation: ConstellationArgs,
    /// Write the CSV here instead of stdout.
    #[arg(long = "out")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ShiftOptArgs {
    #[command(flatten)]
    constellation: ConstellationArgs,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Write the shift (one coordinate per line) here.
    #[arg(long = "out")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sectioned key=value config file.
    #[arg(long)]
    config: PathBuf,
    /// Override the output path from the config.
    #[arg(long = "out")]
    output: Option<PathBuf>,
    /// Override the master seed from the config.
    #[arg(long)]
    master_seed: Option<u64>,
}

/// Run the CLI; returns a process exit code.
pub fn run() -> i32 {
    if let Ok(threads) = std::env::var("VC_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Metrics(args) => cmd_metrics(args),
        Command::ShiftOpt(args) => cmd_shift_opt(args),
        Command::Awgn(args) => cmd_awgn(args),
        Command::Fiber(args) => cmd_fiber(args),
    }
}

fn parse_family(args: &ConstellationArgs) -> Result<(LatticeFamily, usize)> {
    let family = LatticeFamily::from_str(&args.lattice)?;
    let n = match (family, args.n) {
        (LatticeFamily::Cubic, Some(n)) => n,
        (LatticeFamily::Cubic, None) => {
            return Err(Error::config("n", "cubic lattices need an explicit dimension"))
        }
        (LatticeFamily::A2, d) => d.unwrap_or(2),
        (LatticeFamily::D4, d) => d.unwrap_or(4),
        (LatticeFamily::E8, d) => d.unwrap_or(8),
        (LatticeFamily::Leech24, d) => d.unwrap_or(24),
    };
    Ok((family, n))
}

fn build_constellation(args: &ConstellationArgs) -> Result<(VoronoiConstellation, Labeling)> {
    let (family, n) = parse_family(args)?;
    let spec = LatticeSpec::new(family, n)?;
    let labeling = Labeling::from_str(&args.labeling)?;
    let vc = match args.shift.to_ascii_lowercase().as_str() {
        "random" => VoronoiConstellation::with_random_shift(spec, args.r, args.shift_seed)?,
        "optimized" | "optimised" => {
            VoronoiConstellation::with_optimized_shift(spec, args.r, args.shift_seed)?
        }
        other => return Err(Error::config("shift", format!("unknown shift source {other}"))),
    };
    Ok((vc, labeling))
}

// ---------------------------------------------------------------------------
// encode / decode

fn read_bits(path: &Path) -> Result<Vec<u8>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut bits = Vec::new();
    for (i, ch) in text.chars().enumerate() {
        match ch {
            '0' => bits.push(0),
            '1' => bits.push(1),
            c if c.is_whitespace() => {}
            c => {
                return Err(Error::config(
                    "input",
                    format!("unexpected character {c:?} at offset {i} in bit file"),
                ))
            }
        }
    }
    Ok(bits)
}

fn read_index_lines(path: &Path) -> Result<Vec<BigUint>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let value = BigUint::parse_bytes(line.as_bytes(), 10).ok_or_else(|| {
            Error::config("input", format!("line {} is not a decimal index", lineno + 1))
        })?;
        out.push(value);
    }
    Ok(out)
}

fn read_symbol_records(path: &Path, dim: usize) -> Result<Vec<Vec<f64>>> {
    let raw = fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    if raw.len() % (8 * dim) != 0 {
        return Err(Error::config(
            "input",
            format!(
                "symbol file holds {} bytes, not a multiple of {} ({}-dimensional records)",
                raw.len(),
                8 * dim,
                dim
            ),
        ));
    }
    let mut out = Vec::with_capacity(raw.len() / (8 * dim));
    for record in raw.chunks(8 * dim) {
        out.push(
            record
                .chunks(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
                .collect(),
        );
    }
    Ok(out)
}

fn cmd_encode(args: CodecArgs) -> Result<()> {
    let (vc, labeling) = build_constellation(&args.constellation)?;
    let m = vc.bits_per_symbol();
    let indices: Vec<BigUint> = if args.indices {
        read_index_lines(&args.input)?
    } else {
        let bits = read_bits(&args.input)?;
        if bits.len() % m != 0 {
            return Err(Error::config(
                "input",
                format!("{} bits is not a multiple of {m} bits per symbol", bits.len()),
            ));
        }
        bits.chunks(m)
            .map(|chunk| labeling.bits_to_index(chunk, vc.scale_factor(), vc.spec().rank()))
            .collect::<Result<_>>()?
    };
    let mut bytes = Vec::with_capacity(indices.len() * vc.dim() * 8);
    for index in &indices {
        let point = vc.encode(index)?;
        for v in point {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    write_atomic(&args.output, &bytes)
}

fn cmd_decode(args: CodecArgs) -> Result<()> {
    let (vc, labeling) = build_constellation(&args.constellation)?;
    let records = read_symbol_records(&args.input, vc.dim())?;
    let mut text = String::new();
    if args.indices {
        for y in &records {
            let index = vc.decode(y);
            writeln!(text, "{index}").expect("string write");
        }
    } else {
        for y in &records {
            let index = vc.decode(y);
            let bits = labeling.index_to_bits(&index, vc.scale_factor(), vc.spec().rank())?;
            for b in bits {
                text.push(if b == 1 { '1' } else { '0' });
            }
            text.push('\n');
        }
    }
    write_atomic(&args.output, text.as_bytes())
}

// ---------------------------------------------------------------------------
// metrics / shift-opt

const MERIT_HEADER: &str =
    "family,r,n,se,m,es,eb,dmin,gamma,gamma_db,sensitivity_penalty_db,tau_bar,tau_bar_stderr";

fn merit_row(report: &metrics::MeritReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        report.family,
        report.r,
        report.n,
        report.se,
        report.size,
        report.es,
        report.eb,
        report.dmin,
        report.gamma,
        report.gamma_db,
        report.sensitivity_penalty_db,
        report.tau_bar,
        report
            .tau_bar_std_err
            .map(|s| s.to_string())
            .unwrap_or_default(),
    )
}

fn cmd_metrics(args: MetricsArgs) -> Result<()> {
    let (vc, _) = build_constellation(&args.constellation)?;
    let report = metrics::merit_report(&vc)?;
    let mut out = String::new();
    writeln!(out, "{MERIT_HEADER}").expect("string write");
    writeln!(out, "{}", merit_row(&report)).expect("string write");
    match &args.output {
        Some(path) => write_atomic(path, out.as_bytes()),
        None => {
            print!("{out}");
            Ok(())
        }
    }
}

fn cmd_shift_opt(args: ShiftOptArgs) -> Result<()> {
    let (family, n) = parse_family(&args.constellation)?;
    let spec = LatticeSpec::new(family, n)?;
    let params = shaping::OptimizeParams {
        max_iter: args.max_iter,
        tol: args.tol,
        ..Default::default()
    };
    let result = shaping::optimize_shift(&spec, args.constellation.r, &params, args.constellation.shift_seed)?;
    eprintln!(
        "energy {:.6} after {} iterations (converged: {})",
        result.energy, result.iterations, result.converged
    );
    let mut text = String::new();
    for v in &result.shift {
        writeln!(text, "{v}").expect("string write");
    }
    match &args.output {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// config file parsing

/// A parsed sectioned key=value file. Keys are tracked so unknown ones can
/// be rejected against a schema.
#[derive(Debug, Default)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(
                    format!("line {}", lineno + 1),
                    "expected `key = value` or `[section]`",
                ));
            };
            if current.is_empty() {
                return Err(Error::config(
                    key.trim(),
                    "key appears before any [section] header",
                ));
            }
            sections
                .get_mut(&current)
                .expect("section exists")
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    fn section(&self, name: &str) -> Option<&BTreeMap<String, String>> {
        self.sections.get(name)
    }

    /// Reject any key not listed in the schema.
    pub fn check_schema(&self, schema: &[(&str, &[&str])]) -> Result<()> {
        for (section, keys) in &self.sections {
            let Some((_, allowed)) = schema.iter().find(|(s, _)| s == section) else {
                return Err(Error::config(section, "unknown section"));
            };
            for key in keys.keys() {
                if !allowed.contains(&key.as_str()) {
                    return Err(Error::config(
                        format!("{section}.{key}"),
                        "unknown key",
                    ));
                }
            }
        }
        Ok(())
    }

    fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.section(section).and_then(|s| s.get(key)).map(|s| s.as_str())
    }

    fn parsed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(text) => text.parse::<T>().map(Some).map_err(|_| {
                Error::config(format!("{section}.{key}"), format!("cannot parse {text:?}"))
            }),
        }
    }

    fn required<T: FromStr>(&self, section: &str, key: &str) -> Result<T> {
        self.parsed(section, key)?.ok_or_else(|| {
            Error::config(format!("{section}.{key}"), "required key is missing")
        })
    }

    fn list_f64(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(text) => {
                let mut out = Vec::new();
                for item in text.split(',') {
                    let item = item.trim();
                    if item.is_empty() {
                        continue;
                    }
                    out.push(item.parse::<f64>().map_err(|_| {
                        Error::config(
                            format!("{section}.{key}"),
                            format!("cannot parse {item:?}"),
                        )
                    })?);
                }
                Ok(Some(out))
            }
        }
    }
}

fn config_constellation(cfg: &ConfigFile) -> Result<ConstellationArgs> {
    Ok(ConstellationArgs {
        lattice: cfg
            .get("constellation", "family")
            .unwrap_or("cubic")
            .to_string(),
        n: cfg.parsed("constellation", "n")?,
        r: cfg.parsed("constellation", "r")?.unwrap_or(2),
        labeling: cfg
            .get("constellation", "labeling")
            .unwrap_or("quasi-gray")
            .to_string(),
        shift: cfg
            .get("constellation", "shift")
            .unwrap_or("random")
            .to_string(),
        shift_seed: cfg.parsed("constellation", "shift_seed")?.unwrap_or(1),
    })
}

// ---------------------------------------------------------------------------
// awgn sweep

const AWGN_SCHEMA: &[(&str, &[&str])] = &[
    (
        "constellation",
        &["kind", "family", "n", "r", "labeling", "shift", "shift_seed", "order"],
    ),
    ("detector", &["kind"]),
    ("grid", &["eb_n0_db"]),
    ("stop", &["min_bit_errors", "max_symbols"]),
    ("run", &["master_seed", "output"]),
];

const AWGN_HEADER: &str =
    "family,r,se,labeling,detector,eb_n0_db,symbols,bit_errors,sym_errors,ber,ser,ci_lo,ci_hi";

fn cmd_awgn(args: SweepArgs) -> Result<()> {
    let cfg = ConfigFile::load(&args.config)?;
    let output = args
        .output
        .or_else(|| cfg.get("run", "output").map(PathBuf::from))
        .ok_or_else(|| Error::config("run.output", "required key is missing"))?;
    let rows = awgn_rows(&cfg, args.master_seed)?;
    write_atomic(&output, rows.as_bytes())
}

/// Run the Gaussian-channel sweep described by a parsed config and return
/// the CSV (header plus one row per grid point, in grid order).
pub fn awgn_rows(cfg: &ConfigFile, seed_override: Option<u64>) -> Result<String> {
    cfg.check_schema(AWGN_SCHEMA)?;

    let master_seed: u64 = match seed_override {
        Some(s) => s,
        None => cfg.required("run", "master_seed")?,
    };
    let grid = cfg
        .list_f64("grid", "eb_n0_db")?
        .ok_or_else(|| Error::config("grid.eb_n0_db", "required key is missing"))?;
    let params = RunParams {
        min_bit_errors: cfg.parsed("stop", "min_bit_errors")?.unwrap_or(100),
        max_symbols: cfg.parsed("stop", "max_symbols")?.unwrap_or(100_000_000),
        master_seed,
    };
    let detector: Detector = cfg
        .get("detector", "kind")
        .unwrap_or("alg2")
        .parse()?;

    let kind = cfg.get("constellation", "kind").unwrap_or("vc");
    let mut rows = String::new();
    writeln!(rows, "{AWGN_HEADER}").expect("string write");
    match kind {
        "vc" => {
            let cargs = config_constellation(cfg)?;
            let (vc, labeling) = build_constellation(&cargs)?;
            let modem = Modem::vc(&vc, labeling, detector)?;
            let cells = awgn::run_cells(&modem, &grid, &params, 0);
            for c in &cells {
                writeln!(
                    rows,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    vc.spec().family(),
                    vc.scale_factor(),
                    vc.spectral_efficiency(),
                    labeling,
                    detector,
                    c.eb_n0_db,
                    c.symbols,
                    c.bit_errors,
                    c.symbol_errors,
                    c.ber,
                    c.ser,
                    c.ci_lo,
                    c.ci_hi
                )
                .expect("string write");
            }
        }
        "qam" => {
            let order: u32 = cfg.required("constellation", "order")?;
            let modem = Modem::qam(order)?;
            let cells = awgn::run_cells(&modem, &grid, &params, 0);
            for c in &cells {
                writeln!(
                    rows,
                    "qam{},{},{},gray,slicing,{},{},{},{},{},{},{},{}",
                    order,
                    (order as f64).sqrt() as u32,
                    (order as f64).log2(),
                    c.eb_n0_db,
                    c.symbols,
                    c.bit_errors,
                    c.symbol_errors,
                    c.ber,
                    c.ser,
                    c.ci_lo,
                    c.ci_hi
                )
                .expect("string write");
            }
        }
        other => {
            return Err(Error::config(
                "constellation.kind",
                format!("unknown kind {other}"),
            ))
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// fiber sweep

const FIBER_SCHEMA: &[(&str, &[&str])] = &[
    (
        "constellation",
        &["kind", "family", "n", "r", "labeling", "shift", "shift_seed", "order", "wavelengths"],
    ),
    (
        "signal",
        &[
            "n_symbols",
            "symbol_rate_gbaud",
            "rrc_rolloff",
            "oversampling",
            "wdm_spacing_ghz",
            "pilot_overhead",
        ],
    ),
    (
        "fiber",
        &[
            "n_spans",
            "span_length_km",
            "gamma_nl_per_w_km",
            "dispersion_ps_nm_km",
            "attenuation_db_km",
            "edfa_noise_figure_db",
            "ssfm_step_km",
            "reference_wavelength_nm",
        ],
    ),
    ("sweep", &["power_dbm", "span_counts", "frames"]),
    ("run", &["master_seed", "output"]),
];

const FIBER_HEADER: &str =
    "family,r,se,power_dbm,n_spans,distance_km,symbols,bit_errors,ber";

fn cmd_fiber(args: SweepArgs) -> Result<()> {
    let cfg = ConfigFile::load(&args.config)?;
    let output = args
        .output
        .or_else(|| cfg.get("run", "output").map(PathBuf::from))
        .ok_or_else(|| Error::config("run.output", "required key is missing"))?;
    let rows = fiber_rows(&cfg, args.master_seed)?;
    write_atomic(&output, rows.as_bytes())
}

/// Run the fiber sweep described by a parsed config and return the CSV.
pub fn fiber_rows(cfg: &ConfigFile, seed_override: Option<u64>) -> Result<String> {
    cfg.check_schema(FIBER_SCHEMA)?;

    let master_seed: u64 = match seed_override {
        Some(s) => s,
        None => cfg.required("run", "master_seed")?,
    };

    let kind = cfg.get("constellation", "kind").unwrap_or("vc");
    let (vc_holder, format): (Option<(VoronoiConstellation, Labeling)>, _) = match kind {
        "vc" => {
            let cargs = config_constellation(cfg)?;
            let built = build_constellation(&cargs)?;
            (Some(built), None)
        }
        "qam" => {
            let order: u32 = cfg.required("constellation", "order")?;
            let wavelengths: usize = cfg.required("constellation", "wavelengths")?;
            (None, Some((order, wavelengths)))
        }
        other => {
            return Err(Error::config(
                "constellation.kind",
                format!("unknown kind {other}"),
            ))
        }
    };
    let format = match (&vc_holder, format) {
        (Some((vc, labeling)), None) => FiberFormat::Vc {
            vc,
            labeling: *labeling,
        },
        (None, Some((order, n_wavelengths))) => FiberFormat::DualPolQam {
            order,
            n_wavelengths,
        },
        _ => unreachable!(),
    };

    let n_spans: usize = cfg.parsed("fiber", "n_spans")?.unwrap_or(10);
    let mut fiber_cfg = FiberConfig::new(n_spans);
    if let Some(v) = cfg.parsed("fiber", "span_length_km")? {
        fiber_cfg.span_length_km = v;
    }
    if let Some(v) = cfg.parsed("fiber", "gamma_nl_per_w_km")? {
        fiber_cfg.gamma_nl_per_w_km = v;
    }
    if let Some(v) = cfg.parsed("fiber", "dispersion_ps_nm_km")? {
        fiber_cfg.dispersion_ps_nm_km = v;
    }
    if let Some(v) = cfg.parsed("fiber", "attenuation_db_km")? {
        fiber_cfg.attenuation_db_km = v;
    }
    if let Some(v) = cfg.parsed("fiber", "edfa_noise_figure_db")? {
        fiber_cfg.edfa_noise_figure_db = v;
    }
    if let Some(v) = cfg.parsed("fiber", "ssfm_step_km")? {
        fiber_cfg.ssfm_step_km = v;
    }
    if let Some(v) = cfg.parsed("fiber", "reference_wavelength_nm")? {
        fiber_cfg.reference_wavelength_nm = v;
    }

    let n_symbols: usize = cfg.parsed("signal", "n_symbols")?.unwrap_or(1 << 14);
    let mut signal = SignalParams::new(format.n_wavelengths(), 0.0, n_symbols);
    if let Some(v) = cfg.parsed::<f64>("signal", "symbol_rate_gbaud")? {
        signal.symbol_rate = v * 1e9;
    }
    if let Some(v) = cfg.parsed("signal", "rrc_rolloff")? {
        signal.rrc_rolloff = v;
    }
    if let Some(v) = cfg.parsed("signal", "oversampling")? {
        signal.oversampling = v;
    }
    if let Some(v) = cfg.parsed::<f64>("signal", "wdm_spacing_ghz")? {
        signal.wdm_spacing = v * 1e9;
    }
    if let Some(v) = cfg.parsed("signal", "pilot_overhead")? {
        signal.pilot_overhead = v;
    }

    let powers = cfg
        .list_f64("sweep", "power_dbm")?
        .ok_or_else(|| Error::config("sweep.power_dbm", "required key is missing"))?;
    let span_counts: Vec<usize> = match cfg.list_f64("sweep", "span_counts")? {
        Some(values) => values.into_iter().map(|v| v as usize).collect(),
        None => vec![n_spans],
    };
    let frames: usize = cfg.parsed("sweep", "frames")?.unwrap_or(1);

    let rows = fiber::run_fiber_experiment(
        &format,
        &signal,
        &fiber_cfg,
        &powers,
        &span_counts,
        frames,
        master_seed,
    )?;

    let mut text = String::new();
    writeln!(text, "{FIBER_HEADER}").expect("string write");
    for row in &rows {
        writeln!(
            text,
            "{},{},{},{},{},{},{},{},{}",
            row.family,
            row.r,
            row.se,
            row.power_dbm,
            row.n_spans,
            row.distance_km,
            row.symbols,
            row.bit_errors,
            row.ber
        )
        .expect("string write");
    }
    Ok(text)
}

// ---------------------------------------------------------------------------
// atomic output

/// Write via a temporary sibling plus rename, so interrupted runs leave no
/// partial file at the destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp",
            path.file_name().and_then(|f| f.to_str()).unwrap_or("out")
        )),
        None => PathBuf::from(format!(
            ".{}.tmp",
            path.file_name().and_then(|f| f.to_str()).unwrap_or("out")
        )),
    };
    fs::write(&tmp, bytes).map_err(|e| Error::io(tmp.display().to_string(), e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parser_handles_sections_comments_and_errors() {
        let cfg = ConfigFile::parse(
            "# comment\n[grid]\neb_n0_db = 1, 2, 3 # inline\n\n[run]\nmaster_seed = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.get("run", "master_seed"), Some("9"));
        assert_eq!(cfg.list_f64("grid", "eb_n0_db").unwrap().unwrap(), vec![1.0, 2.0, 3.0]);

        assert!(ConfigFile::parse("key = 1\n").is_err());
        assert!(ConfigFile::parse("[a]\nnot a pair\n").is_err());
    }

    #[test]
    fn schema_rejects_unknown_keys() {
        let cfg = ConfigFile::parse("[grid]\neb_n0_db = 1\nbogus = 2\n").unwrap();
        let err = cfg.check_schema(AWGN_SCHEMA).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("grid.bogus"), "{text}");

        let cfg = ConfigFile::parse("[nonsense]\nx = 1\n").unwrap();
        assert!(cfg.check_schema(AWGN_SCHEMA).is_err());
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, b"one\n").unwrap();
        write_atomic(&path, b"two\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two\n");
        // no stray temp files
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().contains("tmp"))
            .collect();
        assert!(leftovers.is_empty());
    }
}
