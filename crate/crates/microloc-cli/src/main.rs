//! Command-line front end: reads a run-configuration file, executes one of
//! the commands (propagate, transport, predict, detect, verify), and writes
//! bit-exact CSV/JSON data files.
//!
//! Exit codes: 0 success, 1 verification check failure, 2 usage or config
//! error, 3 numerical non-convergence. Failures print a JSON error record
//! to standard error.

use clap::Parser;
use microloc::config::{metric_from_section, ConfigError, RawConfig, Section};
use microloc::flow::{self, integrate_bicharacteristic, FlowError, TransportMode};
use microloc::geometry::{metric_at, null_covector_from_direction, GeometryError, MetricSpec};
use microloc::hadamard::{self, SampleKind};
use microloc::report;
use microloc::spin;
use microloc::verify;
use microloc::wfdetect::{self, DetectError, DetectorConfig, Window};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "microloc", disable_version_flag = true)]
struct Cli {
    /// Run-configuration file
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: current directory)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker count hint; execution order and outputs stay deterministic
    #[arg(long)]
    jobs: Option<usize>,
    /// File of integer seeds, one per line, for batch propagation
    #[arg(long)]
    seed_list: Option<PathBuf>,
    /// Comma-separated check names for the verify command
    #[arg(long)]
    checks: Option<String>,
    /// Output format override
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

enum CmdError {
    /// config or usage problems -> exit 2
    Config(String),
    /// numerical non-convergence or domain escapes -> exit 3
    Numerical(String),
    /// filesystem problems -> exit 2
    Io(String),
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e.to_string())
    }
}

impl From<GeometryError> for CmdError {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::BadSpec(m) => CmdError::Config(m),
            other => CmdError::Numerical(other.to_string()),
        }
    }
}

impl From<FlowError> for CmdError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Geometry(g) => g.into(),
            other => CmdError::Numerical(other.to_string()),
        }
    }
}

impl From<DetectError> for CmdError {
    fn from(e: DetectError) -> Self {
        CmdError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CmdError {
    fn from(e: std::io::Error) -> Self {
        CmdError::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            let (kind, msg, code) = match e {
                CmdError::Config(m) => ("config", m, 2),
                CmdError::Io(m) => ("io", m, 2),
                CmdError::Numerical(m) => ("numerical", m, 3),
            };
            let record = serde_json::json!({ "error": msg, "kind": kind });
            eprintln!("{}", record);
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, CmdError> {
    let src = std::fs::read_to_string(&cli.config)
        .map_err(|e| CmdError::Config(format!("cannot read {}: {}", cli.config.display(), e)))?;
    let cfg = RawConfig::parse(&src)?;
    let spec = metric_from_section(cfg.section("metric")?)?;
    let command = cfg.section("command")?;
    let out_dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    let format = match &cli.format {
        Some(f) => f.clone(),
        None => match cfg.section_opt("output") {
            Some(sec) => sec.string_or("format", default_format(command)?)?.to_string(),
            None => default_format(command)?.to_string(),
        },
    };
    match command.string("name")? {
        "propagate" => cmd_propagate(cli, &cfg, &spec, command, &out_dir),
        "transport" => cmd_transport(&spec, command, &out_dir),
        "predict" => cmd_predict(&spec, command, &out_dir),
        "detect" => cmd_detect(&spec, command, &out_dir, &format),
        "verify" => cmd_verify(cli, &cfg, &spec, command, &out_dir),
        other => Err(CmdError::Config(format!("unknown command '{}'", other))),
    }
}

fn default_format(command: &Section) -> Result<&'static str, CmdError> {
    Ok(match command.string("name")? {
        "propagate" | "transport" => "csv",
        _ => "json",
    })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CmdError> {
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Initial covector: either `xi = [..]` verbatim, or a spatial `direction =
/// [..]` turned into a future null covector at `x`.
fn initial_covector(
    spec: &MetricSpec,
    command: &Section,
    x: &[f64; 4],
) -> Result<[f64; 4], CmdError> {
    if command.has("xi") {
        return Ok(command.vec4("xi")?);
    }
    let dir = command.numbers("direction")?;
    if dir.len() != 3 {
        return Err(CmdError::Config(format!(
            "direction needs 3 components, found {}",
            dir.len()
        )));
    }
    let n = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
    if n == 0.0 {
        return Err(CmdError::Config("direction must be nonzero".into()));
    }
    let cache = metric_at(spec, x)?;
    Ok(null_covector_from_direction(
        &cache,
        &[dir[0] / n, dir[1] / n, dir[2] / n],
    ))
}

fn cmd_propagate(
    cli: &Cli,
    _cfg: &RawConfig,
    spec: &MetricSpec,
    command: &Section,
    out_dir: &Path,
) -> Result<ExitCode, CmdError> {
    let x = command.vec4("x")?;
    let tau_end = command.number("tau-end")?;
    let samples = command.count_or("samples", 65)?;
    if let Some(seed_path) = &cli.seed_list {
        let seeds = read_seed_list(seed_path)?;
        for (i, seed) in seeds.iter().enumerate() {
            // one random null direction per seed at the configured base point
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
            let cache = metric_at(spec, &x)?;
            let dir = loop {
                let v: [f64; 3] = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if n > 0.1 {
                    break [v[0] / n, v[1] / n, v[2] / n];
                }
            };
            let xi = null_covector_from_direction(&cache, &dir);
            let strip = integrate_bicharacteristic(spec, &x, &xi, tau_end, samples)?;
            write_file(out_dir, &format!("seed_{:04}.csv", i), &report::strip_csv(&strip, None))?;
        }
        return Ok(ExitCode::SUCCESS);
    }
    let xi = initial_covector(spec, command, &x)?;
    let strip = integrate_bicharacteristic(spec, &x, &xi, tau_end, samples)?;
    write_file(out_dir, "strip.csv", &report::strip_csv(&strip, None))?;
    Ok(ExitCode::SUCCESS)
}

fn read_seed_list(path: &Path) -> Result<Vec<u64>, CmdError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| CmdError::Config(format!("cannot read {}: {}", path.display(), e)))?;
    let mut seeds = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: u64 = t
            .parse()
            .map_err(|_| CmdError::Config(format!("seed list line {}: bad seed '{}'", i + 1, t)))?;
        seeds.push(v);
    }
    Ok(seeds)
}

fn parse_mode(name: &str) -> Result<TransportMode, CmdError> {
    Ok(match name {
        "levi-civita" => TransportMode::LeviCivita,
        "spinor" => TransportMode::Spinor,
        "cospinor" => TransportMode::Cospinor,
        "bispinor" => TransportMode::BispinorBoth,
        "bispinor-right" => TransportMode::BispinorRightOnly,
        other => return Err(CmdError::Config(format!("unknown transport mode '{}'", other))),
    })
}

fn fibre_from_config(
    spec: &MetricSpec,
    command: &Section,
    x: &[f64; 4],
    xi: &[f64; 4],
    mode: TransportMode,
) -> Result<DMatrix<Complex64>, CmdError> {
    if command.string_or("fibre", "")? == "slash" {
        let gs = spin::gamma_set_at(spec, x)?;
        let slash = gs.slash(xi);
        return Ok(DMatrix::from_fn(4, 4, |i, j| slash[(i, j)]));
    }
    let re = command.numbers("fibre-re")?;
    let im = if command.has("fibre-im") {
        command.numbers("fibre-im")?.to_vec()
    } else {
        vec![0.0; re.len()]
    };
    if im.len() != re.len() {
        return Err(CmdError::Config("fibre-re and fibre-im lengths differ".into()));
    }
    let (rows, cols) = match (re.len(), mode) {
        (4, TransportMode::LeviCivita | TransportMode::Spinor) => (4, 1),
        (4, TransportMode::Cospinor) => (1, 4),
        (16, TransportMode::BispinorBoth | TransportMode::BispinorRightOnly) => (4, 4),
        (n, _) => {
            return Err(CmdError::Config(format!(
                "fibre of length {} does not fit the transport mode",
                n
            )))
        }
    };
    Ok(DMatrix::from_fn(rows, cols, |i, j| {
        let k = i * cols + j;
        Complex64::new(re[k], im[k])
    }))
}

fn cmd_transport(
    spec: &MetricSpec,
    command: &Section,
    out_dir: &Path,
) -> Result<ExitCode, CmdError> {
    let x = command.vec4("x")?;
    let xi = initial_covector(spec, command, &x)?;
    let tau_end = command.number("tau-end")?;
    let samples = command.count_or("samples", 65)?;
    let mode = parse_mode(command.string_or("mode", "bispinor")?)?;
    let w0 = fibre_from_config(spec, command, &x, &xi, mode)?;
    let strip = integrate_bicharacteristic(spec, &x, &xi, tau_end, samples)?;
    let pol = flow::transport(&strip, &w0, mode)?;
    write_file(out_dir, "strip.csv", &report::strip_csv(&pol.strip, Some(&pol)))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_predict(
    spec: &MetricSpec,
    command: &Section,
    out_dir: &Path,
) -> Result<ExitCode, CmdError> {
    let x = command.vec4("x")?;
    let y = command.vec4("y")?;
    let value = match command.string("predictor")? {
        "hadamard-wf" => {
            report::wf_elements_json(&hadamard::predict_wf_hadamard_scalar(spec, &x, &y)?)
        }
        "hadamard-pol" => report::pol_elements_json(&hadamard::predict_pol_dirac(spec, &x, &y)?),
        "feynman-wf" => {
            let same = (0..4).all(|i| x[i] == y[i]);
            let els = if same {
                let count = command.count_or("count", 64)?;
                hadamard::feynman_diagonal_grid(spec, &x, count)?
            } else {
                hadamard::predict_wf_feynman(spec, &x, &y)?
            };
            report::wf_elements_json(&els)
        }
        other => return Err(CmdError::Config(format!("unknown predictor '{}'", other))),
    };
    write_file(out_dir, "report.json", &report::render_json(&value))?;
    Ok(ExitCode::SUCCESS)
}

fn window_from_config(command: &Section) -> Result<Window, CmdError> {
    Ok(match command.string_or("window", "gaussian")? {
        "gaussian" => Window::Gaussian {
            sigma: command.number("sigma")?,
        },
        "bump" => Window::Bump {
            width: command.number("width")?,
        },
        other => return Err(CmdError::Config(format!("unknown window '{}'", other))),
    })
}

fn detector_from_config(command: &Section) -> Result<DetectorConfig, CmdError> {
    let window = window_from_config(command)?;
    let k_max = command.number("k-max")?;
    let k_min = command.number_or("k-min", k_max / 16.0)?;
    let n_radial = command.count_or("n-radial", 9)?;
    let resolution = command.count_or("resolution", 8)?;
    Ok(DetectorConfig::new(window, resolution, k_min, k_max, n_radial))
}

fn cmd_detect(
    spec: &MetricSpec,
    command: &Section,
    out_dir: &Path,
    format: &str,
) -> Result<ExitCode, CmdError> {
    let cfg = detector_from_config(command)?;
    let eps = command.number("eps")?;
    let halfwidth = command.number("halfwidth")?;
    let spacing = command.number("spacing")?;
    let sample_name = command.string("sample")?;
    if sample_name == "minkowski-slice" {
        if !matches!(spec, MetricSpec::Minkowski) {
            return Err(CmdError::Config(
                "minkowski-slice sampling requires the minkowski metric".into(),
            ));
        }
        let sample = hadamard::sample_minkowski_slice(
            command.number_or("mass", 0.0)?,
            &command.vec4("x-base")?,
            &command.vec4("x-dir")?,
            &command.vec4("y-base")?,
            &command.vec4("y-dir")?,
            halfwidth,
            spacing,
            eps,
        )?;
        let mut candidates = Vec::new();
        if command.has("xi") {
            candidates.push((command.vec4("xi")?, command.vec4("eta")?));
        }
        let rep = wfdetect::wf_detect_two_point(&sample, &cfg, &candidates)?;
        return write_wf_report(&rep, out_dir, format);
    }
    let kind = match sample_name {
        "delta" => SampleKind::Delta,
        "one-over-x" => SampleKind::OneOverXPlusIEps,
        "v-laplacian-v" => SampleKind::VLaplacianV,
        "grad-delta-2d" => SampleKind::GradDelta2d,
        "smooth" => SampleKind::SmoothGaussian,
        other => return Err(CmdError::Config(format!("unknown sample '{}'", other))),
    };
    let sample = hadamard::sample_examples(kind, halfwidth, spacing, eps)?;
    let base: Vec<f64> = if command.has("base") {
        command.numbers("base")?.to_vec()
    } else {
        vec![0.0; sample.dim]
    };
    if base.len() != sample.dim {
        return Err(CmdError::Config(format!(
            "base has {} components for a {}-d sample",
            base.len(),
            sample.dim
        )));
    }
    if command.string_or("report", "wf")? == "pol" {
        let entries = wfdetect::pol_detect(&sample, &cfg, &[base])?;
        let v = report::pol_report_json(&entries);
        write_file(out_dir, "report.json", &report::render_json(&v))?;
        return Ok(ExitCode::SUCCESS);
    }
    let rep = wfdetect::wf_detect(&sample, &cfg, &[base])?;
    write_wf_report(&rep, out_dir, format)
}

fn write_wf_report(
    rep: &wfdetect::WFReport,
    out_dir: &Path,
    format: &str,
) -> Result<ExitCode, CmdError> {
    match format {
        "csv" => write_file(out_dir, "report.csv", &report::wf_report_csv(rep))?,
        _ => write_file(
            out_dir,
            "report.json",
            &report::render_json(&report::wf_report_json(rep)),
        )?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(
    cli: &Cli,
    cfg: &RawConfig,
    spec: &MetricSpec,
    command: &Section,
    out_dir: &Path,
) -> Result<ExitCode, CmdError> {
    let names: Vec<String> = match &cli.checks {
        Some(list) => list.split(',').map(|s| s.trim().to_string()).collect(),
        None if command.has("checks") => command.strings("checks")?.to_vec(),
        None => Vec::new(),
    };
    let seed = command.count_or("seed", 7)? as u64;
    let tol_scale = match cfg.section_opt("tolerances") {
        Some(sec) => sec.number_or("scale", 1.0)?,
        None => 1.0,
    };
    let results = verify::run_checks(spec, &names, seed, tol_scale).map_err(|e| match e {
        verify::VerifyError::UnknownCheck(_) => CmdError::Config(e.to_string()),
        verify::VerifyError::Geometry(g) => g.into(),
    })?;
    let v = report::checks_json(&results);
    write_file(out_dir, "checks.json", &report::render_json(&v))?;
    if results.iter().all(|r| r.pass) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}
