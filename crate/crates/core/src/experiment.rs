//! Experiment configuration, seeded initial data, CSV output and the
//! command-line front end.
//!
//! Configuration is a flat `key = value` text file (`#` starts a comment);
//! command-line flags override file entries. Every run is deterministic in
//! its configuration.
//!
//! Random initial data uses ChaCha8 seeded with `seed_from_u64(seed)`.
//! For `n = 0..=bandlimit` it draws the displacement coefficient and then
//! the velocity coefficient, each `amplitude · max(n,1)^(−decay_rate) · U`
//! with `U` uniform on `[−1, 1)`; the displacement mean is set to zero
//! afterwards since it does not enter `g`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::control_sim::{adversaries, bound_check, replay, PiecewiseControl, RateEnvelope};
use crate::error::Error as NumericError;
use crate::even_field::{required_grid, rho, to_traveling_wave, EvenFourier, Problem, StatePair};
use crate::friction_solver::solve_phi;
use crate::galerkin_oracle::{integrate_feedback, project_state, OracleParams};
use crate::support_geometry::{support_d, support_omega, Momentum};
use crate::trajectory::{time_index, KickHistory, LoadPoint, TrajectoryRecord};

/// Header of trajectory CSV files.
pub const RECORD_HEADER: &str = "t,rho_stop,rho_damp,u,phi0";
/// Header of the `decay` summary file.
pub const SUMMARY_HEADER: &str = "rho0,rhoT,T,rate,degenerate";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("numeric failure: {0}")]
    Numeric(#[from] NumericError),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: io::Error,
    },

    #[error("rate bound violated by {count} control(s); max rate {max_rate}")]
    BoundViolated { count: usize, max_rate: f64 },
}

impl RunError {
    fn config(key: &str, message: impl Into<String>) -> Self {
        RunError::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// Process exit code: 2 for configuration errors, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Decay,
    Support,
    Oracle,
    BoundCheck,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "simulate" => Mode::Simulate,
            "decay" => Mode::Decay,
            "support" => Mode::Support,
            "oracle" => Mode::Oracle,
            "bound-check" => Mode::BoundCheck,
            other => return Err(format!("unknown mode `{other}`")),
        })
    }
}

/// Where the initial profile comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Explicit(StatePair),
    Random {
        seed: u64,
        amplitude: f64,
        decay_rate: f64,
        bandlimit: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub grid: usize,
    pub horizon: f64,
    pub problem: Problem,
    pub initial: InitialData,
    pub momentum: Momentum,
    /// Seeds random initial data and adversarial controls.
    pub seed: u64,
    pub oracle_order: usize,
    pub oracle_dt: f64,
    pub oracle_eps: f64,
    pub controls: usize,
    pub control_file: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Simulate,
            grid: 1024,
            horizon: 10.0 * TAU,
            problem: Problem::StopMoving,
            initial: InitialData::Explicit(StatePair::default()),
            momentum: Momentum::default(),
            seed: 1,
            oracle_order: 64,
            oracle_dt: 1e-4,
            oracle_eps: 1e-3,
            controls: 100,
            control_file: None,
            out: None,
        }
    }
}

/// Raw `key = value` entries in application order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigEntries(Vec<(String, String)>);

impl ConfigEntries {
    pub fn parse(text: &str) -> Result<Self, RunError> {
        let mut entries = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(RunError::config(
                    &format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            entries.push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(Self(entries))
    }

    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.0.push((key.to_string(), value.into()));
    }
}

/// Parses a number, accepting a trailing `pi` as a factor of π
/// (`80pi`, `2.5pi`, `pi`).
pub fn parse_real(s: &str) -> Option<f64> {
    let s = s.trim();
    if let Some(head) = s.strip_suffix("pi").or_else(|| s.strip_suffix("π")) {
        let head = head.trim().trim_end_matches('*');
        let factor = if head.is_empty() { 1.0 } else { head.parse::<f64>().ok()? };
        return Some(factor * PI);
    }
    s.parse().ok()
}

/// Parses `n:v` or `n=v` items separated by commas.
fn parse_coefficients(key: &str, s: &str) -> Result<Vec<(usize, f64)>, RunError> {
    s.split(',')
        .map(str::trim)
        .filter(|item| !item.is_empty())
        .map(|item| {
            let (n, v) = item
                .split_once(':')
                .or_else(|| item.split_once('='))
                .ok_or_else(|| RunError::config(key, format!("expected `n:value`, got `{item}`")))?;
            let n = n
                .trim()
                .parse::<usize>()
                .map_err(|_| RunError::config(key, format!("bad mode index `{n}`")))?;
            let v = parse_real(v)
                .filter(|v| v.is_finite())
                .ok_or_else(|| RunError::config(key, format!("bad coefficient `{v}`")))?;
            Ok((n, v))
        })
        .collect()
}

#[derive(Debug, Default)]
struct RandomSpec {
    seed: Option<u64>,
    amplitude: Option<f64>,
    decay_rate: Option<f64>,
    bandlimit: Option<usize>,
}

impl ExperimentConfig {
    /// Builds and validates a configuration from entries; later entries
    /// win.
    pub fn from_entries(entries: &ConfigEntries) -> Result<Self, RunError> {
        let mut cfg = ExperimentConfig::default();
        // later entries for the same mode replace earlier ones
        let mut coeffs: BTreeMap<&str, BTreeMap<usize, f64>> = BTreeMap::new();
        let mut random = RandomSpec::default();

        fn real(key: &str, v: &str) -> Result<f64, RunError> {
            parse_real(v)
                .filter(|x| !x.is_nan())
                .ok_or_else(|| RunError::config(key, format!("not a number: `{v}`")))
        }
        fn int(key: &str, v: &str) -> Result<usize, RunError> {
            v.parse()
                .map_err(|_| RunError::config(key, format!("not a non-negative integer: `{v}`")))
        }

        for (key, value) in &entries.0 {
            let v = value.as_str();
            match key.as_str() {
                "mode" => cfg.mode = v.parse().map_err(|e: String| RunError::config(key, e))?,
                "grid" => cfg.grid = int(key, v)?,
                "horizon" => cfg.horizon = real(key, v)?,
                "problem" => cfg.problem = v.parse().map_err(|e: String| RunError::config(key, e))?,
                "seed" => {
                    random.seed = Some(
                        v.parse()
                            .map_err(|_| RunError::config(key, format!("not a seed: `{v}`")))?,
                    )
                }
                "amplitude" => random.amplitude = Some(real(key, v)?),
                "decay_rate" => random.decay_rate = Some(real(key, v)?),
                "bandlimit" => random.bandlimit = Some(int(key, v)?),
                "f0" | "f1" | "psi" | "phi" => {
                    let k: &'static str = match key.as_str() {
                        "f0" => "f0",
                        "f1" => "f1",
                        "psi" => "psi",
                        _ => "phi",
                    };
                    coeffs.entry(k).or_default().extend(parse_coefficients(key, v)?);
                }
                "oracle_n" => cfg.oracle_order = int(key, v)?,
                "oracle_dt" => cfg.oracle_dt = real(key, v)?,
                "oracle_eps" => cfg.oracle_eps = real(key, v)?,
                "controls" => cfg.controls = int(key, v)?,
                "control_file" => cfg.control_file = Some(PathBuf::from(v)),
                "out" => cfg.out = Some(PathBuf::from(v)),
                other => return Err(RunError::config(other, "unknown key")),
            }
        }

        let explicit = coeffs.contains_key("f0") || coeffs.contains_key("f1");
        let wants_random = random.amplitude.is_some() || random.decay_rate.is_some() || random.bandlimit.is_some();
        if explicit && wants_random {
            return Err(RunError::config(
                "amplitude",
                "random initial data cannot be combined with explicit f0/f1",
            ));
        }
        fn numeric(key: &'static str) -> impl Fn(NumericError) -> RunError {
            move |e| RunError::config(key, e.to_string())
        }
        let pairs = |k: &str| -> Vec<(usize, f64)> {
            coeffs.get(k).map(|m| m.iter().map(|(&n, &v)| (n, v)).collect()).unwrap_or_default()
        };
        if explicit {
            let f0 = EvenFourier::from_pairs(&pairs("f0")).map_err(numeric("f0"))?;
            let f1 = EvenFourier::from_pairs(&pairs("f1")).map_err(numeric("f1"))?;
            cfg.initial = InitialData::Explicit(StatePair::new(f0, f1));
        } else if wants_random {
            cfg.initial = InitialData::Random {
                seed: random.seed.unwrap_or(1),
                amplitude: random.amplitude.unwrap_or(1.0),
                decay_rate: random.decay_rate.unwrap_or(1.0),
                bandlimit: random.bandlimit.unwrap_or(16),
            };
        }
        cfg.momentum = Momentum::from_pairs(&pairs("phi"), &pairs("psi"))
        .map_err(numeric("psi"))?;
        cfg.seed = random.seed.unwrap_or(1);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.grid < 2 || self.grid % 2 != 0 {
            return Err(RunError::config(
                "grid",
                format!("grid size must be even and >= 2, got {}", self.grid),
            ));
        }
        if !(self.horizon >= 0.0) || !self.horizon.is_finite() {
            return Err(RunError::config(
                "horizon",
                format!("horizon must be finite and >= 0, got {}", self.horizon),
            ));
        }
        let bandlimit = match &self.initial {
            InitialData::Explicit(f) => f.degree(),
            InitialData::Random {
                amplitude,
                decay_rate,
                bandlimit,
                ..
            } => {
                if !(*amplitude >= 0.0) {
                    return Err(RunError::config("amplitude", format!("must be >= 0, got {amplitude}")));
                }
                if !(*decay_rate > 0.0) {
                    return Err(RunError::config("decay_rate", format!("must be > 0, got {decay_rate}")));
                }
                *bandlimit
            }
        };
        if self.grid < required_grid(bandlimit) {
            return Err(RunError::config(
                "grid",
                format!(
                    "grid {} cannot resolve bandlimit {bandlimit} (need >= {})",
                    self.grid,
                    required_grid(bandlimit)
                ),
            ));
        }
        if self.mode == Mode::Oracle {
            if self.oracle_order < 1 {
                return Err(RunError::config("oracle_n", "must be >= 1"));
            }
            if !(self.oracle_dt > 0.0) {
                return Err(RunError::config("oracle_dt", "must be > 0"));
            }
            if !(self.oracle_eps > 0.0) {
                return Err(RunError::config("oracle_eps", "must be > 0"));
            }
        }
        Ok(())
    }

    pub fn initial_state(&self) -> StatePair {
        match &self.initial {
            InitialData::Explicit(f) => f.clone(),
            &InitialData::Random {
                seed,
                amplitude,
                decay_rate,
                bandlimit,
            } => gen_initial(seed, amplitude, decay_rate, bandlimit),
        }
    }
}

/// Deterministic random cosine coefficients with
/// `|c_n| ≤ amplitude · max(n, 1)^(−decay_rate)`.
pub fn gen_initial(seed: u64, amplitude: f64, decay_rate: f64, bandlimit: usize) -> StatePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f0 = Vec::with_capacity(bandlimit + 1);
    let mut f1 = Vec::with_capacity(bandlimit + 1);
    for n in 0..=bandlimit {
        let bound = amplitude * (n.max(1) as f64).powf(-decay_rate);
        f0.push(bound * rng.gen_range(-1.0..1.0));
        f1.push(bound * rng.gen_range(-1.0..1.0));
    }
    f0[0] = 0.0;
    StatePair::new(
        EvenFourier::new(f0).expect("finite coefficients"),
        EvenFourier::new(f1).expect("finite coefficients"),
    )
}

/// Renders a record as CSV with shortest round-trip decimals.
pub fn record_to_csv(rec: &TrajectoryRecord) -> String {
    let mut s = String::with_capacity(64 * (rec.len() + 1));
    s.push_str(RECORD_HEADER);
    s.push('\n');
    for i in 0..rec.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            rec.times[i], rec.rho_stop[i], rec.rho_damp[i], rec.u[i], rec.phi0[i]
        );
    }
    s
}

/// Parses the output of [`record_to_csv`].
pub fn record_from_csv(text: &str) -> Result<TrajectoryRecord, String> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == RECORD_HEADER => {}
        other => return Err(format!("unexpected header {other:?}")),
    }
    let mut rec = TrajectoryRecord::default();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("row {}: {e}", i + 1))?;
        let [t, rs, rd, u, p] = fields[..] else {
            return Err(format!("row {}: expected 5 fields", i + 1));
        };
        rec.times.push(t);
        rec.rho_stop.push(rs);
        rec.rho_damp.push(rd);
        rec.u.push(u);
        rec.phi0.push(p);
    }
    Ok(rec)
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), RunError> {
    let io_err = |context: String| move |source| RunError::Io { context, source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    fs::write(&tmp, contents).map_err(io_err(format!("writing {}", tmp.display())))?;
    fs::rename(&tmp, path).map_err(io_err(format!("renaming into {}", path.display())))
}

/// Path of the `decay` summary next to the main output.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.summary.csv"))
}

/// Reads a control file with rows `start,end,u` (header optional). The
/// segments must tile `[0, end]` without gaps.
pub fn read_control_file(path: &Path) -> Result<PiecewiseControl, RunError> {
    let text = fs::read_to_string(path).map_err(|source| RunError::Io {
        context: format!("reading {}", path.display()),
        source,
    })?;
    let bad = |msg: String| RunError::config("control_file", msg);
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    let mut end = 0.0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("start") {
            continue;
        }
        let fields: Vec<f64> = line
            .split(',')
            .map(|f| parse_real(f).ok_or_else(|| bad(format!("line {}: bad number `{f}`", i + 1))))
            .collect::<Result<_, _>>()?;
        let [start, stop, u] = fields[..] else {
            return Err(bad(format!("line {}: expected start,end,u", i + 1)));
        };
        if start != end {
            return Err(bad(format!("line {}: segment starts at {start}, expected {end}", i + 1)));
        }
        if !(u.abs() <= 1.0) {
            return Err(bad(format!("line {}: control value {u} violates |u| <= 1", i + 1)));
        }
        breakpoints.push(start);
        values.push(u);
        end = stop;
    }
    PiecewiseControl::new(breakpoints, values, end).map_err(|e| bad(e.to_string()))
}

/// Output of [`run`]: files written and text for standard output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutput {
    pub stdout: String,
    pub files: Vec<PathBuf>,
}

impl RunOutput {
    fn emit(&mut self, out: Option<&Path>, contents: String) -> Result<(), RunError> {
        match out {
            Some(path) => {
                write_atomic(path, &contents)?;
                self.files.push(path.to_path_buf());
            }
            None => self.stdout.push_str(&contents),
        }
        Ok(())
    }
}

/// Runs one experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    cfg.validate()?;
    let mut output = RunOutput::default();
    let out = cfg.out.as_deref();
    match cfg.mode {
        Mode::Simulate | Mode::Decay => {
            let g = to_traveling_wave(&cfg.initial_state(), cfg.grid)?;
            let rec = solve_phi(&g, cfg.horizon)?.trajectory(cfg.horizon)?;
            output.emit(out, record_to_csv(&rec))?;
            if cfg.mode == Mode::Decay {
                let d = rec.decay(cfg.problem);
                let summary = format!(
                    "{SUMMARY_HEADER}\n{},{},{},{},{}\n",
                    d.rho0, d.rho_t, d.horizon, d.rate, d.degenerate
                );
                if let Some(path) = out {
                    let sp = summary_path(path);
                    write_atomic(&sp, &summary)?;
                    output.files.push(sp);
                }
                output.stdout.push_str(&summary);
            }
        }
        Mode::Support => {
            let h_d = support_d(&cfg.momentum, cfg.horizon)?;
            let h_omega = support_omega(&cfg.momentum)?;
            let ratio = if h_omega > 0.0 { h_d / h_omega } else { 0.0 };
            output.stdout.push_str(&format!(
                "T,H_D(T),H_Omega,ratio\n{},{h_d},{h_omega},{ratio}\n",
                cfg.horizon
            ));
        }
        Mode::Oracle => {
            let state = cfg.initial_state();
            let g = to_traveling_wave(&state, cfg.grid)?;
            let sig = solve_phi(&g, cfg.horizon)?;
            let params = OracleParams {
                dt: cfg.oracle_dt,
                eps: cfg.oracle_eps,
                record_every: ((cfg.horizon / cfg.oracle_dt / 2000.0).floor() as usize).max(1),
            };
            let traj = integrate_feedback(&project_state(&state, cfg.oracle_order), cfg.horizon, params)?;
            let mut csv = String::from("t,ft0,phi,u,energy\n");
            for i in 0..traj.times.len() {
                let t = traj.times[i];
                let step = time_index(t, cfg.grid).min(sig.steps() - 1);
                let phi = sig.value(0, step, LoadPoint::Midpoint)?;
                let _ = writeln!(
                    csv,
                    "{t},{},{phi},{},{}",
                    traj.load_point_velocity[i], traj.control[i], traj.energy[i]
                );
            }
            output.emit(out, csv)?;
        }
        Mode::BoundCheck => {
            let g = to_traveling_wave(&cfg.initial_state(), cfg.grid)?;
            let mut controls = adversaries(&g, cfg.horizon, cfg.controls, cfg.seed)?;
            if let Some(path) = &cfg.control_file {
                controls.push(read_control_file(path)?);
            }
            let sig = solve_phi(&g, cfg.horizon)?;
            let dry = replay(&sig, cfg.horizon)?.decay(Problem::StopMoving);
            let envelope = RateEnvelope::DEFAULT;
            let report = bound_check(&g, &controls, cfg.horizon, envelope)?;
            let mut csv = String::from("index,rate,level,bound,within\n");
            let _ = writeln!(
                csv,
                "dry-friction,{},{},{},{}",
                dry.rate,
                dry.level(),
                envelope.bound(dry.horizon, dry.level()),
                dry.rate <= envelope.bound(dry.horizon, dry.level())
            );
            for (i, (&rate, &level)) in report.rates.iter().zip(&report.levels).enumerate() {
                let bound = envelope.bound(report.horizon, level);
                let _ = writeln!(csv, "{i},{rate},{level},{bound},{}", rate <= bound);
            }
            output.emit(out, csv)?;
            output.stdout.push_str(&format!(
                "rho0 = {}\ndry-friction rate = {}\nmax adversarial rate = {}\nviolations = {}\n",
                rho(&g, Problem::StopMoving),
                dry.rate,
                report.max_rate,
                report.violations.len()
            ));
            if !report.holds() {
                return Err(RunError::BoundViolated {
                    count: report.violations.len(),
                    max_rate: report.max_rate,
                });
            }
        }
    }
    Ok(output)
}

#[derive(Debug, Parser)]
#[command(name = "string-damping", version, about = "Dry-friction damping of a closed string")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-loop trajectory of ρ under dry friction.
    Simulate(CommonArgs),
    /// Trajectory plus the average decay rate of ρ.
    Decay(CommonArgs),
    /// Support functions of D(T) and Ω for a momentum.
    Support(CommonArgs),
    /// Galerkin truncation cross-check of the load-point velocity.
    Oracle(CommonArgs),
    /// Decay rates of seeded adversarial controls against the envelope.
    BoundCheck(CommonArgs),
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<String>,
    /// Horizon T; a trailing `pi` multiplies by π (e.g. `80pi`).
    #[arg(long, allow_hyphen_values = true)]
    pub horizon: Option<String>,
    /// `stop` or `damp`.
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Momentum coefficient ψ_n as `n=v`; repeatable.
    #[arg(long)]
    pub psi: Vec<String>,
    /// Momentum coefficient φ_n as `n=v`; repeatable.
    #[arg(long)]
    pub phi: Vec<String>,
    /// Displacement cosine coefficient as `n=v`; repeatable.
    #[arg(long)]
    pub f0: Vec<String>,
    /// Velocity cosine coefficient as `n=v`; repeatable.
    #[arg(long)]
    pub f1: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub amplitude: Option<String>,
    /// Any other configuration key as `key=value`; repeatable.
    #[arg(long = "set")]
    pub set: Vec<String>,
}

impl CommonArgs {
    fn entries(&self, mode: &str) -> Result<ConfigEntries, RunError> {
        let mut entries = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    RunError::config("config", format!("cannot read {}: {e}", path.display()))
                })?;
                ConfigEntries::parse(&text)?
            }
            None => ConfigEntries::default(),
        };
        entries.push("mode", mode);
        let scalars = [
            ("grid", &self.grid),
            ("horizon", &self.horizon),
            ("problem", &self.problem),
            ("seed", &self.seed),
            ("amplitude", &self.amplitude),
        ];
        for (key, value) in scalars {
            if let Some(v) = value {
                entries.push(key, v.clone());
            }
        }
        if let Some(out) = &self.out {
            entries.push("out", out.to_string_lossy().into_owned());
        }
        for (key, list) in [("psi", &self.psi), ("phi", &self.phi), ("f0", &self.f0), ("f1", &self.f1)] {
            for item in list {
                entries.push(key, item.clone());
            }
        }
        for item in &self.set {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| RunError::config("set", format!("expected key=value, got `{item}`")))?;
            entries.push(k.trim(), v.trim());
        }
        Ok(entries)
    }
}

impl Command {
    pub fn config(&self) -> Result<ExperimentConfig, RunError> {
        let (mode, args) = match self {
            Command::Simulate(a) => ("simulate", a),
            Command::Decay(a) => ("decay", a),
            Command::Support(a) => ("support", a),
            Command::Oracle(a) => ("oracle", a),
            Command::BoundCheck(a) => ("bound-check", a),
        };
        ExperimentConfig::from_entries(&args.entries(mode)?)
    }
}

/// Entry point shared by the binary and tests; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match cli.command.config().and_then(|cfg| run(&cfg)) {
        Ok(output) => {
            print!("{}", output.stdout);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<ExperimentConfig, RunError> {
        ExperimentConfig::from_entries(&ConfigEntries::parse(text).unwrap())
    }

    fn config_key(r: Result<ExperimentConfig, RunError>) -> String {
        match r {
            Err(RunError::Config { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_reals_with_pi() {
        assert_eq!(parse_real("80pi"), Some(80.0 * PI));
        assert_eq!(parse_real("pi"), Some(PI));
        assert_eq!(parse_real("2.5"), Some(2.5));
        assert_eq!(parse_real("x"), None);
    }

    #[test]
    fn config_file_round() {
        let c = cfg("# constant profile\nmode = decay\ngrid = 64\nhorizon = 80pi\nf1 = 0:50\nproblem = stop\n").unwrap();
        assert_eq!(c.mode, Mode::Decay);
        assert_eq!(c.grid, 64);
        assert_eq!(c.horizon, 80.0 * PI);
        assert_eq!(c.initial_state().f1.coeff(0), 50.0);
    }

    #[test]
    fn validation_names_the_key() {
        assert_eq!(config_key(cfg("grid = 7")), "grid");
        assert_eq!(config_key(cfg("horizon = -1")), "horizon");
        assert_eq!(config_key(cfg("grid = 8\nf1 = 5:1")), "grid");
        assert_eq!(config_key(cfg("amplitude = -2")), "amplitude");
        assert_eq!(config_key(cfg("colour = blue")), "colour");
        assert_eq!(config_key(cfg("f1 = 1:abc")), "f1");
        assert_eq!(config_key(cfg("mode = fly")), "mode");
    }

    #[test]
    fn gen_initial_respects_bounds_and_seed() {
        let a = gen_initial(7, 3.0, 1.5, 16);
        let b = gen_initial(7, 3.0, 1.5, 16);
        assert_eq!(a, b);
        assert_ne!(a, gen_initial(8, 3.0, 1.5, 16));
        for n in 0..=16 {
            let bound = 3.0 * (n.max(1) as f64).powf(-1.5);
            assert!(a.f0.coeff(n).abs() <= bound);
            assert!(a.f1.coeff(n).abs() <= bound);
        }
        let zero = gen_initial(7, 0.0, 1.0, 8);
        assert!(zero.f0.is_zero() && zero.f1.is_zero());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let rec = TrajectoryRecord {
            times: vec![0.0, 0.1, PI],
            rho_stop: vec![1.0 / 3.0, 2e-300, 7.0],
            rho_damp: vec![0.0, 1e-17, 6.999999999999999],
            u: vec![-1.0, 0.4, 1.0],
            phi0: vec![-0.0, 1.25, f64::MIN_POSITIVE],
        };
        let back = record_from_csv(&record_to_csv(&rec)).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn decay_zero_state_is_degenerate() {
        let c = cfg("mode = decay\ngrid = 16\nhorizon = 2pi").unwrap();
        let out = run(&c).unwrap();
        assert!(out.stdout.contains("0,0,"));
        assert!(out.stdout.trim_end().ends_with(",0,true"));
    }

    #[test]
    fn support_mode_prints_table() {
        let c = cfg("mode = support\nhorizon = 2pi\npsi = 1:1").unwrap();
        let out = run(&c).unwrap();
        let row: Vec<f64> = out.stdout.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert!((row[1] - 4.0).abs() < 1e-12);
        assert!((row[2] - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn oracle_blow_up_is_a_numeric_failure() {
        let c = cfg("mode = oracle\ngrid = 64\nhorizon = 100\nf0 = 1:1\noracle_n = 400\noracle_dt = 0.5").unwrap();
        let err = run(&c).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
