//! Flat `key=value` run configurations, the five commands, and report output.
//!
//! ```text
//! # worst-case scan
//! command=scan
//! lemma=NumberB
//! d=2
//! R_grid=4,8,16
//! budget=200
//! seed=7
//! ```

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use report::{emit_report, format_float, write_atomic, Format, Report, Value};

use crate::counting::{count_constrained, scan_jarnik, scan_worst_case, CountQuery, CountReport, CountTag};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::flow::{observables, write_state_dump, Flow, FlowParams, Splitting};
use crate::lattice::{box_points, FreqVector, MAX_DEGREE, MAX_DIM};
use crate::multilinear::{counterexample_family, estimate_ratio, extremizer_search, EstimateSpec, EstimateTag};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_ENGINE: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const DEFAULT_ETA: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Worst,
    Jarnik,
}

/// Test fields for `estimate`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSource {
    /// Every field is `delta_0`.
    Delta,
    /// Indicator of the box of radius `box`.
    Indicator,
    /// Uniform `[0, 1)` amplitudes on the box, from the run seed.
    Random,
    /// The `d = 2, k = 1` family with `N = box`.
    Counterexample,
}

/// Initial data for `evolve`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialData {
    /// `a (1 + 0.3 i n_1) / (1 + |n|^2)`
    Smooth,
    /// `a delta_0`
    Delta,
    /// Uniform amplitudes and phases of modulus below `a`, from the run seed.
    Random,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Count {
        query: CountQuery,
        eta: f64,
    },
    Scan {
        tag: CountTag,
        d: usize,
        r_grid: Vec<f64>,
        budget: usize,
        eta: f64,
        mode: ScanMode,
    },
    Estimate {
        spec: EstimateSpec,
        fields: FieldSource,
        box_radius: i64,
    },
    Extremize {
        spec: EstimateSpec,
        box_radius: i64,
        iterations: usize,
    },
    Evolve {
        params: FlowParams,
        initial: InitialData,
        amplitude: f64,
        t_end: f64,
        dt: f64,
        s: f64,
        dump_path: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Count { .. } => "count",
            Command::Scan { .. } => "scan",
            Command::Estimate { .. } => "estimate",
            Command::Extremize { .. } => "extremize",
            Command::Evolve { .. } => "evolve",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub format: Format,
    pub output_path: Option<PathBuf>,
}

const COMMON_KEYS: &[&str] = &["command", "d", "seed", "format", "output_path"];

fn command_keys(command: &str) -> Option<&'static [&'static str]> {
    Some(match command {
        "count" => &["lemma", "eta", "n_star", "n_sub", "mu_star", "R", "R1", "R2", "R3", "ball_center"],
        "scan" => &["lemma", "eta", "R_grid", "budget", "mode"],
        "estimate" => &["k", "tag", "s", "s1", "r", "sigma", "q", "mu", "fields", "box"],
        "extremize" => &["k", "tag", "s", "s1", "r", "sigma", "q", "mu", "box", "iterations"],
        "evolve" => &[
            "k",
            "lambda",
            "lambda_im",
            "N_box",
            "splitting",
            "T",
            "dt",
            "s",
            "initial",
            "amplitude",
            "stride",
            "dump_path",
        ],
        _ => return None,
    })
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn line(&self, key: &str) -> usize {
        self.map.get(key).map_or(0, |e| e.0)
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| config_err(*line, format!("bad value {v:?} for {key}: {e}"))),
        }
    }

    fn require<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| config_err(0, format!("missing required key {key}")))
    }

    fn or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Range check tied to the key's line.
    fn check(&self, key: &str, ok: bool, message: impl Into<String>) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(config_err(self.line(key), format!("{key}: {}", message.into())))
        }
    }

    /// Re-attaches an engine validation error to the line of `key`.
    fn at<T>(&self, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| config_err(self.line(key), e.to_string()))
    }
}

fn parse_list(entries: &Entries, key: &str) -> Result<Option<Vec<f64>>> {
    let Some((line, v)) = entries.raw(key) else {
        return Ok(None);
    };
    v.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| config_err(*line, format!("bad number {x:?} in {key}")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

fn vector(entries: &Entries, key: &str, d: usize) -> Result<FreqVector> {
    match entries.get::<FreqVector>(key)? {
        None => Ok(FreqVector::zero(d)),
        Some(v) => {
            entries.check(key, v.dim() == d, format!("has {} coordinates, expected d = {d}", v.dim()))?;
            Ok(v)
        }
    }
}

/// Parses and validates a configuration. Errors carry the 1-based line of the
/// offending key (0 for a missing key).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| config_err(line, format!("expected key=value, got {content:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(config_err(line, "empty key"));
        }
        if let Some((first, _)) = map.insert(key.to_string(), (line, value.to_string())) {
            return Err(config_err(line, format!("duplicate key {key} (first on line {first})")));
        }
    }
    let entries = Entries { map };

    let command: String = entries.require("command")?;
    let allowed = command_keys(&command)
        .ok_or_else(|| config_err(entries.line("command"), format!("unknown command {command:?}")))?;
    for (key, (line, _)) in &entries.map {
        if !COMMON_KEYS.contains(&key.as_str()) && !allowed.contains(&key.as_str()) {
            return Err(config_err(*line, format!("unknown key {key} for command {command}")));
        }
    }

    let seed = entries.or("seed", 0u64)?;
    let format = entries.or("format", Format::Csv)?;
    let output_path = entries.get::<PathBuf>("output_path")?;
    let d: usize = entries.require("d")?;
    entries.check("d", (1..=MAX_DIM).contains(&d), format!("must lie in 1..={MAX_DIM}"))?;

    let command = match command.as_str() {
        "count" | "scan" => {
            let tag: CountTag = entries.require("lemma")?;
            entries.check("d", tag.supports_dim(d), format!("{tag} is not defined in dimension {d}"))?;
            let eta = entries.or("eta", DEFAULT_ETA)?;
            entries.check("eta", eta >= 0.0 && eta.is_finite(), "must be finite and nonnegative")?;
            if command == "count" {
                let r = entries.or("R", 0.0)?;
                let query = CountQuery::new(tag, d)?
                    .with_n_star(vector(&entries, "n_star", d)?)
                    .with_n_sub(vector(&entries, "n_sub", d)?)
                    .with_ball_center(vector(&entries, "ball_center", d)?)
                    .with_mu_star(entries.or("mu_star", 0i64)?)
                    .with_radius(r)
                    .with_radii(entries.or("R1", r)?, entries.or("R2", r)?, entries.or("R3", r)?);
                entries.at("lemma", query.validate())?;
                Command::Count { query, eta }
            } else {
                let r_grid = parse_list(&entries, "R_grid")?
                    .ok_or_else(|| config_err(0, "missing required key R_grid"))?;
                entries.check(
                    "R_grid",
                    !r_grid.is_empty() && r_grid.iter().all(|r| *r > 1.0 && r.is_finite()),
                    "radii must be finite and exceed 1",
                )?;
                let budget = entries.or("budget", 100usize)?;
                let mode = match entries.or("mode", "worst".to_string())?.to_ascii_lowercase().as_str() {
                    "worst" => ScanMode::Worst,
                    "jarnik" => ScanMode::Jarnik,
                    other => return Err(config_err(entries.line("mode"), format!("unknown scan mode {other:?}"))),
                };
                if mode == ScanMode::Jarnik {
                    entries.check(
                        "lemma",
                        matches!(tag, CountTag::NumberA | CountTag::NumberB),
                        "the sparse regime exists only for NumberA and NumberB",
                    )?;
                }
                Command::Scan {
                    tag,
                    d,
                    r_grid,
                    budget,
                    eta,
                    mode,
                }
            }
        }
        "estimate" | "extremize" => {
            let k = entries.or("k", 1usize)?;
            entries.check("k", (1..=MAX_DEGREE).contains(&k), format!("must lie in 1..={MAX_DEGREE}"))?;
            let tag: EstimateTag = entries.require("tag")?;
            let s: f64 = entries.require("s")?;
            let mut spec = entries.at("tag", EstimateSpec::new(tag, d, k, s))?;
            let given = [
                entries.get::<f64>("s1")?,
                entries.get::<f64>("r")?,
                entries.get::<f64>("sigma")?,
            ];
            if given.iter().any(Option::is_some) {
                let key = ["s1", "r", "sigma"]
                    .into_iter()
                    .zip(&given)
                    .find(|(_, g)| g.is_some())
                    .map(|(k, _)| k)
                    .expect("one is set");
                spec = entries.at(
                    key,
                    spec.clone().with_table(
                        given[0].unwrap_or(spec.s1),
                        given[1].unwrap_or(spec.r),
                        given[2].unwrap_or(spec.sigma),
                    ),
                )?;
            }
            if let Some(q) = entries.get::<usize>("q")? {
                spec = entries.at("q", spec.with_q(q))?;
            }
            if let Some(mu) = entries.get::<i64>("mu")? {
                spec = spec.with_mu(mu);
            }
            let box_radius = entries.or("box", 1i64)?;
            entries.check("box", (0..=64).contains(&box_radius), "must lie in 0..=64")?;
            if command == "estimate" {
                let fields = match entries.or("fields", "delta".to_string())?.to_ascii_lowercase().as_str() {
                    "delta" => FieldSource::Delta,
                    "indicator" => FieldSource::Indicator,
                    "random" => FieldSource::Random,
                    "counterexample" => FieldSource::Counterexample,
                    other => return Err(config_err(entries.line("fields"), format!("unknown field source {other:?}"))),
                };
                if fields == FieldSource::Counterexample {
                    entries.check("fields", (d, k) == (2, 1), "the counterexample family needs d = 2, k = 1")?;
                    entries.check("box", box_radius >= 1, "the counterexample family needs box >= 1")?;
                }
                Command::Estimate {
                    spec,
                    fields,
                    box_radius,
                }
            } else {
                let iterations = entries.or("iterations", 1000usize)?;
                Command::Extremize {
                    spec,
                    box_radius,
                    iterations,
                }
            }
        }
        "evolve" => {
            let k = entries.or("k", 1usize)?;
            entries.check("k", (1..=MAX_DEGREE).contains(&k), format!("must lie in 1..={MAX_DEGREE}"))?;
            let lambda = Complex64::new(entries.or("lambda", 1.0)?, entries.or("lambda_im", 0.0)?);
            let n_box = entries.or("N_box", 4i64)?;
            let mut params = entries.at("N_box", FlowParams::new(d, k, lambda, n_box))?;
            if let Some(sp) = entries.get::<Splitting>("splitting")? {
                params = entries.at("splitting", params.with_splitting(sp))?;
            }
            params.stride = entries.or("stride", 1usize)?;
            entries.check("stride", params.stride >= 1, "must be positive")?;
            let t_end: f64 = entries.require("T")?;
            entries.check("T", t_end >= 0.0 && t_end.is_finite(), "must be finite and nonnegative")?;
            let dt: f64 = entries.require("dt")?;
            entries.check("dt", dt > 0.0 && dt.is_finite(), "must be positive")?;
            entries.check("dt", t_end / dt <= params.max_steps as f64, "too many steps")?;
            let s = entries.or("s", 1.0f64)?;
            entries.check("s", s.is_finite(), "must be finite")?;
            let amplitude = entries.or("amplitude", 1.0f64)?;
            entries.check("amplitude", amplitude.is_finite(), "must be finite")?;
            let initial = match entries.or("initial", "smooth".to_string())?.to_ascii_lowercase().as_str() {
                "smooth" => InitialData::Smooth,
                "delta" => InitialData::Delta,
                "random" => InitialData::Random,
                other => return Err(config_err(entries.line("initial"), format!("unknown initial data {other:?}"))),
            };
            Command::Evolve {
                params,
                initial,
                amplitude,
                t_end,
                dt,
                s,
                dump_path: entries.get("dump_path")?,
            }
        }
        _ => unreachable!("command checked above"),
    };

    Ok(RunConfig {
        command,
        seed,
        format,
        output_path,
    })
}

const COUNT_COLUMNS: &[&str] = &["tag", "d", "R", "mu_star", "exact_count", "bound_value", "ratio"];

fn count_row(r: &CountReport) -> Vec<Value> {
    vec![
        r.query.tag.name().into(),
        r.query.d.into(),
        r.query.radius.into(),
        r.query.mu_star.into(),
        r.exact_count.into(),
        r.bound_value.into(),
        r.ratio.into(),
    ]
}

fn estimate_fields(source: FieldSource, spec: &EstimateSpec, box_radius: i64, seed: u64) -> Result<Vec<SpectralField>> {
    let arity = 2 * spec.k + 1;
    let one = Complex64::new(1.0, 0.0);
    match source {
        FieldSource::Delta => Ok(vec![SpectralField::delta(FreqVector::zero(spec.d), one); arity]),
        FieldSource::Indicator => {
            let f = SpectralField::indicator(spec.d, box_radius, box_points(spec.d, box_radius))?;
            Ok(vec![f; arity])
        }
        FieldSource::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..arity)
                .map(|_| SpectralField::from_fn(spec.d, box_radius, |_| Complex64::new(rng.random_range(0.0..1.0), 0.0)))
                .collect()
        }
        FieldSource::Counterexample => Ok(counterexample_family(box_radius)?.fields),
    }
}

fn initial_field(initial: InitialData, amplitude: f64, params: &FlowParams, seed: u64) -> Result<SpectralField> {
    let (d, b) = (params.d, params.box_radius);
    match initial {
        InitialData::Smooth => SpectralField::from_fn(d, b, |n| {
            Complex64::new(1.0, 0.3 * n.coord(0) as f64) * (amplitude / (1.0 + n.norm2() as f64))
        }),
        InitialData::Delta => {
            let mut f = SpectralField::new(d, b)?;
            f.insert(FreqVector::zero(d), Complex64::new(amplitude, 0.0))?;
            Ok(f)
        }
        InitialData::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            SpectralField::from_fn(d, b, |_| {
                let r: f64 = rng.random_range(0.0..1.0);
                let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                Complex64::from_polar(amplitude * r, th)
            })
        }
    }
}

/// Runs the engine behind `config.command` and returns its report.
pub fn execute(config: &RunConfig) -> Result<Report> {
    let seed = config.seed;
    match &config.command {
        Command::Count { query, eta } => {
            let mut report = Report::new(COUNT_COLUMNS);
            report.push(count_row(&count_constrained(query, *eta)?))?;
            Ok(report)
        }
        Command::Scan {
            tag,
            d,
            r_grid,
            budget,
            eta,
            mode,
        } => {
            let mut columns = COUNT_COLUMNS.to_vec();
            match mode {
                ScanMode::Worst => {
                    columns.push("slope");
                    let scan = scan_worst_case(*tag, *d, r_grid, *budget, seed, *eta)?;
                    let mut report = Report::new(&columns);
                    for row in &scan.rows {
                        let mut cells = count_row(row);
                        cells.push(scan.slope.into());
                        report.push(cells)?;
                    }
                    Ok(report)
                }
                ScanMode::Jarnik => {
                    let mut report = Report::new(&columns);
                    for row in scan_jarnik(*tag, *d, r_grid, *budget, seed, *eta)? {
                        report.push(count_row(&row))?;
                    }
                    Ok(report)
                }
            }
        }
        Command::Estimate {
            spec,
            fields,
            box_radius,
        } => {
            let f = estimate_fields(*fields, spec, *box_radius, seed)?;
            let mut spec = spec.clone();
            if *fields == FieldSource::Counterexample && spec.q.is_none() {
                spec = spec.with_q(2)?;
            }
            let ratio = estimate_ratio(&spec, &f)?;
            let mut report = Report::new(&[
                "tag", "d", "k", "s", "s1", "s2", "r", "sigma", "q", "mu", "ratio",
            ]);
            report.push(vec![
                spec.tag.name().into(),
                spec.d.into(),
                spec.k.into(),
                spec.s.into(),
                spec.s1.into(),
                spec.s2.into(),
                spec.r.into(),
                spec.sigma.into(),
                spec.q.into(),
                spec.mu.into(),
                ratio.into(),
            ])?;
            Ok(report)
        }
        Command::Extremize {
            spec,
            box_radius,
            iterations,
        } => {
            let res = extremizer_search(spec, *box_radius, *iterations, seed, None)?;
            let mut report = Report::new(&[
                "tag",
                "d",
                "k",
                "s",
                "box",
                "iterations",
                "seed",
                "initial_ratio",
                "best_ratio",
                "accepted",
            ]);
            report.push(vec![
                spec.tag.name().into(),
                spec.d.into(),
                spec.k.into(),
                spec.s.into(),
                (*box_radius).into(),
                (*iterations).into(),
                seed.into(),
                res.initial_ratio.into(),
                res.best_ratio.into(),
                res.accepted.into(),
            ])?;
            Ok(report)
        }
        Command::Evolve {
            params,
            initial,
            amplitude,
            t_end,
            dt,
            s,
            dump_path,
        } => {
            let omega0 = initial_field(*initial, *amplitude, params, seed)?;
            let traj = Flow::new(params.clone())?.evolve(&omega0, *t_end, *dt)?;
            let mut report = Report::new(&["t", "mass", "sobolev"]);
            for (t, w) in &traj {
                let (mass, sob) = observables(w, *s)?;
                report.push(vec![(*t).into(), mass.into(), sob.into()])?;
            }
            if let Some(path) = dump_path {
                let mut bytes = Vec::new();
                write_state_dump(&mut bytes, &traj.last().expect("initial snapshot").1, params.k)?;
                write_atomic(path, &bytes)?;
            }
            Ok(report)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } => EXIT_CONFIG,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_ENGINE,
    }
}

/// Executes `config` and writes the report to `config.output_path` (or
/// standard output). Errors go to standard error; returns the exit code.
pub fn run(config: &RunConfig) -> i32 {
    let result = execute(config).and_then(|report| match &config.output_path {
        Some(path) => emit_report(&report, config.format, path),
        None => {
            use std::io::Write;
            let bytes = report.to_bytes(config.format)?;
            std::io::stdout().lock().write_all(&bytes)?;
            Ok(())
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("reslab: {e}");
            exit_code(&e)
        }
    }
}

/// `<dir>/<command>.<ext>` for a default output directory.
pub fn default_output(dir: &Path, config: &RunConfig) -> PathBuf {
    dir.join(format!("{}.{}", config.command.name(), config.format.extension()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_of(e: Error) -> usize {
        match e {
            Error::Config { line, .. } => line,
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn count_example() {
        let cfg = parse_config("command=count\nlemma=NumberA\nd=2\nmu_star=25\nR=6").unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.format, Format::Csv);
        let Command::Count { query, eta } = &cfg.command else { panic!() };
        assert_eq!(query.tag, CountTag::NumberA);
        assert_eq!(*eta, DEFAULT_ETA);
        let report = execute(&cfg).unwrap();
        assert_eq!(report.columns, COUNT_COLUMNS);
        assert_eq!(report.rows[0][4], Value::Uint(12));
    }

    #[test]
    fn estimate_example_derives_table() {
        let cfg = parse_config("command=estimate\ntag=B1\nd=2\nk=1\ns=0.6").unwrap();
        let Command::Estimate { spec, .. } = &cfg.command else { panic!() };
        assert!((spec.s1 - 0.5).abs() < 1e-15);
        let report = execute(&cfg).unwrap();
        assert_eq!(report.rows[0][10], Value::Float(1.0));
    }

    #[test]
    fn rejections_carry_lines() {
        assert_eq!(line_of(parse_config("command=bogus").unwrap_err()), 1);
        assert_eq!(line_of(parse_config("command=count\nd=2\nlemma=NumberA\nR=3\nfoo=1").unwrap_err()), 5);
        assert_eq!(line_of(parse_config("command=count\nd=x").unwrap_err()), 2);
        assert_eq!(line_of(parse_config("# c\ncommand=count\n\njunk").unwrap_err()), 4);
        assert_eq!(line_of(parse_config("d=2\nd=3").unwrap_err()), 2);
        assert_eq!(line_of(parse_config("lemma=NumberA\nd=2").unwrap_err()), 0);
        let bad_table = "command=estimate\ntag=B1\nd=2\ns=0.6\ns1=0.55";
        assert_eq!(line_of(parse_config(bad_table).unwrap_err()), 5);
        assert!(parse_config("command=estimate\ntag=B1\nd=2\ns=0.6\ns1=0.5\nr=10\nsigma=0").is_ok());
        // a count key is unknown to estimate
        assert_eq!(line_of(parse_config("command=estimate\ntag=B1\nd=2\ns=0.6\nR=3").unwrap_err()), 5);
        assert_eq!(line_of(parse_config("command=count\nlemma=NumberA\nd=2\nR=1").unwrap_err()), 2);
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = parse_config("  command = count # trailing\n# full line\nlemma=numberb\nd=2\nmu_star=4\nR=6\n").unwrap();
        let report = execute(&cfg).unwrap();
        assert_eq!(report.rows[0][4], Value::Uint(6));
    }

    #[test]
    fn evolve_zero_lambda_keeps_sobolev() {
        let cfg = parse_config("command=evolve\nd=1\nk=1\nlambda=0\nN_box=2\nT=0.05\ndt=0.01").unwrap();
        let report = execute(&cfg).unwrap();
        assert_eq!(report.rows.len(), 6);
        assert_eq!(report.rows.first().unwrap()[2], report.rows.last().unwrap()[2]);
    }

    #[test]
    fn exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = parse_config("command=count\nlemma=NumberA\nd=2\nmu_star=25\nR=6").unwrap();
        cfg.output_path = Some(dir.path().join("c.csv"));
        assert_eq!(run(&cfg), EXIT_OK);
        let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
        assert!(text.starts_with("tag,d,R,mu_star,exact_count,bound_value,ratio\nNumberA,2,"));

        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        cfg.output_path = Some(blocker.join("c.csv"));
        assert_eq!(run(&cfg), EXIT_IO);

        let diverge = parse_config("command=evolve\nd=1\nk=1\nlambda=1\nN_box=2\nT=1\ndt=1\namplitude=1e200").unwrap();
        assert_eq!(run(&diverge), EXIT_ENGINE);
        assert_eq!(exit_code(&parse_config("command=nope").unwrap_err()), EXIT_CONFIG);
    }

    #[test]
    fn deterministic_bytes() {
        let text = "command=scan\nlemma=NumberA\nd=2\nR_grid=3,5\nbudget=20\nseed=11\nformat=json";
        let cfg = parse_config(text).unwrap();
        let a = execute(&cfg).unwrap().to_bytes(Format::Json).unwrap();
        let b = execute(&cfg).unwrap().to_bytes(Format::Json).unwrap();
        assert_eq!(a, b);
    }
}
