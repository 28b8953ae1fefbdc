//! The `szego-lab` command line.

mod svg;
mod verify;

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::apnum::PrecisionPolicy;
use crate::curves::{sample_curve_bits, CurveSpec, DEFAULT_BITS, DEFAULT_SAMPLES};
use crate::error::{Error, Result};
use crate::roots::{section_zeros, ZeroSet, CSV_HEADER};
use crate::series::{scale_factor, SeriesSpec};

pub use svg::{PointLayer, SvgScene, Viewport};
pub use verify::{verify_json, VerifySuite, SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "szego-lab",
    version,
    about = "Zeros of sections of power series and their limit curves"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Zeros of sections over a range of degrees.
    Zeros(ZerosArgs),
    /// Sample a limit curve.
    Curve(CurveArgs),
    /// Run a verification suite and write a JSON report.
    Verify {
        #[command(subcommand)]
        suite: VerifySuite,
    },
    /// Draw zeros and curves from CSV files.
    Plot(PlotArgs),
}

/// Degrees: "17", "1..70" (inclusive), "40..200:20" or "40,60,80".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NRange(pub Vec<usize>);

impl FromStr for NRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad degree list {s:?}"));
        let s = s.trim();
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        let v: Vec<usize> = if let Some((lo, rest)) = s.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((h, st)) => (parse(h)?, parse(st)?),
                None => (parse(rest)?, 1),
            };
            if step == 0 {
                return Err(bad());
            }
            (parse(lo)?..=hi).step_by(step).collect()
        } else {
            s.split(',').map(parse).collect::<Result<_>>()?
        };
        if v.is_empty() {
            return Err(Error::Config(format!("degree list {s:?} is empty")));
        }
        Ok(NRange(v))
    }
}

impl Serialize for NRange {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for NRange {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            One(usize),
            List(Vec<usize>),
            Text(String),
        }
        match Form::deserialize(d)? {
            Form::One(n) => Ok(NRange(vec![n])),
            Form::List(v) if !v.is_empty() => Ok(NRange(v)),
            Form::List(_) => Err(serde::de::Error::custom("degree list is empty")),
            Form::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A preset name or a JSON family spec.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyArg(pub SeriesSpec);

impl FromStr for FamilyArg {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let spec = SeriesSpec::preset(s).map_err(|e| match e {
            Error::Json(j) => Error::Config(format!("bad family JSON: {j}")),
            e => e,
        })?;
        spec.validate()?;
        Ok(FamilyArg(spec))
    }
}

impl Serialize for FamilyArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FamilyArg {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            v => {
                let spec: SeriesSpec =
                    serde_json::from_value(v).map_err(serde::de::Error::custom)?;
                Ok(FamilyArg(spec))
            }
        }
    }
}

/// A comma list of floats.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad number list {s:?}")))
            })
            .collect::<Result<_>>()
            .map(FloatList)
    }
}

impl Serialize for FloatList {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FloatList {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            One(f64),
            List(Vec<f64>),
            Text(String),
        }
        match Form::deserialize(d)? {
            Form::One(v) => Ok(FloatList(vec![v])),
            Form::List(v) => Ok(FloatList(v)),
            Form::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Flags win over the JSON config file; both use the same key names.
pub(crate) fn resolve<T>(flags: &T, config: Option<&Path>) -> Result<T>
where
    T: Serialize + DeserializeOwned,
{
    let mut merged = match config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Config(format!("cannot read config {}: {e}", p.display())))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(m)) => m,
                Ok(_) => return Err(Error::Config("config must be a JSON object".into())),
                Err(e) => return Err(Error::Config(format!("bad config JSON: {e}"))),
            }
        }
        None => serde_json::Map::new(),
    };
    if let Value::Object(f) = serde_json::to_value(flags)? {
        for (k, v) in f {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Error::Config(format!("config: {e}")))
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, Default)]
pub struct ZerosArgs {
    /// Preset name or JSON spec.
    #[arg(long)]
    pub family: Option<FamilyArg>,
    #[arg(long)]
    pub n: Option<NRange>,
    /// Plot normalized rather than raw coordinates in the SVG.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub normalize: bool,
    /// Starting precision; defaults to max(128, 4n).
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long)]
    pub max_bits: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Subset of csv,json,svg.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn formats(spec: Option<&str>) -> Result<Vec<&str>> {
    let list: Vec<&str> = spec.unwrap_or("csv").split(',').map(str::trim).collect();
    for f in &list {
        if !["csv", "json", "svg"].contains(f) {
            return Err(Error::Config(format!("unknown format {f:?}")));
        }
    }
    Ok(list)
}

fn policy(n: usize, bits: Option<u32>, max_bits: Option<u32>) -> Result<PrecisionPolicy> {
    let d = PrecisionPolicy::for_degree(n);
    let start = bits.unwrap_or(d.start_bits);
    let max = max_bits.unwrap_or(d.max_bits.max(16 * start));
    PrecisionPolicy::new(start, max, d.agreement_tol).map_err(|e| Error::Config(e.to_string()))
}

pub fn cmd_zeros(args: &ZerosArgs) -> Result<i32> {
    let a = resolve(args, args.config.as_deref())?;
    let spec = a
        .family
        .ok_or_else(|| Error::Config("--family is required".into()))?
        .0;
    let ns =
        a.n.ok_or_else(|| Error::Config("--n is required".into()))?
            .0;
    let out = a
        .out
        .ok_or_else(|| Error::Config("--out is required".into()))?;
    let fmts = formats(a.format.as_deref())?;
    for &n in &ns {
        spec.check_degree(n)
            .map_err(|e| Error::Config(e.to_string()))?;
        policy(n, a.bits, a.max_bits)?;
    }
    let sets: Vec<(ZeroSet, ZeroSet)> = ns
        .par_iter()
        .map(|&n| {
            let zs = section_zeros(&spec, n, &policy(n, a.bits, a.max_bits)?)?;
            let raw = zs.scaled(&scale_factor(&spec, n, zs.bits_used));
            Ok((zs, raw))
        })
        .collect::<Result<_>>()?;
    std::fs::create_dir_all(&out)?;
    if fmts.contains(&"csv") {
        let mut norm = format!("{CSV_HEADER}\n");
        let mut raw = norm.clone();
        for (zs, r) in &sets {
            zs.to_csv_rows(&mut norm);
            r.to_csv_rows(&mut raw);
        }
        write_atomic(&out.join("zeros.csv"), norm.as_bytes())?;
        write_atomic(&out.join("zeros_raw.csv"), raw.as_bytes())?;
    }
    if fmts.contains(&"json") {
        let rows: Vec<Value> = sets
            .iter()
            .map(|(zs, _)| {
                let max_res = zs.residuals.iter().copied().fold(0.0, f64::max);
                serde_json::json!({
                    "n": zs.n,
                    "zeros": zs.len() + zs.origin_multiplicity,
                    "origin_multiplicity": zs.origin_multiplicity,
                    "bits_used": zs.bits_used,
                    "max_residual": crate::analysis::num(max_res),
                })
            })
            .collect();
        let doc = serde_json::json!({ "family": spec, "sections": rows });
        write_atomic(
            &out.join("zeros.json"),
            (serde_json::to_string_pretty(&doc)? + "\n").as_bytes(),
        )?;
    }
    if fmts.contains(&"svg") {
        let scene = SvgScene {
            points: sets
                .iter()
                .map(|(zs, raw)| PointLayer {
                    n: zs.n,
                    points: if a.normalize {
                        zs.all_f64()
                    } else {
                        raw.all_f64()
                    },
                })
                .collect(),
            curves: Vec::new(),
        };
        write_atomic(&out.join("zeros.svg"), scene.render().as_bytes())?;
    }
    let log = format!(
        "unix_time={}\nfamily={}\nn={:?}\n",
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        spec,
        ns
    );
    write_atomic(&out.join("run.log"), log.as_bytes())?;
    Ok(EXIT_OK)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, Default)]
pub struct CurveArgs {
    /// One of exp_szego, dab, ml_curve, intermediate_exp, trig_bessel, unit_circle.
    #[arg(long = "type")]
    #[serde(rename = "type")]
    pub kind: Option<String>,
    /// JSON parameters, e.g. '{"a": 2, "b": "3/2"}'.
    #[arg(long)]
    pub params: Option<Value>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub bits: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

pub fn curve_spec(kind: &str, params: Option<&Value>) -> Result<CurveSpec> {
    // from the command line the JSON arrives as a string
    let text = params.map(|p| match p {
        Value::String(s) => s.clone(),
        v => v.to_string(),
    });
    CurveSpec::from_name(kind, text.as_deref()).map_err(|e| Error::Config(e.to_string()))
}

pub fn cmd_curve(args: &CurveArgs) -> Result<i32> {
    let a = resolve(args, args.config.as_deref())?;
    let kind = a
        .kind
        .ok_or_else(|| Error::Config("--type is required".into()))?;
    let out = a
        .out
        .ok_or_else(|| Error::Config("--out is required".into()))?;
    let spec = curve_spec(&kind, a.params.as_ref())?;
    let m = a.samples.unwrap_or(DEFAULT_SAMPLES);
    if m < 16 {
        return Err(Error::Config("--samples must be at least 16".into()));
    }
    let pl = sample_curve_bits(&spec, m, a.bits.unwrap_or(DEFAULT_BITS))?;
    write_atomic(&out, pl.to_csv().as_bytes())?;
    Ok(EXIT_OK)
}

#[derive(Args, Debug, Clone, Serialize, Deserialize, Default)]
pub struct PlotArgs {
    /// Comma-separated zero CSV files.
    #[arg(long)]
    pub zeros: Option<String>,
    /// Comma-separated curve CSV files.
    #[arg(long)]
    pub curve: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

fn files(list: Option<&str>) -> Vec<PathBuf> {
    list.map(|s| {
        s.split(',')
            .filter(|t| !t.trim().is_empty())
            .map(|t| PathBuf::from(t.trim()))
            .collect()
    })
    .unwrap_or_default()
}

fn read_csv(path: &Path, header: &str) -> Result<Vec<Vec<String>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(header) {
        return Err(Error::Parse(format!(
            "{}: expected header {header:?}",
            path.display()
        )));
    }
    Ok(lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|s| s.trim().to_string()).collect())
        .collect())
}

fn field<T: FromStr>(row: &[String], i: usize, path: &Path) -> Result<T> {
    row.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("{}: bad row {:?}", path.display(), row.join(","))))
}

/// Zero layers grouped by n.
pub fn read_zero_layers(path: &Path) -> Result<Vec<PointLayer>> {
    let mut by_n: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for row in read_csv(path, CSV_HEADER)? {
        let n: usize = field(&row, 1, path)?;
        by_n.entry(n)
            .or_default()
            .push((field(&row, 3, path)?, field(&row, 4, path)?));
    }
    Ok(by_n
        .into_iter()
        .map(|(n, points)| PointLayer { n, points })
        .collect())
}

/// Curve pieces in file order.
pub fn read_curve(path: &Path) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut pieces: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for row in read_csv(path, crate::curves::CSV_HEADER)? {
        let k: usize = field(&row, 4, path)?;
        pieces
            .entry(k)
            .or_default()
            .push((field(&row, 1, path)?, field(&row, 2, path)?));
    }
    Ok(pieces.into_values().collect())
}

pub fn cmd_plot(args: &PlotArgs) -> Result<i32> {
    let a = resolve(args, args.config.as_deref())?;
    let out = a
        .out
        .ok_or_else(|| Error::Config("--out is required".into()))?;
    let zf = files(a.zeros.as_deref());
    let cf = files(a.curve.as_deref());
    if zf.is_empty() && cf.is_empty() {
        return Err(Error::Config("nothing to plot".into()));
    }
    let mut scene = SvgScene::default();
    for f in &zf {
        scene.points.extend(read_zero_layers(f)?);
    }
    for f in &cf {
        scene.curves.push(read_curve(f)?);
    }
    write_atomic(&out, scene.render().as_bytes())?;
    Ok(EXIT_OK)
}

/// Usage and input problems exit 2; numerical failures exit 1.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Parse(_)
        | Error::Json(_)
        | Error::InvalidParameter(_)
        | Error::InvalidPolicy(_)
        | Error::Family(_)
        | Error::Parity(_)
        | Error::Precondition(_)
        | Error::EmptySelection { .. } => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("SZEGO_LAB_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            Error::Config(format!(
                "SZEGO_LAB_THREADS must be a positive integer, got {v:?}"
            ))
        })?;
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

pub fn run(cli: Cli) -> i32 {
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Zeros(a) => cmd_zeros(a),
        Command::Curve(a) => cmd_curve(a),
        Command::Verify { suite } => verify::run(suite),
        Command::Plot(a) => cmd_plot(a),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("szego-lab: {e}");
            exit_code(&e)
        }
    }
}

/// Parses the process arguments and runs; clap usage errors exit 2.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_lists() {
        assert_eq!("1..5".parse::<NRange>().unwrap().0, vec![1, 2, 3, 4, 5]);
        assert_eq!(
            "40..100:20".parse::<NRange>().unwrap().0,
            vec![40, 60, 80, 100]
        );
        assert_eq!("3,9".parse::<NRange>().unwrap().0, vec![3, 9]);
        assert!("5..1".parse::<NRange>().is_err());
        assert!("x".parse::<NRange>().is_err());
        let v: NRange = serde_json::from_str("\"2..3\"").unwrap();
        assert_eq!(v.0, vec![2, 3]);
        let v: NRange = serde_json::from_str("[4, 6]").unwrap();
        assert_eq!(v.0, vec![4, 6]);
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        std::fs::write(
            &cfg,
            r#"{"family": "exp", "n": "1..3", "bits": 256, "out": "x"}"#,
        )
        .unwrap();
        let flags = ZerosArgs {
            n: Some(NRange(vec![9])),
            ..Default::default()
        };
        let a = resolve(&flags, Some(&cfg)).unwrap();
        assert_eq!(a.n.unwrap().0, vec![9]);
        assert_eq!(a.bits, Some(256));
        assert_eq!(a.family.unwrap().0, SeriesSpec::Exp);
        std::fs::write(&cfg, "[1]").unwrap();
        assert!(matches!(resolve(&flags, Some(&cfg)), Err(Error::Config(_))));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
        assert_eq!(
            exit_code(&Error::RootNoConvergence {
                max_bits: 1,
                detail: String::new()
            }),
            EXIT_FAIL
        );
        assert_eq!(main_with_args(["szego-lab", "nonsense"]), EXIT_USAGE);
    }
}
