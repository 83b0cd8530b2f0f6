//! Command-line front end: CSV or JSON tables of spectra, singular-value
//! sweeps, transformed densities and interlacing curves.
//!
//! Exit codes: 0 on success, 2 on a parse or input error, 3 on a numerical
//! failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::measures::{stieltjes_invert, CauchyTransform, JacobiData, TransformParams, DEFAULT_EPS};
use crate::meixner::MeixnerParams;
use crate::numcore::random::{random_hermitian, random_matrix, random_unit_vector, seeded};
use crate::numcore::{eigenvalues_dense, CMatrix, CVector, C64};
use crate::rank2::{interlacing_condition, real_spectrum, verify_interlacing, Rank2Perturbation};
use crate::singvals::{condition_number, smallest_sv_asymptotics, sv_convergence_table, SVPerturbation, SmallestSv};
use crate::weyl::weyl_partial_fractions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug, Clone, Serialize)]
#[command(name = "ranktwo", version, about = "Rank-two perturbation experiments")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// JSON file with matrix/vector fields, or CSV file with a real matrix.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Parameter grid `name=start:stop:count`; repeatable.
    #[arg(long, global = true)]
    pub grid: Vec<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Generate a random instance of this dimension from `--seed`.
    #[arg(long, global = true)]
    pub random: Option<usize>,
    /// Grid points this close to a pole get a blank value.
    #[arg(long, global = true, default_value_t = 1e-4)]
    pub tol_pole: f64,
    /// Largest imaginary part of an eigenvalue counted as real.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol_real: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
pub enum Command {
    /// Eigenvalues of `A - s u w* - t w u*` (or the diagonal shape) per `(s, t)`.
    Spectrum(SpectrumArgs),
    /// Singular values of `B - tau v u*` over a `tau` grid.
    Svsweep(SvArgs),
    /// Density and atoms of a transformed measure.
    Density(DensityArgs),
    /// Both sides of the secular equation of the antidiagonal shape.
    Interlace(InterlaceArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShapeArg {
    Antidiagonal,
    Diagonal,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    /// Matrix rows separated by `;`, entries by `,`; entries like `1-2i`.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub u: Option<String>,
    /// Defaults to `Au`.
    #[arg(long)]
    pub w: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = ShapeArg::Antidiagonal)]
    pub shape: ShapeArg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SvArgs {
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long)]
    pub v: Option<String>,
    /// Explicit comma-separated `tau` values.
    #[arg(long)]
    pub taus: Option<String>,
    /// `start:stop:count` of `log10 tau`; used when no `tau` grid is given.
    #[arg(long, default_value = "1:5:9")]
    pub log_taus: String,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransformArg {
    None,
    U,
    T,
    W,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DensityArgs {
    /// `wigner`, `bernoulli`, `delta:A`, `meixner:G,A,B,C` or `jacobi:FILE`.
    #[arg(long, default_value = "wigner")]
    pub base: String,
    #[arg(long, value_enum, default_value_t = TransformArg::None)]
    pub transform: TransformArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
    /// Comma-separated `tau` values of the t-transform, one series each.
    #[arg(long, default_value = "1")]
    pub tau: String,
    /// Explicit U-transform parameter `p`; with `--q` overrides `--s`, `--t`.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Explicit U-transform parameter `q`, at least 0.
    #[arg(long)]
    pub q: Option<f64>,
    /// Comma-separated Stieltjes `eps` schedule, decreasing.
    #[arg(long)]
    pub eps: Option<String>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct InterlaceArgs {
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub u: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub t: f64,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Numeric(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "input error: {m}"),
            CliError::Numeric(e) => write!(f, "numerical failure: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numeric(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Blank,
}

impl Cell {
    fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Blank, Cell::Num)
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => format!("{}", x + 0.0),
            Cell::Text(s) => s.clone(),
            _ => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Text(s) => json!(s),
            _ => Value::Null,
        }
    }
}

/// Rows in grid order plus summary lines.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, String)>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn render(&self, config: &RunConfig) -> String {
        let echo = serde_json::to_string(config).expect("config serializes");
        match config.common.format {
            Format::Csv => {
                let mut out = format!("# config {echo}\n{}\n", self.columns.join(","));
                for row in &self.rows {
                    out.push_str(&row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                    out.push('\n');
                }
                for (k, v) in &self.summary {
                    let _ = writeln!(out, "# {k} {v}");
                }
                out
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
                    .collect();
                let summary: serde_json::Map<String, Value> =
                    self.summary.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
                let doc = json!({
                    "config": serde_json::from_str::<Value>(&echo).expect("valid json"),
                    "rows": rows,
                    "summary": summary,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("serializes");
                s.push('\n');
                s
            }
        }
    }
}

/// `name=start:stop:count`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub name: String,
    pub values: Vec<f64>,
}

fn linspace(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(parse_err(format!("range `{spec}` is not start:stop:count")));
    }
    let start = parse_f64(parts[0])?;
    let stop = parse_f64(parts[1])?;
    let count: usize = parts[2].trim().parse().map_err(|_| parse_err(format!("bad count `{}`", parts[2])))?;
    if !start.is_finite() || !stop.is_finite() || count == 0 {
        return Err(parse_err(format!("range `{spec}` needs finite bounds and count >= 1")));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let h = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|k| if k + 1 == count { stop } else { start + h * k as f64 }).collect())
}

impl FromStr for Grid {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Grid> {
        let (name, range) = s.split_once('=').ok_or_else(|| parse_err(format!("grid `{s}` lacks `=`")))?;
        Ok(Grid { name: name.trim().to_string(), values: linspace(range)? })
    }
}

fn grids(common: &Common, allowed: &[&str]) -> CliResult<Vec<Grid>> {
    let out: Vec<Grid> = common.grid.iter().map(|g| g.parse()).collect::<CliResult<_>>()?;
    if let Some(g) = out.iter().find(|g| !allowed.contains(&g.name.as_str())) {
        return Err(parse_err(format!("unknown grid `{}`; expected one of {allowed:?}", g.name)));
    }
    Ok(out)
}

fn grid_or(gs: &[Grid], name: &str, default: f64) -> Vec<f64> {
    gs.iter().find(|g| g.name == name).map_or_else(|| vec![default], |g| g.values.clone())
}

fn parse_f64(s: &str) -> CliResult<f64> {
    s.trim().parse().map_err(|_| parse_err(format!("bad number `{s}`")))
}

fn parse_c64(s: &str) -> CliResult<C64> {
    let s = s.trim();
    C64::from_str(s).map_err(|_| parse_err(format!("bad complex number `{s}`")))
}

fn f64_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',').map(parse_f64).collect()
}

/// `1,0;0,2` -> rows.
pub fn parse_matrix(s: &str) -> CliResult<CMatrix> {
    let rows: Vec<Vec<C64>> =
        s.split(';').map(|r| r.split(',').map(parse_c64).collect::<CliResult<Vec<_>>>()).collect::<CliResult<_>>()?;
    matrix_from_rows(rows)
}

fn matrix_from_rows(rows: Vec<Vec<C64>>) -> CliResult<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(parse_err("matrix rows have unequal lengths"));
    }
    Ok(CMatrix::from_rows(&rows))
}

pub fn parse_vector(s: &str) -> CliResult<CVector> {
    Ok(CVector::new(s.split(',').map(parse_c64).collect::<CliResult<_>>()?))
}

/// Fields of an input file. JSON values are real arrays or
/// `{"re": [...], "im": [...]}`; a CSV file holds one real matrix.
#[derive(Debug, Default)]
struct InputFile {
    json: Option<Value>,
    csv_matrix: Option<CMatrix>,
}

fn read_input(path: &Option<PathBuf>) -> CliResult<InputFile> {
    let Some(path) = path else { return Ok(InputFile::default()) };
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        let rows: Vec<Vec<C64>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split(',').map(|x| parse_f64(x).map(|v| C64::new(v, 0.0))).collect::<CliResult<Vec<_>>>())
            .collect::<CliResult<_>>()?;
        return Ok(InputFile { json: None, csv_matrix: Some(matrix_from_rows(rows)?) });
    }
    let v: Value = serde_json::from_str(&text).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    Ok(InputFile { json: Some(v), csv_matrix: None })
}

fn json_reals(v: &Value) -> CliResult<Vec<Vec<f64>>> {
    let to_f = |x: &Value| x.as_f64().ok_or_else(|| parse_err(format!("`{x}` is not a number")));
    match v {
        Value::Array(items) if items.iter().all(Value::is_array) => items
            .iter()
            .map(|r| r.as_array().expect("array").iter().map(to_f).collect::<CliResult<Vec<_>>>())
            .collect(),
        Value::Array(items) => Ok(vec![items.iter().map(to_f).collect::<CliResult<_>>()?]),
        _ => Err(parse_err(format!("`{v}` is not an array"))),
    }
}

/// Rows of complex entries from a real array or a re/im pair.
fn json_complex(v: &Value) -> CliResult<Vec<Vec<C64>>> {
    if let Some(obj) = v.as_object() {
        let re = json_reals(obj.get("re").ok_or_else(|| parse_err("missing `re`"))?)?;
        let im = match obj.get("im") {
            Some(i) => json_reals(i)?,
            None => re.iter().map(|r| vec![0.0; r.len()]).collect(),
        };
        if re.len() != im.len() || re.iter().zip(&im).any(|(a, b)| a.len() != b.len()) {
            return Err(parse_err("`re` and `im` shapes differ"));
        }
        return Ok(re.iter().zip(&im).map(|(a, b)| a.iter().zip(b).map(|(x, y)| C64::new(*x, *y)).collect()).collect());
    }
    Ok(json_reals(v)?.into_iter().map(|r| r.into_iter().map(|x| C64::new(x, 0.0)).collect()).collect())
}

impl InputFile {
    fn matrix(&self, key: &str, inline: &Option<String>) -> CliResult<Option<CMatrix>> {
        if let Some(s) = inline {
            return parse_matrix(s).map(Some);
        }
        if let Some(m) = &self.csv_matrix {
            return Ok(Some(m.clone()));
        }
        match self.json.as_ref().and_then(|j| j.get(key)) {
            Some(v) => matrix_from_rows(json_complex(v)?).map(Some),
            None => Ok(None),
        }
    }

    fn vector(&self, key: &str, inline: &Option<String>) -> CliResult<Option<CVector>> {
        if let Some(s) = inline {
            return parse_vector(s).map(Some);
        }
        match self.json.as_ref().and_then(|j| j.get(key)) {
            Some(v) => {
                let rows = json_complex(v)?;
                if rows.len() != 1 {
                    return Err(parse_err(format!("`{key}` is not a vector")));
                }
                Ok(Some(CVector::new(rows.into_iter().next().expect("one row"))))
            }
            None => Ok(None),
        }
    }
}

fn require<T>(x: Option<T>, name: &str) -> CliResult<T> {
    x.ok_or_else(|| parse_err(format!("missing `{name}`; pass it inline, in --input, or use --random")))
}

fn check_square(a: &CMatrix, vs: &[&CVector]) -> CliResult<()> {
    if !a.is_square() {
        return Err(parse_err(format!("matrix is {}x{}", a.rows(), a.cols())));
    }
    if let Some(v) = vs.iter().find(|v| v.len() != a.rows()) {
        return Err(parse_err(format!("vector of length {} for a {}x{} matrix", v.len(), a.rows(), a.cols())));
    }
    Ok(())
}

fn sort_spectrum(mut e: Vec<C64>) -> Vec<C64> {
    e.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    e
}

fn hermitian_pair(common: &Common, a: &Option<String>, u: &Option<String>) -> CliResult<(CMatrix, CVector)> {
    if let Some(n) = common.random {
        let mut rng = seeded(common.seed);
        let a = random_hermitian(&mut rng, n);
        return Ok((a, random_unit_vector(&mut rng, n)));
    }
    let input = read_input(&common.input)?;
    let a = require(input.matrix("a", a)?, "a")?;
    let u = require(input.vector("u", u)?, "u")?;
    check_square(&a, &[&u])?;
    Ok((a, u))
}

pub fn cmd_spectrum(common: &Common, args: &SpectrumArgs) -> CliResult<Table> {
    let (a, u) = hermitian_pair(common, &args.a, &args.u)?;
    let input = read_input(&common.input)?;
    let w = match input.vector("w", &args.w)? {
        Some(w) => w,
        None => a.mul_vec(&u),
    };
    check_square(&a, &[&w])?;
    let gs = grids(common, &["s", "t"])?;
    let pts: Vec<(f64, f64)> =
        grid_or(&gs, "s", args.s).into_iter().flat_map(|s| grid_or(&gs, "t", args.t).into_iter().map(move |t| (s, t))).collect();
    let base = sort_spectrum(eigenvalues_dense(&a)?);
    let n = a.rows();
    let w_is_au = args.w.is_none() && input.vector("w", &None)?.is_none();
    let rows = pts
        .par_iter()
        .map(|&(s, t)| {
            let (sc, tc) = (C64::new(s, 0.0), C64::new(t, 0.0));
            let p = match args.shape {
                ShapeArg::Antidiagonal => Rank2Perturbation::antidiagonal(&a, &u, &w, sc, tc)?,
                ShapeArg::Diagonal => Rank2Perturbation::diagonal(&a, &u, &w, sc, tc)?,
            };
            let eig = sort_spectrum(p.eigenvalues()?);
            let mut row = vec![Cell::Num(s), Cell::Num(t)];
            for z in &eig {
                row.push(Cell::Num(z.re));
                row.push(Cell::Num(z.im));
            }
            let cond = if w_is_au && args.shape == ShapeArg::Antidiagonal {
                interlacing_condition(&a, &u, s, t).ok()
            } else {
                None
            };
            row.push(Cell::opt(cond.as_ref().map(|c| c.x0)));
            row.push(cond.as_ref().map_or(Cell::Blank, |c| Cell::Text(c.applies.to_string())));
            let real = |e: &[C64]| {
                if e.iter().all(|z| z.im.abs() < common.tol_real * (1.0 + z.norm())) {
                    real_spectrum(&e.iter().map(|z| C64::new(z.re, 0.0)).collect::<Vec<_>>()).ok()
                } else {
                    None
                }
            };
            let verdict = match (real(&base), real(&eig)) {
                (Some(x), Some(y)) => verify_interlacing(&x, &y).ok().map(|b| b.to_string()),
                (Some(_), None) => Some("false".to_string()),
                _ => None,
            };
            row.push(verdict.map_or(Cell::Blank, Cell::Text));
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut columns = vec!["s".to_string(), "t".to_string()];
    for k in 1..=n {
        columns.push(format!("eig{k}_re"));
        columns.push(format!("eig{k}_im"));
    }
    columns.extend(["x0", "condition_applies", "interlaces"].map(String::from));
    Ok(Table { columns, rows, summary: vec![] })
}

pub fn cmd_svsweep(common: &Common, args: &SvArgs) -> CliResult<Table> {
    let (b, u, v) = if let Some(n) = common.random {
        let mut rng = seeded(common.seed);
        let b = random_matrix(&mut rng, n);
        let u = random_unit_vector(&mut rng, n);
        (b, u, random_unit_vector(&mut rng, n))
    } else {
        let input = read_input(&common.input)?;
        let b = require(input.matrix("b", &args.b)?, "b")?;
        let u = require(input.vector("u", &args.u)?, "u")?;
        let v = require(input.vector("v", &args.v)?, "v")?;
        check_square(&b, &[&u, &v])?;
        (b, u, v)
    };
    let gs = grids(common, &["tau"])?;
    let taus = if let Some(g) = gs.first() {
        g.values.clone()
    } else if let Some(t) = &args.taus {
        f64_list(t)?
    } else {
        linspace(&args.log_taus)?.into_iter().map(|e| 10f64.powf(e)).collect()
    };
    let p = SVPerturbation::new(&b, &u, &v, 0.0)?;
    let table = sv_convergence_table(&p, &taus)?;
    let branch = smallest_sv_asymptotics(&b, &u, &v)?;
    let n = b.rows();
    let vanishing = matches!(branch, SmallestSv::VanishesLinearly { .. });
    let mut columns = vec!["tau".to_string()];
    columns.extend((1..=n).map(|j| format!("sigma{j}")));
    columns.extend((2..=n).map(|j| format!("dist{j}")));
    columns.push("kappa".into());
    if vanishing {
        columns.push("sigma_n_tau".into());
    }
    let rows = table
        .rows
        .par_iter()
        .map(|r| {
            let mut row = vec![Cell::Num(r.tau)];
            row.extend(r.sigmas.iter().map(|&x| Cell::Num(x)));
            row.extend(r.distances.iter().map(|&x| Cell::Num(x)));
            row.push(Cell::Num(condition_number(&p.matrix_at(r.tau))?));
            if vanishing {
                row.push(Cell::Num(r.sigmas[n - 1] * r.tau));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let fmt_list = |xs: &[f64]| xs.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
    let mut summary = vec![("limits".to_string(), fmt_list(&table.limits)), ("slopes".to_string(), fmt_list(&table.slopes))];
    match branch {
        SmallestSv::VanishesLinearly { rate, inverse_image_rate } => {
            summary.push(("branch".into(), "vanishing".into()));
            summary.push(("rate_inverse_u".into(), format!("{rate}")));
            summary.push(("rate_inverse_image".into(), format!("{inverse_image_rate}")));
        }
        SmallestSv::ConvergesTo { limit, .. } => {
            summary.push(("branch".into(), "convergent".into()));
            summary.push(("sigma_n_limit".into(), format!("{limit}")));
        }
    }
    Ok(Table { columns, rows, summary })
}

fn base_measure(spec: &str) -> CliResult<(String, CauchyTransform)> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let g = match name {
        "wigner" => CauchyTransform::Wigner,
        "bernoulli" => CauchyTransform::bernoulli(),
        "delta" => CauchyTransform::delta(parse_f64(arg)?),
        "meixner" => {
            let p = f64_list(arg)?;
            if p.len() != 4 {
                return Err(parse_err("meixner needs gamma,a,b,c"));
            }
            MeixnerParams::new(p[0], p[1], p[2], p[3]).map_err(|e| parse_err(e.to_string()))?.cauchy()
        }
        "jacobi" => CauchyTransform::Jacobi(read_jacobi(Path::new(arg))?),
        _ => return Err(parse_err(format!("unknown base measure `{spec}`"))),
    };
    Ok((spec.to_string(), g))
}

/// `{"a": [...], "b": [...], "tail": [a_inf, b_inf]}`; `tail` optional.
fn read_jacobi(path: &Path) -> CliResult<JacobiData> {
    let text = std::fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
    let list = |k: &str| -> CliResult<Vec<f64>> {
        match v.get(k) {
            Some(x) => Ok(json_reals(x)?.into_iter().flatten().collect()),
            None => Ok(vec![]),
        }
    };
    let (a, b, tail) = (list("a")?, list("b")?, list("tail")?);
    let j = match tail.as_slice() {
        [] => JacobiData::finite(a, b),
        [ai, bi] => JacobiData::with_tail(a, b, *ai, *bi),
        _ => return Err(parse_err("`tail` needs two entries")),
    };
    j.map_err(|e| parse_err(e.to_string()))
}

pub fn cmd_density(common: &Common, args: &DensityArgs) -> CliResult<Table> {
    let (name, g) = base_measure(&args.base)?;
    let gs = grids(common, &["x"])?;
    let xs = gs.first().map_or_else(|| linspace("-4:4:801"), |g| Ok(g.values.clone()))?;
    let eps = match &args.eps {
        Some(e) => f64_list(e)?,
        None => DEFAULT_EPS.to_vec(),
    };
    let m = g.first_moment();
    let series: Vec<(String, CauchyTransform)> = match args.transform {
        TransformArg::None => vec![(name, g.clone())],
        TransformArg::U => {
            let (p, q) = match (args.p, args.q) {
                (Some(p), Some(q)) => (p, q),
                (None, None) => (1.0 - args.s - args.t, (1.0 - args.s) * (1.0 - args.t)),
                _ => return Err(parse_err("--p and --q go together")),
            };
            let tp = TransformParams { kind: crate::measures::TransformKind::U { p, q }, m };
            vec![(format!("{name} U p={p} q={q}"), tp.apply(&g)?)]
        }
        TransformArg::T => f64_list(&args.tau)?
            .into_iter()
            .map(|tau| Ok((format!("{name} t tau={tau}"), crate::measures::t_transform(&g, tau)?)))
            .collect::<Result<_, Error>>()?,
        TransformArg::W => {
            vec![(format!("{name} W s={} t={}", args.s, args.t), crate::measures::w_transform(&g, args.s, args.t, m)?)]
        }
    };
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for (label, h) in &series {
        let res = stieltjes_invert(h, &xs, &eps)?;
        summary.push((format!("flagged[{label}]"), res.flagged().len().to_string()));
        summary.push((format!("atom_mass[{label}]"), format!("{}", res.atom_mass() + 0.0)));
        for smp in &res.samples {
            let masked = res.atoms.iter().any(|a| (a.location - smp.x).abs() < common.tol_pole);
            let value = if masked { Cell::Blank } else { Cell::Num(smp.density) };
            rows.push(vec![Cell::Text(label.clone()), Cell::Text("density".into()), Cell::Num(smp.x), value]);
        }
        for a in &res.atoms {
            rows.push(vec![Cell::Text(label.clone()), Cell::Text("atom".into()), Cell::Num(a.location), Cell::Num(a.mass)]);
        }
    }
    Ok(Table { columns: ["series", "kind", "x", "value"].map(String::from).to_vec(), rows, summary })
}

/// Curves `sum c_j / (x - lambda_j)` and `-(1-s)(1-t) / ((s+t-st) x + st m)`,
/// and the same equation with the right-hand denominator cleared.
pub fn cmd_interlace(common: &Common, args: &InterlaceArgs) -> CliResult<Table> {
    let (a, u) = hermitian_pair(common, &args.a, &args.u)?;
    if !a.is_hermitian(1e-12) {
        return Err(CliError::Numeric(Error::NotSelfAdjoint(a.hermitian_defect())));
    }
    let (s, t) = (args.s, args.t);
    let pf = weyl_partial_fractions(&a, &u, &u)?;
    let lambda: Vec<f64> = pf.poles().iter().map(|z| z.re).collect();
    let weights: Vec<f64> = pf.weights().iter().map(|z| z.re).collect();
    let m = a.mul_vec(&u).inner(&u).re;
    let (k1, k0) = (s + t - s * t, s * t * m);
    let q = (1.0 - s) * (1.0 - t);
    let lo = lambda.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gs = grids(common, &["x"])?;
    let xs = gs.first().map_or_else(|| linspace(&format!("{}:{}:2001", lo - 2.0, hi + 2.0)), |g| Ok(g.values.clone()))?;
    let tol = common.tol_pole;
    let scale = k1.abs() + k0.abs();
    let mut rows: Vec<Vec<Cell>> = xs
        .par_iter()
        .map(|&x| {
            let lhs = if lambda.iter().any(|l| (x - l).abs() < tol) {
                None
            } else {
                Some(lambda.iter().zip(&weights).map(|(l, c)| c / (x - l)).sum::<f64>())
            };
            let den = k1 * x + k0;
            let rhs = if scale == 0.0 || (k1 != 0.0 && (x + k0 / k1).abs() < tol) || den == 0.0 {
                None
            } else {
                Some(-q / den)
            };
            vec![
                Cell::Text("curve".into()),
                Cell::Num(x),
                Cell::opt(lhs),
                Cell::opt(rhs),
                Cell::opt(lhs.map(|v| den * v)),
                Cell::Num(-q),
            ]
        })
        .collect();
    let marker = |kind: &str, x: f64| {
        vec![Cell::Text(kind.into()), Cell::Num(x), Cell::Blank, Cell::Blank, Cell::Blank, Cell::Blank]
    };
    rows.extend(lambda.iter().map(|&l| marker("eigenvalue", l)));
    let p = Rank2Perturbation::antidiagonal_au(&a, &u, C64::new(s, 0.0), C64::new(t, 0.0))?;
    for z in sort_spectrum(p.eigenvalues()?) {
        let kind = if z.im.abs() < common.tol_real * (1.0 + z.norm()) { "perturbed" } else { "perturbed_nonreal" };
        rows.push(marker(kind, z.re));
    }
    if k1 != 0.0 {
        rows.push(marker("x0", -k0 / k1));
    }
    let columns = ["kind", "x", "lhs", "rhs", "lhs_cleared", "rhs_cleared"].map(String::from).to_vec();
    Ok(Table { columns, rows, summary: vec![("m".into(), format!("{m}")), ("q".into(), format!("{q}"))] })
}

pub fn execute(config: &RunConfig) -> CliResult<Table> {
    let c = &config.common;
    if !(c.tol_pole >= 0.0 && c.tol_real >= 0.0) {
        return Err(parse_err("tolerances must be nonnegative"));
    }
    match &config.command {
        Command::Spectrum(a) => cmd_spectrum(c, a),
        Command::Svsweep(a) => cmd_svsweep(c, a),
        Command::Density(a) => cmd_density(c, a),
        Command::Interlace(a) => cmd_interlace(c, a),
    }
}

/// Parses `args`, runs the subcommand and writes its table; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let result = execute(&config).and_then(|table| {
        let text = table.render(&config);
        match &config.common.out {
            Some(path) => std::fs::write(path, text).map_err(|e| parse_err(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("ranktwo: {e}");
            e.exit_code()
        }
    }
}
