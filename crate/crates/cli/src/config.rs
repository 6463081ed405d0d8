//! Run configuration: plain `key = value` text, `#` comments.
//!
//! Every key has a documented default except the grid (dim, n, extent) and
//! t_end, which must be given. Unknown keys, unparsable values and violated
//! invariants are reported with their line number.

use chemotaxis_core::grid::{Field, Grid};
use chemotaxis_core::solver::{Mode, ModelParams, SchemeParams};
use chemotaxis_core::{FluxScheme, Truncation};

use std::fmt::Write as _;

/// Initial condition for one field.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Constant(f64),
    /// baseline + amp * prod cos(k pi x_d / L_d)
    Eigen { baseline: f64, amp: f64, k: u32 },
    /// Snapshot file in the solver's own format.
    File(String),
}

/// Fully validated configuration of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dim: usize,
    pub n: Vec<usize>,
    pub extent: Vec<f64>,
    pub origin: Vec<f64>,
    pub s: f64,
    pub trunc: Truncation,
    pub alpha: f64,
    pub dt: f64,
    pub t_end: f64,
    pub flux: FluxScheme,
    pub lin_tol: f64,
    pub lin_maxit: usize,
    pub mode: Mode,
    pub u0: InitialCondition,
    pub v0: InitialCondition,
    pub every: usize,
    pub outdir: String,
    pub snapshots: bool,
}

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

fn err_at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError { line: Some(line), message: message.into() }
}

fn err(message: impl Into<String>) -> ConfigError {
    ConfigError { line: None, message: message.into() }
}

/// Parse and validate a config. Defaults: s=1, m=untruncated, alpha=0.01,
/// dt=1e-3, flux=centered, lin_tol=1e-10, lin_maxit=10000, mode=imex,
/// u0/v0=constant 1, every=10, outdir=out, snapshots=false, origin=0.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut dim: Option<(usize, usize)> = None; // (value, line)
    let mut n_raw: Option<(Vec<usize>, usize)> = None;
    let mut extent_raw: Option<(Vec<f64>, usize)> = None;
    let mut origin_raw: Option<(Vec<f64>, usize)> = None;
    let mut t_end: Option<f64> = None;

    let mut s = 1.0f64;
    let mut trunc = Truncation::Untruncated;
    let mut alpha = 1e-2f64;
    let mut dt = 1e-3f64;
    let mut flux = FluxScheme::Centered;
    let mut lin_tol = 1e-10f64;
    let mut lin_maxit = 10_000usize;
    let mut mode = Mode::Imex;
    let mut u0 = InitialCondition::Constant(1.0);
    let mut v0 = InitialCondition::Constant(1.0);
    let mut every = 10usize;
    let mut outdir = "out".to_string();
    let mut snapshots = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(err_at(lineno, format!("expected `key = value`, got `{line}`")));
        };
        let key = line[..eq].trim();
        let value = line[eq + 1..].trim();
        if value.is_empty() {
            return Err(err_at(lineno, format!("key `{key}` has no value")));
        }
        match key {
            "dim" => {
                let d: usize = parse_num(value, lineno, "dim")?;
                if !(1..=3).contains(&d) {
                    return Err(err_at(lineno, "dim must be 1, 2 or 3"));
                }
                dim = Some((d, lineno));
            }
            "n" => n_raw = Some((parse_list(value, lineno, "n")?, lineno)),
            "extent" => extent_raw = Some((parse_list(value, lineno, "extent")?, lineno)),
            "origin" => origin_raw = Some((parse_list(value, lineno, "origin")?, lineno)),
            "s" => {
                s = parse_num(value, lineno, "s")?;
                if !(s >= 1.0) {
                    return Err(err_at(lineno, "s must be >= 1"));
                }
            }
            "m" => {
                if value == "untruncated" {
                    trunc = Truncation::Untruncated;
                } else {
                    let m: u32 = parse_num(value, lineno, "m")?;
                    trunc = Truncation::level(m).map_err(|e| err_at(lineno, e.to_string()))?;
                }
            }
            "alpha" => {
                alpha = parse_num(value, lineno, "alpha")?;
                if !(alpha > 0.0) {
                    return Err(err_at(lineno, "alpha must be > 0"));
                }
            }
            "dt" => {
                dt = parse_num(value, lineno, "dt")?;
                if !(dt > 0.0) {
                    return Err(err_at(lineno, "dt must be > 0"));
                }
            }
            "t_end" => {
                let t: f64 = parse_num(value, lineno, "t_end")?;
                if !(t >= 0.0) {
                    return Err(err_at(lineno, "t_end must be >= 0"));
                }
                t_end = Some(t);
            }
            "flux" => {
                flux = match value {
                    "centered" => FluxScheme::Centered,
                    "upwind" => FluxScheme::Upwind,
                    _ => return Err(err_at(lineno, "flux must be `centered` or `upwind`")),
                }
            }
            "lin_tol" => {
                lin_tol = parse_num(value, lineno, "lin_tol")?;
                if !(lin_tol > 0.0) {
                    return Err(err_at(lineno, "lin_tol must be > 0"));
                }
            }
            "lin_maxit" => {
                lin_maxit = parse_num(value, lineno, "lin_maxit")?;
                if lin_maxit == 0 {
                    return Err(err_at(lineno, "lin_maxit must be >= 1"));
                }
            }
            "mode" => {
                mode = match value {
                    "imex" => Mode::Imex,
                    "explicit" => Mode::Explicit,
                    _ => return Err(err_at(lineno, "mode must be `imex` or `explicit`")),
                }
            }
            "u0" => u0 = parse_ic(value, lineno)?,
            "v0" => v0 = parse_ic(value, lineno)?,
            "every" => {
                every = parse_num(value, lineno, "every")?;
                if every == 0 {
                    return Err(err_at(lineno, "every must be >= 1"));
                }
            }
            "outdir" => outdir = value.to_string(),
            "snapshots" => {
                snapshots = match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(err_at(lineno, "snapshots must be `true` or `false`")),
                }
            }
            _ => return Err(err_at(lineno, format!("unknown key `{key}`"))),
        }
    }

    let (dim, _) = dim.ok_or_else(|| err("missing required key `dim`"))?;
    let (n_list, n_line) = n_raw.ok_or_else(|| err("missing required key `n`"))?;
    let (extent_list, e_line) = extent_raw.ok_or_else(|| err("missing required key `extent`"))?;
    let t_end = t_end.ok_or_else(|| err("missing required key `t_end`"))?;

    let n = broadcast(n_list, dim).map_err(|m| err_at(n_line, m))?;
    let extent = broadcast(extent_list, dim).map_err(|m| err_at(e_line, m))?;
    let origin = match origin_raw {
        Some((list, line)) => broadcast(list, dim).map_err(|m| err_at(line, m))?,
        None => vec![0.0; dim],
    };
    for (i, &ni) in n.iter().enumerate() {
        if ni < 2 {
            return Err(err(format!("n must be >= 2 per axis (axis {i} has {ni})")));
        }
    }
    for (i, &ei) in extent.iter().enumerate() {
        if !(ei > 0.0) {
            return Err(err(format!("extent must be > 0 per axis (axis {i} has {ei})")));
        }
    }
    for ic in [&u0, &v0] {
        if let InitialCondition::Eigen { baseline, amp, k } = ic {
            if baseline - amp < 0.0 {
                return Err(err("eigen initial condition needs baseline - amp >= 0"));
            }
            if *k == 0 {
                return Err(err("eigen initial condition needs k >= 1"));
            }
        }
        if let InitialCondition::Constant(c) = ic {
            if !(*c >= 0.0) {
                return Err(err("constant initial condition must be >= 0"));
            }
        }
    }

    Ok(RunConfig {
        dim,
        n,
        extent,
        origin,
        s,
        trunc,
        alpha,
        dt,
        t_end,
        flux,
        lin_tol,
        lin_maxit,
        mode,
        u0,
        v0,
        every,
        outdir,
        snapshots,
    })
}

fn parse_num<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<T, ConfigError> {
    value
        .parse::<T>()
        .map_err(|_| err_at(line, format!("cannot parse value `{value}` for key `{key}`")))
}

fn parse_list<T: std::str::FromStr>(value: &str, line: usize, key: &str) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(|v| parse_num(v.trim(), line, key))
        .collect()
}

fn broadcast<T: Clone>(list: Vec<T>, dim: usize) -> Result<Vec<T>, String> {
    if list.len() == dim {
        Ok(list)
    } else if list.len() == 1 {
        Ok(vec![list[0].clone(); dim])
    } else {
        Err(format!("expected 1 or {dim} comma-separated values, got {}", list.len()))
    }
}

fn parse_ic(value: &str, line: usize) -> Result<InitialCondition, ConfigError> {
    let mut parts = value.split_whitespace();
    let kind = parts.next().unwrap_or("");
    let ic = match kind {
        "constant" => {
            let c = parse_num(parts.next().ok_or_else(|| err_at(line, "constant needs a value"))?, line, "u0/v0")?;
            InitialCondition::Constant(c)
        }
        "eigen" => {
            let baseline = parse_num(
                parts.next().ok_or_else(|| err_at(line, "eigen needs baseline amp k"))?,
                line,
                "baseline",
            )?;
            let amp = parse_num(
                parts.next().ok_or_else(|| err_at(line, "eigen needs baseline amp k"))?,
                line,
                "amp",
            )?;
            let k = parse_num(
                parts.next().ok_or_else(|| err_at(line, "eigen needs baseline amp k"))?,
                line,
                "k",
            )?;
            InitialCondition::Eigen { baseline, amp, k }
        }
        "file" => {
            let path = parts.next().ok_or_else(|| err_at(line, "file needs a path"))?;
            InitialCondition::File(path.to_string())
        }
        _ => {
            return Err(err_at(
                line,
                format!("initial condition must be `constant c`, `eigen baseline amp k` or `file path`, got `{value}`"),
            ))
        }
    };
    if parts.next().is_some() {
        return Err(err_at(line, "trailing tokens after initial condition"));
    }
    Ok(ic)
}

impl RunConfig {
    /// Canonical text form: parse(canonical(c)) == c, and canonicalizing is
    /// idempotent.
    pub fn to_canonical_string(&self) -> String {
        let mut s = String::new();
        let join_u = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let join_f = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(s, "dim = {}", self.dim);
        let _ = writeln!(s, "n = {}", join_u(&self.n));
        let _ = writeln!(s, "extent = {}", join_f(&self.extent));
        let _ = writeln!(s, "origin = {}", join_f(&self.origin));
        let _ = writeln!(s, "s = {}", self.s);
        match self.trunc {
            Truncation::Level(m) => {
                let _ = writeln!(s, "m = {m}");
            }
            Truncation::Untruncated => {
                let _ = writeln!(s, "m = untruncated");
            }
        }
        let _ = writeln!(s, "alpha = {}", self.alpha);
        let _ = writeln!(s, "dt = {}", self.dt);
        let _ = writeln!(s, "t_end = {}", self.t_end);
        let _ = writeln!(s, "flux = {}", match self.flux {
            FluxScheme::Centered => "centered",
            FluxScheme::Upwind => "upwind",
        });
        let _ = writeln!(s, "lin_tol = {}", self.lin_tol);
        let _ = writeln!(s, "lin_maxit = {}", self.lin_maxit);
        let _ = writeln!(s, "mode = {}", match self.mode {
            Mode::Imex => "imex",
            Mode::Explicit => "explicit",
        });
        let _ = writeln!(s, "u0 = {}", ic_text(&self.u0));
        let _ = writeln!(s, "v0 = {}", ic_text(&self.v0));
        let _ = writeln!(s, "every = {}", self.every);
        let _ = writeln!(s, "outdir = {}", self.outdir);
        let _ = writeln!(s, "snapshots = {}", self.snapshots);
        s
    }

    pub fn grid(&self) -> Result<Grid<f64>, ConfigError> {
        Grid::new(self.dim, &self.n, &self.extent, &self.origin).map_err(|e| err(e.to_string()))
    }

    /// Materialize an initial condition on the grid.
    pub fn build_ic(&self, ic: &InitialCondition, grid: &Grid<f64>) -> Result<Field<f64>, ConfigError> {
        match ic {
            InitialCondition::Constant(c) => Ok(Field::constant(grid, *c)),
            InitialCondition::Eigen { baseline, amp, k } => Ok(
                chemotaxis_core::oracles::heat_eigen_solution(grid, *baseline, *amp, *k, 0.0),
            ),
            InitialCondition::File(path) => {
                let (field, _t) = crate::output::read_snapshot(path, grid)
                    .map_err(|m| err(format!("initial condition file `{path}`: {m}")))?;
                Ok(field)
            }
        }
    }

    pub fn model_params(&self) -> Result<ModelParams<f64>, ConfigError> {
        ModelParams::new(self.s, self.trunc, self.alpha).map_err(|e| err(e.to_string()))
    }

    pub fn scheme_params(&self) -> SchemeParams<f64> {
        SchemeParams {
            dt: self.dt,
            t_end: self.t_end,
            flux: self.flux,
            lin_tol: self.lin_tol,
            lin_maxit: self.lin_maxit,
            mode: self.mode,
        }
    }
}

fn ic_text(ic: &InitialCondition) -> String {
    match ic {
        InitialCondition::Constant(c) => format!("constant {c}"),
        InitialCondition::Eigen { baseline, amp, k } => format!("eigen {baseline} {amp} {k}"),
        InitialCondition::File(p) => format!("file {p}"),
    }
}
