//! The `rrtower` command line: argument parsing, output formats and the
//! on-disk ladder cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::codes::{generator_matrix, min_distance_bruteforce, rank, split_places};
use crate::error::{Error, Result};
use crate::field::{make_field_ctx, FieldCtx};
use crate::funcrep::{Expander, Monomial, TowerFunction};
use crate::ladder::{master_ladder, MasterLadder, CACHE_FORMAT_VERSION};
use crate::semigroup::intervals;
use crate::tower::genus;

/// Highest level accepted by commands that build a ladder.
pub const MAX_LADDER_LEVEL: usize = 10;

/// Environment variable that overrides `--cache`.
pub const CACHE_ENV: &str = "RRTOWER_CACHE";

#[derive(Parser, Debug)]
#[command(
    name = "rrtower",
    version,
    about = "Riemann-Roch bases, Weierstrass semigroups and one-point codes on the tower x_{j+1}^2 = (x_j^2+1)/(2x_j)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum At {
    Pminus1,
    Infinity,
}

#[derive(Args, Debug)]
struct Common {
    /// Tower level j
    #[arg(long)]
    level: usize,
    /// Odd prime p of the field F_{p^2}
    #[arg(long, default_value_t = 3)]
    prime: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Genus of level j
    Genus {
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Non-gap intervals of the Weierstrass semigroup at P_inf
    Semigroup(Common),
    /// Integers c_m and functions w_m of the master ladder
    Ladder {
        #[command(flatten)]
        common: Common,
        /// Directory for cached ladders
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Basis of L(s P_inf)
    Basis {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        s: i64,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// One-point code C_L(s P_inf, D) on the split places
    Code {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        s: i64,
        /// Write the generator matrix here (JSON with --format json, CSV otherwise)
        #[arg(long)]
        matrix_out: Option<PathBuf>,
        /// Also compute the minimum distance by enumeration
        #[arg(long)]
        distance: bool,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Expansion of the generator x_K of level j
    Expand {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        gen: usize,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        at: At,
    },
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.into())
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the command line, printing to stdout/stderr; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env_cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, env_cache, &mut stdout.lock(), &mut stderr.lock())
}

/// `run` with explicit streams and cache override.
pub fn run_with<I, T>(
    args: I,
    env_cache: Option<PathBuf>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli, env_cache, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            2
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn field(p: u64) -> CliResult<FieldCtx> {
    make_field_ctx(p).map_err(|e| Failure::Usage(format!("--prime: {e} (need an odd prime)")))
}

fn guard_level(level: usize) -> CliResult<()> {
    if level > MAX_LADDER_LEVEL {
        return Err(Failure::Usage(format!(
            "--level {level} exceeds the ladder bound {MAX_LADDER_LEVEL}"
        )));
    }
    Ok(())
}

fn cache_file(dir: &Path, p: u32, j: usize) -> PathBuf {
    dir.join(format!("ladder-p{p}-j{j}-v{CACHE_FORMAT_VERSION}.json"))
}

/// Master ladder with functions, read from or written to the cache directory.
fn cached_ladder(ex: &Expander, j: usize, dir: Option<&Path>) -> Result<MasterLadder> {
    let p = ex.ctx().p();
    if let Some(dir) = dir {
        let path = cache_file(dir, p, j);
        if let Ok(text) = fs::read_to_string(&path) {
            let v: Value = serde_json::from_str(&text)?;
            let ladder = MasterLadder::from_json(ex.ctx(), &v)?;
            if ladder.j == j && ladder.w.is_some() {
                return Ok(ladder);
            }
        }
        let ladder = master_ladder(ex, j, true)?;
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(&ladder.to_json(p))?)?;
        fs::rename(&tmp, &path)?;
        return Ok(ladder);
    }
    master_ladder(ex, j, true)
}

fn emit_json(out: &mut dyn Write, v: &Value) -> CliResult<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).map_err(Error::from)?)?;
    Ok(())
}

fn execute(cli: Cli, env_cache: Option<PathBuf>, out: &mut dyn Write) -> CliResult<()> {
    let pick_cache = |flag: Option<PathBuf>| env_cache.clone().or(flag);
    match cli.command {
        Command::Genus { level, format } => {
            let g = genus(level);
            match format {
                Format::Text => writeln!(out, "{g}")?,
                Format::Json => emit_json(out, &json!({"j": level, "genus": g}))?,
                Format::Csv => writeln!(out, "j,genus\n{level},{g}")?,
            }
        }
        Command::Semigroup(c) => {
            guard_level(c.level)?;
            let ctx = field(c.prime)?;
            let ladder = master_ladder(&Expander::new(&ctx), c.level, false)?;
            let h = intervals(&ladder);
            match c.format {
                Format::Text => writeln!(out, "{h}")?,
                Format::Json => emit_json(out, &h.to_json())?,
                Format::Csv => {
                    writeln!(out, "start,end")?;
                    for (a, b) in &h.intervals {
                        writeln!(out, "{a},{b}")?;
                    }
                    writeln!(out, "{},inf", h.tail)?;
                }
            }
        }
        Command::Ladder { common: c, cache } => {
            guard_level(c.level)?;
            let ctx = field(c.prime)?;
            let ex = Expander::new(&ctx);
            let ladder = cached_ladder(&ex, c.level, pick_cache(cache).as_deref())?;
            let w = ladder.w.as_ref().expect("cached ladders carry functions");
            match c.format {
                Format::Json => emit_json(out, &ladder.to_json(ctx.p()))?,
                Format::Text => {
                    for (m, f) in w.iter().enumerate() {
                        writeln!(
                            out,
                            "m={m} c={} pole={} w={f}",
                            ladder.c[m],
                            ladder.pole_order(m)
                        )?;
                    }
                }
                Format::Csv => {
                    writeln!(out, "m,c,pole_order,w")?;
                    for (m, f) in w.iter().enumerate() {
                        writeln!(out, "{m},{},{},{f}", ladder.c[m], ladder.pole_order(m))?;
                    }
                }
            }
        }
        Command::Basis { common: c, s, cache } => {
            guard_level(c.level)?;
            let ctx = field(c.prime)?;
            let ex = Expander::new(&ctx);
            let ladder = cached_ladder(&ex, c.level, pick_cache(cache).as_deref())?;
            let w = ladder.w.as_ref().expect("cached ladders carry functions");
            let labels = ladder.basis_labels(s);
            let elem = |m: usize, l: i64| -> CliResult<TowerFunction> {
                Ok(w[m].mul_monomial(&Monomial::x(0, l))?)
            };
            match c.format {
                Format::Text => {
                    writeln!(out, "dim = {}", labels.len())?;
                    for &(m, l, pole) in &labels {
                        writeln!(out, "pole={pole} m={m} l={l} f={}", elem(m, l)?)?;
                    }
                }
                Format::Json => {
                    let mut items = Vec::with_capacity(labels.len());
                    for &(m, l, pole) in &labels {
                        items.push(json!({"m": m, "l": l, "pole_order": pole, "f": elem(m, l)?.to_json()}));
                    }
                    emit_json(
                        out,
                        &json!({"p": ctx.p(), "j": c.level, "s": s, "dim": labels.len(), "basis": items}),
                    )?;
                }
                Format::Csv => {
                    writeln!(out, "m,l,pole_order,f")?;
                    for &(m, l, pole) in &labels {
                        writeln!(out, "{m},{l},{pole},{}", elem(m, l)?)?;
                    }
                }
            }
        }
        Command::Code {
            common: c,
            s,
            matrix_out,
            distance,
            cache,
        } => {
            guard_level(c.level)?;
            if s < 0 {
                return Err(Failure::Usage("--s must be non-negative".into()));
            }
            let ctx = field(c.prime)?;
            let ex = Expander::new(&ctx);
            let ladder = cached_ladder(&ex, c.level, pick_cache(cache).as_deref())?;
            let places = split_places(&ctx, c.level);
            if places.is_empty() {
                return Err(Failure::Compute(Error::InstanceTooLarge(format!(
                    "no completely split places at level {} over F_{}^2",
                    c.level, c.prime
                ))));
            }
            let basis = ladder.basis(s).expect("cached ladders carry functions");
            let m = generator_matrix(&ctx, &basis, &places)?;
            let k = rank(&ctx, &m);
            let n = m.ncols;
            let d = if distance {
                Some(min_distance_bruteforce(&ctx, &m)?)
            } else {
                None
            };
            if let Some(path) = &matrix_out {
                let body = match c.format {
                    Format::Json => serde_json::to_string_pretty(&m.to_json(&ctx, s)).map_err(Error::from)? + "\n",
                    _ => m.to_csv(),
                };
                fs::write(path, body)?;
            }
            match c.format {
                Format::Json => {
                    let mut v = m.to_json(&ctx, s);
                    if matrix_out.is_some() {
                        v.as_object_mut().unwrap().remove("matrix");
                    }
                    if let Some(d) = d {
                        v["d"] = json!(d);
                    }
                    emit_json(out, &v)?;
                }
                Format::Text => {
                    write!(out, "n={n} k={k} dim={} designed_d={}", m.rows.len(), n as i64 - s)?;
                    if let Some(d) = d {
                        write!(out, " d={d}")?;
                    }
                    writeln!(out)?;
                }
                Format::Csv => {
                    if matrix_out.is_some() {
                        writeln!(out, "n,k,dim,designed_d,d")?;
                        let d = d.map(|d| d.to_string()).unwrap_or_default();
                        writeln!(out, "{n},{k},{},{},{d}", m.rows.len(), n as i64 - s)?;
                    } else {
                        write!(out, "{}", m.to_csv())?;
                    }
                }
            }
        }
        Command::Expand {
            common: c,
            gen,
            order,
            at,
        } => {
            if gen > c.level {
                return Err(Failure::Usage(format!(
                    "--gen {gen} must not exceed --level {}",
                    c.level
                )));
            }
            if order == 0 {
                return Err(Failure::Usage("--order must be at least 1".into()));
            }
            let ctx = field(c.prime)?;
            let ex = Expander::new(&ctx);
            let f = TowerFunction::monomial(c.level, Monomial::x(gen, 1))?;
            let series = match at {
                At::Pminus1 => ex.expand_at_pminus1(&f, order)?,
                At::Infinity => ex.expand_at_infinity(&f, order)?,
            };
            match c.format {
                Format::Text => writeln!(out, "{series}")?,
                Format::Json => {
                    let coeffs: Vec<String> = series.coeffs().iter().map(|x| x.to_string()).collect();
                    emit_json(
                        out,
                        &json!({"val": series.val(), "prec": series.abs_prec(), "coeffs": coeffs}),
                    )?;
                }
                Format::Csv => {
                    writeln!(out, "exponent,coeff")?;
                    for (i, x) in series.coeffs().iter().enumerate() {
                        writeln!(out, "{},{x}", series.val() + i as i64)?;
                    }
                }
            }
        }
    }
    Ok(())
}
