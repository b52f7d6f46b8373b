//! Command-line surface. Every subcommand is deterministic for fixed
//! arguments; JSON is the machine format, text and CSV are for inspection.
//!
//! Exit codes: 0 success or balanced, 1 verification failure, 2 bad
//! arguments, 3 size guard exceeded, 4 solver timeout.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::design::{
    borel_family_selection, expand, lambda_max, q1_family, verify_design, verify_set_design, DesignParams, Verification,
};
use crate::enumerate::{class_of, guard_count, qbinom};
use crate::error::{Error, Result};
use crate::exchange::{DesignFile, GroupDescriptor, KmFile, LoadedDesign, SolveRequestJson, SolveResponseJson};
use crate::field::{FieldSpec, ModulusOverrides};
use crate::group::{GroupKind, DEFAULT_GUARD};
use crate::incidence::{borel_km_concat, km_concat, subspace_label, BorelBlockLayout};
use crate::linalg::{apply, canonicalize, MatrixFq};
use crate::solver::{solve, SolveStatus};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNBALANCED: i32 = 1;
pub const EXIT_BAD_ARGS: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_TIMEOUT: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "qdesign", version, about = "Subspace designs over finite fields via Kramer-Mesner matrices")]
pub struct Cli {
    /// Field moduli, one `q m c_0 .. c_m` line per field.
    #[arg(long, global = true, env = "QDESIGN_POLY_FILE")]
    pub poly_file: Option<PathBuf>,
    /// Largest orbit or subspace collection to enumerate.
    #[arg(long, global = true, env = "QDESIGN_GUARD_ORBIT_SIZE", default_value_t = DEFAULT_GUARD)]
    pub guard_orbit_size: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gaussian binomial coefficient [n choose k]_q.
    Qbinom { n: usize, k: usize, q: u64 },
    /// Number of blocks of the complete design, the largest possible lambda.
    LambdaMax {
        #[arg(long, env = "QDESIGN_N")]
        n: usize,
        #[arg(long, env = "QDESIGN_T")]
        t: usize,
        #[arg(long = "K", env = "QDESIGN_K", value_delimiter = ',', required = true)]
        ks: Vec<usize>,
        #[arg(long, env = "QDESIGN_Q")]
        q: u64,
    },
    /// Kramer-Mesner matrix A_{t,K}^G.
    Km {
        /// borel, singer, singer_frobenius, trivial, or a JSON group descriptor file.
        #[arg(long, env = "QDESIGN_GROUP", default_value = "borel")]
        group: String,
        #[arg(long, env = "QDESIGN_N")]
        n: usize,
        #[arg(long, env = "QDESIGN_Q")]
        q: u32,
        #[arg(long, env = "QDESIGN_T")]
        t: usize,
        #[arg(long = "K", env = "QDESIGN_K", value_delimiter = ',')]
        ks: Vec<usize>,
        #[arg(long, env = "QDESIGN_FORMAT", value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Borel only: rows and the two selected column blocks of the family layout.
        #[arg(long)]
        family_layout: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Borel family design with n = t + 4 (q = 1 gives the set version).
    Construct {
        t: usize,
        q: u32,
        /// Also list every block.
        #[arg(long)]
        explicit_blocks: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Checks a design file or solver response by brute force.
    Verify {
        file: PathBuf,
        /// Overrides the t recorded in the file.
        #[arg(long, env = "QDESIGN_T")]
        t: Option<usize>,
    },
    /// Solves A x = lambda 1 over 0/1 vectors for a matrix or request file.
    Solve {
        file: PathBuf,
        #[arg(long, env = "QDESIGN_LAMBDA")]
        lambda: Option<u64>,
        #[arg(long, env = "QDESIGN_MAX_SOLUTIONS")]
        max_solutions: Option<usize>,
        /// Seconds.
        #[arg(long, env = "QDESIGN_TIME_LIMIT")]
        time_limit: Option<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Seeded random check that Borel elements preserve echelon classes.
    BorelCheck {
        #[arg(long, env = "QDESIGN_N")]
        n: usize,
        #[arg(long, env = "QDESIGN_Q")]
        q: u32,
        #[arg(long, env = "QDESIGN_K")]
        k: usize,
        #[arg(long, env = "QDESIGN_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "QDESIGN_TRIALS", default_value_t = 1000)]
        trials: usize,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::GuardExceeded { .. } => EXIT_GUARD,
        _ => EXIT_BAD_ARGS,
    }
}

/// Runs a parsed command, writing results to `out` unless an output file is
/// given. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let overrides = match &cli.poly_file {
        Some(p) => ModulusOverrides::load(p)?,
        None => ModulusOverrides::default(),
    };
    let guard = cli.guard_orbit_size;
    match &cli.command {
        Command::Qbinom { n, k, q } => {
            if *q == 0 {
                return Err(Error::params("q must be positive"));
            }
            writeln!(out, "{}", qbinom(*n as i64, *k as i64, *q))?;
            Ok(EXIT_OK)
        }
        Command::LambdaMax { n, t, ks, q } => {
            if *q == 0 || ks.iter().any(|k| k < t || k > n) {
                return Err(Error::params("need q >= 1 and t <= k <= n for every k"));
            }
            writeln!(out, "{}", lambda_max(*n, ks, *t, *q))?;
            Ok(EXIT_OK)
        }
        Command::Km { group, n, q, t, ks, format, family_layout, out: path } => {
            let field = FieldSpec::with_overrides(*q, &overrides)?;
            let desc = group_descriptor(group)?;
            let g = desc.build(&field, *n)?;
            let m = if *family_layout {
                if g.kind() != GroupKind::Borel {
                    return Err(Error::params("--family-layout needs the Borel group"));
                }
                let family = [t + 1, t + 2];
                if !ks.is_empty() && ks[..] != family {
                    return Err(Error::params(format!("--family-layout uses K = {},{}", t + 1, t + 2)));
                }
                let layout = BorelBlockLayout::new(*n, *t)?;
                borel_guard(&field, *n, &family, guard)?;
                layout.selected(&borel_km_concat(&field, *n, *t, &family)?)?
            } else if ks.is_empty() {
                return Err(Error::params("--K is required"));
            } else if g.kind() == GroupKind::Borel {
                borel_guard(&field, *n, ks, guard)?;
                borel_km_concat(&field, *n, *t, ks)?
            } else {
                km_concat(&g, *t, ks, guard)?
            };
            let text = match format {
                Format::Json => json(&KmFile::new(&m, &g))?,
                Format::Csv => m.to_csv(),
                Format::Text => m.to_text(),
            };
            emit(out, path.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Construct { t, q, explicit_blocks, out: path } => {
            let file = if *q == 1 {
                let (d, lambda) = q1_family(*t)?;
                let params = DesignParams { t: *t, n: d.n, ks: vec![t + 1, t + 2], lambda, q: 1 };
                DesignFile::from_set_design(&d, &params)
            } else {
                let field = FieldSpec::with_overrides(*q, &overrides)?;
                let (sel, params) = borel_family_selection(*t, &field)?;
                let file = DesignFile::from_selection(&sel, &params);
                if *explicit_blocks {
                    file.with_blocks(&expand(&sel, guard)?)
                } else {
                    file
                }
            };
            emit(out, path.as_deref(), &json(&file)?)?;
            Ok(EXIT_OK)
        }
        Command::Verify { file, t } => {
            let text = fs::read_to_string(file)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            if value.get("solutions").is_some() {
                let resp: SolveResponseJson = serde_json::from_value(value)?;
                if resp.solutions.is_empty() {
                    writeln!(out, "no solutions to verify")?;
                    return Ok(EXIT_UNBALANCED);
                }
                let mut code = EXIT_OK;
                for (i, sol) in resp.solutions.iter().enumerate() {
                    write!(out, "solution {i}: ")?;
                    if !verify_file(&sol.design, *t, &overrides, guard, out)? {
                        code = EXIT_UNBALANCED;
                    }
                }
                Ok(code)
            } else {
                let design: DesignFile = serde_json::from_value(value)?;
                Ok(if verify_file(&design, *t, &overrides, guard, out)? { EXIT_OK } else { EXIT_UNBALANCED })
            }
        }
        Command::Solve { file, lambda, max_solutions, time_limit, out: path } => {
            let text = fs::read_to_string(file)?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            let mut req = if value.get("matrix").is_some() {
                serde_json::from_value::<SolveRequestJson>(value)?
            } else {
                let matrix: KmFile = serde_json::from_value(value)?;
                let lambda = lambda.ok_or_else(|| Error::params("--lambda is required with a matrix file"))?;
                SolveRequestJson { matrix, lambda, max_solutions: 1, time_limit: None }
            };
            if let Some(l) = lambda {
                req.lambda = *l;
            }
            if let Some(c) = max_solutions {
                req.max_solutions = *c;
            }
            if let Some(s) = time_limit {
                if !s.is_finite() || *s < 0.0 {
                    return Err(Error::params("--time-limit must be a nonnegative number of seconds"));
                }
                req.time_limit = Some(*s);
            }
            let (m, g) = req.matrix.resolve(&overrides)?;
            let outcome = solve(&req.request(&m))?;
            let resp = SolveResponseJson::new(&m, &g, req.lambda, req.max_solutions, &outcome);
            emit(out, path.as_deref(), &json(&resp)?)?;
            Ok(if outcome.status == SolveStatus::Timeout { EXIT_TIMEOUT } else { EXIT_OK })
        }
        Command::BorelCheck { n, q, k, seed, trials } => {
            let field = FieldSpec::with_overrides(*q, &overrides)?;
            if *k > *n || *n == 0 {
                return Err(Error::params("need 1 <= n and k <= n"));
            }
            let failures = borel_check(&field, *n, *k, *seed, *trials)?;
            writeln!(out, "borel-check n={n} q={q} k={k} seed={seed} trials={trials} failures={failures}")?;
            Ok(if failures == 0 { EXIT_OK } else { EXIT_UNBALANCED })
        }
    }
}

/// The Borel path walks every k-subspace once.
fn borel_guard(field: &FieldSpec, n: usize, ks: &[usize], guard: u64) -> Result<()> {
    for &k in ks {
        let count = qbinom(n as i64, k as i64, u64::from(field.order()));
        guard_count(&format!("the set of {k}-subspaces"), &count, guard)?;
    }
    Ok(())
}

fn group_descriptor(arg: &str) -> Result<GroupDescriptor> {
    match arg {
        "borel" | "singer" | "singer_frobenius" | "trivial" => Ok(GroupDescriptor::of_kind(arg)),
        path => {
            let p = Path::new(path);
            if !p.is_file() {
                return Err(Error::params(format!("`{path}` is neither a group kind nor a descriptor file")));
            }
            Ok(serde_json::from_str(&fs::read_to_string(p)?)?)
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verify_file(
    d: &DesignFile,
    t: Option<usize>,
    overrides: &ModulusOverrides,
    guard: u64,
    out: &mut dyn Write,
) -> Result<bool> {
    let t = t.unwrap_or(d.params.t);
    match d.load(overrides, guard)? {
        LoadedDesign::Subspaces(b) => report(verify_design(&b, t, guard)?, subspace_label, out),
        LoadedDesign::Sets(s) => report(verify_set_design(&s, t)?, |p| p.to_string(), out),
    }
}

fn report<T>(v: Verification<T>, label: impl Fn(&T) -> String, out: &mut dyn Write) -> Result<bool> {
    match v {
        Verification::Balanced { lambda } => {
            writeln!(out, "lambda={lambda}")?;
            Ok(true)
        }
        Verification::Unbalanced { expected, violations } => {
            writeln!(out, "unbalanced: expected lambda={expected}")?;
            for (s, c) in &violations {
                writeln!(out, "  {} count={c}", label(s))?;
            }
            Ok(false)
        }
    }
}

fn random_subspace_matrix(field: &FieldSpec, n: usize, k: usize, rng: &mut ChaCha8Rng) -> Result<MatrixFq> {
    let q = field.order();
    loop {
        let entries = (0..n * k).map(|_| rng.gen_range(0..q) as u8).collect();
        let m = MatrixFq::new(field, n, k, entries)?;
        if m.rank() == k {
            return Ok(m);
        }
    }
}

fn random_borel(field: &FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> Result<MatrixFq> {
    let q = field.order();
    let mut m = MatrixFq::zeros(field, n, n);
    for i in 0..n {
        m.set(i, i, rng.gen_range(1..q) as u8);
        for j in i + 1..n {
            m.set(i, j, rng.gen_range(0..q) as u8);
        }
    }
    Ok(m)
}

/// Number of trials where a random Borel element moved a random k-subspace
/// out of its echelon class.
pub fn borel_check(field: &FieldSpec, n: usize, k: usize, seed: u64, trials: usize) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let s = canonicalize(&random_subspace_matrix(field, n, k, &mut rng)?)?;
        let alpha = random_borel(field, n, &mut rng)?;
        if class_of(&apply(&alpha, &s)?) != class_of(&s) {
            failures += 1;
        }
    }
    Ok(failures)
}

/// Parses `args` and runs; errors are reported on stderr.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_BAD_ARGS } else { EXIT_OK };
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
