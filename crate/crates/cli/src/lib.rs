//! Command implementations behind the `panelfact` binary.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage, parse or I/O
//! errors, 3 numerical breakdown.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use panelfact::generate::{gen_general, gen_spd};
use panelfact::mmio::{read_matrix, write_matrix};
use panelfact::report::{factorize_oracle, timed_factorize, verify, Factors, Kind, RunReport};
use panelfact::{BlockPolicy, Matrix, MulBackend};

#[derive(Parser, Debug)]
#[command(
    name = "panelfact",
    version,
    about = "Panel-blocked Cholesky, LU and QR with deferred trailing updates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a seeded test matrix in Matrix Market array format.
    Gen(GenArgs),
    /// Factor a matrix file, optionally writing the factors and checking them.
    Decompose(DecomposeArgs),
    /// Time a grid of sizes and backends; one CSV row per cell.
    Bench(BenchArgs),
    /// Check factor files against the original matrix.
    Verify(VerifyArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixKind {
    Spd,
    General,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompKind {
    Cholesky,
    Lu,
    Qr,
}

impl From<DecompKind> for Kind {
    fn from(k: DecompKind) -> Kind {
        match k {
            DecompKind::Cholesky => Kind::Cholesky,
            DecompKind::Lu => Kind::Lu,
            DecompKind::Qr => Kind::Qr,
        }
    }
}

/// `oracle` runs the unblocked reference algorithm.
#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendKind {
    Classical,
    Strassen,
    Oracle,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: MatrixKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long, value_enum)]
    pub kind: DecompKind,
    #[arg(long)]
    pub input: PathBuf,
    /// Fixed panel width, clamped to n.
    #[arg(long, conflicts_with = "policy_exponent")]
    pub s: Option<usize>,
    /// Panel width ceil(n^k).
    #[arg(long)]
    pub policy_exponent: Option<f64>,
    #[arg(long, value_enum, default_value = "classical")]
    pub backend: BackendKind,
    /// Strassen recursion depth.
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
    /// Seed recorded in the report row.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Factor files are written as `<out>_L.mtx`, `<out>_U.mtx`, ...
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Compute residuals (and orthogonality for QR) into the report.
    #[arg(long)]
    pub verify: bool,
    /// Append the report row to this CSV instead of printing it.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub kind: DecompKind,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', conflicts_with = "policy_exponent")]
    pub s: Vec<usize>,
    #[arg(long)]
    pub policy_exponent: Option<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "classical")]
    pub backend: Vec<BackendKind>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub depth: Vec<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeats: u32,
    #[arg(long, default_value_t = 1)]
    pub warmup: u32,
    /// Compute residuals for each cell (untimed).
    #[arg(long)]
    pub verify: bool,
    /// CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub kind: DecompKind,
    #[arg(long)]
    pub input: PathBuf,
    /// Factor files in order (L; L,U; Q,R).
    #[arg(long, value_delimiter = ',', required = true)]
    pub factors: Vec<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(panelfact::Error),
    Csv(csv::Error),
    Io(PathBuf, io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Csv(e) => write!(f, "csv: {e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl From<panelfact::Error> for CliError {
    fn from(e: panelfact::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let out = match cli.command {
        Command::Gen(a) => cmd_gen(&a).map(|_| 0),
        Command::Decompose(a) => cmd_decompose(&a).map(|_| 0),
        Command::Bench(a) => cmd_bench(&a).map(|_| 0),
        Command::Verify(a) => cmd_verify(&a),
    };
    out.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}

pub fn generate(kind: MatrixKind, n: usize, seed: u64) -> panelfact::Result<Matrix> {
    match kind {
        MatrixKind::Spd => gen_spd(n, seed),
        MatrixKind::General => gen_general(n, seed),
    }
}

/// Test input for a decomposition: SPD for Cholesky, general otherwise.
pub fn input_for(kind: Kind, n: usize, seed: u64) -> panelfact::Result<Matrix> {
    generate(
        if kind == Kind::Cholesky {
            MatrixKind::Spd
        } else {
            MatrixKind::General
        },
        n,
        seed,
    )
}

pub fn cmd_gen(a: &GenArgs) -> CliResult<()> {
    if a.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    write_matrix(&a.out, &generate(a.kind, a.n, a.seed)?)?;
    Ok(())
}

fn backend_list(kinds: &[BackendKind], depths: &[u32]) -> Vec<Option<MulBackend>> {
    let mut out = Vec::new();
    for k in kinds {
        match k {
            BackendKind::Classical => out.push(Some(MulBackend::Classical)),
            BackendKind::Strassen => {
                out.extend(depths.iter().map(|&d| Some(MulBackend::strassen(d))))
            }
            BackendKind::Oracle => out.push(None),
        }
    }
    out.dedup();
    out
}

fn policies(s: &[usize], exponent: Option<f64>) -> Vec<BlockPolicy> {
    match exponent {
        Some(k) => vec![BlockPolicy::Exponent(k)],
        None => s.iter().map(|&s| BlockPolicy::Fixed(s)).collect(),
    }
}

pub fn factor_paths(kind: Kind, prefix: &Path) -> Vec<PathBuf> {
    kind.factor_names()
        .iter()
        .map(|tag| {
            let mut name = prefix.as_os_str().to_owned();
            name.push(format!("_{tag}.mtx"));
            PathBuf::from(name)
        })
        .collect()
}

pub fn cmd_decompose(a: &DecomposeArgs) -> CliResult<()> {
    let kind = Kind::from(a.kind);
    let m = read_matrix(&a.input)?;
    let n = m.rows();
    let backend = backend_list(&[a.backend], &[a.depth])[0];
    let (factors, mut report) = match backend {
        None => {
            let t0 = std::time::Instant::now();
            let f = factorize_oracle(kind, &m)?;
            let mut r = RunReport::new(kind, n, None, None);
            r.wall_seconds = t0.elapsed().as_secs_f64();
            (f, r)
        }
        Some(b) => {
            let policy = match policies(a.s.as_slice(), a.policy_exponent).first() {
                Some(p) => *p,
                None => {
                    return Err(CliError::Usage(
                        "one of --s or --policy-exponent is required".into(),
                    ))
                }
            };
            let s = policy.resolve(n);
            let (f, stats, secs) = timed_factorize(kind, &m, &policy, b);
            let f = f?;
            let mut r = RunReport::new(kind, n, Some(s), Some(b));
            r.wall_seconds = secs;
            r.record_stats(kind, &stats);
            (f, r)
        }
    };
    report.seed = a.seed;

    if let Some(prefix) = &a.out {
        for (path, f) in factor_paths(kind, prefix).iter().zip(factors.matrices()) {
            write_matrix(path, f)?;
        }
    }
    if a.verify {
        report.record_verification(&verify(&m, &factors)?);
    }
    match &a.report {
        Some(path) => append_report(path, &report),
        None => {
            let mut w = csv::Writer::from_writer(io::stdout());
            w.serialize(&report)?;
            w.flush().map_err(|e| CliError::Io("<stdout>".into(), e))
        }
    }
}

fn append_report(path: &Path, report: &RunReport) -> CliResult<()> {
    let fresh = std::fs::metadata(path)
        .map(|m| m.len() == 0)
        .unwrap_or(true);
    let file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::Io(path.into(), e))?;
    let mut w = csv::WriterBuilder::new()
        .has_headers(fresh)
        .from_writer(file);
    w.serialize(report)?;
    w.flush().map_err(|e| CliError::Io(path.into(), e))
}

/// One bench cell: input order, panel policy and backend (`None` for the
/// unblocked reference).
#[derive(Debug, Clone, Copy)]
pub struct Cell {
    pub kind: Kind,
    pub n: usize,
    pub policy: Option<BlockPolicy>,
    pub backend: Option<MulBackend>,
}

/// Times `cell` on `a`: `warmup` discarded runs, then the median of
/// `repeats`. Counts and residuals come from the last run.
pub fn run_cell(cell: Cell, a: &Matrix, repeats: u32, warmup: u32, check: bool) -> RunReport {
    let s = cell.policy.map(|p| p.resolve(cell.n));
    let mut report = RunReport::new(cell.kind, cell.n, s, cell.backend);
    let mut times = Vec::with_capacity(repeats as usize);
    let mut last = None;
    for i in 0..warmup + repeats.max(1) {
        let (out, stats, secs) = match (cell.policy, cell.backend) {
            (Some(p), Some(b)) => timed_factorize(cell.kind, a, &p, b),
            _ => {
                let t0 = std::time::Instant::now();
                let f = factorize_oracle(cell.kind, a);
                (f, Default::default(), t0.elapsed().as_secs_f64())
            }
        };
        match out {
            Ok(f) => {
                if i >= warmup {
                    times.push(secs);
                }
                if cell.backend.is_some() {
                    report.record_stats(cell.kind, &stats);
                }
                last = Some(f);
            }
            Err(e) => {
                report.record_stats(cell.kind, &stats);
                report.error = Some(e.to_string());
                return report;
            }
        }
    }
    report.wall_seconds = median(&mut times);
    if check {
        if let Some(f) = &last {
            match verify(a, f) {
                Ok(v) => report.record_verification(&v),
                Err(e) => report.error = Some(e.to_string()),
            }
        }
    }
    report
}

pub fn median(xs: &mut [f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

/// Runs the grid sequentially, handing each finished row to `emit`.
pub fn bench(
    a: &BenchArgs,
    mut emit: impl FnMut(&RunReport) -> CliResult<()>,
) -> CliResult<Vec<RunReport>> {
    let kind = Kind::from(a.kind);
    let backends = backend_list(&a.backend, &a.depth);
    let pols = policies(&a.s, a.policy_exponent);
    if pols.is_empty() && backends.iter().any(Option::is_some) {
        return Err(CliError::Usage(
            "one of --s or --policy-exponent is required".into(),
        ));
    }
    let mut rows = Vec::new();
    for &n in &a.n {
        let m = input_for(kind, n, a.seed)?;
        for &backend in &backends {
            let cell_pols: Vec<Option<BlockPolicy>> = match backend {
                None => vec![None],
                Some(_) => pols.iter().copied().map(Some).collect(),
            };
            for policy in cell_pols {
                let cell = Cell {
                    kind,
                    n,
                    policy,
                    backend,
                };
                let mut r = run_cell(cell, &m, a.repeats, a.warmup, a.verify);
                r.seed = Some(a.seed);
                emit(&r)?;
                rows.push(r);
            }
        }
    }
    Ok(rows)
}

pub fn cmd_bench(a: &BenchArgs) -> CliResult<()> {
    let sink: Box<dyn Write> = match &a.out {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Io(p.clone(), e))?),
        None => Box::new(io::stdout()),
    };
    // header written up front so an all-failed grid still has one
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(sink);
    w.write_record(RunReport::COLUMNS)?;
    bench(a, |r| {
        w.serialize(r)?;
        w.flush().map_err(|e| CliError::Io("<csv>".into(), e))
    })?;
    Ok(())
}

pub fn cmd_verify(a: &VerifyArgs) -> CliResult<i32> {
    let kind = Kind::from(a.kind);
    let m = read_matrix(&a.input)?;
    let parts = a
        .factors
        .iter()
        .map(read_matrix)
        .collect::<panelfact::Result<Vec<_>>>()?;
    let factors = Factors::from_parts(kind, parts)?;
    let v = verify(&m, &factors)?;
    let mut line = format!(
        "kind={kind} n={} residual_rel={:e}",
        m.rows(),
        v.residual_rel
    );
    if let Some(o) = v.orth_rel {
        line.push_str(&format!(" orth_rel={o:e}"));
    }
    line.push_str(&format!(" violations={}", v.violations));
    let ok = v.passes(m.rows());
    println!("{line} {}", if ok { "ok" } else { "FAILED" });
    Ok(if ok { 0 } else { 1 })
}
