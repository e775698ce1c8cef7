use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lowrank_core::bounds::column_bounds;
use lowrank_core::oracles::kahan_matrix;
use lowrank_core::submatrix::{verify_maxvol_bounds, verify_trace};
use lowrank_core::{
    evaluate_skeleton, greedy_pivoted_qr_baseline, select_columns, select_skeleton_cross,
    select_skeleton_projective, select_skeleton_spectral, select_submatrix, Complex64, Matrix, MatrixF64,
    RrqrParams, Scalar, Surrogate,
};
use serde::Serialize;

use crate::error::CliError;
use crate::io::{load, Format, Input, InputDigest};
use crate::report::{CommandInfo, Indices, RunReport};

#[derive(Debug, Parser)]
#[command(name = "lowrank", version, about = "Column, skeleton and submatrix selection with error bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pick r columns of A against a rank-r surrogate.
    SelectColumns(SelectColumnsArgs),
    /// Pick r rows and r columns and report the skeleton error.
    Skeleton(SkeletonArgs),
    /// Pick an r x r submatrix of an r x N matrix with orthonormal rows.
    Submatrix(SubmatrixArgs),
    /// Relative errors on Kahan matrices of size r+1, as CSV.
    BenchKahan(BenchKahanArgs),
}

#[derive(Debug, Args)]
pub struct SurrogateArgs {
    /// Dense rank-r surrogate Z, same shape as the input.
    #[arg(long, value_name = "PATH", conflicts_with = "svd")]
    pub surrogate: Option<PathBuf>,
    /// Use the truncated SVD of the input (the default).
    #[arg(long)]
    pub svd: bool,
}

#[derive(Debug, Args)]
pub struct SelectColumnsArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub rank: usize,
    #[command(flatten)]
    pub surrogate: SurrogateArgs,
    /// Input format; inferred from the extension when absent.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Projective,
    Cross,
    Spectral,
}

#[derive(Debug, Args)]
pub struct SkeletonArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub rank: usize,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Exchange threshold of strong RRQR (spectral mode only), default 2.
    #[arg(long)]
    pub rho: Option<f64>,
    #[command(flatten)]
    pub surrogate: SurrogateArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SubmatrixArgs {
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchKahanArgs {
    #[arg(long, default_value_t = 0.8)]
    pub c: f64,
    #[arg(long, default_value_t = 40)]
    pub rmax: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Rendered output of a command.
pub struct Output {
    pub text: String,
    pub out: Option<PathBuf>,
    /// Every reported bound held.
    pub passed: bool,
}

/// Scalars an input file can be read into.
trait FromInput: Scalar<Real = f64> {
    fn from_input(input: Input) -> Result<Matrix<Self>, CliError>;
}

impl FromInput for f64 {
    fn from_input(input: Input) -> Result<MatrixF64, CliError> {
        match input {
            Input::Real(a) => Ok(a),
            Input::Complex(_) => Err(CliError::Usage("complex surrogate for a real matrix".into())),
        }
    }
}

impl FromInput for Complex64 {
    fn from_input(input: Input) -> Result<Matrix<Complex64>, CliError> {
        Ok(match input {
            Input::Real(a) => a.to_complex(),
            Input::Complex(a) => a,
        })
    }
}

pub fn execute(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::SelectColumns(a) => select_columns_cmd(a),
        Command::Skeleton(a) => skeleton_cmd(a),
        Command::Submatrix(a) => submatrix_cmd(a),
        Command::BenchKahan(a) => bench_kahan(a),
    }
}

fn info(name: &str, options: &[(&str, String)]) -> CommandInfo {
    CommandInfo {
        name: name.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        options: options.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
    }
}

fn surrogate_option(s: &SurrogateArgs) -> String {
    s.surrogate.as_ref().map_or("svd".into(), |p| p.display().to_string())
}

fn load_surrogate<T: FromInput>(s: &SurrogateArgs, format: Option<Format>) -> Result<Surrogate<T>, CliError> {
    match &s.surrogate {
        Some(path) => Ok(Surrogate::Dense(T::from_input(load(path, format)?.matrix)?)),
        None => Ok(Surrogate::BestRank),
    }
}

fn finish(mut report: RunReport, start: Instant, out: &Option<PathBuf>) -> Output {
    report.wall_time_secs = start.elapsed().as_secs_f64();
    log::info!("{} finished in {:.3}s", report.command.name, report.wall_time_secs);
    Output {
        passed: report.bounds_passed,
        text: report.to_json() + "\n",
        out: out.clone(),
    }
}

fn select_columns_cmd(args: &SelectColumnsArgs) -> Result<Output, CliError> {
    let start = Instant::now();
    let loaded = load(&args.input, args.format)?;
    let cmd = info(
        "select-columns",
        &[("rank", args.rank.to_string()), ("surrogate", surrogate_option(&args.surrogate))],
    );
    let report = match loaded.matrix {
        Input::Real(a) => columns_report(&a, args, cmd, loaded.digest)?,
        Input::Complex(a) => columns_report(&a, args, cmd, loaded.digest)?,
    };
    Ok(finish(report, start, &args.out))
}

fn columns_report<T: FromInput>(
    a: &Matrix<T>,
    args: &SelectColumnsArgs,
    cmd: CommandInfo,
    digest: InputDigest,
) -> Result<RunReport, CliError> {
    let z = load_surrogate(&args.surrogate, args.format)?;
    let (sel, _) = select_columns(a, &z, args.rank)?;
    let rep = column_bounds(&sel, a.shape(), a.fro_norm());
    Ok(RunReport::new(cmd, digest, Indices::from_zero_based(None, &sel.indices), rep))
}

fn skeleton_cmd(args: &SkeletonArgs) -> Result<Output, CliError> {
    let start = Instant::now();
    if args.mode == Mode::Spectral && args.surrogate.surrogate.is_some() {
        return Err(CliError::Usage("spectral mode takes no surrogate".into()));
    }
    if args.mode != Mode::Spectral && args.rho.is_some() {
        return Err(CliError::Usage("--rho applies to spectral mode only".into()));
    }
    let loaded = load(&args.input, args.format)?;
    let mut opts = vec![
        ("rank", args.rank.to_string()),
        ("mode", format!("{:?}", args.mode).to_lowercase()),
    ];
    if args.mode == Mode::Spectral {
        opts.push(("rho", args.rho.unwrap_or(RrqrParams::default().rho).to_string()));
    } else {
        opts.push(("surrogate", surrogate_option(&args.surrogate)));
    }
    let cmd = info("skeleton", &opts);
    let report = match loaded.matrix {
        Input::Real(a) => skeleton_report(&a, args, cmd, loaded.digest)?,
        Input::Complex(a) => skeleton_report(&a, args, cmd, loaded.digest)?,
    };
    Ok(finish(report, start, &args.out))
}

fn skeleton_report<T: FromInput>(
    a: &Matrix<T>,
    args: &SkeletonArgs,
    cmd: CommandInfo,
    digest: InputDigest,
) -> Result<RunReport, CliError> {
    let r = args.rank;
    let sel = match args.mode {
        Mode::Spectral => {
            let params = match args.rho {
                Some(rho) => RrqrParams::new(rho)?,
                None => RrqrParams::default(),
            };
            select_skeleton_spectral(a, r, params)?
        }
        Mode::Projective => select_skeleton_projective(a, &load_surrogate(&args.surrogate, args.format)?, r)?,
        Mode::Cross => select_skeleton_cross(a, &load_surrogate(&args.surrogate, args.format)?, r)?,
    };
    let mut rep = evaluate_skeleton(a, &sel)?;
    if let Some(gap) = sel.identity_gap {
        rep.value("identity_gap", gap);
    }
    if let Some(z) = sel.surrogate_err {
        rep.value("surrogate_fro", z.fro);
        rep.value("surrogate_spec", z.spec);
    }
    let idx = Indices::from_zero_based(Some(&sel.row_indices), &sel.col_indices);
    Ok(RunReport::new(cmd, digest, idx, rep))
}

fn submatrix_cmd(args: &SubmatrixArgs) -> Result<Output, CliError> {
    let start = Instant::now();
    let loaded = load(&args.input, args.format)?;
    let cmd = info("submatrix", &[]);
    let report = match loaded.matrix {
        Input::Real(v) => submatrix_report(&v, cmd, loaded.digest)?,
        Input::Complex(v) => submatrix_report(&v, cmd, loaded.digest)?,
    };
    Ok(finish(report, start, &args.out))
}

fn submatrix_report<T: Scalar<Real = f64>>(
    v: &Matrix<T>,
    cmd: CommandInfo,
    digest: InputDigest,
) -> Result<RunReport, CliError> {
    let sel = select_submatrix(v)?;
    let mut rep = verify_maxvol_bounds(v, &sel.col_indices)?;
    rep.extend(verify_trace(&sel, v.cols()));
    rep.value("defect", sel.defect);
    Ok(RunReport::new(cmd, digest, Indices::from_zero_based(None, &sel.col_indices), rep))
}

#[derive(Debug, Serialize)]
struct KahanRow {
    r: usize,
    ratio_alg1: f64,
    ratio_pivqr: f64,
    bound_sqrt_r_plus_1: f64,
}

fn bench_kahan(args: &BenchKahanArgs) -> Result<Output, CliError> {
    if args.rmax == 0 {
        return Err(CliError::Usage("--rmax must be at least 1".into()));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut passed = true;
    for r in 1..=args.rmax {
        let a: MatrixF64 = kahan_matrix(r + 1, args.c)?;
        let (sel, _) = select_columns(&a, &Surrogate::BestRank, r)?;
        let tail = sel.surrogate_err.expect("known for the truncated SVD").fro;
        let base = greedy_pivoted_qr_baseline(&a, r)?;
        let row = KahanRow {
            r,
            ratio_alg1: sel.err_proj.fro / tail,
            ratio_pivqr: base.err_proj.fro / tail,
            bound_sqrt_r_plus_1: ((r + 1) as f64).sqrt(),
        };
        passed &= row.ratio_alg1 <= row.bound_sqrt_r_plus_1 * (1.0 + 1e-8);
        w.serialize(&row).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(Output {
        text: String::from_utf8(bytes).expect("csv is UTF-8"),
        out: args.out.clone(),
        passed,
    })
}

/// Writes the output and maps the result onto the process exit code.
pub fn run(cli: &Cli) -> i32 {
    use crate::error::{EXIT_BOUND_VIOLATION, EXIT_OK};
    let result = execute(&cli.command).and_then(|o| {
        write_output(&o.text, o.out.as_deref())?;
        Ok(o.passed)
    });
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("warning: at least one bound is violated, see the report");
            EXIT_BOUND_VIOLATION
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}
