//! The `regsimplex` command line.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |---|---|
//! | 0 | success |
//! | 1 | I/O, parse or usage error |
//! | 2 | the verifier rejected the coordinates |
//! | 3 | the requested Hadamard order is not available |
//!
//! Summary lines go to standard output, data to `--out`, diagnostics to
//! standard error. Nothing is written to `--out` when the exit code is
//! nonzero.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{self, BoundReport};
use crate::error::Error;
use crate::hadamard::{best_recipe, OrderRegistry};
use crate::ohat::PivotMode;
use crate::planner::{self, PlanConfig, Planner, Strategy, DEFAULT_PHASE_GRID};
use crate::simplex::{self, SimplexEmbedding, Tolerances, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_UNAVAILABLE: i32 = 3;

/// Environment variable holding the default seed.
pub const SEED_ENV: &str = "REGSIMPLEX_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "regsimplex",
    version,
    about = "Large origin-centred regular simplices inside the unit cube"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build the best simplex found for one dimension and verify it
    Construct(ConstructArgs),
    /// Check a coordinate file (JSON or CSV)
    Verify(VerifyArgs),
    /// Print closed-form bounds for one dimension or a range
    Bounds(BoundsArgs),
    /// Dump a Hadamard matrix from the registry
    Hadamard(HadamardArgs),
    /// Construct every dimension in a range and tabulate edge ratios
    Sweep(SweepArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Hadamard,
    Fourier,
    Reduce,
    Double,
}

impl StrategyArg {
    fn strategy(self) -> Option<Strategy> {
        match self {
            StrategyArg::Auto => None,
            StrategyArg::Hadamard => Some(Strategy::Hadamard),
            StrategyArg::Fourier => Some(Strategy::Fourier),
            StrategyArg::Reduce => Some(Strategy::Reduce),
            StrategyArg::Double => Some(Strategy::Double),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PivotArg {
    Heuristic,
    Exhaustive,
}

impl From<PivotArg> for PivotMode {
    fn from(p: PivotArg) -> Self {
        match p {
            PivotArg::Heuristic => PivotMode::Heuristic,
            PivotArg::Exhaustive => PivotMode::Exhaustive,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MatrixFormat {
    Json,
    Text,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

#[derive(Args, Debug, Clone)]
pub struct ToleranceArgs {
    /// Relative spread allowed in pairwise distances
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    pub tol_regularity: f64,
    /// How far a coordinate may exceed 1/2
    #[arg(long, default_value_t = 1e-12, value_parser = positive)]
    pub tol_contain: f64,
    /// Max-abs allowed for the vertex average
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    pub tol_barycenter: f64,
    /// Relative error allowed in the circumradius
    #[arg(long, default_value_t = 1e-8, value_parser = positive)]
    pub tol_circumradius: f64,
}

impl ToleranceArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            regularity: self.tol_regularity,
            barycenter: self.tol_barycenter,
            containment: self.tol_contain,
            circumradius: self.tol_circumradius,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    #[arg(long, value_enum, default_value_t = PivotArg::Heuristic)]
    pub pivot: PivotArg,
    /// Also try a per-column Fourier phase grid
    #[arg(long)]
    pub phase_grid: bool,
    /// Offsets the phase grid; 0 keeps it aligned
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
}

impl SearchArgs {
    fn config(&self, strategy: Option<Strategy>) -> PlanConfig {
        PlanConfig {
            pivot: self.pivot.into(),
            phase_grid: self.phase_grid.then_some(DEFAULT_PHASE_GRID),
            strategy,
            seed: self.seed,
            ..PlanConfig::default()
        }
    }
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    pub strategy: StrategyArg,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long, value_enum, default_value_t = DataFormat::Json)]
    pub format: DataFormat,
    /// Coordinates (JSON also embeds the plan)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the construction plan as JSON here
    #[arg(long)]
    pub plan_out: Option<PathBuf>,
    #[command(flatten)]
    pub tol: ToleranceArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub tol: ToleranceArgs,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("range").required(true).args(["dim", "from"]))]
pub struct BoundsArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: Option<u64>,
    #[arg(long, requires = "to", value_parser = clap::value_parser!(u64).range(1..))]
    pub from: Option<u64>,
    #[arg(long, requires = "from")]
    pub to: Option<u64>,
    #[arg(long, value_enum, default_value_t = DataFormat::Json)]
    pub format: DataFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HadamardArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub order: u64,
    #[arg(long, value_enum, default_value_t = MatrixFormat::Json)]
    pub format: MatrixFormat,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub from: u64,
    #[arg(long)]
    pub to: u64,
    #[command(flatten)]
    pub search: SearchArgs,
    /// CSV destination; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::Hadamard(a) => cmd_hadamard(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::UnsupportedOrder { .. } => EXIT_UNAVAILABLE,
                _ => EXIT_ERROR,
            }
        }
    }
}

type CmdResult = Result<i32, Error>;

fn to_usize(v: u64) -> Result<usize, Error> {
    usize::try_from(v).map_err(|_| Error::Domain(format!("{v} does not fit in memory")))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    std::fs::write(path, bytes).map_err(Error::from)
}

fn print_report(
    out: &mut dyn Write,
    r: &VerificationReport,
    tol: &Tolerances,
) -> Result<(), Error> {
    writeln!(out, "regularity_spread={:e}", r.regularity_spread)?;
    writeln!(out, "barycenter_norm={:e}", r.barycenter_norm)?;
    writeln!(out, "containment_margin={:e}", r.containment_margin)?;
    writeln!(out, "circumradius_error={:e}", r.circumradius_error)?;
    let failures = r.failures(tol);
    if failures.is_empty() {
        writeln!(out, "pass")?;
    } else {
        writeln!(out, "FAIL: {}", failures.join(", "))?;
    }
    Ok(())
}

pub fn cmd_construct(a: &ConstructArgs, out: &mut dyn Write) -> CmdResult {
    let n = to_usize(a.dim)?;
    let planner = Planner::new(a.search.config(a.strategy.strategy()));
    let (plan, matrix) = planner.plan_with_matrix(n)?;
    let embedding = simplex::extract(&matrix)?;
    let tol = a.tol.tolerances();
    let report = simplex::verify(&embedding, &tol)?;
    writeln!(
        out,
        "n={n} edge={} ratio={} upper={} strategy={}",
        embedding.edge_length(),
        embedding.edge_ratio(),
        bounds::upper_bound(n),
        plan.strategy
    )?;
    if !report.pass || !report.failures(&tol).is_empty() {
        print_report(out, &report, &tol)?;
        return Ok(EXIT_VERIFY);
    }
    if let Some(path) = &a.out {
        let bytes = match a.format {
            DataFormat::Json => {
                let mut v: serde_json::Value =
                    serde_json::from_str(&embedding.to_json()).expect("valid JSON");
                v["plan"] = serde_json::to_value(&plan).expect("plans serialise");
                let mut s = serde_json::to_string(&v).expect("valid JSON");
                s.push('\n');
                s.into_bytes()
            }
            DataFormat::Csv => {
                let mut buf = Vec::new();
                embedding.write_csv(&mut buf)?;
                buf
            }
        };
        write_file(path, &bytes)?;
    }
    if let Some(path) = &a.plan_out {
        write_file(path, plan.to_json().as_bytes())?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let embedding = SimplexEmbedding::load(&a.input)?;
    let tol = a.tol.tolerances();
    let report = simplex::verify(&embedding, &tol)?;
    writeln!(
        out,
        "n={} edge={}",
        embedding.dim(),
        embedding.edge_length()
    )?;
    print_report(out, &report, &tol)?;
    Ok(if report.failures(&tol).is_empty() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    })
}

pub fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> CmdResult {
    let (lo, hi) = match (a.dim, a.from, a.to) {
        (Some(n), _, _) => (n, n),
        (None, Some(lo), Some(hi)) if lo <= hi => (lo, hi),
        _ => return Err(Error::Domain("need --dim or --from ≤ --to".into())),
    };
    let reports = (to_usize(lo)?..=to_usize(hi)?)
        .map(bounds::bound_report)
        .collect::<Result<Vec<BoundReport>, Error>>()?;
    let mut data = Vec::new();
    match a.format {
        DataFormat::Json => {
            for r in &reports {
                serde_json::to_writer(&mut data, r).expect("reports serialise");
                data.push(b'\n');
            }
        }
        DataFormat::Csv => bounds::write_csv(&reports, &mut data)?,
    }
    match &a.out {
        Some(path) => {
            write_file(path, &data)?;
            writeln!(out, "constant={}", bounds::theorem1_constant())?;
            writeln!(out, "wrote {} rows to {}", reports.len(), path.display())?;
        }
        None => {
            if a.format == DataFormat::Json {
                writeln!(out, "constant={}", bounds::theorem1_constant())?;
            }
            out.write_all(&data)?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_hadamard(a: &HadamardArgs, out: &mut dyn Write) -> CmdResult {
    let order = to_usize(a.order)?;
    let Some(recipe) = best_recipe(order) else {
        writeln!(out, "order {order}: unavailable")?;
        return Ok(EXIT_UNAVAILABLE);
    };
    let h = OrderRegistry::global().generate(order)?;
    writeln!(out, "order {order}: {recipe}")?;
    match a.format {
        MatrixFormat::Json => {
            serde_json::to_writer(&mut *out, &h.to_rows()).expect("rows serialise");
            writeln!(out)?;
        }
        MatrixFormat::Text => out.write_all(h.to_text().as_bytes())?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_sweep(a: &SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let records = planner::sweep(to_usize(a.from)?, to_usize(a.to)?, &a.search.config(None))?;
    let mut data = Vec::new();
    planner::write_sweep_csv(&records, &mut data)?;
    let worst = records
        .iter()
        .min_by(|x, y| x.edge_ratio.total_cmp(&y.edge_ratio))
        .expect("non-empty range");
    let summary = format!(
        "swept n={}..{} min_ratio={} at n={}",
        a.from, a.to, worst.edge_ratio, worst.n
    );
    match &a.out {
        Some(path) => {
            write_file(path, &data)?;
            writeln!(out, "{summary}")?;
        }
        None => {
            out.write_all(&data)?;
            writeln!(err, "{summary}")?;
        }
    }
    Ok(EXIT_OK)
}
