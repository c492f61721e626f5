use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use hpstm::fracseries::SeriesDocument;
use hpstm::report::{
    emit_csv, figure_data, reference_fixtures, resolve_problem, run_comparison, run_sensitivity,
    write_csv, ComparisonConfig, CsvTable, FixtureKind, ProblemFile, ReportError,
};
use hpstm::solvers::{adm_solve, hpstm_solve, SeriesSolution};

#[derive(Parser)]
#[command(
    name = "hpstm",
    version,
    about = "Series and reference solvers for time-fractional PDEs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Bundled example name (example1, example2, example3) or a problem file.
    problem: String,
    /// Fractional order; repeat for several. Defaults to the file's list.
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Number of correction terms.
    #[arg(long)]
    terms: Option<usize>,
    /// Evaluation point `x,t`.
    #[arg(long, value_parser = parse_point, default_value = "1,0.5", allow_hyphen_values = true)]
    point: (f64, f64),
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Hpstm,
    Adm,
}

#[derive(Subcommand)]
enum Command {
    /// Solve with HPSTM or ADM and print the series terms.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "hpstm")]
        method: MethodArg,
    },
    /// Compare all methods at a point and join the published values.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Collocation centers for the RBF comparator.
        #[arg(long, default_value_t = 100)]
        rbf_centers: usize,
        /// Shape parameter for the RBF comparator.
        #[arg(long, default_value_t = 0.1)]
        rbf_eps: f64,
        /// Spatial intervals and time steps for the FDM comparator.
        #[arg(long, default_value_t = 100)]
        fdm_grid: usize,
    },
    /// Value, residual and term ratios over orders and term counts.
    Sensitivity {
        #[command(flatten)]
        common: Common,
        /// Term counts to compare.
        #[arg(long = "n", default_values_t = [3usize, 5, 7])]
        ns: Vec<usize>,
        /// Add a wall-clock column (makes output nondeterministic).
        #[arg(long)]
        timing: bool,
    },
    /// `u(x, t)` for t in 0, 0.01, …, 1 with one column per order.
    Figures {
        #[command(flatten)]
        common: Common,
    },
    /// Print every transcribed table value.
    Fixtures {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (x, t) = s.split_once(',').ok_or("expected `x,t`")?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((num(x)?, num(t)?))
}

struct Loaded {
    file: ProblemFile,
    alphas: Vec<f64>,
    terms: usize,
}

fn load(common: &Common) -> Result<Loaded, ReportError> {
    let file = resolve_problem(&common.problem)?;
    let alphas = if common.alphas.is_empty() {
        file.alphas.clone()
    } else {
        common.alphas.clone()
    };
    let terms = common.terms.unwrap_or(file.terms);
    Ok(Loaded {
        file,
        alphas,
        terms,
    })
}

fn output<T: CsvTable>(table: &T, out: Option<&Path>) -> Result<(), ReportError> {
    match out {
        Some(path) => emit_csv(table, path),
        None => write_csv(table, std::io::stdout().lock()),
    }
}

fn print_solution(
    sol: &SeriesSolution,
    point: (f64, f64),
    out: &mut impl Write,
) -> Result<(), ReportError> {
    writeln!(
        out,
        "{} α = {} ({}, n = {})",
        sol.problem_name,
        sol.alpha,
        sol.method.label(),
        sol.n_terms
    )?;
    for (k, term) in sol.terms.iter().enumerate() {
        writeln!(out, "  u{k} = {term}")?;
    }
    writeln!(
        out,
        "  u({}, {}) = {}",
        point.0,
        point.1,
        sol.evaluate(point.0, point.1)?
    )?;
    if let Some(w) = &sol.warning {
        writeln!(out, "  warning: {w}")?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), ReportError> {
    match cli.command {
        Command::Solve { common, method } => {
            let l = load(&common)?;
            let mut stdout = std::io::stdout().lock();
            let mut docs: Vec<SeriesDocument> = Vec::new();
            for &alpha in &l.alphas {
                let p = l.file.problem.with_alpha(alpha);
                let sol = match method {
                    MethodArg::Hpstm => hpstm_solve(&p, l.terms)?,
                    MethodArg::Adm => adm_solve(&p, l.terms)?,
                };
                print_solution(&sol, common.point, &mut stdout)?;
                docs.push((&sol.partial_sum).into());
            }
            if let Some(path) = &common.out {
                // a JSON array with one series document per order
                let text = serde_json::to_string_pretty(&docs).expect("plain data serializes");
                std::fs::write(path, text + "\n")?;
            }
        }
        Command::Compare {
            common,
            rbf_centers,
            rbf_eps,
            fdm_grid,
        } => {
            let l = load(&common)?;
            let cfg = ComparisonConfig {
                terms: l.terms,
                fdm_nx: fdm_grid,
                fdm_nt: fdm_grid,
                rbf_centers,
                rbf_eps,
                ..ComparisonConfig::default()
            };
            let report = run_comparison(&l.file.problem, &l.alphas, common.point, &cfg)?;
            for f in &report.failures {
                eprintln!(
                    "note: {} at α = {} unavailable: {}",
                    f.method, f.alpha, f.error
                );
            }
            output(&report, common.out.as_deref())?;
        }
        Command::Sensitivity { common, ns, timing } => {
            let l = load(&common)?;
            let mut report = run_sensitivity(&l.file.problem, &l.alphas, &ns, common.point)?;
            report.include_timing = timing;
            output(&report, common.out.as_deref())?;
        }
        Command::Figures { common } => {
            let l = load(&common)?;
            let data = figure_data(&l.file.problem, &l.alphas, common.point.0, l.terms)?;
            output(&data, common.out.as_deref())?;
        }
        Command::Fixtures { out } => output(&FixtureTable, out.as_deref())?,
    }
    Ok(())
}

struct FixtureTable;

impl CsvTable for FixtureTable {
    fn header(&self) -> Vec<String> {
        [
            "table", "label", "example", "kind", "alpha", "method", "value",
        ]
        .map(String::from)
        .to_vec()
    }

    fn records(&self) -> Vec<Vec<String>> {
        reference_fixtures()
            .into_iter()
            .map(|f| {
                let kind = match f.kind {
                    FixtureKind::Value => "value",
                    FixtureKind::AbsError => "abs_error",
                };
                vec![
                    f.table.to_string(),
                    f.label,
                    f.example.to_string(),
                    kind.to_string(),
                    format!("{:.1}", f.alpha),
                    f.method,
                    f.value.to_string(),
                ]
            })
            .collect()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli).context("hpstm failed") {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let input = e
                .downcast_ref::<ReportError>()
                .is_some_and(ReportError::is_input_error);
            ExitCode::from(if input { 2 } else { 3 })
        }
    }
}
