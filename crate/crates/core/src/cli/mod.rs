//! Command-line front end. [`run`] does all the work and returns the exit
//! code, so the binary is a thin wrapper and tests can drive it in-process.
//!
//! Exit codes: 0 success or verdict match, 1 valid input with a negative
//! verdict, 2 input or usage error.

pub mod input;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::{diagonal_constraints, BracketEntry, StructureConstants};
use crate::catalog::{
    compare_with_expected, family, reproduce_table, FamilyId, Param, TableReport, TableRow,
};
use crate::curvature::{self, JACOBI_TOL};
use crate::error::Error;
use crate::soliton::{best_c, solve_family, SolveOptions, SolveReport};

pub use input::{AlgebraFile, ParseError};
use output::{g6, join_g6, matrix_block, rows, to_json};
pub use output::{CertificateOutput, TOOL_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "nilsoliton",
    version,
    about = "Algebraic Ricci solitons on metric nilpotent Lie algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Residual tolerance for soliton verdicts.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct Search {
    #[arg(long, default_value_t = 64)]
    pub multistarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check whether the metric algebra in a file is an algebraic Ricci soliton.
    Check {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the soliton equations over one catalog family (e.g. 2.4).
    Solve {
        case: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
        /// Parameter pinned to 1 (defaults to the family's own choice).
        #[arg(long)]
        gauge: Option<String>,
        /// Print the comparison with the expected classification row.
        #[arg(long)]
        compare: bool,
    },
    /// Solve every catalog family and compare with the classification table.
    Table {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        search: Search,
    },
    /// Compute the derivation algebra of the algebra in a file.
    Derivations {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Also test the diagonal of Ric - c Id against d_i + d_j = d_k.
        #[arg(long)]
        check_diag: bool,
    },
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
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return if code == 0 { EXIT_OK } else { EXIT_INPUT };
        }
    };
    let result = match cli.command {
        Command::Check { file, common } => cmd_check(&file, &common),
        Command::Solve {
            case,
            common,
            search,
            gauge,
            compare,
        } => cmd_solve(&case, &common, &search, gauge.as_deref(), compare),
        Command::Table { common, search } => cmd_table(&common, &search),
        Command::Derivations {
            file,
            common,
            check_diag,
        } => cmd_derivations(&file, &common, check_diag),
    };
    match result {
        Ok(Outcome { text, code }) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

/// Rendered output and exit code of a successful command.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Algebra { path: String, source: Error },
    #[error("{0}")]
    Usage(String),
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--tol must be positive, got {tol}"
        )))
    }
}

fn load(path: &std::path::Path) -> Result<(AlgebraFile, StructureConstants), CliError> {
    let file = AlgebraFile::read(path)?;
    let in_file = |source| CliError::Algebra {
        path: path.display().to_string(),
        source,
    };
    let alpha = file.structure_constants().map_err(in_file)?;
    alpha.require_lie(JACOBI_TOL).map_err(in_file)?;
    Ok((file, alpha))
}

pub fn cmd_check(path: &std::path::Path, common: &Common) -> Result<Outcome, CliError> {
    check_tol(common.tol)?;
    let (file, alpha) = load(path)?;
    let cert = CertificateOutput::compute(file.name.as_deref(), &alpha, common.tol)?;
    let text = match common.format {
        Format::Json => to_json(&cert),
        Format::Table => cert.render_human(),
    };
    Ok(Outcome {
        text,
        code: if cert.is_soliton {
            EXIT_OK
        } else {
            EXIT_NEGATIVE
        },
    })
}

fn solve_options(common: &Common, search: &Search, gauge: Option<Param>) -> SolveOptions {
    SolveOptions {
        multistarts: search.multistarts,
        seed: search.seed,
        residual_tol: common.tol,
        gauge,
        ..SolveOptions::default()
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    tool_version: &'a str,
    report: &'a SolveReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<&'a TableRow>,
}

pub fn cmd_solve(
    case: &str,
    common: &Common,
    search: &Search,
    gauge: Option<&str>,
    compare: bool,
) -> Result<Outcome, CliError> {
    check_tol(common.tol)?;
    let id: FamilyId = case.parse()?;
    let gauge = gauge.map(str::parse::<Param>).transpose()?;
    let entry = family(id);
    let report = solve_family(&entry, &solve_options(common, search, gauge))?;
    let row = compare_with_expected(&entry, &report);
    let code = if row.pass { EXIT_OK } else { EXIT_NEGATIVE };
    let text = match common.format {
        Format::Json => to_json(&SolveOutput {
            tool_version: TOOL_VERSION,
            report: &report,
            comparison: compare.then_some(&row),
        }),
        Format::Table => render_solve(&report, compare.then_some(&row)),
    };
    Ok(Outcome { text, code })
}

fn params_text(p: &crate::catalog::ParamPoint) -> String {
    p.iter()
        .map(|(k, v)| format!("{k}={}", g6(*v)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_solve(report: &SolveReport, row: Option<&TableRow>) -> String {
    let entry = family(report.family);
    let o = &report.options;
    let mut s = format!("case {}  {}\n", report.family, entry.name);
    s += &format!("domain      {}\n", entry.domain_text());
    s += &format!(
        "gauge       {} = 1   starts {}  seed {}  tol {}\n",
        report.gauge,
        o.multistarts,
        o.seed,
        g6(o.residual_tol)
    );
    s += &format!(
        "converged   {} of {} starts, {} clusters\n",
        report.converged_starts,
        o.multistarts,
        report.clusters.len()
    );
    if report.no_convergence {
        s += &format!(
            "no start converged; best residual {} at {}\n",
            g6(report.best.residual),
            params_text(&report.best.parameters)
        );
    }
    for (n, c) in report.clusters.iter().enumerate() {
        if !c.interior {
            s += &format!(
                "#{}  boundary ({})  c = {}  residual {}  [{} starts, first {}]\n",
                n + 1,
                c.violated.join(", "),
                g6(c.c),
                g6(c.residual),
                c.members,
                c.first_start
            );
            continue;
        }
        let d = c.derivation_matrix();
        let diag: Vec<f64> = (0..d.nrows()).map(|i| d[(i, i)]).collect();
        s += &format!(
            "#{}  interior  [{} starts, first {}]\n    {}\n    c = {}  D diag = ({})  residual {}\n",
            n + 1,
            c.members,
            c.first_start,
            params_text(&c.parameters),
            g6(c.c),
            join_g6(&diag),
            g6(c.residual)
        );
    }
    if let Some(row) = row {
        s += &format!(
            "\nexpected    {}\nfound       {}\nresult      {}\n",
            if row.expected_soliton {
                format!("soliton ({})", row.condition)
            } else {
                "no soliton".to_string()
            },
            if row.found_soliton {
                "soliton"
            } else {
                "no interior solution"
            },
            if row.pass { "match" } else { "MISMATCH" }
        );
        for note in &row.notes {
            s += &format!("note        {note}\n");
        }
    }
    s
}

#[derive(Serialize)]
struct TableOutput<'a> {
    tool_version: &'a str,
    options: SolveOptions,
    #[serde(flatten)]
    report: &'a TableReport,
}

pub fn cmd_table(common: &Common, search: &Search) -> Result<Outcome, CliError> {
    check_tol(common.tol)?;
    let opts = solve_options(common, search, None);
    let report = reproduce_table(&opts)?;
    let code = if report.all_pass {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let text = match common.format {
        Format::Json => to_json(&TableOutput {
            tool_version: TOOL_VERSION,
            options: opts,
            report: &report,
        }),
        Format::Table => render_table(&report),
    };
    Ok(Outcome { text, code })
}

fn render_table(report: &TableReport) -> String {
    let header = [
        "case",
        "soliton?",
        "condition",
        "c",
        "D diagonal",
        "class",
        "residual",
        "result",
    ];
    let mut cells: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
    for r in &report.rows {
        cells.push(vec![
            r.id.to_string(),
            if r.found_soliton { "yes" } else { "no" }.to_string(),
            r.condition.clone(),
            r.c.map(g6).unwrap_or_else(|| "-".into()),
            r.derivation_diag
                .as_ref()
                .map(|d| format!("({})", join_g6(d)))
                .unwrap_or_else(|| "-".into()),
            r.lauret_class.clone().unwrap_or_else(|| "-".into()),
            g6(r.residual),
            if r.pass { "pass" } else { "FAIL" }.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|k| {
            cells
                .iter()
                .map(|r| r[k].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut s = String::new();
    for r in &cells {
        let line: Vec<String> = r
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        s += line.join("  ").trim_end();
        s.push('\n');
    }
    for r in report.rows.iter().filter(|r| !r.notes.is_empty()) {
        s += &format!("{}: {}\n", r.id, r.notes.join("; "));
    }
    s += &format!("{}/{} rows match\n", report.passed, report.total);
    s
}

#[derive(Debug, Serialize)]
pub struct DiagonalCheck {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub d_i: f64,
    pub d_j: f64,
    pub d_k: f64,
    pub residual: f64,
    pub satisfied: bool,
}

#[derive(Debug, Serialize)]
pub struct DerivationsOutput {
    pub tool_version: String,
    pub name: Option<String>,
    pub dim: usize,
    pub der_dim: usize,
    /// Frobenius-orthonormal basis; each element as rows.
    pub basis: Vec<Vec<Vec<f64>>>,
    /// `Ric - c·Id` at the least-squares `c`, as rows.
    pub soliton_candidate: Vec<Vec<f64>>,
    pub c: f64,
    /// Distance from the candidate to its projection onto `Der(g)`.
    pub projection_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<DiagonalReport>,
}

#[derive(Debug, Serialize)]
pub struct DiagonalReport {
    pub diag: Vec<f64>,
    /// Largest off-diagonal entry of the candidate; the check needs it small.
    pub off_diagonal: f64,
    pub constraints: Vec<DiagonalCheck>,
    pub all_satisfied: bool,
}

fn projection_residual(basis: &[DMatrix<f64>], d: &DMatrix<f64>) -> f64 {
    let mut rest = d.clone();
    for b in basis {
        let coef = b.dot(d);
        rest -= b * coef;
    }
    rest.norm()
}

pub fn derivations_report(
    name: Option<&str>,
    alpha: &StructureConstants,
    tol: f64,
    check_diag: bool,
) -> Result<DerivationsOutput, Error> {
    let n = alpha.dim();
    let space = alpha.derivation_space();
    let ric = curvature::ricci_tensor(alpha)?.operator;
    let (c, _) = best_c(alpha)?;
    let d = ric - DMatrix::identity(n, n) * c;
    let diagonal = check_diag.then(|| {
        let diag: Vec<f64> = (0..n).map(|i| d[(i, i)]).collect();
        let mut off_diagonal = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off_diagonal = off_diagonal.max(d[(i, j)].abs());
                }
            }
        }
        let scale = 1.0_f64.max(diag.iter().fold(0.0, |m: f64, x| m.max(x.abs())));
        let constraints: Vec<DiagonalCheck> = diagonal_constraints(alpha, &diag)
            .into_iter()
            .map(|(BracketEntry { i, j, k, .. }, r)| DiagonalCheck {
                i,
                j,
                k,
                d_i: diag[i - 1],
                d_j: diag[j - 1],
                d_k: diag[k - 1],
                residual: r,
                satisfied: r.abs() <= tol * scale,
            })
            .collect();
        let all_satisfied = off_diagonal <= tol * scale && constraints.iter().all(|c| c.satisfied);
        DiagonalReport {
            diag,
            off_diagonal,
            constraints,
            all_satisfied,
        }
    });
    Ok(DerivationsOutput {
        tool_version: TOOL_VERSION.to_string(),
        name: name.map(str::to_string),
        dim: n,
        der_dim: space.dimension,
        projection_residual: projection_residual(&space.basis, &d),
        basis: space.basis.iter().map(rows).collect(),
        soliton_candidate: rows(&d),
        c,
        diagonal,
    })
}

pub fn cmd_derivations(
    path: &std::path::Path,
    common: &Common,
    check_diag: bool,
) -> Result<Outcome, CliError> {
    check_tol(common.tol)?;
    let (file, alpha) = load(path)?;
    let rep = derivations_report(file.name.as_deref(), &alpha, common.tol, check_diag)?;
    let code = match &rep.diagonal {
        Some(d) if !d.all_satisfied => EXIT_NEGATIVE,
        _ => EXIT_OK,
    };
    let text = match common.format {
        Format::Json => to_json(&rep),
        Format::Table => render_derivations(&rep),
    };
    Ok(Outcome { text, code })
}

fn render_derivations(rep: &DerivationsOutput) -> String {
    let title = rep.name.as_deref().unwrap_or("(unnamed)");
    let mut s = format!(
        "algebra  {title}, dim {}\ndim Der(g) = {}\n",
        rep.dim, rep.der_dim
    );
    for (n, b) in rep.basis.iter().enumerate() {
        s += &format!("\nbasis element {}\n", n + 1);
        s += &matrix_block(b);
    }
    s += &format!("\nRic - c Id at c = {}\n", g6(rep.c));
    s += &matrix_block(&rep.soliton_candidate);
    s += &format!("distance to Der(g)  {}\n", g6(rep.projection_residual));
    if let Some(d) = &rep.diagonal {
        s += &format!("\ndiagonal  ({})\n", join_g6(&d.diag));
        if d.off_diagonal > 0.0 {
            s += &format!("largest off-diagonal entry  {}\n", g6(d.off_diagonal));
        }
        for c in &d.constraints {
            s += &format!(
                "d{} + d{} = d{}:  {} + {} = {}   residual {}  {}\n",
                c.i,
                c.j,
                c.k,
                g6(c.d_i),
                g6(c.d_j),
                g6(c.d_k),
                g6(c.residual),
                if c.satisfied { "ok" } else { "VIOLATED" }
            );
        }
        s += if d.all_satisfied {
            "diagonal derivation: yes\n"
        } else {
            "diagonal derivation: no\n"
        };
    }
    s
}
