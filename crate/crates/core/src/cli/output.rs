//! Machine- and human-readable renderings.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::algebra::{BracketEntry, StructureConstants};
use crate::error::Result;
use crate::soliton::{detect_soliton, SolitonType, RESIDUAL_DEFECT_RATIO};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything `check` reports about one algebra. The brackets are included
/// so a saved certificate can be re-checked from its own contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateOutput {
    pub tool_version: String,
    pub name: Option<String>,
    pub dim: usize,
    pub brackets: Vec<BracketEntry>,
    pub tol: f64,
    pub is_soliton: bool,
    pub c: f64,
    pub soliton_type: SolitonType,
    /// Rows of `D = Ric - c·Id`.
    pub derivation: Vec<Vec<f64>>,
    pub eq6_residual_norm: f64,
    pub derivation_defect: f64,
    pub ricci_eigenvalues: Vec<f64>,
    pub ricci: Vec<Vec<f64>>,
    pub jacobi_defect: f64,
    /// `None` when the algebra is not nilpotent.
    pub nilpotency_class: Option<usize>,
    pub lower_central_series: Option<Vec<usize>>,
    pub center_dim: usize,
    pub scalar_curvature: f64,
}

pub fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl CertificateOutput {
    pub fn compute(name: Option<&str>, alpha: &StructureConstants, tol: f64) -> Result<Self> {
        let cert = detect_soliton(alpha, tol)?;
        let lcs = alpha.lower_central_series().ok();
        Ok(Self {
            tool_version: TOOL_VERSION.to_string(),
            name: name.map(str::to_string),
            dim: alpha.dim(),
            brackets: alpha.entries(),
            tol,
            is_soliton: cert.is_soliton,
            c: cert.c,
            soliton_type: cert.soliton_type,
            derivation: rows(&cert.derivation),
            eq6_residual_norm: cert.eq6_residual_norm,
            derivation_defect: cert.derivation_defect,
            ricci_eigenvalues: cert.ricci_eigenvalues,
            scalar_curvature: cert.ricci.trace(),
            ricci: rows(&cert.ricci),
            jacobi_defect: alpha.jacobi_defect(),
            nilpotency_class: lcs.as_ref().map(|l| l.nilpotency_class),
            lower_central_series: lcs.map(|l| l.dims),
            center_dim: alpha.center().dimension,
        })
    }

    /// The verdict implied by the stored norms alone.
    pub fn verdict_from_norms(&self) -> bool {
        self.derivation_defect <= self.tol
            && self.eq6_residual_norm <= RESIDUAL_DEFECT_RATIO * self.tol
    }

    pub fn algebra(&self) -> Result<StructureConstants> {
        StructureConstants::from_brackets(self.dim, &self.brackets)
    }

    pub fn render_human(&self) -> String {
        let mut s = String::new();
        let title = self.name.as_deref().unwrap_or("(unnamed)");
        s += &format!("algebra            {title}, dim {}\n", self.dim);
        s += &format!("jacobi defect      {}\n", g6(self.jacobi_defect));
        match (&self.lower_central_series, self.nilpotency_class) {
            (Some(dims), Some(class)) => {
                s += &format!("lower central      {} (class {class})\n", join_usize(dims));
            }
            _ => s += "lower central      not nilpotent\n",
        }
        s += &format!("center dim         {}\n", self.center_dim);
        s += &format!("scalar curvature   {}\n", g6(self.scalar_curvature));
        s += &format!("Ricci eigenvalues  {}\n", join_g6(&self.ricci_eigenvalues));
        s += &format!(
            "c                  {} ({})\n",
            g6(self.c),
            type_name(self.soliton_type)
        );
        s += "D = Ric - c Id\n";
        s += &matrix_block(&self.derivation);
        s += &format!("derivation defect  {}\n", g6(self.derivation_defect));
        s += &format!("residual norm      {}\n", g6(self.eq6_residual_norm));
        s += &format!(
            "verdict            {} (tol {})\n",
            if self.is_soliton {
                "algebraic Ricci soliton"
            } else {
                "not a soliton"
            },
            g6(self.tol)
        );
        s
    }
}

pub fn type_name(t: SolitonType) -> &'static str {
    match t {
        SolitonType::Shrinking => "shrinking",
        SolitonType::Steady => "steady",
        SolitonType::Expanding => "expanding",
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Six significant digits, `%g` style.
pub fn g6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..6).contains(&exp) {
        trim_zeros(&format!("{:.*}", (5 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

pub fn join_g6(v: &[f64]) -> String {
    v.iter().map(|x| g6(*x)).collect::<Vec<_>>().join(", ")
}

fn join_usize(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" > ")
}

pub fn matrix_block(m: &[Vec<f64>]) -> String {
    let cells: Vec<Vec<String>> = m
        .iter()
        .map(|r| r.iter().map(|x| g6(*x)).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(1);
    let mut s = String::new();
    for r in cells {
        s += "  [";
        s += &r
            .iter()
            .map(|c| format!("{c:>width$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s += "]\n";
    }
    s
}

/// Pretty JSON with a trailing newline. Floats use the shortest decimal that
/// parses back to the same `f64`.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}
