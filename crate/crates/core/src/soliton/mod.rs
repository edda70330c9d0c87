//! Algebraic Ricci soliton detection: `Ric = c·Id + D` with `D` a derivation.
//!
//! The soliton residual below is the structure-constant form of that
//! equation. Its `(t, p, q)` component equals the `t`-component of the
//! derivation defect of `Ric - c·Id` on the ordered pair `(q, p)`, so its norm
//! is `√2` times [`StructureConstants::derivation_defect`] (which sums over
//! `i < j` only).

mod lm;
pub mod solve;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::algebra::StructureConstants;
use crate::curvature;
use crate::error::{Error, Result};

pub use solve::{solve_family, FamilySolution, SolveOptions, SolveReport};

/// Ratio between the residual-tensor norm and the `i < j` derivation defect.
pub const RESIDUAL_DEFECT_RATIO: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolitonType {
    Shrinking,
    Steady,
    Expanding,
}

impl SolitonType {
    pub fn from_constant(c: f64, tol: f64) -> Self {
        if c.abs() <= tol {
            SolitonType::Steady
        } else if c < 0.0 {
            SolitonType::Expanding
        } else {
            SolitonType::Shrinking
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonCertificate {
    pub is_soliton: bool,
    pub c: f64,
    /// `Ric - c·Id`; column `i` is `D(E_i)`.
    pub derivation: DMatrix<f64>,
    pub eq6_residual_norm: f64,
    pub derivation_defect: f64,
    pub ricci_eigenvalues: Vec<f64>,
    pub soliton_type: SolitonType,
    pub ricci: DMatrix<f64>,
}

/// Residual tensor indexed `(t, p, q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualTensor {
    dim: usize,
    pub values: Vec<f64>,
    pub norm: f64,
}

impl ResidualTensor {
    fn new(dim: usize, values: Vec<f64>) -> Self {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self { dim, values, norm }
    }

    pub fn get(&self, t: usize, p: usize, q: usize) -> f64 {
        let n = self.dim;
        self.values[(t * n + p) * n + q]
    }
}

/// Soliton residual, transcribed term by term from the structure-constant
/// form of the soliton equation. Every `(t, p, q)` component vanishes iff
/// `Ric - c·Id` is a derivation. `O(n^6)`; see [`eq6_residual_factored`] for
/// the contracted form used inside solvers.
pub fn eq6_residual(alpha: &StructureConstants, c: f64) -> ResidualTensor {
    let n = alpha.dim();
    let a = |x: usize, y: usize, z: usize| alpha.get(x, y, z);
    let mut out = vec![0.0; n * n * n];
    for t in 0..n {
        for p in 0..n {
            for q in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        for r in 0..n {
                            s += 2.0
                                * a(r, j, j)
                                * (a(i, q, t) * (a(p, r, i) + a(i, p, r) - a(r, i, p))
                                    - a(i, p, t) * (a(q, r, i) + a(i, q, r) - a(r, i, q)));
                            s += 2.0
                                * (a(r, j, i) + a(i, r, j) - a(j, i, r))
                                * (a(i, p, t) * a(q, j, r) - a(i, q, t) * a(p, j, r));
                            s += (a(j, r, i) + a(i, j, r) - a(r, i, j))
                                * (a(i, p, t) * (a(q, j, r) + a(r, q, j) - a(j, r, q))
                                    - a(i, q, t) * (a(p, j, r) + a(r, p, j) - a(j, r, p)));
                            s -= 2.0
                                * a(p, q, i)
                                * a(r, j, j)
                                * (a(i, r, t) + a(t, i, r) - a(r, t, i));
                            s += 2.0
                                * a(p, q, i)
                                * a(i, j, r)
                                * (a(r, j, t) + a(t, r, j) - a(j, t, r));
                            s += a(p, q, i)
                                * (a(i, j, r) + a(r, i, j) - a(j, r, i))
                                * (a(j, r, t) + a(t, j, r) - a(r, t, j));
                        }
                    }
                }
                out[(t * n + p) * n + q] = c * a(q, p, t) + 0.25 * s;
            }
        }
    }
    ResidualTensor::new(n, out)
}

/// Precomputed contractions of the residual, independent of `c`.
///
/// Grouping the triple sum by the factor that carries the free indices
/// gives, with `tr_r = sum_j alpha_{rjj}`,
///
/// ```text
/// 4 (T_tpq - c alpha_qpt) = sum_i  alpha_{iqt} (U_pi - W_ip) - alpha_{ipt} (U_qi - W_iq)
///                                + alpha_{pqi} P_it
/// ```
///
/// so a whole evaluation is `O(n^4)`.
pub struct ResidualContractions {
    dim: usize,
    u: Vec<f64>,
    w: Vec<f64>,
    p: Vec<f64>,
}

impl ResidualContractions {
    pub fn new(alpha: &StructureConstants) -> Self {
        let n = alpha.dim();
        let a = |x: usize, y: usize, z: usize| alpha.get(x, y, z);
        let tr = alpha.unimodularity();
        let idx = |x: usize, y: usize| x * n + y;
        let mut u = vec![0.0; n * n];
        let mut w = vec![0.0; n * n];
        let mut p = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                // Both trace groups share sum_r tr_r (a_xry + a_yxr - a_ryx):
                // U[p][i] takes it at (p, i) with factor 2, P4[i][t] at (i, t)
                // with factor -2.
                let mut st = 0.0;
                for (r, &tr_r) in tr.iter().enumerate() {
                    if tr_r != 0.0 {
                        st += tr_r * (a(x, r, y) + a(y, x, r) - a(r, y, x));
                    }
                }
                u[idx(x, y)] = 2.0 * st;
                // W[i][q] = sum_{j,r} 2 C_rji a_qjr + E_jri F_qjr, at (x=i, y=q)
                // P5 + P6 at (x=i, y=t)
                let mut sw = 0.0;
                let mut s56 = 0.0;
                for j in 0..n {
                    for r in 0..n {
                        let c_rji = a(r, j, x) + a(x, r, j) - a(j, x, r);
                        let e_jri = a(j, r, x) + a(x, j, r) - a(r, x, j);
                        let f_qjr = a(y, j, r) + a(r, y, j) - a(j, r, y);
                        sw += 2.0 * c_rji * a(y, j, r) + e_jri * f_qjr;
                        let h_rjt = a(r, j, y) + a(y, r, j) - a(j, y, r);
                        let i_ijr = a(x, j, r) + a(r, x, j) - a(j, r, x);
                        let j_jrt = a(j, r, y) + a(y, j, r) - a(r, y, j);
                        s56 += 2.0 * a(x, j, r) * h_rjt + i_ijr * j_jrt;
                    }
                }
                w[idx(x, y)] = sw;
                p[idx(x, y)] = -2.0 * st + s56;
            }
        }
        Self { dim: n, u, w, p }
    }

    /// Residual values for constant `c`, written into `out` as `(t, p, q)`.
    pub fn evaluate_into(&self, alpha: &StructureConstants, c: f64, out: &mut Vec<f64>) {
        let n = self.dim;
        let a = |x: usize, y: usize, z: usize| alpha.get(x, y, z);
        let idx = |x: usize, y: usize| x * n + y;
        out.clear();
        out.resize(n * n * n, 0.0);
        for t in 0..n {
            for p in 0..n {
                for q in 0..n {
                    let mut s = 0.0;
                    for i in 0..n {
                        s += a(i, q, t) * (self.u[idx(p, i)] - self.w[idx(i, p)])
                            - a(i, p, t) * (self.u[idx(q, i)] - self.w[idx(i, q)])
                            + a(p, q, i) * self.p[idx(i, t)];
                    }
                    out[(t * n + p) * n + q] = c * a(q, p, t) + 0.25 * s;
                }
            }
        }
    }
}

/// Same tensor as [`eq6_residual`], evaluated through [`ResidualContractions`].
pub fn eq6_residual_factored(alpha: &StructureConstants, c: f64) -> ResidualTensor {
    let mut out = Vec::new();
    ResidualContractions::new(alpha).evaluate_into(alpha, c, &mut out);
    ResidualTensor::new(alpha.dim(), out)
}

/// The derivation `D = Ric - c·Id` in closed form from the structure
/// constants; column `i` holds `D(E_i)`.
pub fn eq7_derivation(alpha: &StructureConstants, c: f64) -> DMatrix<f64> {
    let n = alpha.dim();
    let a = |x: usize, y: usize, z: usize| alpha.get(x, y, z);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for l in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                for r in 0..n {
                    s += 2.0 * a(r, j, j) * (a(i, r, l) + a(l, i, r) - a(r, l, i))
                        - 2.0 * a(i, j, r) * (a(r, j, l) + a(l, r, j) - a(j, l, r))
                        - (a(i, j, r) + a(r, i, j) - a(j, r, i))
                            * (a(j, r, l) + a(l, j, r) - a(r, l, j));
                }
            }
            d[(l, i)] = 0.25 * s;
        }
        d[(i, i)] -= c;
    }
    d
}

/// Least-squares soliton constant: the defect of `Ric - c·Id` is affine in
/// `c`, so the minimizer solves a one-variable normal equation. Returns
/// `(c, defect at c)`; `c = 0` when the defect does not depend on `c`.
pub fn best_c(alpha: &StructureConstants) -> Result<(f64, f64)> {
    let ric = curvature::ricci_tensor(alpha)?;
    best_c_for(alpha, &ric.operator)
}

fn best_c_for(alpha: &StructureConstants, ric: &DMatrix<f64>) -> Result<(f64, f64)> {
    let n = alpha.dim();
    let base = alpha.derivation_defect_tensor(ric)?;
    // Defect of Id on (i, j) is -[E_i, E_j], so defect(Ric - c Id) = base + c·alpha.
    let slope: Vec<f64> = (0..n)
        .flat_map(|i| ((i + 1)..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .map(|(i, j, k)| alpha.get(i, j, k))
        .collect();
    let bb: f64 = slope.iter().map(|v| v * v).sum();
    let c = if bb > 0.0 {
        -base.iter().zip(&slope).map(|(x, y)| x * y).sum::<f64>() / bb
    } else {
        0.0
    };
    let defect = base
        .iter()
        .zip(&slope)
        .map(|(x, y)| (x + c * y).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((c, defect))
}

/// Decides whether the metric is an algebraic Ricci soliton. Both the
/// residual tensor and the derivation defect of `Ric - c·Id` are evaluated
/// at the least-squares `c`; they must agree.
pub fn detect_soliton(alpha: &StructureConstants, tol: f64) -> Result<SolitonCertificate> {
    alpha.require_lie(tol.max(curvature::JACOBI_TOL))?;
    let ric = curvature::ricci_tensor(alpha)?.operator;
    let (c, _) = best_c_for(alpha, &ric)?;
    let n = alpha.dim();
    let derivation = &ric - DMatrix::identity(n, n) * c;
    let defect = alpha.derivation_defect(&derivation)?;
    let eq6 = eq6_residual(alpha, c).norm;

    let scaled = RESIDUAL_DEFECT_RATIO * defect;
    if (eq6 - scaled).abs() > 1e-9 * (1.0 + eq6.max(scaled)) {
        return Err(Error::OracleDisagreement { eq6, defect });
    }
    let by_defect = defect <= tol;
    let by_eq6 = eq6 <= RESIDUAL_DEFECT_RATIO * tol;
    if by_defect != by_eq6 {
        return Err(Error::OracleDisagreement { eq6, defect });
    }

    let mut ricci_eigenvalues: Vec<f64> = SymmetricEigen::new(ric.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ricci_eigenvalues.sort_by(|x, y| x.total_cmp(y));
    Ok(SolitonCertificate {
        is_soliton: by_defect,
        c,
        derivation,
        eq6_residual_norm: eq6,
        derivation_defect: defect,
        ricci_eigenvalues,
        soliton_type: SolitonType::from_constant(c, tol),
        ricci: ric,
    })
}
