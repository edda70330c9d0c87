//! Curvature of a left-invariant metric, computed from first principles.
//!
//! Sign convention: `R(X,Y)Z = ∇_X∇_Y Z - ∇_Y∇_X Z - ∇_[X,Y] Z` and
//! `ric(X,Y) = sum_i <R(E_i,X)Y, E_i>`.

use nalgebra::DMatrix;

use crate::algebra::StructureConstants;
use crate::error::{Error, Result};

/// Jacobi tolerance (relative to `max|alpha|^2`) used by the curvature entry
/// points.
pub const JACOBI_TOL: f64 = 1e-9;

/// `gamma[i][j][k] = <∇_{E_i} E_j, E_k>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoefficients {
    dim: usize,
    data: Vec<f64>,
}

impl ConnectionCoefficients {
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.data[(i * n + j) * n + k]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RicciData {
    /// The (0,2) tensor in the orthonormal basis.
    pub ric: DMatrix<f64>,
    /// The (1,1) tensor; equal to `ric` entrywise in an orthonormal basis.
    pub operator: DMatrix<f64>,
    pub scalar: f64,
}

impl RicciData {
    fn from_ric(ric: DMatrix<f64>) -> Self {
        let scalar = ric.trace();
        Self {
            operator: ric.clone(),
            ric,
            scalar,
        }
    }
}

/// Koszul formula: `gamma_{ijk} = (alpha_{ijk} - alpha_{jki} + alpha_{kij}) / 2`.
pub fn connection_coefficients(alpha: &StructureConstants) -> ConnectionCoefficients {
    let n = alpha.dim();
    let mut data = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                data[(i * n + j) * n + k] =
                    0.5 * (alpha.get(i, j, k) - alpha.get(j, k, i) + alpha.get(k, i, j));
            }
        }
    }
    ConnectionCoefficients { dim: n, data }
}

/// General Ricci tensor through the full curvature tensor. Accepts
/// non-unimodular algebras.
pub fn ricci_tensor(alpha: &StructureConstants) -> Result<RicciData> {
    alpha.require_lie(JACOBI_TOL)?;
    let n = alpha.dim();
    let g = connection_coefficients(alpha);
    // ric(x,y) = sum_i <R(E_i,E_x)E_y, E_i>, with
    // <R(E_a,E_b)E_c, E_l> = sum_k g_{bck} g_{akl} - g_{ack} g_{bkl} - alpha_{abk} g_{kcl}.
    let riemann = |a: usize, b: usize, c: usize, l: usize| -> f64 {
        let mut v = 0.0;
        for k in 0..n {
            v += g.get(b, c, k) * g.get(a, k, l);
            v -= g.get(a, c, k) * g.get(b, k, l);
            v -= alpha.get(a, b, k) * g.get(k, c, l);
        }
        v
    };
    let mut ric = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            ric[(x, y)] = (0..n).map(|i| riemann(i, x, y, i)).sum();
        }
    }
    Ok(RicciData::from_ric(ric))
}

/// Closed-form Ricci tensor for unimodular algebras:
/// `ric_pq = -1/2 sum alpha_{pij} alpha_{qij} + 1/4 sum alpha_{ijp} alpha_{ijq}`.
pub fn ricci_nilpotent_oracle(alpha: &StructureConstants) -> Result<RicciData> {
    let trace = alpha
        .unimodularity()
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    if trace > JACOBI_TOL * alpha.max_abs().max(1.0) {
        return Err(Error::NotUnimodular { trace });
    }
    let n = alpha.dim();
    let ric = DMatrix::from_fn(n, n, |p, q| {
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                v += -0.5 * alpha.get(p, i, j) * alpha.get(q, i, j)
                    + 0.25 * alpha.get(i, j, p) * alpha.get(i, j, q);
            }
        }
        v
    });
    Ok(RicciData::from_ric(ric))
}

pub fn scalar_curvature(alpha: &StructureConstants) -> Result<f64> {
    Ok(ricci_tensor(alpha)?.scalar)
}
