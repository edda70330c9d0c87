//! Structure constants of a metric Lie algebra in an orthonormal basis.
//!
//! `[E_i, E_j] = sum_k alpha[i][j][k] E_k`. Indices are 0-based here; every
//! file and command-line surface uses 1-based indices.

use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, DEFAULT_RANK_TOL};

/// One supplied bracket coefficient, 1-based, with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub value: f64,
}

impl BracketEntry {
    pub fn new(i: usize, j: usize, k: usize, value: f64) -> Self {
        Self { i, j, k, value }
    }
}

/// Dense antisymmetric structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    data: Vec<f64>,
}

/// Dimensions of the lower central series `g, [g,g], [g,[g,g]], ..., 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceChain {
    pub dims: Vec<usize>,
    pub nilpotency_class: usize,
}

/// Orthonormal basis of the center.
#[derive(Debug, Clone)]
pub struct Center {
    pub dimension: usize,
    pub basis: Vec<DVector<f64>>,
}

/// Frobenius-orthonormal basis of `Der(g)`.
#[derive(Debug, Clone)]
pub struct DerivationSpace {
    pub dimension: usize,
    pub basis: Vec<DMatrix<f64>>,
}

impl StructureConstants {
    pub fn zero(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::NonPositiveDim);
        }
        Ok(Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        })
    }

    pub fn from_brackets(dim: usize, entries: &[BracketEntry]) -> Result<Self> {
        let mut out = Self::zero(dim)?;
        let mut seen = HashSet::new();
        for e in entries {
            let (i, j, k) = (e.i, e.j, e.k);
            if i == 0 || j == 0 || k == 0 || i > dim || j > dim || k > dim {
                return Err(Error::IndexOutOfRange { i, j, k, dim });
            }
            if i >= j {
                return Err(Error::NotUpperPair { i, j });
            }
            if !seen.insert((i, j, k)) {
                return Err(Error::DuplicateEntry { i, j, k });
            }
            out.set_pair(i - 1, j - 1, k - 1, e.value);
        }
        Ok(out)
    }

    /// Builds constants from `f(i, j, k)` evaluated on `i < j` (0-based);
    /// the lower half is filled by antisymmetry.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut out = Self::zero(dim)?;
        for i in 0..dim {
            for j in (i + 1)..dim {
                for k in 0..dim {
                    out.set_pair(i, j, k, f(i, j, k));
                }
            }
        }
        Ok(out)
    }

    fn set_pair(&mut self, i: usize, j: usize, k: usize, value: f64) {
        let n = self.dim;
        self.data[(i * n + j) * n + k] = value;
        self.data[(j * n + i) * n + k] = -value;
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `alpha_{ijk}`, 0-based.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.data[(i * n + j) * n + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Nonzero upper-pair entries, 1-based.
    pub fn entries(&self) -> Vec<BracketEntry> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    if v != 0.0 {
                        out.push(BracketEntry::new(i + 1, j + 1, k + 1, v));
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm_squared(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }

    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        let n = self.dim;
        let mut z = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                let w = xi * yj;
                if w == 0.0 {
                    continue;
                }
                for (k, zk) in z.iter_mut().enumerate() {
                    *zk += w * self.get(i, j, k);
                }
            }
        }
        Ok(z)
    }

    /// `[E_i, v]` for a basis vector `E_i`.
    fn ad_basis(&self, i: usize, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        let mut z = vec![0.0; n];
        for (j, &vj) in v.iter().enumerate() {
            if vj == 0.0 {
                continue;
            }
            for (k, zk) in z.iter_mut().enumerate() {
                *zk += vj * self.get(i, j, k);
            }
        }
        z
    }

    /// Largest Euclidean norm of the Jacobiator over basis triples.
    pub fn jacobi_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        // [E_a, [E_b, E_c]] = sum_l alpha_{bcl} [E_a, E_l]
        let nested = |a: usize, b: usize, c: usize, m: usize| -> f64 {
            (0..n).map(|l| self.get(b, c, l) * self.get(a, l, m)).sum()
        };
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let mut sq = 0.0;
                    for m in 0..n {
                        let v = nested(i, j, k, m) + nested(j, k, i, m) + nested(k, i, j, m);
                        sq += v * v;
                    }
                    worst = worst.max(sq.sqrt());
                }
            }
        }
        worst
    }

    /// Default Jacobi acceptance threshold, relative to the squared size of
    /// the constants.
    pub fn jacobi_tolerance(&self, tol: f64) -> f64 {
        tol * self.max_abs().max(1.0).powi(2)
    }

    pub fn require_lie(&self, tol: f64) -> Result<()> {
        let defect = self.jacobi_defect();
        if defect > self.jacobi_tolerance(tol) {
            return Err(Error::NotALieAlgebra { defect });
        }
        Ok(())
    }

    pub fn lower_central_series(&self) -> Result<SubspaceChain> {
        self.lower_central_series_with_tol(DEFAULT_RANK_TOL)
    }

    pub fn lower_central_series_with_tol(&self, rel_tol: f64) -> Result<SubspaceChain> {
        let n = self.dim;
        let mut dims = vec![n];
        let mut basis: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                e
            })
            .collect();
        loop {
            let mut cols = Vec::with_capacity(n * basis.len() * n);
            let mut count = 0;
            for i in 0..n {
                for v in &basis {
                    cols.extend(self.ad_basis(i, v));
                    count += 1;
                }
            }
            let stacked = DMatrix::from_column_slice(n, count, &cols);
            // Images are bounded by the size of the constants; anchoring the
            // cutoff there keeps rounding noise out of the rank.
            let next = linalg::range_basis_anchored(&stacked, rel_tol, self.max_abs());
            let d = next.len();
            let prev = *dims.last().unwrap();
            dims.push(d);
            if d == 0 {
                break;
            }
            if d >= prev {
                return Err(Error::NotNilpotent { dims });
            }
            basis = next
                .into_iter()
                .map(|v| v.iter().cloned().collect())
                .collect();
        }
        let nilpotency_class = dims.iter().filter(|&&d| d > 0).count();
        Ok(SubspaceChain {
            dims,
            nilpotency_class,
        })
    }

    pub fn center(&self) -> Center {
        self.center_with_tol(DEFAULT_RANK_TOL)
    }

    /// Kernel of `x -> ad x`, i.e. of the `n^2 x n` matrix with entry
    /// `((j,k), i) = alpha_{ijk}`.
    pub fn center_with_tol(&self, rel_tol: f64) -> Center {
        let n = self.dim;
        let m = DMatrix::from_fn(n * n, n, |row, i| self.get(i, row / n, row % n));
        let basis = linalg::nullspace(&m, rel_tol);
        Center {
            dimension: basis.len(),
            basis,
        }
    }

    /// `t_r = sum_j alpha_{rjj} = tr(ad E_r)`.
    pub fn unimodularity(&self) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|r| (0..n).map(|j| self.get(r, j, j)).sum())
            .collect()
    }

    /// Components of `D[E_i,E_j] - [D E_i, E_j] - [E_i, D E_j]` for `i < j`,
    /// laid out as `(pair, k)`. Column `i` of `d` is `D(E_i)`.
    pub fn derivation_defect_tensor(&self, d: &DMatrix<f64>) -> Result<Vec<f64>> {
        let n = self.dim;
        if d.nrows() != n || d.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: if d.nrows() != n { d.nrows() } else { d.ncols() },
            });
        }
        let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2 * n);
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let mut v = 0.0;
                    for l in 0..n {
                        v += d[(k, l)] * self.get(i, j, l);
                        v -= d[(l, i)] * self.get(l, j, k);
                        v -= d[(l, j)] * self.get(i, l, k);
                    }
                    out.push(v);
                }
            }
        }
        Ok(out)
    }

    pub fn derivation_defect(&self, d: &DMatrix<f64>) -> Result<f64> {
        Ok(self
            .derivation_defect_tensor(d)?
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt())
    }

    /// Matrix of the linear map `D -> defect tensor`, columns indexed by
    /// `D[(a, b)]` at `a * n + b`.
    pub fn derivation_system(&self) -> DMatrix<f64> {
        let n = self.dim;
        let pairs = n * (n - 1) / 2;
        let mut m = DMatrix::zeros(pairs * n, n * n);
        let mut row = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    for l in 0..n {
                        m[(row, k * n + l)] += self.get(i, j, l);
                        m[(row, l * n + i)] -= self.get(l, j, k);
                        m[(row, l * n + j)] -= self.get(i, l, k);
                    }
                    row += 1;
                }
            }
        }
        m
    }

    pub fn derivation_space(&self) -> DerivationSpace {
        self.derivation_space_with_tol(DEFAULT_RANK_TOL)
    }

    pub fn derivation_space_with_tol(&self, rel_tol: f64) -> DerivationSpace {
        let n = self.dim;
        let basis: Vec<DMatrix<f64>> = if n == 1 {
            vec![DMatrix::from_element(1, 1, 1.0)]
        } else {
            linalg::nullspace(&self.derivation_system(), rel_tol)
                .into_iter()
                .map(|v| DMatrix::from_row_slice(n, n, v.as_slice()))
                .collect()
        };
        DerivationSpace {
            dimension: basis.len(),
            basis,
        }
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            return Err(Error::ZeroScale);
        }
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * lambda).collect(),
        })
    }

    /// Constants in the basis `F_a = sum_i q[(i, a)] E_i`; `q` must be
    /// orthogonal for the new basis to stay orthonormal.
    pub fn change_basis(&self, q: &DMatrix<f64>) -> Result<Self> {
        let n = self.dim;
        if q.nrows() != n || q.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: q.nrows(),
            });
        }
        // Contract one index at a time.
        let mut t1 = vec![0.0; n * n * n];
        for a in 0..n {
            for j in 0..n {
                for k in 0..n {
                    t1[(a * n + j) * n + k] = (0..n).map(|i| q[(i, a)] * self.get(i, j, k)).sum();
                }
            }
        }
        let mut t2 = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    t2[(a * n + b) * n + k] =
                        (0..n).map(|j| q[(j, b)] * t1[(a * n + j) * n + k]).sum();
                }
            }
        }
        let mut data = vec![0.0; n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    data[(a * n + b) * n + c] =
                        (0..n).map(|k| q[(k, c)] * t2[(a * n + b) * n + k]).sum();
                }
            }
        }
        Ok(Self { dim: n, data })
    }
}

/// Checks whether `diag(d)` is a derivation via `d_i + d_j = d_k` on every
/// nonzero `alpha_{ijk}`; returns each constraint with its residual (1-based).
pub fn diagonal_constraints(alpha: &StructureConstants, diag: &[f64]) -> Vec<(BracketEntry, f64)> {
    alpha
        .entries()
        .into_iter()
        .map(|e| {
            let r = diag[e.i - 1] + diag[e.j - 1] - diag[e.k - 1];
            (e, r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heis5(m: f64) -> StructureConstants {
        StructureConstants::from_brackets(5, &[BracketEntry::new(1, 2, 3, m)]).unwrap()
    }

    fn e(n: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        v
    }

    #[test]
    fn from_brackets_completes_antisymmetrically() {
        let a = StructureConstants::from_brackets(3, &[BracketEntry::new(1, 2, 3, 1.0)]).unwrap();
        assert_eq!(a.get(0, 1, 2), 1.0);
        assert_eq!(a.get(1, 0, 2), -1.0);
        assert_eq!(a.as_slice().iter().filter(|v| **v != 0.0).count(), 2);
    }

    #[test]
    fn from_brackets_errors() {
        assert_eq!(
            StructureConstants::from_brackets(0, &[]),
            Err(Error::NonPositiveDim)
        );
        assert!(matches!(
            StructureConstants::from_brackets(3, &[BracketEntry::new(1, 4, 2, 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            StructureConstants::from_brackets(3, &[BracketEntry::new(0, 2, 2, 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            StructureConstants::from_brackets(3, &[BracketEntry::new(2, 2, 1, 1.0)]),
            Err(Error::NotUpperPair { .. })
        ));
        let dup = [
            BracketEntry::new(1, 2, 3, 1.0),
            BracketEntry::new(1, 2, 3, 2.0),
        ];
        assert_eq!(
            StructureConstants::from_brackets(3, &dup),
            Err(Error::DuplicateEntry { i: 1, j: 2, k: 3 })
        );
    }

    #[test]
    fn abelian_is_zero() {
        let a = StructureConstants::from_brackets(5, &[]).unwrap();
        assert!(a.is_abelian());
        assert_eq!(a.jacobi_defect(), 0.0);
        assert_eq!(a.unimodularity(), vec![0.0; 5]);
    }

    #[test]
    fn bracket_of_basis_vectors() {
        let a = heis5(1.0);
        assert_eq!(a.bracket(&e(5, 0), &e(5, 1)).unwrap(), e(5, 2));
        let x = [0.3, -1.0, 2.0, 0.5, 0.1];
        assert!(a.bracket(&x, &x).unwrap().iter().all(|v| v.abs() < 1e-15));
        assert!(matches!(
            a.bracket(&[1.0], &x),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn jacobi_detects_non_lie() {
        // [E1,E2]=E1, [E1,E3]=E2: Jacobiator on (1,2,3) is -E2.
        let a = StructureConstants::from_brackets(
            3,
            &[
                BracketEntry::new(1, 2, 1, 1.0),
                BracketEntry::new(1, 3, 2, 1.0),
            ],
        )
        .unwrap();
        assert!((a.jacobi_defect() - 1.0).abs() < 1e-15);
        assert!(matches!(
            a.require_lie(1e-9),
            Err(Error::NotALieAlgebra { .. })
        ));
    }

    #[test]
    fn series_of_abelian_and_heisenberg() {
        let a = StructureConstants::zero(4).unwrap();
        let chain = a.lower_central_series().unwrap();
        assert_eq!(chain.dims, vec![4, 0]);
        assert_eq!(chain.nilpotency_class, 1);

        let h = heis5(2.0);
        let chain = h.lower_central_series().unwrap();
        assert_eq!(chain.dims, vec![5, 1, 0]);
        assert_eq!(chain.nilpotency_class, 2);
    }

    #[test]
    fn non_nilpotent_series_stalls() {
        // [E1,E2]=E2: [g,g] = span{E2} = [g,[g,g]].
        let a = StructureConstants::from_brackets(2, &[BracketEntry::new(1, 2, 2, 1.0)]).unwrap();
        assert_eq!(
            a.lower_central_series(),
            Err(Error::NotNilpotent {
                dims: vec![2, 1, 1]
            })
        );
        assert_eq!(a.unimodularity(), vec![1.0, 0.0]);
    }

    #[test]
    fn center_of_heisenberg_sum() {
        let c = heis5(1.0).center();
        assert_eq!(c.dimension, 3);
        for v in &c.basis {
            assert!(v[0].abs() < 1e-12 && v[1].abs() < 1e-12);
        }
        assert_eq!(StructureConstants::zero(5).unwrap().center().dimension, 5);
    }

    #[test]
    fn derivation_defect_examples() {
        let a = heis5(1.0);
        let zero = DMatrix::zeros(5, 5);
        assert_eq!(a.derivation_defect(&zero).unwrap(), 0.0);
        // Id: defect on (1,2) is -[E1,E2] = -E3.
        let id = DMatrix::identity(5, 5);
        assert!((a.derivation_defect(&id).unwrap() - 1.0).abs() < 1e-15);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 2.0, 1.5, 1.5]));
        assert_eq!(a.derivation_defect(&d).unwrap(), 0.0);
        assert!(matches!(
            a.derivation_defect(&DMatrix::zeros(4, 4)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn derivation_space_dimensions() {
        // Values frozen from an independent dense-nullspace computation.
        assert_eq!(heis5(1.0).derivation_space().dimension, 16);
        let h3 = StructureConstants::from_brackets(3, &[BracketEntry::new(1, 2, 3, 1.0)]).unwrap();
        assert_eq!(h3.derivation_space().dimension, 6);
        assert_eq!(
            StructureConstants::zero(5)
                .unwrap()
                .derivation_space()
                .dimension,
            25
        );
        assert_eq!(
            StructureConstants::zero(1)
                .unwrap()
                .derivation_space()
                .dimension,
            1
        );
    }

    #[test]
    fn scale_multiplies_constants() {
        let a = heis5(1.0);
        assert_eq!(a.scale(2.0).unwrap(), heis5(2.0));
        assert_eq!(a.scale(1.0).unwrap(), a);
        assert_eq!(a.scale(0.0), Err(Error::ZeroScale));
    }

    #[test]
    fn diagonal_constraint_listing() {
        let a = StructureConstants::from_brackets(
            5,
            &[
                BracketEntry::new(1, 2, 5, 1.0),
                BracketEntry::new(3, 4, 5, 1.0),
            ],
        )
        .unwrap();
        let cons = diagonal_constraints(&a, &[1.5, 1.5, 1.5, 1.5, 3.0]);
        assert_eq!(cons.len(), 2);
        assert!(cons.iter().all(|(_, r)| r.abs() < 1e-15));
    }
}
