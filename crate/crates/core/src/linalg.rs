//! Rank and nullspace decisions by singular-value thresholding.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff: a value counts as zero when it is below
/// `DEFAULT_RANK_TOL * sigma_max`.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

fn threshold(values: &DVector<f64>, rel_tol: f64) -> f64 {
    let max = values.iter().cloned().fold(0.0_f64, f64::max);
    rel_tol * max
}

/// Orthonormal basis of the column space of `m`.
pub fn range_basis(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    range_basis_anchored(m, rel_tol, 0.0)
}

/// As [`range_basis`], with the cutoff taken relative to
/// `max(sigma_max, anchor)`.
pub fn range_basis_anchored(m: &DMatrix<f64>, rel_tol: f64, anchor: f64) -> Vec<DVector<f64>> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return Vec::new();
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let cut = threshold(&svd.singular_values, rel_tol).max(rel_tol * anchor);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cut && s > 0.0)
        .map(|(idx, _)| u.column(idx).into_owned())
        .collect()
}

pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    range_basis(m, rel_tol).len()
}

/// Orthonormal basis of `{x : m x = 0}`.
pub fn nullspace(m: &DMatrix<f64>, rel_tol: f64) -> Vec<DVector<f64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // Pad to at least square so that V^T carries the full column space.
    let padded = if m.nrows() < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let cut = threshold(&svd.singular_values, rel_tol);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= cut || s == 0.0)
        .map(|(idx, _)| v_t.row(idx).transpose())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nullspace_of_rank_one() {
        let m = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let ns = nullspace(&m, DEFAULT_RANK_TOL);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!((&m * v).norm() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_matrix_is_all_kernel() {
        let m = DMatrix::zeros(4, 3);
        assert_eq!(nullspace(&m, DEFAULT_RANK_TOL).len(), 3);
        assert_eq!(rank(&m, DEFAULT_RANK_TOL), 0);
    }

    #[test]
    fn range_of_wide_matrix() {
        let m = DMatrix::from_row_slice(2, 4, &[1.0, 2.0, 0.0, 0.0, 2.0, 4.0, 0.0, 0.0]);
        assert_eq!(rank(&m, DEFAULT_RANK_TOL), 1);
    }
}
