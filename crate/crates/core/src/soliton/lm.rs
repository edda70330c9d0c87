//! Damped Gauss-Newton (Levenberg-Marquardt) with a central-difference
//! Jacobian.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct LmConfig {
    pub max_iterations: usize,
    /// Stop once the residual norm drops below this.
    pub target: f64,
}

#[derive(Debug, Clone)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    pub residual_norm: f64,
}

fn sq_norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimizes `|f(x)|^2`. `f` writes the residual vector into its buffer.
pub fn minimize<F>(mut f: F, x0: Vec<f64>, cfg: LmConfig) -> LmOutcome
where
    F: FnMut(&[f64], &mut Vec<f64>),
{
    let nx = x0.len();
    let mut x = x0;
    let mut r = Vec::new();
    f(&x, &mut r);
    let m = r.len();
    let mut cost = sq_norm(&r);
    let mut mu: Option<f64> = None;
    let mut jac = DMatrix::zeros(m, nx);
    let (mut rp, mut rm, mut trial_r) = (Vec::new(), Vec::new(), Vec::new());
    let mut xt = x.clone();
    let mut iterations = 0_usize;

    while iterations < cfg.max_iterations && cost.sqrt() > cfg.target && cost.is_finite() {
        iterations += 1;
        for col in 0..nx {
            let h = 1e-6 * x[col].abs().max(1.0);
            xt.copy_from_slice(&x);
            xt[col] = x[col] + h;
            f(&xt, &mut rp);
            xt[col] = x[col] - h;
            f(&xt, &mut rm);
            for row in 0..m {
                jac[(row, col)] = (rp[row] - rm[row]) / (2.0 * h);
            }
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * DVector::from_column_slice(&r);
        let max_diag = (0..nx).map(|k| jtj[(k, k)]).fold(0.0_f64, f64::max);
        if max_diag == 0.0 {
            break;
        }
        let mut damping = mu.unwrap_or(1e-3 * max_diag);

        let mut accepted = false;
        for _ in 0..30 {
            let mut lhs = jtj.clone();
            for k in 0..nx {
                lhs[(k, k)] += damping * jtj[(k, k)].max(1e-12 * max_diag);
            }
            let step = match lhs.cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => {
                    damping *= 4.0;
                    continue;
                }
            };
            for k in 0..nx {
                xt[k] = x[k] + step[k];
            }
            f(&xt, &mut trial_r);
            let trial = sq_norm(&trial_r);
            if trial.is_finite() && trial < cost {
                let small_step =
                    step.norm() <= 1e-15 * (1.0 + DVector::from_column_slice(&x).norm());
                x.copy_from_slice(&xt);
                std::mem::swap(&mut r, &mut trial_r);
                cost = trial;
                damping = (damping / 3.0).max(1e-15);
                accepted = true;
                if small_step {
                    return LmOutcome {
                        x,
                        residual_norm: cost.sqrt(),
                    };
                }
                break;
            }
            damping *= 4.0;
        }
        mu = Some(damping);
        if !accepted {
            break;
        }
    }
    LmOutcome {
        x,
        residual_norm: cost.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn himmelblau_root() {
        let out = minimize(
            |x, r| {
                r.clear();
                r.push(x[0] * x[0] + x[1] - 11.0);
                r.push(x[0] + x[1] * x[1] - 7.0);
            },
            vec![1.0, 1.0],
            LmConfig {
                max_iterations: 200,
                target: 1e-14,
            },
        );
        assert!(out.residual_norm < 1e-12);
        assert!((out.x[0] - 3.0).abs() < 1e-10 && (out.x[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn overdetermined_rosenbrock() {
        let out = minimize(
            |x, r| {
                r.clear();
                r.push(10.0 * (x[1] - x[0] * x[0]));
                r.push(1.0 - x[0]);
                r.push(0.0);
            },
            vec![-1.2, 1.0],
            LmConfig {
                max_iterations: 500,
                target: 1e-14,
            },
        );
        assert!(out.residual_norm < 1e-10, "{out:?}");
    }
}
