//! Multistart solve of the soliton conditions over a parametrized family.
//!
//! The unknowns are the free family parameters and `c`; the gauge parameter
//! is pinned to one, which loses nothing because `(alpha, c, D)` and
//! `(λ·alpha, λ²c, λ²D)` are solitons together. Families without an interior
//! solution are reported as such from numerical evidence only.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lm::{self, LmConfig};
use super::{best_c, eq7_derivation, ResidualContractions};
use crate::catalog::{positive_count, FamilyEntry, FamilyId, Param, ParamPoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub multistarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub residual_tol: f64,
    pub domain_margin: f64,
    /// `None` selects the family's default gauge.
    pub gauge: Option<Param>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            multistarts: 64,
            seed: 0,
            max_iterations: 200,
            residual_tol: 1e-10,
            domain_margin: 1e-4,
            gauge: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if self.multistarts == 0 {
            return Err(Error::InvalidOptions(
                "multistarts must be at least 1".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidOptions(
                "max_iterations must be at least 1".into(),
            ));
        }
        let positive = |v: f64| v > 0.0;
        if !positive(self.residual_tol) || !positive(self.domain_margin) {
            return Err(Error::InvalidOptions("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// One cluster of converged starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySolution {
    pub parameters: ParamPoint,
    pub c: f64,
    /// `D` at the solution, as rows.
    pub derivation: Vec<Vec<f64>>,
    pub residual: f64,
    pub interior: bool,
    /// Domain predicates violated at the solution, rendered as text.
    pub violated: Vec<String>,
    pub members: usize,
    pub first_start: usize,
}

impl FamilySolution {
    pub fn derivation_matrix(&self) -> DMatrix<f64> {
        let n = self.derivation.len();
        DMatrix::from_fn(n, n, |i, j| self.derivation[i][j])
    }

    pub fn accepted(&self, tol: f64) -> bool {
        self.interior && self.residual <= tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub family: FamilyId,
    pub gauge: Param,
    pub options: SolveOptions,
    /// Clusters in order of their first start index.
    pub clusters: Vec<FamilySolution>,
    /// Starts whose final residual was within `100 * residual_tol`.
    pub converged_starts: usize,
    /// No start reached `100 * residual_tol`; `best` is still reported.
    pub no_convergence: bool,
    pub best: FamilySolution,
}

impl SolveReport {
    pub fn interior_solutions(&self) -> impl Iterator<Item = &FamilySolution> {
        let tol = self.options.residual_tol;
        self.clusters.iter().filter(move |c| c.accepted(tol))
    }

    pub fn has_interior_solution(&self) -> bool {
        self.interior_solutions().next().is_some()
    }

    /// The interior solution with the most positive parameters (earliest on
    /// ties).
    pub fn canonical(&self) -> Option<&FamilySolution> {
        let mut best: Option<&FamilySolution> = None;
        for s in self.interior_solutions() {
            if best.is_none_or(|b| positive_count(&s.parameters) > positive_count(&b.parameters)) {
                best = Some(s);
            }
        }
        best
    }
}

struct StartResult {
    theta: ParamPoint,
    c: f64,
    residual: f64,
    start: usize,
}

const CLUSTER_RADIUS: f64 = 1e-6;
const START_MIN: f64 = 0.25;
const START_MAX: f64 = 3.0;

fn assemble(entry: &FamilyEntry, gauge: Param, free: &[Param], x: &[f64]) -> ParamPoint {
    let mut theta = ParamPoint::new();
    for &p in &entry.param_names {
        theta.insert(p, 0.0);
    }
    theta.insert(gauge, 1.0);
    for (p, v) in free.iter().zip(x) {
        theta.insert(*p, *v);
    }
    entry.complete(&mut theta);
    theta
}

fn residual_into(entry: &FamilyEntry, theta: &ParamPoint, c: f64, out: &mut Vec<f64>) {
    let alpha = entry.build(theta);
    ResidualContractions::new(&alpha).evaluate_into(&alpha, c, out);
}

fn run_start(
    entry: &FamilyEntry,
    gauge: Param,
    free: &[Param],
    opts: &SolveOptions,
    k: usize,
) -> StartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(k as u64);
    let mut x: Vec<f64> = free
        .iter()
        .map(|&p| {
            // Magnitudes stay away from zero, where most families degenerate
            // into a neighbour with a continuum of boundary solutions.
            let v: f64 = rng.gen_range(START_MIN..START_MAX);
            if entry.requires_nonnegative(p) || rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect();
    let theta0 = assemble(entry, gauge, free, &x);
    let c0 = best_c(&entry.build(&theta0)).map(|(c, _)| c).unwrap_or(0.0);
    x.push(c0);

    let nfree = free.len();
    let out = lm::minimize(
        |z, r| {
            let theta = assemble(entry, gauge, free, &z[..nfree]);
            residual_into(entry, &theta, z[nfree], r);
        },
        x,
        LmConfig {
            max_iterations: opts.max_iterations,
            target: 1e-3 * opts.residual_tol,
        },
    );
    StartResult {
        theta: assemble(entry, gauge, free, &out.x[..nfree]),
        c: out.x[nfree],
        residual: out.residual_norm,
        start: k,
    }
}

fn distance(a: &StartResult, b: &StartResult) -> f64 {
    let mut s = (a.c - b.c).powi(2);
    for (k, v) in &a.theta {
        s += (v - b.theta.get(k).copied().unwrap_or(0.0)).powi(2);
    }
    s.sqrt()
}

fn to_solution(
    entry: &FamilyEntry,
    r: &StartResult,
    members: usize,
    opts: &SolveOptions,
) -> FamilySolution {
    let alpha = entry.build(&r.theta);
    let d = eq7_derivation(&alpha, r.c);
    FamilySolution {
        parameters: r.theta.clone(),
        c: r.c,
        derivation: d
            .row_iter()
            .map(|row| row.iter().copied().collect())
            .collect(),
        residual: r.residual,
        interior: entry.is_interior(&r.theta, opts.domain_margin),
        violated: entry
            .violations(&r.theta, opts.domain_margin)
            .iter()
            .map(|c| c.to_string())
            .collect(),
        members,
        first_start: r.start,
    }
}

pub fn solve_family(entry: &FamilyEntry, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    if entry.param_names.is_empty() {
        return Err(Error::InvalidOptions(format!(
            "family {} has no parameters",
            entry.id
        )));
    }
    let gauge = opts.gauge.unwrap_or(entry.default_gauge);
    entry.check_gauge(gauge)?;
    let free = entry.free_params(gauge);

    let results: Vec<StartResult> = (0..opts.multistarts)
        .into_par_iter()
        .map(|k| run_start(entry, gauge, &free, opts, k))
        .collect();

    let converged_tol = 1e2 * opts.residual_tol;
    // (representative, member count), in order of first start.
    let mut groups: Vec<(usize, usize, usize)> = Vec::new(); // (first, best, members)
    for (idx, r) in results.iter().enumerate() {
        if r.residual.is_nan() || r.residual > converged_tol {
            continue;
        }
        match groups
            .iter_mut()
            .find(|g| distance(&results[g.1], r) <= CLUSTER_RADIUS)
        {
            Some(g) => {
                g.2 += 1;
                if r.residual < results[g.1].residual {
                    g.1 = idx;
                }
            }
            None => groups.push((idx, idx, 1)),
        }
    }
    let converged_starts = groups.iter().map(|g| g.2).sum();
    let clusters: Vec<FamilySolution> = groups
        .iter()
        .map(|&(first, best, members)| {
            let mut s = to_solution(entry, &results[best], members, opts);
            s.first_start = results[first].start;
            s
        })
        .collect();

    let best_idx = (0..results.len())
        .min_by(|&a, &b| results[a].residual.total_cmp(&results[b].residual))
        .expect("at least one start");
    let best = to_solution(entry, &results[best_idx], 1, opts);

    Ok(SolveReport {
        family: entry.id,
        gauge,
        options: opts.clone(),
        clusters,
        converged_starts,
        no_convergence: converged_starts == 0,
        best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{family, FamilyId};

    #[test]
    fn options_validation() {
        let mut o = SolveOptions::default();
        assert!(o.validate().is_ok());
        o.multistarts = 0;
        assert!(o.validate().is_err());
        let o = SolveOptions {
            residual_tol: 0.0,
            ..Default::default()
        };
        assert!(o.validate().is_err());
    }

    #[test]
    fn rejects_bad_gauge() {
        let opts = SolveOptions {
            gauge: Some(Param::U),
            ..Default::default()
        };
        assert!(matches!(
            solve_family(&family(FamilyId::C2_10), &opts),
            Err(Error::InvalidGauge(_))
        ));
    }

    #[test]
    fn heisenberg_family_has_only_c() {
        let opts = SolveOptions {
            multistarts: 4,
            ..Default::default()
        };
        let rep = solve_family(&family(FamilyId::C2_3), &opts).unwrap();
        assert_eq!(rep.clusters.len(), 1);
        assert!((rep.clusters[0].c + 1.5).abs() < 1e-12);
        assert_eq!(rep.clusters[0].members, 4);
    }
}
