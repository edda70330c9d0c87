//! The ten parametrized families of five-dimensional nilpotent metric Lie
//! algebras (up to isometry, excluding direct products of lower-dimensional
//! algebras) and their expected soliton behaviour.
//!
//! Direct products are not catalogued, so the Lauret class μ₈′ has no entry.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{BracketEntry, StructureConstants};
use crate::error::{Error, Result};

mod table;

pub use table::{compare_with_expected, reproduce_table, TableReport, TableRow, COMPARE_TOL};

/// Catalog dimension.
pub const DIM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FamilyId {
    #[serde(rename = "2.1")]
    C2_1,
    #[serde(rename = "2.2")]
    C2_2,
    #[serde(rename = "2.3")]
    C2_3,
    #[serde(rename = "2.4")]
    C2_4,
    #[serde(rename = "2.5")]
    C2_5,
    #[serde(rename = "2.6")]
    C2_6,
    #[serde(rename = "2.7")]
    C2_7,
    #[serde(rename = "2.8")]
    C2_8,
    #[serde(rename = "2.9")]
    C2_9,
    #[serde(rename = "2.10")]
    C2_10,
}

impl FamilyId {
    pub const ALL: [FamilyId; 10] = [
        FamilyId::C2_1,
        FamilyId::C2_2,
        FamilyId::C2_3,
        FamilyId::C2_4,
        FamilyId::C2_5,
        FamilyId::C2_6,
        FamilyId::C2_7,
        FamilyId::C2_8,
        FamilyId::C2_9,
        FamilyId::C2_10,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::C2_1 => "2.1",
            FamilyId::C2_2 => "2.2",
            FamilyId::C2_3 => "2.3",
            FamilyId::C2_4 => "2.4",
            FamilyId::C2_5 => "2.5",
            FamilyId::C2_6 => "2.6",
            FamilyId::C2_7 => "2.7",
            FamilyId::C2_8 => "2.8",
            FamilyId::C2_9 => "2.9",
            FamilyId::C2_10 => "2.10",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().trim_start_matches("case").trim();
        FamilyId::ALL
            .into_iter()
            .find(|id| id.as_str() == key)
            .ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    M,
    S,
    U,
    V,
    W,
    X,
    Y,
}

impl Param {
    pub fn name(self) -> &'static str {
        match self {
            Param::M => "m",
            Param::S => "s",
            Param::U => "u",
            Param::V => "v",
            Param::W => "w",
            Param::X => "x",
            Param::Y => "y",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "m" => Param::M,
            "s" => Param::S,
            "u" => Param::U,
            "v" => Param::V,
            "w" => Param::W,
            "x" => Param::X,
            "y" => Param::Y,
            other => return Err(Error::InvalidGauge(other.to_string())),
        })
    }
}

/// Parameter values keyed by name.
pub type ParamPoint = BTreeMap<Param, f64>;

/// Domain predicates, as printed for each family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    /// `p > 0`
    Positive(Param),
    /// `p >= 0`
    NonNegative(Param),
    /// `p != 0`
    NonZero(Param),
    /// `p = value`
    Fixed(Param, f64),
    /// `a = b`
    Tied(Param, Param),
    /// `a >= b`
    AtLeast(Param, Param),
    /// `a > b`
    Greater(Param, Param),
}

impl Constraint {
    pub fn is_strict(&self) -> bool {
        matches!(
            self,
            Constraint::Positive(_) | Constraint::NonZero(_) | Constraint::Greater(..)
        )
    }

    /// Whether `theta` satisfies the predicate. Strict inequalities must hold
    /// with margin `eps`; non-strict ones and equalities up to `eps`.
    pub fn holds(&self, theta: &ParamPoint, eps: f64) -> bool {
        let g = |p: &Param| theta.get(p).copied().unwrap_or(0.0);
        match self {
            Constraint::Positive(p) => g(p) > eps,
            Constraint::NonNegative(p) => g(p) >= -eps,
            Constraint::NonZero(p) => g(p).abs() > eps,
            Constraint::Fixed(p, v) => (g(p) - v).abs() <= eps,
            Constraint::Tied(a, b) => (g(a) - g(b)).abs() <= eps,
            Constraint::AtLeast(a, b) => g(a) - g(b) >= -eps,
            Constraint::Greater(a, b) => g(a) - g(b) > eps,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Positive(p) => write!(f, "{p}>0"),
            Constraint::NonNegative(p) => write!(f, "{p}>=0"),
            Constraint::NonZero(p) => write!(f, "{p}!=0"),
            Constraint::Fixed(p, v) => write!(f, "{p}={v}"),
            Constraint::Tied(a, b) => write!(f, "{a}={b}"),
            Constraint::AtLeast(a, b) => write!(f, "{a}>={b}"),
            Constraint::Greater(a, b) => write!(f, "{a}>{b}"),
        }
    }
}

/// `[E_i, E_j] += p E_k`, 1-based.
pub type BracketTemplate = (usize, usize, usize, Param);

#[derive(Debug, Clone)]
pub struct FamilyEntry {
    pub id: FamilyId,
    pub name: &'static str,
    pub param_names: Vec<Param>,
    pub domain: Vec<Constraint>,
    pub brackets: Vec<BracketTemplate>,
    pub default_gauge: Param,
    /// Nilpotency class of every member of the family.
    pub nilpotency_class: usize,
}

const L57: [BracketTemplate; 6] = [
    (1, 2, 3, Param::M),
    (1, 2, 4, Param::S),
    (1, 2, 5, Param::U),
    (1, 3, 4, Param::V),
    (1, 3, 5, Param::W),
    (1, 4, 5, Param::X),
];

const L59: [BracketTemplate; 5] = [
    (1, 2, 3, Param::M),
    (1, 2, 4, Param::S),
    (1, 2, 5, Param::U),
    (1, 3, 4, Param::V),
    (2, 3, 5, Param::W),
];

pub fn family(id: FamilyId) -> FamilyEntry {
    use Constraint::*;
    use Param::*;
    let l56: Vec<BracketTemplate> = L57.iter().copied().chain([(2, 3, 5, Y)]).collect();
    let (name, params, domain, brackets, gauge, class): (
        _,
        Vec<Param>,
        Vec<Constraint>,
        Vec<_>,
        _,
        _,
    ) = match id {
        FamilyId::C2_1 => (
            "two-step, one-dimensional center",
            vec![M, S],
            vec![Positive(M), AtLeast(S, M)],
            vec![(1, 2, 5, S), (3, 4, 5, M)],
            M,
            2,
        ),
        FamilyId::C2_2 => (
            "two-step, two-dimensional center",
            vec![M, S],
            vec![Positive(S), AtLeast(M, S)],
            vec![(1, 2, 4, M), (1, 3, 5, S)],
            M,
            2,
        ),
        FamilyId::C2_3 => (
            "two-step, three-dimensional center",
            vec![M],
            vec![Positive(M)],
            vec![(1, 2, 3, M)],
            M,
            2,
        ),
        FamilyId::C2_4 => (
            "l5,7 case A",
            vec![M, S, U, V, W, X],
            vec![
                Positive(M),
                Positive(V),
                Positive(X),
                Fixed(S, 0.0),
                NonNegative(W),
            ],
            L57.to_vec(),
            M,
            4,
        ),
        FamilyId::C2_5 => (
            "l5,7 case B",
            vec![M, S, U, V, W, X],
            vec![
                Positive(M),
                Positive(V),
                Positive(X),
                NonNegative(W),
                Positive(S),
            ],
            L57.to_vec(),
            M,
            4,
        ),
        FamilyId::C2_6 => (
            "l5,6 case A",
            vec![M, S, U, V, W, X, Y],
            vec![
                NonZero(M),
                NonZero(V),
                NonZero(X),
                NonZero(Y),
                Fixed(S, 0.0),
                NonNegative(W),
            ],
            l56.clone(),
            X,
            4,
        ),
        FamilyId::C2_7 => (
            "l5,6 case B",
            vec![M, S, U, V, W, X, Y],
            vec![NonZero(M), NonZero(V), NonZero(X), NonZero(Y), Positive(S)],
            l56.clone(),
            X,
            4,
        ),
        FamilyId::C2_8 => (
            "l5,5",
            vec![M, S, U, V, W],
            vec![
                NonNegative(S),
                NonNegative(U),
                Positive(M),
                Positive(V),
                Positive(W),
            ],
            vec![
                (1, 2, 4, M),
                (1, 2, 5, S),
                (1, 3, 5, U),
                (1, 4, 5, V),
                (2, 3, 5, W),
            ],
            M,
            3,
        ),
        FamilyId::C2_9 => (
            "l5,9 case A",
            vec![M, S, U, V, W],
            vec![
                Positive(M),
                Positive(V),
                Greater(W, V),
                NonNegative(S),
                NonNegative(U),
            ],
            L59.to_vec(),
            M,
            3,
        ),
        FamilyId::C2_10 => (
            "l5,9 case B",
            vec![M, S, U, V, W],
            vec![
                Positive(M),
                Positive(V),
                Tied(W, V),
                NonNegative(S),
                Fixed(U, 0.0),
            ],
            L59.to_vec(),
            M,
            3,
        ),
    };
    FamilyEntry {
        id,
        name,
        param_names: params,
        domain,
        brackets,
        default_gauge: gauge,
        nilpotency_class: class,
    }
}

pub fn all_families() -> Vec<FamilyEntry> {
    FamilyId::ALL.into_iter().map(family).collect()
}

impl FamilyEntry {
    /// Structure constants at `theta`; missing parameters read as zero.
    pub fn build(&self, theta: &ParamPoint) -> StructureConstants {
        let mut alpha = [[[0.0_f64; DIM]; DIM]; DIM];
        for &(i, j, k, p) in &self.brackets {
            alpha[i - 1][j - 1][k - 1] += theta.get(&p).copied().unwrap_or(0.0);
        }
        StructureConstants::from_fn(DIM, |i, j, k| alpha[i][j][k]).expect("catalog dimension")
    }

    pub fn bracket_entries(&self, theta: &ParamPoint) -> Vec<BracketEntry> {
        self.build(theta).entries()
    }

    pub fn is_interior(&self, theta: &ParamPoint, eps: f64) -> bool {
        self.domain.iter().all(|c| c.holds(theta, eps))
    }

    pub fn violations(&self, theta: &ParamPoint, eps: f64) -> Vec<Constraint> {
        self.domain
            .iter()
            .filter(|c| !c.holds(theta, eps))
            .copied()
            .collect()
    }

    pub fn fixed_value(&self, p: Param) -> Option<f64> {
        self.domain.iter().find_map(|c| match c {
            Constraint::Fixed(q, v) if *q == p => Some(*v),
            _ => None,
        })
    }

    /// The parameter `p` is forced equal to, if any.
    pub fn tied_to(&self, p: Param) -> Option<Param> {
        self.domain.iter().find_map(|c| match c {
            Constraint::Tied(a, b) if *a == p => Some(*b),
            _ => None,
        })
    }

    /// Whether the domain forces `p >= 0`.
    pub fn requires_nonnegative(&self, p: Param) -> bool {
        self.domain.iter().any(|c| match c {
            Constraint::Positive(q) | Constraint::NonNegative(q) => *q == p,
            Constraint::AtLeast(a, b) | Constraint::Greater(a, b) => {
                *a == p && self.requires_nonnegative(*b)
            }
            _ => false,
        })
    }

    /// Parameters that are neither fixed, tied, nor the gauge.
    pub fn free_params(&self, gauge: Param) -> Vec<Param> {
        self.param_names
            .iter()
            .copied()
            .filter(|&p| p != gauge && self.fixed_value(p).is_none() && self.tied_to(p).is_none())
            .collect()
    }

    pub fn check_gauge(&self, gauge: Param) -> Result<()> {
        if !self.param_names.contains(&gauge)
            || self.fixed_value(gauge).is_some()
            || self.tied_to(gauge).is_some()
        {
            return Err(Error::InvalidGauge(gauge.to_string()));
        }
        Ok(())
    }

    /// Completes a point with fixed and tied values.
    pub fn complete(&self, theta: &mut ParamPoint) {
        for &p in &self.param_names {
            if let Some(v) = self.fixed_value(p) {
                theta.insert(p, v);
            }
        }
        for &p in &self.param_names {
            if let Some(q) = self.tied_to(p) {
                let v = theta.get(&q).copied().unwrap_or(0.0);
                theta.insert(p, v);
            }
        }
    }

    /// A random point satisfying every domain predicate with room to spare.
    pub fn sample_in_domain<R: Rng + ?Sized>(&self, rng: &mut R) -> ParamPoint {
        let mut theta = ParamPoint::new();
        let lower_of = |p: Param| {
            self.domain.iter().find_map(|c| match c {
                Constraint::AtLeast(a, b) if *a == p => Some((*b, 0.0)),
                Constraint::Greater(a, b) if *a == p => Some((*b, 0.1)),
                _ => None,
            })
        };
        let mut deferred = Vec::new();
        for &p in &self.param_names {
            if self.fixed_value(p).is_some() || self.tied_to(p).is_some() {
                continue;
            }
            if lower_of(p).is_some() {
                deferred.push(p);
                continue;
            }
            let has = |want: fn(&Constraint, Param) -> bool| self.domain.iter().any(|c| want(c, p));
            let v = if has(|c, p| matches!(c, Constraint::Positive(q) if *q == p)) {
                rng.gen_range(0.2..2.5)
            } else if has(|c, p| matches!(c, Constraint::NonNegative(q) if *q == p)) {
                rng.gen_range(0.0..2.5)
            } else if has(|c, p| matches!(c, Constraint::NonZero(q) if *q == p)) {
                let mag = rng.gen_range(0.2..2.5);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            } else {
                rng.gen_range(-2.5..2.5)
            };
            theta.insert(p, v);
        }
        for p in deferred {
            let (base, gap) = lower_of(p).expect("deferred parameters have a lower bound");
            let b = theta.get(&base).copied().unwrap_or(0.0);
            theta.insert(p, b + gap + rng.gen_range(0.0..1.5));
        }
        self.complete(&mut theta);
        theta
    }

    pub fn domain_text(&self) -> String {
        self.domain
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// Table row for one family: the relations forced on the parameters, `c`, and
/// the diagonal of `D`.
#[derive(Debug, Clone)]
pub struct ExpectedResult {
    pub id: FamilyId,
    pub admits_soliton: bool,
    pub condition: &'static str,
    pub lauret_class: Option<&'static str>,
    pub soliton: Option<ExpectedSoliton>,
}

#[derive(Debug, Clone, Copy)]
pub struct ExpectedSoliton {
    /// Relations that vanish on the soliton locus (sign-reduced parameters).
    pub conditions: fn(&ParamPoint) -> Vec<f64>,
    pub c_formula: fn(&ParamPoint) -> f64,
    pub derivation_diag: fn(&ParamPoint) -> [f64; 5],
    /// The soliton point with the default gauge parameter equal to one.
    pub reference_point: fn() -> ParamPoint,
}

fn point(pairs: &[(Param, f64)]) -> ParamPoint {
    pairs.iter().copied().collect()
}

fn p(theta: &ParamPoint, q: Param) -> f64 {
    theta.get(&q).copied().unwrap_or(0.0)
}

fn scaled(diag: [f64; 5], k: f64) -> [f64; 5] {
    diag.map(|d| d * k)
}

pub fn expected(id: FamilyId) -> ExpectedResult {
    use Param::*;
    let none = |condition| ExpectedResult {
        id,
        admits_soliton: false,
        condition,
        lauret_class: None,
        soliton: None,
    };
    let yes = |condition, class, soliton| ExpectedResult {
        id,
        admits_soliton: true,
        condition,
        lauret_class: Some(class),
        soliton: Some(soliton),
    };
    match id {
        FamilyId::C2_1 => yes(
            "s=m",
            "μ4′",
            ExpectedSoliton {
                conditions: |t| vec![p(t, S) - p(t, M)],
                c_formula: |t| -2.0 * p(t, M).powi(2),
                derivation_diag: |t| scaled([1.5, 1.5, 1.5, 1.5, 3.0], p(t, M).powi(2)),
                reference_point: || point(&[(M, 1.0), (S, 1.0)]),
            },
        ),
        FamilyId::C2_2 => yes(
            "s=m",
            "μ6′",
            ExpectedSoliton {
                conditions: |t| vec![p(t, S) - p(t, M)],
                c_formula: |t| -2.0 * p(t, M).powi(2),
                derivation_diag: |t| scaled([1.0, 1.5, 1.5, 2.5, 2.5], p(t, M).powi(2)),
                reference_point: || point(&[(M, 1.0), (S, 1.0)]),
            },
        ),
        FamilyId::C2_3 => yes(
            "always",
            "μ7′",
            ExpectedSoliton {
                conditions: |_| Vec::new(),
                c_formula: |t| -1.5 * p(t, M).powi(2),
                derivation_diag: |t| scaled([1.0, 1.0, 2.0, 1.5, 1.5], p(t, M).powi(2)),
                reference_point: || point(&[(M, 1.0)]),
            },
        ),
        FamilyId::C2_4 => yes(
            "x=m, u=w=s=0, v=(2/√3)m",
            "μ1′",
            ExpectedSoliton {
                conditions: |t| {
                    vec![
                        p(t, X) - p(t, M),
                        p(t, U),
                        p(t, W),
                        p(t, S),
                        p(t, V) - 2.0 / 3f64.sqrt() * p(t, M),
                    ]
                },
                c_formula: |t| -2.0 * p(t, M).powi(2),
                derivation_diag: |t| {
                    scaled(
                        [1.0 / 3.0, 1.5, 11.0 / 6.0, 13.0 / 6.0, 2.5],
                        p(t, M).powi(2),
                    )
                },
                reference_point: || {
                    point(&[
                        (M, 1.0),
                        (S, 0.0),
                        (U, 0.0),
                        (V, 2.0 / 3f64.sqrt()),
                        (W, 0.0),
                        (X, 1.0),
                    ])
                },
            },
        ),
        FamilyId::C2_5 => none("no soliton"),
        FamilyId::C2_6 => yes(
            "u=w=s=0, |m|=|v|=√(3/2)|x|, |y|=|x|",
            "μ2′",
            ExpectedSoliton {
                conditions: |t| {
                    let r = 1.5f64.sqrt();
                    vec![
                        p(t, U),
                        p(t, W),
                        p(t, S),
                        p(t, M) - r * p(t, X),
                        p(t, V) - r * p(t, X),
                        p(t, Y) - p(t, X),
                    ]
                },
                c_formula: |t| -2.75 * p(t, X).powi(2),
                derivation_diag: |t| scaled([0.75, 1.5, 2.25, 3.0, 3.75], p(t, X).powi(2)),
                reference_point: || {
                    let r = 1.5f64.sqrt();
                    point(&[
                        (M, r),
                        (S, 0.0),
                        (U, 0.0),
                        (V, r),
                        (W, 0.0),
                        (X, 1.0),
                        (Y, 1.0),
                    ])
                },
            },
        ),
        FamilyId::C2_7 => none("no soliton"),
        FamilyId::C2_8 => yes(
            "s=u=0, v=m, w=(√2/2)m",
            "μ3′",
            ExpectedSoliton {
                conditions: |t| {
                    vec![
                        p(t, S),
                        p(t, U),
                        p(t, V) - p(t, M),
                        p(t, W) - 0.5f64.sqrt() * p(t, M),
                    ]
                },
                c_formula: |t| -1.75 * p(t, M).powi(2),
                derivation_diag: |t| scaled([0.75, 1.0, 1.5, 1.75, 2.5], p(t, M).powi(2)),
                reference_point: || {
                    point(&[(M, 1.0), (S, 0.0), (U, 0.0), (V, 1.0), (W, 0.5f64.sqrt())])
                },
            },
        ),
        FamilyId::C2_9 => none("no soliton"),
        FamilyId::C2_10 => yes(
            "s=0, v=(√3/2)m",
            "μ5′",
            ExpectedSoliton {
                conditions: |t| vec![p(t, S), p(t, V) - 0.75f64.sqrt() * p(t, M)],
                c_formula: |t| -1.5 * p(t, M).powi(2),
                derivation_diag: |t| scaled([0.625, 0.625, 1.25, 1.875, 1.875], p(t, M).powi(2)),
                reference_point: || {
                    let v = 0.75f64.sqrt();
                    point(&[(M, 1.0), (S, 0.0), (U, 0.0), (V, v), (W, v)])
                },
            },
        ),
    }
}

/// Canonical sign representative: parameters constrained only to be nonzero
/// are replaced by their absolute values.
pub fn canonical_signs(entry: &FamilyEntry, theta: &ParamPoint) -> ParamPoint {
    theta
        .iter()
        .map(|(&q, &v)| {
            let flip = entry
                .domain
                .iter()
                .any(|c| matches!(c, Constraint::NonZero(r) if *r == q));
            (q, if flip { v.abs() } else { v })
        })
        .collect()
}

/// Number of strictly positive parameters, used to pick a canonical member of
/// a sign orbit.
pub fn positive_count(theta: &ParamPoint) -> usize {
    theta.values().filter(|&&v| v > 0.0).count()
}
