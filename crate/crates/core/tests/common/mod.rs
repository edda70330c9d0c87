#![allow(dead_code)]

use nalgebra::DMatrix;
use nilsoliton::algebra::StructureConstants;
use nilsoliton::catalog::{family, FamilyId, ParamPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random in-domain member of a random catalog family.
pub fn catalog_instance<R: Rng>(rng: &mut R) -> (FamilyId, ParamPoint, StructureConstants) {
    let id = FamilyId::ALL[rng.gen_range(0..FamilyId::ALL.len())];
    let entry = family(id);
    let theta = entry.sample_in_domain(rng);
    let alpha = entry.build(&theta);
    (id, theta, alpha)
}

/// Haar-ish random orthogonal matrix from the QR factor of a Gaussian-like
/// matrix.
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    m.qr().q()
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Reference soliton algebras at gauge 1, in table order.
pub fn reference_solitons() -> Vec<(FamilyId, ParamPoint, StructureConstants)> {
    FamilyId::ALL
        .into_iter()
        .filter_map(|id| {
            let s = nilsoliton::catalog::expected(id).soliton?;
            let theta = (s.reference_point)();
            let alpha = family(id).build(&theta);
            Some((id, theta, alpha))
        })
        .collect()
}
