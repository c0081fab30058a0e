//! Randomized invariant suite behind `zenolab check`.
//!
//! Draws come from ChaCha8 seeded with the user's `--seed`, so a failing
//! case is reproduced exactly by rerunning with the same seed and count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zenolab_core::control::{kick_frame_limit, kick_zeno_hamiltonian, KickSpec, DEFAULT_GROUPING_TOL};
use zenolab_core::linops::propagator;
use zenolab_core::random;
use zenolab_core::subspaces::{
    evolve_with_measurements, offdiagonal_block_norm, sector_probabilities, star_product, zeno_limit_channel,
    ZenoPartition,
};
use zenolab_core::survival::SurvivalModel;
use zenolab_core::zeno_limit::ZenoProduct;
use zenolab_core::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub worst: f64,
    pub tol: f64,
}

impl PropertyResult {
    pub fn passed(&self) -> bool {
        self.worst <= self.tol
    }
}

type Property = (&'static str, f64, fn(&mut ChaCha8Rng) -> Result<f64>);

const PROPERTIES: [Property; 7] = [
    ("propagator unitarity", 1e-10, propagator_unitarity),
    ("survival in [0, 1] with p(0) = 1", 1e-12, survival_range),
    ("measurement channel trace and positivity", 1e-9, channel_trace),
    ("limit channel conserves sectors", 1e-10, limit_conservation),
    ("star product homomorphism", 1e-10, star_homomorphism),
    ("Zeno product is a contraction", 1e-10, zeno_contraction),
    ("kick frame limit is block diagonal", 1e-9, kick_block_diagonal),
];

/// Runs every property on `cases` draws each.
pub fn run(seed: u64, cases: usize) -> Result<Vec<PropertyResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PROPERTIES
        .iter()
        .map(|&(name, tol, property)| {
            let mut worst: f64 = 0.0;
            for _ in 0..cases {
                worst = worst.max(property(&mut rng)?);
            }
            Ok(PropertyResult { name, worst, tol })
        })
        .collect()
}

fn dim(rng: &mut ChaCha8Rng) -> usize {
    rng.random_range(2..=6)
}

fn random_partition(rng: &mut ChaCha8Rng, d: usize) -> ZenoPartition {
    let sectors = rng.random_range(1..=d);
    let mut ranks = vec![1; sectors];
    for _ in sectors..d {
        let k = rng.random_range(0..sectors);
        ranks[k] += 1;
    }
    random::partition(rng, &ranks)
}

fn propagator_unitarity(rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = dim(rng);
    let h = random::hermitian(rng, d);
    Ok(propagator(&h, rng.random_range(-5.0..5.0))?.unitary_defect())
}

fn survival_range(rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = dim(rng);
    let model = SurvivalModel::new(&random::hermitian(rng, d), &random::state(rng, d))?;
    let p = model.probability(rng.random_range(0.0..10.0));
    Ok((p - 1.0).max(-p).max((model.probability(0.0) - 1.0).abs()).max(0.0))
}

fn channel_trace(rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = dim(rng);
    let h = random::hermitian(rng, d);
    let part = random_partition(rng, d);
    let rho = random::density_matrix(rng, d);
    let out = evolve_with_measurements(&rho, &h, &part, rng.random_range(1..50), rng.random_range(0.1..3.0))?;
    Ok((out.trace() - 1.0).abs().max(-out.op().min_eigenvalue()).max(0.0))
}

fn limit_conservation(rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = dim(rng);
    let h = random::hermitian(rng, d);
    let part = random_partition(rng, d);
    let rho = random::density_matrix(rng, d);
    let before = sector_probabilities(&rho, &part)?;
    let after = sector_probabilities(&zeno_limit_channel(&rho, &h, &part, rng.random_range(0.0..5.0))?, &part)?;
    Ok(before
        .iter()
        .zip(&after)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

fn star_homomorphism(rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = dim(rng);
    let rank = rng.random_range(1..=d);
    let p = random::projector(rng, d, rank);
    let a = random::hermitian(rng, d);
    let b = random::hermitian(rng, d);
    let lhs = star_product(&a.sandwich(&p), &b.sandwich(&p), &p)?;
    let rhs = (&(&a * &p) * &b).sandwich(&p);
    Ok(lhs.max_abs_diff(&rhs))
}

fn zeno_contraction(rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = dim(rng);
    let rank = rng.random_range(1..=d);
    let zp = ZenoProduct::new(&random::hermitian(rng, d), &random::projector(rng, d, rank))?;
    let v = zp.product(rng.random_range(1..40), rng.random_range(0.0..3.0))?;
    Ok((v.op_norm() - 1.0).max(0.0))
}

fn kick_block_diagonal(rng: &mut ChaCha8Rng) -> Result<f64> {
    let d = dim(rng);
    let h = random::hermitian(rng, d);
    let kick = KickSpec::new(&random::unitary(rng, d), DEFAULT_GROUPING_TOL)?;
    let t = rng.random_range(0.1..2.0);
    let limit = kick_frame_limit(&h, &kick, rng.random_range(1..20), t)?;
    let hz = kick_zeno_hamiltonian(&h, &kick)?;
    let offdiag = offdiagonal_block_norm(&hz, kick.partition())?;
    Ok(offdiag.max(limit.unitary_defect()))
}
