//! Deterministic seeded point generators: radial-angular grids in the
//! open unit ball of ℂ^d and uniform samples on the unit sphere. Every
//! generator is a pure function of (count, seed), so experiment sweeps
//! reproduce bit-identically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::C64;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Standard complex Gaussian via Box-Muller.
fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
    let v: f64 = rng.random();
    let r = (-2.0 * u.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * v;
    // Var 1/2 per real component, so |z|^2 has unit mean.
    C64::new(r * theta.cos(), r * theta.sin()) * C64::new(0.5f64.sqrt(), 0.0)
}

/// `count` points in the open ball of radius `radius` in ℂ^d.
///
/// Radii are stratified (low-discrepancy in the radial volume measure);
/// the angular directions come from the seeded stream. d = 1 uses a
/// golden-angle spiral on the disc.
pub fn ball_grid(d: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<C64>> {
    assert!(d >= 1, "ambient dimension must be at least 1");
    assert!(radius > 0.0 && radius < 1.0, "grid radius must be in (0,1)");
    let mut rng = rng_for(seed, 1);
    let mut points = Vec::with_capacity(count);
    if d == 1 {
        let golden = 0.618_033_988_749_894_9_f64;
        let offset: f64 = rng.random();
        for k in 0..count {
            let r = radius * (((k as f64) + 0.5) / count as f64).sqrt();
            let theta = 2.0 * std::f64::consts::PI * (((k as f64) * golden + offset) % 1.0);
            points.push(vec![C64::new(r * theta.cos(), r * theta.sin())]);
        }
    } else {
        for k in 0..count {
            // Stratified radius with the volume exponent 1/(2d).
            let u = ((k as f64) + 0.5) / count as f64;
            let r = radius * u.powf(1.0 / (2.0 * d as f64));
            let mut dir: Vec<C64> = (0..d).map(|_| complex_gaussian(&mut rng)).collect();
            let norm = dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for c in dir.iter_mut() {
                *c *= C64::new(r / norm, 0.0);
            }
            points.push(dir);
        }
    }
    points
}

/// `count` uniform points on the unit sphere of ℂ^d.
pub fn sphere_sample(d: usize, count: usize, seed: u64) -> Vec<Vec<C64>> {
    assert!(d >= 1, "ambient dimension must be at least 1");
    let mut rng = rng_for(seed, 2);
    (0..count)
        .map(|_| {
            let mut dir: Vec<C64> = (0..d).map(|_| complex_gaussian(&mut rng)).collect();
            let norm = dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for c in dir.iter_mut() {
                *c /= C64::new(norm, 0.0);
            }
            dir
        })
        .collect()
}

/// Largest |z^β|² over a sphere sample: a lower bound for the squared sup
/// norm of the monomial on the sphere.
pub fn monomial_sup_norm_sq_sampled(beta: &crate::poly::MultiIndex, points: &[Vec<C64>]) -> f64 {
    points
        .iter()
        .map(|p| beta.monomial_at(p).norm_sqr())
        .fold(0.0, f64::max)
}

/// Seeded random homogeneous polynomial of degree m, as monomial
/// coefficients over the degree-m block of the basis.
pub fn random_homogeneous(
    basis: &crate::poly::MonomialBasis,
    m: usize,
    seed: u64,
) -> crate::CVector {
    let mut rng = rng_for(seed, 3);
    let len = basis.degree_range(m).len();
    crate::CVector::from_fn(len, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    })
}

/// Seeded random commuting jointly nilpotent tuple: polynomials without
/// constant term in the truncated shift tuple of the family, conjugated
/// by a random unitary so the matrices are dense.
pub fn random_nilpotent_tuple(
    family: crate::kernel::KernelFamily,
    d: usize,
    n_max: usize,
    scale: f64,
    seed: u64,
) -> crate::model::OperatorTuple {
    use crate::{kernel, model, poly, CMatrix};
    let mut rng = rng_for(seed, 4);
    let spec = kernel::KernelSpec::new(family, d).expect("valid family");
    let table = kernel::compute_a(&spec, n_max).expect("coefficients");
    let basis = poly::build_basis(&table, d, n_max).expect("basis");
    let shifts = model::shift_tuple(&basis);
    let dim = shifts.dim();
    let powers = model::graded_products(&shifts, n_max.min(2)).expect("products");
    let mut matrices = Vec::with_capacity(d);
    for _ in 0..d {
        let mut m = CMatrix::zeros(dim, dim);
        for (alpha, s_alpha) in &powers {
            if alpha.degree() == 0 {
                continue;
            }
            let c = C64::new(
                scale * (rng.random::<f64>() - 0.5),
                scale * (rng.random::<f64>() - 0.5),
            );
            m += s_alpha * c;
        }
        matrices.push(m);
    }
    let random = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let q = nalgebra::linalg::QR::new(random).q();
    let conjugated = matrices.into_iter().map(|m| q.adjoint() * m * &q).collect();
    crate::model::OperatorTuple::new(conjugated).expect("square tuple")
}
