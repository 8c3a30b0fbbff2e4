//! Shared test fixtures: an exact-rational shadow of the coefficient
//! recursion (the library core stays in f64; exactness lives here), plus
//! seeded generators for random commuting nilpotent tuples.

// Each integration-test binary compiles this module separately and
// uses only a subset of it.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use uikernels::kernel::{compute_a, invert_series, CoeffTable, KernelFamily, KernelSpec};
use uikernels::model::OperatorTuple;
use uikernels::poly::{build_basis, MonomialBasis};

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact a_n for families with rational closed forms.
pub fn rational_a(family: &KernelFamily, n: usize) -> Option<BigRational> {
    let n_i = n as i64;
    match family {
        KernelFamily::Hardy | KernelFamily::DruryArveson => Some(ratio(1, 1)),
        KernelFamily::BergmanDisc => Some(ratio(n_i + 1, 1)),
        KernelFamily::HS { s } => {
            // Exact only for integer s <= 0.
            if s.fract() != 0.0 {
                return None;
            }
            let k = (-s) as u32;
            let mut den = BigInt::from(1);
            for _ in 0..k {
                den *= BigInt::from(n_i + 1);
            }
            Some(BigRational::new(BigInt::from(1), den))
        }
        KernelFamily::BesovSobolev { sigma } => {
            // Exact for sigma = p/q with small denominator (e.g. 1/2).
            let q = 16i64;
            let p = (sigma * q as f64).round() as i64;
            if (sigma - p as f64 / q as f64).abs() > 0.0 {
                return None;
            }
            let sig = ratio(p, q);
            let mut a = ratio(1, 1);
            for j in 1..=n_i {
                a *= (sig.clone() + ratio(j - 1, 1)) / ratio(j, 1);
            }
            Some(a)
        }
        KernelFamily::Custom { .. } => None,
    }
}

/// Exact inversion b_m = a_m - Σ_{n<m} b_n a_{m-n} over the rationals.
pub fn rational_b(a: &[BigRational]) -> Vec<BigRational> {
    let n_max = a.len() - 1;
    let mut b: Vec<BigRational> = Vec::with_capacity(n_max);
    for m in 1..=n_max {
        let mut s = a[m].clone();
        for n in 1..m {
            s -= b[n - 1].clone() * a[m - n].clone();
        }
        b.push(s / a[0].clone());
    }
    b
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().expect("rational fits in f64 range")
}

pub fn ready_table(family: KernelFamily, d: usize, n: usize) -> CoeffTable {
    let spec = KernelSpec::new(family, d).unwrap();
    invert_series(&compute_a(&spec, n).unwrap()).unwrap()
}

pub fn basis_of(family: KernelFamily, d: usize, n: usize) -> MonomialBasis {
    let table = ready_table(family.clone(), d, n);
    build_basis(&table, d, n).unwrap()
}

/// The CNP families exercised across the suites.
pub fn cnp_families() -> Vec<KernelFamily> {
    vec![
        KernelFamily::Hardy,
        KernelFamily::DruryArveson,
        KernelFamily::HS { s: -0.5 },
        KernelFamily::HS { s: -1.0 },
        KernelFamily::HS { s: -2.0 },
        KernelFamily::BesovSobolev { sigma: 0.25 },
        KernelFamily::BesovSobolev { sigma: 0.5 },
        KernelFamily::BesovSobolev { sigma: 1.0 },
    ]
}

/// Re-export of the library generator, kept here so test files share one
/// entry point.
pub fn random_nilpotent_tuple(
    family: KernelFamily,
    d: usize,
    n_max: usize,
    scale: f64,
    seed: u64,
) -> OperatorTuple {
    uikernels::sampling::random_nilpotent_tuple(family, d, n_max, scale, seed)
}
