//! Kernel coefficient sequences for unitarily invariant spaces on the
//! unit ball, the formal inversion 1 - 1/k = Σ bₙ tⁿ, and the resulting
//! complete Nevanlinna-Pick, regularity, and summability diagnostics.
//!
//! A kernel k(z,w) = Σ aₙ ⟨z,w⟩ⁿ is represented by its coefficient
//! sequence only; the ambient dimension matters for evaluation and for
//! the monomial basis but not for the sequence itself.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{fmt_f64, C64};

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("ambient dimension must be at least 1, got {0}")]
    InvalidDimension(usize),
    #[error("h_s requires s <= 0, got {0}")]
    InvalidS(f64),
    #[error("besov_sobolev requires 0 < sigma <= 1, got {0}")]
    InvalidSigma(f64),
    #[error("custom coefficient list is empty")]
    EmptyCustom,
    #[error("custom coefficient a_{index} = {value} is not strictly positive")]
    NonPositiveCoefficient { index: usize, value: f64 },
    #[error(
        "custom coefficients must start with a_0 = 1 unless marked unnormalized (got a_0 = {0})"
    )]
    CustomNotNormalized(f64),
    #[error("custom family provides {got} coefficients but truncation order {n} needs {needed}")]
    CustomTooShort { n: usize, needed: usize, got: usize },
    #[error("series inversion requires a_0 != 0")]
    ZeroLeadingCoefficient,
    #[error("operation requires the inverted coefficients b; call invert_series first")]
    BNotComputed,
    #[error("operation requires a normalized table (a_0 = 1)")]
    UnnormalizedTable,
    #[error("regularity profile requires N >= 4, got {0}")]
    TruncationTooSmall(usize),
    #[error("perturbation parameter must lie in (0, 1], got {0}")]
    EpsOutOfRange(f64),
    #[error("point has norm {norm} outside the closed unit ball")]
    PointOutsideDomain { norm: f64 },
    #[error("point dimension {got} does not match ambient dimension {expected}")]
    PointDimension { expected: usize, got: usize },
}

/// Named kernel family, or a custom coefficient sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    /// Hardy space on the disc, aₙ = 1.
    Hardy,
    /// Drury-Arveson space H²_d, aₙ = 1.
    DruryArveson,
    /// The scale H_s for s ≤ 0, aₙ = (n+1)^s. s = -1 is the Dirichlet space.
    HS { s: f64 },
    /// Besov-Sobolev kernel (1 - ⟨z,w⟩)^(-σ) for 0 < σ ≤ 1.
    BesovSobolev { sigma: f64 },
    /// Bergman space on the disc, aₙ = n + 1.
    BergmanDisc,
    /// Explicit coefficients. `unnormalized` permits a_0 != 1 (used by the
    /// kernel perturbation k_ε).
    Custom {
        coefficients: Vec<f64>,
        #[serde(default)]
        unnormalized: bool,
    },
}

/// A kernel family together with the ambient dimension of the ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    #[serde(flatten)]
    pub family: KernelFamily,
    pub d: usize,
}

/// Serialized form of a kernel spec; carries an optional default
/// truncation order alongside the kernel spec itself.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelSpecFile {
    #[serde(flatten)]
    pub spec: KernelSpec,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, d: usize) -> Result<Self, KernelError> {
        let spec = KernelSpec { family, d };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        if self.d == 0 {
            return Err(KernelError::InvalidDimension(self.d));
        }
        match &self.family {
            KernelFamily::Hardy | KernelFamily::DruryArveson | KernelFamily::BergmanDisc => Ok(()),
            KernelFamily::HS { s } => {
                if !s.is_finite() || *s > 0.0 {
                    Err(KernelError::InvalidS(*s))
                } else {
                    Ok(())
                }
            }
            KernelFamily::BesovSobolev { sigma } => {
                if !sigma.is_finite() || *sigma <= 0.0 || *sigma > 1.0 {
                    Err(KernelError::InvalidSigma(*sigma))
                } else {
                    Ok(())
                }
            }
            KernelFamily::Custom {
                coefficients,
                unnormalized,
            } => {
                if coefficients.is_empty() {
                    return Err(KernelError::EmptyCustom);
                }
                for (index, &value) in coefficients.iter().enumerate() {
                    if !value.is_finite() || value <= 0.0 {
                        return Err(KernelError::NonPositiveCoefficient { index, value });
                    }
                }
                if !unnormalized && coefficients[0] != 1.0 {
                    return Err(KernelError::CustomNotNormalized(coefficients[0]));
                }
                Ok(())
            }
        }
    }

    /// The coefficient a_n of the family in closed form.
    fn coefficient(&self, n: usize) -> Result<f64, KernelError> {
        match &self.family {
            KernelFamily::Hardy | KernelFamily::DruryArveson => Ok(1.0),
            KernelFamily::HS { s } => Ok(((n + 1) as f64).powf(*s)),
            KernelFamily::BesovSobolev { sigma } => {
                // Binomial series of (1-t)^(-σ): a_n = Π_{j=1..n} (σ+j-1)/j.
                let mut a = 1.0;
                for j in 1..=n {
                    a *= (sigma + (j as f64) - 1.0) / (j as f64);
                }
                Ok(a)
            }
            KernelFamily::BergmanDisc => Ok((n + 1) as f64),
            KernelFamily::Custom { coefficients, .. } => {
                coefficients
                    .get(n)
                    .copied()
                    .ok_or(KernelError::CustomTooShort {
                        n,
                        needed: n + 1,
                        got: coefficients.len(),
                    })
            }
        }
    }

    fn is_normalized(&self) -> bool {
        match &self.family {
            KernelFamily::Custom {
                coefficients,
                unnormalized,
            } => !*unnormalized || coefficients.first() == Some(&1.0),
            _ => true,
        }
    }
}

/// Truncated coefficient table: a_0..a_N always, b_1..b_N after inversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffTable {
    n_max: usize,
    a: Vec<f64>,
    b: Option<Vec<f64>>,
    normalized: bool,
    cnp_margin: Option<f64>,
}

/// Outcome of the truncated complete Nevanlinna-Pick test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CnpVerdict {
    Pass,
    /// First index n with b_n < -tol, together with the offending value.
    Fail {
        index: usize,
        value: f64,
    },
}

impl CnpVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, CnpVerdict::Pass)
    }
}

/// Ratio profile a_n / a_{n+1} used as a finite regularity diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityProfile {
    pub ratios: Vec<f64>,
    /// Max |a_n/a_{n+1} - 1| over the last quartile of available indices.
    pub max_tail_deviation: f64,
}

/// Partial-sum report for Σ a_n and Σ b_n.
#[derive(Debug, Clone, Serialize)]
pub struct SummabilityReport {
    pub sum_a: f64,
    pub sum_b: f64,
    pub a_last: f64,
    pub b_last: f64,
    pub cnp_pass: bool,
    /// Σ b_n <= 1 + tol; meaningful for CNP tables.
    pub b_sum_within_bound: bool,
}

/// Truncated kernel evaluation together with the order used and a tail
/// estimate where one is available.
#[derive(Debug, Clone)]
pub struct KernelValue {
    pub value: C64,
    pub order: usize,
    /// a_{N+1} |t|^{N+1} / (1 - |t|) when |t| < 1 and a_{N+1} is known.
    pub tail_estimate: Option<f64>,
}

/// Fills a_0..a_N from the family's closed form. The b side is left empty.
pub fn compute_a(spec: &KernelSpec, n_max: usize) -> Result<CoeffTable, KernelError> {
    spec.validate()?;
    let mut a = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        a.push(spec.coefficient(n)?);
    }
    Ok(CoeffTable {
        n_max,
        a,
        b: None,
        normalized: spec.is_normalized(),
        cnp_margin: None,
    })
}

/// Inverts the power series: fills b with b_m = (a_m - Σ_{n<m} b_n a_{m-n}) / a_0
/// and records the CNP margin min_n b_n.
pub fn invert_series(table: &CoeffTable) -> Result<CoeffTable, KernelError> {
    let a0 = table.a[0];
    if a0 == 0.0 {
        return Err(KernelError::ZeroLeadingCoefficient);
    }
    let n_max = table.n_max;
    let mut b = vec![0.0; n_max];
    for m in 1..=n_max {
        let mut s = table.a[m];
        for n in 1..m {
            s -= b[n - 1] * table.a[m - n];
        }
        b[m - 1] = s / a0;
    }
    let margin = b.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out = table.clone();
    out.b = Some(b);
    out.cnp_margin = Some(margin);
    Ok(out)
}

/// Truncated CNP test: pass iff b_n >= -tol for all 1 <= n <= N.
pub fn is_cnp(table: &CoeffTable, tol: f64) -> Result<CnpVerdict, KernelError> {
    let b = table.b.as_ref().ok_or(KernelError::BNotComputed)?;
    for (i, &value) in b.iter().enumerate() {
        if value < -tol {
            return Ok(CnpVerdict::Fail {
                index: i + 1,
                value,
            });
        }
    }
    Ok(CnpVerdict::Pass)
}

/// Ratios a_n/a_{n+1} with the max deviation from 1 over the last quartile.
/// Regularity is a limit statement, so no binary verdict is attached.
pub fn regularity_profile(table: &CoeffTable) -> Result<RegularityProfile, KernelError> {
    if table.n_max < 4 {
        return Err(KernelError::TruncationTooSmall(table.n_max));
    }
    let ratios: Vec<f64> = (0..table.n_max)
        .map(|n| table.a[n] / table.a[n + 1])
        .collect();
    let start = ratios.len() - ratios.len() / 4;
    let max_tail_deviation = ratios[start..]
        .iter()
        .map(|r| (r - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(RegularityProfile {
        ratios,
        max_tail_deviation,
    })
}

/// Partial sums of a and b, with the CNP bound Σ b_n <= 1 + tol flag.
pub fn classify_summability(
    table: &CoeffTable,
    tol: f64,
) -> Result<SummabilityReport, KernelError> {
    let b = table.b.as_ref().ok_or(KernelError::BNotComputed)?;
    let sum_a: f64 = table.a.iter().sum();
    let sum_b: f64 = b.iter().sum();
    let cnp_pass = is_cnp(table, tol)?.passed();
    Ok(SummabilityReport {
        sum_a,
        sum_b,
        a_last: *table.a.last().unwrap(),
        b_last: b.last().copied().unwrap_or(0.0),
        cnp_pass,
        b_sum_within_bound: sum_b <= 1.0 + tol,
    })
}

/// Truncated evaluation of k(z,w) = Σ_{n<=N} a_n ⟨z,w⟩ⁿ.
pub fn kernel_eval(
    spec: &KernelSpec,
    z: &[C64],
    w: &[C64],
    n_max: usize,
) -> Result<KernelValue, KernelError> {
    spec.validate()?;
    for point in [z, w] {
        if point.len() != spec.d {
            return Err(KernelError::PointDimension {
                expected: spec.d,
                got: point.len(),
            });
        }
        let norm = point.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(KernelError::PointOutsideDomain { norm });
        }
    }
    let t: C64 = z.iter().zip(w.iter()).map(|(zi, wi)| zi * wi.conj()).sum();
    // Horner evaluation of the truncated series.
    let mut value = C64::new(0.0, 0.0);
    for n in (0..=n_max).rev() {
        value = value * t + C64::new(spec.coefficient(n)?, 0.0);
    }
    let tail_estimate = match spec.coefficient(n_max + 1) {
        Ok(a_next) if t.norm() < 1.0 => {
            Some(a_next.abs() * t.norm().powi(n_max as i32 + 1) / (1.0 - t.norm()))
        }
        _ => None,
    };
    Ok(KernelValue {
        value,
        order: n_max,
        tail_estimate,
    })
}

/// The perturbed kernel k_ε = k - (1 - ε): a_0 becomes ε, the rest is
/// unchanged. The result is unnormalized and b is cleared.
pub fn perturb_kernel(table: &CoeffTable, eps: f64) -> Result<CoeffTable, KernelError> {
    if !table.normalized {
        return Err(KernelError::UnnormalizedTable);
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(KernelError::EpsOutOfRange(eps));
    }
    let mut a = table.a.clone();
    a[0] = eps;
    Ok(CoeffTable {
        n_max: table.n_max,
        a,
        b: None,
        normalized: eps == 1.0,
        cnp_margin: None,
    })
}

impl CoeffTable {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// a_n for 0 <= n <= N.
    pub fn a(&self, n: usize) -> f64 {
        self.a[n]
    }

    pub fn a_slice(&self) -> &[f64] {
        &self.a
    }

    /// b_n for 1 <= n <= N; None until `invert_series` has run.
    pub fn b(&self, n: usize) -> Option<f64> {
        debug_assert!(n >= 1);
        self.b.as_ref().map(|b| b[n - 1])
    }

    pub fn b_slice(&self) -> Option<&[f64]> {
        self.b.as_deref()
    }

    pub fn cnp_margin(&self) -> Option<f64> {
        self.cnp_margin
    }

    pub fn has_b(&self) -> bool {
        self.b.is_some()
    }

    /// Reconstructs a_m = Σ_{n=1..m} b_n a_{m-n} and returns the largest
    /// relative discrepancy. Used to check the inversion round trip.
    pub fn convolution_residual(&self) -> Result<f64, KernelError> {
        let b = self.b.as_ref().ok_or(KernelError::BNotComputed)?;
        let mut worst = 0.0f64;
        for m in 1..=self.n_max {
            let mut s = 0.0;
            for n in 1..=m {
                s += b[n - 1] * self.a[m - n];
            }
            let denom = self.a[m].abs().max(f64::MIN_POSITIVE);
            worst = worst.max((s - self.a[m]).abs() / denom);
        }
        Ok(worst)
    }

    /// Wraps the table as a custom kernel spec so that evaluation-based
    /// operations (the pick module) can consume perturbed tables.
    pub fn to_custom_spec(&self, d: usize) -> Result<KernelSpec, KernelError> {
        KernelSpec::new(
            KernelFamily::Custom {
                coefficients: self.a.clone(),
                unnormalized: !self.normalized,
            },
            d,
        )
    }

    /// CSV export with columns n, a_n, b_n (b_0 and missing b left empty).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,a_n,b_n\n");
        for n in 0..=self.n_max {
            let b_str = if n == 0 {
                String::new()
            } else {
                self.b(n).map(fmt_f64).unwrap_or_default()
            };
            out.push_str(&format!("{},{},{}\n", n, fmt_f64(self.a[n]), b_str));
        }
        out
    }
}

/// Parses the structured-text form {"family": "...", ..., "d": 2, "N": 50}.
pub fn spec_from_json(text: &str) -> Result<KernelSpecFile, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn spec_to_json(file: &KernelSpecFile) -> String {
    serde_json::to_string(file).expect("kernel spec serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(family: KernelFamily, n: usize) -> CoeffTable {
        let spec = KernelSpec::new(family, 1).unwrap();
        invert_series(&compute_a(&spec, n).unwrap()).unwrap()
    }

    #[test]
    fn hardy_coefficients_are_ones() {
        let spec = KernelSpec::new(KernelFamily::Hardy, 1).unwrap();
        let t = compute_a(&spec, 3).unwrap();
        assert_eq!(t.a_slice(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn dirichlet_coefficients() {
        let spec = KernelSpec::new(KernelFamily::HS { s: -1.0 }, 1).unwrap();
        let t = compute_a(&spec, 3).unwrap();
        for (n, want) in [(0, 1.0), (1, 0.5), (2, 1.0 / 3.0), (3, 0.25)] {
            assert!((t.a(n) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn besov_half_coefficients() {
        let spec = KernelSpec::new(KernelFamily::BesovSobolev { sigma: 0.5 }, 1).unwrap();
        let t = compute_a(&spec, 2).unwrap();
        assert!((t.a(0) - 1.0).abs() < 1e-15);
        assert!((t.a(1) - 0.5).abs() < 1e-15);
        assert!((t.a(2) - 0.375).abs() < 1e-15);
    }

    #[test]
    fn hardy_inversion() {
        let t = table(KernelFamily::Hardy, 3);
        assert_eq!(t.b(1), Some(1.0));
        assert_eq!(t.b(2), Some(0.0));
        assert_eq!(t.b(3), Some(0.0));
        assert_eq!(t.cnp_margin(), Some(0.0));
    }

    #[test]
    fn bergman_inversion() {
        let t = table(KernelFamily::BergmanDisc, 3);
        assert_eq!(t.b(1), Some(2.0));
        assert_eq!(t.b(2), Some(-1.0));
        assert_eq!(t.b(3), Some(0.0));
        match is_cnp(&t, 1e-12).unwrap() {
            CnpVerdict::Fail { index, value } => {
                assert_eq!(index, 2);
                assert_eq!(value, -1.0);
            }
            CnpVerdict::Pass => panic!("Bergman must fail the CNP test"),
        }
    }

    #[test]
    fn dirichlet_inversion() {
        let t = table(KernelFamily::HS { s: -1.0 }, 3);
        assert!((t.b(1).unwrap() - 0.5).abs() < 1e-15);
        assert!((t.b(2).unwrap() - 1.0 / 12.0).abs() < 1e-15);
        assert!((t.b(3).unwrap() - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_cnp_passes_at_200() {
        let t = table(KernelFamily::HS { s: -1.0 }, 200);
        assert!(is_cnp(&t, 1e-12).unwrap().passed());
    }

    #[test]
    fn regularity_hardy_flat() {
        let t = table(KernelFamily::Hardy, 10);
        let p = regularity_profile(&t).unwrap();
        assert!(p.ratios.iter().all(|&r| r == 1.0));
        assert_eq!(p.max_tail_deviation, 0.0);
    }

    #[test]
    fn regularity_flags_geometric_gap() {
        let spec = KernelSpec::new(
            KernelFamily::Custom {
                coefficients: vec![1.0, 1.0, 4.0, 16.0, 64.0, 256.0, 1024.0, 4096.0],
                unnormalized: false,
            },
            1,
        )
        .unwrap();
        let t = compute_a(&spec, 7).unwrap();
        let p = regularity_profile(&t).unwrap();
        assert!(p.max_tail_deviation > 0.5);
    }

    #[test]
    fn summability_hardy() {
        let t = table(KernelFamily::Hardy, 10);
        let r = classify_summability(&t, 1e-12).unwrap();
        assert_eq!(r.sum_b, 1.0);
        assert!(r.b_sum_within_bound);
    }

    #[test]
    fn summability_hs_minus_two() {
        let t = table(KernelFamily::HS { s: -2.0 }, 1000);
        let r = classify_summability(&t, 1e-12).unwrap();
        // ζ(2) partial sums stay below the limit.
        assert!(r.sum_a < core::f64::consts::PI * core::f64::consts::PI / 6.0);
        assert!(r.sum_a > 1.6);
        assert!(r.sum_b < 1.0);
        assert!(r.cnp_pass);
    }

    #[test]
    fn eval_examples() {
        let hardy = KernelSpec::new(KernelFamily::Hardy, 1).unwrap();
        let zero = [C64::new(0.0, 0.0)];
        let half = [C64::new(0.5, 0.0)];
        let v = kernel_eval(&hardy, &zero, &zero, 10).unwrap();
        assert_eq!(v.value, C64::new(1.0, 0.0));
        let v = kernel_eval(&hardy, &half, &half, 200).unwrap();
        assert!((v.value.re - 4.0 / 3.0).abs() < 1e-12);
        assert!(v.tail_estimate.unwrap() < 1e-12);

        let da = KernelSpec::new(KernelFamily::DruryArveson, 2).unwrap();
        let p = [C64::new(0.5, 0.0), C64::new(0.5, 0.0)];
        let v = kernel_eval(&da, &p, &p, 200).unwrap();
        assert!((v.value.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eval_rejects_outside_points() {
        let hardy = KernelSpec::new(KernelFamily::Hardy, 1).unwrap();
        let outside = [C64::new(1.5, 0.0)];
        let inside = [C64::new(0.0, 0.0)];
        assert!(matches!(
            kernel_eval(&hardy, &outside, &inside, 5),
            Err(KernelError::PointOutsideDomain { .. })
        ));
    }

    #[test]
    fn perturbation() {
        let t = table(KernelFamily::Hardy, 4);
        let same = perturb_kernel(&t, 1.0).unwrap();
        assert_eq!(same.a_slice(), t.a_slice());
        assert!(same.is_normalized());

        let half = perturb_kernel(&t, 0.5).unwrap();
        assert_eq!(half.a(0), 0.5);
        assert_eq!(half.a(1), 1.0);
        assert!(!half.is_normalized());
        assert!(!half.has_b());

        let berg = table(KernelFamily::BergmanDisc, 4);
        let quarter = perturb_kernel(&berg, 0.25).unwrap();
        assert_eq!(quarter.a(0), 0.25);
        assert_eq!(quarter.a(1), 2.0);

        assert!(matches!(
            perturb_kernel(&t, 0.0),
            Err(KernelError::EpsOutOfRange(_))
        ));
        assert!(matches!(
            perturb_kernel(&half, 0.5),
            Err(KernelError::UnnormalizedTable)
        ));
    }

    #[test]
    fn unnormalized_inversion_divides_by_a0() {
        let t = table(KernelFamily::Hardy, 3);
        let pert = perturb_kernel(&t, 0.5).unwrap();
        let inv = invert_series(&pert).unwrap();
        // b_1 = a_1 / a_0 = 1 / 0.5.
        assert_eq!(inv.b(1), Some(2.0));
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"family": "h_s", "s": -1.0, "d": 2, "N": 50}"#;
        let file = spec_from_json(text).unwrap();
        assert_eq!(file.spec.family, KernelFamily::HS { s: -1.0 });
        assert_eq!(file.spec.d, 2);
        assert_eq!(file.n, Some(50));
        let back = spec_to_json(&file);
        let reparsed = spec_from_json(&back).unwrap();
        assert_eq!(reparsed.spec, file.spec);
    }

    #[test]
    fn extension_preserves_prefix_bitwise() {
        for family in [
            KernelFamily::HS { s: -0.5 },
            KernelFamily::BesovSobolev { sigma: 0.25 },
            KernelFamily::BergmanDisc,
        ] {
            let spec = KernelSpec::new(family, 1).unwrap();
            let short = compute_a(&spec, 20).unwrap();
            let long = compute_a(&spec, 45).unwrap();
            assert_eq!(&long.a_slice()[..21], short.a_slice());
        }
    }

    #[test]
    fn csv_shape() {
        let t = table(KernelFamily::Hardy, 2);
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,a_n,b_n");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,1.0000000000000000e0,"));
        assert!(lines[2].ends_with("1.0000000000000000e0"));
    }
}
