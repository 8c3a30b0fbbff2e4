//! Exact combinatorics of the graded monomial basis in d variables:
//! multi-index enumeration, multinomial coefficients, inner-product
//! weights, homogeneous ideals and their degree slices, and orthogonal
//! complements ℋ_𝓘 as coordinate subspaces.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::CoeffTable;
use crate::linalg::{self, LinalgError};
use crate::{fmt_f64, CMatrix, CVector, C64};

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("multi-index degree {degree} does not match n = {n}")]
    DegreeMismatch { n: usize, degree: usize },
    #[error("multinomial coefficient overflows on n = {n}")]
    Overflow { n: usize },
    #[error("basis construction requires a normalized table")]
    UnnormalizedTable,
    #[error("table holds coefficients up to {have} but the basis needs degree {need}")]
    TableTooShort { need: usize, have: usize },
    #[error("multi-index has {got} exponents, ambient dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ideal contains a nonzero constant (generator of degree 0): it is not proper")]
    ImproperIdeal,
    #[error("generator {index} is zero or has no terms")]
    ZeroGenerator { index: usize },
    #[error("generator {index} mixes degrees: term {term} has degree {got}, declared {declared}")]
    InhomogeneousGenerator {
        index: usize,
        term: String,
        got: usize,
        declared: usize,
    },
    #[error("cannot parse exponent key {key:?}")]
    ExponentParse { key: String },
    #[error("degree {0} exceeds the basis truncation order")]
    DegreeOutOfRange(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Exponent tuple α ∈ ℕ^d.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    exponents: Vec<u32>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex { exponents }
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex {
            exponents: vec![0; d],
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// |α| = Σ α_j.
    pub fn degree(&self) -> usize {
        self.exponents.iter().map(|&e| e as usize).sum()
    }

    /// α + e_j.
    pub fn raised(&self, j: usize) -> Self {
        let mut exp = self.exponents.clone();
        exp[j] += 1;
        MultiIndex { exponents: exp }
    }

    /// α - e_j if α_j > 0.
    pub fn lowered(&self, j: usize) -> Option<Self> {
        if self.exponents[j] == 0 {
            return None;
        }
        let mut exp = self.exponents.clone();
        exp[j] -= 1;
        Some(MultiIndex { exponents: exp })
    }

    /// Entrywise sum.
    pub fn plus(&self, other: &Self) -> Self {
        let exp = self
            .exponents
            .iter()
            .zip(&other.exponents)
            .map(|(a, b)| a + b)
            .collect();
        MultiIndex { exponents: exp }
    }

    /// First coordinate with a positive exponent.
    pub fn first_positive(&self) -> Option<usize> {
        self.exponents.iter().position(|&e| e > 0)
    }

    /// w^α for a point w.
    pub fn monomial_at(&self, w: &[C64]) -> C64 {
        self.exponents
            .iter()
            .zip(w)
            .map(|(&e, wi)| wi.powi(e as i32))
            .product()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exponents.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", e)?;
        }
        write!(f, ")")
    }
}

fn binomial_u128(n: u128, k: u128) -> Option<u128> {
    let k = k.min(n - k.min(n));
    let mut result: u128 = 1;
    for i in 1..=k {
        result = result.checked_mul(n - k + i)?;
        result /= i;
    }
    Some(result)
}

/// Exact multinomial coefficient C(n, α) = n! / (α_1! ··· α_d!).
pub fn multinomial(n: usize, alpha: &MultiIndex) -> Result<u128, PolyError> {
    if alpha.degree() != n {
        return Err(PolyError::DegreeMismatch {
            n,
            degree: alpha.degree(),
        });
    }
    let mut remaining = n as u128;
    let mut result: u128 = 1;
    for &e in alpha.exponents() {
        let c = binomial_u128(remaining, e as u128).ok_or(PolyError::Overflow { n })?;
        result = result.checked_mul(c).ok_or(PolyError::Overflow { n })?;
        remaining -= e as u128;
    }
    Ok(result)
}

/// All multi-indices of fixed degree in ascending lexicographic order.
pub fn indices_of_degree(d: usize, degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; d];
    fill_indices(&mut out, &mut current, 0, degree);
    out
}

fn fill_indices(out: &mut Vec<MultiIndex>, current: &mut Vec<u32>, pos: usize, remaining: usize) {
    if pos + 1 == current.len() {
        current[pos] = remaining as u32;
        out.push(MultiIndex::new(current.clone()));
        return;
    }
    for e in 0..=remaining {
        current[pos] = e as u32;
        fill_indices(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}

/// Number of degree-m monomials in d variables, C(m + d - 1, d - 1).
pub fn dimension_of_degree(d: usize, m: usize) -> u128 {
    binomial_u128((m + d - 1) as u128, (d - 1) as u128).expect("desk-scale dimensions fit u128")
}

/// Graded monomial basis of degree <= N with exact inner-product weights
/// ‖z^α‖² = (1/a_{|α|}) · (α!/|α|!).
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    d: usize,
    n_max: usize,
    indices: Vec<MultiIndex>,
    degree_offsets: Vec<usize>,
    weights: Vec<f64>,
    lookup: HashMap<MultiIndex, usize>,
    a: Vec<f64>,
}

/// Builds the basis from a normalized coefficient table.
pub fn build_basis(table: &CoeffTable, d: usize, n_max: usize) -> Result<MonomialBasis, PolyError> {
    if !table.is_normalized() {
        return Err(PolyError::UnnormalizedTable);
    }
    if table.n_max() < n_max {
        return Err(PolyError::TableTooShort {
            need: n_max,
            have: table.n_max(),
        });
    }
    let mut indices = Vec::new();
    let mut degree_offsets = Vec::with_capacity(n_max + 2);
    for m in 0..=n_max {
        degree_offsets.push(indices.len());
        indices.extend(indices_of_degree(d, m));
    }
    degree_offsets.push(indices.len());
    let mut weights = Vec::with_capacity(indices.len());
    for alpha in &indices {
        let m = alpha.degree();
        let c = multinomial(m, alpha)? as f64;
        weights.push(1.0 / (table.a(m) * c));
    }
    let lookup = indices
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, alpha)| (alpha, i))
        .collect();
    Ok(MonomialBasis {
        d,
        n_max,
        indices,
        degree_offsets,
        weights,
        lookup,
        a: table.a_slice()[..=n_max].to_vec(),
    })
}

impl MonomialBasis {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn at(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn index_of(&self, alpha: &MultiIndex) -> Option<usize> {
        self.lookup.get(alpha).copied()
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn a(&self, n: usize) -> f64 {
        self.a[n]
    }

    /// Index range of the degree-m block.
    pub fn degree_range(&self, m: usize) -> std::ops::Range<usize> {
        self.degree_offsets[m]..self.degree_offsets[m + 1]
    }

    pub fn dim_of_degree(&self, m: usize) -> usize {
        self.degree_offsets[m + 1] - self.degree_offsets[m]
    }

    pub fn degree_dims(&self) -> Vec<usize> {
        (0..=self.n_max).map(|m| self.dim_of_degree(m)).collect()
    }

    /// Converts monomial coefficients on the degree-m block into
    /// orthonormal coordinates (scaling by ‖z^α‖).
    pub fn monomial_to_orthonormal(&self, m: usize, coeffs: &CVector) -> CVector {
        let range = self.degree_range(m);
        let mut out = coeffs.clone();
        for (k, i) in range.enumerate() {
            out[k] *= C64::new(self.weights[i].sqrt(), 0.0);
        }
        out
    }

    /// CSV dump with columns index, exponents, degree, weight.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,exponents,degree,weight\n");
        for (i, alpha) in self.indices.iter().enumerate() {
            out.push_str(&format!(
                "{},\"{}\",{},{}\n",
                i,
                alpha,
                alpha.degree(),
                fmt_f64(self.weights[i])
            ));
        }
        out
    }
}

/// One generator of a homogeneous ideal: a homogeneous polynomial stored
/// as (degree, coefficients over that degree's monomials).
#[derive(Debug, Clone)]
pub struct Generator {
    pub degree: usize,
    pub terms: Vec<(MultiIndex, f64)>,
}

/// A proper homogeneous ideal given by generators.
#[derive(Debug, Clone)]
pub struct HomogeneousIdeal {
    d: usize,
    generators: Vec<Generator>,
}

impl HomogeneousIdeal {
    pub fn new(d: usize, generators: Vec<Generator>) -> Result<Self, PolyError> {
        for (index, g) in generators.iter().enumerate() {
            if g.terms.is_empty() || g.terms.iter().all(|(_, c)| *c == 0.0) {
                return Err(PolyError::ZeroGenerator { index });
            }
            if g.degree == 0 {
                return Err(PolyError::ImproperIdeal);
            }
            for (alpha, _) in &g.terms {
                if alpha.len() != d {
                    return Err(PolyError::DimensionMismatch {
                        expected: d,
                        got: alpha.len(),
                    });
                }
                if alpha.degree() != g.degree {
                    return Err(PolyError::InhomogeneousGenerator {
                        index,
                        term: alpha.to_string(),
                        got: alpha.degree(),
                        declared: g.degree,
                    });
                }
            }
        }
        Ok(HomogeneousIdeal { d, generators })
    }

    /// The power ideal ⟨z_1, ..., z_d⟩^degree.
    pub fn maximal_power(d: usize, degree: usize) -> Self {
        let generators = indices_of_degree(d, degree)
            .into_iter()
            .map(|alpha| Generator {
                degree,
                terms: vec![(alpha, 1.0)],
            })
            .collect();
        HomogeneousIdeal { d, generators }
    }

    /// A single-monomial ideal ⟨z^α⟩.
    pub fn monomial(d: usize, alpha: MultiIndex) -> Result<Self, PolyError> {
        let degree = alpha.degree();
        HomogeneousIdeal::new(
            d,
            vec![Generator {
                degree,
                terms: vec![(alpha, 1.0)],
            }],
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }
}

/// Per-degree spans of the ideal inside the graded basis, in orthonormal
/// coordinates.
#[derive(Debug, Clone)]
pub struct IdealSlices {
    /// For each degree m <= N: orthonormal columns spanning the degree-m
    /// slice of the ideal (orthonormal coordinates of the degree block).
    pub spans: Vec<CMatrix>,
    pub dims: Vec<usize>,
}

/// Orthonormal bases of the per-degree orthogonal complements ℋ_𝓘 ∩
/// (degree m), in orthonormal coordinates of each degree block.
#[derive(Debug, Clone)]
pub struct IdealComplementBasis {
    pub blocks: Vec<CMatrix>,
    pub dims: Vec<usize>,
}

impl IdealSlices {
    /// Embeds all per-degree spans into the full basis index space as one
    /// matrix of orthonormal columns.
    pub fn stacked(&self, basis: &MonomialBasis) -> CMatrix {
        stack_blocks(&self.spans, basis)
    }
}

impl IdealComplementBasis {
    pub fn stacked(&self, basis: &MonomialBasis) -> CMatrix {
        stack_blocks(&self.blocks, basis)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }
}

fn stack_blocks(blocks: &[CMatrix], basis: &MonomialBasis) -> CMatrix {
    let total: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(basis.len(), total);
    let mut col = 0;
    for (m, block) in blocks.iter().enumerate() {
        let rows = basis.degree_range(m);
        for j in 0..block.ncols() {
            for (k, i) in rows.clone().enumerate() {
                out[(i, col)] = block[(k, j)];
            }
            col += 1;
        }
    }
    out
}

/// Coefficient vectors (monomial coordinates on the degree-m block) of all
/// products q·g with deg(q·g) = m, for g a generator and q a monomial.
fn slice_product_vectors(
    ideal: &HomogeneousIdeal,
    basis: &MonomialBasis,
    m: usize,
) -> Vec<CVector> {
    let block = basis.degree_range(m);
    let block_start = block.start;
    let block_len = block.len();
    let mut vectors = Vec::new();
    for g in ideal.generators() {
        if g.degree > m {
            continue;
        }
        for q in indices_of_degree(ideal.d(), m - g.degree) {
            let mut v = CVector::zeros(block_len);
            for (alpha, coeff) in &g.terms {
                let target = alpha.plus(&q);
                let idx = basis
                    .index_of(&target)
                    .expect("product stays within the basis by construction");
                v[idx - block_start] += C64::new(*coeff, 0.0);
            }
            vectors.push(v);
        }
    }
    vectors
}

/// Computes the per-degree spans of the ideal for every degree m <= N. The
/// spans are orthonormal in the weighted inner product (represented in
/// orthonormal coordinates).
pub fn ideal_slices(
    ideal: &HomogeneousIdeal,
    basis: &MonomialBasis,
    rel_tol: f64,
) -> Result<IdealSlices, PolyError> {
    compute_slices(ideal, basis, rel_tol).map(|(slices, _)| slices)
}

/// Computes the orthogonal complement ℋ_𝓘 per degree.
pub fn complement_basis(
    ideal: &HomogeneousIdeal,
    basis: &MonomialBasis,
    rel_tol: f64,
) -> Result<IdealComplementBasis, PolyError> {
    compute_slices(ideal, basis, rel_tol).map(|(_, complement)| complement)
}

/// Slices and complements in one pass.
pub fn ideal_decomposition(
    ideal: &HomogeneousIdeal,
    basis: &MonomialBasis,
    rel_tol: f64,
) -> Result<(IdealSlices, IdealComplementBasis), PolyError> {
    compute_slices(ideal, basis, rel_tol)
}

fn compute_slices(
    ideal: &HomogeneousIdeal,
    basis: &MonomialBasis,
    rel_tol: f64,
) -> Result<(IdealSlices, IdealComplementBasis), PolyError> {
    if ideal.d() != basis.d() {
        return Err(PolyError::DimensionMismatch {
            expected: basis.d(),
            got: ideal.d(),
        });
    }
    let mut spans = Vec::with_capacity(basis.n_max() + 1);
    let mut span_dims = Vec::with_capacity(basis.n_max() + 1);
    let mut complements = Vec::with_capacity(basis.n_max() + 1);
    let mut comp_dims = Vec::with_capacity(basis.n_max() + 1);
    for m in 0..=basis.n_max() {
        let vectors = slice_product_vectors(ideal, basis, m);
        let block_len = basis.dim_of_degree(m);
        let mut a = CMatrix::zeros(block_len, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            let scaled = basis.monomial_to_orthonormal(m, v);
            a.set_column(j, &scaled);
        }
        let split = linalg::span_and_complement(&a, rel_tol)?;
        span_dims.push(split.span.ncols());
        comp_dims.push(split.complement.ncols());
        spans.push(split.span);
        complements.push(split.complement);
    }
    Ok((
        IdealSlices {
            spans,
            dims: span_dims,
        },
        IdealComplementBasis {
            blocks: complements,
            dims: comp_dims,
        },
    ))
}

/// Coefficient vector of ⟨·,w⟩ⁿ = Σ_{|α|=n} C(n,α) w̄^α z^α on the degree-n
/// block, together with its ℋ-norm squared.
pub struct KernelPowerVector {
    /// Monomial coordinates over the degree-n block.
    pub coeffs: CVector,
    /// Orthonormal coordinates over the degree-n block.
    pub orthonormal: CVector,
    pub norm_sq: f64,
}

pub fn kernel_power_vector(
    basis: &MonomialBasis,
    w: &[C64],
    n: usize,
) -> Result<KernelPowerVector, PolyError> {
    if w.len() != basis.d() {
        return Err(PolyError::DimensionMismatch {
            expected: basis.d(),
            got: w.len(),
        });
    }
    if n > basis.n_max() {
        return Err(PolyError::DegreeOutOfRange(n));
    }
    let w_conj: Vec<C64> = w.iter().map(|c| c.conj()).collect();
    let block = basis.degree_range(n);
    let block_start = block.start;
    let mut coeffs = CVector::zeros(block.len());
    for i in block {
        let alpha = basis.at(i);
        let c = multinomial(n, alpha)? as f64;
        coeffs[i - block_start] = alpha.monomial_at(&w_conj) * C64::new(c, 0.0);
    }
    let orthonormal = basis.monomial_to_orthonormal(n, &coeffs);
    let norm_sq = orthonormal.iter().map(|c| c.norm_sqr()).sum();
    Ok(KernelPowerVector {
        coeffs,
        orthonormal,
        norm_sq,
    })
}

// ---------------------------------------------------------------------------
// Structured-text ingestion: {"d":2, "generators":[{"degree":2, "coeffs":{"(1,1)":1.0}}]}

#[derive(Serialize, Deserialize)]
struct IdealFile {
    d: usize,
    generators: Vec<GeneratorFile>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorFile {
    degree: usize,
    coeffs: HashMap<String, f64>,
}

fn parse_exponent_key(key: &str, d: usize) -> Result<MultiIndex, PolyError> {
    let trimmed = key.trim().trim_start_matches('(').trim_end_matches(')');
    let parts: Result<Vec<u32>, _> = trimmed.split(',').map(|p| p.trim().parse()).collect();
    match parts {
        Ok(exp) if exp.len() == d => Ok(MultiIndex::new(exp)),
        _ => Err(PolyError::ExponentParse {
            key: key.to_string(),
        }),
    }
}

pub fn ideal_from_json(text: &str) -> Result<HomogeneousIdeal, PolyError> {
    let file: IdealFile =
        serde_json::from_str(text).map_err(|e| PolyError::ExponentParse { key: e.to_string() })?;
    let mut generators = Vec::new();
    for g in file.generators {
        let mut terms = Vec::new();
        let mut keys: Vec<_> = g.coeffs.into_iter().collect();
        keys.sort_by(|a, b| a.0.cmp(&b.0));
        for (key, coeff) in keys {
            terms.push((parse_exponent_key(&key, file.d)?, coeff));
        }
        generators.push(Generator {
            degree: g.degree,
            terms,
        });
    }
    HomogeneousIdeal::new(file.d, generators)
}

pub fn ideal_to_json(ideal: &HomogeneousIdeal) -> String {
    let file = IdealFile {
        d: ideal.d(),
        generators: ideal
            .generators()
            .iter()
            .map(|g| GeneratorFile {
                degree: g.degree,
                coeffs: g
                    .terms
                    .iter()
                    .map(|(alpha, c)| (alpha.to_string(), *c))
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("ideal serialization cannot fail")
}
