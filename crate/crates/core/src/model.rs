//! Finite-dimensional model operators: truncated multiplication tuples,
//! compressions to coinvariant subspaces, the hereditary calculus
//! 1/k(T,T*), the ψ_k row tuple, joint eigenvalues of commuting families,
//! and defect / commutator / Toeplitz diagnostics.

use std::collections::HashMap;

use thiserror::Error;

use crate::kernel::CoeffTable;
use crate::linalg::{self, LinalgError};
use crate::poly::{self, MonomialBasis, MultiIndex, PolyError};
use crate::{fmt_f64, CMatrix, CVector, C64};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("operator tuple needs at least one matrix")]
    EmptyTuple,
    #[error("matrix {index} is {rows}x{cols}; expected a square matrix of size {expected}")]
    ShapeMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected: usize,
    },
    #[error("b coefficients missing; run invert_series first")]
    BNotComputed,
    #[error("model operations require a normalized table (a_0 = 1)")]
    UnnormalizedTable,
    #[error("truncation order {m} exceeds the table order {n_max}")]
    OrderTooLarge { m: usize, n_max: usize },
    #[error("tuple is not jointly nilpotent up to length {order} (level norm {norm:.3e})")]
    NotNilpotent { order: usize, norm: f64 },
    #[error("compression basis is not isometric: ||Q^H Q - I|| = {defect:.3e}")]
    NotIsometric { defect: f64 },
    #[error("b_{index} = {value:.3e} is negative; psi row requires a CNP table")]
    CnpViolation { index: usize, value: f64 },
    #[error("degree {m} is outside the truncation order {n_max}")]
    DegreeOutOfRange { m: usize, n_max: usize },
    #[error("identity check requires 1 <= n <= m, got n = {n}, m = {m}")]
    BadOrders { n: usize, m: usize },
    #[error("commutator defect {defect:.3e} exceeds the joint-spectrum tolerance {tol:.3e}")]
    NotCommuting { defect: f64, tol: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("tuple text format: {0}")]
    Parse(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A tuple of d commuting complex square matrices. The commutator defect
/// max ||T_j T_k - T_k T_j|| is measured at construction.
#[derive(Debug, Clone)]
pub struct OperatorTuple {
    matrices: Vec<CMatrix>,
    commutator_defect: f64,
}

impl OperatorTuple {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self, ModelError> {
        if matrices.is_empty() {
            return Err(ModelError::EmptyTuple);
        }
        let n = matrices[0].nrows();
        for (index, m) in matrices.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(ModelError::ShapeMismatch {
                    index,
                    rows: m.nrows(),
                    cols: m.ncols(),
                    expected: n,
                });
            }
            linalg::ensure_finite(m)?;
        }
        let mut defect = 0.0f64;
        for j in 0..matrices.len() {
            for k in (j + 1)..matrices.len() {
                let c = &matrices[j] * &matrices[k] - &matrices[k] * &matrices[j];
                defect = defect.max(linalg::spectral_norm(&c));
            }
        }
        Ok(OperatorTuple {
            matrices,
            commutator_defect: defect,
        })
    }

    pub fn zeros(d: usize, n: usize) -> Self {
        OperatorTuple {
            matrices: vec![CMatrix::zeros(n, n); d],
            commutator_defect: 0.0,
        }
    }

    pub fn d(&self) -> usize {
        self.matrices.len()
    }

    /// Common matrix size.
    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, j: usize) -> &CMatrix {
        &self.matrices[j]
    }

    pub fn commutator_defect(&self) -> f64 {
        self.commutator_defect
    }

    pub fn scaled(&self, r: f64) -> Self {
        let matrices = self.matrices.iter().map(|m| m * C64::new(r, 0.0)).collect();
        OperatorTuple {
            matrices,
            commutator_defect: self.commutator_defect * r * r,
        }
    }

    /// Max spectral norm over the coordinates.
    pub fn max_norm(&self) -> f64 {
        self.matrices
            .iter()
            .map(linalg::spectral_norm)
            .fold(0.0, f64::max)
    }
}

/// Truncated shift tuple: the matrices of M_{z_j} on the degree <= N
/// polynomials, expressed in the orthonormalized monomial basis. The
/// entry taking e_α to e_{α+e_j} is √(weight(α+e_j)/weight(α)); raising
/// out of the truncation maps to zero.
pub fn shift_tuple(basis: &MonomialBasis) -> OperatorTuple {
    let n = basis.len();
    let mut matrices = vec![CMatrix::zeros(n, n); basis.d()];
    for col in 0..n {
        let alpha = basis.at(col);
        if alpha.degree() >= basis.n_max() {
            continue;
        }
        for (j, matrix) in matrices.iter_mut().enumerate() {
            let raised = alpha.raised(j);
            let row = basis
                .index_of(&raised)
                .expect("raised index stays within the truncation");
            let entry = (basis.weight(row) / basis.weight(col)).sqrt();
            matrix[(row, col)] = C64::new(entry, 0.0);
        }
    }
    OperatorTuple {
        matrices,
        commutator_defect: 0.0,
    }
}

/// Compression Q^H T_j Q to the column span of an isometry Q. The
/// commutator defect is re-measured: compressions to coinvariant
/// subspaces stay commuting, general ones need not.
pub fn compress(tuple: &OperatorTuple, q: &CMatrix) -> Result<OperatorTuple, ModelError> {
    if q.nrows() != tuple.dim() {
        return Err(ModelError::Dimension(format!(
            "subspace has {} rows, tuple acts on dimension {}",
            q.nrows(),
            tuple.dim()
        )));
    }
    let gram = q.adjoint() * q;
    let eye = CMatrix::identity(q.ncols(), q.ncols());
    let defect = linalg::max_abs(&(gram - eye));
    if defect > 1e-10 {
        return Err(ModelError::NotIsometric { defect });
    }
    let matrices = tuple.matrices.iter().map(|t| q.adjoint() * t * q).collect();
    OperatorTuple::new(matrices)
}

/// Walks the graded tree of products T^α level by level. Level n carries
/// all |α| = n in ascending lexicographic order; each product is formed
/// from its parent by a single multiplication. The visitor returns false
/// to stop the walk.
fn walk_graded_products<F>(
    tuple: &OperatorTuple,
    max_level: usize,
    mut visit: F,
) -> Result<(), ModelError>
where
    F: FnMut(usize, &[MultiIndex], &[CMatrix]) -> bool,
{
    let d = tuple.d();
    let n = tuple.dim();
    let mut alphas = vec![MultiIndex::zero(d)];
    let mut mats = vec![CMatrix::identity(n, n)];
    let mut lookup: HashMap<MultiIndex, usize> = alphas
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, a)| (a, i))
        .collect();
    if !visit(0, &alphas, &mats) {
        return Ok(());
    }
    for level in 1..=max_level {
        let next_alphas = poly::indices_of_degree(d, level);
        let mut next_mats = Vec::with_capacity(next_alphas.len());
        for alpha in &next_alphas {
            let j = alpha
                .first_positive()
                .expect("level >= 1 has a positive entry");
            let parent = alpha.lowered(j).unwrap();
            let parent_idx = lookup[&parent];
            next_mats.push(&tuple.matrices[j] * &mats[parent_idx]);
        }
        lookup = next_alphas
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, a)| (a, i))
            .collect();
        alphas = next_alphas;
        mats = next_mats;
        if !visit(level, &alphas, &mats) {
            return Ok(());
        }
    }
    Ok(())
}

/// All products T^α for |α| <= max_level, flattened in graded order.
/// Level 0 contributes the identity.
pub fn graded_products(
    tuple: &OperatorTuple,
    max_level: usize,
) -> Result<Vec<(MultiIndex, CMatrix)>, ModelError> {
    let mut out = Vec::new();
    walk_graded_products(tuple, max_level, |_level, alphas, mats| {
        for (alpha, m) in alphas.iter().zip(mats) {
            out.push((alpha.clone(), m.clone()));
        }
        true
    })?;
    Ok(out)
}

fn vanish_threshold(tuple: &OperatorTuple, level: usize) -> f64 {
    let scale = tuple
        .matrices
        .iter()
        .map(linalg::max_abs)
        .fold(0.0f64, f64::max)
        .max(1.0);
    1e-13 * scale.powi(level as i32)
}

/// Fast joint-nilpotency test for commuting tuples: each coordinate is
/// checked by repeated squaring. Commuting nilpotent families are
/// strictly triangularizable together, so coordinate-wise nilpotency is
/// equivalent to joint nilpotency.
pub fn is_jointly_nilpotent(tuple: &OperatorTuple) -> bool {
    let n = tuple.dim();
    for t in &tuple.matrices {
        let scale = linalg::max_abs(t).max(1.0);
        let mut power = t.clone();
        let mut length = 1usize;
        while length < n {
            power = &power * &power;
            length *= 2;
            if linalg::max_abs(&power) <= 1e-13 * scale.powi(length as i32) {
                break;
            }
        }
        if linalg::max_abs(&power) > 1e-13 * scale.powi(length as i32) {
            return false;
        }
    }
    true
}

/// Smallest L such that all products of length L vanish, or None if the
/// tuple is not jointly nilpotent. Commuting nilpotent families are
/// strictly triangularizable, so length = dim is the sharp cutoff.
pub fn nilpotency_order(tuple: &OperatorTuple) -> Result<Option<usize>, ModelError> {
    if !is_jointly_nilpotent(tuple) {
        return Ok(None);
    }
    let mut found = None;
    let max_level = tuple.dim();
    walk_graded_products(tuple, max_level, |level, _alphas, mats| {
        if level == 0 {
            return true;
        }
        let worst = mats.iter().map(linalg::max_abs).fold(0.0, f64::max);
        if worst <= vanish_threshold(tuple, level) {
            found = Some(level);
            false
        } else {
            true
        }
    })?;
    Ok(found)
}

/// Truncation strategy for the hereditary series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HereditaryOrder {
    /// Require joint nilpotency; the series is then exact and finite.
    AutoNilpotent,
    /// Truncate at an explicit order M with a reported tail bound.
    Explicit(usize),
}

/// Tail information for a truncated hereditary sum.
#[derive(Debug, Clone, PartialEq)]
pub enum TailBound {
    /// The sum is exact because the tuple is jointly nilpotent.
    ExactNilpotent,
    /// Rigorous bound on the discarded operator-norm mass.
    Bound(f64),
    /// No bound available (base >= 1, or unknown sign pattern in b).
    Inconclusive,
}

/// The operator D = I - Σ_{n=1}^{M} b_n Σ_{|α|=n} C(n,α) T^α (T*)^α with
/// its spectrum.
#[derive(Debug, Clone)]
pub struct HereditaryResult {
    pub matrix: CMatrix,
    pub order_used: usize,
    pub tail: TailBound,
    /// Eigenvalues of the symmetrized matrix, ascending.
    pub eigenvalues: Vec<f64>,
    pub min_eigenvalue: f64,
}

impl HereditaryResult {
    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol
    }
}

fn resolve_order(
    tuple: &OperatorTuple,
    table: &CoeffTable,
    mode: HereditaryOrder,
) -> Result<(usize, TailBound), ModelError> {
    match mode {
        HereditaryOrder::AutoNilpotent => {
            let order = nilpotency_order(tuple)?.ok_or(ModelError::NotNilpotent {
                order: tuple.dim(),
                norm: f64::NAN,
            })?;
            let m = order.saturating_sub(1);
            if m > table.n_max() {
                return Err(ModelError::OrderTooLarge {
                    m,
                    n_max: table.n_max(),
                });
            }
            Ok((m, TailBound::ExactNilpotent))
        }
        HereditaryOrder::Explicit(m) => {
            if m > table.n_max() {
                return Err(ModelError::OrderTooLarge {
                    m,
                    n_max: table.n_max(),
                });
            }
            let b = table.b_slice().ok_or(ModelError::BNotComputed)?;
            let base_sq = (tuple.d() as f64) * tuple.max_norm().powi(2);
            let tail = if base_sq < 1.0 {
                let mut partial = 0.0;
                for n in (m + 1)..=table.n_max() {
                    partial += b[n - 1].abs() * base_sq.powi(n as i32);
                }
                if b.iter().all(|&x| x >= -1e-12) {
                    // Beyond the table, b_n <= Σ b_n <= 1 for CNP kernels.
                    let geo = base_sq.powi(table.n_max() as i32 + 1) / (1.0 - base_sq);
                    TailBound::Bound(partial + geo)
                } else {
                    TailBound::Inconclusive
                }
            } else {
                TailBound::Inconclusive
            };
            Ok((m, tail))
        }
    }
}

/// Evaluates 1/k(T,T*) truncated at the resolved order. The products T^α
/// are assembled along the graded tree, one multiplication per index.
pub fn hereditary_1k(
    tuple: &OperatorTuple,
    table: &CoeffTable,
    mode: HereditaryOrder,
) -> Result<HereditaryResult, ModelError> {
    if !table.is_normalized() {
        return Err(ModelError::UnnormalizedTable);
    }
    let b = table.b_slice().ok_or(ModelError::BNotComputed)?.to_vec();
    let (order, tail) = resolve_order(tuple, table, mode)?;
    let n = tuple.dim();
    let mut d_matrix = CMatrix::identity(n, n);
    walk_graded_products(tuple, order, |level, alphas, mats| {
        if level == 0 {
            return true;
        }
        let b_n = b[level - 1];
        if b_n != 0.0 {
            for (alpha, t_alpha) in alphas.iter().zip(mats) {
                let c = poly::multinomial(level, alpha).expect("desk-scale multinomial") as f64;
                let term = t_alpha * t_alpha.adjoint();
                d_matrix -= term * C64::new(b_n * c, 0.0);
            }
        }
        true
    })?;
    let sym = linalg::hermitian_part(&d_matrix);
    let eig = linalg::hermitian_eigen(&sym)?;
    let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
    Ok(HereditaryResult {
        matrix: sym,
        order_used: order,
        tail,
        eigenvalues: eig.values,
        min_eigenvalue,
    })
}

/// Relative residual of Σ_{|α|=n} C(n,α) M^α (M*)^α p = (a_{m-n}/a_m) p
/// for a homogeneous polynomial p of degree m, on the truncated shift.
#[derive(Debug, Clone)]
pub struct TechnicalIdentity {
    pub residual: f64,
    pub factor: f64,
}

pub fn technical_identity_check(
    basis: &MonomialBasis,
    n: usize,
    m: usize,
    p: &CVector,
) -> Result<TechnicalIdentity, ModelError> {
    if m > basis.n_max() {
        return Err(ModelError::DegreeOutOfRange {
            m,
            n_max: basis.n_max(),
        });
    }
    if n == 0 || n > m {
        return Err(ModelError::BadOrders { n, m });
    }
    let block = basis.degree_range(m);
    if p.len() != block.len() {
        return Err(ModelError::Dimension(format!(
            "polynomial block has {} coefficients, degree {} has {}",
            p.len(),
            m,
            block.len()
        )));
    }
    let shifts = shift_tuple(basis);
    let mut v = CVector::zeros(basis.len());
    let scaled = basis.monomial_to_orthonormal(m, p);
    for (k, i) in block.enumerate() {
        v[i] = scaled[k];
    }
    let mut acc = CVector::zeros(basis.len());
    walk_graded_products(&shifts, n, |level, alphas, mats| {
        if level == n {
            for (alpha, s_alpha) in alphas.iter().zip(mats) {
                let c = poly::multinomial(level, alpha).expect("desk-scale multinomial") as f64;
                let w = s_alpha * (s_alpha.adjoint() * &v);
                acc += w * C64::new(c, 0.0);
            }
        }
        true
    })?;
    let factor = basis.a(m - n) / basis.a(m);
    let diff = &acc - &v * C64::new(factor, 0.0);
    let residual = diff.norm() / v.norm();
    Ok(TechnicalIdentity { residual, factor })
}

/// One member ψ_{k,α}(T) = b_{|α|}^{1/2} C(|α|,α)^{1/2} T^α of the row.
#[derive(Debug, Clone)]
pub struct PsiTerm {
    pub alpha: MultiIndex,
    /// The scalar b^{1/2} C^{1/2}.
    pub coefficient: f64,
    pub matrix: CMatrix,
}

/// The finite ψ_k row with its row sum Σ ψψ* and largest eigenvalue.
#[derive(Debug, Clone)]
pub struct PsiRow {
    pub terms: Vec<PsiTerm>,
    pub row_sum: CMatrix,
    pub max_eigenvalue: f64,
    pub order_used: usize,
    /// Σ_{n<=M} b_n, for partial-sum diagnostics.
    pub partial_b_sum: f64,
}

impl PsiRow {
    pub fn is_row_contraction(&self, tol: f64) -> bool {
        self.max_eigenvalue <= 1.0 + tol
    }
}

pub fn psi_row(
    tuple: &OperatorTuple,
    table: &CoeffTable,
    mode: HereditaryOrder,
    tol: f64,
) -> Result<PsiRow, ModelError> {
    if !table.is_normalized() {
        return Err(ModelError::UnnormalizedTable);
    }
    let b = table.b_slice().ok_or(ModelError::BNotComputed)?.to_vec();
    let (order, _tail) = resolve_order(tuple, table, mode)?;
    for n in 1..=order {
        if b[n - 1] < -tol {
            return Err(ModelError::CnpViolation {
                index: n,
                value: b[n - 1],
            });
        }
    }
    let n_dim = tuple.dim();
    let mut row_sum = CMatrix::zeros(n_dim, n_dim);
    let mut terms = Vec::new();
    let mut partial_b_sum = 0.0;
    walk_graded_products(tuple, order, |level, alphas, mats| {
        if level == 0 {
            return true;
        }
        let b_n = b[level - 1].max(0.0);
        partial_b_sum += b_n;
        for (alpha, t_alpha) in alphas.iter().zip(mats) {
            let c = poly::multinomial(level, alpha).expect("desk-scale multinomial") as f64;
            let coefficient = (b_n * c).sqrt();
            let psi = t_alpha * C64::new(coefficient, 0.0);
            row_sum += &psi * psi.adjoint();
            terms.push(PsiTerm {
                alpha: alpha.clone(),
                coefficient,
                matrix: psi,
            });
        }
        true
    })?;
    let eig = linalg::hermitian_eigen(&row_sum)?;
    let max_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    Ok(PsiRow {
        terms,
        row_sum,
        max_eigenvalue,
        order_used: order,
        partial_b_sum,
    })
}

/// Joint spectrum of a commuting tuple via simultaneous unitary
/// triangularization; diagonal entries are paired positionally.
#[derive(Debug, Clone)]
pub struct JointSpectrum {
    pub points: Vec<Vec<C64>>,
    pub max_norm: f64,
    pub residual: f64,
}

const JOINT_SEED: u64 = 0x7a9e_1b3c_55aa_0042;

pub fn joint_eigenvalues(tuple: &OperatorTuple) -> Result<JointSpectrum, ModelError> {
    let scale = tuple.max_norm();
    let tol = 1e-8 * scale.max(1.0);
    if tuple.commutator_defect() > tol {
        return Err(ModelError::NotCommuting {
            defect: tuple.commutator_defect(),
            tol,
        });
    }
    // Jointly nilpotent tuples have joint spectrum {0}; QR iterations smear
    // defective zero eigenvalues to ~eps^(1/k), so report the exact value.
    if is_jointly_nilpotent(tuple) {
        let zero = vec![C64::new(0.0, 0.0); tuple.d()];
        return Ok(JointSpectrum {
            points: vec![zero; tuple.dim()],
            max_norm: 0.0,
            residual: tuple.commutator_defect(),
        });
    }
    let tri = linalg::simultaneous_triangularize(&tuple.matrices, JOINT_SEED, 1e-8)?;
    let n = tuple.dim();
    let rotated: Vec<CMatrix> = tuple
        .matrices
        .iter()
        .map(|t| tri.q.adjoint() * t * &tri.q)
        .collect();
    let mut points = Vec::with_capacity(n);
    let mut max_norm = 0.0f64;
    for i in 0..n {
        let point: Vec<C64> = rotated.iter().map(|t| t[(i, i)]).collect();
        let norm = point.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        max_norm = max_norm.max(norm);
        points.push(point);
    }
    Ok(JointSpectrum {
        points,
        max_norm,
        residual: tri.residual,
    })
}

/// The defect operator I - Σ_j T_j T_j* with its spectrum (ascending).
#[derive(Debug, Clone)]
pub struct DefectReport {
    pub matrix: CMatrix,
    pub eigenvalues: Vec<f64>,
}

pub fn defect_operator(tuple: &OperatorTuple) -> Result<DefectReport, ModelError> {
    let n = tuple.dim();
    let mut d_matrix = CMatrix::identity(n, n);
    for t in &tuple.matrices {
        d_matrix -= t * t.adjoint();
    }
    let sym = linalg::hermitian_part(&d_matrix);
    let eig = linalg::hermitian_eigen(&sym)?;
    Ok(DefectReport {
        matrix: sym,
        eigenvalues: eig.values,
    })
}

/// Tail norms ||P_{>=m} [T_j, T_k*] P_{>=m}|| for every cutoff m <= N.
/// The `interior` variant drops the top degree block, which carries an
/// O(1) boundary artifact for truncated shifts.
#[derive(Debug, Clone)]
pub struct CommutatorTails {
    pub full: Vec<f64>,
    pub interior: Vec<f64>,
}

pub fn commutator_tail_norms(
    tuple: &OperatorTuple,
    degree_dims: &[usize],
) -> Result<CommutatorTails, ModelError> {
    let total: usize = degree_dims.iter().sum();
    if total != tuple.dim() {
        return Err(ModelError::Dimension(format!(
            "degree blocks sum to {}, tuple dimension is {}",
            total,
            tuple.dim()
        )));
    }
    let mut offsets = Vec::with_capacity(degree_dims.len() + 1);
    let mut acc = 0;
    for &dim in degree_dims {
        offsets.push(acc);
        acc += dim;
    }
    offsets.push(acc);
    let d = tuple.d();
    let mut commutators = Vec::new();
    for j in 0..d {
        for k in 0..d {
            let c = tuple.matrix(j) * tuple.matrix(k).adjoint()
                - tuple.matrix(k).adjoint() * tuple.matrix(j);
            commutators.push(c);
        }
    }
    let levels = degree_dims.len();
    let mut full = Vec::with_capacity(levels);
    let mut interior = Vec::with_capacity(levels);
    for m in 0..levels {
        let start = offsets[m];
        let full_len = total - start;
        let interior_len = offsets[levels - 1].saturating_sub(start);
        let mut worst_full = 0.0f64;
        let mut worst_interior = 0.0f64;
        for c in &commutators {
            let sub = c.view((start, start), (full_len, full_len)).into_owned();
            worst_full = worst_full.max(linalg::spectral_norm(&sub));
            if interior_len > 0 {
                let sub = c
                    .view((start, start), (interior_len, interior_len))
                    .into_owned();
                worst_interior = worst_interior.max(linalg::spectral_norm(&sub));
            }
        }
        full.push(worst_full);
        interior.push(worst_interior);
    }
    Ok(CommutatorTails { full, interior })
}

/// Entrywise defect S^A - S^B between shift matrices of two kernels in
/// their own orthonormal bases, realizing U M^A U* - M^B for the
/// degree-wise unitary U p = √a_n p. On degree-n input the defect is the
/// scalar √(a^A_n/a^A_{n+1}) - √(a^B_n/a^B_{n+1}) times the
/// Drury-Arveson shift applied to the input.
#[derive(Debug, Clone)]
pub struct ToeplitzDefect {
    pub defects: Vec<CMatrix>,
    /// Scalar factor per degree n = 0..N-1.
    pub magnitudes: Vec<f64>,
    /// Largest entry deviation from the scalar-multiple model.
    pub max_residual: f64,
}

pub fn toeplitz_defect(
    table_a: &CoeffTable,
    table_b: &CoeffTable,
    d: usize,
    n_max: usize,
) -> Result<ToeplitzDefect, ModelError> {
    let basis_a = poly::build_basis(table_a, d, n_max)?;
    let basis_b = poly::build_basis(table_b, d, n_max)?;
    let s_a = shift_tuple(&basis_a);
    let s_b = shift_tuple(&basis_b);
    let da_spec = crate::kernel::KernelSpec::new(crate::kernel::KernelFamily::DruryArveson, d)
        .expect("Drury-Arveson spec is valid");
    let da_table = crate::kernel::compute_a(&da_spec, n_max)
        .map_err(|e| ModelError::Dimension(e.to_string()))?;
    let basis_da = poly::build_basis(&da_table, d, n_max)?;
    let pattern = shift_tuple(&basis_da);

    let magnitudes: Vec<f64> = (0..n_max)
        .map(|n| {
            (table_a.a(n) / table_a.a(n + 1)).sqrt() - (table_b.a(n) / table_b.a(n + 1)).sqrt()
        })
        .collect();
    let mut defects = Vec::with_capacity(d);
    let mut max_residual = 0.0f64;
    for j in 0..d {
        let defect = s_a.matrix(j) - s_b.matrix(j);
        for col in 0..basis_a.len() {
            let deg = basis_a.at(col).degree();
            if deg >= n_max {
                continue;
            }
            for row in 0..basis_a.len() {
                let model = pattern.matrix(j)[(row, col)] * C64::new(magnitudes[deg], 0.0);
                max_residual = max_residual.max((defect[(row, col)] - model).norm());
            }
        }
        defects.push(defect);
    }
    Ok(ToeplitzDefect {
        defects,
        magnitudes,
        max_residual,
    })
}

/// Operator norm of the monomial multiplier S^β on the truncation versus
/// the exact monomial norm ||z^β||² (which equals 1/a_n for β = n·e_1).
#[derive(Debug, Clone)]
pub struct PowerNormReport {
    /// Squared operator norm of S^β on the degree <= N truncation.
    pub norm_sq: f64,
    /// Squared monomial norm ||z^β||² = weight(β).
    pub target_norm_sq: f64,
    /// True when the truncation attains the target within 1e-12 relative.
    pub attained: bool,
}

pub fn sampled_multiplier_power_norm(
    table: &CoeffTable,
    d: usize,
    n_max: usize,
    beta: &MultiIndex,
) -> Result<PowerNormReport, ModelError> {
    if beta.len() != d {
        return Err(ModelError::Dimension(format!(
            "exponent has {} entries, ambient dimension is {}",
            beta.len(),
            d
        )));
    }
    let k = beta.degree();
    if k > n_max {
        return Err(ModelError::DegreeOutOfRange { m: k, n_max });
    }
    let basis = poly::build_basis(table, d, n_max)?;
    // S^β maps e_α to √(w(α+β)/w(α)) e_{α+β}: one nonzero per row and
    // column, so the operator norm is the largest entry.
    let mut norm_sq = 0.0f64;
    for i in 0..basis.len() {
        let alpha = basis.at(i);
        if alpha.degree() + k > n_max {
            continue;
        }
        let target = alpha.plus(beta);
        let j = basis.index_of(&target).expect("within truncation");
        norm_sq = norm_sq.max(basis.weight(j) / basis.weight(i));
    }
    let target_idx = basis.index_of(beta).expect("beta within truncation");
    let target_norm_sq = basis.weight(target_idx);
    let attained = (norm_sq - target_norm_sq).abs() <= 1e-12 * target_norm_sq.abs();
    Ok(PowerNormReport {
        norm_sq,
        target_norm_sq,
        attained,
    })
}

// ---------------------------------------------------------------------------
// Text serialization: header "d n", then d blocks of n rows with n
// whitespace-separated "re,im" entries.

pub fn tuple_to_text(tuple: &OperatorTuple) -> String {
    let n = tuple.dim();
    let mut out = format!("{} {}\n", tuple.d(), n);
    for m in &tuple.matrices {
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| format!("{},{}", fmt_f64(m[(i, j)].re), fmt_f64(m[(i, j)].im)))
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn tuple_from_text(text: &str) -> Result<OperatorTuple, ModelError> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| ModelError::Parse("empty input".into()))?;
    let mut parts = header.split_whitespace();
    let d: usize = parts
        .next()
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| ModelError::Parse("header must be 'd n'".into()))?;
    let n: usize = parts
        .next()
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| ModelError::Parse("header must be 'd n'".into()))?;
    if d == 0 {
        return Err(ModelError::Parse("tuple needs d >= 1".into()));
    }
    let mut matrices = Vec::with_capacity(d);
    for matrix_idx in 0..d {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            let line = lines.next().ok_or_else(|| {
                ModelError::Parse(format!("matrix {} row {} missing", matrix_idx, i))
            })?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != n {
                return Err(ModelError::Parse(format!(
                    "matrix {} row {} has {} entries, expected {}",
                    matrix_idx,
                    i,
                    entries.len(),
                    n
                )));
            }
            for (j, entry) in entries.iter().enumerate() {
                let (re, im) = entry.split_once(',').ok_or_else(|| {
                    ModelError::Parse(format!("entry {:?} is not 're,im'", entry))
                })?;
                let re: f64 = re
                    .trim()
                    .parse()
                    .map_err(|_| ModelError::Parse(format!("bad float in {:?}", entry)))?;
                let im: f64 = im
                    .trim()
                    .parse()
                    .map_err(|_| ModelError::Parse(format!("bad float in {:?}", entry)))?;
                m[(i, j)] = C64::new(re, im);
            }
        }
        matrices.push(m);
    }
    OperatorTuple::new(matrices)
}
