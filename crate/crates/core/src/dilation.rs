//! Agler-type coextension isometries for jointly nilpotent tuples with
//! 1/k(T,T*) ⪰ 0, verification of supplied coextensions, and the
//! spherical-unitary / direct-sum building blocks for candidate dilations.
//!
//! The construction places at basis index α the block
//! √(a_{|α|} C(|α|,α)) · Δ (T*)^α with Δ = (1/k(T,T*))^{1/2}. The
//! intertwining relation (S_j* ⊗ I) V = V T_j* then follows from the
//! weight recursion, and V^H V = I is the hereditary evaluation of the
//! formal identity k · (1/k) = 1, which is a finite sum by nilpotency.

use serde_json::json;
use thiserror::Error;

use crate::kernel::CoeffTable;
use crate::linalg::{self, LinalgError};
use crate::model::{self, HereditaryOrder, ModelError, OperatorTuple};
use crate::poly::{IdealSlices, MonomialBasis};
use crate::{CMatrix, C64};

#[derive(Debug, Error)]
pub enum DilationError {
    #[error("construction needs a normalized CNP table with b computed")]
    TableNotReady,
    #[error("tuple is not nilpotent within the truncation: products of length {needed} survive (order {got:?})")]
    TruncationTooSmall { needed: usize, got: Option<usize> },
    #[error("hereditary operator is not psd: min eigenvalue {min_eigenvalue:.3e} < -{tol:.3e}")]
    HereditaryNotPsd { min_eigenvalue: f64, tol: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("point {index} has norm {norm} off the unit sphere")]
    OffSphere { index: usize, norm: f64 },
    #[error("direct sum needs equal d, got {left} and {right}")]
    MixedDimensions { left: usize, right: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An isometry V: E -> H_trunc ⊗ E together with the residuals that
/// certify it as a coextension of T by the shift tuple.
#[derive(Debug, Clone)]
pub struct DilationCertificate {
    pub v: CMatrix,
    pub isometry_residual: f64,
    pub intertwining_residuals: Vec<f64>,
    pub compression_residuals: Vec<f64>,
    /// ||(P_I ⊗ I) V|| when an ideal annihilating T was supplied.
    pub ideal_containment_residual: Option<f64>,
    /// Negative eigenvalue mass clamped when taking the psd square root.
    pub clamped_mass: f64,
    pub tolerance: f64,
    pub valid: bool,
}

impl DilationCertificate {
    pub fn to_json(&self) -> String {
        let mut obj = json!({
            "isometry_residual": self.isometry_residual,
            "intertwining_residuals": self.intertwining_residuals,
            "compression_residuals": self.compression_residuals,
            "tolerance": self.tolerance,
            "valid": self.valid,
            "clamped_mass": self.clamped_mass,
        });
        if let Some(r) = self.ideal_containment_residual {
            obj["ideal_containment_residual"] = json!(r);
        }
        serde_json::to_string(&obj).expect("certificate serialization cannot fail")
    }

    fn revalidate(&mut self) {
        let mut worst = self.isometry_residual;
        for r in self
            .intertwining_residuals
            .iter()
            .chain(&self.compression_residuals)
        {
            worst = worst.max(*r);
        }
        if let Some(r) = self.ideal_containment_residual {
            worst = worst.max(r);
        }
        self.valid = worst <= self.tolerance;
    }

    /// Attaches the ideal-range containment residual ||(P_I ⊗ I) V||.
    pub fn with_ideal_residual(
        mut self,
        slices: &IdealSlices,
        basis: &MonomialBasis,
    ) -> DilationCertificate {
        let e = self.v.ncols();
        let span = slices.stacked(basis);
        let projected = linalg::apply_kron_left(&span.adjoint(), &self.v, e);
        self.ideal_containment_residual = Some(linalg::spectral_norm(&projected));
        self.revalidate();
        self
    }
}

fn residuals_against(
    v: &CMatrix,
    tuple: &OperatorTuple,
    shifts: &OperatorTuple,
    tol: f64,
    clamped_mass: f64,
) -> DilationCertificate {
    let e = v.ncols();
    let eye = CMatrix::identity(e, e);
    let isometry_residual = linalg::spectral_norm(&(v.adjoint() * v - eye));
    let mut intertwining_residuals = Vec::with_capacity(tuple.d());
    let mut compression_residuals = Vec::with_capacity(tuple.d());
    for j in 0..tuple.d() {
        let s_j = shifts.matrix(j);
        let t_j = tuple.matrix(j);
        let lhs = linalg::apply_kron_left(&s_j.adjoint(), v, e);
        let rhs = v * t_j.adjoint();
        intertwining_residuals.push(linalg::spectral_norm(&(lhs - rhs)));
        let compressed = v.adjoint() * linalg::apply_kron_left(s_j, v, e);
        compression_residuals.push(linalg::spectral_norm(&(compressed - t_j)));
    }
    let mut cert = DilationCertificate {
        v: v.clone(),
        isometry_residual,
        intertwining_residuals,
        compression_residuals,
        ideal_containment_residual: None,
        clamped_mass,
        tolerance: tol,
        valid: false,
    };
    cert.revalidate();
    cert
}

/// Constructs the coextension isometry for a jointly nilpotent tuple with
/// psd hereditary operator, against the truncated shift of `basis`.
pub fn agler_coextension(
    tuple: &OperatorTuple,
    table: &CoeffTable,
    basis: &MonomialBasis,
    tol: f64,
) -> Result<DilationCertificate, DilationError> {
    if !table.is_normalized() || !table.has_b() {
        return Err(DilationError::TableNotReady);
    }
    if basis.d() != tuple.d() {
        return Err(DilationError::Shape(format!(
            "basis has d = {}, tuple has d = {}",
            basis.d(),
            tuple.d()
        )));
    }
    let order = model::nilpotency_order(tuple)?;
    match order {
        Some(l) if l <= basis.n_max() + 1 => {}
        got => {
            return Err(DilationError::TruncationTooSmall {
                needed: basis.n_max() + 1,
                got,
            })
        }
    }
    let hereditary = model::hereditary_1k(tuple, table, HereditaryOrder::AutoNilpotent)?;
    if hereditary.min_eigenvalue < -tol {
        return Err(DilationError::HereditaryNotPsd {
            min_eigenvalue: hereditary.min_eigenvalue,
            tol,
        });
    }
    let (delta, clamped_mass) = linalg::psd_sqrt(&hereditary.matrix)?;
    let e = tuple.dim();
    let powers = model::graded_products(tuple, basis.n_max())?;
    let mut v = CMatrix::zeros(basis.len() * e, e);
    for (alpha, t_alpha) in &powers {
        let i = basis
            .index_of(alpha)
            .expect("products enumerate exactly the basis indices");
        // √(a_n C(n,α)) equals 1/‖z^α‖.
        let c = 1.0 / basis.weight(i).sqrt();
        let block = (&delta * t_alpha.adjoint()) * C64::new(c, 0.0);
        v.view_mut((i * e, 0), (e, e)).copy_from(&block);
    }
    let shifts = model::shift_tuple(basis);
    Ok(residuals_against(&v, tuple, &shifts, tol, clamped_mass))
}

/// Residual check of a supplied coextension candidate; no construction.
pub fn verify_coextension(
    v: &CMatrix,
    tuple: &OperatorTuple,
    shifts: &OperatorTuple,
    tol: f64,
) -> Result<DilationCertificate, DilationError> {
    if shifts.d() != tuple.d() {
        return Err(DilationError::Shape(format!(
            "shift tuple has d = {}, tuple has d = {}",
            shifts.d(),
            tuple.d()
        )));
    }
    let e = tuple.dim();
    if v.ncols() != e || v.nrows() != shifts.dim() * e {
        return Err(DilationError::Shape(format!(
            "V is {}x{}, expected {}x{}",
            v.nrows(),
            v.ncols(),
            shifts.dim() * e,
            e
        )));
    }
    Ok(residuals_against(v, tuple, shifts, tol, 0.0))
}

/// Diagonal spherical unitary from points on the unit sphere: U_j is the
/// diagonal of the j-th coordinates, so Σ U_j U_j* = I.
pub fn spherical_unitary(points: &[Vec<C64>]) -> Result<OperatorTuple, DilationError> {
    if points.is_empty() {
        return Err(DilationError::Shape(
            "need at least one sphere point".into(),
        ));
    }
    let d = points[0].len();
    let n = points.len();
    for (index, p) in points.iter().enumerate() {
        if p.len() != d {
            return Err(DilationError::Shape(format!(
                "point {} has {} coordinates, expected {}",
                index,
                p.len(),
                d
            )));
        }
        let norm = p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(DilationError::OffSphere { index, norm });
        }
    }
    let mut matrices = Vec::with_capacity(d);
    for j in 0..d {
        let mut m = CMatrix::zeros(n, n);
        for (i, p) in points.iter().enumerate() {
            m[(i, i)] = p[j];
        }
        matrices.push(m);
    }
    Ok(OperatorTuple::new(matrices)?)
}

/// Blockwise direct sum, used to assemble candidate dilations S^(κ) ⊕ U.
pub fn direct_sum(a: &OperatorTuple, b: &OperatorTuple) -> Result<OperatorTuple, DilationError> {
    if a.d() != b.d() {
        return Err(DilationError::MixedDimensions {
            left: a.d(),
            right: b.d(),
        });
    }
    let matrices = (0..a.d())
        .map(|j| linalg::direct_sum(a.matrix(j), b.matrix(j)))
        .collect();
    Ok(OperatorTuple::new(matrices)?)
}
