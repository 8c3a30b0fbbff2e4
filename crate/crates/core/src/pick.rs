//! Pick-matrix feasibility for scalar and matrix-valued interpolation,
//! kernel-quotient positivity tests, Gram factorizations, and sampled
//! multiplier norms.

use nalgebra::linalg::Cholesky;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernel::{kernel_eval, KernelError, KernelSpec};
use crate::linalg::{self, LinalgError};
use crate::{CMatrix, C64};

#[derive(Debug, Error)]
pub enum PickError {
    #[error("node {index} has norm {norm} >= 1")]
    NodeOutsideBall { index: usize, norm: f64 },
    #[error("nodes {i} and {j} coincide")]
    DuplicateNodes { i: usize, j: usize },
    #[error("target {index} is {rows}x{cols}, expected {r}x{r}")]
    TargetShape {
        index: usize,
        rows: usize,
        cols: usize,
        r: usize,
    },
    #[error("problem has {nodes} nodes but {targets} targets")]
    CountMismatch { nodes: usize, targets: usize },
    #[error("node {index} has {got} coordinates, ambient dimension is {expected}")]
    NodeDimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("matrix is not Hermitian: defect {defect:.3e} at scale {scale:.3e}")]
    NonHermitian { defect: f64, scale: f64 },
    #[error("denominator kernel vanishes at node pair ({i},{j})")]
    SingularKernel { i: usize, j: usize },
    #[error("sample Gram matrix is numerically singular (min eigenvalue {min_eig:.3e})")]
    DegenerateSample { min_eig: f64 },
    #[error("gram matrix is not positive semidefinite: {0}")]
    FactorizationFailed(LinalgError),
    #[error("pick problem file: {0}")]
    Parse(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Interpolation data: nodes in the open ball and r x r matrix targets.
#[derive(Debug, Clone)]
pub struct PickProblem {
    pub d: usize,
    pub nodes: Vec<Vec<C64>>,
    pub target_dim: usize,
    pub targets: Vec<CMatrix>,
}

impl PickProblem {
    pub fn new(
        d: usize,
        nodes: Vec<Vec<C64>>,
        target_dim: usize,
        targets: Vec<CMatrix>,
    ) -> Result<Self, PickError> {
        if nodes.len() != targets.len() {
            return Err(PickError::CountMismatch {
                nodes: nodes.len(),
                targets: targets.len(),
            });
        }
        for (index, node) in nodes.iter().enumerate() {
            if node.len() != d {
                return Err(PickError::NodeDimension {
                    index,
                    expected: d,
                    got: node.len(),
                });
            }
            let norm = node.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm >= 1.0 {
                return Err(PickError::NodeOutsideBall { index, norm });
            }
        }
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                let dist: f64 = nodes[i]
                    .iter()
                    .zip(&nodes[j])
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum();
                if dist == 0.0 {
                    return Err(PickError::DuplicateNodes { i, j });
                }
            }
        }
        for (index, w) in targets.iter().enumerate() {
            if w.nrows() != target_dim || w.ncols() != target_dim {
                return Err(PickError::TargetShape {
                    index,
                    rows: w.nrows(),
                    cols: w.ncols(),
                    r: target_dim,
                });
            }
        }
        Ok(PickProblem {
            d,
            nodes,
            target_dim,
            targets,
        })
    }

    /// Same nodes with every target scaled by t.
    pub fn scaled_targets(&self, t: f64) -> Self {
        PickProblem {
            d: self.d,
            nodes: self.nodes.clone(),
            target_dim: self.target_dim,
            targets: self.targets.iter().map(|w| w * C64::new(t, 0.0)).collect(),
        }
    }
}

/// Positivity verdict at a relative tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct PsdVerdict {
    pub min_eigenvalue: f64,
    pub size: usize,
    pub tolerance: f64,
    /// Largest absolute eigenvalue; the tolerance is relative to it.
    pub scale: f64,
    pub psd: bool,
}

/// Hermitian check plus symmetrized eigenvalue verdict. The tolerance is
/// relative to the largest eigenvalue magnitude.
pub fn is_psd(matrix: &CMatrix, tol: f64) -> Result<PsdVerdict, PickError> {
    let defect = linalg::hermitian_defect(matrix);
    let scale_entries = linalg::max_abs(matrix).max(f64::MIN_POSITIVE);
    if defect > 1e-10 * scale_entries {
        return Err(PickError::NonHermitian {
            defect,
            scale: scale_entries,
        });
    }
    let eig = linalg::hermitian_eigen(matrix)?;
    let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
    let scale = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(PsdVerdict {
        min_eigenvalue,
        size: matrix.nrows(),
        tolerance: tol,
        scale,
        psd: min_eigenvalue >= -tol * scale.max(f64::MIN_POSITIVE),
    })
}

fn kernel_gram(
    spec: &KernelSpec,
    points: &[Vec<C64>],
    n_eval: usize,
) -> Result<CMatrix, PickError> {
    let n = points.len();
    let mut gram = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            gram[(i, j)] = kernel_eval(spec, &points[i], &points[j], n_eval)?.value;
        }
    }
    Ok(gram)
}

/// The block matrix [k(z_i, z_j)(I - W_i W_j*)].
pub fn pick_matrix(
    problem: &PickProblem,
    spec: &KernelSpec,
    n_eval: usize,
) -> Result<CMatrix, PickError> {
    let n = problem.nodes.len();
    let r = problem.target_dim;
    let gram = kernel_gram(spec, &problem.nodes, n_eval)?;
    let eye = CMatrix::identity(r, r);
    let mut out = CMatrix::zeros(n * r, n * r);
    for i in 0..n {
        for j in 0..n {
            let block = (&eye - &problem.targets[i] * problem.targets[j].adjoint()) * gram[(i, j)];
            out.view_mut((i * r, j * r), (r, r)).copy_from(&block);
        }
    }
    Ok(out)
}

/// Entrywise quotient Gram [k2(z_i,z_j) / k1(z_i,z_j)] with its verdict.
pub fn kernel_quotient_gram(
    spec_num: &KernelSpec,
    spec_den: &KernelSpec,
    points: &[Vec<C64>],
    n_eval: usize,
    tol: f64,
) -> Result<(CMatrix, PsdVerdict), PickError> {
    let num = kernel_gram(spec_num, points, n_eval)?;
    let den = kernel_gram(spec_den, points, n_eval)?;
    let n = points.len();
    let mut quotient = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if den[(i, j)].norm() < 1e-300 {
                return Err(PickError::SingularKernel { i, j });
            }
            quotient[(i, j)] = num[(i, j)] / den[(i, j)];
        }
    }
    let verdict = is_psd(&quotient, tol)?;
    Ok((quotient, verdict))
}

/// A negative 2x2 principal minor certifying non-positivity.
#[derive(Debug, Clone, Serialize)]
pub struct MinorCertificate {
    pub i: usize,
    pub j: usize,
    pub determinant: f64,
}

/// The most negative 2x2 principal minor of a Hermitian matrix, if any
/// pair exists.
pub fn worst_two_by_two_minor(matrix: &CMatrix) -> Option<MinorCertificate> {
    let n = matrix.nrows();
    let mut worst: Option<MinorCertificate> = None;
    for i in 0..n {
        for j in (i + 1)..n {
            let det = matrix[(i, i)].re * matrix[(j, j)].re - matrix[(i, j)].norm_sqr();
            if worst.as_ref().is_none_or(|w| det < w.determinant) {
                worst = Some(MinorCertificate {
                    i,
                    j,
                    determinant: det,
                });
            }
        }
    }
    worst
}

/// Rank-revealing factor F with F F^H ≈ gram, realizing vectors f(x) with
/// k2 = k1 ⟨f(y), f(x)⟩ on a sample.
#[derive(Debug, Clone)]
pub struct GramFactor {
    pub factor: CMatrix,
    pub rank: usize,
    pub residual: f64,
}

pub fn gram_factor(gram: &CMatrix, tol: f64) -> Result<GramFactor, PickError> {
    let chol = linalg::pivoted_cholesky(gram, tol).map_err(PickError::FactorizationFailed)?;
    Ok(GramFactor {
        factor: chol.factor,
        rank: chol.rank,
        residual: chol.residual,
    })
}

/// Smallest t >= 0 with [k(z_i,z_j)(t² - φ(z_i) φ(z_j)*)] psd: the
/// largest generalized eigenvalue of (G ∘ Φ) against G, square-rooted.
#[derive(Debug, Clone, Serialize)]
pub struct MultiplierNormBound {
    pub t: f64,
    pub gram_min_eigenvalue: f64,
    pub sample_size: usize,
}

pub fn sampled_multiplier_norm(
    phi: &[C64],
    spec: &KernelSpec,
    points: &[Vec<C64>],
    n_eval: usize,
) -> Result<MultiplierNormBound, PickError> {
    assert_eq!(
        phi.len(),
        points.len(),
        "need one multiplier value per sample point"
    );
    let gram = kernel_gram(spec, points, n_eval)?;
    let eig = linalg::hermitian_eigen(&gram)?;
    let min_eig = eig.values.first().copied().unwrap_or(0.0);
    let scale = eig.values.last().copied().unwrap_or(0.0);
    if min_eig <= 1e-13 * scale.max(f64::MIN_POSITIVE) {
        return Err(PickError::DegenerateSample { min_eig });
    }
    // G ∘ Φ = D_φ G D_φ^H.
    let n = points.len();
    let mut weighted = gram.clone();
    for i in 0..n {
        for j in 0..n {
            weighted[(i, j)] *= phi[i] * phi[j].conj();
        }
    }
    let chol = Cholesky::new(linalg::hermitian_part(&gram))
        .ok_or(PickError::DegenerateSample { min_eig })?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&weighted)
        .ok_or(PickError::DegenerateSample { min_eig })?;
    let m = l
        .solve_lower_triangular(&x.adjoint())
        .ok_or(PickError::DegenerateSample { min_eig })?
        .adjoint();
    let lam = linalg::hermitian_eigen(&m)?
        .values
        .last()
        .copied()
        .unwrap_or(0.0);
    Ok(MultiplierNormBound {
        t: lam.max(0.0).sqrt(),
        gram_min_eigenvalue: min_eig,
        sample_size: n,
    })
}

/// Bisection for the largest target scale t in [0, hi] keeping the Pick
/// matrix psd. The Pick matrix is monotone in t (Schur-product argument),
/// so the feasible set is an interval.
pub fn feasibility_threshold(
    problem: &PickProblem,
    spec: &KernelSpec,
    n_eval: usize,
    hi: f64,
    bisect_tol: f64,
    psd_tol: f64,
) -> Result<f64, PickError> {
    let feasible = |t: f64| -> Result<bool, PickError> {
        let m = pick_matrix(&problem.scaled_targets(t), spec, n_eval)?;
        Ok(is_psd(&m, psd_tol)?.psd)
    };
    if !feasible(0.0)? {
        return Ok(0.0);
    }
    if feasible(hi)? {
        return Ok(hi);
    }
    let (mut lo, mut hi) = (0.0, hi);
    while hi - lo > bisect_tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

// ---------------------------------------------------------------------------
// Structured-text ingestion:
// {"d":1, "nodes":[[0.0,0.0]], "r":1, "targets":[[[0.5,0.0]]]}
// A node is the flat list [re_1, im_1, ..., re_d, im_d]; a target is a
// list of r rows, each a flat list of 2r reals (re, im interleaved).

#[derive(Serialize, Deserialize)]
struct PickProblemFile {
    d: usize,
    nodes: Vec<Vec<f64>>,
    r: usize,
    targets: Vec<Vec<Vec<f64>>>,
}

pub fn problem_from_json(text: &str) -> Result<PickProblem, PickError> {
    let file: PickProblemFile =
        serde_json::from_str(text).map_err(|e| PickError::Parse(e.to_string()))?;
    let mut nodes = Vec::with_capacity(file.nodes.len());
    for (index, raw) in file.nodes.iter().enumerate() {
        if raw.len() != 2 * file.d {
            return Err(PickError::Parse(format!(
                "node {} has {} reals, expected {} (re/im per coordinate)",
                index,
                raw.len(),
                2 * file.d
            )));
        }
        nodes.push(
            raw.chunks(2)
                .map(|pair| C64::new(pair[0], pair[1]))
                .collect(),
        );
    }
    let mut targets = Vec::with_capacity(file.targets.len());
    for (index, raw) in file.targets.iter().enumerate() {
        let mut w = CMatrix::zeros(file.r, file.r);
        if raw.len() != file.r {
            return Err(PickError::Parse(format!(
                "target {} has {} rows, expected {}",
                index,
                raw.len(),
                file.r
            )));
        }
        for (i, row) in raw.iter().enumerate() {
            if row.len() != 2 * file.r {
                return Err(PickError::Parse(format!(
                    "target {} row {} has {} reals, expected {} (re/im per entry)",
                    index,
                    i,
                    row.len(),
                    2 * file.r
                )));
            }
            for (j, pair) in row.chunks(2).enumerate() {
                w[(i, j)] = C64::new(pair[0], pair[1]);
            }
        }
        targets.push(w);
    }
    PickProblem::new(file.d, nodes, file.r, targets)
}

pub fn problem_to_json(problem: &PickProblem) -> String {
    let file = PickProblemFile {
        d: problem.d,
        nodes: problem
            .nodes
            .iter()
            .map(|node| node.iter().flat_map(|c| [c.re, c.im]).collect())
            .collect(),
        r: problem.target_dim,
        targets: problem
            .targets
            .iter()
            .map(|w| {
                (0..w.nrows())
                    .map(|i| {
                        (0..w.ncols())
                            .flat_map(|j| [w[(i, j)].re, w[(i, j)].im])
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    };
    serde_json::to_string(&file).expect("pick problem serialization cannot fail")
}
