//! Dense complex linear algebra helpers shared by the operator modules:
//! Hermitian eigensolves, spectral norms, psd square roots, pivoted
//! Cholesky, span/complement splits, and simultaneous triangularization
//! of commuting families.

use nalgebra::linalg::{Schur, SymmetricEigen, QR};
use thiserror::Error;

use crate::{CMatrix, CVector, C64};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error(
        "matrix is not Hermitian: asymmetry {defect:.3e} exceeds {tol:.3e} at scale {scale:.3e}"
    )]
    NotHermitian { defect: f64, tol: f64, scale: f64 },
    #[error("eigensolver failed to converge on a {n}x{n} matrix")]
    EigenFailed { n: usize },
    #[error("Schur decomposition failed to converge on a {n}x{n} matrix")]
    SchurFailed { n: usize },
    #[error("matrix is not positive semidefinite: pivot {pivot:.3e} at step {step} is below {floor:.3e}")]
    NotPsd { pivot: f64, step: usize, floor: f64 },
    #[error("simultaneous triangularization failed: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    Degenerate { residual: f64, tol: f64 },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn ensure_finite(m: &CMatrix) -> Result<(), LinalgError> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

/// Max entry magnitude of `m - m^H`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut defect = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            defect = defect.max(d);
        }
    }
    defect
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Eigendecomposition of the Hermitian part of `m`, eigenvalues ascending.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen, LinalgError> {
    ensure_finite(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = hermitian_part(m);
    let eig =
        SymmetricEigen::try_new(sym, f64::EPSILON, 0).ok_or(LinalgError::EigenFailed { n })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianEigen { values, vectors })
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &CMatrix) -> Result<f64, LinalgError> {
    Ok(hermitian_eigen(m)?.values.first().copied().unwrap_or(0.0))
}

/// Spectral norm via the Hermitian eigendecomposition of m^H m.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    match hermitian_eigen(&gram) {
        Ok(eig) => eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        Err(_) => f64::NAN,
    }
}

/// Positive semidefinite square root with clamping of small negative
/// eigenvalues. Returns the root and the total clamped mass.
pub fn psd_sqrt(m: &CMatrix) -> Result<(CMatrix, f64), LinalgError> {
    let eig = hermitian_eigen(m)?;
    let n = eig.values.len();
    let mut clamped = 0.0;
    let mut scaled = eig.vectors.clone();
    for k in 0..n {
        let lam = eig.values[k];
        if lam < 0.0 {
            clamped += -lam;
        }
        let s = C64::new(lam.max(0.0).sqrt(), 0.0);
        let mut col = scaled.column_mut(k);
        col *= s;
    }
    Ok((&scaled * eig.vectors.adjoint(), clamped))
}

pub struct PivotedCholesky {
    /// n x rank factor with F F^H approximating the input.
    pub factor: CMatrix,
    pub rank: usize,
    /// Spectral norm of F F^H - G.
    pub residual: f64,
}

/// Pivoted Cholesky factorization with rank truncation at `tol` relative to
/// the largest diagonal entry. Fails if a pivot is significantly negative.
pub fn pivoted_cholesky(g: &CMatrix, tol: f64) -> Result<PivotedCholesky, LinalgError> {
    ensure_finite(g)?;
    let n = g.nrows();
    let mut work = g.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = CMatrix::zeros(n, n);
    let scale = (0..n)
        .map(|i| g[(i, i)].re.abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut rank = 0;
    for k in 0..n {
        // Select the largest remaining diagonal entry as pivot.
        let (p, pivot) = (k..n)
            .map(|i| (i, work[(i, i)].re))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot < -tol * scale {
            return Err(LinalgError::NotPsd {
                pivot,
                step: k,
                floor: -tol * scale,
            });
        }
        if pivot <= tol * scale {
            break;
        }
        work.swap_rows(k, p);
        work.swap_columns(k, p);
        l.swap_rows(k, p);
        perm.swap(k, p);
        let root = pivot.sqrt();
        l[(k, k)] = C64::new(root, 0.0);
        for i in (k + 1)..n {
            l[(i, k)] = work[(i, k)] / root;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let update = l[(i, k)] * l[(j, k)].conj();
                work[(i, j)] -= update;
            }
        }
        rank = k + 1;
    }
    // Undo the permutation and truncate to the numerical rank.
    let mut factor = CMatrix::zeros(n, rank);
    for i in 0..n {
        for j in 0..rank {
            factor[(perm[i], j)] = l[(i, j)];
        }
    }
    let residual = spectral_norm(&(&factor * factor.adjoint() - g));
    Ok(PivotedCholesky {
        factor,
        rank,
        residual,
    })
}

pub struct SpanComplement {
    /// Orthonormal basis for the column span.
    pub span: CMatrix,
    /// Orthonormal basis for the orthogonal complement of the span.
    pub complement: CMatrix,
    /// Singular values of the input, descending.
    pub singular_values: Vec<f64>,
}

/// Splits the ambient space into the column span of `a` and its orthogonal
/// complement. Rank decisions are made at `rel_tol` times the largest
/// singular value.
pub fn span_and_complement(a: &CMatrix, rel_tol: f64) -> Result<SpanComplement, LinalgError> {
    let k = a.nrows();
    if a.ncols() == 0 {
        return Ok(SpanComplement {
            span: CMatrix::zeros(k, 0),
            complement: CMatrix::identity(k, k),
            singular_values: Vec::new(),
        });
    }
    let gram = a * a.adjoint();
    let eig = hermitian_eigen(&gram)?;
    // Eigenvalues ascending; singular values are their square roots.
    let sing: Vec<f64> = eig.values.iter().rev().map(|l| l.max(0.0).sqrt()).collect();
    let sigma_max = sing.first().copied().unwrap_or(0.0);
    let threshold = rel_tol * sigma_max;
    let rank = sing.iter().take_while(|&&s| s > threshold).count();
    let mut span = CMatrix::zeros(k, rank);
    let mut complement = CMatrix::zeros(k, k - rank);
    for j in 0..rank {
        span.set_column(j, &eig.vectors.column(k - 1 - j));
    }
    for j in 0..(k - rank) {
        complement.set_column(j, &eig.vectors.column(j));
    }
    Ok(SpanComplement {
        span,
        complement,
        singular_values: sing,
    })
}

/// Computes (s ⊗ I_e) · v without materializing the Kronecker product.
/// `v` must have s.ncols() * e rows.
pub fn apply_kron_left(s: &CMatrix, v: &CMatrix, e: usize) -> CMatrix {
    let cols = v.ncols();
    let mut out = CMatrix::zeros(s.nrows() * e, cols);
    for i in 0..s.nrows() {
        for j in 0..s.ncols() {
            let sij = s[(i, j)];
            if sij == C64::new(0.0, 0.0) {
                continue;
            }
            for r in 0..e {
                for c in 0..cols {
                    out[(i * e + r, c)] += sij * v[(j * e + r, c)];
                }
            }
        }
    }
    out
}

pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), (b.nrows(), b.ncols()))
        .copy_from(b);
    out
}

fn strict_lower_abs_max(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

fn triangularization_residual(mats: &[CMatrix], q: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for t in mats {
        let rotated = q.adjoint() * t * q;
        let scale = max_abs(t).max(1.0);
        worst = worst.max(strict_lower_abs_max(&rotated) / scale);
    }
    worst
}

pub struct Triangularization {
    /// Unitary q with q^H T_j q upper triangular for every j.
    pub q: CMatrix,
    /// Max over j of the strict lower part of q^H T_j q, relative.
    pub residual: f64,
}

/// Simultaneous unitary triangularization of a commuting family.
///
/// First tries the Schur basis of a random generic linear combination
/// (deterministic for a fixed seed). When the combination has repeated
/// eigenvalues that basis can fail for the other coordinates, so a
/// common-eigenvector deflation pass is used as fallback.
pub fn simultaneous_triangularize(
    mats: &[CMatrix],
    seed: u64,
    rel_tol: f64,
) -> Result<Triangularization, LinalgError> {
    assert!(!mats.is_empty(), "need at least one matrix");
    let n = mats[0].nrows();
    for m in mats {
        ensure_finite(m)?;
    }
    if n <= 1 {
        return Ok(Triangularization {
            q: CMatrix::identity(n, n),
            residual: 0.0,
        });
    }

    // Fast path: Schur basis of one random combination.
    let combo = random_combination(mats, seed);
    if let Some(schur) = Schur::try_new(combo, f64::EPSILON, 10_000) {
        let (q, _t) = schur.unpack();
        let residual = triangularization_residual(mats, &q);
        if residual <= rel_tol {
            return Ok(Triangularization { q, residual });
        }
    }

    // Fallback: common-eigenvector deflation, robust for repeated spectra
    // (in particular jointly nilpotent tuples).
    let q = deflation_triangularize(mats)?;
    let residual = triangularization_residual(mats, &q);
    if residual <= rel_tol {
        Ok(Triangularization { q, residual })
    } else {
        Err(LinalgError::Degenerate {
            residual,
            tol: rel_tol,
        })
    }
}

fn random_combination(mats: &[CMatrix], seed: u64) -> CMatrix {
    // Deterministic pseudo-random coefficients from a splitmix64 stream.
    let n = mats[0].nrows();
    let mut state = seed ^ 0x9e37_79b9_7f4a_7c15;
    let mut next = move || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z = z ^ (z >> 31);
        (z as f64) / (u64::MAX as f64) - 0.5
    };
    let mut combo = CMatrix::zeros(n, n);
    for m in mats {
        let c = C64::new(next(), next());
        combo += m * c;
    }
    combo
}

/// Orthonormal basis of the numerical kernel of `m`, never empty: if no
/// singular value falls below the threshold the direction of least
/// singular value is returned.
fn numerical_kernel(m: &CMatrix, rel_tol: f64) -> Result<CMatrix, LinalgError> {
    let n = m.nrows();
    let gram = m.adjoint() * m;
    let eig = hermitian_eigen(&gram)?;
    let sigma_max = eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt();
    let threshold = (rel_tol * sigma_max).max(f64::MIN_POSITIVE);
    let mut dim = eig
        .values
        .iter()
        .take_while(|&&l| l.max(0.0).sqrt() <= threshold)
        .count();
    if dim == 0 {
        dim = 1;
    }
    let mut kernel = CMatrix::zeros(n, dim);
    for j in 0..dim {
        kernel.set_column(j, &eig.vectors.column(j));
    }
    Ok(kernel)
}

/// Swaps the adjacent diagonal entries i, i+1 of a complex upper
/// triangular t by a unitary rotation, updating q accordingly.
fn swap_schur_adjacent(t: &mut CMatrix, q: &mut CMatrix, i: usize) {
    let alpha = t[(i, i)];
    let beta = t[(i + 1, i + 1)];
    let gamma = t[(i, i + 1)];
    // Eigenvector of [[alpha, gamma], [0, beta]] for beta.
    let vx = gamma;
    let vy = beta - alpha;
    let norm = (vx.norm_sqr() + vy.norm_sqr()).sqrt();
    if norm < 1e-300 {
        return; // equal eigenvalues, order is immaterial
    }
    let c0 = vx / C64::new(norm, 0.0);
    let c1 = vy / C64::new(norm, 0.0);
    let mut u = CMatrix::identity(2, 2);
    u[(0, 0)] = c0;
    u[(1, 0)] = c1;
    u[(0, 1)] = -c1.conj();
    u[(1, 1)] = c0.conj();
    let n = t.nrows();
    // t <- diag(I, u, I)^H t diag(I, u, I); q <- q diag(I, u, I).
    for col in 0..n {
        let a = t[(i, col)];
        let b = t[(i + 1, col)];
        t[(i, col)] = u[(0, 0)].conj() * a + u[(1, 0)].conj() * b;
        t[(i + 1, col)] = u[(0, 1)].conj() * a + u[(1, 1)].conj() * b;
    }
    for row in 0..n {
        let a = t[(row, i)];
        let b = t[(row, i + 1)];
        t[(row, i)] = a * u[(0, 0)] + b * u[(1, 0)];
        t[(row, i + 1)] = a * u[(0, 1)] + b * u[(1, 1)];
        let a = q[(row, i)];
        let b = q[(row, i + 1)];
        q[(row, i)] = a * u[(0, 0)] + b * u[(1, 0)];
        q[(row, i + 1)] = a * u[(0, 1)] + b * u[(1, 1)];
    }
    t[(i + 1, i)] = C64::new(0.0, 0.0);
    t[(i, i)] = beta;
    t[(i + 1, i + 1)] = alpha;
}

/// Bubbles the selected diagonal entries to the leading positions. The
/// leading columns of q then span the corresponding spectral subspace.
fn move_cluster_to_top(t: &mut CMatrix, q: &mut CMatrix, select: &mut [bool]) -> usize {
    let n = t.nrows();
    let mut target = 0;
    for i in 0..n {
        if select[i] {
            let mut j = i;
            while j > target {
                swap_schur_adjacent(t, q, j - 1);
                select.swap(j - 1, j);
                j -= 1;
            }
            target += 1;
        }
    }
    target
}

/// Single-linkage clustering of eigenvalue estimates. Returns the member
/// mask of one proper cluster (the one holding the lexicographically
/// smallest value), or None when everything links into a single cluster.
/// The radius must absorb the eps^(1/k) smear of defective eigenvalues;
/// over-merging is harmless because the recursion revisits the block.
fn cluster_selection(values: &[C64], radius: f64) -> Option<Vec<bool>> {
    let n = values.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn root(comp: &mut [usize], mut i: usize) -> usize {
        while comp[i] != i {
            comp[i] = comp[comp[i]];
            i = comp[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= radius {
                let (a, b) = (root(&mut comp, i), root(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let first = root(&mut comp, 0);
    if (1..n).all(|i| root(&mut comp, i) == first) {
        return None;
    }
    let pick = (0..n)
        .min_by(|&i, &j| {
            values[i]
                .re
                .total_cmp(&values[j].re)
                .then(values[i].im.total_cmp(&values[j].im))
        })
        .unwrap();
    let pick_root = root(&mut comp, pick);
    Some((0..n).map(|i| root(&mut comp, i) == pick_root).collect())
}

fn block_diag_unitary(top: &CMatrix, bottom: &CMatrix) -> CMatrix {
    direct_sum(top, bottom)
}

/// Unitary matrix whose first column is proportional to `v`.
fn unitary_with_first_column(v: &CVector) -> CMatrix {
    let n = v.len();
    let mut m = CMatrix::zeros(n, n);
    m.set_column(0, v);
    // Fill with identity columns, skipping the one most parallel to v so
    // that the matrix stays well conditioned for QR.
    let skip = (0..n)
        .max_by(|&i, &j| v[i].norm().total_cmp(&v[j].norm()))
        .unwrap_or(0);
    let mut col = 1;
    for j in 0..n {
        if j == skip {
            continue;
        }
        if col < n {
            m[(j, col)] = C64::new(1.0, 0.0);
            col += 1;
        }
    }
    QR::new(m).q()
}

/// Recursive simultaneous triangularization of a commuting family.
///
/// If some coordinate has a proper eigenvalue cluster, the ordered Schur
/// form of that coordinate yields a spectral subspace, which is invariant
/// for every commuting matrix; the flag is assembled from the subspace
/// and quotient blocks. Otherwise every coordinate is a scalar plus a
/// (near-)nilpotent part and one common kernel vector is deflated at a
/// time. Any misjudgment surfaces in the caller's residual check.
fn deflation_triangularize(mats: &[CMatrix]) -> Result<CMatrix, LinalgError> {
    let n = mats[0].nrows();
    if n <= 1 {
        return Ok(CMatrix::identity(n, n));
    }
    for t_j in mats {
        let scale = max_abs(t_j).max(1e-12);
        let radius = 1e-2 * scale;
        let schur = Schur::try_new(t_j.clone(), f64::EPSILON, 20_000)
            .ok_or(LinalgError::SchurFailed { n })?;
        let (mut q, mut t) = schur.unpack();
        let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
        if let Some(mut select) = cluster_selection(&values, radius) {
            let m = move_cluster_to_top(&mut t, &mut q, &mut select);
            let rotated: Vec<CMatrix> = mats.iter().map(|mat| q.adjoint() * mat * &q).collect();
            let tops: Vec<CMatrix> = rotated
                .iter()
                .map(|r| r.view((0, 0), (m, m)).into_owned())
                .collect();
            let bottoms: Vec<CMatrix> = rotated
                .iter()
                .map(|r| r.view((m, m), (n - m, n - m)).into_owned())
                .collect();
            let q_top = deflation_triangularize(&tops)?;
            let q_bottom = deflation_triangularize(&bottoms)?;
            return Ok(q * block_diag_unitary(&q_top, &q_bottom));
        }
    }
    // Single eigenvalue cluster everywhere: split off the scalar part and
    // deflate one common kernel vector of the nilpotent parts.
    let eye = CMatrix::identity(n, n);
    let nilpotents: Vec<CMatrix> = mats
        .iter()
        .map(|t_j| {
            let mean = t_j.trace() / C64::new(n as f64, 0.0);
            t_j - &eye * mean
        })
        .collect();
    let mut basis = CMatrix::identity(n, n);
    for n_j in &nilpotents {
        if basis.ncols() == 1 {
            break;
        }
        let restricted = basis.adjoint() * n_j * &basis;
        // Coarse relative cut: genuine chain directions of a nilpotent
        // part sit many orders below the surviving singular values.
        let kernel = numerical_kernel(&restricted, 1e-6)?;
        basis = &basis * kernel;
    }
    let mut v: CVector = basis.column(0).into_owned();
    let norm = v.norm();
    if norm > 0.0 {
        v /= C64::new(norm, 0.0);
    }
    let u = unitary_with_first_column(&v);
    let rotated: Vec<CMatrix> = mats.iter().map(|mat| u.adjoint() * mat * &u).collect();
    let trailing: Vec<CMatrix> = rotated
        .iter()
        .map(|r| r.view((1, 1), (n - 1, n - 1)).into_owned())
        .collect();
    let q_rest = deflation_triangularize(&trailing)?;
    Ok(u * block_diag_unitary(&CMatrix::identity(1, 1), &q_rest))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cm(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_fn(rows, cols, |i, j| C64::new(data[i * cols + j], 0.0))
    }

    #[test]
    fn hermitian_eigen_sorts_ascending() {
        let m = cm(2, 2, &[0.0, 2.0, 2.0, 3.0]);
        let eig = hermitian_eigen(&m).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-12);
        assert!((eig.values[1] - 4.0).abs() < 1e-12);
        // Reconstruction.
        let mut rebuilt = CMatrix::zeros(2, 2);
        for k in 0..2 {
            let v = eig.vectors.column(k);
            rebuilt += (v * v.adjoint()) * C64::new(eig.values[k], 0.0);
        }
        assert!(max_abs(&(rebuilt - m)) < 1e-12);
    }

    #[test]
    fn spectral_norm_of_shift_block() {
        let m = cm(2, 2, &[0.0, 3.0, 0.0, 0.0]);
        assert!((spectral_norm(&m) - 3.0).abs() < 1e-12);
        assert_eq!(spectral_norm(&CMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let b = cm(3, 2, &[1.0, 0.5, -0.25, 2.0, 0.75, 0.0]);
        let g = &b * b.adjoint();
        let (root, clamped) = psd_sqrt(&g).unwrap();
        assert!(clamped < 1e-12);
        assert!(max_abs(&(&root * &root - g)) < 1e-12);
    }

    #[test]
    fn pivoted_cholesky_rank_and_rejection() {
        let b = cm(4, 2, &[1.0, 0.0, 1.0, 1.0, 0.0, 2.0, 1.0, -1.0]);
        let g = &b * b.adjoint();
        let f = pivoted_cholesky(&g, 1e-12).unwrap();
        assert_eq!(f.rank, 2);
        assert!(f.residual < 1e-12);

        let indef = cm(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            pivoted_cholesky(&indef, 1e-12),
            Err(LinalgError::NotPsd { .. })
        ));
    }

    #[test]
    fn span_complement_split() {
        let a = cm(3, 1, &[1.0, 1.0, 0.0]);
        let split = span_and_complement(&a, 1e-10).unwrap();
        assert_eq!(split.span.ncols(), 1);
        assert_eq!(split.complement.ncols(), 2);
        // Complement columns are orthogonal to the span.
        let overlap = split.complement.adjoint() * &split.span;
        assert!(max_abs(&overlap) < 1e-12);
    }

    #[test]
    fn triangularize_generic_diagonalizable_pair() {
        let t1 = cm(2, 2, &[1.0, 1.0, 0.0, 2.0]);
        let t2 = &t1 * &t1; // commutes with t1
        let tri = simultaneous_triangularize(&[t1, t2], 7, 1e-8).unwrap();
        assert!(tri.residual <= 1e-10);
    }

    /// A derogatory example: the joint point (1, 2) is realized once with
    /// the Jordan structure on the first coordinate and once on the
    /// second, so a Schur basis of a single generic combination need not
    /// triangularize both coordinates and the deflation pass has to.
    fn derogatory_pair() -> Vec<CMatrix> {
        let mut t1 = CMatrix::identity(4, 4);
        t1[(0, 1)] = C64::new(1.0, 0.0);
        let mut t2 = CMatrix::identity(4, 4) * C64::new(2.0, 0.0);
        t2[(2, 3)] = C64::new(1.0, 0.0);
        // Conjugate by a fixed dense unitary so no basis is accidentally
        // adapted to the blocks.
        let seed = cm(
            4,
            4,
            &[
                0.3, -1.2, 0.7, 0.4, 1.5, 0.2, -0.6, 1.1, -0.8, 0.9, 1.3, -0.5, 0.6, 0.1, -1.4, 0.8,
            ],
        );
        let q = QR::new(seed).q();
        vec![q.adjoint() * t1 * &q, q.adjoint() * t2 * &q]
    }

    #[test]
    fn triangularize_derogatory_pair_via_deflation() {
        let mats = derogatory_pair();
        let tri = simultaneous_triangularize(&mats, 42, 1e-8).unwrap();
        assert!(tri.residual <= 1e-8, "residual {}", tri.residual);
        // Every joint eigenvalue is (1, 2).
        let r1 = tri.q.adjoint() * &mats[0] * &tri.q;
        let r2 = tri.q.adjoint() * &mats[1] * &tri.q;
        for i in 0..4 {
            assert!((r1[(i, i)] - C64::new(1.0, 0.0)).norm() < 1e-7);
            assert!((r2[(i, i)] - C64::new(2.0, 0.0)).norm() < 1e-7);
        }
    }

    #[test]
    fn deflation_handles_the_derogatory_pair_directly() {
        let mats = derogatory_pair();
        let q = deflation_triangularize(&mats).unwrap();
        assert!(triangularization_residual(&mats, &q) <= 1e-8);
    }
}
