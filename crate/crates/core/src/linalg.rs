//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::{Error, Result, ToleranceConfig};

pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c(x, 0.0)))
}

pub fn hermitian_defect(h: &CMatrix) -> f64 {
    (h - h.adjoint()).norm()
}

pub fn symmetrize(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()).scale(0.5)
}

/// Eigendecomposition of a matrix assumed Hermitian (it is symmetrized first).
/// Eigenvalues ascending, eigenvectors as orthonormal columns.
pub fn eigh(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(h));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Checked Hermitian eigendecomposition: rejects inputs whose anti-Hermitian
/// part exceeds `residual_tol` relative to the matrix norm.
pub fn hermitian_eigen(h: &CMatrix, cfg: &ToleranceConfig) -> Result<(Vec<f64>, CMatrix)> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let defect = hermitian_defect(h);
    let limit = cfg.residual_tol * h.norm().max(f64::MIN_POSITIVE);
    if defect > limit {
        return Err(Error::NotHermitian { defect, limit });
    }
    Ok(eigh(h))
}

pub fn min_eigenvalue(h: &CMatrix) -> f64 {
    eigh(h).0.first().copied().unwrap_or(0.0)
}

/// Most negative eigenpair of a Hermitian matrix.
pub fn min_eigenpair(h: &CMatrix) -> (f64, CVector) {
    let (vals, vecs) = eigh(h);
    (vals[0], vecs.column(0).into_owned())
}

pub fn max_eigenvalue(h: &CMatrix) -> f64 {
    eigh(h).0.last().copied().unwrap_or(0.0)
}

/// Thin singular value decomposition `A = U·diag(s)·V†`, values descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

pub fn svd(a: &CMatrix) -> Svd {
    let (p, q) = a.shape();
    if p < q {
        let t = svd(&a.adjoint());
        return Svd { u: t.v, s: t.s, v: t.u };
    }
    if q == 0 {
        return Svd {
            u: CMatrix::zeros(p, 0),
            s: Vec::new(),
            v: CMatrix::zeros(q, 0),
        };
    }
    // One-sided Jacobi: rotate column pairs of A·V until they are mutually
    // orthogonal. Slower than bidiagonalization but accurate on the
    // structured, rank-deficient inputs this crate produces.
    let mut w = a.clone();
    let mut v = identity(q);
    for _ in 0..80 {
        let mut rotated = false;
        for i in 0..q {
            for j in i + 1..q {
                let alpha = w.column(i).norm_squared();
                let beta = w.column(j).norm_squared();
                let gamma = w.column(i).dotc(&w.column(j));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for m in [&mut w, &mut v] {
                    for r in 0..m.nrows() {
                        let x = m[(r, i)];
                        let y = m[(r, j)] * phase.conj();
                        m[(r, i)] = x * cs - y * sn;
                        m[(r, j)] = x * sn + y * cs;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..q).map(|k| w.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..q).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let top = norms[order[0]];
    let mut u = CMatrix::zeros(p, q);
    let mut filled = 0;
    for (k, &j) in order.iter().enumerate() {
        if norms[j] > 1e-300 && norms[j] > f64::EPSILON * 1e-3 * top {
            u.set_column(k, &(w.column(j) / c(norms[j], 0.0)));
            filled = k + 1;
        } else {
            break;
        }
    }
    if filled < q {
        let full = complete_unitary(&u.columns(0, filled).into_owned());
        u.columns_mut(filled, q - filled).copy_from(&full.columns(filled, q - filled));
    }
    Svd {
        u,
        s: order.iter().map(|&j| norms[j]).collect(),
        v: CMatrix::from_fn(q, q, |i, k| v[(i, order[k])]),
    }
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    svd(a).s
}

pub fn spectral_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Rank under the configured cutoff, plus an orthonormal kernel basis.
pub fn numerical_rank(a: &CMatrix, cfg: &ToleranceConfig) -> (usize, Vec<CVector>) {
    let (p, q) = a.shape();
    if q == 0 {
        return (0, Vec::new());
    }
    // Padding with zero rows yields the full right singular basis.
    let padded = if p < q {
        let mut m = CMatrix::zeros(q, q);
        m.view_mut((0, 0), (p, q)).copy_from(a);
        m
    } else {
        a.clone()
    };
    let d = svd(&padded);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let tau = cfg.rank_cutoff(smax, p, q);
    let rank = d.s.iter().filter(|&&s| s > tau).count();
    let kernel = (rank..q).map(|j| d.v.column(j).into_owned()).collect();
    (rank, kernel)
}

pub fn rank(a: &CMatrix, cfg: &ToleranceConfig) -> usize {
    let s = singular_values(a);
    let smax = s.first().copied().unwrap_or(0.0);
    let tau = cfg.rank_cutoff(smax, a.nrows(), a.ncols());
    s.iter().filter(|&&x| x > tau).count()
}

/// Orthonormal basis (as columns) of the column space.
pub fn range_basis(a: &CMatrix, cfg: &ToleranceConfig) -> CMatrix {
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let tau = cfg.rank_cutoff(smax, a.nrows(), a.ncols());
    let r = d.s.iter().filter(|&&s| s > tau).count();
    d.u.columns(0, r).into_owned()
}

/// Support of a PSD matrix: eigenvectors of eigenvalues above the rank cutoff.
pub fn psd_support(h: &CMatrix, cfg: &ToleranceConfig) -> (Vec<f64>, CMatrix) {
    let (vals, vecs) = eigh(h);
    let n = h.nrows();
    let top = vals.last().copied().unwrap_or(0.0).max(0.0);
    let tau = cfg.rank_cutoff(top, n, n);
    let keep: Vec<usize> = (0..n).rev().filter(|&k| vals[k] > tau).collect();
    let basis = CMatrix::from_fn(n, keep.len(), |i, j| vecs[(i, keep[j])]);
    (keep.iter().map(|&k| vals[k]).collect(), basis)
}

/// Moore–Penrose pseudo-inverse with the configured rank cutoff.
pub fn pinv(a: &CMatrix, cfg: &ToleranceConfig) -> CMatrix {
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let tau = cfg.rank_cutoff(smax, a.nrows(), a.ncols());
    let mut out = CMatrix::zeros(a.ncols(), a.nrows());
    for (k, &s) in d.s.iter().enumerate() {
        if s > tau {
            out += d.v.column(k) * d.u.column(k).adjoint() / c(s, 0.0);
        }
    }
    out
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn basis_vector(n: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[k] = ONE;
    v
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Orthonormalize the columns of `a` (Gram–Schmidt with re-orthogonalization),
/// dropping columns that are numerically dependent on earlier ones.
pub fn orthonormalize(a: &CMatrix) -> CMatrix {
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let mut cols: Vec<CVector> = Vec::new();
    for j in 0..a.ncols() {
        let mut v = a.column(j).into_owned();
        for _ in 0..2 {
            for q in &cols {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let n = v.norm();
        if n > 1e-12 * scale {
            cols.push(v / c(n, 0.0));
        }
    }
    if cols.is_empty() {
        return CMatrix::zeros(a.nrows(), 0);
    }
    CMatrix::from_columns(&cols)
}

/// Unitary whose first column is `v / ‖v‖`.
pub fn unitary_with_first_column(v: &CVector) -> CMatrix {
    let n = v.len();
    let mut m = CMatrix::zeros(n, n + 1);
    m.set_column(0, v);
    m.view_mut((0, 1), (n, n)).copy_from(&identity(n));
    let q = orthonormalize(&m);
    debug_assert_eq!(q.ncols(), n);
    q
}

/// Complete an isometry (orthonormal columns) to a full unitary, keeping its
/// columns first.
pub fn complete_unitary(w: &CMatrix) -> CMatrix {
    let n = w.nrows();
    let mut m = CMatrix::zeros(n, w.ncols() + n);
    m.view_mut((0, 0), (n, w.ncols())).copy_from(w);
    m.view_mut((0, w.ncols()), (n, n)).copy_from(&identity(n));
    orthonormalize(&m)
}

/// `H^p` for a PSD matrix restricted to its support (pseudo-power for p < 0).
pub fn psd_power(h: &CMatrix, p: f64, cfg: &ToleranceConfig) -> CMatrix {
    let (vals, basis) = psd_support(h, cfg);
    let mut out = CMatrix::zeros(h.nrows(), h.ncols());
    for (k, &l) in vals.iter().enumerate() {
        let col = basis.column(k);
        out += col * col.adjoint() * c(l.powf(p), 0.0);
    }
    out
}

pub fn relative_residual(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_hermitian, random_matrix, seeded};

    #[test]
    fn identity_spectrum() {
        let (vals, _) = hermitian_eigen(&identity(3), &ToleranceConfig::default()).unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (vals, _) = eigh(&x);
        assert!((vals[0] + 1.0).abs() < 1e-15 && (vals[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(1);
        for _ in 0..20 {
            let h = random_hermitian(&mut rng, 6);
            let (vals, v) = hermitian_eigen(&h, &cfg).unwrap();
            let d = CMatrix::from_diagonal(&CVector::from_iterator(6, vals.iter().map(|&x| c(x, 0.0))));
            assert!((&h * &v - &v * d).norm() <= cfg.residual_tol * h.norm());
            assert!((v.adjoint() * &v - identity(6)).norm() <= cfg.residual_tol);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            hermitian_eigen(&a, &ToleranceConfig::default()),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn rank_of_zero_and_outer_product() {
        let cfg = ToleranceConfig::default();
        let (r, k) = numerical_rank(&CMatrix::zeros(4, 3), &cfg);
        assert_eq!((r, k.len()), (0, 3));
        let mut rng = seeded(2);
        let u = random_matrix(&mut rng, 4, 1).column(0).into_owned();
        let v = random_matrix(&mut rng, 5, 1).column(0).into_owned();
        let a = outer(&u, &v);
        let (r, kernel) = numerical_rank(&a, &cfg);
        assert_eq!((r, kernel.len()), (1, 4));
        for x in &kernel {
            assert!((&a * x).norm() <= 1e-12 * a.norm());
        }
    }

    #[test]
    fn wide_matrix_kernel_is_complete() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(3);
        let a = random_matrix(&mut rng, 2, 5);
        let (r, kernel) = numerical_rank(&a, &cfg);
        assert_eq!(r + kernel.len(), 5);
        assert_eq!(r, 2);
    }

    #[test]
    fn unitary_completion() {
        let mut rng = seeded(4);
        let v = random_matrix(&mut rng, 4, 1).column(0).into_owned();
        let u = unitary_with_first_column(&v);
        assert!((u.adjoint() * &u - identity(4)).norm() < 1e-12);
        let first = u.column(0).into_owned();
        assert!((first.dotc(&v).norm() - v.norm()).abs() < 1e-12);
    }

    #[test]
    fn pinv_of_invertible_is_inverse() {
        let cfg = ToleranceConfig::default();
        let mut rng = seeded(5);
        let a = random_matrix(&mut rng, 3, 3);
        assert!((pinv(&a, &cfg) * &a - identity(3)).norm() < 1e-10);
    }
}
