//! Product vectors in subspaces of `C^M ⊗ C^N`: Plücker coordinates, the
//! closed-form hypersurfaces for 2⊗3 (k = 2) and 2⊗4 (k = 3), and a numeric
//! search over all 2×2 minors of the reshaped span.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::Rng;
use serde::Deserialize;

use crate::criteria::SearchBudget;
use crate::linalg::{self, c, CMatrix, CVector, C64, ZERO};
use crate::sampling::{complex_gaussian, substream};
use crate::{Error, Result, ToleranceConfig};

#[derive(Debug, Clone)]
pub struct Subspace {
    dim_a: usize,
    dim_b: usize,
    basis: Vec<CVector>,
}

impl Subspace {
    pub fn new(dim_a: usize, dim_b: usize, basis: Vec<CVector>) -> Result<Self> {
        Self::with_tolerance(dim_a, dim_b, basis, &ToleranceConfig::default())
    }

    pub fn with_tolerance(dim_a: usize, dim_b: usize, basis: Vec<CVector>, tol: &ToleranceConfig) -> Result<Self> {
        let d = dim_a * dim_b;
        if basis.is_empty() || dim_a == 0 || dim_b == 0 {
            return Err(Error::Dimension("a subspace needs at least one basis vector".into()));
        }
        if let Some(v) = basis.iter().find(|v| v.len() != d) {
            return Err(Error::Dimension(format!("basis vector of length {} in a {d}-dim space", v.len())));
        }
        let s = Self { dim_a, dim_b, basis };
        let r = linalg::rank(&s.columns(), tol);
        if r < s.basis.len() {
            return Err(Error::Precondition(format!(
                "basis is linearly dependent (rank {r} < {})",
                s.basis.len()
            )));
        }
        Ok(s)
    }

    /// Span of the vectorized matrices (row-major), viewed in `rows ⊗ cols`.
    pub fn from_matrices(mats: &[CMatrix]) -> Result<Self> {
        let (r, cols) = mats.first().ok_or_else(|| Error::Dimension("no matrices".into()))?.shape();
        let basis = mats
            .iter()
            .map(|m| CVector::from_fn(r * cols, |idx, _| m[(idx / cols, idx % cols)]))
            .collect();
        Self::new(r, cols, basis)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    /// Basis vectors as columns (`MN × k`).
    pub fn columns(&self) -> CMatrix {
        CMatrix::from_columns(&self.basis)
    }

    /// Basis vectors as rows (`k × MN`), the matrix whose minors are the
    /// Plücker coordinates.
    pub fn basis_matrix(&self) -> CMatrix {
        self.columns().transpose()
    }

    /// Same subspace with basis rows replaced by `G · P`.
    pub fn change_basis(&self, g: &CMatrix) -> Result<Self> {
        let p = g * self.basis_matrix();
        let basis = (0..p.nrows()).map(|i| p.row(i).transpose()).collect();
        Self::new(self.dim_a, self.dim_b, basis)
    }
}

/// All `k × k` minors of the basis matrix, keyed by 0-based increasing
/// column tuples.
#[derive(Debug, Clone)]
pub struct PlueckerCoords {
    pub order: usize,
    pub coords: BTreeMap<Vec<usize>, C64>,
}

impl PlueckerCoords {
    pub fn get(&self, cols: &[usize]) -> C64 {
        self.coords.get(cols).copied().unwrap_or(ZERO)
    }

    /// Lookup with the 1-based column labels used in printed formulas.
    pub fn get1(&self, cols: &[usize]) -> C64 {
        let zero_based: Vec<usize> = cols.iter().map(|&i| i - 1).collect();
        self.get(&zero_based)
    }

    pub fn norm(&self) -> f64 {
        self.coords.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `p12 p34 − p13 p24 + p14 p23` (1-based labels); zero on any 2-plane.
    pub fn quadratic_relation(&self) -> Option<C64> {
        if self.order != 2 {
            return None;
        }
        let g = |a: usize, b: usize| self.get1(&[a, b]);
        Some(g(1, 2) * g(3, 4) - g(1, 3) * g(2, 4) + g(1, 4) * g(2, 3))
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub fn pluecker_coords(v: &Subspace) -> PlueckerCoords {
    let p = v.basis_matrix();
    let k = p.nrows();
    let coords = combinations(p.ncols(), k)
        .into_iter()
        .map(|cols| {
            let sub = CMatrix::from_fn(k, k, |i, j| p[(i, cols[j])]);
            (cols, sub.determinant())
        })
        .collect();
    PlueckerCoords { order: k, coords }
}

/// Value of a hypersurface polynomial together with its natural scale
/// `‖p‖^degree`, against which zero-tests are made.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypersurfaceValue {
    pub value: C64,
    pub scale: f64,
    pub degree: u32,
}

impl HypersurfaceValue {
    pub fn relative(&self) -> f64 {
        self.value.norm() / self.scale.max(f64::MIN_POSITIVE)
    }

    pub fn vanishes(&self, rel_tol: f64) -> bool {
        self.relative() <= rel_tol
    }
}

/// The cubic in the 2×2 minors of a 2-plane in `C^2 ⊗ C^3` that vanishes
/// exactly when the plane contains a product vector.
pub fn hypersurface_2x3(v: &Subspace) -> Result<HypersurfaceValue> {
    if (v.dim_a(), v.dim_b(), v.dim()) != (2, 3, 2) {
        return Err(Error::Dimension(format!(
            "the cubic applies to 2-dimensional subspaces of 2x3, got {}-dimensional in {}x{}",
            v.dim(),
            v.dim_a(),
            v.dim_b()
        )));
    }
    let p = pluecker_coords(v);
    let g = |ab: usize| p.get1(&[ab / 10, ab % 10]);
    let value = g(12) * g(34) * g(56) * 2.0 + g(12) * g(26) * g(46) + g(13) * g(15) * g(56)
        + g(23) * g(24) * g(46)
        + g(13) * g(35) * g(45)
        - g(13) * g(25) * g(46)
        - g(13) * g(24) * g(56)
        - g(12) * g(35) * g(46)
        - g(12) * g(16) * g(56)
        - g(23) * g(34) * g(45);
    Ok(HypersurfaceValue {
        value,
        scale: p.norm().powi(3),
        degree: 3,
    })
}

#[derive(Debug, Deserialize)]
struct PolynomialFile {
    shape: [usize; 2],
    k: usize,
    degree: u32,
    monomials: Vec<Monomial>,
}

#[derive(Debug, Deserialize)]
struct Monomial {
    coefficient: i64,
    indices: Vec<Vec<usize>>,
}

const QUARTIC_2X4_SOURCE: &str = include_str!("../data/quartic_2x4.json");
/// SHA-256 of `data/quartic_2x4.json`; guards against accidental edits.
pub const QUARTIC_2X4_SHA256: &str = "639c022ec23c621faba57c52e549b27741b270c05e891ac90686c363abb97c63";
pub const QUARTIC_2X4_TERMS: usize = 149;

fn quartic_2x4() -> &'static PolynomialFile {
    static POLY: OnceLock<PolynomialFile> = OnceLock::new();
    POLY.get_or_init(|| {
        let p: PolynomialFile = serde_json::from_str(QUARTIC_2X4_SOURCE).expect("embedded polynomial parses");
        assert_eq!((p.shape, p.k, p.degree), ([2, 4], 3, 4));
        assert_eq!(p.monomials.len(), QUARTIC_2X4_TERMS);
        p
    })
}

pub fn quartic_2x4_source() -> &'static str {
    QUARTIC_2X4_SOURCE
}

/// The quartic in the 3×3 minors of a 3-dimensional subspace of `C^2 ⊗ C^4`
/// that vanishes exactly when it contains a product vector.
pub fn hypersurface_2x4(v: &Subspace) -> Result<HypersurfaceValue> {
    if (v.dim_a(), v.dim_b(), v.dim()) != (2, 4, 3) {
        return Err(Error::Dimension(format!(
            "the quartic applies to 3-dimensional subspaces of 2x4, got {}-dimensional in {}x{}",
            v.dim(),
            v.dim_a(),
            v.dim_b()
        )));
    }
    let p = pluecker_coords(v);
    let poly = quartic_2x4();
    let value = poly.monomials.iter().fold(ZERO, |acc, m| {
        acc + m.indices.iter().fold(c(m.coefficient as f64, 0.0), |prod, t| prod * p.get1(t))
    });
    Ok(HypersurfaceValue {
        value,
        scale: p.norm().powi(poly.degree as i32),
        degree: poly.degree,
    })
}

/// Closed-form test for shapes that have one.
pub fn hypersurface(v: &Subspace) -> Option<HypersurfaceValue> {
    match (v.dim_a(), v.dim_b(), v.dim()) {
        (2, 3, 2) => hypersurface_2x3(v).ok(),
        (2, 4, 3) => hypersurface_2x4(v).ok(),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    pub a: CVector,
    pub b: CVector,
    /// Coefficients of the found element in the subspace's own basis.
    pub coefficients: CVector,
    /// Rank-one defect of the found element, relative to its norm.
    pub residual: f64,
}

impl ProductVector {
    pub fn vector(&self) -> CVector {
        self.a.kronecker(&self.b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductSearchResult {
    pub found: Option<ProductVector>,
    pub best_residual: f64,
    pub attempts: usize,
}

impl ProductSearchResult {
    pub fn report(&self) -> String {
        match &self.found {
            Some(p) => format!("product vector found after {} attempts (defect {:.2e})", self.attempts, p.residual),
            None => format!(
                "no product vector within budget: {} attempts, best relative minor residual {:.3e}",
                self.attempts, self.best_residual
            ),
        }
    }
}

struct MinorSystem {
    mats: Vec<CMatrix>,
    quads: Vec<(usize, usize, usize, usize)>,
}

impl MinorSystem {
    fn new(mats: Vec<CMatrix>) -> Self {
        let (m, n) = mats[0].shape();
        let mut quads = Vec::new();
        for p in 0..m {
            for q in p + 1..m {
                for s in 0..n {
                    for t in s + 1..n {
                        quads.push((p, q, s, t));
                    }
                }
            }
        }
        Self { mats, quads }
    }

    fn combine(&self, z: &CVector) -> CMatrix {
        let (m, n) = self.mats[0].shape();
        self.mats.iter().zip(z.iter()).fold(CMatrix::zeros(m, n), |acc, (a, &w)| acc + a * w)
    }

    fn residual(&self, e: &CMatrix) -> CVector {
        CVector::from_iterator(
            self.quads.len(),
            self.quads.iter().map(|&(p, q, s, t)| e[(p, s)] * e[(q, t)] - e[(p, t)] * e[(q, s)]),
        )
    }

    /// Holomorphic Jacobian of the minors with respect to the free coefficients.
    fn jacobian(&self, e: &CMatrix, free: &[usize]) -> CMatrix {
        CMatrix::from_fn(self.quads.len(), free.len(), |row, col| {
            let (p, q, s, t) = self.quads[row];
            let a = &self.mats[free[col]];
            a[(p, s)] * e[(q, t)] + e[(p, s)] * a[(q, t)] - a[(p, t)] * e[(q, s)] - e[(p, t)] * a[(q, s)]
        })
    }

    /// Damped Gauss–Newton with `z[fixed] = 1`.
    fn solve(&self, mut z: CVector, fixed: usize, tol: f64) -> CVector {
        let k = z.len();
        let free: Vec<usize> = (0..k).filter(|&i| i != fixed).collect();
        let cost_of = |z: &CVector| {
            let e = self.combine(z);
            (self.residual(&e).norm_squared(), e)
        };
        let (mut cost, mut e) = cost_of(&z);
        let mut mu = -1.0;
        for _ in 0..200 {
            let scale = z.norm_squared().powi(2);
            if cost <= tol * tol * scale {
                break;
            }
            let r = self.residual(&e);
            let j = self.jacobian(&e, &free);
            let jh = j.adjoint();
            let jtj = &jh * &j;
            let g = &jh * &r;
            if mu < 0.0 {
                mu = 1e-3 * (0..free.len()).map(|i| jtj[(i, i)].re).fold(0.0, f64::max).max(1e-300);
            }
            let mut improved = false;
            for _ in 0..12 {
                let mut a = jtj.clone();
                for i in 0..free.len() {
                    a[(i, i)] += c(mu, 0.0);
                }
                let Some(step) = a.lu().solve(&(-&g)) else {
                    mu *= 10.0;
                    continue;
                };
                let mut trial = z.clone();
                for (idx, &f) in free.iter().enumerate() {
                    trial[f] += step[idx];
                }
                let (tc, te) = cost_of(&trial);
                if tc < cost {
                    let rel_change = step.norm() / trial.norm().max(1e-300);
                    z = trial;
                    cost = tc;
                    e = te;
                    mu = (mu / 3.0).max(1e-300);
                    improved = rel_change > 1e-15;
                    break;
                }
                mu *= 4.0;
            }
            if !improved {
                break;
            }
        }
        z
    }
}

fn rank_one_defect(e: &CMatrix) -> (f64, CVector, CVector) {
    let d = linalg::svd(e);
    let total = e.norm().max(f64::MIN_POSITIVE);
    let tail = d.s.iter().skip(1).map(|s| s * s).sum::<f64>().sqrt();
    let a = d.u.column(0) * c(d.s[0], 0.0);
    let b = d.v.column(0).map(|z| z.conj());
    (tail / total, a, b)
}

/// Search for a product vector `a ⊗ b` in `V`: minimize all 2×2 minors of the
/// `M × N` reshaping of `Σ z_i v_i`, fixing each `z_j = 1` in turn, with
/// `budget.product_restarts` Gaussian starts per choice of `j`.
pub fn find_product_vector(v: &Subspace, budget: &SearchBudget) -> ProductSearchResult {
    find_product_vector_with(v, budget, &ToleranceConfig::default())
}

pub fn find_product_vector_with(v: &Subspace, budget: &SearchBudget, tol: &ToleranceConfig) -> ProductSearchResult {
    let (m, n) = (v.dim_a(), v.dim_b());
    let cols = v.columns();
    let q = linalg::orthonormalize(&cols);
    let k = q.ncols();
    let mats: Vec<CMatrix> = (0..k)
        .map(|i| CMatrix::from_fn(m, n, |r, s| q[(r * n + s, i)]))
        .collect();
    let to_original = |z: &CVector| -> CVector {
        let target = &q * z;
        linalg::pinv(&cols, tol) * target
    };
    let finish = |z: &CVector, e: &CMatrix, attempts: usize| -> Option<ProductSearchResult> {
        let (defect, a, b) = rank_one_defect(e);
        (defect <= tol.residual_tol).then(|| ProductSearchResult {
            found: Some(ProductVector {
                a,
                b,
                coefficients: to_original(z),
                residual: defect,
            }),
            best_residual: defect,
            attempts,
        })
    };
    if m == 1 || n == 1 || k == 1 {
        let z = linalg::basis_vector(k, 0);
        let e = mats[0].clone();
        if let Some(found) = finish(&z, &e, 1) {
            return found;
        }
        if k == 1 {
            return ProductSearchResult {
                found: None,
                best_residual: rank_one_defect(&e).0,
                attempts: 1,
            };
        }
    }
    let system = MinorSystem::new(mats);
    let mut rng = substream(budget.seed, 0x7072_6f64);
    let mut best = f64::INFINITY;
    let mut attempts = 0;
    let solver_tol = tol.residual_tol * 1e-3;
    for _ in 0..budget.product_restarts {
        for fixed in 0..k {
            attempts += 1;
            let mut z = CVector::from_fn(k, |_, _| complex_gaussian(&mut rng));
            z[fixed] = c(1.0, 0.0);
            if rng.random_bool(0.5) {
                z.scale_mut(0.3);
                z[fixed] = c(1.0, 0.0);
            }
            let z = system.solve(z, fixed, solver_tol);
            let e = system.combine(&z);
            if let Some(found) = finish(&z, &e, attempts) {
                return found;
            }
            best = best.min(rank_one_defect(&e).0);
        }
    }
    ProductSearchResult {
        found: None,
        best_residual: best,
        attempts,
    }
}

/// Rank-one element `Σ ξ_i X_i = u wᵀ` in the span of equally shaped matrices.
#[derive(Debug, Clone)]
pub struct RankOne {
    pub coefficients: CVector,
    pub u: CVector,
    pub w: CVector,
}

pub fn rank_one_in_span(mats: &[CMatrix], budget: &SearchBudget) -> Result<Option<RankOne>> {
    let v = Subspace::from_matrices(mats)?;
    Ok(find_product_vector(&v, budget).found.map(|p| RankOne {
        coefficients: p.coefficients,
        u: p.a,
        w: p.b,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_matrix, random_vector, seeded};
    use sha2::{Digest, Sha256};

    #[test]
    fn embedded_quartic_checksum() {
        let digest = Sha256::digest(QUARTIC_2X4_SOURCE.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, QUARTIC_2X4_SHA256);
        let poly = quartic_2x4();
        assert_eq!(poly.monomials.len(), 149);
        for m in &poly.monomials {
            assert_eq!(m.indices.len(), 4);
            for t in &m.indices {
                assert!(t.len() == 3 && t.windows(2).all(|w| w[0] < w[1]) && t[2] <= 8);
            }
        }
    }

    #[test]
    fn combination_counts() {
        assert_eq!(combinations(6, 2).len(), 15);
        assert_eq!(combinations(8, 3).len(), 56);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn standard_basis_coordinates() {
        let basis = (0..2).map(|i| linalg::basis_vector(6, i)).collect();
        let p = pluecker_coords(&Subspace::new(2, 3, basis).unwrap());
        for (cols, v) in &p.coords {
            let expected = if cols == &vec![0, 1] { 1.0 } else { 0.0 };
            assert_eq!(*v, c(expected, 0.0));
        }
    }

    #[test]
    fn quadratic_relation_holds() {
        let mut rng = seeded(11);
        let basis = (0..2).map(|_| random_vector(&mut rng, 6)).collect();
        let p = pluecker_coords(&Subspace::new(2, 3, basis).unwrap());
        assert!(p.quadratic_relation().unwrap().norm() <= 1e-10 * p.norm().powi(2));
    }

    #[test]
    fn coordinates_scale_by_determinant() {
        let mut rng = seeded(12);
        let basis = (0..3).map(|_| random_vector(&mut rng, 8)).collect();
        let v = Subspace::new(2, 4, basis).unwrap();
        let g = random_matrix(&mut rng, 3, 3);
        let p0 = pluecker_coords(&v);
        let p1 = pluecker_coords(&v.change_basis(&g).unwrap());
        let det = g.determinant();
        for (cols, z) in &p0.coords {
            assert!((p1.get(cols) - z * det).norm() <= 1e-10 * p0.norm() * det.norm());
        }
    }

    #[test]
    fn cubic_spot_value() {
        let mut a = CVector::zeros(6);
        a[0] = c(1.0, 0.0);
        a[4] = c(1.0, 0.0);
        let mut b = CVector::zeros(6);
        b[1] = c(1.0, 0.0);
        b[5] = c(1.0, 0.0);
        let h = hypersurface_2x3(&Subspace::new(2, 3, vec![a, b]).unwrap()).unwrap();
        assert!((h.value - c(-1.0, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn wrong_shape_rejected() {
        let mut rng = seeded(13);
        let v = Subspace::new(3, 3, (0..2).map(|_| random_vector(&mut rng, 9)).collect()).unwrap();
        assert!(hypersurface_2x3(&v).is_err());
        assert!(hypersurface_2x4(&v).is_err());
        assert!(hypersurface(&v).is_none());
    }

    #[test]
    fn dependent_basis_rejected() {
        let mut rng = seeded(14);
        let x = random_vector(&mut rng, 6);
        assert!(Subspace::new(2, 3, vec![x.clone(), x * c(2.0, 1.0)]).is_err());
    }

    #[test]
    fn finds_planted_product() {
        let mut rng = seeded(15);
        for _ in 0..10 {
            let prod = random_vector(&mut rng, 3).kronecker(&random_vector(&mut rng, 3));
            let mut basis: Vec<CVector> = (0..3).map(|_| random_vector(&mut rng, 9)).collect();
            basis.push(prod);
            let v = Subspace::new(3, 3, basis).unwrap();
            let res = find_product_vector(&v, &SearchBudget::default());
            let p = res.found.expect("planted product vector");
            let recon = v.columns() * &p.coefficients;
            assert!((recon - p.vector()).norm() <= 1e-8 * p.vector().norm());
        }
    }

    #[test]
    fn large_subspaces_always_contain_products() {
        let mut rng = seeded(16);
        // dim 5 > (3-1)(3-1) = 4.
        for _ in 0..5 {
            let v = Subspace::new(3, 3, (0..5).map(|_| random_vector(&mut rng, 9)).collect()).unwrap();
            assert!(find_product_vector(&v, &SearchBudget::default()).found.is_some());
        }
    }

    #[test]
    fn generic_small_subspace_has_none() {
        let mut rng = seeded(17);
        let v = Subspace::new(3, 3, (0..2).map(|_| random_vector(&mut rng, 9)).collect()).unwrap();
        let budget = SearchBudget {
            product_restarts: 5,
            ..SearchBudget::default()
        };
        let res = find_product_vector(&v, &budget);
        assert!(res.found.is_none());
        assert!(res.best_residual > 1e-6);
    }
}
