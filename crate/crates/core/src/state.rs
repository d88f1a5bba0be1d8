//! Bipartite states, pure states and the row-block form `ρ = C†C`.
//!
//! Matrices act on `C^M ⊗ C^N` with basis index `i·N + j` for `|i⟩_A ⊗ |j⟩_B`.
//! States need not be normalized; only the trace must be positive.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::linalg::{self, c, CMatrix, CVector, ZERO};
use crate::{Error, Result, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BipartiteState {
    dim_a: usize,
    dim_b: usize,
    matrix: CMatrix,
    tol: ToleranceConfig,
    norm: OnceLock<f64>,
}

impl BipartiteState {
    pub fn new(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(dim_a, dim_b, matrix, ToleranceConfig::default())
    }

    /// Validating constructor: shape, Hermiticity (then symmetrized), PSD, trace.
    pub fn with_tolerance(
        dim_a: usize,
        dim_b: usize,
        matrix: CMatrix,
        tol: ToleranceConfig,
    ) -> Result<Self> {
        tol.check()?;
        let d = dim_a * dim_b;
        if dim_a == 0 || dim_b == 0 || matrix.shape() != (d, d) {
            return Err(Error::Dimension(format!(
                "a {dim_a}x{dim_b} state needs a {d}x{d} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        let (vals, _) = linalg::hermitian_eigen(&matrix, &tol)?;
        let top = vals.last().copied().unwrap_or(0.0);
        let limit = -tol.psd_tol * top.abs().max(1.0);
        if vals[0] < limit {
            return Err(Error::NotPsd {
                min_eig: vals[0],
                limit,
            });
        }
        let state = Self::from_parts(dim_a, dim_b, matrix, tol);
        if state.trace() <= 0.0 {
            return Err(Error::ZeroTrace);
        }
        let _ = state.norm.set(top);
        Ok(state)
    }

    /// Unchecked constructor for matrices derived from valid states.
    pub(crate) fn from_parts(dim_a: usize, dim_b: usize, matrix: CMatrix, tol: ToleranceConfig) -> Self {
        debug_assert_eq!(matrix.nrows(), dim_a * dim_b);
        Self {
            dim_a,
            dim_b,
            matrix: linalg::symmetrize(&matrix),
            tol,
            norm: OnceLock::new(),
        }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let v = psi.amplitudes();
        Self::from_parts(psi.dim_a(), psi.dim_b(), v * v.adjoint(), ToleranceConfig::default())
    }

    /// `Σ |v⟩⟨v|` over the given (unnormalized) vectors.
    pub fn from_vectors(dim_a: usize, dim_b: usize, vectors: &[CVector]) -> Result<Self> {
        let d = dim_a * dim_b;
        let mut m = CMatrix::zeros(d, d);
        for v in vectors {
            if v.len() != d {
                return Err(Error::Dimension(format!("vector of length {} in a {d}-dim space", v.len())));
            }
            m += v * v.adjoint();
        }
        let s = Self::from_parts(dim_a, dim_b, m, ToleranceConfig::default());
        if s.trace() <= 0.0 {
            return Err(Error::ZeroTrace);
        }
        Ok(s)
    }

    pub fn with_tol(&self, tol: ToleranceConfig) -> Self {
        Self::from_parts(self.dim_a, self.dim_b, self.matrix.clone(), tol)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn tolerance(&self) -> &ToleranceConfig {
        &self.tol
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn is_normalized(&self) -> bool {
        (self.trace() - 1.0).abs() <= self.tol.residual_tol
    }

    pub fn normalized(&self) -> Self {
        let t = self.trace();
        Self::from_parts(self.dim_a, self.dim_b, self.matrix.unscale(t), self.tol)
    }

    /// Largest eigenvalue, the scale for all PSD thresholds.
    pub fn norm(&self) -> f64 {
        *self.norm.get_or_init(|| linalg::max_eigenvalue(&self.matrix).max(0.0))
    }

    pub fn rank(&self) -> usize {
        linalg::psd_support(&self.matrix, &self.tol).0.len()
    }

    /// Orthonormal basis of the range, as columns.
    pub fn range(&self) -> CMatrix {
        linalg::psd_support(&self.matrix, &self.tol).1
    }

    pub fn block(&self, i: usize, j: usize) -> CMatrix {
        let n = self.dim_b;
        self.matrix.view((i * n, j * n), (n, n)).into_owned()
    }

    pub fn partial_transpose(&self) -> CMatrix {
        partial_transpose_matrix(&self.matrix, self.dim_a, self.dim_b)
    }

    pub fn reduce(&self, side: Side) -> CMatrix {
        let (m, n) = self.dims();
        match side {
            Side::A => CMatrix::from_fn(m, m, |i, j| (0..n).map(|k| self.matrix[(i * n + k, j * n + k)]).sum()),
            Side::B => CMatrix::from_fn(n, n, |k, l| (0..m).map(|i| self.matrix[(i * n + k, i * n + l)]).sum()),
        }
    }

    pub fn local_ranks(&self) -> (usize, usize) {
        let ra = linalg::psd_support(&self.reduce(Side::A), &self.tol).0.len();
        let rb = linalg::psd_support(&self.reduce(Side::B), &self.tol).0.len();
        (ra, rb)
    }

    /// `⟨x|ρ|x⟩` with `x` on `side`, an operator on the opposite system.
    pub fn sector(&self, x: &CVector, side: Side) -> Result<CMatrix> {
        let (m, n) = self.dims();
        let expected = if side == Side::A { m } else { n };
        if x.len() != expected {
            return Err(Error::Dimension(format!("sector vector has length {}, expected {expected}", x.len())));
        }
        if x.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        let out = match side {
            Side::A => {
                let mut s = CMatrix::zeros(n, n);
                for i in 0..m {
                    for j in 0..m {
                        let w = x[i].conj() * x[j];
                        if w != ZERO {
                            s += self.block(i, j) * w;
                        }
                    }
                }
                s
            }
            Side::B => CMatrix::from_fn(m, m, |i, j| {
                let mut acc = ZERO;
                for k in 0..n {
                    for l in 0..n {
                        acc += x[k].conj() * x[l] * self.matrix[(i * n + k, j * n + l)];
                    }
                }
                acc
            }),
        };
        Ok(linalg::symmetrize(&out))
    }

    /// Row-block form from the eigendecomposition: `C_j[r, k] = conj(ψ_r[jN + k])`
    /// with `ψ_r = √λ_r v_r` over the support of `ρ`.
    pub fn block_form(&self) -> BlockForm {
        let (vals, vecs) = linalg::psd_support(&self.matrix, &self.tol);
        let (m, n) = self.dims();
        let r = vals.len();
        let blocks = (0..m)
            .map(|j| CMatrix::from_fn(r, n, |row, k| (vecs[(j * n + k, row)] * vals[row].sqrt()).conj()))
            .collect();
        BlockForm { blocks, rank: r }
    }

    /// `(A ⊗ B) ρ (A ⊗ B)†`; `None` stands for the identity on that side.
    pub fn apply_local(&self, a: Option<&CMatrix>, b: Option<&CMatrix>) -> Result<Self> {
        let (m, n) = self.dims();
        let ia = linalg::identity(m);
        let ib = linalg::identity(n);
        let a = a.unwrap_or(&ia);
        let b = b.unwrap_or(&ib);
        if a.ncols() != m || b.ncols() != n {
            return Err(Error::Dimension(format!(
                "local operators {}x{} and {}x{} do not act on a {m}x{n} state",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        let l = linalg::kron(a, b);
        let out = &l * &self.matrix * l.adjoint();
        let scale = l.norm().powi(2) * self.matrix.norm();
        if out.norm() <= self.tol.rank_cutoff(scale, out.nrows(), out.ncols()) {
            return Err(Error::Precondition("local operation maps the state to zero".into()));
        }
        Ok(Self::from_parts(a.nrows(), b.nrows(), out, self.tol))
    }

    /// Exchange the roles of A and B.
    pub fn swap(&self) -> Self {
        let (m, n) = self.dims();
        let out = CMatrix::from_fn(m * n, m * n, |r, s| {
            let (k, i) = (r / m, r % m);
            let (l, j) = (s / m, s % m);
            self.matrix[(i * n + k, j * n + l)]
        });
        Self::from_parts(n, m, out, self.tol)
    }

    /// Compress both sides onto the supports of the reduced states.
    pub fn restrict_to_supports(&self) -> Restriction {
        let ua = linalg::psd_support(&self.reduce(Side::A), &self.tol).1;
        let ub = linalg::psd_support(&self.reduce(Side::B), &self.tol).1;
        let state = self
            .apply_local(Some(&ua.adjoint()), Some(&ub.adjoint()))
            .expect("supports of a nonzero state are nonempty");
        Restriction {
            state,
            a_iso: ua,
            b_iso: ub,
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let (m1, n1) = self.dims();
        let (m2, n2) = other.dims();
        let (m, n) = (m1 * m2, n1 * n2);
        let idx = |i1: usize, i2: usize, k1: usize, k2: usize| (i1 * m2 + i2) * n + k1 * n2 + k2;
        let mut out = CMatrix::zeros(m * n, m * n);
        for r1 in 0..m1 * n1 {
            for s1 in 0..m1 * n1 {
                let x = self.matrix[(r1, s1)];
                if x == ZERO {
                    continue;
                }
                let (i1, k1, j1, l1) = (r1 / n1, r1 % n1, s1 / n1, s1 % n1);
                for r2 in 0..m2 * n2 {
                    for s2 in 0..m2 * n2 {
                        let (i2, k2, j2, l2) = (r2 / n2, r2 % n2, s2 / n2, s2 % n2);
                        out[(idx(i1, i2, k1, k2), idx(j1, j2, l1, l2))] = x * other.matrix[(r2, s2)];
                    }
                }
            }
        }
        Self::from_parts(m, n, out, self.tol)
    }
}

/// Output of [`BipartiteState::restrict_to_supports`]: `state = (U_A† ⊗ U_B†) ρ (U_A ⊗ U_B)`.
#[derive(Debug, Clone)]
pub struct Restriction {
    pub state: BipartiteState,
    pub a_iso: CMatrix,
    pub b_iso: CMatrix,
}

pub fn partial_transpose_matrix(rho: &CMatrix, m: usize, n: usize) -> CMatrix {
    CMatrix::from_fn(m * n, m * n, |r, s| {
        let (i, k) = (r / n, r % n);
        let (j, l) = (s / n, s % n);
        rho[(j * n + k, i * n + l)]
    })
}

pub fn partial_transpose(rho: &BipartiteState) -> CMatrix {
    rho.partial_transpose()
}

pub fn reduce(rho: &BipartiteState, side: Side) -> CMatrix {
    rho.reduce(side)
}

pub fn sector(rho: &BipartiteState, x: &CVector, side: Side) -> Result<CMatrix> {
    rho.sector(x, side)
}

pub fn block_form(rho: &BipartiteState) -> BlockForm {
    rho.block_form()
}

pub fn apply_local(rho: &BipartiteState, a: &CMatrix, b: &CMatrix) -> Result<BipartiteState> {
    rho.apply_local(Some(a), Some(b))
}

pub fn tensor(rho: &BipartiteState, sigma: &BipartiteState) -> BipartiteState {
    rho.tensor(sigma)
}

/// Von Neumann entropy in bits; eigenvalues below `psd_tol` contribute nothing.
pub fn von_neumann_entropy(h: &CMatrix, normalize: bool, tol: &ToleranceConfig) -> Result<f64> {
    let (vals, _) = linalg::hermitian_eigen(h, tol)?;
    let tr: f64 = vals.iter().sum();
    if tr <= 0.0 {
        return Err(Error::ZeroTrace);
    }
    let top = vals.last().copied().unwrap_or(0.0);
    if vals[0] < -tol.psd_tol * top.max(1.0) {
        return Err(Error::NotPsd {
            min_eig: vals[0],
            limit: -tol.psd_tol,
        });
    }
    let scale = if normalize { tr } else { 1.0 };
    Ok(vals
        .iter()
        .map(|&l| l / scale)
        .filter(|&p| p > tol.psd_tol)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0))
}

/// Row blocks `C_1 … C_M` (each `R × N`) with `ρ = Σ |i⟩⟨j| ⊗ C_i† C_j`.
#[derive(Debug, Clone)]
pub struct BlockForm {
    pub blocks: Vec<CMatrix>,
    pub rank: usize,
}

impl BlockForm {
    pub fn from_blocks(blocks: Vec<CMatrix>) -> Result<Self> {
        let first = blocks.first().ok_or_else(|| Error::Dimension("empty block list".into()))?;
        let shape = first.shape();
        if blocks.iter().any(|b| b.shape() != shape) {
            return Err(Error::Dimension("blocks must share one shape".into()));
        }
        Ok(Self { rank: shape.0, blocks })
    }

    pub fn dim_a(&self) -> usize {
        self.blocks.len()
    }

    pub fn dim_b(&self) -> usize {
        self.blocks[0].ncols()
    }

    /// The stacked matrix `(C_1, …, C_M)` of shape `R × MN`.
    pub fn stacked(&self) -> CMatrix {
        let (r, n) = self.blocks[0].shape();
        let mut out = CMatrix::zeros(r, n * self.blocks.len());
        for (j, b) in self.blocks.iter().enumerate() {
            out.view_mut((0, j * n), (r, n)).copy_from(b);
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        let s = self.stacked();
        s.adjoint() * s
    }

    pub fn to_state(&self, tol: ToleranceConfig) -> BipartiteState {
        BipartiteState::from_parts(self.dim_a(), self.dim_b(), self.reconstruct(), tol)
    }

    /// `Σ C_i† C_i`, which equals the B marginal.
    pub fn b_marginal(&self) -> CMatrix {
        let n = self.dim_b();
        self.blocks.iter().fold(CMatrix::zeros(n, n), |acc, b| acc + b.adjoint() * b)
    }

    /// `Σ x_k C_k`, whose Gram matrix is the sector operator `⟨x|ρ|x⟩`.
    pub fn pencil(&self, x: &CVector) -> CMatrix {
        let (r, n) = self.blocks[0].shape();
        self.blocks.iter().zip(x.iter()).fold(CMatrix::zeros(r, n), |acc, (b, &w)| acc + b * w)
    }

    /// Matrices `K_i` (`R × M`, one per B index) whose column `j` is column `i` of `C_j`.
    pub fn transposed_blocks(&self) -> Vec<CMatrix> {
        let (r, n) = self.blocks[0].shape();
        let m = self.blocks.len();
        (0..n)
            .map(|i| CMatrix::from_fn(r, m, |row, j| self.blocks[j][(row, i)]))
            .collect()
    }

    /// `Σ_j y_j K_j = [C_1 y, …, C_M y]`.
    pub fn left_pencil(&self, y: &CVector) -> CMatrix {
        let cols: Vec<CVector> = self.blocks.iter().map(|b| b * y).collect();
        CMatrix::from_columns(&cols)
    }

    /// Multiply every block on the right by `C_M⁻¹` so the last block becomes
    /// the identity. Returns the new form and `C_M⁻¹`.
    pub fn normalize_last(&self) -> Result<(BlockForm, CMatrix)> {
        let last = self.blocks.len() - 1;
        let cm = &self.blocks[last];
        if !cm.is_square() {
            return Err(Error::SingularBlock { index: last + 1 });
        }
        let inv = cm.clone().try_inverse().ok_or(Error::SingularBlock { index: last + 1 })?;
        let cond = linalg::spectral_norm(cm) * linalg::spectral_norm(&inv);
        if !cond.is_finite() || cond > 1e12 {
            return Err(Error::SingularBlock { index: last + 1 });
        }
        let mut blocks: Vec<CMatrix> = self.blocks.iter().map(|b| b * &inv).collect();
        blocks[last] = linalg::identity(cm.nrows());
        Ok((
            BlockForm {
                blocks,
                rank: self.rank,
            },
            inv,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != dim_a * dim_b || dim_a == 0 || dim_b == 0 {
            return Err(Error::Dimension(format!(
                "{} amplitudes for a {dim_a}x{dim_b} system",
                amplitudes.len()
            )));
        }
        if amplitudes.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    pub fn product(a: &CVector, b: &CVector) -> Result<Self> {
        Self::new(a.len(), b.len(), a.kronecker(b))
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// `Ψ[i, j] = ψ[i·N + j]`.
    pub fn coefficient_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_a, self.dim_b, |i, j| self.amplitudes[i * self.dim_b + j])
    }

    pub fn schmidt(&self, tol: &ToleranceConfig) -> Schmidt {
        let psi = self.coefficient_matrix();
        let d = linalg::svd(&psi);
        let smax = d.s.first().copied().unwrap_or(0.0);
        let tau = tol.rank_cutoff(smax, self.dim_a, self.dim_b);
        let r = d.s.iter().filter(|&&s| s > tau).count();
        Schmidt {
            coefficients: d.s[..r].to_vec(),
            a_vectors: (0..r).map(|k| d.u.column(k).into_owned()).collect(),
            b_vectors: (0..r).map(|k| d.v.column(k).map(|z| z.conj())).collect(),
        }
    }

    pub fn schmidt_rank(&self, tol: &ToleranceConfig) -> usize {
        self.schmidt(tol).coefficients.len()
    }

    /// `(A ⊗ B) ψ`.
    pub fn apply_local(&self, a: &CMatrix, b: &CMatrix) -> Result<Self> {
        Self::new(a.nrows(), b.nrows(), linalg::kron(a, b) * &self.amplitudes)
    }

    /// The same vector viewed on `B ⊗ A`.
    pub fn swap(&self) -> Self {
        let (m, n) = (self.dim_a, self.dim_b);
        let v = CVector::from_fn(m * n, |r, _| {
            let (k, i) = (r / m, r % m);
            self.amplitudes[i * n + k]
        });
        Self {
            dim_a: n,
            dim_b: m,
            amplitudes: v,
        }
    }
}

/// `ψ = Σ_k s_k a_k ⊗ b_k` with orthonormal `a_k`, `b_k` and descending `s_k > 0`.
#[derive(Debug, Clone)]
pub struct Schmidt {
    pub coefficients: Vec<f64>,
    pub a_vectors: Vec<CVector>,
    pub b_vectors: Vec<CVector>,
}

impl Schmidt {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn reconstruct(&self) -> CVector {
        let n = self.a_vectors.first().map_or(0, |a| a.len()) * self.b_vectors.first().map_or(0, |b| b.len());
        self.coefficients
            .iter()
            .zip(self.a_vectors.iter().zip(&self.b_vectors))
            .fold(CVector::zeros(n), |acc, (&s, (a, b))| acc + a.kronecker(b) * c(s, 0.0))
    }
}

pub fn schmidt(psi: &PureState) -> Schmidt {
    psi.schmidt(&ToleranceConfig::default())
}

/// Unnormalized `|00⟩ + |11⟩ + … ` on `d ⊗ d`.
pub fn max_entangled(d: usize) -> CVector {
    CVector::from_fn(d * d, |r, _| if r / d == r % d { c(1.0, 0.0) } else { ZERO })
}
