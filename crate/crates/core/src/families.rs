//! Named state families: checkerboard states and their classifier, plus the
//! fixture generators (antisymmetric, Werner, UPB complements, GHZ, label
//! states, a reducible example).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analyze::analyze_bipartite;
use crate::certificate::{Certificate, Verdict, Witness};
use crate::criteria::{self, is_ppt, SearchBudget};
use crate::linalg::{self, c, CMatrix, CVector, C64, ZERO};
use crate::rank4::decide_rank4;
use crate::sampling::{complex_gaussian, random_unitary, substream};
use crate::state::{von_neumann_entropy, BipartiteState, PureState};
use crate::tripartite::{generalized_ghz, TripartitePure};
use crate::{Error, Result};

/// Parameter names in storage order; the letter `o` does not occur.
pub const CHECKERBOARD_LETTERS: [&str; 18] = [
    "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "p", "q", "r", "s",
];

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckerboardParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub e: C64,
    pub f: C64,
    pub g: C64,
    pub h: C64,
    pub i: C64,
    pub j: C64,
    pub k: C64,
    pub l: C64,
    pub m: C64,
    pub n: C64,
    pub p: C64,
    pub q: C64,
    pub r: C64,
    pub s: C64,
}

impl CheckerboardParams {
    pub fn to_array(&self) -> [C64; 18] {
        [
            self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h, self.i, self.j, self.k, self.l, self.m,
            self.n, self.p, self.q, self.r, self.s,
        ]
    }

    pub fn from_array(v: [C64; 18]) -> Self {
        let [a, b, c, d, e, f, g, h, i, j, k, l, m, n, p, q, r, s] = v;
        Self {
            a,
            b,
            c,
            d,
            e,
            f,
            g,
            h,
            i,
            j,
            k,
            l,
            m,
            n,
            p,
            q,
            r,
            s,
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self::from_array(std::array::from_fn(|_| complex_gaussian(rng)))
    }

    /// Boundary instance of the reduced gauge `a=g=f=s=n=1` with
    /// `h = r k̄`, `|c| = 1`, `l = c r̄ k / k̄`; these are PPT.
    pub fn ppt_instance(c_phase: f64, r: C64, k: C64) -> Result<Self> {
        if k.norm() == 0.0 {
            return Err(Error::InvalidParameter("the constraint chain needs k ≠ 0".into()));
        }
        let one = c(1.0, 0.0);
        let cc = C64::from_polar(1.0, c_phase);
        Ok(Self {
            a: one,
            g: one,
            f: one,
            s: one,
            n: one,
            c: cc,
            r,
            k,
            h: r * k.conj(),
            l: cc * r.conj() * k / k.conj(),
            ..Self::default()
        })
    }

    /// The four vectors `|ψ_1⟩ … |ψ_4⟩` on `3 ⊗ 3`.
    pub fn vectors(&self) -> [CVector; 4] {
        let set = |entries: &[(usize, usize, C64)]| {
            let mut v = CVector::from_element(9, ZERO);
            for &(i, j, z) in entries {
                v[i * 3 + j] = z;
            }
            v
        };
        let p = self;
        [
            set(&[(0, 0, p.a), (0, 2, p.d), (1, 1, p.c), (2, 0, p.b), (2, 2, p.e)]),
            set(&[(0, 1, p.g), (1, 0, p.f), (1, 2, p.i), (2, 1, p.h)]),
            set(&[(0, 0, p.j), (0, 2, p.m), (1, 1, p.l), (2, 0, p.k), (2, 2, p.n)]),
            set(&[(0, 1, p.q), (1, 0, p.p), (1, 2, p.s), (2, 1, p.r)]),
        ]
    }
}

/// Entries `(x, y)` of a checkerboard state can be nonzero only when the
/// basis labels `x = 3i+j`, `y = 3k+l` have `i+j ≡ k+l (mod 2)`.
pub fn checkerboard_allows(x: usize, y: usize) -> bool {
    (x / 3 + x % 3) % 2 == (y / 3 + y % 3) % 2
}

/// `ρ = Σ_{i=1}^{4} |ψ_i⟩⟨ψ_i|`.
pub fn make_checkerboard(p: &CheckerboardParams) -> Result<BipartiteState> {
    if p.to_array().iter().all(|z| z.norm() == 0.0) {
        return Err(Error::InvalidParameter("all checkerboard parameters are zero".into()));
    }
    let mut m = CMatrix::zeros(9, 9);
    for v in p.vectors() {
        m += &v * v.adjoint();
    }
    BipartiteState::new(3, 3, m)
}

const TAG_CHECKER: u64 = 0x6368_6b72;

/// Two-row operators `V(x) = |1⟩(x̄⟨u| + ⟨w|) + |2⟩⟨v|` in the frame
/// `(u, v, w)` given by the columns of `frame`.
fn v_operator(frame: &CMatrix, x: C64) -> CMatrix {
    let u = frame.column(0);
    let v = frame.column(1);
    let w = frame.column(2);
    let top = (u * x.conj() + w).adjoint();
    let bottom = v.adjoint();
    let mut op = CMatrix::zeros(2, 3);
    op.set_row(0, &top);
    op.set_row(1, &bottom);
    op
}

fn frames(budget: &SearchBudget) -> Vec<CMatrix> {
    let mut out = Vec::new();
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for p in perms {
        out.push(CMatrix::from_fn(3, 3, |r, col| if r == p[col] { c(1.0, 0.0) } else { ZERO }));
    }
    let mut rng = substream(budget.seed, TAG_CHECKER);
    for _ in 0..budget.witness_frames / 8 {
        out.push(random_unitary(&mut rng, 3));
    }
    out
}

/// Witness search following the checkerboard argument: project the `A` side
/// with `V(x)` and test the resulting `2 ⊗ 3` state for NPT.
fn v_sweep(rho: &BipartiteState, budget: &SearchBudget) -> Option<Witness> {
    let points = criteria::sweep_points(budget);
    let id = linalg::identity(3);
    for frame in frames(budget) {
        for &x in &points {
            let v = v_operator(&frame, x);
            let Ok(sigma) = rho.apply_local(Some(&v), None) else { continue };
            let (ppt, min) = is_ppt(&sigma);
            if ppt || min > -rho.tolerance().psd_tol * sigma.norm() {
                continue;
            }
            let Some(w) = criteria::find_witness(&sigma, budget) else { continue };
            if let Ok(lifted) = w.pull_back(&sigma, &v, &id, rho) {
                if lifted.validate(rho).is_ok() {
                    return Some(lifted);
                }
            }
        }
    }
    None
}

/// Decide a checkerboard state. PPT inputs go through the rank-4 decision;
/// NPT inputs always end with a validated distillation witness or an error.
pub fn classify_checkerboard(rho: &BipartiteState, budget: &SearchBudget) -> Result<Certificate> {
    if rho.dims() != (3, 3) {
        return Err(Error::Dimension("checkerboard states live on 3 ⊗ 3".into()));
    }
    let scale = rho.matrix().norm();
    for x in 0..9 {
        for y in 0..9 {
            if !checkerboard_allows(x, y) && rho.matrix()[(x, y)].norm() > rho.tolerance().residual_tol * scale {
                return Err(Error::Precondition(format!(
                    "entry ({x}, {y}) lies outside the checkerboard pattern"
                )));
            }
        }
    }
    let (ppt, _) = is_ppt(rho);
    let rank = rho.rank();
    let (la, lb) = rho.local_ranks();
    let cert = if ppt {
        let mut c = if rank == 4 {
            decide_rank4(rho, budget)?
        } else {
            analyze_bipartite(rho, budget)?
        };
        c.trail.insert(0, "checkerboard-ppt".into());
        c
    } else if rank <= la.max(lb) {
        criteria::classify_rank_le_max(rho, budget)?.tagged("checkerboard-low-rank")
    } else if la < 3 || lb < 3 {
        let w = criteria::find_witness(rho, budget).ok_or_else(|| {
            Error::SearchExhausted(format!("NPT checkerboard state with a local rank below 3 ({})", budget.report()))
        })?;
        Certificate::new(
            Verdict::Distillable { witness: w },
            vec!["checkerboard-npt".into(), "local-rank-below-3".into()],
        )
    } else if let Some(w) = criteria::trivially_distillable(rho) {
        Certificate::new(
            Verdict::Distillable { witness: w },
            vec!["checkerboard-npt".into(), "trivial-submatrix".into()],
        )
    } else if let Some(w) = v_sweep(rho, budget) {
        Certificate::new(
            Verdict::Distillable { witness: w },
            vec!["checkerboard-npt".into(), "v-projection-sweep".into()],
        )
    } else if let Some(w) = criteria::find_witness(rho, budget) {
        let tag = criteria::witness_tag(&w);
        Certificate::new(
            Verdict::Distillable { witness: w },
            vec!["checkerboard-npt".into(), tag.into()],
        )
    } else {
        return Err(Error::SearchExhausted(format!(
            "NPT checkerboard state without a witness: V(x) sweep and Schmidt-rank-2 search exhausted ({}); \
             every NPT checkerboard state is distillable, so this is a numerical failure",
            budget.report()
        )));
    };
    cert.validate(rho)?;
    match (&cert.verdict, ppt) {
        (Verdict::Separable { .. }, false) => Err(Error::Numerical("separable verdict for an NPT input".into())),
        (Verdict::Distillable { .. }, true) => Err(Error::Numerical("distillable verdict for a PPT input".into())),
        _ => Ok(cert),
    }
}

/// `Σ_{i<j} (|ij⟩ − |ji⟩)(⟨ij| − ⟨ji|)` on `n ⊗ n`.
pub fn antisymmetric(n: usize) -> Result<BipartiteState> {
    if n < 2 {
        return Err(Error::InvalidParameter("antisymmetric states need n ≥ 2".into()));
    }
    let mut vs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut v = CVector::from_element(n * n, ZERO);
            v[i * n + j] = c(1.0, 0.0);
            v[j * n + i] = c(-1.0, 0.0);
            vs.push(v);
        }
    }
    BipartiteState::from_vectors(n, n, &vs)
}

/// Normalized `(I − φ F) / (n² − φ n)` with `F` the swap, `φ ∈ [−1, 1]`.
/// NPT exactly when `φ > 1/n`.
pub fn werner(n: usize, phi: f64) -> Result<BipartiteState> {
    if n < 2 {
        return Err(Error::InvalidParameter("Werner states need n ≥ 2".into()));
    }
    if !(-1.0..=1.0).contains(&phi) {
        return Err(Error::InvalidParameter(format!("Werner parameter {phi} outside [-1, 1]")));
    }
    let d = n * n;
    let mut m = linalg::identity(d);
    for i in 0..n {
        for j in 0..n {
            m[(i * n + j, j * n + i)] -= c(phi, 0.0);
        }
    }
    BipartiteState::new(n, n, m / c(d as f64 - phi * n as f64, 0.0))
}

fn normalized(v: CVector) -> CVector {
    let n = v.norm();
    v / c(n, 0.0)
}

fn complement_projector(dim: usize, vs: &[CVector], tol: f64) -> Result<CMatrix> {
    for (i, x) in vs.iter().enumerate() {
        for (j, y) in vs.iter().enumerate() {
            let g = x.dotc(y);
            let expect = if i == j { 1.0 } else { 0.0 };
            if (g - c(expect, 0.0)).norm() > tol {
                return Err(Error::InvalidParameter(format!(
                    "UPB members {} and {} are not orthonormal (overlap {:.3e})",
                    i + 1,
                    j + 1,
                    g.norm()
                )));
            }
        }
    }
    let mut m = linalg::identity(dim);
    for v in vs {
        m -= v * v.adjoint();
    }
    Ok(m)
}

/// The five-member tile UPB on `3 ⊗ 3`.
pub fn tiles_upb() -> Vec<CVector> {
    let e = |k: usize| linalg::basis_vector(3, k);
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let minus = |x: usize, y: usize| (e(x) - e(y)) * c(s2, 0.0);
    let all = (e(0) + e(1) + e(2)) * c(1.0 / 3f64.sqrt(), 0.0);
    vec![
        e(0).kronecker(&minus(0, 1)),
        minus(0, 1).kronecker(&e(2)),
        e(2).kronecker(&minus(1, 2)),
        minus(1, 2).kronecker(&e(0)),
        all.kronecker(&all),
    ]
}

/// `I₉ − Σ` over the tile UPB: `3 ⊗ 3`, rank 4.
pub fn upb_tiles_state() -> Result<BipartiteState> {
    let m = complement_projector(9, &tiles_upb(), 1e-12)?;
    BipartiteState::new(3, 3, m)
}

/// `|ψ_1⟩ = |111⟩, |ψ_2⟩ = |2,b,c⟩, |ψ_3⟩ = |a,2,c⊥⟩, |ψ_4⟩ = |a⊥,b⊥,2⟩` with
/// `a = cos θ_a |1⟩ + sin θ_a |2⟩` (similarly `b`, `c`).
pub fn shifts_upb(angles: [f64; 3]) -> Result<Vec<CVector>> {
    for &t in &angles {
        let (s, co) = t.sin_cos();
        if s.abs() < 1e-6 || co.abs() < 1e-6 {
            return Err(Error::InvalidParameter(format!(
                "angle {t} makes a basis vector coincide with |1⟩ or |2⟩; the set would be extendible"
            )));
        }
    }
    let v = |t: f64| CVector::from_vec(vec![c(t.cos(), 0.0), c(t.sin(), 0.0)]);
    let vp = |t: f64| CVector::from_vec(vec![c(-t.sin(), 0.0), c(t.cos(), 0.0)]);
    let e1 = linalg::basis_vector(2, 0);
    let e2 = linalg::basis_vector(2, 1);
    let [ta, tb, tc] = angles;
    let triple = |x: &CVector, y: &CVector, z: &CVector| normalized(x.kronecker(y).kronecker(z));
    Ok(vec![
        triple(&e1, &e1, &e1),
        triple(&e2, &v(tb), &v(tc)),
        triple(&v(ta), &e2, &vp(tc)),
        triple(&vp(ta), &vp(tb), &e2),
    ])
}

/// Which party stands alone when a three-qubit state is cut in two.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Cut {
    #[default]
    A,
    B,
    C,
}

/// `I₈ − Σ` over the shifts UPB, cut as `party : rest` (`2 ⊗ 4`).
pub fn upb_shifts_state(angles: [f64; 3], cut: Cut) -> Result<BipartiteState> {
    let vs = shifts_upb(angles)?;
    let m = complement_projector(8, &vs, 1e-12)?;
    let perm: [usize; 3] = match cut {
        Cut::A => [0, 1, 2],
        Cut::B => [1, 0, 2],
        Cut::C => [2, 0, 1],
    };
    let idx = |x: usize| {
        let bits = [(x >> 2) & 1, (x >> 1) & 1, x & 1];
        (bits[perm[0]] << 2) | (bits[perm[1]] << 1) | bits[perm[2]]
    };
    let out = CMatrix::from_fn(8, 8, |r, col| m[(idx(r), idx(col))]);
    BipartiteState::new(2, 4, out)
}

/// `2|φ_1⟩⟨φ_1| + 2|φ_2⟩⟨φ_2|` with `φ_1 = |11⟩+|22⟩`, `φ_2 = |13⟩+|24⟩`,
/// stored on `2 ⊗ 4` (only two `A` levels occur).
pub fn reducible_example() -> Result<BipartiteState> {
    let [p1, p2] = reducible_example_pieces().0;
    BipartiteState::new(2, 4, p1 + p2)
}

fn ket(pairs: &[(usize, usize, f64)]) -> CVector {
    let mut v = CVector::from_element(8, ZERO);
    for &(i, j, z) in pairs {
        v[i * 4 + j] += c(z, 0.0);
    }
    v
}

/// Both B-direct decompositions of [`reducible_example`]:
/// `2|φ_1⟩⟨φ_1| + 2|φ_2⟩⟨φ_2|` and `|φ'_1⟩⟨φ'_1| + |φ'_2⟩⟨φ'_2|`.
pub fn reducible_example_pieces() -> ([CMatrix; 2], [CMatrix; 2]) {
    let proj = |v: CVector, w: f64| (&v * v.adjoint()) * c(w, 0.0);
    let phi1 = ket(&[(0, 0, 1.0), (1, 1, 1.0)]);
    let phi2 = ket(&[(0, 2, 1.0), (1, 3, 1.0)]);
    let q1 = ket(&[(0, 0, 1.0), (0, 2, 1.0), (1, 1, 1.0), (1, 3, 1.0)]);
    let q2 = ket(&[(0, 0, 1.0), (0, 2, -1.0), (1, 1, 1.0), (1, 3, -1.0)]);
    ([proj(phi1, 2.0), proj(phi2, 2.0)], [proj(q1, 1.0), proj(q2, 1.0)])
}

/// `Σ_i p_i |a_i, b_i⟩⟨a_i, b_i| ⊗ |ψ_i⟩⟨ψ_i|` on `(A₁A₂) ⊗ (B₁B₂)`. The
/// labels are `|a_i⟩ = |i⟩` when `label_a` (else `|1⟩`), likewise for `B`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabelStateSpec {
    pub probabilities: Vec<f64>,
    #[serde(default)]
    pub label_a: bool,
    #[serde(default = "default_true")]
    pub label_b: bool,
    pub dims: (usize, usize),
    pub components: Vec<Vec<C64>>,
}

fn default_true() -> bool {
    true
}

impl LabelStateSpec {
    fn check(&self) -> Result<Vec<PureState>> {
        if self.probabilities.is_empty() || self.probabilities.len() != self.components.len() {
            return Err(Error::InvalidParameter(
                "label states need one probability per pure component".into(),
            ));
        }
        if self.probabilities.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidParameter("probabilities must be nonnegative".into()));
        }
        let total: f64 = self.probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total}, not 1")));
        }
        if !self.label_a && !self.label_b && self.components.len() > 1 {
            return Err(Error::InvalidParameter(
                "with no labelled side the components are not locally distinguishable".into(),
            ));
        }
        self.components
            .iter()
            .map(|amps| {
                let v = CVector::from_vec(amps.clone());
                let psi = PureState::new(self.dims.0, self.dims.1, v)?;
                let n = psi.amplitudes().norm();
                PureState::new(self.dims.0, self.dims.1, psi.amplitudes() / c(n, 0.0))
            })
            .collect()
    }
}

pub fn label_state(spec: &LabelStateSpec) -> Result<BipartiteState> {
    let comps = spec.check()?;
    let l = comps.len();
    let (la, lb) = (if spec.label_a { l } else { 1 }, if spec.label_b { l } else { 1 });
    let (da, db) = spec.dims;
    let mut vs = Vec::new();
    for (i, (psi, &p)) in comps.iter().zip(&spec.probabilities).enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut v = CVector::from_element(la * da * lb * db, ZERO);
        let (ia, ib) = (if spec.label_a { i } else { 0 }, if spec.label_b { i } else { 0 });
        for x in 0..da {
            for y in 0..db {
                let row = (ia * da + x) * (lb * db) + ib * db + y;
                v[row] = psi.amplitudes()[x * db + y] * p.sqrt();
            }
        }
        vs.push(v);
    }
    BipartiteState::from_vectors(la * da, lb * db, &vs)
}

/// `Σ_i p_i S(tr_A |ψ_i⟩⟨ψ_i|)` in bits.
pub fn label_state_entanglement(spec: &LabelStateSpec) -> Result<f64> {
    let comps = spec.check()?;
    let mut total = 0.0;
    for (psi, &p) in comps.iter().zip(&spec.probabilities) {
        if p == 0.0 {
            continue;
        }
        let m = psi.coefficient_matrix();
        let reduced_b = (m.adjoint() * &m).transpose();
        total += p * von_neumann_entropy(&reduced_b, true, &crate::ToleranceConfig::default())?;
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FixtureSpec {
    Antisymmetric {
        n: usize,
    },
    Werner {
        n: usize,
        phi: f64,
    },
    #[serde(rename = "upb_tiles_3x3")]
    UpbTiles3x3,
    #[serde(rename = "upb_shifts_2x2x2")]
    UpbShifts2x2x2 {
        #[serde(default = "default_angles")]
        angles: [f64; 3],
        #[serde(default)]
        cut: Cut,
    },
    GeneralizedGhz {
        coefficients: Vec<C64>,
    },
    LabelState(LabelStateSpec),
    #[serde(rename = "reducible_4x4_example")]
    ReducibleExample,
    Checkerboard(CheckerboardParams),
}

fn default_angles() -> [f64; 3] {
    [std::f64::consts::FRAC_PI_4; 3]
}

#[derive(Clone, Debug)]
pub enum Fixture {
    Bipartite(BipartiteState),
    Tripartite(TripartitePure),
}

pub fn make_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    Ok(match spec {
        FixtureSpec::Antisymmetric { n } => Fixture::Bipartite(antisymmetric(*n)?),
        FixtureSpec::Werner { n, phi } => Fixture::Bipartite(werner(*n, *phi)?),
        FixtureSpec::UpbTiles3x3 => Fixture::Bipartite(upb_tiles_state()?),
        FixtureSpec::UpbShifts2x2x2 { angles, cut } => Fixture::Bipartite(upb_shifts_state(*angles, *cut)?),
        FixtureSpec::GeneralizedGhz { coefficients } => Fixture::Tripartite(generalized_ghz(coefficients)?),
        FixtureSpec::LabelState(s) => Fixture::Bipartite(label_state(s)?),
        FixtureSpec::ReducibleExample => Fixture::Bipartite(reducible_example()?),
        FixtureSpec::Checkerboard(p) => Fixture::Bipartite(make_checkerboard(p)?),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::seeded;

    #[test]
    fn antisymmetric_entries() {
        let rho = antisymmetric(3).unwrap();
        let m = rho.matrix();
        // |12⟩ ↔ |21⟩ in 1-based labels.
        assert_eq!(m[(1, 1)], c(1.0, 0.0));
        assert_eq!(m[(1, 3)], c(-1.0, 0.0));
        assert_eq!(m[(0, 0)], ZERO);
        assert_eq!(rho.rank(), 3);
        assert_eq!(rho.local_ranks(), (3, 3));
    }

    #[test]
    fn checkerboard_sparsity_and_rank() {
        let mut rng = seeded(1);
        let p = CheckerboardParams::random(&mut rng);
        let rho = make_checkerboard(&p).unwrap();
        assert_eq!(rho.rank(), 4);
        for x in 0..9 {
            for y in 0..9 {
                if !checkerboard_allows(x, y) {
                    assert_eq!(rho.matrix()[(x, y)], ZERO);
                }
            }
        }
    }

    #[test]
    fn degenerate_checkerboard() {
        let p = CheckerboardParams {
            a: c(1.0, 0.0),
            g: c(1.0, 0.0),
            ..Default::default()
        };
        assert_eq!(make_checkerboard(&p).unwrap().rank(), 2);
        assert!(make_checkerboard(&CheckerboardParams::default()).is_err());
    }

    #[test]
    fn werner_ppt_boundary() {
        assert!(is_ppt(&werner(3, 1.0 / 3.0 - 1e-3).unwrap()).0);
        assert!(!is_ppt(&werner(3, 1.0 / 3.0 + 1e-3).unwrap()).0);
        assert!(werner(3, 1.5).is_err());
    }

    #[test]
    fn upb_states() {
        let tiles = upb_tiles_state().unwrap();
        assert_eq!(tiles.rank(), 4);
        assert!(is_ppt(&tiles).0);
        for cut in [Cut::A, Cut::B, Cut::C] {
            let s = upb_shifts_state(default_angles(), cut).unwrap();
            assert_eq!(s.rank(), 4);
            assert!(is_ppt(&s).0);
        }
        assert!(shifts_upb([0.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn reducible_example_pieces_agree() {
        let rho = reducible_example().unwrap();
        let (x, y) = reducible_example_pieces();
        assert!((&x[0] + &x[1] - &y[0] - &y[1]).norm() < 1e-14);
        assert!((rho.matrix() - &y[0] - &y[1]).norm() < 1e-14);
    }

    #[test]
    fn fixture_spec_json() {
        let spec: FixtureSpec = serde_json::from_str(r#"{"name":"werner","n":3,"phi":0.5}"#).unwrap();
        assert!(matches!(make_fixture(&spec).unwrap(), Fixture::Bipartite(_)));
        let spec: FixtureSpec = serde_json::from_str(r#"{"name":"generalized_ghz","coefficients":[[1,0],[1,0]]}"#).unwrap();
        assert!(matches!(make_fixture(&spec).unwrap(), Fixture::Tripartite(_)));
        let spec: FixtureSpec = serde_json::from_str(r#"{"name":"upb_tiles_3x3"}"#).unwrap();
        assert!(matches!(make_fixture(&spec).unwrap(), Fixture::Bipartite(_)));
    }
}
