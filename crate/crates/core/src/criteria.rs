//! Distillability and PPT criteria, and the constructive certificates for
//! states whose rank does not exceed the larger local rank.

use crate::certificate::{Certificate, LocalFrame, Verdict, Witness, WitnessKind};
use crate::linalg::{self, c, CMatrix, CVector, C64, ONE, ZERO};
use crate::sampling::{self, random_unitary, substream, unit_disc_vector};
use crate::state::{BipartiteState, PureState, Side};
use crate::{Error, Result};

/// Knobs for every randomized search; all streams derive from `seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub seed: u64,
    /// Restarts per dehomogenization in product-vector searches.
    pub product_restarts: usize,
    /// Random 2-frames tried by the Schmidt-rank-2 witness search.
    pub witness_frames: usize,
    /// Scalar sweep length for the rank-N certificate.
    pub x_sweep: usize,
    /// Evaluation points for the full-rank property test.
    pub frp_samples: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            seed: 0,
            product_restarts: 40,
            witness_frames: 64,
            x_sweep: 256,
            frp_samples: 64,
        }
    }
}

impl SearchBudget {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn report(&self) -> String {
        format!(
            "seed {}, {} product restarts, {} witness frames, {} sweep points, {} full-rank samples",
            self.seed, self.product_restarts, self.witness_frames, self.x_sweep, self.frp_samples
        )
    }
}

// Stream tags keep independent searches decorrelated under one seed.
const TAG_FRP: u64 = 1;
const TAG_FRAMES: u64 = 2;
const TAG_SWEEP: u64 = 3;

pub fn is_ppt(rho: &BipartiteState) -> (bool, f64) {
    let min = linalg::min_eigenvalue(&rho.partial_transpose());
    (min >= -rho.tolerance().psd_tol * rho.norm(), min)
}

pub fn reduction_criterion(rho: &BipartiteState) -> (bool, Option<Witness>) {
    let limit = -rho.tolerance().psd_tol * rho.norm();
    let mut best: Option<(f64, Side, CVector)> = None;
    for side in [Side::A, Side::B] {
        let (val, vec) = linalg::min_eigenpair(&crate::certificate::reduction_operator(rho, side));
        if val < limit && best.as_ref().is_none_or(|b| val < b.0) {
            best = Some((val, side, vec));
        }
    }
    match best {
        Some((value, side, vector)) => (
            true,
            Some(Witness {
                kind: WitnessKind::ReductionViolation { side, vector },
                value,
            }),
        ),
        None => (false, None),
    }
}

/// Row-major scan of 2×2 principal submatrices of `ρ^Γ` with one vanishing
/// diagonal entry and a non-negligible off-diagonal entry.
pub fn trivially_distillable(rho: &BipartiteState) -> Option<Witness> {
    let g = rho.partial_transpose();
    let thr = rho.tolerance().psd_tol * rho.norm();
    let d = g.nrows();
    for k in 0..d {
        for l in k + 1..d {
            let (a, b, cc) = (g[(k, k)].re, g[(k, l)].norm(), g[(l, l)].re);
            if a.min(cc) > thr || b <= thr {
                continue;
            }
            let w = Witness::new(WitnessKind::TrivialSubmatrix { row: k, col: l }, rho).ok()?;
            if w.value < -thr {
                return Some(w);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FullRankSide {
    Right,
    Left,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FullRankOutcome {
    /// `⟨x|ρ|x⟩` is invertible for this `x`.
    Holds { x: CVector },
    /// Every sampled point gave a singular sector operator; `failure_bound`
    /// bounds the chance of this happening if the property held.
    Violated { samples: usize, failure_bound: f64 },
    ShortcutHolds,
    ShortcutViolated,
}

impl FullRankOutcome {
    pub fn holds(&self) -> bool {
        matches!(self, FullRankOutcome::Holds { .. } | FullRankOutcome::ShortcutHolds)
    }
}

/// Right: is there `x ∈ H_A` with `⟨x|ρ|x⟩` invertible on the support of
/// `ρ_B`? Left: the same with the roles of the sides exchanged. Both sides
/// are first compressed onto the local supports, so `M × N` are local ranks.
pub fn full_rank_property(rho: &BipartiteState, side: FullRankSide, budget: &SearchBudget) -> FullRankOutcome {
    let (la, lb) = rho.local_ranks();
    if (la, lb) == rho.dims() {
        return full_rank_on_supports(rho, side, budget);
    }
    let res = rho.restrict_to_supports();
    match full_rank_on_supports(&res.state, side, budget) {
        FullRankOutcome::Holds { x } => FullRankOutcome::Holds {
            x: match side {
                FullRankSide::Right => &res.a_iso * x,
                FullRankSide::Left => &res.b_iso * x,
            },
        },
        other => other,
    }
}

fn full_rank_on_supports(rho: &BipartiteState, side: FullRankSide, budget: &SearchBudget) -> FullRankOutcome {
    let bf = rho.block_form();
    let (m, n) = rho.dims();
    let r = bf.rank;
    let (own, other) = match side {
        FullRankSide::Right => (m, n),
        FullRankSide::Left => (n, m),
    };
    if r < other {
        return FullRankOutcome::ShortcutViolated;
    }
    if r > own * (other - 1) {
        return FullRankOutcome::ShortcutHolds;
    }
    let tol = rho.tolerance().residual_tol;
    let mut rng = substream(budget.seed, TAG_FRP);
    for _ in 0..budget.frp_samples {
        let x = unit_disc_vector(&mut rng, own);
        let pencil = match side {
            FullRankSide::Right => bf.pencil(&x),
            FullRankSide::Left => bf.left_pencil(&x),
        };
        let s = linalg::singular_values(&pencil);
        if s.len() >= other && s[other - 1] > tol * s[0] {
            return FullRankOutcome::Holds { x };
        }
    }
    FullRankOutcome::Violated {
        samples: budget.frp_samples,
        failure_bound: (other as f64 / sampling::UNIT_DISC_GRID_SIZE).powi(budget.frp_samples as i32),
    }
}

/// Projected partial transpose on `W ⊗ H_B` (`W` = columns of `frame`):
/// returns the minimum eigenvalue and the corresponding vector of `H_A ⊗ H_B`.
fn compress_a(gamma: &CMatrix, frame: &CMatrix, n: usize) -> (f64, CVector) {
    let q = linalg::kron(frame, &linalg::identity(n));
    let (val, y) = linalg::min_eigenpair(&(q.adjoint() * gamma * &q));
    (val, q * y)
}

fn compress_b(gamma: &CMatrix, frame: &CMatrix, m: usize) -> (f64, CVector) {
    let q = linalg::kron(&linalg::identity(m), frame);
    let (val, y) = linalg::min_eigenpair(&(q.adjoint() * gamma * &q));
    (val, q * y)
}

/// Orthonormal 2-frame spanning the top two Schmidt vectors of `psi` on `side`.
fn schmidt_frame(psi: &CVector, m: usize, n: usize, side: Side) -> CMatrix {
    let coeff = CMatrix::from_fn(m, n, |i, j| psi[i * n + j]);
    let d = linalg::svd(&coeff);
    let cols: Vec<CVector> = match side {
        Side::A => (0..d.s.len().min(2)).map(|k| d.u.column(k).into_owned()).collect(),
        Side::B => (0..d.s.len().min(2)).map(|k| d.v.column(k).map(|z| z.conj())).collect(),
    };
    let dim = if side == Side::A { m } else { n };
    linalg::complete_unitary(&CMatrix::from_columns(&cols)).columns(0, 2.min(dim)).into_owned()
}

/// Alternate A- and B-frame compressions; the value never increases.
fn refine(gamma: &CMatrix, mut best: (f64, CVector), m: usize, n: usize, steps: usize) -> (f64, CVector) {
    for _ in 0..steps {
        let before = best.0;
        if n > 2 {
            let cand = compress_b(gamma, &schmidt_frame(&best.1, m, n, Side::B), m);
            if cand.0 < best.0 {
                best = cand;
            }
        }
        if m > 2 {
            let cand = compress_a(gamma, &schmidt_frame(&best.1, m, n, Side::A), n);
            if cand.0 < best.0 {
                best = cand;
            }
        }
        if before - best.0 <= 1e-14 * before.abs().max(1e-300) {
            break;
        }
    }
    best
}

fn coordinate_frame(dim: usize, i: usize, j: usize) -> CMatrix {
    CMatrix::from_fn(dim, 2, |r, col| if (col == 0 && r == i) || (col == 1 && r == j) { ONE } else { ZERO })
}

/// Candidate A-frames and B-frames searched in order; `seeds` go first.
pub(crate) fn schmidt2_search(
    rho: &BipartiteState,
    seeds: &[(Side, CMatrix)],
    budget: &SearchBudget,
) -> Option<Witness> {
    let (m, n) = rho.dims();
    if m < 2 || n < 2 {
        return None;
    }
    let gamma = rho.partial_transpose();
    let limit = -rho.tolerance().psd_tol * rho.norm();
    let steps = 8;
    let accept = |cand: (f64, CVector)| -> Option<Witness> {
        let (val, psi) = refine(&gamma, cand, m, n, steps);
        if val >= limit {
            return None;
        }
        let psi = PureState::new(m, n, psi).ok()?;
        let w = Witness::new(WitnessKind::SchmidtRank2 { psi }, rho).ok()?;
        w.validate(rho).ok().map(|_| w)
    };
    let try_frame = |side: Side, frame: &CMatrix| -> Option<Witness> {
        let cand = match side {
            Side::A => compress_a(&gamma, frame, n),
            Side::B => compress_b(&gamma, frame, m),
        };
        accept(cand)
    };
    for (side, frame) in seeds {
        if let Some(w) = try_frame(*side, frame) {
            return Some(w);
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            if let Some(w) = try_frame(Side::A, &coordinate_frame(m, i, j)) {
                return Some(w);
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if let Some(w) = try_frame(Side::B, &coordinate_frame(n, i, j)) {
                return Some(w);
            }
        }
    }
    let mut rng = substream(budget.seed, TAG_FRAMES);
    for k in 0..budget.witness_frames {
        let (side, dim) = if k % 2 == 0 { (Side::A, m) } else { (Side::B, n) };
        let frame = random_unitary(&mut rng, dim).columns(0, 2).into_owned();
        if let Some(w) = try_frame(side, &frame) {
            return Some(w);
        }
    }
    None
}

pub fn schmidt2_witness(rho: &BipartiteState, budget: &SearchBudget) -> Option<Witness> {
    if is_ppt(rho).0 {
        return None;
    }
    schmidt2_search(rho, &[], budget)
}

/// Turn a reduction-criterion witness into a Schmidt-rank-2 one, seeding the
/// frame search with the Schmidt vectors of the negative eigenvector.
pub fn reduction_to_schmidt2(rho: &BipartiteState, w: &Witness) -> Result<Witness> {
    let WitnessKind::ReductionViolation { vector, .. } = &w.kind else {
        return Err(Error::Precondition("not a reduction-criterion witness".into()));
    };
    let (m, n) = rho.dims();
    let mut seeds = Vec::new();
    if m >= 2 {
        seeds.push((Side::A, schmidt_frame(vector, m, n, Side::A)));
    }
    if n >= 2 {
        seeds.push((Side::B, schmidt_frame(vector, m, n, Side::B)));
    }
    schmidt2_search(rho, &seeds, &SearchBudget::default())
        .ok_or_else(|| Error::SearchExhausted("no Schmidt-rank-2 vector found for a reduction witness".into()))
}

/// Trivial scan, then the reduction criterion (converted), then the frame search.
pub fn find_witness(rho: &BipartiteState, budget: &SearchBudget) -> Option<Witness> {
    if let Some(w) = trivially_distillable(rho) {
        return Some(w);
    }
    if is_ppt(rho).0 {
        return None;
    }
    if let (true, Some(w)) = reduction_criterion(rho) {
        if let Ok(s) = reduction_to_schmidt2(rho, &w) {
            return Some(s);
        }
    }
    schmidt2_search(rho, &[], budget)
}

/// Support-restricted, side-ordered (`M ≤ N`) view of a state together with
/// the maps back to the caller's frame.
pub(crate) struct Canonical {
    pub state: BipartiteState,
    restricted: BipartiteState,
    frame: LocalFrame,
    swapped: bool,
}

impl Canonical {
    pub fn new(rho: &BipartiteState) -> Self {
        let res = rho.restrict_to_supports();
        let frame = LocalFrame::from_isometries(&res.a_iso, &res.b_iso);
        let swapped = res.state.dim_a() > res.state.dim_b();
        let state = if swapped { res.state.swap() } else { res.state.clone() };
        Self {
            state,
            restricted: res.state,
            frame,
            swapped,
        }
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Map a certificate for `self.state` back to the original `ρ`.
    pub fn lift(&self, cert: Certificate, rho: &BipartiteState) -> Result<Certificate> {
        let cert = if self.swapped {
            cert.unswap(&self.state, &self.restricted)?
        } else {
            cert
        };
        cert.pull_back(&self.restricted, &self.frame, rho)
    }
}

fn validated(cert: Certificate, rho: &BipartiteState) -> Result<Certificate> {
    cert.validate(rho)?;
    Ok(cert)
}

/// Decide a state with `rank ≤ max(local ranks)`: lower rank or NPT ⇒
/// Distillable, rank equal and PPT ⇒ Separable with exactly that many terms.
pub fn classify_rank_le_max(rho: &BipartiteState, budget: &SearchBudget) -> Result<Certificate> {
    let canon = Canonical::new(rho);
    let r = &canon.state;
    let (m, n) = r.dims();
    let rank = r.rank();
    if rank > n {
        return Err(Error::Precondition(format!(
            "rank {rank} exceeds the larger local rank {n}; use the rank-4 decision or the general analysis"
        )));
    }
    let mut trail = vec![format!("local-ranks-{m}x{n}")];
    if canon.swapped() {
        trail.push("side-swap".into());
    }
    let cert = if rank < n {
        trail.push("rank-below-local-rank".into());
        let w = find_witness(r, budget).ok_or_else(|| {
            Error::SearchExhausted(format!("rank {rank} < {n} guarantees a witness, none found ({})", budget.report()))
        })?;
        trail.push(witness_tag(&w).into());
        Certificate::new(Verdict::Distillable { witness: w }, trail)
    } else {
        let (ppt, _) = is_ppt(r);
        if ppt {
            trail.push("ppt-rank-equals-local-rank".into());
            let products = crate::rank4::rank_n_products(r, budget)?;
            Certificate::new(Verdict::Separable { products }, trail)
        } else {
            trail.push("npt-rank-equals-local-rank".into());
            let (w, tag) = rank_n_npt_witness(r, budget)?;
            trail.push(tag);
            Certificate::new(Verdict::Distillable { witness: w }, trail)
        }
    };
    validated(canon.lift(cert, rho)?, rho)
}

pub(crate) fn witness_tag(w: &Witness) -> &'static str {
    match w.kind {
        WitnessKind::TrivialSubmatrix { .. } => "trivial-submatrix",
        WitnessKind::TwoByNProjection { .. } => "two-by-n-projection",
        WitnessKind::ReductionViolation { .. } => "reduction-violation",
        WitnessKind::SchmidtRank2 { .. } => "schmidt-rank-2-search",
    }
}

/// Unitary on `H_A` whose last row is `x† / ‖x‖`, so that the last block of
/// the transformed form is `Σ x_k C_k`.
pub(crate) fn unitary_with_last_row(x: &CVector) -> CMatrix {
    let q = linalg::unitary_with_first_column(x).adjoint();
    let m = q.nrows();
    CMatrix::from_fn(m, m, |i, j| q[((i + 1) % m, j)])
}

/// Blocks after the change of A basis by `u`: `C'_j = Σ_i conj(u_ji) C_i`.
pub(crate) fn rotate_blocks(blocks: &[CMatrix], u: &CMatrix) -> Vec<CMatrix> {
    (0..u.nrows())
        .map(|j| {
            blocks
                .iter()
                .enumerate()
                .fold(CMatrix::zeros(blocks[0].nrows(), blocks[0].ncols()), |acc, (i, b)| acc + b * u[(j, i)].conj())
        })
        .collect()
}

/// Normal form used by the rank-N arguments: `ρ₂ = (U ⊗ L) ρ (U ⊗ L)†` has
/// blocks `D_1 … D_{M-1}, I`.
pub(crate) struct RankNForm {
    pub u: CMatrix,
    pub l: CMatrix,
    pub last_block: CMatrix,
    pub d: Vec<CMatrix>,
}

pub(crate) fn rank_n_form(r: &BipartiteState, budget: &SearchBudget) -> Result<RankNForm> {
    let bf = r.block_form();
    let n = r.dim_b();
    if bf.rank != n {
        return Err(Error::Precondition(format!("rank {} differs from the local rank {n}", bf.rank)));
    }
    let x = match full_rank_property(r, FullRankSide::Right, budget) {
        FullRankOutcome::Holds { x } => x,
        FullRankOutcome::ShortcutHolds => linalg::basis_vector(r.dim_a(), r.dim_a() - 1),
        other => {
            return Err(Error::Precondition(format!("no invertible sector operator found: {other:?}")));
        }
    };
    let u = unitary_with_last_row(&x);
    let rotated = crate::state::BlockForm::from_blocks(rotate_blocks(&bf.blocks, &u))?;
    let last_block = rotated.blocks.last().expect("nonempty").clone();
    let (normal, inv) = rotated.normalize_last()?;
    let mut d = normal.blocks;
    d.pop();
    Ok(RankNForm {
        u,
        l: inv.adjoint(),
        last_block,
        d,
    })
}

pub(crate) fn sweep_points(budget: &SearchBudget) -> Vec<C64> {
    let mut pts = Vec::new();
    for mag in [1.0, 2.0, 0.5, 3.0, 1.0 / 3.0] {
        for ph in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
            pts.push(ph * mag);
        }
        for ph in [c(1.0, 1.0), c(1.0, -1.0), c(-1.0, 1.0), c(-1.0, -1.0)] {
            pts.push(ph * (mag / 2f64.sqrt()));
        }
    }
    let mut rng = substream(budget.seed, TAG_SWEEP);
    while pts.len() < budget.x_sweep.max(pts.len()) {
        pts.push(sampling::complex_gaussian(&mut rng) * 2.0);
    }
    pts.truncate(budget.x_sweep.max(1));
    pts
}

/// Witness for an NPT state of rank `N` with `M ≤ N`: normalize the last block
/// to `I`, test each two-row projection, then sweep `x` in `x·C_i + C_j`
/// for a non-commuting pair.
fn rank_n_npt_witness(r: &BipartiteState, budget: &SearchBudget) -> Result<(Witness, String)> {
    let tol = *r.tolerance();
    let m = r.dim_a();
    let form = match rank_n_form(r, budget) {
        Ok(f) => f,
        Err(_) => {
            let w = find_witness(r, budget)
                .ok_or_else(|| Error::SearchExhausted("full-rank property violated, no witness found".into()))?;
            return Ok((w, "full-rank-violated".into()));
        }
    };
    let row = |k: usize| form.u.row(k).into_owned();
    let projection = |a_op: CMatrix, x: Option<C64>| -> Option<(Witness, f64)> {
        let kind = WitnessKind::TwoByNProjection {
            a_op,
            b_op: Some(form.l.clone()),
            x,
            trivial: None,
        };
        let w = Witness::new(kind, r).ok()?;
        let rel = w.validate(r).ok()?;
        Some((w, rel))
    };
    for i in 0..m - 1 {
        let a_op = CMatrix::from_rows(&[row(i), row(m - 1)]);
        if let Some((w, _)) = projection(a_op, None) {
            return Ok((w, format!("projected-pair-{}-{}", i + 1, m)));
        }
    }
    let mut pair = None;
    'outer: for i in 0..form.d.len() {
        for j in i + 1..form.d.len() {
            let (a, b) = (&form.d[i], &form.d[j]);
            if linalg::commutator(a, b).norm() > tol.residual_tol * a.norm() * b.norm() {
                pair = Some((i, j));
                break 'outer;
            }
        }
    }
    if let Some((i, j)) = pair {
        let grid = 40;
        let mut best: Option<(Witness, f64, C64)> = None;
        for (k, x) in sweep_points(budget).into_iter().enumerate() {
            // Row x̄·e_i + e_j of the A operator selects x·D_i + D_j.
            let a_op = CMatrix::from_rows(&[row(i) * x.conj() + row(j), row(m - 1)]);
            if let Some((w, rel)) = projection(a_op, Some(x)) {
                if best.as_ref().is_none_or(|b| rel < b.1) {
                    best = Some((w, rel, x));
                }
            }
            if best.is_some() && k + 1 >= grid {
                break;
            }
        }
        if let Some((w, _, _)) = best {
            return Ok((w, format!("non-commuting-pair-{}-{}-sweep", i + 1, j + 1)));
        }
    }
    let w = find_witness(r, budget).ok_or_else(|| {
        Error::SearchExhausted(format!(
            "rank-N NPT certificate failed: no projected pair NPT, sweep exhausted, pair {pair:?} ({})",
            budget.report()
        ))
    })?;
    Ok((w, "fallback-search".into()))
}

/// Certificate for `ρ = |ψ⟩⟨ψ| + σ` with `ψ` entangled and `rank σ_A < rank ρ_A`:
/// project A onto a kernel direction of `σ_A` and one more basis vector, and
/// map the two B components of `ψ` to `|0⟩`, `|1⟩`.
pub fn certify_pure_plus_sigma(psi: &PureState, sigma: &BipartiteState) -> Result<Certificate> {
    let tol = *sigma.tolerance();
    let (m, n) = (psi.dim_a(), psi.dim_b());
    if sigma.dims() != (m, n) {
        return Err(Error::Dimension("ψ and σ live on different spaces".into()));
    }
    if psi.schmidt_rank(&tol) < 2 {
        return Err(Error::Precondition("ψ is a product vector".into()));
    }
    let v = psi.amplitudes();
    let rho = BipartiteState::from_parts(m, n, v * v.adjoint() + sigma.matrix(), tol);
    let rho_a = rho.reduce(Side::A);
    let ua = linalg::psd_support(&rho_a, &tol).1;
    let sa = ua.adjoint() * sigma.reduce(Side::A) * &ua;
    let ma = ua.ncols();
    let (rank_sa, kernel) = linalg::numerical_rank(&sa, &tol);
    if rank_sa >= ma {
        return Err(Error::Precondition(format!(
            "rank of σ_A ({rank_sa}) is not below the local rank of ρ_A ({ma})"
        )));
    }
    // Coefficients of ψ in the restricted A frame: row i is ψ_i = (⟨u_i| ⊗ I)ψ.
    let coeff = ua.adjoint() * psi.coefficient_matrix();
    let kmat = CMatrix::from_columns(&kernel);
    let top = linalg::svd(&(kmat.adjoint() * &coeff));
    let w = &kmat * top.u.column(0);
    let basis = linalg::complete_unitary(&CMatrix::from_columns(&[w]));
    // Put w last.
    let order: Vec<usize> = (1..ma).chain(std::iter::once(0)).collect();
    let frame = CMatrix::from_fn(ma, ma, |i, j| basis[(i, order[j])]);
    let comps = frame.adjoint() * &coeff;
    let last = comps.row(ma - 1).transpose();
    let lnorm = last.norm();
    let mut best = (0usize, -1.0f64);
    for k in 0..ma - 1 {
        let row = comps.row(k).transpose();
        let perp = &row - &last * (last.dotc(&row) / c(lnorm * lnorm, 0.0));
        if perp.norm() > best.1 {
            best = (k, perp.norm());
        }
    }
    if best.1 <= tol.residual_tol * coeff.norm() {
        return Err(Error::Numerical("no component of ψ independent of its kernel-direction part".into()));
    }
    let k = best.0;
    let pair = CMatrix::from_columns(&[comps.row(k).transpose(), last]);
    // V maps the B parts ψ_k, ψ_w to |0⟩, |1⟩.
    let v_op = linalg::pinv(&pair, &tol);
    let full_a = ua * &frame;
    let a_op = CMatrix::from_rows(&[full_a.column(k).adjoint(), full_a.column(ma - 1).adjoint()]);
    let kind = WitnessKind::TwoByNProjection {
        a_op,
        b_op: Some(v_op),
        x: None,
        trivial: Some((1, 2)),
    };
    let witness = Witness::new(kind, &rho)?;
    witness.validate(&rho)?;
    Ok(Certificate::new(
        Verdict::Distillable { witness },
        vec!["pure-plus-low-rank".into(), "trivial-submatrix".into()],
    ))
}
