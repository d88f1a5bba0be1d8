//! Tripartite pure states: pairwise reductions, the two-PPT-pairs canonical
//! form `Σ_i |a_i⟩|i⟩|i⟩`, and generalized-GHZ detection.

use serde::{Deserialize, Serialize};

use crate::analyze::analyze_bipartite;
use crate::certificate::{Certificate, ProductTerm, Verdict};
use crate::criteria::{is_ppt, SearchBudget};
use crate::linalg::{self, c, CMatrix, CVector, ZERO};
use crate::rank4::separable_decomposition_rank_n;
use crate::state::{BipartiteState, Side};
use crate::structure::classical_side;
use crate::tolerance::ToleranceConfig;
use crate::{Error, Result};

/// Vectors whose normalized overlap exceeds this are treated as parallel.
pub const PARALLEL_THRESHOLD: f64 = 1.0 - 1e-8;

#[derive(Clone, Debug)]
pub struct TripartitePure {
    dims: (usize, usize, usize),
    amplitudes: CVector,
    tol: ToleranceConfig,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pair {
    AB,
    AC,
    BC,
}

impl Pair {
    pub fn name(self) -> &'static str {
        match self {
            Pair::AB => "AB",
            Pair::AC => "AC",
            Pair::BC => "BC",
        }
    }
}

impl TripartitePure {
    pub fn new(dims: (usize, usize, usize), amplitudes: CVector) -> Result<Self> {
        Self::with_tolerance(dims, amplitudes, ToleranceConfig::default())
    }

    /// Amplitudes are flattened as `i·d_B·d_C + j·d_C + k`.
    pub fn with_tolerance(dims: (usize, usize, usize), amplitudes: CVector, tol: ToleranceConfig) -> Result<Self> {
        let (a, b, cc) = dims;
        if a == 0 || b == 0 || cc == 0 {
            return Err(Error::Dimension("tripartite dimensions must be positive".into()));
        }
        if amplitudes.len() != a * b * cc {
            return Err(Error::Dimension(format!(
                "expected {} amplitudes for {a}⊗{b}⊗{cc}, got {}",
                a * b * cc,
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("non-finite amplitude".into()));
        }
        if amplitudes.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(Self { dims, amplitudes, tol })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn tolerance(&self) -> &ToleranceConfig {
        &self.tol
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims.1 + j) * self.dims.2 + k
    }

    /// Reorder the parties; `order[p]` is the old party placed at position `p`.
    pub fn permuted(&self, order: [usize; 3]) -> Self {
        let d = [self.dims.0, self.dims.1, self.dims.2];
        let nd = [d[order[0]], d[order[1]], d[order[2]]];
        let mut amps = CVector::zeros(self.amplitudes.len());
        for i in 0..d[0] {
            for j in 0..d[1] {
                for k in 0..d[2] {
                    let old = [i, j, k];
                    let new = [old[order[0]], old[order[1]], old[order[2]]];
                    amps[(new[0] * nd[1] + new[1]) * nd[2] + new[2]] = self.amplitudes[self.index(i, j, k)];
                }
            }
        }
        Self {
            dims: (nd[0], nd[1], nd[2]),
            amplitudes: amps,
            tol: self.tol,
        }
    }

    /// `(U_A ⊗ U_B ⊗ U_C)|ψ⟩`.
    pub fn apply_local(&self, ua: &CMatrix, ub: &CMatrix, uc: &CMatrix) -> Result<Self> {
        let (a, b, cc) = self.dims;
        if ua.ncols() != a || ub.ncols() != b || uc.ncols() != cc {
            return Err(Error::Dimension("local operators do not match the party dimensions".into()));
        }
        let op = linalg::kron(&linalg::kron(ua, ub), uc);
        Self::with_tolerance((ua.nrows(), ub.nrows(), uc.nrows()), op * &self.amplitudes, self.tol)
    }

    /// `(d_A d_B) × d_C` coefficient matrix.
    fn split_last(&self) -> CMatrix {
        let (a, b, cc) = self.dims;
        CMatrix::from_fn(a * b, cc, |r, k| self.amplitudes[r * cc + k])
    }

    /// Reduced state of a single party.
    pub fn reduced_single(&self, party: usize) -> CMatrix {
        let order = match party {
            0 => [1, 2, 0],
            1 => [0, 2, 1],
            _ => [0, 1, 2],
        };
        let m = self.permuted(order).split_last();
        (m.adjoint() * m).transpose()
    }
}

/// Partial trace over the complementary party; `AC` keeps `A` first, `BC`
/// keeps `B` first.
pub fn reduced_pair(psi: &TripartitePure, pair: Pair) -> BipartiteState {
    let order = match pair {
        Pair::AB => [0, 1, 2],
        Pair::AC => [0, 2, 1],
        Pair::BC => [1, 2, 0],
    };
    let p = psi.permuted(order);
    let m = p.split_last();
    BipartiteState::from_parts(p.dims.0, p.dims.1, &m * m.adjoint(), psi.tol)
}

/// `(I ⊗ U_B ⊗ U_C)|ψ⟩ = Σ_i |a_i⟩|i⟩|i⟩`, labels ordered by decreasing
/// `‖a_i‖`, first nonzero component of each `a_i` real positive.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub a_vectors: Vec<CVector>,
    pub u_b: CMatrix,
    pub u_c: CMatrix,
    pub residual: f64,
}

impl CanonicalForm {
    pub fn reconstruct(&self, dims: (usize, usize, usize)) -> CVector {
        let (a, b, cc) = dims;
        let mut out = CVector::zeros(a * b * cc);
        for (i, av) in self.a_vectors.iter().enumerate() {
            for x in 0..a {
                out[(x * b + i) * cc + i] += av[x];
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct PairRecord {
    pub pair: Pair,
    pub ppt: bool,
    pub min_eig_gamma: f64,
    pub verdict: Certificate,
}

#[derive(Clone, Debug)]
pub struct PairClassification {
    pub pairs: Vec<PairRecord>,
    pub canonical_form: Option<CanonicalForm>,
}

impl PairClassification {
    pub fn both_ppt(&self) -> bool {
        self.pairs.iter().all(|p| p.ppt)
    }
}

fn first_phase(v: &CVector) -> crate::C64 {
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter()
        .find(|z| z.norm() > 1e-12 * top)
        .map_or(c(1.0, 0.0), |z| z / z.norm())
}

/// Canonical form of `ψ` when `ρ_AB` and `ρ_AC` are PPT: decompose `ρ_AB`
/// into `d` products, attach the `C` parts, merge terms with parallel `A`
/// vectors and re-diagonalize each merged group.
pub fn canonical_form(psi: &TripartitePure, budget: &SearchBudget) -> Result<CanonicalForm> {
    let tol = psi.tol;
    let (da, db, dc) = psi.dims;
    let rho_ab = reduced_pair(psi, Pair::AB);
    let products = separable_decomposition_rank_n(&rho_ab, budget)?;
    let phi = CMatrix::from_columns(&products.iter().map(ProductTerm::vector).collect::<Vec<_>>());
    let big = psi.split_last();
    let w = linalg::pinv(&phi, &tol) * &big;
    let fit = linalg::relative_residual(&(&phi * &w), &big);
    if fit > 10.0 * tol.residual_tol {
        return Err(Error::Numerical(format!("AB products do not span the purification (residual {fit:.2e})")));
    }
    // Group parallel A vectors.
    let mut groups: Vec<(CVector, Vec<usize>)> = Vec::new();
    for (k, p) in products.iter().enumerate() {
        let u = p.a.normalize();
        match groups.iter_mut().find(|(x, _)| x.dotc(&u).norm() > PARALLEL_THRESHOLD) {
            Some((_, members)) => members.push(k),
            None => groups.push((u, vec![k])),
        }
    }
    let mut terms: Vec<(CVector, CVector, CVector)> = Vec::new();
    for (x, members) in &groups {
        let mut sigma = CMatrix::zeros(db, dc);
        for &k in members {
            let alpha = x.dotc(&products[k].a);
            let z = w.row(k).transpose();
            sigma += (&products[k].b * z.transpose()) * alpha;
        }
        let s = linalg::svd(&sigma);
        let cut = tol.rank_cutoff(s.s.first().copied().unwrap_or(0.0), db, dc);
        for j in 0..s.s.len() {
            if s.s[j] > cut {
                terms.push((x * c(s.s[j], 0.0), s.u.column(j).into_owned(), s.v.column(j).map(|z| z.conj())));
            }
        }
    }
    terms.sort_by(|p, q| q.0.norm().total_cmp(&p.0.norm()));
    for t in &mut terms {
        let ph = first_phase(&t.0);
        t.0 /= ph;
        t.2 *= ph;
    }
    let fcols = CMatrix::from_columns(&terms.iter().map(|t| t.1.clone()).collect::<Vec<_>>());
    let gcols = CMatrix::from_columns(&terms.iter().map(|t| t.2.clone()).collect::<Vec<_>>());
    let n = terms.len();
    let limit = tol.structural();
    for (name, m) in [("B", &fcols), ("C", &gcols)] {
        let defect = (m.adjoint() * m - linalg::identity(n)).norm();
        if defect > limit {
            return Err(Error::Numerical(format!(
                "canonical form: {name} vectors are not orthonormal (defect {defect:.2e})"
            )));
        }
    }
    let u_b = linalg::complete_unitary(&fcols).adjoint();
    let u_c = linalg::complete_unitary(&gcols).adjoint();
    let mut form = CanonicalForm {
        a_vectors: terms.into_iter().map(|t| t.0).collect(),
        u_b,
        u_c,
        residual: 0.0,
    };
    let moved = psi.apply_local(&linalg::identity(da), &form.u_b, &form.u_c)?;
    let target = form.reconstruct(psi.dims);
    form.residual = (moved.amplitudes() - &target).norm() / psi.amplitudes.norm();
    if form.residual > 10.0 * tol.residual_tol {
        return Err(Error::Numerical(format!(
            "canonical form reconstruction residual {:.2e} while both pairs are PPT",
            form.residual
        )));
    }
    Ok(form)
}

fn form_products(form: &CanonicalForm, u: &CMatrix) -> Vec<ProductTerm> {
    let back = u.adjoint();
    form.a_vectors
        .iter()
        .enumerate()
        .map(|(i, a)| ProductTerm {
            a: a.clone(),
            b: back.column(i).into_owned(),
        })
        .collect()
}

/// PPT test of `ρ_AB`, `ρ_AC`; both PPT ⇒ canonical form and separable
/// certificates read off from it; otherwise each pair is analyzed on its own.
pub fn classify_pairs(psi: &TripartitePure, budget: &SearchBudget) -> Result<PairClassification> {
    let rho_ab = reduced_pair(psi, Pair::AB);
    let rho_ac = reduced_pair(psi, Pair::AC);
    let (ppt_ab, g_ab) = is_ppt(&rho_ab);
    let (ppt_ac, g_ac) = is_ppt(&rho_ac);
    if ppt_ab && ppt_ac {
        let form = canonical_form(psi, budget)?;
        let mut pairs = Vec::new();
        for (pair, rho, u, g) in [(Pair::AB, &rho_ab, &form.u_b, g_ab), (Pair::AC, &rho_ac, &form.u_c, g_ac)] {
            let cert = Certificate::new(
                Verdict::Separable {
                    products: form_products(&form, u),
                },
                vec!["both-pairs-ppt".into(), "ppt-as-undistillable".into(), "canonical-form".into()],
            );
            cert.validate(rho)?;
            pairs.push(PairRecord {
                pair,
                ppt: true,
                min_eig_gamma: g,
                verdict: cert,
            });
        }
        return Ok(PairClassification {
            pairs,
            canonical_form: Some(form),
        });
    }
    let mut pairs = Vec::new();
    for (pair, rho, ppt, g) in [(Pair::AB, &rho_ab, ppt_ab, g_ab), (Pair::AC, &rho_ac, ppt_ac, g_ac)] {
        let verdict = analyze_bipartite(rho, budget)?;
        if !ppt && !matches!(verdict.verdict, Verdict::Distillable { .. } | Verdict::Undecided { .. }) {
            return Err(Error::Numerical(format!("NPT pair {} received a PPT-type verdict", pair.name())));
        }
        pairs.push(PairRecord {
            pair,
            ppt,
            min_eig_gamma: g,
            verdict,
        });
    }
    Ok(PairClassification {
        pairs,
        canonical_form: None,
    })
}

#[derive(Clone, Debug)]
pub struct GhzOutcome {
    pub is_ghz: bool,
    /// `a_i` with `ψ ≅ Σ a_i |iii⟩`, nonincreasing and positive.
    pub coefficients: Option<Vec<f64>>,
    pub undistillable_route: bool,
    pub zero_discord_route: bool,
}

/// Every pair PPT (hence separable) in all three pairings, cross-checked
/// against every reduced state being classical on both sides.
pub fn ghz_test(psi: &TripartitePure, budget: &SearchBudget) -> Result<GhzOutcome> {
    let mut route1 = true;
    for pair in [Pair::AB, Pair::AC, Pair::BC] {
        if !is_ppt(&reduced_pair(psi, pair)).0 {
            route1 = false;
        }
    }
    let mut coefficients = None;
    if route1 {
        for order in [[0, 1, 2], [1, 0, 2], [2, 0, 1]] {
            let p = psi.permuted(order);
            let form = canonical_form(&p, budget)?;
            if order == [0, 1, 2] {
                let norms: Vec<f64> = form.a_vectors.iter().map(|a| a.norm()).collect();
                let gram_off: f64 = form
                    .a_vectors
                    .iter()
                    .enumerate()
                    .flat_map(|(i, x)| form.a_vectors[i + 1..].iter().map(move |y| x.dotc(y).norm()))
                    .fold(0.0, f64::max);
                let scale = norms.first().copied().unwrap_or(0.0).powi(2);
                if gram_off > psi.tol.structural() * scale.max(f64::MIN_POSITIVE) {
                    return Err(Error::Numerical(format!(
                        "all pairs PPT but canonical A vectors are not orthogonal (overlap {gram_off:.2e})"
                    )));
                }
                coefficients = Some(norms);
            }
        }
    }
    let mut route2 = true;
    'outer: for pair in [Pair::AB, Pair::AC, Pair::BC] {
        let rho = reduced_pair(psi, pair);
        for side in [Side::A, Side::B] {
            if !classical_side(&rho, side).0 {
                route2 = false;
                break 'outer;
            }
        }
    }
    if route1 != route2 {
        return Err(Error::Numerical(format!(
            "undistillability route says {route1}, zero-discord route says {route2}"
        )));
    }
    Ok(GhzOutcome {
        is_ghz: route1,
        coefficients: if route1 { coefficients } else { None },
        undistillable_route: route1,
        zero_discord_route: route2,
    })
}

/// `Σ_i a_i |iii⟩`.
pub fn generalized_ghz(coefficients: &[crate::C64]) -> Result<TripartitePure> {
    let d = coefficients.len();
    if d == 0 {
        return Err(Error::InvalidParameter("GHZ needs at least one coefficient".into()));
    }
    let mut amps = CVector::from_element(d * d * d, ZERO);
    for (i, &a) in coefficients.iter().enumerate() {
        amps[(i * d + i) * d + i] = a;
    }
    TripartitePure::new((d, d, d), amps)
}

/// Largest mismatch between the sorted nonzero spectra of `ρ_pair` and of the
/// complementary single-party state, relative to the trace.
pub fn purification_defect(psi: &TripartitePure, pair: Pair) -> f64 {
    let rho = reduced_pair(psi, pair);
    let party = match pair {
        Pair::AB => 2,
        Pair::AC => 1,
        Pair::BC => 0,
    };
    let mut x = linalg::eigh(rho.matrix()).0;
    let mut y = linalg::eigh(&psi.reduced_single(party)).0;
    x.reverse();
    y.reverse();
    let len = x.len().max(y.len());
    x.resize(len, 0.0);
    y.resize(len, 0.0);
    let tr = rho.trace().max(f64::MIN_POSITIVE);
    x.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / tr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_unitary, random_vector, seeded};

    #[test]
    fn ghz_pairs_are_diagonal() {
        let psi = generalized_ghz(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rho = reduced_pair(&psi, Pair::AB);
        let mut expect = CMatrix::zeros(4, 4);
        expect[(0, 0)] = c(1.0, 0.0);
        expect[(3, 3)] = c(1.0, 0.0);
        assert!((rho.matrix() - expect).norm() < 1e-15);
    }

    #[test]
    fn permutation_roundtrip() {
        let mut rng = seeded(3);
        let psi = TripartitePure::new((2, 3, 4), random_vector(&mut rng, 24)).unwrap();
        let back = psi.permuted([1, 2, 0]).permuted([2, 0, 1]);
        assert_eq!(back.dims(), (2, 3, 4));
        assert!((back.amplitudes() - psi.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn spectra_match_complement() {
        let mut rng = seeded(4);
        let psi = TripartitePure::new((2, 3, 2), random_vector(&mut rng, 12)).unwrap();
        for pair in [Pair::AB, Pair::AC, Pair::BC] {
            assert!(purification_defect(&psi, pair) < 1e-12);
        }
    }

    #[test]
    fn canonical_form_of_rotated_sum() {
        let mut rng = seeded(5);
        let d = 3;
        let avs: Vec<CVector> = (0..d).map(|_| random_vector(&mut rng, 2)).collect();
        let mut amps = CVector::zeros(2 * d * d);
        for (i, a) in avs.iter().enumerate() {
            for x in 0..2 {
                amps[(x * d + i) * d + i] = a[x];
            }
        }
        let psi = TripartitePure::new((2, d, d), amps).unwrap();
        let psi = psi
            .apply_local(&linalg::identity(2), &random_unitary(&mut rng, d), &random_unitary(&mut rng, d))
            .unwrap();
        let cls = classify_pairs(&psi, &SearchBudget::default()).unwrap();
        assert!(cls.both_ppt());
        let form = cls.canonical_form.unwrap();
        assert!(form.residual < 1e-8);
        let norms: Vec<f64> = form.a_vectors.iter().map(|a| a.norm()).collect();
        assert!(norms.windows(2).all(|w| w[0] >= w[1]));
    }
}
