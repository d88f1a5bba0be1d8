//! Verdicts and the data that lets anyone re-check them against `ρ` alone.

use crate::linalg::{self, c, CMatrix, CVector, C64};
use crate::state::{BipartiteState, PureState, Side};
use crate::{Error, Result};

/// One separable term `|a⟩⟨a| ⊗ |b⟩⟨b|` (vectors carry the weight).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub a: CVector,
    pub b: CVector,
}

impl ProductTerm {
    pub fn vector(&self) -> CVector {
        self.a.kronecker(&self.b)
    }
}

pub fn reconstruct_products(products: &[ProductTerm], dim: usize) -> CMatrix {
    products.iter().fold(CMatrix::zeros(dim, dim), |acc, p| {
        let v = p.vector();
        acc + &v * v.adjoint()
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessKind {
    /// Indices `(row, col)` of a 2×2 principal submatrix of `ρ^Γ` with a
    /// vanishing diagonal entry and a nonzero off-diagonal entry.
    TrivialSubmatrix { row: usize, col: usize },
    /// `ρ' = (a_op ⊗ b_op) ρ (a_op ⊗ b_op)†` has a negative partial transpose;
    /// `a_op` has two rows. When `trivial` is set, the negativity sits in that
    /// 2×2 principal submatrix of `ρ'^Γ`. `x` records the sweep parameter.
    TwoByNProjection {
        a_op: CMatrix,
        b_op: Option<CMatrix>,
        x: Option<C64>,
        trivial: Option<(usize, usize)>,
    },
    /// Negative eigenvector of `ρ_A ⊗ I − ρ` (side A) or `I ⊗ ρ_B − ρ` (side B).
    ReductionViolation { side: Side, vector: CVector },
    /// Schmidt-rank-2 vector with `⟨ψ|ρ^Γ|ψ⟩ < 0`.
    SchmidtRank2 { psi: PureState },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub kind: WitnessKind,
    /// Negative quantity certified by the witness, as recomputed from `ρ`.
    pub value: f64,
}

impl Witness {
    pub fn new(kind: WitnessKind, rho: &BipartiteState) -> Result<Self> {
        let mut w = Witness { kind, value: 0.0 };
        w.value = w.evaluate(rho)?;
        Ok(w)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            WitnessKind::TrivialSubmatrix { .. } => "TrivialSubmatrix",
            WitnessKind::TwoByNProjection { .. } => "TwoByNProjection",
            WitnessKind::ReductionViolation { .. } => "ReductionViolation",
            WitnessKind::SchmidtRank2 { .. } => "SchmidtRank2",
        }
    }

    fn projected(rho: &BipartiteState, a_op: &CMatrix, b_op: Option<&CMatrix>) -> Result<BipartiteState> {
        if a_op.nrows() != 2 {
            return Err(Error::Precondition(format!(
                "projection must have 2 rows on side A, got {}",
                a_op.nrows()
            )));
        }
        rho.apply_local(Some(a_op), b_op)
    }

    /// Recompute the certified quantity from `ρ`.
    pub fn evaluate(&self, rho: &BipartiteState) -> Result<f64> {
        let d = rho.dim_a() * rho.dim_b();
        match &self.kind {
            WitnessKind::TrivialSubmatrix { row, col } => {
                if *row >= d || *col >= d || row == col {
                    return Err(Error::Precondition("trivial witness indices out of range".into()));
                }
                Ok(submatrix_min_eig(&rho.partial_transpose(), *row, *col))
            }
            WitnessKind::TwoByNProjection { a_op, b_op, trivial, .. } => {
                let p = Self::projected(rho, a_op, b_op.as_ref())?;
                let g = p.partial_transpose();
                Ok(match trivial {
                    Some((k, l)) => submatrix_min_eig(&g, *k, *l),
                    None => linalg::min_eigenvalue(&g),
                })
            }
            WitnessKind::ReductionViolation { side, vector } => {
                if vector.len() != d {
                    return Err(Error::Dimension("reduction witness has the wrong length".into()));
                }
                let op = reduction_operator(rho, *side);
                Ok((vector.adjoint() * op * vector)[(0, 0)].re / vector.norm_squared())
            }
            WitnessKind::SchmidtRank2 { psi } => {
                if psi.dim_a() != rho.dim_a() || psi.dim_b() != rho.dim_b() {
                    return Err(Error::Dimension("witness vector lives on another space".into()));
                }
                let v = psi.amplitudes();
                let g = rho.partial_transpose();
                Ok((v.adjoint() * g * v)[(0, 0)].re / v.norm_squared())
            }
        }
    }

    /// Scale against which the value is compared.
    pub fn scale(&self, rho: &BipartiteState) -> Result<f64> {
        match &self.kind {
            WitnessKind::TwoByNProjection { a_op, b_op, .. } => {
                Ok(Self::projected(rho, a_op, b_op.as_ref())?.norm())
            }
            _ => Ok(rho.norm()),
        }
    }

    /// Independent re-check; returns the value relative to the scale.
    pub fn validate(&self, rho: &BipartiteState) -> Result<f64> {
        let tol = rho.tolerance();
        let value = self.evaluate(rho)?;
        let scale = self.scale(rho)?;
        let limit = -tol.psd_tol * scale;
        if !(value < limit) {
            return Err(Error::Numerical(format!(
                "{} witness evaluates to {value:.3e}, not below {limit:.3e}",
                self.kind_name()
            )));
        }
        match &self.kind {
            WitnessKind::TrivialSubmatrix { row, col } => {
                check_trivial_pattern(&rho.partial_transpose(), *row, *col, tol.psd_tol * scale)?
            }
            WitnessKind::TwoByNProjection {
                a_op,
                b_op,
                trivial: Some((k, l)),
                ..
            } => {
                let p = Self::projected(rho, a_op, b_op.as_ref())?;
                check_trivial_pattern(&p.partial_transpose(), *k, *l, tol.psd_tol * scale)?
            }
            WitnessKind::SchmidtRank2 { psi } => {
                let r = psi.schmidt_rank(tol);
                if r != 2 {
                    return Err(Error::Numerical(format!("witness vector has Schmidt rank {r}, not 2")));
                }
            }
            _ => {}
        }
        Ok(value / scale)
    }

    /// Schmidt-rank-≤2 vector realizing the witness, when one can be read off
    /// directly (not for reduction-criterion witnesses, which need a search).
    pub fn to_vector(&self, rho: &BipartiteState) -> Result<PureState> {
        let (m, n) = rho.dims();
        match &self.kind {
            WitnessKind::SchmidtRank2 { psi } => Ok(psi.clone()),
            WitnessKind::TrivialSubmatrix { row, col } => {
                let y = submatrix_min_vector(&rho.partial_transpose(), *row, *col);
                let mut v = CVector::zeros(m * n);
                v[*row] = y[0];
                v[*col] = y[1];
                PureState::new(m, n, v)
            }
            WitnessKind::TwoByNProjection { a_op, b_op, trivial, .. } => {
                let p = Self::projected(rho, a_op, b_op.as_ref())?;
                let (pa, pb) = p.dims();
                let g = p.partial_transpose();
                let phi = match trivial {
                    Some((k, l)) => {
                        let y = submatrix_min_vector(&g, *k, *l);
                        let mut v = CVector::zeros(pa * pb);
                        v[*k] = y[0];
                        v[*l] = y[1];
                        v
                    }
                    None => linalg::min_eigenpair(&g).1,
                };
                let ib = linalg::identity(n);
                let b = b_op.as_ref().unwrap_or(&ib);
                // ⟨φ|ρ'^Γ|φ⟩ = ⟨ψ|ρ^Γ|ψ⟩ for ψ = (Aᵀ ⊗ B†) φ.
                PureState::new(m, n, linalg::kron(&a_op.transpose(), &b.adjoint()) * phi)
            }
            WitnessKind::ReductionViolation { .. } => Err(Error::Precondition(
                "reduction witnesses need a search to become Schmidt-rank-2 vectors".into(),
            )),
        }
    }

    /// Given a witness for `σ = (F_A ⊗ F_B) ρ (F_A ⊗ F_B)†`, produce one for `ρ`.
    pub fn pull_back(
        &self,
        sigma: &BipartiteState,
        fa: &CMatrix,
        fb: &CMatrix,
        rho: &BipartiteState,
    ) -> Result<Witness> {
        let (_, sn) = sigma.dims();
        let kind = match &self.kind {
            WitnessKind::TwoByNProjection { a_op, b_op, x, trivial } => WitnessKind::TwoByNProjection {
                a_op: a_op * fa,
                b_op: Some(b_op.as_ref().map_or_else(|| fb.clone(), |b| b * fb)),
                x: *x,
                trivial: *trivial,
            },
            WitnessKind::TrivialSubmatrix { row, col } => {
                let (ia, ka) = (row / sn, row % sn);
                let (ib, kb) = (col / sn, col % sn);
                let rows = CMatrix::from_fn(2, sigma.dim_a(), |r, j| {
                    let target = if r == 0 { ia } else { ib };
                    if j == target {
                        c(1.0, 0.0)
                    } else {
                        c(0.0, 0.0)
                    }
                });
                WitnessKind::TwoByNProjection {
                    a_op: rows * fa,
                    b_op: Some(fb.clone()),
                    x: None,
                    trivial: Some((ka, sn + kb)),
                }
            }
            WitnessKind::SchmidtRank2 { psi } => WitnessKind::SchmidtRank2 {
                psi: PureState::new(
                    rho.dim_a(),
                    rho.dim_b(),
                    linalg::kron(&fa.transpose(), &fb.adjoint()) * psi.amplitudes(),
                )?,
            },
            WitnessKind::ReductionViolation { .. } => {
                let pure = crate::criteria::reduction_to_schmidt2(sigma, self)?;
                return pure.pull_back(sigma, fa, fb, rho);
            }
        };
        Witness::new(kind, rho)
    }

    /// Given a witness for `σ = swap(ρ)`, produce one for `ρ`.
    pub fn unswap(&self, sigma: &BipartiteState, rho: &BipartiteState) -> Result<Witness> {
        let (sm, sn) = sigma.dims();
        let flip = |k: usize, rows: usize, cols: usize| (k % cols) * rows + k / cols;
        let kind = match &self.kind {
            WitnessKind::TrivialSubmatrix { row, col } => WitnessKind::TrivialSubmatrix {
                row: flip(*row, sm, sn),
                col: flip(*col, sm, sn),
            },
            // The two-row side would end up on B, so read the witness off as a vector.
            WitnessKind::TwoByNProjection { .. } => {
                let psi = self.to_vector(sigma)?;
                WitnessKind::SchmidtRank2 {
                    psi: PureState::new(rho.dim_a(), rho.dim_b(), psi.swap().amplitudes().map(|z| z.conj()))?,
                }
            }
            WitnessKind::SchmidtRank2 { psi } => WitnessKind::SchmidtRank2 {
                psi: PureState::new(rho.dim_a(), rho.dim_b(), psi.swap().amplitudes().map(|z| z.conj()))?,
            },
            WitnessKind::ReductionViolation { side, vector } => {
                let v = PureState::new(sm, sn, vector.clone())?.swap();
                WitnessKind::ReductionViolation {
                    side: side.other(),
                    vector: v.amplitudes().clone(),
                }
            }
        };
        Witness::new(kind, rho)
    }
}

/// `ρ_A ⊗ I − ρ` or `I ⊗ ρ_B − ρ`.
pub fn reduction_operator(rho: &BipartiteState, side: Side) -> CMatrix {
    let (m, n) = rho.dims();
    let local = match side {
        Side::A => linalg::kron(&rho.reduce(Side::A), &linalg::identity(n)),
        Side::B => linalg::kron(&linalg::identity(m), &rho.reduce(Side::B)),
    };
    local - rho.matrix()
}

pub(crate) fn principal_2x2(g: &CMatrix, k: usize, l: usize) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[g[(k, k)], g[(k, l)], g[(l, k)], g[(l, l)]])
}

fn submatrix_min_eig(g: &CMatrix, k: usize, l: usize) -> f64 {
    linalg::min_eigenvalue(&principal_2x2(g, k, l))
}

fn submatrix_min_vector(g: &CMatrix, k: usize, l: usize) -> CVector {
    linalg::min_eigenpair(&principal_2x2(g, k, l)).1
}

fn check_trivial_pattern(g: &CMatrix, k: usize, l: usize, threshold: f64) -> Result<()> {
    let (a, d) = (g[(k, k)].re, g[(l, l)].re);
    if a.min(d) > threshold || g[(k, l)].norm() <= threshold {
        return Err(Error::Numerical(format!(
            "entries ({k},{l}) do not form a trivially distillable submatrix"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Separable { products: Vec<ProductTerm> },
    Ppt { min_eig_gamma: f64 },
    PptEntangled { min_eig_gamma: f64, search_report: String },
    Distillable { witness: Witness },
    Undecided { budget_report: String },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Separable { .. } => "Separable",
            Verdict::Ppt { .. } => "PPT",
            Verdict::PptEntangled { .. } => "PPTEntangled",
            Verdict::Distillable { .. } => "Distillable",
            Verdict::Undecided { .. } => "Undecided",
        }
    }
}

/// A verdict plus the ordered tags of the reasoning path that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub verdict: Verdict,
    pub trail: Vec<String>,
}

/// Numbers recomputed from `ρ` when a certificate is re-checked.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Revalidation {
    pub min_eig_gamma: f64,
    pub witness_value: Option<f64>,
    pub witness_relative: Option<f64>,
    pub reconstruction_residual: Option<f64>,
}

impl Certificate {
    pub fn new(verdict: Verdict, trail: Vec<String>) -> Self {
        Self { verdict, trail }
    }

    pub fn tagged(mut self, tag: &str) -> Self {
        self.trail.insert(0, tag.to_string());
        self
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self.verdict, Verdict::Undecided { .. })
    }

    pub fn products(&self) -> Option<&[ProductTerm]> {
        match &self.verdict {
            Verdict::Separable { products } => Some(products),
            _ => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.verdict {
            Verdict::Distillable { witness } => Some(witness),
            _ => None,
        }
    }

    /// Re-check the certificate against `ρ` from scratch.
    pub fn validate(&self, rho: &BipartiteState) -> Result<Revalidation> {
        let tol = rho.tolerance();
        let min_eig_gamma = linalg::min_eigenvalue(&rho.partial_transpose());
        let ppt = min_eig_gamma >= -tol.psd_tol * rho.norm();
        let mut out = Revalidation {
            min_eig_gamma,
            ..Default::default()
        };
        match &self.verdict {
            Verdict::Separable { products } => {
                let r = linalg::relative_residual(&reconstruct_products(products, rho.matrix().nrows()), rho.matrix());
                out.reconstruction_residual = Some(r);
                if r > tol.residual_tol * 10.0 {
                    return Err(Error::Numerical(format!("product decomposition residual {r:.3e}")));
                }
            }
            Verdict::Distillable { witness } => {
                out.witness_value = Some(witness.evaluate(rho)?);
                out.witness_relative = Some(witness.validate(rho)?);
            }
            Verdict::Ppt { .. } | Verdict::PptEntangled { .. } => {
                if !ppt {
                    return Err(Error::Numerical(format!(
                        "state claimed PPT but partial transpose has eigenvalue {min_eig_gamma:.3e}"
                    )));
                }
            }
            Verdict::Undecided { .. } => {}
        }
        Ok(out)
    }

    /// Map a certificate for `σ = (F_A ⊗ F_B) ρ (F_A ⊗ F_B)†` back to `ρ`, where
    /// also `ρ = (G_A ⊗ G_B) σ (G_A ⊗ G_B)†`.
    pub fn pull_back(self, sigma: &BipartiteState, frame: &LocalFrame, rho: &BipartiteState) -> Result<Self> {
        let verdict = match self.verdict {
            Verdict::Separable { products } => Verdict::Separable {
                products: products
                    .into_iter()
                    .map(|p| ProductTerm {
                        a: &frame.ga * p.a,
                        b: &frame.gb * p.b,
                    })
                    .collect(),
            },
            Verdict::Distillable { witness } => Verdict::Distillable {
                witness: witness.pull_back(sigma, &frame.fa, &frame.fb, rho)?,
            },
            other => other,
        };
        Ok(Self {
            verdict,
            trail: self.trail,
        })
    }

    /// Map a certificate for `σ = swap(ρ)` back to `ρ`.
    pub fn unswap(self, sigma: &BipartiteState, rho: &BipartiteState) -> Result<Self> {
        let verdict = match self.verdict {
            Verdict::Separable { products } => Verdict::Separable {
                products: products.into_iter().map(|p| ProductTerm { a: p.b, b: p.a }).collect(),
            },
            Verdict::Distillable { witness } => Verdict::Distillable {
                witness: witness.unswap(sigma, rho)?,
            },
            other => other,
        };
        Ok(Self {
            verdict,
            trail: self.trail,
        })
    }
}

/// A pair of local maps `σ = (F_A ⊗ F_B) ρ (F_A ⊗ F_B)†` together with maps
/// recovering `ρ = (G_A ⊗ G_B) σ (G_A ⊗ G_B)†`.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    pub fa: CMatrix,
    pub fb: CMatrix,
    pub ga: CMatrix,
    pub gb: CMatrix,
}

impl LocalFrame {
    /// Frame of a support restriction with isometries `U_A`, `U_B`.
    pub fn from_isometries(ua: &CMatrix, ub: &CMatrix) -> Self {
        Self {
            fa: ua.adjoint(),
            fb: ub.adjoint(),
            ga: ua.clone(),
            gb: ub.clone(),
        }
    }

    /// Frame of an invertible local operation.
    pub fn from_invertible(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        let ga = a
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("local operator on A is singular".into()))?;
        let gb = b
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numerical("local operator on B is singular".into()))?;
        Ok(Self {
            fa: a.clone(),
            fb: b.clone(),
            ga,
            gb,
        })
    }
}
