//! General dispatcher choosing the strongest applicable procedure.

use crate::certificate::{Certificate, Verdict};
use crate::criteria::{self, SearchBudget};
use crate::rank4;
use crate::state::BipartiteState;
use crate::structure;
use crate::Result;

/// Rank at most the larger local rank → rank-N theory; rank 4 → rank-4
/// decision; otherwise criteria, reducibility and peeling, strongest first.
pub fn analyze_bipartite(rho: &BipartiteState, budget: &SearchBudget) -> Result<Certificate> {
    let rank = rho.rank();
    let (la, lb) = rho.local_ranks();
    if rank <= la.max(lb) {
        return criteria::classify_rank_le_max(rho, budget);
    }
    if rank == 4 {
        return rank4::decide_rank4(rho, budget);
    }
    let (ppt, min_eig_gamma) = criteria::is_ppt(rho);
    let mut trail = vec![format!("rank-{rank}-local-{la}x{lb}")];
    if !ppt {
        if let Some(w) = criteria::find_witness(rho, budget) {
            trail.push(criteria::witness_tag(&w).into());
            let cert = Certificate::new(Verdict::Distillable { witness: w }, trail);
            cert.validate(rho)?;
            return Ok(cert);
        }
    }
    let decomp = structure::decompose_b_direct_seeded(rho, budget.seed);
    if decomp.is_reducible() {
        let c = structure::analyze_reducible(rho, &decomp, budget)?;
        trail.extend(c.trail);
        return Ok(Certificate::new(c.verdict, trail));
    }
    if !ppt {
        if let Some(c) = structure::common_kernel_distill(rho, budget)? {
            trail.extend(c.trail);
            return Ok(Certificate::new(c.verdict, trail));
        }
        trail.push("npt-no-witness".into());
        return Ok(Certificate::new(
            Verdict::Undecided {
                budget_report: format!("NPT but no Schmidt-rank-2 witness found: {}", budget.report()),
            },
            trail,
        ));
    }
    if let Some(products) = rank4::peel_separable(rho, budget)? {
        trail.push("product-peeling".into());
        return Ok(Certificate::new(Verdict::Separable { products }, trail));
    }
    if la * lb <= 6 {
        trail.push("ppt-small-dimension-peeling-failed".into());
        return Ok(Certificate::new(
            Verdict::Undecided {
                budget_report: format!("PPT in dimension at most 6 but peeling failed: {}", budget.report()),
            },
            trail,
        ));
    }
    trail.push("ppt".into());
    Ok(Certificate::new(Verdict::Ppt { min_eig_gamma }, trail))
}
