//! Runs the full identity-verification suite on a randomly chosen mixed
//! model: linear recursions, interlacing determinants, elementary moves,
//! and moves embedded in random environments.

use std::f64::consts::PI;

use gibbs_paths::identities::{verify_model, Suite};
use gibbs_paths::kernel::KernelContext;
use gibbs_paths::psi::{FactorKind, PsiFactor, PsiSequence, SpectralParameter};
use gibbs_paths::QuadratureSpec;

fn main() -> gibbs_paths::Result<()> {
    let seq = PsiSequence::from_columns([
        (-1, vec![PsiFactor::new(FactorKind::AlphaMinus, 0.35)?]),
        (0, vec![PsiFactor::new(FactorKind::BetaPlus, 0.7)?]),
        (1, vec![PsiFactor::new(FactorKind::AlphaPlus, 0.25)?]),
        (2, vec![PsiFactor::new(FactorKind::BetaMinus, 0.5)?]),
    ]);
    let z = SpectralParameter::new(1.0, 0.4 * PI)?;
    let ctx = KernelContext::new(seq, z, QuadratureSpec::default())?;

    for suite in [Suite::Linear, Suite::Interlacing, Suite::Moves, Suite::Environment] {
        let reports = verify_model(&ctx, suite, 5, 42)?;
        let failed = reports.iter().filter(|r| !r.pass).count();
        let worst = reports.iter().map(|r| r.residual).fold(0.0f64, f64::max);
        println!(
            "{:<12} checks {:>3}  failed {failed}  worst residual {worst:.3e}",
            format!("{suite:?}"),
            reports.len(),
        );
    }

    // A closer look at a few individual reports.
    println!();
    for r in verify_model(&ctx, Suite::Linear, 1, 7)?.iter().take(4) {
        println!(
            "{:<22} column {:>2}  residual {:.3e}  (tol {:.0e})  {}",
            r.identity_id,
            r.column,
            r.residual,
            r.tolerance,
            if r.pass { "ok" } else { "FAIL" },
        );
    }
    Ok(())
}
