//! Conditions the field on the boundary columns of a box and compares
//! the resulting distribution over interior path tuples with the
//! Boltzmann weights exp(sum of step actions).

use std::f64::consts::PI;

use gibbs_paths::gibbs::{
    determinantal_conditional, enumerate_box, gibbs_conditional, moves_connected, total_variation,
    tuple_action, BoxSpec,
};
use gibbs_paths::kernel::KernelContext;
use gibbs_paths::psi::{FactorKind, PsiFactor, PsiSequence, SpectralParameter};
use gibbs_paths::QuadratureSpec;

fn main() -> gibbs_paths::Result<()> {
    let seq = PsiSequence::from_columns([
        (-1, vec![PsiFactor::new(FactorKind::BetaPlus, 0.7)?]),
        (0, vec![PsiFactor::new(FactorKind::AlphaPlus, 0.3)?]),
        (1, vec![PsiFactor::new(FactorKind::BetaPlus, 0.5)?]),
    ]);
    let z = SpectralParameter::new(1.0, PI / 2.0)?;
    let ctx = KernelContext::new(seq, z, QuadratureSpec::default())?;

    // Two paths enter at rows 0 and 2 and leave at rows 1 and 3.
    let spec = BoxSpec {
        col_min: -1,
        col_max: 1,
        row_min: 0,
        row_max: 3,
        entrance: vec![0, 2],
        exit: vec![1, 3],
    };

    let tuples = enumerate_box(&ctx, &spec)?;
    println!("interior tuples compatible with the boundary: {}", tuples.len());
    println!("connected under elementary moves: {}", moves_connected(&tuples));
    println!();

    let gibbs = gibbs_conditional(&ctx, &spec)?;
    let det = determinantal_conditional(&ctx, &spec)?;
    println!("{:<24} {:>12} {:>14} {:>14}", "tuple", "action", "Boltzmann", "determinantal");
    for t in &tuples {
        println!(
            "{:<24} {:>12.6} {:>14.10} {:>14.10}",
            format!("{:?}", t.columns),
            tuple_action(&ctx, &spec, t)?,
            gibbs[t],
            det[t],
        );
    }
    println!();
    println!("total variation distance: {:.3e}", total_variation(&gibbs, &det));
    Ok(())
}
