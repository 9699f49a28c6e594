//! Builds a small model, evaluates kernel entries, and checks the
//! equal-time column against its discrete sine-kernel closed form.

use std::f64::consts::PI;

use gibbs_paths::kernel::{equal_time_closed_form, KernelContext};
use gibbs_paths::psi::{FactorKind, PsiFactor, PsiSequence, SpectralParameter};
use gibbs_paths::QuadratureSpec;

fn main() -> gibbs_paths::Result<()> {
    // Two geometric columns and a value of z on the unit circle. The
    // argument of z sets the particle density along every column.
    let seq = PsiSequence::from_columns([
        (0, vec![PsiFactor::new(FactorKind::BetaPlus, 0.6)?]),
        (1, vec![PsiFactor::new(FactorKind::AlphaPlus, 0.3)?]),
    ]);
    let z = SpectralParameter::new(1.0, PI / 3.0)?;
    let ctx = KernelContext::new(seq, z, QuadratureSpec::default())?;

    println!("density at every site: {:.12}", ctx.eval_re(0, 0, 0, 0)?);
    println!("expected arg(z)/pi:    {:.12}", (PI / 3.0) / PI);
    println!();

    // Equal-time entries only depend on the row offset, and match the
    // sine kernel sin(phi d) / (pi d) exactly.
    println!("{:>4}  {:>20}  {:>20}", "d", "quadrature", "closed form");
    for d in 0..6 {
        let q = ctx.eval_re(2, d, 2, 0)?;
        let c = equal_time_closed_form(ctx.z(), d).re;
        println!("{d:>4}  {q:>20.15}  {c:>20.15}");
    }
    println!();

    // Entries between different columns pick up the column factors.
    for (sigma, tau) in [(0i64, 1i64), (1, 0), (0, 2)] {
        let v = ctx.eval(sigma, 1, tau, 0)?;
        println!("K(({sigma},1), ({tau},0)) = {:.12} + {:.12}i", v.re, v.im);
    }
    Ok(())
}
