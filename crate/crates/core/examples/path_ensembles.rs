//! Samples a window, reads the nonintersecting path ensemble out of each
//! configuration, and writes one SVG in each render mode.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use gibbs_paths::correlations::Window;
use gibbs_paths::kernel::KernelContext;
use gibbs_paths::paths::{extract_paths, render_svg, RenderMode};
use gibbs_paths::psi::{FactorKind, PsiFactor, PsiSequence, SpectralParameter};
use gibbs_paths::sampler::SamplerState;
use gibbs_paths::QuadratureSpec;

fn main() -> gibbs_paths::Result<()> {
    // All-beta models admit the lozenge rendering as well as plain paths.
    let seq = PsiSequence::from_columns([
        (-1, vec![PsiFactor::new(FactorKind::BetaPlus, 0.9)?]),
        (0, vec![PsiFactor::new(FactorKind::BetaPlus, 0.6)?]),
        (1, vec![PsiFactor::new(FactorKind::BetaPlus, 0.4)?]),
    ]);
    let z = SpectralParameter::new(1.0, PI / 2.0)?;
    let ctx = KernelContext::new(seq, z, QuadratureSpec::default())?;

    let window = Window::new(-2, 2, -3, 3)?;
    let mut state = SamplerState::new(&ctx, window)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let cfg = state.draw(&mut rng)?;
    let ensemble = extract_paths(&ctx, &cfg)?;
    println!("sampled configuration: {}", cfg.bitstring());
    println!("chains: {}", ensemble.chains.len());
    println!("noncrossing: {}", ensemble.noncrossing());
    println!("total action: {:.6}", ensemble.total_action());
    for (i, chain) in ensemble.chains.iter().enumerate() {
        println!(
            "  chain {i}: {} connectors{}",
            chain.connectors.len(),
            if chain.truncated { " (leaves the window)" } else { "" },
        );
    }

    let dir = std::env::temp_dir().join("gibbs_paths_example");
    std::fs::create_dir_all(&dir).map_err(gibbs_paths::Error::from)?;
    for (mode, name) in [(RenderMode::Paths, "paths.svg"), (RenderMode::Lozenge, "lozenge.svg")] {
        let svg = render_svg(&ctx, &ensemble, mode)?;
        let path = dir.join(name);
        std::fs::write(&path, svg).map_err(gibbs_paths::Error::from)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
