//! End-to-end acceptance checks. Each test prints one pass/fail line so
//! the suite doubles as a quick health report:
//!
//! ```text
//! cargo test --test acceptance -- --nocapture
//! ```

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::Command;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gibbs_paths::correlations::{event_probability, window_distribution, EventSpec, Site, Window};
use gibbs_paths::gibbs::{
    determinantal_conditional, gibbs_conditional, total_variation, BoxSpec,
};
use gibbs_paths::identities::{verify_model, Suite};
use gibbs_paths::kernel::{equal_time_closed_form, KernelContext};
use gibbs_paths::presets::{instantiate_preset, preset_model, recommended_modulus, PresetSpec};
use gibbs_paths::psi::{FactorKind, PsiFactor, PsiSequence, SpectralParameter};
use gibbs_paths::sampler::SamplerState;
use gibbs_paths::QuadratureSpec;

fn report(id: u32, name: &str, result: Result<(), String>) {
    match result {
        Ok(()) => println!("acceptance {id} {name}: pass"),
        Err(msg) => {
            println!("acceptance {id} {name}: FAIL ({msg})");
            panic!("acceptance {id} {name} failed: {msg}");
        }
    }
}

fn ctx_of(columns: Vec<(i64, FactorKind, f64)>, phi: f64) -> KernelContext {
    let seq = PsiSequence::from_columns(
        columns
            .into_iter()
            .map(|(k, kind, p)| (k, vec![PsiFactor::new(kind, p).unwrap()])),
    );
    let z = SpectralParameter::new(1.0, phi).unwrap();
    KernelContext::new(seq, z, QuadratureSpec::default()).unwrap()
}

/// Random single-factor model with parameters in (0.05, 0.95) and
/// arg z in (0.1 pi, 0.9 pi).
fn random_ctx(rng: &mut ChaCha8Rng, kinds: &[FactorKind], columns: usize) -> KernelContext {
    let cols = (0..columns as i64)
        .map(|k| {
            let kind = kinds[rng.gen_range(0..kinds.len())];
            (k, kind, rng.gen_range(0.05..0.95))
        })
        .collect();
    ctx_of(cols, PI * rng.gen_range(0.1..0.9))
}

#[test]
fn criterion_1_density_reproduction() {
    report(1, "density_reproduction", (|| {
        for phi in [PI / 6.0, PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
            let ctx = ctx_of(vec![(0, FactorKind::BetaPlus, 0.5)], phi);
            for (sigma, x) in [(0i64, 0i64), (0, 5), (1, -3), (2, 7)] {
                let p = ctx.eval_re(sigma, x, sigma, x).map_err(|e| e.to_string())?;
                let want = phi / PI;
                if (p - want).abs() > 1e-10 {
                    return Err(format!("phi={phi}: density {p} != {want}"));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_2_sine_kernel_agreement() {
    report(2, "sine_kernel_agreement", (|| {
        for phi in [PI / 5.0, PI / 2.0, 0.83 * PI] {
            let ctx = ctx_of(
                vec![(0, FactorKind::AlphaPlus, 0.3), (1, FactorKind::BetaPlus, 0.7)],
                phi,
            );
            for d in -20..=20 {
                let q = ctx.eval_re(3, d, 3, 0).map_err(|e| e.to_string())?;
                let c = equal_time_closed_form(ctx.z(), d).re;
                if (q - c).abs() > 2e-12 {
                    return Err(format!("phi={phi} d={d}: |{q} - {c}| > 2e-12"));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_3_identity_suite() {
    report(3, "identity_suite", (|| {
        let kinds = [
            FactorKind::AlphaPlus,
            FactorKind::AlphaMinus,
            FactorKind::BetaPlus,
            FactorKind::BetaMinus,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for model in 0..100u64 {
            let columns = rng.gen_range(2..=3);
            let ctx = random_ctx(&mut rng, &kinds, columns);
            let reports =
                verify_model(&ctx, Suite::All, 1, model).map_err(|e| e.to_string())?;
            for r in reports {
                if !r.pass || r.residual > 1e-9 {
                    return Err(format!(
                        "model {model}: {} at column {} residual {:.3e}",
                        r.identity_id, r.column, r.residual
                    ));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_4_positivity() {
    report(4, "positivity", (|| {
        let kinds = [
            FactorKind::AlphaPlus,
            FactorKind::AlphaMinus,
            FactorKind::BetaPlus,
            FactorKind::BetaMinus,
            FactorKind::GammaPlus,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for model in 0..25 {
            let ctx = random_ctx(&mut rng, &kinds, 3);
            let w = Window::new(0, rng.gen_range(1..=2), 0, rng.gen_range(2..=3)).unwrap();
            // Negative determinants beyond the numerical floor surface as
            // errors from window_distribution, so reaching the sum check
            // means every probability was nonnegative.
            let (_, total) = window_distribution(&ctx, w).map_err(|e| e.to_string())?;
            if (total - 1.0).abs() > 1e-8 {
                return Err(format!("model {model}: window total {total}"));
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_5_sampler_exactness() {
    report(5, "sampler_exactness", (|| {
        let fixtures = [
            (ctx_of(vec![(0, FactorKind::BetaPlus, 0.6)], PI / 2.0), Window::new(0, 1, 0, 4).unwrap()),
            (
                ctx_of(
                    vec![(0, FactorKind::AlphaPlus, 0.4), (1, FactorKind::BetaPlus, 0.7)],
                    PI / 3.0,
                ),
                Window::new(0, 2, 0, 2).unwrap(),
            ),
            (
                ctx_of(
                    vec![(0, FactorKind::BetaMinus, 0.5), (1, FactorKind::AlphaMinus, 0.3)],
                    0.6 * PI,
                ),
                Window::new(0, 1, -2, 2).unwrap(),
            ),
        ];
        let samples = 20_000usize;
        for (i, (ctx, w)) in fixtures.iter().enumerate() {
            let (dist, _) = window_distribution(ctx, *w).map_err(|e| e.to_string())?;
            let exact: BTreeMap<String, f64> =
                dist.iter().map(|(c, p)| (c.bitstring(), *p)).collect();
            let mut counts = BTreeMap::<String, usize>::new();
            let mut state = SamplerState::new(ctx, *w).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(610 + i as u64);
            for _ in 0..samples {
                let cfg = state.draw(&mut rng).map_err(|e| e.to_string())?;
                *counts.entry(cfg.bitstring()).or_default() += 1;
            }
            for bits in counts.keys() {
                let p = *exact.get(bits).ok_or_else(|| format!("unknown config {bits}"))?;
                if p == 0.0 {
                    return Err(format!("fixture {i}: interlacing violation {bits}"));
                }
            }
            for (bits, &p) in &exact {
                if p < 0.005 {
                    continue;
                }
                let n = *counts.get(bits).unwrap_or(&0) as f64;
                let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
                if (n - samples as f64 * p).abs() > 3.0 * sigma {
                    return Err(format!(
                        "fixture {i} config {bits}: {n} vs {:.1} +- {:.1}",
                        samples as f64 * p,
                        sigma
                    ));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_6_gibbs_equivalence() {
    report(6, "gibbs_equivalence", (|| {
        let pairs: [[FactorKind; 3]; 4] = [
            [FactorKind::BetaPlus, FactorKind::BetaPlus, FactorKind::BetaPlus],
            [FactorKind::BetaPlus, FactorKind::AlphaPlus, FactorKind::AlphaPlus],
            [FactorKind::AlphaPlus, FactorKind::BetaPlus, FactorKind::AlphaPlus],
            [FactorKind::AlphaPlus, FactorKind::AlphaPlus, FactorKind::BetaPlus],
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for case in 0..20 {
            let kinds = pairs[case % 4];
            let cols = kinds
                .iter()
                .enumerate()
                .map(|(i, &kind)| (i as i64 - 1, kind, rng.gen_range(0.2..0.9)))
                .collect();
            let ctx = ctx_of(cols, PI * rng.gen_range(0.3..0.7));
            let spec = BoxSpec {
                col_min: -1,
                col_max: 1,
                row_min: 0,
                row_max: 3,
                entrance: vec![0, 2],
                exit: vec![1, 3],
            };
            let g = gibbs_conditional(&ctx, &spec).map_err(|e| e.to_string())?;
            let d = determinantal_conditional(&ctx, &spec).map_err(|e| e.to_string())?;
            let tv = total_variation(&g, &d);
            if tv > 1e-6 {
                return Err(format!("case {case}: total variation {tv:.3e}"));
            }
        }

        // Geometric-progression preset: swapping where the single up-step
        // happens between two adjacent strips changes the probability by
        // exactly e^(tau_temp).
        let tau = 0.35f64;
        let spec = PresetSpec::Beta { kappa: 0.6, tau_temp: tau };
        let seq = instantiate_preset(&spec, -3, 3).map_err(|e| e.to_string())?;
        let z = SpectralParameter::new(recommended_modulus(&seq), PI / 2.0).unwrap();
        let ctx = preset_model(&spec, -3, 3, z)
            .map_err(|e| e.to_string())?
            .context()
            .map_err(|e| e.to_string())?;
        // Path through (k-1,0) -> (k,r) -> (k+1,1): the up step uses the
        // strip weight of column k (r = 1) or column k+1 (r = 0).
        let event = |r: i64| {
            EventSpec::new(
                vec![Site::new(-1, 0), Site::new(0, r), Site::new(1, 1)],
                vec![Site::new(0, 1 - r)],
            )
            .unwrap()
        };
        let p_early = event_probability(&ctx, &event(1)).map_err(|e| e.to_string())?;
        let p_late = event_probability(&ctx, &event(0)).map_err(|e| e.to_string())?;
        let ratio = p_late / p_early;
        let want = tau.exp();
        if (ratio - want).abs() > 1e-8 * want {
            return Err(format!("move ratio {ratio} != e^tau {want}"));
        }
        Ok(())
    })());
}

#[test]
fn criterion_7_canonicalization_soundness() {
    report(7, "canonicalization_soundness", (|| {
        let kinds = [
            FactorKind::AlphaMinus,
            FactorKind::BetaMinus,
            FactorKind::AlphaPlus,
            FactorKind::BetaPlus,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for model in 0..25 {
            // Force at least one "-"-kind factor into each model.
            let mut cols: Vec<(i64, FactorKind, f64)> = (0..3)
                .map(|k| (k, kinds[rng.gen_range(0..kinds.len())], rng.gen_range(0.1..0.9)))
                .collect();
            cols[rng.gen_range(0..3)].1 = kinds[rng.gen_range(0..2)];
            let ctx = ctx_of(cols, PI * rng.gen_range(0.2..0.8));

            // Evaluate the same window directly on the canonical model
            // (all "+"-kind after parameter inversion) and compare after
            // undoing the per-column row shifts.
            let cf = ctx.canonical();
            let ctx_can =
                KernelContext::new(cf.canonical_sequence.clone(), cf.z, QuadratureSpec::default())
                    .map_err(|e| e.to_string())?;
            let w = Window::new(0, 2, 0, 1).unwrap();
            let (dist, _) = window_distribution(&ctx, w).map_err(|e| e.to_string())?;
            for (cfg, p) in dist {
                let ev = cfg.to_event();
                let shifted = EventSpec::new(
                    ev.particles
                        .iter()
                        .map(|s| Site::new(s.column, s.row - cf.row_shift(s.column)))
                        .collect(),
                    ev.holes
                        .iter()
                        .map(|s| Site::new(s.column, s.row - cf.row_shift(s.column)))
                        .collect(),
                )
                .map_err(|e| e.to_string())?;
                let q = event_probability(&ctx_can, &shifted).map_err(|e| e.to_string())?;
                if (p - q).abs() > 1e-9 {
                    return Err(format!(
                        "model {model} config {}: {p} vs canonical {q}",
                        cfg.bitstring()
                    ));
                }
            }
        }
        Ok(())
    })());
}

#[test]
fn criterion_8_cli_determinism() {
    report(8, "cli_determinism", (|| {
        let gp = env!("CARGO_BIN_EXE_gp");
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let model = dir.path().join("model.json");
        let run = |args: &[&str]| -> Result<(), String> {
            let out = Command::new(gp).args(args).output().map_err(|e| e.to_string())?;
            if !out.status.success() {
                return Err(format!(
                    "gp {args:?} failed: {}",
                    String::from_utf8_lossy(&out.stderr)
                ));
            }
            Ok(())
        };
        run(&[
            "preset", "--name", "beta", "--kappa", "0.5", "--temp-tau", "0.3",
            "--k-range", "-2:2", "--out", model.to_str().unwrap(),
        ])?;
        let mut outputs = Vec::new();
        for pass in 0..2 {
            let samples = dir.path().join(format!("s{pass}.ndjson"));
            let paths = dir.path().join(format!("p{pass}.ndjson"));
            let svg = dir.path().join(format!("svg{pass}"));
            run(&[
                "sample", "--model", model.to_str().unwrap(), "--cols", "-1:1",
                "--rows", "-2:2", "--seed", "99", "-n", "10",
                "--out", samples.to_str().unwrap(),
            ])?;
            run(&[
                "paths", "--in", samples.to_str().unwrap(), "--model", model.to_str().unwrap(),
                "--out", paths.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
                "--mode", "paths",
            ])?;
            let mut blob = std::fs::read(&samples).map_err(|e| e.to_string())?;
            blob.extend(std::fs::read(&paths).map_err(|e| e.to_string())?);
            let mut entries: Vec<_> = std::fs::read_dir(&svg)
                .map_err(|e| e.to_string())?
                .map(|e| e.unwrap().path())
                .collect();
            entries.sort();
            for path in entries {
                blob.extend(std::fs::read(path).map_err(|e| e.to_string())?);
            }
            outputs.push(blob);
        }
        if outputs[0] != outputs[1] {
            return Err("repeated invocations produced different bytes".into());
        }
        Ok(())
    })());
}
