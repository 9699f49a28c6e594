//! Command-line surface over the library: kernel values, event
//! probabilities, window distributions, identity verification, exact
//! sampling, path extraction, Gibbs box checks, and preset model files.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use gibbs_paths::correlations::{
    event_probability, window_distribution, Configuration, EventSpec, Site, Window,
};
use gibbs_paths::gibbs::{
    determinantal_conditional, enumerate_box, gibbs_conditional, moves_connected, total_variation,
    BoxSpec,
};
use gibbs_paths::identities::{verify_model, Suite};
use gibbs_paths::kernel::equal_time_closed_form;
use gibbs_paths::model::Model;
use gibbs_paths::paths::{extract_paths, render_svg, RenderMode};
use gibbs_paths::presets::{instantiate_preset, preset_model, recommended_modulus, PresetSpec};
use gibbs_paths::psi::SpectralParameter;
use gibbs_paths::sampler::SamplerState;

#[derive(Parser)]
#[command(name = "gp", about = "Determinantal path-ensemble toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WindowArgs {
    /// Column range as A:B (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    cols: String,
    /// Row range as C:D (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    rows: String,
}

impl WindowArgs {
    fn window(&self) -> Result<Window, String> {
        let (c0, c1) = parse_range(&self.cols)?;
        let (r0, r1) = parse_range(&self.rows)?;
        Window::new(c0, c1, r0, r1).map_err(|e| e.to_string())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one kernel matrix element.
    Kernel {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        sigma: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
        #[arg(long, allow_hyphen_values = true)]
        tau: i64,
        #[arg(long, allow_hyphen_values = true)]
        y: i64,
        /// Also print the equal-time closed form (requires sigma == tau).
        #[arg(long)]
        closed_form: bool,
    },
    /// Joint particle/hole probability of an event.
    Prob {
        #[arg(long)]
        model: PathBuf,
        /// Particle sites as "(c,r),(c,r)".
        #[arg(long, default_value = "")]
        particles: String,
        /// Hole sites as "(c,r),(c,r)".
        #[arg(long, default_value = "")]
        holes: String,
    },
    /// Exhaustive distribution over all configurations of a window.
    WindowDist {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Run identity verification sweeps.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 10)]
        sweeps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Draw exact samples of a window (ndjson, one configuration per line).
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'n', long = "count", default_value_t = 1)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extract path ensembles from sampled configurations.
    Paths {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Directory for one SVG per input line.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value = "paths")]
        mode: String,
    },
    /// Compare Gibbs and determinantal conditionals on a box.
    GibbsCheck {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "box")]
        box_spec: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write a preset model file.
    Preset {
        /// beta | alphabeta
        #[arg(long)]
        name: String,
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        #[arg(long = "temp-tau", default_value_t = 0.5)]
        temp_tau: f64,
        /// Progression index range as A:B (inclusive).
        #[arg(long = "k-range", allow_hyphen_values = true)]
        k_range: String,
        /// Contour modulus |z|; defaults to a safe value for the range.
        #[arg(long)]
        modulus: Option<f64>,
        /// Contour argument arg z in (0, pi); the path density is arg z/pi.
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        argument: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected A:B, got `{s}`"))?;
    Ok((
        a.trim().parse().map_err(|e| format!("bad range start: {e}"))?,
        b.trim().parse().map_err(|e| format!("bad range end: {e}"))?,
    ))
}

fn parse_sites(s: &str) -> Result<Vec<Site>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for piece in s.split("),") {
        let p = piece.trim().trim_start_matches('(').trim_end_matches(')');
        let (c, r) = p
            .split_once(',')
            .ok_or_else(|| format!("expected (c,r), got `{piece}`"))?;
        out.push(Site::new(
            c.trim().parse().map_err(|e| format!("bad column: {e}"))?,
            r.trim().parse().map_err(|e| format!("bad row: {e}"))?,
        ));
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct SampleLine {
    cols: (i64, i64),
    rows: (i64, i64),
    bits: String,
    log_prob: f64,
}

#[derive(Serialize)]
struct PathsLine {
    line: usize,
    total_action: f64,
    noncrossing: bool,
    chains: usize,
    truncated_chains: usize,
    truncated_sources: usize,
}

fn run() -> Result<(), String> {
    let cli = Cli::parse();
    match cli.command {
        Command::Kernel { model, sigma, x, tau, y, closed_form } => {
            let ctx = load_ctx(&model)?;
            let v = ctx.eval(sigma, x, tau, y).map_err(|e| e.to_string())?;
            println!("re {:.15e}", v.re);
            println!("im {:.15e}", v.im);
            if closed_form {
                if sigma != tau {
                    return Err("--closed-form requires sigma == tau".into());
                }
                println!("closed_form {:.15e}", equal_time_closed_form(ctx.z(), x - y));
            }
            Ok(())
        }
        Command::Prob { model, particles, holes } => {
            let ctx = load_ctx(&model)?;
            let ev = EventSpec::new(parse_sites(&particles)?, parse_sites(&holes)?)
                .map_err(|e| e.to_string())?;
            let p = event_probability(&ctx, &ev).map_err(|e| e.to_string())?;
            println!("{p:.15e}");
            Ok(())
        }
        Command::WindowDist { model, window, format } => {
            let ctx = load_ctx(&model)?;
            let w = window.window()?;
            let (dist, total) = window_distribution(&ctx, w).map_err(|e| e.to_string())?;
            match format.as_str() {
                "csv" => {
                    println!("configuration,probability");
                    for (cfg, p) in &dist {
                        println!("{},{p:.15e}", cfg.bitstring());
                    }
                    eprintln!("total {total:.15e}");
                }
                "json" => {
                    let map: std::collections::BTreeMap<String, f64> =
                        dist.iter().map(|(c, p)| (c.bitstring(), *p)).collect();
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&serde_json::json!({
                            "total": total,
                            "distribution": map,
                        }))
                        .unwrap()
                    );
                }
                other => return Err(format!("unknown format `{other}`")),
            }
            Ok(())
        }
        Command::Verify { model, suite, sweeps, seed, report } => {
            let ctx = load_ctx(&model)?;
            let reports = verify_model(&ctx, suite, sweeps, seed).map_err(|e| e.to_string())?;
            let failed = reports.iter().filter(|r| !r.pass).count();
            let worst = reports.iter().map(|r| r.residual).fold(0.0f64, f64::max);
            println!("checks {} failed {failed} worst_residual {worst:.3e}", reports.len());
            if let Some(path) = report {
                let doc = serde_json::json!({
                    "checks": reports.len(),
                    "failed": failed,
                    "worst_residual": worst,
                    "reports": reports,
                });
                fs::write(&path, serde_json::to_string_pretty(&doc).unwrap() + "\n")
                    .map_err(|e| e.to_string())?;
            }
            if failed > 0 {
                return Err(format!("{failed} identity checks failed"));
            }
            Ok(())
        }
        Command::Sample { model, window, seed, count, out } => {
            let ctx = load_ctx(&model)?;
            let w = window.window()?;
            let mut state = SamplerState::new(&ctx, w).map_err(|e| e.to_string())?;
            let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
            let mut file = fs::File::create(&out).map_err(|e| e.to_string())?;
            for _ in 0..count {
                let cfg = state.draw(&mut rng).map_err(|e| e.to_string())?;
                let p = event_probability(&ctx, &cfg.to_event()).map_err(|e| e.to_string())?;
                let line = SampleLine {
                    cols: (w.col_min, w.col_max),
                    rows: (w.row_min, w.row_max),
                    bits: cfg.bitstring(),
                    log_prob: p.max(f64::MIN_POSITIVE).ln(),
                };
                writeln!(file, "{}", serde_json::to_string(&line).unwrap())
                    .map_err(|e| e.to_string())?;
            }
            Ok(())
        }
        Command::Paths { input, model, out, svg, mode } => {
            let ctx = load_ctx(&model)?;
            let mode = match mode.as_str() {
                "paths" => RenderMode::Paths,
                "lozenge" => RenderMode::Lozenge,
                other => return Err(format!("unknown mode `{other}`")),
            };
            if let Some(dir) = &svg {
                fs::create_dir_all(dir).map_err(|e| e.to_string())?;
            }
            let text = fs::read_to_string(&input).map_err(|e| e.to_string())?;
            let mut file = fs::File::create(&out).map_err(|e| e.to_string())?;
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let rec: SampleLine = serde_json::from_str(line).map_err(|e| e.to_string())?;
                let w = Window::new(rec.cols.0, rec.cols.1, rec.rows.0, rec.rows.1)
                    .map_err(|e| e.to_string())?;
                let bits: Vec<bool> = rec.bits.chars().map(|c| c == '1').collect();
                let cfg = Configuration::new(w, bits).map_err(|e| e.to_string())?;
                let ens = extract_paths(&ctx, &cfg).map_err(|e| e.to_string())?;
                let summary = PathsLine {
                    line: i,
                    total_action: ens.total_action(),
                    noncrossing: ens.noncrossing(),
                    chains: ens.chains.len(),
                    truncated_chains: ens.chains.iter().filter(|c| c.truncated).count(),
                    truncated_sources: ens.truncated_sources.len(),
                };
                writeln!(file, "{}", serde_json::to_string(&summary).unwrap())
                    .map_err(|e| e.to_string())?;
                if let Some(dir) = &svg {
                    let doc = render_svg(&ctx, &ens, mode).map_err(|e| e.to_string())?;
                    fs::write(dir.join(format!("sample_{i:05}.svg")), doc)
                        .map_err(|e| e.to_string())?;
                }
            }
            Ok(())
        }
        Command::GibbsCheck { model, box_spec, report } => {
            let ctx = load_ctx(&model)?;
            let text = fs::read_to_string(&box_spec).map_err(|e| e.to_string())?;
            let spec: BoxSpec = serde_json::from_str(&text).map_err(|e| e.to_string())?;
            let tuples = enumerate_box(&ctx, &spec).map_err(|e| e.to_string())?;
            let g = gibbs_conditional(&ctx, &spec).map_err(|e| e.to_string())?;
            let d = determinantal_conditional(&ctx, &spec).map_err(|e| e.to_string())?;
            let tv = total_variation(&g, &d);
            let connected = moves_connected(&tuples);
            println!("tuples {} tv {tv:.3e} moves_connected {connected}", tuples.len());
            if let Some(path) = report {
                let doc = serde_json::json!({
                    "tuples": tuples.len(),
                    "total_variation": tv,
                    "moves_connected": connected,
                    "gibbs": g.values().collect::<Vec<_>>(),
                    "determinantal": d.values().collect::<Vec<_>>(),
                });
                fs::write(&path, serde_json::to_string_pretty(&doc).unwrap() + "\n")
                    .map_err(|e| e.to_string())?;
            }
            if tv > 1e-6 {
                return Err(format!("total variation {tv:.3e} exceeds 1e-6"));
            }
            Ok(())
        }
        Command::Preset { name, kappa, lambda, temp_tau, k_range, modulus, argument, out } => {
            let (k0, k1) = parse_range(&k_range)?;
            let spec = match name.as_str() {
                "beta" => PresetSpec::Beta { kappa, tau_temp: temp_tau },
                "alphabeta" => PresetSpec::AlphaBeta { kappa, lambda, tau_temp: temp_tau },
                other => return Err(format!("unknown preset `{other}`")),
            };
            let r = match modulus {
                Some(r) => r,
                None => {
                    let seq = instantiate_preset(&spec, k0, k1).map_err(|e| e.to_string())?;
                    recommended_modulus(&seq)
                }
            };
            let z = SpectralParameter::new(r, argument).map_err(|e| e.to_string())?;
            let m = preset_model(&spec, k0, k1, z).map_err(|e| e.to_string())?;
            m.context().map_err(|e| e.to_string())?;
            m.save(&out).map_err(|e| e.to_string())?;
            println!("wrote {} ({} columns, |z| = {r})", out.display(), m.columns.len());
            Ok(())
        }
    }
}

fn load_ctx(path: &PathBuf) -> Result<gibbs_paths::kernel::KernelContext, String> {
    let m = Model::load(path).map_err(|e| e.to_string())?;
    m.context().map_err(|e| e.to_string())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
