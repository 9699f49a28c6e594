//! Conversion of window configurations into nonintersecting path ensembles.
//!
//! Each column strip (c, c+1) carries one weight factor; its kind selects
//! one of the four interlacing maps. Alpha strips connect a particle at
//! (c, x) to the nearest particle at (c+1, y) upward (y >= x) or downward
//! (y <= x) through a three-link connector via the half-column c+1/2.
//! Beta strips connect straight to y in {x, x+1} (up) or {x-1, x} (down).
//! Connector actions are (|y-x|) ln(param) for alpha strips and 0 or
//! ln(param) for beta strips.
//!
//! Half-column coordinates are kept exact by doubling both coordinates, so
//! the non-intersection test is integer arithmetic.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::correlations::{Configuration, Site};
use crate::error::{Error, Result};
use crate::kernel::KernelContext;
use crate::psi::FactorKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectorKind {
    AlphaUp,
    AlphaDown,
    BetaUp,
    BetaDown,
}

impl ConnectorKind {
    pub fn from_factor(kind: FactorKind) -> Option<Self> {
        match kind {
            FactorKind::AlphaPlus => Some(ConnectorKind::AlphaUp),
            FactorKind::AlphaMinus => Some(ConnectorKind::AlphaDown),
            FactorKind::BetaPlus => Some(ConnectorKind::BetaUp),
            FactorKind::BetaMinus => Some(ConnectorKind::BetaDown),
            FactorKind::GammaPlus | FactorKind::GammaMinus => None,
        }
    }

    pub fn is_alpha(self) -> bool {
        matches!(self, ConnectorKind::AlphaUp | ConnectorKind::AlphaDown)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connector {
    pub kind: ConnectorKind,
    pub source: Site,
    pub target: Site,
    pub action: f64,
}

impl Connector {
    /// Vertex chain in doubled coordinates (column*2, row*2); alpha
    /// connectors route through the half-column at doubled column 2c+1.
    pub fn polyline(&self) -> Vec<(i64, i64)> {
        let (c, x) = (self.source.column, self.source.row);
        let y = self.target.row;
        if self.kind.is_alpha() {
            vec![(2 * c, 2 * x), (2 * c + 1, 2 * x), (2 * c + 1, 2 * y), (2 * c + 2, 2 * y)]
        } else {
            vec![(2 * c, 2 * x), (2 * c + 2, 2 * y)]
        }
    }

    /// Every integer lattice point covered by the connector, in doubled
    /// coordinates. Segments are axis-aligned or slope +-1 over an even
    /// horizontal run, so this is exhaustive and exact.
    pub fn lattice_points(&self) -> Vec<(i64, i64)> {
        let mut pts = Vec::new();
        let verts = self.polyline();
        for w in verts.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            let steps = (x1 - x0).abs().max((y1 - y0).abs());
            let (dx, dy) = ((x1 - x0).signum(), (y1 - y0).signum());
            for s in 0..=steps {
                pts.push((x0 + s * dx, y0 + s * dy));
            }
        }
        pts.dedup();
        pts
    }
}

/// One maximal chain of connectors, left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathChain {
    pub connectors: Vec<Connector>,
    /// True when the chain does not span the full column range of the
    /// window, i.e. it enters or leaves through a window edge artifact.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsembleWindow {
    pub config: Configuration,
    pub chains: Vec<PathChain>,
    /// Source particles whose interlacing target falls outside the window.
    pub truncated_sources: Vec<Site>,
}

impl PathEnsembleWindow {
    /// Sum of all connector actions in the window.
    pub fn total_action(&self) -> f64 {
        self.chains
            .iter()
            .flat_map(|c| &c.connectors)
            .map(|c| c.action)
            .sum()
    }

    /// Exact pairwise non-intersection check between distinct chains, on
    /// the doubled integer lattice.
    pub fn noncrossing(&self) -> bool {
        let mut owner: HashMap<(i64, i64), usize> = HashMap::new();
        for (idx, chain) in self.chains.iter().enumerate() {
            for conn in &chain.connectors {
                for pt in conn.lattice_points() {
                    if let Some(&prev) = owner.get(&pt) {
                        if prev != idx {
                            return false;
                        }
                    } else {
                        owner.insert(pt, idx);
                    }
                }
            }
        }
        true
    }
}

/// Particle rows of `config` at column `c`, ascending.
fn particle_rows(config: &Configuration, c: i64) -> Vec<i64> {
    config
        .particle_sites()
        .into_iter()
        .filter(|s| s.column == c)
        .map(|s| s.row)
        .collect()
}

/// The interlacing map for the strip (k, k+1) of `config`: source particle
/// row -> target particle row. Sources whose target lies outside the window
/// are omitted. Violations of the interlacing constraint that are fully
/// visible inside the window are errors.
pub fn interlace_map(
    config: &Configuration,
    k: i64,
    kind: ConnectorKind,
) -> Result<BTreeMap<i64, i64>> {
    let w = config.window;
    assert!(k >= w.col_min && k < w.col_max, "strip outside window");
    let sources = particle_rows(config, k);
    let targets = particle_rows(config, k + 1);
    let mut map = BTreeMap::new();
    match kind {
        ConnectorKind::AlphaUp => {
            for &x in &sources {
                if let Some(&y) = targets.iter().find(|&&y| y >= x) {
                    map.insert(x, y);
                }
            }
        }
        ConnectorKind::AlphaDown => {
            for &x in &sources {
                if let Some(&y) = targets.iter().rev().find(|&&y| y <= x) {
                    map.insert(x, y);
                }
            }
        }
        ConnectorKind::BetaUp | ConnectorKind::BetaDown => {
            // Global sweep form of the inductive definition: each particle
            // takes the lowest admissible target above the previous one.
            let lo_off = if kind == ConnectorKind::BetaUp { 0 } else { -1 };
            let mut prev: Option<i64> = None;
            for &x in &sources {
                let cand = targets
                    .iter()
                    .find(|&&y| y >= x + lo_off && prev.map_or(true, |p| y > p))
                    .copied();
                match cand {
                    Some(y) if y <= x + lo_off + 1 => {
                        map.insert(x, y);
                        prev = Some(y);
                    }
                    Some(y) if w.row_min > x + lo_off => {
                        // Candidate exists but is too far and the admissible
                        // rows poke below the window: treat as truncation.
                        let _ = y;
                    }
                    Some(y) => {
                        return Err(Error::InterlacingViolation {
                            column: k,
                            next: k + 1,
                            detail: format!("particle at row {x} maps to distant row {y}"),
                        });
                    }
                    None => {}
                }
            }
        }
    }
    // Injectivity: duplicate targets signal a forbidden pattern whenever
    // the clash is visible inside the window.
    let mut seen: BTreeMap<i64, i64> = BTreeMap::new();
    for (&x, &y) in &map {
        if let Some(&x0) = seen.get(&y) {
            return Err(Error::InterlacingViolation {
                column: k,
                next: k + 1,
                detail: format!("rows {x0} and {x} both map to row {y}"),
            });
        }
        seen.insert(y, x);
    }
    Ok(map)
}

/// Strip kinds and parameters for every strip covered by the window: the
/// factor of column c+1 governs the strip (c, c+1). Empty columns denote
/// identity strips (straight zero-action connectors); multi-factor columns
/// are rejected, as are gamma kinds which carry no path picture.
fn strip_kind(ctx: &KernelContext, c: i64) -> Result<Option<(ConnectorKind, f64)>> {
    match ctx.sequence().column(c + 1) {
        [] => Ok(None),
        [f] => match ConnectorKind::from_factor(f.kind) {
            Some(kind) => Ok(Some((kind, f.param))),
            None => Err(Error::WrongFactorKind { column: c + 1 }),
        },
        _ => Err(Error::NotSingleFactor { column: c + 1 }),
    }
}

fn connector_action(kind: ConnectorKind, param: f64, x: i64, y: i64) -> f64 {
    match kind {
        ConnectorKind::AlphaUp => (y - x) as f64 * param.ln(),
        ConnectorKind::AlphaDown => (x - y) as f64 * param.ln(),
        ConnectorKind::BetaUp | ConnectorKind::BetaDown => {
            if y == x {
                0.0
            } else {
                param.ln()
            }
        }
    }
}

/// Builds the path ensemble of a window configuration: one connector per
/// particle-strip pair where the interlacing target is visible, assembled
/// into maximal left-to-right chains.
pub fn extract_paths(ctx: &KernelContext, config: &Configuration) -> Result<PathEnsembleWindow> {
    let w = config.window;
    let mut by_source: BTreeMap<Site, Connector> = BTreeMap::new();
    let mut truncated_sources = Vec::new();
    for c in w.col_min..w.col_max {
        let sources = particle_rows(config, c);
        match strip_kind(ctx, c)? {
            None => {
                for x in sources {
                    let (s, t) = (Site::new(c, x), Site::new(c + 1, x));
                    if config.occupied(t) == Some(true) {
                        by_source.insert(
                            s,
                            Connector { kind: ConnectorKind::BetaUp, source: s, target: t, action: 0.0 },
                        );
                    } else {
                        truncated_sources.push(s);
                    }
                }
            }
            Some((kind, param)) => {
                let map = interlace_map(config, c, kind)?;
                for x in sources {
                    match map.get(&x) {
                        Some(&y) => {
                            let s = Site::new(c, x);
                            by_source.insert(
                                s,
                                Connector {
                                    kind,
                                    source: s,
                                    target: Site::new(c + 1, y),
                                    action: connector_action(kind, param, x, y),
                                },
                            );
                        }
                        None => truncated_sources.push(Site::new(c, x)),
                    }
                }
            }
        }
    }
    // Chain assembly: start at particles that are not any connector's target.
    let target_set: std::collections::BTreeSet<Site> =
        by_source.values().map(|c| c.target).collect();
    let mut chains = Vec::new();
    let mut starts: Vec<Site> = config
        .particle_sites()
        .into_iter()
        .filter(|s| !target_set.contains(s))
        .collect();
    starts.sort();
    for start in starts {
        let mut connectors = Vec::new();
        let mut cur = start;
        while let Some(conn) = by_source.get(&cur) {
            cur = conn.target;
            connectors.push(conn.clone());
        }
        let truncated = start.column != w.col_min || cur.column != w.col_max;
        chains.push(PathChain { connectors, truncated });
    }
    Ok(PathEnsembleWindow { config: config.clone(), chains, truncated_sources })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderMode {
    Paths,
    Lozenge,
}

const SVG_CELL: i64 = 24;
const LOZENGE_COLORS: [&str; 3] = ["#e8c468", "#7aa6d6", "#b8d68f"];

fn svg_x(w: &crate::correlations::Window, doubled_col: i64) -> i64 {
    (doubled_col - 2 * w.col_min) * SVG_CELL / 2
}

fn svg_y(w: &crate::correlations::Window, doubled_row: i64) -> i64 {
    (2 * w.row_max - doubled_row) * SVG_CELL / 2
}

/// Renders the ensemble as a deterministic SVG document. Lozenge mode is
/// defined only when every strip in the window is a beta strip.
pub fn render_svg(
    ctx: &KernelContext,
    ensemble: &PathEnsembleWindow,
    mode: RenderMode,
) -> Result<String> {
    let w = ensemble.config.window;
    let width = (w.col_max - w.col_min) * SVG_CELL + 2 * SVG_CELL;
    let height = (w.row_max - w.row_min) * SVG_CELL + 2 * SVG_CELL;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        -SVG_CELL, -SVG_CELL, width, height
    ));
    if mode == RenderMode::Lozenge {
        for c in w.col_min..w.col_max {
            match strip_kind(ctx, c)? {
                None => {}
                Some((k, _)) if !k.is_alpha() => {}
                Some(_) => return Err(Error::ModeUnsupported { column: c + 1 }),
            }
        }
        // Plaquettes: flat step, rising step, and empty cell.
        let mut cells: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for c in w.col_min..w.col_max {
            for r in w.row_min..w.row_max {
                cells.insert((c, r), 2);
            }
        }
        for chain in &ensemble.chains {
            for conn in &chain.connectors {
                let style = if conn.target.row == conn.source.row { 0 } else { 1 };
                let base = conn.source.row.min(conn.target.row);
                if base >= w.row_min && base < w.row_max {
                    cells.insert((conn.source.column, base), style);
                }
            }
        }
        for ((c, r), style) in &cells {
            let x0 = svg_x(&w, 2 * c);
            let y0 = svg_y(&w, 2 * (r + 1));
            out.push_str(&format!(
                "<rect x=\"{x0}\" y=\"{y0}\" width=\"{SVG_CELL}\" height=\"{SVG_CELL}\" fill=\"{}\" stroke=\"#555\"/>\n",
                LOZENGE_COLORS[*style]
            ));
        }
    }
    // Particles.
    for s in ensemble.config.particle_sites() {
        out.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"#222\"/>\n",
            svg_x(&w, 2 * s.column),
            svg_y(&w, 2 * s.row)
        ));
    }
    // Connector polylines.
    for chain in &ensemble.chains {
        for conn in &chain.connectors {
            let pts: Vec<String> = conn
                .polyline()
                .iter()
                .map(|&(dc, dr)| format!("{},{}", svg_x(&w, dc), svg_y(&w, dr)))
                .collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n",
                pts.join(" ")
            ));
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
