//! Joint particle/hole event probabilities as signed determinants of the
//! complemented kernel matrix: diagonal entries are K(t, t) at particles and
//! K(t, t) - 1 at holes, off-diagonal entries are plain kernel values, and
//! the determinant carries the sign (-1)^{#holes}.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::KernelContext;
use crate::linalg::lu_det;

/// Probability clamp: values this far outside [0, 1] are treated as
/// quadrature noise; further out is a hard error.
pub const PROB_CLAMP: f64 = 1e-8;

/// A lattice site (column, row).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Site {
    pub column: i64,
    pub row: i64,
}

impl Site {
    pub fn new(column: i64, row: i64) -> Self {
        Site { column, row }
    }
}

/// A joint event: the listed particle sites are occupied and the listed
/// hole sites are empty.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventSpec {
    pub particles: Vec<Site>,
    pub holes: Vec<Site>,
}

impl EventSpec {
    pub fn new(particles: Vec<Site>, holes: Vec<Site>) -> Result<Self> {
        let ev = EventSpec { particles, holes };
        ev.validate()?;
        Ok(ev)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for s in self.particles.iter().chain(&self.holes) {
            if !seen.insert(*s) {
                return Err(Error::InvalidEvent { site: *s });
            }
        }
        Ok(())
    }

    /// All sites in the fixed (column, row) lexicographic matrix order,
    /// tagged with occupation.
    pub fn ordered_sites(&self) -> Vec<(Site, bool)> {
        let mut sites: Vec<(Site, bool)> = self
            .particles
            .iter()
            .map(|s| (*s, true))
            .chain(self.holes.iter().map(|s| (*s, false)))
            .collect();
        sites.sort_by_key(|(s, _)| *s);
        sites
    }
}

/// A rectangular window of sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Window {
    pub col_min: i64,
    pub col_max: i64,
    pub row_min: i64,
    pub row_max: i64,
}

impl Window {
    pub fn new(col_min: i64, col_max: i64, row_min: i64, row_max: i64) -> Result<Self> {
        if col_min > col_max || row_min > row_max {
            return Err(Error::InvalidModel(format!(
                "empty window: cols {col_min}:{col_max}, rows {row_min}:{row_max}"
            )));
        }
        Ok(Window { col_min, col_max, row_min, row_max })
    }

    pub fn site_count(&self) -> usize {
        ((self.col_max - self.col_min + 1) * (self.row_max - self.row_min + 1)) as usize
    }

    /// Sites in (column, row) lexicographic order.
    pub fn sites(&self) -> Vec<Site> {
        let mut v = Vec::with_capacity(self.site_count());
        for c in self.col_min..=self.col_max {
            for r in self.row_min..=self.row_max {
                v.push(Site::new(c, r));
            }
        }
        v
    }

    pub fn contains(&self, s: Site) -> bool {
        s.column >= self.col_min && s.column <= self.col_max && s.row >= self.row_min && s.row <= self.row_max
    }
}

/// A total 0/1 assignment on a window.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Configuration {
    pub window: Window,
    /// Occupation bits in the window's (column, row) lexicographic order.
    pub bits: Vec<bool>,
}

impl Configuration {
    pub fn new(window: Window, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != window.site_count() {
            return Err(Error::InvalidModel(format!(
                "configuration has {} bits for a {}-site window",
                bits.len(),
                window.site_count()
            )));
        }
        Ok(Configuration { window, bits })
    }

    pub fn occupied(&self, s: Site) -> Option<bool> {
        if !self.window.contains(s) {
            return None;
        }
        let rows = self.window.row_max - self.window.row_min + 1;
        let idx = (s.column - self.window.col_min) * rows + (s.row - self.window.row_min);
        Some(self.bits[idx as usize])
    }

    /// Sites carrying particles, in (column, row) lexicographic order.
    pub fn particle_sites(&self) -> Vec<Site> {
        self.window
            .sites()
            .into_iter()
            .zip(&self.bits)
            .filter_map(|(site, bit)| bit.then_some(site))
            .collect()
    }

    pub fn to_event(&self) -> EventSpec {
        let mut particles = Vec::new();
        let mut holes = Vec::new();
        for (site, bit) in self.window.sites().into_iter().zip(&self.bits) {
            if *bit {
                particles.push(site);
            } else {
                holes.push(site);
            }
        }
        EventSpec { particles, holes }
    }

    pub fn bitstring(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }
}

/// The complemented matrix over the event's sites (in lexicographic order)
/// together with the sign (-1)^{#holes}.
pub fn build_event_matrix(ctx: &KernelContext, ev: &EventSpec) -> Result<(Vec<f64>, usize, f64)> {
    ev.validate()?;
    let sites = ev.ordered_sites();
    let n = sites.len();
    let mut m = vec![0.0; n * n];
    for (i, (ti, occ_i)) in sites.iter().enumerate() {
        for (j, (tj, _)) in sites.iter().enumerate() {
            let mut v = ctx.eval_re(ti.column, ti.row, tj.column, tj.row)?;
            if i == j && !*occ_i {
                v -= 1.0;
            }
            m[i * n + j] = v;
        }
    }
    let sign = if ev.holes.len() % 2 == 0 { 1.0 } else { -1.0 };
    Ok((m, n, sign))
}

/// Pr of the joint event as sign * det of the complemented matrix, clamped
/// to [0, 1] within [`PROB_CLAMP`].
pub fn event_probability(ctx: &KernelContext, ev: &EventSpec) -> Result<f64> {
    let (m, n, sign) = build_event_matrix(ctx, ev)?;
    let mut growth_warn = false;
    let p = sign * lu_det(&m, n, &mut growth_warn);
    if growth_warn {
        eprintln!("warning: LU growth factor above 1e8 in event determinant");
    }
    if p < -PROB_CLAMP || p > 1.0 + PROB_CLAMP {
        return Err(Error::NumericallyIndefinite { value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

pub const WINDOW_SITE_CAP: usize = 20;

/// Exhaustive distribution over all 2^n assignments of a window, plus the
/// total mass (which existence of the process forces to 1).
pub fn window_distribution(ctx: &KernelContext, window: Window) -> Result<(BTreeMap<Configuration, f64>, f64)> {
    let n = window.site_count();
    if n > WINDOW_SITE_CAP {
        return Err(Error::WindowTooLarge { sites: n, cap: WINDOW_SITE_CAP });
    }
    let sites = window.sites();
    let mut out = BTreeMap::new();
    let mut total = 0.0;
    for mask in 0u64..(1u64 << n) {
        let bits: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let config = Configuration::new(window, bits.clone())?;
        let ev = EventSpec {
            particles: sites.iter().zip(&bits).filter(|(_, b)| **b).map(|(s, _)| *s).collect(),
            holes: sites.iter().zip(&bits).filter(|(_, b)| !**b).map(|(s, _)| *s).collect(),
        };
        let p = event_probability(ctx, &ev)?;
        total += p;
        out.insert(config, p);
    }
    Ok((out, total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::{FactorKind, PsiFactor, PsiSequence, SpectralParameter};
    use crate::quadrature::QuadratureSpec;
    use std::f64::consts::PI;

    fn free_ctx() -> KernelContext {
        KernelContext::new(PsiSequence::new(), SpectralParameter::unit_i(), QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn single_particle_density() {
        let ctx = free_ctx();
        let ev = EventSpec::new(vec![Site::new(0, 5)], vec![]).unwrap();
        let (m, n, sign) = build_event_matrix(&ctx, &ev).unwrap();
        assert_eq!(n, 1);
        assert_eq!(sign, 1.0);
        assert!((m[0] - 0.5).abs() < 1e-12);
        assert!((event_probability(&ctx, &ev).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_hole_complement() {
        let ctx = free_ctx();
        let ev = EventSpec::new(vec![], vec![Site::new(0, 5)]).unwrap();
        let (m, _, sign) = build_event_matrix(&ctx, &ev).unwrap();
        assert_eq!(sign, -1.0);
        assert!((m[0] + 0.5).abs() < 1e-12);
        assert!((event_probability(&ctx, &ev).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_event_has_probability_one() {
        let ctx = free_ctx();
        let p = event_probability(&ctx, &EventSpec::default()).unwrap();
        assert_eq!(p, 1.0);
    }

    #[test]
    fn adjacent_particles_sine_pattern() {
        let ctx = free_ctx();
        let ev = EventSpec::new(vec![Site::new(0, 0), Site::new(0, 1)], vec![]).unwrap();
        let (m, n, _) = build_event_matrix(&ctx, &ev).unwrap();
        assert_eq!(n, 2);
        assert!((m[0] - 0.5).abs() < 1e-12);
        assert!((m[3] - 0.5).abs() < 1e-12);
        // sin(phi d) / (pi d) is even in d: both off-diagonals are +1/pi.
        assert!((m[1] - 1.0 / PI).abs() < 1e-12);
        assert!((m[2] - 1.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn particles_two_apart_are_independent_at_half_density() {
        let ctx = free_ctx();
        let ev = EventSpec::new(vec![Site::new(0, 0), Site::new(0, 2)], vec![]).unwrap();
        let p = event_probability(&ctx, &ev).unwrap();
        assert!((p - 0.25).abs() < 1e-12);
    }

    #[test]
    fn duplicate_site_rejected() {
        let r = EventSpec::new(vec![Site::new(0, 0)], vec![Site::new(0, 0)]);
        assert!(matches!(r, Err(Error::InvalidEvent { .. })));
    }

    #[test]
    fn one_by_one_window_sums_to_one() {
        let ctx = free_ctx();
        let (dist, total) = window_distribution(&ctx, Window::new(0, 0, 0, 0).unwrap()).unwrap();
        assert_eq!(dist.len(), 2);
        assert!((total - 1.0).abs() < 1e-10);
        for p in dist.values() {
            assert!((p - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn two_by_two_window_with_beta_column_normalizes() {
        let seq = PsiSequence::from_columns([(1, vec![PsiFactor::new(FactorKind::BetaPlus, 0.5).unwrap()])]);
        let ctx = KernelContext::new(seq, SpectralParameter::unit_i(), QuadratureSpec::default()).unwrap();
        let (dist, total) = window_distribution(&ctx, Window::new(0, 1, 0, 1).unwrap()).unwrap();
        assert_eq!(dist.len(), 16);
        assert!((total - 1.0).abs() < 1e-8, "total {total}");
        for p in dist.values() {
            assert!(*p >= 0.0);
        }
    }

    #[test]
    fn marginalization_consistency() {
        let ctx = free_ctx();
        let w2 = Window::new(0, 0, 0, 1).unwrap();
        let (dist2, _) = window_distribution(&ctx, w2).unwrap();
        let w1 = Window::new(0, 0, 0, 0).unwrap();
        let (dist1, _) = window_distribution(&ctx, w1).unwrap();
        for (cfg1, p1) in &dist1 {
            let summed: f64 = dist2
                .iter()
                .filter(|(cfg2, _)| cfg2.occupied(Site::new(0, 0)) == cfg1.occupied(Site::new(0, 0)))
                .map(|(_, p)| p)
                .sum();
            assert!((summed - p1).abs() < 1e-9);
        }
    }

    #[test]
    fn window_cap_enforced() {
        let ctx = free_ctx();
        let w = Window::new(0, 4, 0, 4).unwrap(); // 25 sites
        assert!(matches!(window_distribution(&ctx, w), Err(Error::WindowTooLarge { .. })));
    }
}
