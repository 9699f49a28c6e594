//! Exact sampling of finite windows by the sequential chain rule.
//!
//! Sites are visited in a fixed column-major order. Conditioned on the
//! outcomes decided so far, the probability that the next site carries a
//! particle is a ratio of complemented determinants, which is exactly the
//! Schur-complement pivot of the bordered matrix. Holes flip the bordered
//! diagonal by -1, so the hole probability is one minus the particle
//! probability with no extra determinant evaluations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::correlations::{Configuration, Site, Window};
use crate::error::{Error, Result};
use crate::kernel::KernelContext;
use crate::linalg::BorderedLu;

/// Refresh/audit the factorization every this many decided sites.
pub const AUDIT_INTERVAL: usize = 64;
/// Slack allowed on conditional probabilities before declaring the
/// computation numerically indefinite.
pub const COND_PROB_SLACK: f64 = 1e-9;
/// Hard cap on the number of sites a sampled window may contain.
pub const SAMPLER_SITE_CAP: usize = 4096;

/// Sequential sampler over a fixed window. One state can draw any number of
/// configurations; the kernel matrix over the window is computed once.
pub struct SamplerState<'a> {
    ctx: &'a KernelContext,
    window: Window,
    sites: Vec<Site>,
    kmat: Vec<f64>,
    lu: BorderedLu,
    outcomes: Vec<bool>,
    /// Largest |log det| drift observed at any audit so far.
    pub max_audit_drift: f64,
}

impl<'a> SamplerState<'a> {
    pub fn new(ctx: &'a KernelContext, window: Window) -> Result<Self> {
        let n = window.site_count();
        if n > SAMPLER_SITE_CAP {
            return Err(Error::WindowTooLarge { sites: n, cap: SAMPLER_SITE_CAP });
        }
        let sites = window.sites();
        let mut kmat = vec![0.0; n * n];
        for (i, a) in sites.iter().enumerate() {
            for (j, b) in sites.iter().enumerate() {
                kmat[i * n + j] = ctx.eval_re(a.column, a.row, b.column, b.row)?;
            }
        }
        Ok(SamplerState {
            ctx,
            window,
            sites,
            kmat,
            lu: BorderedLu::new(),
            outcomes: Vec::new(),
            max_audit_drift: 0.0,
        })
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn context(&self) -> &KernelContext {
        self.ctx
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.sites.len();
        let mut v = self.kmat[i * n + j];
        if i == j && !self.outcomes[i] {
            v -= 1.0;
        }
        v
    }

    /// Conditional probability that the next undecided site carries a
    /// particle, given the outcomes decided so far.
    pub fn conditional_particle_prob(&self) -> Result<f64> {
        let n = self.sites.len();
        let m = self.outcomes.len();
        assert!(m < n, "all sites already decided");
        let col: Vec<f64> = (0..m).map(|j| self.kmat[j * n + m]).collect();
        let row: Vec<f64> = (0..m).map(|j| self.kmat[m * n + j]).collect();
        let p = self.lu.schur(&col, &row, self.kmat[m * n + m]);
        if !(-COND_PROB_SLACK..=1.0 + COND_PROB_SLACK).contains(&p) || !p.is_finite() {
            return Err(Error::NumericallyIndefinite { value: p });
        }
        Ok(p.clamp(0.0, 1.0))
    }

    fn decide(&mut self, particle: bool) {
        let n = self.sites.len();
        let m = self.outcomes.len();
        let col: Vec<f64> = (0..m).map(|j| self.kmat[j * n + m]).collect();
        let row: Vec<f64> = (0..m).map(|j| self.kmat[m * n + j]).collect();
        let diag = self.kmat[m * n + m] - if particle { 0.0 } else { 1.0 };
        self.lu.push(&col, &row, diag);
        self.outcomes.push(particle);
        if self.outcomes.len() % AUDIT_INTERVAL == 0 {
            let drift = self.audit_factorization();
            self.max_audit_drift = self.max_audit_drift.max(drift);
            let (kmat, outcomes, n) = (&self.kmat, &self.outcomes, self.sites.len());
            self.lu.refresh(|i, j| {
                kmat[i * n + j] - if i == j && !outcomes[i] { 1.0 } else { 0.0 }
            });
        }
    }

    /// Recomputes the signed log-determinant of the decided block from
    /// scratch and returns the absolute drift against the incremental
    /// factorization.
    pub fn audit_factorization(&self) -> f64 {
        let m = self.outcomes.len();
        let (log_abs, sign) = BorderedLu::audit_log_det(|i, j| self.entry(i, j), m);
        if sign != self.lu.det_sign {
            return f64::INFINITY;
        }
        (log_abs - self.lu.log_abs_det).abs()
    }

    /// Draws one configuration, consuming randomness from `rng`.
    pub fn draw(&mut self, rng: &mut impl Rng) -> Result<Configuration> {
        self.lu = BorderedLu::new();
        self.outcomes.clear();
        let n = self.sites.len();
        let mut bits = Vec::with_capacity(n);
        for _ in 0..n {
            let p = self.conditional_particle_prob()?;
            let particle = rng.gen::<f64>() < p;
            self.decide(particle);
            bits.push(particle);
        }
        Configuration::new(self.window, bits)
    }
}

/// Draws `samples` configurations with a deterministic stream seeded by
/// `seed`.
pub fn sample_window(
    ctx: &KernelContext,
    window: Window,
    samples: usize,
    seed: u64,
) -> Result<Vec<Configuration>> {
    let mut state = SamplerState::new(ctx, window)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        out.push(state.draw(&mut rng)?);
    }
    Ok(out)
}
