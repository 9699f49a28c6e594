//! The extended sine kernel: a contour integral over a circular arc joining
//! z-bar to z, with the product of column weights between the two time
//! indices in the integrand. Evaluation always happens in canonical
//! coordinates (|z| = 1, "+"-kind factors), where every pole of the
//! integrand sits off the arc; values for the original model are pulled
//! back through the canonicalization's row shifts and conjugation constants.
//!
//! The radial-rescaling prefactor r^{y-x} cancels in every correlation
//! determinant and is dropped throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::RwLock;

use crate::canonical::{canonicalize, CanonicalForm};
use crate::error::Result;
use crate::psi::{PsiSequence, SpectralParameter};
use crate::quadrature::{integrate, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourSign {
    Plus,
    Minus,
}

/// Circular arc from z-bar to z crossing the real axis at +radius (Plus)
/// or -radius (Minus).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    pub sign: ContourSign,
    pub radius: f64,
}

/// Kernel evaluation context: the model, its canonical form, the quadrature
/// parameters, and a memo of values keyed by (sigma, tau, x - y). The kernel
/// depends on the second coordinates only through their difference, so the
/// cache key is exact, not an approximation.
pub struct KernelContext {
    sequence: PsiSequence,
    z: SpectralParameter,
    canonical: CanonicalForm,
    quadrature: QuadratureSpec,
    cache: RwLock<HashMap<(i64, i64, i64), f64>>,
}

impl KernelContext {
    pub fn new(sequence: PsiSequence, z: SpectralParameter, quadrature: QuadratureSpec) -> Result<Self> {
        quadrature.validate()?;
        let canonical = canonicalize(&sequence, z)?;
        Ok(KernelContext {
            sequence,
            z,
            canonical,
            quadrature,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn sequence(&self) -> &PsiSequence {
        &self.sequence
    }

    pub fn z(&self) -> SpectralParameter {
        self.z
    }

    pub fn canonical(&self) -> &CanonicalForm {
        &self.canonical
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quadrature
    }

    pub fn contours(&self) -> (ContourSpec, ContourSpec) {
        (
            ContourSpec { sign: ContourSign::Plus, radius: 1.0 },
            ContourSpec { sign: ContourSign::Minus, radius: 1.0 },
        )
    }

    /// K(sigma, x; tau, y) of the original model (up to the dropped radial
    /// prefactor, which is a determinant-preserving gauge).
    pub fn eval(&self, sigma: i64, x: i64, tau: i64, y: i64) -> Result<Complex64> {
        let (_, xc) = self.canonical.to_canonical(sigma, x);
        let (_, yc) = self.canonical.to_canonical(tau, y);
        let c = self.canonical.conj_factor(sigma, tau);
        Ok(Complex64::new(c * self.eval_canonical(sigma, tau, xc - yc)?, 0.0))
    }

    /// Real kernel value in original coordinates; the kernel of a model with
    /// real positive parameters is real on the symmetric arcs.
    pub fn eval_re(&self, sigma: i64, x: i64, tau: i64, y: i64) -> Result<f64> {
        Ok(self.eval(sigma, x, tau, y)?.re)
    }

    /// Canonical-coordinate kernel value K_{sigma,tau}(d), memoized.
    pub fn eval_canonical(&self, sigma: i64, tau: i64, d: i64) -> Result<f64> {
        let key = (sigma, tau, d);
        if let Some(v) = self.cache.read().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = self.quadrature_value(sigma, tau, d)?;
        self.cache.write().unwrap().insert(key, v);
        Ok(v)
    }

    fn quadrature_value(&self, sigma: i64, tau: i64, d: i64) -> Result<f64> {
        let phi = self.canonical.z.argument;
        let seq = &self.canonical.canonical_sequence;
        // u = e^{i theta}: (1/2 pi i) u^{-(d+1)} g(u) du
        //               = (1/2 pi) e^{-i d theta} g(e^{i theta}) d theta.
        // Post-canonicalization no integrand pole can sit on the unit arc,
        // so the closures cannot hit one.
        let value = if sigma <= tau {
            // C+ arc through +1.
            let f = |theta: f64| -> Complex64 {
                let u = Complex64::from_polar(1.0, theta);
                let weight = seq.eval_range(sigma, tau, u).expect("pole off the unit arc");
                Complex64::from_polar(1.0, -(d as f64) * theta) / weight
            };
            integrate(&f, -phi, phi, &self.quadrature)?
        } else {
            // C- arc through -1: theta runs from -phi down to phi - 2 pi.
            let f = |theta: f64| -> Complex64 {
                let u = Complex64::from_polar(1.0, theta);
                let weight = seq.eval_range(tau, sigma, u).expect("pole off the unit arc");
                Complex64::from_polar(1.0, -(d as f64) * theta) * weight
            };
            -integrate(&f, phi - 2.0 * PI, -phi, &self.quadrature)?
        };
        Ok(value.re / (2.0 * PI))
    }

    pub fn cache_len(&self) -> usize {
        self.cache.read().unwrap().len()
    }
}

/// Equal-time restriction of the kernel: the discrete sine kernel
/// sin(phi d) / (pi d), with density phi / pi at d = 0. Stated in the same
/// gauge as [`KernelContext::eval`] (radial prefactor dropped), so it is
/// independent of |z|.
pub fn equal_time_closed_form(z: SpectralParameter, d: i64) -> Complex64 {
    let phi = z.argument;
    let v = if d == 0 {
        phi / PI
    } else {
        (phi * d as f64).sin() / (PI * d as f64)
    };
    Complex64::new(v, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::{FactorKind, PsiFactor};

    fn ctx_free() -> KernelContext {
        KernelContext::new(PsiSequence::new(), SpectralParameter::unit_i(), QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn density_is_half_at_z_eq_i() {
        let ctx = ctx_free();
        let v = ctx.eval(0, 5, 0, 5).unwrap();
        assert!((v.re - 0.5).abs() < 1e-12, "{v}");
    }

    #[test]
    fn sine_kernel_at_distance_one_and_two() {
        let ctx = ctx_free();
        let v1 = ctx.eval(3, 1, 3, 0).unwrap().re;
        assert!((v1 - 1.0 / PI).abs() < 1e-12);
        let v2 = ctx.eval(3, 2, 3, 0).unwrap().re;
        assert!(v2.abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature_across_range() {
        let z = SpectralParameter::new(1.0, PI / 3.0).unwrap();
        let ctx = KernelContext::new(PsiSequence::new(), z, QuadratureSpec::default()).unwrap();
        for d in -20..=20 {
            let q = ctx.eval(0, d, 0, 0).unwrap().re;
            let c = equal_time_closed_form(z, d).re;
            assert!((q - c).abs() < 2e-12, "d={d}: {q} vs {c}");
        }
    }

    #[test]
    fn closed_form_density_at_pi_over_three() {
        let z = SpectralParameter::new(1.0, PI / 3.0).unwrap();
        let v = equal_time_closed_form(z, 0).re;
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn closed_form_at_d_three() {
        let v = equal_time_closed_form(SpectralParameter::unit_i(), 3).re;
        assert!((v + 1.0 / (3.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn unequal_time_beta_column_value() {
        // Single BetaPlus(1/2) column between sigma = 0 and tau = 1, z = i,
        // x = y. Antiderivative of (1 + b u)^{-1} u^{-1} along the arc:
        // Log u - Log(1 + b u); evaluated in closed form this gives
        // 1/2 - arctan(1/2) / pi.
        let seq = PsiSequence::from_columns([(1, vec![PsiFactor::new(FactorKind::BetaPlus, 0.5).unwrap()])]);
        let ctx = KernelContext::new(seq, SpectralParameter::unit_i(), QuadratureSpec::default()).unwrap();
        let v = ctx.eval(0, 0, 1, 0).unwrap().re;
        let expect = 0.5 - (0.5f64).atan() / PI;
        assert!((v - expect).abs() < 1e-12, "{v} vs {expect}");
    }

    #[test]
    fn row_translation_invariance() {
        let seq = PsiSequence::from_columns([
            (0, vec![PsiFactor::new(FactorKind::AlphaPlus, 0.3).unwrap()]),
            (1, vec![PsiFactor::new(FactorKind::BetaPlus, 0.5).unwrap()]),
        ]);
        let ctx = KernelContext::new(seq, SpectralParameter::unit_i(), QuadratureSpec::default()).unwrap();
        for c in [-3i64, 2, 7] {
            let a = ctx.eval(-1, 2, 1, 0).unwrap().re;
            let b = ctx.eval(-1, 2 + c, 1, c).unwrap().re;
            assert!((a - b).abs() < 2e-12);
        }
    }

    #[test]
    fn quadrature_convergence_under_tightening() {
        let seq = PsiSequence::from_columns([(0, vec![PsiFactor::new(FactorKind::AlphaPlus, 0.6).unwrap()])]);
        let loose = QuadratureSpec { abs_tol: 1e-8, ..QuadratureSpec::default() };
        let tight = QuadratureSpec { abs_tol: 5e-9, ..QuadratureSpec::default() };
        let c1 = KernelContext::new(seq.clone(), SpectralParameter::unit_i(), loose).unwrap();
        let c2 = KernelContext::new(seq, SpectralParameter::unit_i(), tight).unwrap();
        let a = c1.eval(1, 0, -1, 0).unwrap().re;
        let b = c2.eval(1, 0, -1, 0).unwrap().re;
        assert!((a - b).abs() <= 1e-8);
    }
}
