//! Adaptive Gauss–Legendre quadrature for complex-valued integrands on real
//! intervals (the kernel's circular arcs are parameterized by angle).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// Controls the adaptive bisection.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct QuadratureSpec {
    pub max_panels: usize,
    pub abs_tol: f64,
    pub nodes_per_panel: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            max_panels: 4096,
            abs_tol: 1e-12,
            nodes_per_panel: 16,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.max_panels < 1 || self.nodes_per_panel < 2 || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidModel(format!(
                "quadrature spec out of range: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], computed once per order by
/// Newton iteration on the Legendre recurrence.
fn gauss_rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static RULES: OnceLock<Mutex<std::collections::HashMap<usize, &'static (Vec<f64>, Vec<f64>)>>> =
        OnceLock::new();
    let rules = RULES.get_or_init(|| Mutex::new(std::collections::HashMap::new()));
    let mut map = rules.lock().unwrap();
    map.entry(n).or_insert_with(|| {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            // Chebyshev-based initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // Legendre P_n(x) and derivative via three-term recurrence.
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let jf = j as f64;
                    let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Box::leak(Box::new((nodes, weights)))
    })
}

fn fixed_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, n: usize) -> Complex64 {
    let (nodes, weights) = gauss_rule(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in nodes.iter().zip(weights) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

/// Integrates `f` over `[a, b]` by adaptive panel bisection: a panel is
/// accepted when the fixed rule on the whole panel agrees with the sum over
/// its two halves within the panel's share of `abs_tol`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Complex64> {
    let mut panels_used = 1usize;
    let whole = fixed_panel(f, a, b, spec.nodes_per_panel);
    let mut worst = f64::INFINITY;
    let v = refine(f, a, b, whole, spec.abs_tol, spec, &mut panels_used, &mut worst)?;
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    spec: &QuadratureSpec,
    panels_used: &mut usize,
    worst: &mut f64,
) -> Result<Complex64> {
    let mid = 0.5 * (a + b);
    let left = fixed_panel(f, a, mid, spec.nodes_per_panel);
    let right = fixed_panel(f, mid, b, spec.nodes_per_panel);
    *panels_used += 2;
    let err = (left + right - whole).norm();
    if err <= tol {
        return Ok(left + right);
    }
    if *panels_used >= spec.max_panels {
        return Err(Error::QuadratureDiverged {
            panels: *panels_used,
            tol: spec.abs_tol,
            residual: err.min(*worst),
        });
    }
    *worst = worst.min(err);
    let lv = refine(f, a, mid, left, 0.5 * tol, spec, panels_used, worst)?;
    let rv = refine(f, mid, b, right, 0.5 * tol, spec, panels_used, worst)?;
    Ok(lv + rv)
}
