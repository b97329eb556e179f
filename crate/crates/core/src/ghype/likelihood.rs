//! Likelihood kernels over the sampling space of a gHypEG.
//!
//! The exact likelihood is the multivariate Wallenius probability of drawing
//! the observed dyad counts `A` from an urn holding `Xi_ij` edge slots per
//! dyad with weights `Omega_ij`:
//!
//! ```text
//! P = prod C(Xi, A) * integral_0^1 prod (1 - t^(Omega/S))^A dt,   S = sum Omega (Xi - A)
//! ```
//!
//! With `t = exp(-s)` the integrand `exp(phi(s))`,
//! `phi(s) = -s + sum A ln(1 - exp(-r s))`, `r = Omega / S`, is log-concave,
//! so it is integrated around its mode with Gauss–Kronrod. The gradient in
//! the coefficients is integrated in the same pass.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// Dyads with `Xi > 0`, their counts and (log-scale) covariates.
#[derive(Debug, Clone)]
pub struct DyadData {
    pub xi: Vec<f64>,
    pub counts: Vec<u64>,
    /// `covariates[k][d]` for covariate `k`, dyad `d`.
    pub covariates: Vec<Vec<f64>>,
    /// Edges observed on dyads outside the sampling space (`Xi = 0`).
    pub stranded_edges: u64,
}

impl DyadData {
    pub fn dim(&self) -> usize {
        self.covariates.len()
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn edges(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Linear predictor `sum_k theta_k x_k` per dyad.
    pub fn eta(&self, theta: &[f64]) -> Vec<f64> {
        let mut eta = vec![0.0; self.len()];
        for (x, &t) in self.covariates.iter().zip(theta) {
            if t != 0.0 {
                for (e, v) in eta.iter_mut().zip(x) {
                    *e += t * v;
                }
            }
        }
        eta
    }

    /// `sum log C(ceil(Xi), A)`; independent of the coefficients.
    pub fn log_binomials(&self) -> f64 {
        self.xi
            .iter()
            .zip(&self.counts)
            .filter(|(_, &a)| a > 0)
            .map(|(&xi, &a)| {
                let n = xi.ceil();
                let a = a as f64;
                ln_gamma(n + 1.0) - ln_gamma(a + 1.0) - ln_gamma(n - a + 1.0)
            })
            .sum()
    }
}

/// `ln(1 - exp(-x))` for `x > 0`.
#[inline]
fn ln_one_minus_exp_neg(x: f64) -> f64 {
    if x > std::f64::consts::LN_2 {
        (-(-x).exp()).ln_1p()
    } else {
        (-(-x).exp_m1()).ln()
    }
}

struct Kernel {
    counts: Vec<f64>,
    rates: Vec<f64>,
    /// centred covariates `x_ik - cbar_k` for the active dyads
    centred: Vec<Vec<f64>>,
}

impl Kernel {
    fn phi(&self, s: f64) -> f64 {
        let mut v = -s;
        for (&a, &r) in self.counts.iter().zip(&self.rates) {
            v += a * ln_one_minus_exp_neg(r * s);
        }
        v
    }

    /// (phi', phi'')
    fn derivs(&self, s: f64) -> (f64, f64) {
        let (mut d1, mut d2) = (-1.0, 0.0);
        for (&a, &r) in self.counts.iter().zip(&self.rates) {
            let rs = r * s;
            let em1 = rs.exp_m1();
            d1 += a * r / em1;
            // e^{rs} / (e^{rs} - 1)^2 = 1/em1 + 1/em1^2
            d2 -= a * r * r * (1.0 / em1 + 1.0 / (em1 * em1));
        }
        (d1, d2)
    }

    fn mode(&self) -> Result<f64> {
        let total: f64 = self.counts.iter().sum();
        let mut lo = f64::NAN;
        let mut hi = f64::NAN;
        let mut s = total.max(1.0);
        for _ in 0..2000 {
            let (d1, _) = self.derivs(s);
            if d1 > 0.0 {
                lo = s;
                if hi.is_finite() {
                    break;
                }
                s *= 2.0;
            } else {
                hi = s;
                if lo.is_finite() {
                    break;
                }
                s *= 0.5;
            }
        }
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::Quadrature("could not bracket the integrand mode".into()));
        }
        let mut s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (d1, d2) = self.derivs(s);
            if d1 > 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let mut next = s - d1 / d2;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 1e-14 * s.max(1e-300) || hi - lo <= 1e-14 * hi {
                return Ok(next);
            }
            s = next;
        }
        Ok(s)
    }
}

/// Exact log-likelihood (up to the binomial constant, see
/// [`DyadData::log_binomials`]) of the integral term and its gradient.
pub fn exact_log_integral(data: &DyadData, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
    let p = data.dim();
    if data.stranded_edges > 0 {
        return Err(Error::Model(format!(
            "{} edges lie on dyads with Xi = 0",
            data.stranded_edges
        )));
    }
    let eta = data.eta(theta);
    if eta.iter().any(|e| !e.is_finite()) {
        return Err(Error::Model("nonfinite linear predictor".into()));
    }
    let shift = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let omega: Vec<f64> = eta.iter().map(|e| (e - shift).exp()).collect();

    let mut s_omega = 0.0;
    let mut weighted_x = vec![0.0; p];
    for (d, (&xi, &a)) in data.xi.iter().zip(&data.counts).enumerate() {
        let free = xi - a as f64;
        if free < -1e-9 * xi.max(1.0) {
            return Err(Error::Model(format!(
                "dyad {d} has {a} edges but only {xi} possible combinations"
            )));
        }
        let w = omega[d] * free.max(0.0);
        s_omega += w;
        for k in 0..p {
            weighted_x[k] += w * data.covariates[k][d];
        }
    }

    let active: Vec<usize> = (0..data.len()).filter(|&d| data.counts[d] > 0).collect();
    if active.is_empty() {
        // no draws: the integral is exactly one
        return Ok((0.0, vec![0.0; p]));
    }
    if s_omega <= 0.0 {
        let saturated = data
            .xi
            .iter()
            .zip(&data.counts)
            .all(|(&xi, &a)| (xi - a as f64).abs() <= 1e-9 * xi.max(1.0));
        if saturated {
            return Ok((0.0, vec![0.0; p]));
        }
        return Err(Error::Degenerate("S_Omega vanishes with unsaturated dyads".into()));
    }
    let cbar: Vec<f64> = weighted_x.iter().map(|w| w / s_omega).collect();

    let kernel = Kernel {
        counts: active.iter().map(|&d| data.counts[d] as f64).collect(),
        rates: active.iter().map(|&d| omega[d] / s_omega).collect(),
        centred: (0..p)
            .map(|k| active.iter().map(|&d| data.covariates[k][d] - cbar[k]).collect())
            .collect(),
    };
    if kernel.rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(Error::Degenerate("edge propensity underflow".into()));
    }

    let mode = kernel.mode()?;
    let peak = kernel.phi(mode);
    let (_, curv) = kernel.derivs(mode);
    let sigma = if curv < 0.0 { (-1.0 / curv).sqrt() } else { mode.max(1.0) };
    const DROP: f64 = 60.0;
    let mut left = sigma;
    while mode - left > 0.0 && kernel.phi(mode - left) > peak - DROP {
        left *= 1.5;
    }
    let mut right = sigma;
    while kernel.phi(mode + right) > peak - DROP {
        right *= 1.5;
        if right > 1e300 {
            return Err(Error::Quadrature("integrand tail does not decay".into()));
        }
    }
    let lo = (mode - left).max(0.0);
    let hi = mode + right;

    let mut scratch = vec![0.0; p];
    let quad = integrate(
        |s, out: &mut [f64]| {
            let mut phi = -s;
            scratch.iter_mut().for_each(|v| *v = 0.0);
            for (idx, (&a, &r)) in kernel.counts.iter().zip(&kernel.rates).enumerate() {
                let rs = r * s;
                phi += a * ln_one_minus_exp_neg(rs);
                if p > 0 {
                    let dlog = if rs > 0.0 { a * rs / rs.exp_m1() } else { a };
                    for k in 0..p {
                        scratch[k] += dlog * kernel.centred[k][idx];
                    }
                }
            }
            let e = if s > 0.0 { (phi - peak).exp() } else { 0.0 };
            out[0] = e;
            for k in 0..p {
                out[1 + k] = e * scratch[k];
            }
        },
        1 + p,
        lo,
        hi,
        QuadOptions::default(),
    )?;
    let base = quad.values[0];
    if !(base > 0.0) {
        return Err(Error::Quadrature(format!("integral evaluated to {base}")));
    }
    let grad = quad.values[1..].iter().map(|v| v / base).collect();
    Ok((peak + base.ln(), grad))
}

/// Multinomial log-likelihood with cell probabilities proportional to
/// `Xi * Omega`, including the multinomial coefficient, and its gradient.
/// Edges on dyads outside the sampling space give `-inf`.
pub fn multinomial(data: &DyadData, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
    let p = data.dim();
    if data.stranded_edges > 0 {
        return Ok((f64::NEG_INFINITY, vec![f64::NAN; p]));
    }
    let eta = data.eta(theta);
    let logits: Vec<f64> = eta.iter().zip(&data.xi).map(|(e, xi)| e + xi.ln()).collect();
    if logits.iter().any(|l| l.is_nan() || *l == f64::INFINITY) {
        return Err(Error::Model("nonfinite linear predictor".into()));
    }
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|l| (l - max).exp()).sum();
    let lse = max + sum.ln();

    let m = data.edges() as f64;
    let mut ll = ln_gamma(m + 1.0);
    let mut grad = vec![0.0; p];
    for (d, &a) in data.counts.iter().enumerate() {
        let prob = (logits[d] - lse).exp();
        let a = a as f64;
        if a > 0.0 {
            ll += a * (logits[d] - lse) - ln_gamma(a + 1.0);
        }
        for k in 0..p {
            grad[k] += (a - m * prob) * data.covariates[k][d];
        }
    }
    Ok((ll, grad))
}
