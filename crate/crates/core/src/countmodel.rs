//! Dyad-independent count ERGM with a Poisson reference measure.
//!
//! With only dyad-separable terms (`sum`, `nonzero`, fixed covariates) the
//! count ERGM factorizes over dyads and each dyad follows a zero-modified
//! Poisson law:
//!
//! ```text
//! P(A = a) = lambda^a / a! * exp(theta_nz * 1[a > 0]) / Z
//! Z = 1 + exp(theta_nz) * (exp(lambda) - 1)
//! lambda = exp(theta_sum + sum_r theta_r h_r)
//! ```
//!
//! so the normalizer is available in closed form and no simulation is needed.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::mle::{self, Coefficient, FitResult, Objective, OptimOptions};
use crate::multigraph::MultiEdgeNetwork;
use crate::statistics::StatisticMatrix;

/// `ln(exp(x) - 1)` for `x > 0`.
fn ln_expm1(x: f64) -> f64 {
    if x > 30.0 {
        x + (-(-x).exp()).ln_1p()
    } else {
        x.exp_m1().ln()
    }
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `log Z` and `P(A > 0)`.
fn log_normalizer(lambda: f64, theta_nonzero: f64) -> (f64, f64) {
    let log_pos = theta_nonzero + ln_expm1(lambda);
    let log_z = ln_add_exp(0.0, log_pos);
    (log_z, (log_pos - log_z).exp())
}

/// Log-probability of count `a` for a dyad with rate `lambda`.
pub fn dyad_log_pmf(a: u64, lambda: f64, theta_nonzero: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Model(format!("rate must be positive and finite, got {lambda}")));
    }
    let (log_z, _) = log_normalizer(lambda, theta_nonzero);
    let af = a as f64;
    let nz = if a > 0 { theta_nonzero } else { 0.0 };
    Ok(af * lambda.ln() - ln_gamma(af + 1.0) + nz - log_z)
}

/// Parameter layout: `[sum, (nonzero), covariates...]`.
pub struct CountObjective {
    counts: Vec<u64>,
    covariates: Vec<Vec<f64>>,
    include_nonzero: bool,
    /// nonzero term at its +inf limit (every dyad nonzero): zero-truncated Poisson
    truncated: bool,
}

impl CountObjective {
    pub fn new(counts: Vec<u64>, covariates: Vec<Vec<f64>>, include_nonzero: bool) -> Self {
        CountObjective { counts, covariates, include_nonzero, truncated: false }
    }

    fn offset(&self) -> usize {
        1 + usize::from(self.include_nonzero)
    }
}

impl Objective for CountObjective {
    fn dim(&self) -> usize {
        self.offset() + self.covariates.len()
    }

    fn value_grad(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        let off = self.offset();
        let theta_nz = if self.include_nonzero { theta[1] } else { 0.0 };
        let mut ll = 0.0;
        let mut grad = vec![0.0; self.dim()];
        for (d, &a) in self.counts.iter().enumerate() {
            let mut eta = theta[0];
            for (k, x) in self.covariates.iter().enumerate() {
                eta += theta[off + k] * x[d];
            }
            let lambda = eta.exp();
            if !(lambda.is_finite() && lambda > 0.0) {
                return Err(Error::Model(format!("rate overflow (eta = {eta})")));
            }
            let af = a as f64;
            // d log Z / d eta = lambda * exp(theta_nz + lambda) / Z
            let (log_z, p_pos, dlogz_deta) = if self.truncated {
                let lz = ln_expm1(lambda);
                (lz, 1.0, lambda / (-(-lambda).exp_m1()))
            } else {
                let (lz, pp) = log_normalizer(lambda, theta_nz);
                (lz, pp, lambda * (theta_nz + lambda - lz).exp())
            };
            let nz = if a > 0 && !self.truncated { theta_nz } else { 0.0 };
            ll += af * eta - ln_gamma(af + 1.0) + nz - log_z;
            let d_eta = af - dlogz_deta;
            grad[0] += d_eta;
            if self.include_nonzero {
                grad[1] += f64::from(u8::from(a > 0)) - p_pos;
            }
            for (k, x) in self.covariates.iter().enumerate() {
                grad[off + k] += d_eta * x[d];
            }
        }
        Ok((ll, grad))
    }
}

/// Fits the count model; covariates enter the rate on their raw scale.
pub fn fit(
    net: &MultiEdgeNetwork,
    covariates: &[(String, StatisticMatrix)],
    include_nonzero: bool,
    optim: OptimOptions,
) -> Result<FitResult> {
    let counts = net.dyad_counts();
    if counts.is_empty() {
        return Err(Error::Model("count model needs at least one dyad".into()));
    }
    let mut xs = Vec::with_capacity(covariates.len());
    for (name, stat) in covariates {
        if stat.n() != net.n() {
            return Err(Error::Input(format!("covariate `{name}` has the wrong size")));
        }
        if stat.is_constant() {
            return Err(Error::ConstantCovariate(name.clone()));
        }
        xs.push(stat.dyad_values());
    }
    let nonzero_dyads = counts.iter().filter(|&&a| a > 0).count();
    let mut names = vec!["sum".to_string()];
    if include_nonzero {
        names.push("nonzero".into());
    }
    names.extend(covariates.iter().map(|(n, _)| n.clone()));

    if nonzero_dyads == 0 {
        return Err(Error::Model("all dyads are empty; the rate is unidentified".into()));
    }
    // every dyad nonzero: the nonzero coefficient diverges to +inf
    let separated = include_nonzero && nonzero_dyads == counts.len();

    let objective = CountObjective::new(counts, xs, include_nonzero);
    let null_theta = vec![0.0; objective.dim()];
    let (null_ll, _) = objective.value_grad(&null_theta)?;

    let (theta, ll, iterations, reason, se) = if separated {
        let reduced = CountObjective {
            include_nonzero: false,
            truncated: true,
            counts: objective.counts.clone(),
            covariates: objective.covariates.clone(),
        };
        let out = mle::maximize(&reduced, &vec![0.0; reduced.dim()], optim)?;
        let h = mle::numerical_hessian(&reduced, &out.theta)?;
        let se_red = mle::standard_errors(&h);
        let mut theta = out.theta.clone();
        theta.insert(1, f64::INFINITY);
        let se = se_red.map(|mut s| {
            s.insert(1, f64::NAN);
            s
        });
        (theta, out.value, out.iterations, out.reason, se)
    } else {
        let out = mle::maximize(&objective, &null_theta, optim)?;
        let h = mle::numerical_hessian(&objective, &out.theta)?;
        (out.theta.clone(), out.value, out.iterations, out.reason, mle::standard_errors(&h))
    };

    let coefficients: Vec<Coefficient> = names
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let s = se.as_ref().map(|s| s[k]).filter(|v| v.is_finite());
            Coefficient::new(name, theta[k], s)
        })
        .collect();
    let p = if separated { names.len() - 1 } else { names.len() };
    Ok(FitResult {
        model: "count-poisson".into(),
        likelihood_mode: if include_nonzero { "poisson-nonzero" } else { "poisson" }.into(),
        xi: None,
        dataset: None,
        coefficients,
        log_lik: ll,
        null_log_lik: null_ll,
        aic: 2.0 * p as f64 - 2.0 * ll,
        null_aic: -2.0 * null_ll,
        iterations,
        converged: true,
        convergence: reason.into(),
        nodes: net.n(),
        dyads: objective.counts.len(),
        edges: net.edge_count(),
    })
}
