//! Maximum-likelihood machinery shared by the gHypEG and count models:
//! a BFGS ascent, observed information by differencing the analytic
//! gradient, Wald tests and the serialized fit summary.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// A log-likelihood with analytic gradient.
pub trait Objective {
    fn dim(&self) -> usize;
    fn value_grad(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)>;
}

#[derive(Debug, Clone, Copy)]
pub struct OptimOptions {
    /// Stop when the gradient max-norm drops below this.
    pub grad_tol: f64,
    /// Stop when a full-length step changes the objective by less than this (relative).
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for OptimOptions {
    fn default() -> Self {
        OptimOptions {
            grad_tol: 1e-6,
            rel_tol: 1e-10,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimOutcome {
    pub theta: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub iterations: usize,
    pub reason: &'static str,
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Maximizes `obj` by BFGS with Armijo backtracking, starting at `start`.
pub fn maximize<O: Objective + ?Sized>(obj: &O, start: &[f64], opts: OptimOptions) -> Result<OptimOutcome> {
    let p = obj.dim();
    let mut theta = start.to_vec();
    let (mut f, mut g) = obj.value_grad(&theta)?;
    if !f.is_finite() {
        return Err(Error::Model(format!("log-likelihood is not finite at the start ({f})")));
    }
    // inverse Hessian approximation of -f
    let mut hinv = DMatrix::<f64>::identity(p, p);
    let mut scaled = false;

    for iter in 0..opts.max_iter {
        if max_norm(&g) < opts.grad_tol {
            return Ok(OptimOutcome { theta, value: f, gradient: g, iterations: iter, reason: "gradient" });
        }
        let gv = DVector::from_column_slice(&g);
        let mut dir = &hinv * &gv;
        let mut slope = dir.dot(&gv);
        if slope <= 0.0 || !slope.is_finite() {
            hinv = DMatrix::identity(p, p);
            scaled = false;
            dir = gv.clone();
            slope = dir.dot(&gv);
        }
        let mut step = if scaled { 1.0 } else { (1.0 / max_norm(&g)).min(1.0) };

        let mut accepted = None;
        for _ in 0..80 {
            let trial: Vec<f64> = theta.iter().zip(dir.iter()).map(|(t, d)| t + step * d).collect();
            match obj.value_grad(&trial) {
                Ok((ft, gt)) if ft.is_finite() && ft >= f + 1e-4 * step * slope => {
                    accepted = Some((trial, ft, gt));
                    break;
                }
                Ok(_) | Err(Error::Quadrature(_)) | Err(Error::Degenerate(_)) => step *= 0.5,
                Err(e) => return Err(e),
            }
        }
        let Some((trial, ft, gt)) = accepted else {
            // no ascent left at the numerical noise floor of the objective
            if max_norm(&g) < 1e-3 {
                return Ok(OptimOutcome { theta, value: f, gradient: g, iterations: iter, reason: "line-search-floor" });
            }
            return Err(Error::NonConvergence {
                iterations: iter,
                trace: format!("line search failed at theta={theta:?}, gradient={g:?}, loglik={f}"),
            });
        };

        let s = DVector::from_iterator(p, trial.iter().zip(&theta).map(|(a, b)| a - b));
        // y for the minimization of -f
        let y = DVector::from_iterator(p, g.iter().zip(&gt).map(|(a, b)| a - b));
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if !scaled {
                hinv = DMatrix::identity(p, p) * (sy / y.dot(&y));
                scaled = true;
            }
            let rho = 1.0 / sy;
            let i = DMatrix::<f64>::identity(p, p);
            let left = &i - rho * &s * y.transpose();
            let right = &i - rho * &y * s.transpose();
            hinv = &left * &hinv * &right + rho * &s * s.transpose();
        }

        let change = (ft - f).abs();
        let full_step = step >= 0.5;
        theta = trial;
        f = ft;
        g = gt;
        if max_norm(&g) < opts.grad_tol {
            return Ok(OptimOutcome { theta, value: f, gradient: g, iterations: iter + 1, reason: "gradient" });
        }
        // short steps that gain nothing mean the objective's rounding floor is reached
        if (full_step || max_norm(&g) < 1e-3) && change <= opts.rel_tol * f.abs().max(1.0) {
            return Ok(OptimOutcome { theta, value: f, gradient: g, iterations: iter + 1, reason: "relative-change" });
        }
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        trace: format!("theta={theta:?}, gradient={g:?}, loglik={f}"),
    })
}

/// Hessian of `obj` at `theta` by central differences of its gradient with
/// step `1e-4 * (1 + |theta_k|)`, symmetrized.
pub fn numerical_hessian<O: Objective + ?Sized>(obj: &O, theta: &[f64]) -> Result<DMatrix<f64>> {
    let p = theta.len();
    let mut h = DMatrix::zeros(p, p);
    for k in 0..p {
        let step = 1e-4 * (1.0 + theta[k].abs());
        let mut up = theta.to_vec();
        let mut dn = theta.to_vec();
        up[k] += step;
        dn[k] -= step;
        let (_, gu) = obj.value_grad(&up)?;
        let (_, gd) = obj.value_grad(&dn)?;
        for j in 0..p {
            h[(j, k)] = (gu[j] - gd[j]) / (2.0 * step);
        }
    }
    Ok((&h + h.transpose()) * 0.5)
}

/// Standard errors from the inverse observed information `-H`.
/// `None` when the information is not positive definite.
pub fn standard_errors(hessian: &DMatrix<f64>) -> Option<Vec<f64>> {
    let info = -hessian.clone();
    let chol = info.cholesky()?;
    let cov = chol.inverse();
    let se: Vec<f64> = (0..cov.nrows()).map(|k| cov[(k, k)].sqrt()).collect();
    se.iter().all(|s| s.is_finite() && *s > 0.0).then_some(se)
}

/// Two-sided normal p-value of `z`.
pub fn two_sided_p(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2)
}

pub fn stars(p: f64) -> &'static str {
    if !p.is_finite() {
        ""
    } else if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else if p < 0.1 {
        "."
    } else {
        ""
    }
}

/// NaN is written as JSON `null`; read it back the same way.
pub(crate) fn null_as_nan<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    /// non-finite for an unidentified term; JSON `null` then
    #[serde(deserialize_with = "null_as_nan")]
    pub estimate: f64,
    #[serde(deserialize_with = "null_as_nan")]
    pub std_err: f64,
    #[serde(deserialize_with = "null_as_nan")]
    pub p_value: f64,
    pub stars: String,
    pub identified: bool,
}

impl Coefficient {
    pub fn new(name: &str, estimate: f64, std_err: Option<f64>) -> Self {
        match std_err {
            Some(se) => {
                let p = two_sided_p(estimate / se);
                Coefficient {
                    name: name.to_string(),
                    estimate,
                    std_err: se,
                    p_value: p,
                    stars: stars(p).to_string(),
                    identified: true,
                }
            }
            None => Coefficient {
                name: name.to_string(),
                estimate,
                std_err: f64::NAN,
                p_value: f64::NAN,
                stars: String::new(),
                identified: false,
            },
        }
    }
}

/// Summary of a fitted model; the JSON layout is part of the CLI and C interfaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: String,
    pub likelihood_mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    pub coefficients: Vec<Coefficient>,
    pub log_lik: f64,
    pub null_log_lik: f64,
    pub aic: f64,
    pub null_aic: f64,
    pub iterations: usize,
    pub converged: bool,
    pub convergence: String,
    pub nodes: usize,
    pub dyads: usize,
    pub edges: u64,
}

impl FitResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Plain-text coefficient table with significance stars.
    pub fn table(&self) -> String {
        let mut out = format!("{} ({} likelihood)\n", self.model, self.likelihood_mode);
        out.push_str(&format!(
            "{:<24} {:>12} {:>4} {:>10} {:>12}\n",
            "term", "estimate", "", "std.err", "p-value"
        ));
        for c in &self.coefficients {
            out.push_str(&format!(
                "{:<24} {:>12.4} {:>4} {:>10} {:>12}\n",
                c.name,
                c.estimate,
                c.stars,
                if c.identified { format!("({:.4})", c.std_err) } else { "unident.".into() },
                if c.identified { format!("{:.4e}", c.p_value) } else { "-".into() },
            ));
        }
        out.push_str(&format!(
            "log-lik {:.3}  AIC {:.1}  null AIC {:.1}  iterations {} ({})\n",
            self.log_lik, self.aic, self.null_aic, self.iterations, self.convergence
        ));
        out
    }
}
