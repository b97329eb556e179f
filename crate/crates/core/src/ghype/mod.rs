//! Generalized hypergeometric ensembles of random graphs (gHypEG).
//!
//! A model is an urn over edge slots: dyad `(i, j)` holds `Xi_ij` slots, each
//! drawn with relative weight `Omega_ij = exp(sum_r theta_r x_ij^(r))`. With
//! `theta = 0` it is the configuration model (degree-corrected `Xi`) or a
//! uniform urn (mean-degree `Xi`).

mod likelihood;

use serde::{Deserialize, Serialize};

pub use likelihood::DyadData;

use crate::error::{Error, Result};
use crate::mle::{self, Coefficient, FitResult, Objective, OptimOptions};
use crate::multigraph::{dyads, MultiEdgeNetwork};
use crate::statistics::{StatisticKind, StatisticMatrix};

/// Above this many sampling-space dyads, `Auto` fitting uses the multinomial approximation.
pub const EXACT_DYAD_LIMIT: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum XiKind {
    /// `Xi_ij = k_i k_j`
    Config,
    /// `Xi_ij = <k>^2`
    MeanDeg,
}

impl XiKind {
    pub fn as_str(self) -> &'static str {
        match self {
            XiKind::Config => "config",
            XiKind::MeanDeg => "meandeg",
        }
    }

    pub fn build(self, net: &MultiEdgeNetwork) -> Result<XiMatrix> {
        match self {
            XiKind::Config => build_xi_configuration(net),
            XiKind::MeanDeg => build_xi_mean_degree(net),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LikelihoodMode {
    Exact,
    Multinomial,
    /// Exact up to [`EXACT_DYAD_LIMIT`] dyads, multinomial above.
    Auto,
}

impl LikelihoodMode {
    pub fn resolve(self, dyads: usize) -> LikelihoodMode {
        match self {
            LikelihoodMode::Auto if dyads <= EXACT_DYAD_LIMIT => LikelihoodMode::Exact,
            LikelihoodMode::Auto => LikelihoodMode::Multinomial,
            other => other,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LikelihoodMode::Exact => "exact",
            LikelihoodMode::Multinomial => "multinomial",
            LikelihoodMode::Auto => "auto",
        }
    }
}

/// Combinatorial matrix `Xi`, stored per unordered dyad.
#[derive(Debug, Clone, PartialEq)]
pub struct XiMatrix {
    n: usize,
    kind: XiKind,
    values: Vec<f64>,
}

impl XiMatrix {
    pub fn kind(&self) -> XiKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Values in [`dyads`] order.
    pub fn dyad_values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.values[dyad_index(self.n, a, b)]
    }
}

/// Position of dyad `(a, b)`, `a < b`, in [`dyads`] order.
pub fn dyad_index(n: usize, a: usize, b: usize) -> usize {
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

pub fn build_xi_configuration(net: &MultiEdgeNetwork) -> Result<XiMatrix> {
    let k = net.degrees().degrees;
    if k.iter().filter(|&&d| d > 0).count() < 2 {
        return Err(Error::Model(
            "configuration Xi needs at least two nodes with positive degree".into(),
        ));
    }
    let values = dyads(net.n()).map(|(i, j)| (k[i] as f64) * (k[j] as f64)).collect();
    Ok(XiMatrix { n: net.n(), kind: XiKind::Config, values })
}

pub fn build_xi_mean_degree(net: &MultiEdgeNetwork) -> Result<XiMatrix> {
    if net.edge_count() == 0 {
        return Err(Error::Model("mean-degree Xi needs at least one edge".into()));
    }
    let mean = net.degrees().mean_degree();
    let n = net.n();
    Ok(XiMatrix {
        n,
        kind: XiKind::MeanDeg,
        values: vec![mean * mean; n * (n - 1) / 2],
    })
}

/// A covariate on the log-propensity scale: `Omega = exp(theta * x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covariate {
    pub name: String,
    /// per-dyad values in [`dyads`] order
    pub x: Vec<f64>,
}

impl Covariate {
    /// Count-valued statistics enter as `log(1 + h)`, match indicators as the
    /// indicator itself, custom matrices unchanged.
    pub fn from_statistic(name: &str, stat: &StatisticMatrix) -> Result<Self> {
        let raw = stat.dyad_values();
        let x: Vec<f64> = match stat.kind() {
            k if k.is_count_valued() => raw.iter().map(|h| h.ln_1p()).collect(),
            StatisticKind::AttributeMatch | StatisticKind::Custom => raw,
            _ => unreachable!("count-valued kinds handled above"),
        };
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Model(format!("covariate `{name}` has nonfinite values")));
        }
        Ok(Covariate { name: name.to_string(), x })
    }
}

#[derive(Debug, Clone)]
pub struct GhypeModel {
    pub xi: XiMatrix,
    pub covariates: Vec<Covariate>,
    pub theta: Vec<f64>,
}

impl GhypeModel {
    /// Model at `theta = 0`.
    pub fn new(xi: XiMatrix, covariates: Vec<Covariate>) -> Result<Self> {
        let d = xi.values.len();
        if let Some(c) = covariates.iter().find(|c| c.x.len() != d) {
            return Err(Error::Input(format!("covariate `{}` has the wrong size", c.name)));
        }
        let theta = vec![0.0; covariates.len()];
        Ok(GhypeModel { xi, covariates, theta })
    }

    pub fn with_theta(mut self, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != self.covariates.len() {
            return Err(Error::Input("theta length differs from covariate count".into()));
        }
        self.theta = theta;
        Ok(self)
    }

    /// `Omega` per dyad (in [`dyads`] order), computed in log space.
    pub fn omega(&self) -> Result<Vec<f64>> {
        let d = self.xi.values.len();
        let mut out = Vec::with_capacity(d);
        for idx in 0..d {
            let mut log_w = 0.0;
            for (c, t) in self.covariates.iter().zip(&self.theta) {
                log_w += t * c.x[idx];
            }
            let w = log_w.exp();
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Model(format!(
                    "Omega is not representable (log Omega = {log_w})"
                )));
            }
            out.push(w);
        }
        Ok(out)
    }

    /// `S_Omega = sum Omega_ij (Xi_ij - A_ij)` over unordered dyads.
    pub fn s_omega(&self, net: &MultiEdgeNetwork) -> Result<f64> {
        let omega = self.omega()?;
        Ok(dyads(net.n())
            .zip(omega)
            .zip(&self.xi.values)
            .map(|(((i, j), w), xi)| w * (xi - net.count(i, j) as f64))
            .sum())
    }

    pub fn dyad_data(&self, net: &MultiEdgeNetwork) -> Result<DyadData> {
        if net.n() != self.xi.n {
            return Err(Error::Input("model and network sizes differ".into()));
        }
        let mut data = DyadData {
            xi: Vec::new(),
            counts: Vec::new(),
            covariates: vec![Vec::new(); self.covariates.len()],
            stranded_edges: 0,
        };
        for (idx, (i, j)) in dyads(net.n()).enumerate() {
            let xi = self.xi.values[idx];
            let a = net.count(i, j);
            if xi > 0.0 {
                data.xi.push(xi);
                data.counts.push(a);
                for (dst, c) in data.covariates.iter_mut().zip(&self.covariates) {
                    dst.push(c.x[idx]);
                }
            } else {
                data.stranded_edges += a;
            }
        }
        Ok(data)
    }

    /// Exact log-likelihood of `net`.
    pub fn log_likelihood(&self, net: &MultiEdgeNetwork) -> Result<f64> {
        let data = self.dyad_data(net)?;
        let (li, _) = likelihood::exact_log_integral(&data, &self.theta)?;
        Ok(data.log_binomials() + li)
    }

    /// Multinomial approximation with cell probabilities `Xi Omega / sum Xi Omega`.
    pub fn log_likelihood_multinomial(&self, net: &MultiEdgeNetwork) -> Result<f64> {
        let data = self.dyad_data(net)?;
        Ok(likelihood::multinomial(&data, &self.theta)?.0)
    }

    /// Log-likelihood and gradient under `mode` (which must not be `Auto`).
    pub fn log_likelihood_grad(&self, net: &MultiEdgeNetwork, mode: LikelihoodMode) -> Result<(f64, Vec<f64>)> {
        let data = self.dyad_data(net)?;
        GhypeObjective::new(data, mode.resolve(usize::MAX)).value_grad(&self.theta)
    }
}

/// Exact log-probability of drawing `counts` from an urn with `xi[d]` balls of
/// weight `omega[d]` per dyad (multivariate Wallenius), without reference to a network.
pub fn outcome_log_probability(xi: &[f64], omega: &[f64], counts: &[u64]) -> Result<f64> {
    if xi.len() != omega.len() || xi.len() != counts.len() {
        return Err(Error::Input("xi, omega and counts must have equal length".into()));
    }
    if omega.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::Model("omega must be positive and finite".into()));
    }
    let data = DyadData {
        xi: xi.to_vec(),
        counts: counts.to_vec(),
        covariates: vec![omega.iter().map(|w| w.ln()).collect()],
        stranded_edges: 0,
    };
    let (li, _) = likelihood::exact_log_integral(&data, &[1.0])?;
    Ok(data.log_binomials() + li)
}

/// Log-likelihood of a fixed dyad set as a function of the coefficients.
pub struct GhypeObjective {
    data: DyadData,
    mode: LikelihoodMode,
    constant: f64,
}

impl GhypeObjective {
    pub fn new(data: DyadData, mode: LikelihoodMode) -> Self {
        let mode = mode.resolve(data.len());
        let constant = match mode {
            LikelihoodMode::Exact => data.log_binomials(),
            _ => 0.0,
        };
        GhypeObjective { data, mode, constant }
    }

    pub fn mode(&self) -> LikelihoodMode {
        self.mode
    }
}

impl Objective for GhypeObjective {
    fn dim(&self) -> usize {
        self.data.dim()
    }

    fn value_grad(&self, theta: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self.mode {
            LikelihoodMode::Exact => {
                let (li, g) = likelihood::exact_log_integral(&self.data, theta)?;
                Ok((self.constant + li, g))
            }
            _ => likelihood::multinomial(&self.data, theta),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub xi: XiKind,
    pub likelihood: LikelihoodMode,
    pub optim: OptimOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            xi: XiKind::Config,
            likelihood: LikelihoodMode::Auto,
            optim: OptimOptions::default(),
        }
    }
}

/// Fits the coefficients by maximum likelihood, starting from the null model.
pub fn fit(net: &MultiEdgeNetwork, covariates: Vec<Covariate>, opts: FitOptions) -> Result<FitResult> {
    if covariates.is_empty() {
        return Err(Error::Input("at least one covariate is required".into()));
    }
    if net.edge_count() == 0 {
        return Err(Error::Model("cannot fit a network without edges".into()));
    }
    let xi = opts.xi.build(net)?;
    let names: Vec<String> = covariates.iter().map(|c| c.name.clone()).collect();
    let model = GhypeModel::new(xi, covariates)?;
    let data = model.dyad_data(net)?;
    for (k, name) in names.iter().enumerate() {
        let x = &data.covariates[k];
        if x.iter().all(|v| *v == x[0]) {
            return Err(Error::ConstantCovariate(name.clone()));
        }
    }

    let dyad_count = data.len();
    let objective = GhypeObjective::new(data, opts.likelihood);
    let p = names.len();
    let (null_ll, _) = objective.value_grad(&vec![0.0; p])?;
    let outcome = mle::maximize(&objective, &vec![0.0; p], opts.optim)?;
    let hessian = mle::numerical_hessian(&objective, &outcome.theta)?;
    let se = mle::standard_errors(&hessian);

    let coefficients = names
        .iter()
        .enumerate()
        .map(|(k, name)| Coefficient::new(name, outcome.theta[k], se.as_ref().map(|s| s[k])))
        .collect();
    Ok(FitResult {
        model: "ghype".into(),
        likelihood_mode: objective.mode().as_str().into(),
        xi: Some(opts.xi.as_str().into()),
        dataset: None,
        coefficients,
        log_lik: outcome.value,
        null_log_lik: null_ll,
        aic: 2.0 * p as f64 - 2.0 * outcome.value,
        null_aic: -2.0 * null_ll,
        iterations: outcome.iterations,
        converged: true,
        convergence: outcome.reason.into(),
        nodes: net.n(),
        dyads: dyad_count,
        edges: net.edge_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::EdgeRow;
    use crate::statistics::shared_partners_weighted;

    fn example() -> MultiEdgeNetwork {
        let rows = [
            EdgeRow::new("a", "b", Some(10)),
            EdgeRow::new("a", "c", Some(6)),
            EdgeRow::new("a", "d", Some(5)),
            EdgeRow::new("b", "c", Some(4)),
            EdgeRow::new("b", "d", Some(8)),
        ];
        MultiEdgeNetwork::from_edge_list(&rows, &[]).unwrap()
    }

    #[test]
    fn dyad_index_matches_order() {
        for n in 2..7 {
            for (idx, (a, b)) in dyads(n).enumerate() {
                assert_eq!(dyad_index(n, a, b), idx);
            }
        }
    }

    #[test]
    fn xi_constructions() {
        let net = example();
        let xi = build_xi_configuration(&net).unwrap();
        assert_eq!(xi.get(0, 1), 462.0);
        assert_eq!(xi.get(1, 0), 462.0);
        assert_eq!(xi.get(2, 2), 0.0);
        let mean = build_xi_mean_degree(&net).unwrap();
        assert_eq!(mean.get(0, 3), 272.25);

        let two = MultiEdgeNetwork::from_dyad_counts(2, &[5]).unwrap();
        assert_eq!(build_xi_configuration(&two).unwrap().get(0, 1), 25.0);
        let two = MultiEdgeNetwork::from_dyad_counts(2, &[4]).unwrap();
        assert_eq!(build_xi_mean_degree(&two).unwrap().get(0, 1), 16.0);

        let tri = MultiEdgeNetwork::from_dyad_counts(3, &[1, 1, 1]).unwrap();
        assert!(build_xi_configuration(&tri).unwrap().dyad_values().iter().all(|&v| v == 4.0));
        assert!(build_xi_mean_degree(&tri).unwrap().dyad_values().iter().all(|&v| v == 4.0));

        let empty = MultiEdgeNetwork::from_dyad_counts(3, &[0, 0, 0]).unwrap();
        assert!(build_xi_configuration(&empty).is_err());
        assert!(build_xi_mean_degree(&empty).is_err());
    }

    #[test]
    fn omega_values() {
        let net = example();
        let w = Covariate::from_statistic("wsp", &shared_partners_weighted(&net)).unwrap();
        let model = GhypeModel::new(build_xi_configuration(&net).unwrap(), vec![w]).unwrap();
        assert!(model.omega().unwrap().iter().all(|&o| o == 1.0));
        let model = model.with_theta(vec![1.0]).unwrap();
        let omega = model.omega().unwrap();
        // dyad order ab ac ad bc bd cd; w(ab) = w(cd) = 9
        assert!((omega[0] - 10.0).abs() < 1e-12);
        assert!((omega[5] - 10.0).abs() < 1e-12);

        let m = Covariate { name: "match".into(), x: vec![1., 0., 0., 0., 0., 1.] };
        let model = GhypeModel::new(build_xi_configuration(&net).unwrap(), vec![m])
            .unwrap()
            .with_theta(vec![0.7])
            .unwrap();
        let omega = model.omega().unwrap();
        assert!((omega[0] - 0.7f64.exp()).abs() < 1e-12);
        assert_eq!(omega[1], 1.0);
    }

    #[test]
    fn omega_overflow_is_an_error() {
        let net = example();
        let c = Covariate { name: "big".into(), x: vec![1000.0; 6] };
        let model = GhypeModel::new(build_xi_configuration(&net).unwrap(), vec![c])
            .unwrap()
            .with_theta(vec![1.0])
            .unwrap();
        assert!(model.omega().is_err());
        // the likelihood itself is scale invariant and stays finite
        assert!(model.log_likelihood_multinomial(&net).unwrap().is_finite());
    }

    #[test]
    fn null_equivalence() {
        let net = example();
        let w = Covariate::from_statistic("wsp", &shared_partners_weighted(&net)).unwrap();
        let xi = build_xi_configuration(&net).unwrap();
        let with_cov = GhypeModel::new(xi.clone(), vec![w]).unwrap();
        let flat = Covariate { name: "zero".into(), x: vec![0.0; 6] };
        let null = GhypeModel::new(xi, vec![flat]).unwrap().with_theta(vec![3.0]).unwrap();
        let a = with_cov.log_likelihood(&net).unwrap();
        let b = null.log_likelihood(&net).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn constant_covariate_rejected() {
        let net = example();
        let c = Covariate { name: "flat".into(), x: vec![2.0; 6] };
        let err = fit(&net, vec![c], FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::ConstantCovariate(_)));
    }

    #[test]
    fn fit_improves_on_null() {
        let net = example();
        let w = Covariate::from_statistic("wsp", &shared_partners_weighted(&net)).unwrap();
        let res = fit(&net, vec![w], FitOptions::default()).unwrap();
        assert!(res.log_lik >= res.null_log_lik);
        assert_eq!(res.likelihood_mode, "exact");
        assert!((res.aic - (2.0 - 2.0 * res.log_lik)).abs() < 1e-12);
    }
}
