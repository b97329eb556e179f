//! Seeded generators for the synthetic validation networks and a
//! replication harness.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, which is
//! portable across platforms, so a spec plus seed always gives the same network.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ghype::{self, dyad_index, Covariate, FitOptions};
use crate::multigraph::MultiEdgeNetwork;
use crate::statistics::{shared_partners_unweighted, shared_partners_weighted};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// One edge on every dyad, the rest uniform over dyads (binary density 1).
    RandomComplete,
    /// All `m` edges i.i.d. uniform over dyads.
    RandomUniform,
    /// Edges only on `n_tri` random triangles.
    Triangles,
    /// `RandomUniform(m/2)` plus `Triangles(m - m/2)`.
    Mixed,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::RandomComplete => "random_complete",
            GeneratorKind::RandomUniform => "random_uniform",
            GeneratorKind::Triangles => "triangles",
            GeneratorKind::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub n: usize,
    pub m: u64,
    pub n_tri: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    /// The three 34-node validation networks.
    pub fn random(seed: u64) -> Self {
        GeneratorSpec { kind: GeneratorKind::RandomComplete, n: 34, m: 1000, n_tri: 0, seed }
    }

    pub fn triangles(seed: u64) -> Self {
        GeneratorSpec { kind: GeneratorKind::Triangles, n: 34, m: 1000, n_tri: 26, seed }
    }

    pub fn mixed(seed: u64) -> Self {
        GeneratorSpec { kind: GeneratorKind::Mixed, n: 34, m: 2000, n_tri: 26, seed }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::Input(format!("generators need n >= 3, got {}", self.n)));
        }
        if self.m < 1 {
            return Err(Error::Input("generators need m >= 1".into()));
        }
        let dyads = (self.n * (self.n - 1) / 2) as u64;
        match self.kind {
            GeneratorKind::RandomComplete if self.m < dyads => Err(Error::Input(format!(
                "random_complete needs m >= {dyads} to place one edge per dyad, got {}",
                self.m
            ))),
            GeneratorKind::Triangles | GeneratorKind::Mixed if self.n_tri < 1 => {
                Err(Error::Input("triangle generators need n_tri >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

fn dyad_total(n: usize) -> usize {
    n * (n - 1) / 2
}

fn random_uniform(n: usize, m: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let d = dyad_total(n);
    let mut counts = vec![0u64; d];
    for _ in 0..m {
        counts[rng.random_range(0..d)] += 1;
    }
    counts
}

fn random_complete(n: usize, m: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let d = dyad_total(n);
    let mut counts = random_uniform(n, m - d as u64, rng);
    counts.iter_mut().for_each(|c| *c += 1);
    counts
}

/// Distinct node triples, each sorted, in sampling order.
fn sample_triangles(n: usize, n_tri: usize, rng: &mut ChaCha8Rng) -> Result<Vec<[usize; 3]>> {
    let available = n * (n - 1) * (n - 2) / 6;
    if n_tri > available {
        return Err(Error::Input(format!(
            "{n_tri} distinct triangles requested but only {available} exist on {n} nodes"
        )));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n_tri);
    while out.len() < n_tri {
        let mut t: Vec<usize> = sample(rng, n, 3).into_vec();
        t.sort_unstable();
        let t = [t[0], t[1], t[2]];
        if seen.insert(t) {
            out.push(t);
        }
    }
    Ok(out)
}

fn triangle_dyads(n: usize, t: &[usize; 3]) -> [usize; 3] {
    [dyad_index(n, t[0], t[1]), dyad_index(n, t[0], t[2]), dyad_index(n, t[1], t[2])]
}

/// One edge on every triangle dyad, then each remaining edge goes to a
/// uniformly chosen triangle and one of its three dyads.
fn triangles(n: usize, m: u64, n_tri: usize, rng: &mut ChaCha8Rng) -> Result<Vec<u64>> {
    let tris = sample_triangles(n, n_tri, rng)?;
    let mut counts = vec![0u64; dyad_total(n)];
    for t in &tris {
        for d in triangle_dyads(n, t) {
            counts[d] = 1;
        }
    }
    let baseline: u64 = counts.iter().sum();
    if m < baseline {
        return Err(Error::Input(format!(
            "the sampled triangles span {baseline} dyads but only {m} edges are available"
        )));
    }
    for _ in 0..(m - baseline) {
        let t = &tris[rng.random_range(0..tris.len())];
        let d = triangle_dyads(n, t)[rng.random_range(0..3)];
        counts[d] += 1;
    }
    Ok(counts)
}

/// Generates the network described by `spec`; a pure function of `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<MultiEdgeNetwork> {
    spec.validate()?;
    let n = spec.n;
    let counts = match spec.kind {
        GeneratorKind::RandomComplete => random_complete(n, spec.m, &mut ChaCha8Rng::seed_from_u64(spec.seed)),
        GeneratorKind::RandomUniform => random_uniform(n, spec.m, &mut ChaCha8Rng::seed_from_u64(spec.seed)),
        GeneratorKind::Triangles => triangles(n, spec.m, spec.n_tri, &mut ChaCha8Rng::seed_from_u64(spec.seed))?,
        GeneratorKind::Mixed => {
            let half = spec.m / 2;
            let mut a = random_uniform(n, half, &mut ChaCha8Rng::seed_from_u64(spec.seed));
            let b = triangles(
                n,
                spec.m - half,
                spec.n_tri,
                &mut ChaCha8Rng::seed_from_u64(spec.seed.wrapping_add(1)),
            )?;
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        }
    };
    MultiEdgeNetwork::from_dyad_counts(n, &counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureCovariate {
    WeightedSp,
    UnweightedSp,
}

impl ClosureCovariate {
    pub fn as_str(self) -> &'static str {
        match self {
            ClosureCovariate::WeightedSp => "weighted_sp",
            ClosureCovariate::UnweightedSp => "unweighted_sp",
        }
    }

    pub fn covariate(self, net: &MultiEdgeNetwork) -> Result<Covariate> {
        let stat = match self {
            ClosureCovariate::WeightedSp => shared_partners_weighted(net),
            ClosureCovariate::UnweightedSp => shared_partners_unweighted(net),
        };
        Covariate::from_statistic(self.as_str(), &stat)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replication {
    pub index: u64,
    pub seed: u64,
    pub estimate: f64,
    #[serde(deserialize_with = "crate::mle::null_as_nan")]
    pub std_err: f64,
    #[serde(deserialize_with = "crate::mle::null_as_nan")]
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationSummary {
    pub generator: GeneratorSpec,
    pub covariate: ClosureCovariate,
    pub xi: String,
    pub likelihood_mode: String,
    pub replications: Vec<Replication>,
    pub failures: Vec<(u64, String)>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub sd: f64,
    /// share of replications with p < 0.001
    pub significant_fraction: f64,
}

impl ReplicationSummary {
    pub fn coefficients(&self) -> Vec<f64> {
        self.replications.iter().map(|r| r.estimate).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `index seed estimate std_err p_value`, tab separated.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("replication\tseed\testimate\tstd_err\tp_value\n");
        for r in &self.replications {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{:e}\n",
                r.index, r.seed, r.estimate, r.std_err, r.p_value
            ));
        }
        out
    }
}

/// Sample mean, min, max and (n - 1) standard deviation.
pub fn describe(values: &[f64]) -> (f64, f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sd = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, min, max, sd)
}

/// Generates `reps` networks with seeds `spec.seed + 1 ..= spec.seed + reps`,
/// fits gHypEG with the chosen closure covariate and summarizes the coefficient.
/// Runs on the current rayon pool; the result does not depend on its size.
pub fn replicate(
    spec: &GeneratorSpec,
    reps: u64,
    covariate: ClosureCovariate,
    opts: FitOptions,
) -> Result<ReplicationSummary> {
    if reps == 0 {
        return Err(Error::Input("at least one replication is required".into()));
    }
    spec.validate()?;
    let outcomes: Vec<(u64, u64, Result<crate::mle::FitResult>)> = (1..=reps)
        .into_par_iter()
        .map(|r| {
            let seed = spec.seed.wrapping_add(r);
            let run = GeneratorSpec { seed, ..*spec };
            let fit = generate(&run).and_then(|net| {
                let cov = covariate.covariate(&net)?;
                ghype::fit(&net, vec![cov], opts)
            });
            (r, seed, fit)
        })
        .collect();

    let mut replications = Vec::new();
    let mut failures = Vec::new();
    let mut mode = String::new();
    for (index, seed, fit) in outcomes {
        match fit {
            Ok(res) => {
                let c = &res.coefficients[0];
                mode = res.likelihood_mode.clone();
                replications.push(Replication {
                    index,
                    seed,
                    estimate: c.estimate,
                    std_err: c.std_err,
                    p_value: c.p_value,
                });
            }
            Err(e) => failures.push((index, e.to_string())),
        }
    }
    if failures.len() as f64 > 0.1 * reps as f64 {
        return Err(Error::Model(format!(
            "{} of {reps} replications failed; first: {}",
            failures.len(),
            failures[0].1
        )));
    }
    let coefs: Vec<f64> = replications.iter().map(|r| r.estimate).collect();
    let (mean, min, max, sd) = describe(&coefs);
    let significant = replications.iter().filter(|r| r.p_value < 1e-3).count();
    Ok(ReplicationSummary {
        generator: *spec,
        covariate,
        xi: opts.xi.as_str().into(),
        likelihood_mode: mode,
        significant_fraction: significant as f64 / replications.len() as f64,
        replications,
        failures,
        mean,
        min,
        max,
        sd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::dyads;

    #[test]
    fn random_complete_is_dense() {
        let net = generate(&GeneratorSpec::random(7)).unwrap();
        assert_eq!(net.binary_density().unwrap(), 1.0);
        assert_eq!(net.edge_count(), 1000);
    }

    #[test]
    fn triangles_stay_on_triangles() {
        let spec = GeneratorSpec::triangles(3);
        let net = generate(&spec).unwrap();
        assert_eq!(net.edge_count(), 1000);
        let tris = sample_triangles(34, 26, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let mut allowed = BTreeSet::new();
        for t in &tris {
            for d in triangle_dyads(34, t) {
                allowed.insert(d);
            }
        }
        for (idx, (i, j)) in dyads(34).enumerate() {
            assert_eq!(net.count(i, j) > 0, allowed.contains(&idx), "dyad {i}-{j}");
        }
        let sp = shared_partners_unweighted(&net);
        for (i, j) in dyads(34) {
            if net.count(i, j) > 0 {
                assert!(sp.get(i, j) >= 1.0);
            }
        }
    }

    #[test]
    fn mixed_total_and_determinism() {
        let a = generate(&GeneratorSpec::mixed(11)).unwrap();
        let b = generate(&GeneratorSpec::mixed(11)).unwrap();
        let c = generate(&GeneratorSpec::mixed(12)).unwrap();
        assert_eq!(a.edge_count(), 2000);
        assert_eq!(a, b);
        assert_ne!(a.counts(), c.counts());
    }

    #[test]
    fn invalid_specs() {
        let mut s = GeneratorSpec::random(0);
        s.m = 100;
        assert!(generate(&s).is_err());
        let mut s = GeneratorSpec::triangles(0);
        s.n_tri = 0;
        assert!(generate(&s).is_err());
        let s = GeneratorSpec { kind: GeneratorKind::Triangles, n: 4, m: 100, n_tri: 5, seed: 0 };
        assert!(generate(&s).is_err());
        let s = GeneratorSpec { kind: GeneratorKind::Triangles, n: 10, m: 2, n_tri: 3, seed: 0 };
        assert!(generate(&s).is_err());
        let s = GeneratorSpec { kind: GeneratorKind::RandomUniform, n: 2, m: 2, n_tri: 0, seed: 0 };
        assert!(generate(&s).is_err());
    }

    #[test]
    fn describe_stats() {
        let (mean, min, max, sd) = describe(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!((mean, min, max), (2.5, 1.0, 4.0));
        assert!((sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }
}
