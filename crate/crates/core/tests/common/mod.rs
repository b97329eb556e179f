#![allow(dead_code)]

use std::collections::HashMap;

use multiclosure::statistics::{StatisticKind, StatisticMatrix};
use multiclosure::MultiEdgeNetwork;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Poisson};

/// Sequential weighted draws without replacement: `xi[d]` balls of weight
/// `omega[d]`, `m` draws per trial. Returns outcome frequencies.
pub fn urn_frequencies(xi: &[u64], omega: &[f64], m: u64, trials: usize, seed: u64) -> HashMap<Vec<u64>, usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut freq = HashMap::new();
    let mut left = vec![0u64; xi.len()];
    let mut drawn = vec![0u64; xi.len()];
    for _ in 0..trials {
        left.copy_from_slice(xi);
        drawn.iter_mut().for_each(|d| *d = 0);
        for _ in 0..m {
            let total: f64 = left.iter().zip(omega).map(|(&l, w)| l as f64 * w).sum();
            let mut u = rng.random::<f64>() * total;
            let mut pick = left.len() - 1;
            for (d, (&l, w)) in left.iter().zip(omega).enumerate() {
                let mass = l as f64 * w;
                if u < mass {
                    pick = d;
                    break;
                }
                u -= mass;
            }
            while left[pick] == 0 {
                pick -= 1;
            }
            left[pick] -= 1;
            drawn[pick] += 1;
        }
        *freq.entry(drawn.clone()).or_insert(0) += 1;
    }
    freq
}

/// Every count vector with `sum == m` and `counts[d] <= xi[d]`.
pub fn outcomes(xi: &[u64], m: u64) -> Vec<Vec<u64>> {
    fn rec(xi: &[u64], m: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == xi.len() {
            if m == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let d = prefix.len();
        for a in 0..=xi[d].min(m) {
            prefix.push(a);
            rec(xi, m - a, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(xi, m, &mut Vec::new(), &mut out);
    out
}

/// Multinomial counts with cell probabilities proportional to `weights`,
/// drawn as a chain of conditional binomials.
pub fn multinomial(weights: &[f64], m: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut remaining_mass: f64 = weights.iter().sum();
    let mut left = m;
    let mut out = Vec::with_capacity(weights.len());
    for w in weights {
        if left == 0 || remaining_mass <= 0.0 {
            out.push(0);
            continue;
        }
        let p = (w / remaining_mass).clamp(0.0, 1.0);
        let k = Binomial::new(left, p).unwrap().sample(rng);
        out.push(k);
        left -= k;
        remaining_mass -= w;
    }
    *out.last_mut().unwrap() += left;
    out
}

/// Zero-modified Poisson draw: zero with probability `1 / Z`, otherwise a
/// zero-truncated Poisson(`lambda`).
pub fn zero_modified_poisson(lambda: f64, theta_nz: f64, rng: &mut ChaCha8Rng) -> u64 {
    let z = 1.0 + theta_nz.exp() * lambda.exp_m1();
    if rng.random::<f64>() < 1.0 / z {
        return 0;
    }
    let pois = Poisson::new(lambda).unwrap();
    loop {
        let k = pois.sample(rng) as u64;
        if k > 0 {
            return k;
        }
    }
}

/// Count-model data on `n` nodes with a uniform(0, 2) dyad covariate.
pub fn simulate_count_network(n: usize, theta: (f64, f64, f64), seed: u64) -> (MultiEdgeNetwork, StatisticMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cov = vec![0.0; n * n];
    let mut counts = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let x: f64 = rng.random::<f64>() * 2.0;
            cov[i * n + j] = x;
            cov[j * n + i] = x;
            let lambda = (theta.0 + theta.2 * x).exp();
            counts.push(zero_modified_poisson(lambda, theta.1, &mut rng));
        }
    }
    (
        MultiEdgeNetwork::from_dyad_counts(n, &counts).unwrap(),
        StatisticMatrix::new(StatisticKind::Custom, n, cov).unwrap(),
    )
}

/// Unweighted and weighted shared partners by direct enumeration of
/// third nodes, from a dense symmetric count matrix.
pub fn triple_enumeration(n: usize, v: &[u64]) -> (Vec<f64>, Vec<f64>) {
    let mut un = vec![0.0; n * n];
    let mut w = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            for i in 0..n {
                if i == a || i == b {
                    continue;
                }
                let (x, y) = (v[a * n + i], v[b * n + i]);
                if x > 0 && y > 0 {
                    un[a * n + b] += 1.0;
                }
                w[a * n + b] += x.min(y) as f64;
            }
        }
    }
    (un, w)
}
