//! Dyad-level change statistics.
//!
//! Every statistic here is a symmetric `n x n` matrix with zero diagonal
//! whose `(a, b)` entry never reads the focal count `v(a, b)`, so the matrix
//! can be used as a fixed regressor for the dyad counts.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multigraph::{dyads, MultiEdgeNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    UnweightedSp,
    WeightedSp,
    AttributeMatch,
    DegreeCovariate,
    Custom,
}

impl StatisticKind {
    /// Whether the values are counts (transformed as `log(1 + h)` by gHypEG).
    pub fn is_count_valued(self) -> bool {
        matches!(
            self,
            StatisticKind::UnweightedSp | StatisticKind::WeightedSp | StatisticKind::DegreeCovariate
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatisticMatrix {
    kind: StatisticKind,
    n: usize,
    values: Vec<f64>,
}

impl StatisticMatrix {
    /// Wraps a dense row-major matrix. It must be symmetric, finite and have a zero diagonal.
    pub fn new(kind: StatisticKind, n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Input(format!(
                "statistic matrix has {} entries, expected {}",
                values.len(),
                n * n
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::Input("statistic diagonal must be zero".into()));
            }
            for j in (i + 1)..n {
                let v = values[i * n + j];
                if !v.is_finite() || v != values[j * n + i] {
                    return Err(Error::Input(format!(
                        "statistic entry ({i}, {j}) is not finite and symmetric"
                    )));
                }
            }
        }
        Ok(StatisticMatrix { kind, n, values })
    }

    fn from_dyad_fn(kind: StatisticKind, n: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let upper: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|a| ((a + 1)..n).map(|b| f(a, b)).collect())
            .collect();
        let mut values = vec![0.0; n * n];
        for (a, row) in upper.into_iter().enumerate() {
            for (off, v) in row.into_iter().enumerate() {
                let b = a + 1 + off;
                values[a * n + b] = v;
                values[b * n + a] = v;
            }
        }
        StatisticMatrix { kind, n, values }
    }

    pub fn kind(&self) -> StatisticKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Upper-triangle values in [`dyads`] order.
    pub fn dyad_values(&self) -> Vec<f64> {
        dyads(self.n).map(|(i, j)| self.get(i, j)).collect()
    }

    pub fn is_constant(&self) -> bool {
        let mut it = dyads(self.n).map(|(i, j)| self.get(i, j));
        match it.next() {
            None => true,
            Some(first) => it.all(|v| v == first),
        }
    }

    /// Dense CSV with a labelled header row and column.
    pub fn write_csv<W: Write>(&self, labels: &[String], writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec![String::new()];
        header.extend(labels.iter().cloned());
        wtr.write_record(&header)?;
        for i in 0..self.n {
            let mut rec = vec![labels[i].clone()];
            rec.extend((0..self.n).map(|j| format_value(self.get(i, j))));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Long format `node_i<TAB>node_j<TAB>value`, one line per unordered dyad.
    pub fn write_tsv<W: Write>(&self, labels: &[String], mut writer: W) -> Result<()> {
        writeln!(writer, "node_i\tnode_j\tvalue")?;
        for (i, j) in dyads(self.n) {
            writeln!(writer, "{}\t{}\t{}", labels[i], labels[j], format_value(self.get(i, j)))?;
        }
        Ok(())
    }
}

fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// Number of shared partners of each dyad: nodes `i` with `v(a,i) > 0` and `v(b,i) > 0`.
pub fn shared_partners_unweighted(net: &MultiEdgeNetwork) -> StatisticMatrix {
    let n = net.n();
    StatisticMatrix::from_dyad_fn(StatisticKind::UnweightedSp, n, |a, b| {
        let (ra, rb) = (net.row(a), net.row(b));
        let mut k = 0u64;
        for i in 0..n {
            if i != a && i != b && ra[i] > 0 && rb[i] > 0 {
                k += 1;
            }
        }
        k as f64
    })
}

/// Shared partners weighted by the smaller count of the two-path:
/// `sum_i min(v(a,i), v(b,i))` over shared partners `i`.
pub fn shared_partners_weighted(net: &MultiEdgeNetwork) -> StatisticMatrix {
    let n = net.n();
    StatisticMatrix::from_dyad_fn(StatisticKind::WeightedSp, n, |a, b| {
        let (ra, rb) = (net.row(a), net.row(b));
        let mut w = 0u64;
        for i in 0..n {
            if i != a && i != b {
                // min is 0 whenever either leg is absent
                w += ra[i].min(rb[i]);
            }
        }
        w as f64
    })
}

/// Indicator of equal attribute values.
pub fn attribute_match(net: &MultiEdgeNetwork, attr: &str) -> Result<StatisticMatrix> {
    let values = net
        .attribute(attr)
        .ok_or_else(|| Error::UnknownAttribute(attr.to_string()))?;
    Ok(StatisticMatrix::from_dyad_fn(
        StatisticKind::AttributeMatch,
        net.n(),
        |a, b| if values[a] == values[b] { 1.0 } else { 0.0 },
    ))
}

/// `k_a + k_b`.
pub fn degree_covariate(net: &MultiEdgeNetwork) -> StatisticMatrix {
    let k = net.degrees().degrees;
    StatisticMatrix::from_dyad_fn(StatisticKind::DegreeCovariate, net.n(), |a, b| {
        (k[a] + k[b]) as f64
    })
}

/// A named statistic: `weighted_sp`, `unweighted_sp`, `degree` or `match:<attr>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatisticSpec {
    WeightedSp,
    UnweightedSp,
    Degree,
    Match(String),
}

impl std::str::FromStr for StatisticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weighted_sp" => Ok(StatisticSpec::WeightedSp),
            "unweighted_sp" => Ok(StatisticSpec::UnweightedSp),
            "degree" => Ok(StatisticSpec::Degree),
            _ => match s.strip_prefix("match:") {
                Some(attr) if !attr.is_empty() => Ok(StatisticSpec::Match(attr.to_string())),
                _ => Err(Error::Input(format!(
                    "unknown statistic `{s}` (expected weighted_sp, unweighted_sp, degree or match:<attr>)"
                ))),
            },
        }
    }
}

impl std::fmt::Display for StatisticSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StatisticSpec::WeightedSp => f.write_str("weighted_sp"),
            StatisticSpec::UnweightedSp => f.write_str("unweighted_sp"),
            StatisticSpec::Degree => f.write_str("degree"),
            StatisticSpec::Match(a) => write!(f, "match:{a}"),
        }
    }
}

impl StatisticSpec {
    pub fn compute(&self, net: &MultiEdgeNetwork) -> Result<StatisticMatrix> {
        match self {
            StatisticSpec::WeightedSp => Ok(shared_partners_weighted(net)),
            StatisticSpec::UnweightedSp => Ok(shared_partners_unweighted(net)),
            StatisticSpec::Degree => Ok(degree_covariate(net)),
            StatisticSpec::Match(attr) => attribute_match(net, attr),
        }
    }
}

/// R² of the least-squares regression (with intercept) of the upper-triangle
/// dyad counts on the statistic. A statistic without variance explains nothing.
pub fn variance_explained(net: &MultiEdgeNetwork, stat: &StatisticMatrix) -> Result<f64> {
    let n = net.n();
    if stat.n() != n {
        return Err(Error::Input("statistic and network sizes differ".into()));
    }
    if n < 3 {
        return Err(Error::Undefined(format!(
            "variance explained needs at least three dyads, got {} nodes",
            n
        )));
    }
    let y: Vec<f64> = net.dyad_counts().into_iter().map(|c| c as f64).collect();
    let x = stat.dyad_values();
    let len = y.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / len, y.iter().sum::<f64>() / len);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(&y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Ok(0.0);
    }
    Ok((sxy * sxy / (sxx * syy)).clamp(0.0, 1.0))
}
