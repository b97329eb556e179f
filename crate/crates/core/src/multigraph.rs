//! Undirected multi-edge networks.
//!
//! A [`MultiEdgeNetwork`] stores the dense symmetric matrix of edge counts
//! `v(i, j)` together with node labels and categorical node attributes.
//! Node order is the order of first appearance in the edge list; nodes that
//! are only declared (isolated) follow in declaration order.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};

use crate::error::{Error, Result};

/// One row of an edge list. `count` is `None` when the input had no count
/// column, which stands for a single edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRow {
    pub source: String,
    pub target: String,
    pub count: Option<i64>,
}

impl EdgeRow {
    pub fn new(source: impl Into<String>, target: impl Into<String>, count: Option<i64>) -> Self {
        EdgeRow {
            source: source.into(),
            target: target.into(),
            count,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiEdgeNetwork {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    counts: Vec<u64>,
    attributes: BTreeMap<String, Vec<String>>,
}

/// Multi-edge degrees `k_i = sum_j v(i, j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<u64>,
}

impl DegreeSequence {
    pub fn total(&self) -> u64 {
        self.degrees.iter().sum()
    }

    /// `<k>` as an exact fraction `(sum k, n)`.
    pub fn mean_degree_ratio(&self) -> (u64, usize) {
        (self.total(), self.degrees.len())
    }

    pub fn mean_degree(&self) -> f64 {
        if self.degrees.is_empty() {
            return 0.0;
        }
        self.total() as f64 / self.degrees.len() as f64
    }
}

impl MultiEdgeNetwork {
    /// Builds a network from edge-list rows. Repeated rows for the same
    /// unordered dyad accumulate. `declared` adds nodes that may have no edges.
    pub fn from_edge_list(rows: &[EdgeRow], declared: &[String]) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut edges: Vec<(usize, usize, u64)> = Vec::with_capacity(rows.len());

        let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
            if let Some(&i) = index.get(label) {
                return i;
            }
            let i = labels.len();
            labels.push(label.to_string());
            index.insert(label.to_string(), i);
            i
        };

        for (r, row) in rows.iter().enumerate() {
            let row_no = r + 1;
            let source = row.source.trim();
            let target = row.target.trim();
            if source.is_empty() || target.is_empty() {
                return Err(Error::Row {
                    row: row_no,
                    reason: "empty node label".into(),
                });
            }
            if source == target {
                return Err(Error::Row {
                    row: row_no,
                    reason: format!("self-loop on `{source}`"),
                });
            }
            let count = match row.count {
                None => 1,
                Some(c) if c > 0 => c as u64,
                Some(c) => {
                    return Err(Error::Row {
                        row: row_no,
                        reason: format!("edge count must be positive, got {c}"),
                    })
                }
            };
            let a = intern(source, &mut labels);
            let b = intern(target, &mut labels);
            edges.push((a, b, count));
        }
        for label in declared {
            let label = label.trim();
            if label.is_empty() {
                return Err(Error::Input("empty declared node label".into()));
            }
            intern(label, &mut labels);
        }

        let n = labels.len();
        let mut counts = vec![0u64; n * n];
        for (a, b, c) in edges {
            counts[a * n + b] += c;
            counts[b * n + a] += c;
        }
        Ok(MultiEdgeNetwork {
            labels,
            index,
            counts,
            attributes: BTreeMap::new(),
        })
    }

    /// Builds a network from labels and a dense row-major count matrix.
    pub fn from_counts(labels: Vec<String>, counts: Vec<u64>) -> Result<Self> {
        let n = labels.len();
        if counts.len() != n * n {
            return Err(Error::Input(format!(
                "count matrix has {} entries, expected {}",
                counts.len(),
                n * n
            )));
        }
        for i in 0..n {
            if counts[i * n + i] != 0 {
                return Err(Error::Input(format!("self-loop on `{}`", labels[i])));
            }
            for j in (i + 1)..n {
                if counts[i * n + j] != counts[j * n + i] {
                    return Err(Error::Input(format!(
                        "count matrix is not symmetric at ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate node label `{l}`")));
            }
        }
        Ok(MultiEdgeNetwork {
            labels,
            index,
            counts,
            attributes: BTreeMap::new(),
        })
    }

    /// Unlabelled network over nodes `0..n` (labels are the decimal indices).
    pub fn from_dyad_counts(n: usize, dyad_counts: &[u64]) -> Result<Self> {
        if dyad_counts.len() != n * n.saturating_sub(1) / 2 {
            return Err(Error::Input("dyad count vector has the wrong length".into()));
        }
        let mut counts = vec![0u64; n * n];
        for ((i, j), &c) in dyads(n).zip(dyad_counts) {
            counts[i * n + j] = c;
            counts[j * n + i] = c;
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::from_counts(labels, counts)
    }

    /// Attaches a categorical attribute. Every node needs a value.
    pub fn with_attribute(mut self, name: &str, values: Vec<String>) -> Result<Self> {
        if values.len() != self.n() {
            return Err(Error::Input(format!(
                "attribute `{name}` has {} values for {} nodes",
                values.len(),
                self.n()
            )));
        }
        self.attributes.insert(name.to_string(), values);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    #[inline]
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.n() + j]
    }

    /// Row `i` of the count matrix.
    pub fn row(&self, i: usize) -> &[u64] {
        let n = self.n();
        &self.counts[i * n..(i + 1) * n]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of edges `m`.
    pub fn edge_count(&self) -> u64 {
        self.counts.iter().sum::<u64>() / 2
    }

    pub fn attribute(&self, name: &str) -> Option<&[String]> {
        self.attributes.get(name).map(|v| v.as_slice())
    }

    pub fn attribute_names(&self) -> impl Iterator<Item = &str> {
        self.attributes.keys().map(|s| s.as_str())
    }

    /// Upper-triangle dyad counts in [`dyads`] order.
    pub fn dyad_counts(&self) -> Vec<u64> {
        dyads(self.n()).map(|(i, j)| self.count(i, j)).collect()
    }

    pub fn degrees(&self) -> DegreeSequence {
        let degrees = (0..self.n()).map(|i| self.row(i).iter().sum()).collect();
        DegreeSequence { degrees }
    }

    /// Fraction of dyads with at least one edge.
    pub fn binary_density(&self) -> Result<f64> {
        let n = self.n();
        if n < 2 {
            return Err(Error::Undefined(format!(
                "binary density needs at least two nodes, got {n}"
            )));
        }
        let realized = dyads(n).filter(|&(i, j)| self.count(i, j) > 0).count();
        Ok(realized as f64 / (n * (n - 1) / 2) as f64)
    }

    /// Reads a node-attribute CSV (`node,<attr1>[,<attr2>...]`) and attaches
    /// every column. Each node must appear exactly once.
    pub fn with_attribute_csv<R: Read>(mut self, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 || headers.get(0) != Some("node") {
            return Err(Error::Input(
                "attribute file header must be `node,<attr>[,...]`".into(),
            ));
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let n = self.n();
        let mut columns: Vec<Vec<Option<String>>> = vec![vec![None; n]; names.len()];
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != headers.len() {
                return Err(Error::Input(format!(
                    "attribute row {} has {} fields, expected {}",
                    r + 1,
                    record.len(),
                    headers.len()
                )));
            }
            let node = &record[0];
            let i = self.node_index(node).ok_or_else(|| {
                Error::Input(format!("attribute file names unknown node `{node}`"))
            })?;
            for (col, value) in columns.iter_mut().zip(record.iter().skip(1)) {
                if col[i].is_some() {
                    return Err(Error::Input(format!("node `{node}` listed twice")));
                }
                col[i] = Some(value.to_string());
            }
        }
        for (name, col) in names.into_iter().zip(columns) {
            let mut values = Vec::with_capacity(n);
            for (i, v) in col.into_iter().enumerate() {
                match v {
                    Some(v) => values.push(v),
                    None => {
                        return Err(Error::Input(format!(
                            "attribute file is missing node `{}`",
                            self.labels[i]
                        )))
                    }
                }
            }
            self.attributes.insert(name, values);
        }
        Ok(self)
    }

    /// Writes the network as `source,target,count`, one row per realized dyad.
    pub fn write_edge_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["source", "target", "count"])?;
        for (i, j) in dyads(self.n()) {
            let c = self.count(i, j);
            if c > 0 {
                wtr.write_record([&self.labels[i], &self.labels[j], &c.to_string()])?;
            }
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Unordered dyads `(i, j)`, `i < j`, in row-major upper-triangle order.
pub fn dyads(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
}

/// Parses an edge-list CSV with header `source,target[,count]`.
pub fn read_edge_csv<R: Read>(reader: R) -> Result<Vec<EdgeRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let has_count = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["source", "target"] => false,
        ["source", "target", "count"] => true,
        _ => {
            return Err(Error::Input(
                "edge list header must be `source,target[,count]`".into(),
            ))
        }
    };
    let mut rows = Vec::new();
    for (r, record) in rdr.records().enumerate() {
        let record = record?;
        let row = r + 1;
        if record.len() != headers.len() {
            return Err(Error::Row {
                row,
                reason: format!("expected {} fields, got {}", headers.len(), record.len()),
            });
        }
        let count = if has_count {
            let raw = &record[2];
            Some(raw.parse::<i64>().map_err(|_| Error::Row {
                row,
                reason: format!("count `{raw}` is not an integer"),
            })?)
        } else {
            None
        };
        rows.push(EdgeRow::new(&record[0], &record[1], count));
    }
    Ok(rows)
}

/// Reads a node-declaration file: header `node`, one label per line.
pub fn read_node_list<R: Read>(reader: R) -> Result<Vec<String>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    if rdr.headers()?.get(0) != Some("node") {
        return Err(Error::Input("node file header must be `node`".into()));
    }
    let mut out = Vec::new();
    for record in rdr.records() {
        out.push(record?[0].to_string());
    }
    Ok(out)
}

/// Aggregates SocioPatterns contact records (`t i j Ci Cj`, whitespace
/// separated) into dyad counts = number of records per pair. The class labels
/// carried by the records become the `class` attribute.
pub fn read_contact_records<R: Read>(mut reader: R) -> Result<MultiEdgeNetwork> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    let mut rows = Vec::new();
    let mut class: HashMap<String, String> = HashMap::new();
    let mut record_class = |node: &str, c: &str, line: usize| -> Result<()> {
        match class.get(node) {
            Some(prev) if prev != c => Err(Error::Row {
                row: line,
                reason: format!("node `{node}` has classes `{prev}` and `{c}`"),
            }),
            Some(_) => Ok(()),
            None => {
                class.insert(node.to_string(), c.to_string());
                Ok(())
            }
        }
    };
    for (l, line) in text.lines().enumerate() {
        let line_no = l + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(Error::Row {
                row: line_no,
                reason: format!("expected `t i j Ci Cj`, got {} fields", fields.len()),
            });
        }
        fields[0].parse::<i64>().map_err(|_| Error::Row {
            row: line_no,
            reason: format!("timestamp `{}` is not an integer", fields[0]),
        })?;
        record_class(fields[1], fields[3], line_no)?;
        record_class(fields[2], fields[4], line_no)?;
        rows.push(EdgeRow::new(fields[1], fields[2], None));
    }
    let net = MultiEdgeNetwork::from_edge_list(&rows, &[])?;
    let values = net.labels().iter().map(|l| class[l].clone()).collect();
    net.with_attribute("class", values)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example() -> MultiEdgeNetwork {
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
    fn example_counts_match_table() {
        let net = example();
        let expected = [[0, 10, 6, 5], [10, 0, 4, 8], [6, 4, 0, 0], [5, 8, 0, 0]];
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(net.row(i), row);
        }
        assert_eq!(net.edge_count(), 33);
    }

    #[test]
    fn degrees_are_row_sums() {
        let net = example();
        assert_eq!(net.degrees().degrees, vec![21, 22, 10, 13]);
        assert_eq!(net.degrees().total(), 2 * net.edge_count());
        assert_eq!(net.degrees().mean_degree(), 16.5);
    }

    #[test]
    fn empty_with_declared_nodes() {
        let net = MultiEdgeNetwork::from_edge_list(&[], &["a".into(), "b".into()]).unwrap();
        assert_eq!(net.n(), 2);
        assert_eq!(net.edge_count(), 0);
        assert_eq!(net.degrees().degrees, vec![0, 0]);
        assert_eq!(net.binary_density().unwrap(), 0.0);
    }

    #[test]
    fn unit_rows_accumulate() {
        let rows = vec![EdgeRow::new("a", "b", None); 3];
        let net = MultiEdgeNetwork::from_edge_list(&rows, &[]).unwrap();
        assert_eq!(net.count(0, 1), 3);
        assert_eq!(net.count(1, 0), 3);
    }

    #[test]
    fn single_dyad_degrees() {
        let net = MultiEdgeNetwork::from_edge_list(&[EdgeRow::new("x", "y", Some(5))], &[]).unwrap();
        assert_eq!(net.degrees().degrees, vec![5, 5]);
    }

    #[test]
    fn rejects_bad_rows() {
        let err = MultiEdgeNetwork::from_edge_list(
            &[EdgeRow::new("a", "b", None), EdgeRow::new("c", "c", None)],
            &[],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Row { row: 2, .. }), "{err}");
        for bad in [0, -3] {
            let err =
                MultiEdgeNetwork::from_edge_list(&[EdgeRow::new("a", "b", Some(bad))], &[]).unwrap_err();
            assert!(matches!(err, Error::Row { row: 1, .. }));
        }
        assert!(MultiEdgeNetwork::from_edge_list(&[EdgeRow::new("", "b", None)], &[]).is_err());
    }

    #[test]
    fn density() {
        assert!((example().binary_density().unwrap() - 5.0 / 6.0).abs() < 1e-15);
        let tri = MultiEdgeNetwork::from_dyad_counts(3, &[1, 1, 1]).unwrap();
        assert_eq!(tri.binary_density().unwrap(), 1.0);
        let empty = MultiEdgeNetwork::from_dyad_counts(4, &[0; 6]).unwrap();
        assert_eq!(empty.binary_density().unwrap(), 0.0);
        let one = MultiEdgeNetwork::from_edge_list(&[], &["a".into()]).unwrap();
        assert!(matches!(one.binary_density(), Err(Error::Undefined(_))));
    }

    #[test]
    fn csv_parsing() {
        let rows = read_edge_csv("source,target,count\na,b,2\nb,c,1\n".as_bytes()).unwrap();
        assert_eq!(rows[0], EdgeRow::new("a", "b", Some(2)));
        let rows = read_edge_csv("source,target\na,b\n".as_bytes()).unwrap();
        assert_eq!(rows[0].count, None);
        assert!(read_edge_csv("from,to\na,b\n".as_bytes()).is_err());
        assert!(matches!(
            read_edge_csv("source,target,count\na,b,x\n".as_bytes()),
            Err(Error::Row { row: 1, .. })
        ));
        assert!(matches!(
            read_edge_csv("source,target,count\na,b\n".as_bytes()),
            Err(Error::Row { row: 1, .. })
        ));
    }

    #[test]
    fn attribute_file() {
        let net = example()
            .with_attribute_csv("node,faction,club\na,1,x\nb,1,x\nc,2,y\nd,2,x\n".as_bytes())
            .unwrap();
        assert_eq!(net.attribute("faction").unwrap(), ["1", "1", "2", "2"]);
        assert_eq!(net.attribute("club").unwrap()[3], "x");
        assert!(example()
            .with_attribute_csv("node,f\na,1\nb,1\nc,2\n".as_bytes())
            .is_err());
        assert!(example()
            .with_attribute_csv("node,f\na,1\nb,1\nc,2\nd,2\ne,1\n".as_bytes())
            .is_err());
    }

    #[test]
    fn contact_records() {
        let data = "20 1 2 A B\n40 1 2 A B\n60 2 3 B B\n";
        let net = read_contact_records(data.as_bytes()).unwrap();
        assert_eq!(net.n(), 3);
        assert_eq!(net.count(0, 1), 2);
        assert_eq!(net.count(1, 2), 1);
        assert_eq!(net.attribute("class").unwrap(), ["A", "B", "B"]);
        assert!(read_contact_records("20 1 2 A B\n40 1 3 C B\n".as_bytes()).is_err());
    }

    #[test]
    fn edge_csv_round_trip() {
        let net = example();
        let mut buf = Vec::new();
        net.write_edge_csv(&mut buf).unwrap();
        let back = MultiEdgeNetwork::from_edge_list(&read_edge_csv(buf.as_slice()).unwrap(), &[]).unwrap();
        assert_eq!(back.counts(), net.counts());
    }
}
