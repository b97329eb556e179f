use std::collections::HashMap;

use multiclosure::statistics::{shared_partners_unweighted, shared_partners_weighted};
use multiclosure::{EdgeRow, MultiEdgeNetwork};
use proptest::prelude::*;

/// Edge rows over nodes `0..n`, possibly repeating a dyad.
fn rows_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, i64)>)> {
    (2usize..8).prop_flat_map(|n| {
        let row = (0..n, 0..n, 1i64..6).prop_filter("no loops", |(a, b, _)| a != b);
        (Just(n), prop::collection::vec(row, 0..25))
    })
}

fn build(n: usize, rows: &[(usize, usize, i64)]) -> MultiEdgeNetwork {
    let declared: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let edges: Vec<EdgeRow> = rows
        .iter()
        .map(|&(a, b, c)| EdgeRow::new(a.to_string(), b.to_string(), Some(c)))
        .collect();
    MultiEdgeNetwork::from_edge_list(&edges, &declared).unwrap()
}

/// Dyad counts accumulated straight from the rows.
fn tally(rows: &[(usize, usize, i64)]) -> HashMap<(usize, usize), u64> {
    let mut m = HashMap::new();
    for &(a, b, c) in rows {
        *m.entry((a.min(b), a.max(b))).or_insert(0) += c as u64;
    }
    m
}

fn v(t: &HashMap<(usize, usize), u64>, a: usize, b: usize) -> u64 {
    t.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
}

proptest! {
    #[test]
    fn degrees_sum_to_twice_the_edges((n, rows) in rows_strategy()) {
        let net = build(n, &rows);
        let total: u64 = rows.iter().map(|r| r.2 as u64).sum();
        prop_assert_eq!(net.edge_count(), total);
        prop_assert_eq!(net.degrees().total(), 2 * total);
    }

    #[test]
    fn shared_partners_match_triple_enumeration((n, rows) in rows_strategy()) {
        let net = build(n, &rows);
        let t = tally(&rows);
        let un = shared_partners_unweighted(&net);
        let w = shared_partners_weighted(&net);
        for a in 0..n {
            for b in 0..n {
                let (mut count, mut weight) = (0u64, 0u64);
                if a != b {
                    for i in (0..n).filter(|&i| i != a && i != b) {
                        let (x, y) = (v(&t, a, i), v(&t, b, i));
                        if x > 0 && y > 0 {
                            count += 1;
                        }
                        weight += x.min(y);
                    }
                }
                let (ia, ib) = (net.node_index(&a.to_string()).unwrap(), net.node_index(&b.to_string()).unwrap());
                prop_assert_eq!(un.get(ia, ib), count as f64);
                prop_assert_eq!(w.get(ia, ib), weight as f64);
            }
        }
    }

    #[test]
    fn focal_count_is_ignored((n, rows) in rows_strategy(), extra in 1i64..20, pick in 0usize..64) {
        prop_assume!(n >= 2);
        let a = pick % n;
        let b = (a + 1 + pick / n % (n - 1)) % n;
        let base = build(n, &rows);
        let mut more = rows.clone();
        more.push((a, b, extra));
        let bumped = build(n, &more);
        let (ia, ib) = (bumped.node_index(&a.to_string()).unwrap(), bumped.node_index(&b.to_string()).unwrap());
        let (ja, jb) = (base.node_index(&a.to_string()).unwrap(), base.node_index(&b.to_string()).unwrap());
        prop_assert_eq!(shared_partners_weighted(&bumped).get(ia, ib), shared_partners_weighted(&base).get(ja, jb));
        prop_assert_eq!(shared_partners_unweighted(&bumped).get(ia, ib), shared_partners_unweighted(&base).get(ja, jb));
    }

    #[test]
    fn adding_edges_never_lowers_a_statistic((n, rows) in rows_strategy(), extra in prop::collection::vec((0usize..8, 0usize..8, 1i64..4), 1..5)) {
        let extra: Vec<_> = extra.into_iter().map(|(a, b, c)| (a % n, b % n, c)).filter(|(a, b, _)| a != b).collect();
        let base = build(n, &rows);
        let mut all = rows.clone();
        all.extend(extra);
        let grown = build(n, &all);
        let key = |net: &MultiEdgeNetwork, i: usize| net.node_index(&i.to_string()).unwrap();
        let (w0, w1) = (shared_partners_weighted(&base), shared_partners_weighted(&grown));
        let (u0, u1) = (shared_partners_unweighted(&base), shared_partners_unweighted(&grown));
        for a in 0..n {
            for b in 0..n {
                prop_assert!(w1.get(key(&grown, a), key(&grown, b)) >= w0.get(key(&base, a), key(&base, b)));
                prop_assert!(u1.get(key(&grown, a), key(&grown, b)) >= u0.get(key(&base, a), key(&base, b)));
            }
        }
    }

    #[test]
    fn weighted_dominates_unweighted((n, rows) in rows_strategy()) {
        let net = build(n, &rows);
        let w = shared_partners_weighted(&net);
        let u = shared_partners_unweighted(&net);
        for (x, y) in w.values().iter().zip(u.values()) {
            prop_assert!(x >= y);
        }
    }
}
