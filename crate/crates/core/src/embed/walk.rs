// SPDX-License-Identifier: Apache-2.0

//! Second-order biased random walks.
//!
//! From current node `v` reached via `t`, a neighbor `x` of `v` is chosen
//! with unnormalized weight `1/p` if `x == t`, `1` if `x` is also adjacent
//! to `t`, and `1/q` otherwise. The first step of every walk is uniform.

use rand::Rng;
use rayon::prelude::*;

use super::{EmbedError, WalkConfig};
use crate::graph::CircuitGraph;
use crate::seed;

/// `walks_per_node * N` walks, ordered round-major: walk `k` starts at node
/// `k % N` in round `k / N`.
pub fn generate_walks(g: &CircuitGraph, cfg: &WalkConfig) -> Result<Vec<Vec<usize>>, EmbedError> {
    cfg.validate()?;
    if g.is_empty() {
        return Err(EmbedError::EmptyGraph);
    }
    let adj = g.undirected_neighbors();
    let n = adj.len();
    let total = cfg.walks_per_node * n;
    Ok((0..total)
        .into_par_iter()
        .map(|k| {
            let (round, start) = (k / n, k % n);
            let mut rng = seed::derived_rng(cfg.seed, &[start as u64, round as u64]);
            walk_from(&adj, start, cfg, &mut rng)
        })
        .collect())
}

fn walk_from(adj: &[Vec<usize>], start: usize, cfg: &WalkConfig, rng: &mut impl Rng) -> Vec<usize> {
    let mut walk = Vec::with_capacity(cfg.walk_length);
    walk.push(start);
    if adj[start].is_empty() {
        return walk;
    }
    let (inv_p, inv_q) = (1.0 / cfg.p, 1.0 / cfg.q);
    let mut weights = Vec::new();
    while walk.len() < cfg.walk_length {
        let cur = *walk.last().unwrap();
        let nbrs = &adj[cur];
        let next = if walk.len() == 1 {
            nbrs[rng.random_range(0..nbrs.len())]
        } else {
            let prev = walk[walk.len() - 2];
            weights.clear();
            weights.extend(nbrs.iter().map(|&x| {
                if x == prev {
                    inv_p
                } else if adj[prev].binary_search(&x).is_ok() {
                    1.0
                } else {
                    inv_q
                }
            }));
            nbrs[sample_categorical(&weights, rng)]
        };
        walk.push(next);
    }
    walk
}

fn sample_categorical(weights: &[f64], rng: &mut impl Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Node, NodeKind};
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    fn graph(n: usize, edges: &[(usize, usize)]) -> CircuitGraph {
        CircuitGraph {
            nodes: (0..n)
                .map(|i| Node {
                    name: format!("n{i}"),
                    kind: NodeKind::Gate,
                })
                .collect(),
            edges: edges.to_vec(),
        }
    }

    fn cfg(walks: usize, len: usize) -> WalkConfig {
        WalkConfig {
            walks_per_node: walks,
            walk_length: len,
            ..WalkConfig::default()
        }
    }

    #[test]
    fn isolated_node_walks() {
        let walks = generate_walks(&graph(1, &[]), &cfg(3, 40)).unwrap();
        assert_eq!(walks, vec![vec![0]; 3]);
    }

    #[test]
    fn forced_path() {
        let walks = generate_walks(&graph(2, &[(0, 1)]), &cfg(5, 3)).unwrap();
        for w in walks.iter().filter(|w| w[0] == 0) {
            assert_eq!(w, &[0, 1, 0]);
        }
        assert_eq!(walks.len(), 10);
    }

    #[test]
    fn empty_graph_and_bad_config() {
        assert_eq!(generate_walks(&graph(0, &[]), &cfg(1, 1)), Err(EmbedError::EmptyGraph));
        let bad = WalkConfig {
            q: 0.0,
            ..WalkConfig::default()
        };
        assert!(matches!(generate_walks(&graph(1, &[]), &bad), Err(EmbedError::InvalidConfig(_))));
    }

    #[test]
    fn star_first_step_uniform() {
        let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let walks = generate_walks(&g, &cfg(10_000, 2)).unwrap();
        let mut counts = [0usize; 5];
        for w in walks.iter().filter(|w| w[0] == 0) {
            counts[w[1]] += 1;
        }
        for leaf in 1..5 {
            let f = counts[leaf] as f64 / 10_000.0;
            assert!((0.23..=0.27).contains(&f), "leaf {leaf}: {f}");
        }
    }

    #[test]
    fn first_step_chi_square_on_irregular_graph() {
        // node 0 has 6 neighbors, node 7 has 3
        let g = graph(10, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (7, 8), (7, 9), (7, 1), (2, 3)]);
        let adj = g.undirected_neighbors();
        let walks = generate_walks(&g, &cfg(12_000, 2)).unwrap();
        for start in [0usize, 7] {
            let nbrs = &adj[start];
            let mut counts = vec![0f64; nbrs.len()];
            for w in walks.iter().filter(|w| w[0] == start) {
                counts[nbrs.binary_search(&w[1]).unwrap()] += 1.0;
            }
            let expected = 12_000.0 / nbrs.len() as f64;
            let stat: f64 = counts.iter().map(|c| (c - expected).powi(2) / expected).sum();
            let dist = ChiSquared::new((nbrs.len() - 1) as f64).unwrap();
            let p_value = 1.0 - dist.cdf(stat);
            assert!(p_value > 0.001, "start {start}: chi2 {stat}, p {p_value}");
        }
    }

    #[test]
    fn walks_follow_edges_and_are_deterministic() {
        let g = graph(8, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6), (6, 4)]);
        let c = WalkConfig {
            p: 0.5,
            q: 2.0,
            ..WalkConfig::default()
        };
        let walks = generate_walks(&g, &c).unwrap();
        assert_eq!(walks.len(), 10 * 8);
        let adj = g.undirected_neighbors();
        for (k, w) in walks.iter().enumerate() {
            assert_eq!(w[0], k % 8);
            if adj[w[0]].is_empty() {
                assert_eq!(w.len(), 1);
                continue;
            }
            assert_eq!(w.len(), c.walk_length);
            assert!(w.windows(2).all(|p| adj[p[0]].binary_search(&p[1]).is_ok()));
        }
        assert_eq!(walks, generate_walks(&g, &c).unwrap());
    }

    #[test]
    fn return_bias_changes_distribution() {
        // path 0-1-2: from 1 after arriving from 0, weight 1/p for 0 and 1/q for 2
        let g = graph(3, &[(0, 1), (1, 2)]);
        let c = WalkConfig {
            walks_per_node: 20_000,
            walk_length: 3,
            p: 0.25,
            q: 1.0,
            seed: 3,
        };
        let walks = generate_walks(&g, &c).unwrap();
        let back = walks.iter().filter(|w| w[0] == 0 && w[2] == 0).count() as f64 / 20_000.0;
        // 4 : 1 odds -> 0.8
        assert!((back - 0.8).abs() < 0.02, "{back}");
    }
}
