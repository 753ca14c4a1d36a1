//! Scalar measures of a recurrence network: average path length, link
//! density, clustering, transitivity, degree distribution, assortativity.
//!
//! Everything that can be counted is counted in integers (u64/u128) and only
//! divided at the end, so results are independent of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::recnet::RecurrenceNetwork;

/// Largest node count for which the average path length is computed from
/// every source; above it a fixed-seed sample of sources is used.
pub const APL_EXACT_LIMIT: usize = 5000;
/// Number of BFS sources in the sampled estimate.
pub const APL_SAMPLE_SOURCES: usize = 1000;
/// Seed of the source sampler, recorded in reports.
pub const APL_SAMPLE_SEED: u64 = 0x0a91_5eed;

/// Average shortest-path length with its estimation metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AplEstimate {
    pub value: f64,
    /// True when every node served as a BFS source.
    pub exact: bool,
    /// Number of sources actually used.
    pub sources: usize,
    /// Sampling seed (absent in exact mode).
    pub seed: Option<u64>,
}

/// All scalar measures of one network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub average_path_length: AplEstimate,
    pub link_density: f64,
    pub global_clustering: f64,
    pub transitivity: f64,
    /// Degree-degree Pearson correlation over edge ends; `None` when the
    /// degree variance over ends is zero (e.g. regular graphs).
    pub assortativity: Option<f64>,
    /// (degree, count) pairs, ascending by degree; counts sum to the node
    /// count.
    pub degree_histogram: Vec<(usize, usize)>,
    /// Per-node local clustering coefficients.
    pub local_clustering: Vec<f64>,
}

/// Per-node triangle data: `twice_triangles[i]` = 2 x (triangles through i).
struct TriangleCounts {
    twice_triangles: Vec<u64>,
}

/// Counts triangles once each using the degree-ordered orientation, then
/// credits all three corners. Thread-local integer accumulators are merged by
/// addition, so the result does not depend on work distribution.
fn count_triangles(net: &RecurrenceNetwork) -> TriangleCounts {
    let n = net.node_count();
    // Orientation key: (degree, index). Every edge points from the smaller
    // key to the larger, which bounds out-degrees and visits each triangle
    // exactly once, at its smallest-key corner pair.
    let key = |i: u32| (net.degree(i as usize), i);
    let out: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            net.neighbors(i)
                .iter()
                .copied()
                .filter(|&j| key(j) > key(i as u32))
                .collect()
        })
        .collect();

    let twice = (0..n)
        .into_par_iter()
        .fold(
            || vec![0u64; n],
            |mut acc, i| {
                for &j in &out[i] {
                    // Sorted-merge intersection of out[i] and out[j].
                    let (a, b) = (&out[i], &out[j as usize]);
                    let (mut p, mut q) = (0, 0);
                    while p < a.len() && q < b.len() {
                        match a[p].cmp(&b[q]) {
                            std::cmp::Ordering::Less => p += 1,
                            std::cmp::Ordering::Greater => q += 1,
                            std::cmp::Ordering::Equal => {
                                let k = a[p];
                                acc[i] += 2;
                                acc[j as usize] += 2;
                                acc[k as usize] += 2;
                                p += 1;
                                q += 1;
                            }
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    TriangleCounts {
        twice_triangles: twice,
    }
}

/// Local clustering coefficient of every node: the fraction of neighbor
/// pairs that are themselves linked; 0 when the degree is at most 1.
pub fn local_clustering_profile(net: &RecurrenceNetwork) -> Vec<f64> {
    let tri = count_triangles(net);
    (0..net.node_count())
        .map(|i| {
            let k = net.degree(i) as u64;
            if k <= 1 {
                0.0
            } else {
                tri.twice_triangles[i] as f64 / (k * (k - 1)) as f64
            }
        })
        .collect()
}

/// Local clustering coefficient of a single node (direct enumeration).
pub fn local_clustering(net: &RecurrenceNetwork, i: usize) -> f64 {
    let nbrs = net.neighbors(i);
    let k = nbrs.len();
    if k <= 1 {
        return 0.0;
    }
    let mut linked = 0u64;
    for (a, &j) in nbrs.iter().enumerate() {
        for &l in &nbrs[a + 1..] {
            if net.has_edge(j as usize, l as usize) {
                linked += 1;
            }
        }
    }
    (2 * linked) as f64 / (k * (k - 1)) as f64
}

/// Mean of the local clustering coefficients over all nodes.
pub fn global_clustering(net: &RecurrenceNetwork) -> f64 {
    let profile = local_clustering_profile(net);
    if profile.is_empty() {
        return 0.0;
    }
    profile.iter().sum::<f64>() / profile.len() as f64
}

/// Transitivity: 3 x (triangle count) / (connected triples), i.e. the
/// triangle density among length-2 paths. 0 when the graph has no triples.
pub fn transitivity(net: &RecurrenceNetwork) -> f64 {
    let tri = count_triangles(net);
    let six_triangles: u64 = tri.twice_triangles.iter().sum();
    let ordered_triples: u64 = (0..net.node_count())
        .map(|i| {
            let k = net.degree(i) as u64;
            k * k.saturating_sub(1)
        })
        .sum();
    if ordered_triples == 0 {
        0.0
    } else {
        six_triangles as f64 / ordered_triples as f64
    }
}

/// Link density: sum of degrees over P(P-1), the filled fraction of the
/// off-diagonal adjacency. 0 for graphs with fewer than two nodes.
pub fn link_density(net: &RecurrenceNetwork) -> f64 {
    let p = net.node_count() as u64;
    if p < 2 {
        return 0.0;
    }
    (2 * net.edge_count() as u64) as f64 / (p * (p - 1)) as f64
}

/// Degree histogram as ascending (degree, count) pairs.
pub fn degree_histogram(net: &RecurrenceNetwork) -> Vec<(usize, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for i in 0..net.node_count() {
        *counts.entry(net.degree(i)).or_insert(0usize) += 1;
    }
    counts.into_iter().collect()
}

/// Degree-degree Pearson correlation over the ends of every edge, or `None`
/// when the end-degree variance vanishes. Sums are exact integers.
pub fn assortativity(net: &RecurrenceNetwork) -> Option<f64> {
    let mut ends = 0u128; // 2E
    let mut sum_x = 0u128; // sum of end degrees
    let mut sum_x2 = 0u128; // sum of squared end degrees
    let mut sum_xy = 0u128; // sum over ends of deg(i)*deg(j)
    for (i, j) in net.edges() {
        let (ki, kj) = (net.degree(i as usize) as u128, net.degree(j as usize) as u128);
        ends += 2;
        sum_x += ki + kj;
        sum_x2 += ki * ki + kj * kj;
        sum_xy += 2 * ki * kj;
    }
    if ends == 0 {
        return None;
    }
    // r = (M*Sxy - Sx^2) / (M*Sx2 - Sx^2) with M = 2E; both sides exact.
    let m_sxy = ends * sum_xy;
    let m_sx2 = ends * sum_x2;
    let sx_sq = sum_x * sum_x;
    let den = m_sx2 as i128 - sx_sq as i128;
    if den == 0 {
        return None;
    }
    let num = m_sxy as i128 - sx_sq as i128;
    Some(num as f64 / den as f64)
}

fn bfs_distance_sum(net: &RecurrenceNetwork, source: u32) -> Result<u64> {
    let n = net.node_count();
    let mut dist = vec![u32::MAX; n];
    let mut queue = std::collections::VecDeque::from([source]);
    dist[source as usize] = 0;
    let mut total = 0u64;
    let mut reached = 1usize;
    while let Some(i) = queue.pop_front() {
        let d = dist[i as usize];
        for &j in net.neighbors(i as usize) {
            if dist[j as usize] == u32::MAX {
                dist[j as usize] = d + 1;
                total += (d + 1) as u64;
                reached += 1;
                queue.push_back(j);
            }
        }
    }
    if reached < n {
        return Err(Error::Disconnected { reached, nodes: n });
    }
    Ok(total)
}

/// Average shortest-path length over ordered pairs i != j, by unweighted
/// BFS. Exact up to [`APL_EXACT_LIMIT`] nodes; beyond that, estimated from
/// [`APL_SAMPLE_SOURCES`] uniformly sampled sources (seed recorded).
/// Fails on disconnected graphs.
pub fn average_path_length(net: &RecurrenceNetwork) -> Result<AplEstimate> {
    average_path_length_with(net, APL_EXACT_LIMIT, APL_SAMPLE_SOURCES, APL_SAMPLE_SEED)
}

/// As [`average_path_length`] with explicit mode thresholds (for tests and
/// forced-exact acceptance runs).
pub fn average_path_length_with(
    net: &RecurrenceNetwork,
    exact_limit: usize,
    sample_sources: usize,
    seed: u64,
) -> Result<AplEstimate> {
    let n = net.node_count();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "average path length needs at least two nodes, got {n}"
        )));
    }
    if n <= exact_limit {
        let sums: Result<Vec<u64>> = (0..n as u32)
            .into_par_iter()
            .map(|s| bfs_distance_sum(net, s))
            .collect();
        let total: u64 = sums?.iter().sum();
        let pairs = (n as u64) * (n as u64 - 1);
        return Ok(AplEstimate {
            value: total as f64 / pairs as f64,
            exact: true,
            sources: n,
            seed: None,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sources = rand::seq::index::sample(&mut rng, n, sample_sources.min(n)).into_vec();
    sources.sort_unstable();
    let sums: Result<Vec<u64>> = sources
        .par_iter()
        .map(|&s| bfs_distance_sum(net, s as u32))
        .collect();
    let per_source: f64 = sums?
        .iter()
        .map(|&t| t as f64 / (n as f64 - 1.0))
        .sum::<f64>();
    Ok(AplEstimate {
        value: per_source / sources.len() as f64,
        exact: false,
        sources: sources.len(),
        seed: Some(seed),
    })
}

/// Assembles the full report. Fails only where the average path length does
/// (disconnected input).
pub fn metrics_report(net: &RecurrenceNetwork) -> Result<MetricsReport> {
    let apl = average_path_length(net)?;
    let local = local_clustering_profile(net);
    let global = if local.is_empty() {
        0.0
    } else {
        local.iter().sum::<f64>() / local.len() as f64
    };
    Ok(MetricsReport {
        node_count: net.node_count(),
        edge_count: net.edge_count(),
        average_path_length: apl,
        link_density: link_density(net),
        global_clustering: global,
        transitivity: transitivity(net),
        assortativity: assortativity(net),
        degree_histogram: degree_histogram(net),
        local_clustering: local,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn net(n: usize, edges: &[(u32, u32)]) -> RecurrenceNetwork {
        RecurrenceNetwork::from_edges(n, edges).unwrap()
    }

    fn complete(n: u32) -> RecurrenceNetwork {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        net(n as usize, &edges)
    }

    fn random_graph(n: u32, p: f64, seed: u64) -> RecurrenceNetwork {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((i, j));
                }
            }
        }
        net(n as usize, &edges)
    }

    /// O(P^3) triangle reference.
    fn brute_twice_triangles(g: &RecurrenceNetwork) -> Vec<u64> {
        let n = g.node_count();
        let mut twice = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i != j && j != k && i != k && g.has_edge(i, j) && g.has_edge(j, k) && g.has_edge(i, k)
                    {
                        twice[i] += 1; // ordered (j,k) pairs: counts each twice
                    }
                }
            }
        }
        twice
    }

    #[test]
    fn star_measures() {
        let star = net(4, &[(0, 1), (0, 2), (0, 3)]);
        let apl = average_path_length(&star).unwrap();
        assert!(apl.exact);
        assert!((apl.value - 1.5).abs() < 1e-15);
        assert!((link_density(&star) - 0.5).abs() < 1e-15);
        assert_eq!(global_clustering(&star), 0.0);
        assert_eq!(transitivity(&star), 0.0);
        assert_eq!(assortativity(&star), Some(-1.0));
        assert_eq!(degree_histogram(&star), vec![(1, 3), (3, 1)]);
    }

    #[test]
    fn path_of_three_apl() {
        let path = net(3, &[(0, 1), (1, 2)]);
        let apl = average_path_length(&path).unwrap().value;
        assert!((apl - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(local_clustering(&path, 1), 0.0);
    }

    #[test]
    fn complete_graph_measures() {
        let k5 = complete(5);
        let report = metrics_report(&k5).unwrap();
        assert!((report.average_path_length.value - 1.0).abs() < 1e-15);
        assert!((report.link_density - 1.0).abs() < 1e-15);
        assert!((report.global_clustering - 1.0).abs() < 1e-15);
        assert!((report.transitivity - 1.0).abs() < 1e-15);
        assert_eq!(report.assortativity, None);
        assert_eq!(report.degree_histogram, vec![(4, 5)]);
    }

    #[test]
    fn triangle_is_fully_clustered() {
        let tri = net(3, &[(0, 1), (0, 2), (1, 2)]);
        for i in 0..3 {
            assert_eq!(local_clustering(&tri, i), 1.0);
        }
        assert_eq!(transitivity(&tri), 1.0);
        assert_eq!(global_clustering(&tri), 1.0);
    }

    #[test]
    fn trees_have_no_triangles() {
        // Random spanning-tree-ish: attach node i to a random earlier node.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let n = rng.gen_range(2..60u32);
            let edges: Vec<(u32, u32)> =
                (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
            let tree = net(n as usize, &edges);
            assert_eq!(global_clustering(&tree), 0.0);
            assert_eq!(transitivity(&tree), 0.0);
        }
    }

    #[test]
    fn clustering_equals_transitivity_on_vertex_transitive_graphs() {
        // Circulant graph C12(1,2): 4-regular, every node in 3 triangles.
        let n = 12u32;
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((i.min((i + 1) % n), i.max((i + 1) % n)));
            edges.push((i.min((i + 2) % n), i.max((i + 2) % n)));
        }
        edges.sort_unstable();
        edges.dedup();
        let g = net(n as usize, &edges);
        let cc = global_clustering(&g);
        let t = transitivity(&g);
        assert!((cc - 0.5).abs() < 1e-15);
        assert_eq!(cc, t);
        // Complete graph and cycle as further regular cases.
        assert_eq!(global_clustering(&complete(6)), transitivity(&complete(6)));
        let cyc: Vec<(u32, u32)> = (0..8).map(|i| (i.min((i + 1) % 8), i.max((i + 1) % 8))).collect();
        let cyc = net(8, &cyc);
        assert_eq!(global_clustering(&cyc), transitivity(&cyc));
        assert_eq!(transitivity(&cyc), 0.0);
    }

    #[test]
    fn triangle_engine_matches_brute_force() {
        for seed in 0..8 {
            let g = random_graph(100, 0.08, seed);
            let fast = count_triangles(&g).twice_triangles;
            assert_eq!(fast, brute_twice_triangles(&g), "seed {seed}");
            // Per-node profile consistent with the direct per-node routine.
            let profile = local_clustering_profile(&g);
            for i in 0..g.node_count() {
                assert!((profile[i] - local_clustering(&g, i)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn assortativity_matches_covariance_oracle() {
        for seed in 100..108 {
            let g = random_graph(100, 0.06, seed);
            if g.edge_count() == 0 {
                continue;
            }
            // Direct f64 covariance over edge-end degree pairs.
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for (i, j) in g.edges() {
                let (ki, kj) = (g.degree(i as usize) as f64, g.degree(j as usize) as f64);
                xs.extend([ki, kj]);
                ys.extend([kj, ki]);
            }
            let m = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / m;
            let my = ys.iter().sum::<f64>() / m;
            let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let vx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            let vy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
            let oracle = cov / (vx.sqrt() * vy.sqrt());
            let got = assortativity(&g).unwrap();
            assert!((got - oracle).abs() < 1e-12, "seed {seed}: {got} vs {oracle}");
        }
    }

    #[test]
    fn apl_sampling_close_to_exact_and_deterministic() {
        let g = random_graph(1200, 0.01, 7);
        let exact = average_path_length_with(&g, usize::MAX, 0, 0).unwrap();
        assert!(exact.exact);
        let sampled = average_path_length_with(&g, 100, 400, APL_SAMPLE_SEED).unwrap();
        assert!(!sampled.exact);
        assert_eq!(sampled.sources, 400);
        assert_eq!(sampled.seed, Some(APL_SAMPLE_SEED));
        let rel = (sampled.value - exact.value).abs() / exact.value;
        assert!(rel < 0.05, "sampled {} exact {}", sampled.value, exact.value);
        let again = average_path_length_with(&g, 100, 400, APL_SAMPLE_SEED).unwrap();
        assert_eq!(sampled, again);
    }

    #[test]
    fn apl_errors_on_disconnected_input() {
        let g = net(4, &[(0, 1), (2, 3)]);
        match average_path_length(&g) {
            Err(Error::Disconnected { reached, nodes }) => {
                assert_eq!((reached, nodes), (2, 4));
            }
            other => panic!("expected disconnected error, got {other:?}"),
        }
    }

    #[test]
    fn adding_edges_never_increases_apl() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let mut g = random_graph(60, 0.08, 3);
        // Make sure it starts connected: chain all nodes.
        let mut edges: Vec<(u32, u32)> = g.edges().collect();
        for i in 0..59u32 {
            edges.push((i, i + 1));
        }
        edges.sort_unstable();
        edges.dedup();
        g = net(60, &edges);
        let mut last = average_path_length(&g).unwrap().value;
        for _ in 0..20 {
            let i = rng.gen_range(0..60u32);
            let j = rng.gen_range(0..60u32);
            if i == j {
                continue;
            }
            let (a, b) = (i.min(j), i.max(j));
            if g.has_edge(a as usize, b as usize) {
                continue;
            }
            let mut edges: Vec<(u32, u32)> = g.edges().collect();
            edges.push((a, b));
            g = net(60, &edges);
            let apl = average_path_length(&g).unwrap().value;
            assert!(apl <= last + 1e-12);
            last = apl;
        }
    }

    #[test]
    fn histogram_counts_sum_to_node_count() {
        let g = random_graph(150, 0.04, 9);
        let hist = degree_histogram(&g);
        assert_eq!(hist.iter().map(|&(_, c)| c).sum::<usize>(), 150);
        // Counts agree with direct row sums.
        for &(degree, count) in &hist {
            let direct = (0..150).filter(|&i| g.degree(i) == degree).count();
            assert_eq!(direct, count);
        }
    }

    #[test]
    fn broad_brute_force_agreement_on_many_random_graphs() {
        // Moderate-size version of the oracle sweep that the acceptance
        // suite runs at full scale.
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for case in 0..60 {
            let n = rng.gen_range(5..60u32);
            let p = rng.gen_range(0.05..0.6);
            let g = random_graph(n, p, 5000 + case);
            let fast = count_triangles(&g).twice_triangles;
            assert_eq!(fast, brute_twice_triangles(&g));
            assert!(link_density(&g) >= 0.0 && link_density(&g) <= 1.0);
            let t = transitivity(&g);
            assert!((0.0..=1.0).contains(&t));
            for c in local_clustering_profile(&g) {
                assert!((0.0..=1.0).contains(&c));
            }
        }
    }
}
