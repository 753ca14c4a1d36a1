//! Algebraic connectivity: the second-smallest eigenvalue of the graph
//! Laplacian L = D - A, computed matrix-free.
//!
//! A locally optimal block preconditioned CG iteration (single vector) runs
//! on the orthogonal complement of the constant vector, which deflates the
//! trivial zero eigenvalue. Each step does a Rayleigh-Ritz solve on
//! span{x, preconditioned residual, previous iterate} using the closed-form
//! symmetric 3x3 eigensolver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{sym2_eigen, sym3_eigen};

use super::network::RecurrenceNetwork;

const SEED: u64 = 0x5eed_a1c0_77e5_u64;
const MAX_ITER: usize = 10_000;
/// Residual tolerance relative to the Gershgorin bound on the spectrum.
const RESIDUAL_TOL: f64 = 1e-10;

/// Outcome of the algebraic-connectivity solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraicConnectivity {
    /// Second-smallest Laplacian eigenvalue, clamped to be non-negative.
    pub value: f64,
    /// False when the iteration cap was reached before the residual
    /// tolerance; the value is then a best estimate.
    pub converged: bool,
    pub iterations: usize,
}

/// Second-smallest eigenvalue of the Laplacian of `net`.
///
/// Zero (within solver tolerance) exactly when the network is disconnected.
/// Precondition: at least two nodes.
pub fn laplacian_l2(net: &RecurrenceNetwork) -> f64 {
    laplacian_l2_detailed(net).value
}

/// As [`laplacian_l2`], exposing convergence diagnostics.
pub fn laplacian_l2_detailed(net: &RecurrenceNetwork) -> AlgebraicConnectivity {
    let n = net.node_count();
    assert!(n >= 2, "algebraic connectivity needs at least two nodes");

    let max_degree = (0..n).map(|i| net.degree(i)).max().unwrap_or(0);
    if max_degree == 0 {
        // No edges at all: L = 0, every eigenvalue is zero.
        return AlgebraicConnectivity {
            value: 0.0,
            converged: true,
            iterations: 0,
        };
    }
    // Gershgorin: all Laplacian eigenvalues lie in [0, 2 * max degree].
    let scale = 2.0 * max_degree as f64;
    let tol = RESIDUAL_TOL * scale;

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    project_and_normalize(&mut x);

    let mut prev: Option<Vec<f64>> = None;
    let mut theta = 0.0;
    let mut converged = false;
    let mut iterations = 0;

    for iter in 0..MAX_ITER {
        iterations = iter + 1;
        let lx = apply_laplacian(net, &x);
        theta = dot(&x, &lx);
        let r: Vec<f64> = (0..n).map(|i| lx[i] - theta * x[i]).collect();
        if norm(&r) <= tol {
            converged = true;
            break;
        }
        // Jacobi preconditioner, re-projected onto the deflation complement.
        let mut w: Vec<f64> = (0..n)
            .map(|i| r[i] / (net.degree(i) as f64 + 1.0))
            .collect();
        project_and_normalize(&mut w);

        // Orthonormal Rayleigh-Ritz basis: x, then w and the previous
        // iterate with components along earlier vectors removed.
        let mut basis: Vec<Vec<f64>> = vec![x.clone()];
        for cand in [Some(w), prev.clone()].into_iter().flatten() {
            if let Some(v) = orthonormal_against(&basis, cand) {
                basis.push(v);
            }
        }
        let images: Vec<Vec<f64>> = basis.iter().map(|v| apply_laplacian(net, v)).collect();
        let coeffs = smallest_ritz(&basis, &images);

        let mut next = vec![0.0; n];
        for (c, v) in coeffs.iter().zip(&basis) {
            for (slot, &vi) in next.iter_mut().zip(v) {
                *slot += c * vi;
            }
        }
        project_and_normalize(&mut next);
        prev = Some(std::mem::replace(&mut x, next));
    }

    AlgebraicConnectivity {
        value: theta.max(0.0),
        converged,
        iterations,
    }
}

/// y = L x = D x - A x, each row summed over the sorted neighbor list.
fn apply_laplacian(net: &RecurrenceNetwork, x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = net.degree(i) as f64 * x[i];
            for &j in net.neighbors(i) {
                acc -= x[j as usize];
            }
            acc
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Removes the mean (deflating the constant eigenvector) and normalizes.
fn project_and_normalize(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for vi in v.iter_mut() {
        *vi -= mean;
    }
    let len = norm(v);
    if len > 0.0 {
        for vi in v.iter_mut() {
            *vi /= len;
        }
    }
}

/// Gram-Schmidt step: returns the unit component of `cand` orthogonal to
/// every basis vector, or None when it is numerically dependent.
fn orthonormal_against(basis: &[Vec<f64>], mut cand: Vec<f64>) -> Option<Vec<f64>> {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, &cand);
            for (slot, &bi) in cand.iter_mut().zip(b) {
                *slot -= c * bi;
            }
        }
    }
    let len = norm(&cand);
    if len < 1e-10 {
        return None;
    }
    for v in cand.iter_mut() {
        *v /= len;
    }
    Some(cand)
}

/// Coefficients of the smallest Ritz pair of L on the (orthonormal) basis.
fn smallest_ritz(basis: &[Vec<f64>], images: &[Vec<f64>]) -> Vec<f64> {
    match basis.len() {
        1 => vec![1.0],
        2 => {
            let g = [
                [dot(&basis[0], &images[0]), dot(&basis[0], &images[1])],
                [dot(&basis[0], &images[1]), dot(&basis[1], &images[1])],
            ];
            let (_, vectors) = sym2_eigen(&g);
            vectors[0].to_vec()
        }
        3 => {
            let mut g = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in i..3 {
                    let v = dot(&basis[i], &images[j]);
                    g[i][j] = v;
                    g[j][i] = v;
                }
            }
            let eig = sym3_eigen(&g);
            eig.vectors[0].to_vec()
        }
        _ => unreachable!("basis never exceeds three vectors"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recnet::network::is_connected;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn net(n: usize, edges: &[(u32, u32)]) -> RecurrenceNetwork {
        RecurrenceNetwork::from_edges(n, edges).unwrap()
    }

    /// Dense full-spectrum reference for the second-smallest eigenvalue.
    fn dense_l2(g: &RecurrenceNetwork) -> f64 {
        let n = g.node_count();
        let mut l = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            l[(i, i)] = g.degree(i) as f64;
            for &j in g.neighbors(i) {
                l[(i, j as usize)] = -1.0;
            }
        }
        let mut eigs: Vec<f64> = l.symmetric_eigenvalues().iter().copied().collect();
        eigs.sort_by(f64::total_cmp);
        eigs[1]
    }

    #[test]
    fn two_node_path_has_l2_of_two() {
        let g = net(2, &[(0, 1)]);
        let out = laplacian_l2_detailed(&g);
        assert!(out.converged);
        assert!((out.value - 2.0).abs() < 1e-9, "got {}", out.value);
    }

    #[test]
    fn two_disjoint_edges_have_zero_l2() {
        let g = net(4, &[(0, 1), (2, 3)]);
        let out = laplacian_l2_detailed(&g);
        assert!(out.converged);
        assert!(out.value.abs() < 1e-8, "got {}", out.value);
    }

    #[test]
    fn edgeless_graph_is_all_zero() {
        let g = net(3, &[]);
        assert_eq!(laplacian_l2(&g), 0.0);
    }

    #[test]
    fn complete_graph_l2_equals_node_count() {
        // K_n has Laplacian spectrum {0, n, ..., n}.
        let n = 7u32;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        let g = net(n as usize, &edges);
        assert!((laplacian_l2(&g) - n as f64).abs() < 1e-8);
    }

    #[test]
    fn path_graph_matches_closed_form() {
        // Path on n nodes: l2 = 2(1 - cos(pi/n)) = 4 sin^2(pi/(2n)).
        let n = 12usize;
        let edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|i| (i, i + 1)).collect();
        let g = net(n, &edges);
        let expect = 2.0 * (1.0 - (std::f64::consts::PI / n as f64).cos());
        assert!((laplacian_l2(&g) - expect).abs() < 1e-8);
    }

    #[test]
    fn random_graph_matches_dense_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 50usize;
        let mut edges = Vec::new();
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                if rng.gen::<f64>() < 0.08 {
                    edges.push((i, j));
                }
            }
        }
        let g = net(n, &edges);
        let out = laplacian_l2_detailed(&g);
        assert!(out.converged);
        assert!(
            (out.value - dense_l2(&g)).abs() < 1e-6,
            "iterative {} dense {}",
            out.value,
            dense_l2(&g)
        );
    }

    #[test]
    fn sign_of_l2_matches_connectivity_on_many_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(404);
        for case in 0..500 {
            let n = rng.gen_range(4..28usize);
            let p = rng.gen_range(0.02..0.5);
            let mut edges = Vec::new();
            for i in 0..n as u32 {
                for j in (i + 1)..n as u32 {
                    if rng.gen::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            let g = net(n, &edges);
            let l2 = laplacian_l2(&g);
            let connected = is_connected(&g);
            if connected {
                // Connected graphs on <= 28 nodes have l2 >= 4 sin^2(pi/(2n)).
                assert!(l2 > 1e-4, "case {case}: connected but l2 = {l2}");
            } else {
                assert!(l2 < 1e-6, "case {case}: disconnected but l2 = {l2}");
            }
        }
    }
}
