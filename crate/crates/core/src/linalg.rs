//! Eigensolvers for tiny dense symmetric matrices.
//!
//! The block propagator diagonalizes one real symmetric 3x3 matrix per Fock
//! block, and the Rayleigh-Ritz step of the iterative Laplacian solver needs
//! the same on its (at most three-dimensional) trial space. Eigenvalues come
//! from the closed-form solution of the characteristic cubic and eigenvectors
//! from cross products of rows of `A - lambda*I`; both hand over to a cyclic
//! Jacobi sweep when the spectrum is nearly degenerate, where the closed form
//! loses orthogonality.

/// Eigen-decomposition of a real symmetric 3x3 matrix.
#[derive(Debug, Clone, Copy)]
pub struct Eigen3 {
    /// Eigenvalues in ascending order.
    pub values: [f64; 3],
    /// `vectors[k]` is the unit eigenvector paired with `values[k]`.
    pub vectors: [[f64; 3]; 3],
}

/// Relative spectral gap below which cross-product eigenvectors are not
/// trusted. The gap alone is not sufficient (see the residual checks in
/// `sym3_eigen`), but below this the closed form is hopeless.
const DEGENERATE_GAP: f64 = 1e-6;

/// Acceptable departure from orthonormality and from `A v = lambda v` for the
/// closed-form path; anything worse falls back to Jacobi.
const RESIDUAL_TOL: f64 = 1e-12;

/// Bound on the admissible mixing angle between eigenvectors of close
/// eigenvalues: a residual `r` on an eigenpair whose nearest spectral
/// neighbour is `gap` away corresponds to a rotation of up to `r / gap`
/// inside the near-degenerate pair, so the residual check must scale with
/// the gap or close pairs would pass with visibly skewed vectors.
const MIXING_TOL: f64 = 1e-10;

/// Largest absolute entry, used as the scale for all relative tolerances.
fn scale_of(a: &[[f64; 3]; 3]) -> f64 {
    let mut s = 0.0f64;
    for row in a {
        for &x in row {
            s = s.max(x.abs());
        }
    }
    s
}

/// Eigenvalues of a symmetric 3x3 matrix in ascending order, by the
/// trigonometric solution of the characteristic cubic.
fn closed_form_values(a: &[[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return [q, q, q];
    }
    let b = |i: usize, j: usize| (a[i][j] - if i == j { q } else { 0.0 }) / p;
    let det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
        - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
        + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    let r = (det_b / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let hi = q + 2.0 * p * phi.cos();
    let lo = q + 2.0 * p * (phi + 2.0 * std::f64::consts::FRAC_PI_3).cos();
    let mid = 3.0 * q - hi - lo;
    [lo, mid, hi]
}

fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]
}

fn dot(u: [f64; 3], v: [f64; 3]) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn normalized(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = dot(v, v).sqrt();
    (n > 0.0).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

/// Unit eigenvector for `lambda` as the largest cross product of two rows of
/// `A - lambda*I`; `None` when every pair of rows is (nearly) parallel.
fn cross_product_vector(a: &[[f64; 3]; 3], lambda: f64) -> Option<[f64; 3]> {
    let r = [
        [a[0][0] - lambda, a[0][1], a[0][2]],
        [a[0][1], a[1][1] - lambda, a[1][2]],
        [a[0][2], a[1][2], a[2][2] - lambda],
    ];
    let candidates = [cross(r[0], r[1]), cross(r[0], r[2]), cross(r[1], r[2])];
    let best = candidates
        .into_iter()
        .max_by(|u, v| dot(*u, *u).total_cmp(&dot(*v, *v)))?;
    normalized(best)
}

/// `v' A v` for unit `v`.
fn rayleigh_quotient(a: &[[f64; 3]; 3], v: [f64; 3]) -> f64 {
    let av = [
        a[0][0] * v[0] + a[0][1] * v[1] + a[0][2] * v[2],
        a[1][0] * v[0] + a[1][1] * v[1] + a[1][2] * v[2],
        a[2][0] * v[0] + a[2][1] * v[1] + a[2][2] * v[2],
    ];
    dot(v, av)
}

fn residual(a: &[[f64; 3]; 3], lambda: f64, v: [f64; 3]) -> f64 {
    let mut r = 0.0f64;
    for i in 0..3 {
        let avi = a[i][0] * v[0] + a[i][1] * v[1] + a[i][2] * v[2];
        r = r.max((avi - lambda * v[i]).abs());
    }
    r
}

/// Eigen-decomposition of a real symmetric 3x3 matrix (only the upper
/// triangle including the diagonal is read). Eigenvalues ascend; the
/// eigenvector basis is orthonormal to ~1e-12 relative accuracy.
pub fn sym3_eigen(a: &[[f64; 3]; 3]) -> Eigen3 {
    let a = symmetrized(a);
    let scale = scale_of(&a);
    if scale == 0.0 {
        return Eigen3 {
            values: [0.0; 3],
            vectors: identity(),
        };
    }
    if a[0][1] == 0.0 && a[0][2] == 0.0 && a[1][2] == 0.0 {
        // Already diagonal: sort the entries and permute the basis, exactly.
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
        let mut vectors = [[0.0; 3]; 3];
        for (k, &i) in order.iter().enumerate() {
            vectors[k][i] = 1.0;
        }
        return Eigen3 {
            values: [a[order[0]][order[0]], a[order[1]][order[1]], a[order[2]][order[2]]],
            vectors,
        };
    }

    let rough = closed_form_values(&a);
    let gap_ok = (rough[1] - rough[0]).min(rough[2] - rough[1]) > DEGENERATE_GAP * scale;
    if gap_ok {
        if let (Some(v_lo), Some(v_hi)) = (
            cross_product_vector(&a, rough[0]),
            cross_product_vector(&a, rough[2]),
        ) {
            if let Some(v_mid) = normalized(cross(v_hi, v_lo)) {
                let vectors = [v_lo, v_mid, v_hi];
                // Rayleigh-quotient polish: with an eigenvector accurate to
                // delta, the quotient is accurate to O(delta^2 / gap), which
                // takes the trigonometric roots down to rounding level. The
                // downstream phases e^{-i lambda t} amplify eigenvalue error
                // by t, so this matters at long times.
                let values = [
                    rayleigh_quotient(&a, v_lo),
                    rayleigh_quotient(&a, v_mid),
                    rayleigh_quotient(&a, v_hi),
                ];
                let gaps = [
                    values[1] - values[0],
                    (values[1] - values[0]).min(values[2] - values[1]),
                    values[2] - values[1],
                ];
                let sorted = values[0] <= values[1] && values[1] <= values[2];
                let ortho = dot(v_lo, v_hi).abs() <= RESIDUAL_TOL;
                let resid_ok = (0..3).all(|k| {
                    let tol = (RESIDUAL_TOL * scale).min(MIXING_TOL * gaps[k]);
                    residual(&a, values[k], vectors[k]) <= tol
                });
                if sorted && ortho && resid_ok {
                    return Eigen3 { values, vectors };
                }
            }
        }
    }
    jacobi3(&a)
}

fn identity() -> [[f64; 3]; 3] {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn symmetrized(a: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    [
        [a[0][0], a[0][1], a[0][2]],
        [a[0][1], a[1][1], a[1][2]],
        [a[0][2], a[1][2], a[2][2]],
    ]
}

/// Cyclic Jacobi diagonalization. Unconditionally stable on 3x3 input and
/// orthogonal by construction (the basis is a product of plane rotations).
fn jacobi3(a: &[[f64; 3]; 3]) -> Eigen3 {
    let mut m = *a;
    // v[i][k]: component i of eigenvector k (column-major accumulation).
    let mut v = identity();
    let scale = scale_of(a).max(f64::MIN_POSITIVE);
    for _ in 0..64 {
        let off = (m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2]).sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if m[p][q].abs() <= f64::MIN_POSITIVE {
                continue;
            }
            let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for i in 0..3 {
                let (mip, miq) = (m[i][p], m[i][q]);
                m[i][p] = c * mip - s * miq;
                m[i][q] = s * mip + c * miq;
            }
            for j in 0..3 {
                let (mpj, mqj) = (m[p][j], m[q][j]);
                m[p][j] = c * mpj - s * mqj;
                m[q][j] = s * mpj + c * mqj;
            }
            for i in 0..3 {
                let (vip, viq) = (v[i][p], v[i][q]);
                v[i][p] = c * vip - s * viq;
                v[i][q] = s * vip + c * viq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let values = [m[order[0]][order[0]], m[order[1]][order[1]], m[order[2]][order[2]]];
    let mut vectors = [[0.0; 3]; 3];
    for (k, &col) in order.iter().enumerate() {
        for i in 0..3 {
            vectors[k][i] = v[i][col];
        }
    }
    Eigen3 { values, vectors }
}

/// Eigen-decomposition of a real symmetric 2x2 matrix, ascending.
pub fn sym2_eigen(a: &[[f64; 2]; 2]) -> ([f64; 2], [[f64; 2]; 2]) {
    let (p, q, r) = (a[0][0], a[0][1], a[1][1]);
    if q == 0.0 {
        return if p <= r {
            ([p, r], [[1.0, 0.0], [0.0, 1.0]])
        } else {
            ([r, p], [[0.0, 1.0], [1.0, 0.0]])
        };
    }
    let half_tr = 0.5 * (p + r);
    let d = (0.25 * (p - r) * (p - r) + q * q).sqrt();
    let (lo, hi) = (half_tr - d, half_tr + d);
    // Eigenvector of the low eigenvalue from the better-conditioned row.
    let v_lo = if (p - lo).abs() > (r - lo).abs() {
        [q, lo - p]
    } else {
        [lo - r, q]
    };
    let n = (v_lo[0] * v_lo[0] + v_lo[1] * v_lo[1]).sqrt();
    let v_lo = [v_lo[0] / n, v_lo[1] / n];
    ([lo, hi], [v_lo, [-v_lo[1], v_lo[0]]])
}
