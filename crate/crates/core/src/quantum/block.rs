//! Invariant-subspace Hamiltonian blocks and their exact propagators.

use serde::{Deserialize, Serialize};

use super::params::{InitialState, ModelParams};
use crate::linalg::{sym3_eigen, Eigen3};

/// One invariant subspace of the full Hamiltonian.
///
/// The charges `C1 = N1 + sigma22 + sigma33` and `C2 = N2 - sigma22` commute
/// with `H`, so for `n >= 1` the basis `{|1,n,m>, |3,n-1,m>, |2,n-1,m+1>}`
/// (charge values `C1 = n`, `C2 = m`) is closed under the dynamics. With
/// energies measured from the middle state at zero detuning, the block matrix
/// is real, symmetric and tridiagonal:
///
/// ```text
/// [ 2 chi (n-1)   c13          0     ]
/// [ c13           0            c23   ]      c13 = lambda sqrt(n (1 + kappa n))
/// [ 0             c23          2 chi m ]    c23 = lambda sqrt(m + 1)
/// ```
///
/// For `n = 0` the subspace is the bare state `|1,0,m>`, which only acquires
/// a phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockHamiltonian {
    /// Total excitation of field 1 in the block (`C1` charge).
    pub n: usize,
    /// `C2` charge (field-2 photons seen from atom level 1).
    pub m: usize,
    /// Poisson weight `p(n,m) = e^{-2mu} mu^{n+m} / (n! m!)` of the block in
    /// the double-coherent initial state.
    pub weight: f64,
    /// Diagonal `(2 chi (n-1), 0, 2 chi m)`.
    pub diag: [f64; 3],
    /// Coupling between atom levels 1 and 3, `lambda sqrt(n (1 + kappa n))`.
    pub coupling13: f64,
    /// Coupling between atom levels 3 and 2, `lambda sqrt(m + 1)`.
    pub coupling23: f64,
    /// 3 for `n >= 1`, 1 for the decoupled `n = 0` sector.
    pub dim: usize,
}

/// Builds the `(n, m)` block for the given couplings and initial intensity.
pub fn build_block(
    n: usize,
    m: usize,
    params: &ModelParams,
    init: &InitialState,
) -> BlockHamiltonian {
    let mu = init.alpha_sq;
    let mut weight = (-2.0 * mu).exp();
    for i in 1..=n {
        weight *= mu / i as f64;
    }
    for j in 1..=m {
        weight *= mu / j as f64;
    }
    if n == 0 {
        return BlockHamiltonian {
            n,
            m,
            weight,
            diag: [0.0; 3],
            coupling13: 0.0,
            coupling23: 0.0,
            dim: 1,
        };
    }
    let nf = n as f64;
    let mf = m as f64;
    BlockHamiltonian {
        n,
        m,
        weight,
        diag: [2.0 * params.chi * (nf - 1.0), 0.0, 2.0 * params.chi * mf],
        coupling13: params.lambda * (nf * (1.0 + params.kappa * nf)).sqrt(),
        coupling23: params.lambda * (mf + 1.0).sqrt(),
        dim: 3,
    }
}

/// Complex amplitude stored as explicit real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub re: f64,
    pub im: f64,
}

impl Amplitude {
    pub fn norm_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

/// Exact propagator of one block: the eigen-decomposition is taken once, and
/// the state at any `t` is evaluated directly (never stepped), so every
/// sample is independent of the time grid it is requested on.
#[derive(Debug, Clone)]
pub struct BlockPropagator {
    /// Eigenvalues of the block matrix.
    frequencies: [f64; 3],
    /// `coeff[j][k] = V_k[j] * V_k[0]`: the amplitude on basis state `j` is
    /// `A_j(t) = sum_k coeff[j][k] e^{-i freq_k t}` for the `(1,0,0)` start.
    coeff: [[f64; 3]; 3],
    /// Degenerate `n = 0` sector: the state never leaves `|1,0,m>`.
    trivial: bool,
}

impl BlockPropagator {
    pub fn new(block: &BlockHamiltonian) -> Self {
        if block.dim == 1 {
            return Self {
                frequencies: [0.0; 3],
                coeff: [[0.0; 3]; 3],
                trivial: true,
            };
        }
        let a = [
            [block.diag[0], block.coupling13, 0.0],
            [block.coupling13, block.diag[1], block.coupling23],
            [0.0, block.coupling23, block.diag[2]],
        ];
        let Eigen3 { values, vectors } = sym3_eigen(&a);
        let mut coeff = [[0.0; 3]; 3];
        for k in 0..3 {
            for j in 0..3 {
                coeff[j][k] = vectors[k][j] * vectors[k][0];
            }
        }
        Self {
            frequencies: values,
            coeff,
            trivial: false,
        }
    }

    /// Amplitudes `(A1, A2, A3)` at time `t` for the `(1, 0, 0)` initial
    /// condition. The triple has unit norm up to rounding.
    pub fn amplitudes(&self, t: f64) -> [Amplitude; 3] {
        if self.trivial {
            // The 1-dimensional sector only acquires an unobservable phase;
            // report it as stationary.
            return [
                Amplitude { re: 1.0, im: 0.0 },
                Amplitude { re: 0.0, im: 0.0 },
                Amplitude { re: 0.0, im: 0.0 },
            ];
        }
        let mut out = [Amplitude { re: 0.0, im: 0.0 }; 3];
        for k in 0..3 {
            let (s, c) = (self.frequencies[k] * t).sin_cos();
            for j in 0..3 {
                out[j].re += self.coeff[j][k] * c;
                out[j].im -= self.coeff[j][k] * s;
            }
        }
        out
    }

    /// `|A1(t)|^2`, the population still on the initial basis state. Cheaper
    /// than `amplitudes` and the only quantity the photon-number sum needs:
    /// both lower states carry `n - 1` photons, so
    /// `<N1> = n - (1 - |A1|^2)` per block.
    pub fn survival(&self, t: f64) -> f64 {
        if self.trivial {
            return 1.0;
        }
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..3 {
            let (s, c) = (self.frequencies[k] * t).sin_cos();
            re += self.coeff[0][k] * c;
            im -= self.coeff[0][k] * s;
        }
        re * re + im * im
    }
}
