//! Brute-force references shared by integration tests. Everything here is
//! deliberately naive: full 2^N Hilbert space, explicit 4^N superoperator,
//! classical RK4 — no sector tricks, no eigendecompositions.

#![allow(dead_code)]

use chaincode::chain::ChainSpec;
use ndarray::{Array1, Array2};
use num_complex::Complex64;

/// Full many-body Hamiltonian on 2^N basis states, assembled directly from
/// the coupling list: diagonal field energy per occupied site, hopping
/// J_k between neighboring 01/10 pairs.
pub fn dense_hamiltonian(spec: &ChainSpec) -> Array2<f64> {
    let n = spec.n;
    let dim = 1usize << n;
    let mut h = Array2::zeros((dim, dim));
    for x in 0..dim {
        let mut diag = 0.0;
        for k in 0..n {
            if x >> k & 1 == 1 {
                diag += spec.b[k];
            }
        }
        h[(x, x)] = diag;
        for k in 0..n - 1 {
            let pair = x >> k & 3;
            if pair == 1 || pair == 2 {
                h[(x, x ^ (3 << k))] = spec.j[k];
            }
        }
    }
    h
}

/// Dense dephasing Liouvillian acting on row-major vec(ρ):
/// L = −i(H⊗1 − 1⊗Hᵀ) − 2γ·diag(d_H(x,y)).
pub fn dense_liouvillian(spec: &ChainSpec, gamma: f64) -> Array2<Complex64> {
    let dim = 1usize << spec.n;
    let sdim = dim * dim;
    let h = dense_hamiltonian(spec);
    let mut l = Array2::zeros((sdim, sdim));
    let mi = Complex64::new(0.0, -1.0);
    for x in 0..dim {
        for y in 0..dim {
            let row = x * dim + y;
            for xp in 0..dim {
                if h[(x, xp)] != 0.0 {
                    l[(row, xp * dim + y)] += mi * h[(x, xp)];
                }
            }
            for yp in 0..dim {
                if h[(yp, y)] != 0.0 {
                    l[(row, x * dim + yp)] -= mi * h[(yp, y)];
                }
            }
            let d = ((x ^ y) as u32).count_ones() as f64;
            l[(row, row)] += Complex64::new(-2.0 * gamma * d, 0.0);
        }
    }
    l
}

/// Classical fixed-step RK4 for v' = L v.
pub fn rk4_flow(
    l: &Array2<Complex64>,
    v0: &Array1<Complex64>,
    t: f64,
    steps: usize,
) -> Array1<Complex64> {
    let dt = t / steps as f64;
    let half = Complex64::new(dt / 2.0, 0.0);
    let full = Complex64::new(dt, 0.0);
    let sixth = Complex64::new(dt / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let mut v = v0.clone();
    for _ in 0..steps {
        let k1 = l.dot(&v);
        let k2 = l.dot(&(&v + &k1.mapv(|c| c * half)));
        let k3 = l.dot(&(&v + &k2.mapv(|c| c * half)));
        let k4 = l.dot(&(&v + &k3.mapv(|c| c * full)));
        let incr = &k1 + &k2.mapv(|c| c * two) + k3.mapv(|c| c * two) + k4;
        v = &v + &incr.mapv(|c| c * sixth);
    }
    v
}

/// Row-major flattening matching the layout `dense_liouvillian` assumes.
pub fn flatten(rho: &Array2<Complex64>) -> Array1<Complex64> {
    Array1::from_iter(rho.iter().copied())
}
