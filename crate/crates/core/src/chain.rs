//! Perfect-state-transfer spin chains and their exact propagators.
//!
//! The chain is fixed by couplings J and fields B; everything downstream
//! (single-excitation unitary, Majorana mode rotation) comes from the
//! eigendecomposition of the tridiagonal one-body matrix h₁. Dense
//! eigendecomposition keeps the group property exact to machine precision,
//! which matters more here than speed.

use crate::error::{Error, Result};
use ndarray::{Array1, Array2, s};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

/// A spin chain: N sites, N−1 couplings, N on-site fields, and the nominal
/// transfer time t₀.
#[derive(Clone, Debug)]
pub struct ChainSpec {
    pub n: usize,
    pub j: Vec<f64>,
    pub b: Vec<f64>,
    pub lambda: f64,
    pub t0: f64,
}

impl ChainSpec {
    /// Chain with explicit couplings and fields. The transfer time is the
    /// caller's claim; nothing about it is assumed until verified.
    pub fn with_couplings(j: Vec<f64>, b: Vec<f64>, lambda: f64, t0: f64) -> Result<Self> {
        let n = b.len();
        if n < 2 || j.len() != n - 1 {
            return Err(Error::Malformed(format!(
                "need N ≥ 2 sites with N−1 couplings, got {} fields and {} couplings",
                n,
                j.len()
            )));
        }
        if j.iter().any(|&x| x <= 0.0) {
            return Err(Error::Malformed("couplings must be positive".into()));
        }
        Ok(ChainSpec { n, j, b, lambda, t0 })
    }
}

/// The standard transfer chain: Jₙ = λ√(n(N−n)), Bₙ = 0, t₀ = π/(2λ).
pub fn standard_chain(n: usize, lambda: f64) -> Result<ChainSpec> {
    if n < 2 {
        return Err(Error::Malformed("chain needs at least two sites".into()));
    }
    if lambda <= 0.0 {
        return Err(Error::Malformed("lambda must be positive".into()));
    }
    let j = (1..n)
        .map(|k| lambda * ((k * (n - k)) as f64).sqrt())
        .collect();
    Ok(ChainSpec {
        n,
        j,
        b: vec![0.0; n],
        lambda,
        t0: std::f64::consts::FRAC_PI_2 / lambda,
    })
}

/// One-body matrix: tridiagonal, diagonal B, off-diagonal J.
pub fn h1_matrix(spec: &ChainSpec) -> Array2<f64> {
    let n = spec.n;
    let mut h = Array2::zeros((n, n));
    for i in 0..n {
        h[[i, i]] = spec.b[i];
    }
    for i in 0..n - 1 {
        h[[i, i + 1]] = spec.j[i];
        h[[i + 1, i]] = spec.j[i];
    }
    h
}

/// Eigendecomposition of h₁, cached for reuse across times.
pub struct ChainModes {
    pub vals: Array1<f64>,
    pub vecs: Array2<f64>, // columns are eigenvectors
}

pub fn chain_modes(spec: &ChainSpec) -> Result<ChainModes> {
    let (vals, vecs) = h1_matrix(spec)
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numerics(format!("eigendecomposition failed: {e}")))?;
    Ok(ChainModes { vals, vecs })
}

/// Single-excitation unitary U(t) = exp(−i h₁ t).
pub fn propagator(spec: &ChainSpec, t: f64) -> Result<Array2<Complex64>> {
    let modes = chain_modes(spec)?;
    Ok(propagator_from_modes(&modes, t))
}

pub fn propagator_from_modes(modes: &ChainModes, t: f64) -> Array2<Complex64> {
    let n = modes.vals.len();
    let mut u = Array2::<Complex64>::zeros((n, n));
    // U = V · diag(e^{−iλt}) · Vᵀ, assembled as two real matmuls
    let cos = rotate_real(modes, t, f64::cos);
    let sin = rotate_real(modes, t, f64::sin);
    for i in 0..n {
        for j in 0..n {
            u[[i, j]] = Complex64::new(cos[[i, j]], -sin[[i, j]]);
        }
    }
    u
}

/// V · diag(f(λt)) · Vᵀ for a scalar function f.
fn rotate_real(modes: &ChainModes, t: f64, f: fn(f64) -> f64) -> Array2<f64> {
    let d = Array1::from_iter(modes.vals.iter().map(|&l| f(l * t)));
    let scaled = &modes.vecs * &d; // scales columns
    scaled.dot(&modes.vecs.t())
}

/// Rotation of the 2N Majorana modes under time t of chain evolution:
/// cₙ(t) = Σₘ Oₘₙ cₘ with O = [[cos h₁t, −sin h₁t], [sin h₁t, cos h₁t]].
///
/// O is the exponential of the real antisymmetric generator −t·[[0,h₁],[−h₁,0]],
/// hence orthogonal. The sign and scale conventions here are pinned by the
/// full-Hilbert-space Heisenberg oracle in the tests, not taken on faith.
#[derive(Clone, Debug)]
pub struct MajoranaPropagator {
    pub n: usize,
    pub t: f64,
    pub o: Array2<f64>,
}

pub fn majorana_propagator(spec: &ChainSpec, t: f64) -> Result<MajoranaPropagator> {
    let modes = chain_modes(spec)?;
    Ok(majorana_propagator_from_modes(&modes, t))
}

pub fn majorana_propagator_from_modes(modes: &ChainModes, t: f64) -> MajoranaPropagator {
    let n = modes.vals.len();
    let cos = rotate_real(modes, t, f64::cos);
    let sin = rotate_real(modes, t, f64::sin);
    let mut o = Array2::zeros((2 * n, 2 * n));
    o.slice_mut(s![..n, ..n]).assign(&cos);
    o.slice_mut(s![..n, n..]).assign(&(-&sin));
    o.slice_mut(s![n.., ..n]).assign(&sin);
    o.slice_mut(s![n.., n..]).assign(&cos);
    MajoranaPropagator { n, t, o }
}

/// Spectral symmetry about zero: ‖D h₁ D + h₁‖_max ≤ tol with
/// D = diag((−1)ⁿ). For tridiagonal h₁ this is exactly the statement B ≡ 0.
pub fn check_spectral_symmetry(spec: &ChainSpec, tol: f64) -> bool {
    let h = h1_matrix(spec);
    let n = spec.n;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((sign * h[[i, j]] + h[[i, j]]).abs());
        }
    }
    worst <= tol
}

/// Largest |O| entry coupling the odd-parity Majorana class
/// {c_{2n−1}} ∪ {c_{N+2n}} to its complement. Zero (to rounding) exactly when
/// the chain's spectrum is symmetric, so evolution never mixes the classes.
pub fn parity_block_check(prop: &MajoranaPropagator) -> f64 {
    let n = prop.n;
    // 0-based: site index i ↦ c_{i+1}; odd-parity ⟺ i even. Row N+i ↦ c_{N+i+1};
    // odd-parity ⟺ i odd.
    let odd_class = |idx: usize| -> bool {
        if idx < n {
            idx % 2 == 0
        } else {
            (idx - n) % 2 == 1
        }
    };
    let mut worst: f64 = 0.0;
    for r in 0..2 * n {
        for c in 0..2 * n {
            if odd_class(r) != odd_class(c) {
                worst = worst.max(prop.o[[r, c]].abs());
            }
        }
    }
    worst
}

/// |⟨N+1−n|U(t₀)|n⟩| for every site; the transfer is perfect when all are 1.
pub fn mirror_fidelities(spec: &ChainSpec) -> Result<Vec<f64>> {
    let u = propagator(spec, spec.t0)?;
    let n = spec.n;
    Ok((0..n).map(|i| u[[n - 1 - i, i]].norm()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray_linalg::OperationNorm;

    #[test]
    fn standard_chain_shapes() {
        let c = standard_chain(2, 1.0).unwrap();
        assert_eq!(c.j, vec![1.0]);
        assert!((c.t0 - std::f64::consts::FRAC_PI_2).abs() < 1e-15);

        let c12 = standard_chain(12, 1.0).unwrap();
        assert!((c12.j[5] - 6.0).abs() < 1e-12); // J₆ = √36
    }

    #[test]
    fn standard_chain_mirror_symmetric_couplings() {
        for n in [3, 8, 13] {
            let c = standard_chain(n, 0.7).unwrap();
            for k in 0..c.j.len() {
                assert!((c.j[k] - c.j[c.j.len() - 1 - k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(standard_chain(1, 1.0).is_err());
        assert!(standard_chain(4, 0.0).is_err());
        assert!(ChainSpec::with_couplings(vec![1.0, -1.0], vec![0.0; 3], 1.0, 1.0).is_err());
        assert!(ChainSpec::with_couplings(vec![1.0], vec![0.0; 3], 1.0, 1.0).is_err());
    }

    #[test]
    fn h1_small_cases() {
        let h2 = h1_matrix(&standard_chain(2, 1.0).unwrap());
        assert_eq!(h2[[0, 1]], 1.0);
        assert_eq!(h2[[0, 0]], 0.0);
        let h3 = h1_matrix(&standard_chain(3, 1.0).unwrap());
        assert!((h3[[0, 1]] - 2f64.sqrt()).abs() < 1e-12);
        assert!((h3[[1, 2]] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn standard_spectrum_is_odd_integers() {
        // N=4, λ=1: eigenvalues {−3,−1,1,3}
        let modes = chain_modes(&standard_chain(4, 1.0).unwrap()).unwrap();
        let expect = [-3.0, -1.0, 1.0, 3.0];
        for (v, e) in modes.vals.iter().zip(expect) {
            assert!((v - e).abs() < 1e-10, "got {v}, want {e}");
        }
    }

    #[test]
    fn propagator_identity_at_zero() {
        let spec = standard_chain(6, 1.3).unwrap();
        let u = propagator(&spec, 0.0).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((u[[i, j]] - Complex64::new(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn propagator_unitary_and_group() {
        let spec = standard_chain(9, 0.8).unwrap();
        let (t1, t2) = (0.37, 1.21);
        let u1 = propagator(&spec, t1).unwrap();
        let u2 = propagator(&spec, t2).unwrap();
        let u12 = propagator(&spec, t1 + t2).unwrap();
        let prod = u1.dot(&u2);
        assert!((&prod - &u12).opnorm_fro().unwrap() < 1e-10);
        // unitarity
        let uh = u1.t().mapv(|z| z.conj());
        let id = uh.dot(&u1);
        for i in 0..9 {
            for j in 0..9 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[[i, j]] - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn perfect_transfer_small() {
        for n in [2, 3, 5, 10] {
            let spec = standard_chain(n, 1.0).unwrap();
            for f in mirror_fidelities(&spec).unwrap() {
                assert!((f - 1.0).abs() < 1e-10, "N={n}: fidelity {f}");
            }
        }
    }

    #[test]
    fn majorana_propagator_identity_and_orthogonal() {
        let spec = standard_chain(7, 1.0).unwrap();
        let o0 = majorana_propagator(&spec, 0.0).unwrap();
        for i in 0..14 {
            for j in 0..14 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((o0.o[[i, j]] - want).abs() < 1e-13);
            }
        }
        let ot = majorana_propagator(&spec, 0.83).unwrap();
        let gram = ot.o.t().dot(&ot.o);
        for i in 0..14 {
            for j in 0..14 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[[i, j]] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn majorana_group_property() {
        let spec = standard_chain(5, 1.1).unwrap();
        let (t1, t2) = (0.29, 0.62);
        let a = majorana_propagator(&spec, t1).unwrap().o;
        let b = majorana_propagator(&spec, t2).unwrap().o;
        let ab = majorana_propagator(&spec, t1 + t2).unwrap().o;
        assert!((&a.dot(&b) - &ab).opnorm_fro().unwrap() < 1e-10);
    }

    #[test]
    fn spectral_symmetry() {
        let spec = standard_chain(8, 1.0).unwrap();
        assert!(check_spectral_symmetry(&spec, 1e-14));
        let mut tilted = spec.clone();
        tilted.b[0] = 1.0;
        assert!(!check_spectral_symmetry(&tilted, 1e-14));
    }

    #[test]
    fn parity_leakage_standard_vs_tilted() {
        let spec = standard_chain(8, 1.0).unwrap();
        let o = majorana_propagator(&spec, 0.714).unwrap();
        assert!(parity_block_check(&o) < 1e-12);
        assert!(parity_block_check(&majorana_propagator(&spec, 0.0).unwrap()) < 1e-14);

        let mut tilted = spec;
        tilted.b = vec![1.0; 8];
        let ot = majorana_propagator(&tilted, 0.714).unwrap();
        assert!(parity_block_check(&ot) > 0.01);
    }
}
