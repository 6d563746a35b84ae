//! Excitation-sector machinery: combinadic bases, per-sector Hamiltonians,
//! and cached eigendecompositions driving all time evolution.
//!
//! Site i (1-based) lives on bit i−1; a basis string's excitation number is
//! its popcount. The chain Hamiltonian Σ Bₙ/2·(1−Zₙ) + Σ Jₙ/2·(XX+YY)
//! conserves popcount, acting within each sector as a real symmetric matrix
//! with diagonal Σ Bᵢ over excited sites and hopping Jₖ between strings
//! related by an adjacent 10 ↔ 01 exchange.

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use ndarray::{Array1, Array2};
use ndarray_linalg::Eigh;
use num_complex::Complex64;
use std::collections::HashMap;

/// All bitstrings of `n` bits with popcount `w`, ascending.
pub fn sector_basis(n: usize, w: usize) -> Vec<u32> {
    assert!(n <= 32);
    let mut out = Vec::new();
    if w > n {
        return out;
    }
    if w == 0 {
        out.push(0);
        return out;
    }
    // Gosper's hack: next integer with the same popcount
    let mut v: u32 = (1 << w) - 1;
    let limit: u64 = 1u64 << n;
    while (v as u64) < limit {
        out.push(v);
        let c = v & v.wrapping_neg();
        let r = v + c;
        if c == 0 || r == 0 {
            break;
        }
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// Index of `state` in the sorted sector basis.
pub fn basis_index(basis: &[u32], state: u32) -> usize {
    basis.binary_search(&state).expect("state not in sector basis")
}

/// Dense sector Hamiltonian in the combinadic basis.
pub fn sector_hamiltonian(spec: &ChainSpec, basis: &[u32]) -> Array2<f64> {
    let dim = basis.len();
    let n = spec.n;
    let mut h = Array2::<f64>::zeros((dim, dim));
    for (i, &x) in basis.iter().enumerate() {
        let mut diag = 0.0;
        for site in 0..n {
            if x >> site & 1 == 1 {
                diag += spec.b[site];
            }
        }
        h[(i, i)] = diag;
        for k in 0..n - 1 {
            let pair = x >> k & 3;
            if pair == 1 || pair == 2 {
                let y = x ^ (3 << k);
                if y > x {
                    let j = basis_index(basis, y);
                    h[(i, j)] = spec.j[k];
                    h[(j, i)] = spec.j[k];
                }
            }
        }
    }
    h
}

/// Eigendecomposition of one sector Hamiltonian.
pub struct SectorModes {
    pub basis: Vec<u32>,
    pub vals: Array1<f64>,
    /// Real orthogonal eigenvector matrix (columns are modes).
    pub vecs: Array2<f64>,
}

impl SectorModes {
    /// Dense unitary e^{−iHt} in the computational sector basis.
    pub fn unitary(&self, t: f64) -> Array2<Complex64> {
        let dim = self.basis.len();
        let mut scaled = Array2::<Complex64>::zeros((dim, dim));
        for j in 0..dim {
            let ph = Complex64::from_polar(1.0, -self.vals[j] * t);
            for i in 0..dim {
                scaled[(i, j)] = ph * self.vecs[(i, j)];
            }
        }
        let vt = self.vecs.mapv(|x| Complex64::new(x, 0.0));
        scaled.dot(&vt.t())
    }

    /// Apply e^{−iHt} to a sector amplitude vector.
    pub fn evolve_vec(&self, amps: &Array1<Complex64>, t: f64) -> Array1<Complex64> {
        let coeffs = self.vecs.t().mapv(|x| Complex64::new(x, 0.0)).dot(amps);
        let mut rotated = coeffs;
        for (j, c) in rotated.iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, -self.vals[j] * t);
        }
        self.vecs.mapv(|x| Complex64::new(x, 0.0)).dot(&rotated)
    }
}

/// Sparse symmetric sector Hamiltonian for matrix-free evolution.
pub struct SectorSparse {
    pub basis: Vec<u32>,
    pub diag: Vec<f64>,
    /// Off-diagonal couplings (i, j, J) with i < j, each pair stored once.
    pub pairs: Vec<(u32, u32, f64)>,
    /// Gershgorin bound on the spectral radius.
    pub norm_bound: f64,
}

impl SectorSparse {
    pub fn build(spec: &ChainSpec, basis: Vec<u32>) -> Self {
        let n = spec.n;
        let mut diag = Vec::with_capacity(basis.len());
        let mut pairs = Vec::new();
        let mut row_sums = vec![0.0f64; basis.len()];
        for (i, &x) in basis.iter().enumerate() {
            let mut d = 0.0;
            for site in 0..n {
                if x >> site & 1 == 1 {
                    d += spec.b[site];
                }
            }
            diag.push(d);
            for k in 0..n - 1 {
                let pair = x >> k & 3;
                if pair == 1 || pair == 2 {
                    let y = x ^ (3 << k);
                    if y > x {
                        let j = basis_index(&basis, y);
                        pairs.push((i as u32, j as u32, spec.j[k]));
                        row_sums[i] += spec.j[k].abs();
                        row_sums[j] += spec.j[k].abs();
                    }
                }
            }
        }
        let norm_bound = row_sums
            .iter()
            .zip(diag.iter())
            .map(|(s, d)| s + d.abs())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        SectorSparse {
            basis,
            diag,
            pairs,
            norm_bound,
        }
    }

    /// y = H·x.
    pub fn matvec(&self, x: &Array1<Complex64>, y: &mut Array1<Complex64>) {
        for (i, c) in y.iter_mut().enumerate() {
            *c = x[i] * self.diag[i];
        }
        for &(i, j, v) in &self.pairs {
            let (i, j) = (i as usize, j as usize);
            let (xi, xj) = (x[i], x[j]);
            y[i] += xj * v;
            y[j] += xi * v;
        }
    }
}

/// Cache of sector eigendecompositions for one chain.
pub struct SectorEvolver {
    pub spec: ChainSpec,
    cache: HashMap<usize, SectorModes>,
    sparse_cache: HashMap<usize, SectorSparse>,
}

impl SectorEvolver {
    pub fn new(spec: ChainSpec) -> Self {
        SectorEvolver {
            spec,
            cache: HashMap::new(),
            sparse_cache: HashMap::new(),
        }
    }

    pub fn modes(&mut self, w: usize) -> Result<&SectorModes> {
        if !self.cache.contains_key(&w) {
            let basis = sector_basis(self.spec.n, w);
            let h = sector_hamiltonian(&self.spec, &basis);
            let (vals, vecs) = h
                .eigh(ndarray_linalg::UPLO::Lower)
                .map_err(|e| Error::Numerics(format!("sector eigh failed: {e}")))?;
            self.cache.insert(
                w,
                SectorModes {
                    basis,
                    vals,
                    vecs,
                },
            );
        }
        Ok(&self.cache[&w])
    }

    pub fn has_modes(&self, w: usize) -> bool {
        self.cache.contains_key(&w)
    }

    pub fn sparse(&mut self, w: usize) -> &SectorSparse {
        let spec = &self.spec;
        self.sparse_cache
            .entry(w)
            .or_insert_with(|| SectorSparse::build(spec, sector_basis(spec.n, w)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::standard_chain;

    #[test]
    fn basis_sizes_are_binomials() {
        assert_eq!(sector_basis(5, 0), vec![0]);
        assert_eq!(sector_basis(5, 1).len(), 5);
        assert_eq!(sector_basis(5, 2).len(), 10);
        assert_eq!(sector_basis(5, 5), vec![0b11111]);
        assert_eq!(sector_basis(12, 6).len(), 924);
    }

    #[test]
    fn basis_sorted_and_correct_weight() {
        let b = sector_basis(8, 3);
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        assert!(b.iter().all(|x| x.count_ones() == 3));
        assert_eq!(b.len(), 56);
    }

    #[test]
    fn single_excitation_sector_matches_h1() {
        let spec = standard_chain(6, 1.0).unwrap();
        let basis = sector_basis(6, 1);
        let h = sector_hamiltonian(&spec, &basis);
        let h1 = crate::chain::h1_matrix(&spec);
        // basis string 1<<k is site k+1; ordering ascending = site order
        for i in 0..6 {
            for j in 0..6 {
                assert!((h[(i, j)] - h1[(i, j)]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sector_unitary_is_unitary() {
        let spec = standard_chain(6, 1.0).unwrap();
        let mut ev = SectorEvolver::new(spec);
        let m = ev.modes(2).unwrap();
        let u = m.unitary(0.37);
        let id = u.t().mapv(|c| c.conj()).dot(&u);
        for i in 0..u.nrows() {
            for j in 0..u.ncols() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn evolve_vec_matches_unitary() {
        let spec = standard_chain(5, 1.3).unwrap();
        let mut ev = SectorEvolver::new(spec);
        let m = ev.modes(2).unwrap();
        let dim = m.basis.len();
        let mut v = Array1::<Complex64>::zeros(dim);
        v[0] = Complex64::new(0.6, 0.0);
        v[3] = Complex64::new(0.0, 0.8);
        let direct = m.evolve_vec(&v, 0.9);
        let via_u = m.unitary(0.9).dot(&v);
        for i in 0..dim {
            assert!((direct[i] - via_u[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn sparse_matvec_matches_dense() {
        let spec = standard_chain(7, 1.1).unwrap();
        let basis = sector_basis(7, 3);
        let h = sector_hamiltonian(&spec, &basis);
        let sp = SectorSparse::build(&spec, basis.clone());
        let dim = basis.len();
        let x = Array1::from_iter(
            (0..dim).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.7).cos())),
        );
        let mut y = Array1::<Complex64>::zeros(dim);
        sp.matvec(&x, &mut y);
        let dense = h.mapv(|v| Complex64::new(v, 0.0)).dot(&x);
        for i in 0..dim {
            assert!((y[i] - dense[i]).norm() < 1e-12);
        }
        // Gershgorin bound dominates the largest |eigenvalue|
        let vals = h.eigh(ndarray_linalg::UPLO::Lower).unwrap().0;
        let rad = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(sp.norm_bound >= rad - 1e-12);
    }

    #[test]
    fn full_weight_sector_phase() {
        // all-excited sector is 1-dimensional with energy ΣB (zero for B=0)
        let spec = standard_chain(4, 1.0).unwrap();
        let mut ev = SectorEvolver::new(spec);
        let m = ev.modes(4).unwrap();
        assert_eq!(m.basis, vec![0b1111]);
        assert!(m.vals[0].abs() < 1e-12);
    }
}
