//! Phased Pauli operators and Majorana monomials on N qubits.
//!
//! A Pauli is stored as i^phase · Z^z · X^x with bit-masks z, x (site
//! operator Zⁿ before Xⁿ on each site). A Majorana monomial is
//! i^phase · c_{j₁}…c_{jₖ} with strictly ascending indices; the modes are
//! the Jordan–Wigner pair cₙ = Z₁…Z_{n−1}Xₙ, c_{N+n} = Z₁…Z_{n−1}Yₙ
//! (0-based internally: index j < N is the X-type mode of site j, index
//! N + j the Y-type). All products track the i^k phase exactly, which is
//! what lets stabilizers be pushed through the chain evolution and come
//! out with their signs intact.

use crate::error::{Error, Result};
use crate::gf2::BinVec;

/// i^phase · Z^z X^x over `m` qubits; phase mod 4.
#[derive(Clone, PartialEq, Eq)]
pub struct Pauli {
    pub m: usize,
    pub phase: u8,
    pub z: BinVec,
    pub x: BinVec,
}

impl Pauli {
    pub fn identity(m: usize) -> Self {
        Pauli {
            m,
            phase: 0,
            z: BinVec::zeros(m),
            x: BinVec::zeros(m),
        }
    }

    pub fn z_on(m: usize, site: usize) -> Self {
        let mut p = Self::identity(m);
        p.z.set(site, true);
        p
    }

    pub fn x_on(m: usize, site: usize) -> Self {
        let mut p = Self::identity(m);
        p.x.set(site, true);
        p
    }

    pub fn y_on(m: usize, site: usize) -> Self {
        // Y = i·X·Z = i³·Z·X in our ordering
        let mut p = Self::identity(m);
        p.z.set(site, true);
        p.x.set(site, true);
        p.phase = 3;
        p
    }

    /// Build from a symplectic (z|x) row, phase 0.
    pub fn from_symplectic(v: &BinVec) -> Result<Self> {
        if v.len() % 2 != 0 {
            return Err(Error::Malformed("symplectic vector of odd length".into()));
        }
        let m = v.len() / 2;
        Ok(Pauli {
            m,
            phase: 0,
            z: v.slice(0..m),
            x: v.slice(m..2 * m),
        })
    }

    pub fn symplectic(&self) -> BinVec {
        self.z.concat(&self.x)
    }

    /// self · other, with the (−1)^{x₁·z₂} reorder phase folded in.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.m, other.m);
        let mut z = self.z.clone();
        z.xor_assign(&other.z);
        let mut x = self.x.clone();
        x.xor_assign(&other.x);
        let swap = self.x.dot(&other.z); // X^{x₁} past Z^{z₂}
        Pauli {
            m: self.m,
            phase: (self.phase + other.phase + if swap { 2 } else { 0 }) % 4,
            z,
            x,
        }
    }

    /// True iff the two commute (symplectic product zero).
    pub fn commutes_with(&self, other: &Self) -> bool {
        !(self.z.dot(&other.x) ^ self.x.dot(&other.z))
    }

    /// Multiply the stored phase by i^k.
    pub fn scaled(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }

    pub fn weight(&self) -> usize {
        (0..self.m)
            .filter(|&i| self.z.get(i) || self.x.get(i))
            .count()
    }
}

impl std::fmt::Debug for Pauli {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", ["+", "+i·", "-", "-i·"][self.phase as usize])?;
        for i in 0..self.m {
            let ch = match (self.z.get(i), self.x.get(i)) {
                (false, false) => 'I',
                (true, false) => 'Z',
                (false, true) => 'X',
                (true, true) => 'W', // ZX = −iY
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// i^phase · c_{j₁}…c_{jₖ}, indices strictly ascending in 0..2N.
#[derive(Clone, PartialEq, Eq)]
pub struct MajoranaOp {
    pub n: usize,
    pub phase: u8,
    pub indices: Vec<usize>,
}

impl MajoranaOp {
    pub fn identity(n: usize) -> Self {
        MajoranaOp {
            n,
            phase: 0,
            indices: Vec::new(),
        }
    }

    pub fn single(n: usize, j: usize) -> Self {
        assert!(j < 2 * n);
        MajoranaOp {
            n,
            phase: 0,
            indices: vec![j],
        }
    }

    /// self · other: concatenate, then normal-order with anticommutation
    /// signs, cancelling c² = 1 pairs.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut idx: Vec<usize> = self
            .indices
            .iter()
            .chain(other.indices.iter())
            .copied()
            .collect();
        let mut phase = (self.phase + other.phase) % 4;
        // insertion sort, counting transpositions of distinct anticommuting modes
        let mut i = 1;
        while i < idx.len() {
            let mut k = i;
            while k > 0 && idx[k - 1] > idx[k] {
                idx.swap(k - 1, k);
                phase = (phase + 2) % 4; // (−1) per transposition
                k -= 1;
            }
            i += 1;
        }
        // drop equal adjacent pairs (c_j c_j = 1)
        let mut out = Vec::with_capacity(idx.len());
        let mut it = idx.into_iter().peekable();
        while let Some(j) = it.next() {
            if it.peek() == Some(&j) {
                it.next();
            } else {
                out.push(j);
            }
        }
        MajoranaOp {
            n: self.n,
            phase,
            indices: out,
        }
    }

    pub fn scaled(mut self, k: u8) -> Self {
        self.phase = (self.phase + k) % 4;
        self
    }
}

impl std::fmt::Debug for MajoranaOp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", ["+", "+i·", "-", "-i·"][self.phase as usize])?;
        if self.indices.is_empty() {
            return write!(f, "1");
        }
        for &j in &self.indices {
            if j < self.n {
                write!(f, "c{}", j + 1)?;
            } else {
                write!(f, "c{}'", j - self.n + 1)?;
            }
        }
        Ok(())
    }
}

/// The Pauli form of a single mode c_j.
fn mode_pauli(n: usize, j: usize) -> Pauli {
    let (site, y_type) = if j < n { (j, false) } else { (j - n, true) };
    let mut p = Pauli::identity(n);
    for m in 0..site {
        p.z.set(m, true);
    }
    if y_type {
        // Z-string · Y = Z-string · i³ Z X on the site
        p.z.set(site, true);
        p.x.set(site, true);
        p.phase = 3;
    } else {
        p.x.set(site, true);
    }
    p
}

/// Express a Majorana monomial as a phased Pauli on n qubits.
pub fn majorana_to_pauli(op: &MajoranaOp) -> Pauli {
    let mut acc = Pauli::identity(op.n).scaled(op.phase);
    for &j in &op.indices {
        acc = acc.mul(&mode_pauli(op.n, j));
    }
    acc
}

/// Express a phased Pauli as a Majorana monomial (inverse of
/// [`majorana_to_pauli`]). Works site by site: Zₙ = i³·cₙc_{N+n}, and the
/// site-ordered product reproduces Z^z X^x exactly.
pub fn pauli_to_majorana(p: &Pauli) -> MajoranaOp {
    let n = p.m;
    let z_mono = |site: usize| {
        MajoranaOp {
            n,
            phase: 3,
            indices: vec![site, n + site],
        }
    };
    let x_mono = |site: usize| {
        // Xₖ = Z₁…Z_{k−1} cₖ ⇒ monomial = (∏_{m<k} Z-mono) · cₖ
        let mut acc = MajoranaOp::identity(n);
        for m in 0..site {
            acc = acc.mul(&z_mono(m));
        }
        acc.mul(&MajoranaOp::single(n, site))
    };
    let mut acc = MajoranaOp::identity(n).scaled(p.phase);
    for site in 0..n {
        if p.z.get(site) {
            acc = acc.mul(&z_mono(site));
        }
        if p.x.get(site) {
            acc = acc.mul(&x_mono(site));
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn y_is_izx_cubed() {
        let y = Pauli::y_on(1, 0);
        // Y² = 1
        let yy = y.mul(&y);
        assert_eq!(yy, Pauli::identity(1));
        // XZ = i·... check ZX vs XZ anticommute
        let z = Pauli::z_on(1, 0);
        let x = Pauli::x_on(1, 0);
        let zx = z.mul(&x);
        let xz = x.mul(&z);
        assert_eq!(zx.z, xz.z);
        assert_eq!((zx.phase + 2) % 4, xz.phase);
    }

    #[test]
    fn pauli_mul_is_associative() {
        let a = Pauli::y_on(3, 0).mul(&Pauli::x_on(3, 2));
        let b = Pauli::z_on(3, 1);
        let c = Pauli::x_on(3, 0).mul(&Pauli::z_on(3, 2));
        let left = a.mul(&b).mul(&c);
        let right = a.mul(&b.mul(&c));
        assert_eq!(left, right);
    }

    #[test]
    fn commutation_matches_symplectic() {
        let z1 = Pauli::z_on(2, 0);
        let x1 = Pauli::x_on(2, 0);
        let x2 = Pauli::x_on(2, 1);
        assert!(!z1.commutes_with(&x1));
        assert!(z1.commutes_with(&x2));
    }

    #[test]
    fn z_as_majorana_pair() {
        // Zₙ = −i·cₙ·c_{N+n}
        for n in 0..3 {
            let z = Pauli::z_on(3, n);
            let mono = pauli_to_majorana(&z);
            assert_eq!(mono.indices, vec![n, 3 + n]);
            assert_eq!(mono.phase, 3);
            assert_eq!(majorana_to_pauli(&mono), z);
        }
    }

    #[test]
    fn modes_square_to_one_and_anticommute() {
        let n = 4;
        for j in 0..2 * n {
            let cj = MajoranaOp::single(n, j);
            assert_eq!(cj.mul(&cj), MajoranaOp::identity(n));
            // Pauli form is Hermitian with real sign: phase 0 or 2... in fact
            // each mode is a Hermitian Pauli, so (pauli)² = +1 too.
            let p = majorana_to_pauli(&cj);
            assert_eq!(p.mul(&p), Pauli::identity(n));
        }
        for j in 0..2 * n {
            for k in j + 1..2 * n {
                let a = MajoranaOp::single(n, j);
                let b = MajoranaOp::single(n, k);
                let ab = a.mul(&b);
                let ba = b.mul(&a);
                assert_eq!(ab.indices, ba.indices);
                assert_eq!((ab.phase + 2) % 4, ba.phase);
            }
        }
    }

    #[test]
    fn round_trip_exhaustive_two_qubits() {
        // every phased two-qubit Pauli survives Pauli → Majorana → Pauli
        for phase in 0..4u8 {
            for zbits in 0..4u32 {
                for xbits in 0..4u32 {
                    let mut p = Pauli::identity(2).scaled(phase);
                    for i in 0..2 {
                        p.z.set(i, zbits >> i & 1 == 1);
                        p.x.set(i, xbits >> i & 1 == 1);
                    }
                    let back = majorana_to_pauli(&pauli_to_majorana(&p));
                    assert_eq!(back, p, "failed at {p:?}");
                }
            }
        }
    }

    #[test]
    fn round_trip_random_five_qubits() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut p = Pauli::identity(5).scaled(rng.gen_range(0..4));
            for i in 0..5 {
                p.z.set(i, rng.gen());
                p.x.set(i, rng.gen());
            }
            let mono = pauli_to_majorana(&p);
            assert_eq!(majorana_to_pauli(&mono), p);
        }
    }

    #[test]
    fn monomial_round_trip() {
        // Majorana → Pauli → Majorana is also the identity
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 4;
        for _ in 0..100 {
            let mut all: Vec<usize> = (0..2 * n).collect();
            all.shuffle(&mut rng);
            let count = rng.gen_range(0..=2 * n);
            let mut idx: Vec<usize> = all[..count].to_vec();
            idx.sort_unstable();
            let mono = MajoranaOp {
                n,
                phase: rng.gen_range(0..4),
                indices: idx,
            };
            let back = pauli_to_majorana(&majorana_to_pauli(&mono));
            assert_eq!(back, mono, "failed at {mono:?}");
        }
    }

    #[test]
    fn xx_and_yy_as_pairs() {
        // XₙXₙ₊₁ = i·cₙ₊₁c_{N+n},  YₙYₙ₊₁ = i·cₙc_{N+n+1}
        let n = 3;
        for site in 0..2 {
            let xx = Pauli::x_on(n, site).mul(&Pauli::x_on(n, site + 1));
            let mono = pauli_to_majorana(&xx);
            assert_eq!(mono.indices, vec![site + 1, n + site]);
            assert_eq!(mono.phase, 1);

            let yy = Pauli::y_on(n, site).mul(&Pauli::y_on(n, site + 1));
            let mono = pauli_to_majorana(&yy);
            assert_eq!(mono.indices, vec![site, n + site + 1]);
            assert_eq!(mono.phase, 1);
        }
    }
}
