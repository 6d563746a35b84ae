//! Open-system simulation of encoded state transfer.
//!
//! Everything here exploits two conservation laws: the chain Hamiltonian
//! preserves excitation number, and dephasing is diagonal in the
//! computational basis. Density matrices are therefore stored as blocks
//! between excitation sectors; the Hamiltonian conjugates each block
//! exactly (via cached sector eigendecompositions) and dephasing damps each
//! element exactly by e^{−2γ·d_H·t}, with Strang splitting composing the
//! two flows. Site i (1-based) is bit i−1; the encoding region is sites
//! 1..M, the decoding region sites N−M+1..N.

mod frame;
mod pure;
mod sector;

pub use frame::{
    arrival_frame, bitflip_set, parity_set, two_fermion_set, ArrivalFrame, Decoder,
    RecoverySummary, SyndromeTable,
};
pub use pure::{evolve_pure, PureSectorState};
pub use sector::{basis_index, sector_basis, sector_hamiltonian, SectorEvolver, SectorModes};

use crate::chain::ChainSpec;
use crate::codes::StabilizerCode;
use crate::error::{Error, Result};
use crate::gf2::BinVec;
use crate::pauli::Pauli;
use ndarray::Array2;
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};

/// Density operator stored as blocks between excitation sectors; only
/// sectors carrying weight are present. Also used for non-Hermitian
/// block objects (e.g. |0_L⟩⟨1_L| pieces of a linearity decomposition).
#[derive(Clone)]
pub struct SectorState {
    pub n: usize,
    pub blocks: BTreeMap<(usize, usize), Array2<Complex64>>,
}

impl SectorState {
    pub fn empty(n: usize) -> Self {
        SectorState {
            n,
            blocks: BTreeMap::new(),
        }
    }

    /// |ψ⟩⟨φ| from two pure sector states.
    pub fn outer(psi: &PureSectorState, phi: &PureSectorState) -> Self {
        assert_eq!(psi.n, phi.n);
        let mut blocks = BTreeMap::new();
        for (&a, va) in &psi.parts {
            for (&b, vb) in &phi.parts {
                let mut m = Array2::<Complex64>::zeros((va.len(), vb.len()));
                for i in 0..va.len() {
                    for j in 0..vb.len() {
                        m[(i, j)] = va[i] * vb[j].conj();
                    }
                }
                blocks.insert((a, b), m);
            }
        }
        SectorState { n: psi.n, blocks }
    }

    pub fn trace(&self) -> Complex64 {
        let mut t = Complex64::new(0.0, 0.0);
        for (&(a, b), m) in &self.blocks {
            if a == b {
                for i in 0..m.nrows() {
                    t += m[(i, i)];
                }
            }
        }
        t
    }

    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ_{ab} tr(B_ab B_ab†) for Hermitian ρ
        self.blocks
            .values()
            .map(|m| m.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(a, b), m) in &self.blocks {
            let other = self.blocks.get(&(b, a));
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let conj = other
                        .map(|o| o[(j, i)].conj())
                        .unwrap_or_else(|| Complex64::new(0.0, 0.0));
                    worst = worst.max((m[(i, j)] - conj).norm());
                }
            }
        }
        worst
    }

    /// Dense 2^N matrix; for small-N oracle comparisons only.
    pub fn to_dense(&self) -> Array2<Complex64> {
        assert!(self.n <= 12);
        let dim = 1usize << self.n;
        let mut out = Array2::<Complex64>::zeros((dim, dim));
        for (&(a, b), m) in &self.blocks {
            let ba = sector_basis(self.n, a);
            let bb = sector_basis(self.n, b);
            for (i, &x) in ba.iter().enumerate() {
                for (j, &y) in bb.iter().enumerate() {
                    out[(x as usize, y as usize)] += m[(i, j)];
                }
            }
        }
        out
    }

    pub fn scaled(mut self, f: Complex64) -> Self {
        for m in self.blocks.values_mut() {
            m.mapv_inplace(|c| c * f);
        }
        self
    }

    pub fn add_assign(&mut self, other: &SectorState, f: Complex64) {
        for (&k, m) in &other.blocks {
            let dims = (m.nrows(), m.ncols());
            let target = self
                .blocks
                .entry(k)
                .or_insert_with(|| Array2::zeros(dims));
            target.zip_mut_with(m, |t, o| *t += f * o);
        }
    }

    /// Adjoint: blocks transposed-conjugated and re-keyed (a,b) → (b,a).
    pub fn dagger(&self) -> Self {
        let mut blocks = BTreeMap::new();
        for (&(a, b), m) in &self.blocks {
            blocks.insert((b, a), m.t().mapv(|c| c.conj()));
        }
        SectorState { n: self.n, blocks }
    }
}

/// A logical transfer input: code, amplitudes, chain length. The code goes
/// on sites 1..M; the rest of the chain starts in |0…0⟩.
#[derive(Clone)]
pub struct LogicalSpec {
    pub code: StabilizerCode,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub n: usize,
}

impl LogicalSpec {
    pub fn new(code: StabilizerCode, alpha: Complex64, beta: Complex64, n: usize) -> Result<Self> {
        if code.m > n {
            return Err(Error::Dimension(format!(
                "code on {} qubits cannot embed in a chain of {}",
                code.m, n
            )));
        }
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Malformed(format!(
                "|α|²+|β|² = {norm}, expected 1"
            )));
        }
        Ok(LogicalSpec {
            code,
            alpha,
            beta,
            n,
        })
    }
}

fn binvec_bits(v: &BinVec) -> u32 {
    assert!(v.len() <= 32);
    let mut bits = 0u32;
    for i in v.iter_ones() {
        bits |= 1 << i;
    }
    bits
}

/// Apply i^φ·Z^z·X^x to a string-amplitude map.
fn apply_pauli_amps(p: &Pauli, amps: &HashMap<u32, Complex64>) -> HashMap<u32, Complex64> {
    let zbits = binvec_bits(&p.z);
    let xbits = binvec_bits(&p.x);
    let phase = Complex64::new(0.0, 1.0).powu(p.phase as u32);
    let mut out = HashMap::with_capacity(amps.len());
    for (&s, &a) in amps {
        let flipped = s ^ xbits;
        // X acts first on the ket: Z^z X^x |s⟩ = (−1)^{z·(s⊕x)} |s⊕x⟩
        let sign = if ((zbits & flipped).count_ones() & 1) == 1 {
            -1.0
        } else {
            1.0
        };
        *out.entry(flipped).or_insert(Complex64::new(0.0, 0.0)) += a * phase * sign;
    }
    out
}

/// The two codeword amplitude maps (|0_L⟩, |1_L⟩) of a k=1 stabilizer code
/// on its M qubits, with ⟨0_L|Z_L|0_L⟩ = +1.
pub fn codewords(code: &StabilizerCode) -> Result<(HashMap<u32, Complex64>, HashMap<u32, Complex64>)> {
    if code.m > 32 {
        return Err(Error::Unsupported("codewords need M ≤ 32".into()));
    }
    let logicals = code
        .logicals
        .as_ref()
        .ok_or_else(|| Error::InvalidCode("code has no logical pair attached".into()))?;
    if logicals.len() != 1 {
        return Err(Error::Unsupported(format!(
            "logical synthesis implemented for k = 1, code has k = {}",
            logicals.len()
        )));
    }
    let m = code.m;
    let r = code.generators.rows();
    let gens: Vec<Pauli> = (0..r)
        .map(|i| {
            let row = code.generators.row(i);
            Pauli::from_symplectic(&row)
        })
        .collect::<Result<Vec<_>>>()?;
    // group sum Σ_g g|0^M⟩ via Gray-code walk over generator subsets
    let mut acc: HashMap<u32, Complex64> = HashMap::new();
    let mut cur = Pauli::identity(m);
    let mut prev_gray = 0usize;
    for i in 0..(1usize << r) {
        if i > 0 {
            let gray = i ^ (i >> 1);
            let flip = (gray ^ prev_gray).trailing_zeros() as usize;
            prev_gray = gray;
            cur = cur.mul(&gens[flip]);
        }
        let s = binvec_bits(&cur.x);
        let sign = if ((binvec_bits(&cur.z) & s).count_ones() & 1) == 1 {
            -1.0
        } else {
            1.0
        };
        let coeff = Complex64::new(0.0, 1.0).powu(cur.phase as u32) * sign;
        *acc.entry(s).or_insert(Complex64::new(0.0, 0.0)) += coeff;
    }
    let norm: f64 = acc.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(Error::Encoding(
            "stabilizer projection annihilates |0…0⟩".into(),
        ));
    }
    let mut c0: HashMap<u32, Complex64> = acc
        .into_iter()
        .filter(|(_, a)| a.norm() > 1e-12 * norm)
        .map(|(s, a)| (s, a / norm))
        .collect();
    let xl = Pauli::from_symplectic(&logicals[0].x)?;
    let zl = Pauli::from_symplectic(&logicals[0].z)?;
    let mut c1 = apply_pauli_amps(&xl, &c0);
    // orient the pair so that Z_L fixes |0_L⟩ with eigenvalue +1
    let z0 = apply_pauli_amps(&zl, &c0);
    let mut zexp = Complex64::new(0.0, 0.0);
    for (&s, &a) in &z0 {
        if let Some(&b) = c0.get(&s) {
            zexp += b.conj() * a;
        }
    }
    if zexp.re < 0.0 {
        std::mem::swap(&mut c0, &mut c1);
    }
    Ok((c0, c1))
}

/// Codeword synthesis + embedding: |ψ_L⟩⊗|0…0⟩ as a pure sector state.
pub fn encode_pure(spec_l: &LogicalSpec) -> Result<PureSectorState> {
    let (c0, c1) = codewords(&spec_l.code)?;
    let mut amps: HashMap<u32, Complex64> = HashMap::new();
    for (&s, &a) in &c0 {
        *amps.entry(s).or_insert(Complex64::new(0.0, 0.0)) += spec_l.alpha * a;
    }
    for (&s, &a) in &c1 {
        *amps.entry(s).or_insert(Complex64::new(0.0, 0.0)) += spec_l.beta * a;
    }
    PureSectorState::from_amplitudes(spec_l.n, &amps)
}

/// |ψ_L⟩⟨ψ_L| ⊗ |0…0⟩⟨0…0| as a sector-blocked density matrix.
pub fn encode(spec_l: &LogicalSpec) -> Result<SectorState> {
    let psi = encode_pure(spec_l)?;
    Ok(SectorState::outer(&psi, &psi))
}

/// Exact unitary evolution for time t (all sectors, no noise).
pub fn evolve_unitary(
    state: &SectorState,
    evolver: &mut SectorEvolver,
    t: f64,
) -> Result<SectorState> {
    let mut unitaries: HashMap<usize, Array2<Complex64>> = HashMap::new();
    let sectors: Vec<usize> = state
        .blocks
        .keys()
        .flat_map(|&(a, b)| [a, b])
        .collect();
    for w in sectors {
        if !unitaries.contains_key(&w) {
            let u = evolver.modes(w)?.unitary(t);
            unitaries.insert(w, u);
        }
    }
    let mut out = SectorState::empty(state.n);
    for (&(a, b), m) in &state.blocks {
        let ua = &unitaries[&a];
        let ub = &unitaries[&b];
        let evolved = ua.dot(m).dot(&ub.t().mapv(|c| c.conj()));
        out.blocks.insert((a, b), evolved);
    }
    Ok(out)
}

fn hamming_matrix(ba: &[u32], bb: &[u32]) -> Array2<u8> {
    let mut d = Array2::<u8>::zeros((ba.len(), bb.len()));
    for (i, &x) in ba.iter().enumerate() {
        for (j, &y) in bb.iter().enumerate() {
            d[(i, j)] = (x ^ y).count_ones() as u8;
        }
    }
    d
}

fn damp_block(m: &mut Array2<Complex64>, d: &Array2<u8>, lut: &[f64]) {
    ndarray::Zip::from(m).and(d).for_each(|c, &dist| {
        *c *= lut[dist as usize];
    });
}

/// Lindblad dephasing evolution: dρ/dt = −i[H,ρ] + γΣₙ(ZₙρZₙ − ρ),
/// integrated by Strang splitting of the exact Hamiltonian flow and the
/// exact elementwise damping e^{−2γ·d_H(x,y)·t}.
pub fn evolve_dephasing(
    state: &SectorState,
    evolver: &mut SectorEvolver,
    gamma: f64,
    t: f64,
    steps: usize,
) -> Result<SectorState> {
    if gamma < 0.0 {
        return Err(Error::Malformed("negative dephasing rate".into()));
    }
    if t < 0.0 {
        return Err(Error::Malformed("negative evolution time".into()));
    }
    if gamma == 0.0 || t == 0.0 {
        return evolve_unitary(state, evolver, t);
    }
    if steps == 0 {
        return Err(Error::Malformed("dephasing evolution needs steps ≥ 1".into()));
    }
    let keys: Vec<(usize, usize)> = state.blocks.keys().copied().collect();
    let kernel = StrangKernel::build(evolver, t, steps, &keys)?;
    kernel.evolve(state, gamma)
}

/// γ-independent data for a Strang-split dephasing evolution — per-sector
/// step unitaries and per-block Hamming-distance tables. Built once, then
/// shared read-only across evolutions at different rates (the sweep runs
/// them on parallel threads).
pub struct StrangKernel {
    n: usize,
    dt: f64,
    steps: usize,
    unitaries: HashMap<usize, Array2<Complex64>>,
    adjoints: HashMap<usize, Array2<Complex64>>,
    dists: HashMap<(usize, usize), Array2<u8>>,
}

impl StrangKernel {
    /// Precompute stepping data for states whose blocks use the given keys.
    pub fn build(
        evolver: &mut SectorEvolver,
        t: f64,
        steps: usize,
        keys: &[(usize, usize)],
    ) -> Result<Self> {
        if steps == 0 {
            return Err(Error::Malformed("dephasing evolution needs steps ≥ 1".into()));
        }
        let n = evolver.spec.n;
        let dt = t / steps as f64;
        let mut unitaries: HashMap<usize, Array2<Complex64>> = HashMap::new();
        let mut adjoints: HashMap<usize, Array2<Complex64>> = HashMap::new();
        for &(a, b) in keys {
            for w in [a, b] {
                if !unitaries.contains_key(&w) {
                    let u = evolver.modes(w)?.unitary(dt);
                    adjoints.insert(w, u.t().mapv(|c| c.conj()));
                    unitaries.insert(w, u);
                }
            }
        }
        let mut dists: HashMap<(usize, usize), Array2<u8>> = HashMap::new();
        for &(a, b) in keys {
            dists
                .entry((a, b))
                .or_insert_with(|| hamming_matrix(&sector_basis(n, a), &sector_basis(n, b)));
        }
        Ok(StrangKernel {
            n,
            dt,
            steps,
            unitaries,
            adjoints,
            dists,
        })
    }

    /// Strang-split dephasing at rate γ over the kernel's time span. The
    /// state's block keys must all have been declared at build time.
    pub fn evolve(&self, state: &SectorState, gamma: f64) -> Result<SectorState> {
        for key in state.blocks.keys() {
            if !self.dists.contains_key(key) {
                return Err(Error::Dimension(format!(
                    "block {key:?} was not declared when the kernel was built"
                )));
            }
        }
        let lut_half: Vec<f64> = (0..=self.n)
            .map(|d| (-gamma * self.dt * d as f64).exp())
            .collect();
        let lut_full: Vec<f64> = (0..=self.n)
            .map(|d| (-2.0 * gamma * self.dt * d as f64).exp())
            .collect();
        let mut blocks = state.blocks.clone();
        for (k, m) in blocks.iter_mut() {
            damp_block(m, &self.dists[k], &lut_half);
        }
        for step in 0..self.steps {
            let last = step + 1 == self.steps;
            for (&(a, b), m) in blocks.iter_mut() {
                *m = self.unitaries[&a].dot(m).dot(&self.adjoints[&b]);
                damp_block(m, &self.dists[&(a, b)], if last { &lut_half } else { &lut_full });
            }
        }
        Ok(SectorState {
            n: self.n,
            blocks,
        })
    }
}

/// Which single-site Pauli to inject as a discrete error event.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SitePauli {
    X,
    Y,
    Z,
}

impl std::str::FromStr for SitePauli {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "X" | "x" => Ok(SitePauli::X),
            "Y" | "y" => Ok(SitePauli::Y),
            "Z" | "z" => Ok(SitePauli::Z),
            other => Err(Error::Malformed(format!("unknown Pauli '{other}'"))),
        }
    }
}

/// Conjugate the state by a single-site Pauli: ρ → PρP†.
pub fn apply_site_pauli(state: &SectorState, pauli: SitePauli, site: usize) -> Result<SectorState> {
    if site == 0 || site > state.n {
        return Err(Error::Dimension(format!(
            "site {site} outside chain of {} sites",
            state.n
        )));
    }
    let mask = 1u32 << (site - 1);
    let n = state.n;
    match pauli {
        SitePauli::Z => {
            let mut out = state.clone();
            for (&(a, b), m) in out.blocks.iter_mut() {
                let ba = sector_basis(n, a);
                let bb = sector_basis(n, b);
                for (i, &x) in ba.iter().enumerate() {
                    for (j, &y) in bb.iter().enumerate() {
                        if (x ^ y) & mask != 0 {
                            for c in m.slice_mut(ndarray::s![i..i + 1, j..j + 1]) {
                                *c = -*c;
                            }
                        }
                    }
                }
            }
            Ok(out)
        }
        SitePauli::X | SitePauli::Y => {
            let mut out = SectorState::empty(n);
            for (&(a, b), m) in &state.blocks {
                let ba = sector_basis(n, a);
                let bb = sector_basis(n, b);
                // flip moves weight a → a±1 depending on the source bit
                let mut targets: HashMap<(usize, usize), Array2<Complex64>> = HashMap::new();
                let mut target_bases: HashMap<usize, Vec<u32>> = HashMap::new();
                for (i, &x) in ba.iter().enumerate() {
                    let xa = if x & mask != 0 { a - 1 } else { a + 1 };
                    for (j, &y) in bb.iter().enumerate() {
                        let yb = if y & mask != 0 { b - 1 } else { b + 1 };
                        let sign = if pauli == SitePauli::Y {
                            // i(−1)^{x_s} · conj(i(−1)^{y_s}) = (−1)^{x_s+y_s}
                            let bits = ((x & mask) != 0) as u32 + ((y & mask) != 0) as u32;
                            if bits % 2 == 1 {
                                -1.0
                            } else {
                                1.0
                            }
                        } else {
                            1.0
                        };
                        let tb_a = target_bases
                            .entry(xa)
                            .or_insert_with(|| sector_basis(n, xa))
                            .clone();
                        let tb_b = target_bases
                            .entry(yb)
                            .or_insert_with(|| sector_basis(n, yb));
                        let ii = basis_index(&tb_a, x ^ mask);
                        let jj = basis_index(tb_b, y ^ mask);
                        let dims = (tb_a.len(), tb_b.len());
                        let tm = targets
                            .entry((xa, yb))
                            .or_insert_with(|| Array2::zeros(dims));
                        tm[(ii, jj)] += m[(i, j)] * sign;
                    }
                }
                for (k, tm) in targets {
                    if tm.iter().all(|c| c.norm_sqr() == 0.0) {
                        continue;
                    }
                    match out.blocks.entry(k) {
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(tm);
                        }
                        std::collections::btree_map::Entry::Occupied(mut e) => {
                            e.get_mut().zip_mut_with(&tm, |t, o| *t += o);
                        }
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Run the transfer with one discrete Pauli error at time t_err: noiseless
/// evolution to t_err, conjugation by the Pauli, noiseless evolution to t₀.
pub fn insert_discrete_error(
    state: &SectorState,
    pauli: SitePauli,
    site: usize,
    evolver: &mut SectorEvolver,
    t_err: f64,
) -> Result<SectorState> {
    let t0 = evolver.spec.t0;
    if !(0.0..=t0 + 1e-12).contains(&t_err) {
        return Err(Error::Malformed(format!(
            "error time {t_err} outside [0, {t0}]"
        )));
    }
    let mid = evolve_unitary(state, evolver, t_err)?;
    let hit = apply_site_pauli(&mid, pauli, site)?;
    evolve_unitary(&hit, evolver, t0 - t_err)
}

/// Exact Haar average of a fidelity functional over pure single-qubit
/// inputs, via the six Pauli eigenstates (a projective 2-design).
/// The six Pauli eigenstates of the logical qubit — an exact 2-design, so
/// their mean fidelity equals the Haar-average fidelity.
pub fn six_logical_states() -> [(Complex64, Complex64); 6] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
        (Complex64::new(s, 0.0), Complex64::new(s, 0.0)),
        (Complex64::new(s, 0.0), Complex64::new(-s, 0.0)),
        (Complex64::new(s, 0.0), Complex64::new(0.0, s)),
        (Complex64::new(s, 0.0), Complex64::new(0.0, -s)),
    ]
}

pub fn average_fidelity<F>(mut pipeline: F) -> Result<f64>
where
    F: FnMut(Complex64, Complex64) -> Result<f64>,
{
    let mut acc = 0.0;
    for (a, b) in six_logical_states() {
        acc += pipeline(a, b)?;
    }
    Ok(acc / 6.0)
}

/// Which set of fermion-pair errors the decoder's table covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectableSet {
    /// One Majorana from each alternating-site parity class — the errors
    /// dephasing actually produces. (M+1)² patterns.
    Parity,
    /// Every product of at most two Majorana operators on the decoding
    /// region.
    TwoFermion,
}

impl CorrectableSet {
    pub fn vectors(&self, m: usize) -> Vec<BinVec> {
        match self {
            CorrectableSet::Parity => parity_set(m),
            CorrectableSet::TwoFermion => two_fermion_set(m),
        }
    }
}

/// One row of a dephasing sweep: Haar-average transfer fidelity with and
/// without encoding, plus the fraction of probability mass that hit
/// syndromes outside the correction table.
#[derive(Clone, Copy, Debug)]
pub struct SweepPoint {
    pub gamma: f64,
    pub f_encoded: f64,
    pub f_unencoded: f64,
    pub decode_failure_rate: f64,
}

/// The bare one-qubit "code" used for the unencoded baseline: the logical
/// qubit sits directly on site 1 and is read out at site N with no
/// correction step.
pub fn trivial_transfer_code() -> StabilizerCode {
    let code = StabilizerCode::new(1, crate::gf2::BinMatrix::zeros(0, 2))
        .expect("empty generator set is a valid code");
    code.with_logicals(vec![crate::codes::LogicalPair {
        z: BinVec::unit(2, 0),
        x: BinVec::unit(2, 1),
    }])
    .expect("single-qubit logicals are valid")
}

/// Step count for the Strang splitting at rate γ over time t, sized so the
/// splitting error stays below 1e-7 (measured against a dense integrator;
/// the calibration tests pin the constant).
pub fn recommended_steps(spec: &ChainSpec, gamma: f64, t: f64) -> usize {
    // Empirical model: max-element error ≈ C γ λ³ t³ N / steps², with the
    // measured constant C ≈ 0.006 across N = 4..8, γ ≤ 0.5. Target 2e-8 to
    // leave an order of magnitude under the 1e-7 requirement.
    let lambda = spec.lambda.abs().max(1e-12);
    let target = 2e-8;
    let c = 0.006;
    let est = (c * gamma.abs() * lambda.powi(3) * t.abs().powi(3) * spec.n as f64 / target)
        .sqrt()
        .ceil() as usize;
    est.clamp(64, 200_000)
}

fn combine_summaries(
    a: &RecoverySummary,
    b: &RecoverySummary,
    c: &RecoverySummary,
    alpha: Complex64,
    beta: Complex64,
) -> RecoverySummary {
    let wa = alpha.norm_sqr();
    let wb = beta.norm_sqr();
    let wc = alpha * beta.conj();
    let t = (0..a.t.len())
        .map(|s| {
            let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] = wa * a.t[s][i][j]
                        + wb * b.t[s][i][j]
                        + wc * c.t[s][i][j]
                        + wc.conj() * c.t[s][j][i].conj();
                }
            }
            m
        })
        .collect();
    RecoverySummary { t }
}

/// Six-state-average fidelity and failed-decode mass from the three
/// generator summaries (|0⟩⟨0|, |1⟩⟨1|, |0⟩⟨1| evolved through the channel).
fn six_state_stats(
    dec: &Decoder,
    a: &RecoverySummary,
    b: &RecoverySummary,
    c: &RecoverySummary,
) -> (f64, f64) {
    let mut fsum = 0.0;
    let mut failsum = 0.0;
    for (alpha, beta) in six_logical_states() {
        let sm = combine_summaries(a, b, c, alpha, beta);
        let (f, fail) = dec.fidelity_from_summary(&sm, alpha, beta);
        fsum += f;
        failsum += fail;
    }
    (fsum / 6.0, failsum / 6.0)
}

fn sweep_point(
    kernel: &StrangKernel,
    enc_objs: &[SectorState; 3],
    tri_objs: &[SectorState; 3],
    enc_dec: &Decoder,
    tri_dec: &Decoder,
    gamma: f64,
) -> Result<SweepPoint> {
    let summarize = |dec: &Decoder, o: &SectorState| -> Result<RecoverySummary> {
        dec.recovery_summary(&kernel.evolve(o, gamma)?)
    };
    let ea = summarize(enc_dec, &enc_objs[0])?;
    let eb = summarize(enc_dec, &enc_objs[1])?;
    let ec = summarize(enc_dec, &enc_objs[2])?;
    let (f_encoded, decode_failure_rate) = six_state_stats(enc_dec, &ea, &eb, &ec);
    let ta = summarize(tri_dec, &tri_objs[0])?;
    let tb = summarize(tri_dec, &tri_objs[1])?;
    let tc = summarize(tri_dec, &tri_objs[2])?;
    let (f_unencoded, _) = six_state_stats(tri_dec, &ta, &tb, &tc);
    Ok(SweepPoint {
        gamma,
        f_encoded,
        f_unencoded,
        decode_failure_rate,
    })
}

/// Sweep the dephasing rate and compare encoded transfer (through the full
/// encode → dephase → measure-correct pipeline) against the bare site-1 →
/// site-N baseline. Writes CSV rows `gamma,f_encoded,f_unencoded,
/// decode_failure_rate` to `out` and returns the points. Points are
/// computed on parallel threads; the output order and values are
/// deterministic.
pub fn run_sweep(
    spec: &ChainSpec,
    code: &StabilizerCode,
    gammas: &[f64],
    out: &mut dyn std::io::Write,
) -> Result<Vec<SweepPoint>> {
    run_sweep_opts(spec, code, gammas, CorrectableSet::Parity, None, out)
}

pub fn run_sweep_opts(
    spec: &ChainSpec,
    code: &StabilizerCode,
    gammas: &[f64],
    set: CorrectableSet,
    steps_override: Option<usize>,
    out: &mut dyn std::io::Write,
) -> Result<Vec<SweepPoint>> {
    let n = spec.n;
    let t0 = spec.t0;
    let gamma_max = gammas.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let steps = steps_override.unwrap_or_else(|| recommended_steps(spec, gamma_max, t0));
    let mut evolver = SectorEvolver::new(spec.clone());
    let enc_dec = Decoder::build(code, &mut evolver, &set.vectors(code.m))?;
    let trivial = trivial_transfer_code();
    let tri_dec = Decoder::build(&trivial, &mut evolver, &[BinVec::zeros(2)])?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let enc0 = encode_pure(&LogicalSpec::new(code.clone(), one, zero, n)?)?;
    let enc1 = encode_pure(&LogicalSpec::new(code.clone(), zero, one, n)?)?;
    let tri0 = encode_pure(&LogicalSpec::new(trivial.clone(), one, zero, n)?)?;
    let tri1 = encode_pure(&LogicalSpec::new(trivial, zero, one, n)?)?;
    let enc_objs = [
        SectorState::outer(&enc0, &enc0),
        SectorState::outer(&enc1, &enc1),
        SectorState::outer(&enc0, &enc1),
    ];
    let tri_objs = [
        SectorState::outer(&tri0, &tri0),
        SectorState::outer(&tri1, &tri1),
        SectorState::outer(&tri0, &tri1),
    ];
    let keys: Vec<(usize, usize)> = enc_objs
        .iter()
        .chain(tri_objs.iter())
        .flat_map(|o| o.blocks.keys().copied())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let kernel = StrangKernel::build(&mut evolver, t0, steps, &keys)?;
    let nthreads = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(gammas.len().max(1));
    let mut points: Vec<Option<SweepPoint>> = vec![None; gammas.len()];
    let chunks: Vec<Result<Vec<(usize, SweepPoint)>>> = std::thread::scope(|scope| {
        let kernel = &kernel;
        let enc_objs = &enc_objs;
        let tri_objs = &tri_objs;
        let enc_dec = &enc_dec;
        let tri_dec = &tri_dec;
        let handles: Vec<_> = (0..nthreads)
            .map(|tid| {
                scope.spawn(move || {
                    let mut acc = Vec::new();
                    let mut idx = tid;
                    while idx < gammas.len() {
                        let p =
                            sweep_point(kernel, enc_objs, tri_objs, enc_dec, tri_dec, gammas[idx])?;
                        acc.push((idx, p));
                        idx += nthreads;
                    }
                    Ok(acc)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    for chunk in chunks {
        for (idx, p) in chunk? {
            points[idx] = Some(p);
        }
    }
    let points: Vec<SweepPoint> = points
        .into_iter()
        .map(|p| p.expect("all sweep points computed"))
        .collect();
    writeln!(out, "gamma,f_encoded,f_unencoded,decode_failure_rate")
        .map_err(|e| Error::Malformed(format!("sweep output: {e}")))?;
    for p in &points {
        writeln!(
            out,
            "{:.10e},{:.10e},{:.10e},{:.10e}",
            p.gamma, p.f_encoded, p.f_unencoded, p.decode_failure_rate
        )
        .map_err(|e| Error::Malformed(format!("sweep output: {e}")))?;
    }
    Ok(points)
}

/// Outcome of the measurement-based preparation protocol for codes whose
/// logical Z is the all-site Z product: prepare |+_L⟩ on the decoding
/// region with an arbitrary rest state, transfer backwards, measure the
/// logical X at the encoding side, and read off the rest's collapsed
/// parity. A fresh logical state placed on the encoding region then
/// transfers perfectly once the target accounts for the parity-conditioned
/// sign flip.
#[derive(Clone, Copy, Debug)]
pub struct CaseIiReport {
    /// Probability of the even-parity (X_L = +1) measurement branch.
    pub p_even: f64,
    /// Probability of the odd-parity branch.
    pub p_odd: f64,
    /// Worst deviation of either collapsed rest state from a Z-parity
    /// eigenstate (should be numerically zero).
    pub parity_deviation: f64,
    /// Six-state-average transfer fidelity after an even-branch preparation.
    pub fidelity_even: Option<f64>,
    /// Six-state-average fidelity after an odd-branch preparation, with the
    /// target's logical sign flipped.
    pub fidelity_odd: Option<f64>,
}

/// Run the preparation protocol with the rest register seeded from
/// `rest_state_seed` (a uniformly random complex vector). Branches with
/// probability below 1e-12 are skipped.
pub fn case_ii_preparation(
    spec: &ChainSpec,
    code: &StabilizerCode,
    rest_state_seed: u64,
) -> Result<CaseIiReport> {
    use rand::{Rng, SeedableRng};
    let n = spec.n;
    let m = code.m;
    if code.k() != 1 {
        return Err(Error::Unsupported(
            "preparation protocol implemented for k = 1 codes".into(),
        ));
    }
    if m >= n {
        return Err(Error::Dimension(format!(
            "code on {m} qubits needs a strictly larger chain than {n}"
        )));
    }
    if n > 14 {
        return Err(Error::Capacity(
            "preparation protocol supported up to 14 sites".into(),
        ));
    }
    let r_bits = n - m;
    let t0 = spec.t0;
    let mut evolver = SectorEvolver::new(spec.clone());
    let decoder = Decoder::build(code, &mut evolver, &parity_set(m))?;
    let zero = Complex64::new(0.0, 0.0);
    // enc-local codewords, placed on the decoding region by shifting
    let cw = codewords(code)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut plus_dec: HashMap<u32, Complex64> = HashMap::new();
    for (set_amp, cwi) in [(s, &cw.0), (s, &cw.1)] {
        for (&d, &a) in cwi {
            *plus_dec.entry(d << r_bits).or_insert(zero) += a * set_amp;
        }
    }
    // seeded random rest register on sites 1..N-M (low bits)
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(rest_state_seed);
    let mut rest: Vec<Complex64> = (0..1u32 << r_bits)
        .map(|_| Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
        .collect();
    let rnorm = rest.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in rest.iter_mut() {
        *c /= rnorm;
    }
    // A = |+_L⟩_dec ⊗ rest, evolved backwards across the chain
    let mut amps: HashMap<u32, Complex64> = HashMap::new();
    for (&hd, &ca) in &plus_dec {
        for (r, &cr) in rest.iter().enumerate() {
            let v = ca * cr;
            if v.norm_sqr() > 0.0 {
                amps.insert(hd | r as u32, v);
            }
        }
    }
    let a_state = PureSectorState::from_amplitudes(n, &amps)?;
    let a_t = pure::evolve_pure(&a_state, &mut evolver, t0)?;
    // reference images of the two logical codewords after the same transfer
    let mut phis: [HashMap<u32, Complex64>; 2] = [HashMap::new(), HashMap::new()];
    for (i, cwi) in [&cw.0, &cw.1].into_iter().enumerate() {
        let mut amps: HashMap<u32, Complex64> = HashMap::new();
        for (&d, &a) in cwi {
            amps.insert(d << r_bits, a);
        }
        let b0 = PureSectorState::from_amplitudes(n, &amps)?;
        let b0_t = pure::evolve_pure(&b0, &mut evolver, t0)?;
        let enc_mask = (1u32 << m) - 1;
        let mut leak = 0.0f64;
        for (&x, &a) in &b0_t.amplitude_map() {
            if x & !enc_mask != 0 {
                leak += a.norm_sqr();
            } else {
                phis[i].insert(x, a);
            }
        }
        if leak.sqrt() > 1e-10 {
            return Err(Error::Frame(format!(
                "transferred codeword leaks {:.3e} outside the encoding region",
                leak.sqrt()
            )));
        }
    }
    // project the arrival onto |±_L⟩ on the encoding region; the leftover
    // register lives on sites M+1..N (high bits)
    let a_amps = a_t.amplitude_map();
    let mut chi = [vec![zero; 1usize << r_bits], vec![zero; 1usize << r_bits]];
    for (&x, &a) in &a_amps {
        let e = x & ((1u32 << m) - 1);
        let r = (x >> m) as usize;
        for (i, phi) in phis.iter().enumerate() {
            if let Some(&p) = phi.get(&e) {
                let contrib = p.conj() * a * s;
                // ⟨±| = (⟨φ0| ± ⟨φ1|)/√2
                chi[0][r] += contrib;
                chi[1][r] += if i == 0 { contrib } else { -contrib };
            }
        }
    }
    let mut p_even = 0.0f64;
    let mut p_odd = 0.0f64;
    let mut parity_deviation = 0.0f64;
    let mut fidelity_even = None;
    let mut fidelity_odd = None;
    for chib in chi.iter() {
        let p: f64 = chib.iter().map(|c| c.norm_sqr()).sum();
        if p < 1e-12 {
            continue;
        }
        let norm = p.sqrt();
        // the collapsed rest must be a Z-parity eigenstate; its sign decides
        // whether the later transfer carries a logical sign flip
        let par: f64 = chib
            .iter()
            .enumerate()
            .map(|(r, c)| {
                let sign = if (r as u32).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                };
                sign * c.norm_sqr() / p
            })
            .sum();
        parity_deviation = parity_deviation.max((par.abs() - 1.0).abs());
        let is_even = par > 0.0;
        // fresh logical state on the encoding region, collapsed rest beside
        // it, transferred forward and decoded
        let mut fsum = 0.0;
        for (alpha, beta) in six_logical_states() {
            let psi_l = encode_pure(&LogicalSpec::new(code.clone(), alpha, beta, m)?)?;
            let mut amps: HashMap<u32, Complex64> = HashMap::new();
            for (&e, &ae) in &psi_l.amplitude_map() {
                for (r, &cr) in chib.iter().enumerate() {
                    let v = ae * cr / norm;
                    if v.norm_sqr() > 0.0 {
                        amps.insert(e | ((r as u32) << m), v);
                    }
                }
            }
            let b = PureSectorState::from_amplitudes(n, &amps)?;
            let b_t = pure::evolve_pure(&b, &mut evolver, t0)?;
            // odd collapsed parity flips the sign of the odd logical part
            let target_beta = if is_even { beta } else { -beta };
            let (f, _) = decoder.corrected_pure_fidelity(&b_t, alpha, target_beta)?;
            fsum += f;
        }
        if is_even {
            p_even = p;
            fidelity_even = Some(fsum / 6.0);
        } else {
            p_odd = p;
            fidelity_odd = Some(fsum / 6.0);
        }
    }
    Ok(CaseIiReport {
        p_even,
        p_odd,
        parity_deviation,
        fidelity_even,
        fidelity_odd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::standard_chain;
    use crate::codes::catalog_entry;
    use crate::gf2::BinMatrix;

    fn trivial_code() -> StabilizerCode {
        let code = StabilizerCode::new(1, BinMatrix::zeros(0, 2)).unwrap();
        let z = {
            let mut v = BinVec::zeros(2);
            v.set(0, true);
            v
        };
        let x = {
            let mut v = BinVec::zeros(2);
            v.set(1, true);
            v
        };
        code.with_logicals(vec![crate::codes::LogicalPair { z, x }])
            .unwrap()
    }

    fn steane() -> StabilizerCode {
        catalog_entry("steane-7").unwrap().css.assemble().unwrap()
    }

    #[test]
    fn trivial_encode_is_site_zero_or_one() {
        let spec_l = LogicalSpec::new(
            trivial_code(),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            4,
        )
        .unwrap();
        let rho = encode(&spec_l).unwrap();
        assert_eq!(rho.blocks.len(), 1);
        let b = &rho.blocks[&(0, 0)];
        assert!((b[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn steane_codeword_sectors() {
        let spec_l = LogicalSpec::new(
            steane(),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            12,
        )
        .unwrap();
        let psi = encode_pure(&spec_l).unwrap();
        let sectors: Vec<usize> = psi.parts.keys().copied().collect();
        assert_eq!(sectors, vec![0, 4]);
        let spec_l = LogicalSpec::new(
            steane(),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            12,
        )
        .unwrap();
        let psi = encode_pure(&spec_l).unwrap();
        let sectors: Vec<usize> = psi.parts.keys().copied().collect();
        assert_eq!(sectors, vec![3, 7]);
    }

    #[test]
    fn encoded_state_stabilizer_eigenvalues() {
        // every generator must fix the codeword with eigenvalue +1
        let code = steane();
        let spec_l = LogicalSpec::new(
            code.clone(),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            7,
        )
        .unwrap();
        let psi = encode_pure(&spec_l).unwrap();
        let amps = psi.amplitude_map();
        for i in 0..code.generators.rows() {
            let g = Pauli::from_symplectic(&code.generators.row(i)).unwrap();
            let moved = apply_pauli_amps(&g, &amps);
            for (&s, &a) in &moved {
                let orig = amps.get(&s).copied().unwrap_or(Complex64::new(0.0, 0.0));
                assert!((a - orig).norm() < 1e-12, "generator {i} not +1");
            }
        }
    }

    #[test]
    fn logical_bloch_expectation() {
        // ⟨Z_L⟩ = |α|² − |β|²
        let code = steane();
        let (alpha, beta) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
        let spec_l = LogicalSpec::new(code.clone(), alpha, beta, 7).unwrap();
        let psi = encode_pure(&spec_l).unwrap();
        let amps = psi.amplitude_map();
        let zl = Pauli::from_symplectic(&code.logicals.as_ref().unwrap()[0].z).unwrap();
        let moved = apply_pauli_amps(&zl, &amps);
        let mut exp = Complex64::new(0.0, 0.0);
        for (&s, &a) in &moved {
            if let Some(&b) = amps.get(&s) {
                exp += b.conj() * a;
            }
        }
        let want = alpha.norm_sqr() - beta.norm_sqr();
        assert!((exp.re - want).abs() < 1e-12);
        assert!(exp.im.abs() < 1e-12);
    }

    #[test]
    fn unitary_evolution_preserves_trace_and_purity() {
        let spec = standard_chain(6, 1.0).unwrap();
        let mut ev = SectorEvolver::new(spec);
        let spec_l = LogicalSpec::new(
            trivial_code(),
            Complex64::new(0.8, 0.0),
            Complex64::new(0.6, 0.0),
            6,
        )
        .unwrap();
        let rho = encode(&spec_l).unwrap();
        let out = evolve_unitary(&rho, &mut ev, 0.7).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-10);
        assert!((out.purity() - 1.0).abs() < 1e-10);
        assert!(out.hermiticity_error() < 1e-12);
    }

    #[test]
    fn dephasing_single_qubit_analytic() {
        // H = 0 is unreachable with positive couplings, so use a 2-site chain
        // with tiny coupling and compare against the analytic e^{−2γt} decay
        // of the off-diagonal element in the γ-dominated regime; exactness of
        // the elementwise damping makes the comparison exact when J→0 terms
        // are included, so instead verify trace and hermiticity plus decay
        // direction here; the quantitative oracle lives in the dense test.
        let spec = standard_chain(2, 1.0).unwrap();
        let mut ev = SectorEvolver::new(spec);
        let spec_l = LogicalSpec::new(
            trivial_code(),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
            2,
        )
        .unwrap();
        let rho = encode(&spec_l).unwrap();
        let out = evolve_dephasing(&rho, &mut ev, 0.3, 0.5, 64).unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-9);
        assert!(out.hermiticity_error() < 1e-9);
        assert!(out.purity() < 1.0 - 1e-3, "dephasing must mix");
    }

    #[test]
    fn z_error_preserves_sectors_x_error_shifts() {
        let spec_l = LogicalSpec::new(
            trivial_code(),
            Complex64::new(0.8, 0.0),
            Complex64::new(0.6, 0.0),
            5,
        )
        .unwrap();
        let rho = encode(&spec_l).unwrap();
        let z = apply_site_pauli(&rho, SitePauli::Z, 3).unwrap();
        let keys_z: Vec<_> = z.blocks.keys().copied().collect();
        let keys_r: Vec<_> = rho.blocks.keys().copied().collect();
        assert_eq!(keys_z, keys_r);
        let x = apply_site_pauli(&rho, SitePauli::X, 3).unwrap();
        for &(a, b) in x.blocks.keys() {
            assert!(a == 1 || a == 2);
            assert!(b == 1 || b == 2);
        }
        assert!((x.trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn y_equals_z_then_x_up_to_global_phase() {
        let spec_l = LogicalSpec::new(
            trivial_code(),
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            4,
        )
        .unwrap();
        let rho = encode(&spec_l).unwrap();
        let y = apply_site_pauli(&rho, SitePauli::Y, 1).unwrap();
        let zx = apply_site_pauli(&apply_site_pauli(&rho, SitePauli::Z, 1).unwrap(), SitePauli::X, 1)
            .unwrap();
        for (k, m) in &y.blocks {
            let o = &zx.blocks[k];
            for (c1, c2) in m.iter().zip(o.iter()) {
                assert!((c1 - c2).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn six_state_average_of_identity_is_one() {
        let avg = average_fidelity(|_a, _b| Ok(1.0)).unwrap();
        assert!((avg - 1.0).abs() < 1e-15);
    }

    #[test]
    fn six_state_average_of_depolarizing_is_half() {
        // a completely depolarizing logical channel sends every input to 𝟙/2:
        // fidelity of any pure target against 𝟙/2 is 1/2
        let avg = average_fidelity(|_a, _b| Ok(0.5)).unwrap();
        assert!((avg - 0.5).abs() < 1e-15);
    }
}
