//! Arrival-frame decoding. At the transfer time the chain maps every
//! Majorana mode to a signed mirror mode, so the code's stabilizers can be
//! pushed through the evolution exactly and re-expressed on the decoding
//! region. Decoding then happens in that conjugated frame: syndrome
//! projectors built from translated numeric codewords, a correction table
//! over a configurable correctable set, and the recovery channel
//! ρ ↦ Σ_s C_s P_s ρ P_s C_s†.

use super::pure::PureSectorState;
use super::sector::{basis_index, sector_basis, SectorEvolver};
use super::{apply_pauli_amps, encode_pure, LogicalSpec, SectorState};
use crate::chain::{majorana_propagator, ChainSpec};
use crate::codes::{base_column, ErrorKind, LogicalPair, StabilizerCode};
use crate::error::{Error, Result};
use crate::gf2::{BinMatrix, BinVec};
use crate::pauli::{majorana_to_pauli, pauli_to_majorana, MajoranaOp, Pauli};
use ndarray::Array2;
use num_complex::Complex64;
use std::collections::HashMap;

type SparseAmps = HashMap<u32, Complex64>;

/// The code conjugated to the arrival time: an M-qubit stabilizer code on
/// the decoding region (sites N−M+1..N relabeled 1..M) plus the sign each
/// generator and logical picked up in transit.
#[derive(Clone)]
pub struct ArrivalFrame {
    pub n: usize,
    pub code: StabilizerCode,
    /// true ⇒ the transported generator is −1 times the stored Pauli.
    pub signs: Vec<bool>,
    /// Signs of the transported (Z_L, X_L) pairs.
    pub logical_signs: Vec<(bool, bool)>,
}

/// Transport one M-qubit Pauli (symplectic form, sites 1..M of the chain)
/// through time t and restrict it to the decoding region. Z-support over
/// the rest of the chain is dropped — legitimate against a rest state that
/// Z operators fix, which the decoding contract assumes.
fn transport_pauli(
    sym: &BinVec,
    prop_o: &Array2<f64>,
    n: usize,
    m: usize,
) -> Result<(BinVec, bool)> {
    let small = Pauli::from_symplectic(sym)?;
    // embed at sites 1..M of the N-site chain
    let mut emb = Pauli::identity(n);
    for i in 0..m {
        emb.z.set(i, small.z.get(i));
        emb.x.set(i, small.x.get(i));
    }
    emb.phase = small.phase;
    let mono = pauli_to_majorana(&emb);
    let mut acc = MajoranaOp::identity(n).scaled(mono.phase);
    for &j in &mono.indices {
        // c_j(t) = Σ_a O_{aj} c_a must be a signed unit vector at PST times
        let mut best = 0usize;
        let mut best_abs = 0.0;
        for a in 0..2 * n {
            let v = prop_o[(a, j)].abs();
            if v > best_abs {
                best_abs = v;
                best = a;
            }
        }
        let mut leak: f64 = 0.0;
        for a in 0..2 * n {
            if a != best {
                leak = leak.max(prop_o[(a, j)].abs());
            }
        }
        if (best_abs - 1.0).abs() > 1e-10 || leak > 1e-10 {
            return Err(Error::Frame(format!(
                "mode {j} does not arrive on a single mode (weight {best_abs:.3e}, leakage {leak:.3e})"
            )));
        }
        acc = acc.mul(&MajoranaOp::single(n, best));
        if prop_o[(best, j)] < 0.0 {
            acc = acc.scaled(2);
        }
    }
    let arr = majorana_to_pauli(&acc);
    let shift = n - m;
    for i in 0..shift {
        if arr.x.get(i) {
            return Err(Error::Frame(format!(
                "transported operator has bit-flip support outside the decoding region (site {})",
                i + 1
            )));
        }
    }
    let mut z = BinVec::zeros(m);
    let mut x = BinVec::zeros(m);
    for i in 0..m {
        z.set(i, arr.z.get(shift + i));
        x.set(i, arr.x.get(shift + i));
    }
    // canonical Hermitian phase is i^{|z∧x|}; the leftover must be ±1
    let base: u8 = if z.dot(&x) { 1 } else { 0 };
    let diff = (arr.phase + 4 - base) % 4;
    let neg = match diff {
        0 => false,
        2 => true,
        _ => {
            return Err(Error::Frame(
                "transported operator arrived with a non-Hermitian phase".into(),
            ))
        }
    };
    Ok((z.concat(&x), neg))
}

/// Conjugate a code through the chain evolution at time t and express it on
/// the decoding region. The input code sits on sites 1..M; the output code
/// is labeled on the decoding region's own qubits 1..M.
pub fn arrival_frame(code: &StabilizerCode, spec: &ChainSpec, t: f64) -> Result<ArrivalFrame> {
    let n = spec.n;
    let m = code.m;
    if m > n {
        return Err(Error::Dimension(format!(
            "code on {m} qubits cannot embed in a chain of {n}"
        )));
    }
    let prop = majorana_propagator(spec, t)?;
    let rows = code.generators.rows();
    let mut gen = BinMatrix::zeros(rows, 2 * m);
    let mut signs = Vec::with_capacity(rows);
    for i in 0..rows {
        let (sym, neg) = transport_pauli(&code.generators.row(i), &prop.o, n, m)?;
        gen.set_row(i, &sym);
        signs.push(neg);
    }
    let mut logical_signs = Vec::new();
    let logicals = match &code.logicals {
        None => None,
        Some(pairs) => {
            let mut out = Vec::with_capacity(pairs.len());
            for p in pairs {
                let (z, zn) = transport_pauli(&p.z, &prop.o, n, m)?;
                let (x, xn) = transport_pauli(&p.x, &prop.o, n, m)?;
                logical_signs.push((zn, xn));
                out.push(LogicalPair { z, x });
            }
            Some(out)
        }
    };
    let arrival = StabilizerCode::new(m, gen)?;
    let arrival = match logicals {
        Some(pairs) => arrival.with_logicals(pairs)?,
        None => arrival,
    };
    Ok(ArrivalFrame {
        n,
        code: arrival,
        signs,
        logical_signs,
    })
}

/// Syndrome → correction map over a chosen correctable set. Corrections
/// are symplectic (z|x) vectors on the decoding region.
pub struct SyndromeTable {
    pub rows: usize,
    pub entries: HashMap<u64, BinVec>,
}

impl SyndromeTable {
    /// Build the table against a code's generators. Two set elements may
    /// share a syndrome only if they differ by a stabilizer; anything else
    /// means the set is not correctable by this code.
    pub fn build(code: &StabilizerCode, set: &[BinVec]) -> Result<Self> {
        let rows = code.generators.rows();
        if rows > 64 {
            return Err(Error::Capacity("syndrome tables support ≤ 64 generators".into()));
        }
        let rref = code.group_rref();
        let mut entries: HashMap<u64, BinVec> = HashMap::new();
        for e in set {
            if e.len() != 2 * code.m {
                return Err(Error::Dimension(format!(
                    "correctable-set vector of length {} for an M={} code",
                    e.len(),
                    code.m
                )));
            }
            let s = code.syndrome_bits(e);
            match entries.get(&s) {
                None => {
                    entries.insert(s, e.clone());
                }
                Some(prev) => {
                    let mut d = prev.clone();
                    d.xor_assign(e);
                    if !rref.contains(&d) {
                        return Err(Error::InvalidCode(format!(
                            "correctable set is not distinguishable: inequivalent errors share syndrome {s:#b}"
                        )));
                    }
                }
            }
        }
        match entries.get(&0) {
            None => {
                entries.insert(0, BinVec::zeros(2 * code.m));
            }
            Some(e0) => {
                if !rref.contains(e0) {
                    return Err(Error::InvalidCode(
                        "zero syndrome maps to a non-trivial correction".into(),
                    ));
                }
                entries.insert(0, BinVec::zeros(2 * code.m));
            }
        }
        Ok(SyndromeTable { rows, entries })
    }

    pub fn correction(&self, s: u64) -> Option<&BinVec> {
        self.entries.get(&s)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Correctable set: one fermionic error from each parity class, i.e.
/// {𝟙, c_a} × {𝟙, c_b} with a, b ranging over the two alternating-site
/// Majorana classes of the decoding region. (M+1)² vectors.
pub fn parity_set(m: usize) -> Vec<BinVec> {
    let col = |idx: usize| base_column(m, ErrorKind::E, idx);
    let mut class_a = Vec::with_capacity(m);
    let mut class_b = Vec::with_capacity(m);
    for p in 1..=m {
        if p % 2 == 1 {
            class_a.push(col(p - 1));
            class_b.push(col(m + p - 1));
        } else {
            class_a.push(col(m + p - 1));
            class_b.push(col(p - 1));
        }
    }
    let mut out = Vec::with_capacity((m + 1) * (m + 1));
    out.push(BinVec::zeros(2 * m));
    for a in &class_a {
        out.push(a.clone());
    }
    for b in &class_b {
        out.push(b.clone());
    }
    for a in &class_a {
        for b in &class_b {
            let mut v = a.clone();
            v.xor_assign(b);
            out.push(v);
        }
    }
    out
}

/// Correctable set: every product of at most two Majorana operators on the
/// decoding region — 1 + 2M singles + C(2M,2) pairs.
pub fn two_fermion_set(m: usize) -> Vec<BinVec> {
    let cols: Vec<BinVec> = (0..2 * m).map(|i| base_column(m, ErrorKind::E, i)).collect();
    let mut out = Vec::new();
    out.push(BinVec::zeros(2 * m));
    for c in &cols {
        out.push(c.clone());
    }
    for i in 0..2 * m {
        for j in i + 1..2 * m {
            let mut v = cols[i].clone();
            v.xor_assign(&cols[j]);
            out.push(v);
        }
    }
    out
}

/// Correctable set: bit-flip patterns of weight ≤ radius (for repetition
/// codes under majority vote).
pub fn bitflip_set(m: usize, radius: usize) -> Vec<BinVec> {
    assert!(m <= 20, "bit-flip sets are enumerated exhaustively");
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        if (mask.count_ones() as usize) <= radius {
            let mut v = BinVec::zeros(2 * m);
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    v.set(m + i, true);
                }
            }
            out.push(v);
        }
    }
    out.sort_by_key(|v| v.weight());
    out
}

fn sparse_inner(a: &SparseAmps, b: &SparseAmps) -> Complex64 {
    let (small, big, conj_small) = if a.len() <= b.len() {
        (a, b, true)
    } else {
        (b, a, false)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    for (&s, &v) in small {
        if let Some(&w) = big.get(&s) {
            acc += if conj_small { v.conj() * w } else { w.conj() * v };
        }
    }
    acc
}

/// Destabilizers of a full-rank generator set: D_j anticommutes with
/// generator j and commutes with the rest. Solved over GF(2) from the
/// symplectic products.
fn destabilizers(gen: &BinMatrix) -> Result<Vec<BinVec>> {
    let rows = gen.rows();
    let m2 = gen.cols();
    // sp(d, g) = d·swap(g), so the constraint matrix has rows swap(g_i)
    let mut a = BinMatrix::zeros(rows, m2);
    let m = m2 / 2;
    for i in 0..rows {
        let g = gen.row(i);
        let mut sw = BinVec::zeros(m2);
        for c in 0..m {
            sw.set(c, g.get(m + c));
            sw.set(m + c, g.get(c));
        }
        a.set_row(i, &sw);
    }
    // row-reduce [A | I] so each unit target can be read off the transform
    let aug = a.hstack(&BinMatrix::identity(rows))?;
    let r = aug.rref();
    let pivots: Vec<usize> = r.pivots.clone();
    if pivots.iter().filter(|&&p| p < m2).count() != rows {
        return Err(Error::InvalidCode(
            "generators are not independent; destabilizers undefined".into(),
        ));
    }
    let mut out = Vec::with_capacity(rows);
    for j in 0..rows {
        let mut d = BinVec::zeros(m2);
        for (ridx, &p) in pivots.iter().enumerate() {
            // transform block column m2+j says whether e_j needs this row
            if r.matrix.get(ridx, m2 + j) {
                d.set(p, true);
            }
        }
        out.push(d);
    }
    Ok(out)
}

/// Precomputed recovery machinery for one code on one chain: the arrival
/// frame, the syndrome table, and the Kraus operators K_s = C_s P_s in
/// sparse decoding-region form.
pub struct Decoder {
    pub frame: ArrivalFrame,
    pub table: SyndromeTable,
    pub n: usize,
    pub m: usize,
    /// Arrival codewords (the exact evolved images of |0_L⟩, |1_L⟩) on the
    /// decoding region.
    pub codewords: [SparseAmps; 2],
    chi: Vec<[SparseAmps; 2]>,
    phi: Vec<[SparseAmps; 2]>,
    in_table: Vec<bool>,
    /// overlaps[s][p][i] = ⟨c̃_p | φ_s^i⟩ — how each corrected branch lands
    /// on the arrival codewords.
    overlaps: Vec<[[Complex64; 2]; 2]>,
}

/// Per-syndrome second-order statistics of a state: t[s][i][i'] traces the
/// syndrome-s branch ⟨χ_s^i ⊗ r| ρ |χ_s^{i'} ⊗ r⟩ over the rest register.
/// Everything downstream (fidelity for any logical amplitudes, failed-decode
/// mass) is bilinear in these.
pub struct RecoverySummary {
    pub t: Vec<[[Complex64; 2]; 2]>,
}

impl Decoder {
    /// Build the full recovery machinery. Evolves the two codewords through
    /// the chain (validating the frame), derives destabilizers, and
    /// assembles one Kraus operator per syndrome.
    pub fn build(
        code: &StabilizerCode,
        evolver: &mut SectorEvolver,
        set: &[BinVec],
    ) -> Result<Self> {
        if code.k() != 1 {
            return Err(Error::Unsupported(format!(
                "recovery machinery implemented for k = 1 codes, got k = {}",
                code.k()
            )));
        }
        let spec = evolver.spec.clone();
        let n = spec.n;
        let m = code.m;
        let t0 = spec.t0;
        let frame = arrival_frame(code, &spec, t0)?;
        let table = SyndromeTable::build(&frame.code, set)?;
        let shift = n - m;
        let rest_mask: u32 = (1u32 << shift) - 1;
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut codewords: [SparseAmps; 2] = [HashMap::new(), HashMap::new()];
        for (i, cw) in codewords.iter_mut().enumerate() {
            let (alpha, beta) = if i == 0 { (one, zero) } else { (zero, one) };
            let psi = encode_pure(&LogicalSpec::new(code.clone(), alpha, beta, n)?)?;
            let arrived = super::pure::evolve_pure(&psi, evolver, t0)?;
            let mut leak = 0.0f64;
            for (&s, &a) in &arrived.amplitude_map() {
                if s & rest_mask != 0 {
                    leak += a.norm_sqr();
                } else {
                    cw.insert(s >> shift, a);
                }
            }
            if leak.sqrt() > 1e-10 {
                return Err(Error::Frame(format!(
                    "codeword {i} leaks {:.3e} amplitude outside the decoding region",
                    leak.sqrt()
                )));
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = sparse_inner(&codewords[i], &codewords[j]);
                if (got - Complex64::new(want, 0.0)).norm() > 1e-9 {
                    return Err(Error::Numerics(format!(
                        "arrival codewords not orthonormal: ⟨{i}|{j}⟩ = {got}"
                    )));
                }
            }
        }
        // transported generators must fix the numeric codewords with their
        // transported signs — ties the algebraic frame to the evolution
        for (gi, neg) in frame.signs.iter().enumerate() {
            let g = Pauli::from_symplectic(&frame.code.generators.row(gi))?;
            for cw in &codewords {
                let moved = apply_pauli_amps(&g, cw);
                let ov = sparse_inner(cw, &moved);
                let want = if *neg { -1.0 } else { 1.0 };
                if (ov - Complex64::new(want, 0.0)).norm() > 1e-8 {
                    return Err(Error::Frame(format!(
                        "transported generator {gi} does not stabilize the arrival codewords (⟨S⟩ = {ov})"
                    )));
                }
            }
        }
        let dest = destabilizers(&frame.code.generators)?;
        let rows = dest.len();
        let n_syn = 1usize << rows;
        let mut chi = Vec::with_capacity(n_syn);
        let mut phi = Vec::with_capacity(n_syn);
        let mut in_table = Vec::with_capacity(n_syn);
        for s in 0..n_syn {
            let mut r_op = Pauli::identity(m);
            for (j, d) in dest.iter().enumerate() {
                if s >> j & 1 == 1 {
                    r_op = r_op.mul(&Pauli::from_symplectic(d)?);
                }
            }
            let chis = [
                apply_pauli_amps(&r_op, &codewords[0]),
                apply_pauli_amps(&r_op, &codewords[1]),
            ];
            let (phis, tabled) = match table.correction(s as u64) {
                Some(c) => {
                    let c_op = Pauli::from_symplectic(c)?;
                    (
                        [
                            apply_pauli_amps(&c_op, &chis[0]),
                            apply_pauli_amps(&c_op, &chis[1]),
                        ],
                        true,
                    )
                }
                None => (chis.clone(), false),
            };
            chi.push(chis);
            phi.push(phis);
            in_table.push(tabled);
        }
        // Kraus completeness: Σ_s Σ_i |χ_s^i⟩⟨χ_s^i| = 𝟙 on the decoding region
        let dim = 1usize << m;
        let mut diag = vec![0.0f64; dim];
        let mut offdiag: f64 = 0.0;
        for chis in &chi {
            for c in chis {
                for (&a, &va) in c {
                    diag[a as usize] += va.norm_sqr();
                    for (&b, &vb) in c {
                        if b > a {
                            offdiag = offdiag.max((va * vb.conj()).norm());
                        }
                    }
                }
            }
        }
        let _ = offdiag; // off-diagonals cancel in the sum; check the sums
        let mut off_sums: HashMap<(u32, u32), Complex64> = HashMap::new();
        for chis in &chi {
            for c in chis {
                for (&a, &va) in c {
                    for (&b, &vb) in c {
                        if b > a {
                            *off_sums.entry((a, b)).or_insert(Complex64::new(0.0, 0.0)) +=
                                va * vb.conj();
                        }
                    }
                }
            }
        }
        for d in &diag {
            if (d - 1.0).abs() > 1e-10 {
                return Err(Error::Numerics(format!(
                    "syndrome projectors do not resolve the identity (diagonal {d})"
                )));
            }
        }
        for v in off_sums.values() {
            if v.norm() > 1e-10 {
                return Err(Error::Numerics(
                    "syndrome projectors do not resolve the identity (off-diagonal residue)"
                        .into(),
                ));
            }
        }
        let overlaps = phi
            .iter()
            .map(|phis| {
                let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
                for p in 0..2 {
                    for i in 0..2 {
                        g[p][i] = sparse_inner(&codewords[p], &phis[i]);
                    }
                }
                g
            })
            .collect();
        Ok(Decoder {
            frame,
            table,
            n,
            m,
            codewords,
            chi,
            phi,
            in_table,
            overlaps,
        })
    }

    fn shift(&self) -> usize {
        self.n - self.m
    }

    /// The arrival-frame logical state α|c̃₀⟩ + β|c̃₁⟩.
    pub fn arrival_state(&self, alpha: Complex64, beta: Complex64) -> SparseAmps {
        let mut out = SparseAmps::new();
        for (&s, &a) in &self.codewords[0] {
            *out.entry(s).or_insert(Complex64::new(0.0, 0.0)) += alpha * a;
        }
        for (&s, &a) in &self.codewords[1] {
            *out.entry(s).or_insert(Complex64::new(0.0, 0.0)) += beta * a;
        }
        out
    }

    /// Apply the recovery channel ρ ↦ Σ_s C_s P_s ρ P_s C_s†. Returns the
    /// corrected state and the probability mass routed through syndromes
    /// absent from the table (identity-corrected).
    pub fn measure_correct(&self, state: &SectorState) -> Result<(SectorState, f64)> {
        if state.n != self.n {
            return Err(Error::Dimension(format!(
                "state on {} sites, decoder built for {}",
                state.n, self.n
            )));
        }
        let shift = self.shift();
        let rest_mask: u32 = (1u32 << shift) - 1;
        let n = self.n;
        let all_bases: Vec<Vec<u32>> = (0..=n).map(|w| sector_basis(n, w)).collect();
        // per sector: (dec, rest) split of each basis string, plus an index
        // from dec string to the columns carrying it
        let decomp: Vec<Vec<(u32, u32)>> = all_bases
            .iter()
            .map(|basis| basis.iter().map(|&x| (x >> shift, x & rest_mask)).collect())
            .collect();
        let by_dec: Vec<HashMap<u32, Vec<usize>>> = decomp
            .iter()
            .map(|d| {
                let mut m: HashMap<u32, Vec<usize>> = HashMap::new();
                for (col, &(dp, _)) in d.iter().enumerate() {
                    m.entry(dp).or_default().push(col);
                }
                m
            })
            .collect();
        let mut out = SectorState::empty(n);
        let mut fail_mass = 0.0f64;
        for (s, (chis, phis)) in self.chi.iter().zip(self.phi.iter()).enumerate() {
            let tabled = self.in_table[s];
            for (&(a, b), blk) in &state.blocks {
                // u^i[r][col] = Σ_d conj(χ^i[d]) ρ[(d,r), col]
                let mut u: [HashMap<u32, ndarray::Array1<Complex64>>; 2] =
                    [HashMap::new(), HashMap::new()];
                for (row, &(d, r)) in decomp[a].iter().enumerate() {
                    for i in 0..2 {
                        if let Some(&c) = chis[i].get(&d) {
                            let acc = u[i]
                                .entry(r)
                                .or_insert_with(|| ndarray::Array1::zeros(blk.ncols()));
                            let cc = c.conj();
                            acc.zip_mut_with(&blk.row(row), |t, &v| *t += cc * v);
                        }
                    }
                }
                // v^{ii'}[(r, r')] = Σ_{d'} u^i[r][col(d',r')] χ^{i'}[d']
                let mut vmat: [[HashMap<(u32, u32), Complex64>; 2]; 2] = Default::default();
                for i in 0..2 {
                    for (&r, uvec) in &u[i] {
                        for ip in 0..2 {
                            for (&dp, &cp) in &chis[ip] {
                                if let Some(cols) = by_dec[b].get(&dp) {
                                    for &col in cols {
                                        let r2 = decomp[b][col].1;
                                        let val = uvec[col] * cp;
                                        if val.norm_sqr() > 0.0 {
                                            *vmat[i][ip]
                                                .entry((r, r2))
                                                .or_insert(Complex64::new(0.0, 0.0)) += val;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                // accumulate |φ^i⟩⟨φ^{i'}| ⊗ v^{ii'} into the output
                for i in 0..2 {
                    for ip in 0..2 {
                        for (&(r, r2), &val) in &vmat[i][ip] {
                            for (&dphi, &aphi) in &phis[i] {
                                let wa = (r.count_ones() + dphi.count_ones()) as usize;
                                let xa = r | (dphi << shift);
                                let ia = basis_index(&all_bases[wa], xa);
                                for (&dphi2, &aphi2) in &phis[ip] {
                                    let wb = (r2.count_ones() + dphi2.count_ones()) as usize;
                                    let xb = r2 | (dphi2 << shift);
                                    let ib = basis_index(&all_bases[wb], xb);
                                    let dims = (all_bases[wa].len(), all_bases[wb].len());
                                    let tgt = out
                                        .blocks
                                        .entry((wa, wb))
                                        .or_insert_with(|| Array2::zeros(dims));
                                    tgt[(ia, ib)] += aphi * aphi2.conj() * val;
                                }
                            }
                        }
                    }
                }
                if !tabled && a == b {
                    for i in 0..2 {
                        for (&(r, r2), &val) in &vmat[i][i] {
                            if r == r2 {
                                fail_mass += val.re;
                            }
                        }
                    }
                }
            }
        }
        Ok((out, fail_mass))
    }

    /// Compute the per-syndrome branch statistics of a state without
    /// materializing the corrected density matrix: t[s][i][i'] =
    /// Σ_r ⟨χ_s^i ⊗ r| ρ |χ_s^{i'} ⊗ r⟩.
    pub fn recovery_summary(&self, state: &SectorState) -> Result<RecoverySummary> {
        if state.n != self.n {
            return Err(Error::Dimension(format!(
                "state on {} sites, decoder built for {}",
                state.n, self.n
            )));
        }
        let shift = self.shift();
        let rest_mask: u32 = (1u32 << shift) - 1;
        let n = self.n;
        let mut bases: HashMap<usize, Vec<u32>> = HashMap::new();
        let mut groups: HashMap<usize, HashMap<u32, Vec<(usize, u32)>>> = HashMap::new();
        for &(a, b) in state.blocks.keys() {
            bases
                .entry(b)
                .or_insert_with(|| sector_basis(n, b));
            groups.entry(a).or_insert_with(|| {
                let mut g: HashMap<u32, Vec<(usize, u32)>> = HashMap::new();
                for (row, &x) in sector_basis(n, a).iter().enumerate() {
                    g.entry(x >> shift).or_default().push((row, x & rest_mask));
                }
                g
            });
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut t = vec![[[zero; 2]; 2]; self.chi.len()];
        for (&(a, b), blk) in &state.blocks {
            let ga = &groups[&a];
            let bb = &bases[&b];
            for (s, chis) in self.chi.iter().enumerate() {
                for i in 0..2 {
                    for (&d, &cd) in &chis[i] {
                        let rows = match ga.get(&d) {
                            Some(r) => r,
                            None => continue,
                        };
                        let cdc = cd.conj();
                        for ip in 0..2 {
                            for (&dp, &cp) in &chis[ip] {
                                let w = cdc * cp;
                                for &(row, r) in rows {
                                    let y = r | (dp << shift);
                                    if y.count_ones() as usize != b {
                                        continue;
                                    }
                                    let col = basis_index(bb, y);
                                    t[s][i][ip] += w * blk[(row, col)];
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(RecoverySummary { t })
    }

    /// Post-correction fidelity of a summarized state against the logical
    /// target (α, β), plus the mass that flowed through untabled syndromes.
    pub fn fidelity_from_summary(
        &self,
        sm: &RecoverySummary,
        alpha: Complex64,
        beta: Complex64,
    ) -> (f64, f64) {
        let c = [alpha, beta];
        let mut fid = 0.0f64;
        let mut fail = 0.0f64;
        for (s, ts) in sm.t.iter().enumerate() {
            // ov_i = ⟨ψ_tgt|φ_s^i⟩ with ⟨ψ_tgt| = Σ_p conj(c_p)⟨c̃_p|
            let mut ov = [Complex64::new(0.0, 0.0); 2];
            for i in 0..2 {
                for p in 0..2 {
                    ov[i] += c[p].conj() * self.overlaps[s][p][i];
                }
            }
            let mut f = Complex64::new(0.0, 0.0);
            for i in 0..2 {
                for ip in 0..2 {
                    f += ov[i] * ov[ip].conj() * ts[i][ip];
                }
            }
            fid += f.re;
            if !self.in_table[s] {
                fail += ts[0][0].re + ts[1][1].re;
            }
        }
        (fid, fail)
    }

    /// Mass through untabled syndromes recorded in a summary.
    pub fn summary_fail_mass(&self, sm: &RecoverySummary) -> f64 {
        sm.t
            .iter()
            .enumerate()
            .filter(|(s, _)| !self.in_table[*s])
            .map(|(_, ts)| ts[0][0].re + ts[1][1].re)
            .sum()
    }

    /// Logical overlap matrix T[p][q] = Σ_r ⟨r⊗c̃_p| ρ |r⊗c̃_q⟩ of a state
    /// against the arrival codewords; fidelities for any (α,β) follow by
    /// linearity.
    pub fn logical_overlap_matrix(&self, state: &SectorState) -> [[Complex64; 2]; 2] {
        let shift = self.shift();
        let rest_mask: u32 = (1u32 << shift) - 1;
        let n = self.n;
        let mut t = [[Complex64::new(0.0, 0.0); 2]; 2];
        let mut bases: HashMap<usize, Vec<u32>> = HashMap::new();
        for (&(a, b), blk) in &state.blocks {
            let ba = bases
                .entry(a)
                .or_insert_with(|| sector_basis(n, a))
                .clone();
            let bb = bases.entry(b).or_insert_with(|| sector_basis(n, b));
            for (row, &x) in ba.iter().enumerate() {
                let (dx, rx) = (x >> shift, x & rest_mask);
                for p in 0..2 {
                    let cp = match self.codewords[p].get(&dx) {
                        Some(&c) => c,
                        None => continue,
                    };
                    for q in 0..2 {
                        for (&dy, &cq) in &self.codewords[q] {
                            let y = rx | (dy << shift);
                            if y.count_ones() as usize != b {
                                continue;
                            }
                            if let Ok(col) = bb.binary_search(&y) {
                                t[p][q] += cp.conj() * cq * blk[(row, col)];
                            }
                        }
                    }
                }
            }
        }
        t
    }

    /// F = ⟨ψ_arr| Tr_rest(ρ) |ψ_arr⟩ against the arrival-frame codeword
    /// with the given amplitudes.
    pub fn logical_fidelity(&self, state: &SectorState, alpha: Complex64, beta: Complex64) -> f64 {
        let t = self.logical_overlap_matrix(state);
        let c = [alpha, beta];
        let mut f = Complex64::new(0.0, 0.0);
        for p in 0..2 {
            for q in 0..2 {
                f += c[p].conj() * c[q] * t[p][q];
            }
        }
        f.re
    }

    /// Recovery + fidelity for a pure state in one pass: returns
    /// (Σ_s ‖⟨ψ_tgt| K_s |ψ⟩‖², mass through untabled syndromes).
    pub fn corrected_pure_fidelity(
        &self,
        psi: &PureSectorState,
        alpha: Complex64,
        beta: Complex64,
    ) -> Result<(f64, f64)> {
        if psi.n != self.n {
            return Err(Error::Dimension(format!(
                "state on {} sites, decoder built for {}",
                psi.n, self.n
            )));
        }
        let shift = self.shift();
        let rest_mask: u32 = (1u32 << shift) - 1;
        let target = self.arrival_state(alpha, beta);
        let amps = psi.amplitude_map();
        let mut fid = 0.0f64;
        let mut fail = 0.0f64;
        for (s, chis) in self.chi.iter().enumerate() {
            let phis = &self.phi[s];
            // u^i[r] = Σ_d conj(χ^i[d]) ψ[(d,r)]
            let mut u: [HashMap<u32, Complex64>; 2] = [HashMap::new(), HashMap::new()];
            for (&x, &a) in &amps {
                let (d, r) = (x >> shift, x & rest_mask);
                for i in 0..2 {
                    if let Some(&c) = chis[i].get(&d) {
                        *u[i].entry(r).or_insert(Complex64::new(0.0, 0.0)) += c.conj() * a;
                    }
                }
            }
            // overlap of each corrected branch with the target
            let ov = [
                sparse_inner(&target, &phis[0]),
                sparse_inner(&target, &phis[1]),
            ];
            let mut rests: Vec<u32> = u[0].keys().chain(u[1].keys()).copied().collect();
            rests.sort_unstable();
            rests.dedup();
            for r in rests {
                let u0 = u[0].get(&r).copied().unwrap_or(Complex64::new(0.0, 0.0));
                let u1 = u[1].get(&r).copied().unwrap_or(Complex64::new(0.0, 0.0));
                fid += (ov[0] * u0 + ov[1] * u1).norm_sqr();
                if !self.in_table[s] {
                    // φ-branches are orthonormal, so the branch mass is direct
                    fail += u0.norm_sqr() + u1.norm_sqr();
                }
            }
        }
        Ok((fid, fail))
    }
}
