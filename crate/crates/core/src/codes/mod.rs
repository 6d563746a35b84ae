//! Stabilizer and CSS codes for Majorana-pair errors.
//!
//! Symplectic convention: a Pauli row is (z|x) of length 2M, and two Paulis
//! commute iff z₁·x₂ + x₁·z₂ = 0. Stabilizer violations of an error e are the
//! symplectic products with the generator rows, i.e. the columns of S̃·Λ·E
//! when e ranges over the columns of an error map E.

mod catalog;
mod search;

pub use catalog::{catalog, catalog_entry, CatalogEntry, Claims};
pub use search::{bounded_search, SearchParams};

use crate::error::{Error, Result};
use crate::gf2::{BinMatrix, BinVec, Rref, MIN_WEIGHT_MAX_RANK};
use std::collections::HashMap;
use std::fmt;

/// Symplectic product of two (z|x) rows over M qubits.
pub fn symplectic_product(a: &BinVec, b: &BinVec) -> bool {
    debug_assert_eq!(a.len(), b.len());
    debug_assert_eq!(a.len() % 2, 0);
    let m = a.len() / 2;
    let (az, ax) = (a.slice(0..m), a.slice(m..2 * m));
    let (bz, bx) = (b.slice(0..m), b.slice(m..2 * m));
    az.dot(&bx) ^ ax.dot(&bz)
}

/// True iff the rows of S̃ mutually commute and are independent.
pub fn is_valid_stabilizer(s: &BinMatrix) -> Result<bool> {
    if s.cols() % 2 != 0 {
        return Err(Error::Malformed(format!(
            "symplectic matrix needs an even column count, got {}",
            s.cols()
        )));
    }
    for i in 0..s.rows() {
        for j in i..s.rows() {
            if symplectic_product(&s.row(i), &s.row(j)) {
                return Ok(false);
            }
        }
    }
    Ok(s.rank() == s.rows())
}

/// A logical operator pair; both entries are (z|x) symplectic rows.
#[derive(Clone, Debug)]
pub struct LogicalPair {
    pub z: BinVec,
    pub x: BinVec,
}

/// Stabilizer code on M qubits: independent, mutually commuting generator
/// rows, plus (optionally) a symplectic basis of logical pairs.
#[derive(Clone)]
pub struct StabilizerCode {
    pub m: usize,
    pub generators: BinMatrix,
    pub logicals: Option<Vec<LogicalPair>>,
}

impl StabilizerCode {
    pub fn new(m: usize, generators: BinMatrix) -> Result<Self> {
        if generators.cols() != 2 * m {
            return Err(Error::Dimension(format!(
                "generators have {} columns, expected {}",
                generators.cols(),
                2 * m
            )));
        }
        if !is_valid_stabilizer(&generators)? {
            return Err(Error::InvalidCode(
                "generators do not form a stabilizer group".into(),
            ));
        }
        Ok(StabilizerCode {
            m,
            generators,
            logicals: None,
        })
    }

    pub fn with_logicals(mut self, logicals: Vec<LogicalPair>) -> Result<Self> {
        for pair in &logicals {
            for r in 0..self.generators.rows() {
                let row = self.generators.row(r);
                if symplectic_product(&pair.z, &row) || symplectic_product(&pair.x, &row) {
                    return Err(Error::InvalidCode(
                        "logical operator fails to commute with a stabilizer".into(),
                    ));
                }
            }
            if !symplectic_product(&pair.z, &pair.x) {
                return Err(Error::InvalidCode(
                    "paired logicals must anticommute".into(),
                ));
            }
        }
        self.logicals = Some(logicals);
        Ok(self)
    }

    /// Number of encoded qubits.
    pub fn k(&self) -> usize {
        self.m - self.generators.rows()
    }

    /// Syndrome of a symplectic error vector: one bit per generator.
    pub fn syndrome_of(&self, err: &BinVec) -> BinVec {
        let mut s = BinVec::zeros(self.generators.rows());
        for i in 0..self.generators.rows() {
            s.set(i, symplectic_product(&self.generators.row(i), err));
        }
        s
    }

    /// Syndrome packed into a u64 (generator count ≤ 64 throughout).
    pub fn syndrome_bits(&self, err: &BinVec) -> u64 {
        assert!(self.generators.rows() <= 64);
        let mut bits = 0u64;
        for i in 0..self.generators.rows() {
            if symplectic_product(&self.generators.row(i), err) {
                bits |= 1 << i;
            }
        }
        bits
    }

    /// RREF of the generator rows, for stabilizer-group membership tests.
    pub fn group_rref(&self) -> Rref {
        self.generators.rref()
    }
}

impl fmt::Debug for StabilizerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "StabilizerCode {{ M: {}, generators: {}, k: {} }}",
            self.m,
            self.generators.rows(),
            self.k()
        )
    }
}

/// CSS code: Z-type rows from H₁ (parity check of C₁), X-type rows from G₂
/// (generator of C₂ ⊆ C₁).
#[derive(Clone, Debug)]
pub struct CssCode {
    pub m: usize,
    pub h1: BinMatrix,
    pub g2: BinMatrix,
}

impl CssCode {
    pub fn new(h1: BinMatrix, g2: BinMatrix) -> Result<Self> {
        if h1.cols() != g2.cols() {
            return Err(Error::Dimension(format!(
                "H1 has {} columns, G2 has {}",
                h1.cols(),
                g2.cols()
            )));
        }
        let m = h1.cols();
        if !h1.mul(&g2.transpose())?.is_zero() {
            return Err(Error::InvalidCode("H1·G2ᵀ ≠ 0: C2 ⊄ C1".into()));
        }
        Ok(CssCode { m, h1, g2 })
    }

    /// Build from classical generators: G₁ spans C₁ (so H₁ = nullspace of
    /// G₁), G₂ spans C₂. The table codes in the catalog come in this form.
    pub fn from_generators(g1: &BinMatrix, g2: BinMatrix) -> Result<Self> {
        Self::new(g1.nullspace(), g2)
    }

    pub fn k(&self) -> usize {
        self.m - self.h1.rank() - self.g2.rank()
    }

    /// Generator of C₁ (nullspace of H₁).
    pub fn c1_generator(&self) -> BinMatrix {
        self.h1.nullspace()
    }

    /// Distance of C₁.
    pub fn d1(&self) -> Result<usize> {
        classical_distance(&self.h1)
    }

    /// Distance of C₂^⊥ (G₂ read as a parity check).
    pub fn d2(&self) -> Result<usize> {
        classical_distance(&self.g2)
    }

    /// The block-diagonal stabilizer code: rows (h|0) for h in H₁, then
    /// (0|g) for g in G₂.
    pub fn assemble(&self) -> Result<StabilizerCode> {
        let zero_h = BinMatrix::zeros(self.h1.rows(), self.m);
        let zero_g = BinMatrix::zeros(self.g2.rows(), self.m);
        let top = self.h1.hstack(&zero_h)?;
        let bottom = zero_g.hstack(&self.g2)?;
        let gens = top.vstack(&bottom)?;
        // drop dependent rows if the caller handed a redundant H1/G2
        let gens = if gens.rank() == gens.rows() {
            gens
        } else {
            let r = gens.rref();
            let mut clean = BinMatrix::zeros(r.rank(), 2 * self.m);
            for i in 0..r.rank() {
                clean.set_row(i, &r.matrix.row(i));
            }
            clean
        };
        let mut code = StabilizerCode::new(self.m, gens)?;
        code.logicals = Some(self.logical_pairs()?);
        Ok(code)
    }

    /// Symplectic basis of logical pairs: X-type from C₁/C₂ coset
    /// representatives, Z-type from C₂^⊥/C₁^⊥, Gaussian-paired so that
    /// z_L^(i) anticommutes exactly with x_L^(i).
    pub fn logical_pairs(&self) -> Result<Vec<LogicalPair>> {
        let m = self.m;
        let c1 = self.c1_generator();
        let c2_rref = self.g2.rref();
        let mut x_reps: Vec<BinVec> = Vec::new();
        {
            // rows of C₁ independent modulo C₂
            let mut span = self.g2.clone();
            for i in 0..c1.rows() {
                let cand = c1.row(i);
                if !span.rref().contains(&cand) {
                    x_reps.push(cand.clone());
                    span = span.vstack(&row_matrix(&cand))?;
                }
            }
        }
        let c2perp = self.g2.nullspace();
        let mut z_reps: Vec<BinVec> = Vec::new();
        {
            let mut span = self.h1.clone();
            for i in 0..c2perp.rows() {
                let cand = c2perp.row(i);
                if !span.rref().contains(&cand) {
                    z_reps.push(cand.clone());
                    span = span.vstack(&row_matrix(&cand))?;
                }
            }
        }
        let k = self.k();
        if x_reps.len() != k || z_reps.len() != k {
            return Err(Error::InvalidCode(format!(
                "logical extraction found {} X and {} Z representatives for k = {}",
                x_reps.len(),
                z_reps.len(),
                k
            )));
        }
        let _ = c2_rref;
        // pairing matrix D_ij = z_i · x_j must be invertible; transform the
        // Z side by D⁻¹ so the pairing becomes the identity
        let mut d = BinMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                d.set(i, j, z_reps[i].dot(&x_reps[j]));
            }
        }
        let dinv = invert(&d).ok_or_else(|| {
            Error::InvalidCode("degenerate logical pairing (C2 ⊆ C1 violated?)".into())
        })?;
        let mut pairs = Vec::with_capacity(k);
        for i in 0..k {
            let mut z = BinVec::zeros(m);
            for j in 0..k {
                if dinv.get(i, j) {
                    z.xor_assign(&z_reps[j]);
                }
            }
            let zero = BinVec::zeros(m);
            pairs.push(LogicalPair {
                z: z.concat(&zero),
                x: zero.concat(&x_reps[i]),
            });
        }
        Ok(pairs)
    }
}

fn row_matrix(v: &BinVec) -> BinMatrix {
    let mut m = BinMatrix::zeros(1, v.len());
    m.set_row(0, v);
    m
}

fn invert(a: &BinMatrix) -> Option<BinMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return None;
    }
    let aug = a.hstack(&BinMatrix::identity(n)).ok()?;
    let r = aug.rref();
    if r.pivots.len() < n || r.pivots[n - 1] >= n {
        return None;
    }
    let mut inv = BinMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            inv.set(i, j, r.matrix.get(i, n + j));
        }
    }
    Some(inv)
}

/// Distance of the classical code with parity check `check`: exhaustive
/// min-weight enumeration when the dimension allows, otherwise the smallest
/// dependent column set of the check matrix (the same number).
fn classical_distance(check: &BinMatrix) -> Result<usize> {
    let gen = check.nullspace();
    if gen.rows() == 0 {
        return Err(Error::InvalidCode("trivial code has no distance".into()));
    }
    if gen.rows() <= MIN_WEIGHT_MAX_RANK {
        return gen.min_weight();
    }
    for w in 1..=check.cols() {
        if !check.cols_independent_up_to(w) {
            return Ok(w);
        }
    }
    Err(Error::InvalidCode(
        "full-rank check matrix reached in distance search".into(),
    ))
}

/// Which of the three initial-state cases a code falls into, per the role of
/// Z^{⊗M}: a stabilizer (iii), a logical (ii), or neither (i).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CaseClass {
    I,
    II,
    III,
}

impl fmt::Display for CaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseClass::I => "i",
            CaseClass::II => "ii",
            CaseClass::III => "iii",
        })
    }
}

impl std::str::FromStr for CaseClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "i" => Ok(CaseClass::I),
            "ii" => Ok(CaseClass::II),
            "iii" => Ok(CaseClass::III),
            other => Err(Error::Malformed(format!("unknown case '{other}'"))),
        }
    }
}

pub fn classify_case(code: &StabilizerCode) -> CaseClass {
    let m = code.m;
    let mut z_all = BinVec::zeros(2 * m);
    for i in 0..m {
        z_all.set(i, true);
    }
    if code.group_rref().contains(&z_all) {
        return CaseClass::III;
    }
    let commutes = (0..code.generators.rows())
        .all(|i| !symplectic_product(&code.generators.row(i), &z_all));
    if commutes {
        CaseClass::II
    } else {
        CaseClass::I
    }
}

/// Which family of error map: E columns are the Majorana modes themselves,
/// E′ columns are single-site dephasing plus the first-half modes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ErrorKind {
    E,
    Eprime,
}

/// Invertible dictionary between labelled errors and symplectic vectors.
/// Column j of `matrix` is the (z|x) vector of the error in slot j; `perm`
/// assigns base errors to slots (slot j holds base error perm[j]).
#[derive(Clone, Debug)]
pub struct ErrorMap {
    pub m: usize,
    pub kind: ErrorKind,
    pub perm: Vec<usize>,
    pub matrix: BinMatrix,
    inv_perm: Vec<usize>,
}

/// Base error column b of kind E: b < M is the mode c_{b+1}
/// (Z-string · X), b ≥ M the mode c_{N+(b−M)+1} (Z-string through the site).
/// For kind E′: b < M is the plain dephasing Z_{b+1}, b ≥ M the mode c_{b−M+1}.
pub(crate) fn base_column(m: usize, kind: ErrorKind, b: usize) -> BinVec {
    let mut v = BinVec::zeros(2 * m);
    match kind {
        ErrorKind::E => {
            if b < m {
                for q in 0..b {
                    v.set(q, true);
                }
                v.set(m + b, true);
            } else {
                let n = b - m;
                for q in 0..=n {
                    v.set(q, true);
                }
                v.set(m + n, true);
            }
        }
        ErrorKind::Eprime => {
            if b < m {
                v.set(b, true);
            } else {
                let n = b - m;
                for q in 0..n {
                    v.set(q, true);
                }
                v.set(m + n, true);
            }
        }
    }
    v
}

pub fn build_error_map(m: usize, kind: ErrorKind, perm: Vec<usize>) -> Result<ErrorMap> {
    if perm.len() != 2 * m {
        return Err(Error::Malformed(format!(
            "permutation length {} ≠ 2M = {}",
            perm.len(),
            2 * m
        )));
    }
    let mut seen = vec![false; 2 * m];
    for &p in &perm {
        if p >= 2 * m || seen[p] {
            return Err(Error::Malformed("not a permutation of 0..2M".into()));
        }
        seen[p] = true;
    }
    let mut matrix = BinMatrix::zeros(2 * m, 2 * m);
    for (j, &b) in perm.iter().enumerate() {
        let col = base_column(m, kind, b);
        for r in col.iter_ones() {
            matrix.set(r, j, true);
        }
    }
    debug_assert_eq!(matrix.rank(), 2 * m, "error map must be invertible");
    let mut inv_perm = vec![0; 2 * m];
    for (j, &b) in perm.iter().enumerate() {
        inv_perm[b] = j;
    }
    Ok(ErrorMap {
        m,
        kind,
        perm,
        matrix,
        inv_perm,
    })
}

impl ErrorMap {
    pub fn identity_perm(m: usize) -> Vec<usize> {
        (0..2 * m).collect()
    }

    /// The parity assignment for restricted-noise decoding: odd-parity
    /// fermions (c_{2n−1} and the site-even partners c_{N+2n}) fill the first
    /// M slots (Z-columns), the even-parity class fills the X-columns.
    pub fn parity_perm(m: usize) -> Vec<usize> {
        let mut z_slots = Vec::with_capacity(m);
        let mut x_slots = Vec::with_capacity(m);
        for site in 1..=m {
            if site % 2 == 1 {
                z_slots.push(site - 1); // c_site, odd site
                x_slots.push(m + site - 1); // partner mode, even class
            } else {
                x_slots.push(site - 1);
                z_slots.push(m + site - 1);
            }
        }
        z_slots.into_iter().chain(x_slots).collect()
    }

    /// Error vector in slot j.
    pub fn column(&self, j: usize) -> BinVec {
        base_column(self.m, self.kind, self.perm[j])
    }

    /// Slot of a base error (inverse of the permutation).
    pub fn slot_of_base(&self, b: usize) -> usize {
        self.inv_perm[b]
    }

    /// Error vector of a base error, independent of the slot assignment.
    pub fn base_error(&self, b: usize) -> BinVec {
        base_column(self.m, self.kind, b)
    }
}

/// S̃·Λ·E: column j is the syndrome of the error in slot j of the map.
pub fn syndrome_matrix(code: &StabilizerCode, em: &ErrorMap) -> Result<BinMatrix> {
    if em.m != code.m {
        return Err(Error::Dimension(format!(
            "code on {} qubits, error map on {}",
            code.m, em.m
        )));
    }
    let rows = code.generators.rows();
    let mut s = BinMatrix::zeros(rows, 2 * em.m);
    for j in 0..2 * em.m {
        let syn = code.syndrome_of(&em.column(j));
        for i in 0..rows {
            if syn.get(i) {
                s.set(i, j, true);
            }
        }
    }
    Ok(s)
}

/// Largest d such that every subset of at most d−1 syndrome-matrix columns is
/// linearly independent. Pure column independence: degeneracy is deliberately
/// not credited here (see `lemma1_pair_check` for the degenerate notion).
pub fn majorana_distance(code: &StabilizerCode, em: &ErrorMap) -> Result<usize> {
    let s = syndrome_matrix(code, em)?;
    Ok(first_dependent(&s))
}

/// Same, restricted to the given columns of the syndrome matrix.
pub fn majorana_distance_cols(
    code: &StabilizerCode,
    em: &ErrorMap,
    cols: &[usize],
) -> Result<usize> {
    let s = syndrome_matrix(code, em)?;
    let mut sub = BinMatrix::zeros(s.rows(), cols.len());
    for (jj, &j) in cols.iter().enumerate() {
        for i in 0..s.rows() {
            if s.get(i, j) {
                sub.set(i, jj, true);
            }
        }
    }
    Ok(first_dependent(&sub))
}

fn first_dependent(s: &BinMatrix) -> usize {
    for w in 1..=s.cols() {
        if !s.cols_independent_up_to(w) {
            return w;
        }
    }
    s.cols() + 1
}

/// Outcome of a distinguishability enumeration: every pair of errors in the
/// set either has distinct syndromes or differs by a stabilizer.
fn distinguishable_or_degenerate(code: &StabilizerCode, errors: &[BinVec]) -> bool {
    let group = code.group_rref();
    let mut by_syndrome: HashMap<u64, Vec<usize>> = HashMap::new();
    for (i, e) in errors.iter().enumerate() {
        by_syndrome.entry(code.syndrome_bits(e)).or_default().push(i);
    }
    for bucket in by_syndrome.values() {
        for a in 0..bucket.len() {
            for b in a + 1..bucket.len() {
                let mut diff = errors[bucket[a]].clone();
                diff.xor_assign(&errors[bucket[b]]);
                if !group.contains(&diff) {
                    return false;
                }
            }
        }
    }
    true
}

/// Lemma-1 correctability: the physical error set after transfer is every
/// single dephasing Z, and every mode pair at sites p < q dressed by any
/// subset of Z errors on {p, q}. All must be distinguishable or degenerate.
pub fn lemma1_pair_check(css: &CssCode, em: &ErrorMap) -> Result<bool> {
    if em.kind != ErrorKind::Eprime {
        return Err(Error::Malformed(
            "pair check is defined over the E′ dictionary".into(),
        ));
    }
    if em.m != css.m {
        return Err(Error::Dimension("error map size mismatch".into()));
    }
    let code = css.assemble()?;
    let m = css.m;
    let mut errors: Vec<BinVec> = vec![BinVec::zeros(2 * m)];
    for n in 0..m {
        errors.push(em.base_error(n)); // single Z_{n+1}
    }
    for p in 0..m {
        for q in p + 1..m {
            let mut pair = em.base_error(m + p);
            pair.xor_assign(&em.base_error(m + q));
            for zp in [false, true] {
                for zq in [false, true] {
                    let mut e = pair.clone();
                    if zp {
                        e.xor_assign(&em.base_error(p));
                    }
                    if zq {
                        e.xor_assign(&em.base_error(q));
                    }
                    errors.push(e);
                }
            }
        }
    }
    Ok(distinguishable_or_degenerate(&code, &errors))
}

/// Restricted-noise correctability on parity-preserving chains: under the E
/// dictionary the n-th even-parity fermion is the abstract bit flip Xₙ and
/// the n-th odd-parity fermion the abstract phase flip Zₙ, so the set to
/// distinguish is {1} ∪ {Xₚ} ∪ {Z_q} ∪ {XₚZ_q} in the code's own frame.
pub fn restricted_parity_check(code: &StabilizerCode, em: &ErrorMap) -> Result<bool> {
    if em.kind != ErrorKind::E {
        return Err(Error::Malformed(
            "restricted check is defined over the E dictionary".into(),
        ));
    }
    if em.m != code.m {
        return Err(Error::Dimension("error map size mismatch".into()));
    }
    let m = code.m;
    // the precondition: odd-parity fermions occupy the Z slots
    for (j, &b) in em.perm.iter().enumerate() {
        let odd_class = if b < m { b % 2 == 0 } else { (b - m) % 2 == 1 };
        if (j < m) != odd_class {
            return Err(Error::Malformed(
                "error-map permutation is not the parity assignment".into(),
            ));
        }
    }
    let mut errors: Vec<BinVec> = vec![BinVec::zeros(2 * m)];
    for q in 0..m {
        errors.push(BinVec::unit(2 * m, q)); // Z_{q+1}: one odd fermion
    }
    for p in 0..m {
        errors.push(BinVec::unit(2 * m, m + p)); // X_{p+1}: one even fermion
    }
    for q in 0..m {
        for p in 0..m {
            let mut e = BinVec::unit(2 * m, q);
            e.xor_assign(&BinVec::unit(2 * m, m + p));
            errors.push(e);
        }
    }
    Ok(distinguishable_or_degenerate(code, &errors))
}

/// The CSS perfect-code counting identity at radius t, with k the number of
/// encoded qubits: 2^{M−k} = (Σ_{i=0}^{t} C(M,i))², evaluated in exact
/// big-integer arithmetic.
pub fn perfect_check(m: usize, k: usize, t: usize) -> bool {
    use num_bigint::BigUint;
    if k > m {
        return false;
    }
    let lhs = BigUint::from(1u8) << (m - k);
    let mut sum = BigUint::from(0u8);
    let mut binom = BigUint::from(1u8);
    for i in 0..=t.min(m) {
        if i > 0 {
            binom = binom * (m - i + 1) / i;
        }
        sum += &binom;
    }
    lhs == &sum * &sum
}

/// Everything `verify_catalog_entry` computes about a code; all fields are
/// measured, none copied from claims.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub m: usize,
    pub k: usize,
    pub symplectic_valid: bool,
    pub d1: usize,
    pub d2: usize,
    pub majorana_distance: usize,
    pub case: String,
    pub perfect: bool,
    pub t_used: usize,
    pub lemma1: bool,
    pub restricted: bool,
}

/// Recompute every claim attached to a catalog entry from scratch.
pub fn verify_catalog_entry(entry: &CatalogEntry) -> Result<VerificationReport> {
    let css = &entry.css;
    let code = css.assemble()?;
    let symplectic_valid = is_valid_stabilizer(&code.generators)?;
    let d1 = css.d1()?;
    let d2 = css.d2()?;
    let em_prime = build_error_map(css.m, ErrorKind::Eprime, ErrorMap::identity_perm(css.m))?;
    let md = majorana_distance(&code, &em_prime)?;
    let case = classify_case(&code);
    let k = code.k();
    let t_used = (d1.min(d2) - 1) / 2;
    let perfect = perfect_check(css.m, k, t_used.max(1));
    let lemma1 = lemma1_pair_check(css, &em_prime)?;
    let em_e = build_error_map(css.m, ErrorKind::E, ErrorMap::parity_perm(css.m))?;
    let restricted = restricted_parity_check(&code, &em_e)?;
    Ok(VerificationReport {
        name: entry.name.clone(),
        m: css.m,
        k,
        symplectic_valid,
        d1,
        d2,
        majorana_distance: md,
        case: case.to_string(),
        perfect,
        t_used: t_used.max(1),
        lemma1,
        restricted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_z_is_valid() {
        let mut g = BinMatrix::zeros(1, 4);
        g.set(0, 0, true); // (10|00): Z on qubit 1 of 2
        assert!(is_valid_stabilizer(&g).unwrap());
    }

    #[test]
    fn anticommuting_rows_invalid() {
        let mut g = BinMatrix::zeros(2, 2);
        g.set(0, 0, true); // Z₁
        g.set(1, 1, true); // X₁
        assert!(!is_valid_stabilizer(&g).unwrap());
    }

    #[test]
    fn odd_columns_malformed() {
        assert!(is_valid_stabilizer(&BinMatrix::zeros(1, 3)).is_err());
    }

    #[test]
    fn error_map_m1_eprime_identity() {
        let em = build_error_map(1, ErrorKind::Eprime, ErrorMap::identity_perm(1)).unwrap();
        assert_eq!(em.matrix, BinMatrix::identity(2));
    }

    #[test]
    fn error_map_m2_frozen() {
        let ep = build_error_map(2, ErrorKind::Eprime, ErrorMap::identity_perm(2)).unwrap();
        let want = BinMatrix::from_rows(&[
            vec![1, 0, 0, 1],
            vec![0, 1, 0, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
        ])
        .unwrap();
        assert_eq!(ep.matrix, want);

        let e = build_error_map(2, ErrorKind::E, ErrorMap::identity_perm(2)).unwrap();
        let want = BinMatrix::from_rows(&[
            vec![0, 1, 1, 1],
            vec![0, 0, 0, 1],
            vec![1, 0, 1, 0],
            vec![0, 1, 0, 1],
        ])
        .unwrap();
        assert_eq!(e.matrix, want);
        assert_eq!(e.matrix.rank(), 4);
    }

    #[test]
    fn error_map_invertible_random_perm() {
        // reversing the slots is still a permutation; matrix stays invertible
        let m = 5;
        let perm: Vec<usize> = (0..2 * m).rev().collect();
        let em = build_error_map(m, ErrorKind::E, perm).unwrap();
        assert_eq!(em.matrix.rank(), 2 * m);
        assert_eq!(em.slot_of_base(0), 2 * m - 1);
    }

    #[test]
    fn error_map_rejects_bad_perm() {
        assert!(build_error_map(2, ErrorKind::E, vec![0, 0, 1, 2]).is_err());
        assert!(build_error_map(2, ErrorKind::E, vec![0, 1, 2]).is_err());
    }

    #[test]
    fn syndrome_single_qubit() {
        // single stabilizer Z₁ with E′ on M=1: X error flags, Z error doesn't
        let mut g = BinMatrix::zeros(1, 2);
        g.set(0, 0, true);
        let code = StabilizerCode::new(1, g).unwrap();
        let em = build_error_map(1, ErrorKind::Eprime, ErrorMap::identity_perm(1)).unwrap();
        let s = syndrome_matrix(&code, &em).unwrap();
        assert!(!s.get(0, 0)); // Z₁ error: commutes
        assert!(s.get(0, 1)); // c₁ = X₁ error: anticommutes
    }

    #[test]
    fn zero_error_zero_syndrome() {
        let mut g = BinMatrix::zeros(1, 4);
        g.set(0, 0, true);
        let code = StabilizerCode::new(2, g).unwrap();
        assert_eq!(code.syndrome_bits(&BinVec::zeros(4)), 0);
    }

    #[test]
    fn empty_code_distance_one() {
        let code = StabilizerCode::new(2, BinMatrix::zeros(0, 4)).unwrap();
        let em = build_error_map(2, ErrorKind::Eprime, ErrorMap::identity_perm(2)).unwrap();
        assert_eq!(majorana_distance(&code, &em).unwrap(), 1);
    }

    #[test]
    fn perfect_check_examples() {
        assert!(perfect_check(7, 1, 1));
        assert!(!perfect_check(5, 1, 1));
        assert!(perfect_check(15, 7, 1));
        assert!(perfect_check(31, 21, 1));
        assert!(perfect_check(23, 1, 3));
        assert!(!perfect_check(23, 1, 1));
    }

    #[test]
    fn classify_repetition_code_case_ii() {
        // Z-stabilizers only; Z^{⊗3} is the logical Z, so case (ii)
        let h1 = BinMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let css = CssCode::new(h1, BinMatrix::zeros(0, 3)).unwrap();
        let code = css.assemble().unwrap();
        assert_eq!(classify_case(&code), CaseClass::II);
    }

    #[test]
    fn repetition_code_fails_restricted_check() {
        let h1 = BinMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let css = CssCode::new(h1, BinMatrix::zeros(0, 3)).unwrap();
        let code = css.assemble().unwrap();
        let em = build_error_map(3, ErrorKind::E, ErrorMap::parity_perm(3)).unwrap();
        assert!(!restricted_parity_check(&code, &em).unwrap());
    }

    #[test]
    fn restricted_check_requires_parity_perm() {
        let h1 = BinMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let css = CssCode::new(h1, BinMatrix::zeros(0, 3)).unwrap();
        let code = css.assemble().unwrap();
        let em = build_error_map(3, ErrorKind::E, ErrorMap::identity_perm(3)).unwrap();
        assert!(restricted_parity_check(&code, &em).is_err());
    }

    #[test]
    fn css_rejects_non_orthogonal() {
        let h1 = BinMatrix::from_rows(&[vec![1, 1, 0]]).unwrap();
        let g2 = BinMatrix::from_rows(&[vec![1, 0, 0]]).unwrap();
        assert!(CssCode::new(h1, g2).is_err());
    }

    #[test]
    fn logical_pair_anticommutes() {
        // 3-qubit repetition: x_L = X⊗X⊗X-ish rep, z_L weight-1 rep
        let h1 = BinMatrix::from_rows(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let css = CssCode::new(h1, BinMatrix::zeros(0, 3)).unwrap();
        let pairs = css.logical_pairs().unwrap();
        assert_eq!(pairs.len(), 1);
        assert!(symplectic_product(&pairs[0].z, &pairs[0].x));
    }
}
