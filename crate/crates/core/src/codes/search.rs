//! Randomized bounded search for CSS codes with prescribed parameters.
//!
//! A candidate is a generator stack G₁ whose first k₂ rows form G₂; C₂ ⊆ C₁
//! holds by construction, so a draw only has to pass the rank, distance and
//! case checks. The case target prunes the sampling space up front:
//! case (iii) forces every G₁ row to even weight (making Z^{⊗M} a
//! stabilizer), case (ii) forces even G₂ rows but an odd word in C₁, and
//! case (i) plants an odd-weight G₂ row so Z^{⊗M} anticommutes with it.

use super::{classify_case, CaseClass, CssCode};
use crate::error::{Error, Result};
use crate::gf2::{BinMatrix, BinVec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Target parameters for `bounded_search`.
#[derive(Clone, Debug)]
pub struct SearchParams {
    pub m: usize,
    pub d1: usize,
    pub d2: usize,
    pub case: CaseClass,
    /// Number of encoded qubits (k₁ − k₂).
    pub k: usize,
    /// Candidate draws before giving up.
    pub budget: u64,
    pub seed: u64,
}

impl SearchParams {
    pub fn new(m: usize, d1: usize, d2: usize, case: CaseClass, budget: u64) -> Self {
        SearchParams {
            m,
            d1,
            d2,
            case,
            k: 1,
            budget,
            seed: 0x5eed,
        }
    }
}

pub const SEARCH_MAX_M: usize = 16;

/// Draw random candidates until one meets the targets (distances may exceed
/// the request) or the budget is exhausted. Deterministic for a fixed seed.
pub fn bounded_search(params: &SearchParams) -> Result<Option<CssCode>> {
    let m = params.m;
    if m > SEARCH_MAX_M {
        return Err(Error::Unsupported(format!(
            "search supports M ≤ {SEARCH_MAX_M}, got {m}"
        )));
    }
    if params.k == 0 || params.d1 == 0 || params.d2 == 0 {
        return Err(Error::Malformed(
            "search needs k ≥ 1 and positive distances".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    // candidate dimensions: k₂ cycles over the feasible range; an empty G₂
    // only qualifies when d2 = 1 (C₂^⊥ is then the full space)
    let k2_min = if params.d2 <= 1 { 0 } else { 1 };
    let k2_max = (m / 2).saturating_sub(params.k - 1).max(k2_min);
    let mut draws = 0u64;
    let mut k2 = k2_min;
    while draws < params.budget {
        draws += 1;
        let candidate = draw_candidate(&mut rng, m, k2, params.k, params.case);
        k2 = if k2 >= k2_max { k2_min } else { k2 + 1 };
        let Some((g1, g2)) = candidate else { continue };
        if g1.rank() != g1.rows() {
            continue;
        }
        let Ok(css) = CssCode::from_generators(&g1, g2) else {
            continue;
        };
        if css.k() != params.k {
            continue;
        }
        match (css.d1(), css.d2()) {
            (Ok(d1), Ok(d2)) if d1 >= params.d1 && d2 >= params.d2 => {}
            _ => continue,
        }
        let Ok(code) = css.assemble() else { continue };
        if classify_case(&code) == params.case {
            return Ok(Some(css));
        }
    }
    Ok(None)
}

fn draw_candidate(
    rng: &mut ChaCha8Rng,
    m: usize,
    k2: usize,
    k: usize,
    case: CaseClass,
) -> Option<(BinMatrix, BinMatrix)> {
    let k1 = k2 + k;
    if k1 > m {
        return None;
    }
    let mut rows: Vec<BinVec> = Vec::with_capacity(k1);
    for i in 0..k1 {
        let in_g2 = i < k2;
        let parity = match case {
            CaseClass::III => Some(false), // every row even
            CaseClass::II => {
                if in_g2 {
                    Some(false) // G₂ even ⇒ Z^{⊗M} commutes
                } else {
                    Some(true) // odd word in C₁ ⇒ Z^{⊗M} not a stabilizer
                }
            }
            CaseClass::I => {
                if in_g2 && i == 0 {
                    Some(true) // one odd G₂ row ⇒ Z^{⊗M} anticommutes
                } else {
                    None
                }
            }
        };
        rows.push(random_row(rng, m, parity)?);
    }
    let mut g1 = BinMatrix::zeros(k1, m);
    let mut g2 = BinMatrix::zeros(k2, m);
    for (i, r) in rows.iter().enumerate() {
        g1.set_row(i, r);
        if i < k2 {
            g2.set_row(i, r);
        }
    }
    Some((g1, g2))
}

/// Random nonzero row; `parity` of Some(p) constrains weight to odd (p) or
/// even (!p).
fn random_row(rng: &mut ChaCha8Rng, m: usize, parity: Option<bool>) -> Option<BinVec> {
    for _ in 0..64 {
        let mut v = BinVec::zeros(m);
        for j in 0..m {
            if rng.gen::<bool>() {
                v.set(j, true);
            }
        }
        if v.is_zero() {
            continue;
        }
        match parity {
            Some(odd) if (v.weight() % 2 == 1) != odd => continue,
            _ => return Some(v),
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_distance_3_case_ii_at_m7() {
        let params = SearchParams::new(7, 3, 3, CaseClass::II, 20_000);
        let css = bounded_search(&params).unwrap().expect("should find a code");
        assert_eq!(css.m, 7);
        assert_eq!(css.k(), 1);
        assert!(css.d1().unwrap() >= 3);
        assert!(css.d2().unwrap() >= 3);
        assert_eq!(classify_case(&css.assemble().unwrap()), CaseClass::II);
    }

    #[test]
    fn finds_case_iii_at_m10() {
        let params = SearchParams::new(10, 3, 3, CaseClass::III, 50_000);
        let css = bounded_search(&params).unwrap().expect("should find a code");
        assert_eq!(classify_case(&css.assemble().unwrap()), CaseClass::III);
        assert!(css.d1().unwrap() >= 3);
        assert!(css.d2().unwrap() >= 3);
    }

    #[test]
    fn infeasible_parameters_return_none() {
        // d1 = 5 on M = 5 forces the repetition code (k1 = 1), which cannot
        // also deliver d2 = 3
        let params = SearchParams::new(5, 5, 3, CaseClass::II, 30_000);
        assert!(bounded_search(&params).unwrap().is_none());
    }

    #[test]
    fn rejects_oversized_m() {
        let params = SearchParams::new(17, 3, 3, CaseClass::II, 10);
        assert!(bounded_search(&params).is_err());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let params = SearchParams::new(7, 3, 3, CaseClass::II, 20_000);
        let a = bounded_search(&params).unwrap().unwrap();
        let b = bounded_search(&params).unwrap().unwrap();
        assert_eq!(a.h1, b.h1);
        assert_eq!(a.g2, b.g2);
    }

    #[test]
    fn zero_budget_returns_none() {
        let params = SearchParams::new(7, 3, 3, CaseClass::II, 0);
        assert!(bounded_search(&params).unwrap().is_none());
    }
}
