//! Frequency regions of the non-resonant interactions and the exhaustive
//! check of their structural properties.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::jb;
use crate::spectral::resonance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTriple {
    pub n1: i64,
    pub n2: i64,
    pub n3: i64,
    pub n: i64,
    pub phi: i128,
}

impl FrequencyTriple {
    pub fn new(n1: i64, n2: i64, n3: i64) -> Result<Self> {
        Ok(Self {
            n1,
            n2,
            n3,
            n: n1 + n2 + n3,
            phi: resonance(n1, n2, n3)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RegionLabel {
    A,
    B,
    C,
    D,
    Resonant,
}

impl RegionLabel {
    pub const NON_RESONANT: [RegionLabel; 4] =
        [RegionLabel::A, RegionLabel::B, RegionLabel::C, RegionLabel::D];

    fn bit(self) -> u8 {
        match self {
            RegionLabel::A => 1,
            RegionLabel::B => 2,
            RegionLabel::C => 4,
            RegionLabel::D => 8,
            RegionLabel::Resonant => 16,
        }
    }
}

/// Concrete constants behind `≪`, `≲` and `∼`.
///
/// `a ≪ b` reads `f·a ≤ b`, `a ≲ b` reads `a ≤ f·b`, and `a ∼ b` is `≲` both
/// ways. Region membership uses `much_less_factor` and `comparable_factor`;
/// the conclusions of the structural lemma are checked with the looser
/// `conclusion_much_less` and `conclusion_comparable`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionConstants {
    pub much_less_factor: i64,
    pub comparable_factor: i64,
    pub conclusion_much_less: i64,
    pub conclusion_comparable: i64,
}

impl Default for RegionConstants {
    fn default() -> Self {
        Self {
            much_less_factor: 16,
            comparable_factor: 4,
            conclusion_much_less: 8,
            conclusion_comparable: 16,
        }
    }
}

impl RegionConstants {
    /// One factor pair for both membership and conclusions.
    pub fn uniform(much_less: i64, comparable: i64) -> Self {
        Self {
            much_less_factor: much_less,
            comparable_factor: comparable,
            conclusion_much_less: much_less,
            conclusion_comparable: comparable,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if [
            self.much_less_factor,
            self.comparable_factor,
            self.conclusion_much_less,
            self.conclusion_comparable,
        ]
        .iter()
        .any(|&f| f < 2)
        {
            return Err(crate::Error::InvalidParameter(format!(
                "region factors must be at least 2: {self:?}"
            )));
        }
        Ok(())
    }
}

#[inline]
fn ll(f: i64, a: i64, b: i64) -> bool {
    f * a <= b
}

#[inline]
fn lesssim(f: i64, a: i64, b: i64) -> bool {
    a <= f * b
}

#[inline]
fn sim(f: i64, a: i64, b: i64) -> bool {
    a <= f * b && b <= f * a
}

/// Region bitmask (A=1, B=2, C=4, D=8, Resonant=16) from absolute values.
#[inline]
pub(crate) fn region_mask(n1: i64, n2: i64, n3: i64, phi_zero: bool, c: &RegionConstants) -> u8 {
    if phi_zero {
        return RegionLabel::Resonant.bit();
    }
    let (m, k) = (c.much_less_factor, c.comparable_factor);
    let n = (n1 + n2 + n3).abs();
    let (a1, a2, a3) = (n1.abs(), n2.abs(), n3.abs());
    let mut mask = 0;
    if ll(m, a2, a1) {
        mask |= 1;
    }
    if ll(m, a3, n.min(a1)) && sim(k, n.max(a1), a2) {
        mask |= 2;
    }
    if lesssim(k, n, a3) && ll(m, a3, a1) {
        mask |= 4;
    }
    if lesssim(k, a1, a3) {
        mask |= 8;
    }
    mask
}

#[inline]
pub(crate) fn priority_from_mask(mask: u8) -> RegionLabel {
    if mask & 16 != 0 {
        RegionLabel::Resonant
    } else if mask & 1 != 0 {
        RegionLabel::A
    } else if mask & 2 != 0 {
        RegionLabel::B
    } else if mask & 4 != 0 {
        RegionLabel::C
    } else {
        RegionLabel::D
    }
}

/// Every region whose defining inequalities hold for `t`.
pub fn classify_region(t: &FrequencyTriple, c: &RegionConstants) -> BTreeSet<RegionLabel> {
    let mask = region_mask(t.n1, t.n2, t.n3, t.phi == 0, c);
    [
        RegionLabel::A,
        RegionLabel::B,
        RegionLabel::C,
        RegionLabel::D,
        RegionLabel::Resonant,
    ]
    .into_iter()
    .filter(|r| mask & r.bit() != 0)
    .collect()
}

/// The single region a triple is assigned to: the first of A, B, C, D that
/// contains it, D for uncovered non-resonant triples, Resonant when Φ = 0.
pub fn priority_region(t: &FrequencyTriple, c: &RegionConstants) -> RegionLabel {
    priority_from_mask(region_mask(t.n1, t.n2, t.n3, t.phi == 0, c))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub implication: u8,
    pub n1: i64,
    pub n2: i64,
    pub n3: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionLemmaReport {
    pub bound: i64,
    pub constants: RegionConstants,
    /// Triples with |n_j| ≤ bound and |n2| ≥ |n3|.
    pub triples: u64,
    pub nonresonant: u64,
    /// Non-resonant triples in at least one of A, B, C, D.
    pub covered: u64,
    pub coverage_fraction: f64,
    /// Coverage after assigning uncovered triples to D; always one.
    pub assigned_coverage_fraction: f64,
    /// Triples in more than one region.
    pub overlaps: u64,
    pub region_counts: [u64; 4],
    /// Violation counts of implications (1) through (4).
    pub violations: [u64; 4],
    pub violation_examples: Vec<Violation>,
    /// min |Φ| / max(|n1|, |n2|)² over A ∪ B ∪ C.
    pub c5: f64,
    /// min |Φ| / |n2| over D.
    pub c6: f64,
    /// max ⟨n⟩^{1/2}|n1| / (⟨n1⟩⟨n2⟩⟨n3⟩)^{1/2} over D.
    pub c6_prime: f64,
    /// The same two constants over D together with the uncovered triples.
    pub c6_assigned: f64,
    pub c6_prime_assigned: f64,
}

impl RegionLemmaReport {
    pub fn total_violations(&self) -> u64 {
        self.violations.iter().sum()
    }
}

/// Checks the structural lemma on every triple with `|n_j| ≤ bound` and
/// `|n2| ≥ |n3|`.
pub fn verify_region_lemma(bound: i64, c: &RegionConstants) -> Result<RegionLemmaReport> {
    c.validate()?;
    if !(0..=512).contains(&bound) {
        return Err(crate::Error::InvalidParameter(format!(
            "exhaustive region check limited to bound ≤ 512, got {bound}"
        )));
    }
    let (mp, kp) = (c.conclusion_much_less, c.conclusion_comparable);
    let mut r = RegionLemmaReport {
        bound,
        constants: *c,
        triples: 0,
        nonresonant: 0,
        covered: 0,
        coverage_fraction: 1.0,
        assigned_coverage_fraction: 1.0,
        overlaps: 0,
        region_counts: [0; 4],
        violations: [0; 4],
        violation_examples: Vec::new(),
        c5: f64::INFINITY,
        c6: f64::INFINITY,
        c6_prime: 0.0,
        c6_assigned: f64::INFINITY,
        c6_prime_assigned: 0.0,
    };
    let note = |r: &mut RegionLemmaReport, k: usize, n1, n2, n3| {
        r.violations[k] += 1;
        if r.violation_examples.len() < 32 {
            r.violation_examples.push(Violation {
                implication: k as u8 + 1,
                n1,
                n2,
                n3,
            });
        }
    };
    for n1 in -bound..=bound {
        for n2 in -bound..=bound {
            let a2 = n2.abs();
            for n3 in -a2..=a2 {
                r.triples += 1;
                let phi = 3 * (n1 + n2) * (n1 + n3) * (n2 + n3);
                if phi == 0 {
                    continue;
                }
                r.nonresonant += 1;
                let mask = region_mask(n1, n2, n3, false, c);
                let (a1, a3, n) = (n1.abs(), n3.abs(), (n1 + n2 + n3).abs());
                let aphi = phi.abs() as f64;
                if mask != 0 {
                    r.covered += 1;
                }
                if mask.count_ones() > 1 {
                    r.overlaps += 1;
                }
                for (k, count) in r.region_counts.iter_mut().enumerate() {
                    if mask & (1 << k) != 0 {
                        *count += 1;
                    }
                }
                if mask & 1 != 0 && !(a3 <= a2 && ll(mp, a2, a1) && sim(kp, a1, n)) {
                    note(&mut r, 0, n1, n2, n3);
                }
                if mask & 2 != 0 {
                    let first = ll(mp, a3, n) && lesssim(kp, n, a1) && sim(kp, a1, a2);
                    let second = ll(mp, a3, a1) && ll(mp, a1, n) && sim(kp, n, a2);
                    if !(first || second) {
                        note(&mut r, 1, n1, n2, n3);
                    }
                }
                if mask & 4 != 0
                    && !(lesssim(kp, n, a3) && ll(mp, a3, a2) && sim(kp, a2, a1))
                {
                    note(&mut r, 2, n1, n2, n3);
                }
                if mask & 8 != 0 && !(lesssim(kp, a1, a3) && a3 <= a2) {
                    note(&mut r, 3, n1, n2, n3);
                }
                if mask & 7 != 0 {
                    let m = a1.max(a2) as f64;
                    r.c5 = r.c5.min(aphi / (m * m));
                }
                let assigned_d = mask & 8 != 0 || mask == 0;
                if assigned_d {
                    let q6 = aphi / a2 as f64;
                    let q6p = jb(n as f64).sqrt() * a1 as f64
                        / (jb(a1 as f64) * jb(a2 as f64) * jb(a3 as f64)).sqrt();
                    if mask & 8 != 0 {
                        r.c6 = r.c6.min(q6);
                        r.c6_prime = r.c6_prime.max(q6p);
                    }
                    r.c6_assigned = r.c6_assigned.min(q6);
                    r.c6_prime_assigned = r.c6_prime_assigned.max(q6p);
                }
            }
        }
    }
    if r.nonresonant > 0 {
        r.coverage_fraction = r.covered as f64 / r.nonresonant as f64;
    }
    Ok(r)
}
