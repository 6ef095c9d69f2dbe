//! Verifiers for the structural statements about morphisms of spectral
//! sequences.
//!
//! Each verifier first checks the hypotheses of its statement exactly; only
//! when they hold does it test the conclusion, and a conclusion failure on
//! a hypothesis-satisfying instance signals an engine bug, never a property
//! of the instance.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::homalg::FilteredComplex;
use crate::qlinalg::{LinearMap, RatMatrix};

use super::engine::compute_ss;
use super::morphism::{matrix_image, matrix_kernel, SSMorphism};

/// Which of the two mirrored statements to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    /// Cohomology flavor: II/III quadrants, kernels.
    One,
    /// Compact-supports flavor: I/IV quadrants, images.
    Two,
}

/// Two three-term rows with `d∘d = 0`, commuting vertical maps.
#[derive(Clone, Debug)]
pub struct PippaDiagram {
    pub d1_top: RatMatrix,
    pub d2_top: RatMatrix,
    pub d1_bot: RatMatrix,
    pub d2_bot: RatMatrix,
    pub phi_left: RatMatrix,
    pub phi_mid: RatMatrix,
    pub phi_right: RatMatrix,
}

/// Outcome of the middle-cohomology lemma check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PippaOutcome {
    /// Left epic and middle monic held; reports whether the induced map on
    /// middle cohomology is monic, as asserted.
    Monic { conclusion_ok: bool },
    /// Right monic and middle epic held; reports the epi conclusion.
    Epic { conclusion_ok: bool },
    /// Both hypothesis sets held.
    Both { monic_ok: bool, epic_ok: bool },
    HypothesesFail,
}

impl PippaOutcome {
    pub fn conclusion_holds(&self) -> bool {
        match *self {
            PippaOutcome::Monic { conclusion_ok } => conclusion_ok,
            PippaOutcome::Epic { conclusion_ok } => conclusion_ok,
            PippaOutcome::Both { monic_ok, epic_ok } => monic_ok && epic_ok,
            PippaOutcome::HypothesesFail => false,
        }
    }
}

/// Checks the two-row diagram lemma: with `φ'` epic and `φ` monic the map
/// induced on middle `d`-cohomology is monic; with `φ''` monic and `φ`
/// epic it is epic.
pub fn check_pippa(d: &PippaDiagram) -> Result<PippaOutcome, Error> {
    // preconditions: rows compose to zero, squares commute
    if !d.d2_top.mul(&d.d1_top)?.is_zero() || !d.d2_bot.mul(&d.d1_bot)?.is_zero() {
        return Err(Error::Shape("pippa rows do not compose to zero".into()));
    }
    if d.phi_mid.mul(&d.d1_top)? != d.d1_bot.mul(&d.phi_left)?
        || d.phi_right.mul(&d.d2_top)? != d.d2_bot.mul(&d.phi_mid)?
    {
        return Err(Error::Shape("pippa squares do not commute".into()));
    }

    let left_epic = LinearMap::new(d.phi_left.clone()).is_surjective();
    let mid_monic = LinearMap::new(d.phi_mid.clone()).is_injective();
    let right_monic = LinearMap::new(d.phi_right.clone()).is_injective();
    let mid_epic = LinearMap::new(d.phi_mid.clone()).is_surjective();

    let case_a = left_epic && mid_monic;
    let case_b = right_monic && mid_epic;
    if !case_a && !case_b {
        return Ok(PippaOutcome::HypothesesFail);
    }

    // brute-force middle cohomology on both rows
    let h_top = crate::qlinalg::Subquotient::new(
        &LinearMap::new(d.d2_top.clone()).kernel(),
        &LinearMap::new(d.d1_top.clone()).image(),
    )?;
    let h_bot = crate::qlinalg::Subquotient::new(
        &LinearMap::new(d.d2_bot.clone()).kernel(),
        &LinearMap::new(d.d1_bot.clone()).image(),
    )?;
    let induced = h_top.induced(&h_bot, &LinearMap::new(d.phi_mid.clone()))?;
    let monic_ok = LinearMap::new(induced.clone()).is_injective();
    let epic_ok = LinearMap::new(induced).is_surjective();

    Ok(match (case_a, case_b) {
        (true, true) => PippaOutcome::Both { monic_ok, epic_ok },
        (true, false) => PippaOutcome::Monic { conclusion_ok: monic_ok },
        (false, true) => PippaOutcome::Epic { conclusion_ok: epic_ok },
        (false, false) => unreachable!(),
    })
}

/// Report of one run of the page-two comparison lemma.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SsisReport {
    pub hypotheses_ok: bool,
    pub violations: Vec<String>,
    /// `None` when the hypotheses fail; otherwise whether every conclusion
    /// held exactly.
    pub conclusion_ok: Option<bool>,
    pub conclusion_failures: Vec<String>,
}

impl SsisReport {
    pub fn passed(&self) -> bool {
        self.hypotheses_ok && self.conclusion_ok == Some(true)
    }
}

/// Checks the lemma on morphisms of re-numbered spectral sequences.
///
/// Variant 1 (II/III quadrants): if `φ_2^{pq}` is an isomorphism for
/// `p ≤ −2`, injective for `p = −1` and zero for `p = 0`, then `φ_∞^{pq}`
/// is injective for `p ≤ −1` and `Ker H(φ) = L^0 H` on the source.
///
/// Variant 2 (I/IV quadrants): if `φ_2^{pq}` is an isomorphism for
/// `p > 1`, surjective for `p = 1` and zero for `p = 0`, then `φ_∞^{pq}`
/// is surjective for `p ≥ 1` and `Im H(φ) = L^1 H` on the target.
pub fn check_ssis(m: &SSMorphism, variant: Variant) -> SsisReport {
    let mut violations = Vec::new();

    // quadrant support: every nonzero slot on any page
    let mut support: BTreeSet<(i64, i64)> = m.source.support();
    support.extend(m.target.support());
    for &(p, _) in &support {
        let bad = match variant {
            Variant::One => p > 0,
            Variant::Two => p < 0,
        };
        if bad {
            violations.push(format!("support leaves the required quadrants at column {p}"));
        }
    }

    let r2 = 2;
    for (p, q) in m.page_keys(r2) {
        let mat = m.component(r2, p, q);
        let f = LinearMap::new(mat);
        let (need, label): (bool, &str) = match variant {
            Variant::One => match p {
                _ if p <= -2 => (f.is_iso(), "isomorphism"),
                -1 => (f.is_injective(), "injective"),
                0 => (f.is_zero() || f.source_dim() == 0, "zero"),
                _ => (true, ""),
            },
            Variant::Two => match p {
                _ if p >= 2 => (f.is_iso(), "isomorphism"),
                1 => (f.is_surjective(), "surjective"),
                0 => (f.is_zero() || f.source_dim() == 0, "zero"),
                _ => (true, ""),
            },
        };
        if !need {
            violations.push(format!("page-2 component at ({p},{q}) is not {label}"));
        }
    }

    if !violations.is_empty() {
        return SsisReport {
            hypotheses_ok: false,
            violations,
            conclusion_ok: None,
            conclusion_failures: Vec::new(),
        };
    }

    let mut failures = Vec::new();

    // limit components: injective / surjective in the stated columns
    let mut inf_keys: BTreeSet<(i64, i64)> = m.source.limit.keys().copied().collect();
    inf_keys.extend(m.target.limit.keys().copied());
    for (p, q) in inf_keys {
        let f = LinearMap::new(m.inf_component(p, q));
        match variant {
            Variant::One if p <= -1 => {
                if !f.is_injective() {
                    failures.push(format!("limit component at ({p},{q}) not injective"));
                }
            }
            Variant::Two if p >= 1 => {
                if !f.is_surjective() {
                    failures.push(format!("limit component at ({p},{q}) not surjective"));
                }
            }
            _ => {}
        }
    }

    // abutment identity
    for &u in m.abutment_degrees().iter() {
        let mat = m.abutment_component(u);
        match variant {
            Variant::One => {
                let ker = matrix_kernel(&mat);
                let l0 = m.source_ab.l_step(u, 0);
                if ker != l0 {
                    failures.push(format!(
                        "degree {u}: Ker H(phi) has dim {}, L^0 has dim {}",
                        ker.dim(),
                        l0.dim()
                    ));
                }
            }
            Variant::Two => {
                let im = matrix_image(&mat);
                let l1 = m.target_ab.l_step(u, 1);
                if im != l1 {
                    failures.push(format!(
                        "degree {u}: Im H(phi) has dim {}, L^1 has dim {}",
                        im.dim(),
                        l1.dim()
                    ));
                }
            }
        }
    }

    SsisReport {
        hypotheses_ok: true,
        violations,
        conclusion_ok: Some(failures.is_empty()),
        conclusion_failures: failures,
    }
}

/// A finite chain of spectral sequences connected by morphisms, in arrow
/// order: `maps[i] : members[i] → members[i+1]`.
///
/// For [`Variant::One`] the members are read as
/// `ℰ_0 → ℰ_{−1} → … → ℰ_{−n−1} = 0`;
/// for [`Variant::Two`] as `0 = ℰ_{n+1} → ℰ_n → … → ℰ_0`.
#[derive(Clone, Debug)]
pub struct SSSystem {
    pub variant: Variant,
    pub maps: Vec<SSMorphism>,
}

impl SSSystem {
    /// `n` such that the chain has `n+2` members.
    pub fn n(&self) -> usize {
        self.maps.len() - 1
    }

    pub fn member(&self, idx: usize) -> (&super::engine::SpectralSequence, &super::engine::Abutment) {
        if idx < self.maps.len() {
            (&self.maps[idx].source, &self.maps[idx].source_ab)
        } else {
            let last = self.maps.last().expect("nonempty chain");
            (&last.target, &last.target_ab)
        }
    }

    /// Composite of `maps[from..to]`.
    pub fn composite(&self, from: usize, to: usize) -> Result<SSMorphism, Error> {
        let mut acc = self.maps[from].clone();
        for m in &self.maps[from + 1..to] {
            acc = acc.then(m)?;
        }
        Ok(acc)
    }
}

/// Report for the filtration-description propositions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DescrReport {
    pub hypotheses_ok: bool,
    pub violations: Vec<String>,
    pub conclusion_ok: Option<bool>,
    pub conclusion_failures: Vec<String>,
}

impl DescrReport {
    pub fn passed(&self) -> bool {
        self.hypotheses_ok && self.conclusion_ok == Some(true)
    }
}

/// Verifies the inductive description of the limit filtration on a chain
/// of spectral sequences.
///
/// Variant 1: with page-2 support of the `i`-th member inside the columns
/// `[−n, −i]` and each consecutive map an isomorphism for `p ≤ −i−2` and
/// monic for `p = −i−1`, conclude
/// `L^{−i} H(ℰ_0) = Ker{ φ(0, −i−1) }` for every `0 ≤ i ≤ n`.
///
/// Variant 2: with support of `ℰ_i` in `[i, n]` and each map
/// `ℰ_{i+1} → ℰ_i` an isomorphism for `p ≥ i+2` and epic for `p = i+1`,
/// conclude `L^{i} H(ℰ_0) = Im{ φ(i, 0) }` for every `0 ≤ i ≤ n`.
pub fn verify_descrfiltr(sys: &SSSystem, variant: Variant) -> Result<DescrReport, Error> {
    if sys.variant != variant {
        return Err(Error::Shape("system built for the other variant".into()));
    }
    let n = sys.n() as i64;
    let mut violations = Vec::new();

    let member_support_bounds = |idx: usize| -> (i64, i64) {
        // paper-index member: variant 1 member idx is ℰ_{-idx}, columns
        // [−n, −idx]; variant 2 member idx(arrow order) is ℰ_{n+1−idx},
        // columns [n+1−idx, n].
        match variant {
            Variant::One => (-n, -(idx as i64)),
            Variant::Two => ((sys.maps.len() - idx) as i64, n),
        }
    };

    // (a) column support of each member at page 2 and beyond
    for idx in 0..=sys.maps.len() {
        let (ss, _) = sys.member(idx);
        let (lo, hi) = member_support_bounds(idx);
        let terminal = match variant {
            Variant::One => idx == sys.maps.len(),
            Variant::Two => idx == 0,
        };
        for &(p, q) in ss.support().iter() {
            if terminal {
                violations.push(format!("terminal member has a nonzero slot at ({p},{q})"));
            } else if p < lo || p > hi {
                violations.push(format!(
                    "member {idx} has support at column {p}, outside [{lo},{hi}]"
                ));
            }
        }
    }

    // (b) iso/monic (or iso/epic) ranges of each consecutive map at page 2
    for (k, map) in sys.maps.iter().enumerate() {
        for (p, q) in map.page_keys(2) {
            let f = LinearMap::new(map.component(2, p, q));
            let ok = match variant {
                Variant::One => {
                    let i = k as i64;
                    if p <= -i - 2 {
                        f.is_iso()
                    } else if p == -i - 1 {
                        f.is_injective()
                    } else {
                        // automatically zero by (a) on the target
                        f.is_zero() || f.target_dim() == 0 || f.source_dim() == 0
                    }
                }
                Variant::Two => {
                    // map k goes ℰ_{n+1-k} → ℰ_{n-k}; write i = n-k so the
                    // map is ℰ_{i+1} → ℰ_i: iso for p ≥ i+2, epic p = i+1.
                    let i = n - k as i64;
                    if p >= i + 2 {
                        f.is_iso()
                    } else if p == i + 1 {
                        f.is_surjective()
                    } else {
                        f.is_zero() || f.target_dim() == 0 || f.source_dim() == 0
                    }
                }
            };
            if !ok {
                violations.push(format!("map {k} fails its page-2 range condition at ({p},{q})"));
            }
        }
    }

    if !violations.is_empty() {
        return Ok(DescrReport {
            hypotheses_ok: false,
            violations,
            conclusion_ok: None,
            conclusion_failures: Vec::new(),
        });
    }

    let mut failures = Vec::new();
    match variant {
        Variant::One => {
            let (_, ab0) = sys.member(0);
            for i in 0..=n {
                // φ(0, −i−1) = composite of the first i+1 maps
                let comp = sys.composite(0, i as usize + 1)?;
                for (&u, g) in &ab0.groups {
                    let ker = matrix_kernel(&comp.abutment_component(u));
                    let li = ab0.l_step(u, -i);
                    if ker != li {
                        failures.push(format!(
                            "i={i}, degree {u}: Ker phi(0,-{}) dim {}, L^{} dim {} (group dim {})",
                            i + 1,
                            ker.dim(),
                            -i,
                            li.dim(),
                            g.dim
                        ));
                    }
                }
            }
        }
        Variant::Two => {
            let last = sys.maps.len();
            let (_, ab0) = sys.member(last);
            for i in 0..=n {
                // φ(i, 0): composite from the member holding ℰ_i (arrow
                // index n+1−i) to ℰ_0; for i = 0 it is the identity.
                let from = (n - i + 1) as usize;
                if i == 0 {
                    for (&u, g) in &ab0.groups {
                        let l0 = ab0.l_step(u, 0);
                        if l0.dim() != g.dim {
                            failures.push(format!("i=0, degree {u}: L^0 is not everything"));
                        }
                    }
                    continue;
                }
                let comp = sys.composite(from, last)?;
                for &u in ab0.groups.keys() {
                    let im = matrix_image(&comp.abutment_component(u));
                    let li = ab0.l_step(u, i);
                    if im != li {
                        failures.push(format!(
                            "i={i}, degree {u}: Im phi({i},0) dim {}, L^{i} dim {}",
                            im.dim(),
                            li.dim()
                        ));
                    }
                }
            }
        }
    }

    Ok(DescrReport {
        hypotheses_ok: true,
        violations,
        conclusion_ok: Some(failures.is_empty()),
        conclusion_failures: failures,
    })
}

/// Report of the shift-compatibility identities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShiftCompatReport {
    pub violations: Vec<String>,
}

impl ShiftCompatReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `F^p(T^u(X[d])) = F^{p−d}(T^{u+d}(X))` and
/// `L^p(T^u(X[d])) = L^p(T^{u+d}(X))` as exact subspace equalities, by
/// computing both abutments.
pub fn shift_compat_check(fc: &FilteredComplex, d: i64) -> Result<ShiftCompatReport, Error> {
    let (_, ab) = compute_ss(fc)?;
    let shifted = fc.shift(d);
    let (_, ab_sh) = compute_ss(&shifted)?;
    let mut violations = Vec::new();

    let (flo, fhi) = fc.range();
    for (&u, g) in &ab.groups {
        let us = u - d; // degree in the shifted complex holding T^{u}(X[d])...
        // H^{us}(X[d]) = H^{us+d}(X) = H^u(X); compare step sets:
        for p in (flo + d - 1)..=(fhi + d + 1) {
            let lhs = ab_sh.f_step(us, p);
            let rhs = ab.f_step(u, p - d);
            if lhs != rhs {
                violations.push(format!(
                    "F-compat fails at p={p}, shifted degree {us}: dims {} vs {}",
                    lhs.dim(),
                    rhs.dim()
                ));
            }
        }
        for s in (flo + d + u - d - 1)..=(fhi + d + u - d + 1) {
            let lhs = ab_sh.l_step(us, s);
            let rhs = ab.l_step(u, s);
            if lhs != rhs {
                violations.push(format!(
                    "L-compat fails at s={s}, shifted degree {us}: dims {} vs {}",
                    lhs.dim(),
                    rhs.dim()
                ));
            }
        }
        let _ = g;
    }
    Ok(ShiftCompatReport { violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::RatMatrix;

    #[test]
    fn pippa_identity_diagram() {
        let id = RatMatrix::identity(2);
        let z = RatMatrix::zero(2, 2);
        let d = PippaDiagram {
            d1_top: z.clone(),
            d2_top: z.clone(),
            d1_bot: z.clone(),
            d2_bot: z.clone(),
            phi_left: id.clone(),
            phi_mid: id.clone(),
            phi_right: id,
        };
        let out = check_pippa(&d).unwrap();
        assert!(matches!(out, PippaOutcome::Both { monic_ok: true, epic_ok: true }));
    }

    #[test]
    fn pippa_monic_case_zero_rows() {
        // zero differentials make H the middle term itself; an epic left
        // leg and a monic middle inclusion Q ↪ Q^2.
        let d = PippaDiagram {
            d1_top: RatMatrix::zero(1, 1),
            d2_top: RatMatrix::zero(1, 1),
            d1_bot: RatMatrix::zero(2, 1),
            d2_bot: RatMatrix::zero(1, 2),
            phi_left: RatMatrix::identity(1),
            phi_mid: RatMatrix::from_i64(2, 1, &[1, 0]),
            phi_right: RatMatrix::zero(1, 1),
        };
        let out = check_pippa(&d).unwrap();
        assert!(matches!(out, PippaOutcome::Monic { conclusion_ok: true }));
    }

    #[test]
    fn pippa_rejects_noncommuting() {
        let d = PippaDiagram {
            d1_top: RatMatrix::identity(1),
            d2_top: RatMatrix::zero(1, 1),
            d1_bot: RatMatrix::zero(1, 1),
            d2_bot: RatMatrix::zero(1, 1),
            phi_left: RatMatrix::identity(1),
            phi_mid: RatMatrix::identity(1),
            phi_right: RatMatrix::identity(1),
        };
        assert!(check_pippa(&d).is_err());
    }

    #[test]
    fn shift_compat_trivial_cases() {
        use crate::homalg::{CochainComplex, FilteredComplex};
        let fc = FilteredComplex::one_step(CochainComplex::concentrated(0, 2));
        assert!(shift_compat_check(&fc, 0).unwrap().passed());
        assert!(shift_compat_check(&fc, 2).unwrap().passed());
        let zero = FilteredComplex::one_step(CochainComplex::zero());
        assert!(shift_compat_check(&zero, 3).unwrap().passed());
    }
}
