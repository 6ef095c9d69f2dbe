//! Morphisms of spectral sequences.
//!
//! A morphism carries its own copies of source and target (sequence and
//! abutment), per-page slot components, limit components, and the filtered
//! abutment map. `induced_map_shifted` builds the whole package from a
//! filtration-compatible chain map, with an optional index shift on either
//! side; that one function also realizes the translated comparisons used
//! by the realignment construction.

use std::collections::{BTreeMap, BTreeSet};


use crate::error::Error;
use crate::homalg::{ChainMap, FilteredComplex};
use crate::qlinalg::{LinearMap, RatMatrix, Subspace};

use super::engine::{compute_ss, Abutment, SpectralSequence};

/// A morphism of spectral sequences with abutment map.
#[derive(Clone, Debug)]
pub struct SSMorphism {
    pub source: SpectralSequence,
    pub source_ab: Abutment,
    pub target: SpectralSequence,
    pub target_ab: Abutment,
    /// Per page index, per slot, the component matrix (target dim × source
    /// dim). Zero components are not stored.
    pub components: BTreeMap<i64, BTreeMap<(i64, i64), RatMatrix>>,
    /// Components on the limit page.
    pub inf: BTreeMap<(i64, i64), RatMatrix>,
    /// Per degree, the filtered map on abutments.
    pub abutment_map: BTreeMap<i64, RatMatrix>,
}

impl SSMorphism {
    pub fn component(&self, r: i64, p: i64, q: i64) -> RatMatrix {
        let sdim = self.source.page(r).map(|pg| pg.slot_dim(p, q)).unwrap_or(0);
        let tdim = self.target.page(r).map(|pg| pg.slot_dim(p, q)).unwrap_or(0);
        self.components
            .get(&r)
            .and_then(|m| m.get(&(p, q)).cloned())
            .unwrap_or_else(|| RatMatrix::zero(tdim, sdim))
    }

    pub fn inf_component(&self, p: i64, q: i64) -> RatMatrix {
        let sdim = self.source.limit_dim(p, q);
        let tdim = self.target.limit_dim(p, q);
        self.inf.get(&(p, q)).cloned().unwrap_or_else(|| RatMatrix::zero(tdim, sdim))
    }

    pub fn abutment_component(&self, u: i64) -> RatMatrix {
        self.abutment_map
            .get(&u)
            .cloned()
            .unwrap_or_else(|| RatMatrix::zero(self.target_ab.dim(u), self.source_ab.dim(u)))
    }

    /// Slot keys appearing on either side of a given page.
    pub fn page_keys(&self, r: i64) -> BTreeSet<(i64, i64)> {
        let mut keys = BTreeSet::new();
        if let Some(pg) = self.source.page(r) {
            keys.extend(pg.slots.keys().copied());
        }
        if let Some(pg) = self.target.page(r) {
            keys.extend(pg.slots.keys().copied());
        }
        keys
    }

    /// Degrees appearing in either abutment.
    pub fn abutment_degrees(&self) -> BTreeSet<i64> {
        self.source_ab.groups.keys().chain(self.target_ab.groups.keys()).copied().collect()
    }

    /// Common page range on which both sides are defined.
    pub fn page_range(&self) -> (i64, i64) {
        let lo = self.source.first_page.max(self.target.first_page);
        let hi = self.source.turning_page.max(self.target.turning_page);
        (lo, hi)
    }

    /// The same morphism in the re-numbered indexing.
    pub fn renumber(&self) -> SSMorphism {
        let rekey = |p: i64, q: i64| (2 * p + q, -p);
        SSMorphism {
            source: self.source.renumber(),
            source_ab: self.source_ab.clone(),
            target: self.target.renumber(),
            target_ab: self.target_ab.clone(),
            components: self
                .components
                .iter()
                .map(|(&r, m)| {
                    (r + 1, m.iter().map(|(&(p, q), mat)| (rekey(p, q), mat.clone())).collect())
                })
                .collect(),
            inf: self.inf.iter().map(|(&(p, q), m)| (rekey(p, q), m.clone())).collect(),
            abutment_map: self.abutment_map.clone(),
        }
    }

    /// Composition `other ∘ self` (this morphism first).
    pub fn then(&self, other: &SSMorphism) -> Result<SSMorphism, Error> {
        let (lo, hi) = (
            self.page_range().0.max(other.page_range().0),
            self.page_range().1.max(other.page_range().1),
        );
        let mut components = BTreeMap::new();
        for r in lo..=hi {
            let mut per = BTreeMap::new();
            for key in self.page_keys(r).union(&other.page_keys(r)) {
                let (p, q) = *key;
                let m = other.component(r, p, q).mul(&self.component(r, p, q))?;
                if !m.is_zero() {
                    per.insert((p, q), m);
                }
            }
            if !per.is_empty() {
                components.insert(r, per);
            }
        }
        let mut inf = BTreeMap::new();
        let inf_keys: BTreeSet<(i64, i64)> =
            self.inf.keys().chain(other.inf.keys()).copied().collect();
        for (p, q) in inf_keys {
            let m = other.inf_component(p, q).mul(&self.inf_component(p, q))?;
            if !m.is_zero() {
                inf.insert((p, q), m);
            }
        }
        let mut abutment_map = BTreeMap::new();
        for u in self.abutment_degrees().union(&other.abutment_degrees()) {
            let m = other.abutment_component(*u).mul(&self.abutment_component(*u))?;
            if !m.is_zero() {
                abutment_map.insert(*u, m);
            }
        }
        Ok(SSMorphism {
            source: self.source.clone(),
            source_ab: self.source_ab.clone(),
            target: other.target.clone(),
            target_ab: other.target_ab.clone(),
            components,
            inf,
            abutment_map,
        })
    }

    /// Structural validity: components commute with the differentials on
    /// every stored page; the abutment map is filtered; on complex-backed
    /// sequences, each page-(r+1) component is the map induced by the
    /// page-r component on `d_r`-cohomology, and the limit components are
    /// induced on the graded pieces by the abutment map.
    pub fn check_valid(&self) -> Result<(), String> {
        let (lo, hi) = self.page_range();
        for r in lo..=hi {
            if self.source.page(r).is_none() || self.target.page(r).is_none() {
                continue;
            }
            for &(p, q) in self.page_keys(r).iter() {
                // commutation with d_r
                let lhs = self
                    .target
                    .differential_at(r, p, q)
                    .mul(&self.component(r, p, q))
                    .map_err(|e| e.to_string())?;
                let rhs = self
                    .component(r, p + r, q - r + 1)
                    .mul(&self.source.differential_at(r, p, q))
                    .map_err(|e| e.to_string())?;
                if lhs != rhs {
                    return Err(format!("component at page {r} slot ({p},{q}) does not commute"));
                }
            }
        }

        // page passage coherence on witnessed slots
        for r in lo..hi {
            for &(p, q) in self.page_keys(r + 1).iter() {
                let (ws_next, ws_cur) = (
                    self.source.page(r + 1).and_then(|pg| pg.slots.get(&(p, q))),
                    self.source.page(r).and_then(|pg| pg.slots.get(&(p, q))),
                );
                let (wt_next, wt_cur) = (
                    self.target.page(r + 1).and_then(|pg| pg.slots.get(&(p, q))),
                    self.target.page(r).and_then(|pg| pg.slots.get(&(p, q))),
                );
                let all_witnessed = [&ws_next, &ws_cur, &wt_next, &wt_cur]
                    .iter()
                    .all(|s| s.map(|x| x.witness.is_some()).unwrap_or(true));
                if !all_witnessed {
                    continue;
                }
                let lift = |next: Option<&super::engine::SlotSpace>,
                            cur: Option<&super::engine::SlotSpace>|
                 -> Option<RatMatrix> {
                    let nw = next?.witness.as_ref()?;
                    let cw = cur?.witness.as_ref()?;
                    cw.quo
                        .projection
                        .compose(&nw.quo.section)
                        .ok()
                        .map(|m| m.matrix().clone())
                };
                if let (Some(ls), Some(lt)) = (lift(ws_next, ws_cur), lift(wt_next, wt_cur)) {
                    // ι_t ∘ M_{r+1} − M_r ∘ ι_s must land in the image of the
                    // incoming target differential on page r.
                    let a = lt.mul(&self.component(r + 1, p, q)).map_err(|e| e.to_string())?;
                    let b = self.component(r, p, q).mul(&ls).map_err(|e| e.to_string())?;
                    let diff = a.sub(&b).map_err(|e| e.to_string())?;
                    if !diff.is_zero() {
                        let incoming = self.target.differential_at(r, p - r, q + r - 1);
                        let im = LinearMap::new(incoming).image();
                        let cols = LinearMap::new(diff).image();
                        if !im.contains(&cols) {
                            return Err(format!(
                                "page {}→{} component at ({p},{q}) is not induced by cohomology",
                                r,
                                r + 1
                            ));
                        }
                    }
                }
            }
        }

        // filtered abutment map + graded compatibility with the limit
        for &u in self.abutment_degrees().iter() {
            let m = LinearMap::new(self.abutment_component(u));
            let (sflo, sfhi) = self
                .source_ab
                .groups
                .get(&u)
                .map(|g| (g.flo, g.fhi))
                .unwrap_or((0, 0));
            let (tflo, tfhi) = self
                .target_ab
                .groups
                .get(&u)
                .map(|g| (g.flo, g.fhi))
                .unwrap_or((0, 0));
            for p in sflo.min(tflo) - 1..=sfhi.max(tfhi) + 1 {
                let img = m
                    .image_of(&self.source_ab.f_step(u, p))
                    .map_err(|e| e.to_string())?;
                if !self.target_ab.f_step(u, p).contains(&img) {
                    return Err(format!("abutment map not filtered at degree {u}, step {p}"));
                }
            }
        }

        for (&(p, q), _) in self
            .source
            .limit
            .iter()
            .filter(|(k, _)| self.target.limit.contains_key(*k) || self.inf.contains_key(*k))
        {
            let u = p + q;
            // the filtration index of the slot: the column itself in the
            // initial scheme, s − u in the renumbered one
            let fidx = match self.source.scheme {
                super::engine::IndexScheme::Initial => p,
                super::engine::IndexScheme::Renumbered => p - u,
            };
            let (Some(ks), Some(kt)) = (
                graded_identification(&self.source, &self.source_ab, p, q, fidx),
                graded_identification(&self.target, &self.target_ab, p, q, fidx),
            ) else {
                continue;
            };
            // κ_t ∘ φ_∞ = Gr(abutment_map) ∘ κ_s
            let gr_src = grade_quotient(&self.source_ab, u, fidx);
            let gr_tgt = grade_quotient(&self.target_ab, u, fidx);
            let (Some(gs), Some(gt)) = (gr_src, gr_tgt) else { continue };
            let lhs = kt.mul(&self.inf_component(p, q)).map_err(|e| e.to_string())?;
            let mid = gt
                .quo
                .projection
                .matrix()
                .mul(&self.abutment_component(u))
                .map_err(|e| e.to_string())?;
            let rhs = mid.mul(gs.quo.section.matrix()).map_err(|e| e.to_string())?;
            let rhs = rhs.mul(&ks).map_err(|e| e.to_string())?;
            if lhs != rhs {
                return Err(format!("limit component at ({p},{q}) not induced on graded pieces"));
            }
        }
        Ok(())
    }
}

/// The canonical identification `E_∞^{pq} → Gr^p T^{p+q}` for a witnessed
/// slot: lift a limit class to a cocycle in `F^p`, project to cohomology,
/// then to the graded piece. Returns the matrix in the canonical
/// presentations, or `None` when the slot is not witnessed.
pub fn graded_identification(
    ss: &SpectralSequence,
    ab: &Abutment,
    p: i64,
    q: i64,
    fidx: i64,
) -> Option<RatMatrix> {
    let slot = ss.limit.get(&(p, q))?;
    let w = slot.witness.as_ref()?;
    let u = p + q;
    let g = ab.groups.get(&u)?;
    let h = g.h.as_ref()?;
    let gr = grade_quotient(ab, u, fidx)?;
    // sect: slot → ambient cocycles; proj_H: ambient → H; gr-proj: H → Gr^p
    let to_h = h.quo.projection.compose(&w.quo.section).ok()?;
    let m = gr.quo.projection.compose(&to_h).ok()?;
    Some(m.matrix().clone())
}

/// Quotient presentation of `F^p/F^{p+1}` inside the abutment group.
pub fn grade_quotient(ab: &Abutment, u: i64, p: i64) -> Option<crate::qlinalg::Subquotient> {
    let g = ab.groups.get(&u)?;
    crate::qlinalg::Subquotient::new(&g.f_step(p), &g.f_step(p + 1)).ok()
}

/// Functorial morphism induced by a filtration-compatible chain map, with
/// index shifts: requires `f(F^{p+src_shift}) ⊆ G^{p+tgt_shift}` for all
/// `p`, and produces the morphism
/// `E(src)(src_shift) → E(tgt)(tgt_shift)` slot by slot.
pub fn induced_map_shifted(
    f: &ChainMap,
    src: &FilteredComplex,
    tgt: &FilteredComplex,
    src_shift: i64,
    tgt_shift: i64,
) -> Result<SSMorphism, Error> {
    if f.source() != src.total() || f.target() != tgt.total() {
        return Err(Error::Shape("chain map endpoints do not match the filtered complexes".into()));
    }
    // filtration compatibility
    let (sflo, sfhi) = src.range();
    for p in sflo - 1..=sfhi + 1 {
        for n in src.total().degrees() {
            let img = f.component(n).image_of(&src.step(p, n))?;
            if !tgt.step(p - src_shift + tgt_shift, n).contains(&img) {
                return Err(Error::FiltrationNotPreserved { p, degree: n });
            }
        }
    }

    let (ss_s_raw, ab_s_raw) = compute_ss(src)?;
    let (ss_t_raw, ab_t_raw) = compute_ss(tgt)?;
    let source = ss_s_raw.translate(src_shift);
    let source_ab = ab_s_raw.translate(src_shift);
    let target = ss_t_raw.translate(tgt_shift);
    let target_ab = ab_t_raw.translate(tgt_shift);

    let mut components = BTreeMap::new();
    let lo = source.first_page.max(target.first_page);
    let hi = source.turning_page.max(target.turning_page);
    for r in lo..=hi {
        let mut per = BTreeMap::new();
        let keys: BTreeSet<(i64, i64)> = source
            .page(r)
            .into_iter()
            .flat_map(|pg| pg.slots.keys().copied().collect::<Vec<_>>())
            .collect();
        for (p, q) in keys {
            let (Some(sw), Some(tw)) = (
                source.page(r).and_then(|pg| pg.slots.get(&(p, q))).and_then(|s| s.witness.as_ref()),
                target.page(r).and_then(|pg| pg.slots.get(&(p, q))).and_then(|s| s.witness.as_ref()),
            ) else {
                continue;
            };
            let n = p + q;
            let m = sw.induced(tw, &f.component(n))?;
            if !m.is_zero() {
                per.insert((p, q), m);
            }
        }
        if !per.is_empty() {
            components.insert(r, per);
        }
    }

    let mut inf = BTreeMap::new();
    for (&(p, q), slot) in &source.limit {
        let (Some(sw), Some(tw)) = (
            slot.witness.as_ref(),
            target.limit.get(&(p, q)).and_then(|s| s.witness.as_ref()),
        ) else {
            continue;
        };
        let m = sw.induced(tw, &f.component(p + q))?;
        if !m.is_zero() {
            inf.insert((p, q), m);
        }
    }

    let mut abutment_map = BTreeMap::new();
    for (&u, g) in &source_ab.groups {
        let (Some(hs), Some(ht)) = (
            g.h.as_ref(),
            target_ab.groups.get(&u).and_then(|g| g.h.as_ref()),
        ) else {
            continue;
        };
        let m = hs.induced(ht, &f.component(u))?;
        if !m.is_zero() {
            abutment_map.insert(u, m);
        }
    }

    Ok(SSMorphism {
        source,
        source_ab,
        target,
        target_ab,
        components,
        inf,
        abutment_map,
    })
}

/// Functorial morphism induced by a filtration-preserving chain map.
pub fn induced_map(
    f: &ChainMap,
    src: &FilteredComplex,
    tgt: &FilteredComplex,
) -> Result<SSMorphism, Error> {
    induced_map_shifted(f, src, tgt, 0, 0)
}

/// Subspace image sanity used by verifiers: the kernel of a matrix as a
/// subspace of the source presentation.
pub fn matrix_kernel(m: &RatMatrix) -> Subspace {
    LinearMap::new(m.clone()).kernel()
}

/// The image of a matrix as a subspace of the target presentation.
pub fn matrix_image(m: &RatMatrix) -> Subspace {
    LinearMap::new(m.clone()).image()
}
