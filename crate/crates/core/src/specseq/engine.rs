//! Pages, limit, abutment: the classical subquotient construction.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::homalg::FilteredComplex;
use crate::qlinalg::{RatMatrix, Subquotient, Subspace};

/// How the bidegrees are to be read. Renumbered sequences start at page 2
/// and report the `L`-filtration; the underlying data is the same.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexScheme {
    Initial,
    Renumbered,
}

/// One page slot: a dimension, plus (for complex-backed sequences) the
/// witnessing subquotient of the ambient cochain space in degree `p+q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotSpace {
    pub dim: usize,
    pub degree: i64,
    pub witness: Option<Subquotient>,
}

impl SlotSpace {
    pub fn abstract_slot(dim: usize, degree: i64) -> Self {
        SlotSpace { dim, degree, witness: None }
    }
}

/// One page: slots and the differentials of bidegree `(r, 1−r)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Page {
    pub index: i64,
    pub slots: BTreeMap<(i64, i64), SlotSpace>,
    /// `d_r` at `(p,q)`, mapping to slot `(p+r, q−r+1)`. Zero maps are not
    /// stored.
    pub diffs: BTreeMap<(i64, i64), RatMatrix>,
}

impl Page {
    pub fn slot_dim(&self, p: i64, q: i64) -> usize {
        self.slots.get(&(p, q)).map(|s| s.dim).unwrap_or(0)
    }

    pub fn differential(&self, p: i64, q: i64) -> RatMatrix {
        match self.diffs.get(&(p, q)) {
            Some(m) => m.clone(),
            None => RatMatrix::zero(
                self.slot_dim(p + self.index, q - self.index + 1),
                self.slot_dim(p, q),
            ),
        }
    }

    /// `Σ (−1)^{p+q} dim` over the page.
    pub fn euler_sum(&self) -> i64 {
        self.slots
            .iter()
            .map(|(&(p, q), s)| {
                if (p + q).rem_euclid(2) == 0 {
                    s.dim as i64
                } else {
                    -(s.dim as i64)
                }
            })
            .sum()
    }
}

/// A bounded spectral sequence: pages `first_page ..= turning_page` and the
/// limit page (which equals the turning page).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralSequence {
    pub first_page: i64,
    pub pages: Vec<Page>,
    pub turning_page: i64,
    pub limit: BTreeMap<(i64, i64), SlotSpace>,
    pub scheme: IndexScheme,
}

impl SpectralSequence {
    pub fn page(&self, r: i64) -> Option<&Page> {
        if r < self.first_page {
            return None;
        }
        let idx = (r - self.first_page) as usize;
        // pages beyond the turning page equal the last stored page
        Some(self.pages.get(idx).unwrap_or_else(|| self.pages.last().expect("nonempty pages")))
    }

    pub fn last_page(&self) -> &Page {
        self.pages.last().expect("nonempty pages")
    }

    /// The page-`r` differential at `(p,q)` with index-correct shapes,
    /// also for pages beyond the turning page (where it is zero).
    pub fn differential_at(&self, r: i64, p: i64, q: i64) -> RatMatrix {
        let Some(pg) = self.page(r) else {
            return RatMatrix::zero(0, 0);
        };
        let src = pg.slot_dim(p, q);
        let tgt = pg.slot_dim(p + r, q - r + 1);
        if r > self.turning_page {
            return RatMatrix::zero(tgt, src);
        }
        pg.diffs.get(&(p, q)).cloned().unwrap_or_else(|| RatMatrix::zero(tgt, src))
    }

    pub fn limit_dim(&self, p: i64, q: i64) -> usize {
        self.limit.get(&(p, q)).map(|s| s.dim).unwrap_or(0)
    }

    /// All slot keys that are nonzero on some page.
    pub fn support(&self) -> BTreeSet<(i64, i64)> {
        let mut keys = BTreeSet::new();
        for pg in &self.pages {
            keys.extend(pg.slots.keys().copied());
        }
        keys
    }

    /// Re-numeration: page `r` becomes page `r+1` with slot `(s,t)` reading
    /// the old slot `(−t, s+2t)`. The bidegree of the page-`ρ` differential
    /// is again `(ρ, 1−ρ)` in the new coordinates.
    pub fn renumber(&self) -> SpectralSequence {
        let rekey = |p: i64, q: i64| (2 * p + q, -p);
        self.reindexed(1, rekey, IndexScheme::Renumbered)
    }

    /// Inverse of [`renumber`](Self::renumber), recovering the original
    /// indexing bit-for-bit.
    pub fn renumber_inv(&self) -> SpectralSequence {
        let rekey = |s: i64, t: i64| (-t, s + 2 * t);
        self.reindexed(-1, rekey, IndexScheme::Initial)
    }

    /// `l`-translation: slot `(p,q)` of the result reads slot `(p+l, q−l)`.
    pub fn translate(&self, l: i64) -> SpectralSequence {
        let rekey = move |p: i64, q: i64| (p - l, q + l);
        self.reindexed(0, rekey, self.scheme)
    }

    fn reindexed(
        &self,
        page_shift: i64,
        rekey: impl Fn(i64, i64) -> (i64, i64),
        scheme: IndexScheme,
    ) -> SpectralSequence {
        let pages = self
            .pages
            .iter()
            .map(|pg| Page {
                index: pg.index + page_shift,
                slots: pg.slots.iter().map(|(&(p, q), s)| (rekey(p, q), s.clone())).collect(),
                diffs: pg.diffs.iter().map(|(&(p, q), m)| (rekey(p, q), m.clone())).collect(),
            })
            .collect();
        SpectralSequence {
            first_page: self.first_page + page_shift,
            pages,
            turning_page: self.turning_page + page_shift,
            limit: self.limit.iter().map(|(&(p, q), s)| (rekey(p, q), s.clone())).collect(),
            scheme,
        }
    }

    /// `Σ (−1)^{p+q} dim E_r^{pq}` is the same on every page.
    pub fn euler_constant(&self) -> bool {
        let mut sums = self.pages.iter().map(|p| p.euler_sum());
        match sums.next() {
            None => true,
            Some(first) => sums.all(|s| s == first),
        }
    }
}

/// The abutment group in one degree with its limit filtration, presented
/// inside the canonical cohomology presentation of the total complex when
/// complex-backed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbutmentGroup {
    pub dim: usize,
    pub h: Option<Subquotient>,
    /// `F^p` for `p` in `flo..=fhi`; full below, zero above.
    pub steps: BTreeMap<i64, Subspace>,
    pub flo: i64,
    pub fhi: i64,
}

impl AbutmentGroup {
    pub fn f_step(&self, p: i64) -> Subspace {
        if p <= self.flo {
            return Subspace::full(self.dim);
        }
        if p > self.fhi {
            return Subspace::zero(self.dim);
        }
        self.steps.get(&p).cloned().unwrap_or_else(|| Subspace::zero(self.dim))
    }
}

/// The filtered limit of a spectral sequence: one group per degree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Abutment {
    pub groups: BTreeMap<i64, AbutmentGroup>,
}

impl Abutment {
    pub fn dim(&self, u: i64) -> usize {
        self.groups.get(&u).map(|g| g.dim).unwrap_or(0)
    }

    /// `F^p T^u`.
    pub fn f_step(&self, u: i64, p: i64) -> Subspace {
        match self.groups.get(&u) {
            Some(g) => g.f_step(p),
            None => Subspace::zero(0),
        }
    }

    /// `L^s T^u = F^{s−u} T^u`.
    pub fn l_step(&self, u: i64, s: i64) -> Subspace {
        self.f_step(u, s - u)
    }

    /// The translated abutment: step at the new index `p` reads `F^{p+l}`.
    pub fn translate(&self, l: i64) -> Abutment {
        let groups = self
            .groups
            .iter()
            .map(|(&u, g)| {
                (u, AbutmentGroup {
                    dim: g.dim,
                    h: g.h.clone(),
                    steps: g.steps.iter().map(|(&p, s)| (p - l, s.clone())).collect(),
                    flo: g.flo - l,
                    fhi: g.fhi - l,
                })
            })
            .collect();
        Abutment { groups }
    }

    /// `dim F^p/F^{p+1}` at degree `u`.
    pub fn graded_dim(&self, u: i64, p: i64) -> usize {
        self.f_step(u, p).dim() - self.f_step(u, p + 1).dim()
    }
}

/// Runs the classical construction on a filtered complex.
///
/// For every page `Z_r^{pq} = F^p ∩ d^{-1}(F^{p+r})` in degree `p+q` and
/// `E_r^{pq} = Z_r^{pq} / (Z_{r-1}^{p+1,q-1} + d Z_{r-1}^{p-r+1,q+r-2})`,
/// with the differential induced by `d`. Pages are computed until the
/// defining subspaces freeze, which happens no later than the filtration
/// length; the turning page is the first page equal to all later ones.
pub fn compute_ss(fc: &FilteredComplex) -> Result<(SpectralSequence, Abutment), Error> {
    let total = fc.total();
    let (flo, fhi) = fc.range();
    let rmax = (fhi + 1 - flo).max(1);

    let zspace = |p: i64, n: i64, r: i64| -> Result<Subspace, Error> {
        let fp = fc.step(p, n);
        let dpre = total.differential(n).preimage(&fc.step(p + r, n + 1))?;
        fp.intersect(&dpre)
    };

    let mut pages = Vec::new();
    for r in 1..=rmax {
        let mut slots = BTreeMap::new();
        for n in total.degrees() {
            for p in flo..=fhi {
                let q = n - p;
                let z = zspace(p, n, r)?;
                let b1 = zspace(p + 1, n, r - 1)?;
                let b2 = total.differential(n - 1).image_of(&zspace(p - r + 1, n - 1, r - 1)?)?;
                let den = b1.sum(&b2)?;
                let sq = Subquotient::new(&z, &den)?;
                if sq.dim() > 0 {
                    slots.insert((p, q), SlotSpace {
                        dim: sq.dim(),
                        degree: n,
                        witness: Some(sq),
                    });
                }
            }
        }
        let mut diffs = BTreeMap::new();
        for (&(p, q), slot) in &slots {
            let n = p + q;
            if let Some(tgt) = slots.get(&(p + r, q - r + 1)) {
                let src_w = slot.witness.as_ref().expect("complex-backed");
                let tgt_w = tgt.witness.as_ref().expect("complex-backed");
                let m = src_w.induced(tgt_w, &total.differential(n))?;
                if !m.is_zero() {
                    diffs.insert((p, q), m);
                }
            }
        }
        pages.push(Page { index: r, slots, diffs });
    }

    // Turning page: first page from which all later pages are identical.
    let mut turning_idx = pages.len() - 1;
    while turning_idx > 0 && pages[turning_idx - 1] .slots == pages[turning_idx].slots
        && pages[turning_idx - 1].diffs.is_empty()
        && pages[turning_idx].diffs.is_empty()
    {
        turning_idx -= 1;
    }
    let turning_page = pages[turning_idx].index;
    let limit = pages.last().expect("at least one page").slots.clone();
    pages.truncate(turning_idx + 1);
    // re-check: pages[turning_idx] must equal the limit slotwise
    debug_assert_eq!(pages.last().expect("pages").slots, limit);

    let ss = SpectralSequence { first_page: 1, pages, turning_page, limit, scheme: IndexScheme::Initial };

    // Abutment: F^p T^u = image of H^u(F^p) in H^u(total).
    let mut groups = BTreeMap::new();
    for n in total.degrees() {
        let h = total.cohomology(n);
        if h.dim() == 0 {
            continue;
        }
        let mut steps = BTreeMap::new();
        for p in flo..=fhi {
            steps.insert(p, h.push(&fc.step(p, n))?);
        }
        groups.insert(n, AbutmentGroup { dim: h.dim(), h: Some(h), steps, flo, fhi });
    }
    Ok((ss, Abutment { groups }))
}
