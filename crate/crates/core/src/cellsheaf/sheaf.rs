//! Cellular sheaves, the incidence cochain complex, and the two flag
//! filtrations.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::Error;
use crate::homalg::{ChainMap, CochainComplex, FilteredComplex};
use crate::qlinalg::{LinearMap, RatMatrix, Subspace};

use super::poset::{CellSet, FacePoset, Flag};
use super::resolution::{injective_resolution, supported_sections};

/// A cellular sheaf: one stalk per cell, restriction maps along covers,
/// with all composites between comparable cells agreeing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellularSheaf {
    stalks: Vec<usize>,
    /// restriction matrices on cover pairs
    cover_maps: BTreeMap<(usize, usize), RatMatrix>,
    /// full table `σ ≤ τ → matrix`, derived and validated at construction
    table: BTreeMap<(usize, usize), RatMatrix>,
}

impl CellularSheaf {
    pub fn new(
        poset: &FacePoset,
        stalks: Vec<usize>,
        cover_maps: BTreeMap<(usize, usize), RatMatrix>,
    ) -> Result<Self, Error> {
        let n = poset.n_cells();
        if stalks.len() != n {
            return Err(Error::BadPoset("stalk count mismatch".into()));
        }
        for (&(a, b), m) in &cover_maps {
            if poset.incidence(a, b) == 0 && !poset.leq(a, b) {
                return Err(Error::BadPoset(format!(
                    "restriction on non-cover pair {} {}",
                    poset.name(a),
                    poset.name(b)
                )));
            }
            if m.cols() != stalks[a] || m.rows() != stalks[b] {
                return Err(Error::Shape(format!(
                    "restriction {}→{} has shape {}x{}, expected {}x{}",
                    poset.name(a),
                    poset.name(b),
                    m.rows(),
                    m.cols(),
                    stalks[b],
                    stalks[a]
                )));
            }
        }
        let mut sheaf = CellularSheaf { stalks, cover_maps, table: BTreeMap::new() };
        sheaf.build_table(poset)?;
        Ok(sheaf)
    }

    /// Derives the full restriction table by composing along saturated
    /// chains and validates functoriality on every comparable triple.
    fn build_table(&mut self, poset: &FacePoset) -> Result<(), Error> {
        let n = poset.n_cells();
        let mut table: BTreeMap<(usize, usize), RatMatrix> = BTreeMap::new();
        for c in 0..n {
            table.insert((c, c), RatMatrix::identity(self.stalks[c]));
        }
        let maxd = poset.max_dim();
        for delta in 1..=maxd {
            for a in 0..n {
                for b in 0..n {
                    if !poset.leq(a, b) || poset.dim(b) != poset.dim(a) + delta {
                        continue;
                    }
                    let m = if delta == 1 {
                        self.cover_maps
                            .get(&(a, b))
                            .cloned()
                            .unwrap_or_else(|| RatMatrix::zero(self.stalks[b], self.stalks[a]))
                    } else {
                        // first intermediate cover a ⋖ c ≤ b
                        let c = (0..n)
                            .find(|&c| {
                                poset.dim(c) == poset.dim(a) + 1
                                    && poset.leq(a, c)
                                    && poset.leq(c, b)
                            })
                            .ok_or_else(|| {
                                Error::BadPoset(format!(
                                    "relation {} ≤ {} does not factor through covers",
                                    poset.name(a),
                                    poset.name(b)
                                ))
                            })?;
                        let first = table.get(&(a, c)).expect("shorter relation stored").clone();
                        let second = table.get(&(c, b)).expect("shorter relation stored").clone();
                        second.mul(&first)?
                    };
                    table.insert((a, b), m);
                }
            }
        }
        // functoriality on all comparable triples
        for a in 0..n {
            for b in 0..n {
                if !poset.leq(a, b) {
                    continue;
                }
                for c in 0..n {
                    if !poset.leq(b, c) {
                        continue;
                    }
                    let ab = table.get(&(a, b)).expect("stored");
                    let bc = table.get(&(b, c)).expect("stored");
                    let ac = table.get(&(a, c)).expect("stored");
                    if &bc.mul(ab)? != ac {
                        return Err(Error::NotFunctorial(format!(
                            "{} ≤ {} ≤ {}",
                            poset.name(a),
                            poset.name(b),
                            poset.name(c)
                        )));
                    }
                }
            }
        }
        self.table = table;
        Ok(())
    }

    /// Re-derives the table (after deserialization).
    pub fn revalidate(mut self, poset: &FacePoset) -> Result<Self, Error> {
        self.build_table(poset)?;
        Ok(self)
    }

    /// Constant sheaf with the given stalk dimension.
    pub fn constant(poset: &FacePoset, dim: usize) -> Self {
        let stalks = vec![dim; poset.n_cells()];
        let cover_maps =
            poset.covers().keys().map(|&k| (k, RatMatrix::identity(dim))).collect();
        CellularSheaf::new(poset, stalks, cover_maps).expect("constant sheaf is functorial")
    }

    /// Zero sheaf.
    pub fn zero(poset: &FacePoset) -> Self {
        CellularSheaf::new(poset, vec![0; poset.n_cells()], BTreeMap::new())
            .expect("zero sheaf is functorial")
    }

    pub fn stalk(&self, c: usize) -> usize {
        self.stalks[c]
    }

    pub fn stalks(&self) -> &[usize] {
        &self.stalks
    }

    /// Restriction `F(a) → F(b)` for `a ≤ b`.
    pub fn restriction(&self, a: usize, b: usize) -> RatMatrix {
        self.table
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| RatMatrix::zero(self.stalks[b], self.stalks[a]))
    }

    /// The restricted sheaf on a downward-closed sub-poset (new indices
    /// from `FacePoset::restrict`).
    pub fn restrict(&self, sub: &FacePoset, old_of_new: &[usize]) -> Result<CellularSheaf, Error> {
        let stalks = old_of_new.iter().map(|&o| self.stalks[o]).collect();
        let cover_maps = sub
            .covers()
            .keys()
            .map(|&(a, b)| ((a, b), self.restriction(old_of_new[a], old_of_new[b])))
            .collect();
        CellularSheaf::new(sub, stalks, cover_maps)
    }
}

/// Coordinate layout of the incidence cochain complex: per degree, the
/// cells of that dimension in index order, each contributing a stalk block.
pub fn cochain_layout(poset: &FacePoset, sheaf: &CellularSheaf, k: usize) -> Vec<(usize, usize)> {
    // (cell, offset)
    let mut out = Vec::new();
    let mut off = 0;
    for c in poset.cells_of_dim(k) {
        out.push((c, off));
        off += sheaf.stalk(c);
    }
    out
}

/// The incidence cochain complex `C^k = ⊕_{dim σ = k} F(σ)` with the
/// differential assembled from incidence numbers and restrictions. For
/// closed regular models its cohomology is sheaf cohomology.
pub fn sheaf_cochains(poset: &FacePoset, sheaf: &CellularSheaf) -> Result<CochainComplex, Error> {
    let maxd = poset.max_dim();
    let mut dims = BTreeMap::new();
    for k in 0..=maxd {
        let d: usize = poset.cells_of_dim(k).iter().map(|&c| sheaf.stalk(c)).sum();
        if d > 0 {
            dims.insert(k as i64, d);
        }
    }
    let mut diffs = BTreeMap::new();
    for k in 0..maxd {
        let src = cochain_layout(poset, sheaf, k);
        let tgt = cochain_layout(poset, sheaf, k + 1);
        let rows: usize = tgt.iter().map(|&(c, _)| sheaf.stalk(c)).sum();
        let cols: usize = src.iter().map(|&(c, _)| sheaf.stalk(c)).sum();
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = RatMatrix::zero(rows, cols);
        for &(s, soff) in &src {
            for &(t, toff) in &tgt {
                let inc = poset.incidence(s, t);
                if inc == 0 {
                    continue;
                }
                let r = sheaf.restriction(s, t).scale(&crate::qlinalg::rint(inc));
                for i in 0..r.rows() {
                    for j in 0..r.cols() {
                        m.set(toff + i, soff + j, r.get(i, j).clone());
                    }
                }
            }
        }
        if !m.is_zero() {
            diffs.insert(k as i64, m);
        }
    }
    CochainComplex::new(dims, diffs)
}

/// The subcomplex of cochains supported on an open (upward-closed) set,
/// with the quotient identified as the cochain complex of the closed
/// complement.
#[derive(Clone, Debug)]
pub struct OpenSectionData {
    /// per-degree coordinate span of the cells in `U`
    pub sub_steps: BTreeMap<i64, Subspace>,
    /// the span as an abstract complex
    pub sub_complex: CochainComplex,
    /// cochains of the closed complement with the restricted sheaf
    pub quotient: CochainComplex,
    /// the projection from the ambient complex onto the quotient
    pub projection: ChainMap,
}

pub fn open_section_subcomplex(
    poset: &FacePoset,
    sheaf: &CellularSheaf,
    open: &CellSet,
) -> Result<OpenSectionData, Error> {
    if !poset.is_upward_closed(open) {
        let witness = open
            .iter()
            .find(|&&c| (0..poset.n_cells()).any(|t| poset.leq(c, t) && !open.contains(&t)))
            .copied()
            .unwrap_or(0);
        return Err(Error::BadCellSet {
            expected: "upward-closed",
            cell: poset.name(witness).to_string(),
        });
    }
    let total = sheaf_cochains(poset, sheaf)?;
    let z = poset.complement(open);
    let (subposet, old) = poset.restrict(&z)?;
    let qsheaf = sheaf.restrict(&subposet, &old)?;
    let quotient = sheaf_cochains(&subposet, &qsheaf)?;

    let mut sub_steps = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for k in 0..=poset.max_dim() {
        let layout = cochain_layout(poset, sheaf, k);
        let amb: usize = layout.iter().map(|&(c, _)| sheaf.stalk(c)).sum();
        // span of U-cell blocks
        let mut vecs = Vec::new();
        for &(c, off) in &layout {
            if open.contains(&c) {
                for i in 0..sheaf.stalk(c) {
                    let mut v = vec![crate::qlinalg::Rat::zero(); amb];
                    v[off + i] = crate::qlinalg::rint(1);
                    vecs.push(v);
                }
            }
        }
        sub_steps.insert(k as i64, Subspace::from_vectors(amb, &vecs)?);
        // projection onto Z-cell blocks, in the quotient's layout
        let qlayout = cochain_layout(&subposet, &qsheaf, k);
        let qdim: usize = qlayout.iter().map(|&(c, _)| qsheaf.stalk(c)).sum();
        if qdim == 0 || amb == 0 {
            continue;
        }
        let mut m = RatMatrix::zero(qdim, amb);
        for &(qc, qoff) in &qlayout {
            let oc = old[qc];
            let ooff = layout
                .iter()
                .find(|&&(c, _)| c == oc)
                .map(|&(_, off)| off)
                .expect("cell present in ambient layout");
            for i in 0..qsheaf.stalk(qc) {
                m.set(qoff + i, ooff + i, crate::qlinalg::rint(1));
            }
        }
        if !m.is_zero() {
            proj.insert(k as i64, m);
        }
    }
    let projection = ChainMap::new(total.clone(), quotient.clone(), proj)?;

    // the span as an abstract complex: restrict the differential
    let mut sdims = BTreeMap::new();
    let mut sdiffs = BTreeMap::new();
    for k in 0..=poset.max_dim() {
        let layout = cochain_layout(poset, sheaf, k);
        let d: usize = layout
            .iter()
            .filter(|&&(c, _)| open.contains(&c))
            .map(|&(c, _)| sheaf.stalk(c))
            .sum();
        if d > 0 {
            sdims.insert(k as i64, d);
        }
    }
    for k in 0..poset.max_dim() {
        let src = cochain_layout(poset, sheaf, k);
        let tgt = cochain_layout(poset, sheaf, k + 1);
        let keep_src: Vec<usize> = src
            .iter()
            .filter(|&&(c, _)| open.contains(&c))
            .flat_map(|&(c, off)| (off..off + sheaf.stalk(c)).collect::<Vec<_>>())
            .collect();
        let keep_tgt: Vec<usize> = tgt
            .iter()
            .filter(|&&(c, _)| open.contains(&c))
            .flat_map(|&(c, off)| (off..off + sheaf.stalk(c)).collect::<Vec<_>>())
            .collect();
        if keep_src.is_empty() || keep_tgt.is_empty() {
            continue;
        }
        let m = total.differential(k as i64).matrix().submatrix(&keep_tgt, &keep_src);
        if !m.is_zero() {
            sdiffs.insert(k as i64, m);
        }
    }
    let sub_complex = CochainComplex::new(sdims, sdiffs)?;

    Ok(OpenSectionData { sub_steps, sub_complex, quotient, projection })
}

/// The flag filtration on the incidence cochain complex:
/// `F^p = cochains supported on Y ∖ Y_{p−1}`, of type `[−n, 0]`.
pub fn flag_filtered_complex(
    poset: &FacePoset,
    sheaf: &CellularSheaf,
    flag: &Flag,
) -> Result<FilteredComplex, Error> {
    let total = sheaf_cochains(poset, sheaf)?;
    let n = flag.n() as i64;
    let mut steps = BTreeMap::new();
    for p in -n..=0 {
        let open = poset.complement(flag.member(p - 1));
        let data = open_section_subcomplex(poset, sheaf, &open)?;
        steps.insert(p, data.sub_steps);
    }
    FilteredComplex::new(total, -n, 0, steps)
}

/// The supported-sections flag filtration on the global sections of the
/// injective resolution: `G^p = Γ(Γ_{Y_{−p}} I)`, of type `[0, n]`.
pub fn gamma_flag_filtered_complex(
    poset: &FacePoset,
    sheaf: &CellularSheaf,
    flag: &Flag,
) -> Result<FilteredComplex, Error> {
    let res = injective_resolution(poset, sheaf)?;
    let total = res.sections_complex();
    let n = flag.n() as i64;
    let mut steps = BTreeMap::new();
    for p in 0..=n {
        let supp = supported_sections(poset, &res, flag.member(-p))?;
        steps.insert(p, supp.sub_steps);
    }
    FilteredComplex::new(total, 0, n, steps)
}

/// The cohomology restriction data of a closed subset in the incidence
/// model.
#[derive(Clone, Debug)]
pub struct RestrictionData {
    pub map: ChainMap,
    /// induced maps on cohomology per degree
    pub on_cohomology: BTreeMap<i64, RatMatrix>,
}

/// The restriction map `H^*(Y, F) → H^*(Z, F|_Z)` induced by the quotient
/// cochain projection.
pub fn restriction_map(
    poset: &FacePoset,
    sheaf: &CellularSheaf,
    closed: &CellSet,
) -> Result<RestrictionData, Error> {
    let open = poset.complement(closed);
    if !poset.is_upward_closed(&open) {
        let witness = closed
            .iter()
            .find(|&&c| (0..poset.n_cells()).any(|s| poset.leq(s, c) && !closed.contains(&s)))
            .copied()
            .unwrap_or(0);
        return Err(Error::BadCellSet {
            expected: "downward-closed",
            cell: poset.name(witness).to_string(),
        });
    }
    let data = open_section_subcomplex(poset, sheaf, &open)?;
    let mut on_h = BTreeMap::new();
    let mut degs: Vec<i64> = data.projection.source().degrees();
    degs.extend(data.projection.target().degrees());
    degs.sort_unstable();
    degs.dedup();
    for n in degs {
        on_h.insert(n, data.projection.induced_on_cohomology(n)?);
    }
    Ok(RestrictionData { map: data.projection, on_cohomology: on_h })
}

/// Kernels of the flag restriction maps, for the abutment cross-check:
/// `Ker{H^u(Y) → H^u(Y_{p−1})}` per degree and step.
pub fn flag_restriction_kernels(
    poset: &FacePoset,
    sheaf: &CellularSheaf,
    flag: &Flag,
) -> Result<BTreeMap<i64, BTreeMap<i64, Subspace>>, Error> {
    let n = flag.n() as i64;
    let total = sheaf_cochains(poset, sheaf)?;
    let mut out: BTreeMap<i64, BTreeMap<i64, Subspace>> = BTreeMap::new();
    for p in -n..=1 {
        let rd = restriction_map(poset, sheaf, flag.member(p - 1))?;
        for u in total.degrees() {
            let ker = LinearMap::new(
                rd.on_cohomology
                    .get(&u)
                    .cloned()
                    .unwrap_or_else(|| RatMatrix::zero(0, total.cohomology_dim(u))),
            )
            .kernel();
            out.entry(u).or_default().insert(p, ker);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::poset::fixtures::*;
    use super::*;

    #[test]
    fn cochains_of_fixtures() {
        let p = point();
        let c = sheaf_cochains(&p, &CellularSheaf::constant(&p, 1)).unwrap();
        assert_eq!(c.cohomology_dim(0), 1);

        // closed interval: H^0 = Q, H^1 = 0
        let i = interval();
        let c = sheaf_cochains(&i, &CellularSheaf::constant(&i, 1)).unwrap();
        assert_eq!(c.cohomology_dim(0), 1);
        assert_eq!(c.cohomology_dim(1), 0);

        // circle: H^0 = H^1 = Q
        let s = circle();
        let c = sheaf_cochains(&s, &CellularSheaf::constant(&s, 1)).unwrap();
        assert_eq!(c.cohomology_dim(0), 1);
        assert_eq!(c.cohomology_dim(1), 1);

        // half-open interval: the incidence complex computes the
        // compactly-supported flavor, which vanishes here
        let h = half_open_interval();
        let c = sheaf_cochains(&h, &CellularSheaf::constant(&h, 1)).unwrap();
        assert_eq!(c.cohomology_dim(0), 0);
        assert_eq!(c.cohomology_dim(1), 0);
    }

    #[test]
    fn nonfunctorial_sheaf_rejected() {
        // square-ish poset: two chains v < e1 < f and v < e2 < f with
        // different composites
        let mut covers = BTreeMap::new();
        covers.insert((0, 1), 1);
        covers.insert((0, 2), -1);
        covers.insert((1, 3), 1);
        covers.insert((2, 3), 1);
        let p = FacePoset::new(
            vec!["v".into(), "e1".into(), "e2".into(), "f".into()],
            vec![0, 1, 1, 2],
            covers,
        )
        .unwrap();
        let mut maps = BTreeMap::new();
        maps.insert((0, 1), RatMatrix::identity(1));
        maps.insert((0, 2), RatMatrix::identity(1));
        maps.insert((1, 3), RatMatrix::identity(1));
        maps.insert((2, 3), RatMatrix::from_i64(1, 1, &[2]));
        assert!(matches!(
            CellularSheaf::new(&p, vec![1, 1, 1, 1], maps),
            Err(Error::NotFunctorial(_))
        ));
    }

    #[test]
    fn open_sections_of_circle() {
        let s = circle();
        let f = CellularSheaf::constant(&s, 1);
        // everything open
        let all = open_section_subcomplex(&s, &f, &s.all_cells()).unwrap();
        assert!(all.quotient.is_zero());
        // empty
        let none = open_section_subcomplex(&s, &f, &CellSet::new()).unwrap();
        assert!(none.sub_complex.is_zero());
        // one open edge
        let u: CellSet = [2usize].into_iter().collect();
        let one = open_section_subcomplex(&s, &f, &u).unwrap();
        assert_eq!(one.sub_complex.cohomology_dim(0), 0);
        assert_eq!(one.sub_complex.cohomology_dim(1), 1);
        // not upward-closed: a vertex alone
        assert!(open_section_subcomplex(&s, &f, &[0usize].into_iter().collect()).is_err());
    }

    #[test]
    fn flag_filtration_types() {
        let s = circle();
        let f = CellularSheaf::constant(&s, 1);
        let flag = Flag::new(
            &s,
            vec![s.all_cells(), [0usize].into_iter().collect(), CellSet::new()],
        )
        .unwrap();
        let fc = flag_filtered_complex(&s, &f, &flag).unwrap();
        assert_eq!(fc.range(), (-1, 0));
        // F^{-1} = everything, F^{1} = 0
        for n in fc.total().degrees() {
            assert!(fc.step(-1, n).is_full());
            assert!(fc.step(1, n).is_zero());
        }

        // duplicated member collapses to equal consecutive steps
        let flag2 = Flag::new(
            &s,
            vec![s.all_cells(), CellSet::new(), CellSet::new()],
        )
        .unwrap();
        let fc2 = flag_filtered_complex(&s, &f, &flag2).unwrap();
        assert_eq!(fc2.range(), (-1, 0));
        for n in fc2.total().degrees() {
            assert_eq!(fc2.step(0, n), fc2.step(-1, n));
        }
    }

    #[test]
    fn restriction_to_point_on_circle() {
        let s = circle();
        let f = CellularSheaf::constant(&s, 1);
        let z: CellSet = [0usize].into_iter().collect();
        let rd = restriction_map(&s, &f, &z).unwrap();
        // H^0(circle) → H^0(pt) is an isomorphism of 1-dim spaces
        let m = rd.on_cohomology.get(&0).unwrap();
        assert_eq!(m.rows(), 1);
        assert_eq!(m.cols(), 1);
        assert!(LinearMap::new(m.clone()).is_iso());
        // restriction to the whole space is the identity
        let rall = restriction_map(&s, &f, &s.all_cells()).unwrap();
        for n in [0i64, 1] {
            let m = rall.on_cohomology.get(&n).unwrap();
            assert_eq!(m, &RatMatrix::identity(1));
        }
        // restriction to the empty set is zero
        let rnone = restriction_map(&s, &f, &CellSet::new()).unwrap();
        assert!(rnone.on_cohomology.values().all(|m| m.is_zero()));
    }
}
