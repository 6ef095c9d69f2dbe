//! Bounded cochain complexes of rational vector spaces.
//!
//! Complexes are finite data: a dimension per degree and a differential per
//! degree, with `d ∘ d = 0` enforced at construction. The zero complex is a
//! legal value everywhere.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::qlinalg::{LinearMap, Quotient, Rat, RatMatrix, Subquotient, Subspace};

/// Bounded cochain complex `… → C^n → C^{n+1} → …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CochainComplex {
    dims: BTreeMap<i64, usize>,
    diffs: BTreeMap<i64, RatMatrix>,
}

impl CochainComplex {
    /// Builds a complex and checks shapes and `d∘d = 0`.
    pub fn new(
        dims: BTreeMap<i64, usize>,
        diffs: BTreeMap<i64, RatMatrix>,
    ) -> Result<Self, Error> {
        let dims: BTreeMap<i64, usize> = dims.into_iter().filter(|&(_, d)| d > 0).collect();
        let mut kept = BTreeMap::new();
        for (&n, m) in &diffs {
            let s = dims.get(&n).copied().unwrap_or(0);
            let t = dims.get(&(n + 1)).copied().unwrap_or(0);
            if m.cols() != s || m.rows() != t {
                return Err(Error::Shape(format!(
                    "differential at degree {n} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    t,
                    s
                )));
            }
            if !m.is_zero() {
                kept.insert(n, m.clone());
            }
        }
        let c = CochainComplex { dims, diffs: kept };
        for n in c.degrees() {
            let dd = c.differential(n + 1).matrix().mul(c.differential(n).matrix())?;
            if !dd.is_zero() {
                return Err(Error::DifferentialSquare { degree: n });
            }
        }
        Ok(c)
    }

    pub fn zero() -> Self {
        CochainComplex { dims: BTreeMap::new(), diffs: BTreeMap::new() }
    }

    /// One space in a single degree, with zero differentials.
    pub fn concentrated(degree: i64, dim: usize) -> Self {
        let mut dims = BTreeMap::new();
        if dim > 0 {
            dims.insert(degree, dim);
        }
        CochainComplex { dims, diffs: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn dim(&self, n: i64) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<i64, usize> {
        &self.dims
    }

    /// Degrees of nonzero spaces, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        self.dims.keys().copied().collect()
    }

    /// Support interval `[lo, hi]`, or `None` for the zero complex.
    pub fn support(&self) -> Option<(i64, i64)> {
        let lo = *self.dims.keys().next()?;
        let hi = *self.dims.keys().next_back()?;
        Some((lo, hi))
    }

    pub fn differential(&self, n: i64) -> LinearMap {
        match self.diffs.get(&n) {
            Some(m) => LinearMap::new(m.clone()),
            None => LinearMap::zero(self.dim(n), self.dim(n + 1)),
        }
    }

    /// Cohomology at degree `n`, presented as the subquotient
    /// `ker d^n / im d^{n−1}` of `C^n`.
    pub fn cohomology(&self, n: i64) -> Subquotient {
        let cocycles = self.differential(n).kernel();
        let coboundaries = self.differential(n - 1).image();
        Subquotient::new(&cocycles, &coboundaries)
            .expect("coboundaries are cocycles because d squares to zero")
    }

    pub fn cohomology_dim(&self, n: i64) -> usize {
        self.cohomology(n).dim()
    }

    /// All nonzero cohomology dimensions.
    pub fn cohomology_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        if let Some((lo, hi)) = self.support() {
            for n in lo..=hi {
                let d = self.cohomology_dim(n);
                if d > 0 {
                    out.insert(n, d);
                }
            }
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .map(|(&n, &d)| if n.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Translation: `(C[d])^n = C^{n+d}` with differential scaled by `(−1)^d`.
    pub fn shift(&self, d: i64) -> CochainComplex {
        let sign = if d.rem_euclid(2) == 0 { 1i64 } else { -1 };
        let dims = self.dims.iter().map(|(&n, &k)| (n - d, k)).collect();
        let diffs = self
            .diffs
            .iter()
            .map(|(&n, m)| (n - d, if sign == 1 { m.clone() } else { m.neg() }))
            .collect();
        CochainComplex { dims, diffs }
    }

    /// Direct sum, first summand's coordinates first.
    pub fn direct_sum(&self, other: &CochainComplex) -> CochainComplex {
        let mut dims = BTreeMap::new();
        let degs: std::collections::BTreeSet<i64> =
            self.dims.keys().chain(other.dims.keys()).copied().collect();
        for &n in &degs {
            dims.insert(n, self.dim(n) + other.dim(n));
        }
        let mut diffs = BTreeMap::new();
        for &n in &degs {
            let (s1, s2) = (self.dim(n), other.dim(n));
            let (t1, t2) = (self.dim(n + 1), other.dim(n + 1));
            if t1 + t2 == 0 || s1 + s2 == 0 {
                continue;
            }
            let mut m = RatMatrix::zero(t1 + t2, s1 + s2);
            let a = self.differential(n);
            let b = other.differential(n);
            for i in 0..t1 {
                for j in 0..s1 {
                    m.set(i, j, a.matrix().get(i, j).clone());
                }
            }
            for i in 0..t2 {
                for j in 0..s2 {
                    m.set(t1 + i, s1 + j, b.matrix().get(i, j).clone());
                }
            }
            if !m.is_zero() {
                diffs.insert(n, m);
            }
        }
        CochainComplex { dims, diffs }
    }
}

/// Degreewise linear map commuting with the differentials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMap {
    source: CochainComplex,
    target: CochainComplex,
    comps: BTreeMap<i64, RatMatrix>,
}

impl ChainMap {
    pub fn new(
        source: CochainComplex,
        target: CochainComplex,
        comps: BTreeMap<i64, RatMatrix>,
    ) -> Result<Self, Error> {
        let mut kept = BTreeMap::new();
        for (&n, m) in &comps {
            if m.cols() != source.dim(n) || m.rows() != target.dim(n) {
                return Err(Error::Shape(format!(
                    "chain map component at degree {n} has shape {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    target.dim(n),
                    source.dim(n)
                )));
            }
            if !m.is_zero() {
                kept.insert(n, m.clone());
            }
        }
        let f = ChainMap { source, target, comps: kept };
        for n in f.source.degrees() {
            let lhs = f.target.differential(n).matrix().mul(f.component(n).matrix())?;
            let rhs = f.component(n + 1).matrix().mul(f.source.differential(n).matrix())?;
            if lhs != rhs {
                return Err(Error::NotChainMap { degree: n });
            }
        }
        Ok(f)
    }

    pub fn identity(c: &CochainComplex) -> Self {
        let comps = c.dims.iter().map(|(&n, &d)| (n, RatMatrix::identity(d))).collect();
        ChainMap { source: c.clone(), target: c.clone(), comps }
    }

    pub fn zero(source: &CochainComplex, target: &CochainComplex) -> Self {
        ChainMap { source: source.clone(), target: target.clone(), comps: BTreeMap::new() }
    }

    pub fn source(&self) -> &CochainComplex {
        &self.source
    }

    pub fn target(&self) -> &CochainComplex {
        &self.target
    }

    pub fn component(&self, n: i64) -> LinearMap {
        match self.comps.get(&n) {
            Some(m) => LinearMap::new(m.clone()),
            None => LinearMap::zero(self.source.dim(n), self.target.dim(n)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ChainMap) -> Result<ChainMap, Error> {
        if other.target != self.source {
            return Err(Error::Shape("chain map composition middle mismatch".into()));
        }
        let mut comps = BTreeMap::new();
        for n in other.source.degrees() {
            let m = self.component(n).matrix().mul(other.component(n).matrix())?;
            if !m.is_zero() {
                comps.insert(n, m);
            }
        }
        Ok(ChainMap { source: other.source.clone(), target: self.target.clone(), comps })
    }

    pub fn shift(&self, d: i64) -> ChainMap {
        ChainMap {
            source: self.source.shift(d),
            target: self.target.shift(d),
            comps: self.comps.iter().map(|(&n, m)| (n - d, m.clone())).collect(),
        }
    }

    /// Matrix of `H^n(f)` between the canonical cohomology presentations.
    pub fn induced_on_cohomology(&self, n: i64) -> Result<RatMatrix, Error> {
        let hs = self.source.cohomology(n);
        let ht = self.target.cohomology(n);
        hs.induced(&ht, &self.component(n))
    }
}

/// The mapping cone with the three maps of its triangle
/// `source →f target →i cone →p source[1]`.
#[derive(Clone, Debug)]
pub struct ConeTriangle {
    pub cone: CochainComplex,
    pub map: ChainMap,
    pub into_cone: ChainMap,
    pub onto_shift: ChainMap,
}

/// Mapping cone `Cone(f)^n = A^{n+1} ⊕ B^n` with the standard
/// upper-triangular differential `(a,b) ↦ (−d a, f a + d b)`.
pub fn cone(f: &ChainMap) -> Result<ConeTriangle, Error> {
    let a = f.source();
    let b = f.target();
    let mut degs: std::collections::BTreeSet<i64> = b.degrees().into_iter().collect();
    for n in a.degrees() {
        degs.insert(n - 1);
    }
    let mut dims = BTreeMap::new();
    for &n in &degs {
        let d = a.dim(n + 1) + b.dim(n);
        if d > 0 {
            dims.insert(n, d);
        }
    }
    let mut diffs = BTreeMap::new();
    for &n in &degs {
        let (sa, sb) = (a.dim(n + 1), b.dim(n));
        let (ta, tb) = (a.dim(n + 2), b.dim(n + 1));
        if sa + sb == 0 || ta + tb == 0 {
            continue;
        }
        let mut m = RatMatrix::zero(ta + tb, sa + sb);
        let da = a.differential(n + 1);
        let db = b.differential(n);
        let fc = f.component(n + 1);
        for i in 0..ta {
            for j in 0..sa {
                m.set(i, j, -da.matrix().get(i, j));
            }
        }
        for i in 0..tb {
            for j in 0..sa {
                m.set(ta + i, j, fc.matrix().get(i, j).clone());
            }
        }
        for i in 0..tb {
            for j in 0..sb {
                m.set(ta + i, sa + j, db.matrix().get(i, j).clone());
            }
        }
        if !m.is_zero() {
            diffs.insert(n, m);
        }
    }
    let cone_cx = CochainComplex::new(dims, diffs)?;

    let mut into = BTreeMap::new();
    for n in b.degrees() {
        let (sa, sb) = (a.dim(n + 1), b.dim(n));
        let mut m = RatMatrix::zero(sa + sb, sb);
        for i in 0..sb {
            m.set(sa + i, i, crate::qlinalg::rint(1));
        }
        into.insert(n, m);
    }
    let into_cone = ChainMap::new(b.clone(), cone_cx.clone(), into)?;

    let a1 = a.shift(1);
    let mut onto = BTreeMap::new();
    for &n in cone_cx.dims.keys() {
        let (sa, sb) = (a.dim(n + 1), b.dim(n));
        let mut m = RatMatrix::zero(a1.dim(n), sa + sb);
        for i in 0..sa {
            m.set(i, i, crate::qlinalg::rint(1));
        }
        if !m.is_zero() {
            onto.insert(n, m);
        }
    }
    let onto_shift = ChainMap::new(cone_cx.clone(), a1, onto)?;

    Ok(ConeTriangle { cone: cone_cx, map: f.clone(), into_cone, onto_shift })
}

/// Which truncation to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// `τ_{≤a}`: kernel (subcomplex) model; the returned map includes into
    /// the original complex.
    Below(i64),
    /// `τ_{≥b}`: cokernel (quotient) model; the returned map projects from
    /// the original complex.
    Above(i64),
}

/// Truncates `c`; the second component is the canonical comparison chain
/// map (inclusion for `Below`, projection for `Above`).
pub fn truncate(c: &CochainComplex, t: Truncation) -> Result<(CochainComplex, ChainMap), Error> {
    match t {
        Truncation::Below(a) => {
            let ker = c.differential(a).kernel();
            let mut dims = BTreeMap::new();
            let mut diffs = BTreeMap::new();
            let mut incl = BTreeMap::new();
            for (&n, &k) in &c.dims {
                if n < a {
                    dims.insert(n, k);
                    incl.insert(n, RatMatrix::identity(k));
                    if n < a - 1 {
                        if let Some(m) = c.diffs.get(&n) {
                            diffs.insert(n, m.clone());
                        }
                    }
                }
            }
            if ker.dim() > 0 && c.dim(a) > 0 {
                dims.insert(a, ker.dim());
                incl.insert(a, ker.basis().transpose());
                // d^{a-1} lands in ker d^a; express it in the kernel basis.
                let da1 = c.differential(a - 1);
                if c.dim(a - 1) > 0 && !da1.is_zero() {
                    let mut cols = Vec::new();
                    for j in 0..c.dim(a - 1) {
                        let v = da1.matrix().col(j);
                        cols.push(coords_in_canonical_basis(&ker, &v)?);
                    }
                    let m = RatMatrix::from_rows(cols)?.transpose();
                    if !m.is_zero() {
                        diffs.insert(a - 1, m);
                    }
                }
            }
            let trunc = CochainComplex::new(dims, diffs)?;
            let map = ChainMap::new(trunc.clone(), c.clone(), incl)?;
            Ok((trunc, map))
        }
        Truncation::Above(b) => {
            let im = c.differential(b - 1).image();
            let q = Quotient::new(&Subspace::full(c.dim(b)), &im)?;
            let mut dims = BTreeMap::new();
            let mut diffs = BTreeMap::new();
            let mut proj = BTreeMap::new();
            for (&n, &k) in &c.dims {
                if n > b {
                    dims.insert(n, k);
                    proj.insert(n, RatMatrix::identity(k));
                    if let Some(m) = c.diffs.get(&n) {
                        diffs.insert(n, m.clone());
                    }
                }
            }
            if q.dim > 0 && c.dim(b) > 0 {
                dims.insert(b, q.dim);
                proj.insert(b, q.projection.matrix().clone());
                let db = c.differential(b);
                let dq = db.compose(&q.section)?;
                if !dq.is_zero() {
                    diffs.insert(b, dq.matrix().clone());
                }
            }
            let trunc = CochainComplex::new(dims, diffs)?;
            let map = ChainMap::new(c.clone(), trunc.clone(), proj)?;
            Ok((trunc, map))
        }
    }
}

/// The subcomplex spanned by a d-stable family of subspaces, presented on
/// the canonical bases, with its inclusion into the ambient complex.
pub fn subcomplex(
    c: &CochainComplex,
    spans: &BTreeMap<i64, Subspace>,
) -> Result<(CochainComplex, ChainMap), Error> {
    let mut dims = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    let mut incl = BTreeMap::new();
    for (&n, s) in spans {
        if s.ambient_dim() != c.dim(n) {
            return Err(Error::AmbientMismatch { left: s.ambient_dim(), right: c.dim(n) });
        }
        if s.dim() > 0 {
            dims.insert(n, s.dim());
            incl.insert(n, s.basis().transpose());
        }
    }
    for (&n, s) in spans {
        let Some(t) = spans.get(&(n + 1)) else { continue };
        if s.dim() == 0 || t.dim() == 0 {
            continue;
        }
        let d = c.differential(n);
        let mut rows = Vec::new();
        for i in 0..s.dim() {
            let v = d.apply(&s.basis().row(i))?;
            rows.push(coords_in_canonical_basis(t, &v)?);
        }
        let m = RatMatrix::from_rows(rows)?.transpose();
        if !m.is_zero() {
            diffs.insert(n, m);
        }
    }
    let sub = CochainComplex::new(dims, diffs)?;
    let map = ChainMap::new(sub.clone(), c.clone(), incl)?;
    Ok((sub, map))
}

/// The quotient complex by a d-stable family of subspaces, with its
/// projection from the ambient complex.
pub fn quotient_complex(
    c: &CochainComplex,
    spans: &BTreeMap<i64, Subspace>,
) -> Result<(CochainComplex, ChainMap), Error> {
    let mut quos = BTreeMap::new();
    for n in c.degrees() {
        let s = spans.get(&n).cloned().unwrap_or_else(|| Subspace::zero(c.dim(n)));
        quos.insert(n, Quotient::new(&Subspace::full(c.dim(n)), &s)?);
    }
    let mut dims = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for (&n, q) in &quos {
        if q.dim > 0 {
            dims.insert(n, q.dim);
            proj.insert(n, q.projection.matrix().clone());
        }
    }
    for (&n, q) in &quos {
        let Some(t) = quos.get(&(n + 1)) else { continue };
        if q.dim == 0 || t.dim == 0 {
            continue;
        }
        let m = t.projection.compose(&c.differential(n))?.compose(&q.section)?;
        if !m.is_zero() {
            diffs.insert(n, m.matrix().clone());
        }
    }
    let quo = CochainComplex::new(dims, diffs)?;
    let map = ChainMap::new(c.clone(), quo.clone(), proj)?;
    Ok((quo, map))
}

/// Coordinates of `v` (a member of `s`) in the canonical RREF basis of `s`:
/// read off the pivot coordinates.
pub fn coords_in_canonical_basis(s: &Subspace, v: &[Rat]) -> Result<Vec<Rat>, Error> {
    if !s.contains_vector(v) {
        return Err(Error::NotContained { context: "coords_in_canonical_basis".into() });
    }
    let mut coords = Vec::with_capacity(s.dim());
    for i in 0..s.dim() {
        let pc = (0..s.ambient_dim())
            .find(|&j| {
                use num_traits::One;
                s.basis().get(i, j).is_one()
            })
            .expect("pivot in canonical basis");
        coords.push(v[pc].clone());
    }
    Ok(coords)
}

/// Exactness test at the middle of `• →f • →g •` (assumes `g∘f = 0`).
pub fn exact_at(f: &LinearMap, g: &LinearMap) -> bool {
    f.image() == g.kernel()
}

/// Checks exactness of the long cohomology sequence of a triangle
/// `A →i B →p C →∂ A[1]` whose maps are genuine chain maps. Returns the
/// degrees and nodes where exactness fails.
pub fn les_failures(
    i: &ChainMap,
    p: &ChainMap,
    del: &ChainMap,
) -> Result<Vec<(i64, &'static str)>, Error> {
    let mut bad = Vec::new();
    let a = i.source();
    let b = i.target();
    let c = p.target();
    let mut degs: std::collections::BTreeSet<i64> = a.degrees().into_iter().collect();
    degs.extend(b.degrees());
    degs.extend(c.degrees());
    let lo = degs.iter().next().copied().unwrap_or(0) - 1;
    let hi = degs.iter().next_back().copied().unwrap_or(0) + 1;
    for n in lo..=hi {
        let hi_n = LinearMap::new(i.induced_on_cohomology(n)?);
        let hp_n = LinearMap::new(p.induced_on_cohomology(n)?);
        // ∂ : C → A[1] gives H^n(C) → H^n(A[1]) = H^{n+1}(A).
        let hd_n = LinearMap::new(del.induced_on_cohomology(n)?);
        let hi_n1 = LinearMap::new(i.induced_on_cohomology(n + 1)?);
        if !exact_at(&hi_n, &hp_n) {
            bad.push((n, "middle"));
        }
        if !exact_at(&hp_n, &hd_n) {
            bad.push((n, "quotient"));
        }
        if !exact_at(&hd_n, &hi_n1) {
            bad.push((n, "connecting"));
        }
    }
    Ok(bad)
}

/// Finitely filtered complex: a bounded complex with a finite decreasing
/// chain of d-stable subcomplexes, of type `[flo, fhi]`
/// (`F^{flo} = total`, `F^{fhi+1} = 0`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilteredComplex {
    total: CochainComplex,
    flo: i64,
    fhi: i64,
    steps: BTreeMap<i64, BTreeMap<i64, Subspace>>,
}

impl FilteredComplex {
    pub fn new(
        total: CochainComplex,
        flo: i64,
        fhi: i64,
        steps: BTreeMap<i64, BTreeMap<i64, Subspace>>,
    ) -> Result<Self, Error> {
        if flo > fhi {
            return Err(Error::Shape("filtration type [flo,fhi] needs flo <= fhi".into()));
        }
        let fc = FilteredComplex { total, flo, fhi, steps };
        for p in fc.flo..=fc.fhi {
            for n in fc.total.degrees() {
                let s = fc.step(p, n);
                if s.ambient_dim() != fc.total.dim(n) {
                    return Err(Error::AmbientMismatch {
                        left: s.ambient_dim(),
                        right: fc.total.dim(n),
                    });
                }
                if p == fc.flo && !s.is_full() {
                    return Err(Error::NotContained {
                        context: format!("F^{p} must be the whole space at degree {n}"),
                    });
                }
                if !fc.step(p, n).contains(&fc.step(p + 1, n)) {
                    return Err(Error::NotDecreasing { p, degree: n });
                }
                let img = fc.total.differential(n).image_of(&s)?;
                if !fc.step(p, n + 1).contains(&img) {
                    return Err(Error::NotDStable { p, degree: n });
                }
            }
        }
        Ok(fc)
    }

    /// One-step filtration `F^0 = total ⊇ F^1 = 0`.
    pub fn one_step(total: CochainComplex) -> Self {
        FilteredComplex { total, flo: 0, fhi: 0, steps: BTreeMap::new() }
    }

    pub fn total(&self) -> &CochainComplex {
        &self.total
    }

    /// Filtration type `[flo, fhi]`.
    pub fn range(&self) -> (i64, i64) {
        (self.flo, self.fhi)
    }

    /// `F^p` at degree `n`, clamped: full below `flo`, zero above `fhi`.
    pub fn step(&self, p: i64, n: i64) -> Subspace {
        let dim = self.total.dim(n);
        if p <= self.flo {
            return Subspace::full(dim);
        }
        if p > self.fhi {
            return Subspace::zero(dim);
        }
        self.steps
            .get(&p)
            .and_then(|m| m.get(&n).cloned())
            .unwrap_or_else(|| Subspace::zero(dim))
    }

    /// The shifted filtered complex: total `C[d]` with steps re-indexed so
    /// that the step at the new index `p` is the old `F^{p−d}` degreewise.
    pub fn shift(&self, d: i64) -> FilteredComplex {
        let total = self.total.shift(d);
        let mut steps = BTreeMap::new();
        for p in self.flo..=self.fhi {
            let mut per = BTreeMap::new();
            for n in self.total.degrees() {
                per.insert(n - d, self.step(p, n));
            }
            steps.insert(p + d, per);
        }
        FilteredComplex { total, flo: self.flo + d, fhi: self.fhi + d, steps }
    }
}

/// The graded piece `F^p/F^{p+1}` of a filtered complex, as a complex in
/// the canonical quotient presentations.
pub fn graded_piece(fc: &FilteredComplex, p: i64) -> Result<CochainComplex, Error> {
    let total = fc.total();
    let mut sq = BTreeMap::new();
    for n in total.degrees() {
        sq.insert(n, Subquotient::new(&fc.step(p, n), &fc.step(p + 1, n))?);
    }
    let mut dims = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for (&n, s) in &sq {
        if s.dim() > 0 {
            dims.insert(n, s.dim());
        }
    }
    for (&n, s) in &sq {
        let Some(t) = sq.get(&(n + 1)) else { continue };
        if s.dim() == 0 || t.dim() == 0 {
            continue;
        }
        let m = s.induced(t, &total.differential(n))?;
        if !m.is_zero() {
            diffs.insert(n, m);
        }
    }
    CochainComplex::new(dims, diffs)
}

/// One space with two finite decreasing exhaustive filtrations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BifilteredSpace {
    ambient: usize,
    f: BTreeMap<i64, Subspace>,
    g: BTreeMap<i64, Subspace>,
}

impl BifilteredSpace {
    pub fn new(
        ambient: usize,
        f: BTreeMap<i64, Subspace>,
        g: BTreeMap<i64, Subspace>,
    ) -> Result<Self, Error> {
        for chain in [&f, &g] {
            let mut prev: Option<&Subspace> = None;
            for s in chain.values() {
                if s.ambient_dim() != ambient {
                    return Err(Error::AmbientMismatch { left: s.ambient_dim(), right: ambient });
                }
                if let Some(pr) = prev {
                    if !pr.contains(s) {
                        return Err(Error::NotContained {
                            context: "bifiltered chain not decreasing".into(),
                        });
                    }
                }
                prev = Some(s);
            }
        }
        Ok(BifilteredSpace { ambient, f, g })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    fn clamp(chain: &BTreeMap<i64, Subspace>, ambient: usize, p: i64) -> Subspace {
        match chain.range(..=p).next_back() {
            // below the stored range: exhaustive, so the whole space
            None => Subspace::full(ambient),
            Some((&k, s)) => {
                if k == p || p <= *chain.keys().next_back().expect("nonempty") {
                    s.clone()
                } else {
                    // above the stored range: finite, so zero
                    Subspace::zero(ambient)
                }
            }
        }
    }

    pub fn f_step(&self, p: i64) -> Subspace {
        Self::clamp(&self.f, self.ambient, p)
    }

    pub fn g_step(&self, p: i64) -> Subspace {
        Self::clamp(&self.g, self.ambient, p)
    }

    pub fn f_range(&self) -> (i64, i64) {
        let lo = self.f.keys().next().copied().unwrap_or(0);
        let hi = self.f.keys().next_back().copied().unwrap_or(0);
        (lo, hi)
    }

    pub fn g_range(&self) -> (i64, i64) {
        let lo = self.g.keys().next().copied().unwrap_or(0);
        let hi = self.g.keys().next_back().copied().unwrap_or(0);
        (lo, hi)
    }
}

/// The two bigraded pieces `Gr^F_a Gr^G_c` and `Gr^G_c Gr^F_a` with the
/// canonical identification between them.
#[derive(Clone, Debug)]
pub struct ZassenhausResult {
    pub dim_fg: usize,
    pub dim_gf: usize,
    /// Invertible map `Gr^F_a Gr^G_c → Gr^G_c Gr^F_a` induced by the
    /// identity on representatives in `F^a ∩ G^c`.
    pub iso: LinearMap,
}

/// `Gr^F_a Gr^G_c ≅ Gr^G_c Gr^F_a`, computed through the common middle
/// `(F^a∩G^c) / ((F^{a+1}∩G^c) + (F^a∩G^{c+1}))`.
pub fn zassenhaus(b: &BifilteredSpace, a: i64, c: i64) -> Result<ZassenhausResult, Error> {
    let fa = b.f_step(a);
    let fa1 = b.f_step(a + 1);
    let gc = b.g_step(c);
    let gc1 = b.g_step(c + 1);

    let n_mid = fa.intersect(&gc)?;
    let d_mid = fa1.intersect(&gc)?.sum(&fa.intersect(&gc1)?)?;
    let mid = Subquotient::new(&n_mid, &d_mid)?;

    // Gr^F_a Gr^G_c = (F^a∩G^c + G^{c+1}) / (F^{a+1}∩G^c + G^{c+1})
    let q_fg = Subquotient::new(&n_mid.sum(&gc1)?, &fa1.intersect(&gc)?.sum(&gc1)?)?;
    // Gr^G_c Gr^F_a = (F^a∩G^c + F^{a+1}) / (F^a∩G^{c+1} + F^{a+1})
    let q_gf = Subquotient::new(&n_mid.sum(&fa1)?, &fa.intersect(&gc1)?.sum(&fa1)?)?;

    let idm = LinearMap::identity(b.ambient_dim());
    let to_fg = LinearMap::new(mid.induced(&q_fg, &idm)?);
    let to_gf = LinearMap::new(mid.induced(&q_gf, &idm)?);
    let inv_fg = to_fg
        .matrix()
        .inverse()
        .ok_or_else(|| Error::Shape("Zassenhaus comparison map is not invertible".into()))?;
    let iso = to_gf.compose(&LinearMap::new(inv_fg))?;
    Ok(ZassenhausResult { dim_fg: q_fg.dim(), dim_gf: q_gf.dim(), iso })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlinalg::rint;

    /// Circle model: two vertices, two edges, constant coefficients.
    pub fn circle() -> CochainComplex {
        let mut dims = BTreeMap::new();
        dims.insert(0, 2);
        dims.insert(1, 2);
        let mut diffs = BTreeMap::new();
        diffs.insert(0, RatMatrix::from_i64(2, 2, &[-1, 1, -1, 1]));
        CochainComplex::new(dims, diffs).unwrap()
    }

    #[test]
    fn cohomology_examples() {
        // 0 → Q → Q → 0 with d = 1: exact.
        let mut dims = BTreeMap::new();
        dims.insert(0, 1);
        dims.insert(1, 1);
        let mut diffs = BTreeMap::new();
        diffs.insert(0, RatMatrix::identity(1));
        let c = CochainComplex::new(dims, diffs).unwrap();
        assert_eq!(c.cohomology_dim(0), 0);
        assert_eq!(c.cohomology_dim(1), 0);

        let p = CochainComplex::concentrated(0, 1);
        assert_eq!(p.cohomology_dim(0), 1);

        let s1 = circle();
        assert_eq!(s1.cohomology_dim(0), 1);
        assert_eq!(s1.cohomology_dim(1), 1);
    }

    #[test]
    fn dd_violation_rejected() {
        let mut dims = BTreeMap::new();
        dims.insert(0, 1);
        dims.insert(1, 1);
        dims.insert(2, 1);
        let mut diffs = BTreeMap::new();
        diffs.insert(0, RatMatrix::identity(1));
        diffs.insert(1, RatMatrix::identity(1));
        assert!(matches!(
            CochainComplex::new(dims, diffs),
            Err(Error::DifferentialSquare { .. })
        ));
    }

    #[test]
    fn euler_characteristic_matches_cohomology() {
        let c = circle();
        let chi: i64 = c
            .cohomology_dims()
            .iter()
            .map(|(&n, &d)| if n.rem_euclid(2) == 0 { d as i64 } else { -(d as i64) })
            .sum();
        assert_eq!(c.euler_characteristic(), chi);
    }

    #[test]
    fn shift_examples() {
        let c = circle();
        assert_eq!(c.shift(0), c);
        let p = CochainComplex::concentrated(0, 1);
        assert_eq!(p.shift(1), CochainComplex::concentrated(-1, 1));
        // H^n(C[d]) = H^{n+d}(C)
        for d in [-2i64, 1, 3] {
            let s = c.shift(d);
            for n in -5..5 {
                assert_eq!(s.cohomology_dim(n), c.cohomology_dim(n + d));
            }
        }
        // shift(shift(c,a),b) = shift(c,a+b)
        assert_eq!(c.shift(2).shift(-3), c.shift(-1));
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = circle();
        let t = cone(&ChainMap::identity(&c)).unwrap();
        for n in -3..4 {
            assert_eq!(t.cone.cohomology_dim(n), 0, "degree {n}");
        }
    }

    #[test]
    fn cone_of_zero_is_sum() {
        let a = CochainComplex::concentrated(0, 1);
        let f = ChainMap::zero(&a, &a);
        let t = cone(&f).unwrap();
        assert_eq!(t.cone.cohomology_dim(-1), 1);
        assert_eq!(t.cone.cohomology_dim(0), 1);
    }

    #[test]
    fn cone_les_for_cellular_restriction() {
        // Restriction of circle cochains to one vertex.
        let c = circle();
        let v = CochainComplex::concentrated(0, 1);
        let mut comps = BTreeMap::new();
        comps.insert(0, RatMatrix::from_i64(1, 2, &[1, 0]));
        let f = ChainMap::new(c.clone(), v.clone(), comps).unwrap();
        let t = cone(&f).unwrap();
        // exactness of H(B) → H(Cone) → H(A[1]) at every node in range
        for n in -2..3 {
            let hi = LinearMap::new(t.into_cone.induced_on_cohomology(n).unwrap());
            let hp = LinearMap::new(t.onto_shift.induced_on_cohomology(n).unwrap());
            assert!(exact_at(&hi, &hp), "degree {n}");
        }
        // LES of the pair: H^0(cone) = 0 (restriction is iso on H^0),
        // H^0... the surviving class is H^1 of the circle, seen in degree 0.
        assert_eq!(t.cone.cohomology_dim(-1), 0);
        assert_eq!(t.cone.cohomology_dim(0), 1);
        assert_eq!(t.cone.cohomology_dim(1), 0);
    }

    #[test]
    fn truncate_examples() {
        let c = circle();
        let (t, map) = truncate(&c, Truncation::Below(1)).unwrap();
        for n in -2..3 {
            assert_eq!(t.cohomology_dim(n), c.cohomology_dim(n));
        }
        assert_eq!(map.source(), &t);

        let p = CochainComplex::concentrated(0, 1);
        let (t2, _) = truncate(&p, Truncation::Below(-1)).unwrap();
        assert!(t2.is_zero());

        // truncating both ways at 0 leaves exactly H^0 in degree 0
        let (below, _) = truncate(&c, Truncation::Below(0)).unwrap();
        let (mid, _) = truncate(&below, Truncation::Above(0)).unwrap();
        assert_eq!(mid.cohomology_dim(0), c.cohomology_dim(0));
        assert_eq!(mid.dims().len(), 1);

        // truncations in either order give the same cohomology
        let (above, _) = truncate(&c, Truncation::Above(0)).unwrap();
        let (mid2, _) = truncate(&above, Truncation::Below(0)).unwrap();
        for n in -2..3 {
            assert_eq!(mid.cohomology_dim(n), mid2.cohomology_dim(n));
        }
    }

    #[test]
    fn truncate_cohomology_ranges() {
        let c = circle();
        let (t, _) = truncate(&c, Truncation::Below(0)).unwrap();
        assert_eq!(t.cohomology_dim(0), 1);
        assert_eq!(t.cohomology_dim(1), 0);
        let (u, _) = truncate(&c, Truncation::Above(1)).unwrap();
        assert_eq!(u.cohomology_dim(0), 0);
        assert_eq!(u.cohomology_dim(1), 1);
    }

    #[test]
    fn filtered_complex_validation() {
        let c = circle();
        // stupid filtration: F^0 = C, F^1 = degree-1 part, F^2 = 0
        let mut step1 = BTreeMap::new();
        step1.insert(0, Subspace::zero(2));
        step1.insert(1, Subspace::full(2));
        let mut full = BTreeMap::new();
        full.insert(0, Subspace::full(2));
        full.insert(1, Subspace::full(2));
        let mut steps = BTreeMap::new();
        steps.insert(0, full.clone());
        steps.insert(1, step1);
        let fc = FilteredComplex::new(c.clone(), 0, 1, steps).unwrap();
        assert_eq!(fc.step(-3, 0), Subspace::full(2));
        assert_eq!(fc.step(2, 0), Subspace::zero(2));

        // a non-d-stable filtration must be rejected: F^1 = degree-0 part
        let mut bad1 = BTreeMap::new();
        bad1.insert(0, Subspace::full(2));
        bad1.insert(1, Subspace::zero(2));
        let mut steps2 = BTreeMap::new();
        steps2.insert(0, full);
        steps2.insert(1, bad1);
        assert!(matches!(FilteredComplex::new(c, 0, 1, steps2), Err(Error::NotDStable { .. })));
    }

    #[test]
    fn zassenhaus_examples() {
        let e = |i: usize| {
            let mut v = vec![rint(0); 3];
            v[i] = rint(1);
            v
        };
        // F = G: Gr_a Gr_c = 0 unless a = c.
        let mut f = BTreeMap::new();
        f.insert(0, Subspace::full(3));
        f.insert(1, Subspace::from_vectors(3, &[e(0), e(1)]).unwrap());
        f.insert(2, Subspace::from_vectors(3, &[e(0)]).unwrap());
        let b = BifilteredSpace::new(3, f.clone(), f.clone()).unwrap();
        for a in 0..3 {
            for c in 0..3 {
                let z = zassenhaus(&b, a, c).unwrap();
                assert_eq!(z.dim_fg, z.dim_gf);
                assert_eq!(z.dim_fg, usize::from(a == c));
            }
        }

        // G trivial: reduces to Gr^F_a.
        let mut g_triv = BTreeMap::new();
        g_triv.insert(0, Subspace::full(3));
        let b2 = BifilteredSpace::new(3, f.clone(), g_triv).unwrap();
        for a in 0..3 {
            let z = zassenhaus(&b2, a, 0).unwrap();
            assert_eq!(z.dim_fg, 1);
            assert_eq!(z.dim_gf, 1);
        }

        // crossing filtrations in Q^3, bigraded dims found by lattice ops
        let mut f3 = BTreeMap::new();
        f3.insert(0, Subspace::full(3));
        f3.insert(1, Subspace::from_vectors(3, &[e(0), e(1)]).unwrap());
        let mut g3 = BTreeMap::new();
        g3.insert(0, Subspace::full(3));
        g3.insert(1, Subspace::from_vectors(3, &[e(1), e(2)]).unwrap());
        let b3 = BifilteredSpace::new(3, f3, g3).unwrap();
        let dims: Vec<usize> = [(0, 0), (0, 1), (1, 0), (1, 1)]
            .iter()
            .map(|&(a, c)| zassenhaus(&b3, a, c).unwrap().dim_fg)
            .collect();
        assert_eq!(dims.iter().sum::<usize>(), 3);
        assert_eq!(dims, vec![0, 1, 1, 1]);
        for (a, c) in [(0i64, 0i64), (0, 1), (1, 0), (1, 1)] {
            let z = zassenhaus(&b3, a, c).unwrap();
            assert_eq!(z.dim_fg, z.dim_gf);
            if z.dim_fg > 0 {
                assert!(z.iso.is_iso());
            }
        }
    }
}
