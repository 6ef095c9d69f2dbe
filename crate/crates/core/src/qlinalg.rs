//! Exact rational linear algebra.
//!
//! All spaces are `ℚ^n`; subspaces are kept in canonical reduced
//! row-echelon form, so two [`Subspace`] values denote the same subspace
//! exactly when their stored bases are identical. Every operation in the
//! rest of the crate bottoms out here.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{shape_err, Error};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Convenience constructor for small rationals.
pub fn rat(num: i64, den: i64) -> Rat {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Convenience constructor for integers.
pub fn rint(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Formats a rational as `a` or `a/b` (lowest terms, positive denominator).
pub fn rat_to_string(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `a` or `a/b`.
pub fn rat_from_str(s: &str) -> Result<Rat, Error> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let numer: BigInt = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    let denom: BigInt = d
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
    if denom.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(numer, denom))
}

/// Dense matrix of exact rationals, row-major.
///
/// Serializes as a list of rows whose entries are integers or `"num/den"`
/// strings; that is also the matrix-literal format of the JSON input files.
#[derive(Clone, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

/// One JSON matrix entry: an integer or a `"num/den"` string.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonEntry {
    Int(i64),
    Str(String),
}

impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<JsonEntry>> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .map(|x| {
                        if x.denom().is_one() {
                            match i64::try_from(x.numer().clone()) {
                                Ok(v) => JsonEntry::Int(v),
                                Err(_) => JsonEntry::Str(rat_to_string(x)),
                            }
                        } else {
                            JsonEntry::Str(rat_to_string(x))
                        }
                    })
                    .collect()
            })
            .collect();
        #[derive(Serialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<Vec<JsonEntry>>,
        }
        Repr { rows: self.rows, cols: self.cols, entries: rows }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            entries: Vec<Vec<JsonEntry>>,
        }
        let r = Repr::deserialize(de)?;
        if r.entries.len() != r.rows || r.entries.iter().any(|row| row.len() != r.cols) {
            return Err(serde::de::Error::custom("matrix entry grid does not match rows/cols"));
        }
        let mut data = Vec::with_capacity(r.rows * r.cols);
        for row in r.entries {
            for e in row {
                let v = match e {
                    JsonEntry::Int(k) => rint(k),
                    JsonEntry::Str(s) => {
                        rat_from_str(&s).map_err(|e| serde::de::Error::custom(e.to_string()))?
                    }
                };
                data.push(v);
            }
        }
        Ok(RatMatrix { rows: r.rows, cols: r.cols, data })
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RatMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| rat_to_string(self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Result<Self, Error> {
        if data.len() != rows * cols {
            return Err(shape_err(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(RatMatrix { rows, cols, data })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self, Error> {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        if rows.iter().any(|v| v.len() != c) {
            return Err(shape_err("ragged rows"));
        }
        Ok(RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix from integer literals, row-major.
    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        let data = entries.iter().map(|&x| rint(x)).collect::<Vec<_>>();
        RatMatrix::new(rows, cols, data).expect("literal shape")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, Error> {
        if self.cols != other.rows {
            return Err(shape_err(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, cur + a * b);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &RatMatrix) -> Result<RatMatrix, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape_err("add shape mismatch"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(RatMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &RatMatrix) -> Result<RatMatrix, Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(shape_err("sub shape mismatch"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(RatMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn neg(&self) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    pub fn scale(&self, c: &Rat) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Rat]) -> Result<Vec<Rat>, Error> {
        if v.len() != self.cols {
            return Err(shape_err("apply length mismatch"));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..self.cols {
                    let a = self.get(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += a * &v[j];
                    }
                }
                acc
            })
            .collect())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &RatMatrix) -> Result<RatMatrix, Error> {
        if self.cols != other.cols && self.rows != 0 && other.rows != 0 {
            return Err(shape_err("vstack column mismatch"));
        }
        let cols = if self.rows == 0 { other.cols } else { self.cols };
        let mut data = Vec::with_capacity((self.rows + other.rows) * cols);
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        Ok(RatMatrix { rows: self.rows + other.rows, cols, data })
    }

    /// Places `other` to the right of `self`.
    pub fn hstack(&self, other: &RatMatrix) -> Result<RatMatrix, Error> {
        if self.rows != other.rows {
            return Err(shape_err("hstack row mismatch"));
        }
        let mut rows = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut r = self.row(i);
            r.extend(other.row(i));
            rows.push(r);
        }
        RatMatrix::from_rows(rows)
    }

    pub fn submatrix(&self, row_idx: &[usize], col_idx: &[usize]) -> RatMatrix {
        let mut out = RatMatrix::zero(row_idx.len(), col_idx.len());
        for (i, &ri) in row_idx.iter().enumerate() {
            for (j, &cj) in col_idx.iter().enumerate() {
                out.set(i, j, self.get(ri, cj).clone());
            }
        }
        out
    }

    /// Reduced row-echelon form together with the pivot columns.
    ///
    /// Forward elimination is fraction-free on integer-rescaled rows
    /// (one-step Bareiss), which keeps intermediate entries from blowing up;
    /// pivots are normalized to 1 and back-eliminated at the end.
    pub fn rref_with_pivots(&self) -> (RatMatrix, Vec<usize>) {
        // Rescale each row to a primitive integer vector. Row scaling
        // preserves the row space, hence the RREF.
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let lcm = row.iter().fold(BigInt::one(), |acc, x| {
                    if x.is_zero() {
                        acc
                    } else {
                        num_integer::lcm(acc, x.denom().clone())
                    }
                });
                let ints: Vec<BigInt> =
                    row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
                let gcd = ints.iter().fold(BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
                if gcd.is_zero() || gcd.is_one() {
                    ints
                } else {
                    ints.iter().map(|x| x / &gcd).collect()
                }
            })
            .collect();

        let rows = self.rows;
        let cols = self.cols;
        let mut pivots: Vec<usize> = Vec::new();
        let mut prev_pivot = BigInt::one();
        let mut rank = 0usize;
        for col in 0..cols {
            let Some(pr) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pr);
            let pivot = m[rank][col].clone();
            // One-step fraction-free elimination: row_i <- (pivot*row_i - a*row_rank)/prev.
            for r in rank + 1..rows {
                let a = m[r][col].clone();
                for c in 0..cols {
                    let v = &pivot * &m[r][c] - &a * &m[rank][c];
                    m[r][c] = &v / &prev_pivot;
                }
            }
            prev_pivot = pivot;
            pivots.push(col);
            rank += 1;
            if rank == rows {
                break;
            }
        }

        // Normalize to rational RREF: pivot rows scaled to pivot 1, then
        // back-substitute above each pivot.
        let mut out: Vec<Vec<Rat>> = m
            .into_iter()
            .map(|row| row.into_iter().map(BigRational::from_integer).collect())
            .collect();
        for (r, &pc) in pivots.iter().enumerate() {
            let inv = out[r][pc].clone();
            for c in 0..cols {
                let v = &out[r][c] / &inv;
                out[r][c] = v;
            }
        }
        for (r, &pc) in pivots.iter().enumerate().rev() {
            for above in 0..r {
                let factor = out[above][pc].clone();
                if factor.is_zero() {
                    continue;
                }
                for c in 0..cols {
                    let v = &out[above][c] - &factor * &out[r][c];
                    out[above][c] = v;
                }
            }
        }
        let flat: Vec<Rat> = out.into_iter().flatten().collect();
        (RatMatrix { rows, cols, data: flat }, pivots)
    }

    /// Reduced row-echelon form.
    pub fn rref(&self) -> RatMatrix {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Canonical solution of `self · x = v` (free variables set to zero),
    /// or `None` when the system is inconsistent.
    pub fn solve(&self, v: &[Rat]) -> Option<Vec<Rat>> {
        if v.len() != self.rows {
            return None;
        }
        let rhs = RatMatrix::from_rows(vec![v.to_vec()]).expect("one row").transpose();
        let aug = self.hstack(&rhs).expect("rows match");
        let (r, pivots) = aug.rref_with_pivots();
        if pivots.contains(&self.cols) {
            return None; // pivot in the augmented column: inconsistent
        }
        let mut x = vec![Rat::zero(); self.cols];
        for (row, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(row, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<RatMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let aug = self.hstack(&RatMatrix::identity(n)).expect("square");
        let (r, pivots) = aug.rref_with_pivots();
        if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        let idx: Vec<usize> = (n..2 * n).collect();
        let all_rows: Vec<usize> = (0..n).collect();
        Some(r.submatrix(&all_rows, &idx))
    }
}

/// A subspace of `ℚ^n` in canonical form: basis rows form a reduced
/// row-echelon matrix with no zero rows. Equality of subspaces is equality
/// of representations.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subspace {
    ambient: usize,
    basis: RatMatrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} of Q^{}) {:?}", self.dim(), self.ambient, self.basis)
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: RatMatrix::zero(0, ambient) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: RatMatrix::identity(ambient) }
    }

    /// Canonicalizes the row span of `rows`.
    pub fn from_span(rows: &RatMatrix) -> Self {
        let (r, pivots) = rows.rref_with_pivots();
        let keep: Vec<usize> = (0..pivots.len()).collect();
        let cols: Vec<usize> = (0..rows.cols()).collect();
        Subspace { ambient: rows.cols(), basis: r.submatrix(&keep, &cols) }
    }

    pub fn from_vectors(ambient: usize, vecs: &[Vec<Rat>]) -> Result<Self, Error> {
        if vecs.is_empty() {
            return Ok(Subspace::zero(ambient));
        }
        if vecs.iter().any(|v| v.len() != ambient) {
            return Err(shape_err("vector length mismatch"));
        }
        Ok(Subspace::from_span(&RatMatrix::from_rows(vecs.to_vec())?))
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Rat>> {
        (0..self.dim()).map(|i| self.basis.row(i)).collect()
    }

    /// Membership test by row reduction against the canonical basis.
    pub fn contains_vector(&self, v: &[Rat]) -> bool {
        if v.len() != self.ambient {
            return false;
        }
        if v.iter().all(|x| x.is_zero()) {
            return true;
        }
        let mut w = v.to_vec();
        // The basis is in RREF: eliminate pivot coordinates in order.
        for i in 0..self.dim() {
            let pc = (0..self.ambient)
                .find(|&j| self.basis.get(i, j).is_one())
                .expect("canonical basis row has a pivot");
            if !w[pc].is_zero() {
                let f = w[pc].clone();
                for j in 0..self.ambient {
                    let v = &w[j] - &f * self.basis.get(i, j);
                    w[j] = v;
                }
            }
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient
            && (0..other.dim()).all(|i| self.contains_vector(&other.basis.row(i)))
    }

    /// Sum of subspaces.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, Error> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch { left: self.ambient, right: other.ambient });
        }
        Ok(Subspace::from_span(&self.basis.vstack(&other.basis)?))
    }

    /// Intersection, via the kernel of `(a, b) ↦ aA − bB` on coefficient
    /// space.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace, Error> {
        if self.ambient != other.ambient {
            return Err(Error::AmbientMismatch { left: self.ambient, right: other.ambient });
        }
        let k = self.dim();
        let m = other.dim();
        if k == 0 || m == 0 {
            return Ok(Subspace::zero(self.ambient));
        }
        // Columns of the map are the coefficients; rows are ambient coords.
        let a_t = self.basis.transpose();
        let b_t = other.basis.transpose().neg();
        let big = a_t.hstack(&b_t)?;
        let ker = LinearMap::new(big).kernel();
        let mut vecs = Vec::new();
        for i in 0..ker.dim() {
            let coeffs = ker.basis.row(i);
            let v = self
                .basis
                .transpose()
                .apply(&coeffs[0..k])
                .expect("coefficient length");
            vecs.push(v);
        }
        Subspace::from_vectors(self.ambient, &vecs)
    }
}

/// Sum and intersection in one call; the modular dimension law
/// `dim a + dim b = dim(a+b) + dim(a∩b)` holds exactly.
pub fn lattice(a: &Subspace, b: &Subspace) -> Result<(Subspace, Subspace), Error> {
    Ok((a.sum(b)?, a.intersect(b)?))
}

/// A linear map `ℚ^source → ℚ^target` stored as a `target × source` matrix.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearMap {
    matrix: RatMatrix,
}

impl fmt::Debug for LinearMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearMap {}→{} {:?}", self.source_dim(), self.target_dim(), self.matrix)
    }
}

impl LinearMap {
    pub fn new(matrix: RatMatrix) -> Self {
        LinearMap { matrix }
    }

    pub fn zero(source: usize, target: usize) -> Self {
        LinearMap { matrix: RatMatrix::zero(target, source) }
    }

    pub fn identity(n: usize) -> Self {
        LinearMap { matrix: RatMatrix::identity(n) }
    }

    pub fn source_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &[Rat]) -> Result<Vec<Rat>, Error> {
        self.matrix.apply(v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap, Error> {
        Ok(LinearMap { matrix: self.matrix.mul(&other.matrix)? })
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `{v : f(v) = 0}` in canonical form.
    pub fn kernel(&self) -> Subspace {
        let n = self.source_dim();
        let (r, pivots) = self.matrix.rref_with_pivots();
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut vecs = Vec::with_capacity(free.len());
        for &fc in &free {
            let mut v = vec![Rat::zero(); n];
            v[fc] = Rat::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = -r.get(ri, fc).clone();
            }
            vecs.push(v);
        }
        Subspace::from_vectors(n, &vecs).expect("kernel vectors")
    }

    /// Column space in canonical form.
    pub fn image(&self) -> Subspace {
        Subspace::from_span(&self.matrix.transpose())
    }

    /// Image of a subspace of the source.
    pub fn image_of(&self, s: &Subspace) -> Result<Subspace, Error> {
        if s.ambient_dim() != self.source_dim() {
            return Err(Error::AmbientMismatch {
                left: s.ambient_dim(),
                right: self.source_dim(),
            });
        }
        let mapped = self.matrix.mul(&s.basis().transpose())?;
        Ok(Subspace::from_span(&mapped.transpose()))
    }

    /// `{v : f(v) ∈ u}`.
    pub fn preimage(&self, u: &Subspace) -> Result<Subspace, Error> {
        if u.ambient_dim() != self.target_dim() {
            return Err(Error::AmbientMismatch {
                left: u.ambient_dim(),
                right: self.target_dim(),
            });
        }
        // f(v) ∈ u  ⟺  π_u(f(v)) = 0 for the quotient projection by u.
        let q = Quotient::new(&Subspace::full(self.target_dim()), u)?;
        let comp = q.projection.compose(self)?;
        Ok(comp.kernel())
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().is_zero()
    }

    pub fn is_surjective(&self) -> bool {
        self.image().dim() == self.target_dim()
    }

    pub fn is_iso(&self) -> bool {
        self.source_dim() == self.target_dim() && self.is_injective()
    }
}

/// Canonical complement of `u` inside `v` (`u ⊆ v` required): the greedy
/// subset of `v`'s canonical basis that is independent modulo `u`.
pub fn complement_within(v: &Subspace, u: &Subspace) -> Result<Vec<Vec<Rat>>, Error> {
    if v.ambient_dim() != u.ambient_dim() {
        return Err(Error::AmbientMismatch { left: v.ambient_dim(), right: u.ambient_dim() });
    }
    if !v.contains(u) {
        return Err(Error::NotContained { context: "complement_within".into() });
    }
    let mut span = u.clone();
    let mut picked = Vec::new();
    for i in 0..v.dim() {
        let row = v.basis().row(i);
        if !span.contains_vector(&row) {
            span = span.sum(&Subspace::from_vectors(v.ambient_dim(), &[row.clone()])?)?;
            picked.push(row);
        }
    }
    Ok(picked)
}

/// Extends a basis of `v` greedily by standard basis vectors to a basis of
/// the ambient space; returns only the added vectors.
pub fn extend_to_full(v: &Subspace) -> Vec<Vec<Rat>> {
    let n = v.ambient_dim();
    let mut span = v.clone();
    let mut added = Vec::new();
    for j in 0..n {
        if span.dim() == n {
            break;
        }
        let mut e = vec![Rat::zero(); n];
        e[j] = Rat::one();
        if !span.contains_vector(&e) {
            span = span
                .sum(&Subspace::from_vectors(n, &[e.clone()]).expect("unit vector"))
                .expect("same ambient");
            added.push(e);
        }
    }
    added
}

/// Presentation of the quotient `v/u` of nested subspaces of one ambient
/// space.
///
/// `projection : ℚ^n → ℚ^dim` is total on the ambient space; restricted to
/// `v` its kernel is exactly `u`. `section : ℚ^dim → ℚ^n` picks canonical
/// representatives inside `v`, and `projection ∘ section = id`. The
/// construction is deterministic, so equal inputs yield bit-identical
/// presentations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quotient {
    pub dim: usize,
    pub projection: LinearMap,
    pub section: LinearMap,
}

impl Quotient {
    pub fn new(v: &Subspace, u: &Subspace) -> Result<Self, Error> {
        if v.ambient_dim() != u.ambient_dim() {
            return Err(Error::AmbientMismatch { left: v.ambient_dim(), right: u.ambient_dim() });
        }
        if !v.contains(u) {
            return Err(Error::NotContained { context: "quotient v/u requires u ⊆ v".into() });
        }
        let n = v.ambient_dim();
        let comp = complement_within(v, u)?;
        let k = comp.len();
        let ext = extend_to_full(v);

        // Basis of the ambient space: u-part, complement, extension.
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(n);
        cols.extend(u.basis_vectors());
        cols.extend(comp.iter().cloned());
        cols.extend(ext);
        let basis_mat = RatMatrix::from_rows(cols)?.transpose();
        let inv = basis_mat.inverse().expect("assembled basis is invertible");

        // projection = middle k rows of basis⁻¹.
        let rows: Vec<usize> = (u.dim()..u.dim() + k).collect();
        let all: Vec<usize> = (0..n).collect();
        let proj = inv.submatrix(&rows, &all);
        let sect = RatMatrix::from_rows(comp)?.transpose();
        Ok(Quotient {
            dim: k,
            projection: LinearMap::new(proj),
            section: LinearMap::new(if k == 0 {
                RatMatrix::zero(n, 0)
            } else {
                sect
            }),
        })
    }

    /// Image in the quotient of a subspace `s` of the ambient space
    /// (typically `u ⊆ s ⊆ v`, but any `s` can be pushed forward).
    pub fn push(&self, s: &Subspace) -> Result<Subspace, Error> {
        self.projection.image_of(s)
    }

    /// Preimage in the ambient space of a subspace of the quotient,
    /// intersected with nothing: full `projection⁻¹`.
    pub fn pull(&self, t: &Subspace) -> Result<Subspace, Error> {
        self.projection.preimage(t)
    }
}

/// Presentation of a subquotient `z/b` of an ambient `ℚ^n`, remembering the
/// pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subquotient {
    pub z: Subspace,
    pub b: Subspace,
    pub quo: Quotient,
}

impl Subquotient {
    pub fn new(z: &Subspace, b: &Subspace) -> Result<Self, Error> {
        Ok(Subquotient { z: z.clone(), b: b.clone(), quo: Quotient::new(z, b)? })
    }

    pub fn dim(&self) -> usize {
        self.quo.dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.z.ambient_dim()
    }

    /// Matrix of the map induced on subquotients by an ambient map `m`
    /// with `m(z) ⊆ z'` and `m(b) ⊆ b'` (checked).
    pub fn induced(&self, target: &Subquotient, m: &LinearMap) -> Result<RatMatrix, Error> {
        let mz = m.image_of(&self.z)?;
        if !target.z.contains(&mz) {
            return Err(Error::NotContained { context: "induced: m(z) ⊄ z'".into() });
        }
        let mb = m.image_of(&self.b)?;
        if !target.b.contains(&mb) {
            return Err(Error::NotContained { context: "induced: m(b) ⊄ b'".into() });
        }
        Ok(target
            .quo
            .projection
            .compose(m)?
            .compose(&self.quo.section)?
            .matrix()
            .clone())
    }

    /// Image in this subquotient of an ambient subspace.
    pub fn push(&self, s: &Subspace) -> Result<Subspace, Error> {
        let clipped = s.intersect(&self.z)?;
        self.quo.push(&clipped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, e: &[i64]) -> RatMatrix {
        RatMatrix::from_i64(rows, cols, e)
    }

    #[test]
    fn rref_fixed_points() {
        let z = RatMatrix::zero(2, 2);
        assert_eq!(z.rref(), z);
        let id = RatMatrix::identity(3);
        assert_eq!(id.rref(), id);
    }

    #[test]
    fn rref_dependent_rows() {
        // Hand row-reduction: second row is twice the first.
        let a = m(2, 3, &[1, 2, 3, 2, 4, 6]);
        let expect = m(2, 3, &[1, 2, 3, 0, 0, 0]);
        assert_eq!(a.rref(), expect);
    }

    #[test]
    fn rref_fractions() {
        let a = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat(1, 3)],
            vec![rat(1, 4), rat(1, 5)],
        ])
        .unwrap();
        let r = a.rref();
        assert_eq!(r, RatMatrix::identity(2));
    }

    #[test]
    fn kernel_zero_and_identity() {
        let f = LinearMap::zero(2, 2);
        assert_eq!(f.kernel(), Subspace::full(2));
        let g = LinearMap::identity(3);
        assert_eq!(g.kernel(), Subspace::zero(3));
    }

    #[test]
    fn kernel_rank_one() {
        // Solved by hand: kernel of [[1,2,3],[2,4,6]] is spanned by
        // (-2,1,0) and (-3,0,1).
        let f = LinearMap::new(m(2, 3, &[1, 2, 3, 2, 4, 6]));
        let k = f.kernel();
        assert_eq!(k.dim(), 2);
        assert!(k.contains_vector(&[rint(-2), rint(1), rint(0)]));
        assert!(k.contains_vector(&[rint(-3), rint(0), rint(1)]));
        // rank-nullity
        assert_eq!(k.dim() + f.image().dim(), f.source_dim());
    }

    #[test]
    fn image_examples() {
        assert!(LinearMap::zero(3, 2).image().is_zero());
        assert!(LinearMap::identity(4).image().is_full());
        let f = LinearMap::new(m(2, 2, &[1, 2, 2, 4]));
        let im = f.image();
        assert_eq!(im.dim(), 1);
        assert!(im.contains_vector(&[rint(1), rint(2)]));
    }

    #[test]
    fn lattice_examples() {
        let u = Subspace::from_vectors(3, &[vec![rint(1), rint(0), rint(0)], vec![
            rint(0),
            rint(1),
            rint(0),
        ]])
        .unwrap();
        let (s, i) = lattice(&u, &u).unwrap();
        assert_eq!(s, u);
        assert_eq!(i, u);

        let z = Subspace::zero(3);
        let (s0, i0) = lattice(&u, &z).unwrap();
        assert_eq!(s0, u);
        assert!(i0.is_zero());

        let b = Subspace::from_vectors(3, &[vec![rint(0), rint(1), rint(0)], vec![
            rint(0),
            rint(0),
            rint(1),
        ]])
        .unwrap();
        let (s1, i1) = lattice(&u, &b).unwrap();
        assert!(s1.is_full());
        assert_eq!(i1, Subspace::from_vectors(3, &[vec![rint(0), rint(1), rint(0)]]).unwrap());
        // modular dimension law
        assert_eq!(u.dim() + b.dim(), s1.dim() + i1.dim());
    }

    #[test]
    fn preimage_examples() {
        let f = LinearMap::new(m(2, 2, &[1, 0, 0, 0]));
        let u = Subspace::from_vectors(2, &[vec![rint(0), rint(1)]]).unwrap();
        let pre = f.preimage(&u).unwrap();
        assert_eq!(pre, u); // kernel of first coordinate
        assert_eq!(f.preimage(&Subspace::full(2)).unwrap(), Subspace::full(2));
        let g = LinearMap::identity(2);
        assert_eq!(g.preimage(&u).unwrap(), u);
        // preimage(f, image(f)) = full source
        assert_eq!(f.preimage(&f.image()).unwrap(), Subspace::full(2));
    }

    #[test]
    fn quotient_examples() {
        let v = Subspace::full(2);
        let q = Quotient::new(&v, &Subspace::zero(2)).unwrap();
        assert_eq!(q.dim, 2);
        assert!(q.projection.is_iso());

        let u = Subspace::from_vectors(3, &[vec![rint(1), rint(1), rint(0)]]).unwrap();
        let q = Quotient::new(&Subspace::full(3), &u).unwrap();
        assert_eq!(q.dim, 2);
        // projection kills (1,1,0)
        let img = q.projection.apply(&[rint(1), rint(1), rint(0)]).unwrap();
        assert!(img.iter().all(|x| x.is_zero()));
        // projection ∘ section = id
        let ps = q.projection.compose(&q.section).unwrap();
        assert_eq!(ps.matrix(), LinearMap::identity(2).matrix());

        let same = Quotient::new(&u, &u).unwrap();
        assert_eq!(same.dim, 0);
    }

    #[test]
    fn quotient_requires_nesting() {
        let u = Subspace::from_vectors(2, &[vec![rint(1), rint(0)]]).unwrap();
        let v = Subspace::from_vectors(2, &[vec![rint(0), rint(1)]]).unwrap();
        assert!(Quotient::new(&v, &u).is_err());
    }

    #[test]
    fn canonical_equality() {
        let a = Subspace::from_vectors(3, &[
            vec![rint(1), rint(2), rint(3)],
            vec![rint(0), rint(1), rint(1)],
        ])
        .unwrap();
        let b = Subspace::from_vectors(3, &[
            vec![rint(1), rint(3), rint(4)],
            vec![rint(2), rint(5), rint(7)],
        ])
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rat_parse_print() {
        assert_eq!(rat_to_string(&rat(4, 6)), "2/3");
        assert_eq!(rat_to_string(&rat(-4, 2)), "-2");
        assert_eq!(rat_from_str("2/3").unwrap(), rat(2, 3));
        assert_eq!(rat_from_str("-7").unwrap(), rint(-7));
        assert!(rat_from_str("1/0").is_err());
    }
}
