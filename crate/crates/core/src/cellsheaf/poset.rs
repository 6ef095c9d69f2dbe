//! Finite face posets with signed incidences, and flags of closed subsets.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::Error;

/// A set of cells, by index.
pub type CellSet = BTreeSet<usize>;

/// A finite graded poset of cells with signed incidence numbers on cover
/// pairs. The order is generated by the covers; `σ ≤ τ` implies
/// `dim σ ≤ dim τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacePoset {
    names: Vec<String>,
    dims: Vec<usize>,
    /// `(face, cell)` with `dim cell = dim face + 1` → incidence number
    covers: BTreeMap<(usize, usize), i64>,
    /// full order relation, row σ: the up-set of σ
    leq: Vec<Vec<bool>>,
}

impl FacePoset {
    pub fn new(
        names: Vec<String>,
        dims: Vec<usize>,
        covers: BTreeMap<(usize, usize), i64>,
    ) -> Result<Self, Error> {
        let n = names.len();
        if dims.len() != n {
            return Err(Error::BadPoset("names/dims length mismatch".into()));
        }
        {
            let mut seen = BTreeSet::new();
            for nm in &names {
                if !seen.insert(nm.clone()) {
                    return Err(Error::BadPoset(format!("duplicate cell name `{nm}`")));
                }
            }
        }
        for (&(a, b), _) in &covers {
            if a >= n || b >= n {
                return Err(Error::BadPoset("cover index out of range".into()));
            }
            if dims[b] != dims[a] + 1 {
                return Err(Error::BadPoset(format!(
                    "cover {} < {} must raise dimension by one",
                    names[a], names[b]
                )));
            }
        }
        // transitive closure over increasing dimension
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        let maxdim = dims.iter().copied().max().unwrap_or(0);
        for _ in 0..=maxdim {
            for &(a, b) in covers.keys() {
                for s in 0..n {
                    if leq[s][a] && !leq[s][b] {
                        leq[s][b] = true;
                    }
                }
            }
        }
        let poset = FacePoset { names, dims, covers, leq };
        // ∂∂-condition
        for s in 0..n {
            for u in 0..n {
                if poset.dims[u] != poset.dims[s] + 2 || !poset.leq(s, u) {
                    continue;
                }
                let mut acc = 0i64;
                for t in 0..n {
                    if poset.dims[t] == poset.dims[s] + 1 {
                        acc += poset.incidence(s, t) * poset.incidence(t, u);
                    }
                }
                if acc != 0 {
                    return Err(Error::BadPoset(format!(
                        "incidence condition fails between {} and {}",
                        poset.names[s], poset.names[u]
                    )));
                }
            }
        }
        Ok(poset)
    }

    /// Rebuilds the order closure (used after deserialization).
    pub fn revalidate(self) -> Result<Self, Error> {
        FacePoset::new(self.names, self.dims, self.covers)
    }

    pub fn n_cells(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, c: usize) -> &str {
        &self.names[c]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn dim(&self, c: usize) -> usize {
        self.dims[c]
    }

    pub fn max_dim(&self) -> usize {
        self.dims.iter().copied().max().unwrap_or(0)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    pub fn incidence(&self, a: usize, b: usize) -> i64 {
        self.covers.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn covers(&self) -> &BTreeMap<(usize, usize), i64> {
        &self.covers
    }

    pub fn cells_of_dim(&self, k: usize) -> Vec<usize> {
        (0..self.n_cells()).filter(|&c| self.dims[c] == k).collect()
    }

    pub fn all_cells(&self) -> CellSet {
        (0..self.n_cells()).collect()
    }

    pub fn is_downward_closed(&self, z: &CellSet) -> bool {
        z.iter().all(|&c| (0..self.n_cells()).all(|s| !self.leq(s, c) || z.contains(&s)))
    }

    pub fn is_upward_closed(&self, u: &CellSet) -> bool {
        u.iter().all(|&c| (0..self.n_cells()).all(|t| !self.leq(c, t) || u.contains(&t)))
    }

    /// Closure (down-set) of a set of cells.
    pub fn closure(&self, cells: &CellSet) -> CellSet {
        (0..self.n_cells())
            .filter(|&s| cells.iter().any(|&c| self.leq(s, c)))
            .collect()
    }

    /// The complement of a downward-closed set is upward-closed.
    pub fn complement(&self, z: &CellSet) -> CellSet {
        (0..self.n_cells()).filter(|c| !z.contains(c)).collect()
    }

    /// The sub-poset on a downward-closed set, with inherited covers; the
    /// second component maps new indices to old.
    pub fn restrict(&self, z: &CellSet) -> Result<(FacePoset, Vec<usize>), Error> {
        if !self.is_downward_closed(z) {
            let witness = z
                .iter()
                .find(|&&c| (0..self.n_cells()).any(|s| self.leq(s, c) && !z.contains(&s)))
                .copied()
                .unwrap_or(0);
            return Err(Error::BadCellSet {
                expected: "downward-closed",
                cell: self.names[witness].clone(),
            });
        }
        let old: Vec<usize> = z.iter().copied().collect();
        let new_of_old: BTreeMap<usize, usize> =
            old.iter().enumerate().map(|(i, &o)| (o, i)).collect();
        let names = old.iter().map(|&o| self.names[o].clone()).collect();
        let dims = old.iter().map(|&o| self.dims[o]).collect();
        let covers = self
            .covers
            .iter()
            .filter(|&(&(a, b), _)| z.contains(&a) && z.contains(&b))
            .map(|(&(a, b), &inc)| ((new_of_old[&a], new_of_old[&b]), inc))
            .collect();
        Ok((FacePoset::new(names, dims, covers)?, old))
    }

    /// Connected components of a cell set under the comparability graph
    /// (two cells adjacent when one is a face of the other within the set).
    pub fn components_within(&self, set: &CellSet) -> Vec<CellSet> {
        let cells: Vec<usize> = set.iter().copied().collect();
        let mut seen: BTreeSet<usize> = BTreeSet::new();
        let mut out = Vec::new();
        for &start in &cells {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = CellSet::new();
            let mut stack = vec![start];
            while let Some(c) = stack.pop() {
                if !comp.insert(c) {
                    continue;
                }
                seen.insert(c);
                for &d in &cells {
                    if !comp.contains(&d) && (self.leq(c, d) || self.leq(d, c)) {
                        stack.push(d);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

/// A flag of closed subsets `∅ = Y_{−n−1} ⊆ … ⊆ Y_{−1} ⊆ Y_0 = Y`,
/// stored from the top down: `sets[i] = Y_{−i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Flag {
    sets: Vec<CellSet>,
}

impl Flag {
    pub fn new(poset: &FacePoset, sets: Vec<CellSet>) -> Result<Self, Error> {
        if sets.len() < 2 {
            return Err(Error::BadFlag("a flag needs at least Y_0 and the empty member".into()));
        }
        if sets[0] != poset.all_cells() {
            return Err(Error::BadFlag("Y_0 must be the whole poset".into()));
        }
        if !sets.last().expect("nonempty").is_empty() {
            return Err(Error::BadFlag("the deepest member must be empty".into()));
        }
        for (i, s) in sets.iter().enumerate() {
            if !poset.is_downward_closed(s) {
                return Err(Error::BadFlag(format!("member {i} is not closed")));
            }
            if i + 1 < sets.len() && !sets[i + 1].is_subset(s) {
                return Err(Error::BadFlag(format!("member {} is not nested in member {i}", i + 1)));
            }
        }
        Ok(Flag { sets })
    }

    /// Trivial flag `∅ ⊆ Y`.
    pub fn trivial(poset: &FacePoset) -> Self {
        Flag { sets: vec![poset.all_cells(), CellSet::new()] }
    }

    /// `n` with members indexed `Y_0, …, Y_{−n−1}`.
    pub fn n(&self) -> usize {
        self.sets.len() - 2
    }

    /// `Y_p` for `p ∈ [−n−1, 0]`, clamped outside.
    pub fn member(&self, p: i64) -> &CellSet {
        let idx = (-p).clamp(0, self.sets.len() as i64 - 1) as usize;
        &self.sets[idx]
    }

    pub fn members(&self) -> &[CellSet] {
        &self.sets
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// One vertex.
    pub fn point() -> FacePoset {
        FacePoset::new(vec!["v".into()], vec![0], BTreeMap::new()).unwrap()
    }

    /// Half-open interval: one vertex, one edge with a single end attached.
    pub fn half_open_interval() -> FacePoset {
        let mut covers = BTreeMap::new();
        covers.insert((0, 1), 1);
        FacePoset::new(vec!["v".into(), "e".into()], vec![0, 1], covers).unwrap()
    }

    /// Closed interval: two vertices, one edge.
    pub fn interval() -> FacePoset {
        let mut covers = BTreeMap::new();
        covers.insert((0, 2), -1);
        covers.insert((1, 2), 1);
        FacePoset::new(vec!["v0".into(), "v1".into(), "e".into()], vec![0, 0, 1], covers).unwrap()
    }

    /// Circle: two vertices, two edges.
    pub fn circle() -> FacePoset {
        let mut covers = BTreeMap::new();
        covers.insert((0, 2), -1);
        covers.insert((1, 2), 1);
        covers.insert((0, 3), -1);
        covers.insert((1, 3), 1);
        FacePoset::new(
            vec!["a".into(), "b".into(), "x".into(), "y".into()],
            vec![0, 0, 1, 1],
            covers,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn order_and_closure() {
        let c = circle();
        assert!(c.leq(0, 2));
        assert!(!c.leq(2, 0));
        assert!(c.is_downward_closed(&[0usize, 1].into_iter().collect()));
        assert!(!c.is_downward_closed(&[2usize].into_iter().collect()));
        assert!(c.is_upward_closed(&[2usize, 3].into_iter().collect()));
        let cl = c.closure(&[2usize].into_iter().collect());
        assert_eq!(cl, [0usize, 1, 2].into_iter().collect());
    }

    #[test]
    fn bad_incidence_rejected() {
        // a 2-cell glued to a single edge-path with inconsistent signs
        let mut covers = BTreeMap::new();
        covers.insert((0, 1), 1);
        covers.insert((1, 2), 1);
        covers.insert((0, 3), 0);
        // σ = 0 (vertex), υ = 2 (face): single chain 0 < 1 < 2 with product 1 ≠ 0
        let r = FacePoset::new(
            vec!["v".into(), "e".into(), "f".into(), "e2".into()],
            vec![0, 1, 2, 1],
            covers,
        );
        assert!(r.is_err());
    }

    #[test]
    fn restriction_to_closed() {
        let c = circle();
        let z: CellSet = [0usize, 1].into_iter().collect();
        let (sub, old) = c.restrict(&z).unwrap();
        assert_eq!(sub.n_cells(), 2);
        assert_eq!(old, vec![0, 1]);
        assert!(c.restrict(&[2usize].into_iter().collect()).is_err());
    }

    #[test]
    fn flags_validate() {
        let c = circle();
        let all = c.all_cells();
        let z: CellSet = [0usize].into_iter().collect();
        let f = Flag::new(&c, vec![all.clone(), z.clone(), CellSet::new()]).unwrap();
        assert_eq!(f.n(), 1);
        assert_eq!(f.member(0), &all);
        assert_eq!(f.member(-1), &z);
        assert!(f.member(-2).is_empty());
        assert!(f.member(-7).is_empty());
        // non-closed member rejected
        let bad: CellSet = [2usize].into_iter().collect();
        assert!(Flag::new(&c, vec![all, bad, CellSet::new()]).is_err());
    }

    #[test]
    fn components() {
        let c = interval();
        let comps = c.components_within(&[0usize, 1].into_iter().collect());
        assert_eq!(comps.len(), 2);
        let comps2 = c.components_within(&c.all_cells());
        assert_eq!(comps2.len(), 1);
        let _ = (point(), half_open_interval());
    }
}
