//! Property tests for the exact-arithmetic invariants.

use std::collections::BTreeMap;

use proptest::prelude::*;

use exss::gen;
use exss::homalg::{cone, ChainMap, CochainComplex};
use exss::qlinalg::{lattice, rint, LinearMap, RatMatrix, Subspace};
use exss::specseq::compute_ss;

fn small_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
    proptest::collection::vec(-4i64..=4, rows * cols)
        .prop_map(move |v| RatMatrix::from_i64(rows, cols, &v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// rank–nullity holds exactly
    #[test]
    fn rank_nullity(m in small_matrix(3, 4)) {
        let f = LinearMap::new(m);
        prop_assert_eq!(f.kernel().dim() + f.image().dim(), f.source_dim());
    }

    /// sum and intersection are commutative and satisfy the modular
    /// dimension law
    #[test]
    fn lattice_laws(a in small_matrix(2, 4), b in small_matrix(3, 4)) {
        let u = Subspace::from_span(&a);
        let v = Subspace::from_span(&b);
        let (s1, i1) = lattice(&u, &v).unwrap();
        let (s2, i2) = lattice(&v, &u).unwrap();
        prop_assert_eq!(&s1, &s2);
        prop_assert_eq!(&i1, &i2);
        prop_assert_eq!(u.dim() + v.dim(), s1.dim() + i1.dim());
    }

    /// two spans of the same subspace canonicalize identically
    #[test]
    fn canonical_form_is_representation_equality(m in small_matrix(3, 4), c in small_matrix(3, 3)) {
        let u = Subspace::from_span(&m);
        // rescale rows through an arbitrary square transform on the span
        let n = c.mul(&m).unwrap();
        let v = Subspace::from_span(&n);
        prop_assert!(u.contains(&v));
        if u.dim() == v.dim() {
            prop_assert_eq!(u, v);
        }
    }

    /// the preimage of the image is everything
    #[test]
    fn preimage_of_image_is_full(m in small_matrix(3, 3)) {
        let f = LinearMap::new(m);
        prop_assert_eq!(f.preimage(&f.image()).unwrap(), Subspace::full(3));
    }

    /// the cone of an isomorphism is acyclic
    #[test]
    fn cone_of_iso_is_acyclic(m in small_matrix(3, 3)) {
        prop_assume!(m.inverse().is_some());
        let c = CochainComplex::concentrated(0, 3);
        let mut comps = BTreeMap::new();
        comps.insert(0, m);
        let f = ChainMap::new(c.clone(), c, comps).unwrap();
        let t = cone(&f).unwrap();
        for n in -2..2 {
            prop_assert_eq!(t.cone.cohomology_dim(n), 0);
        }
    }

    /// shifts compose additively and preserve cohomology up to reindexing
    #[test]
    fn shift_composition(seed in 0u64..500, a in -2i64..=2, b in -2i64..=2) {
        let fc = gen::random_filtered_complex(seed).unwrap();
        let c = fc.total().clone();
        prop_assert_eq!(c.shift(a).shift(b), c.shift(a + b));
        for n in -4..4 {
            prop_assert_eq!(c.shift(a).cohomology_dim(n), c.cohomology_dim(n + a));
        }
    }

    /// limit dimensions match graded abutment dimensions on random
    /// filtered complexes, and reindexing round-trips bit for bit
    #[test]
    fn spectral_sequence_invariants(seed in 0u64..500, l in -2i64..=2) {
        let fc = gen::random_filtered_complex(seed).unwrap();
        let (ss, ab) = compute_ss(&fc).unwrap();
        prop_assert!(ss.euler_constant());
        for (&(p, q), s) in &ss.limit {
            prop_assert_eq!(ab.graded_dim(p + q, p), s.dim);
        }
        prop_assert_eq!(ss.renumber().renumber_inv(), ss.clone());
        prop_assert_eq!(ss.translate(l).translate(-l), ss);
    }

    /// membership is invariant under adding a multiple of a basis vector
    #[test]
    fn membership_stability(m in small_matrix(2, 4), k in -3i64..=3) {
        let u = Subspace::from_span(&m);
        if u.dim() >= 2 {
            let a = u.basis().row(0);
            let b = u.basis().row(1);
            let v: Vec<_> = a.iter().zip(&b).map(|(x, y)| x + y * rint(k)).collect();
            prop_assert!(u.contains_vector(&v));
        }
    }
}
