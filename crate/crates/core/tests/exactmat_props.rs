use cartan_core::{kernel, rat, rref, Mat, Subspace};
use proptest::prelude::*;

fn small_mat(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Mat> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
        prop::collection::vec(-3i64..=3, r * c).prop_map(move |v| Mat::from_i64(r, c, &v))
    })
}

fn subspace_pair(dim: usize) -> impl Strategy<Value = (Subspace, Subspace)> {
    let vecs = || prop::collection::vec(prop::collection::vec(-2i64..=2, dim), 0..=dim);
    (vecs(), vecs()).prop_map(move |(a, b)| {
        let conv = |vs: Vec<Vec<i64>>| {
            Subspace::span(dim, vs.into_iter().map(|v| v.into_iter().map(rat).collect::<Vec<_>>()).collect::<Vec<_>>())
                .unwrap()
        };
        (conv(a), conv(b))
    })
}

proptest! {
    #[test]
    fn rref_is_idempotent(m in small_mat(5, 5)) {
        let (r, p) = rref(&m);
        let (r2, p2) = rref(&r);
        prop_assert_eq!(&r, &r2);
        prop_assert_eq!(p, p2);
    }

    #[test]
    fn rank_nullity(m in small_mat(5, 6)) {
        prop_assert_eq!(m.rank() + kernel(&m).dim(), m.cols());
        for v in kernel(&m).basis_vectors() {
            prop_assert!(m.mul_vec(&v).iter().all(|x| *x == rat(0)));
        }
    }

    #[test]
    fn sum_intersection_dimension((a, b) in subspace_pair(5)) {
        let s = a.sum(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
        prop_assert!(i.is_subset(&a).unwrap() && i.is_subset(&b).unwrap());
        prop_assert!(a.is_subset(&s).unwrap() && b.is_subset(&s).unwrap());
    }

    #[test]
    fn canonical_form_ignores_spanning_set((a, b) in subspace_pair(4)) {
        // the same space spanned twice in different ways compares equal
        let s = a.sum(&b).unwrap();
        let mut vecs = b.basis_vectors();
        vecs.extend(a.basis_vectors());
        vecs.reverse();
        prop_assert_eq!(Subspace::span(4, vecs).unwrap(), s);
    }

    #[test]
    fn annihilator_is_orthogonal_complement((a, _b) in subspace_pair(5)) {
        let ann = a.annihilator();
        prop_assert_eq!(ann.rows() + a.dim(), 5);
        for v in a.basis_vectors() {
            prop_assert!(ann.mul_vec(&v).iter().all(|x| *x == rat(0)));
        }
    }

    #[test]
    fn inverse_roundtrip(m in small_mat(4, 4)) {
        if m.rows() == m.cols() {
            match m.inverse() {
                Some(inv) => prop_assert_eq!(&m * &inv, Mat::identity(m.rows())),
                None => prop_assert!(m.rank() < m.rows()),
            }
        }
    }
}
