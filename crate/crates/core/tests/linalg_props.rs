use dgtor::linalg::echelon::{rref_with, DenseRow, SparseRow};
use dgtor::linalg::{kernel_basis, rank, solve, vector, Matrix, Rational, SubQuotient, Subspace};
use proptest::prelude::*;

fn matrix_strategy(max_r: usize, max_c: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
        proptest::collection::vec((-3i64..=3, 1i64..=3), r * c).prop_map(move |vals| {
            let trip = vals
                .iter()
                .enumerate()
                .filter(|(k, _)| k % 3 != 1)
                .map(|(k, (n, d))| (k / c, k % c, Rational::new(*n, *d)));
            Matrix::from_triplets(r, c, trip)
        })
    })
}

proptest! {
    #[test]
    fn dense_and_sparse_routes_agree(m in matrix_strategy(7, 7)) {
        let rows = m.to_rows();
        let a = rref_with::<DenseRow>(&rows, m.cols(), m.cols());
        let b = rref_with::<SparseRow>(&rows, m.cols(), m.cols());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn rank_nullity(m in matrix_strategy(6, 8)) {
        let k = kernel_basis(&m);
        prop_assert_eq!(rank(&m) + k.cols(), m.cols());
        prop_assert!(m.mul(&k).is_zero());
        prop_assert_eq!(rank(&k), k.cols());
        prop_assert_eq!(rank(&m), rank(&m.transpose()));
    }

    #[test]
    fn rank_ignores_column_order(m in matrix_strategy(5, 6), seed in any::<u64>()) {
        let mut idx: Vec<usize> = (0..m.cols()).collect();
        let n = idx.len();
        for i in 0..n {
            let j = (seed.wrapping_mul(2654435761).wrapping_add(i as u64) as usize) % n;
            idx.swap(i, j);
        }
        prop_assert_eq!(rank(&m), rank(&m.select_columns(&idx)));
        prop_assert_eq!(Subspace::image(&m), Subspace::image(&m.select_columns(&idx)));
    }

    #[test]
    fn solve_finds_members_of_image(m in matrix_strategy(5, 5), x in proptest::collection::vec(-4i64..=4, 5)) {
        let xs: Vec<Rational> = x.iter().take(m.cols()).map(|v| Rational::from_int(*v)).collect();
        let b = m.mul_vec(&vector::from_dense(&xs));
        let sol = solve(&m, &b).expect("b is in the image");
        prop_assert_eq!(m.mul_vec(&sol), b.clone());
        prop_assert_eq!(Subspace::image(&m).contains(&b), true);
    }

    #[test]
    fn subquotient_dimension(ab in matrix_strategy(5, 7), split in 0usize..7) {
        let split = split.min(ab.cols());
        let a = ab.block(0, ab.rows(), 0, split);
        let b = ab.block(0, ab.rows(), split, ab.cols());
        let num = Subspace::image(&Matrix::hstack(&[&a, &b]));
        let den = Subspace::image(&a);
        let sq = SubQuotient::new(num.clone(), &den);
        prop_assert_eq!(sq.dim(), num.dim() - den.dim());
        for t in 0..sq.dim() {
            prop_assert_eq!(sq.project(&sq.representative(t)), Some(vector::unit(t)));
        }
        for v in den.basis() {
            prop_assert!(sq.is_trivial_class(v));
        }
        let inter = num.intersection(&den);
        prop_assert_eq!(inter, den);
    }
}
