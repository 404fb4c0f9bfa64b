use combforge_core::linalg::{max_abs_diff, op_norm, CMat};
use combforge_core::schurweyl::{
    dim_q, dimension_count, schur_basis, verify_lowering, verify_raising,
};
use combforge_core::symrep::Permutation;
use combforge_core::young::{enumerate_partitions, YoungDiagram};
use combforge_core::Budget;
use num_bigint::BigUint;

fn yd(rows: &[usize]) -> YoungDiagram {
    YoungDiagram::new(rows.to_vec()).unwrap()
}

#[test]
fn stated_q_dimensions() {
    for d in 2..=7usize {
        assert_eq!(dim_q(&yd(&[2]), d), BigUint::from(d * (d + 1) / 2));
        assert_eq!(dim_q(&yd(&[1, 1]), d), BigUint::from(d * (d - 1) / 2));
        assert_eq!(dim_q(&yd(&[1]), d), BigUint::from(d));
    }
}

#[test]
fn dimensions_add_up() {
    for d in 1..=4usize {
        for n in 0..=6u32 {
            assert_eq!(dimension_count(d, n as usize), BigUint::from(d).pow(n));
        }
    }
}

#[test]
fn basis_is_unitary_and_equivariant() {
    for (d, n) in [(2, 3), (3, 3), (2, 4)] {
        let basis = schur_basis(d, n, Budget::default()).unwrap();
        let u = basis.unitary();
        let dim = u.nrows();
        assert_eq!(u.ncols(), dim);
        assert!(max_abs_diff(&(u.adjoint() * &u), &CMat::identity(dim, dim)) < 1e-10);
        for pi in Permutation::all(n) {
            assert!(basis.equivariance_residual(&pi).unwrap() < 1e-10, "{d} {n} {pi}");
        }
    }
}

#[test]
fn raising_and_lowering_hold_for_every_pair() {
    for (d, max_n) in [(2, 4), (3, 3)] {
        for n in 2..=max_n {
            let lower = schur_basis(d, n - 1, Budget::default()).unwrap();
            let upper = schur_basis(d, n, Budget::default()).unwrap();
            for b in &lower.blocks {
                for t in &b.tableaux {
                    for s in &b.tableaux {
                        let r = verify_raising(&lower, &upper, &b.shape, t, s).unwrap();
                        assert!(r <= 1e-8, "raise d={d} n={n} {}: {r}", b.shape);
                    }
                }
            }
            for b in &upper.blocks {
                for t in &b.tableaux {
                    for s in &b.tableaux {
                        let r = verify_lowering(&upper, &lower, &b.shape, t, s).unwrap();
                        assert!(r <= 1e-8, "lower d={d} n={n} {}: {r}", b.shape);
                    }
                }
            }
        }
    }
}

#[test]
fn block_projectors_resolve_identity() {
    let basis = schur_basis(2, 4, Budget::default()).unwrap();
    let mut total = CMat::zeros(16, 16);
    for b in &basis.blocks {
        let p = b.dim_p();
        total += basis.embed(&b.shape, &CMat::identity(p, p)).unwrap();
    }
    assert!(op_norm(&(total - CMat::identity(16, 16))) < 1e-10);
    assert_eq!(enumerate_partitions(4, Some(2)).len(), basis.blocks.len());
}
