//! Group actions: validation, the cochain representation and averaging.

mod common;

use common::{meson2, meson2_swap, skew3_sign, small_rational, swap, Q};
use lts_core::group::{action_on_cochain_ambient, invariant_subspace, reynolds_project, transpose_action_on_rect};
use lts_core::kernel::rank;
use lts_core::{Caps, GroupAction, GroupError, Matrix, ModuleAction, Scalar, YamagutiComplex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn standard_actions_validate() {
    assert_eq!(meson2_swap().order(), 2);
    assert_eq!(skew3_sign().order(), 2);
    assert_eq!(transpose_action_on_rect::<Q>(2).unwrap().order(), 2);
}

#[test]
fn invalid_actions_are_rejected() {
    let t = meson2();
    let not_closed = GroupAction::new(t.clone(), vec![("e".into(), Matrix::identity(2)), ("x".into(), Matrix::from_i64_rows(&[&[2, 0], &[0, 1]]))]);
    assert!(matches!(not_closed, Err(GroupError::NotClosed(..)) | Err(GroupError::NotEquivariant { .. })));
    let no_identity = GroupAction::new(t.clone(), vec![("s".into(), swap())]);
    assert!(no_identity.is_err());
    let too_big = GroupAction::with_cap(t, vec![("e".into(), Matrix::identity(2)), ("s".into(), swap())], 1);
    assert!(matches!(too_big, Err(GroupError::TooLarge { .. })));
}

/// `ρ(g)ρ(h) = ρ(gh)` on the ambient cochain spaces of degrees 1 and 3.
#[test]
fn cochain_action_is_a_representation() {
    for action in [meson2_swap(), skew3_sign()] {
        let module = ModuleAction::self_module(&action);
        for k in [1, 3] {
            let mats = action_on_cochain_ambient(&action, &module, k, 10_000_000).unwrap();
            for a in 0..action.order() {
                for b in 0..action.order() {
                    let ab = action.product(a, b);
                    assert_eq!(mats[a].mul(&mats[b]).unwrap(), mats[ab], "k={k} a={a} b={b}");
                }
            }
            assert_eq!(mats[action.identity_index()], Matrix::identity(mats[0].rows()));
        }
    }
}

#[test]
fn reynolds_projects_onto_the_invariant_subspace() {
    let action = meson2_swap();
    let module = ModuleAction::self_module(&action);
    let mats = action_on_cochain_ambient(&action, &module, 3, 10_000_000).unwrap();
    let fixed = invariant_subspace(&mats);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let c: Vec<Q> = (0..mats[0].cols()).map(|_| small_rational(&mut rng)).collect();
        let p = reynolds_project(&mats, &c).unwrap();
        assert_eq!(reynolds_project(&mats, &p).unwrap(), p, "idempotent");
        for g in &mats {
            assert_eq!(g.mul_vec(&p).unwrap(), p, "image is fixed");
        }
        let mut cols: Vec<Vec<Q>> = (0..fixed.cols()).map(|j| fixed.column(j)).collect();
        cols.push(p);
        let stacked = Matrix::from_columns(mats[0].cols(), &cols).unwrap();
        assert_eq!(rank(&stacked), fixed.cols(), "image inside the fixed space");
    }
}

/// The invariant cochains found by intersecting with the constraint
/// nullspace agree with averaging the constraint basis.
#[test]
fn invariant_cochains_match_averaged_cochains() {
    let action = meson2_swap();
    let module = ModuleAction::self_module(&action);
    let plain = YamagutiComplex::self_coefficients(action.system(), None, Caps::default()).unwrap();
    let inv = YamagutiComplex::self_coefficients(action.system(), Some(&action), Caps::default()).unwrap();
    for k in [1, 3, 5] {
        let mats = action_on_cochain_ambient(&action, &module, k, 10_000_000).unwrap();
        let basis = plain.basis(k).unwrap();
        let averaged: Vec<Vec<Q>> = (0..basis.dim())
            .map(|j| reynolds_project(&mats, basis.column_cochain(j).values()).unwrap())
            .collect();
        let stacked = Matrix::from_columns(basis.ambient_dim(), &averaged).unwrap();
        let ib = inv.basis(k).unwrap();
        assert_eq!(rank(&stacked), ib.dim(), "degree {k}");
        for v in &averaged {
            assert!(ib.coordinates(v).is_some());
        }
    }
}

#[test]
fn characteristic_dividing_the_order_is_reported() {
    use lts_core::Fp;
    let mats = vec![Matrix::<Fp<2>>::identity(2), Matrix::from_i64_rows(&[&[0, 1], &[1, 0]])];
    assert!(matches!(
        reynolds_project(&mats, &[Fp::<2>::one(), Fp::<2>::zero()]),
        Err(GroupError::CharacteristicDividesOrder(2, 2))
    ));
}
