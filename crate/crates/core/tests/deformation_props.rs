//! Equivariant deformations: equations, obstructions, extension and gauge
//! equivalence.

mod common;

use common::{meson2, meson2_swap, q, random_combination, small_rational, swap, Q};
use lts_core::cohomology::apply_coboundary;
use lts_core::group::action_on_cochain_ambient;
use lts_core::{
    apply_isomorphism, check_deformation_equations, infinitesimal, make_deformation, verify_lts, Caps, Cochain,
    DeformationContext, DeformationError, FormalIsomorphism, GroupAction, LieTripleSystem, LtsModule, Matrix,
    ModuleAction, Scalar, StructureTensor, TruncatedDeformation,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `μ_2(g_i, g_j, g_p) = δ_jp g_j − δ_ip g_i`.
fn example_term() -> StructureTensor<Q> {
    StructureTensor::from_fn(2, 2, |i, j, p, l| {
        let mut v = Q::zero();
        if j == p && l == j {
            v += &Q::one();
        }
        if i == p && l == i {
            v -= &Q::one();
        }
        v
    })
}

fn example() -> TruncatedDeformation<Q> {
    let g = meson2_swap();
    make_deformation(&g, vec![g.system().mu().clone(), StructureTensor::zeros(2, 2), example_term()]).unwrap()
}

fn context(g: &GroupAction<Q>) -> DeformationContext<Q> {
    DeformationContext::new(g, Caps::default()).unwrap()
}

fn random_equivariant_matrix(rng: &mut ChaCha8Rng) -> Matrix<Q> {
    // matrices commuting with the swap
    Matrix::identity(2).scale(&small_rational(rng)).add(&swap().scale(&small_rational(rng))).unwrap()
}

#[test]
fn example_is_an_equivariant_deformation() {
    let def = example();
    let report = check_deformation_equations(&def);
    assert!(report.passed());
    assert!(report.exact());
    assert!(check_deformation_equations(&def.padded(4)).passed());
    let (n, mu) = infinitesimal(&def).unwrap();
    assert_eq!(n, 2);
    assert_eq!(mu, Cochain::from_tensor(&example_term()));
    let module = LtsModule::self_module(def.system());
    assert!(apply_coboundary(&module, &mu).unwrap().is_zero());
    let ctx = context(def.action());
    let obs = ctx.obstruction(&def).unwrap();
    assert_eq!(obs.order, 3);
    assert!(obs.cochain.is_zero());
    let ext = ctx.extend(&def).unwrap().unwrap();
    assert_eq!(ext.order(), 3);
    assert!(ext.term(3).is_zero());
    assert!(check_deformation_equations(&ext).passed());
}

/// An exact deformation gives a triple system for every value of `t`.
#[test]
fn exact_example_specializes_to_triple_systems() {
    let mu = meson2().mu().clone();
    for t in [Q::new(1, 2), q(2), q(-3)] {
        let t2 = t.clone() * &t;
        let bracket = mu.add(&example_term().scale(&t2));
        assert!(verify_lts(&bracket).unwrap().passed(), "t = {t}");
    }
}

#[test]
fn terms_are_validated() {
    let g = meson2_swap();
    let mu = g.system().mu().clone();
    // not invariant under the swap: f(g1,g2,g1) = g1 only
    let mut bad = StructureTensor::zeros(2, 2);
    bad.set(0, 1, 0, 0, q(1));
    bad.set(1, 0, 0, 0, q(-1));
    assert!(matches!(
        make_deformation(&g, vec![mu.clone(), bad]),
        Err(DeformationError::NotEquivariant { order: 1, .. })
    ));
    // not skew in the first two slots
    let mut bad = StructureTensor::zeros(2, 2);
    bad.set(0, 0, 1, 0, q(1));
    assert!(matches!(
        make_deformation(&g, vec![mu.clone(), bad]),
        Err(DeformationError::NotCochain { order: 1, .. })
    ));
    assert!(matches!(make_deformation(&g, vec![]), Err(DeformationError::BaseMismatch)));
}

/// Random order-1 and order-2 deformations built from random invariant
/// cocycles, extended where possible.
fn random_deformations(count: usize, seed: u64) -> Vec<TruncatedDeformation<Q>> {
    let g = meson2_swap();
    let ctx = context(&g);
    let c3 = ctx.complex().basis(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let (_, mu1) = random_combination(&c3, &mut rng);
        assert!(ctx.complex().is_cocycle(&mu1).unwrap());
        let d1 = make_deformation(&g, vec![g.system().mu().clone(), mu1.to_tensor()]).unwrap();
        if let Some(d2) = ctx.extend(&d1).unwrap() {
            // shift the new term by a random invariant cocycle
            let (_, z) = random_combination(&c3, &mut rng);
            let mut terms = d2.terms().to_vec();
            terms[2] = terms[2].add(&z.to_tensor());
            out.push(make_deformation(&g, terms).unwrap());
        }
        out.push(d1);
    }
    out
}

#[test]
fn obstructions_are_invariant_cocycles_and_extension_matches_the_class() {
    let g = meson2_swap();
    let ctx = context(&g);
    let module = LtsModule::self_module(g.system());
    let mats = action_on_cochain_ambient(&g, &ModuleAction::self_module(&g), 5, 10_000_000).unwrap();
    let defs = random_deformations(24, 99);
    assert!(defs.len() >= 20);
    for def in &defs {
        assert!(check_deformation_equations(def).passed());
        let obs = ctx.obstruction(def).unwrap();
        for m in &mats {
            assert_eq!(&m.mul_vec(obs.cochain.values()).unwrap(), obs.cochain.values());
        }
        assert!(obs.invariant);
        assert!(apply_coboundary(&module, &obs.cochain).unwrap().is_zero());
        assert_eq!(obs.is_cocycle, Some(true));
        let preimage = ctx.complex().is_coboundary(&obs.cochain).unwrap();
        let ext = ctx.extend(def).unwrap();
        assert_eq!(ext.is_some(), preimage.is_some());
        if let Some(e) = ext {
            assert_eq!(e.order(), def.order() + 1);
            assert!(check_deformation_equations(&e).passed());
        }
    }
}

/// On the abelian plane a deformation by a bracket that fails the
/// fundamental identity cannot be extended: all coboundaries vanish.
#[test]
fn abelian_plane_has_a_nonzero_obstruction() {
    let t = LieTripleSystem::<Q>::abelian(2);
    let g = GroupAction::trivial(t.clone());
    let ctx = context(&g);
    let mut mu1 = StructureTensor::zeros(2, 2);
    mu1.set(0, 1, 0, 0, q(1));
    mu1.set(1, 0, 0, 0, q(-1));
    let def = make_deformation(&g, vec![t.mu().clone(), mu1]).unwrap();
    assert!(check_deformation_equations(&def).passed());
    let obs = ctx.obstruction(&def).unwrap();
    assert!(!obs.cochain.is_zero());
    assert_eq!(obs.is_cocycle, Some(true));
    assert!(obs.preimage.is_none());
    assert!(ctx.extend(&def).unwrap().is_none());
    assert!(ctx.complex().is_coboundary(&obs.cochain).unwrap().is_none());
}

fn random_isomorphism(g: &GroupAction<Q>, order: usize, rng: &mut ChaCha8Rng) -> FormalIsomorphism<Q> {
    let mut terms = vec![Matrix::identity(2)];
    for _ in 0..order {
        terms.push(random_equivariant_matrix(rng));
    }
    FormalIsomorphism::new(g, terms).unwrap()
}

#[test]
fn gauge_transforms_shift_by_coboundaries_and_are_recovered() {
    let g = meson2_swap();
    let ctx = context(&g);
    let module = LtsModule::self_module(g.system());
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let bases = [TruncatedDeformation::trivial(&g), example()];
    for i in 0..24 {
        let cap = 2 + i % 3;
        let def = bases[i % 2].padded(cap);
        let psi = random_isomorphism(&g, 1 + i % 3, &mut rng);
        let image = apply_isomorphism(&def, &psi, cap).unwrap();
        assert!(check_deformation_equations(&image).passed());
        // μ_1 − μ̃_1 = δ¹ψ_1
        let lhs = Cochain::from_tensor(&def.term(1)).sub(&Cochain::from_tensor(&image.term(1)));
        let rhs = apply_coboundary(&module, &Cochain::from_matrix(&psi.term(1))).unwrap();
        assert_eq!(lhs, rhs);
        let found = ctx.check_equivalence(&def, &image, cap).unwrap();
        let iso = found.isomorphism.expect("equivalent by construction");
        let again = apply_isomorphism(&def, &iso, cap).unwrap();
        for k in 0..=cap {
            assert_eq!(again.term(k), image.term(k));
        }
    }
}

#[test]
fn composition_of_isomorphisms_matches_sequential_application() {
    let g = meson2_swap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..10 {
        let cap = 3;
        let def = example().padded(cap);
        let a = random_isomorphism(&g, 2, &mut rng);
        let b = random_isomorphism(&g, 2, &mut rng);
        let seq = apply_isomorphism(&apply_isomorphism(&def, &a, cap).unwrap(), &b, cap).unwrap();
        let composed = apply_isomorphism(&def, &b.compose(&a, cap), cap).unwrap();
        for k in 0..=cap {
            assert_eq!(seq.term(k), composed.term(k));
        }
        let inverse = FormalIsomorphism::new(&g, a.inverse_terms(cap)).unwrap();
        let back = apply_isomorphism(&apply_isomorphism(&def, &a, cap).unwrap(), &inverse, cap).unwrap();
        for k in 0..=cap {
            assert_eq!(back.term(k), def.term(k));
        }
    }
}

#[test]
fn gauge_transforms_of_the_trivial_deformation_trivialize() {
    let g = meson2_swap();
    let ctx = context(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let cap = 4;
    for i in 0..20 {
        let psi = random_isomorphism(&g, 1 + i % 4, &mut rng);
        let def = apply_isomorphism(&TruncatedDeformation::trivial(&g), &psi, cap).unwrap();
        let result = ctx.trivialize(&def, cap).unwrap();
        assert!(result.trivial);
        assert!(result.deformation.is_trivial());
        assert_eq!(result.deformation.order(), cap);
        let replay = apply_isomorphism(&def, &result.isomorphism, cap).unwrap();
        assert!(replay.is_trivial());
    }
}

#[test]
fn example_is_gauge_trivial_and_the_system_is_rigid() {
    let g = meson2_swap();
    let ctx = context(&g);
    let result = ctx.check_equivalence(&TruncatedDeformation::trivial(&g).padded(2), &example(), 2).unwrap();
    let iso = result.isomorphism.unwrap();
    assert!(iso.term(1).is_zero());
    assert_eq!(iso.term(2), swap().scale(&Q::new(-1, 2)));
    let cert = ctx.rigidity_certificate().unwrap();
    assert!(cert.rigid);
    assert_eq!((cert.dim_c3, cert.dim_h3), (2, 0));
}

#[test]
fn non_equivariant_isomorphisms_are_rejected() {
    let g = meson2_swap();
    let mut p = Matrix::zeros(2, 2);
    p.set(0, 0, q(1));
    assert!(matches!(
        FormalIsomorphism::new(&g, vec![Matrix::identity(2), p]),
        Err(DeformationError::IsomorphismNotEquivariant { order: 1 })
    ));
}
