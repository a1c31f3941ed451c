//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use lts_core::builders::{meson, skew_lts};
use lts_core::{Cochain, CochainSpaceBasis, GroupAction, LieTripleSystem, LtsModule, Matrix, Rational, Scalar};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Q = Rational;

pub fn q(n: i64) -> Q {
    Q::from_i64(n)
}

pub fn swap() -> Matrix<Q> {
    Matrix::from_i64_rows(&[&[0, 1], &[1, 0]])
}

pub fn meson2() -> LieTripleSystem<Q> {
    meson(2).unwrap()
}

/// `ℤ₂` swapping `g1` and `g2`.
pub fn meson2_swap() -> GroupAction<Q> {
    GroupAction::new(meson2(), vec![("e".into(), Matrix::identity(2)), ("s".into(), swap())]).unwrap()
}

/// `ℤ₂ = {Id, −Id}` on `skew_lts(3)`.
pub fn skew3_sign() -> GroupAction<Q> {
    let t = skew_lts::<Q>(3).unwrap();
    GroupAction::new(
        t,
        vec![("e".into(), Matrix::identity(3)), ("s".into(), Matrix::identity(3).scale(&q(-1)))],
    )
    .unwrap()
}

/// A small random rational `p/q` with `|p| ≤ 4`, `1 ≤ q ≤ 3`.
pub fn small_rational(rng: &mut ChaCha8Rng) -> Q {
    Q::new(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn random_combination(basis: &CochainSpaceBasis<Q>, rng: &mut ChaCha8Rng) -> (Vec<Q>, Cochain<Q>) {
    let coords: Vec<Q> = (0..basis.dim()).map(|_| small_rational(rng)).collect();
    let c = basis.combine_cochain(&coords);
    (coords, c)
}

pub fn unit(d: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); d];
    v[i] = Q::one();
    v
}

fn add_into(acc: &mut [Q], v: &[Q], c: &Q) {
    for (a, x) in acc.iter_mut().zip(v) {
        a.add_mul(c, x);
    }
}

/// `f(v_1, ..., v_k)` for arbitrary vectors, expanded by multilinearity over
/// basis tuples.
pub fn eval_cochain(f: &Cochain<Q>, args: &[Vec<Q>]) -> Vec<Q> {
    let d = f.dim_in();
    let mut out = vec![Q::zero(); f.dim_out()];
    let mut idx = vec![0usize; args.len()];
    loop {
        let mut c = Q::one();
        for (slot, &i) in idx.iter().enumerate() {
            c = c * &args[slot][i];
            if c.is_zero() {
                break;
            }
        }
        if !c.is_zero() {
            add_into(&mut out, f.value(&idx), &c);
        }
        let mut s = args.len();
        loop {
            if s == 0 {
                return out;
            }
            s -= 1;
            idx[s] += 1;
            if idx[s] < d {
                break;
            }
            idx[s] = 0;
        }
    }
}

fn sign(e: usize) -> Q {
    if e % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// The coboundary evaluated at one basis tuple, following the defining
/// formula with dense operators and vector arguments.
pub fn coboundary_at(module: &LtsModule<Q>, f: &Cochain<Q>, x: &[usize]) -> Vec<Q> {
    let t = module.base();
    let d = t.dim();
    let p = x.len();
    let n = (p - 1) / 2;
    let v: Vec<Vec<Q>> = x.iter().map(|&i| unit(d, i)).collect();
    let mut out = vec![Q::zero(); module.dim()];
    let apply = |op: Matrix<Q>, w: Vec<Q>| op.mul_vec(&w).unwrap();
    // θ(x_{2n}, x_{2n+1}) f(x_1..x_{2n−1})
    let w = eval_cochain(f, &v[..p - 2]);
    add_into(&mut out, &apply(module.theta(&v[p - 2], &v[p - 1]).unwrap(), w), &Q::one());
    // − θ(x_{2n−1}, x_{2n+1}) f(x_1..x_{2n−2}, x_{2n})
    let mut args: Vec<Vec<Q>> = v[..p - 3].to_vec();
    args.push(v[p - 2].clone());
    let w = eval_cochain(f, &args);
    add_into(&mut out, &apply(module.theta(&v[p - 3], &v[p - 1]).unwrap(), w), &-Q::one());
    for k in 1..=n {
        let (a, b) = (2 * k - 2, 2 * k - 1);
        let rest: Vec<Vec<Q>> = v.iter().enumerate().filter(|(i, _)| *i != a && *i != b).map(|(_, x)| x.clone()).collect();
        let w = eval_cochain(f, &rest);
        add_into(&mut out, &apply(module.d_operator(&v[a], &v[b]).unwrap(), w), &sign(k + n));
        for j in (2 * k)..p {
            let mut args = rest.clone();
            args[j - 2] = t.bracket(&v[a], &v[b], &v[j]).unwrap();
            add_into(&mut out, &eval_cochain(f, &args), &sign(n + k + 1));
        }
    }
    out
}

/// The whole coboundary through [`coboundary_at`].
pub fn coboundary_oracle(module: &LtsModule<Q>, f: &Cochain<Q>) -> Cochain<Q> {
    let d = module.base().dim();
    let m = module.dim();
    let p = f.degree() + 2;
    let mut values = Vec::with_capacity(d.pow(p as u32) * m);
    let mut x = vec![0usize; p];
    for t in 0..d.pow(p as u32) {
        let mut rest = t;
        for s in (0..p).rev() {
            x[s] = rest % d;
            rest /= d;
        }
        values.extend(coboundary_at(module, f, &x));
    }
    Cochain::from_values(p, d, m, values).unwrap()
}

/// Self-coefficient `δ¹ψ` as the failure of `ψ` to be a derivation:
/// `[ψx y z] + [x ψy z] + [x y ψz] − ψ[xyz]`.
pub fn derivation_defect(t: &LieTripleSystem<Q>, psi: &Matrix<Q>) -> Cochain<Q> {
    let d = t.dim();
    let mut values = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let (x, y, z) = (unit(d, a), unit(d, b), unit(d, c));
                let px = psi.mul_vec(&x).unwrap();
                let py = psi.mul_vec(&y).unwrap();
                let pz = psi.mul_vec(&z).unwrap();
                let mut out = t.bracket(&px, &y, &z).unwrap();
                add_into(&mut out, &t.bracket(&x, &py, &z).unwrap(), &Q::one());
                add_into(&mut out, &t.bracket(&x, &y, &pz).unwrap(), &Q::one());
                let inner = psi.mul_vec(&t.bracket(&x, &y, &z).unwrap()).unwrap();
                add_into(&mut out, &inner, &-Q::one());
                values.extend(out);
            }
        }
    }
    Cochain::from_values(3, d, d, values).unwrap()
}

/// Self-coefficient `δ³f` written out as its eight terms.
pub fn delta3_expanded(t: &LieTripleSystem<Q>, f: &Cochain<Q>) -> Cochain<Q> {
    let d = t.dim();
    let br = |x: &[Q], y: &[Q], z: &[Q]| t.bracket(x, y, z).unwrap();
    let ev = |a: &[Q], b: &[Q], c: &[Q]| eval_cochain(f, &[a.to_vec(), b.to_vec(), c.to_vec()]);
    let mut values = Vec::new();
    for idx in 0..d.pow(5) {
        let mut rest = idx;
        let mut x = vec![Vec::new(); 5];
        for s in (0..5).rev() {
            x[s] = unit(d, rest % d);
            rest /= d;
        }
        let (x1, x2, x3, x4, x5) = (&x[0], &x[1], &x[2], &x[3], &x[4]);
        let mut out = br(&ev(x1, x2, x3), x4, x5);
        add_into(&mut out, &br(&ev(x1, x2, x4), x3, x5), &-Q::one());
        add_into(&mut out, &br(x1, x2, &ev(x3, x4, x5)), &-Q::one());
        add_into(&mut out, &br(x3, x4, &ev(x1, x2, x5)), &Q::one());
        add_into(&mut out, &ev(&br(x1, x2, x3), x4, x5), &Q::one());
        add_into(&mut out, &ev(x3, &br(x1, x2, x4), x5), &Q::one());
        add_into(&mut out, &ev(x3, x4, &br(x1, x2, x5)), &Q::one());
        add_into(&mut out, &ev(x1, x2, &br(x3, x4, x5)), &-Q::one());
        values.extend(out);
    }
    Cochain::from_values(5, d, d, values).unwrap()
}
