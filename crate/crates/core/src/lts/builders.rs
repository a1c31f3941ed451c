//! Constructors for the standard examples.
//!
//! Basis orderings are fixed:
//! - `meson(n)`: `g1, ..., gn`
//! - `matrix_lts(n)`, `rect_lts(p, q)`: matrix units `E_ij` in row-major order
//! - `skew_lts(n)`: `A_ij = e_ij - e_ji` for `i < j` in lexicographic order
//! - `sym_lts(n)`: `S_ij = e_ij + e_ji` for `i < j` and `S_ii = e_ii`, ordered
//!   lexicographically over `i <= j`
//! - `function_lts(T, s)`: copy-major, `(x, i) ↦ x * dim T + i`
//!
//! Every builder runs the axiom checker before returning.

use crate::kernel::{solve, Matrix};
use crate::lts::{LieTripleSystem, LtsError, StructureTensor};
use crate::scalar::Scalar;

fn require_positive(name: &str, v: usize) -> Result<(), LtsError> {
    if v == 0 {
        return Err(LtsError::InvalidParameter(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// The Meson triple system `T_n`: `[g_i g_j g_l] = δ_li g_j − δ_lj g_i`.
pub fn meson<F: Scalar>(n: usize) -> Result<LieTripleSystem<F>, LtsError> {
    require_positive("n", n)?;
    let mu = StructureTensor::from_fn(n, n, |i, j, l, out| {
        let mut v = F::zero();
        if l == i && out == j {
            v += &F::one();
        }
        if l == j && out == i {
            v -= &F::one();
        }
        v
    });
    LieTripleSystem::new((1..=n).map(|i| format!("g{i}")).collect(), mu)
}

fn unit<F: Scalar>(rows: usize, cols: usize, i: usize, j: usize) -> Matrix<F> {
    let mut m = Matrix::zeros(rows, cols);
    m.set(i, j, F::one());
    m
}

fn commutator<F: Scalar>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    a.mul(b).unwrap().sub(&b.mul(a).unwrap()).unwrap()
}

/// Structure constants of `bracket` restricted to the span of `basis`; fails
/// when some bracket of basis elements leaves the span.
fn from_matrix_basis<F: Scalar>(
    names: Vec<String>,
    basis: &[Matrix<F>],
    bracket: impl Fn(&Matrix<F>, &Matrix<F>, &Matrix<F>) -> Matrix<F>,
) -> Result<LieTripleSystem<F>, LtsError> {
    let n = basis.len();
    let flat_len = basis[0].entries().len();
    let columns: Vec<Vec<F>> = basis.iter().map(|b| b.entries().to_vec()).collect();
    let coords_of = Matrix::from_columns(flat_len, &columns).expect("basis matrices share a shape");
    let mut mu = StructureTensor::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let value = bracket(&basis[i], &basis[j], &basis[k]);
                let coords = solve(&coords_of, value.entries())
                    .expect("flattened shapes agree")
                    .ok_or_else(|| {
                        LtsError::NotClosed(format!("[{} {} {}] leaves the span", names[i], names[j], names[k]))
                    })?;
                for (l, c) in coords.into_iter().enumerate() {
                    mu.set(i, j, k, l, c);
                }
            }
        }
    }
    LieTripleSystem::new(names, mu)
}

fn double_commutator<F: Scalar>(a: &Matrix<F>, b: &Matrix<F>, c: &Matrix<F>) -> Matrix<F> {
    commutator(&commutator(a, b), c)
}

/// `M(n)`: all `n x n` matrices with `[ABC] = [[A,B],C]`.
pub fn matrix_lts<F: Scalar>(n: usize) -> Result<LieTripleSystem<F>, LtsError> {
    require_positive("n", n)?;
    let mut names = Vec::new();
    let mut basis = Vec::new();
    for i in 0..n {
        for j in 0..n {
            names.push(format!("E{}{}", i + 1, j + 1));
            basis.push(unit(n, n, i, j));
        }
    }
    from_matrix_basis(names, &basis, double_commutator)
}

/// `M_sk(n)`: skew-symmetric matrices with the double commutator.
pub fn skew_lts<F: Scalar>(n: usize) -> Result<LieTripleSystem<F>, LtsError> {
    require_positive("n", n)?;
    if n == 1 {
        return Ok(LieTripleSystem::new_unchecked(Vec::new(), StructureTensor::zeros(0, 0))?);
    }
    let mut names = Vec::new();
    let mut basis = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            names.push(format!("A{}{}", i + 1, j + 1));
            basis.push(unit::<F>(n, n, i, j).sub(&unit(n, n, j, i)).unwrap());
        }
    }
    from_matrix_basis(names, &basis, double_commutator)
}

/// `M_s(n)`: symmetric matrices with the double commutator. Closure of the
/// bracket is checked, not assumed.
pub fn sym_lts<F: Scalar>(n: usize) -> Result<LieTripleSystem<F>, LtsError> {
    require_positive("n", n)?;
    let mut names = Vec::new();
    let mut basis = Vec::new();
    for i in 0..n {
        for j in i..n {
            names.push(format!("S{}{}", i + 1, j + 1));
            if i == j {
                basis.push(unit(n, n, i, i));
            } else {
                basis.push(unit::<F>(n, n, i, j).add(&unit(n, n, j, i)).unwrap());
            }
        }
    }
    from_matrix_basis(names, &basis, double_commutator)
}

/// `M(p,q)`: `p x q` matrices with `[ABC] = (AB^t − BA^t)C + C(B^tA − A^tB)`.
pub fn rect_lts<F: Scalar>(p: usize, q: usize) -> Result<LieTripleSystem<F>, LtsError> {
    require_positive("p", p)?;
    require_positive("q", q)?;
    let mut names = Vec::new();
    let mut basis = Vec::new();
    for i in 0..p {
        for j in 0..q {
            names.push(format!("E{}{}", i + 1, j + 1));
            basis.push(unit(p, q, i, j));
        }
    }
    from_matrix_basis(names, &basis, |a, b, c| {
        let (at, bt) = (a.transpose(), b.transpose());
        let left = a.mul(&bt).unwrap().sub(&b.mul(&at).unwrap()).unwrap();
        let right = bt.mul(a).unwrap().sub(&at.mul(b).unwrap()).unwrap();
        left.mul(c).unwrap().add(&c.mul(&right).unwrap()).unwrap()
    })
}

/// Structure constants `[e_i, e_j] = sum_k c[(i*d + j)*d + k] e_k` of a Lie algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebraConstants<F> {
    pub names: Vec<String>,
    pub constants: Vec<F>,
}

impl<F: Scalar> LieAlgebraConstants<F> {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    fn get(&self, i: usize, j: usize, k: usize) -> &F {
        let d = self.dim();
        &self.constants[(i * d + j) * d + k]
    }

    fn bracket(&self, x: &[F], y: &[F]) -> Vec<F> {
        let d = self.dim();
        let mut out = vec![F::zero(); d];
        for i in 0..d {
            for j in 0..d {
                if x[i].is_zero() || y[j].is_zero() {
                    continue;
                }
                let c = x[i].clone() * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    o.add_mul(&c, self.get(i, j, k));
                }
            }
        }
        out
    }

    /// `sl_2` in the basis `h, e, f`: `[h,e] = 2e`, `[h,f] = −2f`, `[e,f] = h`.
    pub fn sl2() -> Self {
        let mut c = vec![F::zero(); 27];
        let mut set = |i: usize, j: usize, k: usize, v: i64| {
            c[(i * 3 + j) * 3 + k] = F::from_i64(v);
            c[(j * 3 + i) * 3 + k] = F::from_i64(-v);
        };
        set(0, 1, 1, 2);
        set(0, 2, 2, -2);
        set(1, 2, 0, 1);
        LieAlgebraConstants {
            names: vec!["h".into(), "e".into(), "f".into()],
            constants: c,
        }
    }

    /// Checks alternation and the Jacobi identity on basis elements.
    pub fn validate(&self) -> Result<(), LtsError> {
        let d = self.dim();
        if self.constants.len() != d * d * d {
            return Err(LtsError::ShapeMismatch(format!(
                "{} Lie algebra constants for dimension {d}",
                self.constants.len()
            )));
        }
        let e = |i: usize| {
            let mut v = vec![F::zero(); d];
            v[i] = F::one();
            v
        };
        for i in 0..d {
            for j in 0..d {
                let ij = self.bracket(&e(i), &e(j));
                let ji = self.bracket(&e(j), &e(i));
                let alternating = if i == j {
                    ij.iter().all(F::is_zero)
                } else {
                    ij.iter().zip(&ji).all(|(a, b)| (a.clone() + b).is_zero())
                };
                if !alternating {
                    return Err(LtsError::AxiomsFailed(format!("Lie bracket not alternating at ({i}, {j})")));
                }
            }
        }
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let a = self.bracket(&self.bracket(&e(i), &e(j)), &e(k));
                    let b = self.bracket(&self.bracket(&e(j), &e(k)), &e(i));
                    let c = self.bracket(&self.bracket(&e(k), &e(i)), &e(j));
                    if a.iter().zip(&b).zip(&c).any(|((x, y), z)| !(x.clone() + y + z).is_zero()) {
                        return Err(LtsError::AxiomsFailed(format!("Jacobi identity fails at ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A Lie algebra viewed as a Lie triple system via `[abc] = [[a,b],c]`.
pub fn from_lie_algebra<F: Scalar>(lie: &LieAlgebraConstants<F>) -> Result<LieTripleSystem<F>, LtsError> {
    lie.validate()?;
    let d = lie.dim();
    let e = |i: usize| {
        let mut v = vec![F::zero(); d];
        v[i] = F::one();
        v
    };
    let mut mu = StructureTensor::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let ij = lie.bracket(&e(i), &e(j));
            for k in 0..d {
                let v = lie.bracket(&ij, &e(k));
                for (l, c) in v.into_iter().enumerate() {
                    mu.set(i, j, k, l, c);
                }
            }
        }
    }
    LieTripleSystem::new(lie.names.clone(), mu)
}

/// `T^S` for a finite set `S` of size `s`: `s` copies of `T` with the
/// componentwise bracket.
pub fn function_lts<F: Scalar>(t: &LieTripleSystem<F>, s: usize) -> Result<LieTripleSystem<F>, LtsError> {
    require_positive("sSize", s)?;
    let d = t.dim();
    let n = d * s;
    let mut names = Vec::with_capacity(n);
    for x in 0..s {
        for name in t.basis_names() {
            names.push(format!("{name}@{}", x + 1));
        }
    }
    let mu = StructureTensor::from_fn(n, n, |i, j, k, l| {
        let x = i / d;
        if j / d != x || k / d != x || l / d != x {
            return F::zero();
        }
        t.mu().get(i % d, j % d, k % d, l % d).clone()
    });
    LieTripleSystem::new(names, mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::verify_lts;
    use crate::scalar::{Fp, Rational};

    type Q = Rational;

    #[test]
    fn meson_constants() {
        let t = meson::<Q>(2).unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.basis_names(), &["g1".to_string(), "g2".to_string()]);
        // [g1 g2 g1] = g2, [g1 g2 g2] = -g1
        assert_eq!(t.mu().basis_value(0, 1, 0), &[Q::zero(), Q::one()]);
        assert_eq!(t.mu().basis_value(0, 1, 1), &[Q::from_i64(-1), Q::zero()]);
        assert!(meson::<Q>(0).is_err());
    }

    #[test]
    fn skew_two_is_abelian_line() {
        let t = skew_lts::<Q>(2).unwrap();
        assert_eq!(t.dim(), 1);
        assert!(t.mu().is_zero());
    }

    #[test]
    fn skew_three_matches_matrix_arithmetic() {
        // [A12, A13] = -A23 and [-A23, A12] = A13.
        let t = skew_lts::<Q>(3).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.mu().basis_value(0, 1, 0), &[Q::zero(), Q::one(), Q::zero()]);
    }

    #[test]
    fn dimensions() {
        assert_eq!(matrix_lts::<Q>(2).unwrap().dim(), 4);
        assert_eq!(sym_lts::<Q>(2).unwrap().dim(), 3);
        assert_eq!(rect_lts::<Q>(2, 3).unwrap().dim(), 6);
        assert_eq!(function_lts(&meson::<Q>(2).unwrap(), 3).unwrap().dim(), 6);
    }

    #[test]
    fn sl2_roundtrip() {
        let t = from_lie_algebra(&LieAlgebraConstants::<Q>::sl2()).unwrap();
        assert!(verify_lts(t.mu()).unwrap().passed());
        // [h e f] = [[h,e],f] = 2[e,f] = 2h
        assert_eq!(t.mu().basis_value(0, 1, 2), &[Q::from_i64(2), Q::zero(), Q::zero()]);
    }

    #[test]
    fn invalid_lie_algebra_rejected() {
        let mut lie = LieAlgebraConstants::<Q>::sl2();
        lie.constants[(1 * 3 + 2) * 3] = Q::from_i64(5);
        assert!(from_lie_algebra(&lie).is_err());
        let mut lie = LieAlgebraConstants::<Q>::sl2();
        lie.constants[(0 * 3 + 1) * 3 + 1] = Q::from_i64(3);
        lie.constants[(1 * 3 + 0) * 3 + 1] = Q::from_i64(-3);
        assert!(matches!(from_lie_algebra(&lie), Err(LtsError::AxiomsFailed(_))));
    }

    #[test]
    fn builders_work_over_small_primes() {
        assert!(sym_lts::<Fp<2>>(2).is_ok());
        assert!(meson::<Fp<3>>(3).is_ok());
        assert!(rect_lts::<Fp<2>>(2, 2).is_ok());
    }
}
