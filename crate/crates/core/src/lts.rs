//! Lie triple systems and their modules, given by structure constants.
//!
//! A ternary bracket on a `d`-dimensional space is stored as a
//! [`StructureTensor`] with `[e_i e_j e_k] = sum_l c[i][j][k][l] v_l`. All
//! axioms are checked on basis tuples only; trilinearity extends them to the
//! whole space.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::kernel::Matrix;
use crate::scalar::Scalar;

pub mod builders;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LtsError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("axioms violated: {0}")]
    AxiomsFailed(String),
    #[error("bracket does not close on the subspace: {0}")]
    NotClosed(String),
}

/// Coefficients of a trilinear map `T x T x T -> W`, `dim T = d`, `dim W = m`.
///
/// Entries are flattened row-major over `(i, j, k, l)`, which is also the
/// layout of a degree-3 cochain.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StructureTensor<F> {
    dim_in: usize,
    dim_out: usize,
    entries: Vec<F>,
}

impl<F: Scalar> StructureTensor<F> {
    pub fn zeros(dim_in: usize, dim_out: usize) -> Self {
        StructureTensor {
            dim_in,
            dim_out,
            entries: vec![F::zero(); dim_in.pow(3) * dim_out],
        }
    }

    pub fn from_entries(dim_in: usize, dim_out: usize, entries: Vec<F>) -> Result<Self, LtsError> {
        if entries.len() != dim_in.pow(3) * dim_out {
            return Err(LtsError::ShapeMismatch(format!(
                "{} entries for a {dim_in}x{dim_in}x{dim_in}x{dim_out} tensor",
                entries.len()
            )));
        }
        Ok(StructureTensor {
            dim_in,
            dim_out,
            entries,
        })
    }

    pub fn from_fn(dim_in: usize, dim_out: usize, mut f: impl FnMut(usize, usize, usize, usize) -> F) -> Self {
        let mut t = Self::zeros(dim_in, dim_out);
        for i in 0..dim_in {
            for j in 0..dim_in {
                for k in 0..dim_in {
                    for l in 0..dim_out {
                        let idx = t.index(i, j, k, l);
                        t.entries[idx] = f(i, j, k, l);
                    }
                }
            }
        }
        t
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    #[inline]
    fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim_in + j) * self.dim_in + k) * self.dim_out + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> &F {
        &self.entries[self.index(i, j, k, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, v: F) {
        let idx = self.index(i, j, k, l);
        self.entries[idx] = v;
    }

    /// Value on a basis triple, as a coordinate vector of length `dim_out`.
    pub fn basis_value(&self, i: usize, j: usize, k: usize) -> &[F] {
        let start = self.index(i, j, k, 0);
        &self.entries[start..start + self.dim_out]
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<F> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(F::is_zero)
    }

    /// Trilinear evaluation on arbitrary vectors.
    pub fn eval(&self, x: &[F], y: &[F], z: &[F]) -> Result<Vec<F>, LtsError> {
        let d = self.dim_in;
        if x.len() != d || y.len() != d || z.len() != d {
            return Err(LtsError::DimensionMismatch(format!(
                "arguments of lengths {}, {}, {} for a tensor on dimension {d}",
                x.len(),
                y.len(),
                z.len()
            )));
        }
        let mut out = vec![F::zero(); self.dim_out];
        for (i, xi) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (j, yj) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let xy = xi.clone() * yj;
                for (k, zk) in z.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                    let c = xy.clone() * zk;
                    for (o, v) in out.iter_mut().zip(self.basis_value(i, j, k)) {
                        o.add_mul(&c, v);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.dim_in, self.dim_out), (rhs.dim_in, rhs.dim_out));
        StructureTensor {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.clone() + b).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.dim_in, self.dim_out), (rhs.dim_in, rhs.dim_out));
        StructureTensor {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.clone() - b).collect(),
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        StructureTensor {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            entries: self.entries.iter().map(|a| a.clone() * c).collect(),
        }
    }

    /// `outer ∘ f ∘ (a ⊗ b ⊗ c)`: the map `(x, y, z) ↦ outer f(a x, b y, c z)`.
    ///
    /// `outer` may be `None` for the identity.
    pub fn compose(&self, outer: Option<&Matrix<F>>, a: &Matrix<F>, b: &Matrix<F>, c: &Matrix<F>) -> Self {
        let d = self.dim_in;
        let m = self.dim_out;
        let cols = |mat: &Matrix<F>, j: usize| -> Vec<F> { mat.column(j) };
        let mut out = Self::zeros(d, outer.map_or(m, |o| o.rows()));
        for i in 0..d {
            let ai = cols(a, i);
            for j in 0..d {
                let bj = cols(b, j);
                for k in 0..d {
                    let ck = cols(c, k);
                    let v = self.eval(&ai, &bj, &ck).expect("square transforms");
                    let v = match outer {
                        Some(o) => o.mul_vec(&v).expect("outer map matches output dimension"),
                        None => v,
                    };
                    let start = out.index(i, j, k, 0);
                    out.entries[start..start + v.len()].clone_from_slice(&v);
                }
            }
        }
        out
    }

    /// Nonzero coefficients of each basis value, indexed by `(i * d + j) * d + k`.
    pub(crate) fn sparse_values(&self) -> Vec<Vec<(usize, F)>> {
        let d = self.dim_in;
        let mut out = Vec::with_capacity(d * d * d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    out.push(
                        self.basis_value(i, j, k)
                            .iter()
                            .enumerate()
                            .filter(|(_, v)| !v.is_zero())
                            .map(|(l, v)| (l, v.clone()))
                            .collect(),
                    );
                }
            }
        }
        out
    }
}

impl<F: Scalar> fmt::Debug for StructureTensor<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StructureTensor({}->{}) {{", self.dim_in, self.dim_out)?;
        let d = self.dim_in;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let v = self.basis_value(i, j, k);
                    if v.iter().any(|x| !x.is_zero()) {
                        let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                        write!(f, " [{i}{j}{k}]=({})", s.join(","))?;
                    }
                }
            }
        }
        write!(f, " }}")
    }
}

/// Identifiers of the checked identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Axiom {
    /// `[abc] + [bac] = 0`
    #[serde(rename = "LT1")]
    Skew,
    /// `[aab] = 0` on basis diagonals
    #[serde(rename = "LT1-diag")]
    SquareZero,
    /// `[abc] + [bca] + [cab] = 0`
    #[serde(rename = "LT2")]
    Cyclic,
    /// `[ab[cde]] = [[abc]de] + [c[abd]e] + [cd[abe]]`
    #[serde(rename = "LT3")]
    Fundamental,
    #[serde(rename = "LTM1")]
    ModuleSkew,
    #[serde(rename = "LTM2")]
    ModuleCyclic,
    #[serde(rename = "LTM3")]
    ModuleFundamental,
    /// `θ(c,d)θ(a,b) − θ(b,d)θ(a,c) − θ(a,[bcd]) + D(b,c)θ(a,d) = 0`
    #[serde(rename = "LTR1")]
    ThetaFirst,
    /// `θ(c,d)D(a,b) − D(a,b)θ(c,d) + θ([abc],d) + θ(c,[abd]) = 0`
    #[serde(rename = "LTR2")]
    ThetaSecond,
}

impl Axiom {
    pub fn label(self) -> &'static str {
        match self {
            Axiom::Skew => "LT1",
            Axiom::SquareZero => "LT1-diag",
            Axiom::Cyclic => "LT2",
            Axiom::Fundamental => "LT3",
            Axiom::ModuleSkew => "LTM1",
            Axiom::ModuleCyclic => "LTM2",
            Axiom::ModuleFundamental => "LTM3",
            Axiom::ThetaFirst => "LTR1",
            Axiom::ThetaSecond => "LTR2",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation<F> {
    pub axiom: Axiom,
    /// Basis indices of the failing tuple, in argument order.
    pub witness: Vec<usize>,
    pub residual: Vec<F>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Verbosity {
    /// Only the lexicographically first violation of each axiom.
    #[default]
    FirstPerAxiom,
    All,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport<F> {
    pub violations: Vec<Violation<F>>,
}

impl<F: Scalar> AxiomReport<F> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn failed_axioms(&self) -> Vec<Axiom> {
        let mut v: Vec<Axiom> = self.violations.iter().map(|x| x.axiom).collect();
        v.dedup();
        v
    }

    pub fn summary(&self) -> String {
        if self.passed() {
            return "all axioms hold".to_string();
        }
        self.violations
            .iter()
            .map(|v| format!("{} fails at {:?}", v.axiom, v.witness))
            .collect::<Vec<_>>()
            .join("; ")
    }

    fn merge(&mut self, other: AxiomReport<F>) {
        self.violations.extend(other.violations);
    }
}

struct Collector<F> {
    verbosity: Verbosity,
    violations: Vec<Violation<F>>,
    seen: Vec<Axiom>,
}

impl<F: Scalar> Collector<F> {
    fn new(verbosity: Verbosity) -> Self {
        Collector {
            verbosity,
            violations: Vec::new(),
            seen: Vec::new(),
        }
    }

    fn wants(&self, axiom: Axiom) -> bool {
        self.verbosity == Verbosity::All || !self.seen.contains(&axiom)
    }

    fn check(&mut self, axiom: Axiom, witness: &[usize], residual: Vec<F>) {
        if residual.iter().all(F::is_zero) || !self.wants(axiom) {
            return;
        }
        self.seen.push(axiom);
        self.violations.push(Violation {
            axiom,
            witness: witness.to_vec(),
            residual,
        });
    }

    fn finish(self) -> AxiomReport<F> {
        AxiomReport {
            violations: self.violations,
        }
    }
}

fn accumulate<F: Scalar>(acc: &mut [F], coeff: &F, v: &[(usize, F)]) {
    for (l, x) in v {
        acc[*l].add_mul(coeff, x);
    }
}

/// Checks the triple-system identities for a square tensor on tuples accepted
/// by `admissible`, labelling failures with the given axiom ids.
fn check_triple_identities<F: Scalar>(
    mu: &StructureTensor<F>,
    admissible: impl Fn(&[usize]) -> bool,
    ids: (Axiom, Option<Axiom>, Axiom, Axiom),
    out: &mut Collector<F>,
) {
    let n = mu.dim_in;
    let (skew, square, cyclic, fundamental) = ids;
    let sparse = mu.sparse_values();
    let at = |i: usize, j: usize, k: usize| &sparse[(i * n + j) * n + k];
    let dense = |v: &[(usize, F)]| {
        let mut r = vec![F::zero(); n];
        for (l, x) in v {
            r[*l] = x.clone();
        }
        r
    };

    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if !admissible(&[a, b, c]) {
                    continue;
                }
                let mut r = dense(at(a, b, c));
                accumulate(&mut r, &F::one(), at(b, a, c));
                out.check(skew, &[a, b, c], r);
            }
        }
    }
    if let Some(square) = square {
        for a in 0..n {
            for b in 0..n {
                if admissible(&[a, a, b]) {
                    out.check(square, &[a, b], dense(at(a, a, b)));
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if !admissible(&[a, b, c]) {
                    continue;
                }
                let mut r = dense(at(a, b, c));
                accumulate(&mut r, &F::one(), at(b, c, a));
                accumulate(&mut r, &F::one(), at(c, a, b));
                out.check(cyclic, &[a, b, c], r);
            }
        }
    }
    let minus = -F::one();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    for e in 0..n {
                        let t = [a, b, c, d, e];
                        if !admissible(&t) {
                            continue;
                        }
                        let mut r = vec![F::zero(); n];
                        for (l, x) in at(c, d, e) {
                            accumulate(&mut r, x, at(a, b, *l));
                        }
                        for (l, x) in at(a, b, c) {
                            let neg = x.clone() * &minus;
                            accumulate(&mut r, &neg, at(*l, d, e));
                        }
                        for (l, x) in at(a, b, d) {
                            let neg = x.clone() * &minus;
                            accumulate(&mut r, &neg, at(c, *l, e));
                        }
                        for (l, x) in at(a, b, e) {
                            let neg = x.clone() * &minus;
                            accumulate(&mut r, &neg, at(c, d, *l));
                        }
                        out.check(fundamental, &t, r);
                    }
                }
            }
        }
    }
}

/// Checks the three Lie triple system axioms on all basis tuples.
pub fn verify_lts<F: Scalar>(mu: &StructureTensor<F>) -> Result<AxiomReport<F>, LtsError> {
    verify_lts_with(mu, Verbosity::FirstPerAxiom)
}

pub fn verify_lts_with<F: Scalar>(mu: &StructureTensor<F>, verbosity: Verbosity) -> Result<AxiomReport<F>, LtsError> {
    if !mu.is_square() {
        return Err(LtsError::ShapeMismatch(format!(
            "bracket maps dimension {} to {}",
            mu.dim_in, mu.dim_out
        )));
    }
    let mut c = Collector::new(verbosity);
    check_triple_identities(
        mu,
        |_| true,
        (Axiom::Skew, Some(Axiom::SquareZero), Axiom::Cyclic, Axiom::Fundamental),
        &mut c,
    );
    Ok(c.finish())
}

/// A validated Lie triple system.
#[derive(Clone, PartialEq, Eq)]
pub struct LieTripleSystem<F> {
    basis_names: Vec<String>,
    mu: StructureTensor<F>,
}

impl<F: Scalar> LieTripleSystem<F> {
    pub fn new(basis_names: Vec<String>, mu: StructureTensor<F>) -> Result<Self, LtsError> {
        let report = verify_lts(&mu)?;
        if !report.passed() {
            return Err(LtsError::AxiomsFailed(report.summary()));
        }
        Self::new_unchecked(basis_names, mu)
    }

    /// Skips the axiom check but still validates shapes.
    pub fn new_unchecked(basis_names: Vec<String>, mu: StructureTensor<F>) -> Result<Self, LtsError> {
        if !mu.is_square() {
            return Err(LtsError::ShapeMismatch("bracket tensor is not square".into()));
        }
        if basis_names.len() != mu.dim_in {
            return Err(LtsError::DimensionMismatch(format!(
                "{} basis names for dimension {}",
                basis_names.len(),
                mu.dim_in
            )));
        }
        Ok(LieTripleSystem { basis_names, mu })
    }

    /// Abelian system with the given dimension.
    pub fn abelian(dim: usize) -> Self {
        let names = (1..=dim).map(|i| format!("e{i}")).collect();
        LieTripleSystem {
            basis_names: names,
            mu: StructureTensor::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mu.dim_in
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis_names
    }

    pub fn mu(&self) -> &StructureTensor<F> {
        &self.mu
    }

    pub fn bracket(&self, x: &[F], y: &[F], z: &[F]) -> Result<Vec<F>, LtsError> {
        self.mu.eval(x, y, z)
    }

    pub fn basis_vector(&self, i: usize) -> Vec<F> {
        let mut v = vec![F::zero(); self.dim()];
        v[i] = F::one();
        v
    }
}

impl<F: Scalar> fmt::Debug for LieTripleSystem<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieTripleSystem")
            .field("basis", &self.basis_names)
            .field("mu", &self.mu)
            .finish()
    }
}

/// Coefficients of a map `T x T x V -> V`, flattened over `(a, b, v, out)`.
#[derive(Clone, PartialEq, Eq)]
pub struct ActionTensor<F> {
    d: usize,
    m: usize,
    entries: Vec<F>,
}

impl<F: Scalar> ActionTensor<F> {
    pub fn zeros(d: usize, m: usize) -> Self {
        ActionTensor {
            d,
            m,
            entries: vec![F::zero(); d * d * m * m],
        }
    }

    pub fn from_fn(d: usize, m: usize, mut f: impl FnMut(usize, usize, usize, usize) -> F) -> Self {
        let mut t = Self::zeros(d, m);
        for a in 0..d {
            for b in 0..d {
                for v in 0..m {
                    for o in 0..m {
                        let idx = t.index(a, b, v, o);
                        t.entries[idx] = f(a, b, v, o);
                    }
                }
            }
        }
        t
    }

    pub fn from_entries(d: usize, m: usize, entries: Vec<F>) -> Result<Self, LtsError> {
        if entries.len() != d * d * m * m {
            return Err(LtsError::ShapeMismatch(format!(
                "{} entries for a {d}x{d}x{m}x{m} action",
                entries.len()
            )));
        }
        Ok(ActionTensor { d, m, entries })
    }

    #[inline]
    fn index(&self, a: usize, b: usize, v: usize, o: usize) -> usize {
        ((a * self.d + b) * self.m + v) * self.m + o
    }

    pub fn get(&self, a: usize, b: usize, v: usize, o: usize) -> &F {
        &self.entries[self.index(a, b, v, o)]
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    /// The operator `v ↦ f(x, y, v)` as an `m x m` matrix.
    pub fn operator(&self, x: &[F], y: &[F]) -> Matrix<F> {
        let mut out = Matrix::<F>::zeros(self.m, self.m);
        for (a, xa) in x.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            for (b, yb) in y.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
                let c = xa.clone() * yb;
                for v in 0..self.m {
                    for o in 0..self.m {
                        let e = self.get(a, b, v, o);
                        if !e.is_zero() {
                            let mut cur = out.get(o, v).clone();
                            cur.add_mul(&c, e);
                            out.set(o, v, cur);
                        }
                    }
                }
            }
        }
        out
    }
}

/// A module `V` over a Lie triple system with its three actions:
/// `left(a,b,v) = [abv]`, `right(a,b,v) = [vab]`, `middle(a,b,v) = [avb]`.
#[derive(Clone, PartialEq, Eq)]
pub struct LtsModule<F> {
    base: LieTripleSystem<F>,
    dim: usize,
    left: ActionTensor<F>,
    right: ActionTensor<F>,
    middle: ActionTensor<F>,
}

impl<F: Scalar> LtsModule<F> {
    /// Builds a module without checking the module axioms; see [`verify_module`].
    pub fn new(
        base: LieTripleSystem<F>,
        left: ActionTensor<F>,
        right: ActionTensor<F>,
        middle: ActionTensor<F>,
    ) -> Result<Self, LtsError> {
        let d = base.dim();
        let m = left.m;
        for t in [&left, &right, &middle] {
            if t.d != d || t.m != m {
                return Err(LtsError::ShapeMismatch(format!(
                    "action of shape {}x{}x{}x{} on a {d}-dimensional system with {m}-dimensional module",
                    t.d, t.d, t.m, t.m
                )));
            }
        }
        Ok(LtsModule {
            base,
            dim: m,
            left,
            right,
            middle,
        })
    }

    /// The system as a module over itself.
    pub fn self_module(t: &LieTripleSystem<F>) -> Self {
        let d = t.dim();
        let mu = t.mu();
        LtsModule {
            base: t.clone(),
            dim: d,
            left: ActionTensor::from_fn(d, d, |a, b, v, o| mu.get(a, b, v, o).clone()),
            right: ActionTensor::from_fn(d, d, |a, b, v, o| mu.get(v, a, b, o).clone()),
            middle: ActionTensor::from_fn(d, d, |a, b, v, o| mu.get(a, v, b, o).clone()),
        }
    }

    pub fn base(&self) -> &LieTripleSystem<F> {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left(&self) -> &ActionTensor<F> {
        &self.left
    }

    pub fn right(&self) -> &ActionTensor<F> {
        &self.right
    }

    pub fn middle(&self) -> &ActionTensor<F> {
        &self.middle
    }

    /// `θ(a, b) v = [v a b]`.
    pub fn theta(&self, a: &[F], b: &[F]) -> Result<Matrix<F>, LtsError> {
        self.check_args(a, b)?;
        Ok(self.right.operator(a, b))
    }

    /// `D(a, b) = θ(b, a) − θ(a, b)`.
    pub fn d_operator(&self, a: &[F], b: &[F]) -> Result<Matrix<F>, LtsError> {
        self.check_args(a, b)?;
        Ok(self
            .right
            .operator(b, a)
            .sub(&self.right.operator(a, b))
            .expect("same shape"))
    }

    fn check_args(&self, a: &[F], b: &[F]) -> Result<(), LtsError> {
        let d = self.base.dim();
        if a.len() != d || b.len() != d {
            return Err(LtsError::DimensionMismatch(format!(
                "operator arguments of lengths {} and {} on dimension {d}",
                a.len(),
                b.len()
            )));
        }
        Ok(())
    }

    /// Bracket on `E_V = T ⊕ V` with `[V V *] = 0`: the `(d+m)`-dimensional
    /// triple system whose restriction to tuples with at most one `V` slot
    /// encodes the module.
    fn extended_bracket(&self) -> StructureTensor<F> {
        let d = self.base.dim();
        let m = self.dim;
        let n = d + m;
        let mu = self.base.mu();
        StructureTensor::from_fn(n, n, |i, j, k, l| {
            let in_v = [i >= d, j >= d, k >= d];
            match in_v {
                [false, false, false] if l < d => mu.get(i, j, k, l).clone(),
                [false, false, true] if l >= d => self.left.get(i, j, k - d, l - d).clone(),
                [true, false, false] if l >= d => self.right.get(j, k, i - d, l - d).clone(),
                [false, true, false] if l >= d => self.middle.get(i, k, j - d, l - d).clone(),
                _ => F::zero(),
            }
        })
    }
}

impl<F: Scalar> fmt::Debug for LtsModule<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LtsModule")
            .field("base_dim", &self.base.dim())
            .field("dim", &self.dim)
            .finish()
    }
}

/// Checks LTM1–LTM3 on every basis tuple with at most one module slot and the
/// θ-relations LTR1–LTR2 on every basis 4-tuple.
pub fn verify_module<F: Scalar>(module: &LtsModule<F>) -> AxiomReport<F> {
    verify_module_with(module, Verbosity::FirstPerAxiom)
}

pub fn verify_module_with<F: Scalar>(module: &LtsModule<F>, verbosity: Verbosity) -> AxiomReport<F> {
    let d = module.base.dim();
    let ext = module.extended_bracket();
    let mut c = Collector::new(verbosity);
    check_triple_identities(
        &ext,
        |t| t.iter().filter(|i| **i >= d).count() <= 1,
        (Axiom::ModuleSkew, None, Axiom::ModuleCyclic, Axiom::ModuleFundamental),
        &mut c,
    );
    // Witnesses for module slots are reported in E_V numbering (V indices offset by d).
    let mut report = c.finish();
    report.merge(verify_theta_relations(module, verbosity));
    report
}

fn verify_theta_relations<F: Scalar>(module: &LtsModule<F>, verbosity: Verbosity) -> AxiomReport<F> {
    let t = &module.base;
    let d = t.dim();
    let e: Vec<Vec<F>> = (0..d).map(|i| t.basis_vector(i)).collect();
    let theta: Vec<Vec<Matrix<F>>> = (0..d)
        .map(|a| (0..d).map(|b| module.right.operator(&e[a], &e[b])).collect())
        .collect();
    let dop = |a: usize, b: usize| theta[b][a].sub(&theta[a][b]).expect("same shape");
    let mu = t.mu();
    let mut c = Collector::new(verbosity);
    for a in 0..d {
        for b in 0..d {
            for cc in 0..d {
                for dd in 0..d {
                    let w = [a, b, cc, dd];
                    // LTR1
                    let bcd = mu.basis_value(b, cc, dd).to_vec();
                    let r = theta[cc][dd]
                        .mul(&theta[a][b])
                        .and_then(|x| x.sub(&theta[b][dd].mul(&theta[a][cc])?))
                        .and_then(|x| x.sub(&module.right.operator(&e[a], &bcd)))
                        .and_then(|x| x.add(&dop(b, cc).mul(&theta[a][dd])?))
                        .expect("square operators");
                    c.check(Axiom::ThetaFirst, &w, r.entries().to_vec());
                    // LTR2
                    let abc = mu.basis_value(a, b, cc).to_vec();
                    let abd = mu.basis_value(a, b, dd).to_vec();
                    let dab = dop(a, b);
                    let r = theta[cc][dd]
                        .mul(&dab)
                        .and_then(|x| x.sub(&dab.mul(&theta[cc][dd])?))
                        .and_then(|x| x.add(&module.right.operator(&abc, &e[dd])))
                        .and_then(|x| x.add(&module.right.operator(&e[cc], &abd)))
                        .expect("square operators");
                    c.check(Axiom::ThetaSecond, &w, r.entries().to_vec());
                }
            }
        }
    }
    c.finish()
}

#[cfg(test)]
mod tests {
    use super::builders::*;
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn e(d: usize, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); d];
        v[i] = Q::one();
        v
    }

    #[test]
    fn meson_bracket_values() {
        let t = meson::<Q>(2).unwrap();
        let g1 = e(2, 0);
        let g2 = e(2, 1);
        assert_eq!(t.bracket(&g1, &g2, &g1).unwrap(), g2);
        assert_eq!(t.bracket(&g1, &g2, &g2).unwrap(), vec![Q::from_i64(-1), Q::zero()]);
        let x = vec![Q::from_i64(3), Q::new(-1, 2)];
        let y = vec![Q::from_i64(2), Q::from_i64(5)];
        assert_eq!(t.bracket(&x, &x, &y).unwrap(), vec![Q::zero(); 2]);
        assert!(t.bracket(&x, &x, &[Q::one()]).is_err());
    }

    #[test]
    fn verify_examples() {
        assert!(verify_lts(meson::<Q>(2).unwrap().mu()).unwrap().passed());
        assert!(verify_lts(&StructureTensor::<Q>::zeros(3, 3)).unwrap().passed());
        let mut bad = StructureTensor::<Q>::zeros(1, 1);
        bad.set(0, 0, 0, 0, Q::one());
        let report = verify_lts(&bad).unwrap();
        assert!(report.failed_axioms().contains(&Axiom::Skew));
        assert!(report.failed_axioms().contains(&Axiom::SquareZero));
        assert!(verify_lts(&StructureTensor::<Q>::zeros(2, 3)).is_err());
    }

    #[test]
    fn witnesses_are_lexicographically_first() {
        let mut t = StructureTensor::<Q>::zeros(2, 2);
        t.set(0, 1, 0, 0, Q::one());
        t.set(1, 1, 0, 1, Q::one());
        let report = verify_lts(&t).unwrap();
        let skew: Vec<_> = report.violations.iter().filter(|v| v.axiom == Axiom::Skew).collect();
        assert_eq!(skew.len(), 1);
        assert_eq!(skew[0].witness, vec![0, 1, 0]);
        assert_eq!(skew[0].residual, vec![Q::one(), Q::zero()]);
        let all = verify_lts_with(&t, Verbosity::All).unwrap();
        let skew_all = all.violations.iter().filter(|v| v.axiom == Axiom::Skew).count();
        assert_eq!(skew_all, 3);
    }

    #[test]
    fn theta_and_d_on_meson() {
        let t = meson::<Q>(2).unwrap();
        let m = LtsModule::self_module(&t);
        let (g1, g2) = (e(2, 0), e(2, 1));
        let dop = m.d_operator(&g1, &g2).unwrap();
        assert_eq!(dop.mul_vec(&g1).unwrap(), g2);
        let th = m.theta(&g1, &g2).unwrap();
        // θ(g1,g2) g2 = [g2 g1 g2] = -[g1 g2 g2] = g1
        assert_eq!(th.mul_vec(&g2).unwrap(), g1);
        let ab = LtsModule::self_module(&LieTripleSystem::<Q>::abelian(3));
        assert!(ab.theta(&e(3, 1), &e(3, 1)).unwrap().is_zero());
    }

    #[test]
    fn module_checks() {
        assert!(verify_module(&LtsModule::self_module(&meson::<Q>(2).unwrap())).passed());
        assert!(verify_module(&LtsModule::self_module(&skew_lts::<Q>(3).unwrap())).passed());

        let t = meson::<Q>(2).unwrap();
        let sm = LtsModule::self_module(&t);
        let broken = LtsModule::new(t, sm.left().clone(), ActionTensor::zeros(2, 2), sm.middle().clone()).unwrap();
        let report = verify_module(&broken);
        assert!(!report.passed());
        assert!(report.failed_axioms().contains(&Axiom::ModuleCyclic));
    }
}
