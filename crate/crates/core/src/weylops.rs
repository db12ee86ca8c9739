//! Matrix differential operators on the half line.
//!
//! A `DiffOp` is a finite sum of normal-ordered terms `c * x^m * d^k`
//! (integer `m`, possibly negative; `d` is the derivative), kept in a
//! sparse term map. Composition applies the Weyl algebra rewrite
//! `d x^m = x^m d + m x^(m-1)` in closed form; the formal adjoint uses
//! `x^+ = x`, `d^+ = -d`. A `MatrixOp` is a square matrix of such
//! operators, optionally tagged with a Z2^n degree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::clifford::ConstMatrix;
use crate::graded::DegreeVector;
use crate::linalg::{solve_in_ring, SolveOutcome};
use crate::scalars::{BetaPoly, GaussianRational, Rational, Scalar};

/// Scalar differential operator: map from `(xpow, dpow)` to coefficient.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffOp<S> {
    terms: HashMap<(i64, u32), S>,
}

impl<S: Scalar> DiffOp<S> {
    pub fn zero() -> Self {
        DiffOp { terms: HashMap::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::from_term(c, 0, 0)
    }

    pub fn identity() -> Self {
        Self::constant(S::one())
    }

    pub fn from_term(c: S, xpow: i64, dpow: u32) -> Self {
        let mut op = Self::zero();
        op.add_term(xpow, dpow, c);
        op
    }

    /// `x^m` (negative `m` allowed).
    pub fn x_pow(m: i64) -> Self {
        Self::from_term(S::one(), m, 0)
    }

    /// `d^k`.
    pub fn d_pow(k: u32) -> Self {
        Self::from_term(S::one(), 0, k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, xpow: i64, dpow: u32, c: S) {
        if c.is_zero() {
            return;
        }
        let key = (xpow, dpow);
        match self.terms.remove(&key) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, u32), &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms sorted by `(xpow, dpow)`; the canonical order for rendering.
    pub fn terms_sorted(&self) -> Vec<((i64, u32), S)> {
        let sorted: BTreeMap<(i64, u32), S> =
            self.terms.iter().map(|(k, v)| (*k, v.clone())).collect();
        sorted.into_iter().collect()
    }

    pub fn coeff(&self, xpow: i64, dpow: u32) -> S {
        self.terms.get(&(xpow, dpow)).cloned().unwrap_or_else(S::zero)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (&(m, k), c) in rhs.terms() {
            out.add_term(m, k, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        DiffOp { terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero();
        for (&(m, k), c) in self.terms() {
            out.add_term(m, k, c.clone() * s.clone());
        }
        out
    }

    /// Normal-ordered product. For each pair of terms,
    /// `x^m1 d^k1 x^m2 d^k2 = sum_j C(k1,j) (m2)_j x^(m1+m2-j) d^(k1+k2-j)`
    /// with `(m2)_j` the falling factorial; this is the closed form of the
    /// recursive rewrite `d x^m = x^m d + m x^(m-1)`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (&(m1, k1), c1) in self.terms() {
            for (&(m2, k2), c2) in rhs.terms() {
                let c12 = c1.clone() * c2.clone();
                let mut binom: i128 = 1;
                let mut falling = S::one();
                for j in 0..=k1 {
                    if j > 0 {
                        binom = binom * (k1 - j + 1) as i128 / j as i128;
                        falling = falling * S::from_int(m2 - (j as i64 - 1));
                    }
                    let b = S::from_int(
                        i64::try_from(binom).expect("binomial coefficient overflows i64"),
                    );
                    out.add_term(
                        m1 + m2 - j as i64,
                        k1 + k2 - j,
                        c12.clone() * b * falling.clone(),
                    );
                    if m2 >= 0 && j as i64 == m2 {
                        break;
                    }
                }
            }
        }
        out
    }

    /// Formal adjoint: coefficients conjugated, `x` fixed, `d` negated,
    /// factor order reversed and re-normal-ordered.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (&(m, k), c) in self.terms() {
            let coeff = c.conj() * S::i_pow(2 * k as i64);
            let reordered = Self::d_pow(k).compose(&Self::x_pow(m));
            out = out.add(&reordered.scale(&coeff));
        }
        out
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> DiffOp<T> {
        let mut out = DiffOp::zero();
        for (&(m, k), c) in self.terms() {
            out.add_term(m, k, f(c));
        }
        out
    }
}

impl DiffOp<BetaPoly> {
    /// Instantiate the formal parameter at an exact rational value.
    pub fn eval_beta(&self, beta: &Rational) -> DiffOp<GaussianRational> {
        self.map_coeffs(|c| c.eval(beta))
    }
}

impl<S: Scalar> fmt::Display for DiffOp<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, ((m, k), c)) in self.terms_sorted().into_iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})", c)?;
            if m != 0 {
                write!(f, " * x^{}", m)?;
            }
            if k != 0 {
                write!(f, " * d^{}", k)?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermWire<S> {
    xpow: i64,
    dpow: u32,
    coeff: S,
}

impl<S: Scalar + Serialize> Serialize for DiffOp<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let wire: Vec<TermWire<S>> = self
            .terms_sorted()
            .into_iter()
            .map(|((xpow, dpow), coeff)| TermWire { xpow, dpow, coeff })
            .collect();
        wire.serialize(serializer)
    }
}

impl<'de, S: Scalar + Deserialize<'de>> Deserialize<'de> for DiffOp<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = Vec::<TermWire<S>>::deserialize(deserializer)?;
        let mut op = DiffOp::zero();
        for t in wire {
            op.add_term(t.xpow, t.dpow, t.coeff);
        }
        Ok(op)
    }
}

/// Which bracket to take at the operator level.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BracketKind {
    Commutator,
    Anticommutator,
}

/// Square matrix of differential operators, optionally carrying a Z2^n
/// degree label.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixOp<S> {
    dim: usize,
    entries: Vec<DiffOp<S>>,
    degree: Option<DegreeVector>,
}

impl<S: Scalar> MatrixOp<S> {
    pub fn zero(dim: usize) -> Self {
        MatrixOp { dim, entries: vec![DiffOp::zero(); dim * dim], degree: None }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for r in 0..dim {
            *m.entry_mut(r, r) = DiffOp::identity();
        }
        m
    }

    pub fn from_const(c: &ConstMatrix<S>) -> Self {
        let dim = c.dim();
        let mut m = Self::zero(dim);
        for r in 0..dim {
            for col in 0..dim {
                if !c.get(r, col).is_zero() {
                    *m.entry_mut(r, col) = DiffOp::constant(c.get(r, col).clone());
                }
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> Option<&DegreeVector> {
        self.degree.as_ref()
    }

    pub fn with_degree(mut self, degree: DegreeVector) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn clear_degree(mut self) -> Self {
        self.degree = None;
        self
    }

    pub fn entry(&self, r: usize, c: usize) -> &DiffOp<S> {
        &self.entries[r * self.dim + c]
    }

    pub fn entry_mut(&mut self, r: usize, c: usize) -> &mut DiffOp<S> {
        &mut self.entries[r * self.dim + c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(DiffOp::is_zero)
    }

    /// Positions of nonzero entries, sorted.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.dim {
            for c in 0..self.dim {
                if !self.entry(r, c).is_zero() {
                    out.push((r, c));
                }
            }
        }
        out
    }

    /// Full term-level support: `(row, col, xpow, dpow)` keys.
    pub fn term_support(&self) -> BTreeSet<(usize, usize, i64, u32)> {
        let mut out = BTreeSet::new();
        for (r, c) in self.support() {
            for (&(m, k), _) in self.entry(r, c).terms() {
                out.insert((r, c, m, k));
            }
        }
        out
    }

    fn merged_degree(&self, rhs: &Self, combine: impl Fn(&DegreeVector, &DegreeVector) -> Option<DegreeVector>) -> Option<DegreeVector> {
        match (&self.degree, &rhs.degree) {
            (Some(a), Some(b)) => combine(a, b),
            _ => None,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let degree =
            self.merged_degree(rhs, |a, b| if a == b { Some(a.clone()) } else { None });
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        MatrixOp { dim: self.dim, entries, degree }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        MatrixOp {
            dim: self.dim,
            entries: self.entries.iter().map(DiffOp::neg).collect(),
            degree: self.degree.clone(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        MatrixOp {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.scale(s)).collect(),
            degree: self.degree.clone(),
        }
    }

    /// Operator (matrix) product with entrywise composition.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matrix dimension mismatch");
        let degree = self.merged_degree(rhs, |a, b| Some(a.add(b)));
        let mut out = MatrixOp::zero(self.dim);
        for r in 0..self.dim {
            for k in 0..self.dim {
                let a = self.entry(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..self.dim {
                    let b = rhs.entry(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.compose(b);
                    let cur = out.entry_mut(r, c);
                    *cur = cur.add(&prod);
                }
            }
        }
        out.degree = degree;
        out
    }

    /// `AB - BA` or `AB + BA`.
    pub fn bracket(&self, rhs: &Self, kind: BracketKind) -> Self {
        let ab = self.mul(rhs);
        let ba = rhs.mul(self);
        match kind {
            BracketKind::Commutator => ab.sub(&ba),
            BracketKind::Anticommutator => ab.add(&ba),
        }
    }

    /// Conjugate transpose with the formal adjoint on entries.
    pub fn adjoint(&self) -> Self {
        let mut out = MatrixOp::zero(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                *out.entry_mut(c, r) = self.entry(r, c).adjoint();
            }
        }
        out.degree = self.degree.clone();
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MatrixOp<T> {
        MatrixOp {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.map_coeffs(&f)).collect(),
            degree: self.degree.clone(),
        }
    }
}

impl MatrixOp<BetaPoly> {
    pub fn eval_beta(&self, beta: &Rational) -> MatrixOp<GaussianRational> {
        self.map_coeffs(|c| c.eval(beta))
    }
}

/// Kronecker lift `coarse (x) fine`: the constant matrix indexes the
/// blocks, the operator matrix fills them.
pub fn tensor<S: Scalar>(coarse: &ConstMatrix<S>, fine: &MatrixOp<S>) -> MatrixOp<S> {
    let fd = fine.dim();
    let dim = coarse.dim() * fd;
    let mut out = MatrixOp::zero(dim);
    for rc in 0..coarse.dim() {
        for cc in 0..coarse.dim() {
            let a = coarse.get(rc, cc);
            if a.is_zero() {
                continue;
            }
            for rf in 0..fd {
                for cf in 0..fd {
                    let e = fine.entry(rf, cf);
                    if e.is_zero() {
                        continue;
                    }
                    *out.entry_mut(rc * fd + rf, cc * fd + cf) = e.scale(a);
                }
            }
        }
    }
    out
}

impl<S: Scalar> fmt::Display for MatrixOp<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (r, c)) in self.support().into_iter().enumerate() {
            if idx > 0 {
                writeln!(f)?;
            }
            write!(f, "({},{}): {}", r, c, self.entry(r, c))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
struct EntryWire<S> {
    row: usize,
    col: usize,
    op: DiffOp<S>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
struct MatrixWire<S> {
    dim: usize,
    degree: Option<DegreeVector>,
    entries: Vec<EntryWire<S>>,
}

impl<S: Scalar + Serialize> Serialize for MatrixOp<S> {
    fn serialize<Ser: Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        let entries = self
            .support()
            .into_iter()
            .map(|(row, col)| EntryWire { row, col, op: self.entry(row, col).clone() })
            .collect();
        MatrixWire { dim: self.dim, degree: self.degree.clone(), entries }.serialize(serializer)
    }
}

impl<'de, S: Scalar + Deserialize<'de>> Deserialize<'de> for MatrixOp<S> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = MatrixWire::<S>::deserialize(deserializer)?;
        let mut m = MatrixOp::zero(wire.dim);
        m.degree = wire.degree;
        for e in wire.entries {
            if e.row >= wire.dim || e.col >= wire.dim {
                return Err(serde::de::Error::custom(format!(
                    "entry ({},{}) outside {}x{} matrix",
                    e.row, e.col, wire.dim, wire.dim
                )));
            }
            *m.entry_mut(e.row, e.col) = e.op;
        }
        Ok(m)
    }
}

/// Failure witness for `decompose`: the part of the target that cannot be
/// written in the requested span.
#[derive(Debug, Error)]
#[error("operator not in span; residual:\n{residual}")]
pub struct SpanError<S: Scalar> {
    pub residual: MatrixOp<S>,
}

/// Exact coefficients of `target` over `basis`.
///
/// When the basis elements have pairwise disjoint term supports (true for
/// every degree slice of the shipped models) each coefficient is read off
/// a single matched term; otherwise a small exact linear system is solved
/// in the fraction field. Either way the result is certified by
/// recomputing the residual.
pub fn decompose<S: Scalar>(
    target: &MatrixOp<S>,
    basis: &[&MatrixOp<S>],
) -> Result<Vec<S>, SpanError<S>> {
    for b in basis {
        assert_eq!(b.dim(), target.dim(), "matrix dimension mismatch");
    }
    let supports: Vec<BTreeSet<(usize, usize, i64, u32)>> =
        basis.iter().map(|b| b.term_support()).collect();
    let total: usize = supports.iter().map(BTreeSet::len).sum();
    let union: BTreeSet<_> = supports.iter().flatten().copied().collect();
    let disjoint = union.len() == total && supports.iter().all(|s| !s.is_empty());

    let coeffs: Option<Vec<S>> = if disjoint {
        let mut out = Vec::with_capacity(basis.len());
        let mut ok = true;
        for (b, sup) in basis.iter().zip(&supports) {
            let &(r, c, m, k) = sup.iter().next().expect("nonempty support");
            let num = target.entry(r, c).coeff(m, k);
            match num.try_exact_div(&b.entry(r, c).coeff(m, k)) {
                Some(x) => out.push(x),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        ok.then_some(out)
    } else {
        let mut keys: BTreeSet<(usize, usize, i64, u32)> = union;
        keys.extend(target.term_support());
        let keys: Vec<_> = keys.into_iter().collect();
        let columns: Vec<Vec<S>> = basis
            .iter()
            .map(|b| keys.iter().map(|&(r, c, m, k)| b.entry(r, c).coeff(m, k)).collect())
            .collect();
        let rhs: Vec<S> =
            keys.iter().map(|&(r, c, m, k)| target.entry(r, c).coeff(m, k)).collect();
        match solve_in_ring(&columns, &rhs) {
            SolveOutcome::Solved(x) => Some(x),
            SolveOutcome::Inconsistent | SolveOutcome::NonRing => None,
        }
    };

    let coeffs = match coeffs {
        Some(c) => c,
        None => return Err(SpanError { residual: target.clone() }),
    };
    let mut residual = target.clone();
    for (b, c) in basis.iter().zip(&coeffs) {
        residual = residual.sub(&b.scale(c));
    }
    if residual.is_zero() {
        Ok(coeffs)
    } else {
        Err(SpanError { residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type Gr = GaussianRational;

    fn gi(n: i64) -> Gr {
        Gr::from_int(n)
    }

    fn x() -> DiffOp<Gr> {
        DiffOp::x_pow(1)
    }

    fn d() -> DiffOp<Gr> {
        DiffOp::d_pow(1)
    }

    #[test]
    fn derivative_past_x() {
        // d x = x d + 1
        let mut want = DiffOp::from_term(gi(1), 1, 1);
        want.add_term(0, 0, gi(1));
        assert_eq!(d().compose(&x()), want);
        // x d stays put.
        assert_eq!(x().compose(&d()), DiffOp::from_term(gi(1), 1, 1));
    }

    #[test]
    fn second_derivative_past_x_squared() {
        // d^2 x^2 = x^2 d^2 + 4 x d + 2
        let lhs = DiffOp::<Gr>::d_pow(2).compose(&DiffOp::x_pow(2));
        let mut want = DiffOp::from_term(gi(1), 2, 2);
        want.add_term(1, 1, gi(4));
        want.add_term(0, 0, gi(2));
        assert_eq!(lhs, want);
    }

    #[test]
    fn derivative_past_negative_power() {
        // d x^-1 = x^-1 d - x^-2
        let lhs = d().compose(&DiffOp::x_pow(-1));
        let mut want = DiffOp::from_term(gi(1), -1, 1);
        want.add_term(-2, 0, gi(-1));
        assert_eq!(lhs, want);
    }

    #[test]
    fn adjoint_of_x_d() {
        // (x d)^+ = -d x = -(x d + 1)
        let xd = x().compose(&d());
        let mut want = DiffOp::from_term(gi(-1), 1, 1);
        want.add_term(0, 0, gi(-1));
        assert_eq!(xd.adjoint(), want);
        assert_eq!(d().adjoint(), d().neg());
        assert_eq!(
            DiffOp::constant(Gr::i()).adjoint(),
            DiffOp::constant(-Gr::i())
        );
    }

    #[test]
    fn position_momentum_bracket() {
        // [x, p] = i with p = -i d, as 1x1 matrix operators.
        let mut xm = MatrixOp::<Gr>::zero(1);
        *xm.entry_mut(0, 0) = x();
        let mut pm = MatrixOp::<Gr>::zero(1);
        *pm.entry_mut(0, 0) = d().scale(&-Gr::i());
        let br = xm.bracket(&pm, BracketKind::Commutator);
        let mut want = MatrixOp::<Gr>::zero(1);
        *want.entry_mut(0, 0) = DiffOp::constant(Gr::i());
        assert_eq!(br, want);
    }

    #[test]
    fn tensor_blocks_follow_coarse_entries() {
        let s3 = crate::clifford::pauli(3).unwrap();
        let mut fine = MatrixOp::<Gr>::zero(2);
        *fine.entry_mut(0, 1) = x();
        *fine.entry_mut(1, 0) = d();
        let lifted = tensor(&s3, &fine);
        assert_eq!(lifted.dim(), 4);
        assert_eq!(lifted.entry(0, 1), &x());
        assert_eq!(lifted.entry(1, 0), &d());
        assert_eq!(lifted.entry(2, 3), &x().neg());
        assert_eq!(lifted.entry(3, 2), &d().neg());
        assert!(lifted.entry(0, 2).is_zero());
    }

    #[test]
    fn hermiticity_of_symmetrized_operator() {
        // x d + 1/2 is anti-hermitian times i: i(x d + 1/2) is hermitian.
        let sym = x().compose(&d()).add(&DiffOp::constant(Gr::from_ratio(1, 2)));
        let mut m = MatrixOp::<Gr>::zero(1);
        *m.entry_mut(0, 0) = sym.scale(&Gr::i());
        assert!(m.is_hermitian());
    }

    fn diag_op(entries: [DiffOp<Gr>; 2]) -> MatrixOp<Gr> {
        let mut m = MatrixOp::zero(2);
        *m.entry_mut(0, 0) = entries[0].clone();
        *m.entry_mut(1, 1) = entries[1].clone();
        m
    }

    #[test]
    fn decompose_on_disjoint_supports() {
        let h = diag_op([DiffOp::d_pow(2), DiffOp::d_pow(2)]);
        let dd = diag_op([x().compose(&d()), x().compose(&d())]);
        let k = diag_op([DiffOp::x_pow(2), DiffOp::x_pow(2)]);
        let target = h.scale(&gi(2)).add(&dd.scale(&Gr::i()).add(&k.scale(&gi(0))));
        let coeffs = decompose(&target, &[&h, &dd, &k]).unwrap();
        assert_eq!(coeffs, vec![gi(2), Gr::i(), gi(0)]);
    }

    #[test]
    fn decompose_overlapping_supports_uses_exact_solve() {
        let a = diag_op([DiffOp::x_pow(2), DiffOp::x_pow(2)]);
        let mixed = DiffOp::x_pow(2).add(&x().compose(&d()));
        let b = diag_op([mixed.clone(), mixed]);
        // target = 2a + b has overlapping x^2 support.
        let target = a.scale(&gi(2)).add(&b);
        let coeffs = decompose(&target, &[&a, &b]).unwrap();
        assert_eq!(coeffs, vec![gi(2), gi(1)]);
    }

    #[test]
    fn decompose_rejects_outside_span() {
        let k = diag_op([DiffOp::x_pow(2), DiffOp::x_pow(2)]);
        let target = diag_op([x().compose(&d()), x().compose(&d())]);
        let err = decompose(&target, &[&k]).unwrap_err();
        assert_eq!(err.residual, target);
        // Zero target against an empty basis decomposes trivially.
        assert!(decompose(&MatrixOp::<Gr>::zero(2), &[]).unwrap().is_empty());
        assert!(decompose(&target, &[]).is_err());
    }

    #[test]
    fn decompose_rejects_non_ring_quotients() {
        let beta = BetaPoly::beta();
        let mut b = MatrixOp::<BetaPoly>::zero(1);
        *b.entry_mut(0, 0) = DiffOp::constant(beta);
        let target = MatrixOp::<BetaPoly>::identity(1);
        assert!(decompose(&target, &[&b]).is_err());
    }

    #[test]
    fn eval_beta_substitutes_exactly() {
        let beta = BetaPoly::beta();
        let coeff = beta.clone() * beta.clone() + beta.clone(); // b^2 + b
        let op = DiffOp::from_term(coeff, -2, 0);
        let at2 = op.eval_beta(&Rational::new(2.into(), 1.into()));
        assert_eq!(at2, DiffOp::from_term(gi(6), -2, 0));
        // Coefficients that vanish at the chosen value are dropped.
        let vanishing = DiffOp::from_term(beta - BetaPoly::from_int(2), 0, 0);
        assert!(vanishing.eval_beta(&Rational::new(2.into(), 1.into())).is_zero());
    }

    #[test]
    fn matrix_serde_roundtrip() {
        let mut m = MatrixOp::<BetaPoly>::zero(2);
        *m.entry_mut(0, 1) = DiffOp::from_term(BetaPoly::beta(), -1, 2);
        *m.entry_mut(1, 0) = DiffOp::constant(BetaPoly::from_int(-3));
        let m = m.with_degree(DegreeVector::new(vec![1, 0, 1]));
        let text = serde_json::to_string(&m).unwrap();
        let back: MatrixOp<BetaPoly> = serde_json::from_str(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn display_orders_terms() {
        let mut op = DiffOp::<Gr>::zero();
        op.add_term(1, 1, gi(3));
        op.add_term(-2, 0, gi(1));
        assert_eq!(op.to_string(), "(1) * x^-2 + (3) * x^1 * d^1");
    }

    // Reference implementation: push single derivatives through one at a
    // time. Any normal-ordering route must agree with `compose`.
    fn d_once(op: &DiffOp<Gr>) -> DiffOp<Gr> {
        let mut out = DiffOp::zero();
        for (&(m, k), c) in op.terms() {
            out.add_term(m, k + 1, c.clone());
            out.add_term(m - 1, k, c.clone() * gi(m));
        }
        out
    }

    fn naive_compose(a: &DiffOp<Gr>, b: &DiffOp<Gr>) -> DiffOp<Gr> {
        let mut out = DiffOp::zero();
        for (&(m1, k1), c1) in a.terms() {
            let mut t = b.clone();
            for _ in 0..k1 {
                t = d_once(&t);
            }
            for (&(m2, k2), c2) in t.terms() {
                out.add_term(m1 + m2, k2, c1.clone() * c2.clone());
            }
        }
        out
    }

    fn term_strategy() -> impl Strategy<Value = ((i64, u32), Gr)> {
        ((-3i64..=3, 0u32..=3), (-5i64..=5, -5i64..=5))
            .prop_map(|(key, (re, im))| (key, Gr::new(
                Rational::new(re.into(), 1.into()),
                Rational::new(im.into(), 1.into()),
            )))
    }

    fn diffop_strategy() -> impl Strategy<Value = DiffOp<Gr>> {
        proptest::collection::vec(term_strategy(), 0..4).prop_map(|terms| {
            let mut op = DiffOp::zero();
            for ((m, k), c) in terms {
                op.add_term(m, k, c);
            }
            op
        })
    }

    proptest! {
        #[test]
        fn compose_matches_single_step_rewriting(a in diffop_strategy(), b in diffop_strategy()) {
            prop_assert_eq!(a.compose(&b), naive_compose(&a, &b));
        }

        #[test]
        fn compose_is_associative(a in diffop_strategy(), b in diffop_strategy(), c in diffop_strategy()) {
            prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        }

        #[test]
        fn compose_distributes(a in diffop_strategy(), b in diffop_strategy(), c in diffop_strategy()) {
            prop_assert_eq!(a.compose(&b.add(&c)), a.compose(&b).add(&a.compose(&c)));
            prop_assert_eq!(b.add(&c).compose(&a), b.compose(&a).add(&c.compose(&a)));
        }

        #[test]
        fn adjoint_is_an_involution(a in diffop_strategy()) {
            prop_assert_eq!(a.adjoint().adjoint(), a);
        }

        #[test]
        fn adjoint_reverses_composition(a in diffop_strategy(), b in diffop_strategy()) {
            prop_assert_eq!(a.compose(&b).adjoint(), b.adjoint().compose(&a.adjoint()));
        }

        #[test]
        fn decompose_recovers_planted_disjoint_coefficients(
            c0 in (-4i64..=4),
            c1 in (-4i64..=4),
        ) {
            let b0 = diag_op([DiffOp::x_pow(2), DiffOp::x_pow(2)]);
            let b1 = diag_op([DiffOp::d_pow(1), DiffOp::d_pow(1)]);
            let target = b0.scale(&gi(c0)).add(&b1.scale(&gi(c1)));
            let coeffs = decompose(&target, &[&b0, &b1]).unwrap();
            prop_assert_eq!(coeffs, vec![gi(c0), gi(c1)]);
        }
    }
}
