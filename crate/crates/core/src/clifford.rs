//! Hermitian generators of the Clifford algebra Cl(2m) in its 2^m
//! dimensional irreducible representation, realized as Kronecker products
//! of Pauli matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::scalars::{GaussianRational, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CliffordError {
    #[error("pauli index {0} out of range (expected 0..=3)")]
    BadPauliIndex(usize),
    #[error("generator index {j} out of range for Cl({two_m}) (expected 1..={two_m})")]
    BadGeneratorIndex { j: usize, two_m: usize },
    #[error("representation needs at least one generator pair (m >= 1)")]
    BadRank,
}

/// Dense square matrix with scalar (non-operator) entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstMatrix<S> {
    dim: usize,
    entries: Vec<S>,
}

impl<S: Scalar> ConstMatrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        ConstMatrix { dim, entries: rows.into_iter().flatten().collect() }
    }

    pub fn zero(dim: usize) -> Self {
        ConstMatrix { dim, entries: vec![S::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for r in 0..dim {
            *m.get_mut(r, r) = S::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &S {
        &self.entries[r * self.dim + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut S {
        &mut self.entries[r * self.dim + c]
    }

    pub fn scale(&self, s: &S) -> Self {
        ConstMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.clone() * s.clone()).collect(),
        }
    }

    /// Kronecker product; `self` is the coarse (left) factor, so the result
    /// has block structure `self[r][c] * rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let dim = self.dim * rhs.dim;
        let mut out = Self::zero(dim);
        for ra in 0..self.dim {
            for ca in 0..self.dim {
                let a = self.get(ra, ca);
                if a.is_zero() {
                    continue;
                }
                for rb in 0..rhs.dim {
                    for cb in 0..rhs.dim {
                        *out.get_mut(ra * rhs.dim + rb, ca * rhs.dim + cb) =
                            a.clone() * rhs.get(rb, cb).clone();
                    }
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                *out.get_mut(c, r) = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Apply a ring map entrywise (e.g. embed Q(i) into the polynomial ring).
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> ConstMatrix<T> {
        ConstMatrix { dim: self.dim, entries: self.entries.iter().map(f).collect() }
    }
}

impl<S: Scalar> Add for &ConstMatrix<S> {
    type Output = ConstMatrix<S>;

    fn add(self, rhs: Self) -> ConstMatrix<S> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ConstMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Sub for &ConstMatrix<S> {
    type Output = ConstMatrix<S>;

    fn sub(self, rhs: Self) -> ConstMatrix<S> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ConstMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> Neg for &ConstMatrix<S> {
    type Output = ConstMatrix<S>;

    fn neg(self) -> ConstMatrix<S> {
        ConstMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| -a.clone()).collect(),
        }
    }
}

impl<S: Scalar> Mul for &ConstMatrix<S> {
    type Output = ConstMatrix<S>;

    fn mul(self, rhs: Self) -> ConstMatrix<S> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = ConstMatrix::zero(self.dim);
        for r in 0..self.dim {
            for k in 0..self.dim {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..self.dim {
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur: &mut S = out.get_mut(r, c);
                    *cur = cur.clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }
}

impl<S: Scalar> fmt::Display for ConstMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for r in 0..self.dim {
            write!(f, "[")?;
            for c in 0..self.dim {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:>width$}", cells[r * self.dim + c], width = width)?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// The identity and the three Pauli matrices; `k` in `0..=3`.
pub fn pauli(k: usize) -> Result<ConstMatrix<GaussianRational>, CliffordError> {
    let one = GaussianRational::one;
    let zero = GaussianRational::zero;
    let i = GaussianRational::i;
    let rows = match k {
        0 => vec![vec![one(), zero()], vec![zero(), one()]],
        1 => vec![vec![zero(), one()], vec![one(), zero()]],
        2 => vec![vec![zero(), -i()], vec![i(), zero()]],
        3 => vec![vec![one(), zero()], vec![zero(), -one()]],
        _ => return Err(CliffordError::BadPauliIndex(k)),
    };
    Ok(ConstMatrix::from_rows(rows))
}

fn kron_chain(factors: &[&ConstMatrix<GaussianRational>]) -> ConstMatrix<GaussianRational> {
    let mut acc = ConstMatrix::identity(1);
    for f in factors {
        acc = acc.kron(f);
    }
    acc
}

/// The j-th Hermitian generator of Cl(2m) in the 2^m dimensional
/// representation, `j` in `1..=2m`:
///
/// * `g_1     = s1 (x) ... (x) s1`                          (m factors)
/// * `g_j     = s1^(m-j+1) (x) s3 (x) I^(j-2)`              for 2 <= j <= m
/// * `g_(j+m) = s1^(m-j)   (x) s2 (x) I^(j-1)`              for 1 <= j <= m
pub fn build_gamma(m: usize, j: usize) -> Result<ConstMatrix<GaussianRational>, CliffordError> {
    if m == 0 {
        return Err(CliffordError::BadRank);
    }
    if j == 0 || j > 2 * m {
        return Err(CliffordError::BadGeneratorIndex { j, two_m: 2 * m });
    }
    let s1 = pauli(1)?;
    let s2 = pauli(2)?;
    let s3 = pauli(3)?;
    let id = pauli(0)?;
    let mut factors: Vec<&ConstMatrix<GaussianRational>> = Vec::with_capacity(m);
    if j == 1 {
        factors.resize(m, &s1);
    } else if j <= m {
        factors.resize(m - j + 1, &s1);
        factors.push(&s3);
        factors.resize(m, &id);
    } else {
        let jj = j - m;
        factors.resize(m - jj, &s1);
        factors.push(&s2);
        factors.resize(m, &id);
    }
    Ok(kron_chain(&factors))
}

/// Ordered product `g_{j_1} g_{j_2} ...` in Cl(2m); an empty index list
/// gives the identity.
pub fn gamma_product(
    m: usize,
    indices: &[usize],
) -> Result<ConstMatrix<GaussianRational>, CliffordError> {
    let mut acc = ConstMatrix::identity(1 << m);
    for &j in indices {
        acc = &acc * &build_gamma(m, j)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Serialize)]
pub struct CliffordCheck {
    pub name: String,
    pub pass: bool,
}

/// Relation report for the Cl(2m) representation: every anticommutator
/// `{g_j, g_k} = 2 delta_jk I` and hermiticity of each generator.
#[derive(Debug, Clone, Serialize)]
pub struct CliffordReport {
    pub m: usize,
    pub dim: usize,
    pub checks: Vec<CliffordCheck>,
    pub pass: bool,
}

pub fn verify_clifford(m: usize) -> Result<CliffordReport, CliffordError> {
    if m == 0 {
        return Err(CliffordError::BadRank);
    }
    let dim = 1 << m;
    let gammas: Vec<_> = (1..=2 * m).map(|j| build_gamma(m, j)).collect::<Result<_, _>>()?;
    let id = ConstMatrix::<GaussianRational>::identity(dim);
    let two_id = id.scale(&GaussianRational::from_int(2));
    let mut checks = Vec::new();
    for (j, gamma) in gammas.iter().enumerate() {
        checks.push(CliffordCheck {
            name: format!("g{} hermitian", j + 1),
            pass: gamma.adjoint() == *gamma,
        });
    }
    for j in 0..2 * m {
        for k in j..2 * m {
            let anti = &(&gammas[j] * &gammas[k]) + &(&gammas[k] * &gammas[j]);
            let expected = if j == k { two_id.clone() } else { ConstMatrix::zero(dim) };
            checks.push(CliffordCheck {
                name: format!("{{g{}, g{}}} = {}", j + 1, k + 1, if j == k { "2I" } else { "0" }),
                pass: anti == expected,
            });
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(CliffordReport { m, dim, checks, pass })
}
