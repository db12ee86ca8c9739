//! Z2^n grading machinery: degree vectors, the construction maps that lift
//! an ordinary superalgebra realization to a Z2^n-graded one through a
//! Clifford algebra factor, and the closure / Jacobi / Hermiticity
//! verification engine.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::clifford::{build_gamma, ConstMatrix};
use crate::scalars::Scalar;
use crate::weylops::{decompose, tensor, BracketKind, MatrixOp};

/// Element of Z2^n written as a bit vector; addition is componentwise xor
/// and the pairing `dot` decides commutator vs anticommutator.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct DegreeVector {
    bits: Vec<u8>,
}

impl DegreeVector {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "degree entries must be 0 or 1");
        DegreeVector { bits }
    }

    pub fn zero(n: usize) -> Self {
        DegreeVector { bits: vec![0; n] }
    }

    pub fn n(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, k: usize) -> u8 {
        self.bits[k]
    }

    /// Componentwise sum in Z2.
    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n(), rhs.n(), "degree length mismatch");
        DegreeVector {
            bits: self.bits.iter().zip(&rhs.bits).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Pairing a.b mod 2: 0 means the graded bracket is a commutator,
    /// 1 an anticommutator.
    pub fn dot(&self, rhs: &Self) -> u8 {
        assert_eq!(self.n(), rhs.n(), "degree length mismatch");
        self.bits
            .iter()
            .zip(&rhs.bits)
            .map(|(a, b)| a & b)
            .fold(0, |acc, x| acc ^ x)
    }

    /// Total degree mod 2 (the boson/fermion parity).
    pub fn parity(&self) -> u8 {
        self.bits.iter().fold(0, |acc, x| acc ^ x)
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    /// All 2^n degrees in lexicographic order (leftmost bit most significant).
    pub fn enumerate(n: usize) -> Vec<Self> {
        (0..1usize << n)
            .map(|mask| {
                DegreeVector {
                    bits: (0..n).map(|k| ((mask >> (n - 1 - k)) & 1) as u8).collect(),
                }
            })
            .collect()
    }

    pub fn parse(text: &str) -> Option<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for ch in text.chars() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                _ => return None,
            }
        }
        Some(DegreeVector { bits })
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{}", b)?;
        }
        Ok(())
    }
}

impl Serialize for DegreeVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DegreeVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        DegreeVector::parse(&text)
            .ok_or_else(|| D::Error::custom(format!("bad degree vector {:?}", text)))
    }
}

#[derive(Debug, Error)]
pub enum GradedError {
    #[error("grading involution required by this construction but not provided")]
    GammaMissing,
    #[error("grading involution condition failed: {0}")]
    GammaConditionFailed(String),
    #[error("grading rank must be at least 2 (got {0})")]
    BadRank(usize),
    #[error("generator index {0} outside 0..=3")]
    BadGreekIndex(usize),
    #[error("bracket of {left} and {right} leaves its degree slice; residual:\n{residual}")]
    ClosureViolation {
        left: String,
        right: String,
        residual: String,
    },
    #[error("component degree assignment inconsistent: {0}")]
    InconsistentGrading(String),
    #[error("model has no generator named {0}")]
    MissingGenerator(String),
    #[error("structure constant extraction failed: {0}")]
    StructureExtraction(String),
}

/// One named generator of an ordinary superalgebra realization.
/// `scale_exp` counts the powers of sqrt(2) absorbed into the stored
/// operator relative to its reference normalization; reported coefficients
/// divide the internal ones by 2^((s_i+s_j-s_k)/2).
#[derive(Clone, Debug)]
pub struct NamedOp<S> {
    pub name: String,
    pub op: MatrixOp<S>,
    pub scale_exp: i64,
}

impl<S> NamedOp<S> {
    pub fn new(name: &str, op: MatrixOp<S>, scale_exp: i64) -> Self {
        NamedOp { name: name.to_string(), op, scale_exp }
    }
}

/// An ordinary (Z2-graded) superalgebra realization split into even and
/// odd generators, with an optional grading involution (the matrix that
/// commutes with the even part, anticommutes with the odd part and squares
/// to the identity).
#[derive(Clone, Debug)]
pub struct SuperRealization<S> {
    pub name: String,
    pub even: Vec<NamedOp<S>>,
    pub odd: Vec<NamedOp<S>>,
    pub gamma: Option<ConstMatrix<S>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NamedCheck {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct GammaConditionReport {
    pub checks: Vec<NamedCheck>,
    pub pass: bool,
}

impl<S: Scalar> SuperRealization<S> {
    pub fn dim(&self) -> usize {
        let dim = self
            .even
            .iter()
            .chain(&self.odd)
            .map(|g| g.op.dim())
            .next()
            .expect("realization has at least one generator");
        assert!(
            self.even.iter().chain(&self.odd).all(|g| g.op.dim() == dim),
            "realization generators must share one dimension"
        );
        dim
    }

    /// Checks that the grading involution commutes with every even
    /// generator, anticommutes with every odd one, and squares to the
    /// identity.
    pub fn verify_gamma_condition(&self) -> Result<GammaConditionReport, GradedError> {
        let gamma = self.gamma.as_ref().ok_or(GradedError::GammaMissing)?;
        let gop = MatrixOp::from_const(gamma);
        let mut checks = Vec::new();
        let square = gamma * gamma;
        checks.push(NamedCheck {
            name: "involution squares to identity".to_string(),
            pass: square == ConstMatrix::identity(gamma.dim()),
        });
        for g in &self.even {
            checks.push(NamedCheck {
                name: format!("involution commutes with {}", g.name),
                pass: g.op.bracket(&gop, BracketKind::Commutator).is_zero(),
            });
        }
        for g in &self.odd {
            checks.push(NamedCheck {
                name: format!("involution anticommutes with {}", g.name),
                pass: g.op.bracket(&gop, BracketKind::Anticommutator).is_zero(),
            });
        }
        let pass = checks.iter().all(|c| c.pass);
        Ok(GammaConditionReport { checks, pass })
    }
}

/// Which construction produced a graded model.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Cl(2(n-1)) tensor construction; needs the grading involution.
    Cl2nm2,
    /// Cl(2n) tensor construction; no involution required.
    Cl2n,
    /// Cl(2^n-2) construction at n=3 with Greek-indexed generators.
    Cl6b,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ModelKind::Cl2nm2 => "cl2nm2",
            ModelKind::Cl2n => "cl2n",
            ModelKind::Cl6b => "cl6b",
        };
        write!(f, "{}", s)
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cl2nm2" => Ok(ModelKind::Cl2nm2),
            "cl2n" => Ok(ModelKind::Cl2n),
            "cl6b" => Ok(ModelKind::Cl6b),
            other => Err(format!("unknown construction kind {:?}", other)),
        }
    }
}

/// One homogeneous generator of a graded model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct Generator<S> {
    pub name: String,
    pub degree: DegreeVector,
    pub scale_exp: i64,
    pub op: MatrixOp<S>,
}

/// A complete graded algebra instance: homogeneous basis plus the
/// construction metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "S: Scalar + Serialize",
    deserialize = "S: Scalar + Deserialize<'de>"
))]
pub struct GradedModel<S> {
    pub kind: ModelKind,
    pub n: usize,
    pub algebra: String,
    pub dim: usize,
    pub basis: Vec<Generator<S>>,
}

/// Phase exponent of the Cl(2(n-1)) construction:
/// f(a) = sum_{k=1}^{n-2} a_k prod_{l=k+1}^{n-1} a_l + |a| sum_{l=1}^{n-1} a_l  (mod 2).
pub fn f_exponent(a: &DegreeVector) -> u8 {
    let n = a.n();
    let mut f: u32 = 0;
    for k in 1..n.max(1) - 1 {
        // a_k * prod_{l=k+1}^{n-1} a_l  (1-indexed)
        let mut term = a.bit(k - 1) as u32;
        for l in k + 1..n {
            term &= a.bit(l - 1) as u32;
        }
        f += term;
    }
    let tail: u32 = (1..n).map(|l| a.bit(l - 1) as u32).sum();
    f += a.parity() as u32 * tail;
    (f % 2) as u8
}

fn lift_gamma<S: Scalar>(m: usize, j: usize) -> ConstMatrix<S> {
    build_gamma(m, j)
        .expect("generator index within Clifford rank")
        .map(S::from_gaussian)
}

fn lifted_gamma_product<S: Scalar>(m: usize, indices: &[usize]) -> ConstMatrix<S> {
    let mut out = ConstMatrix::<S>::identity(1 << m);
    for &j in indices {
        out = &out * &lift_gamma::<S>(m, j);
    }
    out
}

/// Lift through Cl(2(n-1)): X_a = i^f(a) * prod_{j<n} gamma_j^{a_j} (x) X_|a| Gamma^(sum a_j, j<n).
/// Requires the grading involution and its defining conditions.
pub fn build_cl2nm2<S: Scalar>(
    r: &SuperRealization<S>,
    n: usize,
) -> Result<GradedModel<S>, GradedError> {
    if n < 2 {
        return Err(GradedError::BadRank(n));
    }
    let gamma = r.gamma.as_ref().ok_or(GradedError::GammaMissing)?;
    let report = r.verify_gamma_condition()?;
    if !report.pass {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        return Err(GradedError::GammaConditionFailed(failed.join("; ")));
    }
    let m = n - 1;
    let gamma_op = MatrixOp::from_const(gamma);
    let mut basis = Vec::new();
    for a in DegreeVector::enumerate(n) {
        let indices: Vec<usize> = (1..n).filter(|&j| a.bit(j - 1) == 1).collect();
        let phase = S::i_pow(f_exponent(&a) as i64);
        let coarse = lifted_gamma_product::<S>(m, &indices).scale(&phase);
        let twist = indices.len() % 2 == 1;
        let gens = if a.parity() == 0 { &r.even } else { &r.odd };
        for g in gens {
            let fine = if twist { g.op.mul(&gamma_op) } else { g.op.clone() };
            basis.push(Generator {
                name: format!("{}_{}", g.name, a),
                degree: a.clone(),
                scale_exp: g.scale_exp,
                op: tensor(&coarse, &fine).with_degree(a.clone()),
            });
        }
    }
    Ok(GradedModel {
        kind: ModelKind::Cl2nm2,
        n,
        algebra: r.name.clone(),
        dim: (1 << m) * r.dim(),
        basis,
    })
}

/// Lift through Cl(2n): X_a = i^floor(w/2) * prod_{j in supp(a)} gamma_j (x) X_|a|
/// with w the support size. No involution needed.
pub fn build_cl2n<S: Scalar>(
    r: &SuperRealization<S>,
    n: usize,
) -> Result<GradedModel<S>, GradedError> {
    if n < 2 {
        return Err(GradedError::BadRank(n));
    }
    let mut basis = Vec::new();
    for a in DegreeVector::enumerate(n) {
        let indices: Vec<usize> = (1..=n).filter(|&j| a.bit(j - 1) == 1).collect();
        let phase = S::i_pow((indices.len() / 2) as i64);
        let coarse = lifted_gamma_product::<S>(n, &indices).scale(&phase);
        let gens = if a.parity() == 0 { &r.even } else { &r.odd };
        for g in gens {
            basis.push(Generator {
                name: format!("{}_{}", g.name, a),
                degree: a.clone(),
                scale_exp: g.scale_exp,
                op: tensor(&coarse, &g.op).with_degree(a.clone()),
            });
        }
    }
    Ok(GradedModel {
        kind: ModelKind::Cl2n,
        n,
        algebra: r.name.clone(),
        dim: (1 << n) * r.dim(),
        basis,
    })
}

/// The fixed ordering of the parity-odd degree vectors of Z2^3 that indexes
/// the Cl(2^n-2) construction at n=3.
pub fn greek_degrees() -> [DegreeVector; 4] {
    [
        DegreeVector::new(vec![1, 1, 1]),
        DegreeVector::new(vec![1, 0, 0]),
        DegreeVector::new(vec![0, 1, 0]),
        DegreeVector::new(vec![0, 0, 1]),
    ]
}

fn cl6b_gamma<S: Scalar>(mu: usize) -> ConstMatrix<S> {
    if mu == 0 {
        ConstMatrix::identity(8)
    } else {
        lift_gamma(3, mu)
    }
}

fn greek_suffix(indices: &[usize]) -> String {
    indices.iter().map(|i| i.to_string()).collect()
}

/// The Cl(6) construction with Greek indices 0..3 (gamma_0 = identity):
/// scalar X from X_0; X_mu from X_1; X_munu (mu<nu) with phase
/// i^(1-a_mu.a_nu) from X_0; X_munurho with phase i from X_1; X_0123 with
/// phase i from X_0. Degrees are sums of the indexed odd degree vectors.
pub fn build_cl6b<S: Scalar>(r: &SuperRealization<S>) -> GradedModel<S> {
    let degs = greek_degrees();
    let mut basis: Vec<Generator<S>> = Vec::new();

    let push = |indices: &[usize], basis: &mut Vec<Generator<S>>| {
        let degree = indices
            .iter()
            .fold(DegreeVector::zero(3), |acc, &mu| acc.add(&degs[mu]));
        let phase_exp: i64 = match indices.len() {
            0 | 1 => 0,
            2 => 1 - degs[indices[0]].dot(&degs[indices[1]]) as i64,
            _ => 1,
        };
        let mut coarse = ConstMatrix::<S>::identity(8);
        for &mu in indices {
            coarse = &coarse * &cl6b_gamma::<S>(mu);
        }
        coarse = coarse.scale(&S::i_pow(phase_exp));
        let gens = if indices.len().is_multiple_of(2) { &r.even } else { &r.odd };
        for g in gens {
            let name = if indices.is_empty() {
                g.name.clone()
            } else {
                format!("{}_{}", g.name, greek_suffix(indices))
            };
            basis.push(Generator {
                name,
                degree: degree.clone(),
                scale_exp: g.scale_exp,
                op: tensor(&coarse, &g.op).with_degree(degree.clone()),
            });
        }
    };

    push(&[], &mut basis);
    for mu in 0..4 {
        push(&[mu], &mut basis);
    }
    for mu in 0..4 {
        for nu in mu + 1..4 {
            push(&[mu, nu], &mut basis);
        }
    }
    for mu in 0..4 {
        for nu in mu + 1..4 {
            for rho in nu + 1..4 {
                push(&[mu, nu, rho], &mut basis);
            }
        }
    }
    push(&[0, 1, 2, 3], &mut basis);

    GradedModel {
        kind: ModelKind::Cl6b,
        n: 3,
        algebra: r.name.clone(),
        dim: 8 * r.dim(),
        basis,
    }
}

/// Implicit phase exponent (power of i) of a Greek-indexed symbol by arity:
/// none for 0 or 1 index, 1 - a_mu.a_nu for a pair, 1 for three or four.
fn greek_symbol_phase(indices: &[usize], degs: &[DegreeVector; 4]) -> i64 {
    match indices.len() {
        0 | 1 => 0,
        2 => 1 - degs[indices[0]].dot(&degs[indices[1]]) as i64,
        3 | 4 => 1,
        len => panic!("Greek symbols carry at most four indices (got {})", len),
    }
}

/// Rewrite a Greek-indexed symbol with repeated or unordered indices into
/// the canonical (strictly increasing) one: returns the canonical index
/// list and the exact scalar with `W_input = factor * W_canonical`.
///
/// Each adjacent transposition of distinct indices contributes
/// (-1)^(1 - a_mu.a_nu); an adjacent equal pair drops out (the gamma
/// matrices square to the identity); the implicit arity phases of input
/// and output are balanced by a power of i. This is the general form of
/// the printed conversion table, which assumes its repeated index has
/// nonzero label; the transposition rule applied literally gives a wrong
/// sign when index 0 (degree (1,1,1)) is involved, so the factor is always
/// recomputed from the degree vectors here.
pub fn normalize_indices<S: Scalar>(
    indices: &[usize],
    degs: &[DegreeVector; 4],
) -> Result<(Vec<usize>, S), GradedError> {
    for &ix in indices {
        if ix > 3 {
            return Err(GradedError::BadGreekIndex(ix));
        }
    }
    assert!(indices.len() <= 4, "Greek symbols carry at most four indices");
    let p_in = greek_symbol_phase(indices, degs);
    let mut idx = indices.to_vec();
    let mut sign = 1i64;
    for _ in 0..idx.len() {
        for t in 0..idx.len().saturating_sub(1) {
            if idx[t] > idx[t + 1] {
                sign *= if degs[idx[t]].dot(&degs[idx[t + 1]]) == 0 { -1 } else { 1 };
                idx.swap(t, t + 1);
            }
        }
    }
    let mut canon = Vec::new();
    let mut i = 0;
    while i < idx.len() {
        if i + 1 < idx.len() && idx[i] == idx[i + 1] {
            i += 2;
        } else {
            canon.push(idx[i]);
            i += 1;
        }
    }
    let p_out = greek_symbol_phase(&canon, degs);
    let factor = S::from_int(sign) * S::i_pow(p_in - p_out);
    Ok((canon, factor))
}

/// Exact bracket table: for each ordered basis pair (i,j), the nonzero
/// coefficients of ⟦basis_i, basis_j⟧ over the degree-slice basis, in the
/// internal normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTable<S> {
    coefficients: BTreeMap<(usize, usize), Vec<(usize, S)>>,
}

impl<S: Scalar> BracketTable<S> {
    pub fn get(&self, i: usize, j: usize) -> &[(usize, S)] {
        self.coefficients
            .get(&(i, j))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<(usize, S)>)> {
        self.coefficients.iter()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct JacobiReport {
    /// Distinct unordered triples actually evaluated.
    pub triples_checked: usize,
    /// Ordered triples covered through graded antisymmetry.
    pub ordered_triples_covered: u64,
    pub violations: Vec<[String; 3]>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HermiticityReport {
    pub checks: Vec<NamedCheck>,
    pub pass: bool,
}

fn kind_for(dot: u8) -> BracketKind {
    if dot == 0 {
        BracketKind::Commutator
    } else {
        BracketKind::Anticommutator
    }
}

impl<S: Scalar> GradedModel<S> {
    pub fn index_of(&self, name: &str) -> Result<usize, GradedError> {
        self.basis
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| GradedError::MissingGenerator(name.to_string()))
    }

    pub fn generator(&self, name: &str) -> Result<&Generator<S>, GradedError> {
        Ok(&self.basis[self.index_of(name)?])
    }

    /// Indices of basis elements at the given degree, in basis order.
    pub fn degree_slice(&self, degree: &DegreeVector) -> Vec<usize> {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, g)| &g.degree == degree)
            .map(|(i, _)| i)
            .collect()
    }

    /// The graded bracket of basis elements i and j: commutator when the
    /// degree pairing vanishes, anticommutator when it is one.
    pub fn graded_bracket(&self, i: usize, j: usize) -> MatrixOp<S> {
        let dot = self.basis[i].degree.dot(&self.basis[j].degree);
        self.basis[i].op.bracket(&self.basis[j].op, kind_for(dot))
    }

    pub fn bracket_kind(&self, i: usize, j: usize) -> BracketKind {
        kind_for(self.basis[i].degree.dot(&self.basis[j].degree))
    }

    /// Convert an internal coefficient of basis_k inside ⟦basis_i, basis_j⟧
    /// to the reference normalization: divide by
    /// 2^((scale_i + scale_j - scale_k)/2).
    pub fn reference_coefficient(&self, i: usize, j: usize, k: usize, internal: &S) -> S {
        let e = self.basis[i].scale_exp + self.basis[j].scale_exp - self.basis[k].scale_exp;
        assert!(e % 2 == 0, "scale exponents must balance to an even power");
        internal.clone() * S::pow2(-e / 2)
    }

    /// For every ordered pair, compute the graded bracket and decompose it
    /// exactly inside the degree-(d_i + d_j) slice. Fails on the first pair
    /// (in basis order) whose bracket leaves its slice.
    pub fn verify_closure(&self) -> Result<BracketTable<S>, GradedError> {
        let mut slices: HashMap<DegreeVector, Vec<usize>> = HashMap::new();
        for (k, g) in self.basis.iter().enumerate() {
            slices.entry(g.degree.clone()).or_default().push(k);
        }
        let count = self.basis.len();
        let pairs: Vec<(usize, usize)> = (0..count)
            .flat_map(|i| (0..count).map(move |j| (i, j)))
            .collect();
        let computed: Vec<Result<Vec<(usize, S)>, GradedError>> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let bracket = self.graded_bracket(i, j);
                let target = self.basis[i].degree.add(&self.basis[j].degree);
                let slice = slices.get(&target).map(Vec::as_slice).unwrap_or(&[]);
                let basis_ops: Vec<&MatrixOp<S>> =
                    slice.iter().map(|&k| &self.basis[k].op).collect();
                match decompose(&bracket, &basis_ops) {
                    Ok(coeffs) => Ok(slice
                        .iter()
                        .zip(coeffs)
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(&k, c)| (k, c))
                        .collect()),
                    Err(err) => Err(GradedError::ClosureViolation {
                        left: self.basis[i].name.clone(),
                        right: self.basis[j].name.clone(),
                        residual: err.residual.to_string(),
                    }),
                }
            })
            .collect();
        let mut coefficients = BTreeMap::new();
        for (pair, result) in pairs.into_iter().zip(computed) {
            coefficients.insert(pair, result?);
        }
        Ok(BracketTable { coefficients })
    }

    fn jacobi_sum(&self, pair: &[Vec<MatrixOp<S>>], i: usize, j: usize, k: usize) -> MatrixOp<S> {
        let term = |x: usize, y: usize, z: usize| {
            let dx = &self.basis[x].degree;
            let inner = &pair[y][z];
            let outer_kind = kind_for(dx.dot(&self.basis[y].degree.add(&self.basis[z].degree)));
            let sign = if dx.dot(&self.basis[z].degree) == 1 { -1 } else { 1 };
            self.basis[x]
                .op
                .bracket(inner, outer_kind)
                .scale(&S::from_int(sign))
        };
        term(i, j, k).add(&term(j, k, i)).add(&term(k, i, j))
    }

    /// Graded Jacobi sweep over all unordered triples (repetitions
    /// included); ordered triples follow by graded antisymmetry.
    pub fn verify_jacobi(&self) -> JacobiReport {
        let count = self.basis.len();
        let pair: Vec<Vec<MatrixOp<S>>> = (0..count)
            .into_par_iter()
            .map(|i| (0..count).map(|j| self.graded_bracket(i, j)).collect())
            .collect();
        let mut triples = Vec::new();
        for i in 0..count {
            for j in i..count {
                for k in j..count {
                    triples.push((i, j, k));
                }
            }
        }
        let violations: Vec<[String; 3]> = triples
            .par_iter()
            .filter_map(|&(i, j, k)| {
                if self.jacobi_sum(&pair, i, j, k).is_zero() {
                    None
                } else {
                    Some([
                        self.basis[i].name.clone(),
                        self.basis[j].name.clone(),
                        self.basis[k].name.clone(),
                    ])
                }
            })
            .collect();
        JacobiReport {
            triples_checked: triples.len(),
            ordered_triples_covered: (count as u64).pow(3),
            pass: violations.is_empty(),
            violations,
        }
    }

    pub fn verify_hermiticity(&self) -> HermiticityReport {
        let checks: Vec<NamedCheck> = self
            .basis
            .par_iter()
            .map(|g| NamedCheck {
                name: g.name.clone(),
                pass: g.op.is_hermitian(),
            })
            .collect();
        let pass = checks.iter().all(|c| c.pass);
        HermiticityReport { checks, pass }
    }

    /// Connected components of the index-coupling graph: an edge joins the
    /// row and column of every nonzero generator entry. More than one
    /// component witnesses reducibility into coordinate subspaces.
    pub fn coupling_graph(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.dim).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for g in &self.basis {
            for (r, c) in g.op.support() {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..self.dim {
            let root = find(&mut parent, x);
            groups.entry(root).or_default().push(x);
        }
        groups.into_values().collect()
    }

    fn propagate_degrees(
        &self,
        assigned: &mut [Option<DegreeVector>],
        seed: usize,
        seed_degree: DegreeVector,
    ) -> Result<(), GradedError> {
        let mut adjacency: Vec<Vec<(usize, DegreeVector)>> = vec![Vec::new(); self.dim];
        for g in &self.basis {
            for (r, c) in g.op.support() {
                adjacency[r].push((c, g.degree.clone()));
                adjacency[c].push((r, g.degree.clone()));
            }
        }
        assigned[seed] = Some(seed_degree);
        let mut queue = VecDeque::from([seed]);
        while let Some(u) = queue.pop_front() {
            let du = assigned[u].clone().expect("queued index is assigned");
            for (v, d) in &adjacency[u] {
                let want = du.add(d);
                match &assigned[*v] {
                    None => {
                        assigned[*v] = Some(want);
                        queue.push_back(*v);
                    }
                    Some(have) if *have != want => {
                        return Err(GradedError::InconsistentGrading(format!(
                            "component {} would need degree {} and degree {}",
                            v, have, want
                        )));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Breadth-first degree propagation from a seeded component: crossing
    /// an edge contributed by a generator of degree d adds d. Components
    /// unreachable from the seed stay unassigned.
    pub fn assign_component_degrees(
        &self,
        seed: usize,
        seed_degree: DegreeVector,
    ) -> Result<Vec<Option<DegreeVector>>, GradedError> {
        let mut assigned = vec![None; self.dim];
        self.propagate_degrees(&mut assigned, seed, seed_degree)?;
        Ok(assigned)
    }

    /// Degree assignment over every component, seeding each component's
    /// smallest index with the zero degree.
    pub fn assign_all_component_degrees(&self) -> Result<Vec<DegreeVector>, GradedError> {
        let mut assigned = vec![None; self.dim];
        while let Some(seed) = assigned.iter().position(Option::is_none) {
            self.propagate_degrees(&mut assigned, seed, DegreeVector::zero(self.n))?;
        }
        Ok(assigned.into_iter().map(Option::unwrap).collect())
    }
}

/// The three four-index structure constant families of the Cl(6)
/// construction, extracted from the verified bracket table.
#[derive(Clone, Debug, PartialEq)]
pub struct Cl6bConstants {
    pub f: BTreeMap<[usize; 4], i64>,
    pub g: BTreeMap<[usize; 4], i64>,
    pub h: BTreeMap<[usize; 4], i64>,
}

fn as_small_int<S: Scalar>(value: &S) -> Option<i64> {
    (-8..=8).find(|&v| *value == S::from_int(v))
}

fn single_term<'a, S: Scalar>(
    model: &'a GradedModel<S>,
    table: &'a BracketTable<S>,
    i: usize,
    j: usize,
    prefix: &str,
) -> Result<(&'a str, &'a S), GradedError> {
    let terms = table.get(i, j);
    if terms.len() != 1 {
        return Err(GradedError::StructureExtraction(format!(
            "bracket of {} and {} should hit exactly one generator, found {}",
            model.basis[i].name,
            model.basis[j].name,
            terms.len()
        )));
    }
    let (k, coeff) = &terms[0];
    let name = model.basis[*k].name.as_str();
    if !name.starts_with(prefix) {
        return Err(GradedError::StructureExtraction(format!(
            "bracket of {} and {} lands on {} instead of a {}* generator",
            model.basis[i].name, model.basis[j].name, name, prefix
        )));
    }
    Ok((name, coeff))
}

fn suffix_indices(name: &str) -> Result<Vec<usize>, GradedError> {
    let (_, suffix) = name
        .split_once('_')
        .ok_or_else(|| GradedError::StructureExtraction(format!("{} has no index suffix", name)))?;
    suffix
        .chars()
        .map(|c| {
            c.to_digit(10)
                .map(|d| d as usize)
                .filter(|&d| d < 4)
                .ok_or_else(|| {
                    GradedError::StructureExtraction(format!("{} has a non-Greek suffix", name))
                })
        })
        .collect()
}

fn extract_value<S: Scalar>(coeff: &S, multiplier: S, context: &str) -> Result<i64, GradedError> {
    let value = coeff.clone() * multiplier;
    as_small_int(&value).ok_or_else(|| {
        GradedError::StructureExtraction(format!(
            "{} coefficient {} is not a small integer",
            context, value
        ))
    })
}

/// Read the f/g/h structure constants out of a verified Cl(6) bracket
/// table, using the scalar-degree generator with the [D,K] = iK relation
/// pattern: f from ⟦D_0123, Q_mu⟧ (single-index odd), g from
/// ⟦D_0123, K_munu⟧ cross-checked against ⟦H_0123, K_munu⟧, and h from
/// ⟦D_0123, Q_munurho⟧.
pub fn extract_cl6b_constants<S: Scalar>(
    model: &GradedModel<S>,
    table: &BracketTable<S>,
) -> Result<Cl6bConstants, GradedError> {
    let d_quad = model.index_of("D_0123")?;
    let h_quad = model.index_of("H_0123")?;
    let two_i = S::i_pow(1) * S::from_int(2);
    let minus_i = S::i_pow(3);
    // 1/(2i) = -i/2
    let half_minus_i = S::i_pow(3) * S::from_ratio(1, 2);

    let mut f = BTreeMap::new();
    for mu in 0..4 {
        let qi = model.index_of(&format!("Q_{}", mu))?;
        let (name, coeff) = single_term(model, table, d_quad, qi, "Q_")?;
        let out = suffix_indices(name)?;
        let value = extract_value(coeff, two_i.clone(), "f")?;
        f.insert([mu, out[0], out[1], out[2]], value);
    }

    let mut g = BTreeMap::new();
    for mu in 0..4 {
        for nu in mu + 1..4 {
            let kij = model.index_of(&format!("K_{}{}", mu, nu))?;
            let (name, coeff) = single_term(model, table, d_quad, kij, "K_")?;
            let out = suffix_indices(name)?;
            let value = extract_value(coeff, minus_i.clone(), "g")?;
            let (dname, dcoeff) = single_term(model, table, h_quad, kij, "D_")?;
            let cross = extract_value(dcoeff, half_minus_i.clone(), "g cross-check")?;
            if suffix_indices(dname)? != out || cross != value {
                return Err(GradedError::StructureExtraction(format!(
                    "g[{}{}] disagrees between the two extraction routes",
                    mu, nu
                )));
            }
            g.insert([mu, nu, out[0], out[1]], value);
        }
    }

    let mut h = BTreeMap::new();
    for mu in 0..4 {
        for nu in mu + 1..4 {
            for rho in nu + 1..4 {
                let qi = model.index_of(&format!("Q_{}{}{}", mu, nu, rho))?;
                let (name, coeff) = single_term(model, table, d_quad, qi, "Q_")?;
                let out = suffix_indices(name)?;
                let value = extract_value(coeff, two_i.clone(), "h")?;
                h.insert([mu, nu, rho, out[0]], value);
            }
        }
    }

    Ok(Cl6bConstants { f, g, h })
}

#[cfg(test)]
mod degree_tests {
    use super::*;

    #[test]
    fn xor_addition_and_pairing() {
        let a = DegreeVector::new(vec![1, 0, 1]);
        let b = DegreeVector::new(vec![1, 1, 0]);
        assert_eq!(a.add(&b), DegreeVector::new(vec![0, 1, 1]));
        assert_eq!(a.dot(&b), 1);
        assert_eq!(a.dot(&a), 0);
        assert_eq!(a.parity(), 0);
        assert_eq!(DegreeVector::new(vec![1, 0, 0]).parity(), 1);
    }

    #[test]
    fn lexicographic_enumeration() {
        let all = DegreeVector::enumerate(2);
        let strs: Vec<String> = all.iter().map(|d| d.to_string()).collect();
        assert_eq!(strs, ["00", "01", "10", "11"]);
    }

    #[test]
    fn parse_roundtrip() {
        let d = DegreeVector::parse("0110").unwrap();
        assert_eq!(d.to_string(), "0110");
        assert!(DegreeVector::parse("01x").is_none());
    }
}
