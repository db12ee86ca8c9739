//! Exact spectrum of the graded oscillator models at a numeric coupling:
//! wavefunctions are finite sums c·x^q·e^(-x^2/2) per Hilbert-space
//! component with rational exponents, so every operator action, eigenvalue,
//! and degeneracy rank is computed exactly.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;

use num::traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graded::DegreeVector;
use crate::linalg::{nullspace, Echelon};
use crate::scalars::{GaussianRational, Rational, Scalar};
use crate::scqm::{LadderSet, ScqmError};
use crate::weylops::MatrixOp;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("no normalizable ground-state branch at coupling {0}")]
    NoNormalizableSolution(Rational),
    #[error("ground-state analysis requires coupling > 1 (got {0})")]
    CouplingOutOfRange(Rational),
    #[error("state is not an eigenvector of the mode counter; residual: {0}")]
    NotEigen(String),
    #[error("degree bookkeeping rejects the comparison: {0}")]
    DegreeMismatch(String),
    #[error("states are not proportional: left = {left}; right = {right}")]
    NotProportional { left: String, right: String },
    #[error("unknown ladder label {0:?}")]
    UnknownLabel(String),
    #[error("level-raising by L+ left the creator-generated span at level {0}")]
    RaisingOutsideSpan(usize),
    #[error(transparent)]
    Scqm(#[from] ScqmError),
}

/// Wavefunction vector: per component a finite sum of c·x^q terms with
/// rational exponents q, all carrying an implicit global factor
/// e^(-x^2/2). Closed under every operator of the models because
/// d/dx (x^q e^(-x^2/2)) = (q x^(q-1) - x^(q+1)) e^(-x^2/2).
#[derive(Clone, Debug, PartialEq)]
pub struct WaveVector {
    components: Vec<BTreeMap<Rational, GaussianRational>>,
}

impl WaveVector {
    pub fn zero(ncomp: usize) -> Self {
        WaveVector { components: vec![BTreeMap::new(); ncomp] }
    }

    /// c·x^q on a single component.
    pub fn monomial(ncomp: usize, comp: usize, q: Rational, c: GaussianRational) -> Self {
        let mut out = Self::zero(ncomp);
        out.add_term(comp, q, c);
        out
    }

    pub fn ncomp(&self) -> usize {
        self.components.len()
    }

    pub fn add_term(&mut self, comp: usize, q: Rational, c: GaussianRational) {
        accumulate(&mut self.components[comp], q, c);
    }

    pub fn coeff(&self, comp: usize, q: &Rational) -> GaussianRational {
        self.components[comp].get(q).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(BTreeMap::is_empty)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncomp(), rhs.ncomp(), "component count mismatch");
        let mut out = self.clone();
        for (comp, terms) in rhs.components.iter().enumerate() {
            for (q, c) in terms {
                out.add_term(comp, q.clone(), c.clone());
            }
        }
        out
    }

    pub fn scale(&self, s: &GaussianRational) -> Self {
        let mut out = Self::zero(self.ncomp());
        for (comp, terms) in self.components.iter().enumerate() {
            for (q, c) in terms {
                out.add_term(comp, q.clone(), c.clone() * s.clone());
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&GaussianRational::from_int(-1)))
    }

    /// All (component, exponent) atoms, sorted.
    pub fn atoms(&self) -> Vec<(usize, Rational)> {
        let mut out = Vec::new();
        for (comp, terms) in self.components.iter().enumerate() {
            for q in terms.keys() {
                out.push((comp, q.clone()));
            }
        }
        out
    }

    /// Components carrying at least one term, sorted.
    pub fn support_components(&self) -> Vec<usize> {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_empty())
            .map(|(i, _)| i)
            .collect()
    }

    fn coordinates(&self, atoms: &[(usize, Rational)]) -> Vec<GaussianRational> {
        atoms.iter().map(|(comp, q)| self.coeff(*comp, q)).collect()
    }

    /// First atom (in sorted order) with a nonzero coefficient.
    fn leading_atom(&self) -> Option<(usize, Rational)> {
        self.atoms().into_iter().next()
    }
}

impl fmt::Display for WaveVector {
    /// Rendered per component as `(coefficient) x^(q)` sums; the global
    /// e^(-x^2/2) factor is implicit.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (comp, terms) in self.components.iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            let body: Vec<String> =
                terms.iter().map(|(q, c)| format!("({}) x^({})", c, q)).collect();
            parts.push(format!("c{}: {}", comp, body.join(" + ")));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("; "))
        }
    }
}

/// Add c·x^q into a term map, dropping exact cancellations so zero stays
/// structural.
fn accumulate(map: &mut BTreeMap<Rational, GaussianRational>, q: Rational, c: GaussianRational) {
    if c.is_zero() {
        return;
    }
    match map.entry(q) {
        Entry::Vacant(slot) => {
            slot.insert(c);
        }
        Entry::Occupied(mut slot) => {
            let sum = slot.get().clone() + c;
            if sum.is_zero() {
                slot.remove();
            } else {
                *slot.get_mut() = sum;
            }
        }
    }
}

/// Exact action of a matrix differential operator on a wave vector, using
/// d(x^q e^(-x^2/2)) = (q x^(q-1) - x^(q+1)) e^(-x^2/2) and exponent
/// shifts for powers of x.
pub fn apply(op: &MatrixOp<GaussianRational>, psi: &WaveVector) -> WaveVector {
    assert_eq!(op.dim(), psi.ncomp(), "operator/state dimension mismatch");
    let mut out = WaveVector::zero(psi.ncomp());
    for r in 0..op.dim() {
        for c in 0..op.dim() {
            let entry = op.entry(r, c);
            if entry.is_zero() || psi.components[c].is_empty() {
                continue;
            }
            for (&(m, k), coeff) in entry.terms() {
                // start from component c, differentiate k times, then shift by m
                let mut terms: BTreeMap<Rational, GaussianRational> =
                    psi.components[c].clone();
                for _ in 0..k {
                    let mut next: BTreeMap<Rational, GaussianRational> = BTreeMap::new();
                    for (q, cq) in &terms {
                        accumulate(
                            &mut next,
                            q.clone() - Rational::one(),
                            cq.clone() * GaussianRational::from_rational(q.clone()),
                        );
                        accumulate(&mut next, q.clone() + Rational::one(), -cq.clone());
                    }
                    terms = next;
                }
                let shift = Rational::from_integer(m.into());
                for (q, cq) in terms {
                    out.add_term(r, q + shift.clone(), cq * coeff.clone());
                }
            }
        }
    }
    out
}

/// Outcome of an exact eigenvalue test.
#[derive(Clone, Debug, PartialEq)]
pub enum EigenOutcome {
    Eigen(Rational),
    NotEigen { residual: WaveVector },
}

/// Apply `op` and test whether the state is an exact eigenvector with a
/// rational eigenvalue.
pub fn eigen_check(op: &MatrixOp<GaussianRational>, psi: &WaveVector) -> EigenOutcome {
    assert!(!psi.is_zero(), "eigen test needs a nonzero state");
    let image = apply(op, psi);
    let (comp, q) = psi.leading_atom().expect("nonzero state has a leading atom");
    let lambda = image
        .coeff(comp, &q)
        .try_exact_div(&psi.coeff(comp, &q))
        .expect("leading coefficient is nonzero");
    if !lambda.is_real() {
        return EigenOutcome::NotEigen { residual: image };
    }
    let residual = image.sub(&psi.scale(&lambda));
    if residual.is_zero() {
        EigenOutcome::Eigen(lambda.re().clone())
    } else {
        EigenOutcome::NotEigen { residual }
    }
}

/// One ground-state ansatz branch: every component proportional to
/// x^(exponent) e^(-x^2/2), intersected over the kernels of all
/// annihilators.
#[derive(Clone, Debug)]
pub struct GroundBranch {
    /// "+" for exponent +beta, "-" for -beta.
    pub label: String,
    pub exponent: Rational,
    /// Half-line square-integrability of x^q e^(-x^2/2): 2q > -1.
    pub normalizable: bool,
    pub states: Vec<WaveVector>,
    /// Mode-counter eigenvalue of the branch states, when any exist.
    pub energy: Option<Rational>,
}

/// Solve a_w Psi = 0 for all annihilators simultaneously on the uniform
/// ansatz x^(±beta) per component; both branches are returned unfiltered
/// (the non-normalizable one still solves the equations formally).
pub fn ground_state_branches(
    ladder: &LadderSet<GaussianRational>,
    beta: &Rational,
) -> Vec<GroundBranch> {
    let dim = ladder.r0.dim();
    let half = Rational::new((-1).into(), 2.into());
    let mut out = Vec::new();
    for (label, exponent) in [("+", beta.clone()), ("-", -beta.clone())] {
        let units: Vec<WaveVector> = (0..dim)
            .map(|j| WaveVector::monomial(dim, j, exponent.clone(), GaussianRational::one()))
            .collect();
        let mut rows = Vec::new();
        for pair in &ladder.pairs {
            let images: Vec<WaveVector> =
                units.iter().map(|u| apply(&pair.annihilator, u)).collect();
            let mut atoms: BTreeSet<(usize, Rational)> = BTreeSet::new();
            for image in &images {
                atoms.extend(image.atoms());
            }
            let atoms: Vec<(usize, Rational)> = atoms.into_iter().collect();
            for (comp, q) in &atoms {
                rows.push(
                    images
                        .iter()
                        .map(|img| img.coeff(*comp, q))
                        .collect::<Vec<GaussianRational>>(),
                );
            }
        }
        let kernel = nullspace(&rows, dim);
        let states: Vec<WaveVector> = kernel
            .iter()
            .map(|coeffs| {
                let mut psi = WaveVector::zero(dim);
                for (j, c) in coeffs.iter().enumerate() {
                    psi.add_term(j, exponent.clone(), c.clone());
                }
                psi
            })
            .collect();
        let energy = states.first().map(|psi| match eigen_check(&ladder.r0, psi) {
            EigenOutcome::Eigen(e) => e,
            EigenOutcome::NotEigen { residual } => {
                panic!("branch states must be mode-counter eigenvectors; residual {}", residual)
            }
        });
        out.push(GroundBranch {
            label: label.to_string(),
            normalizable: exponent > half,
            exponent,
            states,
            energy,
        });
    }
    out
}

/// The physical ground space: the unique normalizable branch for
/// coupling > 1.
pub fn ground_states(
    ladder: &LadderSet<GaussianRational>,
    beta: &Rational,
) -> Result<GroundBranch, SpectrumError> {
    if *beta <= Rational::one() {
        return Err(SpectrumError::CouplingOutOfRange(beta.clone()));
    }
    ground_state_branches(ladder, beta)
        .into_iter()
        .find(|b| b.normalizable && !b.states.is_empty())
        .ok_or_else(|| SpectrumError::NoNormalizableSolution(beta.clone()))
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    pub energy: String,
    pub degeneracy: usize,
    pub witnesses: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub beta: String,
    pub branch: String,
    pub levels: Vec<LevelReport>,
}

fn atom_index(states: &[WaveVector]) -> Vec<(usize, Rational)> {
    let mut atoms: BTreeSet<(usize, Rational)> = BTreeSet::new();
    for s in states {
        atoms.extend(s.atoms());
    }
    atoms.into_iter().collect()
}

/// Generate levels 0..=nmax by repeated application of the creation
/// operators, with exact degeneracy ranks. Each independent new state is
/// eigen-checked at energy E0 + level, and the redundancy of L+ (its
/// image on the ground space already lies in the two-creator span) is
/// verified when nmax >= 2.
pub fn excited_levels(
    ladder: &LadderSet<GaussianRational>,
    beta: &Rational,
    nmax: usize,
) -> Result<SpectrumReport, SpectrumError> {
    let ground = ground_states(ladder, beta)?;
    let e0 = ground
        .energy
        .clone()
        .expect("normalizable branch with states carries an energy");
    let mut level_bases: Vec<Vec<WaveVector>> = vec![ground.states.clone()];

    for level in 1..=nmax {
        let prev = &level_bases[level - 1];
        let mut candidates = Vec::new();
        for pair in &ladder.pairs {
            for psi in prev {
                let raised = apply(&pair.creator, psi);
                if !raised.is_zero() {
                    candidates.push(raised);
                }
            }
        }
        let atoms = atom_index(&candidates);
        let mut echelon = Echelon::<GaussianRational>::new(atoms.len());
        let mut basis = Vec::new();
        let want = e0.clone() + Rational::from_integer(level.into());
        for cand in candidates {
            if echelon.insert(cand.coordinates(&atoms)) {
                match eigen_check(&ladder.r0, &cand) {
                    EigenOutcome::Eigen(e) if e == want => {}
                    EigenOutcome::Eigen(e) => {
                        return Err(SpectrumError::NotEigen(format!(
                            "level {} state has energy {} instead of {}",
                            level, e, want
                        )));
                    }
                    EigenOutcome::NotEigen { residual } => {
                        return Err(SpectrumError::NotEigen(residual.to_string()));
                    }
                }
                basis.push(cand);
            }
        }
        level_bases.push(basis);
    }

    if nmax >= 2 {
        let two_up = &level_bases[2];
        let mut probe: Vec<WaveVector> = two_up.clone();
        let raised: Vec<WaveVector> = ground
            .states
            .iter()
            .map(|psi| apply(&ladder.lplus, psi))
            .collect();
        probe.extend(raised.iter().cloned());
        let atoms = atom_index(&probe);
        let mut echelon = Echelon::<GaussianRational>::new(atoms.len());
        for state in two_up {
            echelon.insert(state.coordinates(&atoms));
        }
        for image in &raised {
            if !image.is_zero() && !echelon.contains(image.coordinates(&atoms)) {
                return Err(SpectrumError::RaisingOutsideSpan(2));
            }
        }
    }

    let levels: Vec<LevelReport> = level_bases
        .iter()
        .enumerate()
        .map(|(k, basis)| LevelReport {
            energy: (e0.clone() + Rational::from_integer(k.into())).to_string(),
            degeneracy: basis.len(),
            witnesses: basis.iter().map(WaveVector::to_string).collect(),
        })
        .collect();
    Ok(SpectrumReport {
        beta: beta.to_string(),
        branch: ground.label.clone(),
        levels,
    })
}

/// Whether a ladder operator acts by annihilation or creation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpSide {
    Annihilate,
    Create,
}

/// Outcome of a proportionality comparison.
#[derive(Clone, Debug, PartialEq)]
pub enum Proportionality {
    /// left = ratio * right with right nonzero.
    Ratio(GaussianRational),
    /// Both images vanish, so they agree trivially.
    BothZero,
}

/// The common degree of all components supporting the state, under the
/// given per-component grading.
pub fn wave_degree(
    grading: &[DegreeVector],
    psi: &WaveVector,
) -> Result<DegreeVector, SpectrumError> {
    let comps = psi.support_components();
    let first = comps
        .first()
        .ok_or_else(|| SpectrumError::DegreeMismatch("zero state has no degree".to_string()))?;
    let degree = grading[*first].clone();
    for c in &comps {
        if grading[*c] != degree {
            return Err(SpectrumError::DegreeMismatch(format!(
                "state mixes degrees {} and {}",
                degree, grading[*c]
            )));
        }
    }
    Ok(degree)
}

fn ladder_op<'l>(
    ladder: &'l LadderSet<GaussianRational>,
    side: OpSide,
    label: &str,
) -> Result<(&'l MatrixOp<GaussianRational>, &'l DegreeVector), SpectrumError> {
    let pair = ladder
        .pairs
        .iter()
        .find(|p| p.label == label)
        .ok_or_else(|| SpectrumError::UnknownLabel(label.to_string()))?;
    let op = match side {
        OpSide::Annihilate => &pair.annihilator,
        OpSide::Create => &pair.creator,
    };
    Ok((op, &pair.degree))
}

/// Compare op_c phi_a against op_d phi_b: both land in the same degree
/// sector (checked via the grading), and the exact ratio is returned when
/// they are proportional.
#[allow(clippy::too_many_arguments)]
pub fn proportionality_check(
    ladder: &LadderSet<GaussianRational>,
    grading: &[DegreeVector],
    side_c: OpSide,
    c_label: &str,
    phi_a: &WaveVector,
    side_d: OpSide,
    d_label: &str,
    phi_b: &WaveVector,
) -> Result<Proportionality, SpectrumError> {
    let (op_c, deg_c) = ladder_op(ladder, side_c, c_label)?;
    let (op_d, deg_d) = ladder_op(ladder, side_d, d_label)?;
    let target_a = wave_degree(grading, phi_a)?.add(deg_c);
    let target_b = wave_degree(grading, phi_b)?.add(deg_d);
    if target_a != target_b {
        return Err(SpectrumError::DegreeMismatch(format!(
            "images land in degree {} versus {}",
            target_a, target_b
        )));
    }
    let left = apply(op_c, phi_a);
    let right = apply(op_d, phi_b);
    match (left.is_zero(), right.is_zero()) {
        (true, true) => Ok(Proportionality::BothZero),
        (_, true) | (true, _) => Err(SpectrumError::NotProportional {
            left: left.to_string(),
            right: right.to_string(),
        }),
        (false, false) => {
            let (comp, q) = right.leading_atom().expect("nonzero");
            let ratio = left
                .coeff(comp, &q)
                .try_exact_div(&right.coeff(comp, &q))
                .expect("leading coefficient nonzero");
            if left.sub(&right.scale(&ratio)).is_zero() {
                Ok(Proportionality::Ratio(ratio))
            } else {
                Err(SpectrumError::NotProportional {
                    left: left.to_string(),
                    right: right.to_string(),
                })
            }
        }
    }
}
