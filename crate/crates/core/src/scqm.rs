//! The conformal supersymmetric oscillator on the half line: the
//! five-generator realization (two odd supercharges, Hamiltonian, dilation
//! and conformal generators), its defining-relation verification, the
//! graded extensions built from it, and the ladder operators used by the
//! spectrum analysis.
//!
//! Internally the odd generators absorb one factor of sqrt(2) each
//! (`scale_exp = 1`) so that every matrix entry stays inside the exact
//! coefficient ring; reported coefficients are converted back to the
//! reference normalization through `GradedModel::reference_coefficient`.

use serde::Serialize;
use thiserror::Error;

use crate::clifford::{pauli, ConstMatrix};
use crate::graded::{
    build_cl2n, build_cl2nm2, build_cl6b, DegreeVector, GammaConditionReport, GradedError,
    GradedModel, ModelKind, NamedCheck, NamedOp, SuperRealization,
};
use crate::scalars::{BetaPoly, GaussianRational, Rational, Scalar};
use crate::weylops::{tensor, BracketKind, DiffOp, MatrixOp};

#[derive(Debug, Error)]
pub enum ScqmError {
    #[error("unknown realization {0:?} (supported: osp12)")]
    UnknownAlgebra(String),
    #[error("construction {kind} is defined at rank 3 only (got rank {n})")]
    BadRankForKind { kind: ModelKind, n: usize },
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("odd generator {0} has no partner to form a ladder pair")]
    UnpairedOddGenerator(String),
}

/// The osp(1|2) oscillator realization with coupling kept formal:
/// supercharge Q and conformal supercharge S (odd, internally scaled by
/// sqrt(2)), Hamiltonian H, dilation D and conformal K (even), graded by
/// sigma_3.
pub fn build_osp12() -> SuperRealization<BetaPoly> {
    let i = BetaPoly::i_pow(1);
    let mi = BetaPoly::i_pow(3);
    let beta = BetaPoly::beta();
    let half = BetaPoly::from_ratio(1, 2);

    // Q = [[0, -i d + i beta/x], [-i d - i beta/x, 0]]
    let mut q = MatrixOp::zero(2);
    {
        let upper = q.entry_mut(0, 1);
        upper.add_term(0, 1, mi.clone());
        upper.add_term(-1, 0, i.clone() * beta.clone());
        let lower = q.entry_mut(1, 0);
        lower.add_term(0, 1, mi.clone());
        lower.add_term(-1, 0, mi.clone() * beta.clone());
    }

    // S = x sigma_1
    let mut s = MatrixOp::zero(2);
    *s.entry_mut(0, 1) = DiffOp::x_pow(1);
    *s.entry_mut(1, 0) = DiffOp::x_pow(1);

    // H = diag(-d^2/2 + (beta^2 + beta)/2 x^-2, -d^2/2 + (beta^2 - beta)/2 x^-2)
    let mut h = MatrixOp::zero(2);
    let beta_sq = beta.clone() * beta.clone();
    {
        let top = h.entry_mut(0, 0);
        top.add_term(0, 2, -half.clone());
        top.add_term(-2, 0, (beta_sq.clone() + beta.clone()) * half.clone());
        let bottom = h.entry_mut(1, 1);
        bottom.add_term(0, 2, -half.clone());
        bottom.add_term(-2, 0, (beta_sq - beta.clone()) * half.clone());
    }

    // D = (i/2) x d + i/4 on both components
    let mut d = MatrixOp::zero(2);
    for r in 0..2 {
        let entry = d.entry_mut(r, r);
        entry.add_term(1, 1, i.clone() * half.clone());
        entry.add_term(0, 0, BetaPoly::from_ratio(1, 4) * i.clone());
    }

    // K = x^2 / 2 on both components
    let mut k = MatrixOp::zero(2);
    for r in 0..2 {
        k.entry_mut(r, r).add_term(2, 0, half.clone());
    }

    SuperRealization {
        name: "osp12".to_string(),
        even: vec![
            NamedOp::new("H", h, 0),
            NamedOp::new("D", d, 0),
            NamedOp::new("K", k, 0),
        ],
        odd: vec![NamedOp::new("Q", q, 1), NamedOp::new("S", s, 1)],
        gamma: Some(pauli(3).expect("sigma_3 index").map(BetaPoly::from_gaussian)),
    }
}

pub fn build_realization(algebra: &str) -> Result<SuperRealization<BetaPoly>, ScqmError> {
    match algebra {
        "osp12" => Ok(build_osp12()),
        other => Err(ScqmError::UnknownAlgebra(other.to_string())),
    }
}

/// The defining internal bracket table of the realization: coefficients of
/// ⟦left, right⟧ over the generator basis. Missing pairs vanish.
fn internal_table(left: &str, right: &str) -> Vec<(&'static str, BetaPoly)> {
    let i = || BetaPoly::i_pow(1);
    let mi = || BetaPoly::i_pow(3);
    match (left, right) {
        ("H", "D") => vec![("H", i())],
        ("H", "K") => vec![("D", BetaPoly::from_int(2) * i())],
        ("H", "S") => vec![("Q", mi())],
        ("D", "H") => vec![("H", mi())],
        ("D", "K") => vec![("K", i())],
        ("D", "Q") => vec![("Q", BetaPoly::from_ratio(-1, 2) * i())],
        ("D", "S") => vec![("S", BetaPoly::from_ratio(1, 2) * i())],
        ("K", "H") => vec![("D", BetaPoly::from_int(-2) * i())],
        ("K", "D") => vec![("K", mi())],
        ("K", "Q") => vec![("S", i())],
        ("Q", "D") => vec![("Q", BetaPoly::from_ratio(1, 2) * i())],
        ("Q", "K") => vec![("S", mi())],
        ("Q", "Q") => vec![("H", BetaPoly::from_int(4))],
        ("Q", "S") | ("S", "Q") => vec![("D", BetaPoly::from_int(-4))],
        ("S", "H") => vec![("Q", i())],
        ("S", "D") => vec![("S", BetaPoly::from_ratio(-1, 2) * i())],
        ("S", "S") => vec![("K", BetaPoly::from_int(4))],
        _ => vec![],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub pass: bool,
    /// Rendered residual operator when the relation fails; `None` on pass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RealizationReport {
    pub relations: Vec<RelationCheck>,
    pub hermiticity: Vec<NamedCheck>,
    pub gamma: GammaConditionReport,
    pub pass: bool,
}

/// Verify every ordered bracket of the realization against its defining
/// table, Hermiticity of each generator, and the grading involution
/// conditions. Relation strings carry reference-normalized coefficients.
pub fn verify_realization(r: &SuperRealization<BetaPoly>) -> Result<RealizationReport, ScqmError> {
    let gens: Vec<(&NamedOp<BetaPoly>, bool)> = r
        .even
        .iter()
        .map(|g| (g, false))
        .chain(r.odd.iter().map(|g| (g, true)))
        .collect();
    let find = |name: &str| -> &NamedOp<BetaPoly> {
        gens.iter()
            .map(|(g, _)| *g)
            .find(|g| g.name == name)
            .expect("table names a realization generator")
    };

    let mut relations = Vec::new();
    for (gi, odd_i) in &gens {
        for (gj, odd_j) in &gens {
            let kind = if *odd_i && *odd_j {
                BracketKind::Anticommutator
            } else {
                BracketKind::Commutator
            };
            let bracket = gi.op.bracket(&gj.op, kind);
            let expected_terms = internal_table(&gi.name, &gj.name);
            let mut expected = MatrixOp::zero(r.dim());
            let mut rendered = Vec::new();
            for (name, coeff) in &expected_terms {
                let target = find(name);
                expected = expected.add(&target.op.scale(coeff));
                let shift = gi.scale_exp + gj.scale_exp - target.scale_exp;
                debug_assert!(shift % 2 == 0);
                let reference = coeff.clone() * BetaPoly::pow2(-shift / 2);
                rendered.push(format!("({}) {}", reference, name));
            }
            let rhs = if rendered.is_empty() { "0".to_string() } else { rendered.join(" + ") };
            let (open, close) = match kind {
                BracketKind::Commutator => ('[', ']'),
                BracketKind::Anticommutator => ('{', '}'),
            };
            let residual = bracket.sub(&expected);
            let pass = residual.is_zero();
            relations.push(RelationCheck {
                relation: format!("{}{}, {}{} = {}", open, gi.name, gj.name, close, rhs),
                pass,
                residual: if pass { None } else { Some(residual.to_string()) },
            });
        }
    }

    let hermiticity: Vec<NamedCheck> = gens
        .iter()
        .map(|(g, _)| NamedCheck { name: g.name.clone(), pass: g.op.is_hermitian() })
        .collect();
    let gamma = r.verify_gamma_condition()?;
    let pass = relations.iter().all(|c| c.pass)
        && hermiticity.iter().all(|c| c.pass)
        && gamma.pass;
    Ok(RealizationReport { relations, hermiticity, gamma, pass })
}

/// Build one of the graded oscillator extensions. The Greek-indexed
/// construction exists at rank 3 only.
pub fn build_graded_oscillator(
    kind: ModelKind,
    n: usize,
) -> Result<GradedModel<BetaPoly>, ScqmError> {
    let r = build_osp12();
    match kind {
        ModelKind::Cl2nm2 => Ok(build_cl2nm2(&r, n)?),
        ModelKind::Cl2n => Ok(build_cl2n(&r, n)?),
        ModelKind::Cl6b => {
            if n != 3 {
                return Err(ScqmError::BadRankForKind { kind, n });
            }
            Ok(build_cl6b(&r))
        }
    }
}

/// Substitute a numeric coupling into every generator.
pub fn eval_model(model: &GradedModel<BetaPoly>, beta: &Rational) -> GradedModel<GaussianRational> {
    GradedModel {
        kind: model.kind,
        n: model.n,
        algebra: model.algebra.clone(),
        dim: model.dim,
        basis: model
            .basis
            .iter()
            .map(|g| crate::graded::Generator {
                name: g.name.clone(),
                degree: g.degree.clone(),
                scale_exp: g.scale_exp,
                op: g.op.eval_beta(beta),
            })
            .collect(),
    }
}

/// One annihilation/creation pair a_w = S_w + i Q_w, a+_w = S_w - i Q_w,
/// labeled by the index suffix shared by the two odd generators.
#[derive(Clone, Debug)]
pub struct LadderPair<S> {
    pub label: String,
    pub degree: DegreeVector,
    pub annihilator: MatrixOp<S>,
    pub creator: MatrixOp<S>,
}

/// The ladder structure of a graded oscillator model: the total mode
/// counter R = H + K, the level raising/lowering operators
/// L± = (K - H)/2 ± i D, the fermion parity F, and one ladder pair per
/// odd index suffix.
#[derive(Clone, Debug)]
pub struct LadderSet<S> {
    pub r0: MatrixOp<S>,
    pub lplus: MatrixOp<S>,
    pub lminus: MatrixOp<S>,
    pub fermion: MatrixOp<S>,
    pub pairs: Vec<LadderPair<S>>,
}

fn scalar_generator<'m, S: Scalar>(
    model: &'m GradedModel<S>,
    base: &str,
) -> Result<&'m crate::graded::Generator<S>, GradedError> {
    if let Ok(ix) = model.index_of(base) {
        return Ok(&model.basis[ix]);
    }
    let suffixed = format!("{}_{}", base, "0".repeat(model.n));
    model.generator(&suffixed)
}

pub fn build_ladder<S: Scalar>(model: &GradedModel<S>) -> Result<LadderSet<S>, ScqmError> {
    let h = scalar_generator(model, "H")?.op.clone();
    let d = scalar_generator(model, "D")?.op.clone();
    let k = scalar_generator(model, "K")?.op.clone();
    let half = S::from_ratio(1, 2);
    let i = S::i_pow(1);
    let r0 = h.add(&k);
    let half_gap = k.sub(&h).scale(&half);
    let lplus = half_gap.add(&d.scale(&i));
    let lminus = half_gap.sub(&d.scale(&i));
    assert!(model.dim.is_multiple_of(2), "oscillator models have even dimension");
    let sigma3 = pauli(3).expect("sigma_3 index").map(S::from_gaussian);
    let fermion = tensor(
        &ConstMatrix::identity(model.dim / 2),
        &MatrixOp::from_const(&sigma3),
    );

    let mut pairs = Vec::new();
    for g in &model.basis {
        if let Some(suffix) = g.name.strip_prefix("Q_") {
            let partner = model
                .generator(&format!("S_{}", suffix))
                .map_err(|_| ScqmError::UnpairedOddGenerator(g.name.clone()))?;
            assert_eq!(partner.degree, g.degree, "ladder partners share a degree");
            pairs.push(LadderPair {
                label: suffix.to_string(),
                degree: g.degree.clone(),
                annihilator: partner.op.add(&g.op.scale(&i)),
                creator: partner.op.sub(&g.op.scale(&i)),
            });
        }
    }
    if pairs.is_empty() {
        return Err(ScqmError::UnpairedOddGenerator("Q_*".to_string()));
    }
    Ok(LadderSet { r0, lplus, lminus, fermion, pairs })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub pass: bool,
    /// Rendered residual operator when the identity fails; `None` on pass.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    /// Commentary on identities whose conventional statement varies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillatorReport {
    pub checks: Vec<IdentityCheck>,
    pub pass: bool,
}

/// Verify the ladder algebra of a graded oscillator model with the
/// coupling kept formal. Check names quote reference-normalized
/// coefficients; in particular the sign of [R, a+] and the coefficient 4
/// of {a+, a+} = 4 L+ are asserted as computed, which settles their easily
/// misstated values.
pub fn verify_oscillator(model: &GradedModel<BetaPoly>) -> Result<OscillatorReport, ScqmError> {
    let ladder = build_ladder(model)?;
    let dim = model.dim;
    let id = MatrixOp::<BetaPoly>::identity(dim);
    let beta = BetaPoly::beta();
    let two = BetaPoly::from_int(2);
    let four = BetaPoly::from_int(4);
    let eight = BetaPoly::from_int(8);
    // 1 - 2 beta F, doubled for the internal sqrt(2)-scaled pairs.
    let parity_shift = id.sub(&ladder.fermion.scale(&(two.clone() * beta.clone())));

    let mut checks = Vec::new();
    let mut push = |name: String, residual: MatrixOp<BetaPoly>, note: Option<&str>| {
        let pass = residual.is_zero();
        checks.push(IdentityCheck {
            name,
            pass,
            residual: if pass { None } else { Some(residual.to_string()) },
            note: note.map(str::to_string),
        });
    };

    push(
        "F^2 = 1".to_string(),
        ladder.fermion.mul(&ladder.fermion).sub(&id),
        None,
    );
    push(
        "[F, R] = 0".to_string(),
        ladder.fermion.bracket(&ladder.r0, BracketKind::Commutator),
        None,
    );
    push(
        "L- is the adjoint of L+".to_string(),
        ladder.lplus.adjoint().sub(&ladder.lminus),
        None,
    );
    push(
        "[R, L+] = 2 L+".to_string(),
        ladder
            .r0
            .bracket(&ladder.lplus, BracketKind::Commutator)
            .sub(&ladder.lplus.scale(&two)),
        None,
    );
    push(
        "[R, L-] = -2 L-".to_string(),
        ladder
            .r0
            .bracket(&ladder.lminus, BracketKind::Commutator)
            .add(&ladder.lminus.scale(&two)),
        None,
    );

    for pair in &ladder.pairs {
        let w = &pair.label;
        let a = &pair.annihilator;
        let c = &pair.creator;
        push(
            format!("a+_{} is the adjoint of a_{}", w, w),
            a.adjoint().sub(c),
            None,
        );
        push(
            format!("{{a_{w}, a+_{w}}} = 2 R"),
            a.bracket(c, BracketKind::Anticommutator)
                .sub(&ladder.r0.scale(&four)),
            None,
        );
        push(
            format!("[a_{w}, a+_{w}] = 1 - 2 beta F"),
            a.bracket(c, BracketKind::Commutator)
                .sub(&parity_shift.scale(&two)),
            None,
        );
        push(
            format!("R = a+_{w} a_{w} + (1 - 2 beta F)/2"),
            ladder.r0.scale(&two).sub(&c.mul(a)).sub(&parity_shift),
            None,
        );
        push(
            format!("[R, a_{w}] = -a_{w}"),
            ladder.r0.bracket(a, BracketKind::Commutator).add(a),
            None,
        );
        push(
            format!("[R, a+_{w}] = +a+_{w} (sign as computed)"),
            ladder.r0.bracket(c, BracketKind::Commutator).sub(c),
            Some(
                "the computed sign is +1; statements of this relation \
                 sometimes print it with a minus sign, which is \
                 inconsistent with [R, a] = -a and the raising action",
            ),
        );
        push(
            format!("{{a+_{w}, a+_{w}}} = 4 L+ (coefficient as computed)"),
            c.bracket(c, BracketKind::Anticommutator)
                .sub(&ladder.lplus.scale(&eight)),
            Some(
                "the computed coefficient is 4; the value 2 that sometimes \
                 accompanies this relation belongs to the convention where \
                 L+ absorbs a factor of 2",
            ),
        );
        push(
            format!("{{a_{w}, a_{w}}} = 4 L-"),
            a.bracket(a, BracketKind::Anticommutator)
                .sub(&ladder.lminus.scale(&eight)),
            None,
        );
        push(
            format!("{{F, a_{w}}} = 0"),
            ladder.fermion.bracket(a, BracketKind::Anticommutator),
            None,
        );
        push(
            format!("{{F, a+_{w}}} = 0"),
            ladder.fermion.bracket(c, BracketKind::Anticommutator),
            None,
        );
    }

    let pass = checks.iter().all(|c| c.pass);
    Ok(OscillatorReport { checks, pass })
}
