//! Exact linear algebra over the coefficient rings: fraction-free rank,
//! small linear solves in the fraction field with ring-membership checks,
//! and incremental row reduction over Q(i).

use num::traits::Zero;

use crate::scalars::Scalar;

/// Unreduced fraction over a scalar ring; only used internally for small
/// eliminations, so coefficient growth is not a concern.
#[derive(Clone, Debug)]
pub(crate) struct Frac<S> {
    num: S,
    den: S,
}

impl<S: Scalar> Frac<S> {
    fn from_ring(x: S) -> Self {
        Frac { num: x, den: S::one() }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn sub(&self, rhs: &Self) -> Self {
        Frac {
            num: self.num.clone() * rhs.den.clone() - rhs.num.clone() * self.den.clone(),
            den: self.den.clone() * rhs.den.clone(),
        }
    }

    fn mul(&self, rhs: &Self) -> Self {
        Frac { num: self.num.clone() * rhs.num.clone(), den: self.den.clone() * rhs.den.clone() }
    }

    fn div(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero fraction");
        Frac { num: self.num.clone() * rhs.den.clone(), den: self.den.clone() * rhs.num.clone() }
    }

    fn to_ring(&self) -> Option<S> {
        self.num.try_exact_div(&self.den)
    }
}

/// Rank of a matrix over an integral domain via fraction-free (Bareiss)
/// elimination; every division is exact by the Sylvester identity.
pub fn rank<S: Scalar>(mut rows: Vec<Vec<S>>) -> usize {
    let nrows = rows.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = rows[0].len();
    debug_assert!(rows.iter().all(|r| r.len() == ncols));
    let mut prev = S::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(pr) = (r..nrows).find(|&rr| !rows[rr][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        for rr in r + 1..nrows {
            for cc in c + 1..ncols {
                let num = rows[r][c].clone() * rows[rr][cc].clone()
                    - rows[rr][c].clone() * rows[r][cc].clone();
                rows[rr][cc] = num
                    .try_exact_div(&prev)
                    .expect("fraction-free elimination divides exactly");
            }
            rows[rr][c] = S::zero();
        }
        prev = rows[r][c].clone();
        r += 1;
    }
    r
}

pub(crate) enum SolveOutcome<S> {
    /// Unique ring-valued coefficients (free variables pinned to zero).
    Solved(Vec<S>),
    /// The system has no solution over the fraction field.
    Inconsistent,
    /// A solution exists over the fraction field but not in the ring.
    NonRing,
}

/// Solve `sum_j columns[j] * x_j = target` by Gauss-Jordan elimination in
/// the fraction field of the scalar ring.
pub(crate) fn solve_in_ring<S: Scalar>(columns: &[Vec<S>], target: &[S]) -> SolveOutcome<S> {
    let ncols = columns.len();
    let nrows = target.len();
    debug_assert!(columns.iter().all(|c| c.len() == nrows));
    let mut rows: Vec<Vec<Frac<S>>> = (0..nrows)
        .map(|r| {
            let mut row: Vec<Frac<S>> =
                columns.iter().map(|col| Frac::from_ring(col[r].clone())).collect();
            row.push(Frac::from_ring(target[r].clone()));
            row
        })
        .collect();
    let mut pivot_col_of_row = Vec::new();
    let mut rank = 0;
    for c in 0..ncols {
        let Some(pr) = (rank..nrows).find(|&rr| !rows[rr][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let pivot = rows[rank][c].clone();
        for cell in rows[rank][c..=ncols].iter_mut() {
            *cell = cell.div(&pivot);
        }
        let pivot_row: Vec<Frac<S>> = rows[rank][c..=ncols].to_vec();
        for (rr, row) in rows.iter_mut().enumerate() {
            if rr == rank || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (cell, pv) in row[c..=ncols].iter_mut().zip(&pivot_row) {
                let delta = factor.mul(pv);
                *cell = cell.sub(&delta);
            }
        }
        pivot_col_of_row.push(c);
        rank += 1;
    }
    for row in rows.iter().skip(rank) {
        if !row[ncols].is_zero() {
            return SolveOutcome::Inconsistent;
        }
    }
    let mut solution = vec![S::zero(); ncols];
    for (r, &c) in pivot_col_of_row.iter().enumerate() {
        match rows[r][ncols].to_ring() {
            Some(x) => solution[c] = x,
            None => return SolveOutcome::NonRing,
        }
    }
    SolveOutcome::Solved(solution)
}

/// Incrementally maintained reduced row echelon form over a scalar ring in
/// which every nonzero element is invertible (used with Q(i)).
#[derive(Clone, Debug)]
pub struct Echelon<S> {
    width: usize,
    rows: Vec<Vec<S>>,
    pivots: Vec<usize>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(width: usize) -> Self {
        Echelon { width, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    /// Remainder of `v` after subtracting its projection onto the span.
    pub fn reduce(&self, mut v: Vec<S>) -> Vec<S> {
        assert_eq!(v.len(), self.width, "vector width mismatch");
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v[p].is_zero() {
                continue;
            }
            let factor = v[p].clone();
            for c in 0..self.width {
                v[c] = v[c].clone() - factor.clone() * row[c].clone();
            }
        }
        v
    }

    /// Insert a vector; returns `true` when it enlarged the span.
    pub fn insert(&mut self, v: Vec<S>) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = S::one()
            .try_exact_div(&w[p])
            .expect("echelon reduction requires invertible leading entries");
        for cell in w.iter_mut() {
            *cell = cell.clone() * inv.clone();
        }
        for (row, &q) in self.rows.iter_mut().zip(&self.pivots) {
            debug_assert!(q != p);
            if row[p].is_zero() {
                continue;
            }
            let factor = row[p].clone();
            for c in 0..self.width {
                row[c] = row[c].clone() - factor.clone() * w[c].clone();
            }
        }
        let at = self.pivots.iter().position(|&q| q > p).unwrap_or(self.rows.len());
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        true
    }

    pub fn contains(&self, v: Vec<S>) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }
}

/// Basis of the right nullspace of a matrix over a scalar ring in which
/// every nonzero element is invertible.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<Vec<S>> {
    let mut ech = Echelon::new(ncols);
    for row in rows {
        ech.insert(row.clone());
    }
    let pivot_set: std::collections::BTreeSet<usize> = ech.pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![S::zero(); ncols];
        v[free] = S::one();
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{BetaPoly, GaussianRational};
    use proptest::prelude::*;
    use num::traits::One;

    fn gi(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    #[test]
    fn rank_of_rational_matrices() {
        assert_eq!(rank::<GaussianRational>(vec![]), 0);
        assert_eq!(rank(vec![vec![gi(0), gi(0)]]), 0);
        assert_eq!(rank(vec![vec![gi(1), gi(2)], vec![gi(2), gi(4)]]), 1);
        assert_eq!(rank(vec![vec![gi(1), gi(2)], vec![gi(3), gi(4)]]), 2);
        assert_eq!(
            rank(vec![
                vec![gi(1), gi(2), gi(3)],
                vec![gi(4), gi(5), gi(6)],
                vec![gi(7), gi(8), gi(9)],
            ]),
            2
        );
    }

    #[test]
    fn rank_of_polynomial_matrix() {
        let b = BetaPoly::beta;
        let one = BetaPoly::one;
        // [[b, b^2], [1, b]] has rank 1 identically in the parameter.
        let rows = vec![vec![b(), b() * b()], vec![one(), b()]];
        assert_eq!(rank(rows), 1);
        let rows2 = vec![vec![b(), b() * b()], vec![one(), b() + one()]];
        assert_eq!(rank(rows2), 2);
    }

    #[test]
    fn solve_detects_inconsistency_and_non_ring_solutions() {
        // x * [1, 1] = [1, 2] is inconsistent.
        match solve_in_ring(&[vec![gi(1), gi(1)]], &[gi(1), gi(2)]) {
            SolveOutcome::Inconsistent => {}
            _ => panic!("expected inconsistency"),
        }
        // x * b = 1 has only the non-polynomial solution 1/b.
        match solve_in_ring(&[vec![BetaPoly::beta()]], &[BetaPoly::one()]) {
            SolveOutcome::NonRing => {}
            _ => panic!("expected non-ring outcome"),
        }
        // x * b = b^2 + b solves to x = b + 1.
        let target = BetaPoly::beta() * BetaPoly::beta() + BetaPoly::beta();
        match solve_in_ring(&[vec![BetaPoly::beta()]], &[target]) {
            SolveOutcome::Solved(x) => {
                assert_eq!(x, vec![BetaPoly::beta() + BetaPoly::one()]);
            }
            _ => panic!("expected solution"),
        }
    }

    #[test]
    fn echelon_membership() {
        let mut ech = Echelon::new(3);
        assert!(ech.insert(vec![gi(1), gi(1), gi(0)]));
        assert!(ech.insert(vec![gi(0), gi(2), gi(2)]));
        assert!(!ech.insert(vec![gi(2), gi(4), gi(2)]));
        assert_eq!(ech.rank(), 2);
        assert!(ech.contains(vec![gi(1), gi(3), gi(2)]));
        assert!(!ech.contains(vec![gi(0), gi(0), gi(1)]));
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let rows = vec![vec![gi(1), gi(2), gi(3)], vec![gi(2), gi(4), gi(6)]];
        let basis = nullspace(&rows, 3);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            for row in &rows {
                let dot = row
                    .iter()
                    .zip(v)
                    .fold(GaussianRational::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
                assert!(dot.is_zero());
            }
        }
    }

    fn vec3() -> impl Strategy<Value = Vec<GaussianRational>> {
        proptest::collection::vec((-4i64..=4).prop_map(gi), 3)
    }

    proptest! {
        #[test]
        fn solve_recovers_planted_coefficients(c0 in -4i64..=4, c1 in -4i64..=4, a in vec3(), b in vec3()) {
            let target: Vec<GaussianRational> = (0..3)
                .map(|r| gi(c0) * a[r].clone() + gi(c1) * b[r].clone())
                .collect();
            match solve_in_ring(&[a.clone(), b.clone()], &target) {
                SolveOutcome::Solved(x) => {
                    let residual: Vec<GaussianRational> = (0..3)
                        .map(|r| {
                            x[0].clone() * a[r].clone() + x[1].clone() * b[r].clone()
                                - target[r].clone()
                        })
                        .collect();
                    prop_assert!(residual.iter().all(Zero::is_zero));
                }
                _ => prop_assert!(false, "planted system must solve"),
            }
        }

        #[test]
        fn rank_bounded_and_swap_invariant(a in vec3(), b in vec3(), c in vec3()) {
            let r1 = rank(vec![a.clone(), b.clone(), c.clone()]);
            let r2 = rank(vec![c, a, b]);
            prop_assert_eq!(r1, r2);
            prop_assert!(r1 <= 3);
        }
    }
}
