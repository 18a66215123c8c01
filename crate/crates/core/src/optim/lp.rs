//! Exact two-phase simplex.
//!
//! Problems are `maximize c·x` subject to rows `a·x (≤ | = | ≥) b` and
//! `x ≥ 0`. Every answer carries a certificate that [`verify_certificate`]
//! checks from the problem data alone:
//!
//! * optimal: a feasible `x` and a dual `y` with `Aᵀy ≥ c` and `b·y = c·x`;
//! * infeasible: a Farkas vector `y` with `Aᵀy ≥ 0` and `b·y < 0`;
//! * unbounded: a feasible `x` and a ray `d ≥ 0` with `c·d > 0`.
//!
//! Dual signs follow the row relations: `y ≥ 0` on `≤` rows, `y ≤ 0` on `≥`
//! rows, free on `=` rows.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::scalar::{QSqrt2, Scalar};

/// Ordered field with exact arithmetic.
pub trait ExactField: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    /// Panics on division by zero.
    fn over(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn signum(&self) -> Ordering;
    fn to_qsqrt2(&self) -> QSqrt2;

    fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    fn cmp_to(&self, o: &Self) -> Ordering {
        self.minus(o).signum()
    }
}

impl ExactField for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn signum(&self) -> Ordering {
        if Signed::is_positive(self) {
            Ordering::Greater
        } else if Signed::is_negative(self) {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
    fn to_qsqrt2(&self) -> QSqrt2 {
        QSqrt2::from_rational(self.clone())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl ExactField for QSqrt2 {
    fn zero() -> Self {
        QSqrt2::zero()
    }
    fn one() -> Self {
        QSqrt2::one()
    }
    fn from_i64(n: i64) -> Self {
        QSqrt2::from_int(n)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn signum(&self) -> Ordering {
        QSqrt2::signum(self)
    }
    fn to_qsqrt2(&self) -> QSqrt2 {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        QSqrt2::is_zero(self)
    }
}

/// Exact part of a scalar as a rational, if it has no √2 component.
pub fn scalar_to_rational(s: &Scalar) -> Option<BigRational> {
    let q = s.as_exact()?;
    q.is_rational().then(|| q.rational_part().clone())
}

pub(crate) fn dot<F: ExactField>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| if x.is_zero() || y.is_zero() { acc } else { acc.plus(&x.times(y)) })
}

pub(crate) fn ser_field<F: ExactField, S: Serializer>(x: &F, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

pub(crate) fn ser_fields<F: ExactField, S: Serializer>(xs: &[F], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|x| x.to_string()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Eq => Relation::Eq,
            Relation::Ge => Relation::Le,
        }
    }

    fn holds(self, lhs: Ordering) -> bool {
        match self {
            Relation::Le => lhs != Ordering::Greater,
            Relation::Eq => lhs == Ordering::Equal,
            Relation::Ge => lhs != Ordering::Less,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct Constraint<F: ExactField> {
    #[serde(serialize_with = "ser_fields")]
    pub coeffs: Vec<F>,
    pub relation: Relation,
    #[serde(serialize_with = "ser_field")]
    pub rhs: F,
}

impl<F: ExactField> Constraint<F> {
    pub fn new(coeffs: Vec<F>, relation: Relation, rhs: F) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

/// `maximize objective·x` over `x ≥ 0` and the constraints.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct LinearProgram<F: ExactField> {
    pub n_vars: usize,
    #[serde(serialize_with = "ser_fields")]
    pub objective: Vec<F>,
    pub constraints: Vec<Constraint<F>>,
}

impl<F: ExactField> LinearProgram<F> {
    /// Pure feasibility problem (zero objective).
    pub fn feasibility(n_vars: usize, constraints: Vec<Constraint<F>>) -> Self {
        LinearProgram { n_vars, objective: vec![F::zero(); n_vars], constraints }
    }

    fn check_shape(&self) -> Result<(), LpError> {
        if self.objective.len() != self.n_vars {
            return Err(LpError::Shape(format!("objective has {} entries for {} variables", self.objective.len(), self.n_vars)));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != self.n_vars {
                return Err(LpError::Shape(format!("row {i} has {} coefficients for {} variables", c.coeffs.len(), self.n_vars)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase", bound(serialize = ""))]
pub enum LpOutcome<F: ExactField> {
    Optimal {
        #[serde(serialize_with = "ser_fields")]
        x: Vec<F>,
        #[serde(serialize_with = "ser_field")]
        value: F,
        #[serde(serialize_with = "ser_fields")]
        dual: Vec<F>,
    },
    Infeasible {
        #[serde(serialize_with = "ser_fields")]
        farkas: Vec<F>,
    },
    Unbounded {
        #[serde(serialize_with = "ser_fields")]
        x: Vec<F>,
        #[serde(serialize_with = "ser_fields")]
        ray: Vec<F>,
    },
}

impl<F: ExactField> LpOutcome<F> {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }

    pub fn value(&self) -> Option<&F> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("malformed problem: {0}")]
    Shape(String),
    #[error("certificate rejected: {0}")]
    Certificate(String),
}

fn check_dual_sign<F: ExactField>(rel: Relation, y: &F, i: usize) -> Result<(), String> {
    let bad = match rel {
        Relation::Le => y.is_negative(),
        Relation::Ge => y.is_positive(),
        Relation::Eq => false,
    };
    if bad {
        return Err(format!("dual {i} = {y} has the wrong sign for a {rel:?} row"));
    }
    Ok(())
}

fn check_primal<F: ExactField>(lp: &LinearProgram<F>, x: &[F]) -> Result<(), String> {
    if x.len() != lp.n_vars {
        return Err("primal point has the wrong length".into());
    }
    if let Some(j) = x.iter().position(F::is_negative) {
        return Err(format!("x[{j}] = {} is negative", x[j]));
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        let lhs = dot(&c.coeffs, x);
        if !c.relation.holds(lhs.cmp_to(&c.rhs)) {
            return Err(format!("row {i} violated: {lhs} vs {}", c.rhs));
        }
    }
    Ok(())
}

/// `Aᵀy`.
fn transpose_apply<F: ExactField>(lp: &LinearProgram<F>, y: &[F]) -> Vec<F> {
    let mut out = vec![F::zero(); lp.n_vars];
    for (c, yi) in lp.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(&c.coeffs) {
            if !a.is_zero() {
                *o = o.plus(&a.times(yi));
            }
        }
    }
    out
}

/// Checks a certificate using only the problem data.
pub fn verify_certificate<F: ExactField>(lp: &LinearProgram<F>, outcome: &LpOutcome<F>) -> Result<(), String> {
    lp.check_shape().map_err(|e| e.to_string())?;
    let m = lp.constraints.len();
    let b: Vec<F> = lp.constraints.iter().map(|c| c.rhs.clone()).collect();
    match outcome {
        LpOutcome::Optimal { x, value, dual } => {
            check_primal(lp, x)?;
            if dual.len() != m {
                return Err("dual has the wrong length".into());
            }
            for (i, (c, y)) in lp.constraints.iter().zip(dual).enumerate() {
                check_dual_sign(c.relation, y, i)?;
            }
            let aty = transpose_apply(lp, dual);
            if let Some(j) = (0..lp.n_vars).find(|&j| aty[j].cmp_to(&lp.objective[j]) == Ordering::Less) {
                return Err(format!("dual constraint {j} violated"));
            }
            let primal = dot(&lp.objective, x);
            let dual_value = dot(&b, dual);
            if primal != *value || dual_value != *value {
                return Err(format!("objective {primal}, dual objective {dual_value}, reported {value}"));
            }
        }
        LpOutcome::Infeasible { farkas } => {
            if farkas.len() != m {
                return Err("Farkas vector has the wrong length".into());
            }
            for (i, (c, y)) in lp.constraints.iter().zip(farkas).enumerate() {
                check_dual_sign(c.relation, y, i)?;
            }
            if let Some(j) = transpose_apply(lp, farkas).iter().position(F::is_negative) {
                return Err(format!("Farkas combination negative on variable {j}"));
            }
            let by = dot(&b, farkas);
            if !by.is_negative() {
                return Err(format!("Farkas right-hand side {by} is not negative"));
            }
        }
        LpOutcome::Unbounded { x, ray } => {
            check_primal(lp, x)?;
            if ray.len() != lp.n_vars || ray.iter().any(F::is_negative) {
                return Err("ray must be nonnegative with one entry per variable".into());
            }
            for (i, c) in lp.constraints.iter().enumerate() {
                let lhs = dot(&c.coeffs, ray);
                if !c.relation.holds(lhs.signum()) {
                    return Err(format!("ray leaves row {i}"));
                }
            }
            if !dot(&lp.objective, ray).is_positive() {
                return Err("ray does not improve the objective".into());
            }
        }
    }
    Ok(())
}

struct Tableau<F> {
    /// `B⁻¹A | B⁻¹b`.
    rows: Vec<Vec<F>>,
    /// Reduced costs, then minus the objective value.
    obj: Vec<F>,
    basis: Vec<usize>,
    width: usize,
}

impl<F: ExactField> Tableau<F> {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.over(&p);
            }
        }
        let prow = self.rows[r].clone();
        let nz: Vec<usize> = (0..=self.width).filter(|&k| !prow[k].is_zero()).collect();
        let eliminate = |row: &mut Vec<F>| {
            let a = row[c].clone();
            if a.is_zero() {
                return;
            }
            for &k in &nz {
                row[k] = row[k].minus(&a.times(&prow[k]));
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = c;
    }

    /// Installs `cost` as the objective row for the current basis.
    fn set_objective(&mut self, cost: &[F]) {
        let mut obj: Vec<F> = cost.to_vec();
        obj.push(F::zero());
        for (row, &bj) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[bj];
            if cb.is_zero() {
                continue;
            }
            for (o, v) in obj.iter_mut().zip(row) {
                if !v.is_zero() {
                    *o = o.minus(&cb.times(v));
                }
            }
        }
        self.obj = obj;
    }

    /// Bland's rule. `Err(c)` when column `c` is an unbounded direction.
    fn run(&mut self, allowed: &[bool]) -> Result<(), usize> {
        loop {
            let Some(c) = (0..self.width).find(|&j| allowed[j] && self.obj[j].is_positive()) else {
                return Ok(());
            };
            let mut best: Option<(usize, F)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = row[self.width].over(&row[c]);
                let better = match &best {
                    None => true,
                    Some((bi, br)) => match ratio.cmp_to(br) {
                        Ordering::Less => true,
                        Ordering::Equal => self.basis[i] < self.basis[*bi],
                        Ordering::Greater => false,
                    },
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Err(c),
            }
        }
    }

    fn basic_values(&self, n: usize) -> Vec<F> {
        let mut x = vec![F::zero(); n];
        for (row, &bj) in self.rows.iter().zip(&self.basis) {
            if bj < n {
                x[bj] = row[self.width].clone();
            }
        }
        x
    }
}

/// Solves `lp` and re-verifies the certificate before returning it.
pub fn solve_lp<F: ExactField>(lp: &LinearProgram<F>) -> Result<LpOutcome<F>, LpError> {
    let out = simplex(lp)?;
    verify_certificate(lp, &out).map_err(LpError::Certificate)?;
    Ok(out)
}

fn simplex<F: ExactField>(lp: &LinearProgram<F>) -> Result<LpOutcome<F>, LpError> {
    lp.check_shape()?;
    let n = lp.n_vars;
    let m = lp.constraints.len();
    // Normalize to b ≥ 0.
    let mut flip = vec![false; m];
    let mut rels = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        flip[i] = c.rhs.is_negative();
        rels.push(if flip[i] { c.relation.flipped() } else { c.relation });
    }
    // Columns: structural, then one slack or surplus per inequality, then
    // one artificial per `=`/`≥` row.
    let mut ident = vec![0; m];
    let mut slack_of = vec![None; m];
    let mut col = n;
    for (i, r) in rels.iter().enumerate() {
        if *r != Relation::Eq {
            slack_of[i] = Some(col);
            col += 1;
        }
    }
    let mut artificial = vec![false; col];
    for (i, r) in rels.iter().enumerate() {
        if *r == Relation::Le {
            ident[i] = slack_of[i].expect("slack");
        } else {
            ident[i] = col;
            artificial.push(true);
            col += 1;
        }
    }
    let width = col;
    let mut rows = Vec::with_capacity(m);
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![F::zero(); width + 1];
        for (j, a) in c.coeffs.iter().enumerate() {
            row[j] = if flip[i] { a.negated() } else { a.clone() };
        }
        if let Some(s) = slack_of[i] {
            row[s] = if rels[i] == Relation::Le { F::one() } else { F::one().negated() };
        }
        row[ident[i]] = F::one();
        row[width] = if flip[i] { c.rhs.negated() } else { c.rhs.clone() };
        rows.push(row);
    }
    let unflip = |i: usize, y: F| if flip[i] { y.negated() } else { y };
    let mut t = Tableau { rows, obj: Vec::new(), basis: ident.clone(), width };

    if artificial.iter().any(|&a| a) {
        let cost: Vec<F> = (0..width).map(|j| if artificial[j] { F::one().negated() } else { F::zero() }).collect();
        t.set_objective(&cost);
        t.run(&vec![true; width]).expect("phase one is bounded");
        if t.obj[width].is_positive() {
            let farkas = (0..m).map(|i| unflip(i, cost[ident[i]].minus(&t.obj[ident[i]]))).collect();
            return Ok(LpOutcome::Infeasible { farkas });
        }
        for r in 0..m {
            if artificial[t.basis[r]] {
                if let Some(j) = (0..width).find(|&j| !artificial[j] && !t.rows[r][j].is_zero()) {
                    t.pivot(r, j);
                }
            }
        }
    }

    let mut cost = lp.objective.clone();
    cost.resize(width, F::zero());
    t.set_objective(&cost);
    let allowed: Vec<bool> = artificial.iter().map(|a| !a).collect();
    match t.run(&allowed) {
        Ok(()) => {
            let x = t.basic_values(n);
            let value = t.obj[width].negated();
            let dual = (0..m).map(|i| unflip(i, cost[ident[i]].minus(&t.obj[ident[i]]))).collect();
            Ok(LpOutcome::Optimal { x, value, dual })
        }
        Err(c) => {
            let x = t.basic_values(n);
            let mut ray = vec![F::zero(); n];
            if c < n {
                ray[c] = F::one();
            }
            for (row, &bj) in t.rows.iter().zip(&t.basis) {
                if bj < n {
                    ray[bj] = row[c].negated();
                }
            }
            Ok(LpOutcome::Unbounded { x, ray })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> BigRational {
        BigRational::from_i64(n)
    }

    fn row(c: &[i64], rel: Relation, b: i64) -> Constraint<BigRational> {
        Constraint::new(c.iter().map(|&v| r(v)).collect(), rel, r(b))
    }

    #[test]
    fn one_variable_bound() {
        let lp = LinearProgram { n_vars: 1, objective: vec![r(1)], constraints: vec![row(&[1], Relation::Le, 3)] };
        let out = solve_lp(&lp).unwrap();
        assert_eq!(out.value(), Some(&r(3)));
    }

    #[test]
    fn infeasible_has_farkas_vector() {
        // x ≤ −1 with x ≥ 0.
        let lp = LinearProgram::feasibility(1, vec![row(&[1], Relation::Le, -1)]);
        let out = solve_lp(&lp).unwrap();
        assert!(out.is_infeasible());
    }

    #[test]
    fn unbounded_has_ray() {
        let lp = LinearProgram { n_vars: 2, objective: vec![r(1), r(0)], constraints: vec![row(&[1, -1], Relation::Le, 1)] };
        assert!(matches!(solve_lp(&lp).unwrap(), LpOutcome::Unbounded { .. }));
    }

    #[test]
    fn equality_and_redundant_rows() {
        // x + y = 1 twice, 2x + 2y = 2; maximize x − y.
        let lp = LinearProgram {
            n_vars: 2,
            objective: vec![r(1), r(-1)],
            constraints: vec![row(&[1, 1], Relation::Eq, 1), row(&[1, 1], Relation::Eq, 1), row(&[2, 2], Relation::Eq, 2)],
        };
        let out = solve_lp(&lp).unwrap();
        assert_eq!(out.value(), Some(&r(1)));
    }

    #[test]
    fn degenerate_cycling_example_terminates() {
        // Beale's example, which cycles under the largest-coefficient rule.
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let lp = LinearProgram {
            n_vars: 4,
            objective: vec![q(3, 4), q(-150, 1), q(1, 50), q(-6, 1)],
            constraints: vec![
                Constraint::new(vec![q(1, 4), q(-60, 1), q(-1, 25), q(9, 1)], Relation::Le, r(0)),
                Constraint::new(vec![q(1, 2), q(-90, 1), q(-1, 50), q(3, 1)], Relation::Le, r(0)),
                Constraint::new(vec![r(0), r(0), r(1), r(0)], Relation::Le, r(1)),
            ],
        };
        assert_eq!(solve_lp(&lp).unwrap().value(), Some(&q(1, 20)));
    }

    #[test]
    fn ge_rows_and_negative_rhs() {
        // minimize x + y subject to x + 2y ≥ 4, 3x + y ≥ 6, written as max −x − y.
        let lp = LinearProgram {
            n_vars: 2,
            objective: vec![r(-1), r(-1)],
            constraints: vec![row(&[1, 2], Relation::Ge, 4), row(&[-3, -1], Relation::Le, -6)],
        };
        let out = solve_lp(&lp).unwrap();
        assert_eq!(out.value(), Some(&BigRational::new((-14).into(), 5.into())));
    }

    #[test]
    fn checker_rejects_tampered_certificates() {
        let lp = LinearProgram { n_vars: 1, objective: vec![r(1)], constraints: vec![row(&[1], Relation::Le, 3)] };
        let bad = LpOutcome::Optimal { x: vec![r(3)], value: r(3), dual: vec![r(2)] };
        assert!(verify_certificate(&lp, &bad).is_err());
        let bad = LpOutcome::Optimal { x: vec![r(4)], value: r(4), dual: vec![r(1)] };
        assert!(verify_certificate(&lp, &bad).is_err());
        let bad = LpOutcome::Infeasible { farkas: vec![r(1)] };
        assert!(verify_certificate(&lp, &bad).is_err());
    }

    #[test]
    fn works_over_qsqrt2() {
        // max x subject to √2·x ≤ 2.
        let lp = LinearProgram {
            n_vars: 1,
            objective: vec![QSqrt2::one()],
            constraints: vec![Constraint::new(vec![QSqrt2::sqrt2()], Relation::Le, QSqrt2::from_int(2))],
        };
        assert_eq!(solve_lp(&lp).unwrap().value(), Some(&QSqrt2::sqrt2()));
    }

    #[test]
    fn certificates_serialize_as_strings() {
        let lp = LinearProgram { n_vars: 1, objective: vec![r(1)], constraints: vec![row(&[2], Relation::Le, 3)] };
        let out = solve_lp(&lp).unwrap();
        let js = serde_json::to_string(&out).unwrap();
        assert_eq!(js, r#"{"status":"optimal","x":["3/2"],"value":"3/2","dual":["1/2"]}"#);
        assert!(serde_json::to_string(&lp).unwrap().contains(r#""relation":"le""#));
    }
}
