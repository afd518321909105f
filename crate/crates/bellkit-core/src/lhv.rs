//! Classical (local hidden variable) bounds.
//!
//! A hidden-variable expectation is a convex mixture over λ of products of
//! local means `ā_i(λ) ∈ [−1, 1]`. A multilinear polynomial is affine in each
//! variable separately, so its maximum over the cube `[−1, 1]^k` sits at a
//! vertex, and averaging over λ cannot exceed that maximum. Enumerating the
//! deterministic `±1` assignments therefore gives the exact classical bound.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::error::{invalid, Result};
use crate::polynomial::{int, BellPolynomial, FamilyParams, Rational, Sign, Variable};

/// A deterministic assignment of `±1` to the referenced observables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexAssignment {
    values: Vec<(Variable, Sign)>,
}

impl VertexAssignment {
    pub fn new(values: Vec<(Variable, Sign)>) -> VertexAssignment {
        VertexAssignment { values }
    }

    pub fn values(&self) -> &[(Variable, Sign)] {
        &self.values
    }

    pub fn get(&self, var: Variable) -> Option<Sign> {
        self.values.iter().find(|(v, _)| *v == var).map(|(_, s)| *s)
    }

    /// Full six-entry assignment; unreferenced variables are set to 0.
    pub fn as_point(&self) -> [Rational; 6] {
        let mut point: [Rational; 6] = Default::default();
        for (v, s) in &self.values {
            point[v.index()] = int(s.value());
        }
        point
    }
}

impl fmt::Display for VertexAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, s)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={:+}", s.value())?;
        }
        Ok(())
    }
}

/// Exact classical maximum with an attaining vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LhvBoundResult {
    pub maximum: Rational,
    pub witness: VertexAssignment,
    pub vertices: usize,
}

/// Maximizes `p` over all `±1` assignments of its referenced variables.
///
/// Vertices are visited lexicographically in canonical variable order with
/// `+1` before `−1`; the first vertex reaching the maximum is the witness.
pub fn vertex_max(p: &BellPolynomial) -> LhvBoundResult {
    let vars = p.referenced_variables();
    let k = vars.len();
    // monomial -> bitmask over `vars`, evaluated as a parity
    let terms: Vec<(u32, &Rational)> = p
        .terms()
        .map(|(m, c)| {
            let mask = m.variables().fold(0u32, |acc, v| {
                let pos = vars.iter().position(|w| *w == v).expect("referenced");
                acc | 1 << pos
            });
            (mask, c)
        })
        .collect();

    let mut best: Option<(Rational, u32)> = None;
    // bit i of `minus` set means vars[i] = -1; iterate in lexicographic order
    // with +1 first, i.e. the first variable is the most significant bit.
    for code in 0u32..(1 << k) {
        let minus = (0..k).fold(0u32, |acc, i| {
            if code & (1 << (k - 1 - i)) != 0 {
                acc | 1 << i
            } else {
                acc
            }
        });
        let mut value = Rational::zero();
        for (mask, c) in &terms {
            if (mask & minus).count_ones() % 2 == 0 {
                value += *c;
            } else {
                value -= *c;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, minus));
        }
    }
    let (maximum, minus) = best.expect("at least one vertex");
    let witness = VertexAssignment::new(
        vars.iter()
            .enumerate()
            .map(|(i, v)| {
                let s = if minus & (1 << i) != 0 {
                    Sign::Minus
                } else {
                    Sign::Plus
                };
                (*v, s)
            })
            .collect(),
    );
    LhvBoundResult {
        maximum,
        witness,
        vertices: 1 << k,
    }
}

/// Checks `vertex_max(p) ≤ declared bound`; the result is returned either way.
pub fn verify_declared_bound(p: &BellPolynomial) -> Result<(bool, LhvBoundResult)> {
    let bound = p
        .bound()
        .ok_or_else(|| invalid("bound verification requires a declared bound"))?;
    let result = vertex_max(p);
    Ok((result.maximum <= *bound, result))
}

/// The linear conditions on `(u, r, s, t)` under which the reduction
/// `−F + G + H` of the three-qubit family stays below `2 + u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    /// `r ≤ 4 + 2u`
    RCap,
    /// `r − s ≤ 2u`
    RMinusS,
    /// `r − t ≤ 2u`
    RMinusT,
    /// `r − s − t ≤ 0`
    RMinusSMinusT,
}

impl Constraint {
    pub const ALL: [Constraint; 4] = [
        Constraint::RCap,
        Constraint::RMinusS,
        Constraint::RMinusT,
        Constraint::RMinusSMinusT,
    ];

    /// `(lhs, rhs)` of `lhs ≤ rhs`.
    fn sides(self, p: &FamilyParams) -> (Rational, Rational) {
        let two_u = int(2) * p.u();
        match self {
            Constraint::RCap => (p.r().clone(), int(4) + &two_u),
            Constraint::RMinusS => (p.r() - p.s(), two_u),
            Constraint::RMinusT => (p.r() - p.t(), two_u),
            Constraint::RMinusSMinusT => (p.r() - p.s() - p.t(), Rational::zero()),
        }
    }

    pub fn expression(self) -> &'static str {
        match self {
            Constraint::RCap => "r <= 4 + 2u",
            Constraint::RMinusS => "r - s <= 2u",
            Constraint::RMinusT => "r - t <= 2u",
            Constraint::RMinusSMinusT => "r - s - t <= 0",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.expression())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintCheck {
    pub constraint: Constraint,
    pub holds: bool,
    /// Holds with equality.
    pub saturated: bool,
    /// `rhs − lhs`; negative when violated.
    pub slack: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintReport {
    pub checks: Vec<ConstraintCheck>,
}

impl ConstraintReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn violated(&self) -> Vec<Constraint> {
        self.checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.constraint)
            .collect()
    }

    pub fn saturated(&self) -> Vec<Constraint> {
        self.checks
            .iter()
            .filter(|c| c.saturated)
            .map(|c| c.constraint)
            .collect()
    }

    /// One line per constraint, e.g. `r - s <= 2u: violated (slack -1)`.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let state = match (c.holds, c.saturated) {
                (true, true) => "saturated",
                (true, false) => "ok",
                (false, _) => "violated",
            };
            out.push_str(&format!("{}: {state} (slack {})\n", c.constraint, c.slack));
        }
        out
    }
}

/// Evaluates the four constraints exactly.
pub fn check_constraints(p: &FamilyParams) -> ConstraintReport {
    ConstraintReport {
        checks: Constraint::ALL
            .iter()
            .map(|&constraint| {
                let (lhs, rhs) = constraint.sides(p);
                let slack = rhs - lhs;
                ConstraintCheck {
                    constraint,
                    holds: slack >= Rational::zero(),
                    saturated: slack.is_zero(),
                    slack,
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{
        chsh, e_prime, three_qubit_family, universal_inequality, Arity, Obs, Site,
    };

    #[test]
    fn chsh_bound_and_witness() {
        let res = vertex_max(&chsh(1).unwrap());
        assert_eq!(res.maximum, int(2));
        assert_eq!(res.vertices, 16);
        // canonical order reaches (+,+,+,-) before (+,-,+,-)
        assert_eq!(res.witness.to_string(), "a1=+1, a2=+1, b1=+1, b2=-1");
        let other = [int(1), int(-1), int(1), int(-1), int(0), int(0)];
        assert_eq!(chsh(1).unwrap().evaluate(&other), int(2));
    }

    #[test]
    fn zero_polynomial() {
        let res = vertex_max(&BellPolynomial::zero(Arity::Two));
        assert_eq!(res.maximum, int(0));
        assert_eq!(res.vertices, 1);
        assert!(res.witness.values().is_empty());
    }

    #[test]
    fn declared_bound_checks() {
        for r in [0, 1, 4, 100] {
            let (ok, res) = verify_declared_bound(&e_prime(&int(r)).unwrap()).unwrap();
            assert!(ok);
            assert_eq!(res.maximum, int(2));
        }
        let tight = chsh(1).unwrap().with_bound(int(1));
        assert!(!verify_declared_bound(&tight).unwrap().0);
        let (ok, res) = verify_declared_bound(&universal_inequality()).unwrap();
        assert!(ok);
        assert_eq!(res.maximum, int(4));
        assert!(verify_declared_bound(&chsh(1).unwrap().without_bound()).is_err());
    }

    #[test]
    fn unit_weight_universal_construction_is_not_a_valid_inequality() {
        let raw = crate::polynomial::universal_construction(&int(1))
            .unwrap()
            .assemble();
        let (ok, res) = verify_declared_bound(&raw).unwrap();
        assert!(!ok);
        assert!(res.maximum > int(2));
    }

    #[test]
    fn pi5_integer_form_bound() {
        let p = three_qubit_family(&FamilyParams::from_integers(2, 8, 4, 4).unwrap()).unwrap();
        assert_eq!(vertex_max(&p).maximum, int(4));
        let integer = p.primitive();
        assert_eq!(integer.bound(), Some(&int(8)));
        assert_eq!(vertex_max(&integer).maximum, int(8));
    }

    #[test]
    fn constraint_examples() {
        let rep = check_constraints(&FamilyParams::from_integers(2, 8, 4, 4).unwrap());
        assert!(rep.all_hold());
        assert_eq!(rep.saturated(), Constraint::ALL);

        let rep = check_constraints(&FamilyParams::from_integers(0, 1, 0, 0).unwrap());
        assert_eq!(
            rep.violated(),
            [
                Constraint::RMinusS,
                Constraint::RMinusT,
                Constraint::RMinusSMinusT
            ]
        );

        assert!(check_constraints(&FamilyParams::from_integers(1, 4, 2, 2).unwrap()).all_hold());
    }

    #[test]
    fn witness_reevaluates_to_maximum() {
        let p = three_qubit_family(&FamilyParams::from_integers(1, 3, 2, 5).unwrap()).unwrap();
        let res = vertex_max(&p);
        assert_eq!(p.evaluate(&res.witness.as_point()), res.maximum);
        assert!(res
            .witness
            .get(crate::polynomial::Variable::new(Site::C, Obs::Two))
            .is_some());
    }
}
