//! Inequalities over +1-outcome probabilities, `Σ c_S·P(S) ≤ K`.
//!
//! Each variable is an expectation `x = 2P − 1` of a ±1 observable, and the
//! local-hidden-variable factorization makes a joint probability the product
//! of its marginals, so a correlator monomial expands by inclusion–exclusion:
//! `x_S = Σ_{T⊆S} 2^{|T|}(−1)^{|S|−|T|} P(T)`. The inverse substitution is
//! `P(S) = Π_{i∈S}(1 + x_i)/2`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{
    int, primitive_factor, Arity, BellPolynomial, Rational, SitePermutation, SitedMonomial,
    Variable,
};
use crate::error::{invalid, Result};

/// A linear inequality over joint +1-outcome probabilities.
///
/// Keys are non-identity monomials read as events: the monomial `a₁b₂`
/// stands for `P(A₁ = +1, B₂ = +1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityForm {
    arity: Arity,
    terms: BTreeMap<SitedMonomial, Rational>,
    bound: Rational,
}

impl ProbabilityForm {
    pub fn new<I>(arity: Arity, terms: I, bound: Rational) -> Result<ProbabilityForm>
    where
        I: IntoIterator<Item = (SitedMonomial, Rational)>,
    {
        let mut out = ProbabilityForm {
            arity,
            terms: BTreeMap::new(),
            bound,
        };
        for (event, c) in terms {
            if event.is_identity() {
                return Err(invalid("probability events must involve at least one site"));
            }
            if let Some(site) = event.max_site() {
                if !arity.contains(site) {
                    return Err(invalid(format!(
                        "event {event} references site {site:?} outside arity {}",
                        arity.sites()
                    )));
                }
            }
            out.add(event, c);
        }
        Ok(out)
    }

    fn add(&mut self, event: SitedMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(event).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&event);
        }
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    /// The right-hand side `K`.
    pub fn bound(&self) -> &Rational {
        &self.bound
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&SitedMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, event: &SitedMonomial) -> Rational {
        self.terms
            .get(event)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Rescales by a positive rational so the coefficients are coprime
    /// integers; `K` scales with them.
    pub fn primitive(&self) -> ProbabilityForm {
        let k = primitive_factor(self.terms.values());
        ProbabilityForm {
            arity: self.arity,
            terms: self.terms.iter().map(|(e, c)| (*e, c * &k)).collect(),
            bound: &self.bound * &k,
        }
    }

    pub fn permute_sites(&self, perm: &SitePermutation) -> Result<ProbabilityForm> {
        if self.arity == Arity::Two && perm.apply(super::Site::C) != super::Site::C {
            return Err(invalid(
                "a two-site form can only be permuted within {A, B}",
            ));
        }
        Ok(ProbabilityForm {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (perm.apply_monomial(e), c.clone()))
                .collect(),
            bound: self.bound.clone(),
        })
    }
}

impl fmt::Display for ProbabilityForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (event, c)) in self.terms.iter().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            let mag = c.abs();
            if !mag.is_one() {
                write!(f, "{mag}")?;
            }
            f.write_str("P(")?;
            for (j, v) in event.variables().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(
                    f,
                    "{}{}",
                    v.site.letter().to_ascii_uppercase(),
                    v.obs.label()
                )?;
            }
            f.write_str(")")?;
        }
        write!(f, " <= {}", self.bound)
    }
}

fn subsets(vars: &[Variable]) -> impl Iterator<Item = (SitedMonomial, usize)> + '_ {
    (0u32..(1 << vars.len())).map(move |mask| {
        let picked: Vec<Variable> = vars
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| *v)
            .collect();
        (
            SitedMonomial::from_variables(&picked).expect("subset of a monomial"),
            picked.len(),
        )
    })
}

fn pow2(k: usize) -> Rational {
    Rational::from_integer(BigInt::one() << k)
}

/// Substitutes `x = 2P − 1` per variable and moves the constant into `K`.
pub fn to_probability_form(p: &BellPolynomial) -> Result<ProbabilityForm> {
    let bound = p
        .bound()
        .ok_or_else(|| invalid("probability form requires a declared bound"))?;
    let mut out = ProbabilityForm {
        arity: p.arity(),
        terms: BTreeMap::new(),
        bound: bound.clone(),
    };
    let mut constant = Rational::zero();
    for (m, c) in p.terms() {
        let vars: Vec<Variable> = m.variables().collect();
        let k = vars.len();
        for (event, size) in subsets(&vars) {
            let sign = if (k - size).is_multiple_of(2) { 1 } else { -1 };
            let term = c * pow2(size) * int(sign);
            if event.is_identity() {
                constant += term;
            } else {
                out.add(event, term);
            }
        }
    }
    out.bound -= constant;
    Ok(out)
}

/// Substitutes `P = (1 + x)/2` per site and moves the constant into the
/// bound. Exact inverse of [`to_probability_form`] on constant-free
/// polynomials.
pub fn from_probability_form(q: &ProbabilityForm) -> BellPolynomial {
    let mut terms: Vec<(SitedMonomial, Rational)> = Vec::new();
    let mut constant = Rational::zero();
    for (event, c) in q.terms() {
        let vars: Vec<Variable> = event.variables().collect();
        let weight = c / pow2(vars.len());
        for (m, _) in subsets(&vars) {
            if m.is_identity() {
                constant += &weight;
            } else {
                terms.push((m, weight.clone()));
            }
        }
    }
    BellPolynomial::from_terms(q.arity(), terms)
        .expect("events were validated against the arity")
        .with_bound(q.bound() - constant)
}

impl BellPolynomial {
    /// See [`to_probability_form`].
    pub fn to_probability_form(&self) -> Result<ProbabilityForm> {
        to_probability_form(self)
    }
}

impl ProbabilityForm {
    /// See [`from_probability_form`].
    pub fn to_bell_polynomial(&self) -> BellPolynomial {
        from_probability_form(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{Obs, Site};

    fn a1() -> SitedMonomial {
        SitedMonomial::single(Variable::new(Site::A, Obs::One))
    }

    #[test]
    fn single_variable() {
        let p = BellPolynomial::from_terms(Arity::Two, [(a1(), int(1))])
            .unwrap()
            .with_bound(int(2));
        let q = to_probability_form(&p).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.coefficient(&a1()), int(2));
        assert_eq!(q.bound(), &int(3));
        assert_eq!(from_probability_form(&q), p);
    }

    #[test]
    fn missing_bound_is_an_error() {
        let p = BellPolynomial::from_terms(Arity::Two, [(a1(), int(1))]).unwrap();
        assert!(to_probability_form(&p).is_err());
    }

    #[test]
    fn identity_event_rejected() {
        assert!(
            ProbabilityForm::new(Arity::Two, [(SitedMonomial::IDENTITY, int(1))], int(0)).is_err()
        );
    }

    #[test]
    fn display() {
        let q = ProbabilityForm::new(Arity::Two, [(a1(), int(-2))], int(0)).unwrap();
        assert_eq!(q.to_string(), "-2P(A1) <= 0");
    }
}
