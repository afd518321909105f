//! Exact algebra of multilinear correlator polynomials.
//!
//! A [`BellPolynomial`] is a finite sum of monomials in the ±1-valued
//! variables `a₁, a₂, b₁, b₂, c₁, c₂`, each monomial holding at most one
//! observable per site. Coefficients are arbitrary-precision rationals, so
//! every construction in [`families`] and every bound proof in
//! [`crate::lhv`] is exact.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{invalid, Result};

mod families;
mod permutation;
mod probability;

pub use families::{
    chsh, e_double_prime, e_prime, family_components, projector, three_qubit_family,
    universal_construction, universal_inequality, FamilyParams, ThreeQubitConstruction,
};
pub use permutation::SitePermutation;
pub use probability::{from_probability_form, to_probability_form, ProbabilityForm};

/// Exact coefficient type.
pub type Rational = num_rational::BigRational;

/// Builds `num/den` as a [`Rational`]. Panics if `den == 0`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds an integer [`Rational`].
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A measurement site (party).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    A,
    B,
    C,
}

impl Site {
    pub const ALL: [Site; 3] = [Site::A, Site::B, Site::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Site> {
        Self::ALL.get(i).copied()
    }

    /// Lower-case variable letter (`a`, `b`, `c`).
    pub fn letter(self) -> char {
        match self {
            Site::A => 'a',
            Site::B => 'b',
            Site::C => 'c',
        }
    }
}

/// One of the two dichotomic observables measured at a site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Obs {
    One,
    Two,
}

impl Obs {
    pub const ALL: [Obs; 2] = [Obs::One, Obs::Two];

    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based label as printed in formulas.
    pub fn label(self) -> u8 {
        self as u8 + 1
    }
}

/// Per-site factor of a monomial. Ordered `Identity < Obs1 < Obs2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Selector {
    #[default]
    Identity,
    Obs1,
    Obs2,
}

impl Selector {
    pub fn of(obs: Obs) -> Selector {
        match obs {
            Obs::One => Selector::Obs1,
            Obs::Two => Selector::Obs2,
        }
    }

    pub fn obs(self) -> Option<Obs> {
        match self {
            Selector::Identity => None,
            Selector::Obs1 => Some(Obs::One),
            Selector::Obs2 => Some(Obs::Two),
        }
    }

    /// Wire encoding: 0 = identity, 1 and 2 the observables.
    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Selector> {
        match code {
            0 => Some(Selector::Identity),
            1 => Some(Selector::Obs1),
            2 => Some(Selector::Obs2),
            _ => None,
        }
    }
}

/// An extremal value `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(invalid(format!(
                "extremal value must be +1 or -1, got {other}"
            ))),
        }
    }
}

/// A single observable variable such as `b₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub site: Site,
    pub obs: Obs,
}

impl Variable {
    /// `a₁, a₂, b₁, b₂, c₁, c₂` in canonical order.
    pub const ALL: [Variable; 6] = [
        Variable::new(Site::A, Obs::One),
        Variable::new(Site::A, Obs::Two),
        Variable::new(Site::B, Obs::One),
        Variable::new(Site::B, Obs::Two),
        Variable::new(Site::C, Obs::One),
        Variable::new(Site::C, Obs::Two),
    ];

    pub const fn new(site: Site, obs: Obs) -> Variable {
        Variable { site, obs }
    }

    /// Position in [`Variable::ALL`].
    pub fn index(self) -> usize {
        2 * self.site.index() + self.obs.index()
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.site.letter(), self.obs.label())
    }
}

/// Number of parties a polynomial ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arity {
    Two = 2,
    Three = 3,
}

impl Arity {
    pub fn sites(self) -> usize {
        self as usize
    }

    pub fn from_sites(n: usize) -> Result<Arity> {
        match n {
            2 => Ok(Arity::Two),
            3 => Ok(Arity::Three),
            other => Err(invalid(format!("arity must be 2 or 3, got {other}"))),
        }
    }

    pub fn contains(self, site: Site) -> bool {
        site.index() < self.sites()
    }
}

/// A product of at most one observable per site.
///
/// Monomials are ordered by degree, then lexicographically by their
/// variables (`a1 < a2 < b1 < … < c2`). This fixes the canonical term order
/// of every polynomial.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SitedMonomial([Selector; 3]);

impl Ord for SitedMonomial {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.variables().cmp(other.variables()))
    }
}

impl PartialOrd for SitedMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl SitedMonomial {
    pub const IDENTITY: SitedMonomial = SitedMonomial([Selector::Identity; 3]);

    pub fn new(selectors: [Selector; 3]) -> SitedMonomial {
        SitedMonomial(selectors)
    }

    /// Monomial consisting of one variable.
    pub fn single(var: Variable) -> SitedMonomial {
        Self::IDENTITY.with(var.site, Selector::of(var.obs))
    }

    /// Product of the given variables. `None` if two share a site.
    pub fn from_variables(vars: &[Variable]) -> Option<SitedMonomial> {
        vars.iter()
            .try_fold(Self::IDENTITY, |m, &v| m.product(&SitedMonomial::single(v)))
    }

    pub fn selectors(&self) -> [Selector; 3] {
        self.0
    }

    pub fn selector(&self, site: Site) -> Selector {
        self.0[site.index()]
    }

    pub fn with(mut self, site: Site, sel: Selector) -> SitedMonomial {
        self.0[site.index()] = sel;
        self
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Number of observable factors.
    pub fn degree(&self) -> usize {
        self.0.iter().filter(|s| **s != Selector::Identity).count()
    }

    /// The variables in this monomial, in site order.
    pub fn variables(&self) -> impl Iterator<Item = Variable> + '_ {
        Site::ALL.iter().filter_map(move |&site| {
            self.selector(site)
                .obs()
                .map(|obs| Variable::new(site, obs))
        })
    }

    /// Product of two monomials, or `None` when both carry a factor at the
    /// same site.
    pub fn product(&self, other: &SitedMonomial) -> Option<SitedMonomial> {
        let mut out = *self;
        for site in Site::ALL {
            match (self.selector(site), other.selector(site)) {
                (s, Selector::Identity) => out.0[site.index()] = s,
                (Selector::Identity, s) => out.0[site.index()] = s,
                _ => return None,
            }
        }
        Some(out)
    }

    /// Value at a ±1 (or interior) assignment ordered as [`Variable::ALL`].
    pub fn evaluate<T: Clone + One + core::ops::Mul<Output = T>>(&self, values: &[T; 6]) -> T {
        self.variables()
            .fold(T::one(), |acc, v| acc * values[v.index()].clone())
    }

    pub(crate) fn max_site(&self) -> Option<Site> {
        Site::ALL
            .iter()
            .rev()
            .copied()
            .find(|&s| self.selector(s) != Selector::Identity)
    }
}

impl fmt::Display for SitedMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        for v in self.variables() {
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// A multilinear correlator polynomial with exact coefficients and an
/// optional declared classical bound (`p ≤ bound`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellPolynomial {
    arity: Arity,
    terms: BTreeMap<SitedMonomial, Rational>,
    bound: Option<Rational>,
}

impl BellPolynomial {
    pub fn zero(arity: Arity) -> BellPolynomial {
        BellPolynomial {
            arity,
            terms: BTreeMap::new(),
            bound: None,
        }
    }

    pub fn constant(arity: Arity, value: Rational) -> BellPolynomial {
        let mut p = Self::zero(arity);
        p.add_term(SitedMonomial::IDENTITY, value);
        p
    }

    /// The polynomial consisting of one variable. Site `C` implies arity 3.
    pub fn variable(var: Variable) -> BellPolynomial {
        let arity = if var.site == Site::C {
            Arity::Three
        } else {
            Arity::Two
        };
        let mut p = Self::zero(arity);
        p.add_term(SitedMonomial::single(var), Rational::one());
        p
    }

    /// Builds a polynomial from `(monomial, coefficient)` pairs, merging
    /// repeats and dropping zeros.
    pub fn from_terms<I>(arity: Arity, terms: I) -> Result<BellPolynomial>
    where
        I: IntoIterator<Item = (SitedMonomial, Rational)>,
    {
        let mut p = Self::zero(arity);
        for (m, c) in terms {
            if let Some(site) = m.max_site() {
                if !arity.contains(site) {
                    return Err(invalid(format!(
                        "monomial {m} references site {site:?} outside arity {}",
                        arity.sites()
                    )));
                }
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn bound(&self) -> Option<&Rational> {
        self.bound.as_ref()
    }

    pub fn with_bound(mut self, bound: Rational) -> BellPolynomial {
        self.bound = Some(bound);
        self
    }

    pub fn without_bound(mut self) -> BellPolynomial {
        self.bound = None;
        self
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&SitedMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &SitedMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&SitedMonomial::IDENTITY)
    }

    /// Same terms and bound with the arity raised to at least `arity`.
    pub fn lift(mut self, arity: Arity) -> BellPolynomial {
        self.arity = self.arity.max(arity);
        self
    }

    fn add_term(&mut self, m: SitedMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        if let Some(site) = m.max_site() {
            if site == Site::C {
                self.arity = Arity::Three;
            }
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Multiplies every coefficient by `factor`. A positive factor scales the
    /// declared bound too; otherwise the bound is dropped.
    pub fn scale(&self, factor: &Rational) -> BellPolynomial {
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            out.add_term(*m, c * factor);
        }
        if factor.is_positive() {
            out.bound = self.bound.as_ref().map(|b| b * factor);
        }
        out
    }

    /// Product of two polynomials on disjoint sites. Fails if any pair of
    /// monomials would put two factors on one site. The bound is dropped.
    pub fn product(&self, other: &BellPolynomial) -> Result<BellPolynomial> {
        let mut out = Self::zero(self.arity.max(other.arity));
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1
                    .product(m2)
                    .ok_or_else(|| invalid(format!("product {m1}·{m2} is not multilinear")))?;
                out.add_term(m, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Exact value at an assignment ordered as [`Variable::ALL`]. Entries for
    /// variables the polynomial does not reference are ignored.
    pub fn evaluate(&self, values: &[Rational; 6]) -> Rational {
        self.terms
            .iter()
            .fold(Rational::zero(), |acc, (m, c)| acc + c * m.evaluate(values))
    }

    /// Floating-point evaluation, for interior points of the cube.
    pub fn evaluate_f64(&self, values: &[f64; 6]) -> f64 {
        use num_traits::ToPrimitive;
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64().unwrap_or(f64::NAN) * m.evaluate(values))
            .sum()
    }

    /// Variables appearing in at least one term, in canonical order.
    pub fn referenced_variables(&self) -> Vec<Variable> {
        let mut used = [false; 6];
        for m in self.terms.keys() {
            for v in m.variables() {
                used[v.index()] = true;
            }
        }
        Variable::ALL
            .iter()
            .copied()
            .filter(|v| used[v.index()])
            .collect()
    }

    /// Moves the constant term into the declared bound: `p + k ≤ B` becomes
    /// `p ≤ B − k`.
    pub fn normalize(&self) -> Result<BellPolynomial> {
        let bound = self
            .bound
            .as_ref()
            .ok_or_else(|| invalid("normalize requires a declared bound"))?;
        let k = self.constant_term();
        let mut out = self.clone();
        out.terms.remove(&SitedMonomial::IDENTITY);
        out.bound = Some(bound - k);
        Ok(out)
    }

    /// Rescales by a positive rational so the coefficients are coprime
    /// integers. Returns the scaled polynomial and the factor used.
    pub fn primitive_with_factor(&self) -> (BellPolynomial, Rational) {
        let factor = primitive_factor(self.terms.values());
        (self.scale(&factor), factor)
    }

    /// See [`BellPolynomial::primitive_with_factor`].
    pub fn primitive(&self) -> BellPolynomial {
        self.primitive_with_factor().0
    }

    /// Substitutes `x₁ = v1`, `x₂ = v2` at `site` and returns the polynomial
    /// on the remaining sites, relabelled in order (so reducing `A` of a
    /// three-site polynomial maps `B → A`, `C → B`). The bound carries over.
    pub fn reduce(&self, site: Site, v1: Sign, v2: Sign) -> Result<BellPolynomial> {
        if self.arity != Arity::Three || !self.arity.contains(site) {
            return Err(invalid(format!(
                "cannot reduce site {site:?} of a {}-site polynomial",
                self.arity.sites()
            )));
        }
        let mut out = Self::zero(Arity::Two);
        for (m, c) in &self.terms {
            let factor = match m.selector(site) {
                Selector::Identity => 1,
                Selector::Obs1 => v1.value(),
                Selector::Obs2 => v2.value(),
            };
            let mut kept = [Selector::Identity; 3];
            let mut slot = 0;
            for s in Site::ALL {
                if s != site {
                    kept[slot] = m.selector(s);
                    slot += 1;
                }
            }
            out.add_term(SitedMonomial(kept), c * int(factor));
        }
        out.arity = Arity::Two;
        out.bound = self.bound.clone();
        Ok(out)
    }

    /// [`BellPolynomial::reduce`] with both observables set to `value`.
    pub fn reduce_uniform(&self, site: Site, value: Sign) -> Result<BellPolynomial> {
        self.reduce(site, value, value)
    }

    /// Relabels sites; coefficients and bound are unchanged.
    pub fn permute_sites(&self, perm: &SitePermutation) -> Result<BellPolynomial> {
        if self.arity == Arity::Two && perm.apply(Site::C) != Site::C {
            return Err(invalid(
                "a two-site polynomial can only be permuted within {A, B}",
            ));
        }
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            out.add_term(perm.apply_monomial(m), c.clone());
        }
        out.bound = self.bound.clone();
        Ok(out)
    }
}

pub(crate) fn primitive_factor<'a>(coeffs: impl Iterator<Item = &'a Rational>) -> Rational {
    let mut num_gcd = BigInt::zero();
    let mut den_lcm = BigInt::one();
    for c in coeffs {
        num_gcd = num_gcd.gcd(c.numer());
        den_lcm = den_lcm.lcm(c.denom());
    }
    if num_gcd.is_zero() {
        Rational::one()
    } else {
        Rational::new(den_lcm, num_gcd)
    }
}

impl fmt::Display for BellPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            if m.is_identity() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}{m}")?;
            }
        }
        if let Some(b) = &self.bound {
            write!(f, " <= {b}")?;
        }
        Ok(())
    }
}

fn combine(lhs: &BellPolynomial, rhs: &BellPolynomial, sign: i64) -> BellPolynomial {
    let mut out = lhs.clone();
    out.arity = lhs.arity.max(rhs.arity);
    for (m, c) in &rhs.terms {
        out.add_term(*m, c * int(sign));
    }
    out.bound = match (&lhs.bound, &rhs.bound, sign) {
        (Some(a), Some(b), 1) => Some(a + b),
        _ => None,
    };
    out
}

/// Sum of polynomials. The result's bound is the sum of both bounds when both
/// are declared.
impl Add<&BellPolynomial> for &BellPolynomial {
    type Output = BellPolynomial;
    fn add(self, rhs: &BellPolynomial) -> BellPolynomial {
        combine(self, rhs, 1)
    }
}

impl Add for BellPolynomial {
    type Output = BellPolynomial;
    fn add(self, rhs: BellPolynomial) -> BellPolynomial {
        combine(&self, &rhs, 1)
    }
}

/// Difference of polynomials; the bound is dropped.
impl Sub<&BellPolynomial> for &BellPolynomial {
    type Output = BellPolynomial;
    fn sub(self, rhs: &BellPolynomial) -> BellPolynomial {
        combine(self, rhs, -1)
    }
}

impl Sub for BellPolynomial {
    type Output = BellPolynomial;
    fn sub(self, rhs: BellPolynomial) -> BellPolynomial {
        combine(&self, &rhs, -1)
    }
}

impl Neg for &BellPolynomial {
    type Output = BellPolynomial;
    fn neg(self) -> BellPolynomial {
        self.scale(&int(-1))
    }
}

impl Neg for BellPolynomial {
    type Output = BellPolynomial;
    fn neg(self) -> BellPolynomial {
        self.scale(&int(-1))
    }
}
