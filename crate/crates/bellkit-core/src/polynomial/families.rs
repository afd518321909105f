//! The inequality families: CHSH polynomials, projector subtraction and the
//! three-qubit `F·c₁ + G·c₂ + H` construction.

use alloc::format;

use num_traits::{Signed, Zero};

use super::{int, ratio, Arity, BellPolynomial, Obs, Rational, Sign, Site, Variable};
use crate::error::{invalid, Result};

fn var(site: Site, obs: Obs) -> BellPolynomial {
    BellPolynomial::variable(Variable::new(site, obs))
}

fn prod(x: &BellPolynomial, y: &BellPolynomial) -> BellPolynomial {
    x.product(y).expect("factors live on distinct sites")
}

fn constant(c: Rational) -> BellPolynomial {
    BellPolynomial::constant(Arity::Two, c)
}

/// The CHSH polynomial `E_k`, `k ∈ 1..=4`, with declared bound 2.
///
/// All four correlators carry coefficient −1 except the `k`-th in the order
/// `a₁b₁, a₁b₂, a₂b₁, a₂b₂`, which carries +1.
pub fn chsh(k: usize) -> Result<BellPolynomial> {
    if !(1..=4).contains(&k) {
        return Err(invalid(format!("CHSH index must be in 1..=4, got {k}")));
    }
    let mut p = BellPolynomial::zero(Arity::Two);
    for (i, (oa, ob)) in [
        (Obs::One, Obs::One),
        (Obs::One, Obs::Two),
        (Obs::Two, Obs::One),
        (Obs::Two, Obs::Two),
    ]
    .into_iter()
    .enumerate()
    {
        let sign = if i + 1 == k { 1 } else { -1 };
        p = p + prod(&var(Site::A, oa), &var(Site::B, ob)).scale(&int(sign));
    }
    Ok(p.with_bound(int(2)))
}

/// The projector term `(1 ± x)/2` for one observable.
pub fn projector(site: Site, obs: Obs, sign: Sign) -> BellPolynomial {
    let half = ratio(1, 2);
    let arity = if site == Site::C {
        Arity::Three
    } else {
        Arity::Two
    };
    BellPolynomial::constant(arity, half.clone())
        + var(site, obs).scale(&(half * int(sign.value())))
}

fn projector_pair(first: (Site, Obs), second: (Site, Obs), sign: Sign) -> BellPolynomial {
    prod(
        &projector(first.0, first.1, sign),
        &projector(second.0, second.1, sign),
    )
}

fn require_non_negative(name: &str, x: &Rational) -> Result<()> {
    if x.is_negative() {
        Err(invalid(format!("{name} must be non-negative, got {x}")))
    } else {
        Ok(())
    }
}

/// `E′(r) = E₁ − r·P⁺(a₂)P⁺(b₂)`, declared bound 2.
pub fn e_prime(r: &Rational) -> Result<BellPolynomial> {
    require_non_negative("r", r)?;
    let sub = projector_pair((Site::A, Obs::Two), (Site::B, Obs::Two), Sign::Plus).scale(r);
    Ok((&chsh(1)? - &sub).with_bound(int(2)))
}

/// `E″(s, t) = E₄ − s·P⁺(a₁)P⁺(b₂) − t·P⁺(a₂)P⁺(b₁)`, declared bound 2.
pub fn e_double_prime(s: &Rational, t: &Rational) -> Result<BellPolynomial> {
    require_non_negative("s", s)?;
    require_non_negative("t", t)?;
    let sub_s = projector_pair((Site::A, Obs::One), (Site::B, Obs::Two), Sign::Plus).scale(s);
    let sub_t = projector_pair((Site::A, Obs::Two), (Site::B, Obs::One), Sign::Plus).scale(t);
    Ok((&(&chsh(4)? - &sub_s) - &sub_t).with_bound(int(2)))
}

/// Parameters `(u, r, s, t)` of the three-qubit family; all non-negative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyParams {
    u: Rational,
    r: Rational,
    s: Rational,
    t: Rational,
}

impl FamilyParams {
    pub fn new(u: Rational, r: Rational, s: Rational, t: Rational) -> Result<FamilyParams> {
        for (name, x) in [("u", &u), ("r", &r), ("s", &s), ("t", &t)] {
            require_non_negative(name, x)?;
        }
        Ok(FamilyParams { u, r, s, t })
    }

    pub fn from_integers(u: i64, r: i64, s: i64, t: i64) -> Result<FamilyParams> {
        Self::new(int(u), int(r), int(s), int(t))
    }

    pub fn u(&self) -> &Rational {
        &self.u
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }

    pub fn t(&self) -> &Rational {
        &self.t
    }

    /// The classical bound `2 + u` of the assembled family.
    pub fn bound(&self) -> Rational {
        int(2) + &self.u
    }
}

/// Two-site polynomials `F`, `G`, `H` defining `F·c₁ + G·c₂ + H ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeQubitConstruction {
    pub f: BellPolynomial,
    pub g: BellPolynomial,
    pub h: BellPolynomial,
    pub bound: Rational,
}

impl ThreeQubitConstruction {
    /// Solves for `F`, `G`, `H` given the reductions at
    /// `(c₁, c₂) = (+,+)`, `(−,+)` and `(−,−)`:
    /// `F = (pp − mp)/2`, `H = (pp + mm)/2`, `G = pp − F − H`.
    pub fn from_reductions(
        pp: &BellPolynomial,
        mp: &BellPolynomial,
        mm: &BellPolynomial,
        bound: Rational,
    ) -> ThreeQubitConstruction {
        let half = ratio(1, 2);
        let f = (pp - mp).scale(&half).without_bound();
        let h = (pp + mm).scale(&half).without_bound();
        let g = (&(pp - &f) - &h).without_bound();
        ThreeQubitConstruction { f, g, h, bound }
    }

    /// `F·c₁ + G·c₂ + H`, expanded, with the construction's bound.
    pub fn assemble(&self) -> BellPolynomial {
        let c1 = var(Site::C, Obs::One);
        let c2 = var(Site::C, Obs::Two);
        let p = prod(&self.f, &c1) + prod(&self.g, &c2) + self.h.clone().lift(Arity::Three);
        p.without_bound().with_bound(self.bound.clone())
    }

    /// The two-site polynomial `c₁·F + c₂·G + H` at extremal `c₁, c₂`.
    pub fn reduced(&self, c1: Sign, c2: Sign) -> BellPolynomial {
        let p = self.f.scale(&int(c1.value())).without_bound()
            + self.g.scale(&int(c2.value())).without_bound()
            + self.h.clone();
        p.without_bound().with_bound(self.bound.clone())
    }
}

/// `F`, `G`, `H` of the three-qubit family, chosen so that the reductions at
/// `(+,+)`, `(+,−)`, `(−,−)` are `E″ + u`, `E′ + u` and `−(2+u)E₄/2`.
pub fn family_components(p: &FamilyParams) -> Result<ThreeQubitConstruction> {
    let e4 = chsh(4)?.without_bound();
    let ep = e_prime(&p.r)?.without_bound();
    let epp = e_double_prime(&p.s, &p.t)?.without_bound();
    let quarter_w = (int(2) + &p.u) * ratio(1, 4);
    let half = ratio(1, 2);
    let half_u = constant(&p.u * &half);

    let f = e4.scale(&quarter_w) + ep.scale(&half) + half_u.clone();
    let g = (&epp - &ep).scale(&half);
    let h = e4.scale(&-quarter_w) + epp.scale(&half) + half_u;
    Ok(ThreeQubitConstruction {
        f: f.without_bound(),
        g: g.without_bound(),
        h: h.without_bound(),
        bound: p.bound(),
    })
}

/// The assembled three-qubit family `F·c₁ + G·c₂ + H ≤ 2 + u`.
///
/// The result keeps the raw rational coefficients; call
/// [`BellPolynomial::primitive`] for the integer presentation (for
/// `(u, r, s, t) = (2, 8, 4, 4)` that doubles everything, bound 8).
pub fn three_qubit_family(p: &FamilyParams) -> Result<BellPolynomial> {
    Ok(family_components(p)?.assemble())
}

/// The alternative construction whose reductions are
/// `F+G+H = 2 − w·P⁺(a₁)P⁺(b₂) − w·P⁺(a₂)P⁺(b₁)`, `−F+G+H = E₄` and
/// `−F−G+H = 2 − w·P⁻(a₁)P⁻(b₁) − w·P⁻(a₂)P⁻(b₂)`, all with bound 2.
///
/// Only `w ≥ 4` gives a valid classical bound; [`universal_inequality`] uses
/// `w = 4`.
pub fn universal_construction(weight: &Rational) -> Result<ThreeQubitConstruction> {
    require_non_negative("weight", weight)?;
    let two = constant(int(2));
    let pp = &(&two
        - &projector_pair((Site::A, Obs::One), (Site::B, Obs::Two), Sign::Plus).scale(weight))
        - &projector_pair((Site::A, Obs::Two), (Site::B, Obs::One), Sign::Plus).scale(weight);
    let mm = &(&two
        - &projector_pair((Site::A, Obs::One), (Site::B, Obs::One), Sign::Minus).scale(weight))
        - &projector_pair((Site::A, Obs::Two), (Site::B, Obs::Two), Sign::Minus).scale(weight);
    let mp = chsh(4)?.without_bound();
    Ok(ThreeQubitConstruction::from_reductions(
        &pp,
        &mp,
        &mm,
        int(2),
    ))
}

/// The three-qubit inequality violated by all pure entangled states, in
/// constant-free integer form with bound 4.
pub fn universal_inequality() -> BellPolynomial {
    let raw = universal_construction(&int(4))
        .expect("weight is positive")
        .assemble();
    let normalized = raw.normalize().expect("construction declares a bound");
    debug_assert!(normalized.bound().is_some_and(|b| !b.is_zero()));
    normalized.primitive()
}
