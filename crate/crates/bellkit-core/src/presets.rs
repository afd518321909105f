//! Named inequalities, each generated from the constructions rather than
//! typed in.

use alloc::format;

use crate::error::{invalid, Result};
use crate::polynomial::{
    three_qubit_family, universal_inequality, BellPolynomial, FamilyParams, ProbabilityForm, Site,
    SitePermutation,
};

/// The catalog entries shipped with the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Preset {
    /// The family at `u = r = s = t = 0`: the three-qubit full-correlation
    /// inequality with bound 2.
    Mabk,
    /// The family at `(u, r, s, t) = (2, 8, 4, 4)`, in coprime integer form
    /// (bound 8).
    Pi5,
    /// The alternative construction violated by all pure entangled states,
    /// bound 4.
    Ci6,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Mabk, Preset::Pi5, Preset::Ci6];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Mabk => "mabk",
            Preset::Pi5 => "pi5",
            Preset::Ci6 => "ci6",
        }
    }

    pub fn from_name(name: &str) -> Result<Preset> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| {
                invalid(format!(
                    "unknown preset {name:?}; expected mabk, pi5 or ci6"
                ))
            })
    }

    pub fn polynomial(self) -> BellPolynomial {
        match self {
            Preset::Mabk => family(0, 0, 0, 0),
            Preset::Pi5 => family(2, 8, 4, 4).primitive(),
            Preset::Ci6 => universal_inequality(),
        }
    }

    /// Coprime integer probability form. For `pi5` the sites are relabeled
    /// by [`pi5_relabeling`] first, which yields the `K = 0` form of the
    /// published probability inequality.
    pub fn probability_form(self) -> ProbabilityForm {
        let p = match self {
            Preset::Pi5 => self
                .polynomial()
                .permute_sites(&pi5_relabeling().inverse())
                .expect("three-site polynomial"),
            _ => self.polynomial(),
        };
        p.to_probability_form()
            .expect("presets declare a bound")
            .primitive()
    }
}

fn family(u: i64, r: i64, s: i64, t: i64) -> BellPolynomial {
    let p = FamilyParams::from_integers(u, r, s, t).expect("non-negative parameters");
    three_qubit_family(&p).expect("valid parameters")
}

/// `A → C`, `B → A`, `C → B`: carries the probability-form labeling of the
/// `pi5` inequality onto the family's labeling.
pub fn pi5_relabeling() -> SitePermutation {
    SitePermutation::new([Site::C, Site::A, Site::B]).expect("a 3-cycle")
}
