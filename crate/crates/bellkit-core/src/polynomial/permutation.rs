use alloc::format;

use super::{Selector, Site, SitedMonomial};
use crate::error::{invalid, Result};

/// A bijection of the sites `{A, B, C}`, stored as the image of each site.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SitePermutation([Site; 3]);

impl SitePermutation {
    pub const IDENTITY: SitePermutation = SitePermutation(Site::ALL);

    /// `images[i]` is where site `i` is sent. Fails unless the images are a
    /// permutation of the three sites.
    pub fn new(images: [Site; 3]) -> Result<SitePermutation> {
        let mut hit = [false; 3];
        for s in images {
            hit[s.index()] = true;
        }
        if hit.iter().all(|h| *h) {
            Ok(SitePermutation(images))
        } else {
            Err(invalid(format!(
                "{images:?} is not a permutation of the sites"
            )))
        }
    }

    pub fn apply(&self, site: Site) -> Site {
        self.0[site.index()]
    }

    pub fn images(&self) -> [Site; 3] {
        self.0
    }

    /// `then.compose_after(self)`: first `self`, then `then`.
    pub fn then(&self, then: &SitePermutation) -> SitePermutation {
        SitePermutation(Site::ALL.map(|s| then.apply(self.apply(s))))
    }

    pub fn inverse(&self) -> SitePermutation {
        let mut inv = Site::ALL;
        for s in Site::ALL {
            inv[self.apply(s).index()] = s;
        }
        SitePermutation(inv)
    }

    pub(crate) fn apply_monomial(&self, m: &SitedMonomial) -> SitedMonomial {
        let mut out = [Selector::Identity; 3];
        for s in Site::ALL {
            out[self.apply(s).index()] = m.selector(s);
        }
        SitedMonomial::new(out)
    }
}

impl Default for SitePermutation {
    fn default() -> Self {
        Self::IDENTITY
    }
}
