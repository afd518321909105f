//! Quantum correspondents of Bell polynomials.
//!
//! Each variable becomes a spin observable `n·σ` with a unit Bloch vector
//! `n`; monomials become tensor products and the polynomial becomes a
//! Hermitian operator on `(C²)^{⊗n}`. The largest eigenvalue is the maximum
//! of the expectation over all pure states.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{invalid, Error, Result};
use crate::linalg::{jacobi_eigen, jacobi_eigenvalues, CMatrix, HermitianEigen};
use crate::polynomial::{Arity, BellPolynomial, Obs, Selector, Site};
use crate::roots::bisect_root;

/// Allowed deviation of `‖n‖` from 1.
pub const UNIT_TOLERANCE: f64 = 1e-12;
/// Allowed `‖M − M†‖_max`, relative to `max(1, ‖M‖_max)`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
/// Largest imaginary part tolerated in an expectation value.
pub const EXPECTATION_IMAG_TOLERANCE: f64 = 1e-10;

/// Unit 3-vector defining the observable `n·σ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector([f64; 3]);

impl BlochVector {
    pub const X: BlochVector = BlochVector([1.0, 0.0, 0.0]);
    pub const Y: BlochVector = BlochVector([0.0, 1.0, 0.0]);
    pub const Z: BlochVector = BlochVector([0.0, 0.0, 1.0]);

    pub fn new(x: f64, y: f64, z: f64) -> Result<BlochVector> {
        let norm = libm::sqrt(x * x + y * y + z * z);
        if (norm - 1.0).abs() > UNIT_TOLERANCE || !norm.is_finite() {
            return Err(invalid(format!(
                "Bloch vector ({x}, {y}, {z}) has norm {norm}, expected 1"
            )));
        }
        Ok(BlochVector([x, y, z]))
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_angles(polar: f64, azimuth: f64) -> BlochVector {
        let (sp, cp) = (libm::sin(polar), libm::cos(polar));
        BlochVector([sp * libm::cos(azimuth), sp * libm::sin(azimuth), cp])
    }

    /// `cos φ·x̂ + sin φ·ŷ`.
    pub fn in_xy_plane(azimuth: f64) -> BlochVector {
        BlochVector([libm::cos(azimuth), libm::sin(azimuth), 0.0])
    }

    /// `sin θ·x̂ + cos θ·ẑ`.
    pub fn in_xz_plane(theta: f64) -> BlochVector {
        BlochVector([libm::sin(theta), 0.0, libm::cos(theta)])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn negated(&self) -> BlochVector {
        BlochVector(self.0.map(|c| -c))
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.0.iter().zip(other.0).map(|(a, b)| a * b).sum()
    }

    pub fn cross(&self, other: &BlochVector) -> [f64; 3] {
        let [a1, a2, a3] = self.0;
        let [b1, b2, b3] = other.0;
        [a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1]
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// The 2×2 identity.
pub fn identity2() -> CMatrix {
    CMatrix::identity(2)
}

/// Pauli matrices σx, σy, σz.
pub fn pauli() -> [CMatrix; 3] {
    let z = c(0.0, 0.0);
    [
        CMatrix::from_rows(2, vec![z, c(1.0, 0.0), c(1.0, 0.0), z]).expect("2x2"),
        CMatrix::from_rows(2, vec![z, c(0.0, -1.0), c(0.0, 1.0), z]).expect("2x2"),
        CMatrix::from_rows(2, vec![c(1.0, 0.0), z, z, c(-1.0, 0.0)]).expect("2x2"),
    ]
}

/// A Hermitian matrix. Hermiticity is checked once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(CMatrix);

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<HermitianOperator> {
        let defect = m.hermiticity_defect();
        let scale = m.max_abs().max(1.0);
        if defect.is_nan() || defect > HERMITICITY_TOLERANCE * scale {
            return Err(invalid(format!(
                "matrix is not Hermitian: ‖M − M†‖_max = {defect:e}"
            )));
        }
        Ok(HermitianOperator(m))
    }

    pub fn identity(dim: usize) -> HermitianOperator {
        HermitianOperator(CMatrix::identity(dim))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn eigen(&self) -> Result<HermitianEigen> {
        jacobi_eigen(&self.0)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        jacobi_eigenvalues(&self.0)
    }

    /// Largest eigenvalue, without eigenvectors.
    pub fn max_eigenvalue(&self) -> Result<f64> {
        Ok(*self.eigenvalues()?.last().expect("non-empty"))
    }
}

/// Largest eigenvalue and a unit eigenvector.
pub fn eigen_max(h: &HermitianOperator) -> Result<(f64, Vec<Complex64>)> {
    let e = h.eigen()?;
    let k = e.values.len() - 1;
    Ok((e.values[k], e.vector(k)))
}

/// [`eigen_max`] on an unchecked matrix; non-Hermitian input is rejected.
pub fn eigen_max_matrix(m: &CMatrix) -> Result<(f64, Vec<Complex64>)> {
    eigen_max(&HermitianOperator::new(m.clone())?)
}

/// The spin observable `n·σ`.
pub fn bloch_observable(n: &BlochVector) -> HermitianOperator {
    let [x, y, z] = n.components();
    HermitianOperator(
        CMatrix::from_rows(2, vec![c(z, 0.0), c(x, -y), c(x, y), c(-z, 0.0)]).expect("2x2"),
    )
}

/// Per site, the Bloch vectors of its two observables.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSettings {
    sites: Vec<[BlochVector; 2]>,
}

impl MeasurementSettings {
    pub fn new(sites: Vec<[BlochVector; 2]>) -> Result<MeasurementSettings> {
        Arity::from_sites(sites.len())?;
        Ok(MeasurementSettings { sites })
    }

    /// `Obs1 = σx`, `Obs2 = σy` at every site.
    pub fn fixed_xy(arity: Arity) -> MeasurementSettings {
        MeasurementSettings {
            sites: vec![[BlochVector::X, BlochVector::Y]; arity.sites()],
        }
    }

    pub fn arity(&self) -> Arity {
        Arity::from_sites(self.sites.len()).expect("validated at construction")
    }

    pub fn observable(&self, site: Site, obs: Obs) -> BlochVector {
        self.sites[site.index()][obs.index()]
    }

    pub fn sites(&self) -> &[[BlochVector; 2]] {
        &self.sites
    }
}

/// Replaces every variable by its spin observable and every monomial by the
/// tensor product of its site factors; the constant maps to the identity.
pub fn assemble_operator(p: &BellPolynomial, m: &MeasurementSettings) -> Result<HermitianOperator> {
    if p.arity() != m.arity() {
        return Err(invalid(format!(
            "polynomial has {} sites but settings have {}",
            p.arity().sites(),
            m.arity().sites()
        )));
    }
    let n = m.arity().sites();
    let factors: Vec<[CMatrix; 3]> = m
        .sites()
        .iter()
        .map(|[o1, o2]| {
            [
                identity2(),
                bloch_observable(o1).into_matrix(),
                bloch_observable(o2).into_matrix(),
            ]
        })
        .collect();
    let mut out = CMatrix::zeros(1 << n);
    for (mono, coeff) in p.terms() {
        let coeff = coeff.to_f64().unwrap_or(f64::NAN);
        let mut prod = CMatrix::identity(1);
        for (k, site_factors) in factors.iter().enumerate() {
            let sel = mono.selector(Site::from_index(k).expect("k < 3"));
            prod = prod.kron(&site_factors[sel as usize]);
        }
        out.add_scaled(&prod, coeff);
    }
    HermitianOperator::new(out)
}

/// Assembles with the coefficient list already reduced to `f64`, for hot
/// optimization loops. `terms` pairs the selectors of each monomial with its
/// coefficient.
pub(crate) fn assemble_fast(terms: &[([Selector; 3], f64)], factors: &[[CMatrix; 3]]) -> CMatrix {
    let n = factors.len();
    let mut out = CMatrix::zeros(1 << n);
    for (sels, coeff) in terms {
        let mut prod = factors[0][sels[0] as usize].clone();
        for k in 1..n {
            prod = prod.kron(&factors[k][sels[k] as usize]);
        }
        out.add_scaled(&prod, *coeff);
    }
    out
}

pub(crate) fn float_terms(p: &BellPolynomial) -> Vec<([Selector; 3], f64)> {
    p.terms()
        .map(|(m, c)| (m.selectors(), c.to_f64().unwrap_or(f64::NAN)))
        .collect()
}

/// A normalized state vector of dimension `2ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState(Vec<Complex64>);

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<PureState> {
        let norm = libm::sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum());
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(invalid(format!("state has norm {norm}, expected 1")));
        }
        Ok(PureState(amplitudes))
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<PureState> {
        let norm = libm::sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum());
        if norm.is_nan() || norm <= 0.0 {
            return Err(invalid("cannot normalize the zero vector"));
        }
        Ok(PureState(
            amplitudes.into_iter().map(|a| a / norm).collect(),
        ))
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// `cos ξ|00⟩ + sin ξ|11⟩` with a flag for product (unentangled) states.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtState {
    pub state: PureState,
    pub is_product: bool,
}

pub fn schmidt_state(xi: f64) -> SchmidtState {
    let (s, co) = (libm::sin(xi), libm::cos(xi));
    let amps = vec![c(co, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)];
    SchmidtState {
        state: PureState(amps),
        is_product: libm::sin(2.0 * xi).abs() < 1e-15,
    }
}

/// `⟨ψ|H|ψ⟩`, rejecting results with a non-negligible imaginary part.
pub fn expectation(psi: &PureState, h: &HermitianOperator) -> Result<f64> {
    if psi.dim() != h.dim() {
        return Err(invalid(format!(
            "state dimension {} does not match operator dimension {}",
            psi.dim(),
            h.dim()
        )));
    }
    let hpsi = h.matrix().mul_vec(psi.amplitudes());
    let value: Complex64 = psi
        .amplitudes()
        .iter()
        .zip(&hpsi)
        .map(|(a, b)| a.conj() * b)
        .sum();
    if value.im.abs() > EXPECTATION_IMAG_TOLERANCE * h.matrix().max_abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "expectation has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

const DOMAIN_SLACK: f64 = 1e-12;

/// Two-site settings `A₁ = σx, A₂ = −σz, B₁,₂ = ±σx sin θ + σz cos θ`.
pub fn eprime_closed_settings(theta: f64) -> MeasurementSettings {
    two_site_settings(BlochVector::X, BlochVector::Z.negated(), theta)
}

/// `A₁ = σz, A₂ = −σx` with the same `B` pair; used for `ξ ∈ [0, π/4]`.
pub fn f1_settings(theta: f64) -> MeasurementSettings {
    two_site_settings(BlochVector::Z, BlochVector::X.negated(), theta)
}

/// `A₁ = −σz, A₂ = −σx` with the same `B` pair; used for `ξ ∈ [π/4, π/2]`.
pub fn f2_settings(theta: f64) -> MeasurementSettings {
    two_site_settings(BlochVector::Z.negated(), BlochVector::X.negated(), theta)
}

fn two_site_settings(a1: BlochVector, a2: BlochVector, theta: f64) -> MeasurementSettings {
    let b1 = BlochVector::in_xz_plane(theta);
    let b2 = BlochVector::in_xz_plane(-theta);
    MeasurementSettings {
        sites: vec![[a1, a2], [b1, b2]],
    }
}

/// Angle maximizing `⟨E′(r)⟩` on the Schmidt state under
/// [`eprime_closed_settings`].
pub fn eprime_optimal_theta(r: f64, xi: f64) -> f64 {
    let s2 = libm::sin(xi) * libm::sin(xi);
    libm::atan(4.0 * libm::sin(2.0 * xi) / (4.0 + r * s2))
}

/// `[(2 + r sin²ξ/2)² + 4 sin²2ξ]^{1/2} − r sin²ξ/2`.
pub fn eprime_closed_max(r: f64, xi: f64) -> f64 {
    let half_rs2 = 0.5 * r * libm::sin(xi) * libm::sin(xi);
    let s2x = libm::sin(2.0 * xi);
    libm::sqrt((2.0 + half_rs2) * (2.0 + half_rs2) + 4.0 * s2x * s2x) - half_rs2
}

/// Maximum over θ of `⟨E″(s,t)⟩` on the Schmidt state with
/// [`f1_settings`], for `ξ ∈ [0, π/4]`.
pub fn f1_closed(s: f64, t: f64, xi: f64) -> Result<f64> {
    check_st(s, t)?;
    if !(-DOMAIN_SLACK..=FRAC_PI_4 + DOMAIN_SLACK).contains(&xi) {
        return Err(invalid(format!(
            "f1 is defined for ξ in [0, π/4], got {xi}"
        )));
    }
    let c2 = libm::cos(2.0 * xi);
    let s2 = libm::sin(2.0 * xi);
    let a = 8.0 + s + (s + t) * c2;
    Ok(-0.25 * (s + t + s * c2) + 0.25 * libm::sqrt(a * a + (8.0 + t) * (8.0 + t) * s2 * s2))
}

/// Counterpart of [`f1_closed`] with [`f2_settings`], for `ξ ∈ [π/4, π/2]`.
pub fn f2_closed(s: f64, t: f64, xi: f64) -> Result<f64> {
    check_st(s, t)?;
    if !(FRAC_PI_4 - DOMAIN_SLACK..=FRAC_PI_2 + DOMAIN_SLACK).contains(&xi) {
        return Err(invalid(format!(
            "f2 is defined for ξ in [π/4, π/2], got {xi}"
        )));
    }
    let c2 = libm::cos(2.0 * xi);
    let s2 = libm::sin(2.0 * xi);
    let a = 8.0 + s - (s + t) * c2;
    Ok(-0.25 * (s + t - s * c2) + 0.25 * libm::sqrt(a * a + (8.0 + t) * (8.0 + t) * s2 * s2))
}

fn check_st(s: f64, t: f64) -> Result<()> {
    if !(s >= 0.0 && t >= 0.0) {
        return Err(invalid(format!(
            "s and t must be non-negative, got ({s}, {t})"
        )));
    }
    Ok(())
}

/// `ε⁴ + rε³ − (r + 8)ε² − 4rε`, the characteristic polynomial of the
/// `E′(r)` operator at `σx/σy` settings.
pub fn eprime_characteristic(r: f64, e: f64) -> f64 {
    let e2 = e * e;
    e2 * e2 + r * e2 * e - (r + 8.0) * e2 - 4.0 * r * e
}

/// Largest root of [`eprime_characteristic`].
///
/// At `r = 0` the polynomial is `ε²(ε² − 8)` and the root is `2√2`. For
/// `r > 0` the polynomial is negative at 2 and positive and increasing from
/// 3 on, so the root is bracketed by `[2, 3]` and found by bisection.
pub fn quartic_root_max(r: f64) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(invalid(format!(
            "r must be a finite non-negative number, got {r}"
        )));
    }
    if r == 0.0 {
        return Ok(2.0 * SQRT_2);
    }
    let (lo, hi) = (2.0, 3.0);
    if eprime_characteristic(r, lo) >= 0.0 || eprime_characteristic(r, hi) <= 0.0 {
        return Err(Error::Numerical(format!(
            "root of the E' quartic not bracketed for r = {r}"
        )));
    }
    bisect_root(|e| eprime_characteristic(r, e), lo, hi, 1e-14)
}
