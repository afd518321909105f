//! Maximal quantum violation over measurement settings.
//!
//! The objective is the largest eigenvalue of the assembled operator, which
//! already maximizes over states. Settings are searched with a multistart
//! Nelder–Mead simplex; starting points come from a seeded SplitMix64
//! stream, so identical configurations give bit-identical results.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, TAU};

use num_traits::{Signed, ToPrimitive};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{invalid, Result};
use crate::linalg::{jacobi_eigenvalues, CMatrix};
use crate::polynomial::{
    e_double_prime, e_prime, int, three_qubit_family, Arity, BellPolynomial, FamilyParams,
    Rational, Selector,
};
use crate::quantum::{
    assemble_fast, assemble_operator, bloch_observable, float_terms, identity2, quartic_root_max,
    BlochVector, MeasurementSettings,
};

/// How each site's pair of observables is parameterized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SearchSpace {
    /// `Obs1 = σx`, `Obs2 = σy` everywhere; nothing to search.
    FixedXy,
    /// Orthogonal Bloch vectors at each site: a direction `(θ, φ)` for the
    /// first observable and a rotation `ψ` of the second about it.
    Orthogonal,
    /// Both observables free in the xy-plane (one azimuth each).
    XyPlane,
    /// Both observables free on the sphere (`θ, φ` each).
    FullSphere,
}

impl SearchSpace {
    pub fn params_per_site(self) -> usize {
        match self {
            SearchSpace::FixedXy => 0,
            SearchSpace::Orthogonal => 3,
            SearchSpace::XyPlane => 2,
            SearchSpace::FullSphere => 4,
        }
    }

    /// Parameters realizing `σx/σy` at one site.
    fn xy_point(self) -> &'static [f64] {
        match self {
            SearchSpace::FixedXy => &[],
            SearchSpace::Orthogonal => &[FRAC_PI_2, 0.0, FRAC_PI_2],
            SearchSpace::XyPlane => &[0.0, FRAC_PI_2],
            SearchSpace::FullSphere => &[FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_2],
        }
    }

    /// Observables of one site from its parameter slice.
    pub fn site_observables(self, params: &[f64]) -> [BlochVector; 2] {
        match self {
            SearchSpace::FixedXy => [BlochVector::X, BlochVector::Y],
            SearchSpace::Orthogonal => {
                let (theta, phi, psi) = (params[0], params[1], params[2]);
                let (st, ct) = (libm::sin(theta), libm::cos(theta));
                let (sp, cp) = (libm::sin(phi), libm::cos(phi));
                let n = BlochVector::from_angles(theta, phi);
                // orthonormal frame perpendicular to n
                let e1 = [ct * cp, ct * sp, -st];
                let e2 = [-sp, cp, 0.0];
                let (s, c) = (libm::sin(psi), libm::cos(psi));
                let m = from_raw([
                    c * e1[0] + s * e2[0],
                    c * e1[1] + s * e2[1],
                    c * e1[2] + s * e2[2],
                ]);
                [n, m]
            }
            SearchSpace::XyPlane => [
                BlochVector::in_xy_plane(params[0]),
                BlochVector::in_xy_plane(params[1]),
            ],
            SearchSpace::FullSphere => [
                BlochVector::from_angles(params[0], params[1]),
                BlochVector::from_angles(params[2], params[3]),
            ],
        }
    }

    /// Settings for all sites from a flat parameter vector.
    pub fn settings(self, arity: Arity, params: &[f64]) -> MeasurementSettings {
        let k = self.params_per_site();
        let sites = (0..arity.sites())
            .map(|i| self.site_observables(&params[i * k..(i + 1) * k]))
            .collect();
        MeasurementSettings::new(sites).expect("arity has 2 or 3 sites")
    }
}

/// Renormalizes a vector that is unit up to rounding.
fn from_raw(v: [f64; 3]) -> BlochVector {
    let n = libm::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    BlochVector::new(v[0] / n, v[1] / n, v[2] / n).expect("normalized")
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub seed: u64,
    /// Spread of objective values across the simplex at which a restart
    /// stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub search_space: SearchSpace,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 64,
            seed: 0x5EED,
            tolerance: 1e-9,
            max_iterations: 2000,
            search_space: SearchSpace::Orthogonal,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(invalid("at least one restart is required"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(invalid("max_iterations must be positive"));
        }
        Ok(())
    }
}

/// Uniform draws in `[0, 1)` from a SplitMix64 stream.
pub(crate) struct Uniform(SplitMix64);

impl Uniform {
    pub(crate) fn new(seed: u64) -> Uniform {
        Uniform(SplitMix64::seed_from_u64(seed))
    }

    pub(crate) fn next(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A point with every coordinate uniform in `[0, 2π)`.
    pub(crate) fn angles(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| TAU * self.next()).collect()
    }
}

/// Outcome of one simplex run (minimization).
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexOutcome {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Initial simplex edge length, in radians.
const SIMPLEX_STEP: f64 = 0.4;

/// Nelder–Mead minimization with standard coefficients (reflection 1,
/// expansion 2, contraction ½, shrink ½).
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    start: &[f64],
    tolerance: f64,
    max_iterations: usize,
) -> SimplexOutcome {
    let n = start.len();
    if n == 0 {
        return SimplexOutcome {
            point: Vec::new(),
            value: f(start),
            iterations: 0,
            converged: true,
        };
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += SIMPLEX_STEP;
        let v = f(&p);
        simplex.push((p, v));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[n].1 - simplex[0].1).abs() <= tolerance {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for (p, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };
        let worst = simplex[n].0.clone();
        let reflected = along(-1.0, &worst);
        let fr = f(&reflected);
        if fr < simplex[0].1 {
            let expanded = along(-2.0, &worst);
            let fe = f(&expanded);
            simplex[n] = if fe < fr {
                (expanded, fe)
            } else {
                (reflected, fr)
            };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
            continue;
        }
        let (contracted, fc) = if fr < simplex[n].1 {
            let p = along(-0.5, &worst);
            let v = f(&p);
            (p, v)
        } else {
            let p = along(0.5, &worst);
            let v = f(&p);
            (p, v)
        };
        if fc < fr.min(simplex[n].1) {
            simplex[n] = (contracted, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (p, v) in simplex.iter_mut().skip(1) {
            for (x, b) in p.iter_mut().zip(&best) {
                *x = b + 0.5 * (*x - b);
            }
            *v = f(p);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (point, value) = simplex.swap_remove(0);
    SimplexOutcome {
        point,
        value,
        iterations,
        converged,
    }
}

/// Fast evaluation of `λ_max` for a fixed polynomial as settings vary.
pub(crate) struct EigenObjective {
    terms: Vec<([Selector; 3], f64)>,
    arity: Arity,
    space: SearchSpace,
}

impl EigenObjective {
    pub(crate) fn new(p: &BellPolynomial, space: SearchSpace) -> EigenObjective {
        EigenObjective {
            terms: float_terms(p),
            arity: p.arity(),
            space,
        }
    }

    pub(crate) fn matrix(&self, params: &[f64]) -> CMatrix {
        let settings = self.space.settings(self.arity, params);
        let factors: Vec<[CMatrix; 3]> = settings
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
        assemble_fast(&self.terms, &factors)
    }

    pub(crate) fn value(&self, params: &[f64]) -> f64 {
        match jacobi_eigenvalues(&self.matrix(params)) {
            Ok(v) => v[v.len() - 1],
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartStats {
    pub start_value: f64,
    pub final_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViolationResult {
    pub value: f64,
    pub settings: MeasurementSettings,
    /// Flat parameter vector of the best settings in the search space.
    pub parameters: Vec<f64>,
    /// `value / bound`.
    pub factor: f64,
    pub bound: f64,
    pub best_restart: usize,
    pub restarts: Vec<RestartStats>,
}

/// Best-of-restarts maximum of `λ_max` over settings. Restart 0 starts at
/// `σx/σy`; the rest start uniformly at random.
pub fn max_violation(p: &BellPolynomial, cfg: &OptimizerConfig) -> Result<ViolationResult> {
    cfg.validate()?;
    let bound = p
        .bound()
        .ok_or_else(|| invalid("violation factor requires a declared bound"))?;
    if !bound.is_positive() {
        return Err(invalid(format!(
            "violation factor needs a positive bound, got {bound}"
        )));
    }
    let bound = bound.to_f64().unwrap_or(f64::NAN);
    let objective = EigenObjective::new(p, cfg.search_space);
    let dim = cfg.search_space.params_per_site() * p.arity().sites();
    let xy: Vec<f64> = cfg.search_space.xy_point().repeat(p.arity().sites());

    let mut rng = Uniform::new(cfg.seed);
    let mut stats = Vec::with_capacity(cfg.restarts);
    let mut best: Option<(f64, Vec<f64>, usize)> = None;
    let restarts = if dim == 0 { 1 } else { cfg.restarts };
    for i in 0..restarts {
        let start = if i == 0 { xy.clone() } else { rng.angles(dim) };
        let start_value = objective.value(&start);
        let out = nelder_mead(
            |x| -objective.value(x),
            &start,
            cfg.tolerance,
            cfg.max_iterations,
        );
        let (value, point) = if -out.value >= start_value {
            (-out.value, out.point)
        } else {
            (start_value, start)
        };
        stats.push(RestartStats {
            start_value,
            final_value: value,
            iterations: out.iterations,
            converged: out.converged,
        });
        if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
            best = Some((value, point, i));
        }
    }
    let (value, parameters, best_restart) = best.expect("at least one restart");
    Ok(ViolationResult {
        value,
        settings: cfg.search_space.settings(p.arity(), &parameters),
        parameters,
        factor: value / bound,
        bound,
        best_restart,
        restarts: stats,
    })
}

/// `λ_max` of `p` at the `σx/σy` settings.
pub fn fixed_xy_max(p: &BellPolynomial) -> Result<f64> {
    assemble_operator(p, &MeasurementSettings::fixed_xy(p.arity()))?.max_eigenvalue()
}

/// `(r, λ_max(E′(r)))` per grid point, from the characteristic quartic.
pub fn sweep_r(r_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    r_grid
        .iter()
        .map(|&r| Ok((r, quartic_root_max(r)?)))
        .collect()
}

/// `λ_max(E″(s, t))` at `σx/σy`; approaches its asymptote as `s, t` grow.
pub fn e_double_prime_max(s: f64, t: f64) -> Result<f64> {
    let to_rat = |x: f64| {
        Rational::from_float(x).ok_or_else(|| invalid(format!("{x} is not a finite number")))
    };
    fixed_xy_max(&e_double_prime(&to_rat(s)?, &to_rat(t)?)?)
}

/// `λ_max(E′(r))` at `σx/σy` by direct diagonalization.
pub fn e_prime_max(r: f64) -> Result<f64> {
    let r =
        Rational::from_float(r).ok_or_else(|| invalid(format!("{r} is not a finite number")))?;
    fixed_xy_max(&e_prime(&r)?)
}

/// Empirically optimal `(r, s, t)` for a given `u`: `(4u, 2u, 2u)` up to
/// `u = 2`, `(4 + 2u, 2 + u, 2 + u)` beyond.
pub fn optimal_params(u: &Rational) -> Result<FamilyParams> {
    if u.is_negative() {
        return Err(invalid(format!("u must be non-negative, got {u}")));
    }
    let two = int(2);
    if *u <= two {
        FamilyParams::new(u.clone(), int(4) * u, &two * u, &two * u)
    } else {
        FamilyParams::new(u.clone(), int(4) + &two * u, &two + u, &two + u)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub u: Rational,
    pub params: FamilyParams,
    pub value: f64,
    pub factor: f64,
}

/// Maximal violation factor of the optimal family member at each `u`.
pub fn sweep_u(u_grid: &[Rational], cfg: &OptimizerConfig) -> Result<Vec<SweepRow>> {
    u_grid
        .iter()
        .map(|u| {
            let params = optimal_params(u)?;
            let res = max_violation(&three_qubit_family(&params)?, cfg)?;
            Ok(SweepRow {
                u: u.clone(),
                params,
                value: res.value,
                factor: res.factor,
            })
        })
        .collect()
}

/// `n + 1` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(invalid(format!("bad grid [{lo}, {hi}] with {steps} steps")));
    }
    Ok((0..=steps)
        .map(|i| lo + (hi - lo) * i as f64 / steps as f64)
        .collect())
}

/// Rationals `lo + (hi − lo)·i/steps` for `i = 0..=steps`.
pub fn rational_grid(lo: &Rational, hi: &Rational, steps: usize) -> Result<Vec<Rational>> {
    if steps == 0 || lo > hi {
        return Err(invalid(format!("bad grid [{lo}, {hi}] with {steps} steps")));
    }
    let n = Rational::from_integer((steps as i64).into());
    Ok((0..=steps)
        .map(|i| {
            let i = Rational::from_integer((i as i64).into());
            lo + (hi - lo) * i / &n
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::chsh;
    use core::f64::consts::SQRT_2;

    #[test]
    fn simplex_finds_quadratic_minimum() {
        let out = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2),
            &[0.0, 0.0],
            1e-14,
            5000,
        );
        assert!(out.converged);
        assert!((out.point[0] - 1.0).abs() < 1e-5);
        assert!((out.point[1] + 0.5).abs() < 1e-5);
    }

    #[test]
    fn search_spaces_reproduce_xy_at_seed_point() {
        for space in [
            SearchSpace::Orthogonal,
            SearchSpace::XyPlane,
            SearchSpace::FullSphere,
        ] {
            let [a, b] = space.site_observables(space.xy_point());
            for (got, want) in [(a, BlochVector::X), (b, BlochVector::Y)] {
                for (g, w) in got.components().iter().zip(want.components()) {
                    assert!((g - w).abs() < 1e-15, "{space:?}");
                }
            }
        }
    }

    #[test]
    fn orthogonal_pairs_are_orthogonal() {
        let mut rng = Uniform::new(3);
        for _ in 0..100 {
            let [a, b] = SearchSpace::Orthogonal.site_observables(&rng.angles(3));
            assert!(a.dot(&b).abs() < 1e-12);
        }
    }

    #[test]
    fn chsh_tsirelson() {
        let cfg = OptimizerConfig {
            restarts: 4,
            search_space: SearchSpace::FullSphere,
            ..OptimizerConfig::default()
        };
        let res = max_violation(&chsh(1).unwrap(), &cfg).unwrap();
        assert!((res.value - 2.0 * SQRT_2).abs() < 1e-7);
        assert!((res.factor - SQRT_2).abs() < 1e-7);
        assert_eq!(res.restarts.len(), 4);
    }

    #[test]
    fn requires_positive_bound() {
        let cfg = OptimizerConfig::default();
        assert!(max_violation(&chsh(1).unwrap().without_bound(), &cfg).is_err());
        assert!(max_violation(&chsh(1).unwrap().with_bound(int(0)), &cfg).is_err());
        let bad = OptimizerConfig { restarts: 0, ..cfg };
        assert!(max_violation(&chsh(1).unwrap(), &bad).is_err());
    }

    #[test]
    fn optimal_param_rules() {
        let p = optimal_params(&int(1)).unwrap();
        assert_eq!((p.r(), p.s(), p.t()), (&int(4), &int(2), &int(2)));
        let p = optimal_params(&int(2)).unwrap();
        assert_eq!((p.r(), p.s(), p.t()), (&int(8), &int(4), &int(4)));
        let p = optimal_params(&int(4)).unwrap();
        assert_eq!((p.r(), p.s(), p.t()), (&int(12), &int(6), &int(6)));
        assert!(optimal_params(&int(-1)).is_err());
    }

    #[test]
    fn sweep_r_endpoints() {
        let rows = sweep_r(&[0.0, 1.0, 1e6]).unwrap();
        assert!((rows[0].1 - 2.0 * SQRT_2).abs() < 1e-12);
        assert!(rows[1].1 < rows[0].1 && rows[2].1 < rows[1].1);
        assert!(sweep_r(&[-1.0]).is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(linear_grid(0.0, 1.0, 1).unwrap(), vec![0.0, 1.0]);
        assert!(linear_grid(1.0, 0.0, 3).is_err());
        assert_eq!(
            rational_grid(&int(0), &int(4), 2).unwrap(),
            vec![int(0), int(2), int(4)]
        );
    }
}
