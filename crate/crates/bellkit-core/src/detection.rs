//! Detection-efficiency thresholds.
//!
//! With detectors of efficiency `ηᵢ`, a joint probability over the sites in
//! `S` is observed with weight `Π_{i∈S} ηᵢ`. An inequality `Σ c_S P(S) ≤ K`
//! is still violated if the operator
//! `J = Σ c_S Π_{i∈S} ηᵢ ⊗ (I + Oᵢ)/2 − K·I` has a positive eigenvalue for
//! some settings. Observables are searched in the xy-plane with the first
//! observable of every site pinned to `σx`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_traits::ToPrimitive;

use crate::error::{invalid, Error, Result};
use crate::linalg::{jacobi_eigenvalues, CMatrix};
use crate::optimize::{nelder_mead, Uniform};
use crate::polynomial::{Arity, ProbabilityForm, Selector};
use crate::quantum::{
    assemble_fast, bloch_observable, identity2, BlochVector, HermitianOperator, MeasurementSettings,
};
use crate::roots::bisect_predicate;

/// Per-site detector efficiencies, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EfficiencyVector([f64; 3]);

impl EfficiencyVector {
    pub fn new(eta1: f64, eta2: f64, eta3: f64) -> Result<EfficiencyVector> {
        for (i, e) in [eta1, eta2, eta3].into_iter().enumerate() {
            if !(0.0..=1.0).contains(&e) {
                return Err(invalid(format!(
                    "efficiency η{} = {e} is outside [0, 1]",
                    i + 1
                )));
            }
        }
        Ok(EfficiencyVector([eta1, eta2, eta3]))
    }

    pub fn uniform(eta: f64) -> Result<EfficiencyVector> {
        Self::new(eta, eta, eta)
    }

    pub fn values(&self) -> [f64; 3] {
        self.0
    }

    /// Product of the efficiencies of the sites an event involves.
    fn weight(&self, selectors: &[Selector; 3]) -> f64 {
        selectors
            .iter()
            .zip(self.0)
            .filter(|(s, _)| **s != Selector::Identity)
            .map(|(_, e)| e)
            .product()
    }
}

/// Which efficiencies vary in a threshold search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    /// `η₁ = η₂ = η₃ = η`.
    Symmetric,
    /// `η₁ = 1`, `η₂ = η₃ = η`.
    OnePerfect,
    /// `η₁ = η₂ = 1`, free `η₃`.
    TwoPerfect,
    /// `η₁ = 1`; minimal `η₃` as a function of `η₂`.
    Frontier,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [
        Scenario::Symmetric,
        Scenario::OnePerfect,
        Scenario::TwoPerfect,
        Scenario::Frontier,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Symmetric => "symmetric",
            Scenario::OnePerfect => "one-perfect",
            Scenario::TwoPerfect => "two-perfect",
            Scenario::Frontier => "frontier",
        }
    }

    pub fn from_name(name: &str) -> Option<Scenario> {
        Scenario::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Efficiencies with the free parameter set to `eta`. For the frontier
    /// this is the `η₂` limit at `η₃ =` [`FRONTIER_ETA3`].
    pub fn efficiencies(self, eta: f64) -> Result<EfficiencyVector> {
        match self {
            Scenario::Symmetric => EfficiencyVector::uniform(eta),
            Scenario::OnePerfect => EfficiencyVector::new(1.0, eta, eta),
            Scenario::TwoPerfect => EfficiencyVector::new(1.0, 1.0, eta),
            Scenario::Frontier => EfficiencyVector::new(1.0, eta, FRONTIER_ETA3),
        }
    }
}

/// `η₃` at which the frontier's `η₂` limit is evaluated.
pub const FRONTIER_ETA3: f64 = 1e-3;

/// Settings families searched for a positive eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AngleSpace {
    /// `Obs1 = σx` and `Obs2 = cos θ σx + sin θ σy` per site.
    XyPinned,
    /// Both observables free on the sphere.
    Sphere,
}

impl AngleSpace {
    fn params_per_site(self) -> usize {
        match self {
            AngleSpace::XyPinned => 1,
            AngleSpace::Sphere => 4,
        }
    }

    fn xy_point(self) -> &'static [f64] {
        match self {
            AngleSpace::XyPinned => &[FRAC_PI_2],
            AngleSpace::Sphere => &[FRAC_PI_2, 0.0, FRAC_PI_2, FRAC_PI_2],
        }
    }

    pub fn settings(self, params: &[f64]) -> MeasurementSettings {
        let k = self.params_per_site();
        let sites = (0..3)
            .map(|i| {
                let p = &params[i * k..(i + 1) * k];
                match self {
                    AngleSpace::XyPinned => [BlochVector::X, BlochVector::in_xy_plane(p[0])],
                    AngleSpace::Sphere => [
                        BlochVector::from_angles(p[0], p[1]),
                        BlochVector::from_angles(p[2], p[3]),
                    ],
                }
            })
            .collect();
        MeasurementSettings::new(sites).expect("three sites")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetectionConfig {
    /// Restarts per angle optimization away from the threshold.
    pub restarts: usize,
    /// Restarts per bisection probe, where the objective is nearly flat.
    pub threshold_restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub space: AngleSpace,
    /// `λ_max` must exceed this to count as a violation.
    pub margin: f64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            restarts: 64,
            threshold_restarts: 128,
            seed: 0x5EED,
            tolerance: 1e-10,
            max_iterations: 2000,
            space: AngleSpace::XyPinned,
            margin: 1e-12,
        }
    }
}

/// `J` for explicit settings.
pub fn efficiency_operator(
    q: &ProbabilityForm,
    eta: &EfficiencyVector,
    m: &MeasurementSettings,
) -> Result<HermitianOperator> {
    if q.arity() != Arity::Three || m.arity() != Arity::Three {
        return Err(invalid("efficiency operators are defined for three sites"));
    }
    let j = EfficiencyObjective::new(q, eta)?.matrix_for(m);
    HermitianOperator::new(j)
}

struct EfficiencyObjective {
    terms: Vec<([Selector; 3], f64)>,
    k: f64,
}

impl EfficiencyObjective {
    fn new(q: &ProbabilityForm, eta: &EfficiencyVector) -> Result<EfficiencyObjective> {
        if q.arity() != Arity::Three {
            return Err(invalid("efficiency operators are defined for three sites"));
        }
        let terms = q
            .terms()
            .map(|(e, c)| {
                let sels = e.selectors();
                (sels, c.to_f64().unwrap_or(f64::NAN) * eta.weight(&sels))
            })
            .collect();
        Ok(EfficiencyObjective {
            terms,
            k: q.bound().to_f64().unwrap_or(f64::NAN),
        })
    }

    fn matrix_for(&self, m: &MeasurementSettings) -> CMatrix {
        let id = identity2();
        let factors: Vec<[CMatrix; 3]> = m
            .sites()
            .iter()
            .map(|[o1, o2]| {
                let proj = |o: &BlochVector| {
                    let mut p = bloch_observable(o).into_matrix().scaled(0.5);
                    p.add_scaled(&id, 0.5);
                    p
                };
                [id.clone(), proj(o1), proj(o2)]
            })
            .collect();
        let mut j = assemble_fast(&self.terms, &factors);
        j.add_scaled(&CMatrix::identity(8), -self.k);
        j
    }

    fn value(&self, space: AngleSpace, params: &[f64]) -> f64 {
        match jacobi_eigenvalues(&self.matrix_for(&space.settings(params))) {
            Ok(v) => v[v.len() - 1],
            Err(_) => f64::NEG_INFINITY,
        }
    }
}

/// Best `λ_max(J)` found over settings.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleOptimum {
    pub lambda: f64,
    /// Flat parameters; for [`AngleSpace::XyPinned`] these are
    /// `(θ_A, θ_B, θ_C)`.
    pub angles: Vec<f64>,
    pub settings: MeasurementSettings,
    pub restarts_used: usize,
}

fn search(
    q: &ProbabilityForm,
    eta: &EfficiencyVector,
    cfg: &DetectionConfig,
    restarts: usize,
    stop_above: Option<f64>,
) -> Result<AngleOptimum> {
    if restarts == 0 {
        return Err(invalid("at least one restart is required"));
    }
    let objective = EfficiencyObjective::new(q, eta)?;
    let dim = 3 * cfg.space.params_per_site();
    let mut rng = Uniform::new(cfg.seed);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut used = 0;
    for i in 0..restarts {
        used += 1;
        let start = if i == 0 {
            cfg.space.xy_point().repeat(3)
        } else {
            rng.angles(dim)
        };
        let out = nelder_mead(
            |x| -objective.value(cfg.space, x),
            &start,
            cfg.tolerance,
            cfg.max_iterations,
        );
        let value = -out.value;
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, out.point));
        }
        if stop_above.is_some_and(|m| value > m) {
            break;
        }
    }
    let (lambda, angles) = best.expect("at least one restart");
    Ok(AngleOptimum {
        lambda,
        settings: cfg.space.settings(&angles),
        angles,
        restarts_used: used,
    })
}

/// Maximizes `λ_max(J)` over settings with `cfg.restarts` restarts.
pub fn max_eigen_over_angles(
    q: &ProbabilityForm,
    eta: &EfficiencyVector,
    cfg: &DetectionConfig,
) -> Result<AngleOptimum> {
    search(q, eta, cfg, cfg.restarts, None)
}

/// Whether some settings give `λ_max(J) > margin`; stops at the first
/// restart that finds one.
pub fn violates(
    q: &ProbabilityForm,
    eta: &EfficiencyVector,
    cfg: &DetectionConfig,
    restarts: usize,
) -> Result<(bool, AngleOptimum)> {
    let opt = search(q, eta, cfg, restarts, Some(cfg.margin))?;
    Ok((opt.lambda > cfg.margin, opt))
}

/// Number of evenly spaced points on `[0, 1]` at which monotonicity of the
/// violation predicate is checked before bisecting.
pub const MONOTONICITY_SAMPLES: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct FrontierPoint {
    pub eta2: f64,
    /// Minimal `η₃`; `None` when `η₂` is too low for any violation.
    pub eta3: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdReport {
    pub scenario: Scenario,
    /// Midpoint of the final bracket; 0 when violation persists at 0.
    pub threshold: f64,
    pub fails_at: f64,
    pub holds_at: f64,
    /// Settings parameters attaining the violation at `holds_at`.
    pub angles: Vec<f64>,
    pub settings: MeasurementSettings,
    /// `λ_max(J)` at `holds_at`.
    pub margin: f64,
    pub iterations: usize,
    pub tolerance: f64,
    pub frontier: Vec<FrontierPoint>,
}

/// Minimal efficiency at which `q` is still violated in `scenario`.
///
/// The predicate is sampled on [`MONOTONICITY_SAMPLES`] points first; if it
/// ever switches back from true to false the search aborts with
/// [`Error::NonMonotone`]. If it fails at full efficiency the result is
/// [`Error::NoViolation`].
pub fn threshold(
    q: &ProbabilityForm,
    scenario: Scenario,
    tol: f64,
    cfg: &DetectionConfig,
) -> Result<ThresholdReport> {
    threshold_along(q, |eta| scenario.efficiencies(eta), scenario, tol, cfg)
}

fn threshold_along<M>(
    q: &ProbabilityForm,
    map: M,
    scenario: Scenario,
    tol: f64,
    cfg: &DetectionConfig,
) -> Result<ThresholdReport>
where
    M: Fn(f64) -> Result<EfficiencyVector>,
{
    if !(tol > 0.0 && tol <= 0.01) {
        return Err(invalid(format!(
            "tolerance must lie in (0, 0.01], got {tol}"
        )));
    }
    let probe = |eta: f64, restarts: usize| violates(q, &map(eta)?, cfg, restarts);

    let (at_one, opt_one) = probe(1.0, cfg.restarts)?;
    if !at_one {
        return Err(Error::NoViolation {
            max_eigenvalue: opt_one.lambda,
        });
    }

    let n = MONOTONICITY_SAMPLES;
    let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let mut samples = Vec::with_capacity(n);
    for &eta in &grid[..n - 1] {
        samples.push((eta, probe(eta, cfg.restarts)?));
    }
    samples.push((1.0, (at_one, opt_one)));
    let first_true = samples
        .iter()
        .position(|(_, (ok, _))| *ok)
        .expect("true at 1");
    if let Some((fails_at, _)) = samples[first_true..].iter().find(|(_, (ok, _))| !ok) {
        return Err(Error::NonMonotone {
            holds_at: samples[first_true].0,
            fails_at: *fails_at,
        });
    }

    let (lo_opt, hi) = if first_true == 0 {
        (None, 0.0)
    } else {
        (Some(samples[first_true - 1].0), samples[first_true].0)
    };
    let Some(lo) = lo_opt else {
        let opt = samples.swap_remove(0).1 .1;
        return Ok(ThresholdReport {
            scenario,
            threshold: 0.0,
            fails_at: 0.0,
            holds_at: 0.0,
            angles: opt.angles,
            settings: opt.settings,
            margin: opt.lambda,
            iterations: 0,
            tolerance: tol,
            frontier: Vec::new(),
        });
    };

    let mut holding = samples.swap_remove(first_true).1 .1;
    let bracket = bisect_predicate(
        |eta| {
            let (ok, opt) = probe(eta, cfg.threshold_restarts)?;
            if ok {
                holding = opt;
            }
            Ok(ok)
        },
        lo,
        hi,
        tol,
    )?;
    Ok(ThresholdReport {
        scenario,
        threshold: 0.5 * (bracket.fails_at + bracket.holds_at),
        fails_at: bracket.fails_at,
        holds_at: bracket.holds_at,
        angles: holding.angles,
        settings: holding.settings,
        margin: holding.lambda,
        iterations: bracket.iterations,
        tolerance: tol,
        frontier: Vec::new(),
    })
}

/// With `η₁ = 1`, the minimal `η₃` for each `η₂` in the grid, together with
/// the `η₂` limit at `η₃ =` [`FRONTIER_ETA3`] as the report's threshold.
pub fn frontier_scan(
    q: &ProbabilityForm,
    eta2_grid: &[f64],
    tol: f64,
    cfg: &DetectionConfig,
) -> Result<ThresholdReport> {
    let mut points = Vec::with_capacity(eta2_grid.len());
    for &eta2 in eta2_grid {
        let inner = threshold_along(
            q,
            |eta3| EfficiencyVector::new(1.0, eta2, eta3),
            Scenario::Frontier,
            tol,
            cfg,
        );
        let eta3 = match inner {
            Ok(rep) => Some(rep.threshold),
            Err(Error::NoViolation { .. }) => None,
            Err(e) => return Err(e),
        };
        points.push(FrontierPoint { eta2, eta3 });
    }
    let mut report = threshold(q, Scenario::Frontier, tol, cfg)?;
    report.frontier = points;
    Ok(report)
}

/// `λ_max(J)` at fixed settings for each efficiency on an even grid of
/// [`MONOTONICITY_SAMPLES`] points; used to check monotonicity directly.
pub fn lambda_profile(
    q: &ProbabilityForm,
    scenario: Scenario,
    m: &MeasurementSettings,
) -> Result<Vec<(f64, f64)>> {
    let n = MONOTONICITY_SAMPLES;
    (0..n)
        .map(|i| {
            let eta = i as f64 / (n - 1) as f64;
            let op = efficiency_operator(q, &scenario.efficiencies(eta)?, m)?;
            Ok((eta, op.max_eigenvalue()?))
        })
        .collect()
}

/// Efficiencies on an even grid, for frontier scans.
pub fn eta_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if points < 2 || !(0.0 <= lo && lo <= hi && hi <= 1.0) {
        return Err(invalid(format!(
            "bad efficiency grid [{lo}, {hi}] with {points} points"
        )));
    }
    Ok((0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::{int, Obs, Site, SitedMonomial, Variable};

    fn trivial_a1() -> ProbabilityForm {
        // P(A1) <= 1, i.e. a1 <= 1
        let e = SitedMonomial::single(Variable::new(Site::A, Obs::One));
        ProbabilityForm::new(Arity::Three, [(e, int(1))], int(1)).unwrap()
    }

    #[test]
    fn efficiency_range_checked() {
        assert!(EfficiencyVector::new(1.1, 0.5, 0.5).is_err());
        assert!(EfficiencyVector::new(-0.1, 0.5, 0.5).is_err());
        assert!(EfficiencyVector::uniform(0.3).is_ok());
    }

    #[test]
    fn zero_efficiency_leaves_minus_k() {
        let q = trivial_a1();
        let m = MeasurementSettings::fixed_xy(Arity::Three);
        let j = efficiency_operator(&q, &EfficiencyVector::uniform(0.0).unwrap(), &m).unwrap();
        let ev = j.eigenvalues().unwrap();
        assert!(ev.iter().all(|v| (v + 1.0).abs() < 1e-14));
    }

    #[test]
    fn non_violating_form_stays_non_positive() {
        let cfg = DetectionConfig {
            restarts: 3,
            ..DetectionConfig::default()
        };
        let opt = max_eigen_over_angles(
            &trivial_a1(),
            &EfficiencyVector::uniform(1.0).unwrap(),
            &cfg,
        )
        .unwrap();
        assert!(opt.lambda <= 1e-12);
        let err = threshold(&trivial_a1(), Scenario::Symmetric, 1e-3, &cfg).unwrap_err();
        assert!(matches!(err, Error::NoViolation { .. }));
    }

    #[test]
    fn two_site_forms_rejected() {
        let e = SitedMonomial::single(Variable::new(Site::A, Obs::One));
        let q = ProbabilityForm::new(Arity::Two, [(e, int(1))], int(1)).unwrap();
        let m = MeasurementSettings::fixed_xy(Arity::Three);
        assert!(efficiency_operator(&q, &EfficiencyVector::uniform(1.0).unwrap(), &m).is_err());
    }

    #[test]
    fn tolerance_range() {
        let cfg = DetectionConfig::default();
        assert!(threshold(&trivial_a1(), Scenario::Symmetric, 0.0, &cfg).is_err());
        assert!(threshold(&trivial_a1(), Scenario::Symmetric, 0.02, &cfg).is_err());
    }

    #[test]
    fn scenario_names_round_trip() {
        for s in Scenario::ALL {
            assert_eq!(Scenario::from_name(s.name()), Some(s));
        }
        assert_eq!(
            Scenario::TwoPerfect.efficiencies(0.25).unwrap().values(),
            [1.0, 1.0, 0.25]
        );
    }

    #[test]
    fn pinned_settings_shape() {
        let m = AngleSpace::XyPinned.settings(&[FRAC_PI_2; 3]);
        for [o1, o2] in m.sites() {
            assert_eq!(*o1, BlochVector::X);
            assert!((o2.dot(&BlochVector::Y) - 1.0).abs() < 1e-15);
        }
    }
}
