use bellkit_core::lhv::vertex_max;
use bellkit_core::optimize::{max_violation, OptimizerConfig, SearchSpace};
use bellkit_core::polynomial::{
    Arity, BellPolynomial, Selector, Site, SitePermutation, SitedMonomial, Variable,
};
use bellkit_core::quantum::{
    assemble_operator, expectation, BlochVector, MeasurementSettings, PureState,
};
use bellkit_core::Rational;
use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn selector() -> impl Strategy<Value = Selector> {
    prop_oneof![
        Just(Selector::Identity),
        Just(Selector::Obs1),
        Just(Selector::Obs2)
    ]
}

/// Three-site polynomials with small integer coefficients and a bound.
fn polynomial() -> impl Strategy<Value = BellPolynomial> {
    let term = ([selector(), selector(), selector()], -6i64..=6);
    (prop::collection::vec(term, 1..12), 0i64..10).prop_map(|(terms, b)| {
        BellPolynomial::from_terms(
            Arity::Three,
            terms
                .into_iter()
                .map(|(s, c)| (SitedMonomial::new(s), Rational::from_integer(c.into()))),
        )
        .unwrap()
        .with_bound(Rational::from_integer(b.into()))
    })
}

/// Rational points of the cube `[−1, 1]⁶`.
fn cube_point() -> impl Strategy<Value = [Rational; 6]> {
    prop::array::uniform6(-8i64..=8).prop_map(|a| a.map(|n| rat(n, 8)))
}

fn permutation() -> impl Strategy<Value = SitePermutation> {
    use Site::{A, B, C};
    prop::sample::select(vec![
        [A, B, C],
        [A, C, B],
        [B, A, C],
        [B, C, A],
        [C, A, B],
        [C, B, A],
    ])
    .prop_map(|images| SitePermutation::new(images).unwrap())
}

fn settings() -> impl Strategy<Value = MeasurementSettings> {
    prop::collection::vec(0.0..std::f64::consts::TAU, 12).prop_map(|a| {
        MeasurementSettings::new(
            (0..3)
                .map(|i| {
                    [
                        BlochVector::from_angles(a[4 * i], a[4 * i + 1]),
                        BlochVector::from_angles(a[4 * i + 2], a[4 * i + 3]),
                    ]
                })
                .collect(),
        )
        .unwrap()
    })
}

fn state() -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 8)
        .prop_filter("non-zero", |v| {
            v.iter().any(|(re, im)| re.abs() + im.abs() > 1e-3)
        })
        .prop_map(|v| {
            PureState::normalized(
                v.into_iter()
                    .map(|(re, im)| Complex64::new(re, im))
                    .collect(),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn evaluation_is_affine_in_each_variable(
        p in polynomial(), x in cube_point(), k in 0usize..6, y in -8i64..=8, lambda in 0i64..=4,
    ) {
        let lambda = rat(lambda, 4);
        let mut at_y = x.clone();
        at_y[k] = rat(y, 8);
        let mut mixed = x.clone();
        mixed[k] = &lambda * &x[k] + (Rational::one() - &lambda) * &at_y[k];
        let expected = &lambda * p.evaluate(&x) + (Rational::one() - &lambda) * p.evaluate(&at_y);
        prop_assert_eq!(p.evaluate(&mixed), expected);
    }

    #[test]
    fn vertex_maximum_dominates_the_cube(p in polynomial(), x in cube_point()) {
        let res = vertex_max(&p);
        prop_assert!(p.evaluate(&x) <= res.maximum);
        prop_assert_eq!(p.evaluate(&res.witness.as_point()), res.maximum);
    }

    #[test]
    fn vertex_maximum_is_permutation_invariant(p in polynomial(), perm in permutation()) {
        let q = p.permute_sites(&perm).unwrap();
        prop_assert_eq!(vertex_max(&q).maximum, vertex_max(&p).maximum);
        prop_assert_eq!(q.permute_sites(&perm.inverse()).unwrap(), p);
    }

    #[test]
    fn positive_scaling_scales_the_maximum(p in polynomial(), n in 1i64..20, d in 1i64..20) {
        let f = rat(n, d);
        prop_assert_eq!(vertex_max(&p.scale(&f)).maximum, vertex_max(&p).maximum * f);
    }

    #[test]
    fn primitive_form_has_coprime_integer_coefficients(p in polynomial()) {
        prop_assume!(!p.is_zero());
        let (q, factor) = p.primitive_with_factor();
        prop_assert!(factor > Rational::zero());
        let mut g = num_bigint::BigInt::zero();
        for (_, c) in q.terms() {
            prop_assert!(c.is_integer());
            g = num_integer::Integer::gcd(&g, c.numer());
        }
        prop_assert!(g.is_one());
    }

    #[test]
    fn probability_form_round_trips(p in polynomial()) {
        let q = p.to_probability_form().unwrap();
        prop_assert_eq!(q.to_bell_polynomial(), p.normalize().unwrap());
    }

    #[test]
    fn probability_form_preserves_the_gap_at_vertices(p in polynomial(), signs in prop::array::uniform6(any::<bool>())) {
        let x = signs.map(|s| if s { Rational::one() } else { -Rational::one() });
        let probs = x.clone().map(|v| (Rational::one() + v) / Rational::from_integer(2.into()));
        let q = p.to_probability_form().unwrap();
        let lhs = q
            .terms()
            .fold(Rational::zero(), |acc, (m, c)| acc + c * m.evaluate(&probs))
            - q.bound();
        prop_assert_eq!(lhs, p.evaluate(&x) - p.bound().unwrap());
    }

    #[test]
    fn operators_are_hermitian_with_consistent_spectra(p in polynomial(), m in settings(), psi in state()) {
        let h = assemble_operator(&p, &m).unwrap();
        let eig = h.eigenvalues().unwrap();
        let trace: f64 = eig.iter().sum();
        prop_assert!((trace - h.matrix().trace().re).abs() < 1e-9 * (1.0 + trace.abs()));
        let top = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!((top - h.max_eigenvalue().unwrap()).abs() < 1e-12 * (1.0 + top.abs()));
        prop_assert!(expectation(&psi, &h).unwrap() <= top + 1e-9);
    }

    #[test]
    fn commuting_settings_stay_within_the_classical_bound(p in polynomial(), flips in prop::array::uniform6(any::<bool>())) {
        let z = |f: bool| if f { BlochVector::Z.negated() } else { BlochVector::Z };
        let m = MeasurementSettings::new(
            (0..3).map(|i| [z(flips[2 * i]), z(flips[2 * i + 1])]).collect(),
        )
        .unwrap();
        let lambda = assemble_operator(&p, &m).unwrap().max_eigenvalue().unwrap();
        let lhv: f64 = num_traits::ToPrimitive::to_f64(&vertex_max(&p).maximum).unwrap();
        prop_assert!(lambda <= lhv + 1e-9, "{} > {}", lambda, lhv);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn optimizer_is_deterministic_and_sound(p in polynomial(), seed in any::<u64>()) {
        prop_assume!(p.bound().is_some_and(|b| *b > Rational::zero()));
        let cfg = OptimizerConfig {
            restarts: 3,
            seed,
            search_space: SearchSpace::XyPlane,
            ..OptimizerConfig::default()
        };
        let a = max_violation(&p, &cfg).unwrap();
        let b = max_violation(&p, &cfg).unwrap();
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
        prop_assert_eq!(&a.parameters, &b.parameters);
        for r in &a.restarts {
            prop_assert!(a.value >= r.start_value);
        }
        let at_xy = assemble_operator(&p, &MeasurementSettings::fixed_xy(Arity::Three))
            .unwrap()
            .max_eigenvalue()
            .unwrap();
        prop_assert!(a.value >= at_xy - 1e-9);
        prop_assert!((a.factor * a.bound - a.value).abs() <= 1e-12 * a.value.abs().max(1.0));
    }
}

#[test]
fn canonical_variable_order() {
    let names: Vec<String> = Variable::ALL.iter().map(|v| v.to_string()).collect();
    assert_eq!(names, ["a1", "a2", "b1", "b2", "c1", "c2"]);
}
