use dynex_core::dependence::catalog::{self, cat_lambda, cat_turning_point};
use dynex_core::dependence::{validate, PickandsModel, ValidationConfig};
use dynex_core::engine::theta_exact;
use dynex_core::{
    closed_form, logistic_D, rat, rint, DependenceFunctions, ExampleId, FrequencyVector, Logistic, Rational,
    SimplexPoint,
};

fn pair(a: &Rational) -> Vec<Rational> {
    vec![a.clone(), rint(1) - a]
}

fn grid(den: i64) -> impl Iterator<Item = Rational> {
    (0..=den).map(move |k| rat(k, den))
}

/// Pickands tables as printed for each bivariate circle example.
fn d_table(id: ExampleId, a: &Rational) -> Rational {
    let one = rint(1);
    match id {
        ExampleId::CommonPoint => a.clone().max(&one - a),
        ExampleId::DisjointPoints => one,
        ExampleId::LinkedNonPeriodic => {
            if *a <= rat(1, 3) {
                one - a
            } else {
                (one + a) / rint(2)
            }
        }
        ExampleId::LinkedPeriodic | ExampleId::OverlapNonPeriodic => {
            if *a <= rat(1, 3) {
                one - a
            } else if *a <= rat(2, 3) {
                rat(2, 3)
            } else {
                a.clone()
            }
        }
        ExampleId::LinkedPeriodic2 => {
            if *a <= rat(1, 3) {
                one - a
            } else {
                (one + a) / rint(2)
            }
        }
        ExampleId::OverlapPeriodic => {
            if *a <= rat(1, 4) {
                one - a
            } else if *a <= rat(3, 4) {
                rat(3, 4)
            } else {
                a.clone()
            }
        }
        _ => unreachable!(),
    }
}

const BIVARIATE_CIRCLE: [ExampleId; 7] = [
    ExampleId::CommonPoint,
    ExampleId::DisjointPoints,
    ExampleId::LinkedNonPeriodic,
    ExampleId::LinkedPeriodic,
    ExampleId::LinkedPeriodic2,
    ExampleId::OverlapNonPeriodic,
    ExampleId::OverlapPeriodic,
];

#[test]
fn spec_examples() {
    let id = ExampleId::LinkedPeriodic;
    assert_eq!(catalog::pickands(id, &pair(&rat(1, 2))).unwrap(), rat(2, 3));
    assert_eq!(catalog::marginals::<Rational>(id).unwrap(), vec![rat(3, 4), rat(3, 4)]);
    let tau = vec![rat(2, 5), rat(7, 3)];
    let g = catalog::gamma(id, &tau).unwrap();
    let th = catalog::theta(id, &tau).unwrap();
    let gh = catalog::gamma_hat(id, &tau).unwrap();
    assert_eq!(g, rat(4, 3) * th * gh);

    let cat = closed_form(ExampleId::CatMap);
    assert!((cat.pickands(&SimplexPoint::new(vec![0.5]).unwrap()).unwrap() - 0.75).abs() < 1e-15);
    assert!((cat_turning_point() - 0.7639).abs() < 1e-4);
    assert!(catalog::theta::<Rational>(ExampleId::CatMap, &[rint(1), rint(1)]).is_err());

    let third = rat(1, 3);
    let t = catalog::theta(ExampleId::Trivariate, &[third.clone(), third.clone(), third]).unwrap();
    assert_eq!(t, rat(2, 3));
}

#[test]
fn pickands_special_shapes() {
    for a in grid(100) {
        let p = pair(&a);
        assert_eq!(catalog::pickands(ExampleId::DisjointPoints, &p).unwrap(), rint(1));
        assert_eq!(
            catalog::pickands(ExampleId::CommonPoint, &p).unwrap(),
            a.clone().max(rint(1) - &a)
        );
        if a > rat(1, 3) {
            let d = catalog::pickands(ExampleId::LinkedPeriodic2, &p).unwrap();
            assert_eq!(d, (rint(1) + &a) / rint(2));
        }
    }
    let off = SimplexPoint::new(vec![0.7, 0.6]);
    assert!(off.is_err());
    assert!(SimplexPoint::new(vec![-0.1]).is_err());
    let two = SimplexPoint::new(vec![0.2, 0.3]).unwrap();
    assert!(closed_form(ExampleId::LinkedPeriodic).pickands(&two).is_err());
}

#[test]
fn pickands_matches_published_tables_exactly() {
    for id in BIVARIATE_CIRCLE {
        for a in grid(120) {
            assert_eq!(
                catalog::pickands(id, &pair(&a)).unwrap(),
                d_table(id, &a),
                "{id} alpha={a}"
            );
        }
    }
    let cat = closed_form(ExampleId::CatMap);
    for k in 0..=100 {
        let a = k as f64 / 100.0;
        let want = if a <= 2.0 / 3.0 { 1.0 - a / 2.0 } else { a };
        let got = cat.pickands(&SimplexPoint::new(vec![a]).unwrap()).unwrap();
        assert!((got - want).abs() < 1e-12, "alpha={a}: {got} vs {want}");
    }
}

#[test]
fn gamma_satisfies_rescaling_identity_exactly() {
    for id in ExampleId::ALL.into_iter().filter(|e| e.is_circle()) {
        for a in grid(24) {
            for mass in [rat(1, 2), rint(1), rint(3)] {
                let mut tau: Vec<Rational> = pair(&a).into_iter().map(|x| x * &mass).collect();
                if id.dim() == 3 {
                    tau = vec![&tau[0] / rint(2), &tau[0] / rint(2), tau[1].clone()];
                }
                assert_eq!(
                    catalog::gamma(id, &tau).unwrap(),
                    catalog::gamma_by_rescaling(id, &tau).unwrap(),
                    "{id} tau={tau:?}"
                );
            }
        }
    }
}

#[test]
fn general_density_formulas_reduce_to_case_tables() {
    for id in ExampleId::ALL.into_iter().filter(|e| e.is_circle() && e.dim() == 2) {
        for a in grid(120) {
            let p = pair(&a);
            assert_eq!(
                catalog::theta_from_general_formulas(id, &p).unwrap(),
                catalog::theta_on_simplex(id, &p).unwrap(),
                "{id} alpha={a}"
            );
        }
    }
    for i in 0..=24 {
        for j in 0..=24 - i {
            let (a, b) = (rat(i, 24), rat(j, 24));
            let full = vec![a.clone(), b.clone(), rint(1) - &a - &b];
            let t = catalog::theta_from_general_formulas(ExampleId::Trivariate, &full).unwrap();
            if i == 0 || j == 0 {
                continue;
            }
            let two = rint(2);
            let want = rint(1)
                - &a * (rint(1) - (rint(1) - &full[2] / (&two * &a)).max(rint(0)))
                - &b * (rint(1) - (rint(1) - &full[2] / (&two * &b)).max(rint(0)));
            assert_eq!(t, want);
        }
    }
}

#[test]
fn pickands_continuous_at_breakpoints() {
    let cases = [
        (ExampleId::LinkedNonPeriodic, vec![1.0 / 3.0]),
        (ExampleId::LinkedPeriodic, vec![1.0 / 3.0, 2.0 / 3.0]),
        (ExampleId::OverlapPeriodic, vec![0.25, 0.75]),
        (ExampleId::CatMap, vec![2.0 / 3.0]),
    ];
    for (id, points) in cases {
        let cf = closed_form(id);
        for b in points {
            let at = cf.pickands(&SimplexPoint::new(vec![b]).unwrap()).unwrap();
            let right = cf.pickands(&SimplexPoint::new(vec![b + 1e-9]).unwrap()).unwrap();
            assert!((at - right).abs() < 1e-8, "{id} at {b}");
        }
    }
}

#[test]
fn copula_special_cases() {
    let ind = closed_form(ExampleId::DisjointPoints);
    let comm = closed_form(ExampleId::CommonPoint);
    for t in [[0.3, 0.8], [0.5, 0.5], [0.9, 0.1]] {
        assert!((ind.copula(&t) - t[0] * t[1]).abs() < 1e-14);
        assert!((comm.copula(&t) - t[0].min(t[1])).abs() < 1e-14);
    }
    for id in ExampleId::ALL {
        let cf = closed_form(id);
        assert_eq!(cf.copula(&vec![1.0; id.dim()]), 1.0);
        assert_eq!(cf.copula(&vec![0.0; id.dim()]), 0.0);
    }
}

#[test]
fn logistic_examples() {
    for k in 0..=10 {
        assert!((logistic_D(k as f64 / 10.0, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }
    assert_eq!(logistic_D(0.0, 0.3).unwrap(), 1.0);
    assert_eq!(logistic_D(1.0, 0.3).unwrap(), 1.0);
    assert!((logistic_D(0.5, 0.5).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert!(logistic_D(0.5, 0.0).is_err());
    assert!(logistic_D(0.5, 1.5).is_err());
    for k in 1..100 {
        let a = k as f64 / 100.0;
        let vals: Vec<f64> = (1..=10).map(|b| logistic_D(a, b as f64 / 10.0).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] <= w[1]), "alpha={a}");
    }
}

#[test]
fn validator_accepts_catalog_and_logistic_family() {
    let cfg = ValidationConfig::default();
    for id in ExampleId::ALL {
        let rep = validate(&closed_form(id), &cfg);
        assert!(rep.passed(), "{rep}");
    }
    for b in 1..=9 {
        let rep = validate(&Logistic::new(b as f64 / 10.0).unwrap(), &cfg);
        assert!(rep.passed(), "{rep}");
    }
}

#[test]
fn validator_rejects_corrupted_pickands() {
    let bad = PickandsModel::new("squared", |a: f64| a * a);
    let cfg = ValidationConfig {
        max_reported: usize::MAX,
        ..ValidationConfig::default()
    };
    let rep = validate(&bad, &cfg);
    assert!(!rep.passed());
    assert!(rep.failed_checks().contains(&"pickands lower bound"));
    assert!(rep
        .violations
        .iter()
        .any(|v| v.check == "pickands lower bound" && (v.point[0] - 0.25).abs() < 1e-12));
}

#[test]
fn catalog_agrees_with_exact_engine() {
    let n = 1u64 << 18;
    for id in ExampleId::ALL.into_iter().filter(|e| e.is_circle()) {
        let sys = id.system();
        let alpha: Vec<Rational> = if id.dim() == 3 {
            vec![rat(1, 4), rat(1, 3)]
        } else {
            vec![rat(2, 5)]
        };
        let tau = FrequencyVector::from_simplex(&alpha).unwrap();
        let engine = theta_exact(&sys, &tau, n, id.preset_q()).unwrap().exact.unwrap();
        assert_eq!(engine, catalog::theta(id, tau.components()).unwrap(), "{id}");
    }
    assert!(cat_lambda::<f64>().unwrap() > 2.6);
}
