mod common;

use common::{shifted, unit};
use fkcheb_core::corpus::{random_corpus, random_direction, rng, CorpusSettings};
use fkcheb_core::deviation::deviation_local_maxima;
use fkcheb_core::{
    deviation_profile, directional_derivative, objective_quasidiff, DeviationProfile,
    ProfileSettings, SplineModel, Stability, TargetFunction,
};

fn psi(model: &SplineModel, f: &TargetFunction) -> f64 {
    deviation_profile(model, f, &ProfileSettings::for_model(model))
        .unwrap()
        .psi
}

fn fd(model: &SplineModel, f: &TargetFunction, g: &[f64], h: f64) -> f64 {
    (psi(&shifted(model, g, h), f) - psi(model, f)) / h
}

/// Gap between `psi` and the tallest local maximum that is not an extreme point.
fn gap(model: &SplineModel, f: &TargetFunction, prof: &DeviationProfile) -> f64 {
    let others = deviation_local_maxima(model, f, prof.grid_resolution)
        .unwrap()
        .into_iter()
        .filter(|(t, _)| prof.extremes.iter().all(|e| (e.t - t).abs() > 1e-6))
        .map(|(_, d)| d.abs())
        .fold(0.0, f64::max);
    prof.psi - others
}

fn tent() -> (SplineModel, TargetFunction) {
    let s = SplineModel::new(1, -1.0, 1.0, vec![0.0], 0.0, vec![vec![1.0], vec![-2.0]]).unwrap();
    let f = TargetFunction::piecewise_linear(vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 1.0]).unwrap();
    (s, f)
}

#[test]
fn tent_has_one_unstable_segment() {
    let (s, f) = tent();
    let prof = deviation_profile(&s, &f, &ProfileSettings::for_model(&s)).unwrap();
    assert_eq!(prof.psi, 1.0);
    let signs: Vec<i8> = prof.extremes.iter().map(|e| e.sign).collect();
    assert_eq!(signs, [-1, 1, -1]);
    assert_eq!(prof.extremes[1].stability, Stability::Unstable);
    let qd = objective_quasidiff(&s, &prof).unwrap();
    assert_eq!(
        qd.s_points,
        vec![vec![-1.0, 0.0, 0.0, 0.0], vec![-1.0, -2.0, -2.0, -1.0]]
    );
    assert_eq!(
        qd.u_segments,
        vec![(vec![1.0, 1.0, 0.0, 0.0], vec![1.0, 1.0, 2.0, 0.0])]
    );
    assert_eq!(qd.sup.segments.len(), 1);
}

#[test]
fn tent_matches_finite_differences() {
    // The target's own kink pins the maximum to the knot, so the formula is exact here.
    let (s, f) = tent();
    let prof = deviation_profile(&s, &f, &ProfileSettings::for_model(&s)).unwrap();
    let qd = objective_quasidiff(&s, &prof).unwrap();
    let mut r = rng(51);
    for _ in 0..50 {
        let g = unit(random_direction(&mut r, 4));
        let dd = directional_derivative(&qd, &g).unwrap();
        assert!((dd - qd.directional_derivative_direct(&g)).abs() < 1e-12);
        let d = fd(&s, &f, &g, 1e-7);
        assert!((d - dd).abs() < 1e-5, "{g:?}: fd {d} dd {dd}");
    }
}

#[test]
fn corpus_without_unstable_extremes_matches_finite_differences() {
    let mut r = rng(52);
    let mut checked = 0;
    for inst in random_corpus(53, 90, &CorpusSettings::default()).unwrap() {
        let (s, f) = (&inst.model, &inst.target);
        let prof = deviation_profile(s, f, &ProfileSettings::for_model(s)).unwrap();
        if prof.degenerate
            || prof.extremes.iter().any(|e| e.is_unstable())
            || gap(s, f, &prof) < 1e-3 * prof.psi
        {
            continue;
        }
        let qd = objective_quasidiff(s, &prof).unwrap();
        for _ in 0..3 {
            let g = unit(random_direction(&mut r, s.num_params()));
            let dd = directional_derivative(&qd, &g).unwrap();
            let d = fd(s, f, &g, 1e-7);
            assert!(
                (d - dd).abs() < 1e-3 * (1.0 + dd.abs()),
                "instance {}: fd {d} dd {dd}",
                inst.id
            );
            checked += 1;
        }
    }
    assert!(checked >= 60, "{checked}");
}

#[test]
fn formula_bounds_finite_differences_from_below_at_unstable_knots() {
    let mut r = rng(54);
    let mut checked = 0;
    for inst in random_corpus(55, 150, &CorpusSettings::default()).unwrap() {
        let (s, f) = (&inst.model, &inst.target);
        let prof = deviation_profile(s, f, &ProfileSettings::for_model(s)).unwrap();
        if prof.degenerate
            || !prof.extremes.iter().any(|e| e.is_unstable())
            || gap(s, f, &prof) < 1e-3 * prof.psi
        {
            continue;
        }
        let qd = objective_quasidiff(s, &prof).unwrap();
        for _ in 0..3 {
            let g = unit(random_direction(&mut r, s.num_params()));
            let dd = directional_derivative(&qd, &g).unwrap();
            let d = fd(s, f, &g, 1e-7);
            assert!(
                d >= dd - 1e-3 * (1.0 + dd.abs()),
                "instance {}: fd {d} dd {dd}",
                inst.id
            );
            checked += 1;
        }
    }
    assert!(checked > 0);
}
