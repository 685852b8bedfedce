//! Closed-form and degenerate-case oracles for the pointwise identities.

use curvlab::bochner::{self, ConstantCurvatureChart};
use curvlab::catalog::{self, product_test_function, CatalogSpace, Params, SpaceId};
use curvlab::conformal;
use curvlab::covariant;
use curvlab::curvature::{self, Depth, PointCurvature};
use curvlab::vstatic::{self, VStaticTriple};
use curvlab::{DiffConfig, ScalarField};

fn space(id: SpaceId, n: usize) -> CatalogSpace {
    let params = match id {
        SpaceId::Schwarzschild if n == 3 => Params::mass(0.1),
        SpaceId::Schwarzschild => Params::mass(0.05),
        _ => Params::default(),
    };
    catalog::build(id, n, &params).unwrap()
}

fn triple(s: &CatalogSpace) -> &VStaticTriple {
    s.triple.as_ref().unwrap()
}

fn flat(n: usize) -> CatalogSpace {
    let params = Params {
        amplitude: Some(0.0),
        ..Params::default()
    };
    catalog::build(SpaceId::PerturbedFlat, n, &params).unwrap()
}

fn probes(s: &CatalogSpace) -> Vec<Vec<f64>> {
    s.probe_points(4)
}

fn cfg() -> DiffConfig {
    DiffConfig::default()
}

/// Third derivatives of polar metrics lose digits to roundoff near the pole
/// at the default step; a coarser step keeps truncation error below 1e-7.
fn polar_cfg() -> DiffConfig {
    DiffConfig::with_step(1e-2)
}

fn max_over<F: FnMut(&[f64]) -> f64>(s: &CatalogSpace, mut f: F) -> f64 {
    probes(s).iter().map(|p| f(p)).fold(0.0, f64::max)
}

#[test]
fn round_metric_in_polar_coordinates() {
    let s = space(SpaceId::Hemisphere, 3);
    let x = [0.7, 1.1, 2.0];
    let g = curvature::metric_at(&s.chart, &x).unwrap();
    let st2 = 0.7f64.sin().powi(2);
    assert!((g.get(&[0, 0]) - 1.0).abs() < 1e-15);
    assert!((g.get(&[1, 1]) - st2).abs() < 1e-15);
    assert!((g.get(&[2, 2]) - st2 * 1.1f64.sin().powi(2)).abs() < 1e-15);
    assert_eq!(g.get(&[0, 1]), 0.0);
}

#[test]
fn cylinder_fibre_is_scaled_round_sphere() {
    let s = space(SpaceId::Cylinder, 4);
    let x = [0.4, 0.9, 1.3, 2.0];
    let g = curvature::metric_at(&s.chart, &x).unwrap();
    let c = 2.0 / 4.0;
    assert!((g.get(&[0, 0]) - 1.0).abs() < 1e-15);
    assert!((g.get(&[1, 1]) - c).abs() < 1e-15);
    assert!((g.get(&[2, 2]) - c * 0.9f64.sin().powi(2)).abs() < 1e-15);
}

#[test]
fn inverse_metric_of_identity() {
    let s = flat(3);
    let ginv = curvature::inverse_metric_at(&s.chart, &probes(&s)[0]).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(ginv.get(&[i, j]), if i == j { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn flat_metric_has_no_curvature() {
    let s = flat(3);
    for p in probes(&s) {
        let gamma = curvature::christoffel(&s.chart, &p, &cfg()).unwrap();
        assert!(gamma.max_abs() < 1e-12);
        assert!(curvature::riemann(&s.chart, &p, &cfg()).unwrap().max_abs() < 1e-9);
        let k = curvature::sectional_curvature(&s.chart, &p, &[1.0, 0.0, 0.0], &[0.3, 1.0, 0.0], &cfg()).unwrap();
        assert!(k.abs() < 1e-9);
        assert!(covariant::ricci_identity_residual(&s.chart, &p, &cfg()).unwrap() < 1e-9);
    }
}

#[test]
fn unit_sphere_has_curvature_one() {
    for n in [3, 4] {
        let s = space(SpaceId::Hemisphere, n);
        for p in probes(&s) {
            let mut u = vec![0.0; n];
            let mut v = vec![0.0; n];
            u[0] = 1.0;
            u[1] = 0.4;
            v[n - 1] = 1.0;
            v[1] = -0.2;
            let k = curvature::sectional_curvature(&s.chart, &p, &u, &v, &cfg()).unwrap();
            assert!((k - 1.0).abs() < 1e-7, "K = {k}");
            let r = curvature::scalar_curvature(&s.chart, &p, &cfg()).unwrap();
            assert!((r - (n * (n - 1)) as f64).abs() < 1e-7);
        }
    }
}

#[test]
fn cylinder_mixed_planes_are_flat() {
    let s = space(SpaceId::Cylinder, 3);
    for p in probes(&s) {
        let k = curvature::sectional_curvature(&s.chart, &p, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.5], &cfg()).unwrap();
        assert!(k.abs() < 1e-7);
        // fibre curvature 1/h² with h² = (n−2)/n
        let k = curvature::sectional_curvature(&s.chart, &p, &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &cfg()).unwrap();
        assert!((k - 3.0).abs() < 1e-7);
    }
}

#[test]
fn ricci_identity_on_round_and_perturbed_metrics() {
    let s = space(SpaceId::Hemisphere, 3);
    assert!(max_over(&s, |p| covariant::ricci_identity_residual(&s.chart, p, &cfg()).unwrap()) <= 1e-5);
    let s = catalog::build(SpaceId::PerturbedFlat, 4, &Params::default()).unwrap();
    assert!(max_over(&s, |p| covariant::ricci_identity_residual(&s.chart, p, &cfg()).unwrap()) <= 1e-4);
}

#[test]
fn hessian_and_laplacian_of_cylinder_potential() {
    let s = space(SpaceId::Cylinder, 3);
    let f = &triple(&s).potential.f;
    for p in probes(&s) {
        let lap = covariant::laplacian(f, &s.chart, &p, &cfg()).unwrap();
        let expect = -3.0 * (3f64.sqrt() * p[0]).sin();
        assert!((lap - expect).abs() < 1e-7);
        let h = covariant::hessian(f, &s.chart, &p, &cfg()).unwrap();
        assert!((h.get(&[0, 0]) - expect).abs() < 1e-7);
        assert!(h.get(&[1, 1]).abs() < 1e-7);
    }
}

#[test]
fn weyl_vanishes_in_three_dimensions_and_on_space_forms() {
    for id in [SpaceId::Hemisphere, SpaceId::Cylinder, SpaceId::Schwarzschild, SpaceId::PerturbedFlat] {
        let s = space(id, 3);
        assert!(max_over(&s, |p| conformal::weyl(&s.chart, p, &cfg()).unwrap().max_abs()) <= 1e-7, "{id}");
    }
    for n in [4, 5] {
        let s = space(SpaceId::Hemisphere, n);
        assert!(max_over(&s, |p| conformal::weyl(&s.chart, p, &cfg()).unwrap().max_abs()) <= 1e-7);
    }
}

#[test]
fn product_of_unequal_spheres_is_not_conformally_flat() {
    let s = space(SpaceId::ProductSpheres, 4);
    for p in probes(&s) {
        let c = PointCurvature::at(&s.chart, &p, &cfg(), Depth::Curvature).unwrap();
        let w = conformal::weyl_from(&c);
        let norm = curvlab::tensor::norm_sq(&c.ginv, 4, 4, &w).sqrt();
        assert!(norm > 0.1, "|W| = {norm}");
        assert!(conformal::decomposition_closure(&c, &w) <= 1e-10);
        let f = ScalarField::new(|x| x[0]);
        let rw = conformal::radial_weyl(&s.chart, &f, &p, &cfg()).unwrap();
        assert!(rw.max_abs() > 0.0);
    }
    assert!(max_over(&s, |p| conformal::cotton_weyl_relation_residual(&s.chart, p, &cfg()).unwrap()) <= 1e-4);
}

#[test]
fn cotton_vanishes_with_parallel_ricci() {
    for id in [SpaceId::Hemisphere, SpaceId::Cylinder] {
        let s = space(id, 3);
        assert!(max_over(&s, |p| conformal::cotton(&s.chart, p, &cfg()).unwrap().max_abs()) <= 1e-6, "{id}");
    }
}

#[test]
fn classified_spaces_are_bach_flat() {
    for (id, n, tol) in [
        (SpaceId::Hemisphere, 4, 1e-5),
        (SpaceId::Schwarzschild, 3, 1e-4),
        (SpaceId::Cylinder, 4, 1e-5),
    ] {
        let s = space(id, n);
        let b = max_over(&s, |p| conformal::bach(&s.chart, p, &cfg()).unwrap().max_abs());
        assert!(b <= tol, "{id} n={n}: {b:e}");
    }
}

#[test]
fn cotton_weyl_relation() {
    let s = catalog::build(SpaceId::PerturbedFlat, 4, &Params::default()).unwrap();
    assert!(max_over(&s, |p| conformal::cotton_weyl_relation_residual(&s.chart, p, &cfg()).unwrap()) <= 1e-4);
    let s = space(SpaceId::Hemisphere, 5);
    assert!(max_over(&s, |p| conformal::cotton_weyl_relation_residual(&s.chart, p, &cfg()).unwrap()) <= 1e-6);
}

#[test]
fn constant_potential_has_no_radial_weyl() {
    let s = space(SpaceId::ProductSpheres, 4);
    let f = ScalarField::constant(2.0);
    for p in probes(&s) {
        assert_eq!(conformal::radial_weyl(&s.chart, &f, &p, &cfg()).unwrap().max_abs(), 0.0);
    }
}

#[test]
fn vstatic_residuals_of_catalog_triples() {
    let cases = [
        (SpaceId::Hemisphere, 3, 1e-7),
        (SpaceId::Schwarzschild, 3, 1e-6),
        (SpaceId::EuclideanBall, 3, 1e-8),
        (SpaceId::Cylinder, 3, 1e-7),
        (SpaceId::SphericalBall, 3, 1e-7),
    ];
    for (id, n, tol) in cases {
        let s = space(id, n);
        let t = triple(&s);
        for p in probes(&s) {
            let v = vstatic::vstatic_residual(t, &p, &cfg()).unwrap();
            assert!(v <= tol, "{id}: {v:e}");
            let tr = vstatic::trace_residual(t, &p, &cfg()).unwrap();
            assert!(tr <= n as f64 * v + 1e-12, "{id}: trace {tr:e} vs {v:e}");
        }
    }
}

#[test]
fn traceless_and_first_consequence_residuals() {
    for (id, traceless, lemma1) in [
        (SpaceId::Hemisphere, 1e-8, 1e-6),
        (SpaceId::Schwarzschild, 1e-6, 1e-5),
        (SpaceId::EuclideanBall, 1e-8, 1e-6),
    ] {
        let s = space(id, 3);
        let t = triple(&s);
        assert!(max_over(&s, |p| vstatic::traceless_residual(t, p, &cfg()).unwrap()) <= traceless, "{id}");
        assert!(max_over(&s, |p| vstatic::lemma1_residual(t, p, &cfg()).unwrap()) <= lemma1, "{id}");
    }
}

#[test]
fn tensor_t_is_antisymmetric_and_vanishes_without_gradient() {
    let s = space(SpaceId::Schwarzschild, 3);
    let t = triple(&s);
    for p in probes(&s) {
        let tt = vstatic::tensor_t(t, &p, &cfg()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert!((tt.get(&[i, j, k]) + tt.get(&[j, i, k])).abs() <= 1e-10);
                }
            }
        }
    }
    let mut constant = t.clone();
    constant.potential.f = ScalarField::constant(1.0);
    for p in probes(&s) {
        assert_eq!(vstatic::tensor_t(&constant, &p, &cfg()).unwrap().max_abs(), 0.0);
    }
    let s = space(SpaceId::Cylinder, 3);
    assert!(max_over(&s, |p| vstatic::tensor_t(triple(&s), p, &cfg()).unwrap().max_abs()) <= 1e-6);
}

#[test]
fn decomposition_residuals() {
    for (id, n, tol) in [
        (SpaceId::Hemisphere, 3, 1e-5),
        (SpaceId::Schwarzschild, 3, 1e-5),
        (SpaceId::Cylinder, 3, 1e-5),
        (SpaceId::Hemisphere, 5, 1e-6),
        (SpaceId::Schwarzschild, 4, 1e-5),
    ] {
        let s = space(id, n);
        let r = max_over(&s, |p| vstatic::decomposition_residual(triple(&s), p, &cfg()).unwrap());
        assert!(r <= tol, "{id} n={n}: {r:e}");
    }
}

#[test]
fn divergence_integrand_vanishes_with_constant_ricci_norm() {
    for id in [SpaceId::Hemisphere, SpaceId::Cylinder] {
        let s = space(id, 3);
        assert!(max_over(&s, |p| bochner::div_f_grad_ricnorm(triple(&s), p, &polar_cfg()).unwrap().abs()) <= 1e-6);
    }
}

#[test]
fn divergence_identity_on_constant_scalar_curvature_charts() {
    let s = space(SpaceId::ProductSpheres, 4);
    let cc = ConstantCurvatureChart::verify(&s.chart, &probes(&s), &cfg()).unwrap();
    let f = product_test_function();
    assert!(max_over(&s, |p| bochner::lemma2_residual(&cc, &f, p, &cfg()).unwrap()) <= 1e-4);

    let s = space(SpaceId::Hemisphere, 3);
    let cc = ConstantCurvatureChart::verify(&s.chart, &probes(&s), &cfg()).unwrap();
    let f = ScalarField::new(|x| x[0] * x[0]);
    assert!(max_over(&s, |p| bochner::lemma2_residual(&cc, &f, p, &cfg()).unwrap()) <= 1e-5);

    let s = flat(3);
    let cc = ConstantCurvatureChart::verify(&s.chart, &probes(&s), &cfg()).unwrap();
    let f = ScalarField::new(|x| x[0] * x[1]);
    assert!(max_over(&s, |p| bochner::lemma2_residual(&cc, &f, p, &cfg()).unwrap()) <= 1e-9);
}

#[test]
fn static_divergence_identity_residuals() {
    for (id, tol, c) in [
        (SpaceId::EuclideanBall, 1e-9, cfg()),
        (SpaceId::SphericalBall, 1e-6, polar_cfg()),
        (SpaceId::Schwarzschild, 1e-4, cfg()),
    ] {
        let s = space(id, 3);
        let r = max_over(&s, |p| bochner::lemma3_residual(triple(&s), p, &c).unwrap());
        assert!(r <= tol, "{id}: {r:e}");
    }
}

#[test]
fn cylinder_cubic_terms_cancel() {
    let s = space(SpaceId::Cylinder, 3);
    for p in probes(&s) {
        let b = bochner::theorem2_breakdown(triple(&s), &p, &cfg()).unwrap();
        assert!(b.lhs.abs() <= 1e-6);
        assert!(b.residual.abs() <= 1e-6);
    }
}

#[test]
fn schwarzschild_exercises_gradient_terms() {
    let s = space(SpaceId::Schwarzschild, 3);
    for p in probes(&s) {
        let b = bochner::theorem2_breakdown(triple(&s), &p, &cfg()).unwrap();
        assert!(b.residual.abs() <= 1e-4 * b.scale() || b.residual.abs() <= 1e-8, "{b:?}");
        assert!(b.term_gradric > 0.0);
    }
}

#[test]
fn radial_weyl_specialization() {
    for (id, n, tol, c) in [
        (SpaceId::Schwarzschild, 3, 1e-4, cfg()),
        (SpaceId::Cylinder, 4, 1e-5, cfg()),
        (SpaceId::Hemisphere, 3, 1e-6, polar_cfg()),
    ] {
        let s = space(id, n);
        let r = max_over(&s, |p| bochner::radial_weyl_specialization_residual(triple(&s), p, &c).unwrap());
        assert!(r <= tol, "{id}: {r:e}");
    }
}

#[test]
fn weyl_free_bochner_form_on_cotton_flat_spaces() {
    for (id, n, tol) in [
        (SpaceId::Hemisphere, 4, 1e-7),
        (SpaceId::Schwarzschild, 4, 1e-5),
        (SpaceId::Cylinder, 5, 1e-6),
    ] {
        let s = space(id, n);
        let r = max_over(&s, |p| bochner::eq312_residual(triple(&s), p, &cfg()).unwrap());
        assert!(r <= tol, "{id} n={n}: {r:e}");
    }
}

#[test]
fn okumura_and_pinching_gaps() {
    for n in [3, 4, 5] {
        let s = space(SpaceId::Cylinder, n);
        for p in probes(&s) {
            assert!(bochner::okumura_gap(&s.chart, &p, &cfg()).unwrap().abs() <= 1e-8);
            assert!(bochner::pinching_gap(&s.chart, &p, &cfg()).unwrap().abs() <= 1e-6);
        }
        let s = space(SpaceId::Hemisphere, n);
        let nn1 = (n * (n - 1)) as f64;
        for p in probes(&s) {
            assert!(bochner::okumura_gap(&s.chart, &p, &cfg()).unwrap().abs() <= 1e-8);
            assert!((bochner::pinching_gap(&s.chart, &p, &cfg()).unwrap() - nn1).abs() <= 1e-6);
        }
    }
    let s = catalog::build(SpaceId::PerturbedFlat, 4, &Params::default()).unwrap();
    assert!(probes(&s)
        .iter()
        .all(|p| bochner::okumura_gap(&s.chart, p, &cfg()).unwrap() >= -1e-9));
}

#[test]
fn cubic_ricci_identity_is_algebraic() {
    let s = catalog::build(SpaceId::PerturbedFlat, 4, &Params::default()).unwrap();
    assert!(max_over(&s, |p| bochner::lemma4_residual(&s.chart, p, &cfg()).unwrap()) <= 1e-6);
    let s = flat(4);
    assert!(max_over(&s, |p| bochner::lemma4_residual(&s.chart, p, &cfg()).unwrap()) <= 1e-12);
}

#[test]
fn berger_sides() {
    let s = catalog::build(SpaceId::PerturbedFlat, 3, &Params::default()).unwrap();
    let chart = &s.chart;
    for p in probes(&s) {
        let b = bochner::berger_check(chart, &p, |x| Ok(chart.metric_components(x)), &cfg()).unwrap();
        assert!(b.commutator.abs() <= 1e-8 && b.eigen_sum.abs() <= 1e-8);
        let b = bochner::berger_check(chart, &p, covariant::ricci_field(chart, &cfg()), &cfg()).unwrap();
        assert!((b.commutator - b.eigen_sum).abs() <= 1e-4);
    }
    let s = space(SpaceId::Cylinder, 3);
    let chart = &s.chart;
    for p in probes(&s) {
        let b = bochner::berger_check(chart, &p, covariant::ricci_field(chart, &cfg()), &cfg()).unwrap();
        assert!(b.commutator.abs() <= 1e-6 && b.eigen_sum.abs() <= 1e-6);
    }
}
