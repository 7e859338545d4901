//! Grid propagators checked against the closed-form kernels.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zigzag_core::grid::{
    build_grid, compose_matrices, identity_deviation, propagate_segment, propagate_segment_with,
    relative_l2_on_grid, sample_state, short_time_backward, short_time_forward,
    unitarity_deviation, Direction, EndpointSpectral, Grid, KernelMatrix, Potential,
    SampledClosedForm, SliceRuleRegistry,
};
use zigzag_core::kernel::{
    apply_to_state, make_free_kernel, make_oscillator_kernel, ComplexGaussianKernel, GaussianState,
};
use zigzag_core::CoreError;

fn reference_grid() -> Grid {
    build_grid(256, -10.0, 10.0).unwrap()
}

fn frobenius(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn packets() -> Vec<GaussianState> {
    vec![
        GaussianState::packet(0.0, 1.0, 0.0).unwrap(),
        GaussianState::packet(0.7, 0.8, 0.5).unwrap(),
        GaussianState::packet(-1.0, 1.2, -0.4).unwrap(),
    ]
}

fn grid_vs_analytic(
    k: &KernelMatrix,
    analytic: &ComplexGaussianKernel,
    psi: &GaussianState,
) -> f64 {
    let grid = k.grid();
    let numeric = k.apply(&sample_state(psi, grid));
    let exact = sample_state(&apply_to_state(analytic, psi).unwrap(), grid);
    relative_l2_on_grid(&numeric, &exact, grid)
}

fn outer_mass_fraction(psi: &GaussianState, grid: &Grid) -> f64 {
    let v = sample_state(psi, grid);
    let inner = grid.interior();
    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let outer: f64 = v
        .iter()
        .enumerate()
        .filter(|(j, _)| !inner.contains(j))
        .map(|(_, z)| z.norm_sqr())
        .sum();
    outer / total
}

#[test]
fn probe_packets_stay_off_the_boundary() {
    let g = reference_grid();
    for psi in packets() {
        assert!(outer_mass_fraction(&psi, &g) < 1e-6);
    }
}

#[test]
fn free_short_time_matrix_is_nearly_unitary() {
    let k = short_time_forward(&reference_grid(), &Potential::Free, 1e-3).unwrap();
    let d = unitarity_deviation(&k);
    assert!(d <= 1e-2, "unitarity deviation {d}");
}

#[test]
fn free_short_time_entries_are_translation_invariant() {
    let g = reference_grid();
    let k = short_time_forward(&g, &Potential::Free, 1e-3).unwrap();
    let e = k.entries();
    for (j, l) in [(40, 30), (100, 57), (200, 199)] {
        assert!((e[[j, l]] - e[[j + 20, l + 20]]).norm() < 1e-12 * e[[j, l]].norm().max(1.0));
    }
}

#[test]
fn short_time_pair_annihilates() {
    let g = reference_grid();
    let v = Potential::harmonic(1.0).unwrap();
    let f = short_time_forward(&g, &v, 1e-3).unwrap();
    let b = short_time_backward(&g, &v, 1e-3).unwrap();
    let pair = compose_matrices(&b, &f).unwrap();
    // max off-diagonal column mass of the interior block
    let op = pair.operator();
    let r = g.interior();
    let worst = r
        .clone()
        .map(|col| {
            r.clone()
                .filter(|&row| row != col)
                .map(|row| op[[row, col]].norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 1e-3, "off-diagonal column mass {worst}");
}

#[test]
fn composing_with_identity_is_a_no_op() {
    let g = reference_grid();
    let k = short_time_forward(&g, &Potential::harmonic(1.0).unwrap(), 1e-3).unwrap();
    let id = KernelMatrix::identity(g);
    for c in [
        compose_matrices(&k, &id).unwrap(),
        compose_matrices(&id, &k).unwrap(),
    ] {
        let diff = frobenius(&(c.entries() - k.entries())) / frobenius(k.entries());
        assert!(diff < 1e-15, "{diff}");
    }
}

#[test]
fn composition_is_associative() {
    let g = build_grid(64, -5.0, 5.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mats: Vec<KernelMatrix> = (0..3)
        .map(|_| {
            let eps = rng.random_range(0.005..0.01);
            let omega = rng.random_range(0.5..2.0);
            short_time_forward(&g, &Potential::harmonic(omega).unwrap(), eps).unwrap()
        })
        .collect();
    let left = compose_matrices(&compose_matrices(&mats[0], &mats[1]).unwrap(), &mats[2]).unwrap();
    let right = compose_matrices(&mats[0], &compose_matrices(&mats[1], &mats[2]).unwrap()).unwrap();
    let err = frobenius(&(left.entries() - right.entries())) / frobenius(right.entries());
    assert!(err <= 1e-12, "{err}");
}

#[test]
fn free_slices_match_analytic_free_kernel() {
    // pointwise kernel agreement is not attainable for a band-limited periodic
    // grid kernel; agreement is checked through the action on interior packets
    let g = reference_grid();
    for n in [10usize, 100, 1000] {
        let eps = 1e-3;
        let k =
            propagate_segment(&g, &Potential::Free, n as f64 * eps, n, Direction::Forward).unwrap();
        let analytic = make_free_kernel(n as f64 * eps).unwrap();
        for psi in packets() {
            let err = grid_vs_analytic(&k, &analytic, &psi);
            assert!(err <= 1e-2, "N={n}: {err}");
        }
    }
}

#[test]
fn harmonic_segment_matches_mehler_kernel() {
    let g = reference_grid();
    let v = Potential::harmonic(1.0).unwrap();
    let k = propagate_segment(&g, &v, 1.0, 1000, Direction::Forward).unwrap();
    let analytic = make_oscillator_kernel(1.0, 1.0).unwrap();
    for psi in packets() {
        let err = grid_vs_analytic(&k, &analytic, &psi);
        assert!(err <= 1e-2, "{err}");
    }
}

#[test]
fn backward_segment_is_conjugate_of_forward_segment() {
    let g = build_grid(128, -8.0, 8.0).unwrap();
    let v = Potential::harmonic(1.0).unwrap();
    let f = propagate_segment(&g, &v, 0.5, 200, Direction::Forward).unwrap();
    let b = propagate_segment(&g, &v, 0.5, 200, Direction::Backward).unwrap();
    let err = frobenius(&(b.entries() - &f.entries().mapv(|z| z.conj()))) / frobenius(f.entries());
    assert!(err < 1e-14, "{err}");
}

#[test]
fn segment_annihilation_on_the_reference_grid() {
    let g = reference_grid();
    let v = Potential::harmonic(1.0).unwrap();
    let f = propagate_segment(&g, &v, 1.0, 1000, Direction::Forward).unwrap();
    let b = propagate_segment(&g, &v, 1.0, 1000, Direction::Backward).unwrap();
    let d = identity_deviation(&compose_matrices(&b, &f).unwrap());
    assert!(d <= 1e-2, "{d}");
    let alone = identity_deviation(&f);
    assert!(alone >= 0.5, "{alone}");
}

#[test]
fn annihilation_does_not_grow_with_slice_count() {
    let g = build_grid(128, -8.0, 8.0).unwrap();
    for v in [Potential::Free, Potential::harmonic(1.0).unwrap()] {
        let dev = |n: usize| {
            let f = propagate_segment(&g, &v, n as f64 * 2e-3, n, Direction::Forward).unwrap();
            let b = propagate_segment(&g, &v, n as f64 * 2e-3, n, Direction::Backward).unwrap();
            identity_deviation(&compose_matrices(&b, &f).unwrap())
        };
        let base = dev(1);
        for n in [10, 100] {
            let d = dev(n);
            // below 1e-10 both values are accumulated roundoff of the matrix products
            assert!(
                d <= (2.0 * base).max(1e-10),
                "{}: N={n} {d} vs {base}",
                v.label()
            );
        }
    }
}

#[test]
fn endpoint_rule_does_not_annihilate() {
    // the potential phase at the earlier endpoint makes the conjugate slice a
    // non-inverse; the residual is measured, not assumed
    let g = reference_grid();
    let v = Potential::harmonic(1.0).unwrap();
    let f =
        propagate_segment_with(&EndpointSpectral, &g, &v, 1.0, 1000, Direction::Forward).unwrap();
    let b =
        propagate_segment_with(&EndpointSpectral, &g, &v, 1.0, 1000, Direction::Backward).unwrap();
    let d = identity_deviation(&compose_matrices(&b, &f).unwrap());
    eprintln!("endpoint rule annihilation deviation: {d:.4}");
    assert!(d > 1e-2);
    // it still propagates packets correctly to first order
    let analytic = make_oscillator_kernel(1.0, 1.0).unwrap();
    let err = grid_vs_analytic(&f, &analytic, &packets()[0]);
    assert!(err <= 1e-2, "{err}");
}

#[test]
fn sampled_rule_rejects_the_reference_step() {
    let err = short_time_forward_sampled(&reference_grid(), 1e-3).unwrap_err();
    match err {
        CoreError::Nyquist { ratio, .. } => assert!(ratio > 3.0),
        other => panic!("unexpected {other:?}"),
    }
}

fn short_time_forward_sampled(g: &Grid, eps: f64) -> Result<KernelMatrix, CoreError> {
    zigzag_core::grid::short_time_forward_with(&SampledClosedForm, g, &Potential::Free, eps)
}

#[test]
fn every_registered_rule_conjugates_exactly() {
    let g = build_grid(64, -2.0, 2.0).unwrap();
    let v = Potential::harmonic(0.7).unwrap();
    for rule in SliceRuleRegistry::default().iter() {
        let eps = if rule.name() == "sampled" { 0.01 } else { 1e-3 };
        let f = zigzag_core::grid::short_time_forward_with(rule.as_ref(), &g, &v, eps).unwrap();
        let b = zigzag_core::grid::short_time_backward_with(rule.as_ref(), &g, &v, eps).unwrap();
        assert_eq!(
            b.entries(),
            &f.entries().mapv(|z| z.conj()),
            "{}",
            rule.name()
        );
    }
}
