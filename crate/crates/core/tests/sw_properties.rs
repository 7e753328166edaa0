use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinphase::sphere::SphereGrid;
use spinphase::su2::{rotation_z, OperatorMatrix, SpinContext};
use spinphase::sw::{OrderingParameter, SwMap};
use spinphase::Complex;

fn random_operator(n: usize, rng: &mut ChaCha8Rng) -> OperatorMatrix<f64> {
    OperatorMatrix::from_matrix(DMatrix::from_fn(n, n, |_, _| {
        Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    }))
    .unwrap()
}

fn hermitian_part(a: &OperatorMatrix<f64>) -> OperatorMatrix<f64> {
    (a + &a.adjoint()).scale(Complex::new(0.5, 0.0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_is_identity(seed in any::<u64>(), ts in 1u32..7, sigma in -1.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = SpinContext::new(ts).unwrap();
        let map = SwMap::new(ctx, OrderingParameter::new(sigma).unwrap());
        let a = random_operator(ctx.hilbert_dim(), &mut rng);
        let back = map.symbol_to_operator(&map.operator_to_symbol(&a).unwrap()).unwrap();
        prop_assert!((&back - &a).max_abs() < 1e-12);
    }

    #[test]
    fn map_is_linear(seed in any::<u64>(), ts in 1u32..6, sigma in -1.0f64..=1.0, x in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = SpinContext::new(ts).unwrap();
        let map = SwMap::new(ctx, OrderingParameter::new(sigma).unwrap());
        let a = random_operator(ctx.hilbert_dim(), &mut rng);
        let b = random_operator(ctx.hilbert_dim(), &mut rng);
        let combo = &a.scale(Complex::new(x, 0.0)) + &b;
        let lhs = map.operator_to_symbol(&combo).unwrap();
        let ca = map.operator_to_symbol(&a).unwrap();
        let cb = map.operator_to_symbol(&b).unwrap();
        let rhs: Vec<_> = ca.as_slice().iter().zip(cb.as_slice()).map(|(p, q)| p * x + q).collect();
        let worst = lhs.as_slice().iter().zip(&rhs).fold(0.0f64, |m, (p, q)| m.max((p - q).norm()));
        prop_assert!(worst < 1e-12);
    }

    #[test]
    fn hermitian_operators_have_real_symbols(seed in any::<u64>(), ts in 1u32..7, sigma in -1.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = SpinContext::new(ts).unwrap();
        let map = SwMap::new(ctx, OrderingParameter::new(sigma).unwrap());
        let a = hermitian_part(&random_operator(ctx.hilbert_dim(), &mut rng));
        prop_assert!(map.operator_to_symbol(&a).unwrap().reality_deviation() < 1e-12);
    }

    #[test]
    fn traciality_by_quadrature(seed in any::<u64>(), ts in 1u32..6, sigma in -1.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = SpinContext::new(ts).unwrap();
        let sigma = OrderingParameter::new(sigma).unwrap();
        let (map, dual) = (SwMap::new(ctx, sigma), SwMap::new(ctx, sigma.dual()));
        let grid = SphereGrid::<f64>::for_spin(2 * ts as usize, ctx);
        let a = random_operator(ctx.hilbert_dim(), &mut rng);
        let b = random_operator(ctx.hilbert_dim(), &mut rng);
        let wa = grid.synthesize(&map.operator_to_symbol(&a).unwrap().with_band_limit(grid.band_limit())).unwrap();
        let wb = grid.synthesize(&dual.operator_to_symbol(&b).unwrap().with_band_limit(grid.band_limit())).unwrap();
        let prod: Vec<_> = wa.iter().zip(&wb).map(|(x, y)| x * y).collect();
        prop_assert!((grid.integrate(&prod).unwrap() - (&a * &b).trace()).norm() < 1e-10);
        prop_assert!((grid.integrate(&wa).unwrap() - a.trace()).norm() < 1e-10);
    }

    #[test]
    fn z_rotations_shift_phi(seed in any::<u64>(), ts in 1u32..6, sigma in -1.0f64..=1.0, alpha in -7.0f64..7.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = SpinContext::new(ts).unwrap();
        let map = SwMap::new(ctx, OrderingParameter::new(sigma).unwrap());
        let a = random_operator(ctx.hilbert_dim(), &mut rng);
        let r = rotation_z::<f64>(&ctx, alpha);
        let lhs = map.operator_to_symbol(&(&(&r * &a) * &r.adjoint())).unwrap();
        let rhs = map.operator_to_symbol(&a).unwrap().rotate_z(alpha);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn kernel_reproduces_symbol_values(seed in any::<u64>(), ts in 1u32..5, sigma in -1.0f64..=1.0,
                                       theta in 0.0f64..std::f64::consts::PI, phi in 0.0f64..std::f64::consts::TAU) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ctx = SpinContext::new(ts).unwrap();
        let map = SwMap::new(ctx, OrderingParameter::new(sigma).unwrap());
        let a = random_operator(ctx.hilbert_dim(), &mut rng);
        let k = map.kernel_eval(theta, phi).unwrap();
        let via_kernel = (a.matrix() * k.matrix()).trace();
        let c = map.operator_to_symbol(&a).unwrap();
        let via_series = spinphase::sphere::lm_pairs(c.band_limit())
            .map(|(l, m)| c.get(l, m) * spinphase::sphere::ylm_eval(l, m, theta, phi).unwrap())
            .fold(Complex::new(0.0, 0.0), |s, z| s + z);
        prop_assert!((via_kernel - via_series).norm() < 1e-11);
    }
}
