use spinphase::bopp::left_mult_superoperator;
use spinphase::dynamics::{coherent_state, integrate, unitary_generator, Method, ObservableEvaluator};
use spinphase::expr::SpinComponent;
use spinphase::sphere::spectral_norm;
use spinphase::su2::{spin_matrices, SpinContext};
use spinphase::sw::{OrderingParameter, SwMap};
use spinphase::{BoppOps32, Expression32};

#[test]
fn bopp_operators_in_single_precision() {
    let ctx = SpinContext::new(4).unwrap();
    let sm = spin_matrices::<f32>(&ctx);
    for sigma in [-1.0, 0.0, 0.5, 1.0] {
        let sigma = OrderingParameter::new(sigma).unwrap();
        let ops = BoppOps32::new(&ctx, sigma);
        for c in SpinComponent::ALL {
            let oracle = left_mult_superoperator(sm.component(c.index()), sigma).unwrap();
            assert!(spectral_norm(&ops.left(c).sub(&oracle).to_dense()) < 1e-4);
        }
    }
}

#[test]
fn precession_in_single_precision() {
    let ctx = SpinContext::new(2).unwrap();
    let sigma = OrderingParameter::SYMMETRIC;
    let ops = BoppOps32::new(&ctx, sigma);
    let g = unitary_generator(&ops, &Expression32::linear([0.0, 0.0, -1.0])).unwrap();
    let w0 = SwMap::new(ctx, sigma).operator_to_symbol(&coherent_state::<f32>(&ctx, 0.5, 0.0)).unwrap();
    let eval = ObservableEvaluator::new(&ctx, sigma).unwrap();
    let r = integrate(&g, &w0, 3.0f32, 0.01, Method::Rk4, &eval).unwrap();
    let o = r.observables.last().unwrap();
    let want = 0.5f32.sin();
    assert!((o.s[0] - want * 3.0f32.cos()).abs() < 1e-4);
    assert!((o.s[1] + want * 3.0f32.sin()).abs() < 1e-4);
    assert!((o.trace - 1.0).abs() < 1e-4);
}
