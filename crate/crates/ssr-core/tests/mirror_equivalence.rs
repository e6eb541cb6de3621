//! Plain SGD iterates must coincide with the mirror-descent closed form
//! reconstructed from the observed gradient history.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ssr_core::baselines::SgdLearner;
use ssr_core::{Example, LossModel, OnlineLearner};
use ssr_testkit::md_sgd_oracle;

#[test]
fn sgd_matches_mirror_descent_on_random_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut max_dev = 0.0f64;
    for _ in 0..50 {
        let d = rng.gen_range(1..=3);
        let eta = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let mut sgd = SgdLearner::new(d, eta).unwrap();
        let mut grads: Vec<Vec<f64>> = Vec::new();
        for _ in 0..20 {
            let x: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y: f64 = rng.gen_range(-2.0..2.0);
            // gradient at the pre-step iterate, recorded for the oracle
            let z = sgd.weights().dot(&x);
            let factor = z - y;
            grads.push(x.iter().map(|xi| factor * xi).collect());
            let e = Example::new(x, y).unwrap();
            sgd.step(&e, &LossModel::Squared).unwrap();

            let oracle = md_sgd_oracle(&grads, eta).unwrap();
            for (i, &oi) in oracle.iter().enumerate() {
                max_dev = max_dev.max((sgd.weights().get(i) - oi).abs());
            }
        }
    }
    assert!(max_dev < 1e-8, "max coordinate deviation {max_dev}");
}
