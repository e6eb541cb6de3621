//! The learner's sparsification output must equal the brute-force minimizer
//! of the accumulated regularized objective, for both history weightings.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use ssr_core::ssr::{Mode, Schedule, SsrHyperparams, SsrLearner};
use ssr_core::OnlineLearner;
use ssr_testkit::{prox_oracle, prox_subgradient_residual, HistoryWeights, ProxInstance};

fn check_instances(mode: Mode, count: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (schedule, weighting) = match mode {
        Mode::Streaming => (Schedule::SqrtGrowth, HistoryWeights::Uniform),
        Mode::Averaged => (Schedule::BatchGrowth, HistoryWeights::LinearInS),
    };
    for instance in 0..count {
        let d = rng.gen_range(1..=5);
        let steps = rng.gen_range(1..=10);
        let eta = [0.0, 0.3, 1.0][rng.gen_range(0..3)];
        let epsilon = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
        let lambda = [0.0, 0.1, 0.5][rng.gen_range(0..3)];
        let hp = SsrHyperparams { eta, lambda, epsilon, schedule };
        let mut learner = SsrLearner::new(d, hp, mode).unwrap();

        let mut history: Vec<Vec<f64>> = Vec::new();
        let mut g_sum = vec![0.0; d];
        for s in 1..=steps {
            history.push(learner.weights().values().to_vec());
            let g: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = match weighting {
                HistoryWeights::Uniform => 1.0,
                HistoryWeights::LinearInS => s as f64,
            };
            for i in 0..d {
                g_sum[i] += c * g[i];
            }
            learner.step_with_gradient(&g).unwrap();

            let inst = ProxInstance {
                epsilon,
                eta,
                history: history.clone(),
                g_sum: g_sum.clone(),
                lambda: learner.lambda_t(),
                weights: weighting,
            };
            let oracle = prox_oracle(&inst).unwrap();
            for (i, &oi) in oracle.iter().enumerate() {
                let got = learner.weights().get(i);
                assert!(
                    (got - oi).abs() <= 1e-6,
                    "{mode:?} instance {instance} step {s} coord {i}: \
                     learner {got} vs oracle {oi}"
                );
            }
            let resid = prox_subgradient_residual(&inst, learner.weights().values());
            assert!(resid < 1e-8, "stationarity residual {resid}");
        }
    }
}

#[test]
fn streaming_weights_minimize_the_accumulated_objective() {
    check_instances(Mode::Streaming, 100, 71);
}

#[test]
fn averaged_weights_minimize_the_linearly_weighted_objective() {
    check_instances(Mode::Averaged, 100, 72);
}
