//! Quick throughput probe: fused simulate-and-summarize rate on the
//! 60-node fixture, the hot loop of every inference run.

use std::time::Instant;

use plantsis::abc::AbcContext;
use plantsis::fixtures;
use plantsis::rng::task_rng;

fn main() {
    let net = fixtures::fixture_network();
    let series = fixtures::synthetic_training_series();
    let ctx = AbcContext::new(&net, &series).unwrap();
    let params = fixtures::synthetic_params();
    let mut rng = task_rng(1, 0);
    let n = 200_000;
    let t0 = Instant::now();
    let mut acc = 0.0;
    for _ in 0..n {
        acc += ctx.simulate_discrepancy(params, &mut rng);
    }
    let dt = t0.elapsed().as_secs_f64();
    println!(
        "{n} simulations in {dt:.3}s = {:.0}/s (mean discrepancy {:.4})",
        n as f64 / dt,
        acc / n as f64
    );
}
