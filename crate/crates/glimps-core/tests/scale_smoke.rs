//! Benchmark-scale smoke checks for the solver stack.

use glimps_core::metrics::coef_error;
use glimps_core::milp::LambdaMode;
use glimps_core::pipeline::{glimps_detect, GlimpsConfig};
use glimps_core::synth::{generate, InstanceSpec};

fn run_case(
    p: f64,
    removal: f64,
    lambda: LambdaMode,
    sigma: f64,
    seed: u64,
    limit: f64,
) -> (f64, f64, usize, String) {
    let spec = InstanceSpec::new(100, 5, p, sigma, seed).unwrap();
    let inst = generate(&spec);
    let tau = if sigma > 0.0 { 3.0 * sigma } else { 1e-6 * (1.0 + inst.x.norm_inf()) };
    let cfg = GlimpsConfig {
        removal_fraction: removal,
        lambda,
        time_limit: limit,
        tau: Some(tau),
        ..Default::default()
    };
    let t0 = std::time::Instant::now();
    let res = glimps_detect(&inst.u, &inst.x, &cfg).unwrap();
    let dt = t0.elapsed().as_secs_f64();
    let err = coef_error(&inst.theta_true, &res.theta_hat);
    let stage2 = res.stage2.as_ref().unwrap();
    (err, dt, stage2.nodes_explored, format!("{:?}", stage2.status))
}

#[test]
#[ignore = "manual perf probe"]
fn scale_probe() {
    println!("--- glimps removal 0.4, stall-prone cases ---");
    for &p in &[0.80, 0.82] {
        for seed in 0..5u64 {
            let (err, dt, nodes, status) =
                run_case(p, 0.4, LambdaMode::Noiseless, 0.0, 2000 + seed, 60.0);
            println!("p={p:.2} seed={seed} err={err:.2e} t={dt:.2}s nodes={nodes} status={status}");
        }
    }
    println!("--- milp-only low p (proof speed) ---");
    for &p in &[0.10, 0.30] {
        for seed in 0..2u64 {
            let (err, dt, nodes, status) =
                run_case(p, 0.0, LambdaMode::Noiseless, 0.0, 4000 + seed, 60.0);
            println!("milp p={p:.2} seed={seed} err={err:.2e} t={dt:.2}s nodes={nodes} status={status}");
        }
    }
    println!("--- glimps noisy corner: sigma=1e-1 p=0.1 (criterion 5) ---");
    for seed in 0..3u64 {
        let (err, dt, nodes, status) =
            run_case(0.1, 0.3, LambdaMode::Noisy(1000.0), 1e-1, 5000 + seed, 10.0);
        println!("sigma=1e-1 seed={seed} err={err:.2e} t={dt:.2}s nodes={nodes} status={status}");
    }
    for seed in 0..3u64 {
        let (err, dt, nodes, status) =
            run_case(0.1, 0.3, LambdaMode::Noisy(1000.0), 1e-3, 5000 + seed, 10.0);
        println!("sigma=1e-3 seed={seed} err={err:.2e} t={dt:.2}s nodes={nodes} status={status}");
    }
    for seed in 0..2u64 {
        let (err, dt, nodes, status) =
            run_case(0.7, 0.3, LambdaMode::Noisy(1000.0), 1e-3, 6000 + seed, 10.0);
        println!("sigma=1e-3 p=0.7 seed={seed} err={err:.2e} t={dt:.2}s nodes={nodes} status={status}");
    }
}
