use rfm_core::bench::{run_experiment, ExperimentConfig, SolverKind};

fn main() {
    for seed in [0u64, 1, 2, 3, 4] {
        let mut cfg = ExperimentConfig::new("cubic_elliptic_3d", &[2, 2, 2], &[12, 12, 12], 200);
        cfg.solver = SolverKind::Amipn;
        cfg.seed = seed;
        cfg.eval_grid = vec![30, 30, 30];
        let out = run_experiment(&cfg);
        println!(
            "seed {seed}: err {:.3e} IT {} NJ {} residual {:.3e} status {} term {:?}",
            out.report.relative_l2[0],
            out.report.outer_iterations,
            out.report.jacobian_evaluations,
            out.report.residual_norm,
            out.report.status,
            out.report.termination,
        );
    }
}
