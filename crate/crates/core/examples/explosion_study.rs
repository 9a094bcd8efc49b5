//! Explosion study for negative small jumps: how often the solved field
//! dominates the blow-up barrier near the horizon corner, per initial level.

use levy_hjm::config::ExperimentConfig;
use levy_hjm::experiment::explosion_study;

const CONFIG: &str = "\
[measure]
kind = truncated_stable_negative
rho = 1.5
[model]
horizon = 1
eps = 1e-4
[seeds]
master_seed = 7
count = 40
[comparison]
enabled = true
[study]
f0_levels = 0.5, 1, 3, 10, 100
grid_levels = 50, 100
";

fn main() {
    let cfg = ExperimentConfig::parse(CONFIG).unwrap();
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let cells = explosion_study(&cfg, workers).unwrap();
    println!(
        "{:>6} {:>5} {:>10} {:>10} {:>12} {:>14}",
        "f0", "n", "converged", "dominance", "max f inner", "h inner"
    );
    for c in cells {
        println!(
            "{:>6} {:>5} {:>10} {:>10.3} {:>12.4e} {:>14.4e}",
            c.f0,
            c.n,
            c.converged,
            c.dominance_frequency(),
            c.max_f_innermost,
            c.h_innermost
        );
    }
}
