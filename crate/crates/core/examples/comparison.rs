//! The barrier h, its companion g and the dominance ladder on a grid.

use levy_hjm::comparison::{closed_double_integral, comparison_bundle, comparison_dominates, power_mean_sides};
use levy_hjm::grid::{GridSpec, TriangleField};
use levy_hjm::simulation::CoefficientField;

fn main() {
    let grid = GridSpec::new(1.0, 40);
    let b = comparison_bundle(1.0, 1.0, 0.5, 2.0, grid).unwrap();
    println!(
        "h(0,0) = {}, h at corner = {}, g at corner = {}",
        b.h.get(0, 0),
        b.h.get(40, 40),
        b.g.get(40, 40)
    );
    println!("g along the diagonal:");
    for i in (0..=40).step_by(5) {
        println!(
            "  t = T = {:.3}: h = {:.4e}, g = {:.4e}",
            grid.time(i),
            b.h.get(i, i),
            b.g.get(i, i)
        );
    }
    println!(
        "closed double integral at (0.5, 0.5): {:.12}",
        closed_double_integral(0.5, 0.5, 1.0, 1.0).unwrap()
    );

    // A field equal to h off the corner dominates; a bounded one does not.
    let a = CoefficientField::from_values(b.g.clone());
    let on_barrier = TriangleField::from_fn(grid, |i, j| {
        if (i, j) == (40, 40) {
            f64::INFINITY
        } else {
            b.h.get(i, j)
        }
    });
    let bounded = TriangleField::filled(grid, 1e3);
    for (name, f) in [("f = h", &on_barrier), ("f = 1000", &bounded)] {
        let r = comparison_dominates(f, &a, &b, 0.0);
        println!(
            "{name}: dominates = {}, verified delta = {:?}",
            r.dominates(),
            r.verified_delta
        );
        for rung in &r.ladder {
            println!(
                "    cut {:>2} cells (delta {:.3}): {}",
                rung.cells, rung.delta, rung.holds
            );
        }
    }

    let (lhs, rhs) = power_mean_sides(&[(0.0, 0.0), (1.0, 1.0)], 0.5);
    println!("power mean for f(x) = x: {lhs:.6} ≤ {rhs:.6}");
}
