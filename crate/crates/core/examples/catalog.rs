//! Classify every entry of the reference catalog and print its certificate.

use levy_hjm::catalog::reference_catalog;
use levy_hjm::measure::validate;
use levy_hjm::regime::classify;

fn main() {
    println!(
        "{:<32} {:<14} {:>8} {:>6} {:>9}",
        "measure", "verdict", "alpha", "gamma", "beta"
    );
    for entry in reference_catalog() {
        let m = validate(entry.spec.clone(), &entry.vol).expect("catalog entries are valid");
        let report = classify(&m, &entry.vol, entry.horizon);
        let (a, g, b) = report
            .certificate
            .map(|c| {
                (
                    format!("{:.4}", c.alpha),
                    format!("{:.3}", c.gamma),
                    format!("{:.4}", c.beta),
                )
            })
            .unwrap_or_default();
        println!(
            "{:<32} {:<14} {a:>8} {g:>6} {b:>9}",
            entry.name,
            report.verdict.to_string()
        );
        for note in &report.notes {
            println!("    {note}");
        }
    }
}
