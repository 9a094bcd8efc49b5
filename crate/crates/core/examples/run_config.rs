//! Run one experiment command on a configuration file, as the binary does.
//!
//! Usage: cargo run --example run_config -- <command> <config.ini> [out-dir]

use levy_hjm::experiment::{self, load_config, RunOptions};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (command, config) = match args.as_slice() {
        [c, p, ..] => (c.as_str(), p.as_str()),
        _ => (
            "classify",
            concat!(env!("CARGO_MANIFEST_DIR"), "/configs/existence_tsp.ini"),
        ),
    };
    let out = args.get(2).cloned().unwrap_or_else(|| "out".into());
    let run = match command {
        "classify" => experiment::cmd_classify,
        "exponent-table" => experiment::cmd_exponent_table,
        "simulate" => experiment::cmd_simulate,
        "solve" => experiment::cmd_solve,
        "explode-study" => experiment::cmd_explode_study,
        other => {
            eprintln!("unknown command {other}");
            std::process::exit(2);
        }
    };
    let result = load_config(config.as_ref()).and_then(|cfg| run(&cfg, &RunOptions::new(&out, 1)));
    match result {
        Ok(summary) => {
            summary.lines.iter().for_each(|l| println!("{l}"));
            summary.files.iter().for_each(|f| println!("wrote {}", f.display()));
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
