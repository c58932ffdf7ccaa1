//! Desk-scale benchmark runner: executes the default suite (or a single
//! named case) and writes Markdown + CSV results.

use clap::Parser;
use clique_anneal::bench::{default_suite, render_table, run_bench, write_results, DeskOptions};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "clique-anneal-bench", version, about = "Run the desk-scale benchmark suite")]
struct Args {
    /// Directory for bench.md / bench.csv [./results]
    #[arg(long, default_value = "results")]
    results_dir: PathBuf,
    /// Run only the case with this name
    #[arg(long)]
    case: Option<String>,
}

fn main() {
    let args = Args::parse();
    let mut suite = default_suite();
    if let Some(name) = &args.case {
        suite.retain(|c| &c.name == name);
        if suite.is_empty() {
            eprintln!("error: no case named {name:?}");
            std::process::exit(1);
        }
    }
    match run_bench(&suite, &DeskOptions::default()) {
        Ok(rows) => {
            print!("{}", render_table(&rows));
            if let Err(e) = write_results(&args.results_dir, &rows) {
                eprintln!("error: {e}");
                std::process::exit(2);
            }
            if rows.iter().any(|r| !r.passed()) {
                std::process::exit(1);
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
