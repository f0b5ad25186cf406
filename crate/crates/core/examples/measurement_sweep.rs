// Accuracy against the number of measurements, written as a plot-ready CSV
// through the command-line driver.

use std::path::PathBuf;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::temp_dir().join(format!("binopt-sweep-{}", std::process::id()));
    let args = [
        "binopt",
        "sweep",
        "recovery",
        "--axis",
        "m",
        "--values",
        "40,80,120",
        "--n",
        "200",
        "--s",
        "20",
        "--trials",
        "3",
        "--seed",
        "11",
        "--out-dir",
    ];
    let mut argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    argv.push(out.display().to_string());
    let cli = <binopt::cli::Cli as clap::Parser>::try_parse_from(argv)?;
    binopt::cli::run(&cli)?;
    let summary = std::fs::read_to_string(out.join("sweep-recovery-m.summary.csv"))?;
    print!("{summary}");
    std::fs::remove_dir_all(&out)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
