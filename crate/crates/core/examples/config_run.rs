//! Drives the experiment runner from a flat configuration text, as the
//! command-line tool does.

use string_damping::experiment::{run, ConfigEntries, ExperimentConfig};

const CONFIG: &str = "
# random band-limited data, damping problem
mode = decay
problem = damp
seed = 11
amplitude = 8
bandlimit = 12
horizon = 30pi
grid = 512
";

fn main() {
    let cfg = ExperimentConfig::from_entries(&ConfigEntries::parse(CONFIG).unwrap()).unwrap();
    let out = run(&cfg).unwrap();
    let lines: Vec<&str> = out.stdout.lines().collect();
    for line in lines.iter().take(4) {
        println!("{line}");
    }
    println!("...");
    for line in &lines[lines.len() - 3..] {
        println!("{line}");
    }
}
