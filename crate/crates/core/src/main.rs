use clap::Parser;
use conicrank::cli::{run, RunConfig};

fn main() {
    let cfg = RunConfig::parse();
    let out = run(&cfg);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
