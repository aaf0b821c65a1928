//! Runs an experiment suite from an INI string and prints its verdicts.

use euclid_rp::cli::{run_suite, Command};
use euclid_rp::config::ExperimentConfig;

fn main() -> euclid_rp::Result<()> {
    let cfg = ExperimentConfig::parse("[spin]\ntwo_j = 0, 1, 2, 3\nmomenta = 20\n")?;
    let out = std::env::temp_dir().join("euclid-rp-example");
    let report = run_suite(Command::SpinCheck, &cfg, &out)?;
    for v in &report.verdicts {
        println!("{} {}", if v.pass { "ok  " } else { "FAIL" }, v.name);
    }
    println!("artifacts in {}", out.display());
    Ok(())
}
