//! Drives a full experiment from a TOML string, as the command-line tool does.

use cartan::config::ExperimentConfig;
use cartan::output::OutputSet;
use cartan::runner::{run, RunOptions};

const CONFIG: &str = r#"
kind = "simulate"

[profile]
kind = "constant"
kappa = -1.0
r_max = 30.0

[start]
points = [[1.0, 0.0], [2.0, 0.0], [4.0, 0.0]]

[stop]
r_inf = 12.0

[mc]
n_paths = 500
seed = 1
"#;

fn main() -> cartan::Result<()> {
    let cfg = ExperimentConfig::parse(CONFIG)?;
    let dir = std::env::temp_dir().join("cartan-run-config");
    let mut out = OutputSet::create(&dir)?;
    for line in run(&cfg, RunOptions { plot: true, paths: false }, &mut out)? {
        println!("{line}");
    }
    for f in out.commit()? {
        println!("wrote {}", f.display());
    }
    println!("config hash {}", cfg.config_hash());
    Ok(())
}
