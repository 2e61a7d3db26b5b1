//! Runs the built-in oracle suite.

fn main() {
    let checks = cartan::validate::oracle_suite();
    for c in &checks {
        println!("{} {:<24} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if checks.iter().any(|c| !c.pass) {
        std::process::exit(3);
    }
}
