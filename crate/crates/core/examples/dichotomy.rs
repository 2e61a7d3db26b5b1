//! Transience of the threshold family K = -c/(r² log r): classifier verdicts
//! and hitting probabilities from the scale function.

use cartan::estimates::{build_scale, classify_transience, hitting_probability};
use cartan::geometry::{solve_jacobi, CurvatureProfile};

fn main() -> cartan::Result<()> {
    for c in [0.5, 0.9, 1.0, 1.1, 2.0, 4.0] {
        let p = CurvatureProfile::threshold_default(c, 1e6)?;
        let verdict = classify_transience(&p)?;
        let scale = build_scale(&solve_jacobi(&p)?)?;
        let hit = hitting_probability(&scale, 50.0, 5.0).map(|h| format!("{h:.4}")).unwrap_or_else(|e| format!("n/a ({e})"));
        println!("c = {c:<4} {:<12} P(hit r = 5 from r = 50) = {hit}", verdict.as_str());
    }
    Ok(())
}
