//! Deterministic oracles: scale functions, hitting probabilities, expected
//! angular quadratic variation and energy integrals.

mod energy;
mod qv;
mod scale;

pub use energy::{green_energy_annulus, sector_energy, GreenEnergy, GreenOracleH2, SectorEnergy};
pub use qv::{expected_angular_qv, InnerBoundary, QvEstimate, DEFAULT_R_LO};
pub use scale::{
    build_scale, classify_transience, hitting_probability, hitting_probability_between, ScaleLimit, ScaleTable,
    Verdict, EXPONENT_RECURRENT, EXPONENT_TRANSIENT, R_REF,
};
