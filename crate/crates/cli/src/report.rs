//! Machine-readable reports. Field order is the serialization order.

use std::time::Duration;

use pamdp_core::lattice::PaRecord;
use pamdp_core::numeric::Arith;
use pamdp_core::rational::{to_f64, Rational};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct ModelInfo {
    pub source: String,
    pub conditions: usize,
    pub operators: usize,
    /// `|M_S|`, the states surviving the pruning of blocking states.
    pub states: u128,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub setup_ms: f64,
    pub lump_ms: f64,
    pub syst_ms: f64,
    pub impr_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct BlockValue {
    pub block: Vec<PaRecord>,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct StrategyRecord {
    pub block: Vec<PaRecord>,
    pub action: String,
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub objective: &'static str,
    pub engine: &'static str,
    pub arith: &'static str,
    pub direction: &'static str,
    pub model: ModelInfo,
    pub initial_state: String,
    /// SSP value or EMP gain of the initial state.
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bias: Option<String>,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_quotient: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BlockValue>,
    pub strategy: Vec<StrategyRecord>,
}

#[derive(Debug, Serialize)]
pub struct EngineSummary {
    pub iterations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_quotient: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_ms: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct CompareReport {
    pub objective: &'static str,
    pub model: ModelInfo,
    pub agree: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<String>,
    /// States compared (all enumerated states for EMP, proper ones for SSP).
    pub compared: usize,
    pub symblicit: EngineSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explicit: Option<EngineSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

pub fn ms(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

/// Exact values print as fractions; float-mode values as decimals.
pub fn value(r: &Rational, arith: Arith) -> String {
    match arith {
        Arith::Exact => r.to_string(),
        Arith::Float => format!("{}", to_f64(r)),
    }
}

pub fn to_json<T: Serialize>(r: &T) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("reports serialize");
    s.push('\n');
    s
}
