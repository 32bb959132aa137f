//! JSON envelopes for reports and error records.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

pub const SCHEMA: u32 = 1;

/// Conventions every report carries, so consumers can audit the numbers.
pub fn conventions() -> Value {
    json!({
        "fourier_transform": "f^(w) = int f(t) exp(-2 pi i t.w) dt",
        "time_frequency_shift": "pi(x, w) f(t) = exp(2 pi i w.t) f(t - x)",
        "symplectic_rotation": "J(x, w) = (-w, x)",
        "coefficient_sign": "c_k = int_[0,1)^n p(L y) exp(-2 pi i k.y) dy, so p(z) = sum_k c_k exp(2 pi i <L^-T k, z>)",
        "quantization": "Op_tau(p) = sum_k c_k exp(2 pi i tau mu2.mu1) pi(J mu), mu = L^-T k = (mu1, mu2)",
        "coefficient_weight": "v is evaluated at J L^-T k in both the continuity bound and the invertibility criterion",
        "inverse_norm_bound": "1 / ((1 + C v(0)) |c_0| - C sum_k |c_k| v(J L^-T k))",
        "weighted_norms": "signal weights are m(t, 0); transform weights are m(0, w)",
        "float_format": "CSV: 17 significant digits; JSON: shortest round-trip representation",
    })
}

/// `{"schema": 1, "command": .., "conventions": .., "result": ..}`.
pub fn envelope(command: &str, result: Value) -> Value {
    json!({ "schema": SCHEMA, "command": command, "conventions": conventions(), "result": result })
}

/// Machine-readable failure record.
pub fn error_record(kind: &str, exit_code: u8, message: &str, report: Option<Value>) -> Value {
    let mut error = json!({ "kind": kind, "exit_code": exit_code, "message": message });
    if let Some(r) = report {
        error["report"] = r;
    }
    json!({ "schema": SCHEMA, "error": error })
}

/// Writes `value` pretty-printed to `path`, or to stdout.
pub fn emit(value: &Value, path: Option<&Path>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    match path {
        Some(p) => std::fs::write(p, text + "\n"),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")
        }
    }
}
