//! Trial reports: one inequality check outcome, serialized as one JSONL line.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::value::RawValue;
use serde_json::Value;

use crate::matcore::{serialize_matrix, HermitianMatrix};
use crate::specfun::ScalarFn;

/// Result of one check.
///
/// `margin <= 0` means the inequality held; a positive margin is the size of
/// the violation. `worst_k` is 1-based (0 when not applicable).
#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(rename = "checker")]
    pub check_id: String,
    pub margin: f64,
    pub worst_k: usize,
    /// Set when a theorem-backed relation failed; never set for findings on
    /// open questions.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub anomaly: bool,
    pub inputs: BTreeMap<String, Box<RawValue>>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, Value>,
}

impl TrialReport {
    pub fn new(check_id: impl Into<String>, margin: f64, worst_k: usize) -> Self {
        TrialReport {
            trial: None,
            seed: None,
            check_id: check_id.into(),
            margin,
            worst_k,
            anomaly: false,
            inputs: BTreeMap::new(),
            details: BTreeMap::new(),
        }
    }

    pub fn with_matrix(mut self, name: &str, m: &HermitianMatrix) -> Self {
        self.inputs
            .insert(name.to_string(), raw(serialize_matrix(m)));
        self
    }

    pub fn with_fn<F: ScalarFn + ?Sized>(mut self, name: &str, f: &F) -> Self {
        self.inputs.insert(name.to_string(), raw(f.describe()));
        self
    }

    pub fn with_scalar(mut self, name: &str, x: f64) -> Self {
        self.inputs.insert(name.to_string(), raw(format_f64(x)));
        self
    }

    pub fn with_detail(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
        self
    }

    pub fn with_trial(mut self, trial: u64, seed: u64) -> Self {
        self.trial = Some(trial);
        self.seed = Some(seed);
        self
    }

    /// Marks the report as an anomaly if the margin exceeds `tol`.
    pub fn flag_if_above(mut self, tol: f64) -> Self {
        self.anomaly |= !(self.margin <= tol);
        self
    }

    pub fn held(&self, tol: f64) -> bool {
        self.margin <= tol
    }

    pub fn to_jsonl(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn raw(s: String) -> Box<RawValue> {
    RawValue::from_string(s).expect("valid JSON fragment")
}

fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::PiecewiseFn;

    #[test]
    fn jsonl_schema() {
        let r = TrialReport::new("tru", -0.5, 2)
            .with_trial(3, 45)
            .with_matrix("A", &HermitianMatrix::diag(&[1.0, 2.0]))
            .with_fn("f", &PiecewiseFn::identity())
            .with_scalar("u", 0.5);
        let v: Value = serde_json::from_str(&r.to_jsonl()).unwrap();
        assert_eq!(v["trial"], 3);
        assert_eq!(v["seed"], 45);
        assert_eq!(v["checker"], "tru");
        assert_eq!(v["margin"], -0.5);
        assert_eq!(v["worst_k"], 2);
        assert_eq!(v["inputs"]["A"]["n"], 2);
        assert!(v.get("anomaly").is_none());
    }

    #[test]
    fn anomaly_flag() {
        assert!(TrialReport::new("x", 1e-3, 1).flag_if_above(1e-9).anomaly);
        assert!(!TrialReport::new("x", 0.0, 1).flag_if_above(1e-9).anomaly);
        assert!(
            TrialReport::new("x", f64::NAN, 1)
                .flag_if_above(1e-9)
                .anomaly
        );
    }
}
