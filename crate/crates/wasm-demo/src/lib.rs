//! Browser bindings for three workbench operations on a frame document:
//! evaluating a formula, classifying the frame and drawing it as Graphviz.
//!
//! The plain functions return `Result<String, String>` so they can be tested
//! natively; the exported wrappers turn errors into JavaScript exceptions.

use std::fmt::Write as _;

use possibility::document::{frame_to_dot, parse_frame, parse_valuation};
use possibility::forcing::{truth_set, valid_on_frame_with_budget, Model};
use possibility::formula::Formula;
use possibility::frame::{classify, Frame};
use wasm_bindgen::prelude::*;

/// Kept well below the library default so a page never stalls.
const BUDGET: u64 = 2_000_000;

fn frame(doc: &str) -> Result<Frame, String> {
    parse_frame(doc).map_err(|e| e.to_string())
}

/// Truth set of `formula` under the valuation, then its validity on the
/// frame. An empty valuation text skips the truth set.
pub fn evaluate_text(doc: &str, valuation: &str, formula: &str) -> Result<String, String> {
    let f = frame(doc)?;
    let phi = Formula::parse(formula).map_err(|e| e.to_string())?;
    let mut out = String::new();
    if !valuation.trim().is_empty() {
        let v = parse_valuation(valuation, f.n()).map_err(|e| e.to_string())?;
        let model = Model::new(f.clone(), v).map_err(|e| e.to_string())?;
        let t = truth_set(&model, &phi).map_err(|e| e.to_string())?;
        let _ = writeln!(out, "truth set: {:?}", t.to_vec());
    }
    let report = valid_on_frame_with_budget(&f, &phi, BUDGET).map_err(|e| e.to_string())?;
    let _ = writeln!(out, "valid: {}", report.verdict);
    if let Some(w) = report.witness {
        let _ = writeln!(out, "witness: {w}");
    }
    Ok(out)
}

pub fn classify_text(doc: &str) -> Result<String, String> {
    let c = classify(&frame(doc)?).map_err(|e| e.to_string())?;
    Ok(c.flags().iter().map(|(name, v)| format!("{name}: {v}\n")).collect())
}

pub fn dot_text(doc: &str) -> Result<String, String> {
    Ok(frame_to_dot(&frame(doc)?))
}

#[wasm_bindgen]
pub fn evaluate(doc: &str, valuation: &str, formula: &str) -> Result<String, JsError> {
    evaluate_text(doc, valuation, formula).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = classifyFrame)]
pub fn classify_frame(doc: &str) -> Result<String, JsError> {
    classify_text(doc).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = frameDot)]
pub fn frame_dot(doc: &str) -> Result<String, JsError> {
    dot_text(doc).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const FAN: &str =
        r#"{"states": 4, "leq": [[1,0],[2,0],[3,0]], "rels": {"i": [[0,0],[0,1],[0,2],[0,3],[1,0],[1,1],[1,2],[1,3],[2,0],[2,1],[2,2],[2,3],[3,0],[3,1],[3,2],[3,3]]}, "props": "full"}"#;

    #[test]
    fn evaluates_truth_sets_and_validity() {
        let out = evaluate_text(FAN, r#"{"p1": [1]}"#, "<i>p1").unwrap();
        assert_eq!(out, "truth set: [0, 1, 2, 3]\nvalid: false\nwitness: state 0 under p1={}\n");
        let out = evaluate_text(FAN, "", "[i]p1 -> p1").unwrap();
        assert_eq!(out, "valid: true\n");
    }

    #[test]
    fn reports_errors_as_text() {
        assert!(evaluate_text(FAN, "", "p1 ->").is_err());
        assert!(evaluate_text(FAN, r#"{"p1": [0]}"#, "p1").unwrap_err().contains("admissible"));
        assert!(classify_text("{").is_err());
    }

    #[test]
    fn classification_and_dot() {
        let c = classify_text(FAN).unwrap();
        assert!(c.starts_with("full: true\n"));
        assert!(c.contains("principal: false\n"));
        assert!(dot_text(FAN).unwrap().contains("  0 -> 1;\n"));
    }
}
