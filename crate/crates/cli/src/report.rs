//! Rendering of verification reports, text and JSON.

use anyhow::Result;
use serde_json::{json, Value};
use vertexalg::verify::SuiteReport;

pub fn render_text(rep: &SuiteReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "suite {} ... {}\n",
        rep.suite,
        if rep.passed() { "PASS" } else { "FAIL" }
    ));
    for check in &rep.checks {
        out.push_str(&format!(
            "  [{}] {}\n",
            if check.passed { "ok" } else { "FAIL" },
            check.name
        ));
        if !check.passed && !check.detail.is_empty() {
            out.push_str(&format!("        {}\n", check.detail));
        }
    }
    for (k, v) in &rep.ledger {
        out.push_str(&format!("  ledger {k} = {v}\n"));
    }
    out
}

pub fn to_json(reports: &[SuiteReport]) -> Value {
    json!({
        "schema": "vertexalg.verify/1",
        "passed": reports.iter().all(|r| r.passed()),
        "suites": reports.iter().map(|r| json!({
            "suite": r.suite,
            "passed": r.passed(),
            "checks": r.checks.iter().map(|c| json!({
                "name": c.name,
                "passed": c.passed,
                "detail": c.detail,
            })).collect::<Vec<_>>(),
            "ledger": r.ledger,
        })).collect::<Vec<_>>(),
    })
}

pub fn render_json_summary(value: &Value) -> Result<String> {
    let mut out = String::new();
    let passed = value["passed"].as_bool().unwrap_or(false);
    out.push_str(&format!(
        "verification report: {}\n",
        if passed { "PASS" } else { "FAIL" }
    ));
    if let Some(suites) = value["suites"].as_array() {
        for s in suites {
            out.push_str(&format!(
                "  {} ... {}\n",
                s["suite"].as_str().unwrap_or("?"),
                if s["passed"].as_bool().unwrap_or(false) {
                    "PASS"
                } else {
                    "FAIL"
                }
            ));
        }
    }
    Ok(out)
}
