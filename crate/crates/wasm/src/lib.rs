//! Browser bindings: a thin JSON facade over the verifier for the static
//! demo page. Everything here is pure computation, so the crate also
//! compiles and runs natively.

use wasm_bindgen::prelude::*;

use hamcheck_core::ansatz::{self, Refutation};
use hamcheck_core::catalog;
use hamcheck_core::conditions::{verify_named, CheckOptions};
use hamcheck_core::dsl;
use hamcheck_core::report::Report;

fn err_json(message: &str) -> String {
    serde_json::json!({ "error": message }).to_string()
}

/// Parse a `.hop` source and verify it; returns the JSON report, or an
/// object with an `error` field.
#[wasm_bindgen]
pub fn verify_text(source: &str) -> String {
    match dsl::parse(source) {
        Ok(parsed) => {
            let report = verify_named(&parsed.spec, &CheckOptions::default(), "input");
            Report::from_conditions(&report, &parsed.spec.space, 0).to_json()
        }
        Err(e) => err_json(&e.to_string()),
    }
}

/// Catalog index: name, section, rank class, case labels, notes.
#[wasm_bindgen]
pub fn catalog_index() -> String {
    let rows: Vec<serde_json::Value> = catalog::all()
        .iter()
        .map(|e| {
            serde_json::json!({
                "name": e.name,
                "section": e.section,
                "rank_class": e.rank_class,
                "cases": e.cases.iter().map(|c| c.label.clone()).collect::<Vec<_>>(),
                "notes": e.notes,
            })
        })
        .collect();
    serde_json::to_string(&rows).unwrap()
}

/// The `.hop` text of one catalog family case.
#[wasm_bindgen]
pub fn catalog_export(name: &str, case: usize) -> String {
    match catalog::get(name).and_then(|e| e.cases.get(case).map(|c| (e, c))) {
        Some((entry, fam)) => dsl::print(&fam.instantiate(&entry.op)),
        None => format!("# unknown entry or case: {name}/{case}\n"),
    }
}

/// Verify every family case of a catalog entry; JSON list of reports.
#[wasm_bindgen]
pub fn catalog_verify(name: &str) -> String {
    let Some(entry) = catalog::get(name) else {
        return err_json(&format!("unknown catalog entry `{name}`"));
    };
    let reports: Vec<Report> = entry
        .cases
        .iter()
        .map(|case| {
            let rep = entry.verify_case(case, &CheckOptions::default());
            Report::from_conditions(&rep, &entry.op.space, 0)
        })
        .collect();
    serde_json::to_string(&reports).unwrap()
}

/// Run a fixture: the base operator must verify, and the `perturb { ... }`
/// block (if any) must be refuted. Returns a small JSON summary.
#[wasm_bindgen]
pub fn run_fixture(source: &str) -> String {
    let parsed = match dsl::parse(source) {
        Ok(p) => p,
        Err(e) => return err_json(&e.to_string()),
    };
    let base = verify_named(&parsed.spec, &CheckOptions::default(), "fixture");
    if !base.hamiltonian {
        let failing: Vec<String> = base.residuals.iter().map(|r| r.id.to_string()).collect();
        return serde_json::json!({
            "base_hamiltonian": false,
            "failing": failing,
            "pass": false,
        })
        .to_string();
    }
    if parsed.unit.perturb.is_empty() {
        return serde_json::json!({
            "base_hamiltonian": true,
            "vacuous": true,
            "pass": true,
        })
        .to_string();
    }
    let perturbed = match parsed.spec.substitute(&parsed.unit.perturb) {
        Ok(s) => s,
        Err(e) => return err_json(&e.to_string()),
    };
    match ansatz::perturb_and_refute(&perturbed, "fixture") {
        Refutation::Refuted(id) => serde_json::json!({
            "base_hamiltonian": true,
            "refuted_by": id.to_string(),
            "pass": true,
        })
        .to_string(),
        Refutation::NotRefuted => serde_json::json!({
            "base_hamiltonian": true,
            "refuted_by": serde_json::Value::Null,
            "pass": false,
        })
        .to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_text_reports_json() {
        let src = "fields u v\ndims x y\nfunc F(v)\ngx = [[1,0],[0,0]]\ngy = [[v,0],[0,0]]\ntail = [[1/2*v_y,0],[0,0]]\nomega = [[0,F(v)],[-F(v),0]]\n";
        let json: serde_json::Value = serde_json::from_str(&verify_text(src)).unwrap();
        assert_eq!(json["hamiltonian"], true);
        let bad = verify_text("fields u\n???");
        assert!(bad.contains("error"));
    }

    #[test]
    fn catalog_surface_works() {
        let idx: serde_json::Value = serde_json::from_str(&catalog_index()).unwrap();
        assert_eq!(idx.as_array().unwrap().len(), 26);
        let text = catalog_export("P20", 0);
        let json: serde_json::Value = serde_json::from_str(&verify_text(&text)).unwrap();
        assert_eq!(json["hamiltonian"], true);
        let reports: serde_json::Value = serde_json::from_str(&catalog_verify("P15")).unwrap();
        assert_eq!(reports.as_array().unwrap().len(), 4);
    }

    #[test]
    fn fixture_flow_round_trips() {
        let mut src = catalog_export("P1", 0);
        src.push_str("param eps\nperturb { F = F(v) + eps*u }\n");
        let json: serde_json::Value = serde_json::from_str(&run_fixture(&src)).unwrap();
        assert_eq!(json["pass"], true);
        assert!(json["refuted_by"].as_str().unwrap().starts_with("C1"));
    }
}
