//! Transcription gate and cross-validation against the direct Schouten
//! test.
//!
//! The M6 family and the pointwise C2 identity, as displayed in the source
//! material, fail on operators that are certainly Hamiltonian. This suite
//! documents the gate outcome: which variants fail where, that the selected
//! variants pass everywhere, that the selection is unique within the
//! variant registry, and that the per-family conditions agree verdict for
//! verdict with the independent Schouten obstruction over the whole corpus
//! (catalog entries, their classified families, every recorded perturbation
//! fixture, and field relabelings).

use hamcheck_core::catalog;
use hamcheck_core::conditions::{
    check_compatibility, check_mokhov, verify, C2Variant, CheckOptions, Family, M6Variant,
    M7Variant,
};
use hamcheck_core::schouten;

fn m6_fails(variant: M6Variant) -> Vec<&'static str> {
    let opts = CheckOptions {
        m6: variant,
        ..CheckOptions::default()
    };
    catalog::all()
        .iter()
        .filter(|e| {
            check_mokhov(&e.op, &opts)
                .iter()
                .any(|r| r.id.family == Family::M6 && !r.expr.is_zero())
        })
        .map(|e| e.name.as_str())
        .collect()
}

fn m7_fails(variant: M7Variant) -> Vec<&'static str> {
    let opts = CheckOptions {
        m7: variant,
        ..CheckOptions::default()
    };
    catalog::all()
        .iter()
        .filter(|e| {
            check_mokhov(&e.op, &opts)
                .iter()
                .any(|r| r.id.family == Family::M7 && !r.expr.is_zero())
        })
        .map(|e| e.name.as_str())
        .collect()
}

#[test]
fn m6_variant_gate() {
    let registry = [
        M6Variant::AsPrinted,
        M6Variant::LastFactorLi,
        M6Variant::CyclicAsPrinted,
        M6Variant::CyclicLastFactorLi,
        M6Variant::Corrected,
    ];
    let mut passing = Vec::new();
    for v in registry {
        let fails = m6_fails(v);
        println!("M6 {:?}: {} catalog failures {:?}", v, fails.len(), fails);
        if fails.is_empty() {
            passing.push(v);
        }
    }
    // the printed arrangement fails (documented), and exactly one registry
    // variant passes all 26 entries
    assert!(!m6_fails(M6Variant::AsPrinted).is_empty());
    assert_eq!(passing, vec![M6Variant::Corrected]);
}

#[test]
fn m7_variant_gate() {
    // M7 as printed is correct: it passes all 26 entries, and the
    // registry alternative fails
    assert!(m7_fails(M7Variant::AsPrinted).is_empty());
    assert!(!m7_fails(M7Variant::CyclicFactorIl).is_empty());
}

#[test]
fn c2_variant_gate() {
    // the pointwise C2 identity rejects classified families that the
    // Schouten test certifies Hamiltonian; the antisymmetrized form is the
    // unique passing variant
    let printed = CheckOptions {
        c2: C2Variant::AsPrinted,
        ..CheckOptions::default()
    };
    let selected = CheckOptions::default();
    let mut printed_fails = Vec::new();
    for entry in catalog::all() {
        for case in &entry.cases {
            let spec = case.instantiate(&entry.op);
            assert!(schouten::jacobi_holds(&spec), "{} oracle", entry.name);
            let bad_printed = check_compatibility(&spec, &printed)
                .iter()
                .any(|r| r.id.family == Family::C2 && !r.expr.is_zero());
            let bad_selected = check_compatibility(&spec, &selected)
                .iter()
                .any(|r| r.id.family == Family::C2 && !r.expr.is_zero());
            assert!(
                !bad_selected,
                "{}/{}: antisymmetrized C2 fails a Hamiltonian family",
                entry.name, case.label
            );
            if bad_printed {
                printed_fails.push(format!("{}/{}", entry.name, case.label));
            }
        }
    }
    println!("pointwise C2 rejects: {:?}", printed_fails);
    assert!(
        printed_fails.iter().any(|s| s.starts_with("P13")),
        "P13's arbitrary f2(w) family witnesses the pointwise C2 defect"
    );
}

#[test]
fn conditions_agree_with_schouten_on_the_corpus() {
    let opts = CheckOptions::default();
    let mut checked = 0;
    for entry in catalog::all() {
        let specs: Vec<_> = std::iter::once(entry.op.clone())
            .chain(entry.cases.iter().map(|c| c.instantiate(&entry.op)))
            .chain(
                entry
                    .necessity
                    .perturbations
                    .iter()
                    .map(|p| p.case.instantiate(&entry.op)),
            )
            .collect();
        for spec in specs {
            let report = verify(&spec, &opts);
            // the bivector only sees the skew part, so compare only when
            // the order-zero symmetry checks (M1, M2, W1) hold
            let skew_ok = report
                .residuals
                .iter()
                .all(|r| !matches!(r.id.family, Family::M1 | Family::M2 | Family::W1));
            if skew_ok {
                assert_eq!(
                    report.hamiltonian,
                    schouten::jacobi_holds(&spec),
                    "{}: conditions and Schouten test disagree",
                    entry.name
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 100, "corpus unexpectedly small: {checked}");
}

#[test]
fn p24_corrected_reading_is_the_consistent_one() {
    let entry = catalog::get("P24").unwrap();
    assert!(schouten::jacobi_holds(&entry.op));
    assert!(verify(&entry.op, &CheckOptions::default()).hamiltonian);
    let (label, literal) = &entry.literal_variants[0];
    assert_eq!(label, "as printed");
    // the literal reading already fails skew-adjointness (M2)
    let report = verify(literal, &CheckOptions::default());
    assert!(report.residuals.iter().any(|r| r.id.family == Family::M2));
}

#[test]
fn p9_p10_literal_dx_readings_fail_skew_adjointness() {
    for name in ["P9", "P10"] {
        let entry = catalog::get(name).unwrap();
        let (_, literal) = &entry.literal_variants[0];
        let report = verify(literal, &CheckOptions::default());
        assert!(
            report.residuals.iter().any(|r| r.id.family == Family::M2),
            "{name}: literal reading should fail M2"
        );
    }
}
