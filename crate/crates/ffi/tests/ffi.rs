use std::ffi::{c_char, CStr, CString};
use std::ptr;

use erpgraph::workspace::sample_dataset_dir;
use erpgraph_ffi::*;
use serde_json::Value;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Takes ownership of a library string.
unsafe fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_string();
    erpg_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(erpg_last_error()).to_str().unwrap().to_string()
}

unsafe fn open_sample() -> *mut ErpgDataset {
    let dir = c(sample_dataset_dir().to_str().unwrap());
    let mut ds = ptr::null_mut();
    assert_eq!(erpg_dataset_open(dir.as_ptr(), &mut ds), ErpgStatus::ErpgOk);
    ds
}

fn sample_config() -> CString {
    c(&std::fs::read_to_string(sample_dataset_dir().join("p2p_extraction.json")).unwrap())
}

#[test]
fn identify_toggle_round_trip() {
    unsafe {
        let ds = open_sample();
        let mut out = ptr::null_mut();
        assert_eq!(erpg_dataset_classes_json(ds, &mut out), ErpgStatus::ErpgOk);
        let classes: Value = serde_json::from_str(&take(out)).unwrap();
        assert!(classes.as_array().unwrap().iter().any(|c| c["class_id"] == "purchase_orders"));

        let mut sel = ptr::null_mut();
        let class = c("purchase_orders");
        assert_eq!(erpg_identify(ds, class.as_ptr(), 0, ptr::null(), &mut sel), ErpgStatus::ErpgOk);
        assert_eq!(erpg_selection_expand(ds, sel, 1, c("auto").as_ptr()), ErpgStatus::ErpgOk);
        assert_eq!(erpg_selection_toggle(ds, sel, c("EKES").as_ptr(), false), ErpgStatus::ErpgOk);

        let mut json = ptr::null_mut();
        assert_eq!(erpg_selection_to_json(sel, &mut json), ErpgStatus::ErpgOk);
        let text = take(json);
        let doc: Value = serde_json::from_str(&text).unwrap();
        let ekes = doc["entries"].as_array().unwrap().iter().find(|e| e["table"] == "EKES").unwrap();
        assert_eq!(ekes["included"], false);

        let mut copy = ptr::null_mut();
        assert_eq!(erpg_selection_from_json(c(&text).as_ptr(), &mut copy), ErpgStatus::ErpgOk);
        let mut again = ptr::null_mut();
        assert_eq!(erpg_selection_to_json(copy, &mut again), ErpgStatus::ErpgOk);
        assert_eq!(take(again), text);

        erpg_selection_free(copy);
        erpg_selection_free(sel);
        erpg_dataset_free(ds);
    }
}

#[test]
fn extract_then_validate() {
    unsafe {
        let ds = open_sample();
        let mut sel = ptr::null_mut();
        assert_eq!(
            erpg_identify(ds, c("purchase_orders").as_ptr(), 1, ptr::null(), &mut sel),
            ErpgStatus::ErpgOk
        );
        let mut ocel = ptr::null_mut();
        assert_eq!(erpg_extract(ds, sel, sample_config().as_ptr(), &mut ocel), ErpgStatus::ErpgOk);
        let ocel = take(ocel);
        let mut report = ptr::null_mut();
        assert_eq!(erpg_validate_ocel(c(&ocel).as_ptr(), &mut report), ErpgStatus::ErpgOk);
        assert_eq!(take(report), r#"{"findings":[]}"#);

        // Excluding a configured table makes the config invalid.
        assert_eq!(erpg_selection_toggle(ds, sel, c("EKES").as_ptr(), false), ErpgStatus::ErpgOk);
        let mut none = ptr::null_mut();
        assert_eq!(erpg_extract(ds, sel, sample_config().as_ptr(), &mut none), ErpgStatus::ErpgUsage);
        assert!(none.is_null());
        assert!(last_error().contains("EKES"), "{}", last_error());

        erpg_selection_free(sel);
        erpg_dataset_free(ds);
    }
}

#[test]
fn validation_findings_are_reported() {
    unsafe {
        let mut report = ptr::null_mut();
        assert_eq!(
            erpg_validate_ocel(c(r#"{"ocel:global-log":{}}"#).as_ptr(), &mut report),
            ErpgStatus::ErpgValidation
        );
        let report: Value = serde_json::from_str(&take(report)).unwrap();
        assert!(!report["findings"].as_array().unwrap().is_empty());
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(erpg_dataset_open(c("/nonexistent").as_ptr(), &mut ds), ErpgStatus::ErpgUsage);
        assert!(ds.is_null());
        assert_eq!(erpg_dataset_open(ptr::null(), &mut ds), ErpgStatus::ErpgInvalidArgument);
        assert_eq!(last_error(), "dir is null");

        let ds = open_sample();
        let mut sel = ptr::null_mut();
        assert_eq!(
            erpg_identify(ds, c("nope").as_ptr(), 1, ptr::null(), &mut sel),
            ErpgStatus::ErpgUnknownEntity
        );
        assert_eq!(
            erpg_identify(ds, c("purchase_orders").as_ptr(), 1, c("lots").as_ptr(), &mut sel),
            ErpgStatus::ErpgUsage
        );
        assert_eq!(erpg_selection_from_json(c("[]").as_ptr(), &mut sel), ErpgStatus::ErpgParse);
        assert_eq!(erpg_layout_json(ds, 0, 10, ptr::null_mut()), ErpgStatus::ErpgInvalidArgument);
        erpg_dataset_free(ds);
        erpg_dataset_free(ptr::null_mut());
        erpg_string_free(ptr::null_mut());
    }
}

#[test]
fn layout_is_deterministic() {
    unsafe {
        let ds = open_sample();
        let run = || {
            let mut out = ptr::null_mut();
            assert_eq!(erpg_layout_json(ds, 7, 50, &mut out), ErpgStatus::ErpgOk);
            take(out)
        };
        let a = run();
        assert_eq!(a, run());
        let doc: Value = serde_json::from_str(&a).unwrap();
        assert!(doc["nodes"].as_array().unwrap().iter().all(|n| n["x"].is_f64() && n["y"].is_f64()));
        erpg_dataset_free(ds);
    }
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/erpgraph.h")).unwrap();
    for name in [
        "erpg_last_error",
        "erpg_string_free",
        "erpg_dataset_open",
        "erpg_dataset_free",
        "erpg_dataset_classes_json",
        "erpg_identify",
        "erpg_selection_expand",
        "erpg_selection_toggle",
        "erpg_selection_to_json",
        "erpg_selection_from_json",
        "erpg_selection_free",
        "erpg_extract",
        "erpg_validate_ocel",
        "erpg_layout_json",
    ] {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    assert!(header.contains("typedef struct ErpgDataset ErpgDataset;"));
    assert!(header.contains("ERPG_UNKNOWN_ENTITY = 4"));
}
