use std::ffi::{CStr, CString};
use std::ptr;

use protoef_ffi::*;

fn last_error() -> String {
    let p = pef_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn graph(json: &str) -> *mut PefGraph {
    let text = CString::new(json).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { pef_graph_load(text.as_ptr(), &mut g) }, PefStatus::PEF_OK);
    g
}

#[test]
fn build_and_certify_path() {
    let g = graph(r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
    unsafe {
        assert_eq!(pef_graph_num_vertices(g), 3);
        let mut f = ptr::null_mut();
        assert_eq!(pef_build_yannakakis(g, &mut f), PefStatus::PEF_OK);
        let mut passed = false;
        assert_eq!(pef_check_sandwich(g, f, &mut passed), PefStatus::PEF_OK);
        assert!(passed);
        let mut size = PefSize::default();
        assert_eq!(pef_formulation_size(f, &mut size), PefStatus::PEF_OK);
        assert!(size.num_inequalities > 0 && size.num_variables >= 3);

        let mut d = ptr::null_mut();
        assert_eq!(pef_build_direct(g, 2, &mut d), PefStatus::PEF_OK);
        let mut agree = false;
        assert_eq!(pef_projections_agree(f, d, 20, 7, &mut agree), PefStatus::PEF_OK);
        assert!(agree);
        pef_formulation_free(d);
        pef_formulation_free(f);
        pef_graph_free(g);
    }
}

#[test]
fn lp_text_round_trips_through_the_loader() {
    let g = graph(r#"{"n":2,"edges":[[0,1]]}"#);
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(pef_build_clawfree(g, 3, true, &mut f), PefStatus::PEF_OK);
        let json = pef_formulation_to_json(f);
        let lp = pef_formulation_to_lp(f);
        let mut back = ptr::null_mut();
        assert_eq!(pef_formulation_load(lp, &mut back), PefStatus::PEF_OK);
        let json2 = pef_formulation_to_json(back);
        assert_eq!(CStr::from_ptr(json), CStr::from_ptr(json2));
        for s in [json, lp, json2] {
            pef_string_free(s);
        }
        pef_formulation_free(back);
        pef_formulation_free(f);
        pef_graph_free(g);
    }
}

#[test]
fn error_codes_and_messages() {
    unsafe {
        let mut g = ptr::null_mut();
        let bad = CString::new("{not json").unwrap();
        assert_eq!(pef_graph_load(bad.as_ptr(), &mut g), PefStatus::PEF_ERR_PARSE);
        assert!(!last_error().is_empty());
        assert_eq!(pef_graph_load(ptr::null(), &mut g), PefStatus::PEF_ERR_NULL);
        assert!(last_error().contains("null"));

        let claw = graph(r#"{"n":4,"edges":[[0,1],[0,2],[0,3]]}"#);
        let mut f = ptr::null_mut();
        assert_eq!(pef_build_threshold(claw, claw, &mut f), PefStatus::PEF_ERR_FORBIDDEN);
        assert!(f.is_null());
        assert_eq!(pef_build_clawfree(claw, 3, false, &mut f), PefStatus::PEF_ERR_FORBIDDEN);
        assert_eq!(pef_build_minupdown(2, 5, 1, &mut f), PefStatus::PEF_ERR_INVALID);
        assert_eq!(pef_build_minupdown(4, 2, 2, &mut f), PefStatus::PEF_OK);
        assert!(pef_last_error().is_null());
        pef_formulation_free(f);
        let edges = [0usize, 9];
        let mut h = ptr::null_mut();
        assert_eq!(pef_graph_new(2, edges.as_ptr(), 1, &mut h), PefStatus::PEF_ERR_INVALID);
        pef_graph_free(claw);
        pef_graph_free(ptr::null_mut());
        pef_formulation_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_interface() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/protoef.h")).unwrap();
    for name in [
        "typedef struct PefGraph PefGraph;",
        "typedef struct PefFormulation PefFormulation;",
        "PEF_ERR_FORBIDDEN = 4",
        "pef_last_error(void)",
        "pef_graph_load(",
        "pef_build_yannakakis(",
        "pef_build_minupdown(",
        "pef_check_sandwich(",
        "pef_formulation_free(",
        "pef_string_free(",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
    let v = unsafe { CStr::from_ptr(pef_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/protoef.h");
    let Ok(out) = std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output()
    else {
        eprintln!("no C compiler on PATH; header syntax not checked");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
