use std::ffi::{CStr, CString};
use std::ptr;

use osp_da_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    osp_string_free(s);
    out
}

unsafe fn priorities(json: &str) -> *mut OspPriorities {
    let mut q = ptr::null_mut();
    assert_eq!(osp_priorities_from_json(cstr(json).as_ptr(), &mut q), OspStatus::Ok);
    q
}

const CYCLIC_OSP: &str = r#"{"n":3,"priorities":[["a","b","c"],["a","c","b"],["b","a","c"]]}"#;
const THREE_CYCLE: &str = r#"{"n":3,"priorities":[["a","b","c"],["b","c","a"],["c","a","b"]]}"#;

#[test]
fn classify_synthesize_check() {
    unsafe {
        let q = priorities(CYCLIC_OSP);
        assert_eq!(osp_priorities_size(q), 3);
        let mut lc = -1;
        assert_eq!(osp_classify(q, &mut lc), OspStatus::Ok);
        assert_eq!(lc, 1);

        let mut t = ptr::null_mut();
        assert_eq!(osp_synthesize(q, &mut t), OspStatus::Ok);
        assert!(osp_tree_node_count(t) > 1);
        let mut violations = usize::MAX;
        assert_eq!(osp_check_osp(t, &mut violations), OspStatus::Ok);
        assert_eq!(violations, 0);
        let mut ok = -1;
        assert_eq!(osp_check_implements(t, q, 0, 0, &mut ok), OspStatus::Ok);
        assert_eq!(ok, 1);

        let mut json = ptr::null_mut();
        assert_eq!(osp_tree_to_json(t, &mut json), OspStatus::Ok);
        let text = cstr(&take(json));
        let mut back = ptr::null_mut();
        assert_eq!(osp_tree_from_json(text.as_ptr(), &mut back), OspStatus::Ok);
        assert_eq!(osp_tree_node_count(back), osp_tree_node_count(t));

        osp_tree_free(back);
        osp_tree_free(t);
        osp_priorities_free(q);
    }
}

#[test]
fn run_da_returns_matching() {
    unsafe {
        let q = priorities(r#"{"n":3,"priorities":[["a","b","c"],["a","b","c"],["c","a","b"]]}"#);
        let p = cstr(r#"{"n":3,"preferences":[[3,2,1],[1,2,3],[1,3,2]]}"#);
        let mut out = ptr::null_mut();
        assert_eq!(osp_run_da(q, p.as_ptr(), &mut out), OspStatus::Ok);
        assert_eq!(take(out), r#"{"assignment":{"a":2,"b":1,"c":3},"n":3}"#);
        osp_priorities_free(q);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut q = ptr::null_mut();
        let bad = cstr(r#"{"n":2,"priorities":[["a","a"],["a","b"]]}"#);
        assert_eq!(osp_priorities_from_json(bad.as_ptr(), &mut q), OspStatus::ParseError);
        assert!(q.is_null());
        assert!(!osp_last_error().is_null());

        assert_eq!(osp_priorities_from_json(ptr::null(), &mut q), OspStatus::InvalidArgument);

        let cyc = priorities(THREE_CYCLE);
        let mut t = ptr::null_mut();
        assert_eq!(osp_synthesize(cyc, &mut t), OspStatus::NotLimitedCyclic);
        let msg = CStr::from_ptr(osp_last_error()).to_str().unwrap();
        assert!(msg.contains("(a)"), "{msg}");
        let mut json = ptr::null_mut();
        assert_eq!(osp_classify_json(cyc, &mut json), OspStatus::Ok);
        assert!(take(json).contains("not_limited_cyclic"));

        let p = cstr(r#"{"n":2,"preferences":[[1,2],[2,1]]}"#);
        let mut out = ptr::null_mut();
        assert_eq!(osp_run_da(cyc, p.as_ptr(), &mut out), OspStatus::SizeMismatch);
        osp_priorities_free(cyc);

        let mut ok = 0;
        assert_eq!(osp_check_implements(ptr::null(), ptr::null(), 0, 0, &mut ok), OspStatus::InvalidArgument);
    }
}
