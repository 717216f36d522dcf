// SPDX-License-Identifier: Apache-2.0

use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use gcnfdr_ffi::*;

fn last_error() -> String {
    let p = gcnfdr_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn take_string(p: *mut c_char) -> String {
    let s = CStr::from_ptr(p).to_string_lossy().into_owned();
    gcnfdr_string_free(p);
    s
}

unsafe fn parse(src: &str) -> *mut GcnfdrNetlist {
    let c = CString::new(src).unwrap();
    let mut n = ptr::null_mut();
    assert_eq!(gcnfdr_netlist_parse(c.as_ptr(), GcnfdrFormat::Verilog, &mut n), GcnfdrStatus::Ok);
    n
}

#[test]
fn graph_round_trip_through_handles() {
    unsafe {
        let n = parse(gcnfdr::fixtures::SR4);
        let mut count = 0usize;
        assert_eq!(gcnfdr_netlist_flipflop_count(n, &mut count), GcnfdrStatus::Ok);
        assert_eq!(count, 4);

        let mut g = ptr::null_mut();
        assert_eq!(gcnfdr_graph_build(n, &mut g), GcnfdrStatus::Ok);
        let (mut nodes, mut edges) = (0usize, 0usize);
        assert_eq!(gcnfdr_graph_node_count(g, &mut nodes), GcnfdrStatus::Ok);
        assert_eq!(gcnfdr_graph_edge_count(g, &mut edges), GcnfdrStatus::Ok);
        assert_eq!((nodes, edges), (7, 6));

        let mut text = ptr::null_mut();
        assert_eq!(gcnfdr_graph_to_gml(g, &mut text), GcnfdrStatus::Ok);
        let gml = CString::new(take_string(text)).unwrap();
        let mut g2 = ptr::null_mut();
        assert_eq!(gcnfdr_graph_from_gml(gml.as_ptr(), &mut g2), GcnfdrStatus::Ok);
        let mut text2 = ptr::null_mut();
        assert_eq!(gcnfdr_graph_to_gml(g2, &mut text2), GcnfdrStatus::Ok);
        assert_eq!(take_string(text2).as_bytes(), gml.as_bytes());

        gcnfdr_graph_free(g);
        gcnfdr_graph_free(g2);
        gcnfdr_netlist_free(n);
    }
}

#[test]
fn campaign_table_access() {
    unsafe {
        let n = parse(gcnfdr::fixtures::SR4);
        let mut t = ptr::null_mut();
        assert_eq!(gcnfdr_campaign_exhaustive(n, 64, 1, &mut t), GcnfdrStatus::Ok);
        let mut len = 0usize;
        assert_eq!(gcnfdr_table_len(t, &mut len), GcnfdrStatus::Ok);
        assert_eq!(len, 4);
        let mut fdr = 0.0;
        assert_eq!(gcnfdr_table_fdr(t, 3, &mut fdr), GcnfdrStatus::Ok);
        assert_eq!(fdr, 1.0);
        let mut name = ptr::null_mut();
        assert_eq!(gcnfdr_table_name(t, 3, &mut name), GcnfdrStatus::Ok);
        assert_eq!(take_string(name), "ff3");
        assert_eq!(gcnfdr_table_fdr(t, 4, &mut fdr), GcnfdrStatus::IndexOutOfRange);
        assert!(last_error().contains("out of range"));

        let mut csv = ptr::null_mut();
        assert_eq!(gcnfdr_table_to_csv(t, &mut csv), GcnfdrStatus::Ok);
        assert!(take_string(csv).starts_with("flipflop,injections,failures,fdr\nff0,64,61,"));

        let mut s = ptr::null_mut();
        assert_eq!(gcnfdr_campaign_run(n, 64, 1, 16, 7, &mut s), GcnfdrStatus::Ok);
        let mut len = 0usize;
        gcnfdr_table_len(s, &mut len);
        assert_eq!(len, 4);
        gcnfdr_table_free(s);

        let mut bad = ptr::null_mut();
        assert_eq!(gcnfdr_campaign_run(n, 64, 1, 0, 7, &mut bad), GcnfdrStatus::Config);
        assert!(bad.is_null());

        gcnfdr_table_free(t);
        gcnfdr_netlist_free(n);
    }
}

#[test]
fn guard_and_input_errors() {
    unsafe {
        let n = parse(gcnfdr::fixtures::LFSR_CMP);
        let mut t = ptr::null_mut();
        assert_eq!(gcnfdr_campaign_exhaustive(n, 30_000, 1, &mut t), GcnfdrStatus::Guard);
        gcnfdr_netlist_free(n);

        let src = CString::new("module m(a); input a; FOO u(.A(a)); endmodule").unwrap();
        let mut n = ptr::null_mut();
        assert_eq!(gcnfdr_netlist_parse(src.as_ptr(), GcnfdrFormat::Verilog, &mut n), GcnfdrStatus::Input);
        assert!(last_error().contains("FOO"));
        assert_eq!(gcnfdr_netlist_parse(ptr::null(), GcnfdrFormat::Verilog, &mut n), GcnfdrStatus::NullPointer);
        let ok = CString::new(gcnfdr::fixtures::SR4).unwrap();
        assert_eq!(gcnfdr_netlist_parse(ok.as_ptr(), GcnfdrFormat::Json, &mut n), GcnfdrStatus::Input);
        assert_eq!(gcnfdr_graph_build(ptr::null(), ptr::null_mut()), GcnfdrStatus::NullPointer);

        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(
            gcnfdr_graph_from_gml(invalid.as_ptr().cast(), &mut ptr::null_mut()),
            GcnfdrStatus::InvalidUtf8
        );
        // success clears the message
        let mut count = 0usize;
        let n = parse(gcnfdr::fixtures::SR4);
        gcnfdr_netlist_flipflop_count(n, &mut count);
        assert!(gcnfdr_last_error().is_null());
        gcnfdr_netlist_free(n);
        gcnfdr_netlist_free(ptr::null_mut());
        gcnfdr_string_free(ptr::null_mut());
    }
}

#[test]
fn pipeline_run_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let netlist = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/sr4.v");
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        format!(r#"{{"netlist": {:?}, "workdir": "out", "gcn": {{"epochs": 100}}}}"#, netlist),
    )
    .unwrap();
    let path = CString::new(cfg.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { gcnfdr_pipeline_run(path.as_ptr()) }, GcnfdrStatus::Ok);
    assert!(dir.path().join("out/predictions.csv").is_file());

    let missing = CString::new("/nonexistent/cfg.json").unwrap();
    assert_eq!(unsafe { gcnfdr_pipeline_run(missing.as_ptr()) }, GcnfdrStatus::Io);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/gcnfdr.h")).unwrap();
    for f in [
        "gcnfdr_last_error",
        "gcnfdr_string_free",
        "gcnfdr_netlist_parse",
        "gcnfdr_netlist_free",
        "gcnfdr_netlist_flipflop_count",
        "gcnfdr_graph_build",
        "gcnfdr_graph_from_gml",
        "gcnfdr_graph_to_gml",
        "gcnfdr_graph_node_count",
        "gcnfdr_graph_edge_count",
        "gcnfdr_graph_free",
        "gcnfdr_campaign_run",
        "gcnfdr_campaign_exhaustive",
        "gcnfdr_table_len",
        "gcnfdr_table_fdr",
        "gcnfdr_table_name",
        "gcnfdr_table_to_csv",
        "gcnfdr_table_free",
        "gcnfdr_pipeline_run",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
    assert!(header.contains("typedef struct GcnfdrNetlist GcnfdrNetlist;"));
    assert!(header.contains("GCNFDR_STATUS_GUARD = 5"));
}
