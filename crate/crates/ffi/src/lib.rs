// SPDX-License-Identifier: Apache-2.0

//! C ABI over the `gcnfdr` library.
//!
//! Every fallible function returns a `GcnfdrStatus` and writes its result
//! through an out pointer. Objects are opaque handles released with their
//! `*_free` function; strings returned to the caller are released with
//! `gcnfdr_string_free`. After a failure, `gcnfdr_last_error` describes it
//! on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use gcnfdr::fault::{exhaustive_fdr, run_campaign, FaultError, FdrTable, Workload};
use gcnfdr::graph::gml::{export_gml, import_gml};
use gcnfdr::graph::{build_graph, CircuitGraph};
use gcnfdr::netlist::{parse_netlist, Netlist, NetlistFormat};
use gcnfdr::pipeline::{Pipeline, PipelineConfig};
use gcnfdr::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcnfdrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Bad configuration or arguments.
    Config = 3,
    /// Malformed or inconsistent input data.
    Input = 4,
    /// A size guard refused the request.
    Guard = 5,
    IndexOutOfRange = 6,
    Io = 7,
    Panic = 8,
}

/// Netlist format selector for `gcnfdr_netlist_parse`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GcnfdrFormat {
    Verilog = 0,
    Json = 1,
}

pub struct GcnfdrNetlist(Netlist);

pub struct GcnfdrGraph(CircuitGraph);

pub struct GcnfdrTable(FdrTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(GcnfdrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let status = match (&e, e.exit_code()) {
            (Error::Io { .. } | Error::MissingArtifact { .. }, _) => GcnfdrStatus::Io,
            (_, 1) => GcnfdrStatus::Config,
            (_, 3) => GcnfdrStatus::Guard,
            _ => GcnfdrStatus::Input,
        };
        Failure(status, e.to_string())
    }
}

macro_rules! impl_from_module_error {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Failure {
                Failure::from(Error::from(e))
            }
        }
    )*};
}

impl_from_module_error!(
    gcnfdr::netlist::NetlistError,
    gcnfdr::graph::GraphError,
    FaultError
);

fn null(what: &str) -> Failure {
    Failure(GcnfdrStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GcnfdrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            GcnfdrStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            GcnfdrStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(GcnfdrStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes replaced").into_raw()
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gcnfdr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` is NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses netlist source text.
///
/// # Safety
/// `source` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_netlist_parse(
    source: *const c_char,
    format: GcnfdrFormat,
    out: *mut *mut GcnfdrNetlist,
) -> GcnfdrStatus {
    guard(|| {
        let src = str_arg(source, "source")?;
        let fmt = match format {
            GcnfdrFormat::Verilog => NetlistFormat::Verilog,
            GcnfdrFormat::Json => NetlistFormat::Json,
        };
        let n = parse_netlist(src, fmt)?;
        put(out, Box::into_raw(Box::new(GcnfdrNetlist(n))), "out")
    })
}

/// # Safety
/// `n` is NULL or a handle from `gcnfdr_netlist_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_netlist_free(n: *mut GcnfdrNetlist) {
    if !n.is_null() {
        drop(Box::from_raw(n));
    }
}

/// # Safety
/// `n` is a live netlist handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_netlist_flipflop_count(n: *const GcnfdrNetlist, out: *mut usize) -> GcnfdrStatus {
    guard(|| put(out, handle(n, "netlist")?.0.flipflop_cells().len(), "out"))
}

/// # Safety
/// `n` is a live netlist handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_graph_build(n: *const GcnfdrNetlist, out: *mut *mut GcnfdrGraph) -> GcnfdrStatus {
    guard(|| {
        let g = build_graph(&handle(n, "netlist")?.0);
        put(out, Box::into_raw(Box::new(GcnfdrGraph(g))), "out")
    })
}

/// # Safety
/// `gml` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_graph_from_gml(gml: *const c_char, out: *mut *mut GcnfdrGraph) -> GcnfdrStatus {
    guard(|| {
        let g = import_gml(str_arg(gml, "gml")?)?;
        put(out, Box::into_raw(Box::new(GcnfdrGraph(g))), "out")
    })
}

/// Writes a newly allocated GML document to `out`.
///
/// # Safety
/// `g` is a live graph handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_graph_to_gml(g: *const GcnfdrGraph, out: *mut *mut c_char) -> GcnfdrStatus {
    guard(|| {
        let text = export_gml(&handle(g, "graph")?.0);
        put(out, owned_string(text), "out")
    })
}

/// # Safety
/// `g` is a live graph handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_graph_node_count(g: *const GcnfdrGraph, out: *mut usize) -> GcnfdrStatus {
    guard(|| put(out, handle(g, "graph")?.0.len(), "out"))
}

/// # Safety
/// `g` is a live graph handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_graph_edge_count(g: *const GcnfdrGraph, out: *mut usize) -> GcnfdrStatus {
    guard(|| put(out, handle(g, "graph")?.0.edges.len(), "out"))
}

/// # Safety
/// `g` is NULL or a graph handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_graph_free(g: *mut GcnfdrGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Sampled SEU campaign over a random workload of `n_cycles` cycles.
///
/// # Safety
/// `n` is a live netlist handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_campaign_run(
    n: *const GcnfdrNetlist,
    n_cycles: usize,
    workload_seed: u64,
    injections_per_ff: usize,
    seed: u64,
    out: *mut *mut GcnfdrTable,
) -> GcnfdrStatus {
    guard(|| {
        let n = &handle(n, "netlist")?.0;
        let w = Workload::random(n, n_cycles, workload_seed)?;
        let t = run_campaign(n, &w, injections_per_ff, seed)?;
        put(out, Box::into_raw(Box::new(GcnfdrTable(t))), "out")
    })
}

/// Every `(flip-flop, cycle)` injection over a random workload.
///
/// # Safety
/// `n` is a live netlist handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_campaign_exhaustive(
    n: *const GcnfdrNetlist,
    n_cycles: usize,
    workload_seed: u64,
    out: *mut *mut GcnfdrTable,
) -> GcnfdrStatus {
    guard(|| {
        let n = &handle(n, "netlist")?.0;
        let w = Workload::random(n, n_cycles, workload_seed)?;
        let t = exhaustive_fdr(n, &w)?;
        put(out, Box::into_raw(Box::new(GcnfdrTable(t))), "out")
    })
}

/// # Safety
/// `t` is a live table handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_table_len(t: *const GcnfdrTable, out: *mut usize) -> GcnfdrStatus {
    guard(|| put(out, handle(t, "table")?.0.len(), "out"))
}

unsafe fn entry<'a>(t: *const GcnfdrTable, index: usize) -> Result<&'a gcnfdr::fault::FdrEntry, Failure> {
    let t = &handle(t, "table")?.0;
    t.entries.get(index).ok_or_else(|| {
        Failure(
            GcnfdrStatus::IndexOutOfRange,
            format!("index {index} out of range for {} entries", t.len()),
        )
    })
}

/// # Safety
/// `t` is a live table handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_table_fdr(t: *const GcnfdrTable, index: usize, out: *mut f64) -> GcnfdrStatus {
    guard(|| put(out, entry(t, index)?.fdr, "out"))
}

/// Writes a newly allocated flip-flop name to `out`.
///
/// # Safety
/// `t` is a live table handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_table_name(t: *const GcnfdrTable, index: usize, out: *mut *mut c_char) -> GcnfdrStatus {
    guard(|| put(out, owned_string(entry(t, index)?.flipflop.clone()), "out"))
}

/// Writes the labels CSV (`flipflop,injections,failures,fdr`) to `out`.
///
/// # Safety
/// `t` is a live table handle; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_table_to_csv(t: *const GcnfdrTable, out: *mut *mut c_char) -> GcnfdrStatus {
    guard(|| put(out, owned_string(handle(t, "table")?.0.to_csv()), "out"))
}

/// # Safety
/// `t` is NULL or a table handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_table_free(t: *mut GcnfdrTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Runs every pipeline stage for the JSON config at `config_path`.
///
/// # Safety
/// `config_path` is a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn gcnfdr_pipeline_run(config_path: *const c_char) -> GcnfdrStatus {
    guard(|| {
        let path = str_arg(config_path, "config_path")?;
        let cfg = PipelineConfig::load(Path::new(path))?;
        Pipeline::new(cfg)?.run_all()?;
        Ok(())
    })
}
