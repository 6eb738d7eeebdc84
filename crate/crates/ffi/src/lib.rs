//! C ABI over `mrk`.
//!
//! Every object crosses the boundary as an opaque handle owned by the caller
//! and released with its `*_free` function. Fallible calls return an
//! [`MrkStatus`]; on failure [`mrk_last_error`] describes the cause.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::sync::Arc;

use mrk::graph::{load_graph, EdgeFormat, Vocab};
use mrk::miner::{mine, patterns_to_json, MinerConfig};
use mrk::predictor::{score_links, Weighting};
use mrk::rules::{build_rules, rules_to_json};
use mrk::{Edge, Error, MultiplexGraph, PatternSet, RuleSet, ScoreTable};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MrkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Config = 5,
    Resource = 6,
    Evaluation = 7,
    NotFound = 8,
    Panic = 9,
}

pub struct MrkGraph {
    graph: MultiplexGraph,
}

pub struct MrkPatternSet {
    set: PatternSet,
    vocab: Arc<Vocab>,
}

pub struct MrkRuleSet {
    rules: RuleSet,
    vocab: Arc<Vocab>,
}

pub struct MrkScoreTable {
    table: ScoreTable,
    vocab: Arc<Vocab>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> MrkStatus {
    match e {
        Error::Io { .. } => MrkStatus::Io,
        Error::Parse { .. } | Error::Format { .. } | Error::Structural(_) => MrkStatus::Parse,
        Error::Config(_) => MrkStatus::Config,
        Error::Resource { .. } => MrkStatus::Resource,
        Error::Usage(_) => MrkStatus::InvalidArgument,
        Error::Evaluation(_) => MrkStatus::Evaluation,
    }
}

struct Fail(MrkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(MrkStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> MrkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            MrkStatus::Ok
        }
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MrkStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(MrkStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

fn write_file(path: &str, text: &str) -> Result<(), Fail> {
    std::fs::write(path, text).map_err(|e| Error::io(PathBuf::from(path), e).into())
}

/// Message for the last failed call on this thread, or null. Valid until the
/// next call on the same thread.
#[no_mangle]
pub extern "C" fn mrk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mrk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a `src dst layer` edge file and an optional attribute file
/// (`attr_path` may be null).
///
/// # Safety
/// Paths must be null or NUL-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mrk_graph_load(
    edge_path: *const c_char,
    attr_path: *const c_char,
    directed: bool,
    out: *mut *mut MrkGraph,
) -> MrkStatus {
    guard(|| {
        let edges = PathBuf::from(str_arg(edge_path, "edge_path")?);
        let attrs = if attr_path.is_null() {
            None
        } else {
            Some(PathBuf::from(str_arg(attr_path, "attr_path")?))
        };
        let (graph, _) = load_graph(&edges, attrs.as_deref(), directed, EdgeFormat::Plain)?;
        put(out, MrkGraph { graph })
    })
}

/// Number of nodes; 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrk_graph_node_count(g: *const MrkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.node_count())
}

/// Number of links (undirected edges counted once); 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrk_graph_edge_count(g: *const MrkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.edge_count())
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrk_graph_free(g: *mut MrkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Mines patterns of up to `max_size` nodes with support at least `support`;
/// `support == 0` picks the node count of the smallest layer.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mrk_mine(
    g: *const MrkGraph,
    support: usize,
    max_size: usize,
    out: *mut *mut MrkPatternSet,
) -> MrkStatus {
    guard(|| {
        let g = &handle(g, "graph")?.graph;
        let sigma = if support == 0 {
            g.smallest_layer_size()
                .ok_or_else(|| Error::Config("graph has no non-empty layer".into()))?
        } else {
            support
        };
        let set = mine(g, &MinerConfig::new(sigma, max_size)?)?;
        put(
            out,
            MrkPatternSet {
                set,
                vocab: g.vocab().clone(),
            },
        )
    })
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrk_pattern_set_len(p: *const MrkPatternSet) -> usize {
    p.as_ref().map_or(0, |p| p.set.len())
}

/// Writes the pattern set as JSON.
///
/// # Safety
/// `p` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mrk_pattern_set_write_json(p: *const MrkPatternSet, path: *const c_char) -> MrkStatus {
    guard(|| {
        let p = handle(p, "pattern set")?;
        write_file(str_arg(path, "path")?, &patterns_to_json(&p.set, &p.vocab))
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrk_pattern_set_free(p: *mut MrkPatternSet) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Builds every association rule between patterns of `p`, measured on `g`,
/// the graph the patterns were mined from.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mrk_rules_build(
    p: *const MrkPatternSet,
    g: *const MrkGraph,
    out: *mut *mut MrkRuleSet,
) -> MrkStatus {
    guard(|| {
        let p = handle(p, "pattern set")?;
        let g = &handle(g, "graph")?.graph;
        if !Arc::ptr_eq(&p.vocab, g.vocab()) {
            return Err(Fail(
                MrkStatus::InvalidArgument,
                "pattern set was mined from a different graph".into(),
            ));
        }
        let rules = build_rules(&p.set, g);
        put(
            out,
            MrkRuleSet {
                rules,
                vocab: p.vocab.clone(),
            },
        )
    })
}

/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrk_rule_set_len(r: *const MrkRuleSet) -> usize {
    r.as_ref().map_or(0, |r| r.rules.len())
}

/// Writes the rule set as JSON.
///
/// # Safety
/// `r` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mrk_rule_set_write_json(r: *const MrkRuleSet, path: *const c_char) -> MrkStatus {
    guard(|| {
        let r = handle(r, "rule set")?;
        write_file(str_arg(path, "path")?, &rules_to_json(&r.rules, &r.vocab))
    })
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrk_rule_set_free(r: *mut MrkRuleSet) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Scores candidate links of `g` with `rules`. `weighting` is one of `count`,
/// `conf`, `lift`, `conf-mean`, `lift-mean`.
///
/// # Safety
/// Handles must be live, `weighting` NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mrk_predict(
    g: *const MrkGraph,
    rules: *const MrkRuleSet,
    weighting: *const c_char,
    out: *mut *mut MrkScoreTable,
) -> MrkStatus {
    guard(|| {
        let g = &handle(g, "graph")?.graph;
        let r = handle(rules, "rule set")?;
        if !Arc::ptr_eq(&r.vocab, g.vocab()) {
            return Err(Fail(
                MrkStatus::InvalidArgument,
                "rule set was built on a different graph".into(),
            ));
        }
        let w: Weighting = str_arg(weighting, "weighting")?.parse()?;
        let table = score_links(g, &r.rules, w);
        put(
            out,
            MrkScoreTable {
                table,
                vocab: r.vocab.clone(),
            },
        )
    })
}

/// Number of scored candidate links.
///
/// # Safety
/// `t` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mrk_score_table_len(t: *const MrkScoreTable) -> usize {
    t.as_ref().map_or(0, |t| t.table.len())
}

/// Score of link `src -> dst` in `layer`; 0 when the link was not scored.
/// Unknown names give `MRK_STATUS_NOT_FOUND`.
///
/// # Safety
/// `t` must be a live handle, names NUL-terminated and `score` writable.
#[no_mangle]
pub unsafe extern "C" fn mrk_score_table_get(
    t: *const MrkScoreTable,
    src: *const c_char,
    dst: *const c_char,
    layer: *const c_char,
    score: *mut f64,
) -> MrkStatus {
    guard(|| {
        let t = handle(t, "score table")?;
        let v = &t.vocab;
        let missing = |kind: &str, name: &str| Fail(MrkStatus::NotFound, format!("unknown {kind} `{name}`"));
        let (s, d, l) = (str_arg(src, "src")?, str_arg(dst, "dst")?, str_arg(layer, "layer")?);
        let e = Edge::new(
            v.node_id(s).ok_or_else(|| missing("node", s))?,
            v.node_id(d).ok_or_else(|| missing("node", d))?,
            v.layer_id(l).ok_or_else(|| missing("layer", l))?,
        );
        if score.is_null() {
            return Err(null("score"));
        }
        *score = t.table.score(e);
        Ok(())
    })
}

/// Writes the table as `src,dst,layer,score` CSV.
///
/// # Safety
/// `t` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mrk_score_table_write_csv(t: *const MrkScoreTable, path: *const c_char) -> MrkStatus {
    guard(|| {
        let t = handle(t, "score table")?;
        write_file(str_arg(path, "path")?, &t.table.to_csv(&t.vocab))
    })
}

/// # Safety
/// `t` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mrk_score_table_free(t: *mut MrkScoreTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}
