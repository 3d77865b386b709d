//! C ABI for lexcomp.
//!
//! Every fallible function returns an [`LcStatus`]; on failure a message is
//! available from [`lc_last_error`] on the same thread. Handles are opaque and
//! must be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use lexcomp::align;
use lexcomp::annotate::{self, AnnotationConfig, GridLabel};
use lexcomp::corpus::{CorpusTag, Instance};
use lexcomp::embeddings::{self, CtxStore, WordVecStore};
use lexcomp::metrics::MetricsReport;
use lexcomp::pipeline::{FeatureStores, TrainedModels};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Parse = 5,
    NotFound = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// Opaque GloVe store.
pub struct LcWordVecs(WordVecStore);

/// Opaque trained model directory plus the embedding stores it needs.
pub struct LcPredictor {
    models: TrainedModels,
    glove: Option<WordVecStore>,
    ctx: Option<CtxStore>,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LcMetrics {
    pub mae: f64,
    pub mse: f64,
    pub pearson: f64,
    pub n: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl ToString) {
    let msg = msg.to_string().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

type FfiResult<T> = Result<T, (LcStatus, String)>;

fn fail<T>(status: LcStatus, msg: impl ToString) -> FfiResult<T> {
    Err((status, msg.to_string()))
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> LcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LcStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            LcStatus::Internal
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(LcStatus::NullPointer, format!("{name} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (LcStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, name: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, name).map(Some)
    }
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, name: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(LcStatus::NullPointer, format!("{name} is null"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn open(path: &str) -> FfiResult<BufReader<File>> {
    File::open(Path::new(path))
        .map(BufReader::new)
        .map_err(|e| (LcStatus::Io, format!("{path}: {e}")))
}

fn load_glove(path: &str, dim: usize) -> FfiResult<WordVecStore> {
    embeddings::load_glove(open(path)?, dim).map_err(|e| (LcStatus::Parse, format!("{path}: {e}")))
}

/// Message describing the last failure on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn lc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a GloVe text file with vectors of `dim` components.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lc_glove_load(
    path: *const c_char,
    dim: usize,
    out: *mut *mut LcWordVecs,
) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        let path = str_arg(path, "path")?;
        let store = load_glove(path, dim)?;
        *out = Box::into_raw(Box::new(LcWordVecs(store)));
        Ok(())
    })
}

/// # Safety
/// `store` must come from [`lc_glove_load`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lc_glove_free(store: *mut LcWordVecs) {
    if !store.is_null() {
        drop(Box::from_raw(store));
    }
}

/// # Safety
/// `store` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn lc_glove_dim(store: *const LcWordVecs) -> usize {
    store.as_ref().map_or(0, |s| s.0.dim())
}

/// Writes the vector of a one- or two-word target into `out[0..out_len]`.
/// `out_len` must equal the store dimension.
///
/// # Safety
/// `store` must be live, `target` NUL-terminated and `out` valid for
/// `out_len` writes.
#[no_mangle]
pub unsafe extern "C" fn lc_glove_lookup(
    store: *const LcWordVecs,
    target: *const c_char,
    out: *mut f64,
    out_len: usize,
) -> LcStatus {
    guard(|| {
        let store = store
            .as_ref()
            .ok_or((LcStatus::NullPointer, "store is null".to_string()))?;
        let target = str_arg(target, "target")?;
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        if out_len != store.0.dim() {
            return fail(
                LcStatus::BufferTooSmall,
                format!(
                    "buffer holds {out_len} values, dimension is {}",
                    store.0.dim()
                ),
            );
        }
        let v = store
            .0
            .lookup_token(target)
            .map_err(|e| (LcStatus::InvalidArgument, e.to_string()))?;
        std::slice::from_raw_parts_mut(out, out_len).copy_from_slice(&v);
        Ok(())
    })
}

/// Opens a trained model directory. `glove_path` and `contextual_path` may be
/// null when no loaded pipeline uses them.
///
/// # Safety
/// String arguments must be NUL-terminated or null; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lc_predictor_open(
    model_dir: *const c_char,
    glove_path: *const c_char,
    glove_dim: usize,
    contextual_path: *const c_char,
    out: *mut *mut LcPredictor,
) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        let dir = str_arg(model_dir, "model_dir")?;
        let models =
            TrainedModels::load(Path::new(dir)).map_err(|e| (LcStatus::Io, e.to_string()))?;
        let glove = opt_str_arg(glove_path, "glove_path")?
            .map(|p| load_glove(p, glove_dim))
            .transpose()?;
        let ctx = opt_str_arg(contextual_path, "contextual_path")?
            .map(|p| {
                embeddings::load_contextual(open(p)?)
                    .map_err(|e| (LcStatus::Parse, format!("{p}: {e}")))
            })
            .transpose()?;
        *out = Box::into_raw(Box::new(LcPredictor { models, glove, ctx }));
        Ok(())
    })
}

/// # Safety
/// `predictor` must come from [`lc_predictor_open`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lc_predictor_free(predictor: *mut LcPredictor) {
    if !predictor.is_null() {
        drop(Box::from_raw(predictor));
    }
}

/// Predicts the complexity of `target` in `sentence`. `id` selects the
/// contextual record when a contextual pipeline is loaded.
///
/// # Safety
/// `predictor` must be live, strings NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lc_predictor_predict(
    predictor: *const LcPredictor,
    id: *const c_char,
    sentence: *const c_char,
    target: *const c_char,
    out: *mut f64,
) -> LcStatus {
    guard(|| {
        let p = predictor
            .as_ref()
            .ok_or((LcStatus::NullPointer, "predictor is null".to_string()))?;
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        let inst = Instance {
            id: str_arg(id, "id")?.to_string(),
            corpus: CorpusTag::Other,
            sentence: str_arg(sentence, "sentence")?.to_string(),
            target: str_arg(target, "target")?.to_string(),
            gold: None,
        };
        let stores = FeatureStores::new(p.glove.as_ref(), p.ctx.as_ref());
        *out = p
            .models
            .predict(&inst, stores)
            .map_err(|e| (LcStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// Writes the sorted dummy annotation set for score `c` into
/// `out_labels[0..n]`.
///
/// # Safety
/// `out_labels` must be valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn lc_generate_annotations(
    c: f64,
    n: usize,
    rho: f64,
    seed: u64,
    out_labels: *mut f64,
) -> LcStatus {
    guard(|| {
        if out_labels.is_null() {
            return fail(LcStatus::NullPointer, "out_labels is null");
        }
        let cfg = AnnotationConfig { n, rho, seed };
        let set = annotate::generate_annotations(c, &cfg)
            .map_err(|e| (LcStatus::InvalidArgument, e.to_string()))?;
        std::slice::from_raw_parts_mut(out_labels, n).copy_from_slice(&set.values());
        Ok(())
    })
}

/// Mean of grid labels (each one of 0, 0.25, 0.5, 0.75, 1).
///
/// # Safety
/// `labels` must be valid for `len` reads and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lc_aggregate(labels: *const f64, len: usize, out: *mut f64) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        let labels = slice_arg(labels, len, "labels")?
            .iter()
            .map(|&v| GridLabel::from_value(v))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| (LcStatus::InvalidArgument, e.to_string()))?;
        *out =
            annotate::aggregate(&labels).map_err(|e| (LcStatus::InvalidArgument, e.to_string()))?;
        Ok(())
    })
}

/// MAE, MSE and Pearson correlation of two series of length `len`.
///
/// # Safety
/// `pred` and `gold` must be valid for `len` reads and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lc_metrics(
    pred: *const f64,
    gold: *const f64,
    len: usize,
    out: *mut LcMetrics,
) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        let pred = slice_arg(pred, len, "pred")?;
        let gold = slice_arg(gold, len, "gold")?;
        let r = MetricsReport::compute(pred, gold)
            .map_err(|e| (LcStatus::InvalidArgument, e.to_string()))?;
        *out = LcMetrics {
            mae: r.mae,
            mse: r.mse,
            pearson: r.pearson,
            n: r.n,
        };
        Ok(())
    })
}

/// Wraps the first occurrence of `target` in `sentence` with single quotes.
/// The result must be released with [`lc_string_free`].
///
/// # Safety
/// Strings must be NUL-terminated and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lc_weak_signal(
    sentence: *const c_char,
    target: *const c_char,
    out: *mut *mut c_char,
) -> LcStatus {
    guard(|| {
        if out.is_null() {
            return fail(LcStatus::NullPointer, "out is null");
        }
        let sentence = str_arg(sentence, "sentence")?;
        let target = str_arg(target, "target")?;
        let text = align::apply_weak_signal(sentence, target)
            .map_err(|e| (LcStatus::NotFound, e.to_string()))?;
        *out = CString::new(text)
            .map_err(|e| (LcStatus::Internal, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Index of the first occurrence of the `needle` token sequence in `haystack`,
/// or -1 in `out_start` when absent.
///
/// # Safety
/// `haystack` and `needle` must point to arrays of NUL-terminated strings of
/// the given lengths; `out_start` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lc_kmp_find(
    haystack: *const *const c_char,
    haystack_len: usize,
    needle: *const *const c_char,
    needle_len: usize,
    out_start: *mut isize,
) -> LcStatus {
    guard(|| {
        if out_start.is_null() {
            return fail(LcStatus::NullPointer, "out_start is null");
        }
        let collect = |p, len, name| -> FfiResult<Vec<&str>> {
            slice_arg(p, len, name)?
                .iter()
                .map(|&s| str_arg(s, name))
                .collect()
        };
        let hay = collect(haystack, haystack_len, "haystack")?;
        let needle = collect(needle, needle_len, "needle")?;
        let span = align::kmp_find(&hay, &needle)
            .map_err(|e| (LcStatus::InvalidArgument, e.to_string()))?;
        *out_start = span.map_or(-1, |s| s.start as isize);
        Ok(())
    })
}
