//! C ABI over the gecgen library.
//!
//! Every fallible function returns a [`GecStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can
//! be read with [`gec_last_error`]. Strings handed out by the library must be
//! released with [`gec_string_free`]; handles with their own `_free`
//! function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::BufReader;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gecgen::decode::{iterative_decode_traced, BigramModel, DecodeConfig, ReferenceScorer};
use gecgen::ingest::sampled_pair_count;
use gecgen::metrics::{f_beta, gleu, DEFAULT_MAX_ORDER};
use gecgen::noise::{corrupt_spelling, SpellNoiseConfig};
use gecgen::rng::rng_for;
use gecgen::subword::{Segmenter, SubwordModel};
use gecgen::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Data = 5,
    Provider = 6,
    Internal = 7,
}

/// A trained or loaded BPE wordpiece model.
pub struct GecSubwordModel(SubwordModel);

/// Rewrite-table scorer with a bigram language model, usable for
/// iterative decoding without a trained network.
pub struct GecReferenceScorer(ReferenceScorer);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(GecStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io(_) => GecStatus::Io,
            Error::Config(_) => GecStatus::InvalidArgument,
            Error::Xml { .. } | Error::Json(_) | Error::InvalidInput(_) => GecStatus::Data,
            Error::Provider(_) | Error::Scorer { .. } => GecStatus::Provider,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GecStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_owned());
            set_last_error(format!("internal error: {message}"));
            GecStatus::Internal
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(GecStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(GecStatus::InvalidArgument, message.into())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(GecStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn read_str_array<'a>(p: *const *const c_char, len: usize, what: &str) -> Result<Vec<&'a str>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts(p, len).iter().map(|&s| read_str(s, what)).collect()
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|_| invalid("result contains a NUL byte"))
}

/// Message for the last failed call on this thread, or null if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gec_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// F-beta from precision and recall in [0, 1].
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gec_f_beta(precision: f64, recall: f64, beta: f64, out: *mut f64) -> GecStatus {
    guard(|| {
        let in_range = |x: f64| (0.0..=1.0).contains(&x);
        if !(in_range(precision) && in_range(recall)) || !(beta.is_finite() && beta > 0.0) {
            return Err(invalid(format!("bad arguments p={precision} r={recall} beta={beta}")));
        }
        write_out(out, f_beta(precision, recall, beta), "out")
    })
}

/// Revision pairs kept for a page with `n` revisions.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gec_sampled_pair_count(n: u64, base: f64, out: *mut u64) -> GecStatus {
    guard(|| {
        if !(base.is_finite() && base > 1.0) {
            return Err(invalid(format!("base must exceed 1, got {base}")));
        }
        write_out(out, sampled_pair_count(n, base), "out")
    })
}

/// Plain text of a wikitext revision, one line per paragraph.
///
/// # Safety
/// `wikitext` must be a NUL-terminated string; `out` valid for a write.
/// The result must be freed with [`gec_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gec_extract_text(wikitext: *const c_char, out: *mut *mut c_char) -> GecStatus {
    guard(|| {
        let text = gecgen::extract::extract_text(read_str(wikitext, "wikitext")?);
        write_out(out, into_c_string(text)?, "out")
    })
}

/// Spelling noise with the default operation mix at `rate` per character.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` valid for a write.
/// The result must be freed with [`gec_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gec_corrupt_spelling(
    text: *const c_char,
    rate: f64,
    seed: u64,
    out: *mut *mut c_char,
) -> GecStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        let config = SpellNoiseConfig { rate, ..SpellNoiseConfig::revision() };
        config.validate()?;
        let noisy = corrupt_spelling(text, &config, &mut rng_for(seed, &[]));
        write_out(out, into_c_string(noisy)?, "out")
    })
}

/// Sentence GLEU over whitespace tokens against `n_refs` references.
///
/// # Safety
/// All strings must be NUL-terminated; `refs` must point to `n_refs`
/// strings; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn gec_gleu(
    source: *const c_char,
    hypothesis: *const c_char,
    refs: *const *const c_char,
    n_refs: usize,
    out: *mut f64,
) -> GecStatus {
    guard(|| {
        let source: Vec<&str> = read_str(source, "source")?.split_whitespace().collect();
        let hypothesis: Vec<&str> = read_str(hypothesis, "hypothesis")?.split_whitespace().collect();
        let refs: Vec<Vec<&str>> =
            read_str_array(refs, n_refs, "refs")?.iter().map(|r| r.split_whitespace().collect()).collect();
        if refs.is_empty() {
            return Err(invalid("at least one reference is required"));
        }
        write_out(out, gleu(&source, &hypothesis, &refs, DEFAULT_MAX_ORDER), "out")
    })
}

/// Loads a model written by `gecgen train-subword`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` valid for a write. The
/// handle must be released with [`gec_subword_model_free`].
#[no_mangle]
pub unsafe extern "C" fn gec_subword_model_load(path: *const c_char, out: *mut *mut GecSubwordModel) -> GecStatus {
    guard(|| {
        let file = File::open(read_str(path, "path")?).map_err(Error::from)?;
        let model = SubwordModel::read_from(BufReader::new(file))?;
        write_out(out, Box::into_raw(Box::new(GecSubwordModel(model))), "out")
    })
}

/// Trains a model on `n_lines` lines of text.
///
/// # Safety
/// `lines` must point to `n_lines` NUL-terminated strings; `out` valid for
/// a write. The handle must be released with [`gec_subword_model_free`].
#[no_mangle]
pub unsafe extern "C" fn gec_subword_model_train(
    lines: *const *const c_char,
    n_lines: usize,
    vocab_size: usize,
    out: *mut *mut GecSubwordModel,
) -> GecStatus {
    guard(|| {
        let lines = read_str_array(lines, n_lines, "lines")?;
        let model = SubwordModel::train(lines, vocab_size)?;
        write_out(out, Box::into_raw(Box::new(GecSubwordModel(model))), "out")
    })
}

/// Number of wordpieces in `text`.
///
/// # Safety
/// `model` must be a live handle; `text` NUL-terminated; `out` valid for a
/// write.
#[no_mangle]
pub unsafe extern "C" fn gec_subword_model_count(
    model: *const GecSubwordModel,
    text: *const c_char,
    out: *mut usize,
) -> GecStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let text = read_str(text, "text")?;
        write_out(out, model.0.segment(text).len(), "out")
    })
}

/// Space-separated wordpieces of `text`.
///
/// # Safety
/// `model` must be a live handle; `text` NUL-terminated; `out` valid for a
/// write. The result must be freed with [`gec_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gec_subword_model_encode(
    model: *const GecSubwordModel,
    text: *const c_char,
    out: *mut *mut c_char,
) -> GecStatus {
    guard(|| {
        let model = model.as_ref().ok_or_else(|| null("model"))?;
        let pieces = model.0.segment(read_str(text, "text")?);
        write_out(out, into_c_string(pieces.join(" "))?, "out")
    })
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gec_subword_model_free(model: *mut GecSubwordModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Builds a scorer from `n_rules` rewrites `from[i] -> to[i]` and a bigram
/// model trained on `n_lm` sentences.
///
/// # Safety
/// `from` and `to` must each point to `n_rules` strings, `lm_sentences` to
/// `n_lm` strings; `out` valid for a write. The handle must be released
/// with [`gec_reference_scorer_free`].
#[no_mangle]
pub unsafe extern "C" fn gec_reference_scorer_new(
    from: *const *const c_char,
    to: *const *const c_char,
    n_rules: usize,
    lm_sentences: *const *const c_char,
    n_lm: usize,
    channel_penalty: f64,
    out: *mut *mut GecReferenceScorer,
) -> GecStatus {
    guard(|| {
        let from = read_str_array(from, n_rules, "from")?;
        let to = read_str_array(to, n_rules, "to")?;
        let lm = BigramModel::from_sentences(read_str_array(lm_sentences, n_lm, "lm_sentences")?);
        if !(channel_penalty.is_finite() && channel_penalty >= 0.0) {
            return Err(invalid(format!("channel penalty must be non-negative, got {channel_penalty}")));
        }
        let scorer = ReferenceScorer::new(from.into_iter().zip(to), lm, channel_penalty);
        write_out(out, Box::into_raw(Box::new(GecReferenceScorer(scorer))), "out")
    })
}

/// Iterative decoding of `input`. `iterations` may be null.
///
/// # Safety
/// `scorer` must be a live handle; `input` NUL-terminated; `out` valid for
/// a write. The result must be freed with [`gec_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gec_reference_scorer_decode(
    scorer: *const GecReferenceScorer,
    input: *const c_char,
    beam: usize,
    threshold: f64,
    max_iter: usize,
    out: *mut *mut c_char,
    iterations: *mut usize,
) -> GecStatus {
    guard(|| {
        let scorer = scorer.as_ref().ok_or_else(|| null("scorer"))?;
        let input = read_str(input, "input")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let config = DecodeConfig { beam, threshold, max_iter };
        config.validate()?;
        let outcome = iterative_decode_traced(input, &scorer.0, &config)?;
        if !iterations.is_null() {
            iterations.write(outcome.iterations);
        }
        write_out(out, into_c_string(outcome.output)?, "out")
    })
}

/// # Safety
/// `scorer` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gec_reference_scorer_free(scorer: *mut GecReferenceScorer) {
    if !scorer.is_null() {
        drop(Box::from_raw(scorer));
    }
}
