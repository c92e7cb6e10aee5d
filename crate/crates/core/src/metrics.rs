//! Per-thread operation counters.
//!
//! Counters are plain thread-locals so the arithmetic types stay free of
//! shared state. A measurement brackets the work with [`snapshot`] calls on
//! the same thread.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

thread_local! {
    static FP_MULS: Cell<u64> = const { Cell::new(0) };
    static COMPOSITIONS: Cell<u64> = const { Cell::new(0) };
    static ROOT_EXTRACTIONS: Cell<u64> = const { Cell::new(0) };
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub fp_muls: u64,
    pub compositions: u64,
    pub root_extractions: u64,
}

impl Counters {
    pub fn since(&self, earlier: &Counters) -> Counters {
        Counters {
            fp_muls: self.fp_muls - earlier.fp_muls,
            compositions: self.compositions - earlier.compositions,
            root_extractions: self.root_extractions - earlier.root_extractions,
        }
    }
}

pub fn snapshot() -> Counters {
    Counters {
        fp_muls: FP_MULS.with(Cell::get),
        compositions: COMPOSITIONS.with(Cell::get),
        root_extractions: ROOT_EXTRACTIONS.with(Cell::get),
    }
}

/// Runs `f` and returns its result with the counters it consumed.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, Counters) {
    let start = snapshot();
    let out = f();
    (out, snapshot().since(&start))
}

#[inline]
pub(crate) fn count_fp_mul() {
    FP_MULS.with(|c| c.set(c.get() + 1));
}

pub(crate) fn count_composition() {
    COMPOSITIONS.with(|c| c.set(c.get() + 1));
}

pub(crate) fn count_root_extraction() {
    ROOT_EXTRACTIONS.with(|c| c.set(c.get() + 1));
}
