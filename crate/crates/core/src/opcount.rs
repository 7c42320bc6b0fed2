//! Thread-local multiply-add counter backing the complexity reports.
//!
//! Instrumented code paths (factored inner products, right-hand-side and
//! Jacobian evaluations) report the number of multiply-adds they actually
//! execute. The counter measures work done on the current thread between
//! `reset` and `get`.

use std::cell::Cell;

thread_local! {
    static COUNTER: Cell<u64> = const { Cell::new(0) };
}

pub fn reset() {
    COUNTER.with(|c| c.set(0));
}

pub fn add(n: u64) {
    COUNTER.with(|c| c.set(c.get().saturating_add(n)));
}

pub fn get() -> u64 {
    COUNTER.with(|c| c.get())
}

/// Run `f` and return its result together with the multiply-adds it charged.
pub fn measure<R>(f: impl FnOnce() -> R) -> (R, u64) {
    let before = get();
    let out = f();
    (out, get() - before)
}
