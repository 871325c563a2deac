//! Deliberate sign faults used by the mutation-sensitivity acceptance check.
//!
//! The active fault is thread-local, so a test that installs one cannot disturb
//! evaluations running on other threads.

use std::cell::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    /// Negate the second fundamental form of every frame.
    FlipSecondForm,
    /// Negate the Weingarten map of every frame.
    FlipWeingarten,
    /// Negate the deformed square-root factor in the mixed bending-tensor formula.
    FlipStretchRoot,
}

thread_local! {
    static ACTIVE: Cell<Fault> = const { Cell::new(Fault::None) };
}

pub fn active() -> Fault {
    ACTIVE.with(|c| c.get())
}

/// Installs `fault` until the guard is dropped.
pub fn inject(fault: Fault) -> Guard {
    let prev = ACTIVE.with(|c| c.replace(fault));
    Guard { prev }
}

#[must_use]
pub struct Guard {
    prev: Fault,
}

impl Drop for Guard {
    fn drop(&mut self) {
        ACTIVE.with(|c| c.set(self.prev));
    }
}

pub(crate) fn sign(fault: Fault) -> f64 {
    if active() == fault {
        -1.0
    } else {
        1.0
    }
}
