//! Cooperative cancellation. Inner loops call [`checkpoint`] or [`charge`]; when the
//! enclosing [`run_limited`] call has run out of time, been cancelled or used up
//! its steps, the computation unwinds back to it and reports
//! [`AlgebraError::Timeout`] or [`AlgebraError::WorkLimit`].

use std::cell::RefCell;
use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use super::AlgebraError;

/// Limits for one bounded computation. The step limit counts units passed to
/// [`charge`] and does not depend on machine speed.
#[derive(Clone, Debug, Default)]
pub struct Limits {
    pub deadline: Option<Instant>,
    pub cancel: Option<Arc<AtomicBool>>,
    pub max_steps: Option<u64>,
}

struct Budget {
    limits: Limits,
    steps: u64,
}

thread_local! {
    static ACTIVE: RefCell<Vec<Budget>> = const { RefCell::new(Vec::new()) };
}

enum Interrupted {
    Time,
    /// Carries the step limit that was exceeded.
    Work(u64),
}

/// Counts one step and unwinds to the innermost bounded call if any active
/// budget is spent.
pub fn checkpoint() {
    charge(1);
}

/// [`checkpoint`] for an operation worth `units` steps.
pub fn charge(units: u64) {
    let spent = ACTIVE.with(|a| {
        let mut spent = None;
        for b in a.borrow_mut().iter_mut() {
            b.steps += units;
            if let Some(m) = b.limits.max_steps.filter(|&m| b.steps > m) {
                spent = Some(Interrupted::Work(m));
            } else if b.limits.deadline.is_some_and(|d| Instant::now() > d)
                || b.limits.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed))
            {
                spent = spent.or(Some(Interrupted::Time));
            }
        }
        spent
    });
    if let Some(why) = spent {
        resume_unwind(Box::new(why));
    }
}

/// Runs `f` under `limits` and reports the steps it took. Budgets nest;
/// the tightest one wins.
pub fn run_limited<T>(limits: Limits, f: impl FnOnce() -> Result<T, AlgebraError>) -> (Result<T, AlgebraError>, u64) {
    ACTIVE.with(|a| a.borrow_mut().push(Budget { limits, steps: 0 }));
    let out = catch_unwind(AssertUnwindSafe(f));
    let steps = ACTIVE.with(|a| a.borrow_mut().pop()).map_or(0, |b| b.steps);
    let out = match out {
        Ok(r) => r,
        Err(payload) => match payload.downcast::<Interrupted>() {
            Ok(why) => match *why {
                Interrupted::Work(m) => Err(AlgebraError::WorkLimit(m)),
                Interrupted::Time => Err(AlgebraError::Timeout),
            },
            Err(other) => resume_unwind(other),
        },
    };
    (out, steps)
}

/// [`run_limited`] with a deadline and an optional cancellation flag only.
pub fn run_bounded<T>(
    deadline: Option<Instant>,
    cancel: Option<Arc<AtomicBool>>,
    f: impl FnOnce() -> Result<T, AlgebraError>,
) -> Result<T, AlgebraError> {
    run_limited(Limits { deadline, cancel, max_steps: None }, f).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Duration;

    fn spin() -> Result<u32, AlgebraError> {
        loop {
            checkpoint();
        }
    }

    #[test]
    fn deadline_interrupts() {
        let r = run_bounded(Some(Instant::now() + Duration::from_millis(5)), None, spin);
        assert_eq!(r, Err(AlgebraError::Timeout));
    }

    #[test]
    fn cancellation_interrupts() {
        let flag = Arc::new(AtomicBool::new(true));
        assert_eq!(run_bounded(None, Some(flag), spin), Err(AlgebraError::Timeout));
    }

    #[test]
    fn completes_and_unnests() {
        assert_eq!(run_bounded(None, None, || Ok(7)), Ok(7));
        let outer = run_bounded(None, None, || {
            let inner = run_bounded(Some(Instant::now()), None, spin);
            assert_eq!(inner, Err(AlgebraError::Timeout));
            checkpoint();
            Ok(1)
        });
        assert_eq!(outer, Ok(1));
    }

    #[test]
    fn step_limit_is_exact() {
        let count = |n: u64| -> Result<u64, AlgebraError> {
            for _ in 0..n {
                checkpoint();
            }
            Ok(n)
        };
        let limits = Limits { max_steps: Some(10), ..Default::default() };
        assert_eq!(run_limited(limits.clone(), || count(10)), (Ok(10), 10));
        assert_eq!(run_limited(limits.clone(), || count(11)), (Err(AlgebraError::WorkLimit(10)), 11));
        // An exhausted outer step budget interrupts an inner unlimited run.
        let outer = run_limited(limits, || Ok(run_bounded(None, None, || count(100))));
        assert_eq!(outer.0, Ok(Err(AlgebraError::WorkLimit(10))));
    }

    #[test]
    fn other_panics_propagate() {
        let r = std::panic::catch_unwind(|| run_bounded::<()>(None, None, || panic!("boom")));
        assert!(r.is_err());
    }
}
