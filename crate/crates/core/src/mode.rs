/// How an algorithm derives its sample counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Constants taken verbatim from the worst-case analysis; loops run
    /// through the audited register file.
    Strict(StrictBudget),
    /// User-supplied sample budgets; achieved radii are reported.
    Practical(PracticalBudget),
}

impl Mode {
    pub fn strict() -> Self {
        Mode::Strict(StrictBudget::unlimited())
    }

    pub fn is_strict(&self) -> bool {
        matches!(self, Mode::Strict(_))
    }
}

/// Caps for strict runs.
///
/// `loop_cap` truncates every innermost repeat loop (trial loops, Bernoulli
/// loops) to at most that many iterations; `total_cap` aborts the run with
/// [`crate::Error::Budget`] once that many units of work (single trials or
/// walk steps) have been consumed. Any truncation turns the final result
/// into a budget error, because the guarantee no longer holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StrictBudget {
    pub loop_cap: Option<u64>,
    pub total_cap: Option<u64>,
}

impl StrictBudget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn capped(loop_cap: u64, total_cap: u64) -> Self {
        Self {
            loop_cap: Some(loop_cap),
            total_cap: Some(total_cap),
        }
    }
}

/// Sample budgets for practical runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PracticalBudget {
    /// Walks per start vertex (the `r` of the trial loops).
    pub samples: u64,
    /// Macro-trials per pmf estimate; `None` uses the exact pmf.
    pub pmf_samples: Option<u64>,
    /// Worker threads for trial batches. Results do not depend on it.
    pub workers: usize,
    /// Upper bound on the random draws of a single call.
    pub trial_cap: u64,
}

/// Default per-call draw cap in practical mode.
pub const PRACTICAL_TRIAL_CAP: u64 = 1_000_000_000;

impl PracticalBudget {
    pub fn new(samples: u64) -> Self {
        Self {
            samples,
            pmf_samples: None,
            workers: 1,
            trial_cap: PRACTICAL_TRIAL_CAP,
        }
    }

    pub fn with_pmf_samples(mut self, m: u64) -> Self {
        self.pmf_samples = Some(m);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }
}
