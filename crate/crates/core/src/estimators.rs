//! Monte-Carlo estimators for the Poisson pmf `e^{-s} s^k / k!` and the
//! scaled binomial coefficient `2^{-k} C(k, s)`, with exact oracles.
//!
//! Poisson probabilities are obtained from the binomial limit: each
//! macro-trial performs `n_b = ⌈2(k² + s²)/δ⌉` Bernoulli(`s/n_b`) trials and
//! succeeds when exactly `k` of them do. The binomial coefficient estimator
//! draws `k` fair bits per macro-trial and succeeds when exactly `s` are one.
//!
//! Both estimators exist twice: a register-level strict version used inside
//! the audited algorithms, and a batched version that can fan out over
//! workers. They consume identical random streams and return identical counts.

use crate::audit::{Machine, StrictRng};
use crate::error::{domain, Error, Result};
use crate::mode::PRACTICAL_TRIAL_CAP;
use crate::walk::{batched, hoeffding_radius, RandomSource};

/// A pmf estimate `successes / trials`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmfEstimate {
    pub value: f64,
    pub successes: u64,
    /// Macro-trial count `m`.
    pub trials: u64,
    /// Additive target δ the trial counts were derived from.
    pub delta: f64,
    pub zeta: f64,
    /// Bernoulli trials per macro-trial (Poisson only).
    pub block: Option<u64>,
}

impl PmfEstimate {
    /// Hoeffding radius of the sampling step alone.
    pub fn radius(&self) -> f64 {
        hoeffding_radius(self.trials, self.zeta)
    }
}

/// Limits for a single estimator call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EstimatorConfig {
    /// Maximum number of random draws; `None` for no cap.
    pub cap: Option<u64>,
    pub workers: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            cap: Some(PRACTICAL_TRIAL_CAP),
            workers: 1,
        }
    }
}

impl EstimatorConfig {
    pub fn uncapped() -> Self {
        Self {
            cap: None,
            workers: 1,
        }
    }
}

fn ln_factorial(k: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// `e^{-s} s^k / k!`, evaluated in log space.
pub fn poisson_pmf_exact(s: f64, k: u64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(format!("Poisson mean {s} must be positive")));
    }
    Ok((-s + k as f64 * s.ln() - ln_factorial(k)).exp())
}

/// `2^{-k} C(k, s)`, evaluated in log space.
pub fn binomial_pmf_exact(k: u64, s: u64) -> Result<f64> {
    if s > k {
        return Err(domain(format!("s = {s} exceeds k = {k}")));
    }
    Ok((ln_factorial(k) - ln_factorial(s) - ln_factorial(k - s) - k as f64 * std::f64::consts::LN_2).exp())
}

/// Pr[Binomial(n, p) = k], in log space. Used to check the binomial limit.
pub fn binomial_law_exact(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
        + k as f64 * p.ln()
        + (n - k) as f64 * (-p).ln_1p())
    .exp()
}

fn check_unit_open(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!("{name} = {x} must lie in (0, 1)")));
    }
    Ok(())
}

/// Bernoulli block size `⌈2(k² + s²)/δ⌉` (at least 1).
pub fn poisson_block(s: f64, k: u64, delta: f64) -> f64 {
    (2.0 * ((k as f64).powi(2) + s * s) / delta).ceil().max(1.0)
}

/// Macro-trial count `⌈2 ln(2/ζ) / δ²⌉` for the Poisson estimator.
pub fn poisson_trials(delta: f64, zeta: f64) -> f64 {
    (2.0 * (2.0 / zeta).ln() / (delta * delta)).ceil().max(1.0)
}

/// Macro-trial count `⌈ln(2/ζ) / (2δ²)⌉` for the binomial estimator.
pub fn binomial_trials(delta: f64, zeta: f64) -> f64 {
    ((2.0 / zeta).ln() / (2.0 * delta * delta)).ceil().max(1.0)
}

fn check_poisson(s: f64, delta: f64, zeta: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(domain(format!("Poisson mean {s} must be positive")));
    }
    check_unit_open("δ", delta)?;
    check_unit_open("ζ", zeta)
}

fn check_binomial(k: u64, s: u64, delta: f64, zeta: f64) -> Result<()> {
    if k == 0 {
        return Err(domain("k must be at least 1"));
    }
    if s > k {
        return Err(domain(format!("s = {s} exceeds k = {k}")));
    }
    check_unit_open("δ", delta)?;
    if !(zeta > 0.0) {
        return Err(domain(format!("ζ = {zeta} must be positive")));
    }
    Ok(())
}

fn check_cap(draws: f64, cap: Option<u64>) -> Result<()> {
    match cap {
        Some(cap) if draws > cap as f64 => Err(Error::Budget { needed: draws, cap }),
        _ => Ok(()),
    }
}

/// δ-additive estimate of `e^{-s} s^k / k!` with failure probability at most ζ.
pub fn poisson_pmf_estimate(
    s: f64,
    k: u64,
    delta: f64,
    zeta: f64,
    source: &RandomSource,
    cfg: &EstimatorConfig,
) -> Result<PmfEstimate> {
    check_poisson(s, delta, zeta)?;
    let block = poisson_block(s, k, delta);
    let trials = poisson_trials(delta, zeta);
    check_cap(block * trials, cfg.cap)?;
    let (block, trials) = (block as u64, trials as u64);
    let successes = poisson_count(s, k, block, trials, source, cfg.workers);
    Ok(PmfEstimate {
        value: successes as f64 / trials as f64,
        successes,
        trials,
        delta,
        zeta,
        block: Some(block),
    })
}

/// Poisson estimate with caller-chosen block size and macro-trial count.
pub fn poisson_pmf_estimate_with(
    s: f64,
    k: u64,
    block: u64,
    trials: u64,
    zeta: f64,
    source: &RandomSource,
    workers: usize,
) -> Result<PmfEstimate> {
    if !(s > 0.0) || block == 0 || trials == 0 {
        return Err(domain("Poisson estimate needs s > 0 and positive trial counts"));
    }
    let successes = poisson_count(s, k, block, trials, source, workers);
    Ok(PmfEstimate {
        value: successes as f64 / trials as f64,
        successes,
        trials,
        delta: 2.0 * hoeffding_radius(trials, zeta),
        zeta,
        block: Some(block),
    })
}

fn poisson_count(s: f64, k: u64, block: u64, trials: u64, source: &RandomSource, workers: usize) -> u64 {
    let p = s / block as f64;
    batched(
        trials,
        workers,
        |batch, len| {
            use rand::Rng;
            let mut rng = source.child(batch).rng();
            let mut hits = 0;
            for _ in 0..len {
                let succ = (0..block).filter(|_| rng.random::<f64>() < p).count() as u64;
                if succ == k {
                    hits += 1;
                }
            }
            hits
        },
        |a, b| a + b,
    )
    .unwrap_or(0)
}

/// δ-additive estimate of `2^{-k} C(k, s)` with failure probability at most ζ.
pub fn binomial_pmf_estimate(
    k: u64,
    s: u64,
    delta: f64,
    zeta: f64,
    source: &RandomSource,
    cfg: &EstimatorConfig,
) -> Result<PmfEstimate> {
    check_binomial(k, s, delta, zeta)?;
    let trials = binomial_trials(delta, zeta);
    check_cap(trials * k as f64, cfg.cap)?;
    let trials = trials as u64;
    let successes = binomial_count(k, s, trials, source, cfg.workers);
    Ok(PmfEstimate {
        value: successes as f64 / trials as f64,
        successes,
        trials,
        delta,
        zeta,
        block: None,
    })
}

fn ones_in_bits<F: FnMut() -> u64>(k: u64, mut word: F) -> u64 {
    let mut ones = 0;
    let mut left = k;
    while left > 0 {
        let take = left.min(64);
        let w = word();
        let w = if take == 64 { w } else { w & ((1u64 << take) - 1) };
        ones += w.count_ones() as u64;
        left -= take;
    }
    ones
}

fn binomial_count(k: u64, s: u64, trials: u64, source: &RandomSource, workers: usize) -> u64 {
    batched(
        trials,
        workers,
        |batch, len| {
            use rand::RngCore;
            let mut rng = source.child(batch).rng();
            (0..len)
                .filter(|_| ones_in_bits(k, || rng.next_u64()) == s)
                .count() as u64
        },
        |a, b| a + b,
    )
    .unwrap_or(0)
}

/// Register-level Poisson estimator. Returns `C / m`.
pub(crate) fn poisson_strict(
    m: &mut Machine,
    rng: &mut StrictRng,
    source: &RandomSource,
    s: f64,
    k: u64,
    delta: f64,
    zeta: f64,
) -> Result<f64> {
    check_poisson(s, delta, zeta)?;
    rng.rekey(m, source);
    let block = m.regs.real("pois.block", poisson_block(s, k, delta));
    let trials = m.regs.real("pois.trials", poisson_trials(delta, zeta));
    let p = m.regs.real("pois.p", s / m.regs.get(block));
    let count = m.regs.int("pois.C", 0);
    let t = m.regs.int("pois.t", 0);
    let b = m.regs.int("pois.b", 0);
    let succ = m.regs.int("pois.successes", 0);

    let outer = m.loop_len(m.regs.get(trials));
    let inner = m.loop_len(m.regs.get(block));
    let mut status = Ok(());
    while m.regs.get_int(t) < outer {
        rng.begin_trial(m, m.regs.get_int(t));
        m.regs.set_int(succ, 0);
        m.regs.set_int(b, 0);
        if let Err(e) = m.charge(inner) {
            status = Err(e);
            break;
        }
        while m.regs.get_int(b) < inner {
            if rng.uniform() < m.regs.get(p) {
                m.regs.incr(succ);
            }
            m.regs.incr(b);
        }
        if m.regs.get_int(succ) == k {
            m.regs.incr(count);
        }
        m.regs.incr(t);
    }
    let value = m.regs.get_int(count) as f64 / outer.max(1) as f64;

    m.regs.free_int(succ);
    m.regs.free_int(b);
    m.regs.free_int(t);
    m.regs.free_int(count);
    m.regs.free(p);
    m.regs.free(trials);
    m.regs.free(block);
    status.map(|_| value)
}

/// Register-level binomial-coefficient estimator. Returns `C / m`.
pub(crate) fn binomial_strict(
    m: &mut Machine,
    rng: &mut StrictRng,
    source: &RandomSource,
    k: u64,
    s: u64,
    delta: f64,
    zeta: f64,
) -> Result<f64> {
    check_binomial(k, s, delta, zeta)?;
    rng.rekey(m, source);
    let trials = m.regs.real("binom.trials", binomial_trials(delta, zeta));
    let count = m.regs.int("binom.C", 0);
    let t = m.regs.int("binom.t", 0);
    let left = m.regs.int("binom.bits_left", 0);
    let ones = m.regs.int("binom.ones", 0);

    let outer = m.loop_len(m.regs.get(trials));
    let mut status = Ok(());
    while m.regs.get_int(t) < outer {
        rng.begin_trial(m, m.regs.get_int(t));
        if let Err(e) = m.charge(k) {
            status = Err(e);
            break;
        }
        m.regs.set_int(ones, 0);
        m.regs.set_int(left, k);
        while m.regs.get_int(left) > 0 {
            let take = m.regs.get_int(left).min(64);
            let w = rng.word();
            let w = if take == 64 { w } else { w & ((1u64 << take) - 1) };
            m.regs.set_int(ones, m.regs.get_int(ones) + w.count_ones() as u64);
            m.regs.set_int(left, m.regs.get_int(left) - take);
        }
        if m.regs.get_int(ones) == s {
            m.regs.incr(count);
        }
        m.regs.incr(t);
    }
    let value = m.regs.get_int(count) as f64 / outer.max(1) as f64;

    m.regs.free_int(ones);
    m.regs.free_int(left);
    m.regs.free_int(t);
    m.regs.free_int(count);
    m.regs.free(trials);
    status.map(|_| value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::StrictBudget;
    use approx::assert_abs_diff_eq;

    #[test]
    fn poisson_exact_examples() {
        assert_abs_diff_eq!(poisson_pmf_exact(1.0, 0).unwrap(), (-1f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(poisson_pmf_exact(2.0, 2).unwrap(), 2.0 * (-2f64).exp(), epsilon = 1e-15);
        let tiny = poisson_pmf_exact(1.0, 50).unwrap();
        assert!(tiny > 0.0 && tiny < 1e-60);
        assert!(poisson_pmf_exact(0.0, 1).is_err());
        assert!(poisson_pmf_exact(-1.0, 1).is_err());
    }

    #[test]
    fn binomial_exact_examples() {
        assert_abs_diff_eq!(binomial_pmf_exact(2, 1).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(binomial_pmf_exact(4, 2).unwrap(), 0.375, epsilon = 1e-15);
        assert_abs_diff_eq!(binomial_pmf_exact(1, 0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(binomial_pmf_exact(2, 3).is_err());
    }

    #[test]
    fn poisson_parameter_edge() {
        assert_eq!(poisson_block(0.1, 0, 0.5), 1.0);
        let est = poisson_pmf_estimate(0.1, 0, 0.5, 0.5, &RandomSource::new(1), &EstimatorConfig::default()).unwrap();
        assert_eq!(est.block, Some(1));
        assert_eq!(est.value, est.successes as f64 / est.trials as f64);
    }

    #[test]
    fn binomial_degenerate_budget() {
        let est = binomial_pmf_estimate(1, 1, 0.9, 0.5, &RandomSource::new(2), &EstimatorConfig::default()).unwrap();
        assert_eq!(est.trials, 1);
        assert!(est.value == 0.0 || est.value == 1.0);
    }

    #[test]
    fn domain_errors() {
        let src = RandomSource::new(0);
        let cfg = EstimatorConfig::default();
        assert!(poisson_pmf_estimate(1.0, 0, 0.0, 0.1, &src, &cfg).is_err());
        assert!(poisson_pmf_estimate(1.0, 0, 0.1, 1.0, &src, &cfg).is_err());
        assert!(binomial_pmf_estimate(0, 0, 0.1, 0.1, &src, &cfg).is_err());
        assert!(binomial_pmf_estimate(2, 3, 0.1, 0.1, &src, &cfg).is_err());
    }

    #[test]
    fn practical_cap_raises_budget_error() {
        let cfg = EstimatorConfig { cap: Some(1000), workers: 1 };
        let err = poisson_pmf_estimate(5.0, 3, 0.05, 0.05, &RandomSource::new(0), &cfg).unwrap_err();
        assert!(matches!(err, Error::Budget { cap: 1000, .. }));
    }

    #[test]
    fn strict_and_batched_paths_agree_exactly() {
        let src = RandomSource::new(77);
        let mut m = Machine::new(StrictBudget::unlimited());
        let mut rng = StrictRng::open(&mut m, &src);
        let strict = poisson_strict(&mut m, &mut rng, &src, 2.0, 2, 0.1, 0.1).unwrap();
        let fast = poisson_pmf_estimate(2.0, 2, 0.1, 0.1, &src, &EstimatorConfig::uncapped()).unwrap();
        assert_eq!(strict, fast.value);

        let strict = binomial_strict(&mut m, &mut rng, &src, 70, 33, 0.05, 0.1).unwrap();
        let fast = binomial_pmf_estimate(70, 33, 0.05, 0.1, &src, &EstimatorConfig::uncapped()).unwrap();
        assert_eq!(strict, fast.value);
        rng.close(&mut m);
        assert_eq!(m.regs.live(), 0);
    }

    #[test]
    fn worker_count_does_not_change_counts() {
        let src = RandomSource::new(5);
        let one = EstimatorConfig { cap: None, workers: 1 };
        let four = EstimatorConfig { cap: None, workers: 4 };
        assert_eq!(
            poisson_pmf_estimate(1.0, 1, 0.05, 0.05, &src, &one).unwrap(),
            poisson_pmf_estimate(1.0, 1, 0.05, 0.05, &src, &four).unwrap()
        );
        assert_eq!(
            binomial_pmf_estimate(8, 3, 0.05, 0.05, &src, &one).unwrap(),
            binomial_pmf_estimate(8, 3, 0.05, 0.05, &src, &four).unwrap()
        );
    }

    #[test]
    fn binomial_law_sums_to_one() {
        let total: f64 = (0..=40).map(|k| binomial_law_exact(40, 0.3, k)).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
    }
}
