//! Power-method estimation of λ₂ from walk-estimated norms `‖M^k v‖`,
//! where `M = (I + D^{1/2} P D^{-1/2}) / 2` has spectrum `1 − λᵢ/2 ⊂ [0, 1]`.
//!
//! Candidate start vectors come from the set Σ of two-point unit vectors
//! orthogonal to `u₁`; at least one of them overlaps the λ₂-eigenspace by
//! `1/(√2 n 𝔡)` or more.

use crate::audit::{IntReg, Machine, RealReg, StrictRng, WalkRegs};
use crate::error::{domain, Error, Result};
use crate::estimators::{binomial_pmf_estimate, binomial_pmf_exact, binomial_strict, EstimatorConfig};
use crate::graph::WeightedGraph;
use crate::mode::{Mode, PracticalBudget};
use crate::walk::{RandomSource, WalkEngine};

/// The Σ element on the pair `(i, j)`:
/// `v_i = −1/√(1 + d_i/d_j)`, `v_j = 1/√(1 + d_j/d_i)`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaVector {
    pub i: usize,
    pub j: usize,
    pub vi: f64,
    pub vj: f64,
}

impl SigmaVector {
    pub fn new(g: &WeightedGraph, i: usize, j: usize) -> Result<Self> {
        for v in [i, j] {
            if v >= g.n() {
                return Err(Error::Index { index: v, n: g.n() });
            }
        }
        if i == j {
            return Err(domain("a candidate vector needs two distinct vertices"));
        }
        let (di, dj) = (g.degree(i), g.degree(j));
        if di <= 0.0 || dj <= 0.0 {
            return Err(Error::IsolatedVertex(if di <= 0.0 { i } else { j }));
        }
        Ok(Self {
            i,
            j,
            vi: -(dj / (di + dj)).sqrt(),
            vj: (di / (di + dj)).sqrt(),
        })
    }

    pub fn dense(&self, n: usize) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[self.i] = self.vi;
        v[self.j] = self.vj;
        v
    }

    /// Walk starts `(ℓ₁, ℓ₂)` with `v = √(d₂/(d₁+d₂)) e_ℓ₁ − √(d₁/(d₁+d₂)) e_ℓ₂`.
    pub fn starts(&self) -> (usize, usize) {
        (self.j, self.i)
    }

    /// `√(d₁ d₂ / ((d₁ + d₂) d_t))`, the weight of walk hits on `t`.
    fn hit_weight(&self, g: &WeightedGraph, t: usize) -> f64 {
        let (d1, d2) = (g.degree(self.j), g.degree(self.i));
        (d1 * d2 / ((d1 + d2) * g.degree(t))).sqrt()
    }
}

/// All `n(n−1)/2` candidates, pairs `(i, j)` with `i < j` in lexicographic order.
pub fn sigma_vectors(g: &WeightedGraph) -> impl Iterator<Item = SigmaVector> + '_ {
    let n = g.n();
    (0..n).flat_map(move |i| (i + 1..n).filter_map(move |j| SigmaVector::new(g, i, j).ok()))
}

/// Constants of one norm estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormParams {
    pub power: u64,
    pub epsilon: f64,
    pub gamma: f64,
    /// `δ = ε² √2 / (54 (k+1) n 𝔡)`
    pub delta: f64,
    /// `ζ = γ / (3 n (k+1))`
    pub zeta: f64,
    /// `r = ⌈ln(2/ζ) / (2δ²)⌉`
    pub trials: f64,
}

impl NormParams {
    pub fn new(g: &WeightedGraph, power: u64, epsilon: f64, gamma: f64) -> Result<Self> {
        check_unit_interval("ε", epsilon)?;
        check_unit_interval("γ", gamma)?;
        if power == 0 {
            return Err(domain("the power k must be positive"));
        }
        let n = g.n() as f64;
        let kp1 = power as f64 + 1.0;
        let delta = epsilon * epsilon * 2f64.sqrt() / (54.0 * kp1 * n * g.degree_ratio()?);
        let zeta = gamma / (3.0 * n * kp1);
        Ok(Self {
            power,
            epsilon,
            gamma,
            delta,
            zeta,
            trials: ((2.0 / zeta).ln() / (2.0 * delta * delta)).ceil(),
        })
    }
}

fn check_unit_interval(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(domain(format!("{name} = {x} outside (0, 1]")));
    }
    Ok(())
}

/// Constants of the λ₂ estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapParams {
    pub delta: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// `ln τ`; `τ` itself underflows for moderate `n` and small δ.
    pub ln_tau: f64,
    /// `τ = 1 / (2 (√2 n 𝔡)^{1 + 8/δ})`
    pub tau: f64,
    /// `ε = δ λ τ / 12`
    pub epsilon: f64,
    /// `ζ = (4γ / (n(n−1))) · (1 + ln(1/τ)/λ)⁻¹`
    pub zeta: f64,
}

/// `τ`, `ε` and `ζ` for the gap estimation, with λ standing in for the unknown λ₂ inside ζ.
pub fn gap_params(g: &WeightedGraph, delta: f64, gamma: f64, lambda: f64) -> Result<GapParams> {
    check_unit_interval("δ", delta)?;
    check_unit_interval("γ", gamma)?;
    if !(lambda > 0.0 && lambda <= 2.0) {
        return Err(domain(format!("λ = {lambda} outside (0, 2]")));
    }
    let n = g.n() as f64;
    if g.n() < 2 {
        return Err(Error::TooSmall { n: g.n() });
    }
    let ln_tau = -(2f64.ln()) - (1.0 + 8.0 / delta) * (2f64.sqrt() * n * g.degree_ratio()?).ln();
    let tau = ln_tau.exp();
    Ok(GapParams {
        delta,
        gamma,
        lambda,
        ln_tau,
        tau,
        epsilon: delta * lambda * tau / 12.0,
        zeta: 4.0 * gamma / (n * (n - 1.0)) / (1.0 - ln_tau / lambda),
    })
}

/// Part (i)/(ii) checks of the noisy power method, for tests against exact norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRatioBounds {
    pub lambda2: f64,
    pub delta: f64,
    /// `(1−δ) λ₂`
    pub lower: f64,
    /// `(1+δ) λ₂`
    pub upper: f64,
    /// Smallest `k` with `k ≥ 3 ln(√2 n 𝔡) / (δ λ₂) − 1`.
    pub k_threshold: f64,
}

impl PowerRatioBounds {
    /// `(1−δ)λ₂ ≤ 2(1 − ratio)`
    pub fn part_one(&self, ratio: f64) -> bool {
        self.lower <= 2.0 * (1.0 - ratio)
    }

    pub fn premise_two(&self, k: u64) -> bool {
        k as f64 >= self.k_threshold
    }

    /// `2(1 − ratio) ≤ (1+δ)λ₂`
    pub fn part_two(&self, ratio: f64) -> bool {
        2.0 * (1.0 - ratio) <= self.upper
    }
}

/// Fails when `ζ > δλ₂/12`, the precondition of both parts.
pub fn power_ratio_bounds(lambda2: f64, delta: f64, zeta: f64, n: usize, degree_ratio: f64) -> Result<PowerRatioBounds> {
    if zeta > delta * lambda2 / 12.0 {
        return Err(domain(format!("ζ = {zeta} exceeds δλ₂/12 = {}", delta * lambda2 / 12.0)));
    }
    Ok(PowerRatioBounds {
        lambda2,
        delta,
        lower: (1.0 - delta) * lambda2,
        upper: (1.0 + delta) * lambda2,
        k_threshold: 3.0 * (2f64.sqrt() * n as f64 * degree_ratio).ln() / (delta * lambda2) - 1.0,
    })
}

/// A norm estimate with the root-mean-square size of its sampling noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    /// Empirical bound on `√E‖Q − Γ‖²` (zero for strict runs).
    pub noise: f64,
}

/// Estimate `‖M^k v‖` for `v ∈ Σ` on a connected graph.
#[allow(clippy::too_many_arguments)]
pub fn estimate_norm(
    g: &WeightedGraph,
    power: u64,
    v: &SigmaVector,
    epsilon: f64,
    gamma: f64,
    mode: &Mode,
    source: &RandomSource,
) -> Result<NormEstimate> {
    let params = NormParams::new(g, power, epsilon, gamma)?;
    g.check_connected()?;
    match mode {
        Mode::Strict(budget) => {
            let mut m = Machine::new(*budget);
            let value = estimate_norm_strict(&mut m, g, power, v, epsilon, gamma, source)?;
            m.finish(NormEstimate { value, noise: 0.0 })
        }
        Mode::Practical(budget) => {
            let engine = WalkEngine::auto(g)?;
            practical_norm(g, &engine, &params, v, budget, source)
        }
    }
}

fn binomial_weights(params: &NormParams, budget: &PracticalBudget, source: &RandomSource) -> Result<Vec<f64>> {
    let k = params.power;
    match budget.pmf_samples {
        None => (0..=k).map(|s| binomial_pmf_exact(k, s)).collect(),
        Some(m) => {
            let delta = ((2.0 / params.zeta).ln() / (2.0 * m as f64)).sqrt().min(0.5);
            let cfg = EstimatorConfig {
                cap: Some(budget.trial_cap),
                workers: budget.workers,
            };
            (0..=k)
                .map(|s| binomial_pmf_estimate(k, s, delta, params.zeta, &source.child(s), &cfg).map(|e| e.value))
                .collect()
        }
    }
}

fn practical_norm(
    g: &WeightedGraph,
    engine: &WalkEngine,
    params: &NormParams,
    v: &SigmaVector,
    budget: &PracticalBudget,
    source: &RandomSource,
) -> Result<NormEstimate> {
    let r = budget.samples;
    if r == 0 {
        return Err(domain("at least one walk per start is required"));
    }
    let k = params.power;
    let draws = 2.0 * r as f64 * k as f64;
    if draws > budget.trial_cap as f64 {
        return Err(Error::Budget {
            needed: draws,
            cap: budget.trial_cap,
        });
    }
    let a = binomial_weights(params, budget, &source.child(2))?;
    let (l1, l2) = v.starts();
    let occ1 = engine.occupancy(l1, k as usize, r, &source.child(0), budget.workers);
    let occ2 = engine.occupancy(l2, k as usize, r, &source.child(1), budget.workers);
    let rf = r as f64;
    let mut sum_sq = 0.0;
    let mut var = 0.0;
    for t in 0..g.n() {
        let c = v.hit_weight(g, t);
        let (mut p1, mut p2) = (0.0, 0.0);
        for (s, a_s) in a.iter().enumerate() {
            p1 += a_s * occ1[s][t] as f64 / rf;
            p2 += a_s * occ2[s][t] as f64 / rf;
        }
        let q = c * (p1 - p2);
        sum_sq += q * q;
        var += c * c * (p1 + p2) / rf;
    }
    Ok(NormEstimate {
        value: sum_sq.sqrt(),
        noise: var.sqrt(),
    })
}

struct NormRegs {
    delta: RealReg,
    zeta: RealReg,
    r: RealReg,
    acc: RealReg,
    q: RealReg,
    a: RealReg,
    i: IntReg,
    s: IntReg,
    hits: IntReg,
    trial: IntReg,
}

/// Register-level norm estimation: for each `i`, `Q = Σ_s a_s (S₁ − S₂)/r · w_i`,
/// output `√Σ Q²`.
pub(crate) fn estimate_norm_strict(
    m: &mut Machine,
    g: &WeightedGraph,
    power: u64,
    v: &SigmaVector,
    epsilon: f64,
    gamma: f64,
    source: &RandomSource,
) -> Result<f64> {
    let p = NormParams::new(g, power, epsilon, gamma)?;
    g.check_connected()?;
    g.check_no_isolated()?;
    let regs = NormRegs {
        delta: m.regs.real("norm.delta", p.delta),
        zeta: m.regs.real("norm.zeta", p.zeta),
        r: m.regs.real("norm.r", p.trials),
        acc: m.regs.real("norm.R", 0.0),
        q: m.regs.real("norm.Q", 0.0),
        a: m.regs.real("norm.a", 0.0),
        i: m.regs.int("norm.i", 0),
        s: m.regs.int("norm.s", 0),
        hits: m.regs.int("norm.S", 0),
        trial: m.regs.int("norm.t", 0),
    };
    let mut rng = StrictRng::open(m, source);
    let walk = WalkRegs::open(m);
    let out = algorithm_c(m, &mut rng, &walk, &regs, g, power, v, source);
    walk.close(m);
    rng.close(m);
    for r in [regs.a, regs.q, regs.acc, regs.r, regs.zeta, regs.delta] {
        m.regs.free(r);
    }
    for r in [regs.trial, regs.hits, regs.s, regs.i] {
        m.regs.free_int(r);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn algorithm_c(
    m: &mut Machine,
    rng: &mut StrictRng,
    walk: &WalkRegs,
    x: &NormRegs,
    g: &WeightedGraph,
    k: u64,
    v: &SigmaVector,
    source: &RandomSource,
) -> Result<f64> {
    let r_loop = m.loop_len(m.regs.get(x.r));
    let (l1, l2) = v.starts();
    m.regs.set_int(x.i, 0);
    while (m.regs.get_int(x.i) as usize) < g.n() {
        let i = m.regs.get_int(x.i);
        m.regs.set(x.q, 0.0);
        m.regs.set_int(x.s, 0);
        while m.regs.get_int(x.s) <= k {
            let s = m.regs.get_int(x.s);
            let (delta, zeta) = (m.regs.get(x.delta), m.regs.get(x.zeta));
            let a = binomial_strict(m, rng, &source.descend(&[0, i, s]), k, s, delta, zeta)?;
            m.regs.set(x.a, a);
            let w = v.hit_weight(g, i as usize);
            for (side, start) in [(1u64, l1), (2, l2)] {
                rng.rekey(m, &source.descend(&[side, i, s]));
                m.regs.set_int(x.hits, 0);
                m.regs.set_int(x.trial, 0);
                while m.regs.get_int(x.trial) < r_loop {
                    m.charge(1)?;
                    rng.begin_trial(m, m.regs.get_int(x.trial));
                    if walk.walk(m, rng, g, start, s)? == i as usize {
                        m.regs.incr(x.hits);
                    }
                    m.regs.incr(x.trial);
                }
                let term = m.regs.get(x.a) * m.regs.get_int(x.hits) as f64 / r_loop.max(1) as f64 * w;
                let q = m.regs.get(x.q);
                m.regs.set(x.q, if side == 1 { q + term } else { q - term });
            }
            m.regs.incr(x.s);
        }
        let q = m.regs.get(x.q);
        m.regs.set(x.acc, m.regs.get(x.acc) + q * q);
        m.regs.incr(x.i);
    }
    Ok(m.regs.get(x.acc).sqrt())
}

/// Settings of [`lambda2_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapConfig {
    pub delta: f64,
    pub gamma: f64,
    /// Lower bound on λ₂; defaults to `1/(diam · vol)`.
    pub lambda: Option<f64>,
    pub mode: Mode,
    /// Practical mode only: the stopping threshold τ is raised to
    /// `noise_multiplier · √(𝔡/r)`, a multiple of the sampling noise of one
    /// norm estimate, so that ratios are never taken at the noise floor.
    pub noise_multiplier: f64,
}

/// Default for [`GapConfig::noise_multiplier`].
pub const DEFAULT_NOISE_MULTIPLIER: f64 = 16.0;

impl GapConfig {
    pub fn practical(delta: f64, gamma: f64, samples: u64) -> Self {
        Self::with_mode(delta, gamma, Mode::Practical(PracticalBudget::new(samples)))
    }

    pub fn with_mode(delta: f64, gamma: f64, mode: Mode) -> Self {
        Self {
            delta,
            gamma,
            lambda: None,
            mode,
            noise_multiplier: DEFAULT_NOISE_MULTIPLIER,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_noise_multiplier(mut self, kappa: f64) -> Self {
        self.noise_multiplier = kappa;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapEstimate {
    /// `2 (1 − R_max)`
    pub value: f64,
    pub r_max: f64,
    pub params: GapParams,
    /// Threshold actually used (equals `params.tau` in strict mode).
    pub tau: f64,
    /// Power at which `k` is capped: `⌈2 ln(1/τ)/λ⌉ + 1`.
    pub k_cap: u64,
    pub norm_calls: u64,
    /// Candidate and power that produced `R_max`.
    pub argmax: Option<(usize, usize, u64)>,
}

fn k_cap(ln_tau: f64, lambda: f64) -> u64 {
    let cap = (-2.0 * ln_tau / lambda).ceil() + 1.0;
    if cap >= u64::MAX as f64 {
        u64::MAX
    } else {
        cap as u64
    }
}

/// δ-multiplicative estimate of λ₂ of a connected graph with `n ≥ 4`.
pub fn lambda2_estimate(g: &WeightedGraph, cfg: &GapConfig, source: &RandomSource) -> Result<GapEstimate> {
    if g.n() < 4 {
        return Err(Error::TooSmall { n: g.n() });
    }
    g.check_no_isolated()?;
    g.check_connected()?;
    let lambda = match cfg.lambda {
        Some(l) => l,
        None => g.lambda2_lower_bound()?,
    };
    match &cfg.mode {
        Mode::Strict(budget) => {
            let mut m = Machine::new(*budget);
            let est = lambda2_strict(&mut m, g, cfg.delta, cfg.gamma, lambda, source)?;
            m.finish(est)
        }
        Mode::Practical(budget) => lambda2_practical(g, cfg, lambda, budget, source),
    }
}

fn lambda2_practical(
    g: &WeightedGraph,
    cfg: &GapConfig,
    lambda: f64,
    budget: &PracticalBudget,
    source: &RandomSource,
) -> Result<GapEstimate> {
    let params = gap_params(g, cfg.delta, cfg.gamma, lambda)?;
    if budget.samples == 0 {
        return Err(domain("at least one walk per start is required"));
    }
    let noise = (g.degree_ratio()? / budget.samples as f64).sqrt();
    let tau = params.tau.max(cfg.noise_multiplier * noise).min(0.5);
    let cap = k_cap(tau.ln(), lambda);
    let engine = WalkEngine::auto(g)?;
    let threshold = 1.5 * tau;
    let mut out = GapEstimate {
        value: 2.0,
        r_max: 0.0,
        params,
        tau,
        k_cap: cap,
        norm_calls: 0,
        argmax: None,
    };
    for (idx, v) in sigma_vectors(g).enumerate() {
        let src = source.child(idx as u64);
        let norm = |k: u64, calls: &mut u64| -> Result<f64> {
            *calls += 1;
            let p = NormParams::new(g, k, params.epsilon.max(f64::MIN_POSITIVE), params.zeta)?;
            Ok(practical_norm(g, &engine, &p, &v, budget, &src.child(k))?.value)
        };
        let mut k = 1;
        let mut c1 = norm(1, &mut out.norm_calls)?;
        let mut c2 = norm(2, &mut out.norm_calls)?;
        while c2 >= threshold && c1 >= threshold && k < cap {
            if c2 / c1 > out.r_max {
                out.r_max = c2 / c1;
                out.argmax = Some((v.i, v.j, k));
            }
            k += 1;
            c1 = c2;
            c2 = norm(k + 1, &mut out.norm_calls)?;
        }
    }
    out.value = 2.0 * (1.0 - out.r_max);
    Ok(out)
}

struct GapRegs {
    tau: RealReg,
    eps: RealReg,
    zeta: RealReg,
    r_max: RealReg,
    c1: RealReg,
    c2: RealReg,
    vi: IntReg,
    vj: IntReg,
    k: IntReg,
}

/// Register-level λ₂ estimation.
pub(crate) fn lambda2_strict(
    m: &mut Machine,
    g: &WeightedGraph,
    delta: f64,
    gamma: f64,
    lambda: f64,
    source: &RandomSource,
) -> Result<GapEstimate> {
    if g.n() < 4 {
        return Err(Error::TooSmall { n: g.n() });
    }
    g.check_connected()?;
    let params = gap_params(g, delta, gamma, lambda)?;
    let regs = GapRegs {
        tau: m.regs.real("gap.tau", params.tau),
        eps: m.regs.real("gap.eps", params.epsilon),
        zeta: m.regs.real("gap.zeta", params.zeta),
        r_max: m.regs.real("gap.Rmax", 0.0),
        c1: m.regs.real("gap.C1", 0.0),
        c2: m.regs.real("gap.C2", 0.0),
        vi: m.regs.int("gap.v.i", 0),
        vj: m.regs.int("gap.v.j", 1),
        k: m.regs.int("gap.k", 1),
    };
    let mut calls = 0;
    let cap = k_cap(params.ln_tau, lambda);
    let out = algorithm_b(m, &regs, g, cap, source, &mut calls);
    let r_max = m.regs.get(regs.r_max);
    for r in [regs.c2, regs.c1, regs.r_max, regs.zeta, regs.eps, regs.tau] {
        m.regs.free(r);
    }
    for r in [regs.k, regs.vj, regs.vi] {
        m.regs.free_int(r);
    }
    out.map(|argmax| GapEstimate {
        value: 2.0 * (1.0 - r_max),
        r_max,
        params,
        tau: params.tau,
        k_cap: cap,
        norm_calls: calls,
        argmax,
    })
}

fn algorithm_b(
    m: &mut Machine,
    x: &GapRegs,
    g: &WeightedGraph,
    cap: u64,
    source: &RandomSource,
    calls: &mut u64,
) -> Result<Option<(usize, usize, u64)>> {
    let n = g.n() as u64;
    let k_loop = m.loop_len(cap as f64);
    let mut argmax = None;
    let mut norm = |m: &mut Machine, k: u64| -> Result<f64> {
        *calls += 1;
        let (i, j) = (m.regs.get_int(x.vi), m.regs.get_int(x.vj));
        let v = SigmaVector::new(g, i as usize, j as usize)?;
        let (eps, zeta) = (m.regs.get(x.eps), m.regs.get(x.zeta));
        estimate_norm_strict(m, g, k, &v, eps.max(f64::MIN_POSITIVE), zeta, &source.descend(&[i, j, k]))
    };
    m.regs.set_int(x.vi, 0);
    while m.regs.get_int(x.vi) < n {
        m.regs.set_int(x.vj, m.regs.get_int(x.vi) + 1);
        while m.regs.get_int(x.vj) < n {
            m.regs.set_int(x.k, 1);
            let c1 = norm(m, 1)?;
            m.regs.set(x.c1, c1);
            let c2 = norm(m, 2)?;
            m.regs.set(x.c2, c2);
            let threshold = 1.5 * m.regs.get(x.tau);
            while m.regs.get(x.c2) >= threshold && m.regs.get(x.c1) >= threshold && m.regs.get_int(x.k) < k_loop {
                let ratio = m.regs.get(x.c2) / m.regs.get(x.c1);
                if ratio > m.regs.get(x.r_max) {
                    m.regs.set(x.r_max, ratio);
                    argmax = Some((
                        m.regs.get_int(x.vi) as usize,
                        m.regs.get_int(x.vj) as usize,
                        m.regs.get_int(x.k),
                    ));
                }
                m.regs.incr(x.k);
                m.regs.set(x.c1, m.regs.get(x.c2));
                let c2 = norm(m, m.regs.get_int(x.k) + 1)?;
                m.regs.set(x.c2, c2);
            }
            m.regs.incr(x.vj);
        }
        m.regs.incr(x.vi);
    }
    Ok(argmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use crate::oracle;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sigma_examples() {
        let s: Vec<_> = sigma_vectors(&complete(2)).collect();
        assert_eq!(s.len(), 1);
        assert_abs_diff_eq!(s[0].vi, -1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s[0].vj, 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        assert_eq!(sigma_vectors(&path(3)).count(), 3);
        let v = SigmaVector::new(&star(3), 0, 1).unwrap();
        assert_abs_diff_eq!(v.vi, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(v.vj, 0.75f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn sigma_vectors_are_unit_and_orthogonal() {
        for (name, g) in corpus() {
            let u1 = g.null_vector();
            let mut count = 0;
            for v in sigma_vectors(&g) {
                let d = v.dense(g.n());
                let norm: f64 = d.iter().map(|x| x * x).sum::<f64>().sqrt();
                let dot: f64 = d.iter().zip(&u1).map(|(a, b)| a * b).sum();
                assert!((norm - 1.0).abs() <= 1e-12, "{name}");
                assert!(dot.abs() <= 1e-12, "{name}");
                count += 1;
            }
            assert_eq!(count, g.n() * (g.n() - 1) / 2);
        }
    }

    #[test]
    fn gap_param_examples() {
        let p = gap_params(&complete(4), 1.0, 0.1, 1.0).unwrap();
        assert_abs_diff_eq!(p.tau, 8.43e-8, epsilon = 0.01e-8);
        for delta in [1.0, 0.5, 0.2] {
            let p = gap_params(&cycle(6), delta, 0.1, 0.3).unwrap();
            assert!(p.epsilon < p.tau / 2.0);
            assert!(p.tau > 0.0 && p.tau < 1.0);
        }
        let a = gap_params(&cycle(6), 0.5, 0.1, 0.3).unwrap();
        let b = gap_params(&cycle(6), 0.4, 0.1, 0.3).unwrap();
        assert!(b.ln_tau < a.ln_tau);
        assert!(gap_params(&cycle(6), 0.0, 0.1, 0.3).is_err());
    }

    #[test]
    fn k2_norm_vanishes() {
        let g = complete(2);
        let v = SigmaVector::new(&g, 0, 1).unwrap();
        let mode = Mode::Practical(PracticalBudget::new(1000));
        let est = estimate_norm(&g, 1, &v, 0.1, 0.1, &mode, &RandomSource::new(4)).unwrap();
        assert!(est.value <= 0.1);
    }

    #[test]
    fn practical_norm_tracks_dense_value() {
        let g = complete(3);
        let v = SigmaVector::new(&g, 0, 1).unwrap();
        let mode = Mode::Practical(PracticalBudget::new(50_000));
        let est = estimate_norm(&g, 1, &v, 0.1, 0.1, &mode, &RandomSource::new(4)).unwrap();
        let exact = oracle::dense_power_apply(&g, 1, &v.dense(3)).unwrap();
        let exact = exact.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert_abs_diff_eq!(exact, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(est.value, exact, epsilon = 0.02);
    }

    #[test]
    fn strict_norm_is_budgeted() {
        let g = cycle(5);
        let v = SigmaVector::new(&g, 0, 1).unwrap();
        let mode = Mode::Strict(crate::StrictBudget::capped(16, 1_000_000));
        let out = estimate_norm(&g, 2, &v, 0.5, 0.1, &mode, &RandomSource::new(4));
        assert!(matches!(out, Err(Error::Budget { .. })));
    }

    #[test]
    fn small_graphs_are_refused() {
        let cfg = GapConfig::practical(0.2, 0.1, 100);
        assert!(matches!(
            lambda2_estimate(&path(3), &cfg, &RandomSource::new(0)),
            Err(Error::TooSmall { n: 3 })
        ));
    }

    #[test]
    fn power_ratio_precondition() {
        assert!(power_ratio_bounds(1.0, 0.2, 0.1, 4, 1.0).is_err());
        let b = power_ratio_bounds(1.0, 0.2, 0.01, 4, 1.0).unwrap();
        assert!(b.part_one(0.5) && b.part_two(0.5));
        assert!(!b.part_one(0.7));
    }
}
