//! Entrywise estimation of `L† b` from Poisson-weighted random walks.
//!
//! For `b ∈ Im(L)` and a lower bound `λ ≤ λ₂`,
//!
//! ```text
//! L† b ≈ (T/N) Σ_{j=1..N} Σ_{k<K} 𝒫_{jT/N}(k) · D^{1/2} P^k D^{-1/2} b
//! ```
//!
//! and entry `i` of `D^{1/2} P^k D^{-1/2} b` is `Σ_ℓ b_ℓ √(d_ℓ/d_i) Pr[walk_k(ℓ) = i]`.
//!
//! Strict mode runs the triple loop over `(j, k, ℓ)` verbatim with
//! estimated Poisson weights and a fresh batch of `r` walks per term.
//! Practical mode collapses the `j` sum into exact per-`k` weights and lets
//! one batch of walks per start vertex serve every `k` and every target.

use nalgebra::DMatrix;

use crate::audit::{Machine, StrictRng, WalkRegs};
use crate::error::{domain, Error, Result};
use crate::estimators::{poisson_block, poisson_pmf_estimate_with, poisson_strict};
use crate::graph::{norm2, ImageVector, WeightedGraph};
use crate::mode::{Mode, PracticalBudget, StrictBudget};
use crate::walk::{hoeffding_radius, RandomSource, WalkEngine};

/// Relative tolerance below which an input `b` counts as lying in `Im(L)`.
pub const IMAGE_REJECT_TOLERANCE: f64 = 1e-6;

// Ceil that forgives the last few ulps, so `30 / 0.1` is 300 and not 301.
fn ceil_tol(x: f64) -> f64 {
    (x * (1.0 - 1e-12)).ceil()
}

/// `T`, `N`, `K` of the truncated series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    pub epsilon: f64,
    pub lambda: f64,
    /// `T = ⌈ln(6/(ελ)) / λ⌉`
    pub t_horizon: u64,
    /// `N = ⌈6T/ε⌉`
    pub n_terms: u64,
    /// `K = ⌈max(6T, ln(6T/ε))⌉`
    pub k_terms: u64,
}

impl SeriesParams {
    pub fn new(epsilon: f64, lambda: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(domain(format!("ε = {epsilon} outside (0, 1]")));
        }
        if !(lambda > 0.0 && lambda <= 2.0) {
            return Err(domain(format!("λ = {lambda} outside (0, 2]")));
        }
        let t = ceil_tol((6.0 / (epsilon * lambda)).ln() / lambda).max(1.0);
        let n = ceil_tol(6.0 * t / epsilon);
        let k = ceil_tol((6.0 * t).max((6.0 * t / epsilon).ln()));
        if t * n * k > u64::MAX as f64 / 2.0 {
            return Err(domain("series too long to index"));
        }
        Ok(Self {
            epsilon,
            lambda,
            t_horizon: t as u64,
            n_terms: n as u64,
            k_terms: k as u64,
        })
    }

    /// Spacing `T/N` of the quadrature in `s`.
    pub fn step(&self) -> f64 {
        self.t_horizon as f64 / self.n_terms as f64
    }

    /// Poisson mean of the `j`-th term.
    pub fn mean(&self, j: u64) -> f64 {
        j as f64 * self.step()
    }
}

/// Per-`k` weights `c_k = (T/N) Σ_j 𝒫_{jT/N}(k)`, accumulated in log space.
pub fn poisson_weights(params: &SeriesParams) -> Vec<f64> {
    let kk = params.k_terms as usize;
    let h = params.step();
    let mut c = vec![0.0; kk];
    for j in 1..=params.n_terms {
        let s = params.mean(j);
        let ls = s.ln();
        let mut logp = -s;
        for (k, ck) in c.iter_mut().enumerate() {
            *ck += logp.exp();
            logp += ls - ((k + 1) as f64).ln();
        }
    }
    c.iter_mut().for_each(|x| *x *= h);
    c
}

/// Algorithm constants for one target entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub series: SeriesParams,
    pub gamma: f64,
    /// `δ = (6TK √(Σ_ℓ d_ℓ / d_i))⁻¹`
    pub delta: f64,
    /// `ζ = γ / (N K (1 + n))`
    pub zeta: f64,
    /// `r = ⌈ln(2/ζ) / (2δ²)⌉`; kept as a float because it is usually huge.
    pub trials: f64,
}

impl SolverParams {
    pub fn new(g: &WeightedGraph, i: usize, epsilon: f64, gamma: f64, lambda: f64) -> Result<Self> {
        if i >= g.n() {
            return Err(Error::Index { index: i, n: g.n() });
        }
        check_gamma(gamma)?;
        g.check_no_isolated()?;
        let series = SeriesParams::new(epsilon, lambda)?;
        let (t, n, k) = (
            series.t_horizon as f64,
            series.n_terms as f64,
            series.k_terms as f64,
        );
        let delta = 1.0 / (6.0 * t * k * (g.volume() / g.degree(i)).sqrt());
        let zeta = gamma / (n * k * (1.0 + g.n() as f64));
        let trials = ((2.0 / zeta).ln() / (2.0 * delta * delta)).ceil();
        Ok(Self {
            series,
            gamma,
            delta,
            zeta,
            trials,
        })
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(domain(format!("γ = {gamma} outside (0, 1]")));
    }
    Ok(())
}

fn check_unit(b: &ImageVector) -> Result<()> {
    let norm = b.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(domain(format!("b must have unit norm, got {norm}")));
    }
    Ok(())
}

/// Source of `k`-step walk laws, indexed `[k][v]` for a fixed start.
pub trait HitLaw {
    fn from_start(&self, start: usize, k_terms: usize) -> Vec<Vec<f64>>;
}

/// Empirical laws from `trials` walks per start; start `ℓ` uses stream `source.child(ℓ)`.
pub struct SampledHitLaw<'g> {
    pub engine: WalkEngine<'g>,
    pub trials: u64,
    pub source: RandomSource,
    pub workers: usize,
}

impl HitLaw for SampledHitLaw<'_> {
    fn from_start(&self, start: usize, k_terms: usize) -> Vec<Vec<f64>> {
        let counts = self.engine.occupancy(
            start,
            k_terms.saturating_sub(1),
            self.trials,
            &self.source.child(start as u64),
            self.workers,
        );
        let r = self.trials as f64;
        counts
            .into_iter()
            .map(|row| row.into_iter().map(|c| c as f64 / r).collect())
            .collect()
    }
}

/// Exact laws: rows of dense `P^k`.
pub struct ExactHitLaw {
    powers: Vec<DMatrix<f64>>,
}

impl ExactHitLaw {
    pub fn new(g: &WeightedGraph, k_terms: usize) -> Result<Self> {
        let p = crate::oracle::transition_dense(g)?;
        let mut powers = vec![DMatrix::identity(g.n(), g.n())];
        while powers.len() < k_terms {
            let next = powers.last().unwrap() * &p;
            powers.push(next);
        }
        Ok(Self { powers })
    }
}

impl HitLaw for ExactHitLaw {
    fn from_start(&self, start: usize, k_terms: usize) -> Vec<Vec<f64>> {
        self.powers[..k_terms]
            .iter()
            .map(|pk| pk.row(start).iter().cloned().collect())
            .collect()
    }
}

/// `x_i = Σ_ℓ b_ℓ √(d_ℓ/d_i) Σ_k c_k law_ℓ[k][i]` for every `i`.
pub fn series_apply(g: &WeightedGraph, b: &[f64], weights: &[f64], law: &impl HitLaw) -> Vec<f64> {
    let n = g.n();
    let d = g.degrees();
    let mut x = vec![0.0; n];
    for l in 0..n {
        if b[l] == 0.0 {
            continue;
        }
        let rows = law.from_start(l, weights.len());
        let scale = b[l] * d[l].sqrt();
        for (i, xi) in x.iter_mut().enumerate() {
            let mass: f64 = weights.iter().zip(&rows).map(|(c, row)| c * row[i]).sum();
            *xi += scale * mass / d[i].sqrt();
        }
    }
    x
}

/// Result of a single-entry solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntryEstimate {
    pub value: f64,
    /// Achieved Hoeffding radius of the walk layer (practical) or ε (strict).
    pub radius: f64,
}

struct Practical {
    x: Vec<f64>,
    radius: Vec<f64>,
}

fn practical_weights(
    params: &SeriesParams,
    budget: &PracticalBudget,
    zeta: f64,
    source: &RandomSource,
) -> Result<Vec<f64>> {
    let Some(m) = budget.pmf_samples else {
        return Ok(poisson_weights(params));
    };
    let delta = (2.0 * hoeffding_radius(m, zeta)).min(0.5);
    let mut c = vec![0.0; params.k_terms as usize];
    let mut draws = 0.0;
    for j in 1..=params.n_terms {
        for k in 0..params.k_terms {
            draws += poisson_block(params.mean(j), k, delta) * m as f64;
        }
    }
    if draws > budget.trial_cap as f64 {
        return Err(Error::Budget {
            needed: draws,
            cap: budget.trial_cap,
        });
    }
    for j in 1..=params.n_terms {
        let s = params.mean(j);
        for k in 0..params.k_terms {
            let block = poisson_block(s, k, delta) as u64;
            let est = poisson_pmf_estimate_with(s, k, block, m, zeta, &source.descend(&[0, j, k]), budget.workers)?;
            c[k as usize] += est.value;
        }
    }
    c.iter_mut().for_each(|x| *x *= params.step());
    Ok(c)
}

fn practical_solve(
    g: &WeightedGraph,
    b: &[f64],
    params: &SeriesParams,
    gamma: f64,
    budget: &PracticalBudget,
    source: &RandomSource,
) -> Result<Practical> {
    let r = budget.samples;
    if r == 0 {
        return Err(domain("at least one walk per start is required"));
    }
    let n = g.n();
    let starts = b.iter().filter(|&&x| x != 0.0).count() as f64;
    let draws = starts * r as f64 * (params.k_terms - 1) as f64;
    if draws > budget.trial_cap as f64 {
        return Err(Error::Budget {
            needed: draws,
            cap: budget.trial_cap,
        });
    }
    // Half the budget for the pmf layer, half for the walks.
    let zeta_pmf = gamma / (2.0 * (params.n_terms * params.k_terms) as f64);
    let weights = practical_weights(params, budget, zeta_pmf, &source.child(0))?;
    let law = SampledHitLaw {
        engine: WalkEngine::auto(g)?,
        trials: r,
        source: source.child(1),
        workers: budget.workers,
    };
    let x = series_apply(g, b, &weights, &law);

    let zeta_walk = gamma / (2.0 * params.k_terms as f64 * n as f64);
    let h = hoeffding_radius(r, zeta_walk);
    let total: f64 = weights.iter().sum();
    let spread: f64 = b
        .iter()
        .zip(g.degrees())
        .map(|(bl, dl)| bl.abs() * dl.sqrt())
        .sum();
    let radius = g
        .degrees()
        .iter()
        .map(|di| h * total * spread / di.sqrt())
        .collect();
    Ok(Practical { x, radius })
}

/// Estimate `(L† b)_i` for a connected graph and a unit `b ∈ Im(L)`.
///
/// Practical mode computes every entry from the same walks; asking for one
/// entry costs as much as [`solve`].
#[allow(clippy::too_many_arguments)]
pub fn solve_entry(
    g: &WeightedGraph,
    b: &ImageVector,
    i: usize,
    epsilon: f64,
    gamma: f64,
    lambda: f64,
    mode: &Mode,
    source: &RandomSource,
) -> Result<EntryEstimate> {
    check_entry_inputs(g, b, i)?;
    check_gamma(gamma)?;
    match mode {
        Mode::Strict(budget) => {
            let mut m = Machine::new(*budget);
            let value = solve_entry_strict(&mut m, g, b, i, epsilon, gamma, lambda, source)?;
            m.finish(EntryEstimate {
                value,
                radius: epsilon,
            })
        }
        Mode::Practical(budget) => {
            let params = SeriesParams::new(epsilon, lambda)?;
            let out = practical_solve(g, b.as_slice(), &params, gamma, budget, source)?;
            Ok(EntryEstimate {
                value: out.x[i],
                radius: out.radius[i],
            })
        }
    }
}

fn check_entry_inputs(g: &WeightedGraph, b: &ImageVector, i: usize) -> Result<()> {
    if b.as_slice().len() != g.n() {
        return Err(domain("vector length does not match the graph"));
    }
    if i >= g.n() {
        return Err(Error::Index { index: i, n: g.n() });
    }
    g.check_no_isolated()?;
    g.check_connected()?;
    check_unit(b)
}

struct AlgoRegs {
    t: crate::audit::RealReg,
    nn: crate::audit::RealReg,
    kk: crate::audit::RealReg,
    delta: crate::audit::RealReg,
    zeta: crate::audit::RealReg,
    r: crate::audit::RealReg,
    acc: crate::audit::RealReg,
    a: crate::audit::RealReg,
    j: crate::audit::IntReg,
    k: crate::audit::IntReg,
    l: crate::audit::IntReg,
    s: crate::audit::IntReg,
    trial: crate::audit::IntReg,
}

/// Register-level solver for entry `i`: every scalar lives in `m.regs`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn solve_entry_strict(
    m: &mut Machine,
    g: &WeightedGraph,
    b: &ImageVector,
    i: usize,
    epsilon: f64,
    gamma: f64,
    lambda: f64,
    source: &RandomSource,
) -> Result<f64> {
    check_entry_inputs(g, b, i)?;
    let p = SolverParams::new(g, i, epsilon, gamma, lambda)?;
    let regs = AlgoRegs {
        t: m.regs.real("solve.T", p.series.t_horizon as f64),
        nn: m.regs.real("solve.N", p.series.n_terms as f64),
        kk: m.regs.real("solve.K", p.series.k_terms as f64),
        delta: m.regs.real("solve.delta", p.delta),
        zeta: m.regs.real("solve.zeta", p.zeta),
        r: m.regs.real("solve.r", p.trials),
        acc: m.regs.real("solve.R", 0.0),
        a: m.regs.real("solve.a", 0.0),
        j: m.regs.int("solve.j", 1),
        k: m.regs.int("solve.k", 0),
        l: m.regs.int("solve.l", 0),
        s: m.regs.int("solve.S", 0),
        trial: m.regs.int("solve.t", 0),
    };
    let mut rng = StrictRng::open(m, source);
    let walk = WalkRegs::open(m);
    let out = algorithm_a(m, &mut rng, &walk, &regs, g, b.as_slice(), i, source);
    walk.close(m);
    rng.close(m);
    for r in [regs.a, regs.acc, regs.r, regs.zeta, regs.delta, regs.kk, regs.nn, regs.t] {
        m.regs.free(r);
    }
    for r in [regs.trial, regs.s, regs.l, regs.k, regs.j] {
        m.regs.free_int(r);
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn algorithm_a(
    m: &mut Machine,
    rng: &mut StrictRng,
    walk: &WalkRegs,
    x: &AlgoRegs,
    g: &WeightedGraph,
    b: &[f64],
    i: usize,
    source: &RandomSource,
) -> Result<f64> {
    let n_loop = m.loop_len(m.regs.get(x.nn));
    let k_loop = m.loop_len(m.regs.get(x.kk));
    let r_loop = m.loop_len(m.regs.get(x.r));
    let di = g.degree(i);
    m.regs.set_int(x.j, 1);
    while m.regs.get_int(x.j) <= n_loop {
        m.regs.set_int(x.k, 0);
        while m.regs.get_int(x.k) < k_loop {
            let (j, k) = (m.regs.get_int(x.j), m.regs.get_int(x.k));
            let s = j as f64 * m.regs.get(x.t) / m.regs.get(x.nn);
            let (delta, zeta) = (m.regs.get(x.delta), m.regs.get(x.zeta));
            let a = poisson_strict(m, rng, &source.descend(&[0, j, k]), s, k, delta, zeta)?;
            m.regs.set(x.a, a);
            m.regs.set_int(x.l, 0);
            while (m.regs.get_int(x.l) as usize) < g.n() {
                let l = m.regs.get_int(x.l);
                rng.rekey(m, &source.descend(&[1, j, k, l]));
                m.regs.set_int(x.s, 0);
                m.regs.set_int(x.trial, 0);
                while m.regs.get_int(x.trial) < r_loop {
                    m.charge(1)?;
                    rng.begin_trial(m, m.regs.get_int(x.trial));
                    if walk.walk(m, rng, g, l as usize, k)? == i {
                        m.regs.incr(x.s);
                    }
                    m.regs.incr(x.trial);
                }
                let hit = m.regs.get_int(x.s) as f64 / r_loop.max(1) as f64;
                let term = m.regs.get(x.a) * b[l as usize] * hit * (g.degree(l as usize) / di).sqrt();
                m.regs.set(x.acc, m.regs.get(x.acc) + term);
                m.regs.incr(x.l);
            }
            m.regs.incr(x.k);
        }
        m.regs.incr(x.j);
    }
    Ok(m.regs.get(x.acc) * m.regs.get(x.t) / m.regs.get(x.nn))
}

/// How the per-entry precision relates to the vector error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormTarget {
    /// Every entry within ε.
    #[default]
    Entrywise,
    /// `‖x̃ − L†b‖₂ ≤ ε`, by asking ε/√n of every entry.
    Euclidean,
}

impl std::str::FromStr for NormTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entrywise" => Ok(Self::Entrywise),
            "euclidean" => Ok(Self::Euclidean),
            other => Err(domain(format!("unknown norm target {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub epsilon: f64,
    pub gamma: f64,
    /// Lower bound on λ₂; defaults to `1/(diam · vol)` per component.
    pub lambda: Option<f64>,
    pub mode: Mode,
    pub norm: NormTarget,
    /// Project `b` onto the image instead of rejecting it.
    pub project: bool,
}

impl SolveConfig {
    pub fn practical(epsilon: f64, gamma: f64, samples: u64) -> Self {
        Self::with_mode(epsilon, gamma, Mode::Practical(PracticalBudget::new(samples)))
    }

    pub fn strict(epsilon: f64, gamma: f64, budget: StrictBudget) -> Self {
        Self::with_mode(epsilon, gamma, Mode::Strict(budget))
    }

    pub fn with_mode(epsilon: f64, gamma: f64, mode: Mode) -> Self {
        Self {
            epsilon,
            gamma,
            lambda: None,
            mode,
            norm: NormTarget::Entrywise,
            project: false,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_norm(mut self, norm: NormTarget) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_projection(mut self, project: bool) -> Self {
        self.project = project;
        self
    }
}

/// What was run on one connected component.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentReport {
    pub vertices: Vec<usize>,
    /// Norm of `b` restricted to the component; the solve ran on `b / b_norm`.
    pub b_norm: f64,
    pub lambda: f64,
    /// `None` when `b` vanishes on the component.
    pub series: Option<SeriesParams>,
    pub entry_epsilon: f64,
    pub entry_gamma: f64,
    /// Smallest per-entry δ of the strict analysis.
    pub delta: f64,
    pub zeta: f64,
    /// Largest per-entry strict trial count `r`.
    pub strict_trials: f64,
    /// Walks actually run per start vertex.
    pub walks: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    /// Per-entry error radius: Hoeffding (practical) or the target ε (strict).
    pub radius: Vec<f64>,
    pub components: Vec<ComponentReport>,
}

/// Approximate `L† b`, component by component.
///
/// `b` must lie in the image of `L` (per component, to a relative 1e-6)
/// unless projection is enabled. Each component's slice of `b` is scaled to
/// unit norm for the solve and the result scaled back.
pub fn solve(g: &WeightedGraph, b: &[f64], cfg: &SolveConfig, source: &RandomSource) -> Result<Solution> {
    if b.len() != g.n() {
        return Err(domain("vector length does not match the graph"));
    }
    if !(cfg.epsilon > 0.0 && cfg.epsilon <= 1.0) {
        return Err(domain(format!("ε = {} outside (0, 1]", cfg.epsilon)));
    }
    check_gamma(cfg.gamma)?;
    g.check_no_isolated()?;
    let n = g.n();
    let norm = norm2(b);
    if !cfg.project {
        let residual = g.image_residual(b)?;
        if residual > IMAGE_REJECT_TOLERANCE * norm {
            return Err(Error::NotInImage { residual });
        }
    }
    let b = g.project_per_component(b)?;
    let entry_epsilon = match cfg.norm {
        NormTarget::Entrywise => cfg.epsilon,
        NormTarget::Euclidean => cfg.epsilon / (n as f64).sqrt(),
    };
    let entry_gamma = cfg.gamma / n as f64;

    let mut sol = Solution {
        x: vec![0.0; n],
        radius: vec![0.0; n],
        components: Vec::new(),
    };
    for (c, part) in g.connected_components().into_iter().enumerate() {
        let sub = g.induced_subgraph(&part);
        let local: Vec<f64> = part.iter().map(|&i| b[i]).collect();
        let b_norm = norm2(&local);
        let mut report = ComponentReport {
            vertices: part.clone(),
            b_norm,
            lambda: f64::NAN,
            series: None,
            entry_epsilon,
            entry_gamma,
            delta: f64::NAN,
            zeta: f64::NAN,
            strict_trials: f64::NAN,
            walks: 0,
        };
        if part.len() < 2 || b_norm <= crate::IMAGE_TOLERANCE * norm {
            sol.components.push(report);
            continue;
        }
        let lambda = match cfg.lambda {
            Some(l) => l,
            None => sub.lambda2_lower_bound()?,
        };
        let unit = ImageVector::new(&sub, local.iter().map(|x| x / b_norm).collect())?;
        let params: Vec<SolverParams> = (0..sub.n())
            .map(|i| SolverParams::new(&sub, i, entry_epsilon, entry_gamma, lambda))
            .collect::<Result<_>>()?;
        report.lambda = lambda;
        report.series = Some(params[0].series);
        report.delta = params.iter().map(|p| p.delta).fold(f64::INFINITY, f64::min);
        report.zeta = params[0].zeta;
        report.strict_trials = params.iter().map(|p| p.trials).fold(0.0, f64::max);
        let source = source.child(c as u64);
        let (x, radius) = match &cfg.mode {
            Mode::Practical(budget) => {
                report.walks = budget.samples;
                let out = practical_solve(&sub, unit.as_slice(), &params[0].series, entry_gamma, budget, &source)?;
                (out.x, out.radius)
            }
            Mode::Strict(budget) => {
                let mut x = Vec::with_capacity(sub.n());
                for i in 0..sub.n() {
                    let mut m = Machine::new(*budget);
                    let v = solve_entry_strict(
                        &mut m,
                        &sub,
                        &unit,
                        i,
                        entry_epsilon,
                        entry_gamma,
                        lambda,
                        &source.child(i as u64),
                    )?;
                    x.push(m.finish(v)?);
                }
                report.walks = report.strict_trials.min(u64::MAX as f64) as u64;
                (x, vec![entry_epsilon; sub.n()])
            }
        };
        for (k, &i) in part.iter().enumerate() {
            sol.x[i] = x[k] * b_norm;
            sol.radius[i] = radius[k] * b_norm;
        }
        sol.components.push(report);
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn series_param_examples() {
        let p = SeriesParams::new(0.1, 1.0).unwrap();
        assert_eq!((p.t_horizon, p.n_terms, p.k_terms), (5, 300, 30));
        let p = SeriesParams::new(1.0, 2.0).unwrap();
        assert_eq!((p.t_horizon, p.n_terms, p.k_terms), (1, 6, 6));
        assert!(matches!(SeriesParams::new(0.1, 2.5), Err(Error::Domain(_))));
        assert!(matches!(SeriesParams::new(0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn tighter_epsilon_never_shrinks_parameters() {
        let g = cycle(6);
        let mut last = SolverParams::new(&g, 0, 1.0, 0.1, 0.3).unwrap();
        for eps in [0.7, 0.5, 0.3, 0.2, 0.1, 0.05, 0.01] {
            let p = SolverParams::new(&g, 0, eps, 0.1, 0.3).unwrap();
            assert!(p.series.t_horizon >= last.series.t_horizon);
            assert!(p.series.n_terms >= last.series.n_terms);
            assert!(p.series.k_terms >= last.series.k_terms);
            assert!(p.trials >= last.trials);
            last = p;
        }
    }

    #[test]
    fn weights_match_exact_pmf() {
        let p = SeriesParams::new(0.2, 0.7).unwrap();
        let ours = poisson_weights(&p);
        let oracle = crate::oracle::series_coefficients(&p);
        for (a, b) in ours.iter().zip(&oracle) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_law_reproduces_series_oracle() {
        for (name, g) in corpus().into_iter().filter(|(_, g)| g.n() <= 12) {
            let mut raw = vec![0.0; g.n()];
            raw[0] = 1.0;
            raw[g.n() - 1] = -0.5;
            let b = g.project_to_image(&raw).unwrap();
            let params = SeriesParams::new(0.2, g.lambda2_lower_bound().unwrap().max(0.05)).unwrap();
            let law = ExactHitLaw::new(&g, params.k_terms as usize).unwrap();
            let ours = series_apply(&g, b.as_slice(), &poisson_weights(&params), &law);
            let oracle = crate::oracle::series_eval_direct(&g, b.as_slice(), &params).unwrap();
            for (a, c) in ours.iter().zip(&oracle) {
                assert_abs_diff_eq!(*a, *c, epsilon = 1e-12);
            }
            assert!(!name.is_empty());
        }
    }

    #[test]
    fn k2_is_noise_free() {
        let g = complete(2);
        let s = 1.0 / 2f64.sqrt();
        let cfg = SolveConfig::practical(0.1, 0.1, 1000);
        let sol = solve(&g, &[s, -s], &cfg, &RandomSource::new(7)).unwrap();
        assert_abs_diff_eq!(sol.x[0], 0.353553, epsilon = 0.05);
        assert_abs_diff_eq!(sol.x[1], -0.353553, epsilon = 0.05);
    }

    #[test]
    fn rejects_vectors_outside_the_image() {
        let g = complete(2);
        let s = 1.0 / 2f64.sqrt();
        let cfg = SolveConfig::practical(0.1, 0.1, 100);
        assert!(matches!(
            solve(&g, &[s, s], &cfg, &RandomSource::new(1)),
            Err(Error::NotInImage { .. })
        ));
        let sol = solve(&g, &[s, s], &cfg.with_projection(true), &RandomSource::new(1)).unwrap();
        assert_eq!(sol.x, vec![0.0, 0.0]);
    }

    #[test]
    fn zero_vector_solves_to_zero() {
        let g = cycle(5);
        let cfg = SolveConfig::practical(0.1, 0.1, 100);
        let sol = solve(&g, &[0.0; 5], &cfg, &RandomSource::new(1)).unwrap();
        assert_eq!(sol.x, vec![0.0; 5]);
    }

    #[test]
    fn components_are_solved_separately() {
        let g = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let cfg = SolveConfig::practical(0.1, 0.1, 100);
        let sol = solve(&g, &[s, -s, 0.0, 0.0], &cfg, &RandomSource::new(2)).unwrap();
        assert_eq!(&sol.x[2..], &[0.0, 0.0]);
        assert_abs_diff_eq!(sol.x[0], 0.353553, epsilon = 0.05);
        assert_eq!(sol.components.len(), 2);
        assert!(sol.components[1].series.is_none());
    }

    #[test]
    fn practical_budget_is_enforced() {
        let g = cycle(5);
        let b = g.project_to_image(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let unit = ImageVector::new(&g, b.as_slice().iter().map(|x| x / b.norm()).collect()).unwrap();
        let mut budget = PracticalBudget::new(1000);
        budget.trial_cap = 10;
        let out = solve_entry(&g, &unit, 0, 0.1, 0.1, 1.0, &Mode::Practical(budget), &RandomSource::new(0));
        assert!(matches!(out, Err(Error::Budget { .. })));
    }

    #[test]
    fn strict_entry_runs_under_a_cap() {
        let g = complete(2);
        let s = 1.0 / 2f64.sqrt();
        let b = ImageVector::new(&g, vec![s, -s]).unwrap();
        let mode = Mode::Strict(StrictBudget::capped(8, 100_000));
        let out = solve_entry(&g, &b, 0, 0.5, 0.1, 2.0, &mode, &RandomSource::new(0));
        assert!(matches!(out, Err(Error::Budget { .. })));
    }

    #[test]
    fn practical_entry_matches_vector_solve() {
        let g = complete(3);
        let s = 1.0 / 2f64.sqrt();
        let b = ImageVector::new(&g, vec![s, -s, 0.0]).unwrap();
        let mode = Mode::Practical(PracticalBudget::new(2000));
        let src = RandomSource::new(5);
        let e = solve_entry(&g, &b, 2, 0.1, 0.1, 1.5, &mode, &src).unwrap();
        let params = SeriesParams::new(0.1, 1.5).unwrap();
        let all = practical_solve(&g, b.as_slice(), &params, 0.1, &PracticalBudget::new(2000), &src).unwrap();
        assert_eq!(e.value, all.x[2]);
    }

    #[test]
    fn workers_do_not_change_results() {
        let g = cycle(5);
        let b = g.project_to_image(&[1.0, 0.0, -1.0, 0.0, 0.0]).unwrap();
        let base = SolveConfig::practical(0.2, 0.1, 9000).with_lambda(0.5);
        let a = solve(&g, b.as_slice(), &base, &RandomSource::new(3)).unwrap();
        let mut par = base;
        if let Mode::Practical(p) = &mut par.mode {
            *p = p.with_workers(3);
        }
        let c = solve(&g, b.as_slice(), &par, &RandomSource::new(3)).unwrap();
        assert_eq!(a.x, c.x);
    }
}
