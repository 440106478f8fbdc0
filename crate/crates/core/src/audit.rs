//! Working-space accounting for the strict algorithm paths.
//!
//! Strict code obtains every mutable scalar (loop counters, accumulators,
//! derived constants, RNG state) from a [`RegisterFile`]. The graph is
//! read-only input and is not counted. A high-water mark that stays fixed as
//! `n` grows means a constant number of registers, each `O(log n)` bits wide.

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::mode::StrictBudget;
use crate::walk::{RandomSource, COMPENSATED_SCAN_DEGREE, TRIAL_BATCH};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterOp {
    Alloc,
    Free,
}

/// One allocation-log entry: what happened, to which named slot, and how
/// many slots were live afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterEvent {
    pub op: RegisterOp,
    pub name: &'static str,
    pub live: usize,
}

/// Handle to an integer register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntReg(usize);

/// Handle to a real register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealReg(usize);

/// Named scalar slots with a live count and a high-water mark.
#[derive(Debug, Clone, Default)]
pub struct RegisterFile {
    bits: Vec<u64>,
    names: Vec<&'static str>,
    vacant: Vec<usize>,
    live: usize,
    high_water: usize,
    log: Option<Vec<RegisterEvent>>,
}

impl RegisterFile {
    pub fn new() -> Self {
        Self::default()
    }

    /// A register file that also records every allocation and release.
    pub fn logged() -> Self {
        Self {
            log: Some(Vec::new()),
            ..Self::default()
        }
    }

    fn alloc(&mut self, name: &'static str, bits: u64) -> usize {
        let slot = match self.vacant.pop() {
            Some(slot) => {
                self.bits[slot] = bits;
                self.names[slot] = name;
                slot
            }
            None => {
                self.bits.push(bits);
                self.names.push(name);
                self.bits.len() - 1
            }
        };
        self.live += 1;
        self.high_water = self.high_water.max(self.live);
        if let Some(log) = &mut self.log {
            log.push(RegisterEvent {
                op: RegisterOp::Alloc,
                name,
                live: self.live,
            });
        }
        slot
    }

    fn release(&mut self, slot: usize) {
        self.vacant.push(slot);
        self.live -= 1;
        if let Some(log) = &mut self.log {
            log.push(RegisterEvent {
                op: RegisterOp::Free,
                name: self.names[slot],
                live: self.live,
            });
        }
    }

    pub fn int(&mut self, name: &'static str, init: u64) -> IntReg {
        IntReg(self.alloc(name, init))
    }

    pub fn real(&mut self, name: &'static str, init: f64) -> RealReg {
        RealReg(self.alloc(name, init.to_bits()))
    }

    #[inline]
    pub fn get_int(&self, r: IntReg) -> u64 {
        self.bits[r.0]
    }

    #[inline]
    pub fn set_int(&mut self, r: IntReg, v: u64) {
        self.bits[r.0] = v;
    }

    #[inline]
    pub fn incr(&mut self, r: IntReg) {
        self.bits[r.0] += 1;
    }

    #[inline]
    pub fn get(&self, r: RealReg) -> f64 {
        f64::from_bits(self.bits[r.0])
    }

    #[inline]
    pub fn set(&mut self, r: RealReg, v: f64) {
        self.bits[r.0] = v.to_bits();
    }

    pub fn free_int(&mut self, r: IntReg) {
        self.release(r.0);
    }

    pub fn free(&mut self, r: RealReg) {
        self.release(r.0);
    }

    pub fn live(&self) -> usize {
        self.live
    }

    pub fn high_water(&self) -> usize {
        self.high_water
    }

    pub fn log(&self) -> &[RegisterEvent] {
        self.log.as_deref().unwrap_or(&[])
    }
}

/// Register file plus the work accounting of a strict run.
#[derive(Debug)]
pub(crate) struct Machine {
    pub regs: RegisterFile,
    budget: StrictBudget,
    used: u64,
    truncated: Option<f64>,
}

impl Machine {
    pub fn new(budget: StrictBudget) -> Self {
        Self::with_registers(budget, RegisterFile::new())
    }

    pub fn with_registers(budget: StrictBudget, regs: RegisterFile) -> Self {
        Self {
            regs,
            budget,
            used: 0,
            truncated: None,
        }
    }

    /// Consume `units` of work; fails once the total cap is exceeded.
    #[inline]
    pub fn charge(&mut self, units: u64) -> Result<()> {
        self.used += units;
        match self.budget.total_cap {
            Some(cap) if self.used > cap => Err(Error::Budget {
                needed: self.used as f64,
                cap,
            }),
            _ => Ok(()),
        }
    }

    /// Iteration count for a repeat loop that should run `count` times
    /// (`count` may be astronomically large), after applying the loop cap.
    pub fn loop_len(&mut self, count: f64) -> u64 {
        let want = if count >= u64::MAX as f64 { u64::MAX } else { count as u64 };
        match self.budget.loop_cap {
            Some(cap) if want > cap => {
                self.truncated = Some(self.truncated.unwrap_or(0.0).max(count));
                cap
            }
            _ => want,
        }
    }

    /// Turns a finished computation into a budget error if any loop was cut short.
    pub fn finish<T>(&self, value: T) -> Result<T> {
        match (self.truncated, self.budget.loop_cap) {
            (Some(needed), Some(cap)) => Err(Error::Budget { needed, cap }),
            _ => Ok(value),
        }
    }

    #[cfg(test)]
    pub fn truncated(&self) -> bool {
        self.truncated.is_some()
    }

    pub fn work(&self) -> u64 {
        self.used
    }
}

/// Random draws for strict code. The generator is fully determined by the
/// three registers `(seed, stream, trial)`: trial `t` of a loop draws from
/// stream `source.child(t / TRIAL_BATCH)`, exactly like the batched fast
/// paths, so strict and fast estimators consume identical randomness.
pub(crate) struct StrictRng {
    source: RandomSource,
    seed: IntReg,
    stream: IntReg,
    trial: IntReg,
    rng: ChaCha8Rng,
}

impl StrictRng {
    pub fn open(m: &mut Machine, source: &RandomSource) -> Self {
        let seed = m.regs.int("rng.seed", source.seed);
        let stream = m.regs.int("rng.stream", source.stream);
        let trial = m.regs.int("rng.trial", 0);
        Self {
            source: *source,
            seed,
            stream,
            trial,
            rng: source.rng(),
        }
    }

    /// Re-key for a new trial loop driven by `source`.
    pub fn rekey(&mut self, m: &mut Machine, source: &RandomSource) {
        self.source = *source;
        m.regs.set_int(self.seed, source.seed);
        m.regs.set_int(self.stream, source.stream);
        m.regs.set_int(self.trial, 0);
    }

    /// Position the generator at trial `t` of the current loop.
    pub fn begin_trial(&mut self, m: &mut Machine, t: u64) {
        m.regs.set_int(self.trial, t);
        if t % TRIAL_BATCH == 0 {
            self.rng = self.source.child(t / TRIAL_BATCH).rng();
        }
    }

    #[inline]
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    #[inline]
    pub fn word(&mut self) -> u64 {
        self.rng.next_u64()
    }

    pub fn close(self, m: &mut Machine) {
        m.regs.free_int(self.trial);
        m.regs.free_int(self.stream);
        m.regs.free_int(self.seed);
    }
}

/// Registers for one walk: position, step counter and the neighbor scan.
pub(crate) struct WalkRegs {
    pos: IntReg,
    step: IntReg,
    idx: IntReg,
    target: RealReg,
    sum: RealReg,
    comp: RealReg,
}

impl WalkRegs {
    pub fn open(m: &mut Machine) -> Self {
        Self {
            pos: m.regs.int("walk.pos", 0),
            step: m.regs.int("walk.step", 0),
            idx: m.regs.int("walk.scan_idx", 0),
            target: m.regs.real("walk.scan_target", 0.0),
            sum: m.regs.real("walk.scan_sum", 0.0),
            comp: m.regs.real("walk.scan_comp", 0.0),
        }
    }

    /// Run `steps` steps from `start` and return the end vertex.
    pub fn walk(
        &self,
        m: &mut Machine,
        rng: &mut StrictRng,
        g: &WeightedGraph,
        start: usize,
        steps: u64,
    ) -> Result<usize> {
        m.regs.set_int(self.pos, start as u64);
        m.regs.set_int(self.step, 0);
        while m.regs.get_int(self.step) < steps {
            m.charge(1)?;
            let v = m.regs.get_int(self.pos) as usize;
            let list = g.neighbors(v);
            if list.is_empty() {
                return Err(Error::IsolatedVertex(v));
            }
            let compensated = list.len() > COMPENSATED_SCAN_DEGREE;
            m.regs.set(self.target, rng.uniform() * g.degree(v));
            m.regs.set(self.sum, 0.0);
            m.regs.set(self.comp, 0.0);
            m.regs.set_int(self.idx, 0);
            let mut next = list[list.len() - 1].0;
            while (m.regs.get_int(self.idx) as usize) < list.len() {
                let (j, w) = list[m.regs.get_int(self.idx) as usize];
                let sum = m.regs.get(self.sum);
                let t = sum + w;
                if compensated {
                    let c = m.regs.get(self.comp)
                        + if sum.abs() >= w.abs() { (sum - t) + w } else { (w - t) + sum };
                    m.regs.set(self.comp, c);
                }
                m.regs.set(self.sum, t);
                if t + m.regs.get(self.comp) > m.regs.get(self.target) {
                    next = j;
                    break;
                }
                m.regs.incr(self.idx);
            }
            m.regs.set_int(self.pos, next as u64);
            m.regs.incr(self.step);
        }
        Ok(m.regs.get_int(self.pos) as usize)
    }

    pub fn close(self, m: &mut Machine) {
        m.regs.free(self.comp);
        m.regs.free(self.sum);
        m.regs.free(self.target);
        m.regs.free_int(self.idx);
        m.regs.free_int(self.step);
        m.regs.free_int(self.pos);
    }
}

/// Strict algorithm paths that can be audited.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditTarget {
    SolveEntry,
    EstimateNorm,
    Lambda2Estimate,
}

impl AuditTarget {
    pub const ALL: [AuditTarget; 3] = [
        AuditTarget::SolveEntry,
        AuditTarget::EstimateNorm,
        AuditTarget::Lambda2Estimate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AuditTarget::SolveEntry => "solve_entry",
            AuditTarget::EstimateNorm => "estimate_norm",
            AuditTarget::Lambda2Estimate => "lambda2_estimate",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == name)
    }
}

/// Inputs of an audited run. Unset fields fall back to fixed defaults so
/// that a size ladder runs identical work per graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditArgs {
    pub budget: StrictBudget,
    /// ε for `solve_entry` / `estimate_norm`, δ for `lambda2_estimate`.
    pub precision: f64,
    pub gamma: f64,
    /// `k` for `estimate_norm`.
    pub power: u64,
    pub seed: u64,
}

impl Default for AuditArgs {
    fn default() -> Self {
        Self {
            budget: StrictBudget::capped(64, 50_000),
            precision: 0.5,
            gamma: 0.1,
            power: 3,
            seed: 0x5eed,
        }
    }
}

/// Outcome of [`audited_run`]; the mark is valid even when `result` is a budget error.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub target: AuditTarget,
    pub n: usize,
    pub seed: u64,
    pub result: Result<f64>,
    pub high_water: usize,
    pub log: Vec<RegisterEvent>,
    pub work: u64,
}

impl AuditReport {
    pub fn truncated(&self) -> bool {
        matches!(self.result, Err(Error::Budget { .. }))
    }

    /// `algorithm n seed high_water_mark`
    pub fn line(&self) -> String {
        format!(
            "{} {} {} {}",
            self.target.name(),
            self.n,
            self.seed,
            self.high_water
        )
    }
}

/// Run a strict algorithm path on `g` through a logged register file.
///
/// `solve_entry` targets vertex 0 with `b` the normalized projection of
/// `e₀ − e₁`; `estimate_norm` uses the candidate vector on the pair `(0, 1)`.
pub fn audited_run(target: AuditTarget, g: &WeightedGraph, args: &AuditArgs) -> AuditReport {
    let mut m = Machine::with_registers(args.budget, RegisterFile::logged());
    let source = RandomSource::new(args.seed);
    let result = match target {
        AuditTarget::SolveEntry => audit_solve(&mut m, g, args, &source),
        AuditTarget::EstimateNorm => {
            let v = crate::spectral::SigmaVector::new(g, 0, 1);
            v.and_then(|v| {
                crate::spectral::estimate_norm_strict(
                    &mut m,
                    g,
                    args.power,
                    &v,
                    args.precision,
                    args.gamma,
                    &source,
                )
            })
        }
        AuditTarget::Lambda2Estimate => g.lambda2_lower_bound().and_then(|lambda| {
            crate::spectral::lambda2_strict(&mut m, g, args.precision, args.gamma, lambda, &source)
                .map(|r| r.value)
        }),
    };
    let result = result.and_then(|v| m.finish(v));
    AuditReport {
        target,
        n: g.n(),
        seed: args.seed,
        result,
        high_water: m.regs.high_water(),
        log: m.regs.log().to_vec(),
        work: m.work(),
    }
}

fn audit_solve(
    m: &mut Machine,
    g: &WeightedGraph,
    args: &AuditArgs,
    source: &RandomSource,
) -> Result<f64> {
    if g.n() < 2 {
        return Err(Error::NotApplicable("solve_entry needs two vertices"));
    }
    let mut e = vec![0.0; g.n()];
    e[0] = 1.0;
    e[1] = -1.0;
    let b = g.project_to_image(&e)?;
    let norm = b.norm();
    let b = crate::graph::ImageVector::new(g, b.as_slice().iter().map(|x| x / norm).collect())?;
    let lambda = g.lambda2_lower_bound()?;
    crate::solver::solve_entry_strict(m, g, &b, 0, args.precision, args.gamma, lambda, source)
}
