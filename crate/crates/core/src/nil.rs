//! Nilpotency experiments: the collapsing automaton, the marker encoding of
//! a spreading cellular automaton into a sand automaton, flattening and
//! ultimate-periodicity searches.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::ca::{find_spreading_states, CaRule};
use crate::config::Configuration;
use crate::height::{Finite, NegInf, PosInf};
use crate::metric::ground_cylinder;
use crate::program::{Atom, Case, Cmp, Cond, RuleProgram};
use crate::rule::{Backing, Native, SaRule};
use crate::sa::{iterated_radius, oracle_step_window, step, step_n};
use crate::sample::{self, LineParams};
use crate::{Error, Height, Pattern, Result, DEFAULT_BUDGET};

/// The rule that lowers a pile by one when it sees a lower neighbour.
/// `make_collapse(1, 1)` is the automaton `N`.
pub fn make_collapse(r: u32, dim: usize) -> SaRule {
    SaRule::collapse(r, dim)
}

/// A one-dimensional cellular automaton over `{0, ..., states - 1}` of
/// radius at least 1 in which 0 is spreading.
#[derive(Clone, Debug)]
pub struct SpreadingCa {
    rule: CaRule,
}

impl SpreadingCa {
    pub fn new(rule: CaRule) -> Result<SpreadingCa> {
        if rule.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: rule.dim() });
        }
        if rule.radius() == 0 {
            return Err(Error::InvalidRule("radius must be at least 1".into()));
        }
        if !find_spreading_states(&rule, DEFAULT_BUDGET)?.spreading.contains(&0) {
            return Err(Error::NotSpreading);
        }
        Ok(SpreadingCa { rule })
    }

    pub fn rule(&self) -> &CaRule {
        &self.rule
    }

    pub fn radius(&self) -> u32 {
        self.rule.radius()
    }

    pub fn states(&self) -> u8 {
        self.rule.states()
    }
}

/// A one-dimensional cellular-automaton configuration: finitely many
/// non-zero cells, or spatially periodic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CaConfig {
    Finite { origin: i64, cells: Vec<u8> },
    Periodic { cells: Vec<u8> },
}

impl CaConfig {
    /// Trims zeros at both ends.
    pub fn finite(origin: i64, cells: Vec<u8>) -> CaConfig {
        let Some(first) = cells.iter().position(|&c| c != 0) else {
            return CaConfig::Finite { origin: 0, cells: Vec::new() };
        };
        let last = cells.iter().rposition(|&c| c != 0).expect("non-zero cell");
        CaConfig::Finite { origin: origin + first as i64, cells: cells[first..=last].to_vec() }
    }

    /// Reduced to the least period; the all-zero configuration is finite.
    pub fn periodic(cells: Vec<u8>) -> Result<CaConfig> {
        if cells.is_empty() {
            return Err(Error::InvalidConfiguration("period must be at least 1".into()));
        }
        if cells.iter().all(|&c| c == 0) {
            return Ok(CaConfig::finite(0, Vec::new()));
        }
        let n = cells.len();
        let p = (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| cells[i] == cells[i - p])).unwrap_or(n);
        Ok(CaConfig::Periodic { cells: cells[..p].to_vec() })
    }

    pub fn at(&self, i: i64) -> u8 {
        match self {
            CaConfig::Finite { origin, cells } => {
                let k = i - origin;
                if k < 0 || k >= cells.len() as i64 { 0 } else { cells[k as usize] }
            }
            CaConfig::Periodic { cells } => cells[i.rem_euclid(cells.len() as i64) as usize],
        }
    }

    pub fn max_state(&self) -> u8 {
        match self {
            CaConfig::Finite { cells, .. } | CaConfig::Periodic { cells } => cells.iter().copied().max().unwrap_or(0),
        }
    }

    /// One step of `g`, whose background state 0 must be quiescent.
    pub fn step(&self, g: &CaRule) -> Result<CaConfig> {
        if g.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: g.dim() });
        }
        if self.max_state() >= g.states() {
            return Err(Error::InvalidConfiguration(format!("state outside alphabet of size {}", g.states())));
        }
        let s = g.radius() as i64;
        let window = |i: i64| -> Vec<u8> { (i - s..=i + s).map(|j| self.at(j)).collect() };
        match self {
            CaConfig::Finite { origin, cells } => {
                if g.eval(&vec![0; g.cells()]) != 0 {
                    return Err(Error::InvalidRule("state 0 is not quiescent".into()));
                }
                let lo = origin - s;
                let out = (lo..origin + cells.len() as i64 + s).map(|i| g.eval(&window(i))).collect();
                Ok(CaConfig::finite(lo, out))
            }
            CaConfig::Periodic { cells } => {
                CaConfig::periodic((0..cells.len() as i64).map(|i| g.eval(&window(i))).collect())
            }
        }
    }
}

/// Marker encoding: cell `y_i` becomes the pile `c + y_i` at position `2i`,
/// and every odd position holds a marker pile of height `c`.
pub fn xi_encode(y: &CaConfig, c: i64) -> Result<Configuration> {
    let pile = |s: u8| Height::Finite(c).checked_add(s as i64);
    match y {
        CaConfig::Finite { origin, cells } => {
            let mut core = Vec::with_capacity(2 * cells.len());
            for &s in cells {
                core.push(pile(s)?);
                core.push(Finite(c));
            }
            Ok(Configuration::finite(c, 2 * origin, core))
        }
        CaConfig::Periodic { cells } => {
            let mut out = Vec::with_capacity(2 * cells.len());
            for &s in cells {
                out.push(pile(s)?);
                out.push(Finite(c));
            }
            Configuration::periodic(out)
        }
    }
}

/// Sand-automaton rule simulating a spreading cellular automaton on marker
/// encodings.
#[derive(Clone, Debug)]
pub struct Reduction {
    ca: CaRule,
    radius: u32,
}

impl Reduction {
    pub fn ca(&self) -> &CaRule {
        &self.ca
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    fn entry(&self, entries: &[Height], o: i64) -> Height {
        let r = self.radius as i64;
        entries[if o < 0 { o + r } else { o + r - 1 } as usize]
    }

    pub(crate) fn eval_entries(&self, entries: &[Height]) -> i64 {
        let s = self.ca.radius() as i64;
        let max = self.ca.states() as i64 - 1;
        let in_alphabet = |h: Height| matches!(h, Finite(v) if (0..=max).contains(&v));
        let odd = || (-s..s).map(|m| 2 * m + 1);
        // Markers around a state pile, or states around a marker: unchanged.
        if odd().all(|o| in_alphabet(self.entry(entries, o))) {
            return 0;
        }
        // A state pile `-a` above its markers: apply the automaton.
        if let Finite(a) = self.entry(entries, 1) {
            if a < 0 && -a <= max && odd().all(|o| self.entry(entries, o) == Finite(a)) {
                let cells: Option<Vec<u8>> = (-s..=s)
                    .map(|m| {
                        let h = if m == 0 { Finite(0) } else { self.entry(entries, 2 * m) };
                        match h {
                            Finite(v) if (0..=max).contains(&(v - a)) => Some((v - a) as u8),
                            _ => None,
                        }
                    })
                    .collect();
                if let Some(cells) = cells {
                    return self.ca.eval(&cells) as i64 + a;
                }
            }
        }
        -i64::from(entries.iter().any(|&h| h < Finite(0)))
    }
}

fn reduction_radius(s: &SpreadingCa) -> u32 {
    (2 * s.radius()).max(s.states() as u32 - 1)
}

/// The sand automaton `F` with `xi(G(y)) = F(xi(y))`, of radius
/// `max(2s, max A)`.
pub fn build_reduction(s: &SpreadingCa) -> SaRule {
    let radius = reduction_radius(s);
    let red = Reduction { ca: s.rule.clone(), radius };
    SaRule::from_parts(1, radius, Backing::Native(Native::Reduction(Arc::new(red))))
}

fn atom(o: i64, cmp: Cmp, v: i64) -> Cond {
    Cond::Atom(Atom { offset: vec![o], cmp, value: Finite(v) })
}

/// The reduction rule as a guarded-case program. Fails when it would need
/// more than `max_cases` cases.
pub fn reduction_program(s: &SpreadingCa, max_cases: usize) -> Result<RuleProgram> {
    let radius = reduction_radius(s);
    let sr = s.radius() as i64;
    let states = s.states() as i64;
    let max = states - 1;
    let odd: Vec<i64> = (-sr..sr).map(|m| 2 * m + 1).collect();
    let even: Vec<i64> = (-sr..=sr).filter(|&m| m != 0).map(|m| 2 * m).collect();
    let needed = (max as u64).saturating_mul((states as u64).saturating_pow(even.len() as u32)) + 2;
    if needed > max_cases as u64 {
        return Err(Error::BudgetExceeded { needed, budget: max_cases as u64 });
    }
    let mut cases = Vec::new();
    let unchanged = odd.iter().flat_map(|&o| [atom(o, Cmp::Ge, 0), atom(o, Cmp::Le, max)]).collect();
    cases.push(Case { cond: Cond::And(unchanged), output: 0 });
    for q in 1..=max {
        let mut nb = vec![0u8; even.len()];
        loop {
            let mut conj: Vec<Cond> = odd.iter().map(|&o| atom(o, Cmp::Eq, -q)).collect();
            conj.extend(even.iter().zip(&nb).map(|(&o, &st)| atom(o, Cmp::Eq, st as i64 - q)));
            let mut cells = nb.clone();
            cells.insert(sr as usize, q as u8);
            cases.push(Case { cond: Cond::And(conj), output: s.rule.eval(&cells) as i64 - q });
            let Some(k) = nb.iter().position(|&c| (c as i64) < max) else { break };
            nb[k] += 1;
            nb[..k].iter_mut().for_each(|c| *c = 0);
        }
    }
    let r = radius as i64;
    let lower = (-r..=r).filter(|&o| o != 0).map(|o| atom(o, Cmp::Lt, 0)).collect();
    cases.push(Case { cond: Cond::Or(lower), output: -1 });
    let p = RuleProgram { dim: 1, radius, cases, default: 0 };
    p.validate()?;
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FlattenReport {
    /// `F^step(x)` is the constant `limit`, a fixed point.
    Converged { limit: i64, step: u64 },
    /// No fixation within the budget. `stable_radius` is the largest `w`
    /// (up to 64) such that the ground cylinder of radius `w` at the origin
    /// did not change over the last recorded steps.
    NotConverged { steps: u64, stable_radius: Option<u32> },
    /// The described region grew past the width cap.
    DivergedWindow { step: u64, width: usize },
}

const WIDTH_CAP: usize = 1 << 20;
const HISTORY: usize = 8;

fn description_width(x: &Configuration) -> usize {
    match x {
        Configuration::Line(l) => l.core().len(),
        Configuration::Periodic(p) => p.period(),
        Configuration::Plane(p) => p.shape()[0] * p.shape()[1],
    }
}

fn stable_radius(history: &[Configuration]) -> Result<Option<u32>> {
    let zero = vec![0; history[0].dim()];
    let mut best = None;
    for w in 0..=64u32 {
        let first = ground_cylinder(&history[0], &zero, w)?;
        for x in &history[1..] {
            if ground_cylinder(x, &zero, w)? != first {
                return Ok(best);
            }
        }
        best = Some(w);
    }
    Ok(best)
}

/// Runs `F` on a bounded configuration for at most `budget` steps, looking
/// for a constant fixed point.
pub fn detect_flatten(f: &SaRule, x: &Configuration, budget: u64) -> Result<FlattenReport> {
    if !x.is_bounded() {
        return Err(Error::Unbounded);
    }
    let mut cur = x.clone();
    let mut history = Vec::with_capacity(HISTORY);
    for n in 0..=budget {
        if let Some(Finite(c)) = cur.as_constant() {
            if step(f, &cur)? == cur {
                return Ok(FlattenReport::Converged { limit: c, step: n });
            }
        }
        let width = description_width(&cur);
        if width > WIDTH_CAP {
            return Ok(FlattenReport::DivergedWindow { step: n, width });
        }
        if history.len() == HISTORY {
            history.remove(0);
        }
        history.push(cur.clone());
        if n < budget {
            cur = step(f, &cur)?;
        }
    }
    Ok(FlattenReport::NotConverged { steps: budget, stable_radius: stable_radius(&history)? })
}

/// A configuration on which `F^(n+p)` is not a vertical translate of `F^n`:
/// the differences `F^(n+p)(x)_i - F^n(x)_i` at the two sites disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Refutation {
    pub n: u32,
    pub p: u32,
    pub witness: Configuration,
    pub sites: [i64; 2],
}

impl Refutation {
    pub fn replay(&self, f: &SaRule) -> Result<bool> {
        let a = step_n(f, &self.witness, self.n as u64)?;
        let b = step_n(f, &self.witness, (self.n + self.p) as u64)?;
        let d = |i: i64| match (a.at(i), b.at(i)) {
            (Finite(u), Finite(v)) => Some(v - u),
            _ => None,
        };
        Ok(matches!((d(self.sites[0]), d(self.sites[1])), (Some(u), Some(v)) if u != v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PeriodReport {
    /// `F^(n+p) = rho^drift o F^n`, verified over every light-cone pattern.
    Periodic { n: u32, p: u32, drift: i64 },
    /// Every pair `(n, p)` with `n + p <= max_sum` has a refutation.
    Refuted(Vec<Refutation>),
    /// Some pairs were neither verified nor refuted.
    Unknown { refuted: Vec<Refutation>, open: Vec<(u32, u32)> },
}

enum PairOutcome {
    Equal(i64),
    Differ(Refutation),
    TooLarge,
}

fn centre_after(f: &SaRule, window: &Pattern<Height>, steps: u32) -> i64 {
    if steps == 0 {
        return 0;
    }
    let mid = window.len() / 2;
    let need = steps as usize * f.radius() as usize;
    let sub = window.crop(&[mid - need], &[2 * need + 1]);
    oracle_step_window(f, &sub, steps).expect("window large enough").as_slice()[0]
        .finite()
        .expect("finite pile stays finite")
}

fn combine(n: u32, p: u32, w1: &[Height], w2: &[Height]) -> Refutation {
    let reach = (w1.len() / 2) as i64;
    let mut core = w1.to_vec();
    core.extend_from_slice(w2);
    Refutation { n, p, witness: Configuration::finite(0, -reach, core), sites: [0, 2 * reach + 1] }
}

/// Compares the centre of `F^a` and `F^b` over every pattern of the light
/// cone `|o| <= b r` at the precision that determines `b` steps.
fn exhaustive_pair(f: &SaRule, a: u32, b: u32, budget: u64) -> Result<PairOutcome> {
    let r = f.radius();
    let reach = (b * r) as usize;
    let prec = iterated_radius(r, b) as i64;
    let base = 2 * prec as u64 + 3;
    let count = base.checked_pow(2 * reach as u32).unwrap_or(u64::MAX);
    if count > budget {
        return Ok(PairOutcome::TooLarge);
    }
    let mut digits = vec![0u64; 2 * reach];
    let mut window = vec![Finite(0); 2 * reach + 1];
    let mut first: Option<(i64, Vec<Height>)> = None;
    for _ in 0..count {
        for (k, &d) in digits.iter().enumerate() {
            let pos = if k < reach { k } else { k + 1 };
            window[pos] = Finite(d as i64 - prec - 1);
        }
        let pat = Pattern::line(window.clone());
        let v = centre_after(f, &pat, b) - centre_after(f, &pat, a);
        match &first {
            None => first = Some((v, window.clone())),
            Some((v0, w0)) if *v0 != v => {
                let rf = combine(a, b - a, w0, &window);
                if rf.replay(f)? {
                    return Ok(PairOutcome::Differ(rf));
                }
                return Err(Error::InvalidRule(format!("light-cone witness for ({a}, {b}) did not replay")));
            }
            _ => {}
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d < base {
                break;
            }
            *d = 0;
        }
    }
    Ok(PairOutcome::Equal(first.map_or(0, |(v, _)| v)))
}

/// Random configuration for refutation search: mostly staircases running
/// from `-inf` to `+inf`, sometimes arbitrary lines.
fn refutation_sample<R: Rng>(rng: &mut R) -> Configuration {
    if rng.gen_bool(0.5) {
        let len = rng.gen_range(1..=12);
        let mut h = rng.gen_range(-4..=4);
        let core = (0..len)
            .map(|_| {
                h += rng.gen_range(-1..=3);
                Finite(h)
            })
            .collect();
        let (left, right) = if rng.gen_bool(0.5) { (NegInf, PosInf) } else { (PosInf, NegInf) };
        Configuration::line(left, right, -(len as i64) / 2, core)
    } else {
        sample::random_line(rng, &LineParams { max_core: 12, lo: -8, hi: 8, p_inf: 0.15, split_background: true })
    }
}

fn sampled_pair<R: Rng>(f: &SaRule, a: u32, b: u32, samples: u64, rng: &mut R) -> Result<Option<Refutation>> {
    for _ in 0..samples {
        let x = refutation_sample(rng);
        let fa = step_n(f, &x, a as u64)?;
        let fb = step_n(f, &fa, (b - a) as u64)?;
        let (la, lb) = (fa.as_line().expect("line"), fb.as_line().expect("line"));
        let lo = la.origin().min(lb.origin()) - 1;
        let hi = la.end().max(lb.end()) + 1;
        let mut seen: Option<(i64, i64)> = None;
        for i in lo..=hi {
            if let (Finite(u), Finite(v)) = (fa.at(i), fb.at(i)) {
                match seen {
                    None => seen = Some((i, v - u)),
                    Some((j, d)) if d != v - u => {
                        let rf = Refutation { n: a, p: b - a, witness: x.clone(), sites: [j, i] };
                        if rf.replay(f)? {
                            return Ok(Some(rf));
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(None)
}

/// Bounded search for `F^(n+p) = rho^v o F^n`. Pairs with `n + p <= 2` are
/// settled exhaustively when the light cone fits the budget; larger pairs
/// up to `max_sum` are only refuted, by sampling `sample_budget`
/// configurations each.
pub fn find_ultimate_period(f: &SaRule, max_sum: u32, sample_budget: u64, seed: u64) -> Result<PeriodReport> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: f.dim() });
    }
    let mut rng = sample::rng(seed);
    let mut refuted = Vec::new();
    let mut open = Vec::new();
    for b in 1..=max_sum {
        for a in 0..b {
            if b <= 2 {
                match exhaustive_pair(f, a, b, DEFAULT_BUDGET)? {
                    PairOutcome::Equal(drift) => return Ok(PeriodReport::Periodic { n: a, p: b - a, drift }),
                    PairOutcome::Differ(rf) => {
                        refuted.push(rf);
                        continue;
                    }
                    PairOutcome::TooLarge => {}
                }
            }
            match sampled_pair(f, a, b, sample_budget, &mut rng)? {
                Some(rf) => refuted.push(rf),
                None => open.push((a, b - a)),
            }
        }
    }
    Ok(if open.is_empty() { PeriodReport::Refuted(refuted) } else { PeriodReport::Unknown { refuted, open } })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeReport {
    /// A periodic configuration over non-zero states whose orbit enters a
    /// cycle without ever showing 0.
    No { witness: CaConfig, cycle_start: u64, cycle_len: u64 },
    /// Every tested configuration showed 0, except `undetermined` ones that
    /// ran out of steps first.
    ConsistentWithNilpotent { tested: u64, undetermined: u64 },
}

fn periodic_step(g: &CaRule, cells: &[u8], buf: &mut Vec<u8>) -> Vec<u8> {
    let n = cells.len() as i64;
    let s = g.radius() as i64;
    (0..n)
        .map(|i| {
            buf.clear();
            buf.extend((i - s..=i + s).map(|j| cells[j.rem_euclid(n) as usize]));
            g.eval(buf)
        })
        .collect()
}

enum Fate {
    ShowsZero,
    Cycle(u64, u64),
    Undetermined,
}

/// Brent cycle detection with a step limit, stopping as soon as 0 appears.
fn fate(g: &CaRule, x0: &[u8], max_steps: u64) -> Fate {
    let mut buf = Vec::new();
    let has_zero = |c: &[u8]| c.contains(&0);
    if has_zero(x0) {
        return Fate::ShowsZero;
    }
    let mut steps = 1;
    let mut power = 1;
    let mut lam = 1;
    let mut tortoise = x0.to_vec();
    let mut hare = periodic_step(g, x0, &mut buf);
    while tortoise != hare {
        if has_zero(&hare) {
            return Fate::ShowsZero;
        }
        if steps >= max_steps {
            return Fate::Undetermined;
        }
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        hare = periodic_step(g, &hare, &mut buf);
        lam += 1;
        steps += 1;
    }
    let mut tortoise = x0.to_vec();
    let mut hare = x0.to_vec();
    for _ in 0..lam {
        hare = periodic_step(g, &hare, &mut buf);
    }
    let mut mu = 0;
    while tortoise != hare {
        tortoise = periodic_step(g, &tortoise, &mut buf);
        hare = periodic_step(g, &hare, &mut buf);
        mu += 1;
    }
    Fate::Cycle(mu, lam)
}

/// Looks for a periodic configuration over non-zero states, of period at
/// most `max_support`, whose orbit never shows 0.
pub fn probe_ca_nilpotency(s: &SpreadingCa, max_support: usize, max_steps: u64, budget: u64) -> Result<ProbeReport> {
    let g = s.rule();
    let k = s.states() as u64 - 1;
    let needed = (1..=max_support as u32).try_fold(0u64, |acc, p| acc.checked_add(k.checked_pow(p)?)).unwrap_or(u64::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let (mut tested, mut undetermined) = (0, 0);
    if k == 0 {
        return Ok(ProbeReport::ConsistentWithNilpotent { tested, undetermined });
    }
    for p in 1..=max_support {
        let mut cells = vec![1u8; p];
        loop {
            tested += 1;
            match fate(g, &cells, max_steps) {
                Fate::ShowsZero => {}
                Fate::Undetermined => undetermined += 1,
                Fate::Cycle(mu, lam) => {
                    return Ok(ProbeReport::No { witness: CaConfig::periodic(cells)?, cycle_start: mu, cycle_len: lam });
                }
            }
            let Some(i) = cells.iter().position(|&c| (c as u64) < k) else { break };
            cells[i] += 1;
            cells[..i].iter_mut().for_each(|c| *c = 1);
        }
    }
    Ok(ProbeReport::ConsistentWithNilpotent { tested, undetermined })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Perturbation {
    /// An exact encoding.
    None,
    /// One marker lowered by one grain; the background is that new minimum.
    MarkerLowered,
    /// One state pile raised above every state.
    StateRaised,
    /// Arbitrary piles flanking the encoding on the right.
    InvalidFlank,
}

/// A bounded configuration made of a valid encoding with a damaged part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairScenario {
    pub config: Configuration,
    pub perturbation: Perturbation,
    /// A minimal marker pile inside the valid part.
    pub anchor: i64,
    /// Region that must eventually be valid.
    pub target: (i64, i64),
    pub states: u8,
    /// How far past the target valid spans are tracked.
    pub margin: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairReport {
    /// Valid span around the anchor after each step, starting with step 0.
    pub spans: Vec<(i64, i64)>,
    pub never_shrank: bool,
    /// First step at which the span covered the target.
    pub covered_at: Option<u64>,
}

impl RepairScenario {
    fn valid_at(&self, x: &Configuration, i: i64) -> bool {
        let Finite(c) = x.at(self.anchor) else { return false };
        match x.at(i) {
            Finite(h) if (i - self.anchor) % 2 == 0 => h == c,
            Finite(h) => (0..self.states as i64).contains(&(h - c)),
            _ => false,
        }
    }

    /// Largest interval around the anchor, clipped to the target plus the
    /// margin, on which `x` encodes a configuration with markers at the
    /// anchor's height and parity.
    pub fn valid_span(&self, x: &Configuration) -> (i64, i64) {
        let lo_cap = self.target.0 - self.margin;
        let hi_cap = self.target.1 + self.margin;
        let mut lo = self.anchor;
        while lo > lo_cap && self.valid_at(x, lo - 1) {
            lo -= 1;
        }
        let mut hi = self.anchor;
        while hi < hi_cap && self.valid_at(x, hi + 1) {
            hi += 1;
        }
        (lo, hi)
    }

    pub fn replay(&self, f: &SaRule, steps: u64) -> Result<RepairReport> {
        let mut x = self.config.clone();
        let mut spans = Vec::with_capacity(steps as usize + 1);
        let mut never_shrank = true;
        let mut covered_at = None;
        for t in 0..=steps {
            if t > 0 {
                x = step(f, &x)?;
            }
            let span = self.valid_span(&x);
            if let Some(&(lo, hi)) = spans.last() {
                if span.0 > lo || span.1 < hi {
                    never_shrank = false;
                }
            }
            if covered_at.is_none() && span.0 <= self.target.0 && span.1 >= self.target.1 {
                covered_at = Some(t);
            }
            spans.push(span);
        }
        Ok(RepairReport { spans, never_shrank, covered_at })
    }
}

/// A damaged encoding with a perturbation chosen by the seed.
pub fn invalid_repair_scenario(s: &SpreadingCa, seed: u64) -> Result<RepairScenario> {
    let kind = [Perturbation::MarkerLowered, Perturbation::StateRaised, Perturbation::InvalidFlank][(seed % 3) as usize];
    repair_scenario(s, seed, kind)
}

pub fn repair_scenario(s: &SpreadingCa, seed: u64, kind: Perturbation) -> Result<RepairScenario> {
    let mut rng = sample::rng(seed);
    let states = s.states();
    let r = reduction_radius(s) as i64;
    let c = rng.gen_range(-3..=3);
    let len = rng.gen_range(3..=8usize);
    let cells: Vec<u8> = (0..len).map(|_| rng.gen_range(0..states)).collect();
    // piles 0 ..= 2 len: state, marker, ..., marker, state 0
    let mut core: Vec<i64> = Vec::with_capacity(2 * len + 1);
    for &q in &cells {
        core.push(c + q as i64);
        core.push(c);
    }
    core.push(c);
    let mut bg = c;
    let mut anchor = 1;
    match kind {
        Perturbation::None => {}
        Perturbation::MarkerLowered => {
            anchor = 2 * rng.gen_range(0..len) as i64 + 1;
            core[anchor as usize] = c - 1;
            bg = c - 1;
        }
        Perturbation::StateRaised => {
            let at = 2 * rng.gen_range(1..len);
            core[at] = c + states as i64 + rng.gen_range(0..=r);
            anchor = if at > len { 1 } else { 2 * len as i64 - 1 };
        }
        Perturbation::InvalidFlank => {
            let extra = rng.gen_range(2..=6);
            core.extend((0..extra).map(|_| c + rng.gen_range(0..=r + 3)));
        }
    }
    let config = Configuration::from_ints(bg, 0, &core);
    let target = (-2, core.len() as i64 + 1);
    Ok(RepairScenario { config, perturbation: kind, anchor, target, states, margin: 2 * r + 2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::NativeCa;
    use crate::rule::Range;

    fn spreading(n: NativeCa, states: u8) -> SpreadingCa {
        SpreadingCa::new(CaRule::native(1, 1, states, n).unwrap()).unwrap()
    }

    #[test]
    fn collapse_examples() {
        let n = make_collapse(1, 1);
        assert_eq!(n.apply(&Range::new(1, 1, vec![NegInf, PosInf]).unwrap()), Ok(-1));
        assert_eq!(n.apply(&Range::flat(1, 1)), Ok(0));
        let r = Range::new(2, 1, vec![Finite(0), Finite(-2), Finite(0), Finite(0)]).unwrap();
        assert_eq!(make_collapse(2, 1).apply(&r), Ok(-1));
    }

    #[test]
    fn xi_examples() {
        let y = CaConfig::finite(0, vec![1, 2]);
        assert_eq!(xi_encode(&y, 0).unwrap(), Configuration::from_ints(0, 0, &[1, 0, 2]));
        assert_eq!(xi_encode(&CaConfig::finite(3, vec![0, 0]), 0).unwrap(), Configuration::constant(0));
        assert_eq!(xi_encode(&y, 5).unwrap(), xi_encode(&y, 0).unwrap().raise(5).unwrap());
        let p = CaConfig::periodic(vec![1]).unwrap();
        assert_eq!(xi_encode(&p, 0).unwrap(), Configuration::periodic(vec![Finite(1), Finite(0)]).unwrap());
    }

    #[test]
    fn reduction_commutes() {
        let s = spreading(NativeCa::Min, 3);
        let f = build_reduction(&s);
        assert_eq!(f.radius(), 2);
        let mut rng = sample::rng(4);
        for _ in 0..50 {
            let len = rng.gen_range(0..6);
            let mut y = CaConfig::finite(rng.gen_range(-3..3), (0..len).map(|_| rng.gen_range(0..3)).collect());
            let c = rng.gen_range(-4..=4);
            let mut x = xi_encode(&y, c).unwrap();
            for _ in 0..5 {
                y = y.step(s.rule()).unwrap();
                x = step(&f, &x).unwrap();
                assert_eq!(x, xi_encode(&y, c).unwrap());
            }
        }
    }

    #[test]
    fn reduction_program_agrees() {
        for (n, states) in [(NativeCa::Min, 3), (NativeCa::Constant(0), 2)] {
            let s = spreading(n, states);
            let f = build_reduction(&s);
            let p = SaRule::program(reduction_program(&s, 1000).unwrap()).unwrap();
            let count = crate::rule::range_count(f.radius(), 1).unwrap();
            for i in 0..count {
                let r = Range::from_index(f.radius(), 1, i);
                assert_eq!(f.apply(&r), p.apply(&r), "{r:?}");
            }
        }
    }

    #[test]
    fn flatten_examples() {
        let n = make_collapse(1, 1);
        let x = Configuration::from_ints(0, 0, &[2]);
        assert_eq!(detect_flatten(&n, &x, 10), Ok(FlattenReport::Converged { limit: 0, step: 2 }));
        let fig = Configuration::from_ints(-2, -3, &[5, -2, 1, 4, 2, 2, 5]);
        match detect_flatten(&n, &fig, 1000).unwrap() {
            FlattenReport::Converged { limit, step } => {
                assert_eq!(limit, -2);
                assert!(step <= 10 * 7 * 8);
            }
            other => panic!("{other:?}"),
        }
        let id = SaRule::identity(1);
        assert!(matches!(detect_flatten(&id, &x, 20), Ok(FlattenReport::NotConverged { .. })));
        let unbounded = Configuration::finite(0, 0, vec![PosInf]);
        assert_eq!(detect_flatten(&n, &unbounded, 5), Err(Error::Unbounded));
    }

    #[test]
    fn period_examples() {
        assert_eq!(
            find_ultimate_period(&SaRule::identity(1), 3, 10, 1),
            Ok(PeriodReport::Periodic { n: 0, p: 1, drift: 0 })
        );
        assert_eq!(
            find_ultimate_period(&SaRule::raise(1), 3, 10, 1),
            Ok(PeriodReport::Periodic { n: 0, p: 1, drift: 1 })
        );
        match find_ultimate_period(&make_collapse(1, 1), 2, 200, 1).unwrap() {
            PeriodReport::Refuted(rs) => {
                assert_eq!(rs.len(), 3);
                assert!(rs.iter().all(|r| r.replay(&make_collapse(1, 1)).unwrap()));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn probe_examples() {
        let zero = spreading(NativeCa::Constant(0), 2);
        assert!(matches!(
            probe_ca_nilpotency(&zero, 6, 100, 1000),
            Ok(ProbeReport::ConsistentWithNilpotent { tested: 6, undetermined: 0 })
        ));
        let min = spreading(NativeCa::Min, 2);
        match probe_ca_nilpotency(&min, 6, 100, 1000).unwrap() {
            ProbeReport::No { witness, .. } => assert_eq!(witness, CaConfig::Periodic { cells: vec![1] }),
            other => panic!("{other:?}"),
        }
        let shift = CaRule::native(1, 1, 2, NativeCa::ShiftRight).unwrap();
        assert_eq!(SpreadingCa::new(shift).unwrap_err(), Error::NotSpreading);
    }

    #[test]
    fn repair_scenarios() {
        let s = spreading(NativeCa::Constant(0), 2);
        let f = build_reduction(&s);
        for seed in 0..30 {
            let sc = invalid_repair_scenario(&s, seed).unwrap();
            let rep = sc.replay(&f, 300).unwrap();
            assert!(rep.never_shrank, "{sc:?} {:?}", rep.spans);
            assert!(rep.covered_at.is_some(), "{sc:?} {:?}", rep.spans);
        }
        let valid = repair_scenario(&s, 3, Perturbation::None).unwrap();
        let rep = valid.replay(&f, 20).unwrap();
        assert_eq!(rep.covered_at, Some(0));
        let markers = RepairScenario { config: Configuration::constant(0), ..valid };
        assert_eq!(step(&f, &markers.config).unwrap(), Configuration::constant(0));
    }
}
