//! Local deterministic strategies and strategies built around one use of a
//! machine.
//!
//! For every setting a party either outputs a fixed bit (`0d`, `1d`), feeds
//! input `k` into the machine (`km`), or does so and flips the output
//! (`kmf`). Every behavior reachable this way has coordinates in
//! `{0, 1/2, 1}`, so the fast paths here work in half units.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::behavior::{BehaviorPoint, ExactPoint, Scenario};
use crate::error::{Error, Result};
use crate::functional::BellFunctional;
use crate::machine::MachineSpec;
use crate::scalar::Rational;

/// Largest `N` enumerated without an explicit override.
pub const DEFAULT_ENUMERATION_CAP: usize = 6;

/// Default number of saturating strategies kept by the optimizer.
pub const DEFAULT_COLLECTION_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Choice {
    Det(u8),
    Machine(usize),
    Flipped(usize),
}

impl Choice {
    /// Position in the ordering `0d < 1d < 0m < 0mf < 1m < 1mf < ...`.
    pub fn code(&self) -> usize {
        match *self {
            Choice::Det(b) => b as usize,
            Choice::Machine(k) => 2 + 2 * k,
            Choice::Flipped(k) => 3 + 2 * k,
        }
    }

    pub fn from_code(code: usize) -> Self {
        match code {
            0 | 1 => Choice::Det(code as u8),
            c if c % 2 == 0 => Choice::Machine((c - 2) / 2),
            c => Choice::Flipped((c - 3) / 2),
        }
    }

    pub fn uses_machine(&self) -> bool {
        !matches!(self, Choice::Det(_))
    }
}

impl PartialOrd for Choice {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Choice {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code().cmp(&other.code())
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Choice::Det(b) => write!(f, "{b}d"),
            Choice::Machine(k) => write!(f, "{k}m"),
            Choice::Flipped(k) => write!(f, "{k}mf"),
        }
    }
}

impl FromStr for Choice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad choice {s:?}; expected 0d, 1d, km or kmf"));
        if let Some(k) = s.strip_suffix("mf") {
            return k.parse().map(Choice::Flipped).map_err(|_| bad());
        }
        if let Some(k) = s.strip_suffix('m') {
            return k.parse().map(Choice::Machine).map_err(|_| bad());
        }
        match s {
            "0d" => Ok(Choice::Det(0)),
            "1d" => Ok(Choice::Det(1)),
            _ => Err(bad()),
        }
    }
}

/// Number of options per setting with a `k`-input machine: `2 + 2k`.
pub fn alphabet_size(n_inputs: usize) -> usize {
    2 + 2 * n_inputs
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartyChoice(pub Vec<Choice>);

impl PartyChoice {
    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|c| c.to_string()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WiringStrategy {
    pub machine: Option<MachineSpec>,
    pub alice: PartyChoice,
    pub bob: PartyChoice,
}

impl WiringStrategy {
    pub fn local(alice_outputs: &[u8], bob_outputs: &[u8]) -> Self {
        Self {
            machine: None,
            alice: PartyChoice(alice_outputs.iter().map(|&b| Choice::Det(b)).collect()),
            bob: PartyChoice(bob_outputs.iter().map(|&b| Choice::Det(b)).collect()),
        }
    }

    pub fn scenario(&self) -> Result<Scenario> {
        if self.alice.0.len() != self.bob.0.len() {
            return Err(Error::Dimension(
                "parties have different numbers of settings".into(),
            ));
        }
        Scenario::new(self.alice.0.len())
    }

    pub fn uses_machine(&self) -> bool {
        self.alice
            .0
            .iter()
            .chain(&self.bob.0)
            .any(Choice::uses_machine)
    }

    fn check_inputs(&self) -> Result<()> {
        let n_inputs = self.machine.as_ref().map_or(0, |m| m.n_inputs);
        for c in self.alice.0.iter().chain(&self.bob.0) {
            if let Choice::Machine(k) | Choice::Flipped(k) = *c {
                if k >= n_inputs {
                    return Err(Error::InputOutOfRange { input: k, n_inputs });
                }
            }
            if let Choice::Det(b) = *c {
                if b > 1 {
                    return Err(Error::Parse(format!(
                        "deterministic output {b} is not a bit"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "machine": self.machine.as_ref().map(MachineSpec::to_json),
            "alice": self.alice.names(),
            "bob": self.bob.names(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let machine = match v.get("machine") {
            None | Some(Value::Null) => None,
            Some(m) => Some(MachineSpec::from_json(m)?),
        };
        let party = |key: &str| -> Result<PartyChoice> {
            let arr = v
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("missing {key:?} array")))?;
            arr.iter()
                .map(|c| {
                    c.as_str()
                        .ok_or_else(|| Error::Parse("choices must be strings".into()))?
                        .parse()
                })
                .collect::<Result<Vec<_>>>()
                .map(PartyChoice)
        };
        let s = Self {
            machine,
            alice: party("alice")?,
            bob: party("bob")?,
        };
        s.scenario()?;
        s.check_inputs()?;
        Ok(s)
    }
}

/// `2 P(r=0)` for one party's choice.
fn marginal_half(c: Choice) -> u8 {
    match c {
        Choice::Det(0) => 2,
        Choice::Det(_) => 0,
        _ => 1,
    }
}

/// `2 P(r_A=0, r_B=0)` for one pair of choices.
fn joint_half(a: Choice, b: Choice, machine: Option<&MachineSpec>) -> u8 {
    let flip = |c: Choice| matches!(c, Choice::Flipped(_)) as u8;
    let input = |c: Choice| match c {
        Choice::Machine(k) | Choice::Flipped(k) => k,
        Choice::Det(_) => unreachable!(),
    };
    match (a, b) {
        (Choice::Det(x), Choice::Det(y)) => 2 * (x == 0 && y == 0) as u8,
        (Choice::Det(x), _) | (_, Choice::Det(x)) => (x == 0) as u8,
        _ => {
            let m = machine.expect("machine choice without a machine");
            let anti = m.is_anticorrelated(input(a), input(b)) as u8;
            ((flip(a) ^ flip(b)) == anti) as u8
        }
    }
}

/// Coordinates of a strategy's behavior in half units.
pub(crate) fn strategy_half(s: &WiringStrategy) -> Vec<u8> {
    let n = s.alice.0.len();
    let m = s.machine.as_ref();
    let mut out = Vec::with_capacity(n * (n + 2));
    out.extend(s.alice.0.iter().map(|&c| marginal_half(c)));
    out.extend(s.bob.0.iter().map(|&c| marginal_half(c)));
    for &a in &s.alice.0 {
        for &b in &s.bob.0 {
            out.push(joint_half(a, b, m));
        }
    }
    out
}

pub(crate) fn half_to_point(scenario: Scenario, half: &[u8]) -> ExactPoint {
    let coords: Vec<Rational> = half.iter().map(|&h| Rational::new(h as i64, 2)).collect();
    BehaviorPoint::from_coordinates(scenario, &coords).expect("shape")
}

/// The exact behavior induced by a strategy.
pub fn strategy_behavior(s: &WiringStrategy) -> Result<ExactPoint> {
    let scenario = s.scenario()?;
    s.check_inputs()?;
    Ok(half_to_point(scenario, &strategy_half(s)))
}

fn check_cap(scenario: Scenario, cap: usize) -> Result<()> {
    let n = scenario.n_settings();
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    Ok(())
}

/// Output bits of the `index`-th party strategy, setting 0 most significant.
fn bits(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|k| (index >> (n - 1 - k) & 1) as u8).collect()
}

/// All `4^N` local deterministic behaviors, Alice's outputs varying slowest.
pub fn enumerate_local(scenario: Scenario) -> Result<Vec<ExactPoint>> {
    enumerate_local_with_cap(scenario, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_local_with_cap(scenario: Scenario, cap: usize) -> Result<Vec<ExactPoint>> {
    check_cap(scenario, cap)?;
    let n = scenario.n_settings();
    let mut out = Vec::with_capacity(1 << (2 * n));
    for a in 0..1usize << n {
        for b in 0..1usize << n {
            let s = WiringStrategy::local(&bits(a, n), &bits(b, n));
            out.push(half_to_point(scenario, &strategy_half(&s)));
        }
    }
    Ok(out)
}

/// Decodes a base-`k` index into choice codes, setting 0 most significant.
fn digits(mut index: usize, k: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = index % k;
        index /= k;
    }
    out
}

fn party(codes: &[usize]) -> PartyChoice {
    PartyChoice(codes.iter().map(|&c| Choice::from_code(c)).collect())
}

/// Every strategy using at most one `machine`, in lexicographic order of the
/// choice encoding.
pub fn enumerate_one_machine(
    scenario: Scenario,
    machine: &MachineSpec,
) -> Result<impl Iterator<Item = WiringStrategy> + '_> {
    enumerate_one_machine_with_cap(scenario, machine, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_one_machine_with_cap(
    scenario: Scenario,
    machine: &MachineSpec,
    cap: usize,
) -> Result<impl Iterator<Item = WiringStrategy> + '_> {
    check_cap(scenario, cap)?;
    let n = scenario.n_settings();
    let k = alphabet_size(machine.n_inputs);
    let per_party = k.pow(n as u32);
    Ok((0..per_party).flat_map(move |a| {
        let alice = party(&digits(a, k, n));
        (0..per_party).map(move |b| WiringStrategy {
            machine: Some(machine.clone()),
            alice: alice.clone(),
            bob: party(&digits(b, k, n)),
        })
    }))
}

pub fn count_one_machine(scenario: Scenario, machine: &MachineSpec) -> u128 {
    (alphabet_size(machine.n_inputs) as u128).pow(2 * scenario.n_settings() as u32)
}

/// Result of [`max_over_one_machine`].
#[derive(Clone, Debug)]
pub struct OneMachineMax {
    pub value: Rational,
    pub witness: WiringStrategy,
    /// Strategies attaining the maximum, in lexicographic order, truncated at
    /// the collection cap.
    pub saturating: Vec<WiringStrategy>,
    pub saturating_total: u128,
}

impl OneMachineMax {
    pub fn truncated(&self) -> bool {
        (self.saturating.len() as u128) < self.saturating_total
    }
}

/// Precomputed tables for maximizing one functional over the one-machine
/// class. Bob's contribution splits into independent per-setting terms once
/// Alice's choices are fixed, so each Alice choice vector costs
/// `N * K * N` operations instead of `K^N` Bob vectors.
pub struct OneMachineSearch<'a> {
    f: &'a BellFunctional,
    machine: Option<&'a MachineSpec>,
    k: usize,
    marg: Vec<i64>,
    joint: Vec<i64>,
}

/// Per-setting argmax sets for Bob, given one Alice choice vector.
#[derive(Clone, Debug)]
pub struct AliceRow {
    pub alice: Vec<usize>,
    pub value_half: i64,
    pub bob_best: Vec<Vec<usize>>,
}

impl<'a> OneMachineSearch<'a> {
    pub fn new(f: &'a BellFunctional, machine: Option<&'a MachineSpec>) -> Self {
        let k = alphabet_size(machine.map_or(0, |m| m.n_inputs));
        let choices: Vec<Choice> = (0..k).map(Choice::from_code).collect();
        let marg = choices.iter().map(|&c| marginal_half(c) as i64).collect();
        let mut joint = vec![0; k * k];
        for (a, &ca) in choices.iter().enumerate() {
            for (b, &cb) in choices.iter().enumerate() {
                joint[a * k + b] = joint_half(ca, cb, machine) as i64;
            }
        }
        Self {
            f,
            machine,
            k,
            marg,
            joint,
        }
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    fn n(&self) -> usize {
        self.f.n()
    }

    pub fn n_alice_vectors(&self) -> usize {
        self.k.pow(self.n() as u32)
    }

    /// Evaluates every Bob option for each setting given Alice's choices.
    pub fn alice_row(&self, index: usize) -> AliceRow {
        let n = self.n();
        let k = self.k;
        let f = self.f;
        let alice = digits(index, k, n);
        let mut value = 2 * f.constant;
        for i in 0..n {
            value += f.alice[i] * self.marg[alice[i]];
        }
        let mut bob_best = Vec::with_capacity(n);
        for j in 0..n {
            let mut best = i64::MIN;
            let mut arg = Vec::new();
            for b in 0..k {
                let mut v = f.bob[j] * self.marg[b];
                for i in 0..n {
                    let c = f.joint[i][j];
                    if c != 0 {
                        v += c * self.joint[alice[i] * k + b];
                    }
                }
                if v > best {
                    best = v;
                    arg.clear();
                    arg.push(b);
                } else if v == best {
                    arg.push(b);
                }
            }
            value += best;
            bob_best.push(arg);
        }
        AliceRow {
            alice,
            value_half: value,
            bob_best,
        }
    }

    /// Maximum in half units with the lexicographically first witness.
    pub fn maximize(&self) -> (i64, Vec<usize>, Vec<usize>) {
        let (value, index) = (0..self.n_alice_vectors())
            .into_par_iter()
            .map(|a| (self.alice_row(a).value_half, a))
            .reduce(
                || (i64::MIN, usize::MAX),
                |x, y| {
                    if x.0 > y.0 || (x.0 == y.0 && x.1 < y.1) {
                        x
                    } else {
                        y
                    }
                },
            );
        let row = self.alice_row(index);
        let bob = row.bob_best.iter().map(|a| a[0]).collect();
        (value, row.alice, bob)
    }

    /// Alice rows attaining `target_half`, in lexicographic order.
    pub fn rows_at(&self, target_half: i64) -> Vec<AliceRow> {
        (0..self.n_alice_vectors())
            .into_par_iter()
            .filter_map(|a| {
                let row = self.alice_row(a);
                (row.value_half == target_half).then_some(row)
            })
            .collect()
    }

    pub fn strategy(&self, alice: &[usize], bob: &[usize]) -> WiringStrategy {
        WiringStrategy {
            machine: self.machine.cloned(),
            alice: party(alice),
            bob: party(bob),
        }
    }

    /// Calls `visit` with the choice codes of every strategy attaining
    /// `target_half`, in lexicographic order. Stops when `visit` returns false.
    pub fn for_each_at(&self, target_half: i64, mut visit: impl FnMut(&[usize], &[usize]) -> bool) {
        for row in self.rows_at(target_half) {
            let n = row.bob_best.len();
            let mut pos = vec![0usize; n];
            'odometer: loop {
                let bob: Vec<usize> = (0..n).map(|j| row.bob_best[j][pos[j]]).collect();
                if !visit(&row.alice, &bob) {
                    return;
                }
                for j in (0..n).rev() {
                    pos[j] += 1;
                    if pos[j] < row.bob_best[j].len() {
                        continue 'odometer;
                    }
                    pos[j] = 0;
                }
                break;
            }
        }
    }
}

/// Exact maximum of `f` over all strategies with at most one use of
/// `machine`.
pub fn max_over_one_machine(f: &BellFunctional, machine: &MachineSpec) -> Result<OneMachineMax> {
    max_over_class(f, Some(machine), DEFAULT_COLLECTION_CAP)
}

/// Same as [`max_over_one_machine`]; `None` restricts to local deterministic
/// strategies.
pub fn max_over_class(
    f: &BellFunctional,
    machine: Option<&MachineSpec>,
    collection_cap: usize,
) -> Result<OneMachineMax> {
    let search = OneMachineSearch::new(f, machine);
    let (value_half, alice, bob) = search.maximize();
    let mut saturating = Vec::new();
    let mut total: u128 = 0;
    for row in search.rows_at(value_half) {
        total += row
            .bob_best
            .iter()
            .map(|a| a.len() as u128)
            .product::<u128>();
    }
    search.for_each_at(value_half, |a, b| {
        if saturating.len() >= collection_cap {
            return false;
        }
        saturating.push(search.strategy(a, b));
        true
    });
    Ok(OneMachineMax {
        value: Rational::new(value_half, 2),
        witness: search.strategy(&alice, &bob),
        saturating,
        saturating_total: total,
    })
}

/// Maximum of `f` over the `4^N` local deterministic points.
pub fn local_max(f: &BellFunctional) -> Rational {
    let search = OneMachineSearch::new(f, None);
    Rational::new(search.maximize().0, 2)
}
