//! Scenarios and no-signaling behaviors in Collins-Gisin coordinates.
//!
//! A behavior is stored as its outcome-0 marginals for both parties plus the
//! joint outcome-(0,0) probabilities. The full table `P(a, b | x, y)` is
//! recovered as
//!
//! ```text
//! P(0,0) = J          P(0,1) = A - J
//! P(1,0) = B - J      P(1,1) = 1 - A - B + J
//! ```
//!
//! so no-signaling holds by construction. Positivity is not enforced when a
//! point is built; call [`BehaviorPoint::validate`].

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{format_float, format_rational, parse_rational, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Scenario {
    n: usize,
}

impl Scenario {
    pub const MIN_SETTINGS: usize = 2;

    pub fn new(n_settings: usize) -> Result<Self> {
        if n_settings < Self::MIN_SETTINGS {
            return Err(Error::TooFewSettings {
                min: Self::MIN_SETTINGS,
                got: n_settings,
            });
        }
        Ok(Self { n: n_settings })
    }

    pub fn n_settings(&self) -> usize {
        self.n
    }

    pub fn n_outcomes(&self) -> usize {
        2
    }

    /// Number of Collins-Gisin coordinates, `N(N+2)`.
    pub fn dimension(&self) -> usize {
        self.n * (self.n + 2)
    }

    pub(crate) fn ensure_same(&self, other: &Scenario) -> Result<()> {
        if self != other {
            return Err(Error::ScenarioMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }
}

/// One reconstructed probability that left `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub alice_setting: usize,
    pub bob_setting: usize,
    pub alice_outcome: u8,
    pub bob_outcome: u8,
}

impl Violation {
    pub fn as_tuple(&self) -> (usize, usize, u8, u8) {
        (
            self.alice_setting,
            self.bob_setting,
            self.alice_outcome,
            self.bob_outcome,
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize, ra: u8, rb: u8) -> bool {
        self.violations
            .iter()
            .any(|v| v.as_tuple() == (i, j, ra, rb))
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| {
                format!(
                    "P({},{}|A{},B{})",
                    v.alice_outcome, v.bob_outcome, v.alice_setting, v.bob_setting
                )
            })
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// A no-signaling behavior. `joint[i][j]` is `P(r_A=0, r_B=0 | A_i, B_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BehaviorPoint<S> {
    pub scenario: Scenario,
    pub alice: Vec<S>,
    pub bob: Vec<S>,
    pub joint: Vec<Vec<S>>,
}

pub type ExactPoint = BehaviorPoint<Rational>;

impl<S: Scalar> BehaviorPoint<S> {
    pub fn new(scenario: Scenario, alice: Vec<S>, bob: Vec<S>, joint: Vec<Vec<S>>) -> Result<Self> {
        let p = Self {
            scenario,
            alice,
            bob,
            joint,
        };
        p.check_shape()?;
        Ok(p)
    }

    pub fn zeros(scenario: Scenario) -> Self {
        let n = scenario.n_settings();
        Self {
            scenario,
            alice: vec![S::zero(); n],
            bob: vec![S::zero(); n],
            joint: vec![vec![S::zero(); n]; n],
        }
    }

    pub fn check_shape(&self) -> Result<()> {
        let n = self.scenario.n_settings();
        if self.alice.len() != n || self.bob.len() != n {
            return Err(Error::Dimension(format!(
                "marginals have lengths {}/{}, expected {n}",
                self.alice.len(),
                self.bob.len()
            )));
        }
        if self.joint.len() != n || self.joint.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("joint block is not {n}x{n}")));
        }
        Ok(())
    }

    /// The reconstructed `P(ra, rb | A_i, B_j)`.
    pub fn prob(&self, i: usize, j: usize, ra: u8, rb: u8) -> S {
        let a = &self.alice[i];
        let b = &self.bob[j];
        let jt = &self.joint[i][j];
        match (ra, rb) {
            (0, 0) => jt.clone(),
            (0, 1) => a.clone() - jt.clone(),
            (1, 0) => b.clone() - jt.clone(),
            _ => S::one() - a.clone() - b.clone() + jt.clone(),
        }
    }

    pub fn validate(&self) -> Result<ValidityReport> {
        self.validate_with_slack(&S::zero())
    }

    /// Positivity check allowing each probability to leave `[0, 1]` by at most
    /// `slack`. The exact backend always uses zero slack.
    pub fn validate_with_slack(&self, slack: &S) -> Result<ValidityReport> {
        self.check_shape()?;
        let n = self.scenario.n_settings();
        let lo = -slack.clone();
        let hi = S::one() + slack.clone();
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (ra, rb) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    let p = self.prob(i, j, ra, rb);
                    if p < lo || p > hi {
                        violations.push(Violation {
                            alice_setting: i,
                            bob_setting: j,
                            alice_outcome: ra,
                            bob_outcome: rb,
                        });
                    }
                }
            }
        }
        Ok(ValidityReport { violations })
    }

    pub fn is_valid(&self) -> bool {
        self.validate().map(|r| r.is_valid()).unwrap_or(false)
    }

    pub fn reconstruct_full(&self) -> Result<FullTable<S>> {
        let report = self.validate()?;
        if !report.is_valid() {
            return Err(Error::Invalid(report));
        }
        Ok(self.full_table_unchecked())
    }

    /// Full table without the positivity check; used by the symmetry action,
    /// which must also move coefficient tables and non-physical points.
    pub(crate) fn full_table_unchecked(&self) -> FullTable<S> {
        let n = self.scenario.n_settings();
        let mut probs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                probs.push([
                    [self.prob(i, j, 0, 0), self.prob(i, j, 0, 1)],
                    [self.prob(i, j, 1, 0), self.prob(i, j, 1, 1)],
                ]);
            }
        }
        FullTable {
            scenario: self.scenario,
            probs,
        }
    }

    /// Coordinates flattened as `alice ++ bob ++ joint (row-major in i)`.
    pub fn coordinates(&self) -> Vec<S> {
        let mut out = Vec::with_capacity(self.scenario.dimension());
        out.extend(self.alice.iter().cloned());
        out.extend(self.bob.iter().cloned());
        for row in &self.joint {
            out.extend(row.iter().cloned());
        }
        out
    }

    pub fn from_coordinates(scenario: Scenario, coords: &[S]) -> Result<Self> {
        let n = scenario.n_settings();
        if coords.len() != scenario.dimension() {
            return Err(Error::Dimension(format!(
                "{} coordinates given, expected {}",
                coords.len(),
                scenario.dimension()
            )));
        }
        let alice = coords[..n].to_vec();
        let bob = coords[n..2 * n].to_vec();
        let joint = coords[2 * n..].chunks(n).map(|c| c.to_vec()).collect();
        Self::new(scenario, alice, bob, joint)
    }

    /// True when every coordinate is 0 or 1.
    pub fn is_deterministic(&self) -> bool {
        self.coordinates()
            .iter()
            .all(|c| *c == S::zero() || *c == S::one())
    }

    pub fn to_json(&self) -> Value
    where
        S: JsonScalar,
    {
        json!({
            "backend": S::BACKEND,
            "n": self.scenario.n_settings(),
            "alice": self.alice.iter().map(JsonScalar::to_value).collect::<Vec<_>>(),
            "bob": self.bob.iter().map(JsonScalar::to_value).collect::<Vec<_>>(),
            "joint": self
                .joint
                .iter()
                .map(|r| r.iter().map(JsonScalar::to_value).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }

    /// Renders the point with Alice's marginals as the column header and
    /// Bob's marginals as the row header.
    pub fn to_table(&self) -> String
    where
        S: JsonScalar,
    {
        let n = self.scenario.n_settings();
        let header: Vec<String> = self.alice.iter().map(JsonScalar::to_text).collect();
        let rows: Vec<(String, Vec<String>)> = (0..n)
            .map(|j| {
                (
                    self.bob[j].to_text(),
                    (0..n).map(|i| self.joint[i][j].to_text()).collect(),
                )
            })
            .collect();
        render_table(&header, &rows)
    }
}

pub(crate) fn render_table(header: &[String], rows: &[(String, Vec<String>)]) -> String {
    let width = header
        .iter()
        .chain(rows.iter().map(|(h, _)| h))
        .chain(rows.iter().flat_map(|(_, r)| r.iter()))
        .map(|s| s.len())
        .max()
        .unwrap_or(1);
    let cell = |s: &str| format!("{s:>width$}");
    let mut out = String::new();
    out.push_str(&cell(""));
    out.push_str(" |");
    for h in header {
        out.push(' ');
        out.push_str(&cell(h));
    }
    out.push('\n');
    out.push_str(&"-".repeat(width + 2 + header.len() * (width + 1)));
    out.push('\n');
    for (h, r) in rows {
        out.push_str(&cell(h));
        out.push_str(" |");
        for c in r {
            out.push(' ');
            out.push_str(&cell(c));
        }
        out.push('\n');
    }
    out
}

/// The full `4N^2` probability table. `probs[i * n + j][ra][rb]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullTable<S> {
    pub scenario: Scenario,
    pub probs: Vec<[[S; 2]; 2]>,
}

impl<S: Scalar> FullTable<S> {
    pub fn get(&self, i: usize, j: usize, ra: u8, rb: u8) -> &S {
        &self.probs[i * self.scenario.n_settings() + j][ra as usize][rb as usize]
    }

    pub(crate) fn zeros(scenario: Scenario) -> Self {
        let n = scenario.n_settings();
        let z = || [[S::zero(), S::zero()], [S::zero(), S::zero()]];
        Self {
            scenario,
            probs: (0..n * n).map(|_| z()).collect(),
        }
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, ra: u8, rb: u8, v: S) {
        let n = self.scenario.n_settings();
        self.probs[i * n + j][ra as usize][rb as usize] = v;
    }

    /// Back to Collins-Gisin coordinates. Marginals are read off the first
    /// setting of the other party; for a no-signaling table every choice agrees.
    pub fn compress(&self) -> BehaviorPoint<S> {
        let n = self.scenario.n_settings();
        let mut p = BehaviorPoint::zeros(self.scenario);
        for i in 0..n {
            p.alice[i] = self.get(i, 0, 0, 0).clone() + self.get(i, 0, 0, 1).clone();
        }
        for j in 0..n {
            p.bob[j] = self.get(0, j, 0, 0).clone() + self.get(0, j, 1, 0).clone();
        }
        for i in 0..n {
            for j in 0..n {
                p.joint[i][j] = self.get(i, j, 0, 0).clone();
            }
        }
        p
    }
}

/// Coordinate-wise convex combination of points sharing one scenario.
pub fn convex_combine<S: Scalar>(
    points: &[BehaviorPoint<S>],
    weights: &[S],
) -> Result<BehaviorPoint<S>> {
    if points.is_empty() || points.len() != weights.len() {
        return Err(Error::Dimension(format!(
            "{} points but {} weights",
            points.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| *w < S::zero()) {
        return Err(Error::BadWeights);
    }
    let total = weights.iter().cloned().fold(S::zero(), |a, b| a + b);
    if total != S::one() {
        return Err(Error::BadWeights);
    }
    let scenario = points[0].scenario;
    let mut acc = vec![S::zero(); scenario.dimension()];
    for (p, w) in points.iter().zip(weights) {
        scenario.ensure_same(&p.scenario)?;
        p.check_shape()?;
        for (a, c) in acc.iter_mut().zip(p.coordinates()) {
            *a = a.clone() + w.clone() * c;
        }
    }
    BehaviorPoint::from_coordinates(scenario, &acc)
}

/// Scalars that know their JSON and text encodings.
pub trait JsonScalar: Scalar {
    fn to_value(&self) -> Value;
    fn from_value(v: &Value) -> Result<Self>;
    fn to_text(&self) -> String;
}

impl JsonScalar for Rational {
    fn to_value(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_value(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n
                .as_i64()
                .map(Rational::from_integer)
                .ok_or_else(|| Error::Parse(format!("non-integer number {n} in exact document"))),
            other => Err(Error::Parse(format!("expected rational, got {other}"))),
        }
    }

    fn to_text(&self) -> String {
        format_rational(self)
    }
}

impl JsonScalar for f64 {
    fn to_value(&self) -> Value {
        json!(self)
    }

    fn from_value(v: &Value) -> Result<Self> {
        v.as_f64()
            .ok_or_else(|| Error::Parse(format!("expected number, got {v}")))
    }

    fn to_text(&self) -> String {
        format_float(*self)
    }
}

/// A behavior document of either backend.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyBehavior {
    Exact(BehaviorPoint<Rational>),
    Float(BehaviorPoint<f64>),
}

#[derive(Deserialize)]
struct RawBehavior {
    #[serde(default = "default_backend")]
    backend: String,
    n: usize,
    alice: Vec<Value>,
    bob: Vec<Value>,
    joint: Vec<Vec<Value>>,
}

fn default_backend() -> String {
    "exact".to_string()
}

fn decode<S: JsonScalar>(raw: &RawBehavior) -> Result<BehaviorPoint<S>> {
    let scenario = Scenario::new(raw.n)?;
    let conv = |v: &[Value]| v.iter().map(S::from_value).collect::<Result<Vec<S>>>();
    let joint = raw
        .joint
        .iter()
        .map(|r| conv(r))
        .collect::<Result<Vec<_>>>()?;
    BehaviorPoint::new(scenario, conv(&raw.alice)?, conv(&raw.bob)?, joint)
}

impl AnyBehavior {
    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: RawBehavior = serde_json::from_value(v.clone())?;
        match raw.backend.as_str() {
            "exact" => Ok(Self::Exact(decode(&raw)?)),
            "float" => Ok(Self::Float(decode(&raw)?)),
            other => Err(Error::Parse(format!("unknown backend {other:?}"))),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> Value {
        match self {
            Self::Exact(p) => p.to_json(),
            Self::Float(p) => p.to_json(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::half;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    pub(crate) fn pr_box() -> ExactPoint {
        let h = half();
        BehaviorPoint::new(
            Scenario::new(2).unwrap(),
            vec![h, h],
            vec![h, h],
            vec![vec![h, h], vec![h, r(0, 1)]],
        )
        .unwrap()
    }

    #[test]
    fn scenario_dimension() {
        assert_eq!(Scenario::new(2).unwrap().dimension(), 8);
        assert_eq!(Scenario::new(3).unwrap().dimension(), 15);
        assert!(matches!(
            Scenario::new(1),
            Err(Error::TooFewSettings { .. })
        ));
    }

    #[test]
    fn pr_box_is_valid() {
        assert!(pr_box().validate().unwrap().is_valid());
    }

    #[test]
    fn all_zero_point_is_valid() {
        let p = ExactPoint::zeros(Scenario::new(3).unwrap());
        assert!(p.validate().unwrap().is_valid());
    }

    #[test]
    fn joint_above_marginal_is_reported() {
        let mut p = pr_box();
        p.joint[0][0] = r(1, 1);
        let report = p.validate().unwrap();
        assert!(report.contains(0, 0, 0, 1));
        assert!(report.contains(0, 0, 1, 0));
        assert!(!report.contains(0, 0, 1, 1));
        assert!(matches!(p.reconstruct_full(), Err(Error::Invalid(_))));
    }

    #[test]
    fn shape_errors_are_structural() {
        let mut p = pr_box();
        p.joint.pop();
        assert!(matches!(p.validate(), Err(Error::Dimension(_))));
        let s = Scenario::new(2).unwrap();
        assert!(BehaviorPoint::<Rational>::new(s, vec![], vec![], vec![]).is_err());
    }

    #[test]
    fn reconstruct_pr_box_anticorrelated_pair() {
        let t = pr_box().reconstruct_full().unwrap();
        assert_eq!(*t.get(1, 1, 0, 0), r(0, 1));
        assert_eq!(*t.get(1, 1, 0, 1), half());
        assert_eq!(*t.get(1, 1, 1, 0), half());
        assert_eq!(*t.get(1, 1, 1, 1), r(0, 1));
    }

    #[test]
    fn reconstruct_deterministic_example() {
        // Alice outputs (0, 1), Bob outputs (0, 0).
        let one = r(1, 1);
        let zero = r(0, 1);
        let p = BehaviorPoint::new(
            Scenario::new(2).unwrap(),
            vec![one, zero],
            vec![one, one],
            vec![vec![one, one], vec![zero, zero]],
        )
        .unwrap();
        let t = p.reconstruct_full().unwrap();
        assert_eq!(*t.get(0, 0, 0, 0), one);
        assert_eq!(*t.get(1, 0, 1, 0), one);
    }

    #[test]
    fn uniform_point_has_quarter_entries() {
        let q = r(1, 4);
        let h = half();
        let s = Scenario::new(3).unwrap();
        let p = BehaviorPoint::new(s, vec![h; 3], vec![h; 3], vec![vec![q; 3]; 3]).unwrap();
        let t = p.reconstruct_full().unwrap();
        assert!(t.probs.iter().flatten().flatten().all(|x| *x == q));
        assert_eq!(t.compress(), p);
    }

    #[test]
    fn combine_is_idempotent_and_averages() {
        let pr = pr_box();
        let c = convex_combine(&[pr.clone(), pr.clone()], &[half(), half()]).unwrap();
        assert_eq!(c, pr);

        let s = Scenario::new(3).unwrap();
        let l0 = ExactPoint::zeros(s);
        let one = r(1, 1);
        let l1 = BehaviorPoint::new(s, vec![one; 3], vec![one; 3], vec![vec![one; 3]; 3]).unwrap();
        let m = convex_combine(&[l0, l1], &[half(), half()]).unwrap();
        assert!(m.coordinates().iter().all(|c| *c == half()));
        assert!(m.is_valid());
    }

    #[test]
    fn combine_rejects_bad_weights() {
        let pr = pr_box();
        assert!(matches!(
            convex_combine(&[pr.clone(), pr.clone()], &[half(), r(1, 3)]),
            Err(Error::BadWeights)
        ));
        assert!(matches!(
            convex_combine(&[pr.clone(), pr], &[r(3, 2), r(-1, 2)]),
            Err(Error::BadWeights)
        ));
    }

    #[test]
    fn json_round_trip_both_backends() {
        let pr = pr_box();
        let doc = pr.to_json();
        assert_eq!(doc["backend"], "exact");
        assert_eq!(doc["joint"][1][1], "0");
        assert_eq!(doc["alice"][0], "1/2");
        assert_eq!(
            AnyBehavior::from_json(&doc).unwrap(),
            AnyBehavior::Exact(pr)
        );

        let f = BehaviorPoint::new(
            Scenario::new(2).unwrap(),
            vec![0.5, 0.5],
            vec![0.5, 0.5],
            vec![vec![0.25, 0.25], vec![0.25, 0.25]],
        )
        .unwrap();
        let doc = f.to_json();
        assert_eq!(doc["backend"], "float");
        assert_eq!(AnyBehavior::from_json(&doc).unwrap(), AnyBehavior::Float(f));
    }

    #[test]
    fn table_uses_alice_columns() {
        let t = pr_box().to_table();
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[0].contains("1/2"));
        assert!(lines[3].trim_end().ends_with('0'));
    }
}
