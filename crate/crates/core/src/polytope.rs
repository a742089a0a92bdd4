//! Facet certificates, vertex enumeration of the three-setting no-signaling
//! polytope, and the property checks built on top of them.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::behavior::{convex_combine, BehaviorPoint, ExactPoint, Scenario};
use crate::error::{Error, Result};
use crate::functional::{chsh, make_c1, make_c2, make_inn22, make_mnn22, BellFunctional};
use crate::linalg::{rank_i64, ModularBasis};
use crate::machine::{machine_behavior, MachineSpec};
use crate::scalar::Rational;
use crate::strategy::{
    alphabet_size, enumerate_local, half_to_point, strategy_half, Choice, OneMachineSearch,
    PartyChoice, WiringStrategy,
};
use crate::symmetry::{orbit, transform_point, SymmetryElement};

/// Strategies a certificate ranges over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StrategyClass {
    Local,
    OneMachine(MachineSpec),
}

impl StrategyClass {
    pub fn machine(&self) -> Option<&MachineSpec> {
        match self {
            StrategyClass::Local => None,
            StrategyClass::OneMachine(m) => Some(m),
        }
    }
}

impl fmt::Display for StrategyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyClass::Local => write!(f, "local"),
            StrategyClass::OneMachine(m) => write!(
                f,
                "one machine ({} inputs, anticorrelated on {:?})",
                m.n_inputs,
                m.anticorrelated()
            ),
        }
    }
}

/// Default number of distinct saturating points stored in a certificate.
pub const DEFAULT_POINT_CAP: usize = 4096;

#[derive(Clone, Debug)]
pub struct FacetCertificate {
    pub functional: BellFunctional,
    pub strategy_class: StrategyClass,
    pub max_value: Rational,
    pub witness: WiringStrategy,
    /// Distinct saturating behaviors, truncated at the point cap.
    pub saturating_points: Vec<ExactPoint>,
    /// Number of distinct saturating behaviors.
    pub saturating_point_count: usize,
    /// Distinct saturating behaviors with all coordinates in {0, 1}.
    pub deterministic_count: usize,
    pub affine_rank: usize,
}

impl FacetCertificate {
    pub fn dimension(&self) -> usize {
        self.functional.scenario.dimension()
    }

    pub fn accepted(&self) -> bool {
        self.max_value == Rational::from_integer(0) && self.affine_rank + 1 == self.dimension()
    }

    pub fn non_deterministic_count(&self) -> usize {
        self.saturating_point_count - self.deterministic_count
    }

    pub fn to_json(&self) -> Value {
        json!({
            "functional": self.functional.to_json(),
            "class": self.strategy_class.to_string(),
            "max_value": self.max_value.to_string(),
            "witness": self.witness.to_json(),
            "saturating_points": self.saturating_point_count,
            "deterministic_saturating_points": self.deterministic_count,
            "affine_rank": self.affine_rank,
            "dimension": self.dimension(),
            "accepted": self.accepted(),
        })
    }
}

/// Computes the exact maximum of `f` over `class`, the distinct saturating
/// behaviors and the dimension of their affine hull.
pub fn verify_facet(f: &BellFunctional, class: &StrategyClass) -> Result<FacetCertificate> {
    verify_facet_with_cap(f, class, DEFAULT_POINT_CAP)
}

pub fn verify_facet_with_cap(
    f: &BellFunctional,
    class: &StrategyClass,
    point_cap: usize,
) -> Result<FacetCertificate> {
    let search = OneMachineSearch::new(f, class.machine());
    let (value_half, alice, bob) = search.maximize();
    let witness = search.strategy(&alice, &bob);

    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut ordered: Vec<Vec<u8>> = Vec::new();
    search.for_each_at(value_half, |a, b| {
        let half = strategy_half(&search.strategy(a, b));
        if seen.insert(half.clone()) {
            ordered.push(half);
        }
        true
    });

    let scenario = f.scenario;
    let deterministic_count = ordered.iter().filter(|h| h.iter().all(|&x| x != 1)).count();
    let affine_rank = affine_rank_half(&ordered);
    let saturating_points = ordered
        .iter()
        .take(point_cap)
        .map(|h| half_to_point(scenario, h))
        .collect();
    Ok(FacetCertificate {
        functional: f.clone(),
        strategy_class: class.clone(),
        max_value: Rational::new(value_half, 2),
        witness,
        saturating_points,
        saturating_point_count: ordered.len(),
        deterministic_count,
        affine_rank,
    })
}

/// Affine rank of points given in half units. A modular pass picks rows that
/// are certainly independent; if they already span `dim - 1` directions (the
/// most points on a hyperplane can span) that is the exact answer, otherwise
/// the full difference matrix is eliminated exactly.
fn affine_rank_half(points: &[Vec<u8>]) -> usize {
    let Some(base) = points.first() else { return 0 };
    let diffs: Vec<Vec<i64>> = points[1..]
        .iter()
        .map(|p| {
            p.iter()
                .zip(base)
                .map(|(&x, &y)| x as i64 - y as i64)
                .collect()
        })
        .collect();
    let dim = base.len();
    let mut basis = ModularBasis::new();
    for d in &diffs {
        basis.insert(d);
        if basis.rank() + 1 >= dim {
            break;
        }
    }
    let lower = rank_i64(basis.kept());
    if lower + 1 >= dim {
        lower
    } else {
        rank_i64(&diffs)
    }
}

fn det_point(scenario: Scenario, alice: &[u8], bob: &[u8]) -> ExactPoint {
    let r = |b: u8| Rational::from_integer(b as i64);
    let n = scenario.n_settings();
    let joint = (0..n)
        .map(|i| (0..n).map(|j| r(alice[i] & bob[j])).collect())
        .collect();
    BehaviorPoint::new(
        scenario,
        alice.iter().map(|&b| r(b)).collect(),
        bob.iter().map(|&b| r(b)).collect(),
        joint,
    )
    .expect("shape")
}

/// The `2^N` deterministic points on the `M_NN22 = 0` hyperplane obtained by
/// extending the eight three-setting saturators one setting at a time. Each
/// point is fixed by its outcome-0 marginals, and every step yields two
/// `(N+1)`-setting points per `N`-setting one.
pub fn deterministic_saturators_mnn22(n: usize) -> Result<Vec<ExactPoint>> {
    if n < 3 {
        return Err(Error::TooFewSettings { min: 3, got: n });
    }
    let mut current: Vec<(Vec<u8>, Vec<u8>)> = vec![
        (vec![0, 1, 1], vec![1, 0, 0]),
        (vec![0, 1, 1], vec![0, 0, 0]),
        (vec![0, 1, 0], vec![0, 1, 0]),
        (vec![0, 1, 0], vec![0, 0, 0]),
        (vec![0, 0, 1], vec![0, 0, 1]),
        (vec![0, 0, 1], vec![0, 0, 0]),
        (vec![0, 0, 0], vec![0, 0, 1]),
        (vec![0, 0, 0], vec![0, 0, 0]),
    ];
    for _ in 3..n {
        let mut next = Vec::with_capacity(2 * current.len());
        for (a, b) in &current {
            // New Alice setting with marginal 0, new Bob setting in front.
            let mut a1 = a.clone();
            a1.push(0);
            let mut b1 = vec![0];
            b1.extend_from_slice(b);
            next.push((a1, b1));
            // New Alice setting with marginal 1. The new Bob setting goes at
            // the end only when Bob's 0-output setting is B_0; otherwise it
            // goes in front as above, so the staircase row stays aligned.
            let mut a2 = a.clone();
            a2.push(1);
            let b2 = if b[0] == 1 {
                let mut b2 = b.clone();
                b2.push(0);
                b2
            } else {
                let mut b2 = vec![0];
                b2.extend_from_slice(b);
                b2
            };
            next.push((a2, b2));
        }
        current = next;
    }
    let scenario = Scenario::new(n)?;
    Ok(current
        .iter()
        .map(|(a, b)| det_point(scenario, a, b))
        .collect())
}

/// Non-local vertex classes of the three-setting no-signaling polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexLabel {
    S1,
    S2,
    S3,
    S4,
}

impl VertexLabel {
    pub const ALL: [VertexLabel; 4] = [
        VertexLabel::S1,
        VertexLabel::S2,
        VertexLabel::S3,
        VertexLabel::S4,
    ];
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug)]
pub struct VertexClass {
    pub label: VertexLabel,
    pub representative: ExactPoint,
    pub member_count: usize,
    pub chsh_violations: usize,
    pub i3322_violations: usize,
}

/// The 648 non-trivial facets of the three-setting local polytope, as the
/// CHSH orbit followed by the `I_3322` orbit.
pub fn facets_n3() -> (Vec<BellFunctional>, Vec<BellFunctional>) {
    let c = orbit(&chsh(3).expect("N=3"));
    let i = orbit(&make_inn22(3).expect("N=3"));
    (c, i)
}

/// True when the point is valid and satisfies every supplied facet. Only a
/// membership test for the local polytope when the list is complete, which is
/// known for `N <= 3`.
pub fn membership_by_facets(point: &ExactPoint, facets: &[BellFunctional]) -> Result<bool> {
    if !point.validate()?.is_valid() {
        return Ok(false);
    }
    for f in facets {
        if f.evaluate(point)? > Rational::from_integer(0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether a valid point is a vertex of the no-signaling polytope: the
/// positivity constraints tight at it must have full rank `N(N+2)`.
pub fn is_ns_vertex(point: &ExactPoint) -> Result<bool> {
    if !point.validate()?.is_valid() {
        return Ok(false);
    }
    let n = point.scenario.n_settings();
    let d = point.scenario.dimension();
    let zero = Rational::from_integer(0);
    let mut tight = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let ja = 2 * n + i * n + j;
            for (ra, rb) in [(0u8, 0u8), (0, 1), (1, 0), (1, 1)] {
                if point.prob(i, j, ra, rb) != zero {
                    continue;
                }
                let mut row = vec![0i64; d];
                match (ra, rb) {
                    (0, 0) => row[ja] = 1,
                    (0, 1) => {
                        row[i] = 1;
                        row[ja] = -1;
                    }
                    (1, 0) => {
                        row[n + j] = 1;
                        row[ja] = -1;
                    }
                    _ => {
                        row[i] = -1;
                        row[n + j] = -1;
                        row[ja] = 1;
                    }
                }
                tight.push(row);
            }
        }
    }
    Ok(rank_i64(&tight) == d)
}

/// Distinct behaviors of all strategies with one use of `machine` that violate
/// at least one of `facets`, sorted by coordinates.
pub fn enumerate_nonlocal_wirings(
    scenario: Scenario,
    machine: &MachineSpec,
    facets: &[BellFunctional],
) -> Result<Vec<ExactPoint>> {
    if facets.is_empty() {
        return Err(Error::Dimension("no facet inequalities supplied".into()));
    }
    for f in facets {
        scenario.ensure_same(&f.scenario)?;
    }
    let n = scenario.n_settings();
    let k = alphabet_size(machine.n_inputs);
    let per_party = k.pow(n as u32);
    let decode = |mut idx: usize| {
        let mut v = vec![Choice::Det(0); n];
        for slot in v.iter_mut().rev() {
            *slot = Choice::from_code(idx % k);
            idx /= k;
        }
        PartyChoice(v)
    };
    let distinct: HashSet<Vec<u8>> = (0..per_party)
        .into_par_iter()
        .fold(HashSet::new, |mut acc, a| {
            let alice = decode(a);
            for b in 0..per_party {
                let s = WiringStrategy {
                    machine: Some(machine.clone()),
                    alice: alice.clone(),
                    bob: decode(b),
                };
                acc.insert(strategy_half(&s));
            }
            acc
        })
        .reduce(HashSet::new, |mut x, y| {
            x.extend(y);
            x
        });
    let mut nonlocal: Vec<Vec<u8>> = distinct
        .into_par_iter()
        .filter(|h| facets.iter().any(|f| f.evaluate_half(h) > 0))
        .collect();
    nonlocal.sort();
    Ok(nonlocal
        .iter()
        .map(|h| half_to_point(scenario, h))
        .collect())
}

/// Assigns a three-setting non-local vertex to its class by table shape:
/// the number of deterministic marginals per party, and for points without
/// any, whether the correlation pattern needs a `PR_3` or only a PR-box.
pub fn classify_n3(point: &ExactPoint) -> Result<VertexLabel> {
    let n = point.scenario.n_settings();
    if n != 3 {
        return Err(Error::ScenarioMismatch {
            expected: 3,
            got: n,
        });
    }
    let h = crate::scalar::half();
    let det = |v: &[Rational]| v.iter().filter(|m| **m != h).count();
    match (det(&point.alice), det(&point.bob)) {
        (1, 1) => Ok(VertexLabel::S2),
        (1, 0) | (0, 1) => Ok(VertexLabel::S3),
        (0, 0) => {
            // Anticorrelation pattern modulo output flips: clear the first
            // row and column, then look at the GF(2) rank of what remains.
            let zero = Rational::from_integer(0);
            let mut m: Vec<Vec<u8>> = point
                .joint
                .iter()
                .map(|r| r.iter().map(|x| (*x == zero) as u8).collect())
                .collect();
            for row in m.iter_mut() {
                let f = row[0];
                row.iter_mut().for_each(|x| *x ^= f);
            }
            let first = m[0].clone();
            for row in m.iter_mut() {
                row.iter_mut().zip(&first).for_each(|(x, f)| *x ^= f);
            }
            match crate::machine::gf2_rank(&m) {
                2 => Ok(VertexLabel::S1),
                1 => Ok(VertexLabel::S4),
                r => Err(Error::Unclassified(format!("pattern rank {r}"))),
            }
        }
        (a, b) => Err(Error::Unclassified(format!(
            "{a} deterministic Alice and {b} deterministic Bob marginals"
        ))),
    }
}

/// All non-local vertices of the three-setting no-signaling polytope,
/// generated with one `PR_3` and labelled.
pub fn enumerate_ns_vertices_n3() -> Result<Vec<(ExactPoint, VertexLabel)>> {
    let (c, i) = facets_n3();
    let facets: Vec<BellFunctional> = c.into_iter().chain(i).collect();
    let scenario = Scenario::new(3)?;
    let points = enumerate_nonlocal_wirings(scenario, &MachineSpec::pr_n(3)?, &facets)?;
    points
        .into_iter()
        .map(|p| classify_n3(&p).map(|l| (p, l)))
        .collect()
}

/// Counts, for every vertex, the violated members of each facet orbit and
/// checks that the counts are constant within each class.
pub fn violation_census(
    vertices: &[(ExactPoint, VertexLabel)],
    chsh_orbit: &[BellFunctional],
    i3322_orbit: &[BellFunctional],
) -> Result<Vec<VertexClass>> {
    let zero = Rational::from_integer(0);
    let violated = |p: &ExactPoint, fs: &[BellFunctional]| -> Result<usize> {
        let mut c = 0;
        for f in fs {
            if f.evaluate(p)? > zero {
                c += 1;
            }
        }
        Ok(c)
    };
    let mut classes: BTreeMap<VertexLabel, VertexClass> = BTreeMap::new();
    for (p, label) in vertices {
        let ch = violated(p, chsh_orbit)?;
        let i3 = violated(p, i3322_orbit)?;
        match classes.get_mut(label) {
            None => {
                classes.insert(
                    *label,
                    VertexClass {
                        label: *label,
                        representative: p.clone(),
                        member_count: 1,
                        chsh_violations: ch,
                        i3322_violations: i3,
                    },
                );
            }
            Some(c) => {
                if c.chsh_violations != ch || c.i3322_violations != i3 {
                    return Err(Error::InconsistentClass {
                        class: label.to_string(),
                        detail: format!(
                            "({}, {}) vs ({ch}, {i3})",
                            c.chsh_violations, c.i3322_violations
                        ),
                    });
                }
                c.member_count += 1;
            }
        }
    }
    Ok(classes.into_values().collect())
}

pub fn census_json(classes: &[VertexClass]) -> Value {
    let total: usize = classes.iter().map(|c| c.member_count).sum();
    let mut map = serde_json::Map::new();
    for c in classes {
        map.insert(
            c.label.to_string(),
            json!({"count": c.member_count, "chsh": c.chsh_violations, "i3322": c.i3322_violations}),
        );
    }
    json!({"total": total, "classes": Value::Object(map)})
}

pub fn census_table(classes: &[VertexClass]) -> String {
    let mut s = String::from("Class  Count  CHSH  I3322\n");
    for c in classes {
        s.push_str(&format!(
            "{:<5}  {:>5}  {:>4}  {:>5}\n",
            c.label.to_string(),
            c.member_count,
            c.chsh_violations,
            c.i3322_violations
        ));
    }
    let total: usize = classes.iter().map(|c| c.member_count).sum();
    s.push_str(&format!("total  {total:>5}\n"));
    s
}

/// Vertex count of the two-setting no-signaling polytope: the local
/// deterministic points plus the distinct non-local PR-box wirings.
#[derive(Clone, Debug)]
pub struct TwoSettingCensus {
    pub local: Vec<ExactPoint>,
    pub nonlocal: Vec<ExactPoint>,
}

impl TwoSettingCensus {
    pub fn total(&self) -> usize {
        self.local.len() + self.nonlocal.len()
    }
}

pub fn ns_vertices_n2() -> Result<TwoSettingCensus> {
    let scenario = Scenario::new(2)?;
    let facets = orbit(&chsh(2)?);
    Ok(TwoSettingCensus {
        local: enumerate_local(scenario)?,
        nonlocal: enumerate_nonlocal_wirings(scenario, &MachineSpec::pr_box(), &facets)?,
    })
}

pub const DEFAULT_LEMMA_SEED: u64 = 0;

#[derive(Clone, Debug)]
pub struct Lemma1Report {
    pub n: usize,
    pub samples: usize,
    pub attempts: usize,
    pub counterexamples: Vec<ExactPoint>,
}

impl Lemma1Report {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "samples": self.samples,
            "attempts": self.attempts,
            "counterexamples": self.counterexamples.len(),
        })
    }
}

/// Draws `samples` valid behaviors violating `M_NN22` and checks that each
/// also violates `C_1^N` and `C_2^N`. Samples mix `PR_N`, a random local
/// vertex and a randomly relabelled one-`PR_N` wiring.
pub fn check_lemma1(n: usize, samples: usize, seed: u64) -> Result<Lemma1Report> {
    let report = sample_lemma1(n, samples, seed)?;
    if !report.counterexamples.is_empty() {
        return Err(Error::Lemma1Counterexample {
            n,
            count: report.counterexamples.len(),
        });
    }
    Ok(report)
}

/// [`check_lemma1`] without turning counterexamples into an error.
pub fn sample_lemma1(n: usize, samples: usize, seed: u64) -> Result<Lemma1Report> {
    let m = make_mnn22(n)?;
    let c1 = make_c1(n)?;
    let c2 = make_c2(n)?;
    let scenario = m.scenario;
    let machine = MachineSpec::pr_n(n)?;
    let pr = machine_behavior(&machine)?;
    let k = alphabet_size(machine.n_inputs);
    let zero = Rational::from_integer(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let max_attempts = samples.saturating_mul(100).max(1000);
    let mut accepted = 0;
    let mut attempts = 0;
    let mut counterexamples = Vec::new();
    while accepted < samples && attempts < max_attempts {
        attempts += 1;
        let local = {
            let a: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            let b: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            det_point(scenario, &a, &b)
        };
        let wiring = {
            let pick = |rng: &mut ChaCha8Rng| {
                PartyChoice(
                    (0..n)
                        .map(|_| Choice::from_code(rng.gen_range(0..k)))
                        .collect(),
                )
            };
            let s = WiringStrategy {
                machine: Some(machine.clone()),
                alice: pick(&mut rng),
                bob: pick(&mut rng),
            };
            let g = random_symmetry(n, &mut rng);
            transform_point(&half_to_point(scenario, &strategy_half(&s)), &g)?
        };
        let lambda = Rational::new(rng.gen_range(1..=64), 64);
        let rest = Rational::from_integer(1) - lambda;
        let t = Rational::new(rng.gen_range(0..=8), 8);
        let p = convex_combine(
            &[pr.clone(), local, wiring],
            &[lambda, rest * t, rest * (Rational::from_integer(1) - t)],
        )?;
        if m.evaluate(&p)? <= zero {
            continue;
        }
        accepted += 1;
        if c1.evaluate(&p)? <= zero || c2.evaluate(&p)? <= zero {
            counterexamples.push(p);
        }
    }
    Ok(Lemma1Report {
        n,
        samples: accepted,
        attempts,
        counterexamples,
    })
}

fn random_symmetry(n: usize, rng: &mut impl Rng) -> SymmetryElement {
    use rand::seq::SliceRandom;
    let mut g = SymmetryElement::identity(n);
    g.alice_perm.shuffle(rng);
    g.bob_perm.shuffle(rng);
    g.alice_flips.iter_mut().for_each(|f| *f = rng.gen());
    g.bob_flips.iter_mut().for_each(|f| *f = rng.gen());
    g.party_swap = rng.gen();
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::half;
    use crate::strategy::enumerate_local;

    #[test]
    fn deterministic_saturators_small() {
        let m = make_mnn22(3).unwrap();
        let pts = deterministic_saturators_mnn22(3).unwrap();
        assert_eq!(pts.len(), 8);
        let brute: Vec<ExactPoint> = enumerate_local(m.scenario)
            .unwrap()
            .into_iter()
            .filter(|p| m.evaluate(p).unwrap() == Rational::from_integer(0))
            .collect();
        let a: HashSet<_> = pts.iter().collect();
        let b: HashSet<_> = brute.iter().collect();
        assert_eq!(a, b, "the eight tables are exactly the local saturators");
    }

    #[test]
    fn deterministic_saturators_grow_by_doubling() {
        for n in 3..=6 {
            let m = make_mnn22(n).unwrap();
            let pts = deterministic_saturators_mnn22(n).unwrap();
            assert_eq!(pts.len(), 1 << n);
            let distinct: HashSet<_> = pts.iter().collect();
            assert_eq!(distinct.len(), 1 << n);
            for p in &pts {
                assert!(p.is_deterministic());
                assert_eq!(m.evaluate(p).unwrap(), Rational::from_integer(0));
            }
        }
        assert!(deterministic_saturators_mnn22(2).is_err());
    }

    #[test]
    fn membership_examples() {
        let pr = machine_behavior(&MachineSpec::pr_box()).unwrap();
        let facets = orbit(&chsh(2).unwrap());
        assert!(!membership_by_facets(&pr, &facets).unwrap());
        let locals = enumerate_local(Scenario::new(2).unwrap()).unwrap();
        let mix = convex_combine(&locals[..4], &[Rational::new(1, 4); 4]).unwrap();
        assert!(membership_by_facets(&mix, &facets).unwrap());
    }

    #[test]
    fn ns_vertex_test() {
        let pr = machine_behavior(&MachineSpec::pr_box()).unwrap();
        assert!(is_ns_vertex(&pr).unwrap());
        for p in enumerate_local(Scenario::new(2).unwrap()).unwrap() {
            assert!(is_ns_vertex(&p).unwrap());
        }
        let h = half();
        let s = Scenario::new(2).unwrap();
        let uniform = BehaviorPoint::new(
            s,
            vec![h; 2],
            vec![h; 2],
            vec![vec![Rational::new(1, 4); 2]; 2],
        )
        .unwrap();
        assert!(!is_ns_vertex(&uniform).unwrap());
    }

    #[test]
    fn classify_templates() {
        let pr3 = machine_behavior(&MachineSpec::pr_n(3).unwrap()).unwrap();
        assert_eq!(classify_n3(&pr3).unwrap(), VertexLabel::S1);
        let pr_padded = machine_behavior(&MachineSpec::pr_box().padded(3).unwrap()).unwrap();
        assert_eq!(classify_n3(&pr_padded).unwrap(), VertexLabel::S4);
        // The example with one deterministic setting per party.
        let z = Rational::from_integer(0);
        let p = BehaviorPoint::new(
            Scenario::new(3).unwrap(),
            vec![half(), half(), z],
            vec![z, half(), half()],
            vec![vec![z, half(), half()], vec![z, half(), z], vec![z, z, z]],
        )
        .unwrap();
        assert_eq!(classify_n3(&p).unwrap(), VertexLabel::S2);
    }

    #[test]
    fn two_setting_census() {
        let c = ns_vertices_n2().unwrap();
        assert_eq!(c.local.len(), 16);
        assert_eq!(c.nonlocal.len(), 8);
        assert_eq!(c.total(), 24);
        assert!(c.nonlocal.iter().all(|p| is_ns_vertex(p).unwrap()));
    }

    #[test]
    fn pure_prn_violates_all_three() {
        for n in 3..=5 {
            let pr = machine_behavior(&MachineSpec::pr_n(n).unwrap()).unwrap();
            assert_eq!(make_mnn22(n).unwrap().evaluate(&pr).unwrap(), half());
            assert!(make_c1(n).unwrap().evaluate(&pr).unwrap() > Rational::from_integer(0));
            assert!(make_c2(n).unwrap().evaluate(&pr).unwrap() > Rational::from_integer(0));
        }
    }

    #[test]
    fn lemma_small_run() {
        let r = check_lemma1(3, 200, 7).unwrap();
        assert_eq!(r.samples, 200);
        assert!(r.counterexamples.is_empty());
    }

    #[test]
    fn chsh_certificate_two_settings() {
        let cert = verify_facet(&chsh(2).unwrap(), &StrategyClass::Local).unwrap();
        assert!(cert.accepted());
        assert_eq!(cert.affine_rank, 7);
        assert_eq!(cert.saturating_point_count, cert.deterministic_count);
    }

    #[test]
    fn violated_certificate_is_rejected() {
        let cert = verify_facet(
            &chsh(2).unwrap(),
            &StrategyClass::OneMachine(MachineSpec::pr_box()),
        )
        .unwrap();
        assert!(!cert.accepted());
        assert_eq!(cert.max_value, half());
        assert_eq!(
            chsh(2)
                .unwrap()
                .evaluate(&crate::strategy::strategy_behavior(&cert.witness).unwrap())
                .unwrap(),
            half()
        );
    }
}
