//! Two-qubit behaviors and see-saw maximization of Bell functionals over
//! projective qubit measurements.
//!
//! Measurements are unit Bloch vectors `n`; outcome 0 is the projector
//! `(I + n.sigma) / 2`. With one party's measurements fixed, the functional is
//! `sum_i tr(Pi_i O_i) + const`, so each setting of the other party is
//! optimized exactly by the top eigenvector of its 2x2 effective operator
//! `O_i`. Values returned are attained by explicit measurements and are lower
//! bounds on the quantum maximum for the given state; a non-positive result is
//! heuristic evidence only.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::behavior::{BehaviorPoint, Scenario};
use crate::error::{Error, Result};
use crate::functional::BellFunctional;
use crate::scalar::format_float;

pub const NORM_TOLERANCE: f64 = 1e-12;

/// Slack used when validating float behaviors.
pub const VALIDITY_SLACK: f64 = 1e-9;

type Mat2 = [[Complex64; 2]; 2];

pub type Bloch = [f64; 3];

/// Pure two-qubit state; amplitude index is `2a + b` for `|a b>`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitState {
    amplitudes: [Complex64; 4],
}

impl TwoQubitState {
    /// `cos(theta)|00> + sin(theta)|11>`; `theta = pi/4` is maximally
    /// entangled and `theta = 0` a product state.
    pub fn schmidt(theta: f64) -> Self {
        let c = Complex64::new(theta.cos(), 0.0);
        let s = Complex64::new(theta.sin(), 0.0);
        let z = Complex64::new(0.0, 0.0);
        Self {
            amplitudes: [c, z, z, s],
        }
    }

    pub fn maximally_entangled() -> Self {
        Self::schmidt(FRAC_PI_4)
    }

    pub fn from_amplitudes(amplitudes: [Complex64; 4]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(format!(
                "state has squared norm {norm}"
            )));
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }

    fn amp(&self, a: usize, b: usize) -> Complex64 {
        self.amplitudes[2 * a + b]
    }

    /// `<psi| A (x) B |psi>`.
    fn expectation(&self, a_op: &Mat2, b_op: &Mat2) -> f64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                let mut v = Complex64::new(0.0, 0.0);
                for a2 in 0..2 {
                    for b2 in 0..2 {
                        v += a_op[a][a2] * b_op[b][b2] * self.amp(a2, b2);
                    }
                }
                acc += self.amp(a, b).conj() * v;
            }
        }
        acc.re
    }

    /// `tr_B[(I (x) K) |psi><psi|]`.
    fn reduce_alice(&self, k: &Mat2) -> Mat2 {
        let mut o = [[Complex64::new(0.0, 0.0); 2]; 2];
        for a in 0..2 {
            for a2 in 0..2 {
                for b in 0..2 {
                    for b2 in 0..2 {
                        o[a][a2] += k[b][b2] * self.amp(a, b2) * self.amp(a2, b).conj();
                    }
                }
            }
        }
        o
    }

    /// `tr_A[(K (x) I) |psi><psi|]`.
    fn reduce_bob(&self, k: &Mat2) -> Mat2 {
        let mut o = [[Complex64::new(0.0, 0.0); 2]; 2];
        for b in 0..2 {
            for b2 in 0..2 {
                for a in 0..2 {
                    for a2 in 0..2 {
                        o[b][b2] += k[a][a2] * self.amp(a2, b) * self.amp(a, b2).conj();
                    }
                }
            }
        }
        o
    }
}

fn identity() -> Mat2 {
    let o = Complex64::new(1.0, 0.0);
    let z = Complex64::new(0.0, 0.0);
    [[o, z], [z, o]]
}

fn projector(n: &Bloch) -> Mat2 {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        [c((1.0 + n[2]) / 2.0, 0.0), c(n[0] / 2.0, -n[1] / 2.0)],
        [c(n[0] / 2.0, n[1] / 2.0), c((1.0 - n[2]) / 2.0, 0.0)],
    ]
}

fn add_scaled(acc: &mut Mat2, m: &Mat2, s: f64) {
    for r in 0..2 {
        for c in 0..2 {
            acc[r][c] += m[r][c] * s;
        }
    }
}

fn norm3(v: &Bloch) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Per-setting Bloch vectors for both parties.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    pub alice: Vec<Bloch>,
    pub bob: Vec<Bloch>,
}

impl MeasurementSet {
    pub fn new(alice: Vec<Bloch>, bob: Vec<Bloch>) -> Result<Self> {
        let m = Self { alice, bob };
        m.check()?;
        Ok(m)
    }

    fn check(&self) -> Result<()> {
        for v in self.alice.iter().chain(&self.bob) {
            if (norm3(v) - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::NotNormalized(format!(
                    "Bloch vector {v:?} has norm {}",
                    norm3(v)
                )));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({"alice": self.alice, "bob": self.bob})
    }
}

/// Born-rule behavior of `state` under the given measurements.
pub fn quantum_behavior(
    state: &TwoQubitState,
    meas: &MeasurementSet,
) -> Result<BehaviorPoint<f64>> {
    meas.check()?;
    let n = meas.alice.len();
    if meas.bob.len() != n {
        return Err(Error::Dimension(format!(
            "Alice has {n} settings, Bob has {}",
            meas.bob.len()
        )));
    }
    let norm: f64 = state.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotNormalized(format!(
            "state has squared norm {norm}"
        )));
    }
    let scenario = Scenario::new(n)?;
    let pa: Vec<Mat2> = meas.alice.iter().map(projector).collect();
    let pb: Vec<Mat2> = meas.bob.iter().map(projector).collect();
    let id = identity();
    let alice = pa.iter().map(|p| state.expectation(p, &id)).collect();
    let bob = pb.iter().map(|p| state.expectation(&id, p)).collect();
    let joint = pa
        .iter()
        .map(|a| pb.iter().map(|b| state.expectation(a, b)).collect())
        .collect();
    BehaviorPoint::new(scenario, alice, bob, joint)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlochDomain {
    Sphere,
    /// Bloch vectors restricted to the x-z great circle.
    XzPlane,
}

#[derive(Clone, Debug)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub domain: BlochDomain,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            max_iterations: 1000,
            tolerance: 1e-10,
            domain: BlochDomain::Sphere,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub value: f64,
    pub measurements: MeasurementSet,
    /// Whether the best run met the tolerance before the iteration cap.
    pub converged: bool,
    pub iterations: usize,
    /// Objective after every half-step of the best run.
    pub trace: Vec<f64>,
}

impl SeesawResult {
    pub fn to_json(&self) -> Value {
        json!({
            "value": format_float(self.value),
            "converged": self.converged,
            "iterations": self.iterations,
            "measurements": self.measurements.to_json(),
        })
    }
}

fn random_bloch(rng: &mut ChaCha8Rng, domain: BlochDomain) -> Bloch {
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    match domain {
        BlochDomain::XzPlane => [phi.cos(), 0.0, phi.sin()],
        BlochDomain::Sphere => {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let r = (1.0 - z * z).max(0.0).sqrt();
            [r * phi.cos(), r * phi.sin(), z]
        }
    }
}

/// Bloch vector of the top eigenvector of a Hermitian 2x2 operator, or
/// `None` when the operator is proportional to the identity.
fn top_direction(o: &Mat2, domain: BlochDomain) -> Option<Bloch> {
    let mut v = [o[1][0].re, o[1][0].im, (o[0][0].re - o[1][1].re) / 2.0];
    if domain == BlochDomain::XzPlane {
        v[1] = 0.0;
    }
    let r = norm3(&v);
    (r > 1e-15).then(|| [v[0] / r, v[1] / r, v[2] / r])
}

fn evaluate(f: &BellFunctional, state: &TwoQubitState, m: &MeasurementSet) -> f64 {
    f.evaluate_unchecked(&quantum_behavior(state, m).expect("unit vectors"))
}

fn seesaw_run(
    f: &BellFunctional,
    state: &TwoQubitState,
    opts: &SeesawOptions,
    seed: u64,
) -> SeesawResult {
    let n = f.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = MeasurementSet {
        alice: (0..n)
            .map(|_| random_bloch(&mut rng, opts.domain))
            .collect(),
        bob: (0..n)
            .map(|_| random_bloch(&mut rng, opts.domain))
            .collect(),
    };
    let mut value = evaluate(f, state, &m);
    let mut trace = vec![value];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let before = value;

        let pb: Vec<Mat2> = m.bob.iter().map(projector).collect();
        for i in 0..n {
            let mut k = identity();
            k.iter_mut().flatten().for_each(|x| *x *= f.alice[i] as f64);
            for (j, p) in pb.iter().enumerate() {
                add_scaled(&mut k, p, f.joint[i][j] as f64);
            }
            if let Some(v) = top_direction(&state.reduce_alice(&k), opts.domain) {
                m.alice[i] = v;
            }
        }
        value = evaluate(f, state, &m);
        trace.push(value);

        let pa: Vec<Mat2> = m.alice.iter().map(projector).collect();
        for j in 0..n {
            let mut k = identity();
            k.iter_mut().flatten().for_each(|x| *x *= f.bob[j] as f64);
            for (i, p) in pa.iter().enumerate() {
                add_scaled(&mut k, p, f.joint[i][j] as f64);
            }
            if let Some(v) = top_direction(&state.reduce_bob(&k), opts.domain) {
                m.bob[j] = v;
            }
        }
        value = evaluate(f, state, &m);
        trace.push(value);

        if (value - before).abs() < opts.tolerance {
            converged = true;
            break;
        }
    }
    SeesawResult {
        value,
        measurements: m,
        converged,
        iterations,
        trace,
    }
}

/// Best see-saw value over `opts.restarts` random starts. Restart `r` is
/// seeded with `opts.seed + r`, so results do not depend on scheduling.
pub fn seesaw_maximize(
    f: &BellFunctional,
    state: &TwoQubitState,
    opts: &SeesawOptions,
) -> Result<SeesawResult> {
    if opts.restarts == 0 {
        return Err(Error::Parse("at least one restart is required".into()));
    }
    let runs: Vec<SeesawResult> = (0..opts.restarts)
        .into_par_iter()
        .map(|r| seesaw_run(f, state, opts, opts.seed.wrapping_add(r as u64)))
        .collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("non-empty");
    Ok(best)
}

#[derive(Clone, Debug)]
pub struct SweepCurve {
    pub points: Vec<(f64, f64)>,
    pub argmax: (f64, f64),
}

impl SweepCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("theta,value\n");
        for (t, v) in &self.points {
            s.push_str(&format!("{},{}\n", format_float(*t), format_float(*v)));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        json!({
            "points": self
                .points
                .iter()
                .map(|(t, v)| json!({"theta": t, "value": v}))
                .collect::<Vec<_>>(),
            "argmax": {"theta": self.argmax.0, "value": self.argmax.1},
        })
    }
}

/// See-saw maximum on an evenly spaced grid of Schmidt angles in `[0, pi/4]`.
pub fn theta_sweep(f: &BellFunctional, grid: usize, opts: &SeesawOptions) -> Result<SweepCurve> {
    if grid < 2 {
        return Err(Error::Parse(format!(
            "sweep grid needs at least 2 points, got {grid}"
        )));
    }
    let points: Vec<(f64, f64)> = (0..grid)
        .into_par_iter()
        .map(|k| {
            let theta = FRAC_PI_4 * k as f64 / (grid - 1) as f64;
            let r = seesaw_maximize(f, &TwoQubitState::schmidt(theta), opts)?;
            Ok((theta, r.value))
        })
        .collect::<Result<_>>()?;
    let argmax =
        points.iter().copied().fold(
            (0.0, f64::NEG_INFINITY),
            |a, b| if b.1 > a.1 { b } else { a },
        );
    Ok(SweepCurve { points, argmax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{chsh, make_inn22};

    const TSIRELSON_CHSH: f64 = std::f64::consts::FRAC_1_SQRT_2 - 0.5;

    #[test]
    fn optimal_chsh_angles() {
        // A_0 = Z, A_1 = X; B at +-45 degrees in the x-z plane, flipped so the
        // table orientation of CHSH picks up the violation.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = MeasurementSet::new(
            vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]],
            vec![[s, 0.0, s], [-s, 0.0, s]],
        )
        .unwrap();
        let p = quantum_behavior(&TwoQubitState::maximally_entangled(), &m).unwrap();
        assert!(p.validate_with_slack(&VALIDITY_SLACK).unwrap().is_valid());
        let v = chsh(2).unwrap().evaluate(&p).unwrap();
        assert!((v - TSIRELSON_CHSH).abs() < 1e-12, "{v}");
    }

    #[test]
    fn computational_basis_born_rule() {
        let theta = 0.3f64;
        let z = [0.0, 0.0, 1.0];
        let m = MeasurementSet::new(vec![z, z], vec![z, z]).unwrap();
        let p = quantum_behavior(&TwoQubitState::schmidt(theta), &m).unwrap();
        assert!((p.joint[0][0] - theta.cos().powi(2)).abs() < 1e-15);
        assert!((p.alice[1] - theta.cos().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn product_state_gives_product_distribution() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = MeasurementSet {
            alice: (0..3)
                .map(|_| random_bloch(&mut rng, BlochDomain::Sphere))
                .collect(),
            bob: (0..3)
                .map(|_| random_bloch(&mut rng, BlochDomain::Sphere))
                .collect(),
        };
        let p = quantum_behavior(&TwoQubitState::schmidt(0.0), &m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((p.joint[i][j] - p.alice[i] * p.bob[j]).abs() < 1e-12);
            }
        }
        for f in [chsh(3).unwrap(), make_inn22(3).unwrap()] {
            assert!(f.evaluate(&p).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn rejects_unnormalized_inputs() {
        assert!(MeasurementSet::new(vec![[1.0, 1.0, 0.0]], vec![[1.0, 0.0, 0.0]]).is_err());
        let z = Complex64::new(0.0, 0.0);
        assert!(TwoQubitState::from_amplitudes([
            Complex64::new(1.0, 0.0),
            z,
            z,
            Complex64::new(1.0, 0.0)
        ])
        .is_err());
        let m = MeasurementSet::new(vec![[0.0, 0.0, 1.0]; 2], vec![[0.0, 0.0, 1.0]; 3]).unwrap();
        assert!(quantum_behavior(&TwoQubitState::schmidt(0.1), &m).is_err());
    }

    #[test]
    fn general_state_matches_schmidt_form() {
        let z = Complex64::new(0.0, 0.0);
        let st = TwoQubitState::from_amplitudes([
            Complex64::new(0.6, 0.0),
            z,
            z,
            Complex64::new(0.8, 0.0),
        ])
        .unwrap();
        let sch = TwoQubitState::schmidt(0.8f64.atan2(0.6));
        for (a, b) in st.amplitudes().iter().zip(sch.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn seesaw_is_monotone() {
        let f = make_inn22(3).unwrap();
        let r = seesaw_maximize(
            &f,
            &TwoQubitState::schmidt(0.5),
            &SeesawOptions {
                restarts: 4,
                ..Default::default()
            },
        )
        .unwrap();
        for w in r.trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn seesaw_reaches_tsirelson() {
        let r = seesaw_maximize(
            &chsh(2).unwrap(),
            &TwoQubitState::maximally_entangled(),
            &SeesawOptions::default(),
        )
        .unwrap();
        assert!((r.value - TSIRELSON_CHSH).abs() < 1e-6, "{}", r.value);
        assert!(r.converged);
    }

    #[test]
    fn sweep_needs_two_points() {
        assert!(theta_sweep(&chsh(2).unwrap(), 1, &SeesawOptions::default()).is_err());
    }
}
