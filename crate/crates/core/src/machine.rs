//! Non-local machines with uniform marginals, the inequality-to-machine
//! recipe, and non-adaptive wirings of PR-boxes.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::behavior::{BehaviorPoint, ExactPoint, Scenario};
use crate::error::{Error, Result};
use crate::functional::BellFunctional;
use crate::scalar::{half, Rational};

/// An `n`-input binary-output machine. Outputs satisfy `a xor b = 1` exactly on
/// the anticorrelated input pairs `(x, y)` and `a xor b = 0` elsewhere; both
/// marginals are uniform.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MachineSpec {
    pub n_inputs: usize,
    #[serde(rename = "anticorrelated")]
    anticorrelated: BTreeSet<(usize, usize)>,
}

impl MachineSpec {
    pub fn new(
        n_inputs: usize,
        anticorrelated: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let set: BTreeSet<_> = anticorrelated.into_iter().collect();
        if let Some(&(x, y)) = set.iter().find(|(x, y)| *x >= n_inputs || *y >= n_inputs) {
            return Err(Error::InputOutOfRange {
                input: x.max(y),
                n_inputs,
            });
        }
        Ok(Self {
            n_inputs,
            anticorrelated: set,
        })
    }

    /// The PR-box, `a xor b = x y`.
    pub fn pr_box() -> Self {
        Self::new(2, [(1, 1)]).expect("valid")
    }

    /// `PR_N`, anticorrelated on `(N-m, m)` for `m = 1..N-1`.
    pub fn pr_n(n: usize) -> Result<Self> {
        Scenario::new(n)?;
        Self::new(n, (1..n).map(|m| (n - m, m)))
    }

    pub fn anticorrelated(&self) -> &BTreeSet<(usize, usize)> {
        &self.anticorrelated
    }

    pub fn is_anticorrelated(&self, x: usize, y: usize) -> bool {
        self.anticorrelated.contains(&(x, y))
    }

    /// The same machine with extra inputs; every pair involving a new input is
    /// correlated.
    pub fn padded(&self, n_inputs: usize) -> Result<Self> {
        Self::new(
            n_inputs.max(self.n_inputs),
            self.anticorrelated.iter().copied(),
        )
    }

    pub fn parity_matrix(&self) -> Vec<Vec<u8>> {
        (0..self.n_inputs)
            .map(|x| {
                (0..self.n_inputs)
                    .map(|y| self.is_anticorrelated(x, y) as u8)
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("machine serializes")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let raw: MachineSpec = serde_json::from_value(v.clone())?;
        Self::new(raw.n_inputs, raw.anticorrelated)
    }
}

/// Reads a machine off an inequality: joint coefficient `-1` becomes an
/// anticorrelated pair, `0` and `+1` correlated ones.
pub fn recipe(f: &BellFunctional) -> Result<MachineSpec> {
    let n = f.n();
    let mut set = Vec::new();
    for i in 0..n {
        for j in 0..n {
            match f.joint[i][j] {
                -1 => set.push((i, j)),
                0 | 1 => {}
                value => {
                    return Err(Error::RecipeUndefined {
                        alice: i,
                        bob: j,
                        value,
                    })
                }
            }
        }
    }
    MachineSpec::new(n, set)
}

/// The behavior obtained by feeding setting `i` (resp. `j`) straight into the
/// machine.
pub fn machine_behavior(m: &MachineSpec) -> Result<ExactPoint> {
    let scenario = Scenario::new(m.n_inputs)?;
    let n = m.n_inputs;
    let h = half();
    let joint = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if m.is_anticorrelated(i, j) {
                        Rational::from_integer(0)
                    } else {
                        h
                    }
                })
                .collect()
        })
        .collect();
    BehaviorPoint::new(scenario, vec![h; n], vec![h; n], joint)
}

/// Checks a three-input machine against `floor(x y / 2) = a + b (mod 2)`.
pub fn pr3_formula_check(m: &MachineSpec) -> Result<bool> {
    if m.n_inputs != 3 {
        return Err(Error::Dimension(format!(
            "PR_3 check needs 3 inputs, machine has {}",
            m.n_inputs
        )));
    }
    let expected: BTreeSet<(usize, usize)> = (0..3)
        .flat_map(|x| (0..3).map(move |y| (x, y)))
        .filter(|&(x, y)| (x * y / 2) % 2 == 1)
        .collect();
    Ok(*m.anticorrelated() == expected)
}

/// Non-adaptive wiring of PR-boxes. Row `x` of `alice` lists the bit Alice
/// feeds into each box on top-level input `x`; both parties output the XOR of
/// all box outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WiringTable {
    pub alice: Vec<Vec<u8>>,
    pub bob: Vec<Vec<u8>>,
}

impl WiringTable {
    pub fn n_boxes(&self) -> usize {
        self.alice.first().map_or(0, |r| r.len())
    }

    fn check(&self) -> Result<()> {
        let boxes = self.n_boxes();
        if self.alice.len() != self.bob.len() {
            return Err(Error::Dimension(format!(
                "Alice has {} inputs, Bob has {}",
                self.alice.len(),
                self.bob.len()
            )));
        }
        if self
            .alice
            .iter()
            .chain(&self.bob)
            .any(|r| r.len() != boxes || r.iter().any(|b| *b > 1))
        {
            return Err(Error::Dimension(
                "wiring rows must be bit vectors of equal length".into(),
            ));
        }
        Ok(())
    }

    /// `S_A S_B^T` over GF(2).
    pub fn parity_matrix(&self) -> Result<Vec<Vec<u8>>> {
        self.check()?;
        Ok(self
            .alice
            .iter()
            .map(|ra| {
                self.bob
                    .iter()
                    .map(|rb| ra.iter().zip(rb).fold(0, |acc, (a, b)| acc ^ (a & b)))
                    .collect()
            })
            .collect())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("wiring serializes")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let w: WiringTable = serde_json::from_value(v.clone())?;
        w.check()?;
        Ok(w)
    }
}

/// The machine simulated by a wiring: box `k` contributes `x_k y_k` to the
/// output parity, so the pair `(x, y)` is anticorrelated iff
/// `(S_A S_B^T)[x][y] = 1`.
pub fn wire_pr_boxes(w: &WiringTable) -> Result<MachineSpec> {
    let p = w.parity_matrix()?;
    let n = w.alice.len();
    MachineSpec::new(
        n,
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| p[x][y] == 1),
    )
}

/// `N-1` PR-boxes simulating `PR_N`: box `k` anticorrelates only the pair
/// `(N-k, k)`.
pub fn make_prn_wiring(n: usize) -> Result<WiringTable> {
    Scenario::new(n)?;
    let boxes = n - 1;
    let alice = (0..n)
        .map(|x| (1..=boxes).map(|k| (x == n - k) as u8).collect())
        .collect();
    let bob = (0..n)
        .map(|y| (1..=boxes).map(|k| (y == k) as u8).collect())
        .collect();
    Ok(WiringTable { alice, bob })
}

/// Rank of a bit matrix over GF(2).
pub fn gf2_rank(m: &[Vec<u8>]) -> usize {
    let mut rows: Vec<Vec<u8>> = m.to_vec();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] == 1 {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{chsh, make_inn22};

    #[test]
    fn recipe_of_chsh_is_pr_box() {
        let m = recipe(&chsh(2).unwrap()).unwrap();
        assert_eq!(m, MachineSpec::pr_box());
        let p = machine_behavior(&m).unwrap();
        assert_eq!(p.joint[1][1], Rational::from_integer(0));
        assert_eq!(p.joint[0][1], half());
    }

    #[test]
    fn recipe_of_i3322_is_pr3() {
        let m = recipe(&make_inn22(3).unwrap()).unwrap();
        assert_eq!(
            m.anticorrelated().iter().copied().collect::<Vec<_>>(),
            vec![(1, 2), (2, 1)]
        );
        assert!(pr3_formula_check(&m).unwrap());
        assert_eq!(m, MachineSpec::pr_n(3).unwrap());
    }

    #[test]
    fn recipe_of_i4422() {
        let m = recipe(&make_inn22(4).unwrap()).unwrap();
        let set: Vec<_> = m.anticorrelated().iter().copied().collect();
        assert_eq!(set, vec![(1, 3), (2, 2), (3, 1)]);
    }

    #[test]
    fn recipe_rejects_large_coefficients() {
        let mut f = make_inn22(3).unwrap();
        f.joint[0][0] = 2;
        assert!(matches!(
            recipe(&f),
            Err(Error::RecipeUndefined { value: 2, .. })
        ));
    }

    #[test]
    fn pr3_formula_rejects_other_machines() {
        let padded = MachineSpec::pr_box().padded(3).unwrap();
        assert!(!pr3_formula_check(&padded).unwrap());
        let offdiag = MachineSpec::new(
            3,
            (0..3)
                .flat_map(|x| (0..3).map(move |y| (x, y)))
                .filter(|(x, y)| x != y),
        )
        .unwrap();
        assert!(!pr3_formula_check(&offdiag).unwrap());
        assert!(pr3_formula_check(&MachineSpec::pr_box()).is_err());
    }

    #[test]
    fn empty_machine_is_shared_coin() {
        let m = MachineSpec::new(2, []).unwrap();
        let p = machine_behavior(&m).unwrap();
        assert!(p.joint.iter().flatten().all(|x| *x == half()));
        assert!(chsh(2).unwrap().evaluate(&p).unwrap() <= Rational::from_integer(0));
    }

    #[test]
    fn two_box_wiring_gives_pr3() {
        let w = WiringTable {
            alice: vec![vec![0, 0], vec![0, 1], vec![1, 0]],
            bob: vec![vec![0, 0], vec![1, 0], vec![0, 1]],
        };
        assert_eq!(
            w.parity_matrix().unwrap(),
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 0]]
        );
        assert_eq!(
            wire_pr_boxes(&w).unwrap(),
            recipe(&make_inn22(3).unwrap()).unwrap()
        );
        assert_eq!(make_prn_wiring(3).unwrap(), w);
    }

    #[test]
    fn single_box_identity_wiring() {
        let w = WiringTable {
            alice: vec![vec![0], vec![1]],
            bob: vec![vec![0], vec![1]],
        };
        assert_eq!(wire_pr_boxes(&w).unwrap(), MachineSpec::pr_box());
        assert_eq!(make_prn_wiring(2).unwrap(), w);
    }

    #[test]
    fn prn_wiring_five() {
        let w = make_prn_wiring(5).unwrap();
        assert_eq!(w.n_boxes(), 4);
        let m = wire_pr_boxes(&w).unwrap();
        let set: Vec<_> = m.anticorrelated().iter().copied().collect();
        assert_eq!(set, vec![(1, 4), (2, 3), (3, 2), (4, 1)]);
    }

    #[test]
    fn mismatched_wiring_is_rejected() {
        let w = WiringTable {
            alice: vec![vec![0, 0], vec![0, 1]],
            bob: vec![vec![0], vec![1]],
        };
        assert!(wire_pr_boxes(&w).is_err());
    }

    #[test]
    fn parity_rank_matches_box_count() {
        for n in 2..=6 {
            assert_eq!(
                gf2_rank(&MachineSpec::pr_n(n).unwrap().parity_matrix()),
                n - 1
            );
        }
    }

    #[test]
    fn machine_json_round_trip() {
        let m = MachineSpec::pr_n(4).unwrap();
        let v = m.to_json();
        assert_eq!(v["n_inputs"], 4);
        assert_eq!(v["anticorrelated"][0], serde_json::json!([1, 3]));
        assert_eq!(MachineSpec::from_json(&v).unwrap(), m);
        let bad = serde_json::json!({"n_inputs": 2, "anticorrelated": [[2, 0]]});
        assert!(MachineSpec::from_json(&bad).is_err());
    }
}
