//! Bell-type functionals in the coefficient-table notation.
//!
//! A functional is `constant + sum a_i P(A_i) + sum b_j P(B_j) + sum c_ij P(A_i B_j)`
//! and the associated inequality reads `value <= 0`. `joint[i][j]` multiplies
//! `P(r_A=0, r_B=0 | A_i, B_j)`; when printed, Alice settings are columns and
//! Bob settings are rows.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::behavior::{render_table, BehaviorPoint, Scenario};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BellFunctional {
    pub scenario: Scenario,
    pub alice: Vec<i64>,
    pub bob: Vec<i64>,
    pub joint: Vec<Vec<i64>>,
    pub constant: i64,
}

impl BellFunctional {
    pub fn zero(scenario: Scenario) -> Self {
        let n = scenario.n_settings();
        Self {
            scenario,
            alice: vec![0; n],
            bob: vec![0; n],
            joint: vec![vec![0; n]; n],
            constant: 0,
        }
    }

    pub fn new(
        scenario: Scenario,
        alice: Vec<i64>,
        bob: Vec<i64>,
        joint: Vec<Vec<i64>>,
        constant: i64,
    ) -> Result<Self> {
        let n = scenario.n_settings();
        if alice.len() != n
            || bob.len() != n
            || joint.len() != n
            || joint.iter().any(|r| r.len() != n)
        {
            return Err(Error::Dimension(format!(
                "coefficient table does not match N={n}"
            )));
        }
        Ok(Self {
            scenario,
            alice,
            bob,
            joint,
            constant,
        })
    }

    /// Builds a functional from the printed table: `rows[j][i]` is the
    /// coefficient of `P(A_i B_j)`.
    pub fn from_rows(alice: &[i64], bob: &[i64], rows: &[&[i64]]) -> Result<Self> {
        let n = alice.len();
        let scenario = Scenario::new(n)?;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("table rows do not match marginals".into()));
        }
        let joint = (0..n)
            .map(|i| (0..n).map(|j| rows[j][i]).collect())
            .collect();
        Self::new(scenario, alice.to_vec(), bob.to_vec(), joint, 0)
    }

    pub fn n(&self) -> usize {
        self.scenario.n_settings()
    }

    pub fn evaluate<S: Scalar>(&self, point: &BehaviorPoint<S>) -> Result<S> {
        self.scenario.ensure_same(&point.scenario)?;
        point.check_shape()?;
        Ok(self.evaluate_unchecked(point))
    }

    pub(crate) fn evaluate_unchecked<S: Scalar>(&self, point: &BehaviorPoint<S>) -> S {
        let n = self.n();
        let mut acc = S::from_int(self.constant);
        for i in 0..n {
            if self.alice[i] != 0 {
                acc = acc + S::from_int(self.alice[i]) * point.alice[i].clone();
            }
            if self.bob[i] != 0 {
                acc = acc + S::from_int(self.bob[i]) * point.bob[i].clone();
            }
        }
        for i in 0..n {
            for j in 0..n {
                let c = self.joint[i][j];
                if c != 0 {
                    acc = acc + S::from_int(c) * point.joint[i][j].clone();
                }
            }
        }
        acc
    }

    /// Evaluates on a point given in half units (every coordinate is
    /// `value * 2`); returns twice the functional value.
    pub(crate) fn evaluate_half(&self, half: &[u8]) -> i64 {
        let n = self.n();
        let mut acc = 2 * self.constant;
        for i in 0..n {
            acc += self.alice[i] * half[i] as i64 + self.bob[i] * half[n + i] as i64;
        }
        for i in 0..n {
            for j in 0..n {
                acc += self.joint[i][j] * half[2 * n + i * n + j] as i64;
            }
        }
        acc
    }

    /// Flattened `(constant, alice, bob, joint)` tuple.
    pub fn key(&self) -> Vec<i64> {
        let mut k = Vec::with_capacity(1 + self.scenario.dimension());
        k.push(self.constant);
        k.extend_from_slice(&self.alice);
        k.extend_from_slice(&self.bob);
        for r in &self.joint {
            k.extend_from_slice(r);
        }
        k
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(FunctionalDoc::from(self)).expect("functional serializes")
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let doc: FunctionalDoc = serde_json::from_value(v.clone())?;
        Self::new(
            Scenario::new(doc.n)?,
            doc.alice,
            doc.bob,
            doc.joint,
            doc.constant,
        )
    }

    pub fn to_table(&self) -> String {
        let n = self.n();
        let header: Vec<String> = self.alice.iter().map(|c| c.to_string()).collect();
        let rows: Vec<(String, Vec<String>)> = (0..n)
            .map(|j| {
                (
                    self.bob[j].to_string(),
                    (0..n).map(|i| self.joint[i][j].to_string()).collect(),
                )
            })
            .collect();
        let mut s = render_table(&header, &rows);
        if self.constant != 0 {
            s.push_str(&format!("constant: {}\n", self.constant));
        }
        s
    }
}

#[derive(Serialize, Deserialize)]
struct FunctionalDoc {
    n: usize,
    alice: Vec<i64>,
    bob: Vec<i64>,
    joint: Vec<Vec<i64>>,
    #[serde(default)]
    constant: i64,
}

impl From<&BellFunctional> for FunctionalDoc {
    fn from(f: &BellFunctional) -> Self {
        Self {
            n: f.n(),
            alice: f.alice.clone(),
            bob: f.bob.clone(),
            joint: f.joint.clone(),
            constant: f.constant,
        }
    }
}

/// CHSH, lifted to `N` settings by zero padding.
pub fn make_chsh(scenario: Scenario) -> BellFunctional {
    let n = scenario.n_settings();
    let mut f = BellFunctional::zero(scenario);
    // The two-setting block sits on Alice settings {0,1} and Bob settings
    // {n-2, n-1}, which for n = 3 leaves Bob's first row empty.
    let b0 = n - 2;
    let b1 = n - 1;
    f.alice[0] = -1;
    f.bob[b0] = -1;
    f.joint[0][b0] = 1;
    f.joint[1][b0] = 1;
    f.joint[0][b1] = 1;
    f.joint[1][b1] = -1;
    f
}

pub fn chsh(n: usize) -> Result<BellFunctional> {
    Ok(make_chsh(Scenario::new(n)?))
}

/// The `I_NN22` family.
pub fn make_inn22(n: usize) -> Result<BellFunctional> {
    let scenario = Scenario::new(n)?;
    let mut f = BellFunctional::zero(scenario);
    f.alice[0] = -1;
    for m in 0..n {
        f.bob[m] = -((n - 1 - m) as i64);
        for i in 0..n - m {
            f.joint[i][m] = 1;
        }
        if m >= 1 {
            f.joint[n - m][m] = -1;
        }
    }
    Ok(f)
}

/// `M_NN22`: `I_NN22` with Alice's first marginal coefficient set to `-(N-1)`.
pub fn make_mnn22(n: usize) -> Result<BellFunctional> {
    if n < 3 {
        return Err(Error::TooFewSettings { min: 3, got: n });
    }
    let mut f = make_inn22(n)?;
    f.alice[0] = -((n - 1) as i64);
    Ok(f)
}

/// `C_1^N`: `I_NN22` with Bob's first setting removed, the `-1` of row `B_1`
/// dropped and Alice's first marginal at `-(N-2)`.
pub fn make_c1(n: usize) -> Result<BellFunctional> {
    if n < 3 {
        return Err(Error::TooFewSettings { min: 3, got: n });
    }
    let mut f = make_inn22(n)?;
    f.alice[0] = -((n - 2) as i64);
    f.bob[0] = 0;
    for i in 0..n {
        f.joint[i][0] = 0;
    }
    f.joint[n - 1][1] = 0;
    Ok(f)
}

/// `C_2^N`: `I_NN22` with Alice's second setting and Bob's last setting
/// removed and Bob's marginals shifted down by one.
pub fn make_c2(n: usize) -> Result<BellFunctional> {
    if n < 3 {
        return Err(Error::TooFewSettings { min: 3, got: n });
    }
    let mut f = make_inn22(n)?;
    f.alice[0] = -((n - 2) as i64);
    for j in 0..n {
        f.bob[j] = -((n as i64 - 2 - j as i64).max(0));
        f.joint[1][j] = 0;
    }
    for i in 0..n {
        f.joint[i][n - 1] = 0;
    }
    Ok(f)
}

/// Named families accepted by [`by_name`].
pub const FAMILIES: &[&str] = &["chsh", "I", "M", "C1", "C2"];

pub fn by_name(family: &str, n: usize) -> Result<BellFunctional> {
    match family {
        "chsh" | "CHSH" => chsh(n),
        "I" | "inn22" => make_inn22(n),
        "M" | "mnn22" => make_mnn22(n),
        "C1" | "c1" => make_c1(n),
        "C2" | "c2" => make_c2(n),
        other => Err(Error::Parse(format!(
            "unknown family {other:?}; expected one of {}",
            FAMILIES.join(", ")
        ))),
    }
}
