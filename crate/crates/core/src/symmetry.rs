//! Relabelling symmetries and orbits of functionals.
//!
//! A [`SymmetryElement`] relabels settings (one permutation per party),
//! flips outcomes per setting and optionally swaps the parties. It acts on
//! behaviors directly and on functionals by pull-back, so that
//! `transform(f, g)(s) == f(transform_point(s, g^-1))`.

use std::collections::{BTreeSet, HashSet};

use crate::behavior::{BehaviorPoint, FullTable, Scenario};
use crate::error::Result;
use crate::functional::BellFunctional;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Party {
    Alice,
    Bob,
}

/// Setting `x` of Alice moves to setting `alice_perm[x]` and has its outcome
/// flipped when `alice_flips[x]` is set (likewise for Bob); a party swap is
/// applied last.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetryElement {
    pub alice_perm: Vec<usize>,
    pub bob_perm: Vec<usize>,
    pub alice_flips: Vec<bool>,
    pub bob_flips: Vec<bool>,
    pub party_swap: bool,
}

impl SymmetryElement {
    pub fn identity(n: usize) -> Self {
        Self {
            alice_perm: (0..n).collect(),
            bob_perm: (0..n).collect(),
            alice_flips: vec![false; n],
            bob_flips: vec![false; n],
            party_swap: false,
        }
    }

    pub fn n(&self) -> usize {
        self.alice_perm.len()
    }

    pub fn party_swap(n: usize) -> Self {
        Self {
            party_swap: true,
            ..Self::identity(n)
        }
    }

    pub fn flip_alice(n: usize, setting: usize) -> Self {
        let mut g = Self::identity(n);
        g.alice_flips[setting] = true;
        g
    }

    pub fn flip_bob(n: usize, setting: usize) -> Self {
        let mut g = Self::identity(n);
        g.bob_flips[setting] = true;
        g
    }

    pub fn transpose_alice(n: usize, a: usize, b: usize) -> Self {
        let mut g = Self::identity(n);
        g.alice_perm.swap(a, b);
        g
    }

    pub fn transpose_bob(n: usize, a: usize, b: usize) -> Self {
        let mut g = Self::identity(n);
        g.bob_perm.swap(a, b);
        g
    }

    fn map_label(&self, party: Party, setting: usize, outcome: u8) -> (Party, usize, u8) {
        let (perm, flips) = match party {
            Party::Alice => (&self.alice_perm, &self.alice_flips),
            Party::Bob => (&self.bob_perm, &self.bob_flips),
        };
        let out = outcome ^ flips[setting] as u8;
        let p = match (party, self.party_swap) {
            (p, false) => p,
            (Party::Alice, true) => Party::Bob,
            (Party::Bob, true) => Party::Alice,
        };
        (p, perm[setting], out)
    }

    fn from_label_map(n: usize, swap: bool, f: impl Fn(Party, usize) -> (usize, u8)) -> Self {
        let mut g = Self::identity(n);
        g.party_swap = swap;
        for x in 0..n {
            let (s, o) = f(Party::Alice, x);
            g.alice_perm[x] = s;
            g.alice_flips[x] = o == 1;
            let (s, o) = f(Party::Bob, x);
            g.bob_perm[x] = s;
            g.bob_flips[x] = o == 1;
        }
        g
    }

    /// `self.compose(other)` acts as `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_label_map(self.n(), self.party_swap ^ other.party_swap, |p, x| {
            let (p1, x1, o1) = other.map_label(p, x, 0);
            let (_, x2, o2) = self.map_label(p1, x1, o1);
            (x2, o2)
        })
    }

    pub fn inverse(&self) -> Self {
        let n = self.n();
        let mut g = Self::identity(n);
        g.party_swap = self.party_swap;
        for party in [Party::Alice, Party::Bob] {
            for x in 0..n {
                let (p, y, o) = self.map_label(party, x, 0);
                let (perm, flips) = match p {
                    Party::Alice => (&mut g.alice_perm, &mut g.alice_flips),
                    Party::Bob => (&mut g.bob_perm, &mut g.bob_flips),
                };
                perm[y] = x;
                flips[y] = o == 1;
            }
        }
        g
    }

    /// Order of the full group for `N` settings: `2 (N!)^2 4^N`.
    pub fn group_order(n: usize) -> u128 {
        let fact: u128 = (1..=n as u128).product();
        2 * fact * fact * 4u128.pow(n as u32)
    }
}

/// Generators of the full group: adjacent transpositions, a flip on
/// setting 0 for each party, and the party swap.
pub fn generators(n: usize) -> Vec<SymmetryElement> {
    let mut g = Vec::new();
    for k in 0..n - 1 {
        g.push(SymmetryElement::transpose_alice(n, k, k + 1));
        g.push(SymmetryElement::transpose_bob(n, k, k + 1));
    }
    g.push(SymmetryElement::flip_alice(n, 0));
    g.push(SymmetryElement::flip_bob(n, 0));
    g.push(SymmetryElement::party_swap(n));
    g
}

/// Every element of the group, in a fixed order.
pub fn group_elements(n: usize) -> Vec<SymmetryElement> {
    let perms = permutations(n);
    let mut out = Vec::new();
    for swap in [false, true] {
        for pa in &perms {
            for pb in &perms {
                for fa in 0..1u32 << n {
                    for fb in 0..1u32 << n {
                        out.push(SymmetryElement {
                            alice_perm: pa.clone(),
                            bob_perm: pb.clone(),
                            alice_flips: (0..n).map(|k| fa >> k & 1 == 1).collect(),
                            bob_flips: (0..n).map(|k| fb >> k & 1 == 1).collect(),
                            party_swap: swap,
                        });
                    }
                }
            }
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                cur.push(k);
                rec(cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Applies `g` to a behavior. Works on any coefficient table, valid or not.
pub fn transform_point<S: Scalar>(
    s: &BehaviorPoint<S>,
    g: &SymmetryElement,
) -> Result<BehaviorPoint<S>> {
    s.check_shape()?;
    let n = s.scenario.n_settings();
    assert_eq!(
        g.n(),
        n,
        "symmetry element has the wrong number of settings"
    );
    let full = s.full_table_unchecked();
    let mut out = FullTable::zeros(s.scenario);
    for x in 0..n {
        for y in 0..n {
            for a in 0..2u8 {
                for b in 0..2u8 {
                    let (_, x2, a2) = g.map_label(Party::Alice, x, a);
                    let (_, y2, b2) = g.map_label(Party::Bob, y, b);
                    let v = full.get(x, y, a, b).clone();
                    if g.party_swap {
                        out.set(y2, x2, b2, a2, v);
                    } else {
                        out.set(x2, y2, a2, b2, v);
                    }
                }
            }
        }
    }
    Ok(out.compress())
}

/// Pulls `f` back along `g^-1`, giving the functional `s -> f(g^-1 s)`.
pub fn transform(f: &BellFunctional, g: &SymmetryElement) -> BellFunctional {
    let h = g.inverse();
    let scenario = f.scenario;
    let d = scenario.dimension();
    let at = |coords: &[i64]| -> i64 {
        let p = BehaviorPoint::from_coordinates(scenario, coords).expect("shape");
        let q = transform_point(&p, &h).expect("shape");
        f.evaluate_unchecked(&q)
    };
    let mut basis = vec![0i64; d];
    let constant = at(&basis);
    let mut coeffs = Vec::with_capacity(d);
    for k in 0..d {
        basis[k] = 1;
        coeffs.push(at(&basis) - constant);
        basis[k] = 0;
    }
    let n = scenario.n_settings();
    BellFunctional {
        scenario,
        alice: coeffs[..n].to_vec(),
        bob: coeffs[n..2 * n].to_vec(),
        joint: coeffs[2 * n..].chunks(n).map(|c| c.to_vec()).collect(),
        constant,
    }
}

/// Closure of `{f}` under the symmetry group, sorted by coefficient key.
pub fn orbit(f: &BellFunctional) -> Vec<BellFunctional> {
    let gens = generators(f.n());
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut members: BTreeSet<(Vec<i64>, BellFunctional)> = BTreeSet::new();
    let mut frontier = vec![f.clone()];
    seen.insert(f.key());
    members.insert((f.key(), f.clone()));
    while let Some(cur) = frontier.pop() {
        for g in &gens {
            let next = transform(&cur, g);
            let key = next.key();
            if seen.insert(key.clone()) {
                members.insert((key, next.clone()));
                frontier.push(next);
            }
        }
    }
    members.into_iter().map(|(_, f)| f).collect()
}

/// Lexicographically smallest `(constant, alice, bob, joint)` tuple over the
/// whole group. The group has `2 (N!)^2 4^N` elements, so this is meant for
/// small `N`.
pub fn canonical_form(f: &BellFunctional) -> BellFunctional {
    group_elements(f.n())
        .iter()
        .map(|g| transform(f, g))
        .min_by(|a, b| a.key().cmp(&b.key()))
        .expect("group is non-empty")
}

/// Canonical representative of a behavior's orbit, by its coordinate tuple.
pub fn canonical_point<S: Scalar + Ord>(s: &BehaviorPoint<S>) -> Result<BehaviorPoint<S>> {
    let mut best: Option<BehaviorPoint<S>> = None;
    for g in group_elements(s.scenario.n_settings()) {
        let t = transform_point(s, &g)?;
        if best
            .as_ref()
            .is_none_or(|b| t.coordinates() < b.coordinates())
        {
            best = Some(t);
        }
    }
    Ok(best.expect("group is non-empty"))
}

pub fn scenario_group_order(scenario: &Scenario) -> u128 {
    SymmetryElement::group_order(scenario.n_settings())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::{chsh, make_inn22};
    use crate::scalar::{half, Rational};

    fn pr3() -> BehaviorPoint<Rational> {
        let h = half();
        let z = Rational::from_integer(0);
        let s = Scenario::new(3).unwrap();
        let mut joint = vec![vec![h; 3]; 3];
        joint[2][1] = z;
        joint[1][2] = z;
        BehaviorPoint::new(s, vec![h; 3], vec![h; 3], joint).unwrap()
    }

    #[test]
    fn flipping_first_settings_maps_pr3_to_diagonal_form() {
        let mut g = SymmetryElement::identity(3);
        g.alice_flips[0] = true;
        g.bob_flips[0] = true;
        let t = transform_point(&pr3(), &g).unwrap();
        let h = half();
        let z = Rational::from_integer(0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.joint[i][j], if i == j { h } else { z });
            }
        }
        assert!(t.alice.iter().chain(&t.bob).all(|m| *m == h));
    }

    #[test]
    fn identity_is_neutral() {
        let f = make_inn22(3).unwrap();
        assert_eq!(transform(&f, &SymmetryElement::identity(3)), f);
    }

    #[test]
    fn inverse_and_composition() {
        let gens = generators(3);
        let mut g = SymmetryElement::identity(3);
        for (k, h) in gens.iter().enumerate().cycle().take(23) {
            if k % 2 == 0 {
                g = h.compose(&g);
            }
        }
        assert_eq!(g.compose(&g.inverse()), SymmetryElement::identity(3));
        assert_eq!(g.inverse().compose(&g), SymmetryElement::identity(3));
        let p = pr3();
        let a = transform_point(&transform_point(&p, &gens[0]).unwrap(), &g).unwrap();
        let b = transform_point(&p, &g.compose(&gens[0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn swapped_chsh_on_pr_box() {
        let h = half();
        let s = Scenario::new(2).unwrap();
        let pr = BehaviorPoint::new(
            s,
            vec![h, h],
            vec![h, h],
            vec![vec![h, h], vec![h, Rational::from_integer(0)]],
        )
        .unwrap();
        let f = transform(&chsh(2).unwrap(), &SymmetryElement::party_swap(2));
        assert_eq!(f.evaluate(&pr).unwrap(), h);
    }

    #[test]
    fn small_orbits() {
        assert_eq!(orbit(&chsh(2).unwrap()).len(), 8);
        assert_eq!(
            group_elements(2).len() as u128,
            SymmetryElement::group_order(2)
        );
    }

    #[test]
    fn canonical_form_is_orbit_invariant() {
        let f = chsh(2).unwrap();
        let c = canonical_form(&f);
        for g in orbit(&f) {
            assert_eq!(canonical_form(&g), c);
        }
    }
}
