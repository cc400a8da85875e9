//! ADE classification of root systems in a negative definite lattice.
//!
//! Input is a finite set of vectors of self-pairing -2, closed under
//! negation. A generic linear functional splits it into positive and
//! negative halves; the positive roots that are not sums of two positive
//! roots are the simple roots, and their pairing graph (edge when the
//! pairing is +1, the negated convention) decomposes into Dynkin diagrams
//! of type A, D or E. Anything else — a cycle, a vertex of degree four, two
//! branch vertices — is rejected: the input was not the root system of a
//! negative definite lattice.

use std::cmp::Reverse;
use std::collections::HashSet;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::Int;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AdeType {
    A,
    D,
    E,
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeType::A => write!(f, "A"),
            AdeType::D => write!(f, "D"),
            AdeType::E => write!(f, "E"),
        }
    }
}

/// One irreducible component of a root system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdeComponent {
    pub kind: AdeType,
    pub rank: usize,
}

impl AdeComponent {
    /// Number of roots of the component (both signs).
    pub fn root_count(&self) -> usize {
        match self.kind {
            AdeType::A => self.rank * (self.rank + 1),
            AdeType::D => 2 * self.rank * (self.rank - 1),
            AdeType::E => match self.rank {
                6 => 72,
                7 => 126,
                8 => 240,
                _ => unreachable!("E components have rank 6, 7 or 8"),
            },
        }
    }
}

impl fmt::Display for AdeComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind, self.rank)
    }
}

/// Deterministic sequence of separating functionals: coordinates are paired
/// with powers of a prime, a different prime per attempt.
const FUNCTIONAL_PRIMES: [u32; 8] = [3, 5, 7, 11, 13, 17, 19, 23];

/// Classifies a root list into ADE components, largest first.
pub fn ade_classify(roots: &[LatticeVector]) -> Result<Vec<AdeComponent>> {
    if roots.is_empty() {
        return Ok(Vec::new());
    }
    for (i, r) in roots.iter().enumerate() {
        let norm = r.norm();
        if norm != Int::from(-2) {
            return Err(Error::InvalidRoot { index: i, norm });
        }
    }

    let positive = positive_half(roots)?;
    let simple = simple_roots(&positive);

    // Pairing graph on the simple roots.
    let m = simple.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..m {
        for j in 0..i {
            let pair = simple[i].inner(&simple[j])?;
            if pair == Int::from(1) {
                adj[i].push(j);
                adj[j].push(i);
            } else if !pair.is_zero() {
                return Err(Error::Classification(format!(
                    "simple roots pair to {pair}; a root system of a negative definite lattice only allows 0 or 1"
                )));
            }
        }
    }

    let mut seen = vec![false; m];
    let mut components = Vec::new();
    for start in 0..m {
        if seen[start] {
            continue;
        }
        let mut nodes = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            nodes.push(v);
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        components.push(classify_component(&nodes, &adj)?);
    }

    components.sort_by_key(|c| (Reverse(c.rank), Reverse(c.kind)));
    Ok(components)
}

/// Sum over components of the per-component root count; for a complete root
/// system this equals the number of input roots.
pub fn total_root_count(components: &[AdeComponent]) -> usize {
    components.iter().map(AdeComponent::root_count).sum()
}

/// Picks the half of the root set on which a generic functional is
/// positive. Retries with the next functional on any zero value.
fn positive_half(roots: &[LatticeVector]) -> Result<Vec<LatticeVector>> {
    'attempt: for p in FUNCTIONAL_PRIMES {
        let p = Int::from(p);
        let mut half = Vec::with_capacity(roots.len() / 2);
        for r in roots {
            let mut value = Int::zero();
            let mut weight = Int::from(1);
            for c in r.coords() {
                value += c * &weight;
                weight *= &p;
            }
            if value.is_zero() {
                continue 'attempt;
            }
            if value.is_positive() {
                half.push(r.clone());
            }
        }
        return Ok(half);
    }
    Err(Error::Classification(
        "no separating functional found for the root set".into(),
    ))
}

/// Simple roots: positive roots that are not the sum of two positive roots.
fn simple_roots(positive: &[LatticeVector]) -> Vec<LatticeVector> {
    let index: HashSet<&[Int]> = positive.iter().map(|r| r.coords()).collect();
    positive
        .iter()
        .filter(|alpha| {
            !positive.iter().any(|beta| {
                if beta.coords() == alpha.coords() {
                    return false;
                }
                let gamma: Vec<Int> = alpha
                    .coords()
                    .iter()
                    .zip(beta.coords())
                    .map(|(a, b)| a - b)
                    .collect();
                index.contains(gamma.as_slice())
            })
        })
        .cloned()
        .collect()
}

/// Identifies one connected diagram by node count and branch structure.
fn classify_component(nodes: &[usize], adj: &[Vec<usize>]) -> Result<AdeComponent> {
    let n = nodes.len();
    let edges: usize = nodes.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
    if edges + 1 != n {
        return Err(Error::Classification(format!(
            "component with {n} nodes and {edges} edges contains a cycle"
        )));
    }
    if let Some(&v) = nodes.iter().find(|&&v| adj[v].len() > 3) {
        return Err(Error::Classification(format!(
            "diagram vertex of degree {}",
            adj[v].len()
        )));
    }
    let branches: Vec<usize> = nodes.iter().copied().filter(|&v| adj[v].len() == 3).collect();
    match branches.len() {
        0 => Ok(AdeComponent {
            kind: AdeType::A,
            rank: n,
        }),
        1 => {
            let b = branches[0];
            let mut legs: Vec<usize> = adj[b].iter().map(|&w| leg_length(b, w, adj)).collect();
            legs.sort_unstable();
            match (legs[0], legs[1], legs[2]) {
                (1, 1, _) => Ok(AdeComponent {
                    kind: AdeType::D,
                    rank: n,
                }),
                (1, 2, 2) => Ok(AdeComponent {
                    kind: AdeType::E,
                    rank: 6,
                }),
                (1, 2, 3) => Ok(AdeComponent {
                    kind: AdeType::E,
                    rank: 7,
                }),
                (1, 2, 4) => Ok(AdeComponent {
                    kind: AdeType::E,
                    rank: 8,
                }),
                (a, b, c) => Err(Error::Classification(format!(
                    "branch legs ({a},{b},{c}) do not form an ADE diagram"
                ))),
            }
        }
        k => Err(Error::Classification(format!(
            "diagram with {k} branch vertices"
        ))),
    }
}

/// Number of nodes along the path starting at `next`, walking away from the
/// branch vertex. The graph is a tree with all degrees <= 3 away from the
/// single branch, so the walk is unambiguous.
fn leg_length(branch: usize, next: usize, adj: &[Vec<usize>]) -> usize {
    let mut len = 1;
    let (mut prev, mut cur) = (branch, next);
    loop {
        let forward: Vec<usize> = adj[cur].iter().copied().filter(|&w| w != prev).collect();
        match forward.as_slice() {
            [] => return len,
            [w] => {
                prev = cur;
                cur = *w;
                len += 1;
            }
            _ => return len, // second branch vertex; component check rejects it
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Lattice, LatticeVector};

    #[test]
    fn single_pair_is_a1() {
        let k3 = Lattice::k3();
        let mut coords = vec![0i64; 22];
        coords[16] = 1;
        coords[17] = -1;
        let r = LatticeVector::from_i64(&k3, &coords).unwrap();
        let comps = ade_classify(&[r.clone(), -&r]).unwrap();
        assert_eq!(
            comps,
            vec![AdeComponent {
                kind: AdeType::A,
                rank: 1
            }]
        );
        assert_eq!(total_root_count(&comps), 2);
    }

    #[test]
    fn empty_input_is_empty() {
        assert!(ade_classify(&[]).unwrap().is_empty());
    }

    #[test]
    fn component_root_counts() {
        let a2 = AdeComponent { kind: AdeType::A, rank: 2 };
        let d4 = AdeComponent { kind: AdeType::D, rank: 4 };
        let e8 = AdeComponent { kind: AdeType::E, rank: 8 };
        assert_eq!(a2.root_count(), 6);
        assert_eq!(d4.root_count(), 24);
        assert_eq!(e8.root_count(), 240);
    }

    #[test]
    fn rejects_wrong_norm() {
        let k3 = Lattice::k3();
        let e1 = LatticeVector::basis(&k3, 16);
        assert!(matches!(
            ade_classify(&[e1]),
            Err(Error::InvalidRoot { index: 0, .. })
        ));
    }
}
