//! Integral lattices: symmetric bilinear forms over a distinguished basis.
//!
//! Provides the hyperbolic plane `U`, the `E8` root lattice built from its
//! Dynkin diagram, direct sums, and the rank-22 even unimodular lattice of
//! signature (3,19) — the second cohomology of a K3 surface with its cup
//! pairing — on which the rest of the crate operates.

use std::fmt;
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::Matrix;
use crate::{Int, IntMatrix, Rat, RatMatrix};

/// A free abelian group of finite rank with an integer-valued symmetric
/// bilinear pairing, stored as its Gram matrix.
#[derive(Clone, Debug)]
pub struct Lattice {
    gram: IntMatrix,
    rank: usize,
    label: Option<String>,
    det: OnceLock<Int>,
    sig: OnceLock<(usize, usize, usize)>,
    positive_frame: OnceLock<RatMatrix>,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}
impl Eq for Lattice {}

impl Lattice {
    pub fn from_gram(gram: IntMatrix, label: Option<String>) -> Result<Arc<Self>> {
        if !gram.is_symmetric() {
            return Err(Error::Shape("a Gram matrix must be symmetric".into()));
        }
        Ok(Self::new_unchecked(gram, label))
    }

    fn new_unchecked(gram: IntMatrix, label: Option<String>) -> Arc<Self> {
        let rank = gram.rows();
        Arc::new(Lattice {
            gram,
            rank,
            label,
            det: OnceLock::new(),
            sig: OnceLock::new(),
            positive_frame: OnceLock::new(),
        })
    }

    /// The hyperbolic plane: Gram matrix [[0,1],[1,0]].
    pub fn hyperbolic_plane() -> Arc<Self> {
        let gram = Matrix::from_rows(vec![
            vec![Int::from(0), Int::from(1)],
            vec![Int::from(1), Int::from(0)],
        ])
        .expect("rows are rectangular");
        Self::new_unchecked(gram, Some("u".into()))
    }

    /// The positive definite E8 root lattice from its Dynkin diagram: a
    /// chain of seven nodes 0..=6 with node 7 attached to chain node 2.
    /// Diagonal 2, adjacent pairs -1.
    pub fn e8() -> Arc<Self> {
        const EDGES: [(usize, usize); 7] = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 7)];
        let gram = Matrix::from_fn(8, 8, |i, j| {
            if i == j {
                Int::from(2)
            } else if EDGES.contains(&(i, j)) || EDGES.contains(&(j, i)) {
                Int::from(-1)
            } else {
                Int::from(0)
            }
        });
        Self::new_unchecked(gram, Some("e8".into()))
    }

    /// Rank-1 lattice with Gram [2].
    pub fn a1() -> Arc<Self> {
        let gram = Matrix::from_rows(vec![vec![Int::from(2)]]).expect("1x1");
        Self::new_unchecked(gram, Some("a1".into()))
    }

    /// The lattice with negated pairing.
    pub fn negate(&self) -> Arc<Self> {
        let gram = self.gram.map(|x| -x.clone());
        let label = self.label.as_ref().map(|l| {
            l.strip_prefix('-').map_or_else(|| format!("-{l}"), String::from)
        });
        Self::new_unchecked(gram, label)
    }

    /// Orthogonal direct sum; the Gram matrix is block diagonal, so ranks
    /// add, determinants multiply and signatures add componentwise.
    pub fn direct_sum(&self, other: &Self) -> Arc<Self> {
        let gram = Matrix::block_diag(&[&self.gram, &other.gram]);
        let label = match (&self.label, &other.label) {
            (Some(a), Some(b)) => Some(format!("{a}+{b}")),
            _ => None,
        };
        Self::new_unchecked(gram, label)
    }

    /// The even unimodular lattice of signature (3,19): two negated E8
    /// blocks followed by three hyperbolic planes.
    ///
    /// Basis order is fixed: indices 0..8 and 8..16 are the E8 blocks,
    /// 16..18, 18..20, 20..22 the hyperbolic pairs `(e_i, f_i)`.
    pub fn k3() -> Arc<Self> {
        let me8 = Self::e8().negate();
        let u = Self::hyperbolic_plane();
        let gram = Matrix::block_diag(&[&me8.gram, &me8.gram, &u.gram, &u.gram, &u.gram]);
        Self::new_unchecked(gram, Some("k3".into()))
    }

    /// Built-in lattices by name, as exposed on the command line.
    pub fn builtin(name: &str) -> Option<Arc<Self>> {
        match name {
            "k3" => Some(Self::k3()),
            "e8" => Some(Self::e8()),
            "-e8" => Some(Self::e8().negate()),
            "u" => Some(Self::hyperbolic_plane()),
            "a1" => Some(Self::a1()),
            "-a1" => Some(Self::a1().negate()),
            _ => None,
        }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn det(&self) -> &Int {
        self.det
            .get_or_init(|| linalg::det_exact(&self.gram).expect("gram matrices are square"))
    }

    pub fn signature(&self) -> (usize, usize, usize) {
        *self
            .sig
            .get_or_init(|| linalg::signature(&self.gram).expect("gram matrices are symmetric"))
    }

    /// Even lattices have all self-pairings even; for an integral symmetric
    /// form this reduces to the diagonal.
    pub fn is_even(&self) -> bool {
        (0..self.rank).all(|i| self.gram[(i, i)].is_even())
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == Int::from(1)
    }

    /// A rational row basis of a maximal positive definite subspace,
    /// extracted from the congruence diagonalization of the Gram matrix.
    /// Rows are pairwise orthogonal with positive self-pairing. For the
    /// built-in rank-22 lattice this is exactly `{e1+f1, e2+f2, e3+f3}`.
    pub fn positive_frame(&self) -> &RatMatrix {
        self.positive_frame.get_or_init(|| {
            let q: RatMatrix = self.gram.map(|x| Rat::from_integer(x.clone()));
            let (s, d) = linalg::congruence_diagonalize(&q).expect("gram matrices are symmetric");
            let rows: Vec<Vec<Rat>> = (0..d.rows())
                .filter(|&i| d[(i, i)].is_positive())
                .map(|i| s.row(i).to_vec())
                .collect();
            if rows.is_empty() {
                Matrix::zeros(0, self.rank)
            } else {
                Matrix::from_rows(rows).expect("frame rows share the ambient dimension")
            }
        })
    }

    /// Structural equality that short-circuits on shared storage.
    pub fn same(a: &Arc<Lattice>, b: &Arc<Lattice>) -> bool {
        Arc::ptr_eq(a, b) || **a == **b
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "{l} (rank {})", self.rank),
            None => write!(f, "lattice of rank {}", self.rank),
        }
    }
}

/// An element of a lattice, stored by its integer coordinates in the
/// lattice basis.
#[derive(Clone, Debug)]
pub struct LatticeVector {
    lattice: Arc<Lattice>,
    coords: Vec<Int>,
}

impl PartialEq for LatticeVector {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && Lattice::same(&self.lattice, &other.lattice)
    }
}
impl Eq for LatticeVector {}

impl LatticeVector {
    pub fn from_coords(lattice: &Arc<Lattice>, coords: Vec<Int>) -> Result<Self> {
        if coords.len() != lattice.rank() {
            return Err(Error::Shape(format!(
                "coordinate length {} does not match lattice rank {}",
                coords.len(),
                lattice.rank()
            )));
        }
        Ok(LatticeVector {
            lattice: Arc::clone(lattice),
            coords,
        })
    }

    pub fn from_i64(lattice: &Arc<Lattice>, coords: &[i64]) -> Result<Self> {
        Self::from_coords(lattice, coords.iter().map(|&c| Int::from(c)).collect())
    }

    /// The i-th basis vector.
    pub fn basis(lattice: &Arc<Lattice>, i: usize) -> Self {
        assert!(i < lattice.rank(), "basis index out of range");
        let mut coords = vec![Int::zero(); lattice.rank()];
        coords[i] = Int::from(1);
        LatticeVector {
            lattice: Arc::clone(lattice),
            coords,
        }
    }

    pub fn zero(lattice: &Arc<Lattice>) -> Self {
        LatticeVector {
            lattice: Arc::clone(lattice),
            coords: vec![Int::zero(); lattice.rank()],
        }
    }

    pub fn coords(&self) -> &[Int] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Int> {
        self.coords
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// The bilinear pairing `v^T G w`, exact.
    pub fn inner(&self, other: &Self) -> Result<Int> {
        if !Lattice::same(&self.lattice, &other.lattice) {
            return Err(Error::LatticeMismatch);
        }
        let gw = self.lattice.gram().mul_vec(&other.coords);
        Ok(self
            .coords
            .iter()
            .zip(&gw)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn norm(&self) -> Int {
        self.inner(self).expect("a vector shares its own lattice")
    }

    /// Roots are the integral classes of self-pairing -2.
    pub fn is_root(&self) -> bool {
        self.norm() == Int::from(-2)
    }

    pub fn scale(&self, k: &Int) -> Self {
        LatticeVector {
            lattice: Arc::clone(&self.lattice),
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }
}

impl std::ops::Add for &LatticeVector {
    type Output = LatticeVector;

    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        assert!(
            Lattice::same(&self.lattice, &rhs.lattice),
            "vector addition across different lattices"
        );
        LatticeVector {
            lattice: Arc::clone(&self.lattice),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl std::ops::Sub for &LatticeVector {
    type Output = LatticeVector;

    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        assert!(
            Lattice::same(&self.lattice, &rhs.lattice),
            "vector subtraction across different lattices"
        );
        LatticeVector {
            lattice: Arc::clone(&self.lattice),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl std::ops::Neg for &LatticeVector {
    type Output = LatticeVector;

    fn neg(self) -> LatticeVector {
        LatticeVector {
            lattice: Arc::clone(&self.lattice),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_gram_entries() {
        let e8 = Lattice::e8();
        assert_eq!(e8.gram()[(0, 0)], Int::from(2));
        assert_eq!(e8.gram()[(0, 1)], Int::from(-1));
        assert_eq!(e8.gram()[(0, 2)], Int::from(0));
        assert_eq!(e8.gram()[(2, 7)], Int::from(-1));
        assert_eq!(e8.gram()[(6, 7)], Int::from(0));
    }

    #[test]
    fn hyperbolic_identity_card() {
        let u = Lattice::hyperbolic_plane();
        assert_eq!(*u.det(), Int::from(-1));
        assert_eq!(u.signature(), (1, 1, 0));
        assert!(u.is_even());
    }

    #[test]
    fn direct_sum_with_rank_zero() {
        let u = Lattice::hyperbolic_plane();
        let trivial = Lattice::from_gram(Matrix::zeros(0, 0), None).unwrap();
        let sum = u.direct_sum(&trivial);
        assert_eq!(sum.rank(), 2);
        assert_eq!(sum.gram(), u.gram());
        assert_eq!(*trivial.det(), Int::from(1));
    }

    #[test]
    fn rank22_positive_frame_is_the_hyperbolic_diagonal() {
        let k3 = Lattice::k3();
        let frame = k3.positive_frame();
        assert_eq!(frame.rows(), 3);
        for (r, pair) in [(0usize, (16, 17)), (1, (18, 19)), (2, (20, 21))] {
            for c in 0..22 {
                let expected = if c == pair.0 || c == pair.1 {
                    Rat::from_integer(Int::from(1))
                } else {
                    Rat::from_integer(Int::from(0))
                };
                assert_eq!(frame[(r, c)], expected, "frame row {r}, column {c}");
            }
        }
    }

    #[test]
    fn root_detection_in_hyperbolic_pair() {
        let k3 = Lattice::k3();
        let e1 = LatticeVector::basis(&k3, 16);
        let f1 = LatticeVector::basis(&k3, 17);
        assert_eq!((&e1 - &f1).norm(), Int::from(-2));
        assert!((&e1 - &f1).is_root());
        assert_eq!((&e1 + &f1).norm(), Int::from(2));
        assert!(!(&e1 + &f1).is_root());
        assert_eq!(e1.norm(), Int::from(0));
        assert!(!e1.is_root());
        assert_eq!(e1.inner(&f1).unwrap(), Int::from(1));
    }

    #[test]
    fn mismatched_lattices_error() {
        let k3 = Lattice::k3();
        let e8 = Lattice::e8();
        let v = LatticeVector::basis(&k3, 0);
        let w = LatticeVector::basis(&e8, 0);
        assert!(matches!(v.inner(&w), Err(Error::LatticeMismatch)));
    }
}
