//! Integer isometries of a lattice.
//!
//! An isometry is an integer matrix preserving the Gram form exactly. This
//! module constructs reflections in vectors of self-pairing +/-2, composes
//! and inverts isometries, classifies them into the four components of the
//! ambient indefinite orthogonal group (determinant sign and orientation
//! behaviour on maximal positive subspaces), finds positive 3-planes fixed
//! by a reflection, and explores orbits of vectors under finitely many
//! generators.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::grassmann::PositivePlane;
use crate::lattice::{Lattice, LatticeVector};
use crate::linalg;
use crate::matrix::Matrix;
use crate::{Int, IntMatrix, Rat, RatMatrix};

/// Residual tolerance for fixed-plane certificates.
pub const CERTIFICATE_TOL: f64 = 1e-9;

/// A lattice automorphism preserving the pairing: `m^T G m = G` exactly.
/// The matrix acts on column coordinate vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isometry {
    matrix: IntMatrix,
    lattice: Arc<Lattice>,
}

/// Which of the four components of the ambient orthogonal group an isometry
/// lies in: determinant sign, and whether orientation of maximal positive
/// subspaces is preserved or reversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentClass {
    pub det_sign: i8,
    pub orientation: Orientation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl ComponentClass {
    /// Component classes multiply like {+-1} x {+-1}.
    pub fn compose(self, other: ComponentClass) -> ComponentClass {
        ComponentClass {
            det_sign: self.det_sign * other.det_sign,
            orientation: if self.orientation == other.orientation {
                Orientation::Preserving
            } else {
                Orientation::Reversing
            },
        }
    }

    /// Membership in the special (determinant +1) subgroup.
    pub fn in_special_group(&self) -> bool {
        self.det_sign == 1
    }
}

/// `m^T G m = G`, checked exactly.
pub fn is_isometry(m: &IntMatrix, lattice: &Arc<Lattice>) -> Result<bool> {
    if !m.is_square() || m.rows() != lattice.rank() {
        return Err(Error::Shape(format!(
            "isometry matrix must be {0}x{0}, got {1}x{2}",
            lattice.rank(),
            m.rows(),
            m.cols()
        )));
    }
    let g = lattice.gram();
    Ok(&m.transpose().mul(g).mul(m) == g)
}

impl Isometry {
    pub fn new(matrix: IntMatrix, lattice: &Arc<Lattice>) -> Result<Self> {
        if !is_isometry(&matrix, lattice)? {
            return Err(Error::Precondition(
                "matrix does not preserve the Gram form".into(),
            ));
        }
        Ok(Isometry {
            matrix,
            lattice: Arc::clone(lattice),
        })
    }

    /// Internal constructor for matrices already known to preserve the form.
    fn new_unchecked(matrix: IntMatrix, lattice: &Arc<Lattice>) -> Self {
        debug_assert!(is_isometry(&matrix, lattice).unwrap_or(false));
        Isometry {
            matrix,
            lattice: Arc::clone(lattice),
        }
    }

    pub fn identity(lattice: &Arc<Lattice>) -> Self {
        Self::new_unchecked(Matrix::identity(lattice.rank()), lattice)
    }

    pub fn neg_identity(lattice: &Arc<Lattice>) -> Self {
        let n = lattice.rank();
        Self::new_unchecked(
            Matrix::from_fn(n, n, |i, j| {
                if i == j {
                    Int::from(-1)
                } else {
                    Int::zero()
                }
            }),
            lattice,
        )
    }

    /// The reflection in a vector of self-pairing +/-2:
    /// `x -> x - 2 (x,d)/(d,d) d`, which is integral because `2/(d,d)` is
    /// -/+1. It is an involution of determinant -1 that negates `d` and
    /// fixes its orthogonal complement pointwise.
    pub fn reflection(delta: &LatticeVector) -> Result<Self> {
        let norm = delta.norm();
        let sign = if norm == Int::from(-2) {
            Int::from(1)
        } else if norm == Int::from(2) {
            Int::from(-1)
        } else {
            return Err(Error::NotReflectionVector(norm));
        };
        let lattice = delta.lattice();
        let n = lattice.rank();
        // column j of the matrix is b_j + sign*(b_j, d)*d
        let pair = lattice.gram().mul_vec(delta.coords());
        let matrix = Matrix::from_fn(n, n, |i, j| {
            let mut v = &sign * &pair[j] * &delta.coords()[i];
            if i == j {
                v += 1;
            }
            v
        });
        Ok(Self::new_unchecked(matrix, lattice))
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if !Lattice::same(&self.lattice, &other.lattice) {
            return Err(Error::LatticeMismatch);
        }
        Ok(Self::new_unchecked(
            self.matrix.mul(&other.matrix),
            &self.lattice,
        ))
    }

    pub fn inverse(&self) -> Isometry {
        let inv = linalg::inv_unimodular(&self.matrix)
            .expect("an isometry of a nondegenerate lattice is unimodular");
        Self::new_unchecked(inv, &self.lattice)
    }

    pub fn apply(&self, v: &LatticeVector) -> Result<LatticeVector> {
        if !Lattice::same(&self.lattice, v.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        LatticeVector::from_coords(&self.lattice, self.matrix.mul_vec(v.coords()))
    }

    pub fn det(&self) -> Int {
        linalg::det_exact(&self.matrix).expect("isometry matrices are square")
    }

    /// Component classification: the determinant sign together with the sign
    /// of the cross-Gram determinant between a fixed maximal positive frame
    /// and its image. The cross-Gram of two maximal positive subspaces is
    /// never singular, and the sign does not depend on the frame chosen.
    pub fn classify(&self) -> ComponentClass {
        let det = self.det();
        debug_assert!(det.abs() == Int::from(1));
        let det_sign = if det.is_negative() { -1 } else { 1 };

        let frame = self.lattice.positive_frame();
        let orientation = if frame.rows() == 0 {
            Orientation::Preserving
        } else {
            let g: RatMatrix = self.lattice.gram().map(|x| Rat::from_integer(x.clone()));
            let m: RatMatrix = self.matrix.map(|x| Rat::from_integer(x.clone()));
            let cross = frame.mul(&g).mul(&m).mul(&frame.transpose());
            let cross_int = linalg::clear_row_denominators(&cross);
            let d = linalg::det_exact(&cross_int).expect("cross-Gram is square");
            assert!(
                !d.is_zero(),
                "cross-Gram of maximal positive subspaces is nonsingular"
            );
            if d.is_positive() {
                Orientation::Preserving
            } else {
                Orientation::Reversing
            }
        };
        ComponentClass {
            det_sign,
            orientation,
        }
    }
}

/// A positive 3-plane fixed (setwise) by the reflection in `root`, together
/// with the measured distance between the plane and its image.
#[derive(Clone, Debug)]
pub struct FixedPlaneCertificate {
    pub root: LatticeVector,
    pub plane: PositivePlane,
    pub residual: f64,
}

/// Constructs a positive 3-plane fixed by the reflection in `delta`.
///
/// For self-pairing -2 the orthogonal complement of `delta` has three
/// positive directions and the plane lies inside the reflection hyperplane
/// (pointwise fixed). For +2 the complement contributes two positive
/// directions and `delta` itself completes the plane (setwise fixed, with
/// orientation reversed). The residual is the plane distance between the
/// plane and its reflected image.
pub fn fixed_plane(delta: &LatticeVector) -> Result<FixedPlaneCertificate> {
    let norm = delta.norm();
    if norm != Int::from(2) && norm != Int::from(-2) {
        return Err(Error::NotReflectionVector(norm));
    }
    let lattice = delta.lattice();
    let (p, _, _) = lattice.signature();
    if p != 3 {
        return Err(Error::Precondition(format!(
            "fixed positive 3-planes need a lattice with exactly 3 positive directions, found {p}"
        )));
    }

    // Saturated integer basis of the hyperplane orthogonal to delta.
    let pairing_row = Matrix::from_rows(vec![lattice.gram().mul_vec(delta.coords())])
        .expect("single row is rectangular");
    let kernel = linalg::int_kernel(&pairing_row);
    let restricted = kernel.mul(lattice.gram()).mul(&kernel.transpose());

    let q: RatMatrix = restricted.map(|x| Rat::from_integer(x.clone()));
    let (s, d) = linalg::congruence_diagonalize(&q)?;
    let kernel_q: RatMatrix = kernel.map(|x| Rat::from_integer(x.clone()));
    let mut rows: Vec<Vec<Rat>> = (0..d.rows())
        .filter(|&i| d[(i, i)].is_positive())
        .map(|i| {
            let row = Matrix::from_rows(vec![s.row(i).to_vec()]).expect("one row");
            row.mul(&kernel_q).row(0).to_vec()
        })
        .collect();

    let expected = if norm == Int::from(-2) { 3 } else { 2 };
    if rows.len() != expected {
        return Err(Error::Internal(format!(
            "orthogonal complement of a norm {norm} vector has {} positive directions, expected {expected}",
            rows.len()
        )));
    }
    if norm == Int::from(2) {
        rows.push(
            delta
                .coords()
                .iter()
                .map(|c| Rat::from_integer(c.clone()))
                .collect(),
        );
    }

    let basis = Matrix::from_rows(rows)?;
    let plane = PositivePlane::from_basis(lattice, basis, false)?;
    let image = plane.transform(&Isometry::reflection(delta)?)?;
    let residual = plane.distance(&image)?.value;
    Ok(FixedPlaneCertificate {
        root: delta.clone(),
        plane,
        residual,
    })
}

/// One fixed-plane certificate per supplied vector, in input order.
/// Fails loudly with the offending index on a vector of invalid norm or a
/// residual above [`CERTIFICATE_TOL`].
pub fn certify_generators(roots: &[LatticeVector]) -> Result<Vec<FixedPlaneCertificate>> {
    let mut out = Vec::with_capacity(roots.len());
    for (index, root) in roots.iter().enumerate() {
        let cert = match fixed_plane(root) {
            Ok(c) => c,
            Err(Error::NotReflectionVector(norm)) => {
                return Err(Error::InvalidRoot { index, norm })
            }
            Err(e) => return Err(e),
        };
        if !(cert.residual <= CERTIFICATE_TOL) {
            return Err(Error::CertificateResidual {
                index,
                residual: cert.residual,
            });
        }
        out.push(cert);
    }
    Ok(out)
}

/// Orbit of a vector under a finite generating set, closed under inverses.
#[derive(Clone, Debug)]
pub struct Orbit {
    /// Sorted coordinate-lexicographic order, for deterministic output.
    pub vectors: Vec<LatticeVector>,
    /// True when the search stopped at `cap` before closing.
    pub truncated: bool,
}

pub fn orbit(seed: &LatticeVector, gens: &[Isometry], cap: usize) -> Result<Orbit> {
    if cap == 0 {
        return Err(Error::Precondition("orbit cap must be at least 1".into()));
    }
    for g in gens {
        if !Lattice::same(g.lattice(), seed.lattice()) {
            return Err(Error::LatticeMismatch);
        }
    }
    let mut step = Vec::with_capacity(gens.len() * 2);
    for g in gens {
        step.push(g.clone());
        step.push(g.inverse());
    }

    let mut seen: BTreeSet<Vec<Int>> = BTreeSet::new();
    let mut queue: VecDeque<Vec<Int>> = VecDeque::new();
    seen.insert(seed.coords().to_vec());
    queue.push_back(seed.coords().to_vec());
    let mut truncated = false;
    'bfs: while let Some(coords) = queue.pop_front() {
        for g in &step {
            let image = g.matrix().mul_vec(&coords);
            if !seen.contains(&image) {
                if seen.len() == cap {
                    truncated = true;
                    break 'bfs;
                }
                seen.insert(image.clone());
                queue.push_back(image);
            }
        }
    }

    let lattice = seed.lattice();
    let vectors = seen
        .into_iter()
        .map(|coords| LatticeVector::from_coords(lattice, coords))
        .collect::<Result<Vec<_>>>()?;
    Ok(Orbit { vectors, truncated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    fn k3_uvec(block: usize, e: i64, f: i64) -> LatticeVector {
        let k3 = Lattice::k3();
        let mut coords = vec![0i64; 22];
        coords[16 + 2 * block] = e;
        coords[16 + 2 * block + 1] = f;
        LatticeVector::from_i64(&k3, &coords).unwrap()
    }

    #[test]
    fn reflection_swaps_hyperbolic_pair() {
        let k3 = Lattice::k3();
        let delta = k3_uvec(0, 1, -1);
        let s = Isometry::reflection(&delta).unwrap();
        let e1 = LatticeVector::basis(&k3, 16);
        let f1 = LatticeVector::basis(&k3, 17);
        assert_eq!(s.apply(&e1).unwrap(), f1);
        assert_eq!(s.apply(&f1).unwrap(), e1);
        assert_eq!(s.apply(&delta).unwrap(), -&delta);
    }

    #[test]
    fn positive_norm_reflection() {
        let k3 = Lattice::k3();
        let delta = k3_uvec(0, 1, 1);
        let s = Isometry::reflection(&delta).unwrap();
        let e1 = LatticeVector::basis(&k3, 16);
        let f1 = LatticeVector::basis(&k3, 17);
        // e1 - (e1,d) d = e1 - (e1 + f1) = -f1
        assert_eq!(s.apply(&e1).unwrap(), -&f1);
        assert_eq!(s.apply(&delta).unwrap(), -&delta);
    }

    #[test]
    fn reflection_rejects_isotropic_vector() {
        let k3 = Lattice::k3();
        let e1 = LatticeVector::basis(&k3, 16);
        assert!(matches!(
            Isometry::reflection(&e1),
            Err(Error::NotReflectionVector(_))
        ));
    }

    #[test]
    fn broken_form_detected() {
        let k3 = Lattice::k3();
        let mut m = IntMatrix::identity(22);
        m[(0, 1)] = Int::from(1);
        assert!(!is_isometry(&m, &k3).unwrap());
        assert!(is_isometry(&IntMatrix::identity(22), &k3).unwrap());
    }

    #[test]
    fn reflections_are_involutions() {
        let delta = k3_uvec(1, 1, -1);
        let s = Isometry::reflection(&delta).unwrap();
        let square = s.compose(&s).unwrap();
        assert_eq!(square, Isometry::identity(delta.lattice()));
        assert_eq!(s.inverse(), s);
        assert_eq!(s.det(), Int::from(-1));
    }

    #[test]
    fn classify_center_and_reflections() {
        let k3 = Lattice::k3();
        let id = Isometry::identity(&k3).classify();
        assert_eq!(id.det_sign, 1);
        assert_eq!(id.orientation, Orientation::Preserving);

        // -id has determinant (+1) in rank 22 and reverses positive frames.
        let neg = Isometry::neg_identity(&k3).classify();
        assert_eq!(neg.det_sign, 1);
        assert_eq!(neg.orientation, Orientation::Reversing);
        assert!(neg.in_special_group());

        let s_neg = Isometry::reflection(&k3_uvec(0, 1, -1)).unwrap().classify();
        assert_eq!(s_neg.det_sign, -1);
        assert_eq!(s_neg.orientation, Orientation::Preserving);

        let s_pos = Isometry::reflection(&k3_uvec(0, 1, 1)).unwrap().classify();
        assert_eq!(s_pos.det_sign, -1);
        assert_eq!(s_pos.orientation, Orientation::Reversing);
    }

    #[test]
    fn orbit_swap_pair() {
        let k3 = Lattice::k3();
        let e1 = LatticeVector::basis(&k3, 16);
        let s = Isometry::reflection(&k3_uvec(0, 1, -1)).unwrap();
        let orb = orbit(&e1, &[s], 100).unwrap();
        assert_eq!(orb.vectors.len(), 2);
        assert!(!orb.truncated);

        let lone = orbit(&e1, &[], 100).unwrap();
        assert_eq!(lone.vectors.len(), 1);
    }

    #[test]
    fn certify_rejects_bad_index() {
        let k3 = Lattice::k3();
        let e1 = LatticeVector::basis(&k3, 16);
        let err = certify_generators(&[e1]).unwrap_err();
        assert!(matches!(err, Error::InvalidRoot { index: 0, .. }));
        assert!(certify_generators(&[]).unwrap().is_empty());
    }
}
