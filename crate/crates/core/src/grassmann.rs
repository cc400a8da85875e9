//! Positive 3-planes in the real span of a lattice: period points.
//!
//! Validation and the orthogonal-complement pairing stay in exact rational
//! arithmetic; frames, projectors and distances are floating point. The
//! distance is the symmetric-space metric computed from hyperbolic principal
//! angles: with form-orthonormal frames `E_P`, `E_Q`, the singular values of
//! the cross-Gram `E_P G E_Q^T` are all >= 1, and the distance is the
//! Euclidean norm of their inverse hyperbolic cosines. It is invariant under
//! the isometry action, independent of frame and orientation, and vanishes
//! exactly on equal planes.

use std::sync::Arc;

use nalgebra::Matrix3;
use num_traits::{Signed, ToPrimitive};
use rand::Rng;

use crate::error::{Error, Result};
use crate::isometry::Isometry;
use crate::lattice::Lattice;
use crate::linalg;
use crate::matrix::Matrix;
use crate::{FloatMatrix, Int, Rat, RatMatrix};

/// A rational 3-plane on which the lattice pairing is positive definite.
/// Rows of `basis` span the plane in lattice coordinates. The `oriented`
/// flag records whether the row order is regarded as an orientation.
#[derive(Clone, Debug)]
pub struct PositivePlane {
    basis: RatMatrix,
    oriented: bool,
    lattice: Arc<Lattice>,
}

/// Distance between two positive 3-planes.
#[derive(Clone, Copy, Debug)]
pub struct PlaneDistance {
    /// Euclidean norm of the hyperbolic principal angles.
    pub value: f64,
    /// The three angles, largest first.
    pub angles: [f64; 3],
}

impl PositivePlane {
    /// Validates a candidate basis: exactly three rows of full rank whose
    /// restricted Gram matrix is positive definite. Both checks are exact:
    /// rank via the Hermite form of the cleared-denominator basis, and
    /// positivity via Sylvester's leading-principal-minor criterion.
    pub fn from_basis(lattice: &Arc<Lattice>, basis: RatMatrix, oriented: bool) -> Result<Self> {
        if basis.rows() != 3 || basis.cols() != lattice.rank() {
            return Err(Error::Shape(format!(
                "plane basis must be 3x{}, got {}x{}",
                lattice.rank(),
                basis.rows(),
                basis.cols()
            )));
        }
        let cleared = linalg::clear_row_denominators(&basis);
        if linalg::rank(&cleared) < 3 {
            return Err(Error::DegenerateBasis);
        }
        let restricted = cleared.mul(lattice.gram()).mul(&cleared.transpose());
        for k in 1..=3 {
            let minor = Matrix::from_fn(k, k, |i, j| restricted[(i, j)].clone());
            if !linalg::det_exact(&minor)?.is_positive() {
                return Err(Error::NotPositive);
            }
        }
        Ok(PositivePlane {
            basis,
            oriented,
            lattice: Arc::clone(lattice),
        })
    }

    /// The built-in reference plane: the span of the lattice's canonical
    /// maximal positive frame. For the rank-22 lattice this is
    /// `{e1+f1, e2+f2, e3+f3}`.
    pub fn reference(lattice: &Arc<Lattice>) -> Result<Self> {
        let frame = lattice.positive_frame();
        if frame.rows() != 3 {
            return Err(Error::Precondition(format!(
                "reference plane needs a lattice with exactly 3 positive directions, found {}",
                frame.rows()
            )));
        }
        Self::from_basis(lattice, frame.clone(), true)
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    pub fn oriented(&self) -> bool {
        self.oriented
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    /// The same plane with the orientation flag replaced.
    pub fn with_orientation(&self, oriented: bool) -> Self {
        PositivePlane {
            basis: self.basis.clone(),
            oriented,
            lattice: Arc::clone(&self.lattice),
        }
    }

    /// The exact restricted Gram matrix `B G B^T` of the stored basis.
    pub fn restricted_gram(&self) -> RatMatrix {
        let g: RatMatrix = self.lattice.gram().map(|x| Rat::from_integer(x.clone()));
        self.basis.mul(&g).mul(&self.basis.transpose())
    }

    /// A form-orthonormal frame: rows span the plane and `E G E^T = I` to
    /// floating-point accuracy (Gram-Schmidt in the lattice pairing).
    pub fn orthonormal_frame(&self) -> FloatMatrix {
        let n = self.lattice.rank();
        let g = gram_f64(&self.lattice);
        let mut rows: Vec<Vec<f64>> = self
            .basis
            .iter_rows()
            .map(|r| r.iter().map(|x| x.to_f64().expect("plane coordinates fit in f64")).collect())
            .collect();
        for i in 0..3 {
            for j in 0..i {
                let prev = rows[j].clone();
                let c = form_dot(&g, &rows[i], &prev);
                for k in 0..n {
                    rows[i][k] -= c * prev[k];
                }
            }
            let norm = form_dot(&g, &rows[i], &rows[i]);
            debug_assert!(norm > 0.0, "restricted form must be positive definite");
            let scale = norm.sqrt().recip();
            for k in 0..n {
                rows[i][k] *= scale;
            }
        }
        Matrix::from_rows(rows).expect("frame rows share the ambient dimension")
    }

    /// The form-projector `E^T E G` onto the plane; idempotent with trace 3.
    pub fn projector(&self) -> FloatMatrix {
        let e = self.orthonormal_frame();
        let g = gram_f64(&self.lattice);
        e.transpose().mul(&e).mul(&g)
    }

    /// Unoriented equality: the form-projectors agree entrywise within
    /// `tol`.
    pub fn equal_unoriented(&self, other: &PositivePlane, tol: f64) -> Result<bool> {
        if !Lattice::same(&self.lattice, &other.lattice) {
            return Err(Error::LatticeMismatch);
        }
        let p = self.projector();
        let q = other.projector();
        let n = self.lattice.rank();
        for i in 0..n {
            for j in 0..n {
                if (p[(i, j)] - q[(i, j)]).abs() > tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Oriented equality: same span, and if both planes carry orientations,
    /// the frame change between them must have positive determinant.
    /// Forgetting an orientation (flag false) collapses to unoriented
    /// equality.
    pub fn equal_oriented(&self, other: &PositivePlane, tol: f64) -> Result<bool> {
        if !self.equal_unoriented(other, tol)? {
            return Ok(false);
        }
        if !(self.oriented && other.oriented) {
            return Ok(true);
        }
        let cross = cross_gram(self, other);
        Ok(cross.determinant() > 0.0)
    }

    /// The image plane under an isometry; the basis rows are mapped exactly
    /// and the result re-validated. Positivity is preserved, so validation
    /// cannot fail for a genuine isometry.
    pub fn transform(&self, g: &Isometry) -> Result<PositivePlane> {
        if !Lattice::same(&self.lattice, g.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        let m: RatMatrix = g.matrix().map(|x| Rat::from_integer(x.clone()));
        let image = self.basis.mul(&m.transpose());
        Self::from_basis(&self.lattice, image, self.oriented)
    }

    /// Symmetric-space distance via hyperbolic principal angles.
    pub fn distance(&self, other: &PositivePlane) -> Result<PlaneDistance> {
        if !Lattice::same(&self.lattice, &other.lattice) {
            return Err(Error::LatticeMismatch);
        }
        let cross = cross_gram(self, other);
        let svd = cross.svd(false, false);
        let mut sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
        sigma.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
        let mut angles = [0.0f64; 3];
        for (i, s) in sigma.iter().enumerate() {
            // Singular values of the cross-Gram sit at >= 1 up to rounding.
            angles[i] = s.max(1.0).acosh();
        }
        let value = angles.iter().map(|a| a * a).sum::<f64>().sqrt();
        Ok(PlaneDistance { value, angles })
    }
}

/// Cross-Gram `E_P G E_Q^T` of the orthonormal frames, as a 3x3 matrix.
fn cross_gram(p: &PositivePlane, q: &PositivePlane) -> Matrix3<f64> {
    let ep = p.orthonormal_frame();
    let eq = q.orthonormal_frame();
    let g = gram_f64(&p.lattice);
    let m = ep.mul(&g).mul(&eq.transpose());
    Matrix3::from_fn(|i, j| m[(i, j)])
}

fn gram_f64(lattice: &Lattice) -> FloatMatrix {
    lattice
        .gram()
        .map(|x| x.to_f64().expect("gram entries fit in f64"))
}

fn form_dot(g: &FloatMatrix, a: &[f64], b: &[f64]) -> f64 {
    let gb = g.mul_vec(b);
    a.iter().zip(&gb).map(|(x, y)| x * y).sum()
}

/// Degrees of freedom of the space of maximal positive subspaces: the
/// product of the positive and negative indices of the form. For the
/// rank-22 lattice of signature (3,19) this is 57.
pub fn chart_dimension(lattice: &Lattice) -> usize {
    let (p, n, _) = lattice.signature();
    p * n
}

/// Random rational positive 3-plane: integer noise pulled toward the
/// positive cone by adding growing multiples of the lattice's positive
/// frame until the restricted form is positive definite. Plain rejection
/// sampling essentially never lands in the cone for indefinite signatures.
pub fn sample_positive_plane<R: Rng>(lattice: &Arc<Lattice>, rng: &mut R) -> Result<PositivePlane> {
    let frame = lattice.positive_frame();
    if frame.rows() < 3 {
        return Err(Error::Precondition(
            "sampling positive 3-planes needs at least 3 positive directions".into(),
        ));
    }
    let anchors = linalg::clear_row_denominators(frame);
    let n = lattice.rank();
    let noise: Vec<Vec<Int>> = (0..3)
        .map(|_| (0..n).map(|_| Int::from(rng.gen_range(-5i64..=5))).collect())
        .collect();
    let mut t = Int::from(1);
    for _ in 0..64 {
        let basis = Matrix::from_fn(3, n, |i, j| {
            Rat::from_integer(&noise[i][j] + &t * &anchors[(i, j)])
        });
        match PositivePlane::from_basis(lattice, basis, true) {
            Ok(plane) => return Ok(plane),
            Err(Error::DegenerateBasis) | Err(Error::NotPositive) => {
                t *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Internal(
        "positive-cone sampling did not converge".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeVector;

    fn k3_plane(rows: Vec<Vec<i64>>) -> Result<PositivePlane> {
        let k3 = Lattice::k3();
        let basis = Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| Rat::from_integer(Int::from(x))).collect())
                .collect(),
        )?;
        PositivePlane::from_basis(&k3, basis, true)
    }

    fn uvec_row(block: usize, e: i64, f: i64) -> Vec<i64> {
        let mut row = vec![0i64; 22];
        row[16 + 2 * block] = e;
        row[16 + 2 * block + 1] = f;
        row
    }

    #[test]
    fn reference_plane_has_doubled_identity_gram() {
        let k3 = Lattice::k3();
        let p0 = PositivePlane::reference(&k3).unwrap();
        let r = p0.restricted_gram();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 2 } else { 0 };
                assert_eq!(r[(i, j)], Rat::from_integer(Int::from(expected)));
            }
        }
    }

    #[test]
    fn isotropic_row_rejected() {
        let err = k3_plane(vec![uvec_row(0, 1, 0), uvec_row(1, 1, 1), uvec_row(2, 1, 1)])
            .unwrap_err();
        assert!(matches!(err, Error::NotPositive));
    }

    #[test]
    fn dependent_rows_rejected() {
        let err = k3_plane(vec![uvec_row(0, 1, 1), uvec_row(0, 2, 2), uvec_row(1, 1, 1)])
            .unwrap_err();
        assert!(matches!(err, Error::DegenerateBasis));
    }

    #[test]
    fn orthonormal_frame_postcondition() {
        let p = k3_plane(vec![uvec_row(0, 1, 2), uvec_row(1, 1, 1), uvec_row(2, 1, 1)]).unwrap();
        let e = p.orthonormal_frame();
        let g = gram_f64(p.lattice());
        let s = e.mul(&g).mul(&e.transpose());
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((s[(i, j)] - expected).abs() < 1e-12);
            }
        }
        // first row of the frame is (e1 + 2 f1) / 2, of self-pairing 4
        assert!((e[(0, 16)] - 0.5).abs() < 1e-12);
        assert!((e[(0, 17)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orientation_collapse_under_central_involution() {
        let k3 = Lattice::k3();
        let p0 = PositivePlane::reference(&k3).unwrap();
        let flipped = p0.transform(&Isometry::neg_identity(&k3)).unwrap();
        assert!(p0.equal_unoriented(&flipped, 1e-9).unwrap());
        assert!(!p0.equal_oriented(&flipped, 1e-9).unwrap());
        // forgetting orientation restores equality
        assert!(p0
            .equal_oriented(&flipped.with_orientation(false), 1e-9)
            .unwrap());

        let permuted = {
            let rows = vec![
                p0.basis().row(1).to_vec(),
                p0.basis().row(0).to_vec(),
                p0.basis().row(2).to_vec(),
            ];
            PositivePlane::from_basis(&k3, Matrix::from_rows(rows).unwrap(), true).unwrap()
        };
        assert!(p0.equal_unoriented(&permuted, 1e-9).unwrap());
        assert!(!p0.equal_oriented(&permuted, 1e-9).unwrap());
    }

    #[test]
    fn distance_closed_form() {
        let k3 = Lattice::k3();
        let p0 = PositivePlane::reference(&k3).unwrap();
        let q = k3_plane(vec![uvec_row(0, 1, 2), uvec_row(1, 1, 1), uvec_row(2, 1, 1)]).unwrap();
        let d = p0.distance(&q).unwrap();
        let expected = 0.5 * 2.0f64.ln();
        assert!((d.value - expected).abs() < 1e-9, "value {}", d.value);
        assert!((d.angles[0] - expected).abs() < 1e-9);
        assert!(d.angles[1].abs() < 1e-9 && d.angles[2].abs() < 1e-9);
        assert!(p0.distance(&p0).unwrap().value < 1e-12);
    }

    #[test]
    fn plane_fixed_pointwise_by_orthogonal_reflection() {
        let k3 = Lattice::k3();
        let p0 = PositivePlane::reference(&k3).unwrap();
        let mut coords = vec![0i64; 22];
        coords[16] = 1;
        coords[17] = -1;
        let delta = LatticeVector::from_i64(&k3, &coords).unwrap();
        let s = Isometry::reflection(&delta).unwrap();
        let image = p0.transform(&s).unwrap();
        assert_eq!(image.basis(), p0.basis());
    }

    #[test]
    fn chart_dimension_of_signature_3_19() {
        assert_eq!(chart_dimension(&Lattice::k3()), 57);
    }
}
