//! Exact linear algebra over the integers and rationals.
//!
//! Fraction-free (Bareiss) determinants, row Hermite normal form with a
//! unimodular transform, Smith invariant factors, saturated integer kernels,
//! unimodular inverses, and congruence diagonalization of symmetric forms
//! (Sylvester signature). Nothing here ever rounds: the integer routines are
//! generic over [`IntScalar`] (arbitrary-precision [`crate::Int`] in
//! production, `i64` in small tests) and the field routines over
//! [`FieldScalar`].

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::{Int, IntMatrix, Rat, RatMatrix};

/// Scalar bound for the integer algorithms.
pub trait IntScalar: Integer + Signed + Clone + fmt::Debug {}
impl<T: Integer + Signed + Clone + fmt::Debug> IntScalar for T {}

/// Scalar bound for the field algorithms; division must be exact.
pub trait FieldScalar: Num + Signed + Clone + fmt::Debug {}
impl<T: Num + Signed + Clone + fmt::Debug> FieldScalar for T {}

/// Exact determinant by fraction-free Gaussian elimination.
///
/// Every interior division is exact by the Bareiss identity, so the result
/// is the true determinant regardless of the scalar's rounding mode.
pub fn det_exact<T: IntScalar>(m: &Matrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "determinant needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(T::one());
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                Some(r) => {
                    a.swap_rows(k, r);
                    negate = !negate;
                }
                None => return Ok(T::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[(i, j)].clone() * a[(k, k)].clone()
                    - a[(i, k)].clone() * a[(k, j)].clone();
                a[(i, j)] = num / prev.clone();
            }
            a[(i, k)] = T::zero();
        }
        prev = a[(k, k)].clone();
    }
    let d = a[(n - 1, n - 1)].clone();
    Ok(if negate { -d } else { d })
}

/// Row Hermite normal form.
///
/// Returns `(h, u)` with `u * m = h`, `u` unimodular, pivots positive,
/// entries above each pivot reduced into `[0, pivot)`, and zero rows at the
/// bottom.
pub fn hnf<T: IntScalar>(m: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = Matrix::<T>::identity(rows);
    let mut pr = 0;
    for col in 0..cols {
        if pr == rows {
            break;
        }
        if h[(pr, col)].is_zero() {
            match (pr + 1..rows).find(|&r| !h[(r, col)].is_zero()) {
                Some(r) => {
                    h.swap_rows(pr, r);
                    u.swap_rows(pr, r);
                }
                None => continue,
            }
        }
        for r in pr + 1..rows {
            if h[(r, col)].is_zero() {
                continue;
            }
            let a = h[(pr, col)].clone();
            let b = h[(r, col)].clone();
            let eg = a.extended_gcd(&b);
            let ag = a / eg.gcd.clone();
            let bg = b / eg.gcd.clone();
            // rows (pr, r) <- (x*pr + y*r, -bg*pr + ag*r); the 2x2 block has
            // determinant (x*a + y*b)/g = 1, so u stays unimodular.
            combine_rows(&mut h, pr, r, &eg.x, &eg.y, &bg, &ag);
            combine_rows(&mut u, pr, r, &eg.x, &eg.y, &bg, &ag);
        }
        if h[(pr, col)].is_negative() {
            negate_row(&mut h, pr);
            negate_row(&mut u, pr);
        }
        let p = h[(pr, col)].clone();
        for i in 0..pr {
            let q = h[(i, col)].div_floor(&p);
            if !q.is_zero() {
                row_submul(&mut h, i, pr, &q);
                row_submul(&mut u, i, pr, &q);
            }
        }
        pr += 1;
    }
    (h, u)
}

fn combine_rows<T: IntScalar>(m: &mut Matrix<T>, i: usize, j: usize, x: &T, y: &T, bg: &T, ag: &T) {
    for c in 0..m.cols() {
        let vi = m[(i, c)].clone();
        let vj = m[(j, c)].clone();
        m[(i, c)] = x.clone() * vi.clone() + y.clone() * vj.clone();
        m[(j, c)] = ag.clone() * vj - bg.clone() * vi;
    }
}

fn negate_row<T: IntScalar>(m: &mut Matrix<T>, i: usize) {
    for c in 0..m.cols() {
        let v = m[(i, c)].clone();
        m[(i, c)] = -v;
    }
}

/// row i -= q * row j
fn row_submul<T: IntScalar>(m: &mut Matrix<T>, i: usize, j: usize, q: &T) {
    for c in 0..m.cols() {
        let v = m[(i, c)].clone() - q.clone() * m[(j, c)].clone();
        m[(i, c)] = v;
    }
}

/// Number of nonzero rows of the Hermite form, i.e. the rank over the
/// rationals.
pub fn rank<T: IntScalar>(m: &Matrix<T>) -> usize {
    let (h, _) = hnf(m);
    (0..h.rows())
        .filter(|&i| (0..h.cols()).any(|j| !h[(i, j)].is_zero()))
        .count()
}

/// Smith invariant factors `d1 | d2 | ...`, nonnegative, one slot per
/// diagonal position of the input shape (trailing zeros for rank deficiency).
pub fn snf<T: IntScalar>(m: &Matrix<T>) -> Vec<T> {
    let (rows, cols) = (m.rows(), m.cols());
    let slots = rows.min(cols);
    let mut a = m.clone();
    let mut out: Vec<T> = Vec::with_capacity(slots);
    let mut t = 0;
    while t < slots {
        // Move a nonzero entry of minimal magnitude to the pivot slot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[(i, j)].is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => a[(i, j)].abs() < a[(bi, bj)].abs(),
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap_rows(t, bi);
        swap_cols(&mut a, t, bj);

        'reduce: loop {
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].clone() / a[(t, t)].clone();
                row_submul(&mut a, i, t, &q);
                if !a[(i, t)].is_zero() {
                    // remainder is strictly smaller; promote it and restart
                    a.swap_rows(t, i);
                    continue 'reduce;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].clone() / a[(t, t)].clone();
                col_submul(&mut a, j, t, &q);
                if !a[(t, j)].is_zero() {
                    swap_cols(&mut a, t, j);
                    continue 'reduce;
                }
            }
            // Pivot row and column are clean; enforce that the pivot divides
            // the remaining submatrix so the diagonal chain divides.
            for i in t + 1..rows {
                for j in t + 1..cols {
                    if !a[(i, j)].clone().mod_floor(&a[(t, t)]).is_zero() {
                        row_add(&mut a, t, i);
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        out.push(a[(t, t)].abs());
        t += 1;
    }
    out.resize(slots, T::zero());
    out
}

fn swap_cols<T: IntScalar>(m: &mut Matrix<T>, i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in 0..m.rows() {
        let a = m[(r, i)].clone();
        let b = m[(r, j)].clone();
        m[(r, i)] = b;
        m[(r, j)] = a;
    }
}

/// col i -= q * col j
fn col_submul<T: IntScalar>(m: &mut Matrix<T>, i: usize, j: usize, q: &T) {
    for r in 0..m.rows() {
        let v = m[(r, i)].clone() - q.clone() * m[(r, j)].clone();
        m[(r, i)] = v;
    }
}

fn row_add<T: IntScalar>(m: &mut Matrix<T>, i: usize, j: usize) {
    for c in 0..m.cols() {
        let v = m[(i, c)].clone() + m[(j, c)].clone();
        m[(i, c)] = v;
    }
}

/// Basis of the saturated integer kernel `{ v : m * v = 0 }`.
///
/// Rows form a basis; the lattice they span is a direct summand, so every
/// integer solution is an integer combination of the rows. The basis is
/// returned in Hermite normal form, which makes the output canonical.
pub fn int_kernel<T: IntScalar>(m: &Matrix<T>) -> Matrix<T> {
    let (h, u) = hnf(&m.transpose());
    let n = m.cols();
    let mut rows_out = Vec::new();
    for r in 0..n {
        if (0..h.cols()).all(|c| h[(r, c)].is_zero()) {
            rows_out.push(u.row(r).to_vec());
        }
    }
    if rows_out.is_empty() {
        return Matrix::zeros(0, n);
    }
    let k = Matrix::from_rows(rows_out).expect("kernel rows share the ambient dimension");
    hnf(&k).0
}

/// Exact inverse of a unimodular integer matrix.
///
/// The Hermite form of a unimodular matrix is the identity, so the recorded
/// transform is the inverse; anything else reports the determinant.
pub fn inv_unimodular<T: IntScalar>(m: &Matrix<T>) -> Result<Matrix<T>>
where
    Int: From<T>,
{
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "inverse needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let (h, u) = hnf(m);
    if h == Matrix::<T>::identity(m.rows()) {
        Ok(u)
    } else {
        Err(Error::NotUnimodular(Int::from(det_exact(m)?)))
    }
}

/// Congruence diagonalization of a symmetric matrix over a field:
/// returns `(s, d)` with `s * g * s^T = d` diagonal.
///
/// A zero diagonal pivot is repaired by swapping in a later nonzero diagonal
/// entry, or failing that by adding a row and column that pair nontrivially
/// with it (which creates the entry `2*g[i][j]`, nonzero in characteristic 0).
pub fn congruence_diagonalize<T: FieldScalar>(g: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    if !g.is_symmetric() {
        return Err(Error::Shape("congruence diagonalization needs a symmetric matrix".into()));
    }
    let n = g.rows();
    let mut a = g.clone();
    let mut s = Matrix::<T>::identity(n);
    for i in 0..n {
        if a[(i, i)].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                sym_swap(&mut a, i, j);
                s.swap_rows(i, j);
            } else if let Some(j) = (i + 1..n).find(|&j| !a[(i, j)].is_zero()) {
                sym_add(&mut a, i, j);
                for c in 0..n {
                    let v = s[(i, c)].clone() + s[(j, c)].clone();
                    s[(i, c)] = v;
                }
            } else {
                continue; // fully isotropic direction: zero diagonal entry
            }
        }
        let p = a[(i, i)].clone();
        for j in i + 1..n {
            if a[(j, i)].is_zero() {
                continue;
            }
            let f = a[(j, i)].clone() / p.clone();
            sym_submul(&mut a, j, i, &f);
            for c in 0..n {
                let v = s[(j, c)].clone() - f.clone() * s[(i, c)].clone();
                s[(j, c)] = v;
            }
        }
    }
    Ok((s, a))
}

fn sym_swap<T: FieldScalar>(a: &mut Matrix<T>, i: usize, j: usize) {
    a.swap_rows(i, j);
    for r in 0..a.rows() {
        let x = a[(r, i)].clone();
        let y = a[(r, j)].clone();
        a[(r, i)] = y;
        a[(r, j)] = x;
    }
}

/// row i += row j and col i += col j
fn sym_add<T: FieldScalar>(a: &mut Matrix<T>, i: usize, j: usize) {
    for c in 0..a.cols() {
        let v = a[(i, c)].clone() + a[(j, c)].clone();
        a[(i, c)] = v;
    }
    for r in 0..a.rows() {
        let v = a[(r, i)].clone() + a[(r, j)].clone();
        a[(r, i)] = v;
    }
}

/// row j -= f * row i and col j -= f * col i
fn sym_submul<T: FieldScalar>(a: &mut Matrix<T>, j: usize, i: usize, f: &T) {
    for c in 0..a.cols() {
        let v = a[(j, c)].clone() - f.clone() * a[(i, c)].clone();
        a[(j, c)] = v;
    }
    for r in 0..a.rows() {
        let v = a[(r, j)].clone() - f.clone() * a[(r, i)].clone();
        a[(r, j)] = v;
    }
}

/// Sylvester signature `(positive, negative, zero)` of a symmetric integer
/// matrix, via exact rational congruence diagonalization.
pub fn signature<T: IntScalar>(g: &Matrix<T>) -> Result<(usize, usize, usize)> {
    if !g.is_symmetric() {
        return Err(Error::Shape("signature needs a symmetric matrix".into()));
    }
    let q: Matrix<Ratio<T>> = g.map(|x| Ratio::from_integer(x.clone()));
    let (_, d) = congruence_diagonalize(&q)?;
    let mut sig = (0usize, 0usize, 0usize);
    for i in 0..d.rows() {
        let v = &d[(i, i)];
        if v.is_zero() {
            sig.2 += 1;
        } else if v.is_positive() {
            sig.0 += 1;
        } else {
            sig.1 += 1;
        }
    }
    Ok(sig)
}

/// Scales each row by the (positive) lcm of its denominators, producing an
/// integer matrix with the same row span.
pub fn clear_row_denominators(m: &RatMatrix) -> IntMatrix {
    let lcms: Vec<Int> = (0..m.rows())
        .map(|i| {
            let mut lcm = Int::one();
            for c in 0..m.cols() {
                lcm = lcm.lcm(m[(i, c)].denom());
            }
            lcm
        })
        .collect();
    Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        let v = &m[(i, j)] * Rat::from_integer(lcms[i].clone());
        debug_assert!(v.is_integer());
        v.to_integer()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> Matrix<i64> {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn det_identity_and_hyperbolic() {
        assert_eq!(det_exact(&Matrix::<i64>::identity(8)).unwrap(), 1);
        assert_eq!(det_exact(&m(vec![vec![0, 1], vec![1, 0]])).unwrap(), -1);
    }

    #[test]
    fn det_rejects_non_square() {
        assert!(matches!(
            det_exact(&Matrix::<i64>::zeros(2, 3)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn hnf_examples() {
        let (h, u) = hnf(&Matrix::<i64>::identity(3));
        assert_eq!(h, Matrix::<i64>::identity(3));
        assert_eq!(u, Matrix::<i64>::identity(3));

        let (h, u) = hnf(&m(vec![vec![0, 1], vec![1, 0]]));
        assert_eq!(h, Matrix::<i64>::identity(2));
        assert_eq!(u.mul(&m(vec![vec![0, 1], vec![1, 0]])), h);

        let a = m(vec![vec![2, 0], vec![0, 3]]);
        let (h, _) = hnf(&a);
        assert_eq!(h, a);
    }

    #[test]
    fn snf_examples() {
        assert_eq!(snf(&Matrix::<i64>::identity(2)), vec![1, 1]);
        assert_eq!(snf(&m(vec![vec![0, 1], vec![1, 0]])), vec![1, 1]);
        assert_eq!(snf(&m(vec![vec![2, 0], vec![0, 4]])), vec![2, 4]);
        // divisibility is enforced, not just diagonalization
        assert_eq!(snf(&m(vec![vec![2, 0], vec![0, 3]])), vec![1, 6]);
    }

    #[test]
    fn kernel_examples() {
        let k = int_kernel(&m(vec![vec![1, 0, 0]]));
        assert_eq!(k, m(vec![vec![0, 1, 0], vec![0, 0, 1]]));

        // saturation: (1,-1), not (2,-2)
        let k = int_kernel(&m(vec![vec![2, 2]]));
        assert_eq!(k, m(vec![vec![1, -1]]));

        let k = int_kernel(&m(vec![vec![0, 0, 0]]));
        assert_eq!(k, Matrix::<i64>::identity(3));
    }

    #[test]
    fn unimodular_inverse() {
        let a = m(vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(inv_unimodular(&a).unwrap(), m(vec![vec![1, -1], vec![0, 1]]));
        let swap = m(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(inv_unimodular(&swap).unwrap(), swap);
        assert!(matches!(
            inv_unimodular(&m(vec![vec![2, 0], vec![0, 1]])),
            Err(Error::NotUnimodular(_))
        ));
    }

    #[test]
    fn signature_hyperbolic_plane() {
        assert_eq!(signature(&m(vec![vec![0, 1], vec![1, 0]])).unwrap(), (1, 1, 0));
        assert_eq!(signature(&m(vec![vec![2]])).unwrap(), (1, 0, 0));
        assert_eq!(signature(&Matrix::<i64>::zeros(2, 2)).unwrap(), (0, 0, 2));
        assert!(signature(&m(vec![vec![0, 1], vec![2, 0]])).is_err());
    }
}
