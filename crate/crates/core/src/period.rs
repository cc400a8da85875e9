//! Smooth-versus-orbifold decisions for period points.
//!
//! Given a rational positive 3-plane, this module computes the saturated
//! orthogonal sublattice (rank 19 and negative definite in the rank-22
//! lattice), enumerates every vector of self-pairing -2 orthogonal to the
//! plane, and classifies the resulting root system by ADE type. A plane
//! whose complement carries no roots is a smooth period point; otherwise the
//! ADE decomposition names the singularities.
//!
//! The enumeration is exact end to end: LLL reduction with the 3/4 Lovász
//! parameter in rational arithmetic prepares the Gram matrix, and a
//! depth-first search over exact partial sums (the classical short-vector
//! enumeration for definite forms) lists all solutions of `x^T G x = target`
//! with both signs. Floating point never enters.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ade::{ade_classify, total_root_count, AdeComponent};
use crate::error::{Error, Result};
use crate::grassmann::PositivePlane;
use crate::lattice::LatticeVector;
use crate::linalg;
use crate::{Int, IntMatrix, Rat};

/// Saturated orthogonal complement of a plane inside its lattice.
#[derive(Clone, Debug)]
pub struct OrthoSublattice {
    /// Rows: primitive basis of the complement, in lattice coordinates.
    pub basis: IntMatrix,
    /// Gram matrix of the pairing restricted to the complement.
    pub restricted_gram: IntMatrix,
}

/// Result of LLL reduction of a positive definite Gram matrix.
#[derive(Clone, Debug)]
pub struct LllReduction {
    /// Unimodular row transform: `reduced_gram = transform * g * transform^T`.
    pub transform: IntMatrix,
    pub reduced_gram: IntMatrix,
    pub swaps: u64,
}

/// Counters for one verdict computation.
#[derive(Clone, Debug, Default)]
pub struct EnumerationStats {
    pub nodes_visited: u64,
    pub lll_swaps: u64,
    pub wall_time: Duration,
}

/// Outcome of a period-point check.
#[derive(Clone, Debug)]
pub struct PeriodVerdict {
    /// True when the orthogonal complement meets no roots: a smooth point.
    pub in_t: bool,
    /// All roots orthogonal to the plane, both signs included.
    pub roots: Vec<LatticeVector>,
    /// ADE decomposition of the root system, largest component first.
    pub ade: Vec<AdeComponent>,
    pub stats: EnumerationStats,
}

impl PeriodVerdict {
    pub fn root_count(&self) -> usize {
        self.roots.len()
    }
}

/// Saturated integer kernel of the pairing against the plane, with its
/// restricted Gram matrix. For a valid positive 3-plane in a lattice of
/// signature (3,q) the complement has rank q and is negative definite; that
/// is asserted, not assumed.
pub fn ortho_sublattice(plane: &PositivePlane) -> Result<OrthoSublattice> {
    let lattice = plane.lattice();
    let cleared = linalg::clear_row_denominators(plane.basis());
    let pairing = cleared.mul(lattice.gram());
    let basis = linalg::int_kernel(&pairing);
    let restricted = basis.mul(lattice.gram()).mul(&basis.transpose());

    let expected = lattice.rank() - 3;
    let (p, n, z) = linalg::signature(&restricted)?;
    if (p, n, z) != (0, expected, 0) {
        return Err(Error::Internal(format!(
            "orthogonal complement has signature ({p},{n},{z}), expected (0,{expected},0)"
        )));
    }
    Ok(OrthoSublattice {
        basis,
        restricted_gram: restricted,
    })
}

/// LLL reduction of a positive definite Gram matrix in exact rational
/// arithmetic, Lovász parameter 3/4. Returns a unimodular transform, the
/// congruent reduced Gram matrix, and the number of swap steps.
pub fn lll_reduce(gram: &IntMatrix) -> Result<LllReduction> {
    if !gram.is_symmetric() {
        return Err(Error::Shape("reduction needs a symmetric Gram matrix".into()));
    }
    let n = gram.rows();
    let mut c = gram.clone();
    let mut u = IntMatrix::identity(n);
    let mut swaps = 0u64;
    if n == 0 {
        return Ok(LllReduction {
            transform: u,
            reduced_gram: c,
            swaps,
        });
    }

    let rat = |x: &Int| Rat::from_integer(x.clone());
    let mut mu: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n]; n];
    let mut b: Vec<Rat> = vec![Rat::zero(); n];
    b[0] = rat(&c[(0, 0)]);
    if !b[0].is_positive() {
        return Err(Error::NotDefinite(
            "Gram matrix is not positive definite".into(),
        ));
    }
    let delta = Ratio::new(Int::from(3), Int::from(4));

    // row k of u and c picks up `-q * row l`; c symmetrically in the column
    let red = |c: &mut IntMatrix, u: &mut IntMatrix, mu: &mut Vec<Vec<Rat>>, k: usize, l: usize| {
        let half = Ratio::new(Int::one(), Int::from(2));
        if mu[k][l].abs() <= half {
            return;
        }
        let q = (&mu[k][l] + &half).floor().to_integer();
        for j in 0..n {
            let v = &c[(k, j)] - &q * &c[(l, j)];
            c[(k, j)] = v;
        }
        for j in 0..n {
            let v = &c[(j, k)] - &q * &c[(j, l)];
            c[(j, k)] = v;
        }
        for j in 0..n {
            let v = &u[(k, j)] - &q * &u[(l, j)];
            u[(k, j)] = v;
        }
        let qr = Rat::from_integer(q);
        for i in 0..l {
            let v = &mu[k][i] - &qr * &mu[l][i];
            mu[k][i] = v;
        }
        let v = &mu[k][l] - qr;
        mu[k][l] = v;
    };

    let mut k = 1usize;
    let mut kmax = 0usize;
    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..k {
                let mut v = rat(&c[(k, j)]);
                for i in 0..j {
                    v -= &mu[j][i] * &mu[k][i] * &b[i];
                }
                mu[k][j] = v / &b[j];
            }
            let mut v = rat(&c[(k, k)]);
            for j in 0..k {
                v -= &mu[k][j] * &mu[k][j] * &b[j];
            }
            if !v.is_positive() {
                return Err(Error::NotDefinite(
                    "Gram matrix is not positive definite".into(),
                ));
            }
            b[k] = v;
        }

        red(&mut c, &mut u, &mut mu, k, k - 1);
        let lovasz = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if b[k] < lovasz {
            // swap rows k-1 and k, then patch the orthogonalization data
            u.swap_rows(k - 1, k);
            c.swap_rows(k - 1, k);
            for j in 0..n {
                let x = c[(j, k - 1)].clone();
                let y = c[(j, k)].clone();
                c[(j, k - 1)] = y;
                c[(j, k)] = x;
            }
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = t;
            }
            let m = mu[k][k - 1].clone();
            let big = &b[k] + &m * &m * &b[k - 1];
            mu[k][k - 1] = &m * &b[k - 1] / &big;
            b[k] = &b[k - 1] * &b[k] / &big;
            b[k - 1] = big;
            for i in k + 1..=kmax {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m * &t;
                mu[i][k - 1] = &t + &mu[k][k - 1] * &mu[i][k];
            }
            swaps += 1;
            k = k.max(2) - 1;
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                red(&mut c, &mut u, &mut mu, k, l);
            }
            k += 1;
        }
    }

    debug_assert_eq!(
        u.mul(gram).mul(&u.transpose()),
        c,
        "reduced Gram must be congruent to the input"
    );
    Ok(LllReduction {
        transform: u,
        reduced_gram: c,
        swaps,
    })
}

/// All integer vectors `x` with `x^T G x = target` for a positive definite
/// `G`, both signs included, exact and complete.
pub fn enumerate_norm(gram: &IntMatrix, target: &Int) -> Result<Vec<Vec<Int>>> {
    enumerate_norm_with(gram, target, 1).map(|(v, _)| v)
}

/// As [`enumerate_norm`], splitting the outermost coordinate across
/// `jobs` workers. The merged output is identical to the sequential order.
/// Also returns the number of search nodes visited.
pub fn enumerate_norm_with(
    gram: &IntMatrix,
    target: &Int,
    jobs: usize,
) -> Result<(Vec<Vec<Int>>, u64)> {
    if !gram.is_symmetric() {
        return Err(Error::Shape("enumeration needs a symmetric Gram matrix".into()));
    }
    if !target.is_positive() {
        return Err(Error::Precondition("enumeration target must be >= 1".into()));
    }
    let n = gram.rows();
    if n == 0 {
        return Ok((Vec::new(), 0));
    }
    let (mu, b) = gram_schmidt(gram)?;
    let target = Rat::from_integer(target.clone());

    let top = candidate_range(&mu, &b, &target, n - 1, &vec![Int::zero(); n], &Rat::zero())?;
    if jobs <= 1 || top.len() < 2 {
        let mut search = Search {
            mu: &mu,
            b: &b,
            target: &target,
            out: Vec::new(),
            nodes: 0,
        };
        let mut coords = vec![Int::zero(); n];
        for x in top {
            search.step(n - 1, x, &mut coords, &Rat::zero())?;
        }
        return Ok((search.out, search.nodes));
    }

    let results: Vec<OnceLock<Result<(Vec<Vec<Int>>, u64)>>> =
        (0..top.len()).map(|_| OnceLock::new()).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(top.len()) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= top.len() {
                    break;
                }
                let mut search = Search {
                    mu: &mu,
                    b: &b,
                    target: &target,
                    out: Vec::new(),
                    nodes: 0,
                };
                let mut coords = vec![Int::zero(); n];
                let outcome = search
                    .step(n - 1, top[idx], &mut coords, &Rat::zero())
                    .map(|()| (search.out, search.nodes));
                results[idx]
                    .set(outcome)
                    .expect("each index is claimed once");
            });
        }
    });

    let mut out = Vec::new();
    let mut nodes = 0;
    for cell in results {
        let (mut part, part_nodes) = cell.into_inner().expect("worker finished")?;
        out.append(&mut part);
        nodes += part_nodes;
    }
    Ok((out, nodes))
}

/// Rational Gram-Schmidt data from a Gram matrix: `mu` strictly lower
/// triangular, `b` the positive squared norms of the orthogonalized basis.
fn gram_schmidt(gram: &IntMatrix) -> Result<(Vec<Vec<Rat>>, Vec<Rat>)> {
    let n = gram.rows();
    let mut mu: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n]; n];
    let mut b: Vec<Rat> = vec![Rat::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut v = Rat::from_integer(gram[(i, j)].clone());
            for k in 0..j {
                v -= &mu[i][k] * &mu[j][k] * &b[k];
            }
            mu[i][j] = v / &b[j];
        }
        let mut v = Rat::from_integer(gram[(i, i)].clone());
        for k in 0..i {
            v -= &mu[i][k] * &mu[i][k] * &b[k];
        }
        if !v.is_positive() {
            return Err(Error::NotDefinite(
                "Gram matrix is not positive definite".into(),
            ));
        }
        b[i] = v;
    }
    Ok((mu, b))
}

struct Search<'a> {
    mu: &'a [Vec<Rat>],
    b: &'a [Rat],
    target: &'a Rat,
    out: Vec<Vec<Int>>,
    nodes: u64,
}

impl Search<'_> {
    /// Fixes `coords[level] = x`, prunes on the exact partial sum, and
    /// recurses inward.
    fn step(&mut self, level: usize, x: i64, coords: &mut Vec<Int>, partial: &Rat) -> Result<()> {
        self.nodes += 1;
        let center = self.center(level, coords);
        let dev = Rat::from_integer(Int::from(x)) + center;
        let total = partial + &dev * &dev * &self.b[level];
        if &total > self.target {
            return Ok(());
        }
        coords[level] = Int::from(x);
        if level == 0 {
            if &total == self.target {
                self.out.push(coords.clone());
            }
        } else {
            let inner = candidate_range(self.mu, self.b, self.target, level - 1, coords, &total)?;
            for y in inner {
                self.step(level - 1, y, coords, &total)?;
            }
        }
        coords[level] = Int::zero();
        Ok(())
    }

    fn center(&self, level: usize, coords: &[Int]) -> Rat {
        let mut c = Rat::zero();
        for j in level + 1..coords.len() {
            if !coords[j].is_zero() {
                c += &self.mu[j][level] * Rat::from_integer(coords[j].clone());
            }
        }
        c
    }
}

/// The integers `x` with `(x + center)^2 * b[level] <= target - partial`,
/// widened by safe square-root bounds and ordered by increasing absolute
/// value with the positive one first. Exact pruning in `step` removes the
/// widening.
fn candidate_range(
    mu: &[Vec<Rat>],
    b: &[Rat],
    target: &Rat,
    level: usize,
    coords: &[Int],
    partial: &Rat,
) -> Result<Vec<i64>> {
    let mut center = Rat::zero();
    for j in level + 1..coords.len() {
        if !coords[j].is_zero() {
            center += &mu[j][level] * Rat::from_integer(coords[j].clone());
        }
    }
    let budget = target - partial;
    let rho = budget / &b[level];
    debug_assert!(!rho.is_negative());
    // sqrt(rho) <= (isqrt(num*den) + 1) / den
    let root = (rho.numer() * rho.denom()).sqrt() + 1;
    let radius = Ratio::new(root, rho.denom().clone());
    let lo = (-&center - &radius).ceil().to_integer();
    let hi = (-&center + &radius).floor().to_integer();
    let (Some(lo), Some(hi)) = (lo.to_i64(), hi.to_i64()) else {
        return Err(Error::Precondition(
            "enumeration coordinate bound exceeds i64".into(),
        ));
    };
    let mut cands: Vec<i64> = (lo..=hi).collect();
    cands.sort_by_key(|&x| (x.unsigned_abs(), x < 0));
    Ok(cands)
}

/// Full verdict for a rational positive 3-plane.
pub fn period_check(plane: &PositivePlane) -> Result<PeriodVerdict> {
    period_check_with(plane, 1)
}

/// As [`period_check`] with a worker count forwarded to the enumeration.
pub fn period_check_with(plane: &PositivePlane, jobs: usize) -> Result<PeriodVerdict> {
    let started = Instant::now();
    let sub = ortho_sublattice(plane)?;
    let negated = sub.restricted_gram.map(|x| -x.clone());
    let lll = lll_reduce(&negated)?;
    let (solutions, nodes) = enumerate_norm_with(&lll.reduced_gram, &Int::from(2), jobs)?;

    // reduced coordinates -> complement basis -> lattice coordinates
    let rows_in_lattice = lll.transform.mul(&sub.basis);
    let lattice = plane.lattice();
    let cleared = linalg::clear_row_denominators(plane.basis());
    let pairing = cleared.mul(lattice.gram());

    let mut roots = Vec::with_capacity(solutions.len());
    for x in solutions {
        let gamma = rows_in_lattice.vec_mul(&x);
        let root = LatticeVector::from_coords(lattice, gamma)?;
        if root.norm() != Int::from(-2) {
            return Err(Error::Internal("enumerated vector has wrong norm".into()));
        }
        if pairing.mul_vec(root.coords()).iter().any(|t| !t.is_zero()) {
            return Err(Error::Internal(
                "enumerated vector is not orthogonal to the plane".into(),
            ));
        }
        roots.push(root);
    }

    let ade = ade_classify(&roots)?;
    let accounted = total_root_count(&ade);
    if accounted != roots.len() {
        return Err(Error::Classification(format!(
            "ADE accounting mismatch: components cover {accounted} roots, enumeration found {}",
            roots.len()
        )));
    }

    Ok(PeriodVerdict {
        in_t: roots.is_empty(),
        ade,
        stats: EnumerationStats {
            nodes_visited: nodes,
            lll_swaps: lll.swaps,
            wall_time: started.elapsed(),
        },
        roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::matrix::Matrix;

    fn int_matrix(rows: Vec<Vec<i64>>) -> IntMatrix {
        Matrix::from_rows(
            rows.into_iter()
                .map(|r| r.into_iter().map(Int::from).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn lll_leaves_identity_alone() {
        let id = IntMatrix::identity(4);
        let r = lll_reduce(&id).unwrap();
        assert_eq!(r.transform, IntMatrix::identity(4));
        assert_eq!(r.reduced_gram, id);
        assert_eq!(r.swaps, 0);
    }

    #[test]
    fn lll_small_gram() {
        let g = int_matrix(vec![vec![4, 2], vec![2, 4]]);
        let r = lll_reduce(&g).unwrap();
        assert!(r.reduced_gram[(0, 0)] <= Int::from(4));
        assert!(r.reduced_gram[(1, 1)] <= Int::from(4));
        assert_eq!(
            linalg::det_exact(&r.reduced_gram).unwrap(),
            Int::from(12),
            "congruence preserves the determinant of a unimodular transform"
        );
        assert_eq!(r.transform.mul(&g).mul(&r.transform.transpose()), r.reduced_gram);
    }

    #[test]
    fn lll_rejects_indefinite() {
        let g = int_matrix(vec![vec![0, 1], vec![1, 0]]);
        assert!(matches!(lll_reduce(&g), Err(Error::NotDefinite(_))));
    }

    #[test]
    fn lll_e8_keeps_minimal_diagonal() {
        let e8 = Lattice::e8();
        let r = lll_reduce(e8.gram()).unwrap();
        for i in 0..8 {
            assert_eq!(r.reduced_gram[(i, i)], Int::from(2));
        }
    }

    #[test]
    fn enumerate_rank_one() {
        let g = int_matrix(vec![vec![2]]);
        let got = enumerate_norm(&g, &Int::from(2)).unwrap();
        assert_eq!(got.len(), 2);
        assert!(got.contains(&vec![Int::from(1)]));
        assert!(got.contains(&vec![Int::from(-1)]));
    }

    #[test]
    fn enumerate_rejects_indefinite_and_bad_target() {
        let g = int_matrix(vec![vec![0, 1], vec![1, 0]]);
        assert!(matches!(
            enumerate_norm(&g, &Int::from(2)),
            Err(Error::NotDefinite(_))
        ));
        let pd = int_matrix(vec![vec![2]]);
        assert!(matches!(
            enumerate_norm(&pd, &Int::from(0)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn enumerate_e8_roots() {
        let e8 = Lattice::e8();
        let roots = enumerate_norm(e8.gram(), &Int::from(2)).unwrap();
        assert_eq!(roots.len(), 240);
    }

    #[test]
    fn parallel_enumeration_matches_sequential() {
        let e8 = Lattice::e8();
        let (seq, _) = enumerate_norm_with(e8.gram(), &Int::from(2), 1).unwrap();
        let (par, _) = enumerate_norm_with(e8.gram(), &Int::from(2), 4).unwrap();
        assert_eq!(seq, par);
    }
}
