//! Dense matrix primitives: determinants, adjugates, exhaustive minor
//! scans, row normalization, unit-ball volumes, and orthonormal subspace
//! bases.
//!
//! Matrices carry an optional exact rational mirror. When present,
//! determinants and adjugates run through fraction-free (Bareiss)
//! elimination over big integers and are exact; otherwise they use
//! partial-pivot elimination in binary64.

use itertools::Itertools;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::tol;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericsError {
    #[error("row {0} has near-zero norm and no usable direction")]
    ZeroRow(usize),
    #[error("scan requires {required} determinant evaluations, budget is {budget}")]
    SizeTooLarge { required: u128, budget: u128 },
    #[error("vectors are rank deficient: numerical rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
}

/// Dense row-major matrix over binary64, optionally mirrored by exact
/// rational entries when every entry is known exactly.
#[derive(Debug, Clone)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    exact: Option<Vec<BigRational>>,
}

impl Matrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(m * n);
        for row in &rows {
            assert_eq!(row.len(), n, "matrix rows must have equal length");
            assert!(row.iter().all(|x| x.is_finite()), "matrix entries must be finite");
            data.extend_from_slice(row);
        }
        Self { rows: m, cols: n, data, exact: None }
    }

    pub fn from_rational_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut exact = Vec::with_capacity(m * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix rows must have equal length");
            exact.extend(row);
        }
        let data = exact.iter().map(|r| r.to_f64().expect("rational fits f64")).collect();
        Self { rows: m, cols: n, data, exact: Some(exact) }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        Self::from_rational_rows(rows)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// True when the exact rational mirror is available.
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn exact_entry(&self, i: usize, j: usize) -> Option<&BigRational> {
        self.exact.as_ref().map(|e| &e[i * self.cols + j])
    }

    /// Submatrix over the given row and column indices, in order.
    /// Exactness is inherited.
    pub fn submatrix(&self, row_ids: &[usize], col_ids: &[usize]) -> Matrix {
        let data: Vec<f64> = row_ids
            .iter()
            .flat_map(|&i| col_ids.iter().map(move |&j| self.get(i, j)))
            .collect();
        let exact = self.exact.as_ref().map(|e| {
            row_ids
                .iter()
                .flat_map(|&i| col_ids.iter().map(move |&j| e[i * self.cols + j].clone()))
                .collect()
        });
        Matrix { rows: row_ids.len(), cols: col_ids.len(), data, exact }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Determinant of a square matrix. Exact matrices go through Bareiss
/// fraction-free elimination; floating matrices through partial pivoting.
/// Zero is a valid return for singular input.
pub fn determinant(m: &Matrix) -> f64 {
    assert!(m.is_square(), "determinant requires a square matrix");
    match determinant_exact(m) {
        Some(d) => d.to_f64().expect("determinant fits f64"),
        None => det_f64(m.data.clone(), m.rows),
    }
}

/// Exact determinant, available only on the rational path.
pub fn determinant_exact(m: &Matrix) -> Option<BigRational> {
    assert!(m.is_square(), "determinant requires a square matrix");
    let exact = m.exact.as_ref()?;
    Some(det_bareiss_rational(exact, m.rows))
}

fn det_f64(mut a: Vec<f64>, n: usize) -> f64 {
    let mut det = 1.0;
    for k in 0..n {
        let mut pivot_row = k;
        let mut pivot_mag = a[k * n + k].abs();
        for i in k + 1..n {
            let mag = a[i * n + k].abs();
            if mag > pivot_mag {
                pivot_row = i;
                pivot_mag = mag;
            }
        }
        if pivot_mag == 0.0 {
            return 0.0;
        }
        if pivot_row != k {
            for j in 0..n {
                a.swap(k * n + j, pivot_row * n + j);
            }
            det = -det;
        }
        let pivot = a[k * n + k];
        det *= pivot;
        for i in k + 1..n {
            let factor = a[i * n + k] / pivot;
            for j in k + 1..n {
                a[i * n + j] -= factor * a[k * n + j];
            }
        }
    }
    det
}

/// Bareiss elimination over integers after clearing row denominators.
fn det_bareiss_rational(entries: &[BigRational], n: usize) -> BigRational {
    if n == 0 {
        return BigRational::one();
    }
    let mut scaled = Vec::with_capacity(n * n);
    let mut denom = BigInt::one();
    for i in 0..n {
        let row = &entries[i * n..(i + 1) * n];
        let lcm = row
            .iter()
            .fold(BigInt::one(), |acc, r| num::integer::lcm(acc, r.denom().clone()));
        for r in row {
            scaled.push(r.numer() * (&lcm / r.denom()));
        }
        denom *= lcm;
    }
    BigRational::new(det_bareiss_int(scaled, n), denom)
}

fn det_bareiss_int(mut m: Vec<BigInt>, n: usize) -> BigInt {
    let mut negated = false;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k * n + k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i * n + k].is_zero()) else {
                return BigInt::zero();
            };
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            negated = !negated;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                m[i * n + j] = v / &prev; // exact by the Bareiss identity
            }
            m[i * n + k] = BigInt::zero();
        }
        prev = m[k * n + k].clone();
    }
    let det = m[(n - 1) * n + (n - 1)].clone();
    if negated {
        -det
    } else {
        det
    }
}

/// Adjugate of a square matrix (`n >= 2`), satisfying
/// `M * adj(M) = det(M) * I`. Column `k` is orthogonal to every row of `M`
/// except row `k`. Exactness is inherited.
pub fn adjugate(m: &Matrix) -> Matrix {
    assert!(m.is_square() && m.rows >= 2, "adjugate requires a square matrix, n >= 2");
    let n = m.rows;
    let all: Vec<usize> = (0..n).collect();
    let cofactor_ids = |skip: usize| -> Vec<usize> {
        all.iter().copied().filter(|&x| x != skip).collect()
    };
    if m.is_exact() {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        // adj[i][j] is the (j, i) cofactor.
                        let minor = m.submatrix(&cofactor_ids(j), &cofactor_ids(i));
                        let d = determinant_exact(&minor).expect("exact submatrix");
                        if (i + j) % 2 == 0 {
                            d
                        } else {
                            -d
                        }
                    })
                    .collect()
            })
            .collect();
        Matrix::from_rational_rows(rows)
    } else {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let minor = m.submatrix(&cofactor_ids(j), &cofactor_ids(i));
                        let d = determinant(&minor);
                        if (i + j) % 2 == 0 {
                            d
                        } else {
                            -d
                        }
                    })
                    .collect()
            })
            .collect();
        Matrix::from_rows(rows)
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    r
}

/// Largest `|det|` over all `k x k` sub-determinants of `a`, exhaustive
/// over every row and column subset, with the default enumeration budget.
pub fn minor_max(a: &Matrix, k: usize) -> Result<f64, NumericsError> {
    minor_max_with_budget(a, k, tol::DEFAULT_ENUMERATION_BUDGET)
}

pub fn minor_max_with_budget(a: &Matrix, k: usize, budget: u128) -> Result<f64, NumericsError> {
    assert!(k >= 1 && k <= a.rows().min(a.cols()), "minor order out of range");
    let required = binomial(a.rows(), k).saturating_mul(binomial(a.cols(), k));
    if required > budget {
        return Err(NumericsError::SizeTooLarge { required, budget });
    }
    let col_subsets: Vec<Vec<usize>> = (0..a.cols()).combinations(k).collect();
    // Each minor is evaluated independently and max is order-free, so the
    // result does not depend on the worker count.
    let best = (0..a.rows())
        .combinations(k)
        .par_bridge()
        .map(|row_ids| {
            col_subsets
                .iter()
                .map(|col_ids| determinant(&a.submatrix(&row_ids, col_ids)).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}

/// Unit-ball geometry in `R^n`.
#[derive(Debug, Clone, Copy)]
pub struct BallGeometry {
    pub dimension: usize,
    pub volume: f64,
}

/// Lebesgue measure of the unit ball, `pi^(n/2) / Gamma(n/2 + 1)`,
/// evaluated through the recursion `V_n = V_{n-2} * 2*pi/n`.
pub fn ball_volume(n: usize) -> BallGeometry {
    assert!(n >= 1, "ball volume requires n >= 1");
    let mut odd = 2.0; // V_1
    let mut even = std::f64::consts::PI; // V_2
    let volume = match n {
        1 => odd,
        2 => even,
        _ => {
            let mut v = 0.0;
            for d in 3..=n {
                if d % 2 == 1 {
                    odd *= 2.0 * std::f64::consts::PI / d as f64;
                    v = odd;
                } else {
                    even *= 2.0 * std::f64::consts::PI / d as f64;
                    v = even;
                }
            }
            v
        }
    };
    BallGeometry { dimension: n, volume }
}

/// The `pi^n / n!` ball-volume form carried in reports alongside the
/// standard one.
pub fn paper_ball_volume(n: usize) -> f64 {
    let mut v = 1.0;
    for d in 1..=n {
        v *= std::f64::consts::PI / d as f64;
    }
    v
}

/// Scales every row of `a` to unit Euclidean norm and divides `b`
/// accordingly; the feasible set of `Ax <= b` is unchanged.
///
/// Exact rows stay exact when the scaling factor is rational (the squared
/// norm is a perfect rational square); otherwise the output drops to the
/// floating path.
pub fn normalize_rows(a: &Matrix, b: &[f64]) -> Result<(Matrix, Vec<f64>), NumericsError> {
    assert_eq!(a.rows(), b.len(), "b length must match row count");
    for i in 0..a.rows() {
        if norm(a.row(i)) <= tol::EPS_ZERO_ROW {
            return Err(NumericsError::ZeroRow(i));
        }
    }

    if a.is_exact() {
        let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(a.rows());
        let mut scales = Vec::with_capacity(a.rows());
        let mut all_exact = true;
        for i in 0..a.rows() {
            let row: Vec<BigRational> =
                (0..a.cols()).map(|j| a.exact_entry(i, j).unwrap().clone()).collect();
            let s2: BigRational = row.iter().map(|x| x * x).sum();
            match rational_sqrt(&s2) {
                Some(s) => {
                    scales.push(s.to_f64().expect("norm fits f64"));
                    rows.push(row.iter().map(|x| x / &s).collect());
                }
                None => {
                    all_exact = false;
                    break;
                }
            }
        }
        if all_exact {
            let b_out = b.iter().zip(&scales).map(|(bi, s)| bi / s).collect();
            return Ok((Matrix::from_rational_rows(rows), b_out));
        }
    }

    let mut rows = Vec::with_capacity(a.rows());
    let mut b_out = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        let s = norm(a.row(i));
        rows.push(a.row(i).iter().map(|x| x / s).collect());
        b_out.push(b[i] / s);
    }
    Ok((Matrix::from_rows(rows), b_out))
}

fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let sn = x.numer().sqrt();
    if &(&sn * &sn) != x.numer() {
        return None;
    }
    let sd = x.denom().sqrt();
    if &(&sd * &sd) != x.denom() {
        return None;
    }
    Some(BigRational::new(sn, sd))
}

/// Orthonormal basis of the span of the given vectors via modified
/// Gram-Schmidt with reorthogonalization. The inputs must be linearly
/// independent within tolerance.
pub fn orthonormal_subspace_basis(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, NumericsError> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let original_norm = norm(v);
        let mut u = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &u);
                for (ui, qi) in u.iter_mut().zip(q) {
                    *ui -= c * qi;
                }
            }
        }
        let residual = norm(&u);
        if residual <= 1e-10 * original_norm.max(1.0) {
            return Err(NumericsError::RankDeficient {
                rank: basis.len(),
                expected: vectors.len(),
            });
        }
        basis.push(u.into_iter().map(|x| x / residual).collect());
    }
    Ok(basis)
}

/// Partial-pivot LU factors of a square floating matrix, for repeated
/// solves against the same matrix.
#[derive(Debug, Clone)]
pub(crate) struct LuFactors {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Returns `None` when a pivot vanishes (singular matrix).
    pub fn factor(m: &Matrix) -> Option<Self> {
        assert!(m.is_square());
        let n = m.rows();
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = lu[k * n + k].abs();
            for i in k + 1..n {
                let mag = lu[i * n + k].abs();
                if mag > pivot_mag {
                    pivot_row = i;
                    pivot_mag = mag;
                }
            }
            if pivot_mag < 1e-14 {
                return None;
            }
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in k + 1..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        Some(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        self.solve_into(b, &mut x);
        x
    }

    /// Allocation-free solve for hot loops; `x` must have length `n`.
    pub fn solve_into(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        debug_assert_eq!(x.len(), n);
        for (xi, &p) in x.iter_mut().zip(&self.perm) {
            *xi = b[p];
        }
        for i in 1..n {
            let row = &self.lu[i * n..i * n + i];
            let (head, tail) = x.split_at_mut(i);
            tail[0] -= dot(row, head);
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n..(i + 1) * n];
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / row[i];
        }
    }
}

/// Solves `Mx = b` for square `M`; `None` when singular.
pub(crate) fn solve_square(m: &Matrix, b: &[f64]) -> Option<Vec<f64>> {
    LuFactors::factor(m).map(|lu| lu.solve(b))
}
