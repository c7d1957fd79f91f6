//! Pfaffian by Parlett–Reid skew tridiagonalization with partial pivoting.

use super::matrix::SkewSymmetricMatrix;
use super::NumError;

/// Pfaffian of a real skew-symmetric matrix.
///
/// Each elimination step pivots the largest entry of the current column into
/// the sub-diagonal; every row/column swap flips the sign of the result.
pub fn pfaffian(a: &SkewSymmetricMatrix) -> Result<f64, NumError> {
    let n = a.n();
    if n % 2 == 1 {
        return Err(NumError::OddDimension(n));
    }
    let mut m = a.data().to_vec();
    let at = |i: usize, j: usize| i * n + j;
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let (mut pivot, mut best) = (k + 1, m[at(k + 1, k)].abs());
        for i in (k + 2)..n {
            let v = m[at(i, k)].abs();
            if v > best {
                best = v;
                pivot = i;
            }
        }
        if pivot != k + 1 {
            for j in 0..n {
                m.swap(at(k + 1, j), at(pivot, j));
            }
            for i in 0..n {
                m.swap(at(i, k + 1), at(i, pivot));
            }
            pf = -pf;
        }
        let head = m[at(k, k + 1)];
        if head == 0.0 {
            return Ok(0.0);
        }
        pf *= head;
        if k + 2 < n {
            let tau: Vec<f64> = ((k + 2)..n).map(|j| m[at(k, j)] / head).collect();
            let col: Vec<f64> = ((k + 2)..n).map(|i| m[at(i, k + 1)]).collect();
            for (ii, i) in ((k + 2)..n).enumerate() {
                for (jj, j) in ((k + 2)..n).enumerate() {
                    m[at(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    Ok(pf)
}
