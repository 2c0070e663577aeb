//! Small exact linear algebra over ℚ used by the basis constructions.

use num_traits::{One, Zero};

use crate::arith::Rational;

/// Row-reduces `rows` (each of length `ncols`) while tracking which
/// combination of the input rows produced each output row.
///
/// Returns `(pivots, kernel)`: `pivots` holds `(pivot_col, reduced_row,
/// combination)` in reduced row echelon form ordered by pivot column;
/// `kernel` holds the combinations that reduce to the zero row.
#[allow(clippy::type_complexity)]
pub(crate) fn rref_tracked(
    rows: &[Vec<Rational>],
    ncols: usize,
) -> (Vec<(usize, Vec<Rational>, Vec<Rational>)>, Vec<Vec<Rational>>) {
    let r = rows.len();
    let mut m: Vec<(Vec<Rational>, Vec<Rational>)> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut t = vec![Rational::zero(); r];
            t[i] = Rational::one();
            (row.clone(), t)
        })
        .collect();
    let mut piv = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        let Some(p) = (next..r).find(|&i| !m[i].0[col].is_zero()) else { continue };
        m.swap(next, p);
        let inv = Rational::one() / &m[next].0[col];
        let (a, b) = &mut m[next];
        for x in a.iter_mut().chain(b.iter_mut()) {
            *x *= &inv;
        }
        let (pr, pt) = m[next].clone();
        for (i, (row, t)) in m.iter_mut().enumerate() {
            if i == next || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pr) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
            for (x, y) in t.iter_mut().zip(&pt) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        piv.push(col);
        next += 1;
        if next == r {
            break;
        }
    }
    let kernel = m[next..].iter().map(|(_, t)| t.clone()).collect();
    let pivots = piv.into_iter().zip(m.into_iter().take(next)).map(|(c, (row, t))| (c, row, t)).collect();
    (pivots, kernel)
}
