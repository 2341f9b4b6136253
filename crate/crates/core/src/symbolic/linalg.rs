//! Small dense linear algebra over expressions.

use super::expr::Expr;
use super::zero::{is_zero, ZeroVerdict};

pub type Matrix = Vec<Vec<Expr>>;

/// Determinant by cofactor expansion. Intended for the small matrices of
/// velocity Hessians.
pub fn determinant(m: &Matrix) -> Expr {
    let n = m.len();
    match n {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        2 => &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0],
        _ => Expr::add((0..n).filter(|&j| !m[0][j].is_zero()).map(|j| {
            let sign = if j % 2 == 0 { Expr::one() } else { Expr::int(-1) };
            sign * &m[0][j] * determinant(&minor(m, 0, j))
        })),
    }
}

fn minor(m: &Matrix, row: usize, col: usize) -> Matrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Adjugate (transposed cofactor matrix).
pub fn adjugate(m: &Matrix) -> Matrix {
    let n = m.len();
    if n == 1 {
        return vec![vec![Expr::one()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sign = if (i + j) % 2 == 0 { Expr::one() } else { Expr::int(-1) };
                    sign * determinant(&minor(m, j, i))
                })
                .collect()
        })
        .collect()
}

/// Inverse via adjugate over determinant, together with the determinant's
/// zero verdict. Returns `None` when the determinant is zero-class.
pub fn inverse(m: &Matrix) -> (Option<Matrix>, Expr, ZeroVerdict) {
    let det = determinant(m);
    let verdict = is_zero(&det);
    if verdict.is_zero_class() {
        return (None, det, verdict);
    }
    let inv_det = det.pow(-1);
    let inv = adjugate(m).into_iter().map(|row| row.into_iter().map(|x| x * &inv_det).collect()).collect();
    (Some(inv), det, verdict)
}

pub fn mat_vec(m: &Matrix, v: &[Expr]) -> Vec<Expr> {
    m.iter().map(|row| Expr::add(row.iter().zip(v).map(|(a, b)| a * b))).collect()
}

/// Reduced row echelon form. Entries whose zero test is zero-class are
/// treated as zero; pivots prefer entries proven nonzero.
pub fn rref(mut m: Matrix) -> (Matrix, Vec<usize>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let mut choice = None;
        for i in r..rows {
            if m[i][c].is_zero() {
                continue;
            }
            match is_zero(&m[i][c]) {
                ZeroVerdict::ProvenNonzero => {
                    choice = Some(i);
                    break;
                }
                ZeroVerdict::Unknown if choice.is_none() => choice = Some(i),
                ZeroVerdict::Unknown => {}
                _ => m[i][c] = Expr::zero(),
            }
        }
        let Some(p) = choice else { continue };
        m.swap(r, p);
        let inv = m[r][c].pow(-1);
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        m[r][c] = Expr::one();
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let factor = m[i][c].clone();
            for j in 0..cols {
                if !m[r][j].is_zero() {
                    m[i][j] = &m[i][j] - &factor * &m[r][j];
                }
            }
            m[i][c] = Expr::zero();
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

/// Basis of the right nullspace, one vector per free column.
pub fn nullspace(m: Matrix, cols: usize) -> Vec<Vec<Expr>> {
    let (reduced, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Expr::zero(); cols];
            v[f] = Expr::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&reduced[row][f];
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&x| Expr::int(x)).collect()).collect()
    }

    #[test]
    fn exact_rational_inverse() {
        let (inv, det, verdict) = inverse(&ints(&[&[2, 1], &[1, 2]]));
        assert_eq!(det, Expr::int(3));
        assert_eq!(verdict, ZeroVerdict::ProvenNonzero);
        let inv = inv.unwrap();
        assert_eq!(inv[0][0], Expr::frac(2, 3));
        assert_eq!(inv[0][1], Expr::frac(-1, 3));
        assert_eq!(inv[1][1], Expr::frac(2, 3));
    }

    #[test]
    fn three_by_three_determinant() {
        let m = ints(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]]);
        assert_eq!(determinant(&m), Expr::int(6));
        let (inv, _, _) = inverse(&m);
        let inv = inv.unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let entry = Expr::add((0..3).map(|k| &m[i][k] * &inv[k][j]));
                assert_eq!(entry, Expr::int(i64::from(i == j)));
            }
        }
    }

    #[test]
    fn singular_matrix_has_no_inverse() {
        let (inv, _, verdict) = inverse(&ints(&[&[1, 2], &[2, 4]]));
        assert!(inv.is_none());
        assert_eq!(verdict, ZeroVerdict::ProvenZero);
    }

    #[test]
    fn nullspace_of_rank_one_system() {
        let basis = nullspace(ints(&[&[1, 1, 0], &[2, 2, 0]]), 3);
        assert_eq!(basis.len(), 2);
        for v in &basis {
            assert!((&v[0] + &v[1]).is_zero());
        }
    }

    #[test]
    fn symbolic_pivots() {
        let k = Expr::param("k");
        let m = vec![vec![Expr::one(), Expr::zero(), Expr::frac(1, 2) * &k], vec![Expr::zero(), Expr::one(), Expr::zero()]];
        let basis = nullspace(m, 3);
        assert_eq!(basis, vec![vec![Expr::frac(-1, 2) * &k, Expr::zero(), Expr::one()]]);
    }
}
