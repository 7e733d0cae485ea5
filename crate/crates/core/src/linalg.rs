//! Exact linear algebra over the rationals.
//!
//! Elimination is fraction-free: each row is scaled to integers and reduced
//! with Bareiss' one-step division, so intermediate entries are minors of the
//! input and never carry denominators. Rationals only reappear during back
//! substitution.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::exactnum::Rational;

/// Solution set of `A u = b`.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Unique(Vec<Rational>),
    /// `particular + span(null_directions)`.
    Family {
        particular: Vec<Rational>,
        null_directions: Vec<Vec<Rational>>,
    },
    Inconsistent,
}

/// Row echelon form of an integer matrix together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
    pub cols: usize,
}

fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect()
}

/// Fraction-free (Bareiss) row echelon form.
pub fn echelon(matrix: &[Vec<Rational>], cols: usize) -> Echelon {
    let mut rows: Vec<Vec<BigInt>> = matrix
        .iter()
        .map(|r| {
            debug_assert_eq!(r.len(), cols);
            integer_row(r)
        })
        .collect();
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in r + 1..rows.len() {
            let factor = rows[i][c].clone();
            for j in c..cols {
                let v = &pivot * &rows[i][j] - &factor * &rows[r][j];
                debug_assert!((&v % &prev).is_zero(), "Bareiss division must be exact");
                rows[i][j] = v / &prev;
            }
            // columns left of the pivot are already zero in this row
            for j in 0..c {
                rows[i][j] = BigInt::zero();
            }
        }
        // rows above the current one keep their scale; only later pivots use `prev`
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    Echelon { rows, pivots, cols }
}

pub fn rank(matrix: &[Vec<Rational>], cols: usize) -> usize {
    echelon(matrix, cols).pivots.len()
}

impl Echelon {
    /// Back substitution with the free variables fixed by `free_value`.
    fn back_substitute(&self, rhs_col: Option<usize>, free_value: impl Fn(usize) -> Rational) -> Vec<Rational> {
        let n = rhs_col.unwrap_or(self.cols);
        let mut x: Vec<Option<Rational>> = vec![None; n];
        for j in 0..n {
            if !self.pivots.contains(&j) {
                x[j] = Some(free_value(j));
            }
        }
        for (r, &pc) in self.pivots.iter().enumerate().rev() {
            if pc >= n {
                continue;
            }
            let row = &self.rows[r];
            let mut acc = match rhs_col {
                Some(b) => Rational::from_integer(row[b].clone()),
                None => Rational::zero(),
            };
            for j in pc + 1..n {
                if !row[j].is_zero() {
                    let xj = x[j].as_ref().expect("later variables solved first");
                    acc -= Rational::from_integer(row[j].clone()) * xj;
                }
            }
            x[pc] = Some(acc / Rational::from_integer(row[pc].clone()));
        }
        x.into_iter().map(|v| v.expect("every variable assigned")).collect()
    }
}

/// Basis of the right kernel `{u : A u = 0}`.
pub fn nullspace(matrix: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let ech = echelon(matrix, cols);
    (0..cols)
        .filter(|j| !ech.pivots.contains(j))
        .map(|free| {
            ech.back_substitute(None, |j| {
                if j == free {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            })
        })
        .collect()
}

/// Solves `A u = b` for `u` of length `cols`.
pub fn solve(matrix: &[Vec<Rational>], rhs: &[Rational], cols: usize) -> Solution {
    assert_eq!(matrix.len(), rhs.len());
    let augmented: Vec<Vec<Rational>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let ech = echelon(&augmented, cols + 1);
    if ech.pivots.last() == Some(&cols) {
        return Solution::Inconsistent;
    }
    let particular = ech.back_substitute(Some(cols), |_| Rational::zero());
    let null_directions = nullspace(matrix, cols);
    if null_directions.is_empty() {
        Solution::Unique(particular)
    } else {
        Solution::Family {
            particular,
            null_directions,
        }
    }
}

/// Determinant of a square matrix.
pub fn determinant(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    if n == 0 {
        return Rational::one();
    }
    let scale: Rational = matrix
        .iter()
        .map(|row| {
            let lcm = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
            Rational::from_integer(lcm)
        })
        .product();
    // Bareiss with explicit sign tracking for row swaps.
    let mut rows: Vec<Vec<BigInt>> = matrix.iter().map(|r| integer_row(r)).collect();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !rows[i][k].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            rows.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &rows[k][k] * &rows[i][j] - &rows[i][k] * &rows[k][j];
                rows[i][j] = v / &prev;
            }
        }
        prev = rows[k][k].clone();
    }
    let det = sign * &rows[n - 1][n - 1];
    Rational::from_integer(det) / scale
}

/// Dense product `A B`.
pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero() && !b[k][j].is_zero())
                        .map(|k| &row[k] * &b[k][j])
                        .sum()
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// Scales a nonzero vector so its last nonzero entry is one.
pub fn normalize_direction(v: &[Rational]) -> Vec<Rational> {
    match v.iter().rev().find(|q| !q.is_zero()) {
        Some(last) => {
            let last = last.clone();
            v.iter().map(|q| q / &last).collect()
        }
        None => v.to_vec(),
    }
}

pub fn is_zero_vector(v: &[Rational]) -> bool {
    v.iter().all(|q| q.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn unique_solution() {
        let a = vec![vec![rat(1, 2), int(1)], vec![int(3), rat(-1, 3)]];
        let b = vec![int(2), int(1)];
        match solve(&a, &b, 2) {
            Solution::Unique(u) => assert_eq!(mat_vec(&a, &u), b),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn family_and_inconsistent() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        match solve(&a, &[int(1), int(2)], 3) {
            Solution::Family { particular, null_directions } => {
                assert_eq!(mat_vec(&a, &particular), vec![int(1), int(2)]);
                assert_eq!(null_directions.len(), 2);
                for d in &null_directions {
                    assert!(is_zero_vector(&mat_vec(&a, d)));
                }
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(solve(&a, &[int(1), int(3)], 3), Solution::Inconsistent);
    }

    #[test]
    fn determinant_small() {
        assert_eq!(determinant(&m(&[&[2, 1], &[1, 3]])), int(5));
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), int(-1));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])), int(0));
        let h = vec![
            vec![int(1), rat(1, 2), rat(1, 3)],
            vec![rat(1, 2), rat(1, 3), rat(1, 4)],
            vec![rat(1, 3), rat(1, 4), rat(1, 5)],
        ];
        assert_eq!(determinant(&h), rat(1, 2160));
    }

    // Cofactor expansion, kept independent of elimination.
    fn det_cofactor(a: &[Vec<Rational>]) -> Rational {
        if a.is_empty() {
            return Rational::one();
        }
        (0..a.len())
            .map(|j| {
                let minor: Vec<Vec<Rational>> = a[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let s = if j % 2 == 0 { int(1) } else { int(-1) };
                s * &a[0][j] * det_cofactor(&minor)
            })
            .sum()
    }

    fn matrix_strategy(n: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Rational>>> {
        proptest::collection::vec(
            proptest::collection::vec((-4i64..=4, 1i64..=3).prop_map(|(p, q)| rat(p, q)), cols),
            n,
        )
    }

    proptest! {
        #[test]
        fn determinant_matches_cofactor(a in matrix_strategy(4, 4)) {
            prop_assert_eq!(determinant(&a), det_cofactor(&a));
        }

        #[test]
        fn nullspace_is_annihilated(a in matrix_strategy(3, 5)) {
            let ns = nullspace(&a, 5);
            prop_assert_eq!(ns.len() + rank(&a, 5), 5);
            for v in ns {
                prop_assert!(is_zero_vector(&mat_vec(&a, &v)));
            }
        }
    }
}
