//! Dense exact-rational primal simplex for `max c·y` subject to
//! `A y <= b`, `y >= 0` with `b >= 0`, so the slack basis starts feasible.
//! Bland's rule picks entering and leaving variables; it cannot cycle.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimplexOutcome {
    Optimal(SimplexSolution),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplexSolution {
    pub objective: Rational,
    /// Values of the structural variables `y`.
    pub primal: Vec<Rational>,
    /// Shadow prices of the `<=` rows, an optimal solution of the dual.
    pub dual: Vec<Rational>,
    pub pivots: usize,
}

/// Rows are sparse lists of `(column, coefficient)`.
pub fn maximize(
    num_vars: usize,
    objective: &[Rational],
    rows: &[Vec<(usize, Rational)>],
    rhs: &[Rational],
) -> SimplexOutcome {
    debug_assert_eq!(objective.len(), num_vars);
    debug_assert_eq!(rows.len(), rhs.len());
    debug_assert!(rhs.iter().all(|b| !b.is_negative()));
    let m = rows.len();
    let width = num_vars + m;

    let mut tab: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut dense = vec![Rational::zero(); width];
            for (j, a) in row {
                dense[*j] += a;
            }
            dense[num_vars + i] = Rational::from_integer(1.into());
            dense
        })
        .collect();
    let mut b: Vec<Rational> = rhs.to_vec();
    // reduced costs c_j - z_j
    let mut reduced: Vec<Rational> = objective
        .iter()
        .cloned()
        .chain(std::iter::repeat(Rational::zero()).take(m))
        .collect();
    let mut basis: Vec<usize> = (num_vars..width).collect();
    let mut value = Rational::zero();
    let mut pivots = 0;

    loop {
        let Some(enter) = reduced.iter().position(|d| d.is_positive()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            let a = &tab[i][enter];
            if !a.is_positive() {
                continue;
            }
            let ratio = &b[i] / a;
            leave = match leave {
                None => Some((i, ratio)),
                Some((r, best)) => {
                    if ratio < best || (ratio == best && basis[i] < basis[r]) {
                        Some((i, ratio))
                    } else {
                        Some((r, best))
                    }
                }
            };
        }
        let Some((row, _)) = leave else {
            return SimplexOutcome::Unbounded;
        };

        let pivot = tab[row][enter].clone();
        for a in tab[row].iter_mut() {
            if !a.is_zero() {
                *a /= &pivot;
            }
        }
        b[row] /= &pivot;
        let pivot_row = tab[row].clone();
        let nonzero: Vec<usize> = (0..width).filter(|&j| !pivot_row[j].is_zero()).collect();
        for i in 0..m {
            if i == row || tab[i][enter].is_zero() {
                continue;
            }
            let factor = tab[i][enter].clone();
            for &j in &nonzero {
                let delta = &factor * &pivot_row[j];
                tab[i][j] -= delta;
            }
            let delta = &factor * &b[row];
            b[i] -= delta;
        }
        let factor = reduced[enter].clone();
        for &j in &nonzero {
            let delta = &factor * &pivot_row[j];
            reduced[j] -= delta;
        }
        value += &factor * &b[row];
        basis[row] = enter;
        pivots += 1;
    }

    let mut primal = vec![Rational::zero(); num_vars];
    for (i, &var) in basis.iter().enumerate() {
        if var < num_vars {
            primal[var] = b[i].clone();
        }
    }
    let dual = (0..m).map(|i| -reduced[num_vars + i].clone()).collect();
    SimplexOutcome::Optimal(SimplexSolution {
        objective: value,
        primal,
        dual,
        pivots,
    })
}
