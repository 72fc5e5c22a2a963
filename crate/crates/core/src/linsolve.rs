//! Exact sparse linear systems over the rationals.
//!
//! Each equation is scaled to integer coefficients and eliminated fraction-free
//! (`r <- p*r - a*pivot`, then divided by its content). Back substitution sets
//! free variables to zero, so the returned solution is the first one in the
//! row-echelon parameterization.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::poly::Rat;

type Row = BTreeMap<usize, BigInt>;

/// Solve `sum_j x_j * columns[j] = rhs`, where vectors are sparse maps from a
/// row key to a coefficient. Returns `None` when the system is inconsistent.
pub fn solve_columns<K: Ord + Clone>(columns: &[BTreeMap<K, Rat>], rhs: &BTreeMap<K, Rat>) -> Option<Vec<Rat>> {
    let ncols = columns.len();
    let mut by_key: BTreeMap<K, BTreeMap<usize, Rat>> = BTreeMap::new();
    for (j, col) in columns.iter().enumerate() {
        for (k, v) in col {
            if !v.is_zero() {
                by_key.entry(k.clone()).or_default().insert(j, v.clone());
            }
        }
    }
    for (k, v) in rhs {
        if !v.is_zero() {
            by_key.entry(k.clone()).or_default().insert(ncols, v.clone());
        }
    }
    let rows: Vec<BTreeMap<usize, Rat>> = by_key.into_values().collect();
    solve_rows(ncols, &rows)
}

/// Solve with rows given directly; column `ncols` is the right-hand side.
pub fn solve_rows(ncols: usize, rows: &[BTreeMap<usize, Rat>]) -> Option<Vec<Rat>> {
    let mut work: Vec<Option<Row>> = rows.iter().map(integer_row).filter(|r| !r.is_empty()).map(Some).collect();
    let mut pivots: Vec<(usize, Row)> = Vec::new();
    for col in 0..ncols {
        let pick = work
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.as_ref().filter(|r| r.contains_key(&col)).map(|r| (r.len(), i)))
            .min();
        let Some((_, pi)) = pick else { continue };
        let pivot = work[pi].take().unwrap();
        let p = pivot[&col].clone();
        for slot in work.iter_mut() {
            let Some(row) = slot else { continue };
            let Some(a) = row.get(&col).cloned() else { continue };
            let mut next = Row::new();
            let keys: std::collections::BTreeSet<usize> = row.keys().chain(pivot.keys()).copied().collect();
            for k in keys {
                let v =
                    row.get(&k).map(|x| x * &p).unwrap_or_default() - pivot.get(&k).map(|x| x * &a).unwrap_or_default();
                if !v.is_zero() {
                    next.insert(k, v);
                }
            }
            make_primitive(&mut next);
            *slot = if next.is_empty() { None } else { Some(next) };
        }
        pivots.push((col, pivot));
    }
    // remaining rows have no unknowns left; a nonzero right-hand side is a contradiction
    if work.iter().flatten().any(|r| r.contains_key(&ncols)) {
        return None;
    }
    let mut x = vec![Rat::zero(); ncols];
    for (col, row) in pivots.iter().rev() {
        let mut acc = row.get(&ncols).map(|v| Rat::from_integer(v.clone())).unwrap_or_else(Rat::zero);
        for (&k, v) in row.range(col + 1..ncols) {
            acc -= &x[k] * Rat::from_integer(v.clone());
        }
        x[*col] = acc / Rat::from_integer(row[col].clone());
    }
    Some(x)
}

fn integer_row(row: &BTreeMap<usize, Rat>) -> Row {
    let mut l = BigInt::one();
    for v in row.values() {
        l = l.lcm(v.denom());
    }
    let mut out: Row =
        row.iter().filter(|(_, v)| !v.is_zero()).map(|(&k, v)| (k, v.numer() * (&l / v.denom()))).collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut Row) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for v in row.values_mut() {
        *v = &*v / &g;
    }
}
