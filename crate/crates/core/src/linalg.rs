//! Dense linear algebra over a field given as a [`Ring`].

use crate::error::{Error, Result};
use crate::fields::Ring;

/// Reduced row echelon form in place; returns the pivot columns.
fn row_reduce<R: Ring>(ring: &R, m: &mut [Vec<R::Elem>]) -> Result<Vec<usize>> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| !ring.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, piv);
        let inv = ring.inv(&m[r][c])?;
        for x in m[r].iter_mut().skip(c) {
            *x = ring.mul(x, &inv);
        }
        for i in 0..rows {
            if i == r || ring.is_zero(&m[i][c]) {
                continue;
            }
            let factor = m[i][c].clone();
            for j in c..cols {
                let t = ring.mul(&factor, &m[r][j]);
                m[i][j] = ring.sub(&m[i][j], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

pub fn rank<R: Ring>(ring: &R, m: &[Vec<R::Elem>]) -> Result<usize> {
    let mut work = m.to_vec();
    Ok(row_reduce(ring, &mut work)?.len())
}

/// Solves `a x = b` for a system with at least as many equations as
/// unknowns. `Ok(None)` means inconsistent; rank deficiency is an error.
pub fn solve<R: Ring>(
    ring: &R,
    a: &[Vec<R::Elem>],
    b: &[R::Elem],
) -> Result<Option<Vec<R::Elem>>> {
    let unknowns = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<R::Elem>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = row_reduce(ring, &mut aug)?;
    if pivots.contains(&unknowns) {
        return Ok(None);
    }
    if pivots.len() < unknowns {
        return Err(Error::SingularSystem);
    }
    Ok(Some(
        (0..unknowns).map(|i| aug[i][unknowns].clone()).collect(),
    ))
}

/// Determinant of a square matrix by elimination.
pub fn determinant<R: Ring>(ring: &R, m: &[Vec<R::Elem>]) -> Result<R::Elem> {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = ring.one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !ring.is_zero(&a[i][c])) else {
            return Ok(ring.zero());
        };
        if piv != c {
            a.swap(piv, c);
            det = ring.neg(&det);
        }
        det = ring.mul(&det, &a[c][c]);
        let inv = ring.inv(&a[c][c])?;
        for i in c + 1..n {
            if ring.is_zero(&a[i][c]) {
                continue;
            }
            let factor = ring.mul(&a[i][c], &inv);
            for j in c..n {
                let t = ring.mul(&factor, &a[c][j]);
                a[i][j] = ring.sub(&a[i][j], &t);
            }
        }
    }
    Ok(det)
}
