//! Gaussian elimination over a discretely valued field with full pivoting on
//! the entry of least valuation. Over a complete DVR this keeps every
//! elimination factor integral, so absolute precision never degrades, and the
//! pivot valuations are the elementary divisors of the matrix.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::series::LaurentSeries;

pub(crate) trait Scalar: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self>;
    /// Zero to known precision.
    fn is_zero(&self) -> bool;
    fn is_exact_zero(&self) -> bool;
    fn val(&self) -> Result<i64>;
    fn precision_error(&self) -> Error;
}

impl Scalar for LaurentSeries {
    fn zero_like(&self) -> Self {
        LaurentSeries::zero(self.ring())
    }
    fn one_like(&self) -> Self {
        LaurentSeries::one(self.ring())
    }
    fn sub(&self, o: &Self) -> Self {
        LaurentSeries::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        LaurentSeries::mul(self, o)
    }
    fn neg(&self) -> Self {
        LaurentSeries::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        LaurentSeries::inv(self)
    }
    fn is_zero(&self) -> bool {
        LaurentSeries::is_zero(self)
    }
    fn is_exact_zero(&self) -> bool {
        LaurentSeries::is_exact_zero(self)
    }
    fn val(&self) -> Result<i64> {
        self.valuation()
    }
    fn precision_error(&self) -> Error {
        Error::Precision { bound: self.prec_raw() }
    }
}

pub(crate) struct Reduced<S> {
    pub rank: usize,
    /// Row-reduced matrix; the leading `rank x rank` block is upper triangular.
    pub upper: Vec<Vec<S>>,
    /// `colperm[j]` is the original column now at position `j`.
    pub colperm: Vec<usize>,
    pub rhs: Vec<Vec<S>>,
    pub pivot_vals: Vec<i64>,
    odd_swaps: bool,
    /// Elimination stopped on entries that are zero only to precision.
    pub ambiguous: Option<Error>,
}

/// Row reduction of `a` (n x k) with `rhs` columns carried along (n x m per row).
pub(crate) fn reduce<S: Scalar>(mut a: Vec<Vec<S>>, mut rhs: Vec<Vec<S>>) -> Result<Reduced<S>> {
    let n = a.len();
    let k = if n == 0 { 0 } else { a[0].len() };
    let mut colperm: Vec<usize> = (0..k).collect();
    let mut odd = false;
    let mut pivot_vals = Vec::new();
    let mut ambiguous = None;
    let mut step = 0;
    while step < n.min(k) {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(step) {
            for (j, z) in row.iter().enumerate().skip(step) {
                if z.is_zero() {
                    if !z.is_exact_zero() && ambiguous.is_none() {
                        ambiguous = Some(z.precision_error());
                    }
                    continue;
                }
                let v = z.val()?;
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        ambiguous = None;
        if pi != step {
            a.swap(pi, step);
            if !rhs.is_empty() {
                rhs.swap(pi, step);
            }
            odd = !odd;
        }
        if pj != step {
            for row in a.iter_mut() {
                row.swap(pj, step);
            }
            colperm.swap(pj, step);
            odd = !odd;
        }
        pivot_vals.push(v);
        let pinv = a[step][step].inv()?;
        let (top, bottom) = a.split_at_mut(step + 1);
        let prow = &top[step];
        let (rtop, rbottom) = if rhs.is_empty() {
            (&mut [][..], &mut [][..])
        } else {
            rhs.split_at_mut(step + 1)
        };
        for (off, row) in bottom.iter_mut().enumerate() {
            if row[step].is_exact_zero() {
                continue;
            }
            let factor = row[step].mul(&pinv);
            for j in step + 1..k {
                if !prow[j].is_exact_zero() {
                    row[j] = row[j].sub(&factor.mul(&prow[j]));
                }
            }
            row[step] = row[step].zero_like();
            if !rtop.is_empty() {
                let src = rtop[step].clone();
                let dst = &mut rbottom[off];
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    if !s.is_exact_zero() {
                        *d = d.sub(&factor.mul(s));
                    }
                }
            }
        }
        step += 1;
    }
    if step == n.min(k) {
        ambiguous = None;
    }
    Ok(Reduced { rank: step, upper: a, colperm, rhs, pivot_vals, odd_swaps: odd, ambiguous })
}

pub(crate) fn det<S: Scalar>(a: Vec<Vec<S>>) -> Result<S> {
    let n = a.len();
    let unit = a[0][0].one_like();
    let red = reduce(a, Vec::new())?;
    if red.rank < n {
        if let Some(e) = red.ambiguous {
            return Err(e);
        }
        return Ok(unit.zero_like());
    }
    let mut acc = unit;
    for i in 0..n {
        acc = acc.mul(&red.upper[i][i]);
    }
    Ok(if red.odd_swaps { acc.neg() } else { acc })
}

fn back_substitute<S: Scalar>(red: &Reduced<S>, col: usize) -> Result<Vec<S>> {
    let r = red.rank;
    let mut x: Vec<Option<S>> = alloc::vec![None; r];
    for i in (0..r).rev() {
        let mut acc = red.rhs[i][col].clone();
        for j in i + 1..r {
            acc = acc.sub(&red.upper[i][j].mul(x[j].as_ref().unwrap()));
        }
        x[i] = Some(acc.mul(&red.upper[i][i].inv()?));
    }
    let mut out: Vec<Option<S>> = alloc::vec![None; r];
    for (pos, v) in x.into_iter().enumerate() {
        out[red.colperm[pos]] = v;
    }
    Ok(out.into_iter().map(|v| v.unwrap()).collect())
}

/// Solve `a x = b` for a square nonsingular `a`.
pub(crate) fn solve<S: Scalar>(a: Vec<Vec<S>>, b: Vec<S>) -> Result<Vec<S>> {
    let n = a.len();
    let rhs = b.into_iter().map(|z| alloc::vec![z]).collect();
    let red = reduce(a, rhs)?;
    if red.rank < n {
        return Err(red.ambiguous.unwrap_or(Error::Domain("singular linear system")));
    }
    back_substitute(&red, 0)
}

/// Solve an overdetermined system `a x = b` (n x k, rank k); `None` if inconsistent.
pub(crate) fn solve_consistent<S: Scalar>(a: Vec<Vec<S>>, b: Vec<S>) -> Result<Option<Vec<S>>> {
    let k = if a.is_empty() { 0 } else { a[0].len() };
    let rhs = b.into_iter().map(|z| alloc::vec![z]).collect();
    let red = reduce(a, rhs)?;
    if red.rank < k {
        return Err(red.ambiguous.unwrap_or(Error::Domain("rank-deficient system")));
    }
    if red.rhs[k..].iter().any(|row| !row[0].is_zero()) {
        return Ok(None);
    }
    Ok(Some(back_substitute(&red, 0)?))
}

/// Rank of the matrix whose rows are `vectors`; zero-to-precision remainders count as dependent.
pub(crate) fn rank<S: Scalar>(vectors: Vec<Vec<S>>) -> Result<usize> {
    Ok(reduce(vectors, Vec::new())?.rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldDesc;
    use crate::series::LaurentField;
    use alloc::sync::Arc;
    use alloc::vec;

    fn k() -> Arc<LaurentField> {
        LaurentField::new(FieldDesc::prime(5).unwrap(), 32)
    }

    fn c(k: &Arc<LaurentField>, n: i64, v: i64) -> LaurentSeries {
        LaurentSeries::from_int(k, n).shift(v)
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let k = k();
        let m = vec![
            vec![c(&k, 1, 0), c(&k, 2, 1), c(&k, 3, -1)],
            vec![c(&k, 4, 2), c(&k, 1, 0), c(&k, 1, 0)],
            vec![c(&k, 2, 0), c(&k, 0, 0), c(&k, 1, 3)],
        ];
        let cof = |i: usize, j: usize| m[i][j].clone();
        let expected = cof(0, 0).mul(&cof(1, 1).mul(&cof(2, 2)).sub(&cof(1, 2).mul(&cof(2, 1))))
            .sub(&cof(0, 1).mul(&cof(1, 0).mul(&cof(2, 2)).sub(&cof(1, 2).mul(&cof(2, 0)))))
            .add(&cof(0, 2).mul(&cof(1, 0).mul(&cof(2, 1)).sub(&cof(1, 1).mul(&cof(2, 0)))));
        let d = det(m.clone()).unwrap();
        assert!(d.eq_to_precision(&expected));
    }

    #[test]
    fn singular_and_solve() {
        let k = k();
        let m = vec![vec![c(&k, 1, 0), c(&k, 2, 0)], vec![c(&k, 2, 0), c(&k, 4, 0)]];
        assert!(det(m).unwrap().is_exact_zero());
        let a = vec![vec![c(&k, 1, 1), c(&k, 1, 0)], vec![c(&k, 0, 0), c(&k, 3, 0)]];
        let x = solve(a, vec![c(&k, 1, 0), c(&k, 3, 0)]).unwrap();
        assert!(x[1].eq_to_precision(&c(&k, 1, 0)));
        assert!(x[0].is_zero());
        let over = vec![vec![c(&k, 1, 0)], vec![c(&k, 2, 0)]];
        assert!(solve_consistent(over.clone(), vec![c(&k, 1, 0), c(&k, 2, 0)]).unwrap().is_some());
        assert!(solve_consistent(over, vec![c(&k, 1, 0), c(&k, 1, 0)]).unwrap().is_none());
    }
}
