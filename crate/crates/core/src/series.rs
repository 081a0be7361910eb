//! Truncated Laurent series over a finite field: the model of `K = kappa((pi))`.
//!
//! Every series records the absolute precision `N` it is known to
//! (`value mod pi^N`). Exact Laurent polynomials carry [`EXACT`]. Results are
//! additionally capped at a relative precision fixed by the ambient
//! [`LaurentField`], so that infinite expansions (inverses, roots) stay finite.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result, RootFailure};
use crate::ffield::{FFElem, FieldDesc};

/// Precision marker for exactly known series.
pub const EXACT: i64 = i64::MAX;

#[inline]
fn padd(a: i64, b: i64) -> i64 {
    if a == EXACT || b == EXACT {
        EXACT
    } else {
        a + b
    }
}

/// The field `kappa((pi))` together with its relative precision budget.
#[derive(Debug, PartialEq, Eq)]
pub struct LaurentField {
    field: FieldDesc,
    rel_cap: usize,
}

impl LaurentField {
    pub fn new(field: FieldDesc, rel_cap: usize) -> Arc<Self> {
        Arc::new(LaurentField { field, rel_cap: rel_cap.max(2) })
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn rel_cap(&self) -> usize {
        self.rel_cap
    }
}

#[derive(Clone)]
pub struct LaurentSeries {
    ring: Arc<LaurentField>,
    val: i64,
    coeffs: Vec<FFElem>,
    prec: i64,
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return if self.prec == EXACT { write!(f, "0") } else { write!(f, "O(pi^{})", self.prec) };
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.0 == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*pi^{}", c.0, self.val + k as i64)?;
        }
        if self.prec != EXACT {
            write!(f, " + O(pi^{})", self.prec)?;
        }
        Ok(())
    }
}

impl LaurentSeries {
    fn normalized(ring: Arc<LaurentField>, mut val: i64, mut coeffs: Vec<FFElem>, mut prec: i64) -> Self {
        let lead = coeffs.iter().position(|c| c.0 != 0);
        match lead {
            None => {
                coeffs.clear();
                return LaurentSeries { ring, val: 0, coeffs, prec };
            }
            Some(k) => {
                if k > 0 {
                    coeffs.drain(..k);
                    val += k as i64;
                }
            }
        }
        if val >= prec {
            coeffs.clear();
            return LaurentSeries { ring, val: 0, coeffs, prec };
        }
        let cap = val + ring.rel_cap as i64;
        if prec == EXACT {
            if coeffs.len() > ring.rel_cap {
                prec = cap;
            }
        } else if prec > cap {
            prec = cap;
        }
        if prec != EXACT {
            coeffs.truncate((prec - val) as usize);
        }
        while coeffs.last().is_some_and(|c| c.0 == 0) {
            coeffs.pop();
        }
        LaurentSeries { ring, val, coeffs, prec }
    }

    /// Build from coefficients `coeffs[k]` of `pi^(v + k)`, known mod `pi^prec` (None = exact).
    pub fn from_coeffs(ring: &Arc<LaurentField>, v: i64, coeffs: Vec<FFElem>, prec: Option<i64>) -> Self {
        Self::normalized(ring.clone(), v, coeffs, prec.unwrap_or(EXACT))
    }

    pub fn zero(ring: &Arc<LaurentField>) -> Self {
        LaurentSeries { ring: ring.clone(), val: 0, coeffs: Vec::new(), prec: EXACT }
    }

    /// `O(pi^prec)`.
    pub fn zero_to(ring: &Arc<LaurentField>, prec: i64) -> Self {
        LaurentSeries { ring: ring.clone(), val: 0, coeffs: Vec::new(), prec }
    }

    pub fn one(ring: &Arc<LaurentField>) -> Self {
        Self::constant(ring, ring.field.one())
    }

    pub fn constant(ring: &Arc<LaurentField>, c: FFElem) -> Self {
        Self::monomial(ring, c, 0)
    }

    pub fn from_int(ring: &Arc<LaurentField>, n: i64) -> Self {
        Self::constant(ring, ring.field.from_int(n))
    }

    /// `c * pi^k`, exact.
    pub fn monomial(ring: &Arc<LaurentField>, c: FFElem, k: i64) -> Self {
        Self::normalized(ring.clone(), k, vec![c], EXACT)
    }

    /// `pi^k`.
    pub fn pi_pow(ring: &Arc<LaurentField>, k: i64) -> Self {
        Self::monomial(ring, ring.field.one(), k)
    }

    pub fn ring(&self) -> &Arc<LaurentField> {
        &self.ring
    }

    pub fn field(&self) -> &FieldDesc {
        &self.ring.field
    }

    /// True if the series is zero to its known precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.prec == EXACT
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec == EXACT
    }

    /// Absolute precision; `None` for exact series.
    pub fn prec(&self) -> Option<i64> {
        (self.prec != EXACT).then_some(self.prec)
    }

    pub(crate) fn prec_raw(&self) -> i64 {
        self.prec
    }

    /// Valuation offset of the stored coefficients (0 for zero series).
    pub fn offset(&self) -> i64 {
        self.val
    }

    pub fn coeffs(&self) -> &[FFElem] {
        &self.coeffs
    }

    pub fn valuation(&self) -> Result<i64> {
        if self.coeffs.is_empty() {
            if self.prec == EXACT {
                return Err(Error::Domain("valuation of exact zero"));
            }
            return Err(Error::Precision { bound: self.prec });
        }
        Ok(self.val)
    }

    /// Valuation, or `None` for a zero-to-precision value.
    pub fn valuation_opt(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.val)
    }

    /// Coefficient of `pi^k`.
    pub fn coefficient(&self, k: i64) -> Result<FFElem> {
        if k >= self.prec {
            return Err(Error::Precision { bound: self.prec });
        }
        if self.coeffs.is_empty() || k < self.val {
            return Ok(self.ring.field.zero());
        }
        Ok(self.coeffs.get((k - self.val) as usize).copied().unwrap_or(self.ring.field.zero()))
    }

    /// Leading coefficient of a nonzero series.
    pub fn leading(&self) -> Result<FFElem> {
        self.valuation()?;
        Ok(self.coeffs[0])
    }

    /// Residue class of an integral series.
    pub fn residue(&self) -> Result<FFElem> {
        if !self.coeffs.is_empty() && self.val < 0 {
            return Err(Error::Domain("residue of a non-integral series"));
        }
        self.coefficient(0)
    }

    /// Relative precision `prec - valuation` of a nonzero series.
    pub fn rel_prec(&self) -> Option<i64> {
        if self.coeffs.is_empty() || self.prec == EXACT {
            None
        } else {
            Some(self.prec - self.val)
        }
    }

    /// The same coefficients over another copy of the field (e.g. with a larger budget).
    pub fn rehome(&self, ring: &Arc<LaurentField>) -> Self {
        assert!(ring.field == self.ring.field, "rehoming into a different residue field");
        Self::normalized(ring.clone(), self.val, self.coeffs.clone(), self.prec)
    }

    /// Drop knowledge beyond `pi^n`.
    pub fn truncate(&self, n: i64) -> Self {
        Self::normalized(self.ring.clone(), self.val, self.coeffs.clone(), self.prec.min(n))
    }

    /// `self * pi^k`.
    pub fn shift(&self, k: i64) -> Self {
        if self.coeffs.is_empty() {
            let prec = if self.prec == EXACT { EXACT } else { self.prec + k };
            return LaurentSeries { ring: self.ring.clone(), val: 0, coeffs: Vec::new(), prec };
        }
        LaurentSeries {
            ring: self.ring.clone(),
            val: self.val + k,
            coeffs: self.coeffs.clone(),
            prec: padd(self.prec, k),
        }
    }

    pub fn scale(&self, c: FFElem) -> Self {
        if c.0 == 0 {
            return Self::zero(&self.ring);
        }
        let k = &self.ring.field;
        LaurentSeries {
            ring: self.ring.clone(),
            val: self.val,
            coeffs: self.coeffs.iter().map(|&a| k.mul(a, c)).collect(),
            prec: self.prec,
        }
    }

    fn check_ring(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring,
            "series from different fields"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_ring(other);
        let prec = self.prec.min(other.prec);
        if other.coeffs.is_empty() && self.prec <= other.prec {
            return self.clone();
        }
        if self.coeffs.is_empty() && other.prec <= self.prec {
            return other.clone();
        }
        let k = &self.ring.field;
        let ends = |s: &Self| if s.coeffs.is_empty() { i64::MIN } else { s.val + s.coeffs.len() as i64 };
        let starts = |s: &Self| if s.coeffs.is_empty() { i64::MAX } else { s.val };
        let lo = starts(self).min(starts(other));
        if lo == i64::MAX {
            return Self::zero_to(&self.ring, prec);
        }
        let hi = ends(self).max(ends(other)).min(prec);
        if hi <= lo {
            return Self::zero_to(&self.ring, prec);
        }
        let mut c = vec![k.zero(); (hi - lo) as usize];
        for s in [self, other] {
            for (i, &a) in s.coeffs.iter().enumerate() {
                let idx = s.val + i as i64 - lo;
                if idx >= 0 && (idx as usize) < c.len() {
                    c[idx as usize] = k.add(c[idx as usize], a);
                }
            }
        }
        Self::normalized(self.ring.clone(), lo, c, prec)
    }

    pub fn neg(&self) -> Self {
        let k = &self.ring.field;
        LaurentSeries {
            ring: self.ring.clone(),
            val: self.val,
            coeffs: self.coeffs.iter().map(|&a| k.neg(a)).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_ring(other);
        match (self.coeffs.is_empty(), other.coeffs.is_empty()) {
            (true, true) => {
                if self.prec == EXACT || other.prec == EXACT {
                    Self::zero(&self.ring)
                } else {
                    Self::zero_to(&self.ring, self.prec + other.prec)
                }
            }
            (true, false) => {
                if self.prec == EXACT {
                    Self::zero(&self.ring)
                } else {
                    Self::zero_to(&self.ring, self.prec + other.val)
                }
            }
            (false, true) => other.mul(self),
            (false, false) => {
                let v = self.val + other.val;
                let prec = padd(self.prec, other.val).min(padd(other.prec, self.val));
                let full = self.coeffs.len() + other.coeffs.len() - 1;
                let mut n = full.min(self.ring.rel_cap);
                if prec != EXACT {
                    n = n.min((prec - v).max(0) as usize);
                }
                let k = &self.ring.field;
                let c = if k.degree() == 1 {
                    let p = k.p();
                    let mut acc = vec![0u64; n];
                    for (i, &a) in self.coeffs.iter().enumerate().take(n) {
                        if a.0 == 0 {
                            continue;
                        }
                        let a = a.0 as u64;
                        for (j, &b) in other.coeffs.iter().enumerate().take(n - i) {
                            acc[i + j] += a * b.0 as u64;
                        }
                        if i % 64 == 63 {
                            acc.iter_mut().for_each(|x| *x %= p);
                        }
                    }
                    acc.into_iter().map(|x| FFElem((x % p) as u32)).collect()
                } else {
                    let mut acc = vec![k.zero(); n];
                    for (i, &a) in self.coeffs.iter().enumerate().take(n) {
                        if a.0 == 0 {
                            continue;
                        }
                        for (j, &b) in other.coeffs.iter().enumerate().take(n - i) {
                            acc[i + j] = k.add(acc[i + j], k.mul(a, b));
                        }
                    }
                    acc
                };
                let prec = if prec == EXACT && n < full { v + n as i64 } else { prec };
                Self::normalized(self.ring.clone(), v, c, prec)
            }
        }
    }

    /// Multiplicative inverse of a series that is nonzero to its precision.
    pub fn inv(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            if self.prec == EXACT {
                return Err(Error::Domain("division by exact zero"));
            }
            return Err(Error::Precision { bound: self.prec });
        }
        let k = &self.ring.field;
        let c0inv = k.inv(self.coeffs[0])?;
        if self.coeffs.len() == 1 && self.prec == EXACT {
            return Ok(Self::monomial(&self.ring, c0inv, -self.val));
        }
        let mut rel = self.ring.rel_cap as i64;
        if self.prec != EXACT {
            rel = rel.min(self.prec - self.val);
        }
        let n = rel as usize;
        let mut b = Vec::with_capacity(n);
        b.push(c0inv);
        for m in 1..n {
            let mut s = k.zero();
            for i in 1..=m.min(self.coeffs.len() - 1) {
                s = k.add(s, k.mul(self.coeffs[i], b[m - i]));
            }
            b.push(k.neg(k.mul(c0inv, s)));
        }
        Ok(Self::normalized(self.ring.clone(), -self.val, b, -self.val + rel))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let mut acc = Self::one(&self.ring);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(acc)
    }

    /// Equal to the joint known precision.
    pub fn eq_to_precision(&self, other: &Self) -> bool {
        self.sub(other).is_zero()
    }

    /// `s` with `s^d = self`, for `d` prime to the characteristic.
    pub fn tame_root(&self, d: u64) -> Result<Self> {
        let k = &self.ring.field;
        if d == 0 || d.is_multiple_of(k.p()) {
            return Err(Error::Root { degree: d, kind: RootFailure::Wild });
        }
        let v = self.valuation()?;
        if v.rem_euclid(d as i64) != 0 {
            return Err(Error::Root { degree: d, kind: RootFailure::Valuation });
        }
        let c = self.coeffs[0];
        let c_root = k
            .nth_root(c, d)
            .ok_or(Error::Root { degree: d, kind: RootFailure::LeadingCoefficient })?;
        // principal unit u = self / (c pi^v); Newton iteration for u^(1/d)
        let lead = Self::monomial(&self.ring, c, v);
        let u = self.div(&lead)?;
        let rel = match u.prec {
            EXACT => self.ring.rel_cap as i64,
            n => n,
        };
        let dd = Self::from_int(&self.ring, d as i64);
        let dinv = dd.inv()?;
        let mut r = Self::one(&self.ring);
        let mut known = 1i64;
        while known < rel {
            known = (2 * known).min(rel);
            let rp = r.pow(d as i64 - 1)?;
            let corr = rp.mul(&r).sub(&u).mul(&rp.inv()?).mul(&dinv);
            r = r.sub(&corr).truncate(known);
        }
        let root = r.truncate(rel).mul(&Self::monomial(&self.ring, c_root, v / d as i64));
        if !root.pow(d as i64)?.eq_to_precision(self) {
            return Err(Error::Internal("root iteration did not converge".into()));
        }
        Ok(root)
    }
}

impl<'a> Add<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn add(self, rhs: &'a LaurentSeries) -> LaurentSeries {
        LaurentSeries::add(self, rhs)
    }
}

impl<'a> Sub<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn sub(self, rhs: &'a LaurentSeries) -> LaurentSeries {
        LaurentSeries::sub(self, rhs)
    }
}

impl<'a> Mul<&'a LaurentSeries> for &'a LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: &'a LaurentSeries) -> LaurentSeries {
        LaurentSeries::mul(self, rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        LaurentSeries::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(p: u64, cap: usize) -> Arc<LaurentField> {
        LaurentField::new(FieldDesc::prime(p).unwrap(), cap)
    }

    fn poly(k: &Arc<LaurentField>, v: i64, c: &[i64], prec: Option<i64>) -> LaurentSeries {
        let f = k.field().clone();
        LaurentSeries::from_coeffs(k, v, c.iter().map(|&x| f.from_int(x)).collect(), prec)
    }

    #[test]
    fn product_of_conjugates() {
        let k = ring(5, 32);
        let a = poly(&k, 0, &[1, 1], None);
        let b = poly(&k, 0, &[1, -1], None);
        assert!((&a * &b).eq_to_precision(&poly(&k, 0, &[1, 0, -1], None)));
        assert!((&a * &b).is_exact());
    }

    #[test]
    fn char_two_cancellation() {
        let k = ring(2, 32);
        let a = LaurentSeries::pi_pow(&k, -2);
        let s = &a + &a;
        assert!(s.is_zero());
        assert!(s.is_exact_zero());
    }

    #[test]
    fn geometric_inverse() {
        let k = ring(3, 32);
        let a = poly(&k, 0, &[1, 1], Some(4));
        let inv = a.inv().unwrap();
        assert_eq!(inv.prec(), Some(4));
        // oracle: sum_{k<4} (-pi)^k
        let geom: Vec<i64> = (0..4).map(|k| if k % 2 == 0 { 1 } else { -1 }).collect();
        assert!(inv.eq_to_precision(&poly(&k, 0, &geom, Some(4))));
    }

    #[test]
    fn valuations() {
        let k = ring(7, 32);
        assert_eq!(LaurentSeries::pi_pow(&k, 3).valuation().unwrap(), 3);
        let a = poly(&k, -5, &[2, 0, 0, 0, 0, 0, 1], None);
        assert_eq!(a.valuation().unwrap(), -5);
        let one_plus = poly(&k, 0, &[1, 1], Some(6));
        let z = one_plus.sub(&LaurentSeries::one(&k)).sub(&LaurentSeries::pi_pow(&k, 1));
        assert_eq!(z.valuation(), Err(Error::Precision { bound: 6 }));
    }

    #[test]
    fn tame_roots() {
        let k = ring(5, 32);
        let one = LaurentSeries::one(&k);
        assert!(one.tame_root(5).is_err());
        assert!(one.tame_root(3).unwrap().eq_to_precision(&one));
        let s = poly(&k, 0, &[1, 1], None);
        let sq = &s * &s;
        assert!(sq.tame_root(2).unwrap().eq_to_precision(&s));
        let odd = poly(&k, 1, &[2], None);
        assert_eq!(odd.tame_root(2).unwrap_err(), Error::Root { degree: 2, kind: RootFailure::Valuation });
        // 2 is not a square mod 5
        let ns = poly(&k, 0, &[2, 1], None);
        assert_eq!(
            ns.tame_root(2).unwrap_err(),
            Error::Root { degree: 2, kind: RootFailure::LeadingCoefficient }
        );
    }

    #[test]
    fn precision_min_rule() {
        let k = ring(3, 64);
        let a = poly(&k, 0, &[1, 2], Some(5));
        let b = poly(&k, -2, &[1], Some(3));
        assert_eq!(a.add(&b).prec(), Some(3));
        // (1 + O(pi^5)) * (pi^-2 + O(pi^3)) known mod pi^min(5-2, 3+0)
        assert_eq!(a.mul(&b).prec(), Some(3));
        let z = LaurentSeries::zero_to(&k, 4);
        assert_eq!(z.mul(&b).prec(), Some(2));
    }

    fn arb_series(p: u64) -> impl Strategy<Value = (i64, Vec<u32>)> {
        (-4i64..5, proptest::collection::vec(0u32..p as u32, 1..8)).prop_map(move |(v, mut c)| {
            if c[0] == 0 {
                c[0] = 1;
            }
            (v, c)
        })
    }

    fn from_raw(k: &Arc<LaurentField>, s: &(i64, Vec<u32>)) -> LaurentSeries {
        LaurentSeries::from_coeffs(k, s.0, s.1.iter().map(|&x| FFElem(x)).collect(), None)
    }

    proptest! {
        #[test]
        fn ultrametric_and_multiplicative(a in arb_series(5), b in arb_series(5)) {
            let k = ring(5, 64);
            let (x, y) = (from_raw(&k, &a), from_raw(&k, &b));
            let (vx, vy) = (x.valuation().unwrap(), y.valuation().unwrap());
            prop_assert_eq!((&x * &y).valuation().unwrap(), vx + vy);
            let s = &x + &y;
            if let Some(vs) = s.valuation_opt() {
                prop_assert!(vs >= vx.min(vy));
                if vx != vy {
                    prop_assert_eq!(vs, vx.min(vy));
                }
            }
        }

        #[test]
        fn tame_root_round_trip(a in arb_series(7), d in prop::sample::select(vec![2u64, 3, 4, 6])) {
            let k = ring(7, 40);
            let mut s = from_raw(&k, &a);
            let monic = s.scale(k.field().inv(s.leading().unwrap()).unwrap());
            // canonical root choice returns the series itself when it is monic
            prop_assert!(monic.pow(d as i64).unwrap().tame_root(d).unwrap().eq_to_precision(&monic));
            if a.1.len() % 2 == 0 {
                s = monic;
            }
            let power = s.pow(d as i64).unwrap();
            let root = power.tame_root(d).unwrap();
            prop_assert!(root.pow(d as i64).unwrap().eq_to_precision(&power));
            // the root differs from s by a d-th root of unity in the residue field
            let ratio = root.div(&s).unwrap();
            prop_assert_eq!(ratio.valuation().unwrap(), 0);
            let zeta = ratio.leading().unwrap();
            prop_assert!(ratio.eq_to_precision(&LaurentSeries::constant(&k, zeta)));
        }

        #[test]
        fn inverse_round_trip(a in arb_series(3)) {
            let k = ring(3, 30);
            let s = from_raw(&k, &a);
            let prod = s.mul(&s.inv().unwrap());
            prop_assert!(prod.eq_to_precision(&LaurentSeries::one(&k)));
            prop_assert!(prod.prec().unwrap_or(EXACT) >= 29);
        }
    }
}
