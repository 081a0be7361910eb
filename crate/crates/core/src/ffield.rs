//! Finite fields `F_p` and `F_{p^m}`.
//!
//! Elements of `F_{p^m}` are packed as integers `sum c_i p^i` over the
//! power basis of the modulus. Multiplication goes through discrete-log
//! tables built by exhaustion; the largest field needed here is `F_{7^6}`.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, ParamClause, Result};

/// Largest field order for which tables are built.
pub const MAX_ORDER: u64 = 1 << 18;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// Multiplicative order of `a` modulo the prime `p`.
pub fn order_mod(a: u64, p: u64) -> u64 {
    let a = a % p;
    assert!(a != 0, "zero has no multiplicative order");
    let mut k = 1;
    let mut acc = a;
    while acc != 1 {
        acc = acc * a % p;
        k += 1;
    }
    k
}

/// Inverse of `a` modulo the prime `p`.
pub fn inv_mod(a: i64, p: u64) -> u64 {
    let a = a.rem_euclid(p as i64) as u64;
    assert!(a != 0, "zero is not invertible");
    pow_mod(a, p - 2, p)
}

/// Smallest primitive root modulo the prime `p`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) {
        return Err(ParamClause::NotPrime(p).into());
    }
    if p == 2 {
        return Ok(1);
    }
    (2..p)
        .find(|&g| order_mod(g, p) == p - 1)
        .ok_or_else(|| Error::Internal("prime without primitive root".into()))
}

/// `r0^((p-1)/d)` for the canonical primitive root `r0`; an integer of exact order `d`.
pub fn element_of_order_r(p: u64, d: u64) -> Result<u64> {
    let r0 = primitive_root(p)?;
    if d == 0 || !(p - 1).is_multiple_of(d) {
        return Err(ParamClause::DegreeDivides { d, p }.into());
    }
    Ok(pow_mod(r0, (p - 1) / d, p))
}

// Dense polynomials over F_p, lowest degree first, no trailing zeros.
mod fpoly {
    use super::inv_mod;
    use alloc::vec::Vec;

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut c: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut c);
        c
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm] as i64, p);
        while r.len() > dm {
            let k = r.len() - 1;
            let c = r[k] * lead_inv % p;
            for i in 0..=dm {
                let idx = k - dm + i;
                r[idx] = (r[idx] + p * p - c * m[i] % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut c = alloc::vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                c[i + j] = (c[i + j] + x * y) % p;
            }
        }
        rem(&c, m, p)
    }

    pub fn pow_mod(a: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, p);
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(&acc, &base, m, p);
            }
            base = mul_mod(&base, &base, m, p);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test: `m` of degree n is irreducible iff gcd(X^{p^k} - X, m) = 1 for k <= n/2.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let n = m.len() - 1;
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let x = [0u64, 1];
        let mut xp = rem(&x, m, p);
        for _ in 1..=n / 2 {
            xp = pow_mod(&xp, p, m, p);
            let g = gcd(m, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }
}

struct Tables {
    p: u64,
    m: usize,
    q: u64,
    modulus: Vec<u64>,
    /// exp[k] = g^k for k < q-1.
    exp: Vec<u32>,
    /// log[a] for a != 0.
    log: Vec<u32>,
    generator: u32,
}

/// Descriptor of `F_{p^m}` with a fixed monic irreducible modulus.
#[derive(Clone)]
pub struct FieldDesc(Arc<Tables>);

/// An element of a finite field, packed in base p over the power basis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FFElem(pub(crate) u32);

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({})", self.0)
    }
}

impl FFElem {
    pub fn raw(self) -> u32 {
        self.0
    }
}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.0.p, self.0.m, self.0.modulus)
    }
}

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}

impl Eq for FieldDesc {}

impl FieldDesc {
    /// `F_p^m` with the least irreducible modulus, candidates ordered by
    /// their packed value `sum c_i p^i` over the non-leading coefficients.
    pub fn new(p: u64, m: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(ParamClause::NotPrime(p).into());
        }
        if m == 0 {
            return Err(ParamClause::Other("extension degree must be at least 1".into()).into());
        }
        let q = checked_order(p, m)?;
        let count = q;
        for code in 0..count {
            let mut modulus = Vec::with_capacity(m + 1);
            let mut c = code;
            for _ in 0..m {
                modulus.push(c % p);
                c /= p;
            }
            modulus.push(1);
            if fpoly::is_irreducible(&modulus, p) {
                return Self::build(p, modulus);
            }
        }
        Err(Error::Internal("no irreducible polynomial found".into()))
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    /// Field with a caller-supplied modulus `[c0, .., cm]`; irreducibility is certified.
    pub fn with_modulus(p: u64, modulus: &[u64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(ParamClause::NotPrime(p).into());
        }
        let mut md: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        fpoly::trim(&mut md);
        if md.len() < 2 || *md.last().unwrap() != 1 {
            return Err(ParamClause::Other("modulus must be monic of degree >= 1".into()).into());
        }
        if !fpoly::is_irreducible(&md, p) {
            return Err(ParamClause::Other("modulus is not irreducible".into()).into());
        }
        checked_order(p, md.len() - 1)?;
        Self::build(p, md)
    }

    fn build(p: u64, modulus: Vec<u64>) -> Result<Self> {
        let m = modulus.len() - 1;
        let q = checked_order(p, m)?;
        let pack = |poly: &[u64]| -> u32 {
            let mut acc = 0u64;
            for &c in poly.iter().rev() {
                acc = acc * p + c;
            }
            acc as u32
        };
        let unpack = |mut a: u64| -> Vec<u64> {
            let mut v = Vec::with_capacity(m);
            for _ in 0..m {
                v.push(a % p);
                a /= p;
            }
            fpoly::trim(&mut v);
            v
        };
        // find the smallest generator of the multiplicative group
        let n = q - 1;
        let mut found = None;
        'cand: for cand in 1..q {
            let base = unpack(cand);
            let mut exp = Vec::with_capacity(n as usize);
            let mut acc: Vec<u64> = alloc::vec![1];
            for k in 0..n {
                let packed = pack(&acc);
                if k > 0 && packed == 1 {
                    continue 'cand;
                }
                exp.push(packed);
                acc = fpoly::mul_mod(&acc, &base, &modulus, p);
            }
            found = Some((cand as u32, exp));
            break;
        }
        let (generator, exp) =
            found.ok_or_else(|| Error::Internal("no multiplicative generator".into()))?;
        let mut log = vec![0u32; q as usize];
        for (k, &a) in exp.iter().enumerate() {
            log[a as usize] = k as u32;
        }
        Ok(FieldDesc(Arc::new(Tables { p, m, q, modulus, exp, log, generator })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }
    pub fn degree(&self) -> usize {
        self.0.m
    }
    pub fn order(&self) -> u64 {
        self.0.q
    }
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FFElem {
        FFElem(0)
    }
    pub fn one(&self) -> FFElem {
        FFElem(1)
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FFElem {
        FFElem(n.rem_euclid(self.0.p as i64) as u32)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FFElem> {
        let t = &self.0;
        if coeffs.len() > t.m {
            return Err(ParamClause::Other("too many coefficients for field element".into()).into());
        }
        let mut acc = 0u64;
        for &c in coeffs.iter().rev() {
            acc = acc * t.p + c % t.p;
        }
        Ok(FFElem(acc as u32))
    }

    /// Coefficients over the power basis, length m.
    pub fn coeffs(&self, a: FFElem) -> Vec<u64> {
        let t = &self.0;
        let mut v = Vec::with_capacity(t.m);
        let mut x = a.0 as u64;
        for _ in 0..t.m {
            v.push(x % t.p);
            x /= t.p;
        }
        v
    }

    /// Every element, in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FFElem> {
        (0..self.0.q as u32).map(FFElem)
    }

    pub fn generator(&self) -> FFElem {
        FFElem(self.0.generator)
    }

    #[inline]
    pub fn add(&self, a: FFElem, b: FFElem) -> FFElem {
        let t = &*self.0;
        if t.m == 1 {
            let s = a.0 + b.0;
            let p = t.p as u32;
            return FFElem(if s >= p { s - p } else { s });
        }
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let (mut acc, mut place) = (0u64, 1u64);
        for _ in 0..t.m {
            acc += ((x % t.p + y % t.p) % t.p) * place;
            x /= t.p;
            y /= t.p;
            place *= t.p;
        }
        FFElem(acc as u32)
    }

    #[inline]
    pub fn neg(&self, a: FFElem) -> FFElem {
        let t = &*self.0;
        if t.m == 1 {
            let p = t.p as u32;
            return FFElem(if a.0 == 0 { 0 } else { p - a.0 });
        }
        let mut x = a.0 as u64;
        let (mut acc, mut place) = (0u64, 1u64);
        for _ in 0..t.m {
            acc += ((t.p - x % t.p) % t.p) * place;
            x /= t.p;
            place *= t.p;
        }
        FFElem(acc as u32)
    }

    #[inline]
    pub fn sub(&self, a: FFElem, b: FFElem) -> FFElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FFElem, b: FFElem) -> FFElem {
        let t = &*self.0;
        if a.0 == 0 || b.0 == 0 {
            return FFElem(0);
        }
        if t.m == 1 {
            return FFElem(((a.0 as u64 * b.0 as u64) % t.p) as u32);
        }
        let n = (t.q - 1) as u32;
        let k = t.log[a.0 as usize] + t.log[b.0 as usize];
        FFElem(t.exp[(if k >= n { k - n } else { k }) as usize])
    }

    pub fn inv(&self, a: FFElem) -> Result<FFElem> {
        let t = &*self.0;
        if a.0 == 0 {
            return Err(Error::Domain("zero is not invertible in a finite field"));
        }
        let n = (t.q - 1) as u32;
        let k = t.log[a.0 as usize];
        Ok(FFElem(t.exp[((n - k) % n) as usize]))
    }

    pub fn pow(&self, a: FFElem, e: i64) -> Result<FFElem> {
        if a.0 == 0 {
            return match e {
                0 => Ok(self.one()),
                e if e > 0 => Ok(self.zero()),
                _ => Err(Error::Domain("zero is not invertible in a finite field")),
            };
        }
        let n = (self.0.q - 1) as i64;
        let k = (self.0.log[a.0 as usize] as i64 * e.rem_euclid(n)).rem_euclid(n);
        Ok(FFElem(self.0.exp[k as usize]))
    }

    /// Discrete logarithm with respect to [`FieldDesc::generator`].
    pub fn log(&self, a: FFElem) -> Result<u64> {
        if a.0 == 0 {
            return Err(Error::Domain("logarithm of zero"));
        }
        Ok(self.0.log[a.0 as usize] as u64)
    }

    pub fn multiplicative_order(&self, a: FFElem) -> Result<u64> {
        let n = self.0.q - 1;
        let l = self.log(a)?;
        Ok(n / num_integer::gcd(l, n))
    }

    /// Order of the class of `u` in `kappa^x / (kappa^x)^f`.
    pub fn quotient_order(&self, u: FFElem, f: u64) -> Result<u64> {
        if f == 0 {
            return Err(Error::Domain("quotient exponent must be positive"));
        }
        let l = self.log(u)?;
        let g = num_integer::gcd(f, self.0.q - 1);
        Ok(g / num_integer::gcd(l, g))
    }

    /// Smallest (in packed order) `r` with `r^n = a`, if any.
    pub fn nth_root(&self, a: FFElem, n: u64) -> Option<FFElem> {
        if a.0 == 0 {
            return Some(a);
        }
        self.elements()
            .skip(1)
            .find(|&r| self.pow(r, n as i64).ok() == Some(a))
    }

    /// Evaluate a polynomial with prime-field coefficients at `a`.
    pub fn eval_prime_poly(&self, poly: &[u64], a: FFElem) -> FFElem {
        let mut acc = self.zero();
        for &c in poly.iter().rev() {
            acc = self.add(self.mul(acc, a), self.from_int(c as i64));
        }
        acc
    }

    /// Embedding of `self` into `big`, given by the image of the power-basis generator.
    pub fn embedding_into(&self, big: &FieldDesc) -> Result<FieldEmbedding> {
        if big.p() != self.p() || !big.degree().is_multiple_of(self.degree()) {
            return Err(Error::Domain("target field does not contain the source field"));
        }
        let theta = big
            .elements()
            .find(|&z| big.eval_prime_poly(self.modulus(), z) == big.zero())
            .ok_or_else(|| Error::Internal("modulus has no root in the extension".into()))?;
        Ok(FieldEmbedding { source: self.clone(), target: big.clone(), theta })
    }
}

fn checked_order(p: u64, m: usize) -> Result<u64> {
    let mut q: u64 = 1;
    for _ in 0..m {
        q = q.saturating_mul(p);
        if q > MAX_ORDER {
            return Err(ParamClause::Other("field too large for table arithmetic".into()).into());
        }
    }
    Ok(q)
}

/// A field embedding `kappa -> kappa'` fixed by the image of the generator.
#[derive(Clone, Debug)]
pub struct FieldEmbedding {
    source: FieldDesc,
    target: FieldDesc,
    theta: FFElem,
}

impl FieldEmbedding {
    pub fn target(&self) -> &FieldDesc {
        &self.target
    }

    pub fn map(&self, a: FFElem) -> FFElem {
        let big = &self.target;
        let mut acc = big.zero();
        for &c in self.source.coeffs(a).iter().rev() {
            acc = big.add(big.mul(acc, self.theta), big.from_int(c as i64));
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(3).unwrap(), 2);
        assert_eq!(primitive_root(5).unwrap(), 2);
        assert_eq!(primitive_root(7).unwrap(), 3);
        assert_eq!(primitive_root(11).unwrap(), 2);
        assert!(primitive_root(9).is_err());
    }

    #[test]
    fn primitive_root_proper_divisors() {
        for p in [3u64, 5, 7, 11, 13] {
            let g = primitive_root(p).unwrap();
            for k in 1..p - 1 {
                if (p - 1) % k == 0 {
                    assert_ne!(pow_mod(g, k, p), 1);
                }
            }
        }
    }

    #[test]
    fn order_r() {
        assert_eq!(element_of_order_r(5, 1).unwrap(), 1);
        assert_eq!(element_of_order_r(5, 4).unwrap(), 2);
        assert_eq!(element_of_order_r(7, 2).unwrap(), 6);
        assert!(element_of_order_r(7, 4).is_err());
        for p in [3u64, 5, 7, 13] {
            for d in 1..p {
                if (p - 1) % d == 0 {
                    assert_eq!(order_mod(element_of_order_r(p, d).unwrap(), p), d);
                }
            }
        }
    }

    #[test]
    fn quotient_orders() {
        let f5 = FieldDesc::prime(5).unwrap();
        assert_eq!(f5.quotient_order(f5.one(), 3).unwrap(), 1);
        assert_eq!(f5.quotient_order(f5.from_int(2), 4).unwrap(), 4);
        assert_eq!(f5.quotient_order(f5.from_int(4), 4).unwrap(), 2);
        assert!(f5.quotient_order(f5.zero(), 2).is_err());
    }

    #[test]
    fn quotient_order_brute_force() {
        for (p, m) in [(3u64, 2usize), (5, 1), (7, 1), (5, 2), (2, 3)] {
            let k = FieldDesc::new(p, m).unwrap();
            for f in 1..7u64 {
                let powers: Vec<FFElem> =
                    k.elements().skip(1).map(|z| k.pow(z, f as i64).unwrap()).collect();
                for u in k.elements().skip(1) {
                    let mut j = 1;
                    while !powers.contains(&k.pow(u, j).unwrap()) {
                        j += 1;
                    }
                    let qo = k.quotient_order(u, f).unwrap();
                    assert_eq!(qo, j as u64);
                    assert_eq!(qo == 1, powers.contains(&u));
                    let ord = k.multiplicative_order(u).unwrap();
                    assert_eq!((f * ord) % qo, 0);
                }
            }
        }
    }

    #[test]
    fn fermat_exhaustive() {
        for (p, m) in [(2u64, 1usize), (3, 1), (3, 2), (5, 2), (7, 3), (2, 4)] {
            let k = FieldDesc::new(p, m).unwrap();
            assert!(k.order() <= 343);
            for u in k.elements().skip(1) {
                assert_eq!(k.pow(u, k.order() as i64 - 1).unwrap(), k.one());
                assert_eq!(k.mul(u, k.inv(u).unwrap()), k.one());
            }
        }
    }

    #[test]
    fn distributive_small_field() {
        let k = FieldDesc::new(3, 2).unwrap();
        for a in k.elements() {
            for b in k.elements() {
                for c in k.elements() {
                    assert_eq!(
                        k.mul(a, k.add(b, c)),
                        k.add(k.mul(a, b), k.mul(a, c))
                    );
                }
                assert_eq!(k.sub(k.add(a, b), b), a);
            }
        }
    }

    #[test]
    fn lexicographically_least_modulus() {
        assert_eq!(FieldDesc::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        assert_eq!(FieldDesc::new(5, 2).unwrap().modulus(), &[2, 0, 1]);
        assert_eq!(FieldDesc::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        assert!(FieldDesc::with_modulus(3, &[2, 0, 1]).is_err());
        assert!(FieldDesc::with_modulus(3, &[2, 2, 1]).is_ok());
    }

    #[test]
    fn embedding_is_homomorphism() {
        let small = FieldDesc::new(3, 2).unwrap();
        let big = FieldDesc::new(3, 4).unwrap();
        let emb = small.embedding_into(&big).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                assert_eq!(emb.map(small.mul(a, b)), big.mul(emb.map(a), emb.map(b)));
                assert_eq!(emb.map(small.add(a, b)), big.add(emb.map(a), emb.map(b)));
            }
        }
    }
}
