//! The Hopf algebra `H = K[Psi]` as the `tau`-fixed part of the group ring
//! `M'[<sigma>]`, and its action on `L`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ffield::{inv_mod, pow_mod, primitive_root, FFElem};
use crate::galois::Automorphism;
use crate::linalg;
use crate::series::LaurentSeries;
use crate::tower::{Level, Tower, TowerElement};

/// `sum_j a_j sigma^j` with `a_j` in `M'`.
#[derive(Clone, Debug)]
pub struct GroupRingElem {
    tower: Tower,
    a: Vec<TowerElement>,
}

impl GroupRingElem {
    pub fn zero(tw: &Tower) -> Self {
        GroupRingElem { tower: tw.clone(), a: vec![tw.zero(); tw.p()] }
    }

    pub fn one(tw: &Tower) -> Self {
        Self::sigma_pow(tw, 0)
    }

    pub fn sigma_pow(tw: &Tower, k: i64) -> Self {
        let mut z = Self::zero(tw);
        z.a[k.rem_euclid(tw.p() as i64) as usize] = tw.one();
        z
    }

    /// Coefficients must lie in `M'`.
    pub fn from_coeffs(tw: &Tower, a: Vec<TowerElement>) -> Result<Self> {
        if a.len() != tw.p() {
            return Err(Error::Domain("group ring element needs p coefficients"));
        }
        if a.iter().any(|z| !z.lies_in(Level::MPrime)) {
            return Err(Error::Subfield);
        }
        Ok(GroupRingElem { tower: tw.clone(), a })
    }

    pub fn coeffs(&self) -> &[TowerElement] {
        &self.a
    }

    pub fn coeff(&self, j: usize) -> &TowerElement {
        &self.a[j]
    }

    pub fn add(&self, o: &Self) -> Self {
        let a = self.a.iter().zip(&o.a).map(|(u, v)| u.add(v)).collect();
        GroupRingElem { tower: self.tower.clone(), a }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let a = self.a.iter().zip(&o.a).map(|(u, v)| u.sub(v)).collect();
        GroupRingElem { tower: self.tower.clone(), a }
    }

    pub fn neg(&self) -> Self {
        GroupRingElem { tower: self.tower.clone(), a: self.a.iter().map(|u| u.neg()).collect() }
    }

    /// Multiply every coefficient by `c` in `M'`.
    pub fn scale(&self, c: &TowerElement) -> Self {
        GroupRingElem { tower: self.tower.clone(), a: self.a.iter().map(|u| u.mul(c)).collect() }
    }

    pub fn scale_k(&self, c: &LaurentSeries) -> Self {
        GroupRingElem { tower: self.tower.clone(), a: self.a.iter().map(|u| u.scale_k(c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.tower.p();
        let mut out = Self::zero(&self.tower);
        for (i, u) in self.a.iter().enumerate() {
            if u.is_exact_zero() {
                continue;
            }
            for (j, v) in o.a.iter().enumerate() {
                if v.is_exact_zero() {
                    continue;
                }
                let k = (i + j) % p;
                out.a[k] = out.a[k].add(&u.mul(v));
            }
        }
        out
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut acc = Self::one(&self.tower);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|u| u.is_zero())
    }

    pub fn eq_to_precision(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// `eps(sigma^j) = 1`.
    pub fn counit(&self) -> TowerElement {
        self.a.iter().fold(self.tower.zero(), |acc, u| acc.add(u))
    }

    /// `S(sigma^j) = sigma^{-j}`.
    pub fn antipode(&self) -> Self {
        let p = self.tower.p();
        let mut out = Self::zero(&self.tower);
        for (j, u) in self.a.iter().enumerate() {
            out.a[(p - j) % p] = u.clone();
        }
        out
    }

    /// The semilinear action `a sigma^j -> tau(a) sigma^{j r}`.
    pub fn tau_act(&self) -> Self {
        let tw = &self.tower;
        let (p, r) = (tw.p(), tw.params().r() as usize);
        let rho = tw.params().rho();
        let kappa = tw.params().kappa().clone();
        let mut out = Self::zero(tw);
        for (j, u) in self.a.iter().enumerate() {
            let mut img = tw.zero();
            for i in 0..tw.d() {
                let c = u.coeff(0, i);
                if c.is_exact_zero() {
                    continue;
                }
                let twist = LaurentSeries::constant(tw.ring(), kappa.pow(rho, i as i64).expect("rho is a unit"));
                img = img.add(&tw.monomial(0, i, c.mul(&twist)));
            }
            out.a[(j * r) % p] = img;
        }
        out
    }

    pub fn tau_fixed(&self) -> bool {
        self.tau_act().eq_to_precision(self)
    }

    /// Coordinates over `K` on `y^i sigma^j`.
    fn k_vector(&self) -> Vec<LaurentSeries> {
        let d = self.tower.d();
        self.a.iter().flat_map(|u| (0..d).map(move |i| u.coeff(0, i).clone())).collect()
    }
}

/// `K`-rank of a family of group ring elements.
pub fn k_rank(elems: &[GroupRingElem]) -> Result<usize> {
    if elems.is_empty() {
        return Ok(0);
    }
    linalg::rank(elems.iter().map(|h| h.k_vector()).collect())
}

/// `y^{-j}` in `M'`.
fn y_inv_pow(tw: &Tower, j: u64) -> Result<TowerElement> {
    let d = tw.d() as u64;
    let k = j.div_ceil(d);
    let ainv = tw.alpha().pow(-(k as i64))?;
    Ok(tw.y().pow(k * d - j).scale_k(&ainv))
}

fn kappa_const(tw: &Tower, n: i64) -> TowerElement {
    tw.from_int(n)
}

/// The presentation of `H`: `Psi`, the basis `Psi_1..Psi_{p-1}`, and cached `sigma^j`.
#[derive(Clone, Debug)]
pub struct HopfPresentation {
    tower: Tower,
    r0: u64,
    psi_basis: Vec<GroupRingElem>,
    sigma_pows: Vec<Automorphism>,
}

impl HopfPresentation {
    pub fn new(tw: &Tower) -> Result<Self> {
        let p = tw.p() as u64;
        let r0 = primitive_root(p)?;
        let mut psi_basis = Vec::with_capacity(tw.p() - 1);
        for j in 1..p {
            psi_basis.push(psi_j(tw, j)?);
        }
        for (k, h) in psi_basis.iter().enumerate() {
            if !h.tau_fixed() {
                return Err(Error::Internal(format!("Psi_{} is not tau-fixed", k + 1)));
            }
        }
        let sigma_pows = (0..p as i64)
            .map(|j| Automorphism::new(tw.x().add(&tw.y().scale_k(&LaurentSeries::from_int(tw.ring(), j))), tw.y()))
            .collect();
        Ok(HopfPresentation { tower: tw.clone(), r0, psi_basis, sigma_pows })
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    /// `r_0`, the least primitive root mod `p`.
    pub fn r0(&self) -> u64 {
        self.r0
    }

    /// `rho_0`, the image of `r_0` in `kappa`.
    pub fn rho0(&self) -> FFElem {
        self.tower.params().kappa().from_int(self.r0 as i64)
    }

    pub fn s(&self) -> u64 {
        self.tower.params().s()
    }

    /// `Psi = Psi_1`.
    pub fn psi(&self) -> &GroupRingElem {
        &self.psi_basis[0]
    }

    /// `Psi_j` for `1 <= j <= p-1`.
    pub fn psi_j(&self, j: usize) -> &GroupRingElem {
        &self.psi_basis[j - 1]
    }

    /// `theta(i, t) = sum_{k<d} rho_0^{isk} sigma^{r_0^{t+sk}}`.
    pub fn theta(&self, i: u64, t: u64) -> Result<GroupRingElem> {
        let tw = &self.tower;
        let (p, d, s) = (tw.p() as u64, tw.d() as u64, self.s());
        if i >= d || t >= s {
            return Err(Error::Domain("theta index out of range"));
        }
        let mut out = GroupRingElem::zero(tw);
        for k in 0..d {
            let c = pow_mod(self.r0, i * s * k, p) as i64;
            let g = pow_mod(self.r0, t + s * k, p) as usize;
            out.a[g] = out.a[g].add(&kappa_const(tw, c));
        }
        Ok(out)
    }

    /// `Theta(i) = sum_{k<p-1} rho_0^{ik} sigma^{r_0^k}`.
    #[allow(non_snake_case)]
    pub fn Theta(&self, i: u64) -> Result<GroupRingElem> {
        let tw = &self.tower;
        let p = tw.p() as u64;
        if i >= p {
            return Err(Error::Domain("Theta index out of range"));
        }
        let mut out = GroupRingElem::zero(tw);
        for k in 0..p - 1 {
            let c = pow_mod(self.r0, i * k, p) as i64;
            let g = pow_mod(self.r0, k, p) as usize;
            out.a[g] = out.a[g].add(&kappa_const(tw, c));
        }
        Ok(out)
    }

    /// `h . z = sum_j a_j sigma^j(z)` for `tau`-fixed `h` and `z` in `L`.
    pub fn act(&self, h: &GroupRingElem, z: &TowerElement) -> Result<TowerElement> {
        if !z.lies_in(Level::L) {
            return Err(Error::Subfield);
        }
        if !h.tau_fixed() {
            return Err(Error::Domain("acting element is not tau-fixed"));
        }
        self.act_fixed(h, z)
    }

    /// As [`HopfPresentation::act`] for elements already known to be `tau`-fixed.
    pub(crate) fn act_fixed(&self, h: &GroupRingElem, z: &TowerElement) -> Result<TowerElement> {
        let tw = &self.tower;
        let mut out = tw.zero();
        for (j, a) in h.a.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            out = out.add(&self.sigma_pows[j].apply(z).mul(a));
        }
        if !out.lies_in(Level::L) {
            return Err(Error::Support);
        }
        Ok(out)
    }

    /// `Psi` applied `j` times.
    pub fn psi_iter(&self, j: usize, z: &TowerElement) -> Result<TowerElement> {
        let mut cur = z.clone();
        for _ in 0..j {
            cur = self.act_fixed(self.psi(), &cur)?;
        }
        Ok(cur)
    }

    /// `Psi^i` against `i! Psi_i`.
    pub fn power_identity(&self, i: usize) -> Result<PowerReport> {
        let tw = &self.tower;
        if i == 0 || i >= tw.p() {
            return Err(Error::Domain("power identity index out of range"));
        }
        let lhs = self.psi().pow(i as u64);
        let fact = (1..=i as i64).product::<i64>();
        let rhs = self.psi_j(i).scale_k(&LaurentSeries::from_int(tw.ring(), fact));
        let discrepancy = lhs.sub(&rhs);
        let unadjusted = psi_sum(tw, i as u64)?.scale_k(&LaurentSeries::from_int(tw.ring(), fact));
        let against_sum_formula = lhs.sub(&unadjusted);
        Ok(PowerReport { i, equal: discrepancy.is_zero(), discrepancy, against_sum_formula })
    }

    /// Rank of `{1, Psi, .., Psi^{p-1}}` over `K`.
    pub fn power_rank(&self) -> Result<usize> {
        let tw = &self.tower;
        let mut elems = vec![GroupRingElem::one(tw)];
        for _ in 1..tw.p() {
            let next = elems.last().unwrap().mul(self.psi());
            elems.push(next);
        }
        k_rank(&elems)
    }

    /// Rank of `{1, Psi_1, .., Psi_{p-1}}` over `K`.
    pub fn basis_rank(&self) -> Result<usize> {
        let mut elems = vec![GroupRingElem::one(&self.tower)];
        elems.extend(self.psi_basis.iter().cloned());
        k_rank(&elems)
    }

    /// `Psi(uv) = (Psi u) v + u (Psi v) - alpha^s sum_i (C(p,i)/p) (Psi^i u)(Psi^{p-i} v)`.
    pub fn measuring_identity(&self, u: &TowerElement, v: &TowerElement) -> Result<bool> {
        let tw = &self.tower;
        let p = tw.p();
        let mut iu = vec![u.clone()];
        let mut iv = vec![v.clone()];
        for _ in 1..p {
            iu.push(self.act_fixed(self.psi(), iu.last().unwrap())?);
            iv.push(self.act_fixed(self.psi(), iv.last().unwrap())?);
        }
        let lhs = self.act_fixed(self.psi(), &u.mul(v))?;
        let mut corr = tw.zero();
        let mut binom: u64 = 1;
        for i in 1..p {
            binom = binom * (p - i + 1) as u64 / i as u64;
            let c = ((binom / p as u64) % p as u64) as i64;
            if c == 0 {
                continue;
            }
            let term = iu[i].mul(&iv[p - i]).scale_k(&LaurentSeries::from_int(tw.ring(), c));
            corr = corr.add(&term);
        }
        let rhs = iu[1].mul(v).add(&u.mul(&iv[1])).sub(&corr.scale_k(tw.alpha_s()));
        Ok(lhs.eq_to_precision(&rhs))
    }
}

/// `-y^{-j} sum_{m=1}^{p-1} m^{-j} sigma^m`.
fn psi_sum(tw: &Tower, j: u64) -> Result<GroupRingElem> {
    let p = tw.p() as u64;
    let yinv = y_inv_pow(tw, j)?;
    let mut out = GroupRingElem::zero(tw);
    for m in 1..p {
        let c = pow_mod(inv_mod(m as i64, p), j, p) as i64;
        out.a[m as usize] = yinv.scale_k(&LaurentSeries::from_int(tw.ring(), -c));
    }
    Ok(out)
}

/// `Psi_j`; for `j = p-1` the constant term is adjusted to `-y^{-(p-1)} sum_{m=0}^{p-1} sigma^m`.
fn psi_j(tw: &Tower, j: u64) -> Result<GroupRingElem> {
    let p = tw.p() as u64;
    let mut out = psi_sum(tw, j)?;
    if j == p - 1 {
        out.a[0] = y_inv_pow(tw, j)?.neg();
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PowerReport {
    pub i: usize,
    /// `Psi^i = i! Psi_i` with the adjusted `Psi_{p-1}`.
    pub equal: bool,
    pub discrepancy: GroupRingElem,
    /// `Psi^i - i! (-y^{-i} sum_{m>=1} m^{-i} sigma^m)`; nonzero only at `i = p-1`.
    pub against_sum_formula: GroupRingElem,
}

/// Outcome of expanding `(-sum_k x^k/k)^i` against `-i! sum_k x^k/k^i` mod `(p, x^p - 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma32 {
    pub p: u64,
    pub i: u64,
    pub pass: bool,
    /// Coefficients of `x^0..x^{p-1}` of left minus right, in `[0, p)`.
    pub defect: Vec<u64>,
}

pub fn lemma32(p: u64, i: u64) -> Result<Lemma32> {
    if !crate::ffield::is_prime(p) {
        return Err(crate::error::ParamClause::NotPrime(p).into());
    }
    if i == 0 || i >= p {
        return Err(Error::Domain("lemma index must lie in 1..p-1"));
    }
    let n = p as usize;
    let base: Vec<u64> = (0..p).map(|k| if k == 0 { 0 } else { (p - inv_mod(k as i64, p)) % p }).collect();
    let mut lhs = vec![0u64; n];
    lhs[0] = 1;
    for _ in 0..i {
        let mut next = vec![0u64; n];
        for (a, &u) in lhs.iter().enumerate() {
            if u == 0 {
                continue;
            }
            for (b, &v) in base.iter().enumerate() {
                next[(a + b) % n] = (next[(a + b) % n] + u * v) % p;
            }
        }
        lhs = next;
    }
    let fact = (1..=i).fold(1u64, |acc, k| acc * k % p);
    let rhs: Vec<u64> = (0..p)
        .map(|k| if k == 0 { 0 } else { (p - fact * pow_mod(inv_mod(k as i64, p), i, p) % p) % p })
        .collect();
    let defect: Vec<u64> = lhs.iter().zip(&rhs).map(|(a, b)| (a + p - b) % p).collect();
    let pass = defect.iter().all(|&c| c == 0);
    Ok(Lemma32 { p, i, pass, defect })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldDesc;
    use crate::series::LaurentField;
    use crate::tower::ExtensionParams;

    fn tower(p: u64, e: u64, f: u64, t: i64, b: i64) -> Tower {
        let k = LaurentField::new(FieldDesc::prime(p).unwrap(), 40);
        let kappa = k.field().clone();
        let g = kappa.from_int(primitive_root(p).unwrap() as i64);
        let gamma = LaurentSeries::from_coeffs(&k, 0, vec![kappa.one(), kappa.one()], None);
        let mu = LaurentSeries::from_coeffs(&k, 0, vec![g, kappa.zero(), kappa.one()], None);
        let beta = LaurentSeries::from_coeffs(&k, -b, vec![kappa.from_int(2), kappa.one()], None);
        Tower::build(ExtensionParams::new(p, kappa, e, f, t, b, gamma, mu, beta).unwrap()).unwrap()
    }

    #[test]
    fn lemma_defects() {
        assert_eq!(lemma32(5, 1).unwrap().defect, vec![0; 5]);
        let b = lemma32(3, 2).unwrap();
        assert!(!b.pass);
        assert_eq!(b.defect, vec![1, 0, 0]);
        assert!(lemma32(7, 3).unwrap().pass);
        for p in [3u64, 5, 7, 11, 13] {
            for i in 1..p - 1 {
                assert!(lemma32(p, i).unwrap().pass, "p={p} i={i}");
            }
            let mut one = vec![0; p as usize];
            one[0] = 1;
            assert_eq!(lemma32(p, p - 1).unwrap().defect, one);
        }
    }

    #[test]
    fn thetas() {
        let tw = tower(5, 2, 1, 1, 3);
        let h = HopfPresentation::new(&tw).unwrap();
        let t0 = h.Theta(0).unwrap();
        for j in 0..5 {
            let want = if j == 0 { tw.zero() } else { tw.one() };
            assert!(t0.coeff(j).eq_to_precision(&want));
        }
        let y = tw.y();
        let pair1 = [h.theta(1, 0).unwrap().scale(&y), h.theta(1, 1).unwrap().scale(&y)];
        let pair2 = [h.Theta(1).unwrap().scale(&y), h.Theta(3).unwrap().scale(&y)];
        assert_eq!(k_rank(&pair1).unwrap(), 2);
        assert_eq!(k_rank(&pair2).unwrap(), 2);
        let all: Vec<_> = pair1.iter().chain(pair2.iter()).cloned().collect();
        assert_eq!(k_rank(&all).unwrap(), 2);
        let full = tower(5, 4, 1, 1, 3);
        let hf = HopfPresentation::new(&full).unwrap();
        for i in 0..4 {
            assert!(hf.theta(i, 0).unwrap().eq_to_precision(&hf.Theta(i).unwrap()));
        }
    }

    #[test]
    fn psi_for_p3() {
        let tw = tower(3, 2, 1, 1, 1);
        let h = HopfPresentation::new(&tw).unwrap();
        let yinv = tw.y().inv().unwrap();
        let rho0inv = tw.from_k(LaurentSeries::constant(tw.ring(), tw.params().kappa().inv(h.rho0()).unwrap()));
        let mut want = GroupRingElem::zero(&tw);
        want.a[1] = yinv.neg();
        want.a[2] = yinv.mul(&rho0inv).neg();
        assert!(h.psi().eq_to_precision(&want));
        assert!(h.psi_j(2).counit().is_zero());
        assert!(h.psi().counit().is_zero());
        assert!(h.psi().antipode().eq_to_precision(&h.psi().neg()));
    }

    #[test]
    fn tau_fixedness() {
        let tw = tower(7, 3, 2, 1, 2);
        let h = HopfPresentation::new(&tw).unwrap();
        assert!(GroupRingElem::one(&tw).tau_fixed());
        assert!(!GroupRingElem::sigma_pow(&tw, 1).tau_fixed());
        assert!(h.psi().tau_fixed());
    }

    #[test]
    fn action_on_powers_of_x() {
        for (p, e, f, t, b) in [(3, 2, 1, 1, 1), (5, 2, 2, 1, 3), (7, 6, 1, 1, -1), (5, 1, 1, 0, 4)] {
            let tw = tower(p, e, f, t, b);
            let h = HopfPresentation::new(&tw).unwrap();
            assert!(h.act(h.psi(), &tw.one()).unwrap().is_zero());
            for i in 1..tw.p() {
                let got = h.act(h.psi(), &tw.x().pow(i as u64)).unwrap();
                let want = tw.x().pow(i as u64 - 1).scale_k(&LaurentSeries::from_int(tw.ring(), i as i64));
                assert!(got.eq_to_precision(&want), "p={p} i={i}");
            }
            let j = tw.p() - 1;
            let top = h.act(h.psi_j(j), &tw.x().pow(j as u64)).unwrap();
            assert!(top.eq_to_precision(&tw.one()));
            assert!(h.psi_iter(j, &tw.x().pow(j as u64)).unwrap().eq_to_precision(&tw.from_int(-1)));
        }
    }

    #[test]
    fn power_identities() {
        let tw = tower(5, 2, 2, 1, 3);
        let h = HopfPresentation::new(&tw).unwrap();
        for i in 1..5 {
            let rep = h.power_identity(i).unwrap();
            assert!(rep.equal, "i={i}");
            assert_eq!(rep.against_sum_formula.is_zero(), i < 4);
        }
        assert!(h.psi().pow(5).is_zero());
        assert_eq!(h.power_rank().unwrap(), 5);
        assert_eq!(h.basis_rank().unwrap(), 5);
    }

    #[test]
    fn measuring() {
        for (p, e, f, t, b) in [(3, 2, 1, 1, 1), (5, 2, 1, 1, 2)] {
            let tw = tower(p, e, f, t, b);
            let h = HopfPresentation::new(&tw).unwrap();
            for a in 0..tw.p() as u64 {
                for c in 0..tw.p() as u64 {
                    assert!(h.measuring_identity(&tw.x().pow(a), &tw.x().pow(c)).unwrap(), "a={a} c={c}");
                }
            }
        }
    }
}
