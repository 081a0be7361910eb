//! The automorphisms `sigma: x -> x + y` and `tau: y -> rho y` of `M / K`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ffield::FFElem;
use crate::linalg;
use crate::series::LaurentSeries;
use crate::tower::{Level, Tower, TowerElement};

/// A `K`-algebra endomorphism of `M` given by the images of `x` and `y`.
#[derive(Clone, Debug)]
pub struct Automorphism {
    image_x: TowerElement,
    image_y: TowerElement,
    xpow: Vec<TowerElement>,
    ypow: Vec<TowerElement>,
}

impl Automorphism {
    pub fn new(image_x: TowerElement, image_y: TowerElement) -> Self {
        let tw = image_x.tower().clone();
        let mut xpow = Vec::with_capacity(tw.p());
        xpow.push(tw.one());
        for k in 1..tw.p() {
            let next = xpow[k - 1].mul(&image_x);
            xpow.push(next);
        }
        let mut ypow = Vec::with_capacity(tw.d());
        ypow.push(tw.one());
        for k in 1..tw.d() {
            let next = ypow[k - 1].mul(&image_y);
            ypow.push(next);
        }
        Automorphism { image_x, image_y, xpow, ypow }
    }

    pub fn identity(tw: &Tower) -> Self {
        Self::new(tw.x(), tw.y())
    }

    pub fn sigma(tw: &Tower) -> Self {
        Self::new(tw.x().add(&tw.y()), tw.y())
    }

    pub fn tau(tw: &Tower) -> Self {
        Self::tau_with(tw, tw.params().rho())
    }

    /// `tau` built from an arbitrary root `rho` (for negative controls).
    pub fn tau_with(tw: &Tower, rho: FFElem) -> Self {
        let c = LaurentSeries::constant(tw.ring(), rho);
        Self::new(tw.x(), tw.y().scale_k(&c))
    }

    pub fn image_x(&self) -> &TowerElement {
        &self.image_x
    }

    pub fn image_y(&self) -> &TowerElement {
        &self.image_y
    }

    /// Whether the images satisfy `Y^d = alpha` and `X^p = alpha^s X + beta`.
    pub fn respects_relations(&self) -> bool {
        let tw = self.image_x.tower();
        let ok_y = self.ypow[tw.d() - 1].mul(&self.image_y).eq_to_precision(&tw.from_k(tw.alpha().clone()));
        let xp = self.xpow[tw.p() - 1].mul(&self.image_x);
        let rhs = self.image_x.scale_k(tw.alpha_s()).add(&tw.from_k(tw.beta().clone()));
        ok_y && xp.eq_to_precision(&rhs)
    }

    pub fn apply(&self, z: &TowerElement) -> TowerElement {
        let tw = z.tower();
        let mut out = tw.zero();
        for j in 0..tw.p() {
            let mut pj = tw.zero();
            let mut any = false;
            for i in 0..tw.d() {
                let c = z.coeff(j, i);
                if c.is_exact_zero() {
                    continue;
                }
                any = true;
                pj = pj.add(&self.ypow[i].scale_k(c));
            }
            if !any {
                continue;
            }
            let term = if j == 0 {
                pj
            } else if pj.lies_in(Level::K) {
                self.xpow[j].scale_k(pj.coeff(0, 0))
            } else {
                pj.mul(&self.xpow[j])
            };
            out = out.add(&term);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism::new(self.apply(&other.image_x), self.apply(&other.image_y))
    }

    pub fn pow(&self, n: u64) -> Automorphism {
        let tw = self.image_x.tower();
        let mut acc = Automorphism::identity(tw);
        for _ in 0..n {
            acc = self.compose(&acc);
        }
        acc
    }

    /// Agreement on the generators `x` and `y`.
    pub fn same_as(&self, other: &Automorphism) -> bool {
        self.image_x.eq_to_precision(&other.image_x) && self.image_y.eq_to_precision(&other.image_y)
    }

    pub fn is_identity(&self) -> bool {
        let tw = self.image_x.tower();
        self.same_as(&Automorphism::identity(tw))
    }
}

/// Outcome of checking the presentation of `Gal(M/K)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub sigma_p: bool,
    pub tau_d: bool,
    pub conjugation: bool,
}

impl RelationReport {
    pub fn all_pass(&self) -> bool {
        self.sigma_p && self.tau_d && self.conjugation
    }
}

/// `sigma^p = tau^d = 1` and `tau sigma tau^{-1} = sigma^r`, checked on `x` and `y`.
pub fn verify_relations(tw: &Tower) -> RelationReport {
    verify_relations_with(tw, tw.params().rho())
}

/// As [`verify_relations`] with `tau` built from the given `rho`.
pub fn verify_relations_with(tw: &Tower, rho: FFElem) -> RelationReport {
    let sigma = Automorphism::sigma(tw);
    let tau = Automorphism::tau_with(tw, rho);
    let d = tw.d() as u64;
    let sigma_p = sigma.pow(tw.p() as u64).is_identity();
    let tau_d = tau.pow(d).is_identity();
    let tau_inv = tau.pow(d - 1);
    let lhs = tau.compose(&sigma).compose(&tau_inv);
    let conjugation = lhs.same_as(&sigma.pow(tw.params().r()));
    RelationReport { sigma_p, tau_d, conjugation }
}

/// `v_M((sigma - 1) z) - v_M(z)`.
pub fn break_via_action(z: &TowerElement) -> Result<i64> {
    let tw = z.tower();
    let v = z.v_m()?;
    if v.rem_euclid(tw.p() as i64) == 0 {
        return Err(Error::Domain("p divides v_M(z)"));
    }
    let diff = Automorphism::sigma(tw).apply(z).sub(z);
    if diff.is_zero() {
        return Err(Error::Domain("z is fixed by sigma"));
    }
    Ok(diff.v_m()? - v)
}

/// `Tr_{M/L}(z) = sum_k tau^k(z)`.
pub fn trace_m_over_l(tw: &Tower, z: &TowerElement) -> TowerElement {
    let tau = Automorphism::tau(tw);
    let mut acc = z.clone();
    let mut cur = z.clone();
    for _ in 1..tw.d() {
        cur = tau.apply(&cur);
        acc = acc.add(&cur);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceCheck {
    pub n: i64,
    pub r: i64,
    /// Least `v_L` over the traces of the spanning set.
    pub min_valuation: Option<i64>,
    /// Every trace lies in `P_L^r`.
    pub contained: bool,
    /// The traces span `P_L^r` over `O_K`.
    pub surjective: bool,
}

impl TraceCheck {
    pub fn pass(&self) -> bool {
        self.contained && self.surjective && self.min_valuation == Some(self.r)
    }
}

/// `Tr_{M/L}(P_M^n) = P_L^r` with `r = ceil(n/e)`, on an `O_K`-basis of `P_M^n`.
pub fn trace_ideal_check(tw: &Tower, n: i64) -> Result<TraceCheck> {
    let pr = tw.params();
    let e = pr.e() as i64;
    let (p, b) = (pr.p() as i64, pr.b());
    let ep = e * p;
    let r = n.div_euclid(e) + i64::from(n.rem_euclid(e) != 0);
    let lshift = |j: usize| -> i64 {
        let num = r + b * j as i64;
        num.div_euclid(p) + i64::from(num.rem_euclid(p) != 0)
    };
    let mut rows: Vec<Vec<LaurentSeries>> = Vec::new();
    let mut contained = true;
    let mut min_valuation: Option<i64> = None;
    for (j, i) in tw.basis(Level::M) {
        let num = n - tw.monomial_vm(j, i);
        let c = num.div_euclid(ep) + i64::from(num.rem_euclid(ep) != 0);
        let gen = tw.monomial(j, i, LaurentSeries::pi_pow(tw.ring(), c));
        let tr = trace_m_over_l(tw, &gen);
        if !tr.lies_in(Level::L) {
            return Err(Error::Internal("trace to L left L".into()));
        }
        let mut row = Vec::with_capacity(tw.p());
        for jj in 0..tw.p() {
            let a = tr.coeff(jj, 0);
            if !a.is_zero() {
                let v = p * a.valuation()? - b * jj as i64;
                min_valuation = Some(min_valuation.map_or(v, |m: i64| m.min(v)));
            }
            let coord = a.shift(-lshift(jj));
            if !coord.is_zero() && coord.valuation()? < 0 {
                contained = false;
            }
            row.push(coord);
        }
        rows.push(row);
    }
    let red = linalg::reduce(rows, Vec::new())?;
    if let Some(err) = red.ambiguous {
        return Err(err);
    }
    let surjective = contained && red.rank == tw.p() && red.pivot_vals.iter().all(|&v| v == 0);
    Ok(TraceCheck { n, r, min_valuation, contained, surjective })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldDesc;
    use crate::series::LaurentField;
    use crate::tower::ExtensionParams;
    use alloc::vec;

    fn tower(p: u64, e: u64, f: u64, t: i64, b: i64) -> Tower {
        let k = LaurentField::new(FieldDesc::prime(p).unwrap(), 40);
        let kappa = k.field().clone();
        let g = kappa.from_int(crate::ffield::primitive_root(p).unwrap() as i64);
        let gamma = LaurentSeries::from_coeffs(&k, 0, vec![kappa.one(), kappa.one()], None);
        let mu = LaurentSeries::from_coeffs(&k, 0, vec![g, kappa.zero(), kappa.one()], None);
        let beta = LaurentSeries::from_coeffs(&k, -b, vec![kappa.from_int(2), kappa.one()], None);
        Tower::build(ExtensionParams::new(p, kappa, e, f, t, b, gamma, mu, beta).unwrap()).unwrap()
    }

    #[test]
    fn action_on_generators() {
        let tw = tower(5, 2, 2, 1, 3);
        let s = Automorphism::sigma(&tw);
        assert!(s.apply(&tw.x()).eq_to_precision(&tw.x().add(&tw.y())));
        let t = Automorphism::tau(&tw);
        let rho = LaurentSeries::constant(tw.ring(), tw.params().rho());
        assert!(t.apply(&tw.y()).eq_to_precision(&tw.y().scale_k(&rho)));
        assert!(s.apply(&tw.pi()).eq_to_precision(&tw.pi()));
        assert!(s.respects_relations() && t.respects_relations());
    }

    #[test]
    fn relations_hold_and_corruption_is_detected() {
        for (p, e, f, t, b) in [(3, 2, 1, 1, 1), (5, 2, 2, 1, 3), (7, 3, 1, 1, -1), (5, 1, 1, 0, 2)] {
            let tw = tower(p, e, f, t, b);
            assert!(verify_relations(&tw).all_pass());
        }
        let tw = tower(5, 2, 1, 1, 3);
        let bad = tw.params().kappa().from_int(2);
        assert!(!verify_relations_with(&tw, bad).tau_d);
    }

    #[test]
    fn breaks() {
        let tw = tower(3, 2, 1, 1, 1);
        assert_eq!(break_via_action(&tw.x()).unwrap(), 5);
        assert_eq!(break_via_action(&tw.x().mul(&tw.pi())).unwrap(), 5);
        let g = tower(5, 1, 1, 0, 3);
        assert_eq!(break_via_action(&g.x()).unwrap(), 3);
        assert_eq!(break_via_action(&g.y()).unwrap_err(), Error::Domain("p divides v_M(z)"));
    }

    #[test]
    fn fixed_fields() {
        let tw = tower(7, 3, 2, 1, 2);
        let (s, t) = (Automorphism::sigma(&tw), Automorphism::tau(&tw));
        for (j, i) in tw.basis(Level::M) {
            let m = tw.monomial(j, i, LaurentSeries::one(tw.ring()));
            assert_eq!(s.apply(&m).eq_to_precision(&m), j == 0);
            assert_eq!(t.apply(&m).eq_to_precision(&m), i == 0);
        }
    }

    #[test]
    fn trace_ideals() {
        let tw = tower(3, 2, 1, 1, 1);
        let c3 = trace_ideal_check(&tw, 3).unwrap();
        assert_eq!(c3.r, 2);
        assert!(c3.pass());
        let c4 = trace_ideal_check(&tw, 4).unwrap();
        assert_eq!(c4.r, 2);
        assert!(c4.pass());
        let g = tower(5, 1, 1, 0, 2);
        let c7 = trace_ideal_check(&g, 7).unwrap();
        assert_eq!(c7.r, 7);
        assert!(c7.pass());
    }

    #[test]
    fn trace_of_twisted_x() {
        let tw = tower(7, 6, 1, 1, 3);
        let mut z = tw.x();
        for i in 1..tw.d() {
            z = z.add(&tw.monomial(0, i, LaurentSeries::from_int(tw.ring(), i as i64 + 1)));
        }
        let tr = trace_m_over_l(&tw, &z);
        let d = LaurentSeries::from_int(tw.ring(), tw.d() as i64).inv().unwrap();
        assert!(tr.scale_k(&d).eq_to_precision(&tw.x()));
        assert!(tr.eq_to_precision(&z.trace(crate::tower::Sub::MOverL).unwrap()));
    }
}
