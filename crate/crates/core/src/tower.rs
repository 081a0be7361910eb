//! The tower `K ⊂ L = K(x) ⊂ M = K(x, y)` and `K ⊂ M' = K(y) ⊂ M`.
//!
//! Elements of `M` are tables `c[j][i]` over `K` on the basis `x^j y^i`,
//! reduced eagerly with `y^d = alpha` and `x^p = alpha^s x + beta`.
//! Valuations come from norms, computed as determinants of multiplication
//! matrices written on integral bases of the smallest subfield that contains
//! the element.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;

use crate::error::{Error, ParamClause, Result};
use crate::ffield::{element_of_order_r, is_prime, FFElem, FieldDesc};
use crate::linalg::{self, Scalar};
use crate::scaffold;
use crate::series::{LaurentField, LaurentSeries};
use crate::Rational;

/// The four fields of the tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Level {
    K,
    MPrime,
    L,
    M,
}

/// Relative extensions for norms and traces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sub {
    /// `M / M'`
    MOverMPrime,
    /// `M / L`
    MOverL,
    /// `L / K`
    LOverK,
    /// `M / K`
    MOverK,
}

/// Check the integer constraints on `(p, e, f, t, b)`.
pub fn check_numeric(p: u64, e: u64, f: u64, t: i64, b: i64) -> Result<()> {
    if !is_prime(p) {
        return Err(ParamClause::NotPrime(p).into());
    }
    let d = e.checked_mul(f).unwrap_or(0);
    if e == 0 || f == 0 || !(p - 1).is_multiple_of(d) {
        return Err(ParamClause::DegreeDivides { d, p }.into());
    }
    if t < 0 || t as u64 >= e {
        return Err(ParamClause::TRange { t, e }.into());
    }
    if (t as u64).gcd(&e) != 1 {
        return Err(ParamClause::TCoprime { t, e }.into());
    }
    if b.rem_euclid(p as i64) == 0 {
        return Err(ParamClause::BCoprime { b, p }.into());
    }
    if b * e as i64 + p as i64 * t <= 0 {
        return Err(ParamClause::RamPositive.into());
    }
    Ok(())
}

/// Relative precision (coefficient slots) used for `K` unless overridden.
pub fn default_precision(p: u64, e: u64, f: u64, t: i64, b: i64) -> usize {
    let span = b.unsigned_abs() + f * t as u64 + e;
    (24 + 2 * p + 2 * span) as usize
}

/// The datum `(p, kappa, e, f, t, b, gamma, mu, beta)`.
#[derive(Clone, Debug)]
pub struct ExtensionParams {
    p: u64,
    kappa: FieldDesc,
    e: u64,
    f: u64,
    t: i64,
    b: i64,
    gamma: LaurentSeries,
    mu: LaurentSeries,
    beta: LaurentSeries,
    r: u64,
}

impl ExtensionParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p: u64,
        kappa: FieldDesc,
        e: u64,
        f: u64,
        t: i64,
        b: i64,
        gamma: LaurentSeries,
        mu: LaurentSeries,
        beta: LaurentSeries,
    ) -> Result<Self> {
        if kappa.p() != p {
            return Err(ParamClause::Characteristic { kappa: kappa.p(), p }.into());
        }
        check_numeric(p, e, f, t, b)?;
        for s in [&gamma, &mu, &beta] {
            if *s.field() != kappa {
                return Err(ParamClause::FieldMismatch.into());
            }
        }
        let ring = gamma.ring().clone();
        let mu = mu.rehome(&ring);
        let beta = beta.rehome(&ring);
        if gamma.valuation_opt() != Some(0) {
            return Err(ParamClause::GammaUnit.into());
        }
        if mu.valuation_opt() != Some(0) {
            return Err(ParamClause::MuUnit.into());
        }
        let order = kappa.quotient_order(mu.residue()?, f)?;
        if order != f {
            return Err(ParamClause::MuOrder { order, f }.into());
        }
        match beta.valuation_opt() {
            Some(v) if v == -b => {}
            Some(found) => return Err(ParamClause::BetaValuation { found, b }.into()),
            None => return Err(ParamClause::Other("beta is zero to known precision".into()).into()),
        }
        let r = element_of_order_r(p, e * f)?;
        Ok(ExtensionParams { p, kappa, e, f, t, b, gamma, mu, beta, r })
    }

    /// The same datum over a copy of `K` with relative precision `rel`.
    pub fn with_precision(&self, rel: usize) -> Self {
        let ring = LaurentField::new(self.kappa.clone(), rel);
        ExtensionParams {
            gamma: self.gamma.rehome(&ring),
            mu: self.mu.rehome(&ring),
            beta: self.beta.rehome(&ring),
            kappa: self.kappa.clone(),
            ..*self
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn kappa(&self) -> &FieldDesc {
        &self.kappa
    }
    pub fn ring(&self) -> &Arc<LaurentField> {
        self.gamma.ring()
    }
    pub fn e(&self) -> u64 {
        self.e
    }
    pub fn f(&self) -> u64 {
        self.f
    }
    pub fn t(&self) -> i64 {
        self.t
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn gamma(&self) -> &LaurentSeries {
        &self.gamma
    }
    pub fn mu(&self) -> &LaurentSeries {
        &self.mu
    }
    pub fn beta(&self) -> &LaurentSeries {
        &self.beta
    }
    pub fn d(&self) -> u64 {
        self.e * self.f
    }
    pub fn s(&self) -> u64 {
        (self.p - 1) / self.d()
    }
    /// `r`, of multiplicative order `d` mod `p`.
    pub fn r(&self) -> u64 {
        self.r
    }
    /// `rho`, the image of `r` in `kappa`.
    pub fn rho(&self) -> FFElem {
        self.kappa.from_int(self.r as i64)
    }
    /// `alpha = pi^(f t) gamma^f mu`.
    pub fn alpha(&self) -> LaurentSeries {
        let g = self.gamma.pow(self.f as i64).expect("gamma is a unit");
        g.mul(&self.mu).shift(self.f as i64 * self.t)
    }
    /// `ell = b + p t / e`.
    pub fn ell(&self) -> Rational {
        Rational::new(self.b * self.e as i64 + self.p as i64 * self.t, self.e as i64)
    }
    /// `b' = e b + p t`.
    pub fn b_prime(&self) -> i64 {
        self.e as i64 * self.b + self.p as i64 * self.t
    }
    /// `b mod p` in `(0, p)`.
    pub fn b_bar(&self) -> u64 {
        self.b.rem_euclid(self.p as i64) as u64
    }
}

/// Lower convex hull of the points `(i, v(a_i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    pub vertices: Vec<(usize, i64)>,
    pub slopes: Vec<Rational>,
}

impl NewtonPolygon {
    /// `vals[i]` is the valuation of the coefficient of `X^i` (None for zero).
    pub fn from_valuations(vals: &[Option<i64>]) -> Self {
        let pts: Vec<(i64, i64)> =
            vals.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i as i64, v))).collect();
        let mut hull: Vec<(i64, i64)> = Vec::new();
        for &q in &pts {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                let cross = (b.0 - a.0) as i128 * (q.1 - a.1) as i128 - (b.1 - a.1) as i128 * (q.0 - a.0) as i128;
                if cross <= 0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(q);
        }
        let slopes = hull.windows(2).map(|w| Rational::new(w[1].1 - w[0].1, w[1].0 - w[0].0)).collect();
        NewtonPolygon { vertices: hull.into_iter().map(|(i, v)| (i as usize, v)).collect(), slopes }
    }

    pub fn is_single_segment(&self) -> bool {
        self.vertices.len() == 2
    }
}

/// `kappa ⊂ kappa_f`, the residue field of `M'` and `M`.
#[derive(Clone, Debug)]
pub struct ResidueTower {
    pub kappa_f: FieldDesc,
    /// Image of the residue of `mu` in `kappa_f`; an `f`-th power there.
    pub mu_image: FFElem,
}

/// Valuations recorded at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecordedValuations {
    pub v_l_x: i64,
    pub v_m_x: i64,
    pub v_m_y: i64,
    pub v_m_pi: i64,
}

struct TowerData {
    params: ExtensionParams,
    ring: Arc<LaurentField>,
    p: usize,
    d: usize,
    alpha: LaurentSeries,
    alpha_s: LaurentSeries,
    polygon: NewtonPolygon,
    residue: ResidueTower,
    recorded: Option<RecordedValuations>,
}

/// An immutable tower context.
#[derive(Clone)]
pub struct Tower(Arc<TowerData>);

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pr = &self.0.params;
        write!(f, "Tower(p={}, e={}, f={}, t={}, b={})", pr.p, pr.e, pr.f, pr.t, pr.b)
    }
}

impl PartialEq for Tower {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Tower {
    pub fn build(params: ExtensionParams) -> Result<Tower> {
        let ring = params.ring().clone();
        let alpha = params.alpha();
        let alpha_s = alpha.pow(params.s() as i64)?;
        let beta = params.beta.clone();
        let p = params.p as usize;
        let d = params.d() as usize;

        let mut vals = vec![None; p + 1];
        vals[0] = Some(beta.valuation()?);
        vals[1] = Some(alpha_s.valuation()?);
        vals[p] = Some(0);
        let polygon = NewtonPolygon::from_valuations(&vals);
        let b = params.b;
        if !polygon.is_single_segment()
            || polygon.vertices != [(0, -b), (p, 0)]
            || polygon.slopes[0] != Rational::new(b, p as i64)
        {
            return Err(Error::Internal(format!(
                "Newton polygon of the defining polynomial is not a single segment of slope b/p: {:?}",
                polygon.vertices
            )));
        }

        let kappa = &params.kappa;
        let kappa_f = FieldDesc::new(kappa.p(), kappa.degree() * params.f as usize)?;
        let emb = kappa.embedding_into(&kappa_f)?;
        let mu_image = emb.map(params.mu.residue()?);
        if kappa_f.quotient_order(mu_image, params.f)? != 1 {
            return Err(Error::Internal("residue of mu is not an f-th power in kappa_f".into()));
        }

        let mut tower = Tower(Arc::new(TowerData {
            params,
            ring,
            p,
            d,
            alpha,
            alpha_s,
            polygon,
            residue: ResidueTower { kappa_f, mu_image },
            recorded: None,
        }));
        let rec = RecordedValuations {
            v_l_x: tower.x().valuation_in(Level::L)?.to_integer(),
            v_m_x: tower.x().valuation_in(Level::M)?.to_integer(),
            v_m_y: tower.y().valuation_in(Level::M)?.to_integer(),
            v_m_pi: tower.pi().valuation_in(Level::M)?.to_integer(),
        };
        let (e, pp, t) = (tower.0.params.e as i64, p as i64, tower.0.params.t);
        let expected = RecordedValuations { v_l_x: -b, v_m_x: -e * b, v_m_y: pp * t, v_m_pi: e * pp };
        if rec != expected {
            return Err(Error::Internal(format!("recorded valuations {rec:?} differ from {expected:?}")));
        }
        Arc::get_mut(&mut tower.0).expect("no elements outlive the checks").recorded = Some(rec);
        Ok(tower)
    }

    pub fn params(&self) -> &ExtensionParams {
        &self.0.params
    }
    pub fn ring(&self) -> &Arc<LaurentField> {
        &self.0.ring
    }
    pub fn p(&self) -> usize {
        self.0.p
    }
    pub fn d(&self) -> usize {
        self.0.d
    }
    pub fn alpha(&self) -> &LaurentSeries {
        &self.0.alpha
    }
    pub fn alpha_s(&self) -> &LaurentSeries {
        &self.0.alpha_s
    }
    pub fn beta(&self) -> &LaurentSeries {
        &self.0.params.beta
    }
    pub fn polygon(&self) -> &NewtonPolygon {
        &self.0.polygon
    }
    pub fn residue_tower(&self) -> &ResidueTower {
        &self.0.residue
    }
    pub fn recorded_valuations(&self) -> RecordedValuations {
        self.0.recorded.expect("valuations are recorded by build")
    }

    /// `[F : K]`.
    pub fn degree(&self, level: Level) -> usize {
        match level {
            Level::K => 1,
            Level::MPrime => self.0.d,
            Level::L => self.0.p,
            Level::M => self.0.p * self.0.d,
        }
    }

    /// `e(F / K)`.
    pub fn ram_index(&self, level: Level) -> i64 {
        let e = self.0.params.e as i64;
        match level {
            Level::K => 1,
            Level::MPrime => e,
            Level::L => self.0.p as i64,
            Level::M => e * self.0.p as i64,
        }
    }

    /// `f(F / K)`.
    pub fn inertia_degree(&self, level: Level) -> i64 {
        match level {
            Level::K | Level::L => 1,
            Level::MPrime | Level::M => self.0.params.f as i64,
        }
    }

    fn idx(&self, j: usize, i: usize) -> usize {
        j * self.0.d + i
    }

    /// Monomials `(j, i)` spanning `level` over `K`; `(0, 0)` first.
    pub fn basis(&self, level: Level) -> Vec<(usize, usize)> {
        let (p, d) = (self.0.p, self.0.d);
        match level {
            Level::K => vec![(0, 0)],
            Level::MPrime => (0..d).map(|i| (0, i)).collect(),
            Level::L => (0..p).map(|j| (j, 0)).collect(),
            Level::M => (0..p).flat_map(|j| (0..d).map(move |i| (j, i))).collect(),
        }
    }

    /// `v_M(x^j y^i) = -e b j + p t i`.
    pub fn monomial_vm(&self, j: usize, i: usize) -> i64 {
        let pr = &self.0.params;
        -(pr.e as i64) * pr.b * j as i64 + pr.p as i64 * pr.t * i as i64
    }

    /// Exponent `c` making `pi^c x^j y^i` have valuation in `[0, e(F/K))` in `F`.
    fn integral_shift(&self, level: Level, j: usize, i: usize) -> i64 {
        let e_up = self.ram_index(Level::M) / self.ram_index(level);
        let v_level = self.monomial_vm(j, i) / e_up;
        -Integer::div_floor(&v_level, &self.ram_index(level))
    }

    pub fn zero(&self) -> TowerElement {
        TowerElement { tower: self.clone(), c: vec![LaurentSeries::zero(&self.0.ring); self.0.p * self.0.d] }
    }
    pub fn one(&self) -> TowerElement {
        self.from_k(LaurentSeries::one(&self.0.ring))
    }
    pub fn from_int(&self, n: i64) -> TowerElement {
        self.from_k(LaurentSeries::from_int(&self.0.ring, n))
    }
    pub fn from_k(&self, a: LaurentSeries) -> TowerElement {
        self.monomial(0, 0, a)
    }
    /// `a x^j y^i` with `j < p`, `i < d`.
    pub fn monomial(&self, j: usize, i: usize, a: LaurentSeries) -> TowerElement {
        assert!(j < self.0.p && i < self.0.d, "monomial exponent out of range");
        let mut z = self.zero();
        z.c[self.idx(j, i)] = a.rehome(&self.0.ring);
        z
    }
    pub fn x(&self) -> TowerElement {
        self.monomial(1, 0, LaurentSeries::one(&self.0.ring))
    }
    pub fn y(&self) -> TowerElement {
        if self.0.d == 1 {
            return self.from_k(self.0.alpha.clone());
        }
        self.monomial(0, 1, LaurentSeries::one(&self.0.ring))
    }
    pub fn pi(&self) -> TowerElement {
        self.from_k(LaurentSeries::pi_pow(&self.0.ring, 1))
    }

    /// `lambda_1 = x^{a(1)} pi^{f_1}`, of `v_L` equal to 1.
    pub fn uniformizer_l(&self) -> TowerElement {
        let pr = &self.0.params;
        let a = scaffold::a_shift(1, pr.b, pr.p);
        let f1 = scaffold::f_exp(1, pr.b, pr.p);
        self.monomial(a as usize, 0, LaurentSeries::pi_pow(&self.0.ring, f1))
    }

    /// `v_L(g'(lambda_1))` for the minimal polynomial `g` of `lambda_1`.
    pub fn different_exponent_exact(&self) -> Result<i64> {
        let lam = self.uniformizer_l();
        let g = lam.min_poly()?;
        if g.len() != self.0.p + 1 {
            return Err(Error::Internal("uniformizer of L does not have degree p".into()));
        }
        let mut acc = self.zero();
        for k in (1..g.len()).rev() {
            acc = acc.mul(&lam).add(&self.from_k(g[k].mul(&LaurentSeries::from_int(&self.0.ring, k as i64))));
        }
        let v = acc.valuation_in(Level::L)?;
        if !v.is_integer() {
            return Err(Error::Internal("non-integral valuation of an element of L".into()));
        }
        Ok(v.to_integer())
    }
}

/// Run `f` on the tower of `params`, retrying once at doubled precision.
pub fn with_precision_retry<T>(params: &ExtensionParams, f: impl Fn(&Tower) -> Result<T>) -> Result<T> {
    let first = Tower::build(params.clone()).and_then(|t| f(&t));
    match first {
        Err(e) if e.is_precision() => {
            let wider = params.with_precision(params.ring().rel_cap() * 2);
            Tower::build(wider).and_then(|t| f(&t))
        }
        r => r,
    }
}

/// An element `sum c[j][i] x^j y^i` of `M`.
#[derive(Clone)]
pub struct TowerElement {
    tower: Tower,
    c: Vec<LaurentSeries>,
}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.tower.0.d;
        let mut first = true;
        for (k, s) in self.c.iter().enumerate() {
            if s.is_exact_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({s:?}) x^{} y^{}", k / d, k % d)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl TowerElement {
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn coeff(&self, j: usize, i: usize) -> &LaurentSeries {
        &self.c[self.tower.idx(j, i)]
    }

    /// Components in the order `(j, i)` lexicographic.
    pub fn components(&self) -> &[LaurentSeries] {
        &self.c
    }

    fn same(&self, o: &Self) {
        assert!(self.tower == o.tower, "elements of different towers");
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|s| s.is_zero())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.c.iter().all(|s| s.is_exact_zero())
    }

    /// Least absolute precision among the components (`None` if exact).
    pub fn min_prec(&self) -> Option<i64> {
        self.c.iter().filter_map(|s| s.prec()).min()
    }

    pub fn eq_to_precision(&self, o: &Self) -> bool {
        self.sub(o).is_zero()
    }

    /// Whether the support lies in the basis of `level`.
    pub fn lies_in(&self, level: Level) -> bool {
        let d = self.tower.0.d;
        self.c.iter().enumerate().all(|(k, s)| {
            let (j, i) = (k / d, k % d);
            let ok = match level {
                Level::K => j == 0 && i == 0,
                Level::MPrime => j == 0,
                Level::L => i == 0,
                Level::M => true,
            };
            ok || s.is_zero()
        })
    }

    /// Smallest field of the tower containing the support.
    pub fn natural_level(&self) -> Level {
        if self.lies_in(Level::K) {
            Level::K
        } else if self.lies_in(Level::MPrime) {
            Level::MPrime
        } else if self.lies_in(Level::L) {
            Level::L
        } else {
            Level::M
        }
    }

    /// The `K`-component if the element lies in `K`.
    pub fn as_k(&self) -> Result<LaurentSeries> {
        if !self.lies_in(Level::K) {
            return Err(Error::Subfield);
        }
        Ok(self.c[0].clone())
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same(o);
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a.add(b)).collect();
        TowerElement { tower: self.tower.clone(), c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same(o);
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a.sub(b)).collect();
        TowerElement { tower: self.tower.clone(), c }
    }

    pub fn neg(&self) -> Self {
        TowerElement { tower: self.tower.clone(), c: self.c.iter().map(|a| a.neg()).collect() }
    }

    /// Multiply by a scalar of `K`.
    pub fn scale_k(&self, k: &LaurentSeries) -> Self {
        let c = self.c.iter().map(|a| if a.is_exact_zero() { a.clone() } else { a.mul(k) }).collect();
        TowerElement { tower: self.tower.clone(), c }
    }

    /// Multiply by `pi^k`.
    pub fn shift(&self, k: i64) -> Self {
        TowerElement { tower: self.tower.clone(), c: self.c.iter().map(|a| a.shift(k)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.same(o);
        let tw = &self.tower.0;
        let (p, d) = (tw.p, tw.d);
        let zero = LaurentSeries::zero(&tw.ring);
        let nz = |z: &Self| -> Vec<(usize, usize, usize)> {
            z.c.iter()
                .enumerate()
                .filter(|(_, s)| !s.is_exact_zero())
                .map(|(k, _)| (k / d, k % d, k))
                .collect()
        };
        let (na, nb) = (nz(self), nz(o));
        let (wj, wi) = (2 * p - 1, 2 * d - 1);
        let mut tmp = vec![zero.clone(); wj * wi];
        for &(j1, i1, k1) in &na {
            for &(j2, i2, k2) in &nb {
                let slot = &mut tmp[(j1 + j2) * wi + i1 + i2];
                *slot = slot.add(&self.c[k1].mul(&o.c[k2]));
            }
        }
        for j in 0..wj {
            for i in (d..wi).rev() {
                let m = core::mem::replace(&mut tmp[j * wi + i], zero.clone());
                if !m.is_exact_zero() {
                    let slot = &mut tmp[j * wi + i - d];
                    *slot = slot.add(&tw.alpha.mul(&m));
                }
            }
        }
        for j in (p..wj).rev() {
            for i in 0..d {
                let m = core::mem::replace(&mut tmp[j * wi + i], zero.clone());
                if !m.is_exact_zero() {
                    let hi = &mut tmp[(j - p + 1) * wi + i];
                    *hi = hi.add(&tw.alpha_s.mul(&m));
                    let lo = &mut tmp[(j - p) * wi + i];
                    *lo = lo.add(&tw.params.beta.mul(&m));
                }
            }
        }
        let mut c = Vec::with_capacity(p * d);
        for j in 0..p {
            for i in 0..d {
                c.push(core::mem::replace(&mut tmp[j * wi + i], zero.clone()));
            }
        }
        TowerElement { tower: self.tower.clone(), c }
    }

    /// Multiply by `x`.
    pub fn mul_x(&self) -> Self {
        let tw = &self.tower.0;
        let (p, d) = (tw.p, tw.d);
        if p == 1 {
            return self.clone();
        }
        let mut c = vec![LaurentSeries::zero(&tw.ring); p * d];
        for j in 0..p - 1 {
            for i in 0..d {
                c[(j + 1) * d + i] = self.c[j * d + i].clone();
            }
        }
        for i in 0..d {
            let m = &self.c[(p - 1) * d + i];
            if !m.is_exact_zero() {
                c[d + i] = c[d + i].add(&tw.alpha_s.mul(m));
                c[i] = c[i].add(&tw.params.beta.mul(m));
            }
        }
        TowerElement { tower: self.tower.clone(), c }
    }

    /// Multiply by `y`.
    pub fn mul_y(&self) -> Self {
        let tw = &self.tower.0;
        let (p, d) = (tw.p, tw.d);
        let mut c = vec![LaurentSeries::zero(&tw.ring); p * d];
        for j in 0..p {
            for i in 0..d {
                let m = &self.c[j * d + i];
                if m.is_exact_zero() {
                    continue;
                }
                if i + 1 < d {
                    c[j * d + i + 1] = m.clone();
                } else {
                    c[j * d] = c[j * d].add(&tw.alpha.mul(m));
                }
            }
        }
        TowerElement { tower: self.tower.clone(), c }
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = self.tower.one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn pow_i64(&self, n: i64) -> Result<Self> {
        if n >= 0 {
            Ok(self.pow(n as u64))
        } else {
            Ok(self.inv()?.pow(n.unsigned_abs()))
        }
    }

    /// Coordinates on the scaled basis `pi^{c_u} x^j y^i` of `level`.
    fn coords(&self, level: Level) -> Vec<LaurentSeries> {
        let tw = &self.tower;
        tw.basis(level)
            .into_iter()
            .map(|(j, i)| self.coeff(j, i).shift(-tw.integral_shift(level, j, i)))
            .collect()
    }

    fn from_coords(tower: &Tower, level: Level, z: Vec<LaurentSeries>) -> Self {
        let mut out = tower.zero();
        for ((j, i), s) in tower.basis(level).into_iter().zip(z) {
            out.c[tower.idx(j, i)] = s.shift(tower.integral_shift(level, j, i));
        }
        out
    }

    /// Matrix of multiplication by `self` on the scaled integral basis of `level` (columns are images).
    fn mult_matrix(&self, level: Level) -> Vec<Vec<LaurentSeries>> {
        let tw = &self.tower;
        let basis = tw.basis(level);
        let n = basis.len();
        let mut images: Vec<TowerElement> = Vec::with_capacity(n);
        match level {
            Level::K => images.push(self.clone()),
            Level::MPrime => {
                let mut cur = self.clone();
                for k in 0..n {
                    if k > 0 {
                        cur = cur.mul_y();
                    }
                    images.push(cur.clone());
                }
            }
            Level::L => {
                let mut cur = self.clone();
                for k in 0..n {
                    if k > 0 {
                        cur = cur.mul_x();
                    }
                    images.push(cur.clone());
                }
            }
            Level::M => {
                let mut row = self.clone();
                for j in 0..tw.0.p {
                    if j > 0 {
                        row = row.mul_x();
                    }
                    let mut cur = row.clone();
                    for i in 0..tw.0.d {
                        if i > 0 {
                            cur = cur.mul_y();
                        }
                        images.push(cur.clone());
                    }
                }
            }
        }
        let cols: Vec<Vec<LaurentSeries>> = images
            .iter()
            .zip(&basis)
            .map(|(img, &(j, i))| {
                let cv = tw.integral_shift(level, j, i);
                img.coords(level).into_iter().map(|s| s.shift(cv)).collect()
            })
            .collect();
        (0..n).map(|u| (0..n).map(|v| cols[v][u].clone()).collect()).collect()
    }

    /// `N_{F/K}` for `F = level` containing `self`.
    pub fn norm_to_k(&self, level: Level) -> Result<LaurentSeries> {
        if !self.lies_in(level) {
            return Err(Error::Subfield);
        }
        if level == Level::K {
            return Ok(self.c[0].clone());
        }
        linalg::det(self.mult_matrix(level))
    }

    /// `Tr_{F/K}` for `F = level` containing `self`.
    pub fn trace_to_k(&self, level: Level) -> Result<LaurentSeries> {
        if !self.lies_in(level) {
            return Err(Error::Subfield);
        }
        let m = self.mult_matrix(level);
        let mut acc = LaurentSeries::zero(&self.tower.0.ring);
        for (k, row) in m.iter().enumerate() {
            acc = acc.add(&row[k]);
        }
        Ok(acc)
    }

    /// `v_M(self)` as an integer.
    pub fn v_m(&self) -> Result<i64> {
        Ok(self.valuation_in(Level::M)?.to_integer())
    }

    /// Valuation normalized on `level`; the element must lie in `level`.
    pub fn valuation_in(&self, level: Level) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::Precision { bound: self.min_prec().unwrap_or(i64::MAX) });
        }
        if !self.lies_in(level) {
            return Err(Error::Subfield);
        }
        let tw = &self.tower;
        let nat = self.natural_level();
        let v_nat = if nat == Level::K {
            self.c[0].valuation()?
        } else {
            let n = self.norm_to_k(nat)?;
            let vk = n.valuation()?;
            let f = tw.inertia_degree(nat);
            if vk % f != 0 {
                return Err(Error::Internal(format!("norm valuation {vk} not divisible by f = {f}")));
            }
            vk / f
        };
        let e_m = tw.ram_index(Level::M);
        let v_m = v_nat * (e_m / tw.ram_index(nat));
        Ok(Rational::new(v_m, e_m / tw.ram_index(level)))
    }

    /// Inverse in the smallest field of the tower containing `self`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("inverse of zero"));
        }
        let tw = &self.tower;
        let level = self.natural_level();
        if level == Level::K {
            return Ok(tw.from_k(self.c[0].inv()?));
        }
        let a = self.mult_matrix(level);
        let n = a.len();
        let mut rhs = vec![LaurentSeries::zero(&tw.0.ring); n];
        rhs[0] = LaurentSeries::one(&tw.0.ring);
        let z = linalg::solve(a, rhs)?;
        Ok(Self::from_coords(tw, level, z))
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self.mul(&o.inv()?))
    }

    /// Monic minimal polynomial over `K`, coefficients from `X^0` upward.
    pub fn min_poly(&self) -> Result<Vec<LaurentSeries>> {
        let tw = &self.tower;
        let ring = &tw.0.ring;
        if self.is_zero() {
            return Ok(vec![LaurentSeries::zero(ring), LaurentSeries::one(ring)]);
        }
        let level = self.natural_level();
        let n = tw.degree(level);
        if level == Level::K {
            return Ok(vec![self.c[0].neg(), LaurentSeries::one(ring)]);
        }
        let mut powers = vec![tw.one()];
        for k in (1..=n).filter(|k| n.is_multiple_of(*k)) {
            while powers.len() <= k {
                let next = powers.last().unwrap().mul(self);
                powers.push(next);
            }
            let cols: Vec<Vec<LaurentSeries>> = powers[..k].iter().map(|z| z.coords(level)).collect();
            let a: Vec<Vec<LaurentSeries>> = (0..n).map(|u| (0..k).map(|i| cols[i][u].clone()).collect()).collect();
            let rhs = powers[k].coords(level);
            if let Some(c) = linalg::solve_consistent(a, rhs)? {
                let mut poly: Vec<LaurentSeries> = c.iter().map(|z| z.neg()).collect();
                poly.push(LaurentSeries::one(ring));
                let mut acc = tw.zero();
                for coef in poly.iter().rev() {
                    acc = acc.mul(self).add(&tw.from_k(coef.clone()));
                }
                if !acc.is_zero() {
                    return Err(Error::Internal("minimal polynomial does not annihilate".into()));
                }
                return Ok(poly);
            }
        }
        Err(Error::Internal("no annihilating polynomial of degree dividing [F:K]".into()))
    }

    /// The `M'`-coefficient of `x^j`, as an element of `M'`.
    pub fn x_coefficient(&self, j: usize) -> Self {
        let tw = &self.tower;
        let mut z = tw.zero();
        for i in 0..tw.0.d {
            z.c[tw.idx(0, i)] = self.coeff(j, i).clone();
        }
        z
    }

    /// The `L`-coefficient of `y^i`, as an element of `L`.
    pub fn y_coefficient(&self, i: usize) -> Self {
        let tw = &self.tower;
        let mut z = tw.zero();
        for j in 0..tw.0.p {
            z.c[tw.idx(j, 0)] = self.coeff(j, i).clone();
        }
        z
    }

    fn relative_matrix(&self, sub: Sub) -> Vec<Vec<TowerElement>> {
        let tw = &self.tower;
        match sub {
            Sub::MOverMPrime => {
                let mut cols = Vec::new();
                let mut cur = self.clone();
                for v in 0..tw.0.p {
                    if v > 0 {
                        cur = cur.mul_x();
                    }
                    cols.push((0..tw.0.p).map(|u| cur.x_coefficient(u)).collect::<Vec<_>>());
                }
                (0..tw.0.p).map(|u| (0..tw.0.p).map(|v| cols[v][u].clone()).collect()).collect()
            }
            Sub::MOverL => {
                let mut cols = Vec::new();
                let mut cur = self.clone();
                for v in 0..tw.0.d {
                    if v > 0 {
                        cur = cur.mul_y();
                    }
                    cols.push((0..tw.0.d).map(|u| cur.y_coefficient(u)).collect::<Vec<_>>());
                }
                (0..tw.0.d).map(|u| (0..tw.0.d).map(|v| cols[v][u].clone()).collect()).collect()
            }
            _ => unreachable!(),
        }
    }

    /// Norm down the chosen relative extension, as an element of the base.
    pub fn norm(&self, sub: Sub) -> Result<Self> {
        let tw = &self.tower;
        match sub {
            Sub::LOverK => Ok(tw.from_k(self.norm_to_k(Level::L)?)),
            Sub::MOverK => Ok(tw.from_k(self.norm_to_k(Level::M)?)),
            Sub::MOverMPrime | Sub::MOverL => linalg::det(self.relative_matrix(sub)),
        }
    }

    /// Trace down the chosen relative extension, as an element of the base.
    pub fn trace(&self, sub: Sub) -> Result<Self> {
        let tw = &self.tower;
        match sub {
            Sub::LOverK => Ok(tw.from_k(self.trace_to_k(Level::L)?)),
            Sub::MOverK => Ok(tw.from_k(self.trace_to_k(Level::M)?)),
            Sub::MOverMPrime | Sub::MOverL => {
                let m = self.relative_matrix(sub);
                let mut acc = tw.zero();
                for (k, row) in m.iter().enumerate() {
                    acc = acc.add(&row[k]);
                }
                Ok(acc)
            }
        }
    }
}

impl Scalar for TowerElement {
    fn zero_like(&self) -> Self {
        self.tower.zero()
    }
    fn one_like(&self) -> Self {
        self.tower.one()
    }
    fn sub(&self, o: &Self) -> Self {
        TowerElement::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        TowerElement::mul(self, o)
    }
    fn neg(&self) -> Self {
        TowerElement::neg(self)
    }
    fn inv(&self) -> Result<Self> {
        TowerElement::inv(self)
    }
    fn is_zero(&self) -> bool {
        TowerElement::is_zero(self)
    }
    fn is_exact_zero(&self) -> bool {
        TowerElement::is_exact_zero(self)
    }
    fn val(&self) -> Result<i64> {
        self.v_m()
    }
    fn precision_error(&self) -> Error {
        Error::Precision { bound: self.min_prec().unwrap_or(i64::MAX) }
    }
}

/// Recover `(e, f, t, b, gamma, mu)` from `alpha`, `beta` and `d`.
///
/// `f = gcd(v_K(alpha), d)` is forced by `gcd(t, e) = 1`; `mu` is taken
/// constant and `gamma` a principal unit.
pub fn classify(alpha: &LaurentSeries, beta: &LaurentSeries, d: u64) -> Result<ExtensionParams> {
    let kappa = alpha.field().clone();
    let p = kappa.p();
    if d == 0 || !(p - 1).is_multiple_of(d) {
        return Err(ParamClause::DegreeDivides { d, p }.into());
    }
    let v = alpha
        .valuation_opt()
        .ok_or_else(|| Error::Param(ParamClause::Other("alpha is zero to known precision".into())))?;
    if v < 0 || v as u64 >= d {
        return Err(ParamClause::Other(format!("v_K(alpha) = {v} must lie in [0, d) = [0, {d})")).into());
    }
    let f = (v as u64).gcd(&d);
    let e = d / f;
    let t = v / f as i64;
    let unit = alpha.shift(-v);
    let ubar = unit.residue()?;
    let ring = alpha.ring();
    let mu = LaurentSeries::constant(ring, ubar);
    let principal = unit.mul(&LaurentSeries::constant(ring, kappa.inv(ubar)?));
    let gamma = principal.tame_root(f)?;
    let b = -beta
        .valuation_opt()
        .ok_or_else(|| Error::Param(ParamClause::Other("beta is zero to known precision".into())))?;
    ExtensionParams::new(p, kappa, e, f, t, b, gamma, mu, beta.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(p: u64) -> Arc<LaurentField> {
        LaurentField::new(FieldDesc::prime(p).unwrap(), 40)
    }

    fn params(p: u64, e: u64, f: u64, t: i64, b: i64) -> ExtensionParams {
        let k = ring(p);
        let kappa = k.field().clone();
        let g = kappa.from_int(crate::ffield::primitive_root(p).unwrap() as i64);
        let gamma = LaurentSeries::from_coeffs(&k, 0, vec![kappa.one(), kappa.from_int(2)], None);
        let mu = LaurentSeries::from_coeffs(&k, 0, vec![g, kappa.one()], None);
        let beta = LaurentSeries::from_coeffs(&k, -b, vec![kappa.one(), kappa.from_int(2), kappa.one()], None);
        ExtensionParams::new(p, kappa, e, f, t, b, gamma, mu, beta).unwrap()
    }

    #[test]
    fn polygon_hull() {
        let np = NewtonPolygon::from_valuations(&[Some(-3), Some(1), None, None, None, Some(0)]);
        assert_eq!(np.vertices, vec![(0, -3), (5, 0)]);
        assert_eq!(np.slopes, vec![Rational::new(3, 5)]);
        let np2 = NewtonPolygon::from_valuations(&[Some(0), Some(-2), Some(0)]);
        assert_eq!(np2.slopes, vec![Rational::from(-2), Rational::from(2)]);
    }

    #[test]
    fn relations_and_products() {
        let tw = Tower::build(params(5, 2, 2, 1, 3)).unwrap();
        let (x, y) = (tw.x(), tw.y());
        let xy = x.mul(&y);
        assert!(xy.coeff(1, 1).eq_to_precision(&LaurentSeries::one(tw.ring())));
        assert!(y.pow(4).eq_to_precision(&tw.from_k(tw.alpha().clone())));
        let rhs = x.scale_k(tw.alpha_s()).add(&tw.from_k(tw.beta().clone()));
        assert!(x.pow(5).eq_to_precision(&rhs));
    }

    #[test]
    fn build_examples() {
        let k = ring(3);
        let kappa = k.field().clone();
        let one = LaurentSeries::one(&k);
        let beta = LaurentSeries::pi_pow(&k, -1);
        let p1 = ExtensionParams::new(3, kappa.clone(), 1, 1, 0, 1, one.clone(), one.clone(), beta.clone()).unwrap();
        let t1 = Tower::build(p1).unwrap();
        assert_eq!(t1.d(), 1);
        assert!(t1.alpha().eq_to_precision(&one));
        let p2 = ExtensionParams::new(3, kappa, 2, 1, 1, 1, one.clone(), one, beta).unwrap();
        let t2 = Tower::build(p2).unwrap();
        let rv = t2.recorded_valuations();
        assert_eq!((rv.v_m_x, rv.v_m_y), (-2, 3));
        assert!(t2.alpha().eq_to_precision(&LaurentSeries::pi_pow(t2.ring(), 1)));
        let t3 = Tower::build(params(5, 2, 2, 1, 3)).unwrap();
        assert_eq!(t3.params().s(), 1);
        assert_eq!(t3.residue_tower().kappa_f.order(), 25);
    }

    #[test]
    fn parameter_errors_name_the_clause() {
        let k = ring(5);
        let kappa = k.field().clone();
        let one = LaurentSeries::one(&k);
        let beta = LaurentSeries::pi_pow(&k, -3);
        let bad_t = ExtensionParams::new(5, kappa.clone(), 2, 1, 2, 3, one.clone(), one.clone(), beta.clone());
        assert_eq!(bad_t.unwrap_err(), Error::Param(ParamClause::TRange { t: 2, e: 2 }));
        let bad_mu = ExtensionParams::new(5, kappa.clone(), 1, 2, 0, 3, one.clone(), one.clone(), beta.clone());
        assert_eq!(bad_mu.unwrap_err(), Error::Param(ParamClause::MuOrder { order: 1, f: 2 }));
        let bad_b = ExtensionParams::new(5, kappa, 1, 1, 0, 5, one.clone(), one, beta);
        assert_eq!(bad_b.unwrap_err(), Error::Param(ParamClause::BCoprime { b: 5, p: 5 }));
    }

    #[test]
    fn valuations_at_levels() {
        let tw = Tower::build(params(5, 2, 2, 1, 3)).unwrap();
        assert_eq!(tw.x().valuation_in(Level::L).unwrap(), Rational::from(-3));
        assert_eq!(tw.y().valuation_in(Level::M).unwrap(), Rational::from(5));
        assert_eq!(tw.pi().valuation_in(Level::M).unwrap(), Rational::from(10));
        assert_eq!(tw.y().valuation_in(Level::MPrime).unwrap(), Rational::from(1));
        assert_eq!(tw.x().valuation_in(Level::K).unwrap_err(), Error::Subfield);
        let z = tw.x().add(&tw.y());
        assert_eq!(z.v_m().unwrap(), -6);
    }

    #[test]
    fn norms_and_min_polys() {
        let tw = Tower::build(params(5, 2, 2, 1, 3)).unwrap();
        let n = tw.x().norm(Sub::MOverMPrime).unwrap();
        assert!(n.eq_to_precision(&tw.from_k(tw.beta().clone())));
        assert!(tw.one().norm(Sub::LOverK).unwrap().eq_to_precision(&tw.one()));
        let g = tw.x().min_poly().unwrap();
        assert_eq!(g.len(), 6);
        assert!(g[0].eq_to_precision(&tw.beta().neg()));
        assert!(g[1].eq_to_precision(&tw.alpha_s().neg()));
        for c in &g[2..5] {
            assert!(c.is_zero());
        }
        let h = tw.y().min_poly().unwrap();
        assert_eq!(h.len(), 5);
        assert!(h[0].eq_to_precision(&tw.alpha().neg()));
        let pi = tw.pi().min_poly().unwrap();
        assert_eq!(pi.len(), 2);
        assert_eq!(tw.zero().min_poly().unwrap().len(), 2);
    }

    #[test]
    fn inverse_round_trip() {
        let tw = Tower::build(params(3, 2, 1, 1, 1)).unwrap();
        let z = tw.x().add(&tw.y().mul(&tw.x()).shift(1)).add(&tw.one());
        let w = z.inv().unwrap();
        assert!(z.mul(&w).eq_to_precision(&tw.one()));
    }

    #[test]
    fn uniformizers_and_different() {
        let tw = Tower::build(params(5, 2, 2, 1, 3)).unwrap();
        let lam = tw.uniformizer_l();
        assert!(lam.coeff(3, 0).eq_to_precision(&LaurentSeries::pi_pow(tw.ring(), 2)));
        assert_eq!(lam.valuation_in(Level::L).unwrap(), Rational::from(1));
        let cases = [((3, 2, 1, 1, 1), 7), ((3, 1, 1, 0, 1), 4), ((5, 4, 1, 1, 3), 21)];
        for ((p, e, f, t, b), want) in cases {
            let tw = Tower::build(params(p, e, f, t, b)).unwrap();
            assert_eq!(tw.different_exponent_exact().unwrap(), want);
        }
    }

    #[test]
    fn classify_inverts_build() {
        let pr = params(7, 3, 2, 2, 4);
        let got = classify(&pr.alpha(), pr.beta(), 6).unwrap();
        assert_eq!((got.e(), got.f(), got.t(), got.b()), (3, 2, 2, 4));
        assert!(got.alpha().eq_to_precision(&pr.alpha()));
    }
}
