//! Scaffold data for `L / K`: the shift `a(t)`, the exponents `f_t` and the
//! elements `lambda_t = x^{a(t)} pi^{f_t}` of valuation `t`.

use alloc::vec::Vec;

use crate::error::Result;
use crate::ffield::inv_mod;
use crate::hopf::HopfPresentation;
use crate::ramprofile::{CharK, RamParams};
use crate::series::LaurentSeries;
use crate::tower::{Tower, TowerElement};

/// `a(t) ≡ -t b^{-1} mod p` in `[0, p)`.
pub fn a_shift(t: i64, b: i64, p: u64) -> u64 {
    let binv = inv_mod(b, p) as i64;
    (-(t.rem_euclid(p as i64)) * binv).rem_euclid(p as i64) as u64
}

/// `f_t = (t + a(t) b) / p`.
pub fn f_exp(t: i64, b: i64, p: u64) -> i64 {
    let a = a_shift(t, b, p) as i64;
    (t + a * b).div_euclid(p as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tolerance {
    Infinite,
    Finite(i64),
}

/// `infinity` in characteristic `p`, `v_L(p) - (p-1) ell` in characteristic 0.
pub fn tolerance(rp: &RamParams) -> Result<Tolerance> {
    rp.validate()?;
    match rp.charac {
        CharK::P => Ok(Tolerance::Infinite),
        CharK::Zero { vk_p } => {
            let v = rp.p as i64 * vk_p;
            let t = crate::Rational::from(v) - rp.ell() * crate::Rational::from(rp.p as i64 - 1);
            debug_assert!(t.is_integer());
            Ok(Tolerance::Finite(t.to_integer()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaffoldData {
    pub p: u64,
    pub b: i64,
    /// `a(t)` for `t = 0..p-1`.
    pub a_table: Vec<u64>,
    /// `(t, f_t)` over the window.
    pub f_table: Vec<(i64, i64)>,
    pub window: (i64, i64),
    pub tolerance: Tolerance,
    /// `b(s) = s b` for `s = 0..p-1`.
    pub bfun: Vec<i64>,
}

impl ScaffoldData {
    /// Characteristic `p` scaffold over `t` in `[lo, hi)`.
    pub fn new(p: u64, b: i64, window: (i64, i64)) -> Self {
        let a_table = (0..p as i64).map(|t| a_shift(t, b, p)).collect();
        let f_table = (window.0..window.1).map(|t| (t, f_exp(t, b, p))).collect();
        let bfun = (0..p as i64).map(|s| s * b).collect();
        ScaffoldData { p, b, a_table, f_table, window, tolerance: Tolerance::Infinite, bfun }
    }

    /// Default window `[-p^2, 3p^2)`.
    pub fn default_window(p: u64) -> (i64, i64) {
        let q = (p * p) as i64;
        (-q, 3 * q)
    }

    pub fn a(&self, t: i64) -> u64 {
        self.a_table[t.rem_euclid(self.p as i64) as usize]
    }

    pub fn f(&self, t: i64) -> i64 {
        f_exp(t, self.b, self.p)
    }

    /// Check the tabulated identities `t = -a(t) b + f_t p` and `b(a(t)) ≡ -t`.
    pub fn consistent(&self) -> bool {
        let p = self.p as i64;
        self.f_table.iter().all(|&(t, f)| {
            let a = self.a(t) as i64;
            t == -a * self.b + f * p && (self.bfun[a as usize] + t).rem_euclid(p) == 0
        })
    }
}

pub fn build_scaffold(tw: &Tower) -> ScaffoldData {
    let pr = tw.params();
    ScaffoldData::new(pr.p(), pr.b(), ScaffoldData::default_window(pr.p()))
}

/// `lambda_t = x^{a(t)} pi^{f_t}`.
pub fn lambda(tw: &Tower, t: i64) -> TowerElement {
    let pr = tw.params();
    let a = a_shift(t, pr.b(), pr.p());
    let f = f_exp(t, pr.b(), pr.p());
    tw.monomial(a as usize, 0, LaurentSeries::pi_pow(tw.ring(), f))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScaffoldCheck {
    pub t: i64,
    pub a: u64,
    pub pass: bool,
}

/// `Psi lambda_t = a(t) lambda_{t+b}` (zero when `a(t) = 0`) for `t` in `[lo, hi)`.
pub fn verify_scaffold(h: &HopfPresentation, lo: i64, hi: i64) -> Result<Vec<ScaffoldCheck>> {
    let tw = h.tower();
    let pr = tw.params();
    let mut out = Vec::new();
    for t in lo..hi {
        let a = a_shift(t, pr.b(), pr.p());
        let got = h.act(h.psi(), &lambda(tw, t))?;
        let want = if a == 0 {
            tw.zero()
        } else {
            lambda(tw, t + pr.b()).scale_k(&LaurentSeries::from_int(tw.ring(), a as i64))
        };
        out.push(ScaffoldCheck { t, a, pass: got.eq_to_precision(&want) });
    }
    Ok(out)
}
