//! Parameter-level ramification data, valid in either characteristic:
//! `ell`, `b'`, the different exponent and Hasse-Herbrand functions.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{ParamClause, Result};
use crate::tower::{check_numeric, ExtensionParams};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CharK {
    /// Characteristic `p`: no upper bound on `ell`.
    P,
    /// Characteristic 0 with `v_K(p) = vk_p`.
    Zero { vk_p: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RamParams {
    pub p: u64,
    pub e: u64,
    pub f: u64,
    pub t: i64,
    pub b: i64,
    pub charac: CharK,
}

impl From<&ExtensionParams> for RamParams {
    fn from(pr: &ExtensionParams) -> Self {
        RamParams { p: pr.p(), e: pr.e(), f: pr.f(), t: pr.t(), b: pr.b(), charac: CharK::P }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Convention {
    Serre,
    Artin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ext {
    LOverK,
    MOverK,
    MOverMPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    SerreToArtin,
    ArtinToSerre,
}

pub fn convert_convention(value: Rational, dir: Direction) -> Rational {
    match dir {
        Direction::SerreToArtin => value + 1,
        Direction::ArtinToSerre => value - 1,
    }
}

/// Piecewise linear function given by its vertices and the slope after the last one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HerbrandFunction {
    pub vertices: Vec<(Rational, Rational)>,
    pub terminal_slope: Rational,
}

impl HerbrandFunction {
    fn from_vertices(mut vertices: Vec<(Rational, Rational)>, terminal_slope: Rational) -> Self {
        // merge interior vertices where the slope does not change
        let mut k = 1;
        while k + 1 < vertices.len() {
            let (a, b, c) = (vertices[k - 1], vertices[k], vertices[k + 1]);
            if (b.1 - a.1) * (c.0 - b.0) == (c.1 - b.1) * (b.0 - a.0) {
                vertices.remove(k);
            } else {
                k += 1;
            }
        }
        if vertices.len() >= 2 {
            let n = vertices.len();
            let (a, b) = (vertices[n - 2], vertices[n - 1]);
            if n > 2 && (b.1 - a.1) == terminal_slope * (b.0 - a.0) {
                vertices.pop();
            }
        }
        HerbrandFunction { vertices, terminal_slope }
    }

    /// Slopes of the segments, then the terminal slope.
    pub fn slopes(&self) -> Vec<Rational> {
        let mut s: Vec<Rational> = self.vertices.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
        s.push(self.terminal_slope);
        s
    }

    pub fn shifted(&self, by: Rational) -> Self {
        HerbrandFunction {
            vertices: self.vertices.iter().map(|&(x, y)| (x + by, y + by)).collect(),
            terminal_slope: self.terminal_slope,
        }
    }

    /// Value at `x`, or `None` left of the first vertex.
    pub fn eval(&self, x: Rational) -> Option<Rational> {
        let first = *self.vertices.first()?;
        if x < first.0 {
            return None;
        }
        for w in self.vertices.windows(2) {
            if x <= w[1].0 {
                let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                return Some(w[0].1 + slope * (x - w[0].0));
            }
        }
        let last = *self.vertices.last()?;
        Some(last.1 + self.terminal_slope * (x - last.0))
    }

    /// The `x` with `eval(x) = y`.
    pub fn inverse(&self, y: Rational) -> Option<Rational> {
        let first = *self.vertices.first()?;
        if y < first.1 {
            return None;
        }
        for w in self.vertices.windows(2) {
            if y <= w[1].1 {
                let slope = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
                return Some(w[0].0 + (y - w[0].1) / slope);
            }
        }
        let last = *self.vertices.last()?;
        Some(last.0 + (y - last.1) / self.terminal_slope)
    }

    /// Increasing with strictly decreasing slopes.
    pub fn is_concave_increasing(&self) -> bool {
        let s = self.slopes();
        s.iter().all(|&v| v > Rational::from(0)) && s.windows(2).all(|w| w[1] < w[0])
    }
}

impl RamParams {
    pub fn validate(&self) -> Result<()> {
        check_numeric(self.p, self.e, self.f, self.t, self.b)?;
        if let CharK::Zero { vk_p } = self.charac {
            if vk_p < 1 {
                return Err(ParamClause::Other("v_K(p) must be a positive integer".into()).into());
            }
            let bound = Rational::new(self.p as i64 * vk_p, self.p as i64 - 1);
            if self.ell() >= bound {
                return Err(ParamClause::CharZeroBound.into());
            }
        }
        Ok(())
    }

    /// `ell = b + p t / e`.
    pub fn ell(&self) -> Rational {
        Rational::new(self.b * self.e as i64 + self.p as i64 * self.t, self.e as i64)
    }

    pub fn ram_number(&self) -> Rational {
        self.ell()
    }

    /// `b' = e b + p t`.
    pub fn b_prime(&self) -> i64 {
        self.e as i64 * self.b + self.p as i64 * self.t
    }

    /// `(b+1)(p-1) + p t (p-1)/e`.
    pub fn diff_exp(&self) -> i64 {
        let p = self.p as i64;
        (self.b + 1) * (p - 1) + p * self.t * (p - 1) / self.e as i64
    }

    /// `ell < v_L(p)/(p-1) - 2`; always true in characteristic `p`.
    pub fn scaffold_condition(&self) -> bool {
        match self.charac {
            CharK::P => true,
            CharK::Zero { vk_p } => {
                self.ell() < Rational::new(self.p as i64 * vk_p, self.p as i64 - 1) - Rational::from(2)
            }
        }
    }

    pub fn herbrand(&self, ext: Ext, conv: Convention) -> HerbrandFunction {
        let r = Rational::from;
        let p = self.p as i64;
        let e = self.e as i64;
        let ell = self.ell();
        let bp = r(self.b_prime());
        let serre = match ext {
            Ext::MOverK => HerbrandFunction::from_vertices(
                vec![(r(-1), r(-1)), (r(0), r(0)), (bp, ell)],
                Rational::new(1, e * p),
            ),
            Ext::LOverK => HerbrandFunction::from_vertices(vec![(r(-1), r(-1)), (ell, ell)], Rational::new(1, p)),
            Ext::MOverMPrime => HerbrandFunction::from_vertices(vec![(r(-1), r(-1)), (bp, bp)], Rational::new(1, p)),
        };
        match conv {
            Convention::Serre => serre,
            Convention::Artin => serre.shifted(r(1)),
        }
    }

    pub fn profile(&self, conv: Convention) -> Result<RamProfile> {
        self.validate()?;
        let herbrand = [Ext::LOverK, Ext::MOverK, Ext::MOverMPrime]
            .into_iter()
            .map(|x| (x, self.herbrand(x, conv)))
            .collect();
        let ell = match conv {
            Convention::Serre => self.ell(),
            Convention::Artin => convert_convention(self.ell(), Direction::SerreToArtin),
        };
        Ok(RamProfile { ell, b_prime: self.b_prime(), diff_exp: self.diff_exp(), herbrand, convention: conv })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamProfile {
    /// The ramification number of `L/K` in the chosen convention.
    pub ell: Rational,
    pub b_prime: i64,
    pub diff_exp: i64,
    pub herbrand: Vec<(Ext, HerbrandFunction)>,
    pub convention: Convention,
}
