//! JSON forms of fields, series, rationals and run configurations.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use typext_core::ramprofile::{CharK, RamParams};
use typext_core::tower::{default_precision, ExtensionParams, TowerElement};
use typext_core::{Error, FFElem, FieldDesc, LaurentField, LaurentSeries, ParamClause, Rational, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldJson {
    pub p: u64,
    pub m: usize,
    /// `[c0, .., cm]`, monic.
    pub modulus: Vec<u64>,
}

impl FieldJson {
    pub fn from_field(k: &FieldDesc) -> Self {
        FieldJson { p: k.p(), m: k.degree(), modulus: k.modulus().to_vec() }
    }

    pub fn to_field(&self) -> Result<FieldDesc> {
        if self.modulus.len() != self.m + 1 {
            return Err(ParamClause::Other(format!(
                "modulus has {} coefficients, expected m + 1 = {}",
                self.modulus.len(),
                self.m + 1
            ))
            .into());
        }
        FieldDesc::with_modulus(self.p, &self.modulus)
    }
}

pub fn elem_to_json(k: &FieldDesc, a: FFElem) -> Vec<u64> {
    k.coeffs(a)
}

pub fn elem_from_json(k: &FieldDesc, c: &[u64]) -> Result<FFElem> {
    if c.len() > k.degree() {
        return Err(ParamClause::Other(format!("field element {c:?} has more than m = {} coefficients", k.degree())).into());
    }
    k.from_coeffs(c)
}

/// `{v, prec, coeffs}`: `sum_k coeffs[k] pi^{v+k} + O(pi^prec)`, `prec = null` for exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub v: i64,
    #[serde(default)]
    pub prec: Option<i64>,
    pub coeffs: Vec<Vec<u64>>,
}

impl SeriesJson {
    pub fn from_series(s: &LaurentSeries) -> Self {
        let k = s.field();
        SeriesJson {
            v: s.offset(),
            prec: s.prec(),
            coeffs: s.coeffs().iter().map(|&c| elem_to_json(k, c)).collect(),
        }
    }

    pub fn to_series(&self, ring: &Arc<LaurentField>) -> Result<LaurentSeries> {
        let k = ring.field();
        let coeffs = self.coeffs.iter().map(|c| elem_from_json(k, c)).collect::<Result<Vec<_>>>()?;
        Ok(LaurentSeries::from_coeffs(ring, self.v, coeffs, self.prec))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatJson {
    pub num: i64,
    pub den: i64,
}

impl From<Rational> for RatJson {
    fn from(r: Rational) -> Self {
        RatJson { num: *r.numer(), den: *r.denom() }
    }
}

/// Nonzero entries `c[j][i]` of `sum c[j][i] x^j y^i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TermJson {
    pub j: usize,
    pub i: usize,
    pub c: SeriesJson,
}

pub fn element_to_json(z: &TowerElement) -> Vec<TermJson> {
    let tw = z.tower();
    let mut out = Vec::new();
    for j in 0..tw.p() {
        for i in 0..tw.d() {
            let c = z.coeff(j, i);
            if !c.is_exact_zero() {
                out.push(TermJson { j, i, c: SeriesJson::from_series(c) });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CharJson {
    #[serde(rename = "p")]
    P,
    #[serde(rename = "0")]
    Zero,
}

/// Extension datum. `kappa`, `gamma`, `mu`, `beta` default to `F_p`, `1`,
/// the least generator of `kappa^x` and `pi^{-b}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<FieldJson>,
    pub e: u64,
    pub f: u64,
    pub t: i64,
    pub b: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<SeriesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<SeriesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<SeriesJson>,
    #[serde(rename = "char", default, skip_serializing_if = "Option::is_none")]
    pub charac: Option<CharJson>,
    #[serde(rename = "vK_p", default, skip_serializing_if = "Option::is_none")]
    pub vk_p: Option<i64>,
}

impl Config {
    pub fn numeric(p: u64, e: u64, f: u64, t: i64, b: i64) -> Self {
        Config { p, kappa: None, e, f, t, b, gamma: None, mu: None, beta: None, charac: None, vk_p: None }
    }

    pub fn ram_params(&self) -> Result<RamParams> {
        let charac = match (self.charac.unwrap_or(CharJson::P), self.vk_p) {
            (CharJson::P, None) => CharK::P,
            (CharJson::P, Some(_)) => {
                return Err(ParamClause::Other("vK_p is only meaningful in characteristic 0".into()).into())
            }
            (CharJson::Zero, Some(vk_p)) => CharK::Zero { vk_p },
            (CharJson::Zero, None) => {
                return Err(ParamClause::Other("characteristic 0 requires vK_p".into()).into())
            }
        };
        let rp = RamParams { p: self.p, e: self.e, f: self.f, t: self.t, b: self.b, charac };
        rp.validate()?;
        Ok(rp)
    }

    pub fn field(&self) -> Result<FieldDesc> {
        match &self.kappa {
            Some(k) => k.to_field(),
            None => FieldDesc::prime(self.p),
        }
    }

    /// The characteristic-`p` datum over `K` with relative precision `precision`
    /// (or the default budget).
    pub fn extension_params(&self, precision: Option<usize>) -> Result<ExtensionParams> {
        if self.charac == Some(CharJson::Zero) {
            return Err(Error::Domain("tower arithmetic is available in characteristic p only"));
        }
        self.ram_params()?;
        let kappa = self.field()?;
        let rel = precision.unwrap_or_else(|| default_precision(self.p, self.e, self.f, self.t, self.b));
        let ring = LaurentField::new(kappa.clone(), rel);
        let gamma = match &self.gamma {
            Some(s) => s.to_series(&ring)?,
            None => LaurentSeries::one(&ring),
        };
        let mu = match &self.mu {
            Some(s) => s.to_series(&ring)?,
            None => LaurentSeries::constant(&ring, kappa.generator()),
        };
        let beta = match &self.beta {
            Some(s) => s.to_series(&ring)?,
            None => LaurentSeries::pi_pow(&ring, -self.b),
        };
        ExtensionParams::new(self.p, kappa, self.e, self.f, self.t, self.b, gamma, mu, beta)
    }

    /// Full form with every default filled in.
    pub fn canonical(params: &ExtensionParams) -> Self {
        Config {
            p: params.p(),
            kappa: Some(FieldJson::from_field(params.kappa())),
            e: params.e(),
            f: params.f(),
            t: params.t(),
            b: params.b(),
            gamma: Some(SeriesJson::from_series(params.gamma())),
            mu: Some(SeriesJson::from_series(params.mu())),
            beta: Some(SeriesJson::from_series(params.beta())),
            charac: None,
            vk_p: None,
        }
    }
}

/// Input of `classify`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifyInput {
    pub p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<FieldJson>,
    pub alpha: SeriesJson,
    pub beta: SeriesJson,
    pub d: u64,
}

impl ClassifyInput {
    pub fn run(&self, precision: Option<usize>) -> Result<ExtensionParams> {
        let kappa = match &self.kappa {
            Some(k) => k.to_field()?,
            None => FieldDesc::prime(self.p)?,
        };
        if kappa.p() != self.p {
            return Err(ParamClause::Characteristic { kappa: kappa.p(), p: self.p }.into());
        }
        let ring = LaurentField::new(kappa, precision.unwrap_or(24 + 4 * self.p as usize));
        let alpha = self.alpha.to_series(&ring)?;
        let beta = self.beta.to_series(&ring)?;
        typext_core::tower::classify(&alpha, &beta, self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let k = FieldDesc::new(5, 2).unwrap();
        let j = FieldJson::from_field(&k);
        assert_eq!(j.modulus.len(), 3);
        assert_eq!(j.to_field().unwrap(), k);
        let bad = FieldJson { p: 5, m: 2, modulus: vec![1, 0, 1] };
        assert!(bad.to_field().is_err());
    }

    #[test]
    fn series_round_trip() {
        let k = FieldDesc::new(3, 2).unwrap();
        let ring = LaurentField::new(k.clone(), 20);
        let g = k.generator();
        let s = LaurentSeries::from_coeffs(&ring, -2, vec![g, k.zero(), k.one()], Some(5));
        let j = SeriesJson::from_series(&s);
        assert_eq!(j.v, -2);
        assert_eq!(j.prec, Some(5));
        assert!(j.to_series(&ring).unwrap().eq_to_precision(&s));
        let text = serde_json::to_string(&j).unwrap();
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
        let exact: SeriesJson = serde_json::from_str(r#"{"v":0,"coeffs":[[1,0]]}"#).unwrap();
        assert_eq!(exact.prec, None);
    }

    #[test]
    fn config_schema() {
        let c: Config = serde_json::from_str(r#"{"p":3,"e":2,"f":1,"t":1,"b":1}"#).unwrap();
        let pr = c.extension_params(None).unwrap();
        assert_eq!(pr.d(), 2);
        let full = Config::canonical(&pr);
        let again = full.extension_params(None).unwrap();
        assert_eq!(Config::canonical(&again), full);
        assert!(serde_json::from_str::<Config>(r#"{"p":3,"e":2,"f":1,"t":1,"b":1,"x":0}"#).is_err());
        let z: Config = serde_json::from_str(r#"{"p":5,"e":4,"f":1,"t":1,"b":-1,"char":"0","vK_p":1}"#).unwrap();
        assert!(z.ram_params().is_ok());
        assert!(z.extension_params(None).is_err());
    }
}
