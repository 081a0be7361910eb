//! Report builders behind the subcommands. Each returns a serializable
//! report and whether every check in it passed.

use serde::Serialize;
use typext_core::galois::{break_via_action, trace_ideal_check, verify_relations};
use typext_core::hopf::{lemma32, HopfPresentation};
use typext_core::modstruct::{
    assoc_order, certify, freeness_bruteforce, freeness_criterion, ActionTable, Clause, CriterionVerdict, Source,
};
use typext_core::ramprofile::{Convention, Ext, RamParams};
use typext_core::scaffold::{build_scaffold, verify_scaffold, Tolerance};
use typext_core::tower::{ExtensionParams, Level, Sub, Tower};
use typext_core::{LaurentSeries, Result};

use crate::format::{element_to_json, Config, FieldJson, RatJson, SeriesJson, TermJson};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
}

fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

#[derive(Clone, Debug, Serialize)]
pub struct Derived {
    pub d: u64,
    pub s: u64,
    pub alpha: SeriesJson,
    pub r: u64,
    pub rho: Vec<u64>,
    pub ell: RatJson,
    pub b_prime: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PolygonJson {
    pub vertices: Vec<(usize, i64)>,
    pub slopes: Vec<RatJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Valuations {
    pub v_l_x: i64,
    pub v_m_x: i64,
    pub v_m_y: i64,
    pub v_m_pi: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationsJson {
    pub sigma_p: bool,
    pub tau_d: bool,
    pub conjugation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceJson {
    pub n: i64,
    pub r: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BuildReport {
    pub params: Config,
    pub derived: Derived,
    pub newton_polygon: PolygonJson,
    pub kappa_f: FieldJson,
    pub valuations: Valuations,
    pub different_exponent: i64,
    pub different_formula: i64,
    pub relations: RelationsJson,
    pub break_bprime: i64,
    pub trace_checks: Vec<TraceJson>,
    pub checks: Vec<Check>,
}

fn int_val(z: &typext_core::tower::TowerElement, level: Level) -> Result<i64> {
    let v = z.valuation_in(level)?;
    if !v.is_integer() {
        return Err(typext_core::Error::Internal("non-integral valuation at the natural level".into()));
    }
    Ok(v.to_integer())
}

fn poly_eq(a: &[LaurentSeries], b: &[LaurentSeries]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.eq_to_precision(y))
}

/// Tower construction, valuations, different, group relations, break and trace ideals for `n` in `trace_ns`.
pub fn build_report(tw: &Tower, trace_ns: impl IntoIterator<Item = i64>) -> Result<(BuildReport, bool)> {
    let pr = tw.params();
    let ring = tw.ring();
    let (p, e, b, t) = (pr.p() as i64, pr.e() as i64, pr.b(), pr.t());
    let rp = RamParams::from(pr);
    let rec = tw.recorded_valuations();
    let x = tw.x();
    let y = tw.y();
    let valuations = Valuations {
        v_l_x: int_val(&x, Level::L)?,
        v_m_x: x.v_m()?,
        v_m_y: y.v_m()?,
        v_m_pi: tw.pi().v_m()?,
    };
    let mut checks = vec![
        Check { name: "newton_polygon_single_segment", pass: tw.polygon().is_single_segment() },
        Check {
            name: "valuations",
            pass: (valuations.v_l_x, valuations.v_m_x, valuations.v_m_y, valuations.v_m_pi)
                == (-b, -e * b, p * t, e * p)
                && (rec.v_l_x, rec.v_m_x, rec.v_m_y, rec.v_m_pi)
                    == (valuations.v_l_x, valuations.v_m_x, valuations.v_m_y, valuations.v_m_pi),
        },
    ];
    let mut want_x = vec![LaurentSeries::zero(ring); tw.p() + 1];
    want_x[0] = tw.beta().neg();
    want_x[1] = tw.alpha_s().neg();
    want_x[tw.p()] = LaurentSeries::one(ring);
    checks.push(Check { name: "min_poly_x", pass: poly_eq(&x.min_poly()?, &want_x) });
    let mut want_y = vec![LaurentSeries::zero(ring); tw.d() + 1];
    want_y[0] = tw.alpha().neg();
    want_y[tw.d()] = LaurentSeries::one(ring);
    checks.push(Check { name: "min_poly_y", pass: poly_eq(&y.min_poly()?, &want_y) });
    let norm = x.norm(Sub::MOverMPrime)?;
    checks.push(Check { name: "norm_x_is_beta", pass: norm.eq_to_precision(&tw.from_k(tw.beta().clone())) });
    let different_exponent = tw.different_exponent_exact()?;
    let different_formula = rp.diff_exp();
    checks.push(Check { name: "different", pass: different_exponent == different_formula });
    let rel = verify_relations(tw);
    checks.push(Check { name: "relations", pass: rel.all_pass() });
    let break_bprime = break_via_action(&x)?;
    checks.push(Check {
        name: "break",
        pass: break_bprime == pr.b_prime()
            && typext_core::Rational::new(break_bprime, e) == rp.ram_number(),
    });
    let mut trace_checks = Vec::new();
    for n in trace_ns {
        let tc = trace_ideal_check(tw, n)?;
        trace_checks.push(TraceJson { n, r: tc.r, pass: tc.pass() });
    }
    checks.push(Check { name: "trace_ideals", pass: trace_checks.iter().all(|c| c.pass) });
    let kappa = pr.kappa();
    let report = BuildReport {
        params: Config::canonical(pr),
        derived: Derived {
            d: pr.d(),
            s: pr.s(),
            alpha: SeriesJson::from_series(tw.alpha()),
            r: pr.r(),
            rho: kappa.coeffs(pr.rho()),
            ell: pr.ell().into(),
            b_prime: pr.b_prime(),
        },
        newton_polygon: PolygonJson {
            vertices: tw.polygon().vertices.clone(),
            slopes: tw.polygon().slopes.iter().map(|&s| s.into()).collect(),
        },
        kappa_f: FieldJson::from_field(&tw.residue_tower().kappa_f),
        valuations,
        different_exponent,
        different_formula,
        relations: RelationsJson { sigma_p: rel.sigma_p, tau_d: rel.tau_d, conjugation: rel.conjugation },
        break_bprime,
        trace_checks,
        checks,
    };
    let ok = all_pass(&report.checks);
    Ok((report, ok))
}

#[derive(Clone, Debug, Serialize)]
pub struct HerbrandJson {
    pub ext: &'static str,
    pub convention: &'static str,
    pub vertices: Vec<(RatJson, RatJson)>,
    pub slope: RatJson,
}

#[derive(Clone, Debug, Serialize)]
pub struct RamifyReport {
    pub ell: RatJson,
    pub b_prime: i64,
    pub diff_exp: i64,
    pub herbrand: Vec<HerbrandJson>,
    pub scaffold_condition: bool,
}

pub fn convention_name(c: Convention) -> &'static str {
    match c {
        Convention::Serre => "serre",
        Convention::Artin => "artin",
    }
}

pub fn ext_name(x: Ext) -> &'static str {
    match x {
        Ext::LOverK => "L/K",
        Ext::MOverK => "M/K",
        Ext::MOverMPrime => "M/M'",
    }
}

pub fn ramify_report(rp: &RamParams, conv: Convention) -> Result<(RamifyReport, bool)> {
    let prof = rp.profile(conv)?;
    let mut ok = true;
    let herbrand = prof
        .herbrand
        .iter()
        .map(|(x, h)| {
            ok &= h.is_concave_increasing();
            HerbrandJson {
                ext: ext_name(*x),
                convention: convention_name(conv),
                vertices: h.vertices.iter().map(|&(a, b)| (a.into(), b.into())).collect(),
                slope: h.terminal_slope.into(),
            }
        })
        .collect();
    let report = RamifyReport {
        ell: prof.ell.into(),
        b_prime: prof.b_prime,
        diff_exp: prof.diff_exp,
        herbrand,
        scaffold_condition: rp.scaffold_condition(),
    };
    Ok((report, ok))
}

#[derive(Clone, Debug, Serialize)]
pub struct ActionRow {
    pub i: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerRow {
    pub i: usize,
    pub equal: bool,
    pub sum_formula_exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaRow {
    pub p: u64,
    pub i: u64,
    pub pass: bool,
    pub defect: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HopfReport {
    /// Coefficient of `sigma^m` in `Psi`, as an element of `M'`.
    pub psi_coeffs: Vec<Vec<TermJson>>,
    pub tau_fixed: bool,
    pub power_rank: usize,
    pub action_table: Vec<ActionRow>,
    pub power_identity: Vec<PowerRow>,
    pub measuring: bool,
    pub lemma32: Vec<LemmaRow>,
}

/// `Psi^i = i! Psi_i` should hold everywhere and the sum formula should fail only at `i = p-1`.
pub fn lemma32_rows(p: u64) -> Result<(Vec<LemmaRow>, bool)> {
    let mut rows = Vec::new();
    let mut ok = true;
    for i in 1..p {
        let l = lemma32(p, i)?;
        let expected_pass = i < p - 1;
        if i == p - 1 {
            let mut one = vec![0; p as usize];
            one[0] = 1;
            ok &= l.defect == one;
        }
        ok &= l.pass == expected_pass;
        rows.push(LemmaRow { p, i, pass: l.pass, defect: l.defect });
    }
    Ok((rows, ok))
}

pub fn hopf_report(tw: &Tower, lemma_primes: &[u64]) -> Result<(HopfReport, bool)> {
    let h = HopfPresentation::new(tw)?;
    let p = tw.p();
    let mut ok = true;
    let psi_coeffs = h.psi().coeffs().iter().map(element_to_json).collect();
    let tau_fixed = h.psi().tau_fixed();
    ok &= tau_fixed;
    let power_rank = h.power_rank()?;
    ok &= power_rank == p;
    let x = tw.x();
    let mut action_table = Vec::new();
    let mut xi = tw.one();
    let mut prev = tw.zero();
    for i in 0..p {
        let got = h.act(h.psi(), &xi)?;
        let want = prev.scale_k(&LaurentSeries::from_int(tw.ring(), i as i64));
        let pass = got.eq_to_precision(&want);
        ok &= pass;
        action_table.push(ActionRow { i, pass });
        prev = xi.clone();
        xi = xi.mul(&x);
    }
    let mut power_identity = Vec::new();
    for i in 1..p {
        let rep = h.power_identity(i)?;
        let sum_formula_exact = rep.against_sum_formula.is_zero();
        ok &= rep.equal && sum_formula_exact == (i < p - 1);
        power_identity.push(PowerRow { i, equal: rep.equal, sum_formula_exact });
    }
    let measuring = h.measuring_identity(&x, &x.mul(&x).add(&tw.pi()))?;
    ok &= measuring;
    let mut lemma_rows = Vec::new();
    for &q in lemma_primes {
        let (rows, pass) = lemma32_rows(q)?;
        ok &= pass;
        lemma_rows.extend(rows);
    }
    let report =
        HopfReport { psi_coeffs, tau_fixed, power_rank, action_table, power_identity, measuring, lemma32: lemma_rows };
    Ok((report, ok))
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaffoldRow {
    pub t: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScaffoldReport {
    pub b: i64,
    pub a_table: Vec<u64>,
    pub f_table: Vec<(i64, i64)>,
    /// `null` for an infinite tolerance.
    pub tolerance: Option<i64>,
    pub checks: Vec<ScaffoldRow>,
}

pub fn scaffold_report(tw: &Tower, lo: i64, hi: i64) -> Result<(ScaffoldReport, bool)> {
    let h = HopfPresentation::new(tw)?;
    let data = build_scaffold(tw);
    let checks: Vec<ScaffoldRow> =
        verify_scaffold(&h, lo, hi)?.into_iter().map(|c| ScaffoldRow { t: c.t, pass: c.pass }).collect();
    let ok = data.consistent() && checks.iter().all(|c| c.pass);
    let tolerance = match data.tolerance {
        Tolerance::Infinite => None,
        Tolerance::Finite(v) => Some(v),
    };
    let report = ScaffoldReport { b: data.b, a_table: data.a_table, f_table: data.f_table, tolerance, checks };
    Ok((report, ok))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionJson {
    pub covered: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub free: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<&'static str>,
}

impl From<CriterionVerdict> for CriterionJson {
    fn from(v: CriterionVerdict) -> Self {
        match v {
            CriterionVerdict::NotCovered => CriterionJson { covered: false, free: None, clause: None },
            CriterionVerdict::Covered { free, clause } => CriterionJson {
                covered: true,
                free: Some(free),
                clause: Some(match clause {
                    Clause::ShiftClass => "n = b mod p",
                    Clause::ZeroClass => "n = 0 mod p",
                    Clause::InverseDifferentClass => "n = b + 1 mod p",
                }),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateJson {
    pub preserves: Vec<bool>,
    pub maximal: Vec<bool>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderEntry {
    pub n: i64,
    pub b_bar: u64,
    pub d_vec: Vec<i64>,
    pub free: bool,
    pub n_generators: usize,
    pub embedding_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<i64>,
    pub source: &'static str,
    pub criterion: CriterionJson,
    pub agree: bool,
    pub certificates: Option<CertificateJson>,
}

impl OrderEntry {
    pub fn pass(&self) -> bool {
        self.agree && self.certificates.as_ref().is_none_or(|c| c.pass)
    }
}

fn source_name(s: Source) -> &'static str {
    match s {
        Source::Criterion => "criterion",
        Source::BruteForce => "brute-force",
        Source::BothAgree => "both-agree",
    }
}

/// Verdict for one ideal; `table` supplies the exact-action certificate.
pub fn order_entry(p: u64, b: i64, n: i64, table: Option<&ActionTable>) -> Result<OrderEntry> {
    let ob = assoc_order(p, b, n);
    let v = freeness_bruteforce(p, b, n);
    let criterion = freeness_criterion(p, b, n);
    let agree = v.consistent()
        && match criterion {
            CriterionVerdict::Covered { free, .. } => free == v.free,
            CriterionVerdict::NotCovered => true,
        };
    let source = if agree && matches!(criterion, CriterionVerdict::Covered { .. }) { Source::BothAgree } else { v.source };
    let certificates = match table {
        Some(tb) => {
            let c = certify(tb, p, &ob)?;
            let pass = c.pass() && ob.is_ring();
            Some(CertificateJson { preserves: c.preserves, maximal: c.maximal, pass })
        }
        None => None,
    };
    Ok(OrderEntry {
        n,
        b_bar: v.b_bar,
        d_vec: ob.d_vec,
        free: v.free,
        n_generators: v.n_generators,
        embedding_dim: v.embedding_dim,
        generator: v.generator,
        source: source_name(source),
        criterion: criterion.into(),
        agree,
        certificates,
    })
}

pub fn action_table(tw: &Tower, lo: i64, hi: i64) -> Result<ActionTable> {
    let h = HopfPresentation::new(tw)?;
    ActionTable::new(&h, lo, hi + tw.p() as i64)
}

pub fn orders_report(tw: &Tower, lo: i64, hi: i64) -> Result<(Vec<OrderEntry>, bool)> {
    let pr = tw.params();
    let table = action_table(tw, lo, hi)?;
    let entries = (lo..hi).map(|n| order_entry(pr.p(), pr.b(), n, Some(&table))).collect::<Result<Vec<_>>>()?;
    let ok = entries.iter().all(OrderEntry::pass);
    Ok((entries, ok))
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyReport {
    pub params: Config,
    pub d: u64,
    pub ell: RatJson,
}

pub fn classify_report(pr: &ExtensionParams) -> ClassifyReport {
    ClassifyReport { params: Config::canonical(pr), d: pr.d(), ell: pr.ell().into() }
}
