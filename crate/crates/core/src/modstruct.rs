//! Associated orders `A(n) = {h in H : h P_L^n ⊆ P_L^n}` and freeness of the
//! ideals `P_L^n`.
//!
//! In characteristic `p` the scaffold is exact: `Psi^j lambda_t` is a unit
//! multiple of `lambda_{t+jb}` when `j <= a(t)` and zero otherwise. Since the
//! terms of `h lambda_t` have valuations distinct mod `p`, every computation
//! reduces to bookkeeping of valuations per residue class.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::hopf::HopfPresentation;
use crate::scaffold::{a_shift, lambda};
use crate::tower::{Level, Tower};

/// `A(n) = sum_j pi^{d_j} O_K Psi^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderBasis {
    pub n: i64,
    pub d_vec: Vec<i64>,
}

/// Valuation of `Psi^j lambda_t`, or `None` when it vanishes.
fn act_val(t: i64, j: u64, b: i64, p: u64) -> Option<i64> {
    (j <= a_shift(t, b, p)).then(|| t + j as i64 * b)
}

pub fn assoc_order(p: u64, b: i64, n: i64) -> OrderBasis {
    let pi = p as i64;
    let d_vec = (0..p)
        .map(|j| {
            let m = (n..n + pi)
                .filter_map(|t| act_val(t, j, b, p))
                .map(|v| (v - n).div_euclid(pi))
                .min()
                .expect("a(t) = p-1 for some t in every window");
            -m
        })
        .collect();
    OrderBasis { n, d_vec }
}

impl OrderBasis {
    /// `d_i + d_j >= d_{i+j}` for `i + j < p`.
    pub fn is_ring(&self) -> bool {
        let p = self.d_vec.len();
        (0..p).all(|i| (0..p - i).all(|j| self.d_vec[i] + self.d_vec[j] >= self.d_vec[i + j]))
    }

    /// `dim_kappa(M / M^2)` for `M = pi O_K + sum_{j>=1} pi^{d_j} O_K Psi^j`.
    pub fn embedding_dim(&self) -> usize {
        let p = self.d_vec.len();
        let mut dim = 1;
        for k in 1..p {
            let mut m2 = self.d_vec[k] + 1;
            for i in 1..k {
                m2 = m2.min(self.d_vec[i] + self.d_vec[k - i]);
            }
            dim += (m2 - self.d_vec[k]) as usize;
        }
        dim
    }
}

/// Valuations reached by `pi^{d_j} Psi^j lambda_s`, `s` in `[n, n+p)`, `j >= 1`.
fn maximal_ideal_image(p: u64, b: i64, ob: &OrderBasis) -> Vec<i64> {
    let pi = p as i64;
    let n = ob.n;
    let mut out = Vec::new();
    for s in n..n + pi {
        for j in 1..p {
            if let Some(v) = act_val(s, j, b, p) {
                out.push(v + pi * ob.d_vec[j as usize]);
            }
        }
    }
    out
}

/// `dim_kappa(P^n / M P^n)`: residues `t` in `[n, n+p)` not reached by `M P^n`.
pub fn n_generators(p: u64, b: i64, ob: &OrderBasis) -> usize {
    let hit = maximal_ideal_image(p, b, ob);
    (ob.n..ob.n + p as i64).filter(|t| !hit.contains(t)).count()
}

/// Some `lambda_s` with `A(n) lambda_s = P^n`.
pub fn monomial_generator(p: u64, b: i64, ob: &OrderBasis) -> Option<i64> {
    let pi = p as i64;
    let n = ob.n;
    (n..n + pi).find(|&s| {
        let mut seen = vec![false; p as usize];
        for j in 0..p {
            match act_val(s, j, b, p) {
                Some(v) => {
                    let w = v + pi * ob.d_vec[j as usize];
                    if w < n || w >= n + pi {
                        return false;
                    }
                    seen[(w - n) as usize] = true;
                }
                None => return false,
            }
        }
        seen.iter().all(|&x| x)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    Criterion,
    BruteForce,
    BothAgree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Clause {
    /// `n ≡ b̄`: free.
    ShiftClass,
    /// `n ≡ 0`: free iff `b̄ | p-1`.
    ZeroClass,
    /// `n ≡ b̄ + 1`: free iff `b̄ = p-1`.
    InverseDifferentClass,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CriterionVerdict {
    Covered { free: bool, clause: Clause },
    NotCovered,
}

pub fn freeness_criterion(p: u64, b: i64, n: i64) -> CriterionVerdict {
    let pi = p as i64;
    let bb = b.rem_euclid(pi);
    let r = n.rem_euclid(pi);
    if r == bb {
        CriterionVerdict::Covered { free: true, clause: Clause::ShiftClass }
    } else if r == 0 {
        CriterionVerdict::Covered { free: (pi - 1) % bb == 0, clause: Clause::ZeroClass }
    } else if r == (bb + 1) % pi {
        CriterionVerdict::Covered { free: bb == pi - 1, clause: Clause::InverseDifferentClass }
    } else {
        CriterionVerdict::NotCovered
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub n: i64,
    pub n_mod_p: u64,
    pub b_bar: u64,
    pub free: bool,
    pub n_generators: usize,
    pub embedding_dim: usize,
    pub generator: Option<i64>,
    pub source: Source,
}

impl Verdict {
    /// `free` agrees with the Nakayama count.
    pub fn consistent(&self) -> bool {
        self.free == (self.n_generators == 1)
    }
}

pub fn freeness_bruteforce(p: u64, b: i64, n: i64) -> Verdict {
    let ob = assoc_order(p, b, n);
    let generator = monomial_generator(p, b, &ob);
    Verdict {
        n,
        n_mod_p: n.rem_euclid(p as i64) as u64,
        b_bar: b.rem_euclid(p as i64) as u64,
        free: generator.is_some(),
        n_generators: n_generators(p, b, &ob),
        embedding_dim: ob.embedding_dim(),
        generator,
        source: Source::BruteForce,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconcileEntry {
    pub criterion: CriterionVerdict,
    pub verdict: Verdict,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconcileReport {
    pub p: u64,
    pub b: i64,
    pub entries: Vec<ReconcileEntry>,
}

impl ReconcileReport {
    pub fn disagreements(&self) -> usize {
        self.entries.iter().filter(|e| !e.agree).count()
    }
}

pub fn reconcile(p: u64, b: i64, ns: impl IntoIterator<Item = i64>) -> ReconcileReport {
    let entries = ns
        .into_iter()
        .map(|n| {
            let mut verdict = freeness_bruteforce(p, b, n);
            let criterion = freeness_criterion(p, b, n);
            let agree = match criterion {
                CriterionVerdict::Covered { free, .. } => free == verdict.free && verdict.consistent(),
                CriterionVerdict::NotCovered => verdict.consistent(),
            };
            if agree && matches!(criterion, CriterionVerdict::Covered { .. }) {
                verdict.source = Source::BothAgree;
            }
            ReconcileEntry { criterion, verdict, agree }
        })
        .collect();
    ReconcileReport { p, b, entries }
}

/// `v_L(Psi^j lambda_t)` by exact action, for `t` in `[lo, hi)` and `j < p`.
#[derive(Clone, Debug)]
pub struct ActionTable {
    lo: i64,
    /// `vals[t - lo][j]`, `None` for zero.
    vals: Vec<Vec<Option<i64>>>,
}

impl ActionTable {
    pub fn new(h: &HopfPresentation, lo: i64, hi: i64) -> Result<Self> {
        let tw: &Tower = h.tower();
        let p = tw.p();
        let mut vals = Vec::with_capacity((hi - lo).max(0) as usize);
        for t in lo..hi {
            let mut row = Vec::with_capacity(p);
            let mut cur = lambda(tw, t);
            for j in 0..p {
                if j > 0 {
                    cur = h.psi_iter(1, &cur)?;
                }
                if cur.is_zero() {
                    row.push(None);
                } else {
                    let v = cur.valuation_in(Level::L)?;
                    if !v.is_integer() {
                        return Err(Error::Internal("non-integral valuation in L".into()));
                    }
                    row.push(Some(v.to_integer()));
                }
            }
            vals.push(row);
        }
        Ok(ActionTable { lo, vals })
    }

    pub fn get(&self, t: i64, j: usize) -> Option<i64> {
        self.vals[(t - self.lo) as usize][j]
    }

    pub fn covers(&self, n: i64, p: u64) -> bool {
        n >= self.lo && n + p as i64 <= self.lo + self.vals.len() as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub n: i64,
    /// `pi^{d_j} Psi^j P^n ⊆ P^n`.
    pub preserves: Vec<bool>,
    /// `pi^{d_j - 1} Psi^j P^n ⊄ P^n`.
    pub maximal: Vec<bool>,
}

impl Certificate {
    pub fn pass(&self) -> bool {
        self.preserves.iter().all(|&x| x) && self.maximal.iter().all(|&x| x)
    }
}

/// Check `ob` against exact valuations of `Psi^j lambda_t` on the basis `{lambda_t : t in [n, n+p)}`.
pub fn certify(table: &ActionTable, p: u64, ob: &OrderBasis) -> Result<Certificate> {
    if !table.covers(ob.n, p) {
        return Err(Error::Domain("action table does not cover the ideal window"));
    }
    let pi = p as i64;
    let n = ob.n;
    let mut preserves = Vec::with_capacity(p as usize);
    let mut maximal = Vec::with_capacity(p as usize);
    for j in 0..p as usize {
        let dj = ob.d_vec[j];
        let vals: Vec<i64> = (n..n + pi).filter_map(|t| table.get(t, j)).collect();
        preserves.push(vals.iter().all(|&v| v + pi * dj >= n));
        maximal.push(vals.iter().any(|&v| v + pi * (dj - 1) < n));
    }
    Ok(Certificate { n, preserves, maximal })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_examples() {
        assert_eq!(assoc_order(5, 3, 0).d_vec, vec![0, 0, -1, -2, -3]);
        assert_eq!(assoc_order(5, 3, 0), assoc_order(5, 3, 0));
        for p in [3u64, 5, 7] {
            let ob = assoc_order(p, p as i64 - 1, 0);
            assert_eq!(ob.d_vec, (0..p as i64).map(|j| -j).collect::<Vec<_>>());
        }
        for p in [3u64, 5, 7] {
            for b in 1..p as i64 {
                for n in -7..14 {
                    let ob = assoc_order(p, b, n);
                    assert_eq!(ob.d_vec[0], 0);
                    assert!(ob.is_ring());
                    assert_eq!(ob.d_vec, assoc_order(p, b, n + p as i64).d_vec);
                    assert_eq!(freeness_bruteforce(p, b, n).free, freeness_bruteforce(p, b + p as i64, n).free);
                }
            }
        }
    }

    #[test]
    fn criterion_examples() {
        assert_eq!(freeness_criterion(5, 2, 0), CriterionVerdict::Covered { free: true, clause: Clause::ZeroClass });
        assert_eq!(freeness_criterion(5, 3, 0), CriterionVerdict::Covered { free: false, clause: Clause::ZeroClass });
        assert!(matches!(freeness_criterion(7, 6, 7), CriterionVerdict::Covered { free: true, .. }));
        assert_eq!(freeness_criterion(7, 2, 5), CriterionVerdict::NotCovered);
    }

    #[test]
    fn brute_force_examples() {
        let v = freeness_bruteforce(5, 3, 3);
        assert!(v.free && v.consistent());
        assert_eq!(v.generator, Some(3));
        let w = freeness_bruteforce(5, 3, 0);
        assert!(!w.free && w.consistent());
        assert!(w.n_generators > 1);
        assert!(freeness_bruteforce(3, 2, 0).free);
        assert!(!freeness_bruteforce(3, 2, 1).free);
    }

    #[test]
    fn reconciliation_over_residues() {
        for p in [3u64, 5, 7, 11, 13] {
            for b in [-1i64, 1, 2, 3, 4, 5, 6, 8, 9, 10, 12] {
                if b.rem_euclid(p as i64) == 0 {
                    continue;
                }
                let rep = reconcile(p, b, 0..2 * p as i64);
                assert_eq!(rep.disagreements(), 0, "p={p} b={b}: {:?}", rep.entries);
            }
        }
    }

    #[test]
    fn certificates_from_exact_action() {
        use crate::ffield::FieldDesc;
        use crate::series::{LaurentField, LaurentSeries};
        use crate::tower::ExtensionParams;
        for (p, e, f, t, b) in [(5u64, 2u64, 2u64, 1i64, 3i64), (3, 2, 1, 1, -1), (7, 1, 3, 0, 4)] {
            let k = LaurentField::new(FieldDesc::prime(p).unwrap(), 40);
            let kappa = k.field().clone();
            let g = kappa.from_int(crate::ffield::primitive_root(p).unwrap() as i64);
            let gamma = LaurentSeries::from_coeffs(&k, 0, vec![kappa.one(), kappa.one()], None);
            let mu = LaurentSeries::from_coeffs(&k, 0, vec![g], None);
            let beta = LaurentSeries::from_coeffs(&k, -b, vec![kappa.one(), kappa.one()], None);
            let pr = ExtensionParams::new(p, kappa, e, f, t, b, gamma, mu, beta).unwrap();
            let tw = Tower::build(pr).unwrap();
            let h = HopfPresentation::new(&tw).unwrap();
            let pi = p as i64;
            let table = ActionTable::new(&h, 0, 2 * pi).unwrap();
            for s in 0..2 * pi {
                for j in 0..p {
                    assert_eq!(table.get(s, j as usize), act_val(s, j, b, p));
                }
            }
            for n in 0..pi {
                let cert = certify(&table, p, &assoc_order(p, b, n)).unwrap();
                assert!(cert.pass(), "{cert:?}");
            }
            assert!(certify(&table, p, &assoc_order(p, b, pi + 1)).is_err());
        }
    }
}
