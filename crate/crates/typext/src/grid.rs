//! The parameter grid and seeded random `(gamma, mu, beta)` samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use typext_core::ffield::is_prime;
use typext_core::tower::{check_numeric, default_precision, ExtensionParams};
use typext_core::{FieldDesc, LaurentField, LaurentSeries, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint {
    pub p: u64,
    pub e: u64,
    pub f: u64,
    pub t: i64,
    pub b: i64,
}

/// Every valid `(p, e, f, t, b)` with `b` in `{-1, 1, .., 2p}`, in lexicographic order.
pub fn grid_points(ps: &[u64]) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &p in ps {
        if !is_prime(p) || p == 2 {
            continue;
        }
        for d in 1..p {
            if (p - 1) % d != 0 {
                continue;
            }
            for e in 1..=d {
                if d % e != 0 {
                    continue;
                }
                let f = d / e;
                for t in 0..e as i64 {
                    for b in core::iter::once(-1).chain(1..=2 * p as i64) {
                        if check_numeric(p, e, f, t, b).is_ok() {
                            out.push(GridPoint { p, e, f, t, b });
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

fn point_seed(seed: u64, pt: &GridPoint, sample: u64) -> u64 {
    let mut s = seed;
    for v in [pt.p, pt.e, pt.f, pt.t as u64, pt.b as u64, sample] {
        s = s.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(v).rotate_left(17);
    }
    s
}

/// Sample `sample` of grid point `pt` over `F_p`: `gamma` a principal unit,
/// `mu` a unit with residue of order `f` in `kappa^x/(kappa^x)^f`, and
/// `beta = pi^{-b}` times a unit, each a short random polynomial.
pub fn sample_params(pt: &GridPoint, sample: u64, seed: u64, precision: Option<usize>) -> Result<ExtensionParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(seed, pt, sample));
    let kappa = FieldDesc::prime(pt.p)?;
    let rel = precision.unwrap_or_else(|| default_precision(pt.p, pt.e, pt.f, pt.t, pt.b));
    let ring = LaurentField::new(kappa.clone(), rel);
    let p = pt.p as i64;
    let tail = |rng: &mut ChaCha8Rng, lead| {
        let len = rng.gen_range(0..=3);
        let mut c = vec![lead];
        c.extend((0..len).map(|_| kappa.from_int(rng.gen_range(0..p))));
        c
    };
    let gamma = LaurentSeries::from_coeffs(&ring, 0, tail(&mut rng, kappa.one()), None);
    let units: Vec<_> = kappa
        .elements()
        .filter(|&u| u != kappa.zero() && kappa.quotient_order(u, pt.f).ok() == Some(pt.f))
        .collect();
    let mu0 = units[rng.gen_range(0..units.len())];
    let mu = LaurentSeries::from_coeffs(&ring, 0, tail(&mut rng, mu0), None);
    let beta0 = kappa.from_int(rng.gen_range(1..p));
    let beta = LaurentSeries::from_coeffs(&ring, -pt.b, tail(&mut rng, beta0), None);
    ExtensionParams::new(pt.p, kappa, pt.e, pt.f, pt.t, pt.b, gamma, mu, beta)
}
