//! Grid reconciliation with an append-only JSON-lines store.
//!
//! Each record is one `(params, n)` pair keyed by the SHA-256 of its
//! canonical parameters and `n`; a rerun skips ids already stored.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use typext_core::tower::{with_precision_retry, ExtensionParams};
use typext_core::Result;

use crate::format::Config;
use crate::grid::{grid_points, sample_params, GridPoint};
use crate::reports::{action_table, order_entry, OrderEntry};

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub ps: Vec<u64>,
    pub samples: u64,
    pub seed: u64,
    /// Ideal exponents `[lo, hi)`; `None` for `[0, p)`.
    pub n_range: Option<(i64, i64)>,
    pub out: PathBuf,
    pub precision: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Record<'a> {
    pub id: String,
    pub point: GridPoint,
    pub sample: u64,
    pub params: &'a Config,
    pub entry: &'a OrderEntry,
    pub pass: bool,
}

#[derive(Deserialize)]
struct StoredRecord {
    id: String,
    pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub points: usize,
    pub written: usize,
    pub skipped: usize,
    pub failures: usize,
    pub errors: Vec<String>,
}

impl SweepSummary {
    pub fn ok(&self) -> bool {
        self.failures == 0 && self.errors.is_empty()
    }
}

pub fn record_id(params: &Config, n: i64) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&(params, n)).expect("config serializes"));
    format!("{:x}", h.finalize())
}

/// Stored ids with their pass flags; a torn final line is ignored.
pub fn load_store(path: &Path) -> std::io::Result<HashMap<String, bool>> {
    let mut out = HashMap::new();
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
        Err(e) => return Err(e),
    };
    for line in BufReader::new(file).lines() {
        let line = line?;
        if let Ok(r) = serde_json::from_str::<StoredRecord>(&line) {
            out.insert(r.id, r.pass);
        }
    }
    Ok(out)
}

fn run_point(
    pt: &GridPoint,
    sample: u64,
    opts: &SweepOptions,
    stored: &HashMap<String, bool>,
    sink: &Mutex<File>,
    summary: &Mutex<SweepSummary>,
) -> Result<()> {
    let pr: ExtensionParams = sample_params(pt, sample, opts.seed, opts.precision)?;
    let cfg = Config::canonical(&pr);
    let (lo, hi) = opts.n_range.unwrap_or((0, pt.p as i64));
    let todo: Vec<i64> = (lo..hi).filter(|&n| !stored.contains_key(&record_id(&cfg, n))).collect();
    {
        let mut s = summary.lock().unwrap();
        s.skipped += (hi - lo).max(0) as usize - todo.len();
        s.failures += (lo..hi).filter(|&n| stored.get(&record_id(&cfg, n)) == Some(&false)).count();
    }
    if todo.is_empty() {
        return Ok(());
    }
    let (tlo, thi) = (*todo.first().unwrap(), *todo.last().unwrap() + 1);
    let table = with_precision_retry(&pr, |tw| action_table(tw, tlo, thi))?;
    for n in todo {
        let entry = order_entry(pt.p, pt.b, n, Some(&table))?;
        let pass = entry.pass();
        let rec = Record { id: record_id(&cfg, n), point: *pt, sample, params: &cfg, entry: &entry, pass };
        let mut line = serde_json::to_string(&rec).expect("record serializes");
        line.push('\n');
        {
            let mut f = sink.lock().unwrap();
            f.write_all(line.as_bytes()).and_then(|_| f.flush()).map_err(|e| {
                typext_core::Error::Internal(format!("writing {}: {e}", opts.out.display()))
            })?;
        }
        let mut s = summary.lock().unwrap();
        s.written += 1;
        s.failures += usize::from(!pass);
    }
    Ok(())
}

/// Run the sweep on the current rayon pool.
pub fn sweep(opts: &SweepOptions) -> std::io::Result<SweepSummary> {
    let stored = load_store(&opts.out)?;
    let file = OpenOptions::new().create(true).append(true).open(&opts.out)?;
    let sink = Mutex::new(file);
    let points = grid_points(&opts.ps);
    let work: Vec<(GridPoint, u64)> =
        points.iter().flat_map(|pt| (0..opts.samples).map(move |s| (*pt, s))).collect();
    let summary = Mutex::new(SweepSummary { points: work.len(), ..Default::default() });
    work.par_iter().for_each(|(pt, s)| {
        if let Err(e) = run_point(pt, *s, opts, &stored, &sink, &summary) {
            summary.lock().unwrap().errors.push(format!("{pt:?} sample {s}: {e}"));
        }
    });
    let mut out = summary.into_inner().unwrap();
    out.errors.sort();
    Ok(out)
}
