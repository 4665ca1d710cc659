//! Monte Carlo moment tables for the continuous T-Sets.
//!
//! The entries of S, S_d, A and A_d are exchangeable under row/column
//! permutations (simultaneous ones for the zero-diagonal kinds), so the first
//! and second moments collapse to a handful of index classes and one table
//! per (kind, n) serves every topology and routing of that size.
//! Heterogeneous sets lose that symmetry and get per-index tables instead.

use super::{SampleStream, SamplerConfig, TSetKind, TSetSpec};
use crate::error::{Error, Result};
use crate::matrix::TrafficMatrix;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Mutex;

/// Relation class of an ordered pair of cells ((i,j),(k,l)).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairClass {
    /// i = k and j = l.
    Same,
    /// Same row, different columns.
    SameRow,
    /// Same column, different rows.
    SameCol,
    /// The two cells close a 2-cycle: k = j and l = i.
    Cycle,
    /// Head-to-tail overlap in exactly one index: k = j xor l = i.
    Chain,
    /// All four indices distinct in both coordinates.
    Distinct,
}

pub fn classify_pair(i: usize, j: usize, k: usize, l: usize) -> PairClass {
    if i == k {
        if j == l {
            PairClass::Same
        } else {
            PairClass::SameRow
        }
    } else if j == l {
        PairClass::SameCol
    } else if k == j && l == i {
        PairClass::Cycle
    } else if k == j || l == i {
        PairClass::Chain
    } else {
        PairClass::Distinct
    }
}

const CLASSES: [PairClass; 6] = [
    PairClass::Same,
    PairClass::SameRow,
    PairClass::SameCol,
    PairClass::Cycle,
    PairClass::Chain,
    PairClass::Distinct,
];

/// A Monte Carlo estimate with its batch-means standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Moment {
    pub value: f64,
    pub std_error: f64,
}

/// First and second entry moments of an exchangeable T-Set, normalized by the
/// set volume (i.e. plain expectations under the uniform measure).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentTable {
    pub kind: TSetKind,
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub first_diag: Moment,
    pub first_offdiag: Moment,
    pub second: HashMap<PairClass, Moment>,
}

impl MomentTable {
    pub fn first(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.first_diag.value
        } else {
            self.first_offdiag.value
        }
    }

    /// E[D_ij D_kl]; zero when a zero-diagonal kind touches the diagonal.
    pub fn second(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        if self.kind.zero_diagonal() && (i == j || k == l) {
            return 0.0;
        }
        self.second[&classify_pair(i, j, k, l)].value
    }
}

/// Number of ordered cell pairs in each class; for zero-diagonal kinds only
/// off-diagonal cells count.
fn class_count(class: PairClass, n: f64, zero_diag: bool) -> f64 {
    if zero_diag {
        match class {
            PairClass::Same => n * (n - 1.0),
            PairClass::SameRow | PairClass::SameCol => n * (n - 1.0) * (n - 2.0),
            PairClass::Cycle => n * (n - 1.0),
            PairClass::Chain => 2.0 * n * (n - 1.0) * (n - 2.0),
            PairClass::Distinct => n * (n - 1.0) * (n - 2.0) * (n - 3.0),
        }
    } else {
        match class {
            PairClass::Same => n * n,
            PairClass::SameRow | PairClass::SameCol => n * n * (n - 1.0),
            PairClass::Cycle => n * (n - 1.0),
            PairClass::Chain => 2.0 * n * (n - 1.0) * (n - 2.0),
            PairClass::Distinct => {
                n.powi(4)
                    - n * n
                    - 2.0 * n * n * (n - 1.0)
                    - n * (n - 1.0)
                    - 2.0 * n * (n - 1.0) * (n - 2.0)
            }
        }
    }
}

/// Per-sample class sums computed in O(n^2) through row/column aggregates.
fn class_sums(d: &TrafficMatrix) -> ([f64; 6], f64, f64) {
    let n = d.n();
    let data = d.data();
    let mut rows = vec![0.0f64; n];
    let mut cols = vec![0.0f64; n];
    let mut q = 0.0; // sum of squares
    let mut tr2 = 0.0; // sum_ij d_ij d_ji
    let mut qd = 0.0; // sum of squared diagonal entries
    let mut trd = 0.0; // trace
    for i in 0..n {
        for j in 0..n {
            let v = data[i * n + j];
            rows[i] += v;
            cols[j] += v;
            q += v * v;
            tr2 += v * data[j * n + i];
        }
        let dii = data[i * n + i];
        qd += dii * dii;
        trd += dii;
    }
    let total: f64 = rows.iter().sum();
    let rsq: f64 = rows.iter().map(|r| r * r).sum();
    let csq: f64 = cols.iter().map(|c| c * c).sum();
    let cr: f64 = (0..n).map(|j| cols[j] * rows[j]).sum();
    let dr: f64 = (0..n).map(|i| data[i * n + i] * rows[i]).sum();
    let dc: f64 = (0..n).map(|i| data[i * n + i] * cols[i]).sum();

    let same = q;
    let same_row = rsq - q;
    let same_col = csq - q;
    let cycle = tr2 - qd;
    let chain = 2.0 * (cr - tr2 - dr - dc + 2.0 * qd);
    let distinct = total * total - same - same_row - same_col - cycle - chain;
    ([same, same_row, same_col, cycle, chain, distinct], trd, total - trd)
}

/// Estimate the class moment table for an exchangeable T-Set by Monte Carlo.
/// Standard errors come from batch means, which absorbs the walk's
/// autocorrelation.
pub fn moment_tables(spec: &TSetSpec, cfg: &SamplerConfig, m: usize) -> Result<MomentTable> {
    match spec.kind {
        TSetKind::DoublyStochastic
        | TSetKind::DoublyStochasticZeroDiag
        | TSetKind::Admissible
        | TSetKind::AdmissibleZeroDiag => {}
        other => {
            return Err(Error::UnsupportedMode(format!(
                "class moment tables apply to S, Sd, A, Ad (got {other})"
            )))
        }
    }
    if m < 10_000 {
        return Err(Error::InvalidArgument("moment tables need at least 10^4 samples".into()));
    }
    let n = spec.n as f64;
    let zero_diag = spec.kind.zero_diagonal();
    let batches = 100.min(m / 100).max(2);
    let batch_len = m / batches;
    let used = batches * batch_len;

    // batch means per statistic: 6 classes + diag + offdiag
    let mut batch_means = vec![[0.0f64; 8]; batches];
    let stream = SampleStream::new(spec, cfg, used)?;
    for (idx, d) in stream.enumerate() {
        let (sums, diag, offdiag) = class_sums(&d);
        let b = &mut batch_means[idx / batch_len];
        for (slot, &s) in sums.iter().enumerate() {
            let count = class_count(CLASSES[slot], n, zero_diag);
            if count > 0.0 {
                b[slot] += s / count;
            }
        }
        b[6] += diag / n;
        b[7] += offdiag / (n * (n - 1.0));
    }
    for b in batch_means.iter_mut() {
        for v in b.iter_mut() {
            *v /= batch_len as f64;
        }
    }
    let moment = |slot: usize| {
        let vals: Vec<f64> = batch_means.iter().map(|b| b[slot]).collect();
        let mu = vals.iter().sum::<f64>() / batches as f64;
        let var =
            vals.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / (batches as f64 - 1.0);
        Moment { value: mu, std_error: (var / batches as f64).sqrt() }
    };
    let mut second = HashMap::new();
    for (slot, class) in CLASSES.iter().enumerate() {
        second.insert(*class, moment(slot));
    }
    Ok(MomentTable {
        kind: spec.kind,
        n: spec.n,
        seed: cfg.seed,
        samples: used,
        first_diag: moment(6),
        first_offdiag: moment(7),
        second,
    })
}

/// Per-index moments for a heterogeneous T-Set: n^2 first moments and the
/// full n^4 second-moment tensor, flattened row-major over cell indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HMomentTable {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub ingress: Vec<f64>,
    pub egress: Vec<f64>,
    pub first: Vec<f64>,
    pub second: Vec<f64>,
    pub max_first_std_error: f64,
}

impl HMomentTable {
    #[inline]
    pub fn first(&self, i: usize, j: usize) -> f64 {
        self.first[i * self.n + j]
    }

    #[inline]
    pub fn second(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let nn = self.n * self.n;
        self.second[(i * self.n + j) * nn + (k * self.n + l)]
    }
}

pub fn h_moment_tables(spec: &TSetSpec, cfg: &SamplerConfig, m: usize) -> Result<HMomentTable> {
    if !spec.kind.is_heterogeneous() {
        return Err(Error::UnsupportedMode("per-index moment tables are for H kinds".into()));
    }
    if m < 10_000 {
        return Err(Error::InvalidArgument("moment tables need at least 10^4 samples".into()));
    }
    let n = spec.n;
    let nn = n * n;
    let mut first = vec![0.0f64; nn];
    let mut first_sq = vec![0.0f64; nn];
    let mut second = vec![0.0f64; nn * nn];
    for d in SampleStream::new(spec, cfg, m)? {
        let v = d.data();
        for a in 0..nn {
            first[a] += v[a];
            first_sq[a] += v[a] * v[a];
            let row = &mut second[a * nn..(a + 1) * nn];
            for b in 0..nn {
                row[b] += v[a] * v[b];
            }
        }
    }
    let mf = m as f64;
    let mut max_se = 0.0f64;
    for a in 0..nn {
        first[a] /= mf;
        let var = (first_sq[a] / mf - first[a] * first[a]).max(0.0);
        max_se = max_se.max((var / mf).sqrt());
    }
    for s in second.iter_mut() {
        *s /= mf;
    }
    Ok(HMomentTable {
        n,
        seed: cfg.seed,
        samples: m,
        ingress: spec.ingress.clone().unwrap_or_default(),
        egress: spec.egress.clone().unwrap_or_default(),
        first,
        second,
        max_first_std_error: max_se,
    })
}

/// In-memory (and optionally on-disk) cache of moment tables, keyed by
/// (kind, n). The cache directory can also come from the `TPLOT_MOMENT_CACHE`
/// environment variable.
pub struct MomentStore {
    dir: Option<PathBuf>,
    tables: Mutex<HashMap<(TSetKind, usize), MomentTable>>,
    h_tables: Mutex<HashMap<String, HMomentTable>>,
}

impl MomentStore {
    pub fn in_memory() -> Self {
        MomentStore { dir: None, tables: Mutex::new(HashMap::new()), h_tables: Mutex::new(HashMap::new()) }
    }

    pub fn with_dir(dir: PathBuf) -> Self {
        MomentStore {
            dir: Some(dir),
            tables: Mutex::new(HashMap::new()),
            h_tables: Mutex::new(HashMap::new()),
        }
    }

    /// Store rooted at `TPLOT_MOMENT_CACHE` when set, in-memory otherwise.
    pub fn from_env() -> Self {
        match std::env::var_os("TPLOT_MOMENT_CACHE") {
            Some(dir) if !dir.is_empty() => Self::with_dir(PathBuf::from(dir)),
            _ => Self::in_memory(),
        }
    }

    fn table_path(&self, kind: TSetKind, n: usize) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("moments_{}_{n}.json", kind.label())))
    }

    pub fn get(&self, kind: TSetKind, n: usize) -> Option<MomentTable> {
        if let Some(t) = self.tables.lock().unwrap().get(&(kind, n)) {
            return Some(t.clone());
        }
        let path = self.table_path(kind, n)?;
        let text = std::fs::read_to_string(path).ok()?;
        let table: MomentTable = serde_json::from_str(&text).ok()?;
        if table.kind == kind && table.n == n {
            self.tables.lock().unwrap().insert((kind, n), table.clone());
            Some(table)
        } else {
            None
        }
    }

    pub fn insert(&self, table: MomentTable) -> Result<()> {
        if let Some(path) = self.table_path(table.kind, table.n) {
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, serde_json::to_string_pretty(&table)?)?;
        }
        self.tables.lock().unwrap().insert((table.kind, table.n), table);
        Ok(())
    }

    pub fn get_or_compute(
        &self,
        spec: &TSetSpec,
        cfg: &SamplerConfig,
        m: usize,
    ) -> Result<MomentTable> {
        if let Some(t) = self.get(spec.kind, spec.n) {
            return Ok(t);
        }
        let table = moment_tables(spec, cfg, m)?;
        self.insert(table.clone())?;
        Ok(table)
    }

    fn h_key(spec: &TSetSpec) -> String {
        let fmt = |v: &Option<Vec<f64>>| {
            v.as_ref()
                .map(|x| x.iter().map(|r| format!("{r:.12e}")).collect::<Vec<_>>().join(","))
                .unwrap_or_default()
        };
        format!("{}|{}|{}|{}", spec.kind.label(), spec.n, fmt(&spec.ingress), fmt(&spec.egress))
    }

    pub fn get_h(&self, spec: &TSetSpec) -> Option<HMomentTable> {
        self.h_tables.lock().unwrap().get(&Self::h_key(spec)).cloned()
    }

    pub fn get_or_compute_h(
        &self,
        spec: &TSetSpec,
        cfg: &SamplerConfig,
        m: usize,
    ) -> Result<HMomentTable> {
        if let Some(t) = self.get_h(spec) {
            return Ok(t);
        }
        let table = h_moment_tables(spec, cfg, m)?;
        self.h_tables.lock().unwrap().insert(Self::h_key(spec), table.clone());
        Ok(table)
    }
}
