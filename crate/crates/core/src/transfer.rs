//! Bottom-up level recursion for `Z_n` and `P_n`.
//!
//! `W_q(t, i)` is the total weight of labelings of the depth-`q` subtree below
//! a vertex of generator type `t` labeled `i`, counting only edges strictly
//! inside that subtree:
//!
//! ```text
//! W_0(t, i) = [i admissible at the bottom level]
//! W_q(t, i) = Π_{u : R(t, u) = 1} Σ_j E(i, j) · W_{q-1}(u, j)
//! Z_n       = Σ_i w_i · Π_{t = 1..k} Σ_j E(i, j) · W_{n-1}(t, j)      (n >= 1)
//! ```
//!
//! Sums run over ascending symbol index and products over ascending child
//! type, so log-domain results are bit-reproducible.

use num_bigint::BigUint;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::interaction::InteractionSpec;
use crate::numeric::{biguint_to_f64, ln_rational, LogReal, Weight};
use crate::restriction::{level_counts, LevelCounts, RestrictionMatrix};

/// Which patterns on `Δ_n` are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Restrictions of points of the tree shift: bottom-level labels must be
    /// essential symbols.
    Extendable,
    /// Every pattern with positive weight on each edge inside `Δ_n`.
    Local,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Extendable => "extendable",
            Mode::Local => "local",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Big rationals; requires an exact view of the interaction.
    Exact,
    /// Natural logs with log-sum-exp addition.
    Log,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Exact => "exact",
            Backend::Log => "log",
        }
    }
}

/// Lifts an interaction into a weight backend.
pub trait Lift: Weight + Sized {
    const BACKEND: Backend;
    fn lift_e(spec: &InteractionSpec) -> Result<Vec<Vec<Self>>>;
    fn lift_w(spec: &InteractionSpec) -> Result<Vec<Self>>;
    fn exact_value(&self) -> Option<BigRational> {
        None
    }
}

impl Lift for LogReal {
    const BACKEND: Backend = Backend::Log;
    fn lift_e(spec: &InteractionSpec) -> Result<Vec<Vec<Self>>> {
        Ok(spec.log_e().iter().map(|row| row.iter().map(|&v| LogReal(v)).collect()).collect())
    }
    fn lift_w(spec: &InteractionSpec) -> Result<Vec<Self>> {
        Ok(spec.log_w().iter().map(|&v| LogReal(v)).collect())
    }
}

fn exact_view(spec: &InteractionSpec) -> Result<&crate::interaction::ExactView> {
    spec.exact().ok_or_else(|| {
        Error::BackendMismatch("exact backend requested but the interaction has non-rational entries".into())
    })
}

impl Lift for BigRational {
    const BACKEND: Backend = Backend::Exact;
    fn lift_e(spec: &InteractionSpec) -> Result<Vec<Vec<Self>>> {
        Ok(exact_view(spec)?.e.clone())
    }
    fn lift_w(spec: &InteractionSpec) -> Result<Vec<Self>> {
        Ok(exact_view(spec)?.w.clone())
    }
    fn exact_value(&self) -> Option<BigRational> {
        Some(self.clone())
    }
}

/// `W_q` for one depth `q`, indexed `[t][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferTable<T> {
    pub q: usize,
    pub mode: Mode,
    pub values: Vec<Vec<T>>,
    /// First depth `q' <= q` at which some row `W_{q'}(t, ·)` was entirely zero.
    pub dead_depth: Option<usize>,
}

/// Incremental driver for the recursion; one instance is advanced level by level.
pub struct Recursion<'a, T> {
    r: &'a RestrictionMatrix,
    mode: Mode,
    e: Vec<Vec<T>>,
    w: Vec<T>,
    admissible: Vec<bool>,
    table: TransferTable<T>,
}

impl<'a, T: Lift> Recursion<'a, T> {
    pub fn new(r: &'a RestrictionMatrix, spec: &InteractionSpec, mode: Mode) -> Result<Self> {
        let e = T::lift_e(spec)?;
        let w = T::lift_w(spec)?;
        let d = spec.d();
        let admissible: Vec<bool> = match mode {
            Mode::Local => vec![true; d],
            Mode::Extendable => (0..d).map(|i| spec.is_essential(i)).collect(),
        };
        let row: Vec<T> = admissible.iter().map(|&ok| if ok { T::one() } else { T::zero() }).collect();
        let values = vec![row; r.k()];
        let mut table = TransferTable { q: 0, mode, values, dead_depth: None };
        if has_dead_row(&table.values) {
            table.dead_depth = Some(0);
        }
        Ok(Self { r, mode, e, w, admissible, table })
    }

    pub fn table(&self) -> &TransferTable<T> {
        &self.table
    }

    pub fn into_table(self) -> TransferTable<T> {
        self.table
    }

    /// `S(i, u) = Σ_j E(i, j) · W_q(u, j)`, indexed `[i][u]`.
    fn child_sums(&self) -> Vec<Vec<T>> {
        let d = self.w.len();
        (0..d)
            .map(|i| {
                self.table
                    .values
                    .iter()
                    .map(|wu| {
                        let mut acc = T::zero();
                        for (eij, wuj) in self.e[i].iter().zip(wu) {
                            if !eij.is_zero() && !wuj.is_zero() {
                                acc = acc.add(&eij.mul(wuj));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect()
    }

    /// `Z_{q+1}` from the current table `W_q`.
    pub fn next_partition(&self) -> T {
        let sums = self.child_sums();
        self.root_sum(&sums)
    }

    fn root_sum(&self, sums: &[Vec<T>]) -> T {
        let mut z = T::zero();
        for (wi, si) in self.w.iter().zip(sums) {
            let mut prod = wi.clone();
            for s in si {
                prod = prod.mul(s);
            }
            z = z.add(&prod);
        }
        z
    }

    /// `Z_0 = Σ_{i admissible} w_i`.
    pub fn root_only(&self) -> T {
        let mut z = T::zero();
        for (wi, &ok) in self.w.iter().zip(&self.admissible) {
            if ok {
                z = z.add(wi);
            }
        }
        z
    }

    /// Advances `W_q` to `W_{q+1}` and returns `Z_{q+1}` computed on the way.
    pub fn advance(&mut self) -> T {
        let sums = self.child_sums();
        let z = self.root_sum(&sums);
        let k = self.r.k();
        let d = self.w.len();
        let values: Vec<Vec<T>> = (0..k)
            .map(|t| {
                (0..d)
                    .map(|i| {
                        let mut prod = T::one();
                        for u in self.r.successors(t) {
                            prod = prod.mul(&sums[i][u]);
                        }
                        prod
                    })
                    .collect()
            })
            .collect();
        let q = self.table.q + 1;
        let dead_depth = self.table.dead_depth.or(if has_dead_row(&values) { Some(q) } else { None });
        self.table = TransferTable { q, mode: self.mode, values, dead_depth };
        z
    }
}

fn has_dead_row<T: Weight>(values: &[Vec<T>]) -> bool {
    values.iter().any(|row| row.iter().all(Weight::is_zero))
}

/// `W_q` in backend `T`.
pub fn transfer_table<T: Lift>(
    r: &RestrictionMatrix,
    spec: &InteractionSpec,
    q: usize,
    mode: Mode,
) -> Result<TransferTable<T>> {
    let mut rec = Recursion::<T>::new(r, spec, mode)?;
    for _ in 0..q {
        rec.advance();
    }
    Ok(rec.into_table())
}

/// `Z_n` with its natural log and, in the exact backend, its exact value.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult {
    pub n: usize,
    pub log_z: f64,
    pub exact_z: Option<BigRational>,
    pub mode: Mode,
    pub backend: Backend,
    /// When `Z_n = 0`: the first depth at which admissibility died.
    pub dead_depth: Option<usize>,
}

impl PartitionResult {
    pub fn is_zero(&self) -> bool {
        self.log_z == f64::NEG_INFINITY
    }
}

fn make_result<T: Lift>(n: usize, z: &T, mode: Mode, dead: Option<usize>) -> PartitionResult {
    let exact_z = z.exact_value();
    let log_z = match &exact_z {
        Some(q) => ln_rational(q),
        None => z.ln(),
    };
    let dead_depth = if log_z == f64::NEG_INFINITY { Some(dead.unwrap_or(n)) } else { None };
    PartitionResult { n, log_z, exact_z, mode, backend: T::BACKEND, dead_depth }
}

fn partition_generic<T: Lift>(
    r: &RestrictionMatrix,
    spec: &InteractionSpec,
    n: usize,
    mode: Mode,
) -> Result<PartitionResult> {
    let mut rec = Recursion::<T>::new(r, spec, mode)?;
    if n == 0 {
        let dead = rec.table().dead_depth;
        return Ok(make_result(0, &rec.root_only(), mode, dead));
    }
    for _ in 0..n - 1 {
        rec.advance();
    }
    let z = rec.next_partition();
    Ok(make_result(n, &z, mode, rec.table().dead_depth))
}

/// `Z_n = Σ_x w(x(ε)) Π_edges E(x(g), x(h))` over patterns on `Δ_n`.
pub fn partition_function(
    r: &RestrictionMatrix,
    spec: &InteractionSpec,
    n: usize,
    mode: Mode,
    backend: Backend,
) -> Result<PartitionResult> {
    match backend {
        Backend::Exact => partition_generic::<BigRational>(r, spec, n, mode),
        Backend::Log => partition_generic::<LogReal>(r, spec, n, mode),
    }
}

/// `P_n = ln Z_n / |Δ_n|`.
pub fn pressure(
    r: &RestrictionMatrix,
    spec: &InteractionSpec,
    n: usize,
    mode: Mode,
    backend: Backend,
) -> Result<f64> {
    let z = partition_function(r, spec, n, mode, backend)?;
    if let Some(depth) = z.dead_depth {
        return Err(Error::EmptySystem { depth });
    }
    let counts = level_counts(r, n);
    Ok(z.log_z / biguint_to_f64(&counts.delta[n]))
}

/// One depth of a pressure series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRecord {
    pub n: usize,
    pub l: BigUint,
    pub delta: BigUint,
    pub log_z: f64,
    pub exact_z: Option<BigRational>,
    pub pressure: f64,
    /// `(ln|w| + Σ_{m<=n} L[m] ln s) / |Δ_n|`, the pre-limit upper estimate.
    pub upper_estimate: f64,
}

impl SeriesRecord {
    /// `L[n] / Δ[n]`.
    pub fn ratio(&self) -> f64 {
        crate::numeric::ratio_to_f64(&self.l, &self.delta)
    }
}

/// `P_0, .., P_{n_max}` with level counts, from one incrementally advanced table.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureSeries {
    pub records: Vec<SeriesRecord>,
    pub mode: Mode,
    pub backend: Backend,
}

impl PressureSeries {
    pub fn last(&self) -> &SeriesRecord {
        self.records.last().expect("series has at least one record")
    }
}

/// `(ln|w| + Σ_{m=1..n} L[m] · ln s) / Δ[n]`.
pub fn pre_limit_upper(spec: &InteractionSpec, counts: &LevelCounts, n: usize) -> f64 {
    let delta = &counts.delta[n];
    let interior = delta - 1u32;
    (spec.log_w_norm() + biguint_to_f64(&interior) * spec.log_s()) / biguint_to_f64(delta)
}

fn series_generic<T: Lift>(
    r: &RestrictionMatrix,
    spec: &InteractionSpec,
    n_max: usize,
    mode: Mode,
) -> Result<PressureSeries> {
    let counts = level_counts(r, n_max);
    let mut rec = Recursion::<T>::new(r, spec, mode)?;
    let mut records = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let z = if n == 0 { rec.root_only() } else { rec.advance() };
        let dead = rec.table().dead_depth;
        let res = make_result(n, &z, mode, dead);
        if let Some(depth) = res.dead_depth {
            return Err(Error::EmptySystem { depth });
        }
        let delta = counts.delta[n].clone();
        records.push(SeriesRecord {
            n,
            l: counts.l[n].clone(),
            pressure: res.log_z / biguint_to_f64(&delta),
            delta,
            log_z: res.log_z,
            exact_z: res.exact_z,
            upper_estimate: pre_limit_upper(spec, &counts, n),
        });
    }
    Ok(PressureSeries { records, mode, backend: T::BACKEND })
}

/// Per-depth `(L[n], Δ[n], ln Z_n, P_n)` for `n = 0..=n_max`.
pub fn pressure_series(
    r: &RestrictionMatrix,
    spec: &InteractionSpec,
    n_max: usize,
    mode: Mode,
    backend: Backend,
) -> Result<PressureSeries> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("pressure series needs n_max >= 1".into()));
    }
    match backend {
        Backend::Exact => series_generic::<BigRational>(r, spec, n_max, mode),
        Backend::Log => series_generic::<LogReal>(r, spec, n_max, mode),
    }
}
