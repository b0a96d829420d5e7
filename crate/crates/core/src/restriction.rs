//! Restriction matrices `R` and the restricted trees `S(k, R)` they carve out
//! of the full rooted `k`-tree.
//!
//! A vertex is a generator string; its *type* is its last generator. A vertex
//! of type `t` has one child of type `u` for every `u` with `R[t][u] = 1`. The
//! root has one child of every type.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Square 0/1 matrix with `k >= 1` rows, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RestrictionMatrix {
    k: usize,
    entries: Vec<bool>,
}

impl RestrictionMatrix {
    /// Builds a matrix from rows of 0/1 integers.
    pub fn from_rows<T>(rows: &[Vec<T>]) -> Result<Self>
    where
        T: Copy + Into<i64>,
    {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidDimension("restriction matrix must have k >= 1".into()));
        }
        let mut entries = Vec::with_capacity(k * k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidDimension(format!(
                    "row {} has length {}, expected {}",
                    i,
                    row.len(),
                    k
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                match v.into() {
                    0 => entries.push(false),
                    1 => entries.push(true),
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "entry ({}, {}) is {}, expected 0 or 1",
                            i, j, other
                        )))
                    }
                }
            }
        }
        Ok(Self { k, entries })
    }

    fn from_fn(k: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut entries = Vec::with_capacity(k * k);
        for i in 0..k {
            for j in 0..k {
                entries.push(f(i, j));
            }
        }
        Self { k, entries }
    }

    /// The all-ones matrix: the free semigroup on `k` generators.
    pub fn full(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDimension("full tree needs k >= 1".into()));
        }
        Ok(Self::from_fn(k, |_, _| true))
    }

    /// Generalized Fibonacci tree `R(k, r)`: entry `(i, j)` (1-based) is zero
    /// iff both `i > k - r` and `j > k - r`.
    pub fn generalized_fibonacci(k: usize, r: i64) -> Result<Self> {
        check_fibonacci_params(k, r)?;
        let free = k - r as usize;
        Ok(Self::from_fn(k, |i, j| !(i >= free && j >= free)))
    }

    /// `period` blocks of `block` generators each; block `b` may only be
    /// followed by block `b + 1 (mod period)`, with every succession inside
    /// that pair allowed. Irreducible with period `period` and Perron value
    /// `block`.
    pub fn block_cyclic(period: usize, block: usize) -> Result<Self> {
        if period == 0 || block == 0 {
            return Err(Error::InvalidDimension("block-cyclic matrix needs period, block >= 1".into()));
        }
        let k = period * block;
        Ok(Self::from_fn(k, |i, j| (i / block + 1) % period == j / block))
    }

    /// Cyclic permutation `1 -> 2 -> ... -> k -> 1`.
    pub fn cycle(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDimension("cycle needs k >= 1".into()));
        }
        Ok(Self::from_fn(k, |i, j| (i + 1) % k == j))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.entries[i * self.k + j]
    }

    /// Child types of a vertex of type `t`, ascending.
    pub fn successors(&self, t: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.k).filter(move |&u| self.get(t, u))
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.k)
            .map(|i| (0..self.k).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }

    /// Same matrix with row/column order permuted: new index `perm[i]` holds old `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self { k: self.k, entries: vec![false; self.k * self.k] };
        for i in 0..self.k {
            for j in 0..self.k {
                out.entries[perm[i] * self.k + perm[j]] = self.get(i, j);
            }
        }
        out
    }

    fn edge_count(&self) -> usize {
        self.entries.iter().filter(|&&e| e).count()
    }
}

impl fmt::Debug for RestrictionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R{:?}", self.to_rows())
    }
}

fn check_fibonacci_params(k: usize, r: i64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidDimension("fibonacci tree needs k >= 1".into()));
    }
    if r < 0 || r >= k as i64 {
        return Err(Error::InvalidParameter(format!(
            "fibonacci tree needs 0 <= r <= k-1, got k={}, r={}",
            k, r
        )));
    }
    Ok(())
}

/// Structural class of a nonnegative square matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Primitive,
    /// Irreducible but not primitive; `period >= 2`.
    Irreducible { period: usize },
    Reducible,
}

impl Classification {
    pub fn period(&self) -> Option<usize> {
        match self {
            Classification::Primitive => Some(1),
            Classification::Irreducible { period } => Some(*period),
            Classification::Reducible => None,
        }
    }

    pub fn is_irreducible(&self) -> bool {
        !matches!(self, Classification::Reducible)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Classification::Primitive => "primitive",
            Classification::Irreducible { .. } => "irreducible",
            Classification::Reducible => "reducible",
        }
    }
}

fn bfs(r: &RestrictionMatrix, reverse: bool) -> Vec<Option<usize>> {
    let k = r.k();
    let mut dist = vec![None; k];
    let mut queue = VecDeque::new();
    dist[0] = Some(0);
    queue.push_back(0);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for v in 0..k {
            let edge = if reverse { r.get(v, u) } else { r.get(u, v) };
            if edge && dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

fn is_strongly_connected(r: &RestrictionMatrix) -> bool {
    bfs(r, false).iter().all(Option::is_some) && bfs(r, true).iter().all(Option::is_some)
}

/// BFS distances from generator 0. Only meaningful for irreducible `r`.
fn distances(r: &RestrictionMatrix) -> Vec<usize> {
    bfs(r, false).into_iter().map(|d| d.expect("strongly connected")).collect()
}

/// gcd over all edges `(u, v)` of `dist(u) + 1 - dist(v)`.
fn period_from_distances(r: &RestrictionMatrix, dist: &[usize]) -> usize {
    let k = r.k();
    let mut g = 0usize;
    for u in 0..k {
        for v in r.successors(u) {
            let diff = (dist[u] as i64 + 1 - dist[v] as i64).unsigned_abs() as usize;
            g = g.gcd(&diff);
        }
    }
    g
}

fn bool_mul(a: &[bool], b: &[bool], k: usize) -> Vec<bool> {
    let mut out = vec![false; k * k];
    for i in 0..k {
        for l in 0..k {
            if a[i * k + l] {
                for j in 0..k {
                    out[i * k + j] |= b[l * k + j];
                }
            }
        }
    }
    out
}

/// Wielandt bound `k^2 - 2k + 2` on the smallest positive power of a primitive matrix.
pub fn wielandt_bound(k: usize) -> usize {
    k * k + 2 - 2 * k
}

/// True iff some power `R^m` with `m <= k^2 - 2k + 2` is entrywise positive.
pub fn is_primitive_by_powers(r: &RestrictionMatrix) -> bool {
    let k = r.k();
    let mut power = r.entries.clone();
    for _ in 1..=wielandt_bound(k) {
        if power.iter().all(|&e| e) {
            return true;
        }
        power = bool_mul(&power, &r.entries, k);
    }
    false
}

/// Classifies `r` as primitive, irreducible with period `p >= 2`, or reducible.
///
/// A matrix with no nonzero entry (only possible as `[[0]]` among strongly
/// connected ones) is reducible.
pub fn classify(r: &RestrictionMatrix) -> Classification {
    if r.edge_count() == 0 || !is_strongly_connected(r) {
        return Classification::Reducible;
    }
    let period = period_from_distances(r, &distances(r));
    if is_primitive_by_powers(r) {
        debug_assert_eq!(period, 1);
        Classification::Primitive
    } else {
        debug_assert!(period >= 2);
        Classification::Irreducible { period }
    }
}

fn require_irreducible(r: &RestrictionMatrix) -> Result<Classification> {
    let class = classify(r);
    if class == Classification::Reducible {
        return Err(Error::Hypothesis(format!("restriction matrix {:?} is reducible", r)));
    }
    Ok(class)
}

/// Residue table `t(i, j)`: every walk `i -> j` has length `≡ t(i, j) (mod p)`.
pub fn residue_table(r: &RestrictionMatrix) -> Result<Vec<Vec<usize>>> {
    let class = require_irreducible(r)?;
    let p = class.period().unwrap();
    let dist = distances(r);
    let k = r.k();
    Ok((0..k)
        .map(|i| (0..k).map(|j| (dist[j] + p * k - dist[i]) % p).collect())
        .collect())
}

/// Checks `(R^m)_{ij} > 0 ⇒ m ≡ t(i, j) (mod p)` for every `0 <= m <= horizon`.
pub fn residue_table_consistent(
    r: &RestrictionMatrix,
    table: &[Vec<usize>],
    period: usize,
    horizon: usize,
) -> bool {
    let k = r.k();
    let mut power: Vec<bool> = (0..k * k).map(|x| x / k == x % k).collect();
    for m in 0..=horizon {
        for i in 0..k {
            for j in 0..k {
                if power[i * k + j] && m % period != table[i][j] {
                    return false;
                }
            }
        }
        power = bool_mul(&power, &r.entries, k);
    }
    true
}

/// Perron data of an irreducible restriction matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralInfo {
    pub lambda: f64,
    /// Right Perron vector, unit sum.
    pub right_vec: Vec<f64>,
    /// Left Perron vector, scaled so `left · right = 1`.
    pub left_vec: Vec<f64>,
    pub class: Classification,
    pub period: usize,
    pub residue_table: Vec<Vec<usize>>,
    pub iterations: usize,
}

const POWER_TOL: f64 = 1e-14;
const POWER_MAX_ITER: usize = 100_000;
const VECTOR_TOL: f64 = 1e-14;

/// Power iteration on `R + I` (or its transpose). Returns the Perron value of
/// `R + I`, the unit-sum Perron vector, and the number of iterations used.
fn shifted_power_iteration(r: &RestrictionMatrix, transpose: bool) -> (f64, Vec<f64>, usize) {
    let k = r.k();
    let mut x = vec![1.0 / k as f64; k];
    let mut y = vec![0.0; k];
    let mut mu_prev = f64::NAN;
    let mut iterations = 0;
    for it in 1..=POWER_MAX_ITER {
        iterations = it;
        for i in 0..k {
            let mut acc = x[i];
            for j in 0..k {
                let e = if transpose { r.get(j, i) } else { r.get(i, j) };
                if e {
                    acc += x[j];
                }
            }
            y[i] = acc;
        }
        let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let xx: f64 = x.iter().map(|a| a * a).sum();
        let mu = xy / xx;
        let norm: f64 = y.iter().sum();
        let mut shift = 0.0f64;
        for (xi, yi) in x.iter_mut().zip(&y) {
            let next = yi / norm;
            shift = shift.max((next - *xi).abs());
            *xi = next;
        }
        // The quotient settles quadratically for symmetric R, long before the
        // vector does, so both must be still.
        if (mu - mu_prev).abs() < POWER_TOL * mu && shift < VECTOR_TOL {
            return (mu, x, iterations);
        }
        mu_prev = mu;
    }
    (mu_prev, x, iterations)
}

/// Perron eigenvalue, eigenvectors, class, period and residue table of `r`.
///
/// Reducible input is rejected.
pub fn spectral(r: &RestrictionMatrix) -> Result<SpectralInfo> {
    let class = require_irreducible(r)?;
    let (mu, right, it_right) = shifted_power_iteration(r, false);
    let (_, mut left, it_left) = shifted_power_iteration(r, true);
    let dot: f64 = left.iter().zip(&right).map(|(a, b)| a * b).sum();
    for l in left.iter_mut() {
        *l /= dot;
    }
    Ok(SpectralInfo {
        lambda: mu - 1.0,
        right_vec: right,
        left_vec: left,
        class,
        period: class.period().unwrap(),
        residue_table: residue_table(r)?,
        iterations: it_right.max(it_left),
    })
}

/// Exact vertex counts per level (`l`) and per ball (`delta`) of `S(k, R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCounts {
    pub l: Vec<BigUint>,
    pub delta: Vec<BigUint>,
}

impl LevelCounts {
    pub fn n_max(&self) -> usize {
        self.l.len() - 1
    }
}

/// `L[n] = |R^{n-1}|` for `n >= 1`, `L[0] = 1`, and `Δ[n] = Σ_{m <= n} L[m]`,
/// in exact integers.
pub fn level_counts(r: &RestrictionMatrix, n_max: usize) -> LevelCounts {
    let k = r.k();
    let mut l = Vec::with_capacity(n_max + 1);
    let mut delta = Vec::with_capacity(n_max + 1);
    l.push(BigUint::one());
    delta.push(BigUint::one());
    // by_type[u] = number of level-n vertices of type u
    let mut by_type = vec![BigUint::one(); k];
    for n in 1..=n_max {
        if n > 1 {
            let mut next = vec![BigUint::zero(); k];
            for (t, count) in by_type.iter().enumerate() {
                if count.is_zero() {
                    continue;
                }
                for u in r.successors(t) {
                    next[u] += count;
                }
            }
            by_type = next;
        }
        let total: BigUint = by_type.iter().sum();
        let d = &delta[n - 1] + &total;
        l.push(total);
        delta.push(d);
    }
    LevelCounts { l, delta }
}

/// Closed-form Perron value of `R(k, r)`: `(k - r + sqrt((k - r)(k + 3r))) / 2`.
pub fn fibonacci_lambda(k: usize, r: usize) -> f64 {
    let (k, r) = (k as f64, r as f64);
    (k - r + ((k - r) * (k + 3.0 * r)).sqrt()) / 2.0
}

/// The 2×2 free/restricted vertex-count recursion for `R(k, r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapsedFibonacci {
    pub k: usize,
    pub r: usize,
    /// `[[k - r, k - r], [r, 0]]`
    pub matrix: [[u64; 2]; 2],
    pub lambda: f64,
}

impl CollapsedFibonacci {
    /// `u_n + v_n` for `n = 0..=n_max`, starting from `(u_0, v_0) = (1, 0)`.
    /// The root has all `k` children, like a free vertex, so this equals `L[n]`.
    pub fn sequence(&self, n_max: usize) -> Vec<BigUint> {
        let m = self.matrix;
        let mut u = BigUint::one();
        let mut v = BigUint::zero();
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(&u + &v);
        for _ in 0..n_max {
            let nu = &u * m[0][0] + &v * m[0][1];
            let nv = &u * m[1][0] + &v * m[1][1];
            u = nu;
            v = nv;
            out.push(&u + &v);
        }
        out
    }
}

/// Collapsed 2×2 matrix and closed-form Perron value for `R(k, r)`.
pub fn collapsed_fibonacci(k: usize, r: i64) -> Result<CollapsedFibonacci> {
    check_fibonacci_params(k, r)?;
    let r = r as usize;
    let free = (k - r) as u64;
    Ok(CollapsedFibonacci {
        k,
        r,
        matrix: [[free, free], [r as u64, 0]],
        lambda: fibonacci_lambda(k, r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u8]]) -> RestrictionMatrix {
        RestrictionMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn full_tree_entries() {
        assert_eq!(RestrictionMatrix::full(2).unwrap().to_rows(), vec![vec![1, 1], vec![1, 1]]);
        assert_eq!(RestrictionMatrix::full(1).unwrap().to_rows(), vec![vec![1]]);
        let f4 = RestrictionMatrix::full(4).unwrap();
        assert!(f4.to_rows().iter().flatten().all(|&e| e == 1));
        assert!(matches!(RestrictionMatrix::full(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn fibonacci_entries() {
        assert_eq!(
            RestrictionMatrix::generalized_fibonacci(2, 1).unwrap().to_rows(),
            vec![vec![1, 1], vec![1, 0]]
        );
        assert_eq!(
            RestrictionMatrix::generalized_fibonacci(3, 0).unwrap(),
            RestrictionMatrix::full(3).unwrap()
        );
        assert_eq!(
            RestrictionMatrix::generalized_fibonacci(3, 2).unwrap().to_rows(),
            vec![vec![1, 1, 1], vec![1, 0, 0], vec![1, 0, 0]]
        );
        assert!(matches!(
            RestrictionMatrix::generalized_fibonacci(3, 3),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            RestrictionMatrix::generalized_fibonacci(3, -1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn from_rows_validation() {
        assert!(matches!(
            RestrictionMatrix::from_rows::<u8>(&[]),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(
            RestrictionMatrix::from_rows(&[vec![1u8, 0], vec![1]]),
            Err(Error::InvalidDimension(_))
        ));
        assert!(matches!(
            RestrictionMatrix::from_rows(&[vec![2u8]]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&m(&[&[1, 1], &[1, 0]])), Classification::Primitive);
        assert_eq!(
            classify(&RestrictionMatrix::cycle(3).unwrap()),
            Classification::Irreducible { period: 3 }
        );
        assert_eq!(classify(&m(&[&[1, 1], &[0, 1]])), Classification::Reducible);
        assert_eq!(classify(&m(&[&[0]])), Classification::Reducible);
        assert_eq!(classify(&m(&[&[1]])), Classification::Primitive);
        assert_eq!(
            classify(&RestrictionMatrix::block_cyclic(2, 3).unwrap()),
            Classification::Irreducible { period: 2 }
        );
    }

    #[test]
    fn spectral_examples() {
        let s = spectral(&RestrictionMatrix::full(3).unwrap()).unwrap();
        assert!((s.lambda - 3.0).abs() < 1e-12);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let s = spectral(&m(&[&[1, 1], &[1, 0]])).unwrap();
        assert!((s.lambda - phi).abs() < 1e-12);
        assert!((s.lambda - 1.618_03).abs() < 1e-5);
        let s = spectral(&RestrictionMatrix::generalized_fibonacci(5, 2).unwrap()).unwrap();
        assert!((s.lambda - (3.0 + 33f64.sqrt()) / 2.0).abs() < 1e-10);
        assert!((s.lambda - 4.372_28).abs() < 1e-5);
    }

    #[test]
    fn spectral_eigen_equations() {
        for r in [
            m(&[&[1, 1], &[1, 0]]),
            RestrictionMatrix::cycle(3).unwrap(),
            RestrictionMatrix::block_cyclic(3, 2).unwrap(),
            RestrictionMatrix::generalized_fibonacci(6, 4).unwrap(),
        ] {
            let s = spectral(&r).unwrap();
            let k = r.k();
            for i in 0..k {
                let rv: f64 = r.successors(i).map(|j| s.right_vec[j]).sum();
                assert!((rv - s.lambda * s.right_vec[i]).abs() < 1e-10, "{:?} {:?}", r, s);
                let lv: f64 = (0..k).filter(|&j| r.get(j, i)).map(|j| s.left_vec[j]).sum();
                assert!((lv - s.lambda * s.left_vec[i]).abs() < 1e-10, "{:?}", r);
                assert!(s.right_vec[i] > 0.0 && s.left_vec[i] > 0.0);
            }
            let dot: f64 = s.left_vec.iter().zip(&s.right_vec).map(|(a, b)| a * b).sum();
            assert!((dot - 1.0).abs() < 1e-12);
            assert!((s.right_vec.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_rejects_reducible() {
        assert!(matches!(spectral(&m(&[&[1, 1], &[0, 1]])), Err(Error::Hypothesis(_))));
        assert!(matches!(residue_table(&m(&[&[1, 1], &[0, 1]])), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn residue_tables() {
        let t = residue_table(&m(&[&[1, 1], &[1, 0]])).unwrap();
        assert_eq!(t, vec![vec![0, 0], vec![0, 0]]);
        let t = residue_table(&RestrictionMatrix::cycle(3).unwrap()).unwrap();
        assert_eq!(t[0][1], 1);
        assert_eq!(t[0][2], 2);
        assert_eq!(t[0][0], 0);
        assert!(residue_table_consistent(&RestrictionMatrix::cycle(3).unwrap(), &t, 3, 27));
    }

    #[test]
    fn level_count_examples() {
        let c = level_counts(&RestrictionMatrix::full(2).unwrap(), 3);
        assert_eq!(c.l, big(&[1, 2, 4, 8]));
        assert_eq!(c.delta, big(&[1, 3, 7, 15]));
        let c = level_counts(&m(&[&[1, 1], &[1, 0]]), 3);
        assert_eq!(c.l, big(&[1, 2, 3, 5]));
        assert_eq!(c.delta, big(&[1, 3, 6, 11]));
        let c = level_counts(&m(&[&[1]]), 0);
        assert_eq!(c.l, big(&[1]));
    }

    #[test]
    fn collapsed_examples() {
        let c = collapsed_fibonacci(2, 1).unwrap();
        assert_eq!(c.matrix, [[1, 1], [1, 0]]);
        assert!((c.lambda - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        let c = collapsed_fibonacci(3, 1).unwrap();
        assert_eq!(c.matrix, [[2, 2], [1, 0]]);
        assert!((c.lambda - (1.0 + 3f64.sqrt())).abs() < 1e-14);
        assert!((c.lambda - 2.732_05).abs() < 1e-5);
        let c = collapsed_fibonacci(5, 0).unwrap();
        assert_eq!(c.matrix, [[5, 5], [0, 0]]);
        assert_eq!(c.lambda, 5.0);
        assert!(collapsed_fibonacci(3, 3).is_err());
    }
}
