//! Alphabet, pair interactions `A`, site energies `w` and the derived
//! interaction matrix `E(i, j) = a_ij * w_j`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{ln_rational, log_add_exp, rational_to_f64};

/// An input entry: exact when it came from an integer, decimal or `p/q` literal.
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Real(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Real(x) => *x,
        }
    }

    fn exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(q) => Some(q),
            Scalar::Real(_) => None,
        }
    }

    fn ln(&self) -> f64 {
        match self {
            Scalar::Exact(q) => ln_rational(q),
            Scalar::Real(x) => x.ln(),
        }
    }

    fn is_negative(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_negative(),
            Scalar::Real(x) => *x < 0.0 || x.is_nan(),
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_positive(),
            Scalar::Real(x) => *x > 0.0,
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{}", q),
            Scalar::Real(x) => write!(f, "{}", x),
        }
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(v.into()))
    }
}

impl From<BigRational> for Scalar {
    fn from(v: BigRational) -> Self {
        Scalar::Exact(v)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Real(v)
    }
}

/// Exact-rational view of a spec, present when every input was rational.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactView {
    pub a: Vec<Vec<BigRational>>,
    pub w: Vec<BigRational>,
    pub e: Vec<Vec<BigRational>>,
    pub s: BigRational,
}

/// A validated interaction on the alphabet `{0, .., d-1}` (1-based in prose).
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionSpec {
    d: usize,
    a: Vec<Vec<f64>>,
    w: Vec<f64>,
    e: Vec<Vec<f64>>,
    log_w: Vec<f64>,
    log_e: Vec<Vec<f64>>,
    exact: Option<ExactView>,
    s: f64,
    log_s: f64,
    argmax: Vec<usize>,
    essential: Vec<usize>,
    predecessor_closed: Vec<usize>,
}

/// Pair potential `phi` (entries may be `-inf`) and site potential `chi`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub phi: Vec<Vec<f64>>,
    pub chi: Vec<f64>,
}

// Relative tolerance for calling two floating row sums tied.
const TIE_RTOL: f64 = 1e-12;

/// Largest `T ⊆ alive` such that every `i ∈ T` has an edge into `T`
/// (`forward`) or from `T` (`!forward`).
fn prune(support: &[Vec<bool>], mut alive: Vec<bool>, forward: bool) -> Vec<bool> {
    let d = support.len();
    loop {
        let mut changed = false;
        for i in 0..d {
            if !alive[i] {
                continue;
            }
            let ok = (0..d).any(|j| alive[j] && if forward { support[i][j] } else { support[j][i] });
            if !ok {
                alive[i] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

fn indices(mask: &[bool]) -> Vec<usize> {
    mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
}

/// Fixed point of deleting symbols whose `E`-row, restricted to survivors, is zero.
pub fn essential_from_support(support: &[Vec<bool>], within: &[bool]) -> Vec<usize> {
    indices(&prune(support, within.to_vec(), true))
}

impl InteractionSpec {
    /// Validates `A >= 0`, `w > 0` and builds `E`, `s` and the essential alphabet.
    pub fn build(a: &[Vec<Scalar>], w: &[Scalar]) -> Result<Self> {
        let d = w.len();
        if d == 0 {
            return Err(Error::InvalidDimension("alphabet must be nonempty".into()));
        }
        if a.len() != d || a.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidDimension(format!("A must be {}x{} to match w", d, d)));
        }
        for (i, row) in a.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() || !v.to_f64().is_finite() {
                    return Err(Error::Domain(format!("A[{}][{}] = {:?} is not a finite nonnegative value", i, j, v)));
                }
            }
        }
        for (j, v) in w.iter().enumerate() {
            if !v.is_positive() || !v.to_f64().is_finite() {
                return Err(Error::Domain(format!("w[{}] = {:?} is not a finite positive value", j, v)));
            }
        }

        let exact = build_exact(a, w);
        let a_f: Vec<Vec<f64>> = a.iter().map(|row| row.iter().map(Scalar::to_f64).collect()).collect();
        let w_f: Vec<f64> = w.iter().map(Scalar::to_f64).collect();
        let log_w: Vec<f64> = w.iter().map(Scalar::ln).collect();
        let log_e: Vec<Vec<f64>> = match &exact {
            Some(x) => x.e.iter().map(|row| row.iter().map(ln_rational).collect()).collect(),
            None => (0..d)
                .map(|i| (0..d).map(|j| a[i][j].ln() + log_w[j]).collect())
                .collect(),
        };
        Self::assemble(d, a_f, w_f, log_w, log_e, exact)
    }

    /// Builds from pair and site potentials: `a_ij = exp(phi)`, `w_j = exp(chi)`.
    ///
    /// The exact view is kept only when every `phi` is `0` or `-inf` and every
    /// `chi` is `0`, the cases where the exponentials are exactly rational.
    pub fn from_potentials(p: &PotentialSpec) -> Result<Self> {
        let d = p.chi.len();
        if d == 0 {
            return Err(Error::InvalidDimension("alphabet must be nonempty".into()));
        }
        if p.phi.len() != d || p.phi.iter().any(|row| row.len() != d) {
            return Err(Error::InvalidDimension(format!("phi must be {}x{} to match chi", d, d)));
        }
        for (j, c) in p.chi.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::Domain(format!("chi[{}] = {} must be finite", j, c)));
            }
        }
        for (i, row) in p.phi.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_nan() || *v == f64::INFINITY {
                    return Err(Error::Domain(format!("phi[{}][{}] = {} must be finite or -inf", i, j, v)));
                }
            }
        }
        let trivial = p.chi.iter().all(|&c| c == 0.0)
            && p.phi.iter().flatten().all(|&v| v == 0.0 || v == f64::NEG_INFINITY);
        if trivial {
            let a: Vec<Vec<Scalar>> = p
                .phi
                .iter()
                .map(|row| row.iter().map(|&v| Scalar::from((v == 0.0) as i64)).collect())
                .collect();
            let w: Vec<Scalar> = vec![Scalar::from(1); d];
            return Self::build(&a, &w);
        }
        let a_f: Vec<Vec<f64>> = p.phi.iter().map(|row| row.iter().map(|v| v.exp()).collect()).collect();
        let w_f: Vec<f64> = p.chi.iter().map(|c| c.exp()).collect();
        let log_e: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..d).map(|j| p.phi[i][j] + p.chi[j]).collect())
            .collect();
        Self::assemble(d, a_f, w_f, p.chi.clone(), log_e, None)
    }

    fn assemble(
        d: usize,
        a: Vec<Vec<f64>>,
        w: Vec<f64>,
        log_w: Vec<f64>,
        log_e: Vec<Vec<f64>>,
        exact: Option<ExactView>,
    ) -> Result<Self> {
        let e: Vec<Vec<f64>> = (0..d).map(|i| (0..d).map(|j| a[i][j] * w[j]).collect()).collect();
        let support: Vec<Vec<bool>> = match &exact {
            Some(x) => x.e.iter().map(|row| row.iter().map(|v| !v.is_zero()).collect()).collect(),
            None => log_e.iter().map(|row| row.iter().map(|&v| v > f64::NEG_INFINITY).collect()).collect(),
        };
        if support.iter().all(|row| row.iter().all(|&b| !b)) {
            return Err(Error::DegenerateInteraction);
        }

        let log_row: Vec<f64> = log_e
            .iter()
            .map(|row| row.iter().fold(f64::NEG_INFINITY, |acc, &v| log_add_exp(acc, v)))
            .collect();
        let (log_s, argmax) = match &exact {
            Some(x) => {
                let sums: Vec<BigRational> = x.e.iter().map(|row| row.iter().sum()).collect();
                let argmax = (0..d).filter(|&i| sums[i] == x.s).collect();
                (ln_rational(&x.s), argmax)
            }
            None => {
                let best = log_row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let argmax = (0..d)
                    .filter(|&i| (log_row[i] - best).abs() <= TIE_RTOL * best.abs().max(1.0))
                    .collect();
                (best, argmax)
            }
        };
        let s = match &exact {
            Some(x) => rational_to_f64(&x.s),
            None => log_s.exp(),
        };

        let all = vec![true; d];
        let essential = indices(&prune(&support, all.clone(), true));
        let predecessor_closed = indices(&prune(&support, all, false));
        Ok(Self {
            d,
            a,
            w,
            e,
            log_w,
            log_e,
            exact,
            s,
            log_s,
            argmax,
            essential,
            predecessor_closed,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    /// `E(i, j) = a_ij * w_j` as floats.
    pub fn e(&self) -> &[Vec<f64>] {
        &self.e
    }

    pub fn log_e(&self) -> &[Vec<f64>] {
        &self.log_e
    }

    pub fn log_w(&self) -> &[f64] {
        &self.log_w
    }

    pub fn exact(&self) -> Option<&ExactView> {
        self.exact.as_ref()
    }

    /// Maximum row sum of `E`.
    pub fn max_row_sum(&self) -> f64 {
        self.s
    }

    pub fn log_s(&self) -> f64 {
        self.log_s
    }

    /// Every row index attaining the maximum row sum.
    pub fn argmax_rows(&self) -> &[usize] {
        &self.argmax
    }

    /// Symbols with an infinite forward continuation under the support of `E`.
    pub fn essential_alphabet(&self) -> &[usize] {
        &self.essential
    }

    pub fn is_essential(&self, i: usize) -> bool {
        self.essential.binary_search(&i).is_ok()
    }

    /// `|w| = Σ_j w_j`.
    pub fn w_norm(&self) -> f64 {
        self.w.iter().sum()
    }

    /// `ln |w|`, exact-input aware.
    pub fn log_w_norm(&self) -> f64 {
        match &self.exact {
            Some(x) => ln_rational(&x.w.iter().sum()),
            None => self.log_w.iter().fold(f64::NEG_INFINITY, |acc, &v| log_add_exp(acc, v)),
        }
    }

    /// True iff symbol `i` has predecessor chains `j_m -> ... -> j_1 -> i` of
    /// every length with positive interaction on every step.
    pub fn has_predecessor_chain(&self, i: usize) -> bool {
        self.predecessor_closed.binary_search(&i).is_ok()
    }

    /// True iff some maximizing row has predecessor chains of every length, so
    /// that the lower-bound labeling (the maximizing symbol on one row, its
    /// predecessors above it) exists at every depth.
    pub fn lower_bound_construction_available(&self) -> bool {
        self.argmax.iter().any(|&i| self.has_predecessor_chain(i))
    }

    pub fn support(&self) -> Vec<Vec<bool>> {
        self.log_e.iter().map(|row| row.iter().map(|&v| v > f64::NEG_INFINITY).collect()).collect()
    }
}

fn build_exact(a: &[Vec<Scalar>], w: &[Scalar]) -> Option<ExactView> {
    let a: Option<Vec<Vec<BigRational>>> = a
        .iter()
        .map(|row| row.iter().map(|v| v.exact().cloned()).collect())
        .collect();
    let w: Option<Vec<BigRational>> = w.iter().map(|v| v.exact().cloned()).collect();
    let (a, w) = (a?, w?);
    let e: Vec<Vec<BigRational>> = a
        .iter()
        .map(|row| row.iter().zip(&w).map(|(aij, wj)| aij * wj).collect())
        .collect();
    let s = e
        .iter()
        .map(|row| row.iter().sum::<BigRational>())
        .max()
        .expect("nonempty alphabet");
    Some(ExactView { a, w, e, s })
}

/// Shorthand for integer-valued specs.
pub fn integer_spec(a: &[&[i64]], w: &[i64]) -> Result<InteractionSpec> {
    let a: Vec<Vec<Scalar>> = a.iter().map(|row| row.iter().map(|&v| Scalar::from(v)).collect()).collect();
    let w: Vec<Scalar> = w.iter().map(|&v| Scalar::from(v)).collect();
    InteractionSpec::build(&a, &w)
}

/// The golden mean (hard-core) interaction on two symbols, `w = 1`.
pub fn golden_mean() -> InteractionSpec {
    integer_spec(&[&[1, 1], &[1, 0]], &[1, 1]).expect("valid")
}

/// Every labeling allowed with weight one on `d` symbols.
pub fn full_shift(d: usize) -> Result<InteractionSpec> {
    let a = vec![vec![Scalar::from(1); d]; d];
    let w = vec![Scalar::from(1); d];
    InteractionSpec::build(&a, &w)
}
