//! Brute-force ground truth: materialize `Δ_n` as explicit generator strings
//! and sum the weight of every labeling.
//!
//! Nothing here shares code with the level recursion in [`crate::transfer`];
//! the two are compared against each other in tests.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::interaction::{InteractionSpec, Scalar};
use crate::restriction::{level_counts, RestrictionMatrix};
use crate::transfer::Mode;

pub const DEFAULT_VERTEX_CAP: u64 = 1_000_000;
pub const DEFAULT_PATTERN_CAP: u64 = 10_000_000;
pub const CAP_ENV: &str = "TREEPRESSURE_CAP";

/// Size limits for enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub vertices: u64,
    pub patterns: u64,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self { vertices: DEFAULT_VERTEX_CAP, patterns: DEFAULT_PATTERN_CAP }
    }
}

impl OracleCaps {
    /// Defaults, with both caps replaced by `TREEPRESSURE_CAP` when it is set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(CAP_ENV) {
            Ok(v) => {
                let cap: u64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("{} must be a nonnegative integer, got {:?}", CAP_ENV, v)))?;
                Ok(Self { vertices: cap, patterns: cap })
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

/// `Δ_n` as explicit vertices in depth-major lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitTree {
    pub k: usize,
    pub n: usize,
    /// Generator strings, 0-based generator indices; the root is empty.
    pub vertices: Vec<Vec<usize>>,
    /// Parent index of each vertex (`None` for the root).
    pub parent: Vec<Option<usize>>,
}

impl ExplicitTree {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn height(&self, v: usize) -> usize {
        self.vertices[v].len()
    }

    /// Vertex count at each height `0..=n`.
    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n + 1];
        for v in &self.vertices {
            sizes[v.len()] += 1;
        }
        sizes
    }

    /// Child edges `(parent, child)` by vertex index.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent.iter().enumerate().filter_map(|(c, p)| p.map(|p| (p, c)))
    }

    /// One vertex per line: `ε` for the root, otherwise `g1g2...` (1-based).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            if v.is_empty() {
                out.push('ε');
            }
            for g in v {
                out.push_str(&format!("g{}", g + 1));
            }
            out.push('\n');
        }
        out
    }
}

/// Enumerates `Δ_n` of `S(k, R)` breadth-first, children in generator order.
pub fn enumerate_tree(r: &RestrictionMatrix, n: usize, caps: &OracleCaps) -> Result<ExplicitTree> {
    let size = &level_counts(r, n).delta[n];
    if size > &BigUint::from(caps.vertices) {
        return Err(Error::ResourceCap { what: "tree vertices", needed: size.to_string(), cap: caps.vertices });
    }
    let mut vertices: Vec<Vec<usize>> = vec![Vec::new()];
    let mut parent = vec![None];
    let mut level_start = 0;
    for _ in 0..n {
        let level_end = vertices.len();
        for p in level_start..level_end {
            let word = vertices[p].clone();
            for g in 0..r.k() {
                let allowed = match word.last() {
                    None => true,
                    Some(&last) => r.get(last, g),
                };
                if allowed {
                    let mut child = word.clone();
                    child.push(g);
                    vertices.push(child);
                    parent.push(Some(p));
                }
            }
        }
        level_start = level_end;
    }
    Ok(ExplicitTree { k: r.k(), n, vertices, parent })
}

/// Literal weight `w(x(ε)) · Π_edges E(x(g), x(h))` of one pattern.
pub fn pattern_weight(tree: &ExplicitTree, pattern: &[usize], spec: &InteractionSpec) -> Result<BigRational> {
    let exact = exact_view(spec)?;
    let mut weight = exact.w[pattern[0]].clone();
    for (p, c) in tree.edges() {
        weight *= &exact.e[pattern[p]][pattern[c]];
    }
    Ok(weight)
}

/// True iff every edge weight is positive and every height-`n` label is essential.
pub fn pattern_is_extendable(tree: &ExplicitTree, pattern: &[usize], spec: &InteractionSpec) -> bool {
    let support = spec.support();
    let edges_ok = tree.edges().all(|(p, c)| support[pattern[p]][pattern[c]]);
    let leaves_ok = (0..tree.len())
        .filter(|&v| tree.height(v) == tree.n)
        .all(|v| spec.is_essential(pattern[v]));
    edges_ok && leaves_ok
}

fn exact_view(spec: &InteractionSpec) -> Result<&crate::interaction::ExactView> {
    spec.exact()
        .ok_or_else(|| Error::BackendMismatch("brute force needs a rational interaction".into()))
}

fn check_pattern_cap(tree: &ExplicitTree, d: usize, caps: &OracleCaps) -> Result<()> {
    let patterns = num_traits::pow(BigUint::from(d), tree.len());
    if patterns > BigUint::from(caps.patterns) {
        return Err(Error::ResourceCap { what: "labelings", needed: patterns.to_string(), cap: caps.patterns });
    }
    Ok(())
}

/// Integer numerators over common denominators: `E = e_num / e_den`, `w = w_num / w_den`.
struct Scaled {
    e_num: Vec<Vec<BigUint>>,
    e_den: BigUint,
    w_num: Vec<BigUint>,
    w_den: BigUint,
}

fn scale(values: &[BigRational]) -> (Vec<BigUint>, BigUint) {
    let den = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let nums = values
        .iter()
        .map(|v| (v.numer() * (&den / v.denom())).to_biguint().expect("nonnegative"))
        .collect();
    (nums, den.to_biguint().unwrap())
}

fn scaled(spec: &InteractionSpec) -> Result<Scaled> {
    let exact = exact_view(spec)?;
    let d = spec.d();
    let flat: Vec<BigRational> = exact.e.iter().flatten().cloned().collect();
    let (e_flat, e_den) = scale(&flat);
    let e_num = e_flat.chunks(d).map(|c| c.to_vec()).collect();
    let (w_num, w_den) = scale(&exact.w);
    Ok(Scaled { e_num, e_den, w_num, w_den })
}

struct Enumerator<'a> {
    tree: &'a ExplicitTree,
    scaled: &'a Scaled,
    labels_at: Vec<Vec<usize>>,
    skip_zero: bool,
    pattern: Vec<usize>,
    total: BigUint,
}

impl Enumerator<'_> {
    fn visit(&mut self, v: usize, partial: &BigUint) {
        if v == self.tree.len() {
            self.total += partial;
            return;
        }
        let parent = self.tree.parent[v].expect("non-root");
        for idx in 0..self.labels_at[v].len() {
            let label = self.labels_at[v][idx];
            let factor = &self.scaled.e_num[self.pattern[parent]][label];
            if self.skip_zero && factor.is_zero() {
                continue;
            }
            self.pattern[v] = label;
            let next = partial * factor;
            self.visit(v + 1, &next);
        }
    }
}

/// Exact `Z_n` by summing over every labeling of `Δ_n`.
///
/// In extendable mode, labelings whose height-`n` labels are not all essential
/// are left out. With `skip_zero`, branches whose partial weight is already
/// zero are pruned; the total is unchanged because those terms vanish.
pub fn brute_force_partition_with(
    r: &RestrictionMatrix,
    spec: &InteractionSpec,
    n: usize,
    mode: Mode,
    caps: &OracleCaps,
    skip_zero: bool,
) -> Result<BigRational> {
    let scaled = scaled(spec)?;
    let tree = enumerate_tree(r, n, caps)?;
    check_pattern_cap(&tree, spec.d(), caps)?;
    let d = spec.d();
    let all: Vec<usize> = (0..d).collect();
    let labels_at: Vec<Vec<usize>> = (0..tree.len())
        .map(|v| match mode {
            Mode::Extendable if tree.height(v) == n => spec.essential_alphabet().to_vec(),
            _ => all.clone(),
        })
        .collect();
    let mut en = Enumerator {
        tree: &tree,
        scaled: &scaled,
        labels_at,
        skip_zero,
        pattern: vec![0; tree.len()],
        total: BigUint::zero(),
    };
    for idx in 0..en.labels_at[0].len() {
        let root = en.labels_at[0][idx];
        en.pattern[0] = root;
        let w = scaled.w_num[root].clone();
        en.visit(1, &w);
    }
    let edges = (tree.len() - 1) as u32;
    let den = &scaled.w_den * num_traits::pow(scaled.e_den.clone(), edges as usize);
    Ok(BigRational::new(BigInt::from(en.total), BigInt::from(den)))
}

/// [`brute_force_partition_with`] with zero-weight terms included.
pub fn brute_force_partition(
    r: &RestrictionMatrix,
    spec: &InteractionSpec,
    n: usize,
    mode: Mode,
    caps: &OracleCaps,
) -> Result<BigRational> {
    brute_force_partition_with(r, spec, n, mode, caps, false)
}

/// Random rational interaction: `a_ij = p/q` with `p ∈ 0..=4` (zero with
/// probability `zero_prob`), `q ∈ 1..=3`, and `w_j = p/q` with `p ∈ 1..=4`.
/// Resamples until the interaction is nondegenerate.
pub fn random_rational_spec<R: Rng>(d: usize, zero_prob: f64, rng: &mut R) -> InteractionSpec {
    loop {
        let a: Vec<Vec<Scalar>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        let p = if rng.gen_bool(zero_prob) { 0 } else { rng.gen_range(1..=4) };
                        Scalar::Exact(BigRational::new(p.into(), rng.gen_range(1i64..=3).into()))
                    })
                    .collect()
            })
            .collect();
        let w: Vec<Scalar> = (0..d)
            .map(|_| Scalar::Exact(BigRational::new(rng.gen_range(1i64..=4).into(), rng.gen_range(1i64..=3).into())))
            .collect();
        if let Ok(spec) = InteractionSpec::build(&a, &w) {
            return spec;
        }
    }
}

/// Random 0/1 restriction matrix whose `Δ_n` admits at most `budget` labelings
/// over `d` symbols.
pub fn random_small_restriction<R: Rng>(k: usize, n: usize, d: usize, budget: u64, rng: &mut R) -> RestrictionMatrix {
    loop {
        let rows: Vec<Vec<u8>> = (0..k).map(|_| (0..k).map(|_| rng.gen_bool(0.5) as u8).collect()).collect();
        let r = RestrictionMatrix::from_rows(&rows).expect("square 0/1");
        let size = level_counts(&r, n).delta[n].to_u32().unwrap_or(u32::MAX);
        if size < 64 && (d as f64).powi(size as i32) <= budget as f64 {
            return r;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::{full_shift, golden_mean, integer_spec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    /// Odometer over every labeling, scored with `pattern_weight` alone.
    fn odometer_partition(r: &RestrictionMatrix, spec: &InteractionSpec, n: usize, mode: Mode) -> BigRational {
        let tree = enumerate_tree(r, n, &OracleCaps::default()).unwrap();
        let d = spec.d();
        let mut pattern = vec![0usize; tree.len()];
        let mut total = BigRational::zero();
        loop {
            let keep = match mode {
                Mode::Local => true,
                Mode::Extendable => (0..tree.len())
                    .filter(|&v| tree.height(v) == n)
                    .all(|v| spec.is_essential(pattern[v])),
            };
            if keep {
                total += pattern_weight(&tree, &pattern, spec).unwrap();
            }
            let mut i = 0;
            loop {
                if i == pattern.len() {
                    return total;
                }
                pattern[i] += 1;
                if pattern[i] < d {
                    break;
                }
                pattern[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn tree_examples() {
        let caps = OracleCaps::default();
        let t = enumerate_tree(&RestrictionMatrix::full(2).unwrap(), 2, &caps).unwrap();
        assert_eq!(t.to_text(), "ε\ng1\ng2\ng1g1\ng1g2\ng2g1\ng2g2\n");
        let fib = RestrictionMatrix::generalized_fibonacci(2, 1).unwrap();
        let t = enumerate_tree(&fib, 2, &caps).unwrap();
        assert_eq!(t.len(), 6);
        assert!(!t.vertices.contains(&vec![1, 1]));
        let t = enumerate_tree(&fib, 0, &caps).unwrap();
        assert_eq!(t.vertices, vec![Vec::<usize>::new()]);
        let small = OracleCaps { vertices: 10, patterns: 10 };
        assert!(matches!(
            enumerate_tree(&RestrictionMatrix::full(3).unwrap(), 2, &small),
            Err(Error::ResourceCap { .. })
        ));
    }

    #[test]
    fn brute_force_examples() {
        let caps = OracleCaps::default();
        let full2 = RestrictionMatrix::full(2).unwrap();
        assert_eq!(brute_force_partition(&full2, &golden_mean(), 1, Mode::Local, &caps).unwrap(), q(5));
        let dead = integer_spec(&[&[1, 1], &[0, 0]], &[1, 1]).unwrap();
        assert_eq!(brute_force_partition(&full2, &dead, 1, Mode::Local, &caps).unwrap(), q(4));
        assert_eq!(brute_force_partition(&full2, &dead, 1, Mode::Extendable, &caps).unwrap(), q(1));
        assert_eq!(
            brute_force_partition(&full2, &full_shift(2).unwrap(), 2, Mode::Extendable, &caps).unwrap(),
            q(128)
        );
        assert_eq!(brute_force_partition(&full2, &golden_mean(), 2, Mode::Local, &caps).unwrap(), q(41));
    }

    #[test]
    fn brute_force_caps() {
        let caps = OracleCaps::default();
        let r = RestrictionMatrix::full(3).unwrap();
        assert!(matches!(
            brute_force_partition(&r, &golden_mean(), 3, Mode::Local, &caps),
            Err(Error::ResourceCap { what: "labelings", .. })
        ));
    }

    #[test]
    fn extendable_predicate_examples() {
        let caps = OracleCaps::default();
        let full2 = RestrictionMatrix::full(2).unwrap();
        let t = enumerate_tree(&full2, 1, &caps).unwrap();
        let g = golden_mean();
        assert!(!pattern_is_extendable(&t, &[1, 1, 0], &g));
        assert!(pattern_is_extendable(&t, &[0, 0, 0], &g));
        let dead = integer_spec(&[&[1, 1], &[0, 0]], &[1, 1]).unwrap();
        assert!(!pattern_is_extendable(&t, &[0, 0, 1], &dead));
    }

    #[test]
    fn enumerator_matches_odometer_and_zero_skip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let d = rng.gen_range(1..=3);
            let k = rng.gen_range(1..=3);
            let n = rng.gen_range(0..=2);
            let r = random_small_restriction(k, n, d, 5_000, &mut rng);
            let spec = random_rational_spec(d, 0.3, &mut rng);
            for mode in [Mode::Local, Mode::Extendable] {
                let caps = OracleCaps::default();
                let full = brute_force_partition_with(&r, &spec, n, mode, &caps, false).unwrap();
                let pruned = brute_force_partition_with(&r, &spec, n, mode, &caps, true).unwrap();
                assert_eq!(full, pruned);
                assert_eq!(full, odometer_partition(&r, &spec, n, mode));
            }
        }
    }

    #[test]
    fn explicit_levels_match_counts() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..40 {
            let k = rng.gen_range(1..=4);
            let rows: Vec<Vec<u8>> = (0..k).map(|_| (0..k).map(|_| rng.gen_bool(0.6) as u8).collect()).collect();
            let r = RestrictionMatrix::from_rows(&rows).unwrap();
            let n = rng.gen_range(0..=6);
            let t = enumerate_tree(&r, n, &OracleCaps::default()).unwrap();
            let counts = level_counts(&r, n);
            for (m, size) in t.level_sizes().iter().enumerate() {
                assert_eq!(BigUint::from(*size), counts.l[m]);
            }
            assert_eq!(BigUint::from(t.len()), counts.delta[n]);
        }
    }
}
