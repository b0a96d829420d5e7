//! Batch commands driven by JSON experiment configs.
//!
//! Every command returns its primary output as a string (CSV for `pressure`
//! and `sweep`, JSON for `spectral`, a text report for `oracle-check`) plus
//! an exit code; the binary decides where to write it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::asymptotics::{analyze_series, sweep_k, Family, RRule, SweepParams};
use crate::error::{Error, Result};
use crate::format::fmt12;
use crate::interaction::{InteractionSpec, PotentialSpec, Scalar};
use crate::numeric::{parse_rational, rational_to_f64};
use crate::oracle::{brute_force_partition, random_rational_spec, OracleCaps};
use crate::restriction::{classify, fibonacci_lambda, RestrictionMatrix, spectral};
use crate::transfer::{partition_function, Backend, Mode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 2;
/// `oracle-check` found a mismatch between the recursion and brute force.
pub const EXIT_MISMATCH: i32 = 4;

pub const DEFAULT_TAU: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Spectral,
    Pressure,
    Sweep,
    OracleCheck,
}

/// Raw config as written by the user; unknown keys are rejected.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    tree: Value,
    #[serde(default)]
    interaction: Option<Value>,
    #[serde(default)]
    n_max: Option<usize>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    mode: Option<String>,
    #[serde(default)]
    backend: Option<String>,
    #[serde(default)]
    tau: Option<f64>,
    /// Alphabet size for a randomly drawn interaction (oracle-check only).
    #[serde(default)]
    d: Option<usize>,
}

/// A single tree or a family indexed by `k`.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeSpec {
    Single(RestrictionMatrix),
    Family(Family),
}

/// Validated experiment config.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub tree: TreeSpec,
    pub interaction: Option<InteractionSpec>,
    pub n_max: Option<usize>,
    pub n: Option<usize>,
    pub mode: Mode,
    pub backend: Backend,
    pub tau: f64,
    pub d: Option<usize>,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], what: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(cfg_err(format!("unknown key {:?} in {}", key, what)));
        }
    }
    Ok(())
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<Option<usize>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .map(|x| Some(x as usize))
            .ok_or_else(|| cfg_err(format!("{:?} must be a nonnegative integer", key))),
    }
}

fn get_range(obj: &Map<String, Value>, key: &str) -> Result<Option<(usize, usize)>> {
    match obj.get(key) {
        None => Ok(None),
        Some(v) => {
            let arr = v.as_array().filter(|a| a.len() == 2);
            let pair = arr.and_then(|a| Some((a[0].as_u64()? as usize, a[1].as_u64()? as usize)));
            match pair {
                Some((lo, hi)) if lo <= hi => Ok(Some((lo, hi))),
                _ => Err(cfg_err(format!("{:?} must be [lo, hi] with lo <= hi", key))),
            }
        }
    }
}

fn parse_matrix(v: &Value) -> Result<RestrictionMatrix> {
    let rows = v.as_array().ok_or_else(|| cfg_err("matrix must be an array of arrays"))?;
    let mut out: Vec<Vec<i64>> = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| cfg_err("matrix must be an array of arrays"))?;
        let vals: Option<Vec<i64>> = row.iter().map(Value::as_i64).collect();
        out.push(vals.ok_or_else(|| cfg_err("matrix entries must be integers 0 or 1"))?);
    }
    RestrictionMatrix::from_rows(&out)
}

fn parse_r_rule(obj: &Map<String, Value>) -> Result<RRule> {
    match (obj.get("r"), obj.get("r_rule")) {
        (Some(_), Some(_)) => Err(cfg_err("give either \"r\" or \"r_rule\", not both")),
        (Some(r), None) => r
            .as_u64()
            .map(|r| RRule::Fixed(r as usize))
            .ok_or_else(|| cfg_err("\"r\" must be a nonnegative integer")),
        (None, Some(rule)) => {
            let text = rule.as_str().unwrap_or("").replace(' ', "");
            if text == "k" {
                return Err(cfg_err("r_rule \"k\" is out of range; use \"k-c\" with c >= 1"));
            }
            text.strip_prefix("k-")
                .and_then(|c| c.parse::<usize>().ok())
                .map(RRule::KMinus)
                .ok_or_else(|| cfg_err(format!("r_rule must look like \"k-1\", got {}", rule)))
        }
        (None, None) => Err(cfg_err("fibonacci tree needs \"r\" or \"r_rule\"")),
    }
}

/// Parses a tree descriptor: a bare 0/1 matrix, or an object with `kind`.
pub fn parse_tree(v: &Value) -> Result<TreeSpec> {
    if v.is_array() {
        return Ok(TreeSpec::Single(parse_matrix(v)?));
    }
    let obj = v.as_object().ok_or_else(|| cfg_err("tree must be a matrix or an object with \"kind\""))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| cfg_err("tree needs a string \"kind\""))?;
    let k_or_range = |obj: &Map<String, Value>| -> Result<std::result::Result<usize, (usize, usize)>> {
        match (get_usize(obj, "k")?, get_range(obj, "k_range")?) {
            (Some(k), None) => Ok(Ok(k)),
            (None, Some(r)) => Ok(Err(r)),
            _ => Err(cfg_err(format!("{} tree needs exactly one of \"k\" or \"k_range\"", kind))),
        }
    };
    match kind {
        "full" => {
            check_keys(obj, &["kind", "k", "k_range"], "full tree")?;
            Ok(match k_or_range(obj)? {
                Ok(k) => TreeSpec::Single(RestrictionMatrix::full(k)?),
                Err((k_min, k_max)) => TreeSpec::Family(Family::Full { k_min, k_max }),
            })
        }
        "fibonacci" => {
            check_keys(obj, &["kind", "k", "k_range", "r", "r_rule"], "fibonacci tree")?;
            let rule = parse_r_rule(obj)?;
            Ok(match k_or_range(obj)? {
                Ok(k) => TreeSpec::Single(RestrictionMatrix::generalized_fibonacci(k, rule.r_for(k))?),
                Err((k_min, k_max)) => TreeSpec::Family(Family::Fibonacci { k_min, k_max, rule }),
            })
        }
        "cycle" => {
            check_keys(obj, &["kind", "k", "k_range"], "cycle tree")?;
            Ok(match k_or_range(obj)? {
                Ok(k) => TreeSpec::Single(RestrictionMatrix::cycle(k)?),
                Err((lo, hi)) => TreeSpec::Family(Family::Explicit(
                    (lo..=hi).map(RestrictionMatrix::cycle).collect::<Result<_>>()?,
                )),
            })
        }
        "block_cyclic" => {
            check_keys(obj, &["kind", "period", "block", "block_range"], "block_cyclic tree")?;
            let period = get_usize(obj, "period")?.ok_or_else(|| cfg_err("block_cyclic needs \"period\""))?;
            match (get_usize(obj, "block")?, get_range(obj, "block_range")?) {
                (Some(b), None) => Ok(TreeSpec::Single(RestrictionMatrix::block_cyclic(period, b)?)),
                (None, Some((b_min, b_max))) => Ok(TreeSpec::Family(Family::BlockCyclic { period, b_min, b_max })),
                _ => Err(cfg_err("block_cyclic needs exactly one of \"block\" or \"block_range\"")),
            }
        }
        "explicit" => {
            check_keys(obj, &["kind", "matrix", "matrices"], "explicit tree")?;
            match (obj.get("matrix"), obj.get("matrices")) {
                (Some(m), None) => Ok(TreeSpec::Single(parse_matrix(m)?)),
                (None, Some(list)) => {
                    let list = list.as_array().ok_or_else(|| cfg_err("\"matrices\" must be an array"))?;
                    Ok(TreeSpec::Family(Family::Explicit(list.iter().map(parse_matrix).collect::<Result<_>>()?)))
                }
                _ => Err(cfg_err("explicit tree needs exactly one of \"matrix\" or \"matrices\"")),
            }
        }
        other => Err(cfg_err(format!("unknown tree kind {:?}", other))),
    }
}

fn parse_scalar(v: &Value) -> Result<Scalar> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(cfg_err(format!("expected a number or rational string, got {}", v))),
    };
    parse_rational(&text)
        .map(Scalar::Exact)
        .ok_or_else(|| cfg_err(format!("cannot parse {:?} as a rational number", text)))
}

fn parse_potential(v: &Value) -> Result<f64> {
    match v {
        Value::String(s) if s.trim() == "-inf" => Ok(f64::NEG_INFINITY),
        _ => {
            let q = parse_scalar(v)?;
            Ok(q.to_f64())
        }
    }
}

fn parse_grid<T>(v: &Value, what: &str, f: impl Fn(&Value) -> Result<T>) -> Result<Vec<Vec<T>>> {
    let rows = v.as_array().ok_or_else(|| cfg_err(format!("{} must be an array of arrays", what)))?;
    rows.iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| cfg_err(format!("{} must be an array of arrays", what)))?
                .iter()
                .map(&f)
                .collect()
        })
        .collect()
}

fn parse_list<T>(v: &Value, what: &str, f: impl Fn(&Value) -> Result<T>) -> Result<Vec<T>> {
    v.as_array()
        .ok_or_else(|| cfg_err(format!("{} must be an array", what)))?
        .iter()
        .map(f)
        .collect()
}

/// Parses `{"A": .., "w": ..}` or `{"phi": .., "chi": ..}`.
pub fn parse_interaction(v: &Value) -> Result<InteractionSpec> {
    let obj = v.as_object().ok_or_else(|| cfg_err("interaction must be an object"))?;
    if obj.contains_key("A") || obj.contains_key("w") {
        check_keys(obj, &["A", "w"], "interaction")?;
        let a = parse_grid(obj.get("A").ok_or_else(|| cfg_err("interaction needs \"A\""))?, "A", parse_scalar)?;
        let w = parse_list(obj.get("w").ok_or_else(|| cfg_err("interaction needs \"w\""))?, "w", parse_scalar)?;
        InteractionSpec::build(&a, &w)
    } else {
        check_keys(obj, &["phi", "chi"], "interaction")?;
        let phi = parse_grid(obj.get("phi").ok_or_else(|| cfg_err("interaction needs \"phi\""))?, "phi", parse_potential)?;
        let chi = parse_list(obj.get("chi").ok_or_else(|| cfg_err("interaction needs \"chi\""))?, "chi", parse_potential)?;
        InteractionSpec::from_potentials(&PotentialSpec { phi, chi })
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| cfg_err(e.to_string()))?;
        let mode = match raw.mode.as_deref() {
            None | Some("extendable") => Mode::Extendable,
            Some("local") => Mode::Local,
            Some(other) => return Err(cfg_err(format!("mode must be extendable or local, got {:?}", other))),
        };
        let backend = match raw.backend.as_deref() {
            None | Some("log") => Backend::Log,
            Some("exact") => Backend::Exact,
            Some(other) => return Err(cfg_err(format!("backend must be log or exact, got {:?}", other))),
        };
        let tau = raw.tau.unwrap_or(DEFAULT_TAU);
        if !(tau >= 0.0) {
            return Err(cfg_err("tau must be nonnegative"));
        }
        Ok(Self {
            tree: parse_tree(&raw.tree)?,
            interaction: raw.interaction.as_ref().map(parse_interaction).transpose()?,
            n_max: raw.n_max,
            n: raw.n,
            mode,
            backend,
            tau,
            d: raw.d,
        })
    }

    fn single_tree(&self) -> Result<&RestrictionMatrix> {
        match &self.tree {
            TreeSpec::Single(r) => Ok(r),
            TreeSpec::Family(_) => Err(cfg_err("this command needs a single tree (use \"k\", not \"k_range\")")),
        }
    }

    fn interaction(&self) -> Result<&InteractionSpec> {
        self.interaction.as_ref().ok_or_else(|| cfg_err("this command needs an \"interaction\""))
    }

    fn require_n_max(&self) -> Result<usize> {
        match self.n_max {
            Some(n) if n >= 1 => Ok(n),
            Some(_) => Err(cfg_err("n_max must be >= 1")),
            None => Err(cfg_err("this command needs \"n_max\"")),
        }
    }
}

/// Options from the command line that are not part of the config.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub caps: Option<OracleCaps>,
}

/// Result of a command: primary output, a short echo for the terminal, and
/// the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub output: String,
    pub echo: String,
    pub exit_code: i32,
}

/// Runs `cmd`; library errors are returned for the caller to map onto exit codes.
pub fn run(cmd: Command, config: &ExperimentConfig, opts: &RunOptions) -> Result<CommandOutput> {
    match cmd {
        Command::Spectral => cmd_spectral(config),
        Command::Pressure => cmd_pressure(config),
        Command::Sweep => cmd_sweep(config),
        Command::OracleCheck => cmd_oracle_check(config, opts),
    }
}

/// Class, Perron value, period, residue table and eigenvectors as JSON.
pub fn cmd_spectral(config: &ExperimentConfig) -> Result<CommandOutput> {
    let r = config.single_tree()?;
    let class = classify(r);
    if !class.is_irreducible() {
        return Err(Error::Hypothesis(format!("restriction matrix {:?} is reducible", r)));
    }
    let info = spectral(r)?;
    let report = json!({
        "k": r.k(),
        "matrix": r.to_rows(),
        "class": info.class.name(),
        "lambda": info.lambda,
        "period": info.period,
        "residue_table": info.residue_table,
        "right_vec": info.right_vec,
        "left_vec": info.left_vec,
        "iterations": info.iterations,
        "closed_form_lambda": closed_form_for(r),
    });
    let mut output = serde_json::to_string_pretty(&report).expect("serializable");
    output.push('\n');
    Ok(CommandOutput {
        echo: format!("class={} lambda={} period={}", info.class.name(), fmt12(info.lambda), info.period),
        output,
        exit_code: EXIT_OK,
    })
}

pub const SERIES_HEADER: &str = "n,L_n,Delta_n,logZ_n,P_n,ratio_Ln_Deltan";
pub const SWEEP_HEADER: &str = "k,lambda,n_max,logZ_nmax,P_nmax,lower_bound,upper_bound,converged,status";

/// Per-depth series CSV; the pressure bounds go to the echo line.
pub fn cmd_pressure(config: &ExperimentConfig) -> Result<CommandOutput> {
    let r = config.single_tree()?;
    let spec = config.interaction()?;
    let n_max = config.require_n_max()?;
    let a = analyze_series(r, spec, n_max, config.mode, config.backend, config.tau)?;
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for rec in &a.series.records {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            rec.n,
            rec.l,
            rec.delta,
            fmt12(rec.log_z),
            fmt12(rec.pressure),
            fmt12(rec.ratio())
        ));
    }
    let limit = match a.limit {
        Some(l) => format!("estimate={} converged={}", fmt12(l.estimate), l.converged),
        None => format!("estimate={} converged=n/a", fmt12(a.series.last().pressure)),
    };
    let echo = match a.bounds {
        Some(b) => format!(
            "lambda={} lower_bound={} upper_bound={} {}",
            fmt12(b.lambda),
            fmt12(b.lower),
            fmt12(b.upper),
            limit
        ),
        None => format!("reducible tree: no lambda; upper_bound={} {}", fmt12(spec.log_s()), limit),
    };
    Ok(CommandOutput { output: out, echo, exit_code: EXIT_OK })
}

/// One CSV row per `k`; exit 0 when at least one row succeeded.
pub fn cmd_sweep(config: &ExperimentConfig) -> Result<CommandOutput> {
    let family = match &config.tree {
        TreeSpec::Family(f) => f.clone(),
        TreeSpec::Single(r) => Family::Explicit(vec![r.clone()]),
    };
    let spec = config.interaction()?;
    let n_max = config.require_n_max()?;
    if n_max < 2 {
        return Err(cfg_err("sweep needs n_max >= 2 for a limit estimate"));
    }
    let params = SweepParams { n_max, tau: config.tau, mode: config.mode, backend: config.backend };
    let res = sweep_k(&family, spec, &params);
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for e in &res.entries {
        match &e.outcome {
            Ok(v) => out.push_str(&format!(
                "{},{},{},{},{},{},{},{},ok\n",
                e.k,
                fmt12(v.lambda),
                e.n_max,
                fmt12(v.log_z),
                fmt12(v.limit.estimate),
                fmt12(v.bounds.lower),
                fmt12(v.bounds.upper),
                v.limit.converged
            )),
            Err(msg) => out.push_str(&format!(
                "{},,{},,,,,,error: {}\n",
                e.k,
                e.n_max,
                msg.replace([',', '\n'], ";")
            )),
        }
    }
    let ok = res.successes().count();
    let exit_code = if ok > 0 { EXIT_OK } else { EXIT_HYPOTHESIS };
    Ok(CommandOutput {
        output: out,
        echo: format!("{}: {} of {} rows ok, log s = {}", res.family, ok, res.entries.len(), fmt12(res.log_s)),
        exit_code,
    })
}

/// Compares the recursion with brute-force enumeration on one small instance.
///
/// Without an `interaction` in the config, a random rational spec over `d`
/// symbols (default 2) is drawn from `--seed`.
pub fn cmd_oracle_check(config: &ExperimentConfig, opts: &RunOptions) -> Result<CommandOutput> {
    let r = config.single_tree()?;
    let n = config.n.or(config.n_max).ok_or_else(|| cfg_err("oracle-check needs \"n\""))?;
    let spec = match &config.interaction {
        Some(s) => s.clone(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            random_rational_spec(config.d.unwrap_or(2), 0.3, &mut rng)
        }
    };
    let caps = match opts.caps {
        Some(c) => c,
        None => OracleCaps::from_env()?,
    };
    let truth = brute_force_partition(r, &spec, n, config.mode, &caps)?;
    let got = partition_function(r, &spec, n, config.mode, config.backend)?;
    let (pass, got_text) = match config.backend {
        Backend::Exact => {
            let z = got.exact_z.clone().expect("exact backend");
            (z == truth, z.to_string())
        }
        Backend::Log => {
            let want = crate::numeric::ln_rational(&truth);
            let ok = if want == f64::NEG_INFINITY {
                got.log_z == f64::NEG_INFINITY
            } else {
                (got.log_z - want).abs() <= 1e-9 * want.abs().max(1.0)
            };
            (ok, format!("exp({})", fmt12(got.log_z)))
        }
    };
    let output = format!(
        "k={} n={} d={} mode={} backend={}\nbrute_force Z_n = {} (~{})\ntransfer    Z_n = {}\n{}\n",
        r.k(),
        n,
        spec.d(),
        config.mode.name(),
        config.backend.name(),
        truth,
        fmt12(rational_to_f64(&truth)),
        got_text,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(CommandOutput {
        echo: format!("oracle-check {}", if pass { "PASS" } else { "FAIL" }),
        output,
        exit_code: if pass { EXIT_OK } else { EXIT_MISMATCH },
    })
}

/// Closed-form Perron value when the config names a Fibonacci tree.
pub fn closed_form_for(r: &RestrictionMatrix) -> Option<f64> {
    let k = r.k();
    (0..k).find_map(|rr| {
        let candidate = RestrictionMatrix::generalized_fibonacci(k, rr as i64).ok()?;
        (candidate == *r).then(|| fibonacci_lambda(k, rr))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    #[test]
    fn tree_descriptors() {
        let c = cfg(r#"{"tree": {"kind": "fibonacci", "k": 2, "r": 1}}"#);
        assert_eq!(c.tree, TreeSpec::Single(RestrictionMatrix::generalized_fibonacci(2, 1).unwrap()));
        let c = cfg(r#"{"tree": [[1,1],[1,0]]}"#);
        assert_eq!(c.tree, TreeSpec::Single(RestrictionMatrix::generalized_fibonacci(2, 1).unwrap()));
        let c = cfg(r#"{"tree": {"kind": "fibonacci", "k_range": [2, 8], "r_rule": "k-1"}}"#);
        assert_eq!(
            c.tree,
            TreeSpec::Family(Family::Fibonacci { k_min: 2, k_max: 8, rule: RRule::KMinus(1) })
        );
        let c = cfg(r#"{"tree": {"kind": "full", "k_range": [2, 4]}}"#);
        assert_eq!(c.tree, TreeSpec::Family(Family::Full { k_min: 2, k_max: 4 }));
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            r#"{"tree": {"kind": "full", "k": 2}, "bogus": 1}"#,
            r#"{"tree": {"kind": "full", "k": 2, "r": 1}}"#,
            r#"{"tree": {"kind": "full", "k": 2, "k_range": [1, 2]}}"#,
            r#"{"tree": {"kind": "fibonacci", "k": 2}}"#,
            r#"{"tree": {"kind": "tetris", "k": 2}}"#,
            r#"{"tree": [[1,2],[1,0]]}"#,
            r#"{"tree": {"kind": "full", "k": 2}, "mode": "strict"}"#,
            r#"{"tree": {"kind": "full", "k": 2}, "interaction": {"A": [[1]], "w": [1], "x": 0}}"#,
            r#"{"tree": {"kind": "full", "k": 2}, "interaction": {"A": [["1/0"]], "w": [1]}}"#,
        ] {
            assert!(ExperimentConfig::from_json(bad).is_err(), "{}", bad);
        }
    }

    #[test]
    fn interaction_forms() {
        let c = cfg(r#"{"tree": [[1]], "interaction": {"A": [[1, "3/2"], [0.5, 0]], "w": [1, 2]}}"#);
        let s = c.interaction.unwrap();
        assert!(s.exact().is_some());
        assert_eq!(s.e()[0][1], 3.0);
        assert_eq!(s.e()[1][0], 0.5);
        let c = cfg(r#"{"tree": [[1]], "interaction": {"phi": [[0, 0], [0, "-inf"]], "chi": [0, 0]}}"#);
        assert_eq!(c.interaction.unwrap().e(), crate::interaction::golden_mean().e());
    }

    #[test]
    fn spectral_command() {
        let out = cmd_spectral(&cfg(r#"{"tree": {"kind": "fibonacci", "k": 2, "r": 1}}"#)).unwrap();
        let v: Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["class"], "primitive");
        assert!((v["lambda"].as_f64().unwrap() - 1.618_033_988_7).abs() < 1e-10);
        let out = cmd_spectral(&cfg(r#"{"tree": {"kind": "cycle", "k": 3}}"#)).unwrap();
        let v: Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["period"], 3);
        let err = cmd_spectral(&cfg(r#"{"tree": [[1,1],[0,1]]}"#)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("reducible"));
    }

    #[test]
    fn pressure_command() {
        let out = cmd_pressure(&cfg(
            r#"{"tree": {"kind": "full", "k": 3}, "interaction": {"A": [[1,1],[1,1]], "w": [1,1]}, "n_max": 4}"#,
        ))
        .unwrap();
        let lines: Vec<&str> = out.output.lines().collect();
        assert_eq!(lines[0], SERIES_HEADER);
        for line in &lines[1..] {
            let p: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
            assert!((p - 0.693_147_180_6).abs() < 1e-9);
        }
        let out = cmd_pressure(&cfg(
            r#"{"tree": {"kind": "full", "k": 2}, "interaction": {"A": [[1,1],[1,0]], "w": [1,1]}, "n_max": 1}"#,
        ))
        .unwrap();
        let row1: Vec<&str> = out.output.lines().nth(2).unwrap().split(',').collect();
        assert_eq!(row1[0], "1");
        assert_eq!(row1[3], fmt12(5f64.ln()));
        let err = ExperimentConfig::from_json(
            r#"{"tree": {"kind": "full", "k": 2}, "interaction": {"A": [[0,0],[0,0]], "w": [1,1]}, "n_max": 1}"#,
        )
        .unwrap_err();
        assert_eq!(err, Error::DegenerateInteraction);
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn fibonacci_closed_form_lookup() {
        let r = RestrictionMatrix::generalized_fibonacci(5, 2).unwrap();
        assert!((closed_form_for(&r).unwrap() - (3.0 + 33f64.sqrt()) / 2.0).abs() < 1e-15);
        assert_eq!(closed_form_for(&RestrictionMatrix::cycle(3).unwrap()), None);
    }
}
