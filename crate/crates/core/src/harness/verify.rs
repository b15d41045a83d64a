//! Verification suites over freshly sampled instances. Each suite is a set
//! of named checks; a check records the deviation of every case and fails
//! when any deviation exceeds its tolerance or a case errors.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::sampling::{
    random_classical_channel, random_joint, random_pure_tripartite, random_tripartite,
    sample_random_channel, sample_rng,
};
use crate::classical::{
    arimoto_entropy, bec_bound_arimoto, bec_bound_hayashi, bsc_bound_arimoto, bsc_bound_hayashi,
    chain_rule_transform, combine_check, combine_variable, hayashi_entropy,
    inverse_chain_rule_transform, JointDistribution,
};
use crate::error::{Error, Result};
use crate::extremal::{conjecture1_bound, conjecture1_seam_gap, conjecture2_bound};
use crate::numerics::{Alpha, HermitianMatrix, Regime};
use crate::quantum::{
    bar_down_entropy, bar_up_entropy, check_entropy, cq_channel_transform, dual_channel,
    pretty_good_guess, pretty_good_measurement, prop8_alpha2_formula, prop9_half_formula,
    quantum_chain_transform, symmetry_check, tilde_down_entropy, variable_entropy, CQChannel,
    QEntropyKind,
};

/// Orders used by the identity suites.
pub const ALPHA_GRID: [f64; 8] = [0.3, 0.5, 0.9, 1.1, 1.5, 2.0, 3.0, 5.0];

/// Orders for the Hayashi bound directions, covering all three regimes.
pub const HAYASHI_GRID: [f64; 10] = [0.3, 0.5, 0.9, 1.1, 1.5, 2.0, 2.3, 2.7, 3.0, 5.0];

/// Orders for the Arimoto bound directions, covering all three regimes.
pub const ARIMOTO_GRID: [f64; 10] = [0.2, 0.3, 1.0 / 3.0, 0.37, 0.45, 0.5, 0.9, 1.5, 2.0, 5.0];

pub const IDENTITY_TOL: f64 = 1e-10;
pub const DUALITY_TOL: f64 = 1e-9;
pub const CLOSED_FORM_TOL: f64 = 1e-12;

const MAX_LISTED_FAILURES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    ChainRules,
    Duality,
    Symmetry,
    Equalities,
    Bounds,
    Reductions,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::ChainRules,
        Suite::Duality,
        Suite::Symmetry,
        Suite::Equalities,
        Suite::Bounds,
        Suite::Reductions,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Suite::ChainRules => "chain-rules",
            Suite::Duality => "duality",
            Suite::Symmetry => "symmetry",
            Suite::Equalities => "equalities",
            Suite::Bounds => "bounds",
            Suite::Reductions => "reductions",
        }
    }

    fn default_instances(self) -> usize {
        match self {
            Suite::Bounds => 500,
            Suite::Reductions => 100,
            _ => 200,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.tag() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

/// Dual-channel construction under test.
pub type DualFn = fn(&CQChannel) -> Result<CQChannel>;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Replaces every check's pinned tolerance when set.
    pub tolerance: Option<f64>,
    /// Instances per check; suite default when unset.
    pub instances: Option<usize>,
    pub dual: DualFn,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 42,
            tolerance: None,
            instances: None,
            dual: dual_channel,
        }
    }
}

impl VerifyOptions {
    /// Takes the seed from a configuration; tolerances stay pinned per check.
    pub fn from_config(cfg: &ExperimentConfig) -> Self {
        VerifyOptions {
            seed: cfg.seed,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub max_error: f64,
    pub tolerance: f64,
    /// Diagnostics for the first few failing cases.
    pub failed_cases: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Check(CheckResult);

impl Check {
    fn new(name: &str, tolerance: f64, opts: &VerifyOptions) -> Self {
        Check(CheckResult {
            name: name.to_string(),
            cases: 0,
            failures: 0,
            max_error: 0.0,
            tolerance: opts.tolerance.unwrap_or(tolerance),
            failed_cases: Vec::new(),
        })
    }

    /// Records a nonnegative deviation; errors and NaN count as failures.
    fn record(&mut self, context: impl FnOnce() -> String, deviation: Result<f64>) {
        let r = &mut self.0;
        r.cases += 1;
        let failure = match deviation {
            Ok(d) if d <= r.tolerance => {
                r.max_error = r.max_error.max(d);
                None
            }
            Ok(d) => {
                r.max_error = r.max_error.max(if d.is_nan() { f64::INFINITY } else { d });
                Some(format!("{}: deviation {d:e}", context()))
            }
            Err(e) => {
                r.max_error = f64::INFINITY;
                Some(format!("{}: {e}", context()))
            }
        };
        if let Some(msg) = failure {
            r.failures += 1;
            if r.failed_cases.len() < MAX_LISTED_FAILURES {
                r.failed_cases.push(msg);
            }
        }
    }

    fn equal(&mut self, context: impl FnOnce() -> String, lhs: Result<f64>, rhs: Result<f64>) {
        self.record(context, lhs.and_then(|l| rhs.map(|r| (l - r).abs())));
    }

    /// `lhs ≤ rhs` up to the tolerance.
    fn at_most(&mut self, context: impl FnOnce() -> String, lhs: Result<f64>, rhs: Result<f64>) {
        // f64::max would turn NaN into 0
        let excess = |d: f64| if d.is_nan() { d } else { d.max(0.0) };
        self.record(context, lhs.and_then(|l| rhs.map(|r| excess(l - r))));
    }

    fn finish(self) -> CheckResult {
        self.0
    }
}

/// Generator for instance `i` of check number `check`.
fn rng(opts: &VerifyOptions, check: u64, i: usize) -> impl Rng {
    sample_rng(opts.seed, (check << 32) | i as u64)
}

fn grid(values: &[f64]) -> Vec<Alpha> {
    values
        .iter()
        .map(|&a| Alpha::new(a).expect("grid orders are positive"))
        .collect()
}

fn ctx(name: &str, i: usize, alpha: Alpha) -> impl FnOnce() -> String + '_ {
    move || format!("{name} instance {i} alpha {alpha}")
}

/// Runs one suite.
pub fn run_verify(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    let n = opts.instances.unwrap_or(suite.default_instances());
    let checks = match suite {
        Suite::ChainRules => chain_rules(opts, n),
        Suite::Duality => duality(opts, n),
        Suite::Symmetry => symmetry(opts, n),
        Suite::Equalities => equalities(opts, n),
        Suite::Bounds => bounds(opts, n),
        Suite::Reductions => reductions(opts, n),
    };
    Ok(VerifyReport { suite, checks })
}

fn chain_rules(opts: &VerifyOptions, n: usize) -> Vec<CheckResult> {
    let alphas = grid(&ALPHA_GRID);
    let mut lemma1 = Check::new("lemma1", IDENTITY_TOL, opts);
    let mut lemma1_inverse = Check::new("lemma1-inverse", IDENTITY_TOL, opts);
    let mut lemma2 = Check::new("lemma2", IDENTITY_TOL, opts);
    let mut lemma5 = Check::new("lemma5", IDENTITY_TOL, opts);
    let mut lemma5_three = Check::new("lemma5-three-register", IDENTITY_TOL, opts);
    let mut lemma6 = Check::new("lemma6", IDENTITY_TOL, opts);

    for i in 0..n {
        let mut r = rng(opts, 1, i);
        let p = random_joint(&mut r, 2 + i % 5);
        let p1 = random_joint(&mut r, 2 + i % 3);
        let p2 = random_joint(&mut r, 2 + (i / 3) % 3);
        let dims = [[2, 2, 2], [2, 3, 2], [3, 2, 2]][i % 3];
        let st = random_tripartite(&mut r, dims);
        let d = 2 + i % 2;
        let w1 = sample_random_channel(&mut r, d);
        let w2 = sample_random_channel(&mut r, d);
        let ab = st.trace_out(&["C"]).expect("register C exists");
        let bc = st.trace_out(&["A"]).expect("register A exists");

        for &a in &alphas {
            let inv = a.inverse();
            let pbar = chain_rule_transform(&p, a);
            lemma1.equal(
                ctx("lemma1", i, a),
                Ok(hayashi_entropy(&p, a)),
                Ok(arimoto_entropy(&pbar, inv)),
            );
            lemma1_inverse.record(
                ctx("lemma1-inverse", i, a),
                Ok(inverse_chain_rule_transform(&pbar, a).max_abs_diff(&p)),
            );

            let lhs = hayashi_entropy(&p1, a) + hayashi_entropy(&p2, a);
            let rhs = (|| {
                let t1 = chain_rule_transform(&p1, a);
                let t2 = chain_rule_transform(&p2, a);
                Ok(arimoto_entropy(&combine_variable(&t1, &t2)?, inv)
                    + hayashi_entropy(&combine_check(&p1, &p2)?, a))
            })();
            lemma2.equal(ctx("lemma2", i, a), Ok(lhs), rhs);

            let rhs = quantum_chain_transform(&ab, &["B"], a)
                .and_then(|t| bar_up_entropy(&t, &["A"], inv));
            lemma5.equal(ctx("lemma5", i, a), tilde_down_entropy(&ab, &["A"], a), rhs);

            let rhs = (|| {
                let t = quantum_chain_transform(&st, &["C"], a)?;
                Ok(bar_up_entropy(&t, &["A"], inv)? + tilde_down_entropy(&bc, &["B"], a)?)
            })();
            lemma5_three.equal(
                ctx("lemma5-three-register", i, a),
                tilde_down_entropy(&st, &["A", "B"], a),
                rhs,
            );

            let lhs = (|| {
                Ok(w1.entropy(QEntropyKind::TildeDown, a)?
                    + w2.entropy(QEntropyKind::TildeDown, a)?)
            })();
            let rhs = (|| {
                let t1 = cq_channel_transform(&w1, a)?;
                let t2 = cq_channel_transform(&w2, a)?;
                Ok(variable_entropy(&t1, &t2, QEntropyKind::BarUp, inv)?
                    + check_entropy(&w1, &w2, QEntropyKind::TildeDown, a)?)
            })();
            lemma6.equal(ctx("lemma6", i, a), lhs, rhs);
        }
    }
    vec![
        lemma1.finish(),
        lemma1_inverse.finish(),
        lemma2.finish(),
        lemma5.finish(),
        lemma5_three.finish(),
        lemma6.finish(),
    ]
}

fn duality(opts: &VerifyOptions, n: usize) -> Vec<CheckResult> {
    let alphas = grid(&ALPHA_GRID);
    let mut single = Check::new("channel-duality", DUALITY_TOL, opts);
    let mut combining = Check::new("combining-duality", DUALITY_TOL, opts);
    let mut pure = Check::new("pure-state-duality", IDENTITY_TOL, opts);

    for i in 0..n {
        let mut r = rng(opts, 2, i);
        let w1 = sample_random_channel(&mut r, 2);
        let w2 = sample_random_channel(&mut r, 2);
        let psi = random_pure_tripartite(&mut r, [2, 2, 2]);
        let duals = (opts.dual)(&w1).and_then(|d1| Ok((d1, (opts.dual)(&w2)?)));
        let ab = psi.trace_out(&["C"]).expect("register C exists");
        let ac = psi.trace_out(&["B"]).expect("register B exists");

        for &a in &alphas {
            let inv = a.inverse();
            match &duals {
                Ok((d1, d2)) => {
                    let lhs = (|| {
                        Ok(w1.entropy(QEntropyKind::TildeDown, a)?
                            + d1.entropy(QEntropyKind::BarUp, inv)?)
                    })();
                    single.equal(ctx("channel-duality", i, a), lhs, Ok(LN_2));
                    let lhs = check_entropy(&w1, &w2, QEntropyKind::TildeDown, a);
                    let rhs = variable_entropy(d1, d2, QEntropyKind::BarUp, inv).map(|v| LN_2 - v);
                    combining.equal(ctx("combining-duality", i, a), lhs, rhs);
                }
                Err(e) => {
                    let msg = e.to_string();
                    single.record(
                        ctx("channel-duality", i, a),
                        Err(Error::Construction(msg.clone())),
                    );
                    combining.record(
                        ctx("combining-duality", i, a),
                        Err(Error::Construction(msg)),
                    );
                }
            }
            let lhs = tilde_down_entropy(&ab, &["A"], a);
            let rhs = bar_up_entropy(&ac, &["A"], inv).map(|v| -v);
            pure.equal(ctx("pure-state-duality", i, a), lhs, rhs);
        }
    }
    vec![single.finish(), combining.finish(), pure.finish()]
}

fn symmetry(opts: &VerifyOptions, n: usize) -> Vec<CheckResult> {
    let alphas = grid(&ALPHA_GRID);
    let mut lemma7 = Check::new("lemma7", DUALITY_TOL, opts);
    let mut closed = Check::new("conjecture1-symmetry", CLOSED_FORM_TOL, opts);
    let mut seam = Check::new("conjecture1-seam", CLOSED_FORM_TOL, opts);

    for i in 0..n {
        let mut r = rng(opts, 3, i);
        let w1 = sample_random_channel(&mut r, 2);
        let w2 = sample_random_channel(&mut r, 2);
        let h1: f64 = r.random_range(0.0..LN_2);
        let h2: f64 = r.random_range(0.0..LN_2);
        for &a in &alphas {
            lemma7.record(
                ctx("lemma7", i, a),
                symmetry_check(&w1, &w2, a).map(|(l, r)| (l - r).abs()),
            );
            let (g1, g2) = (LN_2 - h1, LN_2 - h2);
            let lhs = conjecture1_bound(h1, h2, a) - 0.5 * (h1 + h2);
            let rhs = conjecture1_bound(g1, g2, a) - 0.5 * (g1 + g2);
            closed.equal(ctx("conjecture1-symmetry", i, a), Ok(lhs), Ok(rhs));
            seam.record(
                ctx("conjecture1-seam", i, a),
                conjecture1_seam_gap(h1, a).map(f64::abs),
            );
        }
    }
    vec![lemma7.finish(), closed.finish(), seam.finish()]
}

fn equalities(opts: &VerifyOptions, n: usize) -> Vec<CheckResult> {
    let hayashi_orders = grid(&[2.0, 3.0]);
    let arimoto_orders = grid(&[1.0 / 3.0, 0.5]);
    let two = Alpha::new(2.0).expect("positive");
    let three = Alpha::new(3.0).expect("positive");
    let half = Alpha::new(0.5).expect("positive");
    let mut t1 = Check::new("theorem1-equality", IDENTITY_TOL, opts);
    let mut t2 = Check::new("theorem2-equality", IDENTITY_TOL, opts);
    let mut t3 = Check::new("theorem3-equality", IDENTITY_TOL, opts);
    let mut t4 = Check::new("theorem4-equality", IDENTITY_TOL, opts);
    let mut p8 = Check::new("proposition8", IDENTITY_TOL, opts);
    let mut p9 = Check::new("proposition9", IDENTITY_TOL, opts);
    let mut pgm = Check::new("pgm-guessing", IDENTITY_TOL, opts);
    let mut pgm_sum = Check::new("pgm-completeness", IDENTITY_TOL, opts);
    let mut q3 = Check::new("alpha3-quantum-equality", IDENTITY_TOL, opts);

    for i in 0..n {
        let mut r = rng(opts, 4, i);
        let c1 = random_classical_channel(&mut r, 2 + i % 3);
        let c2 = random_classical_channel(&mut r, 2 + (i / 3) % 3);
        let d = 2 + i % 2;
        let w1 = sample_random_channel(&mut r, d);
        let w2 = sample_random_channel(&mut r, d);

        let check = combine_check(&c1, &c2);
        let variable = combine_variable(&c1, &c2);
        for &a in &hayashi_orders {
            let (h1, h2) = (hayashi_entropy(&c1, a), hayashi_entropy(&c2, a));
            let exact = check.as_ref().map(|p| hayashi_entropy(p, a));
            t1.equal(
                ctx("theorem1-equality", i, a),
                dup(&exact),
                bsc_bound_hayashi(h1, h2, a),
            );
            t2.equal(
                ctx("theorem2-equality", i, a),
                dup(&exact),
                bec_bound_hayashi(h1, h2, a),
            );
        }
        for &a in &arimoto_orders {
            let (h1, h2) = (arimoto_entropy(&c1, a), arimoto_entropy(&c2, a));
            let exact = variable.as_ref().map(|p| arimoto_entropy(p, a));
            t3.equal(
                ctx("theorem3-equality", i, a),
                dup(&exact),
                bsc_bound_arimoto(h1, h2, a),
            );
            t4.equal(
                ctx("theorem4-equality", i, a),
                dup(&exact),
                bec_bound_arimoto(h1, h2, a),
            );
        }

        let exact = check_entropy(&w1, &w2, QEntropyKind::TildeDown, two);
        let formula = (|| {
            prop8_alpha2_formula(
                w1.entropy(QEntropyKind::TildeDown, two)?,
                w2.entropy(QEntropyKind::TildeDown, two)?,
            )
        })();
        p8.equal(ctx("proposition8", i, two), exact, formula);

        let exact = variable_entropy(&w1, &w2, QEntropyKind::BarUp, half);
        let formula = (|| {
            prop9_half_formula(
                w1.entropy(QEntropyKind::BarUp, half)?,
                w2.entropy(QEntropyKind::BarUp, half)?,
            )
        })();
        p9.equal(ctx("proposition9", i, half), exact, formula);

        pgm.equal(
            ctx("pgm-guessing", i, two),
            pretty_good_guess(&w1).map(|g| -g.ln()),
            w1.entropy(QEntropyKind::TildeDown, two),
        );
        pgm_sum.record(
            ctx("pgm-completeness", i, two),
            pretty_good_measurement(&w1)
                .map(|[m0, m1]| m0.add(&m1).max_abs_diff(&HermitianMatrix::identity(d))),
        );

        let exact = check_entropy(&w1, &w2, QEntropyKind::TildeDown, three);
        let bounds = (|| {
            let h1 = w1.entropy(QEntropyKind::TildeDown, three)?;
            let h2 = w2.entropy(QEntropyKind::TildeDown, three)?;
            Ok((
                conjecture1_bound(h1, h2, three),
                conjecture2_bound(h1, h2, three)?,
            ))
        })();
        match (exact, bounds) {
            (Ok(e), Ok((b1, b2))) => q3.record(
                ctx("alpha3-quantum-equality", i, three),
                Ok((e - b1).abs().max((e - b2).abs())),
            ),
            (Err(e), _) | (_, Err(e)) => {
                q3.record(ctx("alpha3-quantum-equality", i, three), Err(e))
            }
        }
    }
    vec![
        t1.finish(),
        t2.finish(),
        t3.finish(),
        t4.finish(),
        p8.finish(),
        p9.finish(),
        pgm.finish(),
        pgm_sum.finish(),
        q3.finish(),
    ]
}

fn dup(r: &std::result::Result<f64, &Error>) -> Result<f64> {
    r.map_err(|e| Error::Construction(e.to_string()))
}

/// Records `lower ≤ exact ≤ upper`, or two-sided equality.
fn directions(
    check: &mut Check,
    context: impl Fn() -> String,
    regime: Regime,
    exact: f64,
    lower: Result<f64>,
    upper: Result<f64>,
) {
    match regime {
        Regime::Equality => {
            check.equal(&context, Ok(exact), lower);
            check.equal(&context, Ok(exact), upper);
        }
        _ => {
            check.at_most(&context, lower, Ok(exact));
            check.at_most(&context, Ok(exact), upper);
        }
    }
}

fn bounds(opts: &VerifyOptions, n: usize) -> Vec<CheckResult> {
    let hayashi = grid(&HAYASHI_GRID);
    let arimoto = grid(&ARIMOTO_GRID);
    let mut th12 = Check::new("theorem1-2-directions", IDENTITY_TOL, opts);
    let mut th34 = Check::new("theorem3-4-directions", IDENTITY_TOL, opts);
    let mut bsc_tight = Check::new("bsc-tightness", IDENTITY_TOL, opts);
    let mut bec_tight = Check::new("bec-tightness", IDENTITY_TOL, opts);

    for i in 0..n {
        let mut r = rng(opts, 5, i);
        let c1 = random_classical_channel(&mut r, 2 + i % 3);
        let c2 = random_classical_channel(&mut r, 2 + (i / 3) % 3);
        let (f1, f2): (f64, f64) = (r.random_range(0.0..=0.5), r.random_range(0.0..=0.5));
        let (e1, e2): (f64, f64) = (r.random_range(0.0..=1.0), r.random_range(0.0..=1.0));
        let (Ok(check), Ok(variable)) = (combine_check(&c1, &c2), combine_variable(&c1, &c2))
        else {
            th12.record(
                || format!("instance {i}"),
                Err(Error::Construction("combining failed".into())),
            );
            continue;
        };
        let bsc = [JointDistribution::bsc(f1), JointDistribution::bsc(f2)];
        let bec = [JointDistribution::bec(e1), JointDistribution::bec(e2)];

        for &a in &hayashi {
            let (h1, h2) = (hayashi_entropy(&c1, a), hayashi_entropy(&c2, a));
            let exact = hayashi_entropy(&check, a);
            let (bsc_v, bec_v) = (bsc_bound_hayashi(h1, h2, a), bec_bound_hayashi(h1, h2, a));
            let c = || format!("theorem1-2-directions instance {i} alpha {a}");
            match a.hayashi_regime() {
                Regime::Reversed => directions(&mut th12, c, Regime::Reversed, exact, bec_v, bsc_v),
                regime => directions(&mut th12, c, regime, exact, bsc_v, bec_v),
            }
        }
        for &a in &arimoto {
            let (h1, h2) = (arimoto_entropy(&c1, a), arimoto_entropy(&c2, a));
            let exact = arimoto_entropy(&variable, a);
            let (bsc_v, bec_v) = (bsc_bound_arimoto(h1, h2, a), bec_bound_arimoto(h1, h2, a));
            let c = || format!("theorem3-4-directions instance {i} alpha {a}");
            match a.arimoto_regime() {
                Regime::Reversed => directions(&mut th34, c, Regime::Reversed, exact, bsc_v, bec_v),
                regime => directions(&mut th34, c, regime, exact, bec_v, bsc_v),
            }
        }

        for &a in hayashi.iter().chain(&arimoto) {
            for (check, pair, name) in [
                (&mut bsc_tight, &bsc, "bsc-tightness"),
                (&mut bec_tight, &bec, "bec-tightness"),
            ] {
                let (Ok(q1), Ok(q2)) = (&pair[0], &pair[1]) else {
                    check.record(
                        ctx(name, i, a),
                        Err(Error::Construction("family member".into())),
                    );
                    continue;
                };
                let hh = |p: &JointDistribution| hayashi_entropy(p, a);
                let ha = |p: &JointDistribution| arimoto_entropy(p, a);
                type Bound = fn(f64, f64, Alpha) -> Result<f64>;
                let bound_h: Bound = if name == "bsc-tightness" {
                    bsc_bound_hayashi
                } else {
                    bec_bound_hayashi
                };
                let bound_a: Bound = if name == "bsc-tightness" {
                    bsc_bound_arimoto
                } else {
                    bec_bound_arimoto
                };
                check.equal(
                    ctx(name, i, a),
                    combine_check(q1, q2).map(|p| hh(&p)),
                    bound_h(hh(q1), hh(q2), a),
                );
                check.equal(
                    ctx(name, i, a),
                    combine_variable(q1, q2).map(|p| ha(&p)),
                    bound_a(ha(q1), ha(q2), a),
                );
            }
        }
    }
    vec![
        th12.finish(),
        th34.finish(),
        bsc_tight.finish(),
        bec_tight.finish(),
    ]
}

fn reductions(opts: &VerifyOptions, n: usize) -> Vec<CheckResult> {
    let alphas = grid(&ALPHA_GRID);
    let mut single = Check::new("classical-reduction", IDENTITY_TOL, opts);
    let mut combined = Check::new("combining-reduction", IDENTITY_TOL, opts);
    let mut transform = Check::new("transform-reduction", IDENTITY_TOL, opts);

    for i in 0..n {
        let mut r = rng(opts, 6, i);
        let p = random_joint(&mut r, 2 + i % 5);
        let p1 = random_joint(&mut r, 2 + i % 3);
        let p2 = random_joint(&mut r, 2 + (i / 3) % 3);
        let embedded = [&p, &p1, &p2].map(CQChannel::from_joint);
        let [Ok(w), Ok(w1), Ok(w2)] = &embedded else {
            single.record(
                || format!("instance {i}"),
                Err(Error::Construction("embedding failed".into())),
            );
            continue;
        };
        let (state, joint) = (w.state(), &p);
        for &a in &alphas {
            let hh = hayashi_entropy(joint, a);
            let ha = arimoto_entropy(joint, a);
            single.equal(
                ctx("classical-reduction", i, a),
                tilde_down_entropy(&state, &["X"], a),
                Ok(hh),
            );
            single.equal(
                ctx("classical-reduction", i, a),
                bar_down_entropy(&state, &["X"], a),
                Ok(hh),
            );
            single.equal(
                ctx("classical-reduction", i, a),
                bar_up_entropy(&state, &["X"], a),
                Ok(ha),
            );

            combined.equal(
                ctx("combining-reduction", i, a),
                check_entropy(w1, w2, QEntropyKind::TildeDown, a),
                combine_check(&p1, &p2).map(|q| hayashi_entropy(&q, a)),
            );
            combined.equal(
                ctx("combining-reduction", i, a),
                variable_entropy(w1, w2, QEntropyKind::BarUp, a),
                combine_variable(&p1, &p2).map(|q| arimoto_entropy(&q, a)),
            );

            let lifted = CQChannel::from_joint(&chain_rule_transform(joint, a));
            transform.record(
                ctx("transform-reduction", i, a),
                cq_channel_transform(w, a).and_then(|t| Ok(t.max_abs_diff(&lifted?))),
            );
        }
    }
    vec![single.finish(), combined.finish(), transform.finish()]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(instances: usize) -> VerifyOptions {
        VerifyOptions {
            instances: Some(instances),
            ..Default::default()
        }
    }

    #[test]
    fn suite_tags() {
        for s in Suite::ALL {
            assert_eq!(s.tag().parse::<Suite>().unwrap(), s);
        }
        assert!(matches!(
            "nope".parse::<Suite>(),
            Err(Error::UnknownSuite(_))
        ));
    }

    #[test]
    fn every_suite_passes_on_a_few_instances() {
        for s in Suite::ALL {
            let report = run_verify(s, &quick(3)).unwrap();
            for c in &report.checks {
                assert!(c.passed(), "{s}/{}: {:?}", c.name, c.failed_cases);
            }
        }
    }

    fn swapped_outputs(w: &CQChannel) -> Result<CQChannel> {
        let d = dual_channel(w)?;
        CQChannel::new(d.sigma(0).clone(), d.sigma(0).clone())
    }

    #[test]
    fn broken_dual_fails() {
        let opts = VerifyOptions {
            dual: swapped_outputs,
            ..quick(2)
        };
        let report = run_verify(Suite::Duality, &opts).unwrap();
        assert!(!report.passed());
        assert!(report.check("pure-state-duality").unwrap().passed());
        assert!(!report
            .check("channel-duality")
            .unwrap()
            .failed_cases
            .is_empty());
    }
}
