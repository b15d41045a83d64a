//! One line per acceptance criterion; exits nonzero if any fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use renyi_combining::classical::{
    arimoto_entropy, combine_check, hayashi_entropy, JointDistribution,
};
use renyi_combining::harness::{
    run_scatter, run_verify, ExperimentConfig, Suite, VerifyOptions, VerifyReport,
};
use renyi_combining::numerics::{binary_renyi_entropy, Alpha};
use renyi_combining::quantum::{check_entropy, variable_entropy, CQChannel, QEntropyKind};

const WORKED_TOL: f64 = 1e-5;
const CHAIN_RULE_BUDGET: Duration = Duration::from_secs(60);
const SCATTER_BUDGET: Duration = Duration::from_secs(300);

struct Outcome {
    passed: bool,
    detail: String,
}

fn report(name: &str, outcome: Outcome, failures: &mut usize) {
    let tag = if outcome.passed { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}: {}", outcome.detail);
    if !outcome.passed {
        *failures += 1;
    }
}

fn suite(s: Suite) -> (VerifyReport, Duration) {
    let start = Instant::now();
    let r = run_verify(s, &VerifyOptions::default()).expect("suite runs");
    (r, start.elapsed())
}

/// The named checks all pass with at least `min_cases` cases each.
fn checks(report: &VerifyReport, names: &[&str], min_cases: usize) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for name in names {
        match report.check(name) {
            Some(c) => {
                passed &= c.passed() && c.cases >= min_cases;
                parts.push(format!(
                    "{name} {}/{} max {:.1e} tol {:.0e}",
                    c.cases - c.failures,
                    c.cases,
                    c.max_error,
                    c.tolerance
                ));
                parts.extend(c.failed_cases.iter().take(2).cloned());
            }
            None => {
                passed = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    Outcome {
        passed,
        detail: parts.join("; "),
    }
}

fn worked(label: &str, got: f64, frozen: f64, oracle: f64) -> (bool, String) {
    let ok = (got - frozen).abs() <= WORKED_TOL && (oracle - frozen).abs() <= WORKED_TOL;
    (
        ok,
        format!("{label} {got:.6} (oracle {oracle:.6}, expected {frozen})"),
    )
}

fn worked_values() -> Outcome {
    let a2 = Alpha::new(2.0).unwrap();
    let half = Alpha::new(0.5).unwrap();
    let bsc = JointDistribution::bsc(0.1).unwrap();
    let q: f64 = 0.1 * 0.9 * 2.0;
    let pure = CQChannel::psc(FRAC_1_SQRT_2).unwrap();
    let rows = [
        worked(
            "h2(0.1)",
            binary_renyi_entropy(0.1, a2).unwrap(),
            0.198451,
            -(0.01f64 + 0.81).ln(),
        ),
        worked(
            "BSC(0.1)⊞BSC(0.1)",
            hayashi_entropy(&combine_check(&bsc, &bsc).unwrap(), a2),
            0.349841,
            -(q * q + (1.0 - q) * (1.0 - q)).ln(),
        ),
        worked(
            "BSC(0.1)⊞BSC(0.1) tilde_down",
            check_entropy(
                &CQChannel::bsc(0.1).unwrap(),
                &CQChannel::bsc(0.1).unwrap(),
                QEntropyKind::TildeDown,
                a2,
            )
            .unwrap(),
            0.349841,
            -(q * q + (1.0 - q) * (1.0 - q)).ln(),
        ),
        worked(
            "BEC(0.5) Arimoto",
            arimoto_entropy(&JointDistribution::bec(0.5).unwrap(), a2),
            0.316694,
            -2.0 * (0.5 + 0.5 * FRAC_1_SQRT_2).ln(),
        ),
        worked(
            "PSC(1/√2) variable node, α=1/2",
            variable_entropy(&pure, &pure, QEntropyKind::BarUp, half).unwrap(),
            0.223144,
            1.25f64.ln(),
        ),
    ];
    Outcome {
        passed: rows.iter().all(|r| r.0),
        detail: rows
            .iter()
            .map(|r| r.1.as_str())
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn scatter() -> Outcome {
    let start = Instant::now();
    let tilde = run_scatter(&ExperimentConfig::default()).expect("scatter runs");
    let bar_up = run_scatter(&ExperimentConfig {
        alphas: vec![1.7],
        entropy_kinds: vec![QEntropyKind::BarUp],
        ..Default::default()
    })
    .expect("scatter runs");
    let elapsed = start.elapsed();
    let violations = tilde.total_violations(QEntropyKind::TildeDown);
    let points: usize = tilde.groups.iter().map(|g| g.samples).sum();
    let crossings = bar_up.total_violations(QEntropyKind::BarUp);
    Outcome {
        passed: violations == 0
            && points == 7000
            && tilde.groups.iter().all(|g| g.symmetry_failures == 0)
            && crossings >= 1
            && elapsed < SCATTER_BUDGET,
        detail: format!(
            "tilde_down {violations} violations over {points} points at tol 1e-9; \
             bar_up α=1.7 {crossings} crossings; {:.1}s (budget {}s)",
            elapsed.as_secs_f64(),
            SCATTER_BUDGET.as_secs()
        ),
    }
}

fn main() -> ExitCode {
    let mut failures = 0;

    let (chain, t) = suite(Suite::ChainRules);
    let mut o = checks(&chain, &["lemma1", "lemma2", "lemma5", "lemma6"], 200 * 8);
    o.passed &= t < CHAIN_RULE_BUDGET;
    o.detail = format!("{}; {:.1}s", o.detail, t.as_secs_f64());
    report("chain-rule identities", o, &mut failures);

    let (eq, _) = suite(Suite::Equalities);
    let (bounds, _) = suite(Suite::Bounds);
    report(
        "theorems 1-4 (a) equality orders",
        checks(
            &eq,
            &[
                "theorem1-equality",
                "theorem2-equality",
                "theorem3-equality",
                "theorem4-equality",
            ],
            200,
        ),
        &mut failures,
    );
    report(
        "theorems 1-4 (b) inequality directions",
        checks(
            &bounds,
            &["theorem1-2-directions", "theorem3-4-directions"],
            500,
        ),
        &mut failures,
    );
    report(
        "theorems 1-4 (c) BSC/BEC tightness",
        checks(&bounds, &["bsc-tightness", "bec-tightness"], 1),
        &mut failures,
    );
    report(
        "propositions 8, 9 and PGM",
        checks(&eq, &["proposition8", "proposition9", "pgm-guessing"], 200),
        &mut failures,
    );

    let (dual, _) = suite(Suite::Duality);
    report(
        "duality contract",
        checks(&dual, &["channel-duality", "combining-duality"], 200),
        &mut failures,
    );

    let (sym, _) = suite(Suite::Symmetry);
    let mut o = checks(&sym, &["lemma7"], 200);
    let closed = checks(&sym, &["conjecture1-symmetry"], 1);
    o.passed &= closed.passed;
    o.detail = format!("{}; {}", o.detail, closed.detail);
    report("lemma 7 symmetry", o, &mut failures);

    report("random-channel scatter", scatter(), &mut failures);

    let (red, _) = suite(Suite::Reductions);
    report(
        "classical reduction",
        checks(&red, &["classical-reduction"], 100),
        &mut failures,
    );

    report("worked values", worked_values(), &mut failures);

    if failures == 0 {
        println!("all acceptance criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failures} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
