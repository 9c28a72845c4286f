//! Acceptance criteria 1-13, one PASS/FAIL line each.
//!
//! Criteria 10, 12 and 13 fail on the mathematics, not on the implementation:
//! - 10: H*BSU(3) is concentrated in even degrees with Q0 = Q1 = 0, so over E(1) it is a
//!   sum of trivial modules and cannot contain the C pieces of the stated decomposition.
//! - 12: x3^2 lies in the subring R, so the indecomposable quotient vanishes in degree 6.
//! - 13: z6 = w2^3 + w2 w4 + w6 maps to zero through both transfer legs.
//!
//! Those three are reported as FAIL and the test pins their witnesses; every other
//! criterion must pass within its time limit.

use std::time::{Duration, Instant};

use sqalg::verify::{self, Check, Status};

struct Outcome {
    number: u32,
    passed: bool,
    elapsed: Duration,
    limit: Option<Duration>,
    failures: Vec<Check>,
}

fn criterion(number: u32, limit: Option<u64>, run: impl FnOnce() -> Vec<Check>) -> Outcome {
    let start = Instant::now();
    let checks = run();
    let elapsed = start.elapsed();
    assert!(!checks.is_empty(), "criterion {number} ran no checks");
    let failures: Vec<Check> = checks.into_iter().filter(|c| c.status != Status::Pass).collect();
    let limit = limit.map(Duration::from_secs);
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let passed = failures.is_empty() && in_time;
    let witness = match (failures.first(), in_time) {
        (Some(c), _) => format!("{}: {}", c.id, c.witness),
        (None, false) => format!("over the {}s limit", limit.unwrap().as_secs()),
        (None, true) => String::new(),
    };
    println!(
        "criterion {number}: {} ({:.2}s{}) {witness}",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.map(|l| format!(" / limit {}s", l.as_secs())).unwrap_or_default()
    );
    Outcome { number, passed, elapsed, limit, failures }
}

fn select(checks: Vec<Check>, keep: impl Fn(&str) -> bool) -> Vec<Check> {
    checks.into_iter().filter(|c| keep(&c.id)).collect()
}

#[test]
fn acceptance() {
    let window = verify::default_max("e1-modules").unwrap();
    let outcomes = [
        criterion(1, Some(1), verify::adem_relations),
        criterion(2, Some(30), || verify::hopf_axioms(12)),
        criterion(3, Some(60), || verify::dual_structure(12, 20)),
        criterion(4, None, || verify::milnor_conversion(12)),
        criterion(5, None, || verify::dual_quotients(16)),
        criterion(6, Some(10), verify::appendix_a),
        criterion(7, None, || verify::appendix_c(10)),
        criterion(8, None, || verify::hp2_transfer(4, 200)),
        criterion(9, None, || {
            let mut v = select(verify::firstsplit(window), |id| id.starts_with("generating functions"));
            v.extend(select(verify::e1_module_theory(window), |id| id.starts_with("generating functions")));
            assert_eq!(v.len(), 2);
            v
        }),
        criterion(10, None, || {
            let mut v = select(verify::a1_module_theory(), |id| id.starts_with("restriction") || id.contains("split criterion"));
            v.extend(select(verify::e1_module_theory(window), |id| id.starts_with("H*BSU(3) over E(1) on")));
            v
        }),
        criterion(11, Some(300), || {
            let mut v = verify::primitives(64);
            // The total-square identity for k <= 3 and the s17 computation; the separate
            // top-square checks are not part of this criterion.
            v.extend(select(verify::lemma_z(18), |id| id.contains(": Sq(s_") || id.contains("17")));
            v
        }),
        criterion(12, None, || verify::lemma_q(32)),
        criterion(13, Some(120), || verify::lemma37(32)),
    ];

    let known_findings = [10, 12, 13];
    for o in &outcomes {
        if let Some(l) = o.limit {
            assert!(o.elapsed <= l, "criterion {} took {:?}, limit {:?}", o.number, o.elapsed, l);
        }
        if !known_findings.contains(&o.number) {
            assert!(o.passed, "criterion {} failed: {:?}", o.number, o.failures);
        }
    }

    let failing = |n: u32| -> Vec<&str> { outcomes[n as usize - 1].failures.iter().map(|c| c.id.as_str()).collect() };
    assert_eq!(failing(10), ["H*BSU(3) over E(1) on [0,40] matches Z2[y4^2] + C (x) Z2[y4^2,y6]y4"]);
    assert_eq!(failing(12), ["degree 6: dimension 1"]);
    assert_eq!(failing(13), ["degree 6 (s_{3,3}) is detected"]);
    assert!(outcomes[12].failures[0].witness.contains("w2^3 + w2*w4 + w6"));
}
