//! The eight acceptance criteria, each at its stated size and time bound.
//! Prints one PASS/FAIL line per criterion and fails if any criterion does.

use std::time::{Duration, Instant};

use glfamily::report::SuiteReport;
use glfamily::suites::oracles::{compose_oracle, graph_meets_oracle, set_ops_oracle, unique_path_oracle};
use glfamily::suites::shrink::{shrink_suite, ShrinkConfig};
use glfamily::suites::stages::{approx_suite, level_one, scheme_suite};
use glfamily::suites::{
    composition_suite, condition_d_suite, duplication_suite, path_lemma_suite, theta_suite, CompositionConfig, ConditionDConfig,
    DuplicationConfig, ThetaConfig,
};
use glfamily::{Exec, FamilyLevel, ThetaRule};

const EXEC: Exec = Exec::Parallel;

fn lv(l: usize) -> FamilyLevel {
    FamilyLevel::new(l).unwrap()
}

fn criterion1() -> SuiteReport {
    let mut r = SuiteReport::new("index sequences, L = 1..3");
    for l in 1..=3 {
        r.absorb(theta_suite(&ThetaRule::new(lv(l)), &ThetaConfig::default(), EXEC));
    }
    r
}

fn criterion2() -> SuiteReport {
    let mut r = SuiteReport::new("compositions along increasing paths, L = 1, 2");
    for l in 1..=2 {
        match composition_suite(lv(l), &CompositionConfig::default(), EXEC) {
            Ok(rep) => r.absorb(rep),
            Err(e) => r.fail(format!("L = {l}: {e}")),
        }
    }
    r
}

fn criterion3() -> SuiteReport {
    condition_d_suite(lv(1), &ConditionDConfig::default(), EXEC).unwrap_or_else(|e| {
        let mut r = SuiteReport::new("condition (d)");
        r.fail(e.to_string());
        r
    })
}

fn criterion4() -> SuiteReport {
    let mut r = SuiteReport::new("finite uogas, ≤ 6 vertices and random 12-vertex");
    r.absorb(path_lemma_suite(6, EXEC));
    r.absorb(duplication_suite(&DuplicationConfig::default(), EXEC));
    r
}

fn criterion5() -> SuiteReport {
    let sys = level_one(EXEC).with_cap(5_000_000);
    match sys.run(20).and_then(|states| approx_suite(&sys, &states, 6)) {
        Ok(r) => r,
        Err(e) => {
            let mut r = SuiteReport::new("approximation stages");
            r.fail(e.to_string());
            r
        }
    }
}

fn criterion6() -> SuiteReport {
    scheme_suite(8, 10, EXEC).unwrap_or_else(|e| {
        let mut r = SuiteReport::new("scheme");
        r.fail(e.to_string());
        r
    })
}

fn criterion7() -> SuiteReport {
    shrink_suite(&ShrinkConfig::default(), EXEC)
}

fn criterion8() -> SuiteReport {
    let mut r = SuiteReport::new("oracle agreements");
    r.absorb(set_ops_oracle(1000, 0));
    r.absorb(graph_meets_oracle(1000, 0));
    r.absorb(compose_oracle(1000, 0));
    r.absorb(unique_path_oracle(1000, 0));
    r
}

fn main() {
    let criteria: [(fn() -> SuiteReport, u64); 8] = [
        (criterion1, 60),
        (criterion2, 60),
        (criterion3, 10),
        (criterion4, 300),
        (criterion5, 300),
        (criterion6, 300),
        (criterion7, 120),
        (criterion8, 120),
    ];
    let mut failed = 0;
    for (i, (run, bound)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = run();
        let took = t.elapsed();
        let in_time = took <= Duration::from_secs(*bound);
        let ok = r.is_ok() && in_time;
        failed += usize::from(!ok);
        println!(
            "{} criterion {}: {} ({} checks, {} failures, {:.1} s of {bound} s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            r.name,
            r.checked,
            r.failed,
            took.as_secs_f64()
        );
        if !ok {
            println!("{r}");
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
