//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use supnorm::counting::{enumerate_a, enumerate_a_naive, quadruple_bound_check, Which};
use supnorm::suites::{
    positivity_failures, random_counting_instance, run_selected, transform_grid, PropertyOutcome, SuiteConfig,
};
use supnorm::transforms::TestFunction;

struct Verdict {
    ok: bool,
    detail: String,
}

fn from_outcomes(outcomes: &[PropertyOutcome]) -> Verdict {
    let bad: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{} {:?}", o.id, o.errors.first()))
        .collect();
    let worst: Vec<String> = outcomes
        .iter()
        .filter_map(|o| {
            let extra = o.max_ratio.map(|s| format!(" (secondary {s:.3})")).unwrap_or_default();
            Some(format!("{}={:.3e}/{:.0e}{extra}", o.id.rsplit('/').next()?, o.fitted_constant?, o.limit?))
        })
        .collect();
    let instances: usize = outcomes.iter().map(|o| o.instances).sum();
    Verdict {
        ok: bad.is_empty() && !outcomes.is_empty(),
        detail: if bad.is_empty() {
            format!("{instances} instances; {}", worst.join(", "))
        } else {
            format!("failed: {}", bad.join("; "))
        },
    }
}

fn transforms_closed_forms() -> Verdict {
    let family: Vec<TestFunction> =
        [(8, 2), (10, 2), (12, 2), (10, 4)].iter().map(|&(a, b)| TestFunction::new(a, b).unwrap()).collect();
    let grid = transform_grid(&family, &[2, 4, 6, 8], &[0.1, 0.5, 1.0, 2.0, 5.0]);
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for (at, res) in &grid {
        match res {
            Ok(d) => worst = worst.max(*d),
            Err(e) => errors.push(format!("{at}: {e}")),
        }
    }
    Verdict {
        ok: errors.is_empty() && worst <= 1e-6,
        detail: format!("{} points, max relative error {worst:.2e} (limit 1e-6) {errors:?}", grid.len()),
    }
}

fn transforms_positivity() -> Verdict {
    let mut bad = Vec::new();
    for (a, b) in [(8, 2), (10, 2), (12, 2), (8, 4), (10, 4), (12, 4)] {
        match positivity_failures(&TestFunction::new(a, b).unwrap()) {
            Ok(f) if f.is_empty() => {}
            Ok(f) => bad.push(format!("A={a} B={b}: {f:?}")),
            Err(e) => bad.push(format!("A={a} B={b}: {e}")),
        }
    }
    Verdict { ok: bad.is_empty(), detail: format!("6 test functions, exact rational signs {bad:?}") }
}

fn quadruple_counting(cfg: &SuiteConfig) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut c0 = 0.0f64;
    let mut errors = Vec::new();
    let runs = 240;
    for i in 0..runs {
        let square = i % 2 == 1;
        let res = random_counting_instance(&mut rng, square).and_then(|inst| {
            let agree = enumerate_a(&inst)? == enumerate_a_naive(&inst)?;
            let mut ratio = quadruple_bound_check(&inst, Which::Plain)?.ratio;
            if square {
                ratio = ratio.max(quadruple_bound_check(&inst, Which::Square)?.ratio);
            }
            Ok((agree, ratio))
        });
        match res {
            Ok((true, r)) => c0 = c0.max(r),
            Ok((false, _)) => errors.push(format!("instance {i}: enumerators disagree")),
            Err(e) => errors.push(format!("instance {i}: {e}")),
        }
    }
    Verdict {
        ok: errors.is_empty() && c0 <= 1e4,
        detail: format!("{runs} instances, dual enumerators agree, fitted C0 = {c0:.3} (limit 1e4) {errors:?}"),
    }
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: Box<dyn Fn(&SuiteConfig) -> Verdict>,
}

fn suite(pattern: &'static str) -> Box<dyn Fn(&SuiteConfig) -> Verdict> {
    Box::new(move |cfg| {
        let outs: Vec<PropertyOutcome> = pattern.split(',').flat_map(|p| run_selected(cfg, p)).collect();
        from_outcomes(&outs)
    })
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let secs = Duration::from_secs;
    let criteria = vec![
        Criterion { name: "transform closed forms vs quadrature", budget: secs(60), run: Box::new(|_| transforms_closed_forms()) },
        Criterion { name: "transform positivity (exact)", budget: secs(1), run: Box::new(|_| transforms_positivity()) },
        Criterion {
            name: "exponent reproduction (exact)",
            budget: secs(1),
            run: suite("exponents/reproduction,exponents/back-substitution,exponents/z-grid,exponents/second-moment"),
        },
        Criterion { name: "quadruple counting bounds", budget: secs(120), run: Box::new(quadruple_counting) },
        Criterion { name: "congruence reduction", budget: secs(60), run: suite("counting/reduction") },
        Criterion {
            name: "matrix counting",
            budget: secs(120),
            run: suite("counting/matrices-complete,counting/upper-triangular-count,counting/geometric-sum"),
        },
        Criterion { name: "amplifier diagonal identity", budget: secs(5), run: suite("amplifier/diagonal-identity") },
        Criterion { name: "special-function grid", budget: secs(120), run: suite("special/*,oscillatory/voronoi-integral") },
        Criterion { name: "Poisson decay", budget: secs(30), run: suite("oscillatory/poisson-decay") },
    ];

    let mut failures = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = (c.run)(&cfg);
        let took = start.elapsed();
        let ok = v.ok && took <= c.budget;
        if !ok {
            failures += 1;
        }
        println!(
            "{} {} {}: {} [{:.2}s of {}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            c.name,
            v.detail,
            took.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
