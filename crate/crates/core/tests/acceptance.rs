//! The twelve acceptance criteria. Prints one pass/fail line per criterion
//! and fails if any criterion fails.

mod common;

use std::io::Write;
use std::time::Instant;

use finsler::error::Error;
use finsler::geometry::MetricField;
use finsler::verify::{run_suite, universal_invariants, ProductParts, SamplePlan, SuiteReport};
use finsler::zoo::{self, EuclideanNorm, MetricSpec};

struct Outcome {
    number: usize,
    title: &'static str,
    pass: bool,
    detail: String,
}

fn claims_pass(report: &SuiteReport, prefix_or_ids: &[&str]) -> (bool, String) {
    let selected: Vec<_> = report
        .claims
        .iter()
        .filter(|c| prefix_or_ids.iter().any(|p| c.id.contains(p)))
        .collect();
    let failed: Vec<&str> = selected.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
    let pass = !selected.is_empty() && failed.is_empty();
    let detail = if failed.is_empty() {
        format!("{} claims", selected.len())
    } else {
        format!("{} of {} claims failed: {}", failed.len(), selected.len(), failed.join(", "))
    };
    (pass, detail)
}

fn seconds_of(report: &SuiteReport, prefixes: &[&str]) -> f64 {
    report
        .claims
        .iter()
        .filter(|c| prefixes.iter().any(|p| c.id.contains(p)))
        .map(|c| c.runtime_seconds)
        .sum()
}

fn residual_halving(metric: &MetricField) -> f64 {
    let coarse = common::mean_interior_residual(metric, 20, 401, 2.0, 5e-8);
    let fine = common::mean_interior_residual(metric, 20, 401, 2.0, 2.5e-8);
    coarse / fine
}

fn funk_closed_form_agreement() -> f64 {
    let implicit = zoo::funk_implicit(2, EuclideanNorm).unwrap();
    let closed = zoo::funk_ball_shifted(&[0.0, 0.0]).unwrap();
    SamplePlan::new(100, 91)
        .tangent_samples(&closed)
        .unwrap()
        .iter()
        .map(|at| {
            let a = implicit.value(&at.x, &at.y);
            let b = closed.value(&at.x, &at.y);
            (a - b).abs() / b
        })
        .fold(0.0, f64::max)
}

#[test]
fn acceptance_criteria() {
    let started = Instant::now();
    let suite = common::acceptance_claims();
    let report = run_suite(&suite.claim, 0);
    let mut out: Vec<Outcome> = Vec::new();

    let flag = ["funk-n2-a0-flag", "funk-n2-a03-flag", "funk-n3-a0-flag", "funk-n3-a03-flag"];
    let (pass, detail) = claims_pass(&report, &flag);
    let secs = seconds_of(&report, &flag);
    out.push(Outcome {
        number: 1,
        title: "shifted Funk flag curvature -1/4",
        pass: pass && secs < 60.0,
        detail: format!("{detail}, {secs:.1}s"),
    });

    let (pass, detail) = claims_pass(&report, &["funk-n2-a0-s-curvature"]);
    let secs = seconds_of(&report, &["funk-n2-a0-s-curvature"]);
    out.push(Outcome {
        number: 2,
        title: "Funk S/((n+1)F) = 1/2",
        pass: pass && secs < 120.0,
        detail: format!("{detail}, {secs:.1}s"),
    });

    let (pass, detail) = claims_pass(&report, &["funk-n2-a03-closed-one-form", "funk-n3-a03-closed-one-form"]);
    out.push(Outcome {
        number: 3,
        title: "shifted Funk gamma linear and closed",
        pass,
        detail,
    });

    let (pass, detail) = claims_pass(&report, &["slab-flag-curvature", "slab-s-curvature", "slab-landsberg-witness"]);
    out.push(Outcome {
        number: 4,
        title: "incomplete slab K = 0, S = 0, J witness",
        pass,
        detail,
    });

    let (pass, detail) = claims_pass(
        &report,
        &[
            "szabo-berwald",
            "szabo-landsberg",
            "szabo-s-curvature",
            "szabo-flag-curvature",
            "szabo-riemann-cartan",
        ],
    );
    out.push(Outcome {
        number: 5,
        title: "Szabo family Berwald identities",
        pass,
        detail,
    });

    let (pass, detail) = claims_pass(&report, &["funk-n2-a03-jacobi-residual", "funk-n3-a03-jacobi-residual"]);
    let ratios: Vec<f64> = [&[0.3, 0.0][..], &[0.3, 0.0, 0.0][..]]
        .iter()
        .map(|a| residual_halving(&zoo::funk_ball_shifted(a).unwrap()))
        .collect();
    let halves = ratios.iter().all(|r| *r >= 2.0);
    out.push(Outcome {
        number: 6,
        title: "I solves the Jacobi equation",
        pass: pass && halves,
        detail: format!("{detail}, residual ratio at half tolerance {:.2} (n=2), {:.2} (n=3)", ratios[0], ratios[1]),
    });

    let t0 = Instant::now();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for spec in zoo::catalog() {
        let metric = spec.build().unwrap();
        for check in universal_invariants(&metric, &SamplePlan::new(200, 7)).unwrap() {
            if check.tolerance > 0.0 {
                worst = worst.max(check.worst / check.tolerance);
            }
            if !check.pass {
                failures.push(format!("{}:{} ({:e})", spec.kind(), check.name, check.worst));
            }
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    out.push(Outcome {
        number: 7,
        title: "universal invariants on the catalog",
        pass: failures.is_empty() && secs < 300.0,
        detail: if failures.is_empty() {
            format!("worst value/tolerance {worst:.1e}, {secs:.1}s")
        } else {
            failures.join(", ")
        },
    });

    let (claims_ok, detail) = claims_pass(&report, &["szabo-det-identity", "szabo-spray-split", "szabo-product-blocks"]);
    let sphere_product = MetricSpec::from_toml(
        r#"
kind = "szabo_product"
factor1 = { dimension = 2, model = { type = "sphere" } }
factor2 = { dimension = 2, model = { type = "hyperbolic_disk" } }
profile = { type = "szabo", epsilon = 0.3 }
"#,
    )
    .ok()
    .and_then(|s| ProductParts::from_spec(&s))
    .and_then(|p| p.ok());
    let extra = match sphere_product {
        Some(parts) => SamplePlan::new(50, 3)
            .tangent_samples(&parts.metric)
            .unwrap()
            .iter()
            .map(|at| parts.errors(at).unwrap().max())
            .fold(0.0, f64::max),
        _ => f64::INFINITY,
    };
    let accepts = zoo::szabo_epsilon(0.5).is_ok();
    let rejects = matches!(zoo::szabo_epsilon(-0.8), Err(Error::InvalidProfile { .. }));
    out.push(Outcome {
        number: 8,
        title: "product metric identities and positivity gate",
        pass: claims_ok && extra <= 1e-9 && accepts && rejects,
        detail: format!("{detail}, sphere x hyperbolic worst {extra:.1e}, gate accepts 0.5: {accepts}, rejects -0.8: {rejects}"),
    });

    let (pass, detail) = claims_pass(&report, &["funk-implicit-pde", "funk-ball-pde"]);
    let agreement = funk_closed_form_agreement();
    out.push(Outcome {
        number: 9,
        title: "implicit Funk solver",
        pass: pass && agreement <= 1e-10,
        detail: format!("{detail}, closed form agreement {agreement:.1e}"),
    });

    let (pass, detail) = claims_pass(&report, &["randers-cartan-bound-"]);
    out.push(Outcome {
        number: 10,
        title: "Randers mean Cartan bound",
        pass,
        detail,
    });

    let (pass, detail) = claims_pass(&report, &["szabo-phi-constant", "-phi-convexity", "slab-phi-convexity"]);
    out.push(Outcome {
        number: 11,
        title: "phi constant and convex",
        pass,
        detail,
    });

    let (pass, detail) = claims_pass(&report, &["sphere-", "hyperbolic-", "flat-", "euclidean-"]);
    let mut richardson: f64 = 0.0;
    for spec in zoo::catalog() {
        let metric = spec.build().unwrap();
        for at in SamplePlan::new(10, 5).tangent_samples(&metric).unwrap() {
            richardson = richardson.max(common::jet_vs_richardson(&metric, &at));
        }
    }
    out.push(Outcome {
        number: 12,
        title: "Riemannian baselines and jet derivatives",
        pass: pass && richardson <= 1e-6,
        detail: format!("{detail}, jets vs Richardson {richardson:.1e}"),
    });

    let mut stderr = std::io::stderr().lock();
    for o in &out {
        let status = if o.pass { "PASS" } else { "FAIL" };
        writeln!(stderr, "criterion {:>2} {status}: {} ({})", o.number, o.title, o.detail).unwrap();
    }
    writeln!(
        stderr,
        "{} of 12 criteria passed in {:.1}s",
        out.iter().filter(|o| o.pass).count(),
        started.elapsed().as_secs_f64()
    )
    .unwrap();
    let failed: Vec<usize> = out.iter().filter(|o| !o.pass).map(|o| o.number).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
