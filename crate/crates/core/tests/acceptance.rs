//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line to stderr,
//! bypassing the test harness capture so the lines appear in every run.

use std::io::Write;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polytorus::constants::{
    arestov_lambda, arestov_lambda_asymptotic, central_binomial, eq1_bound_check, gamma, gamma_minimum,
    kwapien_lower_bound, ln_arestov_lambda, stirling_bracket,
};
use polytorus::corpus::{generate_corpus, CorpusSpec, PolyKind};
use polytorus::norms::{
    lp_norm, lp_norm_exact_even, mahler_log_quadrature, mahler_measure, mahler_univariate, roots_univariate, Method,
};
use polytorus::quadrature::QuadratureSpec;
use polytorus::symmetric::{
    elementary_symmetric, newton_decompose, steinhaus_moment_mc_fn, u_mn, u_mn_eval, SteinhausMCSpec,
};
use polytorus::verify::{sharpness_scan, ScanFamily, ScanParams, TheoremId, Verifier, VerifyParams};
use polytorus::Polynomial;

fn report(id: u32, title: &str, ok: bool, detail: &str) {
    let status = if ok { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[acceptance {id:02}] {status} {title}: {detail}");
    assert!(ok, "criterion {id} ({title}) failed: {detail}");
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn binomial_product(d: &[u32]) -> Polynomial {
    let n = d.len();
    let mut acc = Polynomial::constant(n, c(1.0));
    for (j, &dj) in d.iter().enumerate() {
        let f = Polynomial::constant(n, c(1.0)).add(&Polynomial::variable(n, j)).unwrap();
        acc = acc.mul(&f.pow(dj)).unwrap();
    }
    acc
}

fn random_univariate(rng: &mut ChaCha8Rng, max_degree: usize) -> Polynomial {
    let d = rng.random_range(1..=max_degree);
    let coeffs: Vec<Complex64> = (0..=d)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Polynomial::univariate(&coeffs)
}

const SHARP_PS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];

#[test]
fn arestov_sharpness() {
    let table = sharpness_scan(
        ScanFamily::ArestovSharp,
        &ScanParams {
            grid: Some((1..=8).map(f64::from).collect()),
            ..ScanParams::default()
        },
    )
    .unwrap();
    let mut worst = 0f64;
    for row in &table.rows {
        let m = row.params.m.unwrap();
        let mahler = mahler_univariate(&binomial_product(&[m])).unwrap();
        assert_eq!(mahler.method, Method::ExactRoots);
        worst = worst.max((mahler.value - 1.0).abs()).max((row.value - 1.0).abs());
    }
    report(
        1,
        "Arestov sharpness for (1+z)^m",
        table.rows.len() == 32 && worst < 1e-6,
        &format!("32 cases, max |ratio - 1| = {worst:.3e}"),
    );
}

#[test]
fn lambda_dual_form() {
    let mut worst = 0f64;
    for p in SHARP_PS {
        for m in 1..=8 {
            worst = worst.max(arestov_lambda(p, m).unwrap().consistency_gap);
        }
    }
    let mut binomial_ok = true;
    for m in 0..=15 {
        let l = ln_arestov_lambda(2.0, m).exp();
        binomial_ok &= (l * l).round() as u64 == central_binomial(m).unwrap() && ((l * l) / central_binomial(m).unwrap() as f64 - 1.0).abs() < 1e-12;
    }
    report(
        2,
        "Lambda gamma form vs integral form",
        worst < 1e-8 && binomial_ok,
        &format!("max relative gap {worst:.3e}; Lambda(2,m)^2 = C(2m,m) for m <= 15: {binomial_ok}"),
    );
}

#[test]
fn lambda_asymptotics() {
    let r2 = ln_arestov_lambda(2.0, 100).exp() / arestov_lambda_asymptotic(2.0, 100).unwrap();
    let r1 = ln_arestov_lambda(1.0, 200).exp() / arestov_lambda_asymptotic(1.0, 200).unwrap();
    report(
        3,
        "Lambda asymptotics",
        (r2 - 1.0).abs() < 0.01 && (r1 - 1.0).abs() < 0.01,
        &format!("Lambda(2,100)/asym = {r2:.6}, Lambda(1,200)/asym = {r1:.6}"),
    );
}

#[test]
fn multivariate_sharpness() {
    let mut worst_ratio = 0f64;
    let mut worst_mahler = 0f64;
    for d in [vec![3u32, 2], vec![2, 2, 1]] {
        let poly = binomial_product(&d);
        let mahler = mahler_measure(&poly).unwrap();
        worst_mahler = worst_mahler.max((mahler.value - 1.0).abs());
        for p in [1.0, 2.0] {
            let norm = lp_norm(&poly, p, &QuadratureSpec::for_dimension(d.len())).unwrap();
            let bound: f64 = d.iter().map(|&dj| ln_arestov_lambda(p, dj)).sum::<f64>().exp() * mahler.value;
            worst_ratio = worst_ratio.max((norm.value / bound - 1.0).abs());
        }
    }
    report(
        4,
        "product sharpness in two and three variables",
        worst_ratio < 1e-5 && worst_mahler < 1e-6,
        &format!("max |ratio - 1| = {worst_ratio:.3e}, max |M - 1| = {worst_mahler:.3e}"),
    );
}

const PAIRS: [(f64, f64); 3] = [(1.0, 2.0), (2.0, 4.0), (0.5, 3.0)];

fn corpus_plan(kind: PolyKind) -> Vec<(TheoremId, VerifyParams)> {
    let mut plan = Vec::new();
    for (p, q) in PAIRS {
        plan.push((TheoremId::Thm21, VerifyParams::new(p).with_q(q)));
        if kind != PolyKind::General {
            plan.push((TheoremId::Bayart, VerifyParams::new(p).with_q(q)));
        }
        plan.push((TheoremId::Weissler, VerifyParams::new(p).with_q(q)));
    }
    for p in SHARP_PS {
        plan.push((TheoremId::MahlerMain, VerifyParams::new(p)));
        plan.push((TheoremId::MahlerCor, VerifyParams::new(p)));
    }
    plan.push((TheoremId::Orlicz, VerifyParams::default()));
    for p in [0.5, 2.0] {
        plan.push((TheoremId::ProductLower, VerifyParams::new(p)));
    }
    plan.push((TheoremId::MahlerTriangle, VerifyParams::default()));
    for theta in [0.25, 0.5] {
        for p in [1.0, 2.0] {
            plan.push((TheoremId::Interpolation, VerifyParams::new(p).with_theta(theta)));
        }
    }
    plan.push((TheoremId::GeoMeanLemma, VerifyParams::default()));
    plan
}

#[test]
fn corpus_inequality_suite() {
    let start = Instant::now();
    let (mut checks, mut failures, mut corpora) = (0usize, Vec::new(), 0);
    let mut worst: Option<(f64, String)> = None;
    for seed in 1..=5u64 {
        for kind in [PolyKind::General, PolyKind::Homogeneous, PolyKind::Multiaffine] {
            for n in 1..=3usize {
                let deg = if kind == PolyKind::Multiaffine { n as u32 } else { 6 };
                let corpus = generate_corpus(&CorpusSpec::new(seed, n, deg, 100, kind)).unwrap();
                assert_eq!(corpus.len(), 100);
                corpora += 1;
                let verifier = Verifier::new(corpus.polynomials);
                for (id, params) in corpus_plan(kind) {
                    let run = verifier.check(id, &params).unwrap();
                    assert_eq!(run.checked + run.skipped, 100);
                    checks += run.checks.len();
                    for ch in &run.checks {
                        if worst.as_ref().is_none_or(|w| ch.ratio > w.0) {
                            worst = Some((ch.ratio, format!("{id} seed {seed} {kind} n={n} [{}]", ch.params.label())));
                        }
                        if !ch.pass {
                            failures.push(format!(
                                "{id} seed {seed} {kind} n={n} index {} [{}] ratio {} slack {:e}",
                                ch.index,
                                ch.params.label(),
                                ch.ratio,
                                ch.slack
                            ));
                        }
                    }
                }
            }
        }
    }
    let (ratio, at) = worst.unwrap();
    report(
        5,
        "corpus inequality suite",
        failures.is_empty(),
        &format!(
            "{corpora} corpora, {checks} checks, {} failures, max ratio {ratio:.6} ({at}), {:.0}s{}",
            failures.len(),
            start.elapsed().as_secs_f64(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    );
}

#[test]
fn mahler_multiplicativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0f64;
    for _ in 0..200 {
        let p = random_univariate(&mut rng, 6);
        let q = random_univariate(&mut rng, 6);
        let (mp, mq) = (mahler_univariate(&p).unwrap(), mahler_univariate(&q).unwrap());
        let mpq = mahler_univariate(&p.mul(&q).unwrap()).unwrap();
        assert!([mp.method, mq.method, mpq.method].iter().all(|&m| m == Method::ExactRoots));
        worst = worst.max((mpq.value / (mp.value * mq.value) - 1.0).abs());
    }
    report(
        6,
        "Mahler multiplicativity",
        worst < 1e-8,
        &format!("200 pairs, max |M(PQ)/(M(P)M(Q)) - 1| = {worst:.3e}"),
    );
}

#[test]
fn weissler_criticality() {
    let table = sharpness_scan(
        ScanFamily::WeisslerViolation,
        &ScanParams {
            p: Some(2.0),
            q: Some(4.0),
            eps: Some(0.05),
            grid: Some(vec![0.51, 0.50]),
            ..ScanParams::default()
        },
    )
    .unwrap();
    let (past, at) = (&table.rows[0], &table.rows[1]);
    let ok = past.value > 0.0
        && (past.value - 9.5e-5).abs() < 1e-6
        && at.value < 0.0
        && (past.value - past.reference.unwrap()).abs() < 1e-12
        && (at.value - at.reference.unwrap()).abs() < 1e-12;
    report(
        7,
        "Weissler critical radius",
        ok,
        &format!("margin {:.4e} at r^2 = 0.51, {:.4e} at r^2 = 0.50", past.value, at.value),
    );
}

#[test]
fn kwapien_lemma_trend() {
    let mut gap_ok = true;
    for n in (2..=256).step_by(2) {
        let l2 = u_mn(2, n).unwrap().coefficient_functionals().parseval_l2;
        let gap = gamma(3.0) - l2 * l2;
        gap_ok &= (gap - 2.0 / n as f64).abs() < 1e-12;
    }
    let exact = lp_norm_exact_even(&u_mn(2, 64).unwrap(), 4).unwrap().value.powi(4);
    let mc = steinhaus_moment_mc_fn(64, |z| u_mn_eval(2, z), 4.0, &SteinhausMCSpec::new(100_000, 11)).unwrap();
    let mc_ok = (mc.value - exact).abs() <= 4.0 * mc.error_estimate;
    let bound_ok = (1..=50).all(|m| kwapien_lower_bound(2.0, 4.0, m).unwrap().gamma_form <= 2f64.powf(m as f64 / 2.0));
    report(
        8,
        "Kwapien lemma trend",
        gap_ok && mc_ok && bound_ok,
        &format!(
            "gap 2/n for even n <= 256: {gap_ok}; E|U|^4 exact {exact:.6} vs MC {:.6} +- {:.2e}; bound chain m <= 50: {bound_ok}",
            mc.value, mc.error_estimate
        ),
    );
}

#[test]
fn newton_identities() {
    let mut cases = 0;
    let mut ok = true;
    for k in 2..=6u32 {
        let d = newton_decompose(k).unwrap();
        ok &= d.residual == 0.0;
        for n in k as usize..=k as usize + 2 {
            ok &= d.verify(n).unwrap();
            let e = elementary_symmetric(k as usize, n).unwrap();
            ok &= e.terms().all(|(_, c)| c.re == 1.0 && c.im == 0.0);
            cases += 1;
        }
    }
    report(9, "Newton identities", ok, &format!("{cases} (k, n) cases, structural equality and zero residual"));
}

#[test]
fn gamma_landmarks() {
    let g = gamma_minimum();
    let min_ok = (g.x_min - 1.4616321451).abs() < 1e-8;
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let stirling_ok = (0..200).all(|_| {
        let x = rng.random_range(0.0..60.0f64).max(1e-9);
        let (lo, hi) = stirling_bracket(x).unwrap();
        let v = gamma(x + 1.0);
        lo < v && v < hi
    });
    let eq1_ok = (1..=10).all(|m| (1..=10).all(|k| eq1_bound_check(m, k).unwrap().holds));
    report(
        10,
        "Gamma landmarks",
        min_ok && stirling_ok && eq1_ok,
        &format!("argmin {:.12}; Stirling bracket on 200 points: {stirling_ok}; Lambda(k/m, m) < 2^m: {eq1_ok}", g.x_min),
    );
}

#[test]
fn mahler_cross_validation() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let spec = QuadratureSpec::for_dimension(1);
    let (mut count, mut worst) = (0, 0f64);
    while count < 100 {
        let p = random_univariate(&mut rng, 8);
        let roots = roots_univariate(&p, 1e-10).unwrap();
        if roots.roots.iter().any(|r| (r.norm() - 1.0).abs() < 1e-3) {
            continue;
        }
        let exact = mahler_univariate(&p).unwrap().value;
        let quad = mahler_log_quadrature(&p, &spec).unwrap().value;
        worst = worst.max((quad / exact - 1.0).abs());
        count += 1;
    }
    let p2 = Polynomial::build(2, [(vec![0, 0], c(1.0)), (vec![1, 0], c(1.0)), (vec![0, 1], c(1.0))]).unwrap();
    let iterated = mahler_measure(&p2).unwrap().value;
    let raw = mahler_log_quadrature(&p2, &QuadratureSpec::for_dimension(2)).unwrap().value;
    let gap2 = (iterated - raw).abs();
    report(
        11,
        "Mahler cross-validation",
        worst < 1e-6 && gap2 < 1e-4,
        &format!("100 univariate: max rel gap {worst:.3e}; 1+z1+z2: iterated {iterated:.10} vs raw {raw:.10}"),
    );
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_polytorus"))
        .args(args)
        .env("POLYTORUS_THREADS", "1")
        .output()
        .expect("binary runs")
}

#[test]
fn cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let mut ok = true;
    for tag in ["a", "b"] {
        let out = cli(&[
            "corpus", "--seed", "3", "--n", "2", "--deg", "4", "--count", "20", "--kind", "general", "--out",
            &path(&format!("c{tag}.json")),
        ]);
        ok &= out.status.success();
        for ext in ["json", "csv"] {
            let out = cli(&[
                "verify", "--theorem", "mahler-cor", "--corpus", &path(&format!("c{tag}.json")), "--p", "1",
                "--report", &path(&format!("r{tag}.{ext}")),
            ]);
            ok &= out.status.code() == Some(0);
        }
    }
    let same = |a: &str, b: &str| std::fs::read(path(a)).unwrap() == std::fs::read(path(b)).unwrap();
    let corpus_same = same("ca.json", "cb.json");
    let reports_same = same("ra.json", "rb.json") && same("ra.csv", "rb.csv");
    report(
        12,
        "determinism of CLI corpora and reports",
        ok && corpus_same && reports_same,
        &format!("corpus identical: {corpus_same}; JSON and CSV reports identical: {reports_same}"),
    );
}
