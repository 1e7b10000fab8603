//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line
//! (written straight to stderr so it shows without `--nocapture`).

use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use solenoid_dynamics::classify::{
    box_counting_dimension, classify, generate_orbit, lyapunov_spectrum, report, AttractorClass, ClassifierConfig,
    MapSpec,
};
use solenoid_dynamics::conjugacy::{
    perturbed_anosov_conjugacy, solenoid_to_attractor, torus_dist, verify_conjugacy, PerturbedToralMap,
    SinePerturbation, SmaleConjugacy, SmaleSystem, ToralConjugacy, ZeroPerturbation,
};
use solenoid_dynamics::cover::verify_cover_identities;
use solenoid_dynamics::linalg::{toral_entropy, IntMatrix};
use solenoid_dynamics::mme::{
    entropy_sft, parse_word, rs_unstable_weight, unstable_length, unstable_length_scaling_check, LinearModelPath,
    TransitionMatrix,
};
use solenoid_dynamics::rational::{int, rat, Rational, TorusPoint};
use solenoid_dynamics::shadowing::{
    shadow_many, uniqueness_epsilon, LinearToralSystem, OmegaPoint, ProductHyperbolicSystem,
};
use solenoid_dynamics::solenoid::{d_sigma, random_vector, verify_solenoid_laws, DSigma, Solenoid};

const PHI: f64 = 1.618_033_988_749_894_8;

struct Ledger {
    failures: Vec<String>,
}

impl Ledger {
    fn record(&mut self, id: u32, name: &str, passed: bool, elapsed: Duration, detail: String) {
        let line = format!(
            "[{}] criterion {id}: {name} ({:.2}s) {detail}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        writeln!(std::io::stderr(), "{line}").unwrap();
        if !passed {
            self.failures.push(line);
        }
    }
}

fn dyadic_matrix() -> IntMatrix {
    IntMatrix::new(vec![vec![2]]).unwrap()
}

fn cat_matrix() -> IntMatrix {
    IntMatrix::new(vec![vec![2, 1], vec![1, 1]]).unwrap()
}

fn exact_algebra() -> (bool, String) {
    let mut total = 0;
    let mut failed = 0;
    for a in [dyadic_matrix(), cat_matrix()] {
        let laws = verify_solenoid_laws(&a, 1000, 1).unwrap();
        let cover = verify_cover_identities(&a, 1000, 1).unwrap();
        for c in laws.checks.iter().chain(&cover.checks) {
            total += 1;
            failed += c.failures;
        }
    }
    (failed == 0, format!("{total} identity suites x 1000 samples, {failed} failures"))
}

fn metric_laws() -> (bool, String) {
    let s = Solenoid::new(dyadic_matrix()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let two = Rational::from_integer(2.into());
    let (mut resolved, mut bad) = (0, 0);
    while resolved < 200 {
        let x = s.random_point(&mut rng, 16);
        let q = 1i64 << rng.random_range(0..8);
        let y = x.act(&[rat(rng.random_range(-64..64), q)]).unwrap();
        let DSigma::Exact(d) = d_sigma(&x, &y, 200).unwrap() else { continue };
        resolved += 1;
        let v = random_vector(&mut rng, 1, 12);
        let moved = d_sigma(&x.act(&v).unwrap(), &y.act(&v).unwrap(), 200).unwrap();
        let halved = d_sigma(&x.shift(), &y.shift(), 200).unwrap();
        if moved != DSigma::Exact(d.clone()) || halved != DSigma::Exact(&d / &two) {
            bad += 1;
        }
    }
    let e = s.identity();
    let one = d_sigma(&e, &s.theta(vec![int(1)]).unwrap(), 200).unwrap();
    let third = d_sigma(&e, &s.theta(vec![rat(1, 3)]).unwrap(), 200).unwrap();
    let examples = one == DSigma::Exact(int(1)) && third == DSigma::Infinite;
    (
        bad == 0 && examples,
        format!("{resolved} resolved pairs, {bad} violations; d(e, theta_1 e) = {one:?}, d(e, theta_1/3 e) = {third:?}"),
    )
}

fn shadowing() -> (bool, String) {
    let sys = LinearToralSystem::new(&cat_matrix()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (l, j) = (0.01, 50);
    let orbits: Vec<_> = (0..100)
        .map(|_| {
            let start = [rng.random::<f64>(), rng.random::<f64>()];
            sys.random_pseudo_orbit(&start, j, l, &mut rng).unwrap()
        })
        .collect();
    let results = shadow_many(&sys, &orbits, 1e-13).unwrap();
    let worst = results.iter().map(|r| r.achieved_sup).fold(0.0, f64::max);
    let within = worst <= 2.236 * l + 1e-6;

    let exact = sys.random_pseudo_orbit(&[0.137, 0.593], j, 0.0, &mut rng).unwrap();
    let r = shadow_many(&sys, std::slice::from_ref(&exact), 1e-13).unwrap().remove(0);
    let x0 = exact.at(0);
    let recovered = sys.dist(&r.point, x0);

    // adversarial pairs: true orbits C-close on [-N, N] with the extreme split
    let rates = sys.rates();
    let mut adversarial_ok = true;
    for n in 1..=20u32 {
        for k in 0..=10 {
            let s = k as f64 / 10.0;
            let big_c = 0.1;
            let nn = n as i32;
            let (mut p, mut m) = (s * rates.mu.powi(-nn), (1.0 - s) * rates.lambda.powi(nn));
            let worst = [nn, -nn]
                .iter()
                .map(|&j| p * rates.mu.powi(j) + m * rates.lambda.powi(j))
                .fold(0.0, f64::max);
            p *= big_c / worst;
            m *= big_c / worst;
            // anchored at the origin so the separation is propagated without cancellation
            let x = sys.point(&[0.0, 0.0]);
            let y = OmegaPoint::new(vec![x.base[0] + p], vec![x.fiber[0] + m]);
            let (mut fx, mut fy, mut bx, mut by) = (x.clone(), y.clone(), x.clone(), y.clone());
            let mut sup = 0.0f64;
            for _ in 0..n {
                fx = sys.step(&fx);
                fy = sys.step(&fy);
                bx = sys.step_inv(&bx);
                by = sys.step_inv(&by);
                sup = sup.max(sys.dist(&fx, &fy)).max(sys.dist(&bx, &by));
            }
            let eps = uniqueness_epsilon(big_c, rates.c, big_c, rates.lambda, rates.mu, n).unwrap();
            adversarial_ok &= sup <= big_c * (1.0 + 1e-9) && sys.dist(&x, &y) <= eps * (1.0 + 1e-9);
        }
    }
    (
        within && recovered <= 1e-10 && adversarial_ok,
        format!(
            "max residual {worst:.6e} <= {:.6e}; L = 0 recovers x0 to {recovered:.1e}; adversarial eps_N pairs ok = {adversarial_ok}",
            2.236 * l + 1e-6
        ),
    )
}

fn smale_conjugacy() -> (bool, String) {
    let s = Solenoid::new(dyadic_matrix()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let samples: Vec<_> = (0..500).map(|_| s.random_point(&mut rng, 64)).collect();
    let h = SmaleConjugacy {
        system: SmaleSystem::default(),
        depth: 40,
    };
    let report = verify_conjugacy(&h, &samples, 1e-6).unwrap();
    let (t, z) = solenoid_to_attractor(&h.system, &s.identity(), 40).unwrap();
    let fixed = t.abs() + (z - Complex64::new(2.0 / 3.0, 0.0)).norm();
    (
        report.passed && fixed <= 1e-9,
        format!(
            "max residual {:.3e} over 500 points; |h(e) - (0, 2/3)| = {fixed:.1e}",
            report.max_residual
        ),
    )
}

fn toral_conjugacy() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let samples: Vec<TorusPoint> = (0..200).map(|_| TorusPoint::new(random_vector(&mut rng, 2, 64))).collect();
    let h = ToralConjugacy {
        map: PerturbedToralMap::new(cat_matrix(), SinePerturbation::planar(0.05)).unwrap(),
        half_width: 60,
        tol: 1e-13,
    };
    let report = verify_conjugacy(&h, &samples, 1e-6).unwrap();
    let zero = PerturbedToralMap::new(cat_matrix(), ZeroPerturbation { k: 2 }).unwrap();
    let identity_err = samples
        .iter()
        .map(|x| {
            let y = perturbed_anosov_conjugacy(&zero, x, 60, 1e-13).unwrap().point;
            torus_dist(&y, &x.to_f64())
        })
        .fold(0.0, f64::max);
    (
        report.passed && identity_err <= 1e-10,
        format!(
            "eps = 0.05: max residual {:.3e}; eps = 0: max |h(x) - x| = {identity_err:.1e}",
            report.max_residual
        ),
    )
}

fn entropy() -> (bool, String) {
    let toral = toral_entropy(&cat_matrix()).unwrap();
    let sft = entropy_sft(&TransitionMatrix::golden_mean()).unwrap().h;
    let toral_ok = (toral - (PHI * PHI).ln()).abs() <= 1e-9 && format!("{toral:.6}") == "0.962424";
    let sft_ok = (sft - PHI.ln()).abs() <= 1e-9 && format!("{sft:.6}") == "0.481212";
    let spec = MapSpec::builtin("smale_solenoid").unwrap();
    let lyap = lyapunov_spectrum(&spec, 100, 20_000, 6, 5).unwrap().positive_sum();
    let lyap_ok = (lyap - 2f64.ln()).abs() <= 1e-3;
    (
        toral_ok && sft_ok && lyap_ok,
        format!("toral {toral:.12} (6 d.p. 0.962424), SFT {sft:.12} (6 d.p. 0.481212), Smale Lyapunov {lyap:.6} vs log 2"),
    )
}

fn measure_laws() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut words = 0;
    for t in [TransitionMatrix::golden_mean(), TransitionMatrix::full_shift(2)] {
        let perron = entropy_sft(&t).unwrap();
        for len in 1..=12 {
            for w in t.words(len) {
                words += 1;
                let weight = rs_unstable_weight(&perron, &w).unwrap();
                let last = *w.last().unwrap();
                let refined: f64 = t
                    .successors(last)
                    .iter()
                    .map(|&j| {
                        let mut longer = w.clone();
                        longer.push(j);
                        rs_unstable_weight(&perron, &longer).unwrap()
                    })
                    .sum();
                worst = worst.max((refined - weight).abs());
                if w.len() > 1 {
                    let tail = rs_unstable_weight(&perron, &w[1..]).unwrap();
                    worst = worst.max((weight - (-perron.h).exp() * tail).abs());
                }
            }
        }
    }
    let golden = entropy_sft(&TransitionMatrix::golden_mean()).unwrap();
    let w = |s: &str| rs_unstable_weight(&golden, &parse_word(s, 2).unwrap()).unwrap();
    let examples = (w("0") - PHI).abs() <= 1e-10 && (w("00") + w("01") - PHI).abs() <= 1e-10;
    (
        worst <= 1e-10 && examples,
        format!("{words} words up to length 12, worst law error {worst:.1e}; weight(0) = {:.12}", w("0")),
    )
}

fn unstable_length_laws() -> (bool, String) {
    let a = cat_matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    let mut ratio_err = 0.0f64;
    let mu = PHI * PHI;
    for _ in 0..500 {
        let n = rng.random_range(2..10);
        let vertices: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)])
            .collect();
        let path = LinearModelPath::new(&a, vertices.clone()).unwrap();
        let mut closed = vertices.clone();
        closed.push(vertices[0].clone());
        worst = worst.max(unstable_length(&path.with_vertices(closed)).abs());
        // a second path with the same endpoints through a random detour
        let mut other = vec![vertices[0].clone(), vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]];
        other.push(vertices[n - 1].clone());
        let l1 = unstable_length(&path);
        let l2 = unstable_length(&path.with_vertices(other));
        worst = worst.max((l1.abs() - l2.abs()).abs());
        let check = unstable_length_scaling_check(&path);
        if l1.abs() > 1e-3 {
            ratio_err = ratio_err.max((check.ratio.unwrap() - mu).abs());
        }
    }
    (
        worst <= 1e-12 && ratio_err <= 1e-10,
        format!("500 paths: worst cycle/path-independence error {worst:.1e}; worst |ratio - mu| {ratio_err:.1e}"),
    )
}

fn classifier() -> (bool, String) {
    use AttractorClass::*;
    let table: [[Option<AttractorClass>; 3]; 4] = [
        [Some(AttractingFixedPoint), None, None],
        [None, Some(Generalized1Solenoid), None],
        [None, Some(TorusT2Automorphism), Some(Codim1Expanding)],
        [None, Some(AnosovT3), Some(AnosovT3)],
    ];
    let mut table_ok = true;
    for (dl, row) in table.iter().enumerate() {
        for (de, expected) in row.iter().enumerate() {
            table_ok &= classify(dl, de).ok() == *expected;
        }
    }

    let config = ClassifierConfig::default();
    let t3 = MapSpec::ToralAuto {
        matrix: vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]],
    };
    let cases = [
        (MapSpec::builtin("smale_solenoid").unwrap(), Generalized1Solenoid),
        (MapSpec::builtin("toral_times_contraction").unwrap(), TorusT2Automorphism),
        (t3, AnosovT3),
        (MapSpec::builtin("fixed_point_sink").unwrap(), AttractingFixedPoint),
    ];
    let mut details = Vec::new();
    let mut reports_ok = true;
    let mut smale_box = f64::NAN;
    let mut lyap_ok = true;
    for (spec, expected) in &cases {
        let r = report(spec, &config, 11).unwrap();
        reports_ok &= r.class_label == *expected && r.quality.passed;
        details.push(format!("{} -> {}", r.spec_name, r.class_label));
        let exps = &r.lyapunov.exponents;
        let ln2 = 2f64.ln();
        let h = (PHI * PHI).ln();
        match spec.name() {
            "smale_solenoid" => {
                smale_box = r.box_dimension.estimate;
                lyap_ok &= [ln2, -2.0 * ln2, -2.0 * ln2]
                    .iter()
                    .zip(exps)
                    .all(|(a, b)| (a - b).abs() <= 1e-2);
            }
            "toral_times_contraction" => {
                lyap_ok &= [h, -ln2, -h].iter().zip(exps).all(|(a, b)| (a - b).abs() <= 1e-2);
            }
            _ => {}
        }
    }
    let cat = MapSpec::builtin("toral_auto").unwrap();
    let cloud = generate_orbit(&cat, config.transient, config.count, 11).unwrap();
    let cat_box = box_counting_dimension(&cloud, &config.boxes).unwrap().estimate;
    let cat_exps = lyapunov_spectrum(&cat, 100, 20_000, 11, 5).unwrap().exponents;
    let h = (PHI * PHI).ln();
    lyap_ok &= (cat_exps[0] - h).abs() <= 1e-3 && (cat_exps[1] + h).abs() <= 1e-3;
    let boxes_ok = (smale_box - 1.5).abs() <= 0.15 && (cat_box - 2.0).abs() <= 0.1;
    (
        table_ok && reports_ok && boxes_ok && lyap_ok,
        format!(
            "table ok = {table_ok}; {}; box Smale {smale_box:.3}, cat {cat_box:.3}; Lyapunov within tolerance = {lyap_ok}",
            details.join(", ")
        ),
    )
}

#[test]
fn acceptance() {
    let mut ledger = Ledger { failures: Vec::new() };
    type Check = fn() -> (bool, String);
    let criteria: [(u32, &str, Check, Duration); 9] = [
        (1, "exact algebra suite", exact_algebra, Duration::from_secs(60)),
        (2, "metric laws", metric_laws, Duration::MAX),
        (3, "shadowing", shadowing, Duration::from_secs(30)),
        (4, "Smale conjugacy", smale_conjugacy, Duration::MAX),
        (5, "perturbed toral conjugacy", toral_conjugacy, Duration::MAX),
        (6, "entropy", entropy, Duration::MAX),
        (7, "measure laws", measure_laws, Duration::MAX),
        (8, "unstable length laws", unstable_length_laws, Duration::MAX),
        (9, "classifier", classifier, Duration::from_secs(300)),
    ];
    for (id, name, check, budget) in criteria {
        let start = Instant::now();
        let (passed, detail) = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let detail = if in_time {
            detail
        } else {
            format!("{detail}; over the {}s budget", budget.as_secs())
        };
        ledger.record(id, name, passed && in_time, elapsed, detail);
    }
    assert!(ledger.failures.is_empty(), "failed criteria:\n{}", ledger.failures.join("\n"));
}
