//! Acceptance suite: ten criteria, one line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use momentgap_core::curves::{
    catalog, lift_and_test, projection_bridge, pushforward_to_curve, CatalogCurve, LiftConfig,
    CATALOG_NAMES,
};
use momentgap_core::hamburger::{
    carleman, christoffel, christoffel_chain, recurrence_from_moments, stieltjes_convergents,
    verdict_1d, weyl_disk, Flavor, Status, Sufficiency, VerdictConfig,
};
use momentgap_core::moments::{
    affine_map, apply_linear_functional, convolve, generate_moments, marginal,
    pushforward_direction, Exact, MeasureDefinition,
};
use momentgap_core::poly::MPoly;
use momentgap_core::riesz::{
    cm_gap_criterion, cosine_envelope, direction_scan, geometric_envelope, grid_gap_lp,
    maclaurin_envelope, poisson_kappa_1d, CmFunction, Grid, Phase, SeparatingFunction,
};
use momentgap_core::{BigFloat, MomentSequence, Rational, Scalar, SupportHint};
use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Q = Rational;
type Cq = Complex<Q>;
type Outcome = Result<String, String>;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn qr(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn gaussian(v: i64) -> MeasureDefinition {
    MeasureDefinition::GaussianProduct {
        variances: vec![Exact(q(v))],
    }
}

fn q_lattice() -> MeasureDefinition {
    MeasureDefinition::QLattice1D { q: Exact(q(2)) }
}

fn moments(def: &MeasureDefinition, n: usize) -> Result<MomentSequence<Q>, String> {
    generate_moments::<Q>(def, def.dimension().map_err(e)?, n, ()).map_err(e)
}

/// Moments through `n` of `sum_j w_j delta_{x_j}` on the line.
fn atomic_1d(points: &[Q], weights: &[Q], n: usize) -> MomentSequence<Q> {
    let values = (0..=n as u32)
        .map(|k| {
            points
                .iter()
                .zip(weights)
                .map(|(x, w)| w * x.pow(k as i32))
                .fold(q(0), |a, b| a + b)
        })
        .collect();
    MomentSequence::from_values(values, (), SupportHint::FullSpace).expect("valid moments")
}

fn random_rational(rng: &mut StdRng, num: i64, den: i64) -> Q {
    qr(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

/// Distinct random atoms.
fn random_atoms(rng: &mut StdRng, count: usize) -> Vec<Q> {
    let mut pts: Vec<Q> = Vec::new();
    while pts.len() < count {
        let x = random_rational(rng, 6, 4);
        if !pts.contains(&x) {
            pts.push(x);
        }
    }
    pts
}

/// `x` with `H x = rhs` by exact Gauss-Jordan elimination.
fn solve(h: &[Vec<Q>], rhs: &[Q]) -> Vec<Q> {
    let n = h.len();
    let mut a: Vec<Vec<Q>> = h
        .iter()
        .zip(rhs)
        .map(|(r, b)| r.iter().cloned().chain([b.clone()]).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| a[r][col] != q(0)).expect("nonsingular");
        a.swap(col, p);
        let pivot = a[col][col].clone();
        for v in a[col].iter_mut() {
            *v = &*v / &pivot;
        }
        let prow = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && row[col] != q(0) {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v = &*v - &f * pv;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n].clone()).collect()
}

/// `min L(|p|^2)` over `deg p <= n`, `p(z) = 1`, by Lagrange multipliers on
/// the Hankel form: `1 / (v^T H^{-1} conj(v))` with `v = (z^k)`.
fn christoffel_oracle(m: &[Q], n: usize, z: &Cq) -> Cq {
    let h: Vec<Vec<Q>> = (0..=n)
        .map(|i| (0..=n).map(|j| m[i + j].clone()).collect())
        .collect();
    let mut pow = vec![Complex::new(q(1), q(0))];
    for k in 1..=n {
        let next = pow[k - 1].clone() * z.clone();
        pow.push(next);
    }
    let re = solve(&h, &pow.iter().map(|c| c.re.clone()).collect::<Vec<_>>());
    let im = solve(&h, &pow.iter().map(|c| -c.im.clone()).collect::<Vec<_>>());
    let form = pow
        .iter()
        .zip(re.iter().zip(&im))
        .fold(Complex::new(q(0), q(0)), |acc, (v, (a, b))| {
            acc + v.clone() * Complex::new(a.clone(), b.clone())
        });
    Complex::new(q(1), q(0)) / form
}

fn criterion_1() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0001);
    let mut checked = 0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=10usize);
        let count = n + 1 + rng.gen_range(0..3usize);
        let pts = random_atoms(&mut rng, count);
        let wts: Vec<Q> = (0..count)
            .map(|_| qr(rng.gen_range(1..=9), rng.gen_range(1..=5)))
            .collect();
        let seq = atomic_1d(&pts, &wts, 2 * n);
        let m = seq.values_1d().map_err(e)?;
        let rec = recurrence_from_moments(&seq, n).map_err(e)?;
        for _ in 0..5 {
            let z = Complex::new(
                random_rational(&mut rng, 5, 3),
                random_rational(&mut rng, 5, 3),
            );
            let rho = christoffel(&rec, &z, n).map_err(e)?;
            let oracle = christoffel_oracle(&m, n, &z);
            ensure(oracle.im == q(0) && oracle.re == rho, || {
                format!("n = {n}, z = {z}: recurrence {rho}, Hankel form {oracle}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} exact matches"))
}

fn criterion_2() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0002);
    for r in 2..=4usize {
        let pts = random_atoms(&mut rng, r);
        let wts: Vec<Q> = (0..r)
            .map(|_| qr(rng.gen_range(1..=9), rng.gen_range(1..=5)))
            .collect();
        let seq = atomic_1d(&pts, &wts, 2 * r + 2);
        let rec = recurrence_from_moments(&seq, r + 1).map_err(e)?;
        ensure(rec.rank() == Some(r), || {
            format!("r = {r}: rank {:?}", rec.rank())
        })?;
        let z = Complex::new(
            random_rational(&mut rng, 5, 3),
            qr(rng.gen_range(1..=5), rng.gen_range(1..=3)),
        );
        let disk = weyl_disk(&rec, &z, r - 1).map_err(e)?;
        let cauchy = pts
            .iter()
            .zip(&wts)
            .fold(Complex::new(q(0), q(0)), |acc, (x, w)| {
                acc + Complex::new(w.clone(), q(0)) / (Complex::new(x.clone(), q(0)) - z.clone())
            });
        ensure(disk.radius_sq == q(0), || {
            format!("r = {r}: radius^2 = {}", disk.radius_sq)
        })?;
        ensure(disk.center == cauchy, || {
            format!("r = {r}: center {} vs Cauchy {cauchy}", disk.center)
        })?;
        let kappa = poisson_kappa_1d(&seq, &z.re, &z.im, r - 1).map_err(e)?;
        ensure(kappa == q(0), || format!("r = {r}: kappa = {kappa}"))?;
    }
    Ok("radius 0, center = Cauchy transform, kappa 0 for r = 2, 3, 4".into())
}

fn criterion_3() -> Outcome {
    let bits = 512;
    let seq = generate_moments::<BigFloat>(&gaussian(1), 1, 200, bits).map_err(e)?;
    let c = carleman(
        &seq,
        Flavor::Hamburger,
        100,
        VerdictConfig::default().carleman_c,
    )
    .map_err(e)?;
    ensure(c.partial_sum > 10.0 && c.diverging, || {
        format!(
            "Carleman K = 100: sum {}, slope test {}",
            c.partial_sum, c.diverging
        )
    })?;
    let low = seq.truncate(80).map_err(e)?;
    let rec = recurrence_from_moments(&low, 40).map_err(e)?;
    let i = Complex::new(BigFloat::from_int(0, &bits), BigFloat::from_int(1, &bits));
    let chain = christoffel_chain(&rec, &i, 40).map_err(e)?;
    ensure(chain.windows(2).all(|w| w[1] < w[0]), || {
        "rho_n(i) is not strictly decreasing".into()
    })?;
    let ratio = chain[40].to_f64() / chain[20].to_f64();
    ensure(ratio < 0.9, || format!("rho_40 / rho_20 = {ratio}"))?;
    let v = verdict_1d(&low, Flavor::Hamburger, &VerdictConfig::default()).map_err(e)?;
    ensure(v.status == Status::Determinate, || {
        format!("verdict {:?}", v.status)
    })?;
    Ok(format!(
        "Carleman sum {:.3}, rho_40/rho_20 = {ratio:.4}, determinate",
        c.partial_sum
    ))
}

fn criterion_4() -> Outcome {
    let seq = moments(&q_lattice(), 200)?;
    let c = carleman(
        &seq,
        Flavor::Hamburger,
        100,
        VerdictConfig::default().carleman_c,
    )
    .map_err(e)?;
    let top = c.partial_sums.iter().cloned().fold(0.0, f64::max);
    ensure(c.partial_sums.len() >= 100 && top <= 2.1, || {
        format!("Carleman partial sums reach {top}")
    })?;
    let low = seq.truncate(60).map_err(e)?;
    let rec = recurrence_from_moments(&low, 30).map_err(e)?;
    let i = Complex::new(q(0), q(1));
    let chain = christoffel_chain(&rec, &i, 30).map_err(e)?;
    let plateau = (chain[30].clone() / chain[15].clone()).to_f64();
    ensure(plateau > 0.9, || format!("rho_30 / rho_15 = {plateau}"))?;
    let levels = stieltjes_convergents(&low, &q(-1), 30).map_err(e)?;
    let at = |n: usize| levels.iter().find(|l| l.level == n).expect("level present");
    let (a, b, c3) = (at(10), at(20), at(30));
    for l in [a, b, c3] {
        ensure(l.width > q(0), || {
            format!("width at level {} is {}", l.level, l.width)
        })?;
    }
    let nested = |outer: &momentgap_core::hamburger::StieltjesLevel<Q>,
                  inner: &momentgap_core::hamburger::StieltjesLevel<Q>| {
        outer.lower <= inner.lower && inner.upper <= outer.upper
    };
    ensure(nested(a, b) && nested(b, c3), || {
        "Stieltjes intervals are not nested".into()
    })?;
    let width_ratio = (c3.width.clone() / a.width.clone()).to_f64();
    ensure(width_ratio > 0.5, || {
        format!("width_30 / width_10 = {width_ratio}")
    })?;
    let v = verdict_1d(&low, Flavor::Hamburger, &VerdictConfig::default()).map_err(e)?;
    ensure(v.status == Status::Indeterminate && v.numeric, || {
        format!("verdict {:?}, numeric {}", v.status, v.numeric)
    })?;
    Ok(format!(
        "Carleman max {top:.4}, rho_30/rho_15 = {plateau:.6}, width_30/width_10 = {width_ratio:.4}, indeterminate (numeric)"
    ))
}

fn criterion_5() -> Outcome {
    let g = moments(&gaussian(1), 12)?;
    let x = moments(&MeasureDefinition::Exponential1D, 12)?;
    let mut envelopes = 0;
    for m in 1..=6 {
        let env = cosine_envelope(&g, m, Phase::Zero).map_err(e)?;
        ensure(env.checked_points >= 1000, || {
            format!("cosine order {m}: {} points", env.checked_points)
        })?;
        envelopes += 1;
    }
    for n in 1..=6 {
        for env in [
            geometric_envelope(&x, n).map_err(e)?,
            maclaurin_envelope(&CmFunction::NegExp, &x, n).map_err(e)?,
        ] {
            ensure(env.checked_points >= 1000, || {
                format!("MacLaurin order {n}: {} points", env.checked_points)
            })?;
            envelopes += 1;
        }
    }
    let gap1 = geometric_envelope(&x, 1).map_err(e)?.gap;
    ensure(gap1 == q(2), || {
        format!("geometric gap_1 = {gap1}, m_2 = 2")
    })?;
    let omega = MPoly::variable(1, 0, &());
    let cm = cm_gap_criterion(&CmFunction::NegExp, &x, &omega, 6).map_err(e)?;
    ensure(cm.values.iter().all(|v| *v == q(1)), || {
        format!("cm gaps {:?}", cm.values)
    })?;
    Ok(format!(
        "{envelopes} envelopes hold on 1001 points; gap_1 = m_2 = 2; cm gap constant 1"
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    for d in [2usize, 3] {
        let count = 5;
        let atoms: Vec<Vec<Q>> = (0..count)
            .map(|_| (0..d).map(|_| random_rational(&mut rng, 4, 3)).collect())
            .collect();
        let weights: Vec<Q> = (0..count)
            .map(|_| qr(rng.gen_range(1..=7), rng.gen_range(1..=4)))
            .collect();
        let def = MeasureDefinition::Atomic {
            points: atoms
                .iter()
                .map(|p| p.iter().cloned().map(Exact).collect())
                .collect(),
            weights: weights.iter().cloned().map(Exact).collect(),
        };
        let seq = generate_moments::<Q>(&def, d, 10, ()).map_err(e)?;
        for _ in 0..3 {
            let xi: Vec<Q> = (0..d).map(|_| random_rational(&mut rng, 5, 4)).collect();
            if xi.iter().all(|v| *v == q(0)) {
                continue;
            }
            let pf = pushforward_direction(&seq, &xi, 10).map_err(e)?;
            let form = MPoly::affine_form(&xi, q(0));
            for k in 0..=10u32 {
                let direct = apply_linear_functional(&seq, &form.pow(k)).map_err(e)?;
                let brute = atoms.iter().zip(&weights).fold(q(0), |acc, (p, w)| {
                    let dot = p.iter().zip(&xi).fold(q(0), |s, (a, b)| s + a * b);
                    acc + w * dot.pow(k as i32)
                });
                let got = pf.values_1d().map_err(e)?[k as usize].clone();
                ensure(got == direct && got == brute, || {
                    format!("d = {d}, k = {k}: {got} vs {direct} vs {brute}")
                })?;
            }
        }
    }
    let g1 = moments(&gaussian(1), 8)?;
    let g2 = moments(&gaussian(2), 8)?;
    ensure(
        convolve(&g1, &g1).map_err(e)?.values_1d() == g2.values_1d(),
        || "Gaussian * Gaussian differs from variance 2".into(),
    )?;
    let dirac0 = atomic_1d(&[q(0)], &[q(1)], 8);
    ensure(
        convolve(&g1, &dirac0).map_err(e)?.values_1d() == g1.values_1d(),
        || "convolution with delta_0 is not the identity".into(),
    )?;
    let shift = qr(3, 2);
    let dirac = atomic_1d(std::slice::from_ref(&shift), &[q(1)], 8);
    let moved = affine_map(&g1, &[vec![q(1)]], &[shift], None).map_err(e)?;
    ensure(
        convolve(&g1, &dirac).map_err(e)?.values_1d() == moved.values_1d(),
        || "convolution with delta_a is not translation by a".into(),
    )?;
    Ok(
        "push-forwards match expansion and brute force for d = 2, 3; convolution identities hold"
            .into(),
    )
}

fn criterion_7() -> Outcome {
    for a in [q(1), qr(3, 2)] {
        for name in CATALOG_NAMES {
            match catalog(name, Some(a.clone())).map_err(e)? {
                CatalogCurve::Parametrized(c) => {
                    for eq in c.implicit() {
                        ensure(eq.compose_univariate(c.components()).is_zero(), || {
                            format!(
                                "{name}: implicit equation does not vanish on the parametrization"
                            )
                        })?;
                    }
                }
                CatalogCurve::ImplicitOnly { .. } => {}
            }
        }
    }
    let sigma = moments(&gaussian(1), 20)?;
    let parabola = catalog("parabola", None).map_err(e)?;
    let CatalogCurve::Parametrized(parabola) = parabola else {
        return Err("parabola is not parametrized".into());
    };
    let cm = pushforward_to_curve(&sigma, &parabola, 10).map_err(e)?;
    let x_axis = marginal(&cm.curve_moments, &[0]).map_err(e)?;
    let bridge = projection_bridge(&sigma, 10).map_err(e)?;
    let s = sigma.values_1d().map_err(e)?;
    let via_curve = x_axis.values_1d().map_err(e)?;
    let via_bridge = bridge.values_1d().map_err(e)?;
    for k in 0..=10 {
        ensure(
            via_curve[k] == s[2 * k] && via_bridge[k] == s[2 * k],
            || format!("bridge fails at k = {k}"),
        )?;
    }
    let config = LiftConfig::default();
    let lattice = moments(&q_lattice(), 40)?;
    let v_lattice = lift_and_test(
        &pushforward_to_curve(&lattice, &parabola, 20).map_err(e)?,
        &config,
    )
    .map_err(e)?;
    ensure(v_lattice.status == Status::Indeterminate, || {
        format!("QLattice lift: {:?}", v_lattice.status)
    })?;
    let v_gauss = lift_and_test(
        &pushforward_to_curve(&sigma, &parabola, 10).map_err(e)?,
        &config,
    )
    .map_err(e)?;
    ensure(v_gauss.status == Status::Determinate, || {
        format!("Gaussian lift: {:?}", v_gauss.status)
    })?;
    Ok("catalog equations vanish; bridge holds through degree 10; lifts keep both verdicts".into())
}

fn criterion_8() -> Outcome {
    let seq = moments(&q_lattice(), 8)?;
    let grid = Grid::default_for(&seq).map_err(e)?;
    let phi = SeparatingFunction::CauchyRe {
        z: [Exact(q(0)), Exact(q(1))],
    };
    let est = grid_gap_lp(&seq, &phi, 8, &grid).map_err(e)?;
    let rec = recurrence_from_moments(&seq, 4).map_err(e)?;
    let disk = weyl_disk(&rec, &Complex::new(q(0), q(1)), 3).map_err(e)?;
    let diameter = disk.diameter();
    // the grid relaxation only shrinks the feasible set, so no slack is needed
    ensure(est.gap <= diameter, || {
        format!(
            "LP gap {} exceeds the disk diameter {}",
            est.gap.to_f64(),
            diameter.to_f64()
        )
    })?;

    let two = atomic_1d(&[q(0), q(1)], &[qr(1, 3), qr(2, 3)], 6);
    let grid = Grid::default_for(&two).map_err(e)?;
    for n in [2usize, 3] {
        let est = grid_gap_lp(&two, &phi, 2 * n, &grid).map_err(e)?;
        ensure(est.gap == q(0), || {
            format!("two atoms, degree {}: gap {}", 2 * n, est.gap)
        })?;
    }
    Ok(format!(
        "QLattice LP gap {:.4e} <= Weyl diameter {:.4e}; two atoms close exactly at degrees 4 and 6",
        est.gap.to_f64(),
        diameter.to_f64()
    ))
}

fn criterion_9() -> Outcome {
    let config = VerdictConfig::default();
    let product = moments(
        &MeasureDefinition::GaussianProduct {
            variances: vec![Exact(q(1)), Exact(q(2))],
        },
        16,
    )?;
    let axes = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
    let full = direction_scan(&product, &axes, Flavor::Hamburger, &config).map_err(e)?;
    ensure(
        full.status == Status::Determinate && full.determinate_rank == 2,
        || {
            format!(
                "Gaussian product over both axes: {:?}, rank {}",
                full.status, full.determinate_rank
            )
        },
    )?;
    ensure(
        full.sufficiency == Some(Sufficiency::RigorousSufficient),
        || format!("sufficiency {:?}", full.sufficiency),
    )?;
    let single = direction_scan(&product, &axes[..1], Flavor::Hamburger, &config).map_err(e)?;
    ensure(single.status == Status::Inconclusive, || {
        format!("single direction: {:?}", single.status)
    })?;
    let mixed_def = MeasureDefinition::Product {
        factors: vec![gaussian(1), q_lattice()],
    };
    let mixed = generate_moments::<Q>(&mixed_def, 2, 16, ()).map_err(e)?;
    let dirs = vec![vec![q(1), q(0)], vec![q(0), q(1)], vec![q(1), q(1)]];
    let scan = direction_scan(&mixed, &dirs, Flavor::Hamburger, &config).map_err(e)?;
    ensure(scan.status == Status::Indeterminate, || {
        format!("Gaussian x QLattice: {:?}", scan.status)
    })?;
    Ok(
        "full basis -> determinate, one axis -> inconclusive, Gaussian x QLattice -> indeterminate"
            .into(),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let input = dir.path().join("gaussian.json");
    std::fs::write(
        &input,
        r#"{"kind": "gaussian_product", "variances": ["1"]}"#,
    )
    .map_err(e)?;
    let run = || -> Result<String, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_momentgap"))
            .args(["analyze", "--input"])
            .arg(&input)
            .args(["--degree", "12"])
            .env_remove("SOURCE_DATE_EPOCH")
            .output()
            .map_err(e)?;
        ensure(out.status.code() == Some(0), || {
            format!("exit status {:?}", out.status.code())
        })?;
        let text = String::from_utf8(out.stdout).map_err(e)?;
        Ok(text
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n"))
    };
    let first = run()?;
    let second = run()?;
    ensure(first == second, || {
        "reports differ outside the timestamp".into()
    })?;
    ensure(first.contains("\"verdict\""), || {
        "report has no verdict".into()
    })?;
    Ok(format!("two runs agree on {} bytes", first.len()))
}

fn main() {
    let criteria: [(fn() -> Outcome, Duration); 10] = [
        (criterion_1, Duration::from_secs(30)),
        (criterion_2, Duration::from_secs(10)),
        (criterion_3, Duration::from_secs(60)),
        (criterion_4, Duration::from_secs(300)),
        (criterion_5, Duration::from_secs(10)),
        (criterion_6, Duration::from_secs(10)),
        (criterion_7, Duration::from_secs(30)),
        (criterion_8, Duration::from_secs(60)),
        (criterion_9, Duration::from_secs(60)),
        (criterion_10, Duration::from_secs(10)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= *budget {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.1?}, budget {budget:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS ({elapsed:.2?}) {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2}: FAIL ({elapsed:.2?}) {why}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
