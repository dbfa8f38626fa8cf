//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use shadow_transport::coupling::{
    barrier_audit, irreducible_decompose, monotonicity_audit, ComponentKind,
};
use shadow_transport::experiments::stability_experiment;
use shadow_transport::measures::UpDown;
use shadow_transport::verify::{
    lp_min_cost_matrix, optimality_trials, random_instance, random_source, random_target, rng_for,
    shadow_put_oracle, spence_mirrlees_cost, InstanceKind, LpStatus,
};
use shadow_transport::{
    hitting_coupling, hitting_projection, lifted_shadow_coupling, make_lift, order_check,
    pi_decreasing, rs_at, shadow, DiscreteMeasure, LiftKind, OrderRelation, PiecewiseLinear,
    TargetSet,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn m(atoms: &[(f64, f64)]) -> DiscreteMeasure {
    DiscreteMeasure::new(atoms.iter().copied()).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {t:?}, limit {limit:?}"))
}

fn shadow_fixture() -> Outcome {
    let start = Instant::now();
    let mu = m(&[(0.0, 0.5)]);
    let nu = m(&[(-1.0, 0.5), (1.0, 0.5)]);
    let r = shadow(&mu, &nu).map_err(|e| e.to_string())?;
    let want = m(&[(-1.0, 0.25), (1.0, 0.25)]);
    ensure(r.shadow.max_atom_diff(&want) <= 1e-12, || {
        format!("shadow {}", r.shadow)
    })?;
    ensure(r.defect.abs() <= 1e-12, || format!("defect {}", r.defect))?;
    let p = r.shadow.put();
    for k in [-1.0, 0.0, 1.0] {
        let oracle = shadow_put_oracle(&mu, &nu, k).map_err(|e| e.to_string())?;
        ensure(close(oracle, p.eval(k), 1e-9), || {
            format!("put at {k}: shadow {} vs LP {oracle}", p.eval(k))
        })?;
    }
    within(Duration::from_secs(1), start)?;
    Ok("atoms exact, put oracle agrees at -1, 0, 1".into())
}

fn two_regime_fixture() -> Outcome {
    let start = Instant::now();
    let mu = m(&[(0.0, 1.0)]);
    let nu = m(&[(-2.0, 0.5), (1.0, 0.5)]);
    let pd = pi_decreasing(&mu, &nu).map_err(|e| e.to_string())?;
    let cells = pd.coupling.cells();
    ensure(
        cells.len() == 2
            && close(pd.coupling.weight(0.0, -2.0), 0.5, 1e-12)
            && close(pd.coupling.weight(0.0, 1.0), 0.5, 1e-12),
        || format!("coupling {cells:?}"),
    )?;
    let b = pd.lifted.boundaries();
    ensure(b.len() == 3 && close(b[1], 0.75, 1e-12), || {
        format!("boundaries {b:?}")
    })?;
    let ms = &pd.c_curve.martingale_set;
    ensure(
        ms.len() == 1 && close(ms[0].0, 0.0, 1e-12) && close(ms[0].1, 0.75, 1e-12),
        || format!("martingale set {ms:?}"),
    )?;
    ensure(close(pd.c_curve.terminal(), 0.5, 1e-12), || {
        format!("c(1) = {}", pd.c_curve.terminal())
    })?;
    let p = rs_at(&mu, &nu, 0.5).map_err(|e| e.to_string())?;
    ensure(
        close(p.r, -2.0, 1e-12) && close(p.s, 1.0, 1e-12) && close(p.phi, -1.0 / 6.0, 1e-12),
        || format!("rs_at(1/2) = {p:?}"),
    )?;
    let p = rs_at(&mu, &nu, 0.875).map_err(|e| e.to_string())?;
    ensure(
        close(p.r, -2.0, 1e-12) && p.s == f64::INFINITY && close(p.phi, 0.0, 1e-12),
        || format!("rs_at(7/8) = {p:?}"),
    )?;
    let lift = pd.lifted.lift();
    for i in 1..=10 {
        let u = i as f64 / 10.0;
        let got = pd.lifted.consumed_at(u).map_err(|e| e.to_string())?;
        let src = lift.cumulative(u).map_err(|e| e.to_string())?;
        let want = shadow(&src, &nu).map_err(|e| e.to_string())?.shadow;
        ensure(got.max_atom_diff(&want) <= 1e-9, || {
            format!("u = {u}: engine {got} vs shadow {want}")
        })?;
    }
    within(Duration::from_secs(1), start)?;
    Ok("coupling, event at 3/4, c(1) = 1/2, R/S values, 10 shadow cross-checks".into())
}

fn optimality() -> Outcome {
    let start = Instant::now();
    let r = optimality_trials(200, 20240101, 6, &spence_mirrlees_cost(1.0));
    ensure(r.passed(), || {
        format!(
            "{} failures, first {:?}",
            r.failures.len(),
            r.failures.first()
        )
    })?;
    within(Duration::from_secs(60), start)?;
    Ok(format!(
        "200 trials, max value gap {:.1e}, max cell gap {:.1e}",
        r.max_value_gap, r.max_cell_gap
    ))
}

fn stability() -> Outcome {
    let start = Instant::now();
    let r = stability_experiment(500, 7).map_err(|e| e.to_string())?;
    ensure(r.violations.is_empty(), || {
        format!(
            "{} violations, first {:?}",
            r.violations.len(),
            r.violations.first()
        )
    })?;
    within(Duration::from_secs(60), start)?;
    let t = r.tightness.map(|t| t.max).unwrap_or(0.0);
    Ok(format!(
        "500 quadruples, max lhs - rhs {:.2e}, max ratio {t:.3}",
        r.max_violation
    ))
}

fn instance(seed: u64, kind: InstanceKind) -> (DiscreteMeasure, DiscreteMeasure) {
    let mut rng = rng_for(seed ^ 0x5eed);
    let n = rng.gen_range(1..=6);
    let k = rng.gen_range(1..=6);
    random_instance(seed, n, k, kind)
}

fn engine_formula() -> Outcome {
    let mut checked = 0;
    for seed in 0..100 {
        let kind = if seed % 4 == 3 {
            InstanceKind::EqualMeans
        } else {
            InstanceKind::GeneralCd
        };
        let (mu, nu) = instance(1000 + seed, kind);
        for lk in [
            LiftKind::DecreasingQuantile,
            LiftKind::IncreasingQuantile,
            LiftKind::Uniform,
        ] {
            let lift = make_lift(lk, &mu).map_err(|e| e.to_string())?;
            let lc = lifted_shadow_coupling(&lift, &mu, &nu)
                .map_err(|e| format!("seed {seed} {lk:?}: {e}"))?;
            for u in lc.boundaries() {
                let got = lc.consumed_at(u).map_err(|e| e.to_string())?;
                let src = lift.cumulative(u).map_err(|e| e.to_string())?;
                let want = shadow(&src, &nu).map_err(|e| e.to_string())?.shadow;
                ensure(got.max_atom_diff(&want) <= 1e-9, || {
                    format!("seed {seed} {lk:?} u = {u}: engine {got} vs shadow {want}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("100 instances x 3 lifts, {checked} boundaries"))
}

fn monotonicity() -> Outcome {
    for seed in 0..100 {
        let (mu, nu) = instance(2000 + seed, InstanceKind::GeneralCd);
        let pd = pi_decreasing(&mu, &nu).map_err(|e| format!("seed {seed}: {e}"))?;
        let report = monotonicity_audit(&pd.coupling, &pd.martingale_sources());
        ensure(report.is_clean(), || format!("seed {seed}: {report:?}"))?;
    }
    Ok("100 instances, no violations".into())
}

fn hitting_uniqueness() -> Outcome {
    let mut rng = rng_for(77);
    for t in 0..100 {
        let k = rng.gen_range(1..=6);
        let targets = random_target(&mut rng, k);
        let set = TargetSet::support_of(&targets).map_err(|e| e.to_string())?;
        let (lo, hi) = (set.min(), set.max() + 2.0);
        let n = rng.gen_range(1..=6);
        let raw: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let x = if rng.gen_bool(0.3) {
                    set.points()[rng.gen_range(0..set.points().len())]
                } else {
                    rng.gen_range(lo..hi)
                };
                (x, rng.gen_range(0.1..1.0))
            })
            .collect();
        let total: f64 = raw.iter().map(|a| a.1).sum();
        let mu = DiscreteMeasure::new(raw.into_iter().map(|(x, w)| (x, w / total)))
            .map_err(|e| e.to_string())?;
        let nu = hitting_projection(&mu, &set).map_err(|e| format!("case {t}: {e}"))?;
        let hit = hitting_coupling(&mu, &set).map_err(|e| e.to_string())?;
        for _ in 0..2 {
            let cost: Vec<Vec<f64>> = (0..mu.len())
                .map(|_| (0..nu.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let lp = lp_min_cost_matrix(&mu, &nu, &cost, 2500).map_err(|e| e.to_string())?;
            ensure(lp.status == LpStatus::Optimal, || {
                format!("case {t}: LP {:?}", lp.status)
            })?;
            let gap = lp.coupling.max_cell_diff(&hit);
            ensure(gap <= 1e-8, || format!("case {t}: cell gap {gap:e}"))?;
        }
    }
    Ok("100 cases, both objectives return the hitting coupling".into())
}

fn equal_means() -> Outcome {
    for seed in 0..50 {
        let (mu, nu) = instance(3000 + seed, InstanceKind::EqualMeans);
        let pd = pi_decreasing(&mu, &nu).map_err(|e| format!("seed {seed}: {e}"))?;
        let c1 = pd.c_curve.terminal();
        ensure(c1.abs() <= 1e-10, || format!("seed {seed}: c(1) = {c1:e}"))?;
        let ms = &pd.c_curve.martingale_set;
        ensure(
            ms.len() == 1 && close(ms[0].0, 0.0, 1e-12) && close(ms[0].1, 1.0, 1e-12),
            || format!("seed {seed}: martingale set {ms:?}"),
        )?;
        let scale = 1.0 + nu.position_scale();
        for (x, mass, first) in pd.coupling.rows() {
            let mean = first / mass;
            ensure((mean - x).abs() <= 1e-10 * scale, || {
                format!("seed {seed}: row {x} has mean {mean}")
            })?;
        }
    }
    Ok("50 instances, c(1) = 0, martingale set [0, 1], rows are martingale".into())
}

/// A probability measure on up to `k` reals drawn from `[-4, 4]`.
fn random_law<R: Rng>(rng: &mut R, k: usize) -> DiscreteMeasure {
    let raw: Vec<(f64, f64)> = (0..rng.gen_range(1..=k))
        .map(|_| {
            let x = if rng.gen_bool(0.5) {
                rng.gen_range(-4..=4) as f64
            } else {
                rng.gen_range(-4.0..4.0)
            };
            (x, rng.gen_range(0.1..1.0))
        })
        .collect();
    let total: f64 = raw.iter().map(|a| a.1).sum();
    DiscreteMeasure::new(raw.into_iter().map(|(x, w)| (x, w / total))).unwrap()
}

fn up_down_lemmas() -> Result<(), String> {
    let mut rng = rng_for(91);
    let err = |e: shadow_transport::Error| e.to_string();
    for t in 0..200 {
        let a = random_law(&mut rng, 6);
        let b = random_law(&mut rng, 6);
        let down = a.up_down(&b, UpDown::Down).map_err(err)?;
        let up = a.up_down(&b, UpDown::Up).map_err(err)?;
        for (lo, hi, what) in [
            (&down, &a, "Down <= first"),
            (&down, &b, "Down <= second"),
            (&a, &up, "first <= Up"),
            (&b, &up, "second <= Up"),
        ] {
            ensure(order_check(OrderRelation::Sto, lo, hi), || {
                format!("case {t}: {what} fails for {a} and {b}")
            })?;
        }
        let w = a.wasserstein1(&b).map_err(err)?;
        let via_down = a.wasserstein1(&down).map_err(err)? + b.wasserstein1(&down).map_err(err)?;
        let via_up = a.wasserstein1(&up).map_err(err)? + b.wasserstein1(&up).map_err(err)?;
        let tol = 1e-9 * a.position_scale().max(b.position_scale());
        ensure(close(w, via_down, tol) && close(w, via_up, tol), || {
            format!("case {t}: W = {w}, via Down {via_down}, via Up {via_up}")
        })?;
    }

    // Both constraints hold by construction only for the first measure, so
    // the second is checked by rejection.
    let mut accepted = 0;
    let mut tries = 0;
    while accepted < 200 {
        tries += 1;
        ensure(tries <= 20_000, || {
            format!("only {accepted} lower bounds found")
        })?;
        let (k, k2, n) = (
            rng.gen_range(1..=6),
            rng.gen_range(1..=6),
            rng.gen_range(1..=5),
        );
        let chi = random_target(&mut rng, k);
        let chi2 = random_target(&mut rng, k2);
        let frac = rng.gen_range(0.2..0.8);
        let eta = random_source(&mut rng, &chi.scaled(frac), n, InstanceKind::GeneralCd);
        if !order_check(OrderRelation::Pcd, &eta, &chi2) {
            continue;
        }
        accepted += 1;
        let down = chi.up_down(&chi2, UpDown::Down).map_err(err)?;
        ensure(order_check(OrderRelation::Pcd, &eta, &down), || {
            format!("common lower bound {eta} is not below Down({chi}, {chi2}) = {down}")
        })?;
    }

    for t in 0..200 {
        let (k, n, n2) = (
            rng.gen_range(1..=6),
            rng.gen_range(1..=5),
            rng.gen_range(1..=5),
        );
        let chi = random_target(&mut rng, k);
        let frac = rng.gen_range(0.2..1.0);
        let below = chi.scaled(frac);
        let eta = random_source(&mut rng, &below, n, InstanceKind::GeneralCd);
        let eta2 = random_source(&mut rng, &below, n2, InstanceKind::GeneralCd);
        let up = eta.up_down(&eta2, UpDown::Up).map_err(err)?;
        ensure(order_check(OrderRelation::Pcd, &up, &chi), || {
            format!("case {t}: Up({eta}, {eta2}) = {up} is not below {chi}")
        })?;
    }
    Ok(())
}

/// A piecewise-linear function with tail slopes `l ≤ r`, so its hull exists.
fn random_pwl<R: Rng>(rng: &mut R) -> PiecewiseLinear {
    let k = rng.gen_range(1..=7);
    let mut xs: Vec<f64> = (0..k)
        .map(|_| {
            if rng.gen_bool(0.5) {
                rng.gen_range(-5..=5) as f64
            } else {
                rng.gen_range(-5.0..5.0)
            }
        })
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let ys = xs.iter().map(|_| rng.gen_range(-3.0..3.0)).collect();
    let l = rng.gen_range(-2.0..0.5);
    let r = rng.gen_range(l..2.5);
    PiecewiseLinear::new(xs, ys, l, r).unwrap()
}

/// A non-decreasing piecewise-linear function with tail slopes in `[0, lmax]`
/// and `[rmin, rmin + 1]`.
fn random_increasing<R: Rng>(rng: &mut R, lmax: f64, rmin: f64) -> PiecewiseLinear {
    let k = rng.gen_range(1..=5);
    let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(-5.0..5.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut y = rng.gen_range(-1.0..1.0);
    let ys = xs
        .iter()
        .map(|_| {
            y += if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen_range(0.0..2.0)
            };
            y
        })
        .collect();
    PiecewiseLinear::new(
        xs,
        ys,
        rng.gen_range(0.0..=lmax),
        rng.gen_range(rmin..rmin + 1.0),
    )
    .unwrap()
}

/// Breakpoints of all the functions, the midpoints between them and points
/// beyond both ends.
fn probe_points(fs: &[&PiecewiseLinear]) -> Vec<f64> {
    let mut xs: Vec<f64> = fs
        .iter()
        .flat_map(|f| f.breakpoints().iter().copied())
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut out = xs.clone();
    out.extend(xs.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    if let (Some(&a), Some(&b)) = (xs.first(), xs.last()) {
        out.extend([a - 1.0, b + 1.0]);
    }
    out
}

fn hull_lemmas() -> Result<(), String> {
    let mut rng = rng_for(92);
    let err = |e: shadow_transport::Error| e.to_string();
    for t in 0..200 {
        let f = random_pwl(&mut rng);
        let h = random_increasing(&mut rng, 0.5, 0.5);
        let g = PiecewiseLinear::combine(1.0, &f, 1.0, &h);
        let (fc, gc) = (f.convex_hull().map_err(err)?, g.convex_hull().map_err(err)?);
        for x in probe_points(&[&fc, &gc, &f, &g]) {
            let (a, b) = (fc.right_slope(x), gc.right_slope(x));
            ensure(a <= b + 1e-9 * (1.0 + a.abs()), || {
                format!("case {t}: hull slopes at {x}: {a} > {b}")
            })?;
        }
    }

    for t in 0..200 {
        let f = random_pwl(&mut rng);
        // A non-negative bump: zero tails, non-negative values.
        let k = rng.gen_range(1..=5);
        let mut xs: Vec<f64> = (0..k).map(|_| rng.gen_range(-6.0..6.0)).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut ys: Vec<f64> = xs.iter().map(|_| rng.gen_range(0.0..2.0)).collect();
        let n = ys.len();
        ys[0] = 0.0;
        ys[n - 1] = 0.0;
        let bump_max = ys.iter().copied().fold(0.0, f64::max);
        let bump = PiecewiseLinear::new(xs, ys, 0.0, 0.0).unwrap();
        let fc = f.convex_hull().map_err(err)?;
        let probes = probe_points(&[&f, &bump, &fc]);
        let mut prev: Option<PiecewiseLinear> = None;
        for j in 0..12 {
            let eps = 0.5_f64.powi(j);
            let fj = PiecewiseLinear::combine(1.0, &f, eps, &bump);
            let hj = fj.convex_hull().map_err(err)?;
            for &x in &probes {
                let (v, lim) = (hj.eval(x), fc.eval(x));
                let tol = 1e-9 * (1.0 + lim.abs());
                ensure(v >= lim - tol && v <= lim + eps * bump_max + tol, || {
                    format!("case {t}: hull at {x} with eps {eps}: {v} vs limit {lim}")
                })?;
                if let Some(p) = &prev {
                    ensure(v <= p.eval(x) + tol, || {
                        format!("case {t}: hull increased at {x} when eps fell to {eps}")
                    })?;
                }
            }
            prev = Some(hj);
        }
    }
    Ok(())
}

fn appendix_properties() -> Outcome {
    up_down_lemmas()?;
    hull_lemmas()?;
    Ok(
        "Up/Down order, metric split and bounds; hull slopes and convergence, 200 cases each"
            .into(),
    )
}

fn decomposition() -> Outcome {
    let mu = m(&[(-1.0, 0.5), (1.0, 0.5)]);
    let nu = m(&[(-1.0, 0.5), (0.0, 0.25), (2.0, 0.25)]);
    let d = irreducible_decompose(&mu, &nu).map_err(|e| e.to_string())?;
    ensure(d.x_star == f64::INFINITY, || format!("x* = {}", d.x_star))?;
    let kinds: Vec<_> = d.components.iter().map(|c| c.kind).collect();
    ensure(
        kinds == [ComponentKind::Identity, ComponentKind::Martingale],
        || format!("components {kinds:?}"),
    )?;
    let (id, mc) = (&d.components[0], &d.components[1]);
    ensure(
        (id.interval.lo, id.interval.hi) == (-1.0, 0.0)
            && id.mu == m(&[(-1.0, 0.5)])
            && id.nu == id.mu,
        || format!("identity component {id:?}"),
    )?;
    ensure(
        (mc.interval.lo, mc.interval.hi) == (0.0, 2.0)
            && mc.mu == m(&[(1.0, 0.5)])
            && mc.nu == m(&[(0.0, 0.25), (2.0, 0.25)]),
        || format!("martingale component {mc:?}"),
    )?;

    let mut zeros = 0;
    for seed in 0..100 {
        let kind = if seed % 2 == 0 {
            InstanceKind::EqualMeans
        } else {
            InstanceKind::GeneralCd
        };
        let (mu, nu) = instance(4000 + seed, kind);
        let dec = irreducible_decompose(&mu, &nu).map_err(|e| format!("seed {seed}: {e}"))?;
        let pd = pi_decreasing(&mu, &nu).map_err(|e| format!("seed {seed}: {e}"))?;
        let v = barrier_audit(&pd.coupling, &dec);
        ensure(v.is_empty(), || format!("seed {seed}: {v:?}"))?;
        zeros += dec.zeros.len();
    }
    Ok(format!(
        "fixture exact, 100 instances respect {zeros} zeros of D"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("shadow fixture", shadow_fixture),
        ("decreasing coupling two-regime fixture", two_regime_fixture),
        ("optimality against LP", optimality),
        ("Wasserstein stability of the shadow", stability),
        ("engine matches shadow formula", engine_formula),
        ("monotonicity of the decreasing coupling", monotonicity),
        ("uniqueness of the hitting coupling", hitting_uniqueness),
        ("equal means give a martingale coupling", equal_means),
        ("Up/Down and hull property suites", appendix_properties),
        ("irreducible decomposition and barriers", decomposition),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail} ({secs:.2} s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {detail} ({secs:.2} s)", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
