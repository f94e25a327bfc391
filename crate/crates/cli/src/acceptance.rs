//! Acceptance suite: eleven criteria, each reported on one line.
//!
//! Every tolerance and time budget used below is pinned in [`limits`].

use crate::build::build_problem;
use crate::catalog;
use crate::config::Scenario;
use crate::run::{self, base_solution};
use anyhow::{ensure, Context, Result};
use catchup_core::kurzweil::{gen_exponential, ks_integral_general, parts_defect, quadratic_defect, GeneralStep};
use catchup_core::proxgeom::{
    interior_cone_equiv_check, project, prox_regularity_sampler, random_in_ball, seeded, BallUnionComplement,
};
use catchup_core::sweeper::{
    ac_residual, auto_windows, continuous_dependence_study, holder_local_check, refinement_study, residuals,
    variation_audit, variation_bound, AcParams, Perturbation, ResidualBudget,
};
use catchup_core::vector::point;
use catchup_core::{Point, ProxSet, StepFn, SweepProblem};
use rand::Rng;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

pub mod limits {
    use std::time::Duration;

    pub const KURZWEIL_PAIRS: usize = 1000;
    pub const KURZWEIL_IDENTITY: f64 = 1e-10;
    pub const KURZWEIL_BUDGET: Duration = Duration::from_secs(5);

    /// Relative agreement of the recursion with the product formula.
    pub const PRODUCT_FORMULA: f64 = 1e-13;
    pub const EXP_LIMIT: f64 = 2e-3;
    pub const EXP_BUDGET: Duration = Duration::from_secs(1);

    pub const PROJECTION_POINTS: usize = 10_000;
    pub const PROJECTION_Z: usize = 100;
    pub const PROJECTION_RADIAL: f64 = 1e-10;
    pub const PROJECTION_INEQUALITY: f64 = -1e-12;
    pub const PROJECTION_BUDGET: Duration = Duration::from_secs(10);

    pub const STEP_IDENTITY: f64 = 1e-10;
    pub const STEP_SLACK: f64 = -1e-12;
    pub const DISCRETE_VI: f64 = -1e-10;
    /// Integral route against per-step sum, relative to `1 + Var ξ`.
    pub const ROUTE_GAP: f64 = 1e-12;

    pub const PLAY: f64 = 1e-12;
    pub const PLAY_STEPS: usize = 10_000;

    pub const OSCILLATIONS: usize = 10_000;
    pub const MIN_INPUT_VARIATION: f64 = 1e3;
    pub const VARIATION_BUDGET: Duration = Duration::from_secs(30);

    pub const HALVINGS: usize = 5;
    /// Ceilings on the fitted constants; they guard against silent inflation.
    pub const REFINEMENT_C_CEILING: f64 = 0.01;
    pub const DEPENDENCE_C_CEILING: f64 = 0.2;
    pub const AC_C_CEILING: f64 = 1.5;
    pub const DEPENDENCE_DELTAS: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];

    pub const HOLDER: f64 = -1e-12;
    pub const HOLDER_WINDOW: usize = 50;

    pub const LINT_R: [f64; 3] = [3.0, 4.0, 6.0];
    pub const LINT_FRACTIONS: [f64; 3] = [0.25, 0.5, 0.9];
    pub const LINT_SAMPLES: usize = 64;
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Option<Duration>,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let budget = self.budget.map(|b| format!(" / {:.0} s", b.as_secs_f64())).unwrap_or_default();
        write!(
            f,
            "criterion {:>2} {} {} [{:.2} s{}]: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64(),
            budget,
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(usize, &str, Check, Option<Duration>); 11] = [
    (1, "kurzweil identities", kurzweil_identities, Some(limits::KURZWEIL_BUDGET)),
    (2, "generalized exponential", generalized_exponential, Some(limits::EXP_BUDGET)),
    (3, "projection certification", projection_certification, Some(limits::PROJECTION_BUDGET)),
    (4, "catching-up contract", catching_up_contract, None),
    (5, "convex reduction", convex_reduction, None),
    (6, "variation boundedness", variation_boundedness, Some(limits::VARIATION_BUDGET)),
    (7, "refinement convergence", refinement_convergence, None),
    (8, "continuous dependence", continuous_dependence, None),
    (9, "regularity corollaries", regularity_corollaries, None),
    (10, "interior-condition equivalence", interior_equivalence, None),
    (11, "determinism", determinism, None),
];

pub fn run_criterion(id: usize) -> CriterionResult {
    let (id, name, check, budget) = CRITERIA[id - 1];
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e:#}")),
    };
    if let Some(b) = budget {
        if elapsed >= b {
            passed = false;
            detail.push_str(&format!("; over the time budget of {:.0} s", b.as_secs_f64()));
        }
    }
    CriterionResult { id, name, passed, detail, elapsed, budget }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA.len()).map(run_criterion).collect()
}

fn random_step(rng: &mut impl Rng, max_plateaus: usize, dim: usize) -> StepFn<Point> {
    let m = rng.random_range(1..=max_plateaus);
    let mut cuts: Vec<f64> = (0..m - 1).map(|_| rng.random_range(0.0..1.0)).collect();
    cuts.push(0.0);
    cuts.push(1.0);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let values = cuts.iter().map(|_| Point::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))).collect();
    StepFn::new(cuts, values).expect("sorted distinct cuts")
}

fn kurzweil_identities() -> Result<(bool, String)> {
    let mut rng = seeded(0xC1);
    let mut worst_parts = 0.0f64;
    let mut worst_quad = 0.0f64;
    for _ in 0..limits::KURZWEIL_PAIRS {
        let n = rng.random_range(1..=4);
        let f = random_step(&mut rng, 50, n);
        let g = random_step(&mut rng, 50, n);
        worst_parts = worst_parts.max(parts_defect(&f, &g)?);
        worst_quad = worst_quad.max(quadratic_defect(&g)?);
    }
    // Closed forms for an indicator of [a, τ) and a point mass at τ.
    let mut exact = true;
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let base = random_step(&mut rng, 8, n);
        let f = GeneralStep::from(&base);
        let v = Point::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let interior = base.times()[1..base.times().len() - 1].to_vec();
        let mut taus: Vec<f64> = vec![rng.random_range(0.01..0.99), 1.0];
        taus.extend(interior);
        for tau in taus {
            let g = GeneralStep::interval_indicator(0.0, 1.0, tau, v.clone())?;
            exact &= ks_integral_general(&f, &g)?.value == -base.eval(tau)?.dot(&v);
            let g = GeneralStep::point_mass(0.0, 1.0, tau, v.clone())?;
            let expected = if tau == 1.0 { base.eval(1.0)?.dot(&v) } else { 0.0 };
            exact &= ks_integral_general(&f, &g)?.value == expected;
        }
    }
    let ok = worst_parts <= limits::KURZWEIL_IDENTITY && worst_quad <= limits::KURZWEIL_IDENTITY && exact;
    Ok((ok, format!("max parts defect {worst_parts:.2e}, max quadratic defect {worst_quad:.2e}, closed forms exact: {exact}")))
}

fn generalized_exponential() -> Result<(bool, String)> {
    let mut rng = seeded(0xC2);
    let y = gen_exponential(&StepFn::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.25, 0.5])?)?;
    let mut exact = y.solution.values() == [1.0, 4.0 / 3.0, 16.0 / 9.0];
    let mut worst_rel = 0.0f64;
    let mut bound_ok = true;
    let mut drivers = Vec::new();
    for _ in 0..200 {
        let m = rng.random_range(1..=40);
        let mut times: Vec<f64> = (0..=m).map(|k| k as f64 / m as f64).collect();
        times.dedup();
        let mut g = vec![0.0];
        for _ in 1..times.len() {
            let d = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..0.5) };
            g.push(g.last().unwrap() + d);
        }
        drivers.push(StepFn::new(times, g)?);
    }
    for g in &drivers {
        let y = gen_exponential(g)?;
        let gv = g.values();
        let mut prod = 1.0f64;
        for (j, yj) in y.solution.values().iter().enumerate() {
            if j > 0 {
                prod *= 1.0 / (1.0 - (gv[j] - gv[j - 1]));
            }
            worst_rel = worst_rel.max((yj - prod).abs() / prod);
        }
        bound_ok &= *y.solution.final_value() <= y.upper_bound();
    }
    exact &= worst_rel <= limits::PRODUCT_FORMULA;
    let n = 1000;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();
    let lin = gen_exponential(&StepFn::new(times.clone(), times)?)?;
    let y1 = *lin.solution.final_value();
    bound_ok &= y1 <= lin.upper_bound();
    let err = (y1 - std::f64::consts::E).abs();
    let ok = exact && bound_ok && err <= limits::EXP_LIMIT;
    Ok((
        ok,
        format!("product formula max rel. error {worst_rel:.1e}, |y(1) - e| = {err:.3e} at mesh 1e-3, growth bound holds: {bound_ok}"),
    ))
}

fn projection_certification() -> Result<(bool, String)> {
    let set = BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0);
    let mut rng = seeded(0xC3);
    let mut worst_radial = 0.0f64;
    let mut worst_ineq = f64::INFINITY;
    for _ in 0..limits::PROJECTION_POINTS {
        let y = loop {
            let y = random_in_ball(2, 1.0, &mut rng);
            if y.norm() > 1e-3 {
                break y;
            }
        };
        let x = project(&set, &y)?;
        worst_radial = worst_radial.max((&x - &y / y.norm()).norm());
        let d = (&y - &x).norm();
        for k in 0..limits::PROJECTION_Z {
            let z = if k % 2 == 0 {
                set.nearest_point(&(&x + random_in_ball(2, 0.5, &mut rng)))
            } else {
                loop {
                    let z = random_in_ball(2, 3.0, &mut rng);
                    if z.norm() >= 1.0 {
                        break z;
                    }
                }
            };
            let v = (&y - &x).dot(&(&x - &z)) + d / 2.0 * (&x - &z).norm_squared();
            worst_ineq = worst_ineq.min(v);
        }
    }
    let at_one = prox_regularity_sampler(&set, 1.0, 400, 50, &mut rng);
    let at_one_half = prox_regularity_sampler(&set, 1.5, 400, 50, &mut rng);
    let ok = worst_radial <= limits::PROJECTION_RADIAL
        && worst_ineq >= limits::PROJECTION_INEQUALITY
        && at_one.is_none()
        && at_one_half.is_some();
    Ok((
        ok,
        format!(
            "max |P(y) - y/|y|| = {worst_radial:.2e}, min inequality {worst_ineq:.2e}, sampler r=1: {}, r=1.5: {}",
            if at_one.is_none() { "no violation" } else { "violation" },
            at_one_half.map(|v| format!("{} witness, defect {:.3}", v.kind, v.defect)).unwrap_or_else(|| "no witness".into())
        ),
    ))
}

fn catalog_problems() -> Result<Vec<(Scenario, SweepProblem)>> {
    catalog::all()?
        .into_iter()
        .map(|s| {
            let p = build_problem(&s.problem).with_context(|| s.name.clone())?;
            Ok((s, p))
        })
        .collect()
}

fn catching_up_contract() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for (s, p) in catalog_problems()? {
        p.validate()?;
        let sol = base_solution(&p)?;
        let rep = residuals(&sol, &p, &ResidualBudget { seed: s.seed, ..ResidualBudget::default() })?;
        let gap_tol = limits::ROUTE_GAP * (1.0 + sol.variation());
        let this = sol.max_identity_defect() <= limits::STEP_IDENTITY
            && sol.min_bound_slack() >= limits::STEP_SLACK
            && rep.discrete_vi_min >= limits::DISCRETE_VI
            && rep.kurzweil_vi_min >= limits::DISCRETE_VI
            && rep.route_gap <= gap_tol;
        ok &= this;
        parts.push(format!(
            "{}{}: id {:.0e}, slack {:.0e}, vi {:.0e}, gap {:.0e}",
            s.name,
            if this { "" } else { " (FAILED)" },
            sol.max_identity_defect(),
            sol.min_bound_slack(),
            rep.discrete_vi_min,
            rep.route_gap
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn scenario(name: &str) -> Result<(Scenario, SweepProblem)> {
    let s = catalog::load(name)?;
    let p = build_problem(&s.problem)?;
    p.validate()?;
    Ok((s, p))
}

fn convex_reduction() -> Result<(bool, String)> {
    let (_, p) = scenario("play1d")?;
    let sol = base_solution(&p)?;
    let u = sol.u.values();
    let xi = sol.xi.values();
    ensure!(u.len() > limits::PLAY_STEPS, "play1d has only {} steps", u.len() - 1);
    let mut oracle = u[0][0] - p.x0[0];
    let mut worst = (oracle - xi[0][0]).abs();
    for j in 1..u.len() {
        oracle = oracle.max(u[j][0] - 1.0).min(u[j][0] + 1.0);
        worst = worst.max((oracle - xi[j][0]).abs());
    }
    Ok((worst <= limits::PLAY, format!("{} steps, max |xi - play oracle| = {worst:.2e}", u.len() - 1)))
}

fn variation_boundedness() -> Result<(bool, String)> {
    let (_, p) = scenario("ball_complement_oscillation")?;
    let sol = base_solution(&p)?;
    let params = p.family.interior().context("interior parameters")?;
    let windows = auto_windows(&sol, &p, params.rho)?;
    let audit = variation_audit(&sol, &p, &windows, None)?;
    let bound = variation_bound(p.r, params.rho, params.big_r)?;
    let input_var: f64 = audit.windows.iter().map(|w| w.input_variation).sum();
    let worst = audit.windows.iter().map(|w| w.variation).fold(0.0, f64::max);
    let steps = sol.times().len() - 1;
    let positive = audit.min_window_slack() >= 0.0
        && audit.global_slack >= 0.0
        && input_var > limits::MIN_INPUT_VARIATION
        && steps >= 4 * limits::OSCILLATIONS;

    let (_, c) = scenario("cusp_negative")?;
    let csol = base_solution(&c)?;
    let copies = csol.u.values() == csol.xi.values();
    let cin: f64 = csol.u.values().windows(2).map(|w| (&w[1] - &w[0]).norm()).sum();
    let linear = (csol.variation() - cin).abs() <= 1e-12 * cin && cin > limits::MIN_INPUT_VARIATION;
    Ok((
        positive && copies && linear,
        format!(
            "ball complement: {} window(s), max window variation {worst:.5} <= {bound:.5}, input variation {input_var:.1}; cusp: xi = u exactly: {copies}, Var xi = {:.1} = Var u = {cin:.1}",
            audit.windows.len(),
            csol.variation()
        ),
    ))
}

fn refinement_convergence() -> Result<(bool, String)> {
    let (_, p) = scenario("rotating_crescent")?;
    ensure!(p.mesh.levels == limits::HALVINGS + 1 && p.mesh.ratio == 0.5, "rotating_crescent must use {} halvings", limits::HALVINGS);
    let (_, table) = refinement_study(&p)?;
    let diffs: Vec<f64> = table.rows.iter().filter_map(|r| r.diff_to_next).collect();
    let vmax = table.rows.iter().map(|r| r.variation).fold(0.0, f64::max);
    let vmin = table.rows.iter().map(|r| r.variation).fold(f64::INFINITY, f64::min);
    let ok = table.decreasing
        && diffs.len() == limits::HALVINGS
        && table.fitted_c <= limits::REFINEMENT_C_CEILING
        && vmax <= 2.0 * vmin;
    Ok((
        ok,
        format!(
            "differences {}, fitted C = {:.3e}, Var xi in [{vmin:.4}, {vmax:.4}]",
            diffs.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>().join(" > "),
            table.fitted_c
        ),
    ))
}

fn continuous_dependence() -> Result<(bool, String)> {
    let (_, p) = scenario("ball_complement_drag")?;
    let ps: Vec<Perturbation> = limits::DEPENDENCE_DELTAS
        .iter()
        .map(|d| Perturbation { du: vec![0.0, *d], dw: vec![0.0], dx0: vec![0.0, 0.0] })
        .collect();
    let table = continuous_dependence_study(&p, &ps)?;
    let ratios: Vec<f64> = table.rows.iter().map(|r| r.diff * r.diff / (r.delta + r.delta * r.delta)).collect();
    let c = ratios.iter().copied().fold(0.0, f64::max);
    let deltas_ok = table.rows.iter().zip(limits::DEPENDENCE_DELTAS).all(|(r, d)| (r.delta - d).abs() <= 1e-12);
    let ok = table.monotone && deltas_ok && c <= limits::DEPENDENCE_C_CEILING;
    Ok((
        ok,
        format!(
            "|dxi| = {}, fitted C = {c:.4} for |dxi|^2 <= C (D + D^2)",
            table.rows.iter().map(|r| format!("{:.4}", r.diff)).collect::<Vec<_>>().join(", ")
        ),
    ))
}

fn regularity_corollaries() -> Result<(bool, String)> {
    let (s, p) = scenario("ball_complement_drag")?;
    let sol = base_solution(&p)?;
    let m = sol.times().len() - 1;
    let mut worst = f64::INFINITY;
    let mut windows = 0;
    let mut i = 0;
    while i < m {
        let k = (i + limits::HOLDER_WINDOW).min(m);
        worst = worst.min(holder_local_check(&sol, &p, i, k)?.min_slack);
        windows += 1;
        i = k;
    }
    let ac = ac_residual(&sol, &p, &AcParams { seed: s.seed, block: 100, ..AcParams::default() })?;
    let ok = worst >= limits::HOLDER && ac.passed() && ac.c_hat <= limits::AC_C_CEILING;
    Ok((
        ok,
        format!(
            "{windows} windows, min local slack {worst:.2e}; ac residual {:.2e} >= -{:.2e}, C hat = {:.4} over {} subintervals",
            ac.vi_min, ac.tolerance, ac.c_hat, ac.subintervals
        ),
    ))
}

fn interior_equivalence() -> Result<(bool, String)> {
    let grid: Vec<(f64, f64)> = limits::LINT_R
        .iter()
        .flat_map(|big_r| limits::LINT_FRACTIONS.iter().map(move |f| (*f, *big_r)))
        .collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (s, p) in catalog_problems()? {
        let mut sets: Vec<std::sync::Arc<dyn ProxSet>> = vec![p.family.set_at(&p.w.eval(p.start())?)?];
        if p.w.eval(p.end())? != p.w.eval(p.start())? {
            sets.push(p.family.set_at(&p.w.eval(p.end())?)?);
        }
        let r = p.r.min(1.0);
        let g: Vec<(f64, f64)> = grid.iter().map(|(f, big_r)| (f * 2.0 * r / (1.0 + big_r * big_r), *big_r)).collect();
        for set in sets {
            let rep = interior_cone_equiv_check(set.as_ref(), r, &g, limits::LINT_SAMPLES, &mut seeded(s.seed))?;
            let both = rep.points.iter().filter(|q| q.ball_ok && q.cone_ok).count();
            ok &= rep.all_agree();
            parts.push(format!("{}: {}/{} agree ({} pass)", s.name, rep.points.iter().filter(|q| q.agree()).count(), rep.points.len(), both));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn csv_files(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let mut out = Vec::new();
    for sub in std::fs::read_dir(dir)? {
        let sub = sub?.path();
        for f in std::fs::read_dir(&sub)? {
            let f = f?.path();
            if f.extension().is_some_and(|e| e == "csv") {
                let rel = f.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&f)?));
            }
        }
    }
    out.sort();
    Ok(out)
}

fn scratch_dir(tag: &str) -> PathBuf {
    std::env::temp_dir().join(format!("catchup-acceptance-{}-{tag}", std::process::id()))
}

/// Runs the whole catalog into `dir`.
pub fn run_catalog(dir: &Path) -> Result<bool> {
    let records = run::run_batch(&catalog::all()?, dir)?;
    Ok(records.iter().all(|r| r.passed))
}

fn determinism() -> Result<(bool, String)> {
    let (a, b) = (scratch_dir("a"), scratch_dir("b"));
    let result = (|| -> Result<(bool, String)> {
        let pa = run_catalog(&a)?;
        let pb = run_catalog(&b)?;
        let fa = csv_files(&a)?;
        let fb = csv_files(&b)?;
        let same = fa == fb;
        let bytes: usize = fa.iter().map(|(_, d)| d.len()).sum();
        Ok((same && !fa.is_empty(), format!("{} CSV files ({bytes} bytes) identical: {same}; catalog runs passed: {}", fa.len(), pa && pb)))
    })();
    let _ = std::fs::remove_dir_all(&a);
    let _ = std::fs::remove_dir_all(&b);
    result
}
