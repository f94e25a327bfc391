//! Turns a parsed [`Scenario`](crate::config::Scenario) into a solver problem.

use crate::config::{FamilySpec, InputShape, InputSpec, InteriorSpec, ProblemSpec, SetShape, SetSpec};
use anyhow::{bail, ensure, Context, Result};
use catchup_core::proxgeom::{
    Ball, BallUnionComplement, BoxSet, Crescent, FixedFamily, HalfSpace, Intersection, RotationFamily,
    ScaledBallFamily, TranslationFamily, TwoBalls,
};
use catchup_core::sweeper::MeshPolicy;
use catchup_core::{InteriorParams, ParamFamily, Point, ProxSet, RegulatedInput, StepFn, SweepProblem};
use std::sync::Arc;

fn pt(v: &[f64]) -> Point {
    Point::from_column_slice(v)
}

fn interior(spec: Option<InteriorSpec>) -> Option<InteriorParams> {
    spec.map(|i| InteriorParams { rho: i.rho, big_r: i.big_r })
}

pub fn build_set(spec: &SetSpec) -> Result<Arc<dyn ProxSet>> {
    let ip = interior(spec.interior);
    let set: Arc<dyn ProxSet> = match &spec.shape {
        SetShape::Ball { center, radius } => {
            let mut b = Ball::new(pt(center), *radius);
            b.interior = ip;
            Arc::new(b)
        }
        SetShape::Box { lo, hi } => {
            let b = BoxSet::new(pt(lo), pt(hi))?;
            Arc::new(match ip {
                Some(p) => b.with_interior(p),
                None => b,
            })
        }
        SetShape::Halfspace { normal, offset } => {
            let h = HalfSpace::new(pt(normal), *offset)?;
            Arc::new(match ip {
                Some(p) => h.with_interior(p),
                None => h,
            })
        }
        SetShape::BallComplement { center, radius } => {
            let b = BallUnionComplement::ball_complement(pt(center), *radius);
            Arc::new(match ip {
                Some(p) => b.with_interior(p),
                None => b,
            })
        }
        SetShape::Cusp { r } => {
            let b = BallUnionComplement::cusp(*r);
            Arc::new(match ip {
                Some(p) => b.with_interior(p),
                None => b,
            })
        }
        SetShape::TwoBalls { c1, c2, radius } => {
            let b = TwoBalls::new(pt(c1), pt(c2), *radius)?;
            Arc::new(match ip {
                Some(p) => b.with_interior(p),
                None => b,
            })
        }
        SetShape::Crescent { c1, r1, c2, r2 } => {
            let c = Crescent::new(pt(c1), *r1, pt(c2), *r2)?;
            Arc::new(match ip {
                Some(p) => c.with_interior(p),
                None => c,
            })
        }
        SetShape::Intersection { parts } => {
            let parts = parts.iter().map(build_set).collect::<Result<Vec<_>>>()?;
            let i = Intersection::new(parts)?;
            Arc::new(match ip {
                Some(p) => i.with_interior(p),
                None => i,
            })
        }
    };
    if let Some(p) = ip {
        p.validate(set.prox_radius().min(1e300))
            .with_context(|| format!("interior parameters of {}", set.label()))?;
    }
    Ok(set)
}

pub fn build_family(spec: &FamilySpec) -> Result<Arc<dyn ParamFamily>> {
    Ok(match spec {
        FamilySpec::Fixed { set } => Arc::new(FixedFamily { set: build_set(set)? }),
        FamilySpec::Translation { set } => Arc::new(TranslationFamily { base: build_set(set)? }),
        FamilySpec::Rotation { set, center } => Arc::new(RotationFamily::new(build_set(set)?, pt(center))?),
        FamilySpec::ScaledBall { center, r_min, r_max, interior: ip } => {
            ensure!(0.0 < *r_min && r_min <= r_max, "scaled_ball needs 0 < r_min <= r_max");
            Arc::new(ScaledBallFamily { center: pt(center), r_min: *r_min, r_max: *r_max, interior: interior(*ip) })
        }
    })
}

type Curve = Arc<dyn Fn(f64) -> Point + Send + Sync>;

/// Continuous part of an input: evaluator, Lipschitz constant, variation bound.
fn curve(shape: &InputShape, t_end: f64) -> Result<(Curve, f64, f64)> {
    Ok(match shape.clone() {
        InputShape::Constant { value } => {
            let v = pt(&value);
            (Arc::new(move |_| v.clone()), 0.0, 0.0)
        }
        InputShape::Linear { from, to } => {
            ensure!(from.len() == to.len(), "linear input: from and to differ in length");
            let (a, b) = (pt(&from), pt(&to));
            let d = (&b - &a).norm();
            (Arc::new(move |t| &a + (&b - &a) * (t / t_end)), d / t_end, d)
        }
        InputShape::Sine { amplitude, frequency, phase, offset } => {
            let amp = pt(&amplitude);
            let off = match offset {
                Some(o) => {
                    ensure!(o.len() == amplitude.len(), "sine input: offset and amplitude differ in length");
                    pt(&o)
                }
                None => Point::zeros(amplitude.len()),
            };
            let w = 2.0 * std::f64::consts::PI * frequency;
            let lip = amp.norm() * w.abs();
            let var = amp.norm() * 4.0 * (frequency.abs() * t_end).ceil().max(1.0);
            (Arc::new(move |t| &off + &amp * (w * t + phase).sin()), lip, var)
        }
        InputShape::Polyline { times, points } => polyline(times, points.iter().map(|p| pt(p)).collect(), t_end)?,
        InputShape::Oscillation { amplitude, directions, cycles } => {
            ensure!(!directions.is_empty() && cycles > 0, "oscillation needs directions and cycles");
            let dim = directions[0].len();
            ensure!(directions.iter().all(|d| d.len() == dim), "oscillation directions differ in length");
            let mut pts = Vec::with_capacity(2 * directions.len() * cycles + 1);
            for _ in 0..cycles {
                for d in &directions {
                    let d = pt(d);
                    let n = d.norm();
                    ensure!(n > 0.0, "zero oscillation direction");
                    pts.push(Point::zeros(dim));
                    pts.push(d * (amplitude / n));
                }
            }
            pts.push(Point::zeros(dim));
            let segs = pts.len() - 1;
            let times = (0..=segs).map(|k| t_end * k as f64 / segs as f64).collect();
            polyline(times, pts, t_end)?
        }
        InputShape::Steps { .. } => bail!("step inputs have no continuous part"),
    })
}

/// Piecewise-linear interpolation that returns vertices exactly at vertex times.
fn polyline(times: Vec<f64>, points: Vec<Point>, t_end: f64) -> Result<(Curve, f64, f64)> {
    ensure!(times.len() == points.len() && times.len() >= 2, "polyline needs matching times and points");
    ensure!(times[0] == 0.0 && *times.last().unwrap() == t_end, "polyline must span [0, t_end]");
    ensure!(times.windows(2).all(|w| w[0] < w[1]), "polyline times must increase");
    let mut lip = 0.0f64;
    let mut var = 0.0;
    for k in 1..times.len() {
        let d = (&points[k] - &points[k - 1]).norm();
        var += d;
        lip = lip.max(d / (times[k] - times[k - 1]));
    }
    let uniform = times.iter().enumerate().all(|(k, t)| *t == t_end * k as f64 / (times.len() - 1) as f64);
    let segs = times.len() - 1;
    let f = move |t: f64| -> Point {
        let k = if uniform {
            let s = t / t_end * segs as f64;
            let k = s.round();
            if (s - k).abs() <= 1e-9 {
                return points[k as usize].clone();
            }
            (s.floor() as usize).min(segs - 1)
        } else {
            match times.binary_search_by(|x| x.total_cmp(&t)) {
                Ok(i) => return points[i].clone(),
                Err(i) => i.saturating_sub(1).min(segs - 1),
            }
        };
        let lam = (t - times[k]) / (times[k + 1] - times[k]);
        &points[k] + (&points[k + 1] - &points[k]) * lam
    };
    Ok((Arc::new(f), lip, var))
}

pub fn build_input(spec: &InputSpec, t_end: f64) -> Result<RegulatedInput<Point>> {
    if let InputShape::Steps { times, values } = &spec.shape {
        ensure!(spec.jumps.is_empty() && spec.sampling.is_none(), "step inputs take no jumps or sampling");
        let f = StepFn::new(times.clone(), values.iter().map(|v| pt(v)).collect())?;
        ensure!(f.start() == 0.0 && f.end() == t_end, "step input must span [0, t_end]");
        return Ok(RegulatedInput::from_step(f));
    }
    let (base, lip, var) = curve(&spec.shape, t_end)?;
    let dim = base(0.0).len();
    let mut jumps: Vec<(f64, Point)> = Vec::with_capacity(spec.jumps.len());
    for j in &spec.jumps {
        ensure!(j.size.len() == dim, "jump at t = {} has the wrong dimension", j.t);
        ensure!(j.t > 0.0 && j.t <= t_end, "jump time {} outside (0, t_end]", j.t);
        jumps.push((j.t, pt(&j.size)));
    }
    jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let jump_var: f64 = jumps.iter().map(|j| j.1.norm()).sum();
    let table = jumps.clone();
    let eval: Curve = Arc::new(move |t| {
        let mut v = base(t);
        for (s, d) in &table {
            if *s <= t {
                v += d;
            }
        }
        v
    });
    if let Some(n) = spec.sampling {
        ensure!(n > 0, "sampling must be positive");
        let mut times: Vec<f64> = (0..=n).map(|k| t_end * k as f64 / n as f64).collect();
        times.extend(jumps.iter().map(|j| j.0));
        times.sort_by(f64::total_cmp);
        times.dedup();
        let values = times.iter().map(|&t| eval(t)).collect();
        return Ok(RegulatedInput::from_step(StepFn::new(times, values)?));
    }
    let left: Vec<(f64, Point)> = jumps.iter().map(|(t, d)| (*t, eval(*t) - d)).collect();
    let e = eval.clone();
    Ok(RegulatedInput::lipschitz(0.0, t_end, lip, move |t| e(t)).with_jumps(left)?.with_variation(var + jump_var))
}

pub fn build_problem(spec: &ProblemSpec) -> Result<SweepProblem> {
    ensure!(spec.t_end > 0.0, "t_end must be positive");
    let family = build_family(&spec.family)?;
    let u = build_input(&spec.u, spec.t_end).context("input u")?;
    let w = match &spec.w {
        Some(w) => build_input(w, spec.t_end).context("input w")?,
        None => RegulatedInput::from_step(StepFn::constant(0.0, spec.t_end, Point::zeros(family.param_dim()))?),
    };
    let mut p = SweepProblem::new(u, w, family, pt(&spec.x0));
    if let Some(r) = spec.r {
        p = p.with_r(r);
    }
    if let Some(m) = spec.m {
        p = p.with_m(m);
    }
    if let Some(m) = &spec.mesh {
        p = p.with_mesh(MeshPolicy { eps0: m.eps0, ratio: m.ratio, levels: m.levels });
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::JumpSpec;

    #[test]
    fn oscillation_hits_vertices_exactly() {
        let spec = InputSpec {
            shape: InputShape::Oscillation { amplitude: 0.3, directions: vec![vec![1.0, 0.0], vec![0.0, 2.0]], cycles: 3 },
            sampling: Some(12),
            jumps: vec![],
        };
        let u = build_input(&spec, 1.0).unwrap();
        let f = u.as_step().unwrap();
        assert_eq!(f.values()[1], pt(&[0.3, 0.0]));
        assert_eq!(f.values()[3], pt(&[0.0, 0.3]));
        assert_eq!(f.values()[12], pt(&[0.0, 0.0]));
    }

    #[test]
    fn jumps_are_right_continuous() {
        let spec = InputSpec {
            shape: InputShape::Linear { from: vec![0.0], to: vec![1.0] },
            sampling: None,
            jumps: vec![JumpSpec { t: 0.5, size: vec![0.25] }],
        };
        let u = build_input(&spec, 1.0).unwrap();
        assert!((u.eval(0.5).unwrap()[0] - 0.75).abs() < 1e-15);
        assert!((u.left_limit(0.5).unwrap()[0] - 0.5).abs() < 1e-15);
        assert_eq!(u.variation_bound(), Some(1.25));
    }
}
