use super::step::StepFn;
use crate::error::{Error, Result};
use crate::vector::Vector;
use std::fmt;
use std::sync::Arc;

type Evaluator<V> = Arc<dyn Fn(f64) -> V + Send + Sync>;
type Modulus = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Regulated right-continuous function with finitely many listed jumps and a
/// uniform continuity modulus `eps -> delta` valid between them.
#[derive(Clone)]
pub struct RegulatedInput<V> {
    start: f64,
    end: f64,
    evaluator: Evaluator<V>,
    jumps: Vec<(f64, V)>,
    modulus: Modulus,
    exact: Option<StepFn<V>>,
    variation: Option<f64>,
}

impl<V: Vector> fmt::Debug for RegulatedInput<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RegulatedInput")
            .field("start", &self.start)
            .field("end", &self.end)
            .field("jumps", &self.jumps)
            .field("is_step", &self.exact.is_some())
            .finish()
    }
}

impl<V: Vector> RegulatedInput<V> {
    /// A continuous input on `[a, b]` with modulus `eps -> delta`.
    pub fn continuous(
        a: f64,
        b: f64,
        f: impl Fn(f64) -> V + Send + Sync + 'static,
        modulus: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            start: a,
            end: b,
            evaluator: Arc::new(f),
            jumps: Vec::new(),
            modulus: Arc::new(modulus),
            exact: None,
            variation: None,
        }
    }

    /// A Lipschitz input; the modulus is `eps / lip`.
    pub fn lipschitz(a: f64, b: f64, lip: f64, f: impl Fn(f64) -> V + Send + Sync + 'static) -> Self {
        let lip = lip.max(f64::MIN_POSITIVE);
        Self::continuous(a, b, f, move |eps| eps / lip)
    }

    /// Declares jump times together with the left limit at each. The
    /// evaluator must already be right-continuous at these times.
    pub fn with_jumps(mut self, mut jumps: Vec<(f64, V)>) -> Result<Self> {
        jumps.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (t, _) in &jumps {
            if *t <= self.start || *t > self.end {
                return Err(Error::OutOfDomain { t: *t, start: self.start, end: self.end });
            }
        }
        if jumps.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidStep("duplicate jump time".into()));
        }
        self.jumps = jumps;
        Ok(self)
    }

    /// Records an upper bound on the total variation (bounded-variation inputs).
    pub fn with_variation(mut self, var: f64) -> Self {
        self.variation = Some(var);
        self
    }

    /// Wraps a step function; step approximation returns it unchanged.
    pub fn from_step(f: StepFn<V>) -> Self {
        let g = f.clone();
        let jumps = f
            .jumps()
            .filter(|(_, l, r)| l != r)
            .map(|(t, l, _)| (t, l.clone()))
            .collect();
        let var = f.total_variation().total;
        Self {
            start: f.start(),
            end: f.end(),
            evaluator: Arc::new(move |t| g.eval(t.clamp(g.start(), g.end())).expect("clamped")),
            jumps,
            modulus: Arc::new(|_| f64::INFINITY),
            exact: Some(f),
            variation: Some(var),
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn jumps(&self) -> &[(f64, V)] {
        &self.jumps
    }

    pub fn as_step(&self) -> Option<&StepFn<V>> {
        self.exact.as_ref()
    }

    pub fn variation_bound(&self) -> Option<f64> {
        self.variation
    }

    pub fn modulus(&self, eps: f64) -> f64 {
        (self.modulus)(eps)
    }

    pub fn eval(&self, t: f64) -> Result<V> {
        if t < self.start || t > self.end {
            return Err(Error::OutOfDomain { t, start: self.start, end: self.end });
        }
        Ok((self.evaluator)(t))
    }

    /// `f(t-)`: the stored left limit at listed jumps, the value elsewhere.
    pub fn left_limit(&self, t: f64) -> Result<V> {
        match self.jumps.iter().find(|(s, _)| *s == t) {
            Some((_, v)) => Ok(v.clone()),
            None => self.eval(t),
        }
    }

    /// Step approximation within sup-distance `eps`.
    ///
    /// Each jump-free segment `[s, s')` is cut uniformly with spacing at most
    /// `delta(eps)`. Plateaus take the sample at their left end, except the
    /// last one before a listed jump, which takes the stored left limit so
    /// that the jump is reproduced exactly. The result is checked at interior
    /// samples of every plateau.
    pub fn step_approximate(&self, eps: f64) -> Result<StepFn<V>> {
        if !(eps > 0.0) {
            return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
        }
        if let Some(f) = &self.exact {
            return Ok(f.clone());
        }
        let delta = self.modulus(eps);
        if !(delta > 0.0) {
            return Err(Error::Modulus {
                eps,
                from: self.start,
                to: self.end,
                detail: format!("modulus returned {delta}"),
            });
        }
        let mut knots = vec![self.start];
        knots.extend(self.jumps.iter().map(|j| j.0).filter(|&t| t < self.end));
        knots.push(self.end);

        let mut times = Vec::new();
        let mut values = Vec::new();
        for seg in knots.windows(2) {
            let (s0, s1) = (seg[0], seg[1]);
            let len = s1 - s0;
            let n = ((len / delta).ceil() as usize).max(1);
            for k in 0..n {
                let t = s0 + len * (k as f64) / (n as f64);
                times.push(t);
                values.push(if k + 1 == n { self.left_limit(s1)? } else { self.eval(t)? });
            }
        }
        times.push(self.end);
        values.push(self.eval(self.end)?);
        let g = StepFn::new(times, values)?;
        self.certify(&g, eps)?;
        Ok(g)
    }

    fn certify(&self, g: &StepFn<V>, eps: f64) -> Result<()> {
        let ts = g.times();
        let vs = g.values();
        for j in 0..ts.len() - 1 {
            let (a, b) = (ts[j], ts[j + 1]);
            for frac in [0.0, 0.25, 0.5, 0.75, 0.999] {
                let t = a + (b - a) * frac;
                let err = self.eval(t)?.dist(&vs[j]);
                if err > eps * (1.0 + 1e-12) {
                    return Err(Error::Modulus {
                        eps,
                        from: a,
                        to: b,
                        detail: format!("error {err} at t = {t}"),
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_error(f: &RegulatedInput<f64>, g: &StepFn<f64>) -> f64 {
        (0..=20_000)
            .map(|i| {
                let t = i as f64 / 20_000.0;
                (f.eval(t).unwrap() - g.eval(t).unwrap()).abs()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn linear_input() {
        let f = RegulatedInput::lipschitz(0.0, 1.0, 1.0, |t| t);
        let g = f.step_approximate(0.1).unwrap();
        assert!(g.plateau_count() <= 11);
        assert!(dense_error(&f, &g) <= 0.1 + 1e-12);
    }

    #[test]
    fn step_is_fixed_point() {
        let s = StepFn::new(vec![0.0, 0.4, 1.0], vec![1.0, -1.0, 2.0]).unwrap();
        let f = RegulatedInput::from_step(s.clone());
        for eps in [1e-3, 0.5, 10.0] {
            assert_eq!(f.step_approximate(eps).unwrap(), s);
        }
    }

    #[test]
    fn jump_preserved_exactly() {
        let f = RegulatedInput::lipschitz(0.0, 1.0, 1.0, |t| t + if t >= 0.5 { 1.0 } else { 0.0 })
            .with_jumps(vec![(0.5, 0.5)])
            .unwrap();
        let g = f.step_approximate(0.05).unwrap();
        let j = g.times().iter().position(|&t| t == 0.5).expect("breakpoint at jump");
        assert_eq!(g.values()[j] - g.values()[j - 1], 1.0);
        assert!(dense_error(&f, &g) <= 0.05 + 1e-12);
    }

    #[test]
    fn bad_modulus_is_reported() {
        let f = RegulatedInput::lipschitz(0.0, 1.0, 1.0, |t| 5.0 * t);
        assert!(matches!(f.step_approximate(0.1), Err(Error::Modulus { .. })));
    }
}
