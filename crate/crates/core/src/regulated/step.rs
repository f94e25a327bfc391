use crate::error::{Error, Result};
use crate::vector::Vector;
use serde::{Deserialize, Serialize};

/// Right-continuous step function on `[a, b]`.
///
/// `values[j]` is taken on `[times[j], times[j+1])` and `values[m]` is the
/// value at the right endpoint `times[m] = b`. The left limit at `times[j]`
/// is `values[j-1]`; the left limit at `a` is the value at `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFn<V> {
    times: Vec<f64>,
    values: Vec<V>,
}

/// Total variation of a step function and its running variation `V(f)(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Variation {
    pub total: f64,
    pub running: StepFn<f64>,
}

/// Sorted union of two breakpoint lists using exact float equality.
pub fn merge_times(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(_), Some(&y)) => {
                j += 1;
                y
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

impl<V: Vector> StepFn<V> {
    /// Builds a step function from breakpoints and one value per breakpoint,
    /// the last value being the value at the right endpoint.
    pub fn new(times: Vec<f64>, values: Vec<V>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidStep("need at least two breakpoints".into()));
        }
        if times.len() != values.len() {
            return Err(Error::InvalidStep(format!(
                "{} breakpoints but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidStep("non-finite breakpoint".into()));
        }
        if let Some(w) = times.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStep(format!(
                "breakpoints not strictly increasing at {} >= {}",
                w[0], w[1]
            )));
        }
        let d = values[0].dim();
        if let Some(v) = values.iter().find(|v| v.dim() != d) {
            return Err(Error::DimensionMismatch(d, v.dim()));
        }
        Ok(Self { times, values })
    }

    /// Plateau values on `[t_{j-1}, t_j)` plus a separate final value.
    pub fn from_plateaus(times: Vec<f64>, plateaus: Vec<V>, final_value: V) -> Result<Self> {
        let mut values = plateaus;
        values.push(final_value);
        Self::new(times, values)
    }

    pub fn constant(a: f64, b: f64, v: V) -> Result<Self> {
        Self::new(vec![a, b], vec![v.clone(), v])
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    /// Number of plateaus `m`.
    pub fn plateau_count(&self) -> usize {
        self.times.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn final_value(&self) -> &V {
        self.values.last().unwrap()
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t >= self.start() && t <= self.end() {
            Ok(())
        } else {
            Err(Error::OutOfDomain { t, start: self.start(), end: self.end() })
        }
    }

    /// Index `j` of the plateau containing `t`, so that `f(t) = values[j]`.
    pub fn index_at(&self, t: f64) -> Result<usize> {
        self.check_time(t)?;
        Ok(self.times.partition_point(|&s| s <= t) - 1)
    }

    pub fn eval(&self, t: f64) -> Result<V> {
        Ok(self.values[self.index_at(t)?].clone())
    }

    /// `f(t-)`, with `f(a-) = f(a)`.
    pub fn left_limit(&self, t: f64) -> Result<V> {
        self.check_time(t)?;
        if t == self.start() {
            return Ok(self.values[0].clone());
        }
        let j = self.times.partition_point(|&s| s < t) - 1;
        Ok(self.values[j].clone())
    }

    /// Jumps `f(t_j) - f(t_j-)` at every breakpoint after the first, including
    /// zero jumps, as `(t_j, left, right)`.
    pub fn jumps(&self) -> impl Iterator<Item = (f64, &V, &V)> + '_ {
        (1..self.times.len()).map(move |j| (self.times[j], &self.values[j - 1], &self.values[j]))
    }

    pub fn total_variation(&self) -> Variation {
        let mut acc = 0.0;
        let mut running = Vec::with_capacity(self.values.len());
        running.push(0.0);
        for j in 1..self.values.len() {
            acc += self.values[j].dist(&self.values[j - 1]);
            running.push(acc);
        }
        Variation {
            total: acc,
            running: StepFn { times: self.times.clone(), values: running },
        }
    }

    /// Resamples onto a superset of the breakpoints. `times` must contain every
    /// breakpoint of `self` and share its endpoints.
    pub fn refine(&self, times: &[f64]) -> Result<Self> {
        if times.first() != Some(&self.start()) || times.last() != Some(&self.end()) {
            return Err(Error::IntervalMismatch(
                self.start(),
                self.end(),
                *times.first().unwrap_or(&f64::NAN),
                *times.last().unwrap_or(&f64::NAN),
            ));
        }
        let values = times.iter().map(|&t| self.eval(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times.to_vec(), values)
    }

    fn same_interval<W>(&self, other: &StepFn<W>) -> Result<()> {
        let (oa, ob) = (other.times[0], other.times[other.times.len() - 1]);
        if self.start() != oa || self.end() != ob {
            return Err(Error::IntervalMismatch(self.start(), self.end(), oa, ob));
        }
        Ok(())
    }

    /// Breakpoints of both functions merged; errors on differing intervals.
    pub fn merged_times<W>(&self, other: &StepFn<W>) -> Result<Vec<f64>> {
        self.same_interval(other)?;
        Ok(merge_times(&self.times, &other.times))
    }

    /// Exact sup-norm distance; the sup is attained on the merged breakpoints.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        let times = self.merged_times(other)?;
        let mut best = 0.0f64;
        let (mut i, mut k) = (0usize, 0usize);
        for &t in &times {
            while i + 1 < self.times.len() && self.times[i + 1] <= t {
                i += 1;
            }
            while k + 1 < other.times.len() && other.times[k + 1] <= t {
                k += 1;
            }
            best = best.max(self.values[i].dist(&other.values[k]));
        }
        Ok(best)
    }

    /// Pointwise combination on the merged division.
    pub fn zip_with<W: Vector, U: Vector>(
        &self,
        other: &StepFn<W>,
        f: impl Fn(&V, &W) -> U,
    ) -> Result<StepFn<U>> {
        let times = self.merged_times(other)?;
        let mut values = Vec::with_capacity(times.len());
        let (mut i, mut k) = (0usize, 0usize);
        for &t in &times {
            while i + 1 < self.times.len() && self.times[i + 1] <= t {
                i += 1;
            }
            while k + 1 < other.times.len() && other.times[k + 1] <= t {
                k += 1;
            }
            values.push(f(&self.values[i], &other.values[k]));
        }
        StepFn::new(times, values)
    }

    pub fn map<U: Vector>(&self, f: impl Fn(&V) -> U) -> StepFn<U> {
        StepFn { times: self.times.clone(), values: self.values.iter().map(f).collect() }
    }

    /// Restriction to `[a, b]`, keeping right-continuity; the value at `b`
    /// becomes the final value.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Self> {
        self.check_time(a)?;
        self.check_time(b)?;
        if a >= b {
            return Err(Error::InvalidStep(format!("empty restriction [{a}, {b}]")));
        }
        let mut times = vec![a];
        times.extend(self.times.iter().copied().filter(|&t| t > a && t < b));
        times.push(b);
        self.refine_unchecked(times)
    }

    fn refine_unchecked(&self, times: Vec<f64>) -> Result<Self> {
        let values = times.iter().map(|&t| self.eval(t)).collect::<Result<Vec<_>>>()?;
        Self::new(times, values)
    }

    /// Drops breakpoints across which the function does not change.
    pub fn simplify(&self) -> Self {
        let m = self.times.len() - 1;
        let mut times = vec![self.times[0]];
        let mut values = vec![self.values[0].clone()];
        for j in 1..m {
            if self.values[j] != self.values[j - 1] {
                times.push(self.times[j]);
                values.push(self.values[j].clone());
            }
        }
        times.push(self.times[m]);
        values.push(self.values[m].clone());
        StepFn { times, values }
    }

    /// Writes rows `t_j, v_j components` with header `t,<prefix>0,<prefix>1,...`.
    pub fn write_csv<W: std::io::Write>(&self, out: W, prefix: &str) -> std::io::Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.dim()).map(|i| format!("{prefix}{i}")));
        wtr.write_record(&header)?;
        for (t, v) in self.times.iter().zip(&self.values) {
            let mut row = vec![t.to_string()];
            row.extend(v.components().iter().map(|c| c.to_string()));
            wtr.write_record(&row)?;
        }
        wtr.flush()
    }
}

impl StepFn<f64> {
    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vector::point;

    fn sample() -> StepFn<f64> {
        StepFn::from_plateaus(vec![0.0, 1.0], vec![0.0], 3.0).unwrap()
    }

    #[test]
    fn eval_plateau_and_endpoint() {
        let f = sample();
        assert_eq!(f.eval(0.5).unwrap(), 0.0);
        assert_eq!(f.eval(1.0).unwrap(), 3.0);
        assert!(f.eval(1.5).is_err());
        assert!(f.eval(-0.1).is_err());
    }

    #[test]
    fn right_continuity_at_breakpoint() {
        let v = point(&[1.0, -2.0]);
        let z = point(&[0.0, 0.0]);
        let f = StepFn::new(vec![0.0, 0.5, 1.0], vec![z.clone(), v.clone(), v.clone()]).unwrap();
        assert_eq!(f.eval(0.5).unwrap(), v);
        assert_eq!(f.left_limit(0.5).unwrap(), z);
        assert_eq!(f.eval(0.75).unwrap(), v);
    }

    #[test]
    fn left_limits() {
        let f = sample();
        assert_eq!(f.left_limit(1.0).unwrap(), 0.0);
        assert_eq!(f.left_limit(0.0).unwrap(), f.eval(0.0).unwrap());
        let c = StepFn::constant(0.0, 2.0, 7.0).unwrap();
        for t in [0.0, 0.3, 1.0, 2.0] {
            assert_eq!(c.left_limit(t).unwrap(), 7.0);
        }
    }

    #[test]
    fn variation_examples() {
        let f = StepFn::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.total_variation().total, 2.0);
        assert_eq!(StepFn::constant(0.0, 1.0, 4.0).unwrap().total_variation().total, 0.0);
        let g = StepFn::new(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.5, 1.0, 1.2]).unwrap();
        let var = g.total_variation();
        assert!((var.total - 2.2).abs() < 1e-15);
        assert!(var.running.is_nondecreasing());
        assert_eq!(var.running.eval(0.0).unwrap(), 0.0);
        assert_eq!(*var.running.final_value(), var.total);
    }

    #[test]
    fn sup_distance_examples() {
        let f = StepFn::constant(0.0, 1.0, 0.0).unwrap();
        assert_eq!(f.sup_distance(&f).unwrap(), 0.0);
        let g = StepFn::new(vec![0.0, 0.3, 1.0], vec![0.0, 2.0, 2.0]).unwrap();
        assert_eq!(f.sup_distance(&g).unwrap(), 2.0);
        let h = StepFn::constant(0.0, 2.0, 0.0).unwrap();
        assert!(f.sup_distance(&h).is_err());
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(StepFn::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(StepFn::new(vec![0.0], vec![1.0]).is_err());
        assert!(StepFn::new(vec![0.0, 1.0], vec![1.0]).is_err());
    }

    #[test]
    fn merge_is_exact_union() {
        assert_eq!(merge_times(&[0.0, 0.5, 1.0], &[0.0, 0.25, 0.5, 1.0]), vec![0.0, 0.25, 0.5, 1.0]);
    }

    #[test]
    fn restrict_keeps_values() {
        let f = StepFn::new(vec![0.0, 0.3, 0.6, 1.0], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let g = f.restrict(0.3, 0.8).unwrap();
        assert_eq!(g.times(), &[0.3, 0.6, 0.8]);
        assert_eq!(g.values(), &[2.0, 3.0, 3.0]);
    }

    #[test]
    fn simplify_drops_noops() {
        let f = StepFn::new(vec![0.0, 0.3, 0.6, 1.0], vec![1.0, 1.0, 3.0, 3.0]).unwrap();
        let s = f.simplify();
        assert_eq!(s.times(), &[0.0, 0.6, 1.0]);
        assert_eq!(f.sup_distance(&s).unwrap(), 0.0);
    }

    #[test]
    fn csv_layout() {
        let f = StepFn::new(vec![0.0, 1.0], vec![point(&[1.0, 2.0]), point(&[3.0, 4.0])]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf, "u").unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,u0,u1\n0,1,2\n1,3,4\n");
    }
}
