use crate::amalgam::grid::GridSpec;
use crate::error::{domain, Result};

/// Real vector field sampled at cell centers, stored component-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    m: usize,
    data: Vec<f64>,
}

impl GridField {
    pub fn new(spec: GridSpec, m: usize, data: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return domain("a field needs at least one component");
        }
        if data.len() != m * spec.len() {
            return domain(format!(
                "expected {} samples, got {}",
                m * spec.len(),
                data.len()
            ));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return domain(format!("non-finite sample {v}"));
        }
        Ok(GridField { spec, m, data })
    }

    pub fn zeros(spec: GridSpec, m: usize) -> Self {
        let n = spec.len();
        GridField {
            spec,
            m: m.max(1),
            data: vec![0.0; m.max(1) * n],
        }
    }

    /// Samples `f(x, out)` at every cell center.
    pub fn from_fn(spec: GridSpec, m: usize, mut f: impl FnMut(&[f64], &mut [f64])) -> Self {
        let n = spec.len();
        let d = spec.d();
        let mut data = vec![0.0; m * n];
        let mut out = vec![0.0; m];
        let [xs0, xs1, xs2] = spec.axis_coords();
        let mut idx = 0;
        let mut x = [0.0; 3];
        for &a in &xs0 {
            for &b in &xs1 {
                for &c in &xs2 {
                    x[0] = a;
                    x[1] = b;
                    x[2] = c;
                    out.iter_mut().for_each(|o| *o = 0.0);
                    f(&x[..d], &mut out);
                    for (k, &o) in out.iter().enumerate() {
                        data[k * n + idx] = o;
                    }
                    idx += 1;
                }
            }
        }
        GridField { spec, m, data }
    }

    /// Scalar field from a closed-form function.
    pub fn scalar(spec: GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        Self::from_fn(spec, 1, |x, out| out[0] = f(x))
    }

    /// Assembles a field from per-component sample vectors.
    pub fn from_components(spec: GridSpec, comps: Vec<Vec<f64>>) -> Result<Self> {
        let m = comps.len();
        let mut data = Vec::with_capacity(m * spec.len());
        for c in comps {
            if c.len() != spec.len() {
                return domain("component length does not match the grid");
            }
            data.extend(c);
        }
        Self::new(spec, m, data)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn components(&self) -> usize {
        self.m
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.spec.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.spec.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Pointwise Euclidean (Frobenius for tensors) magnitude.
    pub fn magnitude(&self) -> Vec<f64> {
        let n = self.spec.len();
        if self.m == 1 {
            return self.data.iter().map(|v| v.abs()).collect();
        }
        let mut out = vec![0.0; n];
        for c in 0..self.m {
            for (o, v) in out.iter_mut().zip(self.component(c)) {
                *o += v * v;
            }
        }
        out.iter_mut().for_each(|o| *o = o.sqrt());
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn scaled(&self, a: f64) -> Self {
        GridField {
            spec: self.spec.clone(),
            m: self.m,
            data: self.data.iter().map(|v| a * v).collect(),
        }
    }

    pub fn scale_in_place(&mut self, a: f64) {
        self.data.iter_mut().for_each(|v| *v *= a);
    }

    fn check_compatible(&self, other: &GridField) -> Result<()> {
        if self.spec != other.spec || self.m != other.m {
            return domain("fields differ in grid or component count");
        }
        Ok(())
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &GridField) -> Result<Self> {
        self.check_compatible(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| x + a * y)
            .collect();
        Ok(GridField {
            spec: self.spec.clone(),
            m: self.m,
            data,
        })
    }

    pub fn add(&self, other: &GridField) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &GridField) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// Pointwise product of magnitudes, a scalar field.
    pub fn magnitude_product(&self, other: &GridField) -> Result<Self> {
        if self.spec != other.spec {
            return domain("fields live on different grids");
        }
        let data = self
            .magnitude()
            .iter()
            .zip(other.magnitude())
            .map(|(a, b)| a * b)
            .collect();
        Ok(GridField {
            spec: self.spec.clone(),
            m: 1,
            data,
        })
    }

    /// Componentwise multiplication by a scalar field.
    pub fn times_scalar(&self, s: &[f64]) -> Result<Self> {
        if s.len() != self.spec.len() {
            return domain("scalar weight length does not match the grid");
        }
        let n = self.spec.len();
        let mut data = self.data.clone();
        for c in 0..self.m {
            for (v, w) in data[c * n..(c + 1) * n].iter_mut().zip(s) {
                *v *= w;
            }
        }
        Ok(GridField {
            spec: self.spec.clone(),
            m: self.m,
            data,
        })
    }
}

/// Time-indexed sequence of fields with quadrature weights.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSeries {
    spec: GridSpec,
    m: usize,
    times: Vec<f64>,
    weights: Vec<f64>,
    fields: Vec<GridField>,
}

impl FieldSeries {
    /// Series with explicit positive quadrature weights.
    pub fn with_weights(
        times: Vec<f64>,
        weights: Vec<f64>,
        fields: Vec<GridField>,
    ) -> Result<Self> {
        if fields.is_empty() {
            return domain("empty series");
        }
        if times.len() != fields.len() || weights.len() != fields.len() {
            return domain("times, weights and fields differ in length");
        }
        if times[0] < 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return domain("times must be nonnegative and strictly increasing");
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return domain("weights must be positive");
        }
        let spec = fields[0].spec().clone();
        let m = fields[0].components();
        if fields
            .iter()
            .any(|f| f.spec() != &spec || f.components() != m)
        {
            return domain("all nodes must share grid and component count");
        }
        Ok(FieldSeries {
            spec,
            m,
            times,
            weights,
            fields,
        })
    }

    /// Series with trapezoidal weights over `[t_first, t_last]`.
    pub fn trapezoid(times: Vec<f64>, fields: Vec<GridField>) -> Result<Self> {
        let w = trapezoid_weights(&times)?;
        Self::with_weights(times, w, fields)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn components(&self) -> usize {
        self.m
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn fields(&self) -> &[GridField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn field(&self, j: usize) -> &GridField {
        &self.fields[j]
    }

    /// Same nodes, every field transformed by `f`.
    pub fn map(&self, mut f: impl FnMut(f64, &GridField) -> GridField) -> Result<Self> {
        let fields = self
            .times
            .iter()
            .zip(&self.fields)
            .map(|(&t, u)| f(t, u))
            .collect();
        Self::with_weights(self.times.clone(), self.weights.clone(), fields)
    }

    /// `t^a u(t)`; for `a > 0` nodes at `t = 0` are dropped (open endpoint).
    pub fn time_weighted(&self, a: f64) -> Result<Self> {
        let mut times = Vec::new();
        let mut weights = Vec::new();
        let mut fields = Vec::new();
        for j in 0..self.len() {
            let t = self.times[j];
            if t == 0.0 && a != 0.0 {
                continue;
            }
            times.push(t);
            weights.push(self.weights[j]);
            fields.push(self.fields[j].scaled(t.powf(a)));
        }
        Self::with_weights(times, weights, fields)
    }
}

pub fn trapezoid_weights(times: &[f64]) -> Result<Vec<f64>> {
    if times.len() < 2 {
        return domain("trapezoidal weights need at least two nodes");
    }
    let n = times.len();
    let mut w = vec![0.0; n];
    for j in 0..n - 1 {
        let dt = times[j + 1] - times[j];
        if dt <= 0.0 {
            return domain("times must be strictly increasing");
        }
        w[j] += 0.5 * dt;
        w[j + 1] += 0.5 * dt;
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::centered(2, 3, 2).unwrap()
    }

    #[test]
    fn rejects_non_finite_samples() {
        let g = grid();
        let mut data = vec![0.0; g.len()];
        data[3] = f64::NAN;
        assert!(GridField::new(g, 1, data).is_err());
    }

    #[test]
    fn magnitude_is_euclidean() {
        let f = GridField::from_fn(grid(), 2, |_, o| {
            o[0] = 3.0;
            o[1] = -4.0;
        });
        assert!(f.magnitude().iter().all(|&v| v == 5.0));
    }

    #[test]
    fn trapezoid_weights_sum_to_span() {
        let w = trapezoid_weights(&[0.0, 0.5, 1.5, 4.0]).unwrap();
        assert!((w.iter().sum::<f64>() - 4.0).abs() < 1e-15);
    }

    #[test]
    fn series_validates_ordering() {
        let f = GridField::zeros(grid(), 1);
        assert!(FieldSeries::trapezoid(vec![0.0, 0.0], vec![f.clone(), f.clone()]).is_err());
        assert!(FieldSeries::trapezoid(vec![0.0, 1.0], vec![f.clone(), f]).is_ok());
    }

    #[test]
    fn time_weighting_drops_initial_node() {
        let f = GridField::from_fn(grid(), 1, |_, o| o[0] = 1.0);
        let s = FieldSeries::trapezoid(vec![0.0, 4.0], vec![f.clone(), f]).unwrap();
        let w = s.time_weighted(0.5).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.field(0).data()[0], 2.0);
    }
}
