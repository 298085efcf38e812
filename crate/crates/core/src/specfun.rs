//! Scalar functions applied eigenvalue-wise.
//!
//! The workhorse is [`PiecewiseFn`], `f(x) = c + a x + sum_i b_i (x - t_i)_+`,
//! which covers every angle function and any finite positive combination of
//! them. A handful of smooth closed forms ([`ClosedForm`]) are available for
//! checks that need them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{rng_from_seed, DOMAIN_CLAMP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Arguments must be `>= -DOMAIN_CLAMP`; tiny negatives are clamped to 0.
    #[default]
    NonnegAxis,
    RealLine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    Convex,
    Concave,
    Affine,
    Neither,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub shape: Shape,
    pub nonnegative_on_grid: bool,
    pub f0_zero: bool,
    pub increasing: bool,
}

impl Classification {
    pub fn is_convex(&self) -> bool {
        matches!(self.shape, Shape::Convex | Shape::Affine)
    }

    pub fn is_concave(&self) -> bool {
        matches!(self.shape, Shape::Concave | Shape::Affine)
    }
}

/// A real function that can be applied to a Hermitian matrix through its
/// eigenvalues.
pub trait ScalarFn: Sync {
    /// Raw evaluation, no domain handling.
    fn eval_raw(&self, x: f64) -> f64;
    fn domain(&self) -> Domain;
    fn classification(&self) -> Classification;
    /// JSON description recorded in trial reports.
    fn describe(&self) -> String;
}

/// Evaluates with the domain clamp applied.
pub fn eval_checked<F: ScalarFn + ?Sized>(f: &F, x: f64) -> Result<f64> {
    match f.domain() {
        Domain::RealLine => Ok(f.eval_raw(x)),
        Domain::NonnegAxis => {
            if x < -DOMAIN_CLAMP {
                Err(Error::Domain { value: x })
            } else {
                Ok(f.eval_raw(x.max(0.0)))
            }
        }
    }
}

/// `c + a x + sum_i b_i (x - t_i)_+` with knots `t_i >= 0` strictly
/// increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFn {
    c: f64,
    a: f64,
    terms: Vec<(f64, f64)>,
    domain: Domain,
}

/// Wire form: `{"c": num, "a": num, "terms": [[b, t], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FnJson {
    #[serde(default)]
    pub c: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub terms: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
}

impl PiecewiseFn {
    pub fn new(c: f64, a: f64, terms: Vec<(f64, f64)>) -> Result<Self> {
        if !c.is_finite() || !a.is_finite() {
            return Err(Error::InvalidFunction("non-finite affine part".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for &(b, t) in &terms {
            if !b.is_finite() || !t.is_finite() {
                return Err(Error::InvalidFunction("non-finite term".into()));
            }
            if t < 0.0 {
                return Err(Error::InvalidFunction(format!("negative knot {t}")));
            }
            if t <= prev {
                return Err(Error::InvalidFunction(
                    "knots must be strictly increasing".into(),
                ));
            }
            prev = t;
        }
        Ok(PiecewiseFn {
            c,
            a,
            terms,
            domain: Domain::NonnegAxis,
        })
    }

    pub fn identity() -> Self {
        Self::affine(0.0, 1.0)
    }

    pub fn affine(c: f64, a: f64) -> Self {
        PiecewiseFn {
            c,
            a,
            terms: Vec::new(),
            domain: Domain::NonnegAxis,
        }
    }

    /// `x - (x - t)_+ = min(x, t)`.
    pub fn angle_min(t: f64) -> Result<Self> {
        Self::new(0.0, 1.0, vec![(-1.0, t)])
    }

    /// `(x - t)_+`.
    pub fn hinge(t: f64) -> Result<Self> {
        Self::new(0.0, 0.0, vec![(1.0, t)])
    }

    /// `a x + (x - t)_+`.
    pub fn convex_angle(a: f64, t: f64) -> Result<Self> {
        Self::new(0.0, a, vec![(1.0, t)])
    }

    pub fn on_real_line(mut self) -> Self {
        self.domain = Domain::RealLine;
        self
    }

    pub fn constant_term(&self) -> f64 {
        self.c
    }

    pub fn slope(&self) -> f64 {
        self.a
    }

    pub fn terms(&self) -> &[(f64, f64)] {
        &self.terms
    }

    pub fn knots(&self) -> Vec<f64> {
        self.terms.iter().map(|&(_, t)| t).collect()
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        eval_checked(self, x)
    }

    pub fn negate(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        PiecewiseFn {
            c: self.c * s,
            a: self.a * s,
            terms: self.terms.iter().map(|&(b, t)| (b * s, t)).collect(),
            domain: self.domain,
        }
    }

    /// Pointwise sum; equal knots are merged.
    pub fn add(&self, other: &Self) -> Self {
        let mut terms: Vec<(f64, f64)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let next = match (self.terms.get(i), other.terms.get(j)) {
                (Some(&(b1, t1)), Some(&(b2, t2))) if t1 == t2 => {
                    i += 1;
                    j += 1;
                    (b1 + b2, t1)
                }
                (Some(&x), Some(&y)) => {
                    if x.1 < y.1 {
                        i += 1;
                        x
                    } else {
                        j += 1;
                        y
                    }
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
            terms.push(next);
        }
        let domain = if self.domain == Domain::RealLine && other.domain == Domain::RealLine {
            Domain::RealLine
        } else {
            Domain::NonnegAxis
        };
        PiecewiseFn {
            c: self.c + other.c,
            a: self.a + other.a,
            terms,
            domain,
        }
    }

    /// Slopes on `[0, t_1), [t_1, t_2), ..., [t_m, inf)`.
    pub fn segment_slopes(&self) -> Vec<f64> {
        let mut slopes = Vec::with_capacity(self.terms.len() + 1);
        let mut s = self.a;
        slopes.push(s);
        for &(b, _) in &self.terms {
            s += b;
            slopes.push(s);
        }
        slopes
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.segment_slopes().iter().all(|&s| s > 0.0)
    }

    /// Evaluation grid used by [`classify`](Self::classify):
    /// `{0, knots, knots +- eps, 10 * max knot}`.
    pub fn classification_grid(&self) -> Vec<f64> {
        const EPS: f64 = 1e-6;
        let mut grid = vec![0.0];
        for &(_, t) in &self.terms {
            grid.extend([t - EPS, t, t + EPS]);
        }
        let max_knot = self.terms.last().map_or(1.0, |&(_, t)| t.max(1.0));
        grid.push(10.0 * max_knot);
        grid.retain(|&x| x >= 0.0);
        grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        grid.dedup();
        grid
    }

    pub fn classify(&self) -> Classification {
        let nonzero: Vec<f64> = self
            .terms
            .iter()
            .map(|&(b, _)| b)
            .filter(|&b| b != 0.0)
            .collect();
        let shape = if nonzero.is_empty() {
            Shape::Affine
        } else if nonzero.iter().all(|&b| b > 0.0) {
            Shape::Convex
        } else if nonzero.iter().all(|&b| b < 0.0) {
            Shape::Concave
        } else {
            Shape::Neither
        };
        let grid = self.classification_grid();
        let values: Vec<f64> = grid.iter().map(|&x| self.eval_raw(x)).collect();
        let nonnegative_on_grid = values.iter().all(|&v| v >= -1e-12);
        let increasing = values
            .windows(2)
            .all(|w| w[1] >= w[0] - 1e-12 * (1.0 + w[0].abs()))
            && *self.segment_slopes().last().unwrap() >= -1e-12;
        Classification {
            shape,
            nonnegative_on_grid,
            f0_zero: self.eval_raw(0.0) == 0.0,
            increasing,
        }
    }

    /// Functional inverse of a strictly increasing function, again
    /// piecewise linear with knots at the images of the original knots.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_strictly_increasing() {
            return Err(Error::NotStrictlyIncreasing);
        }
        let slopes = self.segment_slopes();
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, &(_, t)) in self.terms.iter().enumerate() {
            let y = self.eval_raw(t);
            terms.push((1.0 / slopes[i + 1] - 1.0 / slopes[i], y));
        }
        let mut inv = Self::new(-self.c / self.a, 1.0 / self.a, terms)?;
        inv.domain = self.domain;
        Ok(inv)
    }

    pub fn to_json(&self) -> FnJson {
        FnJson {
            c: self.c,
            a: self.a,
            terms: self.terms.iter().map(|&(b, t)| [b, t]).collect(),
            domain: (self.domain != Domain::NonnegAxis).then_some(self.domain),
        }
    }

    pub fn from_json(json: FnJson) -> Result<Self> {
        let mut f = Self::new(
            json.c,
            json.a,
            json.terms.iter().map(|p| (p[0], p[1])).collect(),
        )?;
        f.domain = json.domain.unwrap_or_default();
        Ok(f)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let json: FnJson =
            serde_json::from_str(text).map_err(|e| Error::MalformedJson(e.to_string()))?;
        Self::from_json(json)
    }
}

impl ScalarFn for PiecewiseFn {
    fn eval_raw(&self, x: f64) -> f64 {
        let mut v = self.c + self.a * x;
        for &(b, t) in &self.terms {
            if x > t {
                v += b * (x - t);
            }
        }
        v
    }

    fn domain(&self) -> Domain {
        self.domain
    }

    fn classification(&self) -> Classification {
        self.classify()
    }

    fn describe(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("serializable")
    }
}

/// Smooth functions used only where a check calls for them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClosedForm {
    Sqrt,
    Square,
    /// `x^r` for `r > 0`.
    Power(f64),
}

impl ScalarFn for ClosedForm {
    fn eval_raw(&self, x: f64) -> f64 {
        match *self {
            ClosedForm::Sqrt => x.sqrt(),
            ClosedForm::Square => x * x,
            ClosedForm::Power(r) => x.powf(r),
        }
    }

    fn domain(&self) -> Domain {
        match self {
            ClosedForm::Square => Domain::RealLine,
            _ => Domain::NonnegAxis,
        }
    }

    fn classification(&self) -> Classification {
        let shape = match *self {
            ClosedForm::Sqrt => Shape::Concave,
            ClosedForm::Square => Shape::Convex,
            ClosedForm::Power(r) if r < 1.0 => Shape::Concave,
            ClosedForm::Power(r) if r > 1.0 => Shape::Convex,
            ClosedForm::Power(_) => Shape::Affine,
        };
        Classification {
            shape,
            nonnegative_on_grid: true,
            f0_zero: true,
            increasing: true,
        }
    }

    fn describe(&self) -> String {
        match *self {
            ClosedForm::Sqrt => "\"sqrt\"".into(),
            ClosedForm::Square => "\"square\"".into(),
            ClosedForm::Power(r) => format!("{{\"power\":{r}}}"),
        }
    }
}

fn sample_knots<R: Rng + ?Sized>(rng: &mut R, max_knots: usize, scale: f64) -> Vec<f64> {
    let count = rng.random_range(1..=max_knots.max(1));
    let mut knots: Vec<f64> = (0..count)
        .map(|_| 2.0 * scale * rng.random::<f64>())
        .collect();
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    knots
}

/// Random `c + a x - sum b_i (x - t_i)_+` with `c, a, b_i >= 0` and
/// `sum b_i <= a`: non-negative, increasing and concave on `[0, inf)`.
pub fn sample_concave_with<R: Rng + ?Sized>(
    rng: &mut R,
    max_knots: usize,
    scale: f64,
) -> PiecewiseFn {
    let knots = sample_knots(rng, max_knots, scale);
    let c = if rng.random_bool(0.25) {
        0.0
    } else {
        scale * rng.random::<f64>()
    };
    let a = scale * (0.05 + rng.random::<f64>());
    // Fraction of the slope removed by the knots; a quarter of the samples
    // flatten out completely, like min(x, t).
    let removed = if rng.random_bool(0.25) {
        1.0
    } else {
        rng.random::<f64>()
    };
    let weights: Vec<f64> = knots.iter().map(|_| 0.05 + rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    let terms = knots
        .iter()
        .zip(&weights)
        .map(|(&t, &w)| (-a * removed * w / total, t))
        .collect();
    PiecewiseFn::new(c, a, terms).expect("sampled knots are valid")
}

/// Random `a x + sum b_i (x - t_i)_+` with `a, b_i >= 0`: convex, increasing
/// and `f(0) = 0`.
pub fn sample_convex_with<R: Rng + ?Sized>(
    rng: &mut R,
    max_knots: usize,
    scale: f64,
) -> PiecewiseFn {
    let knots = sample_knots(rng, max_knots, scale);
    let a = scale * (0.05 + rng.random::<f64>());
    let terms = knots
        .iter()
        .map(|&t| (scale * (0.05 + rng.random::<f64>()), t))
        .collect();
    PiecewiseFn::new(0.0, a, terms).expect("sampled knots are valid")
}

pub fn sample_concave(seed: u64, max_knots: usize, scale: f64) -> PiecewiseFn {
    sample_concave_with(&mut rng_from_seed(seed), max_knots, scale)
}

pub fn sample_convex(seed: u64, max_knots: usize, scale: f64) -> PiecewiseFn {
    sample_convex_with(&mut rng_from_seed(seed), max_knots, scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};

    #[test]
    fn angle_function_values() {
        let f = PiecewiseFn::angle_min(1.0).unwrap();
        assert_eq!(f.eval(2.0).unwrap(), 1.0);
        let g = PiecewiseFn::convex_angle(1.0, 1.0).unwrap();
        assert_eq!(g.eval(0.9).unwrap(), 0.9);
        assert_eq!(g.eval(1.5).unwrap(), 2.0);
        let g101 = PiecewiseFn::convex_angle(101.0, 1.0).unwrap();
        assert_eq!(g101.eval(1.0).unwrap(), 101.0);
    }

    #[test]
    fn domain_checks() {
        let f = PiecewiseFn::identity();
        assert_eq!(f.eval(-1e-10).unwrap(), 0.0);
        assert_eq!(f.eval(-1e-3).unwrap_err().code(), "E_DOMAIN");
        assert_eq!(f.clone().on_real_line().eval(-1e-3).unwrap(), -1e-3);
    }

    #[test]
    fn knots_validated() {
        assert!(PiecewiseFn::new(0.0, 1.0, vec![(1.0, 2.0), (1.0, 1.0)]).is_err());
        assert!(PiecewiseFn::new(0.0, 1.0, vec![(1.0, -0.5)]).is_err());
        assert!(PiecewiseFn::new(0.0, 1.0, vec![(1.0, 1.0), (1.0, 1.0)]).is_err());
    }

    #[test]
    fn classification_examples() {
        let convex = PiecewiseFn::convex_angle(1.0, 1.0).unwrap().classify();
        assert_eq!(convex.shape, Shape::Convex);
        assert!(convex.f0_zero && convex.increasing && convex.nonnegative_on_grid);

        let concave = PiecewiseFn::angle_min(1.0).unwrap().classify();
        assert_eq!(concave.shape, Shape::Concave);
        assert!(concave.f0_zero && concave.increasing);

        let drop = PiecewiseFn::new(0.0, 0.0, vec![(-1.0, 1.0)])
            .unwrap()
            .classify();
        assert_eq!(drop.shape, Shape::Concave);
        assert!(!drop.increasing);
        assert!(!drop.nonnegative_on_grid);

        let mixed = PiecewiseFn::new(0.0, 1.0, vec![(1.0, 1.0), (-0.5, 2.0)]).unwrap();
        assert_eq!(mixed.classify().shape, Shape::Neither);
        assert_eq!(PiecewiseFn::identity().classify().shape, Shape::Affine);
    }

    #[test]
    fn samples_have_promised_shape() {
        let cv = sample_convex(5, 5, 1.0).classify();
        assert_eq!(cv.shape, Shape::Convex);
        assert!(cv.f0_zero && cv.increasing && cv.nonnegative_on_grid);
        let cc = sample_concave(5, 5, 1.0).classify();
        assert!(cc.is_concave());
        assert!(cc.increasing && cc.nonnegative_on_grid);
        assert_eq!(sample_concave(5, 5, 1.0), sample_concave(5, 5, 1.0));
        assert_eq!(sample_convex(9, 3, 2.0), sample_convex(9, 3, 2.0));
    }

    #[test]
    fn inverse_of_half_angle() {
        let f = PiecewiseFn::new(0.0, 1.0, vec![(-0.5, 1.0)]).unwrap();
        let g = f.inverse().unwrap();
        for &x in &[0.0, 0.3, 1.0, 1.7, 5.0] {
            let expected = if x <= 1.0 { x } else { 2.0 * x - 1.0 };
            assert!((g.eval(x).unwrap() - expected).abs() < 1e-14);
        }
        for i in 0..=100 {
            let x = i as f64 * 0.07;
            assert!((g.eval(f.eval(x).unwrap()).unwrap() - x).abs() < 1e-12);
        }
        assert!(PiecewiseFn::angle_min(1.0).unwrap().inverse().is_err());
    }

    #[test]
    fn json_round_trip() {
        let f = PiecewiseFn::parse(r#"{"c":0,"a":101,"terms":[[1,1]]}"#).unwrap();
        assert_eq!(f, PiecewiseFn::convex_angle(101.0, 1.0).unwrap());
        let back = PiecewiseFn::parse(&f.describe()).unwrap();
        assert_eq!(back, f);
        assert!(PiecewiseFn::parse(r#"{"c":0,"terms":[[1,-1]]}"#).is_err());
    }

    #[test]
    fn sum_merges_knots() {
        let f = PiecewiseFn::convex_angle(1.0, 1.0).unwrap();
        let g = PiecewiseFn::new(0.0, 0.5, vec![(2.0, 0.5), (1.0, 1.0)]).unwrap();
        let s = f.add(&g);
        assert_eq!(s.terms(), &[(2.0, 0.5), (2.0, 1.0)]);
        for &x in &[0.0, 0.7, 1.3, 4.0] {
            assert_eq!(s.eval(x).unwrap(), f.eval(x).unwrap() + g.eval(x).unwrap());
        }
    }

    proptest! {
        #[test]
        fn sampled_convex_is_midpoint_convex(seed in any::<u64>(), pair_seed in any::<u64>()) {
            let f = sample_convex(seed, 5, 1.0);
            prop_assert_eq!(f.eval(0.0).unwrap(), 0.0);
            let max_knot = f.knots().last().copied().unwrap_or(1.0);
            let mut rng = rng_from_seed(pair_seed);
            for _ in 0..100 {
                let x = 2.0 * max_knot * rng.random::<f64>();
                let y = 2.0 * max_knot * rng.random::<f64>();
                let mid = f.eval(0.5 * (x + y)).unwrap();
                let avg = 0.5 * (f.eval(x).unwrap() + f.eval(y).unwrap());
                prop_assert!(mid <= avg + 1e-12);
            }
        }

        #[test]
        fn negation_swaps_convexity(seed in any::<u64>()) {
            let f = sample_convex(seed, 4, 1.0);
            prop_assert_eq!(f.classify().shape, Shape::Convex);
            prop_assert_eq!(f.negate().classify().shape, Shape::Concave);
        }

        #[test]
        fn sampled_concave_is_increasing(seed in any::<u64>()) {
            let c = sample_concave(seed, 5, 1.0).classify();
            prop_assert!(c.is_concave() && c.increasing && c.nonnegative_on_grid);
        }
    }
}
