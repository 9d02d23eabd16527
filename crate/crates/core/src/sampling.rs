//! Reproducible sample points.
//!
//! The generator is xorshift64* (shifts 12, 25, 27; multiplier
//! `0x2545F4914F6CDD1D`) with its state seeded through one round of
//! splitmix64, so every seed (including 0) gives a nonzero state.
//! Uniform reals take the top 53 bits: `(x >> 11) · 2⁻⁵³`.

use serde::Serialize;

use crate::error::GeometryError;
use crate::expr::{eval_jet, Bindings, ExprAst};
use crate::jet::ChartPoint;

/// Points with `|exclude(p)| <` this value are in a singular guard band.
pub const GUARD_BAND: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct Xorshift64Star {
    state: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Xorshift64Star {
    pub fn new(seed: u64) -> Self {
        let s = splitmix64(seed);
        Self {
            state: if s == 0 { 0x9E37_79B9_7F4A_7C15 } else { s },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    pub bounds: [[f64; 2]; 3],
    pub points: usize,
    pub seed: u64,
    pub fixed_points: Vec<[f64; 3]>,
    pub exclude: Vec<ExprAst>,
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            bounds: [[-1.0, 1.0]; 3],
            points: 64,
            seed: 7,
            fixed_points: Vec::new(),
            exclude: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedPoint {
    pub point: [f64; 3],
    pub reason: String,
}

impl SamplingPlan {
    /// Fixed points followed by `points` uniform draws from the box.
    pub fn raw_points(&self) -> Result<Vec<ChartPoint>, GeometryError> {
        let mut out = Vec::with_capacity(self.fixed_points.len() + self.points);
        for p in &self.fixed_points {
            out.push(ChartPoint::from_array(*p)?);
        }
        let mut rng = Xorshift64Star::new(self.seed);
        for _ in 0..self.points {
            let c: [f64; 3] = std::array::from_fn(|i| rng.uniform(self.bounds[i][0], self.bounds[i][1]));
            out.push(ChartPoint::from_array(c)?);
        }
        Ok(out)
    }

    /// The exclusion expression whose guard band contains `p`, if any.
    pub fn guard_violation(&self, p: &ChartPoint, env: &Bindings) -> Result<Option<(usize, f64)>, GeometryError> {
        for (i, e) in self.exclude.iter().enumerate() {
            let v = eval_jet(e, p, env)?.value;
            if v.abs() < GUARD_BAND {
                return Ok(Some((i, v)));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let mut a = Xorshift64Star::new(7);
        let mut b = Xorshift64Star::new(7);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = Xorshift64Star::new(8);
        assert_ne!(Xorshift64Star::new(7).next_u64(), c.next_u64());
    }

    #[test]
    fn zero_seed_is_usable() {
        let mut r = Xorshift64Star::new(0);
        assert_ne!(r.next_u64(), 0);
    }

    #[test]
    fn unit_interval() {
        let mut r = Xorshift64Star::new(42);
        for _ in 0..10_000 {
            let v = r.next_f64();
            assert!((0.0..1.0).contains(&v));
        }
    }

    #[test]
    fn plan_points_in_box() {
        let plan = SamplingPlan {
            bounds: [[-1.0, 1.0], [0.0, 0.5], [2.0, 3.0]],
            points: 50,
            fixed_points: vec![[9.0, 9.0, 9.0]],
            ..Default::default()
        };
        let pts = plan.raw_points().unwrap();
        assert_eq!(pts.len(), 51);
        assert_eq!(pts[0].as_array(), [9.0, 9.0, 9.0]);
        for p in &pts[1..] {
            assert!((-1.0..1.0).contains(&p.x()) && (0.0..0.5).contains(&p.y()) && (2.0..3.0).contains(&p.z()));
        }
        assert_eq!(pts, plan.raw_points().unwrap());
    }

    #[test]
    fn guard_band() {
        let plan = SamplingPlan {
            exclude: vec![crate::expr::parse("z + 3").unwrap()],
            ..Default::default()
        };
        let env = Bindings::new();
        assert!(plan.guard_violation(&ChartPoint::new(0.0, 0.0, -2.95).unwrap(), &env).unwrap().is_some());
        assert!(plan.guard_violation(&ChartPoint::new(0.0, 0.0, -2.5).unwrap(), &env).unwrap().is_none());
    }
}
