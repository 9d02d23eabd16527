//! Second-order jets of scalar fields on a three-dimensional chart.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a scalar at a
//! single chart point. Arithmetic propagates all three through the product
//! and chain rules, so composite expressions are differentiated exactly up
//! to floating-point roundoff.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Denominators with magnitude below this are treated as poles.
pub const POLE_TOLERANCE: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division at singular point (|denominator| = {0:e})")]
    DivisionAtSingularPoint(f64),
    #[error("{func} is undefined at {value}")]
    DomainError { func: &'static str, value: f64 },
    #[error("chart point has a non-finite coordinate")]
    NonFinitePoint,
}

/// Chart coordinate index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coord {
    X,
    Y,
    Z,
}

impl Coord {
    pub const ALL: [Coord; 3] = [Coord::X, Coord::Y, Coord::Z];

    pub fn index(self) -> usize {
        match self {
            Coord::X => 0,
            Coord::Y => 1,
            Coord::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Coord::X => "x",
            Coord::Y => "y",
            Coord::Z => "z",
        }
    }

    pub fn from_name(name: &str) -> Option<Coord> {
        match name {
            "x" => Some(Coord::X),
            "y" => Some(Coord::Y),
            "z" => Some(Coord::Z),
            _ => None,
        }
    }
}

/// A point `(x, y, z)` of the chart. Coordinates are always finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    coords: [f64; 3],
}

impl ChartPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, JetError> {
        Self::from_array([x, y, z])
    }

    pub fn from_array(coords: [f64; 3]) -> Result<Self, JetError> {
        if coords.iter().all(|c| c.is_finite()) {
            Ok(Self { coords })
        } else {
            Err(JetError::NonFinitePoint)
        }
    }

    pub fn origin() -> Self {
        Self { coords: [0.0; 3] }
    }

    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn y(&self) -> f64 {
        self.coords[1]
    }

    pub fn z(&self) -> f64 {
        self.coords[2]
    }

    pub fn coord(&self, c: Coord) -> f64 {
        self.coords[c.index()]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.coords
    }
}

impl fmt::Display for ChartPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.coords[0], self.coords[1], self.coords[2])
    }
}

/// Packed index of the Hessian entry `(i, j)` in the 6-entry upper triangle.
#[inline]
const fn hidx(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// Value, gradient and Hessian of a scalar at one chart point.
///
/// The Hessian is stored as its six independent entries
/// `[xx, xy, xz, yy, yz, zz]`, so it is symmetric by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: [f64; 3],
    hess: [f64; 6],
}

/// Binary arithmetic operations on jets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Elementary functions applied through the chain rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryFn {
    Neg,
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl UnaryFn {
    pub fn name(self) -> &'static str {
        match self {
            UnaryFn::Neg => "neg",
            UnaryFn::Exp => "exp",
            UnaryFn::Log => "log",
            UnaryFn::Sqrt => "sqrt",
            UnaryFn::Sin => "sin",
            UnaryFn::Cos => "cos",
            UnaryFn::Sinh => "sinh",
            UnaryFn::Cosh => "cosh",
        }
    }

    /// Functions callable by name from the expression language (`neg` is
    /// spelled as unary minus there).
    pub fn from_call_name(name: &str) -> Option<UnaryFn> {
        match name {
            "exp" => Some(UnaryFn::Exp),
            "log" => Some(UnaryFn::Log),
            "sqrt" => Some(UnaryFn::Sqrt),
            "sin" => Some(UnaryFn::Sin),
            "cos" => Some(UnaryFn::Cos),
            "sinh" => Some(UnaryFn::Sinh),
            "cosh" => Some(UnaryFn::Cosh),
            _ => None,
        }
    }
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 {
        value: 0.0,
        grad: [0.0; 3],
        hess: [0.0; 6],
    };

    pub fn constant(value: f64) -> Self {
        Self {
            value,
            ..Self::ZERO
        }
    }

    /// The coordinate function `which`, expanded at `p`.
    pub fn seed(p: &ChartPoint, which: Coord) -> Self {
        let mut grad = [0.0; 3];
        grad[which.index()] = 1.0;
        Self {
            value: p.coord(which),
            grad,
            hess: [0.0; 6],
        }
    }

    pub fn from_parts(value: f64, grad: [f64; 3], hess: [[f64; 3]; 3]) -> Self {
        Self {
            value,
            grad,
            hess: [
                hess[0][0], hess[0][1], hess[0][2], hess[1][1], hess[1][2], hess[2][2],
            ],
        }
    }

    #[inline]
    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    #[inline]
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.hess[hidx(i, j)]
    }

    pub fn hessian(&self) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        for (i, row) in h.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.dd(i, j);
            }
        }
        h
    }

    pub fn scale(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            grad: self.grad.map(|g| g * k),
            hess: self.hess.map(|h| h * k),
        }
    }

    /// Compose with a scalar function given its value and first two
    /// derivatives at `self.value`.
    fn compose(self, f0: f64, f1: f64, f2: f64) -> Self {
        let g = self.grad;
        let mut hess = [0.0; 6];
        for i in 0..3 {
            for j in i..3 {
                let k = hidx(i, j);
                hess[k] = f1 * self.hess[k] + f2 * g[i] * g[j];
            }
        }
        Self {
            value: f0,
            grad: g.map(|gi| f1 * gi),
            hess,
        }
    }

    pub fn recip(self) -> Result<Self, JetError> {
        let u = self.value;
        if u.abs() < POLE_TOLERANCE {
            return Err(JetError::DivisionAtSingularPoint(u));
        }
        let r = 1.0 / u;
        Ok(self.compose(r, -r * r, 2.0 * r * r * r))
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, JetError> {
        Ok(self * rhs.recip()?)
    }

    /// Integer power. Negative exponents need a nonzero base.
    pub fn powi(self, n: i32) -> Result<Self, JetError> {
        match n {
            0 => Ok(Self::constant(1.0)),
            1 => Ok(self),
            _ if n < 0 => self.recip()?.powi(-n),
            _ => {
                let u = self.value;
                let nf = f64::from(n);
                let f0 = u.powi(n);
                let f1 = nf * u.powi(n - 1);
                let f2 = nf * (nf - 1.0) * u.powi(n - 2);
                Ok(self.compose(f0, f1, f2))
            }
        }
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(c, s, c)
    }

    pub fn ln(self) -> Result<Self, JetError> {
        let u = self.value;
        if !(u > 0.0) {
            return Err(JetError::DomainError {
                func: "log",
                value: u,
            });
        }
        Ok(self.compose(u.ln(), 1.0 / u, -1.0 / (u * u)))
    }

    pub fn sqrt(self) -> Result<Self, JetError> {
        let u = self.value;
        if !(u > 0.0) {
            return Err(JetError::DomainError {
                func: "sqrt",
                value: u,
            });
        }
        let s = u.sqrt();
        Ok(self.compose(s, 0.5 / s, -0.25 / (s * u)))
    }

    pub fn apply(self, f: UnaryFn) -> Result<Self, JetError> {
        Ok(match f {
            UnaryFn::Neg => -self,
            UnaryFn::Exp => self.exp(),
            UnaryFn::Log => self.ln()?,
            UnaryFn::Sqrt => self.sqrt()?,
            UnaryFn::Sin => self.sin(),
            UnaryFn::Cos => self.cos(),
            UnaryFn::Sinh => self.sinh(),
            UnaryFn::Cosh => self.cosh(),
        })
    }

    pub fn arith(self, rhs: Self, op: ArithOp) -> Result<Self, JetError> {
        match op {
            ArithOp::Add => Ok(self + rhs),
            ArithOp::Sub => Ok(self - rhs),
            ArithOp::Mul => Ok(self * rhs),
            ArithOp::Div => self.checked_div(rhs),
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;

    fn add(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.value += rhs.value;
        for i in 0..3 {
            out.grad[i] += rhs.grad[i];
        }
        for k in 0..6 {
            out.hess[k] += rhs.hess[k];
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;

    fn sub(self, rhs: Jet2) -> Jet2 {
        self + (-rhs)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;

    fn neg(self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: self.grad.map(|g| -g),
            hess: self.hess.map(|h| -h),
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;

    fn mul(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (&self, &rhs);
        let mut hess = [0.0; 6];
        for i in 0..3 {
            for j in i..3 {
                let k = hidx(i, j);
                hess[k] = a.value * b.hess[k]
                    + b.value * a.hess[k]
                    + a.grad[i] * b.grad[j]
                    + a.grad[j] * b.grad[i];
            }
        }
        let mut grad = [0.0; 3];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = a.value * b.grad[i] + b.value * a.grad[i];
        }
        Jet2 {
            value: a.value * b.value,
            grad,
            hess,
        }
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;

    fn mul(self, k: f64) -> Jet2 {
        self.scale(k)
    }
}

/// The three coordinate seeds at `p`.
pub fn seeds(p: &ChartPoint) -> [Jet2; 3] {
    Coord::ALL.map(|c| Jet2::seed(p, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64, z: f64) -> ChartPoint {
        ChartPoint::new(x, y, z).unwrap()
    }

    #[test]
    fn seed_is_coordinate_projection() {
        let p = pt(1.0, 2.0, 3.0);
        let sx = Jet2::seed(&p, Coord::X);
        assert_eq!(sx.value, 1.0);
        assert_eq!(sx.grad, [1.0, 0.0, 0.0]);
        assert_eq!(sx.hessian(), [[0.0; 3]; 3]);

        let sz = Jet2::seed(&pt(0.0, 0.0, 5.0), Coord::Z);
        assert_eq!(sz.value, 5.0);
        assert_eq!(sz.grad, [0.0, 0.0, 1.0]);

        let sy = Jet2::seed(&ChartPoint::origin(), Coord::Y);
        assert_eq!(sy.value, 0.0);
        assert_eq!(sy.grad, [0.0, 1.0, 0.0]);
    }

    #[test]
    fn square_of_x() {
        let x = Jet2::seed(&pt(3.0, 0.0, 0.0), Coord::X);
        let sq = x * x;
        assert_eq!(sq.value, 9.0);
        assert_eq!(sq.d(0), 6.0);
        assert_eq!(sq.dd(0, 0), 2.0);
    }

    #[test]
    fn reciprocal_of_z() {
        let z = Jet2::seed(&pt(0.0, 0.0, 2.0), Coord::Z);
        let r = Jet2::constant(1.0).arith(z, ArithOp::Div).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.d(2), -0.25);
        assert_eq!(r.dd(2, 2), 0.25);
    }

    #[test]
    fn exp_of_2z() {
        let z = Jet2::seed(&ChartPoint::origin(), Coord::Z);
        let e = (z * 2.0).exp();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.d(2), 2.0);
        assert_eq!(e.dd(2, 2), 4.0);
    }

    #[test]
    fn sqrt_of_constant() {
        let s = Jet2::constant(4.0).apply(UnaryFn::Sqrt).unwrap();
        assert_eq!(s.value, 2.0);
        assert_eq!(s.grad, [0.0; 3]);
    }

    #[test]
    fn pole_and_domain_errors() {
        let zero = Jet2::constant(0.0);
        assert!(matches!(
            Jet2::constant(1.0).checked_div(zero),
            Err(JetError::DivisionAtSingularPoint(_))
        ));
        assert!(matches!(zero.powi(-2), Err(JetError::DivisionAtSingularPoint(_))));
        assert!(matches!(
            Jet2::constant(-1.0).ln(),
            Err(JetError::DomainError { func: "log", .. })
        ));
        assert!(matches!(
            zero.sqrt(),
            Err(JetError::DomainError { func: "sqrt", .. })
        ));
        // tiny but above the pole tolerance is returned as-is
        assert!(Jet2::constant(1e-200).recip().is_ok());
    }

    #[test]
    fn non_finite_points_rejected() {
        assert!(ChartPoint::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(ChartPoint::new(0.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn powi_matches_repeated_product() {
        let p = pt(0.7, -1.3, 0.4);
        let [x, y, _] = seeds(&p);
        let u = x * y + Jet2::constant(2.0);
        let cube = u.powi(3).unwrap();
        let prod = u * u * u;
        assert!((cube.value - prod.value).abs() < 1e-14);
        for i in 0..3 {
            assert!((cube.d(i) - prod.d(i)).abs() < 1e-13);
            for j in 0..3 {
                assert!((cube.dd(i, j) - prod.dd(i, j)).abs() < 1e-12);
            }
        }
        let inv = u.powi(-2).unwrap();
        let direct = (u * u).recip().unwrap();
        assert!((inv.dd(0, 1) - direct.dd(0, 1)).abs() < 1e-13);
    }
}
