use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number type the expression evaluator is generic over.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    /// The underlying real value, used for domain checks.
    fn real(&self) -> f64;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, c: f64) -> Self;
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn real(&self) -> f64 {
        *self
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powf(self, c: f64) -> Self {
        f64::powf(self, c)
    }
}

/// `value + deriv·ε` with `ε² = 0`. Nesting `Dual<Dual<f64>>` carries second
/// derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub value: T,
    pub deriv: T,
}

/// First-order dual number over the reals.
pub type DualNumber = Dual<f64>;

impl<T: Scalar> Dual<T> {
    pub fn new(value: T, deriv: T) -> Self {
        Dual { value, deriv }
    }

    pub fn variable(x: T) -> Self {
        Dual {
            value: x,
            deriv: T::constant(1.0),
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual::new(
            self.value * rhs.value,
            self.deriv * rhs.value + self.value * rhs.deriv,
        )
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.value / rhs.value;
        Dual::new(q, (self.deriv - q * rhs.deriv) / rhs.value)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual::new(-self.value, -self.deriv)
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn constant(c: f64) -> Self {
        Dual::new(T::constant(c), T::constant(0.0))
    }
    fn real(&self) -> f64 {
        self.value.real()
    }
    fn ln(self) -> Self {
        Dual::new(self.value.ln(), self.deriv / self.value)
    }
    fn exp(self) -> Self {
        let e = self.value.exp();
        Dual::new(e, self.deriv * e)
    }
    fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        Dual::new(s, self.deriv / (s * T::constant(2.0)))
    }
    fn powf(self, c: f64) -> Self {
        if c == 0.0 {
            return Dual::constant(1.0);
        }
        if c == 1.0 {
            return self;
        }
        Dual::new(
            self.value.powf(c),
            self.deriv * self.value.powf(c - 1.0) * T::constant(c),
        )
    }
}
