//! Jet arithmetic: the forward-mode layer under the crate's
//! reverse-over-forward differentiation.
//!
//! A jet carries a value plus derivative components with respect to the three
//! position coordinates. Three flavors are used:
//!
//! - [`Val`]: plain value, no derivatives (inference).
//! - [`Grad3`]: value + gradient (3 tangents), enough for losses on the
//!   acceleration.
//! - [`Lapl`]: value + gradient + the diagonal of the Hessian, enough to also
//!   evaluate the Laplacian. Mixed second derivatives never appear in any
//!   quantity we need, so the diagonal propagation stays closed under the
//!   product and chain rules.
//!
//! Each flavor also provides adjoint (reverse) rules for its product and
//! chain rules. Running the reverse sweep over a recorded forward pass of
//! jets yields parameter gradients of losses that depend on derivatives of
//! the network output - reverse-mode over forward-mode differentiation, exact
//! to machine precision.

use std::ops::{Add, Mul, Neg, Sub};

/// First four derivatives `[g, g', g'', g''']` of a scalar function at a
/// point, the payload of the generic chain rule.
pub type Derivs = [f64; 4];

pub trait Jet:
    Copy
    + std::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Number of components carried (1, 4, or 7).
    const COMPONENTS: usize;

    /// Constant jet: given value, zero derivatives.
    fn constant(v: f64) -> Self;
    /// Variable jet seeded with a unit tangent in direction `axis`.
    fn variable(v: f64, axis: usize) -> Self;
    fn zero() -> Self;
    fn value(&self) -> f64;
    fn comp(&self, i: usize) -> f64;
    fn comp_mut(&mut self, i: usize) -> &mut f64;
    /// Componentwise scaling by a constant.
    fn scale(self, k: f64) -> Self;
    /// Chain rule for `g` applied to `self`, given derivatives of `g` at the
    /// value.
    fn lift(self, d: &Derivs) -> Self;

    /// Reverse rule of `mul`: accumulate into the factor adjoints.
    fn mul_adj(a: Self, b: Self, out_adj: Self, a_adj: &mut Self, b_adj: &mut Self);
    /// Reverse rule of `lift`.
    fn lift_adj(x: Self, d: &Derivs, out_adj: Self, x_adj: &mut Self);
}

macro_rules! jet_common {
    ($name:ident, $c:expr) => {
        #[derive(Debug, Clone, Copy, PartialEq)]
        pub struct $name(pub [f64; $c]);

        impl Add for $name {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                let mut out = self.0;
                for i in 0..$c {
                    out[i] += rhs.0[i];
                }
                Self(out)
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                let mut out = self.0;
                for i in 0..$c {
                    out[i] -= rhs.0[i];
                }
                Self(out)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                let mut out = self.0;
                for v in &mut out {
                    *v = -*v;
                }
                Self(out)
            }
        }
    };
}

jet_common!(Val, 1);
jet_common!(Grad3, 4);
jet_common!(Lapl, 7);

impl Mul for Val {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Val([self.0[0] * rhs.0[0]])
    }
}

impl Jet for Val {
    const COMPONENTS: usize = 1;

    fn constant(v: f64) -> Self {
        Val([v])
    }
    fn variable(v: f64, _axis: usize) -> Self {
        Val([v])
    }
    fn zero() -> Self {
        Val([0.0])
    }
    fn value(&self) -> f64 {
        self.0[0]
    }
    fn comp(&self, i: usize) -> f64 {
        self.0[i]
    }
    fn comp_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
    fn scale(self, k: f64) -> Self {
        Val([self.0[0] * k])
    }
    fn lift(self, d: &Derivs) -> Self {
        Val([d[0]])
    }

    fn mul_adj(a: Self, b: Self, out_adj: Self, a_adj: &mut Self, b_adj: &mut Self) {
        a_adj.0[0] += out_adj.0[0] * b.0[0];
        b_adj.0[0] += out_adj.0[0] * a.0[0];
    }
    fn lift_adj(_x: Self, d: &Derivs, out_adj: Self, x_adj: &mut Self) {
        x_adj.0[0] += out_adj.0[0] * d[1];
    }
}

impl Mul for Grad3 {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = self.0;
        let b = rhs.0;
        Grad3([
            a[0] * b[0],
            a[0] * b[1] + a[1] * b[0],
            a[0] * b[2] + a[2] * b[0],
            a[0] * b[3] + a[3] * b[0],
        ])
    }
}

impl Jet for Grad3 {
    const COMPONENTS: usize = 4;

    fn constant(v: f64) -> Self {
        Grad3([v, 0.0, 0.0, 0.0])
    }
    fn variable(v: f64, axis: usize) -> Self {
        let mut out = [v, 0.0, 0.0, 0.0];
        out[1 + axis] = 1.0;
        Grad3(out)
    }
    fn zero() -> Self {
        Grad3([0.0; 4])
    }
    fn value(&self) -> f64 {
        self.0[0]
    }
    fn comp(&self, i: usize) -> f64 {
        self.0[i]
    }
    fn comp_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
    fn scale(self, k: f64) -> Self {
        let mut out = self.0;
        for v in &mut out {
            *v *= k;
        }
        Grad3(out)
    }
    fn lift(self, d: &Derivs) -> Self {
        let x = self.0;
        Grad3([d[0], d[1] * x[1], d[1] * x[2], d[1] * x[3]])
    }

    fn mul_adj(a: Self, b: Self, o: Self, a_adj: &mut Self, b_adj: &mut Self) {
        a_adj.0[0] += o.0[0] * b.0[0] + o.0[1] * b.0[1] + o.0[2] * b.0[2] + o.0[3] * b.0[3];
        b_adj.0[0] += o.0[0] * a.0[0] + o.0[1] * a.0[1] + o.0[2] * a.0[2] + o.0[3] * a.0[3];
        for i in 1..4 {
            a_adj.0[i] += o.0[i] * b.0[0];
            b_adj.0[i] += o.0[i] * a.0[0];
        }
    }
    fn lift_adj(x: Self, d: &Derivs, o: Self, x_adj: &mut Self) {
        x_adj.0[0] += o.0[0] * d[1] + d[2] * (o.0[1] * x.0[1] + o.0[2] * x.0[2] + o.0[3] * x.0[3]);
        for i in 1..4 {
            x_adj.0[i] += o.0[i] * d[1];
        }
    }
}

impl Mul for Lapl {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = self.0;
        let b = rhs.0;
        let mut out = [0.0; 7];
        out[0] = a[0] * b[0];
        for i in 1..4 {
            out[i] = a[0] * b[i] + a[i] * b[0];
            out[i + 3] = a[i + 3] * b[0] + 2.0 * a[i] * b[i] + a[0] * b[i + 3];
        }
        Lapl(out)
    }
}

impl Jet for Lapl {
    const COMPONENTS: usize = 7;

    fn constant(v: f64) -> Self {
        let mut out = [0.0; 7];
        out[0] = v;
        Lapl(out)
    }
    fn variable(v: f64, axis: usize) -> Self {
        let mut out = [0.0; 7];
        out[0] = v;
        out[1 + axis] = 1.0;
        Lapl(out)
    }
    fn zero() -> Self {
        Lapl([0.0; 7])
    }
    fn value(&self) -> f64 {
        self.0[0]
    }
    fn comp(&self, i: usize) -> f64 {
        self.0[i]
    }
    fn comp_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
    fn scale(self, k: f64) -> Self {
        let mut out = self.0;
        for v in &mut out {
            *v *= k;
        }
        Lapl(out)
    }
    fn lift(self, d: &Derivs) -> Self {
        let x = self.0;
        let mut out = [0.0; 7];
        out[0] = d[0];
        for i in 1..4 {
            out[i] = d[1] * x[i];
            out[i + 3] = d[1] * x[i + 3] + d[2] * x[i] * x[i];
        }
        Lapl(out)
    }

    fn mul_adj(a: Self, b: Self, o: Self, a_adj: &mut Self, b_adj: &mut Self) {
        let mut av = o.0[0] * b.0[0];
        let mut bv = o.0[0] * a.0[0];
        for i in 1..4 {
            av += o.0[i] * b.0[i] + o.0[i + 3] * b.0[i + 3];
            bv += o.0[i] * a.0[i] + o.0[i + 3] * a.0[i + 3];
            a_adj.0[i] += o.0[i] * b.0[0] + 2.0 * o.0[i + 3] * b.0[i];
            b_adj.0[i] += o.0[i] * a.0[0] + 2.0 * o.0[i + 3] * a.0[i];
            a_adj.0[i + 3] += o.0[i + 3] * b.0[0];
            b_adj.0[i + 3] += o.0[i + 3] * a.0[0];
        }
        a_adj.0[0] += av;
        b_adj.0[0] += bv;
    }
    fn lift_adj(x: Self, d: &Derivs, o: Self, x_adj: &mut Self) {
        let mut v = o.0[0] * d[1];
        for i in 1..4 {
            v += d[2] * o.0[i] * x.0[i] + o.0[i + 3] * (d[2] * x.0[i + 3] + d[3] * x.0[i] * x.0[i]);
            x_adj.0[i] += o.0[i] * d[1] + 2.0 * d[2] * o.0[i + 3] * x.0[i];
            x_adj.0[i + 3] += o.0[i + 3] * d[1];
        }
        x_adj.0[0] += v;
    }
}

// ---- scalar elementary functions lifted through jets ----

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;
const INV_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// GELU in its exact error-function form, with derivatives through third
/// order for the second-order jets.
pub fn gelu_derivs(x: f64) -> Derivs {
    let phi_cdf = 0.5 * (1.0 + libm::erf(x * INV_SQRT_2));
    let phi_pdf = INV_SQRT_2PI * (-0.5 * x * x).exp();
    [
        x * phi_cdf,
        phi_cdf + x * phi_pdf,
        (2.0 - x * x) * phi_pdf,
        (x * x * x - 4.0 * x) * phi_pdf,
    ]
}

pub fn gelu<J: Jet>(x: J) -> J {
    x.lift(&gelu_derivs(x.value()))
}

pub fn tanh_derivs(x: f64) -> Derivs {
    let t = x.tanh();
    let sech2 = 1.0 - t * t;
    [t, sech2, -2.0 * t * sech2, -2.0 * sech2 * (1.0 - 3.0 * t * t)]
}

pub fn tanh<J: Jet>(x: J) -> J {
    x.lift(&tanh_derivs(x.value()))
}

pub fn recip_derivs(x: f64) -> Derivs {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    [inv, -inv2, 2.0 * inv2 * inv, -6.0 * inv2 * inv2]
}

pub fn recip<J: Jet>(x: J) -> J {
    x.lift(&recip_derivs(x.value()))
}

pub fn sqrt_derivs(x: f64) -> Derivs {
    let s = x.sqrt();
    [s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)]
}

pub fn sqrt<J: Jet>(x: J) -> J {
    x.lift(&sqrt_derivs(x.value()))
}

/// x^n for small integer n via repeated multiplication.
pub fn powi<J: Jet>(x: J, n: i32) -> J {
    match n {
        0 => J::constant(1.0),
        n if n < 0 => recip(powi(x, -n)),
        _ => {
            let mut out = x;
            for _ in 1..n {
                out = out * x;
            }
            out
        }
    }
}
