//! Order-2 jets: value, first and second derivative propagated together.
//!
//! A `Jet2` carries `(f(t), f'(t), f''(t))` through arithmetic so that warp
//! functions expose exactly the derivative order the curvature formulas need.

/// Truncated second-order Taylor data of a scalar function at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet2 {
    /// Function value.
    pub value: f64,
    /// First derivative.
    pub d1: f64,
    /// Second derivative.
    pub d2: f64,
}

impl Jet2 {
    /// Jet of the constant function `c`.
    #[inline]
    pub fn constant(c: f64) -> Self {
        Jet2 { value: c, d1: 0.0, d2: 0.0 }
    }

    /// Jet of the identity evaluated at `t`.
    #[inline]
    pub fn variable(t: f64) -> Self {
        Jet2 { value: t, d1: 1.0, d2: 0.0 }
    }

    /// True when all three fields are finite.
    #[inline]
    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.d1.is_finite() && self.d2.is_finite()
    }

    #[inline]
    pub fn neg(self) -> Self {
        Jet2 { value: -self.value, d1: -self.d1, d2: -self.d2 }
    }

    #[inline]
    pub fn add(self, o: Self) -> Self {
        Jet2 { value: self.value + o.value, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }

    #[inline]
    pub fn sub(self, o: Self) -> Self {
        Jet2 { value: self.value - o.value, d1: self.d1 - o.d1, d2: self.d2 - o.d2 }
    }

    /// (uv)'' = u''v + 2u'v' + uv''
    #[inline]
    pub fn mul(self, o: Self) -> Self {
        Jet2 {
            value: self.value * o.value,
            d1: self.d1 * o.value + self.value * o.d1,
            d2: self.d2 * o.value + 2.0 * self.d1 * o.d1 + self.value * o.d2,
        }
    }

    /// From u = wv: w' = (u' - wv')/v, w'' = (u'' - 2w'v' - wv'')/v.
    #[inline]
    pub fn div(self, o: Self) -> Self {
        let value = self.value / o.value;
        let d1 = (self.d1 - value * o.d1) / o.value;
        let d2 = (self.d2 - 2.0 * d1 * o.d1 - value * o.d2) / o.value;
        Jet2 { value, d1, d2 }
    }

    /// Composition with a scalar map g: carries g(u), g'(u), g''(u).
    ///
    /// (g∘u)' = g'(u)u', (g∘u)'' = g''(u)u'² + g'(u)u''.
    #[inline]
    pub fn compose(self, g: f64, dg: f64, ddg: f64) -> Self {
        Jet2 {
            value: g,
            d1: dg * self.d1,
            d2: ddg * self.d1 * self.d1 + dg * self.d2,
        }
    }

    #[inline]
    pub fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * self.value))
    }

    #[inline]
    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    #[inline]
    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    #[inline]
    pub fn sinh(self) -> Self {
        self.compose(self.value.sinh(), self.value.cosh(), self.value.sinh())
    }

    #[inline]
    pub fn cosh(self) -> Self {
        self.compose(self.value.cosh(), self.value.sinh(), self.value.cosh())
    }

    #[inline]
    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    #[inline]
    pub fn ln(self) -> Self {
        self.compose(self.value.ln(), 1.0 / self.value, -1.0 / (self.value * self.value))
    }

    /// Constant exponent: (u^c)' = c u^(c-1) u'.
    #[inline]
    pub fn powf_const(self, c: f64) -> Self {
        let u = self.value;
        self.compose(
            u.powf(c),
            c * u.powf(c - 1.0),
            c * (c - 1.0) * u.powf(c - 2.0),
        )
    }

    /// General exponent via u^w = exp(w ln u); requires u > 0.
    #[inline]
    pub fn pow(self, o: Self) -> Self {
        o.mul(self.ln()).exp()
    }

    /// Scale every field, i.e. the jet of `c * f`.
    #[inline]
    pub fn scale(self, c: f64) -> Self {
        Jet2 { value: c * self.value, d1: c * self.d1, d2: c * self.d2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0), "{a} vs {b}");
    }

    fn assert_jet(j: Jet2, v: f64, d1: f64, d2: f64) {
        close(j.value, v, 1e-14);
        close(j.d1, d1, 1e-14);
        close(j.d2, d2, 1e-14);
    }

    #[test]
    fn product_rule() {
        // (t * t) at t = 3: value 9, d1 = 2t = 6, d2 = 2
        let t = Jet2::variable(3.0);
        assert_jet(t.mul(t), 9.0, 6.0, 2.0);
    }

    #[test]
    fn quotient_rule() {
        // 1/t at t = 2: value 0.5, d1 = -1/4, d2 = 2/8
        let q = Jet2::constant(1.0).div(Jet2::variable(2.0));
        assert_jet(q, 0.5, -0.25, 0.25);
    }

    #[test]
    fn trig_jets() {
        let t = Jet2::variable(0.7);
        assert_jet(t.sin(), 0.7f64.sin(), 0.7f64.cos(), -0.7f64.sin());
        assert_jet(t.cos(), 0.7f64.cos(), -0.7f64.sin(), -0.7f64.cos());
        assert_jet(t.cosh(), 0.7f64.cosh(), 0.7f64.sinh(), 0.7f64.cosh());
    }

    #[test]
    fn chain_rule_through_composition() {
        // exp(t^2) at t = 0.5: d1 = 2t e^{t^2}, d2 = (2 + 4t^2) e^{t^2}
        let t = Jet2::variable(0.5);
        let e = t.mul(t).exp();
        let v = 0.25f64.exp();
        assert_jet(e, v, v, 3.0 * v);
    }

    #[test]
    fn constant_power_at_zero_base() {
        // (t^2 at t=0): value 0, d1 = 0, d2 = 2
        let j = Jet2::variable(0.0).powf_const(2.0);
        assert_jet(j, 0.0, 0.0, 2.0);
    }

    #[test]
    fn general_power_matches_constant_power() {
        let t = Jet2::variable(1.3);
        let a = t.powf_const(2.5);
        let b = t.pow(Jet2::constant(2.5));
        close(a.value, b.value, 1e-14);
        close(a.d1, b.d1, 1e-14);
        close(a.d2, b.d2, 1e-14);
    }

    #[test]
    fn ln_jet() {
        let j = Jet2::variable(2.0).ln();
        assert_jet(j, 2.0f64.ln(), 0.5, -0.25);
    }
}
