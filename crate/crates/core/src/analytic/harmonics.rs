//! Spherical-harmonic gravity model with a non-singular Pines-style
//! evaluation.
//!
//! Coefficients are stored fully normalized (geodesy 4-pi convention) so the
//! recursions stay well-scaled at high degree; the plain-text coefficient
//! file format carries unnormalized values and the I/O layer converts.
//!
//! The evaluation works in the direction cosines `(s, t, u) = x/r`, which
//! keeps the model finite on the polar axis, and produces the acceleration
//! analytically from four accumulated sums rather than finite differences.

use super::{AnalyticError, GravityEval, GravityField};
use nalgebra::Vector3;

/// Identity of one Stokes coefficient in the regression layout.
///
/// Cosine coefficients come first (all degrees, orders 0..=l), then sine
/// coefficients with order >= 1; `S_{l,0}` is identically zero and never
/// regressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoeffId {
    pub l: usize,
    pub m: usize,
    pub sine: bool,
}

/// Flat coefficient ordering used by the regression pipeline.
pub fn coeff_layout(l_max: usize) -> Vec<CoeffId> {
    let mut ids = Vec::new();
    for l in 0..=l_max {
        for m in 0..=l {
            ids.push(CoeffId { l, m, sine: false });
        }
    }
    for l in 1..=l_max {
        for m in 1..=l {
            ids.push(CoeffId { l, m, sine: true });
        }
    }
    ids
}

/// Conversion factor between unnormalized and fully normalized coefficients:
/// `C_unnorm = norm_factor(l, m) * C_norm`.
pub fn norm_factor(l: usize, m: usize) -> f64 {
    let delta = if m == 0 { 1.0 } else { 2.0 };
    // (l - m)! / (l + m)! computed as a product to avoid factorial overflow
    let mut ratio = 1.0;
    for k in (l - m + 1)..=(l + m) {
        ratio /= k as f64;
    }
    (delta * (2 * l + 1) as f64 * ratio).sqrt()
}

/// Normalized derived Legendre functions `A_bar[l][m]` at argument `u`.
///
/// `A_lm(u) = P_lm(u) / (1-u^2)^(m/2)` is a polynomial in `u`; normalization
/// follows the coefficients so that `sum A_bar * Cbar` equals the unnormalized
/// series.
pub fn derived_legendre(l_max: usize, u: f64) -> Vec<Vec<f64>> {
    let mut a = vec![Vec::new(); l_max + 1];
    for (l, row) in a.iter_mut().enumerate() {
        row.resize(l + 1, 0.0);
    }
    a[0][0] = 1.0;
    if l_max == 0 {
        return a;
    }
    a[1][0] = 3.0f64.sqrt() * u;
    a[1][1] = 3.0f64.sqrt();
    for l in 2..=l_max {
        let lf = l as f64;
        a[l][l] = ((2.0 * lf + 1.0) / (2.0 * lf)).sqrt() * a[l - 1][l - 1];
        a[l][l - 1] = u * (2.0 * lf + 1.0).sqrt() * a[l - 1][l - 1];
        #[allow(clippy::needless_range_loop)]
        for m in 0..l - 1 {
            let mf = m as f64;
            let n1 = ((2.0 * lf - 1.0) * (2.0 * lf + 1.0) / ((lf - mf) * (lf + mf))).sqrt();
            let n2 = ((2.0 * lf + 1.0) * (lf - mf - 1.0) * (lf + mf - 1.0)
                / ((2.0 * lf - 3.0) * (lf - mf) * (lf + mf)))
                .sqrt();
            a[l][m] = u * n1 * a[l - 1][m] - n2 * a[l - 2][m];
        }
    }
    a
}

/// d A_bar[l][m] / du expressed through the next order:
/// `A_bar'_{l,m} = f(l, m) * A_bar_{l,m+1}`.
fn deriv_factor(l: usize, m: usize) -> f64 {
    if m >= l {
        return 0.0;
    }
    let delta = if m == 0 { 1.0 } else { 2.0 };
    ((delta / 2.0) * ((l - m) as f64) * ((l + m + 1) as f64)).sqrt()
}

/// Geometry shared by evaluation and regression at one field point.
struct PinesPoint {
    r: f64,
    s: f64,
    t: f64,
    u: f64,
    /// rho[l] = (mu/r) * (R/r)^l
    rho: Vec<f64>,
    /// real and imaginary parts of (s + i t)^m
    rm: Vec<f64>,
    im: Vec<f64>,
    a_bar: Vec<Vec<f64>>,
}

impl PinesPoint {
    fn new(mu: f64, radius: f64, l_max: usize, x: &Vector3<f64>) -> Result<Self, AnalyticError> {
        let r = x.norm();
        if r == 0.0 {
            return Err(AnalyticError::Singularity { x: *x });
        }
        let (s, t, u) = (x.x / r, x.y / r, x.z / r);
        let mut rho = Vec::with_capacity(l_max + 1);
        let mut p = mu / r;
        let ratio = radius / r;
        for _ in 0..=l_max {
            rho.push(p);
            p *= ratio;
        }
        let mut rm = Vec::with_capacity(l_max + 1);
        let mut im = Vec::with_capacity(l_max + 1);
        rm.push(1.0);
        im.push(0.0);
        for m in 1..=l_max {
            rm.push(s * rm[m - 1] - t * im[m - 1]);
            im.push(s * im[m - 1] + t * rm[m - 1]);
        }
        Ok(Self {
            r,
            s,
            t,
            u,
            rho,
            rm,
            im,
            a_bar: derived_legendre(l_max, x.z / r),
        })
    }

    /// Per-term potential and acceleration for unit coefficient values
    /// `(c, s)`; the full model is linear in these.
    #[allow(clippy::too_many_arguments)]
    fn term(&self, l: usize, m: usize, c: f64, sn: f64) -> GravityEval {
        let a = self.a_bar[l][m];
        let ap = deriv_factor(l, m) * if m < l { self.a_bar[l][m + 1] } else { 0.0 };
        let d = c * self.rm[m] + sn * self.im[m];
        let (e, f) = if m == 0 {
            (0.0, 0.0)
        } else {
            (
                c * self.rm[m - 1] + sn * self.im[m - 1],
                sn * self.rm[m - 1] - c * self.im[m - 1],
            )
        };
        let k = self.rho[l] / self.r;
        let mf = m as f64;
        let radial = k * (((l + m + 1) as f64) * a + self.u * ap) * d;
        GravityEval {
            potential: self.rho[l] * a * d,
            acceleration: Vector3::new(
                k * mf * a * e - self.s * radial,
                k * mf * a * f - self.t * radial,
                k * ap * d - self.u * radial,
            ),
        }
    }
}

/// Spherical-harmonic gravity model (fully normalized Stokes coefficients).
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SphericalHarmonicModel {
    pub mu: f64,
    pub radius: f64,
    pub l_max: usize,
    /// c_bar[l][m], fully normalized.
    c_bar: Vec<Vec<f64>>,
    /// s_bar[l][m], fully normalized; s_bar[l][0] is always zero.
    s_bar: Vec<Vec<f64>>,
}

impl SphericalHarmonicModel {
    pub fn zeros(mu: f64, radius: f64, l_max: usize) -> Self {
        let c_bar = (0..=l_max).map(|l| vec![0.0; l + 1]).collect();
        let s_bar = (0..=l_max).map(|l| vec![0.0; l + 1]).collect();
        Self { mu, radius, l_max, c_bar, s_bar }
    }

    /// Pure monopole: `C_{0,0} = 1`, everything else zero.
    pub fn monopole(mu: f64, radius: f64) -> Self {
        let mut model = Self::zeros(mu, radius, 0);
        model.c_bar[0][0] = 1.0;
        model
    }

    pub fn from_normalized(
        mu: f64,
        radius: f64,
        c_bar: Vec<Vec<f64>>,
        s_bar: Vec<Vec<f64>>,
    ) -> Self {
        assert_eq!(c_bar.len(), s_bar.len());
        let l_max = c_bar.len() - 1;
        for l in 0..=l_max {
            assert_eq!(c_bar[l].len(), l + 1);
            assert_eq!(s_bar[l].len(), l + 1);
        }
        Self { mu, radius, l_max, c_bar, s_bar }
    }

    /// Builds a model from unnormalized coefficients (the convention of the
    /// plain-series expansion and of the coefficient file format).
    pub fn from_unnormalized(mu: f64, radius: f64, c: Vec<Vec<f64>>, s: Vec<Vec<f64>>) -> Self {
        let l_max = c.len() - 1;
        let mut model = Self::zeros(mu, radius, l_max);
        for l in 0..=l_max {
            for m in 0..=l {
                let n = norm_factor(l, m);
                model.c_bar[l][m] = c[l][m] / n;
                model.s_bar[l][m] = s[l][m] / n;
            }
        }
        model
    }

    pub fn c_bar(&self, l: usize, m: usize) -> f64 {
        self.c_bar[l][m]
    }

    pub fn s_bar(&self, l: usize, m: usize) -> f64 {
        self.s_bar[l][m]
    }

    pub fn c_unnormalized(&self, l: usize, m: usize) -> f64 {
        self.c_bar[l][m] * norm_factor(l, m)
    }

    pub fn s_unnormalized(&self, l: usize, m: usize) -> f64 {
        self.s_bar[l][m] * norm_factor(l, m)
    }

    pub fn set_c_bar(&mut self, l: usize, m: usize, value: f64) {
        self.c_bar[l][m] = value;
    }

    pub fn set_s_bar(&mut self, l: usize, m: usize, value: f64) {
        assert!(m > 0 || value == 0.0, "S_(l,0) must stay zero");
        self.s_bar[l][m] = value;
    }

    /// Builds the model from the flat normalized coefficient vector of
    /// [`coeff_layout`].
    pub fn from_coeff_vector(mu: f64, radius: f64, l_max: usize, coeffs: &[f64]) -> Self {
        let ids = coeff_layout(l_max);
        assert_eq!(ids.len(), coeffs.len());
        let mut model = Self::zeros(mu, radius, l_max);
        for (id, &v) in ids.iter().zip(coeffs) {
            if id.sine {
                model.s_bar[id.l][id.m] = v;
            } else {
                model.c_bar[id.l][id.m] = v;
            }
        }
        model
    }

    /// Flat normalized coefficient vector in [`coeff_layout`] order.
    pub fn coeff_vector(&self) -> Vec<f64> {
        coeff_layout(self.l_max)
            .iter()
            .map(|id| {
                if id.sine {
                    self.s_bar[id.l][id.m]
                } else {
                    self.c_bar[id.l][id.m]
                }
            })
            .collect()
    }

    /// Reported parameter count, `l_max (l_max + 1)`: the budget convention
    /// under which a degree-and-order-15 model is a 240-parameter model.
    pub fn param_count(&self) -> usize {
        self.l_max * (self.l_max + 1)
    }

    /// Writes the plain-text coefficient format: header `mu R l_max`, then one
    /// `l m C S` record per coefficient pair, unnormalized.
    pub fn to_text(&self) -> String {
        let mut out = format!("{:.17e} {:.17e} {}\n", self.mu, self.radius, self.l_max);
        for l in 0..=self.l_max {
            for m in 0..=l {
                out.push_str(&format!(
                    "{} {} {:.17e} {:.17e}\n",
                    l,
                    m,
                    self.c_unnormalized(l, m),
                    self.s_unnormalized(l, m)
                ));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, AnalyticError> {
        let mut lines = text.lines().enumerate();
        let (lineno, header) = lines
            .next()
            .ok_or_else(|| AnalyticError::CoefficientParse { line: 1, msg: "empty file".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(AnalyticError::CoefficientParse {
                line: lineno + 1,
                msg: "header must be `mu R l_max`".into(),
            });
        }
        let parse = |tok: &str, line: usize| -> Result<f64, AnalyticError> {
            tok.parse().map_err(|e| AnalyticError::CoefficientParse {
                line,
                msg: format!("bad number {tok:?}: {e}"),
            })
        };
        let mu = parse(fields[0], 1)?;
        let radius = parse(fields[1], 1)?;
        let l_max: usize = fields[2].parse().map_err(|e| AnalyticError::CoefficientParse {
            line: 1,
            msg: format!("bad l_max: {e}"),
        })?;
        let mut c = vec![Vec::new(); l_max + 1];
        let mut s = vec![Vec::new(); l_max + 1];
        for (l, (cr, sr)) in c.iter_mut().zip(s.iter_mut()).enumerate() {
            cr.resize(l + 1, 0.0);
            sr.resize(l + 1, 0.0);
        }
        for (lineno, raw) in lines {
            let line = lineno + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = raw.split_whitespace().collect();
            if f.len() != 4 {
                return Err(AnalyticError::CoefficientParse {
                    line,
                    msg: "record must be `l m C S`".into(),
                });
            }
            let l: usize = f[0].parse().map_err(|e| AnalyticError::CoefficientParse {
                line,
                msg: format!("bad degree: {e}"),
            })?;
            let m: usize = f[1].parse().map_err(|e| AnalyticError::CoefficientParse {
                line,
                msg: format!("bad order: {e}"),
            })?;
            if l > l_max || m > l {
                return Err(AnalyticError::CoefficientParse {
                    line,
                    msg: format!("indices ({l},{m}) out of range for l_max {l_max}"),
                });
            }
            c[l][m] = parse(f[2], line)?;
            s[l][m] = parse(f[3], line)?;
        }
        Ok(Self::from_unnormalized(mu, radius, c, s))
    }
}

impl GravityField for SphericalHarmonicModel {
    fn eval(&self, x: &Vector3<f64>) -> Result<GravityEval, AnalyticError> {
        let point = PinesPoint::new(self.mu, self.radius, self.l_max, x)?;
        let mut total = GravityEval::ZERO;
        for l in 0..=self.l_max {
            for m in 0..=l {
                let (c, s) = (self.c_bar[l][m], self.s_bar[l][m]);
                if c == 0.0 && s == 0.0 {
                    continue;
                }
                total = total + point.term(l, m, c, s);
            }
        }
        Ok(total)
    }
}

/// Acceleration of each unit normalized coefficient at `x`, in
/// [`coeff_layout`] order. These are the regression Jacobian rows and the
/// same terms [`SphericalHarmonicModel::eval`] sums, so the regression and
/// the deployed model share one formula.
pub fn acceleration_basis(
    mu: f64,
    radius: f64,
    l_max: usize,
    x: &Vector3<f64>,
) -> Result<Vec<Vector3<f64>>, AnalyticError> {
    let point = PinesPoint::new(mu, radius, l_max, x)?;
    let ids = coeff_layout(l_max);
    let mut out = Vec::with_capacity(ids.len());
    for id in ids {
        let (c, s) = if id.sine { (0.0, 1.0) } else { (1.0, 0.0) };
        out.push(point.term(id.l, id.m, c, s).acceleration);
    }
    Ok(out)
}
