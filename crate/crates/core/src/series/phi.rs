//! Densities phi(t) = (t+a)^mu (b-t)^nu w(t) on [-a, b] and their moments.

use rug::{Assign, Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use super::exact::{Exact, ExactComplex};
use crate::apnum::{gamma, integrate_ts_vec, pow2, APComplex, QuadOptions};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPhi")]
pub struct PhiSpec {
    pub a: Exact,
    pub b: Exact,
    pub mu: ExactComplex,
    pub nu: ExactComplex,
    /// Coefficients of w in ascending powers of t.
    pub w: Vec<ExactComplex>,
}

#[derive(Deserialize)]
struct RawPhi {
    a: Exact,
    b: Exact,
    #[serde(default = "zero_c")]
    mu: ExactComplex,
    #[serde(default = "zero_c")]
    nu: ExactComplex,
    #[serde(default = "one_poly")]
    w: Vec<ExactComplex>,
}

fn zero_c() -> ExactComplex {
    ExactComplex::int(0)
}

fn one_poly() -> Vec<ExactComplex> {
    vec![ExactComplex::int(1)]
}

impl TryFrom<RawPhi> for PhiSpec {
    type Error = Error;
    fn try_from(r: RawPhi) -> Result<Self> {
        PhiSpec::new(r.a, r.b, r.mu, r.nu, r.w)
    }
}

impl PhiSpec {
    pub fn new(
        a: Exact,
        b: Exact,
        mu: ExactComplex,
        nu: ExactComplex,
        w: Vec<ExactComplex>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if a.0 < 0 || b.0 < 0 {
            return bad(format!("phi endpoints need a, b >= 0 (a = {a}, b = {b})"));
        }
        if !(a.is_positive() || b.is_positive()) {
            return bad("phi needs a + b > 0".into());
        }
        if mu.re.0 <= -1 || nu.re.0 <= -1 {
            return bad(format!("phi exponents need Re > -1 (mu = {mu}, nu = {nu})"));
        }
        if w.is_empty() {
            return bad("phi polynomial w is empty".into());
        }
        let spec = PhiSpec { a, b, mu, nu, w };
        let bits = 128;
        let lo = Complex::with_val(bits, -spec.a.0.clone());
        let hi = Complex::with_val(bits, &spec.b.0);
        if spec.w_at(&lo, bits).is_zero() || spec.w_at(&hi, bits).is_zero() {
            return bad("w must not vanish at the endpoints".into());
        }
        Ok(spec)
    }

    /// phi = 1 on [-1, 1], so F(z) = 2 sinh(z)/z.
    pub fn unit() -> Self {
        PhiSpec::new(Exact::int(1), Exact::int(1), zero_c(), zero_c(), one_poly()).unwrap()
    }

    /// F_1: a = 2, b = 3/2, phi = (3/2 - t)^(1/2 + i).
    pub fn f1() -> Self {
        PhiSpec::new(
            Exact::int(2),
            Exact::ratio(3, 2),
            zero_c(),
            ExactComplex::new(Exact::ratio(1, 2), Exact::int(1)),
            one_poly(),
        )
        .unwrap()
    }

    /// F_2: a = b = 1, phi = (1 - t)^4 (t + 1)^(-1/2 - 2i).
    pub fn f2() -> Self {
        PhiSpec::new(
            Exact::int(1),
            Exact::int(1),
            ExactComplex::new(Exact::ratio(-1, 2), Exact::int(-2)),
            ExactComplex::int(4),
            one_poly(),
        )
        .unwrap()
    }

    /// F_3: phi = (t - 1/2)^2 on [-17/36, 19/36].
    pub fn f3() -> Self {
        PhiSpec::new(
            Exact::ratio(17, 36),
            Exact::ratio(19, 36),
            zero_c(),
            zero_c(),
            vec![
                ExactComplex::real(Exact::ratio(1, 4)),
                ExactComplex::int(-1),
                ExactComplex::int(1),
            ],
        )
        .unwrap()
    }

    /// (1 - t^2)^(alpha - 1/2) on [-1, 1]: the Poisson integral for J_alpha.
    pub fn bessel(alpha: &ExactComplex) -> Result<Self> {
        let e = ExactComplex::new(
            Exact(alpha.re.0.clone() - rug::Rational::from((1, 2))),
            alpha.im.clone(),
        );
        PhiSpec::new(Exact::int(1), Exact::int(1), e.clone(), e, one_poly())
    }

    pub fn w_at(&self, t: &Complex, bits: u32) -> Complex {
        let mut acc = Complex::new(bits);
        for c in self.w.iter().rev() {
            acc *= t;
            acc += c.to_complex(bits);
        }
        acc
    }

    /// c = max(a, b).
    pub fn c(&self) -> Exact {
        self.a.clone().max(self.b.clone())
    }

    /// f_1(0) = w(-a) (a+b)^nu: the factor multiplying (t+a)^mu at t = -a.
    pub fn f1_0(&self, bits: u32) -> Complex {
        let wa = self.w_at(&Complex::with_val(bits, -self.a.0.clone()), bits);
        let len = Float::with_val(bits, Rational::from(&self.a.0 + &self.b.0));
        wa * real_pow(&len, &self.nu.to_complex(bits))
    }

    /// f_2(0) = w(b) (a+b)^mu.
    pub fn f2_0(&self, bits: u32) -> Complex {
        let wb = self.w_at(&Complex::with_val(bits, &self.b.0), bits);
        let len = Float::with_val(bits, Rational::from(&self.a.0 + &self.b.0));
        wb * real_pow(&len, &self.mu.to_complex(bits))
    }

    /// Dominant-endpoint exponent: Re mu if a > b, Re nu if a < b, the
    /// smaller of the two if a = b.
    pub fn xi(&self) -> f64 {
        let (m, n) = (self.mu.re.to_f64(), self.nu.re.to_f64());
        match self.a.cmp(&self.b) {
            std::cmp::Ordering::Greater => m,
            std::cmp::Ordering::Less => n,
            std::cmp::Ordering::Equal => m.min(n),
        }
    }

    /// phi(t) from the distances to both endpoints.
    fn eval(
        &self,
        t: &Float,
        from_lo: &Float,
        to_hi: &Float,
        mu: &Complex,
        nu: &Complex,
    ) -> Complex {
        let bits = t.prec();
        let mut v = self.w_at(&Complex::with_val(bits, t), bits);
        if !self.mu.is_zero() {
            v *= real_pow(from_lo, mu);
        }
        if !self.nu.is_zero() {
            v *= real_pow(to_hi, nu);
        }
        v
    }

    /// Integrates phi(t) g(t) with g supplied per node, splitting at t = 0.
    pub(crate) fn integrate<G>(&self, dim: usize, bits: u32, g: G) -> Result<Vec<Complex>>
    where
        G: Fn(&Float, &Complex, &mut [Complex]) + Sync,
    {
        let wp = bits + 32;
        let a = self.a.to_float(wp);
        let b = self.b.to_float(wp);
        let mu = self.mu.to_complex(wp);
        let nu = self.nu.to_complex(wp);
        let zero = Float::new(wp);
        let neg_a = Float::with_val(wp, -&a);

        let left = || -> Result<Vec<APComplex>> {
            if self.a.is_zero() {
                return Ok(Vec::new());
            }
            integrate_ts_vec(
                |node, out: &mut [Complex]| {
                    let p = node.x.prec();
                    // b - t = b + |t| on the left piece, no cancellation
                    let to_b = Float::with_val(p, &b - node.x);
                    let ph = self.eval(node.x, node.from_lo, &to_b, &mu, &nu);
                    g(node.x, &ph, out);
                },
                dim,
                &neg_a,
                &zero,
                bits,
                QuadOptions::default(),
            )
        };
        let right = || -> Result<Vec<APComplex>> {
            if self.b.is_zero() {
                return Ok(Vec::new());
            }
            integrate_ts_vec(
                |node, out: &mut [Complex]| {
                    let p = node.x.prec();
                    let from_a = Float::with_val(p, node.x + &a);
                    let ph = self.eval(node.x, &from_a, node.to_hi, &mu, &nu);
                    g(node.x, &ph, out);
                },
                dim,
                &zero,
                &b,
                bits,
                QuadOptions::default(),
            )
        };
        let (l, r) = rayon::join(left, right);
        let (l, r) = (l?, r?);
        let mut out: Vec<Complex> = (0..dim).map(|_| Complex::new(bits)).collect();
        for (o, v) in out.iter_mut().zip(l.iter()) {
            *o += v.as_complex();
        }
        for (o, v) in out.iter_mut().zip(r.iter()) {
            *o += v.as_complex();
        }
        // keep the piece magnitudes to detect cancellation to zero
        for k in 0..dim {
            let mut scale = Float::new(bits);
            if let Some(v) = l.get(k) {
                scale += v.abs();
            }
            if let Some(v) = r.get(k) {
                scale += v.abs();
            }
            let m = Float::with_val(bits, out[k].abs_ref());
            if m < scale * pow2(bits, 12 - bits as i32) {
                out[k] = Complex::new(bits);
            }
        }
        Ok(out)
    }
}

/// x^s for real x > 0 and complex s, principal branch.
pub(crate) fn real_pow(x: &Float, s: &Complex) -> Complex {
    let p = x.prec().max(s.prec().0);
    let ln = Float::with_val(p, x.ln_ref());
    Complex::with_val(p, s * &ln).exp()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    Quadrature,
    Asymptotic,
}

/// m_k = integral of phi(t) t^k over [-a, b], k = 0..=kmax.
#[derive(Clone, Debug)]
pub struct MomentTable {
    pub phi: PhiSpec,
    pub values: Vec<APComplex>,
    pub methods: Vec<MomentMethod>,
    pub bits: u32,
}

impl MomentTable {
    pub fn kmax(&self) -> usize {
        self.values.len() - 1
    }
}

/// All moments up to `kmax` from one shared set of quadrature nodes.
///
/// Results whose two halves cancel below working precision are stored as
/// exact zeros. Entries from k = 50 on are compared with the endpoint
/// asymptotics and a warning is logged when they disagree by more than the
/// expected O(1/k).
pub fn moments(phi: &PhiSpec, kmax: usize, bits: u32) -> Result<MomentTable> {
    let dim = kmax + 1;
    let raw = phi.integrate(dim, bits, |x, ph, out| {
        let p = x.prec();
        let mut acc = Complex::with_val(p, ph);
        for (k, slot) in out.iter_mut().enumerate() {
            if k > 0 {
                acc *= x;
            }
            slot.assign(&acc);
        }
    })?;
    let values: Vec<APComplex> = raw
        .into_iter()
        .map(|c| APComplex::try_from_complex(c, "moments"))
        .collect::<Result<_>>()?;
    for k in (50..=kmax).step_by(10) {
        let asym = moment_asymptotic(phi, k, 64.max(bits / 4));
        if asym.is_zero() {
            continue;
        }
        let ratio = (&values[k] / &asym).abs_f64();
        let dev = (ratio - 1.0).abs();
        if !(dev <= 25.0 / k as f64 + 0.05) {
            log::warn!("moment m_{k}: quadrature/asymptotic modulus ratio {ratio:.6}");
        }
    }
    Ok(MomentTable {
        phi: phi.clone(),
        methods: vec![MomentMethod::Quadrature; values.len()],
        values,
        bits,
    })
}

fn endpoint_term(
    f0: &Complex,
    expo: &Complex,
    len: &Float,
    k: usize,
    bits: u32,
) -> Result<Complex> {
    // f0 Gamma(e+1) k^(-e-1) len^(k+e+1)
    let one = Complex::with_val(bits, 1);
    let e1 = Complex::with_val(bits, expo + &one);
    let g = gamma(&APComplex::from_complex_unchecked(e1.clone()))?;
    let kf = Float::with_val(bits, k);
    let mut t = Complex::with_val(bits, f0 * g.as_complex());
    t *= real_pow(&kf, &Complex::with_val(bits, -&e1));
    let mut pw = Complex::with_val(bits, &e1 + k as u32);
    pw = real_pow(len, &pw);
    t *= pw;
    Ok(t)
}

/// Leading endpoint asymptotics of m_k.
///
/// The left term carries (-1)^k. Both terms are kept when a = b, otherwise
/// only the one from the longer side.
pub fn moment_asymptotic(phi: &PhiSpec, k: usize, bits: u32) -> APComplex {
    let wp = bits + 32;
    let k = k.max(1);
    let ta = if phi.a.is_positive() && phi.a >= phi.b {
        let a = phi.a.to_float(wp);
        let mut t = endpoint_term(&phi.f1_0(wp), &phi.mu.to_complex(wp), &a, k, wp)
            .unwrap_or_else(|_| Complex::new(wp));
        if k % 2 == 1 {
            t = -t;
        }
        Some(t)
    } else {
        None
    };
    let tb = if phi.b.is_positive() && phi.b >= phi.a {
        let b = phi.b.to_float(wp);
        Some(
            endpoint_term(&phi.f2_0(wp), &phi.nu.to_complex(wp), &b, k, wp)
                .unwrap_or_else(|_| Complex::new(wp)),
        )
    } else {
        None
    };
    let out = match (ta, tb) {
        (Some(x), Some(y)) => {
            let scale = Float::with_val(wp, x.abs_ref()) + Float::with_val(wp, y.abs_ref());
            let s = Complex::with_val(wp, &x + &y);
            if Float::with_val(wp, s.abs_ref()) <= scale * pow2(wp, 8 - bits as i32) {
                Complex::new(wp)
            } else {
                s
            }
        }
        (Some(x), None) => x,
        (None, Some(y)) => y,
        (None, None) => Complex::new(wp),
    };
    APComplex::from_complex_unchecked(Complex::with_val(bits, &out))
}

/// The N in `n_lo..=n_hi` usable for asymptotics.
///
/// Only when a = b and Re mu = Re nu can the two endpoint terms cancel; then
/// N is kept iff |(-1)^N f_1(0) Gamma(mu+1) + f_2(0) Gamma(nu+1) a^(nu-mu) N^(mu-nu)| >= tol.
pub fn subsequence_select(phi: &PhiSpec, n_lo: usize, n_hi: usize, tol: f64) -> Result<Vec<usize>> {
    if n_lo > n_hi || !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "subsequence_select needs n_lo <= n_hi and tol > 0 (got {n_lo}..{n_hi}, {tol})"
        )));
    }
    if phi.a != phi.b || phi.mu.re != phi.nu.re {
        return Ok((n_lo..=n_hi).collect());
    }
    let bits = 128;
    let one = Complex::with_val(bits, 1);
    let g1 = gamma(&APComplex::from_complex_unchecked(Complex::with_val(
        bits,
        phi.mu.to_complex(bits) + &one,
    )))?;
    let g2 = gamma(&APComplex::from_complex_unchecked(Complex::with_val(
        bits,
        phi.nu.to_complex(bits) + &one,
    )))?;
    let left = Complex::with_val(bits, phi.f1_0(bits) * g1.as_complex());
    let right = Complex::with_val(bits, phi.f2_0(bits) * g2.as_complex());
    let a = phi.a.to_float(bits);
    let nu_minus_mu = Complex::with_val(bits, phi.nu.to_complex(bits) - phi.mu.to_complex(bits));
    let right = right * real_pow(&a, &nu_minus_mu);
    let mu_minus_nu = Complex::with_val(bits, -&nu_minus_mu);
    let picked: Vec<usize> = (n_lo..=n_hi)
        .filter(|&n| {
            let mut g = Complex::with_val(
                bits,
                &right * real_pow(&Float::with_val(bits, n), &mu_minus_nu),
            );
            if n % 2 == 0 {
                g += &left;
            } else {
                g -= &left;
            }
            Float::with_val(bits, g.abs_ref()).to_f64() >= tol
        })
        .collect();
    if picked.is_empty() {
        return Err(Error::EmptySelection { lo: n_lo, hi: n_hi });
    }
    Ok(picked)
}
