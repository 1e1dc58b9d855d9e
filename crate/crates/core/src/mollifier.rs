//! The mollifier M(s, f⊗χ) = Σ_{ℓ≤L} x_ℓ χ(ℓ) ℓ^{−s} with
//! x_ℓ = μ_f(ℓ) P(ln(L/ℓ)/ln L) supported on cube-free ℓ coprime to the
//! level, and the character-averaged deviation |LM − 1|².
//!
//! The theorem regime L = q^c with c < 1/360 gives L < 2 for any feasible q,
//! collapsing M to 1; an explicit length override exercises the structure at
//! meaningful lengths and is always recorded in reports.

use std::sync::Arc;

use num_complex::Complex64;

use crate::characters::{CharacterTable, DirichletCharacter};
use crate::error::{Error, Result};
use crate::forms::HeckeForm;
use crate::lfunc::AfeContext;
use crate::zeros::log_abs_one_minus;

/// Taper P: 2x on [0, 1/2], 1 on [1/2, 1].
pub fn taper(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("taper argument {x} outside [0, 1]")));
    }
    Ok(if x <= 0.5 { 2.0 * x } else { 1.0 })
}

/// Mollifier coefficients for one form at one length.
#[derive(Clone, Debug)]
pub struct MollifierSpec {
    c: f64,
    length: f64,
    overridden: bool,
    /// x_ℓ for ℓ = 0..=⌊L⌋ (index 0 unused).
    coeffs: Vec<f64>,
}

impl MollifierSpec {
    /// The paper regime: L = q^c with 0 < c < 1/360.
    pub fn new(form: &HeckeForm, q: u64, c: f64) -> Result<MollifierSpec> {
        if c <= 0.0 || c >= 1.0 / 360.0 {
            return Err(Error::validation(format!(
                "mollifier exponent c = {c} outside (0, 1/360)"
            )));
        }
        let length = (q as f64).powf(c);
        Self::build(form, c, length, false)
    }

    /// Desk-scale length override; recorded in every report.
    pub fn with_length(form: &HeckeForm, c: f64, length: f64) -> Result<MollifierSpec> {
        Self::build(form, c, length, true)
    }

    fn build(form: &HeckeForm, c: f64, length: f64, overridden: bool) -> Result<MollifierSpec> {
        if length < 1.0 {
            return Err(Error::validation("mollifier length below 1"));
        }
        let l_int = length.floor() as u64;
        if l_int > form.n_max() as u64 {
            return Err(Error::resource(format!(
                "mollifier length {l_int} exceeds coefficient table"
            )));
        }
        let mut coeffs = vec![0.0; l_int as usize + 1];
        coeffs[1] = 1.0;
        for ell in 2..=l_int {
            if gcd(ell, form.level()) != 1 {
                continue;
            }
            let mu = form.mu_f(ell)?;
            if mu == 0.0 {
                continue;
            }
            let arg = if length > 1.0 {
                (length / ell as f64).ln() / length.ln()
            } else {
                1.0
            };
            coeffs[ell as usize] = mu * taper(arg)?;
        }
        Ok(MollifierSpec {
            c,
            length,
            overridden,
            coeffs,
        })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn overridden(&self) -> bool {
        self.overridden
    }

    pub fn coeff(&self, ell: u64) -> f64 {
        self.coeffs.get(ell as usize).copied().unwrap_or(0.0)
    }

    pub fn max_ell(&self) -> u64 {
        self.coeffs.len() as u64 - 1
    }

    /// M(s, f⊗χ) = Σ_{ℓ≤L} x_ℓ χ(ℓ) ℓ^{−s}.
    pub fn m_value(&self, chi: &DirichletCharacter, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ell, &x) in self.coeffs.iter().enumerate().skip(1) {
            if x == 0.0 {
                continue;
            }
            let cv = chi.value(ell as u64);
            if cv.norm_sqr() == 0.0 {
                continue;
            }
            acc += x * cv * (-s * (ell as f64).ln()).exp();
        }
        acc
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Dirichlet coefficients of LM: c_n = Σ_{dℓ=n} λ_f(d) x_ℓ. c_1 = 1 and
/// c_n = 0 for 1 < n ≤ √L (the taper is 1 there and μ_f inverts λ_f).
pub fn lm_coefficients(form: &HeckeForm, spec: &MollifierSpec, n_max: usize) -> Result<Vec<f64>> {
    if n_max > form.n_max() {
        return Err(Error::resource("lm_coefficients beyond coefficient table"));
    }
    let mut c = vec![0.0; n_max + 1];
    let lambda = form.lambda_table();
    for ell in 1..=spec.max_ell().min(n_max as u64) {
        let x = spec.coeff(ell);
        if x == 0.0 {
            continue;
        }
        let mut d = 1usize;
        let mut n = ell as usize;
        while n <= n_max {
            c[n] += lambda[d] * x;
            d += 1;
            n = d * ell as usize;
        }
    }
    Ok(c)
}

/// Character-averaged deviation (1/φ*) Σ* |L(σ+it)M(σ+it) − 1|².
#[derive(Clone, Copy, Debug)]
pub struct LmDeviation {
    pub q: u64,
    pub sigma: f64,
    pub t: f64,
    pub l_effective: f64,
    pub average: f64,
    pub count: u64,
}

pub fn lm_deviation_average(
    form: &Arc<HeckeForm>,
    table: &Arc<CharacterTable>,
    spec: &MollifierSpec,
    sigma: f64,
    t: f64,
    target: f64,
) -> Result<LmDeviation> {
    let q = table.modulus();
    if sigma < 0.5 - 1.0 / (q as f64).ln() {
        return Err(Error::domain(format!(
            "lm_deviation_average needs sigma >= 1/2 - 1/ln q, got {sigma}"
        )));
    }
    let s = Complex64::new(sigma, t);
    let ctx = AfeContext::new(Arc::clone(form), q, sigma.min(0.5), sigma.max(1.0), target)?;
    let coeffs = ctx.coeffs_at(s)?;
    let mut sum = 0.0;
    let mut count = 0u64;
    for chi in table.enumerate_primitive() {
        let eps = crate::lfunc::root_number(form, &chi)?;
        let chi_table = chi.value_table();
        let l = ctx.lambda_from_coeffs(&coeffs, &chi_table, eps) * coeffs.l_normalizer;
        let m = spec.m_value(&chi, s);
        sum += (l * m - Complex64::new(1.0, 0.0)).norm_sqr();
        count += 1;
    }
    Ok(LmDeviation {
        q,
        sigma,
        t,
        l_effective: spec.length(),
        average: sum / count as f64,
        count,
    })
}

/// ω = 1 − (LM − 1)² for one character, with ln|ω| kept at relative
/// precision: below the crossover LM comes from the completed-function
/// evaluator, above it from the Dirichlet series of LM − 1 whose leading
/// term is exact.
pub struct MollifiedOmega {
    ctx: AfeContext,
    chi_table: Vec<Complex64>,
    eps: Complex64,
    spec: MollifierSpec,
    chi: DirichletCharacter,
    lm_coeffs: Vec<f64>,
    crossover: f64,
}

impl MollifiedOmega {
    pub fn new(
        form: &Arc<HeckeForm>,
        table: &Arc<CharacterTable>,
        j: u64,
        spec: MollifierSpec,
        target: f64,
    ) -> Result<MollifiedOmega> {
        let chi = table.character(j);
        let eps = crate::lfunc::root_number(form, &chi)?;
        let ctx = AfeContext::new(Arc::clone(form), table.modulus(), 0.3, 3.2, target)?;
        let lm_coeffs = lm_coefficients(form, &spec, form.n_max())?;
        Ok(MollifiedOmega {
            ctx,
            chi_table: chi.value_table(),
            eps,
            spec,
            chi,
            lm_coeffs,
            crossover: 3.0,
        })
    }

    /// LM(s) − 1.
    pub fn lm_minus_one(&self, s: Complex64) -> Result<Complex64> {
        if s.re <= self.crossover {
            self.lm_minus_one_afe(s)
        } else {
            self.lm_minus_one_series(s)
        }
    }

    /// Route 1: L from the completed-function evaluator, M summed directly.
    pub fn lm_minus_one_afe(&self, s: Complex64) -> Result<Complex64> {
        let coeffs = self.ctx.coeffs_at(s)?;
        let l =
            self.ctx.lambda_from_coeffs(&coeffs, &self.chi_table, self.eps) * coeffs.l_normalizer;
        let m = self.spec.m_value(&self.chi, s);
        Ok(l * m - Complex64::new(1.0, 0.0))
    }

    /// Route 2: the Dirichlet series Σ_{n≥2} c_n χ(n) n^{−s} of LM − 1,
    /// relative-precision at large Re(s) where route 1 cancels.
    pub fn lm_minus_one_series(&self, s: Complex64) -> Result<Complex64> {
        let q = self.chi.modulus();
        let mut acc = Complex64::new(0.0, 0.0);
        for (n, &cn) in self.lm_coeffs.iter().enumerate().skip(2) {
            if cn == 0.0 {
                continue;
            }
            let cv = self.chi_table[(n as u64 % q) as usize];
            if cv.norm_sqr() == 0.0 {
                continue;
            }
            acc += cn * cv * (-s * (n as f64).ln()).exp();
        }
        Ok(acc)
    }

    /// ω(s) itself (zero location).
    pub fn omega(&self, s: Complex64) -> Result<Complex64> {
        let y = self.lm_minus_one(s)?;
        Ok(Complex64::new(1.0, 0.0) - y * y)
    }

    /// ln|ω(s)| with relative precision where ω ≈ 1.
    pub fn log_abs_omega(&self, s: Complex64) -> Result<f64> {
        let y = self.lm_minus_one(s)?;
        Ok(log_abs_one_minus(y * y))
    }
}
