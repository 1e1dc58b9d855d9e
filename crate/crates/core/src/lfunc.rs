//! Evaluation of the twisted L-function L(s, f⊗χ), its completed form
//! Λ(s, f⊗χ) = Q^s Γ(s+κ) L(s, f⊗χ) with Q = q√r/(2π) and κ = (k−1)/2,
//! the root number ε(f⊗χ) = ε(f) χ(r) ε_χ², and L′/L.
//!
//! Λ is computed by the smoothed approximate functional equation with unit
//! splitting point:
//!
//!   Λ(s) = Σ_{n≤N} λ_f(n) χ(n) (Q/n)^s Γ(s+κ, n/Q)
//!        + ε(f⊗χ) Σ_{n≤N} λ_f(n) χ̄(n) (Q/n)^{1−s} Γ(1−s+κ, n/Q),
//!
//! where Γ(·,·) is the upper incomplete gamma function and both tails decay
//! like e^{−n/Q}. The incomplete-gamma coefficient arrays are χ-free, so a
//! character sweep at fixed s shares them; see [`AfeContext`].

use std::sync::Arc;

use num_complex::Complex64;

use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::forms::HeckeForm;
use crate::special::{digamma, ln_gamma, upper_gamma};

/// Default absolute error budget for Λ.
pub const DEFAULT_TARGET_ACCURACY: f64 = 1e-10;

/// Heights beyond this keep the gamma arguments ill-conditioned; configurable.
pub const DEFAULT_HEIGHT_CAP: f64 = 60.0;

/// Root number ε(f⊗χ) = ε(f) χ(r) ε_χ².
pub fn root_number(form: &HeckeForm, chi: &DirichletCharacter) -> Result<Complex64> {
    let q = chi.modulus();
    if form.level() % q == 0 || gcd(q, form.level()) != 1 {
        return Err(Error::domain(format!(
            "root_number requires gcd(q, r) = 1; q = {q}, r = {}",
            form.level()
        )));
    }
    if !chi.is_primitive() {
        return Err(Error::domain("root_number requires a primitive character"));
    }
    let eps_chi = chi.gauss_sum()?;
    Ok(form.eps() * chi.value(form.level()) * eps_chi * eps_chi)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// χ-independent AFE data for a fixed (form, modulus): conductor parameter,
/// term cutoff, and the index tables the per-σ coefficient arrays align to.
pub struct AfeContext {
    form: Arc<HeckeForm>,
    modulus: u64,
    q_param: f64,
    kappa: f64,
    target: f64,
    n_cut: usize,
    /// Terms n ≤ n_cut with q ∤ n and λ_f(n) ≠ 0.
    ns: Vec<u32>,
    n_mod_q: Vec<u32>,
    ln_q_over_n: Vec<f64>,
}

/// Per-s coefficient arrays: Λ(s) = Σ c1[i] χ(n_i) + ε Σ c2[i] χ̄(n_i),
/// plus the normalizer 1/(Q^s Γ(s+κ)) used to pass from Λ to L.
pub struct SigmaCoeffs {
    pub c1: Vec<Complex64>,
    pub c2: Vec<Complex64>,
    pub l_normalizer: Complex64,
    /// Σ (|c1| + |c2|): the absolute mass of the assembly, which scales the
    /// f64 noise floor of an evaluated Λ.
    pub abs_scale: f64,
}

impl AfeContext {
    /// Build a context able to evaluate Λ for Re(s) anywhere in
    /// [sigma_lo, sigma_hi] within `target` absolute accuracy.
    pub fn new(
        form: Arc<HeckeForm>,
        modulus: u64,
        sigma_lo: f64,
        sigma_hi: f64,
        target: f64,
    ) -> Result<AfeContext> {
        let q_param = modulus as f64 * (form.level() as f64).sqrt()
            / (2.0 * std::f64::consts::PI);
        let kappa = form.kappa();
        let n_cut = afe_cutoff(q_param, kappa, sigma_lo, sigma_hi, target, form.n_max())?;
        let lambda = form.lambda_table();
        let mut ns = Vec::with_capacity(n_cut);
        let mut n_mod_q = Vec::with_capacity(n_cut);
        let mut ln_q_over_n = Vec::with_capacity(n_cut);
        for n in 1..=n_cut {
            if n as u64 % modulus == 0 || lambda[n] == 0.0 {
                continue;
            }
            ns.push(n as u32);
            n_mod_q.push((n as u64 % modulus) as u32);
            ln_q_over_n.push(q_param.ln() - (n as f64).ln());
        }
        Ok(AfeContext {
            form,
            modulus,
            q_param,
            kappa,
            target,
            n_cut,
            ns,
            n_mod_q,
            ln_q_over_n,
        })
    }

    pub fn form(&self) -> &Arc<HeckeForm> {
        &self.form
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Conductor parameter Q = q√r/(2π).
    pub fn q_param(&self) -> f64 {
        self.q_param
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn target(&self) -> f64 {
        self.target
    }

    /// AFE term cutoff actually in use.
    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    /// Residues n mod q aligned with the coefficient arrays.
    pub fn residues(&self) -> &[u32] {
        &self.n_mod_q
    }

    /// The χ-free coefficient arrays at one point s.
    pub fn coeffs_at(&self, s: Complex64) -> Result<SigmaCoeffs> {
        let w1 = s + self.kappa;
        let w2 = -s + (1.0 + self.kappa);
        let lambda = self.form.lambda_table();
        let mut c1 = Vec::with_capacity(self.ns.len());
        let mut c2 = Vec::with_capacity(self.ns.len());
        let mut abs_scale = 0.0;
        for (i, &n) in self.ns.iter().enumerate() {
            let lam = lambda[n as usize];
            let x = n as f64 / self.q_param;
            let g1 = upper_gamma(w1, x)?;
            let g2 = upper_gamma(w2, x)?;
            let lr = self.ln_q_over_n[i];
            let a = lam * (s * lr).exp() * g1;
            let b = lam * ((1.0 - s) * lr).exp() * g2;
            abs_scale += a.norm() + b.norm();
            c1.push(a);
            c2.push(b);
        }
        let l_normalizer = (-(s * self.q_param.ln()) - ln_gamma(w1)).exp();
        Ok(SigmaCoeffs {
            c1,
            c2,
            l_normalizer,
            abs_scale,
        })
    }

    /// Assemble Λ(s) from precomputed coefficients and a character value
    /// table. Neumaier-compensated so the noise floor stays near
    /// ε · max-partial rather than accumulating over the whole sum; the
    /// realness diagnostics near zeros need that headroom.
    pub fn lambda_from_coeffs(
        &self,
        coeffs: &SigmaCoeffs,
        chi_table: &[Complex64],
        eps: Complex64,
    ) -> Complex64 {
        let mut s1 = KahanC::new();
        let mut s2 = KahanC::new();
        for (i, &r) in self.n_mod_q.iter().enumerate() {
            let chi = chi_table[r as usize];
            s1.add(coeffs.c1[i] * chi);
            s2.add(coeffs.c2[i] * chi.conj());
        }
        s1.value() + eps * s2.value()
    }
}

/// Neumaier-compensated complex accumulator.
struct KahanC {
    sum: Complex64,
    comp: Complex64,
}

impl KahanC {
    fn new() -> Self {
        KahanC {
            sum: Complex64::new(0.0, 0.0),
            comp: Complex64::new(0.0, 0.0),
        }
    }

    #[inline]
    fn add(&mut self, v: Complex64) {
        let t_re = self.sum.re + v.re;
        self.comp.re += if self.sum.re.abs() >= v.re.abs() {
            (self.sum.re - t_re) + v.re
        } else {
            (v.re - t_re) + self.sum.re
        };
        let t_im = self.sum.im + v.im;
        self.comp.im += if self.sum.im.abs() >= v.im.abs() {
            (self.sum.im - t_im) + v.im
        } else {
            (v.im - t_im) + self.sum.im
        };
        self.sum = Complex64::new(t_re, t_im);
    }

    fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

/// Cutoff search: smallest N (stepping by ~Q/4) whose remaining AFE tail is
/// provably below `target`, using |Γ(w,x)| ≤ Γ(Re w, x), d(n) ≤ 2√n and the
/// geometric envelope Σ_{n>N} e^{−n/Q} ≤ Q + 1.
fn afe_cutoff(
    q_param: f64,
    kappa: f64,
    sigma_lo: f64,
    sigma_hi: f64,
    target: f64,
    n_max: usize,
) -> Result<usize> {
    let a = kappa + sigma_hi.abs().max((1.0 - sigma_lo).abs()) + 0.5;
    let p_min = sigma_lo.min(1.0 - sigma_hi);
    let w = Complex64::new(a, 0.0);
    let stride = ((q_param / 4.0).ceil() as usize).max(1);
    let mut n = ((q_param * (a + 3.0)).ceil() as usize).max(8);
    loop {
        if n > n_max {
            return Err(Error::resource(format!(
                "AFE cutoff needs N ≈ {n} > coefficient table n_max = {n_max}"
            )));
        }
        let x = n as f64 / q_param;
        let gam = upper_gamma(w, x)?.re;
        let bound = 2.0 * (n as f64).sqrt()
            * (q_param / n as f64).powf(p_min)
            * gam
            * 2.0
            * (q_param + 1.0);
        if bound < target {
            return Ok(n);
        }
        n += stride;
    }
}

/// A bound (form, character) pair with everything needed to evaluate
/// L(s, f⊗χ) and Λ(s, f⊗χ) in the strip.
pub struct TwistedL {
    ctx: AfeContext,
    chi: DirichletCharacter,
    chi_table: Vec<Complex64>,
    eps: Complex64,
    height_cap: f64,
}

impl TwistedL {
    pub fn new(form: Arc<HeckeForm>, chi: DirichletCharacter) -> Result<TwistedL> {
        TwistedL::with_options(form, chi, DEFAULT_TARGET_ACCURACY, -0.5, 3.5)
    }

    pub fn with_options(
        form: Arc<HeckeForm>,
        chi: DirichletCharacter,
        target: f64,
        sigma_lo: f64,
        sigma_hi: f64,
    ) -> Result<TwistedL> {
        let eps = root_number(&form, &chi)?;
        let ctx = AfeContext::new(form, chi.modulus(), sigma_lo, sigma_hi, target)?;
        let chi_table = chi.value_table();
        Ok(TwistedL {
            ctx,
            chi,
            chi_table,
            eps,
            height_cap: DEFAULT_HEIGHT_CAP,
        })
    }

    /// Build directly from a shared context (character sweeps).
    pub fn from_context(ctx: AfeContext, chi: DirichletCharacter) -> Result<TwistedL> {
        let eps = root_number(ctx.form(), &chi)?;
        let chi_table = chi.value_table();
        Ok(TwistedL {
            ctx,
            chi,
            chi_table,
            eps,
            height_cap: DEFAULT_HEIGHT_CAP,
        })
    }

    pub fn chi(&self) -> &DirichletCharacter {
        &self.chi
    }

    pub fn context(&self) -> &AfeContext {
        &self.ctx
    }

    pub fn form(&self) -> &Arc<HeckeForm> {
        self.ctx.form()
    }

    /// Conductor parameter Q = q√r/(2π).
    pub fn q_param(&self) -> f64 {
        self.ctx.q_param()
    }

    pub fn kappa(&self) -> f64 {
        self.ctx.kappa()
    }

    /// Root number ε(f⊗χ).
    pub fn eps(&self) -> Complex64 {
        self.eps
    }

    pub fn target_accuracy(&self) -> f64 {
        self.ctx.target()
    }

    fn check_height(&self, s: Complex64) -> Result<()> {
        if s.im.abs() > self.height_cap {
            return Err(Error::domain(format!(
                "|Im s| = {} exceeds the height cap {}",
                s.im.abs(),
                self.height_cap
            )));
        }
        Ok(())
    }

    /// Completed Λ(s, f⊗χ) by the smoothed AFE.
    pub fn completed_lambda(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.completed_lambda_scaled(s)?.0)
    }

    /// Λ(s) together with the absolute coefficient mass of its assembly
    /// (the f64 noise-floor scale).
    pub fn completed_lambda_scaled(&self, s: Complex64) -> Result<(Complex64, f64)> {
        self.check_height(s)?;
        let coeffs = self.ctx.coeffs_at(s)?;
        Ok((
            self.ctx
                .lambda_from_coeffs(&coeffs, &self.chi_table, self.eps),
            coeffs.abs_scale,
        ))
    }

    /// L(s, f⊗χ) = Λ(s) / (Q^s Γ(s+κ)).
    pub fn l_value(&self, s: Complex64) -> Result<Complex64> {
        self.check_height(s)?;
        let coeffs = self.ctx.coeffs_at(s)?;
        let lam = self
            .ctx
            .lambda_from_coeffs(&coeffs, &self.chi_table, self.eps);
        Ok(lam * coeffs.l_normalizer)
    }

    /// Partial Dirichlet series Σ_{n≤N} λ_f(n)χ(n) n^{−s} with a rigorous
    /// tail bound from d(n) ≤ 2√n and Σ_{n≤x} d(n) ≤ x(ln x + 1).
    ///
    /// Only an oracle for AFE validation; requires Re(s) ≥ 1.5 where the tail
    /// bound converges.
    pub fn dirichlet_series_value(&self, s: Complex64, n_terms: usize) -> Result<(Complex64, f64)> {
        let sigma = s.re;
        if sigma < 1.5 {
            return Err(Error::domain(format!(
                "dirichlet_series_value needs Re(s) >= 1.5, got {sigma}"
            )));
        }
        let form = self.form();
        if n_terms > form.n_max() {
            return Err(Error::resource(format!(
                "series cutoff {n_terms} exceeds coefficient table {}",
                form.n_max()
            )));
        }
        let lambda = form.lambda_table();
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 1..=n_terms {
            let chi = self.chi_table[(n as u64 % self.ctx.modulus()) as usize];
            if chi.norm_sqr() == 0.0 || lambda[n] == 0.0 {
                continue;
            }
            acc += lambda[n] * chi * (-s * (n as f64).ln()).exp();
        }
        // Σ_{n>N} d(n) n^{−σ} ≤ σ N^{1−σ} [ (ln N + 1)/(σ−1) + 1/(σ−1)² ]
        let nn = n_terms as f64;
        let tail = sigma * nn.powf(1.0 - sigma)
            * ((nn.ln() + 1.0) / (sigma - 1.0) + 1.0 / ((sigma - 1.0) * (sigma - 1.0)));
        Ok((acc, tail))
    }

    /// L′/L by Richardson-extrapolated centered differences of log Λ, minus
    /// the exact log-derivative of the gamma factor:
    ///   L′/L(s) = Λ′/Λ(s) − ln Q − ψ(s+κ).
    ///
    /// Errors out when the step-halving estimates disagree, which is what
    /// happens too close to a zero.
    pub fn log_derivative(&self, s: Complex64) -> Result<Complex64> {
        let h0 = 0.01;
        let d = |h: f64| -> Result<Complex64> {
            let plus = self.completed_lambda(s + Complex64::new(h, 0.0))?;
            let minus = self.completed_lambda(s - Complex64::new(h, 0.0))?;
            if plus.norm() == 0.0 || minus.norm() == 0.0 {
                return Err(Error::domain("log_derivative at a zero of Lambda"));
            }
            Ok((plus / minus).ln() / (2.0 * h))
        };
        let d1 = d(h0)?;
        let d2 = d(h0 / 2.0)?;
        let d4 = d(h0 / 4.0)?;
        let r1 = (4.0 * d2 - d1) / 3.0;
        let r2 = (4.0 * d4 - d2) / 3.0;
        if (r2 - r1).norm() > 1e-6 {
            return Err(Error::domain(format!(
                "log_derivative unstable at s = {s} (too close to a zero?)"
            )));
        }
        let lambda_log_deriv = (16.0 * r2 - r1) / 15.0;
        Ok(lambda_log_deriv - self.q_param().ln() - digamma(s + self.kappa()))
    }

    /// −Σ_{n≤N} Λ(n) C_f(n) χ(n) n^{−s}: the Re(s) > 1 Dirichlet series of
    /// L′/L, used as the oracle for `log_derivative`.
    pub fn log_derivative_series(&self, s: Complex64, n_terms: usize) -> Result<Complex64> {
        let form = self.form();
        let spf = form.spf();
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 2..=n_terms.min(form.n_max()) {
            let Some((p, _)) = crate::primes::prime_power(n as u64, spf) else {
                continue;
            };
            let chi = self.chi_table[(n as u64 % self.ctx.modulus()) as usize];
            if chi.norm_sqr() == 0.0 {
                continue;
            }
            let cf = form.cf_coefficient(n as u64)?;
            let lam_vm = (p as f64).ln();
            acc -= lam_vm * cf * chi * (-s * (n as f64).ln()).exp();
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharacterTable;
    use crate::util::SplitMix64;

    fn delta_tl(q: u64, j: u64) -> TwistedL {
        let form = HeckeForm::delta(60_000).unwrap();
        let table = CharacterTable::build(q).unwrap();
        TwistedL::new(form, table.character(j)).unwrap()
    }

    #[test]
    fn root_number_unit_modulus_and_quadratic() {
        let form = HeckeForm::delta(100).unwrap();
        let table = CharacterTable::build(5).unwrap();
        // quadratic χ mod 5: ε_χ = 1, so ε(f⊗χ) = ε_χ² = 1 for level 1
        let eps = root_number(&form, &table.character(2)).unwrap();
        assert!((eps - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        for j in 1..=3 {
            let eps = root_number(&form, &table.character(j)).unwrap();
            assert!((eps.norm() - 1.0).abs() < 1e-10);
        }
        assert!(root_number(&form, &table.character(0)).is_err());
    }

    #[test]
    fn dirichlet_series_partial_one_term() {
        let tl = delta_tl(11, 1);
        let (v, _) = tl
            .dirichlet_series_value(Complex64::new(3.0, 0.0), 1)
            .unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(tl
            .dirichlet_series_value(Complex64::new(1.2, 0.0), 100)
            .is_err());
    }

    #[test]
    fn series_near_one_at_three() {
        // |L(3) − 1| ≤ ζ(3)² − 1, with ζ(3)² evaluated by direct summation.
        let zeta3: f64 = (1..200_000).map(|n: u64| 1.0 / (n as f64).powi(3)).sum();
        let bound = zeta3 * zeta3 - 1.0;
        assert!((bound - 0.4449).abs() < 1e-3);
        let tl = delta_tl(11, 2);
        let (v, tail) = tl
            .dirichlet_series_value(Complex64::new(3.0, 0.0), 50_000)
            .unwrap();
        assert!((v - Complex64::new(1.0, 0.0)).norm() <= bound + tail);
    }

    #[test]
    fn afe_matches_dirichlet_series() {
        // Cross-method oracle: Λ/(Q^s Γ(s+κ)) vs the partial series plus its
        // rigorous tail bound, at points where the tail is small.
        let tl = delta_tl(101, 7);
        let mut rng = SplitMix64::new(17);
        for _ in 0..6 {
            let s = Complex64::new(rng.range_f64(2.4, 3.0), rng.range_f64(-2.0, 2.0));
            let afe = tl.l_value(s).unwrap();
            let (ds, tail) = tl.dirichlet_series_value(s, 60_000).unwrap();
            assert!(
                (afe - ds).norm() <= tail + 1e-8,
                "s = {s}: diff = {}, tail = {tail}",
                (afe - ds).norm()
            );
        }
    }

    #[test]
    fn functional_equation_residual() {
        let tl = delta_tl(101, 13);
        let mut rng = SplitMix64::new(5);
        for _ in 0..8 {
            let s = Complex64::new(rng.range_f64(0.1, 0.9), rng.range_f64(-3.0, 3.0));
            let lhs = tl.completed_lambda(s).unwrap();
            let refl = tl
                .completed_lambda(Complex64::new(1.0, 0.0) - s.conj())
                .unwrap();
            let resid = (lhs - tl.eps() * refl.conj()).norm();
            assert!(resid <= 10.0 * tl.target_accuracy(), "s = {s}: {resid:e}");
        }
    }

    #[test]
    fn conjugation_symmetry() {
        // L(s̄, f⊗χ̄) = conj L(s, f⊗χ) since λ_f is real.
        let form = HeckeForm::delta(60_000).unwrap();
        let table = CharacterTable::build(101).unwrap();
        let tl = TwistedL::new(form.clone(), table.character(7)).unwrap();
        let tl_bar = TwistedL::new(form, table.character(7).conjugate()).unwrap();
        let s = Complex64::new(0.7, 1.3);
        let a = tl.l_value(s).unwrap();
        let b = tl_bar.l_value(s.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-9);
    }

    #[test]
    fn log_derivative_matches_series_oracle() {
        let tl = delta_tl(101, 3);
        for &(re, im) in &[(2.5, 0.0), (2.5, 1.2), (2.8, -0.7)] {
            let s = Complex64::new(re, im);
            let got = tl.log_derivative(s).unwrap();
            let want = tl.log_derivative_series(s, 60_000).unwrap();
            assert!(
                (got - want).norm() < 1e-6,
                "s = {s}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn log_derivative_conjugation() {
        let form = HeckeForm::delta(60_000).unwrap();
        let table = CharacterTable::build(101).unwrap();
        let tl = TwistedL::new(form.clone(), table.character(9)).unwrap();
        let tl_bar = TwistedL::new(form, table.character(9).conjugate()).unwrap();
        let s = Complex64::new(1.0, 0.8);
        let a = tl.log_derivative(s).unwrap();
        let b = tl_bar.log_derivative(s.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-6);
    }

    #[test]
    fn cutoff_scales_like_q_log_accuracy() {
        // Measured cutoffs stay within 2× of the e^{−n/Q} heuristic
        // N_h = smallest n with e^{−n/Q} (n/Q)^{κ+1} ≤ target.
        let form = HeckeForm::delta(60_000).unwrap();
        for &q in &[101u64, 211, 401] {
            let ctx = AfeContext::new(form.clone(), q, 0.45, 3.0, 1e-10).unwrap();
            let qp = ctx.q_param();
            let kappa = ctx.kappa();
            // scan past the peak of e^{−u} u^{κ+1} at u = κ+1
            let mut n_h = (qp * (kappa + 1.0)).ceil() as usize;
            while {
                let u = n_h as f64 / qp;
                (-u).exp() * u.powf(kappa + 1.0) > 1e-10
            } {
                n_h += 1;
            }
            let ratio = ctx.n_cut() as f64 / n_h as f64;
            assert!(ratio <= 2.0, "q = {q}: N = {}, N_h = {n_h}", ctx.n_cut());
        }
    }
}
