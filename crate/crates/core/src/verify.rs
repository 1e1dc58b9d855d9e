//! Aggregated invariant suite behind the `check` subcommand: character
//! orthogonality and Gauss sums, coefficient identities, functional-equation
//! residuals, argument-walk consistency, the weighted zero-count identity on
//! its closed-form family, and the orthogonality oracle.

use std::sync::Arc;

use num_complex::Complex64;

use crate::characters::CharacterTable;
use crate::error::Result;
use crate::forms::HeckeForm;
use crate::lfunc::TwistedL;
use crate::util::SplitMix64;
use crate::zeros;

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        passed,
        detail,
    }
}

/// Orthogonality, Gauss-sum modulus, and multiplicativity for one modulus.
pub fn characters_check(q: u64) -> Result<Vec<CheckResult>> {
    let table = CharacterTable::build(q)?;
    let mut out = Vec::new();
    let mut rng = SplitMix64::new(q ^ 0xabcd);

    let mut worst_orth = 0.0f64;
    for _ in 0..50 {
        let m = 1 + rng.below(q - 1);
        let n = 1 + rng.below(q - 1);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..q - 1 {
            let chi = table.character(j);
            acc += chi.value(m) * chi.value(n).conj();
        }
        let expect = if m % q == n % q { (q - 1) as f64 } else { 0.0 };
        worst_orth = worst_orth.max((acc - expect).norm());
    }
    out.push(check(
        &format!("orthogonality q={q}"),
        worst_orth <= 1e-9,
        format!("max |sum - expected| = {worst_orth:.3e}"),
    ));

    let mut worst_gauss = 0.0f64;
    for chi in table.enumerate_primitive() {
        worst_gauss = worst_gauss.max((chi.gauss_sum()?.norm() - 1.0).abs());
    }
    out.push(check(
        &format!("gauss-sum modulus q={q}"),
        worst_gauss <= 1e-10,
        format!("max ||eps_chi| - 1| = {worst_gauss:.3e}"),
    ));

    let mut worst_mult = 0.0f64;
    for _ in 0..1000 {
        let j = rng.below(q - 1);
        let chi = table.character(j);
        let a = 1 + rng.below(q - 1);
        let b = 1 + rng.below(q - 1);
        worst_mult = worst_mult.max((chi.value(a * b) - chi.value(a) * chi.value(b)).norm());
    }
    out.push(check(
        &format!("multiplicativity q={q}"),
        worst_mult <= 1e-12,
        format!("max residual = {worst_mult:.3e}"),
    ));
    Ok(out)
}

/// Deligne bound, Hecke convolution inverse, and the prime-power coefficient
/// recursion against explicit local roots.
pub fn coefficients_check(form: &Arc<HeckeForm>) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let deligne_limit = form.n_max().min(100_000) as u64;
    let deligne = form.deligne_check(deligne_limit);
    out.push(check(
        "deligne-bound",
        deligne.is_ok(),
        match &deligne {
            Ok(()) => format!("|lambda(n)| <= d(n) exact to n = {deligne_limit}"),
            Err(e) => e.to_string(),
        },
    ));

    let conv_limit = form.n_max().min(10_000) as u64;
    let mut worst = 0.0f64;
    for n in 1..=conv_limit {
        let mut s = 0.0;
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                s += form.lambda(d)? * form.mu_f(n / d)?;
                if d != n / d {
                    s += form.lambda(n / d)? * form.mu_f(d)?;
                }
            }
            d += 1;
        }
        let expect = if n == 1 { 1.0 } else { 0.0 };
        worst = worst.max((s - expect).abs());
    }
    out.push(check(
        "hecke-convolution",
        worst <= 1e-12,
        format!("max |lambda * mu_f - delta| = {worst:.3e} to n = {conv_limit}"),
    ));

    let mut worst_cf = 0.0f64;
    for &p in &crate::primes::primes_up_to(100) {
        let lam = form.lambda(p)?;
        let chi_r = form.chi_r(p);
        let disc = Complex64::new(lam * lam - 4.0 * chi_r, 0.0).sqrt();
        let alpha = (Complex64::new(lam, 0.0) + disc) / 2.0;
        let beta = (Complex64::new(lam, 0.0) - disc) / 2.0;
        for m in 1..=12u32 {
            let Some(pm) = p.checked_pow(m) else { break };
            if pm > form.n_max() as u64 {
                break;
            }
            let direct = (alpha.powu(m) + beta.powu(m)).re;
            worst_cf = worst_cf.max((direct - form.cf_coefficient(pm)?).abs());
        }
    }
    out.push(check(
        "power-sum-recursion",
        worst_cf <= 1e-12,
        format!("max |C_f recursion - explicit roots| = {worst_cf:.3e}"),
    ));
    Ok(out)
}

/// Functional-equation residuals, AFE vs direct series, and the rotated-line
/// realness diagnostic at one modulus.
pub fn lfunction_check(form: &Arc<HeckeForm>, q: u64) -> Result<Vec<CheckResult>> {
    let table = CharacterTable::build(q)?;
    let mut out = Vec::new();
    let mut rng = SplitMix64::new(q ^ 0x517e);

    let mut worst_fe = 0.0f64;
    for _ in 0..20 {
        let j = 1 + rng.below(q - 2);
        let tl = TwistedL::new(Arc::clone(form), table.character(j))?;
        let s = Complex64::new(rng.range_f64(0.05, 0.95), rng.range_f64(-4.0, 4.0));
        let lhs = tl.completed_lambda(s)?;
        let refl = tl.completed_lambda(Complex64::new(1.0, 0.0) - s.conj())?;
        worst_fe = worst_fe.max((lhs - tl.eps() * refl.conj()).norm());
    }
    out.push(check(
        &format!("functional-equation q={q}"),
        worst_fe <= 1e-8,
        format!("max residual = {worst_fe:.3e} over 20 strip points"),
    ));

    let mut worst_afe = 0.0f64;
    for _ in 0..20 {
        let j = 1 + rng.below(q - 2);
        let tl = TwistedL::new(Arc::clone(form), table.character(j))?;
        let s = Complex64::new(rng.range_f64(1.5, 3.0), rng.range_f64(-2.5, 2.5));
        let afe = tl.l_value(s)?;
        let (ds, tail) = tl.dirichlet_series_value(s, form.n_max())?;
        worst_afe = worst_afe.max(((afe - ds).norm() - tail).max(0.0));
    }
    out.push(check(
        &format!("afe-vs-series q={q}"),
        worst_afe <= 1e-8,
        format!("max (|AFE - partial| - tailbound) = {worst_afe:.3e}"),
    ));

    let tl = TwistedL::new(Arc::clone(form), table.character(1 + rng.below(q - 2)))?;
    let mut worst_im = 0.0f64;
    for _ in 0..100 {
        let t = rng.range_f64(-10.0, 10.0);
        worst_im = worst_im.max(zeros::hardy_z(&tl, t)?.imag_ratio);
    }
    out.push(check(
        &format!("hardy-realness q={q}"),
        worst_im <= 1e-8,
        format!("max |Im|/|Lambda| = {worst_im:.3e} over 100 line points"),
    ));
    Ok(out)
}

/// The weighted zero-count identity on the closed-form exponential family.
pub fn selberg_closed_form_check(cases: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let h = rng.range_f64(1.2, 2.5);
        let t1 = rng.range_f64(-1.0, 0.2);
        let t2 = t1 + h;
        let b = (std::f64::consts::PI / h + rng.range_f64(0.8, 1.8)).exp();
        let a = rng.range_f64(0.1, 3.0);
        let sigma_p = a.ln() / b.ln() - rng.range_f64(0.4, 1.5);
        let omega = zeros::exponential_test_log_abs(a, b);
        let zs = zeros::exponential_test_zeros(a, b, sigma_p, t1, t2);
        let chk = zeros::selberg_identity_check(&omega, &zs, sigma_p, t1, t2, 1e-9, None)?;
        worst = worst.max(chk.residual);
    }
    Ok(check(
        "selberg-identity-closed-form",
        worst <= 1e-6,
        format!("max residual = {worst:.3e} over {cases} configurations"),
    ))
}

/// Dual-path orthogonality oracle at a small case.
pub fn oracle_check(form: &Arc<HeckeForm>) -> Result<CheckResult> {
    let table = CharacterTable::build(53)?;
    let o = crate::moments::diagonal_oracle(form, &table, 30f64.cbrt(), 1.0, 1)?;
    let rel = o.difference / (1.0 + o.direct.abs());
    Ok(check(
        "diagonal-oracle q=53",
        rel <= 1e-9,
        format!("paths differ by {:.3e}", o.difference),
    ))
}

/// The full battery at one modulus.
pub fn run_all(form: &Arc<HeckeForm>, q: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    out.extend(characters_check(q)?);
    out.extend(coefficients_check(form)?);
    out.extend(lfunction_check(form, q)?);
    out.push(selberg_closed_form_check(20, 0x5e1b)?);
    out.push(oracle_check(form)?);
    Ok(out)
}
