//! Critical-line zero location, rectangle counts by the argument principle,
//! the line-vs-rectangle audit, and the weighted zero-counting identity used
//! by the zero-density machinery.
//!
//! The rotated function Z(t) = Re(e^{−iθ/2} Λ(1/2+it)) with ε(f⊗χ) = e^{iθ}
//! is real up to evaluation error (functional equation plus conjugation
//! symmetry), so its sign changes bracket simple critical-line zeros.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lfunc::TwistedL;
use crate::util::adaptive_simpson;

/// Value of the rotated completed function with its realness diagnostic.
#[derive(Clone, Copy, Debug)]
pub struct HardyZ {
    pub value: f64,
    /// |Im| / |Λ| after rotation; must stay at evaluation-error level.
    pub imag_ratio: f64,
}

/// Z(t) = Re(e^{−iθ/2} Λ(1/2 + it)); errors if the imaginary part exceeds
/// 1e−8·|Λ| plus the evaluation noise floor, which would signal an ε or AFE
/// inconsistency. The floor is 1e−12 widened by ε times the absolute
/// coefficient mass of the assembly: at a bisection point sitting on a zero,
/// |Λ| collapses to rounding level while the noise does not.
pub fn hardy_z(tl: &TwistedL, t: f64) -> Result<HardyZ> {
    let theta = tl.eps().arg();
    let rot = Complex64::from_polar(1.0, -theta / 2.0);
    let (lam, abs_scale) = tl.completed_lambda_scaled(Complex64::new(0.5, t))?;
    let z = rot * lam;
    let scale = z.norm();
    let floor = 1e-12 + 32.0 * f64::EPSILON * abs_scale;
    if z.im.abs() > 1e-8 * scale + floor {
        return Err(Error::FeInconsistency(format!(
            "hardy_z imaginary part {:e} vs |Lambda| {:e} at t = {t}",
            z.im, scale
        )));
    }
    Ok(HardyZ {
        value: z.re,
        imag_ratio: if scale > 0.0 { z.im.abs() / scale } else { 0.0 },
    })
}

/// Options for line scans and audits.
#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    pub step: f64,
    /// Rectangle margin below the critical line for the audit box.
    pub delta_prime: f64,
    /// Right edge of audit rectangles.
    pub sigma_max: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            step: 0.0625,
            delta_prime: 0.05,
            sigma_max: 3.0,
        }
    }
}

/// Located zeros of one L(s, f⊗χ) in a height window, with certification
/// metadata and the audit rectangle count.
#[derive(Clone, Debug)]
pub struct ZeroList {
    pub chi_index: u64,
    pub window: (f64, f64),
    /// Strictly increasing ordinates of detected critical-line zeros.
    pub ordinates: Vec<f64>,
    /// Off-line zero pairs inferred from a (rare) balanced audit surplus.
    pub offline_pairs: usize,
    /// Certified off-line zero positions (β, γ); empty in every observed run,
    /// populated synthetically in tests of σ_x.
    pub offline_zeros: Vec<(f64, f64)>,
    /// Winding count over [1/2−δ′, σ_max] × window for this character.
    pub rect_count: usize,
    pub scan_step: f64,
    /// max |Z| at the bisected zero ordinates (certification).
    pub max_z_at_zero: f64,
}

impl ZeroList {
    /// Zeros with β ≥ σ in the window. Line zeros count exactly when
    /// σ ≤ 1/2; a balanced audit certifies nothing else lives in the strip
    /// part of the audit box, and an audit surplus contributes its pairs.
    pub fn count_beta_at_least(&self, sigma: f64) -> usize {
        let line = if sigma <= 0.5 { self.ordinates.len() } else { 0 };
        // A pair (β, 1−β) has one member with β ≥ σ for σ ∈ (1/2, 0.55];
        // position data is unknown, so attribute one zero per pair.
        line + self.offline_pairs
    }

    /// Coverage check: the window must contain [t − reach, t + reach].
    pub fn covers(&self, t: f64, reach: f64) -> bool {
        self.window.0 <= t - reach && self.window.1 >= t + reach
    }
}

/// Scan Z on a grid over [t1, t2], bisect each sign change to width 1e−9.
fn scan_line(tl: &TwistedL, t1: f64, t2: f64, step: f64) -> Result<(Vec<f64>, f64)> {
    if t2 <= t1 || step <= 0.0 {
        return Err(Error::domain("scan_line needs t2 > t1 and step > 0"));
    }
    let n_steps = ((t2 - t1) / step).ceil() as usize;
    let mut ordinates = Vec::new();
    let mut max_z = 0.0f64;
    let mut prev_t = t1;
    let mut prev_z = hardy_z(tl, prev_t)?.value;
    for i in 1..=n_steps {
        let t = t1 + (t2 - t1) * i as f64 / n_steps as f64;
        let z = hardy_z(tl, t)?.value;
        if prev_z == 0.0 {
            // grid point exactly on a zero
            ordinates.push(prev_t);
        } else if prev_z * z < 0.0 {
            let (mut a, mut b) = (prev_t, t);
            let mut za = prev_z;
            while b - a > 1e-9 {
                let m = 0.5 * (a + b);
                let zm = hardy_z(tl, m)?.value;
                if zm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if za * zm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    za = zm;
                }
            }
            let root = 0.5 * (a + b);
            max_z = max_z.max(hardy_z(tl, root)?.value.abs());
            ordinates.push(root);
        }
        prev_t = t;
        prev_z = z;
    }
    Ok((ordinates, max_z))
}

/// Continuous argument variation of f along the segment [za, zb], by adaptive
/// bisection with midpoint lookahead.
///
/// A piece is accepted only when both of its halves rotate by less than π/2
/// AND the piece is short in absolute terms; a phase swing of a zero lying
/// just off the contour therefore cannot hide a silent 2π. Zeros closer than
/// ~0.07 to the contour and to each other could still alias in principle;
/// the audits and the integer-roundness check downstream surface that.
fn arg_variation<F>(f: &F, za: Complex64, zb: Complex64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let fa = f(za)?;
    let fb = f(zb)?;
    let max_len = ((zb - za).norm() / 8.0).min(0.15);
    seg_rec(f, za, zb, fa, fb, max_len, 0)
}

fn seg_rec<F>(
    f: &F,
    za: Complex64,
    zb: Complex64,
    fa: Complex64,
    fb: Complex64,
    max_len: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    if fa.norm() == 0.0 || fb.norm() == 0.0 {
        return Err(Error::ZeroOnBoundary { re: za.re, im: za.im });
    }
    let zm = 0.5 * (za + zb);
    let fm = f(zm)?;
    if fm.norm() == 0.0 {
        return Err(Error::ZeroOnBoundary { re: zm.re, im: zm.im });
    }
    let dl = (fm / fa).arg();
    let dr = (fb / fm).arg();
    if dl.abs() < std::f64::consts::FRAC_PI_2
        && dr.abs() < std::f64::consts::FRAC_PI_2
        && (zb - za).norm() <= max_len
    {
        return Ok(dl + dr);
    }
    if depth > 46 {
        return Err(Error::ZeroOnBoundary { re: zm.re, im: zm.im });
    }
    Ok(seg_rec(f, za, zm, fa, fm, max_len, depth + 1)?
        + seg_rec(f, zm, zb, fm, fb, max_len, depth + 1)?)
}

/// Winding number of f around the rectangle [σ_lo, σ_hi] × [t1, t2]
/// (counterclockwise). The raw estimate must sit within 0.05 of an integer.
pub fn winding_number<F>(f: &F, sigma_lo: f64, sigma_hi: f64, t1: f64, t2: f64) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let c = Complex64::new;
    let corners = [
        c(sigma_lo, t1),
        c(sigma_hi, t1),
        c(sigma_hi, t2),
        c(sigma_lo, t2),
        c(sigma_lo, t1),
    ];
    let mut total = 0.0;
    for w in corners.windows(2) {
        total += arg_variation(f, w[0], w[1])?;
    }
    let winding = total / (2.0 * std::f64::consts::PI);
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.05 {
        return Err(Error::Convergence(format!(
            "winding estimate {winding} is not close to an integer"
        )));
    }
    Ok(rounded as i64)
}

/// Zeros of Λ (with multiplicity) in [σ, σ_max] × [t1, t2] by boundary
/// winding. Λ is entire, and in boxes right of −κ its zeros are exactly the
/// zeros of L.
pub fn count_zeros_rectangle(
    tl: &TwistedL,
    sigma: f64,
    sigma_max: f64,
    t1: f64,
    t2: f64,
) -> Result<usize> {
    let f = |s: Complex64| tl.completed_lambda(s);
    let w = winding_number(&f, sigma, sigma_max, t1, t2)?;
    if w < 0 {
        return Err(Error::Convergence(format!(
            "negative winding {w} for an entire function"
        )));
    }
    Ok(w as usize)
}

/// Line scan plus the joint χ/χ̄ rectangle audit.
///
/// The functional equation with conjugation pairs zeros at ρ ↔ 1 − ρ̄ between
/// χ and χ̄, so the two audit rectangles jointly must hold exactly the
/// detected line zeros plus an even surplus (two per off-line pair). A
/// mismatch that survives two scan-step halvings is an unresolved-window
/// error naming the window.
pub fn find_zeros_on_line(
    tl: &TwistedL,
    tl_bar: &TwistedL,
    t1: f64,
    t2: f64,
    opts: ScanOptions,
) -> Result<(ZeroList, ZeroList)> {
    let mut step = opts.step;
    let mut last_err = None;
    for _halving in 0..=2 {
        let (ord, max_z) = scan_line(tl, t1, t2, step)?;
        let (ord_bar, max_z_bar) = scan_line(tl_bar, t1, t2, step)?;
        let rect = count_zeros_rectangle(tl, 0.5 - opts.delta_prime, opts.sigma_max, t1, t2)?;
        let rect_bar =
            count_zeros_rectangle(tl_bar, 0.5 - opts.delta_prime, opts.sigma_max, t1, t2)?;
        let lines = ord.len() + ord_bar.len();
        let rects = rect + rect_bar;
        if rects >= lines && (rects - lines) % 2 == 0 {
            let pairs = (rects - lines) / 2;
            // Pairs (β, 1−β) mirror between the two rectangles.
            let (p1, p2) = (pairs / 2 + pairs % 2, pairs / 2);
            return Ok((
                ZeroList {
                    chi_index: tl.chi().index(),
                    window: (t1, t2),
                    ordinates: ord,
                    offline_pairs: p1,
                    offline_zeros: Vec::new(),
                    rect_count: rect,
                    scan_step: step,
                    max_z_at_zero: max_z,
                },
                ZeroList {
                    chi_index: tl_bar.chi().index(),
                    window: (t1, t2),
                    ordinates: ord_bar,
                    offline_pairs: p2,
                    offline_zeros: Vec::new(),
                    rect_count: rect_bar,
                    scan_step: step,
                    max_z_at_zero: max_z_bar,
                },
            ));
        }
        last_err = Some(Error::UnresolvedWindow {
            t1,
            t2,
            detail: format!(
                "rectangles hold {rects} zeros but line scans found {lines} (step {step})"
            ),
        });
        step /= 2.0;
    }
    Err(last_err.expect("audit loop ran"))
}

/// N(f; σ, t1, t2): the primitive-character average of rectangle counts,
/// computed literally by boundary winding per character. Enforces the
/// σ ≥ 1/2 + 1/ln q and t2 − t1 ≥ 1/ln q hypotheses.
pub fn n_avg(
    form: &std::sync::Arc<crate::forms::HeckeForm>,
    table: &std::sync::Arc<crate::characters::CharacterTable>,
    sigma: f64,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    let q = table.modulus() as f64;
    if sigma < 0.5 + 1.0 / q.ln() {
        return Err(Error::domain(format!(
            "n_avg requires sigma >= 1/2 + 1/ln q = {}",
            0.5 + 1.0 / q.ln()
        )));
    }
    if t2 - t1 < 1.0 / q.ln() {
        return Err(Error::domain("n_avg requires t2 - t1 >= 1/ln q"));
    }
    use rayon::prelude::*;
    let counts: Vec<Result<usize>> = (1..table.modulus() - 1)
        .into_par_iter()
        .map(|j| {
            let tl = TwistedL::new(std::sync::Arc::clone(form), table.character(j))?;
            count_zeros_rectangle(&tl, sigma, 3.0, t1, t2)
        })
        .collect();
    let mut total = 0usize;
    for c in counts {
        total += c?;
    }
    Ok(total as f64 / (table.modulus() - 2) as f64)
}

/// Zero-density profile over a σ-grid, audit-driven: one line scan plus one
/// audit rectangle per character decides every σ > 1/2 at once (a balanced
/// audit certifies the strip part of the box holds only line zeros). The
/// below-line anchor (σ = 1/2 − δ′, where the count is every strip zero)
/// gives the decay fit its left endpoint.
#[derive(Clone, Debug, serde::Serialize)]
pub struct DensityTable {
    pub q: u64,
    pub t1: f64,
    pub t2: f64,
    pub sigmas: Vec<f64>,
    pub n_avg: Vec<f64>,
    /// Whether each σ meets the σ ≥ 1/2 + 1/ln q hypothesis.
    pub in_theorem_regime: Vec<bool>,
    pub anchor_sigma: f64,
    pub anchor_n_avg: f64,
    pub offline_pairs_total: usize,
    /// Least-squares slope of n_avg against σ − 1/2, anchor included.
    pub fit_slope: f64,
}

pub fn density_profile(
    form: &std::sync::Arc<crate::forms::HeckeForm>,
    table: &std::sync::Arc<crate::characters::CharacterTable>,
    t1: f64,
    t2: f64,
    sigmas: &[f64],
    opts: ScanOptions,
) -> Result<DensityTable> {
    use rayon::prelude::*;
    let q = table.modulus();
    if sigmas.iter().any(|&s| s <= 0.5) {
        return Err(Error::domain("density grid must sit right of 1/2"));
    }
    if t2 - t1 < 1.0 / (q as f64).ln() {
        return Err(Error::domain("window shorter than 1/ln q"));
    }
    // conjugate pairs: (j, q−1−j); j = (q−1)/2 is the self-conjugate
    // (real) character
    let half = (q - 1) / 2;
    let lists: Vec<Result<(ZeroList, ZeroList)>> = (1..=half)
        .into_par_iter()
        .map(|j| {
            let tl = TwistedL::new(std::sync::Arc::clone(form), table.character(j))?;
            let tl_bar =
                TwistedL::new(std::sync::Arc::clone(form), table.character(q - 1 - j))?;
            find_zeros_on_line(&tl, &tl_bar, t1, t2, opts)
        })
        .collect();
    let mut per_char: Vec<ZeroList> = Vec::with_capacity((q - 2) as usize);
    for r in lists {
        let (a, b) = r?;
        let self_conjugate = a.chi_index == b.chi_index;
        per_char.push(a);
        if !self_conjugate {
            per_char.push(b);
        }
    }
    debug_assert_eq!(per_char.len() as u64, q - 2);
    let phi_star = (q - 2) as f64;
    let mut n_avg_out = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let total: usize = per_char.iter().map(|z| z.count_beta_at_least(sigma)).sum();
        n_avg_out.push(total as f64 / phi_star);
    }
    let anchor_sigma = 0.5 - opts.delta_prime;
    let anchor =
        per_char.iter().map(|z| z.rect_count).sum::<usize>() as f64 / phi_star;
    let offline_total: usize = per_char.iter().map(|z| z.offline_pairs).sum();
    let mut xs = vec![anchor_sigma - 0.5];
    let mut ys = vec![anchor];
    xs.extend(sigmas.iter().map(|&s| s - 0.5));
    ys.extend(n_avg_out.iter().copied());
    let (fit_slope, _) = crate::util::linear_fit(&xs, &ys);
    let regime = sigmas
        .iter()
        .map(|&s| s >= 0.5 + 1.0 / (q as f64).ln())
        .collect();
    Ok(DensityTable {
        q,
        t1,
        t2,
        sigmas: sigmas.to_vec(),
        n_avg: n_avg_out,
        in_theorem_regime: regime,
        anchor_sigma,
        anchor_n_avg: anchor,
        offline_pairs_total: offline_total,
        fit_slope,
    })
}

// ---------------------------------------------------------------------------
// Zero location inside a rectangle (general holomorphic targets)
// ---------------------------------------------------------------------------

/// Locate the zeros of a holomorphic function in a rectangle by recursive
/// winding subdivision, polishing each isolated zero with a Newton iteration
/// on a finite-difference derivative.
pub fn locate_zeros_in_rect<F>(
    f: &F,
    sigma_lo: f64,
    sigma_hi: f64,
    t1: f64,
    t2: f64,
) -> Result<Vec<Complex64>>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut out = Vec::new();
    subdivide(f, sigma_lo, sigma_hi, t1, t2, &mut out, 0)?;
    out.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap());
    Ok(out)
}

fn subdivide<F>(
    f: &F,
    sigma_lo: f64,
    sigma_hi: f64,
    t1: f64,
    t2: f64,
    out: &mut Vec<Complex64>,
    depth: u32,
) -> Result<()>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let w = winding_number(f, sigma_lo, sigma_hi, t1, t2)?;
    if w == 0 {
        return Ok(());
    }
    let width = sigma_hi - sigma_lo;
    let height = t2 - t1;
    if (width.max(height) < 0.05 && w == 1) || depth > 40 {
        let center = Complex64::new(0.5 * (sigma_lo + sigma_hi), 0.5 * (t1 + t2));
        let z = newton_polish(f, center, width.max(height))?;
        for _ in 0..w {
            out.push(z);
        }
        return Ok(());
    }
    // Split along the longer side, retrying at shifted fractions when a zero
    // happens to sit on the cut line.
    let fracs = [0.5, 0.53819, 0.46180, 0.57, 0.43];
    let mut last = None;
    for &fr in &fracs {
        let mut attempt_out = Vec::new();
        let attempt = if width >= height {
            let mid = sigma_lo + fr * width;
            subdivide(f, sigma_lo, mid, t1, t2, &mut attempt_out, depth + 1).and_then(|_| {
                subdivide(f, mid, sigma_hi, t1, t2, &mut attempt_out, depth + 1)
            })
        } else {
            let mid = t1 + fr * height;
            subdivide(f, sigma_lo, sigma_hi, t1, mid, &mut attempt_out, depth + 1).and_then(|_| {
                subdivide(f, sigma_lo, sigma_hi, mid, t2, &mut attempt_out, depth + 1)
            })
        };
        match attempt {
            Ok(()) => {
                out.extend(attempt_out);
                return Ok(());
            }
            Err(e @ Error::ZeroOnBoundary { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one split attempted"))
}

fn newton_polish<F>(f: &F, start: Complex64, scale: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut z = start;
    let h = 1e-6 * (1.0 + scale);
    for _ in 0..60 {
        let fz = f(z)?;
        let d = (f(z + Complex64::new(h, 0.0))? - f(z - Complex64::new(h, 0.0))?) / (2.0 * h);
        if d.norm() == 0.0 {
            break;
        }
        let dz = fz / d;
        z -= dz;
        if dz.norm() < 1e-12 {
            return Ok(z);
        }
    }
    Err(Error::convergence(format!(
        "zero polish did not converge from {start}"
    )))
}

// ---------------------------------------------------------------------------
// Weighted zero-counting identity (sin·sinh against boundary integrals)
// ---------------------------------------------------------------------------

/// Both sides of the weighted identity
///   2(t2−t1) Σ_ρ sin(π(γ−t1)/(t2−t1)) sinh(π(β−σ′)/(t2−t1))
///     = ∫_{t1}^{t2} sin(π(t−t1)/(t2−t1)) ln|ω(σ′+it)| dt
///     + ∫_{σ′}^{∞} sinh(π(β−σ′)/(t2−t1)) (ln|ω(β+it1)| + ln|ω(β+it2)|) dβ
/// for ω holomorphic with ω → 1 faster than exp(−π Re(s)/(t2−t1)).
#[derive(Clone, Copy, Debug)]
pub struct SelbergCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// `log_abs_omega` must return ln|ω(s)| with RELATIVE precision even where
/// ω ≈ 1: the sinh weight amplifies any absolute noise floor exponentially.
/// Use [`log_abs_one_minus`] to build such closures. `beta_cut` truncates the
/// β-integral; pass None to auto-detect from the integrand envelope.
pub fn selberg_identity_check<F>(
    log_abs_omega: &F,
    zeros: &[Complex64],
    sigma_p: f64,
    t1: f64,
    t2: f64,
    quad_tol: f64,
    beta_cut: Option<f64>,
) -> Result<SelbergCheck>
where
    F: Fn(Complex64) -> Result<f64>,
{
    if t2 <= t1 {
        return Err(Error::domain("selberg_identity_check needs t2 > t1"));
    }
    let h = t2 - t1;
    let pi = std::f64::consts::PI;
    let lhs = 2.0
        * h
        * zeros
            .iter()
            .filter(|z| z.re >= sigma_p && z.im >= t1 && z.im <= t2)
            .map(|z| (pi * (z.im - t1) / h).sin() * (pi * (z.re - sigma_p) / h).sinh())
            .sum::<f64>();

    let log_abs = |s: Complex64| -> f64 { log_abs_omega(s).unwrap_or(f64::NAN) };
    let t_integral = adaptive_simpson(
        &|t: f64| (pi * (t - t1) / h).sin() * log_abs(Complex64::new(sigma_p, t)),
        t1,
        t2,
        quad_tol,
    )?;

    let beta_cut = match beta_cut {
        Some(b) => b,
        None => find_beta_cut(&log_abs, sigma_p, t1, t2, h)?,
    };
    let beta_integrand = |beta: f64| {
        (pi * (beta - sigma_p) / h).sinh()
            * (log_abs(Complex64::new(beta, t1)) + log_abs(Complex64::new(beta, t2)))
    };
    let beta_integral = adaptive_simpson(&beta_integrand, sigma_p, beta_cut, quad_tol)?;

    let rhs = t_integral + beta_integral;
    Ok(SelbergCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    })
}

/// March right in unit steps until the sinh-weighted |ln ω| envelope drops
/// below 1e−14 and keeps decreasing; errors if the growth condition fails.
fn find_beta_cut(
    log_abs: &dyn Fn(Complex64) -> f64,
    sigma_p: f64,
    t1: f64,
    t2: f64,
    h: f64,
) -> Result<f64> {
    let pi = std::f64::consts::PI;
    let env = |beta: f64| {
        (pi * (beta - sigma_p) / h).sinh().abs()
            * (log_abs(Complex64::new(beta, t1)).abs() + log_abs(Complex64::new(beta, t2)).abs())
    };
    let mut beta = sigma_p + 1.0;
    let mut decreasing_run = 0;
    let mut prev = f64::INFINITY;
    while beta < sigma_p + 400.0 {
        let e = env(beta);
        if !e.is_finite() {
            return Err(Error::convergence(format!(
                "omega not evaluable at beta = {beta}"
            )));
        }
        decreasing_run = if e < prev { decreasing_run + 1 } else { 0 };
        if e < 1e-14 && decreasing_run >= 3 {
            return Ok(beta);
        }
        prev = e;
        beta += 1.0;
    }
    Err(Error::convergence(
        "omega does not satisfy the decay hypothesis: sinh-weighted tail never fades",
    ))
}

/// ln|1 − x| to full relative precision also when |x| is tiny:
/// |1−x|² = 1 − 2 Re x + |x|², so ln|1−x| = ln1p(−2 Re x + |x|²)/2.
pub fn log_abs_one_minus(x: Complex64) -> f64 {
    let u = -2.0 * x.re + x.norm_sqr();
    if u > -0.5 {
        0.5 * u.ln_1p()
    } else {
        (Complex64::new(1.0, 0.0) - x).norm().ln()
    }
}

/// The closed-form test family ω(s) = 1 − a b^{−s} (a > 0, b > 1):
/// zeros at s = (ln a + 2πik)/ln b.
pub fn exponential_test_log_abs(a: f64, b: f64) -> impl Fn(Complex64) -> Result<f64> {
    move |s: Complex64| Ok(log_abs_one_minus(a * (-s * b.ln()).exp()))
}

/// All zeros of 1 − a b^{−s} inside [σ′, ∞) × [t1, t2].
pub fn exponential_test_zeros(a: f64, b: f64, sigma_p: f64, t1: f64, t2: f64) -> Vec<Complex64> {
    let beta0 = a.ln() / b.ln();
    let mut out = Vec::new();
    if beta0 < sigma_p {
        return out;
    }
    let spacing = 2.0 * std::f64::consts::PI / b.ln();
    let k_lo = (t1 / spacing).ceil() as i64;
    let k_hi = (t2 / spacing).floor() as i64;
    for k in k_lo..=k_hi {
        out.push(Complex64::new(beta0, k as f64 * spacing));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::CharacterTable;
    use crate::forms::HeckeForm;
    use crate::lfunc::TwistedL;
    use crate::util::SplitMix64;
    use std::sync::Arc;

    fn delta_pair(q: u64, j: u64) -> (TwistedL, TwistedL) {
        let form = HeckeForm::delta(60_000).unwrap();
        let table = CharacterTable::build(q).unwrap();
        let tl = TwistedL::new(Arc::clone(&form), table.character(j)).unwrap();
        let tl_bar = TwistedL::new(form, table.character(j).conjugate()).unwrap();
        (tl, tl_bar)
    }

    #[test]
    fn hardy_z_is_real_at_random_points() {
        let (tl, _) = delta_pair(101, 11);
        let mut rng = SplitMix64::new(8);
        for _ in 0..25 {
            let t = rng.range_f64(-8.0, 8.0);
            let z = hardy_z(&tl, t).unwrap();
            assert!(z.imag_ratio <= 1e-8, "t = {t}: ratio {}", z.imag_ratio);
        }
    }

    #[test]
    fn winding_closed_form_polynomial() {
        // (s − (1+i))(s − (1.5+2i)) has exactly two zeros in [0,2]×[0,3].
        let f =
            |s: Complex64| Ok((s - Complex64::new(1.0, 1.0)) * (s - Complex64::new(1.5, 2.0)));
        assert_eq!(winding_number(&f, 0.0, 2.0, 0.0, 3.0).unwrap(), 2);
        assert_eq!(winding_number(&f, 0.0, 2.0, 2.5, 3.0).unwrap(), 0);
        assert_eq!(winding_number(&f, 1.2, 2.0, 1.5, 2.5).unwrap(), 1);
        // double zero counts with multiplicity
        let g = |s: Complex64| {
            let d = s - Complex64::new(1.0, 1.0);
            Ok(d * d)
        };
        assert_eq!(winding_number(&g, 0.0, 2.0, 0.0, 2.0).unwrap(), 2);
    }

    #[test]
    fn locate_zeros_closed_form() {
        let f =
            |s: Complex64| Ok((s - Complex64::new(0.3, 0.7)) * (s - Complex64::new(1.1, 1.9)));
        let zs = locate_zeros_in_rect(&f, 0.0, 2.0, 0.0, 2.5).unwrap();
        assert_eq!(zs.len(), 2);
        assert!((zs[0] - Complex64::new(0.3, 0.7)).norm() < 1e-9);
        assert!((zs[1] - Complex64::new(1.1, 1.9)).norm() < 1e-9);
    }

    #[test]
    fn zero_free_rectangle_beyond_the_strip() {
        let (tl, _) = delta_pair(101, 5);
        assert_eq!(count_zeros_rectangle(&tl, 1.5, 3.0, 0.0, 10.0).unwrap(), 0);
        assert_eq!(count_zeros_rectangle(&tl, 1.01, 3.0, 2.0, 8.0).unwrap(), 0);
    }

    #[test]
    fn line_scan_and_audit_q101() {
        let (tl, tl_bar) = delta_pair(101, 17);
        let opts = ScanOptions::default();
        let (list, list_bar) = find_zeros_on_line(&tl, &tl_bar, 0.5, 4.5, opts).unwrap();
        // audit balanced with no off-line zeros at desk scale
        assert_eq!(list.offline_pairs + list_bar.offline_pairs, 0);
        assert_eq!(list.rect_count, list.ordinates.len());
        assert_eq!(list_bar.rect_count, list_bar.ordinates.len());
        assert!(!list.ordinates.is_empty());
        for w in list.ordinates.windows(2) {
            assert!(w[0] < w[1]);
        }
        // step-halving determinism
        let opts2 = ScanOptions {
            step: opts.step / 2.0,
            ..opts
        };
        let (list2, _) = find_zeros_on_line(&tl, &tl_bar, 0.5, 4.5, opts2).unwrap();
        assert_eq!(list.ordinates.len(), list2.ordinates.len());
        for (a, b) in list.ordinates.iter().zip(&list2.ordinates) {
            assert!((a - b).abs() < 2e-9);
        }
        // every reported zero re-evaluates tiny
        for &g in &list.ordinates {
            let z = hardy_z(&tl, g).unwrap();
            assert!(z.value.abs() < 1e-5, "Z({g}) = {}", z.value);
        }
    }

    #[test]
    fn density_profile_audit_driven_vs_direct() {
        let form = HeckeForm::delta(60_000).unwrap();
        let table = CharacterTable::build(53).unwrap();
        let profile = density_profile(
            &form,
            &table,
            0.5,
            2.5,
            &[0.52, 0.7, 0.9],
            ScanOptions::default(),
        )
        .unwrap();
        // monotone (set inclusion) and anchored above by the full strip count
        for w in profile.n_avg.windows(2) {
            assert!(w[0] >= w[1]);
        }
        assert!(profile.anchor_n_avg >= profile.n_avg[0]);
        assert!(profile.anchor_n_avg > 0.0);
        assert!(profile.fit_slope < 0.0);
        // the literal per-character winding agrees at one grid point
        let direct = n_avg(&form, &table, 0.9, 0.5, 2.5).unwrap();
        assert!((direct - profile.n_avg[2]).abs() < 1e-12);
        // σ below the theorem line still computes but is flagged
        assert!(!profile.in_theorem_regime[0] || (53f64.ln().recip() + 0.5) <= 0.52);
        // preconditions of the literal op
        assert!(n_avg(&form, &table, 0.51, 0.5, 2.5).is_err());
        assert!(n_avg(&form, &table, 0.9, 0.5, 0.6).is_err());
    }

    #[test]
    fn selberg_identity_closed_form() {
        // One zero in the window: a = 1/8, b = 8 puts it at s = −1, and
        // ln b = 2.079 > π/(t2−t1) = π/2 satisfies the decay hypothesis.
        let (a, b) = (0.125, 8.0);
        let omega = exponential_test_log_abs(a, b);
        let zeros = exponential_test_zeros(a, b, -2.0, -1.0, 1.0);
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let chk = selberg_identity_check(&omega, &zeros, -2.0, -1.0, 1.0, 1e-9, None).unwrap();
        let expect = 2.0 * 2.0 * (std::f64::consts::PI / 2.0).sinh();
        assert!((chk.lhs - expect).abs() < 1e-12);
        assert!(chk.residual <= 1e-6, "residual {}", chk.residual);
    }

    #[test]
    fn selberg_identity_zero_free_configuration() {
        // a b^{−σ′} < 1 on the whole half-plane right of σ′ ⇒ no zeros there.
        let (a, b) = (0.2, 9.0);
        let omega = exponential_test_log_abs(a, b);
        let zeros = exponential_test_zeros(a, b, 0.5, -1.0, 1.0);
        assert!(zeros.is_empty());
        let chk = selberg_identity_check(&omega, &zeros, 0.5, -1.0, 1.0, 1e-9, None).unwrap();
        assert_eq!(chk.lhs, 0.0);
        assert!(chk.residual <= 1e-6, "residual {}", chk.residual);
    }

    #[test]
    fn selberg_identity_random_family() {
        let mut rng = SplitMix64::new(31);
        for case in 0..6 {
            let h = rng.range_f64(1.2, 2.5);
            let t1 = rng.range_f64(-1.0, 0.2);
            let t2 = t1 + h;
            // decay margin: ln b ≥ π/h + 0.8
            let b = (std::f64::consts::PI / h + rng.range_f64(0.8, 1.8)).exp();
            let a = rng.range_f64(0.1, 3.0);
            let sigma_p = a.ln() / b.ln() - rng.range_f64(0.4, 1.5);
            let omega = exponential_test_log_abs(a, b);
            let zeros = exponential_test_zeros(a, b, sigma_p, t1, t2);
            let chk =
                selberg_identity_check(&omega, &zeros, sigma_p, t1, t2, 1e-9, None).unwrap();
            assert!(
                chk.residual <= 1e-6,
                "case {case}: a={a}, b={b}, window=({t1},{t2}), residual {}",
                chk.residual
            );
        }
    }

    #[test]
    fn log_abs_one_minus_precision() {
        // agrees with direct ln|1−x| at moderate x and stays relative at tiny x
        let x = Complex64::new(0.3, -0.2);
        let direct = (Complex64::new(1.0, 0.0) - x).norm().ln();
        assert!((log_abs_one_minus(x) - direct).abs() < 1e-14);
        let tiny = Complex64::new(3e-15, -4e-15);
        let expect = -tiny.re; // ln|1−x| ≈ −Re x
        assert!((log_abs_one_minus(tiny) - expect).abs() < 1e-16 * tiny.norm() / 1e-15);
    }
}
