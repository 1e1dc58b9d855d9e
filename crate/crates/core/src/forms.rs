//! The fixed holomorphic newform: integer Fourier coefficients, normalized
//! Hecke eigenvalues λ_f(n), the convolution inverse μ_f, and the prime-power
//! coefficients C_f(n) = α_f(p)^m + β_f(p)^m.
//!
//! The built-in form is Δ (weight 12, level 1): integer-exact coefficients,
//! trivial nebentypus, and (q, r) = 1 automatic for every odd prime q.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::primes;

/// Hard cap on coefficient-table memory (bytes across the working arrays).
const COEFF_MEMORY_CAP: usize = 1 << 31;

/// Ramanujan τ(1..=n_max) as exact integers, from the 24th power of the eta
/// series q ∏ (1 − q^n).
///
/// The eta factor is expanded by the pentagonal number theorem (it is sparse:
/// O(√n_max) nonzero coefficients), cubed, and the cube is raised to the 8th
/// power by repeated convolution against its own nonzero support. All
/// arithmetic is checked i128; an overflow reports as a resource error.
pub fn generate_delta_coefficients(n_max: usize) -> Result<Vec<i128>> {
    if n_max == 0 {
        return Err(Error::validation("n_max must be at least 1"));
    }
    if n_max.saturating_mul(16).saturating_mul(4) > COEFF_MEMORY_CAP {
        return Err(Error::resource(format!(
            "coefficient table for n_max = {n_max} exceeds the configured memory cap"
        )));
    }
    let deg = n_max - 1; // τ(n) is the degree n−1 coefficient of ∏(1−q^j)^24
    let eta = pentagonal_eta(deg);
    let eta_sparse = nonzeros(&eta);
    let e2 = sparse_mul(&eta, &eta_sparse, deg)?;
    let e3 = sparse_mul(&e2, &eta_sparse, deg)?;
    let e3_sparse = nonzeros(&e3);
    let mut p = e3.clone();
    for _ in 0..7 {
        p = sparse_mul(&p, &e3_sparse, deg)?;
    }
    Ok(p)
}

/// Coefficients of ∏_{j≥1} (1 − q^j) up to the given degree, by the
/// pentagonal number theorem.
fn pentagonal_eta(deg: usize) -> Vec<i128> {
    let mut e = vec![0i128; deg + 1];
    e[0] = 1;
    let mut k: u64 = 1;
    loop {
        let g1 = (k * (3 * k - 1) / 2) as usize;
        if g1 > deg {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        e[g1] = sign;
        let g2 = (k * (3 * k + 1) / 2) as usize;
        if g2 <= deg {
            e[g2] = sign;
        }
        k += 1;
    }
    e
}

fn nonzeros(series: &[i128]) -> Vec<(usize, i128)> {
    series
        .iter()
        .enumerate()
        .filter(|&(_, &v)| v != 0)
        .map(|(i, &v)| (i, v))
        .collect()
}

/// Truncated product of a dense series with a sparse one, checked.
fn sparse_mul(dense: &[i128], sparse: &[(usize, i128)], deg: usize) -> Result<Vec<i128>> {
    let mut out = vec![0i128; deg + 1];
    for &(off, v) in sparse {
        let limit = deg - off;
        for (i, &d) in dense.iter().enumerate().take(limit + 1) {
            if d == 0 {
                continue;
            }
            let prod = v
                .checked_mul(d)
                .ok_or_else(|| Error::resource("coefficient overflow in series product"))?;
            out[off + i] = out[off + i]
                .checked_add(prod)
                .ok_or_else(|| Error::resource("coefficient overflow in series product"))?;
        }
    }
    Ok(out)
}

/// Where the form's data came from, for report provenance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub enum FormSource {
    Builtin(String),
    File { path: String, sha256: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithmeticFunction {
    /// Convolution inverse of λ_f, supported on cube-free integers.
    MuF,
    /// C_f(n) = α^m + β^m on prime powers, 0 elsewhere.
    CF,
    /// Von Mangoldt Λ(n).
    VonMangoldt,
}

/// A dense table of one derived arithmetic function.
#[derive(Clone, Debug)]
pub struct ArithmeticFunctionTable {
    pub kind: ArithmeticFunction,
    /// values[n] for n ≤ n_max; entry 0 unused.
    pub values: Vec<f64>,
}

/// A holomorphic newform with trivial nebentypus: weight k, level r,
/// integer coefficients a(n) and normalized eigenvalues λ_f(n) = a(n)/n^{(k−1)/2}.
#[derive(Clone, Debug)]
pub struct HeckeForm {
    weight: u32,
    level: u64,
    eps: f64,
    n_max: usize,
    a: Vec<i128>,
    lambda: Vec<f64>,
    spf: Vec<u32>,
    source: FormSource,
}

impl HeckeForm {
    /// The built-in form Δ: weight 12, level 1, ε(f) = +1.
    pub fn delta(n_max: usize) -> Result<Arc<HeckeForm>> {
        let tau = generate_delta_coefficients(n_max)?;
        let mut a = vec![0i128; n_max + 1];
        a[1..].copy_from_slice(&tau);
        Ok(Arc::new(HeckeForm::assemble(
            12,
            1,
            1.0,
            a,
            FormSource::Builtin("delta".into()),
        )))
    }

    /// Resolve a form descriptor: the name "delta" or a path to a form file.
    pub fn resolve(descriptor: &str, n_max: usize) -> Result<Arc<HeckeForm>> {
        if descriptor == "delta" {
            HeckeForm::delta(n_max)
        } else {
            load_form(Path::new(descriptor), n_max)
        }
    }

    fn assemble(weight: u32, level: u64, eps: f64, a: Vec<i128>, source: FormSource) -> HeckeForm {
        let n_max = a.len() - 1;
        let kappa = (weight as f64 - 1.0) / 2.0;
        let mut lambda = vec![0.0; n_max + 1];
        for n in 1..=n_max {
            lambda[n] = a[n] as f64 / (n as f64).powf(kappa);
        }
        let spf = primes::smallest_prime_factor(n_max);
        HeckeForm {
            weight,
            level,
            eps,
            n_max,
            a,
            lambda,
            spf,
            source,
        }
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Gamma-shift κ = (k − 1)/2.
    pub fn kappa(&self) -> f64 {
        (self.weight as f64 - 1.0) / 2.0
    }

    /// Root number ε(f) of L(s, f).
    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn source(&self) -> &FormSource {
        &self.source
    }

    /// Identifier used in cache keys and report provenance.
    pub fn id(&self) -> String {
        match &self.source {
            FormSource::Builtin(name) => name.clone(),
            FormSource::File { sha256, .. } => format!("file-{}", &sha256[..16]),
        }
    }

    /// Trivial nebentypus χ_r at p: 1 for p ∤ r, 0 for p | r.
    pub fn chi_r(&self, p: u64) -> f64 {
        if self.level % p == 0 {
            0.0
        } else {
            1.0
        }
    }

    /// Raw integer coefficient a(n).
    pub fn raw(&self, n: u64) -> Result<i128> {
        self.check_range(n)?;
        Ok(self.a[n as usize])
    }

    /// Normalized eigenvalue λ_f(n).
    pub fn lambda(&self, n: u64) -> Result<f64> {
        self.check_range(n)?;
        Ok(self.lambda[n as usize])
    }

    /// The λ_f table as a slice indexed by n (entry 0 unused).
    pub fn lambda_table(&self) -> &[f64] {
        &self.lambda
    }

    pub fn spf(&self) -> &[u32] {
        &self.spf
    }

    fn check_range(&self, n: u64) -> Result<()> {
        if n == 0 || n as usize > self.n_max {
            return Err(Error::resource(format!(
                "n = {n} outside coefficient table (n_max = {})",
                self.n_max
            )));
        }
        Ok(())
    }

    /// Convolution inverse of λ_f: multiplicative with
    /// μ_f(p) = −λ_f(p), μ_f(p²) = χ_r(p), μ_f(p^m) = 0 for m ≥ 3.
    pub fn mu_f(&self, n: u64) -> Result<f64> {
        self.check_range(n)?;
        let mut out = 1.0;
        for (p, e) in primes::factorize(n as usize, &self.spf) {
            out *= match e {
                1 => -self.lambda(p)?,
                2 => self.chi_r(p),
                _ => return Ok(0.0),
            };
        }
        Ok(out)
    }

    /// C_f(n) = α_f(p)^m + β_f(p)^m when n = p^m, else 0.
    ///
    /// Power-sum recursion s_m = λ_f(p) s_{m−1} − χ_r(p) s_{m−2} with
    /// s_0 = 2, s_1 = λ_f(p); no root extraction.
    pub fn cf_coefficient(&self, n: u64) -> Result<f64> {
        if n == 1 {
            return Ok(0.0);
        }
        self.check_range(n)?;
        let Some((p, m)) = primes::prime_power(n, &self.spf) else {
            return Ok(0.0);
        };
        let lam = self.lambda(p)?;
        let chi_r = self.chi_r(p);
        let mut s_prev = 2.0;
        let mut s = lam;
        for _ in 1..m {
            let next = lam * s - chi_r * s_prev;
            s_prev = s;
            s = next;
        }
        Ok(s)
    }

    /// Bulk table of one derived arithmetic function.
    pub fn function_table(&self, kind: ArithmeticFunction, n_max: usize) -> Result<ArithmeticFunctionTable> {
        if n_max > self.n_max {
            return Err(Error::resource(format!(
                "table request {n_max} beyond coefficient table {}",
                self.n_max
            )));
        }
        let mut values = vec![0.0; n_max + 1];
        match kind {
            ArithmeticFunction::MuF => {
                for n in 1..=n_max {
                    values[n] = self.mu_f(n as u64)?;
                }
            }
            ArithmeticFunction::CF => {
                for n in 1..=n_max {
                    values[n] = self.cf_coefficient(n as u64)?;
                }
            }
            ArithmeticFunction::VonMangoldt => {
                values = primes::von_mangoldt_table(n_max, &self.spf);
            }
        }
        Ok(ArithmeticFunctionTable { kind, values })
    }

    /// Exact integer Deligne gate: a(n)² ≤ d(n)² n^{k−1} for all n ≤ limit.
    pub fn deligne_check(&self, limit: u64) -> Result<()> {
        let limit = limit.min(self.n_max as u64);
        let d = primes::divisor_count_table(limit as usize);
        for n in 1..=limit as usize {
            let lhs = BigInt::from(self.a[n]) * BigInt::from(self.a[n]);
            let dn = BigInt::from(d[n]);
            let rhs = &dn * &dn * BigInt::from(n).pow(self.weight - 1);
            if lhs > rhs {
                return Err(Error::validation(format!(
                    "Deligne bound violated at n = {n}: a(n) = {}",
                    self.a[n]
                )));
            }
        }
        Ok(())
    }
}

fn integer_from_json(v: &serde_json::Value) -> Option<i128> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(i as i128)
            } else {
                n.as_u64().map(|u| u as i128)
            }
        }
        serde_json::Value::String(s) => s.parse::<i128>().ok(),
        _ => None,
    }
}

/// Load a form file and extend its prime data to a full coefficient table.
///
/// Format: JSON object with "weight", "level", "nebentypus": "trivial",
/// "normalization": "arithmetic", "ap": [[p, a_p], ...] (a_p as number or
/// decimal string), optional "eps" (defaults to +1).
pub fn load_form(path: &Path, n_max: usize) -> Result<Arc<HeckeForm>> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::validation(format!("cannot read form file {}: {e}", path.display())))?;
    let sha256 = hex_digest(&bytes);
    let v: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Format(format!("form file is not valid JSON: {e}")))?;

    let weight = v["weight"]
        .as_u64()
        .ok_or_else(|| Error::validation("form file: missing or invalid \"weight\""))?;
    if weight == 0 || weight % 2 != 0 {
        return Err(Error::validation(format!(
            "form file: weight must be a positive even integer, got {weight}"
        )));
    }
    let level = v["level"]
        .as_u64()
        .ok_or_else(|| Error::validation("form file: missing or invalid \"level\""))?;
    if level == 0 {
        return Err(Error::validation("form file: level must be positive"));
    }
    match v["nebentypus"].as_str() {
        Some("trivial") => {}
        Some(other) => {
            return Err(Error::validation(format!(
                "nontrivial nebentypus \"{other}\" is unsupported"
            )))
        }
        None => return Err(Error::validation("form file: missing \"nebentypus\"")),
    }
    match v["normalization"].as_str() {
        Some("arithmetic") => {}
        other => {
            return Err(Error::validation(format!(
                "form file: normalization must be \"arithmetic\", got {other:?}"
            )))
        }
    }
    let eps = match &v["eps"] {
        serde_json::Value::Null => 1.0,
        x => x
            .as_f64()
            .ok_or_else(|| Error::validation("form file: \"eps\" must be a number"))?,
    };
    if (eps.abs() - 1.0).abs() > 1e-10 {
        return Err(Error::validation(format!(
            "form file: |eps| must be 1, got {eps}"
        )));
    }

    let ap_list = v["ap"]
        .as_array()
        .ok_or_else(|| Error::validation("form file: missing \"ap\" array"))?;
    let mut ap = std::collections::HashMap::new();
    for entry in ap_list {
        let pair = entry
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::validation(format!("form file: bad ap entry {entry}")))?;
        let p = pair[0]
            .as_u64()
            .filter(|&p| primes::is_prime(p))
            .ok_or_else(|| Error::validation(format!("form file: ap index {} is not prime", pair[0])))?;
        let a_p = integer_from_json(&pair[1])
            .ok_or_else(|| Error::validation(format!("form file: bad coefficient for p = {p}")))?;
        // Deligne gate at the prime: a(p)² ≤ d(p)² p^{k−1} = 4 p^{k−1}.
        let lhs = BigInt::from(a_p) * BigInt::from(a_p);
        let rhs = BigInt::from(4) * BigInt::from(p).pow(weight as u32 - 1);
        if lhs > rhs {
            return Err(Error::validation(format!(
                "form file: a({p}) = {a_p} violates the Deligne bound |lambda(p)| <= 2"
            )));
        }
        ap.insert(p, a_p);
    }

    // Every prime up to n_max must be present to extend the table.
    let plist = primes::primes_up_to(n_max as u64);
    for &p in &plist {
        if !ap.contains_key(&p) {
            return Err(Error::validation(format!(
                "form file: missing a(p) for prime p = {p} <= n_max = {n_max}"
            )));
        }
    }

    let a = extend_multiplicative(weight as u32, level, &ap, n_max)?;
    Ok(Arc::new(HeckeForm::assemble(
        weight as u32,
        level,
        eps,
        a,
        FormSource::File {
            path: path.display().to_string(),
            sha256,
        },
    )))
}

/// Fill a(1..=n_max) from prime data by the Hecke recursion and
/// multiplicativity:
///   a(p^{m+1}) = a(p) a(p^m) − χ_r(p) p^{k−1} a(p^{m−1})   (p ∤ r)
///   a(p^m)     = a(p)^m                                     (p | r)
fn extend_multiplicative(
    weight: u32,
    level: u64,
    ap: &std::collections::HashMap<u64, i128>,
    n_max: usize,
) -> Result<Vec<i128>> {
    let spf = primes::smallest_prime_factor(n_max);
    let mut a = vec![0i128; n_max + 1];
    a[1] = 1;
    let overflow = || Error::resource("coefficient overflow while extending Hecke data");
    for n in 2..=n_max {
        let p = spf[n] as u64;
        let mut pe = p as usize;
        let mut rest = n / pe as usize;
        while rest % p as usize == 0 {
            pe *= p as usize;
            rest /= p as usize;
        }
        if rest > 1 {
            // coprime split: a(n) = a(p^e) a(rest)
            a[n] = a[pe].checked_mul(a[rest]).ok_or_else(overflow)?;
            continue;
        }
        // n = p^e
        if pe == p as usize {
            a[n] = *ap
                .get(&p)
                .ok_or_else(|| Error::validation(format!("missing prime data for p = {p}")))?;
        } else if level % p == 0 {
            a[n] = a[pe / p as usize].checked_mul(a[p as usize]).ok_or_else(overflow)?;
        } else {
            let pk1 = (0..weight - 1).try_fold(1i128, |acc, _| acc.checked_mul(p as i128))
                .ok_or_else(overflow)?;
            let t1 = a[p as usize].checked_mul(a[pe / p as usize]).ok_or_else(overflow)?;
            let t2 = pk1
                .checked_mul(a[pe / (p * p) as usize])
                .ok_or_else(overflow)?;
            a[n] = t1.checked_sub(t2).ok_or_else(overflow)?;
        }
    }
    Ok(a)
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

// ---------------------------------------------------------------------------
// Coefficient cache
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CoeffCacheFile {
    format: String,
    form_id: String,
    weight: u32,
    level: u64,
    n_max: usize,
    sha256: String,
    a: Vec<String>,
}

/// What happened when the cache was consulted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Miss,
    Extended,
    CorruptRegenerated,
}

fn payload_digest(a: &[String]) -> String {
    let mut h = Sha256::new();
    for s in a {
        h.update(s.as_bytes());
        h.update(b",");
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Build Δ with a disk cache keyed by (form id, n_max).
///
/// A valid cache with n_max at least as large is reused after a checksum
/// verification; a shorter one is extended in place; a tampered file is
/// regenerated.
pub fn delta_cached(n_max: usize, cache_dir: &Path) -> Result<(Arc<HeckeForm>, CacheOutcome)> {
    std::fs::create_dir_all(cache_dir)?;
    let path = cache_dir.join("delta-coeffs.json");
    let mut outcome = CacheOutcome::Miss;
    if path.exists() {
        match read_cache(&path) {
            Ok(cache) if cache.n_max >= n_max => {
                let mut a = vec![0i128; n_max + 1];
                for (i, s) in cache.a.iter().take(n_max).enumerate() {
                    a[i + 1] = s
                        .parse::<i128>()
                        .map_err(|_| Error::Format(format!("bad cached coefficient {s}")))?;
                }
                let form = Arc::new(HeckeForm::assemble(
                    12,
                    1,
                    1.0,
                    a,
                    FormSource::Builtin("delta".into()),
                ));
                return Ok((form, CacheOutcome::Hit));
            }
            Ok(cache) => {
                // Shorter cache: extend, verifying the stored prefix.
                let tau = generate_delta_coefficients(n_max)?;
                for (i, s) in cache.a.iter().enumerate() {
                    if s.parse::<i128>().ok() != Some(tau[i]) {
                        return Err(Error::Format(format!(
                            "cache prefix mismatch at n = {}",
                            i + 1
                        )));
                    }
                }
                write_cache(&path, &tau)?;
                let mut a = vec![0i128; n_max + 1];
                a[1..].copy_from_slice(&tau);
                let form = Arc::new(HeckeForm::assemble(
                    12,
                    1,
                    1.0,
                    a,
                    FormSource::Builtin("delta".into()),
                ));
                return Ok((form, CacheOutcome::Extended));
            }
            Err(_) => {
                outcome = CacheOutcome::CorruptRegenerated;
            }
        }
    }
    let tau = generate_delta_coefficients(n_max)?;
    write_cache(&path, &tau)?;
    let mut a = vec![0i128; n_max + 1];
    a[1..].copy_from_slice(&tau);
    let form = Arc::new(HeckeForm::assemble(
        12,
        1,
        1.0,
        a,
        FormSource::Builtin("delta".into()),
    ));
    Ok((form, outcome))
}

fn read_cache(path: &Path) -> Result<CoeffCacheFile> {
    let bytes = std::fs::read(path)?;
    let cache: CoeffCacheFile =
        serde_json::from_slice(&bytes).map_err(|e| Error::Format(format!("corrupt cache: {e}")))?;
    if cache.format != "twistl-coeffs-v1" {
        return Err(Error::Format(format!("unknown cache format {}", cache.format)));
    }
    if payload_digest(&cache.a) != cache.sha256 {
        return Err(Error::Format("cache checksum mismatch".into()));
    }
    if cache.a.len() != cache.n_max {
        return Err(Error::Format("cache length mismatch".into()));
    }
    Ok(cache)
}

fn write_cache(path: &Path, tau: &[i128]) -> Result<()> {
    let a: Vec<String> = tau.iter().map(|v| v.to_string()).collect();
    let cache = CoeffCacheFile {
        format: "twistl-coeffs-v1".into(),
        form_id: "delta".into(),
        weight: 12,
        level: 1,
        n_max: a.len(),
        sha256: payload_digest(&a),
        a,
    };
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_vec(&cache).expect("cache serializes"))?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn tau_first_values() {
        // Frozen from the pentagonal-recurrence oracle (also classical values).
        let tau = generate_delta_coefficients(12).unwrap();
        assert_eq!(tau[0], 1);
        assert_eq!(tau[1], -24);
        assert_eq!(tau[2], 252);
        assert_eq!(tau[3], -1472);
        assert_eq!(tau[4], 4830);
        assert_eq!(tau[5], -6048);
        assert_eq!(tau[6], -16744);
        assert_eq!(tau[7], 84480);
        assert_eq!(tau[11], -370944);
    }

    #[test]
    fn tau_n_max_one() {
        assert_eq!(generate_delta_coefficients(1).unwrap(), vec![1]);
    }

    #[test]
    fn tau_multiplicativity_samples() {
        let tau = generate_delta_coefficients(1000).unwrap();
        let t = |n: usize| tau[n - 1];
        assert_eq!(t(6), t(2) * t(3));
        assert_eq!(t(10), t(2) * t(5));
        assert_eq!(t(15), t(3) * t(5));
        assert_eq!(t(994), t(2) * t(7) * t(71));
        // Hecke recursion at p = 2: τ(4) = τ(2)² − 2^11.
        assert_eq!(t(4), t(2) * t(2) - (1 << 11));
        assert_eq!(t(8), t(2) * t(4) - (1 << 11) * t(2));
    }

    #[test]
    fn memory_cap_enforced() {
        assert!(matches!(
            generate_delta_coefficients(1 << 30),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn lambda_normalization() {
        let f = HeckeForm::delta(100).unwrap();
        assert_eq!(f.lambda(1).unwrap(), 1.0);
        // λ(2) = −24 / 2^5.5
        let expect = -24.0 / 2f64.powf(5.5);
        assert!((f.lambda(2).unwrap() - expect).abs() < 1e-15);
        // λ(4) = λ(2)² − 1 = τ(4)/4^5.5 ≈ −0.71875
        let l4 = f.lambda(4).unwrap();
        assert!((l4 - (-1472.0 / 4f64.powf(5.5))).abs() < 1e-12);
        assert!((l4 - (-0.71875)).abs() < 1e-10);
        // multiplicativity: λ(12) = λ(4) λ(3)
        let err = f.lambda(12).unwrap() - l4 * f.lambda(3).unwrap();
        assert!(err.abs() < 1e-14);
    }

    #[test]
    fn mu_f_values() {
        let f = HeckeForm::delta(100).unwrap();
        assert_eq!(f.mu_f(1).unwrap(), 1.0);
        // μ_f(4) = χ_r(2) = 1; check against the convolution equation at 4:
        // λ(4)μ(1) + λ(2)μ(2) + λ(1)μ(4) = 0 with μ(2) = −λ(2).
        let solve = -(f.lambda(4).unwrap() - f.lambda(2).unwrap().powi(2));
        assert!((f.mu_f(4).unwrap() - 1.0).abs() < 1e-12);
        assert!((solve - 1.0).abs() < 1e-12);
        assert_eq!(f.mu_f(8).unwrap(), 0.0);
        assert_eq!(f.mu_f(27).unwrap(), 0.0);
    }

    #[test]
    fn dirichlet_convolution_identity() {
        let f = HeckeForm::delta(2000).unwrap();
        for n in 1u64..=2000 {
            let mut s = 0.0;
            for d in 1..=n {
                if n % d == 0 {
                    s += f.lambda(d).unwrap() * f.mu_f(n / d).unwrap();
                }
            }
            let expect = if n == 1 { 1.0 } else { 0.0 };
            assert!((s - expect).abs() < 1e-12, "n = {n}: {s}");
        }
    }

    #[test]
    fn cf_coefficient_examples() {
        let f = HeckeForm::delta(200).unwrap();
        assert_eq!(f.cf_coefficient(6).unwrap(), 0.0);
        assert_eq!(f.cf_coefficient(1).unwrap(), 0.0);
        // C_f(p) = λ_f(p)
        assert!((f.cf_coefficient(3).unwrap() - f.lambda(3).unwrap()).abs() < 1e-15);
        // C_f(p²) = λ_f(p²) − χ_r(p)
        let c4 = f.cf_coefficient(4).unwrap();
        assert!((c4 - (f.lambda(4).unwrap() - 1.0)).abs() < 1e-13);
        assert!((c4 - (f.lambda(2).unwrap().powi(2) - 2.0)).abs() < 1e-13);
        assert!((c4 - (-1.71875)).abs() < 1e-10);
    }

    #[test]
    fn cf_power_sum_vs_explicit_roots() {
        let f = HeckeForm::delta(100_000 / 10).unwrap();
        for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97] {
            let lam = f.lambda(p).unwrap();
            let disc = Complex64::new(lam * lam - 4.0, 0.0).sqrt();
            let alpha = (Complex64::new(lam, 0.0) + disc) / 2.0;
            let beta = (Complex64::new(lam, 0.0) - disc) / 2.0;
            for m in 1..=12u32 {
                if p.pow(m) as usize > f.n_max() {
                    break;
                }
                let direct = (alpha.powu(m) + beta.powu(m)).re;
                let rec = f.cf_coefficient(p.pow(m)).unwrap();
                assert!((direct - rec).abs() < 1e-12, "p = {p}, m = {m}");
                assert!(rec.abs() <= 2.0 + 1e-12, "|C_f| <= 2 at p = {p}, m = {m}");
            }
        }
    }

    #[test]
    fn deligne_gate_small() {
        let f = HeckeForm::delta(5000).unwrap();
        f.deligne_check(5000).unwrap();
    }

    #[test]
    fn function_tables_match_point_ops() {
        let f = HeckeForm::delta(500).unwrap();
        let mu = f.function_table(ArithmeticFunction::MuF, 500).unwrap();
        let cf = f.function_table(ArithmeticFunction::CF, 500).unwrap();
        let vm = f.function_table(ArithmeticFunction::VonMangoldt, 500).unwrap();
        for n in 1..=500u64 {
            assert_eq!(mu.values[n as usize], f.mu_f(n).unwrap());
            assert_eq!(cf.values[n as usize], f.cf_coefficient(n).unwrap());
        }
        // μ_f supported on cube-free integers; C_f on prime powers
        assert_eq!(mu.values[8], 0.0);
        assert_eq!(cf.values[6], 0.0);
        assert!((vm.values[9] - 3f64.ln()).abs() < 1e-15);
        assert!(f.function_table(ArithmeticFunction::MuF, 501).is_err());
    }

    #[test]
    fn form_file_roundtrip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("delta.json");
        let delta = HeckeForm::delta(100).unwrap();
        let ap: Vec<serde_json::Value> = primes::primes_up_to(100)
            .iter()
            .map(|&p| serde_json::json!([p, delta.raw(p).unwrap().to_string()]))
            .collect();
        let file = serde_json::json!({
            "weight": 12,
            "level": 1,
            "nebentypus": "trivial",
            "normalization": "arithmetic",
            "ap": ap,
        });
        std::fs::write(&path, serde_json::to_vec(&file).unwrap()).unwrap();
        let loaded = load_form(&path, 100).unwrap();
        assert_eq!(loaded.weight(), 12);
        // λ_f(96) from the file path equals the generated table value.
        assert!((loaded.lambda(96).unwrap() - delta.lambda(96).unwrap()).abs() < 1e-15);
        for n in 1..=100u64 {
            assert_eq!(loaded.raw(n).unwrap(), delta.raw(n).unwrap(), "n = {n}");
        }

        // Deligne-violating a(2): |a(2)| must be ≤ 2·2^5.5 ≈ 90.5.
        let bad = serde_json::json!({
            "weight": 12, "level": 1, "nebentypus": "trivial",
            "normalization": "arithmetic", "ap": [[2, 91]],
        });
        std::fs::write(&path, serde_json::to_vec(&bad).unwrap()).unwrap();
        let err = load_form(&path, 2).unwrap_err();
        assert!(err.to_string().contains("Deligne"), "{err}");

        // Nontrivial nebentypus is rejected.
        let bad = serde_json::json!({
            "weight": 12, "level": 5, "nebentypus": "quadratic",
            "normalization": "arithmetic", "ap": [[2, 0]],
        });
        std::fs::write(&path, serde_json::to_vec(&bad).unwrap()).unwrap();
        assert!(load_form(&path, 2).is_err());

        // Missing prime below n_max is caught and named.
        let bad = serde_json::json!({
            "weight": 12, "level": 1, "nebentypus": "trivial",
            "normalization": "arithmetic", "ap": [[2, -24]],
        });
        std::fs::write(&path, serde_json::to_vec(&bad).unwrap()).unwrap();
        let err = load_form(&path, 10).unwrap_err();
        assert!(err.to_string().contains("p = 3"), "{err}");
    }

    #[test]
    fn cache_roundtrip_extension_and_tamper() {
        let dir = tempfile::tempdir().unwrap();
        let (f1, o1) = delta_cached(50, dir.path()).unwrap();
        assert_eq!(o1, CacheOutcome::Miss);
        let (f2, o2) = delta_cached(50, dir.path()).unwrap();
        assert_eq!(o2, CacheOutcome::Hit);
        assert_eq!(f1.raw(50).unwrap(), f2.raw(50).unwrap());

        let (f3, o3) = delta_cached(80, dir.path()).unwrap();
        assert_eq!(o3, CacheOutcome::Extended);
        assert_eq!(f3.raw(30).unwrap(), f1.raw(30).unwrap());
        let (_, o4) = delta_cached(60, dir.path()).unwrap();
        assert_eq!(o4, CacheOutcome::Hit);

        // Tamper: flip a stored digit; the checksum must catch it.
        let path = dir.path().join("delta-coeffs.json");
        let text = std::fs::read_to_string(&path).unwrap();
        let tampered = text.replace("\"-24\"", "\"-25\"");
        assert_ne!(text, tampered);
        std::fs::write(&path, tampered).unwrap();
        let (f5, o5) = delta_cached(60, dir.path()).unwrap();
        assert_eq!(o5, CacheOutcome::CorruptRegenerated);
        assert_eq!(f5.raw(2).unwrap(), -24);
    }
}
