//! Prime sieving, primality testing, and the small arithmetic functions
//! (divisor counts, von Mangoldt) the rest of the crate leans on.

/// Primes up to `n` inclusive, by sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for 0..=n; `spf[0] = spf[1] = 0`.
pub fn smallest_prime_factor(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut m = i;
            while m <= n {
                if spf[m] == 0 {
                    spf[m] = i as u32;
                }
                m += i;
            }
        }
    }
    spf
}

/// Factor `n` into (prime, exponent) pairs using a precomputed spf table.
pub fn factorize(mut n: usize, spf: &[u32]) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    while n > 1 {
        let p = spf[n] as usize;
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        out.push((p as u64, e));
    }
    out
}

/// Divisor-count table d(0..=n) (d[0] = 0).
pub fn divisor_count_table(n: usize) -> Vec<u32> {
    let mut d = vec![0u32; n + 1];
    for i in 1..=n {
        let mut m = i;
        while m <= n {
            d[m] += 1;
            m += i;
        }
    }
    d
}

/// Von Mangoldt table: Λ(n) = log p when n = p^m, else 0.
pub fn von_mangoldt_table(n: usize, spf: &[u32]) -> Vec<f64> {
    let mut lam = vec![0.0; n + 1];
    for i in 2..=n {
        let p = spf[i] as usize;
        let mut m = i;
        while m % p == 0 {
            m /= p;
        }
        if m == 1 {
            lam[i] = (p as f64).ln();
        }
    }
    lam
}

/// If `n = p^m` for a prime p, return `(p, m)`.
pub fn prime_power(n: u64, spf: &[u32]) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = spf[n as usize] as u64;
    let mut m = 0;
    let mut r = n;
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    if r == 1 {
        Some((p, m))
    } else {
        None
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for u64 (the 12-base set covers all of u64).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of n by trial division (n fits comfortably in u64
/// here; used for group orders q−1).
pub fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
    }

    #[test]
    fn pi_of_100_is_25() {
        assert_eq!(primes_up_to(100).len(), 25);
        assert_eq!(primes_up_to(997).len(), 168);
    }

    #[test]
    fn divisor_counts() {
        let d = divisor_count_table(12);
        assert_eq!(d[1], 1);
        assert_eq!(d[6], 4);
        assert_eq!(d[12], 6);
    }

    #[test]
    fn von_mangoldt_support() {
        let spf = smallest_prime_factor(32);
        let lam = von_mangoldt_table(32, &spf);
        assert!((lam[8] - 2f64.ln()).abs() < 1e-15);
        assert_eq!(lam[6], 0.0);
        assert!((lam[31] - 31f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn prime_power_detection() {
        let spf = smallest_prime_factor(1000);
        assert_eq!(prime_power(243, &spf), Some((3, 5)));
        assert_eq!(prime_power(12, &spf), None);
        assert_eq!(prime_power(97, &spf), Some((97, 1)));
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let ps = primes_up_to(3000);
        for n in 2..=3000u64 {
            assert_eq!(is_prime(n), ps.binary_search(&n).is_ok(), "n = {n}");
        }
        assert!(is_prime(1_000_003));
        assert!(!is_prime((1 << 61) - 2));
    }

    #[test]
    fn factorization_roundtrip() {
        let spf = smallest_prime_factor(5000);
        for n in 2..5000usize {
            let f = factorize(n, &spf);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n as u64);
        }
    }
}
