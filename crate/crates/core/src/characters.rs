//! Dirichlet characters modulo an odd prime q.
//!
//! (ℤ/qℤ)* is cyclic of order q−1; fix the smallest primitive root g and let
//! ind(a) be the discrete log base g. The character of index j is
//! χ_j(a) = e(j·ind(a)/(q−1)). χ_0 is principal; every j = 1..q−2 is
//! primitive because q is prime, so φ*(q) = q−2.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::primes;

/// Group structure of (ℤ/qℤ)* with O(1) character evaluation.
#[derive(Debug)]
pub struct CharacterTable {
    q: u64,
    generator: u64,
    /// ind[a] for 1 ≤ a < q with g^{ind[a]} ≡ a; ind[0] is a sentinel.
    dlog: Vec<u32>,
    /// e(j/(q−1)) for 0 ≤ j < q−1.
    roots: Vec<Complex64>,
}

impl CharacterTable {
    /// Build the table for an odd prime q ≥ 3.
    pub fn build(q: u64) -> Result<Arc<CharacterTable>> {
        if q < 3 || q % 2 == 0 || !primes::is_prime(q) {
            return Err(Error::validation(format!(
                "modulus must be an odd prime, got {q}"
            )));
        }
        let generator = smallest_primitive_root(q);
        let order = (q - 1) as usize;
        let mut dlog = vec![u32::MAX; q as usize];
        let mut val = 1u64;
        for k in 0..order {
            dlog[val as usize] = k as u32;
            val = val * generator % q;
        }
        let step = 2.0 * std::f64::consts::PI / order as f64;
        let roots = (0..order)
            .map(|j| Complex64::from_polar(1.0, step * j as f64))
            .collect();
        Ok(Arc::new(CharacterTable {
            q,
            generator,
            dlog,
            roots,
        }))
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Number of primitive characters, φ*(q) = q − 2.
    pub fn phi_star(&self) -> u64 {
        self.q - 2
    }

    /// Discrete log of a (mod q), for a not divisible by q.
    pub fn ind(&self, a: u64) -> u32 {
        self.dlog[(a % self.q) as usize]
    }

    /// The character of index j ∈ [0, q−1).
    pub fn character(self: &Arc<Self>, index: u64) -> DirichletCharacter {
        assert!(index < self.q - 1, "character index out of range");
        DirichletCharacter {
            table: Arc::clone(self),
            index,
        }
    }

    /// The q−2 primitive characters, j = 1..=q−2 in index order.
    pub fn enumerate_primitive(self: &Arc<Self>) -> Vec<DirichletCharacter> {
        (1..self.q - 1).map(|j| self.character(j)).collect()
    }

    /// Rows (a, ind(a)) for the optional CSV dump.
    pub fn dlog_rows(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        (1..self.q).map(|a| (a, self.dlog[a as usize]))
    }
}

fn smallest_primitive_root(q: u64) -> u64 {
    let order = q - 1;
    let factors = primes::distinct_prime_factors(order);
    'candidate: for g in 2..q {
        for &p in &factors {
            if primes::pow_mod(g, order / p, q) == 1 {
                continue 'candidate;
            }
        }
        return g;
    }
    unreachable!("a prime modulus always has a primitive root")
}

/// One Dirichlet character. Cheap to clone; evaluation is pure table lookup.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    table: Arc<CharacterTable>,
    index: u64,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.table.q
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn table(&self) -> &Arc<CharacterTable> {
        &self.table
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    pub fn is_primitive(&self) -> bool {
        self.index != 0
    }

    /// χ(a): 0 when q | a, else e(j·ind(a)/(q−1)).
    pub fn value(&self, a: u64) -> Complex64 {
        let q = self.table.q;
        let r = a % q;
        if r == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let ind = self.table.dlog[r as usize] as u64;
        self.table.roots[((self.index * ind) % (q - 1)) as usize]
    }

    /// χ at a signed argument (χ(−1) decides parity).
    pub fn value_signed(&self, a: i64) -> Complex64 {
        let q = self.table.q as i64;
        let r = a.rem_euclid(q) as u64;
        self.value(r)
    }

    /// The conjugate character χ̄ = χ_{q−1−j}.
    pub fn conjugate(&self) -> DirichletCharacter {
        let order = self.table.q - 1;
        DirichletCharacter {
            table: Arc::clone(&self.table),
            index: (order - self.index) % order,
        }
    }

    /// Dense value table chi[a] for 0 ≤ a < q, for inner evaluation loops.
    pub fn value_table(&self) -> Vec<Complex64> {
        (0..self.table.q).map(|a| self.value(a)).collect()
    }

    /// Normalized Gauss sum ε_χ = q^{−1/2} Σ_a χ(a) e(a/q); requires primitivity.
    pub fn gauss_sum(&self) -> Result<Complex64> {
        if !self.is_primitive() {
            return Err(Error::domain(
                "gauss_sum: principal character is not primitive",
            ));
        }
        let q = self.table.q;
        let step = 2.0 * std::f64::consts::PI / q as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 1..q {
            acc += self.value(a) * Complex64::from_polar(1.0, step * a as f64);
        }
        Ok(acc / (q as f64).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::SplitMix64;

    #[test]
    fn rejects_composite_and_even() {
        assert!(CharacterTable::build(9).is_err());
        assert!(CharacterTable::build(2).is_err());
        assert!(CharacterTable::build(91).is_err());
    }

    #[test]
    fn q7_structure() {
        let t = CharacterTable::build(7).unwrap();
        assert_eq!(t.generator(), 3);
        assert_eq!(t.ind(2), 2); // 3² = 9 ≡ 2 (mod 7)
        assert_eq!(t.ind(1), 0);
        assert_eq!(t.phi_star(), 5);
        // χ_1(g) = e(1/6) = 1/2 + (√3/2) i
        let chi = t.character(1);
        let v = chi.value(3);
        assert!((v.re - 0.5).abs() < 1e-14);
        assert!((v.im - 0.75f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn q1009_smallest_root_is_11() {
        // Brute-force check of minimality before trusting the fast path.
        let q = 1009u64;
        let t = CharacterTable::build(q).unwrap();
        assert_eq!(t.generator(), 11);
        for g in 2..11u64 {
            let mut seen = std::collections::HashSet::new();
            let mut v = 1u64;
            for _ in 0..q - 1 {
                seen.insert(v);
                v = v * g % q;
            }
            assert!(seen.len() < (q - 1) as usize, "g = {g} should not generate");
        }
    }

    #[test]
    fn principal_character_is_one() {
        let t = CharacterTable::build(13).unwrap();
        let chi0 = t.character(0);
        for a in 1..13u64 {
            assert!((chi0.value(a) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        assert_eq!(chi0.value(26).norm(), 0.0);
    }

    #[test]
    fn quadratic_character_is_legendre_symbol() {
        let q = 7u64;
        let t = CharacterTable::build(q).unwrap();
        let chi = t.character((q - 1) / 2);
        for a in 1..q {
            let v = chi.value(a);
            assert!(v.im.abs() < 1e-14);
            let is_qr = (1..q).any(|b| b * b % q == a);
            let expect = if is_qr { 1.0 } else { -1.0 };
            assert!((v.re - expect).abs() < 1e-14, "a = {a}");
        }
    }

    #[test]
    fn multiplicativity_random_pairs() {
        for &q in &[11u64, 101, 499] {
            let t = CharacterTable::build(q).unwrap();
            let mut rng = SplitMix64::new(q);
            for _ in 0..1000 {
                let j = rng.below(q - 1);
                let chi = t.character(j);
                let a = 1 + rng.below(q - 1);
                let b = 1 + rng.below(q - 1);
                let lhs = chi.value(a * b);
                let rhs = chi.value(a) * chi.value(b);
                assert!((lhs - rhs).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn enumerate_primitive_counts_and_conjugates() {
        let t = CharacterTable::build(5).unwrap();
        let prims = t.enumerate_primitive();
        assert_eq!(prims.len(), 3);
        assert_eq!(prims[0].index(), 1);
        let t3 = CharacterTable::build(3).unwrap();
        assert_eq!(t3.enumerate_primitive().len(), 1);
        // χ and χ̄ sit at j and q−1−j.
        let chi = t.character(1);
        assert_eq!(chi.conjugate().index(), 3);
        for a in 1..5u64 {
            assert!((chi.conjugate().value(a) - chi.value(a).conj()).norm() < 1e-15);
        }
    }

    #[test]
    fn gauss_sum_q5_quadratic() {
        // τ(χ) = √5 for the quadratic character mod 5 (q ≡ 1 mod 4), so ε_χ = 1.
        let t = CharacterTable::build(5).unwrap();
        let chi = t.character(2);
        // direct 4-term sum oracle
        let e = |a: f64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * a / 5.0);
        let direct = (e(1.0) - e(2.0) - e(3.0) + e(4.0)) / 5f64.sqrt();
        let eps = chi.gauss_sum().unwrap();
        assert!((eps - direct).norm() < 1e-14);
        assert!((eps - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn gauss_sum_modulus_and_conjugation() {
        for &q in &[7u64, 31, 101] {
            let t = CharacterTable::build(q).unwrap();
            for chi in t.enumerate_primitive() {
                let eps = chi.gauss_sum().unwrap();
                assert!((eps.norm() - 1.0).abs() <= 1e-10, "q = {q}, j = {}", chi.index());
                // ε_χ ε_χ̄ = χ(−1)
                let prod = eps * chi.conjugate().gauss_sum().unwrap();
                let parity = chi.value_signed(-1);
                assert!((prod - parity).norm() <= 1e-10);
            }
        }
        let t = CharacterTable::build(11).unwrap();
        assert!(t.character(0).gauss_sum().is_err());
    }

    #[test]
    fn orthogonality_small() {
        let q = 11u64;
        let t = CharacterTable::build(q).unwrap();
        for m in 1..q {
            for n in 1..q {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..q - 1 {
                    let chi = t.character(j);
                    acc += chi.value(m) * chi.value(n).conj();
                }
                let expect = if m == n { (q - 1) as f64 } else { 0.0 };
                assert!((acc.re - expect).abs() < 1e-10 && acc.im.abs() < 1e-10);
            }
        }
    }
}
