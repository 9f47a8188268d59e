//! Prime-power fields `GF(p^d)` in polynomial basis.
//!
//! An element is stored as its integer code `sum c_i p^i`, where `c_i` is the
//! coefficient of `x^i` in the polynomial representative. The modulus is the
//! lowest monic irreducible polynomial of degree `d` over `F_p`, ordered by the
//! integer code of its lower coefficients, so every `(p, d)` yields the same
//! field on every run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order handled by the toolkit.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;
/// Fields up to this order get log/antilog multiplication tables.
pub const LOG_TABLE_LIMIT: u32 = 1 << 16;
const ADD_TABLE_LIMIT: u32 = 1 << 10;

/// Compact identifier `(p, d)` of a field. The modulus is a function of it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldId {
    pub p: u32,
    pub degree: u32,
}

impl FieldId {
    pub fn order(&self) -> u32 {
        self.p.pow(self.degree)
    }
}

impl std::fmt::Display for FieldId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF({}^{})", self.p, self.degree)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
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

/// Polynomials over `F_p` as coefficient vectors, lowest degree first.
pub(crate) mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap();
            let shift = r.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                let sub = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn from_code(mut code: u64, p: u32, len: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push((code % p as u64) as u32);
            code /= p as u64;
        }
        out
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        if deg == 0 || f[deg] != 1 {
            return false;
        }
        for d in 1..=deg / 2 {
            let count = (p as u64).pow(d as u32);
            for code in 0..count {
                let mut g = from_code(code, p, d);
                g.push(1);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }

    /// Lowest monic irreducible polynomial of the given degree.
    pub fn lowest_irreducible(p: u32, degree: u32) -> Vec<u32> {
        let count = (p as u64).pow(degree);
        for code in 0..count {
            let mut f = from_code(code, p, degree as usize);
            f.push(1);
            if is_irreducible(&f, p) {
                return f;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}

/// The finite field `GF(p^d)`.
#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    degree: u32,
    order: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Vec<u32>,
    generator: u32,
}

impl std::fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaloisField")
            .field("p", &self.p)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl GaloisField {
    /// The field with the canonical (lowest irreducible) modulus.
    pub fn new(p: u32, degree: u32) -> Result<Self> {
        Self::check_envelope(p, degree)?;
        let modulus = fp_poly::lowest_irreducible(p, degree);
        Self::build(p, degree, modulus)
    }

    /// The field defined by an explicit monic modulus (lowest degree first).
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::NotIrreducible(0));
        }
        let degree = (modulus.len() - 1) as u32;
        Self::check_envelope(p, degree)?;
        if modulus.iter().any(|&c| c >= p) || !fp_poly::is_irreducible(&modulus, p) {
            return Err(Error::NotIrreducible(degree));
        }
        Self::build(p, degree, modulus)
    }

    fn check_envelope(p: u32, degree: u32) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if degree == 0 {
            return Err(Error::InvalidParameter("field degree must be positive".into()));
        }
        match (p as u64).checked_pow(degree) {
            Some(n) if n <= MAX_FIELD_ORDER => Ok(()),
            _ => Err(Error::FieldTooLarge { p, degree }),
        }
    }

    fn build(p: u32, degree: u32, modulus: Vec<u32>) -> Result<Self> {
        let order = p.pow(degree);
        let pow_p = (0..=degree).map(|i| p.pow(i)).collect();
        let mut field = GaloisField {
            p,
            degree,
            order,
            modulus,
            pow_p,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: Vec::new(),
            generator: 0,
        };
        field.generator = field.find_generator();
        if order <= LOG_TABLE_LIMIT {
            let n = (order - 1) as usize;
            let mut exp = vec![0u32; 2 * n.max(1)];
            let mut log = vec![0u32; order as usize];
            let mut x = 1u32;
            for i in 0..n {
                exp[i] = x;
                exp[i + n] = x;
                log[x as usize] = i as u32;
                x = field.mul_schoolbook(x, field.generator);
            }
            field.exp = exp;
            field.log = log;
        }
        if p != 2 && order <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (order * order) as usize];
            for a in 0..order {
                for b in 0..order {
                    table[(a * order + b) as usize] = field.add_digitwise(a, b);
                }
            }
            field.add_table = table;
        }
        Ok(field)
    }

    fn find_generator(&self) -> u32 {
        if self.order == 2 {
            return 1;
        }
        let n = (self.order - 1) as u64;
        let factors = prime_factors(n);
        (2..self.order)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&r| self.pow_schoolbook(g, n / r) != 1)
            })
            .expect("multiplicative group is cyclic")
    }

    pub fn id(&self) -> FieldId {
        FieldId {
            p: self.p,
            degree: self.degree,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Modulus coefficients, lowest degree first, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// A generator of the multiplicative group.
    pub fn generator(&self) -> u32 {
        self.generator
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.order
    }

    /// Coefficient of `x^i` in the representative of `a`.
    #[inline]
    pub fn digit(&self, a: u32, i: u32) -> u32 {
        a / self.pow_p[i as usize] % self.p
    }

    pub fn digits(&self, a: u32) -> Vec<u32> {
        (0..self.degree).map(|i| self.digit(a, i)).collect()
    }

    pub fn from_digits(&self, digits: &[u32]) -> u32 {
        digits
            .iter()
            .enumerate()
            .map(|(i, &d)| (d % self.p) * self.pow_p[i])
            .sum()
    }

    fn add_digitwise(&self, mut a: u32, mut b: u32) -> u32 {
        let p = self.p;
        let mut out = 0;
        for i in 0..self.degree as usize {
            out += ((a % p + b % p) % p) * self.pow_p[i];
            a /= p;
            b /= p;
        }
        out
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            a ^ b
        } else if !self.add_table.is_empty() {
            self.add_table[(a * self.order + b) as usize]
        } else {
            self.add_digitwise(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut x = a;
        let mut out = 0;
        for i in 0..self.degree as usize {
            out += ((p - x % p) % p) * self.pow_p[i];
            x /= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        if !self.log.is_empty() {
            return self.exp[(self.log[a as usize] + self.log[b as usize]) as usize];
        }
        self.mul_schoolbook(a, b)
    }

    fn mul_schoolbook(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let d = self.degree as usize;
        if self.p == 2 {
            let mut prod: u64 = 0;
            for i in 0..d {
                if (b >> i) & 1 == 1 {
                    prod ^= (a as u64) << i;
                }
            }
            let m = self.from_digits(&self.modulus[..d]) as u64 | (1u64 << d);
            for i in (d..2 * d).rev() {
                if (prod >> i) & 1 == 1 {
                    prod ^= m << (i - d);
                }
            }
            return prod as u32;
        }
        let p = self.p as u64;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for i in (d..prod.len()).rev() {
            let lead = prod[i];
            if lead == 0 {
                continue;
            }
            for (k, &c) in self.modulus.iter().enumerate() {
                let idx = i - d + k;
                prod[idx] = (prod[idx] + p * p - lead * c as u64) % p;
            }
        }
        let digits: Vec<u32> = prod[..d].iter().map(|&x| x as u32).collect();
        self.from_digits(&digits)
    }

    fn pow_schoolbook(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_schoolbook(acc, base);
            }
            base = self.mul_schoolbook(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^e` by square-and-multiply; `0^0 = 1`.
    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        if !self.log.is_empty() {
            let n = self.order - 1;
            return Ok(self.exp[((n - self.log[a as usize]) % n) as usize]);
        }
        Ok(self.pow(a, self.order as u64 - 2))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Embeds a prime-field integer.
    pub fn from_int(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: u32) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut ord = (self.order - 1) as u64;
        for r in prime_factors(ord) {
            while ord % r == 0 && self.pow(a, ord / r) == 1 {
                ord /= r;
            }
        }
        Ok(ord)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f4_defining_relation() {
        let f = GaloisField::new(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        let w = 2; // x
        assert_eq!(f.mul(w, w), 3); // w + 1
        assert_eq!(f.inv(1).unwrap(), 1);
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(GaloisField::new(2, 4).unwrap().modulus(), &[1, 1, 0, 0, 1]);
        assert_eq!(GaloisField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        // x^2 + 1 is irreducible over F_3 and has the lowest code
        assert_eq!(GaloisField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn group_order_annihilates() {
        let f = GaloisField::new(2, 4).unwrap();
        for a in 1..16 {
            assert_eq!(f.pow(a, 15), 1);
        }
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = GaloisField::new(3, 3).unwrap();
        assert_eq!(f.inv(0), Err(Error::DivisionByZero));
    }

    #[test]
    fn rejects_oversized_and_composite() {
        assert!(matches!(GaloisField::new(2, 21), Err(Error::FieldTooLarge { .. })));
        assert_eq!(GaloisField::new(4, 2).unwrap_err(), Error::NotPrime(4));
        assert!(GaloisField::with_modulus(2, vec![1, 0, 1]).is_err());
    }

    #[test]
    fn table_and_schoolbook_agree() {
        for &(p, d) in &[(2, 5), (3, 3), (5, 2), (7, 2)] {
            let f = GaloisField::new(p, d).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul_schoolbook(a, b));
                }
            }
        }
    }

    #[test]
    fn schoolbook_field_beyond_table_limit() {
        let f = GaloisField::new(2, 17).unwrap();
        let g = f.generator();
        assert_eq!(f.pow(g, (f.order() - 1) as u64), 1);
        let a = 12345;
        assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        let f3 = GaloisField::new(3, 11).unwrap();
        let b = 98765;
        assert_eq!(f3.mul(b, f3.inv(b).unwrap()), 1);
        assert_eq!(f3.add(b, f3.neg(b)), 0);
    }

    #[test]
    fn field_axioms_small_odd() {
        let f = GaloisField::new(3, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), 0);
            for b in f.elements() {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in f.elements() {
                    assert_eq!(
                        f.mul(a, f.add(b, c)),
                        f.add(f.mul(a, b), f.mul(a, c))
                    );
                }
            }
        }
    }
}
