//! The relative extension `F_q ⊂ F_{q^m}`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::galois::{fp_poly, GaloisField, MAX_FIELD_ORDER};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

const NOT_IN_SUBFIELD: u32 = u32::MAX;

/// Serializable description `{p, h, m, modulus_small, modulus_big}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescription {
    pub p: u32,
    pub h: u32,
    pub m: u32,
    pub modulus_small: Vec<u32>,
    pub modulus_big: Vec<u32>,
}

/// `F_q = GF(p^h)` embedded in `F_{q^m} = GF(p^{hm})`, both in polynomial basis.
///
/// Elements of either field are integer codes (see [`GaloisField`]). The tower
/// also fixes an `F_q`-basis `1, β, …, β^{m-1}` of `F_{q^m}`: for `h = 1` this is
/// the polynomial basis; otherwise `β` is the smallest code generating the
/// extension. Coordinates "over `F_q`" are always taken in this basis unless a
/// basis is passed explicitly.
pub struct FieldTower {
    p: u32,
    h: u32,
    q: u32,
    m: u32,
    small: GaloisField,
    big: GaloisField,
    embedding: Vec<u32>,
    restriction: Vec<u32>,
    frob: Vec<u32>,
    basis: Vec<u32>,
    coords: Vec<u32>,
}

impl std::fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldTower(F_{}^{} over F_{})", self.q, self.m, self.q)
    }
}

impl PartialEq for FieldTower {
    fn eq(&self, other: &Self) -> bool {
        self.description() == other.description()
    }
}

impl Eq for FieldTower {}

impl FieldTower {
    /// Tower with the canonical moduli for `q = p^h`.
    pub fn new(p: u32, h: u32, m: u32) -> Result<Arc<Self>> {
        Self::check(p, h, m)?;
        let small = GaloisField::new(p, h)?;
        let big = GaloisField::new(p, h * m)?;
        Ok(Arc::new(Self::assemble(p, h, m, small, big)?))
    }

    /// Tower for a prime power `q`.
    pub fn for_q(q: u32, m: u32) -> Result<Arc<Self>> {
        let (p, h) = prime_power(q)
            .ok_or_else(|| Error::InvalidParameter(format!("{q} is not a prime power")))?;
        Self::new(p, h, m)
    }

    pub fn from_description(d: &FieldDescription) -> Result<Arc<Self>> {
        Self::check(d.p, d.h, d.m)?;
        let small = GaloisField::with_modulus(d.p, d.modulus_small.clone())?;
        let big = GaloisField::with_modulus(d.p, d.modulus_big.clone())?;
        if small.degree() != d.h || big.degree() != d.h * d.m {
            return Err(Error::InvalidParameter("modulus degrees do not match (h, m)".into()));
        }
        Ok(Arc::new(Self::assemble(d.p, d.h, d.m, small, big)?))
    }

    fn check(p: u32, h: u32, m: u32) -> Result<()> {
        if h == 0 || m == 0 {
            return Err(Error::InvalidParameter("h and m must be positive".into()));
        }
        match (p as u64).checked_pow(h * m) {
            Some(n) if n <= MAX_FIELD_ORDER => Ok(()),
            _ => Err(Error::FieldTooLarge { p, degree: h * m }),
        }
    }

    fn assemble(p: u32, h: u32, m: u32, small: GaloisField, big: GaloisField) -> Result<Self> {
        let q = small.order();
        let n = big.order();

        let embedding: Vec<u32> = if h == 1 {
            (0..p).collect()
        } else {
            let root = big
                .elements()
                .find(|&a| eval_poly(&big, small.modulus(), a) == 0)
                .expect("F_{q^m} contains a root of the F_q modulus");
            let powers: Vec<u32> = (0..h).map(|i| big.pow(root, i as u64)).collect();
            small
                .elements()
                .map(|c| {
                    (0..h).fold(0, |acc, i| {
                        let d = small.digit(c, i);
                        let term = big.mul(big.from_int(d as i64), powers[i as usize]);
                        big.add(acc, term)
                    })
                })
                .collect()
        };
        let mut restriction = vec![NOT_IN_SUBFIELD; n as usize];
        for (c, &e) in embedding.iter().enumerate() {
            restriction[e as usize] = c as u32;
        }

        let frob: Vec<u32> = big.elements().map(|a| big.pow(a, q as u64)).collect();

        let beta = if m == 1 {
            1
        } else if h == 1 {
            p
        } else {
            let proper: Vec<u32> = (1..m).filter(|d| m % d == 0).collect();
            big.elements()
                .find(|&b| {
                    proper.iter().all(|&d| {
                        let mut x = b;
                        for _ in 0..d {
                            x = frob[x as usize];
                        }
                        x != b
                    })
                })
                .expect("a generator of F_{q^m} over F_q exists")
        };
        let basis: Vec<u32> = (0..m).map(|j| big.pow(beta, j as u64)).collect();

        let mut coords = Vec::new();
        if h > 1 {
            coords = vec![0u32; (n * m) as usize];
            let total = (q as u64).pow(m);
            for code in 0..total {
                let digits = fp_poly::from_code(code, q, m as usize);
                let mut a = 0;
                for (j, &c) in digits.iter().enumerate() {
                    a = big.add(a, big.mul(embedding[c as usize], basis[j]));
                }
                coords[(a * m) as usize..((a + 1) * m) as usize].copy_from_slice(&digits);
            }
        }

        let tower = FieldTower {
            p,
            h,
            q,
            m,
            small,
            big,
            embedding,
            restriction,
            frob,
            basis,
            coords,
        };
        if q <= 64 {
            tower.check_embedding()?;
        }
        Ok(tower)
    }

    fn check_embedding(&self) -> Result<()> {
        for a in self.small.elements() {
            for b in self.small.elements() {
                let ea = self.embed(a);
                let eb = self.embed(b);
                if self.embed(self.small.add(a, b)) != self.big.add(ea, eb)
                    || self.embed(self.small.mul(a, b)) != self.big.mul(ea, eb)
                {
                    return Err(Error::InvalidParameter(
                        "subfield embedding is not a homomorphism".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn h(&self) -> u32 {
        self.h
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn m(&self) -> u32 {
        self.m
    }
    /// `q^m`.
    pub fn big_order(&self) -> u32 {
        self.big.order()
    }
    /// Arithmetic in `F_q`.
    pub fn small(&self) -> &GaloisField {
        &self.small
    }
    /// Arithmetic in `F_{q^m}`.
    pub fn big(&self) -> &GaloisField {
        &self.big
    }

    pub fn description(&self) -> FieldDescription {
        FieldDescription {
            p: self.p,
            h: self.h,
            m: self.m,
            modulus_small: self.small.modulus().to_vec(),
            modulus_big: self.big.modulus().to_vec(),
        }
    }

    pub fn embed(&self, a: u32) -> u32 {
        self.embedding[a as usize]
    }

    /// Inverse of [`embed`](Self::embed); `None` outside the subfield.
    pub fn restrict(&self, a: u32) -> Option<u32> {
        match self.restriction[a as usize] {
            NOT_IN_SUBFIELD => None,
            c => Some(c),
        }
    }

    /// `a^{q^i}`.
    pub fn frobenius(&self, a: u32, i: u32) -> u32 {
        let mut x = a;
        for _ in 0..i % self.m {
            x = self.frob[x as usize];
        }
        x
    }

    /// `N_{q^m/q}(a) = a^{(q^m-1)/(q-1)}`, an element of the embedded `F_q`.
    pub fn rel_norm(&self, a: u32) -> u32 {
        let e = (self.big.order() as u64 - 1) / (self.q as u64 - 1);
        self.big.pow(a, e)
    }

    /// `Tr_{q^m/q}(a) = a + a^q + … + a^{q^{m-1}}`.
    pub fn trace(&self, a: u32) -> u32 {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.m {
            acc = self.big.add(acc, x);
            x = self.frob[x as usize];
        }
        acc
    }

    /// The tower's fixed `F_q`-basis `1, β, …, β^{m-1}`.
    pub fn fq_basis(&self) -> &[u32] {
        &self.basis
    }

    /// Coordinates of `a` in the fixed basis, written into `out[..m]`.
    #[inline]
    pub fn coords_into(&self, a: u32, out: &mut [u32]) {
        let m = self.m as usize;
        if self.h == 1 {
            let mut x = a;
            for o in out.iter_mut().take(m) {
                *o = x % self.p;
                x /= self.p;
            }
        } else {
            let start = a as usize * m;
            out[..m].copy_from_slice(&self.coords[start..start + m]);
        }
    }

    pub fn std_coords(&self, a: u32) -> Vec<u32> {
        let mut out = vec![0; self.m as usize];
        self.coords_into(a, &mut out);
        out
    }

    /// Inverse of [`std_coords`](Self::std_coords).
    pub fn from_std_coords(&self, c: &[u32]) -> u32 {
        if self.h == 1 {
            return self.big.from_digits(c);
        }
        c.iter().enumerate().fold(0, |acc, (j, &x)| {
            self.big.add(acc, self.big.mul(self.embed(x), self.basis[j]))
        })
    }

    /// Coordinates of `a` over `F_q` with respect to an arbitrary basis.
    pub fn fq_coordinates(&self, a: u32, basis: &[u32]) -> Result<Vec<u32>> {
        let m = self.m as usize;
        if basis.len() != m {
            return Err(Error::DependentBasis);
        }
        let rows: Vec<Vec<u32>> = basis.iter().map(|&b| self.std_coords(b)).collect();
        let change = Matrix::from_rows(&rows);
        let inv = change
            .inverse(&self.small)
            .map_err(|_| Error::DependentBasis)?;
        let target = Matrix::from_rows(&[self.std_coords(a)]);
        Ok(target.mul(&inv, &self.small).row(0).to_vec())
    }

    /// Recombines `Σ c_i · basis_i` with `c_i ∈ F_q`.
    pub fn combine(&self, coords: &[u32], basis: &[u32]) -> u32 {
        coords.iter().zip(basis).fold(0, |acc, (&c, &b)| {
            self.big.add(acc, self.big.mul(self.embed(c), b))
        })
    }

    /// Dimension over `F_q` of the span of the given elements of `F_{q^m}`.
    pub fn rank_of(&self, elems: &[u32]) -> usize {
        if self.q == 2 {
            return xor_rank(elems, self.m as usize);
        }
        let mut span = FqSpan::new(self);
        for &e in elems {
            span.insert(e);
            if span.rank() == self.m as usize {
                break;
            }
        }
        span.rank()
    }

    /// Whether `1, α, …, α^{m-1}` are `F_q`-independent, i.e. `F_{q^m} = F_q(α)`.
    pub fn generates_extension(&self, alpha: u32) -> bool {
        let powers: Vec<u32> = (0..self.m).map(|j| self.big.pow(alpha, j as u64)).collect();
        self.rank_of(&powers) == self.m as usize
    }
}

/// Rank over `F_2` of bit-vector codes.
fn xor_rank(elems: &[u32], cap: usize) -> usize {
    let mut basis = [0u32; 32];
    let mut rank = 0;
    for &e in elems {
        let mut x = e;
        while x != 0 {
            let hb = 31 - x.leading_zeros() as usize;
            if basis[hb] == 0 {
                basis[hb] = x;
                rank += 1;
                break;
            }
            x ^= basis[hb];
        }
        if rank == cap {
            break;
        }
    }
    rank
}

/// Incremental row-echelon basis of an `F_q`-span inside `F_{q^m}`.
pub struct FqSpan<'a> {
    tower: &'a FieldTower,
    rows: Vec<[u32; 32]>,
    pivots: Vec<usize>,
}

impl<'a> FqSpan<'a> {
    pub fn new(tower: &'a FieldTower) -> Self {
        assert!(tower.m <= 32, "extension degree above 32 is unsupported");
        FqSpan {
            tower,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `a`; returns whether it enlarged the span.
    pub fn insert(&mut self, a: u32) -> bool {
        let m = self.tower.m as usize;
        let f = &self.tower.small;
        let mut v = [0u32; 32];
        self.tower.coords_into(a, &mut v);
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = v[piv];
            if c != 0 {
                for j in piv..m {
                    v[j] = f.sub(v[j], f.mul(c, row[j]));
                }
            }
        }
        let Some(piv) = (0..m).find(|&j| v[j] != 0) else {
            return false;
        };
        let inv = f.inv(v[piv]).expect("nonzero pivot");
        for x in v.iter_mut().take(m).skip(piv) {
            *x = f.mul(*x, inv);
        }
        self.rows.push(v);
        self.pivots.push(piv);
        true
    }
}

/// Evaluates an `F_p`-polynomial (coefficients lowest first) at `a`.
fn eval_poly(f: &GaloisField, coeffs: &[u32], a: u32) -> u32 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| f.add(f.mul(acc, a), f.from_int(c as i64)))
}

/// Splits `q = p^h`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut x = q;
    let mut h = 0;
    while x % p == 0 {
        x /= p;
        h += 1;
    }
    (x == 1).then_some((p, h))
}
