//! Linearized polynomials over `F_{q^m}` modulo `x^{q^m} − x`, in one or
//! several variables.
//!
//! A univariate element `Σ c_i x^{q^i}` is stored as its `m` coefficients; the
//! map `a ↦ f(a)` is the `F_q`-linear endomorphism it represents.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldTower;
use crate::linalg::Matrix;

#[derive(Clone, PartialEq, Eq)]
pub struct QPolynomial {
    tower: Arc<FieldTower>,
    coeffs: Vec<u32>,
}

impl fmt::Debug for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl QPolynomial {
    pub fn new(tower: &Arc<FieldTower>, coeffs: Vec<u32>) -> Result<Self> {
        let m = tower.m() as usize;
        if coeffs.len() > m {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients given, q-degree must stay below {m}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|&c| c >= tower.big_order()) {
            return Err(Error::InvalidParameter("coefficient outside F_{q^m}".into()));
        }
        let mut coeffs = coeffs;
        coeffs.resize(m, 0);
        Ok(QPolynomial {
            tower: tower.clone(),
            coeffs,
        })
    }

    pub fn zero(tower: &Arc<FieldTower>) -> Self {
        QPolynomial {
            tower: tower.clone(),
            coeffs: vec![0; tower.m() as usize],
        }
    }

    /// `a · x^{q^i}` (exponent taken mod `m`).
    pub fn monomial(tower: &Arc<FieldTower>, a: u32, i: u32) -> Self {
        let mut p = Self::zero(tower);
        p.coeffs[(i % tower.m()) as usize] = a;
        p
    }

    /// The identity map `x`.
    pub fn identity(tower: &Arc<FieldTower>) -> Self {
        Self::monomial(tower, 1, 0)
    }

    /// `x + x^q + … + x^{q^{m-1}}`.
    pub fn trace(tower: &Arc<FieldTower>) -> Self {
        QPolynomial {
            tower: tower.clone(),
            coeffs: vec![1; tower.m() as usize],
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Largest `i` with a nonzero coefficient.
    pub fn q_degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0)
    }

    fn same_tower(&self, other: &QPolynomial) -> Result<()> {
        if Arc::ptr_eq(&self.tower, &other.tower) || *self.tower == *other.tower {
            Ok(())
        } else {
            Err(Error::TowerMismatch)
        }
    }

    pub fn eval(&self, a: u32) -> u32 {
        let f = self.tower.big();
        let mut acc = 0;
        let mut x = a;
        for &c in &self.coeffs {
            acc = f.add(acc, f.mul(c, x));
            x = self.tower.frobenius(x, 1);
        }
        acc
    }

    pub fn add(&self, other: &QPolynomial) -> Result<QPolynomial> {
        self.same_tower(other)?;
        let f = self.tower.big();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.add(a, b))
            .collect();
        Ok(QPolynomial {
            tower: self.tower.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &QPolynomial) -> Result<QPolynomial> {
        self.same_tower(other)?;
        let f = self.tower.big();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| f.sub(a, b))
            .collect();
        Ok(QPolynomial {
            tower: self.tower.clone(),
            coeffs,
        })
    }

    /// `λ · f`.
    pub fn scale(&self, lambda: u32) -> QPolynomial {
        let f = self.tower.big();
        QPolynomial {
            tower: self.tower.clone(),
            coeffs: self.coeffs.iter().map(|&c| f.mul(lambda, c)).collect(),
        }
    }

    /// `self ∘ g` via `a x^{q^i} ∘ b x^{q^j} = a b^{q^i} x^{q^{i+j mod m}}`.
    pub fn compose(&self, g: &QPolynomial) -> Result<QPolynomial> {
        self.same_tower(g)?;
        let f = self.tower.big();
        let m = self.coeffs.len();
        let mut out = vec![0u32; m];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in g.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let term = f.mul(a, self.tower.frobenius(b, i as u32));
                let slot = (i + j) % m;
                out[slot] = f.add(out[slot], term);
            }
        }
        Ok(QPolynomial {
            tower: self.tower.clone(),
            coeffs: out,
        })
    }

    /// Evaluations at the tower's fixed `F_q`-basis.
    pub fn evaluations(&self) -> Vec<u32> {
        self.tower.fq_basis().iter().map(|&b| self.eval(b)).collect()
    }

    /// Matrix over `F_q` of `a ↦ f(a)` in `basis`: column `j` holds the
    /// coordinates of `f(basis_j)`, so `to_matrix(f ∘ g) = to_matrix(f) · to_matrix(g)`.
    pub fn to_matrix(&self, basis: &[u32]) -> Result<Matrix> {
        let m = self.tower.m() as usize;
        let mut out = Matrix::zeros(m, m);
        for (j, &b) in basis.iter().enumerate() {
            let c = self.tower.fq_coordinates(self.eval(b), basis)?;
            for (i, &x) in c.iter().enumerate() {
                out.set(i, j, x);
            }
        }
        Ok(out)
    }

    /// Inverse of [`to_matrix`](Self::to_matrix): the unique q-polynomial
    /// agreeing with the given `F_q`-linear map, via `f = Σ_i c_i x^{q^i}`
    /// solved from the Moore system on the basis.
    pub fn from_matrix(tower: &Arc<FieldTower>, mat: &Matrix, basis: &[u32]) -> Result<Self> {
        let m = tower.m() as usize;
        let big = tower.big();
        // Moore matrix M[j][i] = basis_j^{q^i}; f(basis_j) = Σ_i c_i M[j][i].
        let mut moore = Matrix::zeros(m, m);
        for (j, &b) in basis.iter().enumerate() {
            for i in 0..m {
                moore.set(j, i, tower.frobenius(b, i as u32));
            }
        }
        let images: Vec<u32> = (0..m)
            .map(|j| {
                let col: Vec<u32> = (0..m).map(|i| mat.get(i, j)).collect();
                tower.combine(&col, basis)
            })
            .collect();
        let inv = moore.inverse(big)?;
        // c = M^{-1} · images
        let coeffs = (0..m)
            .map(|i| {
                (0..m).fold(0, |acc, j| big.add(acc, big.mul(inv.get(i, j), images[j])))
            })
            .collect();
        Ok(QPolynomial {
            tower: tower.clone(),
            coeffs,
        })
    }

    /// `dim_{F_q} Im(f)`.
    pub fn rank(&self) -> usize {
        self.tower.rank_of(&self.evaluations())
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.tower.m() as usize
    }

    /// Applies `σ^e` to every coefficient, `σ: a ↦ a^p` the absolute Frobenius.
    pub fn semilinear_twist(&self, rho_exponent: u32) -> QPolynomial {
        let f = self.tower.big();
        let e = (self.tower.p() as u64).pow(rho_exponent % f.degree());
        QPolynomial {
            tower: self.tower.clone(),
            coeffs: self.coeffs.iter().map(|&c| f.pow(c, e)).collect(),
        }
    }

    /// Parses `"c0*x + c1*x^q + c2*x^q^2"` (terms in any order, `0` for zero).
    pub fn parse(tower: &Arc<FieldTower>, text: &str) -> Result<Self> {
        let body = text.trim();
        let body = body.strip_prefix("f =").unwrap_or(body).trim();
        let mut p = Self::zero(tower);
        if body == "0" {
            return Ok(p);
        }
        let f = tower.big();
        for term in body.split('+') {
            let term = term.trim();
            let (coef, mono) = term
                .split_once('*')
                .ok_or_else(|| Error::Parse(format!("bad term {term:?}")))?;
            let c: u32 = coef
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient {coef:?}")))?;
            if c >= f.order() {
                return Err(Error::Parse(format!("coefficient {c} outside the field")));
            }
            let i = match mono.trim() {
                "x" => 0,
                "x^q" => 1,
                other => other
                    .strip_prefix("x^q^")
                    .and_then(|e| e.parse::<u32>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad monomial {other:?}")))?,
            };
            if i >= tower.m() {
                return Err(Error::Parse(format!("q-degree {i} not reduced")));
            }
            p.coeffs[i as usize] = f.add(p.coeffs[i as usize], c);
        }
        Ok(p)
    }

    /// JSON array of coefficient codes.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.coeffs).expect("plain integer array")
    }

    pub fn from_json(tower: &Arc<FieldTower>, json: &str) -> Result<Self> {
        let coeffs: Vec<u32> = serde_json::from_str(json)?;
        Self::new(tower, coeffs)
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| match i {
                0 => format!("{c}*x"),
                1 => format!("{c}*x^q"),
                _ => format!("{c}*x^q^{i}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "f = 0")
        } else {
            write!(f, "f = {}", terms.join(" + "))
        }
    }
}

/// `d_L(f, g) = dim_{F_q} Im(f − g)`.
pub fn rank_distance(f: &QPolynomial, g: &QPolynomial) -> Result<usize> {
    Ok(f.sub(g)?.rank())
}

/// Element of `L_{m,q}[x_1, …, x_ℓ]`: `coeffs[v*m + i]` multiplies `x_v^{q^i}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiQPolynomial {
    tower: Arc<FieldTower>,
    ell: usize,
    coeffs: Vec<u32>,
}

impl MultiQPolynomial {
    pub fn new(tower: &Arc<FieldTower>, ell: usize, coeffs: Vec<u32>) -> Result<Self> {
        let m = tower.m() as usize;
        if ell == 0 || coeffs.len() != ell * m {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients for {ell} variables",
                ell * m
            )));
        }
        if coeffs.iter().any(|&c| c >= tower.big_order()) {
            return Err(Error::InvalidParameter("coefficient outside F_{q^m}".into()));
        }
        Ok(MultiQPolynomial {
            tower: tower.clone(),
            ell,
            coeffs,
        })
    }

    pub fn zero(tower: &Arc<FieldTower>, ell: usize) -> Self {
        MultiQPolynomial {
            tower: tower.clone(),
            ell,
            coeffs: vec![0; ell * tower.m() as usize],
        }
    }

    /// The variable `x_v` (0-based).
    pub fn variable(tower: &Arc<FieldTower>, ell: usize, v: usize) -> Self {
        let mut p = Self::zero(tower, ell);
        p.coeffs[v * tower.m() as usize] = 1;
        p
    }

    pub fn from_univariate(f: &QPolynomial) -> Self {
        MultiQPolynomial {
            tower: f.tower.clone(),
            ell: 1,
            coeffs: f.coeffs.clone(),
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn eval(&self, point: &[u32]) -> u32 {
        assert_eq!(point.len(), self.ell);
        let f = self.tower.big();
        let m = self.tower.m() as usize;
        let mut acc = 0;
        for (v, &a) in point.iter().enumerate() {
            let mut x = a;
            for i in 0..m {
                let c = self.coeffs[v * m + i];
                if c != 0 {
                    acc = f.add(acc, f.mul(c, x));
                }
                x = self.tower.frobenius(x, 1);
            }
        }
        acc
    }

    /// `dim_{F_q} Im(f)`.
    pub fn rank(&self) -> usize {
        let evals: Vec<u32> = default_basis(&self.tower, self.ell)
            .iter()
            .map(|a| self.eval(a))
            .collect();
        self.tower.rank_of(&evals)
    }

    /// `ev_B(f) = (f(a_1), …, f(a_{mℓ}))`.
    pub fn evaluation_map(&self, basis: &[Vec<u32>]) -> Result<Vec<u32>> {
        check_fq_basis(&self.tower, self.ell, basis)?;
        Ok(basis.iter().map(|a| self.eval(a)).collect())
    }
}

/// `(b_1 e_1, …, b_m e_1, b_1 e_2, …, b_m e_ℓ)` with `b` the tower's `F_q`-basis.
pub fn default_basis(tower: &FieldTower, ell: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(ell * tower.m() as usize);
    for v in 0..ell {
        for &b in tower.fq_basis() {
            let mut e = vec![0u32; ell];
            e[v] = b;
            out.push(e);
        }
    }
    out
}

/// Checks that `basis` is an `F_q`-basis of `F_{q^m}^ℓ`.
pub fn check_fq_basis(tower: &FieldTower, ell: usize, basis: &[Vec<u32>]) -> Result<()> {
    let m = tower.m() as usize;
    if basis.len() != ell * m || basis.iter().any(|a| a.len() != ell) {
        return Err(Error::DependentBasis);
    }
    let rows: Vec<Vec<u32>> = basis
        .iter()
        .map(|a| a.iter().flat_map(|&x| tower.std_coords(x)).collect())
        .collect();
    if Matrix::from_rows(&rows).rank(tower.small()) != ell * m {
        return Err(Error::DependentBasis);
    }
    Ok(())
}
