//! `F_{q^m}`-linear rank-metric codes: weights, minimum distance, MRD test,
//! the Gabidulin, twisted Gabidulin and one-weight families, supports and
//! right idealizers.

use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::field::{FieldDescription, FieldTower};
use crate::linalg::{big_pow, visit_projective, BigCount, Matrix, Subspace};
use crate::qpoly::{default_basis, MultiQPolynomial, QPolynomial};

/// `dim_{F_q} ⟨v_1, …, v_n⟩`.
pub fn rank_weight(tower: &FieldTower, v: &[u32]) -> usize {
    tower.rank_of(v)
}

/// `F_q`-row space of the `m × n` expansion of `v`.
pub fn word_support(tower: &FieldTower, v: &[u32]) -> Subspace {
    let m = tower.m() as usize;
    let n = v.len();
    let mut mat = Matrix::zeros(m, n);
    let mut c = vec![0u32; m];
    for (j, &x) in v.iter().enumerate() {
        tower.coords_into(x, &mut c);
        for (l, &cl) in c.iter().enumerate() {
            mat.set(l, j, cl);
        }
    }
    Subspace::span(&mat, tower.small())
}

/// Support of an `F_{q^m}`-subspace: the sum of the supports of its basis rows.
pub fn support(tower: &FieldTower, x: &Subspace) -> Subspace {
    let n = x.ambient_dim();
    let m = tower.m() as usize;
    let mut mat = Matrix::zeros(m * x.dim(), n);
    let mut c = vec![0u32; m];
    for (r, row) in x.basis().row_iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            tower.coords_into(v, &mut c);
            for (l, &cl) in c.iter().enumerate() {
                mat.set(r * m + l, j, cl);
            }
        }
    }
    Subspace::span(&mat, tower.small())
}

#[derive(Serialize, Deserialize)]
struct CodeFile {
    tower: FieldDescription,
    n: usize,
    k: usize,
    generator_rows: Vec<Vec<u32>>,
}

/// An `[n, k]` `F_{q^m}`-linear code, stored by its RREF generator matrix.
#[derive(Debug)]
pub struct RankMetricCode {
    tower: Arc<FieldTower>,
    generator: Subspace,
    distance: OnceLock<usize>,
    distribution: OnceLock<Vec<u64>>,
}

impl Clone for RankMetricCode {
    fn clone(&self) -> Self {
        RankMetricCode {
            tower: self.tower.clone(),
            generator: self.generator.clone(),
            distance: self.distance.clone(),
            distribution: self.distribution.clone(),
        }
    }
}

impl PartialEq for RankMetricCode {
    fn eq(&self, other: &Self) -> bool {
        *self.tower == *other.tower && self.generator == other.generator
    }
}

impl RankMetricCode {
    /// Code spanned by `rows` in `F_{q^m}^n`; the span must be nonzero.
    pub fn from_rows<R: AsRef<[u32]>>(tower: &Arc<FieldTower>, rows: &[R], n: usize) -> Result<Self> {
        if rows
            .iter()
            .any(|r| r.as_ref().len() != n || r.as_ref().iter().any(|&x| x >= tower.big_order()))
        {
            return Err(Error::InvalidParameter("generator row malformed".into()));
        }
        Self::from_subspace(tower, Subspace::span_rows(rows, n, tower.big()))
    }

    pub fn from_subspace(tower: &Arc<FieldTower>, generator: Subspace) -> Result<Self> {
        if generator.field() != tower.big().id() {
            return Err(Error::FieldMismatch);
        }
        if generator.dim() == 0 {
            return Err(Error::InvalidParameter("code dimension must be at least 1".into()));
        }
        Ok(RankMetricCode {
            tower: tower.clone(),
            generator,
            distance: OnceLock::new(),
            distribution: OnceLock::new(),
        })
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn n(&self) -> usize {
        self.generator.ambient_dim()
    }

    pub fn k(&self) -> usize {
        self.generator.dim()
    }

    pub fn generator(&self) -> &Subspace {
        &self.generator
    }

    /// `Σ c_i · row_i`.
    pub fn encode(&self, coeffs: &[u32]) -> Vec<u32> {
        let f = self.tower.big();
        let mut out = vec![0u32; self.n()];
        encode_into(f, self.generator.basis(), coeffs, &mut out);
        out
    }

    /// Visits one codeword per 1-dimensional subspace of the code.
    pub fn visit_projective_codewords(&self, mut visit: impl FnMut(&[u32])) {
        let f = self.tower.big();
        let mut word = vec![0u32; self.n()];
        visit_projective(self.k(), f.order(), |c| {
            encode_into(f, self.generator.basis(), c, &mut word);
            visit(&word);
        });
    }

    /// Whether every nonzero codeword has rank weight at least `d`, stopping at
    /// the first lighter word.
    pub fn has_distance_at_least(&self, d: usize) -> bool {
        if let Some(&known) = self.distance.get() {
            return known >= d;
        }
        let f = self.tower.big();
        let mut word = vec![0u32; self.n()];
        let mut ok = true;
        let basis = self.generator.basis();
        // Generator rows first: they are the sparsest words.
        for r in basis.row_iter() {
            if rank_weight(&self.tower, r) < d {
                return false;
            }
        }
        visit_projective(self.k(), f.order(), |c| {
            if ok {
                encode_into(f, basis, c, &mut word);
                if rank_weight(&self.tower, &word) < d {
                    ok = false;
                }
            }
        });
        ok
    }

    /// Minimum rank weight over nonzero codewords.
    pub fn min_distance(&self) -> usize {
        *self.distance.get_or_init(|| {
            let mut best = usize::MAX;
            self.visit_projective_codewords(|w| {
                best = best.min(rank_weight(&self.tower, w));
            });
            best
        })
    }

    /// `true` iff `d = n − k + 1`; requires `n ≤ m`.
    pub fn is_mrd(&self) -> Result<bool> {
        let m = self.tower.m() as usize;
        if self.n() > m {
            return Err(Error::UnsupportedShape { n: self.n(), m });
        }
        Ok(self.has_distance_at_least(self.n() - self.k() + 1))
    }

    /// Number of codewords of each rank weight `0..=min(n, m)` (zero word included).
    pub fn weight_distribution(&self) -> &[u64] {
        self.distribution.get_or_init(|| {
            let top = self.n().min(self.tower.m() as usize);
            let mut out = vec![0u64; top + 1];
            self.visit_projective_codewords(|w| out[rank_weight(&self.tower, w)] += 1);
            let scale = self.tower.big_order() as u64 - 1;
            for x in out.iter_mut() {
                *x *= scale;
            }
            out[0] = 1;
            out
        })
    }

    /// `rank,count` lines with a header.
    pub fn weight_distribution_csv(&self) -> String {
        let mut s = String::from("rank,count\n");
        for (r, c) in self.weight_distribution().iter().enumerate() {
            s.push_str(&format!("{r},{c}\n"));
        }
        s
    }

    pub fn support(&self) -> Subspace {
        support(&self.tower, &self.generator)
    }

    /// Whether `v ∈ C`.
    pub fn contains(&self, v: &[u32]) -> bool {
        self.generator.contains(v, self.tower.big())
    }

    /// The code `{c · G : c ∈ C}` for an `n × n` matrix `G` over `F_q`.
    pub fn right_multiply(&self, g: &Matrix) -> Result<RankMetricCode> {
        let rows = right_multiply_rows(&self.tower, self.generator.basis(), g);
        RankMetricCode::from_rows(&self.tower, &rows, self.n())
    }

    /// `F_q`-basis (as flat `n × n` matrices) of the right idealizer
    /// `{G ∈ F_q^{n×n} : C·G ⊆ C}`.
    pub fn right_idealizer_basis(&self) -> Vec<Matrix> {
        right_idealizer_basis(&self.tower, &self.generator)
    }

    /// `dim_{F_q}` of the right idealizer.
    pub fn right_idealizer_dim(&self) -> usize {
        self.right_idealizer_basis().len()
    }

    pub fn to_json(&self) -> String {
        let file = CodeFile {
            tower: self.tower.description(),
            n: self.n(),
            k: self.k(),
            generator_rows: self.generator.basis().row_iter().map(|r| r.to_vec()).collect(),
        };
        serde_json::to_string(&file).expect("serializable")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: CodeFile = serde_json::from_str(json)?;
        let tower = FieldTower::from_description(&file.tower)?;
        let code = Self::from_rows(&tower, &file.generator_rows, file.n)?;
        if code.k() != file.k {
            return Err(Error::Parse(format!(
                "declared dimension {} but rows span {}",
                file.k,
                code.k()
            )));
        }
        Ok(code)
    }
}

fn encode_into(f: &crate::field::GaloisField, basis: &Matrix, coeffs: &[u32], out: &mut [u32]) {
    out.fill(0);
    for (r, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(basis.row(r)) {
            if x != 0 {
                *o = f.add(*o, f.mul(c, x));
            }
        }
    }
}

fn right_multiply_rows(tower: &FieldTower, rows: &Matrix, g: &Matrix) -> Vec<Vec<u32>> {
    let f = tower.big();
    let n = rows.cols();
    rows.row_iter()
        .map(|r| {
            (0..n)
                .map(|j| {
                    (0..n).fold(0, |acc, i| {
                        let gij = g.get(i, j);
                        if gij == 0 || r[i] == 0 {
                            acc
                        } else {
                            f.add(acc, f.mul(r[i], tower.embed(gij)))
                        }
                    })
                })
                .collect()
        })
        .collect()
}

/// Solves `r_t · G · Hᵀ = 0` over `F_q` for all generator rows `r_t`, with `H`
/// a parity-check matrix; returns a basis of the solution space.
fn right_idealizer_basis(tower: &FieldTower, code: &Subspace) -> Vec<Matrix> {
    let big = tower.big();
    let small = tower.small();
    let n = code.ambient_dim();
    let m = tower.m() as usize;
    let parity = code.orthogonal_complement(big);
    let gen = code.basis();
    // Unknown G[i][j] at index i*n + j. Equation (t, c, l): the l-th F_q
    // coordinate of Σ_{i,j} r_t[i] G[i][j] H_c[j].
    let unknowns = n * n;
    let mut eqs = Vec::new();
    let mut coords = vec![0u32; m];
    for r in gen.row_iter() {
        for h in parity.basis().row_iter() {
            let mut rows = vec![vec![0u32; unknowns]; m];
            for i in 0..n {
                if r[i] == 0 {
                    continue;
                }
                for j in 0..n {
                    let w = big.mul(r[i], h[j]);
                    if w == 0 {
                        continue;
                    }
                    tower.coords_into(w, &mut coords);
                    for (l, &c) in coords.iter().enumerate() {
                        rows[l][i * n + j] = c;
                    }
                }
            }
            eqs.extend(rows);
        }
    }
    let null = if eqs.is_empty() {
        Matrix::identity(unknowns)
    } else {
        Matrix::from_rows(&eqs).null_space(small)
    };
    null.row_iter()
        .map(|v| Matrix::from_flat(n, n, v.to_vec()))
        .collect()
}

/// A code given by spanning linearized polynomials in `ℓ` variables.
#[derive(Debug, Clone)]
pub struct PolyCode {
    tower: Arc<FieldTower>,
    ell: usize,
    polys: Vec<MultiQPolynomial>,
    code: RankMetricCode,
}

impl PolyCode {
    pub fn new(tower: &Arc<FieldTower>, polys: Vec<MultiQPolynomial>) -> Result<Self> {
        let ell = polys
            .first()
            .map(|p| p.ell())
            .ok_or_else(|| Error::InvalidParameter("no spanning polynomials".into()))?;
        if polys.iter().any(|p| p.ell() != ell) {
            return Err(Error::InvalidParameter("mixed numbers of variables".into()));
        }
        if polys.iter().any(|p| **p.tower() != **tower) {
            return Err(Error::TowerMismatch);
        }
        let basis = default_basis(tower, ell);
        let rows: Vec<Vec<u32>> = polys
            .iter()
            .map(|p| p.evaluation_map(&basis))
            .collect::<Result<_>>()?;
        let code = RankMetricCode::from_rows(tower, &rows, ell * tower.m() as usize)?;
        Ok(PolyCode {
            tower: tower.clone(),
            ell,
            polys,
            code,
        })
    }

    pub fn from_univariate(tower: &Arc<FieldTower>, polys: &[QPolynomial]) -> Result<Self> {
        Self::new(tower, polys.iter().map(MultiQPolynomial::from_univariate).collect())
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn polys(&self) -> &[MultiQPolynomial] {
        &self.polys
    }

    pub fn dim(&self) -> usize {
        self.code.k()
    }

    /// Evaluation code with respect to the default basis.
    pub fn code(&self) -> &RankMetricCode {
        &self.code
    }

    /// Evaluation code with respect to an arbitrary `F_q`-basis of `F_{q^m}^ℓ`.
    pub fn to_code(&self, basis: &[Vec<u32>]) -> Result<RankMetricCode> {
        let rows: Vec<Vec<u32>> = self
            .polys
            .iter()
            .map(|p| p.evaluation_map(basis))
            .collect::<Result<_>>()?;
        RankMetricCode::from_rows(&self.tower, &rows, self.ell * self.tower.m() as usize)
    }

    pub fn contains(&self, f: &MultiQPolynomial) -> bool {
        let basis = default_basis(&self.tower, self.ell);
        let v: Vec<u32> = basis.iter().map(|a| f.eval(a)).collect();
        self.code.contains(&v)
    }

    pub fn is_mrd(&self) -> Result<bool> {
        self.code.is_mrd()
    }

    pub fn min_distance(&self) -> usize {
        self.code.min_distance()
    }
}

/// `G_{k,s,m} = ⟨x, x^{q^s}, …, x^{q^{s(k−1)}}⟩`.
pub fn gabidulin(tower: &Arc<FieldTower>, k: usize, s: u32) -> Result<PolyCode> {
    let m = tower.m();
    check_family_params(m, k, s)?;
    let polys: Vec<QPolynomial> = (0..k as u32)
        .map(|i| QPolynomial::monomial(tower, 1, s * i))
        .collect();
    PolyCode::from_univariate(tower, &polys)
}

fn check_family_params(m: u32, k: usize, s: u32) -> Result<()> {
    if k == 0 || k > m as usize {
        return Err(Error::InvalidParameter(format!("need 1 ≤ k ≤ m, got k={k}, m={m}")));
    }
    if num_integer::gcd(s, m) != 1 {
        return Err(Error::InvalidParameter(format!("gcd(s, m) = gcd({s}, {m}) ≠ 1")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwistVariant {
    /// `⟨x^{q^s}, …, x^{q^{s(k−1)}}, x + δ x^{q^{sk}}⟩`.
    Definition,
    /// `⟨x^{q^s}, …, x^{q^{s(k−1)}}, x + δ x^{q^{s(m−1)}}⟩`; usually not MRD,
    /// so construction then fails with [`Error::NotMrd`].
    TopExponent,
    /// `⟨x, x^q + δ x^{q^3}⟩` with `k = 2, s = 1, m = 4`.
    CzForm,
}

/// Twisted Gabidulin code; the result is verified to be MRD.
pub fn twisted_gabidulin(
    tower: &Arc<FieldTower>,
    k: usize,
    s: u32,
    delta: u32,
    variant: TwistVariant,
) -> Result<PolyCode> {
    let m = tower.m();
    check_family_params(m, k, s)?;
    if delta >= tower.big_order() {
        return Err(Error::InvalidParameter("δ outside F_{q^m}".into()));
    }
    let big = tower.big();
    let sign = if (m as usize * k) % 2 == 0 {
        1
    } else {
        big.neg(1)
    };
    if tower.rel_norm(delta) == sign {
        return Err(Error::InvalidDelta);
    }
    let polys = match variant {
        TwistVariant::Definition | TwistVariant::TopExponent => {
            let e = if variant == TwistVariant::Definition {
                s * k as u32
            } else {
                s * (m - 1)
            };
            let mut polys: Vec<QPolynomial> = (1..k as u32)
                .map(|i| QPolynomial::monomial(tower, 1, s * i))
                .collect();
            let twist = QPolynomial::identity(tower)
                .add(&QPolynomial::monomial(tower, delta, e))?;
            polys.push(twist);
            polys
        }
        TwistVariant::CzForm => {
            if (k, s, m) != (2, 1, 4) {
                return Err(Error::InvalidParameter(
                    "the x^q + δx^{q^3} form needs k = 2, s = 1, m = 4".into(),
                ));
            }
            vec![
                QPolynomial::identity(tower),
                QPolynomial::monomial(tower, 1, 1).add(&QPolynomial::monomial(tower, delta, 3))?,
            ]
        }
    };
    let code = PolyCode::from_univariate(tower, &polys)?;
    let expected = m as usize - k + 1;
    if !code.is_mrd()? {
        return Err(Error::NotMrd {
            found: code.min_distance(),
            expected,
        });
    }
    Ok(code)
}

/// The `[mk, k, m]` code with generator `(I_k | αI_k | … | α^{m−1}I_k)`.
pub fn one_weight_code(tower: &Arc<FieldTower>, k: usize, alpha: u32) -> Result<RankMetricCode> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if alpha >= tower.big_order() || !tower.generates_extension(alpha) {
        return Err(Error::NotPrimitiveElement);
    }
    let m = tower.m() as usize;
    let big = tower.big();
    let rows: Vec<Vec<u32>> = (0..k)
        .map(|r| {
            let mut row = vec![0u32; m * k];
            for b in 0..m {
                row[b * k + r] = big.pow(alpha, b as u64);
            }
            row
        })
        .collect();
    RankMetricCode::from_rows(tower, &rows, m * k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AutMode {
    /// All invertible `G ∈ F_q^{n×n}`; budget `q^{n²} ≤ 2^20`.
    Exhaustive,
    /// Only `a·x^{q^i}` (univariate codes).
    Monomial,
    /// Units of the right idealizer algebra, enumerated.
    Idealizer,
}

const EXHAUSTIVE_AUT_BUDGET: u64 = 1 << 20;
const IDEALIZER_ENUM_BUDGET: u64 = 1 << 22;

/// `|{g invertible : C ∘ g = C}|`, in the evaluation picture `{G : C·G = C}`.
pub fn linear_automorphism_count(code: &PolyCode, mode: AutMode) -> Result<BigCount> {
    let tower = code.tower();
    match mode {
        AutMode::Exhaustive | AutMode::Idealizer => code_automorphism_count(code.code(), mode),
        AutMode::Monomial => {
            if code.ell() != 1 {
                return Err(Error::InvalidParameter("monomial mode needs one variable".into()));
            }
            let m = tower.m();
            let mut count = 0u64;
            for a in 1..tower.big_order() {
                for i in 0..m {
                    let g = QPolynomial::monomial(tower, a, i);
                    let fixes = code.polys().iter().all(|f| {
                        let f = QPolynomial::new(tower, f.coeffs().to_vec()).expect("same tower");
                        let fg = f.compose(&g).expect("same tower");
                        code.contains(&MultiQPolynomial::from_univariate(&fg))
                    });
                    if fixes {
                        count += 1;
                    }
                }
            }
            Ok(BigUint::from(count))
        }
    }
}

/// `|{G ∈ GL_n(q) : C·G = C}|` for a code in vector form.
pub fn code_automorphism_count(c: &RankMetricCode, mode: AutMode) -> Result<BigCount> {
    let tower = c.tower();
    let n = c.n();
    let q = tower.q() as u64;
    match mode {
        AutMode::Exhaustive => {
            check_budget(&big_pow(q, (n * n) as u32), EXHAUSTIVE_AUT_BUDGET)?;
            let small = tower.small();
            let total = q.pow((n * n) as u32);
            let mut entries = vec![0u32; n * n];
            let mut count = 0u64;
            let gen = c.generator().basis();
            for code_idx in 0..total {
                let mut x = code_idx;
                for e in entries.iter_mut() {
                    *e = (x % q) as u32;
                    x /= q;
                }
                let g = Matrix::from_flat(n, n, entries.clone());
                if !stabilizes(tower, c, gen, &g) {
                    continue;
                }
                if g.rank(small) == n {
                    count += 1;
                }
            }
            Ok(BigUint::from(count))
        }
        AutMode::Idealizer => {
            let basis = c.right_idealizer_basis();
            let d = basis.len() as u32;
            check_budget(&big_pow(q, d), IDEALIZER_ENUM_BUDGET)?;
            Ok(BigUint::from(count_units(tower, &basis, n)))
        }
        AutMode::Monomial => Err(Error::InvalidParameter(
            "monomial mode needs the q-polynomial form".into(),
        )),
    }
}

fn stabilizes(tower: &FieldTower, c: &RankMetricCode, gen: &Matrix, g: &Matrix) -> bool {
    right_multiply_rows(tower, gen, g)
        .iter()
        .all(|r| c.contains(r))
}

/// Counts invertible elements of the `F_q`-span of `basis`.
fn count_units(tower: &FieldTower, basis: &[Matrix], n: usize) -> u64 {
    let small = tower.small();
    let q = tower.q() as u64;
    let d = basis.len() as u32;
    let mut count = 0;
    let mut coeffs = vec![0u32; basis.len()];
    for idx in 0..q.pow(d) {
        let mut x = idx;
        for c in coeffs.iter_mut() {
            *c = (x % q) as u32;
            x /= q;
        }
        let mut acc = vec![0u32; n * n];
        for (c, b) in coeffs.iter().zip(basis) {
            if *c == 0 {
                continue;
            }
            for (a, &e) in acc.iter_mut().zip(b.data()) {
                *a = small.add(*a, small.mul(*c, e));
            }
        }
        if Matrix::from_flat(n, n, acc).rank(small) == n {
            count += 1;
        }
    }
    count
}
