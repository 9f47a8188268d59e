//! `F_q`-linear sets of `PG(1, q^m)` and translation hyperovals of `PG(2, q)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::PolyCode;
use crate::error::{check_budget, Error, Result};
use crate::field::{FieldTower, GaloisField};
use crate::linalg::{big_pow, Matrix, Subspace};
use crate::qpoly::QPolynomial;

/// Homogeneous coordinates with first nonzero entry 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProjectivePoint(Vec<u32>);

impl ProjectivePoint {
    pub fn new(coords: &[u32], f: &GaloisField) -> Result<Self> {
        let lead = coords
            .iter()
            .find(|&&c| c != 0)
            .ok_or_else(|| Error::InvalidParameter("zero vector has no projective point".into()))?;
        let inv = f.inv(*lead)?;
        Ok(ProjectivePoint(coords.iter().map(|&c| f.mul(c, inv)).collect()))
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearSetReport {
    pub rank: usize,
    /// Points of `L_U` with their weights, sorted by coordinates.
    pub points: Vec<(ProjectivePoint, usize)>,
    pub scattered: bool,
}

impl LinearSetReport {
    /// `Σ_P (q^{w_P} − 1)`.
    pub fn mass(&self, q: u64) -> u64 {
        self.points.iter().map(|(_, w)| q.pow(*w as u32) - 1).sum()
    }
}

/// `L_U` for `U` given by `F_q`-independent generators in `F_{q^m}^2`.
pub fn linear_set(tower: &FieldTower, generators: &[[u32; 2]]) -> Result<LinearSetReport> {
    let rank = pair_rank(tower, generators);
    if rank != generators.len() {
        return Err(Error::DependentBasis);
    }
    let big = tower.big();
    let q = tower.q() as u64;
    let total = q.pow(rank as u32);
    let mut buckets: BTreeMap<ProjectivePoint, u64> = BTreeMap::new();
    let mut coeffs = vec![0u32; rank];
    for idx in 1..total {
        let mut x = idx;
        for c in coeffs.iter_mut() {
            *c = (x % q) as u32;
            x /= q;
        }
        let mut v = [0u32; 2];
        for (c, g) in coeffs.iter().zip(generators) {
            if *c == 0 {
                continue;
            }
            let e = tower.embed(*c);
            v[0] = big.add(v[0], big.mul(e, g[0]));
            v[1] = big.add(v[1], big.mul(e, g[1]));
        }
        let p = ProjectivePoint::new(&v, big).expect("independent generators");
        *buckets.entry(p).or_default() += 1;
    }
    let points: Vec<(ProjectivePoint, usize)> = buckets
        .into_iter()
        .map(|(p, count)| {
            // |U ∩ ⟨v⟩| = q^w
            let mut w = 0;
            let mut size = 1u64;
            while size < count + 1 {
                size *= q;
                w += 1;
            }
            debug_assert_eq!(size, count + 1);
            (p, w)
        })
        .collect();
    let scattered = points.iter().all(|(_, w)| *w == 1);
    Ok(LinearSetReport {
        rank,
        points,
        scattered,
    })
}

/// `L_U` for `U` given as a subspace of `F_q^{2m}` (coordinates of the two
/// entries concatenated).
pub fn linear_set_of_subspace(tower: &FieldTower, u: &Subspace) -> Result<LinearSetReport> {
    let m = tower.m() as usize;
    if u.ambient_dim() != 2 * m {
        return Err(Error::AmbientMismatch(u.ambient_dim(), 2 * m));
    }
    let gens: Vec<[u32; 2]> = u
        .basis()
        .row_iter()
        .map(|r| [tower.from_std_coords(&r[..m]), tower.from_std_coords(&r[m..])])
        .collect();
    linear_set(tower, &gens)
}

fn pair_rank(tower: &FieldTower, gens: &[[u32; 2]]) -> usize {
    let rows: Vec<Vec<u32>> = gens
        .iter()
        .map(|g| {
            let mut r = tower.std_coords(g[0]);
            r.extend(tower.std_coords(g[1]));
            r
        })
        .collect();
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(&rows).rank(tower.small())
}

/// Generators `(f1(b_j), f2(b_j))` of `U_{f1,f2}` over the tower's basis.
pub fn pair_generators(f1: &QPolynomial, f2: &QPolynomial) -> Result<Vec<[u32; 2]>> {
    if f1.tower() != f2.tower() {
        return Err(Error::TowerMismatch);
    }
    Ok(f1
        .tower()
        .fq_basis()
        .iter()
        .map(|&b| [f1.eval(b), f2.eval(b)])
        .collect())
}

/// Whether `U_{f1,f2} = {(f1(x), f2(x))}` is scattered; `U` must have rank `m`.
pub fn is_scattered_pair(f1: &QPolynomial, f2: &QPolynomial) -> Result<bool> {
    let tower = f1.tower();
    let gens = pair_generators(f1, f2)?;
    let m = tower.m() as usize;
    let rank = pair_rank(tower, &gens);
    if rank != m {
        return Err(Error::DegenerateSubspace(rank, m));
    }
    Ok(linear_set(tower, &gens)?.scattered)
}

/// One pair on which scatteredness and the MRD property disagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeViolation {
    pub f1: String,
    pub f2: String,
    pub scattered: bool,
    pub mrd: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BridgeReport {
    pub q: u32,
    pub m: u32,
    pub mode: String,
    /// Pairs where both sides were evaluated.
    pub pairs_tested: u64,
    /// `U_{f1,f2}` of rank below `m`.
    pub skipped_degenerate: u64,
    /// `⟨f1, f2⟩` of dimension below 2.
    pub skipped_dependent: u64,
    pub scattered_and_mrd: u64,
    pub neither: u64,
    pub violations: Vec<BridgeViolation>,
}

impl BridgeReport {
    fn new(tower: &FieldTower, mode: &str) -> Self {
        BridgeReport {
            q: tower.q(),
            m: tower.m(),
            mode: mode.into(),
            pairs_tested: 0,
            skipped_degenerate: 0,
            skipped_dependent: 0,
            scattered_and_mrd: 0,
            neither: 0,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, f1: &QPolynomial, f2: &QPolynomial) -> Result<()> {
        match bridge_pair(f1, f2)? {
            PairOutcome::Degenerate => self.skipped_degenerate += 1,
            PairOutcome::Dependent => self.skipped_dependent += 1,
            PairOutcome::Tested { scattered, mrd } => {
                self.pairs_tested += 1;
                match (scattered, mrd) {
                    (true, true) => self.scattered_and_mrd += 1,
                    (false, false) => self.neither += 1,
                    _ => self.violations.push(BridgeViolation {
                        f1: f1.to_string(),
                        f2: f2.to_string(),
                        scattered,
                        mrd,
                    }),
                }
            }
        }
        Ok(())
    }

    fn merge(&mut self, other: BridgeReport) {
        self.pairs_tested += other.pairs_tested;
        self.skipped_degenerate += other.skipped_degenerate;
        self.skipped_dependent += other.skipped_dependent;
        self.scattered_and_mrd += other.scattered_and_mrd;
        self.neither += other.neither;
        self.violations.extend(other.violations);
    }
}

enum PairOutcome {
    Degenerate,
    Dependent,
    Tested { scattered: bool, mrd: bool },
}

fn bridge_pair(f1: &QPolynomial, f2: &QPolynomial) -> Result<PairOutcome> {
    let scattered = match is_scattered_pair(f1, f2) {
        Ok(s) => s,
        Err(Error::DegenerateSubspace(..)) => return Ok(PairOutcome::Degenerate),
        Err(e) => return Err(e),
    };
    let code = PolyCode::from_univariate(f1.tower(), &[f1.clone(), f2.clone()])?;
    if code.dim() < 2 {
        return Ok(PairOutcome::Dependent);
    }
    Ok(PairOutcome::Tested {
        scattered,
        mrd: code.is_mrd()?,
    })
}

/// Every ordered pair `f1 < f2` of `q`-polynomials (by coefficient index).
pub fn scattered_mrd_exhaustive(tower: &Arc<FieldTower>) -> Result<BridgeReport> {
    let m = tower.m();
    let count = big_pow(tower.big_order() as u64, m);
    check_budget(&(&count * &count), 1 << 22)?;
    let count = count.iter_u64_digits().next().unwrap_or(0);
    let poly = |idx: u64| -> QPolynomial {
        let big = tower.big_order() as u64;
        let coeffs = (0..m).map(|i| ((idx / big.pow(i)) % big) as u32).collect();
        QPolynomial::new(tower, coeffs).expect("coefficients in range")
    };
    let parts: Vec<BridgeReport> = (0..count)
        .into_par_iter()
        .map(|a| -> Result<BridgeReport> {
            let mut r = BridgeReport::new(tower, "exhaustive");
            let f1 = poly(a);
            for b in a + 1..count {
                r.record(&f1, &poly(b))?;
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let mut report = BridgeReport::new(tower, "exhaustive");
    for p in parts {
        report.merge(p);
    }
    Ok(report)
}

/// Uniformly random pairs until `samples` pairs have been tested on both sides.
pub fn scattered_mrd_sampled(tower: &Arc<FieldTower>, samples: u64, seed: u64) -> Result<BridgeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = BridgeReport::new(tower, "sampled");
    let m = tower.m() as usize;
    let draw = |rng: &mut ChaCha8Rng| {
        let c = (0..m).map(|_| rng.gen_range(0..tower.big_order())).collect();
        QPolynomial::new(tower, c).expect("coefficients in range")
    };
    let max_draws = samples.saturating_mul(1000).max(1000);
    let mut draws = 0;
    while report.pairs_tested < samples {
        if draws == max_draws {
            return Err(Error::InvalidParameter(format!(
                "only {} usable pairs in {max_draws} draws",
                report.pairs_tested
            )));
        }
        draws += 1;
        let (f1, f2) = (draw(&mut rng), draw(&mut rng));
        report.record(&f1, &f2)?;
    }
    Ok(report)
}

/// 3×3 determinant of the rows `a, b, c`.
fn det3(f: &GaloisField, a: &[u32], b: &[u32], c: &[u32]) -> u32 {
    let m = |x, y| f.mul(x, y);
    let t1 = m(a[0], f.sub(m(b[1], c[2]), m(b[2], c[1])));
    let t2 = m(a[1], f.sub(m(b[0], c[2]), m(b[2], c[0])));
    let t3 = m(a[2], f.sub(m(b[0], c[1]), m(b[1], c[0])));
    f.add(f.sub(t1, t2), t3)
}

/// Whether the three points lie on a line.
pub fn collinear(f: &GaloisField, a: &ProjectivePoint, b: &ProjectivePoint, c: &ProjectivePoint) -> bool {
    det3(f, a.coords(), b.coords(), c.coords()) == 0
}

/// `|points| = q + 2`, pairwise distinct and no three collinear, `q` even.
pub fn is_hyperoval(points: &[ProjectivePoint], f: &GaloisField) -> bool {
    let q = f.order() as usize;
    if f.characteristic() != 2 || points.len() != q + 2 {
        return false;
    }
    let mut sorted = points.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != points.len() {
        return false;
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            for k in j + 1..points.len() {
                if collinear(f, &points[i], &points[j], &points[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// `H_f = {(x, f(x), 1)} ∪ {(1,0,0), (0,1,0)}` in `PG(2, q)`, `q = 2^h`, for an
/// additive `f` written over the tower `F_2 ⊂ F_{2^h}`.
pub fn hyperoval_from_function(f: &QPolynomial) -> Result<Vec<ProjectivePoint>> {
    let tower = f.tower();
    if tower.q() != 2 {
        return Err(Error::InvalidParameter(
            "additive maps are read over the tower F_2 ⊂ F_{2^h}".into(),
        ));
    }
    let big = tower.big();
    let mut pts: Vec<ProjectivePoint> = big
        .elements()
        .map(|x| ProjectivePoint(vec![x, f.eval(x), 1]))
        .collect();
    pts.push(ProjectivePoint(vec![1, 0, 0]));
    pts.push(ProjectivePoint(vec![0, 1, 0]));
    Ok(pts)
}

/// Number of points of `points` on each line of `PG(2, q)`, lines indexed by
/// their normalized dual coordinates.
pub fn line_intersection_profile(
    points: &[ProjectivePoint],
    f: &GaloisField,
) -> BTreeMap<ProjectivePoint, usize> {
    let mut out = BTreeMap::new();
    crate::linalg::visit_projective(3, f.order(), |l| {
        let on = points
            .iter()
            .filter(|p| {
                let c = p.coords();
                let s = (0..3).fold(0, |acc, i| f.add(acc, f.mul(l[i], c[i])));
                s == 0
            })
            .count();
        out.insert(ProjectivePoint(l.to_vec()), on);
    });
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperovalReport {
    pub q: u32,
    pub tested: u64,
    /// Coefficient vectors `(a_0, …, a_{h−1})` of `f = Σ a_i x^{2^i}`.
    pub hyperovals_found: Vec<Vec<u32>>,
    pub predicted: Vec<Vec<u32>>,
    pub prediction_match: bool,
}

const HYPEROVAL_SWEEP_MAX_H: u32 = 5;

/// Sweeps all additive maps of `F_{2^h}` and keeps those whose graph closes to
/// a hyperoval.
pub fn classify_translation_hyperovals(h: u32) -> Result<HyperovalReport> {
    if h == 0 {
        return Err(Error::InvalidParameter("h must be positive".into()));
    }
    if h > HYPEROVAL_SWEEP_MAX_H {
        return Err(Error::ResourceBudgetExceeded {
            estimate: format!("2^{} additive maps", h * h),
            budget: format!("2^{}", HYPEROVAL_SWEEP_MAX_H * HYPEROVAL_SWEEP_MAX_H),
        });
    }
    check_budget(&big_pow(2, h * h), 1 << 25)?;
    let tower = FieldTower::new(2, 1, h)?;
    let big = tower.big();
    let q = big.order();
    let total = 1u64 << (h * h);
    // Values of x^{2^i} for each x, so f(x) = Σ a_i · frob[i][x].
    let frob: Vec<Vec<u32>> = (0..h)
        .map(|i| (0..q).map(|x| tower.frobenius(x, i)).collect())
        .collect();
    let inv: Vec<u32> = (0..q).map(|x| if x == 0 { 0 } else { big.inv(x).unwrap() }).collect();
    let mut found: Vec<Vec<u32>> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let coeffs: Vec<u32> = (0..h).map(|i| ((idx >> (i * h)) as u32) & (q - 1)).collect();
            let mut image_seen = vec![false; q as usize];
            let mut slope_seen = vec![false; q as usize];
            for x in 1..q {
                let fx = (0..h as usize).fold(0, |acc, i| {
                    acc ^ big.mul(coeffs[i], frob[i][x as usize])
                });
                // f must be injective and f(x)/x injective on F_q^*: otherwise
                // two affine points share a line with (1,0,0) or with (0,0,1).
                if fx == 0 || image_seen[fx as usize] {
                    return None;
                }
                image_seen[fx as usize] = true;
                let s = big.mul(fx, inv[x as usize]);
                if slope_seen[s as usize] {
                    return None;
                }
                slope_seen[s as usize] = true;
            }
            let poly = QPolynomial::new(&tower, coeffs.clone()).expect("in range");
            let pts = hyperoval_from_function(&poly).expect("binary tower");
            is_hyperoval(&pts, big).then_some(coeffs)
        })
        .collect();
    found.sort();
    let mut predicted = Vec::new();
    for j in 1..h {
        if num_integer::gcd(j, h) != 1 {
            continue;
        }
        for a in 1..q {
            let mut c = vec![0u32; h as usize];
            c[j as usize] = a;
            predicted.push(c);
        }
    }
    predicted.sort();
    let prediction_match = found == predicted;
    Ok(HyperovalReport {
        q,
        tested: total,
        hyperovals_found: found,
        predicted,
        prediction_match,
    })
}
