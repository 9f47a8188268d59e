//! The lattice `L_i(n, m; q)` of `F_{q^m}`-subspaces of `F_{q^m}^n` spanned by
//! vectors of rank weight at most `i`, with Möbius values and Whitney numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::code::support;
use crate::error::{check_budget, Error, Result};
use crate::field::{FieldDescription, FieldTower, GaloisField};
use crate::linalg::{
    big_pow, choose2, gaussian_binomial, gaussian_binomial_signed, visit_projective, BigCount,
    Matrix, Subspace, SubspaceEnumerator,
};

/// Maximal total number of subspaces enumerated by [`build_lattice`].
pub const LATTICE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeParams {
    pub i: u32,
    pub n: u32,
    pub m: u32,
    pub q: u32,
}

impl LatticeParams {
    pub fn new(i: u32, n: u32, m: u32, q: u32) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::InvalidParameter(format!("need 1 ≤ i ≤ n, got i={i}, n={n}")));
        }
        Ok(LatticeParams { i, n, m, q })
    }

    /// `Σ_k [n choose k]_{q^m}`: the number of subspaces the build enumerates.
    pub fn size_estimate(&self) -> BigCount {
        let big_q = (self.q as u64).pow(self.m);
        (0..=self.n).map(|k| gaussian_binomial(self.n, k, big_q)).sum()
    }

    /// Whether every vector has rank weight at most `i`.
    pub fn is_full(&self) -> bool {
        self.i >= self.n.min(self.m)
    }
}

impl std::fmt::Display for LatticeParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "L_{}({},{};{})", self.i, self.n, self.m, self.q)
    }
}

/// Rank weights of vectors of `F_{q^m}^n`, tabulated when small.
struct WeightOracle<'a> {
    tower: &'a FieldTower,
    table: Vec<u8>,
    big_q: u64,
}

const WEIGHT_TABLE_LIMIT: u64 = 1 << 22;

impl<'a> WeightOracle<'a> {
    fn new(tower: &'a FieldTower, n: usize) -> Self {
        let big_q = tower.big_order() as u64;
        let size = big_q.checked_pow(n as u32).filter(|&s| s <= WEIGHT_TABLE_LIMIT);
        let table = match size {
            Some(size) => (0..size)
                .into_par_iter()
                .map(|mut code| {
                    let mut v = vec![0u32; n];
                    for x in v.iter_mut() {
                        *x = (code % big_q) as u32;
                        code /= big_q;
                    }
                    tower.rank_of(&v) as u8
                })
                .collect(),
            None => Vec::new(),
        };
        WeightOracle { tower, table, big_q }
    }

    #[inline]
    fn weight(&self, v: &[u32]) -> usize {
        if self.table.is_empty() {
            return self.tower.rank_of(v);
        }
        let code = v.iter().rev().fold(0u64, |acc, &x| acc * self.big_q + x as u64);
        self.table[code as usize] as usize
    }
}

/// Incremental echelon form over a field, used on coefficient vectors.
struct Echelon<'a> {
    f: &'a GaloisField,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl<'a> Echelon<'a> {
    fn new(f: &'a GaloisField) -> Self {
        Echelon {
            f,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn insert(&mut self, v: &[u32]) -> bool {
        let f = self.f;
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c != 0 {
                for (x, &r) in v.iter_mut().zip(row).skip(p) {
                    *x = f.sub(*x, f.mul(c, r));
                }
            }
        }
        let Some(p) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(v[p]).expect("nonzero");
        for x in v.iter_mut().skip(p) {
            *x = f.mul(*x, inv);
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }
}

fn mat_mul_flat(f: &GaloisField, a: &[u32], rows: usize, inner: usize, b: &[u32], cols: usize, out: &mut [u32]) {
    out[..rows * cols].fill(0);
    for r in 0..rows {
        for t in 0..inner {
            let c = a[r * inner + t];
            if c == 0 {
                continue;
            }
            for j in 0..cols {
                let x = b[t * cols + j];
                if x != 0 {
                    out[r * cols + j] = f.add(out[r * cols + j], f.mul(c, x));
                }
            }
        }
    }
}

/// Whether the `k × n` basis `b` spans a space generated by its vectors of
/// rank weight at most `i`.
fn spanned_by_light_vectors(
    f: &GaloisField,
    oracle: &WeightOracle,
    b: &[u32],
    k: usize,
    n: usize,
    i: usize,
) -> bool {
    if k == 0 {
        return true;
    }
    let mut ech = Echelon::new(f);
    let mut word = vec![0u32; n];
    let mut done = false;
    visit_projective(k, f.order(), |c| {
        if done {
            return;
        }
        mat_mul_flat(f, c, 1, k, b, n, &mut word);
        if oracle.weight(&word) <= i && ech.insert(c) && ech.rows.len() == k {
            done = true;
        }
    });
    done
}

enum LayerIndex {
    Packed { bits: u32, map: FxHashMap<u128, u32> },
    Wide(FxHashMap<Vec<u32>, u32>),
}

impl LayerIndex {
    fn new(entries: usize, order: u32) -> Self {
        let bits = 32 - (order - 1).leading_zeros();
        if entries as u32 * bits.max(1) <= 128 {
            LayerIndex::Packed {
                bits: bits.max(1),
                map: FxHashMap::default(),
            }
        } else {
            LayerIndex::Wide(FxHashMap::default())
        }
    }

    #[inline]
    fn pack(bits: u32, v: &[u32]) -> u128 {
        v.iter().fold(0u128, |acc, &x| (acc << bits) | x as u128)
    }

    fn insert(&mut self, v: &[u32], idx: u32) {
        match self {
            LayerIndex::Packed { bits, map } => {
                map.insert(Self::pack(*bits, v), idx);
            }
            LayerIndex::Wide(map) => {
                map.insert(v.to_vec(), idx);
            }
        }
    }

    #[inline]
    fn get(&self, v: &[u32]) -> Option<u32> {
        match self {
            LayerIndex::Packed { bits, map } => map.get(&Self::pack(*bits, v)).copied(),
            LayerIndex::Wide(map) => map.get(v).copied(),
        }
    }
}

struct Layer {
    dim: usize,
    /// Flat RREF bases, `dim × n` entries per element.
    elems: Vec<u32>,
    index: LayerIndex,
}

impl Layer {
    fn new(dim: usize, n: usize, order: u32, elems: Vec<u32>) -> Self {
        let mut index = LayerIndex::new(dim * n, order);
        let stride = dim * n;
        let count = if stride == 0 { 1 } else { elems.len() / stride };
        for e in 0..count {
            index.insert(&elems[e * stride..(e + 1) * stride], e as u32);
        }
        Layer { dim, elems, index }
    }

    fn len(&self, n: usize) -> usize {
        let stride = self.dim * n;
        if stride == 0 {
            1
        } else {
            self.elems.len() / stride
        }
    }

    fn get(&self, idx: usize, n: usize) -> &[u32] {
        let stride = self.dim * n;
        &self.elems[idx * stride..(idx + 1) * stride]
    }
}

#[derive(Debug, Clone)]
enum Mobius {
    Small(Vec<Vec<i64>>),
    Big(Vec<Vec<BigInt>>),
}

trait MobiusValue: Clone + Send + Sync + Sized {
    fn unit() -> Self;
    fn add(&self, other: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
}

impl MobiusValue for i64 {
    fn unit() -> Self {
        1
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
}

impl MobiusValue for BigInt {
    fn unit() -> Self {
        BigInt::from(1)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
}

/// Whitney numbers of both kinds; `first_kind` doubles as the coefficient list
/// of the characteristic polynomial `χ(λ) = Σ_j w_j λ^{N−j}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WhitneyVector {
    pub first_kind: Vec<BigInt>,
    pub second_kind: Vec<BigCount>,
}

impl WhitneyVector {
    /// Violated sanity identities, empty when all hold.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let w = &self.first_kind;
        if w.first() != Some(&BigInt::one()) {
            out.push("w_0 ≠ 1".into());
        }
        if w.len() > 1 {
            if w[1] != -BigInt::from(self.second_kind[1].clone()) {
                out.push("w_1 ≠ −W_1".into());
            }
            if !w.iter().sum::<BigInt>().is_zero() {
                out.push("Σ w_j ≠ 0".into());
            }
        }
        for (j, x) in w.iter().enumerate() {
            let signed = if j % 2 == 0 { x.clone() } else { -x };
            if signed.is_negative() {
                out.push(format!("(−1)^{j} w_{j} < 0"));
            }
        }
        out
    }

    /// `χ(L; λ)` evaluated at an integer.
    pub fn characteristic_polynomial_at(&self, lambda: i64) -> BigInt {
        let top = self.first_kind.len() - 1;
        self.first_kind
            .iter()
            .enumerate()
            .map(|(j, w)| w * BigInt::from(lambda).pow((top - j) as u32))
            .sum()
    }
}

pub struct RankMetricLattice {
    params: LatticeParams,
    tower: Arc<FieldTower>,
    layers: Vec<Layer>,
    mobius: Mobius,
}

impl std::fmt::Debug for RankMetricLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} with layer sizes {:?}", self.params, self.layer_sizes())
    }
}

/// Enumerates `L_i(n, m; q)` and computes its Möbius function.
pub fn build_lattice(params: LatticeParams) -> Result<RankMetricLattice> {
    build_lattice_with_budget(params, LATTICE_BUDGET)
}

pub fn build_lattice_with_budget(params: LatticeParams, budget: u64) -> Result<RankMetricLattice> {
    let params = LatticeParams::new(params.i, params.n, params.m, params.q)?;
    check_budget(&params.size_estimate(), budget)?;
    let tower = FieldTower::for_q(params.q, params.m)?;
    let big = tower.big();
    let n = params.n as usize;
    let i = params.i as usize;
    let order = big.order();
    let oracle = WeightOracle::new(&tower, n);
    let mut layers = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let en = SubspaceEnumerator::new(n, k, order);
        let shards = en.shards(2);
        let pieces: Vec<Vec<u32>> = shards
            .par_iter()
            .map(|&s| {
                let mut kept = Vec::new();
                en.visit_shard(s, |b| {
                    if spanned_by_light_vectors(big, &oracle, b, k, n, i) {
                        kept.extend_from_slice(b);
                    }
                });
                kept
            })
            .collect();
        let elems = if k == 0 { Vec::new() } else { pieces.concat() };
        layers.push(Layer::new(k, n, order, elems));
    }
    let mut lattice = RankMetricLattice {
        params,
        tower,
        layers,
        mobius: Mobius::Small(Vec::new()),
    };
    lattice.mobius = match lattice.compute_mobius::<i64>() {
        Some(v) => Mobius::Small(v),
        None => Mobius::Big(lattice.compute_mobius::<BigInt>().expect("big integers do not overflow")),
    };
    Ok(lattice)
}

/// Flat RREF bases of all `e`-subspaces of `F^d`, for `e < d`.
fn coefficient_subspaces(d: usize, order: u32) -> Vec<Vec<u32>> {
    (0..d)
        .map(|e| {
            let mut out = Vec::new();
            if e > 0 {
                SubspaceEnumerator::new(d, e, order).visit_all(|c| out.extend_from_slice(c));
            }
            out
        })
        .collect()
}

impl RankMetricLattice {
    fn compute_mobius<T: MobiusValue>(&self) -> Option<Vec<Vec<T>>> {
        let n = self.n();
        let big = self.tower.big();
        let order = big.order();
        let mut mu: Vec<Vec<T>> = vec![vec![T::unit()]];
        for d in 1..self.layers.len() {
            let layer = &self.layers[d];
            let count = layer.len(n);
            if count == 0 {
                mu.push(Vec::new());
                continue;
            }
            let subs = coefficient_subspaces(d, order);
            let lower = &mu;
            let values: Vec<Option<T>> = (0..count)
                .into_par_iter()
                .map(|x| {
                    let bx = layer.get(x, n);
                    let mut sum = lower[0][0].clone();
                    let mut buf = vec![0u32; d * n];
                    for (e, flat) in subs.iter().enumerate().skip(1) {
                        let stride = e * d;
                        let lay = &self.layers[e];
                        for c in flat.chunks_exact(stride) {
                            // c and bx are both reduced, so c·bx is reduced too.
                            mat_mul_flat(big, c, e, d, bx, n, &mut buf);
                            if let Some(y) = lay.index.get(&buf[..e * n]) {
                                sum = sum.add(&lower[e][y as usize])?;
                            }
                        }
                    }
                    sum.neg()
                })
                .collect();
            mu.push(values.into_iter().collect::<Option<Vec<T>>>()?);
        }
        Some(mu)
    }

    pub fn params(&self) -> LatticeParams {
        self.params
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    fn n(&self) -> usize {
        self.params.n as usize
    }

    /// Rank of the top element.
    pub fn rank(&self) -> usize {
        (0..self.layers.len())
            .rev()
            .find(|&d| self.layers[d].len(self.n()) > 0)
            .unwrap_or(0)
    }

    /// Number of elements in each dimension.
    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.len(self.n())).collect()
    }

    pub fn element_count(&self) -> usize {
        self.layer_sizes().iter().sum()
    }

    pub fn element(&self, dim: usize, idx: usize) -> Subspace {
        let n = self.n();
        let rows = if dim == 0 { 0 } else { dim };
        let flat = if dim == 0 {
            Vec::new()
        } else {
            self.layers[dim].get(idx, n).to_vec()
        };
        Subspace::span(&Matrix::from_flat(rows, n, flat), self.tower.big())
    }

    /// Position of `x` in the lattice, if it is an element.
    pub fn index_of(&self, x: &Subspace) -> Option<(usize, usize)> {
        if x.ambient_dim() != self.n() || x.field() != self.tower.big().id() {
            return None;
        }
        let d = x.dim();
        if d == 0 {
            return Some((0, 0));
        }
        self.layers[d]
            .index
            .get(x.basis().data())
            .map(|i| (d, i as usize))
    }

    pub fn contains(&self, x: &Subspace) -> bool {
        self.index_of(x).is_some()
    }

    pub fn mobius(&self, dim: usize, idx: usize) -> BigInt {
        match &self.mobius {
            Mobius::Small(v) => BigInt::from(v[dim][idx]),
            Mobius::Big(v) => v[dim][idx].clone(),
        }
    }

    /// Whether the Möbius values had to be promoted to big integers.
    pub fn uses_big_mobius(&self) -> bool {
        matches!(self.mobius, Mobius::Big(_))
    }

    pub fn whitney(&self) -> WhitneyVector {
        let top = self.rank();
        let n = self.n();
        let first_kind = (0..=top)
            .map(|d| (0..self.layers[d].len(n)).map(|x| self.mobius(d, x)).sum())
            .collect();
        let second_kind = (0..=top)
            .map(|d| BigCount::from(self.layers[d].len(n)))
            .collect();
        WhitneyVector {
            first_kind,
            second_kind,
        }
    }

    /// `w_j`, zero beyond the rank.
    pub fn whitney_first(&self, j: usize) -> BigInt {
        self.whitney()
            .first_kind
            .get(j)
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    /// Largest element below `x`: the span of the light vectors of `x`.
    pub fn interior(&self, x: &Subspace) -> Subspace {
        let big = self.tower.big();
        let n = self.n();
        let oracle = WeightOracle {
            tower: &self.tower,
            table: Vec::new(),
            big_q: big.order() as u64,
        };
        let mut light = Vec::new();
        let mut word = vec![0u32; n];
        let k = x.dim();
        if k > 0 {
            visit_projective(k, big.order(), |c| {
                mat_mul_flat(big, c, 1, k, x.basis().data(), n, &mut word);
                if oracle.weight(&word) <= self.params.i as usize {
                    light.push(word.clone());
                }
            });
        }
        Subspace::span_rows(&light, n, big)
    }

    pub fn join(&self, x: &Subspace, y: &Subspace) -> Result<Subspace> {
        x.join(y, self.tower.big())
    }

    pub fn meet(&self, x: &Subspace, y: &Subspace) -> Result<Subspace> {
        Ok(self.interior(&x.meet(y, self.tower.big())?))
    }

    /// Number of non-bottom elements `X` with `Σ_{Y ≤ X} μ(Y) ≠ 0`, every
    /// sub-element canonicalized by a fresh row reduction.
    pub fn mobius_identity_violations(&self) -> usize {
        let n = self.n();
        let big = self.tower.big();
        let order = big.order();
        (1..self.layers.len())
            .map(|d| {
                let layer = &self.layers[d];
                let subs = coefficient_subspaces(d, order);
                (0..layer.len(n))
                    .into_par_iter()
                    .filter(|&x| {
                        let bx = layer.get(x, n);
                        let mut sum = self.mobius(d, x) + self.mobius(0, 0);
                        let mut buf = vec![0u32; d * n];
                        for (e, flat) in subs.iter().enumerate().skip(1) {
                            for c in flat.chunks_exact(e * d) {
                                mat_mul_flat(big, c, e, d, bx, n, &mut buf);
                                let y = Subspace::span(
                                    &Matrix::from_flat(e, n, buf[..e * n].to_vec()),
                                    big,
                                );
                                if let Some((ye, yi)) = self.index_of(&y) {
                                    sum += self.mobius(ye, yi);
                                }
                            }
                        }
                        !sum.is_zero()
                    })
                    .count()
            })
            .sum()
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> Subspace {
        let sizes = self.layer_sizes();
        let total: usize = sizes.iter().sum();
        let mut r = rng.gen_range(0..total);
        for (d, &s) in sizes.iter().enumerate() {
            if r < s {
                return self.element(d, r);
            }
            r -= s;
        }
        unreachable!("index within total")
    }

    /// Samples pairs and checks that joins stay in the lattice, that meets are
    /// elements, and `ρ(X∨Y) + ρ(X∧Y) ≤ ρ(X) + ρ(Y)`.
    pub fn check_semimodularity(&self, samples: usize, seed: u64) -> SampleReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut report = SampleReport {
            samples,
            ..SampleReport::default()
        };
        for _ in 0..samples {
            let x = self.random_element(&mut rng);
            let y = self.random_element(&mut rng);
            let j = self.join(&x, &y).expect("same ambient");
            let m = self.meet(&x, &y).expect("same ambient");
            if !self.contains(&j) {
                report.closure_failures += 1;
            }
            if !self.contains(&m) {
                report.meet_failures += 1;
            }
            if j.dim() + m.dim() > x.dim() + y.dim() {
                report.semimodularity_failures += 1;
            }
        }
        report
    }

    /// Counts elements of `[0, X]` per dimension by lookups in this lattice.
    pub fn interval_profile(&self, x: &Subspace) -> Vec<usize> {
        let d = x.dim();
        let n = self.n();
        let big = self.tower.big();
        let mut out = vec![0usize; d + 1];
        out[0] = 1;
        if d == 0 {
            return out;
        }
        out[d] = self.contains(x) as usize;
        let subs = coefficient_subspaces(d, big.order());
        let mut buf = vec![0u32; d * n];
        for (e, flat) in subs.iter().enumerate().skip(1) {
            for c in flat.chunks_exact(e * d) {
                mat_mul_flat(big, c, e, d, x.basis().data(), n, &mut buf);
                if self.layers[e].index.get(&buf[..e * n]).is_some() {
                    out[e] += 1;
                }
            }
        }
        out
    }

    /// For sampled `X`, compares `[0, X]` with the interval below the
    /// restriction of `X` to `supp(X) ≅ F_q^t`, recomputed inside `L_i(t, m; q)`.
    pub fn check_interval_self_similarity(&self, samples: usize, seed: u64) -> Vec<IntervalCheck> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let big = self.tower.big();
        let i = self.params.i as usize;
        (0..samples)
            .map(|_| {
                let x = self.random_element(&mut rng);
                let s = support(&self.tower, &x);
                let t = s.dim();
                let piv = s.pivots();
                let d = x.dim();
                let reduced: Vec<u32> = x
                    .basis()
                    .row_iter()
                    .flat_map(|r| piv.iter().map(|&p| r[p]).collect::<Vec<_>>())
                    .collect();
                let oracle = WeightOracle {
                    tower: &self.tower,
                    table: Vec::new(),
                    big_q: big.order() as u64,
                };
                let mut restricted = vec![0usize; d + 1];
                restricted[0] = 1;
                let mut buf = vec![0u32; d * t.max(1)];
                for e in 1..=d {
                    SubspaceEnumerator::new(d, e, big.order()).visit_all(|c| {
                        mat_mul_flat(big, c, e, d, &reduced, t, &mut buf);
                        let y = Subspace::span(
                            &Matrix::from_flat(e, t, buf[..e * t].to_vec()),
                            big,
                        );
                        if spanned_by_light_vectors(big, &oracle, y.basis().data(), e, t, i) {
                            restricted[e] += 1;
                        }
                    });
                }
                let direct = self.interval_profile(&x);
                IntervalCheck {
                    dim: d,
                    support_dim: t,
                    matches: direct == restricted,
                    direct,
                    restricted,
                }
            })
            .collect()
    }

    /// Writes the versioned cache file.
    pub fn save_cache(&self, path: &Path) -> Result<()> {
        let n = self.n();
        let mut s = String::from("rmlkit-lattice v1\n");
        writeln!(s, "params {}", serde_json::to_string(&self.params)?).unwrap();
        writeln!(s, "field {}", serde_json::to_string(&self.tower.description())?).unwrap();
        for (d, layer) in self.layers.iter().enumerate() {
            let count = if d == 0 { 1 } else { layer.len(n) };
            writeln!(s, "layer {d} {count}").unwrap();
            for x in 0..count {
                let entries: Vec<String> = if d == 0 {
                    Vec::new()
                } else {
                    layer.get(x, n).iter().map(|v| v.to_string()).collect()
                };
                writeln!(s, "{} | {}", self.mobius(d, x), entries.join(" ")).unwrap();
            }
        }
        s.push_str("end\n");
        std::fs::write(path, s)?;
        Ok(())
    }

    pub fn load_cache(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut lines = text.lines();
        let bad = |what: &str| Error::Parse(format!("lattice cache: {what}"));
        if lines.next() != Some("rmlkit-lattice v1") {
            return Err(bad("unknown header"));
        }
        let params: LatticeParams = serde_json::from_str(
            lines
                .next()
                .and_then(|l| l.strip_prefix("params "))
                .ok_or_else(|| bad("missing params"))?,
        )?;
        let desc: FieldDescription = serde_json::from_str(
            lines
                .next()
                .and_then(|l| l.strip_prefix("field "))
                .ok_or_else(|| bad("missing field"))?,
        )?;
        let tower = FieldTower::from_description(&desc)?;
        if tower.q() != params.q || tower.m() != params.m {
            return Err(bad("field does not match params"));
        }
        let n = params.n as usize;
        let order = tower.big_order();
        let mut layers = Vec::new();
        let mut mu: Vec<Vec<BigInt>> = Vec::new();
        for d in 0..=n {
            let head = lines.next().ok_or_else(|| bad("truncated"))?;
            let mut parts = head.split_whitespace();
            if parts.next() != Some("layer") || parts.next() != Some(&d.to_string()) {
                return Err(bad("layer header"));
            }
            let count: usize = parts
                .next()
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad("layer count"))?;
            let mut elems = Vec::with_capacity(count * d * n);
            let mut values = Vec::with_capacity(count);
            for _ in 0..count {
                let line = lines.next().ok_or_else(|| bad("truncated layer"))?;
                let (m, rest) = line.split_once('|').ok_or_else(|| bad("element line"))?;
                values.push(m.trim().parse::<BigInt>().map_err(|_| bad("μ value"))?);
                let row: Vec<u32> = rest
                    .split_whitespace()
                    .map(|x| x.parse().map_err(|_| bad("entry")))
                    .collect::<Result<_>>()?;
                if row.len() != d * n || row.iter().any(|&x| x >= order) {
                    return Err(bad("element size"));
                }
                elems.extend(row);
            }
            layers.push(Layer::new(d, n, order, elems));
            mu.push(values);
        }
        if lines.next() != Some("end") {
            return Err(bad("missing end marker"));
        }
        let small: Option<Vec<Vec<i64>>> = mu
            .iter()
            .map(|l| l.iter().map(|v| v.to_i64()).collect())
            .collect();
        let mobius = match small {
            Some(v) => Mobius::Small(v),
            None => Mobius::Big(mu),
        };
        Ok(RankMetricLattice {
            params,
            tower,
            layers,
            mobius,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleReport {
    pub samples: usize,
    pub closure_failures: usize,
    pub meet_failures: usize,
    pub semimodularity_failures: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalCheck {
    pub dim: usize,
    pub support_dim: usize,
    pub direct: Vec<usize>,
    pub restricted: Vec<usize>,
    pub matches: bool,
}

fn sign(e: i64) -> BigInt {
    if e.rem_euclid(2) == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

fn bpow(q: u64, e: u32) -> BigInt {
    BigInt::from(big_pow(q, e))
}

/// `w_j` of the full subspace lattice of `F_Q^n`: `(−1)^j Q^{C(j,2)} [n choose j]_Q`.
pub fn subspace_lattice_whitney(n: u32, j: u32, big_q: u64) -> BigInt {
    sign(j as i64) * bpow(big_q, choose2(j as i64)) * BigInt::from(gaussian_binomial(n, j, big_q))
}

/// The printed closed formula for `w_j(2, n, 3; q)`, `n ∈ {4, 5, 6}`.
pub fn closed_formula_i2m3(n: u32, j: u32, q: u64) -> Result<BigInt> {
    if !(4..=6).contains(&n) {
        return Err(Error::InvalidParameter(format!("closed formula covers n ∈ {{4,5,6}}, got {n}")));
    }
    if j < 1 || j > n {
        return Err(Error::InvalidParameter(format!("need 1 ≤ j ≤ n, got j={j}")));
    }
    let (n_i, j_i) = (n as i64, j as i64);
    let qb = BigInt::from(q);
    let q3 = q.pow(3);
    let q6 = q.pow(6);
    let qpow = |e: u32| bpow(q, e);
    let two_factor = (qpow(3) - &qb) * (qpow(3) - qpow(2));
    if n <= 5 {
        return Ok(gaussian_binomial_signed(n_i, 3, q)
            * gaussian_binomial_signed(n_i - 1, j_i - 1, q3)
            * two_factor
            * sign(j_i - 1)
            * bpow(q, 3 * choose2(j_i - 1)));
    }
    let first = gaussian_binomial_signed(6, 3, q)
        * gaussian_binomial_signed(5, j_i - 1, q3)
        * two_factor
        * sign(j_i - 1)
        * bpow(q, choose2(j_i - 1));
    let q6b = BigInt::from(q6);
    let second = gaussian_binomial_signed(4, j_i - 2, q3)
        * (&q6b - &qb)
        * (&q6b - qpow(2))
        * (&q6b - qpow(4))
        * (&q6b - qpow(5))
        * sign(j_i - 2)
        * bpow(q, 3 * choose2(j_i - 2));
    Ok(first + second)
}

/// `w_j(i,n,m;q) = Σ_{s=1}^{ij} [n,s]_q Σ_{t=1}^{s} w_j(i,t,m;q) [s,t]_q q^{C(s−t,2)} (−1)^{s−t}`
/// with `base[t] = w_j(i,t,m;q)`; requires `n > ij`.
pub fn whitney_recursion(params: &LatticeParams, j: u32, base: &BTreeMap<u32, BigInt>) -> Result<BigInt> {
    let ij = params.i * j;
    if params.n <= ij {
        return Err(Error::InvalidParameter(format!(
            "the recursion needs n > ij (n={}, ij={ij})",
            params.n
        )));
    }
    let q = params.q as u64;
    for t in 1..=ij {
        if !base.contains_key(&t) {
            return Err(Error::MissingBaseValue(t as usize));
        }
    }
    let mut total = BigInt::zero();
    for s in 1..=ij {
        let mut inner = BigInt::zero();
        for t in 1..=s {
            let d = (s - t) as i64;
            inner += &base[&t]
                * BigInt::from(gaussian_binomial(s, t, q))
                * bpow(q, choose2(d))
                * sign(d);
        }
        total += BigInt::from(gaussian_binomial(params.n, s, q)) * inner;
    }
    Ok(total)
}

/// Base values `w_j(i, t, m; q)` for `t = 1..=ij`, by brute force.
pub fn recursion_base(params: &LatticeParams, j: u32) -> Result<BTreeMap<u32, BigInt>> {
    let mut base = BTreeMap::new();
    for t in 1..=params.i * j {
        let w = if params.i > t {
            // L_i(t, m; q) with i ≥ t is the full subspace lattice.
            let full = LatticeParams {
                i: t,
                n: t,
                ..*params
            };
            build_lattice(full)?.whitney_first(j as usize)
        } else {
            build_lattice(LatticeParams { n: t, ..*params })?.whitney_first(j as usize)
        };
        base.insert(t, w);
    }
    Ok(base)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub method: String,
    pub value: String,
    pub brute_force: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub params: LatticeParams,
    pub j: u32,
    pub brute_force: String,
    pub recursion: Option<String>,
    pub closed_formula: Option<String>,
    pub subspace_formula: Option<String>,
    pub agreements: Vec<String>,
    pub discrepancies: Vec<Discrepancy>,
}

impl VerificationRecord {
    pub fn has_mismatch(&self) -> bool {
        !self.discrepancies.is_empty()
    }
}

/// Compares the brute-force `w_j` of a built lattice with every applicable
/// formula. Brute force is the reference; nothing is adjusted.
pub fn verify_whitney(lattice: &RankMetricLattice, j: u32) -> Result<VerificationRecord> {
    let params = lattice.params();
    let brute = lattice.whitney_first(j as usize);
    let mut record = VerificationRecord {
        params,
        j,
        brute_force: brute.to_string(),
        recursion: None,
        closed_formula: None,
        subspace_formula: None,
        agreements: Vec::new(),
        discrepancies: Vec::new(),
    };
    let compare = |method: &str, value: &BigInt, record: &mut VerificationRecord| {
        if *value == brute {
            record.agreements.push(method.to_string());
        } else {
            record.discrepancies.push(Discrepancy {
                method: method.to_string(),
                value: value.to_string(),
                brute_force: brute.to_string(),
            });
        }
    };
    if params.is_full() {
        let big_q = (params.q as u64).pow(params.m);
        let v = subspace_lattice_whitney(params.n, j, big_q);
        record.subspace_formula = Some(v.to_string());
        compare("subspace_formula", &v, &mut record);
    }
    if j >= 1 && params.n > params.i * j {
        let base = recursion_base(&params, j)?;
        let v = whitney_recursion(&params, j, &base)?;
        record.recursion = Some(v.to_string());
        compare("recursion", &v, &mut record);
    }
    if params.i == 2 && params.m == 3 && (4..=6).contains(&params.n) && j >= 1 && j <= params.n {
        let v = closed_formula_i2m3(params.n, j, params.q as u64)?;
        record.closed_formula = Some(v.to_string());
        compare("closed_formula", &v, &mut record);
    }
    Ok(record)
}
