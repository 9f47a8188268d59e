//! Exhaustive code counts over all `k`-subspaces of `F_{q^m}^n`, the matching
//! counting formulas, densities and their limits.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::RankMetricCode;
use crate::error::{check_budget, Error, Result};
use crate::field::{prime_power, FieldTower, GaloisField};
use crate::linalg::{big_pow, euler_phi, gaussian_binomial, gl_order, BigCount, Shard, SubspaceEnumerator};

/// Rank-check budget without the heavy flag.
pub const LIGHT_BUDGET: u64 = 100_000_000;
/// Rank-check budget with the heavy flag.
pub const HEAVY_BUDGET: u64 = 20_000_000_000;

/// `F_q`-rank of vectors over `F_{q^m}`, from precomputed coordinates.
struct RankKernel {
    m: usize,
    q: usize,
    binary: bool,
    coords: Vec<u8>,
    add: Vec<u8>,
    mul: Vec<u8>,
    inv: Vec<u8>,
}

impl RankKernel {
    fn new(tower: &FieldTower) -> Self {
        let m = tower.m() as usize;
        let q = tower.q() as usize;
        let small = tower.small();
        let binary = q == 2;
        let mut coords = Vec::new();
        let (mut add, mut mul, mut inv) = (Vec::new(), Vec::new(), Vec::new());
        if !binary {
            coords = vec![0u8; tower.big_order() as usize * m];
            let mut c = vec![0u32; m];
            for a in 0..tower.big_order() {
                tower.coords_into(a, &mut c);
                for (j, &x) in c.iter().enumerate() {
                    coords[a as usize * m + j] = x as u8;
                }
            }
            for a in 0..q as u32 {
                inv.push(if a == 0 { 0 } else { small.inv(a).unwrap() as u8 });
                for b in 0..q as u32 {
                    add.push(small.add(a, small.neg(b)) as u8);
                    mul.push(small.mul(a, b) as u8);
                }
            }
        }
        RankKernel {
            m,
            q,
            binary,
            coords,
            add,
            mul,
            inv,
        }
    }

    /// `dim_{F_q} ⟨v⟩`.
    #[inline]
    fn rank(&self, v: &[u32]) -> usize {
        if self.binary {
            let mut basis = [0u32; 32];
            let mut rank = 0;
            for &e in v {
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
            }
            return rank;
        }
        let (m, q) = (self.m, self.q);
        // rows[p] has a leading 1 in column p; `add` holds a - b.
        let mut rows = [[0u8; 32]; 32];
        let mut have = [false; 32];
        let mut rank = 0;
        for &e in v {
            let mut x = [0u8; 32];
            x[..m].copy_from_slice(&self.coords[e as usize * m..(e as usize + 1) * m]);
            let mut lead = None;
            for p in 0..m {
                let c = x[p] as usize;
                if c == 0 {
                    continue;
                }
                if have[p] {
                    for j in p..m {
                        let t = self.mul[c * q + rows[p][j] as usize] as usize;
                        x[j] = self.add[x[j] as usize * q + t];
                    }
                } else {
                    lead = Some(p);
                    break;
                }
            }
            if let Some(p) = lead {
                let iv = self.inv[x[p] as usize] as usize;
                for j in p..m {
                    x[j] = self.mul[iv * q + x[j] as usize];
                }
                rows[p] = x;
                have[p] = true;
                rank += 1;
                if rank == m {
                    break;
                }
            }
        }
        rank
    }
}

/// Visits projective coefficient vectors of `F^k` in order until `f` returns false.
fn all_projective(k: usize, order: u32, mut f: impl FnMut(&[u32]) -> bool) -> bool {
    let mut c = vec![0u32; k];
    for lead in 0..k {
        c.fill(0);
        c[lead] = 1;
        loop {
            if !f(&c) {
                return false;
            }
            let mut i = k;
            let mut wrapped = true;
            while i > lead + 1 {
                i -= 1;
                c[i] += 1;
                if c[i] < order {
                    wrapped = false;
                    break;
                }
                c[i] = 0;
            }
            if wrapped {
                break;
            }
        }
    }
    true
}

/// Scans the code with RREF basis `b` (`k × n`); false as soon as a codeword of
/// rank below `d` appears. On success `hist` holds the projective codewords of
/// each rank.
fn scan_code(
    big: &GaloisField,
    kernel: &RankKernel,
    b: &[u32],
    k: usize,
    n: usize,
    d: usize,
    word: &mut [u32],
    hist: &mut [u64],
) -> bool {
    // The basis rows are the sparsest codewords, so they go first.
    for r in 0..k {
        if kernel.rank(&b[r * n..(r + 1) * n]) < d {
            return false;
        }
    }
    hist.fill(0);
    all_projective(k, big.order(), |c| {
        word.fill(0);
        for (r, &cr) in c.iter().enumerate() {
            if cr == 0 {
                continue;
            }
            for j in 0..n {
                let x = b[r * n + j];
                if x != 0 {
                    word[j] = big.add(word[j], big.mul(cr, x));
                }
            }
        }
        let w = kernel.rank(word);
        hist[w] += 1;
        w >= d
    })
}

#[derive(Debug, Clone)]
pub struct CensusOptions {
    pub threads: Option<usize>,
    /// Leading free entries fixed per shard.
    pub split_depth: usize,
    pub checkpoint: Option<PathBuf>,
    pub heavy: bool,
    /// Process at most this many new shards, then return a partial result.
    pub stop_after: Option<usize>,
    /// Record the idealizer dimension and light-word count of every hit.
    pub fingerprints: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            threads: None,
            split_depth: 2,
            checkpoint: None,
            heavy: false,
            stop_after: None,
            fingerprints: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityValue {
    pub exact: String,
    pub decimal: String,
}

impl DensityValue {
    pub fn new(r: &BigRational) -> Self {
        DensityValue {
            exact: format!("{}/{}", r.numer(), r.denom()),
            decimal: render_significant(r, 12),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusResult {
    pub q: u32,
    pub m: u32,
    pub n: u32,
    pub k: u32,
    pub d: u32,
    pub method: String,
    pub exhaustive_count: Option<String>,
    pub formula_value: Option<String>,
    pub matches: Option<bool>,
    pub density: Option<DensityValue>,
    pub subspaces_scanned: u64,
    pub shards_total: usize,
    pub shards_completed: usize,
    pub threads: usize,
    pub complete: bool,
    pub elapsed_secs: f64,
    /// `"idealizer_dim:light_words"` → number of codes.
    pub fingerprints: BTreeMap<String, u64>,
}

impl CensusResult {
    pub fn exhaustive(&self) -> Option<BigCount> {
        self.exhaustive_count.as_ref().map(|s| s.parse().expect("decimal"))
    }

    pub fn formula(&self) -> Option<BigCount> {
        self.formula_value.as_ref().map(|s| s.parse().expect("decimal"))
    }

    fn attach(&mut self, formula: Option<BigCount>) {
        let count = self.exhaustive().or_else(|| formula.clone());
        self.formula_value = formula.as_ref().map(|f| f.to_string());
        self.matches = match (self.exhaustive(), &formula) {
            (Some(a), Some(b)) if self.complete => Some(a == *b),
            _ => None,
        };
        if let Some(c) = count {
            if self.complete || self.exhaustive_count.is_none() {
                let big_q = (self.q as u64).pow(self.m);
                let r = density_of(&c, self.n, self.k, big_q);
                self.density = Some(DensityValue::new(&r));
            }
        }
    }
}

#[derive(Default, Clone)]
struct ShardTally {
    scanned: u64,
    count: u64,
    fingerprints: BTreeMap<String, u64>,
}

fn parse_checkpoint_line(line: &str) -> Option<(usize, ShardTally)> {
    let mut parts = line.split_whitespace();
    let idx = parts.next()?.parse().ok()?;
    let scanned = parts.next()?.parse().ok()?;
    let count = parts.next()?.parse().ok()?;
    let mut fingerprints = BTreeMap::new();
    if let Some(fp) = parts.next() {
        if fp != "-" {
            for kv in fp.split(';') {
                let (k, v) = kv.split_once('=')?;
                fingerprints.insert(k.to_string(), v.parse().ok()?);
            }
        }
    }
    Some((
        idx,
        ShardTally {
            scanned,
            count,
            fingerprints,
        },
    ))
}

fn checkpoint_line(idx: usize, t: &ShardTally) -> String {
    let fp = if t.fingerprints.is_empty() {
        "-".to_string()
    } else {
        t.fingerprints
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    };
    format!("{idx} {} {} {fp}\n", t.scanned, t.count)
}

/// Counts `k`-dimensional codes in `F_{q^m}^n` with minimum rank distance at
/// least `d` by scanning every subspace.
pub fn count_codes_exhaustive(
    q: u32,
    m: u32,
    n: u32,
    k: u32,
    d: u32,
    opts: &CensusOptions,
) -> Result<CensusResult> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    let tower = FieldTower::for_q(q, m)?;
    let big_q = tower.big_order() as u64;
    let projective = (big_pow(big_q, k) - 1u32) / (big_q - 1);
    let estimate = gaussian_binomial(n, k, big_q) * projective;
    check_budget(&estimate, if opts.heavy { HEAVY_BUDGET } else { LIGHT_BUDGET })?;
    let header = format!("rmlkit-census v1 q={q} m={m} n={n} k={k} d={d} split={}", opts.split_depth);
    let en = SubspaceEnumerator::new(n as usize, k as usize, tower.big_order());
    let shards = en.shards(opts.split_depth);

    let mut done: BTreeMap<usize, ShardTally> = BTreeMap::new();
    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            let text = std::fs::read_to_string(path)?;
            let mut lines = text.lines();
            if lines.next() != Some(header.as_str()) {
                return Err(Error::Parse(format!(
                    "checkpoint {} belongs to a different census",
                    path.display()
                )));
            }
            for line in lines {
                // A torn last line from an interrupted write is ignored.
                if let Some((idx, t)) = parse_checkpoint_line(line) {
                    done.insert(idx, t);
                }
            }
        } else {
            std::fs::write(path, format!("{header}\n"))?;
        }
    }
    let mut todo: Vec<(usize, Shard)> = shards
        .iter()
        .copied()
        .enumerate()
        .filter(|(i, _)| !done.contains_key(i))
        .collect();
    if let Some(limit) = opts.stop_after {
        todo.truncate(limit);
    }

    let writer = match &opts.checkpoint {
        Some(path) => Some(Mutex::new(OpenOptions::new().append(true).open(path)?)),
        None => None,
    };
    let start = Instant::now();
    let tower_ref = &tower;
    let kernel = RankKernel::new(&tower);
    let (nn, kk, dd) = (n as usize, k as usize, d as usize);
    let run = || -> Result<Vec<(usize, ShardTally)>> {
        todo.par_iter()
            .map(|&(idx, shard)| {
                let big = tower_ref.big();
                let mut tally = ShardTally::default();
                let mut word = vec![0u32; nn];
                let mut hist = vec![0u64; nn.max(m as usize) + 1];
                en.visit_shard(shard, |b| {
                    tally.scanned += 1;
                    if scan_code(big, &kernel, b, kk, nn, dd, &mut word, &mut hist) {
                        tally.count += 1;
                        if opts.fingerprints {
                            let code = RankMetricCode::from_rows(
                                tower_ref,
                                &b.chunks(nn).collect::<Vec<_>>(),
                                nn,
                            )
                            .expect("valid basis");
                            let key = format!("{}:{}", code.right_idealizer_dim(), hist[dd]);
                            *tally.fingerprints.entry(key).or_default() += 1;
                        }
                    }
                });
                if let Some(w) = &writer {
                    let mut f = w.lock().expect("checkpoint writer");
                    f.write_all(checkpoint_line(idx, &tally).as_bytes())?;
                    f.flush()?;
                }
                Ok((idx, tally))
            })
            .collect()
    };
    let threads = opts.threads.unwrap_or_else(rayon::current_num_threads);
    let fresh = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?
        .install(run)?;
    done.extend(fresh);

    let mut total = ShardTally::default();
    for t in done.values() {
        total.scanned += t.scanned;
        total.count += t.count;
        for (k, v) in &t.fingerprints {
            *total.fingerprints.entry(k.clone()).or_default() += v;
        }
    }
    let complete = done.len() == shards.len();
    Ok(CensusResult {
        q,
        m,
        n,
        k,
        d,
        method: "exhaustive".into(),
        exhaustive_count: Some(total.count.to_string()),
        formula_value: None,
        matches: None,
        density: None,
        subspaces_scanned: total.scanned,
        shards_total: shards.len(),
        shards_completed: done.len(),
        threads,
        complete,
        elapsed_secs: start.elapsed().as_secs_f64(),
        fingerprints: total.fingerprints,
    })
}

/// Exhaustive count of 2-dimensional MRD codes in `F_{q^m}^m`, compared with
/// the applicable formula.
pub fn count_mrd_exhaustive(q: u32, m: u32, opts: &CensusOptions) -> Result<CensusResult> {
    if m < 2 {
        return Err(Error::InvalidParameter("need m ≥ 2".into()));
    }
    let mut r = count_codes_exhaustive(q, m, m, 2, m - 1, opts)?;
    r.method = "exhaustive".into();
    r.attach(mrd_count_formula(q, m).ok());
    Ok(r)
}

/// `φ(m)/2 · |GL_m(2)| / (2^m − 1)`.
pub fn q2_family(m: u32) -> Result<BigCount> {
    if !(2..=8).contains(&m) {
        return Err(Error::InvalidParameter(format!("q = 2 family covers 2 ≤ m ≤ 8, got {m}")));
    }
    let num = BigUint::from(euler_phi(m as u64)) * gl_order(m, 2);
    let den = BigUint::from(2u32) * (big_pow(2, m) - 1u32);
    let (quot, rem) = num.div_rem(&den);
    if !rem.is_zero() {
        return Err(Error::InvalidParameter(format!("formula is not integral at m = {m}")));
    }
    Ok(quot)
}

/// `M(q) = ½ q^7 (q^3 − 1)(q^2 − 1)(q − 1)(q^3 − q^2 − q − 1)`.
pub fn m4_family(q: u32) -> Result<BigCount> {
    check_m4_q(q)?;
    let q = BigInt::from(q);
    let v: BigInt = q.pow(7) * (q.pow(3) - 1) * (q.pow(2) - 1) * (&q - 1) * (q.pow(3) - q.pow(2) - &q - 1);
    let (quot, rem) = v.div_rem(&BigInt::from(2));
    debug_assert!(rem.is_zero());
    Ok(quot.to_biguint().expect("positive for q ≥ 2"))
}

fn check_m4_q(q: u32) -> Result<()> {
    if prime_power(q).is_none() || q > 16 {
        return Err(Error::InvalidParameter(format!("m = 4 family covers prime powers q ≤ 16, got {q}")));
    }
    Ok(())
}

/// `|GL_4(q)|/(q^4 − 1) + (q(q−1)/2 − 1)·|GL_4(q)|/(q^2 − 1)`: the orbit sum
/// before simplification.
pub fn m4_orbit_sum(q: u32) -> Result<BigCount> {
    check_m4_q(q)?;
    let gl = gl_order(4, q as u64);
    let q64 = q as u64;
    let classes = q64 * (q64 - 1) / 2 - 1;
    Ok(&gl / (big_pow(q64, 4) - 1u32) + BigUint::from(classes) * (&gl / (big_pow(q64, 2) - 1u32)))
}

/// Number of 2-dimensional MRD codes in `F_{q^m}^m` for the families with a
/// known formula.
pub fn mrd_count_formula(q: u32, m: u32) -> Result<BigCount> {
    match (q, m) {
        (2, _) => q2_family(m),
        (_, 4) => m4_family(q),
        _ => Err(Error::InvalidParameter(format!("no counting formula for q = {q}, m = {m}"))),
    }
}

/// `|GL_{mk}(q)| / ∏_{i<k} (q^{mk} − q^{mi})`.
pub fn one_weight_formula(m: u32, k: u32, q: u32) -> BigCount {
    let q64 = q as u64;
    let top = big_pow(q64, m * k);
    let den = (0..k).fold(BigUint::one(), |acc, i| acc * (&top - big_pow(q64, m * i)));
    gl_order(m * k, q64) / den
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMode {
    Exhaustive,
    Formula,
}

/// `[mk, k, m]` codes in `F_{q^m}^{mk}`.
pub fn count_one_weight(m: u32, k: u32, q: u32, mode: CountMode, opts: &CensusOptions) -> Result<CensusResult> {
    let formula = one_weight_formula(m, k, q);
    let mut r = match mode {
        CountMode::Exhaustive => count_codes_exhaustive(q, m, m * k, k, m, opts)?,
        CountMode::Formula => formula_only(q, m, m * k, k, m),
    };
    r.attach(Some(formula));
    Ok(r)
}

fn formula_only(q: u32, m: u32, n: u32, k: u32, d: u32) -> CensusResult {
    CensusResult {
        q,
        m,
        n,
        k,
        d,
        method: "formula".into(),
        exhaustive_count: None,
        formula_value: None,
        matches: None,
        density: None,
        subspaces_scanned: 0,
        shards_total: 0,
        shards_completed: 0,
        threads: 0,
        complete: true,
        elapsed_secs: 0.0,
        fingerprints: BTreeMap::new(),
    }
}

/// `count / [n choose k]_Q`.
pub fn density_of(count: &BigCount, n: u32, k: u32, big_q: u64) -> BigRational {
    BigRational::new(
        BigInt::from(count.clone()),
        BigInt::from(gaussian_binomial(n, k, big_q)),
    )
}

/// `δ^rk_d(m, n, k; q)` with the count taken from whichever source applies:
/// `k = n, d ≤ 1` (every space), the MRD and one-weight families, or an
/// exhaustive scan.
pub fn density(m: u32, n: u32, k: u32, d: u32, q: u32, mode: CountMode, opts: &CensusOptions) -> Result<CensusResult> {
    if k == n && d <= 1 {
        let mut r = formula_only(q, m, n, k, d);
        r.attach(Some(BigUint::one()));
        return Ok(r);
    }
    if n == m && k == 2 && d == m - 1 {
        return match mode {
            CountMode::Exhaustive => count_mrd_exhaustive(q, m, opts),
            CountMode::Formula => {
                let mut r = formula_only(q, m, n, k, d);
                r.attach(Some(mrd_count_formula(q, m)?));
                Ok(r)
            }
        };
    }
    if n == m * k && d == m {
        return count_one_weight(m, k, q, mode, opts);
    }
    match mode {
        CountMode::Exhaustive => {
            let mut r = count_codes_exhaustive(q, m, n, k, d, opts)?;
            r.attach(None);
            Ok(r)
        }
        CountMode::Formula => Err(Error::InvalidParameter(
            "no formula for these parameters; use exhaustive mode".into(),
        )),
    }
}

/// The printed rational function for `δ^rk_3(4, 4, 2; q)`.
pub fn printed_m4_density(q: u32) -> BigRational {
    m4_density_symbolic().eval(q as i64)
}

/// The printed closed form for `δ^rk_{m−1}(m, m, 2; 2)`:
/// `2^{m²} φ(m) ∏_{j=1}^m (1 − 2^{−j}) (2^{2m} − 1) / ((2^{m²} − 1)(2^{m²−m} − 1))`.
pub fn printed_q2_density(m: u32) -> BigRational {
    let two = BigInt::from(2);
    let mut r = BigRational::from_integer(two.pow(m * m) * BigInt::from(euler_phi(m as u64)));
    for j in 1..=m {
        let p = two.pow(j);
        r *= BigRational::new(&p - 1, p);
    }
    r *= BigRational::from_integer(two.pow(2 * m) - 1);
    r / BigRational::from_integer((two.pow(m * m) - 1) * (two.pow(m * m - m) - 1))
}

/// Integer polynomial in `q`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<BigInt>);

impl Poly {
    pub fn constant(c: i64) -> Self {
        Poly(vec![BigInt::from(c)])
    }

    /// `q^a − q^b`.
    pub fn binomial(a: u32, b: u32) -> Self {
        let mut v = vec![BigInt::zero(); a.max(b) as usize + 1];
        v[a as usize] += 1;
        v[b as usize] -= 1;
        Poly(v).trimmed()
    }

    pub fn from_terms(terms: &[(i64, u32)]) -> Self {
        let top = terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
        let mut v = vec![BigInt::zero(); top + 1];
        for &(c, e) in terms {
            v[e as usize] += c;
        }
        Poly(v).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.len() > 1 && self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut v = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly(v).trimmed()
    }

    pub fn product(factors: &[Poly]) -> Poly {
        factors.iter().fold(Poly::constant(1), |acc, f| acc.mul(f))
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.0.last().expect("nonempty")
    }

    pub fn eval(&self, q: i64) -> BigInt {
        let q = BigInt::from(q);
        self.0.iter().rev().fold(BigInt::zero(), |acc, c| acc * &q + c)
    }
}

/// `numerator(q) / denominator(q)` with integer polynomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicRatio {
    pub numerator: Poly,
    pub denominator: Poly,
}

impl SymbolicRatio {
    pub fn eval(&self, q: i64) -> BigRational {
        BigRational::new(self.numerator.eval(q), self.denominator.eval(q))
    }

    /// `lim_{q→∞}`: ratio of leading coefficients at equal degree, zero when the
    /// denominator dominates, `None` when the ratio diverges.
    pub fn limit(&self) -> Option<BigRational> {
        use std::cmp::Ordering::*;
        match self.numerator.degree().cmp(&self.denominator.degree()) {
            Equal => Some(BigRational::new(
                self.numerator.leading().clone(),
                self.denominator.leading().clone(),
            )),
            Less => Some(BigRational::zero()),
            Greater => None,
        }
    }
}

/// `½ q^7 (q^3−1)(q^2−1)(q−1)(q^3−q^2−q−1)(q^8−1)(q^4−1) / ((q^16−1)(q^12−1))`.
pub fn m4_density_symbolic() -> SymbolicRatio {
    let numerator = Poly::product(&[
        Poly::from_terms(&[(1, 7)]),
        Poly::binomial(3, 0),
        Poly::binomial(2, 0),
        Poly::binomial(1, 0),
        Poly::from_terms(&[(1, 3), (-1, 2), (-1, 1), (-1, 0)]),
        Poly::binomial(8, 0),
        Poly::binomial(4, 0),
    ]);
    let denominator = Poly::product(&[
        Poly::constant(2),
        Poly::binomial(16, 0),
        Poly::binomial(12, 0),
    ]);
    SymbolicRatio {
        numerator,
        denominator,
    }
}

/// `|GL_{mk}(q)| / (∏_{i<k}(q^{mk} − q^{mi}) · [mk choose k]_{q^m})` as a ratio
/// of polynomials in `q`.
pub fn one_weight_density_symbolic(m: u32, k: u32) -> SymbolicRatio {
    let mk = m * k;
    // [mk, k]_Q = ∏_{i<k} (Q^{mk−i} − 1) / (Q^{i+1} − 1) with Q = q^m.
    let mut num: Vec<Poly> = (0..mk).map(|j| Poly::binomial(mk, j)).collect();
    num.extend((0..k).map(|i| Poly::binomial(m * (i + 1), 0)));
    let mut den: Vec<Poly> = (0..k).map(|i| Poly::binomial(mk, m * i)).collect();
    den.extend((0..k).map(|i| Poly::binomial(m * (mk - i), 0)));
    SymbolicRatio {
        numerator: Poly::product(&num),
        denominator: Poly::product(&den),
    }
}

/// Renders a nonnegative rational with `digits` significant digits, rounding
/// half up, in scientific notation.
pub fn render_significant(r: &BigRational, digits: u32) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let r = r.abs();
    let ten = BigInt::from(10);
    // Find e with 10^e ≤ r < 10^{e+1}.
    let mut e: i64 = r.numer().to_string().len() as i64 - r.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(ten.pow(k as u32))
        } else {
            BigRational::new(BigInt::one(), ten.pow((-k) as u32))
        }
    };
    while r < pow10(e) {
        e -= 1;
    }
    while r >= pow10(e + 1) {
        e += 1;
    }
    let scaled = &r / pow10(e - digits as i64 + 1);
    let mut mant = (scaled.clone() + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    if mant >= ten.pow(digits) {
        mant /= &ten;
        e += 1;
    }
    let s = mant.to_string();
    let body = if digits > 1 {
        format!("{}.{}", &s[..1], &s[1..])
    } else {
        s
    };
    format!("{}{}e{}", if neg { "-" } else { "" }, body, e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub parameter: u32,
    pub density: DensityValue,
    /// Density divided by the comparison envelope.
    pub ratio: String,
    /// The printed closed form at this parameter.
    pub printed: DensityValue,
    pub printed_matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticReport {
    pub family: String,
    pub envelope: String,
    pub rows: Vec<AsymptoticRow>,
    /// `"increasing"`, `"decreasing"` or `"not monotone"` for the ratio column.
    pub ratio_trend: String,
    pub max_ratio: String,
    pub symbolic_limit: Option<String>,
    /// Parameters where the printed closed form differs from count / binomial.
    pub printed_mismatches: Vec<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Q2Mrd,
    M4Mrd,
    OneWeight,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q2_mrd" => Ok(Family::Q2Mrd),
            "m4_mrd" => Ok(Family::M4Mrd),
            "one_weight" => Ok(Family::OneWeight),
            other => Err(Error::InvalidParameter(format!("unknown family {other}"))),
        }
    }
}

/// Exact family densities over `range` with the ratio to the claimed envelope:
/// `m 2^{−m²+3m}` for `q2_mrd` (over `m`), the limit ½ for `m4_mrd` and 1 for
/// `one_weight` at `m = k = 2` (over `q`).
pub fn asymptotic_report(family: Family, range: &BTreeSet<u32>) -> Result<AsymptoticReport> {
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    let (name, envelope, limit) = match family {
        Family::Q2Mrd => ("q2_mrd", "m·2^(−m²+3m)", None),
        Family::M4Mrd => ("m4_mrd", "1/2", m4_density_symbolic().limit()),
        Family::OneWeight => ("one_weight", "1", one_weight_density_symbolic(2, 2).limit()),
    };
    for &x in range {
        let (dens, env, printed) = match family {
            Family::Q2Mrd => {
                let d = density_of(&q2_family(x)?, x, 2, 1u64 << x);
                let e = 3 * x as i64 - (x * x) as i64;
                let env = if e >= 0 {
                    BigRational::from_integer(BigInt::from(x) * BigInt::from(2).pow(e as u32))
                } else {
                    BigRational::new(BigInt::from(x), BigInt::from(2).pow((-e) as u32))
                };
                (d, env, printed_q2_density(x))
            }
            Family::M4Mrd => {
                let d = density_of(&m4_family(x)?, 4, 2, (x as u64).pow(4));
                (d, BigRational::new(BigInt::one(), BigInt::from(2)), printed_m4_density(x))
            }
            Family::OneWeight => {
                if prime_power(x).is_none() {
                    return Err(Error::InvalidParameter(format!("{x} is not a prime power")));
                }
                let d = density_of(&one_weight_formula(2, 2, x), 4, 2, (x as u64).pow(2));
                (d, BigRational::one(), one_weight_density_symbolic(2, 2).eval(x as i64))
            }
        };
        let ratio = &dens / &env;
        rows.push(AsymptoticRow {
            parameter: x,
            density: DensityValue::new(&dens),
            ratio: render_significant(&ratio, 12),
            printed: DensityValue::new(&printed),
            printed_matches: printed == dens,
        });
        ratios.push(ratio);
    }
    let inc = ratios.windows(2).all(|w| w[0] <= w[1]);
    let dec = ratios.windows(2).all(|w| w[0] >= w[1]);
    let trend = match (inc, dec) {
        (true, false) => "increasing",
        (false, true) => "decreasing",
        (true, true) => "constant",
        _ => "not monotone",
    };
    let max_ratio = ratios
        .iter()
        .max()
        .map(|r| render_significant(r, 12))
        .unwrap_or_default();
    let printed_mismatches = rows.iter().filter(|r| !r.printed_matches).map(|r| r.parameter).collect();
    Ok(AsymptoticReport {
        family: name.into(),
        envelope: envelope.into(),
        rows,
        ratio_trend: trend.into(),
        max_ratio,
        symbolic_limit: limit.map(|l| format!("{}/{}", l.numer(), l.denom())),
        printed_mismatches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_values() {
        assert_eq!(q2_family(4).unwrap(), BigUint::from(1344u32));
        assert_eq!(q2_family(3).unwrap(), BigUint::from(24u32));
        assert_eq!(m4_family(2).unwrap(), BigUint::from(1344u32));
        assert_eq!(m4_family(3).unwrap(), BigUint::from(6368544u32));
        for q in [2, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            assert_eq!(m4_family(q).unwrap(), m4_orbit_sum(q).unwrap());
        }
        assert!(m4_family(6).is_err());
        assert!(mrd_count_formula(3, 5).is_err());
    }

    #[test]
    fn one_weight_formula_values() {
        assert_eq!(one_weight_formula(2, 2, 2), BigUint::from(112u32));
        assert_eq!(one_weight_formula(3, 1, 2), BigUint::from(24u32));
        for (m, q) in [(2u32, 3u32), (4, 2), (3, 3)] {
            assert_eq!(
                one_weight_formula(m, 1, q),
                gl_order(m, q as u64) / (big_pow(q as u64, m) - 1u32)
            );
        }
    }

    #[test]
    fn rank_kernel_agrees_with_tower() {
        for (p, h, m) in [(3, 1, 4), (2, 2, 2), (2, 1, 4), (5, 1, 2)] {
            let t = FieldTower::new(p, h, m).unwrap();
            let k = RankKernel::new(&t);
            let order = t.big_order();
            for a in 0..order.min(40) {
                for b in 0..order.min(40) {
                    let v = [a, b, (a * 7 + b) % order];
                    assert_eq!(k.rank(&v), t.rank_of(&v));
                }
            }
        }
    }

    #[test]
    fn small_censuses() {
        let opts = CensusOptions::default();
        let r = count_mrd_exhaustive(2, 3, &opts).unwrap();
        assert_eq!(r.exhaustive(), Some(BigUint::from(24u32)));
        assert_eq!(r.matches, Some(true));
        assert_eq!(r.subspaces_scanned, 73);
        let ow = count_one_weight(1, 3, 2, CountMode::Exhaustive, &opts);
        assert!(ow.is_ok());
        let ow = count_one_weight(3, 1, 2, CountMode::Exhaustive, &opts).unwrap();
        assert_eq!(ow.exhaustive(), Some(BigUint::from(24u32)));
        assert_eq!(ow.matches, Some(true));
    }

    #[test]
    fn trivial_density() {
        let r = density(3, 2, 2, 1, 2, CountMode::Formula, &CensusOptions::default()).unwrap();
        assert_eq!(r.density.unwrap().exact, "1/1");
    }

    #[test]
    fn significant_digits() {
        let r = BigRational::new(BigInt::from(1344), BigInt::from(70161));
        assert_eq!(render_significant(&r, 12), "1.91559413349e-2");
        assert_eq!(render_significant(&BigRational::from_integer(BigInt::from(1)), 3), "1.00e0");
        let nines = BigRational::new(BigInt::from(9999), BigInt::from(10000));
        assert_eq!(render_significant(&nines, 2), "1.0e0");
    }

    #[test]
    fn symbolic_limits() {
        let s = m4_density_symbolic();
        assert_eq!(s.numerator.degree(), 28);
        assert_eq!(s.denominator.degree(), 28);
        assert_eq!(s.limit(), Some(BigRational::new(BigInt::one(), BigInt::from(2))));
        let ow = one_weight_density_symbolic(2, 2);
        assert_eq!(ow.limit(), Some(BigRational::one()));
        for q in [2u32, 3, 4] {
            let exact = density_of(&one_weight_formula(2, 2, q), 4, 2, (q as u64).pow(2));
            assert_eq!(ow.eval(q as i64), exact);
        }
    }
}
