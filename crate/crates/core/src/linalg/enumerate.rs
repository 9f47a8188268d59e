//! Enumeration of all `k`-dimensional subspaces of `K^n`.
//!
//! Order: pivot profiles (increasing pivot column tuples) in lexicographic
//! order; inside a profile the free entries, read row-major, run through all
//! values as an odometer whose last position turns fastest. A shard fixes a
//! profile and the values of its leading free entries, so the stream splits
//! into independent contiguous pieces.

use super::{Matrix, Subspace};
use crate::field::GaloisField;

/// A contiguous piece of the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shard {
    pub profile: usize,
    /// Number of leading free entries fixed by this shard.
    pub depth: usize,
    /// Base-`Q` value of the fixed leading entries (first entry most significant).
    pub prefix: u64,
}

#[derive(Debug, Clone)]
pub struct SubspaceEnumerator {
    n: usize,
    k: usize,
    order: u32,
    profiles: Vec<Vec<usize>>,
    free: Vec<Vec<usize>>,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            break;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
    out
}

impl SubspaceEnumerator {
    /// Enumerates `k`-subspaces of `K^n` with `|K| = order`.
    pub fn new(n: usize, k: usize, order: u32) -> Self {
        assert!(k <= n, "subspace dimension exceeds ambient dimension");
        let profiles = combinations(n, k);
        let free = profiles
            .iter()
            .map(|piv| {
                let mut pos = Vec::new();
                for (r, &p) in piv.iter().enumerate() {
                    for c in p + 1..n {
                        if !piv.contains(&c) {
                            pos.push(r * n + c);
                        }
                    }
                }
                pos
            })
            .collect();
        SubspaceEnumerator {
            n,
            k,
            order,
            profiles,
            free,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn profiles(&self) -> &[Vec<usize>] {
        &self.profiles
    }

    /// Flat indices `r*n + c` of the free entries of a profile.
    pub fn free_positions(&self, profile: usize) -> &[usize] {
        &self.free[profile]
    }

    /// Number of subspaces with the given profile, saturating at `u64::MAX`.
    pub fn profile_size(&self, profile: usize) -> u64 {
        (self.order as u64)
            .checked_pow(self.free[profile].len() as u32)
            .unwrap_or(u64::MAX)
    }

    /// Shards that fix up to `split_depth` leading free entries of each profile.
    pub fn shards(&self, split_depth: usize) -> Vec<Shard> {
        let mut out = Vec::new();
        for p in 0..self.profiles.len() {
            let depth = split_depth.min(self.free[p].len());
            let count = (self.order as u64).pow(depth as u32);
            out.extend((0..count).map(|prefix| Shard {
                profile: p,
                depth,
                prefix,
            }));
        }
        out
    }

    /// Calls `visit` with the flat `k × n` RREF matrix of every subspace in the shard.
    pub fn visit_shard(&self, shard: Shard, mut visit: impl FnMut(&[u32])) {
        let (n, q) = (self.n, self.order);
        let piv = &self.profiles[shard.profile];
        let free = &self.free[shard.profile];
        let mut buf = vec![0u32; self.k * n];
        for (r, &c) in piv.iter().enumerate() {
            buf[r * n + c] = 1;
        }
        let mut pre = shard.prefix;
        for i in (0..shard.depth).rev() {
            buf[free[i]] = (pre % q as u64) as u32;
            pre /= q as u64;
        }
        let tail = &free[shard.depth..];
        loop {
            visit(&buf);
            let mut i = tail.len();
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                let pos = tail[i];
                buf[pos] += 1;
                if buf[pos] < q {
                    break;
                }
                buf[pos] = 0;
            }
        }
    }

    /// Visits every subspace in order.
    pub fn visit_all(&self, mut visit: impl FnMut(&[u32])) {
        for shard in self.shards(0) {
            self.visit_shard(shard, &mut visit);
        }
    }

    /// Owned stream of canonical subspaces.
    pub fn iter<'a>(&'a self, f: &'a GaloisField) -> impl Iterator<Item = Subspace> + 'a {
        assert_eq!(f.order(), self.order);
        let id = f.id();
        let (k, n) = (self.k, self.n);
        self.shards(0).into_iter().flat_map(move |shard| {
            let mut batch = Vec::new();
            self.visit_shard(shard, |m| {
                batch.push(Subspace::from_rref_unchecked(
                    Matrix::from_flat(k, n, m.to_vec()),
                    id,
                ))
            });
            batch.into_iter()
        })
    }
}

/// All `k`-dimensional subspaces of `F^n`, in canonical order.
pub fn enumerate_subspaces(n: usize, k: usize, f: &GaloisField) -> Vec<Subspace> {
    SubspaceEnumerator::new(n, k, f.order()).iter(f).collect()
}

/// Projective representatives of `K^k` (first nonzero coordinate 1), in order
/// of the position of that leading 1, then lexicographically.
pub fn visit_projective(k: usize, order: u32, mut visit: impl FnMut(&[u32])) {
    let mut buf = vec![0u32; k];
    for lead in 0..k {
        buf.fill(0);
        buf[lead] = 1;
        loop {
            visit(&buf);
            let mut wrapped = true;
            let mut i = k;
            while i > lead + 1 {
                i -= 1;
                buf[i] += 1;
                if buf[i] < order {
                    wrapped = false;
                    break;
                }
                buf[i] = 0;
            }
            if wrapped {
                break;
            }
        }
    }
}
