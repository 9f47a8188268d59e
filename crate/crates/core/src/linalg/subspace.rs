use std::fmt::Write as _;

use super::Matrix;
use crate::error::{Error, Result};
use crate::field::{FieldId, GaloisField};

/// A subspace of `K^n` held by its reduced row echelon basis.
///
/// Two values compare equal exactly when they describe the same subspace.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    field: FieldId,
    ambient_dim: usize,
    basis: Matrix,
}

impl Subspace {
    /// Row space of `generators`.
    pub fn span(generators: &Matrix, f: &GaloisField) -> Self {
        let mut basis = generators.clone();
        let rank = basis.rref_in_place(f).len();
        basis.truncate_rows(rank);
        Subspace {
            field: f.id(),
            ambient_dim: generators.cols(),
            basis,
        }
    }

    pub fn span_rows<R: AsRef<[u32]>>(rows: &[R], ambient_dim: usize, f: &GaloisField) -> Self {
        if rows.is_empty() {
            return Self::zero(ambient_dim, f);
        }
        Self::span(&Matrix::from_rows(rows), f)
    }

    /// Wraps a matrix already known to be in RREF with no zero rows.
    pub(crate) fn from_rref_unchecked(basis: Matrix, f: FieldId) -> Self {
        Subspace {
            field: f,
            ambient_dim: basis.cols(),
            basis,
        }
    }

    pub fn zero(ambient_dim: usize, f: &GaloisField) -> Self {
        Subspace {
            field: f.id(),
            ambient_dim,
            basis: Matrix::zeros(0, ambient_dim),
        }
    }

    pub fn full(ambient_dim: usize, f: &GaloisField) -> Self {
        Subspace {
            field: f.id(),
            ambient_dim,
            basis: Matrix::identity(ambient_dim),
        }
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .row_iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("basis rows are nonzero"))
            .collect()
    }

    fn compatible(&self, other: &Subspace, f: &GaloisField) -> Result<()> {
        if self.field != f.id() || other.field != f.id() {
            return Err(Error::FieldMismatch);
        }
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch(self.ambient_dim, other.ambient_dim));
        }
        Ok(())
    }

    /// Reduces `v` against the basis; zero result means membership.
    pub fn reduce(&self, v: &[u32], f: &GaloisField) -> Vec<u32> {
        let mut out = v.to_vec();
        for (row, piv) in self.basis.row_iter().zip(self.pivots()) {
            let c = out[piv];
            if c != 0 {
                for (o, &b) in out.iter_mut().zip(row) {
                    *o = f.sub(*o, f.mul(c, b));
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[u32], f: &GaloisField) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        self.reduce(v, f).iter().all(|&x| x == 0)
    }

    pub fn is_subspace_of(&self, other: &Subspace, f: &GaloisField) -> bool {
        self.basis.row_iter().all(|r| other.contains(r, f))
    }

    /// Span of the union.
    pub fn join(&self, other: &Subspace, f: &GaloisField) -> Result<Subspace> {
        self.compatible(other, f)?;
        Ok(Subspace::span(&self.basis.vstack(&other.basis), f))
    }

    /// Intersection, as `(A^⊥ + B^⊥)^⊥` for the standard bilinear form.
    pub fn meet(&self, other: &Subspace, f: &GaloisField) -> Result<Subspace> {
        self.compatible(other, f)?;
        let sum = self
            .orthogonal_complement(f)
            .join(&other.orthogonal_complement(f), f)?;
        Ok(sum.orthogonal_complement(f))
    }

    /// `{x : <x, b> = 0 for every basis row b}`.
    pub fn orthogonal_complement(&self, f: &GaloisField) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.ambient_dim, f);
        }
        let ns = self.basis.null_space(f);
        if ns.rows() == 0 {
            return Subspace::zero(self.ambient_dim, f);
        }
        Subspace::span(&ns, f)
    }

    /// Text form: a header `(ambient_dim, k, field_id)` then one line per basis row.
    pub fn to_text(&self) -> String {
        let mut s = format!("({}, {}, {})\n", self.ambient_dim, self.dim(), self.field);
        for row in self.basis.row_iter() {
            let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_text(text: &str, f: &GaloisField) -> Result<Subspace> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let inner = header
            .trim()
            .strip_prefix('(')
            .and_then(|h| h.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("bad header {header:?}")))?;
        let parts: Vec<&str> = inner.splitn(3, ',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let n: usize = parts[0].parse().map_err(|_| Error::Parse("ambient_dim".into()))?;
        let k: usize = parts[1].parse().map_err(|_| Error::Parse("k".into()))?;
        if parts[2] != f.id().to_string() {
            return Err(Error::FieldMismatch);
        }
        let mut rows = Vec::with_capacity(k);
        for line in lines {
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad entry {t:?}"))))
                .collect::<Result<_>>()?;
            if row.len() != n || row.iter().any(|&x| x >= f.order()) {
                return Err(Error::Parse(format!("bad row {line:?}")));
            }
            rows.push(row);
        }
        let s = Subspace::span_rows(&rows, n, f);
        if s.dim() != k || rows.len() != k {
            return Err(Error::Parse(format!("expected {k} independent rows")));
        }
        Ok(s)
    }
}
