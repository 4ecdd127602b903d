//! Young diagrams and their Frobenius coordinates.

use crate::error::{Error, Result};

/// Partition `λ_1 ≥ λ_2 ≥ … > 0`; the empty diagram is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct YoungDiagram {
    parts: Vec<usize>,
}

/// `(p_1, …, p_d | q_1, …, q_d)`: arm and leg lengths of the diagonal boxes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusCoords {
    pub p: Vec<usize>,
    pub q: Vec<usize>,
}

impl FrobeniusCoords {
    pub fn new(p: Vec<usize>, q: Vec<usize>) -> Result<Self> {
        let decreasing = |v: &[usize]| v.windows(2).all(|w| w[0] > w[1]);
        if p.len() != q.len() || !decreasing(&p) || !decreasing(&q) {
            return Err(Error::InvalidArgument(format!("({p:?} | {q:?}) are not Frobenius coordinates")));
        }
        Ok(Self { p, q })
    }

    pub fn d(&self) -> usize {
        self.p.len()
    }
}

impl YoungDiagram {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) || parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!("{parts:?} is not a partition")));
        }
        Ok(Self { parts })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// The hook `(p | q)`, i.e. `(p + 1, 1^q)`.
    pub fn hook(p: usize, q: usize) -> Self {
        let mut parts = vec![p + 1];
        parts.extend(std::iter::repeat_n(1, q));
        Self { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// `λ_i` with 1-based `i`; zero beyond the length.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Number of rows `l(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of boxes `|λ|`.
    pub fn size(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn conjugate(&self) -> Self {
        let width = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=width).map(|j| self.parts.iter().filter(|&&l| l >= j).count()).collect();
        Self { parts }
    }

    pub fn frobenius(&self) -> FrobeniusCoords {
        let conj = self.conjugate();
        let d = self.parts.iter().enumerate().take_while(|&(i, &l)| l > i).count();
        let p = (0..d).map(|i| self.parts[i] - i - 1).collect();
        let q = (0..d).map(|i| conj.parts[i] - i - 1).collect();
        FrobeniusCoords { p, q }
    }

    pub fn from_frobenius(f: &FrobeniusCoords) -> Self {
        let d = f.d();
        // Rows 1..d: diagonal box plus arm plus the part of the rectangle left of it.
        let mut parts: Vec<usize> = (0..d).map(|i| f.p[i] + i + 1).collect();
        // Rows below the diagonal block: count legs reaching each row.
        let depth = f.q.first().map_or(0, |&q| q + 1);
        for row in d..depth {
            let width = f.q.iter().enumerate().filter(|&(j, &q)| q + j >= row).count();
            if width > 0 {
                parts.push(width);
            }
        }
        Self { parts }
    }

    /// All partitions of `n` in reverse lexicographic order.
    pub fn partitions_of(n: usize) -> Vec<Self> {
        fn rec(remaining: usize, max: usize, prefix: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
            if remaining == 0 {
                out.push(YoungDiagram { parts: prefix.clone() });
                return;
            }
            for part in (1..=remaining.min(max)).rev() {
                prefix.push(part);
                rec(remaining - part, part, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, n, &mut Vec::new(), &mut out);
        out
    }

    /// All diagrams with at most `max_boxes` boxes, including the empty one.
    pub fn up_to(max_boxes: usize) -> Vec<Self> {
        (0..=max_boxes).flat_map(Self::partitions_of).collect()
    }
}

impl std::fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}
