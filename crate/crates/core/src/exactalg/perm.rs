use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `{0, .., n-1}` in one-line notation.
///
/// Text forms are 1-indexed (`"2 3 1"`), matching `[n] = {1, .., n}`.
/// The derived order is lexicographic on the one-line notation, so the
/// identity is the smallest permutation of each size.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { images: (0..n).collect() }
    }

    /// Builds from 0-indexed images, checking bijectivity.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::invalid(format!("not a permutation: {images:?}")));
            }
            seen[i] = true;
        }
        Ok(Perm { images })
    }

    /// Builds from 1-indexed one-line notation.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        if one_line.contains(&0) {
            return Err(Error::invalid("one-line notation is 1-indexed"));
        }
        Perm::from_images(one_line.iter().map(|&i| i - 1).collect())
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Perm { images: inv }
    }

    /// Left-to-right product: `self.then(other)` maps `i` to `other(self(i))`.
    ///
    /// With this convention `perm_to_matrix` is a homomorphism:
    /// `P(s.then(t)) = P(s) * P(t)`.
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.len(), other.len(), "permutation sizes differ");
        Perm { images: self.images.iter().map(|&i| other.images[i]).collect() }
    }

    /// Lengths of the cycles, in nonincreasing order.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            lengths.push(len);
        }
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        lengths
    }

    /// Advances to the next permutation in lexicographic order.
    /// Returns `false` (leaving `self` unchanged) at the last one.
    pub fn next_lex(&mut self) -> bool {
        let v = &mut self.images;
        if v.len() < 2 {
            return false;
        }
        let mut i = v.len() - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = v.len() - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        true
    }

    /// All `n!` permutations in lexicographic order, identity first.
    pub fn all(n: usize) -> Vec<Perm> {
        let mut out = Vec::new();
        let mut p = Perm::identity(n);
        loop {
            out.push(p.clone());
            if !p.next_lex() {
                break;
            }
        }
        out
    }

    /// Position of this permutation in `Perm::all(n)` (Lehmer code).
    pub fn lex_rank(&self) -> usize {
        let n = self.len();
        let mut rank = 0;
        for i in 0..n {
            let smaller = self.images[i + 1..].iter().filter(|&&j| j < self.images[i]).count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }
}

impl Mul for &Perm {
    type Output = Perm;
    /// Same as [`Perm::then`].
    fn mul(self, rhs: &Perm) -> Perm {
        self.then(rhs)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, i) in self.images.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", i + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{self}]")
    }
}

impl FromStr for Perm {
    type Err = Error;

    /// Whitespace- or comma-separated 1-indexed one-line notation.
    fn from_str(s: &str) -> Result<Self> {
        let mut one_line = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v: usize = tok
                .parse()
                .map_err(|_| Error::parse(1, format!("bad permutation entry {tok:?}")))?;
            one_line.push(v);
        }
        if one_line.is_empty() {
            return Err(Error::parse(1, "empty permutation"));
        }
        Perm::from_one_line(&one_line).map_err(|e| Error::parse(1, e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_is_lexicographic_with_identity_first() {
        let all = Perm::all(4);
        assert_eq!(all.len(), 24);
        assert!(all[0].is_identity());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for (r, p) in all.iter().enumerate() {
            assert_eq!(p.lex_rank(), r);
        }
    }

    #[test]
    fn inverse_and_product() {
        let s: Perm = "2 3 1".parse().unwrap();
        assert_eq!(s.then(&s.inverse()), Perm::identity(3));
        assert_eq!(s.inverse().then(&s), Perm::identity(3));
        let t: Perm = "2 1 3".parse().unwrap();
        // 0 -> s -> 1 -> t -> 0
        assert_eq!(s.then(&t).images(), &[0, 2, 1]);
    }

    #[test]
    fn parse_rejects_non_bijections() {
        assert!("1 1 2".parse::<Perm>().is_err());
        assert!("0 1".parse::<Perm>().is_err());
        assert!("1 3".parse::<Perm>().is_err());
        assert!("".parse::<Perm>().is_err());
        assert_eq!("3,1,2".parse::<Perm>().unwrap().to_string(), "3 1 2");
    }

    #[test]
    fn cycle_types() {
        let p: Perm = "2 1 4 5 3".parse().unwrap();
        assert_eq!(p.cycle_type(), vec![3, 2]);
        assert_eq!(Perm::identity(3).cycle_type(), vec![1, 1, 1]);
    }
}
