//! Binary relations on `{0..n}` as bitset matrices (`n ≤ 64`).

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    n: usize,
    rows: Vec<u64>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        assert!(n <= 64, "relations are limited to 64 points");
        Relation { n, rows: vec![0; n] }
    }

    fn mask(n: usize) -> u64 {
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn full(n: usize) -> Self {
        Relation { n, rows: vec![Self::mask(n); n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut r = Self::empty(n);
        for i in 0..n {
            r.insert(i, i);
        }
        r
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Self::empty(n);
        for (i, j) in pairs {
            r.insert(i, j);
        }
        r
    }

    /// Row-major bit encoding, bit `i*n + j`; needs `n*n ≤ 64`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n * n <= 64);
        let mut r = Self::empty(n);
        for i in 0..n {
            r.rows[i] = bits >> (i * n) & Self::mask(n);
        }
        r
    }

    pub fn to_bits(&self) -> u64 {
        assert!(self.n * self.n <= 64);
        self.rows.iter().enumerate().fold(0, |acc, (i, &row)| acc | row << (i * self.n))
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    pub fn rows(&self) -> &[u64] {
        &self.rows
    }

    pub fn count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn insert(&mut self, i: usize, j: usize) {
        self.rows[i] |= 1 << j;
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).filter(move |&j| self.contains(i, j)).map(move |j| (i, j)))
    }

    /// Relational composition `self ; other`.
    pub fn compose(&self, other: &Relation) -> Relation {
        debug_assert_eq!(self.n, other.n);
        let rows = self
            .rows
            .iter()
            .map(|&row| {
                let mut acc = 0u64;
                let mut r = row;
                while r != 0 {
                    let k = r.trailing_zeros() as usize;
                    acc |= other.rows[k];
                    r &= r - 1;
                }
                acc
            })
            .collect();
        Relation { n: self.n, rows }
    }

    pub fn converse(&self) -> Relation {
        let mut r = Self::empty(self.n);
        for (i, j) in self.pairs() {
            r.insert(j, i);
        }
        r
    }

    pub fn complement(&self) -> Relation {
        let m = Self::mask(self.n);
        Relation { n: self.n, rows: self.rows.iter().map(|r| !r & m).collect() }
    }

    pub fn union(&self, other: &Relation) -> Relation {
        Relation { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a | b).collect() }
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        Relation { n: self.n, rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a & b).collect() }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.rows.iter().zip(&other.rows).all(|(a, b)| a & !b == 0)
    }

    pub fn is_equivalence(&self) -> bool {
        (0..self.n).all(|i| self.contains(i, i)) && *self == self.converse() && self.compose(self).is_subset(self)
    }

    /// Image under the point bijection `i ↦ perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Relation {
        Relation::from_pairs(self.n, self.pairs().map(|(i, j)| (perm[i], perm[j])))
    }

    /// `{(a,b), ...}` with the given point names.
    pub fn render(&self, names: &[String]) -> String {
        let items: Vec<String> = self.pairs().map(|(i, j)| format!("({},{})", names[i], names[j])).collect();
        format!("{{{}}}", items.join(","))
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.n).map(|i| i.to_string()).collect();
        f.write_str(&self.render(&names))
    }
}
