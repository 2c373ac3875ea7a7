//! Difference bound matrices.
//!
//! Entry `(i, j)` bounds `x_i - x_j`; index 0 is the reference clock that is
//! always zero. Bounds are stored in the usual packed form
//! `(constant << 1) | nonstrict`, with [`INF`] meaning unbounded.

use std::fmt;

pub type Raw = i32;

pub const INF: Raw = i32::MAX;
/// `<= 0`
pub const LE_ZERO: Raw = 1;
/// `< 0`
pub const LT_ZERO: Raw = 0;

/// Largest constant that may be used in a bound; keeps sums away from overflow.
pub const MAX_CONSTANT: i32 = 1 << 28;

#[inline]
pub fn bound(c: i32, strict: bool) -> Raw {
    (c << 1) | (!strict as i32)
}

#[inline]
pub fn le(c: i32) -> Raw {
    bound(c, false)
}

#[inline]
pub fn lt(c: i32) -> Raw {
    bound(c, true)
}

#[inline]
pub fn constant(r: Raw) -> i32 {
    r >> 1
}

#[inline]
pub fn is_strict(r: Raw) -> bool {
    r & 1 == 0
}

#[inline]
pub fn add(a: Raw, b: Raw) -> Raw {
    if a == INF || b == INF {
        INF
    } else {
        ((a & !1) + (b & !1)) | (a & b & 1)
    }
}

/// The bound of the complementary constraint: `!(x - y ≺ c)` is `y - x ≺' -c`.
#[inline]
pub fn complement(r: Raw) -> Raw {
    1 - r
}

pub fn fmt_raw(r: Raw) -> String {
    if r == INF {
        "<inf".to_string()
    } else {
        format!("{}{}", if is_strict(r) { "<" } else { "<=" }, constant(r))
    }
}

/// A difference constraint `x_i - x_j ≺ c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub i: u32,
    pub j: u32,
    pub raw: Raw,
}

impl Constraint {
    pub fn new(i: usize, j: usize, raw: Raw) -> Constraint {
        Constraint {
            i: i as u32,
            j: j as u32,
            raw,
        }
    }

    pub fn negated(self) -> Constraint {
        Constraint {
            i: self.j,
            j: self.i,
            raw: complement(self.raw),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dbm {
    dim: usize,
    m: Vec<Raw>,
}

impl Dbm {
    /// The zone where every clock equals zero.
    pub fn zero(dim: usize) -> Dbm {
        assert!(dim >= 1);
        Dbm {
            dim,
            m: vec![LE_ZERO; dim * dim],
        }
    }

    /// All non-negative clock valuations.
    pub fn universe(dim: usize) -> Dbm {
        let mut d = Dbm {
            dim,
            m: vec![INF; dim * dim],
        };
        for i in 0..dim {
            d.set(i, i, LE_ZERO);
            d.set(0, i, LE_ZERO);
        }
        d
    }

    /// Build from a full matrix and close it. Used by tests and generators.
    pub fn from_raw(dim: usize, m: Vec<Raw>) -> Dbm {
        assert_eq!(m.len(), dim * dim);
        let mut d = Dbm { dim, m };
        d.close();
        d
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Raw {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, r: Raw) {
        self.m[i * self.dim + j] = r;
    }

    pub fn raw(&self) -> &[Raw] {
        &self.m
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.m[0] < LE_ZERO
    }

    fn mark_empty(&mut self) {
        self.m[0] = LT_ZERO;
    }

    /// Floyd-Warshall closure. Returns false (and marks the zone empty) if a
    /// negative cycle exists.
    pub fn close(&mut self) -> bool {
        let n = self.dim;
        for k in 0..n {
            for i in 0..n {
                let dik = self.get(i, k);
                if dik == INF {
                    continue;
                }
                for j in 0..n {
                    let c = add(dik, self.get(k, j));
                    if c < self.get(i, j) {
                        self.set(i, j, c);
                    }
                }
            }
            for i in 0..n {
                if self.get(i, i) < LE_ZERO {
                    self.mark_empty();
                    return false;
                }
            }
        }
        true
    }

    /// True when every entry is already the shortest path.
    pub fn is_closed(&self) -> bool {
        let mut c = self.clone();
        c.close();
        c == *self
    }

    /// Delay: remove upper bounds.
    pub fn up(&mut self) {
        for i in 1..self.dim {
            self.set(i, 0, INF);
        }
    }

    /// Time predecessors: drop the lower bounds that delay can explain.
    pub fn down(&mut self) {
        if self.is_empty() {
            return;
        }
        let n = self.dim;
        for i in 1..n {
            let mut b = LE_ZERO;
            for j in 1..n {
                b = b.min(self.get(j, i));
            }
            self.set(0, i, b);
        }
    }

    /// Intersect with `x_i - x_j ≺ c`, keeping the matrix closed.
    pub fn constrain(&mut self, i: usize, j: usize, raw: Raw) -> bool {
        if self.is_empty() {
            return false;
        }
        if raw >= self.get(i, j) {
            return true;
        }
        if add(self.get(j, i), raw) < LE_ZERO {
            self.mark_empty();
            return false;
        }
        self.set(i, j, raw);
        let n = self.dim;
        for k in 0..n {
            let dki = self.get(k, i);
            if dki == INF {
                continue;
            }
            let via = add(dki, raw);
            for l in 0..n {
                let c = add(via, self.get(j, l));
                if c < self.get(k, l) {
                    self.set(k, l, c);
                }
            }
        }
        true
    }

    pub fn apply(&mut self, c: Constraint) -> bool {
        self.constrain(c.i as usize, c.j as usize, c.raw)
    }

    pub fn satisfies(&self, c: Constraint) -> bool {
        let mut z = self.clone();
        z.apply(c)
    }

    /// Set clock `x` to the value `v`.
    pub fn reset(&mut self, x: usize, v: i32) {
        debug_assert!(x > 0);
        let n = self.dim;
        for i in 0..n {
            let ci = add(le(v), self.get(0, i));
            let ic = add(self.get(i, 0), le(-v));
            self.set(x, i, ci);
            self.set(i, x, ic);
        }
        self.set(x, x, LE_ZERO);
    }

    /// Remove every constraint on clock `x` (other than `x >= 0`).
    pub fn free(&mut self, x: usize) {
        debug_assert!(x > 0);
        let n = self.dim;
        for i in 0..n {
            if i != x {
                self.set(x, i, INF);
                let i0 = self.get(i, 0);
                self.set(i, x, i0);
            }
        }
    }

    /// Intersection with another zone of the same dimension.
    pub fn intersect(&mut self, other: &Dbm) -> bool {
        assert_eq!(self.dim, other.dim);
        let mut changed = false;
        for k in 0..self.m.len() {
            if other.m[k] < self.m[k] {
                self.m[k] = other.m[k];
                changed = true;
            }
        }
        if changed {
            self.close()
        } else {
            !self.is_empty()
        }
    }

    /// Zone inclusion: `other ⊆ self`.
    pub fn includes(&self, other: &Dbm) -> bool {
        if other.is_empty() {
            return true;
        }
        if self.is_empty() {
            return false;
        }
        self.m.iter().zip(&other.m).all(|(a, b)| b <= a)
    }

    /// Classic maximal-constant extrapolation. `max[i]` is the largest constant
    /// clock `i` is compared against; `max[0]` is ignored.
    pub fn extrapolate(&mut self, max: &[i32]) {
        let n = self.dim;
        assert_eq!(max.len(), n);
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let r = self.get(i, j);
                if i != 0 && r != INF && r > le(max[i]) {
                    self.set(i, j, INF);
                    changed = true;
                } else if j != 0 && r < lt(-max[j]) {
                    self.set(i, j, lt(-max[j]));
                    changed = true;
                }
            }
        }
        if changed {
            self.close();
        }
    }

    /// True if the integer point `v` (with `v[0] == 0`) lies in the zone.
    pub fn contains_point(&self, v: &[i64]) -> bool {
        if self.is_empty() {
            return false;
        }
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                let r = self.get(i, j);
                if r == INF {
                    continue;
                }
                let diff = v[i] - v[j];
                let c = constant(r) as i64;
                if diff > c || (is_strict(r) && diff == c) {
                    return false;
                }
            }
        }
        true
    }

    /// True if the rational point `v` (given over a common denominator `den`,
    /// so clock `i` has value `v[i] / den`) lies in the zone.
    pub fn contains_scaled(&self, v: &[i64], den: i64) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                let r = self.get(i, j);
                if r == INF {
                    continue;
                }
                let diff = v[i] - v[j];
                let c = constant(r) as i64 * den;
                if diff > c || (is_strict(r) && diff == c) {
                    return false;
                }
            }
        }
        true
    }

    /// Lower and upper bound of clock `x` as raw values: `(-x <= lo, x <= hi)`.
    pub fn clock_bounds(&self, x: usize) -> (Raw, Raw) {
        (self.get(0, x), self.get(x, 0))
    }
}

impl fmt::Debug for Dbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("Dbm(empty)");
        }
        writeln!(f, "Dbm[")?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| fmt_raw(self.get(i, j))).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_arithmetic() {
        assert_eq!(add(le(2), lt(3)), lt(5));
        assert_eq!(add(le(2), le(-3)), le(-1));
        assert_eq!(add(INF, le(0)), INF);
        assert!(lt(3) < le(3));
        assert!(le(3) < lt(4));
        assert_eq!(complement(le(5)), lt(-5));
        assert_eq!(complement(lt(-5)), le(5));
    }

    #[test]
    fn up_of_origin_is_diagonal() {
        let mut z = Dbm::zero(3);
        z.up();
        assert_eq!(z.get(1, 2), LE_ZERO);
        assert_eq!(z.get(2, 1), LE_ZERO);
        assert_eq!(z.get(1, 0), INF);
        assert_eq!(z.get(0, 1), LE_ZERO);
        assert!(z.is_closed());
    }

    #[test]
    fn reset_one_clock() {
        let mut z = Dbm::zero(3);
        z.up();
        assert!(z.constrain(1, 0, le(5)));
        assert!(z.constrain(0, 1, le(-5)));
        z.reset(1, 0);
        assert!(z.contains_point(&[0, 0, 5]));
        assert!(!z.contains_point(&[0, 1, 5]));
        assert!(!z.contains_point(&[0, 0, 4]));
        assert!(z.is_closed());
    }

    #[test]
    fn inclusion() {
        let mut a = Dbm::zero(2);
        a.up();
        let mut small = a.clone();
        small.constrain(1, 0, le(3));
        let mut big = a.clone();
        big.constrain(1, 0, le(5));
        assert!(big.includes(&small));
        assert!(!small.includes(&big));
    }

    #[test]
    fn contradiction_is_empty() {
        let mut z = Dbm::zero(2);
        z.up();
        assert!(z.constrain(0, 1, le(-5)));
        assert!(!z.constrain(1, 0, lt(5)));
        assert!(z.is_empty());
    }

    #[test]
    fn extrapolation_forgets_large_values() {
        let mut z = Dbm::zero(2);
        z.up();
        z.constrain(0, 1, le(-10));
        z.constrain(1, 0, le(10));
        z.extrapolate(&[0, 3]);
        assert_eq!(z.get(1, 0), INF);
        assert_eq!(z.get(0, 1), lt(-3));
    }
}
