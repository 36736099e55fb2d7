//! Small exact integer matrices.
//!
//! Everything in this crate works on `H^2` lattices of rank at most a few
//! dozen, so matrices are stored dense and all arithmetic is exact. The
//! determinant uses fraction-free Bareiss elimination over `i128`; for a
//! rank-`n` Gram matrix with entries bounded by `b` the intermediate values
//! are minors bounded by Hadamard's inequality `(b*sqrt(n))^n`, which for the
//! lattices in scope (rank <= 22, small entries) fits comfortably in `i128`.

use std::fmt;

/// A square integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    n: usize,
    a: Vec<i64>,
}

impl IntMatrix {
    pub fn new(n: usize, entries: Vec<i64>) -> Self {
        assert_eq!(entries.len(), n * n, "entry count must be n^2");
        IntMatrix { n, a: entries }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n, "matrix must be square");
            a.extend_from_slice(r);
        }
        IntMatrix { n, a }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = vec![0; n * n];
        for i in 0..n {
            a[i * n + i] = 1;
        }
        IntMatrix { n, a }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.a[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: i64) {
        self.a[r * self.n + c] = v;
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.a[r * self.n..(r + 1) * self.n]
    }

    pub fn entries(&self) -> &[i64] {
        &self.a
    }

    pub fn transpose(&self) -> IntMatrix {
        let n = self.n;
        let mut t = IntMatrix::new(n, vec![0; n * n]);
        for r in 0..n {
            for c in 0..n {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = IntMatrix::new(n, vec![0; n * n]);
        for r in 0..n {
            for k in 0..n {
                let x = self.get(r, k);
                if x == 0 {
                    continue;
                }
                for c in 0..n {
                    out.a[r * n + c] += x * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.n, v.len());
        let n = self.n;
        let mut out = vec![0; n];
        for r in 0..n {
            let mut acc: i128 = 0;
            for c in 0..n {
                acc += self.get(r, c) as i128 * v[c] as i128;
            }
            out[r] = i128_to_i64(acc);
        }
        out
    }

    pub fn is_symmetric(&self) -> bool {
        for r in 0..self.n {
            for c in 0..r {
                if self.get(r, c) != self.get(c, r) {
                    return false;
                }
            }
        }
        true
    }

    /// Exact determinant by fraction-free Bareiss elimination.
    pub fn det(&self) -> i128 {
        let n = self.n;
        if n == 0 {
            return 1;
        }
        let mut m: Vec<i128> = self.a.iter().map(|&x| x as i128).collect();
        let mut sign: i128 = 1;
        let mut prev: i128 = 1;
        for k in 0..n - 1 {
            if m[k * n + k] == 0 {
                let pivot = (k + 1..n).find(|&r| m[r * n + k] != 0);
                match pivot {
                    Some(r) => {
                        for c in 0..n {
                            m.swap(k * n + c, r * n + c);
                        }
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for r in k + 1..n {
                for c in k + 1..n {
                    let num = m[r * n + c] * m[k * n + k] - m[r * n + k] * m[k * n + c];
                    m[r * n + c] = num / prev;
                }
                m[r * n + k] = 0;
            }
            prev = m[k * n + k];
        }
        sign * m[(n - 1) * n + (n - 1)]
    }

    /// Inverse of a matrix with determinant +-1, via the adjugate.
    /// Panics if the determinant is not +-1.
    pub fn unimodular_inverse(&self) -> IntMatrix {
        let n = self.n;
        let d = self.det();
        assert!(d == 1 || d == -1, "matrix is not unimodular (det {d})");
        let mut inv = IntMatrix::new(n, vec![0; n * n]);
        for r in 0..n {
            for c in 0..n {
                let minor = self.minor(r, c).det();
                let cof = if (r + c) % 2 == 0 { minor } else { -minor };
                // adj(A)[c][r] = cofactor(r, c); A^{-1} = adj(A)/det
                inv.set(c, r, i128_to_i64(cof * d));
            }
        }
        inv
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> IntMatrix {
        let n = self.n;
        let mut a = Vec::with_capacity((n - 1) * (n - 1));
        for r in 0..n {
            if r == skip_r {
                continue;
            }
            for c in 0..n {
                if c == skip_c {
                    continue;
                }
                a.push(self.get(r, c));
            }
        }
        IntMatrix::new(n - 1, a)
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix {
            n: self.n,
            a: self.a.iter().map(|&x| -x).collect(),
        }
    }
}

pub(crate) fn i128_to_i64(x: i128) -> i64 {
    i64::try_from(x).expect("integer overflow: value exceeds 64 bits")
}

/// Pairing v^T M w computed in i128.
pub fn bilinear(m: &IntMatrix, v: &[i64], w: &[i64]) -> i128 {
    let n = m.size();
    assert_eq!(v.len(), n);
    assert_eq!(w.len(), n);
    let mut acc: i128 = 0;
    for r in 0..n {
        if v[r] == 0 {
            continue;
        }
        let mut row: i128 = 0;
        for c in 0..n {
            row += m.get(r, c) as i128 * w[c] as i128;
        }
        acc += v[r] as i128 * row;
    }
    acc
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.n {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.n {
            if r > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for c in 0..self.n {
                if c > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small() {
        let m = IntMatrix::from_rows(&[vec![1, 2], vec![3, 4]]);
        assert_eq!(m.det(), -2);
        let h = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert_eq!(h.det(), -1);
    }

    #[test]
    fn det_singular() {
        let m = IntMatrix::from_rows(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.det(), 0);
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let m = IntMatrix::from_rows(&[vec![2, 1, 0], vec![1, 1, 1], vec![0, 0, 1]]);
        assert_eq!(m.det().abs(), 1);
        let inv = m.unimodular_inverse();
        assert_eq!(m.mul(&inv), IntMatrix::identity(3));
        assert_eq!(inv.mul(&m), IntMatrix::identity(3));
    }

    #[test]
    fn mul_vec_matches_mul() {
        let m = IntMatrix::from_rows(&[vec![2, -1], vec![0, 3]]);
        assert_eq!(m.mul_vec(&[4, 5]), vec![3, 15]);
    }
}
