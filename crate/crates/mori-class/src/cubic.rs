//! Integer symmetric trilinear forms on `H^2(X, Z)` and the full
//! oriented-diffeomorphism invariant of a simply connected torsion-free
//! 6-manifold: the cubic form, the `p1`-pairing functional, the second
//! Stiefel-Whitney class, and `b3`.
//!
//! Two such invariant triples classify the same manifold exactly when some
//! unimodular map transports one to the other. [`equivalent_bounded`] is a
//! brute-force oracle for that condition at small rank: it first looks for a
//! mismatch in quantities that are invariant under every unimodular map
//! (`b3`, gcd and mod-2/mod-3 value distributions of the cubic, vanishing of
//! `w2`, gcd of the `p1`-pairing), which certifies non-equivalence; otherwise
//! it enumerates candidate matrices with bounded entries. A completed search
//! with no hit is reported as inconclusive, never as a negative certificate —
//! the unimodular group is infinite and the bound is finite.

use crate::intmat::{i128_to_i64, IntMatrix};
use crate::lattice::Mod2Class;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CubicError {
    #[error("dimension mismatch: form rank {rank}, vector length {len}")]
    DimensionMismatch { rank: usize, len: usize },
    #[error("tensor is not symmetric at ({0}, {1}, {2})")]
    NotSymmetric(usize, usize, usize),
    #[error("tensor has {got} entries, expected rank^3 = {want}")]
    BadTensorLength { got: usize, want: usize },
    #[error("transport map must be unimodular (det = {0})")]
    NotUnimodular(i128),
    #[error("transport map has size {got}, triples have rank {want}")]
    BadTransportSize { got: usize, want: usize },
    #[error("invalid triple: {0}")]
    BadTriple(String),
}

/// A fully symmetric integer trilinear form, stored as the dense tensor
/// `mu(i, j, k)` on a basis of `H^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicForm {
    rank: usize,
    mu: Vec<i64>,
}

impl CubicForm {
    pub fn new(rank: usize, mu: Vec<i64>) -> Result<Self, CubicError> {
        if mu.len() != rank * rank * rank {
            return Err(CubicError::BadTensorLength {
                got: mu.len(),
                want: rank * rank * rank,
            });
        }
        let form = CubicForm { rank, mu };
        for i in 0..rank {
            for j in 0..rank {
                for k in 0..rank {
                    let v = form.mu(i, j, k);
                    if v != form.mu(i, k, j) || v != form.mu(j, i, k) {
                        return Err(CubicError::NotSymmetric(i, j, k));
                    }
                }
            }
        }
        Ok(form)
    }

    /// Build from a function on index triples; the function is only consulted
    /// on sorted triples `i <= j <= k` and symmetrized.
    pub fn from_fn(rank: usize, f: impl Fn(usize, usize, usize) -> i64) -> Self {
        let mut mu = vec![0; rank * rank * rank];
        for i in 0..rank {
            for j in 0..rank {
                for k in 0..rank {
                    let mut s = [i, j, k];
                    s.sort_unstable();
                    mu[(i * rank + j) * rank + k] = f(s[0], s[1], s[2]);
                }
            }
        }
        CubicForm { rank, mu }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn mu(&self, i: usize, j: usize, k: usize) -> i64 {
        self.mu[(i * self.rank + j) * self.rank + k]
    }

    /// Trilinear contraction `sum mu(i,j,k) a_i b_j c_k`.
    pub fn evaluate(&self, a: &[i64], b: &[i64], c: &[i64]) -> Result<i64, CubicError> {
        for v in [a, b, c] {
            if v.len() != self.rank {
                return Err(CubicError::DimensionMismatch {
                    rank: self.rank,
                    len: v.len(),
                });
            }
        }
        let mut acc: i128 = 0;
        for i in 0..self.rank {
            if a[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                if b[j] == 0 {
                    continue;
                }
                let ab = a[i] as i128 * b[j] as i128;
                for k in 0..self.rank {
                    acc += ab * c[k] as i128 * self.mu(i, j, k) as i128;
                }
            }
        }
        Ok(i128_to_i64(acc))
    }

    fn gcd_of_entries(&self) -> i64 {
        let mut g = 0;
        for &x in &self.mu {
            g = num_integer::gcd(g, x);
        }
        g
    }

    /// Number of classes `v` in `(Z/2)^rank` with `C(v,v,v)` odd, for
    /// small rank.
    fn mod2_diagonal_count(&self) -> Option<usize> {
        let n = self.rank;
        if n > 16 {
            return None;
        }
        let mut count = 0;
        for mask in 0u32..(1 << n) {
            let v: Vec<i64> = (0..n).map(|i| ((mask >> i) & 1) as i64).collect();
            let c = self.evaluate(&v, &v, &v).expect("lengths match");
            if c.rem_euclid(2) == 1 {
                count += 1;
            }
        }
        Some(count)
    }

    /// Counts of `C(v,v,v) mod 3` over `v` in `(Z/3)^rank`, for small rank.
    fn mod3_diagonal_counts(&self) -> Option<[usize; 3]> {
        let n = self.rank;
        if n > 10 {
            return None;
        }
        let mut counts = [0usize; 3];
        let total = 3usize.pow(n as u32);
        for idx in 0..total {
            let mut v = vec![0i64; n];
            let mut t = idx;
            for slot in v.iter_mut() {
                *slot = (t % 3) as i64;
                t /= 3;
            }
            let c = self.evaluate(&v, &v, &v).expect("lengths match");
            counts[c.rem_euclid(3) as usize] += 1;
        }
        Some(counts)
    }
}

/// The complete oriented-diffeomorphism invariant of a simply connected
/// torsion-free 6-manifold: cubic form on `H^2`, the linear functional
/// `a -> <a . p1(X), [X]>` (the Poincare dual of `p1` evaluated against the
/// basis), `w2` as a mod-2 class, and `b3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WallJuppTriple {
    cubic: CubicForm,
    p1_pairing: Vec<i64>,
    w2: Mod2Class,
    b3: i64,
}

impl WallJuppTriple {
    pub fn new(
        cubic: CubicForm,
        p1_pairing: Vec<i64>,
        w2: Mod2Class,
        b3: i64,
    ) -> Result<Self, CubicError> {
        if p1_pairing.len() != cubic.rank() {
            return Err(CubicError::BadTriple(format!(
                "p1 pairing length {} != rank {}",
                p1_pairing.len(),
                cubic.rank()
            )));
        }
        if w2.len() != cubic.rank() {
            return Err(CubicError::BadTriple(format!(
                "w2 length {} != rank {}",
                w2.len(),
                cubic.rank()
            )));
        }
        if b3 < 0 || b3 % 2 != 0 {
            return Err(CubicError::BadTriple(format!(
                "b3 must be a nonnegative even integer, got {b3}"
            )));
        }
        Ok(WallJuppTriple {
            cubic,
            p1_pairing,
            w2,
            b3,
        })
    }

    pub fn rank(&self) -> usize {
        self.cubic.rank()
    }

    pub fn cubic(&self) -> &CubicForm {
        &self.cubic
    }

    pub fn p1_pairing(&self) -> &[i64] {
        &self.p1_pairing
    }

    pub fn w2(&self) -> &Mod2Class {
        &self.w2
    }

    pub fn b3(&self) -> i64 {
        self.b3
    }

    /// `<v . p1(X), [X]>` for a class with the given coordinates.
    pub fn p1_pair(&self, v: &[i64]) -> Result<i64, CubicError> {
        if v.len() != self.rank() {
            return Err(CubicError::DimensionMismatch {
                rank: self.rank(),
                len: v.len(),
            });
        }
        let mut acc: i128 = 0;
        for (a, b) in v.iter().zip(self.p1_pairing.iter()) {
            acc += *a as i128 * *b as i128;
        }
        Ok(i128_to_i64(acc))
    }
}

/// Does `phi` transport `t` to `t2`? `phi` maps `H^2(X) -> H^2(X')` with
/// column `i` the image of the `i`-th basis vector; it must transport the
/// cubic on the nose, pull the `p1`-pairing back, carry `w2` to `w2'`, and
/// the `b3` values must agree.
pub fn triple_transport_check(
    phi: &IntMatrix,
    t: &WallJuppTriple,
    t2: &WallJuppTriple,
) -> Result<bool, CubicError> {
    if t.rank() != t2.rank() {
        return Ok(false);
    }
    if phi.size() != t.rank() {
        return Err(CubicError::BadTransportSize {
            got: phi.size(),
            want: t.rank(),
        });
    }
    let det = phi.det();
    if det != 1 && det != -1 {
        return Err(CubicError::NotUnimodular(det));
    }
    Ok(transport_holds(phi.entries(), t, t2))
}

/// Transport conditions on a flat row-major matrix (no validity checks).
fn transport_holds(phi: &[i64], t: &WallJuppTriple, t2: &WallJuppTriple) -> bool {
    let n = t.rank();
    if t.b3 != t2.b3 {
        return false;
    }
    // w2: phi(w2) = w2' mod 2
    for r in 0..n {
        let mut acc = 0u8;
        for c in 0..n {
            acc ^= (phi[r * n + c].rem_euclid(2) as u8) & t.w2.bits()[c];
        }
        if acc != t2.w2.bits()[r] {
            return false;
        }
    }
    // p1: <phi(e_i) . p1', [X']> = <e_i . p1, [X]>
    for i in 0..n {
        let mut acc: i128 = 0;
        for p in 0..n {
            acc += phi[p * n + i] as i128 * t2.p1_pairing[p] as i128;
        }
        if acc != t.p1_pairing[i] as i128 {
            return false;
        }
    }
    // cubic on sorted index triples
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                let mut acc: i128 = 0;
                for p in 0..n {
                    let fi = phi[p * n + i];
                    if fi == 0 {
                        continue;
                    }
                    for q in 0..n {
                        let fj = phi[q * n + j];
                        if fj == 0 {
                            continue;
                        }
                        let f2 = fi as i128 * fj as i128;
                        for r in 0..n {
                            let fk = phi[r * n + k];
                            if fk != 0 {
                                acc += f2 * fk as i128 * t2.cubic.mu(p, q, r) as i128;
                            }
                        }
                    }
                }
                if acc != t.cubic.mu(i, j, k) as i128 {
                    return false;
                }
            }
        }
    }
    true
}

/// A mismatch in a quantity invariant under every unimodular transport,
/// certifying that no transport exists regardless of entry bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistinctWitness {
    RankMismatch { a: usize, b: usize },
    B3 { a: i64, b: i64 },
    CubicGcd { a: i64, b: i64 },
    CubicMod2Count { a: usize, b: usize },
    CubicMod3Counts { a: [usize; 3], b: [usize; 3] },
    W2Vanishing { a: bool, b: bool },
    P1Gcd { a: i64, b: i64 },
}

impl std::fmt::Display for DistinctWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DistinctWitness::RankMismatch { a, b } => write!(f, "rank {a} vs {b}"),
            DistinctWitness::B3 { a, b } => write!(f, "b3 {a} vs {b}"),
            DistinctWitness::CubicGcd { a, b } => write!(f, "cubic gcd {a} vs {b}"),
            DistinctWitness::CubicMod2Count { a, b } => {
                write!(f, "odd cubic values mod 2: {a} vs {b}")
            }
            DistinctWitness::CubicMod3Counts { a, b } => {
                write!(f, "cubic value distribution mod 3: {a:?} vs {b:?}")
            }
            DistinctWitness::W2Vanishing { a, b } => write!(f, "w2 vanishing {a} vs {b}"),
            DistinctWitness::P1Gcd { a, b } => write!(f, "p1 pairing gcd {a} vs {b}"),
        }
    }
}

/// Outcome of the bounded equivalence search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Equivalence {
    /// A transport map was found (identity first, then the lexicographically
    /// least matrix in the entry box).
    Equivalent(IntMatrix),
    /// An invariant mismatch rules out every transport.
    ProvablyDistinct(DistinctWitness),
    /// Search completed or budget ran out without a certificate either way.
    Inconclusive { budget_exhausted: bool },
}

/// Brute-force equivalence of two invariant triples: invariant screening,
/// then enumeration of candidate matrices with entries in
/// `[-entry_bound, entry_bound]`, at most `budget` candidates.
pub fn equivalent_bounded(
    t: &WallJuppTriple,
    t2: &WallJuppTriple,
    entry_bound: i64,
    budget: u64,
) -> Equivalence {
    if t.rank() != t2.rank() {
        return Equivalence::ProvablyDistinct(DistinctWitness::RankMismatch {
            a: t.rank(),
            b: t2.rank(),
        });
    }
    if t.b3 != t2.b3 {
        return Equivalence::ProvablyDistinct(DistinctWitness::B3 { a: t.b3, b: t2.b3 });
    }
    let (ga, gb) = (t.cubic.gcd_of_entries(), t2.cubic.gcd_of_entries());
    if ga != gb {
        return Equivalence::ProvablyDistinct(DistinctWitness::CubicGcd { a: ga, b: gb });
    }
    if let (Some(ma), Some(mb)) = (
        t.cubic.mod2_diagonal_count(),
        t2.cubic.mod2_diagonal_count(),
    ) {
        if ma != mb {
            return Equivalence::ProvablyDistinct(DistinctWitness::CubicMod2Count { a: ma, b: mb });
        }
    }
    if let (Some(ca), Some(cb)) = (
        t.cubic.mod3_diagonal_counts(),
        t2.cubic.mod3_diagonal_counts(),
    ) {
        if ca != cb {
            return Equivalence::ProvablyDistinct(DistinctWitness::CubicMod3Counts {
                a: ca,
                b: cb,
            });
        }
    }
    if t.w2.is_zero() != t2.w2.is_zero() {
        return Equivalence::ProvablyDistinct(DistinctWitness::W2Vanishing {
            a: t.w2.is_zero(),
            b: t2.w2.is_zero(),
        });
    }
    let pg = |p: &[i64]| p.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
    let (pa, pb) = (pg(&t.p1_pairing), pg(&t2.p1_pairing));
    if pa != pb {
        return Equivalence::ProvablyDistinct(DistinctWitness::P1Gcd { a: pa, b: pb });
    }

    let n = t.rank();
    // Identity fast path: equal triples transport trivially.
    let ident = IntMatrix::identity(n);
    if transport_holds(ident.entries(), t, t2) {
        return Equivalence::Equivalent(ident);
    }

    let total_entries = n * n;
    let mut phi = vec![-entry_bound; total_entries];
    let mut examined: u64 = 0;
    loop {
        examined += 1;
        if examined > budget {
            return Equivalence::Inconclusive {
                budget_exhausted: true,
            };
        }
        if det_flat(&phi, n).map(|d| d == 1 || d == -1) == Some(true)
            && transport_holds(&phi, t, t2)
        {
            return Equivalence::Equivalent(IntMatrix::new(n, phi));
        }
        if !advance(&mut phi, -entry_bound, entry_bound) {
            break;
        }
    }
    Equivalence::Inconclusive {
        budget_exhausted: false,
    }
}

fn advance(v: &mut [i64], lo: i64, hi: i64) -> bool {
    for i in (0..v.len()).rev() {
        if v[i] < hi {
            v[i] += 1;
            for x in v.iter_mut().skip(i + 1) {
                *x = lo;
            }
            return true;
        }
    }
    false
}

/// Determinant of a small flat row-major matrix; None means overflow-free
/// fast paths are unavailable and the general routine was used anyway.
fn det_flat(a: &[i64], n: usize) -> Option<i128> {
    match n {
        1 => Some(a[0] as i128),
        2 => Some(a[0] as i128 * a[3] as i128 - a[1] as i128 * a[2] as i128),
        3 => {
            let m = |i: usize| a[i] as i128;
            Some(
                m(0) * (m(4) * m(8) - m(5) * m(7)) - m(1) * (m(3) * m(8) - m(5) * m(6))
                    + m(2) * (m(3) * m(7) - m(4) * m(6)),
            )
        }
        _ => Some(IntMatrix::new(n, a.to_vec()).det()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cubic data of the trivial plane bundle over the line:
    /// x^3 = 0, x^2 y = 1, x y^2 = y^3 = 0.
    fn p2xp1_cubic() -> CubicForm {
        CubicForm::from_fn(2, |i, j, k| match (i, j, k) {
            (0, 0, 1) => 1,
            _ => 0,
        })
    }

    /// x^3 = 1, x^2 y = 1, y^2 = 0.
    fn twisted_plane_bundle_cubic() -> CubicForm {
        CubicForm::from_fn(2, |i, j, k| match (i, j, k) {
            (0, 0, 0) => 1,
            (0, 0, 1) => 1,
            _ => 0,
        })
    }

    fn triple(cubic: CubicForm, p1: Vec<i64>, w2: Vec<u8>, b3: i64) -> WallJuppTriple {
        WallJuppTriple::new(cubic, p1, Mod2Class::new(w2), b3).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        let c = p2xp1_cubic();
        assert_eq!(c.evaluate(&[1, 0], &[1, 0], &[0, 1]).unwrap(), 1);
        // symmetric in its arguments
        assert_eq!(c.evaluate(&[0, 1], &[1, 0], &[1, 0]).unwrap(), 1);
        assert_eq!(c.evaluate(&[1, 0], &[0, 1], &[1, 0]).unwrap(), 1);
        let t = twisted_plane_bundle_cubic();
        assert_eq!(t.evaluate(&[1, 0], &[1, 0], &[1, 0]).unwrap(), 1);
    }

    #[test]
    fn evaluate_is_multilinear() {
        let c = twisted_plane_bundle_cubic();
        let a = [3, -2];
        let a2 = [-1, 4];
        let sum = [2, 2];
        let b = [1, 5];
        let d = [-2, 1];
        let lhs = c.evaluate(&sum, &b, &d).unwrap();
        let rhs = c.evaluate(&a, &b, &d).unwrap() + c.evaluate(&a2, &b, &d).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn rejects_asymmetric_tensor() {
        let mut mu = vec![0i64; 8];
        mu[1] = 1; // (0,0,1) set but not (0,1,0)
        assert!(matches!(
            CubicForm::new(2, mu),
            Err(CubicError::NotSymmetric(..))
        ));
    }

    #[test]
    fn identity_transports_any_triple_to_itself() {
        let t = triple(p2xp1_cubic(), vec![0, 3], vec![1, 0], 0);
        let id = IntMatrix::identity(2);
        assert!(triple_transport_check(&id, &t, &t).unwrap());
    }

    #[test]
    fn negation_flips_odd_cubic() {
        let t = triple(twisted_plane_bundle_cubic(), vec![0, 0], vec![0, 0], 0);
        let neg = IntMatrix::from_rows(&[vec![-1, 0], vec![0, -1]]);
        assert!(!triple_transport_check(&neg, &t, &t).unwrap());
    }

    #[test]
    fn non_unimodular_transport_rejected() {
        let t = triple(p2xp1_cubic(), vec![0, 0], vec![0, 0], 0);
        let m = IntMatrix::from_rows(&[vec![2, 0], vec![0, 1]]);
        assert!(matches!(
            triple_transport_check(&m, &t, &t),
            Err(CubicError::NotUnimodular(2))
        ));
    }

    #[test]
    fn equal_triples_found_immediately() {
        let t = triple(p2xp1_cubic(), vec![0, 3], vec![1, 0], 0);
        match equivalent_bounded(&t, &t, 1, 10) {
            Equivalence::Equivalent(m) => assert_eq!(m, IntMatrix::identity(2)),
            other => panic!("expected identity, got {other:?}"),
        }
    }

    #[test]
    fn mod3_obstruction_distinguishes_plane_bundles() {
        // The two plane bundles over the line have equal b3, gcd and mod-2
        // data; the cubic value distribution mod 3 separates them.
        let a = triple(p2xp1_cubic(), vec![0, 3], vec![1, 0], 0);
        let b = triple(twisted_plane_bundle_cubic(), vec![2, 3], vec![1, 1], 0);
        match equivalent_bounded(&a, &b, 2, 1_000_000) {
            Equivalence::ProvablyDistinct(DistinctWitness::CubicMod3Counts { a, b }) => {
                assert_eq!(a, [9, 0, 0]);
                assert_eq!(b, [3, 3, 3]);
            }
            other => panic!("expected mod-3 witness, got {other:?}"),
        }
    }

    #[test]
    fn quadric_bundles_distinguished_by_b3() {
        // twist c: cubic x^3 = -2c, x^2 y = 2; b3 = -2c - 2
        let quadric = |c: i64| {
            triple(
                CubicForm::from_fn(2, |i, j, k| match (i, j, k) {
                    (0, 0, 0) => -2 * c,
                    (0, 0, 1) => 2,
                    _ => 0,
                }),
                vec![4 * c, 0],
                vec![0, c.rem_euclid(2) as u8],
                -2 * c - 2,
            )
        };
        match equivalent_bounded(&quadric(-1), &quadric(-2), 3, 1_000_000) {
            Equivalence::ProvablyDistinct(DistinctWitness::B3 { a: 0, b: 2 }) => {}
            other => panic!("expected b3 witness, got {other:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let a = triple(p2xp1_cubic(), vec![0, 3], vec![1, 0], 0);
        // same invariants, different p1 pairing sign; tiny budget
        let b = triple(p2xp1_cubic(), vec![0, -3], vec![1, 0], 0);
        match equivalent_bounded(&a, &b, 1, 3) {
            Equivalence::Inconclusive {
                budget_exhausted: true,
            } => {}
            Equivalence::Equivalent(_) => {} // found before budget: also fine
            other => panic!("expected inconclusive, got {other:?}"),
        }
    }
}
