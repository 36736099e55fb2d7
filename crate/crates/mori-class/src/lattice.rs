//! Exact arithmetic on unimodular symmetric bilinear forms over Z.
//!
//! A [`BilinearLattice`] models the intersection form on `H^2(Y, Z)` of a
//! simply connected surface: a symmetric integer Gram matrix of determinant
//! +-1. The module provides norms, divisibility, the characteristic/ordinary
//! type of a vector, parity and signature (exact rational diagonalization, no
//! floating point), reflection isometries `sigma_u`, and three bounded
//! searches:
//!
//! * [`BilinearLattice::wall_isometry`] — find an isometry carrying one
//!   primitive vector to another of the same norm and type, by breadth-first
//!   search over the group generated by reflections in vectors of norm
//!   +-1, +-2 and by signed basis permutations preserving the form.
//! * [`BilinearLattice::mod2_isometry`] — find an isometry whose mod-2
//!   reduction carries `v mod 2` to `v' mod 2`, by the same reflection moves
//!   acting on `V (x) Z/2`.
//! * [`BilinearLattice::orbit_enumerate`] — the reflection-orbit of a vector
//!   inside a coordinate box, used as a brute-force transitivity oracle.
//!
//! Exhausting a search budget is reported as inconclusive, never as a
//! certificate that no isometry exists: the searches use a fixed generating
//! set and a bounded box, so a miss proves nothing.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::intmat::{bilinear, i128_to_i64, IntMatrix};

/// Coordinates of a lattice vector in the Gram basis.
pub type LatticeVector = Vec<i64>;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("gram matrix is empty")]
    EmptyRank,
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix is not unimodular (det = {0})")]
    NotUnimodular(i128),
    #[error("dimension mismatch: lattice rank {rank}, vector length {len}")]
    DimensionMismatch { rank: usize, len: usize },
    #[error("zero vector not allowed")]
    ZeroVector,
    #[error("reflection vector must have norm -2 or +2, got {0}")]
    BadReflectionNorm(i64),
    #[error("zero mod-2 class not allowed")]
    ZeroClass,
    #[error("mod-2 class length {len} does not match rank {rank}")]
    ClassLength { rank: usize, len: usize },
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),
    #[error("search budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: usize },
    #[error("matrix is not an isometry or anti-isometry of the lattice")]
    NotIsometry,
}

/// Parity of a unimodular form: even iff every self-pairing is even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Type of a vector: characteristic iff `v . b = b . b (mod 2)` for every `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum VectorType {
    Characteristic,
    Ordinary,
}

impl fmt::Display for VectorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorType::Characteristic => write!(f, "characteristic"),
            VectorType::Ordinary => write!(f, "ordinary"),
        }
    }
}

/// Standard shape recognized from (rank, signature, parity) alone. No
/// change of basis is attempted: a lattice labeled `DiagPQ` need not be
/// presented in the diagonal basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StandardForm {
    /// diag(p(+1), q(-1))
    DiagPQ { plus: usize, minus: usize },
    /// rH (+) sE8, with the E8 summands negated when `e8_negative`.
    HyperbolicE8 {
        hyperbolic: usize,
        e8: usize,
        e8_negative: bool,
    },
}

/// A unimodular symmetric integer bilinear form.
#[derive(Clone, PartialEq, Eq)]
pub struct BilinearLattice {
    gram: IntMatrix,
    signature: i64,
    parity: Parity,
    label: Option<StandardForm>,
}

impl fmt::Debug for BilinearLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BilinearLattice(rank {}, sign {}, {:?}, gram {:?})",
            self.rank(),
            self.signature,
            self.parity,
            self.gram
        )
    }
}

impl BilinearLattice {
    pub fn new(gram: IntMatrix) -> Result<Self, LatticeError> {
        if gram.size() == 0 {
            return Err(LatticeError::EmptyRank);
        }
        if !gram.is_symmetric() {
            return Err(LatticeError::NotSymmetric);
        }
        let det = gram.det();
        if det != 1 && det != -1 {
            return Err(LatticeError::NotUnimodular(det));
        }
        let (pos, neg) = rational_inertia(&gram);
        debug_assert_eq!(pos + neg, gram.size());
        let signature = pos as i64 - neg as i64;
        let parity = if (0..gram.size()).all(|i| gram.get(i, i) % 2 == 0) {
            Parity::Even
        } else {
            Parity::Odd
        };
        let label = recognize_standard_form(gram.size(), signature, parity);
        Ok(BilinearLattice {
            gram,
            signature,
            parity,
            label,
        })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        Self::new(IntMatrix::from_rows(rows))
    }

    /// diag(+1 x plus, -1 x minus)
    pub fn diag(plus: usize, minus: usize) -> Self {
        let n = plus + minus;
        let mut g = IntMatrix::new(n, vec![0; n * n]);
        for i in 0..plus {
            g.set(i, i, 1);
        }
        for i in plus..n {
            g.set(i, i, -1);
        }
        Self::new(g).expect("diag form is unimodular")
    }

    /// The hyperbolic plane H.
    pub fn hyperbolic_plane() -> Self {
        Self::from_rows(&[vec![0, 1], vec![1, 0]]).expect("H is unimodular")
    }

    /// The E8 form (Dynkin-diagram Gram matrix), negated if requested.
    pub fn e8(negative: bool) -> Self {
        let mut rows = vec![vec![0i64; 8]; 8];
        for i in 0..8 {
            rows[i][i] = 2;
        }
        // chain 0-1-2-3-4-5-6, node 7 attached to node 4
        for i in 0..6 {
            rows[i][i + 1] = -1;
            rows[i + 1][i] = -1;
        }
        rows[4][7] = -1;
        rows[7][4] = -1;
        if negative {
            for r in rows.iter_mut() {
                for x in r.iter_mut() {
                    *x = -*x;
                }
            }
        }
        Self::from_rows(&rows).expect("E8 is unimodular")
    }

    /// Orthogonal direct sum.
    pub fn direct_sum(parts: &[&BilinearLattice]) -> Self {
        let n: usize = parts.iter().map(|p| p.rank()).sum();
        let mut g = IntMatrix::new(n, vec![0; n * n]);
        let mut off = 0;
        for p in parts {
            let m = p.rank();
            for r in 0..m {
                for c in 0..m {
                    g.set(off + r, off + c, p.gram.get(r, c));
                }
            }
            off += m;
        }
        Self::new(g).expect("direct sum of unimodular forms is unimodular")
    }

    pub fn rank(&self) -> usize {
        self.gram.size()
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn signature(&self) -> i64 {
        self.signature
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn standard_form(&self) -> Option<StandardForm> {
        self.label
    }

    fn check_dims(&self, v: &[i64]) -> Result<(), LatticeError> {
        if v.len() != self.rank() {
            return Err(LatticeError::DimensionMismatch {
                rank: self.rank(),
                len: v.len(),
            });
        }
        Ok(())
    }

    /// v . v
    pub fn norm(&self, v: &[i64]) -> Result<i64, LatticeError> {
        self.check_dims(v)?;
        Ok(i128_to_i64(bilinear(&self.gram, v, v)))
    }

    /// v . w
    pub fn pairing(&self, v: &[i64], w: &[i64]) -> Result<i64, LatticeError> {
        self.check_dims(v)?;
        self.check_dims(w)?;
        Ok(i128_to_i64(bilinear(&self.gram, v, w)))
    }

    /// Characteristic or ordinary; the type of a non-primitive vector is the
    /// type of its primitive part.
    pub fn vector_type(&self, v: &[i64]) -> Result<VectorType, LatticeError> {
        self.check_dims(v)?;
        let d = divisibility(v)?;
        let prim: Vec<i64> = v.iter().map(|x| x / d).collect();
        // The defect b -> v.b - b.b (mod 2) is linear, so checking basis
        // vectors suffices.
        for i in 0..self.rank() {
            let mut vb: i64 = 0;
            for j in 0..self.rank() {
                vb = vb.wrapping_add(prim[j].wrapping_mul(self.gram.get(j, i)));
            }
            if (vb - self.gram.get(i, i)) % 2 != 0 {
                return Ok(VectorType::Ordinary);
            }
        }
        Ok(VectorType::Characteristic)
    }

    /// The reflection sigma_u for norm(u) = -2 (`v + (v.u)u`) or
    /// norm(u) = +2 (`v - (v.u)u`).
    pub fn reflection(&self, u: &[i64]) -> Result<IsometryMap, LatticeError> {
        self.check_dims(u)?;
        let n = self.norm(u)?;
        if n != 2 && n != -2 {
            return Err(LatticeError::BadReflectionNorm(n));
        }
        let m = self.reflection_matrix(u, if n == -2 { 1 } else { -1 });
        IsometryMap::new(self, m)
    }

    /// sigma_u as a matrix, for norm(u) in {+-1, +-2}; `scale` = -2/norm(u).
    fn reflection_matrix(&self, u: &[i64], scale: i64) -> IntMatrix {
        let n = self.rank();
        let gu = self.gram.mul_vec(u);
        let mut m = IntMatrix::identity(n);
        for r in 0..n {
            for c in 0..n {
                let v = m.get(r, c) + scale * u[r] * gu[c];
                m.set(r, c, v);
            }
        }
        m
    }

    /// `alpha(x) = norm(lift) mod 4`, independent of the choice of lift.
    pub fn alpha_mod4(&self, x: &Mod2Class) -> Result<u8, LatticeError> {
        if x.bits.len() != self.rank() {
            return Err(LatticeError::ClassLength {
                rank: self.rank(),
                len: x.bits.len(),
            });
        }
        if x.is_zero() {
            return Err(LatticeError::ZeroClass);
        }
        let lift: Vec<i64> = x.bits.iter().map(|&b| b as i64).collect();
        Ok(self.norm(&lift)?.rem_euclid(4) as u8)
    }

    fn push_reflection_candidate(&self, refls: &mut Vec<ReflGen>, u: Vec<i64>) {
        if let Ok(norm) = self.norm(&u) {
            if matches!(norm, 1 | -1 | 2 | -2) {
                let gu = self.gram.mul_vec(&u);
                refls.push(ReflGen {
                    scale: -2 / norm,
                    u,
                    gu,
                });
            }
        }
    }

    fn generators(&self, u_bound: i64, max_generators: usize) -> Generators {
        self.search_generators(u_bound, max_generators, true)
    }

    pub(crate) fn search_generators(
        &self,
        u_bound: i64,
        max_generators: usize,
        with_perms: bool,
    ) -> Generators {
        let mut refls: Vec<ReflGen> = Vec::new();
        let n = self.rank();
        let full_box = (2 * u_bound as u128 + 1).checked_pow(n as u32);
        let dense = matches!(full_box, Some(total) if total <= 4_000_000);
        if dense {
            let mut u = vec![-u_bound; n];
            loop {
                if refls.len() >= max_generators {
                    break;
                }
                if u.iter().any(|&x| x != 0) && canonical_sign(&u) {
                    self.push_reflection_candidate(&mut refls, u.clone());
                }
                if !odometer(&mut u, -u_bound, u_bound) {
                    break;
                }
            }
        } else {
            // Large rank: restrict to reflection vectors supported on at most
            // three coordinates.
            sparse_vectors(n, u_bound, 3, &mut |u| {
                if canonical_sign(u) {
                    self.push_reflection_candidate(&mut refls, u.to_vec());
                }
                refls.len() < max_generators
            });
        }
        let perms = if with_perms && n <= 7 {
            signed_permutations_preserving(self)
        } else {
            Vec::new()
        };
        Generators { refls, perms }
    }

    /// Breadth-first search for an isometry `f` with `f(v) = v'`, over the
    /// group generated by bounded reflections and by signed basis
    /// permutations preserving the form. Exhaustion is inconclusive.
    pub fn wall_isometry(
        &self,
        v: &[i64],
        target: &[i64],
        params: &SearchParams,
    ) -> Result<SearchOutcome, LatticeError> {
        self.check_dims(v)?;
        self.check_dims(target)?;
        if divisibility(v)? != 1 || divisibility(target)? != 1 {
            return Err(LatticeError::Hypothesis(
                "wall_isometry requires primitive vectors".into(),
            ));
        }
        if self.norm(v)? != self.norm(target)? {
            return Err(LatticeError::Hypothesis(format!(
                "norms differ: {} vs {}",
                self.norm(v)?,
                self.norm(target)?
            )));
        }
        if self.vector_type(v)? != self.vector_type(target)? {
            return Err(LatticeError::Hypothesis(format!(
                "types differ: {} vs {}",
                self.vector_type(v)?,
                self.vector_type(target)?
            )));
        }
        if v == target {
            return Ok(SearchOutcome::Found(IsometryMap::identity(self.rank())));
        }

        let cap = if params.coord_cap > 0 {
            params.coord_cap
        } else {
            let m = v
                .iter()
                .chain(target.iter())
                .map(|x| x.abs())
                .max()
                .unwrap_or(1);
            m + 2 * params.u_bound + 2
        };
        let gens = self.generators(params.u_bound, params.max_generators);
        let mut states: Vec<Vec<i64>> = vec![v.to_vec()];
        let mut parent: Vec<(usize, Move)> = vec![(0, Move::Root)];
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        index.insert(v.to_vec(), 0);
        let mut head = 0;
        while head < states.len() {
            if head >= params.node_budget {
                return Ok(SearchOutcome::Exhausted {
                    nodes: head,
                    budget_hit: true,
                });
            }
            let w = states[head].clone();
            for (gi, g) in gens.refls.iter().enumerate() {
                if let Some(img) = g.apply_boxed(&w, cap) {
                    if !index.contains_key(&img) {
                        let id = states.len();
                        index.insert(img.clone(), id);
                        states.push(img.clone());
                        parent.push((head, Move::Refl(gi)));
                        if img == target {
                            return Ok(SearchOutcome::Found(
                                self.compose_path(&gens, &states, &parent, id, v, target)?,
                            ));
                        }
                    }
                }
            }
            for (pi, p) in gens.perms.iter().enumerate() {
                let img = p.mul_vec(&w);
                if img.iter().all(|x| x.abs() <= cap) && !index.contains_key(&img) {
                    let id = states.len();
                    index.insert(img.clone(), id);
                    states.push(img.clone());
                    parent.push((head, Move::Perm(pi)));
                    if img == target {
                        return Ok(SearchOutcome::Found(
                            self.compose_path(&gens, &states, &parent, id, v, target)?,
                        ));
                    }
                }
            }
            head += 1;
        }
        Ok(SearchOutcome::Exhausted {
            nodes: head,
            budget_hit: false,
        })
    }

    fn compose_path(
        &self,
        gens: &Generators,
        _states: &[Vec<i64>],
        parent: &[(usize, Move)],
        mut at: usize,
        v: &[i64],
        target: &[i64],
    ) -> Result<IsometryMap, LatticeError> {
        let mut moves = Vec::new();
        loop {
            let (p, m) = parent[at];
            match m {
                Move::Root => break,
                _ => {
                    moves.push(m);
                    at = p;
                }
            }
        }
        moves.reverse();
        let mut mat = IntMatrix::identity(self.rank());
        for m in moves {
            let g = match m {
                Move::Refl(i) => gens.refls[i].matrix(self.rank()),
                Move::Perm(i) => gens.perms[i].clone(),
                Move::Root => unreachable!(),
            };
            mat = g.mul(&mat);
        }
        debug_assert_eq!(mat.mul_vec(v), target);
        let iso = IsometryMap::new(self, mat)?;
        debug_assert_eq!(iso.sign(), 1);
        Ok(iso)
    }

    /// Breadth-first search for an isometry whose mod-2 reduction carries
    /// `v mod 2` to `v' mod 2`. Subsumes the explicit sigma_u moves used in
    /// the small-rank odd case; exhaustion is inconclusive.
    pub fn mod2_isometry(
        &self,
        v: &[i64],
        target: &[i64],
        params: &SearchParams,
    ) -> Result<SearchOutcome, LatticeError> {
        self.check_dims(v)?;
        self.check_dims(target)?;
        if divisibility(v)? != 1 || divisibility(target)? != 1 {
            return Err(LatticeError::Hypothesis(
                "mod2_isometry requires primitive vectors".into(),
            ));
        }
        if (self.norm(v)? - self.norm(target)?).rem_euclid(4) != 0 {
            return Err(LatticeError::Hypothesis(format!(
                "norms differ mod 4: {} vs {}",
                self.norm(v)?,
                self.norm(target)?
            )));
        }
        if self.parity == Parity::Odd && self.vector_type(v)? != self.vector_type(target)? {
            return Err(LatticeError::Hypothesis(format!(
                "types differ: {} vs {}",
                self.vector_type(v)?,
                self.vector_type(target)?
            )));
        }
        let start = Mod2Class::from_vector(v);
        let goal = Mod2Class::from_vector(target);
        if start == goal {
            return Ok(SearchOutcome::Found(IsometryMap::identity(self.rank())));
        }
        let gens = self.generators(params.u_bound, params.max_generators);
        // Unit reflections act trivially mod 2; keep only norm +-2 ones.
        let refl_ids: Vec<usize> = gens
            .refls
            .iter()
            .enumerate()
            .filter(|(_, g)| g.scale.abs() == 1)
            .map(|(i, _)| i)
            .collect();
        let mut states: Vec<Vec<u8>> = vec![start.bits.clone()];
        let mut parent: Vec<(usize, Move)> = vec![(0, Move::Root)];
        let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
        index.insert(start.bits.clone(), 0);
        let mut head = 0;
        while head < states.len() {
            if head >= params.node_budget {
                return Ok(SearchOutcome::Exhausted {
                    nodes: head,
                    budget_hit: true,
                });
            }
            let w = states[head].clone();
            let visit = |img: Vec<u8>,
                         mv: Move,
                         states: &mut Vec<Vec<u8>>,
                         parent: &mut Vec<(usize, Move)>,
                         index: &mut HashMap<Vec<u8>, usize>|
             -> Option<usize> {
                if !index.contains_key(&img) {
                    let id = states.len();
                    index.insert(img.clone(), id);
                    states.push(img);
                    parent.push((head, mv));
                    Some(id)
                } else {
                    None
                }
            };
            for &gi in &refl_ids {
                let g = &gens.refls[gi];
                let img = g.apply_mod2(&w);
                if let Some(id) = visit(img, Move::Refl(gi), &mut states, &mut parent, &mut index) {
                    if states[id] == goal.bits {
                        let iso = self.compose_mod2_path(&gens, &parent, id, v, target)?;
                        return Ok(SearchOutcome::Found(iso));
                    }
                }
            }
            for (pi, p) in gens.perms.iter().enumerate() {
                let lifted: Vec<i64> = w.iter().map(|&b| b as i64).collect();
                let img: Vec<u8> = p
                    .mul_vec(&lifted)
                    .iter()
                    .map(|x| (x.rem_euclid(2)) as u8)
                    .collect();
                if let Some(id) = visit(img, Move::Perm(pi), &mut states, &mut parent, &mut index) {
                    if states[id] == goal.bits {
                        let iso = self.compose_mod2_path(&gens, &parent, id, v, target)?;
                        return Ok(SearchOutcome::Found(iso));
                    }
                }
            }
            head += 1;
        }
        Ok(SearchOutcome::Exhausted {
            nodes: head,
            budget_hit: false,
        })
    }

    fn compose_mod2_path(
        &self,
        gens: &Generators,
        parent: &[(usize, Move)],
        mut at: usize,
        v: &[i64],
        target: &[i64],
    ) -> Result<IsometryMap, LatticeError> {
        let mut moves = Vec::new();
        loop {
            let (p, m) = parent[at];
            match m {
                Move::Root => break,
                _ => {
                    moves.push(m);
                    at = p;
                }
            }
        }
        moves.reverse();
        let mut mat = IntMatrix::identity(self.rank());
        for m in moves {
            let g = match m {
                Move::Refl(i) => gens.refls[i].matrix(self.rank()),
                Move::Perm(i) => gens.perms[i].clone(),
                Move::Root => unreachable!(),
            };
            mat = g.mul(&mat);
        }
        let image = mat.mul_vec(v);
        debug_assert!(image
            .iter()
            .zip(target.iter())
            .all(|(a, b)| (a - b) % 2 == 0));
        IsometryMap::new(self, mat)
    }

    /// Closure of `{v}` under bounded reflections, intersected with the
    /// coordinate box `|x_i| <= coord_bound`. Reflection paths routinely pass
    /// through vectors larger than both endpoints, so the search widens its
    /// working cap (every intermediate keeps the norm of `v`, which keeps the
    /// strata small) until the in-box intersection stabilizes. The result is
    /// sorted.
    pub fn orbit_enumerate(
        &self,
        v: &[i64],
        coord_bound: i64,
        budget: usize,
    ) -> Result<Vec<LatticeVector>, LatticeError> {
        let gens = self.generators(coord_bound, usize::MAX);
        self.orbit_enumerate_with(&gens, v, coord_bound, budget)
    }

    /// One BFS pass with an explicit working cap on intermediate vectors.
    pub fn orbit_enumerate_capped(
        &self,
        v: &[i64],
        coord_bound: i64,
        working_cap: i64,
        budget: usize,
    ) -> Result<Vec<LatticeVector>, LatticeError> {
        let gens = self.generators(coord_bound, usize::MAX);
        self.orbit_enumerate_capped_with(&gens, v, coord_bound, working_cap, budget)
    }

    pub(crate) fn orbit_enumerate_with(
        &self,
        gens: &Generators,
        v: &[i64],
        coord_bound: i64,
        budget: usize,
    ) -> Result<Vec<LatticeVector>, LatticeError> {
        self.orbit_enumerate_capped_with(
            gens,
            v,
            coord_bound,
            coord_bound + ORBIT_CAP_SLACK,
            budget,
        )
    }

    fn orbit_enumerate_capped_with(
        &self,
        gens: &Generators,
        v: &[i64],
        coord_bound: i64,
        working_cap: i64,
        budget: usize,
    ) -> Result<Vec<LatticeVector>, LatticeError> {
        self.check_dims(v)?;
        if v.iter().all(|&x| x == 0) {
            return Err(LatticeError::ZeroVector);
        }
        if v.iter().any(|&x| x.abs() > coord_bound) {
            return Err(LatticeError::Hypothesis(format!(
                "seed vector {v:?} lies outside the coordinate box {coord_bound}"
            )));
        }
        // Vectors are packed into u128 keys (the coordinates fit the working
        // cap) so membership tests avoid hashing heap vectors in the hot
        // loop; ranks too large to pack fall back to vector keys.
        let packer = Packer::new(self.rank(), working_cap);
        let mut seen_packed: std::collections::HashSet<u128> = std::collections::HashSet::new();
        let mut seen_vec: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
        let mut insert = |w: &[i64]| -> bool {
            match &packer {
                Some(p) => seen_packed.insert(p.pack(w)),
                None => seen_vec.insert(w.to_vec()),
            }
        };
        let mut queue: Vec<Vec<i64>> = vec![v.to_vec()];
        insert(v);
        let mut head = 0;
        let mut img = vec![0i64; self.rank()];
        while head < queue.len() {
            if head >= budget {
                return Err(LatticeError::BudgetExceeded { nodes: head });
            }
            let w = queue[head].clone();
            head += 1;
            for g in &gens.refls {
                if g.apply_into(&w, working_cap, &mut img) && insert(&img) {
                    queue.push(img.clone());
                }
            }
        }
        let mut out: Vec<LatticeVector> = queue
            .into_iter()
            .filter(|w| w.iter().all(|&x| x.abs() <= coord_bound))
            .collect();
        out.sort();
        Ok(out)
    }
}

/// Packs small-coordinate vectors into u128 keys; `None` when the radix
/// tower would overflow (very large rank).
struct Packer {
    radix: u128,
    offset: i64,
}

impl Packer {
    fn new(rank: usize, cap: i64) -> Option<Packer> {
        let radix = (2 * cap + 1) as u128;
        radix.checked_pow(rank as u32)?;
        Some(Packer { radix, offset: cap })
    }

    #[inline]
    fn pack(&self, v: &[i64]) -> u128 {
        let mut key: u128 = 0;
        for &x in v {
            key = key * self.radix + (x + self.offset) as u128;
        }
        key
    }
}

/// How far beyond the requested box the orbit search routes reflection
/// paths: endpoints inside the box are frequently connected only through
/// larger vectors of the same norm.
const ORBIT_CAP_SLACK: i64 = 2;

/// gcd of the coordinates; basis-independent for free abelian groups.
pub fn divisibility(v: &[i64]) -> Result<i64, LatticeError> {
    let mut g: i64 = 0;
    for &x in v {
        g = num_integer::gcd(g, x);
    }
    if g == 0 {
        return Err(LatticeError::ZeroVector);
    }
    Ok(g)
}

/// Search knobs for the bounded isometry searches.
#[derive(Debug, Clone)]
pub struct SearchParams {
    /// Coordinate bound for reflection vectors u.
    pub u_bound: i64,
    /// Maximum number of BFS nodes expanded.
    pub node_budget: usize,
    /// Coordinate cap for intermediate vectors (0 = derive from inputs).
    pub coord_cap: i64,
    /// Cap on the number of reflection generators enumerated.
    pub max_generators: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            u_bound: 2,
            node_budget: 200_000,
            coord_cap: 0,
            max_generators: 500_000,
        }
    }
}

/// Result of a bounded search: found, or exhausted without a certificate.
#[derive(Debug)]
pub enum SearchOutcome {
    Found(IsometryMap),
    Exhausted { nodes: usize, budget_hit: bool },
}

impl SearchOutcome {
    pub fn found(self) -> Option<IsometryMap> {
        match self {
            SearchOutcome::Found(f) => Some(f),
            SearchOutcome::Exhausted { .. } => None,
        }
    }
}

/// An isometry (sign +1) or anti-isometry (sign -1) of a lattice:
/// `M^T G M = sign * G` with `det M = +-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsometryMap {
    matrix: IntMatrix,
    sign: i64,
}

impl IsometryMap {
    pub fn new(lattice: &BilinearLattice, matrix: IntMatrix) -> Result<Self, LatticeError> {
        if matrix.size() != lattice.rank() {
            return Err(LatticeError::DimensionMismatch {
                rank: lattice.rank(),
                len: matrix.size(),
            });
        }
        let d = matrix.det();
        if d != 1 && d != -1 {
            return Err(LatticeError::NotIsometry);
        }
        let mtgm = matrix.transpose().mul(lattice.gram()).mul(&matrix);
        if &mtgm == lattice.gram() {
            Ok(IsometryMap { matrix, sign: 1 })
        } else if mtgm == lattice.gram().neg() {
            Ok(IsometryMap { matrix, sign: -1 })
        } else {
            Err(LatticeError::NotIsometry)
        }
    }

    pub fn identity(rank: usize) -> Self {
        IsometryMap {
            matrix: IntMatrix::identity(rank),
            sign: 1,
        }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn sign(&self) -> i64 {
        self.sign
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix.mul_vec(v)
    }
}

/// A class in `V (x) Z/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mod2Class {
    bits: Vec<u8>,
}

impl Mod2Class {
    pub fn new(bits: Vec<u8>) -> Self {
        assert!(bits.iter().all(|&b| b <= 1), "bits must be 0 or 1");
        Mod2Class { bits }
    }

    pub fn from_vector(v: &[i64]) -> Self {
        Mod2Class {
            bits: v.iter().map(|&x| (x.rem_euclid(2)) as u8).collect(),
        }
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

struct ReflGen {
    u: Vec<i64>,
    gu: Vec<i64>,
    /// -2 / norm(u): +-1 for norm -+2, +-2 for norm -+1.
    scale: i64,
}

impl ReflGen {
    /// sigma_u(w) written into `out`; false when the reflection fixes `w` or
    /// pushes it past the cap.
    #[inline]
    fn apply_into(&self, w: &[i64], cap: i64, out: &mut [i64]) -> bool {
        let mut c: i64 = 0;
        for (a, b) in w.iter().zip(self.gu.iter()) {
            c += a * b;
        }
        if c == 0 {
            return false;
        }
        let f = self.scale * c;
        for i in 0..w.len() {
            let x = w[i] + f * self.u[i];
            if x.abs() > cap {
                return false;
            }
            out[i] = x;
        }
        true
    }

    /// sigma_u(w) = w + scale * (w . Gu) * u, or None if it leaves the box.
    fn apply_boxed(&self, w: &[i64], cap: i64) -> Option<Vec<i64>> {
        let mut c: i64 = 0;
        for (a, b) in w.iter().zip(self.gu.iter()) {
            c += a * b;
        }
        if c == 0 {
            return None;
        }
        let f = self.scale * c;
        let mut out = Vec::with_capacity(w.len());
        for (a, u) in w.iter().zip(self.u.iter()) {
            let x = a + f * u;
            if x.abs() > cap {
                return None;
            }
            out.push(x);
        }
        Some(out)
    }

    fn apply_mod2(&self, w: &[u8]) -> Vec<u8> {
        // scale is odd here (norm +-2 reflections only)
        let mut c: u8 = 0;
        for (a, b) in w.iter().zip(self.gu.iter()) {
            c ^= a & (b.rem_euclid(2) as u8);
        }
        if c == 0 {
            return w.to_vec();
        }
        w.iter()
            .zip(self.u.iter())
            .map(|(a, u)| a ^ (u.rem_euclid(2) as u8))
            .collect()
    }

    fn matrix(&self, n: usize) -> IntMatrix {
        let mut m = IntMatrix::identity(n);
        for r in 0..n {
            for c in 0..n {
                let v = m.get(r, c) + self.scale * self.u[r] * self.gu[c];
                m.set(r, c, v);
            }
        }
        m
    }
}

pub(crate) struct Generators {
    refls: Vec<ReflGen>,
    perms: Vec<IntMatrix>,
}

#[derive(Clone, Copy, Debug)]
enum Move {
    Root,
    Refl(usize),
    Perm(usize),
}

/// First nonzero coordinate positive (sigma_u = sigma_{-u}).
fn canonical_sign(u: &[i64]) -> bool {
    for &x in u {
        if x != 0 {
            return x > 0;
        }
    }
    false
}

/// Advance a mixed-radix odometer; false when wrapped around.
fn odometer(u: &mut [i64], lo: i64, hi: i64) -> bool {
    for i in (0..u.len()).rev() {
        if u[i] < hi {
            u[i] += 1;
            for x in u.iter_mut().skip(i + 1) {
                *x = lo;
            }
            return true;
        }
    }
    false
}

/// Enumerate vectors with at most `support` nonzero coordinates, entries in
/// [-bound, bound]. Callback returns false to stop.
fn sparse_vectors(n: usize, bound: i64, support: usize, f: &mut dyn FnMut(&[i64]) -> bool) {
    let mut positions: Vec<usize> = Vec::new();
    fn rec(
        n: usize,
        bound: i64,
        support: usize,
        start: usize,
        positions: &mut Vec<usize>,
        f: &mut dyn FnMut(&[i64]) -> bool,
    ) -> bool {
        if !positions.is_empty() {
            // assign all nonzero values to chosen positions
            let k = positions.len();
            let mut vals = vec![-bound; k];
            loop {
                if vals.iter().all(|&v| v != 0) {
                    let mut u = vec![0i64; n];
                    for (p, &v) in positions.iter().zip(vals.iter()) {
                        u[*p] = v;
                    }
                    if !f(&u) {
                        return false;
                    }
                }
                if !odometer(&mut vals, -bound, bound) {
                    break;
                }
            }
        }
        if positions.len() < support {
            for p in start..n {
                positions.push(p);
                if !rec(n, bound, support, p + 1, positions, f) {
                    positions.pop();
                    return false;
                }
                positions.pop();
            }
        }
        true
    }
    rec(n, bound, support, 0, &mut positions, f);
}

/// All signed permutation matrices preserving the Gram matrix (small rank).
fn signed_permutations_preserving(lat: &BilinearLattice) -> Vec<IntMatrix> {
    let n = lat.rank();
    let mut perms: Vec<Vec<usize>> = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    permute_rec(&mut cur, 0, &mut perms);
    let mut out = Vec::new();
    for p in &perms {
        for mask in 0..(1u32 << n) {
            let mut m = IntMatrix::new(n, vec![0; n * n]);
            for (i, &pi) in p.iter().enumerate() {
                let s = if mask & (1 << i) != 0 { -1 } else { 1 };
                m.set(pi, i, s);
            }
            if m == IntMatrix::identity(n) {
                continue;
            }
            let mtgm = m.transpose().mul(lat.gram()).mul(&m);
            if &mtgm == lat.gram() {
                out.push(m);
            }
        }
    }
    out
}

fn permute_rec(cur: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == cur.len() {
        out.push(cur.clone());
        return;
    }
    for i in k..cur.len() {
        cur.swap(k, i);
        permute_rec(cur, k + 1, out);
        cur.swap(k, i);
    }
}

/// Exact inertia (p+, p-) by symmetric rational diagonalization.
fn rational_inertia(gram: &IntMatrix) -> (usize, usize) {
    let n = gram.size();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| BigRational::from(BigInt::from(gram.get(r, c))))
                .collect()
        })
        .collect();
    let mut pos = 0;
    let mut neg = 0;
    for i in 0..n {
        if m[i][i].is_zero() {
            if let Some(j) = (i + 1..n).find(|&j| !m[j][j].is_zero()) {
                // swap basis vectors i and j
                m.swap(i, j);
                for row in m.iter_mut() {
                    row.swap(i, j);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !m[i][j].is_zero()) {
                // e_i (+)= e_j, making the diagonal entry 2 m[i][j]
                for c in 0..n {
                    let t = m[j][c].clone();
                    m[i][c] += t;
                }
                for r in 0..n {
                    let t = m[r][j].clone();
                    m[r][i] += t;
                }
            } else {
                // zero row: degenerate block (cannot happen for unimodular)
                continue;
            }
        }
        let d = m[i][i].clone();
        if d.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for r in i + 1..n {
            if m[r][i].is_zero() {
                continue;
            }
            let f = &m[r][i] / &d;
            for c in 0..n {
                let t = &m[i][c] * &f;
                m[r][c] -= t.clone();
            }
            for c in 0..n {
                let t = &m[c][i] * &f;
                m[c][r] -= t;
            }
        }
    }
    (pos, neg)
}

fn recognize_standard_form(rank: usize, signature: i64, parity: Parity) -> Option<StandardForm> {
    match parity {
        Parity::Odd => {
            let p = (rank as i64 + signature) / 2;
            let q = (rank as i64 - signature) / 2;
            if p >= 0 && q >= 0 {
                Some(StandardForm::DiagPQ {
                    plus: p as usize,
                    minus: q as usize,
                })
            } else {
                None
            }
        }
        Parity::Even => {
            if signature % 8 != 0 {
                return None;
            }
            let e8 = (signature.abs() / 8) as usize;
            let rest = rank as i64 - 8 * e8 as i64;
            if rest < 0 || rest % 2 != 0 {
                return None;
            }
            Some(StandardForm::HyperbolicE8 {
                hyperbolic: (rest / 2) as usize,
                e8,
                e8_negative: signature < 0,
            })
        }
    }
}
