//! The four Mori-fiber-space input families, their validation against the
//! structural constraints of the geometry, and the characteristic-class
//! formulas that extract the classifying invariants.
//!
//! Conventions, fixed once for the whole crate:
//!
//! * `K^3 = -<c1(X)^3, [X]>` and `K^3_{X/Y} = -<(c1(X) - f*c1(Y))^3, [X]>`.
//! * Smooth conic bundles: `u` is the first Chern class of the tautological
//!   line bundle of `P(E)`, so `u^2 - c1(E)u + c2(E) = 0`,
//!   `c1(X) = c1(Y) + c1(E) - 2u`, and the fiber integration is
//!   `<u . f*sigma_Y, [X]> = -1` (the tautological bundle restricts to
//!   degree -1 on fibers). With that orientation
//!   `<c1(X) p1(X), [X]> = +2<(c1^2 - 4c2) + p1(Y), [Y]>`; the sign is
//!   pinned by `K^3(P^2 x P^1) = -54` and by
//!   `K^3(Bl_pt P^3) = K^3(P(O + O(1)) over P^2) = -56`.
//! * Singular conic bundles: `u = c1(X) - c1(Y)` with the integral
//!   normalization `2u^2 = c1 u + c2` and `<u . sigma_Y, [X]> = 2`.
//! * Quadric bundles over the line: `K^3_{X/Y} = -8c` for the bundle
//!   parameter `c <= -1`, the unique choice compatible with
//!   `K(X,Y) = d(K^3_{X/Y} - K^3)/6 = 8`.

use serde::Serialize;

use crate::cubic::{CubicForm, WallJuppTriple};
use crate::lattice::{divisibility, BilinearLattice, LatticeError, Mod2Class, VectorType};

#[derive(Debug, thiserror::Error)]
pub enum MfsError {
    #[error("invalid surface data: {}", violations.join("; "))]
    Surface { violations: Vec<String> },
    #[error("invalid singular conic bundle: {}", violations.join("; "))]
    SingularBundle { violations: Vec<String> },
    #[error("invalid del Pezzo fibration: {0}")]
    DelPezzo(String),
    #[error("invalid rank-one Fano: {0}")]
    Fano(String),
    #[error("invalid invariant record: {0}")]
    Record(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Dimension of the base of the extremal contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BaseDim {
    Zero,
    One,
    Two,
}

impl BaseDim {
    pub fn as_u8(self) -> u8 {
        match self {
            BaseDim::Zero => 0,
            BaseDim::One => 1,
            BaseDim::Two => 2,
        }
    }
}

/// Whether the conic bundle has singular fibers; not applicable over bases
/// of dimension below two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FibrationKind {
    Smooth,
    Singular,
    NotApplicable,
}

impl std::fmt::Display for FibrationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FibrationKind::Smooth => write!(f, "smooth"),
            FibrationKind::Singular => write!(f, "singular"),
            FibrationKind::NotApplicable => write!(f, "none"),
        }
    }
}

/// The five-valued relation between `w2(X)` and `w2(Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum W2Type {
    /// both spin
    Zero,
    /// X spin, Y not
    I,
    /// X not spin, Y spin
    II,
    /// both non-spin, `w2(X) - w2(Y) = 0`
    III0,
    /// both non-spin, `w2(X) - w2(Y) != 0`
    III1,
}

impl std::fmt::Display for W2Type {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            W2Type::Zero => write!(f, "0"),
            W2Type::I => write!(f, "I"),
            W2Type::II => write!(f, "II"),
            W2Type::III0 => write!(f, "III0"),
            W2Type::III1 => write!(f, "III1"),
        }
    }
}

/// The cube of a degree-2 generator mod 3, collapsed to vanishing or not;
/// this is the only consequence of the Steenrod power used by the rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mod3Class {
    Zero,
    Nonzero,
}

impl std::fmt::Display for Mod3Class {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mod3Class::Zero => write!(f, "zero"),
            Mod3Class::Nonzero => write!(f, "nonzero"),
        }
    }
}

/// The base surface of a conic bundle: intersection form, first Chern class
/// and Euler characteristic, validated against the surface constraints
/// (Wu, Noether, Hirzebruch signature, Miyaoka-Yau).
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceData {
    lattice: BilinearLattice,
    c1y: Vec<i64>,
    euler: i64,
    chi: i64,
}

/// Validate surface data and return the holomorphic Euler characteristic.
/// Every violated constraint is reported by name.
pub fn validate_surface(
    lattice: &BilinearLattice,
    c1y: &[i64],
    euler: i64,
) -> Result<i64, MfsError> {
    let mut violations = Vec::new();
    if c1y.len() != lattice.rank() {
        violations.push(format!(
            "dimension: c1Y has length {}, lattice rank {}",
            c1y.len(),
            lattice.rank()
        ));
        return Err(MfsError::Surface { violations });
    }
    if euler != 2 + lattice.rank() as i64 {
        violations.push(format!(
            "euler-rank: eY = {} but 2 + rank = {}",
            euler,
            2 + lattice.rank()
        ));
    }
    for i in 0..lattice.rank() {
        let mut vb: i64 = 0;
        for j in 0..lattice.rank() {
            vb += c1y[j] * lattice.gram().get(j, i);
        }
        if (vb - lattice.gram().get(i, i)) % 2 != 0 {
            violations.push(format!(
                "wu-characteristic: c1Y . b_{i} != b_{i} . b_{i} (mod 2)"
            ));
            break;
        }
    }
    let norm = lattice.norm(c1y)?;
    let mut chi = None;
    if (norm + euler).rem_euclid(12) != 0 {
        violations.push(format!(
            "noether: c1Y^2 + eY = {} is not divisible by 12",
            norm + euler
        ));
    } else {
        let c = (norm + euler) / 12;
        if lattice.signature() != 4 * c - euler {
            violations.push(format!(
                "signature-chi: sign = {} but 4 chi - eY = {}",
                lattice.signature(),
                4 * c - euler
            ));
        } else {
            chi = Some(c);
        }
    }
    if 3 * euler < norm {
        violations.push(format!(
            "miyaoka-yau: 3 eY = {} < c1Y^2 = {}",
            3 * euler,
            norm
        ));
    } else if 3 * euler == norm
        && !(lattice.rank() == 1 && lattice.gram().get(0, 0) == 1 && norm == 9)
    {
        violations.push("miyaoka-yau: equality is only attained by the plane".into());
    }
    match (violations.is_empty(), chi) {
        (true, Some(c)) => Ok(c),
        _ => Err(MfsError::Surface { violations }),
    }
}

impl SurfaceData {
    pub fn new(lattice: BilinearLattice, c1y: Vec<i64>, euler: i64) -> Result<Self, MfsError> {
        let chi = validate_surface(&lattice, &c1y, euler)?;
        Ok(SurfaceData {
            lattice,
            c1y,
            euler,
            chi,
        })
    }

    /// The projective plane: lattice (+1), c1 = 3, e = 3.
    pub fn projective_plane() -> Self {
        SurfaceData::new(BilinearLattice::diag(1, 0), vec![3], 3).expect("plane data is valid")
    }

    /// The plane blown up in `q` points: diag(1, q(-1)), c1 = (3, 1, ..., 1).
    pub fn blown_up_plane(q: usize) -> Self {
        let mut c1 = vec![1i64; q + 1];
        c1[0] = 3;
        SurfaceData::new(BilinearLattice::diag(1, q), c1, 3 + q as i64)
            .expect("del Pezzo surface data is valid")
    }

    /// A K3-type surface: 3H (+) 2(-E8), c1 = 0, e = 24.
    pub fn k3_surface() -> Self {
        let h = BilinearLattice::hyperbolic_plane();
        let e8 = BilinearLattice::e8(true);
        let lattice = BilinearLattice::direct_sum(&[&h, &h, &h, &e8, &e8]);
        SurfaceData::new(lattice, vec![0; 22], 24).expect("K3 data is valid")
    }

    /// The quadric surface: form H, c1 = (2, 2), e = 4.
    pub fn quadric_surface() -> Self {
        SurfaceData::new(BilinearLattice::hyperbolic_plane(), vec![2, 2], 4)
            .expect("quadric data is valid")
    }

    pub fn lattice(&self) -> &BilinearLattice {
        &self.lattice
    }

    pub fn c1y(&self) -> &[i64] {
        &self.c1y
    }

    pub fn euler(&self) -> i64 {
        self.euler
    }

    pub fn chi(&self) -> i64 {
        self.chi
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    /// `<p1(Y), [Y]> = c1^2 - 2e`
    pub fn p1(&self) -> i64 {
        self.lattice.norm(&self.c1y).expect("validated dims") - 2 * self.euler
    }

    fn w2_nonzero(&self) -> bool {
        self.c1y.iter().any(|x| x % 2 != 0)
    }
}

/// `P(E)` for a rank-2 bundle `E` on the surface; any integer pair
/// `(c1(E), c2(E))` is legal smooth-bundle data.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothConicBundle {
    pub surface: SurfaceData,
    c1e: Vec<i64>,
    c2e: i64,
}

impl SmoothConicBundle {
    pub fn new(surface: SurfaceData, c1e: Vec<i64>, c2e: i64) -> Result<Self, MfsError> {
        if c1e.len() != surface.rank() {
            return Err(MfsError::Lattice(LatticeError::DimensionMismatch {
                rank: surface.rank(),
                len: c1e.len(),
            }));
        }
        Ok(SmoothConicBundle { surface, c1e, c2e })
    }

    pub fn c1e(&self) -> &[i64] {
        &self.c1e
    }

    pub fn c2e(&self) -> i64 {
        self.c2e
    }
}

/// A conic bundle with nonempty discriminant curve, described by the
/// integral normalization `2u^2 = c1 u + c2` on the base surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularConicBundle {
    pub surface: SurfaceData,
    c1rel: Vec<i64>,
    c2rel: i64,
}

impl SingularConicBundle {
    pub fn new(surface: SurfaceData, c1rel: Vec<i64>, c2rel: i64) -> Result<Self, MfsError> {
        let mut violations = Vec::new();
        if c1rel.len() != surface.rank() {
            return Err(MfsError::Lattice(LatticeError::DimensionMismatch {
                rank: surface.rank(),
                len: c1rel.len(),
            }));
        }
        if c1rel.iter().all(|&x| x == 0) {
            violations.push("discriminant-empty: c1 = 0 means an empty discriminant curve".into());
            return Err(MfsError::SingularBundle { violations });
        }
        let norm = surface.lattice.norm(&c1rel)?;
        if norm % 2 != 0 {
            violations.push(format!(
                "c1-norm-parity: c1^2 = {norm} must be even for u^3 to be integral"
            ));
        }
        let b3 = norm + surface.lattice.pairing(&surface.c1y, &c1rel)?;
        if b3 < 0 {
            violations.push(format!("b3-negative: b3 = {b3}"));
        }
        if b3 % 2 != 0 {
            violations.push(format!("b3-parity: b3 = {b3} is odd"));
        }
        if violations.is_empty() {
            Ok(SingularConicBundle {
                surface,
                c1rel,
                c2rel,
            })
        } else {
            Err(MfsError::SingularBundle { violations })
        }
    }

    pub fn c1rel(&self) -> &[i64] {
        &self.c1rel
    }

    pub fn c2rel(&self) -> i64 {
        self.c2rel
    }
}

/// A del Pezzo fibration over the line, split by the diffeomorphism type of
/// the generic fiber (equivalently by `K(X,Y)`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DelPezzoFibration {
    /// `1 <= K <= 6`: fiber is the plane blown up in `9 - K` points. The
    /// Euler characteristic and relative `K^3` are free inputs; `d > 1` only
    /// for `K = 6`.
    LowDegree {
        k: i64,
        d: i64,
        rel_k3: i64,
        euler: i64,
    },
    /// `K = 8`: a quadric surface bundle, determined by the integer `c <= -1`.
    QuadricBundle { twist: i64 },
    /// `K = 9`: a plane bundle, determined by the bundle degree mod 3.
    PlaneBundle { twist: i64 },
}

impl DelPezzoFibration {
    /// Assemble from parsed fields; `K = 7` does not occur.
    pub fn from_parts(
        k: i64,
        d: Option<i64>,
        rel_k3: Option<i64>,
        euler: Option<i64>,
        twist: Option<i64>,
    ) -> Result<Self, MfsError> {
        match k {
            1..=6 => {
                let d = d.unwrap_or(1);
                let rel_k3 = rel_k3
                    .ok_or_else(|| MfsError::DelPezzo("relK3 is required for K <= 6".into()))?;
                let euler =
                    euler.ok_or_else(|| MfsError::DelPezzo("eX is required for K <= 6".into()))?;
                let dp = DelPezzoFibration::LowDegree {
                    k,
                    d,
                    rel_k3,
                    euler,
                };
                dp.validate()?;
                Ok(dp)
            }
            8 | 9 => {
                let twist = twist
                    .ok_or_else(|| MfsError::DelPezzo(format!("twist is required for K = {k}")))?;
                let dp = if k == 8 {
                    DelPezzoFibration::QuadricBundle { twist }
                } else {
                    DelPezzoFibration::PlaneBundle { twist }
                };
                dp.validate()?;
                Ok(dp)
            }
            7 => Err(MfsError::DelPezzo(
                "K = 7 does not occur: K(X,Y) takes values in {1, ..., 6, 8, 9}".into(),
            )),
            other => Err(MfsError::DelPezzo(format!(
                "K = {other} is outside the value set {{1, ..., 6, 8, 9}}"
            ))),
        }
    }

    pub fn validate(&self) -> Result<(), MfsError> {
        match *self {
            DelPezzoFibration::LowDegree {
                k,
                d,
                rel_k3: _,
                euler,
            } => {
                if !(1..=6).contains(&k) {
                    return Err(MfsError::DelPezzo(format!("K = {k} is not in 1..=6")));
                }
                if k <= 5 && d != 1 {
                    return Err(MfsError::DelPezzo(format!(
                        "d = {d} but d(X,Y) = 1 whenever K(X,Y) != 6"
                    )));
                }
                if k == 6 && ![1, 2, 3, 6].contains(&d) {
                    return Err(MfsError::DelPezzo(format!("d = {d} must divide K = 6")));
                }
                let b3 = 6 - euler;
                if b3 < 0 || b3 % 2 != 0 {
                    return Err(MfsError::DelPezzo(format!(
                        "b3 = 6 - eX = {b3} must be a nonnegative even integer"
                    )));
                }
                Ok(())
            }
            DelPezzoFibration::QuadricBundle { twist } => {
                if twist > -1 {
                    return Err(MfsError::DelPezzo(format!(
                        "quadric bundle twist must be <= -1 (b3 = -2c - 2 >= 0), got {twist}"
                    )));
                }
                Ok(())
            }
            DelPezzoFibration::PlaneBundle { .. } => Ok(()),
        }
    }

    pub fn k(&self) -> i64 {
        match *self {
            DelPezzoFibration::LowDegree { k, .. } => k,
            DelPezzoFibration::QuadricBundle { .. } => 8,
            DelPezzoFibration::PlaneBundle { .. } => 9,
        }
    }

    pub fn d(&self) -> i64 {
        match *self {
            DelPezzoFibration::LowDegree { d, .. } => d,
            _ => 1,
        }
    }

    pub fn rel_k3(&self) -> i64 {
        match *self {
            DelPezzoFibration::LowDegree { rel_k3, .. } => rel_k3,
            DelPezzoFibration::QuadricBundle { twist } => -8 * twist,
            DelPezzoFibration::PlaneBundle { .. } => 0,
        }
    }

    pub fn euler(&self) -> i64 {
        match *self {
            DelPezzoFibration::LowDegree { euler, .. } => euler,
            DelPezzoFibration::QuadricBundle { twist } => 2 * twist + 8,
            DelPezzoFibration::PlaneBundle { .. } => 6,
        }
    }

    pub fn twist(&self) -> Option<i64> {
        match *self {
            DelPezzoFibration::LowDegree { .. } => None,
            DelPezzoFibration::QuadricBundle { twist }
            | DelPezzoFibration::PlaneBundle { twist } => Some(twist),
        }
    }
}

/// A Fano threefold of Picard rank one, compared by degree and Euler
/// characteristic only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanoRankOne {
    pub degree: i64,
    pub euler: i64,
}

impl FanoRankOne {
    pub fn new(degree: i64, euler: i64) -> Result<Self, MfsError> {
        if degree < 1 {
            return Err(MfsError::Fano(format!(
                "degree must be positive, got {degree}"
            )));
        }
        let b3 = 4 - euler;
        if b3 < 0 || b3 % 2 != 0 {
            return Err(MfsError::Fano(format!(
                "b3 = 4 - eX = {b3} must be a nonnegative even integer"
            )));
        }
        Ok(FanoRankOne { degree, euler })
    }
}

/// One of the four input families.
#[derive(Debug, Clone, PartialEq)]
pub enum MfsDescription {
    Fano(FanoRankOne),
    DelPezzo(DelPezzoFibration),
    CbSmooth(SmoothConicBundle),
    CbSingular(SingularConicBundle),
}

impl MfsDescription {
    pub fn invariants(&self) -> InvariantRecord {
        match self {
            MfsDescription::Fano(f) => invariants_fano(f),
            MfsDescription::DelPezzo(dp) => invariants_delpezzo(dp),
            MfsDescription::CbSmooth(m) => invariants_smooth(m),
            MfsDescription::CbSingular(m) => invariants_singular(m),
        }
    }

    /// The full invariant triple; rank-one Fanos carry no cubic data here
    /// (the Picard generator's self-intersection alone does not pin `p1`).
    pub fn wall_jupp_triple(&self) -> Option<WallJuppTriple> {
        match self {
            MfsDescription::Fano(_) => None,
            MfsDescription::DelPezzo(dp) => Some(triple_delpezzo(dp)),
            MfsDescription::CbSmooth(m) => Some(triple_smooth(m)),
            MfsDescription::CbSingular(m) => Some(triple_singular(m)),
        }
    }
}

/// The finite invariant tuple of one space.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantRecord {
    pub base_dim: BaseDim,
    pub kind: FibrationKind,
    pub b2: i64,
    pub b3: i64,
    pub euler: i64,
    pub chi: i64,
    /// `K^3`; absent for rank-one Fanos, where the record does not carry the
    /// Fano index and the decision rule does not consult it.
    pub k3: Option<i64>,
    pub rel_k3: Option<i64>,
    pub k: Option<i64>,
    pub d: Option<i64>,
    pub w2_type: Option<W2Type>,
    pub cf_divisibility: Option<i64>,
    pub cf_norm: Option<i64>,
    pub cf_type: Option<VectorType>,
    pub x3_mod3: Option<Mod3Class>,
    pub degree: Option<i64>,
}

impl InvariantRecord {
    pub fn validate(&self) -> Result<(), MfsError> {
        if self.b3 < 0 || self.b3 % 2 != 0 {
            return Err(MfsError::Record(format!(
                "b3 = {} must be a nonnegative even integer",
                self.b3
            )));
        }
        if self.euler != 2 + 2 * self.b2 - self.b3 {
            return Err(MfsError::Record(format!(
                "e = {} != 2 + 2 b2 - b3 = {}",
                self.euler,
                2 + 2 * self.b2 - self.b3
            )));
        }
        match self.base_dim {
            BaseDim::Zero => {
                if self.degree.is_none() {
                    return Err(MfsError::Record("dim-0 record must carry a degree".into()));
                }
                if self.b2 != 1 {
                    return Err(MfsError::Record("dim-0 record must have b2 = 1".into()));
                }
            }
            BaseDim::One => {
                if self.k.is_none() || self.d.is_none() || self.rel_k3.is_none() {
                    return Err(MfsError::Record(
                        "dim-1 record must carry K, d and relK3".into(),
                    ));
                }
                if self.k == Some(9) && self.x3_mod3.is_none() {
                    return Err(MfsError::Record(
                        "dim-1 record with K = 9 must carry x3_mod3".into(),
                    ));
                }
                if self.b2 != 2 {
                    return Err(MfsError::Record("dim-1 record must have b2 = 2".into()));
                }
            }
            BaseDim::Two => {
                if self.w2_type.is_none() {
                    return Err(MfsError::Record("dim-2 record must carry a w2-type".into()));
                }
                match self.kind {
                    FibrationKind::Smooth => {}
                    FibrationKind::Singular => {
                        if self.cf_divisibility.is_none()
                            || self.cf_norm.is_none()
                            || self.cf_type.is_none()
                        {
                            return Err(MfsError::Record(
                                "singular record must carry discriminant-class data".into(),
                            ));
                        }
                    }
                    FibrationKind::NotApplicable => {
                        return Err(MfsError::Record(
                            "dim-2 record must be smooth or singular".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Stable key=value lines, one field per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        push("base_dim", self.base_dim.as_u8().to_string());
        push("kind", self.kind.to_string());
        push("b2", self.b2.to_string());
        push("b3", self.b3.to_string());
        push("e", self.euler.to_string());
        push("chi", self.chi.to_string());
        if let Some(k3) = self.k3 {
            push("K3", k3.to_string());
        }
        if let Some(k) = self.k {
            push("K", k.to_string());
        }
        if let Some(d) = self.d {
            push("d", d.to_string());
        }
        if let Some(r) = self.rel_k3 {
            push("relK3", r.to_string());
        }
        if let Some(w) = self.w2_type {
            push("w2_type", w.to_string());
        }
        if let Some(v) = self.cf_divisibility {
            push("cf_divisibility", v.to_string());
        }
        if let Some(v) = self.cf_norm {
            push("cf_norm", v.to_string());
        }
        if let Some(v) = self.cf_type {
            push("cf_type", v.to_string());
        }
        if let Some(v) = self.x3_mod3 {
            push("x3_mod3", v.to_string());
        }
        if let Some(v) = self.degree {
            push("degree", v.to_string());
        }
        out
    }
}

fn w2_type_from(w2y_nonzero: bool, w2x_nonzero: bool, difference_nonzero: bool) -> W2Type {
    match (w2x_nonzero, w2y_nonzero) {
        (false, false) => W2Type::Zero,
        (false, true) => W2Type::I,
        (true, false) => W2Type::II,
        (true, true) => {
            if difference_nonzero {
                W2Type::III1
            } else {
                W2Type::III0
            }
        }
    }
}

/// Invariants of a smooth conic bundle over a surface.
pub fn invariants_smooth(m: &SmoothConicBundle) -> InvariantRecord {
    let s = &m.surface;
    let lat = s.lattice();
    let norm_c1e = lat.norm(m.c1e()).expect("validated dims");
    let p = norm_c1e - 4 * m.c2e + s.p1();
    let c1_cubed = 48 * s.chi() + 2 * p;
    let w2y = s.w2_nonzero();
    let w2x = s
        .c1y
        .iter()
        .zip(m.c1e.iter())
        .any(|(a, b)| (a + b) % 2 != 0);
    let diff = m.c1e.iter().any(|x| x % 2 != 0);
    InvariantRecord {
        base_dim: BaseDim::Two,
        kind: FibrationKind::Smooth,
        b2: s.rank() as i64 + 1,
        b3: 0,
        euler: 2 * s.euler(),
        chi: s.chi(),
        k3: Some(-c1_cubed),
        rel_k3: None,
        k: None,
        d: None,
        w2_type: Some(w2_type_from(w2y, w2x, diff)),
        cf_divisibility: None,
        cf_norm: None,
        cf_type: None,
        x3_mod3: None,
        degree: None,
    }
}

/// Full invariant triple of a smooth conic bundle, on the basis
/// `{u, y_1, ..., y_r}` of `H^2(X)`.
pub fn triple_smooth(m: &SmoothConicBundle) -> WallJuppTriple {
    let s = &m.surface;
    let lat = s.lattice();
    let r = s.rank();
    let n = r + 1;
    let norm_c1e = lat.norm(m.c1e()).expect("validated dims");
    let gc1e = lat.gram().mul_vec(m.c1e());
    let cubic = CubicForm::from_fn(n, |i, j, k| match (i, j, k) {
        (0, 0, 0) => m.c2e - norm_c1e,
        (0, 0, k) => -gc1e[k - 1],
        (0, j, k) => -lat.gram().get(j - 1, k - 1),
        _ => 0,
    });
    let p = norm_c1e - 4 * m.c2e + s.p1();
    let mut p1 = vec![0; n];
    p1[0] = -p;
    let mut w2 = vec![0u8; n];
    for i in 0..r {
        w2[i + 1] = ((s.c1y[i] + m.c1e[i]).rem_euclid(2)) as u8;
    }
    WallJuppTriple::new(cubic, p1, Mod2Class::new(w2), 0).expect("triple data is coherent")
}

/// Invariants of a conic bundle with nonempty discriminant curve.
pub fn invariants_singular(m: &SingularConicBundle) -> InvariantRecord {
    let s = &m.surface;
    let lat = s.lattice();
    let cf_norm = lat.norm(m.c1rel()).expect("validated dims");
    let b3 = cf_norm + lat.pairing(&s.c1y, m.c1rel()).expect("validated dims");
    let euler = 2 * s.euler() - b3;
    let c1_cubed = m.c2rel - 3 * euler + 72 * s.chi() - 5 * cf_norm / 2;
    let w2_type = if s.w2_nonzero() {
        W2Type::III1
    } else {
        W2Type::II
    };
    InvariantRecord {
        base_dim: BaseDim::Two,
        kind: FibrationKind::Singular,
        b2: s.rank() as i64 + 1,
        b3,
        euler,
        chi: s.chi(),
        k3: Some(-c1_cubed),
        rel_k3: None,
        k: None,
        d: None,
        w2_type: Some(w2_type),
        cf_divisibility: Some(divisibility(m.c1rel()).expect("c1rel is nonzero")),
        cf_norm: Some(cf_norm),
        cf_type: Some(lat.vector_type(m.c1rel()).expect("c1rel is nonzero")),
        x3_mod3: None,
        degree: None,
    }
}

/// `<p, [Y]>` in the decomposition `p1(X) = p + 3u^2` of a singular bundle.
pub fn singular_p_pairing(m: &SingularConicBundle) -> i64 {
    let s = &m.surface;
    let lat = s.lattice();
    let cf_norm = lat.norm(m.c1rel()).expect("validated dims");
    let b3 = cf_norm + lat.pairing(&s.c1y, m.c1rel()).expect("validated dims");
    let euler = 2 * s.euler() - b3;
    let c1_cubed = m.c2rel - 3 * euler + 72 * s.chi() - 5 * cf_norm / 2;
    84 * s.chi() - c1_cubed - 9 * s.euler() + 3 * b3 - 3 * cf_norm
}

/// Full invariant triple of a singular conic bundle, on the basis
/// `{u, y_1, ..., y_r}` of `H^2(X)`.
pub fn triple_singular(m: &SingularConicBundle) -> WallJuppTriple {
    let s = &m.surface;
    let lat = s.lattice();
    let r = s.rank();
    let n = r + 1;
    let cf_norm = lat.norm(m.c1rel()).expect("validated dims");
    let u3 = cf_norm / 2 + m.c2rel;
    let gc1 = lat.gram().mul_vec(m.c1rel());
    let cubic = CubicForm::from_fn(n, |i, j, k| match (i, j, k) {
        (0, 0, 0) => u3,
        (0, 0, k) => gc1[k - 1],
        (0, j, k) => 2 * lat.gram().get(j - 1, k - 1),
        _ => 0,
    });
    let p_pair = singular_p_pairing(m);
    let b3 = cf_norm + lat.pairing(&s.c1y, m.c1rel()).expect("validated dims");
    let mut p1 = vec![0; n];
    p1[0] = 2 * p_pair + 3 * u3;
    for i in 0..r {
        p1[i + 1] = 3 * gc1[i];
    }
    let mut w2 = vec![0u8; n];
    w2[0] = 1;
    for i in 0..r {
        w2[i + 1] = (s.c1y[i].rem_euclid(2)) as u8;
    }
    WallJuppTriple::new(cubic, p1, Mod2Class::new(w2), b3).expect("triple data is coherent")
}

/// Invariants of a del Pezzo fibration over the line.
pub fn invariants_delpezzo(dp: &DelPezzoFibration) -> InvariantRecord {
    dp.validate().expect("caller validates");
    let k = dp.k();
    let d = dp.d();
    let rel_k3 = dp.rel_k3();
    let euler = dp.euler();
    let b3 = 6 - euler;
    let k3 = rel_k3 - 6 * k / d;
    let (w2_type, x3_mod3) = match dp {
        DelPezzoFibration::LowDegree { .. } => (W2Type::II, None),
        DelPezzoFibration::QuadricBundle { twist } => (
            if twist % 2 == 0 {
                W2Type::Zero
            } else {
                W2Type::II
            },
            None,
        ),
        DelPezzoFibration::PlaneBundle { twist } => (
            W2Type::II,
            Some(if twist.rem_euclid(3) == 0 {
                Mod3Class::Zero
            } else {
                Mod3Class::Nonzero
            }),
        ),
    };
    InvariantRecord {
        base_dim: BaseDim::One,
        kind: FibrationKind::NotApplicable,
        b2: 2,
        b3,
        euler,
        chi: 1,
        k3: Some(k3),
        rel_k3: Some(rel_k3),
        k: Some(k),
        d: Some(d),
        w2_type: Some(w2_type),
        cf_divisibility: None,
        cf_norm: None,
        cf_type: None,
        x3_mod3,
        degree: None,
    }
}

/// Full invariant triple of a del Pezzo fibration, on the basis `{x, y}`.
pub fn triple_delpezzo(dp: &DelPezzoFibration) -> WallJuppTriple {
    match *dp {
        DelPezzoFibration::LowDegree {
            k,
            d,
            rel_k3,
            euler,
        } => {
            // x = c1(X): x^3 = -K^3, x^2 y = K/d, x y^2 = y^3 = 0;
            // p1 pairs as (<x^3> - 48, 3 sign(F)/d) with sign(F) = K - 8.
            let x3 = 6 * k / d - rel_k3;
            let cubic = CubicForm::from_fn(2, |i, j, kk| match (i, j, kk) {
                (0, 0, 0) => x3,
                (0, 0, 1) => k / d,
                _ => 0,
            });
            let p1 = vec![x3 - 48, 3 * (k - 8) / d];
            WallJuppTriple::new(cubic, p1, Mod2Class::new(vec![1, 0]), 6 - euler)
                .expect("triple data is coherent")
        }
        DelPezzoFibration::QuadricBundle { twist } => {
            let cubic = CubicForm::from_fn(2, |i, j, kk| match (i, j, kk) {
                (0, 0, 0) => -2 * twist,
                (0, 0, 1) => 2,
                _ => 0,
            });
            let p1 = vec![4 * twist, 0];
            let w2 = Mod2Class::new(vec![0, (twist.rem_euclid(2)) as u8]);
            WallJuppTriple::new(cubic, p1, w2, -2 * twist - 2).expect("triple data is coherent")
        }
        DelPezzoFibration::PlaneBundle { twist } => {
            let cubic = CubicForm::from_fn(2, |i, j, kk| match (i, j, kk) {
                (0, 0, 0) => twist,
                (0, 0, 1) => 1,
                _ => 0,
            });
            // p1 = 3x^2 - 2t xy
            let p1 = vec![twist, 3];
            let w2 = Mod2Class::new(vec![1, (twist.rem_euclid(2)) as u8]);
            WallJuppTriple::new(cubic, p1, w2, 0).expect("triple data is coherent")
        }
    }
}

/// Invariants of a rank-one Fano threefold.
pub fn invariants_fano(f: &FanoRankOne) -> InvariantRecord {
    InvariantRecord {
        base_dim: BaseDim::Zero,
        kind: FibrationKind::NotApplicable,
        b2: 1,
        b3: 4 - f.euler,
        euler: f.euler,
        chi: 1,
        k3: None,
        rel_k3: None,
        k: None,
        d: None,
        w2_type: None,
        cf_divisibility: None,
        cf_norm: None,
        cf_type: None,
        x3_mod3: None,
        degree: Some(f.degree),
    }
}

/// The coordinates of `c1(X)` in the basis underlying the family's triple,
/// used by the Riemann-Roch residue check.
pub fn c1_coordinates(desc: &MfsDescription) -> Option<Vec<i64>> {
    match desc {
        MfsDescription::Fano(_) => None,
        MfsDescription::DelPezzo(dp) => Some(match *dp {
            DelPezzoFibration::LowDegree { .. } => vec![1, 0],
            DelPezzoFibration::QuadricBundle { twist } => vec![2, twist + 2],
            DelPezzoFibration::PlaneBundle { twist } => vec![3, 2 - twist],
        }),
        MfsDescription::CbSmooth(m) => {
            // c1(X) = c1(Y) + c1(E) - 2u
            let mut v = vec![-2i64];
            v.extend(
                m.surface
                    .c1y()
                    .iter()
                    .zip(m.c1e().iter())
                    .map(|(a, b)| a + b),
            );
            Some(v)
        }
        MfsDescription::CbSingular(m) => {
            // c1(X) = u + c1(Y)
            let mut v = vec![1i64];
            v.extend_from_slice(m.surface.c1y());
            Some(v)
        }
    }
}

/// Feasibility of a record against the Euler/Hodge inequality
/// `e + b3 >= 6 chi` for bundles over surfaces, with equality admissible
/// only for smooth bundles over the plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible {
        /// `e + b3 = 6 chi` held with the admissible shape.
        equality: bool,
        /// The orientation-reversing branches cannot occur for this record
        /// (`b2` even or `e + b3 >= 12 chi`).
        reversal_excluded: bool,
    },
    Infeasible(Vec<String>),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible { .. })
    }
}

/// Check the record-level inequality; the constraint binds bundles over
/// surfaces, lower base dimensions satisfy their Betti bookkeeping instead.
///
/// Equality `e + b3 = 6 chi` occurs exactly for bundles over the plane
/// (`b2 = 2`), smooth or singular alike: `e + b3 = 2 e(Y)` in both cases,
/// and the rank-40 double cover attains it with a singular fibration.
pub fn hodge_feasibility(r: &InvariantRecord) -> Feasibility {
    let s = r.euler + r.b3;
    let reversal_excluded = r.b2 % 2 == 0 || s >= 12 * r.chi;
    match r.base_dim {
        BaseDim::Two => {
            let mut violations = Vec::new();
            if s < 6 * r.chi {
                violations.push(format!(
                    "hodge-inequality: e + b3 = {s} < 6 chi = {}",
                    6 * r.chi
                ));
            } else if s == 6 * r.chi && r.b2 != 2 {
                violations.push(
                    "hodge-equality-range: e + b3 = 6 chi requires a bundle over the plane"
                        .to_string(),
                );
            }
            if violations.is_empty() {
                Feasibility::Feasible {
                    equality: s == 6 * r.chi,
                    reversal_excluded,
                }
            } else {
                Feasibility::Infeasible(violations)
            }
        }
        _ => Feasibility::Feasible {
            equality: s == 6 * r.chi,
            reversal_excluded,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_surface_plane() {
        let s = SurfaceData::projective_plane();
        assert_eq!(s.chi(), 1);
    }

    #[test]
    fn validate_surface_k3() {
        let s = SurfaceData::k3_surface();
        assert_eq!(s.chi(), 2);
        assert_eq!(s.lattice().signature(), -16);
    }

    #[test]
    fn validate_surface_noether_failure() {
        let err = validate_surface(&BilinearLattice::diag(1, 0), &[3], 2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("noether"), "got: {msg}");
    }

    #[test]
    fn validate_surface_miyaoka_yau() {
        // fake data with 3e < c1^2: lattice (+1), c1 = 5, e = ... Noether
        // needs 25 + e = 0 mod 12 -> e = 11; then 3e = 33 > 25, so violate
        // signature instead? sign = 1, 4chi - e = 4*3 - 11 = 1: passes.
        // Use c1 = 7: norm 49, e = 11 -> Noether 60 ok, chi = 5,
        // sign 1 vs 4*5-11 = 9: signature fails; MY: 33 < 49 fails too.
        let err = validate_surface(&BilinearLattice::diag(1, 0), &[7], 11).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("miyaoka-yau"), "got: {msg}");
        assert!(msg.contains("euler-rank"), "got: {msg}");
    }

    #[test]
    fn smooth_plane_trivial_bundle() {
        // P^2 x P^1
        let m = SmoothConicBundle::new(SurfaceData::projective_plane(), vec![0], 0).unwrap();
        let r = invariants_smooth(&m);
        assert_eq!(r.euler, 6);
        assert_eq!(r.b3, 0);
        assert_eq!(r.chi, 1);
        assert_eq!(r.k3, Some(-54));
        assert_eq!(r.w2_type, Some(W2Type::III0));
        r.validate().unwrap();
    }

    #[test]
    fn smooth_k3_tangent_projectivization() {
        let m = SmoothConicBundle::new(SurfaceData::k3_surface(), vec![0; 22], 24).unwrap();
        let r = invariants_smooth(&m);
        assert_eq!(r.euler, 48);
        assert_eq!(r.chi, 2);
        // <c1^2 - 4c2> = -96, <p1(Y)> = -48, so <c1(X)^3> = 96 - 288 = -192.
        assert_eq!(r.k3, Some(192));
        assert_eq!(r.w2_type, Some(W2Type::Zero));
    }

    #[test]
    fn smooth_odd_bundle_w2_branch() {
        let m = SmoothConicBundle::new(SurfaceData::projective_plane(), vec![1], 0).unwrap();
        let r = invariants_smooth(&m);
        assert_eq!(r.w2_type, Some(W2Type::I));
    }

    #[test]
    fn blow_up_point_of_p3_as_bundle() {
        // P(O + O(1)) over P^2 is the blow-up of P^3 at a point: K^3 = -56.
        let m = SmoothConicBundle::new(SurfaceData::projective_plane(), vec![1], 0).unwrap();
        assert_eq!(invariants_smooth(&m).k3, Some(-56));
    }

    #[test]
    fn smooth_cubic_matches_sublattice_relations() {
        // On the index-2 sublattice basis x = 2u - c1(E):
        // x^3 = -(2 c1^2 - 8 c2), x^2 y_i = 0, x y_i y_j = -2 <y_i y_j>.
        let s = SurfaceData::blown_up_plane(2);
        let m = SmoothConicBundle::new(s, vec![1, -2, 0], 5).unwrap();
        let t = triple_smooth(&m);
        let norm = m.surface.lattice().norm(m.c1e()).unwrap();
        let mut x = vec![2i64];
        x.extend(m.c1e().iter().map(|v| -v));
        assert_eq!(
            t.cubic().evaluate(&x, &x, &x).unwrap(),
            -(2 * norm - 8 * m.c2e())
        );
        let y1 = [0, 1, 0, 0];
        let y2 = [0, 0, 0, 1];
        assert_eq!(t.cubic().evaluate(&x, &x, &y1).unwrap(), 0);
        assert_eq!(
            t.cubic().evaluate(&x, &y1, &y2).unwrap(),
            -2 * m.surface.lattice().gram().get(0, 2)
        );
    }

    fn xx_singular() -> SingularConicBundle {
        SingularConicBundle::new(SurfaceData::projective_plane(), vec![-8], -8).unwrap()
    }

    #[test]
    fn singular_xx_invariants() {
        let r = invariants_singular(&xx_singular());
        assert_eq!(r.b3, 40);
        assert_eq!(r.euler, -34);
        assert_eq!(r.chi, 1);
        assert_eq!(r.k3, Some(-6));
        assert_eq!(r.cf_divisibility, Some(8));
        assert_eq!(r.cf_norm, Some(64));
        assert_eq!(r.cf_type, Some(VectorType::Characteristic));
        assert_eq!(r.w2_type, Some(W2Type::III1));
        r.validate().unwrap();
    }

    #[test]
    fn singular_negative_b3_rejected() {
        let err =
            SingularConicBundle::new(SurfaceData::projective_plane(), vec![-2], 0).unwrap_err();
        assert!(err.to_string().contains("b3-negative"), "{err}");
    }

    #[test]
    fn singular_c2_round_trip() {
        // invert the K^3 formula back to c2
        let m = xx_singular();
        let r = invariants_singular(&m);
        let c2_back = -r.k3.unwrap() + 3 * r.euler - 72 * r.chi + 5 * r.cf_norm.unwrap() / 2;
        assert_eq!(c2_back, m.c2rel());
    }

    #[test]
    fn singular_p_decomposition_matches_shifted_normalization() {
        // p1(X) = p y^2 + 3u^2 rewrites over the plane to 3 c1 uy + (p') y^2
        // with p' = p - 12 for this data, so p = -21 here means p' = -33.
        assert_eq!(singular_p_pairing(&xx_singular()), -21);
    }

    #[test]
    fn delpezzo_quadric_examples() {
        let dp = DelPezzoFibration::QuadricBundle { twist: -1 };
        let r = invariants_delpezzo(&dp);
        assert_eq!(r.b3, 0);
        assert_eq!(r.rel_k3, Some(8));
        assert_eq!(r.k3, Some(-40));
        r.validate().unwrap();
    }

    #[test]
    fn delpezzo_plane_bundle_examples() {
        let dp = DelPezzoFibration::PlaneBundle { twist: 0 };
        let r = invariants_delpezzo(&dp);
        assert_eq!(r.k3, Some(-54));
        assert_eq!(r.rel_k3, Some(0));
        assert_eq!(r.euler, 6);
        assert_eq!(r.x3_mod3, Some(Mod3Class::Zero));
    }

    #[test]
    fn delpezzo_xx_as_fibration() {
        let dp = DelPezzoFibration::LowDegree {
            k: 2,
            d: 1,
            rel_k3: 6,
            euler: -34,
        };
        let r = invariants_delpezzo(&dp);
        assert_eq!(r.k3, Some(-6));
        assert_eq!(r.b3, 40);
    }

    #[test]
    fn delpezzo_rejects_k7() {
        let err = DelPezzoFibration::from_parts(7, None, None, None, Some(0)).unwrap_err();
        assert!(err.to_string().contains("{1, ..., 6, 8, 9}"), "{err}");
    }

    #[test]
    fn delpezzo_rejects_positive_quadric_twist() {
        assert!(DelPezzoFibration::from_parts(8, None, None, None, Some(0)).is_err());
    }

    #[test]
    fn fano_bookkeeping() {
        let f = FanoRankOne::new(5, 4).unwrap();
        let r = invariants_fano(&f);
        assert_eq!(r.b3, 0);
        assert_eq!(r.b2, 1);
        r.validate().unwrap();
        assert!(FanoRankOne::new(5, 3).is_err());
    }

    #[test]
    fn hodge_rejects_intro_diamond() {
        // chi = 2, b2 = 4, b3 = 2a: e + b3 = 10 < 12
        let r = InvariantRecord {
            base_dim: BaseDim::Two,
            kind: FibrationKind::Smooth,
            b2: 4,
            b3: 2,
            euler: 8,
            chi: 2,
            k3: Some(0),
            rel_k3: None,
            k: None,
            d: None,
            w2_type: Some(W2Type::Zero),
            cf_divisibility: None,
            cf_norm: None,
            cf_type: None,
            x3_mod3: None,
            degree: None,
        };
        match hodge_feasibility(&r) {
            Feasibility::Infeasible(v) => assert!(v[0].contains("hodge-inequality")),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn hodge_equality_for_plane_bundle() {
        let m = SmoothConicBundle::new(SurfaceData::projective_plane(), vec![0], 0).unwrap();
        let r = invariants_smooth(&m);
        match hodge_feasibility(&r) {
            Feasibility::Feasible { equality: true, .. } => {}
            other => panic!("expected feasible with equality, got {other:?}"),
        }
    }

    #[test]
    fn hodge_k3_bundle_excludes_reversal() {
        let m = SmoothConicBundle::new(SurfaceData::k3_surface(), vec![0; 22], 24).unwrap();
        let r = invariants_smooth(&m);
        match hodge_feasibility(&r) {
            Feasibility::Feasible {
                equality: false,
                reversal_excluded: true,
            } => {}
            other => panic!("expected reversal excluded, got {other:?}"),
        }
    }

    /// Riemann-Roch residue on the generated triples: with c1(X) expressed in
    /// the triple's basis, `C(c1,c1,c1) - <c1 . p1> = 48 chi` exactly.
    #[test]
    fn hrr_residue_on_examples() {
        let descs: Vec<MfsDescription> = vec![
            MfsDescription::CbSmooth(
                SmoothConicBundle::new(SurfaceData::projective_plane(), vec![0], 0).unwrap(),
            ),
            MfsDescription::CbSmooth(
                SmoothConicBundle::new(SurfaceData::blown_up_plane(3), vec![1, 0, -1, 2], -4)
                    .unwrap(),
            ),
            MfsDescription::CbSmooth(
                SmoothConicBundle::new(SurfaceData::k3_surface(), vec![0; 22], 24).unwrap(),
            ),
            MfsDescription::CbSingular(xx_singular()),
            MfsDescription::DelPezzo(DelPezzoFibration::QuadricBundle { twist: -3 }),
            MfsDescription::DelPezzo(DelPezzoFibration::PlaneBundle { twist: -1 }),
            MfsDescription::DelPezzo(DelPezzoFibration::LowDegree {
                k: 6,
                d: 3,
                rel_k3: 10,
                euler: 4,
            }),
        ];
        for desc in &descs {
            let r = desc.invariants();
            let t = desc.wall_jupp_triple().unwrap();
            let c1 = c1_coordinates(desc).unwrap();
            let c1_cubed = t.cubic().evaluate(&c1, &c1, &c1).unwrap();
            let c1_p1 = t.p1_pair(&c1).unwrap();
            assert_eq!(
                c1_cubed,
                -r.k3.unwrap(),
                "cubic route disagrees for {desc:?}"
            );
            assert_eq!(
                c1_cubed - c1_p1,
                48 * r.chi,
                "HRR residue fails for {desc:?}"
            );
        }
    }
}
