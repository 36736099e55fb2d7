//! The pairwise decision procedure on invariant records, the two
//! cross-dimension exceptions, and a bounded census.
//!
//! The comparison dispatches on the pair of base dimensions:
//!
//! * (0,0): equal degree and Euler characteristic.
//! * (0,*): never diffeomorphic (`b2 = 1` against `b2 >= 2`).
//! * (1,1): equal `K`, then per fiber type — `K = 9` by the mod-3 class of
//!   the generator's cube, `K = 8` by the relative `K^3`, `K <= 6` by
//!   `(d, e)` and the relative `K^3` up to the orientation-reversing
//!   substitution `relK3 -> -relK3 + 12(d-1)K/d`.
//! * (2,2): smooth never matches singular (the squares of `H^2` generate an
//!   index-2 versus index-4 subgroup of `H^4`). Within a kind, the gate
//!   invariants must agree and then either the direct branch (A)/(B) or the
//!   orientation-reversing branch (A')/(B') must hold; the reversing branch
//!   is suppressed when `b2` is even or `e + b3 >= 12 chi`. Singular pairs
//!   passing every test with `chi = 1` and `b2 >= 10` land in the
//!   exceptional range where the invariants pin the type only up to finitely
//!   many possibilities.
//! * (1,2): diffeomorphic exactly when both records match a stored canonical
//!   pair — the plane bundle over the line, or the rank-40 `b3` space
//!   fibering both ways.

use serde::Serialize;

use crate::mfs::{
    hodge_feasibility, invariants_delpezzo, invariants_fano, invariants_singular,
    invariants_smooth, BaseDim, DelPezzoFibration, FanoRankOne, FibrationKind, InvariantRecord,
    MfsError, SingularConicBundle, SmoothConicBundle, SurfaceData,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Diffeomorphic,
    NotDiffeomorphic,
    UndeterminedFinite,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Diffeomorphic => write!(f, "diffeomorphic"),
            Outcome::NotDiffeomorphic => write!(f, "not_diffeomorphic"),
            Outcome::UndeterminedFinite => write!(f, "undetermined_finite"),
        }
    }
}

/// Which family of conditions decided the verdict. Failures inside a dim-2
/// family are tagged with that family's direct branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    A,
    APrime,
    B,
    BPrime,
    KCase,
    Degree,
    Cross,
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Branch::A => write!(f, "A"),
            Branch::APrime => write!(f, "A'"),
            Branch::B => write!(f, "B"),
            Branch::BPrime => write!(f, "B'"),
            Branch::KCase => write!(f, "K-case"),
            Branch::Degree => write!(f, "degree"),
            Branch::Cross => write!(f, "cross"),
        }
    }
}

/// One evaluated rule with the compared values.
#[derive(Debug, Clone, Serialize)]
pub struct Reason {
    pub rule: &'static str,
    pub detail: String,
    pub ok: bool,
}

impl Reason {
    fn new(rule: &'static str, detail: impl Into<String>, ok: bool) -> Self {
        Reason {
            rule,
            detail: detail.into(),
            ok,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub branch: Branch,
    pub reasons: Vec<Reason>,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Diffeomorphic => 0,
            Outcome::NotDiffeomorphic => 1,
            Outcome::UndeterminedFinite => 2,
        }
    }

    pub fn machine_line(&self) -> String {
        format!("verdict={} branch={}", self.outcome, self.branch)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.reasons {
            s.push_str(&format!(
                "rule={} ok={} {}\n",
                r.rule,
                if r.ok { "yes" } else { "no" },
                r.detail
            ));
        }
        s.push_str(&self.machine_line());
        s.push('\n');
        s
    }
}

/// Decide oriented diffeomorphism from two invariant records.
pub fn compare(a: &InvariantRecord, b: &InvariantRecord) -> Result<Verdict, MfsError> {
    a.validate()?;
    b.validate()?;
    Ok(compare_valid(a, b))
}

fn compare_valid(a: &InvariantRecord, b: &InvariantRecord) -> Verdict {
    match (a.base_dim, b.base_dim) {
        (BaseDim::Zero, BaseDim::Zero) => compare_fano(a, b),
        (BaseDim::One, BaseDim::One) => compare_dim1(a, b),
        (BaseDim::Two, BaseDim::Two) => compare_dim2(a, b),
        (BaseDim::One, BaseDim::Two) => compare_cross(a, b),
        (BaseDim::Two, BaseDim::One) => compare_cross(b, a),
        _ => Verdict {
            outcome: Outcome::NotDiffeomorphic,
            branch: Branch::Cross,
            reasons: vec![Reason::new(
                "b2-rank",
                format!(
                    "b2 {} vs {}: a rank-one space never matches a fibered one",
                    a.b2, b.b2
                ),
                false,
            )],
        },
    }
}

fn compare_fano(a: &InvariantRecord, b: &InvariantRecord) -> Verdict {
    let deg_ok = a.degree == b.degree;
    let e_ok = a.euler == b.euler;
    let reasons = vec![
        Reason::new(
            "degree",
            format!("{} vs {}", a.degree.unwrap(), b.degree.unwrap()),
            deg_ok,
        ),
        Reason::new("e", format!("{} vs {}", a.euler, b.euler), e_ok),
    ];
    Verdict {
        outcome: if deg_ok && e_ok {
            Outcome::Diffeomorphic
        } else {
            Outcome::NotDiffeomorphic
        },
        branch: Branch::Degree,
        reasons,
    }
}

fn compare_dim1(a: &InvariantRecord, b: &InvariantRecord) -> Verdict {
    let mut reasons = Vec::new();
    let (ka, kb) = (a.k.unwrap(), b.k.unwrap());
    let k_ok = ka == kb;
    reasons.push(Reason::new("K", format!("{ka} vs {kb}"), k_ok));
    if !k_ok {
        return Verdict {
            outcome: Outcome::NotDiffeomorphic,
            branch: Branch::KCase,
            reasons,
        };
    }
    let ok = match ka {
        9 => {
            let m_ok = a.x3_mod3 == b.x3_mod3;
            reasons.push(Reason::new(
                "x3-mod3",
                format!("{} vs {}", a.x3_mod3.unwrap(), b.x3_mod3.unwrap()),
                m_ok,
            ));
            m_ok
        }
        8 => {
            let r_ok = a.rel_k3 == b.rel_k3;
            reasons.push(Reason::new(
                "relK3",
                format!("{} vs {}", a.rel_k3.unwrap(), b.rel_k3.unwrap()),
                r_ok,
            ));
            r_ok
        }
        _ => {
            let (da, db) = (a.d.unwrap(), b.d.unwrap());
            let d_ok = da == db;
            reasons.push(Reason::new("d", format!("{da} vs {db}"), d_ok));
            let e_ok = a.euler == b.euler;
            reasons.push(Reason::new(
                "e",
                format!("{} vs {}", a.euler, b.euler),
                e_ok,
            ));
            let (ra, rb) = (a.rel_k3.unwrap(), b.rel_k3.unwrap());
            let rel_ok = d_ok && {
                let reflected = -rb + 12 * (da - 1) * ka / da;
                ra == rb || ra == reflected
            };
            reasons.push(Reason::new(
                "relK3-reflect",
                format!("{ra} vs {rb} (allowing -relK3' + 12(d-1)K/d)"),
                rel_ok,
            ));
            d_ok && e_ok && rel_ok
        }
    };
    Verdict {
        outcome: if ok {
            Outcome::Diffeomorphic
        } else {
            Outcome::NotDiffeomorphic
        },
        branch: Branch::KCase,
        reasons,
    }
}

fn gate(
    reasons: &mut Vec<Reason>,
    rule: &'static str,
    lhs: impl std::fmt::Debug,
    rhs: impl std::fmt::Debug,
    ok: bool,
) -> bool {
    reasons.push(Reason::new(rule, format!("{lhs:?} vs {rhs:?}"), ok));
    ok
}

/// The orientation-reversing branches cannot fire when either record has
/// even `b2` or `e + b3 >= 12 chi`.
fn reversal_suppressed(a: &InvariantRecord, b: &InvariantRecord) -> bool {
    let s = a.euler + a.b3;
    a.b2 % 2 == 0 || s >= 12 * a.chi || s >= 12 * b.chi
}

fn compare_dim2(a: &InvariantRecord, b: &InvariantRecord) -> Verdict {
    let mut reasons = Vec::new();
    if a.kind != b.kind {
        reasons.push(Reason::new(
            "cohomology-ring",
            format!(
                "{} vs {}: squares of H^2 generate an index-2 vs index-4 subgroup of H^4",
                a.kind, b.kind
            ),
            false,
        ));
        return Verdict {
            outcome: Outcome::NotDiffeomorphic,
            branch: if a.kind == FibrationKind::Smooth || b.kind == FibrationKind::Smooth {
                Branch::A
            } else {
                Branch::B
            },
            reasons,
        };
    }
    let smooth = a.kind == FibrationKind::Smooth;
    let mut ok = true;
    ok &= gate(
        &mut reasons,
        "w2-type",
        a.w2_type.unwrap(),
        b.w2_type.unwrap(),
        a.w2_type == b.w2_type,
    );
    ok &= gate(&mut reasons, "e", a.euler, b.euler, a.euler == b.euler);
    if !smooth {
        ok &= gate(&mut reasons, "b3", a.b3, b.b3, a.b3 == b.b3);
        ok &= gate(
            &mut reasons,
            "cf-divisibility",
            a.cf_divisibility.unwrap(),
            b.cf_divisibility.unwrap(),
            a.cf_divisibility == b.cf_divisibility,
        );
        ok &= gate(
            &mut reasons,
            "cf-type",
            a.cf_type.unwrap(),
            b.cf_type.unwrap(),
            a.cf_type == b.cf_type,
        );
    }
    let fail_branch = if smooth { Branch::A } else { Branch::B };
    if !ok {
        return Verdict {
            outcome: Outcome::NotDiffeomorphic,
            branch: fail_branch,
            reasons,
        };
    }

    let (k3a, k3b) = (a.k3.unwrap(), b.k3.unwrap());
    // direct branch: equal chi, equal K^3 (and equal discriminant norm)
    let mut direct = a.chi == b.chi && k3a == k3b;
    if !smooth {
        direct &= a.cf_norm == b.cf_norm;
    }
    reasons.push(Reason::new(
        if smooth { "A" } else { "B" },
        format!(
            "chi {} vs {}, K3 {} vs {}{}",
            a.chi,
            b.chi,
            k3a,
            k3b,
            if smooth {
                String::new()
            } else {
                format!(", cf_norm {} vs {}", a.cf_norm.unwrap(), b.cf_norm.unwrap())
            }
        ),
        direct,
    ));
    if direct {
        return finish_dim2(
            a,
            b,
            reasons,
            if smooth { Branch::A } else { Branch::B },
            smooth,
        );
    }

    // orientation-reversing branch
    let mut reversed =
        4 * (a.chi + b.chi) == a.euler - a.b3 && k3a + k3b == -12 * a.euler + 18 * a.b3;
    if !smooth {
        reversed &= a.cf_norm.unwrap() == -b.cf_norm.unwrap();
    }
    let rev_branch = if smooth {
        Branch::APrime
    } else {
        Branch::BPrime
    };
    if reversed && reversal_suppressed(a, b) {
        reasons.push(Reason::new(
            "reversal-suppressed",
            format!(
                "b2 = {} even or e + b3 = {} >= 12 chi: orientation-reversing branch cannot occur",
                a.b2,
                a.euler + a.b3
            ),
            false,
        ));
        reversed = false;
    } else {
        reasons.push(Reason::new(
            if smooth { "A'" } else { "B'" },
            format!(
                "chi {} + {} = (e - b3)/4? K3 {} + {} = -12e + 18 b3?{}",
                a.chi,
                b.chi,
                k3a,
                k3b,
                if smooth {
                    String::new()
                } else {
                    format!(
                        " cf_norm {} = -({})?",
                        a.cf_norm.unwrap(),
                        b.cf_norm.unwrap()
                    )
                }
            ),
            reversed,
        ));
    }
    if reversed {
        return finish_dim2(a, b, reasons, rev_branch, smooth);
    }
    Verdict {
        outcome: Outcome::NotDiffeomorphic,
        branch: fail_branch,
        reasons,
    }
}

fn finish_dim2(
    a: &InvariantRecord,
    b: &InvariantRecord,
    mut reasons: Vec<Reason>,
    branch: Branch,
    smooth: bool,
) -> Verdict {
    if !smooth && a.b2 >= 10 && (a.chi == 1 || b.chi == 1) {
        reasons.push(Reason::new(
            "exceptional-range",
            format!(
                "chi = 1 and b2 = {} >= 10: the base form is (1) + q(-1) with q >= 9, where \
                 primitive-vector transitivity fails and the conditions pin the type only up \
                 to finitely many possibilities",
                a.b2
            ),
            true,
        ));
        return Verdict {
            outcome: Outcome::UndeterminedFinite,
            branch,
            reasons,
        };
    }
    Verdict {
        outcome: Outcome::Diffeomorphic,
        branch,
        reasons,
    }
}

/// `a` fibers over the line, `b` over a surface: diffeomorphic exactly when
/// both match one of the two canonical exceptional spaces.
fn compare_cross(a: &InvariantRecord, b: &InvariantRecord) -> Verdict {
    let canon = canonical_records();
    let mut reasons = Vec::new();
    let p2_1 = compare_valid(a, &canon.p2xp1.0).outcome == Outcome::Diffeomorphic;
    let p2_2 = compare_valid(b, &canon.p2xp1.1).outcome == Outcome::Diffeomorphic;
    reasons.push(Reason::new(
        "canonical-plane-bundle",
        format!("dim-1 match: {p2_1}, dim-2 match: {p2_2}"),
        p2_1 && p2_2,
    ));
    let xx_1 = compare_valid(a, &canon.xx.0).outcome == Outcome::Diffeomorphic;
    let xx_2 = compare_valid(b, &canon.xx.1).outcome == Outcome::Diffeomorphic;
    reasons.push(Reason::new(
        "canonical-double-cover",
        format!("dim-1 match: {xx_1}, dim-2 match: {xx_2}"),
        xx_1 && xx_2,
    ));
    let ok = (p2_1 && p2_2) || (xx_1 && xx_2);
    Verdict {
        outcome: if ok {
            Outcome::Diffeomorphic
        } else {
            Outcome::NotDiffeomorphic
        },
        branch: Branch::Cross,
        reasons,
    }
}

/// The four stored records behind the cross-dimension rule.
#[derive(Debug, Clone)]
pub struct CanonicalRecords {
    /// (dim-1 record, dim-2 record) of the plane bundle over the line.
    pub p2xp1: (InvariantRecord, InvariantRecord),
    /// (dim-1 record, dim-2 record) of the degree-2 double cover with b3 = 40.
    pub xx: (InvariantRecord, InvariantRecord),
}

/// Build the canonical records from their defining family data.
pub fn canonical_records() -> CanonicalRecords {
    let p2xp1_dim1 = invariants_delpezzo(&DelPezzoFibration::PlaneBundle { twist: 0 });
    let p2xp1_dim2 = invariants_smooth(
        &SmoothConicBundle::new(SurfaceData::projective_plane(), vec![0], 0)
            .expect("plane bundle data is valid"),
    );
    let xx_dim1 = invariants_delpezzo(&DelPezzoFibration::LowDegree {
        k: 2,
        d: 1,
        rel_k3: 6,
        euler: -34,
    });
    let xx_dim2 = invariants_singular(
        &SingularConicBundle::new(SurfaceData::projective_plane(), vec![-8], -8)
            .expect("double cover data is valid"),
    );
    CanonicalRecords {
        p2xp1: (p2xp1_dim1, p2xp1_dim2),
        xx: (xx_dim1, xx_dim2),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CensusError {
    #[error("census requires a bound: {0}")]
    MissingBound(&'static str),
    #[error("invalid census request: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CensusFamily {
    Fano,
    DelPezzo,
    CbSmooth,
    CbSingular,
}

/// Inclusive ranges for every free integer field of a family; unset bounds
/// on a required field are refused rather than truncated.
#[derive(Debug, Clone, Default)]
pub struct CensusBounds {
    pub degree: Option<(i64, i64)>,
    pub euler: Option<(i64, i64)>,
    pub k: Option<(i64, i64)>,
    pub d: Option<(i64, i64)>,
    pub rel_k3: Option<(i64, i64)>,
    pub twist: Option<(i64, i64)>,
    /// Number of blow-up points of the base surface diag(1, q(-1)).
    pub blowups: Option<(i64, i64)>,
    /// Entry range for c1(E) / the relative c1.
    pub c1: Option<(i64, i64)>,
    /// Range for c2(E) / the relative c2 degree.
    pub c2: Option<(i64, i64)>,
}

#[derive(Debug, Clone)]
pub struct CensusClass {
    pub representative: InvariantRecord,
    pub count: u64,
}

const CENSUS_CAP: usize = 1_000_000;

/// Enumerate all feasible records of a family within the bounds and group
/// them by the comparison verdict, in deterministic first-seen order.
pub fn census(
    family: CensusFamily,
    bounds: &CensusBounds,
) -> Result<Vec<CensusClass>, CensusError> {
    let records = enumerate_family(family, bounds)?;
    let mut classes: Vec<CensusClass> = Vec::new();
    for r in records {
        let mut placed = false;
        for c in classes.iter_mut() {
            if compare_valid(&c.representative, &r).outcome == Outcome::Diffeomorphic {
                c.count += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(CensusClass {
                representative: r,
                count: 1,
            });
        }
    }
    Ok(classes)
}

fn range(
    b: Option<(i64, i64)>,
    name: &'static str,
) -> Result<std::ops::RangeInclusive<i64>, CensusError> {
    let (lo, hi) = b.ok_or(CensusError::MissingBound(name))?;
    if lo > hi {
        return Err(CensusError::Invalid(format!(
            "empty range for {name}: {lo}..={hi}"
        )));
    }
    Ok(lo..=hi)
}

fn enumerate_family(
    family: CensusFamily,
    bounds: &CensusBounds,
) -> Result<Vec<InvariantRecord>, CensusError> {
    let mut out = Vec::new();
    let mut push = |r: InvariantRecord| -> Result<(), CensusError> {
        if hodge_feasibility(&r).is_feasible() {
            out.push(r);
        }
        if out.len() > CENSUS_CAP {
            return Err(CensusError::Invalid(format!(
                "more than {CENSUS_CAP} records; tighten the bounds"
            )));
        }
        Ok(())
    };
    match family {
        CensusFamily::Fano => {
            for degree in range(bounds.degree, "degree")? {
                for euler in range(bounds.euler, "ex")? {
                    if let Ok(f) = FanoRankOne::new(degree, euler) {
                        push(invariants_fano(&f))?;
                    }
                }
            }
        }
        CensusFamily::DelPezzo => {
            for k in range(bounds.k, "k")? {
                match k {
                    8 | 9 => {
                        for twist in range(bounds.twist, "twist")? {
                            let dp = if k == 8 {
                                DelPezzoFibration::QuadricBundle { twist }
                            } else {
                                DelPezzoFibration::PlaneBundle { twist }
                            };
                            if dp.validate().is_ok() {
                                push(invariants_delpezzo(&dp))?;
                            }
                        }
                    }
                    1..=6 => {
                        let divisors: &[i64] = if k == 6 { &[1, 2, 3, 6] } else { &[1] };
                        for &d in divisors {
                            if let Some((lo, hi)) = bounds.d {
                                if d < lo || d > hi {
                                    continue;
                                }
                            }
                            for rel_k3 in range(bounds.rel_k3, "relk3")? {
                                for euler in range(bounds.euler, "ex")? {
                                    let dp = DelPezzoFibration::LowDegree {
                                        k,
                                        d,
                                        rel_k3,
                                        euler,
                                    };
                                    if dp.validate().is_ok() {
                                        push(invariants_delpezzo(&dp))?;
                                    }
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        CensusFamily::CbSmooth | CensusFamily::CbSingular => {
            let qs = range(bounds.blowups, "blowups")?;
            if *qs.start() < 0 {
                return Err(CensusError::Invalid(
                    "blow-up count must be nonnegative".into(),
                ));
            }
            let (c1lo, c1hi) = bounds.c1.ok_or(CensusError::MissingBound("c1"))?;
            for q in qs {
                let surface = SurfaceData::blown_up_plane(q as usize);
                let rank = surface.rank();
                let mut c1 = vec![c1lo; rank];
                loop {
                    for c2 in range(bounds.c2, "c2")? {
                        match family {
                            CensusFamily::CbSmooth => {
                                if let Ok(m) =
                                    SmoothConicBundle::new(surface.clone(), c1.clone(), c2)
                                {
                                    push(invariants_smooth(&m))?;
                                }
                            }
                            CensusFamily::CbSingular => {
                                if let Ok(m) =
                                    SingularConicBundle::new(surface.clone(), c1.clone(), c2)
                                {
                                    push(invariants_singular(&m))?;
                                }
                            }
                            _ => unreachable!(),
                        }
                    }
                    if !advance_vec(&mut c1, c1lo, c1hi) {
                        break;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn advance_vec(v: &mut [i64], lo: i64, hi: i64) -> bool {
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

#[cfg(test)]
mod tests {
    use super::*;

    fn quadric(t: i64) -> InvariantRecord {
        invariants_delpezzo(&DelPezzoFibration::QuadricBundle { twist: t })
    }

    fn plane_bundle(t: i64) -> InvariantRecord {
        invariants_delpezzo(&DelPezzoFibration::PlaneBundle { twist: t })
    }

    #[test]
    fn quadric_twists_differ() {
        let v = compare(&quadric(-1), &quadric(-2)).unwrap();
        assert_eq!(v.outcome, Outcome::NotDiffeomorphic);
        assert_eq!(v.branch, Branch::KCase);
    }

    #[test]
    fn mod3_rules_for_plane_bundles() {
        assert_eq!(
            compare(&plane_bundle(0), &plane_bundle(-1))
                .unwrap()
                .outcome,
            Outcome::NotDiffeomorphic
        );
        assert_eq!(
            compare(&plane_bundle(1), &plane_bundle(-2))
                .unwrap()
                .outcome,
            Outcome::Diffeomorphic
        );
        assert_eq!(
            compare(&plane_bundle(0), &plane_bundle(3)).unwrap().outcome,
            Outcome::Diffeomorphic
        );
    }

    #[test]
    fn cross_rule_for_canonical_spaces() {
        let canon = canonical_records();
        let v = compare(&canon.p2xp1.0, &canon.p2xp1.1).unwrap();
        assert_eq!(v.outcome, Outcome::Diffeomorphic);
        assert_eq!(v.branch, Branch::Cross);
        let v = compare(&canon.xx.0, &canon.xx.1).unwrap();
        assert_eq!(v.outcome, Outcome::Diffeomorphic);
        // and with the arguments swapped
        let v = compare(&canon.xx.1, &canon.xx.0).unwrap();
        assert_eq!(v.outcome, Outcome::Diffeomorphic);
    }

    #[test]
    fn canonical_record_fields() {
        let canon = canonical_records();
        assert_eq!(canon.p2xp1.0.euler, 6);
        assert_eq!(canon.p2xp1.0.k3, Some(-54));
        assert_eq!(canon.p2xp1.1.euler, 6);
        assert_eq!(canon.p2xp1.1.k3, Some(-54));
        assert_eq!(canon.xx.0.b3, 40);
        assert_eq!(canon.xx.1.b3, 40);
        assert_eq!(canon.xx.1.k3, Some(-6));
        assert_eq!(canon.xx.1.cf_divisibility, Some(8));
    }

    #[test]
    fn cross_rule_sound_for_other_k() {
        // a dim-1 record with K not in {2, 9} never matches a dim-2 record
        let canon = canonical_records();
        let v = compare(&quadric(-2), &canon.p2xp1.1).unwrap();
        assert_eq!(v.outcome, Outcome::NotDiffeomorphic);
        let v = compare(&quadric(-2), &canon.xx.1).unwrap();
        assert_eq!(v.outcome, Outcome::NotDiffeomorphic);
    }

    #[test]
    fn fano_vs_fibered_never_matches() {
        let f = invariants_fano(&FanoRankOne::new(5, 4).unwrap());
        let canon = canonical_records();
        assert_eq!(
            compare(&f, &canon.p2xp1.0).unwrap().outcome,
            Outcome::NotDiffeomorphic
        );
        assert_eq!(
            compare(&f, &canon.p2xp1.1).unwrap().outcome,
            Outcome::NotDiffeomorphic
        );
    }

    #[test]
    fn reflexive_outside_exceptional_range() {
        let canon = canonical_records();
        for r in [&canon.p2xp1.0, &canon.p2xp1.1, &canon.xx.0, &canon.xx.1] {
            assert_eq!(compare(r, r).unwrap().outcome, Outcome::Diffeomorphic);
        }
    }

    fn exceptional_record() -> InvariantRecord {
        // base diag(1, 10(-1)) with c1Y = (3,1,...,1): chi = 1, b2(X) = 12;
        // c1rel = (2, 2, 0, ...) has norm 0 and b3 = 4
        let s = SurfaceData::blown_up_plane(10);
        let mut c1rel = vec![0i64; 11];
        c1rel[0] = 2;
        c1rel[1] = 2;
        let m = SingularConicBundle::new(s, c1rel, 1).unwrap();
        invariants_singular(&m)
    }

    #[test]
    fn exceptional_range_is_undetermined() {
        let r = exceptional_record();
        assert_eq!(r.chi, 1);
        assert_eq!(r.b2, 12);
        let v = compare(&r, &r.clone()).unwrap();
        assert_eq!(v.outcome, Outcome::UndeterminedFinite);
        assert_eq!(v.branch, Branch::B);
        assert!(v.reasons.iter().any(|x| x.rule == "exceptional-range"));
    }

    #[test]
    fn smooth_vs_singular_never_matches() {
        let canon = canonical_records();
        let v = compare(&canon.p2xp1.1, &canon.xx.1).unwrap();
        assert_eq!(v.outcome, Outcome::NotDiffeomorphic);
        assert!(v.reasons.iter().any(|x| x.rule == "cohomology-ring"));
    }

    #[test]
    fn census_quadrics() {
        let mut b = CensusBounds::default();
        b.k = Some((8, 8));
        b.twist = Some((-5, -1));
        let classes = census(CensusFamily::DelPezzo, &b).unwrap();
        assert_eq!(classes.len(), 5);
    }

    #[test]
    fn census_plane_bundles() {
        let mut b = CensusBounds::default();
        b.k = Some((9, 9));
        b.twist = Some((-3, 3));
        let classes = census(CensusFamily::DelPezzo, &b).unwrap();
        assert_eq!(classes.len(), 2);
        let total: u64 = classes.iter().map(|c| c.count).sum();
        assert_eq!(total, 7);
    }

    #[test]
    fn census_fano_by_degree() {
        let mut b = CensusBounds::default();
        b.degree = Some((1, 5));
        b.euler = Some((4, 4));
        let classes = census(CensusFamily::Fano, &b).unwrap();
        assert_eq!(classes.len(), 5);
    }

    #[test]
    fn census_smooth_bundles_over_the_plane() {
        // E = O(a) + O with a in [-1, 1], c2 = 0: P(E) depends on a mod 2
        // and on c1^2 - 4c2 only, giving |a| = 0, 1 -> 2 classes
        let mut b = CensusBounds::default();
        b.blowups = Some((0, 0));
        b.c1 = Some((-1, 1));
        b.c2 = Some((0, 0));
        let classes = census(CensusFamily::CbSmooth, &b).unwrap();
        assert_eq!(classes.len(), 2);
        let total: u64 = classes.iter().map(|c| c.count).sum();
        assert_eq!(total, 3);
    }

    #[test]
    fn census_requires_bounds() {
        let b = CensusBounds::default();
        assert!(matches!(
            census(CensusFamily::Fano, &b),
            Err(CensusError::MissingBound("degree"))
        ));
    }

    #[test]
    fn k6_reflection_rule_with_higher_divisibility() {
        // d = 2: relK3 may also match -relK3' + 12(d-1)K/d = -relK3' + 36
        let a = invariants_delpezzo(&DelPezzoFibration::LowDegree {
            k: 6,
            d: 2,
            rel_k3: 10,
            euler: 4,
        });
        let b = invariants_delpezzo(&DelPezzoFibration::LowDegree {
            k: 6,
            d: 2,
            rel_k3: 26,
            euler: 4,
        });
        let c = invariants_delpezzo(&DelPezzoFibration::LowDegree {
            k: 6,
            d: 2,
            rel_k3: 27,
            euler: 4,
        });
        assert_eq!(compare(&a, &b).unwrap().outcome, Outcome::Diffeomorphic);
        assert_eq!(compare(&a, &c).unwrap().outcome, Outcome::NotDiffeomorphic);
        // and d must agree
        let d1 = invariants_delpezzo(&DelPezzoFibration::LowDegree {
            k: 6,
            d: 1,
            rel_k3: 10,
            euler: 4,
        });
        assert_eq!(compare(&a, &d1).unwrap().outcome, Outcome::NotDiffeomorphic);
    }

    #[test]
    fn k9_verdict_depends_only_on_twist_mod3() {
        for t in -4..=4 {
            let v1 = compare(&plane_bundle(t), &plane_bundle(t + 3)).unwrap();
            assert_eq!(v1.outcome, Outcome::Diffeomorphic, "twist {t} vs {}", t + 3);
        }
    }
}
