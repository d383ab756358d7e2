//! Normal Cayley graphs on GL(2,q), GU(2,q) and SL(2,q): connection sets,
//! exact spectra from class sums, and PST certificates.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf::Fe;
use crate::graph::Graph;
use crate::grp::{ClassKind, ClassLabel, Family, Group, IrrKind, IrrLabel, Mat2};
use crate::scheme::{mod4_condition, pst_test};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Standard,
    /// Non-central elements of orders 2, 3, 4 and 6 in GL(2,3).
    TAlternative,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Standard => "standard",
            Variant::TAlternative => "t-alt",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Variant::Standard),
            "t-alt" | "t" => Ok(Variant::TAlternative),
            other => Err(Error::Unsupported(format!("unknown variant {other:?}"))),
        }
    }
}

/// A union of conjugacy classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionSet {
    pub family: Family,
    pub q: u32,
    pub variant: Variant,
    pub classes: Vec<ClassLabel>,
    /// Σ |C|, the valency of the Cayley graph.
    pub size: u64,
}

impl ConnectionSet {
    pub fn contains(&self, c: &ClassLabel) -> bool {
        self.classes.contains(c)
    }
}

pub fn build_connection_set(group: &Group, variant: Variant) -> Result<ConnectionSet> {
    let t = group.tower();
    let e = t.ext();
    let q = group.q();
    let m1 = e.minus_one();
    let classes: Vec<ClassLabel> = match (variant, group.family()) {
        (Variant::TAlternative, Family::Gl) if q == 3 => group
            .classes()
            .iter()
            .filter(|c| !matches!(c.kind, ClassKind::Central(_)))
            .filter(|c| [2, 3, 4, 6].contains(&group.class_element_order(c)))
            .copied()
            .collect(),
        (Variant::TAlternative, fam) => {
            return Err(Error::Unsupported(format!(
                "variant t-alt exists only for gl at q = 3, not {fam} at q = {q}"
            )))
        }
        (Variant::Standard, Family::Gl) => {
            let b = t.base();
            group
                .classes()
                .iter()
                .filter(|c| match c.kind {
                    ClassKind::Split(x, y) => (x, y) == (Fe::ONE.min(m1), Fe::ONE.max(m1)),
                    ClassKind::Unipotent(_) => true,
                    ClassKind::Nonsplit(z) => {
                        let nm = t.norm(z);
                        nm == Fe::ONE || !b.is_square(nm).expect("norm of a unit")
                    }
                    _ => false,
                })
                .copied()
                .collect()
        }
        (Variant::Standard, Family::Gu) => group
            .classes()
            .iter()
            .filter(|c| match c.kind {
                ClassKind::Split(x, y) => (x, y) == (Fe::ONE.min(m1), Fe::ONE.max(m1)),
                ClassKind::Unipotent(_) => true,
                ClassKind::Nonsplit(z) => {
                    // z^{q-1} = (γ^{q-1})^L: trivial or a non-square of E
                    let l = e.log(z).expect("unit") % (q + 1);
                    l == 0 || l % 2 == 1
                }
                _ => false,
            })
            .copied()
            .collect(),
        (Variant::Standard, Family::Sl) => group
            .classes()
            .iter()
            .filter(|c| match c.kind {
                ClassKind::Central(x) => x == m1,
                ClassKind::SlUnipotent { .. } => true,
                _ => false,
            })
            .copied()
            .collect(),
    };
    let size = classes.iter().map(|c| group.class_size(c)).sum();
    Ok(ConnectionSet {
        family: group.family(),
        q,
        variant,
        classes,
        size,
    })
}

/// The SL connection set described by element orders: -I together with all
/// elements of order p or 2p.
pub fn sl_order_based_set(group: &Group) -> Vec<ClassLabel> {
    let p = group.tower().p() as u64;
    group
        .classes()
        .iter()
        .filter(|c| {
            c.kind == ClassKind::Central(group.tower().ext().minus_one()) || {
                let o = group.class_element_order(c);
                o == p || o == 2 * p
            }
        })
        .copied()
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumRow {
    #[serde(skip)]
    pub irr: IrrLabel,
    pub label: String,
    pub kind: String,
    pub params: String,
    pub degree: u64,
    pub theta: i64,
    pub multiplicity: u64,
    /// χ(t)/χ(1): +1 for Φ⁺, -1 for Φ⁻.
    pub sign: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub family: Family,
    pub q: u32,
    pub variant: Variant,
    pub valency: i64,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    /// Every eigenvalue with multiplicity, ascending.
    pub fn eigenvalue_multiset(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for r in &self.rows {
            out.extend(std::iter::repeat_n(r.theta, r.multiplicity as usize));
        }
        out.sort_unstable();
        out
    }

    /// (θ, multiplicity) grouped by distinct θ, descending.
    pub fn distinct(&self) -> Vec<(i64, u64)> {
        let mut m: HashMap<i64, u64> = HashMap::new();
        for r in &self.rows {
            *m.entry(r.theta).or_default() += r.multiplicity;
        }
        let mut v: Vec<_> = m.into_iter().collect();
        v.sort_unstable_by_key(|x| std::cmp::Reverse(x.0));
        v
    }

    pub fn eigensystem(&self) -> Vec<(i64, i64)> {
        self.rows.iter().map(|r| (r.theta, r.sign)).collect()
    }
}

/// θ_χ = Σ_{C ⊆ 𝔖} |C| χ(C) / χ(1), one row per irreducible character.
pub fn spectrum(group: &Group, cs: &ConnectionSet) -> Result<SpectrumTable> {
    if cs.family != group.family() || cs.q != group.q() {
        return Err(Error::Mismatch);
    }
    let weighted: Vec<(ClassLabel, i64)> = cs
        .classes
        .iter()
        .map(|c| (*c, group.class_size(c) as i64))
        .collect();
    let rows = group
        .irreps()
        .par_iter()
        .map(|chi| {
            let sum = group.weighted_class_sum(chi, &weighted)?;
            let deg = group.degree(chi);
            let total = sum
                .integer_part()
                .map_err(|e| Error::NonIntegralEigenvalue {
                    label: chi.to_string(),
                    detail: e.to_string(),
                })?;
            if total % deg as i64 != 0 {
                return Err(Error::NonIntegralEigenvalue {
                    label: chi.to_string(),
                    detail: format!("{total}/{deg}"),
                });
            }
            Ok(SpectrumRow {
                irr: *chi,
                label: chi.to_string(),
                kind: chi.kind_name().to_string(),
                params: chi.params(),
                degree: deg,
                theta: total / deg as i64,
                multiplicity: deg * deg,
                sign: group.central_sign(chi)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTable {
        family: group.family(),
        q: group.q(),
        variant: cs.variant,
        valency: cs.size as i64,
        rows,
    })
}

/// Verdict on a scheme graph with a central (or normalizing) involution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PstCertificate {
    pub graph: String,
    pub vertices: u64,
    pub valency: i64,
    pub integral: bool,
    pub involution_relation: bool,
    /// θ₀ mod 4.
    pub a: i64,
    pub mod4_condition: bool,
    pub parity_condition: bool,
    pub g: i64,
    pub tau: f64,
    pub transfer_rule: String,
    pub connected: bool,
    /// max |1 - fidelity| over simulated pairs, when simulated.
    pub fidelity_deviation: Option<f64>,
    pub valid: bool,
}

impl PstCertificate {
    /// Build from an integral eigensystem (θ, sign) whose valency row has
    /// sign +1; `multiplicities` gives the eigenspace dimensions.
    pub fn from_eigensystem(
        graph: String,
        vertices: u64,
        eigs: &[(i64, i64)],
        multiplicities: &[u64],
        valency: i64,
        involution_relation: bool,
        transfer_rule: String,
    ) -> Self {
        let a = valency.rem_euclid(4);
        let mod4 = mod4_condition(eigs, a);
        let verdict = pst_test(eigs, valency);
        let top: u64 = eigs
            .iter()
            .zip(multiplicities)
            .filter(|((t, _), _)| *t == valency)
            .map(|(_, m)| m)
            .sum();
        let connected = top == 1;
        PstCertificate {
            graph,
            vertices,
            valency,
            integral: true,
            involution_relation,
            a,
            mod4_condition: mod4,
            parity_condition: verdict.pst,
            g: verdict.g,
            tau: verdict.tau,
            transfer_rule,
            connected,
            fidelity_deviation: None,
            valid: involution_relation && mod4 && verdict.pst && connected,
        }
    }

    /// Record the numeric check; a deviation above `tol` invalidates.
    pub fn with_fidelity(mut self, deviation: f64, tol: f64) -> Self {
        self.fidelity_deviation = Some(deviation);
        if deviation >= tol {
            self.valid = false;
        }
        self
    }
}

pub fn certify(st: &SpectrumTable) -> PstCertificate {
    let eigs = st.eigensystem();
    let mults: Vec<u64> = st.rows.iter().map(|r| r.multiplicity).collect();
    let order: u64 = mults.iter().sum();
    PstCertificate::from_eigensystem(
        format!("cay({}(2,{}),{})", st.family, st.q, st.variant),
        order,
        &eigs,
        &mults,
        st.valency,
        true,
        "x <-> x*t for every vertex x, t = -I".into(),
    )
}

/// The explicit Cayley graph with vertices in enumeration order.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    pub elements: Vec<Mat2>,
    pub graph: Graph,
    /// vertex index of -x for each vertex x
    pub antipode: Vec<usize>,
}

/// A(g,h) = 1 iff h·g⁻¹ ∈ 𝔖.
pub fn explicit_graph(group: &Group, cs: &ConnectionSet, bound: u64) -> Result<CayleyGraph> {
    let elements = group.enumerate(bound)?;
    let f = group.matrix_field();
    let pos: HashMap<Mat2, usize> = elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut conn = Vec::new();
    for m in &elements {
        if cs.contains(&group.classify(m)?) {
            conn.push(*m);
        }
    }
    let adj = elements
        .iter()
        .map(|g| conn.iter().map(|s| pos[&s.mul(f, g)]).collect())
        .collect();
    let minus = Mat2::scalar(f.minus_one());
    let antipode = elements.iter().map(|g| pos[&minus.mul(f, g)]).collect();
    Ok(CayleyGraph {
        elements,
        graph: Graph::from_adjacency(adj),
        antipode,
    })
}

/// A closed-form eigenvalue compared with the direct class sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedFormCheck {
    pub formula: String,
    pub character: String,
    pub closed_form: i64,
    pub direct: i64,
    pub agrees: bool,
}

/// Evaluate the closed forms for the standard GL and GU sets and
/// compare each with the direct eigenvalue.
pub fn closed_form_checks(group: &Group, st: &SpectrumTable) -> Vec<ClosedFormCheck> {
    if st.variant != Variant::Standard || group.family() == Family::Sl {
        return Vec::new();
    }
    let q = group.q() as i64;
    let neg = |j: u32| if j.is_multiple_of(2) { 1 } else { -1 };
    let mut out = Vec::new();
    for row in &st.rows {
        let (formula, value) = match (group.family(), row.irr.kind) {
            (Family::Gl, IrrKind::Linear(j)) => {
                let base = q * (q + 1) * neg(j) + q * (q - 1).pow(2) / 2;
                let extra = (q * q - 1) * (q - 1);
                let tail = q * (q + 1) * (q - 1).pow(2) / 4;
                let v = if j == 0 {
                    base + extra + tail
                } else if 2 * j as i64 == q - 1 {
                    base + extra - tail
                } else {
                    base
                };
                ("gl-linear", v)
            }
            (Family::Gl, IrrKind::Steinberg(j)) => {
                let base = (q + 1) * neg(j) + (q - 1).pow(2) / 2;
                let tail = (q + 1) * (q - 1).pow(2) / 4;
                let v = if j == 0 {
                    base + tail
                } else if 2 * j as i64 == q - 1 {
                    base - tail
                } else {
                    base
                };
                ("gl-steinberg", v)
            }
            (Family::Gl, IrrKind::Cuspidal(jj)) => {
                let v = if jj % 2 == 1 {
                    0
                } else if jj as i64 % (q - 1) != 0 {
                    2 * q
                } else {
                    -(q * q - 1) + 2 * q
                };
                ("gl-cuspidal", v)
            }
            (Family::Gl, IrrKind::Principal(a, b)) => {
                let base = q * (neg(a) + neg(b));
                let v = if (a + b) as i64 % (q - 1) == 0 {
                    base + (q - 1).pow(2)
                } else {
                    base
                };
                ("gl-principal", v)
            }
            (Family::Gu, IrrKind::Linear(j)) => {
                let base = q * (q - 1) * neg(j) + q * (q + 1) * (q - 3) / 2;
                let extra = (q * q - 1) * (q + 1);
                let tail = q * (q + 1) * (q - 3) * (q - 1) / 4;
                let v = if j == 0 {
                    base + extra + tail
                } else if 2 * j as i64 == q + 1 {
                    base + extra - tail
                } else {
                    base
                };
                ("gu-linear", v)
            }
            (Family::Gu, IrrKind::Steinberg(j)) => {
                let base = (q - 1) * neg(j) + (q + 1) * (q - 3) / 2;
                let tail = (q + 1) * (q - 3) * (q - 1) / 4;
                let v = if j == 0 {
                    base + tail
                } else if 2 * j as i64 == q + 1 {
                    base - tail
                } else {
                    base
                };
                ("gu-steinberg", v)
            }
            (Family::Gu, IrrKind::Cuspidal(jj)) => {
                let v = if jj % 2 == 1 {
                    0
                } else if jj as i64 % (q + 1) != 0 {
                    -2 * q
                } else {
                    (q * q - 1) - 2 * q
                };
                ("gu-cuspidal", v)
            }
            (Family::Gu, IrrKind::Principal(a, b)) => {
                let base = -q * (neg(a) + neg(b));
                let v = if (a + b) as i64 % (q + 1) == 0 {
                    base - (q + 1).pow(2)
                } else {
                    base
                };
                ("gu-principal", v)
            }
            _ => continue,
        };
        out.push(ClosedFormCheck {
            formula: formula.into(),
            character: row.label.clone(),
            closed_form: value,
            direct: row.theta,
            agrees: value == row.theta,
        });
    }
    out
}

/// Per-formula summary lines for the closed forms that disagree with the
/// direct sums.
pub fn closed_form_errata(checks: &[ClosedFormCheck]) -> Vec<String> {
    let mut seen: Vec<&str> = Vec::new();
    let mut out = Vec::new();
    for c in checks.iter().filter(|c| !c.agrees) {
        if seen.contains(&c.formula.as_str()) {
            continue;
        }
        seen.push(&c.formula);
        out.push(format!(
            "closed form {} disagrees with the direct class sum at {} (closed form {}, direct {}); direct value used",
            c.formula, c.character, c.closed_form, c.direct
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(fam: Family, q: u32) -> (Group, ConnectionSet, SpectrumTable) {
        let g = Group::for_q(fam, q).unwrap();
        let cs = build_connection_set(&g, Variant::Standard).unwrap();
        let st = spectrum(&g, &cs).unwrap();
        (g, cs, st)
    }

    #[test]
    fn connection_set_sizes() {
        for (fam, q, size) in [
            (Family::Gl, 3, 46),
            (Family::Gl, 5, 286),
            (Family::Sl, 3, 17),
            (Family::Sl, 5, 49),
            (Family::Gu, 3, 62),
        ] {
            let g = Group::for_q(fam, q).unwrap();
            let cs = build_connection_set(&g, Variant::Standard).unwrap();
            assert_eq!(cs.size, size, "{fam} q={q}");
            assert!(!cs.contains(&g.identity_class()));
            for c in &cs.classes {
                assert!(cs.contains(&g.inverse_class(c)));
            }
        }
        let g = Group::for_q(Family::Gl, 3).unwrap();
        let t = build_connection_set(&g, Variant::TAlternative).unwrap();
        assert_eq!(t.size, 34);
        let sl = Group::for_q(Family::Sl, 3).unwrap();
        assert!(build_connection_set(&sl, Variant::TAlternative).is_err());
    }

    #[test]
    fn gl3_is_everything_but_identity_and_t() {
        let g = Group::for_q(Family::Gl, 3).unwrap();
        let cs = build_connection_set(&g, Variant::Standard).unwrap();
        let rest: Vec<_> = g
            .classes()
            .iter()
            .filter(|c| !cs.contains(c))
            .copied()
            .collect();
        assert_eq!(rest, vec![g.identity_class(), g.central_involution()]);
    }

    #[test]
    fn gl3_spectrum_and_certificate() {
        let (_, _, st) = table(Family::Gl, 3);
        assert_eq!(st.distinct(), vec![(46, 1), (0, 24), (-2, 23)]);
        let cert = certify(&st);
        assert!(cert.valid);
        assert_eq!((cert.a, cert.g), (2, 2));
        assert!((cert.tau - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn spectrum_examples() {
        let (_, _, st) = table(Family::Gl, 3);
        let zeta_one = st
            .rows
            .iter()
            .find(|r| r.irr.kind == IrrKind::Principal(0, 1))
            .unwrap();
        assert_eq!((zeta_one.theta, zeta_one.sign), (0, -1));
        for q in [3, 5, 7] {
            let (_, _, st) = table(Family::Gl, q);
            for r in &st.rows {
                if let IrrKind::Cuspidal(j) = r.irr.kind {
                    if j % 2 == 1 {
                        assert_eq!(r.theta, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn trace_and_multiplicity_sums() {
        for (fam, q) in [
            (Family::Gl, 5),
            (Family::Gu, 5),
            (Family::Sl, 7),
            (Family::Gl, 9),
        ] {
            let (g, _, st) = table(fam, q);
            let total: u64 = st.rows.iter().map(|r| r.multiplicity).sum();
            assert_eq!(total, g.order());
            let trace: i64 = st
                .rows
                .iter()
                .map(|r| r.multiplicity as i64 * r.theta)
                .sum();
            assert_eq!(trace, 0);
        }
    }

    #[test]
    fn congruences() {
        for q in [3, 5, 7, 9] {
            for fam in [Family::Gl, Family::Gu] {
                let (_, _, st) = table(fam, q);
                for r in &st.rows {
                    let want = if r.sign > 0 { 2 } else { 0 };
                    assert_eq!(r.theta.rem_euclid(4), want, "{fam} q={q} {}", r.label);
                }
                assert!(certify(&st).valid);
            }
            let (_, _, st) = table(Family::Sl, q);
            for r in &st.rows {
                assert_eq!((r.theta - r.sign).rem_euclid(4), 0, "sl q={q} {}", r.label);
            }
            assert!(certify(&st).valid);
        }
    }

    #[test]
    fn sl_order_based_matches_class_based() {
        for q in [3, 5, 7, 9] {
            let g = Group::for_q(Family::Sl, q).unwrap();
            let cs = build_connection_set(&g, Variant::Standard).unwrap();
            assert_eq!(sl_order_based_set(&g), cs.classes);
        }
    }

    #[test]
    fn closed_forms() {
        for q in [3, 5, 7, 9] {
            let (g, _, st) = table(Family::Gl, q);
            let checks = closed_form_checks(&g, &st);
            for c in &checks {
                if c.formula != "gl-steinberg" {
                    assert!(c.agrees, "{c:?}");
                }
            }
        }
        let (g, _, st) = table(Family::Gu, 3);
        let checks = closed_form_checks(&g, &st);
        let lin = checks
            .iter()
            .find(|c| c.formula == "gu-linear" && c.character == "linear[j=0]")
            .unwrap();
        assert_eq!((lin.closed_form, lin.direct), (38, 62));
        assert!(!closed_form_errata(&checks).is_empty());
    }

    #[test]
    fn explicit_graphs() {
        for (fam, q, n, d) in [
            (Family::Gl, 3, 48, 46),
            (Family::Sl, 3, 24, 17),
            (Family::Gu, 3, 96, 62),
        ] {
            let g = Group::for_q(fam, q).unwrap();
            let cs = build_connection_set(&g, Variant::Standard).unwrap();
            let cg = explicit_graph(&g, &cs, 10_000).unwrap();
            assert_eq!(cg.graph.n(), n);
            assert_eq!(cg.graph.regular_degree(), Some(d));
            assert!(cg.graph.is_symmetric() && !cg.graph.has_loops());
            assert!(cg.graph.is_connected());
        }
    }
}
