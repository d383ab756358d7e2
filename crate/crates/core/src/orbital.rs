//! The orbital scheme GL(2,q²)⫽GL(2,q) for q ≡ 3 (mod 4): cosets, double
//! cosets via the Frobenius invariant, the graph Γ_q and its eigenvalues
//! from character sums over cosets.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;

use crate::cayley::PstCertificate;
use crate::charring::{CycSum, MultChar};
use crate::error::{Error, Result};
use crate::gf::{make_tower, Fe, FieldTower, FiniteField};
use crate::graph::Graph;
use crate::grp::{prime_power, Mat2};

/// Conjugacy class of an element of GL(2,q²): scalars by value, every
/// other matrix by its characteristic polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConjKey {
    Scalar(Fe),
    Poly { trace: Fe, det: Fe },
}

pub fn conj_key(f: &FiniteField, m: &Mat2) -> ConjKey {
    if m.is_scalar() {
        ConjKey::Scalar(m.a)
    } else {
        ConjKey::Poly {
            trace: m.trace(f),
            det: m.det(f),
        }
    }
}

/// The double coset invariant: the class of g⁻¹F(g).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoubleCosetLabel(pub ConjKey);

/// The group data shared by the explicit and the character-sum paths.
#[derive(Clone, Debug)]
pub struct OrbitalSetup {
    tower: Arc<FieldTower>,
    q: u32,
    /// ζ of order 4 with the smallest discrete log
    zeta: Fe,
    /// {γ^i : 0 ≤ i ≤ q}, one representative per coset of F_q^×
    rep_set: Vec<Fe>,
}

impl OrbitalSetup {
    pub fn new(q: u32) -> Result<Self> {
        if q % 4 != 3 {
            return Err(Error::NotThreeModFour(q));
        }
        let (p, k) = prime_power(q)?;
        let tower = Arc::new(make_tower(p, k)?);
        let e = tower.ext();
        let n = e.units_order() as u64;
        let zeta = e.gen_pow(n / 4);
        assert!(!tower.in_base(zeta), "ζ must lie outside F_q");
        let rep_set = (0..=q as u64).map(|i| e.gen_pow(i)).collect();
        Ok(OrbitalSetup {
            tower,
            q,
            zeta,
            rep_set,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    /// F_{q²}, the matrix field of G.
    pub fn field(&self) -> &FiniteField {
        self.tower.ext()
    }

    pub fn zeta(&self) -> Fe {
        self.zeta
    }

    pub fn z(&self) -> Mat2 {
        Mat2::scalar(self.zeta)
    }

    pub fn rep_set(&self) -> &[Fe] {
        &self.rep_set
    }

    /// |G/H| = q(q+1)(q²+1).
    pub fn coset_count(&self) -> u64 {
        let q = self.q as u64;
        q * (q + 1) * (q * q + 1)
    }

    pub fn group_order(&self) -> u64 {
        let qq = (self.q as u64).pow(2);
        (qq * qq - 1) * (qq * qq - qq)
    }

    pub fn h_order(&self) -> u64 {
        let q = self.q as u64;
        (q * q - 1) * (q * q - q)
    }

    /// Entrywise x ↦ x^q.
    pub fn frobenius(&self, m: &Mat2) -> Mat2 {
        m.map_pow(self.field(), self.q as i64)
    }

    pub fn in_h(&self, m: &Mat2) -> bool {
        self.frobenius(m) == *m
    }

    pub fn double_coset_of(&self, g: &Mat2) -> Result<DoubleCosetLabel> {
        let f = self.field();
        let inv = g
            .inv(f)
            .ok_or_else(|| Error::InvalidCosetElement(g.format(f)))?;
        Ok(DoubleCosetLabel(conj_key(
            f,
            &inv.mul(f, &self.frobenius(g)),
        )))
    }

    /// m_{x,y} for the ordered pairs of distinct RepSet elements.
    pub fn m_pairs(&self) -> Vec<(Fe, Fe)> {
        let mut out = Vec::new();
        for &x in &self.rep_set {
            for &y in &self.rep_set {
                if x != y {
                    out.push((x, y));
                }
            }
        }
        out
    }

    fn log(&self, x: Fe) -> u64 {
        self.field().log(x).expect("unit") as u64
    }
}

/// An irreducible character of GL(2,q²) in Irr(G⫽H). Indices are
/// exponents of characters of F_{q²}^× (mod q²-1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitalIrr {
    /// λ∘det with λ^{q+1} = 1
    Linear(u32),
    /// S_λ, the other constituent of I[λ,λ]
    Steinberg(u32),
    /// I[θ₁,θ₂], θ₁ ≠ θ₂, unordered
    Principal(u32, u32),
}

impl OrbitalIrr {
    pub fn kind_name(&self) -> &'static str {
        match self {
            OrbitalIrr::Linear(_) => "linear",
            OrbitalIrr::Steinberg(_) => "steinberg",
            OrbitalIrr::Principal(..) => "principal",
        }
    }

    pub fn params(&self) -> String {
        match self {
            OrbitalIrr::Linear(j) | OrbitalIrr::Steinberg(j) => format!("j={j}"),
            OrbitalIrr::Principal(a, b) => format!("j1={a};j2={b}"),
        }
    }

    /// Degree as a character of GL(2,q²).
    pub fn degree(&self, q: u32) -> u64 {
        let qq = (q as u64).pow(2);
        match self {
            OrbitalIrr::Linear(_) => 1,
            OrbitalIrr::Steinberg(_) => qq,
            OrbitalIrr::Principal(..) => qq + 1,
        }
    }
}

impl fmt::Display for OrbitalIrr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.kind_name(), self.params())
    }
}

/// Irr(G⫽H): λ and S_λ for λ^{q+1} = 1, I[θ₁,θ₂] with θ₁ ≠ θ₂ both
/// trivial on F_q^×, and I[θ₂^{-q},θ₂] with θ₂ nontrivial on F_q^×.
pub fn orbital_irreps(q: u32) -> Vec<OrbitalIrr> {
    let n = q * q - 1;
    let kernel: Vec<u32> = (0..n).filter(|j| j % (q - 1) == 0).collect();
    let mut out = Vec::new();
    for &j in &kernel {
        out.push(OrbitalIrr::Linear(j));
        out.push(OrbitalIrr::Steinberg(j));
    }
    for (i, &a) in kernel.iter().enumerate() {
        for &b in &kernel[i + 1..] {
            out.push(OrbitalIrr::Principal(a, b));
        }
    }
    for j2 in (0..n).filter(|j| j % (q - 1) != 0) {
        let j1 = ((n as u64 - (q as u64 * j2 as u64) % n as u64) % n as u64) as u32;
        if j1 < j2 {
            out.push(OrbitalIrr::Principal(j1, j2));
        }
    }
    out.sort_unstable();
    out
}

/// ⟨1, I[θ₁,θ₂]|_H⟩ by the case analysis on kernels.
pub fn principal_h_multiplicity(q: u32, j1: u32, j2: u32) -> u32 {
    let n = q * q - 1;
    let on_fq = |j: u32| j.is_multiple_of(q - 1);
    let b_in_ker = on_fq(j1) && on_fq(j2);
    let c_in_ker = (j1 as u64 + q as u64 * j2 as u64).is_multiple_of(n as u64);
    b_in_ker as u32 + c_in_ker as u32
}

/// Character sums of the torus data entering the coset formulas.
#[derive(Clone, Debug)]
struct ThetaData {
    t1: MultChar,
    t2: MultChar,
    /// θ(B(q))
    b: i64,
    /// θ(C)
    c: i64,
    /// θ₂(F_q^×)
    t2_fq: i64,
}

impl OrbitalSetup {
    fn theta_data(&self, j1: u32, j2: u32) -> Result<ThetaData> {
        let e = self.field();
        let n = e.units_order();
        let q = self.q as u64;
        let t1 = MultChar::new(n, j1 as i64);
        let t2 = MultChar::new(n, j2 as i64);
        let fq_logs = || (0..q - 1).map(move |a| (q + 1) * a);
        let s1 = t1.char_sum_logs(fq_logs()).integer_part()?;
        let s2 = t2.char_sum_logs(fq_logs()).integer_part()?;
        // B(q) = torus × unipotent radical of size q
        let b = q as i64 * s1 * s2;
        let c = t1
            .mul(&t2.pow(q as i64))
            .char_sum_logs(0..n as u64)
            .integer_part()?;
        Ok(ThetaData {
            t1,
            t2,
            b,
            c,
            t2_fq: s2,
        })
    }

    /// I[θ](m_{x,y}H) for x⁻¹y ∉ F_q.
    pub fn principal_coset_sum(&self, j1: u32, j2: u32, x: Fe, y: Fe) -> Result<CycSum> {
        let d = self.theta_data(j1, j2)?;
        self.principal_coset_sum_with(&d, x, y)
    }

    fn principal_coset_sum_with(&self, d: &ThetaData, x: Fe, y: Fe) -> Result<CycSum> {
        let e = self.field();
        let ratio = e.div(y, x).ok_or(Error::ZeroElement)?;
        if self.tower.in_base(ratio) {
            return Err(Error::InvalidCosetElement(format!(
                "x^-1 y = {} lies in F_q",
                e.format(ratio)
            )));
        }
        let (lx, ly) = (self.log(x), self.log(y));
        let xy = &d.t1.value(lx) * &d.t2.value(ly);
        let yx = &d.t1.value(ly) * &d.t2.value(lx);
        let q = self.q as i64;
        Ok(&(&xy + &yx).scale(d.b) + &xy.scale((q - 1) * d.c * d.t2_fq))
    }

    /// χ(m_{x,y}H) for χ ∈ Irr(G⫽H).
    pub fn coset_char_sum(&self, chi: &OrbitalIrr, x: Fe, y: Fe) -> Result<CycSum> {
        let h = self.h_order() as i64;
        let lam = |j: u32| {
            MultChar::new(self.field().units_order(), j as i64)
                .value(self.log(x) + self.log(y))
                .scale(h)
        };
        match *chi {
            OrbitalIrr::Linear(j) => Ok(lam(j)),
            OrbitalIrr::Steinberg(j) => Ok(&self.principal_coset_sum(j, j, x, y)? - &lam(j)),
            OrbitalIrr::Principal(a, b) => self.principal_coset_sum(a, b, x, y),
        }
    }

    /// ω_χ(ζ), the central character at the scalar of z; equals χ(zH)/|H|.
    pub fn z_sign(&self, chi: &OrbitalIrr) -> Result<i64> {
        let n = self.field().units_order();
        let l = self.log(self.zeta);
        let v = match *chi {
            OrbitalIrr::Linear(j) | OrbitalIrr::Steinberg(j) => {
                MultChar::new(n, j as i64).value(2 * l)
            }
            OrbitalIrr::Principal(a, b) => MultChar::new(n, (a + b) as i64).value(l),
        };
        let s = v.integer_part()?;
        if s.abs() != 1 {
            return Err(Error::NonIntegralEigenvalue {
                label: chi.to_string(),
                detail: format!("central sign {s}"),
            });
        }
        Ok(s)
    }

    /// 𝓔_χ = ½ Σ_{x≠y} χ(m_{x,y}H)/|H ∩ H^{m_{x,y}}|, with the
    /// intersection of order (q-1)².
    pub fn e_value(&self, chi: &OrbitalIrr) -> Result<i64> {
        let n = self.field().units_order();
        let mut total = CycSum::zero(n);
        for (x, y) in self.m_pairs() {
            total = &total + &self.coset_char_sum(chi, x, y)?;
        }
        let s = total
            .integer_part()
            .map_err(|e| Error::NonIntegralEigenvalue {
                label: chi.to_string(),
                detail: e.to_string(),
            })?;
        let den = 2 * (self.q as i64 - 1).pow(2);
        if s % den != 0 {
            return Err(Error::NonIntegralEigenvalue {
                label: chi.to_string(),
                detail: format!("{s}/{den}"),
            });
        }
        Ok(s / den)
    }

    /// [θ(B(q))/(q-1)² + θ(C)θ₂(F_q^×)/2(q-1)] · Σ_{x≠y} θ₁(x)θ₂(y).
    pub fn e_principal_factored(&self, j1: u32, j2: u32) -> Result<i64> {
        let d = self.theta_data(j1, j2)?;
        let q = self.q as i64;
        let mut pair_sum = CycSum::zero(self.field().units_order());
        for (x, y) in self.m_pairs() {
            pair_sum = &pair_sum + &(&d.t1.value(self.log(x)) * &d.t2.value(self.log(y)));
        }
        // common denominator 2(q-1)²; the pair sum alone need not be rational
        let num = pair_sum
            .scale(2 * d.b + (q - 1) * d.c * d.t2_fq)
            .integer_part()?;
        let den = 2 * (q - 1).pow(2);
        if num % den != 0 {
            return Err(Error::NonIntegralEigenvalue {
                label: format!("I[{j1},{j2}]"),
                detail: format!("{num}/{den}"),
            });
        }
        Ok(num / den)
    }

    /// The closed form q(q+1)/2 ([λ,λ](F×F) - 2λ(S)) for 𝓔_λ.
    pub fn e_linear_display(&self, j: u32) -> Result<i64> {
        let n = self.field().units_order();
        let q = self.q as i64;
        let lam = MultChar::new(n, j as i64);
        let full = lam.char_sum_logs(0..n as u64).integer_part()?;
        let squares = lam
            .char_sum_logs((0..n as u64 / 2).map(|a| 2 * a))
            .integer_part()?;
        Ok(q * (q + 1) / 2 * (full * full - 2 * squares))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitalRow {
    #[serde(skip)]
    pub irr: OrbitalIrr,
    pub label: String,
    pub kind: String,
    pub params: String,
    pub degree: u64,
    /// eigenvalue of the non-involution part D
    pub e: i64,
    /// ±1, the eigenvalue of A_z
    pub sign: i64,
    pub theta: i64,
    /// rank of the idempotent, χ(1)
    pub multiplicity: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitalSpectrum {
    pub q: u32,
    /// whether A_z is part of the graph
    pub includes_z: bool,
    pub rows: Vec<OrbitalRow>,
}

impl OrbitalSpectrum {
    pub fn valency(&self) -> i64 {
        self.rows
            .iter()
            .find(|r| r.irr == OrbitalIrr::Linear(0))
            .map_or(0, |r| r.theta)
    }

    pub fn all_e_divisible_by_four(&self) -> bool {
        self.rows.iter().all(|r| r.e % 4 == 0)
    }

    pub fn eigenvalue_multiset(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for r in &self.rows {
            out.extend(std::iter::repeat_n(r.theta, r.multiplicity as usize));
        }
        out.sort_unstable();
        out
    }

    /// The graph D alone: same idempotents, A_z dropped.
    pub fn without_z(&self) -> OrbitalSpectrum {
        let rows = self
            .rows
            .iter()
            .map(|r| OrbitalRow {
                theta: r.e,
                ..r.clone()
            })
            .collect();
        OrbitalSpectrum {
            q: self.q,
            includes_z: false,
            rows,
        }
    }
}

pub fn orbital_spectrum(q: u32) -> Result<OrbitalSpectrum> {
    let setup = OrbitalSetup::new(q)?;
    orbital_spectrum_for(&setup)
}

pub fn orbital_spectrum_for(setup: &OrbitalSetup) -> Result<OrbitalSpectrum> {
    let q = setup.q();
    let rows = orbital_irreps(q)
        .par_iter()
        .map(|chi| {
            let e = setup.e_value(chi)?;
            let sign = setup.z_sign(chi)?;
            Ok(OrbitalRow {
                irr: *chi,
                label: chi.to_string(),
                kind: chi.kind_name().into(),
                params: chi.params(),
                degree: chi.degree(q),
                e,
                sign,
                theta: sign + e,
                multiplicity: chi.degree(q),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrbitalSpectrum {
        q,
        includes_z: true,
        rows,
    })
}

/// PST between xH and xzH when the integral spectrum has θ ≡ 1 on the
/// + side and 3 on the - side.
pub fn certify_orbital(spec: &OrbitalSpectrum) -> PstCertificate {
    let eigs: Vec<(i64, i64)> = spec.rows.iter().map(|r| (r.theta, r.sign)).collect();
    let mults: Vec<u64> = spec.rows.iter().map(|r| r.multiplicity).collect();
    let vertices = mults.iter().sum();
    let mut cert = PstCertificate::from_eigensystem(
        format!("orbital(gl(2,{})//gl(2,{}))", spec.q * spec.q, spec.q),
        vertices,
        &eigs,
        &mults,
        spec.valency(),
        spec.includes_z,
        "xH <-> xzH for every coset xH".into(),
    );
    cert.a = spec.valency().rem_euclid(4);
    cert
}

/// A closed form evaluated next to the direct 𝓔 value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitalFormulaCheck {
    pub formula: String,
    pub character: String,
    pub closed_form: i64,
    pub direct: i64,
    pub agrees: bool,
}

pub fn orbital_formula_checks(
    setup: &OrbitalSetup,
    spec: &OrbitalSpectrum,
) -> Result<Vec<OrbitalFormulaCheck>> {
    let mut out = Vec::new();
    let e_of = |chi: OrbitalIrr| spec.rows.iter().find(|r| r.irr == chi).map(|r| r.e);
    for r in &spec.rows {
        let (formula, value) = match r.irr {
            OrbitalIrr::Principal(a, b) => {
                ("factored-principal", setup.e_principal_factored(a, b)?)
            }
            OrbitalIrr::Linear(j) => ("linear-display", setup.e_linear_display(j)?),
            OrbitalIrr::Steinberg(j) => {
                let lin = e_of(OrbitalIrr::Linear(j)).ok_or(Error::Mismatch)?;
                (
                    "steinberg-difference",
                    setup.e_principal_factored(j, j)? - lin,
                )
            }
        };
        out.push(OrbitalFormulaCheck {
            formula: formula.into(),
            character: r.label.clone(),
            closed_form: value,
            direct: r.e,
            agrees: value == r.e,
        });
    }
    Ok(out)
}

pub fn orbital_errata(checks: &[OrbitalFormulaCheck]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.agrees)
        .take(1)
        .map(|c| {
            format!(
                "closed form {} for E disagrees with the direct coset sum at {} (closed form {}, direct {}); direct value used, divisibility by 4 still holds",
                c.formula, c.character, c.closed_form, c.direct
            )
        })
        .collect()
}

/// G/H with explicit cosets, the double coset partition and Γ_q.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    setup: OrbitalSetup,
    elements: Vec<Mat2>,
    h: Vec<Mat2>,
    /// Lang key gF(g)⁻¹ of each coset
    keys: HashMap<Mat2, usize>,
    /// first element of each coset in enumeration order; index 0 is H
    reps: Vec<Mat2>,
}

impl CosetSpace {
    pub fn new(setup: OrbitalSetup, bound: u64) -> Result<Self> {
        let order = setup.group_order();
        if order > bound {
            return Err(Error::BoundExceeded { order, bound });
        }
        let f = setup.field().clone();
        let mut elements = Vec::with_capacity(order as usize);
        let els: Vec<Fe> = f.elements().collect();
        for &a in &els {
            for &b in &els {
                for &c in &els {
                    for &d in &els {
                        let m = Mat2::new(a, b, c, d);
                        if !m.det(&f).is_zero() {
                            elements.push(m);
                        }
                    }
                }
            }
        }
        // identity first so that coset 0 is H
        let id_pos = elements
            .iter()
            .position(|m| *m == Mat2::identity())
            .expect("identity");
        elements.swap(0, id_pos);
        let h: Vec<Mat2> = elements.iter().filter(|m| setup.in_h(m)).copied().collect();
        let mut keys = HashMap::new();
        let mut reps = Vec::new();
        for g in &elements {
            let key = lang_key(&setup, g);
            keys.entry(key).or_insert_with(|| {
                reps.push(*g);
                reps.len() - 1
            });
        }
        Ok(CosetSpace {
            setup,
            elements,
            h,
            keys,
            reps,
        })
    }

    pub fn setup(&self) -> &OrbitalSetup {
        &self.setup
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn subgroup(&self) -> &[Mat2] {
        &self.h
    }

    pub fn representatives(&self) -> &[Mat2] {
        &self.reps
    }

    pub fn coset_of(&self, g: &Mat2) -> usize {
        self.keys[&lang_key(&self.setup, g)]
    }

    /// Representatives pairwise in distinct cosets: x⁻¹y ∉ H.
    pub fn representatives_distinct(&self) -> bool {
        let f = self.setup.field();
        self.reps.par_iter().enumerate().all(|(i, x)| {
            let xi = x.inv(f).expect("unit");
            self.reps[i + 1..]
                .iter()
                .all(|y| !self.setup.in_h(&xi.mul(f, y)))
        })
    }

    /// Double cosets HxH as H-orbits on G/H, one id per coset.
    pub fn literal_double_cosets(&self) -> Vec<usize> {
        let f = self.setup.field();
        let mut uf = UnionFind::<usize>::new(self.len());
        for (i, r) in self.reps.iter().enumerate() {
            for h in &self.h {
                uf.union(i, self.coset_of(&h.mul(f, r)));
            }
        }
        canonical_ids(&uf.into_labeling())
    }

    /// For every element g: the literal double coset of gH determines the
    /// invariant of g and conversely.
    pub fn invariant_matches_literal(&self) -> Result<bool> {
        let lit = self.literal_double_cosets();
        let labels = self
            .elements
            .par_iter()
            .map(|g| Ok((lit[self.coset_of(g)], self.setup.double_coset_of(g)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut fwd: HashMap<usize, DoubleCosetLabel> = HashMap::new();
        let mut back: HashMap<DoubleCosetLabel, usize> = HashMap::new();
        for (d, l) in labels {
            if *fwd.entry(d).or_insert(l) != l || *back.entry(l).or_insert(d) != d {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Double coset id of x⁻¹y for every ordered pair of cosets.
    pub fn relation_index(&self) -> Result<(Vec<usize>, Vec<DoubleCosetLabel>)> {
        let f = self.setup.field();
        let n = self.len();
        let inv: Vec<Mat2> = self.reps.iter().map(|r| r.inv(f).expect("unit")).collect();
        let labels: Vec<DoubleCosetLabel> = (0..n * n)
            .into_par_iter()
            .map(|k| {
                self.setup
                    .double_coset_of(&inv[k / n].mul(f, &self.reps[k % n]))
            })
            .collect::<Result<_>>()?;
        let mut distinct: Vec<DoubleCosetLabel> = labels.clone();
        distinct.sort_unstable();
        distinct.dedup();
        // identity relation first
        let id = self.setup.double_coset_of(&Mat2::identity())?;
        distinct.retain(|l| *l != id);
        distinct.insert(0, id);
        let pos: HashMap<DoubleCosetLabel, usize> =
            distinct.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        Ok((labels.iter().map(|l| pos[l]).collect(), distinct))
    }

    /// Γ_q: rH ~ sH iff r⁻¹s ∈ HzH ∪ ⋃ Hm_{x,y}H; A_z optional.
    pub fn build_gamma(&self, include_z: bool) -> Result<Graph> {
        let mut allowed = Vec::new();
        if include_z {
            allowed.push(self.setup.double_coset_of(&self.setup.z())?);
        }
        for (x, y) in self.setup.m_pairs() {
            allowed.push(self.setup.double_coset_of(&Mat2::diag(x, y))?);
        }
        let f = self.setup.field();
        let adj = self
            .reps
            .par_iter()
            .map(|r| {
                let ri = r.inv(f).expect("unit");
                let mut row = Vec::new();
                for (j, s) in self.reps.iter().enumerate() {
                    if allowed.contains(&self.setup.double_coset_of(&ri.mul(f, s))?) {
                        row.push(j);
                    }
                }
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Graph::from_adjacency(adj))
    }

    /// The coset xzH for each coset xH.
    pub fn z_partner(&self) -> Vec<usize> {
        let f = self.setup.field();
        let z = self.setup.z();
        self.reps
            .iter()
            .map(|r| self.coset_of(&z.mul(f, r)))
            .collect()
    }

    pub fn normalizes_h(&self, d: &Mat2) -> bool {
        let f = self.setup.field();
        self.h
            .iter()
            .all(|h| h.conjugate_by(f, d).is_some_and(|c| self.setup.in_h(&c)))
    }

    /// For every double coset HdH: A_d is a permutation iff d ∈ N_G(H),
    /// and an involution iff moreover d ∉ H and d² ∈ H.
    pub fn normalizer_relations(&self) -> Result<Vec<NormalizerRow>> {
        let (rel, labels) = self.relation_index()?;
        let n = self.len();
        let f = self.setup.field();
        let mut rows = Vec::new();
        for k in 0..labels.len() {
            // representative: first coset j with (H, jH) in relation k
            let j = (0..n).find(|&j| rel[j] == k).expect("nonempty relation");
            let d = self.reps[j];
            let row_counts: Vec<usize> = (0..n)
                .map(|i| (0..n).filter(|&c| rel[i * n + c] == k).count())
                .collect();
            let permutation = row_counts.iter().all(|&c| c == 1);
            let involution = permutation && {
                let image: Vec<usize> = (0..n)
                    .map(|i| (0..n).find(|&c| rel[i * n + c] == k).expect("one"))
                    .collect();
                (0..n).all(|i| image[image[i]] == i) && (0..n).any(|i| image[i] != i)
            };
            let normal = self.normalizes_h(&d);
            let d_in_h = self.setup.in_h(&d);
            let d2_in_h = self.setup.in_h(&d.mul(f, &d));
            rows.push(NormalizerRow {
                relation: k,
                size: row_counts[0],
                permutation,
                involution,
                normalizes: normal,
                consistent: permutation == normal && involution == (normal && !d_in_h && d2_in_h),
            });
        }
        Ok(rows)
    }

    /// Σ_{h∈H} I[θ](gh) with I[θ] realized on the projective line.
    pub fn literal_principal_sum(&self, j1: u32, j2: u32, g: &Mat2) -> CycSum {
        let f = self.setup.field();
        let n = f.units_order();
        let (t1, t2) = (MultChar::new(n, j1 as i64), MultChar::new(n, j2 as i64));
        let mut total = CycSum::zero(n);
        for h in &self.h {
            let gh = g.mul(f, h);
            for beta in projective_line(f) {
                let (sigma, b) = coset_action(f, &gh, beta);
                if sigma == beta {
                    let v = &t1.value(f.log(b.a).expect("unit") as u64)
                        * &t2.value(f.log(b.d).expect("unit") as u64);
                    total = &total + &v;
                }
            }
        }
        total
    }

    /// Σ_{h∈H} λ(det(gh)).
    pub fn literal_linear_sum(&self, j: u32, g: &Mat2) -> CycSum {
        let f = self.setup.field();
        let lam = MultChar::new(f.units_order(), j as i64);
        let mut total = CycSum::zero(f.units_order());
        for h in &self.h {
            total.add_root(
                lam.exponent(f.log(g.mul(f, h).det(f)).expect("unit") as u64) as u64,
                1,
            );
        }
        total
    }

    /// χ(gH) computed literally; S_λ = I[λ,λ] - λ.
    pub fn literal_coset_sum(&self, chi: &OrbitalIrr, g: &Mat2) -> CycSum {
        match *chi {
            OrbitalIrr::Linear(j) => self.literal_linear_sum(j, g),
            OrbitalIrr::Steinberg(j) => {
                &self.literal_principal_sum(j, j, g) - &self.literal_linear_sum(j, g)
            }
            OrbitalIrr::Principal(a, b) => self.literal_principal_sum(a, b, g),
        }
    }

    /// Number of elements of H that are G-conjugate to c₂(x), for each
    /// x ∈ F_q^×, and the number of elements of H that are G-nonsplit.
    pub fn unipotent_type_counts(&self) -> (Vec<u64>, u64) {
        let f = self.setup.field();
        let t = self.setup.tower();
        let mut counts = vec![0u64; t.base().units_order() as usize];
        let mut nonsplit = 0;
        for h in &self.h {
            if h.is_scalar() {
                continue;
            }
            let tr = h.trace(f);
            let disc = f.sub(f.mul(tr, tr), f.mul(f.from_int(4), h.det(f)));
            if disc.is_zero() {
                let x = f.half(tr);
                let l = t
                    .base()
                    .log(t.restrict(x).expect("F_q eigenvalue"))
                    .expect("unit");
                counts[l as usize] += 1;
            } else if !f.is_square(disc).expect("unit") {
                nonsplit += 1;
            }
        }
        (counts, nonsplit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizerRow {
    pub relation: usize,
    /// |HdH|/|H|
    pub size: usize,
    pub permutation: bool,
    pub involution: bool,
    pub normalizes: bool,
    pub consistent: bool,
}

fn lang_key(setup: &OrbitalSetup, g: &Mat2) -> Mat2 {
    let f = setup.field();
    g.mul(f, &setup.frobenius(g).inv(f).expect("unit"))
}

fn canonical_ids(labels: &[usize]) -> Vec<usize> {
    let mut map = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// F_{q²} ∪ {∞}, with `None` for ∞.
pub fn projective_line(f: &FiniteField) -> Vec<Option<Fe>> {
    f.elements()
        .map(Some)
        .chain(std::iter::once(None))
        .collect()
}

fn omega(beta: Option<Fe>) -> Mat2 {
    match beta {
        Some(b) => Mat2::new(Fe::ONE, Fe::ZERO, b, Fe::ONE),
        None => Mat2::new(Fe::ZERO, Fe::ONE, Fe::ONE, Fe::ZERO),
    }
}

/// g·ω_β = ω_σ · b with b upper triangular.
pub fn coset_action(f: &FiniteField, g: &Mat2, beta: Option<Fe>) -> (Option<Fe>, Mat2) {
    let w = omega(beta);
    let col = g.mul(f, &w);
    let sigma = if col.a.is_zero() {
        None
    } else {
        Some(f.div(col.c, col.a).expect("unit"))
    };
    let b = omega(sigma).inv(f).expect("unit").mul(f, &col);
    debug_assert!(b.c.is_zero());
    (sigma, b)
}

impl OrbitalSetup {
    /// d_{α,β} ∈ F_q^× with β = c + dα, for α, β ∉ F_q.
    pub fn d_coefficient(&self, alpha: Fe, beta: Fe) -> Option<Fe> {
        let t = &self.tower;
        let (_, a1) = t.coordinates(alpha);
        let (_, b1) = t.coordinates(beta);
        if a1.is_zero() || b1.is_zero() {
            return None;
        }
        t.ext().div(b1, a1)
    }

    /// The matrix P_θ(H) on the projective line by the three-case formula.
    pub fn m_theta(&self, j1: u32, j2: u32) -> Result<Vec<Vec<CycSum>>> {
        let d = self.theta_data(j1, j2)?;
        let f = self.field();
        let n = f.units_order();
        let pts = projective_line(f);
        let in_p1 = |p: &Option<Fe>| p.is_none_or(|x| self.tower.in_base(x));
        let mut out = vec![vec![CycSum::zero(n); pts.len()]; pts.len()];
        for (bi, beta) in pts.iter().enumerate() {
            for (ai, alpha) in pts.iter().enumerate() {
                out[bi][ai] = match (in_p1(alpha), in_p1(beta)) {
                    (true, true) => CycSum::int(n, d.b),
                    (false, false) => {
                        let dd = self
                            .d_coefficient(alpha.expect("finite"), beta.expect("finite"))
                            .expect("outside F_q");
                        d.t2.value(self.log(dd)).scale(d.c)
                    }
                    _ => CycSum::zero(n),
                };
            }
        }
        Ok(out)
    }
}

impl CosetSpace {
    /// P_θ(H) = Σ_h P_θ(h) computed element by element.
    pub fn literal_m_theta(&self, j1: u32, j2: u32) -> Vec<Vec<CycSum>> {
        let f = self.setup.field();
        let n = f.units_order();
        let (t1, t2) = (MultChar::new(n, j1 as i64), MultChar::new(n, j2 as i64));
        let pts = projective_line(f);
        let idx: HashMap<Option<Fe>, usize> =
            pts.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let mut out = vec![vec![CycSum::zero(n); pts.len()]; pts.len()];
        for h in &self.h {
            for (ai, alpha) in pts.iter().enumerate() {
                let (sigma, b) = coset_action(f, h, *alpha);
                let v = &t1.value(f.log(b.a).expect("unit") as u64)
                    * &t2.value(f.log(b.d).expect("unit") as u64);
                let bi = idx[&sigma];
                out[bi][ai] = &out[bi][ai] + &v;
            }
        }
        out
    }
}
