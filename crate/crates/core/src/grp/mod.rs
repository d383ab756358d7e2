//! The matrix groups GL(2,q), GU(2,q) and SL(2,q): conjugacy classes,
//! irreducible characters and brute-force enumeration.
//!
//! Class and character parameters are always stored as elements of the
//! extension field F_{q²} (base-field values go through the tower
//! embedding), so every character value is a power of ζ_{q²-1} read off an
//! extension discrete log.

mod mat2;
mod tables;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::charring::CycSum;
use crate::error::{Error, Result};
use crate::gf::{is_prime, make_tower, Fe, FieldTower, FiniteField};

pub use mat2::Mat2;

/// Default cap on the order of groups we enumerate element by element.
pub const DEFAULT_ENUMERATION_BOUND: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gl,
    Gu,
    Sl,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Gl => "gl",
            Family::Gu => "gu",
            Family::Sl => "sl",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Family::Gl),
            "gu" => Ok(Family::Gu),
            "sl" => Ok(Family::Sl),
            other => Err(Error::Unsupported(format!("unknown family {other:?}"))),
        }
    }
}

/// Split q into (p, k) with q = p^k, p an odd prime.
pub fn prime_power(q: u32) -> Result<(u32, u32)> {
    if q < 3 || q.is_multiple_of(2) {
        return Err(Error::BadCharacteristic(q));
    }
    let p = (3..=q)
        .find(|d| q.is_multiple_of(*d))
        .expect("q > 1 has a prime factor");
    let (mut r, mut k) = (q, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    if r != 1 || !is_prime(p) {
        return Err(Error::BadCharacteristic(q));
    }
    Ok((p, k))
}

/// Conjugacy-class shapes. Parameters are extension-field elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassKind {
    /// xI
    Central(Fe),
    /// one eigenvalue x, not scalar (GL, GU)
    Unipotent(Fe),
    /// SL: sign·I plus a nonzero nilpotent whose invariant is (non)square
    SlUnipotent { sign: i8, nonsquare: bool },
    /// distinct eigenvalues in the small torus, stored in increasing order
    Split(Fe, Fe),
    /// eigenvalues z and its Galois twin, z canonical
    Nonsplit(Fe),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassLabel {
    pub family: Family,
    pub kind: ClassKind,
}

/// Irreducible-character shapes.
///
/// For GL, `Linear`/`Steinberg`/`Principal` indices are characters of
/// F_q^× (mod q-1) and `Cuspidal` indexes a character of F_{q²}^×. For GU
/// the small characters live on the norm-one group E (mod q+1). For SL,
/// `SlPrincipal(j)` restricts I[λ_j, 1] and `SlCuspidal(j)` restricts π[μ]
/// for μ of index j on E.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrrKind {
    Linear(u32),
    Steinberg(u32),
    Cuspidal(u32),
    Principal(u32, u32),
    Trivial,
    Sigma,
    SlPrincipal(u32),
    SlCuspidal(u32),
    UPlus,
    UMinus,
    ZPlus,
    ZMinus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IrrLabel {
    pub family: Family,
    pub kind: IrrKind,
}

impl IrrLabel {
    /// Short kind name for tables.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            IrrKind::Linear(_) | IrrKind::Trivial => "linear",
            IrrKind::Steinberg(_) | IrrKind::Sigma => "steinberg",
            IrrKind::Cuspidal(_) | IrrKind::SlCuspidal(_) => "cuspidal",
            IrrKind::Principal(..) | IrrKind::SlPrincipal(_) => "principal",
            IrrKind::UPlus => "u+",
            IrrKind::UMinus => "u-",
            IrrKind::ZPlus => "z+",
            IrrKind::ZMinus => "z-",
        }
    }

    /// Parameters as `key=value` pairs joined by `;`.
    pub fn params(&self) -> String {
        match self.kind {
            IrrKind::Linear(j)
            | IrrKind::Steinberg(j)
            | IrrKind::SlPrincipal(j)
            | IrrKind::SlCuspidal(j) => {
                format!("j={j}")
            }
            IrrKind::Cuspidal(j) => format!("J={j}"),
            IrrKind::Principal(a, b) => format!("j1={a};j2={b}"),
            _ => String::new(),
        }
    }
}

impl fmt::Display for IrrLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.params();
        if p.is_empty() {
            write!(f, "{}", self.kind_name())
        } else {
            write!(f, "{}[{}]", self.kind_name(), p)
        }
    }
}

/// A class label printed with extension discrete logs.
pub struct ClassDisplay<'a> {
    label: &'a ClassLabel,
    ext: &'a FiniteField,
}

impl fmt::Display for ClassDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = |x: Fe| {
            self.ext
                .log(x)
                .map_or("0".to_string(), |a| format!("g^{a}"))
        };
        match self.label.kind {
            ClassKind::Central(x) => write!(f, "central({})", l(x)),
            ClassKind::Unipotent(x) => write!(f, "unipotent({})", l(x)),
            ClassKind::SlUnipotent { sign, nonsquare } => {
                write!(
                    f,
                    "d2({},{})",
                    sign,
                    if nonsquare { "nonsquare" } else { "square" }
                )
            }
            ClassKind::Split(x, y) => write!(f, "split({},{})", l(x), l(y)),
            ClassKind::Nonsplit(z) => write!(f, "nonsplit({})", l(z)),
        }
    }
}

/// One of the three groups over a fixed field tower.
#[derive(Clone, Debug)]
pub struct Group {
    family: Family,
    tower: Arc<FieldTower>,
    classes: Vec<ClassLabel>,
    class_index: HashMap<ClassLabel, usize>,
    irreps: Vec<IrrLabel>,
}

impl Group {
    pub fn new(family: Family, tower: Arc<FieldTower>) -> Self {
        let mut g = Group {
            family,
            tower,
            classes: Vec::new(),
            class_index: HashMap::new(),
            irreps: Vec::new(),
        };
        g.classes = g.build_classes();
        g.class_index = g.classes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        g.irreps = g.build_irreps();
        g
    }

    pub fn for_q(family: Family, q: u32) -> Result<Self> {
        let (p, k) = prime_power(q)?;
        Ok(Group::new(family, Arc::new(make_tower(p, k)?)))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn q(&self) -> u32 {
        self.tower.q()
    }

    /// The field matrix entries live in.
    pub fn matrix_field(&self) -> &FiniteField {
        match self.family {
            Family::Gu => self.tower.ext(),
            _ => self.tower.base(),
        }
    }

    pub fn order(&self) -> u64 {
        let q = self.q() as u64;
        match self.family {
            Family::Gl => (q * q - 1) * (q * q - q),
            Family::Gu => q * (q - 1) * (q + 1) * (q + 1),
            Family::Sl => q * (q * q - 1),
        }
    }

    pub fn classes(&self) -> &[ClassLabel] {
        &self.classes
    }

    pub fn class_position(&self, c: &ClassLabel) -> Option<usize> {
        self.class_index.get(c).copied()
    }

    pub fn irreps(&self) -> &[IrrLabel] {
        &self.irreps
    }

    pub fn display<'a>(&'a self, c: &'a ClassLabel) -> ClassDisplay<'a> {
        ClassDisplay {
            label: c,
            ext: self.tower.ext(),
        }
    }

    fn ext(&self) -> &FiniteField {
        self.tower.ext()
    }

    fn class(&self, kind: ClassKind) -> ClassLabel {
        ClassLabel {
            family: self.family,
            kind,
        }
    }

    fn irr(&self, kind: IrrKind) -> IrrLabel {
        IrrLabel {
            family: self.family,
            kind,
        }
    }

    pub fn identity_class(&self) -> ClassLabel {
        self.class(ClassKind::Central(Fe::ONE))
    }

    /// The class of t = -I.
    pub fn central_involution(&self) -> ClassLabel {
        self.class(ClassKind::Central(self.ext().minus_one()))
    }

    /// Canonical representative of z under the family's Galois twin.
    fn canonical_nonsplit(&self, z: Fe) -> Fe {
        let e = self.ext();
        let q = self.q() as i64;
        let twin = match self.family {
            Family::Gl => e.pow(z, q),
            Family::Gu => e.pow(z, -q),
            Family::Sl => e.pow(z, -1),
        };
        z.min(twin)
    }

    fn split(&self, x: Fe, y: Fe) -> ClassKind {
        ClassKind::Split(x.min(y), x.max(y))
    }

    fn build_classes(&self) -> Vec<ClassLabel> {
        let t = &self.tower;
        let e = t.ext();
        let mut out = Vec::new();
        let small: Vec<Fe> = match self.family {
            Family::Gu => t.unit_circle(),
            _ => t.base_units(),
        };
        match self.family {
            Family::Gl | Family::Gu => {
                for &x in &small {
                    out.push(ClassKind::Central(x));
                }
                for &x in &small {
                    out.push(ClassKind::Unipotent(x));
                }
                for (i, &x) in small.iter().enumerate() {
                    for &y in &small[i + 1..] {
                        out.push(self.split(x, y));
                    }
                }
                let in_small = |z: Fe| match self.family {
                    Family::Gl => t.in_base(z),
                    _ => t.in_unit_circle(z),
                };
                for z in e.units() {
                    if !in_small(z) && self.canonical_nonsplit(z) == z {
                        out.push(ClassKind::Nonsplit(z));
                    }
                }
            }
            Family::Sl => {
                let m1 = e.minus_one();
                out.push(ClassKind::Central(Fe::ONE));
                out.push(ClassKind::Central(m1));
                for sign in [1, -1] {
                    for nonsquare in [false, true] {
                        out.push(ClassKind::SlUnipotent { sign, nonsquare });
                    }
                }
                for &x in &small {
                    let xi = e.inv(x).expect("unit");
                    if x != Fe::ONE && x != m1 && x < xi {
                        out.push(self.split(x, xi));
                    }
                }
                for z in t.unit_circle() {
                    if z != Fe::ONE && z != m1 && self.canonical_nonsplit(z) == z {
                        out.push(ClassKind::Nonsplit(z));
                    }
                }
            }
        }
        out.into_iter().map(|k| self.class(k)).collect()
    }

    fn build_irreps(&self) -> Vec<IrrLabel> {
        let q = self.q();
        let n = q * q - 1;
        let mut out = Vec::new();
        match self.family {
            Family::Gl | Family::Gu => {
                let m = if self.family == Family::Gl {
                    q - 1
                } else {
                    q + 1
                };
                out.extend((0..m).map(IrrKind::Linear));
                out.extend((0..m).map(IrrKind::Steinberg));
                for j1 in 0..m {
                    for j2 in j1 + 1..m {
                        out.push(IrrKind::Principal(j1, j2));
                    }
                }
                for j in 0..n {
                    let twin = self.cuspidal_twin(j);
                    if twin != j && j < twin {
                        out.push(IrrKind::Cuspidal(j));
                    }
                }
            }
            Family::Sl => {
                out.push(IrrKind::Trivial);
                out.push(IrrKind::Sigma);
                out.extend((1..=(q - 3) / 2).map(IrrKind::SlPrincipal));
                out.extend((1..=(q - 1) / 2).map(IrrKind::SlCuspidal));
                out.extend([
                    IrrKind::UPlus,
                    IrrKind::UMinus,
                    IrrKind::ZPlus,
                    IrrKind::ZMinus,
                ]);
            }
        }
        out.into_iter().map(|k| self.irr(k)).collect()
    }

    /// Index of μ^q (GL) or μ^{-q} (GU) for μ of index j on F_{q²}^×.
    fn cuspidal_twin(&self, j: u32) -> u32 {
        let q = self.q() as u64;
        let n = q * q - 1;
        let t = match self.family {
            Family::Gu => (n - (q * j as u64) % n) % n,
            _ => (q * j as u64) % n,
        };
        t as u32
    }

    pub fn class_size(&self, c: &ClassLabel) -> u64 {
        let q = self.q() as u64;
        match (self.family, c.kind) {
            (_, ClassKind::Central(_)) => 1,
            (_, ClassKind::Unipotent(_)) => q * q - 1,
            (_, ClassKind::SlUnipotent { .. }) => (q * q - 1) / 2,
            (Family::Gl | Family::Sl, ClassKind::Split(..)) => q * (q + 1),
            (Family::Gl | Family::Sl, ClassKind::Nonsplit(_)) => q * (q - 1),
            (Family::Gu, ClassKind::Split(..)) => q * (q - 1),
            (Family::Gu, ClassKind::Nonsplit(_)) => q * (q + 1),
        }
    }

    pub fn degree(&self, chi: &IrrLabel) -> u64 {
        let q = self.q() as u64;
        match (self.family, chi.kind) {
            (_, IrrKind::Linear(_) | IrrKind::Trivial) => 1,
            (_, IrrKind::Steinberg(_) | IrrKind::Sigma) => q,
            (Family::Gl, IrrKind::Cuspidal(_)) => q - 1,
            (Family::Gl, IrrKind::Principal(..)) => q + 1,
            (Family::Gu, IrrKind::Cuspidal(_)) => q + 1,
            (Family::Gu, IrrKind::Principal(..)) => q - 1,
            (_, IrrKind::SlPrincipal(_)) => q + 1,
            (_, IrrKind::SlCuspidal(_)) => q - 1,
            (_, IrrKind::UPlus | IrrKind::UMinus) => (q - 1) / 2,
            (_, IrrKind::ZPlus | IrrKind::ZMinus) => q.div_ceil(2),
            _ => unreachable!("label {chi} does not belong to {}", self.family),
        }
    }

    /// Common root order of all character values: q²-1, times p for SL
    /// (the Table 5 irrationalities live in Q(ζ_p)).
    pub fn root_order(&self) -> u32 {
        let n = self.q() * self.q() - 1;
        match self.family {
            Family::Sl => n * self.tower.p(),
            _ => n,
        }
    }

    /// χ(c) as an exact sum. For SL, U± and Z± are only tabulated on ±I and
    /// the four unipotent classes; elsewhere this returns `Untabulated` (see
    /// [`Group::assembled_char_value`]).
    pub fn char_value(&self, chi: &IrrLabel, c: &ClassLabel) -> Result<CycSum> {
        let terms = self.char_terms(chi, c, false)?;
        Ok(self.terms_to_sum(&terms))
    }

    /// Like [`Group::char_value`] but fills the SL U±/Z± gaps with the
    /// values forced by U⁺+U⁻ = π[μ_s] and Z⁺+Z⁻ = I[ζ,1] restricted.
    pub fn assembled_char_value(&self, chi: &IrrLabel, c: &ClassLabel) -> Result<CycSum> {
        let terms = self.char_terms(chi, c, true)?;
        Ok(self.terms_to_sum(&terms))
    }

    pub(crate) fn terms_to_sum(&self, terms: &[(i64, u64)]) -> CycSum {
        let mut s = CycSum::zero(self.root_order());
        for &(c, e) in terms {
            s.add_root(e, c);
        }
        s
    }

    /// χ(t)/χ(1) for the central involution t; always ±1.
    pub fn central_sign(&self, chi: &IrrLabel) -> Result<i64> {
        let v = self
            .assembled_char_value(chi, &self.central_involution())?
            .integer_part()?;
        Ok(v / self.degree(chi) as i64)
    }

    pub fn inverse_class(&self, c: &ClassLabel) -> ClassLabel {
        let e = self.ext();
        let inv = |x: Fe| e.inv(x).expect("class parameters are units");
        let kind = match c.kind {
            ClassKind::Central(x) => ClassKind::Central(inv(x)),
            ClassKind::Unipotent(x) => ClassKind::Unipotent(inv(x)),
            ClassKind::SlUnipotent { sign, nonsquare } => {
                // (sI + N)^{-1} = sI - N, and -1 flips square class iff q ≡ 3 mod 4
                ClassKind::SlUnipotent {
                    sign,
                    nonsquare: nonsquare ^ (self.q() % 4 == 3),
                }
            }
            ClassKind::Split(x, y) => self.split(inv(x), inv(y)),
            ClassKind::Nonsplit(z) => ClassKind::Nonsplit(self.canonical_nonsplit(inv(z))),
        };
        self.class(kind)
    }

    /// Order of any element of the class.
    pub fn class_element_order(&self, c: &ClassLabel) -> u64 {
        let e = self.ext();
        let ord = |x: Fe| e.mul_order(x).expect("unit") as u64;
        let p = self.tower.p() as u64;
        match c.kind {
            ClassKind::Central(x) => ord(x),
            ClassKind::Unipotent(x) => p * ord(x),
            ClassKind::SlUnipotent { sign, .. } => p * if sign == 1 { 1 } else { 2 },
            ClassKind::Split(x, y) => num_integer::lcm(ord(x), ord(y)),
            ClassKind::Nonsplit(z) => ord(z),
        }
    }

    pub fn contains(&self, m: &Mat2) -> bool {
        let f = self.matrix_field();
        let det = m.det(f);
        match self.family {
            Family::Gl => !det.is_zero(),
            Family::Sl => det == Fe::ONE,
            Family::Gu => {
                !det.is_zero() && m.conj_transpose(f, self.q()).mul(f, m) == Mat2::identity()
            }
        }
    }

    /// The canonical class label of a group element.
    pub fn classify(&self, m: &Mat2) -> Result<ClassLabel> {
        if !self.contains(m) {
            return Err(Error::NotInGroupMatrix(m.format(self.matrix_field())));
        }
        let t = &self.tower;
        let e = t.ext();
        let f = self.matrix_field();
        // lift matrix-field values into the extension
        let up = |x: Fe| {
            if self.family == Family::Gu {
                x
            } else {
                t.embed(x)
            }
        };
        let tr = up(m.trace(f));
        let det = up(m.det(f));
        let disc = e.sub(e.mul(tr, tr), e.mul(e.from_int(4), det));
        if disc.is_zero() {
            let x = e.half(tr);
            if m.is_scalar() {
                return Ok(self.class(ClassKind::Central(x)));
            }
            if self.family != Family::Sl {
                return Ok(self.class(ClassKind::Unipotent(x)));
            }
            let b = t.base();
            let s = b.half(m.trace(f));
            let n = m.sub(f, &Mat2::scalar(s));
            let beta = if n.b.is_zero() { b.neg(n.c) } else { n.b };
            let sign = if s == Fe::ONE { 1 } else { -1 };
            return Ok(self.class(ClassKind::SlUnipotent {
                sign,
                nonsquare: !b.is_square(beta)?,
            }));
        }
        let root = e.sqrt(disc).ok_or_else(|| {
            Error::NotInGroupMatrix(format!("eigenvalues outside F_q²: {}", m.format(f)))
        })?;
        let r1 = e.half(e.add(tr, root));
        let r2 = e.half(e.sub(tr, root));
        let small = |z: Fe| match self.family {
            Family::Gu => t.in_unit_circle(z),
            _ => t.in_base(z),
        };
        let kind = if small(r1) && small(r2) {
            self.split(r1, r2)
        } else {
            ClassKind::Nonsplit(self.canonical_nonsplit(r1))
        };
        Ok(self.class(kind))
    }

    /// Every group element exactly once, in a deterministic order.
    pub fn enumerate(&self, bound: u64) -> Result<Vec<Mat2>> {
        let order = self.order();
        if order > bound {
            return Err(Error::BoundExceeded { order, bound });
        }
        let f = self.matrix_field();
        let mut out = Vec::with_capacity(order as usize);
        match self.family {
            Family::Gl | Family::Sl => {
                let els: Vec<Fe> = f.elements().collect();
                for &a in &els {
                    for &b in &els {
                        for &c in &els {
                            for &d in &els {
                                let m = Mat2::new(a, b, c, d);
                                if self.contains(&m) {
                                    out.push(m);
                                }
                            }
                        }
                    }
                }
            }
            Family::Gu => {
                // columns (a,c) of norm one, second column u·(-c^q, a^q) with u ∈ E
                let t = &self.tower;
                let q = self.q() as i64;
                let circle = t.unit_circle();
                for a in f.elements() {
                    for c in f.elements() {
                        let n = f.add(f.pow(a, q + 1), f.pow(c, q + 1));
                        if n != Fe::ONE {
                            continue;
                        }
                        for &u in &circle {
                            let b = f.neg(f.mul(u, f.pow(c, q)));
                            let d = f.mul(u, f.pow(a, q));
                            out.push(Mat2::new(a, b, c, d));
                        }
                    }
                }
            }
        }
        debug_assert_eq!(out.len() as u64, order);
        Ok(out)
    }

    /// An explicit element of the class, when one is cheap to write down.
    pub fn class_representative(&self, c: &ClassLabel) -> Option<Mat2> {
        let t = &self.tower;
        if self.family == Family::Gu {
            return match c.kind {
                ClassKind::Central(x) => Some(Mat2::scalar(x)),
                ClassKind::Split(x, y) => Some(Mat2::diag(x, y)),
                _ => None,
            };
        }
        let b = t.base();
        let down = |x: Fe| t.restrict(x).expect("parameter lies in the base field");
        Some(match c.kind {
            ClassKind::Central(x) => Mat2::scalar(down(x)),
            ClassKind::Unipotent(x) => Mat2::new(down(x), Fe::ONE, Fe::ZERO, down(x)),
            ClassKind::SlUnipotent { sign, nonsquare } => {
                let s = if sign == 1 { Fe::ONE } else { b.minus_one() };
                let beta = if nonsquare { t.delta() } else { Fe::ONE };
                Mat2::new(s, beta, Fe::ZERO, s)
            }
            ClassKind::Split(x, y) => Mat2::diag(down(x), down(y)),
            ClassKind::Nonsplit(z) => {
                let (x, y) = t.coordinates(z);
                let (x, y) = (down(x), down(y));
                Mat2::new(x, b.mul(t.delta(), y), y, x)
            }
        })
    }
}
