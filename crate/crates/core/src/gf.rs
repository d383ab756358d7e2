//! Finite fields of odd characteristic and the quadratic tower F_q ⊂ F_{q²}.
//!
//! Elements are stored in discrete-log form against a fixed generator.
//! Multiplication is exponent addition; addition goes through a Zech table
//! (`1 + g^a = g^{zech[a]}`), so both are O(1) lookups.

use std::fmt;

use crate::error::{Error, Result};

/// Largest field order we are willing to tabulate.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// A field element. `Fe::ZERO` is zero and `Fe(a + 1)` is `g^a` for the
/// owning field's generator `g`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Raw encoding: 0 for zero, `log + 1` otherwise.
    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn from_raw(raw: u32) -> Fe {
        Fe(raw)
    }
}

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            write!(f, "0")
        } else {
            write!(f, "g^{}", self.0 - 1)
        }
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Polynomial arithmetic over F_p modulo a monic modulus; elements are
/// indexed by their base-p digit expansion (digit i = coefficient of x^i).
struct PolyRing {
    p: u32,
    k: u32,
    modulus: Vec<u32>,
}

impl PolyRing {
    fn digits(&self, mut idx: u32) -> Vec<u32> {
        let mut out = vec![0; self.k as usize];
        for d in out.iter_mut() {
            *d = idx % self.p;
            idx /= self.p;
        }
        out
    }

    fn index(&self, digits: &[u32]) -> u32 {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.index(&sum)
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (self.digits(a), self.digits(b));
        let k = self.k as usize;
        let p = self.p as u64;
        let mut prod = vec![0u64; 2 * k];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // reduce using x^k = -(m_0 + ... + m_{k-1} x^{k-1})
        for deg in (k..2 * k).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                let t = deg - k + i;
                prod[t] = (prod[t] + (p - c) * m as u64) % p;
            }
        }
        let low: Vec<u32> = prod[..k].iter().map(|&c| c as u32).collect();
        self.index(&low)
    }
}

/// Trial division of a monic polynomial (low-to-high coefficients) by all
/// monic polynomials of degree 1..=deg/2.
fn is_irreducible(p: u32, f: &[u32]) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut t = idx;
            for _ in 0..d {
                g.push((t % p as u64) as u32);
                t /= p as u64;
            }
            g.push(1);
            if divides(p, &g, f) {
                return false;
            }
        }
    }
    true
}

fn divides(p: u32, g: &[u32], f: &[u32]) -> bool {
    let mut r: Vec<u64> = f.iter().map(|&c| c as u64).collect();
    let dg = g.len() - 1;
    let p = p as u64;
    for top in (dg..r.len()).rev() {
        let c = r[top] % p;
        if c == 0 {
            continue;
        }
        for (i, &gi) in g.iter().enumerate() {
            let t = top - dg + i;
            r[t] = (r[t] + (p - c) * gi as u64) % p;
        }
    }
    r[..dg].iter().all(|&c| c % p == 0)
}

/// Lowest monic irreducible of degree k, ordered by the base-p integer of
/// its lower coefficients.
fn lowest_irreducible(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(k);
    for idx in 0..count {
        let mut f = Vec::with_capacity(k as usize + 1);
        let mut t = idx;
        for _ in 0..k {
            f.push((t % p as u64) as u32);
            t /= p as u64;
        }
        f.push(1);
        if is_irreducible(p, &f) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// The finite field F_q, q = p^k, p odd.
#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    /// exp[a] = polynomial index of g^a
    exp: Vec<u32>,
    /// log[idx] = a with g^a = idx (idx = 0 unused)
    log: Vec<u32>,
    /// zech[a] = 1 + g^a
    zech: Vec<Fe>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {}", self.p, self.k, self.modulus_string())
    }
}

impl FiniteField {
    /// F_{p^k} with the lowest irreducible modulus and the generator of
    /// smallest polynomial index.
    pub fn new(p: u32, k: u32) -> Result<Self> {
        Self::new_with(p, k, |_| true)
    }

    /// Like [`FiniteField::new`], but takes the first generator (in
    /// polynomial-index order) whose field passes `accept`.
    pub fn new_with(p: u32, k: u32, accept: impl Fn(&FiniteField) -> bool) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::BadCharacteristic(p));
        }
        if k == 0 {
            return Err(Error::BadDegree);
        }
        let q64 = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
        if q64 > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge(q64));
        }
        let q = q64 as u32;
        let ring = PolyRing {
            p,
            k,
            modulus: lowest_irreducible(p, k),
        };
        for cand in 1..q {
            let Some(exp) = Self::power_table(&ring, cand, q) else {
                continue;
            };
            let field = Self::from_exp_table(&ring, q, exp);
            if accept(&field) {
                return Ok(field);
            }
        }
        Err(Error::Unsupported(format!(
            "no acceptable generator for GF({p}^{k})"
        )))
    }

    /// Powers of `cand` if it generates the multiplicative group.
    fn power_table(ring: &PolyRing, cand: u32, q: u32) -> Option<Vec<u32>> {
        let n = (q - 1) as usize;
        let mut exp = Vec::with_capacity(n);
        let mut cur = 1u32;
        for i in 0..n {
            if i > 0 && cur == 1 {
                return None;
            }
            exp.push(cur);
            cur = ring.mul(cur, cand);
        }
        (cur == 1).then_some(exp)
    }

    fn from_exp_table(ring: &PolyRing, q: u32, exp: Vec<u32>) -> Self {
        let n = q - 1;
        let mut log = vec![0u32; q as usize];
        for (a, &idx) in exp.iter().enumerate() {
            log[idx as usize] = a as u32;
        }
        let zech = (0..n)
            .map(|a| {
                let s = ring.add(exp[a as usize], 1);
                if s == 0 {
                    Fe::ZERO
                } else {
                    Fe(log[s as usize] + 1)
                }
            })
            .collect();
        FiniteField {
            p: ring.p,
            k: ring.k,
            q,
            modulus: ring.modulus.clone(),
            exp,
            log,
            zech,
        }
    }

    fn ring(&self) -> PolyRing {
        PolyRing {
            p: self.p,
            k: self.k,
            modulus: self.modulus.clone(),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Order of the multiplicative group, q - 1.
    pub fn units_order(&self) -> u32 {
        self.q - 1
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> Fe {
        Fe(2.min(self.q))
    }

    pub fn mul(&self, x: Fe, y: Fe) -> Fe {
        if x.0 == 0 || y.0 == 0 {
            return Fe::ZERO;
        }
        let n = self.q - 1;
        Fe(((x.0 - 1) as u64 + (y.0 - 1) as u64) as u32 % n + 1)
    }

    pub fn add(&self, x: Fe, y: Fe) -> Fe {
        if x.0 == 0 {
            return y;
        }
        if y.0 == 0 {
            return x;
        }
        let n = self.q - 1;
        let (a, b) = (x.0 - 1, y.0 - 1);
        let z = self.zech[((b + n - a) % n) as usize];
        if z.0 == 0 {
            Fe::ZERO
        } else {
            Fe((a + z.0 - 1) % n + 1)
        }
    }

    pub fn neg(&self, x: Fe) -> Fe {
        self.mul(x, self.minus_one())
    }

    pub fn sub(&self, x: Fe, y: Fe) -> Fe {
        self.add(x, self.neg(y))
    }

    pub fn minus_one(&self) -> Fe {
        Fe((self.q - 1) / 2 + 1)
    }

    pub fn inv(&self, x: Fe) -> Option<Fe> {
        let a = self.log(x)?;
        let n = self.q - 1;
        Some(Fe((n - a) % n + 1))
    }

    pub fn div(&self, x: Fe, y: Fe) -> Option<Fe> {
        Some(self.mul(x, self.inv(y)?))
    }

    /// x^e for any integer e; zero to a negative power is zero.
    pub fn pow(&self, x: Fe, e: i64) -> Fe {
        match self.log(x) {
            None => {
                if e == 0 {
                    Fe::ONE
                } else {
                    Fe::ZERO
                }
            }
            Some(a) => {
                let n = (self.q - 1) as i64;
                Fe(((a as i64 * e.rem_euclid(n)) % n) as u32 + 1)
            }
        }
    }

    /// Discrete log base the generator, `None` for zero.
    pub fn log(&self, x: Fe) -> Option<u32> {
        (x.0 != 0).then(|| x.0 - 1)
    }

    pub fn gen_pow(&self, a: u64) -> Fe {
        Fe((a % (self.q - 1) as u64) as u32 + 1)
    }

    /// The image of the integer n in the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        let r = n.rem_euclid(self.p as i64) as u32;
        self.from_poly_index(r)
    }

    pub fn from_poly_index(&self, idx: u32) -> Fe {
        assert!(idx < self.q, "polynomial index out of range");
        if idx == 0 {
            Fe::ZERO
        } else {
            Fe(self.log[idx as usize] + 1)
        }
    }

    pub fn poly_index(&self, x: Fe) -> u32 {
        match self.log(x) {
            None => 0,
            Some(a) => self.exp[a as usize],
        }
    }

    pub fn frobenius(&self, x: Fe) -> Fe {
        self.pow(x, self.p as i64)
    }

    /// Whether a nonzero element is a square (even discrete log).
    pub fn is_square(&self, x: Fe) -> Result<bool> {
        self.log(x).map(|a| a % 2 == 0).ok_or(Error::ZeroElement)
    }

    /// The square root with the smaller discrete log, if one exists.
    pub fn sqrt(&self, x: Fe) -> Option<Fe> {
        match self.log(x) {
            None => Some(Fe::ZERO),
            Some(a) if a % 2 == 0 => Some(Fe(a / 2 + 1)),
            Some(_) => None,
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn mul_order(&self, x: Fe) -> Option<u32> {
        let a = self.log(x)?;
        let n = self.q - 1;
        Some(n / num_integer::gcd(a, n))
    }

    /// All elements: zero first, then g^0, g^1, ...
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.q).map(Fe)
    }

    /// Nonzero elements in discrete-log order.
    pub fn units(&self) -> impl Iterator<Item = Fe> {
        (1..self.q).map(Fe)
    }

    pub fn half(&self, x: Fe) -> Fe {
        let two_inv = self.inv(self.from_int(2)).expect("odd characteristic");
        self.mul(x, two_inv)
    }

    /// Human-readable polynomial form, e.g. `x+2`; plain integers for
    /// prime fields.
    pub fn format(&self, x: Fe) -> String {
        format_poly(&self.ring().digits(self.poly_index(x)), "x")
    }

    pub fn modulus_string(&self) -> String {
        format_poly(&self.modulus, "x")
    }

    #[cfg(test)]
    fn poly_mul(&self, x: Fe, y: Fe) -> Fe {
        let r = self.ring();
        self.from_poly_index(r.mul(self.poly_index(x), self.poly_index(y)))
    }

    #[cfg(test)]
    fn poly_add(&self, x: Fe, y: Fe) -> Fe {
        let r = self.ring();
        self.from_poly_index(r.add(self.poly_index(x), self.poly_index(y)))
    }
}

fn format_poly(coeffs: &[u32], var: &str) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let term = match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => var.to_string(),
            (1, c) => format!("{c}{var}"),
            (i, 1) => format!("{var}^{i}"),
            (i, c) => format!("{c}{var}^{i}"),
        };
        terms.push(term);
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// F_q ⊂ F_{q²} with a compatible pair of generators: the base generator
/// embeds as `γ^{q+1}` where `γ` generates the extension. Consequently the
/// extension log of an embedded element is `(q+1)` times its base log.
#[derive(Clone, Debug)]
pub struct FieldTower {
    base: FiniteField,
    ext: FiniteField,
    delta: Fe,
    sqrt_delta: Fe,
}

/// Build the tower over F_{p^k}.
pub fn make_tower(p: u32, k: u32) -> Result<FieldTower> {
    if p == 2 || !is_prime(p) {
        return Err(Error::BadCharacteristic(p));
    }
    if k == 0 {
        return Err(Error::BadDegree);
    }
    let ext = FiniteField::new(p, 2 * k)?;
    let q = (p as u64).pow(k);
    let base = FiniteField::new_with(p, k, |cand| {
        // g^a -> γ^{(q+1)a} must respect 1 + x
        (0..q - 1).all(|a| {
            let lhs = cand.zech[a as usize];
            let rhs = ext.add(Fe::ONE, ext.gen_pow((q + 1) * a));
            embed_raw(lhs, q) == rhs
        })
    })?;
    let delta = base.gen_pow(1);
    let sqrt_delta = ext.gen_pow(q.div_ceil(2));
    Ok(FieldTower {
        base,
        ext,
        delta,
        sqrt_delta,
    })
}

fn embed_raw(x: Fe, q: u64) -> Fe {
    if x.0 == 0 {
        Fe::ZERO
    } else {
        Fe(((q + 1) * (x.0 - 1) as u64) as u32 + 1)
    }
}

impl FieldTower {
    pub fn base(&self) -> &FiniteField {
        &self.base
    }

    pub fn ext(&self) -> &FiniteField {
        &self.ext
    }

    pub fn q(&self) -> u32 {
        self.base.order()
    }

    pub fn p(&self) -> u32 {
        self.base.characteristic()
    }

    /// The fixed non-square of the base field.
    pub fn delta(&self) -> Fe {
        self.delta
    }

    pub fn sqrt_delta(&self) -> Fe {
        self.sqrt_delta
    }

    pub fn embed(&self, x: Fe) -> Fe {
        embed_raw(x, self.q() as u64)
    }

    pub fn in_base(&self, z: Fe) -> bool {
        match self.ext.log(z) {
            None => true,
            Some(a) => a % (self.q() + 1) == 0,
        }
    }

    pub fn restrict(&self, z: Fe) -> Option<Fe> {
        match self.ext.log(z) {
            None => Some(Fe::ZERO),
            Some(a) if a % (self.q() + 1) == 0 => {
                Some(self.base.gen_pow((a / (self.q() + 1)) as u64))
            }
            Some(_) => None,
        }
    }

    /// z ↦ z^q on the extension.
    pub fn conj(&self, z: Fe) -> Fe {
        self.ext.pow(z, self.q() as i64)
    }

    /// Nm(z) = z^{q+1}, as a base-field element.
    pub fn norm(&self, z: Fe) -> Fe {
        let n = self.ext.pow(z, self.q() as i64 + 1);
        self.restrict(n).expect("norm lands in the base field")
    }

    /// All z ∈ F_{q²}^× with z^{q+1} = x.
    pub fn norm_fiber(&self, x: Fe) -> Result<Vec<Fe>> {
        if x.is_zero() {
            return Err(Error::ZeroElement);
        }
        Ok(self.ext.units().filter(|&z| self.norm(z) == x).collect())
    }

    /// The norm-one subgroup E (order q + 1) in log order.
    pub fn unit_circle(&self) -> Vec<Fe> {
        let q = self.q() as u64;
        (0..=q).map(|b| self.ext.gen_pow((q - 1) * b)).collect()
    }

    pub fn in_unit_circle(&self, z: Fe) -> bool {
        match self.ext.log(z) {
            None => false,
            Some(a) => a % (self.q() - 1) == 0,
        }
    }

    /// F_q^× embedded in the extension, in base-log order.
    pub fn base_units(&self) -> Vec<Fe> {
        self.base.units().map(|x| self.embed(x)).collect()
    }

    /// F_q embedded in the extension, zero first.
    pub fn base_elements(&self) -> Vec<Fe> {
        self.base.elements().map(|x| self.embed(x)).collect()
    }

    /// Components (x, y) of z = x + y√Δ, both in the embedded base field.
    pub fn coordinates(&self, z: Fe) -> (Fe, Fe) {
        let e = &self.ext;
        let zc = self.conj(z);
        let x = e.half(e.add(z, zc));
        let two_root = e.add(self.sqrt_delta, self.sqrt_delta);
        let y = e.div(e.sub(z, zc), two_root).expect("√Δ is nonzero");
        (x, y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    #[test]
    fn rejects_even_and_composite_characteristic() {
        assert_eq!(make_tower(2, 1).unwrap_err(), Error::BadCharacteristic(2));
        assert_eq!(make_tower(9, 1).unwrap_err(), Error::BadCharacteristic(9));
        assert_eq!(
            FiniteField::new(15, 1).unwrap_err(),
            Error::BadCharacteristic(15)
        );
        assert_eq!(FiniteField::new(3, 0).unwrap_err(), Error::BadDegree);
    }

    #[test]
    fn generator_has_full_order() {
        for (p, k) in [
            (3, 1),
            (5, 1),
            (7, 1),
            (3, 2),
            (5, 2),
            (7, 2),
            (3, 4),
            (11, 2),
        ] {
            let f = FiniteField::new(p, k).unwrap();
            assert_eq!(f.mul_order(f.generator()), Some(f.order() - 1));
            let powers: BTreeSet<_> = (0..f.order() - 1).map(|a| f.gen_pow(a as u64)).collect();
            assert_eq!(powers.len() as u32, f.order() - 1);
        }
    }

    #[test]
    fn log_and_polynomial_arithmetic_agree_exhaustively() {
        for (p, k) in [
            (3, 1),
            (5, 1),
            (7, 1),
            (3, 2),
            (5, 2),
            (7, 2),
            (3, 3),
            (3, 4),
            (11, 2),
        ] {
            let f = FiniteField::new(p, k).unwrap();
            assert!(f.order() <= 121);
            for x in f.elements() {
                for y in f.elements() {
                    assert_eq!(f.mul(x, y), f.poly_mul(x, y), "{f:?}: {x:?}*{y:?}");
                    assert_eq!(f.add(x, y), f.poly_add(x, y), "{f:?}: {x:?}+{y:?}");
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_the_prime_field() {
        for (p, k) in [(3, 2), (5, 2), (3, 4), (7, 2)] {
            let f = FiniteField::new(p, k).unwrap();
            let fixed: Vec<_> = f.elements().filter(|&x| f.frobenius(x) == x).collect();
            assert_eq!(fixed.len() as u32, p);
            for x in f.elements() {
                for y in f.elements() {
                    assert_eq!(
                        f.frobenius(f.add(x, y)),
                        f.add(f.frobenius(x), f.frobenius(y))
                    );
                    assert_eq!(
                        f.frobenius(f.mul(x, y)),
                        f.mul(f.frobenius(x), f.frobenius(y))
                    );
                }
            }
        }
    }

    #[test]
    fn modulus_is_lowest_irreducible() {
        let f = FiniteField::new(3, 2).unwrap();
        // x^2 + 1 is the first irreducible monic quadratic over F_3
        assert_eq!(f.modulus(), &[1, 0, 1]);
        assert_eq!(f.modulus_string(), "x^2+1");
        assert_eq!(FiniteField::new(5, 1).unwrap().modulus_string(), "x");
    }

    #[test]
    fn tower_over_f3() {
        let t = make_tower(3, 1).unwrap();
        assert_eq!(t.q(), 3);
        assert_eq!(t.ext().order(), 9);
        assert_eq!(t.base().poly_index(t.delta()), 2);
    }

    #[test]
    fn squares_mod_five() {
        let f = FiniteField::new(5, 1).unwrap();
        let sq: BTreeSet<u32> = f
            .units()
            .filter(|&x| f.is_square(x).unwrap())
            .map(|x| f.poly_index(x))
            .collect();
        assert_eq!(sq, BTreeSet::from([1, 4]));
        let t = make_tower(5, 1).unwrap();
        let nsq: BTreeSet<u32> = t
            .base()
            .units()
            .filter(|&x| !t.base().is_square(x).unwrap())
            .map(|x| t.base().poly_index(x))
            .collect();
        assert_eq!(nsq, BTreeSet::from([2, 3]));
    }

    #[test]
    fn is_square_examples() {
        let f3 = FiniteField::new(3, 1).unwrap();
        assert!(f3.is_square(Fe::ONE).unwrap());
        assert!(!f3.is_square(f3.from_int(2)).unwrap());
        let f5 = FiniteField::new(5, 1).unwrap();
        assert!(f5.is_square(f5.from_int(4)).unwrap());
        assert_eq!(f5.is_square(Fe::ZERO), Err(Error::ZeroElement));
    }

    #[test]
    fn tower_over_f9_has_nine_frobenius_fixed_points() {
        let t = make_tower(3, 2).unwrap();
        assert_eq!(t.q(), 9);
        assert_eq!(t.ext().order(), 81);
        let fixed = t.ext().elements().filter(|&z| t.conj(z) == z).count();
        assert_eq!(fixed, 9);
    }

    fn check_tower(t: &FieldTower) {
        let (b, e) = (t.base(), t.ext());
        for x in b.elements() {
            for y in b.elements() {
                assert_eq!(t.embed(b.add(x, y)), e.add(t.embed(x), t.embed(y)));
                assert_eq!(t.embed(b.mul(x, y)), e.mul(t.embed(x), t.embed(y)));
            }
        }
        assert_eq!(t.embed(t.delta()), e.mul(t.sqrt_delta(), t.sqrt_delta()));
        assert!(!b.is_square(t.delta()).unwrap());
        let image: BTreeSet<_> = b.elements().map(|x| t.embed(x)).collect();
        let fixed: BTreeSet<_> = e.elements().filter(|&z| t.conj(z) == z).collect();
        assert_eq!(image, fixed);
        for z in e.units() {
            assert!(t.in_base(e.pow(z, t.q() as i64 + 1)));
            let (x, y) = t.coordinates(z);
            assert!(t.in_base(x) && t.in_base(y));
            assert_eq!(e.add(x, e.mul(y, t.sqrt_delta())), z);
        }
    }

    #[test]
    fn tower_invariants() {
        for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1)] {
            check_tower(&make_tower(p, k).unwrap());
        }
    }

    #[test]
    fn norm_fibers() {
        let t = make_tower(3, 1).unwrap();
        let one = t.base().from_int(1);
        let fib = t.norm_fiber(one).unwrap();
        assert_eq!(fib.len(), 4);
        let in_base: BTreeSet<_> = fib.iter().filter_map(|&z| t.restrict(z)).collect();
        assert_eq!(in_base, BTreeSet::from([one, t.base().minus_one()]));
        let two = t.base().from_int(2);
        let fib = t.norm_fiber(two).unwrap();
        assert_eq!(fib.len(), 4);
        assert!(fib.iter().all(|&z| !t.in_base(z)));
        assert_eq!(t.norm_fiber(Fe::ZERO), Err(Error::ZeroElement));

        // q = 5, x = 4: oracle enumerates F_25^× and filters z^6 = 4
        let t = make_tower(5, 1).unwrap();
        let four = t.ext().from_int(4);
        let oracle: Vec<Fe> = t
            .ext()
            .units()
            .filter(|&z| t.ext().pow(z, 6) == four)
            .collect();
        let fib = t.norm_fiber(t.base().from_int(4)).unwrap();
        assert_eq!(fib, oracle);
        assert_eq!(fib.len(), 6);
        let meet: BTreeSet<u32> = fib
            .iter()
            .filter_map(|&z| t.restrict(z))
            .map(|x| t.base().poly_index(x))
            .collect();
        assert_eq!(meet, BTreeSet::from([2, 3]));
    }

    #[test]
    fn squares_are_index_two_and_norm_is_surjective() {
        for q in [3u32, 5, 7, 9, 11] {
            let (p, k) = if q == 9 { (3, 2) } else { (q, 1) };
            let t = make_tower(p, k).unwrap();
            let b = t.base();
            let squares = b.units().filter(|&x| b.is_square(x).unwrap()).count() as u32;
            assert_eq!(squares, (q - 1) / 2);
            for x in b.units() {
                for y in b.units() {
                    let both = b.is_square(x).unwrap() == b.is_square(y).unwrap();
                    assert_eq!(b.is_square(b.mul(x, y)).unwrap(), both);
                }
            }
            if q <= 9 {
                for x in b.units() {
                    assert_eq!(t.norm_fiber(x).unwrap().len() as u32, q + 1);
                }
            }
        }
    }

    #[test]
    fn twisted_norm_onto_unit_circle() {
        for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let t = make_tower(p, k).unwrap();
            let q = t.q() as i64;
            let e = t.ext();
            let circle: BTreeSet<_> = t.unit_circle().into_iter().collect();
            assert_eq!(circle.len() as i64, q + 1);
            let mut counts = std::collections::BTreeMap::new();
            for z in e.units() {
                let w = e.pow(z, 1 - q);
                assert!(circle.contains(&w));
                *counts.entry(w).or_insert(0) += 1;
                if w == Fe::ONE {
                    assert!(t.in_base(z));
                }
            }
            assert_eq!(counts.len(), circle.len());
            assert!(counts.values().all(|&c| c == q - 1));
        }
    }

    #[test]
    fn nonsplit_norm_set_decomposes() {
        for p in [3u32, 5, 7] {
            let t = make_tower(p, 1).unwrap();
            let (b, e) = (t.base(), t.ext());
            let non_squares: Vec<Fe> = b.units().filter(|&x| !b.is_square(x).unwrap()).collect();
            let lhs: BTreeSet<Fe> = e
                .units()
                .filter(|&z| !t.in_base(z))
                .filter(|&z| {
                    let n = t.norm(z);
                    n == Fe::ONE || non_squares.contains(&n)
                })
                .collect();
            let mut rhs: BTreeSet<Fe> = BTreeSet::new();
            for &x in &non_squares {
                rhs.extend(t.norm_fiber(x).unwrap());
            }
            let one_fiber = t.norm_fiber(Fe::ONE).unwrap();
            rhs.extend(
                one_fiber
                    .into_iter()
                    .filter(|&z| z != Fe::ONE && z != e.minus_one()),
            );
            assert_eq!(lhs, rhs);
        }
    }

    proptest! {
        #[test]
        fn field_axioms(a in 0u32..49, b in 0u32..49, c in 0u32..49) {
            let f = FiniteField::new(7, 2).unwrap();
            let (x, y, z) = (Fe(a), Fe(b), Fe(c));
            prop_assert_eq!(f.add(x, y), f.add(y, x));
            prop_assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
            prop_assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
            prop_assert_eq!(f.sub(f.add(x, y), y), x);
            if !x.is_zero() {
                prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), Fe::ONE);
            }
        }
    }
}
