//! Multiplicative characters of cyclic groups and exact sums of roots of
//! unity.
//!
//! A character of a cyclic group of order `n` with fixed generator `g` is
//! `g^a ↦ ζ_n^{ja}`, so its values are just exponents. Sums of such values
//! are kept as integer vectors over `Z/n` ([`CycSum`]) and only reduced modulo
//! the cyclotomic polynomial when an exact comparison is needed.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::gf::{Fe, FiniteField};
use crate::scalar::Scalar;

/// The character `g^a ↦ ζ_order^{index·a}` of a cyclic group of order `order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultChar {
    order: u32,
    index: u32,
}

impl MultChar {
    pub fn new(order: u32, index: i64) -> Self {
        assert!(order > 0, "character of the empty group");
        MultChar {
            order,
            index: index.rem_euclid(order as i64) as u32,
        }
    }

    pub fn trivial(order: u32) -> Self {
        MultChar { order, index: 0 }
    }

    /// The unique character of order 2 (n even).
    pub fn quadratic(order: u32) -> Self {
        assert!(
            order.is_multiple_of(2),
            "no quadratic character on a group of odd order"
        );
        MultChar {
            order,
            index: order / 2,
        }
    }

    /// All characters of the group of order `n`, by index.
    pub fn all(order: u32) -> impl Iterator<Item = MultChar> {
        (0..order).map(move |index| MultChar { order, index })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }

    /// Order of the character as an element of the dual group.
    pub fn char_order(&self) -> u32 {
        self.order / self.index.gcd(&self.order)
    }

    pub fn mul(&self, other: &MultChar) -> MultChar {
        assert_eq!(self.order, other.order, "characters of different groups");
        MultChar::new(self.order, self.index as i64 + other.index as i64)
    }

    pub fn pow(&self, e: i64) -> MultChar {
        MultChar::new(
            self.order,
            (self.index as i64 * e.rem_euclid(self.order as i64)) % self.order as i64,
        )
    }

    pub fn conj(&self) -> MultChar {
        self.pow(-1)
    }

    /// Exponent `e` with `χ(g^a) = ζ_n^e`.
    pub fn exponent(&self, log: u64) -> u32 {
        ((self.index as u64 * (log % self.order as u64)) % self.order as u64) as u32
    }

    /// Whether `g^d` (hence the subgroup it generates) lies in the kernel.
    pub fn trivial_on(&self, d: u64) -> bool {
        self.exponent(d) == 0
    }

    pub fn value(&self, log: u64) -> CycSum {
        CycSum::root(self.order, self.exponent(log) as u64)
    }

    /// Σ χ over group elements given by discrete log.
    pub fn char_sum_logs(&self, logs: impl IntoIterator<Item = u64>) -> CycSum {
        let mut s = CycSum::zero(self.order);
        for a in logs {
            s.add_root(self.exponent(a) as u64, 1);
        }
        s
    }

    /// Σ χ over nonzero elements of `field`, whose unit group must be the
    /// character's group.
    pub fn char_sum(
        &self,
        field: &FiniteField,
        subset: impl IntoIterator<Item = Fe>,
    ) -> Result<CycSum> {
        if field.units_order() != self.order {
            return Err(Error::NotInGroup { order: self.order });
        }
        let mut logs = Vec::new();
        for x in subset {
            logs.push(
                field
                    .log(x)
                    .ok_or(Error::NotInGroup { order: self.order })? as u64,
            );
        }
        Ok(self.char_sum_logs(logs))
    }
}

/// Σ c_a ζ_n^a with integer coefficients.
#[derive(Clone)]
pub struct CycSum {
    n: u32,
    coeffs: Vec<i64>,
}

impl CycSum {
    pub fn zero(n: u32) -> Self {
        assert!(n > 0, "root order must be positive");
        CycSum {
            n,
            coeffs: vec![0; n as usize],
        }
    }

    pub fn int(n: u32, c: i64) -> Self {
        let mut s = Self::zero(n);
        s.coeffs[0] = c;
        s
    }

    /// ζ_n^a.
    pub fn root(n: u32, a: u64) -> Self {
        let mut s = Self::zero(n);
        s.add_root(a, 1);
        s
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn add_root(&mut self, a: u64, coeff: i64) {
        let i = (a % self.n as u64) as usize;
        self.coeffs[i] += coeff;
    }

    pub fn add_int(&mut self, c: i64) {
        self.coeffs[0] += c;
    }

    /// The same number written over ζ_m, where n | m.
    pub fn lift(&self, m: u32) -> CycSum {
        assert!(
            m.is_multiple_of(self.n),
            "cannot lift order {} to {}",
            self.n,
            m
        );
        let step = (m / self.n) as usize;
        let mut out = CycSum::zero(m);
        for (a, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[a * step] = c;
        }
        out
    }

    fn common(&self, other: &CycSum) -> (CycSum, CycSum) {
        if self.n == other.n {
            return (self.clone(), other.clone());
        }
        let m = self.n.lcm(&other.n);
        (self.lift(m), other.lift(m))
    }

    /// Complex conjugate: ζ^a ↦ ζ^{-a}.
    pub fn conj(&self) -> CycSum {
        let n = self.n as usize;
        let mut out = CycSum::zero(self.n);
        for (a, &c) in self.coeffs.iter().enumerate() {
            out.coeffs[(n - a) % n] += c;
        }
        out
    }

    pub fn scale(&self, k: i64) -> CycSum {
        CycSum {
            n: self.n,
            coeffs: self.coeffs.iter().map(|&c| c * k).collect(),
        }
    }

    pub fn eval<T: Scalar>(&self) -> Complex<T> {
        let (re, im) = self.eval_f64();
        Complex::new(T::of(re), T::of(im))
    }

    fn eval_f64(&self) -> (f64, f64) {
        let n = self.n as f64;
        let (mut re, mut im) = (0.0, 0.0);
        for (a, &c) in self.coeffs.iter().enumerate() {
            if c != 0 {
                let t = std::f64::consts::TAU * a as f64 / n;
                re += c as f64 * t.cos();
                im += c as f64 * t.sin();
            }
        }
        (re, im)
    }

    /// Canonical coefficients modulo Φ_n (degree < φ(n)).
    pub fn reduced(&self) -> Vec<i64> {
        let phi = cyclotomic(self.n);
        let deg = phi.len() - 1;
        let mut r = self.coeffs.clone();
        let terms: Vec<(usize, i64)> = phi[..deg]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        for top in (deg..r.len()).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            r[top] = 0;
            let shift = top - deg;
            for &(i, m) in &terms {
                r[shift + i] -= c * m;
            }
        }
        r.truncate(deg);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.reduced().iter().all(|&c| c == 0)
    }

    /// The rational integer this sum equals, or `NonIntegral`.
    pub fn integer_part(&self) -> Result<i64> {
        let (re, im) = self.eval_f64();
        let c = re.round();
        let bad = || Error::NonIntegral { re, im };
        if (re - c).abs() > 1e-6 || im.abs() > 1e-6 {
            return Err(bad());
        }
        let mut diff = self.clone();
        diff.coeffs[0] -= c as i64;
        if diff.is_zero() {
            Ok(c as i64)
        } else {
            Err(bad())
        }
    }
}

impl PartialEq for CycSum {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        (&a - &b).is_zero()
    }
}

impl fmt::Debug for CycSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(a, c)| {
                if a == 0 {
                    c.to_string()
                } else {
                    format!("{c}ζ{}^{a}", self.n)
                }
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl Add for &CycSum {
    type Output = CycSum;
    fn add(self, rhs: &CycSum) -> CycSum {
        let (mut a, b) = self.common(rhs);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }
}

impl AddAssign<&CycSum> for CycSum {
    fn add_assign(&mut self, rhs: &CycSum) {
        if self.n == rhs.n {
            for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *x += y;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl Neg for &CycSum {
    type Output = CycSum;
    fn neg(self) -> CycSum {
        self.scale(-1)
    }
}

impl Sub for &CycSum {
    type Output = CycSum;
    fn sub(self, rhs: &CycSum) -> CycSum {
        self + &(-rhs)
    }
}

impl Mul for &CycSum {
    type Output = CycSum;
    fn mul(self, rhs: &CycSum) -> CycSum {
        let (a, b) = self.common(rhs);
        let n = a.n as usize;
        let mut out = CycSum::zero(a.n);
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                if y != 0 {
                    out.coeffs[(i + j) % n] += x * y;
                }
            }
        }
        out
    }
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients of Φ_n, lowest degree first.
pub fn cyclotomic(n: u32) -> Arc<Vec<i64>> {
    if let Some(p) = cyclotomic_cache().lock().expect("cache lock").get(&n) {
        return p.clone();
    }
    // x^n - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = div_monic(&num, &cyclotomic(d));
        }
    }
    let phi = Arc::new(num);
    cyclotomic_cache()
        .lock()
        .expect("cache lock")
        .insert(n, phi.clone());
    phi
}

fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut r = num.to_vec();
    let mut quot = vec![0i64; num.len() - dn];
    for top in (dn..num.len()).rev() {
        let c = r[top];
        quot[top - dn] = c;
        if c != 0 {
            for (i, &d) in den.iter().enumerate() {
                r[top - dn + i] -= c * d;
            }
        }
    }
    debug_assert!(
        r[..dn].iter().all(|&c| c == 0),
        "inexact cyclotomic division"
    );
    quot
}

/// Legendre symbol (a/p) for an odd prime p.
pub fn legendre(a: i64, p: u32) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    let (mut base, mut e, mut acc) = (a, (p as u64 - 1) / 2, 1u64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// The quadratic Gauss sum Σ (a/p) ζ_p^a, whose square is (-1/p)·p.
pub fn gauss_sum(p: u32) -> CycSum {
    let mut s = CycSum::zero(p);
    for a in 1..p {
        s.add_root(a as u64, legendre(a as i64, p) as i64);
    }
    s
}

/// The Gauss period Σ_{(a/p)=sign} ζ_p^a, equal to (-1 + sign·g)/2.
pub fn gauss_period(p: u32, sign: i32) -> CycSum {
    let mut s = CycSum::zero(p);
    for a in 1..p {
        if legendre(a as i64, p) == sign {
            s.add_root(a as u64, 1);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_tower;
    use proptest::prelude::*;

    #[test]
    fn char_sum_examples() {
        let f = FiniteField::new(5, 1).unwrap();
        let all: Vec<Fe> = f.units().collect();
        let triv = MultChar::trivial(4);
        assert_eq!(
            triv.char_sum(&f, all.clone())
                .unwrap()
                .integer_part()
                .unwrap(),
            4
        );
        for j in 1..4 {
            let s = MultChar::new(4, j).char_sum(&f, all.clone()).unwrap();
            assert_eq!(s.integer_part().unwrap(), 0);
        }
        let squares = [f.from_int(1), f.from_int(4)];
        let s = MultChar::quadratic(4).char_sum(&f, squares).unwrap();
        assert_eq!(s.integer_part().unwrap(), 2);
    }

    #[test]
    fn char_sum_rejects_outsiders() {
        let f = FiniteField::new(5, 1).unwrap();
        let chi = MultChar::quadratic(4);
        assert_eq!(
            chi.char_sum(&f, [Fe::ZERO]).unwrap_err(),
            Error::NotInGroup { order: 4 }
        );
        assert!(MultChar::trivial(6).char_sum(&f, [Fe::ONE]).is_err());
    }

    #[test]
    fn integer_part_examples() {
        assert_eq!(CycSum::int(12, 7).integer_part().unwrap(), 7);
        for n in 2..40 {
            let mut s = CycSum::zero(n);
            for a in 0..n {
                s.add_root(a as u64, 1);
            }
            assert_eq!(s.integer_part().unwrap(), 0, "n = {n}");
        }
        assert!(matches!(
            CycSum::root(4, 1).integer_part(),
            Err(Error::NonIntegral { .. })
        ));
        // √-3 is not an integer
        assert!(gauss_sum(3).integer_part().is_err());
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic(1), vec![-1, 1]);
        assert_eq!(*cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic(12), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2
        assert!(cyclotomic(105).contains(&-2));
        assert_eq!(cyclotomic(2400).len() - 1, 640);
    }

    #[test]
    fn orthogonality_exact() {
        let ns: Vec<u32> = (1..=24).chain([30, 48, 63, 80]).collect();
        for n in ns {
            for i in MultChar::all(n) {
                for j in MultChar::all(n) {
                    let prod = i.mul(&j.conj());
                    let s = prod.char_sum_logs(0..n as u64);
                    let expect = if i == j { n as i64 } else { 0 };
                    assert_eq!(s.integer_part().unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn characters_are_homomorphisms() {
        for n in [8u32, 24, 48, 80] {
            for chi in MultChar::all(n) {
                assert_eq!(chi.exponent(0), 0);
                for a in 0..n as u64 {
                    for b in 0..n as u64 {
                        assert_eq!(chi.exponent(a + b), (chi.exponent(a) + chi.exponent(b)) % n);
                    }
                }
            }
        }
        let chi = MultChar::new(12, 3);
        assert!(chi.trivial_on(4));
        assert!(!chi.trivial_on(2));
        assert_eq!(chi.char_order(), 4);
    }

    #[test]
    fn gauss_sum_squares() {
        for p in [3u32, 5, 7, 11, 13] {
            let g = gauss_sum(p);
            let sign = if p % 4 == 1 { 1 } else { -1 };
            assert_eq!((&g * &g).integer_part().unwrap(), sign * p as i64);
            for s in [1, -1] {
                let lhs = gauss_period(p, s).scale(2);
                let rhs = &CycSum::int(p, -1) + &g.scale(s as i64);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn lifting_preserves_value() {
        let z = CycSum::root(6, 1);
        let w = z.lift(12);
        assert_eq!(z, w);
        assert_eq!(w.coeffs()[2], 1);
        let s = &CycSum::root(4, 1) + &CycSum::root(6, 1);
        assert_eq!(s.order(), 12);
        let v = s.eval::<f64>();
        assert!((v.re - 0.5).abs() < 1e-12 && (v.im - (1.0 + 3f64.sqrt() / 2.0)).abs() < 1e-12);
    }

    fn base_sum(t: &crate::gf::FieldTower, lambda: &MultChar, zs: &[Fe]) -> CycSum {
        let b = t.base();
        lambda.char_sum_logs(zs.iter().map(|&z| b.log(t.norm(z)).unwrap() as u64))
    }

    #[test]
    fn square_sums() {
        for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let t = make_tower(p, k).unwrap();
            let q = t.q();
            for lambda in MultChar::all(q - 1) {
                let s = lambda
                    .char_sum_logs((0..q as u64 - 1).map(|a| 2 * a))
                    .integer_part()
                    .unwrap();
                let squares_in_kernel = lambda.trivial_on(2);
                assert_eq!(s, if squares_in_kernel { q as i64 - 1 } else { 0 });
            }
            // unitary analogue over E (order q + 1, squares Q)
            for lambda in MultChar::all(q + 1) {
                let s = lambda
                    .char_sum_logs((0..q as u64 + 1).map(|a| 2 * a))
                    .integer_part()
                    .unwrap();
                assert_eq!(
                    s,
                    if lambda.trivial_on(2) {
                        q as i64 + 1
                    } else {
                        0
                    }
                );
            }
        }
    }

    #[test]
    fn linear_connection_sums() {
        for p in [3u32, 5, 7] {
            let t = make_tower(p, 1).unwrap();
            let (b, e) = (t.base(), t.ext());
            let q = t.q() as i64;
            let n = e.units_order();
            let set: Vec<Fe> = e
                .units()
                .filter(|&z| !t.in_base(z))
                .filter(|&z| {
                    let m = t.norm(z);
                    m == Fe::ONE || !b.is_square(m).unwrap()
                })
                .collect();
            for lambda in MultChar::all(q as u32 - 1).filter(|l| !l.is_trivial()) {
                let lhs = base_sum(&t, &lambda, &set).integer_part().unwrap();
                let lam_s = lambda
                    .char_sum_logs((0..q as u64 - 1).map(|a| 2 * a))
                    .scale(1);
                let lam_s = lam_s.integer_part().unwrap() / 2;
                assert_eq!(lhs, (q - 1) - (q + 1) * lam_s);
            }
            for mu in MultChar::all(n) {
                if mu.pow(q) == mu {
                    continue;
                }
                let lhs = mu.char_sum(e, set.iter().copied()).unwrap();
                let mu_m1 = mu.value(e.log(e.minus_one()).unwrap() as u64);
                let rhs = -&(&CycSum::int(n, 1) + &mu_m1);
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn unitary_connection_sums() {
        for p in [3u32, 5, 7] {
            let t = make_tower(p, 1).unwrap();
            let e = t.ext();
            let q = t.q() as i64;
            let n = e.units_order() as i64;
            // z^{1-q} as a log in E (generator γ^{q-1})
            let twist_log = |z: Fe| -> u64 {
                let l = e.log(e.pow(z, 1 - q)).unwrap() as i64;
                (l / (q - 1)) as u64
            };
            let set: Vec<Fe> = e
                .units()
                .filter(|&z| !t.in_unit_circle(z))
                .filter(|&z| {
                    let w = twist_log(z);
                    w == 0 || w % 2 == 1
                })
                .collect();
            // the z^{q-1} description picks out the same set
            let alt: Vec<Fe> = e
                .units()
                .filter(|&z| !t.in_unit_circle(z))
                .filter(|&z| {
                    let w = (e.log(e.pow(z, q - 1)).unwrap() as i64 / (q - 1)) as u64;
                    w == 0 || w % 2 == 1
                })
                .collect();
            assert_eq!(set, alt);
            for lambda in MultChar::all(q as u32 + 1).filter(|l| !l.is_trivial()) {
                let lhs = lambda
                    .char_sum_logs(set.iter().map(|&z| twist_log(z)))
                    .integer_part()
                    .unwrap();
                let lam_q = lambda
                    .char_sum_logs((0..q as u64 + 1).map(|a| 2 * a))
                    .integer_part()
                    .unwrap()
                    / 2;
                assert_eq!(lhs, (q - 3) - (q - 1) * lam_q);
            }
            for mu in MultChar::all(n as u32) {
                if mu.pow(-q) == mu {
                    continue;
                }
                let lhs = mu.char_sum(e, set.iter().copied()).unwrap();
                let mu_m1 = mu.value(e.log(e.minus_one()).unwrap() as u64);
                let rhs = -&(&CycSum::int(n as u32, 1) + &mu_m1);
                assert_eq!(lhs, rhs);
            }
        }
    }

    proptest! {
        #[test]
        fn arithmetic_matches_complex(
            a in proptest::collection::vec(-5i64..5, 12),
            b in proptest::collection::vec(-5i64..5, 12),
        ) {
            let mut x = CycSum::zero(12);
            let mut y = CycSum::zero(12);
            for i in 0..12 {
                x.add_root(i as u64, a[i]);
                y.add_root(i as u64, b[i]);
            }
            let (xv, yv) = (x.eval::<f64>(), y.eval::<f64>());
            prop_assert!(((&x + &y).eval::<f64>() - (xv + yv)).norm() < 1e-10);
            prop_assert!(((&x * &y).eval::<f64>() - (xv * yv)).norm() < 1e-9);
            prop_assert!((x.conj().eval::<f64>() - xv.conj()).norm() < 1e-10);
            let exact_zero = (&x - &x).is_zero();
            prop_assert!(exact_zero);
            prop_assert_eq!(x.is_zero(), xv.norm() < 1e-9);
        }
    }
}
