//! 2×2 matrices over a table-driven finite field. The field is passed to
//! every operation so the matrix itself stays a plain `Copy` value.

use crate::gf::{Fe, FiniteField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    pub a: Fe,
    pub b: Fe,
    pub c: Fe,
    pub d: Fe,
}

impl Mat2 {
    pub const fn new(a: Fe, b: Fe, c: Fe, d: Fe) -> Self {
        Mat2 { a, b, c, d }
    }

    pub const fn identity() -> Self {
        Mat2::scalar(Fe::ONE)
    }

    pub const fn scalar(x: Fe) -> Self {
        Mat2::new(x, Fe::ZERO, Fe::ZERO, x)
    }

    pub const fn diag(x: Fe, y: Fe) -> Self {
        Mat2::new(x, Fe::ZERO, Fe::ZERO, y)
    }

    pub fn from_ints(f: &FiniteField, e: [i64; 4]) -> Self {
        Mat2::new(
            f.from_int(e[0]),
            f.from_int(e[1]),
            f.from_int(e[2]),
            f.from_int(e[3]),
        )
    }

    pub fn mul(&self, f: &FiniteField, o: &Mat2) -> Mat2 {
        Mat2 {
            a: f.add(f.mul(self.a, o.a), f.mul(self.b, o.c)),
            b: f.add(f.mul(self.a, o.b), f.mul(self.b, o.d)),
            c: f.add(f.mul(self.c, o.a), f.mul(self.d, o.c)),
            d: f.add(f.mul(self.c, o.b), f.mul(self.d, o.d)),
        }
    }

    pub fn det(&self, f: &FiniteField) -> Fe {
        f.sub(f.mul(self.a, self.d), f.mul(self.b, self.c))
    }

    pub fn trace(&self, f: &FiniteField) -> Fe {
        f.add(self.a, self.d)
    }

    pub fn inv(&self, f: &FiniteField) -> Option<Mat2> {
        let di = f.inv(self.det(f))?;
        Some(Mat2 {
            a: f.mul(self.d, di),
            b: f.neg(f.mul(self.b, di)),
            c: f.neg(f.mul(self.c, di)),
            d: f.mul(self.a, di),
        })
    }

    pub fn scale(&self, f: &FiniteField, x: Fe) -> Mat2 {
        Mat2 {
            a: f.mul(x, self.a),
            b: f.mul(x, self.b),
            c: f.mul(x, self.c),
            d: f.mul(x, self.d),
        }
    }

    pub fn sub(&self, f: &FiniteField, o: &Mat2) -> Mat2 {
        Mat2 {
            a: f.sub(self.a, o.a),
            b: f.sub(self.b, o.b),
            c: f.sub(self.c, o.c),
            d: f.sub(self.d, o.d),
        }
    }

    pub fn pow(&self, f: &FiniteField, mut e: u64) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            base = base.mul(f, &base);
            e >>= 1;
        }
        acc
    }

    /// Conjugate `self` by `x`: x·self·x⁻¹.
    pub fn conjugate_by(&self, f: &FiniteField, x: &Mat2) -> Option<Mat2> {
        Some(x.mul(f, self).mul(f, &x.inv(f)?))
    }

    pub fn is_scalar(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Entrywise x ↦ x^e.
    pub fn map_pow(&self, f: &FiniteField, e: i64) -> Mat2 {
        Mat2 {
            a: f.pow(self.a, e),
            b: f.pow(self.b, e),
            c: f.pow(self.c, e),
            d: f.pow(self.d, e),
        }
    }

    /// Transpose composed with entrywise x ↦ x^q.
    pub fn conj_transpose(&self, f: &FiniteField, q: u32) -> Mat2 {
        let t = Mat2 {
            a: self.a,
            b: self.c,
            c: self.b,
            d: self.d,
        };
        t.map_pow(f, q as i64)
    }

    /// Multiplicative order by repeated multiplication.
    pub fn order(&self, f: &FiniteField) -> u64 {
        let mut cur = *self;
        let mut k = 1;
        while cur != Mat2::identity() {
            cur = cur.mul(f, self);
            k += 1;
        }
        k
    }

    pub fn format(&self, f: &FiniteField) -> String {
        format!(
            "[[{},{}],[{},{}]]",
            f.format(self.a),
            f.format(self.b),
            f.format(self.c),
            f.format(self.d)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_determinant() {
        let f = FiniteField::new(5, 1).unwrap();
        let m = Mat2::from_ints(&f, [1, 2, 3, 4]);
        assert_eq!(m.det(&f), f.from_int(-2));
        let mi = m.inv(&f).unwrap();
        assert_eq!(m.mul(&f, &mi), Mat2::identity());
        assert!(Mat2::from_ints(&f, [1, 2, 2, 4]).inv(&f).is_none());
        assert_eq!(Mat2::from_ints(&f, [1, 1, 0, 1]).order(&f), 5);
        assert_eq!(
            m.pow(&f, 7),
            (0..7).fold(Mat2::identity(), |acc, _| acc.mul(&f, &m))
        );
    }
}
