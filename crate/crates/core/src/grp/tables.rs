//! Character values as lists of `(coefficient, exponent)` terms over the
//! group's root order.

use super::{ClassKind, ClassLabel, Family, Group, IrrKind, IrrLabel};
use crate::charring::legendre;
use crate::error::{Error, Result};
use crate::gf::Fe;

type Terms = Vec<(i64, u64)>;

impl Group {
    /// Extension log, as a signed integer for exponent arithmetic.
    fn elog(&self, x: Fe) -> i128 {
        self.tower()
            .ext()
            .log(x)
            .expect("class parameters are units") as i128
    }

    fn n(&self) -> i128 {
        let q = self.q() as i128;
        q * q - 1
    }

    fn ex(&self, e: i128) -> u64 {
        e.rem_euclid(self.n()) as u64
    }

    pub(crate) fn char_terms(
        &self,
        chi: &IrrLabel,
        c: &ClassLabel,
        assembled: bool,
    ) -> Result<Terms> {
        if chi.family != self.family() || c.family != self.family() {
            return Err(Error::Mismatch);
        }
        match self.family() {
            Family::Gl => Ok(self.gl_terms(chi.kind, c.kind)),
            Family::Gu => Ok(self.gu_terms(chi.kind, c.kind)),
            Family::Sl => self.sl_terms(chi, c, assembled),
        }
    }

    fn gl_terms(&self, chi: IrrKind, c: ClassKind) -> Terms {
        let q = self.q() as i128;
        let one = |coef: i64, e: i128| vec![(coef, self.ex(e))];
        let qi = q as i64;
        match (chi, c) {
            (IrrKind::Linear(j), ClassKind::Central(x) | ClassKind::Unipotent(x)) => {
                one(1, 2 * j as i128 * self.elog(x))
            }
            (IrrKind::Linear(j), ClassKind::Split(x, y)) => {
                one(1, j as i128 * (self.elog(x) + self.elog(y)))
            }
            (IrrKind::Linear(j), ClassKind::Nonsplit(z)) => {
                one(1, j as i128 * (q + 1) * self.elog(z))
            }

            (IrrKind::Steinberg(j), ClassKind::Central(x)) => one(qi, 2 * j as i128 * self.elog(x)),
            (IrrKind::Steinberg(_), ClassKind::Unipotent(_)) => vec![],
            (IrrKind::Steinberg(j), ClassKind::Split(x, y)) => {
                one(1, j as i128 * (self.elog(x) + self.elog(y)))
            }
            (IrrKind::Steinberg(j), ClassKind::Nonsplit(z)) => {
                one(-1, j as i128 * (q + 1) * self.elog(z))
            }

            (IrrKind::Cuspidal(j), ClassKind::Central(x)) => one(qi - 1, j as i128 * self.elog(x)),
            (IrrKind::Cuspidal(j), ClassKind::Unipotent(x)) => one(-1, j as i128 * self.elog(x)),
            (IrrKind::Cuspidal(_), ClassKind::Split(..)) => vec![],
            (IrrKind::Cuspidal(j), ClassKind::Nonsplit(z)) => {
                let l = self.elog(z);
                vec![
                    (-1, self.ex(j as i128 * l)),
                    (-1, self.ex(j as i128 * q * l)),
                ]
            }

            (IrrKind::Principal(a, b), ClassKind::Central(x)) => {
                one(qi + 1, (a + b) as i128 * self.elog(x))
            }
            (IrrKind::Principal(a, b), ClassKind::Unipotent(x)) => {
                one(1, (a + b) as i128 * self.elog(x))
            }
            (IrrKind::Principal(a, b), ClassKind::Split(x, y)) => {
                let (lx, ly) = (self.elog(x), self.elog(y));
                let (a, b) = (a as i128, b as i128);
                vec![(1, self.ex(a * lx + b * ly)), (1, self.ex(a * ly + b * lx))]
            }
            (IrrKind::Principal(..), ClassKind::Nonsplit(_)) => vec![],
            _ => unreachable!("GL table has no entry for {chi:?} at {c:?}"),
        }
    }

    fn gu_terms(&self, chi: IrrKind, c: ClassKind) -> Terms {
        let q = self.q() as i128;
        let qi = q as i64;
        let one = |coef: i64, e: i128| vec![(coef, self.ex(e))];
        match (chi, c) {
            (IrrKind::Linear(j), ClassKind::Central(x) | ClassKind::Unipotent(x)) => {
                one(1, 2 * j as i128 * self.elog(x))
            }
            (IrrKind::Linear(j), ClassKind::Split(x, y)) => {
                one(1, j as i128 * (self.elog(x) + self.elog(y)))
            }
            (IrrKind::Linear(j), ClassKind::Nonsplit(z)) => {
                one(1, j as i128 * (1 - q) * self.elog(z))
            }

            (IrrKind::Steinberg(j), ClassKind::Central(x)) => one(qi, 2 * j as i128 * self.elog(x)),
            (IrrKind::Steinberg(_), ClassKind::Unipotent(_)) => vec![],
            (IrrKind::Steinberg(j), ClassKind::Split(x, y)) => {
                one(-1, j as i128 * (self.elog(x) + self.elog(y)))
            }
            (IrrKind::Steinberg(j), ClassKind::Nonsplit(z)) => {
                one(1, j as i128 * (1 - q) * self.elog(z))
            }

            (IrrKind::Principal(a, b), ClassKind::Central(x)) => {
                one(qi - 1, (a + b) as i128 * self.elog(x))
            }
            (IrrKind::Principal(a, b), ClassKind::Unipotent(x)) => {
                one(-1, (a + b) as i128 * self.elog(x))
            }
            (IrrKind::Principal(a, b), ClassKind::Split(x, y)) => {
                let (lx, ly) = (self.elog(x), self.elog(y));
                let (a, b) = (a as i128, b as i128);
                vec![
                    (-1, self.ex(a * lx + b * ly)),
                    (-1, self.ex(b * lx + a * ly)),
                ]
            }
            (IrrKind::Principal(..), ClassKind::Nonsplit(_)) => vec![],

            (IrrKind::Cuspidal(j), ClassKind::Central(x)) => one(qi + 1, j as i128 * self.elog(x)),
            (IrrKind::Cuspidal(j), ClassKind::Unipotent(x)) => one(1, j as i128 * self.elog(x)),
            (IrrKind::Cuspidal(_), ClassKind::Split(..)) => vec![],
            (IrrKind::Cuspidal(j), ClassKind::Nonsplit(z)) => {
                let l = self.elog(z);
                vec![
                    (1, self.ex(j as i128 * l)),
                    (1, self.ex(-(j as i128) * q * l)),
                ]
            }
            _ => unreachable!("GU table has no entry for {chi:?} at {c:?}"),
        }
    }

    /// The GL(2,q) class containing an SL(2,q) class.
    fn sl_to_gl(&self, c: ClassKind) -> ClassKind {
        let e = self.tower().ext();
        match c {
            ClassKind::SlUnipotent { sign, .. } => {
                ClassKind::Unipotent(if sign == 1 { Fe::ONE } else { e.minus_one() })
            }
            ClassKind::Nonsplit(z) => ClassKind::Nonsplit(z.min(e.pow(z, self.q() as i64))),
            other => other,
        }
    }

    fn sl_terms(&self, chi: &IrrLabel, c: &ClassLabel, assembled: bool) -> Result<Terms> {
        let q = self.q();
        let p = self.tower().p() as u64;
        let lift = |t: Terms| t.into_iter().map(|(c, e)| (c, e * p)).collect::<Terms>();
        let gl = self.sl_to_gl(c.kind);
        let restricted = |k: IrrKind| Ok(lift(self.gl_terms(k, gl)));
        match chi.kind {
            IrrKind::Trivial => restricted(IrrKind::Linear(0)),
            IrrKind::Sigma => restricted(IrrKind::Steinberg(0)),
            IrrKind::SlPrincipal(j) => restricted(IrrKind::Principal(0, j)),
            IrrKind::SlCuspidal(j) => restricted(IrrKind::Cuspidal(j)),
            IrrKind::UPlus | IrrKind::UMinus | IrrKind::ZPlus | IrrKind::ZMinus => {
                let is_u = matches!(chi.kind, IrrKind::UPlus | IrrKind::UMinus);
                let sigma = if matches!(chi.kind, IrrKind::UPlus | IrrKind::ZPlus) {
                    1
                } else {
                    -1
                };
                // μ_s extends to index (q+1)/2 on F_{q²}^×; ζ has index (q-1)/2
                let mu_s = (q as i128 + 1) / 2;
                let zeta = (q as i128 - 1) / 2;
                match c.kind {
                    ClassKind::SlUnipotent { sign, nonsquare } => {
                        Ok(self.table5(is_u, sigma, sign, nonsquare))
                    }
                    ClassKind::Central(x) => {
                        let (deg, idx) = if is_u {
                            ((q as i64 - 1) / 2, mu_s)
                        } else {
                            ((q as i64 + 1) / 2, zeta)
                        };
                        Ok(lift(vec![(deg, self.ex(idx * self.elog(x)))]))
                    }
                    _ if !assembled => Err(Error::Untabulated {
                        irr: chi.to_string(),
                        class: self.display(c).to_string(),
                    }),
                    ClassKind::Split(x, _) => {
                        if is_u {
                            Ok(vec![])
                        } else {
                            Ok(lift(vec![(1, self.ex(zeta * self.elog(x)))]))
                        }
                    }
                    ClassKind::Nonsplit(z) => {
                        if is_u {
                            Ok(lift(vec![(-1, self.ex(mu_s * self.elog(z)))]))
                        } else {
                            Ok(vec![])
                        }
                    }
                    ClassKind::Unipotent(_) => unreachable!("SL uses SlUnipotent labels"),
                }
            }
            _ => Err(Error::Mismatch),
        }
    }

    /// (a + s·√(ζ(-1)q))/2 per the partial table, as integral terms.
    fn table5(&self, is_u: bool, sigma: i64, sign: i8, nonsquare: bool) -> Terms {
        let q = self.q() as i64;
        let p = self.tower().p();
        let k = self.tower().base().degree();
        let eps = if q % 4 == 1 { 1 } else { -1 };
        let sq = if nonsquare { -1 } else { 1 };
        let (a, s) = match (is_u, sign) {
            (true, 1) => (-1, sigma * sq),
            (true, _) => (eps, -sigma * sq),
            (false, 1) => (1, sigma * sq),
            (false, _) => (eps, sigma * sq),
        };
        let n = self.n() as u64;
        if k.is_multiple_of(2) {
            // √(ζ(-1)q) = p^{k/2}
            return vec![((a + s * (p as i64).pow(k / 2)) / 2, 0)];
        }
        // √(ζ(-1)q) = P·g with g = 1 + 2η₊ the Gauss sum
        let pm = (p as i64).pow((k - 1) / 2);
        let mut terms = vec![((a + s * pm) / 2, 0)];
        for r in 1..p {
            if legendre(r as i64, p) == 1 {
                terms.push((s * pm, r as u64 * n));
            }
        }
        terms
    }
}

impl Group {
    /// Σ_χ-weighted sum Σ_C w_C·χ(C)·conj(ψ(C)) over the given classes,
    /// with the SL table assembled.
    fn pair_sum(
        &self,
        weighted: &[(ClassLabel, i64)],
        chi: &IrrLabel,
        psi: &IrrLabel,
    ) -> Result<i64> {
        let r = self.root_order() as u64;
        let mut acc = crate::charring::CycSum::zero(r as u32);
        for (c, w) in weighted {
            let a = self.char_terms(chi, c, true)?;
            let b = self.char_terms(psi, c, true)?;
            for &(ca, ea) in &a {
                for &(cb, eb) in &b {
                    acc.add_root(ea + r - eb % r, w * ca * cb);
                }
            }
        }
        acc.integer_part()
    }

    /// ⟨χ, ψ⟩ = (1/|G|) Σ_C |C| χ(C) conj(ψ(C)), exactly.
    pub fn inner_product(&self, chi: &IrrLabel, psi: &IrrLabel) -> Result<i64> {
        let weighted: Vec<(ClassLabel, i64)> = self
            .classes()
            .iter()
            .map(|c| (*c, self.class_size(c) as i64))
            .collect();
        let s = self.pair_sum(&weighted, chi, psi)?;
        let order = self.order() as i64;
        if s % order != 0 {
            return Err(Error::NonIntegral {
                re: s as f64 / order as f64,
                im: 0.0,
            });
        }
        Ok(s / order)
    }

    /// Σ_χ χ(c)·conj(χ(d)), exactly.
    pub fn column_product(&self, c: &ClassLabel, d: &ClassLabel) -> Result<i64> {
        let r = self.root_order() as u64;
        let mut acc = crate::charring::CycSum::zero(r as u32);
        for chi in self.irreps() {
            let a = self.char_terms(chi, c, true)?;
            let b = self.char_terms(chi, d, true)?;
            for &(ca, ea) in &a {
                for &(cb, eb) in &b {
                    acc.add_root(ea + r - eb % r, ca * cb);
                }
            }
        }
        acc.integer_part()
    }

    /// Σ_C w_C·χ(C) over weighted classes, as an exact sum.
    pub fn weighted_class_sum(
        &self,
        chi: &IrrLabel,
        weighted: &[(ClassLabel, i64)],
    ) -> Result<crate::charring::CycSum> {
        let mut acc = crate::charring::CycSum::zero(self.root_order());
        for (c, w) in weighted {
            for (coef, e) in self.char_terms(chi, c, true)? {
                acc.add_root(e, w * coef);
            }
        }
        Ok(acc)
    }
}
