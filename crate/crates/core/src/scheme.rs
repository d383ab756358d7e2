//! Association schemes: axiom checking, primitive idempotents of conjugacy
//! class schemes, and the spectral PST test for scheme graphs.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_integer::Integer;
use serde::Serialize;

use crate::charring::CycSum;
use crate::error::{Error, Result};
use crate::grp::{Group, Mat2};
use crate::scalar::Scalar;

/// Relations A_0..A_d on n points, stored as one relation index per
/// ordered pair when the matrices partition the pairs, else as raw
/// matrices.
#[derive(Clone, Debug)]
pub struct SchemeRelationSet {
    n: usize,
    relations: Vec<Vec<bool>>,
}

/// Outcome of [`verify_axioms`] with the first violated axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub holds: bool,
    pub witness: Option<String>,
}

impl AxiomReport {
    fn fail(msg: String) -> Self {
        AxiomReport {
            holds: false,
            witness: Some(msg),
        }
    }
}

impl SchemeRelationSet {
    /// Relations given as row-major n×n 0-1 matrices.
    pub fn from_matrices(n: usize, relations: Vec<Vec<bool>>) -> Self {
        assert!(
            relations.iter().all(|r| r.len() == n * n),
            "relation matrices must be n×n"
        );
        SchemeRelationSet { n, relations }
    }

    /// Relations given by the index of the relation containing each pair.
    pub fn from_index(n: usize, count: usize, index: &[usize]) -> Self {
        let mut relations = vec![vec![false; n * n]; count];
        for (pair, &r) in index.iter().enumerate() {
            relations[r][pair] = true;
        }
        SchemeRelationSet { n, relations }
    }

    /// The distance relations of a connected graph.
    pub fn distance_scheme(adj: &crate::graph::Graph) -> Self {
        let n = adj.n();
        let mut dist = vec![usize::MAX; n * n];
        for s in 0..n {
            let mut frontier = vec![s];
            dist[s * n + s] = 0;
            let mut d = 0;
            while !frontier.is_empty() {
                d += 1;
                let mut next = Vec::new();
                for &u in &frontier {
                    for &v in adj.neighbors(u) {
                        if dist[s * n + v] == usize::MAX {
                            dist[s * n + v] = d;
                            next.push(v);
                        }
                    }
                }
                frontier = next;
            }
        }
        let diam = dist
            .iter()
            .copied()
            .filter(|&d| d != usize::MAX)
            .max()
            .unwrap_or(0);
        SchemeRelationSet::from_index(n, diam + 1, &dist)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn class_count(&self) -> usize {
        self.relations.len()
    }

    pub fn relation(&self, i: usize) -> &[bool] {
        &self.relations[i]
    }

    pub fn to_dense<T: Scalar>(&self, i: usize) -> DMatrix<T> {
        DMatrix::from_fn(self.n, self.n, |r, c| {
            if self.relations[i][r * self.n + c] {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

/// Check the four scheme axioms exactly.
pub fn verify_axioms(rs: &SchemeRelationSet, bound: usize) -> Result<AxiomReport> {
    let n = rs.n;
    if n > bound {
        return Err(Error::BoundExceeded {
            order: n as u64,
            bound: bound as u64,
        });
    }
    let k = rs.relations.len();
    if k == 0 {
        return Ok(AxiomReport::fail("no relations".into()));
    }
    for x in 0..n {
        for y in 0..n {
            if rs.relations[0][x * n + y] != (x == y) {
                return Ok(AxiomReport::fail(format!(
                    "A_0 is not the identity at ({x},{y})"
                )));
            }
        }
    }
    // partition of all pairs
    let mut index = vec![usize::MAX; n * n];
    for (i, r) in rs.relations.iter().enumerate() {
        for (pair, &on) in r.iter().enumerate() {
            if on {
                if index[pair] != usize::MAX {
                    return Ok(AxiomReport::fail(format!(
                        "pair ({},{}) lies in A_{} and A_{i}",
                        pair / n,
                        pair % n,
                        index[pair]
                    )));
                }
                index[pair] = i;
            }
        }
    }
    if let Some(pair) = index.iter().position(|&i| i == usize::MAX) {
        return Ok(AxiomReport::fail(format!(
            "sum of relations misses pair ({},{})",
            pair / n,
            pair % n
        )));
    }
    // transpose closure
    for i in 0..k {
        let first = (0..n * n).find(|&p| index[p] == i);
        let Some(p) = first else {
            return Ok(AxiomReport::fail(format!("A_{i} is empty")));
        };
        let j = index[(p % n) * n + p / n];
        for x in 0..n {
            for y in 0..n {
                if (index[x * n + y] == i) != (index[y * n + x] == j) {
                    return Ok(AxiomReport::fail(format!(
                        "A_{i} transposed is not a relation"
                    )));
                }
            }
        }
    }
    // intersection numbers: (A_i A_j)(x,y) must depend only on the relation of (x,y)
    let mut table: HashMap<usize, Vec<u32>> = HashMap::new();
    let mut counts = vec![0u32; k * k];
    for x in 0..n {
        for y in 0..n {
            counts.iter_mut().for_each(|c| *c = 0);
            for z in 0..n {
                counts[index[x * n + z] * k + index[z * n + y]] += 1;
            }
            let r = index[x * n + y];
            match table.get(&r) {
                None => {
                    table.insert(r, counts.clone());
                }
                Some(prev) if *prev != counts => {
                    return Ok(AxiomReport::fail(format!(
                        "a product A_iA_j is not constant on A_{r} (pair ({x},{y}))"
                    )));
                }
                Some(_) => {}
            }
        }
    }
    for (r, p) in &table {
        for i in 0..k {
            for j in 0..k {
                if p[i * k + j] != p[j * k + i] {
                    return Ok(AxiomReport::fail(format!(
                        "A_{i}A_{j} ≠ A_{j}A_{i} on A_{r}"
                    )));
                }
            }
        }
    }
    Ok(AxiomReport {
        holds: true,
        witness: None,
    })
}

/// Result of the spectral PST test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PstVerdict {
    pub pst: bool,
    pub g: i64,
    pub tau: f64,
}

/// PST test for a scheme graph with integer eigenvalues θ_j and signs
/// s_j (T E_j = s_j E_j for the involution relation T). A sign of 0
/// marks an eigenspace on which T is not a scalar and rules PST out.
///
/// With g = gcd(θ₀ - θ_j), PST at τ = π/g holds iff (θ₀-θ_j)/g is even
/// for every s_j = +1 and odd for every s_j = -1.
pub fn pst_test(eigensystem: &[(i64, i64)], theta0: i64) -> PstVerdict {
    let g = eigensystem
        .iter()
        .fold(0i64, |acc, &(t, _)| acc.gcd(&(theta0 - t)));
    if g == 0 {
        return PstVerdict {
            pst: false,
            g: 0,
            tau: f64::INFINITY,
        };
    }
    let has_minus = eigensystem.iter().any(|&(_, s)| s < 0);
    let parity_ok = eigensystem.iter().all(|&(_, s)| s != 0)
        && eigensystem.iter().all(|&(t, s)| {
            let even = ((theta0 - t) / g) % 2 == 0;
            even == (s > 0)
        });
    PstVerdict {
        pst: has_minus && parity_ok,
        g,
        tau: PI / g as f64,
    }
}

/// [`pst_test`] on floating-point eigenvalues, which must round to
/// integers within 1e-8.
pub fn pst_test_real(eigensystem: &[(f64, i64)], theta0: f64) -> Result<PstVerdict> {
    let round = |x: f64| -> Result<i64> {
        let r = x.round();
        if (x - r).abs() > 1e-8 {
            Err(Error::NonIntegral { re: x, im: 0.0 })
        } else {
            Ok(r as i64)
        }
    };
    let ints = eigensystem
        .iter()
        .map(|&(t, s)| Ok((round(t)?, s)))
        .collect::<Result<Vec<_>>>()?;
    Ok(pst_test(&ints, round(theta0)?))
}

/// The mod-4 form: θ ≡ a on the + eigenspaces and a+2 on the - ones.
pub fn mod4_condition(eigensystem: &[(i64, i64)], a: i64) -> bool {
    eigensystem.iter().all(|&(t, s)| {
        let want = if s > 0 { a } else { a + 2 };
        (t - want).rem_euclid(4) == 0
    })
}

/// The conjugacy class scheme of an explicitly enumerated group.
#[derive(Clone, Debug)]
pub struct ConjugacyScheme<'g> {
    group: &'g Group,
    elements: Vec<Mat2>,
    /// class index of h·g⁻¹ for the pair (g, h), row-major
    quotient: Vec<usize>,
}

impl<'g> ConjugacyScheme<'g> {
    pub fn new(group: &'g Group, bound: u64) -> Result<Self> {
        let elements = group.enumerate(bound)?;
        let f = group.matrix_field();
        let pos: HashMap<Mat2, usize> = elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let class_of: Vec<usize> = elements
            .iter()
            .map(|m| {
                Ok(group
                    .class_position(&group.classify(m)?)
                    .expect("canonical label"))
            })
            .collect::<Result<_>>()?;
        let n = elements.len();
        let mut quotient = vec![0; n * n];
        for (gi, g) in elements.iter().enumerate() {
            let ginv = g.inv(f).expect("group element");
            for (hi, h) in elements.iter().enumerate() {
                quotient[gi * n + hi] = class_of[pos[&h.mul(f, &ginv)]];
            }
        }
        Ok(ConjugacyScheme {
            group,
            elements,
            quotient,
        })
    }

    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn relation_set(&self) -> SchemeRelationSet {
        SchemeRelationSet::from_index(
            self.elements.len(),
            self.group.classes().len(),
            &self.quotient,
        )
    }

    /// Check A_i E_ψ = (|C_i| ψ(c⁻¹)/ψ(1)) E_ψ entrywise in exact arithmetic,
    /// scaled by |G|: ψ(1) Σ_{k: kg⁻¹ ∈ C_i} ψ(hk⁻¹) = |C_i| ψ(c_i⁻¹) ψ(hg⁻¹).
    pub fn verify_eigen_relation_exact(&self) -> Result<Option<String>> {
        let grp = self.group;
        let n = self.elements.len();
        let classes = grp.classes();
        for chi in grp.irreps() {
            let vals: Vec<CycSum> = classes
                .iter()
                .map(|c| grp.assembled_char_value(chi, c))
                .collect::<Result<_>>()?;
            let deg = grp.degree(chi) as i64;
            for (i, c) in classes.iter().enumerate() {
                let inv = grp
                    .class_position(&grp.inverse_class(c))
                    .expect("inverse class");
                let coeff = vals[inv].scale(grp.class_size(c) as i64);
                for g in 0..n {
                    let ks: Vec<usize> =
                        (0..n).filter(|&k| self.quotient[g * n + k] == i).collect();
                    for h in 0..n {
                        let mut lhs = CycSum::zero(grp.root_order());
                        for &k in &ks {
                            lhs += &vals[self.quotient[k * n + h]];
                        }
                        let lhs = lhs.scale(deg);
                        let rhs = &coeff * &vals[self.quotient[g * n + h]];
                        if lhs != rhs {
                            return Ok(Some(format!(
                                "{chi} at class {} pair ({g},{h})",
                                grp.display(c)
                            )));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    pub fn character_data<T: Scalar>(&self) -> Result<GroupCharacterData<T>> {
        let grp = self.group;
        let mut chars = Vec::new();
        for chi in grp.irreps() {
            let vals = grp
                .classes()
                .iter()
                .map(|c| grp.assembled_char_value(chi, c).map(|v| v.eval::<T>()))
                .collect::<Result<Vec<_>>>()?;
            chars.push(vals);
        }
        Ok(GroupCharacterData {
            n: self.elements.len(),
            quotient: self.quotient.clone(),
            chars,
        })
    }
}

/// Numeric character data of a finite group: for each ordered pair of
/// elements the class of h·g⁻¹, and character values per class (the
/// identity class first).
#[derive(Clone, Debug)]
pub struct GroupCharacterData<T: Scalar> {
    pub n: usize,
    pub quotient: Vec<usize>,
    pub chars: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> GroupCharacterData<T> {
    /// The cyclic group Z/n with its n linear characters.
    pub fn cyclic(n: usize) -> Self {
        let quotient = (0..n * n).map(|p| (p % n + n - p / n) % n).collect();
        let chars = (0..n)
            .map(|j| {
                (0..n)
                    .map(|a| {
                        let t = std::f64::consts::TAU * (j * a) as f64 / n as f64;
                        Complex::new(T::of(t.cos()), T::of(t.sin()))
                    })
                    .collect()
            })
            .collect();
        GroupCharacterData { n, quotient, chars }
    }
}

/// Primitive idempotents E_0..E_d.
#[derive(Clone, Debug)]
pub struct IdempotentBasis<T: Scalar> {
    pub mats: Vec<DMatrix<Complex<T>>>,
}

/// E_ψ(g,h) = ψ(hg⁻¹)ψ(1)/|G|.
pub fn idempotents_from_characters<T: Scalar>(
    data: &GroupCharacterData<T>,
    bound: usize,
) -> Result<IdempotentBasis<T>> {
    let n = data.n;
    if n > bound {
        return Err(Error::BoundExceeded {
            order: n as u64,
            bound: bound as u64,
        });
    }
    let nn = T::of(n as f64);
    let mats = data
        .chars
        .iter()
        .map(|vals| {
            let deg = vals[0];
            DMatrix::from_fn(n, n, |g, h| vals[data.quotient[g * n + h]] * deg / nn)
        })
        .collect();
    Ok(IdempotentBasis { mats })
}

impl<T: Scalar> IdempotentBasis<T> {
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Rank of each projector, read off its trace.
    pub fn ranks(&self) -> Vec<usize> {
        self.mats
            .iter()
            .map(|e| e.trace().re.as_f64().round() as usize)
            .collect()
    }

    /// Largest entrywise deviation from E_iE_j = δ_ij E_i and Σ E_i = I.
    pub fn max_deviation(&self) -> f64 {
        let n = self.mats.first().map_or(0, |m| m.nrows());
        let mut worst = 0.0f64;
        let mut sum = DMatrix::<Complex<T>>::zeros(n, n);
        for (i, a) in self.mats.iter().enumerate() {
            sum += a;
            for (j, b) in self.mats.iter().enumerate() {
                let prod = a * b;
                let target = if i == j {
                    a.clone()
                } else {
                    DMatrix::zeros(n, n)
                };
                worst = worst.max(max_abs(&(prod - target)));
            }
        }
        worst.max(max_abs(&(sum - DMatrix::identity(n, n))))
    }

    /// θ with A E_j = θ E_j, read as tr(A E_j)/tr(E_j).
    pub fn eigenvalue(&self, j: usize, a: &DMatrix<T>) -> Complex<T> {
        let e = &self.mats[j];
        let ac = a.map(|x| Complex::new(x, T::zero()));
        (ac * e).trace() / e.trace()
    }

    /// max |A E_j - θ E_j| for the θ above.
    pub fn eigen_residual(&self, j: usize, a: &DMatrix<T>) -> f64 {
        let e = &self.mats[j];
        let theta = self.eigenvalue(j, a);
        let ac = a.map(|x| Complex::new(x, T::zero()));
        max_abs(&(ac * e - e * theta))
    }
}

fn max_abs<T: Scalar>(m: &DMatrix<Complex<T>>) -> f64 {
    m.iter()
        .map(|z| (z.re * z.re + z.im * z.im).sqrt().as_f64())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::grp::Family;

    #[test]
    fn pst_examples() {
        let k2 = pst_test(&[(1, 1), (-1, -1)], 1);
        assert!(k2.pst);
        assert_eq!(k2.g, 2);
        assert!((k2.tau - PI / 2.0).abs() < 1e-15);
        let comp = pst_test(&[(46, 1), (0, -1), (-2, 1)], 46);
        assert!(comp.pst && comp.g == 2);
        assert!(!pst_test(&[(4, 1), (1, 1)], 4).pst);
        assert!(!pst_test(&[(1, 1), (-1, 0), (-3, -1)], 1).pst);
        // the valuation form with signs swapped would accept this; parity rejects it
        assert!(!pst_test(&[(1, 1), (-1, 1)], 1).pst);
        assert!(pst_test_real(&[(1.0, 1), (-0.5, -1)], 1.0).is_err());
        assert!(
            pst_test_real(&[(1.0 + 1e-12, 1), (-1.0, -1)], 1.0)
                .unwrap()
                .pst
        );
    }

    #[test]
    fn mod4_examples() {
        assert!(mod4_condition(&[(46, 1), (0, -1), (-2, 1)], 2));
        assert!(!mod4_condition(&[(46, 1), (4, 1), (0, -1)], 2));
    }

    #[test]
    fn identity_only_is_not_a_scheme() {
        let rs = SchemeRelationSet::from_matrices(2, vec![vec![true, false, false, true]]);
        let r = verify_axioms(&rs, 100).unwrap();
        assert!(!r.holds);
        assert!(r.witness.unwrap().contains("misses"));
    }

    #[test]
    fn four_cycle_distance_scheme() {
        let rs = SchemeRelationSet::distance_scheme(&Graph::cycle(4));
        assert_eq!(rs.class_count(), 3);
        assert!(verify_axioms(&rs, 100).unwrap().holds);
        // a path is not distance-regular
        let rs = SchemeRelationSet::distance_scheme(&Graph::path(4));
        assert!(!verify_axioms(&rs, 100).unwrap().holds);
    }

    #[test]
    fn gl23_conjugacy_scheme() {
        let g = Group::for_q(Family::Gl, 3).unwrap();
        let cs = ConjugacyScheme::new(&g, 10_000).unwrap();
        let rs = cs.relation_set();
        assert_eq!(rs.class_count(), 8);
        assert!(verify_axioms(&rs, 200).unwrap().holds);
        assert_eq!(cs.verify_eigen_relation_exact().unwrap(), None);
        let data = cs.character_data::<f64>().unwrap();
        let basis = idempotents_from_characters(&data, 200).unwrap();
        let mut ranks = basis.ranks();
        ranks.sort_unstable();
        assert_eq!(ranks, vec![1, 1, 4, 4, 4, 9, 9, 16]);
        assert!(basis.max_deviation() < 1e-9);
        // the involution relation is a fixed-point-free permutation of order 2
        let t = g.class_position(&g.central_involution()).unwrap();
        let at = rs.to_dense::<f64>(t);
        assert_eq!(&at * &at, DMatrix::identity(48, 48));
        assert!(at.diagonal().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn small_controls() {
        let trivial = GroupCharacterData::<f64>::cyclic(1);
        let b = idempotents_from_characters(&trivial, 10).unwrap();
        assert_eq!(b.len(), 1);
        assert!((b.mats[0][(0, 0)].re - 1.0).abs() < 1e-15);
        let c4 = GroupCharacterData::<f64>::cyclic(4);
        let b = idempotents_from_characters(&c4, 10).unwrap();
        assert_eq!(b.ranks(), vec![1, 1, 1, 1]);
        assert!(b.max_deviation() < 1e-12);
        let b32 = idempotents_from_characters(&GroupCharacterData::<f32>::cyclic(4), 10).unwrap();
        assert!(b32.max_deviation() < 1e-5);
    }
}
