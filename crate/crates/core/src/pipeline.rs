//! End-to-end runs: build, spectrum, certificate, and when in range the
//! explicit graph with simulation, collected into a [`Report`].

use std::collections::HashSet;

use crate::cayley::{
    build_connection_set, certify, closed_form_checks, closed_form_errata, explicit_graph,
    sl_order_based_set, spectrum, CayleyGraph, ConnectionSet, PstCertificate, Variant,
};
use crate::ctqw::{sample_pairs, transfer_check, WalkSystem, FIDELITY_TOL, INTEGRALITY_TOL};
use crate::error::Result;
use crate::graph::Graph;
use crate::grp::{Family, Group, Mat2};
use crate::orbital::{
    certify_orbital, orbital_errata, orbital_formula_checks, orbital_irreps, orbital_spectrum_for,
    principal_h_multiplicity, CosetSpace, OrbitalIrr, OrbitalSetup,
};
use crate::report::{
    ConnectionSetInfo, CrossCheck, FieldInfo, FormulaChecks, OrbitalInfo, Report, SpectrumSection,
    SCHEMA,
};

pub const DEFAULT_ENUMERATION_BOUND: u64 = 10_000;
pub const DEFAULT_SIM_BOUND: usize = 150;

const PARITY_NOTE: &str =
    "PST test uses the parity criterion: (theta0 - theta)/g even on the + eigenspaces and odd on the - eigenspaces";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    /// largest group order enumerated explicitly
    pub enumeration_bound: u64,
    /// largest vertex count simulated
    pub sim_bound: usize,
    /// every vertex is checked for transfer up to this many vertices
    pub full_pairs_bound: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            enumeration_bound: DEFAULT_ENUMERATION_BOUND,
            sim_bound: DEFAULT_SIM_BOUND,
            full_pairs_bound: DEFAULT_SIM_BOUND,
        }
    }
}

/// A finished run together with the explicit graph when one was built.
#[derive(Clone, Debug)]
pub struct Run {
    pub report: Report,
    pub graph: Option<Graph>,
}

pub fn run_cayley(family: Family, q: u32, variant: Variant, opts: &RunOptions) -> Result<Run> {
    let group = Group::for_q(family, q)?;
    let cs = build_connection_set(&group, variant)?;
    let table = spectrum(&group, &cs)?;
    let mut cert = certify(&table);
    let formula = closed_form_checks(&group, &table);
    let errata = closed_form_errata(&formula);
    let mut checks = Vec::new();
    let mut simulation = None;
    let mut graph = None;
    let mut complement_of_matching = false;

    if family == Family::Sl {
        let by_order = sl_order_based_set(&group);
        checks.push(CrossCheck::new(
            "sl-order-based-set",
            by_order == cs.classes,
            format!("{} classes", by_order.len()),
        ));
    }

    if group.order() <= opts.enumeration_bound {
        let cg = explicit_graph(&group, &cs, opts.enumeration_bound)?;
        cayley_structure_checks(&group, &cs, &cg, &cert, &mut checks)?;
        if cg.graph.n() <= opts.sim_bound {
            let ws = WalkSystem::<f64>::from_graph(&cg.graph)?;
            spectrum_match(&ws, &table.eigenvalue_multiset(), &mut checks);
            let id = cg
                .elements
                .iter()
                .position(|m| *m == Mat2::identity())
                .expect("identity");
            let pairs = sample_pairs(&cg.antipode, id, opts.full_pairs_bound);
            let chk = transfer_check(&ws, &pairs, cert.tau)?;
            simulation_agreement(&ws, &cert, chk.max_deviation, &mut checks)?;
            checks.push(CrossCheck::new(
                "transfer-timing",
                chk.max_half_time_fidelity < 1.0 - 1e-3
                    && chk.min_return_fidelity > 1.0 - FIDELITY_TOL,
                format!(
                    "max fidelity at tau/2 {:.3e}, min return at 2tau {:.12}",
                    chk.max_half_time_fidelity, chk.min_return_fidelity
                ),
            ));
            cert = cert.with_fidelity(chk.max_deviation, FIDELITY_TOL);
            simulation = Some(chk);
        }
        let g = &cg.graph;
        complement_of_matching =
            (0..g.n()).all(|x| g.degree(x) + 2 == g.n() && !g.has_edge(x, cg.antipode[x]));
        graph = Some(cg.graph);
    }

    let mut notes = vec![PARITY_NOTE.to_string()];
    if complement_of_matching {
        notes.push(format!(
            "graph is the complement of {} disjoint copies of K2, the pairs {{x, -x}}",
            group.order() / 2
        ));
    }
    let report = Report {
        schema: SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "verify".into(),
        family: family.to_string(),
        q,
        fields: FieldInfo::of(group.tower()),
        connection_set: Some(ConnectionSetInfo {
            variant: variant.to_string(),
            classes: cs
                .classes
                .iter()
                .map(|c| group.display(c).to_string())
                .collect(),
            size: cs.size,
        }),
        orbital: None,
        spectrum: SpectrumSection::Cayley(table),
        certificate: cert,
        simulation,
        cross_checks: checks,
        formula_checks: FormulaChecks::Cayley(formula),
        errata,
        notes,
    };
    Ok(Run { report, graph })
}

fn cayley_structure_checks(
    group: &Group,
    cs: &ConnectionSet,
    cg: &CayleyGraph,
    cert: &PstCertificate,
    checks: &mut Vec<CrossCheck>,
) -> Result<()> {
    let n = cg.elements.len() as u64;
    checks.push(CrossCheck::new(
        "group-order",
        n == group.order(),
        format!("{n} elements enumerated"),
    ));
    let mut members = 0u64;
    let mut by_order = HashSet::new();
    let f = group.matrix_field();
    let p = group.tower().p() as u64;
    let minus_i = Mat2::diag(f.minus_one(), f.minus_one());
    for m in &cg.elements {
        let c = group.classify(m)?;
        if cs.contains(&c) {
            members += 1;
        }
        if group.family() == Family::Sl {
            let o = m.order(f);
            if *m == minus_i || o == p || o == 2 * p {
                by_order.insert(*m);
            }
        }
    }
    checks.push(CrossCheck::new(
        "connection-set-size",
        members == cs.size,
        format!("{members} members counted"),
    ));
    if group.family() == Family::Sl {
        let mut ok = by_order.len() as u64 == cs.size;
        for m in &by_order {
            ok &= cs.contains(&group.classify(m)?);
        }
        checks.push(CrossCheck::new(
            "sl-order-based-elements",
            ok,
            format!("{} elements of order p, 2p or -I", by_order.len()),
        ));
    }
    let g = &cg.graph;
    let regular = g.regular_degree() == Some(cs.size as usize);
    checks.push(CrossCheck::new(
        "graph-shape",
        g.is_symmetric() && !g.has_loops() && regular,
        format!("{} vertices", g.n()),
    ));
    let connected = g.is_connected();
    checks.push(CrossCheck::new(
        "connectivity",
        connected == cert.connected,
        format!(
            "union-find {} component(s), spectral {}",
            g.component_count(),
            cert.connected
        ),
    ));
    Ok(())
}

fn spectrum_match(ws: &WalkSystem<f64>, exact: &[i64], checks: &mut Vec<CrossCheck>) {
    let dev = ws
        .eigenvalues()
        .iter()
        .zip(exact)
        .map(|(a, b)| (a - *b as f64).abs())
        .fold(0.0, f64::max);
    let ok = exact.len() == ws.n() && dev < INTEGRALITY_TOL;
    checks.push(CrossCheck::new(
        "numeric-spectrum",
        ok,
        format!("max deviation {dev:.3e}"),
    ));
    checks.push(CrossCheck::new(
        "reconstruction",
        ws.reconstruction_error() < crate::ctqw::RECONSTRUCTION_TOL,
        format!("{:.3e}", ws.reconstruction_error()),
    ));
}

/// The spectral verdict and the simulated transfer must agree, and so
/// must the exact and the numeric g.
fn simulation_agreement(
    ws: &WalkSystem<f64>,
    cert: &PstCertificate,
    deviation: f64,
    checks: &mut Vec<CrossCheck>,
) -> Result<()> {
    let simulated = deviation < FIDELITY_TOL;
    checks.push(CrossCheck::new(
        "pst-test-vs-simulation",
        simulated == cert.parity_condition,
        format!(
            "verdict {}, simulated transfer {simulated} (deviation {deviation:.3e})",
            cert.parity_condition
        ),
    ));
    let g = ws.spectral_gcd()?;
    checks.push(CrossCheck::new(
        "numeric-gcd",
        g == cert.g,
        format!("numeric g = {g}, exact g = {}", cert.g),
    ));
    Ok(())
}

pub fn run_orbital(q: u32, opts: &RunOptions) -> Result<Run> {
    let setup = OrbitalSetup::new(q)?;
    let spec = orbital_spectrum_for(&setup)?;
    let mut cert = certify_orbital(&spec);
    let formula = orbital_formula_checks(&setup, &spec)?;
    let errata = orbital_errata(&formula);
    let mut checks = Vec::new();
    checks.push(CrossCheck::new(
        "irr-degree-sum",
        spec.rows.iter().map(|r| r.multiplicity).sum::<u64>() == setup.coset_count(),
        format!("{} constituents", spec.rows.len()),
    ));
    let mut simulation = None;
    let mut graph = None;
    let explicit = setup.group_order() <= opts.enumeration_bound;
    if explicit {
        let cs = CosetSpace::new(setup.clone(), opts.enumeration_bound)?;
        orbital_structure_checks(&cs, &mut checks)?;
        let g = cs.build_gamma(true)?;
        let qq = q as usize;
        let want = 1 + qq * (qq + 1) / 2 * qq * (qq + 1);
        checks.push(CrossCheck::new(
            "gamma-shape",
            g.regular_degree() == Some(want) && g.is_symmetric() && !g.has_loops(),
            format!("{} vertices, degree {:?}", g.n(), g.regular_degree()),
        ));
        let d = cs.build_gamma(false)?;
        linear_rows_from_graph(&cs, &d, &spec, &mut checks);
        if g.n() <= opts.sim_bound {
            let ws = WalkSystem::<f64>::from_graph(&g)?;
            spectrum_match(&ws, &spec.eigenvalue_multiset(), &mut checks);
            let partner = cs.z_partner();
            let pairs = sample_pairs(&partner, 0, opts.full_pairs_bound);
            let chk = transfer_check(&ws, &pairs, cert.tau)?;
            simulation_agreement(&ws, &cert, chk.max_deviation, &mut checks)?;
            checks.push(CrossCheck::new(
                "transfer-timing",
                chk.max_half_time_fidelity < 1.0 - 1e-3
                    && chk.min_return_fidelity > 1.0 - FIDELITY_TOL,
                format!(
                    "max fidelity at tau/2 {:.3e}, min return at 2tau {:.12}",
                    chk.max_half_time_fidelity, chk.min_return_fidelity
                ),
            ));
            cert = cert.with_fidelity(chk.max_deviation, FIDELITY_TOL);
            simulation = Some(chk);
        }
        graph = Some(g);
    }
    let e = setup.field();
    let report = Report {
        schema: SCHEMA.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: "orbital".into(),
        family: "orbital".into(),
        q,
        fields: FieldInfo::of(setup.tower()),
        connection_set: None,
        orbital: Some(OrbitalInfo {
            zeta: e.format(setup.zeta()),
            rep_set: setup.rep_set().iter().map(|x| e.format(*x)).collect(),
            cosets: setup.coset_count(),
            explicit,
            d_part_divisible_by_four: spec.all_e_divisible_by_four(),
        }),
        spectrum: SpectrumSection::Orbital(spec),
        certificate: cert,
        simulation,
        cross_checks: checks,
        formula_checks: FormulaChecks::Orbital(formula),
        errata,
        notes: vec![PARITY_NOTE.to_string()],
    };
    Ok(Run { report, graph })
}

fn orbital_structure_checks(cs: &CosetSpace, checks: &mut Vec<CrossCheck>) -> Result<()> {
    let s = cs.setup();
    checks.push(CrossCheck::new(
        "coset-count",
        cs.len() as u64 == s.coset_count(),
        format!("{} cosets", cs.len()),
    ));
    checks.push(CrossCheck::new(
        "coset-representatives",
        cs.representatives_distinct(),
        "x^-1 y not in H for distinct representatives",
    ));
    checks.push(CrossCheck::new(
        "double-coset-invariant",
        cs.invariant_matches_literal()?,
        format!(
            "{} elements compared with the H-orbits on G/H",
            cs.elements().len()
        ),
    ));
    let lit = cs.literal_double_cosets();
    let rank = lit.iter().max().map_or(0, |m| m + 1);
    let irr = orbital_irreps(s.q());
    checks.push(CrossCheck::new(
        "multiplicity-free",
        rank == irr.len(),
        format!("{rank} double cosets, {} constituents", irr.len()),
    ));
    let rows = cs.normalizer_relations()?;
    let involutions = rows.iter().filter(|r| r.involution).count();
    checks.push(CrossCheck::new(
        "normalizer-relations",
        rows.iter().all(|r| r.consistent) && involutions >= 1,
        format!(
            "{} permutation relations, {involutions} involution(s)",
            rows.iter().filter(|r| r.permutation).count()
        ),
    ));
    let partner = cs.z_partner();
    let fpf = (0..cs.len()).all(|i| partner[i] != i && partner[partner[i]] == i);
    checks.push(CrossCheck::new(
        "z-involution",
        fpf,
        "A_z is a fixed-point-free involution",
    ));

    let n = s.field().units_order();
    let mut coset_ok = true;
    for chi in &irr {
        for (x, y) in s.m_pairs() {
            coset_ok &=
                s.coset_char_sum(chi, x, y)? == cs.literal_coset_sum(chi, &Mat2::diag(x, y));
        }
        coset_ok &= cs.literal_coset_sum(chi, &s.z()).integer_part()?
            == s.h_order() as i64 * s.z_sign(chi)?;
    }
    checks.push(CrossCheck::new(
        "coset-sums-literal",
        coset_ok,
        "formula against sums over gH in the projective-line model",
    ));
    let mut m_ok = true;
    let mut mult_ok = true;
    for j1 in 0..n {
        for j2 in 0..n {
            m_ok &= s.m_theta(j1, j2)? == cs.literal_m_theta(j1, j2);
            let lit = cs
                .literal_principal_sum(j1, j2, &Mat2::identity())
                .integer_part()?;
            mult_ok &= lit == s.h_order() as i64 * principal_h_multiplicity(s.q(), j1, j2) as i64;
        }
    }
    checks.push(CrossCheck::new(
        "m-theta-literal",
        m_ok,
        format!("{} characters of the torus", n * n),
    ));
    checks.push(CrossCheck::new(
        "h-multiplicity-literal",
        mult_ok,
        "<1, I[theta]|_H> from fixed points",
    ));
    let (counts, nonsplit) = cs.unipotent_type_counts();
    let qq = (s.q() as u64).pow(2);
    checks.push(CrossCheck::new(
        "cuspidal-exclusion",
        counts.iter().all(|&c| c == qq - 1) && nonsplit == 0,
        format!("unipotent-type counts {counts:?}, nonsplit {nonsplit}"),
    ));
    Ok(())
}

/// 𝓔_λ read off the neighbourhood of H in D: Σ_{yH ~ H} λ(det y).
fn linear_rows_from_graph(
    cs: &CosetSpace,
    d: &Graph,
    spec: &crate::orbital::OrbitalSpectrum,
    checks: &mut Vec<CrossCheck>,
) {
    let f = cs.setup().field();
    let mut ok = true;
    for row in &spec.rows {
        let OrbitalIrr::Linear(j) = row.irr else {
            continue;
        };
        let lam = crate::charring::MultChar::new(f.units_order(), j as i64);
        let mut acc = crate::charring::CycSum::zero(f.units_order());
        for &y in d.neighbors(0) {
            acc.add_root(
                lam.exponent(f.log(cs.representatives()[y].det(f)).expect("unit") as u64) as u64,
                1,
            );
        }
        ok &= acc.integer_part().ok() == Some(row.e);
    }
    checks.push(CrossCheck::new(
        "linear-eigenvalues-from-graph",
        ok,
        "E_lambda from the row of H in D",
    ));
}
