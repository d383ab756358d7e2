use pst_core::cayley::Variant;
use pst_core::grp::Family;
use pst_core::pipeline::{run_cayley, run_orbital, RunOptions};
use pst_core::report::{SpectrumSection, EXIT_OK};
use pst_core::Error;

#[test]
fn every_family_certifies_across_q() {
    let opts = RunOptions::default();
    for (family, qs) in [
        (Family::Gl, &[3u32, 5, 7, 9][..]),
        (Family::Gu, &[3, 5, 7, 9]),
        (Family::Sl, &[3, 5, 7]),
    ] {
        for &q in qs {
            let run = run_cayley(family, q, Variant::Standard, &opts).unwrap();
            let r = &run.report;
            assert!(r.certificate.valid, "{family} q={q}");
            assert_eq!(
                r.exit_code(),
                EXIT_OK,
                "{family} q={q}: {:?}",
                r.cross_checks
            );
            let SpectrumSection::Cayley(t) = &r.spectrum else {
                panic!()
            };
            let total: u64 = t.rows.iter().map(|x| x.multiplicity).sum();
            assert_eq!(total, r.certificate.vertices);
        }
    }
}

#[test]
fn orbital_certifies_for_three_mod_four() {
    for q in [3, 7, 11] {
        let r = run_orbital(q, &RunOptions::default()).unwrap().report;
        assert!(r.certificate.valid, "q={q}");
        assert!(r.orbital.as_ref().unwrap().d_part_divisible_by_four);
        assert_eq!(r.exit_code(), EXIT_OK);
    }
    assert_eq!(
        run_orbital(5, &RunOptions::default()).unwrap_err(),
        Error::NotThreeModFour(5)
    );
}

#[test]
fn bounds_switch_to_character_sums() {
    let tight = RunOptions {
        enumeration_bound: 10,
        sim_bound: 10,
        full_pairs_bound: 10,
    };
    let run = run_cayley(Family::Gl, 3, Variant::Standard, &tight).unwrap();
    assert!(run.graph.is_none() && run.report.simulation.is_none());
    assert!(run.report.certificate.valid);
    let run = run_orbital(3, &tight).unwrap();
    assert!(run.graph.is_none() && !run.report.orbital.unwrap().explicit);
}

#[test]
fn reports_are_deterministic() {
    let a = run_orbital(3, &RunOptions::default()).unwrap().report;
    let b = run_orbital(3, &RunOptions::default()).unwrap().report;
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    let a = run_cayley(Family::Gu, 5, Variant::Standard, &RunOptions::default())
        .unwrap()
        .report;
    let b = run_cayley(Family::Gu, 5, Variant::Standard, &RunOptions::default())
        .unwrap()
        .report;
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(a.spectrum_csv().unwrap(), b.spectrum_csv().unwrap());
}

#[test]
fn report_records_field_choices() {
    let r = run_orbital(3, &RunOptions::default()).unwrap().report;
    let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    for key in [
        "base_modulus",
        "ext_modulus",
        "base_generator",
        "ext_generator",
        "delta",
        "sqrt_delta",
    ] {
        assert!(v["fields"][key].is_string(), "{key}");
    }
    assert!(v["orbital"]["zeta"].is_string());
    assert_eq!(v["orbital"]["rep_set"].as_array().unwrap().len(), 4);
}

#[test]
fn orbital_csv_has_d_part_column() {
    let r = run_orbital(3, &RunOptions::default()).unwrap().report;
    let csv = r.spectrum_csv().unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().ends_with(",d-part"));
    assert_eq!(lines.count(), 16);
}
