use mfqec::analytic::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b
}

#[test]
fn stored_values_as_tabulated() {
    let q = |g, l| coefficient(g, l).unwrap().quadratic;
    assert_eq!(q("rqec", "X"), 129.2);
    assert_eq!(q("qec_overcomplete", "X"), 181.7);
    assert_eq!(q("encode_zero", "X"), 16.8);
    assert_eq!(q("logical_cz", "ZI"), 7.0);
    assert_eq!(q("t_gate", "Z"), 406.0);
    assert_eq!(q("ext_cz", "ZI"), 920.0);
    assert_eq!(q("ext(t_gate,qec_overcomplete,rqec)", "Z"), 1349.0);
    assert_eq!(epsilon_critical("qec_overcomplete").unwrap(), 0.098);
    assert_eq!(epsilon_critical("t_gate").unwrap(), 0.086);
    assert_eq!(epsilon_critical("rqec").unwrap(), 0.084);
    assert!(epsilon_critical("logical_h").is_err());
}

#[test]
fn coefficients_positive_and_extended_dominate() {
    for c in COEFFICIENTS {
        assert!(c.quadratic > 0.0);
    }
    let q = |g, l| coefficient(g, l).unwrap().quadratic;
    assert!(q("ext_encode", "X") >= q("encode_zero", "X"));
    assert!(q("ext_cz", "ZI") >= q("logical_cz", "ZI"));
    assert!(q("ext_cz", "ZZ") >= q("logical_cz", "ZZ"));
    assert!(q("ext_t", "Z") >= q("t_gate", "Z"));
}

#[test]
fn composition_against_stored_extended_values() {
    let ext = extended_rate_composition(&BareCoefficients::stored());
    // Independent evaluation of the same square-root sums.
    let enc = (16.8f64.sqrt() + 129.2f64.sqrt()).powi(2);
    assert!((ext.encode_x - enc).abs() < 1e-9);
    assert!(rel(ext.encode_x, 239.5) < 0.01);
    assert!(rel(ext.cz_zz, 26.8) < 0.01);
    // The ZI composition gives about 686, far from the stored 920.
    assert!((ext.cz_zi - 686.4).abs() < 0.1, "{}", ext.cz_zi);
    assert!(rel(ext.cz_zi, 920.0) > 0.25);
    // The T formula lands 1.6% above the stored 1349.
    assert!((ext.t_z - 1370.8).abs() < 0.1, "{}", ext.t_z);
    assert!(rel(ext.t_z, 1349.0) > 0.01 && rel(ext.t_z, 1349.0) < 0.02);
}

#[test]
fn zero_ec_leaves_bare_rates() {
    let mut b = BareCoefficients::stored();
    b.rqec_x = 0.0;
    b.rqec_y = 0.0;
    b.rqec_z = 0.0;
    b.qec_z = 0.0;
    let ext = extended_rate_composition(&b);
    assert!(rel(ext.encode_x, b.enc_x) < 1e-12);
    assert!(rel(ext.cz_zi, b.cz_zi) < 1e-12);
    assert!(rel(ext.cz_zz, b.cz_zz) < 1e-12);
    assert!(rel(ext.t_z, b.t_z) < 1e-12);
}

#[test]
fn csv_dump_lists_every_entry() {
    let csv = coefficients_csv();
    assert_eq!(csv.lines().count(), COEFFICIENTS.len() + 1);
    assert!(csv.contains("t_gate,total,406,11.5,0.086"));
}
