//! Closed-form logical error rates from fault counting.
//!
//! Rates are `c₂·p² + c₁·ε·p`. The linear term is attached to the `total`
//! label of the gadgets that have one.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Above this `p` the quadratic expansion is no longer trustworthy.
pub const VALIDITY_LIMIT: f64 = 5e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coefficient {
    pub gadget: &'static str,
    pub label: &'static str,
    pub quadratic: f64,
    pub linear: f64,
}

const fn c(gadget: &'static str, label: &'static str, quadratic: f64, linear: f64) -> Coefficient {
    Coefficient {
        gadget,
        label,
        quadratic,
        linear,
    }
}

/// Stored coefficients, as tabulated.
pub const COEFFICIENTS: &[Coefficient] = &[
    c("rqec", "X", 129.2, 0.0),
    c("rqec", "Y", 13.3, 0.0),
    c("rqec", "Z", 106.8, 0.0),
    c("rqec", "total", 129.2 + 13.3 + 106.8, 11.8),
    c("qec_overcomplete", "X", 181.7, 0.0),
    c("qec_overcomplete", "Y", 6.7, 0.0),
    c("qec_overcomplete", "Z", 63.3, 0.0),
    c("qec_overcomplete", "total", 181.7 + 6.7 + 63.3, 10.17),
    c("encode_zero", "X", 16.8, 0.0),
    c("logical_cz", "ZI", 7.0, 0.0),
    c("logical_cz", "ZZ", 7.0 / 3.0, 0.0),
    c("t_gate", "Z", 406.0, 0.0),
    c("t_gate", "total", 406.0, 11.5),
    c("ext_encode", "X", 239.5, 0.0),
    c("ext_cz", "ZI", 920.0, 0.0),
    c("ext_cz", "ZZ", 26.8, 0.0),
    c("ext_t", "Z", 1349.0, 0.0),
];

/// Critical non-Z fraction per gadget, roughly the inverse linear coefficient.
pub const EPSILON_CRITICAL: &[(&str, f64)] = &[
    ("rqec", 0.084),
    ("qec_overcomplete", 0.098),
    ("t_gate", 0.086),
];

fn canonical(gadget: &str) -> &str {
    match gadget {
        "ext(encode_zero,rqec,rqec)" => "ext_encode",
        "ext(logical_cz,rqec,rqec)" => "ext_cz",
        "ext(t_gate,qec_overcomplete,rqec)" => "ext_t",
        g => g,
    }
}

pub fn coefficient(gadget: &str, label: &str) -> Result<Coefficient> {
    let g = canonical(gadget);
    COEFFICIENTS
        .iter()
        .find(|c| c.gadget == g && c.label == label)
        .copied()
        .ok_or_else(|| Error::UnknownCoefficient {
            gadget: gadget.to_string(),
            label: label.to_string(),
        })
}

/// Predicted rate, clipped to 1, and whether `p` is past [`VALIDITY_LIMIT`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub rate: f64,
    pub warning: bool,
}

pub fn predicted_rate(gadget: &str, label: &str, p: f64, epsilon: f64) -> Result<Prediction> {
    let c = coefficient(gadget, label)?;
    let rate = c.quadratic * p * p + c.linear * epsilon * p;
    Ok(Prediction {
        rate: rate.min(1.0),
        warning: p > VALIDITY_LIMIT,
    })
}

/// Quadratic coefficients of the bare gadgets and error-correction cycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareCoefficients {
    pub enc_x: f64,
    pub rqec_x: f64,
    pub rqec_y: f64,
    pub rqec_z: f64,
    pub qec_z: f64,
    pub cz_zi: f64,
    pub cz_zz: f64,
    pub t_z: f64,
}

impl BareCoefficients {
    pub fn stored() -> BareCoefficients {
        let q = |g, l| coefficient(g, l).expect("stored").quadratic;
        BareCoefficients {
            enc_x: q("encode_zero", "X"),
            rqec_x: q("rqec", "X"),
            rqec_y: q("rqec", "Y"),
            rqec_z: q("rqec", "Z"),
            qec_z: q("qec_overcomplete", "Z"),
            cz_zi: q("logical_cz", "ZI"),
            cz_zz: q("logical_cz", "ZZ"),
            t_z: q("t_gate", "Z"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtendedCoefficients {
    pub encode_x: f64,
    pub cz_zi: f64,
    pub cz_zz: f64,
    pub t_z: f64,
}

/// Square-root composition of bare rates into extended-rectangle rates.
pub fn extended_rate_composition(b: &BareCoefficients) -> ExtendedCoefficients {
    let s = f64::sqrt;
    ExtendedCoefficients {
        encode_x: (s(b.enc_x) + s(b.rqec_x)).powi(2),
        cz_zi: (2.0 * s(b.rqec_z) + s(b.cz_zi)).powi(2)
            + (s(b.rqec_x) + s(b.rqec_y)) * (s(b.rqec_z) + s(b.rqec_y) + s(b.cz_zi))
            - b.rqec_z,
        cz_zz: (s(b.rqec_y) + s(b.cz_zz)).powi(2),
        t_z: (s(b.rqec_z) + s(b.qec_z) + s(b.t_z)).powi(2) - b.rqec_z,
    }
}

/// `p_c = 1/(c₁₁α² + c₁₂α + c₂₂)`.
pub fn break_even_model(c11: f64, c12: f64, c22: f64, alpha: f64) -> Result<f64> {
    let den = c11 * alpha * alpha + c12 * alpha + c22;
    if !(den > 0.0) {
        return Err(Error::NonPositiveDenominator(den));
    }
    Ok(1.0 / den)
}

/// Least-squares `(c₁₁, c₁₂, c₂₂)` from break-even points measured at several `α`.
pub fn fit_break_even_model(alphas: &[f64], p_c: &[f64]) -> Result<(f64, f64, f64)> {
    if alphas.len() != p_c.len() {
        return Err(Error::DimensionMismatch(alphas.len(), p_c.len()));
    }
    if alphas.len() < 3 || p_c.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::FitDegenerate(
            "need three or more positive break-even points".into(),
        ));
    }
    let m = DMatrix::from_fn(alphas.len(), 3, |i, j| alphas[i].powi(2 - j as i32));
    let y = DVector::from_iterator(p_c.len(), p_c.iter().map(|p| 1.0 / p));
    let sol = m
        .svd(true, true)
        .solve(&y, 1e-12)
        .map_err(|e| Error::FitDegenerate(e.to_string()))?;
    Ok((sol[0], sol[1], sol[2]))
}

pub fn epsilon_critical(gadget: &str) -> Result<f64> {
    EPSILON_CRITICAL
        .iter()
        .find(|(g, _)| *g == gadget)
        .map(|&(_, e)| e)
        .ok_or_else(|| Error::UnknownGadget(gadget.to_string()))
}

/// The coefficient table as CSV.
pub fn coefficients_csv() -> String {
    let mut out = String::from("gadget,label,quadratic,linear,epsilon_critical\n");
    for c in COEFFICIENTS {
        let eps = if c.label == "total" {
            epsilon_critical(c.gadget)
                .map(|e| e.to_string())
                .unwrap_or_default()
        } else {
            String::new()
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            c.gadget, c.label, c.quadratic, c.linear, eps
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictions() {
        let r = predicted_rate("rqec", "X", 1e-3, 0.0).unwrap();
        assert!((r.rate - 1.292e-4).abs() < 1e-12);
        let r = predicted_rate("t_gate", "Z", 1e-2, 0.0).unwrap();
        assert!((r.rate - 4.06e-2).abs() < 1e-12 && !r.warning);
        let r = predicted_rate("t_gate", "Z", 6e-2, 0.0).unwrap();
        assert!(r.rate == 1.0 && r.warning);
        for c in COEFFICIENTS {
            assert_eq!(
                predicted_rate(c.gadget, c.label, 0.0, 0.0).unwrap().rate,
                0.0
            );
        }
        assert!(predicted_rate("rqec", "ZZ", 1e-3, 0.0).is_err());
    }

    #[test]
    fn monotone_in_p_and_epsilon() {
        for c in COEFFICIENTS {
            let f = |p, e| predicted_rate(c.gadget, c.label, p, e).unwrap().rate;
            assert!(f(2e-3, 0.1) > f(1e-3, 0.1));
            assert!(f(1e-3, 0.2) >= f(1e-3, 0.1));
        }
    }

    #[test]
    fn linear_terms_cross_at_critical_epsilon() {
        for (g, eps) in EPSILON_CRITICAL {
            let lin = coefficient(g, "total").unwrap().linear;
            assert!((lin * eps - 1.0).abs() < 0.02, "{g}: {}", lin * eps);
        }
    }

    #[test]
    fn break_even_closed_form() {
        assert!((break_even_model(0.0, 0.0, 200.0, 0.0).unwrap() - 5e-3).abs() < 1e-15);
        assert!((break_even_model(1.0, 2.0, 1.0, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(break_even_model(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn model_fit_recovers_coefficients() {
        let alphas = [0.0, 0.5, 1.0, 2.0];
        let pcs: Vec<f64> = alphas
            .iter()
            .map(|&a| break_even_model(30.0, 150.0, 250.0, a).unwrap())
            .collect();
        let (c11, c12, c22) = fit_break_even_model(&alphas, &pcs).unwrap();
        assert!(
            (c11 - 30.0).abs() < 1e-8 && (c12 - 150.0).abs() < 1e-8 && (c22 - 250.0).abs() < 1e-8
        );
    }
}
