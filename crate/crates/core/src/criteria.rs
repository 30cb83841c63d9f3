//! Locality, quantumness and information-causality tests on a single box.
//!
//! Every criterion reports a signed margin that is positive inside the
//! allowed region. A criterion counts as satisfied when its margin is at
//! least `-CRITERION_TOL`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::boxes::{Correlators, NsBox};
use crate::error::{Error, Result};

pub const CRITERION_TOL: f64 = 1e-9;

/// Local (classical) bound of every CHSH expression.
pub const LOCAL_BOUND: f64 = 2.0;

/// Tsirelson's bound, the quantum maximum of CHSH.
pub const TSIRELSON_BOUND: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Below this, `1 - C^2` is treated as zero when normalising correlators.
const SINGULAR_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub satisfied: bool,
    pub margin: f64,
}

impl CriterionResult {
    pub fn from_margin(margin: f64) -> CriterionResult {
        CriterionResult {
            satisfied: margin >= -CRITERION_TOL,
            margin,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// No CHSH inequality is violated.
    Local,
    /// Non-local, passes IC, not excluded by NPA or TLM. This is not a proof
    /// of quantum realisability.
    QuantumConsistent,
    /// Excluded by NPA or TLM but not flagged by the IC condition.
    PostquantumIcOk,
    IcViolating,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Local => "LOCAL",
            Verdict::QuantumConsistent => "QUANTUM_CONSISTENT",
            Verdict::PostquantumIcOk => "POSTQUANTUM_IC_OK",
            Verdict::IcViolating => "IC_VIOLATING",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub chsh_max: f64,
    pub local: bool,
    pub tlm: CriterionResult,
    pub npa: CriterionResult,
    pub ic: CriterionResult,
    pub verdict: Verdict,
}

/// Sign patterns over `(C00, C01, C10, C11)` with an odd number of minus
/// signs, canonical `+ + + -` first. Bit `3 - k` of the mask flips term `k`.
const ODD_PATTERNS: [u8; 8] = [
    0b0001, 0b0010, 0b0100, 0b1000, 0b0111, 0b1011, 0b1101, 0b1110,
];

/// Even sign patterns; each is realised by local output flips.
const EVEN_PATTERNS: [u8; 8] = [
    0b0000, 0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100, 0b1111,
];

#[inline]
fn signed_terms(mask: u8, terms: [f64; 4]) -> [f64; 4] {
    let mut out = terms;
    for (k, t) in out.iter_mut().enumerate() {
        if mask >> (3 - k) & 1 == 1 {
            *t = -*t;
        }
    }
    out
}

#[inline]
fn flat(cf: &Correlators) -> [f64; 4] {
    [cf.cxy[0][0], cf.cxy[0][1], cf.cxy[1][0], cf.cxy[1][1]]
}

/// The eight CHSH expressions `±C00 ± C01 ± C10 ± C11` (odd number of minus
/// signs), starting with `C00 + C01 + C10 - C11`.
pub fn chsh_values(cf: &Correlators) -> [f64; 8] {
    let terms = flat(cf);
    ODD_PATTERNS.map(|mask| signed_terms(mask, terms).iter().sum())
}

pub fn chsh_max(cf: &Correlators) -> f64 {
    chsh_values(cf)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Landau's form of the TLM criterion,
/// `|C00 C10 - C01 C11| <= Σ_j sqrt((1 - C0j^2)(1 - C1j^2))`.
pub fn tlm(cf: &Correlators) -> CriterionResult {
    let c = &cf.cxy;
    let lhs = (c[0][0] * c[1][0] - c[0][1] * c[1][1]).abs();
    let rhs: f64 = (0..2)
        .map(|j| ((1.0 - c[0][j] * c[0][j]).max(0.0) * (1.0 - c[1][j] * c[1][j]).max(0.0)).sqrt())
        .sum();
    CriterionResult::from_margin(rhs - lhs)
}

/// `D_xy = (C_xy - C_x C_y) / sqrt((1 - C_x^2)(1 - C_y^2))`, with `D_xy = 0`
/// where a marginal is deterministic.
pub fn normalised_correlators(cf: &Correlators) -> Result<[[f64; 2]; 2]> {
    let mut d = [[0.0; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            let va = (1.0 - cf.cx[x] * cf.cx[x]).max(0.0);
            let vb = (1.0 - cf.cy[y] * cf.cy[y]).max(0.0);
            let cov = cf.cxy[x][y] - cf.cx[x] * cf.cy[y];
            if va < SINGULAR_TOL || vb < SINGULAR_TOL {
                // The deterministic side forces C_xy = C_x C_y.
                if cov.abs() > CRITERION_TOL + (va * vb).sqrt() {
                    return Err(Error::SingularMarginal {
                        x,
                        y,
                        cxy: cf.cxy[x][y],
                        product: cf.cx[x] * cf.cy[y],
                    });
                }
                continue;
            }
            let value = cov / (va * vb).sqrt();
            if value.abs() > 1.0 + CRITERION_TOL {
                return Err(Error::DOutOfRange { x, y, value });
            }
            d[x][y] = value.clamp(-1.0, 1.0);
        }
    }
    Ok(d)
}

/// NPA arcsine criterion `|asin D00 + asin D01 + asin D10 - asin D11| <= π`,
/// taken over all eight CHSH orientations so that the verdict does not
/// depend on how the box is labelled.
pub fn npa(cf: &Correlators) -> Result<CriterionResult> {
    let d = normalised_correlators(cf)?;
    let angles = [
        d[0][0].asin(),
        d[0][1].asin(),
        d[1][0].asin(),
        d[1][1].asin(),
    ];
    let worst = ODD_PATTERNS
        .iter()
        .map(|&mask| signed_terms(mask, angles).iter().sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CriterionResult::from_margin(PI - worst))
}

/// Success probabilities of the two one-level random access code strategies
/// written in correlators: `P_I = (2 + C00 + C10)/4`, `P_II = (2 + C01 - C11)/4`.
pub fn one_level_from_correlators(cf: &Correlators) -> (f64, f64) {
    let c = &cf.cxy;
    (
        0.25 * (2.0 + c[0][0] + c[1][0]),
        0.25 * (2.0 + c[0][1] - c[1][1]),
    )
}

/// `E_I^2 + E_II^2` with `E_j = 2 P_j - 1`; IC is violated once this exceeds 1.
pub fn ic_quadratic(cf: &Correlators) -> f64 {
    let (p1, p2) = one_level_from_correlators(cf);
    let e1 = 2.0 * p1 - 1.0;
    let e2 = 2.0 * p2 - 1.0;
    e1 * e1 + e2 * e2
}

/// The IC quantity maximised over the images of `cf` under local output
/// flips (one per CHSH orientation) and under exchanging the sender's role
/// between Alice and Bob.
pub fn ic_quadratic_symmetric(cf: &Correlators) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for form in [*cf, cf.swap_parties()] {
        let terms = flat(&form);
        for mask in EVEN_PATTERNS {
            let [c00, c01, c10, c11] = signed_terms(mask, terms);
            let image = Correlators::unbiased(c00, c01, c10, c11);
            best = best.max(ic_quadratic(&image));
        }
    }
    best
}

pub fn ic(cf: &Correlators, use_symmetries: bool) -> CriterionResult {
    let q = if use_symmetries {
        ic_quadratic_symmetric(cf)
    } else {
        ic_quadratic(cf)
    };
    CriterionResult::from_margin(1.0 - q)
}

/// Classifies a box, maximising the IC condition over its symmetry images.
pub fn classify(bx: &NsBox) -> Result<Classification> {
    classify_with(bx, true)
}

pub fn classify_with(bx: &NsBox, ic_symmetries: bool) -> Result<Classification> {
    let cf = bx.correlators()?;
    classify_correlators(&cf, ic_symmetries)
}

pub fn classify_correlators(cf: &Correlators, ic_symmetries: bool) -> Result<Classification> {
    let chsh_max = chsh_max(cf);
    let local = chsh_max <= LOCAL_BOUND + CRITERION_TOL;
    let tlm = tlm(cf);
    let npa = npa(cf)?;
    let ic = ic(cf, ic_symmetries);
    let verdict = if local {
        Verdict::Local
    } else if !ic.satisfied {
        Verdict::IcViolating
    } else if npa.satisfied && tlm.satisfied {
        Verdict::QuantumConsistent
    } else {
        Verdict::PostquantumIcOk
    };
    Ok(Classification {
        chsh_max,
        local,
        tlm,
        npa,
        ic,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{mix, Vertex, VertexKind};

    fn iso(alpha: f64) -> Correlators {
        Correlators::unbiased(alpha, alpha, alpha, -alpha)
    }

    fn family2_point() -> Correlators {
        Correlators {
            cxy: [[0.9, 0.9], [0.9, 0.1]],
            cx: [0.5; 2],
            cy: [0.5; 2],
        }
    }

    #[test]
    fn chsh_of_pr() {
        let v = chsh_values(&iso(1.0));
        assert_eq!(v[0], 4.0);
        assert!(v[1..].iter().all(|&s| s <= 0.0));
    }

    #[test]
    fn chsh_at_tsirelson_point() {
        let a = std::f64::consts::FRAC_1_SQRT_2;
        assert!((chsh_max(&iso(a)) - TSIRELSON_BOUND).abs() < 1e-15);
    }

    #[test]
    fn chsh_of_local_vertices() {
        for v in Vertex::all()
            .into_iter()
            .filter(|v| v.kind() == VertexKind::Local)
        {
            let cf = v.to_box().correlators().unwrap();
            let vals = chsh_values(&cf);
            assert!(vals.iter().all(|&s| s == 2.0 || s == -2.0), "{v}");
            assert_eq!(chsh_max(&cf), 2.0);
        }
    }

    #[test]
    fn tlm_isotropic_margin() {
        for alpha in [0.0, 0.3, 0.5, 0.7, 0.75, 1.0] {
            let r = tlm(&iso(alpha));
            let expect = 2.0 * (1.0 - alpha * alpha) - 2.0 * alpha * alpha;
            assert!((r.margin - expect).abs() < 1e-14, "{alpha}");
        }
        assert!(tlm(&iso(std::f64::consts::FRAC_1_SQRT_2 - 1e-6)).satisfied);
        assert!(!tlm(&iso(std::f64::consts::FRAC_1_SQRT_2 + 1e-6)).satisfied);
    }

    #[test]
    fn tlm_extremes() {
        let noise = tlm(&Correlators::default());
        assert!(noise.satisfied);
        assert_eq!(noise.margin, 2.0);
        let pr = tlm(&iso(1.0));
        assert!(!pr.satisfied);
        assert_eq!(pr.margin, -2.0);
    }

    #[test]
    fn npa_family2_point_violated() {
        let r = npa(&family2_point()).unwrap();
        assert!(!r.satisfied);
        let d = (0.9 - 0.25) / 0.75;
        let sum = 3.0 * f64::asin(d) - f64::asin((0.1 - 0.25) / 0.75);
        assert!((r.margin - (PI - sum)).abs() < 1e-14);
        assert!(sum > 3.34 && sum < 3.36);
    }

    #[test]
    fn npa_deterministic_box() {
        let cf = Vertex::Local {
            mu: false,
            nu: false,
            sigma: false,
            tau: false,
        }
        .to_box()
        .correlators()
        .unwrap();
        assert_eq!(normalised_correlators(&cf).unwrap(), [[0.0; 2]; 2]);
        let r = npa(&cf).unwrap();
        assert!(r.satisfied);
        assert_eq!(r.margin, PI);
    }

    #[test]
    fn npa_errors() {
        let cf = Correlators {
            cxy: [[0.0, 0.0], [0.0, 0.0]],
            cx: [1.0, 0.0],
            cy: [0.5, 0.0],
        };
        assert!(matches!(
            npa(&cf),
            Err(Error::SingularMarginal { x: 0, y: 0, .. })
        ));
        let cf = Correlators {
            cxy: [[0.9, 0.0], [0.0, 0.0]],
            cx: [0.5, 0.0],
            cy: [-0.5, 0.0],
        };
        assert!(matches!(
            npa(&cf),
            Err(Error::DOutOfRange { x: 0, y: 0, .. })
        ));
    }

    #[test]
    fn npa_matches_tlm_on_unbiased_examples() {
        for alpha in [0.2, 0.5, 0.7, 0.71, 0.9] {
            assert_eq!(
                npa(&iso(alpha)).unwrap().satisfied,
                tlm(&iso(alpha)).satisfied
            );
        }
        // PR2 orientation: only visible to NPA through the symmetry maximum.
        let pr2 = Correlators::unbiased(0.8, -0.8, 0.8, 0.8);
        assert!(!tlm(&pr2).satisfied);
        assert!(!npa(&pr2).unwrap().satisfied);
    }

    #[test]
    fn ic_quadratic_examples() {
        for alpha in [0.0, 0.4, 0.7, 1.0] {
            assert!((ic_quadratic(&iso(alpha)) - 2.0 * alpha * alpha).abs() < 1e-15);
        }
        assert_eq!(ic_quadratic(&iso(1.0)), 2.0);
        assert_eq!(ic_quadratic(&Correlators::default()), 0.0);
        assert!((ic_quadratic(&family2_point()) - 0.97).abs() < 1e-12);
    }

    #[test]
    fn ic_on_pr2_circle() {
        let (a, b) = (0.5, 0.5);
        let cf = Correlators::unbiased(a + b, a - b, a + b, -a + b);
        let r = ic(&cf, false);
        assert_eq!(r.margin, 0.0);
        assert!(r.satisfied);
    }

    #[test]
    fn ic_symmetries_recognise_relabelled_pr() {
        // PR with Alice flipping her output on x = 1.
        let flipped = Correlators::unbiased(0.9, 0.9, -0.9, 0.9);
        assert!(ic(&flipped, false).satisfied);
        assert!(!ic(&flipped, true).satisfied);
        let anti = Correlators::unbiased(-0.9, -0.9, -0.9, 0.9);
        assert_eq!(ic(&anti, true).satisfied, ic(&iso(0.9), true).satisfied);
        let anti = Correlators::unbiased(-0.6, -0.6, -0.6, 0.6);
        assert_eq!(ic(&anti, true).satisfied, ic(&iso(0.6), true).satisfied);
    }

    #[test]
    fn ic_local_vertices_satisfied() {
        for v in Vertex::all()
            .into_iter()
            .filter(|v| v.kind() == VertexKind::Local)
        {
            let cf = v.to_box().correlators().unwrap();
            assert!(ic_quadratic_symmetric(&cf) <= 1.0);
            assert!(ic(&cf, true).satisfied);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(
            classify(&NsBox::pr()).unwrap().verdict,
            Verdict::IcViolating
        );
        let tsirelson = NsBox::isotropic(std::f64::consts::FRAC_1_SQRT_2).unwrap();
        let c = classify(&tsirelson).unwrap();
        assert_eq!(c.verdict, Verdict::QuantumConsistent);
        assert!(c.ic.margin.abs() < 1e-15);
        let b = Vertex::Local {
            mu: false,
            nu: false,
            sigma: false,
            tau: false,
        }
        .to_box();
        let point = mix(&[0.4, 0.5, 0.1], &[NsBox::pr(), b, NsBox::white_noise()]).unwrap();
        let c = classify(&point).unwrap();
        assert_eq!(c.verdict, Verdict::PostquantumIcOk);
        assert_eq!(
            classify(&NsBox::white_noise()).unwrap().verdict,
            Verdict::Local
        );
    }

    #[test]
    fn classification_serialises_verdict_names() {
        let c = classify(&NsBox::pr()).unwrap();
        let json = serde_json::to_value(c).unwrap();
        assert_eq!(json["verdict"], "IC_VIOLATING");
        assert_eq!(json["ic"]["satisfied"], false);
        assert!(json["tlm"]["margin"].is_number());
    }
}
