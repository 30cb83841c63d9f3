//! Binary-input/binary-output non-signalling boxes.
//!
//! A box is the conditional distribution `P(ab|xy)` with `a, b, x, y` in
//! `{0, 1}`. Every box in the no-signalling polytope is fixed by eight real
//! coordinates: the four correlators `C_xy` and the two marginals on each
//! side. [`NsBox`] stores the probability table, [`Correlators`] the
//! coordinates, and the two convert into each other exactly.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for normalisation, positivity and no-signalling checks.
pub const VALIDATION_TOL: f64 = 1e-12;

/// Slack on the correlator consistency bound.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Probability table indexed `[x][y][a][b]`.
pub type Table = [[[[f64; 2]; 2]; 2]; 2];

#[inline]
fn sign(bit: usize) -> f64 {
    if bit & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// One of the 24 vertices of the no-signalling polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vertex {
    /// `P_NL^{μνσ}`: `a ⊕ b = xy ⊕ μx ⊕ νy ⊕ σ` with probability 1/2.
    Nonlocal { mu: bool, nu: bool, sigma: bool },
    /// `P_L^{μνστ}`: deterministic `a = μx ⊕ ν`, `b = σy ⊕ τ`.
    Local {
        mu: bool,
        nu: bool,
        sigma: bool,
        tau: bool,
    },
}

impl Vertex {
    pub const PR: Vertex = Vertex::Nonlocal {
        mu: false,
        nu: false,
        sigma: false,
    };

    /// Parses a bit string such as `"010"` (non-local) or `"0000"` (local).
    pub fn parse(kind: VertexKind, bits: &str) -> Result<Vertex> {
        let parsed: Vec<bool> = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBits(bits.to_string())),
            })
            .collect::<Result<_>>()?;
        match (kind, parsed.as_slice()) {
            (VertexKind::Nonlocal, &[mu, nu, sigma]) => Ok(Vertex::Nonlocal { mu, nu, sigma }),
            (VertexKind::Local, &[mu, nu, sigma, tau]) => Ok(Vertex::Local { mu, nu, sigma, tau }),
            _ => Err(Error::InvalidBits(bits.to_string())),
        }
    }

    pub fn kind(&self) -> VertexKind {
        match self {
            Vertex::Nonlocal { .. } => VertexKind::Nonlocal,
            Vertex::Local { .. } => VertexKind::Local,
        }
    }

    /// All 8 non-local vertices followed by all 16 local ones.
    pub fn all() -> Vec<Vertex> {
        let bit = |m: usize, i: usize| (m >> i) & 1 == 1;
        let nonlocal = (0..8).map(|m| Vertex::Nonlocal {
            mu: bit(m, 2),
            nu: bit(m, 1),
            sigma: bit(m, 0),
        });
        let local = (0..16).map(|m| Vertex::Local {
            mu: bit(m, 3),
            nu: bit(m, 2),
            sigma: bit(m, 1),
            tau: bit(m, 0),
        });
        nonlocal.chain(local).collect()
    }

    pub fn to_box(&self) -> NsBox {
        match *self {
            Vertex::Nonlocal { mu, nu, sigma } => NsBox::nonlocal_vertex(mu, nu, sigma),
            Vertex::Local { mu, nu, sigma, tau } => NsBox::local_vertex(mu, nu, sigma, tau),
        }
    }

    /// The bit string, e.g. `"010"`.
    pub fn bits(&self) -> String {
        let b = |v: bool| if v { '1' } else { '0' };
        match *self {
            Vertex::Nonlocal { mu, nu, sigma } => [b(mu), b(nu), b(sigma)].iter().collect(),
            Vertex::Local { mu, nu, sigma, tau } => {
                [b(mu), b(nu), b(sigma), b(tau)].iter().collect()
            }
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Nonlocal { .. } => write!(f, "P_NL^{}", self.bits()),
            Vertex::Local { .. } => write!(f, "P_L^{}", self.bits()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    Nonlocal,
    Local,
}

/// Correlator coordinates of a no-signalling box.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Correlators {
    /// `C_xy`, indexed `[x][y]`.
    pub cxy: [[f64; 2]; 2],
    /// Alice's marginals `C_x`.
    pub cx: [f64; 2],
    /// Bob's marginals `C_y`.
    pub cy: [f64; 2],
}

impl Correlators {
    /// Correlators with vanishing marginals.
    pub fn unbiased(c00: f64, c01: f64, c10: f64, c11: f64) -> Correlators {
        Correlators {
            cxy: [[c00, c01], [c10, c11]],
            cx: [0.0; 2],
            cy: [0.0; 2],
        }
    }

    /// Range and consistency checks; the latter is positivity of the induced
    /// table written as `|C_xy - C_x C_y| <= sqrt((1 - C_x^2)(1 - C_y^2))`.
    pub fn check(&self) -> Result<()> {
        for (x, y, a, b) in entries() {
            let value = self.probability(x, y, a, b);
            if value < -CONSISTENCY_TOL {
                return Err(Error::NegativeProbability { x, y, a, b, value });
            }
        }
        Ok(())
    }

    /// `P(ab|xy) = [1 + (-1)^a C_x + (-1)^b C_y + (-1)^(a⊕b) C_xy] / 4`.
    #[inline]
    pub fn probability(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        0.25 * (1.0 + sign(a) * self.cx[x] + sign(b) * self.cy[y] + sign(a ^ b) * self.cxy[x][y])
    }

    /// Componentwise affine combination `Σ w_i c_i`.
    pub fn combine(weights: &[f64], forms: &[Correlators]) -> Correlators {
        let mut out = Correlators::default();
        for (w, c) in weights.iter().zip(forms) {
            for x in 0..2 {
                out.cx[x] += w * c.cx[x];
                out.cy[x] += w * c.cy[x];
                for y in 0..2 {
                    out.cxy[x][y] += w * c.cxy[x][y];
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Correlators) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            worst = worst.max((self.cx[i] - other.cx[i]).abs());
            worst = worst.max((self.cy[i] - other.cy[i]).abs());
            for j in 0..2 {
                worst = worst.max((self.cxy[i][j] - other.cxy[i][j]).abs());
            }
        }
        worst
    }

    pub fn relabel(&self, r: &Relabelling) -> Correlators {
        let mut out = Correlators::default();
        for x in 0..2 {
            let xs = x ^ r.swap_x as usize;
            out.cx[x] = sign(r.flip_a[xs] as usize) * self.cx[xs];
            for y in 0..2 {
                let ys = y ^ r.swap_y as usize;
                out.cxy[x][y] = sign((r.flip_a[xs] ^ r.flip_b[ys]) as usize) * self.cxy[xs][ys];
            }
        }
        for y in 0..2 {
            let ys = y ^ r.swap_y as usize;
            out.cy[y] = sign(r.flip_b[ys] as usize) * self.cy[ys];
        }
        out
    }

    /// Exchanges the roles of Alice and Bob.
    pub fn swap_parties(&self) -> Correlators {
        Correlators {
            cxy: [
                [self.cxy[0][0], self.cxy[1][0]],
                [self.cxy[0][1], self.cxy[1][1]],
            ],
            cx: self.cy,
            cy: self.cx,
        }
    }
}

fn entries() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|m| ((m >> 3) & 1, (m >> 2) & 1, (m >> 1) & 1, m & 1))
}

/// A local relabelling: optional input flips, then output flips that may
/// depend on the (original) input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Relabelling {
    pub swap_x: bool,
    pub swap_y: bool,
    /// Alice flips her output when her original input is `x`.
    pub flip_a: [bool; 2],
    /// Bob flips his output when his original input is `y`.
    pub flip_b: [bool; 2],
}

impl Relabelling {
    /// All 64 local relabellings.
    pub fn all() -> impl Iterator<Item = Relabelling> {
        (0..64usize).map(|m| Relabelling {
            swap_x: m & 1 == 1,
            swap_y: m & 2 == 2,
            flip_a: [m & 4 == 4, m & 8 == 8],
            flip_b: [m & 16 == 16, m & 32 == 32],
        })
    }
}

/// Outcome of one structural check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub passed: bool,
    pub worst_residual: f64,
}

impl Check {
    fn new(worst_residual: f64) -> Check {
        Check {
            passed: worst_residual <= VALIDATION_TOL,
            worst_residual,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub normalization: Check,
    pub positivity: Check,
    pub no_signalling: Check,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.normalization.passed && self.positivity.passed && self.no_signalling.passed
    }

    fn failures(&self) -> String {
        let mut names = Vec::new();
        for (name, check) in [
            ("normalization", self.normalization),
            ("positivity", self.positivity),
            ("no-signalling", self.no_signalling),
        ] {
            if !check.passed {
                names.push(format!("{name} (residual {:e})", check.worst_residual));
            }
        }
        names.join(", ")
    }
}

/// A conditional probability table `P(ab|xy)`.
///
/// Construction only clamps float noise: entries in `[-1e-12, 0)` become 0.
/// Operations that need a genuine no-signalling box check it themselves and
/// fail with [`Error::InvalidBox`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NsBox {
    p: Table,
}

impl NsBox {
    pub fn from_table(mut p: Table) -> NsBox {
        for (x, y, a, b) in entries() {
            let v = &mut p[x][y][a][b];
            if *v < 0.0 && *v >= -VALIDATION_TOL {
                *v = 0.0;
            }
        }
        NsBox { p }
    }

    pub fn table(&self) -> &Table {
        &self.p
    }

    #[inline]
    pub fn prob(&self, x: usize, y: usize, a: usize, b: usize) -> f64 {
        self.p[x][y][a][b]
    }

    pub fn nonlocal_vertex(mu: bool, nu: bool, sigma: bool) -> NsBox {
        let mut p = Table::default();
        for (x, y, a, b) in entries() {
            let parity = (x & y) ^ (mu as usize & x) ^ (nu as usize & y) ^ sigma as usize;
            if a ^ b == parity {
                p[x][y][a][b] = 0.5;
            }
        }
        NsBox { p }
    }

    pub fn local_vertex(mu: bool, nu: bool, sigma: bool, tau: bool) -> NsBox {
        let mut p = Table::default();
        for (x, y, a, b) in entries() {
            let alice = (mu as usize & x) ^ nu as usize;
            let bob = (sigma as usize & y) ^ tau as usize;
            if a == alice && b == bob {
                p[x][y][a][b] = 1.0;
            }
        }
        NsBox { p }
    }

    /// The canonical PR box, `a ⊕ b = xy`.
    pub fn pr() -> NsBox {
        NsBox::nonlocal_vertex(false, false, false)
    }

    /// Uniform outputs, `P(ab|xy) = 1/4`.
    pub fn white_noise() -> NsBox {
        NsBox {
            p: [[[[0.25; 2]; 2]; 2]; 2],
        }
    }

    /// `α PR + (1 - α) 𝟙`.
    pub fn isotropic(alpha: f64) -> Result<NsBox> {
        mix(&[alpha, 1.0 - alpha], &[NsBox::pr(), NsBox::white_noise()])
    }

    pub fn validate(&self) -> ValidationReport {
        let mut norm: f64 = 0.0;
        let mut neg: f64 = 0.0;
        let mut signalling: f64 = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                let total: f64 = self.p[x][y].iter().flatten().sum();
                norm = norm.max((total - 1.0).abs());
                for row in &self.p[x][y] {
                    for &v in row {
                        neg = neg.max(-v);
                    }
                }
            }
        }
        for i in 0..2 {
            for out in 0..2 {
                // Alice's marginal for input i across Bob's inputs.
                let alice = |y: usize| self.p[i][y][out][0] + self.p[i][y][out][1];
                signalling = signalling.max((alice(0) - alice(1)).abs());
                let bob = |x: usize| self.p[x][i][0][out] + self.p[x][i][1][out];
                signalling = signalling.max((bob(0) - bob(1)).abs());
            }
        }
        ValidationReport {
            normalization: Check::new(norm),
            positivity: Check::new(neg.max(0.0)),
            no_signalling: Check::new(signalling),
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidBox(report.failures()))
        }
    }

    /// Correlators and marginals. Marginals are read from the `y = 0`
    /// (Alice) and `x = 0` (Bob) rows.
    pub fn correlators(&self) -> Result<Correlators> {
        self.ensure_valid()?;
        let mut cf = Correlators::default();
        for x in 0..2 {
            for y in 0..2 {
                let q = &self.p[x][y];
                cf.cxy[x][y] = q[0][0] + q[1][1] - q[0][1] - q[1][0];
            }
            let row = &self.p[x][0];
            cf.cx[x] = row[0][0] + row[0][1] - row[1][0] - row[1][1];
            let col = &self.p[0][x];
            cf.cy[x] = col[0][0] + col[1][0] - col[0][1] - col[1][1];
        }
        Ok(cf)
    }

    /// Rebuilds the table from its correlator coordinates.
    pub fn from_correlators(cf: &Correlators) -> Result<NsBox> {
        let mut p = Table::default();
        for (x, y, a, b) in entries() {
            let value = cf.probability(x, y, a, b);
            if value < -VALIDATION_TOL {
                return Err(Error::NegativeProbability { x, y, a, b, value });
            }
            p[x][y][a][b] = value;
        }
        Ok(NsBox::from_table(p))
    }

    /// Both parties flip their outputs.
    pub fn flip_outputs(&self) -> NsBox {
        let mut p = Table::default();
        for (x, y, a, b) in entries() {
            p[x][y][a][b] = self.p[x][y][a ^ 1][b ^ 1];
        }
        NsBox { p }
    }

    /// Mixes the box half-and-half with its output-flipped twin, which is
    /// what a shared random bit XORed into both outputs produces. Marginals
    /// vanish and the correlators are untouched.
    pub fn unbias(&self) -> Result<NsBox> {
        self.ensure_valid()?;
        let twin = self.flip_outputs();
        let mut p = Table::default();
        for (x, y, a, b) in entries() {
            p[x][y][a][b] = 0.5 * (self.p[x][y][a][b] + twin.p[x][y][a][b]);
        }
        Ok(NsBox { p })
    }

    pub fn relabel(&self, r: &Relabelling) -> NsBox {
        let mut p = Table::default();
        for (x, y, a, b) in entries() {
            let xs = x ^ r.swap_x as usize;
            let ys = y ^ r.swap_y as usize;
            p[x][y][a][b] = self.p[xs][ys][a ^ r.flip_a[xs] as usize][b ^ r.flip_b[ys] as usize];
        }
        NsBox { p }
    }

    /// `P'(ab|xy) = P(ba|yx)`.
    pub fn swap_parties(&self) -> NsBox {
        let mut p = Table::default();
        for (x, y, a, b) in entries() {
            p[x][y][a][b] = self.p[y][x][b][a];
        }
        NsBox { p }
    }

    pub fn max_abs_diff(&self, other: &NsBox) -> f64 {
        entries()
            .map(|(x, y, a, b)| (self.p[x][y][a][b] - other.p[x][y][a][b]).abs())
            .fold(0.0, f64::max)
    }
}

/// Convex combination `Σ w_i box_i`.
pub fn mix(weights: &[f64], boxes: &[NsBox]) -> Result<NsBox> {
    if weights.len() != boxes.len() {
        return Err(Error::LengthMismatch {
            weights: weights.len(),
            boxes: boxes.len(),
        });
    }
    if let Some((index, &weight)) = weights
        .iter()
        .enumerate()
        .find(|(_, &w)| w < -VALIDATION_TOL || w.is_nan())
    {
        return Err(Error::NegativeWeight { index, weight });
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > VALIDATION_TOL {
        return Err(Error::WeightSumMismatch { sum });
    }
    let mut p = Table::default();
    for (w, bx) in weights.iter().zip(boxes) {
        let w = w.max(0.0);
        for (x, y, a, b) in entries() {
            p[x][y][a][b] += w * bx.p[x][y][a][b];
        }
    }
    Ok(NsBox::from_table(p))
}
