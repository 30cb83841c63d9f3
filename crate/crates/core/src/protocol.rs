//! Exact simulation of the nested random access coding game.
//!
//! Alice holds `N = 2^n` uniform bits and sends a single bit to Bob, who
//! must guess bit `K` for a uniformly chosen `K`. They share `N - 1`
//! independent copies of a box, arranged as a binary pyramid:
//!
//! * At the bottom level box `j` receives `x = a_{2j} ⊕ a_{2j+1}` from Alice,
//!   who replaces the pair by `a_{2j} ⊕ A_j`. Each level halves the number of
//!   bits until a single bit remains; that bit is the message.
//! * Bob walks from the top of the pyramid down to leaf `K`, feeding each box
//!   on his path the corresponding bit of `K` (most significant at the top),
//!   and XORs the box outputs into the message.
//!
//! Bob's guess is correct exactly when the parity of the errors
//! `A ⊕ B ⊕ xy` along his path is zero, so only the `n` boxes on that path
//! matter. The value held by the sibling subtree at each level is a uniform
//! bit independent of the path, and the simulation enumerates it together
//! with the box outcomes along the path.

use serde::{Deserialize, Serialize};

use crate::boxes::NsBox;
use crate::criteria::CRITERION_TOL;
use crate::error::{Error, Result};

/// Deepest pyramid accepted by [`simulate`].
pub const MAX_DEPTH: u32 = 6;

/// Bits communicated from Alice to Bob.
pub const MESSAGE_BITS: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProtocolConfig {
    depth: u32,
}

impl ProtocolConfig {
    pub fn new(depth: u32) -> Result<ProtocolConfig> {
        if depth == 0 {
            return Err(Error::ZeroDepth);
        }
        if depth > MAX_DEPTH {
            return Err(Error::DepthTooLarge {
                depth,
                max: MAX_DEPTH,
            });
        }
        Ok(ProtocolConfig { depth })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Number of Alice's bits, `N = 2^n`.
    pub fn n_bits(&self) -> usize {
        1 << self.depth
    }

    pub fn box_count(&self) -> usize {
        self.n_bits() - 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    pub n: u32,
    #[serde(rename = "N")]
    pub n_bits: usize,
    /// `P(β = a_K | b = K)` for each `K`.
    pub success: Vec<f64>,
    /// `I(a_K : β | b = K)` in bits.
    pub per_bit_info: Vec<f64>,
    /// Sum of `per_bit_info`.
    #[serde(rename = "I")]
    pub total_info: f64,
    /// Joint distribution `P(a_K, β | b = K)`, indexed `[K][a_K][β]`.
    #[serde(skip)]
    pub joint: Vec<[[f64; 2]; 2]>,
}

impl ProtocolResult {
    pub fn violates_ic(&self) -> bool {
        self.total_info > MESSAGE_BITS + CRITERION_TOL
    }
}

/// `(P_I, P_II)`: the probability that `a ⊕ b = xy` for uniform `x` with
/// Bob's input fixed to 0 and to 1 respectively.
pub fn one_level_success(bx: &NsBox) -> Result<(f64, f64)> {
    bx.ensure_valid()?;
    let same = |x: usize, y: usize| bx.prob(x, y, 0, 0) + bx.prob(x, y, 1, 1);
    let differ = |x: usize, y: usize| bx.prob(x, y, 0, 1) + bx.prob(x, y, 1, 0);
    let p1 = 0.5 * (same(0, 0) + same(1, 0));
    let p2 = 0.5 * (same(0, 1) + differ(1, 1));
    Ok((p1, p2))
}

/// `h(p) = -p log2 p - (1 - p) log2 (1 - p)`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q <= 0.0 { 0.0 } else { -q * q.log2() };
    term(p) + term(1.0 - p)
}

/// Shannon mutual information in bits of a 2x2 joint distribution.
pub fn mutual_information(joint: &[[f64; 2]; 2]) -> f64 {
    let row = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let col = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let mut info = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let p = joint[i][j];
            if p > 0.0 {
                info += p * (p / (row[i] * col[j])).log2();
            }
        }
    }
    info.max(0.0)
}

/// Joint distribution of `(a_K, β)` for one target bit `K`.
fn target_joint(bx: &NsBox, depth: u32, target: usize) -> [[f64; 2]; 2] {
    // state[a_K][value held on the path][parity of Bob's outputs so far]
    let mut state = [[[0.0f64; 2]; 2]; 2];
    state[0][0][0] = 0.5;
    state[1][1][0] = 0.5;
    for level in 0..depth {
        let y = (target >> level) & 1;
        let mut next = [[[0.0f64; 2]; 2]; 2];
        for a_k in 0..2 {
            for held in 0..2 {
                for parity in 0..2 {
                    let weight = state[a_k][held][parity];
                    if weight == 0.0 {
                        continue;
                    }
                    for sibling in 0..2 {
                        let x = held ^ sibling;
                        // Alice keeps the left child XOR her output.
                        let left = if y == 1 { sibling } else { held };
                        for a in 0..2 {
                            for b in 0..2 {
                                let p = bx.prob(x, y, a, b);
                                if p != 0.0 {
                                    next[a_k][left ^ a][parity ^ b] += 0.5 * weight * p;
                                }
                            }
                        }
                    }
                }
            }
        }
        state = next;
    }
    let mut joint = [[0.0; 2]; 2];
    for (a_k, row) in state.iter().enumerate() {
        for (message, parities) in row.iter().enumerate() {
            for (parity, &w) in parities.iter().enumerate() {
                joint[a_k][message ^ parity] += w;
            }
        }
    }
    joint
}

/// Runs the depth-`n` protocol exactly.
pub fn simulate(bx: &NsBox, depth: u32) -> Result<ProtocolResult> {
    bx.ensure_valid()?;
    let config = ProtocolConfig::new(depth)?;
    let joint: Vec<[[f64; 2]; 2]> = (0..config.n_bits())
        .map(|k| target_joint(bx, depth, k))
        .collect();
    let success = joint.iter().map(|j| j[0][0] + j[1][1]).collect();
    let per_bit_info: Vec<f64> = joint.iter().map(mutual_information).collect();
    let total_info = per_bit_info.iter().sum();
    Ok(ProtocolResult {
        n: depth,
        n_bits: config.n_bits(),
        success,
        per_bit_info,
        total_info,
        joint,
    })
}

/// Smallest depth `n <= n_max` at which the protocol yields more than one
/// bit of information.
pub fn min_violating_depth(bx: &NsBox, n_max: u32) -> Result<Option<u32>> {
    bx.ensure_valid()?;
    if n_max > MAX_DEPTH {
        return Err(Error::DepthTooLarge {
            depth: n_max,
            max: MAX_DEPTH,
        });
    }
    for depth in 1..=n_max {
        if simulate(bx, depth)?.violates_ic() {
            return Ok(Some(depth));
        }
    }
    Ok(None)
}
