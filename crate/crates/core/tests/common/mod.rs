#![allow(dead_code, clippy::needless_range_loop)]

use boxlab_core::{mix, Correlators, NsBox, Vertex};
use rand::Rng;

pub fn vertices() -> Vec<NsBox> {
    Vertex::all().iter().map(Vertex::to_box).collect()
}

/// Random convex combination of a random subset of the 24 vertices and
/// white noise.
pub fn random_box<R: Rng>(rng: &mut R) -> NsBox {
    let mut boxes = vertices();
    boxes.push(NsBox::white_noise());
    let keep = rng.gen_range(1..=boxes.len());
    let mut weights: Vec<f64> = (0..boxes.len())
        .map(|k| {
            if k < keep || rng.gen_bool(0.2) {
                -rng.gen::<f64>().max(1e-300).ln()
            } else {
                0.0
            }
        })
        .collect();
    // Shuffle which vertices get weight.
    for k in (1..weights.len()).rev() {
        let j = rng.gen_range(0..=k);
        weights.swap(k, j);
    }
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    mix(&weights, &boxes).expect("random simplex weights")
}

pub fn random_unbiased<R: Rng>(rng: &mut R) -> Correlators {
    let mut c = || rng.gen_range(-1.0..=1.0);
    Correlators::unbiased(c(), c(), c(), c())
}

/// Joint `P(a_K, β | b = K)` for every `K`, by brute force over all of
/// Alice's bit strings and all joint outcomes of all `N - 1` boxes.
///
/// Boxes are numbered level by level from the bottom; at level `l` box `j`
/// combines nodes `2j` and `2j + 1` of that level. Bob feeds `y = 0` to boxes
/// he never reads.
pub fn naive_protocol(bx: &NsBox, depth: u32) -> Vec<[[f64; 2]; 2]> {
    let n_bits = 1usize << depth;
    let n_boxes = n_bits - 1;
    let level_offset: Vec<usize> = (0..depth as usize)
        .scan(0, |acc, l| {
            let start = *acc;
            *acc += n_bits >> (l + 1);
            Some(start)
        })
        .collect();
    let mut joints = vec![[[0.0; 2]; 2]; n_bits];
    let data_weight = 1.0 / (1u64 << n_bits) as f64;
    for target in 0..n_bits {
        for data in 0..(1usize << n_bits) {
            let bits: Vec<usize> = (0..n_bits).map(|i| (data >> i) & 1).collect();
            for outcomes in 0..(1usize << (2 * n_boxes)) {
                let outcome = |b: usize| ((outcomes >> (2 * b + 1)) & 1, (outcomes >> (2 * b)) & 1);
                let mut prob = data_weight;
                let mut values = bits.clone();
                for l in 0..depth as usize {
                    let mut next = Vec::with_capacity(values.len() / 2);
                    for j in 0..values.len() / 2 {
                        let idx = level_offset[l] + j;
                        let x = values[2 * j] ^ values[2 * j + 1];
                        let y = if j == target >> (l + 1) {
                            (target >> l) & 1
                        } else {
                            0
                        };
                        let (a, b) = outcome(idx);
                        prob *= bx.prob(x, y, a, b);
                        next.push(values[2 * j] ^ a);
                    }
                    values = next;
                }
                if prob == 0.0 {
                    continue;
                }
                let mut guess = values[0];
                for l in (0..depth as usize).rev() {
                    let j = target >> (l + 1);
                    guess ^= outcome(level_offset[l] + j).1;
                }
                joints[target][bits[target]][guess] += prob;
            }
        }
    }
    joints
}
