//! Fixtures shared by the criterion benchmarks.

use boxlab_core::{mix, NsBox, Vertex};

/// A deterministic spread of boxes: every vertex plus mixtures of
/// neighbouring vertices with white noise.
pub fn sample_boxes() -> Vec<NsBox> {
    let vertices: Vec<NsBox> = Vertex::all().iter().map(Vertex::to_box).collect();
    let mut out = vertices.clone();
    for (k, pair) in vertices.windows(2).enumerate() {
        let w = 0.1 + 0.8 * (k as f64 / vertices.len() as f64);
        let rest = 1.0 - w;
        out.push(
            mix(
                &[w * 0.6, w * 0.4, rest],
                &[pair[0], pair[1], NsBox::white_noise()],
            )
            .expect("weights sum to one"),
        );
    }
    out
}
