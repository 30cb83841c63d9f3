//! Marching squares over a labelled triangular grid.
//!
//! The grid holds nodes `(i, j)` with `i + j <= last`, i.e. the lower-left
//! half of a square lattice. Each node carries `Some(true)`, `Some(false)` or
//! `None` (not part of either region). Boundary crossings sit at edge
//! midpoints. Square cells cut by the hypotenuse fall back to their
//! lower-left triangle so the contour reaches the diagonal edge.

use std::collections::HashMap;

pub type Point = (f64, f64);
pub type Polyline = Vec<Point>;

/// Edge midpoints in doubled lattice coordinates.
type Key = (u32, u32);

/// Contour segments between `true` and `false` nodes. `label(i, j)` is only
/// called for nodes inside the triangle.
pub fn march_triangle<F>(last: usize, label: F) -> Vec<(Key, Key)>
where
    F: Fn(usize, usize) -> Option<bool>,
{
    let mut segments = Vec::new();
    let mid = |(i0, j0): (usize, usize), (i1, j1): (usize, usize)| -> Key {
        ((i0 + i1) as u32, (j0 + j1) as u32)
    };
    for j in 0..last {
        for i in 0..last - j {
            let c00 = (i, j);
            let c10 = (i + 1, j);
            let c01 = (i, j + 1);
            let full = i + j + 2 <= last;
            let l00 = label(i, j);
            let l10 = label(i + 1, j);
            let l01 = label(i, j + 1);
            if full {
                let c11 = (i + 1, j + 1);
                let l11 = label(i + 1, j + 1);
                let (Some(b00), Some(b10), Some(b11), Some(b01)) = (l00, l10, l11, l01) else {
                    continue;
                };
                // Corners counter-clockwise from the origin.
                let corners = [c00, c10, c11, c01];
                let bits = [b00, b10, b11, b01];
                let case = bits
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (k, &b)| acc | ((b as u8) << k));
                let edge = |k: usize| mid(corners[k], corners[(k + 1) % 4]);
                match case {
                    0 | 15 => {}
                    // Saddles: cut off each `true` corner separately.
                    5 => {
                        segments.push((edge(3), edge(0)));
                        segments.push((edge(1), edge(2)));
                    }
                    10 => {
                        segments.push((edge(0), edge(1)));
                        segments.push((edge(2), edge(3)));
                    }
                    _ => {
                        let crossing: Vec<Key> = (0..4)
                            .filter(|&k| bits[k] != bits[(k + 1) % 4])
                            .map(edge)
                            .collect();
                        segments.push((crossing[0], crossing[1]));
                    }
                }
            } else {
                let (Some(b00), Some(b10), Some(b01)) = (l00, l10, l01) else {
                    continue;
                };
                let corners = [c00, c10, c01];
                let bits = [b00, b10, b01];
                let crossing: Vec<Key> = (0..3)
                    .filter(|&k| bits[k] != bits[(k + 1) % 3])
                    .map(|k| mid(corners[k], corners[(k + 1) % 3]))
                    .collect();
                if crossing.len() == 2 {
                    segments.push((crossing[0], crossing[1]));
                }
            }
        }
    }
    segments
}

/// Chains segments sharing endpoints into polylines, scaled by `step / 2`.
pub fn chain(segments: &[(Key, Key)], step: f64) -> Vec<Polyline> {
    let mut adjacency: HashMap<Key, Vec<usize>> = HashMap::new();
    for (idx, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(idx);
        adjacency.entry(*b).or_default().push(idx);
    }
    let scale = |k: Key| (k.0 as f64 * 0.5 * step, k.1 as f64 * 0.5 * step);
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();

    let walk = |start_seg: usize, from: Key, used: &mut Vec<bool>| -> Vec<Key> {
        let mut keys = vec![from];
        let mut seg = start_seg;
        let mut at = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            let next = if a == at { b } else { a };
            keys.push(next);
            at = next;
            match adjacency[&at].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        keys
    };

    // Open chains start at endpoints of odd degree, so do those first.
    let mut starts: Vec<(Key, usize)> = adjacency
        .iter()
        .filter(|(_, segs)| segs.len() % 2 == 1)
        .map(|(k, segs)| (*k, segs[0]))
        .collect();
    starts.sort_unstable();
    for (key, _) in starts {
        while let Some(&seg) = adjacency[&key].iter().find(|&&s| !used[s]) {
            let keys = walk(seg, key, &mut used);
            lines.push(keys.into_iter().map(scale).collect());
        }
    }
    for idx in 0..segments.len() {
        if !used[idx] {
            let keys = walk(idx, segments[idx].0, &mut used);
            lines.push(keys.into_iter().map(scale).collect());
        }
    }
    lines
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    };
    let (qx, qy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - qx).powi(2) + (p.1 - qy).powi(2)).sqrt()
}

fn distance_to_lines(p: Point, lines: &[Polyline]) -> f64 {
    let mut best = f64::INFINITY;
    for line in lines {
        match line.len() {
            0 => {}
            1 => best = best.min(point_segment_distance(p, line[0], line[0])),
            _ => {
                for w in line.windows(2) {
                    best = best.min(point_segment_distance(p, w[0], w[1]));
                }
            }
        }
    }
    best
}

/// Largest distance from a vertex of `from` to the polylines `to`.
pub fn directed_hausdorff(from: &[Polyline], to: &[Polyline]) -> f64 {
    from.iter()
        .flatten()
        .map(|&p| distance_to_lines(p, to))
        .fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between two sets of polylines, measured
/// from vertices to segments in both directions.
pub fn hausdorff(a: &[Polyline], b: &[Polyline]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}
