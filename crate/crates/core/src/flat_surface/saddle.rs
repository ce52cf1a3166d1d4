//! Enumeration of saddle connections by unfolding triangles along straight
//! rays out of every corner.

use super::FlatSurface;
use crate::{cross, Error, Result, C64};

/// Hard cap on unfolding steps for one enumeration.
const NODE_CAP: usize = 5_000_000;

/// A straight segment between cone points, recorded once from each end.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleConnection {
    /// Slot whose starting corner the ray leaves from.
    pub corner: usize,
    pub start_vertex: usize,
    pub end_vertex: usize,
    /// Holonomy in the chart of the starting triangle.
    pub holonomy: C64,
}

struct Node {
    slot: usize,
    start: C64,
    mult: f64,
    right: C64,
    left: C64,
}

fn segment_distance(a: C64, b: C64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let t = (-(a.re * d.re + a.im * d.im) / len2).clamp(0.0, 1.0);
    (a + d * t).norm()
}

impl FlatSurface {
    /// All directed saddle connections of length at most `bound`. Every
    /// connection appears twice, once leaving each endpoint.
    pub fn saddle_connections(&self, bound: f64) -> Result<Vec<SaddleConnection>> {
        let verts = self.slot_vertices();
        let mut out = Vec::new();
        let mut nodes = 0usize;
        for s in 0..self.num_slots() {
            let q = self.vector(s);
            let r = -self.vector(self.prev(s));
            if q.norm() <= bound {
                out.push(SaddleConnection {
                    corner: s,
                    start_vertex: verts[s],
                    end_vertex: verts[self.next(s)],
                    holonomy: q,
                });
            }
            let mut stack = vec![Node { slot: self.next(s), start: q, mult: 1.0, right: q, left: r }];
            while let Some(node) = stack.pop() {
                nodes += 1;
                if nodes > NODE_CAP {
                    return Err(Error::Resource {
                        what: format!("saddle connection search up to length {bound}"),
                        partial: out.len(),
                    });
                }
                let a = node.slot;
                let end = node.start + self.vector(a) * node.mult;
                if segment_distance(node.start, end) > bound {
                    continue;
                }
                let ap = self.partner(a);
                let mult = node.mult * f64::from(self.pairing_sign(a));
                let w = node.start + self.vector(self.next(ap)) * mult;
                let right_of_left = cross(w, node.left) > 0.0;
                let left_of_right = cross(node.right, w) > 0.0;
                match (left_of_right, right_of_left) {
                    (true, true) => {
                        if w.norm() <= bound {
                            out.push(SaddleConnection {
                                corner: s,
                                start_vertex: verts[s],
                                end_vertex: verts[self.prev(ap)],
                                holonomy: w,
                            });
                        }
                        stack.push(Node { slot: self.next(ap), start: node.start, mult, right: node.right, left: w });
                        stack.push(Node { slot: self.prev(ap), start: w, mult, right: w, left: node.left });
                    }
                    (true, false) => stack.push(Node {
                        slot: self.next(ap),
                        start: node.start,
                        mult,
                        right: node.right,
                        left: node.left,
                    }),
                    (false, true) => {
                        stack.push(Node { slot: self.prev(ap), start: w, mult, right: node.right, left: node.left })
                    }
                    // w lies on a boundary ray of a window; the visible cone
                    // collapsed to nothing
                    (false, false) => {}
                }
            }
        }
        Ok(out)
    }
}
