//! Measured train tracks dual to flat triangulations.
//!
//! A track is stored through *slots*: every switch owns three slots listed
//! clockwise as `(a, b, c)` with `a` the incoming end, and every branch joins
//! two slots. Weights are indexed by branch.
//!
//! The track adapted to a triangulation has one switch per triangle and one
//! branch per edge; the incoming slot of a switch is the side with the
//! largest horizontal extent. Branch ids coincide with edge ids of the
//! surface and slot ids with surface slots, so flips of the surface and
//! splits of the track can be compared label by label.

mod io;
mod sweeps;

use nalgebra::DMatrix;

pub use io::TrackFile;
pub use sweeps::*;

use crate::flat_surface::{FlatSurface, VERTICAL_TOL};
use crate::{Error, Result, C64};

/// Absolute tolerance of the switch condition.
pub const SWITCH_TOL: f64 = 1e-10;

pub type Weight = Vec<f64>;

/// Data remembering the triangulation an adapted track came from, enough
/// to rebuild the surface from weights.
#[derive(Clone, Debug, PartialEq)]
pub struct DualTag {
    pub genus: u32,
    /// Counterclockwise slot triples of the triangles (switch `t` is
    /// triangle `t`).
    pub triangles: Vec<[usize; 3]>,
    /// `sgn Re` of the edge vector of every slot.
    pub orientation: Vec<i8>,
    /// Gluing sign of every slot.
    pub pair_sign: Vec<i8>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainTrack {
    switches: Vec<[usize; 3]>,
    branches: Vec<[usize; 2]>,
    slot_branch: Vec<usize>,
    slot_switch: Vec<(usize, usize)>,
    dual: Option<DualTag>,
}

/// Which of the two distinguished differentials a weight is taken from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `psi = phi`
    Horizontal,
    /// `psi = i phi`
    VerticalImaginary,
}

impl TrainTrack {
    /// Builds a track from clockwise switch slot triples and branch slot
    /// pairs. Slot ids must be `0..3 * switches.len()`.
    pub fn new(switches: Vec<[usize; 3]>, branches: Vec<[usize; 2]>) -> Result<Self> {
        let n = switches.len() * 3;
        let mut slot_switch = vec![(usize::MAX, 0); n];
        for (v, sw) in switches.iter().enumerate() {
            for (k, &s) in sw.iter().enumerate() {
                if s >= n || slot_switch[s].0 != usize::MAX {
                    return Err(Error::Structural(format!("switch slot {s} out of range or repeated")));
                }
                slot_switch[s] = (v, k);
            }
        }
        let mut slot_branch = vec![usize::MAX; n];
        for (e, br) in branches.iter().enumerate() {
            for &s in br {
                if s >= n || slot_branch[s] != usize::MAX {
                    return Err(Error::Structural(format!("branch slot {s} out of range or repeated")));
                }
                slot_branch[s] = e;
            }
        }
        if slot_branch.contains(&usize::MAX) {
            return Err(Error::Structural("a switch slot carries no branch".into()));
        }
        Ok(TrainTrack { switches, branches, slot_branch, slot_switch, dual: None })
    }

    pub fn num_switches(&self) -> usize {
        self.switches.len()
    }

    pub fn num_branches(&self) -> usize {
        self.branches.len()
    }

    pub fn switches(&self) -> &[[usize; 3]] {
        &self.switches
    }

    pub fn branches(&self) -> &[[usize; 2]] {
        &self.branches
    }

    pub fn dual_tag(&self) -> Option<&DualTag> {
        self.dual.as_ref()
    }

    pub fn branch_of_slot(&self, slot: usize) -> usize {
        self.slot_branch[slot]
    }

    /// Branch ids `(a, b, c)` at switch `v`.
    pub fn switch_branches(&self, v: usize) -> [usize; 3] {
        self.switches[v].map(|s| self.slot_branch[s])
    }

    fn check_len(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.num_branches() {
            return Err(Error::Structural(format!(
                "weight has {} entries for {} branches",
                w.len(),
                self.num_branches()
            )));
        }
        Ok(())
    }

    /// Largest violation of `w(a) = w(b) + w(c)` over all switches.
    pub fn switch_residual(&self, w: &[f64]) -> Result<f64> {
        self.check_len(w)?;
        Ok((0..self.num_switches())
            .map(|v| {
                let [a, b, c] = self.switch_branches(v);
                (w[a] - w[b] - w[c]).abs()
            })
            .fold(0.0, f64::max))
    }

    pub fn check_switch(&self, w: &[f64]) -> Result<bool> {
        Ok(self.switch_residual(w)? <= SWITCH_TOL)
    }

    /// Thurston symplectic form
    /// `1/2 * sum over switches of w1(b) w2(c) - w1(c) w2(b)`.
    pub fn thurston_form(&self, w1: &[f64], w2: &[f64]) -> Result<f64> {
        for w in [w1, w2] {
            if !self.check_switch(w)? {
                return Err(Error::Argument("weight violates the switch condition".into()));
            }
        }
        Ok(0.5
            * (0..self.num_switches())
                .map(|v| {
                    let [_, b, c] = self.switch_branches(v);
                    w1[b] * w2[c] - w1[c] * w2[b]
                })
                .sum::<f64>())
    }

    /// Basis of the weight space `W(tau)`: the kernel of the switch
    /// equations.
    pub fn weight_space_basis(&self) -> Vec<Weight> {
        let nb = self.num_branches();
        let ns = self.num_switches();
        let mut m = DMatrix::<f64>::zeros(ns.max(nb), nb);
        for v in 0..ns {
            let [a, b, c] = self.switch_branches(v);
            m[(v, a)] += 1.0;
            m[(v, b)] -= 1.0;
            m[(v, c)] -= 1.0;
        }
        let svd = m.svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let smax = svd.singular_values.max().max(1.0);
        (0..nb)
            .filter(|&i| svd.singular_values[i] <= 1e-10 * smax)
            .map(|i| v_t.row(i).iter().copied().collect())
            .collect()
    }

    /// A branch is large when it enters both of its switches.
    pub fn is_large(&self, branch: usize) -> bool {
        let [s1, s2] = self.branches[branch];
        let (v1, k1) = self.slot_switch[s1];
        let (v2, k2) = self.slot_switch[s2];
        k1 == 0 && k2 == 0 && v1 != v2
    }

    pub fn large_branches(&self) -> Vec<usize> {
        (0..self.num_branches()).filter(|&b| self.is_large(b)).collect()
    }

    /// Splits along the large branch `branch` according to the positive
    /// measure `m`; returns the new track and the pushed-forward measure.
    pub fn split(&self, m: &[f64], branch: usize) -> Result<(TrainTrack, Weight)> {
        self.check_len(m)?;
        if m.iter().any(|&x| x <= 0.0) {
            return Err(Error::Argument("split needs a positive measure".into()));
        }
        let plan = self.split_plan(m, branch)?;
        let track = self.apply_split(&plan);
        Ok((track, plan.push(m)))
    }

    /// Linear map induced on weights by the split of `branch` that the
    /// measure `m` selects. Works for any weight, positive or not.
    pub fn split_weight_map(&self, m: &[f64], branch: usize) -> Result<impl Fn(&[f64]) -> Weight> {
        self.check_len(m)?;
        let plan = self.split_plan(m, branch)?;
        Ok(move |w: &[f64]| plan.push(w))
    }

    fn split_plan(&self, m: &[f64], branch: usize) -> Result<SplitPlan> {
        if branch >= self.num_branches() {
            return Err(Error::Argument(format!("branch {branch} out of range")));
        }
        if !self.is_large(branch) {
            return Err(Error::Argument(format!("branch {branch} is not large")));
        }
        let [e1, e2] = self.branches[branch];
        let v1 = self.slot_switch[e1].0;
        let v2 = self.slot_switch[e2].0;
        let [_, b1, c1] = self.switches[v1];
        let [_, b2, c2] = self.switches[v2];
        let (mb1, mc2) = (m[self.slot_branch[b1]], m[self.slot_branch[c2]]);
        let scale = m.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1e-300);
        if (mb1 - mc2).abs() <= 1e-13 * scale {
            return Err(Error::DegenerateSplit(format!("competing weights at branch {branch} are equal")));
        }
        Ok(SplitPlan {
            branch,
            slots: [e1, e2, b1, c1, b2, c2],
            switches: [v1, v2],
            left: mb1 > mc2,
            plus: self.slot_branch[if mb1 > mc2 { b1 } else { c2 }],
            minus: self.slot_branch[if mb1 > mc2 { c2 } else { b1 }],
        })
    }

    fn apply_split(&self, plan: &SplitPlan) -> TrainTrack {
        let [e1, e2, b1, c1, b2, c2] = plan.slots;
        let [v1, v2] = plan.switches;
        let mut out = self.clone();
        if plan.left {
            out.switches[v1] = [b2, e1, c1];
            out.switches[v2] = [b1, e2, c2];
        } else {
            out.switches[v1] = [c1, b2, e1];
            out.switches[v2] = [c2, b1, e2];
        }
        for v in [v1, v2] {
            for (k, &s) in out.switches[v].iter().enumerate() {
                out.slot_switch[s] = (v, k);
            }
        }
        if let Some(tag) = out.dual.as_mut() {
            // mirror the surface flip: T1' = [e1, b2, c1], T2' = [e2, b1, c2]
            if tag.pair_sign[e1] < 0 {
                for z in [c2, b2] {
                    tag.orientation[z] = -tag.orientation[z];
                    tag.pair_sign[z] = -tag.pair_sign[z];
                    let other = self.partner_slot(z);
                    tag.pair_sign[other] = -tag.pair_sign[other];
                }
            }
            tag.pair_sign[e1] = 1;
            tag.pair_sign[e2] = 1;
            let head1 = out.switches[v1][0];
            let head2 = out.switches[v2][0];
            tag.orientation[e1] = -tag.orientation[head1];
            tag.orientation[e2] = -tag.orientation[head2];
            tag.triangles[v1] = [e1, b2, c1];
            tag.triangles[v2] = [e2, b1, c2];
        }
        out
    }

    fn partner_slot(&self, slot: usize) -> usize {
        let [x, y] = self.branches[self.slot_branch[slot]];
        if x == slot {
            y
        } else {
            x
        }
    }

    /// Rebuilds the flat surface whose adapted data are `(self, m)` and
    /// whose `i phi` weight is `eta`.
    pub fn reconstruct_surface(&self, m: &[f64], eta: &[f64]) -> Result<FlatSurface> {
        let tag =
            self.dual.as_ref().ok_or_else(|| Error::Reconstruction("track carries no dual triangulation".into()))?;
        self.check_len(m)?;
        self.check_len(eta)?;
        if m.iter().any(|&x| x <= 0.0) {
            return Err(Error::Reconstruction("measure is not positive".into()));
        }
        if !self.check_switch(m)? || !self.check_switch(eta)? {
            return Err(Error::Reconstruction("weights violate the switch condition".into()));
        }
        let vectors = (0..self.slot_branch.len())
            .map(|s| {
                let e = self.slot_branch[s];
                f64::from(tag.orientation[s]) * C64::new(m[e], -2.0 * eta[e])
            })
            .collect();
        let pairing: Vec<(usize, usize, i8)> = self.branches.iter().map(|&[x, y]| (x, y, tag.pair_sign[x])).collect();
        FlatSurface::new(tag.genus, tag.triangles.clone(), &pairing, vectors)
            .map_err(|e| Error::Reconstruction(e.to_string()))
    }
}

struct SplitPlan {
    branch: usize,
    slots: [usize; 6],
    switches: [usize; 2],
    left: bool,
    plus: usize,
    minus: usize,
}

impl SplitPlan {
    fn push(&self, w: &[f64]) -> Weight {
        let mut out = w.to_vec();
        out[self.branch] = w[self.plus] - w[self.minus];
        out
    }
}

fn check_no_vertical(s: &FlatSurface) -> Result<()> {
    for (x, _, _) in s.pairs() {
        let v = s.vector(x);
        if v.re.abs() <= VERTICAL_TOL * v.norm() {
            return Err(Error::DegenerateFoliation(format!("edge of slot {x} is vertical")));
        }
    }
    Ok(())
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// The measured track adapted to the triangulation of `s`; the measure is
/// the horizontal extent `|Re e|` of every edge.
pub fn adapted_track(s: &FlatSurface) -> Result<(TrainTrack, Weight)> {
    check_no_vertical(s)?;
    let mut switches = Vec::with_capacity(s.num_triangles());
    for t in 0..s.num_triangles() {
        let tri = s.triangle(t);
        let a =
            *tri.iter().max_by(|&&x, &&y| s.vector(x).re.abs().total_cmp(&s.vector(y).re.abs())).expect("three slots");
        switches.push([a, s.prev(a), s.next(a)]);
    }
    let pairs = s.pairs();
    let branches = pairs.iter().map(|&(x, y, _)| [x, y]).collect();
    let mut track = TrainTrack::new(switches, branches)?;
    track.dual = Some(DualTag {
        genus: s.genus(),
        triangles: s.triangles().to_vec(),
        orientation: s.vectors().iter().map(|v| sgn(v.re) as i8).collect(),
        pair_sign: (0..s.num_slots()).map(|x| s.pairing_sign(x)).collect(),
    });
    let weight = pairs.iter().map(|&(x, _, _)| s.vector(x).re.abs()).collect();
    Ok((track, weight))
}

/// Branch weights `w(Delta, psi)` for `psi = phi` or `psi = i phi`.
pub fn weight_from_differential(s: &FlatSurface, direction: Direction) -> Result<Weight> {
    check_no_vertical(s)?;
    Ok(s.pairs()
        .iter()
        .map(|&(x, _, _)| {
            let v = s.vector(x);
            match direction {
                Direction::Horizontal => 0.5 * v.re.abs(),
                Direction::VerticalImaginary => -0.5 * sgn(v.re) * v.im,
            }
        })
        .collect())
}

/// Branch weights of a period tangent given by per-slot edge derivatives:
/// the derivative of the horizontal extent of each edge.
pub fn weight_from_edge_derivative(s: &FlatSurface, de: &[C64]) -> Result<Weight> {
    check_no_vertical(s)?;
    if de.len() != s.num_slots() {
        return Err(Error::Structural("edge derivative per slot expected".into()));
    }
    Ok(s.pairs().iter().map(|&(x, _, _)| sgn(s.vector(x).re) * de[x].re).collect())
}

/// Output of [`common_refinement`].
#[derive(Clone, Debug)]
pub struct Refinement {
    pub track: TrainTrack,
    pub weight: Weight,
    pub canonical: FlatSurface,
    pub path_from_first: Vec<usize>,
    pub path_from_second: Vec<usize>,
    /// For every flip of the first path, whether it acted as a split of the
    /// adapted track (its dual branch was large).
    pub splits_from_first: Vec<bool>,
    pub splits_from_second: Vec<bool>,
}

fn classify_path(s: &FlatSurface, path: &[usize]) -> Result<Vec<bool>> {
    let mut cur = s.clone();
    let ids = s.edge_ids();
    let mut out = Vec::with_capacity(path.len());
    for &slot in path {
        let large = adapted_track(&cur).map(|(t, _)| t.is_large(ids[slot])).unwrap_or(false);
        out.push(large);
        cur = cur.flip(slot)?;
    }
    Ok(out)
}

/// Common splitting of the adapted tracks of two triangulations of one
/// flat surface, realised by the Delaunay triangulation.
pub fn common_refinement(s1: &FlatSurface, s2: &FlatSurface) -> Result<Refinement> {
    let scale = s1.max_edge_length().max(s2.max_edge_length());
    if (s1.area() - s2.area()).abs() > 1e-9 * s1.area() {
        return Err(Error::Mismatch("surfaces have different areas".into()));
    }
    let (d1, p1) = s1.delaunay_with_path()?;
    let (d2, p2) = s2.delaunay_with_path()?;
    if !d1.same_geometry(&d2, 1e-9 * scale) {
        return Err(Error::Mismatch("Delaunay forms differ; the triangulations are not flip-equivalent".into()));
    }
    let (track, weight) = adapted_track(&d1)?;
    Ok(Refinement {
        splits_from_first: classify_path(s1, &p1)?,
        splits_from_second: classify_path(s2, &p2)?,
        track,
        weight,
        canonical: d1,
        path_from_first: p1,
        path_from_second: p2,
    })
}

#[cfg(test)]
mod tests;
