use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::GrowthTrace;
use crate::plane::Point2;

/// The half-open annulus `{x : inner < |x - center| <= outer}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: Point2,
    pub inner: f64,
    pub outer: f64,
}

impl Annulus {
    pub fn new(center: Point2, inner: f64, outer: f64) -> Result<Annulus> {
        if !(0.0 < inner && inner < outer) || !outer.is_finite() {
            return Err(Error::geometry("annulus needs 0 < inner < outer"));
        }
        Ok(Annulus { center, inner, outer })
    }

    pub fn contains(&self, x: Point2) -> bool {
        let d = self.center.dist(x);
        self.inner < d && d <= self.outer
    }

    /// Radial intervals `(r, s]` overlap iff max(r, r') < min(s, s').
    pub fn radial_overlaps(&self, other: &Annulus) -> bool {
        self.inner.max(other.inner) < self.outer.min(other.outer)
    }
}

/// Trace provenance of an annulus: which ball it sleeves and at which event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusMeta {
    pub ball_id: usize,
    pub event_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnuliCollection {
    pub annuli: Vec<Annulus>,
    /// Present when generated from a growth trace, parallel to `annuli`.
    pub meta: Option<Vec<AnnulusMeta>>,
}

impl AnnuliCollection {
    pub fn from_annuli(annuli: Vec<Annulus>) -> Self {
        AnnuliCollection { annuli, meta: None }
    }

    pub fn len(&self) -> usize {
        self.annuli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annuli.is_empty()
    }

    /// Geometric pairwise disjointness up to the slack `tol` (outer boundaries
    /// of sibling annuli may touch at single points).
    pub fn is_pairwise_disjoint(&self, tol: f64) -> bool {
        for i in 0..self.annuli.len() {
            for j in (i + 1)..self.annuli.len() {
                let a = &self.annuli[i];
                let b = &self.annuli[j];
                let d = a.center.dist(b.center);
                let separated = d >= a.outer + b.outer - tol;
                let a_in_hole = d + a.outer <= b.inner + tol;
                let b_in_hole = d + b.outer <= a.inner + tol;
                if !(separated || a_in_hole || b_in_hole) {
                    return false;
                }
            }
        }
        true
    }

    /// Rows `cx,cy,inner,outer,class`; the class column is empty without a
    /// partition.
    pub fn to_csv(&self, partition: Option<&McrPartition>, out: &mut impl Write) -> Result<()> {
        let mut class_of = vec![None; self.annuli.len()];
        if let Some(p) = partition {
            for (k, class) in p.classes.iter().enumerate() {
                for &i in class {
                    class_of[i] = Some(k);
                }
            }
        }
        writeln!(out, "cx,cy,inner,outer,class")?;
        for (a, class) in self.annuli.iter().zip(class_of) {
            let class = class.map(|k| k.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{}", a.center.x, a.center.y, a.inner, a.outer, class)?;
        }
        Ok(())
    }
}

/// The annuli swept between consecutive events: for each stored ball the
/// region between it and its scaling to the next event time. Degenerate
/// sleeves (zero thickness) are skipped.
pub fn annuli_from_trace(trace: &GrowthTrace) -> AnnuliCollection {
    let mut annuli = Vec::new();
    let mut meta = Vec::new();
    for i in 0..trace.events.len().saturating_sub(1) {
        let cur = &trace.events[i];
        let next_time = trace.events[i + 1].time;
        let factor = next_time / cur.time;
        for tb in &cur.balls {
            let inner = tb.ball.radius;
            let outer = tb.ball.radius * factor;
            if outer > inner {
                annuli.push(Annulus { center: tb.ball.center, inner, outer });
                meta.push(AnnulusMeta { ball_id: tb.id, event_index: i });
            }
        }
    }
    AnnuliCollection { annuli, meta: Some(meta) }
}

/// A partition of annulus indices into concentrically rearrangeable classes:
/// within a class the radial intervals chain as r1 < s1 <= r2 < s2 <= ...
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McrPartition {
    pub classes: Vec<Vec<usize>>,
}

impl McrPartition {
    pub fn k(&self) -> usize {
        self.classes.len()
    }

    pub fn validate(&self, collection: &AnnuliCollection) -> Result<()> {
        let m = collection.len();
        let mut seen = vec![false; m];
        for class in &self.classes {
            if class.is_empty() {
                return Err(Error::geometry("empty rearrangement class"));
            }
            for &i in class {
                if i >= m || seen[i] {
                    return Err(Error::geometry("partition is not a partition"));
                }
                seen[i] = true;
            }
            let mut sorted = class.clone();
            sorted.sort_by(|&a, &b| collection.annuli[a].inner.total_cmp(&collection.annuli[b].inner));
            for w in sorted.windows(2) {
                let a = &collection.annuli[w[0]];
                let b = &collection.annuli[w[1]];
                if !(a.outer <= b.inner) {
                    return Err(Error::geometry("class intervals overlap"));
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::geometry("partition misses an annulus"));
        }
        Ok(())
    }
}

/// Maximal overlap depth of the half-open radial intervals: the depth is
/// attained just below an outer endpoint, so it suffices to count, for each
/// outer value s, the intervals with inner < s <= outer.
pub fn mcr_depth(collection: &AnnuliCollection) -> usize {
    let mut depth = 0;
    for a in &collection.annuli {
        let s = a.outer;
        let count = collection
            .annuli
            .iter()
            .filter(|b| b.inner < s && s <= b.outer)
            .count();
        depth = depth.max(count);
    }
    depth
}

/// Minimal concentric rearrangement partition via the left-endpoint sweep.
/// The class count equals the overlap depth of the radial intervals.
pub fn mcr_exact(collection: &AnnuliCollection) -> McrPartition {
    let mut order: Vec<usize> = (0..collection.len()).collect();
    order.sort_by(|&a, &b| {
        let aa = &collection.annuli[a];
        let bb = &collection.annuli[b];
        aa.inner.total_cmp(&bb.inner).then(aa.outer.total_cmp(&bb.outer)).then(a.cmp(&b))
    });
    // (last outer, class index); reuse the fullest compatible class.
    let mut open: Vec<(f64, usize)> = Vec::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        let a = &collection.annuli[i];
        let mut best: Option<usize> = None;
        for (slot, &(last, _)) in open.iter().enumerate() {
            if last <= a.inner {
                match best {
                    Some(b) if open[b].0 >= last => {}
                    _ => best = Some(slot),
                }
            }
        }
        match best {
            Some(slot) => {
                let class = open[slot].1;
                classes[class].push(i);
                open[slot].0 = a.outer;
            }
            None => {
                open.push((a.outer, classes.len()));
                classes.push(vec![i]);
            }
        }
    }
    let partition = McrPartition { classes };
    debug_assert_eq!(partition.k(), mcr_depth(collection));
    partition
}

const BRUTE_LIMIT: usize = 10;

/// Exhaustive minimal class count over all assignments, for collections of at
/// most ten annuli.
pub fn mcr_brute(collection: &AnnuliCollection) -> Result<usize> {
    if collection.len() > BRUTE_LIMIT {
        return Err(Error::config(format!(
            "brute-force rearrangement is limited to {BRUTE_LIMIT} annuli"
        )));
    }
    if collection.is_empty() {
        return Ok(0);
    }
    fn compatible(collection: &AnnuliCollection, class: &[usize], cand: usize) -> bool {
        class.iter().all(|&i| !collection.annuli[i].radial_overlaps(&collection.annuli[cand]))
    }
    fn search(
        collection: &AnnuliCollection,
        classes: &mut Vec<Vec<usize>>,
        next: usize,
        best: &mut usize,
    ) {
        if classes.len() >= *best {
            return;
        }
        if next == collection.len() {
            *best = classes.len();
            return;
        }
        for slot in 0..classes.len() {
            if compatible(collection, &classes[slot], next) {
                classes[slot].push(next);
                search(collection, classes, next + 1, best);
                classes[slot].pop();
            }
        }
        classes.push(vec![next]);
        search(collection, classes, next + 1, best);
        classes.pop();
    }
    let mut best = mcr_exact(collection).k();
    let mut classes = Vec::new();
    search(collection, &mut classes, 0, &mut best);
    Ok(best)
}

/// The recursive merge-forest partition: each ball's consecutive sleeves form
/// a concentric chain, and at a merge the chain of the merged ball is
/// appended to one class inherited from its children. Yields at most one
/// class per initial ball.
pub fn mcr_paper_partition(
    trace: &GrowthTrace,
    collection: &AnnuliCollection,
) -> Result<McrPartition> {
    let meta = collection
        .meta
        .as_ref()
        .ok_or_else(|| Error::config("collection has no trace provenance"))?;
    if meta.len() != collection.len() {
        return Err(Error::config("provenance length mismatch"));
    }

    let n_balls = trace.parent.len();
    let mut chains: Vec<Vec<usize>> = vec![Vec::new(); n_balls];
    for (idx, m) in meta.iter().enumerate() {
        chains[m.ball_id].push(idx);
    }
    for chain in &mut chains {
        chain.sort_by_key(|&i| meta[i].event_index);
    }

    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n_balls];
    for (id, p) in trace.parent.iter().enumerate() {
        if let Some(p) = *p {
            children[p].push(id);
        }
    }

    fn classes_for(
        node: usize,
        chains: &[Vec<usize>],
        children: &[Vec<usize>],
        collection: &AnnuliCollection,
    ) -> Result<Vec<Vec<usize>>> {
        let own = &chains[node];
        if children[node].is_empty() {
            return Ok(if own.is_empty() { Vec::new() } else { vec![own.clone()] });
        }
        let mut classes = Vec::new();
        for &child in &children[node] {
            classes.extend(classes_for(child, chains, children, collection)?);
        }
        if !own.is_empty() {
            let first_inner = collection.annuli[own[0]].inner;
            let slot = classes.iter().position(|class: &Vec<usize>| {
                class.iter().all(|&i| collection.annuli[i].outer <= first_inner)
            });
            match slot {
                Some(s) => classes[s].extend(own.iter().copied()),
                None if classes.is_empty() => classes.push(own.clone()),
                None => {
                    return Err(Error::geometry(
                        "merged chain does not fit over its children",
                    ))
                }
            }
        }
        Ok(classes)
    }

    let mut classes = Vec::new();
    for tb in &trace.events.last().unwrap().balls {
        classes.extend(classes_for(tb.id, &chains, &children, collection)?);
    }
    let partition = McrPartition { classes };
    partition.validate(collection)?;
    Ok(partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::grow;
    use crate::plane::Ball;

    fn two_ball_trace() -> GrowthTrace {
        grow(
            &[
                Ball::new(Point2::new(0.0, 0.0), 1.0),
                Ball::new(Point2::new(4.0, 0.0), 1.0),
            ],
            5.0,
        )
        .unwrap()
    }

    #[test]
    fn two_ball_annuli() {
        let trace = two_ball_trace();
        let coll = annuli_from_trace(&trace);
        assert_eq!(coll.len(), 3);
        let a = &coll.annuli;
        assert_eq!((a[0].center, a[0].inner, a[0].outer), (Point2::new(0.0, 0.0), 1.0, 2.0));
        assert_eq!((a[1].center, a[1].inner, a[1].outer), (Point2::new(4.0, 0.0), 1.0, 2.0));
        assert_eq!((a[2].center, a[2].inner, a[2].outer), (Point2::new(2.0, 0.0), 4.0, 5.0));
        assert!(coll.is_pairwise_disjoint(1e-12));
    }

    #[test]
    fn exact_matches_depth_on_two_ball_trace() {
        let trace = two_ball_trace();
        let coll = annuli_from_trace(&trace);
        let partition = mcr_exact(&coll);
        partition.validate(&coll).unwrap();
        // Intervals (1,2], (1,2], (4,5]: two classes.
        assert_eq!(partition.k(), 2);
        assert_eq!(mcr_depth(&coll), 2);
        assert_eq!(mcr_brute(&coll).unwrap(), 2);
    }

    #[test]
    fn touching_intervals_share_a_class() {
        let coll = AnnuliCollection::from_annuli(vec![
            Annulus::new(Point2::new(0.0, 0.0), 1.0, 2.0).unwrap(),
            Annulus::new(Point2::new(9.0, 0.0), 2.0, 3.0).unwrap(),
        ]);
        assert_eq!(mcr_exact(&coll).k(), 1);
        assert_eq!(mcr_brute(&coll).unwrap(), 1);
    }

    #[test]
    fn paper_partition_bounded_by_leaf_count() {
        let trace = two_ball_trace();
        let coll = annuli_from_trace(&trace);
        let partition = mcr_paper_partition(&trace, &coll).unwrap();
        assert!(partition.k() <= trace.n_initial);
        assert_eq!(partition.k(), 2);
    }

    #[test]
    fn brute_rejects_large_collections() {
        let annuli: Vec<Annulus> = (0..11)
            .map(|i| Annulus::new(Point2::new(i as f64 * 10.0, 0.0), 1.0, 2.0).unwrap())
            .collect();
        assert!(mcr_brute(&AnnuliCollection::from_annuli(annuli)).is_err());
    }

    #[test]
    fn degenerate_annuli_rejected() {
        assert!(Annulus::new(Point2::new(0.0, 0.0), 1.0, 1.0).is_err());
        assert!(Annulus::new(Point2::new(0.0, 0.0), 0.0, 1.0).is_err());
    }
}
