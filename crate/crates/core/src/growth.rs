use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::config::PointConfig;
use crate::error::{Error, Result};
use crate::plane::{Ball, Point2};

/// Relative tolerance for tangency, merge-time ties, and trace queries.
pub const MERGE_TOL: f64 = 1e-12;

/// A ball with its identity in the merge forest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracedBall {
    pub id: usize,
    pub ball: Ball,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    pub time: f64,
    pub parents: Vec<usize>,
    pub child: usize,
}

/// Collection snapshot at one event time. The first event is the initial
/// collection, the last is the final one; intermediate events are merges and
/// store the post-merge collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthEvent {
    pub time: f64,
    pub balls: Vec<TracedBall>,
    pub merges: Vec<MergeRecord>,
}

/// Piecewise description of a multiplicative ball-growth family: between
/// events every ball scales about its own center by the common factor
/// `t / t_event`, and the total radius of the collection equals `t` exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthTrace {
    pub events: Vec<GrowthEvent>,
    /// Parent link per ball id (None for balls alive at the end).
    pub parent: Vec<Option<usize>>,
    /// Ids `0..n_initial` are the initial balls, in input order.
    pub n_initial: usize,
}

/// Which side of a merge time a query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Pre,
    Post,
}

fn total_radius(balls: &[Ball]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for b in balls {
        // Neumaier compensation keeps the conservation invariant tight.
        let t = sum + b.radius;
        c += if sum.abs() >= b.radius.abs() { (sum - t) + b.radius } else { (b.radius - t) + sum };
        sum = t;
    }
    sum + c
}

/// Smallest scale factor at which two balls of the collection become tangent,
/// with the pairs attaining it within relative tolerance `MERGE_TOL`.
/// Returns infinity (and no pairs) for fewer than two balls.
pub fn next_merge_scale(balls: &[Ball]) -> (f64, Vec<(usize, usize)>) {
    let mut lambda = f64::INFINITY;
    for i in 0..balls.len() {
        for j in (i + 1)..balls.len() {
            let l = balls[i].center.dist(balls[j].center) / (balls[i].radius + balls[j].radius);
            if l < lambda {
                lambda = l;
            }
        }
    }
    if !lambda.is_finite() {
        return (lambda, Vec::new());
    }
    let mut ties = Vec::new();
    for i in 0..balls.len() {
        for j in (i + 1)..balls.len() {
            let l = balls[i].center.dist(balls[j].center) / (balls[i].radius + balls[j].radius);
            if l <= lambda * (1.0 + MERGE_TOL) {
                ties.push((i, j));
            }
        }
    }
    (lambda, ties)
}

/// Radius-weighted merge of a connected cluster: center at the weighted
/// centroid, radius the radius sum. The result contains every input ball.
pub fn merge_balls(balls: &[Ball]) -> Result<Ball> {
    if balls.is_empty() {
        return Err(Error::geometry("cannot merge an empty cluster"));
    }
    if !cluster_is_connected(balls) {
        return Err(Error::geometry("balls do not form a connected cluster"));
    }
    Ok(weighted_merge(balls))
}

fn weighted_merge(balls: &[Ball]) -> Ball {
    let r: f64 = balls.iter().map(|b| b.radius).sum();
    let mut cx = 0.0;
    let mut cy = 0.0;
    for b in balls {
        cx += b.radius * b.center.x;
        cy += b.radius * b.center.y;
    }
    Ball::new(Point2::new(cx / r, cy / r), r)
}

fn cluster_is_connected(balls: &[Ball]) -> bool {
    let n = balls.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] {
                let slack = MERGE_TOL * (balls[i].radius + balls[j].radius);
                if balls[i].intersects(&balls[j], slack) {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Pairwise-disjoint closed eta-balls around the configuration points.
pub fn initial_collection(config: &PointConfig, eta: f64) -> Result<Vec<Ball>> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::geometry("eta must be positive"));
    }
    if eta >= config.separation() {
        return Err(Error::geometry("initial balls overlap: eta exceeds the separation radius"));
    }
    Ok(config.points().iter().map(|&p| Ball::new(p, eta)).collect())
}

/// The merge-free backward family `{B(p, t/n)}` of total radius `t`.
pub fn backward_collection(config: &PointConfig, t: f64) -> Result<Vec<Ball>> {
    let n = config.len() as f64;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::geometry("backward time must be positive"));
    }
    if t / n >= config.separation() {
        return Err(Error::geometry("backward family overlaps: t/n exceeds the separation radius"));
    }
    Ok(config.points().iter().map(|&p| Ball::new(p, t / n)).collect())
}

/// Grows every ball at the same multiplicative rate, merging tangent clusters
/// into radius-weighted balls (cascades included), until the total radius
/// reaches `target`.
pub fn grow(initial: &[Ball], target: f64) -> Result<GrowthTrace> {
    if initial.is_empty() {
        return Err(Error::geometry("cannot grow an empty collection"));
    }
    for b in initial {
        if !(b.radius > 0.0) || !b.radius.is_finite() || !b.center.is_finite() {
            return Err(Error::geometry("initial balls need finite centers and positive radii"));
        }
    }
    for i in 0..initial.len() {
        for j in (i + 1)..initial.len() {
            let gap = initial[i].center.dist(initial[j].center)
                - (initial[i].radius + initial[j].radius);
            if gap <= MERGE_TOL * (initial[i].radius + initial[j].radius) {
                return Err(Error::geometry(format!("initial balls {i} and {j} are not disjoint")));
            }
        }
    }
    let r0 = total_radius(initial);
    if !(target >= r0 * (1.0 - MERGE_TOL)) || !target.is_finite() {
        return Err(Error::geometry("target total radius is below the current total"));
    }

    let n = initial.len();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut current: Vec<TracedBall> =
        initial.iter().enumerate().map(|(id, &ball)| TracedBall { id, ball }).collect();
    let mut t = r0;
    let mut events =
        vec![GrowthEvent { time: t, balls: current.clone(), merges: Vec::new() }];

    if target <= r0 {
        return Ok(GrowthTrace { events, parent, n_initial: n });
    }

    loop {
        let balls: Vec<Ball> = current.iter().map(|tb| tb.ball).collect();
        let (lambda, _) = next_merge_scale(&balls);
        let t_merge = t * lambda;

        if !t_merge.is_finite() || t_merge > target * (1.0 + MERGE_TOL) {
            let factor = target / t;
            for tb in &mut current {
                tb.ball = tb.ball.scaled(factor);
            }
            events.push(GrowthEvent { time: target, balls: current, merges: Vec::new() });
            break;
        }

        // Merge time, clamped to the endpoint when it lands there.
        let t_next = if t_merge >= target * (1.0 - MERGE_TOL) { target } else { t_merge };
        let factor = t_next / t;
        for tb in &mut current {
            tb.ball = tb.ball.scaled(factor);
        }

        let merges = cascade_merge(&mut current, t_next, &mut parent);
        debug_assert!(!merges.is_empty(), "a merge event must merge something");
        events.push(GrowthEvent { time: t_next, balls: current.clone(), merges });
        t = t_next;
        if t >= target {
            break;
        }
    }

    Ok(GrowthTrace { events, parent, n_initial: n })
}

/// Replaces every connected overlap cluster by its weighted merge, repeating
/// until the collection is disjoint. The fixpoint partition of the pre-event
/// balls is computed first, so no intermediate forest nodes are created.
fn cascade_merge(
    current: &mut Vec<TracedBall>,
    time: f64,
    parent: &mut Vec<Option<usize>>,
) -> Vec<MergeRecord> {
    let n = current.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut Vec<usize>, i: usize) -> usize {
        if comp[i] != i {
            let root = find(comp, comp[i]);
            comp[i] = root;
            root
        } else {
            i
        }
    }

    loop {
        // Representative ball of each component under the current partition.
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..n {
            let r = find(&mut comp, i);
            members[r].push(i);
        }
        let reps: Vec<(usize, Ball)> = (0..n)
            .filter(|&r| !members[r].is_empty())
            .map(|r| {
                let balls: Vec<Ball> = members[r].iter().map(|&i| current[i].ball).collect();
                (r, if balls.len() == 1 { balls[0] } else { weighted_merge(&balls) })
            })
            .collect();

        let mut joined = false;
        'outer: for a in 0..reps.len() {
            for b in (a + 1)..reps.len() {
                let (ra, ba) = reps[a];
                let (rb, bb) = reps[b];
                let slack = MERGE_TOL * (ba.radius + bb.radius);
                if ba.intersects(&bb, slack) {
                    let ra = find(&mut comp, ra);
                    let rb = find(&mut comp, rb);
                    comp[ra] = rb;
                    joined = true;
                    break 'outer;
                }
            }
        }
        if !joined {
            break;
        }
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = find(&mut comp, i);
        members[r].push(i);
    }

    let mut records = Vec::new();
    let mut next: Vec<TracedBall> = Vec::new();
    let mut next_id = parent.len();
    for r in 0..n {
        match members[r].len() {
            0 => {}
            1 => next.push(current[members[r][0]]),
            _ => {
                let ids: Vec<usize> = members[r].iter().map(|&i| current[i].id).collect();
                let balls: Vec<Ball> = members[r].iter().map(|&i| current[i].ball).collect();
                let merged = weighted_merge(&balls);
                for &id in &ids {
                    parent[id] = Some(next_id);
                }
                parent.push(None);
                records.push(MergeRecord { time, parents: ids, child: next_id });
                next.push(TracedBall { id: next_id, ball: merged });
                next_id += 1;
            }
        }
    }
    next.sort_by_key(|tb| tb.id);
    *current = next;
    records
}

impl GrowthTrace {
    pub fn start_time(&self) -> f64 {
        self.events.first().map(|e| e.time).unwrap_or(0.0)
    }

    pub fn end_time(&self) -> f64 {
        self.events.last().map(|e| e.time).unwrap_or(0.0)
    }

    pub fn merge_times(&self) -> Vec<f64> {
        self.events.iter().filter(|e| !e.merges.is_empty()).map(|e| e.time).collect()
    }

    pub fn initial_balls(&self) -> Vec<Ball> {
        self.events[0].balls.iter().map(|tb| tb.ball).collect()
    }

    pub fn final_balls(&self) -> Vec<Ball> {
        self.events.last().unwrap().balls.iter().map(|tb| tb.ball).collect()
    }

    /// Initial-ball ids living in the subtree rooted at `id`.
    pub fn leaves_under(&self, id: usize) -> Vec<usize> {
        let mut leaves = Vec::new();
        let mut stack = vec![id];
        while let Some(b) = stack.pop() {
            if b < self.n_initial {
                leaves.push(b);
            }
            for (c, p) in self.parent.iter().enumerate() {
                if *p == Some(b) {
                    stack.push(c);
                }
            }
        }
        leaves.sort_unstable();
        leaves
    }

    /// Partition of the initial balls induced by the final collection,
    /// classes and members both sorted.
    pub fn final_partition(&self) -> Vec<Vec<usize>> {
        let mut parts: Vec<Vec<usize>> = self
            .events
            .last()
            .unwrap()
            .balls
            .iter()
            .map(|tb| {
                let mut leaves = self.leaves_under(tb.id);
                leaves.sort_unstable();
                leaves
            })
            .collect();
        parts.sort();
        parts
    }

    /// Matrix of coalescence times: entry (i, j) is the total radius at which
    /// initial balls i and j first share a ball, infinity if they never do.
    pub fn coalescence_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n_initial;
        let mut t = vec![vec![f64::INFINITY; n]; n];
        let mut leaves: Vec<Vec<usize>> = (0..self.parent.len())
            .map(|id| if id < n { vec![id] } else { Vec::new() })
            .collect();
        let mut records: Vec<&MergeRecord> =
            self.events.iter().flat_map(|e| e.merges.iter()).collect();
        records.sort_by(|a, b| a.time.total_cmp(&b.time));
        for rec in records {
            for a in 0..rec.parents.len() {
                for b in (a + 1)..rec.parents.len() {
                    for &i in &leaves[rec.parents[a]] {
                        for &j in &leaves[rec.parents[b]] {
                            t[i][j] = rec.time;
                            t[j][i] = rec.time;
                        }
                    }
                }
            }
            let all: Vec<usize> =
                rec.parents.iter().flat_map(|&p| leaves[p].clone()).collect();
            leaves[rec.child] = all;
        }
        t
    }

    pub fn collection_at(&self, t: f64) -> Result<Vec<Ball>> {
        self.collection_at_side(t, Side::Post)
    }

    pub fn collection_at_side(&self, t: f64, side: Side) -> Result<Vec<Ball>> {
        Ok(self.traced_collection_at(t, side)?.into_iter().map(|tb| tb.ball).collect())
    }

    /// Collection at total radius `t`, scaled from the governing stored event.
    /// Right-continuous at merge times; `Side::Pre` gives the pre-merge limit.
    pub fn traced_collection_at(&self, t: f64, side: Side) -> Result<Vec<TracedBall>> {
        let t0 = self.start_time();
        let t1 = self.end_time();
        if !(t >= t0 * (1.0 - MERGE_TOL) && t <= t1 * (1.0 + MERGE_TOL)) {
            return Err(Error::geometry(format!(
                "time {t} outside the trace range [{t0}, {t1}]"
            )));
        }
        let t = t.clamp(t0, t1);
        let mut idx = 0;
        for (i, e) in self.events.iter().enumerate() {
            let hit = match side {
                Side::Post => e.time <= t * (1.0 + MERGE_TOL),
                Side::Pre => i == 0 || e.time < t * (1.0 - MERGE_TOL),
            };
            if hit {
                idx = i;
            }
        }
        let base = &self.events[idx];
        let factor = t / base.time;
        Ok(base
            .balls
            .iter()
            .map(|tb| TracedBall { id: tb.id, ball: tb.ball.scaled(factor) })
            .collect())
    }

    /// Structural invariants: increasing event times, exact radius
    /// conservation, pairwise disjointness, and containment monotonicity
    /// along the merge forest.
    pub fn validate(&self) -> Result<()> {
        if self.events.is_empty() {
            return Err(Error::geometry("trace has no events"));
        }
        for w in self.events.windows(2) {
            if !(w[0].time < w[1].time) {
                return Err(Error::geometry("event times are not strictly increasing"));
            }
        }
        for e in &self.events {
            let balls: Vec<Ball> = e.balls.iter().map(|tb| tb.ball).collect();
            let sum = total_radius(&balls);
            if (sum - e.time).abs() > MERGE_TOL * e.time {
                return Err(Error::geometry(format!(
                    "total radius {sum} drifted from event time {}",
                    e.time
                )));
            }
            for i in 0..balls.len() {
                for j in (i + 1)..balls.len() {
                    let d = balls[i].center.dist(balls[j].center);
                    let rr = balls[i].radius + balls[j].radius;
                    if d < rr - MERGE_TOL * e.time {
                        return Err(Error::geometry("stored collection is not disjoint"));
                    }
                }
            }
        }
        for w in self.events.windows(2) {
            let factor = w[1].time / w[0].time;
            for tb in &w[0].balls {
                let grown = tb.ball.scaled(factor);
                let host = w[1].balls.iter().find(|nb| {
                    nb.id == tb.id || self.ancestor_of(tb.id, nb.id)
                });
                let ok = match host {
                    Some(nb) => nb.ball.contains_ball(&grown, MERGE_TOL * w[1].time * 10.0),
                    None => false,
                };
                if !ok {
                    return Err(Error::geometry("containment monotonicity violated"));
                }
            }
        }
        Ok(())
    }

    fn ancestor_of(&self, id: usize, candidate: usize) -> bool {
        let mut cur = id;
        while let Some(p) = self.parent[cur] {
            if p == candidate {
                return true;
            }
            cur = p;
        }
        false
    }

    /// Rows `time,ball,cx,cy,radius,parent,total_radius` for every event and
    /// ball. The last column repeats the event's radius sum, which equals the
    /// time column whenever conservation holds.
    pub fn to_csv(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "time,ball,cx,cy,radius,parent,total_radius")?;
        for e in &self.events {
            let total: f64 = e.balls.iter().map(|tb| tb.ball.radius).sum();
            for tb in &e.balls {
                let parent = match self.parent[tb.id] {
                    Some(p) => p.to_string(),
                    None => String::new(),
                };
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    e.time, tb.id, tb.ball.center.x, tb.ball.center.y, tb.ball.radius, parent,
                    total
                )?;
            }
        }
        Ok(())
    }

    pub fn from_csv(input: &mut impl BufRead) -> Result<GrowthTrace> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parse("empty trace csv"))?
            .map_err(Error::Io)?;
        if header.trim() != "time,ball,cx,cy,radius,parent,total_radius" {
            return Err(Error::parse("unexpected trace csv header"));
        }
        let mut events: Vec<GrowthEvent> = Vec::new();
        let mut parents: Vec<(usize, Option<usize>)> = Vec::new();
        for line in lines {
            let line = line.map_err(Error::Io)?;
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 7 {
                return Err(Error::parse(format!("bad trace row: {line}")));
            }
            let time: f64 = cols[0].parse().map_err(|_| Error::parse("bad time"))?;
            let id: usize = cols[1].parse().map_err(|_| Error::parse("bad ball id"))?;
            let cx: f64 = cols[2].parse().map_err(|_| Error::parse("bad center"))?;
            let cy: f64 = cols[3].parse().map_err(|_| Error::parse("bad center"))?;
            let radius: f64 = cols[4].parse().map_err(|_| Error::parse("bad radius"))?;
            let parent = if cols[5].trim().is_empty() {
                None
            } else {
                Some(cols[5].trim().parse().map_err(|_| Error::parse("bad parent id"))?)
            };
            parents.push((id, parent));
            let tb = TracedBall { id, ball: Ball::new(Point2::new(cx, cy), radius) };
            match events.last_mut() {
                Some(e) if e.time == time => e.balls.push(tb),
                _ => events.push(GrowthEvent { time, balls: vec![tb], merges: Vec::new() }),
            }
        }
        if events.is_empty() {
            return Err(Error::parse("trace csv has no rows"));
        }
        let max_id = parents.iter().map(|&(id, p)| id.max(p.unwrap_or(0))).max().unwrap();
        let mut parent: Vec<Option<usize>> = vec![None; max_id + 1];
        for (id, p) in parents {
            if let Some(p) = p {
                parent[id] = Some(p);
            }
        }
        let n_initial = events[0].balls.len();
        // Reconstruct merge records from ids that disappear between events.
        for i in 1..events.len() {
            let (before, rest) = events.split_at_mut(i);
            let prev = &before[i - 1];
            let cur = &mut rest[0];
            let mut by_child: Vec<(usize, Vec<usize>)> = Vec::new();
            for tb in &prev.balls {
                if cur.balls.iter().any(|nb| nb.id == tb.id) {
                    continue;
                }
                let child = parent[tb.id]
                    .ok_or_else(|| Error::parse("vanished ball has no parent"))?;
                match by_child.iter_mut().find(|(c, _)| *c == child) {
                    Some((_, v)) => v.push(tb.id),
                    None => by_child.push((child, vec![tb.id])),
                }
            }
            cur.merges = by_child
                .into_iter()
                .map(|(child, parents)| MergeRecord { time: cur.time, parents, child })
                .collect();
        }
        Ok(GrowthTrace { events, parent, n_initial })
    }
}

/// `collection_at` extended below the trace start by the backward family
/// `{B(p, t/n)}`, for traces whose initial balls are equal-radius balls
/// centered on the configuration.
pub fn extended_collection_at(
    trace: &GrowthTrace,
    config: &PointConfig,
    t: f64,
) -> Result<Vec<Ball>> {
    let t0 = trace.start_time();
    if t >= t0 * (1.0 - MERGE_TOL) {
        return trace.collection_at(t);
    }
    let n = config.len();
    let initial = trace.initial_balls();
    if initial.len() != n {
        return Err(Error::geometry("trace does not start from the configuration"));
    }
    for (b, &p) in initial.iter().zip(config.points()) {
        if b.center.dist(p) > MERGE_TOL * t0 || (b.radius - t0 / n as f64).abs() > MERGE_TOL * t0 {
            return Err(Error::geometry("trace does not start from the backward family"));
        }
    }
    backward_collection(config, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_unit_balls() -> Vec<Ball> {
        vec![
            Ball::new(Point2::new(0.0, 0.0), 1.0),
            Ball::new(Point2::new(4.0, 0.0), 1.0),
        ]
    }

    #[test]
    fn two_ball_worked_example() {
        let trace = grow(&two_unit_balls(), 5.0).unwrap();
        trace.validate().unwrap();
        assert_eq!(trace.merge_times(), vec![4.0]);

        // Before the merge the balls grow in place.
        let at3 = trace.collection_at(3.0).unwrap();
        assert_eq!(at3.len(), 2);
        assert!((at3[0].radius - 1.5).abs() < 1e-15);
        assert_eq!(at3[0].center, Point2::new(0.0, 0.0));

        // At total radius 4 the balls are tangent and merge into B((2,0), 4).
        let at4 = trace.collection_at(4.0).unwrap();
        assert_eq!(at4.len(), 1);
        assert_eq!(at4[0].center, Point2::new(2.0, 0.0));
        assert!((at4[0].radius - 4.0).abs() < 1e-12);

        // The pre-merge limit is the tangent pair.
        let pre = trace.collection_at_side(4.0, Side::Pre).unwrap();
        assert_eq!(pre.len(), 2);
        assert!((pre[0].radius - 2.0).abs() < 1e-12);

        let fin = trace.final_balls();
        assert_eq!(fin.len(), 1);
        assert_eq!(fin[0].center, Point2::new(2.0, 0.0));
        assert!((fin[0].radius - 5.0).abs() < 1e-12);
    }

    #[test]
    fn merge_scale_ties() {
        let balls = vec![
            Ball::new(Point2::new(0.0, 0.0), 1.0),
            Ball::new(Point2::new(4.0, 0.0), 1.0),
            Ball::new(Point2::new(-4.0, 0.0), 1.0),
        ];
        let (lambda, ties) = next_merge_scale(&balls);
        assert!((lambda - 2.0).abs() < 1e-15);
        assert_eq!(ties, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn simultaneous_merge_collapses_chain() {
        // Three collinear balls with equal gaps merge in a single cascade.
        let balls = vec![
            Ball::new(Point2::new(0.0, 0.0), 1.0),
            Ball::new(Point2::new(4.0, 0.0), 1.0),
            Ball::new(Point2::new(8.0, 0.0), 1.0),
        ];
        let trace = grow(&balls, 7.0).unwrap();
        trace.validate().unwrap();
        assert_eq!(trace.merge_times(), vec![6.0]);
        let merged = trace.collection_at(6.0).unwrap();
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].center, Point2::new(4.0, 0.0));
        assert_eq!(trace.final_partition(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn merged_ball_contains_cluster() {
        let cluster = vec![
            Ball::new(Point2::new(0.0, 0.0), 3.0),
            Ball::new(Point2::new(4.0, 0.0), 1.0),
            Ball::new(Point2::new(6.0, 0.0), 1.0),
        ];
        let merged = merge_balls(&cluster).unwrap();
        assert_eq!(merged.radius, 5.0);
        for b in &cluster {
            assert!(merged.contains_ball(b, 1e-12));
        }
        let disconnected = vec![
            Ball::new(Point2::new(0.0, 0.0), 1.0),
            Ball::new(Point2::new(10.0, 0.0), 1.0),
        ];
        assert!(merge_balls(&disconnected).is_err());
    }

    #[test]
    fn initial_collection_bounds() {
        let config = PointConfig::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
        ])
        .unwrap();
        assert!(initial_collection(&config, 0.5).is_ok());
        assert!(initial_collection(&config, 1.0).is_err());
    }

    #[test]
    fn growth_to_initial_radius_is_trivial() {
        let trace = grow(&two_unit_balls(), 2.0).unwrap();
        assert_eq!(trace.events.len(), 1);
        assert_eq!(trace.start_time(), 2.0);
    }

    #[test]
    fn backward_extension_matches_reference_family(){
        let config = PointConfig::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(3.0, 0.0),
            Point2::new(0.0, 5.0),
        ])
        .unwrap();
        let eta = 0.5;
        let initial = initial_collection(&config, eta).unwrap();
        let trace = grow(&initial, 6.0).unwrap();
        // Below the start the family is {B(p, t/n)}.
        let back = extended_collection_at(&trace, &config, 0.9).unwrap();
        for b in &back {
            assert!((b.radius - 0.3).abs() < 1e-15);
        }
        // At the start time the two notions agree.
        let at_start = extended_collection_at(&trace, &config, 1.5).unwrap();
        for (a, b) in at_start.iter().zip(initial.iter()) {
            assert_eq!(a.center, b.center);
            assert!((a.radius - b.radius).abs() < 1e-15);
        }
    }

    #[test]
    fn csv_round_trip() {
        let trace = grow(&two_unit_balls(), 5.0).unwrap();
        let mut buf = Vec::new();
        trace.to_csv(&mut buf).unwrap();
        let parsed = GrowthTrace::from_csv(&mut std::io::Cursor::new(buf)).unwrap();
        assert_eq!(parsed.events.len(), trace.events.len());
        assert_eq!(parsed.parent, trace.parent);
        assert_eq!(parsed.merge_times(), trace.merge_times());
        assert_eq!(parsed.events[1].merges, trace.events[1].merges);
    }

    #[test]
    fn rejects_overlapping_input() {
        let overlapping = vec![
            Ball::new(Point2::new(0.0, 0.0), 1.0),
            Ball::new(Point2::new(1.5, 0.0), 1.0),
        ];
        assert!(grow(&overlapping, 5.0).is_err());
        // Tangent balls are not disjoint either.
        let tangent = vec![
            Ball::new(Point2::new(0.0, 0.0), 1.0),
            Ball::new(Point2::new(2.0, 0.0), 1.0),
        ];
        assert!(grow(&tangent, 5.0).is_err());
    }
}
