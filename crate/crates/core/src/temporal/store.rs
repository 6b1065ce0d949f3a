//! Difference constraints over integer hours with day alignment.
//!
//! The store is a closed difference-bound matrix: `bound(i, j)` is the
//! tightest known upper bound on `x_i - x_j`, with node 0 fixed at hour 0.
//! Some nodes are *aligned* (their value is a multiple of 24); bounds
//! between aligned nodes are kept rounded down to multiples of 24. With both
//! closure and rounding at a fixpoint, the store is satisfiable iff no
//! negative cycle was found, and [`Store::label`] constructs a witness.

use super::interval::{Property, Relation};
use super::Inconsistent;

pub const DAY: i64 = 24;
const INF: i64 = i64::MAX / 4;

/// `x_node + offset`. Ground hours are points on node 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Pt {
    pub node: usize,
    pub offset: i64,
}

impl Pt {
    pub fn var(node: usize) -> Pt {
        Pt { node, offset: 0 }
    }

    pub fn fixed(hours: i64) -> Pt {
        Pt { node: 0, offset: hours }
    }
}

/// Endpoints of an interval `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub start: Pt,
    pub end: Pt,
}

#[derive(Clone, Debug)]
enum Undo {
    Bound { i: usize, j: usize, old: i64 },
    Node,
    Aligned(usize),
    Log,
}

/// A posted primitive: `x_i - x_j <= c`, or alignment of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Primitive {
    Le(usize, usize, i64),
    Aligned(usize),
}

#[derive(Clone, Debug)]
pub struct Store {
    m: Vec<Vec<i64>>,
    aligned: Vec<bool>,
    log: Vec<Primitive>,
    trail: Vec<Undo>,
}

impl Default for Store {
    fn default() -> Self {
        Store::new()
    }
}

impl Store {
    pub fn new() -> Store {
        Store { m: vec![vec![0]], aligned: vec![true], log: Vec::new(), trail: Vec::new() }
    }

    /// Number of variable nodes, excluding the zero node.
    pub fn num_vars(&self) -> usize {
        self.m.len() - 1
    }

    pub fn new_var(&mut self) -> usize {
        let n = self.m.len();
        for row in &mut self.m {
            row.push(INF);
        }
        let mut row = vec![INF; n + 1];
        row[n] = 0;
        self.m.push(row);
        self.aligned.push(false);
        self.trail.push(Undo::Node);
        n
    }

    pub fn bound(&self, i: usize, j: usize) -> i64 {
        self.m[i][j]
    }

    /// Feasible range of a point.
    pub fn range(&self, p: Pt) -> (i64, i64) {
        (p.offset - self.m[0][p.node], self.m[p.node][0] + p.offset)
    }

    pub fn value(&self, p: Pt) -> Option<i64> {
        let (lo, hi) = self.range(p);
        (lo == hi).then_some(lo)
    }

    pub fn is_aligned(&self, node: usize) -> bool {
        self.aligned[node]
    }

    pub fn constraints(&self) -> &[Primitive] {
        &self.log
    }

    pub fn mark(&self) -> usize {
        self.trail.len()
    }

    pub fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("nonempty") {
                Undo::Bound { i, j, old } => self.m[i][j] = old,
                Undo::Node => {
                    self.m.pop();
                    for row in &mut self.m {
                        row.pop();
                    }
                    self.aligned.pop();
                }
                Undo::Aligned(n) => self.aligned[n] = false,
                Undo::Log => {
                    self.log.pop();
                }
            }
        }
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        let old = self.m[i][j];
        self.trail.push(Undo::Bound { i, j, old });
        self.m[i][j] = v;
    }

    fn record(&mut self, p: Primitive) {
        self.log.push(p);
        self.trail.push(Undo::Log);
    }

    /// Posts `p - q <= c`. On inconsistency the store may be partially
    /// updated; callers undo to a mark or discard the store.
    pub fn le(&mut self, p: Pt, q: Pt, c: i64) -> Result<(), Inconsistent> {
        let c = c - p.offset + q.offset;
        self.edge(p.node, q.node, c)
    }

    pub fn lt(&mut self, p: Pt, q: Pt) -> Result<(), Inconsistent> {
        self.le(p, q, -1)
    }

    pub fn eq(&mut self, p: Pt, q: Pt) -> Result<(), Inconsistent> {
        self.le(p, q, 0)?;
        self.le(q, p, 0)
    }

    fn edge(&mut self, i: usize, j: usize, c: i64) -> Result<(), Inconsistent> {
        if i == j {
            return if c >= 0 { Ok(()) } else { Err(Inconsistent) };
        }
        self.record(Primitive::Le(i, j, c));
        self.tighten(i, j, c)?;
        self.realign()
    }

    fn tighten(&mut self, i: usize, j: usize, c: i64) -> Result<(), Inconsistent> {
        if c >= self.m[i][j] {
            return Ok(());
        }
        if c + self.m[j][i] < 0 {
            return Err(Inconsistent);
        }
        let n = self.m.len();
        let into_i: Vec<i64> = (0..n).map(|a| self.m[a][i]).collect();
        let from_j: Vec<i64> = self.m[j].clone();
        for a in 0..n {
            if into_i[a] >= INF {
                continue;
            }
            for b in 0..n {
                if from_j[b] >= INF {
                    continue;
                }
                let via = into_i[a] + c + from_j[b];
                if via < self.m[a][b] {
                    self.set(a, b, via);
                }
            }
        }
        for a in 0..n {
            if self.m[a][a] < 0 {
                return Err(Inconsistent);
            }
        }
        Ok(())
    }

    /// Rounds bounds between aligned nodes down to whole days until stable.
    fn realign(&mut self) -> Result<(), Inconsistent> {
        loop {
            let nodes: Vec<usize> = (0..self.m.len()).filter(|&k| self.aligned[k]).collect();
            let mut changed = None;
            'scan: for &a in &nodes {
                for &b in &nodes {
                    let v = self.m[a][b];
                    if a != b && v < INF && v.rem_euclid(DAY) != 0 {
                        changed = Some((a, b, v.div_euclid(DAY) * DAY));
                        break 'scan;
                    }
                }
            }
            match changed {
                Some((a, b, v)) => self.tighten(a, b, v)?,
                None => return Ok(()),
            }
        }
    }

    /// Requires `p` to fall on hour 0 of some day.
    pub fn align(&mut self, p: Pt) -> Result<(), Inconsistent> {
        if p.offset.rem_euclid(DAY) != 0 {
            // Only whole-day offsets from a node keep alignment expressible.
            return Err(Inconsistent);
        }
        if self.aligned[p.node] {
            return Ok(());
        }
        self.aligned[p.node] = true;
        self.trail.push(Undo::Aligned(p.node));
        self.record(Primitive::Aligned(p.node));
        self.realign()
    }

    pub fn nonempty(&mut self, a: Span) -> Result<(), Inconsistent> {
        self.lt(a.start, a.end)
    }

    pub fn duration(&mut self, a: Span, d: i64) -> Result<(), Inconsistent> {
        self.le(a.end, a.start, d)?;
        self.le(a.start, a.end, -d)
    }

    pub fn post_property(&mut self, p: Property, a: Span) -> Result<(), Inconsistent> {
        self.nonempty(a)?;
        match p {
            Property::Int => Ok(()),
            Property::Point | Property::Hour => self.duration(a, 1),
            Property::DayA => {
                self.duration(a, DAY)?;
                self.align(a.start)
            }
        }
    }

    pub fn post(&mut self, rel: Relation, a: Span, b: Span) -> Result<(), Inconsistent> {
        match rel {
            Relation::Overlap => {
                self.lt(a.start, b.end)?;
                self.lt(b.start, a.end)
            }
            Relation::Within => {
                self.le(b.start, a.start, 0)?;
                self.le(a.end, b.end, 0)
            }
            Relation::Before => self.le(a.end, b.start, 0),
            Relation::Meets => self.eq(a.end, b.start),
        }
    }

    /// The negation of `before`: `a` ends after `b` starts.
    pub fn post_not_before(&mut self, a: Span, b: Span) -> Result<(), Inconsistent> {
        self.lt(b.start, a.end)
    }

    pub fn fix(&mut self, node: usize, hours: i64) -> Result<(), Inconsistent> {
        self.eq(Pt::var(node), Pt::fixed(hours))
    }

    /// Deterministic total assignment (index = node, entry 0 is the zero
    /// node). Aligned nodes are fixed first, then the rest, each in creation
    /// order; each gets the smallest feasible value at or after `anchor`
    /// (rounded up to a day boundary when aligned), or its upper bound when
    /// nothing at or after `anchor` is feasible. The store is left unchanged.
    pub fn label(&mut self, anchor: i64) -> Result<Vec<i64>, Inconsistent> {
        let mark = self.mark();
        let result = self.label_inner(anchor);
        self.undo(mark);
        result
    }

    fn label_inner(&mut self, anchor: i64) -> Result<Vec<i64>, Inconsistent> {
        let n = self.m.len();
        for a in 0..n {
            if self.m[a][a] < 0 {
                return Err(Inconsistent);
            }
        }
        let order = (1..n).filter(|&k| self.aligned[k]).chain((1..n).filter(|&k| !self.aligned[k]));
        let order: Vec<usize> = order.collect();
        for k in order {
            let (lo, hi) = self.range(Pt::var(k));
            let mut v = lo.max(anchor);
            if self.aligned[k] {
                v = v.div_euclid(DAY) * DAY + if v.rem_euclid(DAY) == 0 { 0 } else { DAY };
            }
            if v > hi {
                v = hi;
            }
            self.fix(k, v)?;
        }
        Ok((0..n).map(|k| self.range(Pt::var(k)).0).collect())
    }

    /// Checks every posted primitive against an assignment.
    pub fn satisfied_by(&self, values: &[i64]) -> bool {
        values.first() == Some(&0)
            && values.len() == self.m.len()
            && self.log.iter().all(|p| match *p {
                Primitive::Le(i, j, c) => values[i] - values[j] <= c,
                Primitive::Aligned(k) => values[k].rem_euclid(DAY) == 0,
            })
    }
}
