//! The s-workspace machine: an instrumented read-only input, a word ledger
//! for the workspace, and a write-once output stream.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::io::Write;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::geometry::{PointSet, Site};
use crate::record::Record;

/// Words for one site held in workspace: index and two coordinates.
pub const SITE_WORDS: usize = 3;
/// Words for a ray: origin index and two direction components.
pub const RAY_WORDS: usize = 3;
/// Words for an edge piece: carrier pair, two endpoint sites, two parameters.
pub const EDGE_WORDS: usize = 6;
/// Words per site of an in-workspace diagram (site, its triangles, edges).
pub const DIAGRAM_WORDS_PER_SITE: usize = 10;
/// Words for a predicate evaluation's live temporaries.
pub const PREDICATE_WORDS: usize = 4;

/// Words for an order-k half-edge: `k − 1` closest sites, the pair, and
/// two endpoint sites.
pub fn halfedge_words(k: usize) -> usize {
    k + 3
}

/// Default budget constant `c` in `budget = c · s`.
pub const DEFAULT_BUDGET_CONST: usize = 64;

/// The budget constant, overridable through `VW_BUDGET_CONST`.
pub fn budget_constant() -> usize {
    std::env::var("VW_BUDGET_CONST")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&c| c > 0)
        .unwrap_or(DEFAULT_BUDGET_CONST)
}

/// The input point set behind a read counter.
pub struct ReadOnlyArena {
    points: PointSet,
    reads: Cell<u64>,
}

impl ReadOnlyArena {
    pub fn new(points: PointSet) -> ReadOnlyArena {
        ReadOnlyArena { points, reads: Cell::new(0) }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn scale(&self) -> &BigInt {
        self.points.scale()
    }

    /// Site `i`, counted as one read.
    pub fn read(&self, i: usize) -> Result<&Site> {
        if i >= self.points.len() {
            return Err(Error::OutOfRange { index: i, len: self.points.len() });
        }
        Ok(self.get(i))
    }

    /// Site `i`, counted as one read; panics when out of range.
    #[inline]
    pub fn get(&self, i: usize) -> &Site {
        self.reads.set(self.reads.get() + 1);
        self.points.site(i)
    }

    pub fn read_count(&self) -> u64 {
        self.reads.get()
    }

    /// The underlying set, bypassing the counter. For verification only.
    pub fn points(&self) -> &PointSet {
        &self.points
    }
}

/// Tracks the live workspace in words.
pub struct WorkLedger {
    budget: usize,
    enforcing: bool,
    live: Cell<usize>,
    peak: Cell<usize>,
    breached: Cell<bool>,
}

impl WorkLedger {
    /// Aborts any charge that would exceed `budget`.
    pub fn enforcing(budget: usize) -> WorkLedger {
        WorkLedger::build(budget, true)
    }

    /// Records the peak but never aborts.
    pub fn observing(budget: usize) -> WorkLedger {
        WorkLedger::build(budget, false)
    }

    /// Budget `c · s` with `c` from [`budget_constant`].
    pub fn for_workspace(s: usize, enforcing: bool) -> WorkLedger {
        WorkLedger::build(budget_constant() * s.max(1), enforcing)
    }

    fn build(budget: usize, enforcing: bool) -> WorkLedger {
        WorkLedger { budget, enforcing, live: Cell::new(0), peak: Cell::new(0), breached: Cell::new(false) }
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn live(&self) -> usize {
        self.live.get()
    }

    pub fn peak(&self) -> usize {
        self.peak.get()
    }

    pub fn is_enforcing(&self) -> bool {
        self.enforcing
    }

    /// Whether any charge went over budget (observing mode only).
    pub fn breached(&self) -> bool {
        self.breached.get()
    }

    fn add(&self, words: usize) -> Result<()> {
        let next = self.live.get() + words;
        if next > self.budget {
            if self.enforcing {
                return Err(Error::ModelViolation { requested: next, budget: self.budget });
            }
            self.breached.set(true);
        }
        self.live.set(next);
        if next > self.peak.get() {
            self.peak.set(next);
        }
        Ok(())
    }

    fn sub(&self, words: usize) {
        self.live.set(self.live.get() - words);
    }

    /// Charges `words` until the returned guard is dropped.
    pub fn charge(&self, words: usize) -> Result<Charge<'_>> {
        self.add(words)?;
        Ok(Charge { ledger: self, words })
    }

    /// Runs `body` with `words` charged.
    pub fn scope<T>(&self, words: usize, body: impl FnOnce() -> T) -> Result<T> {
        let _c = self.charge(words)?;
        Ok(body())
    }
}

/// A live workspace charge, released on drop.
pub struct Charge<'a> {
    ledger: &'a WorkLedger,
    words: usize,
}

impl Charge<'_> {
    pub fn words(&self) -> usize {
        self.words
    }

    /// Changes the charge to `words`.
    pub fn resize(&mut self, words: usize) -> Result<()> {
        if words > self.words {
            self.ledger.add(words - self.words)?;
        } else {
            self.ledger.sub(self.words - words);
        }
        self.words = words;
        Ok(())
    }
}

impl Drop for Charge<'_> {
    fn drop(&mut self) {
        self.ledger.sub(self.words);
    }
}

enum Target {
    Memory(Vec<Record>),
    Writer(Box<dyn Write>),
    Discard,
}

/// Append-only record stream. Records must arrive in nondecreasing order.
pub struct OutputSink {
    target: Target,
    last_k: Option<usize>,
    closed: bool,
    emitted: BTreeMap<usize, u64>,
}

impl OutputSink {
    /// Keeps records for the caller to inspect after the run.
    pub fn memory() -> OutputSink {
        OutputSink::with(Target::Memory(Vec::new()))
    }

    /// Writes one line per record.
    pub fn writer(w: Box<dyn Write>) -> OutputSink {
        OutputSink::with(Target::Writer(w))
    }

    /// Counts records and drops them.
    pub fn discard() -> OutputSink {
        OutputSink::with(Target::Discard)
    }

    fn with(target: Target) -> OutputSink {
        OutputSink { target, last_k: None, closed: false, emitted: BTreeMap::new() }
    }

    pub fn emit(&mut self, rec: Record) -> Result<()> {
        if self.closed {
            return Err(Error::ClosedSink);
        }
        if let Some(last) = self.last_k {
            if rec.k < last {
                return Err(Error::OrderRegression { last, got: rec.k });
            }
        }
        self.last_k = Some(rec.k);
        *self.emitted.entry(rec.k).or_insert(0) += 1;
        match &mut self.target {
            Target::Memory(v) => v.push(rec),
            Target::Writer(w) => writeln!(w, "{rec}")?,
            Target::Discard => {}
        }
        Ok(())
    }

    pub fn close(&mut self) -> Result<()> {
        if let Target::Writer(w) = &mut self.target {
            w.flush()?;
        }
        self.closed = true;
        Ok(())
    }

    pub fn emitted_count(&self) -> u64 {
        self.emitted.values().sum()
    }

    /// Records emitted per order.
    pub fn emitted_per_order(&self) -> &BTreeMap<usize, u64> {
        &self.emitted
    }

    /// Hands the stored records to the caller; empty for other targets.
    pub fn into_records(self) -> Vec<Record> {
        match self.target {
            Target::Memory(v) => v,
            _ => Vec::new(),
        }
    }
}
