//! Release checks, one line per criterion. Runs as a plain binary so the
//! summary lines are always printed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use vw::gen::random_general_position;
use vw::geometry::PointSet;
use vw::input::format_sites;
use vw::memory::{OutputSink, ReadOnlyArena, WorkLedger};
use vw::oracle::{oracle_intervals, oracle_records, oracle_vdk, VertexClass};
use vw::orderk::{pipeline_run, successor_step, HalfEdge, PipelineConfig};
use vw::record::{format_records, parse_records, Endpoint, Record};
use vw::scan::{enumerate_diagram, Mode};
use vw::tradeoff::run_tradeoff;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Records equal to `expected` as a set, with no repeats.
fn matches(got: Vec<Record>, expected: &BTreeSet<Record>, what: &str) -> Result<(), String> {
    let n = got.len();
    let set: BTreeSet<Record> = got.into_iter().collect();
    ensure(set.len() == n, || format!("{what}: {} duplicate records", n - set.len()))?;
    ensure(&set == expected, || {
        let missing = expected.difference(&set).count();
        let spurious = set.difference(expected).count();
        format!("{what}: {missing} missing, {spurious} spurious")
    })
}

fn constant_run(p: &PointSet, mode: Mode, ledger: &WorkLedger) -> Result<(Vec<Record>, u64), String> {
    let a = ReadOnlyArena::new(p.clone());
    let mut sink = OutputSink::memory();
    enumerate_diagram(&a, ledger, mode, &mut sink).map_err(|e| e.to_string())?;
    Ok((sink.into_records(), a.read_count()))
}

fn tradeoff_run(p: &PointSet, mode: Mode, s: usize, ledger: &WorkLedger) -> Result<(Vec<Record>, u64), String> {
    let a = ReadOnlyArena::new(p.clone());
    let mut sink = OutputSink::memory();
    run_tradeoff(&a, ledger, mode, s, &mut sink).map_err(|e| e.to_string())?;
    Ok((sink.into_records(), a.read_count()))
}

fn oracle_equivalence() -> Outcome {
    let mut runs = 0;
    for i in 0..200u64 {
        let n = 3 + (i as usize % 38);
        let p = random_general_position(n, 10_000 + i);
        let root = (n as f64).sqrt().ceil() as usize;
        let mut windows = vec![1, root, n];
        windows.dedup();
        for (mode, order) in [(Mode::Nearest, 1), (Mode::Farthest, n - 1)] {
            let expected = oracle_records(&p, order, false);
            let l = WorkLedger::for_workspace(1, true);
            matches(constant_run(&p, mode, &l)?.0, &expected, &format!("set {i} n {n} {mode:?} constant"))?;
            runs += 1;
            for &s in &windows {
                let l = WorkLedger::for_workspace(s, true);
                matches(tradeoff_run(&p, mode, s, &l)?.0, &expected, &format!("set {i} n {n} {mode:?} s {s}"))?;
                runs += 1;
            }
        }
    }
    Ok(format!("200 sets, {runs} runs equal to the oracle"))
}

fn higher_orders() -> Outcome {
    let mut runs = 0;
    for i in 0..50u64 {
        let n = 8 + (i as usize % 17);
        let p = random_general_position(n, 20_000 + i);
        let expected: Vec<BTreeSet<Record>> = (1..=4).map(|k| oracle_vdk(&p, k).half_edge_records(&p)).collect();
        for k in 2..=4 {
            let a = ReadOnlyArena::new(p.clone());
            let l = WorkLedger::for_workspace(64, true);
            let mut sink = OutputSink::memory();
            let config = PipelineConfig::new(k, 64, i).map_err(|e| e.to_string())?;
            pipeline_run(&a, &l, &config, &mut sink).map_err(|e| format!("set {i} K {k}: {e}"))?;
            let out = sink.into_records();
            ensure(out.windows(2).all(|w| w[0].k <= w[1].k), || format!("set {i} K {k}: order decreases"))?;
            let mut per: BTreeMap<usize, Vec<Record>> = BTreeMap::new();
            for r in out {
                per.entry(r.k).or_default().push(r);
            }
            ensure(per.keys().copied().eq(1..=k), || format!("set {i} K {k}: orders {:?}", per.keys()))?;
            for (j, recs) in per {
                matches(recs, &expected[j - 1], &format!("set {i} n {n} K {k} order {j}"))?;
            }
            runs += 1;
        }
    }
    Ok(format!("50 sets, {runs} pipelined runs equal to the oracle at every order"))
}

fn cell_of(closest: &[usize], extra: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = closest.iter().chain(extra).copied().collect();
    v.sort_unstable();
    v
}

/// Whether the edges form one tree, with each unbounded end its own node.
fn is_tree(edges: &[&Record]) -> bool {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut ids: HashMap<Endpoint, usize> = HashMap::new();
    let mut parent: Vec<usize> = Vec::new();
    let mut node = |e: &Endpoint, parent: &mut Vec<usize>| {
        let fresh = parent.len();
        let id = match e {
            Endpoint::At(..) => *ids.entry(e.clone()).or_insert(fresh),
            Endpoint::Inf(..) => fresh,
        };
        if id == fresh {
            parent.push(fresh);
        }
        id
    };
    for r in edges {
        let a = node(&r.tail, &mut parent);
        let b = node(&r.head, &mut parent);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    let roots: BTreeSet<usize> = (0..parent.len()).map(|x| find(&mut parent, x)).collect();
    roots.len() == 1
}

fn structural_properties() -> Outcome {
    let mut checked = 0usize;
    for seed in 0..11u64 {
        let n = 6 + seed as usize;
        let p = random_general_position(n, 30_000 + seed);
        let a = ReadOnlyArena::new(p.clone());
        let diagrams: Vec<_> = (1..=4).map(|k| oracle_vdk(&p, k)).collect();
        for k in 1..=3 {
            let d = &diagrams[k - 1];
            let up = &diagrams[k];
            let up_cells: BTreeSet<Vec<usize>> =
                up.edges.iter().flat_map(|e| [cell_of(&e.closest, &[e.p]), cell_of(&e.closest, &[e.q])]).collect();
            let recs = d.records(&p);
            let mut inside: BTreeMap<Vec<usize>, Vec<&Record>> = BTreeMap::new();
            for r in &recs {
                let q = cell_of(&r.closest, &[r.pair.0, r.pair.1]);
                ensure(q.len() == k + 1, || format!("n {n} k {k}: union of adjacent cells has {} sites", q.len()))?;
                ensure(up_cells.contains(&q), || format!("n {n} k {k}: {q:?} is not a cell of order {}", k + 1))?;
                inside.entry(q).or_default().push(r);
            }
            let bound = (2 * (k + 1)).saturating_sub(3).max(1);
            for cell in &up_cells {
                let edges = inside.get(cell).map(Vec::as_slice).unwrap_or(&[]);
                ensure((1..=bound).contains(&edges.len()), || format!("n {n} k {k}: {} edges inside {cell:?}", edges.len()))?;
                ensure(is_tree(edges), || format!("n {n} k {k}: edges inside {cell:?} are not a tree"))?;
                checked += 1;
            }

            let class_at = |dd: &vw::oracle::OracleDiagram| -> HashMap<[usize; 3], VertexClass> {
                dd.vertices.iter().map(|v| (v.triple, v.class)).collect()
            };
            let here = class_at(d);
            let above = class_at(up);
            let below = if k >= 2 { class_at(&diagrams[k - 2]) } else { HashMap::new() };
            for (t, c) in &here {
                let (expect_above, expect_below) = match c {
                    VertexClass::New => (above.get(t) == Some(&VertexClass::Old), !below.contains_key(t)),
                    VertexClass::Old => (!above.contains_key(t), below.get(t) == Some(&VertexClass::New)),
                };
                ensure(expect_above && expect_below, || format!("n {n} k {k}: vertex {t:?} ({c:?}) not in exactly one neighbour order"))?;
            }
            for r in d.half_edge_records(&p) {
                let e = HalfEdge::from_record(&r);
                let Some(h) = e.head else { continue };
                let mut t = [e.left, e.right, h];
                t.sort_unstable();
                ensure(e.classify_head().ok() == here.get(&t).copied(), || format!("n {n} k {k}: head class of {r}"))?;
            }

            for cell in oracle_intervals(&p, k) {
                let h = cell.boundary.len();
                ensure(!cell.relevant.is_empty() && cell.owner.iter().all(|&o| o < cell.relevant.len()), || {
                    format!("n {n} k {k}: unowned boundary in {:?}", cell.cell)
                })?;
                let changes = (0..h).filter(|&i| cell.owner[i] != cell.owner[(i + h - 1) % h]).count();
                let owners: BTreeSet<usize> = cell.owner.iter().copied().collect();
                ensure(owners.len() == cell.relevant.len(), || format!("n {n} k {k}: an owner without interval"))?;
                ensure(changes == if owners.len() > 1 { owners.len() } else { 0 }, || format!("n {n} k {k}: split interval"))?;
                for (j, rel) in cell.relevant.iter().enumerate() {
                    // The interval starts where the owner's head meets the boundary.
                    let first = cell.boundary.iter().position(|f| f.tail == rel.head).ok_or("owner head off the boundary")?;
                    let expected: Vec<Record> =
                        (0..h).map(|d| (first + d) % h).take_while(|&i| cell.owner[i] == j).map(|i| cell.boundary[i].clone()).collect();
                    let l = WorkLedger::observing(1);
                    let mut walked = Vec::new();
                    let mut cur = HalfEdge::from_record(rel);
                    while let Some(f) = successor_step(&a, &l, k, std::slice::from_ref(&cur)).map_err(|e| e.to_string())?.pop().flatten() {
                        walked.push(f.record(&a).map_err(|e| e.to_string())?);
                        if f.classify_head().ok() == Some(VertexClass::Old) || walked.len() > h {
                            break;
                        }
                        cur = f;
                    }
                    ensure(walked == expected, || format!("n {n} k {k}: walk from {rel} differs from its interval"))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} cells and intervals checked on 11 sets"))
}

fn model_compliance() -> Outcome {
    let p = random_general_position(40, 4242);
    let mut enforced = 0;
    for s in [1, 2, 3, 4, 8, 16, 64] {
        for mode in [Mode::Nearest, Mode::Farthest] {
            let l = WorkLedger::for_workspace(s, true);
            tradeoff_run(&p, mode, s, &l).map_err(|e| format!("{mode:?} s {s}: {e}"))?;
            ensure(!l.breached() && l.peak() <= l.budget(), || format!("{mode:?} s {s}: peak {}", l.peak()))?;
            enforced += 1;
        }
    }
    for (k, s) in [(1, 1), (2, 4), (2, 16), (3, 9), (3, 36), (4, 16), (4, 64)] {
        let a = ReadOnlyArena::new(p.clone());
        let l = WorkLedger::for_workspace(s, true);
        let config = PipelineConfig::new(k, s, 0).map_err(|e| e.to_string())?;
        pipeline_run(&a, &l, &config, &mut OutputSink::discard()).map_err(|e| format!("K {k} s {s}: {e}"))?;
        ensure(!l.breached() && l.peak() <= l.budget(), || format!("K {k} s {s}: peak {}", l.peak()))?;
        enforced += 1;
    }
    let mut constant = Vec::new();
    for n in [10, 100, 1000] {
        let p = random_general_position(n, 7);
        for mode in [Mode::Nearest, Mode::Farthest] {
            let l = WorkLedger::enforcing(64);
            constant_run(&p, mode, &l).map_err(|e| format!("constant n {n} {mode:?}: {e}"))?;
            ensure(l.peak() <= 64, || format!("constant n {n} {mode:?}: peak {}", l.peak()))?;
            constant.push(l.peak());
        }
    }
    let p = random_general_position(256, 99);
    let peak = |s: usize| -> Result<usize, String> {
        let l = WorkLedger::for_workspace(s, false);
        tradeoff_run(&p, Mode::Nearest, s, &l)?;
        Ok(l.peak())
    };
    let (p32, p64) = (peak(32)?, peak(64)?);
    ensure(p64 <= 2 * p32 + 64, || format!("peak(64) = {p64} > 2·{p32} + 64"))?;
    Ok(format!(
        "{enforced} enforcing runs within budget; constant peak max {}; n 256 peak(32) {p32}, peak(64) {p64}",
        constant.iter().max().unwrap()
    ))
}

fn tradeoff_trend() -> Outcome {
    let reads = |n: usize, s: usize| -> Result<u64, String> {
        let p = random_general_position(n, 1);
        let l = WorkLedger::for_workspace(s, false);
        Ok(tradeoff_run(&p, Mode::Nearest, s, &l)?.1)
    };
    let (r4, r64) = (reads(512, 4)?, reads(512, 64)?);
    let by_s = r4 as f64 / r64 as f64;
    ensure(by_s >= 8.0, || format!("reads(s=4)/reads(s=64) = {by_s:.2} < 8"))?;
    let r256 = reads(256, 16)?;
    let r512 = reads(512, 16)?;
    let by_n = r512 as f64 / r256 as f64;
    ensure((3.0..=4.5).contains(&by_n), || format!("reads(512)/reads(256) = {by_n:.2} outside [3, 4.5]"))?;
    Ok(format!("reads(s=4)/reads(s=64) = {by_s:.2}; reads(n=512)/reads(n=256) = {by_n:.2}"))
}

fn quadratic_trend() -> Outcome {
    let reads = |n: usize| -> Result<u64, String> {
        let l = WorkLedger::enforcing(64);
        Ok(constant_run(&random_general_position(n, 1), Mode::Nearest, &l)?.1)
    };
    let ratio = reads(128)? as f64 / reads(32)? as f64;
    ensure((12.0..=20.0).contains(&ratio), || format!("reads(128)/reads(32) = {ratio:.2} outside [12, 20]"))?;
    Ok(format!("reads(128)/reads(32) = {ratio:.2}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name);
    std::fs::write(path("sites.txt"), format_sites(&random_general_position(12, 77))).map_err(|e| e.to_string())?;
    let vw = |args: &[&str]| -> Result<(), String> {
        let st = Command::new(env!("CARGO_BIN_EXE_vw")).args(args).current_dir(dir.path()).output().map_err(|e| e.to_string())?;
        ensure(st.status.success(), || format!("vw {args:?}: {}", String::from_utf8_lossy(&st.stderr)))
    };
    let read = |name: &str| std::fs::read(path(name)).map_err(|e| e.to_string());
    let mut compared = 0;
    let runs: [&[&str]; 3] = [
        &["--mode", "order", "--max-k", "3", "--workspace", "36", "--seed", "5"],
        &["--mode", "nvd", "--workspace", "4"],
        &["--mode", "fvd"],
    ];
    for (i, flags) in runs.iter().enumerate() {
        for rep in ["a", "b"] {
            let (out, rep_file) = (format!("{i}{rep}.rec"), format!("{i}{rep}.report"));
            let mut args = vec!["run", "sites.txt", "--out", &out, "--report", &rep_file];
            args.extend_from_slice(flags);
            vw(&args)?;
            vw(&["svg", &out, "--out", &format!("{i}{rep}.svg"), "--sites", "sites.txt"])?;
        }
        for ext in ["rec", "report", "svg"] {
            ensure(read(&format!("{i}a.{ext}"))? == read(&format!("{i}b.{ext}"))?, || format!("run {i}: .{ext} files differ"))?;
            compared += 1;
        }
        let text = String::from_utf8(read(&format!("{i}a.rec"))?).map_err(|e| e.to_string())?;
        let recs = parse_records(&text).map_err(|e| e.to_string())?;
        ensure(!recs.is_empty() && format_records(&recs) == text, || format!("run {i}: records do not round-trip"))?;
        vw(&["verify", "sites.txt", &format!("{i}a.rec")])?;
    }
    Ok(format!("{compared} file pairs byte-identical; 3 record streams round-trip and verify"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("oracle equivalence at orders 1 and n-1", oracle_equivalence),
        ("higher-order equivalence through the pipeline", higher_orders),
        ("structural properties", structural_properties),
        ("model compliance", model_compliance),
        ("trade-off trend", tradeoff_trend),
        ("constant-workspace quadratic trend", quadratic_trend),
        ("determinism and interchange", determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
