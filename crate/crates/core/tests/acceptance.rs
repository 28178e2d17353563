//! Acceptance run: one line per criterion, `[PASS]` or `[FAIL]`, and a
//! nonzero exit status when any criterion fails. Expected values come from
//! the brute-force oracles in `common`, never from the library under test.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use bilrank::constructions::{
    alternating_odd_full, bilinear_column_family, block_symmetric, build, column_family, compress_form,
    symmetric_trace, trace_compress, ConstructionError, ConstructionRequest,
};
use bilrank::format::{ReportFile, SubspaceFile};
use bilrank::formcore::{witt_census, GramForm};
use bilrank::gf::{Elt, Field, Tower};
use bilrank::spanspace::{random_subspace, FormSubspace, Kind};
use bilrank::theoremlab::{run_suite, SuiteOptions, Verdict};
use common::{fixture_files, log_q, Enumerated, Gf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

/// Largest `q^(n+d)` the kernel oracles enumerate.
const ORACLE_LIMIT: u64 = 30_000_000;

fn field(q: u64) -> Arc<Field> {
    Field::of_order(q).unwrap()
}

fn request(name: &str, q: u64, set: impl FnOnce(&mut ConstructionRequest)) -> ConstructionRequest {
    let mut r = ConstructionRequest::new(name, q);
    set(&mut r);
    r
}

/// Constructions from the catalogue over `q ∈ {2,3,4,5}` with `n ≤ 6`.
fn catalogue() -> Vec<(String, FormSubspace)> {
    let mut reqs = Vec::new();
    for q in [2u64, 3, 4, 5] {
        for n in 2..=3 {
            reqs.push(request("alt-full", q, |r| r.n = Some(n)));
        }
        for ext in 2..=3u32 {
            for n in ext as usize..=6 {
                reqs.push(request("trace-symmetric", q, |r| (r.ext, r.n) = (Some(ext), Some(n))));
            }
        }
        for n in 3..=6 {
            reqs.push(request("alt-pencil", q, |r| r.n = Some(n)));
            reqs.push(request("block-symmetric", q, |r| (r.n, r.r) = (Some(n), Some(1))));
        }
        reqs.push(request("block-symmetric", q, |r| (r.n, r.r) = (Some(4), Some(2))));
        for k in [3, 5] {
            reqs.push(request("alt-odd", q, |r| r.k = Some(k)));
        }
        for ext in 2..=3u32 {
            reqs.push(request("alt-odd-compressed", q, |r| (r.ext, r.k) = (Some(ext), Some(3))));
        }
        for m in 1..=6 {
            reqs.push(request("column-family", q, |r| (r.m, r.r) = (Some(m), Some(1))));
        }
        for (ext, m) in [(2u32, 2usize), (2, 3), (3, 2)] {
            reqs.push(request("column-family", q, |r| (r.ext, r.m, r.r) = (Some(ext), Some(m), Some(1))));
        }
        reqs.push(request("column-family", q, |r| (r.ext, r.m, r.r) = (Some(2), Some(2), Some(2))));
    }
    reqs.iter()
        .filter_map(|req| {
            let m = build(req).ok()?.subspace;
            let feasible = m.n() <= 6 && (m.q() as u64).checked_pow((m.n() + m.dim()) as u32)? <= ORACLE_LIMIT;
            let label = format!("{} {}", req.name, bilrank::cli::campaign::point_key(req));
            feasible.then_some((label, m))
        })
        .collect()
}

fn fixture_subspaces() -> Vec<(String, FormSubspace)> {
    ["catalogue", "search"]
        .iter()
        .flat_map(|dir| fixture_files(dir))
        .map(|p| (p.display().to_string(), SubspaceFile::read(&p).unwrap().subspace))
        .collect()
}

fn suite(m: &FormSubspace, checker: &str) -> Vec<bilrank::theoremlab::VerificationReport> {
    run_suite(m, &[checker], &SuiteOptions::default())
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn counting() -> Outcome {
    let mut qs = BTreeSet::new();
    let mut count = 0;
    let mut slowest = Duration::ZERO;
    for (label, m) in catalogue() {
        let e = Enumerated::new(&m);
        let [rank] = e.spectrum()[..] else { continue };
        let (q, n, d) = (e.q(), e.n, e.d);
        let lhs = (q.pow(d as u32) - 1) * (q.pow((n - rank) as u32) - 1);
        let rhs: u64 = e.gf.vectors(n).iter().skip(1).map(|u| e.kernel(u, true).len() as u64 - 1).sum();
        check(lhs == rhs, || format!("{label}: oracle {lhs} != {rhs}"))?;
        let start = Instant::now();
        let reports = suite(&m, "counting");
        let took = start.elapsed();
        slowest = slowest.max(took);
        check(reports.iter().all(|r| r.verdict == Verdict::Holds), || {
            format!("{label}: checker {:?}", reports[0].verdict)
        })?;
        check(took < Duration::from_secs(60), || format!("{label}: {took:?}"))?;
        qs.insert(q);
        count += 1;
    }
    check(qs == BTreeSet::from([2, 3, 4, 5]), || format!("fields covered: {qs:?}"))?;
    Ok(format!("{count} constant rank instances, q in {qs:?}, slowest check {slowest:.2?}"))
}

fn random_sample() -> Vec<(String, FormSubspace)> {
    let mut out = Vec::new();
    for q in [3u64, 4, 5] {
        for n in 3..=4 {
            for kind in [Kind::General, Kind::Symmetric, Kind::Alternating] {
                for seed in 0..10u64 {
                    let d = 1 + seed as usize % 3;
                    let m = random_subspace(field(q), n, d, kind, seed).unwrap();
                    out.push((format!("random q{q} n{n} {kind} d{d} seed{seed}"), m));
                }
            }
        }
    }
    out
}

fn orthogonality() -> Outcome {
    let mut instances = catalogue();
    instances.extend(fixture_subspaces());
    instances.extend(random_sample());
    let (mut gated, mut pairs, mut violations) = (0, 0u64, Vec::new());
    for (label, m) in &instances {
        let e = Enumerated::new(m);
        let top = e.max_rank();
        let reports = suite(m, "orthogonality");
        check(reports.iter().all(|r| r.verdict != Verdict::Violated), || format!("{label}: checker violated"))?;
        if e.q() < top as u64 + 1 || top == 0 {
            continue;
        }
        gated += 1;
        let coeffs = e.gf.vectors(e.d);
        for (i, _) in e.nonzero() {
            // one element per line: scalar multiples share radicals
            if e.ranks[i] != top || coeffs[i].iter().find(|&&c| c != 0) != Some(&1) {
                continue;
            }
            // every left radical vector against a basis of the right radical
            let left = e.radical(i, true);
            let mut right: Vec<Vec<u32>> = Vec::new();
            for w in e.radical(i, false) {
                right.push(w);
                if e.gf.rank(&right) < right.len() {
                    right.pop();
                }
            }
            for (gi, g) in e.basis.iter().enumerate() {
                for u in &left {
                    let ug = e.gf.left(g, e.n, u);
                    for w in &right {
                        pairs += 1;
                        let v = ug.iter().zip(w).fold(0, |acc, (&a, &b)| e.gf.add(acc, e.gf.mul(a, b)));
                        if v != 0 {
                            violations.push(format!("{label}: basis form {gi} at u={u:?}, w={w:?}"));
                        }
                    }
                }
            }
        }
    }
    check(violations.is_empty(), || format!("{} violations, first {}", violations.len(), violations[0]))?;
    Ok(format!("{gated} instances with q >= m+1, {pairs} radical vector pairs, 0 violations"))
}

/// Distinct nonzero right radicals, as sorted vector sets.
fn radical_sets(e: &Enumerated) -> BTreeSet<Vec<Vec<u32>>> {
    e.nonzero().map(|(i, _)| e.radical(i, false).into_iter().skip(1).collect()).collect()
}

fn is_spread(e: &Enumerated, radicals: &BTreeSet<Vec<Vec<u32>>>) -> bool {
    let mut seen = BTreeSet::new();
    let total: usize = radicals.iter().map(Vec::len).sum();
    for r in radicals {
        seen.extend(r.iter().cloned());
    }
    total == seen.len() && seen.len() as u64 == e.q().pow(e.n as u32) - 1
}

fn spread() -> Outcome {
    let alt = FormSubspace::full(field(3), 3, Kind::Alternating);
    let e = Enumerated::new(&alt);
    let radicals = radical_sets(&e);
    check(radicals.len() == 13, || format!("Alt(3) over GF(3): {} radicals", radicals.len()))?;
    check(is_spread(&e, &radicals), || "Alt(3) radicals do not form a spread".into())?;
    // induced spread: the elements with a given radical, with 0, are subspaces partitioning M
    let mut classes: BTreeMap<Vec<Vec<u32>>, Vec<usize>> = BTreeMap::new();
    for (i, _) in e.nonzero() {
        classes.entry(e.radical(i, false)).or_default().push(i);
    }
    let mut covered = 0;
    for members in classes.values() {
        let set: BTreeSet<&Vec<u32>> = members.iter().map(|&i| &e.elements[i]).collect();
        for &a in members {
            for &b in members {
                let s: Vec<u32> = e.elements[a].iter().zip(&e.elements[b]).map(|(&x, &y)| e.gf.add(x, y)).collect();
                check(s.iter().all(|&x| x == 0) || set.contains(&s), || "an induced class is not closed".into())?;
            }
        }
        covered += members.len() as u64;
    }
    check(covered == e.q().pow(e.d as u32) - 1, || "induced classes do not cover M".into())?;
    let lib = alt.radical_spread(1 << 20).unwrap();
    check(lib.t == 13 && lib.covers && lib.pairwise_trivial, || format!("library spread {lib:?}"))?;
    let verdict = suite(&alt, "spread")[0].verdict;
    check(verdict == Verdict::Holds, || format!("spread checker on Alt(3): {verdict}"))?;

    let m = build(&request("alt-odd-compressed", 2, |r| (r.ext, r.k) = (Some(2), Some(3)))).unwrap().subspace;
    let e = Enumerated::new(&m);
    check(e.n == 6 && e.spectrum() == vec![4], || format!("compressed odd: n = {}, spectrum {:?}", e.n, e.spectrum()))?;
    let radicals = radical_sets(&e);
    check(radicals.len() == 21, || format!("compressed odd: {} radicals", radicals.len()))?;
    check(is_spread(&e, &radicals), || "compressed odd radicals do not form a spread".into())?;
    let lib = m.radical_spread(1 << 20).unwrap();
    check(lib.t == 21, || format!("library t = {}", lib.t))?;
    Ok("Alt(3) over GF(3): t = 13 spread with induced spread of M; compressed odd q=2: n = 6, m = 4, t = 21".into())
}

fn compression() -> Outcome {
    type Make = fn(Arc<Field>) -> Result<FormSubspace, ConstructionError>;
    let makes: Vec<(&str, u64, u32, Make)> = vec![
        ("alt-odd GF(4) k3", 2, 2, |l| alternating_odd_full(l, 3)),
        ("alt-odd GF(8) k3", 2, 3, |l| alternating_odd_full(l, 3)),
        ("alt-odd GF(16) k3", 2, 4, |l| alternating_odd_full(l, 3)),
        ("alt-odd GF(9) k3", 3, 2, |l| alternating_odd_full(l, 3)),
        ("alt-odd GF(25) k3", 5, 2, |l| alternating_odd_full(l, 3)),
        ("column-family GF(9) m3 r1", 3, 2, |l| column_family(l, 3, 1)),
        ("column-family GF(4) m2 r2", 2, 2, |l| column_family(l, 2, 2)),
        ("column-family GF(27) m2 r1", 3, 3, |l| column_family(l, 2, 1)),
        ("column-family GF(81) m2 r1", 3, 4, |l| column_family(l, 2, 1)),
        ("block-symmetric GF(9) n3 r1", 3, 2, |l| block_symmetric(l, 3, 1)),
        ("symmetric-trace over GF(4)", 2, 2, |l| symmetric_trace(l, 2)),
    ];
    let fixtures: Vec<(String, FormSubspace, Tower)> = makes
        .into_iter()
        .map(|(label, q, t, make)| {
            let tower = Tower::of_order(q, t).unwrap();
            (label.to_string(), make(tower.top().clone()).unwrap(), tower)
        })
        .collect();
    let mut elements = 0;
    for (label, inner, tower) in &fixtures {
        let t = tower.degree() as usize;
        check(tower.top().q() <= 81, || format!("{label}: |L| too large"))?;
        let big = trace_compress(inner, tower).map_err(|e| format!("{label}: {e}"))?;
        check(big.dim() == t * inner.dim(), || format!("{label}: compressed dim {}", big.dim()))?;
        let e = Enumerated::new(inner);
        let base = Gf::of(tower.base());
        let coeffs = e.gf.vectors(e.d);
        for (i, entries) in e.nonzero() {
            let c: Vec<Elt> = coeffs[i].iter().map(|&x| Elt(x)).collect();
            let f = inner.form(&c);
            let codes: Vec<u32> = f.entries().iter().map(|x| x.0).collect();
            check(&codes == entries, || format!("{label}: element {i} differs from the oracle"))?;
            let big_f = compress_form(&f, tower);
            let n = big_f.n();
            let flat: Vec<u32> = big_f.entries().iter().map(|x| x.0).collect();
            let rank = base.rank(&common::rows_of(&flat, n));
            check(rank == t * e.ranks[i], || format!("{label}: rank F = {rank}, rank f = {}", e.ranks[i]))?;
            check(big.contains(&big_f), || format!("{label}: compressed element outside the compressed subspace"))?;
            elements += 1;
        }
    }
    Ok(format!("{} fixtures, {elements} elements, rank F = t rank f throughout", fixtures.len()))
}

fn spectra() -> Outcome {
    for q in [3u64, 5] {
        let m = block_symmetric(field(q), 4, 2).unwrap();
        let e = Enumerated::new(&m);
        check(e.d == 4 && e.spectrum() == vec![2, 4], || format!("block q{q}: dim {}, {:?}", e.d, e.spectrum()))?;
        check(m.basis().iter().all(GramForm::is_symmetric), || "block: not symmetric".into())?;
    }
    let m = symmetric_trace(field(3), 2).unwrap();
    let e = Enumerated::new(&m);
    check(e.d == 2 && e.spectrum() == vec![2], || format!("trace: dim {}, {:?}", e.d, e.spectrum()))?;
    check(m.basis().iter().all(GramForm::is_symmetric), || "trace: not symmetric".into())?;
    let m = bilinear_column_family(3, 2, 3, 1).unwrap();
    let e = Enumerated::new(&m);
    check(e.d == 6 && e.n == 6 && e.spectrum() == vec![2], || format!("column: dim {}, {:?}", e.d, e.spectrum()))?;
    check(e.nonzero().all(|(i, _)| e.same_radical(1, i, true)), || "column: right radicals differ".into())?;
    Ok("block(4,2): dim 4, {2,4}; trace GF(3) m=2: dim 2, {2}; column GF(9) m3 r1: dim 6, {2}, one right radical"
        .into())
}

fn fuzzing() -> Outcome {
    let start = Instant::now();
    let mut grid = Vec::new();
    for q in [3u64, 5] {
        for n in 3..=5usize {
            for kind in [Kind::General, Kind::Symmetric, Kind::Alternating] {
                grid.push((q, n, kind));
            }
        }
    }
    let tallies: Vec<(String, [u64; 4])> = grid
        .par_iter()
        .map(|&(q, n, kind)| {
            let dmax = kind.ambient_dim(n).min(if q == 3 { 5 } else { 4 });
            let mut t = [0u64; 4];
            for seed in 0..1000u64 {
                let d = 1 + (seed as usize % dmax);
                let m = random_subspace(field(q), n, d, kind, seed).unwrap();
                for r in run_suite(&m, &["bounds", "kernel-bounds"], &SuiteOptions::default()) {
                    t[r.verdict as usize] += 1;
                }
            }
            (format!("q{q} n{n} {kind}"), t)
        })
        .collect();
    let took = start.elapsed();
    let sum = |i: usize| tallies.iter().map(|(_, t)| t[i]).sum::<u64>();
    if let Some((label, _)) = tallies.iter().find(|(_, t)| t[Verdict::Violated as usize] > 0) {
        return Err(format!("violations at {label}"));
    }
    check(sum(Verdict::BudgetExceeded as usize) == 0, || "budget exceeded".into())?;
    check(took < Duration::from_secs(600), || format!("took {took:?}"))?;
    Ok(format!(
        "{} subspaces, {} holds, {} not applicable, 0 violated, {took:.1?}",
        grid.len() * 1000,
        sum(Verdict::Holds as usize),
        sum(Verdict::NotApplicable as usize)
    ))
}

fn witt() -> Outcome {
    let mut forms = 0;
    for q in [3u64, 5] {
        let f = field(q);
        let gf = Gf::of(&f);
        for n in 1..=4usize {
            let slots: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
            let total = q.pow(slots.len() as u32);
            let mut rng = ChaCha8Rng::seed_from_u64(q * 100 + n as u64);
            let codes: Vec<u64> =
                if total <= 1000 { (0..total).collect() } else { (0..1000).map(|_| rng.gen_range(0..total)).collect() };
            for mut code in codes {
                let mut rows = vec![vec![Elt::ZERO; n]; n];
                for &(i, j) in &slots {
                    let v = Elt((code % q) as u32);
                    code /= q;
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
                let g = GramForm::from_rows(n, &rows).unwrap();
                let census = witt_census(&f, &g).unwrap();
                let flat: Vec<u32> = rows.iter().flatten().map(|e| e.0).collect();
                let brute = gf.vectors(n).iter().skip(1).filter(|x| gf.eval(&flat, n, x, x) == 0).count() as u64;
                check(census.isotropic_nonzero_count == brute, || {
                    format!("GF({q}) n={n} {rows:?}: closed form {} vs {brute}", census.isotropic_nonzero_count)
                })?;
                check(census.rank == gf.rank(&common::rows_of(&flat, n)), || format!("GF({q}) {rows:?}: rank"))?;
                forms += 1;
            }
        }
    }
    Ok(format!("{forms} symmetric forms over GF(3), GF(5), n <= 4, exact agreement"))
}

fn maximality() -> Outcome {
    let start = Instant::now();
    let path = common::fixtures().join("catalogue/trace-symmetric-q3-ext2-n3.sub");
    let m = SubspaceFile::read(&path).unwrap().subspace;
    let e = Enumerated::new(&m);
    check(e.n == 3 && e.d == 2 && e.spectrum() == vec![2], || "fixture is not constant rank 2 of dim 2".into())?;
    let gf = &e.gf;
    let members: BTreeSet<&Vec<u32>> = e.elements.iter().collect();
    let (mut scanned, mut extensions) = (0, 0);
    for upper in gf.vectors(6) {
        let mut g = vec![0u32; 9];
        let mut it = upper.iter();
        for i in 0..3 {
            for j in i..3 {
                let v = *it.next().unwrap();
                g[i * 3 + j] = v;
                g[j * 3 + i] = v;
            }
        }
        scanned += 1;
        if members.contains(&g) {
            continue;
        }
        let constant = e.elements.iter().all(|f| {
            (1..gf.q).all(|c| {
                let h: Vec<u32> = f.iter().zip(&g).map(|(&x, &y)| gf.add(x, gf.mul(c, y))).collect();
                gf.rank(&common::rows_of(&h, 3)) == 2
            })
        });
        extensions += constant as usize;
    }
    check(scanned == 729, || format!("scanned {scanned}"))?;
    check(extensions == 0, || format!("{extensions} constant rank 2 extensions"))?;
    let verdict = suite(&m, "maximality")[0].verdict;
    check(verdict == Verdict::Holds, || format!("maximality checker: {verdict}"))?;
    let took = start.elapsed();
    check(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("729 symmetric matrices scanned, no extension, checker holds, {took:.2?}"))
}

fn kernel_bounds() -> Outcome {
    let mut instances = fixture_subspaces();
    instances.extend(catalogue());
    instances.retain(|(_, m)| (m.q() as u64).pow((m.n() + m.dim()) as u32) <= ORACLE_LIMIT);
    let (mut vectors, mut improved, mut equality) = (0u64, 0u64, 0u64);
    for (label, m) in &instances {
        let e = Enumerated::new(m);
        let (q, n, d, top) = (e.q(), e.n, e.d, e.max_rank());
        let alternating = m.basis().iter().all(|f| f.is_alternating(m.field()));
        for u in e.gf.vectors(n).iter().skip(1) {
            vectors += 1;
            for left in [true, false] {
                let ker = e.kernel(u, left);
                let dim = log_q(q, ker.len() as u64);
                check(dim + n >= d, || format!("{label}: dim M_u = {dim} < {d} - {n} at {u:?}"))?;
                if alternating {
                    check(dim + n > d, || format!("{label}: alternating dim M_u = {dim} at {u:?}"))?;
                }
                let tops: Vec<usize> = ker.iter().copied().filter(|&i| e.ranks[i] == top).collect();
                if tops.is_empty() || q < top as u64 + 1 {
                    continue;
                }
                improved += 1;
                check(dim + top >= d, || format!("{label}: dim M_u = {dim} < {d} - {top} at {u:?}"))?;
                if dim + top == d {
                    equality += 1;
                    // M_u^L forces equal right radicals, M_u^R equal left radicals
                    check(tops.iter().all(|&i| e.same_radical(tops[0], i, left)), || {
                        format!("{label}: equality case at {u:?} with different radicals")
                    })?;
                }
            }
        }
        let reports = suite(m, "kernel-bounds");
        check(reports.iter().all(|r| r.verdict != Verdict::Violated), || format!("{label}: checker violated"))?;
    }
    Ok(format!(
        "{} fixtures, {vectors} vectors, {improved} improved-bound cases ({equality} equality), 0 violations",
        instances.len()
    ))
}

fn witness_replay() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let files = fixture_files("corrupted");
    check(files.len() == bilrank::theoremlab::CHECKERS.len(), || format!("{} corrupted fixtures", files.len()))?;
    for path in &files {
        let checker = path.file_stem().unwrap().to_str().unwrap().to_string();
        let report_path: PathBuf = dir.path().join(format!("{checker}.json"));
        let mut args = vec!["verify".to_string(), path.display().to_string(), "--suite".into(), checker.clone()];
        args.extend(["--json".into(), "--out".into(), report_path.display().to_string()]);
        if checker != "claims" {
            args.push("--explore".into());
        }
        let out =
            Command::new(env!("CARGO_BIN_EXE_bilrank")).args(&args).env_remove("BILRANK_BUDGET").output().unwrap();
        check(out.status.code() == Some(1), || format!("{checker}: exit {:?}", out.status.code()))?;
        let report = ReportFile::parse(&std::fs::read_to_string(&report_path).unwrap()).map_err(|e| e.to_string())?;
        let subspace = SubspaceFile::read(path).unwrap().subspace;
        let violated: Vec<_> = report.reports.iter().filter(|r| r.verdict == Verdict::Violated).collect();
        check(!violated.is_empty(), || format!("{checker}: no violated report"))?;
        for r in violated {
            let w = r.witness.as_ref().ok_or_else(|| format!("{checker}: {} has no witness", r.theorem_id))?;
            check(w.replay(&subspace, report.budget), || format!("{checker}: {} does not replay", r.theorem_id))?;
        }
        let replay = Command::new(env!("CARGO_BIN_EXE_bilrank"))
            .args(["replay", &path.display().to_string(), &report_path.display().to_string()])
            .output()
            .unwrap();
        check(replay.status.success(), || format!("{checker}: bilrank replay failed"))?;
    }
    Ok(format!("{} corrupted fixtures: exit 1, witnesses replay", files.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("counting identity", counting),
        ("orthogonality", orthogonality),
        ("spread", spread),
        ("trace compression", compression),
        ("construction spectra", spectra),
        ("dimension-bound fuzzing", fuzzing),
        ("Witt census", witt),
        ("maximality", maximality),
        ("kernel bounds", kernel_bounds),
        ("witness replay", witness_replay),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("[PASS] criterion {}: {name}: {detail} ({took:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] criterion {}: {name}: {why} ({took:.2?})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
