//! Acceptance suite: one line per criterion, then a determinism rerun.
//!
//! Every suite writes a report; criterion 15 runs all suites again and
//! compares the report bytes. Set `ACCEPTANCE_REPORTS=DIR` to keep the
//! reports on disk.

use std::time::Instant;

use quantclass_cli::{Format, Report};
use quantclass_core::decompose::{
    decode_nary, decoding_formula, decoding_vars, distinguishing_system, encode_nary, inj_decompose, inj_from_equiv,
    inj_reconstruct, interpret_injection, monadic_core, monadic_extraction, monadic_reconstruct, verify_ac_support,
    verify_system, ExtractionCase, MonadicCore,
};
use quantclass_core::family::FamilySpec;
use quantclass_core::invariants::{
    is_support_naive, is_support_single_flip, lambda0, lambda0_prime, lambda0_prime_within_domain, lambda1,
    lambda1_unrestricted, min_support_by_enumeration, nu_ge,
};
use quantclass_core::logic::{
    check_interpretation, compose_interpretations, defined_relation, parse_formula, search_interpretation,
    verify_certificate, Model, Outcome, SearchBounds, SearchOutcome,
};
use quantclass_core::relation::{approx_eq, for_each_tuple};
use quantclass_core::{Budget, ElemSet, EquivalenceRelation, PartialInjection, QuantifierFamily, Relation, Universe};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const BUDGET: Budget = Budget { max_members: 2_000_000, max_work: 2_000_000_000 };

/// Counts checks and keeps the first few failures.
struct Tally {
    checked: usize,
    failures: usize,
    first: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { checked: 0, failures: 0, first: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first.len() < 5 {
                self.first.push(what());
            }
        }
    }

    fn ok(&self) -> bool {
        self.failures == 0 && self.checked > 0
    }

    fn write(&self, rep: &mut Report) {
        rep.set("checked", self.checked);
        rep.set("failures", self.failures);
        rep.set("first_failures", json!(self.first));
    }
}

struct Outcome1 {
    pass: bool,
    summary: String,
}

fn u(n: u32) -> Universe {
    Universe::new(n).unwrap()
}

fn random_relation(rng: &mut ChaCha8Rng, n: u32, arity: usize, p: f64) -> Relation {
    Relation::from_predicate(u(n), arity, |_| rng.gen_bool(p)).unwrap()
}

/// A random relation whose tuples only use elements of `dom`.
fn relation_on(rng: &mut ChaCha8Rng, n: u32, arity: usize, dom: &[u32], p: f64) -> Relation {
    let set: ElemSet = dom.iter().collect();
    Relation::from_predicate(u(n), arity, |t| t.iter().all(|&x| set.contains(x)) && rng.gen_bool(p)).unwrap()
}

fn random_subset(rng: &mut ChaCha8Rng, n: u32, k: usize) -> Vec<u32> {
    let mut v: Vec<u32> = (0..n).collect();
    v.shuffle(rng);
    v.truncate(k);
    v.sort_unstable();
    v
}

fn fmt_rel(r: &Relation) -> String {
    format!("N={} {:?}", r.universe().size(), r.tuples().collect::<Vec<_>>())
}

/// Every equivalence relation on a subset of `0..n`: label `n` means
/// outside the domain, class labels grow in order of first use.
fn equivalences(n: u32) -> Vec<EquivalenceRelation> {
    fn go(x: u32, n: u32, labels: &mut Vec<u32>, used: u32, out: &mut Vec<Vec<u32>>) {
        if x == n {
            out.push(labels.clone());
            return;
        }
        for l in 0..=used.min(n - 1) {
            labels.push(l);
            go(x + 1, n, labels, if l == used { used + 1 } else { used }, out);
            labels.pop();
        }
        labels.push(n);
        go(x + 1, n, labels, used, out);
        labels.pop();
    }
    let mut all = Vec::new();
    go(0, n, &mut Vec::new(), 0, &mut all);
    all.into_iter()
        .map(|labels| {
            let mut blocks = vec![Vec::new(); n as usize];
            for (x, &l) in labels.iter().enumerate() {
                if l < n {
                    blocks[l as usize].push(x as u32);
                }
            }
            EquivalenceRelation::new(u(n), blocks.into_iter().filter(|b| !b.is_empty()).collect()).unwrap()
        })
        .collect()
}

fn unary_closed_form(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    for mask in 0u32..64 {
        let r = Relation::from_predicate(u(6), 1, |x| mask >> x[0] & 1 == 1).unwrap();
        let l = lambda0_prime(&r, &BUDGET).unwrap();
        let want = r.len().min(6 - r.len());
        t.check(l.exact && l.value == want, || format!("{}: got {}, want {want}", fmt_rel(&r), l.value));
    }
    t.write(rep);
    Outcome1 { pass: t.ok(), summary: format!("{}/{} unary relations on N=6", t.checked - t.failures, t.checked) }
}

fn equivalence_case_split(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let mut by_case = [0usize; 4];
    let mut literal_misses = 0usize;
    for n in 1..=7u32 {
        for e in equivalences(n) {
            let r = e.to_relation();
            let l0p = lambda0_prime(&r, &BUDGET).unwrap();
            let l0 = lambda0(&r, &BUDGET).unwrap();
            let big = e.blocks().iter().map(Vec::len).max().unwrap_or(0);
            let singles = e.blocks().iter().filter(|b| b.len() == 1).count();
            let dom = e.dom().len();
            let outside = n as usize - dom;
            let half = (n / 2) as usize;
            let expect = |third: usize| -> Option<usize> {
                [big, singles, third].into_iter().filter(|&k| 2 * k >= n as usize).max().map(|k| n as usize - k)
            };
            let agrees = |e: Option<usize>| match e {
                Some(v) => l0p.value == v && l0 == v,
                None => l0p.value > half && l0 == half,
            };
            if !agrees(expect(dom)) {
                literal_misses += 1;
            }
            let want = expect(outside);
            let case = match want {
                None => 3,
                Some(v) if v == n as usize - big => 0,
                Some(v) if v == n as usize - singles => 1,
                Some(_) => 2,
            };
            by_case[case] += 1;
            t.check(l0p.exact && agrees(want), || {
                format!("{}: lambda0' {} lambda0 {l0}, expected {want:?}", fmt_rel(&r), l0p.value)
            });
        }
    }
    t.write(rep);
    rep.set(
        "cases",
        json!({ "large_class": by_case[0], "singletons": by_case[1], "outside_domain": by_case[2], "otherwise": by_case[3] }),
    );
    rep.set("third_case_read_as_domain_size_misses", literal_misses);
    Outcome1 {
        pass: t.ok(),
        summary: format!(
            "{}/{} equivalence relations on N<=7 (third case read as k=|U\\Dom(E)|; as k=|Dom(E)| it misses {literal_misses})",
            t.checked - t.failures,
            t.checked
        ),
    }
}

fn lambda1_bound(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let mut equal = 0usize;
    let mut check = |r: &Relation, t: &mut Tally| {
        let l0 = lambda0_prime(r, &BUDGET).unwrap();
        let l1 = lambda1(r, &BUDGET).unwrap();
        let n = r.arity() as u32;
        let cap = 1u64 << (1u64 << (n * n)).min(63);
        if l1.value == l0.value + 1 {
            equal += 1;
        }
        let ok = l0.exact && l1.exact && l1.value <= l0.value + 1 && (l1.value != l0.value + 1 || (l1.value as u64) <= cap);
        t.check(ok, || format!("{}: lambda1 {} lambda0' {}", fmt_rel(r), l1.value, l0.value));
    };
    for mask in 0u32..1 << 16 {
        let r = Relation::from_predicate(u(4), 2, |x| mask >> (x[0] * 4 + x[1]) & 1 == 1).unwrap();
        check(&r, &mut t);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2000 {
        let p = rng.gen_range(0.05..0.95);
        let r = random_relation(&mut rng, 6, 2, p);
        check(&r, &mut t);
    }
    t.write(rep);
    rep.set("equality_cases", equal);
    Outcome1 {
        pass: t.ok(),
        summary: format!("{}/{} relations (all of N=4, 2000 random on N=6), {equal} with equality", t.checked - t.failures, t.checked),
    }
}

fn subadditivity(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut tight = 0usize;
    for _ in 0..200 {
        let rs: Vec<Relation> = (0..3)
            .map(|_| {
                let p = rng.gen_range(0.05..0.6);
                let k = rng.gen_range(2..=6);
                let dom = random_subset(&mut rng, 6, k);
                relation_on(&mut rng, 6, 2, &dom, p)
            })
            .collect();
        let sum: usize = rs.iter().map(|r| lambda0_prime(r, &BUDGET).unwrap().value).sum();
        // Every Boolean function of three relations, by truth table.
        for table in 0u32..256 {
            let comb = Relation::from_predicate(u(6), 2, |x| {
                let bits = rs.iter().enumerate().fold(0, |b, (i, r)| b | (u32::from(r.contains(x)) << i));
                table >> bits & 1 == 1
            })
            .unwrap();
            let l = lambda0_prime(&comb, &BUDGET).unwrap().value;
            if l == sum {
                tight += 1;
            }
            t.check(l <= sum, || format!("table {table}: {l} > {sum} for {:?}", rs.iter().map(fmt_rel).collect::<Vec<_>>()));
        }
    }
    t.write(rep);
    rep.set("tight", tight);
    Outcome1 {
        pass: t.ok(),
        summary: format!("{}/{} combinations over 200 triples on N=6", t.checked - t.failures, t.checked),
    }
}

/// `R(t)` iff some tuple of `R₁` is `≈_A`-equivalent to `t`, read straight
/// off the definition.
fn core_oracle(core: &MonadicCore, t: &[u32]) -> bool {
    if core.whole {
        return core.r1.contains(t);
    }
    core.r1.tuples().any(|s| approx_eq(t, s, &core.support).unwrap())
}

fn monadic_cores(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut whole = 0usize;
    for i in 0..500 {
        let arity = rng.gen_range(1..=3);
        let n = rng.gen_range(arity as u32 + 1..=10);
        let r = match i % 3 {
            0 => {
                let p = rng.gen_range(0.02..0.5);
                random_relation(&mut rng, n, arity, p)
            }
            1 => {
                let k = rng.gen_range(1..=n as usize);
                let dom = random_subset(&mut rng, n, k);
                let p = rng.gen_range(0.1..0.9);
                relation_on(&mut rng, n, arity, &dom, p)
            }
            _ => {
                let k = rng.gen_range(1..=n as usize);
                let dom = random_subset(&mut rng, n, k);
                let p = rng.gen_range(0.1..0.9);
                relation_on(&mut rng, n, arity, &dom, p).complement().unwrap()
            }
        };
        let core = monadic_core(&r, &BUDGET).unwrap();
        let l0 = lambda0_prime(&r, &BUDGET).unwrap().value;
        whole += usize::from(core.whole);
        let mut bad = None;
        for_each_tuple(n, arity, |x| {
            let v = r.contains(x);
            if monadic_reconstruct(&core, x) != v || core_oracle(&core, x) != v {
                bad = Some(x.to_vec());
            }
            bad.is_some()
        });
        let dom = core.r1.domain().len();
        t.check(bad.is_none() && dom <= l0 + arity, || {
            format!("{}: difference at {bad:?}, |Dom(R1)| {dom}, lambda0' {l0}", fmt_rel(&r))
        });
    }
    t.write(rep);
    rep.set("whole", whole);
    Outcome1 { pass: t.ok(), summary: format!("{}/{} relations, arity<=3, N<=10", t.checked - t.failures, t.checked) }
}

/// Sparse, few-block and small-domain binary relations; random ones almost
/// never have `λ₁ <= 2`.
fn low_lambda1_relation(rng: &mut ChaCha8Rng, n: u32) -> Relation {
    match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(1..=3);
            let dom = random_subset(rng, n, k);
            let p = rng.gen_range(0.2..0.9);
            relation_on(rng, n, 2, &dom, p)
        }
        1 => {
            let mut labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..2)).collect();
            labels.shuffle(rng);
            let pick = [rng.gen_bool(0.5), rng.gen_bool(0.5), rng.gen_bool(0.5), rng.gen_bool(0.5)];
            let diag = rng.gen_range(0..3);
            Relation::from_predicate(u(n), 2, |x| {
                let (a, b) = (labels[x[0] as usize], labels[x[1] as usize]);
                match diag {
                    1 if x[0] == x[1] => true,
                    2 if x[0] == x[1] => false,
                    _ => pick[(a * 2 + b) as usize],
                }
            })
            .unwrap()
        }
        2 => {
            let m = rng.gen_range(0..=3);
            let pairs: Vec<[u32; 2]> = (0..m).map(|_| [rng.gen_range(0..n), rng.gen_range(0..n)]).collect();
            Relation::new(u(n), 2, pairs).unwrap()
        }
        _ => {
            let k = rng.gen_range(1..=3);
            let dom = random_subset(rng, n, k);
            let p = rng.gen_range(0.2..0.9);
            relation_on(rng, n, 2, &dom, p).complement().unwrap()
        }
    }
}

fn inj_packages(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut tried = 0usize;
    let mut by_lambda1 = [0usize; 3];
    while t.checked < 200 {
        tried += 1;
        let r = low_lambda1_relation(&mut rng, 12);
        let l1 = lambda1(&r, &BUDGET).unwrap();
        if l1.value * 4 + 2 >= 12 {
            continue;
        }
        by_lambda1[l1.value] += 1;
        let core = inj_decompose(&r, &BUDGET).unwrap();
        let check = verify_ac_support(&r, &core.support, &BUDGET).unwrap();
        let mut bad = None;
        for_each_tuple(12, 2, |x| {
            if inj_reconstruct(&core, x) != r.contains(x) {
                bad = Some(x.to_vec());
            }
            bad.is_some()
        });
        let dom = core.r1.domain().len();
        t.check(check.ok() && bad.is_none() && dom <= 4 * l1.value, || {
            format!("{}: clauses {check:?}, difference at {bad:?}, |Dom(R1)| {dom}", fmt_rel(&r))
        });
    }
    t.write(rep);
    rep.set("generated", tried);
    rep.set("by_lambda1", json!(by_lambda1));
    Outcome1 {
        pass: t.ok(),
        summary: format!("{}/{} relations on N=12 with 4*lambda1+2<12 ({tried} generated)", t.checked - t.failures, t.checked),
    }
}

fn distinguishing_systems(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rematched = 0usize;
    let mut total = 0usize;
    for _ in 0..100 {
        let p = rng.gen_range(0.05..0.7);
        let r = random_relation(&mut rng, 10, 2, p);
        let s = distinguishing_system(&r, &BUDGET).unwrap();
        let l0 = lambda0_prime(&r, &BUDGET).unwrap().value;
        let stated = l0.min(10 - 2) / 2;
        let clauses = verify_system(&r, &s.a, &s.triples);
        rematched += usize::from(s.rematched);
        total += s.triples.len();
        t.check(clauses.is_none() && s.triples.len() >= stated && s.stated_bound == stated, || {
            format!("{}: {} triples, bound {stated}, clauses {clauses:?}", fmt_rel(&r), s.triples.len())
        });
    }
    t.write(rep);
    rep.set("rematched", rematched);
    rep.set("triples", total);
    Outcome1 { pass: t.ok(), summary: format!("{}/{} relations on N=10", t.checked - t.failures, t.checked) }
}

fn nary_encodings(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut formula_checked = 0usize;
    for _ in 0..200 {
        let arity = rng.gen_range(1..=3);
        let n = rng.gen_range(2..=8u32);
        let a_size = rng.gen_range(1..n as usize);
        let a: Vec<u32> = random_subset(&mut rng, n, a_size);
        let room = n as usize - a_size;
        let m = rng.gen_range(0..=room);
        let rows: Vec<Vec<u32>> = (0..m).map(|_| (0..arity).map(|_| *a.choose(&mut rng).unwrap()).collect()).collect();
        let r = Relation::new(u(n), arity, rows).unwrap();
        let set: ElemSet = a.iter().collect();
        let enc = encode_nary(&r, &set).unwrap();
        let mut bad = None;
        for_each_tuple(n, arity, |x| {
            if decode_nary(&enc, x) != r.contains(x) {
                bad = Some(x.to_vec());
            }
            bad.is_some()
        });
        let mut reading = true;
        if n <= 5 {
            formula_checked += 1;
            let model = enc.model().unwrap();
            let defined = defined_relation(&decoding_formula(arity), &model, &decoding_vars(arity), &BUDGET).unwrap();
            reading = defined == r;
        }
        t.check(bad.is_none() && reading, || {
            format!("{} with A={a:?}: closure difference at {bad:?}, formula reading agrees {reading}", fmt_rel(&r))
        });
    }
    t.write(rep);
    rep.set("formula_checked", formula_checked);
    Outcome1 {
        pass: t.ok(),
        summary: format!(
            "{}/{} encodings, {formula_checked} also read through the formula (N<=5)",
            t.checked - t.failures,
            t.checked
        ),
    }
}

fn injection_interpretations(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut sizes = [0usize; 5];
    while t.checked < 100 {
        let p = rng.gen_range(0.02..0.3);
        let k = rng.gen_range(3..=14);
        let dom = random_subset(&mut rng, 14, k);
        let r = relation_on(&mut rng, 14, 2, &dom, p);
        let l1 = lambda1(&r, &BUDGET).unwrap().value;
        let cap = l1.min(14 / 3);
        let m = rng.gen_range(0..=cap);
        let mut pool: Vec<u32> = (0..14).collect();
        pool.shuffle(&mut rng);
        let sources = &pool[..m];
        let mut targets: Vec<u32> = (0..14).collect();
        targets.shuffle(&mut rng);
        let h = PartialInjection::new(u(14), sources.iter().copied().zip(targets[..m].iter().copied()).collect()).unwrap();
        sizes[m] += 1;
        let result = interpret_injection(&r, &h, &BUDGET).and_then(|i| i.defined(&BUDGET));
        let ok = matches!(&result, Ok(d) if *d == h.to_relation());
        t.check(ok, || format!("{} with h={:?}: {:?}", fmt_rel(&r), h.pairs(), result.map(|d| fmt_rel(&d))));
    }
    t.write(rep);
    rep.set("by_domain_size", json!(sizes));
    Outcome1 { pass: t.ok(), summary: format!("{}/{} (R, h) pairs on N=14", t.checked - t.failures, t.checked) }
}

fn injections_from_equivalences(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    for n in 1..=6u32 {
        for e in equivalences(n) {
            let nu = nu_ge(&e, 2);
            if nu == 0 {
                continue;
            }
            let res = inj_from_equiv(&e, &BUDGET);
            let ok = matches!(&res, Ok(i) if i.injection.len() >= nu
                && i.injection.pairs().iter().all(|&(s, d)| s != d && e.class_of(s).contains(d)));
            t.check(ok, || format!("{:?}: {:?}", e.blocks(), res.map(|i| i.injection)));
        }
    }
    t.write(rep);
    Outcome1 {
        pass: t.ok(),
        summary: format!("{}/{} equivalence relations on N<=6 with a class of size >=2", t.checked - t.failures, t.checked),
    }
}

fn family(spec: &str) -> QuantifierFamily {
    FamilySpec::parse(spec).unwrap().resolve(&|_| None).unwrap()
}

fn oracle_cases(rep: &mut Report) -> Outcome1 {
    let phi = parse_formula("(and (S0 x0) (S1 x0))").unwrap();
    let vars = vec!["x0".to_string()];
    let mut t = Tally::new();
    let mut members = Vec::new();
    for n in [6u32, 8, 10] {
        let model = Model::new(u(n));
        let o = check_interpretation(&phi, &vars, &family("mon:1"), &[family("mon:2")], &model, &BUDGET).unwrap();
        let ok = match &o {
            Outcome::Certified(c) => {
                members.push(c.entries.len());
                verify_certificate(c, &model, &BUDGET).unwrap()
            }
            Outcome::Counterexample(_) => false,
        };
        t.check(ok, || format!("N={n}: {o:?}"));
    }
    let model = Model::new(u(6));
    let bounds = SearchBounds { max_witnesses: 1, max_depth: 0, max_size: 6, max_so_depth: 0 };
    let s = search_interpretation(&family("mon:2"), &family("mon:1"), &model, &bounds, &BUDGET).unwrap();
    let tried = match s {
        SearchOutcome::Exhausted { tried } => Some(tried),
        SearchOutcome::Found(_) => None,
    };
    t.check(tried.is_some(), || "a formula with one witness interprets mon:2 from mon:1".into());
    t.write(rep);
    rep.set("certified_members", json!(members));
    rep.set("negative_search_tried", json!(tried));
    Outcome1 {
        pass: t.ok(),
        summary: format!(
            "intersection formula certified at N=6,8,10; one-witness search exhausted after {} candidates",
            tried.map_or("?".into(), |x| x.to_string())
        ),
    }
}

fn composition(rep: &mut Report) -> Outcome1 {
    let phi = parse_formula("(and (S0 x0) (S1 x0))").unwrap();
    let vars = vec!["x0".to_string()];
    let model = Model::new(u(10));
    let mut t = Tally::new();
    let c12 = check_interpretation(&phi, &vars, &family("mon:1"), &[family("mon:2")], &model, &BUDGET).unwrap();
    let c23 = check_interpretation(&phi, &vars, &family("mon:2"), &[family("mon:4")], &model, &BUDGET).unwrap();
    match (c12, c23) {
        (Outcome::Certified(a), Outcome::Certified(b)) => {
            let c = compose_interpretations(&a, &b, &model, &BUDGET);
            let ok = matches!(&c, Ok(c) if verify_certificate(c, &model, &BUDGET).unwrap() && c.rel_vars.len() == 4);
            t.check(ok, || format!("{c:?}"));
            if let Ok(c) = c {
                rep.set("formula", quantclass_core::logic::format_formula(&c.formula));
                rep.set("members", c.entries.len());
            }
        }
        other => t.check(false, || format!("a step did not certify: {other:?}")),
    }
    t.write(rep);
    Outcome1 { pass: t.ok(), summary: "mon:1 <= mon:2 <= mon:4 composed at N=10 and re-verified".into() }
}

fn search_reductions(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let all: ElemSet = u(4).all();
    let subsets: Vec<ElemSet> = (0u32..16).map(|m| (0..4).filter(|x| m >> x & 1 == 1).collect()).collect();
    let mut flips = 0usize;
    for mask in 0u32..1 << 16 {
        let r = Relation::from_predicate(u(4), 2, |x| mask >> (x[0] * 4 + x[1]) & 1 == 1).unwrap();
        let fast = lambda0_prime(&r, &BUDGET).unwrap();
        let dom = lambda0_prime_within_domain(&r, &BUDGET).unwrap();
        let naive = min_support_by_enumeration(&r, &all, &BUDGET, true).unwrap();
        let l1 = lambda1(&r, &BUDGET).unwrap();
        let l1u = lambda1_unrestricted(&r, &BUDGET).unwrap();
        let mut flip_ok = true;
        for a in &subsets {
            flips += 1;
            if is_support_single_flip(a, &r).unwrap() != is_support_naive(a, &r, &BUDGET).unwrap() {
                flip_ok = false;
            }
        }
        t.check(
            fast.value == naive.value && dom.value == naive.value && l1.value == l1u.value && flip_ok,
            || {
                format!(
                    "{}: lambda0' {}/{}/{} lambda1 {}/{} single flip agrees {flip_ok}",
                    fmt_rel(&r),
                    fast.value,
                    dom.value,
                    naive.value,
                    l1.value,
                    l1u.value
                )
            },
        );
    }
    t.write(rep);
    rep.set("support_checks", flips);
    Outcome1 {
        pass: t.ok(),
        summary: format!("{}/{} binary relations on N=4, {flips} support checks", t.checked - t.failures, t.checked),
    }
}

fn case_name(c: &ExtractionCase) -> String {
    match c {
        ExtractionCase::Unary { .. } => "unary".into(),
        ExtractionCase::PhiStar => "phi_star".into(),
        ExtractionCase::Reduced { inner, .. } => format!("reduced/{}", case_name(inner)),
        ExtractionCase::Distinguishing { .. } => "distinguishing".into(),
    }
}

fn extractions(rep: &mut Report) -> Outcome1 {
    let mut t = Tally::new();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut cases = std::collections::BTreeMap::new();
    for _ in 0..20 {
        let k = rng.gen_range(2..=10);
        let dom = random_subset(&mut rng, 20, k);
        let p = rng.gen_range(0.1..0.8);
        let r = relation_on(&mut rng, 20, 2, &dom, p);
        let want = lambda0(&r, &BUDGET).unwrap();
        match monadic_extraction(&r, &BUDGET) {
            Ok(e) => {
                *cases.entry(case_name(&e.case)).or_insert(0usize) += 1;
                let d = &e.definition;
                let mut model = Model::new(r.universe());
                for (name, p) in &d.copies {
                    model = model.with_relation(name, r.permute(p)).unwrap();
                }
                let set = defined_relation(&d.formula, &model, &[d.var.clone()], &BUDGET).unwrap().as_set().unwrap();
                t.check(set.len() == want && set == e.set, || {
                    format!("{}: case {:?}, defined {} elements, lambda0 {want}", fmt_rel(&r), e.case, set.len())
                });
            }
            Err(err) => t.check(false, || format!("{}: {err}", fmt_rel(&r))),
        }
    }
    t.write(rep);
    rep.set("cases", json!(cases));
    Outcome1 {
        pass: t.ok(),
        summary: format!("{}/{} relations on N=20, cases {cases:?}", t.checked - t.failures, t.checked),
    }
}

type Suite = fn(&mut Report) -> Outcome1;

const SUITES: [(&str, Suite); 14] = [
    ("unary closed form", unary_closed_form),
    ("equivalence relation case split", equivalence_case_split),
    ("lambda1 <= lambda0' + 1", lambda1_bound),
    ("subadditivity of lambda0'", subadditivity),
    ("monadic core round trip", monadic_cores),
    ("(A, C) support and injection core", inj_packages),
    ("distinguishing systems", distinguishing_systems),
    ("n-ary encoding round trip", nary_encodings),
    ("injections defined from copies", injection_interpretations),
    ("injections from equivalence relations", injections_from_equivalences),
    ("oracle positives and negatives", oracle_cases),
    ("composition of interpretations", composition),
    ("search-space reductions", search_reductions),
    ("monadic extraction", extractions),
];

fn run(i: usize) -> (Outcome1, String) {
    let mut rep = Report::new("acceptance", BUDGET);
    rep.flag("criterion", i + 1);
    let out = (SUITES[i].1)(&mut rep);
    rep.set("pass", out.pass);
    (out, rep.render(Format::Json))
}

fn main() {
    let dir = std::env::var_os("ACCEPTANCE_REPORTS").map(std::path::PathBuf::from);
    let mut reports = Vec::new();
    let mut failed = 0;
    for i in 0..SUITES.len() {
        let start = Instant::now();
        let (out, text) = run(i);
        let secs = start.elapsed().as_secs_f64();
        println!("{} {:>2} {}: {} [{secs:.1}s]", if out.pass { "PASS" } else { "FAIL" }, i + 1, SUITES[i].0, out.summary);
        if !out.pass {
            failed += 1;
            let v: serde_json::Value = serde_json::from_str(&text).unwrap();
            println!("        first failures: {}", v["results"]["first_failures"]);
        }
        if let Some(d) = &dir {
            std::fs::create_dir_all(d).unwrap();
            std::fs::write(d.join(format!("criterion-{:02}.json", i + 1)), &text).unwrap();
        }
        reports.push(text);
    }
    let start = Instant::now();
    let differing: Vec<usize> = (0..SUITES.len()).filter(|&i| run(i).1 != reports[i]).map(|i| i + 1).collect();
    let secs = start.elapsed().as_secs_f64();
    let pass = differing.is_empty();
    println!(
        "{} 15 determinism: {} reports rerun, {} [{secs:.1}s]",
        if pass { "PASS" } else { "FAIL" },
        SUITES.len(),
        if pass { "all byte-identical".to_string() } else { format!("differing: {differing:?}") }
    );
    if !pass {
        failed += 1;
    }
    println!("{} of 15 criteria passed", 15 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
