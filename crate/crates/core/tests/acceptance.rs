//! Acceptance suite. Each criterion checks the library against arithmetic
//! written out here from the group presentations, then runs the matching
//! built-in verification suite, and prints one PASS/FAIL line.

use std::collections::{HashMap, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rsk::groups::{build_prop3_group, Element, GeneratorWord, GroupSpec, Letter, XsyChoice};
use rsk::oracle::{reachable_set, SearchConfig};
use rsk::rational::Automaton;
use rsk::reduction::{
    find_trivial_stabilizer_vector, mon_to_rat, signed_permutation_group, tighter_aut,
    witness_to_path, MonToRatOptions, ReductionBundle,
};
use rsk::verify::{
    negative_control_fixture, random_automaton, run_suite, LabelRange, Suite, SuiteReport,
    VerifyOptions,
};

type Outcome = Result<String, String>;

/// Name, time limit in seconds, check.
type Criterion = (&'static str, u64, fn() -> Outcome);

const SEED: u64 = 77_001;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn library_suite(suite: Suite, expected_checks: Option<u64>) -> Result<SuiteReport, String> {
    let r = run_suite(suite, &VerifyOptions::default()).map_err(|e| format!("{suite}: {e}"))?;
    ensure(r.passed(), || {
        format!(
            "{suite}: {} failures, first {:?}",
            r.failures,
            r.counterexamples.first()
        )
    })?;
    if let Some(n) = expected_checks {
        ensure(r.checked == n, || {
            format!("{suite}: checked {} words, expected {n}", r.checked)
        })?;
    }
    Ok(r)
}

/// Visits every nonempty word of length at most `max_len` over `k` letters,
/// passing the value of each prefix.
fn for_each_word<T: Clone>(
    k: usize,
    max_len: usize,
    id: T,
    step: &impl Fn(&T, usize) -> T,
    visit: &mut impl FnMut(&[usize], &T),
) {
    fn go<T: Clone>(
        k: usize,
        max_len: usize,
        word: &mut Vec<usize>,
        value: &T,
        step: &impl Fn(&T, usize) -> T,
        visit: &mut impl FnMut(&[usize], &T),
    ) {
        if word.len() == max_len {
            return;
        }
        for letter in 0..k {
            let next = step(value, letter);
            word.push(letter);
            visit(word, &next);
            go(k, max_len, word, &next, step, visit);
            word.pop();
        }
    }
    go(k, max_len, &mut Vec::new(), &id, step, visit);
}

/// `x^l s y^l` over the letters `x = 0, s = 1, y = 2`.
fn is_xsy(w: &[usize]) -> bool {
    if w.len().is_multiple_of(2) {
        return false;
    }
    let l = w.len() / 2;
    w[..l].iter().all(|&c| c == 0) && w[l] == 1 && w[l + 1..].iter().all(|&c| c == 2)
}

fn xsy_sweep(
    max_len: usize,
    id: (Vec<i64>, i64),
    step: impl Fn(&(Vec<i64>, i64), usize) -> (Vec<i64>, i64),
    s: (Vec<i64>, i64),
) -> Result<u64, String> {
    let mut words = 0u64;
    let mut bad = None;
    for_each_word(3, max_len, id, &step, &mut |w, v| {
        words += 1;
        if (*v == s) != is_xsy(w) && bad.is_none() {
            bad = Some(w.to_vec());
        }
    });
    match bad {
        Some(w) => Err(format!("word {w:?} breaks the characterization")),
        None => Ok(words),
    }
}

// Rotation group: [x,y] = 1, x^s = y^{-1}, y^s = x. Conjugation by s sends
// x to y and y to x^{-1}, a quarter turn on Z^2.
fn rotation_step(e: &(Vec<i64>, i64), letter: usize) -> (Vec<i64>, i64) {
    let (u, t) = e;
    let (mut a, mut b) = match letter {
        0 => (1, 0),
        2 => (0, 1),
        _ => return (u.clone(), t + 1),
    };
    for _ in 0..t.rem_euclid(4) {
        (a, b) = (-b, a);
    }
    (vec![u[0] + a, u[1] + b], *t)
}

fn criterion_rotation() -> Outcome {
    let words = xsy_sweep(9, (vec![0, 0], 0), rotation_step, (vec![0, 0], 1))?;
    ensure(words == 29_523, || format!("{words} words"))?;

    // x y s x = s x x y^{-1}
    let h = build_prop3_group();
    let gens = [h.x.clone(), h.s.clone(), h.y.clone()];
    let lhs = GeneratorWord::positive([0, 2, 1, 0]);
    let rhs = GeneratorWord::from_letters(vec![
        Letter::pos(1),
        Letter::pos(0),
        Letter::pos(0),
        Letter::inv(2),
    ]);
    ensure(
        h.spec.evaluate_word(&gens, &lhs).unwrap() == h.spec.evaluate_word(&gens, &rhs).unwrap(),
        || "x y s x differs from s x x y^-1".into(),
    )?;

    library_suite(Suite::Prop3, Some(29_523))?;
    Ok(format!("{words} words"))
}

// Z^n ⋊ Z with x_i^s = x_{i+1}: conjugation by s^t sends e_i to e_{i-t}.
fn shift_step(n: usize) -> impl Fn(&(Vec<i64>, i64), usize) -> (Vec<i64>, i64) {
    move |(u, t), letter| {
        let i = match letter {
            1 => return (u.clone(), t + 1),
            0 => 0,
            _ => 1,
        };
        let sign = if letter == 0 { -1 } else { 1 };
        let mut u = u.clone();
        u[(i as i64 - t).rem_euclid(n as i64) as usize] += sign;
        (u, *t)
    }
}

fn criterion_shift() -> Outcome {
    let mut total = 0;
    for n in [3usize, 4] {
        let started = Instant::now();
        let words = xsy_sweep(7, (vec![0; n], 0), shift_step(n), (vec![0; n], 1))
            .map_err(|e| format!("n = {n}: {e}"))?;
        ensure(words == 3_279, || format!("n = {n}: {words} words"))?;
        ensure(started.elapsed() < Duration::from_secs(1), || {
            format!("n = {n} took {:?}", started.elapsed())
        })?;
        total += words;
    }
    library_suite(Suite::Prop3Shift, Some(2 * 3_279))?;
    Ok(format!("{total} words over n = 3, 4"))
}

// Z wr Z_3, from the rewriting rule s^j e_i = e_{i-j} s^j.
fn wreath_mul(a: &([i64; 3], usize), b: &([i64; 3], usize)) -> ([i64; 3], usize) {
    let mut c = a.0;
    for (j, cj) in c.iter_mut().enumerate() {
        *cj += b.0[(j + a.1) % 3];
    }
    (c, (a.1 + b.1) % 3)
}

fn criterion_wreath_paths() -> Outcome {
    // letter 3i + j is t_ij = e_i s^{j-i}
    let letters: Vec<([i64; 3], usize)> = (0..9)
        .map(|k| {
            let (i, j) = (k / 3, k % 3);
            let mut e = [0; 3];
            e[i] = 1;
            (e, (j + 3 - i) % 3)
        })
        .collect();
    let is_path = |w: &[usize]| {
        w[0] / 3 == 0 && w.windows(2).all(|p| p[0] % 3 == p[1] / 3) && w[w.len() - 1] % 3 == 1
    };
    let mut words = 0u64;
    let mut bad = None;
    let step = |e: &([i64; 3], usize), k: usize| wreath_mul(e, &letters[k]);
    for_each_word(9, 5, ([0; 3], 0), &step, &mut |w, v| {
        words += 1;
        let target = ([w.len() as i64, 0, 0], 1);
        if (*v == target) != is_path(w) && bad.is_none() {
            bad = Some(w.to_vec());
        }
    });
    if let Some(w) = bad {
        return Err(format!("word {w:?} breaks the characterization"));
    }
    ensure(words == 66_429, || format!("{words} words"))?;
    library_suite(Suite::Prop5, Some(66_429))?;
    Ok(format!("{words} words"))
}

type Mat = Vec<Vec<i64>>;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn mat_vec(a: &Mat, v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|r| r.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn transpose(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn signed_perms(n: usize) -> Vec<Mat> {
    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }
    let mut out = Vec::new();
    for p in perms(n) {
        for signs in 0..(1 << n) {
            let mut m = vec![vec![0; n]; n];
            for (c, &r) in p.iter().enumerate() {
                m[r][c] = if signs >> c & 1 == 1 { -1 } else { 1 };
            }
            out.push(m);
        }
    }
    out
}

fn criterion_lattice_chains() -> Outcome {
    let a = signed_perms(2);
    ensure(a.len() == 8, || "signed permutations of size 2".into())?;
    let v = [1i64, 2];
    let id = identity(2);
    let idx = |m: &Mat| a.iter().position(|x| x == m).expect("closed");
    // letter 8a + b is t_ab = (a^{-1} v, a^{-1} b)
    let letters: Vec<(Vec<i64>, Mat)> = (0..64)
        .map(|k| {
            let inv = transpose(&a[k / 8]);
            (mat_vec(&inv, &v), mat_mul(&inv, &a[k % 8]))
        })
        .collect();
    let step = |(u, m): &(Vec<i64>, Mat), k: usize| {
        let w = mat_vec(m, &letters[k].0);
        (vec![u[0] + w[0], u[1] + w[1]], mat_mul(m, &letters[k].1))
    };
    let start = idx(&id);
    let mut words = 0u64;
    let mut bad = None;
    for_each_word(64, 3, (vec![0, 0], id.clone()), &step, &mut |w, (u, m)| {
        words += 1;
        let chain = w[0] / 8 == start && w.windows(2).all(|p| p[0] % 8 == p[1] / 8);
        let l = w.len() as i64;
        let ok =
            (*u == vec![l * v[0], l * v[1]]) == chain && (!chain || idx(m) == w[w.len() - 1] % 8);
        if !ok && bad.is_none() {
            bad = Some(w.to_vec());
        }
    });
    if let Some(w) = bad {
        return Err(format!("word {w:?} breaks the characterization"));
    }
    ensure(words == 266_304, || format!("{words} words"))?;
    library_suite(Suite::Prop8, Some(266_304))?;
    Ok(format!("{words} words"))
}

fn closure(gens: &[Mat]) -> Vec<Mat> {
    let mut out = vec![identity(gens[0].len())];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let p = mat_mul(&out[i], g);
            if !out.contains(&p) {
                out.push(p);
            }
        }
        i += 1;
    }
    out
}

fn det(m: &Mat) -> i64 {
    match m.len() {
        0 => 1,
        1 => m[0][0],
        n => (0..n)
            .map(|c| {
                let minor: Mat = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != c)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * det(&minor)
            })
            .sum(),
    }
}

fn form(g: &Mat, u: &[i64], w: &[i64]) -> i64 {
    u.iter().zip(mat_vec(g, w)).map(|(a, b)| a * b).sum()
}

fn check_form(name: &str, group: &[Mat], g: &Mat, v: &[i64]) -> Result<(), String> {
    let n = g.len();
    ensure(*g == transpose(g), || format!("{name}: form not symmetric"))?;
    for k in 1..=n {
        let lead: Mat = g[..k].iter().map(|r| r[..k].to_vec()).collect();
        ensure(det(&lead) > 0, || {
            format!("{name}: leading minor {k} not positive")
        })?;
    }
    let id = identity(n);
    for a in group {
        ensure(mat_mul(&mat_mul(&transpose(a), g), a) == *g, || {
            format!("{name}: {a:?} moves the form")
        })?;
        if *a != id {
            ensure(form(g, v, &mat_vec(a, v)) < form(g, v, v), || {
                format!("{name}: Cauchy-Schwarz not strict for {a:?} and v = {v:?}")
            })?;
        }
    }
    Ok(())
}

fn criterion_invariant_forms() -> Outcome {
    let groups: Vec<(&str, Vec<Mat>)> = vec![
        ("signed perms 2", signed_perms(2)),
        ("signed perms 3", signed_perms(3)),
        ("order 3", closure(&[vec![vec![0, -1], vec![1, -1]]])),
        ("rotation", closure(&[vec![vec![0, -1], vec![1, 0]]])),
    ];
    let expected_orders = [8, 48, 3, 4];
    let report = library_suite(Suite::Gram, None)?;
    let reported = report.details["groups"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    ensure(reported.len() == groups.len(), || {
        "group list differs".into()
    })?;
    for ((name, group), (order, lib)) in groups.iter().zip(expected_orders.iter().zip(&reported)) {
        ensure(group.len() == *order, || {
            format!("{name}: order {}", group.len())
        })?;
        ensure(lib["order"] == *order, || {
            format!("{name}: library order {}", lib["order"])
        })?;
        // averaged form
        let n = group[0].len();
        let mut g = vec![vec![0; n]; n];
        for a in group {
            let p = mat_mul(&transpose(a), a);
            for i in 0..n {
                for j in 0..n {
                    g[i][j] += p[i][j];
                }
            }
        }
        let v: Vec<i64> = (1..=n as i64).collect();
        check_form(name, group, &g, &v)?;
        let lib_g: Mat = serde_json::from_value(lib["gram"].clone()).map_err(|e| e.to_string())?;
        let lib_v: Vec<i64> =
            serde_json::from_value(lib["v"].clone()).map_err(|e| e.to_string())?;
        check_form(&format!("{name} (library)"), group, &lib_g, &lib_v)?;
    }
    Ok(format!("{} groups", groups.len()))
}

fn z2(e: &Element) -> [i64; 2] {
    match e {
        Element::FreeAbelian(v) if v.len() == 2 => [v[0], v[1]],
        other => panic!("not in Z^2: {other:?}"),
    }
}

/// Minimal accepting path length of every label with a path of length at
/// most `max_len`, by breadth-first search over (state, label) pairs.
fn label_lengths(aut: &Automaton, max_len: usize) -> HashMap<[i64; 2], usize> {
    let mut seen = HashSet::new();
    let mut layer = vec![(aut.initial(), [0i64, 0])];
    seen.insert(layer[0]);
    let mut out = HashMap::new();
    for len in 0..=max_len {
        for &(q, g) in &layer {
            if aut.accepting().contains(&q) {
                out.entry(g).or_insert(len);
            }
        }
        let mut next = Vec::new();
        for &(q, g) in &layer {
            for t in aut.transitions().iter().filter(|t| t.from == q) {
                let l = z2(&t.label);
                let s = (t.to, [g[0] + l[0], g[1] + l[1]]);
                if seen.insert(s) {
                    next.push(s);
                }
            }
        }
        layer = next;
    }
    out
}

/// Builds 50 bundles from seeded random automata and checks sections at
/// witness length 9 against labels computed here.
fn end_to_end(
    max_states: usize,
    max_transitions: usize,
    build: impl Fn(&Automaton) -> ReductionBundle,
) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let range = LabelRange {
        rank: 2,
        lo: -2,
        hi: 2,
    };
    let cfg = SearchConfig::new(9);
    let mut hits_total = 0;
    for k in 0..50 {
        let aut = random_automaton(&mut rng, max_states, max_transitions, range);
        let bundle = build(&aut);
        // a path of length d gains the final identity edge of the normalized
        // automaton and is encoded by a witness of length 2(d + 1) + 1
        let expected: HashMap<[i64; 2], usize> = label_lengths(&aut, 3)
            .into_iter()
            .map(|(g, d)| (g, 2 * d + 3))
            .collect();
        let hits = bundle
            .section_bounded(&cfg)
            .map_err(|e| format!("automaton {k}: {e}"))?;
        let found: HashMap<[i64; 2], usize> =
            hits.iter().map(|h| (z2(&h.element), h.length)).collect();
        ensure(found == expected, || {
            format!("automaton {k}: section {found:?}, labels give {expected:?}")
        })?;
        let norm = bundle.source.as_ref().expect("automaton bundle");
        for hit in &hits {
            let path = witness_to_path(&bundle, &hit.witness)
                .map_err(|e| format!("automaton {k}: {:?} does not decode: {e}", hit.element))?;
            let mut state = 0;
            let mut label = [0i64, 0];
            for &i in &path.0 {
                let t = &norm.transitions()[i];
                ensure(t.from == state, || {
                    format!("automaton {k}: path {:?} breaks at {i}", path.0)
                })?;
                let l = z2(&t.label);
                label = [label[0] + l[0], label[1] + l[1]];
                state = t.to;
            }
            ensure(
                state == 1 && label == z2(&hit.element) && hit.length == 2 * path.len() + 1,
                || format!("automaton {k}: path {:?} for {:?}", path.0, hit.element),
            )?;
        }
        hits_total += hits.len();
    }
    Ok(hits_total)
}

fn criterion_mon_to_rat() -> Outcome {
    let hits = end_to_end(3, 4, |aut| {
        mon_to_rat(aut, MonToRatOptions::default()).unwrap()
    })?;
    let report = library_suite(Suite::Thm7E2e, None)?;
    Ok(format!(
        "{hits} section elements here, {} library checks",
        report.checked
    ))
}

fn criterion_tighter() -> Outcome {
    let a = signed_permutation_group(2).unwrap();
    let v = find_trivial_stabilizer_vector(&a);
    let hits = end_to_end(7, 7, |aut| {
        tighter_aut(aut, &a, &v, XsyChoice::Rotation).unwrap()
    })?;
    let report = library_suite(Suite::Thm9E2e, None)?;
    Ok(format!(
        "{hits} section elements here, {} library checks",
        report.checked
    ))
}

fn criterion_oracle() -> Outcome {
    let spec = GroupSpec::FreeAbelian { rank: 2 };
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    for set in 0..20 {
        let k = rng.gen_range(1..=4);
        let gens: Vec<[i64; 2]> = (0..k)
            .map(|_| [rng.gen_range(-2..=2), rng.gen_range(-2..=2)])
            .collect();
        let elements: Vec<Element> = gens
            .iter()
            .map(|g| Element::FreeAbelian(g.to_vec()))
            .collect();
        // every sequence of at most 6 generators
        let mut naive: HashMap<[i64; 2], usize> = HashMap::from([([0, 0], 0)]);
        let mut layer = vec![[0i64, 0]];
        for len in 1..=6 {
            layer = layer
                .iter()
                .flat_map(|p| gens.iter().map(move |g| [p[0] + g[0], p[1] + g[1]]))
                .collect();
            for p in &layer {
                naive.entry(*p).or_insert(len);
            }
        }
        for len in 0..=6 {
            let set_l = reachable_set(&spec, &elements, &SearchConfig::new(len))
                .map_err(|e| e.to_string())?;
            let expected: HashMap<[i64; 2], usize> = naive
                .iter()
                .filter(|(_, &l)| l <= len)
                .map(|(&p, &l)| (p, l))
                .collect();
            let got: HashMap<[i64; 2], usize> = set_l
                .iter()
                .map(|r| (z2(r.element()), r.length()))
                .collect();
            ensure(got == expected, || {
                format!("set {set}, L = {len}: {got:?} vs {expected:?}")
            })?;
            for r in set_l.iter() {
                let w = r.witness().indices().map_err(|e| e.to_string())?;
                let value = w
                    .iter()
                    .fold([0, 0], |acc, &i| [acc[0] + gens[i][0], acc[1] + gens[i][1]]);
                ensure(value == z2(r.element()) && w.len() == r.length(), || {
                    format!("set {set}: witness {w:?} for {:?}", r.element())
                })?;
                checked += 1;
            }
        }
    }
    library_suite(Suite::Oracle, None)?;
    Ok(format!("{checked} witnesses"))
}

fn criterion_negative_control() -> Outcome {
    let aut = negative_control_fixture().map_err(|e| e.to_string())?;
    let a = signed_permutation_group(2).unwrap();
    let v = find_trivial_stabilizer_vector(&a);
    let bundle = tighter_aut(&aut, &a, &v, XsyChoice::Rotation).map_err(|e| e.to_string())?;
    let cfg = SearchConfig::new(9);
    for hit in bundle.section_bounded(&cfg).map_err(|e| e.to_string())? {
        witness_to_path(&bundle, &hit.witness)
            .map_err(|e| format!("unmodified bundle: {:?} does not decode: {e}", hit.element))?;
    }
    let factors = bundle.ambient.factors().expect("product").to_vec();
    let extra = Element::Product(vec![
        factors[0].identity(),
        factors[1].identity(),
        build_prop3_group().y,
    ]);
    let broken = bundle
        .with_extra_generator(extra)
        .map_err(|e| e.to_string())?;
    let hits = broken.section_bounded(&cfg).map_err(|e| e.to_string())?;
    let failing = hits
        .iter()
        .filter(|h| witness_to_path(&broken, &h.witness).is_err())
        .count();
    ensure(failing > 0, || {
        format!("all {} section elements decode", hits.len())
    })?;
    library_suite(Suite::NegativeControl, None)?;
    Ok(format!(
        "{failing} of {} section elements fail to decode",
        hits.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("rotation group sweep", 1, criterion_rotation),
        ("cyclic shift sweep", 2, criterion_shift),
        ("wreath path words", 2, criterion_wreath_paths),
        ("lattice chain words", 10, criterion_lattice_chains),
        ("invariant forms", 1, criterion_invariant_forms),
        ("monoid to rational end to end", 120, criterion_mon_to_rat),
        ("tighter construction end to end", 120, criterion_tighter),
        ("oracle completeness", 30, criterion_oracle),
        ("negative control", 30, criterion_negative_control),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = run();
        let elapsed = started.elapsed();
        let outcome = outcome.and_then(|note| {
            if elapsed <= Duration::from_secs(*limit) {
                Ok(note)
            } else {
                Err(format!("took {elapsed:.2?}, limit {limit} s"))
            }
        });
        match outcome {
            Ok(note) => println!(
                "criterion {}: {name}: PASS ({note}; {elapsed:.2?}, limit {limit} s)",
                i + 1
            ),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({why}; {elapsed:.2?})", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
