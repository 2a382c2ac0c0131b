//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use num_traits::Zero;
use probsat::exactlp::{check_size_bound, feasible, reduce_support, scaled_coefficient_size};
use probsat::modald::{d_sat, kripke_to_ppl, ppl_to_kripke, translate};
use probsat::oracle::families::{axiom_negations, modal_family, pl_family, serial_kripke_models};
use probsat::oracle::{
    d_sat_bruteforce, fm_feasible, pl_solve_naive, random_feasible_system, random_formula, random_system, Generated,
    Profile, MAX_WORLDS,
};
use probsat::parser::parse_formula;
use probsat::plsolver::{solve_pl, PlVerdict};
use probsat::pplsolver::tableau_solve;
use probsat::rat::Rat;
use probsat::semantics::{holds_pl, holds_ppl, validate_pl, validate_ppl, Model};
use probsat::syntax::{size, Formula, ModalFormula};
use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

/// A satisfiable input for the solve-then-check pipeline.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct SatCase {
    logic: &'static str,
    text: String,
}

#[derive(Default)]
struct Run {
    sat_cases: BTreeSet<SatCase>,
    failed: Vec<usize>,
}

impl Run {
    fn report(&mut self, n: usize, pass: bool, started: Instant, detail: String) {
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {n}: {verdict} ({:.1}s) {detail}",
            started.elapsed().as_secs_f64()
        );
        if !pass {
            self.failed.push(n);
        }
    }

    fn sat(&mut self, logic: &'static str, text: String) {
        self.sat_cases.insert(SatCase { logic, text });
    }
}

fn prob(profile: &Profile, seed: u64) -> Formula {
    match random_formula(profile, seed) {
        Generated::Prob(f) => f,
        Generated::Modal(_) => unreachable!("probabilistic profile"),
    }
}

fn modal(seed: u64) -> ModalFormula {
    match random_formula(&Profile::MODAL, seed) {
        Generated::Modal(m) => m,
        Generated::Prob(_) => unreachable!("modal profile"),
    }
}

fn axioms(run: &mut Run) {
    let t = Instant::now();
    let instances = axiom_negations(6);
    let mut bad = Vec::new();
    for inst in &instances {
        let pl_ok = inst.nested || !solve_pl(&inst.formula).unwrap().is_sat();
        if !pl_ok || tableau_solve(&inst.formula).is_sat() {
            bad.push(format!("{} {}", inst.schema, inst.formula));
        }
    }
    let nested = instances.iter().filter(|i| i.nested).count();
    let pass = bad.is_empty() && t.elapsed() < Duration::from_secs(60);
    run.report(
        1,
        pass,
        t,
        format!(
            "{} axiom negations ({} flat, {nested} nested) unsat, {} failures{}",
            instances.len(),
            instances.len() - nested,
            bad.len(),
            bad.first().map(|b| format!(", first: {b}")).unwrap_or_default()
        ),
    );
}

/// The first 1000 satisfiable formulas of the PL profile from seed 20000.
fn sat_pl_corpus() -> Vec<(Formula, PlVerdict)> {
    (20_000u64..)
        .map(|s| prob(&Profile::PL, s))
        .filter_map(|f| {
            let v = solve_pl(&f).unwrap();
            v.is_sat().then_some((f, v))
        })
        .take(1000)
        .collect()
}

fn small_models(run: &mut Run, corpus: &[(Formula, PlVerdict)]) {
    let t = Instant::now();
    let mut bad = 0;
    for (f, v) in corpus {
        let w = v.witness().unwrap();
        let r = w.system.constraints().len() as u64;
        let l = scaled_coefficient_size(&w.system);
        if w.model.worlds.len() > size(f) || !check_size_bound(&w.solution, r, l) {
            bad += 1;
        }
        run.sat("pl", f.to_string());
    }
    run.report(
        2,
        bad == 0 && corpus.len() == 1000,
        t,
        format!("{} sat PL witnesses, {bad} over the world or size bound", corpus.len()),
    );
}

fn witness_soundness(run: &mut Run, corpus: &[(Formula, PlVerdict)]) {
    let t = Instant::now();
    let mut bad = 0;
    for (f, v) in corpus {
        let m = &v.witness().unwrap().model;
        if !validate_pl(m).is_empty() || holds_pl(m, f) != Ok(true) {
            bad += 1;
        }
    }
    let mut ppl_sat = 0;
    for seed in 30_000u64..31_000 {
        let f = prob(&Profile::PPL, seed);
        if let Some(w) = tableau_solve(&f).witness() {
            ppl_sat += 1;
            let small = (w.model.worlds.len() as u128) <= 1u128 << size(&f).min(127);
            if !validate_ppl(&w.model).is_empty() || holds_ppl(&w.model, &w.root, &f) != Ok(true) || !small {
                bad += 1;
            }
            run.sat("ppl", f.to_string());
        }
    }
    run.report(
        3,
        bad == 0,
        t,
        format!("{} PL and {ppl_sat} PPL witnesses checked, {bad} unsound", corpus.len()),
    );
}

fn oracle_equivalence(run: &mut Run) {
    let t = Instant::now();
    let family = pl_family();
    let mut disagree = Vec::new();
    let mut compare = |f: &Formula, run: &mut Run| -> bool {
        let Ok(naive) = pl_solve_naive(f) else {
            return false;
        };
        let sat = solve_pl(f).unwrap().is_sat();
        if sat != naive {
            disagree.push(f.to_string());
        }
        if sat {
            run.sat("pl", f.to_string());
        }
        true
    };
    for f in &family {
        assert!(compare(f, run), "exhaustive family is within the oracle guards");
    }
    let mut random = 0;
    let mut skipped = 0;
    for seed in 40_000u64.. {
        if random == 1000 {
            break;
        }
        if compare(&prob(&Profile::PL, seed), run) {
            random += 1;
        } else {
            skipped += 1;
        }
    }
    let pass = disagree.is_empty() && t.elapsed() < Duration::from_secs(300);
    run.report(
        4,
        pass,
        t,
        format!(
            "{} exhaustive + {random} random formulas ({skipped} beyond guards skipped), {} disagreements",
            family.len(),
            disagree.len()
        ),
    );
}

fn pl_ppl_consistency(run: &mut Run) {
    let t = Instant::now();
    let mut disagree = 0;
    for seed in 50_000u64..51_000 {
        let f = prob(&Profile::PL, seed);
        let pl = solve_pl(&f).unwrap().is_sat();
        if pl != tableau_solve(&f).is_sat() {
            disagree += 1;
        }
        if pl {
            run.sat("ppl", f.to_string());
        }
    }
    run.report(5, disagree == 0, t, format!("1000 PL formulas, {disagree} disagreements"));
}

fn modal_reduction(run: &mut Run) {
    let t = Instant::now();
    let family = modal_family();
    let random: Vec<ModalFormula> = (60_000u64..60_500).map(modal).collect();
    let mut disagree = Vec::new();
    for a in family.iter().chain(&random) {
        let sat = d_sat(a).is_sat();
        if sat != d_sat_bruteforce(a, MAX_WORLDS).unwrap() {
            disagree.push(a.to_string());
        }
        if sat {
            run.sat("d", a.to_string());
        }
    }
    let translated: Vec<Formula> = family.iter().map(translate).collect();
    let models = serial_kripke_models(3, &["p", "q"]);
    let mut broken = 0;
    for m in &models {
        let p = kripke_to_ppl(m).unwrap();
        let back = ppl_to_kripke(&p);
        let same = back.successors == m.successors && back.is_serial();
        if !same || family.iter().zip(&translated).any(|(a, f)| m.truth_set(a) != p.truth_set(f)) {
            broken += 1;
        }
    }
    let pass = disagree.is_empty() && broken == 0 && t.elapsed() < Duration::from_secs(300);
    run.report(
        6,
        pass,
        t,
        format!(
            "{} family + {} random modal formulas, {} disagreements; {} serial models x {} formulas, {broken} conversions broken",
            family.len(),
            random.len(),
            disagree.len(),
            models.len(),
            family.len()
        ),
    );
}

fn lp_layer(run: &mut Run) {
    let t = Instant::now();
    let mut bad_support = 0;
    for seed in 70_000u64..71_000 {
        let s = random_feasible_system(seed, 6, 6);
        let Some(sol) = feasible(&s, true).unwrap().solution() else {
            bad_support += 1;
            continue;
        };
        let r = s.constraints().len();
        let reduced = reduce_support(&s, &sol).unwrap();
        let ok = s.is_satisfied_by(reduced.values())
            && reduced.positive_count() <= r
            && check_size_bound(&reduced, r as u64, scaled_coefficient_size(&s));
        bad_support += usize::from(!ok);
    }
    let mut disagree = 0;
    let mut feasible_count = 0;
    for seed in 80_000u64..81_000 {
        let s = random_system(seed, 6, 6);
        let free = feasible(&s, false).unwrap().is_feasible();
        let nonneg = feasible(&s, true).unwrap().is_feasible();
        feasible_count += usize::from(free);
        if free != fm_feasible(&s).unwrap() || nonneg != fm_feasible(&s.with_nonneg_rows()).unwrap() {
            disagree += 1;
        }
    }
    run.report(
        7,
        bad_support == 0 && disagree == 0,
        t,
        format!(
            "1000 feasible systems, {bad_support} over the support or size bound; 1000 mixed systems ({feasible_count} feasible), {disagree} disagreements with elimination"
        ),
    );
}

fn probsat(args: &[&str], input: &str, dir: &Path, tag: &str) -> i32 {
    let file = dir.join(format!("{tag}.txt"));
    std::fs::write(&file, input).unwrap();
    let mut all: Vec<&str> = args.to_vec();
    all.push(file.to_str().unwrap());
    Command::new(env!("CARGO_BIN_EXE_probsat"))
        .args(&all)
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .status()
        .expect("binary runs")
        .code()
        .unwrap_or(-1)
}

fn motivating(run: &mut Run, dir: &Path) {
    let t = Instant::now();
    let text = "P>=0.8 P>=0.6 p";
    let model = dir.join("motivating.json");
    let m = model.to_str().unwrap();
    let solved = probsat(&["solve", "--logic", "ppl", "--model", m], text, dir, "motivating");
    let checked = probsat(&["check", "--model", m, "--world", "0"], text, dir, "motivating");
    let mut inner_mass = Rat::zero();
    if let Ok(Model::Ppl(ppl)) = Model::from_json(&std::fs::read_to_string(&model).unwrap_or_default()) {
        let inner = parse_formula("P>=0.6 p").unwrap();
        let truth = ppl.truth_set(&inner);
        let root = ppl.index_of("0").unwrap();
        for (u, mu) in ppl.worlds[root].measure.iter().enumerate() {
            if truth[u] {
                inner_mass += mu;
            }
        }
    }
    let pass = solved == 0 && checked == 0 && inner_mass >= Rat::new(4.into(), 5.into());
    run.report(
        8,
        pass,
        t,
        format!("solve exit {solved}, check exit {checked}, mass on inner P>=3/5 p worlds {inner_mass}"),
    );
}

fn pipeline(run: &mut Run, dir: &Path) {
    let t = Instant::now();
    let model = dir.join("pipeline.json");
    let m = model.to_str().unwrap();
    let mut bad = Vec::new();
    for case in &run.sat_cases {
        let solved = probsat(&["solve", "--logic", case.logic, "--model", m], &case.text, dir, "pipeline");
        let checked = if solved == 0 {
            probsat(&["check", "--model", m], &case.text, dir, "pipeline")
        } else {
            -1
        };
        if checked != 0 {
            bad.push(format!("{} {} (solve {solved}, check {checked})", case.logic, case.text));
        }
    }
    let total = run.sat_cases.len();
    let detail = format!(
        "{total} distinct sat inputs from criteria 1-6 solved and re-checked, {} failures{}",
        bad.len(),
        bad.first().map(|b| format!(", first: {b}")).unwrap_or_default()
    );
    run.report(9, bad.is_empty() && total > 0, t, detail);
}

fn main() {
    let dir = tempfile::tempdir().unwrap();
    let mut run = Run::default();
    axioms(&mut run);
    let corpus = sat_pl_corpus();
    small_models(&mut run, &corpus);
    witness_soundness(&mut run, &corpus);
    oracle_equivalence(&mut run);
    pl_ppl_consistency(&mut run);
    modal_reduction(&mut run);
    lp_layer(&mut run);
    motivating(&mut run, dir.path());
    pipeline(&mut run, dir.path());
    if run.failed.is_empty() {
        println!("acceptance: all 9 criteria passed");
    } else {
        println!("acceptance: failed criteria {:?}", run.failed);
        std::process::exit(1);
    }
}
