//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use badcycle_core::balanced::{
    balanced_coloring, check_two_balanced_equivalence, default_counter_cap, is_alpha_balanced,
    potential_violations,
};
use badcycle_core::corpus::{
    all_cycling_2machines, random_3cnf, random_cycling_machine, random_digraph, random_hypergraph,
    random_machine, rng,
};
use badcycle_core::generators::{
    counter_machine_order, gen_counter_machine, gen_cycling_construction, gen_example3_machine,
    gen_explicit_hasse_digraph, gen_shift_digraph, gen_unbalanced_machine, unbalanced_order_system,
};
use badcycle_core::goodness::default_oracle_len;
use badcycle_core::order::{
    decide_cycling_2machine, find_compatible_order, find_order_system, verify_compatible_order,
    verify_order_system, SearchMode,
};
use badcycle_core::reductions::{
    canonical_unsat_instance, sat_to_machine, truth_table_solve, CnfInstance, Literal,
};
use badcycle_core::relations::{
    alternating_machine, alternating_relation, alternating_s_set, detect_odd_alternating_cycle,
    is_pq_compatible, Relation,
};
use badcycle_core::{
    brute_force_is_good, chromatic_number_exact, is_good, path_digraph, Budget, Hypergraph,
    Machine, OrderSystem, Verdict,
};
use num_rational::Rational64;

const SEED: u64 = 20_240_601;
const HASSE_N4_LIMIT: Duration = Duration::from_secs(300);
const UNIQUE_SYSTEM_LIMIT: Duration = Duration::from_secs(10);
const RANDOM_2MACHINES: usize = 200;
const SAT_INSTANCES: usize = 60;
const BALANCE_DIGRAPHS: usize = 200;
const GOODNESS_PAIRS: usize = 300;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn exact_chi(h: &Hypergraph) -> Result<usize, String> {
    chromatic_number_exact(h, &mut Budget::unlimited())
        .map(|r| r.chromatic_number)
        .map_err(|e| e.to_string())
}

fn c1_explicit_hasse() -> Outcome {
    let mut seen = Vec::new();
    for n in 2..=3 {
        let chi = exact_chi(&gen_explicit_hasse_digraph(n))?;
        check(chi == n, format!("n = {n}: chi = {chi}"))?;
        seen.push(format!("n={n}:{chi}"));
    }
    let start = Instant::now();
    let mut budget = Budget::new(2_000_000_000);
    match chromatic_number_exact(&gen_explicit_hasse_digraph(4), &mut budget) {
        Ok(r) if start.elapsed() <= HASSE_N4_LIMIT => {
            check(
                r.chromatic_number == 4,
                format!("n = 4: chi = {}", r.chromatic_number),
            )?;
            seen.push(format!(
                "n=4:{} ({:.1?})",
                r.chromatic_number,
                start.elapsed()
            ));
        }
        _ => seen.push("n=4 skipped (over budget)".into()),
    }
    Ok(seen.join(", "))
}

fn c2_unique_system() -> Outcome {
    let start = Instant::now();
    let all = find_order_system(
        &gen_example3_machine(),
        SearchMode::All,
        &mut Budget::default(),
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected =
        OrderSystem::new(4, vec![vec![0], vec![1, 2], vec![3]], &[(0, 2)], &[0, 1, 2]).unwrap();
    check(
        all == vec![expected],
        format!("found {} systems", all.len()),
    )?;
    check(elapsed < UNIQUE_SYSTEM_LIMIT, format!("took {elapsed:?}"))?;
    Ok(format!("1 system in {elapsed:.1?}"))
}

fn c3_counter_machines() -> Outcome {
    for n in 2..=5 {
        let m = gen_counter_machine(n);
        let order = counter_machine_order(n, 2);
        check(
            verify_compatible_order(&m, &order).unwrap().is_compatible(),
            format!("n = {n}: explicit order rejected"),
        )?;
        check(
            decide_cycling_2machine(&m).unwrap().has_order,
            format!("n = {n}: decide2 says no"),
        )?;
        let found = find_compatible_order(&m, &mut Budget::default()).unwrap();
        check(found.is_some(), format!("n = {n}: search found nothing"))?;
    }
    Ok("n = 2..5".into())
}

fn agree_2machine(m: &Machine) -> Result<bool, String> {
    let fast = decide_cycling_2machine(m)
        .map_err(|e| e.to_string())?
        .has_order;
    let slow = find_compatible_order(m, &mut Budget::unlimited())
        .map_err(|e| e.to_string())?
        .is_some();
    Ok(fast == slow)
}

fn c4_decide2_vs_search() -> Outcome {
    let mut count = 0;
    for n in 1..=2 {
        for m in all_cycling_2machines(n) {
            check(
                agree_2machine(&m)?,
                format!("disagreement on {}", m.to_json()),
            )?;
            count += 1;
        }
    }
    let mut r = rng(SEED);
    for _ in 0..RANDOM_2MACHINES {
        let m = random_cycling_machine(&mut r, 2, 3, 0.15);
        check(
            agree_2machine(&m)?,
            format!("disagreement on {}", m.to_json()),
        )?;
        count += 1;
    }
    Ok(format!("{count} machines agree"))
}

fn sat_agrees(phi: &CnfInstance) -> Result<bool, String> {
    let sat = truth_table_solve(phi).map_err(|e| e.to_string())?.is_some();
    let m = sat_to_machine(phi).map_err(|e| e.to_string())?;
    let order = find_compatible_order(&m, &mut Budget::unlimited())
        .map_err(|e| e.to_string())?
        .is_some();
    Ok(sat == order)
}

fn c5_sat_reduction() -> Outcome {
    let mut r = rng(SEED);
    let mut sat = 0;
    let mut instances = vec![canonical_unsat_instance()];
    for t in 0..SAT_INSTANCES {
        let vars = 3 + t % 4;
        let clauses = 1 + (t * 7) % 8;
        instances.push(random_3cnf(&mut r, vars, clauses));
    }
    // the unsatisfiable pattern relabelled inside larger variable sets
    for t in 0..6 {
        let vars = 3 + t % 4;
        let base = canonical_unsat_instance();
        let picked: Vec<usize> = (0..3).map(|v| (v * (t + 1) + t) % vars).collect();
        let picked = if picked[0] != picked[1] && picked[1] != picked[2] && picked[0] != picked[2] {
            picked
        } else {
            vec![vars - 3, vars - 2, vars - 1]
        };
        let clauses = base
            .clauses
            .iter()
            .map(|c| {
                c.map(|l| Literal {
                    var: picked[l.var],
                    positive: l.positive ^ (t >> l.var & 1 == 1),
                })
            })
            .collect();
        instances.push(
            CnfInstance::new((1..=vars).map(|v| format!("x{v}")).collect(), clauses).unwrap(),
        );
    }
    for phi in &instances {
        check(
            sat_agrees(phi)?,
            format!("disagreement on\n{}", phi.to_dimacs()),
        )?;
        sat += usize::from(truth_table_solve(phi).unwrap().is_some());
    }
    Ok(format!("{} instances ({sat} satisfiable)", instances.len()))
}

fn balance_corpus() -> Vec<Hypergraph> {
    let mut out = vec![
        path_digraph(5),
        Hypergraph::digraph_on(3, [(0, 1), (1, 2), (0, 2)]).unwrap(),
        Hypergraph::digraph_on(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap(),
        gen_shift_digraph(6),
        gen_explicit_hasse_digraph(2),
    ];
    let mut r = rng(SEED);
    for t in 0..BALANCE_DIGRAPHS {
        out.push(random_digraph(&mut r, 3 + t % 5, 0.25));
    }
    out
}

fn c6_balanced_coloring() -> Outcome {
    let corpus = balance_corpus();
    let mut checked = 0;
    for alpha in [
        Rational64::new(3, 2),
        Rational64::new(2, 1),
        Rational64::new(5, 2),
        Rational64::new(3, 1),
    ] {
        let ceil = alpha.ceil().to_integer() as usize;
        for g in &corpus {
            if !is_alpha_balanced(g, alpha).unwrap().balanced {
                continue;
            }
            let bc = balanced_coloring(g, alpha).map_err(|e| e.to_string())?;
            check(
                bc.coloring.is_proper(g),
                format!("improper coloring at alpha = {alpha}"),
            )?;
            check(
                bc.coloring.num_colors() <= ceil + 1,
                format!("too many colors at alpha = {alpha}"),
            )?;
            check(
                potential_violations(g, &bc).is_empty(),
                format!("potential bounds broken at alpha = {alpha}"),
            )?;
            checked += 1;
        }
    }
    check(checked >= 40, format!("only {checked} balanced instances"))?;
    Ok(format!("{checked} balanced (digraph, alpha) pairs"))
}

fn c7_two_balanced() -> Outcome {
    let mut r = rng(SEED ^ 7);
    let mut balanced = 0;
    for t in 0..BALANCE_DIGRAPHS {
        let g = random_digraph(&mut r, 2 + t % 5, 0.3);
        let report = check_two_balanced_equivalence(&g, default_counter_cap(&g))
            .map_err(|e| e.to_string())?;
        check(report.agree(), format!("disagreement on {}", g.to_json()))?;
        balanced += usize::from(report.two_balanced);
    }
    Ok(format!(
        "{BALANCE_DIGRAPHS} digraphs agree ({balanced} 2-balanced)"
    ))
}

fn replay(v: &Verdict, h: &Hypergraph, m: &Machine) -> Result<(), String> {
    match v {
        Verdict::Good => Ok(()),
        Verdict::Bad(w) => w
            .replay(h, m)
            .map_err(|e| format!("witness fails replay: {e}")),
    }
}

fn c8_goodness_oracle() -> Outcome {
    let mut r = rng(SEED ^ 8);
    let mut bad = 0;
    for t in 0..GOODNESS_PAIRS {
        let k = 2 + t % 2;
        let h = random_hypergraph(&mut r, k + t % (6 - k), k, 1 + t % 5);
        let m = random_machine(&mut r, k, 1 + t % 3, 0.2);
        let fast = is_good(&h, &m).map_err(|e| e.to_string())?;
        let slow =
            brute_force_is_good(&h, &m, default_oracle_len(&h, &m), &mut Budget::unlimited())
                .map_err(|e| e.to_string())?;
        check(
            fast.is_good() == slow.is_good(),
            format!("pair {t} disagrees"),
        )?;
        replay(&fast, &h, &m)?;
        replay(&slow, &h, &m)?;
        bad += usize::from(!fast.is_good());
    }
    Ok(format!("{GOODNESS_PAIRS} pairs agree ({bad} bad)"))
}

fn c9_shift_digraph() -> Outcome {
    let rm = alternating_machine().map_err(|e| e.to_string())?;
    for m in 2..=8 {
        let g = gen_shift_digraph(m);
        check(
            is_good(&g, &rm.machine).unwrap().is_good(),
            format!("m = {m}: relation machine finds a bad cycle"),
        )?;
        check(
            detect_odd_alternating_cycle(&g).unwrap().is_none(),
            format!("m = {m}: detector finds a cycle"),
        )?;
    }
    let mut chis = Vec::new();
    for m in 2..=16usize {
        let chi = exact_chi(&gen_shift_digraph(m))?;
        let expected = (usize::BITS - (m - 1).leading_zeros()) as usize;
        check(
            chi == expected,
            format!("m = {m}: chi = {chi}, expected {expected}"),
        )?;
        chis.push(chi);
    }
    Ok(format!("chi for m = 2..16: {chis:?}"))
}

fn c10_relation_algebra() -> Outcome {
    let r = alternating_relation();
    let rm = r.reverse();
    let rrr = r.compose(&r).and_then(|x| x.compose(&r)).unwrap();
    let other = rm
        .compose(&r)
        .and_then(|x| x.compose(&r))
        .and_then(|x| x.compose(&rm))
        .unwrap();
    let (x, y, z) = (0, 1, 2);
    let want1 = Relation::new(3, [(x, x), (x, y), (x, z), (y, y), (y, z), (z, x), (z, z)]).unwrap();
    let want2 = Relation::new(
        3,
        [
            (x, x),
            (x, y),
            (y, x),
            (y, y),
            (y, z),
            (z, x),
            (z, y),
            (z, z),
        ],
    )
    .unwrap();
    check(rrr == want1, format!("R R R = {rrr}"))?;
    check(other == want2, format!("R- R R R- = {other}"))?;
    let s = alternating_s_set(&r);
    check(
        is_pq_compatible(&s).unwrap().is_compatible(),
        "S is not pq-compatible",
    )?;
    Ok(format!("|S| = {}", s.len()))
}

fn c11_unbalanced_systems() -> Outcome {
    for k in 1..=3 {
        let report = verify_order_system(&gen_unbalanced_machine(k), &unbalanced_order_system(k))
            .map_err(|e| e.to_string())?;
        check(
            report.is_compatible(),
            format!("k = {k}: {:?}", report.violations),
        )?;
    }
    Ok("k = 1..3".into())
}

fn c12_construction() -> Outcome {
    let machine = gen_counter_machine(2);
    let order = counter_machine_order(2, 2);
    let mut chis = Vec::new();
    for m in [6, 8, 10] {
        let h = gen_cycling_construction(&machine, &order, m).map_err(|e| e.to_string())?;
        check(
            is_good(&h, &machine).unwrap().is_good(),
            format!("m = {m}: not good"),
        )?;
        chis.push(exact_chi(&h)?);
    }
    check(
        chis.windows(2).all(|w| w[0] <= w[1]),
        format!("chi sequence {chis:?} decreases"),
    )?;
    Ok(format!("chi for m = 6, 8, 10: {chis:?}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("explicit Hasse digraph chromatic number", c1_explicit_hasse),
        ("unique order system", c2_unique_system),
        ("counter machines", c3_counter_machines),
        ("decide2 vs exhaustive search", c4_decide2_vs_search),
        ("3-SAT reduction", c5_sat_reduction),
        ("balanced coloring", c6_balanced_coloring),
        ("2-balanced vs counter goodness", c7_two_balanced),
        ("goodness oracle equivalence", c8_goodness_oracle),
        ("shift digraph", c9_shift_digraph),
        ("relation algebra", c10_relation_algebra),
        ("k-unbalanced order systems", c11_unbalanced_systems),
        ("cycling construction", c12_construction),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
