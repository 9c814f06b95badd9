//! Acceptance run: one PASS/FAIL line per criterion.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ruelle_kit::io::{read_report, BetaSearchReport, JointRpfReport, KGraphRpfReport};
use ruelle_kit::kgraph::{kgraph_rpf_solve, CategoricalCocycle, KGraph, KGraphRpfOptions, KGraphSpec, KmsReport};
use ruelle_kit::ksystem::{
    check_cocycle_condition, joint_rpf_solve, normalize_system, operators_commute, quasi_invariance_check,
    CoordinateRoots, JointRpfOptions, KRuelleSystem,
};
use ruelle_kit::nkmod::{
    coboundary_tuple, evaluate_semigroup_cocycle, verify_cocycle_identity, CocycleTuple, MatrixAction, NkModule,
    NkVector, ShiftAction,
};
use ruelle_kit::ruelle::{compose_triples, RuelleTriple};
use ruelle_kit::symspace::{CatalogMap, CylinderFunction, CylinderMeasure, SymbolicSpace};
use ruelle_kit::{ExpPoly, Rational};
use ruelle_kit_cli::run;

struct Verdict {
    pass: bool,
    detail: String,
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = run(std::iter::once("ruelle-kit").chain(args.iter().copied()));
    match out.code {
        0 => Ok(out.stdout),
        c => Err(format!("exit {c}: {}", out.stderr.trim())),
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    q(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

fn full(n: usize) -> SymbolicSpace {
    SymbolicSpace::full_shift(n).unwrap()
}

fn golden() -> SymbolicSpace {
    SymbolicSpace::sft(vec![vec![1, 1], vec![1, 0]]).unwrap()
}

fn table<V: ruelle_kit::Scalar>(space: &SymbolicSpace, depth: usize, values: &[V]) -> CylinderFunction<V> {
    let mut i = 0;
    CylinderFunction::from_fn(space, depth, |_| {
        i += 1;
        values[(i - 1) % values.len()].clone()
    })
}

fn criterion_1() -> Verdict {
    let (a, b, c) = (0.3f64, -0.7f64, 0.2f64);
    let start = Instant::now();
    let report = match cli(&["joint-rpf", &fixture("abc.json"), "--depth", "6"]) {
        Ok(text) => read_report::<JointRpfReport>(&text).unwrap().report,
        Err(e) => return Verdict { pass: false, detail: e },
    };
    let elapsed = start.elapsed();
    let e1 = (report.eigenvalues[0] - (a.exp() + b.exp())).abs();
    let e2 = (report.eigenvalues[1] - c.exp()).abs();
    let mut worst: f64 = 0.0;
    let mut cylinders = 0;
    for depth in 1..=6 {
        for n in 0..(1u32 << depth) {
            let bits: Vec<u8> = (0..depth).map(|i| ((n >> i) & 1) as u8).collect();
            let mut expected = 0.5;
            for j in 0..depth - 1 {
                let psi = if bits[j] == bits[j + 1] { a } else { b };
                expected *= psi.exp() / (a.exp() + b.exp());
            }
            let prefix: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
            let mass: f64 = report.measure.iter().filter(|(w, _)| w.starts_with(&prefix)).map(|(_, m)| m).sum();
            worst = worst.max((mass - expected).abs());
            cylinders += 1;
        }
    }
    Verdict {
        pass: e1 < 1e-10 && e2 < 1e-10 && worst < 1e-10 && elapsed < Duration::from_secs(1),
        detail: format!(
            "|λ₁ − (e^a+e^b)| = {e1:.1e}, |λ₂ − e^c| = {e2:.1e}, worst cylinder error {worst:.1e} over {cylinders} cylinders, solve {:.3}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_2() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in 2..=5 {
        let start = Instant::now();
        let r = match cli(&["beta-search", &fixture(&format!("cuntz_{n}.json"))]) {
            Ok(text) => read_report::<BetaSearchReport>(&text).unwrap().report,
            Err(e) => return Verdict { pass: false, detail: e },
        };
        let elapsed = start.elapsed();
        let ok = r.common.len() == 1 && (r.common[0] - (n as f64).ln()).abs() < 1e-9 && elapsed < Duration::from_secs(1);
        pass &= ok;
        parts.push(format!("N={n}: {:?} in {:.3}s", r.common, elapsed.as_secs_f64()));
    }
    Verdict { pass, detail: parts.join("; ") }
}

fn criterion_3() -> Verdict {
    let r = match cli(&["beta-search", &fixture("o2_o3.json")]) {
        Ok(text) => read_report::<BetaSearchReport>(&text).unwrap().report,
        Err(e) => return Verdict { pass: false, detail: e },
    };
    let roots: Vec<Vec<f64>> = r
        .coordinates
        .iter()
        .map(|c| match c {
            CoordinateRoots::Roots { roots } => roots.clone(),
            CoordinateRoots::Everywhere => vec![f64::NAN],
        })
        .collect();
    let ok = r.common.is_empty()
        && roots.len() == 2
        && roots[0].len() == 1
        && roots[1].len() == 1
        && (roots[0][0] - 2f64.ln()).abs() < 1e-9
        && (roots[1][0] - 3f64.ln()).abs() < 1e-9;
    Verdict {
        pass: ok,
        detail: format!("common roots {:?}, per-coordinate roots {roots:?}", r.common),
    }
}

fn criterion_4() -> Verdict {
    let mut cases: Vec<(String, Vec<String>)> = (2..=5)
        .map(|n| {
            let beta = (n as f64).ln().to_string();
            (
                format!("O_{n}"),
                vec!["kgraph".into(), "kms".into(), fixture(&format!("o{n}_graph.json")), "--beta".into(), beta, "--degree-bound".into(), "2".into()],
            )
        })
        .collect();
    cases.push((
        "O_2⊗O_3".into(),
        vec!["kgraph".into(), "kms".into(), fixture("o2_o3_graph.json"), "--beta".into(), "1".into(), "--degree-bound".into(), "2,2".into()],
    ));
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, mut args) in cases {
        args.push("--all-pairs".into());
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let start = Instant::now();
        let r = match cli(&args) {
            Ok(text) => read_report::<KmsReport>(&text).unwrap().report,
            Err(e) => return Verdict { pass: false, detail: format!("{name}: {e}") },
        };
        let elapsed = start.elapsed();
        let ok = r.max_violation < 1e-9 && r.pairs_evaluated >= 1000 && elapsed < Duration::from_secs(10);
        pass &= ok;
        parts.push(format!("{name}: {:.1e} over {} pairs in {:.2}s", r.max_violation, r.pairs_evaluated, elapsed.as_secs_f64()));
    }
    Verdict { pass, detail: parts.join("; ") }
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pools: [(SymbolicSpace, Vec<CatalogMap>); 2] = [
        (
            full(2),
            vec![CatalogMap::Shift, CatalogMap::SymbolBijection(vec![1, 0]), CatalogMap::Shift.power(2), CatalogMap::identity()],
        ),
        (golden(), vec![CatalogMap::Shift, CatalogMap::Shift.power(2), CatalogMap::identity()]),
    ];
    let mut checked = 0;
    let mut failures = 0;
    for (space, maps) in &pools {
        for _ in 0..100 {
            let phi: Vec<Rational> = (0..2).map(|_| random_rational(&mut rng)).collect();
            let psi: Vec<Rational> = (0..2).map(|_| random_rational(&mut rng)).collect();
            let s = maps[rng.gen_range(0..maps.len())].clone();
            let t = maps[rng.gen_range(0..maps.len())].clone();
            let first = RuelleTriple::new(space.clone(), s, table(space, 1, &phi)).unwrap();
            let second = RuelleTriple::new(space.clone(), t, table(space, 1, &psi)).unwrap();
            let composed = compose_triples(&first, &second).unwrap();
            for w in space.admissible_words(4) {
                let f = CylinderFunction::<ExpPoly>::indicator(space, &w);
                let nested = first.apply(&second.apply(&f).unwrap()).unwrap();
                let direct = composed.apply(&f).unwrap();
                let d = nested.depth().max(direct.depth());
                if nested.refine(d) != direct.refine(d) {
                    failures += 1;
                }
                checked += 1;
            }
        }
    }
    Verdict {
        pass: failures == 0,
        detail: format!("{checked} exact comparisons on depth-4 indicators, {failures} mismatches"),
    }
}

fn identity_holds<M: NkModule>(action: &M, tuple: &CocycleTuple<M::Elem>) -> bool {
    let k = action.rank();
    let readback = (0..k).all(|i| {
        action.equal(&evaluate_semigroup_cocycle(action, tuple, &NkVector::unit(k, i)).unwrap(), &tuple.entries()[i])
    });
    let small = NkVector::all_with_len_at_most(k, 4);
    readback
        && small
            .iter()
            .all(|m| small.iter().all(|n| verify_cocycle_identity(action, tuple.entries(), m, n).unwrap()))
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let shift = ShiftAction::<Rational>::new(full(2), vec![CatalogMap::Shift, CatalogMap::SymbolBijection(vec![1, 0])]).unwrap();
    let space = shift.space().clone();
    let mut passed = 0;
    for trial in 0..100 {
        let ok = if trial % 2 == 0 {
            let alpha: Vec<Rational> = (0..4).map(|_| random_rational(&mut rng)).collect();
            let entries: Vec<_> = coboundary_tuple(&shift, &table(&space, 2, &alpha))
                .into_entries()
                .into_iter()
                .map(|a| a.plus(&CylinderFunction::constant(&space, random_rational(&mut rng))).unwrap())
                .collect();
            identity_holds(&shift, &CocycleTuple::new(&shift, entries).unwrap())
        } else {
            let m: Vec<i64> = (0..4).map(|_| rng.gen_range(-2..=2)).collect();
            let s = rng.gen_range(-2..=2);
            let action = MatrixAction::new(
                2,
                vec![vec![vec![m[0], m[1]], vec![m[2], m[3]]], vec![vec![m[0] + s, m[1]], vec![m[2], m[3] + s]]],
            )
            .unwrap();
            let u = vec![rng.gen_range(-5..=5), rng.gen_range(-5..=5)];
            identity_holds(&action, &coboundary_tuple(&action, &u))
        };
        passed += ok as usize;
    }
    Verdict {
        pass: passed == 100,
        detail: format!("{passed}/100 tuples satisfy c(m+n) = c(m) + m·c(n) for |m|,|n| ≤ 4 with exact readback"),
    }
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let settings: Vec<(SymbolicSpace, Vec<CatalogMap>)> = vec![
        (full(2), vec![CatalogMap::Shift, CatalogMap::SymbolBijection(vec![1, 0])]),
        (golden(), vec![CatalogMap::Shift, CatalogMap::Shift.power(2)]),
        (
            SymbolicSpace::product(vec![full(2), full(2)]).unwrap(),
            vec![CatalogMap::FactorMap(0, Box::new(CatalogMap::Shift)), CatalogMap::FactorMap(1, Box::new(CatalogMap::Shift))],
        ),
    ];
    let (mut agree, mut passing, mut violating) = (0, 0, 0);
    for trial in 0..100 {
        let (space, maps) = &settings[trial % settings.len()];
        let action = ShiftAction::<Rational>::new(space.clone(), maps.clone()).unwrap();
        let alpha: Vec<Rational> = (0..4).map(|_| random_rational(&mut rng)).collect();
        let mut potentials: Vec<_> = coboundary_tuple(&action, &table(space, 1, &alpha))
            .into_entries()
            .into_iter()
            .map(|a| a.plus(&CylinderFunction::constant(space, random_rational(&mut rng))).unwrap())
            .collect();
        if trial >= 50 {
            let words = space.admissible_words(1);
            let w = &words[rng.gen_range(0..words.len())];
            let mut delta = random_rational(&mut rng);
            if delta == q(0, 1) {
                delta = q(1, 2);
            }
            potentials[0] = potentials[0].plus(&CylinderFunction::indicator(space, w).scale(&delta)).unwrap();
        }
        let sys = KRuelleSystem::new(space.clone(), maps.clone(), potentials).unwrap();
        let condition = check_cocycle_condition(&sys);
        if condition {
            passing += 1;
        } else {
            violating += 1;
        }
        agree += (operators_commute(&sys, 1).unwrap() == condition) as usize;
    }
    Verdict {
        pass: agree == 100 && passing == 50 && violating == 50,
        detail: format!("{agree}/100 agree ({passing} passing, {violating} violating)"),
    }
}

fn corpus() -> Vec<(String, KRuelleSystem<f64>)> {
    let mut out = Vec::new();
    let s = full(2);
    for (a, b, c) in [(0.3, -0.7, 0.2), (1.0, 0.0, -0.5), (-(2f64.ln()), -(2f64.ln()), 0.0)] {
        let phi = CylinderFunction::from_fn(&s, 2, |w| if w.parts()[0][0] == w.parts()[0][1] { a } else { b });
        out.push((
            format!("parity({a:.2},{b:.2},{c:.2})"),
            KRuelleSystem::new(
                s.clone(),
                vec![CatalogMap::Shift, CatalogMap::SymbolBijection(vec![1, 0])],
                vec![phi, CylinderFunction::constant(&s, c)],
            )
            .unwrap(),
        ));
    }
    for n in 2..=5 {
        let s = full(n);
        out.push((
            format!("cuntz-{n}"),
            KRuelleSystem::new(s.clone(), vec![CatalogMap::Shift], vec![CylinderFunction::constant(&s, 1.0)]).unwrap(),
        ));
    }
    let p = SymbolicSpace::product(vec![full(2), full(3)]).unwrap();
    out.push((
        "tensor".into(),
        KRuelleSystem::new(
            p.clone(),
            vec![CatalogMap::FactorMap(0, Box::new(CatalogMap::Shift)), CatalogMap::FactorMap(1, Box::new(CatalogMap::Shift))],
            vec![CylinderFunction::constant(&p, 1.0), CylinderFunction::constant(&p, 1.0)],
        )
        .unwrap(),
    ));
    out
}

fn criterion_8() -> Verdict {
    let mut checked = 0;
    let mut problems = Vec::new();
    for (name, sys) in corpus() {
        let sol = joint_rpf_solve(&sys, 3, &JointRpfOptions::default()).unwrap();
        let beta = 1.0;
        let normalized = normalize_system(&sys, &sol, beta).unwrap();
        let own = quasi_invariance_check(&normalized.scaled(&-beta), &sol.measure, 1e-10).unwrap();
        let uniform = CylinderMeasure::uniform_bernoulli(sys.space(), 3).unwrap();
        let uniform_passes = quasi_invariance_check(&sys, &uniform, 1e-10).unwrap();
        let some_not_one = sol.eigenvalues.iter().any(|l| (l - 1.0).abs() > 1e-10);
        if !own {
            problems.push(format!("{name}: eigenmeasure not quasi-invariant"));
        }
        if some_not_one && uniform_passes {
            problems.push(format!("{name}: uniform measure accepted"));
        }
        checked += 1;
    }
    Verdict {
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{checked} systems: own eigenmeasure accepted, uniform measure rejected wherever some λᵢ ≠ 1")
        } else {
            problems.join("; ")
        },
    }
}

fn criterion_9() -> Verdict {
    let path = fixture("two_vertex.json");
    let report = match cli(&["kgraph", "rpf", &path, "--degree-bound", "2,2", "--tol", "1e-10"]) {
        Ok(text) => read_report::<KGraphRpfReport>(&text).unwrap().report,
        Err(e) => return Verdict { pass: false, detail: e },
    };
    let spec: KGraphSpec = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let g = KGraph::try_from(&spec).unwrap();
    let m = kgraph_rpf_solve(&g, &CategoricalCocycle::from_spec(&g, &spec).unwrap(), &KGraphRpfOptions::default()).unwrap();
    let bound = NkVector::new(vec![2, 2]);
    let mut additivity: f64 = 0.0;
    let mut min_mass = f64::INFINITY;
    for v in 0..g.num_vertices() {
        for p in g.paths_up_to(v, &bound) {
            let mass = m.cylinder_mass(&p);
            min_mass = min_mass.min(mass);
            for color in 0..g.rank() {
                let children: f64 = g
                    .edges_into(p.source(), color)
                    .iter()
                    .map(|&e| m.cylinder_mass(&g.compose(&p, &g.path(&[e]).unwrap()).unwrap()))
                    .sum();
                additivity = additivity.max((children - mass).abs());
            }
        }
    }
    let reported_min = report.cylinder_masses.values().copied().fold(f64::INFINITY, f64::min);
    Verdict {
        pass: report.identity.pass
            && report.identity.max_error <= 1e-10
            && additivity <= 1e-12
            && min_mass > 0.0
            && reported_min > 0.0,
        detail: format!(
            "identity error {:.1e} over {} paths, additivity error {additivity:.1e}, least mass {min_mass:.3e}",
            report.identity.max_error, report.identity.paths_checked
        ),
    }
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 9] = [
        ("parity eigenmeasure", criterion_1),
        ("Cuntz inverse temperature", criterion_2),
        ("no common root for O_2⊗O_3", criterion_3),
        ("KMS identity on matrix units", criterion_4),
        ("composition law", criterion_5),
        ("cocycle algebra", criterion_6),
        ("commutation equivalence", criterion_7),
        ("quasi-invariance", criterion_8),
        ("2-graph measure identities", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = f();
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {} ({name}): {} [{secs:.2}s] {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += (!v.pass) as usize;
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
