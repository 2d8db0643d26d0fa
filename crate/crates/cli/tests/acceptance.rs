//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every check is exact; there are no numeric tolerances. Time budgets are
//! pinned below. The process fails when a criterion fails that is not listed
//! in `KNOWN_RED`, so regressions break `cargo test` while a documented red
//! stays visible in the output.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use cech::cech::{coboundary, cohomology, is_coboundary, is_cocycle, Cochain};
use cech::connecting::{connecting_map, staged_connecting, validate_exact, validate_extension};
use cech::descent::{automorphism_to_cocycle, gerbe21_classifying, gerbe21_via_connecting, transition_cocycle, TorsorMorphism};
use cech::fixtures::{
    random_automorphism, random_cochain, random_cocycle, random_descent_datum, random_lifting_choice, random_nerve,
    random_sequence, random_sheaf, random_spliced_pair, sphere_mayer_vietoris, sphere_spliced_pair,
};
use cech::lattice::{smith_normal_form, FGAbelianGroup, IntMatrix};
use cech::nerve::{build_nerve, Cover, Nerve};
use cech::projective::{lci_cocycle, symmetric_power_window, LinearForm, ProjPoint, RationalFunctionRep, Window};
use cech::sheaf::{constant_sheaf, validate_sheaf, AbelianSheaf};
use num_traits::{ToPrimitive, Zero};
use oracle::{brute_cohomology, finite_profile, invariant_factors_by_minors, FiniteSheaf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const P2_BUDGET: Duration = Duration::from_secs(10);
const ORACLE_BUDGET: Duration = Duration::from_secs(60);

/// Criteria expected to print FAIL, with the reason.
const KNOWN_RED: &[(u32, &str)] = &[(
    1,
    "the transposition cocycle is a coboundary on the 7-point window (eta_1 = 0, eta_2 = [1,1,0], eta_3 = [1,0,1] + [0,1,1])",
)];

type Verdict = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cech_bin(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_cech")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn line(s: &str) -> LinearForm {
    LinearForm::parse(s, 2).unwrap()
}

fn common_zero(f: &LinearForm, g: &LinearForm) -> Option<ProjPoint> {
    let mut found: Vec<ProjPoint> = Vec::new();
    for a in -7i64..=7 {
        for b in -7i64..=7 {
            for c in -7i64..=7 {
                if let Ok(p) = ProjPoint::from_i64s(&[a, b, c]) {
                    if p.lies_on(f) && p.lies_on(g) && !found.contains(&p) {
                        found.push(p);
                    }
                }
            }
        }
    }
    (found.len() == 1).then(|| found.pop().unwrap())
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let (code, stdout) = cech_bin(&["p2-demo"]);
    let elapsed = start.elapsed();
    let report: Value = serde_json::from_slice(&stdout).map_err(|e| format!("p2-demo output: {e}"))?;
    let result = &report["result"];
    let certs = report["certificates"].as_array().ok_or("no certificates")?;
    let cert = |i: usize| (certs[i]["claim"].as_str().unwrap_or(""), certs[i]["verdict"].as_str().unwrap_or(""));
    let mut failed = Vec::new();

    // (a) intersections, against a brute-force common zero
    let expected = [("X1-X2", "X3", "[1,1,0]"), ("X1-X3", "X2", "[1,0,1]"), ("X2-X3", "X1", "[0,1,1]")];
    let got = result["intersections"].as_array().ok_or("no intersections")?;
    let a_ok = got.len() == 3
        && got.iter().zip(expected).all(|(g, (f1, f2, p))| {
            let brute = common_zero(&line(f1), &line(f2)).map(|q| q.to_string());
            g["lines"][0] == f1 && g["lines"][1] == f2 && g["point"] == p && brute.as_deref() == Some(p)
        });
    if !a_ok {
        failed.push("(a)");
    }
    // (b) restrictions to U123 vanish and the cochain is a cocycle
    let b_ok = result["triple_restrictions"].as_array().is_some_and(|t| t.iter().all(|d| d == "0"))
        && result["is_cocycle"] == true
        && cert(0) == ("cocycle", "verified");
    if !b_ok {
        failed.push("(b)");
    }
    // (c) no coboundary witness on the window
    let c_ok = cert(1) == ("class-nontrivial-in-window", "verified") && certs[1]["evidence"]["kind"] == "infeasibility";
    if !c_ok {
        failed.push("(c) coboundary witness found");
    }
    // (d) the connecting map gives a 2-cocycle of Z(2)
    let d_ok = cert(2) == ("cocycle", "verified") && certs[2]["degree"] == "2";
    if !d_ok {
        failed.push("(d)");
    }
    // (e) obstruction quotient at p = 1 is nonzero
    let e_ok = result["obstruction"]["degree"] == "1" && result["obstruction"]["group"] != "0";
    if !e_ok {
        failed.push("(e) obstruction quotient is 0");
    }
    if elapsed > P2_BUDGET {
        failed.push("runtime");
    }

    // The certificates must survive an independent re-check either way.
    let dir = std::env::temp_dir().join(format!("cech-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("p2.json");
    std::fs::write(&path, &stdout).map_err(|e| e.to_string())?;
    let (verify_code, _) = cech_bin(&["verify", "--certificates", path.to_str().unwrap()]);
    let _ = std::fs::remove_dir_all(&dir);
    if verify_code != 0 {
        failed.push("certificates do not re-verify");
    }

    let summary = format!("exit {code}, {:.2}s, certificates re-verified: {}", elapsed.as_secs_f64(), verify_code == 0);
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", failed.join(", ")))
    }
}

fn criterion_2() -> Verdict {
    let ws = symmetric_power_window(&Window::standard_p2(), 2).map_err(|e| e.to_string())?;
    let kernel = &ws.sequence.kernel;
    let same = vec![RationalFunctionRep::ratio(&line("X1-X2"), &line("X1")), RationalFunctionRep::ratio(&line("X3"), &line("X1"))];
    let out = lci_cocycle(&ws, &[same.clone(), same.clone(), same.clone()]).map_err(|e| e.to_string())?;
    ensure(out.is_cocycle, "identical equations: h is not a cocycle")?;
    ensure(out.cocycle.is_zero(kernel).unwrap(), "identical equations: h != 0")?;
    let global = out.global.ok_or("identical equations: no global witness")?;
    ensure(global.tuple.as_ref() == Some(&same), "identical equations: global tuple differs")?;

    let charts: Vec<Vec<RationalFunctionRep>> = (0..3)
        .map(|i| {
            let xi = LinearForm::coordinate(i, 2);
            vec![RationalFunctionRep::ratio(&line("X1-X2"), &xi), RationalFunctionRep::ratio(&line("X3"), &xi)]
        })
        .collect();
    let out = lci_cocycle(&ws, &charts).map_err(|e| e.to_string())?;
    ensure(out.is_cocycle, "chart-wise equations: h is not a cocycle")?;
    ensure(!out.cocycle.is_zero(kernel).unwrap(), "chart-wise equations: h = 0")?;
    let global = out.global.ok_or("chart-wise equations: no coboundary witness")?;
    let eta = global.correction.clone();
    ensure(coboundary(kernel, &eta).unwrap().equals(kernel, &out.cocycle).unwrap(), "witness does not bound h")?;
    let nerve = ws.nerve();
    for (k, v) in nerve.simplices(0).iter().enumerate() {
        let pi = ws.sequence.projection.at(nerve, v).unwrap();
        ensure(
            pi.apply(&global.section).unwrap() == pi.apply(&out.local_products[k]).unwrap(),
            format!("global section cuts a different cycle on chart {k}"),
        )?;
    }
    Ok(format!("chart-wise global section has {} symmetric products", global.expansion.len()))
}

fn criterion_3() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let (mut sequences, mut checks, mut nonzero) = (0, 0, 0);
    while sequences < 60 {
        let seq = if sequences % 10 == 0 {
            sphere_mayer_vietoris(&mut rng, 2, [0, 2, 3][sequences / 10 % 3])
        } else {
            random_sequence(&mut rng, 4)
        };
        sequences += 1;
        ensure(validate_exact(&seq).unwrap().is_valid(), "fixture not exact")?;
        let top = seq.nerve().dimension().unwrap_or(0);
        for p in 0..top {
            let c = random_cocycle(&mut rng, &seq.quotient, p);
            let a = connecting_map(&seq, &c, None).map_err(|e| e.to_string())?;
            ensure(is_cocycle(&seq.kernel, &a.cocycle).unwrap(), "connecting output is not a cocycle")?;
            if !is_coboundary(&seq.kernel, &a.cocycle).unwrap() {
                nonzero += 1;
            }
            let choice = random_lifting_choice(&mut rng, &seq, &c);
            let b = connecting_map(&seq, &c, Some(&choice)).map_err(|e| e.to_string())?;
            ensure(
                is_coboundary(&seq.kernel, &a.cocycle.sub(&b.cocycle).unwrap()).unwrap(),
                "changing lifts changed the class",
            )?;
            for rep in &cohomology(&seq.middle, p).unwrap().representatives {
                let image = seq.projection.apply(&seq.quotient, rep).unwrap();
                let out = connecting_map(&seq, &image, None).unwrap();
                ensure(is_coboundary(&seq.kernel, &out.cocycle).unwrap(), "connecting after projection is nonzero")?;
            }
            checks += 1;
        }
    }
    ensure(nonzero > 0, "every connecting class vanished")?;
    Ok(format!("{sequences} sequences, {checks} cocycles, {nonzero} nonzero images"))
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let (mut instances, mut nonzero) = (0, 0);
    for k in 0.. {
        if instances >= 24 {
            break;
        }
        let pair = if k % 4 == 0 {
            sphere_spliced_pair(&mut rng, [0, 2, 3][k / 4 % 3])
        } else {
            random_spliced_pair(&mut rng, 4)
        };
        ensure(validate_extension(&pair.extension).unwrap().is_valid(), "fixture not exact")?;
        let top = pair.extension.nerve().dimension().unwrap_or(0);
        for p in 0..top.saturating_sub(1) {
            let c = random_cocycle(&mut rng, &pair.extension.quotient, p);
            let staged = staged_connecting(&pair.extension, &c, None, None).map_err(|e| e.to_string())?;
            let first = connecting_map(&pair.upper, &c, None).unwrap();
            let second = connecting_map(&pair.lower, &first.cocycle, None).unwrap();
            let kernel = &pair.extension.kernel;
            ensure(
                is_coboundary(kernel, &staged.cocycle.sub(&second.cocycle).unwrap()).unwrap(),
                "staged class differs from the composite",
            )?;
            if !is_coboundary(kernel, &staged.cocycle).unwrap() {
                nonzero += 1;
            }
            instances += 1;
        }
    }
    ensure(instances >= 20, format!("only {instances} instances"))?;
    ensure(nonzero > 0, "every staged class vanished")?;
    Ok(format!("{instances} instances, {nonzero} nonzero classes"))
}

fn criterion_5() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    for _ in 0..50 {
        let nerve = random_nerve(&mut rng, 4);
        let band = random_sheaf(&mut rng, &nerve, &[0, 2, 3], 3);
        let datum = random_descent_datum(&mut rng, &band);
        let auto = random_automorphism(&mut rng, &datum);
        let h = automorphism_to_cocycle(&datum, &auto).map_err(|e| e.to_string())?;
        ensure(h.is_cocycle && is_cocycle(&band, &h.cochain).unwrap(), "h is not a cocycle")?;

        let mut other = auto.clone();
        let m = random_cochain(&mut rng, &band, 0);
        for (l, v) in other.connecting.iter_mut().zip(m.values()) {
            *l = TorsorMorphism::new(l.source_label.clone(), l.target_label.clone(), &l.offset + v);
        }
        let h2 = automorphism_to_cocycle(&datum, &other).unwrap();
        ensure(is_coboundary(&band, &h2.cochain.sub(&h.cochain).unwrap()).unwrap(), "class moved with l")?;

        let a = random_cochain(&mut rng, &band, 1);
        let moved = datum.shift_transitions(&a).unwrap();
        let mut moved_auto = auto.clone();
        for (hu, v) in moved_auto.images.iter_mut().zip(a.values()) {
            *hu = TorsorMorphism::new(hu.source_label.clone(), hu.target_label.clone(), &hu.offset + v);
        }
        let h3 = automorphism_to_cocycle(&moved, &moved_auto).unwrap();
        ensure(is_coboundary(&band, &h3.cochain.sub(&h.cochain).unwrap()).unwrap(), "class moved with u")?;
    }
    let mut nonzero = 0;
    for k in 0..30 {
        let seq = if k % 3 == 0 {
            sphere_mayer_vietoris(&mut rng, 3, [0, 2, 3][k / 3 % 3])
        } else {
            random_sequence(&mut rng, 4)
        };
        let datum = random_descent_datum(&mut rng, &seq.quotient);
        let direct = gerbe21_classifying(&datum, &seq).map_err(|e| e.to_string())?;
        let generic = gerbe21_via_connecting(&datum, &seq).unwrap();
        let c = transition_cocycle(&datum).unwrap().cochain;
        let composite = connecting_map(&seq, &c, None).unwrap().cocycle;
        ensure(composite.equals(&seq.kernel, &generic).unwrap(), "via-connecting path differs from the composite")?;
        ensure(
            is_coboundary(&seq.kernel, &direct.cocycle.sub(&composite).unwrap()).unwrap(),
            "gerbe class differs from connecting of the transition cocycle",
        )?;
        if !is_coboundary(&seq.kernel, &direct.cocycle).unwrap() {
            nonzero += 1;
        }
    }
    ensure(nonzero > 0, "every gerbe class vanished")?;
    Ok(format!("50 automorphism data, 30 gerbes ({nonzero} nonzero)"))
}

fn all_complexes(n: usize) -> Vec<Arc<Nerve>> {
    let higher: Vec<Vec<usize>> = (1u32..(1 << n))
        .filter(|m| m.count_ones() >= 2)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    (0u32..(1 << higher.len()))
        .filter_map(|choice| {
            let chosen = (0..higher.len()).filter(|k| choice & (1 << k) != 0).map(|k| higher[k].clone()).collect();
            build_nerve(&Cover::numbered(n, chosen), 5).ok().map(Arc::new)
        })
        .collect()
}

fn compare_with_brute_force(sheaf: &AbelianSheaf) -> Result<usize, String> {
    ensure(validate_sheaf(sheaf).is_valid(), "invalid fixture")?;
    let finite = FiniteSheaf::from_sheaf(sheaf).ok_or("not a finite sheaf")?;
    let mut compared = 0;
    for p in 0..=2 {
        if finite.cochain_count(p) > 1 << 16 {
            continue;
        }
        let inv = cohomology(sheaf, p).unwrap().group.invariants();
        ensure(inv.free_rank == 0, "free part in a finite sheaf")?;
        let torsion: Vec<i64> = inv.torsion.iter().map(|t| t.to_i64().unwrap()).collect();
        ensure(
            finite_profile(&torsion) == brute_cohomology(&finite, p),
            format!("H^{p} mismatch, SNF says {torsion:?}"),
        )?;
        compared += 1;
    }
    Ok(compared)
}

fn criterion_6() -> Verdict {
    let start = Instant::now();
    let complexes: Vec<Arc<Nerve>> = (1..=4).flat_map(all_complexes).collect();
    let mut compared = 0;
    for nerve in &complexes {
        for m in [2, 3] {
            compared += compare_with_brute_force(&constant_sheaf(Arc::clone(nerve), &FGAbelianGroup::cyclic(m)))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    for k in 0..150 {
        let sheaf = random_sheaf(&mut rng, &complexes[(k * 37) % complexes.len()], &[2, 3], 2);
        compared += compare_with_brute_force(&sheaf)?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed <= ORACLE_BUDGET, format!("took {:.1}s", elapsed.as_secs_f64()))?;
    Ok(format!("{} complexes, {compared} groups compared, {:.1}s", complexes.len(), elapsed.as_secs_f64()))
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let mut cochains = 0;
    while cochains < 100 {
        let nerve = random_nerve(&mut rng, 4);
        let sheaf = random_sheaf(&mut rng, &nerve, &[0, 2, 3], 3);
        for p in 0..=2 {
            let c: Cochain = random_cochain(&mut rng, &sheaf, p);
            let dd = coboundary(&sheaf, &coboundary(&sheaf, &c).unwrap()).unwrap();
            ensure(dd.is_zero(&sheaf).unwrap(), format!("d(d c) != 0 in degree {p}"))?;
            cochains += 1;
        }
    }
    for _ in 0..100 {
        let r = rng.gen_range(1..=5);
        let c = rng.gen_range(1..=5);
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let snf = smith_normal_form(&IntMatrix::from_rows(&rows));
        let diag: Vec<i128> = snf.diagonal().iter().filter(|d| !d.is_zero()).map(|d| d.to_i128().unwrap()).collect();
        ensure(diag == invariant_factors_by_minors(&rows), format!("SNF mismatch on {rows:?}"))?;
    }
    Ok(format!("{cochains} cochains, 100 matrices"))
}

fn criterion_8() -> Verdict {
    let ws = symmetric_power_window(&Window::spec_k(), 1).map_err(|e| e.to_string())?;
    let nerve = ws.nerve();
    for s in nerve.all_simplices() {
        let m = ws.sequence.middle.group(s).unwrap();
        let z = ws.sequence.kernel.group(s).unwrap();
        ensure(ws.sequence.quotient.group(s).unwrap().is_trivial(), "Spec(k): CH is nonzero")?;
        ensure(z.invariants() == m.invariants(), "Spec(k): Z(l) is not everything")?;
    }
    let ws = symmetric_power_window(&Window::standard_p1(), 2).map_err(|e| e.to_string())?;
    let nerve = ws.nerve();
    for s in nerve.all_simplices() {
        ensure(ws.sequence.quotient.group(s).unwrap().is_trivial(), "P1: CH^2 is nonzero")?;
    }
    let top = nerve.dimension().unwrap_or(0);
    for p in 0..=top {
        ensure(cohomology(&ws.sequence.quotient, p).unwrap().group.is_trivial(), format!("P1: H^{p}(CH^2) != 0"))?;
    }
    Ok(format!("Spec(k): Z(1) = M(1); P1: H^p(CH^2) = 0 for p <= {top}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "transposition cocycle on the P2 window", criterion_1),
        (2, "local complete intersection gluing", criterion_2),
        (3, "long exact sequence properties", criterion_3),
        (4, "staged connecting map", criterion_4),
        (5, "descent cocycles", criterion_5),
        (6, "cohomology against brute force", criterion_6),
        (7, "core numerics", criterion_7),
        (8, "degenerate windows", criterion_8),
    ];
    let mut unexpected = 0;
    for (n, name, run) in criteria {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {n} {name}: {detail} [{secs:.1}s]"),
            Err(reason) => match KNOWN_RED.iter().find(|(k, _)| *k == n) {
                Some((_, why)) => println!("FAIL {n} {name}: {reason} [{secs:.1}s] (known: {why})"),
                None => {
                    unexpected += 1;
                    println!("FAIL {n} {name}: {reason} [{secs:.1}s]");
                }
            },
        }
    }
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
