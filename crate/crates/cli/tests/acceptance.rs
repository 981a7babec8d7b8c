//! Acceptance suite: eight criteria, one PASS/FAIL line each. Runs the
//! `orbitcodes` binary where a criterion is about a command, and the library
//! where it is about a construction.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use orbitcodes::equivalence::{galois_action_oracle, orbit_contains};
use orbitcodes::field::FieldCtx;
use orbitcodes::orbit::orbit_profile;
use orbitcodes::usg::{existence_construction, make_usg, UsgFamily};
use orbitcodes::{build_field, Subspace};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Outcome = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Run {
    code: i32,
    json: Value,
    elapsed: Duration,
}

fn cli(args: &[&str]) -> Result<Run, String> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_orbitcodes"))
        .args(args)
        .output()
        .map_err(|e| format!("spawn failed: {e}"))?;
    let elapsed = start.elapsed();
    let code = out.status.code().unwrap_or(-1);
    let json = serde_json::from_slice(&out.stdout).map_err(|e| {
        format!(
            "{args:?}: exit {code}, unparseable output ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok(Run { code, json, elapsed })
}

fn u(v: &Value) -> u64 {
    v.as_u64().unwrap_or(u64::MAX)
}

/// `(orbit_size, classification, contains_q2_shift, λ_2, orbits)`.
type ClassKey = (u64, String, bool, u64, u64);

fn breakdown(payload: &Value) -> BTreeSet<ClassKey> {
    payload["breakdown"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|c| {
            (
                u(&c["orbit_size"]),
                c["classification"].as_str().unwrap_or("").to_string(),
                c["contains_q2_shift"].as_bool().unwrap_or(false),
                u(&c["lambda_2"]),
                u(&c["orbits"]),
            )
        })
        .collect()
}

fn class(size: u64, c: &str, shift: bool, l2: u64, orbits: u64) -> ClassKey {
    (size, c.to_string(), shift, l2, orbits)
}

fn counts(v: &Value) -> [u64; 4] {
    [
        u(&v["total"]),
        u(&v["quasi_optimal"]),
        u(&v["optimal"]),
        u(&v["with_q2_shift"]),
    ]
}

fn census_common(run: &Run, expected: [u64; 4]) -> Outcome {
    let p = &run.json["payload"];
    ensure!(run.code == 0, "exit code {}", run.code);
    ensure!(counts(&p["closed_forms"]) == expected, "closed forms {:?}", counts(&p["closed_forms"]));
    ensure!(counts(&p["tallies"]) == expected, "tallies {:?}", counts(&p["tallies"]));
    ensure!(p["rows"].as_array().map(|r| r.len() as u64) == Some(expected[0]), "row count");
    ensure!(p["mismatches"].as_array().is_some_and(|m| m.is_empty()), "mismatches {}", p["mismatches"]);
    Ok(())
}

/// Every brute row: the norm class agrees with the measured distance.
fn norm_class_matches_distance(payload: &Value, k: u64) -> Outcome {
    for row in payload["rows"].as_array().into_iter().flatten() {
        let d = u(&row["distance"]);
        let expected = match row["classification"].as_str() {
            Some("optimal") => 2 * k - 2,
            Some("quasi_optimal") => 2 * k - 4,
            other => return Err(format!("unknown class {other:?}")),
        };
        ensure!(d == expected, "row (s={}, ell={}): distance {d}, class needs {expected}", row["s"], row["ell"]);
    }
    Ok(())
}

fn criterion_1(census: &Run) -> Outcome {
    census_common(census, [54, 26, 28, 6])?;
    let p = &census.json["payload"];
    ensure!(p["frobenius"]["ell_hat"] == serde_json::json!([28, 7, 28, 7, 28]), "ℓ̂ = {}", p["frobenius"]["ell_hat"]);
    ensure!(p["frobenius"]["i_hat"] == serde_json::json!([2]), "Î = {}", p["frobenius"]["i_hat"]);
    let expected: BTreeSet<ClassKey> = [
        class(6, "optimal", false, 0, 4),
        class(2, "optimal", false, 0, 2),
        class(6, "quasi_optimal", false, 12, 3),
        class(6, "quasi_optimal", true, 3, 1),
        class(2, "quasi_optimal", false, 12, 1),
    ]
    .into();
    ensure!(breakdown(p) == expected, "breakdown {:?}", breakdown(p));
    ensure!(census.elapsed < Duration::from_secs(60), "took {:?}", census.elapsed);
    Ok(())
}

fn criterion_2(census: &Run) -> Outcome {
    census_common(census, [64, 64, 0, 20])?;
    let p = &census.json["payload"];
    let expected: BTreeSet<ClassKey> = [
        class(10, "quasi_optimal", true, 134, 2),
        class(10, "quasi_optimal", false, 150, 4),
        class(2, "quasi_optimal", false, 150, 2),
    ]
    .into();
    ensure!(breakdown(p) == expected, "breakdown {:?}", breakdown(p));
    ensure!(census.elapsed < Duration::from_secs(600), "took {:?}", census.elapsed);
    Ok(())
}

fn criterion_3() -> Outcome {
    let run = cli(&["census-usg", "--p", "3", "--h", "3", "--k", "4", "--verify", "none"])?;
    ensure!(run.code == 0, "exit code {}", run.code);
    let p = &run.json["payload"];
    let expected = [13_817_466, 531_440, 13_286_026, 0];
    ensure!(counts(&p["closed_forms"]) == expected, "closed forms {:?}", counts(&p["closed_forms"]));
    ensure!(counts(&p["tallies"]) == expected, "tallies {:?}", counts(&p["tallies"]));
    let hist = &p["frobenius"]["histogram"];
    ensure!(
        *hist == serde_json::json!({"2": 1, "6": 4, "8": 20, "24": 575_720}),
        "histogram {hist}"
    );
    // φ(4) q^4 (q - 1)/2 with q = 27
    let mass: u64 = hist
        .as_object()
        .into_iter()
        .flatten()
        .map(|(size, count)| size.parse::<u64>().unwrap_or(0) * u(count))
        .sum();
    ensure!(mass == 2 * 27u64.pow(4) * 26 / 2, "histogram mass {mass}");
    ensure!(run.elapsed < Duration::from_secs(1), "took {:?}", run.elapsed);
    Ok(())
}

fn tmp_file(name: &str, body: &str) -> Result<PathBuf, String> {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(path)
}

/// `(ω_2, …, ω_{2k})` by comparing `U` with every shift `αU`, one entry per
/// distinct shift.
fn brute_omega(ctx: &FieldCtx, u: &Subspace) -> Vec<u64> {
    let k = u.dim();
    let mut seen: HashMap<Subspace, usize> = HashMap::new();
    for a in ctx.nonzero() {
        let v = u.scalar_shift(ctx, a).expect("nonzero shift");
        let d = u.intersect_dim(&v).expect("same ground field");
        seen.insert(v, d);
    }
    let mut omega = vec![0u64; k];
    for d in seen.into_values().filter(|&d| d < k) {
        omega[k - d - 1] += 1;
    }
    omega
}

fn criterion_4() -> Outcome {
    let q: u64 = 2;
    // (case, n, basis exponents, expected (ω_2, ω_4, ω_6))
    let cases: [(&str, u32, [u32; 3], [u64; 3]); 3] = [
        // λ = ω^17 generates F_16 inside F_256 and is not in F_4
        ("III.1", 8, [0, 17, 34], [q + q * q * (q + 1), 0, (q.pow(8) - q.pow(4)) / (q - 1)]),
        ("III.2", 6, [0, 1, 2], [q * (q + 1), q.pow(3) * (q + 1), (q.pow(6) - q.pow(5)) / (q - 1)]),
        // ω^21 generates F_4, ω lies in no proper subfield
        (
            "III.3",
            6,
            [0, 21, 1],
            [
                q,
                q * q * (q + 1) * (q + 1),
                (q.pow(6) - 1) / (q - 1) - q * q * (q + 1) * (q + 1) - q - 1,
            ],
        ),
    ];
    for (case, n, exps, omega) in cases {
        let ctx = build_field(2, 1, n, None).map_err(|e| e.to_string())?;
        let basis: Vec<String> = exps.iter().map(|e| format!("w^{e}")).collect();
        let body = format!("{{\"p\":2,\"h\":1,\"n\":{n}}}\n# case {case}\n{}\n", basis.join("\n"));
        let path = tmp_file(&format!("dim3_{case}.txt"), &body)?;
        let run = cli(&["analyze", path.to_str().unwrap_or_default()])?;
        ensure!(run.code == 0, "{case}: exit code {}", run.code);
        let a = &run.json["payload"]["analysis"];
        ensure!(a["dim3_case"] == case, "{case}: classified as {}", a["dim3_case"]);
        let reported: Vec<u64> = a["profile"]["omega"].as_array().into_iter().flatten().map(u).collect();
        ensure!(reported == omega, "{case}: reported ω {reported:?}, table {omega:?}");
        let gens: Vec<_> = exps.iter().map(|&e| ctx.pow_omega(e as i128)).collect();
        let sub = Subspace::span(&ctx, &gens, 1).map_err(|e| e.to_string())?;
        let brute = brute_omega(&ctx, &sub);
        ensure!(brute == omega, "{case}: brute ω {brute:?}, table {omega:?}");
        if case == "III.2" {
            let f = u(&a["profile"]["f_u"]);
            ensure!(f == (q.pow(5) - 1) / (q - 1), "III.2: f_U = {f}, bound (q^5-1)/(q-1) not attained");
        }
    }
    Ok(())
}

fn oracle(args: &[&str]) -> Result<Value, String> {
    let mut full = vec!["oracle"];
    full.extend_from_slice(args);
    let run = cli(&full)?;
    let p = run.json["payload"].clone();
    ensure!(run.code == 0, "oracle {args:?}: exit code {}", run.code);
    ensure!(p["mismatches"].as_array().is_some_and(|m| m.is_empty()), "oracle {args:?}: {}", p["mismatches"]);
    Ok(p)
}

fn criterion_5(census_a: &Run, census_b: &Run) -> Outcome {
    let p = oracle(&["falpha", "--p", "2", "--k", "3"])?;
    ensure!(u(&p["comparisons"]) == 8 * 63, "falpha comparisons {}", p["comparisons"]);
    oracle(&["falpha", "--p", "3", "--k", "3"])?;

    for args in [
        ["fractions", "--p", "2", "--n", "6", "--dim", "2"],
        ["fractions", "--p", "2", "--n", "6", "--dim", "3"],
        ["fractions", "--p", "3", "--n", "4", "--dim", "2"],
    ] {
        let p = oracle(&args)?;
        ensure!(p["positives"] == p["instances"], "fractions {args:?}: {} of {}", p["positives"], p["instances"]);
    }
    for args in [["fractions", "--p", "3", "--k", "3"], ["fractions", "--p", "2", "--k", "5"]] {
        oracle(&args)?;
    }

    for (pp, rows) in [("2", 8), ("3", 54)] {
        let p = oracle(&["sidon", "--p", pp, "--k", "3"])?;
        ensure!(u(&p["comparisons"]) == rows, "sidon q={pp}: {} rows", p["comparisons"]);
    }
    let p = oracle(&["sidon", "--p", "2", "--n", "5", "--dim", "2"])?;
    ensure!(
        p["positives"] == p["instances"],
        "dim-2 subspaces of F_32: {} of {} Sidon",
        p["positives"],
        p["instances"]
    );

    norm_class_matches_distance(&census_a.json["payload"], 3)?;
    norm_class_matches_distance(&census_b.json["payload"], 5)?;

    let p = oracle(&["shift", "--p", "3", "--k", "3"])?;
    ensure!(u(&p["comparisons"]) == 54 && u(&p["positives"]) == 6, "shift: {p}");

    let p = oracle(&["galois", "--p", "3", "--k", "3"])?;
    ensure!(
        u(&p["comparisons"]) == 54 * 54 * 6 && u(&p["positives"]) == 54 * 6,
        "galois: {} comparisons, {} images placed",
        p["comparisons"],
        p["positives"]
    );
    Ok(())
}

/// Checks that must pass (never be skipped) for the given profile.
fn required_checks(profile: &Value) -> Vec<&'static str> {
    let flags = &profile["flags"];
    let full = flags["full_length"].as_bool() == Some(true);
    let mut req = vec!["weight_sum", "fu_lambda_identity", "duality"];
    if full {
        req.push("bhaintwal");
        if u(&profile["distance"]) > 2 {
            req.push("dimension_bound");
        }
    }
    if flags["quasi_optimal"].as_bool() == Some(true) {
        req.push("quasi_optimal_shape");
        req.push("quasi_optimal_lambda2");
    }
    req
}

fn analyze_gens(p: u32, h: u32, n: u32, gens: &[String]) -> Result<Value, String> {
    let (ps, hs, ns, gs) = (p.to_string(), h.to_string(), n.to_string(), gens.join(","));
    let run = cli(&["analyze", "--p", &ps, "--h", &hs, "--n", &ns, "--gens", &gs])?;
    let payload = run.json["payload"].clone();
    let fails: Vec<String> = payload["analysis"]["checks"]
        .as_array()
        .into_iter()
        .flatten()
        .chain(payload["analysis"]["bounds"].as_array().into_iter().flatten())
        .filter(|c| c["status"] == "fail")
        .map(|c| format!("{}: {}", c["name"], c["detail"]))
        .collect();
    let label = format!("F_{{{p}^{}}} ⟨{gs}⟩", h * n);
    ensure!(fails.is_empty(), "{label}: {fails:?}");
    ensure!(run.code == 0 && payload["all_pass"] == true, "{label}: exit code {}", run.code);
    let profile = &payload["analysis"]["profile"];
    for name in required_checks(profile) {
        let status = payload["analysis"]["checks"]
            .as_array()
            .into_iter()
            .flatten()
            .find(|c| c["name"] == name)
            .map(|c| c["status"].clone());
        ensure!(status == Some(Value::from("pass")), "{label}: {name} is {status:?}");
    }
    Ok(payload)
}

fn basis_strings(ctx: &FieldCtx, s: &Subspace) -> Vec<String> {
    s.ground_basis(ctx).iter().map(|e| e.to_string()).collect()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut analyzed = 0;
    // random subspaces, several fields and dimensions
    for (p, h, n, dims) in [
        (2u32, 1u32, 6u32, 2..=3u32),
        (2, 1, 7, 2..=3),
        (2, 1, 8, 2..=4),
        (3, 1, 4, 2..=2),
        (3, 1, 5, 2..=2),
        (2, 2, 3, 2..=2),
        (5, 1, 3, 2..=2),
    ] {
        let ctx = build_field(p, h, n, None).map_err(|e| e.to_string())?;
        for k in dims {
            for _ in 0..6 {
                let gens: Vec<String> = (0..k)
                    .map(|_| format!("w^{}", rng.random_range(0..ctx.group_order())))
                    .collect();
                analyze_gens(p, h, n, &gens)?;
                analyzed += 1;
            }
        }
    }
    // every U_{s,γ} representative at q = 2 and q = 3 with k = 3
    for p in [2, 3] {
        let fam = UsgFamily::new(p, 1, 3).map_err(|e| e.to_string())?;
        let ctx = build_field(p, 1, 6, None).map_err(|e| e.to_string())?;
        for par in fam.representatives() {
            let s = make_usg(&ctx, par).map_err(|e| e.to_string())?;
            analyze_gens(p, 1, 6, &basis_strings(&ctx, &s))?;
            analyzed += 1;
        }
    }
    // subfields, which are spreads and not full length
    for (p, n, d) in [(2, 6, 2), (2, 6, 3), (3, 4, 2)] {
        let ctx = build_field(p, 1, n, None).map_err(|e| e.to_string())?;
        let s = Subspace::subfield(&ctx, d, 1).map_err(|e| e.to_string())?;
        analyze_gens(p, 1, n, &basis_strings(&ctx, &s))?;
        analyzed += 1;
    }
    ensure!(analyzed > 100, "only {analyzed} subspaces analyzed");
    Ok(())
}

fn criterion_7() -> Outcome {
    let ctx = build_field(2, 2, 4, Some(&[1, 0, 1, 1, 1, 0, 0, 0, 1])).map_err(|e| e.to_string())?;
    let w = ctx.omega();
    let span = |g| Subspace::span(&ctx, &[ctx.one(), g], 2).map_err(|e| e.to_string());
    let (uu, up) = (span(w)?, span(ctx.mul(w, w))?);
    let orbit = |s: &Subspace| -> Result<HashSet<Subspace>, String> {
        ctx.nonzero()
            .map(|a| s.scalar_shift(&ctx, a).map_err(|e| e.to_string()))
            .collect()
    };
    // σ_2 is σ_p with p = 2
    let image: HashSet<Subspace> = orbit(&uu)?
        .iter()
        .map(|v| galois_action_oracle(&ctx, v, 1))
        .collect();
    ensure!(image == orbit(&up)?, "σ_2(Orb(U)) ≠ Orb(U')");
    // Gal(F_256 | F_4) = {σ_4^j} = {σ_2^{2j}}
    for j in 0..4 {
        let psi_u = galois_action_oracle(&ctx, &uu, 2 * j);
        ensure!(
            !orbit_contains(&ctx, &up, &psi_u).map_err(|e| e.to_string())?,
            "σ_4^{j}(U) ∈ Orb(U')"
        );
    }
    Ok(())
}

fn criterion_8() -> Outcome {
    let mut witnesses = 0;
    for p in [2u32, 3] {
        for n in (6..=12u32).step_by(2) {
            let ctx = build_field(p, 1, n, None).map_err(|e| e.to_string())?;
            for k in 3..=n / 2 {
                let wit = existence_construction(&ctx, k).map_err(|e| format!("q={p} n={n} k={k}: {e}"))?;
                let prof = orbit_profile(&ctx, &wit.subspace).map_err(|e| e.to_string())?;
                ensure!(prof.k == k as usize, "q={p} n={n} k={k}: dimension {}", prof.k);
                ensure!(prof.flags.full_length, "q={p} n={n} k={k}: not full length");
                ensure!(
                    prof.distance == Some(2 * k as usize - 4),
                    "q={p} n={n} k={k}: distance {:?}",
                    prof.distance
                );
                witnesses += 1;
            }
        }
    }
    ensure!(witnesses == 2 * (1 + 2 + 3 + 4), "{witnesses} witnesses");
    Ok(())
}

fn main() -> ExitCode {
    let mut results: Vec<(u8, &str, Outcome, Duration)> = Vec::new();
    let mut record = |n: u8, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let r = f();
        let line = match &r {
            Ok(()) => format!("PASS criterion {n}: {name} ({:.2?})", start.elapsed()),
            Err(e) => format!("FAIL criterion {n}: {name}: {e}"),
        };
        println!("{line}");
        results.push((n, name, r, start.elapsed()));
    };

    let brute = |p: &str, k: &str| {
        cli(&["census-usg", "--p", p, "--h", "1", "--k", k, "--verify", "brute", "--threads", "1"])
    };
    let mut census_a = Err("not run".to_string());
    let mut census_b = Err("not run".to_string());
    record(1, "census q=3 k=3, brute verification", &mut || {
        census_a = brute("3", "3");
        criterion_1(census_a.as_ref()?)
    });
    record(2, "census q=2 k=5, brute verification", &mut || {
        census_b = brute("2", "5");
        criterion_2(census_b.as_ref()?)
    });
    record(3, "census q=27 k=4, counts only", &mut criterion_3);
    record(4, "k=3 distribution table at q=2", &mut criterion_4);
    record(5, "oracle equivalence suites", &mut || {
        criterion_5(census_a.as_ref()?, census_b.as_ref()?)
    });
    record(6, "structural invariants on analyzed subspaces", &mut criterion_6);
    record(7, "Frobenius isometry in F_256 over F_4", &mut criterion_7);
    record(8, "existence sweep q in {2,3}, even n <= 12", &mut criterion_8);

    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
