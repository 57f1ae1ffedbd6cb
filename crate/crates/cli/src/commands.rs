use std::path::Path;
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::BigRational;
use schreier_core::banach::{
    constant_growth_table, greedy_constant, growth_table_csv, parse_vector, uncond_constant, vector_from_json,
    Family, GreedyMode, GreedyOptions, NormSpec, UncondRoute, Vector,
};
use schreier_core::checks::{run_checks, CheckConfig, CHECK_NAMES};
use schreier_core::ordtree::{build_graph_bounded, f_table, f_table_csv, DEFAULT_VERTEX_BOUND};
use schreier_core::policy::{check_chain_inclusion, interval_gap_scan, uniform_bound_check, validate_policy};
use schreier_core::schreier::{FamilyEnumerator, SchreierEngine};
use schreier_core::{export_dot, FEvaluator, FinSet, FundSeqPolicy, GValue, GrowthFn, SchreierHandle};
use serde_json::{json, Value};

use crate::output::{self, float};
use crate::settings::{self, Fail, EXIT_BOUND, EXIT_CHECKS, EXIT_OK};
use crate::{Cli, Command, ConstantsArgs, Format, ModeArg, PolicyCheck, RouteArg, TableKind};

/// What a command prints and the exit code it settles on.
struct Outcome {
    stdout: String,
    code: u8,
    /// Printed to stderr after the output.
    note: Option<String>,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: EXIT_OK, note: None }
    }

    fn with_code(stdout: String, code: u8) -> Self {
        Outcome { stdout, code, note: None }
    }
}

pub fn run(cli: Cli) -> Result<u8, Fail> {
    let g = &cli.global;
    let format = resolve_format(&cli.command, g.format)?;
    let policy = settings::policy(g.policy.as_deref())?;
    let out = match cli.command {
        Command::Member { set, alpha, witness } => member(&set, &alpha, witness, &policy, format)?,
        Command::Decompose { set, alpha } => decompose(&set, &alpha, &policy, format)?,
        Command::Enumerate { alpha, n, maximal } => enumerate(&alpha, n, maximal, g.bound, &policy, format)?,
        Command::Table { kind, alpha, n } => table(kind, &alpha, &n, g.g_cap, &policy, format)?,
        Command::Graph { n, alpha } => graph(n, &alpha, &policy, format)?,
        Command::Separation { alpha, beta, scan } => separation(&alpha, &beta, scan, &policy, format)?,
        Command::PolicyCheck { check } => policy_check(check, g.g_cap, &policy, format)?,
        Command::Constants(args) => constants(&args, &policy, format)?,
        Command::Verify { names } => verify(&names, g.seed, g.timing, g.g_cap, &policy, format)?,
    };
    print!("{}", out.stdout);
    if let Some(note) = out.note {
        eprintln!("{note}");
    }
    Ok(out.code)
}

/// The default format per command, and which formats each command accepts.
fn resolve_format(cmd: &Command, requested: Option<Format>) -> Result<Format, Fail> {
    use Format::*;
    let (default, allowed): (Format, &[Format]) = match cmd {
        Command::Member { .. } | Command::Decompose { .. } | Command::Separation { .. } | Command::Graph { .. } => {
            (Text, &[Text, Json])
        }
        Command::PolicyCheck { check: PolicyCheck::Gaps { .. } } => (Text, &[Text, Json, Csv]),
        Command::PolicyCheck { .. } => (Text, &[Text, Json]),
        Command::Enumerate { .. } => (Text, &[Text, Json, Csv]),
        Command::Table { .. } | Command::Constants(_) => (Csv, &[Text, Json, Csv]),
        Command::Verify { .. } => (Json, &[Text, Json, Csv]),
    };
    let f = requested.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(Fail::usage(format!("--format {f:?} is not available for this command").to_lowercase()));
    }
    Ok(f)
}

fn member(set: &str, alpha: &str, witness: bool, policy: &FundSeqPolicy, format: Format) -> Result<Outcome, Fail> {
    let set = settings::finset(set)?;
    let alpha = settings::ordinal(alpha)?;
    let h = SchreierHandle::new(alpha.clone(), policy.clone());
    let is_member = h.member(&set);
    let cert = if witness && is_member { Some(h.decompose(&set)?) } else { None };
    Ok(Outcome::ok(match format {
        Format::Json => {
            let mut v = json!({ "alpha": alpha, "set": set, "member": is_member });
            if let Some(c) = &cert {
                v["witness"] = serde_json::to_value(c).map_err(|e| Fail::internal(e.to_string()))?;
            }
            output::json(&v)?
        }
        _ => {
            let mut s = format!("{is_member}\n");
            if let Some(c) = &cert {
                s += &c.to_text();
            }
            s
        }
    }))
}

fn decompose(set: &str, alpha: &str, policy: &FundSeqPolicy, format: Format) -> Result<Outcome, Fail> {
    let set = settings::finset(set)?;
    let alpha = settings::ordinal(alpha)?;
    let cert = SchreierHandle::new(alpha, policy.clone()).decompose(&set)?;
    Ok(Outcome::ok(match format {
        Format::Json => output::json(&cert)?,
        _ => cert.to_text(),
    }))
}

fn enumerate(
    alpha: &str,
    n: u64,
    maximal: bool,
    bound: u64,
    policy: &FundSeqPolicy,
    format: Format,
) -> Result<Outcome, Fail> {
    let alpha = settings::ordinal(alpha)?;
    let mut en = FamilyEnumerator::with_bound(n, policy.clone(), bound)?;
    let table = en.family(&alpha)?;
    let sets: Vec<FinSet> = if maximal {
        let mut m = table.maximal_members();
        m.sort();
        m
    } else {
        table.to_sets().into_iter().collect()
    };
    Ok(Outcome::ok(match format {
        Format::Json => output::json(&json!({
            "alpha": alpha,
            "window": n,
            "maximal_only": maximal,
            "count": sets.len(),
            "sets": sets,
        }))?,
        Format::Csv => output::csv(&["set"], sets.iter().map(|s| [s.to_string()]))?,
        Format::Text => sets.iter().map(|s| format!("{s}\n")).collect(),
    }))
}

fn table(kind: TableKind, alphas: &[String], n: &str, g_cap: u64, policy: &FundSeqPolicy, format: Format) -> Result<Outcome, Fail> {
    let alphas = settings::ordinals(alphas)?;
    let ns = settings::n_range(n)?;
    match kind {
        TableKind::F => {
            let rows = f_table(&FEvaluator::new(policy.clone()), &alphas, ns);
            Ok(Outcome::ok(match format {
                Format::Json => output::json(&rows)?,
                Format::Csv => f_table_csv(&rows)?,
                Format::Text => {
                    let cells: Vec<Vec<String>> =
                        rows.iter().map(|r| vec![r.alpha.to_string(), r.n.to_string(), r.f.to_string()]).collect();
                    output::text_table(&["alpha", "n", "F"], &cells)
                }
            }))
        }
        TableKind::G => {
            let cap = BigUint::from(g_cap);
            let engine = Arc::new(SchreierEngine::new(policy.clone()));
            let mut rows = Vec::new();
            for a in &alphas {
                let h = SchreierHandle::with_engine(a.clone(), Arc::clone(&engine));
                for &n in &ns {
                    rows.push((a.clone(), n, h.g_value(n, &cap)?));
                }
            }
            let overflow = rows.iter().any(|r| r.2 == GValue::Overflow);
            let stdout = match format {
                Format::Json => {
                    let v: Vec<Value> = rows
                        .iter()
                        .map(|(a, n, g)| json!({ "alpha": a, "n": n, "G": g.to_u64(), "overflow": *g == GValue::Overflow }))
                        .collect();
                    output::json(&v)?
                }
                Format::Csv => output::csv(&["alpha", "n", "G"], rows.iter().map(|(a, n, g)| [a.to_string(), n.to_string(), g.to_string()]))?,
                Format::Text => {
                    let cells: Vec<Vec<String>> =
                        rows.iter().map(|(a, n, g)| vec![a.to_string(), n.to_string(), g.to_string()]).collect();
                    output::text_table(&["alpha", "n", "G"], &cells)
                }
            };
            if overflow {
                let note = Some(format!("error: some values of G exceed the cap {g_cap}"));
                return Ok(Outcome { stdout, code: EXIT_BOUND, note });
            }
            Ok(Outcome::ok(stdout))
        }
    }
}

fn graph(n: u64, alpha: &str, policy: &FundSeqPolicy, format: Format) -> Result<Outcome, Fail> {
    let alpha = settings::ordinal(alpha)?;
    if n == 0 {
        return Err(Fail::usage("--n must be at least 1"));
    }
    let g = build_graph_bounded(n, &alpha, policy, DEFAULT_VERTEX_BOUND)?;
    Ok(Outcome::ok(match format {
        Format::Json => output::json(&g)?,
        _ => export_dot(&g),
    }))
}

fn separation(alpha: &str, beta: &str, scan: u64, policy: &FundSeqPolicy, format: Format) -> Result<Outcome, Fail> {
    let alpha = settings::ordinal(alpha)?;
    let beta = settings::ordinal(beta)?;
    if scan == 0 {
        return Err(Fail::usage("--scan must be at least 1"));
    }
    let sep = FEvaluator::new(policy.clone()).find_separation(&alpha, &beta, scan)?;
    Ok(Outcome::ok(match format {
        Format::Json => output::json(&json!({ "alpha": alpha, "beta": beta, "scan": scan, "separation": sep }))?,
        _ => match sep {
            Some(n0) => format!("F(n,{alpha}) < F(n,{beta}) for {n0} < n <= {scan}\n"),
            None => format!("no separation: F(n,{alpha}) >= F(n,{beta}) at n = {scan}\n"),
        },
    }))
}

fn policy_check(check: PolicyCheck, g_cap: u64, policy: &FundSeqPolicy, format: Format) -> Result<Outcome, Fail> {
    match check {
        PolicyCheck::Chain { beta, m_max, window } => {
            let beta = settings::ordinal(&beta)?;
            let r = check_chain_inclusion(policy, &beta, m_max, window)?;
            Ok(Outcome::ok(match format {
                Format::Json => output::json(&json!({ "report": r, "all_hold": r.all_hold() }))?,
                _ => {
                    let mut s = format!("policy {} at {} inside {{1..{}}}\n", r.policy, r.beta, r.window);
                    for st in &r.steps {
                        let cx: Vec<String> = st.counterexamples.iter().map(|c| c.to_string()).collect();
                        s += &format!("m={} S_{} <= S_{}: {}", st.m, st.from, st.to, st.holds);
                        if !cx.is_empty() {
                            s += &format!("  missing {}", cx.join(" "));
                        }
                        s.push('\n');
                    }
                    s
                }
            }))
        }
        PolicyCheck::Gaps { alphas, n_max } => {
            let alphas = settings::ordinals(&alphas)?;
            let rows = interval_gap_scan(&alphas, policy, n_max, &BigUint::from(g_cap))?;
            let opt = |v: &Option<BigUint>| v.as_ref().map_or_else(|| "overflow".to_string(), |x| x.to_string());
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        opt(&r.max_g),
                        r.argmax.as_ref().map_or_else(String::new, |a| a.to_string()),
                        opt(&r.gap_end),
                        r.confirmed_by_membership.to_string(),
                    ]
                })
                .collect();
            let header = ["n", "max_G", "argmax", "gap_end", "confirmed"];
            Ok(Outcome::ok(match format {
                Format::Json => output::json(&rows)?,
                Format::Csv => output::csv(&header, cells)?,
                Format::Text => output::text_table(&header, &cells),
            }))
        }
        PolicyCheck::Bound { family, g } => {
            let family: Vec<GrowthFn> = settings::read_json(&family)?;
            let g: GrowthFn = settings::read_json(&g)?;
            let r = uniform_bound_check(&family, &g);
            Ok(Outcome::ok(match format {
                Format::Json => output::json(&json!({ "report": r, "uniformly_bounded": r.uniformly_bounded() }))?,
                _ => {
                    let mut s = format!("length {}: uniformly bounded {}\n", r.length, r.uniformly_bounded());
                    for (i, v) in r.verdicts.iter().enumerate() {
                        s += &format!("h{}: {}\n", i + 1, serde_json::to_string(v).map_err(|e| Fail::internal(e.to_string()))?);
                    }
                    s
                }
            }))
        }
        PolicyCheck::Validate { beta, m_max } => {
            let beta = settings::ordinal(&beta)?;
            if !beta.is_limit() {
                return Err(Fail::usage(format!("{beta} is not a limit ordinal")));
            }
            let verdict = validate_policy(policy, &beta, m_max);
            let reason = verdict.as_ref().err().map(|e| e.to_string());
            let stdout = match format {
                Format::Json => output::json(&json!({
                    "policy": policy.name(), "beta": beta, "m_max": m_max, "valid": reason.is_none(), "reason": reason,
                }))?,
                _ => match &reason {
                    None => format!("valid: {} at {beta} for m <= {m_max}\n", policy.name()),
                    Some(r) => format!("invalid: {r}\n"),
                },
            };
            Ok(Outcome::with_code(stdout, if reason.is_none() { EXIT_OK } else { EXIT_CHECKS }))
        }
    }
}

fn norm_spec(text: &str, window: u64, policy: &FundSeqPolicy) -> Result<NormSpec, Fail> {
    match text {
        "summing" => Ok(NormSpec::summing(window)),
        "sup" => Ok(NormSpec::sup(window)),
        _ => match text.strip_prefix("schreier:") {
            Some(a) => Ok(NormSpec::schreier(settings::ordinal(a)?, policy.clone(), window)),
            None => Err(Fail::usage(format!("norm {text:?}: expected summing, sup or schreier:ALPHA"))),
        },
    }
}

fn load_vectors(file: Option<&Path>, literals: &[String]) -> Result<Vec<Vector<f64>>, Fail> {
    let mut out = Vec::new();
    if let Some(path) = file {
        let list: Vec<Value> = settings::read_json(path)?;
        for v in &list {
            out.push(vector_from_json(v)?);
        }
    }
    for lit in literals {
        out.push(parse_vector(lit)?);
    }
    Ok(out)
}

fn validate_constants(a: &ConstantsArgs) -> Result<(), Fail> {
    let reject = |cond: bool, msg: &str| if cond { Err(Fail::usage(msg.to_string())) } else { Ok(()) };
    if a.growth {
        reject(a.alphas.is_empty() || a.ns.is_empty(), "--growth needs --alphas and --ns")?;
        reject(
            a.family.is_some() || a.window.is_some() || a.vectors.is_some() || !a.vector.is_empty(),
            "--growth uses the standard witness vectors; drop --family, --window and vectors",
        )?;
        reject(a.greedy.is_some() || a.mode.is_some() || a.non_strict, "--growth does not take greedy options")?;
        reject(a.exact || a.route.is_some(), "--growth does not take --exact or --route")?;
        reject(a.ns.contains(&0), "--ns entries must be at least 1")?;
        return Ok(());
    }
    reject(!a.alphas.is_empty() || !a.ns.is_empty(), "--alphas and --ns need --growth")?;
    reject(a.family.is_none(), "--family is required")?;
    reject(a.window.is_none_or(|w| w == 0), "--window must be at least 1")?;
    reject(a.vectors.is_none() && a.vector.is_empty(), "give --vectors FILE or --vector LITERAL")?;
    match a.greedy {
        Some(_) => {
            reject(a.exact, "--exact applies to unconditional constants only")?;
            reject(a.route.is_some(), "--route applies to unconditional constants only")?;
        }
        None => reject(a.mode.is_some() || a.non_strict, "--mode and --non-strict need --greedy")?,
    }
    Ok(())
}

fn constants(a: &ConstantsArgs, policy: &FundSeqPolicy, format: Format) -> Result<Outcome, Fail> {
    validate_constants(a)?;
    const HEADER: [&str; 5] = ["alpha", "N", "constant", "mode", "witness"];

    if a.growth {
        let spec = norm_spec(&a.norm, 1, policy)?;
        let alphas = settings::ordinals(&a.alphas)?;
        let rows = constant_growth_table(&spec, &alphas, &a.ns, policy)?;
        return Ok(Outcome::ok(match format {
            Format::Json => output::json(&rows)?,
            Format::Csv => growth_table_csv(&rows)?,
            Format::Text => {
                let cells: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| vec![r.alpha.to_string(), r.n.to_string(), r.constant.to_string(), r.mode.clone(), r.witness.clone()])
                    .collect();
                output::text_table(&HEADER, &cells)
            }
        }));
    }

    let window = a.window.expect("validated");
    let spec = norm_spec(&a.norm, window, policy)?;
    let fam_text = a.family.as_deref().expect("validated");
    let family = match fam_text {
        "all" => Family::All,
        lit => Family::Schreier(SchreierHandle::new(settings::ordinal(lit)?, policy.clone())),
    };
    let fam_label = match &family {
        Family::All => "all".to_string(),
        Family::Schreier(h) => h.alpha().to_string(),
    };
    let vectors = load_vectors(a.vectors.as_deref(), &a.vector)?;
    for x in &vectors {
        x.check_window(window)?;
    }

    let mut cells = Vec::new();
    let mut details = Vec::new();
    for (i, x) in vectors.iter().enumerate() {
        let tag = format!("x{}", i + 1);
        if let Some(m) = a.greedy {
            let mode = match a.mode {
                Some(ModeArg::Optimize) => GreedyMode::Optimize,
                _ => GreedyMode::Projection,
            };
            let r = greedy_constant(x, m, &family, &spec, GreedyOptions { mode, strict: !a.non_strict })?;
            cells.push(vec![
                fam_label.clone(),
                window.to_string(),
                r.constant.to_string(),
                format!("greedy_{}", mode.name()),
                format!("{tag} Lambda={} A={}", r.lambda, r.approximant),
            ]);
            details.push(json!({
                "vector": i + 1, "x": x, "family": family.name(), "norm": spec.name(), "window": window,
                "kind": "greedy", "m": m, "constant": float(r.constant), "numerator": float(r.numerator),
                "denominator": float(r.denominator), "lambda": r.lambda, "approximant": r.approximant,
                "mode": mode.name(), "strict": r.strict, "truncated": r.truncated,
            }));
        } else {
            let route = match a.route {
                Some(RouteArg::Enumeration) => UncondRoute::Enumeration,
                _ => UncondRoute::Auto,
            };
            let (constant, norm_x, witness, route_name, json_constant) = if a.exact {
                let r = uncond_constant::<BigRational>(&x.to_rational(), &family, &spec, route)?;
                let c = r.constant.to_string();
                (c.clone(), r.norm.to_string(), r.witness, r.route, Value::from(c))
            } else {
                let r = uncond_constant(x, &family, &spec, route)?;
                (r.constant.to_string(), r.norm.to_string(), r.witness, r.route, float(r.constant))
            };
            cells.push(vec![fam_label.clone(), window.to_string(), constant, route_name.to_string(), format!("{tag} A={witness}")]);
            details.push(json!({
                "vector": i + 1, "x": x, "family": family.name(), "norm": spec.name(), "window": window,
                "kind": "unconditional", "constant": json_constant, "norm_x": norm_x, "witness": witness,
                "route": route_name, "exact": a.exact,
            }));
        }
    }
    Ok(Outcome::ok(match format {
        Format::Json => output::json(&details)?,
        Format::Csv => output::csv(&HEADER, cells)?,
        Format::Text => output::text_table(&HEADER, &cells),
    }))
}

fn verify(
    names: &[String],
    seed: u64,
    timing: bool,
    g_cap: u64,
    policy: &FundSeqPolicy,
    format: Format,
) -> Result<Outcome, Fail> {
    let selected: Vec<&str> = if names.is_empty() || names.iter().any(|n| n == "all") {
        CHECK_NAMES.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    if let Some(bad) = selected.iter().find(|n| !CHECK_NAMES.contains(n)) {
        return Err(Fail::usage(format!("unknown check {bad:?}; known: all, {}", CHECK_NAMES.join(", "))));
    }
    let cfg = CheckConfig { policy: policy.clone(), seed, timing, g_cap: BigUint::from(g_cap) };
    let campaign = run_checks(&selected, &cfg)?;
    let stdout = match format {
        Format::Json => output::json(&campaign)?,
        Format::Csv => output::csv(
            &["check", "cells", "failing"],
            campaign.checks.iter().map(|c| [c.check.clone(), c.cells.len().to_string(), c.failures().to_string()]),
        )?,
        Format::Text => {
            let cells: Vec<Vec<String>> = campaign
                .checks
                .iter()
                .map(|c| vec![c.check.clone(), c.cells.len().to_string(), c.failures().to_string()])
                .collect();
            let mut s = output::text_table(&["check", "cells", "failing"], &cells);
            s += &format!("total {} cells, {} failing\n", campaign.total_cells, campaign.failing_cells);
            s
        }
    };
    Ok(Outcome::with_code(stdout, if campaign.passed() { EXIT_OK } else { EXIT_CHECKS }))
}
