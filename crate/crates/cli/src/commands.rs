use std::fs;
use std::path::Path;

use clap::Parser;
use serde::Deserialize;
use serde_json::{json, Value};

use evlab_core::boolfn::FunctionFile;
use evlab_core::criteria::{
    audit_function, cyclic_audit, isolated_vertex_parity, monotone_audit, weight_polynomial,
};
use evlab_core::det::decision_depth;
use evlab_core::formula::{alternating_tree, nand_tree, parse};
use evlab_core::game::{certificate_product_check, randomized_complexity, CostVector};
use evlab_core::nand::{
    dominant_prediction, eigen_analysis, exact_expected_queries, mc_simulate, recurrence_values,
    worst_case_expectation, MAX_WORST_CASE_K,
};
use evlab_core::packing::{
    bipartite_condition, degree_stats, general_condition, improved_condition, overlap_count,
    pack_by_random_matching, pack_by_swaps_with, pack_exhaustive, pack_exhaustive_general, AnyGraph,
    ImprovedConstants, PackingResult,
};
use evlab_core::props::{lower_bound_pipeline, property_by_name, property_to_function, quadratic_bound_witness};
use evlab_core::rational::{format_q, parse_q, to_f64};
use evlab_core::sw::sw_lower_bound;
use evlab_core::{ExecPolicy, TruthTable};

use crate::report::{render, to_value, CliError, Report};
use crate::{
    AuditArgs, AuditKind, BatchArgs, Cli, Command, DrArgs, FunctionArgs, PackArgs, PackMethod, PipelineArgs,
    RecurrenceArgs, RecurrenceFormat, SimulateArgs, SwArgs,
};

type CliResult<T> = Result<T, CliError>;

/// Closed-form agreement required of the recurrence.
const CLOSED_FORM_TOL: f64 = 1e-9;
/// Relative tolerance on floats derived from exact quantities.
const FLOAT_REL_TOL: f64 = 1e-12;
const GROWTH_TOL: f64 = 1e-3;
const EXPONENT_RANGE: (f64, f64) = (0.7535, 0.7537);

pub enum Output {
    Report(Box<Report>),
    Text(String),
}

pub fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Analyze(_) => "analyze",
        Command::Dr(_) => "dr",
        Command::Simulate(_) => "simulate",
        Command::Swbound(_) => "swbound",
        Command::Pack(_) => "pack",
        Command::Audit(_) => "audit",
        Command::Pipeline(_) => "pipeline",
        Command::Recurrence(_) => "recurrence",
        Command::Batch(_) => "batch",
    }
}

pub fn run(cli: &Cli) -> CliResult<String> {
    Ok(match execute(cli)? {
        Output::Report(r) => render(&r),
        Output::Text(t) => t,
    })
}

fn policy(cli: &Cli) -> ExecPolicy {
    if cli.sequential {
        ExecPolicy::Sequential
    } else {
        ExecPolicy::default()
    }
}

pub fn execute(cli: &Cli) -> CliResult<Output> {
    let p = policy(cli);
    let report = match &cli.command {
        Command::Analyze(a) => analyze(a)?,
        Command::Dr(a) => dr(a)?,
        Command::Simulate(a) => simulate(a, p)?,
        Command::Swbound(a) => swbound(a)?,
        Command::Pack(a) => pack(a)?,
        Command::Audit(a) => audit(a, p)?,
        Command::Pipeline(a) => pipeline(a)?,
        Command::Recurrence(a) => return recurrence(a, p),
        Command::Batch(a) => batch(a, p)?,
    };
    Ok(Output::Report(Box::new(report)))
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::format(format!("cannot read {}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::format(format!(
            "{}: line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

enum Size {
    General(usize),
    Bipartite(usize),
}

fn parse_size(s: &str) -> CliResult<Size> {
    let bad = || CliError::Usage(format!("--size expects `v` or `nxn`, got {s:?}"));
    if let Some((a, b)) = s.split_once('x') {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        if a != b {
            return Err(CliError::Usage(format!("bipartite parts must be equal, got {s}")));
        }
        Ok(Size::Bipartite(a))
    } else {
        Ok(Size::General(s.trim().parse().map_err(|_| bad())?))
    }
}

fn oracle(name: &str, size: &str) -> CliResult<evlab_core::props::PropertyOracle> {
    let o = match parse_size(size)? {
        Size::General(v) => property_by_name(name, v)?,
        Size::Bipartite(n) => property_by_name(name, n)?,
    };
    let bip = matches!(parse_size(size)?, Size::Bipartite(_));
    if o.is_bipartite() != bip {
        return Err(CliError::Usage(format!(
            "property {name} is {} but size {size} is not",
            if o.is_bipartite() { "bipartite" } else { "general" }
        )));
    }
    Ok(o)
}

fn load_function(a: &FunctionArgs) -> CliResult<(TruthTable, Value)> {
    if let Some(text) = &a.formula {
        let f = parse(text)?.to_truth_table()?;
        return Ok((f, json!({ "formula": text })));
    }
    if let Some(path) = &a.table {
        let file: FunctionFile = read_json(path)?;
        return Ok((file.to_table()?, json!({ "table": path.display().to_string() })));
    }
    let name = a.property.as_deref().expect("clap enforces one source");
    let size = a.size.as_deref().expect("clap enforces --size");
    let f = property_to_function(&oracle(name, size)?)?;
    Ok((f, json!({ "property": name, "size": size })))
}

fn analyze(a: &FunctionArgs) -> CliResult<Report> {
    let (f, inputs) = load_function(a)?;
    let n = f.n();
    let rec = audit_function(&f)?;
    let wp = weight_polynomial(&f, rec.depth)?;
    let results = json!({
        "n": n,
        "bits_hex": f.to_hex(),
        "monotone": f.is_monotone(),
        "D": rec.depth,
        "D0": rec.d0,
        "D1": rec.d1,
        "evasive": rec.depth == n,
        "mu": rec.mu,
        "chi": rec.chi,
        "weight_polynomial": {
            "coefficients": to_value(&wp.p),
            "divisor_power": n - rec.depth,
            "divisible": wp.divisible,
            "quotient": to_value(&wp.quotient),
        },
        "mobius": { "strict": rec.mobius_strict, "weak": rec.mobius_weak },
        "ones": f.count_ones(),
        "ones_divisible": rec.ones_divisible,
        "checks_hold": rec.holds(),
        "record": to_value(&rec),
    });
    Ok(Report::new("analyze", inputs, None, json!({}), results))
}

fn dr(a: &DrArgs) -> CliResult<Report> {
    let (f, mut inputs) = load_function(&a.function)?;
    let costs = match &a.costs {
        Some(p) => {
            let c: CostVector = read_json(p)?;
            CostVector::new(c.c0, c.c1)?
        }
        None => CostVector::unit(f.n()),
    };
    let tol = parse_q(&a.tol)?;
    inputs["costs"] = to_value(&costs);
    inputs["max_iter"] = json!(a.max_iter);
    let sol = randomized_complexity(&f, &costs, &tol, a.max_iter)?;
    Ok(Report::new("dr", inputs, None, json!({ "gap": format_q(&tol) }), to_value(&sol)))
}

fn parse_bits(s: &str, n: usize) -> CliResult<Vec<bool>> {
    let bits: Vec<bool> = s
        .chars()
        .enumerate()
        .map(|(i, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(CliError::format(format!("input offset {i}: expected 0 or 1, got {c:?}"))),
        })
        .collect::<CliResult<_>>()?;
    if bits.len() != n {
        return Err(evlab_core::Error::SizeMismatch {
            expected: n,
            got: bits.len(),
        }
        .into());
    }
    Ok(bits)
}

fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn simulate(a: &SimulateArgs, p: ExecPolicy) -> CliResult<Report> {
    let tree = nand_tree(a.k)?;
    let n = tree.max_var();
    let input = match &a.input {
        Some(s) => parse_bits(s, n)?,
        None if a.k <= MAX_WORST_CASE_K => worst_case_expectation(a.k, p)?.witness,
        None => {
            return Err(CliError::Usage(format!(
                "--input is required for k > {MAX_WORST_CASE_K}"
            )))
        }
    };
    let exact = exact_expected_queries(&tree, &input)?;
    let mc = mc_simulate(&tree, &input, a.trials, a.seed, p)?;
    let tol = 3.0 * mc.stderr;
    let err = (mc.mean - to_f64(&exact)).abs();
    let inputs = json!({
        "k": a.k,
        "input": bit_string(&input),
        "input_source": if a.input.is_some() { "argument" } else { "worst_case_witness" },
        "trials": a.trials,
    });
    let results = json!({
        "exact_expectation": format_q(&exact),
        "mc": to_value(&mc),
        "abs_error": err,
        "within_tolerance": err <= tol.max(FLOAT_REL_TOL),
    });
    Ok(Report::new(
        "simulate",
        inputs,
        Some(a.seed),
        json!({ "agreement": "3*stderr", "agreement_abs": tol }),
        results,
    ))
}

fn swbound(a: &SwArgs) -> CliResult<Report> {
    if let Some(text) = &a.formula {
        let b = sw_lower_bound(&parse(text)?)?;
        let results = json!({ "l0": format_q(&b.l0), "l1": format_q(&b.l1), "max": format_q(b.max()) });
        return Ok(Report::new("swbound", json!({ "formula": text }), None, json!({}), results));
    }
    let kmax = a.alternating.expect("clap enforces one shape");
    let rec = recurrence_values(kmax)?;
    let lp = (1.0 + 33f64.sqrt()) / 4.0;
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    let mut prev2: Option<f64> = None;
    for (k, r) in rec.iter().enumerate() {
        let b = sw_lower_bound(&alternating_tree(k)?)?;
        let m = to_f64(b.max());
        let ratio = prev.map(|p| m / p);
        let two_step = prev2.map(|p| (m / p).sqrt());
        let root = (k > 0).then(|| m.powf(1.0 / k as f64));
        rows.push(json!({
            "k": k,
            "l0": format_q(&b.l0),
            "l1": format_q(&b.l1),
            "max": format_q(b.max()),
            "recurrence_max": format_q(r.max()),
            "equals_recurrence": b.max() == r.max(),
            "ratio": ratio,
            "ratio_error": ratio.map(|x| (x - lp).abs()),
            "two_step_ratio": two_step,
            "kth_root": root,
            "kth_root_error": root.map(|x| (x - lp).abs()),
        }));
        prev2 = prev;
        prev = Some(m);
    }
    let last = rows.last().cloned().unwrap_or(Value::Null);
    let results = json!({
        "rows": rows,
        "all_equal_recurrence": rows.iter().all(|r| r["equals_recurrence"] == json!(true)),
        "lambda_plus": lp,
        "growth_at_k": {
            "k": kmax,
            "ratio_error": last["ratio_error"],
            "kth_root_error": last["kth_root_error"],
            "ratio_within_tolerance": last["ratio_error"].as_f64().is_some_and(|e| e <= GROWTH_TOL),
            "kth_root_within_tolerance": last["kth_root_error"].as_f64().is_some_and(|e| e <= GROWTH_TOL),
        },
    });
    Ok(Report::new(
        "swbound",
        json!({ "alternating": kmax }),
        None,
        json!({ "growth": GROWTH_TOL, "float_rel": FLOAT_REL_TOL }),
        results,
    ))
}

fn packing_json(r: &PackingResult, overlaps: Option<usize>) -> Value {
    let mut v = to_value(r);
    if let Some(o) = overlaps {
        v["verified_overlaps"] = json!(o);
    }
    v
}

fn pack(a: &PackArgs) -> CliResult<Report> {
    let g1: AnyGraph = read_json(&a.g1)?;
    let g2: AnyGraph = read_json(&a.g2)?;
    let randomized = matches!(a.method, PackMethod::Swaps | PackMethod::Matching);
    if randomized && a.seed.is_none() {
        return Err(CliError::Usage("--seed is required for randomized packing methods".into()));
    }
    let method = match a.method {
        PackMethod::Swaps => "swaps",
        PackMethod::Exhaustive => "exhaustive",
        PackMethod::Matching => "matching",
        PackMethod::Conditions => "conditions",
    };
    let constants = ImprovedConstants {
        avg_divisor: a.avg_divisor,
        w_divisor: a.w_divisor,
    };
    let mut inputs = json!({
        "g1": a.g1.display().to_string(),
        "g2": a.g2.display().to_string(),
        "method": method,
    });
    let results = match (&g1, &g2) {
        (AnyGraph::Bipartite(b1), AnyGraph::Bipartite(b2)) => {
            inputs["restarts"] = json!(a.restarts);
            inputs["max_tries"] = json!(a.max_tries);
            let outcome = match a.method {
                PackMethod::Swaps => Some(pack_by_swaps_with(b1, b2, a.seed.unwrap(), a.restarts)?),
                PackMethod::Matching => Some(pack_by_random_matching(b1, b2, a.seed.unwrap(), a.max_tries)?),
                PackMethod::Exhaustive => Some(match pack_exhaustive(b1, b2)? {
                    Some((u_perm, w_perm)) => PackingResult::Packed {
                        u_perm,
                        w_perm,
                        attempts: 1,
                    },
                    None => PackingResult::Exhausted { tries: 1 },
                }),
                PackMethod::Conditions => None,
            };
            let verified = match &outcome {
                Some(PackingResult::Packed { u_perm, w_perm, .. }) => Some(overlap_count(b1, b2, u_perm, w_perm)),
                _ => None,
            };
            json!({
                "g1_stats": to_value(&degree_stats(&g1)),
                "g2_stats": to_value(&degree_stats(&g2)),
                "bipartite_condition": to_value(&bipartite_condition(b1, b2)?),
                "improved_condition": to_value(&improved_condition(b1, b2, constants)?),
                "packing": outcome.as_ref().map(|r| packing_json(r, verified)),
            })
        }
        (AnyGraph::General(h1), AnyGraph::General(h2)) => {
            let packing = match a.method {
                PackMethod::Exhaustive => {
                    let found = pack_exhaustive_general(h1, h2)?;
                    Some(json!({ "packs": found.is_some(), "perm": found }))
                }
                PackMethod::Conditions => None,
                _ => {
                    return Err(CliError::Usage(
                        "general graphs support --method exhaustive or conditions".into(),
                    ))
                }
            };
            json!({
                "g1_stats": to_value(&degree_stats(&g1)),
                "g2_stats": to_value(&degree_stats(&g2)),
                "general_condition": to_value(&general_condition(h1, h2)?),
                "packing": packing,
            })
        }
        _ => return Err(CliError::format("graph kinds differ")),
    };
    let seed = if randomized { a.seed } else { None };
    Ok(Report::new(
        "pack",
        inputs,
        seed,
        json!({ "float_rel": FLOAT_REL_TOL, "log": "natural" }),
        results,
    ))
}

fn audit(a: &AuditArgs, p: ExecPolicy) -> CliResult<Report> {
    let (kind, mut results) = match a.kind {
        AuditKind::Monotone => ("monotone", to_value(&monotone_audit(a.n, p)?)),
        AuditKind::Cyclic => ("cyclic", to_value(&cyclic_audit(a.n, p)?)),
        AuditKind::CertificateProduct => {
            let sample = a.sample.map(|c| (c, a.seed.expect("clap enforces --seed")));
            ("certificate-product", to_value(&certificate_product_check(a.n, sample, p)?))
        }
        AuditKind::IsolatedParity => ("isolated-parity", to_value(&isolated_vertex_parity(a.n)?)),
    };
    if a.summary_only {
        if let Some(obj) = results.as_object_mut() {
            obj.remove("records");
        }
    }
    let seed = if a.kind == AuditKind::CertificateProduct { a.seed } else { None };
    Ok(Report::new(
        "audit",
        json!({ "kind": kind, "n": a.n, "sample": a.sample, "summary_only": a.summary_only }),
        seed,
        json!({}),
        results,
    ))
}

fn pipeline(a: &PipelineArgs) -> CliResult<Report> {
    let o = oracle(&a.property, &a.size)?;
    let inputs = json!({ "property": a.property, "size": a.size });
    let results = match parse_size(&a.size)? {
        Size::Bipartite(_) => {
            let mut v = to_value(&lower_bound_pipeline(&o)?);
            if o.edge_variables() <= 9 {
                let f = property_to_function(&o)?;
                v["decision_depth"] = json!({
                    "edge_variables": f.n(),
                    "D": decision_depth(&f)?.depth,
                });
            }
            v
        }
        Size::General(v) => to_value(&quadratic_bound_witness(&o, v)?),
    };
    Ok(Report::new(
        "pipeline",
        inputs,
        None,
        json!({ "float_rel": FLOAT_REL_TOL }),
        results,
    ))
}

fn recurrence(a: &RecurrenceArgs, p: ExecPolicy) -> CliResult<Output> {
    let rec = recurrence_values(a.k)?;
    let worst: Vec<Option<String>> = (0..=a.k)
        .map(|k| {
            (k <= MAX_WORST_CASE_K)
                .then(|| worst_case_expectation(k, p).map(|w| format_q(&w.value)))
                .transpose()
        })
        .collect::<Result<_, _>>()?;
    if a.format == RecurrenceFormat::Csv {
        let mut out = String::from("k,a_k,b_k,worst_case,lambda_prediction");
        for (r, w) in rec.iter().zip(&worst) {
            out.push_str(&format!(
                "\n{},{},{},{},{}",
                r.k,
                format_q(&r.a),
                format_q(&r.b),
                w.clone().unwrap_or_default(),
                dominant_prediction(r.k)
            ));
        }
        return Ok(Output::Text(out));
    }
    let eigen = eigen_analysis(a.k)?;
    let values: Vec<Value> = rec
        .iter()
        .zip(&worst)
        .map(|(r, w)| {
            let cmp = w.as_ref().map(|w| {
                let wq = parse_q(w).expect("own formatting");
                if r.k < MAX_WORST_CASE_K {
                    json!(&wq == r.max())
                } else {
                    json!(&wq <= r.max())
                }
            });
            json!({
                "k": r.k,
                "a": format_q(&r.a),
                "b": format_q(&r.b),
                "max": format_q(r.max()),
                "worst_case": w,
                "worst_case_check": cmp,
                "lambda_prediction": dominant_prediction(r.k),
            })
        })
        .collect();
    let (lo, hi) = EXPONENT_RANGE;
    let results = json!({
        "values": values,
        "eigen": to_value(&eigen),
        "closed_form": {
            "max_abs_error": eigen.exact_max_abs_error,
            "within_tolerance": eigen.exact_max_abs_error <= CLOSED_FORM_TOL,
        },
        "exponent": {
            "value": eigen.exponent,
            "range": [lo, hi],
            "within_range": (lo..=hi).contains(&eigen.exponent),
            "reference": "0.754",
            "rounds_to_reference": format!("{:.3}", eigen.exponent) == "0.754",
        },
    });
    Ok(Output::Report(Box::new(Report::new(
        "recurrence",
        json!({ "k": a.k }),
        None,
        json!({ "closed_form_abs": CLOSED_FORM_TOL, "float_rel": FLOAT_REL_TOL }),
        results,
    ))))
}

#[derive(Debug, Deserialize)]
struct Manifest {
    jobs: Vec<Job>,
}

#[derive(Debug, Clone, Deserialize)]
struct Job {
    args: Vec<String>,
}

fn run_job(job: &Job) -> Value {
    let argv = std::iter::once("evlab".to_string()).chain(job.args.iter().cloned());
    let outcome = match Cli::try_parse_from(argv) {
        Err(e) => Err(CliError::Usage(e.render().to_string().trim().to_string())),
        Ok(cli) if matches!(cli.command, Command::Batch(_)) => {
            Err(CliError::Usage("batch jobs cannot nest batch".into()))
        }
        Ok(cli) => execute(&cli),
    };
    match outcome {
        Ok(Output::Report(r)) => json!({ "args": job.args, "status": "ok", "exit_code": 0, "report": to_value(&r) }),
        Ok(Output::Text(t)) => json!({ "args": job.args, "status": "ok", "exit_code": 0, "text": t }),
        Err(e) => json!({ "args": job.args, "status": "error", "exit_code": e.exit_code(), "error": e.to_value() }),
    }
}

fn batch(a: &BatchArgs, p: ExecPolicy) -> CliResult<Report> {
    let manifest: Manifest = read_json(&a.manifest)?;
    let records = p.map(&manifest.jobs, run_job);
    let failed = records.iter().filter(|r| r["status"] == "error").count();
    let results = json!({
        "jobs": records.len(),
        "succeeded": records.len() - failed,
        "failed": failed,
        "records": records,
    });
    Ok(Report::new(
        "batch",
        json!({ "manifest": a.manifest.display().to_string() }),
        None,
        json!({}),
        results,
    ))
}
