use std::collections::BTreeMap;
use std::path::Path;

use contextuality::bertrand::{analytic_probability, estimate_probability, BertrandProtocol};
use contextuality::collision::{
    analytic_correlation, run_experiment, run_triple, CollisionConfig, DetectorAssignment,
};
use contextuality::hv::{
    anticorrelated_coin, deterministic_strategy_chsh, simulate_bell_protocol,
    simulate_coincidence, ContextualModel, FiniteNoncontextualModel, HiddenVariableModel,
};
use contextuality::hv::file::model_from_json;
use contextuality::marginal::chsh_facets;
use contextuality::marginal::json::{problem_from_json, SolutionDoc};
use contextuality::marginal::solve;
use contextuality::rational::{from_f64, to_f64};
use contextuality::{Estimate, PairSampleSummary, SeededStream};
use serde_json::{json, Value};

use crate::output::{cell, num, Report};

type CmdResult = Result<Report, String>;

pub struct RunContext {
    pub seed: u64,
    pub n: u64,
}

impl RunContext {
    fn stream(&self) -> SeededStream {
        SeededStream::new(self.seed)
    }
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

pub fn load_model(path: &Path) -> Result<HiddenVariableModel, String> {
    model_from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn estimate_json(e: &Estimate) -> Value {
    json!({ "estimate": num(e.value), "stderr": num(e.stderr) })
}

pub fn bertrand(ctx: &RunContext, protocol: Option<BertrandProtocol>) -> CmdResult {
    let chosen: Vec<(usize, BertrandProtocol)> = BertrandProtocol::ALL
        .into_iter()
        .enumerate()
        .filter(|(_, p)| protocol.is_none_or(|q| q == *p))
        .collect();
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for (index, p) in chosen {
        let analytic = analytic_probability(p);
        let target = *analytic.numer() as f64 / *analytic.denom() as f64;
        let est = estimate_probability(p, ctx.n, &ctx.stream().derive(index as u64)).map_err(err)?;
        let z = est.z_score(target).unwrap_or(f64::NAN);
        results.push(json!({
            "protocol": p.name(),
            "analytic": analytic.to_string(),
            "estimate": num(est.value),
            "stderr": num(est.stderr),
            "z": num(z),
        }));
        rows.push(vec![
            p.name().to_string(),
            analytic.to_string(),
            cell(est.value),
            cell(est.stderr),
            cell(z),
        ]);
    }
    let json = if protocol.is_some() {
        let mut single = results.pop().expect("one protocol");
        let obj = single.as_object_mut().expect("object");
        obj.insert("n".into(), json!(ctx.n));
        obj.insert("seed".into(), json!(ctx.seed));
        single
    } else {
        json!({ "n": ctx.n, "seed": ctx.seed, "results": results })
    };
    Ok(Report {
        json,
        header: vec!["protocol", "analytic", "estimate", "stderr", "z"],
        rows,
    })
}

fn pair_json(label: &str, s: &PairSampleSummary, analytic: f64) -> Result<(Value, Vec<String>), String> {
    let est = s.correlation().map_err(err)?;
    let json = json!({
        "pair": label,
        "estimate": num(est.value),
        "stderr": num(est.stderr),
        "discordant": s.discordant(),
        "analytic": num(analytic),
    });
    let row = vec![
        label.to_string(),
        cell(est.value),
        cell(est.stderr),
        s.discordant().to_string(),
        cell(analytic),
    ];
    Ok((json, row))
}

fn config_json(cfg: &CollisionConfig, ctx: &RunContext) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("density".into(), json!(cfg.speed_density().to_string()));
    m.insert("restitution".into(), num(cfg.restitution()));
    m.insert("light_mass".into(), num(cfg.light_mass()));
    m.insert("heavy_mass".into(), num(cfg.heavy_mass()));
    m.insert("n".into(), json!(ctx.n));
    m.insert("seed".into(), json!(ctx.seed));
    m
}

pub fn collision(ctx: &RunContext, pair: Option<DetectorAssignment>, cfg: &CollisionConfig) -> CmdResult {
    let header = vec!["pair", "estimate", "stderr", "discordant", "analytic"];
    let mut obj = config_json(cfg, ctx);
    if let Some(assignment) = pair {
        let s = run_experiment(cfg, &assignment, ctx.n, &ctx.stream()).map_err(err)?;
        let (j, row) = pair_json(&assignment.to_string(), &s, analytic_correlation(cfg, &assignment))?;
        for (k, v) in j.as_object().expect("object") {
            obj.insert(k.clone(), v.clone());
        }
        return Ok(Report {
            json: Value::Object(obj),
            header,
            rows: vec![row],
        });
    }
    let triple = run_triple(cfg, ctx.n, &ctx.stream()).map_err(err)?;
    let mut pairs = Vec::new();
    let mut rows = Vec::new();
    for (label, s) in [("A:B", &triple.ab), ("A:C", &triple.ac), ("B:C", &triple.bc)] {
        let assignment: DetectorAssignment = label.parse()?;
        let (j, row) = pair_json(label, s, analytic_correlation(cfg, &assignment))?;
        pairs.push(j);
        rows.push(row);
    }
    let r = &triple.report;
    obj.insert("pairs".into(), Value::Array(pairs));
    obj.insert(
        "bell".into(),
        json!({
            "lhs": num(r.lhs),
            "rhs_plus": num(r.rhs_plus),
            "rhs_minus": num(r.rhs_minus),
            "violated_plus": r.violated_plus,
            "violated_minus": r.violated_minus,
            "margin": num(r.margin),
        }),
    );
    Ok(Report {
        json: Value::Object(obj),
        header,
        rows,
    })
}

pub fn chsh_singlet(ctx: &RunContext, angles_deg: [f64; 4]) -> CmdResult {
    let [a1, a2, b1, b2] = angles_deg.map(f64::to_radians);
    let model = HiddenVariableModel::from(ContextualModel::singlet(&[(0, a1), (1, a2)], &[(0, b1), (1, b2)]));
    let mut head = serde_json::Map::new();
    head.insert("source".into(), json!("singlet"));
    head.insert("angles_deg".into(), Value::Array(angles_deg.iter().map(|&a| num(a)).collect()));
    chsh_report(ctx, &model, [0, 1, 0, 1], head)
}

pub fn chsh_model(ctx: &RunContext, model: &HiddenVariableModel, settings: Option<[u32; 4]>) -> CmdResult {
    let settings = match settings {
        Some(s) => s,
        None => {
            let (sa, sb) = (model.settings_a(), model.settings_b());
            if sa.len() < 2 || sb.len() < 2 {
                return Err("model needs two settings on each wing for CHSH".into());
            }
            [sa[0], sa[1], sb[0], sb[1]]
        }
    };
    let mut head = serde_json::Map::new();
    head.insert("source".into(), json!("model"));
    chsh_report(ctx, model, settings, head)
}

fn chsh_report(
    ctx: &RunContext,
    model: &HiddenVariableModel,
    [x1, x2, y1, y2]: [u32; 4],
    mut obj: serde_json::Map<String, Value>,
) -> CmdResult {
    let cells = [(x1, y1), (x1, y2), (x2, y1), (x2, y2)];
    let mut estimates = Vec::new();
    let mut exact = Vec::new();
    for (k, &(x, y)) in cells.iter().enumerate() {
        let s = simulate_coincidence(model, x, y, ctx.n, &ctx.stream().derive(k as u64)).map_err(err)?;
        estimates.push(s.correlation().map_err(err)?);
        exact.push(model.exact_correlation(x, y).map_err(err)?);
    }
    let signs = [1.0, -1.0, 1.0, 1.0];
    let s: f64 = estimates.iter().zip(signs).map(|(e, c)| c * e.value).sum();
    let s_exact: f64 = exact.iter().zip(signs).map(|(e, c)| c * e).sum();
    let s_stderr = estimates.iter().map(|e| e.stderr * e.stderr).sum::<f64>().sqrt();

    let table = [0, 1, 2, 3].map(|k| from_f64(estimates[k].value).expect("finite estimate"));
    let facets: Vec<Value> = chsh_facets(&table)
        .iter()
        .map(|(ineq, slack)| json!({ "inequality": ineq.to_string(), "slack": num(to_f64(slack)) }))
        .collect();

    obj.insert("settings".into(), json!([x1, x2, y1, y2]));
    obj.insert("n".into(), json!(ctx.n));
    obj.insert("seed".into(), json!(ctx.seed));
    obj.insert(
        "correlations".into(),
        Value::Array(
            cells
                .iter()
                .zip(&estimates)
                .zip(&exact)
                .map(|((&(x, y), e), &ex)| {
                    json!({ "x": x, "y": y, "estimate": num(e.value), "stderr": num(e.stderr), "exact": num(ex) })
                })
                .collect(),
        ),
    );
    obj.insert("s".into(), num(s));
    obj.insert("s_stderr".into(), num(s_stderr));
    obj.insert("s_exact".into(), num(s_exact));
    obj.insert("bound".into(), json!(2));
    obj.insert("exceeds_bound".into(), json!(s.abs() - 2.0 > 5.0 * s_stderr));
    obj.insert("facets".into(), Value::Array(facets));

    let mut rows: Vec<Vec<String>> = cells
        .iter()
        .zip(&estimates)
        .zip(&exact)
        .map(|((&(x, y), e), &ex)| {
            vec![format!("E({x},{y})"), cell(e.value), cell(e.stderr), cell(ex)]
        })
        .collect();
    rows.push(vec!["S".into(), cell(s), cell(s_stderr), cell(s_exact)]);
    Ok(Report {
        json: Value::Object(obj),
        header: vec!["quantity", "estimate", "stderr", "exact"],
        rows,
    })
}

pub fn chsh_enumerate() -> Report {
    let sign = |bit: u32| if bit == 0 { 1i8 } else { -1 };
    let mut strategies = Vec::new();
    let mut rows = Vec::new();
    let mut max_abs = 0i64;
    for mask in 0u32..16 {
        let s = [0, 1, 2, 3].map(|k| sign((mask >> k) & 1));
        let value = deterministic_strategy_chsh(s) as i64;
        max_abs = max_abs.max(value.abs());
        strategies.push(json!({ "a1": s[0], "a2": s[1], "b1": s[2], "b2": s[3], "s": value }));
        rows.push(s.iter().map(|v| v.to_string()).chain([value.to_string()]).collect());
    }
    Report {
        json: json!({ "strategies": strategies, "max_abs_s": max_abs, "bound": 2 }),
        header: vec!["a1", "a2", "b1", "b2", "s"],
        rows,
    }
}

pub fn feasibility(path: &Path) -> CmdResult {
    let problem = problem_from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc = SolutionDoc::from(&solve(&problem).map_err(err)?);
    let (header, rows) = match &doc {
        SolutionDoc::Feasible { witness } => (
            vec!["atom", "probability"],
            witness.iter().map(|(a, p)| vec![a.clone(), p.clone()]).collect(),
        ),
        SolutionDoc::Infeasible { certificate } => (
            vec!["inequality", "value_at_input"],
            vec![vec![certificate.inequality.text.clone(), certificate.value_at_input.clone()]],
        ),
    };
    Ok(Report {
        json: serde_json::to_value(&doc).map_err(err)?,
        header,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Builtin {
    /// Contextual: outcomes always opposite, which wing reads +1 is set by
    /// the instrument.
    AnticorrelatedCoin,
    /// Independent fair coins.
    FairCoins,
    /// Two equally likely hidden states with opposite fixed outcomes.
    Deterministic,
}

impl Builtin {
    fn name(self) -> &'static str {
        match self {
            Builtin::AnticorrelatedCoin => "anticorrelated-coin",
            Builtin::FairCoins => "fair-coins",
            Builtin::Deterministic => "deterministic",
        }
    }

    fn build(self, x: u32, y: u32) -> HiddenVariableModel {
        match self {
            Builtin::AnticorrelatedCoin => anticorrelated_coin(x, y).into(),
            Builtin::FairCoins => FiniteNoncontextualModel::fair_coins(&[x], &[y]).into(),
            Builtin::Deterministic => FiniteNoncontextualModel::deterministic(
                vec![0.5, 0.5],
                BTreeMap::from([(x, vec![1, -1])]),
                BTreeMap::from([(y, vec![-1, 1])]),
            )
            .expect("two-state model is valid")
            .into(),
        }
    }
}

pub fn protocols(
    ctx: &RunContext,
    model_path: Option<&Path>,
    builtin: Option<Builtin>,
    x: Option<u32>,
    y: Option<u32>,
    repeats: u32,
) -> CmdResult {
    let (name, model, x, y) = match (model_path, builtin) {
        (Some(path), _) => {
            let model = load_model(path)?;
            let x = x.or_else(|| model.settings_a().first().copied()).ok_or("model has no A settings")?;
            let y = y.or_else(|| model.settings_b().first().copied()).ok_or("model has no B settings")?;
            (path.display().to_string(), model, x, y)
        }
        (None, Some(b)) => {
            let (x, y) = (x.unwrap_or(0), y.unwrap_or(0));
            (b.name().to_string(), b.build(x, y), x, y)
        }
        (None, None) => return Err("either --model or --builtin is required".into()),
    };
    let coincidence = simulate_coincidence(&model, x, y, ctx.n, &ctx.stream().derive(0))
        .and_then(|s| s.correlation())
        .map_err(err)?;
    let bell = simulate_bell_protocol(&model, x, y, ctx.n, repeats, &ctx.stream().derive(1)).map_err(err)?;
    let exact_c = model.exact_correlation(x, y).map_err(err)?;
    let exact_b = model.exact_factorized_correlation(x, y).map_err(err)?;
    let difference = bell.value - coincidence.value;
    let combined = coincidence.stderr.hypot(bell.stderr);

    let mut c = estimate_json(&coincidence);
    c.as_object_mut().expect("object").insert("exact".into(), num(exact_c));
    let mut b = estimate_json(&bell);
    b.as_object_mut().expect("object").insert("exact".into(), num(exact_b));
    Ok(Report {
        json: json!({
            "model": name,
            "x": x,
            "y": y,
            "n_pairs": ctx.n,
            "n_repeats": repeats,
            "seed": ctx.seed,
            "coincidence": c,
            "bell_protocol": b,
            "difference": num(difference),
            "combined_stderr": num(combined),
        }),
        header: vec!["protocol", "estimate", "stderr", "exact"],
        rows: vec![
            vec!["coincidence".into(), cell(coincidence.value), cell(coincidence.stderr), cell(exact_c)],
            vec!["bell_protocol".into(), cell(bell.value), cell(bell.stderr), cell(exact_b)],
        ],
    })
}

fn sweep_report(target: &str, ctx: &RunContext, points: Vec<(f64, Estimate)>) -> Report {
    let rows = points
        .iter()
        .map(|(p, e)| vec![cell(*p), cell(e.value), cell(e.stderr)])
        .collect();
    let json_rows: Vec<Value> = points
        .iter()
        .map(|(p, e)| json!({ "parameter": num(*p), "E": num(e.value), "stderr": num(e.stderr) }))
        .collect();
    Report {
        json: json!({ "target": target, "n": ctx.n, "seed": ctx.seed, "rows": json_rows }),
        header: vec!["parameter", "E", "stderr"],
        rows,
    }
}

/// `E(0°, θ)` for the contextual singlet, one substream per grid point.
pub fn sweep_singlet(ctx: &RunContext, grid: &[f64]) -> CmdResult {
    let points = grid
        .iter()
        .enumerate()
        .map(|(i, &theta)| {
            let model = HiddenVariableModel::from(ContextualModel::singlet(
                &[(0, 0.0)],
                &[(0, theta.to_radians())],
            ));
            let e = simulate_coincidence(&model, 0, 0, ctx.n, &ctx.stream().derive(i as u64))
                .and_then(|s| s.correlation())
                .map_err(err)?;
            Ok((theta, e))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(sweep_report("singlet", ctx, points))
}

/// Collision correlation against the restitution coefficient.
pub fn sweep_collision(
    ctx: &RunContext,
    grid: &[f64],
    pair: &DetectorAssignment,
    cfg: &CollisionConfig,
) -> CmdResult {
    let points = grid
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let cfg = cfg.with_restitution(e).map_err(err)?;
            let est = run_experiment(&cfg, pair, ctx.n, &ctx.stream().derive(i as u64))
                .and_then(|s| s.correlation())
                .map_err(err)?;
            Ok((e, est))
        })
        .collect::<Result<Vec<_>, String>>()?;
    Ok(sweep_report("collision", ctx, points))
}
