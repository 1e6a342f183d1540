use std::fmt;
use std::fs;
use std::io::{self, Read};
use std::str::FromStr;
use std::thread;

use anyhow::{Context, Result};
use num_rational::BigRational;
use serde_json::{json, Value};

use fqdioph::approx::{
    badness_constant, cf_convergents, cf_expand, dirichlet_c0, dirichlet_exponent, dirichlet_witness, is_bad_cf,
    mag_json, LinearFormSystem, SearchBudget,
};
use fqdioph::dimension::{box_count_bad, dim_lower_bound, packing_count, BoxCountRow};
use fqdioph::game::{
    limit_point, play, BlackRandom, FormalBall, GameParams, GameTranscript, ReaderStrategy, StopRule, Strategy,
};
use fqdioph::geom::{check_duality, Parallelepiped};
use fqdioph::magnitude::{floor_log, k_pow};
use fqdioph::parse::{format_coeff, format_series, parse_field, parse_series};
use fqdioph::white_strategy::lemmas::{
    calibrate, sample_finite1, sample_perturbation, sample_phi, sample_winfinite2, CalibrationRequest,
};
use fqdioph::white_strategy::{certify_bad, BlackGreedy, Mode, StrategyConfig, WhiteStrategy};
use fqdioph::{Error, FieldSpec, LaurentSeries, Magnitude, SeriesMatrix};

use crate::output::{Echo, Envelope, Report, Table};
use crate::{
    BadnessArgs, BlackName, BoxArgs, BoxcountArgs, CalibrateArgs, CertifyArgs, CfArgs, Cli, Command, DimAction,
    DimBoundArgs, DimPackArgs, DirichletArgs, DualityArgs, GameAction, GameRunArgs, SeriesArgs, SeriesOp, WhiteName,
};

/// A problem with the arguments themselves (exit code 2).
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

/// Exit code, error kind and structured detail.
fn classify(e: &anyhow::Error) -> (u8, &'static str, Value) {
    if e.downcast_ref::<Usage>().is_some() {
        return (2, "usage", Value::Null);
    }
    let Some(err) = e.chain().find_map(|c| c.downcast_ref::<Error>()) else {
        return (1, "failure", Value::Null);
    };
    match err {
        Error::PrecisionExhausted(_) => (3, "precision_exhausted", Value::Null),
        Error::PrecisionExhaustedAfter { terms } => (3, "precision_exhausted", json!({ "terms": terms })),
        Error::SearchBudgetExceeded { needed, budget } => {
            (3, "budget_exceeded", json!({ "needed": needed.to_string(), "budget": budget.to_string() }))
        }
        Error::SearchIncomplete { required } => (3, "search_incomplete", json!({ "required_degree": required })),
        Error::InsufficientDepth { required_moves } => {
            (3, "insufficient_depth", json!({ "required_moves": required_moves }))
        }
        Error::CounterexampleFound { q } => (4, "counterexample", json!({ "q": q })),
        Error::Syntax { .. }
        | Error::CoefficientOutOfRange { .. }
        | Error::InvalidField(_)
        | Error::InvalidArgument(_)
        | Error::DimensionMismatch(_)
        | Error::FieldMismatch
        | Error::BranchOutOfRange { .. } => (2, "usage", Value::Null),
        _ => (1, "failure", Value::Null),
    }
}

pub fn run(cli: &Cli, echo: Echo) -> u8 {
    let g = &cli.global;
    let env = Envelope { echo: &echo, seed: g.seed, timestamp: !g.no_timestamp };
    match dispatch(cli) {
        Ok(report) => {
            print!("{}", env.render(g.format, &report));
            0
        }
        Err(e) => {
            let (code, kind, detail) = classify(&e);
            let msg = format!("{e:#}");
            print!("{}", env.render_error(g.format, kind, &msg, detail));
            eprintln!("error: {msg}");
            code
        }
    }
}

struct Ctx {
    spec: FieldSpec,
    seed: u64,
    threads: usize,
    budget: SearchBudget,
}

fn dispatch(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    let ctx = Ctx {
        spec: parse_field(&g.field)?,
        seed: g.seed,
        threads: g.threads.max(1),
        budget: SearchBudget { max_candidates: g.budget },
    };
    match &cli.command {
        Command::Series(a) => series(&ctx, a),
        Command::Cf(a) => cf(&ctx, a),
        Command::Badness(a) => badness(&ctx, a),
        Command::Dirichlet(a) => dirichlet(&ctx, a),
        Command::Sucmin(a) => sucmin(&ctx, a),
        Command::Measure(a) => measure(&ctx, a),
        Command::Polar(a) => polar(&ctx, a),
        Command::Duality(a) => duality(&ctx, a),
        Command::Game { action: GameAction::Run(a) } => game_run(&ctx, a),
        Command::Certify(a) => certify(&ctx, a),
        Command::Dim { action } => match action {
            DimAction::Bound(a) => dim_bound(&ctx, a),
            DimAction::Pack(a) => dim_pack(&ctx, a),
            DimAction::Boxcount(a) => dim_boxcount(&ctx, a),
        },
        Command::Calibrate(a) => calibrate_cmd(&ctx, a),
    }
}

fn rational(name: &str, s: &str) -> Result<BigRational> {
    BigRational::from_str(s.trim()).map_err(|e| usage(format!("--{name} {s:?}: {e}")))
}

/// `"0"`, `"1"` or `"k^E"`.
fn magnitude(name: &str, s: &str) -> Result<Magnitude> {
    match s.trim() {
        "0" => Ok(Magnitude::Zero),
        "1" => Ok(Magnitude::ONE),
        t => t
            .strip_prefix("k^")
            .and_then(|e| e.trim_matches(['(', ')']).parse::<i64>().ok())
            .map(Magnitude::Pow)
            .ok_or_else(|| usage(format!("--{name} {s:?}: expected 0, 1 or k^E"))),
    }
}

fn exponents(s: Option<&str>, d: usize) -> Result<Vec<i64>> {
    match s {
        None => Ok(vec![0; d]),
        Some(s) => {
            s.split(',').map(|x| x.trim().parse::<i64>().map_err(|e| usage(format!("--e {x:?}: {e}")))).collect()
        }
    }
}

fn cap_magnitude(cap: i64) -> Result<Magnitude> {
    if cap < 0 {
        return Err(usage(format!("--cap must be non-negative, got {cap}")));
    }
    Ok(Magnitude::Pow(cap))
}

fn matrix_json(a: &SeriesMatrix) -> Value {
    json!((0..a.rows()).map(|i| a.row(i).iter().map(format_series).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn describe(x: &LaurentSeries, low: i64) -> Result<Value> {
    let spec = x.spec();
    let (norm, norm_exact) = match x.norm() {
        Ok(n) => (n, true),
        Err(_) => (x.norm_bound(), false),
    };
    let low = x.known_below().map_or(low, |kb| low.max(kb + 1));
    let digits: Vec<Value> = match x.terms_down_to(low) {
        Ok(ts) => ts.iter().map(|(e, c)| json!([e, format_coeff(spec, *c)])).collect(),
        Err(_) => Vec::new(),
    };
    Ok(json!({
        "series": format_series(x),
        "exact": x.is_exact(),
        "known_below": x.known_below(),
        "norm_exponent": mag_json(norm),
        "norm_exact": norm_exact,
        "frac_norm_exponent": x.frac_norm().ok().map(mag_json),
        "polynomial_part": x.polynomial_part().ok().map(|p| p.to_string()),
        "digits": digits,
    }))
}

fn series(ctx: &Ctx, a: &SeriesArgs) -> Result<Report> {
    let x = parse_series(&a.x, &ctx.spec)?;
    let mut out = json!({ "x": describe(&x, a.low)? });
    if let (Some(y), Some(op)) = (&a.y, a.op) {
        let y = parse_series(y, &ctx.spec)?;
        let z = match op {
            SeriesOp::Add => &x + &y,
            SeriesOp::Sub => &x - &y,
            SeriesOp::Mul => &x * &y,
            SeriesOp::Div => x.checked_div(&y)?,
        };
        out["y"] = describe(&y, a.low)?;
        out["op"] = json!(format!("{op:?}").to_lowercase());
        out["value"] = describe(&z, a.low)?;
    } else if a.y.is_some() {
        return Err(usage("--y needs --op"));
    }
    Ok(Report::new(out))
}

fn cf(ctx: &Ctx, a: &CfArgs) -> Result<Report> {
    let x = parse_series(&a.x, &ctx.spec)?;
    let expansion = cf_expand(&x, a.terms)?;
    let convergents = cf_convergents(&expansion);
    let mut table = Table::new(&["i", "a_i", "p_i", "q_i"]);
    for (i, (aq, (p, q))) in expansion.partial_quotients.iter().zip(&convergents).enumerate() {
        table.push(vec![i.to_string(), aq.to_string(), p.to_string(), q.to_string()]);
    }
    let mut out = expansion.to_json();
    out["convergents"] =
        json!(convergents.iter().map(|(p, q)| json!({ "p": p.to_string(), "q": q.to_string() })).collect::<Vec<_>>());
    if let Some(depth) = a.is_bad {
        let r = is_bad_cf(&x, depth)?;
        out["is_bad"] = json!({
            "depth": depth,
            "verdict": r.verdict,
            "max_degree": r.max_deg,
            "terms_examined": r.terms,
            "constant_exponent": r.max_deg.map(|d| -(d as i64)),
        });
    }
    Ok(Report::new(out).with_table(table))
}

fn system(ctx: &Ctx, text: &str) -> Result<LinearFormSystem> {
    Ok(LinearFormSystem::new(SeriesMatrix::parse_flat(&ctx.spec, text)?)?)
}

fn badness(ctx: &Ctx, a: &BadnessArgs) -> Result<Report> {
    let sys = system(ctx, &a.a)?;
    let (k, w) = badness_constant(&sys, cap_magnitude(a.cap)?, ctx.budget)?;
    Ok(Report::new(json!({
        "m": sys.m(),
        "n": sys.n(),
        "cap_exponent": a.cap,
        "constant_exponent": mag_json(k),
        "witness": w.to_json(),
    })))
}

fn dirichlet(ctx: &Ctx, a: &DirichletArgs) -> Result<Report> {
    let sys = system(ctx, &a.a)?;
    let w = dirichlet_witness(&sys, a.t)?;
    Ok(Report::new(json!({
        "m": sys.m(),
        "n": sys.n(),
        "t": a.t,
        "guaranteed_exponent": dirichlet_exponent(sys.m(), sys.n(), a.t),
        "c0": dirichlet_c0(sys.m(), sys.n(), a.t),
        "witness": w.to_json(),
    })))
}

fn body(ctx: &Ctx, a: &str, e: Option<&str>) -> Result<Parallelepiped> {
    let a = SeriesMatrix::parse_flat(&ctx.spec, a)?;
    let e = exponents(e, a.rows())?;
    Ok(Parallelepiped::new(a, e)?)
}

fn sucmin(ctx: &Ctx, a: &BoxArgs) -> Result<Report> {
    let p = body(ctx, &a.a, a.e.as_deref())?;
    let (mins, method) = match a.degree_bound {
        Some(d) => (p.successive_minima(d)?, "enumeration"),
        None => (p.reduced_minima(), "reduced basis"),
    };
    let mut table = Table::new(&["j", "lambda_exponent", "witness"]);
    for (j, (l, w)) in mins.exponents().iter().zip(&mins.witnesses).enumerate() {
        let w: Vec<String> = w.iter().map(|p| p.to_string()).collect();
        table.push(vec![(j + 1).to_string(), l.to_string(), w.join(" | ")]);
    }
    let mut out = mins.to_json(p.measure_exponent());
    out["method"] = json!(method);
    out["minima_product_exponent"] = json!(mins.exponents().iter().sum::<i64>());
    Ok(Report::new(out).with_table(table))
}

fn measure(ctx: &Ctx, a: &BoxArgs) -> Result<Report> {
    let p = body(ctx, &a.a, a.e.as_deref())?;
    Ok(Report::new(json!({
        "dim": p.dim(),
        "bound_exponents": p.bound_exponents(),
        "measure_exponent": p.measure_exponent(),
    })))
}

fn polar(ctx: &Ctx, a: &BoxArgs) -> Result<Report> {
    let p = body(ctx, &a.a, a.e.as_deref())?;
    let q = p.polar()?;
    Ok(Report::new(json!({
        "matrix": matrix_json(q.matrix()),
        "bound_exponents": q.bound_exponents(),
        "measure_exponent": q.measure_exponent(),
    })))
}

fn duality(ctx: &Ctx, a: &DualityArgs) -> Result<Report> {
    let p = match (&a.a, &a.c) {
        (Some(m), _) => body(ctx, m, a.e.as_deref())?,
        (None, Some(c)) => {
            let c = SeriesMatrix::parse_flat(&ctx.spec, c)?;
            if (c.rows(), c.cols()) != (a.m, a.n) {
                return Err(usage(format!("--c is {}x{}, expected {}x{}", c.rows(), c.cols(), a.m, a.n)));
            }
            Parallelepiped::structured(&c, a.r, a.level)?
        }
        (None, None) => return Err(usage("duality needs --a or --c")),
    };
    let r = check_duality(&p, a.m, a.n, a.degree_bound)?;
    Ok(Report::new(r.to_json()))
}

fn strategy_config(ctx: &Ctx, m: usize, n: usize, r: u32) -> Result<StrategyConfig> {
    let mut cfg = StrategyConfig::new(m, n, ctx.spec.k(), r)?;
    cfg.budget = ctx.budget;
    Ok(cfg)
}

/// The digits of the last ball's centre that every later ball shares.
fn settled_point(t: &GameTranscript) -> Result<Option<(i64, SeriesMatrix)>> {
    let precision = -t.last().effective_exponent() - 1;
    if precision < 0 {
        return Ok(None);
    }
    Ok(Some((precision, limit_point(t, precision)?)))
}

fn game_run(ctx: &Ctx, a: &GameRunArgs) -> Result<Report> {
    let params = GameParams::new(rational("alpha", &a.alpha)?, rational("beta", &a.beta)?, ctx.spec.k())?;
    let center = match &a.center {
        Some(c) => SeriesMatrix::parse_flat(&ctx.spec, c)?,
        None => SeriesMatrix::zeros(&ctx.spec, a.m, a.n),
    };
    if (center.rows(), center.cols()) != (a.m, a.n) {
        return Err(usage(format!("--center is {}x{}, expected {}x{}", center.rows(), center.cols(), a.m, a.n)));
    }
    let b1 = FormalBall::new(center, rational("radius", &a.radius)?)?;
    let mode = match a.white {
        WhiteName::WhiteLiteral => Mode::Literal,
        WhiteName::WhiteAvoid => Mode::Avoidance,
    };
    let mut cfg = strategy_config(ctx, a.m, a.n, a.r)?.with_mode(mode);
    cfg.horizon = a.horizon;
    cfg.rho1 = b1.radius().clone();
    let mut white = WhiteStrategy::new(cfg.clone());
    let stdin = io::stdin();
    let mut black: Box<dyn Strategy> = match a.black {
        BlackName::BlackRandom => Box::new(BlackRandom::new(ctx.seed)),
        BlackName::BlackGreedy => Box::new(BlackGreedy::new(cfg.clone())),
        BlackName::BlackStdin => Box::new(ReaderStrategy::new(stdin.lock())),
    };
    let t = play(&mut white, black.as_mut(), b1, &params, &StopRule::rounds(a.rounds))?;
    let transcript: Vec<Value> =
        t.to_jsonl().lines().map(|l| serde_json::from_str(l).expect("transcript lines are JSON")).collect();
    let point = settled_point(&t)?;
    let forfeit = t.forfeit().map(|f| json!({ "player": f.player, "index": f.index }));
    let mut table = Table::new(&["index", "player", "radius", "effective_exponent"]);
    for (i, b) in t.moves().iter().enumerate() {
        table.push(vec![
            i.to_string(),
            format!("{:?}", GameTranscript::player_of(i)).to_lowercase(),
            b.radius().to_string(),
            b.effective_exponent().to_string(),
        ]);
    }
    Ok(Report::new(json!({
        "white": white.name(),
        "black": black.name(),
        "rounds": a.rounds,
        "moves": t.len() - 1,
        "forfeit": forfeit,
        "strategy": cfg.to_json(),
        "final_effective_exponent": t.last().effective_exponent(),
        "limit_point": point.map(|(p, x)| json!({ "precision": p, "matrix": matrix_json(&x) })),
        "white_notes": serde_json::to_value(white.notes())?,
        "transcript": transcript,
    }))
    .with_table(table))
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn certify(ctx: &Ctx, a: &CertifyArgs) -> Result<Report> {
    let cap = cap_magnitude(a.cap)?;
    let (point, precision, r) = match &a.point {
        Some(p) => (SeriesMatrix::parse_flat(&ctx.spec, p)?, None, a.r.unwrap_or(2)),
        None => {
            let text = read_input(&a.input)?;
            let (jsonl, r) = match serde_json::from_str::<Value>(&text) {
                Ok(doc) if doc["result"]["transcript"].is_array() => {
                    let lines: Vec<String> =
                        doc["result"]["transcript"].as_array().unwrap().iter().map(|v| v.to_string()).collect();
                    let r = doc["result"]["strategy"]["R_exponent"].as_u64().map(|x| x as u32);
                    (lines.join("\n"), r)
                }
                _ => (text, None),
            };
            let t = GameTranscript::from_jsonl(&jsonl)?;
            let (p, x) =
                settled_point(&t)?.ok_or_else(|| usage("the transcript fixes no digits of the limit point"))?;
            (x, Some(p), a.r.or(r).unwrap_or(2))
        }
    };
    let ctx = Ctx { spec: point.spec().clone(), ..*ctx };
    let cfg = strategy_config(&ctx, point.rows(), point.cols(), r)?;
    let cert = certify_bad(&point, &cfg, cap)?;
    Ok(Report::new(json!({
        "point": matrix_json(&point),
        "precision": precision,
        "R_exponent": r,
        "certificate": cert.to_json(),
        "certified": true,
    })))
}

fn unit_beta(k: u32, j: u32) -> BigRational {
    k_pow(k, -(j as i64))
}

fn dim_row(k: u32, alpha: &BigRational, beta: &BigRational, m: usize, n: usize) -> Result<(Value, Vec<String>)> {
    let pack = packing_count(beta, m, n, k)?;
    let bound = dim_lower_bound(alpha, beta, m, n, k)?;
    let ab = alpha * beta;
    let e = floor_log(k, &ab);
    let ratio = (k_pow(k, e) == ab).then(|| format!("{}/{}", pack.max_exponent(), -e));
    let v = json!({
        "beta": beta.to_string(),
        "log_n_exponent": pack.max_exponent(),
        "ratio": ratio,
        "bound": bound.to_json(),
    });
    let row = vec![beta.to_string(), pack.max_exponent().to_string(), ratio.unwrap_or_default(), bound.to_string()];
    Ok((v, row))
}

fn dim_bound(ctx: &Ctx, a: &DimBoundArgs) -> Result<Report> {
    let k = ctx.spec.k();
    let alpha = rational("alpha", &a.alpha)?;
    let mut table = Table::new(&["beta", "log_n_exponent", "ratio", "bound"]);
    let betas: Vec<BigRational> = match a.j_max {
        Some(j) => (1..=j).map(|j| unit_beta(k, j)).collect(),
        None => vec![rational("beta", a.beta.as_deref().unwrap_or_default())?],
    };
    let mut rows = Vec::new();
    for beta in &betas {
        let (v, row) = dim_row(k, &alpha, beta, a.m, a.n)?;
        rows.push(v);
        table.push(row);
    }
    let out = if rows.len() == 1 && a.j_max.is_none() { rows.pop().unwrap() } else { json!({ "rows": rows }) };
    Ok(Report::new(out).with_table(table))
}

fn dim_pack(ctx: &Ctx, a: &DimPackArgs) -> Result<Report> {
    let pack = packing_count(&rational("beta", &a.beta)?, a.m, a.n, ctx.spec.k())?;
    let mut out = pack.to_json();
    if a.centers {
        let cs = pack.centers(&ctx.spec, a.m, a.n, true)?;
        out["centers"] = json!(cs.iter().map(matrix_json).collect::<Vec<_>>());
    }
    Ok(Report::new(out))
}

fn dim_boxcount(ctx: &Ctx, a: &BoxcountArgs) -> Result<Report> {
    let threshold = magnitude("threshold", &a.threshold)?;
    let rows = box_count_bad(&ctx.spec, threshold, Magnitude::Pow(a.cap), a.t, a.m, a.n, ctx.budget, ctx.threads)?;
    let mut table = Table::new(&BoxCountRow::CSV_HEADER.split(',').collect::<Vec<_>>());
    for r in &rows {
        table.push(r.to_csv().split(',').map(str::to_string).collect());
    }
    Ok(Report::new(json!({
        "threshold_exponent": mag_json(threshold),
        "cap_exponent": a.cap,
        "rows": serde_json::to_value(&rows)?,
    }))
    .with_table(table))
}

fn shapes(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .map(|p| {
            let (m, n) = p.trim().split_once('x').ok_or_else(|| usage(format!("shape {p:?}: expected MxN")))?;
            let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| usage(format!("shape {p:?}: {e}")));
            Ok((parse(m)?, parse(n)?))
        })
        .collect()
}

fn calibrate_one(ctx: &Ctx, a: &CalibrateArgs, m: usize, n: usize) -> Result<(Value, bool)> {
    let req = CalibrationRequest {
        spec: ctx.spec.clone(),
        m,
        n,
        sigma: Magnitude::Pow(a.sigma),
        alpha: rational("alpha", &a.alpha)?,
        beta: rational("beta", &a.beta)?,
        samples: a.samples,
        seed: ctx.seed,
    };
    let cal = calibrate(&req)?;
    let mut out = json!({ "m": m, "n": n, "calibration": cal.to_json() });
    let mut ok = true;
    if a.check {
        let setup = cal.setup(&ctx.spec);
        let reports = [
            sample_winfinite2(&setup, a.samples, ctx.seed)?,
            sample_finite1(&setup, a.samples, ctx.seed)?,
            sample_phi(&setup, a.samples, ctx.seed)?,
            sample_perturbation(&setup, a.samples, ctx.seed)?,
        ];
        ok = reports.iter().all(|r| r.violations == 0);
        out["checks"] = json!(reports.iter().map(|r| r.to_json()).collect::<Vec<_>>());
    }
    Ok((out, ok))
}

fn calibrate_cmd(ctx: &Ctx, a: &CalibrateArgs) -> Result<Report> {
    let shapes = shapes(&a.shapes)?;
    let chunk = shapes.len().div_ceil(ctx.threads.min(shapes.len()).max(1));
    let results: Vec<Result<(Value, bool)>> = thread::scope(|s| {
        let handles: Vec<_> = shapes
            .chunks(chunk.max(1))
            .map(|part| s.spawn(move || part.iter().map(|&(m, n)| calibrate_one(ctx, a, m, n)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("calibration worker panicked")).collect()
    });
    let mut table = Table::new(&["m", "n", "K4", "K5", "K6", "K7"]);
    let mut out = Vec::new();
    let mut violations = false;
    for r in results {
        let (v, ok) = r?;
        violations |= !ok;
        let c = &v["calibration"];
        let k6 = c["K6"].as_array().and_then(|x| x.last()).cloned().unwrap_or(Value::Null);
        table.push(vec![
            v["m"].to_string(),
            v["n"].to_string(),
            c["K4"].as_str().unwrap_or("").into(),
            c["K5"].as_str().unwrap_or("").into(),
            k6.as_str().unwrap_or("").into(),
            c["K7"].as_str().unwrap_or("").into(),
        ]);
        out.push(v);
    }
    if violations {
        let detail = serde_json::to_string(&out)?;
        return Err(Error::CounterexampleFound { q: vec![detail] }).context("sampled inequality violated");
    }
    Ok(Report::new(json!({ "shapes": out })).with_table(table))
}
