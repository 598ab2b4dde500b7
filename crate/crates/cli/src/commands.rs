use hnrel::betti::{self, BettiError, IntSeries};
use hnrel::exactalg::rational::{self, Rational};
use hnrel::exactalg::{GradedElement, Ring, TSeries, NO_CAP};
use hnrel::parab::{self, ParabolicData, ParabolicError, SubParabolicData};
use hnrel::relgen::{self, BundleData, RelError};
use hnrel::respair::{self, BerezinSign, PairingError, PairingOptions, Thm103Input};
use hnrel::strata;
use serde_json::{json, Value};

use crate::{BettiArgs, CliError, Format, PairingArgs, ParabolicArgs, RelationsArgs, StrataArgs, SCHEMA};

impl From<BettiError> for CliError {
    fn from(e: BettiError) -> Self {
        match e {
            BettiError::CapTooSmall { required, .. } => CliError::Cap { message: e.to_string(), required: Some(required as u64) },
            BettiError::NotCoprime { .. } | BettiError::Invalid(_) => CliError::Validation(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<RelError> for CliError {
    fn from(e: RelError) -> Self {
        match e {
            RelError::CapTooSmall { required, .. } => CliError::Cap { message: e.to_string(), required: Some(required as u64) },
            RelError::Slope(_) | RelError::Invalid(_) | RelError::OutsideWindow { .. } => CliError::Validation(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<PairingError> for CliError {
    fn from(e: PairingError) -> Self {
        match e {
            PairingError::Rel(inner) => inner.into(),
            PairingError::Cap(_) => CliError::Cap { message: e.to_string(), required: None },
            PairingError::Invalid(_) | PairingError::NotCoprime { .. } | PairingError::FGenerator(_) | PairingError::ZeroEpsilon => {
                CliError::Validation(e.to_string())
            }
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<ParabolicError> for CliError {
    fn from(e: ParabolicError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn render(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("serializable");
    s.push('\n');
    s
}

fn int_series(s: &IntSeries) -> Value {
    Value::Array(s.coeffs().iter().map(|c| Value::String(c.to_string())).collect())
}

fn q(x: &Rational) -> Value {
    Value::String(rational::to_string(x))
}

fn parse_q(s: &str) -> Result<Rational, CliError> {
    rational::parse(s).ok_or_else(|| CliError::Validation(format!("`{s}` is not a rational number")))
}

pub fn betti(a: &BettiArgs) -> Result<String, CliError> {
    if a.n < 1 || a.g < 2 {
        return Err(CliError::Validation(format!("need n ≥ 1 and g ≥ 2, got n = {}, g = {}", a.n, a.g)));
    }
    let cap = a.cap.unwrap_or(betti::moduli_dimension(a.n, a.g) as usize);
    let p = betti::p_moduli(a.n, a.d, a.g, cap)?;
    if a.format == Format::Csv {
        if a.closed {
            return Err(CliError::Validation("--closed is only available with JSON output".into()));
        }
        let mut out = String::from("k,coefficient\n");
        for (k, c) in p.coeffs().iter().enumerate() {
            out.push_str(&format!("{k},{c}\n"));
        }
        return Ok(out);
    }
    let mut v = json!({
        "schema": SCHEMA,
        "command": "betti",
        "n": a.n, "d": a.d, "g": a.g, "cap": cap,
        "dimension": betti::moduli_dimension(a.n, a.g),
        "p_moduli": int_series(&p),
    });
    if a.closed {
        v["closed"] = match betti::p_closed(a.n, a.d, a.g, cap) {
            Ok(c) => {
                let cmp = betti::compare_closed(&c, &p);
                json!({
                    "series": int_series(&c),
                    "agree": cmp.agree,
                    "first_difference": cmp.first_difference.map(|(k, x, y)| json!({"k": k, "closed": x.to_string(), "inductive": y.to_string()})),
                })
            }
            Err(e @ BettiError::NonIntegralExponent { .. }) => json!({"error": e.to_string()}),
            Err(e) => return Err(e.into()),
        };
    }
    Ok(render(v))
}

pub fn strata(a: &StrataArgs) -> Result<String, CliError> {
    if a.n < 1 || a.g < 0 || a.codim_cap < 0 {
        return Err(CliError::Validation("need n ≥ 1, g ≥ 0 and a nonnegative codimension cap".into()));
    }
    let types: Vec<Value> = strata::enumerate_hn_types(a.n, a.d, a.g, a.codim_cap)
        .iter()
        .map(|t| json!({"blocks": t.blocks(), "codim": strata::codim_mu(t, a.g)}))
        .collect();
    Ok(render(json!({
        "schema": SCHEMA, "command": "strata",
        "n": a.n, "d": a.d, "g": a.g, "codim_cap": a.codim_cap,
        "types": types,
    })))
}

pub fn relations(a: &RelationsArgs) -> Result<String, CliError> {
    let main = BundleData::main(a.n, a.d, a.g)?;
    let hat = BundleData::hat(a.nhat, a.dhat, a.g)?;
    let window = relgen::relation_window(a.n, a.d, a.nhat, a.dhat, a.g)?;
    let rs: Vec<i64> = if a.window || a.r.is_empty() { window.clone().collect() } else { a.r.clone() };
    let mut records = Vec::new();
    for r in rs {
        for rec in relgen::relation_records(&main, &hat, r)? {
            records.push(rec.to_json());
        }
    }
    Ok(render(json!({
        "schema": SCHEMA, "command": "relations",
        "n": a.n, "d": a.d, "g": a.g, "nhat": a.nhat, "dhat": a.dhat,
        "window": [window.start(), window.end()],
        "records": records,
    })))
}

fn series_json(s: &TSeries<GradedElement>) -> Value {
    Value::Array(s.coeffs().iter().enumerate().map(|(r, c)| json!({"r": r, "terms": c.terms_json()})).collect())
}

pub fn pairing(a: &PairingArgs) -> Result<String, CliError> {
    let main = BundleData::main(a.n, a.d, a.g)?;
    let hat = BundleData::hat(a.nhat, a.dhat, a.g)?;
    let mut opts = PairingOptions::new(a.t_cap);
    if a.negative_orientation {
        opts.sign = BerezinSign::Minus;
    }
    if !a.relabel.is_empty() {
        opts.relabel = Some(a.relabel.clone());
    }
    let mut v = json!({
        "schema": SCHEMA, "command": "pairing",
        "n": a.n, "d": a.d, "g": a.g, "nhat": a.nhat, "dhat": a.dhat, "t_cap": a.t_cap,
    });
    if a.eps.is_empty() {
        let ring = Ring::new(hat.generators(), NO_CAP).map_err(|e| CliError::Failure(e.to_string()))?;
        let eta = crate::expr::parse(&a.eta, &ring).map_err(CliError::Validation)?;
        let out = respair::pairing_thm_10_2(&eta, &main, a.nhat, a.dhat, &opts)?;
        v["eta"] = json!(a.eta);
        v["coefficients"] = series_json(&out);
    } else {
        let nh = a.nhat as usize;
        let eps = a.eps.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>, _>>()?;
        let mut m = a.m.clone();
        if m.len() > nh {
            return Err(CliError::Validation(format!("at most {nh} exponents in --m")));
        }
        m.resize(nh, 0);
        let mut p = vec![vec![false; 2 * a.g.max(0) as usize]; nh];
        for pair in &a.odd {
            let parsed = pair.split_once(':').and_then(|(r, k)| Some((r.parse::<usize>().ok()?, k.parse::<usize>().ok()?)));
            match parsed {
                Some((r, k)) if (1..=nh).contains(&r) && (1..=p[0].len()).contains(&k) => p[r - 1][k - 1] = true,
                _ => return Err(CliError::Validation(format!("odd insertion `{pair}` must be r:k with 1 ≤ r ≤ n̂, 1 ≤ k ≤ 2g"))),
            }
        }
        let input = Thm103Input { m, p, eps: eps.clone(), lambda_order: a.lambda_order };
        let out = respair::pairing_thm_10_3(&input, &main, a.nhat, a.dhat, &opts)?;
        v["eps"] = Value::Array(eps.iter().map(q).collect());
        v["lambda_coefficients"] = Value::Array(out.iter().enumerate().map(|(k, s)| json!({"k": k, "coefficients": series_json(s)})).collect());
    }
    Ok(render(v))
}

fn sub_json(s: &SubParabolicData) -> Value {
    json!({"nhat": s.nh, "dhat": s.dh, "jhat": s.jh})
}

pub fn parabolic(a: &ParabolicArgs) -> Result<String, CliError> {
    let weights = a.weights.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>, _>>()?;
    let pd = ParabolicData::new(a.n, a.d, weights, a.mults.clone())?;
    let (deg, slope) = parab::par_degree_slope(&pd);
    let mut v = json!({
        "schema": SCHEMA, "command": "parabolic",
        "n": a.n, "d": a.d,
        "weights": pd.weights.iter().map(q).collect::<Vec<_>>(),
        "mults": pd.mults,
        "par_degree": q(&deg),
        "par_slope": q(&slope),
    });
    if a.check_good {
        let r = parab::good_data_check(&pd);
        v["good_data"] = json!({
            "good": r.is_good(),
            "semistable_is_stable": r.semistable_is_stable(),
            "checked": r.checked,
            "margin": r.margin.as_ref().map(q),
            "witnesses": r.witnesses.iter().map(|w| json!({"outer": w.outer.as_ref().map(sub_json), "inner": sub_json(&w.inner)})).collect::<Vec<_>>(),
        });
    }
    if a.rank {
        if a.sub.len() != pd.m() + 2 {
            return Err(CliError::Validation(format!("--sub needs n̂, d̂ and {} multiplicities", pd.m())));
        }
        let sub = SubParabolicData::new(a.sub[0], a.sub[1], a.sub[2..].to_vec());
        let window = parab::par_relation_window(&pd, &sub, a.g)?;
        v["rank"] = json!({
            "g": a.g,
            "sub": sub_json(&sub),
            "rank": parab::par_rank_formula(&pd, &sub, a.g),
            "window": [window.start(), window.end()],
        });
    }
    Ok(render(v))
}
