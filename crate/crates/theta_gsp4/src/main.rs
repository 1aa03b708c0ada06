use std::collections::BTreeMap;
use std::fs;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use theta_gsp4::assembly::{interpolation_rhs, mass_volume, run_verification_suite, GlobalDatum, GROUPS};
use theta_gsp4::cm_theta::{master_identity, theta_element, CmTower, FourierExpansion};
use theta_gsp4::exact_arith::{alpha, beta, delta, gamma, parse, RatFunc};
use theta_gsp4::lfactors::{factor_table, l_tau, modified_euler, EulerCase, SatakeGSp4, Splitting};
use theta_gsp4::quadfield::class_group;

#[derive(Parser)]
#[command(name = "theta-gsp4", version, about = "Exact local identities and theta elements for GSp4")]
struct Cli {
    /// Emit JSON instead of TSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity groups (all when none is named).
    Verify { groups: Vec<String> },
    /// Local factor tables: `table`, `euler`, `tau`; params as key=value.
    Factors { name: String, params: Vec<String> },
    /// Theta element at level n from a coefficient file of "a b c value" lines.
    Theta {
        delta_k: i64,
        p: i64,
        n: u32,
        n_plus: i64,
        #[arg(long)]
        coeffs: String,
        /// U^Q eigenvalue used for the normalization.
        #[arg(long, default_value = "a")]
        alpha_q: String,
    },
    /// Ring class group of a negative discriminant.
    Classgroup {
        #[arg(allow_negative_numbers = true)]
        disc: i64,
    },
    /// Volume constant as a rational multiple of pi^3.
    Mass { n_plus: i64, n_minus: i64 },
    /// Interpolation factor list from a key = value config file.
    Interp {
        #[arg(long)]
        config: String,
    },
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn print(&self, json: bool) {
        if json {
            let v: Vec<Value> = self
                .rows
                .iter()
                .map(|r| {
                    let m: Map<String, Value> = self.columns.iter().zip(r).map(|(c, x)| (c.to_string(), Value::String(x.clone()))).collect();
                    Value::Object(m)
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
        } else {
            println!("{}", self.columns.join("\t"));
            for r in &self.rows {
                println!("{}", r.join("\t"));
            }
        }
    }
}

fn params(items: &[String]) -> Result<BTreeMap<String, String>, String> {
    items
        .iter()
        .map(|s| s.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())).ok_or_else(|| format!("{s}: expected key=value")))
        .collect()
}

fn expr(p: &BTreeMap<String, String>, key: &str, default: RatFunc) -> Result<RatFunc, String> {
    match p.get(key) {
        Some(s) => parse(s).map_err(|e| format!("{key}: {e}")),
        None => Ok(default),
    }
}

fn factors(name: &str, raw: &[String]) -> Result<(Table, bool), String> {
    let p = params(raw)?;
    let number = |k: &str, d: i64| -> Result<i64, String> { p.get(k).map_or(Ok(d), |s| s.parse().map_err(|_| format!("{k}: not an integer"))) };
    match name {
        "table" => {
            let mut t = Table::new(&["factor", "s", "case", "value"]);
            let rows = factor_table(&expr(&p, "gamma", gamma())?, &expr(&p, "alpha", alpha())?, &expr(&p, "delta", delta())?, number("eps", 1)?);
            for (f, s, c, v) in rows {
                t.push(vec![f, s.to_string(), c, v.to_string()]);
            }
            Ok((t, true))
        }
        "euler" => {
            let sat = SatakeGSp4 { alpha_p: expr(&p, "alpha_p", alpha())?, beta_p: expr(&p, "beta_p", beta())?, kappa: number("kappa", 2)? as i32 };
            let lam = expr(&p, "lambda", delta())?;
            let lam_inv = lam.inv().map_err(|e| e.to_string())?;
            let mut t = Table::new(&["case", "value"]);
            for c in 1..=number("c_max", 2)?.max(0) as u32 {
                t.push(vec![format!("c(nu)={c}"), modified_euler(&sat, &EulerCase::Ramified(c)).to_string()]);
            }
            t.push(vec!["split".into(), modified_euler(&sat, &EulerCase::Split(lam.clone(), lam_inv)).to_string()]);
            t.push(vec!["inert".into(), modified_euler(&sat, &EulerCase::Inert).to_string()]);
            t.push(vec!["ramified".into(), modified_euler(&sat, &EulerCase::RamifiedK(lam)).to_string()]);
            Ok((t, true))
        }
        "tau" => {
            let mut t = Table::new(&["case", "value"]);
            for sp in [Splitting::Split, Splitting::Inert, Splitting::Ramified] {
                t.push(vec![sp.name().into(), l_tau(sp).to_string()]);
            }
            Ok((t, true))
        }
        _ => Err(format!("unknown factor table {name}; known: table, euler, tau")),
    }
}

fn theta(delta_k: i64, p: i64, n: u32, n_plus: i64, coeffs: &str, alpha_q: &str) -> Result<(Table, bool), String> {
    let text = fs::read_to_string(coeffs).map_err(|e| format!("{coeffs}: {e}"))?;
    let aq = parse(alpha_q).map_err(|e| e.to_string())?;
    let tower = CmTower::new(delta_k, p, n + 1, n_plus).map_err(|e| e.to_string())?;
    let f = FourierExpansion::parse(&text, tower.order_level(n.max(1))).map_err(|e| e.to_string())?;
    let th = theta_element(&f, &tower, &aq, n).map_err(|e| e.to_string())?;
    let level = tower.level(n).map_err(|e| e.to_string())?;
    let grp = tower.group(n);
    let mut t = Table::new(&["kind", "sigma", "class", "value"]);
    for (i, c) in th.coeffs.iter().enumerate() {
        t.push(vec!["theta".into(), grp.elements[i].to_string(), level.points[i].s.to_string(), c.to_string()]);
    }
    let mut ok = true;
    if n >= 1 {
        let fib = tower.fiber_identity(n).map_err(|e| e.to_string())?;
        let holds = fib.iter().all(|x| x.1);
        ok &= holds;
        t.push(vec!["check".into(), "fiber identity".into(), format!("{} sigma", fib.len()), if holds { "pass" } else { "fail" }.into()]);
        let m = master_identity(&f, &tower, &aq, n).map_err(|e| e.to_string())?;
        ok &= m;
        t.push(vec!["check".into(), "pushforward master identity".into(), format!("n={n}"), if m { "pass" } else { "fail" }.into()]);
    }
    Ok((t, ok))
}

fn classgroup(disc: i64) -> Result<(Table, bool), String> {
    let g = class_group(disc).map_err(|e| e.to_string())?;
    let mut t = Table::new(&["kind", "index", "form", "order"]);
    for (i, f) in g.elements.iter().enumerate() {
        t.push(vec!["element".into(), i.to_string(), f.to_string(), g.element_order(i).to_string()]);
    }
    let ok = g.verify().is_ok();
    t.push(vec!["summary".into(), "h".into(), g.order().to_string(), if ok { "group law pass" } else { "group law fail" }.into()]);
    Ok((t, ok))
}

fn run(cli: &Cli) -> Result<bool, String> {
    let (table, ok) = match &cli.command {
        Command::Verify { groups } => {
            let sel: Vec<&str> = groups.iter().map(String::as_str).collect();
            if let Some(g) = sel.iter().find(|g| !GROUPS.contains(g)) {
                return Err(format!("unknown group {g}; known: {}", GROUPS.join(", ")));
            }
            let entries = run_verification_suite(&sel);
            let ok = entries.iter().all(|e| e.status.passed());
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&entries).expect("serializable"));
                return Ok(ok);
            }
            let mut t = Table::new(&["group", "name", "anchor", "status", "detail"]);
            for e in entries {
                t.push(vec![e.group, e.name, e.anchor, e.status.name().into(), e.detail]);
            }
            (t, ok)
        }
        Command::Factors { name, params } => factors(name, params)?,
        Command::Theta { delta_k, p, n, n_plus, coeffs, alpha_q } => theta(*delta_k, *p, *n, *n_plus, coeffs, alpha_q)?,
        Command::Classgroup { disc } => classgroup(*disc)?,
        Command::Mass { n_plus, n_minus } => {
            let v = mass_volume(*n_plus, *n_minus).map_err(|e| e.to_string())?;
            let mut t = Table::new(&["n_plus", "n_minus", "coefficient", "pi_power"]);
            t.push(vec![n_plus.to_string(), n_minus.to_string(), v.coeff.to_string(), v.pi_power.to_string()]);
            (t, true)
        }
        Command::Interp { config } => {
            let text = fs::read_to_string(config).map_err(|e| format!("{config}: {e}"))?;
            let g = GlobalDatum::from_config(&text).map_err(|e| e.to_string())?;
            let rep = interpolation_rhs(&g).map_err(|e| e.to_string())?;
            let mut t = Table::new(&["kind", "name", "value"]);
            for (k, n, v) in rep.rows() {
                t.push(vec![k, n, v]);
            }
            (t, rep.all_hold())
        }
    };
    table.print(cli.json);
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
