//! Command-line surface. Every command produces one report; JSON reports have
//! the keys `command, params, results, diagnostics, timings, seed, version`.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use crate::counting::{self, make_curve, trace_profile, CountError, Strategy, TraceMode, TraceProfile};
use crate::cyclo::{adappears_check, invert_multiplicities, CycloError};
use crate::ffield::make_extension;
use crate::jacobian::order::{check_order_annihilates, find_order_ell_element, FactoredOrder};
use crate::jacobian::{HyperellipticModel, JacobianError};
use crate::lpoly::{FactoredCharPoly, LpolyError, EXPANSION_LIMIT};
use crate::torsion::{self, validate_family, RankReport, TorsionError, GROUP_ORDER_MAX_BITS};
use crate::verify::{self, Suite, VerifyConfig};

pub const BUDGET_ENV: &str = "TORSION_FORGE_BUDGET";
pub const MIN_BUDGET: u64 = 1 << 10;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

pub const CSV_HEADER: &str = "p,ell,m,q,genus,d,rank_mode,rank_lo,rank,rank_hi,order_valuation,thm_main_ref,ratio_main,ratio_realmain1,seconds";

#[derive(Parser, Debug)]
#[command(name = "torsion-forge", version, about = "Exact arithmetic for the curves y^2 = x^q - x")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Cap on field elements touched by any enumeration [env: TORSION_FORGE_BUDGET]
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here (atomically) instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, default_value = "auto")]
    pub strategy: Strategy,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Force,
    Count,
    CrossCheck,
}

impl From<ModeArg> for TraceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Force => TraceMode::Force,
            ModeArg::Count => TraceMode::Count,
            ModeArg::CrossCheck => TraceMode::CrossCheck,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Cyclo,
    Counts,
    Eigen,
    Inversion,
    Tate,
    Twist,
    Jacobian,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Cyclo => Suite::Cyclo,
            SuiteArg::Counts => Suite::Counts,
            SuiteArg::Eigen => Suite::Eigen,
            SuiteArg::Inversion => Suite::Inversion,
            SuiteArg::Tate => Suite::Tate,
            SuiteArg::Twist => Suite::Twist,
            SuiteArg::Jacobian => Suite::Jacobian,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// One point count. By default `y^2 = x^(p^m) - x` over `F_{p^(m s)}`; with
    /// `--family`, the family member `q = p^(2m)` over `F_{p^(2s)}`.
    Count {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        s: u64,
        #[arg(long)]
        family: bool,
    },
    /// Normalized traces `t_s` for `s | 2m`.
    Traces {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Force)]
        mode: ModeArg,
    },
    /// Eigenvalue multiplicities `a_d` for `d | 2m`.
    Mult {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Force)]
        mode: ModeArg,
    },
    /// Frobenius polynomial over `F_{p^2}`, factored; optionally the multiplicity of 1 modulo ell.
    Charpoly {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        ell: Option<u64>,
    },
    /// Group order `#J(F_{p^2})` in factored form.
    Order {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        ell: Option<u64>,
    },
    /// ell-rank of `J(F_{p^2})`: exact when countable, else an interval.
    Rank {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Force)]
        mode: ModeArg,
    },
    /// One rank row per m in a comma-separated list.
    Table {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long = "m-list", value_delimiter = ',', required = true)]
        m_list: Vec<u64>,
    },
    /// Ranks over `F_p`, its quadratic twist, and over `F_{p^2}` by enumeration.
    TwistCheck {
        /// Coefficients of h over F_p, lowest degree first
        #[arg(long, value_delimiter = ',', required = true)]
        h: Vec<u64>,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        c: u64,
    },
    /// Group-law witnesses on the family member: `N D = 0` for random `D` and an order-ell divisor.
    JacobianDemo {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 20)]
        samples: u64,
        #[arg(long, default_value_t = 3)]
        trials: u32,
    },
    /// Run verification suites.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Count { .. } => "count",
            Command::Traces { .. } => "traces",
            Command::Mult { .. } => "mult",
            Command::Charpoly { .. } => "charpoly",
            Command::Order { .. } => "order",
            Command::Rank { .. } => "rank",
            Command::Table { .. } => "table",
            Command::TwistCheck { .. } => "twist-check",
            Command::JacobianDemo { .. } => "jacobian-demo",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Resolved configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub strategy: Strategy,
    pub budget: u64,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn assertion(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_ASSERTION,
            message: message.into(),
        }
    }
}

impl From<CountError> for Failure {
    fn from(e: CountError) -> Self {
        let code = match &e {
            CountError::BudgetExceeded { .. } => EXIT_BUDGET,
            CountError::Field(crate::ffield::FieldError::BudgetExceeded { .. }) => EXIT_BUDGET,
            CountError::NotPrime(_) | CountError::EvenPrime | CountError::ZeroM => EXIT_USAGE,
            _ => EXIT_ASSERTION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<TorsionError> for Failure {
    fn from(e: TorsionError) -> Self {
        let code = match &e {
            _ if e.is_budget() => EXIT_BUDGET,
            TorsionError::Inadmissible { .. } | TorsionError::NotANonsquare { .. } => EXIT_USAGE,
            TorsionError::Count(c) if matches!(c, CountError::NotPrime(_) | CountError::EvenPrime | CountError::ZeroM) => {
                EXIT_USAGE
            }
            TorsionError::Jacobian(JacobianError::EvenDegree(_) | JacobianError::NotSquarefree) => EXIT_USAGE,
            _ => EXIT_ASSERTION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<CycloError> for Failure {
    fn from(e: CycloError) -> Self {
        let code = match e {
            CycloError::BudgetExceeded { .. } => EXIT_BUDGET,
            _ => EXIT_ASSERTION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<LpolyError> for Failure {
    fn from(e: LpolyError) -> Self {
        Failure::assertion(e.to_string())
    }
}

impl From<JacobianError> for Failure {
    fn from(e: JacobianError) -> Self {
        Failure::from(TorsionError::from(e))
    }
}

/// A finished report; `csv` is set only for `table`.
pub struct Report {
    pub command: &'static str,
    pub params: Value,
    pub results: Value,
    pub diagnostics: Value,
    pub timings: Map<String, Value>,
    pub seed: u64,
    pub csv_rows: Option<Vec<String>>,
    /// Exit code for reports that carry failed checks.
    pub code: i32,
}

impl Report {
    pub fn to_json(&self) -> Value {
        json!({
            "command": self.command,
            "params": self.params,
            "results": self.results,
            "diagnostics": self.diagnostics,
            "timings": self.timings,
            "seed": self.seed.to_string(),
            "version": env!("CARGO_PKG_VERSION"),
        })
    }

    pub fn render(&self, format: Format) -> String {
        match (format, &self.csv_rows) {
            (Format::Csv, Some(rows)) => {
                let mut s = String::from(CSV_HEADER);
                s.push('\n');
                for r in rows {
                    s.push_str(r);
                    s.push('\n');
                }
                s
            }
            _ => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

pub fn resolve_budget(flag: Option<u64>, env: Option<String>) -> Result<u64, Failure> {
    let budget = match (flag, env) {
        (Some(b), _) => b,
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{BUDGET_ENV}={v} is not an integer")))?,
        (None, None) => counting::default_budget(),
    };
    if budget < MIN_BUDGET {
        return Err(Failure::usage(format!("budget {budget} is below the minimum {MIN_BUDGET}")));
    }
    Ok(budget)
}

fn params_json(cfg: &RunConfig) -> Value {
    let mut params = match serde_json::to_value(CommandParams(&cfg.command)) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    };
    params.insert("strategy".into(), json!(cfg.strategy.to_string()));
    params.insert("budget".into(), json!(cfg.budget.to_string()));
    params.insert("seed".into(), json!(cfg.seed.to_string()));
    params.insert(
        "format".into(),
        json!(match cfg.format {
            Format::Json => "json",
            Format::Csv => "csv",
        }),
    );
    params.insert("workers".into(), json!(cfg.workers));
    Value::Object(params)
}

struct CommandParams<'a>(&'a Command);

impl serde::Serialize for CommandParams<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v = match self.0 {
            Command::Count { p, m, s, family } => json!({ "p": p, "m": m, "s": s, "family": family }),
            Command::Traces { p, m, mode } | Command::Mult { p, m, mode } => {
                json!({ "p": p, "m": m, "mode": mode_name(*mode) })
            }
            Command::Charpoly { p, m, ell } | Command::Order { p, m, ell } => json!({ "p": p, "m": m, "ell": ell }),
            Command::Rank { p, ell, m, mode } => json!({ "p": p, "ell": ell, "m": m, "mode": mode_name(*mode) }),
            Command::Table { p, ell, m_list } => json!({ "p": p, "ell": ell, "m_list": m_list }),
            Command::TwistCheck { h, p, ell, c } => json!({ "h": h, "p": p, "ell": ell, "c": c }),
            Command::JacobianDemo {
                p,
                ell,
                m,
                samples,
                trials,
            } => json!({ "p": p, "ell": ell, "m": m, "samples": samples, "trials": trials }),
            Command::Verify { suite } => json!({ "suite": Suite::from(*suite).as_str() }),
        };
        v.serialize(s)
    }
}

fn mode_name(m: ModeArg) -> &'static str {
    match m {
        ModeArg::Force => "force",
        ModeArg::Count => "count",
        ModeArg::CrossCheck => "cross-check",
    }
}

fn traces_json(t: &TraceProfile) -> Value {
    Value::Array(
        t.entries
            .iter()
            .map(|(s, e)| json!({ "s": s, "t": e.value.to_string(), "provenance": e.provenance.as_str() }))
            .collect(),
    )
}

fn opt_string<T: ToString>(x: &Option<T>) -> Value {
    x.as_ref().map_or(Value::Null, |v| Value::String(v.to_string()))
}

fn rank_results(r: &RankReport) -> (Value, Value) {
    let params = &r.params;
    let results = json!({
        "p": params.p,
        "ell": params.ell,
        "m": params.m,
        "q": params.q.to_string(),
        "q0": params.q0.to_string(),
        "genus": params.genus.to_string(),
        "d": params.d,
        "rank_mode": r.mode.as_str(),
        "rank": opt_string(&r.rank),
        "rank_lo": r.rank_lo.to_string(),
        "rank_hi": r.rank_hi.to_string(),
        "a": r.profile.as_ref().map(|a| a.a.iter().map(|(d, v)| (d.to_string(), Value::String(v.to_string()))).collect::<Map<_, _>>()),
        "unity_multiplicity": opt_string(&r.unity_multiplicity),
        "group_order": opt_string(&r.group_order),
        "order_valuation": opt_string(&r.order_valuation),
        "max_rank_lower": opt_string(&r.max_rank_lower),
        "traces": r.traces.as_ref().map(traces_json),
        "infeasible_s": r.plan.infeasible(),
    });
    let diagnostics = match &r.ratios {
        Some(x) => json!({
            "thm_main_ref": x.main_ref,
            "thm_main_bracket": [x.main_ref, 2.0 * x.main_ref],
            "ratio_main": x.ratio_main,
            "realmain1_ref": x.realmain1_ref,
            "ratio_realmain1": x.ratio_realmain1,
            "plain_ref": x.plain_ref,
            "ratio_plain": x.ratio_plain,
            "ratio_plain_epsilon": x.epsilon,
            "open_question": "the reference (q-1)/(2m) log_ell(p^2) and the plain (q-1)/(2m) differ by log_ell(p^2); both ratios are reported",
            "valuation_equals_rank": r.order_valuation == r.rank,
        }),
        None => json!({}),
    };
    (results, diagnostics)
}

fn fmt_f64(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.6}")).unwrap_or_default()
}

fn csv_row(r: &RankReport, seconds: f64) -> String {
    let p = &r.params;
    let s = |x: &Option<BigUint>| x.as_ref().map(|v| v.to_string()).unwrap_or_default();
    [
        p.p.to_string(),
        p.ell.to_string(),
        p.m.to_string(),
        p.q.to_string(),
        p.genus.to_string(),
        p.d.to_string(),
        r.mode.as_str().to_string(),
        r.rank_lo.to_string(),
        s(&r.rank),
        r.rank_hi.to_string(),
        s(&r.order_valuation),
        fmt_f64(r.ratios.as_ref().map(|x| x.main_ref)),
        fmt_f64(r.ratios.as_ref().map(|x| x.ratio_main)),
        fmt_f64(r.ratios.as_ref().map(|x| x.ratio_realmain1)),
        format!("{seconds:.3}"),
    ]
    .join(",")
}

fn multiplicities(p: u64, m: u64, mode: TraceMode, cfg: &RunConfig) -> Result<(TraceProfile, crate::cyclo::MultiplicityProfile), Failure> {
    let curve = make_curve(p, m)?;
    let t = trace_profile(&curve, mode, cfg.strategy, cfg.budget)?;
    let a = invert_multiplicities(&t)?;
    Ok((t, a))
}

fn factored_json(poly: &FactoredCharPoly) -> Value {
    Value::Object(
        poly.multiplicities
            .iter()
            .map(|(d, a)| (d.to_string(), Value::String(a.to_string())))
            .collect(),
    )
}

/// Run one command to a report.
pub fn execute(cfg: &RunConfig) -> Result<Report, Failure> {
    let start = Instant::now();
    let mut timings = Map::new();
    let mut csv_rows = None;
    let mut code = EXIT_OK;
    let (results, diagnostics) = match &cfg.command {
        Command::Count { p, m, s, family } => {
            if *s == 0 {
                return Err(Failure::usage("s must be positive"));
            }
            let count = if *family {
                make_curve(*p, *m)?.count_over(*s, cfg.strategy, cfg.budget)?
            } else {
                if *m == 0 {
                    return Err(Failure::usage("m must be positive"));
                }
                let k = *m;
                counting::small_instance_counts(*p, k, *s, cfg.strategy, cfg.budget)?.pop().expect("s >= 1")
            };
            let (q, field) = if *family {
                (crate::ffield::big_pow(*p, 2 * m), crate::ffield::big_pow(*p, 2 * s))
            } else {
                (crate::ffield::big_pow(*p, *m), crate::ffield::big_pow(*p, m * s))
            };
            (
                json!({ "count": count.to_string(), "q": q.to_string(), "field_size": field.to_string() }),
                json!({}),
            )
        }
        Command::Traces { p, m, mode } => {
            let curve = make_curve(*p, *m)?;
            let t = trace_profile(&curve, (*mode).into(), cfg.strategy, cfg.budget)?;
            (
                json!({ "q": curve.q.to_string(), "traces": traces_json(&t) }),
                json!({ "invariants_hold": t.invariants_hold() }),
            )
        }
        Command::Mult { p, m, mode } => {
            let (t, a) = multiplicities(*p, *m, (*mode).into(), cfg)?;
            let rows = adappears_check(&a)?;
            let bound: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "d": r.d,
                        "derived_lhs": r.derived_lhs.to_string(),
                        "derived_rhs": r.derived_rhs.to_string(),
                        "literal_lhs": r.literal_lhs.to_string(),
                        "literal_rhs": r.literal_rhs.to_string(),
                        "literal_holds": r.literal_holds,
                    })
                })
                .collect();
            let table: Map<String, Value> = a.a.iter().map(|(d, v)| (d.to_string(), json!(v.to_string()))).collect();
            (
                json!({ "a": table, "traces": traces_json(&t) }),
                json!({ "bound_rows": bound }),
            )
        }
        Command::Charpoly { p, m, ell } => {
            let (_, a) = multiplicities(*p, *m, TraceMode::Force, cfg)?;
            let poly = FactoredCharPoly::from_profile(&a)?;
            let expanded = poly
                .expand(EXPANSION_LIMIT)
                .ok()
                .map(|c| c.coeffs.iter().map(|x| x.to_string()).collect::<Vec<_>>());
            let mut res = json!({
                "base": poly.base().to_string(),
                "degree": poly.degree().to_string(),
                "factored": factored_json(&poly),
                "coefficients": expanded,
            });
            if let Some(l) = ell {
                res["ell"] = json!(l);
                res["unity_multiplicity_mod_ell"] = json!(poly.unity_multiplicity_mod_ell(*l).to_string());
            }
            (res, json!({}))
        }
        Command::Order { p, m, ell } => {
            let (_, a) = multiplicities(*p, *m, TraceMode::Force, cfg)?;
            let poly = FactoredCharPoly::from_profile(&a)?;
            let factored = FactoredOrder::from_charpoly(&poly);
            let mut res = json!({
                "group_order": opt_string(&poly.group_order(GROUP_ORDER_MAX_BITS)),
                "factorization": factored.as_ref().map(|f| f.factors.iter().map(|(r, e)| (r.to_string(), json!(e.to_string()))).collect::<Map<_, _>>()),
                "bits": factored.as_ref().map(|f| f.bits()),
            });
            if let Some(l) = ell {
                res["ell"] = json!(l);
                res["order_valuation"] = json!(poly.order_valuation(*l).to_string());
            }
            (res, json!({}))
        }
        Command::Rank { p, ell, m, mode } => {
            let params = validate_family(*p, *ell, *m)?;
            let r = torsion::rank(&params, (*mode).into(), cfg.strategy, cfg.budget)?;
            rank_results(&r)
        }
        Command::Table { p, ell, m_list } => {
            let mut rows = Vec::new();
            let mut csv = Vec::new();
            for &m in m_list {
                let t0 = Instant::now();
                let params = validate_family(*p, *ell, m)?;
                let r = torsion::rank(&params, TraceMode::Force, cfg.strategy, cfg.budget)?;
                let secs = t0.elapsed().as_secs_f64();
                let (res, diag) = rank_results(&r);
                rows.push(json!({ "results": res, "diagnostics": diag }));
                csv.push(csv_row(&r, secs));
                timings.insert(format!("m_{m}_seconds"), json!(secs));
            }
            csv_rows = Some(csv);
            (json!({ "rows": rows }), json!({}))
        }
        Command::TwistCheck { h, p, ell, c } => {
            let r = torsion::twist_decomposition_check(h, *p, *ell, *c, crate::jacobian::enumerate::ENUMERATION_BUDGET)?;
            let census = |c: &crate::jacobian::Census| json!({ "group_order": c.group_order, "count": c.count, "rank": c.rank });
            (
                json!({
                    "genus": r.genus,
                    "base": census(&r.base),
                    "twist": census(&r.twist),
                    "over_p2": census(&r.over_p2),
                    "decomposition_holds": true,
                    "max_rank_lower": r.max_rank_lower,
                }),
                json!({}),
            )
        }
        Command::JacobianDemo {
            p,
            ell,
            m,
            samples,
            trials,
        } => jacobian_demo(*p, *ell, *m, *samples, *trials, cfg, &mut timings)?,
        Command::Verify { suite } => {
            let reports = verify::run(
                (*suite).into(),
                &VerifyConfig {
                    budget: cfg.budget,
                    seed: cfg.seed,
                },
            );
            let passed = reports.iter().all(|r| r.passed);
            if !passed {
                code = EXIT_ASSERTION;
            }
            let diagnostics: Map<String, Value> = reports
                .iter()
                .map(|r| (r.suite.to_string(), serde_json::to_value(&r.diagnostics).expect("serializable")))
                .collect();
            let suites: Vec<Value> = reports
                .iter()
                .map(|r| json!({ "suite": r.suite, "passed": r.passed, "checks": r.checks }))
                .collect();
            (json!({ "passed": passed, "suites": suites }), Value::Object(diagnostics))
        }
    };
    timings.insert("total_seconds".into(), json!(start.elapsed().as_secs_f64()));
    Ok(Report {
        command: cfg.command.name(),
        params: params_json(cfg),
        results,
        diagnostics,
        timings,
        seed: cfg.seed,
        csv_rows,
        code,
    })
}

fn jacobian_demo(
    p: u64,
    ell: u64,
    m: u64,
    samples: u64,
    trials: u32,
    cfg: &RunConfig,
    timings: &mut Map<String, Value>,
) -> Result<(Value, Value), Failure> {
    let params = validate_family(p, ell, m)?;
    let (_, a) = multiplicities(p, m, TraceMode::Force, cfg)?;
    let poly = FactoredCharPoly::from_profile(&a)?;
    let order = FactoredOrder::from_charpoly(&poly).ok_or_else(|| Failure::assertion("group order does not factor in 64-bit pieces"))?;
    let q: usize = params
        .q
        .to_string()
        .parse()
        .map_err(|_| Failure::usage("q too large for a polynomial model"))?;
    let ctx = make_extension(p, 2).map_err(|e| Failure::assertion(e.to_string()))?;
    let model = HyperellipticModel::artin_schreier(&ctx, q)?;
    let t0 = Instant::now();
    let annihilated = check_order_annihilates(&model, &order, samples, cfg.seed)?;
    timings.insert("annihilation_seconds".into(), json!(t0.elapsed().as_secs_f64()));
    if !annihilated {
        return Err(Failure::assertion(format!("N D is not the identity for some of {samples} random divisors")));
    }
    let t1 = Instant::now();
    let (e, used) = find_order_ell_element(&model, &order, ell, trials, cfg.seed)?;
    timings.insert("witness_seconds".into(), json!(t1.elapsed().as_secs_f64()));
    let valid = model.is_valid(&e) && !e.is_identity() && model.scalar_mul_u64(ell, &e).is_identity();
    if !valid {
        return Err(Failure::assertion("order-ell witness failed verification"));
    }
    let poly_json = |f: &crate::ffield::poly::FieldPoly| {
        Value::Array(f.to_elements(&ctx).iter().map(|c| json!(c.coeffs())).collect())
    };
    Ok((
        json!({
            "genus": model.genus(),
            "group_order_bits": order.bits(),
            "order_valuation": order.valuation(ell).to_string(),
            "samples": samples,
            "order_annihilates": annihilated,
            "witness": { "u": poly_json(&e.u), "v": poly_json(&e.v), "weight": e.weight(), "trials_used": used },
        }),
        json!({}),
    ))
}

/// Write atomically: a temporary file in the target directory, then rename.
pub fn write_atomic(path: &std::path::Path, contents: &str) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or_else(|| std::path::Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn run_config(cfg: &RunConfig) -> Result<i32, Failure> {
    let report = match cfg.workers {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::usage(e.to_string()))?;
            pool.install(|| execute(cfg))?
        }
        None => execute(cfg)?,
    };
    if cfg.format == Format::Csv && report.csv_rows.is_none() {
        return Err(Failure::usage("csv output is only available for `table`"));
    }
    let text = report.render(cfg.format);
    match &cfg.out {
        Some(path) => write_atomic(path, &text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(report.code)
}

fn parse_config<I, T>(args: I) -> Result<RunConfig, Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| Failure {
        code: match e.kind() {
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
            _ => EXIT_USAGE,
        },
        message: e.render().to_string(),
    })?;
    let budget = resolve_budget(cli.common.budget, std::env::var(BUDGET_ENV).ok())?;
    Ok(RunConfig {
        command: cli.command,
        strategy: cli.common.strategy,
        budget,
        seed: cli.common.seed,
        format: cli.common.format,
        out: cli.common.out,
        workers: cli.common.workers,
    })
}

/// Run a command line to `(exit code, rendered report)` without touching
/// standard output or `--out`.
pub fn report_from_args<I, T>(args: I) -> Result<(i32, String), Failure>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = parse_config(args)?;
    let report = execute(&cfg)?;
    if cfg.format == Format::Csv && report.csv_rows.is_none() {
        return Err(Failure::usage("csv output is only available for `table`"));
    }
    Ok((report.code, report.render(cfg.format)))
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match parse_config(args) {
        Ok(c) => c,
        Err(f) if f.code == EXIT_OK => {
            print!("{}", f.message);
            return EXIT_OK;
        }
        Err(f) => {
            eprint!("{}", f.message);
            if !f.message.ends_with('\n') {
                eprintln!();
            }
            return f.code;
        }
    };
    match run_config(&cfg) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {} ({})", f.message, cfg.command.name());
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command) -> RunConfig {
        RunConfig {
            command,
            strategy: Strategy::Auto,
            budget: 1 << 20,
            seed: 0,
            format: Format::Json,
            out: None,
            workers: None,
        }
    }

    #[test]
    fn budget_resolution() {
        assert_eq!(resolve_budget(Some(2048), Some("9".into())).unwrap(), 2048);
        assert_eq!(resolve_budget(None, Some("4096".into())).unwrap(), 4096);
        assert_eq!(resolve_budget(None, None).unwrap(), 1 << 26);
        assert_eq!(resolve_budget(Some(10), None).unwrap_err().code, EXIT_USAGE);
        assert_eq!(resolve_budget(None, Some("x".into())).unwrap_err().code, EXIT_USAGE);
    }

    #[test]
    fn report_keys() {
        let r = execute(&cfg(Command::Count {
            p: 3,
            m: 1,
            s: 2,
            family: false,
        }))
        .unwrap();
        let v = r.to_json();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["command", "diagnostics", "params", "results", "seed", "timings", "version"]);
        assert_eq!(v["results"]["count"], "16");
    }

    #[test]
    fn csv_rows_for_interval_and_exact() {
        let mut c = cfg(Command::Table {
            p: 5,
            ell: 3,
            m_list: vec![2, 1000],
        });
        c.format = Format::Csv;
        let text = execute(&c).unwrap().render(Format::Csv);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("5,3,2,625,312,2,exact,"));
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(fields.len(), 15);
        assert_eq!(fields[6], "interval");
        assert_eq!(fields[8], "");
        assert!(!fields[7].is_empty() && !fields[9].is_empty());
    }

    #[test]
    fn inadmissible_is_usage_error() {
        let e = execute(&cfg(Command::Rank {
            p: 5,
            ell: 3,
            m: 3,
            mode: ModeArg::Force,
        }))
        .err()
        .unwrap();
        assert_eq!(e.code, EXIT_USAGE);
    }
}
