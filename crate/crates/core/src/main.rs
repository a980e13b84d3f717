use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use log::error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use sunit_fermat::criteria::{afc_verdict, ds_congruence_check, ko_verdict, layer_verdict, GeneralizedCoefficients};
use sunit_fermat::field::descriptor::field_from_spec;
use sunit_fermat::field::{NumberField, PrimeIdeal};
use sunit_fermat::lmfdb::{ClientConfig, LmfdbClient};
use sunit_fermat::orbits::{orbit_classes, orbit_report};
use sunit_fermat::serre_mazur::{classify_conductor_2l, classify_conductor_2l_with_bound, default_probes, exponent_bound_for_l, DEFAULT_PROBE_COUNT};
use sunit_fermat::solver::{obstructions, solve_with, SolveOptions};
use sunit_fermat::sunit::{primes_above_all, SUnitGroup};
use sunit_fermat::survey::{squarefree_scan, Family, ScanConfig};
use sunit_fermat::{Error, Result};

const DEFAULT_BOUND: i64 = 12;

#[derive(Parser)]
#[command(name = "sunit", version, about = "S-unit equations and asymptotic Fermat criteria")]
struct Cli {
    /// JSON file with default settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Exponent bound for the S-unit search.
    #[arg(long, global = true)]
    bound: Option<i64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Never use the network; read newforms from fixtures.
    #[arg(long, global = true)]
    offline: bool,
    /// Directory of level_N.json newform payloads.
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Human-readable output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Increase log verbosity (stderr).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Invariants of a field.
    FieldInfo {
        #[arg(long)]
        field: String,
    },
    /// Solve lambda + mu = 1 in S-units.
    Solve {
        #[arg(long)]
        field: String,
        /// `above:2,3` or `none`.
        #[arg(long, default_value = "above:2")]
        s: String,
        /// Skip the completeness re-run at a larger bound.
        #[arg(long)]
        no_check: bool,
    },
    /// S3-orbits of the solutions and their Legendre curves.
    Orbits {
        #[arg(long)]
        field: String,
        #[arg(long, default_value = "above:2")]
        s: String,
    },
    /// Asymptotic Fermat verdict for a field, generalized coefficients or a cyclotomic layer.
    Criteria {
        #[arg(long)]
        field: Option<String>,
        /// A,B,C for A x^p + B y^p + C z^p = 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Option<Vec<i64>>,
        /// With --coeffs over Q: test the congruence condition at this prime.
        #[arg(long)]
        ell: Option<u64>,
        /// `ell,n` for the n-th layer of the cyclotomic Z_ell extension.
        #[arg(long, value_delimiter = ',')]
        layer: Option<Vec<u64>>,
    },
    /// Exponent bound for x^p + y^p + L^r z^p = 0.
    SerreMazur {
        #[arg(long = "L")]
        l: u64,
        #[arg(long, value_delimiter = ',')]
        probes: Option<Vec<u64>>,
    },
    /// Elliptic curves with full 2-torsion and conductor 2L.
    #[command(name = "classify-2L")]
    Classify2L {
        #[arg(long = "L")]
        l: u64,
    },
    /// Splitting of 2 and verdict tallies over squarefree quadratic fields.
    Density {
        #[arg(long)]
        x: u64,
        #[arg(long, value_enum, default_value = "real")]
        family: FamilyArg,
        #[arg(long)]
        classify_only: bool,
    },
    /// Fetch newform data for levels into the cache.
    WarmCache {
        #[arg(long, value_delimiter = ',')]
        levels: Vec<u64>,
        /// Remove cached entries first.
        #[arg(long)]
        purge: bool,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FamilyArg {
    Real,
    Imaginary,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    bound: Option<i64>,
    threads: Option<usize>,
    offline: Option<bool>,
    fixtures: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
    base_url: Option<String>,
}

struct Settings {
    bound: Option<i64>,
    pretty: bool,
    client: ClientConfig,
}

fn settings(cli: &Cli) -> Result<Settings> {
    let file: FileConfig = match &cli.config {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => FileConfig::default(),
    };
    let mut client = ClientConfig::from_env();
    if let Some(u) = file.base_url {
        client.base_url = u;
    }
    client.offline = cli.offline || file.offline.unwrap_or(false);
    client.fixtures_dir = cli.fixtures.clone().or(file.fixtures);
    if let Some(d) = cli.cache_dir.clone().or(file.cache_dir) {
        client.cache_dir = Some(d);
    }
    if let Some(n) = cli.threads.or(file.threads) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Precondition(e.to_string()))?;
    }
    Ok(Settings { bound: cli.bound.or(file.bound), pretty: cli.pretty, client })
}

fn parse_s(field: &Arc<NumberField>, spec: &str) -> Result<Vec<PrimeIdeal>> {
    let spec = spec.trim();
    if spec == "none" || spec.is_empty() {
        return Ok(vec![]);
    }
    let list = spec
        .strip_prefix("above:")
        .ok_or_else(|| Error::InvalidDescriptor(format!("bad S spec {spec:?}; use above:2,3 or none")))?;
    let ps = list
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| Error::InvalidDescriptor(format!("bad prime {t:?}"))))
        .collect::<Result<Vec<_>>>()?;
    primes_above_all(field, &ps)
}

fn prime_json(p: &PrimeIdeal) -> Value {
    json!({"label": p.label, "p": p.p, "e": p.e, "f": p.f})
}

fn emit(v: &Value, pretty: bool) -> Result<()> {
    let s = if pretty { serde_json::to_string_pretty(v)? } else { serde_json::to_string(v)? };
    println!("{s}");
    Ok(())
}

fn emit_with_schema<T: Serialize>(schema: &str, v: &T, pretty: bool) -> Result<()> {
    let mut v = serde_json::to_value(v)?;
    if let Value::Object(m) = &mut v {
        m.entry("schema").or_insert_with(|| Value::from(schema));
    }
    emit(&v, pretty)
}

fn field_info(field: &Arc<NumberField>, pretty: bool) -> Result<()> {
    let (r1, r2) = field.signature();
    let (tor, order) = field.torsion_generator();
    let above2: Vec<Value> = field.primes_above(2)?.iter().map(prime_json).collect();
    let class_number = field.class_number().ok();
    emit(
        &json!({
            "schema": "field-info/v1",
            "label": field.label(),
            "degree": field.degree(),
            "signature": [r1, r2],
            "discriminant": field.discriminant().to_string(),
            "class_number": class_number,
            "fundamental_units": field.fundamental_units(),
            "torsion": {"generator": tor, "order": order},
            "primes_above_2": above2,
        }),
        pretty,
    )
}

fn run(cli: Cli) -> Result<i32> {
    let st = settings(&cli)?;
    let bound = st.bound.unwrap_or(DEFAULT_BOUND);
    let pretty = st.pretty;
    match cli.cmd {
        Cmd::FieldInfo { field } => field_info(&field_from_spec(&field)?, pretty)?,
        Cmd::Solve { field, s, no_check } => {
            let k = field_from_spec(&field)?;
            let g = SUnitGroup::new(k.clone(), parse_s(&k, &s)?)?;
            let opts = SolveOptions { check_completeness: !no_check, threads: cli.threads, ..Default::default() };
            let sols = solve_with(&g, bound, &opts)?;
            let header = json!({
                "schema": "solve/v1",
                "field": k.label(),
                "s": g.primes().iter().map(|p| p.label.clone()).collect::<Vec<_>>(),
                "rank": g.rank(),
                "bound": sols.bound,
                "check_bound": sols.check_bound,
                "complete": sols.complete,
                "count": sols.len(),
                "evertse_bound": sols.evertse_bound,
                "obstructions": obstructions(&k, g.primes()),
            });
            if pretty {
                emit(&header, true)?;
                println!("{:>5}  {:<40} {:<40}", "#", "lambda", "mu");
                for (i, s) in sols.solutions.iter().enumerate() {
                    println!("{:>5}  {:<40} {:<40}", i, s.lambda.to_string(), s.mu.to_string());
                }
            } else {
                emit(&header, false)?;
                for s in &sols.solutions {
                    emit(&serde_json::to_value(s)?, false)?;
                }
            }
        }
        Cmd::Orbits { field, s } => {
            let k = field_from_spec(&field)?;
            let g = SUnitGroup::new(k.clone(), parse_s(&k, &s)?)?;
            let sols = solve_with(&g, bound, &SolveOptions { threads: cli.threads, ..Default::default() })?;
            let orbits = orbit_classes(&k, &sols.solutions)?;
            emit(
                &json!({"schema": "orbits/v1", "field": k.label(), "bound": bound, "complete": sols.complete,
                        "solutions": sols.len(), "orbits": orbits.len()}),
                pretty,
            )?;
            for o in &orbits {
                emit(&serde_json::to_value(orbit_report(&k, o)?)?, pretty)?;
            }
        }
        Cmd::Criteria { field, coeffs, ell, layer } => {
            let rep = if let Some(l) = layer {
                let [ell, n] = l[..] else {
                    return Err(Error::Precondition("--layer takes ell,n".into()));
                };
                layer_verdict(ell, n as u32)?
            } else if let (Some(c), Some(ell)) = (&coeffs, ell) {
                let [a, b, cc] = c[..] else {
                    return Err(Error::Precondition("--coeffs takes A,B,C".into()));
                };
                let ok = ds_congruence_check(a, b, cc, ell)?;
                emit(&json!({"schema": "ds-check/v1", "coeffs": [a, b, cc], "ell": ell, "congruence": ok}), pretty)?;
                return Ok(0);
            } else {
                let k = field_from_spec(field.as_deref().unwrap_or("Q"))?;
                let opts = SolveOptions { threads: cli.threads, ..Default::default() };
                match coeffs {
                    Some(c) => {
                        let [a, b, cc] = c[..] else {
                            return Err(Error::Precondition("--coeffs takes A,B,C".into()));
                        };
                        let gc = GeneralizedCoefficients::integers(&k, a, b, cc)?;
                        let sets = sunit_fermat::criteria::ko_sets(&k, &gc)?;
                        let g = SUnitGroup::new(k.clone(), sets.s)?;
                        ko_verdict(&k, &gc, &solve_with(&g, bound, &opts)?)?
                    }
                    None => {
                        let g = SUnitGroup::above(&k, &[2])?;
                        afc_verdict(&k, &solve_with(&g, bound, &opts)?)?
                    }
                }
            };
            emit_with_schema("criterion-report/v1", &rep, pretty)?;
            return Ok(rep.verdict.exit_code());
        }
        Cmd::SerreMazur { l, probes } => {
            let client = LmfdbClient::new(st.client);
            let forms = client.fetch_newforms(2 * l)?;
            let probes = probes.unwrap_or_else(|| default_probes(l, DEFAULT_PROBE_COUNT));
            emit_with_schema("exponent-bound/v1", &exponent_bound_for_l(l, &forms, &probes)?, pretty)?;
        }
        Cmd::Classify2L { l } => {
            let c = match st.bound {
                Some(b) => classify_conductor_2l_with_bound(l, b)?,
                None => classify_conductor_2l(l)?,
            };
            emit_with_schema("classify-2L/v1", &c, pretty)?;
        }
        Cmd::Density { x, family, classify_only } => {
            let family = match family {
                FamilyArg::Real => Family::Real,
                FamilyArg::Imaginary => Family::Imaginary,
            };
            let cfg = ScanConfig { bound: st.bound.unwrap_or(ScanConfig::default().bound), classify_only, record_entries: true };
            let rep = squarefree_scan(x, family, &cfg)?;
            if pretty {
                println!("X = {}  family = {:?}  squarefree d = {}", rep.x, rep.family, rep.total);
                for (k, v) in &rep.splitting {
                    println!("  2 {k:<9} {v:>8}  {}", rep.splitting_proportions[k]);
                }
                for (k, v) in &rep.verdicts {
                    println!("  {k:<24} {v:>8}  {}", rep.verdict_proportions[k]);
                }
            } else {
                emit_with_schema("density-report/v1", &rep, false)?;
            }
        }
        Cmd::WarmCache { levels, purge } => {
            let client = LmfdbClient::new(st.client);
            if client.config().cache_dir.is_none() {
                return Err(Error::Precondition("warm-cache needs --cache-dir or SUNIT_CACHE_DIR".into()));
            }
            let purged = if purge { client.purge_cache()? } else { 0 };
            let s = client.warm_cache(&levels);
            emit(&json!({"schema": "warm-cache/v1", "purged": purged, "summary": s}), pretty)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
