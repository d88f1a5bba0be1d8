//! Command-line front end: `analyze`, `generate`, `product-test`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::analyze::analyze_bipartite;
use crate::certificate::Certificate;
use crate::criteria::{self, FullRankOutcome, FullRankSide, SearchBudget};
use crate::families::{self, CheckerboardParams, Cut, Fixture, FixtureSpec, LabelStateSpec};
use crate::io::{self, StateData};
use crate::linalg::{c, kron_vec, CVector, C64};
use crate::product_search::{self, Subspace};
use crate::rank4::decide_rank4;
use crate::sampling::{random_vector, seeded};
use crate::state::BipartiteState;
use crate::structure::{analyze_reducible, decompose_b_direct_seeded};
use crate::tripartite::{classify_pairs, ghz_test, reduced_pair, TripartitePure};
use crate::{Error, Result, ToleranceConfig};

#[derive(Parser, Debug)]
#[command(name = "entcert", version, about = "Certified distillability and separability decisions for low-rank states")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Flags {
    /// Relative residual tolerance.
    #[arg(long, global = true, env = "ENTCERT_TOL")]
    pub tol: Option<f64>,
    /// Absolute PSD eigenvalue floor.
    #[arg(long, global = true, env = "ENTCERT_PSD_TOL")]
    pub psd_tol: Option<f64>,
    /// Scale of the singular-value rank cutoff.
    #[arg(long, global = true, env = "ENTCERT_RANK_TOL_FACTOR")]
    pub rank_tol_factor: Option<f64>,
    #[arg(long, global = true, env = "ENTCERT_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Search effort: restarts per product search; other limits scale with it.
    #[arg(long, global = true, env = "ENTCERT_BUDGET", default_value_t = 40)]
    pub budget: usize,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true, env = "ENTCERT_TEXT")]
    pub text: bool,
    /// Include wall-clock time in reports (makes them non-reproducible).
    #[arg(long, global = true, env = "ENTCERT_TIMING")]
    pub timing: bool,
    /// Write the output here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analyze a state file.
    Analyze {
        path: PathBuf,
        #[arg(long, value_enum, env = "ENTCERT_MODE", default_value_t = Mode::Auto)]
        mode: Mode,
    },
    /// Write a state file for a named family.
    Generate {
        family: Family,
        /// Positional parameters (family dependent).
        #[arg(allow_negative_numbers = true)]
        params: Vec<String>,
        /// Parameters as JSON, overriding positional ones.
        #[arg(long)]
        params_json: Option<String>,
        /// Draw random parameters from the seed.
        #[arg(long)]
        random: bool,
        /// Store the fixture description instead of the materialized state.
        #[arg(long)]
        as_fixture: bool,
    },
    /// Closed-form hypersurface test and numeric product-vector search.
    ProductTest { path: PathBuf },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Auto,
    Ppt,
    FullRank,
    Rank4,
    Reduce,
    Tripartite,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Checkerboard,
    Antisymmetric,
    Werner,
    UpbTiles,
    UpbShifts,
    Ghz,
    Label,
    ReducibleExample,
    Bell,
    /// `k`-dimensional subspace of `M ⊗ N`; with `--random` it contains a product vector.
    Subspace,
    /// The 2⊗3 basis on which the cubic equals −1.
    CubicExample,
}

impl Flags {
    pub fn tolerance(&self, file: Option<&io::ToleranceOverride>) -> Result<ToleranceConfig> {
        let base = match file {
            Some(o) => o.apply(ToleranceConfig::default())?,
            None => ToleranceConfig::default(),
        };
        ToleranceConfig::new(
            self.rank_tol_factor.unwrap_or(base.rank_tol_factor),
            self.psd_tol.unwrap_or(base.psd_tol),
            self.tol.unwrap_or(base.residual_tol),
        )
    }

    pub fn search_budget(&self) -> Result<SearchBudget> {
        budget_from_level(self.seed, self.budget)
    }
}

/// Budget level `b` = product-search restarts; the default level 40 gives the
/// library defaults.
pub fn budget_from_level(seed: u64, b: usize) -> Result<SearchBudget> {
    if b == 0 {
        return Err(Error::InvalidParameter("budget must be positive".into()));
    }
    Ok(SearchBudget {
        seed,
        product_restarts: b,
        witness_frames: (b * 8).div_ceil(5),
        x_sweep: (b * 32).div_ceil(5).max(40),
        frp_samples: (b * 8).div_ceil(5),
    })
}

/// Report body plus whether it settles the question asked.
#[derive(Debug, Clone)]
pub struct Report {
    pub body: Value,
    pub decided: bool,
}

impl Report {
    pub fn render(&self, text: bool) -> String {
        if text {
            let mut out = String::new();
            render_text(&self.body, "", &mut out);
            out
        } else {
            let mut s = serde_json::to_string_pretty(&self.body).expect("report serializes");
            s.push('\n');
            s
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.decided {
            0
        } else {
            2
        }
    }
}

fn render_text(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                render_text(x, &key, out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar_text).collect();
            out.push_str(&format!("{prefix}: {}\n", parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                render_text(x, &format!("{prefix}[{i}]"), out);
            }
        }
        other => out.push_str(&format!("{prefix}: {}\n", scalar_text(other))),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(_) | Value::Object(_) => v.to_string(),
        other => other.to_string(),
    }
}

fn header(command: &str, digest: &str, budget: &SearchBudget, tol: &ToleranceConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("input_digest".into(), json!(digest));
    m.insert("seed".into(), json!(budget.seed));
    m.insert("budget".into(), io::budget_json(budget));
    m.insert("tolerance".into(), io::tolerance_json(tol));
    m
}

fn certified(cert: &Certificate, rho: &BipartiteState) -> Result<Value> {
    let reval = cert.validate(rho)?;
    Ok(io::certificate_json(cert, Some(&reval)))
}

fn frp_json(o: &FullRankOutcome) -> Value {
    match o {
        FullRankOutcome::Holds { x } => json!({ "outcome": "Holds", "x": io::vector_num(x) }),
        FullRankOutcome::Violated { samples, failure_bound } => {
            json!({ "outcome": "Violated", "samples": samples, "failure_bound": failure_bound })
        }
        FullRankOutcome::ShortcutHolds => json!({ "outcome": "ShortcutHolds" }),
        FullRankOutcome::ShortcutViolated => json!({ "outcome": "ShortcutViolated" }),
    }
}

fn analyze_state(rho: &BipartiteState, mode: Mode, budget: &SearchBudget) -> Result<(Value, bool)> {
    let (m, n) = rho.dims();
    let mut body = Map::new();
    body.insert("dims".into(), json!([m, n]));
    body.insert("rank".into(), json!(rho.rank()));
    body.insert("local_ranks".into(), json!(rho.local_ranks()));
    let decided = match mode {
        Mode::Auto | Mode::Rank4 => {
            let cert = if mode == Mode::Auto {
                analyze_bipartite(rho, budget)?
            } else {
                decide_rank4(rho, budget)?
            };
            body.insert("certificate".into(), certified(&cert, rho)?);
            cert.is_decided()
        }
        Mode::Ppt => {
            let (ppt, min) = criteria::is_ppt(rho);
            let (violated, _) = criteria::reduction_criterion(rho);
            let trivial = criteria::trivially_distillable(rho);
            body.insert("ppt".into(), json!(ppt));
            body.insert("min_eig_gamma".into(), json!(min));
            body.insert("reduction_violated".into(), json!(violated));
            body.insert("trivial_witness".into(), trivial.as_ref().map_or(Value::Null, io::witness_json));
            true
        }
        Mode::FullRank => {
            let right = criteria::full_rank_property(rho, FullRankSide::Right, budget);
            let left = criteria::full_rank_property(rho, FullRankSide::Left, budget);
            body.insert("distillable_by_violation".into(), json!(!right.holds() || !left.holds()));
            body.insert("right".into(), frp_json(&right));
            body.insert("left".into(), frp_json(&left));
            true
        }
        Mode::Reduce => {
            let decomp = decompose_b_direct_seeded(rho, budget.seed);
            body.insert("components".into(), json!(decomp.len()));
            let ranks: Vec<usize> = decomp.components.iter().map(|c| c.rank()).collect();
            body.insert("component_ranks".into(), json!(ranks));
            if decomp.is_reducible() {
                let cert = analyze_reducible(rho, &decomp, budget)?;
                body.insert("certificate".into(), certified(&cert, rho)?);
                cert.is_decided()
            } else {
                true
            }
        }
        Mode::Tripartite => {
            return Err(Error::InvalidParameter("tripartite mode needs a tripartite file".into()));
        }
    };
    Ok((Value::Object(body), decided))
}

fn analyze_tripartite(psi: &TripartitePure, budget: &SearchBudget) -> Result<(Value, bool)> {
    let cls = classify_pairs(psi, budget)?;
    let ghz = ghz_test(psi, budget)?;
    let mut decided = true;
    let pairs: Vec<Value> = cls
        .pairs
        .iter()
        .map(|p| {
            decided &= p.verdict.is_decided();
            let reval = p.verdict.validate(&reduced_pair(psi, p.pair))?;
            Ok(json!({
                "pair": p.pair.name(),
                "ppt": p.ppt,
                "min_eig_gamma": p.min_eig_gamma,
                "certificate": io::certificate_json(&p.verdict, Some(&reval)),
            }))
        })
        .collect::<Result<_>>()?;
    let form = cls.canonical_form.as_ref().map(|f| {
        json!({
            "a_vectors": f.a_vectors.iter().map(io::vector_num).collect::<Vec<_>>(),
            "u_b": io::matrix_num(&f.u_b),
            "u_c": io::matrix_num(&f.u_c),
            "residual": f.residual,
        })
    });
    let (a, b, cc) = psi.dims();
    Ok((
        json!({
            "dims": [a, b, cc],
            "pairs": pairs,
            "canonical_form": form,
            "ghz": {
                "is_ghz": ghz.is_ghz,
                "coefficients": ghz.coefficients,
                "undistillable_route": ghz.undistillable_route,
                "zero_discord_route": ghz.zero_discord_route,
            },
        }),
        decided,
    ))
}

fn materialize(data: StateData) -> Result<StateData> {
    Ok(match data {
        StateData::Fixture(spec) => match families::make_fixture(&spec)? {
            Fixture::Bipartite(rho) => StateData::Bipartite(rho),
            Fixture::Tripartite(psi) => StateData::Tripartite(psi),
        },
        other => other,
    })
}

fn with_tolerance(data: StateData, tol: ToleranceConfig) -> Result<StateData> {
    Ok(match data {
        StateData::Bipartite(rho) => {
            StateData::Bipartite(BipartiteState::with_tolerance(rho.dim_a(), rho.dim_b(), rho.matrix().clone(), tol)?)
        }
        StateData::Tripartite(psi) => {
            StateData::Tripartite(TripartitePure::with_tolerance(psi.dims(), psi.amplitudes().clone(), tol)?)
        }
        StateData::Subspace(v) => StateData::Subspace(Subspace::with_tolerance(v.dim_a(), v.dim_b(), v.basis().to_vec(), &tol)?),
        other => other,
    })
}

pub fn cmd_analyze(path: &Path, mode: Mode, flags: &Flags) -> Result<Report> {
    let start = Instant::now();
    let loaded = io::read_state_file(path)?;
    let tol = flags.tolerance(loaded.tolerance.as_ref())?;
    let budget = flags.search_budget()?;
    let data = with_tolerance(materialize(loaded.data)?, tol)?;
    let mut body = header("analyze", &loaded.digest, &budget, &tol);
    let (result, decided) = match (&data, mode) {
        (StateData::Tripartite(psi), Mode::Auto | Mode::Tripartite) => {
            body.insert("mode".into(), json!("tripartite"));
            analyze_tripartite(psi, &budget)?
        }
        (StateData::Tripartite(_), _) => {
            return Err(Error::InvalidParameter("tripartite files support modes auto and tripartite".into()))
        }
        (StateData::Bipartite(rho), mode) => {
            body.insert("mode".into(), json!(format!("{mode:?}").to_lowercase()));
            analyze_state(rho, mode, &budget)?
        }
        (StateData::Subspace(_), _) => {
            return Err(Error::InvalidParameter("subspace files are analyzed with product-test".into()))
        }
        (StateData::Fixture(_), _) => unreachable!("fixtures are materialized"),
    };
    body.insert("decided".into(), json!(decided));
    body.insert("result".into(), result);
    if flags.timing {
        body.insert("timing_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    }
    Ok(Report {
        body: Value::Object(body),
        decided,
    })
}

pub fn cmd_product_test(path: &Path, flags: &Flags) -> Result<Report> {
    let start = Instant::now();
    let loaded = io::read_state_file(path)?;
    let tol = flags.tolerance(loaded.tolerance.as_ref())?;
    let budget = flags.search_budget()?;
    let StateData::Subspace(v) = with_tolerance(materialize(loaded.data)?, tol)? else {
        return Err(Error::InvalidParameter("product-test needs a subspace file".into()));
    };
    let mut body = header("product-test", &loaded.digest, &budget, &tol);
    body.insert("dims".into(), json!([v.dim_a(), v.dim_b()]));
    body.insert("k".into(), json!(v.dim()));
    let poly = product_search::hypersurface(&v);
    let search = product_search::find_product_vector_with(&v, &budget, &tol);
    let found = search.found.is_some();
    let rel_limit = 1e-8;
    match &poly {
        Some(h) => {
            body.insert(
                "hypersurface".into(),
                json!({
                    "degree": h.degree,
                    "value": io::complex_num(h.value),
                    "scale": h.scale,
                    "relative": h.relative(),
                    "vanishes": h.vanishes(rel_limit),
                }),
            );
        }
        None => {
            body.insert("hypersurface".into(), Value::Null);
            body.insert(
                "note".into(),
                json!("no closed-form hypersurface for this shape; numeric search only"),
            );
        }
    }
    body.insert(
        "search".into(),
        json!({
            "found": found,
            "best_residual": search.best_residual,
            "attempts": search.attempts,
            "factors": search.found.as_ref().map(|p| json!({
                "a": io::vector_num(&p.a),
                "b": io::vector_num(&p.b),
                "coefficients": io::vector_num(&p.coefficients),
                "residual": p.residual,
            })),
        }),
    );
    let agree = poly.as_ref().map(|h| h.vanishes(rel_limit) == found);
    body.insert("agreement".into(), json!(agree));
    let decided = agree.unwrap_or(true);
    body.insert("decided".into(), json!(decided));
    if flags.timing {
        body.insert("timing_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    }
    Ok(Report {
        body: Value::Object(body),
        decided,
    })
}

fn param<T: std::str::FromStr>(params: &[String], i: usize, name: &str) -> Result<T> {
    let raw = params
        .get(i)
        .ok_or_else(|| Error::InvalidParameter(format!("missing parameter {name}")))?;
    raw.parse()
        .map_err(|_| Error::InvalidParameter(format!("cannot parse {name} from {raw:?}")))
}

fn from_json<T: serde::de::DeserializeOwned>(s: &str) -> Result<T> {
    serde_json::from_str(s).map_err(|e| Error::InvalidParameter(format!("bad --params-json: {e}")))
}

fn parse_coefficients(s: &str) -> Result<Vec<C64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map(|x| c(x, 0.0))
                .map_err(|_| Error::InvalidParameter(format!("cannot parse coefficient {t:?}")))
        })
        .collect()
}

/// The state or fixture requested by `generate`.
pub fn generate_data(
    family: Family,
    params: &[String],
    params_json: Option<&str>,
    random: bool,
    seed: u64,
) -> Result<(Option<FixtureSpec>, StateData)> {
    let mut rng = seeded(seed);
    let spec = match family {
        Family::Checkerboard => {
            let p = match (params_json, random) {
                (Some(js), _) => from_json::<CheckerboardParams>(js)?,
                (None, true) => CheckerboardParams::random(&mut rng),
                (None, false) => {
                    return Err(Error::InvalidParameter("checkerboard needs --random or --params-json".into()))
                }
            };
            FixtureSpec::Checkerboard(p)
        }
        Family::Antisymmetric => FixtureSpec::Antisymmetric {
            n: param(params, 0, "n")?,
        },
        Family::Werner => FixtureSpec::Werner {
            n: param(params, 0, "n")?,
            phi: param(params, 1, "phi")?,
        },
        Family::UpbTiles => FixtureSpec::UpbTiles3x3,
        Family::UpbShifts => match params_json {
            Some(js) => from_json(js)?,
            None => FixtureSpec::UpbShifts2x2x2 {
                angles: [std::f64::consts::FRAC_PI_4; 3],
                cut: match params.first().map(String::as_str) {
                    None | Some("a") => Cut::A,
                    Some("b") => Cut::B,
                    Some("c") => Cut::C,
                    Some(o) => return Err(Error::InvalidParameter(format!("unknown cut {o:?}"))),
                },
            },
        },
        Family::Ghz => FixtureSpec::GeneralizedGhz {
            coefficients: match params_json {
                Some(js) => from_json(js)?,
                None => parse_coefficients(params.first().map(String::as_str).unwrap_or("1,1"))?,
            },
        },
        Family::Label => FixtureSpec::LabelState(from_json::<LabelStateSpec>(
            params_json.ok_or_else(|| Error::InvalidParameter("label states need --params-json".into()))?,
        )?),
        Family::ReducibleExample => FixtureSpec::ReducibleExample,
        Family::Bell => {
            let v = crate::state::max_entangled(2);
            return Ok((None, StateData::Bipartite(BipartiteState::from_vectors(2, 2, &[v])?)));
        }
        Family::Subspace => {
            let m: usize = param(params, 0, "m")?;
            let n: usize = param(params, 1, "n")?;
            let k: usize = param(params, 2, "k")?;
            let mut basis: Vec<CVector> = (0..k).map(|_| random_vector(&mut rng, m * n)).collect();
            if random && k > 0 {
                basis[0] = kron_vec(&random_vector(&mut rng, m), &random_vector(&mut rng, n));
            }
            return Ok((None, StateData::Subspace(Subspace::new(m, n, basis)?)));
        }
        Family::CubicExample => {
            let e = |k: usize| crate::linalg::basis_vector(6, k);
            // a_11 = a_22 = 1, b_12 = b_23 = 1 (1-based labels).
            let a = e(0) + e(4);
            let b = e(1) + e(5);
            return Ok((None, StateData::Subspace(Subspace::new(2, 3, vec![a, b])?)));
        }
    };
    let data = match families::make_fixture(&spec)? {
        Fixture::Bipartite(rho) => StateData::Bipartite(rho),
        Fixture::Tripartite(psi) => StateData::Tripartite(psi),
    };
    Ok((Some(spec), data))
}

pub fn cmd_generate(
    family: Family,
    params: &[String],
    params_json: Option<&str>,
    random: bool,
    as_fixture: bool,
    flags: &Flags,
) -> Result<String> {
    let (spec, data) = generate_data(family, params, params_json, random, flags.seed)?;
    match (as_fixture, spec) {
        (true, Some(spec)) => io::render_state_file(&StateData::Fixture(spec)),
        (true, None) => Err(Error::InvalidParameter("this family has no fixture description".into())),
        (false, _) => io::render_state_file(&data),
    }
}

fn emit(flags: &Flags, text: &str) -> Result<()> {
    match &flags.out {
        Some(p) => io::write_atomic(p, text),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// Run the CLI; returns the process exit code (0 decided, 2 undecided, 1 error).
pub fn run(cli: Cli) -> i32 {
    let flags = cli.flags.clone();
    let outcome = match &cli.command {
        Command::Analyze { path, mode } => cmd_analyze(path, *mode, &flags).map(|r| (r.render(flags.text), r.exit_code())),
        Command::ProductTest { path } => cmd_product_test(path, &flags).map(|r| (r.render(flags.text), r.exit_code())),
        Command::Generate {
            family,
            params,
            params_json,
            random,
            as_fixture,
        } => cmd_generate(*family, params, params_json.as_deref(), *random, *as_fixture, &flags).map(|s| (s, 0)),
    };
    match outcome.and_then(|(text, code)| emit(&flags, &text).map(|_| code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
