//! `glfamily`: run approximation stages, check suites, build the scheme and
//! evaluate compositions from the command line.
//!
//! Exit codes: 0 on success, 1 when a check or build fails, 2 on usage
//! errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use glfamily::approx::{check_corollary_56, check_invariants, check_lemma_53_54, check_lemma_55, check_lemma_57, detect_l_n, ApproxSystem};
use glfamily::homo::SCHEME_MAX_FREE_COORDS;
use glfamily::report::SuiteReport;
use glfamily::suites::oracles::{compose_oracle, graph_meets_oracle, set_ops_oracle, unique_path_oracle};
use glfamily::suites::shrink::{shrink_suite, ShrinkConfig};
use glfamily::suites::stages::{build_reference_scheme, chain_suite, scheme_suite};
use glfamily::suites::{
    composition_suite, condition_d_suite, duplication_suite, path_lemma_suite, theta_suite, CompositionConfig, ConditionDConfig,
    DuplicationConfig, ThetaConfig,
};
use glfamily::{BinWord, Error, Exec, Family, FamilyLevel, Index, LazyPoint, ThetaRule};

#[derive(Parser)]
#[command(name = "glfamily", version, about = "Finitary checks for the G_L digraph family")]
struct Cli {
    /// Seed for every randomized suite.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Run on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq, Debug)]
enum Suite {
    #[value(name = "lemma4.2")]
    Lemma42,
    #[value(name = "lemma4.3")]
    Lemma43,
    #[value(name = "lemma4.7")]
    Lemma47,
    #[value(name = "lemma5.1")]
    Lemma51,
    #[value(name = "lemma5.2")]
    Lemma52,
    #[value(name = "lemma5.3-4")]
    Lemma534,
    #[value(name = "lemma5.7")]
    Lemma57,
    #[value(name = "lemma5.8")]
    Lemma58,
    #[value(name = "condition-d")]
    ConditionD,
    #[value(name = "scheme-conditions")]
    SchemeConditions,
    #[value(name = "oracles")]
    Oracles,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the stages (X_l, B_l, A_l, E_l) and dump them.
    Approx {
        #[arg(long = "L", default_value_t = 1, value_parser = level)]
        l: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, value_enum, default_value = "json")]
        emit: Emit,
        /// Directory for one dump per stage; without it the last stage is
        /// printed.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 5_000_000)]
        cap: usize,
    },
    /// Run a named check suite.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long = "L", value_parser = level)]
        l: Option<usize>,
        #[arg(long)]
        kmax: Option<u64>,
        #[arg(long)]
        arg_max: Option<u64>,
        #[arg(long)]
        max_vertices: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Build the Cantor scheme on the reference instance and check it.
    BuildH {
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Constrained coordinates allowed per cell operand.
        #[arg(long, default_value_t = SCHEME_MAX_FREE_COORDS)]
        budget: usize,
        /// Write the cells and the condition report here as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate one coordinate of g_s(p).
    EvalG {
        #[arg(long = "L", default_value_t = 1, value_parser = level)]
        l: usize,
        /// Comma-separated map indices, outermost first.
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<usize>,
        #[arg(long, value_parser = index)]
        coord: Index,
        /// `zeros`, `ones`, a word with an optional `:b` tail, or
        /// `zeros-in-N<w>`; explicit bits follow `@` as `k=b,...`.
        #[arg(long, default_value = "zeros", value_parser = point)]
        point: LazyPoint,
    },
}

fn level(s: &str) -> Result<usize, String> {
    let l: usize = s.parse().map_err(|e| format!("{e}"))?;
    FamilyLevel::new(l).map(FamilyLevel::get).map_err(|e| e.to_string())
}

/// `123`, `2^e` or `m*2^e`.
fn index(s: &str) -> Result<Index, String> {
    let msg = || format!("expected a number, 2^e or m*2^e, got {s:?}");
    let bad = |_: std::num::ParseIntError| msg();
    let (m, rest) = match s.split_once('*') {
        Some((m, r)) => (m.parse::<u64>().map_err(bad)?, r),
        None => (1, s),
    };
    match rest.strip_prefix("2^") {
        Some(e) => Ok(Index::pow2(e.parse().map_err(bad)?).mul_u64(m)),
        None if m == 1 => Ok(Index::from(rest.parse::<u128>().map_err(bad)?)),
        None => Err(msg()),
    }
}

fn point(s: &str) -> Result<LazyPoint, String> {
    let (base, bits) = s.split_once('@').unwrap_or((s, ""));
    let word = |w: &str| w.parse::<BinWord>().map_err(|e| e.to_string());
    let mut p = match base {
        "zeros" => LazyPoint::zeros(),
        "ones" => LazyPoint::constant(true),
        _ => {
            if let Some((tail, w)) = base.split_once("-in-N") {
                let tail = match tail {
                    "zeros" => false,
                    "ones" => true,
                    _ => return Err(format!("unknown tail {tail:?}")),
                };
                LazyPoint::from_word(&word(w)?, tail)
            } else {
                let (w, tail) = base.split_once(':').unwrap_or((base, "0"));
                LazyPoint::from_word(&word(w)?, tail == "1")
            }
        }
    };
    for kv in bits.split(',').filter(|t| !t.is_empty()) {
        let (k, b) = kv.split_once('=').ok_or_else(|| format!("expected k=b, got {kv:?}"))?;
        let b = match b {
            "0" => false,
            "1" => true,
            _ => return Err(format!("bit must be 0 or 1, got {b:?}")),
        };
        p.set(index(k)?, b);
    }
    Ok(p)
}

/// A failure exit with a message.
struct Fail(String);

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail(e.to_string())
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Fail {
        Fail(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    let res = match cli.cmd {
        Cmd::Approx { l, depth, emit, out, cap } => approx(l, depth, emit, out, cap, exec),
        Cmd::Check { suite, l, kmax, arg_max, max_vertices, depth, count, format } => {
            let p = Params { l, kmax, arg_max, max_vertices, depth, count, seed: cli.seed };
            check(suite, &p, format, exec)
        }
        Cmd::BuildH { depth, budget, report } => build_h(depth, budget, report, exec),
        Cmd::EvalG { l, s, coord, point } => eval_g(l, &s, &coord, &point),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn fam_level(l: usize) -> FamilyLevel {
    FamilyLevel::new(l).expect("validated by the parser")
}

fn approx(l: usize, depth: usize, emit: Emit, out: Option<PathBuf>, cap: usize, exec: Exec) -> Result<(), Fail> {
    let sys = ApproxSystem::new(fam_level(l)).with_cap(cap).with_exec(exec);
    let states = sys.run(depth)?;
    let dump = |st: &glfamily::approx::ApproxState| match emit {
        Emit::Json => serde_json::to_string_pretty(&st.to_json()).unwrap(),
        Emit::Dot => st.to_dot(),
    };
    if let Some(dir) = &out {
        fs::create_dir_all(dir)?;
        let ext = match emit {
            Emit::Json => "json",
            Emit::Dot => "dot",
        };
        for st in &states {
            fs::write(dir.join(format!("stage_{:02}.{ext}", st.level())), dump(st))?;
        }
    }
    for st in &states {
        eprintln!("l = {:2}  |X| = {:7}  |B| = {:7}  |E| = {:7}", st.level(), st.len(), st.b_edges().len(), st.e_count());
    }
    eprintln!("first appearances L_n: {:?}", detect_l_n(&sys, &states));
    if out.is_none() {
        println!("{}", dump(states.last().unwrap()));
    }
    Ok(())
}

struct Params {
    l: Option<usize>,
    kmax: Option<u64>,
    arg_max: Option<u64>,
    max_vertices: Option<usize>,
    depth: Option<usize>,
    count: Option<usize>,
    seed: u64,
}

fn run_suite(suite: Suite, p: &Params, exec: Exec) -> Result<SuiteReport, Fail> {
    let lv = fam_level(p.l.unwrap_or(1));
    let depth = p.depth.unwrap_or(20);
    let stages = || -> Result<_, Fail> {
        let sys = ApproxSystem::new(lv).with_cap(5_000_000).with_exec(exec);
        let states = sys.run(depth)?;
        Ok((sys, states))
    };
    Ok(match suite {
        Suite::Lemma42 => path_lemma_suite(p.max_vertices.unwrap_or(6), exec),
        Suite::Lemma43 => {
            let n = p.max_vertices.unwrap_or(6);
            let cfg = DuplicationConfig {
                labeled_max: n.min(5),
                iso_max: n,
                random_count: p.count.unwrap_or(1000),
                seed: p.seed,
                ..DuplicationConfig::default()
            };
            duplication_suite(&cfg, exec)
        }
        Suite::Lemma47 => {
            let cfg = ShrinkConfig {
                count: p.count.unwrap_or(200),
                max_vertices: p.max_vertices.unwrap_or(5),
                seed: p.seed,
                ..ShrinkConfig::default()
            };
            shrink_suite(&cfg, exec)
        }
        Suite::Lemma51 => {
            let d = ThetaConfig::default();
            let cfg = ThetaConfig { kmax: p.kmax.unwrap_or(d.kmax), arg_max: p.arg_max.unwrap_or(d.arg_max), ..d };
            let levels: Vec<usize> = p.l.map_or(vec![1, 2, 3], |l| vec![l]);
            let mut r = SuiteReport::new("lemma5.1");
            for l in levels {
                r.absorb(theta_suite(&ThetaRule::new(fam_level(l)), &cfg, exec));
            }
            r
        }
        Suite::Lemma52 => {
            let cfg = CompositionConfig { seed: p.seed, ..CompositionConfig::default() };
            let levels: Vec<usize> = p.l.map_or(vec![1, 2], |l| vec![l]);
            let mut r = SuiteReport::new("lemma5.2");
            for l in levels {
                r.absorb(composition_suite(fam_level(l), &cfg, exec)?);
            }
            r
        }
        Suite::Lemma534 => {
            let (sys, states) = stages()?;
            let mut r = SuiteReport::new("lemma5.3-4");
            r.absorb(check_invariants(&sys, &states));
            r.absorb(check_lemma_53_54(&states));
            r
        }
        Suite::Lemma57 => {
            let (sys, states) = stages()?;
            let mut r = SuiteReport::new("lemma5.7");
            r.absorb(check_lemma_57(&sys, &states)?);
            r.absorb(check_lemma_55(&sys, &states));
            // every word of length w ≤ 6 is a cell by stage 2w, checked up to depth 20
            r.absorb(check_corollary_56(&states, (depth / 2).min(6)));
            r
        }
        Suite::Lemma58 => {
            let (sys, states) = stages()?;
            chain_suite(&sys, &states, 4)?
        }
        Suite::ConditionD => {
            let cfg = ConditionDConfig { seed: p.seed, ..ConditionDConfig::default() };
            condition_d_suite(lv, &cfg, exec)?
        }
        Suite::SchemeConditions => scheme_suite(p.depth.unwrap_or(8), 10, exec)?,
        Suite::Oracles => {
            let n = p.count.unwrap_or(1000);
            let mut r = SuiteReport::new("oracles");
            r.absorb(set_ops_oracle(n, p.seed));
            r.absorb(graph_meets_oracle(n, p.seed));
            r.absorb(compose_oracle(n, p.seed));
            r.absorb(unique_path_oracle(n, p.seed));
            r
        }
    })
}

fn check(suite: Suite, p: &Params, format: Format, exec: Exec) -> Result<(), Fail> {
    let t = Instant::now();
    let r = run_suite(suite, p, exec)?;
    let secs = t.elapsed().as_secs_f64();
    match format {
        Format::Text => {
            println!("{r}");
            println!("seed {}, {secs:.2} s", p.seed);
        }
        Format::Json => {
            let mut v = serde_json::to_value(&r).unwrap();
            v["seed"] = json!(p.seed);
            v["pass"] = json!(r.is_ok());
            v["seconds"] = json!(secs);
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
    }
    if r.is_ok() {
        Ok(())
    } else {
        Err(Fail(format!("suite {suite:?} failed")))
    }
}

fn build_h(depth: usize, budget: usize, report: Option<PathBuf>, exec: Exec) -> Result<(), Fail> {
    let (states, scheme) = build_reference_scheme(depth, budget, exec)?;
    let inst = glfamily::homo::scheme_instance();
    let r = glfamily::homo::check_scheme(&inst, &states, &scheme)?;
    println!("{r}");
    if let Some(path) = report {
        let levels: Vec<Value> = scheme.iter().map(|s| s.to_json(&states[s.level])).collect();
        let v = json!({ "depth": depth, "report": r, "levels": levels });
        fs::write(path, serde_json::to_string_pretty(&v).unwrap())?;
    }
    if r.is_ok() {
        Ok(())
    } else {
        Err(Fail("scheme conditions failed".into()))
    }
}

fn eval_g(l: usize, s: &[usize], k: &Index, p: &LazyPoint) -> Result<(), Fail> {
    let fam = Family::new(fam_level(l));
    let (bit, trace) = fam.g_compose_trace(s, p, k).map_err(|e| match e {
        Error::OutsideDomain { stage } => Fail(format!("the point leaves the domain of g_{} at stage {stage}", s[stage])),
        e => e.into(),
    })?;
    println!("{}", u8::from(bit));
    let trace: Vec<String> = trace.iter().map(ToString::to_string).collect();
    eprintln!("trace: {}", trace.join(" -> "));
    Ok(())
}
