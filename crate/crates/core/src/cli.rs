//! Command-line front end. Results go to stdout as JSON, diagnostics to
//! stderr. Exit codes: 0 found or passed, 1 not found within the bound or
//! failed, 2 error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::groups::{Element, GeneratorWord, GroupSpec, XsyChoice};
use crate::oracle::{submonoid_member_bounded, SearchConfig, SearchResult, DEFAULT_MAX_ELEMENTS};
use crate::rational::Automaton;
use crate::reduction::{
    find_trivial_stabilizer_vector, mon_to_rat, pair_from_json, pair_to_rat, reduce_pair,
    signed_permutation_group, tighter_aut, witness_to_path, MonToRatOptions, ReductionBundle,
};
use crate::verify::{run_suite, Suite, VerifyOptions, DEFAULT_SEED};

/// Environment variable overriding the cap on distinct elements per search.
pub const MAX_ELEMENTS_ENV: &str = "RSK_MAX_ELEMENTS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "rsk",
    version,
    about = "Rational subsets as sections of submonoids: constructions and bounded membership search"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// Pair of submonoids; the input file is `{group, a, b}`.
    Pair,
    /// `<y>* T*` in `G × (Z wr Z_m)`.
    Pair2rat,
    Mon2rat,
    Tighter,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a construction and write the bundle.
    Build {
        /// Automaton JSON, or `{group, a, b}` for `--variant pair`.
        #[arg(long, value_name = "FILE")]
        automaton: PathBuf,
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Round the wreath top order up to a power of two.
        #[arg(long)]
        pad_pow2: bool,
        /// Dimension of the signed permutation group used by `tighter`.
        #[arg(long, value_name = "N", default_value_t = 2)]
        signed_perm: usize,
        /// Use the cyclic shift group `Z^N ⋊ Z` (N ≥ 3) instead of the
        /// rotation group for the `x, s, y` factor.
        #[arg(long, value_name = "N")]
        shift: Option<usize>,
        /// Where to write the bundle; without it the bundle goes to stdout.
        #[arg(long, short, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Bounded membership of an element in a bundle's monoid.
    Member {
        #[arg(long, value_name = "FILE")]
        bundle: PathBuf,
        /// Ambient element as JSON (or `@FILE`).
        #[arg(long, value_name = "JSON", required_unless_present = "section_of")]
        target: Option<String>,
        /// `G`-part as JSON (or `@FILE`); the query is `(g, section coordinate)`.
        #[arg(long, value_name = "JSON", conflicts_with = "target")]
        section_of: Option<String>,
        #[arg(long, value_name = "L")]
        max_len: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Bounded section of a bundle at its section coordinate.
    Section {
        #[arg(long, value_name = "FILE")]
        bundle: PathBuf,
        #[arg(long, value_name = "L")]
        max_len: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Run a verification suite.
    Verify {
        /// prop3, prop3-shift, prop5, prop8, thm7-e2e, thm9-e2e, gram, oracle,
        /// negative-control, or all.
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_name = "L")]
        max_len: Option<usize>,
        /// Number of random instances for randomized suites.
        #[arg(long, value_name = "N")]
        count: Option<usize>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Bounded membership in the submonoid generated by a raw generator list.
    Oracle {
        /// Group spec JSON.
        #[arg(long, value_name = "FILE")]
        group: PathBuf,
        /// JSON array of generators.
        #[arg(long, value_name = "FILE")]
        gens: PathBuf,
        /// Element as JSON (or `@FILE`).
        #[arg(long, value_name = "JSON")]
        target: String,
        #[arg(long, value_name = "L")]
        max_len: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
}

#[derive(Debug, Clone, clap::Args)]
pub struct SearchArgs {
    /// Cap on distinct elements per search (overrides RSK_MAX_ELEMENTS).
    #[arg(long, value_name = "N")]
    max_elements: Option<usize>,
    /// Expand search layers on one thread.
    #[arg(long)]
    sequential: bool,
}

impl SearchArgs {
    fn config(&self, max_len: usize) -> Result<SearchConfig> {
        let cap = match self.max_elements {
            Some(n) => n,
            None => max_elements_from_env()?,
        };
        if cap == 0 {
            return Err(Error::InvalidParameter(
                "max elements must be at least 1".into(),
            ));
        }
        Ok(SearchConfig::new(max_len)
            .with_max_elements(cap)
            .with_parallel(!self.sequential))
    }
}

fn max_elements_from_env() -> Result<usize> {
    match std::env::var(MAX_ELEMENTS_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!(
                "{MAX_ELEMENTS_ENV}={v:?} is not a positive integer"
            ))
        }),
        Err(_) => Ok(DEFAULT_MAX_ELEMENTS),
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Schema {
        path: format!("{}:{}:{}", path.display(), e.line(), e.column()),
        message: e.to_string(),
    })
}

/// A JSON literal, or the contents of a file for `@FILE`.
fn json_arg(arg: &str) -> Result<Value> {
    match arg.strip_prefix('@') {
        Some(path) => read_json(Path::new(path)),
        None => serde_json::from_str(arg).map_err(|e| Error::Schema {
            path: format!("<argument>:{}", e.column()),
            message: e.to_string(),
        }),
    }
}

fn with_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Schema { path: p, message } => Error::Schema {
            path: format!("{}: {p}", path.display()),
            message,
        },
        other => other,
    })
}

fn load_bundle(path: &Path) -> Result<ReductionBundle> {
    with_file(path, ReductionBundle::from_json(&read_json(path)?))
}

fn load_pair(path: &Path) -> Result<(GroupSpec, Vec<Element>, Vec<Element>)> {
    with_file(path, pair_from_json(&read_json(path)?))
}

fn witness_json(bundle: Option<&ReductionBundle>, w: &GeneratorWord) -> Value {
    let mut out = json!({
        "word": w,
        "length": w.len(),
        "indices": w.indices().unwrap_or_default(),
    });
    if let Some(b) = bundle {
        let origins: Vec<String> = w
            .letters()
            .iter()
            .map(|l| b.generators[l.index].origin.tag())
            .collect();
        out["origins"] = json!(origins);
    }
    out
}

fn result_json(
    r: &SearchResult<GeneratorWord>,
    bundle: Option<&ReductionBundle>,
    max_len: usize,
) -> Value {
    let mut out = json!({
        "verdict": r.verdict.as_str(),
        "max_len": max_len,
        "stats": r.stats.to_json(),
    });
    if let Some(w) = &r.witness {
        out["witness"] = witness_json(bundle, w);
    }
    out
}

struct Outcome {
    stdout: Value,
    code: i32,
    note: Option<String>,
}

impl Outcome {
    fn ok(stdout: Value) -> Self {
        Outcome {
            stdout,
            code: EXIT_OK,
            note: None,
        }
    }
}

fn build(
    automaton: &Path,
    variant: VariantArg,
    pad_pow2: bool,
    signed_perm: usize,
    shift: Option<usize>,
    output: Option<&Path>,
) -> Result<Outcome> {
    let xsy = match shift {
        Some(n) => XsyChoice::CyclicShift(n),
        None => XsyChoice::Rotation,
    };
    let bundle = match variant {
        VariantArg::Pair => {
            let (g, a, b) = load_pair(automaton)?;
            reduce_pair(&g, &a, &b, xsy)?
        }
        _ => {
            let aut = with_file(automaton, Automaton::from_json(&read_json(automaton)?))?;
            match variant {
                VariantArg::Pair2rat => pair_to_rat(&aut, pad_pow2)?.bundle,
                VariantArg::Mon2rat => mon_to_rat(&aut, MonToRatOptions { pad_pow2, xsy })?,
                VariantArg::Tighter => {
                    let a = signed_permutation_group(signed_perm)?;
                    let v = find_trivial_stabilizer_vector(&a);
                    tighter_aut(&aut, &a, &v, xsy)?
                }
                VariantArg::Pair => unreachable!(),
            }
        }
    };
    let summary = json!({
        "variant": bundle.variant.name(),
        "generators": bundle.len(),
        "ambient": bundle.ambient.to_string(),
        "target": bundle.h_spec().element_to_json(&bundle.target),
        "output": output.map(|p| p.display().to_string()),
    });
    match output {
        Some(path) => {
            let text = serde_json::to_string_pretty(&bundle.to_json())?;
            fs::write(path, text + "\n")?;
            Ok(Outcome::ok(summary))
        }
        None => Ok(Outcome {
            stdout: bundle.to_json(),
            code: EXIT_OK,
            note: Some(summary.to_string()),
        }),
    }
}

fn member(
    bundle_path: &Path,
    target: Option<&str>,
    section_of: Option<&str>,
    max_len: usize,
    search: &SearchArgs,
) -> Result<Outcome> {
    let bundle = load_bundle(bundle_path)?;
    let target = match (target, section_of) {
        (Some(t), _) => bundle.ambient.element_from_json(&json_arg(t)?)?,
        (None, Some(g)) => {
            let g = bundle.g_spec().element_from_json(&json_arg(g)?)?;
            bundle.ambient_target(&g)?
        }
        (None, None) => {
            return Err(Error::InvalidParameter(
                "give --target or --section-of".into(),
            ))
        }
    };
    let cfg = search.config(max_len)?;
    let r = bundle.member_bounded(&target, &cfg)?;
    let mut out = result_json(&r, Some(&bundle), max_len);
    out["target"] = bundle.ambient.element_to_json(&target);
    if let (Some(w), Some(_)) = (&r.witness, &bundle.source) {
        let (_, h) = bundle.selector().split(&target).expect("product");
        if h == bundle.target {
            match witness_to_path(&bundle, w) {
                Ok(p) => out["path"] = json!(p),
                Err(e) => out["path_error"] = json!(e.to_string()),
            }
        }
    }
    Ok(Outcome {
        stdout: out,
        code: if r.found() { EXIT_OK } else { EXIT_NEGATIVE },
        note: None,
    })
}

fn section(bundle_path: &Path, max_len: usize, search: &SearchArgs) -> Result<Outcome> {
    let bundle = load_bundle(bundle_path)?;
    let cfg = search.config(max_len)?;
    let hits = bundle.section_bounded(&cfg)?;
    let g = bundle.g_spec();
    let elements: Vec<Value> = hits
        .iter()
        .map(|h| {
            json!({
                "element": g.element_to_json(&h.element),
                "length": h.length,
                "witness": witness_json(Some(&bundle), &h.witness),
            })
        })
        .collect();
    Ok(Outcome::ok(json!({
        "variant": bundle.variant.name(),
        "target": bundle.h_spec().element_to_json(&bundle.target),
        "max_len": max_len,
        "count": hits.len(),
        "elements": elements,
    })))
}

fn verify(
    suite: &str,
    seed: u64,
    max_len: Option<usize>,
    count: Option<usize>,
    search: &SearchArgs,
) -> Result<Outcome> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let opts = VerifyOptions {
        seed,
        max_len,
        count,
        max_elements: search.config(0)?.max_elements,
        parallel: !search.sequential,
    };
    let mut reports = Vec::new();
    let mut passed = true;
    for s in suites {
        let r = run_suite(s, &opts)?;
        passed &= r.passed();
        reports.push(r.to_json());
    }
    let stdout = if reports.len() == 1 {
        reports.pop().unwrap()
    } else {
        json!({ "passed": passed, "suites": reports })
    };
    Ok(Outcome {
        stdout,
        code: if passed { EXIT_OK } else { EXIT_NEGATIVE },
        note: None,
    })
}

fn oracle(
    group: &Path,
    gens: &Path,
    target: &str,
    max_len: usize,
    search: &SearchArgs,
) -> Result<Outcome> {
    let spec: GroupSpec = serde_json::from_value(read_json(group)?).map_err(|e| Error::Schema {
        path: group.display().to_string(),
        message: e.to_string(),
    })?;
    let list = read_json(gens)?;
    let arr = list.as_array().ok_or_else(|| Error::Schema {
        path: format!("{}: $", gens.display()),
        message: "expected an array of elements".into(),
    })?;
    let elements = with_file(
        gens,
        arr.iter()
            .enumerate()
            .map(|(i, v)| spec.element_from_json_at(v, &format!("$[{i}]")))
            .collect::<Result<Vec<_>>>(),
    )?;
    let target = spec.element_from_json(&json_arg(target)?)?;
    let cfg = search.config(max_len)?;
    let r = submonoid_member_bounded(&spec, &elements, &target, &cfg)?;
    let mut out = result_json(&r, None, max_len);
    out["target"] = spec.element_to_json(&target);
    Ok(Outcome {
        stdout: out,
        code: if r.found() { EXIT_OK } else { EXIT_NEGATIVE },
        note: None,
    })
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Build {
            automaton,
            variant,
            pad_pow2,
            signed_perm,
            shift,
            output,
        } => build(
            automaton,
            *variant,
            *pad_pow2,
            *signed_perm,
            *shift,
            output.as_deref(),
        ),
        Command::Member {
            bundle,
            target,
            section_of,
            max_len,
            search,
        } => member(
            bundle,
            target.as_deref(),
            section_of.as_deref(),
            *max_len,
            search,
        ),
        Command::Section {
            bundle,
            max_len,
            search,
        } => section(bundle, *max_len, search),
        Command::Verify {
            suite,
            seed,
            max_len,
            count,
            search,
        } => verify(suite, *seed, *max_len, *count, search),
        Command::Oracle {
            group,
            gens,
            target,
            max_len,
            search,
        } => oracle(group, gens, target, *max_len, search),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            if let Some(note) = outcome.note {
                let _ = writeln!(stderr, "{note}");
            }
            let text = serde_json::to_string_pretty(&outcome.stdout).expect("json");
            if writeln!(stdout, "{text}").is_err() {
                return EXIT_ERROR;
            }
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_ERROR
        }
    }
}
