use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{error::ErrorKind, Args, Parser, Subcommand};
use serde_json::{json, Value};

use treedens::codec::{from_json_text, parse_graph, sniff_format, to_json};
use treedens::constructions::{
    build_gadget, build_lower_bound_graph, verify_gadget_properties, verify_tree_decomposition, TreeDecomposition,
    TreeDecompositionJson,
};
use treedens::counting::{count_images_with, enumerate_images, CountOptions};
use treedens::extraction::{extract_witness, WitnessOutcome};
use treedens::fit::{run_fit_with, FitOptions};
use treedens::forest::alpha_s;
use treedens::graph::density;
use treedens::models::{find_pq_model, flap_number, ModelSearch};
use treedens::shortcuts::{
    build_low_degree_square, expand, transfer_model, validate_shortcut_system, verify_model, BipartiteModel,
    ShortcutSystem, ShortcutSystemJson,
};
use treedens::{Error, Forest, Graph};

const EXIT_DOMAIN: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_NO_INPUT: u8 = 66;
const EXIT_DEFECT: u8 = 70;

#[derive(Parser)]
#[command(name = "treedens", version, about = "Counting forests in sparse graph classes")]
struct Cli {
    /// Print JSON instead of line-oriented text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for counting.
    #[arg(long, global = true, env = "TDL_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Largest stable set among vertices of degree at most s.
    Alpha {
        #[arg(long)]
        forest: PathBuf,
        #[arg(long)]
        s: usize,
    },
    /// Count images and copies of a forest in a host.
    Count {
        #[command(flatten)]
        pair: PatternHost,
        /// Stop after this many images.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// List images of a forest in a host.
    Enumerate {
        #[command(flatten)]
        pair: PatternHost,
        #[arg(long, default_value_t = 1000)]
        cap: usize,
    },
    /// Build the blow-up instance with its tree decomposition.
    Construct {
        #[arg(long)]
        forest: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: usize,
        /// Write the graph JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the tree decomposition JSON here.
        #[arg(long)]
        td_out: Option<PathBuf>,
    },
    /// Check a tree decomposition against a graph.
    VerifyTd {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        td: PathBuf,
    },
    /// Build the gadget of H with parameters s and t.
    Gadget {
        #[arg(long)]
        h: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        /// Also check the structural properties.
        #[arg(long)]
        verify: bool,
    },
    /// Extract a gadget subgraph from the images of a forest in a host.
    Witness {
        #[command(flatten)]
        pair: PatternHost,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        /// Use at most this many images.
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
    /// Validate a shortcut system and report its profile.
    Shortcut {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        system: PathBuf,
        /// Require shortcuts of length at most k.
        #[arg(long)]
        k: Option<usize>,
        /// Require every M_v to have at most d vertices.
        #[arg(long)]
        d: Option<usize>,
    },
    /// Add a clique on the neighbourhood of every vertex of degree at most d.
    Square {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        d: usize,
    },
    /// Pull a model from the expanded graph back to the base graph.
    Transfer {
        #[arg(long)]
        base: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        shape: ModelShape,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
    },
    /// Search for a (p,q)-model of K_{s,t}.
    FindModel {
        #[arg(long)]
        graph: PathBuf,
        #[command(flatten)]
        shape: ModelShape,
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
    },
    /// Most pairwise independent separations of order at most s.
    Flap {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        s: usize,
    },
    /// Fit the growth exponent of copy counts in the blow-up instances.
    Fit {
        #[arg(long)]
        forest: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0.2)]
        tolerance: f64,
        /// Stop counting after this many seconds and report what was done.
        #[arg(long)]
        budget_secs: Option<u64>,
    },
}

#[derive(Args)]
struct PatternHost {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    host: PathBuf,
}

#[derive(Args)]
struct ModelShape {
    #[arg(long)]
    s: usize,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    p: usize,
    #[arg(long)]
    q: usize,
}

enum Failure {
    Lib(Error),
    Io(PathBuf, std::io::Error),
    /// The computation ran but its result failed a check.
    Rejected(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn write(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Io(path.to_owned(), e))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let text = read(path)?;
    Ok(parse_graph(&text, sniff_format(&text))?)
}

fn load_forest(path: &Path) -> Result<Forest, Failure> {
    Ok(Forest::new(load_graph(path)?)?)
}

fn load_system(base: &Path, system: &Path) -> Result<ShortcutSystem, Failure> {
    let g = load_graph(base)?;
    let j: ShortcutSystemJson = from_json_text(&read(system)?)?;
    Ok(ShortcutSystem::new(g, j.paths)?)
}

fn graph_value(g: &Graph) -> Value {
    serde_json::from_str(&to_json(g)).expect("graph JSON is well formed")
}

fn list(vs: impl IntoIterator<Item = usize>) -> String {
    vs.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn emit(json_mode: bool, value: Value, text: impl FnOnce() -> String) {
    if json_mode {
        println!("{value}");
    } else {
        println!("{}", text());
    }
}

fn run(cli: Cli) -> Outcome {
    let js = cli.json;
    match cli.command {
        Command::Alpha { forest, s } => {
            let t = load_forest(&forest)?;
            let r = alpha_s(&t, s);
            emit(
                js,
                json!({"value": r.value, "witness": r.witness, "low_degree_set": r.low_degree_set}),
                || format!("alpha_{s} = {}\nwitness: {}", r.value, list(r.witness.iter())),
            );
        }
        Command::Count { pair, limit } => {
            let (t, g) = (load_forest(&pair.pattern)?, load_graph(&pair.host)?);
            let opts = CountOptions {
                limit: limit.map(Into::into),
                threads: cli.threads,
            };
            let r = count_images_with(&t, &g, &opts);
            emit(
                js,
                json!({
                    "images": r.images.to_string(),
                    "copies": r.copies.to_string(),
                    "automorphisms": r.automorphisms.to_string(),
                    "truncated": r.truncated,
                }),
                || {
                    let mut out = format!(
                        "images {}\ncopies {}\nautomorphisms {}",
                        r.images, r.copies, r.automorphisms
                    );
                    if r.truncated {
                        out.push_str("\ntruncated at limit");
                    }
                    out
                },
            );
        }
        Command::Enumerate { pair, cap } => {
            let (t, g) = (load_forest(&pair.pattern)?, load_graph(&pair.host)?);
            let images = enumerate_images(&t, &g, cap);
            emit(js, json!(images), || {
                images.iter().map(|e| list(e.assignment.iter().copied())).collect::<Vec<_>>().join("\n")
            });
        }
        Command::Construct {
            forest,
            s,
            n,
            out,
            td_out,
        } => {
            let t = load_forest(&forest)?;
            let inst = build_lower_bound_graph(&t, s, n)?;
            let td = serde_json::to_string(&inst.decomposition.to_json()).expect("serializable");
            if let Some(p) = &out {
                write(p, &to_json(&inst.graph))?;
            }
            if let Some(p) = &td_out {
                write(p, &td)?;
            }
            emit(
                js,
                json!({
                    "graph": graph_value(&inst.graph),
                    "decomposition": inst.decomposition.to_json(),
                    "stable_set": inst.stable_set,
                    "m": inst.m,
                    "k": inst.k,
                }),
                || {
                    format!(
                        "vertices {}\nedges {}\nwidth {}\nk {}\nm {}\nstable set: {}",
                        inst.graph.n(),
                        inst.graph.edge_count(),
                        inst.decomposition.width(),
                        inst.k,
                        inst.m,
                        list(inst.stable_set.iter())
                    )
                },
            );
        }
        Command::VerifyTd { graph, td } => {
            let g = load_graph(&graph)?;
            let j: TreeDecompositionJson = from_json_text(&read(&td)?)?;
            let d = TreeDecomposition::from_json(j)?;
            let r = verify_tree_decomposition(&g, &d);
            emit(js, json!(r), || match &r.violation {
                None => format!("valid, width {}", r.width),
                Some(v) => format!("invalid: {v}"),
            });
            if !r.valid {
                return Err(Failure::Rejected("tree decomposition is invalid".into()));
            }
        }
        Command::Gadget { h, s, t, verify } => {
            let hg = load_graph(&h)?;
            let gadget = build_gadget(&hg, s, t)?;
            let gj = gadget.to_json();
            let report = if verify { Some(verify_gadget_properties(&hg, s, t)?) } else { None };
            emit(js, json!({"gadget": gj, "report": report}), || {
                let mut out = serde_json::to_string(&gj).expect("serializable");
                if let Some(r) = &report {
                    out.push_str(&format!(
                        "\ns' {}\ncontraction {:?}\ndegrees {:?}\ndiameter {:?}",
                        r.s_prime, r.contraction, r.degrees, r.diameter
                    ));
                }
                out
            });
            if report.is_some_and(|r| !r.all_passed()) {
                return Err(Failure::Rejected("gadget property check failed".into()));
            }
        }
        Command::Witness { pair, s, t, cap } => {
            let (pattern, host) = (load_forest(&pair.pattern)?, load_graph(&pair.host)?);
            let images = enumerate_images(&pattern, &host, cap);
            match extract_witness(&pattern, s, t, &host, &images)? {
                WitnessOutcome::Found(w) => {
                    let wj = w.to_json();
                    emit(js, json!(wj), || serde_json::to_string(&wj).expect("serializable"));
                }
                WitnessOutcome::Failed(f) => {
                    emit(js, json!(f), || {
                        format!(
                            "no witness: {} stage needs {} and has {} ({})",
                            f.stage, f.required, f.available, f.detail
                        )
                    });
                    return Err(Failure::Rejected(format!("extraction failed at the {} stage", f.stage)));
                }
            }
        }
        Command::Shortcut { base, system, k, d } => {
            let sys = load_system(&base, &system)?;
            let prof = validate_shortcut_system(&sys)?;
            let expanded = expand(&sys);
            emit(js, json!({"profile": prof, "expanded": graph_value(&expanded)}), || {
                format!(
                    "max length {}\nmax internal load {}\nmax |M_v| {}\nexpanded edges {}",
                    prof.max_length,
                    prof.max_internal_load,
                    prof.max_m_set,
                    expanded.edge_count()
                )
            });
            if k.is_some_and(|k| prof.max_length > k) || d.is_some_and(|d| prof.max_m_set > d) {
                return Err(Failure::Rejected("system exceeds the requested bounds".into()));
            }
        }
        Command::Square { graph, d } => {
            let g = load_graph(&graph)?;
            let (sq, sys) = build_low_degree_square(&g, d);
            let (before, after) = (density(&g)?, density(&sq)?);
            emit(
                js,
                json!({
                    "graph": graph_value(&sq),
                    "system": sys.to_json(),
                    "density_before": before.to_string(),
                    "density_after": after.to_string(),
                }),
                || format!("density {before} -> {after}\n{}", to_json(&sq)),
            );
        }
        Command::Transfer {
            base,
            system,
            model,
            shape,
            k,
            d,
        } => {
            let sys = load_system(&base, &system)?;
            let m: BipartiteModel = from_json_text(&read(&model)?)?;
            let ModelShape { s, t, p, q } = shape;
            let r = transfer_model(&sys, &m, s, t, p, q, k, d)?;
            let check = verify_model(sys.base(), &r.model, s, t, r.out_p, r.out_q);
            emit(js, json!({"transfer": r, "check": check}), || {
                format!(
                    "needed K_{{{},{}}} in the expansion\noutput caps p {} q {}\n{}",
                    r.s_prime,
                    r.t_prime,
                    r.out_p,
                    r.out_q,
                    serde_json::to_string(&r.model).expect("serializable")
                )
            });
            if !check.valid {
                return Err(Failure::Rejected(format!(
                    "transferred model is invalid: {}",
                    check.violation.unwrap_or_default()
                )));
            }
        }
        Command::FindModel { graph, shape, budget } => {
            let g = load_graph(&graph)?;
            let ModelShape { s, t, p, q } = shape;
            match find_pq_model(&g, s, t, p, q, budget)? {
                ModelSearch::Found(m) => {
                    emit(js, json!({"status": "found", "model": m}), || {
                        serde_json::to_string(&m).expect("serializable")
                    });
                }
                ModelSearch::None => {
                    emit(js, json!({"status": "none"}), || "no model".into());
                    return Err(Failure::Rejected("no model exists".into()));
                }
                ModelSearch::Unknown => {
                    emit(js, json!({"status": "unknown"}), || "unknown: budget exhausted".into());
                    return Err(Failure::Rejected("search budget exhausted".into()));
                }
            }
        }
        Command::Flap { graph, s } => {
            let g = load_graph(&graph)?;
            let r = flap_number(&g, s)?;
            emit(js, json!(r), || {
                let mut out = format!("f_{s} = {}", r.value);
                for sep in &r.witness {
                    out.push_str(&format!(
                        "\nA {{{}}} B {{{}}}",
                        list(sep.a_vertices.iter()),
                        list(sep.b_vertices.iter())
                    ));
                }
                out
            });
        }
        Command::Fit {
            forest,
            s,
            n,
            tolerance,
            budget_secs,
        } => {
            let t = load_forest(&forest)?;
            let opts = FitOptions {
                tolerance,
                threads: cli.threads,
                time_budget: budget_secs.map(Duration::from_secs),
            };
            let r = run_fit_with(&t, s, &n, &opts)?;
            emit(
                js,
                json!({
                    "points": r.points.iter().map(|p| json!([p.n, p.count.to_string()])).collect::<Vec<_>>(),
                    "slope": r.slope,
                    "target": r.target,
                    "tolerance": r.tolerance,
                    "partial": r.partial,
                }),
                || {
                    let mut out = String::from("n\tcopies");
                    for p in &r.points {
                        out.push_str(&format!("\n{}\t{}", p.n, p.count));
                    }
                    out.push_str(&format!("\nslope {:.4} target {}", r.slope, r.target));
                    if r.partial {
                        out.push_str("\npartial: time budget ran out");
                    }
                    out
                },
            );
            if r.partial || !r.within_tolerance() {
                return Err(Failure::Rejected(format!(
                    "slope {:.4} is not within {} of {}",
                    r.slope, r.tolerance, r.target
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = match &f {
                Failure::Lib(Error::Domain(_) | Error::Capacity(_)) => EXIT_DOMAIN,
                Failure::Lib(Error::Parse { .. } | Error::Validation(_)) | Failure::Rejected(_) => EXIT_INVALID,
                Failure::Lib(Error::Defect(_)) => EXIT_DEFECT,
                Failure::Io(..) => EXIT_NO_INPUT,
            };
            match f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Io(p, e) => eprintln!("error: {}: {e}", p.display()),
                Failure::Rejected(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(code)
        }
    }
}
