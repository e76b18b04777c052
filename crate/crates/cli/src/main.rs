//! Command-line surface tying the library into reproducible experiments:
//! liftings, lowerings, wiring compilation and counting, forward runs,
//! refinement tests, batteries, corpus generation, and validation.
//!
//! Exit codes: 0 on success, 2 on usage or validation errors, 1 on
//! internal errors (failed output writes).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hognn_core::adjacency::subgraph_counts;
use hognn_core::corpus::enumerate_corpus;
use hognn_core::doc::{parse_document, render_document, HoDocument};
use hognn_core::engine::{presets, readout, ModelSpec, ModelState};
use hognn_core::graph::Graph;
use hognn_core::hogdm::{validate, HoStructure};
use hognn_core::transform::{
    bipartite_lowering, cell_lift_with, clique_complex_lift_with, clique_expansion,
    ego_net_collection, iso_type_lift, motif_lift, node_deleted_collection, star_expansion,
    weighted_lowering, DeletionMode, LiftFeatureMode,
};
use hognn_core::wiring::{
    channel_count, classify_flavor, compile_bamp, compile_cwn, compile_damp, compile_imp,
    compile_multihop, Relation, WiringSet,
};
use hognn_core::wl::{battery, WlTest};
use hognn_core::Error;

#[derive(Parser)]
#[command(name = "hognn", version, about = "Higher-order graph learning toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lift a plain graph into a higher-order structure.
    Lift(LiftArgs),
    /// Lower a hypergraph back to a plain graph.
    Lower(LowerArgs),
    /// Compile the message channels of a wiring scheme.
    Wire(WireArgs),
    /// Count channels per relation tag in a channels file.
    Count(CountArgs),
    /// Run a forward model over a structure document.
    MpRun(MpRunArgs),
    /// Run one refinement test on a pair of graph documents.
    WlTest(WlTestArgs),
    /// Run a test battery over a corpus directory.
    Battery(BatteryArgs),
    /// Enumerate a small-graph corpus into a directory.
    Corpus(CorpusArgs),
    /// Validate a structure document against its kind's axioms.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct LiftArgs {
    /// cqc | cell | isotype | ego | drop | motif | scnt
    #[arg(long)]
    kind: String,
    /// Input graph document.
    #[arg(long, visible_alias = "graph")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Maximum clique size for cqc.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    k_cl: usize,
    #[arg(long, default_value_t = 6)]
    k_ind_cycle: usize,
    #[arg(long, default_value_t = 0)]
    k_cycle: usize,
    /// Feature assignment for lifted entities: sum | mean.
    #[arg(long, default_value = "sum")]
    features: String,
    /// Maximum tuple length for isotype.
    #[arg(long, default_value_t = 2)]
    k_max: usize,
    /// Ego-net radius.
    #[arg(long, default_value_t = 1)]
    radius: usize,
    /// Keep all ball-internal edges (ego); otherwise BFS level edges only.
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
    induced: bool,
    /// Deletion mode for drop: all | sampled.
    #[arg(long, default_value = "all")]
    mode: String,
    #[arg(long, default_value_t = 4)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Motif templates: named (triangle, path:N, cycle:N, complete:N) or
    /// graph document paths. Repeatable.
    #[arg(long)]
    motif: Vec<String>,
}

#[derive(Args)]
struct LowerArgs {
    /// clique | star | bipartite | weighted
    #[arg(long)]
    kind: String,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WireArgs {
    /// imp | bamp | cwn | damp | multihop
    #[arg(long)]
    scheme: String,
    /// Input document (kind must match the scheme).
    #[arg(long, visible_alias = "graph")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Relations for bamp: comma-separated subset of
    /// boundary,coboundary,upper,lower.
    #[arg(long, default_value = "boundary,coboundary,upper,lower")]
    relations: String,
    /// Tuple length for damp over a plain-graph input (the full tuple
    /// universe is materialized).
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    local: bool,
    #[arg(long)]
    inclusive: bool,
    /// Hop lengths for multihop, comma-separated.
    #[arg(long, default_value = "1")]
    hops: String,
}

#[derive(Args)]
struct CountArgs {
    /// Channels file produced by wire.
    #[arg(long)]
    channels: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MpRunArgs {
    /// Model file (a JSON layer stack); or use --preset.
    #[arg(long, conflicts_with = "preset")]
    model: Option<PathBuf>,
    /// imp-general | hgconv | hat | mpsn | cwn | kgnn
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, visible_alias = "graph")]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Feature width used when the input carries no features (and for
    /// preset parameter shapes).
    #[arg(long, default_value_t = 1)]
    width: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WlTestArgs {
    /// wl1 | kwl:K | kfwl:K | dkwl:K | klwlp:K | lifted:cqc | lifted:cell
    #[arg(long)]
    test: String,
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BatteryArgs {
    /// Directory of graph documents (every unordered pair is tested).
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated test list.
    #[arg(long)]
    tests: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long, default_value_t = 5)]
    n_max: usize,
    #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
    dedup: bool,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
}

/// User-facing failures exit 2; output-write failures exit 1.
enum CliError {
    User(String),
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::User(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_to_string(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", path.display())))
}

fn write_output(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                CliError::Internal(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn load_document(path: &Path) -> CliResult<HoDocument> {
    Ok(parse_document(&read_to_string(path)?)?)
}

fn load_graph(path: &Path) -> CliResult<Graph> {
    Ok(load_document(path)?.as_graph()?.clone())
}

fn feature_mode(text: &str) -> CliResult<LiftFeatureMode> {
    match text {
        "sum" => Ok(LiftFeatureMode::Sum),
        "mean" => Ok(LiftFeatureMode::Mean),
        other => Err(CliError::User(format!("unknown feature mode {other:?}"))),
    }
}

fn parse_motif(text: &str) -> CliResult<Graph> {
    match text {
        "triangle" => Ok(hognn_core::graph::complete_graph(3)),
        other => match other.split_once(':') {
            Some((kind @ ("path" | "cycle" | "complete"), size)) => {
                let n: usize = size
                    .parse()
                    .map_err(|_| CliError::User(format!("bad motif size in {other:?}")))?;
                if kind == "cycle" && n < 3 {
                    return Err(CliError::User(format!("{other:?} is too small")));
                }
                Ok(match kind {
                    "path" => hognn_core::graph::path_graph(n),
                    "cycle" => hognn_core::graph::cycle_graph(n),
                    _ => hognn_core::graph::complete_graph(n),
                })
            }
            _ => load_graph(Path::new(other)),
        },
    }
}

fn run_lift(args: &LiftArgs) -> CliResult<()> {
    let g = load_graph(&args.input)?;
    let mode = feature_mode(&args.features)?;
    let doc: HoDocument = match args.kind.as_str() {
        "cqc" => HoDocument::Sc(clique_complex_lift_with(&g, args.k.max(2), mode)),
        "cell" => HoDocument::Cc(cell_lift_with(
            &g,
            args.k_cl,
            args.k_ind_cycle,
            args.k_cycle,
            mode,
        )?),
        "isotype" => HoDocument::Ntcol(iso_type_lift(&g, args.k_max)?),
        "ego" => HoDocument::Scol(ego_net_collection(&g, args.radius, args.induced)?),
        "drop" => {
            let mode = match args.mode.as_str() {
                "all" => DeletionMode::AllSingleDeletions,
                "sampled" => DeletionMode::Sampled {
                    count: args.count,
                    seed: args.seed,
                },
                other => return Err(CliError::User(format!("unknown drop mode {other:?}"))),
            };
            HoDocument::Scol(node_deleted_collection(&g, mode)?)
        }
        "motif" => {
            if args.motif.is_empty() {
                return Err(CliError::User(
                    "motif lifting needs at least one --motif".into(),
                ));
            }
            let motifs: Vec<Graph> = args
                .motif
                .iter()
                .map(|m| parse_motif(m))
                .collect::<CliResult<_>>()?;
            HoDocument::Motif(motif_lift(&g, &motifs)?)
        }
        "scnt" => {
            let motifs: Vec<Graph> = args
                .motif
                .iter()
                .map(|m| parse_motif(m))
                .collect::<CliResult<_>>()?;
            HoDocument::Scnt(subgraph_counts(&g, &motifs)?)
        }
        other => return Err(CliError::User(format!("unknown lift kind {other:?}"))),
    };
    write_output(&args.out, &render_document(&doc))
}

fn run_lower(args: &LowerArgs) -> CliResult<()> {
    let doc = load_document(&args.input)?;
    let h = doc.as_hypergraph()?;
    let text = match args.kind.as_str() {
        "clique" => render_document(&HoDocument::Graph(clique_expansion(h))),
        "star" => render_document(&HoDocument::Graph(star_expansion(h))),
        "bipartite" => render_document(&HoDocument::Graph(bipartite_lowering(h))),
        "weighted" => {
            let wg = weighted_lowering(h);
            let mut text =
                serde_json::to_string_pretty(&wg).expect("weighted graphs always serialize");
            text.push('\n');
            text
        }
        other => return Err(CliError::User(format!("unknown lowering {other:?}"))),
    };
    write_output(&args.out, &text)
}

fn parse_relations(text: &str) -> CliResult<Vec<Relation>> {
    text.split(',')
        .map(|r| match r.trim() {
            "boundary" => Ok(Relation::Boundary),
            "coboundary" => Ok(Relation::Coboundary),
            "upper" => Ok(Relation::Upper),
            "lower" => Ok(Relation::Lower),
            other => Err(CliError::User(format!("unknown relation {other:?}"))),
        })
        .collect()
}

fn run_wire(args: &WireArgs) -> CliResult<WiringSet> {
    let doc = load_document(&args.input)?;
    let wiring = match args.scheme.as_str() {
        "imp" => compile_imp(doc.as_hypergraph()?),
        "bamp" => {
            let relations = parse_relations(&args.relations)?;
            match doc.to_structure() {
                HoStructure::SimplicialComplex(sc) => {
                    compile_bamp(hognn_core::adjacency::Complex::from(&sc), &relations)?
                }
                HoStructure::CellComplex(cc) => {
                    compile_bamp(hognn_core::adjacency::Complex::from(&cc), &relations)?
                }
                other => {
                    return Err(CliError::User(format!(
                        "bamp needs an sc or cc document, got {}",
                        other.kind()
                    )))
                }
            }
        }
        "cwn" => match doc.to_structure() {
            HoStructure::CellComplex(cc) => compile_cwn(&cc)?,
            other => {
                return Err(CliError::User(format!(
                    "cwn needs a cc document, got {}",
                    other.kind()
                )))
            }
        },
        "damp" => match doc {
            HoDocument::Ntcol(c) => compile_damp(&c, args.local, args.inclusive)?,
            HoDocument::Graph(g) => {
                let tuples = hognn_core::transform::all_tuples(g.n(), args.k);
                let c = hognn_core::hogdm::NodeTupleCollection::new(g, &tuples, args.k)?;
                compile_damp(&c, args.local, args.inclusive)?
            }
            other => {
                return Err(CliError::User(format!(
                    "damp needs an ntcol or graph document, got {}",
                    other.kind()
                )))
            }
        },
        "multihop" => {
            let hops: Vec<usize> = args
                .hops
                .split(',')
                .map(|h| {
                    h.trim()
                        .parse()
                        .map_err(|_| CliError::User(format!("bad hop {h:?}")))
                })
                .collect::<CliResult<_>>()?;
            compile_multihop(doc.as_graph()?, &hops)?
        }
        other => return Err(CliError::User(format!("unknown scheme {other:?}"))),
    };
    write_output(&args.out, &wiring.to_csv())?;
    Ok(wiring)
}

fn run_count(args: &CountArgs) -> CliResult<String> {
    let text = read_to_string(&args.channels)?;
    let mut lines = text.lines();
    match lines.next() {
        Some("src,dst,via,tag,weight") => {}
        _ => return Err(CliError::User("not a channels file".into())),
    }
    let mut counts: std::collections::BTreeMap<String, usize> = Default::default();
    let mut total = 0usize;
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let tag = line
            .split(',')
            .nth(3)
            .ok_or_else(|| CliError::User(format!("bad channel row {line:?}")))?;
        *counts.entry(tag.to_string()).or_insert(0) += 1;
        total += 1;
    }
    let mut out = String::from("tag,count\n");
    for (tag, count) in &counts {
        out.push_str(&format!("{tag},{count}\n"));
    }
    out.push_str(&format!("total,{total}\n"));
    if let Some(path) = &args.out {
        write_output(path, &out)?;
    }
    Ok(out)
}

fn named_preset(name: &str, width: usize, seed: u64) -> CliResult<ModelSpec> {
    presets::surveyed_presets(width, seed)
        .into_iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, spec, _)| spec)
        .ok_or_else(|| CliError::User(format!("unknown preset {name:?}")))
}

fn run_mp(args: &MpRunArgs) -> CliResult<()> {
    let spec: ModelSpec = match (&args.model, &args.preset) {
        (Some(path), None) => serde_json::from_str(&read_to_string(path)?)
            .map_err(|e| CliError::User(format!("bad model file: {e}")))?,
        (None, Some(name)) => named_preset(name, args.width, args.seed)?,
        _ => {
            return Err(CliError::User(
                "give exactly one of --model or --preset".into(),
            ))
        }
    };
    let structure = load_document(&args.input)?.to_structure();
    let state = ModelState::from_structure_or_uniform(&structure, args.width)?;
    let final_state = spec.run(&structure, &state)?;
    let embedding = readout(&final_state, spec.readout)?;

    let mut out = format!("# seed={} flavor={}\n", args.seed, classify_flavor(&spec));
    for (class, matrix) in &final_state.features {
        for (i, row) in matrix.rows().into_iter().enumerate() {
            out.push_str(&format!("{}:{i}", class.short()));
            for x in row {
                out.push_str(&format!(",{x}"));
            }
            out.push('\n');
        }
    }
    out.push_str("readout");
    for x in &embedding {
        out.push_str(&format!(",{x}"));
    }
    out.push('\n');
    write_output(&args.out, &out)
}

fn run_wl_test(args: &WlTestArgs) -> CliResult<String> {
    let test = WlTest::parse(&args.test)?;
    let a = load_graph(&args.a)?;
    let b = load_graph(&args.b)?;
    let verdict = test.run(&a, &b)?;
    let name_of = |p: &Path| {
        p.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| p.display().to_string())
    };
    let mut out = String::from("test,graph_a,graph_b,verdict,rounds,messages\n");
    out.push_str(&format!(
        "{},{},{},{},{},{}\n",
        test.name(),
        name_of(&args.a),
        name_of(&args.b),
        verdict.outcome,
        verdict.rounds,
        verdict.messages
    ));
    if let Some(path) = &args.out {
        write_output(path, &out)?;
    }
    Ok(out)
}

fn run_battery(args: &BatteryArgs) -> CliResult<String> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&args.corpus)
        .map_err(|e| CliError::User(format!("cannot read {}: {e}", args.corpus.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
        .collect();
    paths.sort();
    let graphs: Vec<(String, Graph)> = paths
        .iter()
        .map(|p| {
            let name = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((name, load_graph(p)?))
        })
        .collect::<CliResult<_>>()?;
    let tests: Vec<WlTest> = args
        .tests
        .split(',')
        .map(|t| Ok(WlTest::parse(t.trim())?))
        .collect::<CliResult<_>>()?;
    let mut pairs = Vec::new();
    for i in 0..graphs.len() {
        for j in (i + 1)..graphs.len() {
            pairs.push((i, j));
        }
    }
    let report = battery(&graphs, &pairs, &tests)?;
    write_output(&args.out, &report.to_csv())?;
    let mut summary = String::new();
    for (x, y, contained) in &report.containment {
        summary.push_str(&format!(
            "distinguished({y}) {} distinguished({x})\n",
            if *contained { "within" } else { "not-within" }
        ));
    }
    Ok(summary)
}

fn run_corpus(args: &CorpusArgs) -> CliResult<String> {
    let corpus = enumerate_corpus(args.n_max, args.dedup)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| {
        CliError::Internal(format!("cannot create {}: {e}", args.out_dir.display()))
    })?;
    let mut manifest = String::from("id,n,m\n");
    for entry in &corpus.entries {
        let path = args.out_dir.join(format!("{}.json", entry.id));
        write_output(
            &path,
            &render_document(&HoDocument::Graph(entry.graph.clone())),
        )?;
        manifest.push_str(&format!(
            "{},{},{}\n",
            entry.id,
            entry.graph.n(),
            entry.graph.m()
        ));
    }
    write_output(&args.out_dir.join("corpus.csv"), &manifest)?;
    Ok(format!("{} graphs ({})\n", corpus.entries.len(), corpus.note))
}

fn run_validate(args: &ValidateArgs) -> CliResult<String> {
    let doc = load_document(&args.input)?;
    let report = validate(&doc.to_structure());
    let mut out = String::from("entity,message\n");
    for v in &report.violations {
        out.push_str(&format!("{},{}\n", v.entity, v.message));
    }
    if report.is_valid() {
        Ok(out)
    } else {
        print!("{out}");
        Err(CliError::User(format!(
            "{} violation(s) found",
            report.violations.len()
        )))
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Lift(args) => run_lift(&args),
        Command::Lower(args) => run_lower(&args),
        Command::Wire(args) => run_wire(&args).map(|w| {
            let total: usize = channel_count(&w).values().sum();
            println!("{total} channels");
        }),
        Command::Count(args) => run_count(&args).map(|out| print!("{out}")),
        Command::MpRun(args) => run_mp(&args),
        Command::WlTest(args) => run_wl_test(&args).map(|out| print!("{out}")),
        Command::Battery(args) => run_battery(&args).map(|out| print!("{out}")),
        Command::Corpus(args) => run_corpus(&args).map(|out| print!("{out}")),
        Command::Validate(args) => run_validate(&args).map(|out| print!("{out}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::User(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Internal(message)) => {
            eprintln!("internal error: {message}");
            ExitCode::from(1)
        }
    }
}
