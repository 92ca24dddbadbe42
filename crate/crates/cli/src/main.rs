use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rankw_core::cutrank::members;
use rankw_core::graph::{encode_directed, encode_oriented, encode_undirected, parse_graph, write_graph, GraphFile};
use rankw_core::layout::{decide_width_at_most, width_exact, WidthOptions};
use rankw_core::terms::{term_from_layout_birank, term_from_layout_rank};
use rankw_core::transform::{find_obstructions, is_minor, local_complement, local_complement_sigma, pivot_complement, pivot_raw, DEFAULT_BUDGET};
use rankw_core::{
    selfcheck, BiRankTerm, ColoredGraph, CutFunction, CutKind, Layout, MinorAnswer, RankTerm, Relation,
    Sesquimorphism, Strategy, WidthResult,
};
use rankw_core::{Error, Field};

#[derive(Parser, Debug)]
#[command(name = "rankw", version, about = "Rank-width and bi-rank-width of edge-colored graphs over finite fields")]
struct Cli {
    /// Mirror the output as a JSON document.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for the ChaCha8 generator behind randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; output does not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact rank-width or bi-rank-width with a witness layout.
    Width(WidthArgs),
    /// Value of a cut function on one vertex set.
    Cut(CutArgs),
    /// Local or pivot complementation, or a minor test.
    Transform(TransformArgs),
    /// Build a graph file from an undirected, directed or oriented graph.
    Encode(EncodeArgs),
    /// Evaluate or compile bilinear-product terms.
    #[command(subcommand)]
    Term(TermCommand),
    /// Minimal graphs of width above k under a minor relation.
    Obstructions(ObstructionArgs),
    /// Run the property battery and print a pass/fail table.
    Selfcheck,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Param {
    Rank,
    Birank,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Bnb,
    Enumerate,
    Dp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Cutrk,
    Bicutrk,
    Lambda,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RelationArg {
    SigmaVertex,
    Vertex,
    Pivot,
}

impl RelationArg {
    fn relation(self) -> Relation {
        match self {
            RelationArg::SigmaVertex => Relation::SigmaVertex,
            RelationArg::Vertex => Relation::Vertex,
            RelationArg::Pivot => Relation::Pivot,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EncodeFrom {
    Undirected,
    Directed,
    Oriented,
}

#[derive(Args, Debug)]
struct WidthArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "rank")]
    param: Param,
    /// Only decide whether the width is at most K.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, value_enum, default_value = "bnb")]
    strategy: StrategyArg,
    /// Allow sizes above the default limit of the strategy.
    #[arg(long)]
    force: bool,
    /// Write the witness layout in Newick form.
    #[arg(long)]
    emit_layout: Option<PathBuf>,
    #[arg(long)]
    emit_dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CutArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma separated vertex labels.
    #[arg(long, default_value = "")]
    set: String,
    #[arg(long, value_enum, default_value = "cutrk")]
    kind: KindArg,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long)]
    input: PathBuf,
    /// Vertex for local complementation.
    #[arg(long, requires = "lambda", conflicts_with_all = ["pivot", "contains"])]
    local: Option<String>,
    /// Element code for local complementation.
    #[arg(long)]
    lambda: Option<u32>,
    /// Accept any nonzero lambda; the result loses its sigma line.
    #[arg(long)]
    any_lambda: bool,
    /// Edge `x,y` for pivot complementation.
    #[arg(long, conflicts_with = "contains")]
    pivot: Option<String>,
    /// Graph file to look for as a minor of the input.
    #[arg(long)]
    contains: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "sigma-vertex")]
    relation: RelationArg,
    /// Orbit members explored by the minor test.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    emit_dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[arg(long, value_enum)]
    from: EncodeFrom,
    /// Pairs such as `x-y,y>z`; `-`, `>` or a space separate the ends.
    #[arg(long, alias = "arcs", default_value = "")]
    edges: String,
    /// Vertex labels in order; defaults to their first appearance in the pairs.
    #[arg(long)]
    vertices: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    emit_dot: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum TermCommand {
    /// Evaluate a term file to a graph file.
    Eval(TermEvalArgs),
    /// Compile a graph into a term along an optimal or given layout.
    Compile(TermCompileArgs),
}

#[derive(Args, Debug)]
struct TermEvalArgs {
    #[arg(long)]
    input: PathBuf,
    /// `p k`, e.g. `--field 2 2`.
    #[arg(long, num_args = 2, value_names = ["P", "K"])]
    field: Vec<u32>,
    /// Needed for rank terms.
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    emit_dot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TermCompileArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "rank")]
    param: Param,
    /// Newick layout to compile along; an optimal one is computed otherwise.
    #[arg(long)]
    layout: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ObstructionArgs {
    #[arg(long, num_args = 2, value_names = ["P", "K"])]
    field: Vec<u32>,
    #[arg(long, default_value = "id")]
    sigma: String,
    /// `vertex` is read as the sigma-compatible vertex-minor relation here.
    #[arg(long, default_value = "sigma-vertex")]
    relation: String,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    max_n: usize,
    /// Directory for one graph file per obstruction and an index.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 1 {
        // only fails if a pool exists already, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Check(text)) => {
            print!("{text}");
            ExitCode::from(1)
        }
    }
}

enum Failure {
    Domain(String),
    /// Failed self-check; the report still goes to stdout.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Out = Result<String, Failure>;

fn fail(msg: impl Into<String>) -> Failure {
    Failure::Domain(msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| fail(format!("cannot write {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<GraphFile, Failure> {
    Ok(parse_graph(&read(path)?)?)
}

fn field_arg(v: &[u32]) -> Result<Field, Failure> {
    match v {
        [p, k] => Ok(Field::new(*p, *k)?),
        _ => Err(fail("--field takes a characteristic and a degree")),
    }
}

fn render(json: bool, value: Value, text: String) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(&value).expect("JSON values serialize");
        s.push('\n');
        s
    } else {
        text
    }
}

fn run(cli: &Cli) -> Out {
    match &cli.command {
        Command::Width(a) => width(cli, a),
        Command::Cut(a) => cut(cli, a),
        Command::Transform(a) => transform(cli, a),
        Command::Encode(a) => encode(cli, a),
        Command::Term(TermCommand::Eval(a)) => term_eval(cli, a),
        Command::Term(TermCommand::Compile(a)) => term_compile(cli, a),
        Command::Obstructions(a) => obstructions(cli, a),
        Command::Selfcheck => {
            let report = selfcheck::run(cli.seed);
            let json = serde_json::to_value(&report).expect("report serializes");
            let text = render(cli.json, json, report.to_table());
            if report.passed() {
                Ok(text)
            } else {
                Err(Failure::Check(text))
            }
        }
    }
}

fn cut_function<'g>(file: &'g GraphFile, kind: CutKind) -> Result<CutFunction<'g>, Failure> {
    if kind == CutKind::CutRank && file.sigma.is_none() {
        return Err(fail("cut-rank needs a sigma line in the graph file"));
    }
    Ok(CutFunction::new(&file.graph, kind, file.sigma.as_ref())?)
}

fn param_kind(p: Param) -> CutKind {
    match p {
        Param::Rank => CutKind::CutRank,
        Param::Birank => CutKind::BiCutRank,
    }
}

fn cuts_json(r: &WidthResult, labels: &[String]) -> Value {
    r.cuts()
        .into_iter()
        .map(|(mask, v)| {
            let side: Vec<&str> = members(mask).into_iter().map(|i| labels[i].as_str()).collect();
            json!({ "side": side, "value": v })
        })
        .collect()
}

fn width(cli: &Cli, a: &WidthArgs) -> Out {
    let file = load_graph(&a.input)?;
    let labels = file.graph.labels();
    let f = cut_function(&file, param_kind(a.param))?;
    let strategy = match a.strategy {
        StrategyArg::Bnb => Strategy::BranchAndBound,
        StrategyArg::Enumerate => Strategy::Enumerate,
        StrategyArg::Dp => Strategy::SubsetDp,
    };
    let opts = WidthOptions {
        strategy,
        force: a.force,
        jobs: cli.jobs,
    };
    if let Some(path) = &a.emit_dot {
        write(path, &file.graph.to_dot())?;
    }
    if let Some(k) = a.k {
        let found = decide_width_at_most(&f, k, &opts)?;
        let mut text = format!("width <= {k}: {}\n", if found.is_some() { "yes" } else { "no" });
        let mut value = json!({ "k": k, "holds": found.is_some() });
        if let Some(l) = &found {
            let r = rankw_core::layout::layout_width(&f, l)?;
            text.push_str(&format!("layout {}\n", l.to_newick(labels)));
            value["witness"] = json!(l.to_newick(labels));
            value["cuts"] = cuts_json(&r, labels);
            if let Some(path) = &a.emit_layout {
                write(path, &format!("{}\n", l.to_newick_with_width(labels, r.width)))?;
            }
        }
        return Ok(render(cli.json, value, text));
    }
    let r = width_exact(&f, &opts)?;
    let newick = r.witness.to_newick(labels);
    if let Some(path) = &a.emit_layout {
        write(path, &format!("{}\n", r.witness.to_newick_with_width(labels, r.width)))?;
    }
    let text = format!(
        "width {}\nlayout {newick}\n{}",
        r.width,
        rankw_core::layout::describe_cuts(&r, labels)
    );
    let value = json!({ "width": r.width, "witness": newick, "cuts": cuts_json(&r, labels) });
    Ok(render(cli.json, value, text))
}

fn split_list(s: &str) -> Vec<String> {
    s.split([',', ' '])
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(String::from)
        .collect()
}

fn cut(cli: &Cli, a: &CutArgs) -> Out {
    let file = load_graph(&a.input)?;
    let kind = match a.kind {
        KindArg::Cutrk => CutKind::CutRank,
        KindArg::Bicutrk => CutKind::BiCutRank,
        KindArg::Lambda => CutKind::MatroidLambda,
    };
    let f = cut_function(&file, kind)?;
    let set = split_list(&a.set);
    let v = f.eval_labels(&set)?;
    let value = json!({ "kind": kind.name(), "set": set, "value": v });
    Ok(render(cli.json, value, format!("{v}\n")))
}

fn emit_graph(cli: &Cli, g: &ColoredGraph, sigma: Option<&Sesquimorphism>, output: &Option<PathBuf>, dot: &Option<PathBuf>) -> Out {
    let text = write_graph(g, sigma);
    if let Some(path) = dot {
        write(path, &g.to_dot())?;
    }
    let value = json!({
        "field": [g.field().characteristic(), g.field().degree()],
        "sigma": sigma.map(|s| s.spec_string()),
        "vertices": g.labels(),
        "adjacency": (0..g.n()).map(|x| (0..g.n()).map(|y| g.get(x, y)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    if let Some(path) = output {
        write(path, &text)?;
        return Ok(if cli.json { render(true, value, String::new()) } else { String::new() });
    }
    Ok(render(cli.json, value, text))
}

fn transform(cli: &Cli, a: &TransformArgs) -> Out {
    let file = load_graph(&a.input)?;
    let g = &file.graph;
    if let Some(path) = &a.contains {
        let h = load_graph(path)?;
        let rel = a.relation.relation();
        let sigma = file
            .sigma
            .clone()
            .unwrap_or_else(|| Sesquimorphism::identity(g.field()));
        let answer = is_minor(&h.graph, g, &sigma, rel, a.budget)?;
        let (text, value) = match &answer {
            MinorAnswer::Found { member, vertices } => {
                let names: Vec<&str> = vertices.iter().map(|&i| member.label(i)).collect();
                (
                    format!("found on {}\n{}", names.join(","), write_graph(member, file.sigma.as_ref())),
                    json!({ "answer": "found", "vertices": names }),
                )
            }
            MinorAnswer::NotFound { budget } => (
                format!("not found (budget {budget})\n"),
                json!({ "answer": "not-found", "budget": budget }),
            ),
            MinorAnswer::Absent => ("absent\n".to_string(), json!({ "answer": "absent" })),
        };
        return Ok(render(cli.json, value, text));
    }
    if let Some(x) = &a.local {
        let x = g.index_of(x)?;
        let lambda = a.lambda.ok_or_else(|| fail("--local needs --lambda"))?;
        return match (&file.sigma, a.any_lambda) {
            (Some(_), false) => {
                let sg = file.sigma_graph()?;
                let h = local_complement_sigma(&sg, x, lambda)?;
                emit_graph(cli, h.graph(), Some(h.sigma()), &a.output, &a.emit_dot)
            }
            _ => {
                let h = local_complement(g, x, lambda)?;
                emit_graph(cli, &h, None, &a.output, &a.emit_dot)
            }
        };
    }
    if let Some(edge) = &a.pivot {
        let ends = split_list(edge);
        let [x, y] = ends.as_slice() else {
            return Err(fail("--pivot takes two vertices `x,y`"));
        };
        let (x, y) = (g.index_of(x)?, g.index_of(y)?);
        return match &file.sigma {
            Some(_) => {
                let h = pivot_complement(&file.sigma_graph()?, x, y)?;
                emit_graph(cli, h.graph(), Some(h.sigma()), &a.output, &a.emit_dot)
            }
            None => {
                let h = pivot_raw(g, 1, x, y)?;
                emit_graph(cli, &h, None, &a.output, &a.emit_dot)
            }
        };
    }
    Err(fail("transform needs one of --local, --pivot or --contains"))
}

fn parse_pairs(s: &str) -> Result<Vec<(String, String)>, Failure> {
    let mut out = Vec::new();
    for item in s.split([',', ';']).map(str::trim).filter(|t| !t.is_empty()) {
        let ends: Vec<&str> = item
            .split(['-', '>', ' '])
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .collect();
        let [u, v] = ends.as_slice() else {
            return Err(fail(format!("cannot read pair {item:?}")));
        };
        out.push((u.to_string(), v.to_string()));
    }
    Ok(out)
}

fn encode(cli: &Cli, a: &EncodeArgs) -> Out {
    let pairs = parse_pairs(&a.edges)?;
    let labels = match &a.vertices {
        Some(v) => split_list(v),
        None => {
            let mut seen: Vec<String> = Vec::new();
            for (u, v) in &pairs {
                for l in [u, v] {
                    if !seen.contains(l) {
                        seen.push(l.clone());
                    }
                }
            }
            seen
        }
    };
    let g = match a.from {
        EncodeFrom::Undirected => encode_undirected(labels, &pairs)?,
        EncodeFrom::Directed => encode_directed(labels, &pairs)?,
        EncodeFrom::Oriented => encode_oriented(labels, &pairs)?,
    };
    emit_graph(cli, g.graph(), Some(g.sigma()), &a.output, &a.emit_dot)
}

fn is_birank_text(text: &str) -> bool {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .any(|l| l.contains("(biconst") || l.contains("(biprod"))
}

fn term_eval(cli: &Cli, a: &TermEvalArgs) -> Out {
    let field = field_arg(&a.field)?;
    let text = read(&a.input)?;
    if is_birank_text(&text) {
        let t = BiRankTerm::parse(&field, &text)?;
        let ev = t.eval(&field)?;
        return emit_graph(cli, &ev.graph, None, &a.output, &a.emit_dot);
    }
    let spec = a.sigma.as_deref().ok_or_else(|| fail("rank terms need --sigma"))?;
    let sigma = Sesquimorphism::parse(&field, spec)?;
    let t = RankTerm::parse(&field, &text)?;
    let ev = t.eval(&sigma)?;
    emit_graph(cli, ev.graph.graph(), Some(ev.graph.sigma()), &a.output, &a.emit_dot)
}

fn term_compile(cli: &Cli, a: &TermCompileArgs) -> Out {
    let file = load_graph(&a.input)?;
    let g = &file.graph;
    let labels = g.labels();
    let kind = param_kind(a.param);
    let layout = match &a.layout {
        Some(path) => Layout::parse_newick(&read(path)?, labels)?.0,
        None => {
            let f = cut_function(&file, kind)?;
            width_exact(&f, &WidthOptions { jobs: cli.jobs, ..Default::default() })?.witness
        }
    };
    let (body, leaves, width) = match a.param {
        Param::Rank => {
            let c = term_from_layout_rank(&file.sigma_graph()?, &layout)?;
            (c.term.to_sexpr(), c.leaf_vertices, c.term.max_width())
        }
        Param::Birank => {
            let c = term_from_layout_birank(g, &layout)?;
            (c.term.to_sexpr(), c.leaf_vertices, c.term.max_width())
        }
    };
    let leaf_names: Vec<&str> = leaves.iter().map(|&i| labels[i].as_str()).collect();
    let text = format!("# leaves {}\n# width {width}\n{body}\n", leaf_names.join(" "));
    let value = json!({ "term": body, "leaves": leaf_names, "width": width });
    if let Some(path) = &a.output {
        write(path, &text)?;
        return Ok(if cli.json { render(true, value, String::new()) } else { String::new() });
    }
    Ok(render(cli.json, value, text))
}

fn obstruction_relation(s: &str) -> Result<Relation, Failure> {
    match s {
        // all-lambda vertex minors do not preserve symmetry; the search is
        // defined for the sigma-compatible relation
        "vertex" | "sigma-vertex" => Ok(Relation::SigmaVertex),
        "pivot" => Ok(Relation::Pivot),
        other => Err(fail(format!("unknown relation {other:?}; expected vertex, sigma-vertex or pivot"))),
    }
}

fn obstructions(cli: &Cli, a: &ObstructionArgs) -> Out {
    let field = field_arg(&a.field)?;
    let sigma = Sesquimorphism::parse(&field, &a.sigma)?;
    let rel = obstruction_relation(&a.relation)?;
    let found = find_obstructions(&sigma, rel, a.k, a.max_n)?;
    let mut text = String::new();
    let mut index = String::new();
    let mut entries = Vec::new();
    for (i, o) in found.iter().enumerate() {
        let name = format!("obs{:03}.rg", i + 1);
        let form = o.form.to_text();
        text.push_str(&format!("{name} n={} {form}\n", o.graph.n()));
        index.push_str(&format!("{name} {form}\n"));
        entries.push(json!({ "file": name, "n": o.graph.n(), "form": form }));
        if let Some(dir) = &a.out {
            fs::create_dir_all(dir).map_err(|e| fail(format!("cannot create {}: {e}", dir.display())))?;
            write(&dir.join(&name), &write_graph(o.graph.graph(), Some(o.graph.sigma())))?;
        }
    }
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir).map_err(|e| fail(format!("cannot create {}: {e}", dir.display())))?;
        write(&dir.join("index.txt"), &index)?;
    }
    text.push_str(&format!(
        "{} obstructions for width {} under {} over {} up to {} vertices\n",
        found.len(),
        a.k,
        rel.name(),
        field.name(),
        a.max_n
    ));
    let value = json!({
        "field": field.name(),
        "sigma": sigma.spec_string(),
        "relation": rel.name(),
        "k": a.k,
        "max_n": a.max_n,
        "obstructions": entries,
    });
    Ok(render(cli.json, value, text))
}
