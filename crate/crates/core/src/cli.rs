//! Command-line front end. Usage errors exit with 2, data errors with 1.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bn::{rank_classes, BayesNet};
use crate::data::{
    aggregate, make_splits, parse_dct, parse_scores, simulate_cohort, write_dct, write_scores, ItemMap, SplitPlan,
    TypeScores,
};
use crate::error::{Error, Result};
use crate::eval::{
    classify_all, comparison_grid, grid_summary, prediction_eval, CoarsePolicy, ComparisonGrid, FinePolicy,
};
use crate::learn::{
    best_permutation_agreement, greedy_structure_search, learn_cpts, majority_labels, select_classes, Dataset,
    EmConfig, OrderingConstraint, SearchConfig,
};
use crate::model::{
    type_var, ClassPrior, CoarseClass, ExpertModel, FineClass, Pcm, StudentNet, ValueScheme, CLASS_VAR, N_TYPES,
};
use crate::service::{self, ServiceState};

#[derive(Debug, Parser)]
#[command(name = "dct-bn", version, about = "Decimal-misconception diagnosis with Bayesian networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the expert student net and write it as JSON.
    BuildNet {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify students with the expert rules.
    ExpertClassify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify students with a network (MAP and ranked posterior).
    Classify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Use a saved network instead of building the expert net.
        #[arg(long)]
        net: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare two classifications and summarise the changes.
    EvaluateGrid {
        /// CSV with `student_id,reference,model`, or type scores to compare
        /// the expert rules (reference) against the net.
        input: Option<PathBuf>,
        /// Use the frozen published grid instead of an input file.
        #[arg(long, conflicts_with = "input")]
        published: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = PolicyArg::Fine)]
        policy: PolicyArg,
        /// Count AU -> MIS as undesirable.
        #[arg(long)]
        au_to_mis_undesirable: bool,
        #[arg(long)]
        item_map: Option<PathBuf>,
        /// Write the grid as CSV here.
        #[arg(long)]
        grid_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Predict each type from the other five.
    EvaluatePredict {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        net: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn CPTs for the expert structure on train splits and test them.
    LearnParams {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[command(flatten)]
        split: SplitArgs,
        /// Write the net learned from all records here.
        #[arg(long)]
        net_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Latent-class clustering with EM and penalised likelihood.
    Cluster {
        #[command(flatten)]
        input: InputArgs,
        /// Cluster the 24 items or the six type scores.
        #[arg(long, value_enum, default_value_t = RosterArg::Types)]
        roster: RosterArg,
        #[arg(long, value_enum, default_value_t = SchemeArg::Band)]
        scheme: SchemeArg,
        /// Candidate class counts, e.g. `2,3,4,5`.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4, 5, 6, 7, 8])]
        k: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, default_value_t = 500)]
        max_iters: usize,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        /// Write the per-k score table here.
        #[arg(long)]
        scores_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Greedy score-based structure search over fineClass and the type nodes.
    LearnStructure {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = SchemeArg::Band)]
        scheme: SchemeArg,
        /// Keep fineClass ancestral to every type node.
        #[arg(long)]
        constrained: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        net_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate a cohort of item responses from the expert model.
    Simulate {
        #[arg(short = 'n', long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value = "0.11")]
        pcm: String,
        #[arg(long, default_value = "table2")]
        priors: String,
        /// Every student belongs to this class.
        #[arg(long, conflicts_with = "priors")]
        prior_class: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        item_map: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Items)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP session service.
    Serve {
        /// Listen address; defaults to the DCT_BN_ADDR environment variable.
        #[arg(long)]
        addr: Option<String>,
        /// Persist sessions as JSON documents in this directory.
        #[arg(long)]
        persist: Option<PathBuf>,
        #[arg(long)]
        table: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Item responses (`student_id,i01..i24[,expert_class]`) or type scores
    /// (`student_id,t1..t6[,label]`); `-` reads stdin.
    pub input: PathBuf,
    #[arg(long)]
    pub item_map: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Band)]
    pub scheme: SchemeArg,
    /// Careless-mistake probability or preset (low, mid, high).
    #[arg(long, default_value = "0.11")]
    pub pcm: String,
    /// uniform, table2, or a file of `CLASS:prob` lines.
    #[arg(long, default_value = "table2")]
    pub priors: String,
    /// Expert table in TOML; defaults to the built-in table.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5)]
    pub splits: usize,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Count,
    Band,
}

impl From<SchemeArg> for ValueScheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Count => ValueScheme::Count,
            SchemeArg::Band => ValueScheme::Band,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Fine,
    Coarse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RosterArg {
    Items,
    Types,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Items,
    Scores,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::input(format!("{}: {e}", path.display())))
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(std::fs::write(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_model(table: Option<&Path>) -> Result<ExpertModel> {
    match table {
        Some(p) => ExpertModel::from_toml(&read_text(p)?),
        None => Ok(ExpertModel::table1()),
    }
}

fn load_priors(source: &str) -> Result<ClassPrior> {
    match source.to_ascii_lowercase().as_str() {
        "uniform" => Ok(ClassPrior::uniform()),
        "table2" => Ok(ClassPrior::table2()),
        _ => ClassPrior::parse_document(&read_text(Path::new(source))?),
    }
}

fn item_map(path: Option<&Path>, model: &ExpertModel) -> Result<ItemMap> {
    match path {
        Some(p) => ItemMap::parse(&read_text(p)?, model.item_counts()),
        None => Ok(ItemMap::contiguous(model.item_counts())),
    }
}

/// Type scores from either input layout, told apart by the header.
fn load_scores(input: &InputArgs, model: &ExpertModel) -> Result<Vec<TypeScores>> {
    let text = read_text(&input.input)?;
    let header = text.lines().next().unwrap_or("");
    if header.split(',').any(|h| h.trim() == "i01") {
        let map = item_map(input.item_map.as_deref(), model)?;
        Ok(parse_dct(&text)?.iter().map(|r| aggregate(r, &map)).collect())
    } else {
        let scores = parse_scores(&text)?;
        for s in &scores {
            model.check_scores(&s.counts).map_err(|e| Error::input(format!("student {}: {e}", s.student_id)))?;
        }
        Ok(scores)
    }
}

fn build_net(args: &ModelArgs, model: &ExpertModel) -> Result<StudentNet> {
    let pcm: Pcm = args.pcm.parse()?;
    model.build_student_net(args.scheme.into(), pcm, &load_priors(&args.priors)?)
}

fn net_for(args: &ModelArgs, saved: Option<&Path>, model: &ExpertModel) -> Result<StudentNet> {
    match saved {
        Some(p) => StudentNet::from_net(BayesNet::from_json(&read_text(p)?)?, args.scheme.into(), *model.item_counts()),
        None => build_net(args, model),
    }
}

fn labels_of(scores: &[TypeScores]) -> Result<Vec<FineClass>> {
    scores
        .iter()
        .map(|s| s.label.ok_or_else(|| Error::input(format!("student {} has no class label", s.student_id))))
        .collect()
}

fn parse_label_pairs(text: &str) -> Result<(Vec<FineClass>, Vec<FineClass>)> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != ["student_id", "reference", "model"] {
        return Err(Error::Parse { row: 1, message: "header must be student_id,reference,model".into() });
    }
    let (mut reference, mut model) = (Vec::new(), Vec::new());
    for rec in reader.records() {
        let rec = rec?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        let parse = |s: &str| s.parse::<FineClass>().map_err(|e| Error::Parse { row, message: e.to_string() });
        reference.push(parse(&rec[1])?);
        model.push(parse(&rec[2])?);
    }
    Ok((reference, model))
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::BuildNet { model, out } => {
            let expert = load_model(model.table.as_deref())?;
            let net = build_net(&model, &expert)?;
            emit(out.as_deref(), &(net.net().to_json() + "\n"))
        }
        Command::ExpertClassify { input, table, out } => {
            let expert = load_model(table.as_deref())?;
            let scores = load_scores(&input, &expert)?;
            let mut text = String::from("student_id,scores,bands,class\n");
            for s in &scores {
                let class = expert.expert_classify(&s.counts)?;
                writeln!(text, "{},{},{},{class}", s.student_id, s.digits(), expert.band_string(&s.counts)?).unwrap();
            }
            emit(out.as_deref(), &text)
        }
        Command::Classify { input, model, net, out } => {
            let expert = load_model(model.table.as_deref())?;
            let student = net_for(&model, net.as_deref(), &expert)?;
            let scores = load_scores(&input, &expert)?;
            let mut text = String::from("student_id,map_class,map_prob,coarse_map,ranked\n");
            for s in &scores {
                let evidence = student.evidence_for(&s.counts)?;
                let post = student.net().posterior(&evidence, CLASS_VAR)?;
                let coarse = student.coarse_posterior(&evidence)?;
                let ranked: Vec<String> = rank_classes(&post).iter().map(|(c, p)| format!("{c}:{p:.6}")).collect();
                writeln!(
                    text,
                    "{},{},{:.6},{},{}",
                    s.student_id,
                    post.map_state(),
                    post.probs[post.map_index()],
                    coarse.map_state(),
                    ranked.join(";")
                )
                .unwrap();
            }
            emit(out.as_deref(), &text)
        }
        Command::EvaluateGrid { input, published, model, policy, au_to_mis_undesirable, item_map, grid_out, out } => {
            let expert = load_model(model.table.as_deref())?;
            let grid: ComparisonGrid<FineClass> = if published {
                crate::eval::fixtures::table2_grid()
            } else {
                let path = input.ok_or_else(|| Error::input("an input file or --published is required"))?;
                let text = read_text(&path)?;
                let header = text.lines().next().unwrap_or("");
                if header.trim() == "student_id,reference,model" {
                    let (reference, predicted) = parse_label_pairs(&text)?;
                    comparison_grid(&reference, &predicted)?
                } else {
                    let scores = load_scores(&InputArgs { input: path, item_map }, &expert)?;
                    let reference =
                        scores.iter().map(|s| expert.expert_classify(&s.counts)).collect::<Result<Vec<_>>>()?;
                    let predicted = classify_all(&build_net(&model, &expert)?, &scores)?;
                    comparison_grid(&reference, &predicted)?
                }
            };
            if let Some(p) = grid_out {
                std::fs::write(p, grid.to_csv())?;
            }
            let text = match policy {
                PolicyArg::Fine => {
                    let policy = FinePolicy { au_to_mis_desirable: !au_to_mis_undesirable };
                    format!("{}\n{}", grid.render_table(&policy), grid_summary(&grid, &policy)?.to_document())
                }
                PolicyArg::Coarse => {
                    let mut coarse: ComparisonGrid<CoarseClass> = ComparisonGrid::new();
                    for &r in &FineClass::ALL {
                        for &c in &FineClass::ALL {
                            coarse.add_count(expert.coarse_of(r), expert.coarse_of(c), grid.get(r, c));
                        }
                    }
                    format!(
                        "{}\n{}",
                        coarse.render_table(&CoarsePolicy),
                        grid_summary(&coarse, &CoarsePolicy)?.to_document()
                    )
                }
            };
            emit(out.as_deref(), &text)
        }
        Command::EvaluatePredict { input, model, net, out } => {
            let expert = load_model(model.table.as_deref())?;
            let student = net_for(&model, net.as_deref(), &expert)?;
            let report = prediction_eval(&student, &load_scores(&input, &expert)?)?;
            emit(out.as_deref(), &report.to_document())
        }
        Command::LearnParams { input, model, alpha, split, net_out, out } => {
            let expert = load_model(model.table.as_deref())?;
            let reference = build_net(&model, &expert)?;
            let scores = load_scores(&input, &expert)?;
            let labels = labels_of(&scores)?;
            let data = Dataset::for_student_net(&scores, &reference, &expert)?;
            let plan = SplitPlan { seed: split.seed, k: split.splits, test_fraction: split.test_fraction };
            let mut text = String::from("algorithm: dirichlet-counts\nsplit,train,test,label_agreement,expert_net_agreement,avg_prediction_accuracy\n");
            for (i, sp) in make_splits(scores.len(), &plan)?.iter().enumerate() {
                let learned = learn_cpts(reference.net(), &data.subset(&sp.train), alpha)?;
                let student = StudentNet::from_net(learned.net, reference.scheme(), *reference.item_counts())?;
                let test: Vec<TypeScores> = sp.test.iter().map(|&j| scores[j].clone()).collect();
                let predicted = classify_all(&student, &test)?;
                let baseline = classify_all(&reference, &test)?;
                let n = test.len() as f64;
                let label_agree = sp.test.iter().zip(&predicted).filter(|(&j, p)| labels[j] == **p).count() as f64 / n;
                let net_agree = predicted.iter().zip(&baseline).filter(|(a, b)| a == b).count() as f64 / n;
                let pred = prediction_eval(&student, &test)?;
                writeln!(
                    text,
                    "{},{},{},{:.4},{:.4},{:.4}",
                    i + 1,
                    sp.train.len(),
                    sp.test.len(),
                    label_agree,
                    net_agree,
                    pred.avg_accuracy
                )
                .unwrap();
            }
            if let Some(p) = net_out {
                let learned = learn_cpts(reference.net(), &data, alpha)?;
                for w in &learned.warnings {
                    eprintln!("warning: no data for row {} of {}; set uniform", w.row, w.variable);
                }
                std::fs::write(p, learned.net.to_json() + "\n")?;
            }
            emit(out.as_deref(), &text)
        }
        Command::Cluster { input, roster, scheme, k, seed, restarts, max_iters, threshold, scores_out, out } => {
            let expert = load_model(None)?;
            let (data, labels) = match roster {
                RosterArg::Items => {
                    let text = read_text(&input.input)?;
                    let records = parse_dct(&text)?;
                    let labels: Vec<Option<FineClass>> = records.iter().map(|r| r.expert_label).collect();
                    (Dataset::from_items(&records)?, labels)
                }
                RosterArg::Types => {
                    let scores = load_scores(&input, &expert)?;
                    let labels = scores.iter().map(|s| s.label).collect();
                    (Dataset::from_scores(&scores, scheme.into(), expert.item_counts())?, labels)
                }
            };
            let config = EmConfig { max_iters, tol: 1e-6, restarts, unclassified_threshold: threshold };
            let sel = select_classes(&data, &k, seed, &config)?;
            let mut table = String::from("k,loglik,parameters,score\n");
            for s in &sel.scores {
                writeln!(table, "{},{:.4},{},{:.4}", s.k, s.loglik, s.parameters, s.score).unwrap();
            }
            if let Some(p) = scores_out {
                std::fs::write(p, &table)?;
            }
            let mut text = format!(
                "# algorithm: em-latent-class, penalised likelihood\n# selected k: {}\n# unclassified: {}\nrecord_id,class,max_responsibility,unclassified\n",
                sel.k(),
                sel.unclassified()
            );
            for (i, r) in sel.best.responsibilities.iter().enumerate() {
                let best = crate::bn::argmax(r);
                writeln!(text, "{},{},{:.6},{}", data.ids()[i], best + 1, r[best], sel.assignments[i].is_none())
                    .unwrap();
            }
            if labels.iter().all(Option::is_some) && !labels.is_empty() {
                let truth: Vec<usize> = labels.iter().map(|l| l.expect("checked").index()).collect();
                let mapping = majority_labels(&sel.assignments, &truth, sel.k(), FineClass::COUNT);
                let (mut reference, mut clustered) = (Vec::new(), Vec::new());
                for (a, &t) in sel.assignments.iter().zip(&truth) {
                    if let Some(m) = a.and_then(|a| mapping[a]) {
                        reference.push(FineClass::ALL[t]);
                        clustered.push(FineClass::ALL[m]);
                    }
                }
                let grid = comparison_grid(&reference, &clustered)?;
                let policy = FinePolicy::default();
                writeln!(
                    text,
                    "\n# clusters vs labels (majority mapping), permutation agreement {:.4}\n{}\n{}",
                    best_permutation_agreement(&sel.assignments, &truth),
                    grid.render_table(&policy),
                    grid_summary(&grid, &policy)?.to_document()
                )
                .unwrap();
            }
            emit(out.as_deref(), &format!("{table}\n{text}"))
        }
        Command::LearnStructure { input, scheme, constrained, seed, restarts, alpha, net_out, out } => {
            let expert = load_model(None)?;
            let scores = load_scores(&input, &expert)?;
            let data = Dataset::labelled(&scores, scheme.into(), expert.item_counts())?;
            let types: Vec<String> = (1..=N_TYPES).map(type_var).collect();
            let names: Vec<&str> = types.iter().map(String::as_str).collect();
            let constraint =
                if constrained { Some(OrderingConstraint::by_name(&data, CLASS_VAR, &names)?) } else { None };
            let config = SearchConfig { seed, restarts, alpha, ..SearchConfig::default() };
            let result = greedy_structure_search(&data, constraint.as_ref(), &config)?;
            let mut text = String::from("algorithm: greedy-hill-climbing, bic\n");
            writeln!(text, "nodes: {}", data.variables().len()).unwrap();
            writeln!(text, "arcs: {}", result.arcs).unwrap();
            writeln!(text, "arcs_per_node: {:.4}", result.arcs_per_node).unwrap();
            writeln!(text, "parameters: {}", result.parameters).unwrap();
            writeln!(text, "loglik: {:.4}", result.score.loglik).unwrap();
            writeln!(text, "score: {:.4}", result.score.score).unwrap();
            if let Some(c) = &constraint {
                writeln!(text, "class_ancestral: {}", c.root_reaches_all(&result.net)).unwrap();
            }
            for (a, b) in result.net.arcs() {
                writeln!(text, "arc: {} -> {}", result.net.variable(a).name, result.net.variable(b).name).unwrap();
            }
            if let Some(p) = net_out {
                std::fs::write(p, result.net.to_json() + "\n")?;
            }
            emit(out.as_deref(), &text)
        }
        Command::Simulate { n, pcm, priors, prior_class, seed, item_map: map_path, format, out } => {
            let expert = load_model(None)?;
            let priors = match prior_class {
                Some(c) => ClassPrior::point_mass(c.parse()?),
                None => load_priors(&priors)?,
            };
            let map = item_map(map_path.as_deref(), &expert)?;
            let cohort = simulate_cohort(&expert, &priors, pcm.parse()?, n, seed, &map)?;
            let records: Vec<_> = cohort
                .iter()
                .map(|s| {
                    let mut r = s.record.clone();
                    r.expert_label = Some(s.class);
                    r
                })
                .collect();
            let text = match format {
                FormatArg::Items => write_dct(&records)?,
                FormatArg::Scores => write_scores(&records.iter().map(|r| aggregate(r, &map)).collect::<Vec<_>>())?,
            };
            emit(out.as_deref(), &text)
        }
        Command::Serve { addr, persist, table } => {
            let model = load_model(table.as_deref())?;
            let mut state = ServiceState::new(model);
            if let Some(dir) = persist {
                state = state.with_persistence(dir)?;
            }
            let addr = addr.unwrap_or_else(service::listen_addr);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::bind(&addr).await?;
                eprintln!("listening on {}", listener.local_addr()?);
                service::serve(listener, Arc::new(state)).await
            })
        }
    }
}
