use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use glc_core::error::ErrorKind;
use glc_core::geometry::{render_svg, separate_hyperblocks, Scene};
use glc_core::hyperblock::{hb_analytics, rule_from_selection, Hyperblock, Rect};
use glc_core::kernel::{glc_nl_from_support_vectors, load_support_vectors, CoefficientSource, KernelConfig, KernelKind};
use glc_core::pipeline::{
    fit, induce, parse_models, parse_order, prepare, require_binary, to_json, view_scene, BlockSpec, FitMethod,
    FitSpec, FittedModel, Induction, Preprocess, RulesDocument, SeparationDocument, ViewMode, WorstCaseDocument,
    DEFAULT_SUPER_CLASS,
};
use glc_core::validation::{
    compare_on_split, external_cv_result, external_split_accuracy, load_external_predictions, mean_std, CvTable,
    ExternalPrediction, FoldPlan, SplitComparison, SplitComparisonRow,
};
use glc_core::worst_case::{manual_split, wcl_split, worst_case_report, DEFAULT_CAP};
use glc_core::{binarize, load_csv, BinarizationSpec, ClassRoles, Dataset, GlcError, LabelColumn};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

trait Context<T> {
    fn at(self, what: &str) -> Outcome<T>;
}

impl<T> Context<T> for glc_core::Result<T> {
    fn at(self, what: &str) -> Outcome<T> {
        self.map_err(|e| Failure {
            code: match e.kind() {
                ErrorKind::Data => 2,
                ErrorKind::Validation => 1,
            },
            message: format!("{what}: {e}"),
        })
    }
}

#[derive(Parser)]
#[command(name = "glc", version, about = "General Line Coordinates for interpretable classification")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a GLC-L model and report its accuracy.
    Fit(FitCmd),
    /// Draw a GLC-L, DSC1 or DSC2 view.
    Viz(VizCmd),
    /// Fit a kernel (GLC-nL) model.
    Nl(NlCmd),
    /// Induce hyperblock rules.
    Rules(RulesCmd),
    /// Worst-case split and its four-way report.
    Worstcase(WorstCmd),
    /// k-fold cross-validation of the classifier set.
    Cv(CvCmd),
    /// Pull two hyperblocks apart in the GLC-L view.
    Separate(SeparateCmd),
    /// Run the HTTP service.
    Serve(ServeCmd),
}

#[derive(Args)]
struct DataArgs {
    /// CSV file with a header row.
    data: PathBuf,
    /// Label column, by name or 0-based index.
    #[arg(long, default_value = "class")]
    label_col: String,
    /// Keep this class and merge all others (one-vs-rest).
    #[arg(long)]
    positive: Option<String>,
    /// Name of the merged class.
    #[arg(long, default_value = DEFAULT_SUPER_CLASS)]
    super_name: String,
    /// Append x_i² columns before normalizing.
    #[arg(long)]
    squares: bool,
    /// Append this many principal-component scores.
    #[arg(long, value_name = "N")]
    pca: Option<usize>,
    #[arg(long, env = "GLC_SEED", default_value_t = 0)]
    seed: u64,
}

impl DataArgs {
    fn load(&self) -> Outcome<Dataset> {
        let file = self.data.display().to_string();
        let bytes = read(&self.data)?;
        let name = self
            .data
            .file_stem()
            .map_or_else(|| "data".to_string(), |s| s.to_string_lossy().into_owned());
        let raw = load_csv(&bytes[..], &LabelColumn::parse(&self.label_col))
            .at(&file)?
            .with_name(name);
        let p = Preprocess {
            positive_class: self.positive.clone(),
            super_class_name: self.super_name.clone(),
            squares: self.squares,
            pca_components: self.pca,
        };
        let what = if self.positive.is_some() { "--positive" } else { file.as_str() };
        prepare(&raw, &p).at(what)
    }
}

#[derive(Args)]
struct ModelArgs {
    /// lda or glc_nl.
    #[arg(long, default_value = "lda")]
    method: String,
    /// poly or rbf (GLC-nL only).
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    degree: Option<i32>,
    /// Class drawn below the threshold.
    #[arg(long)]
    class1: Option<String>,
    /// Expanded-space coefficients: lda or dual.
    #[arg(long, default_value = "lda")]
    coefficients: String,
    /// Replace the swept threshold (normalized scale).
    #[arg(long)]
    threshold: Option<f64>,
    /// Set the angle of attribute I (1-based) in degrees, as I:DEG.
    #[arg(long = "angle", value_name = "I:DEG")]
    angles: Vec<String>,
}

fn parse_coefficients(s: &str) -> Outcome<CoefficientSource> {
    match s.to_ascii_lowercase().as_str() {
        "lda" => Ok(CoefficientSource::Lda),
        "dual" | "dual_coefficients" => Ok(CoefficientSource::DualCoefficients),
        _ => Err(usage(format!("--coefficients: expected lda or dual, got {s:?}"))),
    }
}

fn parse_angle(s: &str) -> Outcome<(usize, f64)> {
    let bad = || usage(format!("--angle: expected I:DEG with a 1-based attribute, got {s:?}"));
    let (i, deg) = s.split_once(':').ok_or_else(bad)?;
    let i: usize = i.trim().parse().map_err(|_| bad())?;
    let deg: f64 = deg.trim().parse().map_err(|_| bad())?;
    if i == 0 {
        return Err(bad());
    }
    Ok((i - 1, deg))
}

impl ModelArgs {
    fn spec(&self, seed: u64, force_nl: bool) -> Outcome<FitSpec> {
        let method = if force_nl {
            FitMethod::GlcNl
        } else {
            self.method.parse().at("--method")?
        };
        let kernel = self
            .kernel
            .as_deref()
            .map(str::parse::<KernelKind>)
            .transpose()
            .at("--kernel")?;
        if method == FitMethod::Lda && kernel.is_some() {
            return Err(usage("--kernel needs --method glc_nl"));
        }
        Ok(FitSpec {
            method,
            kernel,
            gamma: self.gamma,
            degree: self.degree,
            seed,
            class1: self.class1.clone(),
            coefficients: parse_coefficients(&self.coefficients)?,
        })
    }

    fn edit(&self, f: FittedModel) -> Outcome<FittedModel> {
        let mut model = f.model.clone();
        if let Some(t) = self.threshold {
            if !t.is_finite() {
                return Err(usage("--threshold must be finite"));
            }
            model = model.with_threshold(t);
        }
        for a in &self.angles {
            let (i, deg) = parse_angle(a)?;
            model = model.with_angle(i, deg.to_radians()).at("--angle")?;
        }
        Ok(f.with_model(model))
    }

    fn fit(&self, d: &Dataset, seed: u64) -> Outcome<FittedModel> {
        let spec = self.spec(seed, false)?;
        let what = if spec.class1.is_some() { "--class1" } else { "fit" };
        let f = fit(d, &spec).at(what)?;
        self.edit(f)
    }
}

fn read(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

fn write_out(path: &Path, body: &str) -> Outcome {
    fs::write(path, body).map_err(|e| Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    })
}

/// Writes to `path` when given, stdout otherwise.
fn emit(path: Option<&PathBuf>, body: &str) -> Outcome {
    match path {
        Some(p) => write_out(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> Outcome<String> {
    to_json(v).at("serialize")
}

fn print_model(f: &FittedModel, base: &Dataset) -> Outcome {
    let doc = f.document(base).at("evaluate")?;
    let m = &doc.model;
    let attrs = &doc.dataset.attributes;
    println!(
        "{}: {} points, {} attributes",
        doc.dataset.name, doc.dataset.n_points, doc.dataset.n_attributes
    );
    println!(
        "class 1 = {}, class 2 = {}",
        m.roles().class1,
        m.roles().class2
    );
    if attrs.len() <= 40 {
        for (i, a) in attrs.iter().enumerate() {
            println!(
                "  {:>3} {:<24} k = {:>9.5}  angle = {:>8.3}°",
                i + 1,
                a,
                m.k()[i],
                m.angles_deg()[i]
            );
        }
    }
    println!("threshold T = {:.6} (raw {:.6})", m.threshold(), m.raw_threshold());
    println!(
        "accuracy = {:.4} ({} / {})",
        doc.evaluation.accuracy,
        doc.evaluation.correct(),
        doc.evaluation.total()
    );
    Ok(())
}

#[derive(Args)]
struct FitCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Write the fit document as JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn run_fit(c: FitCmd) -> Outcome {
    let d = c.data.load()?;
    let f = c.model.fit(&d, c.data.seed)?;
    print_model(&f, &d)?;
    if let Some(p) = &c.output {
        write_out(p, &json(&f.document(&d).at("evaluate")?)?)?;
    }
    Ok(())
}

#[derive(Args)]
struct ViewArgs {
    /// glcl, dsc1 or dsc2.
    #[arg(long, default_value = "glcl")]
    mode: String,
    /// Attribute order for DSC views, 1-based, e.g. 4,2,3,1.
    #[arg(long)]
    order: Option<String>,
    #[arg(long, default_value_t = glc_service::DEFAULT_SVG_SIZE.0)]
    width: u32,
    #[arg(long, default_value_t = glc_service::DEFAULT_SVG_SIZE.1)]
    height: u32,
}

#[derive(Args)]
struct VizCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    view: ViewArgs,
    /// SVG output file.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the scene as JSON.
    #[arg(long)]
    scene: Option<PathBuf>,
}

fn write_scene(scene: &Scene, svg: Option<&PathBuf>, scene_json: Option<&PathBuf>, (w, h): (u32, u32)) -> Outcome {
    if w == 0 || h == 0 {
        return Err(usage("--width and --height must be positive"));
    }
    if let Some(p) = scene_json {
        write_out(p, &json(scene)?)?;
    }
    let out = render_svg(scene, w, h);
    match svg {
        Some(p) => write_out(p, &out),
        None if scene_json.is_none() => emit(None, &out),
        None => Ok(()),
    }
}

fn run_viz(c: VizCmd) -> Outcome {
    let d = c.data.load()?;
    let mode: ViewMode = c.view.mode.parse().at("--mode")?;
    let order = c.view.order.as_deref().map(parse_order).transpose().at("--order")?;
    let d = if mode == ViewMode::Glcl && d.classes().len() > 2 {
        let positive = c.model.class1.clone().unwrap_or_else(|| d.classes()[0].clone());
        eprintln!("note: {} classes; drawing {positive} against {}", d.classes().len(), c.data.super_name);
        binarize(&d, &BinarizationSpec::new(positive, c.data.super_name.clone())).at("--class1")?
    } else {
        d
    };
    let fitted = match mode {
        ViewMode::Glcl => Some(c.model.fit(&d, c.data.seed)?),
        _ => None,
    };
    let scene = view_scene(&d, fitted.as_ref(), mode, order, None).at("--order")?;
    write_scene(&scene, c.output.as_ref(), c.scene.as_ref(), (c.view.width, c.view.height))
}

#[derive(Args)]
struct NlCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Use these support vectors (CSV with an alpha column) instead of training an SVM.
    #[arg(long)]
    support_vectors: Option<PathBuf>,
    /// Write the fit document as JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Draw the expanded-space GLC-L view.
    #[arg(long)]
    svg: Option<PathBuf>,
}

fn run_nl(c: NlCmd) -> Outcome {
    let d = c.data.load()?;
    let spec = c.model.spec(c.data.seed, true)?;
    let f = match &c.support_vectors {
        None => fit(&d, &spec).at("fit")?,
        Some(path) => {
            require_binary(&d).at("fit")?;
            let file = path.display().to_string();
            let bytes = read(path)?;
            let mut kernel = KernelConfig::new(spec.kernel.unwrap_or(KernelKind::Rbf));
            kernel.gamma = spec.gamma;
            if let Some(deg) = spec.degree {
                kernel.degree = deg;
            }
            let svs = load_support_vectors(&bytes[..], kernel).at(&file)?;
            let roles = match &spec.class1 {
                Some(c) => ClassRoles::with_class1(&d, c).at("--class1")?,
                None => ClassRoles::from_dataset(&d).at("fit")?,
            };
            let nl = glc_nl_from_support_vectors(&d, &roles, svs, spec.coefficients).at(&file)?;
            FittedModel {
                model: nl.model.clone(),
                nl: Some(nl),
            }
        }
    };
    let f = c.model.edit(f)?;
    print_model(&f, &d)?;
    if let Some(p) = &c.output {
        write_out(p, &json(&f.document(&d).at("evaluate")?)?)?;
    }
    if let Some(p) = &c.svg {
        let scene = view_scene(&d, Some(&f), ViewMode::Glcl, None, None).at("view")?;
        write_out(p, &render_svg(&scene, glc_service::DEFAULT_SVG_SIZE.0, glc_service::DEFAULT_SVG_SIZE.1))?;
    }
    Ok(())
}

#[derive(Args)]
struct RulesCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// case, ihyper, mhyper, imhyper or hbrl.
    #[arg(long, conflicts_with = "rects")]
    algo: Option<String>,
    /// Interactive rule from a GLC-L selection rectangle x0,y0,x1,y1 (repeatable).
    #[arg(long = "rect", value_name = "X0,Y0,X1,Y1", allow_hyphen_values = true)]
    rects: Vec<String>,
    #[arg(long, default_value_t = 1.0)]
    purity: f64,
    #[arg(long, default_value_t = 0.0)]
    impurity: f64,
    /// Point index (0-based) for case.
    #[arg(long)]
    index: Option<usize>,
    /// Write the rules document as JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn print_rules(blocks: &[Hyperblock], d: &Dataset) {
    for (i, a) in hb_analytics(blocks, d).iter().enumerate() {
        println!("HB{} {}", i + 1, a.summary());
    }
}

fn run_rules(c: RulesCmd) -> Outcome {
    let d = c.data.load()?;
    if !(0.0..=1.0).contains(&c.purity) {
        return Err(usage(format!("--purity must be in [0, 1], got {}", c.purity)));
    }
    if !(0.0..=1.0).contains(&c.impurity) {
        return Err(usage(format!("--impurity must be in [0, 1], got {}", c.impurity)));
    }
    let (doc, blocks, space) = if !c.rects.is_empty() {
        let f = c.model.fit(&d, c.data.seed)?;
        let space = f.space(&d).clone();
        let mut blocks = Vec::new();
        for r in &c.rects {
            let rect: Rect = r.parse().at("--rect")?;
            blocks.push(rule_from_selection(&space, &f.model, rect).at(&format!("--rect {r}"))?.0);
        }
        (RulesDocument::new(glc_service::IRL_TAG, &space, &blocks), blocks, space)
    } else {
        let algo: Induction = c
            .algo
            .as_deref()
            .ok_or_else(|| usage("give --algo or at least one --rect"))?
            .parse()
            .at("--algo")?;
        if algo == Induction::Case && c.index.is_none() {
            return Err(usage("--algo case needs --index"));
        }
        let spec = BlockSpec {
            algo,
            purity: c.purity,
            impurity: c.impurity,
            index: c.index,
        };
        let (space, model) = match algo {
            Induction::Case | Induction::Hbrl => {
                let f = c.model.fit(&d, c.data.seed)?;
                (f.space(&d).clone(), Some(f.model))
            }
            _ => (d, None),
        };
        let what = if algo == Induction::Case { "--index" } else { "--algo" };
        let blocks = induce(&space, model.as_ref(), &spec).at(what)?;
        (RulesDocument::new(algo.tag(), &space, &blocks), blocks, space)
    };
    match &c.output {
        Some(p) => {
            print_rules(&blocks, &space);
            write_out(p, &json(&doc)?)
        }
        None => emit(None, &json(&doc)?),
    }
}

#[derive(Args)]
struct WorstCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Widest split allowed, as a fraction of the projection range.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: f64,
    /// Use these point indices (0-based, comma-separated) as the split.
    #[arg(long, value_delimiter = ',')]
    indices: Option<Vec<usize>>,
    /// Also score these classifiers on the split (e.g. all or lda,knn:5,gnb).
    #[arg(long)]
    compare: Option<String>,
    /// Also score outside predictions (point_index,predicted_label) on the split.
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Row name for --predictions.
    #[arg(long, default_value = "external", requires = "predictions")]
    name: String,
    /// Write the report as JSON.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(serde::Serialize)]
struct WorstCaseOutput {
    #[serde(flatten)]
    doc: WorstCaseDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    comparison: Option<SplitComparison>,
}

fn fmt_acc(a: Option<f64>) -> String {
    a.map_or_else(|| "n/a".into(), |v| format!("{v:.4}"))
}

fn run_worstcase(c: WorstCmd) -> Outcome {
    let d = c.data.load()?;
    let f = c.model.fit(&d, c.data.seed)?;
    let space = f.space(&d);
    let split = match &c.indices {
        Some(ix) => manual_split(space, &f.model, ix).at("--indices")?,
        None => wcl_split(space, &f.model, c.cap).at("--cap")?,
    };
    let report = worst_case_report(space, &f.model, &split).at("worst case")?;
    let mut comparison = match &c.compare {
        Some(s) => {
            let specs = parse_models(s).at("--compare")?;
            Some(compare_on_split(&split, space, &specs, c.data.seed).at("--compare")?)
        }
        None => None,
    };
    if let Some(p) = &c.predictions {
        let preds = load_predictions(p)?;
        let file = p.display().to_string();
        let accuracy = external_split_accuracy(&split, space, &preds).at(&file)?;
        let cmp = comparison.get_or_insert_with(|| SplitComparison {
            rows: Vec::new(),
            average: 0.0,
        });
        cmp.rows.push(SplitComparisonRow {
            model: c.name.clone(),
            accuracy,
        });
        let vals: Vec<f64> = cmp.rows.iter().filter_map(|r| r.accuracy).collect();
        cmp.average = mean_std(&vals).0;
    }
    let out = WorstCaseOutput {
        doc: WorstCaseDocument { split, report },
        comparison,
    };
    let s = &out.doc.split;
    println!(
        "split [{:.6}, {:.6}]: {} points{}",
        s.lower,
        s.upper,
        s.member_indices.len(),
        if s.capped { " (capped)" } else { "" }
    );
    let r = &out.doc.report;
    println!("all data        {}", fmt_acc(r.all_data.accuracy));
    for (name, sub) in [
        ("without overlap", &r.without_overlap),
        ("overlap only   ", &r.overlap_only),
        ("worst case     ", &r.worst_case),
    ] {
        if let Some(sub) = sub {
            println!("{name} {}  data used {:.4}", fmt_acc(sub.accuracy), sub.data_used);
        }
    }
    if let Some(cmp) = &out.comparison {
        for row in &cmp.rows {
            println!("{:<15} {}", row.model, fmt_acc(row.accuracy));
        }
        println!("{:<15} {:.4}", "average", cmp.average);
    }
    if let Some(p) = &c.output {
        write_out(p, &json(&out)?)?;
    }
    Ok(())
}

#[derive(Args)]
struct CvCmd {
    #[command(flatten)]
    data: DataArgs,
    /// all, or a comma-separated list such as lda,knn:5,gnb.
    #[arg(long, default_value = "all")]
    model: String,
    #[arg(short, long, default_value_t = 10)]
    k: usize,
    #[arg(long)]
    no_stratify: bool,
    /// Add a row from outside predictions (point_index,predicted_label[,fold]).
    #[arg(long)]
    predictions: Option<PathBuf>,
    /// Row name for --predictions.
    #[arg(long, default_value = "external", requires = "predictions")]
    name: String,
    /// Write the table as CSV.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the table as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn load_predictions(p: &Path) -> Outcome<Vec<ExternalPrediction>> {
    let file = p.display().to_string();
    let bytes = read(p)?;
    load_external_predictions(&bytes[..]).at(&file)
}

fn run_cv(c: CvCmd) -> Outcome {
    let d = c.data.load()?;
    let specs = parse_models(&c.model).at("--model")?;
    let plan = FoldPlan::new(&d, c.k, c.data.seed, !c.no_stratify).at("--k")?;
    let mut table = CvTable::run(&d, &specs, &plan).at("cross-validation")?;
    if let Some(p) = &c.predictions {
        let file = p.display().to_string();
        let preds = load_predictions(p)?;
        let row = external_cv_result(&c.name, &d, &plan, &preds).at(&file)?;
        let mut rows = table.rows.clone();
        rows.push(row);
        table = CvTable::new(c.k, rows).at(&file)?;
    }
    for r in &table.rows {
        println!("{:<15} {:.2}% ± {:.2}", r.model, 100.0 * r.mean, 100.0 * r.std);
        for w in &r.warnings {
            eprintln!("warning: {}: {w}", r.model);
        }
    }
    if let Some(p) = &c.output {
        write_out(p, &table.to_csv())?;
    }
    if let Some(p) = &c.json {
        write_out(p, &json(&table)?)?;
    }
    Ok(())
}

#[derive(Args)]
struct SeparateCmd {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Rules document holding the first block.
    rules_a: PathBuf,
    /// Rules document holding the second block.
    rules_b: PathBuf,
    /// Block number (1-based) in the first file.
    #[arg(long, default_value_t = 1)]
    block_a: usize,
    /// Block number (1-based) in the second file.
    #[arg(long, default_value_t = 1)]
    block_b: usize,
    /// SVG output file.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Write the transform and scene as JSON.
    #[arg(long)]
    scene: Option<PathBuf>,
}

fn load_block(path: &Path, n: usize, flag: &str, d: &Dataset) -> Outcome<Hyperblock> {
    let file = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("{file}: {e}"),
    })?;
    let doc: RulesDocument = serde_json::from_str(&text)
        .map_err(GlcError::from)
        .at(&file)?;
    let blocks = doc.blocks(d).at(&file)?;
    if n == 0 || n > blocks.len() {
        return Err(usage(format!("{flag}: {file} has {} blocks, asked for {n}", blocks.len())));
    }
    Ok(blocks[n - 1].clone())
}

fn run_separate(c: SeparateCmd) -> Outcome {
    let d = c.data.load()?;
    let f = c.model.fit(&d, c.data.seed)?;
    let space = f.space(&d);
    let a = load_block(&c.rules_a, c.block_a, "--block-a", space)?;
    let b = load_block(&c.rules_b, c.block_b, "--block-b", space)?;
    let (transform, scene) = separate_hyperblocks(&a, &b, &f.model, space).at("separate")?;
    println!(
        "separating attributes {:?}, scaling {:.6}, HB1 = block {}",
        transform.separating_attributes.iter().map(|i| i + 1).collect::<Vec<_>>(),
        transform.scaling_value,
        if transform.hb1_id == 0 { "a" } else { "b" }
    );
    if let Some(p) = &c.scene {
        write_out(p, &json(&SeparationDocument { transform, scene: scene.clone() })?)?;
    }
    if let Some(p) = &c.output {
        let (w, h) = glc_service::DEFAULT_SVG_SIZE;
        write_out(p, &render_svg(&scene, w, h))?;
    }
    Ok(())
}

#[derive(Args)]
struct ServeCmd {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
}

fn run_serve(c: ServeCmd) -> Outcome {
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure {
        code: 2,
        message: format!("runtime: {e}"),
    })?;
    eprintln!("listening on http://{}", c.addr);
    rt.block_on(glc_service::serve(c.addr)).map_err(|e| Failure {
        code: 2,
        message: format!("--addr {}: {e}", c.addr),
    })
}

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Fit(c) => run_fit(c),
        Command::Viz(c) => run_viz(c),
        Command::Nl(c) => run_nl(c),
        Command::Rules(c) => run_rules(c),
        Command::Worstcase(c) => run_worstcase(c),
        Command::Cv(c) => run_cv(c),
        Command::Separate(c) => run_separate(c),
        Command::Serve(c) => run_serve(c),
    }
}
