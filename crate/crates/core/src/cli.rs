//! Command-line front end. Every subcommand computes all of its records in
//! memory first and only then writes them, together with `run.json`, into
//! the output directory.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::dataset::{generate_synthetic_dataset, load_dataset, Dataset, SyntheticConfig};
use crate::hand::{Domain, FingerId, GraspType};
use crate::plot;
use crate::synergy::{
    correlation_extrema, cross_domain_correlations, elbow_select, feature_matrix, force_mass_fit,
    grasp_type_correlations, pca_fit_with, radar_area, radar_profiles, tsne_embed, CorrelationMatrix,
    CorrelationWindow, ForceMassModel, PcaOptions, TsneConfig,
};
use crate::trial::{analyze_dataset, validate_trial_with, AnalyzedTrial, SegmentationConfig, TrialWarning};

pub const ERROR_FILE: &str = "error.json";
pub const RUN_FILE: &str = "run.json";

#[derive(Debug, Parser)]
#[command(name = "grasp-synergy", version, about = "Grasp synergy analysis of glove recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a seeded synthetic dataset
    Simulate(SimulateArgs),
    /// Check every trial of a dataset
    Validate(SegArgs),
    /// Phase boundaries per trial
    Segment(SegArgs),
    /// Hold-phase feature table
    Features(SegArgs),
    /// Per-grasp-type finger correlations and their extrema
    Correlate(CorrelateArgs),
    /// Mean hold profiles, pentagon areas and radar charts
    Radar(SegArgs),
    /// Hold force against object mass
    Forcemass(SegArgs),
    /// Principal components of hold features
    Pca(PcaArgs),
    /// Two-dimensional t-SNE embedding of hold features
    Tsne(TsneArgs),
    /// Every analysis into one directory
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    Force,
    Posture,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Force => Domain::Force,
            DomainArg::Posture => Domain::Posture,
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    seed: u64,
    /// Dataset directory to create
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    subjects: usize,
    #[arg(long, default_value_t = 1)]
    trials_per_object: u32,
}

#[derive(Debug, Args)]
struct SegArgs {
    /// Dataset directory or manifest file
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Contact threshold, N
    #[arg(long)]
    f_on: Option<f64>,
    /// Hold stability threshold, N
    #[arg(long)]
    hold_std: Option<f64>,
}

#[derive(Debug, Args)]
struct CorrelateArgs {
    #[command(flatten)]
    seg: SegArgs,
    /// Restrict to one domain; both when absent
    #[arg(long, value_enum)]
    domain: Option<DomainArg>,
    /// Correlate hold-phase samples only
    #[arg(long)]
    hold_only: bool,
    /// Also correlate force channels against posture channels
    #[arg(long)]
    cross_domain: bool,
}

#[derive(Debug, Args)]
struct PcaArgs {
    #[command(flatten)]
    seg: SegArgs,
    #[arg(long, value_enum)]
    domain: Option<DomainArg>,
    /// Standardize features before fitting
    #[arg(long)]
    zscore: bool,
    /// Use the fifteen joint angles instead of five combined flexions
    #[arg(long)]
    decomposed: bool,
}

#[derive(Debug, Args)]
struct TsneArgs {
    #[command(flatten)]
    seg: SegArgs,
    #[arg(long, value_enum)]
    domain: Option<DomainArg>,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 30.0)]
    perplexity: f64,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long)]
    decomposed: bool,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    seg: SegArgs,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 30.0)]
    perplexity: f64,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long)]
    zscore: bool,
    #[arg(long)]
    decomposed: bool,
    #[arg(long)]
    hold_only: bool,
    #[arg(long)]
    cross_domain: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Validate(_) => "validate",
            Command::Segment(_) => "segment",
            Command::Features(_) => "features",
            Command::Correlate(_) => "correlate",
            Command::Radar(_) => "radar",
            Command::Forcemass(_) => "forcemass",
            Command::Pca(_) => "pca",
            Command::Tsne(_) => "tsne",
            Command::Report(_) => "report",
        }
    }

    fn out_dir(&self) -> PathBuf {
        let explicit = match self {
            Command::Simulate(a) => a.out.clone(),
            Command::Validate(a) | Command::Segment(a) | Command::Features(a) | Command::Radar(a) | Command::Forcemass(a) => {
                a.out.clone()
            }
            Command::Correlate(a) => a.seg.out.clone(),
            Command::Pca(a) => a.seg.out.clone(),
            Command::Tsne(a) => a.seg.out.clone(),
            Command::Report(a) => a.seg.out.clone(),
        };
        explicit.unwrap_or_else(|| Path::new("results").join(self.name()))
    }
}

/// Failure of a subcommand after argument parsing.
#[derive(Debug, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    fn new(kind: &'static str, e: impl std::fmt::Display) -> Self {
        CliError {
            kind,
            message: e.to_string(),
        }
    }
}

/// Records of one run, keyed by file name.
#[derive(Default)]
struct Outputs {
    files: BTreeMap<String, Vec<u8>>,
    warnings: Vec<String>,
    summary: serde_json::Map<String, Value>,
}

impl Outputs {
    fn json(&mut self, name: &str, v: &impl Serialize) {
        let mut s = serde_json::to_string_pretty(v).expect("record serializes");
        s.push('\n');
        self.files.insert(name.to_string(), s.into_bytes());
    }

    fn text(&mut self, name: &str, s: String) {
        self.files.insert(name.to_string(), s.into_bytes());
    }

    fn write(&self, dir: &Path) -> Result<(), CliError> {
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, bytes).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))?;
        }
        Ok(())
    }
}

/// Parse `args` (program name first), run the subcommand and return the
/// process exit code: 0 success, 1 analysis failure, 2 usage error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let out = cli.command.out_dir();
    match execute(&cli.command, &out) {
        Ok(()) => {
            let _ = std::fs::remove_file(out.join(ERROR_FILE));
            0
        }
        Err(err) => {
            eprintln!("error: {}", err.message);
            let record = json!({ "subcommand": cli.command.name(), "kind": err.kind, "message": err.message });
            if std::fs::create_dir_all(&out).is_ok() {
                let mut s = serde_json::to_string_pretty(&record).expect("error record serializes");
                s.push('\n');
                let _ = std::fs::write(out.join(ERROR_FILE), s);
            }
            1
        }
    }
}

fn execute(cmd: &Command, out: &Path) -> Result<(), CliError> {
    let mut o = Outputs::default();
    let params = match cmd {
        Command::Simulate(a) => return simulate(a, out),
        Command::Validate(a) => {
            let (ds, cfg) = load(a)?;
            validate(&ds, &cfg, &mut o);
            seg_params(a, &cfg)
        }
        Command::Segment(a) => {
            let (ds, cfg) = load(a)?;
            let an = analyze(&ds, &cfg, &mut o);
            o.text("phases.csv", phases_csv(&ds, &an));
            seg_params(a, &cfg)
        }
        Command::Features(a) => {
            let (ds, cfg) = load(a)?;
            let an = analyze(&ds, &cfg, &mut o);
            o.text("features.csv", features_csv(&ds, &an));
            seg_params(a, &cfg)
        }
        Command::Correlate(a) => {
            let (ds, cfg) = load(&a.seg)?;
            let an = analyze(&ds, &cfg, &mut o);
            correlate(&ds, &an, domains(a.domain), a.hold_only, a.cross_domain, &mut o);
            let mut p = seg_params(&a.seg, &cfg);
            p["domain"] = json!(a.domain.map(|d| Domain::from(d).name()));
            p["hold_only"] = json!(a.hold_only);
            p["cross_domain"] = json!(a.cross_domain);
            p
        }
        Command::Radar(a) => {
            let (ds, cfg) = load(a)?;
            let an = analyze(&ds, &cfg, &mut o);
            radar(&ds, &an, &mut o)?;
            seg_params(a, &cfg)
        }
        Command::Forcemass(a) => {
            let (ds, cfg) = load(a)?;
            let an = analyze(&ds, &cfg, &mut o);
            forcemass(&ds, &an, &mut o);
            seg_params(a, &cfg)
        }
        Command::Pca(a) => {
            let (ds, cfg) = load(&a.seg)?;
            let an = analyze(&ds, &cfg, &mut o);
            let opts = PcaOptions { zscore: a.zscore };
            for d in domains(a.domain) {
                pca(&ds, &an, d, opts, a.decomposed, &mut o)?;
            }
            let mut p = seg_params(&a.seg, &cfg);
            p["domain"] = json!(a.domain.map(|d| Domain::from(d).name()));
            p["zscore"] = json!(a.zscore);
            p["decomposed"] = json!(a.decomposed);
            p
        }
        Command::Tsne(a) => {
            let (ds, cfg) = load(&a.seg)?;
            let an = analyze(&ds, &cfg, &mut o);
            let tc = tsne_config(a.seed, a.perplexity, a.iterations);
            for d in domains(a.domain) {
                tsne(&ds, &an, d, &tc, a.decomposed, &mut o)?;
            }
            let mut p = seg_params(&a.seg, &cfg);
            p["domain"] = json!(a.domain.map(|d| Domain::from(d).name()));
            p["seed"] = json!(a.seed);
            p["perplexity"] = json!(a.perplexity);
            p["iterations"] = json!(a.iterations);
            p["decomposed"] = json!(a.decomposed);
            p
        }
        Command::Report(a) => {
            let (ds, cfg) = load(&a.seg)?;
            validate(&ds, &cfg, &mut o);
            let an = analyze(&ds, &cfg, &mut o);
            o.text("phases.csv", phases_csv(&ds, &an));
            o.text("features.csv", features_csv(&ds, &an));
            correlate(&ds, &an, Domain::BOTH.to_vec(), a.hold_only, a.cross_domain, &mut o);
            radar(&ds, &an, &mut o)?;
            forcemass(&ds, &an, &mut o);
            let tc = tsne_config(a.seed, a.perplexity, a.iterations);
            for d in Domain::BOTH {
                pca(&ds, &an, d, PcaOptions { zscore: a.zscore }, a.decomposed, &mut o)?;
                tsne(&ds, &an, d, &tc, a.decomposed, &mut o)?;
            }
            let mut p = seg_params(&a.seg, &cfg);
            p["seed"] = json!(a.seed);
            p["perplexity"] = json!(a.perplexity);
            p["iterations"] = json!(a.iterations);
            p["zscore"] = json!(a.zscore);
            p["decomposed"] = json!(a.decomposed);
            p["hold_only"] = json!(a.hold_only);
            p["cross_domain"] = json!(a.cross_domain);
            p
        }
    };
    let run = json!({
        "subcommand": cmd.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": params,
        "summary": o.summary,
        "outputs": o.files.keys().collect::<Vec<_>>(),
        "warnings": o.warnings,
    });
    std::fs::create_dir_all(out).map_err(|e| CliError::new("io", format!("{}: {e}", out.display())))?;
    o.json(RUN_FILE, &run);
    o.write(out)
}

fn domains(d: Option<DomainArg>) -> Vec<Domain> {
    match d {
        Some(d) => vec![d.into()],
        None => Domain::BOTH.to_vec(),
    }
}

fn simulate(a: &SimulateArgs, out: &Path) -> Result<(), CliError> {
    let mut cfg = SyntheticConfig::with_seed(a.seed);
    cfg.subjects = a.subjects;
    cfg.trials_per_object = a.trials_per_object;
    let manifest = generate_synthetic_dataset(&cfg, out).map_err(|e| CliError::new("dataset", e))?;
    let run = json!({
        "subcommand": "simulate",
        "version": env!("CARGO_PKG_VERSION"),
        "parameters": { "seed": a.seed, "subjects": a.subjects, "trials_per_object": a.trials_per_object },
        "summary": { "trials": manifest.trials.len(), "subjects": manifest.subjects.len() },
    });
    let mut o = Outputs::default();
    o.json(RUN_FILE, &run);
    o.write(out)
}

fn load(a: &SegArgs) -> Result<(Dataset, SegmentationConfig), CliError> {
    let mut cfg = SegmentationConfig::default();
    if let Some(v) = a.f_on {
        cfg.f_on = v;
    }
    if let Some(v) = a.hold_std {
        cfg.hold_std = v;
    }
    cfg.check().map_err(|e| CliError::new("config", e))?;
    let ds = load_dataset(&a.dataset).map_err(|e| CliError::new("dataset", e))?;
    Ok((ds, cfg))
}

fn seg_params(a: &SegArgs, cfg: &SegmentationConfig) -> Value {
    json!({ "dataset": a.dataset.display().to_string(), "segmentation": cfg })
}

fn tsne_config(seed: u64, perplexity: f64, iterations: usize) -> TsneConfig {
    TsneConfig {
        seed,
        perplexity,
        iterations,
        ..TsneConfig::default()
    }
}

fn analyze(ds: &Dataset, cfg: &SegmentationConfig, o: &mut Outputs) -> Vec<AnalyzedTrial> {
    let (an, warnings) = analyze_dataset(ds, cfg);
    o.warnings
        .extend(warnings.iter().map(|TrialWarning { trial, message }| format!("{trial}: {message}")));
    o.summary.insert("trials".into(), json!(ds.len()));
    o.summary.insert("analyzed".into(), json!(an.len()));
    an
}

fn validate(ds: &Dataset, cfg: &SegmentationConfig, o: &mut Outputs) {
    let mut failed = 0;
    let records: Vec<Value> = ds
        .entries
        .iter()
        .map(|e| {
            let r = validate_trial_with(&e.trial, cfg.f_on);
            if !r.passed() {
                failed += 1;
            }
            json!({
                "trial": e.key.to_string(),
                "file": e.file.display().to_string(),
                "passed": r.passed(),
                "usable": r.usable(),
                "no_contact": r.no_contact,
                "violations": r.violations,
                "messages": r.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            })
        })
        .collect();
    o.summary.insert("trials".into(), json!(ds.len()));
    o.summary.insert("failed_validation".into(), json!(failed));
    o.json("validation.json", &records);
}

fn key_cells(ds: &Dataset, a: &AnalyzedTrial) -> String {
    let k = &ds.entries[a.index].key;
    format!("{},{},{},{}", k.subject_id, k.grasp_type.code(), csv_field(&k.object), k.trial_index)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn phases_csv(ds: &Dataset, an: &[AnalyzedTrial]) -> String {
    let mut s = String::from("subject,grasp_type,object,trial,source,approach_start,grasp_start,lift_start,hold_start,hold_end\n");
    for a in an {
        let p = &a.phases;
        let source = serde_json::to_value(a.source).expect("source serializes");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            key_cells(ds, a),
            source.as_str().unwrap_or_default(),
            p.approach_start,
            p.grasp_start,
            p.lift_start,
            p.hold_start,
            p.hold_end
        );
    }
    s
}

fn features_csv(ds: &Dataset, an: &[AnalyzedTrial]) -> String {
    let mut s = String::from("subject,grasp_type,object,trial");
    for f in FingerId::ALL {
        let _ = write!(s, ",force_{}", f.name());
    }
    for f in FingerId::ALL {
        let _ = write!(s, ",angle_{}", f.name());
    }
    s.push_str(",total_force\n");
    for a in an {
        s.push_str(&key_cells(ds, a));
        for v in a.features.mean_forces.iter().chain(&a.features.mean_angles) {
            let _ = write!(s, ",{v:.6}");
        }
        let _ = writeln!(s, ",{:.6}", a.features.total_force);
    }
    s
}

fn matrix_json(per_type: &BTreeMap<GraspType, CorrelationMatrix>) -> Value {
    let m: serde_json::Map<String, Value> = per_type
        .iter()
        .map(|(g, c)| (g.code().to_string(), serde_json::to_value(c).expect("matrix serializes")))
        .collect();
    Value::Object(m)
}

fn matrix_csv(per_type: &BTreeMap<GraspType, CorrelationMatrix>, row_prefix: &str, col_prefix: &str) -> String {
    let mut s = String::from("grasp_type,a,b,r\n");
    for (g, c) in per_type {
        for (i, fa) in FingerId::ALL.iter().enumerate() {
            for (j, fb) in FingerId::ALL.iter().enumerate() {
                let r = c.r[i][j].map(|v| format!("{v:.10}")).unwrap_or_default();
                let _ = writeln!(s, "{},{row_prefix}{},{col_prefix}{},{r}", g.code(), fa.name(), fb.name());
            }
        }
    }
    s
}

fn correlate(ds: &Dataset, an: &[AnalyzedTrial], domains: Vec<Domain>, hold_only: bool, cross: bool, o: &mut Outputs) {
    let window = if hold_only {
        CorrelationWindow::HoldOnly
    } else {
        CorrelationWindow::FullTrial
    };
    for d in domains {
        let per_type = grasp_type_correlations(ds, an, d, window);
        for (g, c) in &per_type {
            if c.undefined {
                o.warnings
                    .push(format!("{g}: {} correlation undefined for a constant channel", d.name()));
            }
        }
        let name = d.name();
        o.json(
            &format!("correlations_{name}.json"),
            &json!({ "domain": name, "window": window, "matrices": matrix_json(&per_type) }),
        );
        o.text(&format!("correlations_{name}.csv"), matrix_csv(&per_type, "", ""));
        o.json(&format!("extrema_{name}.json"), &correlation_extrema(d, &per_type));
    }
    if cross {
        let per_type = cross_domain_correlations(ds, an, window);
        o.json(
            "correlations_cross.json",
            &json!({ "rows": "force", "columns": "posture", "window": window, "matrices": matrix_json(&per_type) }),
        );
        o.text("correlations_cross.csv", matrix_csv(&per_type, "force_", "posture_"));
    }
}

fn radar(ds: &Dataset, an: &[AnalyzedTrial], o: &mut Outputs) -> Result<(), CliError> {
    let set = radar_profiles(ds, an);
    let mut areas = BTreeMap::new();
    for (g, p) in &set.force {
        areas.insert(g.code().to_string(), radar_area(p).map_err(|e| CliError::new("analysis", e))?);
    }
    o.warnings.extend(set.warnings.iter().cloned());
    let posture: Vec<_> = set.posture.values().collect();
    let force: Vec<_> = set.force.values().collect();
    o.text("radar_posture.svg", plot::radar_svg("Mean hold joint angles (deg)", &posture));
    o.text("radar_force.svg", plot::radar_svg("Mean hold fingertip forces (N)", &force));
    o.json(
        "radar.json",
        &json!({ "posture": posture, "force": force, "force_pentagon_area": areas }),
    );
    Ok(())
}

fn forcemass(ds: &Dataset, an: &[AnalyzedTrial], o: &mut Outputs) {
    let mut models: BTreeMap<GraspType, ForceMassModel> = BTreeMap::new();
    for g in ds.by_grasp_type().keys() {
        match force_mass_fit(ds, an, *g) {
            Ok(m) => {
                models.insert(*g, m);
            }
            Err(e) => o.warnings.push(format!("force-mass: {e}")),
        }
    }
    let mut csv = String::from("grasp_type,mass_g,force_n,trials,objects\n");
    for (g, m) in &models {
        for p in &m.samples {
            let _ = writeln!(
                csv,
                "{},{:.3},{:.6},{},{}",
                g.code(),
                p.mass_g,
                p.force_n,
                p.trials,
                csv_field(&p.objects.join(";"))
            );
        }
    }
    let list: Vec<_> = models.values().collect();
    o.json("forcemass.json", &list);
    o.text("forcemass.csv", csv);
    o.text("forcemass.svg", plot::force_mass_svg("Hold force against object mass", &models));
}

fn pca(ds: &Dataset, an: &[AnalyzedTrial], d: Domain, opts: PcaOptions, decomposed: bool, o: &mut Outputs) -> Result<(), CliError> {
    let fm = feature_matrix(ds, an, d, decomposed);
    let model = pca_fit_with(&fm.rows, opts).map_err(|e| CliError::new("analysis", format!("{} PCA: {e}", d.name())))?;
    let elbow = elbow_select(&model.explained);
    let name = d.name();
    let mut scores = String::from("subject,grasp_type,object,trial");
    for k in 1..=model.components.len() {
        let _ = write!(scores, ",pc{k}");
    }
    scores.push('\n');
    for (key, row) in fm.keys.iter().zip(&fm.rows) {
        let _ = write!(
            scores,
            "{},{},{},{}",
            key.subject_id,
            key.grasp_type.code(),
            csv_field(&key.object),
            key.trial_index
        );
        for v in model.project(row).map_err(|e| CliError::new("analysis", e))? {
            let _ = write!(scores, ",{v:.10}");
        }
        scores.push('\n');
    }
    o.json(
        &format!("pca_{name}.json"),
        &json!({
            "domain": name,
            "labels": fm.labels,
            "zscore": opts.zscore,
            "decomposed": decomposed && d == Domain::Posture,
            "samples": fm.rows.len(),
            "explained": model.explained,
            "cumulative": model.cumulative(),
            "elbow": elbow,
            "eigenvalues": model.eigenvalues,
            "components": model.components,
            "mean": model.mean,
            "scale": model.scale,
        }),
    );
    o.text(&format!("pca_{name}_scores.csv"), scores);
    o.text(
        &format!("scree_{name}.svg"),
        plot::scree_svg(&format!("Explained variance, {name}"), &model.explained, elbow),
    );
    Ok(())
}

fn tsne(ds: &Dataset, an: &[AnalyzedTrial], d: Domain, cfg: &TsneConfig, decomposed: bool, o: &mut Outputs) -> Result<(), CliError> {
    let fm = feature_matrix(ds, an, d, decomposed);
    let e = tsne_embed(&fm.rows, cfg).map_err(|e| CliError::new("analysis", format!("{} t-SNE: {e}", d.name())))?;
    let name = d.name();
    if e.perplexity < cfg.perplexity {
        o.warnings.push(format!(
            "{name} t-SNE: perplexity {} capped to {} for {} points",
            cfg.perplexity,
            e.perplexity,
            fm.rows.len()
        ));
    }
    let mut csv = String::from("subject,grasp_type,object,trial,x,y\n");
    for (key, p) in fm.keys.iter().zip(&e.points) {
        let _ = writeln!(
            csv,
            "{},{},{},{},{:.10},{:.10}",
            key.subject_id,
            key.grasp_type.code(),
            csv_field(&key.object),
            key.trial_index,
            p[0],
            p[1]
        );
    }
    let points: Vec<Value> = fm
        .keys
        .iter()
        .zip(&e.points)
        .map(|(k, p)| json!({ "trial": k.to_string(), "grasp_type": k.grasp_type, "x": p[0], "y": p[1] }))
        .collect();
    o.json(
        &format!("tsne_{name}.json"),
        &json!({
            "domain": name,
            "seed": e.seed,
            "perplexity_requested": cfg.perplexity,
            "perplexity": e.perplexity,
            "iterations": cfg.iterations,
            "final_kl": e.final_kl,
            "points": points,
        }),
    );
    o.text(&format!("tsne_{name}.csv"), csv);
    o.text(
        &format!("tsne_{name}.svg"),
        plot::scatter_svg(&format!("t-SNE of hold {name}"), &e.points, &fm.grasp_types),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["grasp-synergy", "frobnicate"]), 2);
        assert_eq!(run(["grasp-synergy", "pca", "--dataset", "x", "--bogus"]), 2);
        assert_eq!(run(["grasp-synergy", "tsne", "--dataset", "x"]), 2);
        assert_eq!(run(["grasp-synergy", "simulate"]), 2);
        assert_eq!(run(["grasp-synergy", "pca", "--dataset", "x", "--domain", "tendon"]), 2);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run(["grasp-synergy", "--help"]), 0);
    }

    #[test]
    fn default_out_dir_is_per_subcommand() {
        let cli = Cli::try_parse_from(["grasp-synergy", "radar", "--dataset", "d"]).unwrap();
        assert_eq!(cli.command.out_dir(), Path::new("results").join("radar"));
    }

    #[test]
    fn csv_fields_are_quoted_when_needed() {
        assert_eq!(csv_field("Apple"), "Apple");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }
}
