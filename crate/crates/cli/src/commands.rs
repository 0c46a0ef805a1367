use std::io::BufReader;
use std::path::{Path, PathBuf};

use rbc_core::bounds::{rays_2d, rays_nd, rays_qd, QDGeometry, RayBudget};
use rbc_core::classify::{evaluate, nearest_centroid, stratified_split, train, EvalReport, MLPModel, TrainConfig};
use rbc_core::classify::repeat_runs;
use rbc_core::fingerprint::{
    dense_direction_set, fingerprint, hit_report, reconstruct_2d, verify_theorem1_with, verify_theorem2_with,
    Fingerprint, PlanarCheckConfig, ShapeFamily, SpatialCheckConfig,
};
use rbc_core::geometry::{PolytopeFile, Vector};
use rbc_core::metrics::{class_membership, polytope_metrics, theta_min, AngleBound, ClassParams};
use rbc_core::qd::{gen_dataset, verify_qd, Dataset, DatasetConfig, LabelSet};
use rbc_core::rng::derive_seed;
use rbc_core::sphere::{place_greedy_with, place_uniform_circle, DirectionSet, GreedyConfig, HoleSeekingOracle, UniformOracle};
use rbc_core::ConvexPolytope;
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;

pub struct Context {
    pub degrees: bool,
    pub rec: Recorder,
}

impl Context {
    fn angle(&self, v: f64) -> f64 {
        if self.degrees {
            v.to_radians()
        } else {
            v
        }
    }

    /// Writes `text` to `out` (recorded as an output) or to stdout.
    fn emit(&mut self, out: Option<&Path>, text: &str) -> CliResult<()> {
        match out {
            Some(path) => {
                write_file(path, text)?;
                self.rec.output(path);
            }
            None => println!("{text}"),
        }
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, out: Option<&Path>, value: &T) -> CliResult<()> {
        let text = to_line(value)?;
        self.emit(out, &text)
    }

    fn read(&mut self, path: &Path) -> CliResult<String> {
        self.rec.input(path);
        std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
    }

    fn polytope(&mut self, path: &Path) -> CliResult<ConvexPolytope> {
        let text = self.read(path)?;
        ConvexPolytope::from_json(&text).map_err(|e| with_path(path, e))
    }

    fn directions(&mut self, path: &Path) -> CliResult<DirectionSet> {
        let text = self.read(path)?;
        DirectionSet::from_json(&text).map_err(|e| with_path(path, e))
    }

    fn dataset(&mut self, path: &Path) -> CliResult<Dataset> {
        self.rec.input(path);
        let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        Dataset::read_jsonl(BufReader::new(file)).map_err(|e| with_path(path, e))
    }
}

fn with_path(path: &Path, e: rbc_core::Error) -> CliError {
    match e {
        rbc_core::Error::Format(m) => CliError::Format(format!("{}: {m}", path.display())),
        other => CliError::Core(other),
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    std::fs::write(path, body).map_err(|e| CliError::io(path, e))
}

fn to_line<T: Serialize>(value: &T) -> CliResult<String> {
    serde_json::to_string(value).map_err(|e| CliError::Format(e.to_string()))
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn angle_bound(a: AngleBoundArg) -> AngleBound {
    match a {
        AngleBoundArg::AtMost => AngleBound::AtMost,
        AngleBoundArg::AtLeast => AngleBound::AtLeast,
    }
}

fn class_params(ctx: &Context, dim: usize, class: &ClassArgs) -> CliResult<ClassParams> {
    Ok(ClassParams::new(dim, class.d, class.l, ctx.angle(class.alpha))?.with_angle_bound(angle_bound(class.angle_bound)))
}

#[derive(Serialize)]
struct BudgetRecord {
    #[serde(flatten)]
    params: ClassParams,
    #[serde(rename = "M")]
    m: u64,
    #[serde(flatten)]
    budget: RayBudget,
    /// Density radius for greedy placement.
    greedy_phi: f64,
}

#[derive(Serialize)]
struct QdBudgetRecord {
    a: f64,
    w: f64,
    ratio: f64,
    aperture_detectable: bool,
    #[serde(rename = "M")]
    m: u64,
    #[serde(flatten)]
    budget: RayBudget,
}

pub fn bounds(ctx: &mut Context, args: &BoundsArgs) -> CliResult<()> {
    if args.qd {
        let w = positive("w", args.w)?;
        let ratios: Vec<f64> = match (args.sweep, args.a) {
            (Some(max), _) => {
                let step = positive("step", args.step)?;
                let n = (max / step + 1e-9).floor() as usize;
                (0..=n).map(|k| (k as f64 * step * 1e12).round() / 1e12).collect()
            }
            (None, Some(a)) => vec![a / w],
            (None, None) => return Err(CliError::Usage("--qd needs --a or --sweep".into())),
        };
        let mut lines = Vec::new();
        for r in ratios {
            let a = if args.sweep.is_some() { r * w } else { args.a.expect("checked") };
            let budget = rays_qd(&QDGeometry::new(a, w)?, args.aperture_detectable)?;
            lines.push(to_line(&QdBudgetRecord {
                a,
                w,
                ratio: a / w,
                aperture_detectable: args.aperture_detectable,
                m: budget.m,
                budget,
            })?);
        }
        return ctx.emit(args.out.as_deref(), &lines.join("\n"));
    }
    let class = ClassArgs {
        d: args.d.expect("required"),
        l: args.l.expect("required"),
        alpha: args.alpha.expect("required"),
        angle_bound: args.angle_bound,
    };
    let params = class_params(ctx, args.dim.expect("required"), &class)?;
    let budget = if params.dim == 2 { rays_2d(&params)? } else { rays_nd(&params)? };
    let record = BudgetRecord {
        params,
        m: budget.m,
        budget,
        greedy_phi: theta_min(&params)? / 6.0,
    };
    ctx.emit_json(args.out.as_deref(), &record)
}

pub fn place(ctx: &mut Context, args: &PlaceArgs) -> CliResult<()> {
    ctx.rec.seed(args.seed);
    let set = match (args.count, args.phi) {
        (Some(m), _) => {
            if args.dim != 2 {
                return Err(CliError::Usage("--count places evenly spaced rays in the plane; use --dim 2".into()));
            }
            let mut set = place_uniform_circle(m, ctx.angle(args.offset))?;
            set.seed = Some(args.seed);
            set
        }
        (None, Some(phi)) => {
            let phi = ctx.angle(phi);
            let config = GreedyConfig {
                probes: args.probes,
                ..GreedyConfig::default()
            };
            let oracle_seed = derive_seed(args.seed, u64::MAX);
            match args.oracle {
                OracleArg::Uniform => {
                    place_greedy_with(args.dim, phi, args.seed, &mut UniformOracle::new(args.dim, oracle_seed), &config)?
                }
                OracleArg::HoleSeeking => place_greedy_with(
                    args.dim,
                    phi,
                    args.seed,
                    &mut HoleSeekingOracle::new(args.dim, oracle_seed),
                    &config,
                )?,
            }
        }
        (None, None) => return Err(CliError::Usage("place needs --phi or --count".into())),
    };
    let text = set.to_json()?;
    ctx.emit(args.out.as_deref(), &text)
}

pub fn metrics(ctx: &mut Context, args: &MetricsArgs) -> CliResult<()> {
    let p = ctx.polytope(&args.polytope)?;
    match (args.d, args.l, args.alpha) {
        (Some(d), Some(l), Some(alpha)) => {
            let class = ClassArgs {
                d,
                l,
                alpha,
                angle_bound: args.angle_bound,
            };
            let params = class_params(ctx, p.dim(), &class)?;
            let report = class_membership(&p, &params)?;
            ctx.emit_json(args.out.as_deref(), &report)
        }
        _ => {
            let m = polytope_metrics(&p)?;
            ctx.emit_json(args.out.as_deref(), &m)
        }
    }
}

pub fn fingerprint_cmd(ctx: &mut Context, args: &FingerprintArgs) -> CliResult<()> {
    let p = ctx.polytope(&args.polytope)?;
    let dirs = ctx.directions(&args.directions)?;
    let x_o = Vector::from_column_slice(&args.x_o);
    let f = fingerprint(&p, &x_o, &dirs, positive("cutoff", args.cutoff)?)?;
    let dir_ref: Option<PathBuf> = if args.ref_directions {
        Some(std::fs::canonicalize(&args.directions).map_err(|e| CliError::io(&args.directions, e))?)
    } else {
        None
    };
    let text = f.to_json(dir_ref.as_deref())?;
    ctx.emit(args.out.as_deref(), &text)?;
    if let Some(threshold) = args.hits {
        println!("{}", to_line(&json!({ "hits": hit_report(&f, &p, threshold)? }))?);
    }
    Ok(())
}

#[derive(Serialize)]
struct ReconstructionRecord {
    ambiguity: rbc_core::fingerprint::Ambiguity,
    vertices: Vec<[f64; 2]>,
    run_lengths: Vec<usize>,
    polytope: PolytopeFile,
}

pub fn reconstruct(ctx: &mut Context, args: &ReconstructArgs) -> CliResult<()> {
    let text = ctx.read(&args.fingerprint)?;
    let base = args.fingerprint.parent();
    let f = Fingerprint::from_json(&text, base).map_err(|e| with_path(&args.fingerprint, e))?;
    let r = reconstruct_2d(&f)?;
    let record = ReconstructionRecord {
        ambiguity: r.ambiguity,
        vertices: r.vertices.iter().map(|v| [v[0], v[1]]).collect(),
        run_lengths: r.run_lengths.clone(),
        polytope: PolytopeFile::from(&r.to_polytope()?),
    };
    ctx.emit_json(args.out.as_deref(), &record)
}

pub fn verify(ctx: &mut Context, args: &VerifyArgs) -> CliResult<()> {
    match &args.check {
        VerifyCommand::Thm1(a) => {
            ctx.rec.seed(a.seed);
            let params = class_params(ctx, 2, &a.class)?;
            let config = PlanarCheckConfig {
                points_per_polygon: a.points,
                rays: a.rays,
                ..PlanarCheckConfig::default()
            };
            let report = verify_theorem1_with(a.trials, &params, a.seed, &config)?;
            let passed = report.passed();
            ctx.emit_json(a.out.as_deref(), &json!({ "check": "thm1", "passed": passed, "report": report }))
        }
        VerifyCommand::Thm2(a) => {
            ctx.rec.seed(a.seed);
            let params = class_params(ctx, a.dim, &a.class)?;
            let dirs = match &a.directions {
                Some(path) => ctx.directions(path)?,
                None => dense_direction_set(&params, a.seed)?,
            };
            let config = SpatialCheckConfig {
                families: a
                    .families
                    .iter()
                    .map(|f| match f {
                        FamilyArg::Cube => ShapeFamily::Cube,
                        FamilyArg::Prism => ShapeFamily::Prism,
                        FamilyArg::Simplex => ShapeFamily::Simplex,
                    })
                    .collect(),
                ..SpatialCheckConfig::default()
            };
            let report = verify_theorem2_with(a.trials, &params, a.seed, &dirs, &config)?;
            let passed = report.passed();
            ctx.emit_json(a.out.as_deref(), &json!({ "check": "thm2", "passed": passed, "report": report }))
        }
        VerifyCommand::Qd(a) => {
            ctx.rec.seed(a.seed);
            let report = verify_qd(a.trials, a.seed)?;
            let passed = report.hexagon_violations == 0 && report.strip_violations == 0;
            ctx.emit_json(a.out.as_deref(), &json!({ "check": "qd", "passed": passed, "report": report }))
        }
    }
}

pub fn gen_qd(ctx: &mut Context, args: &GenQdArgs) -> CliResult<()> {
    ctx.rec.seed(args.seed);
    let labels = match args.labels {
        LabelsArg::Five => LabelSet::Five,
        LabelsArg::HexagonVsStrip => LabelSet::HexagonVsStrip,
    };
    let config = DatasetConfig::new(args.n_per_class, args.m, args.cutoff, args.noise, args.aperture_detectable, args.seed)
        .with_labels(labels);
    let data = gen_dataset(&config)?;
    save_dataset(ctx, &data, &args.out)
}

fn save_dataset(ctx: &mut Context, data: &Dataset, path: &Path) -> CliResult<()> {
    let mut buf = Vec::new();
    data.write_jsonl(&mut buf)?;
    std::fs::write(path, buf).map_err(|e| CliError::io(path, e))?;
    ctx.rec.output(path);
    Ok(())
}

fn train_config(o: &TrainOptions, seed: u64) -> CliResult<TrainConfig> {
    let cfg = TrainConfig {
        epochs: o.epochs,
        batch_size: o.batch_size,
        learning_rate: o.learning_rate,
        momentum: o.momentum,
        seed,
        train_fraction: o.train_fraction,
        hidden: o.hidden.clone(),
        ..TrainConfig::default()
    };
    cfg.check().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

pub fn train_cmd(ctx: &mut Context, args: &TrainArgs) -> CliResult<()> {
    ctx.rec.seed(args.seed);
    let data = ctx.dataset(&args.data)?;
    let cfg = train_config(&args.options, args.seed)?;
    if args.repeat == 0 {
        return Err(CliError::Usage("--repeat must be at least 1".into()));
    }
    if args.repeat > 1 {
        let report = repeat_runs(args.repeat, &data, &cfg)?;
        let record = json!({
            "runs": args.repeat,
            "mlp": report.mlp,
            "centroid": report.centroid,
            "mlp_always_beats_centroid": report.mlp_always_beats_centroid(),
            "per_run": report.runs,
        });
        return ctx.emit_json(args.out.as_deref(), &record);
    }
    // the same seed streams as run 0 of a repeated experiment
    let run_seed = derive_seed(args.seed, 0);
    let (train_set, test_set) = stratified_split(&data.samples, cfg.train_fraction, derive_seed(run_seed, 0))?;
    let run_cfg = cfg.clone().with_seed(derive_seed(run_seed, 1));
    let classes = data.num_classes();
    let outcome = train(&train_set, classes, &run_cfg)?;
    for (epoch, loss) in outcome.loss_trace.iter().enumerate() {
        println!("{}", to_line(&json!({ "epoch": epoch, "loss": loss }))?);
    }
    let names = &data.header.classes;
    let mlp = evaluate(&outcome.model, &test_set, Some(names))?;
    let centroid = nearest_centroid(&train_set, &test_set, classes, Some(names))?;
    if let Some(path) = &args.model {
        write_file(path, &outcome.model.to_json()?)?;
        ctx.rec.output(path);
    }
    if let Some(path) = &args.test_out {
        let held_out = Dataset {
            header: data.header.clone(),
            samples: test_set.clone(),
        };
        save_dataset(ctx, &held_out, path)?;
    }
    let record = json!({
        "split": "test",
        "train_samples": train_set.len(),
        "test_samples": test_set.len(),
        "mlp": mlp,
        "centroid": centroid,
    });
    ctx.emit_json(args.out.as_deref(), &record)
}

pub fn eval(ctx: &mut Context, args: &EvalArgs) -> CliResult<()> {
    let text = ctx.read(&args.model)?;
    let model = MLPModel::from_json(&text).map_err(|e| with_path(&args.model, e))?;
    let data = ctx.dataset(&args.data)?;
    if model.inputs() != data.header.m || model.classes() != data.num_classes() {
        return Err(CliError::Format(format!(
            "model takes {} features and {} classes, dataset has {} and {}",
            model.inputs(),
            model.classes(),
            data.header.m,
            data.num_classes()
        )));
    }
    let report: EvalReport = evaluate(&model, &data.samples, Some(&data.header.classes))?;
    ctx.emit_json(args.out.as_deref(), &report)
}
