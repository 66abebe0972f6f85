use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use bifront::baseline::weighted_sum_frontier;
use bifront::frontier::{build_reference_report, PipelineConfig};
use bifront::generate::{anchor_solutions, generate, GenConfig};
use bifront::metrics::{aggregate, evaluate_prediction, normalize, MetricsReport, Summary};
use bifront::mppf::{fuse, CandidatePool, FusionConfig};
use bifront::prompt::{parse_solutions, serialize};
use bifront::solver::SolverConfig;
use bifront::Family;
use rayon::prelude::*;
use serde::Serialize;

use crate::plot::frontier_svg;
use crate::records::*;

fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.par_iter().map(f).collect()
}

/// `all` or a family name.
pub fn parse_families(s: &str) -> Result<Vec<Family>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Family::ALL.to_vec());
    }
    s.split(',')
        .map(|p| Family::parse(p.trim()).with_context(|| format!("unknown family {p:?}")))
        .collect()
}

/// `N` or an inclusive range `A..B`.
pub fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse::<usize>()?, b.trim().parse::<usize>()?),
        None => {
            let v = s.trim().parse::<usize>()?;
            (v, v)
        }
    };
    if lo == 0 || hi < lo {
        bail!("dimension range {s:?} must be positive and non-empty");
    }
    Ok((lo..=hi).collect())
}

pub struct GenerateArgs<'a> {
    pub families: Vec<Family>,
    pub dims: Vec<usize>,
    pub count: usize,
    pub seed: u64,
    pub out: &'a Path,
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<usize> {
    if a.count == 0 {
        bail!("count must be positive");
    }
    let mut jobs = Vec::new();
    for &family in &a.families {
        for &n in &a.dims {
            for i in 0..a.count {
                jobs.push((format!("{}-n{n}-{i:05}", family.name().to_lowercase()), GenConfig::batch(family, n, a.seed, i)));
            }
        }
    }
    let out = par_map(&jobs, |(id, cfg)| match generate(cfg) {
        Ok(instance) => Emit::Record(DatasetRecord {
            schema: DATASET_SCHEMA.into(),
            id: id.clone(),
            instance,
            anchors: None,
            reference: None,
            provenance: Provenance::new(cfg.clone(), None),
        }),
        Err(e) => Emit::Error(ErrorRecord::new(Some(id), None, e)),
    });
    write_lines(a.out, &out)
}

fn load_dataset(path: &Path) -> Result<Vec<Emit<(usize, DatasetRecord)>>> {
    parse_lines(path, Some(DATASET_SCHEMA))
}

pub fn cmd_solve(input: &Path, out: &Path, config: &PipelineConfig) -> Result<usize> {
    config.validate()?;
    let records = load_dataset(input)?;
    let solved = par_map(&records, |item| {
        let (line, rec) = match item {
            Emit::Record(r) => r,
            Emit::Error(e) => return Emit::Error(e.clone()),
        };
        let fail = |e: bifront::Error| Emit::Error(ErrorRecord::new(Some(&rec.id), Some(*line), e));
        let (a1, a2) = match anchor_solutions(&rec.instance) {
            Ok(a) => a,
            Err(e) => return fail(e),
        };
        let report = match build_reference_report(&rec.instance, &rec.id, config) {
            Ok(r) => r,
            Err(e) => return fail(e),
        };
        Emit::Record(DatasetRecord {
            anchors: Some([to_dec(&a1), to_dec(&a2)]),
            reference: Some(point_records(&report.frontier)),
            provenance: Provenance::new(rec.provenance.generator.clone(), Some(config.clone())),
            ..rec.clone()
        })
    });
    write_lines(out, &solved)
}

pub fn cmd_baseline(input: &Path, out: &Path, k: usize) -> Result<usize> {
    let records = load_dataset(input)?;
    let solver = SolverConfig::rounding_safe();
    let preds = par_map(&records, |item| match item {
        Emit::Record((line, rec)) => match weighted_sum_frontier(&rec.instance, k, &solver) {
            Ok(points) => {
                let xs: Vec<Vec<f64>> = points.into_iter().map(|p| p.x).collect();
                Emit::Record(PredictionRecord::from_vectors(&rec.id, &xs))
            }
            Err(e) => Emit::Error(ErrorRecord::new(Some(&rec.id), Some(*line), e)),
        },
        Emit::Error(e) => Emit::Error(e.clone()),
    });
    write_lines(out, &preds)
}

pub fn cmd_encode(input: &Path, out: &Path, k: usize) -> Result<usize> {
    let records = load_dataset(input)?;
    let prompts = par_map(&records, |item| {
        let (line, rec) = match item {
            Emit::Record(r) => r,
            Emit::Error(e) => return Emit::Error(e.clone()),
        };
        let err = |msg: String| Emit::Error(ErrorRecord::new(Some(&rec.id), Some(*line), msg));
        let Some(anchors) = rec.anchors() else {
            return err("record has no anchors; run `solve` first".into());
        };
        let reference = match rec.reference() {
            Ok(r) => r,
            Err(e) => return err(e.to_string()),
        };
        if let Some(r) = &reference {
            if r.points.len() != k {
                return err(format!("reference has {} points but K is {k}", r.points.len()));
            }
        }
        match serialize(&rec.instance, (&anchors.0, &anchors.1), reference.as_ref(), k) {
            Ok(b) => Emit::Record(PromptRecord {
                schema: PROMPT_SCHEMA.into(),
                id: rec.id.clone(),
                n: rec.instance.n,
                k,
                system: b.system,
                user: b.user,
                assistant: b.assistant,
            }),
            Err(e) => err(e.to_string()),
        }
    });
    write_lines(out, &prompts)
}

pub fn cmd_decode(input: &Path, out: &Path) -> Result<usize> {
    let records: Vec<Emit<(usize, CompletionRecord)>> = parse_lines(input, None)?;
    let preds: Vec<Emit<PredictionRecord>> = records
        .into_iter()
        .map(|item| match item {
            Emit::Record((line, c)) => {
                let Some(text) = c.text.as_ref().or(c.assistant.as_ref()) else {
                    return Emit::Error(ErrorRecord::new(Some(&c.id), Some(line), "record has neither `text` nor `assistant`"));
                };
                let parsed = parse_solutions(text, c.n, c.k);
                let mut rec = PredictionRecord::from_vectors(&c.id, &parsed.vectors);
                rec.skipped_slots = Some(parsed.skipped());
                Emit::Record(rec)
            }
            Emit::Error(e) => Emit::Error(e),
        })
        .collect();
    write_lines(out, &preds)
}

/// Prediction vectors of a record; text is parsed for `k` vectors of length `n`.
fn prediction_vectors(p: &PredictionRecord, n: usize, k: usize) -> Result<Vec<Vec<f64>>, String> {
    if let Some(s) = &p.solutions {
        return Ok(s.iter().map(|x| from_dec(x)).collect());
    }
    if let Some(t) = &p.text {
        return Ok(parse_solutions(t, n, k).vectors);
    }
    Err("prediction has neither `solutions` nor `text`".into())
}

/// Prediction records grouped by id, in file order.
fn load_predictions(paths: &[&Path], errors: &mut Vec<ErrorRecord>) -> Result<HashMap<String, Vec<PredictionRecord>>> {
    let mut by_id: HashMap<String, Vec<PredictionRecord>> = HashMap::new();
    for path in paths {
        for item in parse_lines::<PredictionRecord>(path, Some(PREDICTION_SCHEMA))? {
            match item {
                Emit::Record((_, p)) => by_id.entry(p.id.clone()).or_default().push(p),
                Emit::Error(e) => errors.push(e),
            }
        }
    }
    Ok(by_id)
}

pub struct FuseArgs<'a> {
    pub dataset: &'a Path,
    pub passes: Vec<&'a Path>,
    pub out: &'a Path,
    pub config: FusionConfig,
}

pub fn cmd_fuse(a: &FuseArgs) -> Result<usize> {
    let mut errors = Vec::new();
    let mut by_id = load_predictions(&a.passes, &mut errors)?;
    let dataset = load_dataset(a.dataset)?;
    let mut jobs = Vec::new();
    for item in dataset {
        match item {
            Emit::Record((line, rec)) => {
                let preds = by_id.remove(&rec.id).unwrap_or_default();
                jobs.push((line, rec, preds));
            }
            Emit::Error(e) => errors.push(e),
        }
    }
    let mut unknown: Vec<&String> = by_id.keys().collect();
    unknown.sort();
    for id in unknown {
        errors.push(ErrorRecord::new(Some(id), None, "prediction id not found in the dataset"));
    }
    let mut out: Vec<Emit<PredictionRecord>> = par_map(&jobs, |(line, rec, preds)| {
        let err = |msg: String| Emit::Error(ErrorRecord::new(Some(&rec.id), Some(*line), msg));
        if preds.is_empty() {
            return err("no candidate passes for this instance".into());
        }
        let passes: Result<Vec<Vec<Vec<f64>>>, String> =
            preds.iter().map(|p| prediction_vectors(p, rec.instance.n, a.config.k)).collect();
        let passes = match passes {
            Ok(p) => p,
            Err(e) => return err(e),
        };
        // vectors of the wrong length cannot be pooled; they count as dropped candidates
        let passes = passes.into_iter().map(|p| p.into_iter().filter(|x| x.len() == rec.instance.n).collect()).collect();
        let pool = CandidatePool { instance_id: rec.id.clone(), passes };
        match fuse(&rec.instance, &pool, &a.config) {
            Ok(o) => {
                let mut r = PredictionRecord::from_vectors(&rec.id, &o.frontier.solutions());
                r.shortfall = Some(o.shortfall);
                Emit::Record(r)
            }
            Err(e) => err(e.to_string()),
        }
    });
    out.extend(errors.into_iter().map(Emit::Error));
    write_lines(a.out, &out)
}

#[derive(Serialize)]
struct InstanceEntry {
    id: String,
    family: Family,
    n: usize,
    #[serde(flatten)]
    metrics: MetricsReport,
}

#[derive(Serialize)]
struct Report {
    schema: &'static str,
    tol: f64,
    instances: Vec<InstanceEntry>,
    summary: Option<Summary>,
    by_family: BTreeMap<Family, Summary>,
    errors: Vec<ErrorRecord>,
}

pub struct EvalArgs<'a> {
    pub reference: &'a Path,
    pub predictions: &'a Path,
    pub out: &'a Path,
    pub tol: f64,
    pub plot: Option<&'a Path>,
}

pub fn cmd_eval(a: &EvalArgs) -> Result<usize> {
    if !(a.tol >= 0.0) {
        bail!("tolerance must be non-negative");
    }
    let mut errors = Vec::new();
    let mut preds = load_predictions(&[a.predictions], &mut errors)?;
    let mut jobs = Vec::new();
    for item in load_dataset(a.reference)? {
        match item {
            Emit::Record((line, rec)) => match preds.remove(&rec.id) {
                Some(mut p) => {
                    if p.len() > 1 {
                        errors.push(ErrorRecord::new(Some(&rec.id), None, "several predictions for one instance; using the first"));
                    }
                    jobs.push((line, rec, p.swap_remove(0)));
                }
                None => errors.push(ErrorRecord::new(Some(&rec.id), Some(line), "no prediction for this instance")),
            },
            Emit::Error(e) => errors.push(e),
        }
    }
    let mut stray: Vec<&String> = preds.keys().collect();
    stray.sort();
    for id in stray {
        errors.push(ErrorRecord::new(Some(id), None, "prediction id not found in the reference file"));
    }

    let results = par_map(&jobs, |(line, rec, pred)| -> Result<(InstanceEntry, String), ErrorRecord> {
        let err = |m: String| ErrorRecord::new(Some(&rec.id), Some(*line), m);
        let reference = rec.reference().map_err(|e| err(e.to_string()))?.ok_or_else(|| err("record has no reference frontier".into()))?;
        let xs = prediction_vectors(pred, rec.instance.n, reference.points.len()).map_err(err)?;
        let metrics = evaluate_prediction(&rec.instance, &xs, &reference, a.tol).map_err(|e| err(e.to_string()))?;
        let svg = if a.plot.is_some() {
            let feasible: Vec<[f64; 2]> = xs
                .iter()
                .filter(|x| rec.instance.check_feasible(x, a.tol).unwrap_or(false))
                .filter_map(|x| rec.instance.objectives(x).ok())
                .collect();
            let title = format!("{}  HVR {:.4}", rec.id, metrics.hvr);
            frontier_svg(
                &title,
                &normalize(&reference.objectives(), metrics.ideal, metrics.nadir),
                &normalize(&feasible, metrics.ideal, metrics.nadir),
            )
        } else {
            String::new()
        };
        Ok((InstanceEntry { id: rec.id.clone(), family: rec.instance.family(), n: rec.instance.n, metrics }, svg))
    });

    let mut instances = Vec::new();
    let mut plots = Vec::new();
    for r in results {
        match r {
            Ok((entry, svg)) => {
                plots.push((entry.id.clone(), svg));
                instances.push(entry);
            }
            Err(e) => errors.push(e),
        }
    }
    if let Some(dir) = a.plot {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (id, svg) in &plots {
            let name: String = id.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
            fs::write(dir.join(format!("{name}.svg")), svg)?;
        }
    }

    let all: Vec<MetricsReport> = instances.iter().map(|e| e.metrics.clone()).collect();
    let mut by_family = BTreeMap::new();
    for family in Family::ALL {
        let subset: Vec<MetricsReport> = instances.iter().filter(|e| e.family == family).map(|e| e.metrics.clone()).collect();
        if !subset.is_empty() {
            by_family.insert(family, aggregate(&subset)?);
        }
    }
    let report = Report {
        schema: REPORT_SCHEMA,
        tol: a.tol,
        summary: if all.is_empty() { None } else { Some(aggregate(&all)?) },
        instances,
        by_family,
        errors,
    };
    if let Some(s) = &report.summary {
        println!(
            "instances {}  feasibility {:.4} ± {:.4}  HVR {:.4} ± {:.4}  IGD+ {}",
            s.count,
            s.feasibility.mean,
            s.feasibility.std,
            s.hvr.mean,
            s.hvr.std,
            s.igd_plus.map_or("undefined".to_string(), |g| format!("{:.4} ± {:.4}", g.mean, g.std)),
        );
    }
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(a.out, text).with_context(|| format!("writing {}", a.out.display()))?;
    Ok(report.errors.len())
}
