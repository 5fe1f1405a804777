use atypical::asymptotic::{k0_sample, kinf_probe, mtame_probe, K0Options, ProbeSchedule, SeedCurve};
use atypical::newton::{
    analyze, bad_faces, check_nondegenerate, face_tuples_at_infinity, sigma, NondegOptions, SigmaOptions,
    VerdictStatus,
};
use atypical::poly::PolyMap;
use atypical::trivialize::{transport, TransportTask};
use serde_json::{json, Value};

use crate::job::{parse_values, CommandKind, JobSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub struct Outcome {
    pub report: Value,
    pub code: i32,
}

impl Outcome {
    fn ok(report: Value) -> Self {
        Self { report, code: EXIT_OK }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

pub fn build_map(job: &JobSpec) -> Result<PolyMap, String> {
    if job.vars.is_empty() {
        return Err("no variables given (--vars)".into());
    }
    if job.polynomials.is_empty() {
        return Err("no components given (--map)".into());
    }
    let vars: Vec<&str> = job.vars.iter().map(String::as_str).collect();
    let exprs: Vec<&str> = job.polynomials.iter().map(String::as_str).collect();
    PolyMap::parse(&exprs, &vars).map_err(|e| e.to_string())
}

/// Runs one job. `Err` carries an input diagnostic.
pub fn run(job: &JobSpec) -> Result<Outcome, String> {
    let f = build_map(job)?;
    let vars = f.var_names();
    match job.command {
        CommandKind::Newton => {
            let mut comps = Vec::new();
            for c in f.components() {
                let data = analyze(c).map_err(|e| e.to_string())?;
                comps.push(json!({
                    "poly": c.to_string_with(&vars),
                    "convenient": data.convenient,
                    "faces_at_infinity": to_value(&data.faces_at_infinity),
                    "bad_faces": to_value(&data.bad_faces),
                }));
            }
            let tuples = face_tuples_at_infinity(&f, job.gamma_inf_reading.into());
            Ok(Outcome::ok(json!({
                "components": comps,
                "gamma_inf_reading": format!("{:?}", job.gamma_inf_reading).to_lowercase(),
                "tuples": to_value(&tuples),
            })))
        }
        CommandKind::Badfaces => {
            let mut out = Vec::new();
            for (k, c) in f.components().iter().enumerate() {
                for face in bad_faces(c) {
                    let mut v = to_value(&face);
                    v["component"] = json!(k + 1);
                    out.push(v);
                }
            }
            Ok(Outcome::ok(Value::Array(out)))
        }
        CommandKind::Nondeg => {
            let mut opts = NondegOptions::new(job.budget, job.seed);
            opts.reading = job.gamma_inf_reading.into();
            let verdicts = check_nondegenerate(&f, &opts);
            let inconclusive =
                !verdicts.is_empty() && verdicts.iter().all(|v| v.status == VerdictStatus::PresumedNondegenerate);
            let degenerate = verdicts.iter().any(|v| v.status == VerdictStatus::Degenerate);
            let report = json!({ "degenerate": degenerate, "inconclusive": inconclusive, "verdicts": to_value(&verdicts) });
            Ok(Outcome { report, code: if inconclusive { EXIT_INCONCLUSIVE } else { EXIT_OK } })
        }
        CommandKind::Sigma => {
            let mut opts = SigmaOptions::new(job.budget, job.seed);
            if let Some(t) = job.tol {
                opts.cluster_tol = t;
            }
            Ok(Outcome::ok(to_value(&sigma(&f, &opts))))
        }
        CommandKind::K0 => {
            let mut opts = K0Options::new(job.budget, job.seed);
            if let Some(t) = job.tol {
                opts.cluster_tol = t;
            }
            Ok(Outcome::ok(to_value(&k0_sample(&f, &opts))))
        }
        CommandKind::Kinf | CommandKind::Mtame => {
            let mut schedule = ProbeSchedule { seed: job.seed, ..ProbeSchedule::default() };
            if let Some(r) = &job.radii {
                schedule.radii = r.clone();
            }
            if let Some(r) = job.restarts {
                schedule.restarts = r;
            }
            if let Some(t) = job.tol {
                schedule.tolerance = t;
            }
            schedule.seed_curves = job
                .seed_curves
                .iter()
                .map(|s| s.parse::<SeedCurve>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
            let target = job.target.as_deref().map(parse_values).transpose()?;
            let report = if job.command == CommandKind::Kinf {
                kinf_probe(&f, &schedule, target.as_deref())
            } else {
                mtame_probe(&f, &schedule, target.as_deref())
            }
            .map_err(|e| e.to_string())?;
            Ok(Outcome::ok(to_value(&report)))
        }
        CommandKind::Trivialize => {
            let start = parse_values(job.start.as_deref().ok_or("trivialize needs --start")?)?;
            let path = job
                .path
                .as_ref()
                .ok_or("trivialize needs --path")?
                .iter()
                .map(|w| parse_values(w))
                .collect::<Result<Vec<_>, _>>()?;
            let mut task = TransportTask::new(f, start, path);
            if let Some(s) = job.step {
                task.step = s;
            }
            if let Some(t) = job.tol {
                task.tol = t;
            }
            let trace = transport(&task).map_err(|e| e.to_string())?;
            Ok(Outcome::ok(to_value(&trace)))
        }
    }
}
