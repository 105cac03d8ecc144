//! Named experiments with their parameters and runtime budgets.

use std::collections::BTreeMap;
use std::path::PathBuf;

use entinflate::measures::CutPolicy;

use crate::config::{ExperimentConfig, ParamKind, ParamSpec, Params};
use crate::error::{CliError, Result};
use crate::experiments::{self as ex, Ctx};
use crate::output::{publish, Manifest};
use crate::record::Table;

pub struct Experiment {
    pub id: &'static str,
    pub summary: &'static str,
    /// Measured wall time at the default parameters on one core.
    pub budget: &'static str,
    pub params: &'static [ParamSpec],
    run: fn(&Ctx) -> Result<Vec<Table>>,
}

const fn num(key: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: ParamKind::Num, default, help }
}

const fn int(key: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: ParamKind::Int, default, help }
}

const fn list(key: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { key, kind: ParamKind::List, default, help }
}

const STEP: &str = "lambda grid step";
const STARTS: &str = "multi-starts per cold angle search";
const SAMPLES: &str = "ensemble size (5000 for the published histograms)";

static REGISTRY: [Experiment; 13] = [
    Experiment {
        id: "fig3-ggm-vs-lambda",
        summary: "GGM maximised over auxiliaries against lambda, |phi+> seed, PB rounds 1..rounds",
        budget: "~5 s",
        params: &[int("rounds", "3", "PB rounds"), num("lambda_step", "0.005", STEP), int("starts", "8", STARTS)],
        run: ex::fig3,
    },
    Experiment {
        id: "fig4-critical-vs-z",
        summary: "Round-one critical point of NME seeds against z, numerical and closed form",
        budget: "~1 s",
        params: &[
            num("z_lo_deg", "1", "first z in degrees"),
            num("z_hi_deg", "45", "last z in degrees"),
            num("z_step_deg", "1", "z step in degrees"),
            num("lambda_step", "0.005", STEP),
            int("starts", "8", STARTS),
        ],
        run: ex::fig4,
    },
    Experiment {
        id: "fig5-logneg",
        summary: "Log-negativity of the A1A2 marginal against lambda for 3..rounds+2 parties",
        budget: "~3 s",
        params: &[
            list("z", "0.7853981633974483,0.5", "NME angles (pi/4 is |phi+>)"),
            int("rounds", "3", "PB rounds"),
            num("lambda_step", "0.02", STEP),
            int("starts", "8", STARTS),
        ],
        run: ex::fig5,
    },
    Experiment {
        id: "fig6-ggm-vs-ein",
        summary: "GGM against the seed's entanglement entropy at fixed lambda",
        budget: "<1 s",
        params: &[
            list("lambdas", "0.3,0.5,0.6666666666666666,0.8,0.9", "fixed sharpness values"),
            int("rounds", "1", "PB rounds"),
            int("z_points", "46", "NME angles on [0, pi/4]"),
            num("lambda_step", "0.005", STEP),
            int("starts", "8", STARTS),
        ],
        run: ex::fig6,
    },
    Experiment {
        id: "fig7-ggm-vs-round",
        summary: "Critical GGM of NME seeds against PB round, with optimiser diagnostics",
        budget: "~6 min",
        params: &[
            list("z", "0.2,0.5,0.7853981633974483", "NME angles"),
            int("max_rounds", "5", "largest PB round"),
            num("lambda_step", "0.02", STEP),
            int("starts", "4", STARTS),
        ],
        run: ex::fig7,
    },
    Experiment {
        id: "fig8-haar-hist",
        summary: "Histogram of critical GGM over Haar two-qubit seeds, PB rounds 1..rounds",
        budget: "~5.5 min",
        params: &[
            int("samples", "1000", SAMPLES),
            int("rounds", "2", "PB rounds"),
            int("bins", "50", "histogram bins on [0, 1/2]"),
            num("lambda_step", "0.05", STEP),
            int("starts", "4", STARTS),
        ],
        run: ex::fig8,
    },
    Experiment {
        id: "fig9-10-werner-pb",
        summary: "Negativity monogamy score of PB outputs from Werner seeds: curves and critical score against p",
        budget: "~2.5 min",
        params: &[
            list("curve_p", "0.7,0.8,0.9,1", "Werner p for the lambda curves"),
            int("rounds", "2", "PB rounds"),
            num("p_lo", "0.3", "scan start"),
            num("p_hi", "1", "scan end"),
            num("p_step", "0.02", "scan step"),
            num("scan_lambda_step", "0.02", "lambda step of the p scan"),
            num("lambda_step", "0.01", STEP),
            int("starts", "4", STARTS),
        ],
        run: ex::fig9_10,
    },
    Experiment {
        id: "fig11-ghz-vs-w",
        summary: "GGM against lambda for GHZ and W seeds, PB rounds 1..rounds",
        budget: "~4 s",
        params: &[int("rounds", "2", "PB rounds"), num("lambda_step", "0.005", STEP), int("starts", "8", STARTS)],
        run: ex::fig11,
    },
    Experiment {
        id: "fig12-class-hist",
        summary: "Histograms of round-one critical GGM over random GHZ-class and W-class seeds",
        budget: "~2.5 min",
        params: &[
            int("samples", "1000", SAMPLES),
            int("bins", "50", "histogram bins on [0, 1/2]"),
            num("lambda_step", "0.05", STEP),
            int("starts", "4", STARTS),
        ],
        run: ex::fig12,
    },
    Experiment {
        id: "fig13-scatter",
        summary: "Critical GGM against input GGM for class samples, with the gGHZ reference curve",
        budget: "~2.7 min",
        params: &[
            int("samples", "1000", SAMPLES),
            int("z_points", "46", "gGHZ reference angles on [0, pi/4]"),
            num("reference_lambda_step", "0.005", "lambda step of the gGHZ reference"),
            num("lambda_step", "0.05", STEP),
            int("starts", "4", STARTS),
        ],
        run: ex::fig13,
    },
    Experiment {
        id: "fig15-eb-nme",
        summary: "EB GGM against lambda for NME seeds, rounds 1..rounds",
        budget: "<1 s",
        params: &[
            list("z", "0.2,0.5,0.7,0.7853981633974483", "NME angles"),
            int("rounds", "2", "EB rounds (3 is the desk limit)"),
            num("lambda_step", "0.005", STEP),
            int("starts", "1", STARTS),
        ],
        run: ex::fig15,
    },
    Experiment {
        id: "fig16-pb-vs-eb",
        summary: "Round-one critical GGM of PB and EB for Haar seeds and NME seeds",
        budget: "~8 s",
        params: &[
            int("samples", "1000", SAMPLES),
            int("z_points", "46", "NME angles on [0, pi/4]"),
            num("lambda_step", "0.05", STEP),
            int("starts", "4", STARTS),
        ],
        run: ex::fig16,
    },
    Experiment {
        id: "fig17-18-werner-eb",
        summary: "EB negativity monogamy score from Werner seeds, and the four-party EB/PB comparison against p",
        budget: "~1.5 min",
        params: &[
            list("curve_p", "0.7,0.8,0.9,1", "Werner p for the lambda curves"),
            int("rounds", "2", "EB rounds"),
            num("p_lo", "0.3", "scan start"),
            num("p_hi", "1", "scan end"),
            num("p_step", "0.02", "scan step"),
            num("scan_lambda_step", "0.02", "lambda step of the p scan"),
            num("lambda_step", "0.01", STEP),
            int("starts", "4", STARTS),
        ],
        run: ex::fig17_18,
    },
];

pub fn registry() -> &'static [Experiment] {
    &REGISTRY
}

/// Entries whose id contains `filter`; all of them without one.
pub fn list_experiments(filter: Option<&str>) -> Vec<&'static Experiment> {
    REGISTRY
        .iter()
        .filter(|e| filter.map_or(true, |f| e.id.contains(&f.to_lowercase())))
        .collect()
}

pub fn find(id: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.id == id)
}

#[derive(Debug)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub tables: Vec<Table>,
}

/// Validates the whole configuration, then computes and publishes the run.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let exp = find(&cfg.id).ok_or_else(|| {
        CliError::Usage(format!("unknown experiment {:?}; see `entinflate list`", cfg.id))
    })?;
    let params = Params::resolve(exp.params, &cfg.overrides)?;
    if cfg.jobs == 0 {
        return Err(CliError::Usage("jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} workers: {e}", cfg.jobs)))?;
    let manifest = Manifest {
        experiment: exp.id.to_string(),
        code_version: String::new(),
        seed: cfg.seed,
        jobs: cfg.jobs,
        cut_policy: cfg.cut_policy.map_or("default", CutPolicy::name).to_string(),
        parameters: params.entries().map(|(k, v)| (k.to_string(), v.to_string())).collect::<BTreeMap<_, _>>(),
        status: String::new(),
        started_unix: 0,
        wall_time_s: 0.0,
        files: Vec::new(),
    };
    let ctx = Ctx {
        id: exp.id,
        seed: cfg.seed,
        params: &params,
        cut_policy: cfg.cut_policy,
    };
    let (dir, manifest, tables) = publish(&cfg.out_dir, manifest, || pool.install(|| (exp.run)(&ctx)))?;
    Ok(RunOutput { dir, manifest, tables })
}
