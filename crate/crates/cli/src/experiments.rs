//! One function per registry entry. Each returns its tables; writing them is
//! the caller's business.

use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;

use entinflate::families::{gghz, ghz, nme, w};
use entinflate::inflation::PbPure;
use entinflate::measures::{entanglement_entropy, ggm, log_negativity, CutPolicy};
use entinflate::optsearch::analytic::{analytic_gc_nme, analytic_ggm_curve_maxent, analytic_lambda_c_nme};
use entinflate::optsearch::{
    eb_critical, max_over_aux, maximize_monogamy, maximize_monogamy_eb, pb_critical, OptimizationResult, SearchSpec,
};
use entinflate::povm::phi_plus;
use entinflate::state::{Bipartition, MixedState, PartyLabel, PureState, QState};

use crate::config::Params;
use crate::ensembles::{class_ensemble, haar_ensemble, ClassKind, ClassSample};
use crate::error::{CliError, Result};
use crate::record::{ResultRecord, Table, Value, CODE_VERSION};
use crate::stats::{histogram, interpolate, mean, std_dev};

/// Below this angle the NME critical peak is too close to lambda = 1 for the
/// grid to resolve; such rows are flagged rather than dropped.
pub const LOW_CONFIDENCE_Z_DEG: f64 = 8.02;

pub struct Ctx<'a> {
    pub id: &'static str,
    pub seed: u64,
    pub params: &'a Params,
    pub cut_policy: Option<CutPolicy>,
}

type Row<'k> = Vec<(&'k str, Value)>;

impl Ctx<'_> {
    pub fn row(&self, inputs: Row<'_>, outputs: Row<'_>) -> ResultRecord {
        let own = |v: Row<'_>| v.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        ResultRecord {
            experiment: self.id.to_string(),
            seed: self.seed,
            code_version: CODE_VERSION.to_string(),
            inputs: own(inputs),
            outputs: own(outputs),
        }
    }

    /// Search settings from the `lambda_step` and `starts` parameters.
    fn spec(&self) -> Result<SearchSpec> {
        let s = SearchSpec {
            lambda_step: self.params.f64("lambda_step")?,
            starts: self.params.usize("starts")?,
            seed: self.seed,
            ..SearchSpec::default()
        };
        s.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(s)
    }

    /// The ensemble preset with the `lambda_step` and `starts` parameters.
    fn ensemble_spec(&self) -> Result<SearchSpec> {
        let s = SearchSpec {
            warm_start: false,
            ..self.spec()?
        };
        Ok(s)
    }

    fn rounds(&self, key: &str) -> Result<usize> {
        let r = self.params.usize(key)?;
        if r == 0 {
            return Err(CliError::Usage(format!("{key} must be at least 1")));
        }
        Ok(r)
    }
}

fn table(name: impl Into<String>, records: Vec<ResultRecord>) -> Table {
    Table {
        name: name.into(),
        records,
    }
}

fn collect<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || hi < lo {
        return Err(CliError::Usage(format!("bad grid [{lo}, {hi}] step {step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut g: Vec<f64> = (0..=n).map(|i| lo + i as f64 * step).collect();
    if (g[n] - hi).abs() > 1e-12 {
        g.push(hi);
    }
    Ok(g)
}

/// `points` values spread evenly over `[lo, hi]`.
fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

fn angle_columns(angles: &[f64]) -> Vec<(String, Value)> {
    angles
        .chunks(2)
        .enumerate()
        .flat_map(|(i, c)| {
            let a = entinflate::optsearch::angles_to_aux(c)[0];
            [(format!("theta{}", i + 1), a.theta.into()), (format!("phi{}", i + 1), a.phi.into())]
        })
        .collect()
}

fn with_angles(mut rec: ResultRecord, angles: &[f64]) -> ResultRecord {
    rec.outputs.extend(angle_columns(angles));
    rec
}

fn critical_row(ctx: &Ctx, inputs: Row<'_>, r: &OptimizationResult) -> ResultRecord {
    let mut rec = ctx.row(
        inputs,
        vec![
            ("lambda_c", r.lambda_c.into()),
            ("value_c", r.value_c.into()),
            ("evals", r.evals_used.into()),
            ("budget_exhausted", r.budget_exhausted.into()),
            ("aux_independent", r.aux_independent.into()),
        ],
    );
    // rounds differ in angle count, so the optimum goes in one text column
    let aux: Vec<String> = r.aux_opt.iter().map(|a| format!("{};{}", a.theta, a.phi)).collect();
    rec.outputs.push(("aux".into(), aux.join(";").into()));
    rec
}

fn curve_rows(ctx: &Ctx, inputs: &[(&str, Value)], r: &OptimizationResult) -> Vec<ResultRecord> {
    r.curve
        .iter()
        .map(|p| {
            let mut ins = inputs.to_vec();
            ins.push(("lambda", p.lambda.into()));
            with_angles(ctx.row(ins, vec![("value", p.value.into())]), &p.angles)
        })
        .collect()
}

/// Missing values are written as `na`.
fn or_na(x: Option<f64>) -> Value {
    x.map_or(Value::from("na"), Value::from)
}

fn fmt_z(z: f64) -> String {
    format!("{z:.4}")
}

// --------------------------------------------------------------------------

pub fn fig3(ctx: &Ctx) -> Result<Vec<Table>> {
    let rounds = ctx.rounds("rounds")?;
    let spec = ctx.spec()?;
    let runs = collect(
        (1..=rounds)
            .into_par_iter()
            .map(|r| Ok(pb_critical(&phi_plus(), r, 1, ctx.cut_policy, &spec)?))
            .collect(),
    )?;
    let mut tables = Vec::new();
    let mut crit = Vec::new();
    for (i, r) in runs.iter().enumerate() {
        let round = i + 1;
        let mut rows = curve_rows(ctx, &[("round", round.into())], r);
        if round == 1 {
            for (row, p) in rows.iter_mut().zip(&r.curve) {
                row.outputs.insert(1, ("analytic".into(), analytic_ggm_curve_maxent(p.lambda).into()));
            }
        }
        tables.push(table(format!("round{round}"), rows));
        crit.push(critical_row(ctx, vec![("round", round.into())], r));
    }
    tables.push(table("critical", crit));
    Ok(tables)
}

pub fn fig4(ctx: &Ctx) -> Result<Vec<Table>> {
    let p = ctx.params;
    let zs = grid(p.f64("z_lo_deg")?, p.f64("z_hi_deg")?, p.f64("z_step_deg")?)?;
    if zs.iter().any(|z| *z <= 0.0 || *z > 45.0) {
        return Err(CliError::Usage("z range must lie in (0, 45] degrees".into()));
    }
    let spec = ctx.spec()?;
    let rows = collect(
        zs.par_iter()
            .map(|&deg| {
                let z = deg.to_radians();
                let r = pb_critical(&nme(z)?, 1, 1, ctx.cut_policy, &spec)?;
                let mut rec = critical_row(ctx, vec![("z_deg", deg.into()), ("z", z.into())], &r);
                rec.outputs.push(("lambda_c_analytic".into(), analytic_lambda_c_nme(z)?.into()));
                rec.outputs.push(("value_c_analytic".into(), analytic_gc_nme(z)?.into()));
                rec.outputs.push(("low_confidence".into(), (deg < LOW_CONFIDENCE_Z_DEG).into()));
                Ok(rec)
            })
            .collect(),
    )?;
    Ok(vec![table("critical", rows)])
}

/// Log-negativity of the two seed parties along the GGM-optimal auxiliaries.
pub fn fig5(ctx: &Ctx) -> Result<Vec<Table>> {
    let rounds = ctx.rounds("rounds")?;
    let zs = ctx.params.list("z")?;
    let spec = ctx.spec()?;
    let lambdas = grid(0.0, 1.0, spec.lambda_step)?;
    let combos: Vec<(f64, usize)> = zs.iter().flat_map(|&z| (1..=rounds).map(move |r| (z, r))).collect();
    let tables = collect(
        combos
            .par_iter()
            .map(|&(z, r)| {
                let seed = nme(z)?;
                let k = PbPure::new(&seed, r, 1, ctx.cut_policy);
                let cut = Bipartition::new(&[PartyLabel(1)], 2)?;
                let mut warm: Option<Vec<f64>> = None;
                let mut rows = Vec::new();
                for (i, &lam) in lambdas.iter().enumerate() {
                    let s = max_over_aux(&|x| k.ggm(lam, x), k.n_angles(), &spec, warm.as_deref(), i as u64);
                    let logneg = match k.state(lam, &s.angles) {
                        Some((amps, _)) => {
                            let st = PureState::new(amps)?;
                            let m = MixedState::new(st.reduced_density(&[PartyLabel(1), PartyLabel(2)])?)?;
                            log_negativity(&m, &cut)?
                        }
                        None => 0.0,
                    };
                    if s.value > 0.0 {
                        warm = Some(s.angles.clone());
                    }
                    rows.push(with_angles(
                        ctx.row(
                            vec![("z", z.into()), ("parties", (r + 2).into()), ("lambda", lam.into())],
                            vec![("ggm", s.value.into()), ("log_negativity_a1a2", logneg.into())],
                        ),
                        &s.angles,
                    ));
                }
                Ok(table(format!("logneg_z{}_n{}", fmt_z(z), r + 2), rows))
            })
            .collect(),
    )?;
    Ok(tables)
}

pub fn fig6(ctx: &Ctx) -> Result<Vec<Table>> {
    let lambdas = ctx.params.list("lambdas")?;
    let rounds = ctx.rounds("rounds")?;
    let zs = linspace(0.0, FRAC_PI_4, ctx.params.usize("z_points")?);
    let spec = ctx.spec()?;
    let mut tables = Vec::new();
    for &lam in &lambdas {
        let rows = collect(
            zs.par_iter()
                .enumerate()
                .map(|(i, &z)| {
                    let seed = nme(z)?;
                    let k = PbPure::new(&seed, rounds, 1, ctx.cut_policy);
                    let s = max_over_aux(&|x| k.ggm(lam, x), k.n_angles(), &spec, None, i as u64);
                    Ok(with_angles(
                        ctx.row(
                            vec![("lambda", lam.into()), ("round", rounds.into()), ("z", z.into())],
                            vec![("e_in", entanglement_entropy(&seed)?.into()), ("ggm", s.value.into())],
                        ),
                        &s.angles,
                    ))
                })
                .collect(),
        )?;
        tables.push(table(format!("ggm_vs_ein_lambda{lam:.4}"), rows));
    }
    Ok(tables)
}

pub fn fig7(ctx: &Ctx) -> Result<Vec<Table>> {
    let zs = ctx.params.list("z")?;
    let max_rounds = ctx.rounds("max_rounds")?;
    let spec = ctx.spec()?;
    let combos: Vec<(f64, usize)> = zs.iter().flat_map(|&z| (1..=max_rounds).map(move |r| (z, r))).collect();
    // Large rounds cost most; hand them out first.
    let mut order: Vec<usize> = (0..combos.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(combos[i].1));
    let mut done: Vec<(usize, ResultRecord)> = collect(
        order
            .par_iter()
            .map(|&i| {
                let (z, r) = combos[i];
                let res = pb_critical(&nme(z)?, r, 1, ctx.cut_policy, &spec)?;
                let rec = critical_row(ctx, vec![("z", z.into()), ("round", r.into())], &res);
                Ok((i, rec))
            })
            .collect(),
    )?;
    done.sort_by_key(|(i, _)| *i);
    Ok(vec![table("critical_by_round", done.into_iter().map(|(_, r)| r).collect())])
}

fn summary_rows(ctx: &Ctx, label: (&str, Value), xs: &[f64]) -> ResultRecord {
    ctx.row(
        vec![label],
        vec![
            ("samples", xs.len().into()),
            ("mean", mean(xs).into()),
            ("std_dev", std_dev(xs).into()),
            ("min", xs.iter().cloned().fold(f64::INFINITY, f64::min).into()),
            ("max", xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).into()),
        ],
    )
}

fn histogram_rows(ctx: &Ctx, label: (&str, Value), xs: &[f64], bins: usize, lo: f64, hi: f64) -> Vec<ResultRecord> {
    let counts = histogram(xs, bins, lo, hi);
    let w = (hi - lo) / bins as f64;
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            ctx.row(
                vec![label.clone(), ("bin_lo", (lo + i as f64 * w).into()), ("bin_hi", (lo + (i + 1) as f64 * w).into())],
                vec![("count", c.into()), ("frequency", (c as f64 / xs.len() as f64).into())],
            )
        })
        .collect()
}

fn bins(ctx: &Ctx) -> Result<usize> {
    match ctx.params.usize("bins")? {
        0 => Err(CliError::Usage("bins must be at least 1".into())),
        b => Ok(b),
    }
}

pub fn fig8(ctx: &Ctx) -> Result<Vec<Table>> {
    let n = ctx.params.usize("samples")?;
    let rounds = ctx.rounds("rounds")?;
    let bins = bins(ctx)?;
    let spec = ctx.ensemble_spec()?;
    let ens = haar_ensemble(ctx.seed, n, rounds, false, &spec, ctx.cut_policy)?;
    let mut rows = Vec::new();
    for s in &ens {
        for (r, c) in s.pb.iter().enumerate() {
            rows.push(ctx.row(
                vec![("sample", s.index.into()), ("round", (r + 1).into())],
                vec![("e_in", s.e_in.into()), ("lambda_c", c.lambda_c.into()), ("value_c", c.value_c.into())],
            ));
        }
    }
    let mut hist = Vec::new();
    let mut summary = Vec::new();
    for r in 0..rounds {
        let xs: Vec<f64> = ens.iter().map(|s| s.pb[r].value_c).collect();
        hist.extend(histogram_rows(ctx, ("round", (r + 1).into()), &xs, bins, 0.0, 0.5));
        summary.push(summary_rows(ctx, ("round", (r + 1).into()), &xs));
    }
    Ok(vec![table("samples", rows), table("histogram", hist), table("summary", summary)])
}

/// Golden-section refinement of a maximum on `[lo, hi]`.
fn golden_max(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// Werner parameter maximising a critical score: grid scan, then golden refinement.
pub fn peak_over_p(
    score: &(dyn Fn(f64) -> Result<f64> + Sync),
    ps: &[f64],
    tol: f64,
) -> Result<(f64, f64, Vec<(f64, f64)>)> {
    let vals = collect(ps.par_iter().map(|&p| score(p)).collect())?;
    let scan: Vec<(f64, f64)> = ps.iter().cloned().zip(vals).collect();
    let ib = (0..scan.len())
        .max_by(|&a, &b| scan[a].1.total_cmp(&scan[b].1))
        .ok_or_else(|| CliError::Usage("empty p grid".into()))?;
    let lo = scan[ib.saturating_sub(1)].0;
    let hi = scan[(ib + 1).min(scan.len() - 1)].0;
    let (mut p, mut v) = scan[ib];
    if hi > lo {
        let (pr, vr) = golden_max(score, lo, hi, tol)?;
        if vr > v {
            (p, v) = (pr, vr);
        }
    }
    Ok((p, v, scan))
}

fn werner_curves(
    ctx: &Ctx,
    scheme: &str,
    rounds: usize,
    curve_ps: &[f64],
    solve: &(dyn Fn(f64, usize) -> entinflate::error::Result<OptimizationResult> + Sync),
) -> Result<(Vec<Table>, Vec<ResultRecord>)> {
    let combos: Vec<(f64, usize)> = curve_ps.iter().flat_map(|&p| (1..=rounds).map(move |r| (p, r))).collect();
    let runs = collect(combos.par_iter().map(|&(p, r)| Ok(solve(p, r)?)).collect())?;
    let mut curves = Vec::new();
    let mut crit = Vec::new();
    for (&(p, r), res) in combos.iter().zip(&runs) {
        let ins = [("scheme", scheme.into()), ("p", p.into()), ("round", r.into())];
        curves.push(table(format!("curve_{scheme}_p{p:.4}_round{r}"), curve_rows(ctx, &ins, res)));
        crit.push(critical_row(ctx, ins.to_vec(), res));
    }
    Ok((curves, crit))
}

fn werner_scan(
    ctx: &Ctx,
    scheme: &str,
    rounds: &[usize],
    ps: &[f64],
    solve: &(dyn Fn(f64, usize) -> entinflate::error::Result<OptimizationResult> + Sync),
) -> Result<(Vec<ResultRecord>, Vec<ResultRecord>)> {
    let mut scan_rows = Vec::new();
    let mut peaks = Vec::new();
    for &r in rounds {
        let score = |p: f64| -> Result<f64> { Ok(solve(p, r)?.value_c) };
        let (p_peak, v_peak, scan) = peak_over_p(&score, ps, 1e-3)?;
        for (p, v) in scan {
            scan_rows.push(ctx.row(
                vec![("scheme", scheme.into()), ("round", r.into()), ("p", p.into())],
                vec![("delta_c", v.into())],
            ));
        }
        peaks.push(ctx.row(
            vec![("scheme", scheme.into()), ("round", r.into())],
            vec![("p_peak", p_peak.into()), ("delta_c_peak", v_peak.into())],
        ));
    }
    Ok((scan_rows, peaks))
}

fn werner_pb_solver(spec: SearchSpec) -> impl Fn(f64, usize) -> entinflate::error::Result<OptimizationResult> + Sync {
    move |p, r| maximize_monogamy(p, r, &spec)
}

pub fn fig9_10(ctx: &Ctx) -> Result<Vec<Table>> {
    let rounds = ctx.rounds("rounds")?;
    let spec = ctx.spec()?;
    let solve = werner_pb_solver(spec.clone());
    let (mut tables, crit) = werner_curves(ctx, "pb", rounds, &ctx.params.list("curve_p")?, &solve)?;
    let ps = grid(ctx.params.f64("p_lo")?, ctx.params.f64("p_hi")?, ctx.params.f64("p_step")?)?;
    let coarse = SearchSpec {
        lambda_step: ctx.params.f64("scan_lambda_step")?,
        ..spec
    };
    let scan_solve = werner_pb_solver(coarse);
    let rs: Vec<usize> = (1..=rounds).collect();
    let (scan, peaks) = werner_scan(ctx, "pb", &rs, &ps, &scan_solve)?;
    tables.extend([table("critical", crit), table("critical_vs_p", scan), table("peak", peaks)]);
    Ok(tables)
}

pub fn fig11(ctx: &Ctx) -> Result<Vec<Table>> {
    let rounds = ctx.rounds("rounds")?;
    let spec = ctx.spec()?;
    let seeds: [(&str, PureState); 2] = [("ghz", ghz()), ("w", w())];
    let combos: Vec<(usize, usize)> = (0..2).flat_map(|f| (1..=rounds).map(move |r| (f, r))).collect();
    let runs = collect(
        combos
            .par_iter()
            .map(|&(f, r)| Ok(pb_critical(&seeds[f].1, r, 1, ctx.cut_policy, &spec)?))
            .collect(),
    )?;
    let mut tables = Vec::new();
    let mut crit = Vec::new();
    for (&(f, r), res) in combos.iter().zip(&runs) {
        let ins = [("family", seeds[f].0.into()), ("round", r.into())];
        tables.push(table(format!("curve_{}_round{r}", seeds[f].0), curve_rows(ctx, &ins, res)));
        crit.push(critical_row(ctx, ins.to_vec(), res));
    }
    tables.push(table("critical", crit));
    Ok(tables)
}

fn class_rows(ctx: &Ctx, kind: ClassKind, ens: &[ClassSample]) -> Vec<ResultRecord> {
    ens.iter()
        .map(|s| {
            ctx.row(
                vec![("class", kind.name().into()), ("sample", s.index.into())],
                vec![
                    ("ggm_in", s.ggm_in.into()),
                    ("tangle", s.tangle.into()),
                    ("lambda_c", s.pb.lambda_c.into()),
                    ("value_c", s.pb.value_c.into()),
                ],
            )
        })
        .collect()
}

pub fn fig12(ctx: &Ctx) -> Result<Vec<Table>> {
    let n = ctx.params.usize("samples")?;
    let bins = bins(ctx)?;
    let spec = ctx.ensemble_spec()?;
    let mut rows = Vec::new();
    let mut hist = Vec::new();
    let mut summary = Vec::new();
    for kind in [ClassKind::Ghz, ClassKind::W] {
        let ens = class_ensemble(ctx.seed, kind, n, &spec, ctx.cut_policy)?;
        let xs: Vec<f64> = ens.iter().map(|s| s.pb.value_c).collect();
        rows.extend(class_rows(ctx, kind, &ens));
        hist.extend(histogram_rows(ctx, ("class", kind.name().into()), &xs, bins, 0.0, 0.5));
        summary.push(summary_rows(ctx, ("class", kind.name().into()), &xs));
    }
    Ok(vec![table("samples", rows), table("histogram", hist), table("summary", summary)])
}

/// Numerical gGHZ round-one critical values over `z` in `[0, pi/4]`.
pub fn gghz_reference(points: usize, spec: &SearchSpec, policy: Option<CutPolicy>) -> Result<Vec<(f64, f64, f64)>> {
    collect(
        linspace(0.0, FRAC_PI_4, points)
            .par_iter()
            .map(|&z| {
                let s = gghz(z)?;
                let g_in = ggm(&s, CutPolicy::All)?.value;
                Ok((z, g_in, pb_critical(&s, 1, 1, policy, spec)?.value_c))
            })
            .collect(),
    )
}

/// gGHZ critical value at a given input GGM: `G_in = sin^2 z` on `[0, pi/4]`,
/// and gGHZ shares the NME critical value. `None` above 1/2.
pub fn gghz_bound(g_in: f64) -> Option<f64> {
    if !(0.0..=0.5 + 1e-9).contains(&g_in) {
        return None;
    }
    let z = g_in.min(0.5).sqrt().asin();
    if z <= 0.0 {
        return Some(0.0);
    }
    analytic_gc_nme(z.min(FRAC_PI_4)).ok()
}

pub fn fig13(ctx: &Ctx) -> Result<Vec<Table>> {
    let n = ctx.params.usize("samples")?;
    let spec = ctx.ensemble_spec()?;
    let ref_spec = SearchSpec {
        lambda_step: ctx.params.f64("reference_lambda_step")?,
        ..spec.clone()
    };
    let reference = gghz_reference(ctx.params.usize("z_points")?, &ref_spec, ctx.cut_policy)?;
    let ref_rows = reference
        .iter()
        .map(|&(z, g_in, g_c)| {
            ctx.row(
                vec![("z", z.into())],
                vec![
                    ("ggm_in", g_in.into()),
                    ("value_c", g_c.into()),
                    ("value_c_bound", or_na(gghz_bound(g_in))),
                ],
            )
        })
        .collect();
    let curve: Vec<(f64, f64)> = reference.iter().map(|&(_, g, v)| (g, v)).collect();
    let mut rows = Vec::new();
    for kind in [ClassKind::Ghz, ClassKind::W] {
        let ens = class_ensemble(ctx.seed, kind, n, &spec, ctx.cut_policy)?;
        for (mut rec, s) in class_rows(ctx, kind, &ens).into_iter().zip(&ens) {
            let bound = gghz_bound(s.ggm_in);
            let interp = interpolate(&curve, s.ggm_in);
            rec.outputs.push(("gghz_value_c".into(), or_na(bound)));
            rec.outputs.push(("gghz_value_c_numeric".into(), or_na(interp)));
            rec.outputs.push(("margin".into(), or_na(bound.map(|b| b - s.pb.value_c))));
            rows.push(rec);
        }
    }
    Ok(vec![table("gghz_reference", ref_rows), table("samples", rows)])
}

pub fn fig15(ctx: &Ctx) -> Result<Vec<Table>> {
    let zs = ctx.params.list("z")?;
    let rounds = ctx.rounds("rounds")?;
    let spec = ctx.spec()?;
    let combos: Vec<(f64, usize)> = zs.iter().flat_map(|&z| (1..=rounds).map(move |r| (z, r))).collect();
    let runs = collect(
        combos
            .par_iter()
            .map(|&(z, r)| Ok(eb_critical(&QState::Pure(nme(z)?), r, 1, ctx.cut_policy, &spec)?))
            .collect(),
    )?;
    let mut tables = Vec::new();
    let mut crit = Vec::new();
    for (&(z, r), res) in combos.iter().zip(&runs) {
        let ins = [("z", z.into()), ("round", r.into())];
        let rows = res
            .curve
            .iter()
            .map(|p| {
                let mut ins = ins.to_vec();
                ins.push(("lambda", p.lambda.into()));
                ctx.row(ins, vec![("ggm", p.value.into())])
            })
            .collect();
        tables.push(table(format!("eb_curve_z{}_round{r}", fmt_z(z)), rows));
        crit.push(critical_row(ctx, ins.to_vec(), res));
    }
    tables.push(table("critical", crit));
    Ok(tables)
}

pub fn fig16(ctx: &Ctx) -> Result<Vec<Table>> {
    let n = ctx.params.usize("samples")?;
    let spec = ctx.ensemble_spec()?;
    let ens = haar_ensemble(ctx.seed, n, 1, true, &spec, ctx.cut_policy)?;
    let mut rows = Vec::new();
    let mut pb_better = 0usize;
    for s in &ens {
        let pb = s.pb[0];
        let eb = s.eb.expect("requested");
        pb_better += usize::from(eb.value_c < pb.value_c);
        rows.push(ctx.row(
            vec![("sample", s.index.into())],
            vec![
                ("e_in", s.e_in.into()),
                ("pb_lambda_c", pb.lambda_c.into()),
                ("pb_value_c", pb.value_c.into()),
                ("eb_lambda_c", eb.lambda_c.into()),
                ("eb_value_c", eb.value_c.into()),
            ],
        ));
    }
    let nme_rows = collect(
        linspace(0.0, FRAC_PI_4, ctx.params.usize("z_points")?)
            .par_iter()
            .map(|&z| {
                let s = nme(z)?;
                let eb = eb_critical(&QState::Pure(s.clone()), 1, 1, ctx.cut_policy, &spec)?;
                let pb = if z > 0.0 { analytic_gc_nme(z)? } else { 0.0 };
                Ok(ctx.row(
                    vec![("z", z.into())],
                    vec![
                        ("e_in", entanglement_entropy(&s)?.into()),
                        ("pb_value_c", pb.into()),
                        ("eb_value_c", eb.value_c.into()),
                    ],
                ))
            })
            .collect(),
    )?;
    let summary = vec![ctx.row(
        vec![("samples", n.into())],
        vec![
            ("pb_better", pb_better.into()),
            ("pb_better_fraction", (pb_better as f64 / n.max(1) as f64).into()),
        ],
    )];
    Ok(vec![table("haar", rows), table("nme", nme_rows), table("summary", summary)])
}

pub fn fig17_18(ctx: &Ctx) -> Result<Vec<Table>> {
    let rounds = ctx.rounds("rounds")?;
    let spec = ctx.spec()?;
    let eb_solve = {
        let spec = spec.clone();
        move |p: f64, r: usize| maximize_monogamy_eb(p, r, &spec)
    };
    let (mut tables, crit) = werner_curves(ctx, "eb", rounds, &ctx.params.list("curve_p")?, &eb_solve)?;
    // Four-party comparison: EB round 1 against PB round 2.
    let ps = grid(ctx.params.f64("p_lo")?, ctx.params.f64("p_hi")?, ctx.params.f64("p_step")?)?;
    let coarse = SearchSpec {
        lambda_step: ctx.params.f64("scan_lambda_step")?,
        ..spec
    };
    let eb_scan = {
        let s = coarse.clone();
        move |p: f64, r: usize| maximize_monogamy_eb(p, r, &s)
    };
    let pb_scan = werner_pb_solver(coarse);
    let (mut scan, mut peaks) = werner_scan(ctx, "eb", &[1], &ps, &eb_scan)?;
    let (s2, p2) = werner_scan(ctx, "pb", &[2], &ps, &pb_scan)?;
    scan.extend(s2);
    peaks.extend(p2);
    tables.extend([table("critical", crit), table("four_party_vs_p", scan), table("peak", peaks)]);
    Ok(tables)
}
