use std::collections::BTreeMap;

use rayon::prelude::*;
use resokit::bound_states::{find_bound_states, modified_norm_check, BoundState, ScanWarning};
use resokit::scattering::{energy_of_k, unitarity_residual, ScatteringPoint};
use resokit::species::load_species;
use resokit::two_channel::{
    bound_state_2ch, effective_params, params_for_target, product_identity_check, TwoChannelParams,
};
use resokit::units::{classify_resonance, scattering_length_of_field, vdw_length, width_radius, NARROW_THRESHOLD};
use resokit::units::{constants, UnitMode, UnitSystem};
use resokit::verify::{run_group, worst_orthogonality_case, CheckGroup, DEFAULT_SEED};
use resokit::PhaseShiftModel;

use crate::args::{Cli, Command, FeshbachCommand, Group, Options, TwoChannelCommand, Units};
use crate::output::{Cell, Table};
use crate::sweep::{Scale, SweepSpec, Variable};
use crate::CliError;

const DEFAULT_QMAX: f64 = 100.0;

pub struct Outcome {
    pub table: Table,
    pub residuals: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    /// A verification residual exceeded its tolerance.
    pub breach: bool,
    pub orthogonality: Option<serde_json::Value>,
}

impl Outcome {
    fn table(table: Table) -> Self {
        Self { table, residuals: BTreeMap::new(), warnings: Vec::new(), breach: false, orthogonality: None }
    }

    fn with_residual(mut self, name: &str, value: f64) -> Self {
        self.residuals.insert(name.to_string(), value);
        self
    }
}

fn need<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing --{flag}")))
}

fn natural_only(opts: &Options) -> Result<(), CliError> {
    match opts.units {
        None | Some(Units::Natural) => Ok(()),
        Some(_) => Err(CliError::Usage("model commands work in natural units (ħ = m = 1); drop --units".into())),
    }
}

fn model(opts: &Options) -> Result<PhaseShiftModel, CliError> {
    natural_only(opts)?;
    match (&opts.coeffs, opts.a) {
        (Some(_), Some(_)) => Err(CliError::Usage("give either --coeffs or --a/--rstar, not both".into())),
        (Some(text), None) => {
            let coeffs = text
                .split(',')
                .map(|t| t.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("bad coefficient '{t}': {e}"))))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PhaseShiftModel::new(coeffs)?)
        }
        (None, Some(a)) => Ok(PhaseShiftModel::from_effective_range(a, opts.rstar.unwrap_or(0.0))?),
        (None, None) => Err(CliError::Usage("missing model: --a [--rstar] or --coeffs".into())),
    }
}

fn sweep(opts: &Options, variable: Variable) -> Result<Vec<f64>, CliError> {
    let scale = if opts.log { Scale::Log } else { Scale::Linear };
    let spec = SweepSpec::new(variable, need(opts.min, "min")?, need(opts.max, "max")?, opts.steps.unwrap_or(50), scale)?;
    Ok(spec.points())
}

fn momenta(opts: &Options) -> Result<Vec<f64>, CliError> {
    match opts.k {
        Some(k) => Ok(vec![k]),
        None => sweep(opts, Variable::K),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Amplitude => amplitude(opts),
        Command::PhaseShift => phase_shift(opts),
        Command::BoundState => bound_states(opts, false),
        Command::ModifiedNorm => bound_states(opts, true),
        Command::TwoChannel(sub) => two_channel(*sub, opts),
        Command::Feshbach(sub) => feshbach(*sub, opts),
        Command::Verify { group } => verify(*group, opts),
    }
}

fn amplitude(opts: &Options) -> Result<Outcome, CliError> {
    let m = model(opts)?;
    let ks = momenta(opts)?;
    let points = ks
        .par_iter()
        .map(|&k| Ok((ScatteringPoint::evaluate(&m, k, opts.identical)?, unitarity_residual(&m, k)?)))
        .collect::<Result<Vec<_>, resokit::Error>>()?;
    let mut table = Table::new(&["k", "E", "Re_f", "Im_f", "delta", "sigma"]);
    let mut worst: f64 = 0.0;
    for (p, r) in points {
        table.push(vec![p.k.into(), p.energy.into(), p.f.re.into(), p.f.im.into(), p.delta.into(), p.sigma.into()]);
        worst = worst.max(r);
    }
    Ok(Outcome::table(table).with_residual("unitarity", worst))
}

fn phase_shift(opts: &Options) -> Result<Outcome, CliError> {
    let m = model(opts)?;
    let ks = momenta(opts)?;
    let rows = ks
        .par_iter()
        .map(|&k| {
            let e = energy_of_k(k);
            Ok(vec![k.into(), e.into(), resokit::scattering::phase_shift(&m, k)?.into(), m.g(e).into()])
        })
        .collect::<Result<Vec<Vec<Cell>>, resokit::Error>>()?;
    let mut table = Table::new(&["k", "E", "delta", "k_cot_delta"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome::table(table))
}

fn bound_states(opts: &Options, with_norm: bool) -> Result<Outcome, CliError> {
    let m = model(opts)?;
    let scan = find_bound_states(&m, opts.qmax.unwrap_or(DEFAULT_QMAX))?;
    let row = |s: &BoundState| -> Vec<Cell> {
        vec![s.q.into(), s.energy.into(), s.a2.into(), s.norm_sign.to_string().into()]
    };
    let mut outcome = if with_norm {
        let mut table = Table::new(&["q", "E", "A2", "norm_sign", "norm_residual"]);
        let mut worst: f64 = 0.0;
        for s in &scan.states {
            let r = modified_norm_check(&m, s);
            worst = worst.max(r);
            let mut cells = row(s);
            cells.push(r.into());
            table.push(cells);
        }
        Outcome::table(table).with_residual("modified_norm", worst)
    } else {
        let mut table = Table::new(&["q", "E", "A2", "norm_sign"]);
        scan.states.iter().for_each(|s| table.push(row(s)));
        Outcome::table(table)
    };
    for w in scan.warnings {
        match w {
            ScanWarning::RootAtGridBoundary { q } => {
                outcome.warnings.push(format!("root at q = {q} sits on the scan boundary; raise --qmax"))
            }
        }
    }
    Ok(outcome)
}

fn two_channel_params(opts: &Options) -> Result<TwoChannelParams, CliError> {
    natural_only(opts)?;
    let eps = need(opts.eps, "eps")?;
    let mass = opts.mass.unwrap_or(1.0);
    match opts.lambda {
        Some(lambda) => Ok(TwoChannelParams::new(lambda, need(opts.emol, "emol")?, eps, mass)?),
        None => Ok(params_for_target(
            need(opts.a, "a (or --lambda/--emol)")?,
            need(opts.rstar, "rstar (or --lambda/--emol)")?,
            eps,
            mass,
        )?),
    }
}

fn two_channel(sub: TwoChannelCommand, opts: &Options) -> Result<Outcome, CliError> {
    match sub {
        TwoChannelCommand::Params => {
            let p = two_channel_params(opts)?;
            let e = effective_params(&p)?;
            let mut table = Table::new(&[
                "eps", "lambda", "emol", "mass", "a_eps", "rstar_eps", "rstar_lambda", "a_fit", "rstar_fit",
            ]);
            table.push(vec![
                p.eps.into(),
                p.lambda.into(),
                p.e_mol.into(),
                p.mass.into(),
                e.a.into(),
                e.rstar.into(),
                e.lambda_term.into(),
                (1.0 / e.fit_inv_a).into(),
                e.fit_rstar.into(),
            ]);
            let dev_a = (e.fit_inv_a - e.inv_a).abs() / e.inv_a.abs();
            let dev_r = (e.fit_rstar - e.rstar).abs() / e.rstar.abs();
            Ok(Outcome::table(table).with_residual("fit_inv_a", dev_a).with_residual("fit_rstar", dev_r))
        }
        TwoChannelCommand::Sweep => {
            natural_only(opts)?;
            let (a, rstar) = (need(opts.a, "a")?, need(opts.rstar, "rstar")?);
            let mass = opts.mass.unwrap_or(1.0);
            let epss = sweep(opts, Variable::Eps)?;
            let rows = epss
                .par_iter()
                .map(|&eps| {
                    let p = params_for_target(a, rstar, eps, mass)?;
                    let e = effective_params(&p)?;
                    let s = bound_state_2ch(&p)?;
                    let r = product_identity_check(&s, &s)?;
                    Ok((
                        vec![
                            eps.into(),
                            e.a.into(),
                            e.rstar.into(),
                            s.energy.into(),
                            s.beta2.into(),
                            (s.a_tail * s.a_tail).into(),
                            r.residual_identity.into(),
                        ],
                        r.residual_tail,
                    ))
                })
                .collect::<Result<Vec<_>, resokit::Error>>()?;
            let mut table = Table::new(&["eps", "a_eps", "rstar_eps", "E_bound", "beta2", "A2_tail", "res_identity"]);
            let mut worst: f64 = 0.0;
            for (row, res) in rows {
                table.push(row);
                worst = worst.max(res);
            }
            Ok(Outcome::table(table).with_residual("molecular_tail_max", worst))
        }
        TwoChannelCommand::Bound => {
            let p = two_channel_params(opts)?;
            let s = bound_state_2ch(&p)?;
            let r = product_identity_check(&s, &s)?;
            let mut table = Table::new(&[
                "E", "kappa", "beta2", "open_norm", "A_tail", "A_beta", "res_molecular", "res_identity",
            ]);
            table.push(vec![
                s.energy.into(),
                s.kappa.into(),
                s.beta2.into(),
                s.open_norm.into(),
                s.a_tail.into(),
                s.a_from_beta().into(),
                r.residual_tail.into(),
                r.residual_identity.into(),
            ]);
            Ok(Outcome::table(table)
                .with_residual("norm", s.norm_residual())
                .with_residual("molecular_exact", r.residual_exact))
        }
    }
}

fn feshbach(sub: FeshbachCommand, opts: &Options) -> Result<Outcome, CliError> {
    let units = match opts.units.unwrap_or(Units::Si) {
        Units::Natural => {
            return Err(CliError::Core(resokit::Error::Unit(
                "species data carry physical units; use --units si or --units atomic".into(),
            )))
        }
        Units::Si => UnitSystem::from_mode(UnitMode::Si),
        Units::Atomic => UnitSystem::from_mode(UnitMode::Atomic),
    };
    let path = need(opts.species.as_ref(), "species")?;
    let species = load_species(path)?
        .into_iter()
        .map(|s| Ok((s.record.name, s.resonance.to_units(units)?)))
        .collect::<Result<Vec<_>, resokit::Error>>()?;
    match sub {
        // fields are given and reported in gauss, as in the species file
        FeshbachCommand::Sweep => {
            let fields = sweep(opts, Variable::B)?;
            let jobs: Vec<(usize, f64)> = (0..species.len()).flat_map(|i| fields.iter().map(move |&b| (i, b))).collect();
            let rows = jobs
                .par_iter()
                .map(|&(i, b)| {
                    let (name, res) = &species[i];
                    let field = units.field_from_si(b * constants::GAUSS);
                    Ok(vec![Cell::from(name.as_str()), b.into(), scattering_length_of_field(res, field)?.into()])
                })
                .collect::<Result<Vec<_>, resokit::Error>>()?;
            let mut table = Table::new(&["species", "B_G", "a"]);
            rows.into_iter().for_each(|r| table.push(r));
            Ok(Outcome::table(table))
        }
        FeshbachCommand::Classify => {
            let threshold = opts.threshold.unwrap_or(NARROW_THRESHOLD);
            let mut table = Table::new(&["species", "rstar", "rvdw", "ratio", "class"]);
            for (name, res) in &species {
                let rstar = width_radius(res)?;
                let rvdw = vdw_length(res)?;
                let class = classify_resonance(res, threshold);
                table.push(vec![
                    name.as_str().into(),
                    rstar.into(),
                    rvdw.into(),
                    (rstar.abs() / rvdw).into(),
                    class.to_string().into(),
                ]);
            }
            Ok(Outcome::table(table))
        }
    }
}

fn verify(group: Group, opts: &Options) -> Result<Outcome, CliError> {
    let group = match group {
        Group::All => CheckGroup::All,
        Group::Orthogonality => CheckGroup::Orthogonality,
        Group::Unitarity => CheckGroup::Unitarity,
        Group::Mapping => CheckGroup::Mapping,
        Group::Identity => CheckGroup::Identity,
    };
    let seed = opts.seed.unwrap_or(DEFAULT_SEED);
    let reports = run_group(group, seed);
    let mut table = Table::new(&["id", "name", "passed", "worst", "tolerance", "detail"]);
    let mut outcome_residuals = BTreeMap::new();
    let mut breach = false;
    for r in reports {
        breach |= !r.passed;
        outcome_residuals.insert(format!("{:02}_{}", r.id, r.name.replace(' ', "_")), r.worst);
        table.push(vec![
            Cell::Int(r.id as i64),
            r.name.into(),
            Cell::Bool(r.passed),
            r.worst.into(),
            r.tolerance.into(),
            r.detail.into(),
        ]);
    }
    let orthogonality = match group {
        CheckGroup::All | CheckGroup::Orthogonality => {
            let case = worst_orthogonality_case(seed)?;
            Some(serde_json::to_value(case).map_err(std::io::Error::from)?)
        }
        _ => None,
    };
    Ok(Outcome { table, residuals: outcome_residuals, warnings: Vec::new(), breach, orthogonality })
}
