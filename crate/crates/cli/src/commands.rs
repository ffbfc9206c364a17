use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};
use threshold_lab::decomposition::{
    efron_stein, influence_report, lp_norm, talagrand_report, verify_hypercontractivity_with, verify_level_bound,
    SigmaMode,
};
use threshold_lab::families::{
    antisym_majority, dictator, graph_property, plurality, recursive_plurality, FamilySpec,
};
use threshold_lab::io::{
    from_json_with_schema, with_schema, CHOICE_SCHEMA, FUNCTION_SCHEMA, MEASURE_SCHEMA, PROFILE_SCHEMA,
    TOURNAMENT_SCHEMA,
};
use threshold_lab::qfun::expectation;
use threshold_lab::rng::stream;
use threshold_lab::social_choice::{
    indeterminacy_experiment, is_rational, mcgarvey_profile, saari_search, ChoiceFunction, Tournament, VoterProfile,
};
use threshold_lab::structure::{check_fair, check_monotone, check_symmetric, check_zero_monotone, CheckResult, SymmetryGroup};
use threshold_lab::threshold::{bound_shape, jury_experiment, scan_path, simplex_sweep, threshold_window, Method, ThresholdCurve};
use threshold_lab::{Error, GraphPropertyKind, MeasurePath, ProductMeasure, QaryFunction, SimplexSampler, TieBreak};

use crate::output::{emit_json, emit_text, read_input, CliError};
use crate::{
    Common, FamilyName, Format, FunctionArgs, GroupArg, MeasureArgs, MethodArg, PathArgs, PropertyArg, SigmaArg,
    TieBreakArg, VerifyKind,
};

type CliResult = Result<(), CliError>;

fn schema(kind: &str) -> String {
    format!("threshold-lab/{kind}/v1")
}

fn report<T: Serialize + ?Sized>(kind: &str, value: &T) -> Result<Value, CliError> {
    Ok(with_schema(&schema(kind), value)?)
}

fn json_only(common: &Common, command: &str) -> CliResult {
    if common.format == Format::Csv {
        return Err(CliError::Usage(format!("`{command}` has no CSV output")));
    }
    Ok(())
}

fn required(value: Option<usize>, flag: &str, family: &str) -> Result<usize, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for {family}")))
}

pub fn load_function(args: &FunctionArgs) -> Result<QaryFunction, CliError> {
    if let Some(path) = &args.function {
        return Ok(from_json_with_schema(&read_input(path)?, FUNCTION_SCHEMA)?);
    }
    let Some(family) = args.family else {
        return Err(CliError::Usage("give --function <file> or --family <name>".into()));
    };
    let tie_break = match args.tie_break {
        TieBreakArg::FirstOccurrence => TieBreak::FirstOccurrence,
        TieBreakArg::SmallestIndex => TieBreak::SmallestIndex,
    };
    let f = match family {
        FamilyName::Plurality => {
            plurality(required(args.q, "q", "plurality")?, required(args.n, "n", "plurality")?, tie_break)
        }
        FamilyName::RecursivePlurality => recursive_plurality(
            required(args.q, "q", "recursive_plurality")?,
            required(args.arity, "arity", "recursive_plurality")?,
            required(args.depth, "depth", "recursive_plurality")?,
            tie_break,
        ),
        FamilyName::GraphProperty => {
            let property = match args.property {
                Some(PropertyArg::MostPopularColor) => GraphPropertyKind::MostPopularColor,
                Some(PropertyArg::MaxCliqueColor) => GraphPropertyKind::MaxCliqueColor,
                Some(PropertyArg::MinIndependentSetColor) => GraphPropertyKind::MinIndependentSetColor,
                None => return Err(CliError::Usage("--property is required for graph_property".into())),
            };
            graph_property(
                required(args.vertices, "vertices", "graph_property")?,
                required(args.q, "q", "graph_property")?,
                property,
            )
        }
        FamilyName::AntisymMajority => antisym_majority(required(args.n, "n", "antisym_majority")?),
        FamilyName::Dictator => dictator(
            required(args.q, "q", "dictator")?,
            required(args.n, "n", "dictator")?,
            args.coordinate.unwrap_or(0),
        ),
    };
    Ok(f?)
}

pub fn load_measure(args: &MeasureArgs, q: usize) -> Result<ProductMeasure, CliError> {
    if let Some(path) = &args.measure {
        return Ok(from_json_with_schema(&read_input(path)?, MEASURE_SCHEMA)?);
    }
    match &args.atoms {
        Some(atoms) => Ok(ProductMeasure::new(atoms.clone())?),
        None => Ok(ProductMeasure::uniform(q)),
    }
}

pub fn family(common: &Common, args: &FunctionArgs, tabulate: bool) -> CliResult {
    json_only(common, "family")?;
    let f = load_function(args)?;
    let f = if tabulate { f.tabulate()? } else { f };
    emit_json(common, &with_schema(FUNCTION_SCHEMA, &f)?)
}

fn verdict(result: threshold_lab::Result<CheckResult>) -> Result<Value, CliError> {
    match result {
        Ok(r) => Ok(serde_json::to_value(r).expect("check results serialize")),
        Err(e @ (Error::CodomainMismatch { .. } | Error::NotBinary | Error::InvalidParameter(_))) => {
            Ok(json!({"applicable": false, "reason": e.to_string()}))
        }
        Err(e) => Err(e.into()),
    }
}

pub fn check(common: &Common, args: &FunctionArgs, group: Option<GroupArg>) -> CliResult {
    json_only(common, "check")?;
    let loaded = load_function(args)?;
    let graph_vertices = match loaded.family() {
        Some(FamilySpec::GraphProperty { vertices, .. }) => Some(*vertices),
        _ => None,
    };
    let f = loaded.tabulate()?;
    let group = match group.unwrap_or(if graph_vertices.is_some() { GroupArg::Graph } else { GroupArg::Full }) {
        GroupArg::Full => Some(("full", SymmetryGroup::full(f.n()))),
        GroupArg::Cyclic => Some(("cyclic", SymmetryGroup::cyclic(f.n()))),
        GroupArg::Graph => {
            let v = graph_vertices.ok_or_else(|| CliError::Usage("--group graph needs a graph_property family".into()))?;
            Some(("graph", SymmetryGroup::graph_vertex_action(v)?))
        }
        GroupArg::None => None,
    };
    let binary = f.is_binary()?;
    let symmetric = match &group {
        Some((_, g)) => verdict(check_symmetric(&f, g))?,
        None => Value::Null,
    };
    let out = json!({
        "schema": schema("check"),
        "q": f.q(),
        "n": f.n(),
        "monotone": verdict(check_monotone(&f))?,
        "fair": verdict(check_fair(&f))?,
        "group": group.as_ref().map(|(name, _)| *name),
        "symmetric": symmetric,
        "zero_monotone": if binary { verdict(check_zero_monotone(&f))? } else { Value::Null },
    });
    emit_json(common, &out)
}

pub fn decompose(common: &Common, args: &FunctionArgs, measure: &MeasureArgs) -> CliResult {
    json_only(common, "decompose")?;
    let f = load_function(args)?;
    let mu = load_measure(measure, f.q())?;
    let record = efron_stein(&f, &mu)?.to_record();
    emit_json(common, &serde_json::to_value(record).expect("records serialize"))
}

pub fn influences(common: &Common, args: &FunctionArgs, measure: &MeasureArgs) -> CliResult {
    let f = load_function(args)?;
    let mu = load_measure(measure, f.q())?;
    let r = influence_report(&f, &mu)?;
    match common.format {
        Format::Json => {
            let mut v = report("influences", &r)?;
            v["atoms"] = json!(mu.atoms());
            emit_json(common, &v)
        }
        Format::Csv => {
            let mut csv = String::from("coordinate,influence,delta_l1,delta_l3_2,delta_l2\n");
            for i in 0..f.n() {
                writeln!(csv, "{i},{},{},{},{}", r.influences[i], r.delta_l1[i], r.delta_l3_2[i], r.delta_l2[i]).unwrap();
            }
            emit_text(common, &csv)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn verify(
    common: &Common,
    kind: VerifyKind,
    files: &[PathBuf],
    random: usize,
    q: usize,
    n: usize,
    level: Option<usize>,
    sigma: SigmaArg,
    measure: &MeasureArgs,
) -> CliResult {
    json_only(common, "verify")?;
    let mut corpus: Vec<(String, QaryFunction)> = Vec::new();
    for path in files {
        let f: QaryFunction = from_json_with_schema(&read_input(path)?, FUNCTION_SCHEMA)?;
        corpus.push((path.display().to_string(), f));
    }
    let mut rng = stream(common.seed, 0);
    if random > 0 {
        let len = threshold_lab::qfun::table_len(q, n)?;
        for k in 0..random {
            let table = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
            corpus.push((format!("random[{k}]"), QaryFunction::from_reals(q, n, table)?));
        }
    }
    if corpus.is_empty() {
        return Err(CliError::Usage("empty corpus: give --function files or --random <count>".into()));
    }
    let mode = match sigma {
        SigmaArg::Safe => SigmaMode::Safe,
        SigmaArg::Exact => SigmaMode::Exact,
    };
    let mut instances = Vec::new();
    let mut violations = 0usize;
    for (source, f) in corpus {
        let mu = if measure.measure.is_some() || measure.atoms.is_some() {
            load_measure(measure, f.q())?
        } else {
            let w: Vec<f64> = (0..f.q()).map(|_| rng.gen_range(0.05..1.0)).collect();
            ProductMeasure::from_weights(&w)?
        };
        let result = match kind {
            VerifyKind::Hypercontractivity => {
                let r = verify_hypercontractivity_with(&f, &mu, mode)?;
                violations += usize::from(!r.ok);
                serde_json::to_value(r).unwrap()
            }
            VerifyKind::Level => {
                let mean = expectation(&f, &mu)?;
                let g = QaryFunction::from_reals(f.q(), f.n(), f.reals()?.iter().map(|v| v - mean).collect())?;
                let levels: Vec<usize> = match level {
                    Some(k) => vec![k],
                    None => (1..=g.n()).collect(),
                };
                let mut reports = Vec::new();
                for k in levels {
                    let r = verify_level_bound(&g, &mu, k)?;
                    violations += usize::from(!r.ok);
                    reports.push(r);
                }
                let (l1, l32, l2) = (lp_norm(&g, &mu, 1.0)?, lp_norm(&g, &mu, 1.5)?, lp_norm(&g, &mu, 2.0)?);
                let cs_ok = l32.powi(3) <= l1 * l2 * l2 + 1e-12;
                violations += usize::from(!cs_ok);
                json!({
                    "centered_by": mean,
                    "levels": reports,
                    "cauchy_schwarz": {"lhs": l32.powi(3), "rhs": l1 * l2 * l2, "ok": cs_ok},
                })
            }
            VerifyKind::Talagrand => match talagrand_report(&f, &mu) {
                Ok(r) => {
                    violations += usize::from(!r.variance_identity_ok);
                    serde_json::to_value(r).unwrap()
                }
                Err(Error::ConstantFunction) => json!({"skipped": "constant function"}),
                Err(e) => return Err(e.into()),
            },
        };
        instances.push(json!({"source": source, "q": f.q(), "n": f.n(), "atoms": mu.atoms(), "result": result}));
    }
    let kind_name = match kind {
        VerifyKind::Hypercontractivity => "hypercontractivity",
        VerifyKind::Level => "level",
        VerifyKind::Talagrand => "talagrand",
    };
    emit_json(
        common,
        &json!({
            "schema": schema("verify"),
            "kind": kind_name,
            "seed": common.seed,
            "instances": instances,
            "violations": violations,
        }),
    )
}

fn method(common: &Common, m: MethodArg) -> Method {
    match m {
        MethodArg::Exact => Method::Exact,
        MethodArg::MonteCarlo => Method::MonteCarlo { samples: common.samples, seed: common.seed },
    }
}

fn curve(common: &Common, args: &PathArgs) -> Result<(QaryFunction, ThresholdCurve), CliError> {
    let f = load_function(&args.function)?;
    let base = match &args.base {
        Some(atoms) => ProductMeasure::new(atoms.clone())?,
        None => MeasurePath::uniform_base(f.q(), args.anchor as usize)?.base().clone(),
    };
    let c = scan_path(&f, args.anchor, &base, common.grid, method(common, args.method))?;
    Ok((f, c))
}

pub fn scan(common: &Common, args: &PathArgs) -> CliResult {
    let (_, c) = curve(common, args)?;
    match common.format {
        Format::Csv => emit_text(common, &c.to_csv()),
        Format::Json => emit_json(common, &report("curve", &c)?),
    }
}

pub fn window(common: &Common, args: &PathArgs) -> CliResult {
    json_only(common, "window")?;
    let (f, c) = curve(common, args)?;
    let w = threshold_window(&c, common.eps, &f)?;
    emit_json(
        common,
        &json!({
            "schema": schema("window"),
            "n": f.n(),
            "q": f.q(),
            "anchor": args.anchor,
            "base": c.path.base().atoms(),
            "method": c.method,
            "grid": common.grid,
            "window": w,
            "bound_shape": bound_shape(common.eps, f.n()),
        }),
    )
}

pub fn sweep(common: &Common, args: &FunctionArgs, anchor: u32, m: MethodArg, inner_samples: usize) -> CliResult {
    json_only(common, "sweep")?;
    let f = load_function(args)?;
    let method = match m {
        MethodArg::Exact => Method::Exact,
        MethodArg::MonteCarlo => Method::MonteCarlo { samples: inner_samples, seed: common.seed },
    };
    let mut sampler = SimplexSampler::new(f.q(), common.seed);
    let r = simplex_sweep(&f, anchor, common.eps, &mut sampler, common.samples, method)?;
    emit_json(common, &report("sweep", &r)?)
}

pub fn jury(common: &Common, args: &FunctionArgs, measure: &MeasureArgs, symbol: u32) -> CliResult {
    json_only(common, "jury")?;
    let f = load_function(args)?;
    let mu = load_measure(measure, f.q())?;
    let r = jury_experiment(&f, &mu, symbol, common.samples, common.seed)?;
    emit_json(common, &report("jury", &r)?)
}

pub fn mcgarvey(common: &Common, tournament: Option<&Path>, random: Option<usize>) -> CliResult {
    json_only(common, "mcgarvey")?;
    let t = match (tournament, random) {
        (Some(path), _) => from_json_with_schema(&read_input(path)?, TOURNAMENT_SCHEMA)?,
        (None, Some(m)) => Tournament::random(m, &mut stream(common.seed, 0)),
        (None, None) => return Err(CliError::Usage("give --tournament <file> or --random <m>".into())),
    };
    let profile = mcgarvey_profile(&t)?;
    let majority = profile.strict_majority();
    emit_json(
        common,
        &json!({
            "schema": schema("mcgarvey"),
            "seed": random.map(|_| common.seed),
            "tournament": t,
            "profile": with_schema(PROFILE_SCHEMA, &profile)?,
            "voters": profile.size(),
            "majority_matches": majority == t.pairs(),
        }),
    )
}

fn load_choice(path: &Path) -> Result<ChoiceFunction, CliError> {
    Ok(from_json_with_schema(&read_input(path)?, CHOICE_SCHEMA)?)
}

pub fn saari(common: &Common, choice: &Path, budget: u64) -> CliResult {
    json_only(common, "saari")?;
    let c = load_choice(choice)?;
    let found = saari_search(&c, budget)?;
    let realization = match &found {
        Some(r) => {
            let mut v = serde_json::to_value(r).unwrap();
            v["profile"] = with_schema(PROFILE_SCHEMA, &r.profile)?;
            v
        }
        None => Value::Null,
    };
    emit_json(
        common,
        &json!({
            "schema": schema("saari"),
            "m": c.m(),
            "budget": budget,
            "rational": is_rational(&c),
            "realization": realization,
        }),
    )
}

pub fn indeterminacy(common: &Common, choice: &Path, profile: Option<&Path>, budget: u64, voters: usize) -> CliResult {
    json_only(common, "indeterminacy")?;
    let c = load_choice(choice)?;
    let w: VoterProfile = match profile {
        Some(path) => from_json_with_schema(&read_input(path)?, PROFILE_SCHEMA)?,
        None => {
            saari_search(&c, budget)?
                .ok_or_else(|| Error::InvalidProfile("no profile realizes this choice function".into()))?
                .profile
        }
    };
    let r = indeterminacy_experiment(&c, &w, voters, common.samples, common.seed)?;
    let mut v = report("indeterminacy", &r)?;
    v["profile"] = with_schema(PROFILE_SCHEMA, &w)?;
    emit_json(common, &v)
}
