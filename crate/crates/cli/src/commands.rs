use std::collections::BTreeMap;
use std::path::Path;

use maxprec::inference::{
    critical_value, randomized_decision, table_experiment, AlternativeSpec, Baseline, CriticalMethod, ExperimentCell,
    Outcome, SeededRng, StatisticKind, VariedGroup,
};
use maxprec::lehmann::{exact_power_with_budget, LehmannParams};
use maxprec::null_dist::{brute_force_null_distribution, null_distribution, NullDistribution};
use maxprec::rational;
use maxprec::statistics::{cross_sample_ties, frequency_vector, order_from_rate, statistic_bundle, Sample};
use maxprec::Design;
use serde::Serialize;

use crate::args::{
    BaselineArg, Cli, Command, CriticalArgs, CriticalMode, Family, NullDistArgs, NullMethod, OrderArgs, PowerArgs,
    PowerMethod, TestArgs, VariedArg,
};
use crate::error::CliError;
use crate::input;
use crate::output::{csv_bytes, render};

/// Significant digits for exact probabilities printed as decimals.
const EXACT_DIGITS: usize = 20;

pub fn run(cli: &Cli) -> Result<Vec<u8>, CliError> {
    if !(cli.alpha > 0.0 && cli.alpha < 1.0) {
        return Err(CliError::Parameter(format!(
            "--alpha must lie in (0, 1), got {}",
            cli.alpha
        )));
    }
    match &cli.command {
        Command::Test(args) => test(cli, args),
        Command::NullDist(args) => null_dist(cli, args),
        Command::CriticalValues(args) => critical_values(cli, args),
        Command::Power(args) => power(cli, args, &[StatisticKind::T]),
        Command::Compare(args) => power(cli, args, &[StatisticKind::T, StatisticKind::V, StatisticKind::Q]),
    }
}

/// `s` defaults to `r` pairwise; otherwise every `r` meets every `s`.
fn order_pairs(r: &[usize], s: &[usize]) -> Vec<(usize, usize)> {
    if s.is_empty() {
        r.iter().map(|&r| (r, r)).collect()
    } else {
        r.iter().flat_map(|&r| s.iter().map(move |&s| (r, s))).collect()
    }
}

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

fn join(values: &[u64]) -> String {
    values.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
}

#[derive(Serialize)]
struct TestRow {
    m: usize,
    n: usize,
    r: usize,
    s: usize,
    precedence: String,
    exceedance: String,
    p: u64,
    e: u64,
    t: u64,
    q: u64,
    a: Option<u64>,
    b: u64,
    v: Option<u64>,
    c: usize,
    alpha1: f64,
    alpha2: f64,
    phi: f64,
    decision: &'static str,
    p_value: f64,
}

impl TestRow {
    const HEADER: &'static [&'static str] = &[
        "m",
        "n",
        "r",
        "s",
        "precedence",
        "exceedance",
        "p",
        "e",
        "t",
        "q",
        "a",
        "b",
        "v",
        "c",
        "alpha1",
        "alpha2",
        "phi",
        "decision",
        "p_value",
    ];
}

fn load_samples(args: &TestArgs) -> Result<(Sample, Sample), CliError> {
    let (x, y) = match (&args.input, &args.training, &args.test) {
        (Some(path), _, _) => input::two_columns(path, &args.training_col, &args.test_col)?,
        (None, Some(tx), Some(ty)) => (input::single_column(tx)?, input::single_column(ty)?),
        _ => {
            return Err(CliError::Parameter(
                "give either --training and --test, or --input".into(),
            ))
        }
    };
    Ok((Sample::new("training", x)?, Sample::new("test", y)?))
}

fn resolve_orders(orders: &OrderArgs, n: usize) -> Result<Vec<(usize, usize)>, CliError> {
    if let Some(rho1) = &orders.rho1 {
        let rho2 = orders.rho2.as_deref().unwrap_or(rho1);
        return Ok(vec![(order_from_rate(rho1, n)?, order_from_rate(rho2, n)?)]);
    }
    if orders.rho2.is_some() {
        return Err(CliError::Parameter("--rho2 needs --rho1".into()));
    }
    if orders.r.is_empty() {
        return Err(CliError::Parameter("give --r (and optionally --s) or --rho1".into()));
    }
    Ok(order_pairs(&orders.r, &orders.s))
}

fn test(cli: &Cli, args: &TestArgs) -> Result<Vec<u8>, CliError> {
    let (x, y) = load_samples(args)?;
    let ties = cross_sample_ties(&x, &y);
    if ties > 0 {
        eprintln!(
            "warning: {ties} training value(s) equal a test value; ties are counted with cells \
             (Y(i-1), Y(i)] on the low side and [Y(j), Y(j+1)) on the high side"
        );
    }
    let (m, n) = (x.len(), y.len());
    let mut rows = Vec::new();
    for (index, (r, s)) in resolve_orders(&args.orders, n)?.into_iter().enumerate() {
        let design = Design::new(m, n, r, s)?;
        let fv = frequency_vector(&x, &y, r, s)?;
        let stats = statistic_bundle(&x, &y, r, s)?;
        let dist = null_distribution(design)?;
        let cv = critical_value(design, cli.alpha, CriticalMethod::Exact)?;
        let mut rng = SeededRng::new(cli.seed, index as u64);
        let decision = randomized_decision(stats.t, cv.c, cli.alpha, cv.alpha1, cv.alpha2, &mut rng);
        let label = match decision.outcome {
            Outcome::Reject => "reject",
            Outcome::Accept => "accept",
            Outcome::Randomized { rejected: true, .. } => "randomized-reject",
            Outcome::Randomized { rejected: false, .. } => "randomized-accept",
        };
        rows.push(TestRow {
            m,
            n,
            r,
            s,
            precedence: join(&fv.precedence),
            exceedance: join(&fv.exceedance),
            p: stats.p,
            e: stats.e,
            t: stats.t,
            q: stats.q,
            a: stats.a,
            b: stats.b,
            v: stats.v,
            c: cv.c,
            alpha1: round4(cv.alpha1),
            alpha2: round4(cv.alpha2),
            phi: decision.phi,
            decision: label,
            p_value: rational::to_f64(&dist.upper_tail(stats.t as usize)),
        });
    }
    render(cli, TestRow::HEADER, &rows)
}

#[derive(Serialize)]
struct NullRow {
    t: usize,
    pmf: String,
    cdf: String,
}

fn null_dist(cli: &Cli, args: &NullDistArgs) -> Result<Vec<u8>, CliError> {
    let design = Design::new(args.m, args.n, args.r, args.s)?;
    let dist: NullDistribution = match args.method {
        NullMethod::Exact => null_distribution(design)?,
        NullMethod::BruteForce => brute_force_null_distribution(design)?,
    };
    let rows: Vec<NullRow> = (0..=dist.max_t())
        .map(|t| NullRow {
            t,
            pmf: rational::to_decimal(&dist.pmf(t), EXACT_DIGITS),
            cdf: rational::to_decimal(&dist.cdf(t), EXACT_DIGITS),
        })
        .collect();
    render(cli, &["t", "pmf", "cdf"], &rows)
}

#[derive(Serialize)]
struct CriticalRow {
    rho: Option<String>,
    m: usize,
    n: usize,
    r: usize,
    s: usize,
    c: usize,
    alpha1: f64,
    alpha2: f64,
}

fn critical_values(cli: &Cli, args: &CriticalArgs) -> Result<Vec<u8>, CliError> {
    let method = match args.method {
        CriticalMode::Exact => CriticalMethod::Exact,
        CriticalMode::Mc => CriticalMethod::MonteCarlo {
            reps: cli.reps,
            seed: cli.seed,
        },
    };
    let mut cells = Vec::new();
    if args.rho.is_empty() {
        for &m in &args.m {
            for &n in &args.n {
                for (r, s) in order_pairs(&args.r, &args.s) {
                    cells.push((None, Design::new(m, n, r, s)?));
                }
            }
        }
    } else {
        for rho in &args.rho {
            for &m in &args.m {
                for &n in &args.n {
                    let r = order_from_rate(rho, n)?;
                    cells.push((Some(rho.clone()), Design::new(m, n, r, r)?));
                }
            }
        }
    }
    let mut rows = Vec::with_capacity(cells.len());
    for (rho, design) in cells {
        let cv = critical_value(design, cli.alpha, method)?;
        rows.push(CriticalRow {
            rho,
            m: design.m,
            n: design.n,
            r: design.r,
            s: design.s,
            c: cv.c,
            alpha1: round4(cv.alpha1),
            alpha2: round4(cv.alpha2),
        });
    }
    render(cli, &["rho", "m", "n", "r", "s", "c", "alpha1", "alpha2"], &rows)
}

#[derive(Serialize)]
struct PowerOut {
    m: usize,
    n: usize,
    r: usize,
    s: usize,
    alternative: String,
    parameter: String,
    statistic: StatisticKind,
    method: PowerMethod,
    c: usize,
    alpha1: f64,
    alpha2: f64,
    phi: f64,
    power: f64,
    std_error: Option<f64>,
}

impl PowerOut {
    const HEADER: &'static [&'static str] = &[
        "m",
        "n",
        "r",
        "s",
        "alternative",
        "parameter",
        "statistic",
        "method",
        "c",
        "alpha1",
        "alpha2",
        "phi",
        "power",
        "std_error",
    ];
}

fn spec_for(args: &PowerArgs, value: f64) -> Result<AlternativeSpec, CliError> {
    let convention = match args.vary {
        VariedArg::Test => VariedGroup::Test,
        VariedArg::Training => VariedGroup::Training,
    };
    let spec = match args.alternative {
        Family::Lehmann => AlternativeSpec::lehmann(value)?.with_baseline(match args.baseline {
            BaselineArg::Uniform => Baseline::Uniform,
            BaselineArg::Exponential => Baseline::Exponential,
        }),
        Family::Exponential => AlternativeSpec::exponential(value)?,
        Family::Weibull => AlternativeSpec::weibull(args.shape, value)?,
    };
    Ok(spec.with_convention(convention))
}

fn power(cli: &Cli, args: &PowerArgs, default_statistics: &[StatisticKind]) -> Result<Vec<u8>, CliError> {
    let statistics: Vec<StatisticKind> = if args.statistic.is_empty() {
        default_statistics.to_vec()
    } else {
        args.statistic.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    let sizes: Vec<(usize, usize)> = if args.n.is_empty() {
        args.m.iter().map(|&m| (m, m)).collect()
    } else {
        args.m
            .iter()
            .flat_map(|&m| args.n.iter().map(move |&n| (m, n)))
            .collect()
    };
    let values = args
        .parameter
        .iter()
        .map(|text| Ok((text.clone(), rational::to_f64(&rational::parse_ratio(text)?))))
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut keys = Vec::new();
    let mut cells = Vec::new();
    for &(m, n) in &sizes {
        for (r, s) in order_pairs(&args.r, &args.s) {
            let design = Design::new(m, n, r, s)?;
            for &statistic in &statistics {
                for (label, value) in &values {
                    keys.push(label.clone());
                    cells.push(ExperimentCell {
                        design,
                        spec: spec_for(args, *value)?,
                        statistic,
                    });
                }
            }
        }
    }

    let rows: Vec<PowerOut> = match args.method {
        PowerMethod::Mc => table_experiment(&cells, cli.alpha, cli.reps, cli.seed)?
            .into_iter()
            .zip(&keys)
            .map(|(row, label)| PowerOut {
                m: row.m,
                n: row.n,
                r: row.r,
                s: row.s,
                alternative: row.alternative,
                parameter: label.clone(),
                statistic: row.statistic,
                method: PowerMethod::Mc,
                c: row.c,
                alpha1: round4(row.alpha1),
                alpha2: round4(row.alpha2),
                phi: row.phi,
                power: row.power,
                std_error: Some(row.std_error),
            })
            .collect(),
        PowerMethod::Exact => {
            if args.alternative != Family::Lehmann || statistics.iter().any(|&s| s != StatisticKind::T) {
                return Err(CliError::Parameter(
                    "the exact method covers the T statistic under Lehmann alternatives only".into(),
                ));
            }
            let mut rows = Vec::with_capacity(cells.len());
            for (cell, label) in cells.iter().zip(&keys) {
                let cv = critical_value(cell.design, cli.alpha, CriticalMethod::Exact)?;
                let params = LehmannParams::parse(label)?;
                let power = exact_power_with_budget(cell.design, &params, cli.alpha, args.budget)?;
                let Design { m, n, r, s } = cell.design;
                rows.push(PowerOut {
                    m,
                    n,
                    r,
                    s,
                    alternative: cell.spec.label(),
                    parameter: label.clone(),
                    statistic: cell.statistic,
                    method: PowerMethod::Exact,
                    c: cv.c,
                    alpha1: round4(cv.alpha1),
                    alpha2: round4(cv.alpha2),
                    phi: cv.phi(cli.alpha),
                    power,
                    std_error: None,
                });
            }
            rows
        }
    };

    if let Some(dir) = &args.curves_dir {
        write_curves(dir, args.alternative, &rows)?;
    }
    render(cli, PowerOut::HEADER, &rows)
}

/// One `parameter,power` file per design and statistic.
fn write_curves(dir: &Path, family: Family, rows: &[PowerOut]) -> Result<(), CliError> {
    #[derive(Serialize)]
    struct Point<'a> {
        parameter: &'a str,
        power: f64,
    }
    let column = match family {
        Family::Lehmann => "gamma",
        Family::Exponential => "rate",
        Family::Weibull => "scale",
    };
    let mut curves: BTreeMap<String, Vec<Point>> = BTreeMap::new();
    for row in rows {
        let name = format!(
            "curve_m{}_n{}_r{}_s{}_{}.csv",
            row.m, row.n, row.r, row.s, row.statistic
        );
        curves.entry(name).or_default().push(Point {
            parameter: &row.parameter,
            power: row.power,
        });
    }
    std::fs::create_dir_all(dir).map_err(|e| CliError::Write(format!("{}: {e}", dir.display())))?;
    for (name, points) in curves {
        let path = dir.join(name);
        let bytes = csv_bytes(&[column, "power"], &points)?;
        std::fs::write(&path, bytes).map_err(|e| CliError::Write(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}
