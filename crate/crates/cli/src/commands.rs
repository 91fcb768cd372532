use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Duration;

use serde_json::{json, Value};

use mrps::assignment::{average_cost, solve, BinAssignment, CostModel, GaParams, SolveOptions, Solver};
use mrps::bench::{run_experiment, write_outputs, ExperimentSpec};
use mrps::gridworld::{generate_map, load_map, save_map, StationPlacement, TypeDistribution, WarehouseMap};
use mrps::planner::PlannerMode;
use mrps::roadnet::orient;
use mrps::seed::{derive_seed, SeedSet};
use mrps::simulator::{run, write_trace, SimConfig};

use crate::args::{AssignArgs, BenchmarkArgs, GenDistArgs, GenMapArgs, SimulateArgs};
use crate::error::CliError;
use crate::outdir::OutDir;

pub struct Context {
    pub out: OutDir,
    pub global_seed: Option<u64>,
}

impl Context {
    /// The subcommand's own seed, else one derived from the global seed,
    /// else 0.
    fn seed(&self, local: Option<u64>, tag: &str) -> u64 {
        local
            .or_else(|| self.global_seed.map(|g| derive_seed(g, tag)))
            .unwrap_or(0)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))
}

fn read_map(path: &Path) -> Result<WarehouseMap, CliError> {
    load_map(&read(path)?).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

fn read_dist(path: &Path, map: &WarehouseMap) -> Result<TypeDistribution, CliError> {
    let dist = TypeDistribution::parse(&read(path)?).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    dist.validate_for(map)
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    Ok(dist)
}

/// Accepts an `assign` report, a JSON array, or whitespace-separated
/// integers; all hold 1-based types.
fn read_assignment(path: &Path, n_types: usize) -> Result<BinAssignment, CliError> {
    let text = read(path)?;
    let bad = |m: String| CliError::invalid(format!("{}: {m}", path.display()));
    let labels: Vec<usize> = match serde_json::from_str::<Value>(&text) {
        Ok(v) => {
            let list = v.get("assignment").unwrap_or(&v);
            serde_json::from_value(list.clone()).map_err(|e| bad(format!("expected a list of bin types: {e}")))?
        }
        Err(_) => text
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad(format!("`{t}` is not a bin type"))))
            .collect::<Result<_, _>>()?,
    };
    BinAssignment::from_one_based(&labels, n_types).map_err(|e| bad(e.to_string()))
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s.into_bytes()
}

pub fn gen_map(ctx: &Context, a: &GenMapArgs) -> Result<(), CliError> {
    let map = Arc::new(generate_map(a.block_rows, a.block_cols, &StationPlacement::Count(a.stations))?);
    let written = ctx.out.write(&a.out, save_map(&map).as_bytes())?;
    println!(
        "map {}x{} with {} bins and {} stations -> {}",
        map.rows(),
        map.cols(),
        map.bins().len(),
        map.stations().len(),
        written.display()
    );
    if let Some(arrows) = &a.arrows {
        let net = orient(&map)?;
        ctx.out.write(arrows, net.dump_arrows().as_bytes())?;
    }
    Ok(())
}

pub fn gen_dist(ctx: &Context, a: &GenDistArgs) -> Result<(), CliError> {
    let map = read_map(&a.map)?;
    if a.types == 0 || a.types > map.bins().len() {
        return Err(CliError::invalid(format!(
            "--types must be between 1 and the {} bins of the map",
            map.bins().len()
        )));
    }
    let dist = if a.uniform {
        TypeDistribution::uniform(map.stations().len(), a.types)
    } else {
        let seed = ctx.seed(a.seed, "gen-dist");
        println!("seed {seed}");
        TypeDistribution::dirichlet(map.stations().len(), a.types, seed)
    };
    let written = ctx.out.write(&a.out, dist.to_text().as_bytes())?;
    println!("distribution -> {}", written.display());
    Ok(())
}

pub fn assign(ctx: &Context, a: &AssignArgs) -> Result<(), CliError> {
    let solver: Solver = a.solver.parse()?;
    if let Some(t) = a.time_limit {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::invalid("--time-limit must be a positive number of seconds"));
        }
    }
    let map = read_map(&a.map)?;
    let dist = read_dist(&a.dist, &map)?;
    let cost = CostModel::from_map(&map, &dist)?;
    let seed = ctx.seed(a.seed, "assign");
    println!("seed {seed}");
    let opts = SolveOptions {
        seed,
        ga: GaParams {
            iterations: a.ga_iters,
            population: a.ga_pop,
            mutation_rate: a.ga_mutation,
        },
        time_limit: a.time_limit.map(Duration::from_secs_f64),
    };
    let (assignment, optimal) = solve(&cost, solver, &opts)?;
    let value = average_cost(&assignment, &cost)?;
    let report = json!({
        "solver": solver.name(),
        "seed": seed,
        "cost": value,
        "optimal": optimal,
        "n_types": assignment.n_types(),
        "assignment": assignment.to_one_based(),
    });
    let written = ctx.out.write(&a.out, &pretty(&report))?;
    if !optimal {
        println!("time limit reached; reporting the best assignment found");
    }
    println!("{solver} cost {value:.6} -> {}", written.display());
    Ok(())
}

pub fn simulate(ctx: &Context, a: &SimulateArgs) -> Result<(), CliError> {
    let mode = PlannerMode::from_name(&a.planner, a.focal_w)
        .ok_or_else(|| CliError::invalid(format!("unknown planner `{}`", a.planner)))?;
    // Resolve outputs first so a bad path fails before the run.
    ctx.out.resolve(&a.out)?;
    if let Some(t) = &a.trace {
        ctx.out.resolve(t)?;
    }
    let map = Arc::new(read_map(&a.map)?);
    let dist = read_dist(&a.dist, &map)?;
    let assignment = read_assignment(&a.assignment, dist.n_types())?;
    let net = Arc::new(orient(&map)?);
    let seed = ctx.seed(a.seed, "simulate");
    let seeds = SeedSet::from_global(seed);
    println!(
        "seed {seed} (parcel {}, planner {}, placement {})",
        seeds.parcel, seeds.planner, seeds.placement
    );
    let mut config = SimConfig::new(net, dist, assignment, a.robots, a.steps)
        .with_mode(mode)
        .with_trace(a.trace.is_some());
    config.seeds = seeds;
    config.warmup = a.warmup;
    let report = run(&config)?;
    let doc = json!({
        "planner": mode.name(),
        "focal_w": matches!(mode, PlannerMode::Focal { .. }).then_some(a.focal_w),
        "seed": seed,
        "seeds": seeds,
        "metrics": report.metrics,
        "timing": report.timing,
    });
    let written = ctx.out.write(&a.out, &pretty(&doc))?;
    if let (Some(path), Some(rows)) = (&a.trace, &report.trace) {
        let mut buf = Vec::new();
        write_trace(rows, &mut buf).map_err(|e| CliError::Runtime(e.to_string()))?;
        ctx.out.write(path, &buf)?;
    }
    println!(
        "{} deliveries in {} steps, throughput {:.4} -> {}",
        report.metrics.deliveries,
        a.steps,
        report.metrics.throughput,
        written.display()
    );
    Ok(())
}

pub fn benchmark(ctx: &Context, a: &BenchmarkArgs) -> Result<(), CliError> {
    let mut spec = match ExperimentSpec::preset(&a.experiment) {
        Some(s) => s,
        None if a.experiment.ends_with(".json") => ExperimentSpec::from_json(&read(Path::new(&a.experiment))?)?,
        None => {
            return Err(CliError::invalid(format!(
                "unknown experiment `{}`; use one of {} or a .json file",
                a.experiment,
                ExperimentSpec::PRESETS.join(", ")
            )))
        }
    };
    if let Some(n) = a.seeds {
        spec.seeds = n;
    }
    if let Some(g) = ctx.global_seed {
        spec.base_seed = derive_seed(g, "benchmark");
    }
    spec.validate()?;
    println!("base seed {} with {} seeds per point", spec.base_seed, spec.seeds);
    let table = run_experiment(&spec)?;
    for path in write_outputs(&spec, &table, env!("MRPS_COMMIT"), ctx.out.root())? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
