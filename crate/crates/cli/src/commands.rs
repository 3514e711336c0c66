//! One function per subcommand. Each reads what it needs through the
//! config, runs the corresponding core operation, and writes the documented
//! output files into the output directory, every file opening with the
//! metadata header line.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use plantsis::abc::{
    self, AbcContext, McmcConfig, McmcSampler, PosteriorDraw, Prior, RejectionResult,
};
use plantsis::diagnostics::{self, PosteriorReport};
use plantsis::forecast::{self, Scenario, SeasonMode};
use plantsis::net::{self, Network, NodeId, ObservationSeries};
use plantsis::nodeset::NodeSet;
use plantsis::sis::{ParamSet, Simulator, PARAM_NAMES};
use plantsis::validate as validation;
use plantsis::{Error, Result};

use crate::config::RunConfig;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))
}

/// Writes `body` under the metadata header line.
fn write_output(cfg: &RunConfig, name: &str, body: &str) -> Result<PathBuf> {
    let path = cfg.paths.out_dir.join(name);
    fs::create_dir_all(&cfg.paths.out_dir)?;
    fs::write(&path, format!("{}\n{body}", cfg.header()))?;
    Ok(path)
}

fn load_network(cfg: &RunConfig) -> Result<Network> {
    let edges = net::parse_edges(&read(&cfg.paths.edges)?)?;
    let nodes = net::parse_node_metadata(&read(&cfg.paths.nodes)?)?;
    let mut network = Network::from_records(&edges, &nodes)?;
    if let Some(footprints) = &cfg.paths.footprints {
        network.attach_footprints(net::parse_footprints(&read(footprints)?)?)?;
    }
    Ok(network)
}

fn load_series(cfg: &RunConfig, network: &Network) -> Result<ObservationSeries> {
    let path = cfg.paths.snapshots.as_ref().ok_or_else(|| {
        Error::InvalidInput("this command needs paths.snapshots in the config".into())
    })?;
    ObservationSeries::parse_matrix(&read(path)?, Some(network.node_count()))
}

fn load_draws(cfg: &RunConfig, override_path: &Option<PathBuf>) -> Result<Vec<PosteriorDraw>> {
    let default = cfg.paths.out_dir.join("draws.csv");
    let path = override_path.as_ref().unwrap_or(&default);
    let draws = abc::parse_draws_csv(&read(path)?)?;
    if draws.is_empty() {
        return Err(Error::Data(format!("no draws in {}", path.display())));
    }
    Ok(draws)
}

fn prior(cfg: &RunConfig) -> Result<Prior> {
    match &cfg.prior {
        Some(p) => Prior::new(p.lower, p.upper),
        None => Ok(Prior::unit()),
    }
}

fn section<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T> {
    section
        .as_ref()
        .ok_or_else(|| Error::InvalidInput(format!("config is missing the [{name}] section")))
}

pub fn simulate(cfg: &RunConfig) -> Result<()> {
    let sim_cfg = section(&cfg.simulate, "simulate")?;
    let network = load_network(cfg)?;
    let params = ParamSet::from_array(sim_cfg.params)?;
    let initial = NodeSet::from_indices(network.node_count(), sim_cfg.initial.iter().copied());
    let seed = cfg.master_seed()?;
    let sim = Simulator::new(&network, params);
    let mut rng = plantsis::rng::task_rng(seed, 0);
    let trajectory = sim.simulate(&initial, sim_cfg.start_month, sim_cfg.horizon, &mut rng)?;
    let path = write_output(cfg, "trajectory.csv", &trajectory.to_matrix_string())?;
    let final_infected = trajectory.snapshot(trajectory.snapshot_count() - 1).len();
    println!(
        "simulated {} months from {}: final infected {final_infected} of {} -> {}",
        sim_cfg.horizon,
        sim_cfg.start_month,
        network.node_count(),
        path.display()
    );
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum InferMode {
    Rejection,
    Mcmc,
}

pub fn infer(cfg: &RunConfig, mode: InferMode) -> Result<()> {
    let network = load_network(cfg)?;
    let series = load_series(cfg, &network)?;
    let ctx = AbcContext::new(&network, &series)?;
    let prior = prior(cfg)?;
    let seed = cfg.master_seed()?;
    let started = Instant::now();
    let (draws, report) = match mode {
        InferMode::Rejection => {
            let rej = section(&cfg.rejection, "rejection")?;
            let RejectionResult { draws, attempted, acceptance_rate } =
                abc::rejection_sample(&ctx, &prior, rej.attempts, rej.epsilon, seed)?;
            let report = format!(
                "mode: rejection\nattempts: {attempted}\nepsilon: {}\naccepted: {}\nacceptance_rate: {acceptance_rate}\n",
                rej.epsilon,
                draws.len(),
            );
            (draws, report)
        }
        InferMode::Mcmc => {
            let defaults = McmcConfig::default();
            let m = cfg.mcmc.clone().unwrap_or_default();
            let mcmc_cfg = McmcConfig {
                iterations: m.iterations.unwrap_or(defaults.iterations),
                burn_in: m.burn_in.unwrap_or(defaults.burn_in),
                thin: m.thin.unwrap_or(defaults.thin),
                epsilon: m.epsilon.unwrap_or(defaults.epsilon),
                proposal_sd: m.proposal_sd.unwrap_or(defaults.proposal_sd),
                master_seed: seed,
            };
            // Stream the chain and retain on the fly; a full-scale chain is
            // far too large to collect.
            let mut sampler = McmcSampler::new(&ctx, &prior, &mcmc_cfg)?;
            let mut retained = Vec::new();
            let (burn_in, thin) = (mcmc_cfg.burn_in, mcmc_cfg.thin);
            for draw in &mut sampler {
                if draw.iteration >= burn_in && (draw.iteration - burn_in) % thin == 0 {
                    retained.push(draw);
                }
            }
            let report = format!(
                "mode: mcmc\niterations: {}\nburn_in: {}\nthin: {}\nepsilon: {}\nretained: {}\nproposal_acceptance_rate: {}\n",
                mcmc_cfg.iterations,
                mcmc_cfg.burn_in,
                mcmc_cfg.thin,
                mcmc_cfg.epsilon,
                retained.len(),
                sampler.acceptance_rate(),
            );
            (retained, report)
        }
    };
    let path = write_output(cfg, "draws.csv", &abc::draws_to_csv(&draws))?;
    let wall = started.elapsed().as_secs_f64();
    write_output(
        cfg,
        "infer_report.txt",
        &format!("{report}seed: {seed}\nwall_time_seconds: {wall:.3}\n"),
    )?;
    println!("wrote {} draws -> {}", draws.len(), path.display());
    Ok(())
}

pub fn pilot(cfg: &RunConfig) -> Result<()> {
    let network = load_network(cfg)?;
    let series = load_series(cfg, &network)?;
    let ctx = AbcContext::new(&network, &series)?;
    let prior = prior(cfg)?;
    let pilot_cfg = section(&cfg.pilot, "pilot")?;
    let seed = cfg.master_seed()?;
    let rhos = abc::pilot_discrepancies(&ctx, &prior, pilot_cfg.attempts, seed)?;
    let mut body = String::from("attempt,discrepancy\n");
    for (i, rho) in rhos.iter().enumerate() {
        body.push_str(&format!("{i},{rho}\n"));
    }
    write_output(cfg, "pilot.csv", &body)?;
    let mut sorted = rhos.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let default_quantiles = vec![0.001, 0.01, 0.05, 0.1];
    let quantiles = pilot_cfg.quantiles.as_ref().unwrap_or(&default_quantiles);
    let mut report = format!("attempts: {}\nseed: {seed}\n", rhos.len());
    for &q in quantiles {
        let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        report.push_str(&format!("q{q}: {}\n", sorted[rank - 1]));
    }
    let path = write_output(cfg, "pilot_report.txt", &report)?;
    println!("pilot of {} attempts -> {}", rhos.len(), path.display());
    Ok(())
}

fn report_block(report: &PosteriorReport) -> String {
    diagnostics::report_to_text(report)
}

pub fn diagnose(cfg: &RunConfig) -> Result<()> {
    let diag = section(&cfg.diagnose, "diagnose")?;
    let draws = load_draws(cfg, &diag.draws)?;
    let prior = prior(cfg)?;

    let report = diagnostics::posterior_summary(&draws)?;
    write_output(cfg, "posterior_summary.txt", &report_block(&report))?;

    // Mixing diagnostics per parameter; a constant marginal has no defined
    // autocorrelation and is reported as NaN rather than failing the run.
    let mut ess = String::from("parameter,ess,lag1_autocorrelation\n");
    let max_lag = diag.max_lag.unwrap_or(50);
    for (p, name) in PARAM_NAMES.iter().enumerate() {
        let series: Vec<f64> = draws.iter().map(|d| d.params.to_array()[p]).collect();
        let lag1 = diagnostics::autocorrelation(&series, max_lag.min(series.len() - 1))
            .map(|acf| acf.get(1).copied().unwrap_or(f64::NAN))
            .unwrap_or(f64::NAN);
        let ess_value = diagnostics::effective_sample_size(&series).unwrap_or(f64::NAN);
        ess.push_str(&format!("{name},{ess_value},{lag1}\n"));
    }
    write_output(cfg, "ess.csv", &ess)?;

    let bins = diag.bins.unwrap_or(25);
    let grid = diagnostics::pairwise_density_grid(&draws, bins, &prior)?;
    let mut marginals = String::from("parameter,bin,mass\n");
    for (p, histogram) in grid.marginals.iter().enumerate() {
        for (b, mass) in histogram.iter().enumerate() {
            marginals.push_str(&format!("{},{b},{mass}\n", PARAM_NAMES[p]));
        }
    }
    write_output(cfg, "marginals.csv", &marginals)?;
    let mut pairwise = String::from("param_i,param_j,bin_i,bin_j,mass\n");
    for panel in &grid.pairwise {
        for bi in 0..bins {
            for bj in 0..bins {
                pairwise.push_str(&format!(
                    "{},{},{bi},{bj},{}\n",
                    PARAM_NAMES[panel.param_i],
                    PARAM_NAMES[panel.param_j],
                    panel.mass[bi * bins + bj]
                ));
            }
        }
    }
    write_output(cfg, "pairwise.csv", &pairwise)?;

    if let Some(epsilons) = &diag.epsilons {
        let generation = diag.generation_epsilon.ok_or_else(|| {
            Error::InvalidInput("[diagnose] epsilons needs generation_epsilon".into())
        })?;
        let rows = diagnostics::tolerance_sensitivity(&draws, epsilons, generation)?;
        let mut table = format!(
            "epsilon,retained,{}\n",
            PARAM_NAMES.iter().map(|n| format!("{n}_mean")).collect::<Vec<_>>().join(",")
        );
        for row in rows {
            table.push_str(&format!("{},{}", row.epsilon, row.retained));
            match row.report {
                Some(report) => {
                    for stat in &report.params {
                        table.push_str(&format!(",{}", stat.mean));
                    }
                }
                None => table.push_str(&",".repeat(6)),
            }
            table.push('\n');
        }
        write_output(cfg, "tolerance.csv", &table)?;
    }
    println!("diagnostics for {} draws -> {}", draws.len(), cfg.paths.out_dir.display());
    Ok(())
}

pub fn filter(cfg: &RunConfig) -> Result<()> {
    let filter_cfg = section(&cfg.filter, "filter")?;
    let draws = load_draws(cfg, &filter_cfg.draws)?;
    let kept = abc::threshold_filter(&draws, filter_cfg.epsilon, filter_cfg.generation_epsilon)?;
    let path = write_output(cfg, "filtered.csv", &abc::draws_to_csv(&kept))?;
    println!(
        "kept {} of {} draws at ε′={} -> {}",
        kept.len(),
        draws.len(),
        filter_cfg.epsilon,
        path.display()
    );
    Ok(())
}

pub fn forecast(cfg: &RunConfig) -> Result<()> {
    let fc_cfg = section(&cfg.forecast, "forecast")?;
    let network = load_network(cfg)?;
    let series = load_series(cfg, &network)?;
    let draws = load_draws(cfg, &fc_cfg.draws)?;
    let params: Vec<ParamSet> = draws.iter().map(|d| d.params).collect();
    let seed = cfg.master_seed()?;
    let last = series.snapshot_count() - 1;
    let season_mode: SeasonMode = fc_cfg.season_mode.as_deref().unwrap_or("calendar").parse()?;
    let scenario = Scenario {
        season_mode,
        cleared_nodes: fc_cfg.cleared.clone().unwrap_or_default().into_iter().map(NodeId).collect(),
        horizon: fc_cfg.horizon.unwrap_or(6),
        start_month: fc_cfg.start_month.unwrap_or(series.months()[last]),
        initial: series.snapshot(last).clone(),
    };
    let replicates = fc_cfg.replicates.unwrap_or(forecast::DEFAULT_REPLICATES);
    let result = forecast::posterior_forecast(&network, &params, &scenario, replicates, seed)?;
    let path = write_output(cfg, "forecast.csv", &forecast::forecast_to_csv(&result))?;
    let mut report = format!(
        "season_mode: {season_mode}\nhorizon: {}\nstart_month: {}\ncleared: {}\nreplicates: {replicates}\nposterior_draws: {}\nseed: {seed}\nsteady_state_mean: {}\n",
        scenario.horizon,
        scenario.start_month,
        scenario.cleared_nodes.len(),
        params.len(),
        forecast::steady_state_mean(&result),
    );
    if fc_cfg.compare_with_baseline.unwrap_or(false) {
        let baseline_scenario = Scenario {
            season_mode: SeasonMode::Calendar,
            cleared_nodes: vec![],
            ..scenario.clone()
        };
        let baseline =
            forecast::posterior_forecast(&network, &params, &baseline_scenario, replicates, seed)?;
        let cmp = forecast::compare_scenarios(&baseline, &result)?;
        let mut delta = String::from("node,month_label,delta\n");
        for (node, row) in cmp.delta.iter().enumerate() {
            for (t, d) in row.iter().enumerate() {
                delta.push_str(&format!("{node},{},{d}\n", cmp.months[t]));
            }
        }
        write_output(cfg, "scenario_delta.csv", &delta)?;
        report.push_str("mean_delta_by_month:");
        for (month, d) in cmp.months.iter().zip(&cmp.mean_delta) {
            report.push_str(&format!(" {month}={d}"));
        }
        report.push('\n');
    }
    write_output(cfg, "forecast_report.txt", &report)?;
    println!(
        "forecast of {} months x {} nodes -> {}",
        scenario.horizon,
        network.node_count(),
        path.display()
    );
    Ok(())
}

pub fn validate(cfg: &RunConfig) -> Result<()> {
    let val_cfg = section(&cfg.validate, "validate")?;
    let network = load_network(cfg)?;
    let series =
        ObservationSeries::parse_matrix(&read(&val_cfg.snapshots)?, Some(network.node_count()))?;
    let draws = load_draws(cfg, &val_cfg.draws)?;
    let params: Vec<ParamSet> = draws.iter().map(|d| d.params).collect();
    let seed = cfg.master_seed()?;
    let holdout = val_cfg.holdout_months.unwrap_or(7);
    let replicates = val_cfg.replicates.unwrap_or(10_000);
    let report =
        validation::predictive_check(&network, &params, &series, holdout, replicates, seed)?;
    write_output(cfg, "records.csv", &validation::records_to_csv(&report.records))?;
    let curve = validation::roc_curve(&report.records)?;
    write_output(cfg, "roc.csv", &validation::roc_to_csv(&curve))?;
    let mut per_node = String::from("node,mean_loss\n");
    for (node, loss) in &report.per_node {
        per_node.push_str(&format!("{},{loss}\n", node.0));
    }
    write_output(cfg, "per_node_loss.csv", &per_node)?;
    let summary = format!(
        "holdout_months: {holdout}\nreplicates: {replicates}\nrecords: {}\nmean_loss: {}\nrandom_baseline: {}\nauc: {}\nclamp_delta: {}\nseed: {seed}\n",
        report.records.len(),
        report.mean_loss,
        report.baseline,
        curve.auc,
        report.clamp_delta,
    );
    let path = write_output(cfg, "validate_report.txt", &summary)?;
    println!(
        "validated {holdout} hold-out months: mean loss {:.4} (baseline {:.4}), AUC {:.4} -> {}",
        report.mean_loss,
        report.baseline,
        curve.auc,
        path.display()
    );
    Ok(())
}

pub fn bin(cfg: &RunConfig) -> Result<()> {
    let bin_cfg = section(&cfg.bin, "bin")?;
    let network = load_network(cfg)?;
    let points_path = cfg.paths.points.as_ref().ok_or_else(|| {
        Error::InvalidInput("the bin command needs paths.points in the config".into())
    })?;
    let points = net::parse_points(&read(points_path)?)?;
    let binned = net::bin_points(&points, &network, bin_cfg.snapshots, bin_cfg.start_month)?;
    let path = write_output(cfg, "binned_snapshots.csv", &binned.series.to_matrix_string())?;
    let mut rejects = String::from("x,y,snapshot_index\n");
    for p in &binned.rejects {
        rejects.push_str(&format!("{},{},{}\n", p.x, p.y, p.snapshot_index));
    }
    write_output(cfg, "bin_rejects.csv", &rejects)?;
    println!(
        "binned {} points into {} snapshots ({} rejected) -> {}",
        points.len(),
        bin_cfg.snapshots,
        binned.rejects.len(),
        path.display()
    );
    Ok(())
}

pub fn net_stats(cfg: &RunConfig) -> Result<()> {
    let network = load_network(cfg)?;
    let planted =
        (0..network.node_count()).filter(|&n| network.is_planted(NodeId(n as u32))).count();
    let mut body = format!(
        "nodes: {}\nedges: {}\nplanted: {planted}\nmax_degree: {}\nfootprints: {}\ndegree_histogram:\n",
        network.node_count(),
        network.edge_count(),
        network.max_degree(),
        if network.has_all_footprints() { "complete" } else { "absent or partial" },
    );
    for (degree, count) in network.degree_histogram() {
        body.push_str(&format!("{degree},{count}\n"));
    }
    let path = write_output(cfg, "net_stats.txt", &body)?;
    println!(
        "{} nodes, {} edges -> {}",
        network.node_count(),
        network.edge_count(),
        path.display()
    );
    Ok(())
}

/// Applies command-line overrides onto the loaded config.
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

pub fn apply_overrides(cfg: &mut RunConfig, overrides: &Overrides) {
    if let Some(seed) = overrides.seed {
        cfg.master_seed = Some(seed);
    }
    if let Some(workers) = overrides.workers {
        cfg.worker_count = Some(workers);
    }
    if let Some(out_dir) = &overrides.out_dir {
        cfg.paths.out_dir = out_dir.clone();
    }
}
