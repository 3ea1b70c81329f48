//! Command execution: validate, compute everything in memory, then write.

use std::path::PathBuf;

use mvmfdr::pattern::{
    beam_pattern_family, design, run_trial, theta_grid, BeamPattern, ComparisonReport, Method, Normalization,
};
use mvmfdr::scenario::trial_covariance;
use mvmfdr::{monte_carlo_compare, CovarianceSource, Scenario};
use rayon::prelude::*;

use crate::config::{CovarianceChoice, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{self, check_writable, sibling, MethodPatterns};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Design both beamformers and write their weights.
    Solve,
    /// Beam patterns of both designs at the pattern frequencies.
    Pattern,
    /// Absolute gain toward the signal across the dense in-band sweep.
    Sweep,
    /// Monte Carlo comparison report (sample covariance by default).
    Montecarlo,
    /// Patterns to --out, plus sibling .report and .weights files.
    Compare,
}

impl Command {
    fn default_covariance(self) -> CovarianceChoice {
        match self {
            Command::Montecarlo => CovarianceChoice::Sample,
            _ => CovarianceChoice::Ideal,
        }
    }
}

/// Monte Carlo comparison with trials spread over the rayon pool.
///
/// Results are collected by trial index and reduced in that order, so the
/// report does not depend on scheduling. The lowest failing index is reported.
pub fn parallel_monte_carlo(scn: &Scenario, source: CovarianceSource) -> CliResult<ComparisonReport> {
    scn.validate()?;
    if source == CovarianceSource::Ideal {
        return Ok(monte_carlo_compare(scn, source)?);
    }
    let trials = (0..scn.num_trials as u64)
        .into_par_iter()
        .map(|i| run_trial(scn, source, i))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ComparisonReport::from_trials(scn, &trials)?)
}

fn families(
    cfg: &RunConfig,
    d: &mvmfdr::pattern::Design,
    freqs: &[f64],
    grid: &[f64],
    norm: Normalization,
) -> CliResult<Vec<(Method, Vec<BeamPattern>)>> {
    Method::ALL
        .iter()
        .map(|&m| {
            Ok((
                m,
                beam_pattern_family(d.get(m), &cfg.scenario.geometry, freqs, grid, norm)?,
            ))
        })
        .collect()
}

fn pattern_file(fams: &[(Method, Vec<BeamPattern>)], cfg: &RunConfig) -> CliResult<Vec<u8>> {
    let views: Vec<MethodPatterns<'_>> = fams
        .iter()
        .map(|(m, p)| MethodPatterns {
            method: *m,
            patterns: p,
        })
        .collect();
    output::patterns_bytes(&views, cfg.format)
}

/// Runs `cmd` and returns the files written.
pub fn run(cmd: Command, cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let scn = &cfg.scenario;
    scn.validate()?;
    let out = cfg
        .output_path
        .clone()
        .ok_or_else(|| CliError::invalid("output_path", "no output path: pass --out or set run.output"))?;
    let targets: Vec<PathBuf> = match cmd {
        Command::Compare => vec![out.clone(), sibling(&out, "report"), sibling(&out, "weights")],
        _ => vec![out.clone()],
    };
    for t in &targets {
        check_writable(t)?;
    }

    let source: CovarianceSource = cfg.covariance.unwrap_or(cmd.default_covariance()).into();
    let single_shot = || -> CliResult<mvmfdr::pattern::Design> {
        let r = trial_covariance(scn, source, 0)?;
        Ok(design(scn, &r)?)
    };
    let grid = theta_grid(&scn.geometry, cfg.theta_points);

    let files: Vec<Vec<u8>> = match cmd {
        Command::Solve => {
            let d = single_shot()?;
            vec![output::weights_bytes(
                &[(Method::Mvdr, &d.mvdr), (Method::Mvmfdr, &d.mvmfdr)],
                cfg.format,
            )?]
        }
        Command::Pattern => {
            let d = single_shot()?;
            vec![pattern_file(
                &families(cfg, &d, &cfg.pattern_freqs_hz, &grid, cfg.normalization)?,
                cfg,
            )?]
        }
        Command::Sweep => {
            let d = single_shot()?;
            let fams = Method::ALL
                .iter()
                .map(|&m| {
                    let pats = scn
                        .sweep_freqs_hz()
                        .into_iter()
                        .map(|f| {
                            Ok(beam_pattern_family(
                                d.get(m),
                                &scn.geometry,
                                &[f],
                                &[scn.soi_doa_rad],
                                Normalization::None,
                            )?
                            .remove(0))
                        })
                        .collect::<CliResult<Vec<_>>>()?;
                    Ok((m, pats))
                })
                .collect::<CliResult<Vec<_>>>()?;
            vec![pattern_file(&fams, cfg)?]
        }
        Command::Montecarlo => vec![output::report_bytes(&parallel_monte_carlo(scn, source)?, cfg.format)?],
        Command::Compare => {
            let d = single_shot()?;
            let patterns = pattern_file(
                &families(cfg, &d, &cfg.pattern_freqs_hz, &grid, cfg.normalization)?,
                cfg,
            )?;
            let report = output::report_bytes(&parallel_monte_carlo(scn, source)?, cfg.format)?;
            let weights = output::weights_bytes(&[(Method::Mvdr, &d.mvdr), (Method::Mvmfdr, &d.mvmfdr)], cfg.format)?;
            vec![patterns, report, weights]
        }
    };
    let pairs: Vec<(PathBuf, Vec<u8>)> = targets.iter().cloned().zip(files).collect();
    output::write_all(&pairs)?;
    Ok(targets)
}
