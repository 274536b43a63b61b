//! Parallel drivers over the core routines. Work is split by index, results
//! are collected in index order and reduced sequentially, so output does not
//! depend on thread scheduling.

use netbell_core::certify::{
    correspondence_trial, correspondence_trial_with_states, CorrespondenceReport, Family, ScanSettings,
};
use netbell_core::classical::{
    enumerate_range, enumeration_size, merge_ranges, sample_trial, DeterministicStrategy,
};
use netbell_core::functional::Functional;
use netbell_core::optimize::{
    seesaw_restart, seesaw_restart_with_states, select_best, OptimizationResult, SeesawConfig,
};
use netbell_core::rng::derive_seed;
use netbell_core::states::QuantumState;
use netbell_core::Result;
use rayon::prelude::*;

/// Number of chunks the pruned strategy range is cut into.
const ENUMERATION_CHUNKS: u64 = 256;

pub fn enumerate_max(f: &Functional) -> Result<(f64, DeterministicStrategy)> {
    let size = enumeration_size(f)?;
    let chunks = ENUMERATION_CHUNKS.min(size);
    let parts: Vec<_> = (0..chunks)
        .into_par_iter()
        .map(|c| enumerate_range(f, c * size / chunks, (c + 1) * size / chunks))
        .collect();
    Ok(merge_ranges(parts).expect("search space is nonempty"))
}

/// Maximum over `trials` random n-local models and the trial attaining it.
pub fn sample_max(f: &Functional, trials: usize, support: usize, seed: u64) -> Result<(f64, usize)> {
    let values = (0..trials)
        .into_par_iter()
        .map(|t| sample_trial(f, support, derive_seed(seed, t as u64)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(values
        .iter()
        .enumerate()
        .fold((f64::NEG_INFINITY, 0), |(bv, bi), (i, v)| if *v > bv { (*v, i) } else { (bv, bi) }))
}

pub fn seesaw_best(f: &Functional, cfg: &SeesawConfig) -> Result<OptimizationResult> {
    cfg.validate()?;
    let results = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| seesaw_restart(f, cfg, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(results).expect("at least one restart"))
}

pub fn seesaw_best_with_states(f: &Functional, states: &[QuantumState], cfg: &SeesawConfig) -> Result<OptimizationResult> {
    cfg.validate()?;
    let results = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| seesaw_restart_with_states(f, states, cfg, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(select_best(results).expect("at least one restart"))
}

/// Random-source scan; trial `t` uses seed `derive_seed(seed, t)`. With
/// `fixed` every trial uses the given states instead.
pub fn correspondence(
    family: Family,
    trials: usize,
    seed: u64,
    settings: &ScanSettings,
    fixed: Option<&[QuantumState]>,
) -> Result<CorrespondenceReport> {
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = derive_seed(seed, t as u64);
            match fixed {
                Some(states) => correspondence_trial_with_states(family, states, s, settings),
                None => correspondence_trial(family, s, settings),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrespondenceReport::from_trials(family, seed, settings.clone(), rows))
}
