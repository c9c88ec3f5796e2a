//! Stability and uniqueness experiments for the multi-term model.

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::forward::{OrderSpectrum, Scenario, TimeOperator};

/// Margin that keeps perturbation families away from the edge of the admissible set.
const MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzEntry {
    pub index: usize,
    /// ‖u[α,p] − u[β,q]‖_{L²(0,T)} at the sensor.
    pub distance: f64,
    /// Σ_j |α_j − β_j| + |p_j − q_j|.
    pub gap: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LipschitzTable {
    pub entries: Vec<LipschitzEntry>,
}

impl LipschitzTable {
    pub fn max_ratio(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.ratio).reduce(f64::max)
    }

    pub fn min_ratio(&self) -> Option<f64> {
        self.entries.iter().map(|e| e.ratio).reduce(f64::min)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("pair,distance,gap,ratio\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{},{:?},{:?},{:?}\n",
                e.index, e.distance, e.gap, e.ratio
            ));
        }
        s
    }
}

fn check_interior(s: &OrderSpectrum) -> Result<()> {
    let ok_alpha = s
        .alphas()
        .iter()
        .all(|&a| (MARGIN..=1.0 - MARGIN).contains(&a));
    let ok_p = s.weights().iter().all(|&p| p >= MARGIN);
    if ok_alpha && ok_p {
        Ok(())
    } else {
        Err(invalid(format!(
            "parameters {s} are within {MARGIN} of the admissible boundary"
        )))
    }
}

/// Solution-to-parameter distance ratios over `pairs`; coincident pairs are skipped.
pub fn lipschitz_ratio(
    pairs: &[(OrderSpectrum, OrderSpectrum)],
    scenario: &Scenario,
) -> Result<LipschitzTable> {
    for (a, b) in pairs {
        if a.ell() != b.ell() {
            return Err(invalid("Lipschitz pairs must share the term count"));
        }
        check_interior(a)?;
        check_interior(b)?;
    }
    let entries: Vec<Option<LipschitzEntry>> = pairs
        .par_iter()
        .enumerate()
        .map(|(index, (a, b))| {
            let gap: f64 = a
                .terms()
                .zip(b.terms())
                .map(|((x, p), (y, q))| (x - y).abs() + (p - q).abs())
                .sum();
            if gap == 0.0 {
                return Ok(None);
            }
            let distance = distinguishability(
                &TimeOperator::MultiTerm(a.clone()),
                &TimeOperator::MultiTerm(b.clone()),
                scenario,
            )?;
            Ok(Some(LipschitzEntry {
                index,
                distance,
                gap,
                ratio: distance / gap,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(LipschitzTable {
        entries: entries.into_iter().flatten().collect(),
    })
}

/// Discrete L²(0,T) distance between the sensor readings of two models.
pub fn distinguishability(
    first: &TimeOperator,
    second: &TimeOperator,
    scenario: &Scenario,
) -> Result<f64> {
    let u = scenario.observe(first)?;
    let v = scenario.observe(second)?;
    u.l2_distance(&v)
}
