//! Writing command output as JSON (canonical) or CSV (flattened per-ad /
//! per-instance convenience view), to stdout or a file.

use crate::error::CliError;
use adalloc::certification::CertifyReport;
use adalloc::model::Allocation;
use adalloc::objectives::ObjectiveReport;
use clap::ValueEnum;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn emit(out: &Option<PathBuf>, payload: String) -> Result<(), CliError> {
    match out {
        Some(path) => write_file(path, payload),
        None => {
            println!("{}", payload.trim_end());
            Ok(())
        }
    }
}

fn write_file(path: &Path, mut payload: String) -> Result<(), CliError> {
    if !payload.ends_with('\n') {
        payload.push('\n');
    }
    std::fs::write(path, payload).map_err(|e| CliError::io(path, e))
}

pub fn to_pretty_json(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("output serializes")
}

/// Per-ad CSV rows for a report plus the allocation's seed sets.
pub fn report_csv(report: &ObjectiveReport, allocation: &Allocation) -> String {
    let mut out = String::from("ad,alpha,budget,sigma,U,V,regret,seeds\n");
    for ad in &report.per_ad {
        let seeds = allocation.seed_sets[ad.ad]
            .iter()
            .map(|u| u.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            ad.ad, ad.alpha, ad.budget, ad.sigma, ad.utility, ad.revenue, ad.regret, seeds
        ));
    }
    out
}

/// Per-instance CSV rows for a certification report.
pub fn certify_csv(report: &CertifyReport) -> String {
    let mut out = String::from("index,users,ads,solver_value,oracle_value,ratio,std_error,pass\n");
    for o in &report.per_instance {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            o.index, o.users, o.ads, o.solver_value, o.oracle_value, o.ratio, o.std_error, o.pass
        ));
    }
    out
}
