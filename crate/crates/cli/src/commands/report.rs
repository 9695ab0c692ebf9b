use std::path::Path;

use argmine::analysis::{
    argument_distribution, holistic_distribution, rolling_mean, share_report, temporal_trends,
    write_distribution_csv, write_holistic_csv, write_shares_csv, write_trends_csv,
};
use argmine::corpus::load_corpus;
use chrono::NaiveDate;

use crate::error::CliError;

pub fn run(
    corpus: &Path,
    from: Option<i32>,
    to: Option<i32>,
    bucket_years: u32,
    out: &Path,
) -> Result<(), CliError> {
    let mut corpus = load_corpus(corpus)?;
    // apply the year filter once up front so every report covers the
    // same slice
    if from.is_some() || to.is_some() {
        let lo = from
            .map(|y| NaiveDate::from_ymd_opt(y, 1, 1).unwrap())
            .unwrap_or(NaiveDate::MIN);
        let hi = to
            .map(|y| NaiveDate::from_ymd_opt(y, 12, 31).unwrap())
            .unwrap_or(NaiveDate::MAX);
        corpus
            .documents
            .retain(|d| d.decision_date >= lo && d.decision_date <= hi);
    }
    if corpus.is_empty() {
        return Err(CliError::validation(
            "no documents fall inside the requested date range",
        ));
    }
    std::fs::create_dir_all(out)?;

    let distribution = argument_distribution(&corpus, None);
    write_distribution_csv(&distribution, std::fs::File::create(out.join("distribution.csv"))?)?;

    let holistic = holistic_distribution(&corpus)?;
    write_holistic_csv(&holistic, std::fs::File::create(out.join("holistic.csv"))?)?;

    let trends = temporal_trends(&corpus, bucket_years)?;
    write_trends_csv(&trends, std::fs::File::create(out.join("trends.csv"))?)?;
    write_trends_csv(
        &rolling_mean(&trends, 3),
        std::fs::File::create(out.join("trends_rolling3.csv"))?,
    )?;

    let shares = share_report(&corpus, None)?;
    write_shares_csv(&shares, std::fs::File::create(out.join("shares.csv"))?)?;

    println!(
        "wrote distribution.csv, holistic.csv, trends.csv, trends_rolling3.csv, shares.csv to {}",
        out.display()
    );
    Ok(())
}
