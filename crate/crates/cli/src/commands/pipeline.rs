use std::io::Write;
use std::path::Path;

use argmine::corpus::load_corpus;
use argmine::features::MlpModel;
use argmine::pipeline::{run_pipeline, PipelineConfig};

use crate::error::CliError;

pub fn run(config: &Path, input: &Path, output: &Path, no_filter: bool) -> Result<(), CliError> {
    let config_dir = config.parent().map(Path::to_path_buf).unwrap_or_default();
    let config = PipelineConfig::load(config)?;
    let corpus = load_corpus(input)?;
    // relative model paths resolve against the config file's directory
    let model_path = if config.model.is_relative() {
        config_dir.join(&config.model)
    } else {
        config.model.clone()
    };
    let model = MlpModel::load(&model_path).map_err(|e| {
        CliError::validation(format!("loading model {}: {e}", model_path.display()))
    })?;
    let mut stage1 = config.stage1.build()?;
    let mut stage2 = config.stage2.build()?;
    let mut options = config.options();
    if no_filter {
        options.filtering_enabled = false;
    }
    let run = run_pipeline(
        &corpus.documents,
        stage1.as_mut(),
        stage2.as_mut(),
        &model,
        &options,
    )?;
    let mut f = std::fs::File::create(output)?;
    for result in &run.results {
        writeln!(f, "{}", serde_json::to_string(result)?)?;
    }
    eprintln!(
        "pipeline: {} documents; stage timings {:.0} / {:.0} / {:.0} ms -> {}",
        run.results.len(),
        run.timing.stage1_ms,
        run.timing.stage2_ms,
        run.timing.stage3_ms,
        output.display()
    );
    Ok(())
}
