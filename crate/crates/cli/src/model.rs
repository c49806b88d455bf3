use std::path::Path;

use pamdp_core::strips::{generate, Mss, StripsMdp};

use crate::CliError;

/// Where a model comes from, for the report.
#[derive(Clone, Debug)]
pub enum Source {
    Generator(String),
    File(String),
}

impl Source {
    pub fn describe(&self) -> String {
        match self {
            Source::Generator(g) => g.clone(),
            Source::File(f) => f.clone(),
        }
    }
}

/// Fill in the seed of a bare `random` generator spec.
pub fn with_seed(spec: &str, seed: u64) -> String {
    match spec.split_once(':') {
        None if spec == "random" => format!("random:{seed}"),
        Some(("random", rest)) if rest == "emp" => format!("random:{seed},emp"),
        _ => spec.to_string(),
    }
}

pub fn load(gen: Option<&str>, input: Option<&Path>, seed: u64) -> Result<(Source, Mss), CliError> {
    match (gen, input) {
        (Some(g), None) => {
            let spec = with_seed(g, seed);
            let mss = generate(&spec)?;
            Ok((Source::Generator(spec), mss))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
            let mss = Mss::parse(&text).map_err(|e| CliError::Model(path.display().to_string(), e))?;
            Ok((Source::File(path.display().to_string()), mss))
        }
        _ => Err(CliError::Usage("give exactly one of --gen and --input".into())),
    }
}

pub fn build(mss: Mss) -> Result<StripsMdp, CliError> {
    Ok(StripsMdp::new(mss)?)
}
