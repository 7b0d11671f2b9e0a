//! Layered configuration: defaults, then a TOML file, then `FACTCHECK_*`
//! environment variables, then command-line overrides. Later layers win
//! field by field.

use std::fs;
use std::path::{Path, PathBuf};

use factcheck_core::dense::EmbeddingProviderConfig;
use factcheck_core::generator::GeneratorConfig;
use factcheck_core::retriever::RetrievalConfig;
use factcheck_core::scoring::{MeteorParams, ScoringConfig};
use factcheck_core::verdict::EnsembleConfig;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::GlobalArgs;
use crate::CliError;

/// Prefix of configuration environment variables. Sections and fields are
/// separated by a double underscore: `FACTCHECK_RETRIEVAL__K=5`.
pub const ENV_PREFIX: &str = "FACTCHECK_";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathsConfig {
    pub dataset: Option<PathBuf>,
    pub knowledge_store: Option<PathBuf>,
    pub train_set: Option<PathBuf>,
    pub cache_dir: PathBuf,
    pub output_dir: PathBuf,
    /// Per-claim label probabilities for the ensemble.
    pub external_probs: Option<PathBuf>,
}

impl Default for PathsConfig {
    fn default() -> Self {
        PathsConfig {
            dataset: None,
            knowledge_store: None,
            train_set: None,
            cache_dir: PathBuf::from(".factcheck-cache"),
            output_dir: PathBuf::from("factcheck-out"),
            external_probs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AppConfig {
    pub retrieval: RetrievalConfig,
    pub generator: GeneratorConfig,
    pub embedding: EmbeddingProviderConfig,
    /// Absent means the LLM distribution is used alone.
    pub ensemble: Option<EnsembleConfig>,
    pub scoring: ScoringConfig,
    pub meteor: MeteorParams,
    pub paths: PathsConfig,
}

impl AppConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        self.retrieval.validate()?;
        self.generator.validate()?;
        self.embedding.validate()?;
        if let Some(e) = &self.ensemble {
            e.validate()?;
        }
        self.scoring.validate()?;
        self.meteor.validate()?;
        Ok(())
    }

    /// Every key the configuration accepts, with optional sections filled in.
    fn schema() -> Value {
        let full = AppConfig {
            ensemble: Some(EnsembleConfig::default()),
            ..Default::default()
        };
        serde_json::to_value(full).expect("config serializes")
    }
}

/// Parses `text` as a JSON literal, falling back to a plain string, so
/// `5`, `true` and `[0.1, 0.25]` are typed and `echo` is a string.
fn parse_scalar(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()))
}

fn check_keys(layer: &Value, schema: &Value, path: &str, origin: &str) -> Result<(), CliError> {
    let (Value::Object(layer), Value::Object(schema)) = (layer, schema) else {
        return Ok(());
    };
    for (key, value) in layer {
        let full = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
        let Some(sub) = schema.get(key) else {
            return Err(CliError::Usage(format!("unknown configuration key `{full}` in {origin}")));
        };
        if sub.is_object() && !value.is_object() && !value.is_null() {
            return Err(CliError::Usage(format!("configuration key `{full}` in {origin} must be a table")));
        }
        check_keys(value, sub, &full, origin)?;
    }
    Ok(())
}

fn merge(base: &mut Value, layer: Value) {
    match (base, layer) {
        (Value::Object(base), Value::Object(layer)) => {
            for (key, value) in layer {
                match base.get_mut(&key) {
                    Some(slot) if slot.is_object() && value.is_object() => merge(slot, value),
                    _ => {
                        base.insert(key, value);
                    }
                }
            }
        }
        (base, layer) => *base = layer,
    }
}

fn set_path(root: &mut Value, path: &[&str], value: Value) {
    let mut node = root;
    for segment in &path[..path.len() - 1] {
        let map = node.as_object_mut().expect("intermediate nodes are objects");
        node = map
            .entry(segment.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
        if !node.is_object() {
            *node = Value::Object(Map::new());
        }
    }
    node.as_object_mut()
        .expect("intermediate nodes are objects")
        .insert(path[path.len() - 1].to_string(), value);
}

fn dotted_layer<'a>(entries: impl IntoIterator<Item = (Vec<String>, &'a str)>) -> Value {
    let mut layer = Value::Object(Map::new());
    for (path, raw) in entries {
        let segments: Vec<&str> = path.iter().map(String::as_str).collect();
        set_path(&mut layer, &segments, parse_scalar(raw));
    }
    layer
}

fn file_layer(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text)
        .map_err(|e| CliError::Usage(format!("malformed config file {}: {e}", path.display())))?;
    serde_json::to_value(table).map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
}

fn env_layer(env: &[(String, String)]) -> Value {
    let entries = env.iter().filter_map(|(name, value)| {
        let rest = name.strip_prefix(ENV_PREFIX)?;
        if !rest.contains("__") {
            return None;
        }
        let path: Vec<String> = rest.split("__").map(str::to_lowercase).collect();
        if path.iter().any(String::is_empty) {
            return None;
        }
        Some((path, value.as_str()))
    });
    dotted_layer(entries)
}

fn flag_layer(global: &GlobalArgs) -> Result<Value, CliError> {
    let mut entries = Vec::new();
    for item in &global.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{item}`")))?;
        let path: Vec<String> = key.trim().split('.').map(str::to_string).collect();
        if path.iter().any(String::is_empty) {
            return Err(CliError::Usage(format!("--set has an empty key segment in `{key}`")));
        }
        entries.push((path, value.trim()));
    }
    let mut layer = dotted_layer(entries);
    let paths = [
        ("dataset", &global.dataset),
        ("knowledge_store", &global.knowledge_store),
        ("train_set", &global.train_set),
        ("cache_dir", &global.cache_dir),
        ("output_dir", &global.output_dir),
    ];
    for (field, value) in paths {
        if let Some(p) = value {
            set_path(&mut layer, &["paths", field], Value::String(p.display().to_string()));
        }
    }
    Ok(layer)
}

/// Resolves the configuration from all layers. `env` is the process
/// environment as name/value pairs.
pub fn load(global: &GlobalArgs, env: &[(String, String)]) -> Result<AppConfig, CliError> {
    let schema = AppConfig::schema();
    let mut merged = serde_json::to_value(AppConfig::default()).expect("config serializes");
    if let Some(path) = &global.config {
        let layer = file_layer(path)?;
        check_keys(&layer, &schema, "", &path.display().to_string())?;
        merge(&mut merged, layer);
    }
    let layer = env_layer(env);
    check_keys(&layer, &schema, "", "the environment")?;
    merge(&mut merged, layer);
    let layer = flag_layer(global)?;
    check_keys(&layer, &schema, "", "command-line flags")?;
    merge(&mut merged, layer);

    let config: AppConfig =
        serde_json::from_value(merged).map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))?;
    config.validate()?;
    Ok(config)
}
