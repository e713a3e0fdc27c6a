//! Run configuration: the JSON file format, dotted-path overrides, and
//! validation into ready-to-run core types.
//!
//! A config file mirrors [`RunConfig`] exactly; unknown keys anywhere are
//! errors, never silently ignored. `--set a.b=value` overrides patch the
//! raw JSON before the typed parse, so a patched unknown or ill-typed field
//! fails with the same field-naming diagnostics as an edited file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use lightpath_core::{
    AgentConfig, Endpoint, Error as CoreError, InterfaceState, LayeredMedium, RewardScale,
};

/// Everything a training run needs, as read from a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub medium: MediumConfig,
    /// Initial interface crossings, one per interface.
    pub s_ini: Vec<i32>,
    pub agent: AgentParams,
    /// `"normalized"` (score 1 for the initial path) or an explicit factor.
    #[serde(default)]
    pub reward_scale: RewardScaleMode,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

/// Slab geometry, mirroring [`LayeredMedium::new`] argument for argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MediumConfig {
    pub indices: Vec<f64>,
    pub slab_width: u32,
    pub height: u32,
    pub start: (i32, i32),
    pub end: (i32, i32),
}

/// Hyperparameters and run lengths, mirroring [`AgentConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub episodes: u32,
    pub rounds_per_episode: u32,
    pub seed: u64,
}

/// Score factor: the self-normalizing keyword or an explicit positive real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RewardScaleMode {
    Keyword(ScaleKeyword),
    Factor(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleKeyword {
    Normalized,
}

impl Default for RewardScaleMode {
    fn default() -> Self {
        RewardScaleMode::Keyword(ScaleKeyword::Normalized)
    }
}

/// Where artifacts go and which of them to write.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    /// Required whenever at least one artifact is enabled.
    pub directory: Option<PathBuf>,
    pub round_log: bool,
    pub summary: bool,
    pub q_table: bool,
    pub path_svg: bool,
    pub convergence_svg: bool,
    /// Episodes shown in the figures; `null` means every 10th plus the last.
    pub figure_episodes: Option<Vec<u32>>,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        OutputsConfig {
            directory: None,
            round_log: true,
            summary: true,
            q_table: true,
            path_svg: true,
            convergence_svg: true,
            figure_episodes: None,
        }
    }
}

/// A validated run: core types constructed, every field range-checked.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub medium: LayeredMedium,
    pub s_ini: InterfaceState,
    pub agent: AgentConfig,
    pub scale: RewardScale,
}

impl RunConfig {
    /// Validates the config and builds the core types, naming the offending
    /// config field in every failure.
    pub fn build(&self) -> Result<Experiment> {
        let m = &self.medium;
        let medium = LayeredMedium::new(m.indices.clone(), m.slab_width, m.height, m.start, m.end)
            .map_err(|e| anyhow!("{}: {e}", medium_field(&e)))?;
        let s_ini = InterfaceState::new(self.s_ini.clone());
        medium
            .validate_state(&s_ini)
            .map_err(|e| anyhow!("s_ini: {e}"))?;
        let agent = AgentConfig {
            epsilon: self.agent.epsilon,
            alpha: self.agent.alpha,
            gamma: self.agent.gamma,
            episodes: self.agent.episodes,
            rounds_per_episode: self.agent.rounds_per_episode,
            seed: self.agent.seed,
        };
        agent.validate().map_err(|e| match e {
            CoreError::InvalidHyperparameter { field, .. } => anyhow!("agent.{field}: {e}"),
            other => anyhow!("agent: {other}"),
        })?;
        let scale = match self.reward_scale {
            RewardScaleMode::Keyword(ScaleKeyword::Normalized) => {
                let t_ini = medium
                    .path_time(&s_ini)
                    .map_err(|e| anyhow!("s_ini: {e}"))?;
                RewardScale::normalized(t_ini)
            }
            RewardScaleMode::Factor(factor) => RewardScale::explicit(factor)
                .map_err(|e| anyhow!("reward_scale: {e}"))?,
        };
        Ok(Experiment {
            medium,
            s_ini,
            agent,
            scale,
        })
    }

    /// The episodes to draw in figures: the configured list (deduplicated,
    /// in-range), or every 10th episode plus the last when unset.
    pub fn figure_episodes(&self) -> Vec<u32> {
        let episodes = self.agent.episodes;
        let mut selected: Vec<u32> = match &self.outputs.figure_episodes {
            Some(list) => list.iter().copied().filter(|&e| e < episodes).collect(),
            None => (0..episodes).step_by(10).chain(episodes.checked_sub(1)).collect(),
        };
        selected.sort_unstable();
        selected.dedup();
        selected
    }
}

/// Which config field a geometry error traces back to.
fn medium_field(error: &CoreError) -> &'static str {
    match error {
        CoreError::TooFewSlabs { .. } | CoreError::NonPositiveIndex { .. } => "medium.indices",
        CoreError::ZeroSlabWidth => "medium.slab_width",
        CoreError::ZeroHeight => "medium.height",
        CoreError::EndpointOffBoundary {
            which: Endpoint::Start,
            ..
        }
        | CoreError::EndpointOutOfRange {
            which: Endpoint::Start,
            ..
        } => "medium.start",
        CoreError::EndpointOffBoundary {
            which: Endpoint::End,
            ..
        }
        | CoreError::EndpointOutOfRange {
            which: Endpoint::End,
            ..
        } => "medium.end",
        _ => "medium",
    }
}

/// Loads a config file and applies `--set` overrides in order.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut value: Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    for item in overrides {
        apply_override(&mut value, item)?;
    }
    parse_config(value).with_context(|| format!("in config {}", path.display()))
}

/// Typed parse with field-path context on failure (e.g. `agent.alpha`).
fn parse_config(value: Value) -> Result<RunConfig> {
    let deserializer = value;
    serde_path_to_error::deserialize(deserializer)
        .map_err(|e| anyhow!("{}: {}", e.path(), e.inner()))
}

/// Patches one `key.path=value` override into the raw JSON tree. The value
/// is parsed as JSON when possible (numbers, arrays, booleans, null) and
/// taken as a string otherwise; the typed parse afterwards rejects paths
/// that name no real field.
fn apply_override(root: &mut Value, item: &str) -> Result<()> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| anyhow!("override {item:?} must look like key.path=value"))?;
    if path.is_empty() || path.split('.').any(str::is_empty) {
        bail!("override {item:?} has an empty path segment");
    }
    let leaf: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    let mut cursor = root;
    let mut segments = path.split('.').peekable();
    while let Some(segment) = segments.next() {
        let object = cursor
            .as_object_mut()
            .ok_or_else(|| anyhow!("override {item:?}: {segment:?} does not name an object"))?;
        if segments.peek().is_none() {
            object.insert(segment.to_owned(), leaf);
            break;
        }
        cursor = object
            .entry(segment.to_owned())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}

/// Ready-made configs for tests across the crate.
#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    /// The three-slab n=(1, 1.3, 1.6) run with the paper's hyperparameters;
    /// no output directory, so tests opt into artifacts explicitly.
    pub(crate) fn paper_config(seed: u64) -> RunConfig {
        RunConfig {
            medium: MediumConfig {
                indices: vec![1.0, 1.3, 1.6],
                slab_width: 50,
                height: 50,
                start: (0, 0),
                end: (150, 50),
            },
            s_ini: vec![0, 0],
            agent: AgentParams {
                epsilon: 0.9,
                alpha: 0.001,
                gamma: 0.9,
                episodes: 100,
                rounds_per_episode: 300,
                seed,
            },
            reward_scale: RewardScaleMode::default(),
            outputs: OutputsConfig::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_json() -> Value {
        serde_json::json!({
            "medium": {
                "indices": [1.0, 1.3, 1.6],
                "slab_width": 50,
                "height": 50,
                "start": [0, 0],
                "end": [150, 50]
            },
            "s_ini": [0, 0],
            "agent": {
                "epsilon": 0.9,
                "alpha": 0.001,
                "gamma": 0.9,
                "episodes": 100,
                "rounds_per_episode": 300,
                "seed": 1
            },
            "reward_scale": "normalized",
            "outputs": {
                "directory": "runs/demo",
                "round_log": true,
                "summary": true,
                "q_table": true,
                "path_svg": true,
                "convergence_svg": true,
                "figure_episodes": null
            }
        })
    }

    #[test]
    fn a_full_config_parses_and_builds() {
        let config = parse_config(paper_json()).unwrap();
        let experiment = config.build().unwrap();
        assert_eq!(experiment.medium.num_interfaces(), 2);
        assert_eq!(experiment.s_ini.ys(), &[0, 0]);
        assert_eq!(experiment.agent.episodes, 100);
        // Normalized: log N equals the initial path time.
        assert!((experiment.scale.log_scale() - 228.1370849898476).abs() < 1e-9);
    }

    #[test]
    fn optional_sections_default() {
        let mut value = paper_json();
        value.as_object_mut().unwrap().remove("reward_scale");
        value.as_object_mut().unwrap().remove("outputs");
        let config = parse_config(value).unwrap();
        assert_eq!(config.reward_scale, RewardScaleMode::default());
        assert_eq!(config.outputs, OutputsConfig::default());
        assert!(config.outputs.round_log);
        assert!(config.outputs.directory.is_none());
    }

    #[test]
    fn unknown_fields_are_rejected_with_their_path() {
        let mut value = paper_json();
        value["agent"]["alhpa"] = serde_json::json!(0.5);
        let error = parse_config(value).unwrap_err().to_string();
        assert!(error.contains("agent"), "{error}");
        assert!(error.contains("alhpa"), "{error}");
    }

    #[test]
    fn type_errors_name_the_field_path() {
        let mut value = paper_json();
        value["agent"]["episodes"] = serde_json::json!(0.25);
        let error = parse_config(value).unwrap_err().to_string();
        assert!(error.contains("agent.episodes"), "{error}");
    }

    type Mutation = Box<dyn Fn(&mut Value)>;

    #[test]
    fn range_errors_name_the_field_path() {
        let cases: Vec<(Mutation, &str)> = vec![
            (Box::new(|v| v["medium"]["indices"] = serde_json::json!([1.0, -0.5, 1.6])), "medium.indices"),
            (Box::new(|v| v["medium"]["indices"] = serde_json::json!([1.0])), "medium.indices"),
            (Box::new(|v| v["medium"]["slab_width"] = serde_json::json!(0)), "medium.slab_width"),
            (Box::new(|v| v["medium"]["height"] = serde_json::json!(0)), "medium.height"),
            (Box::new(|v| v["medium"]["start"] = serde_json::json!([5, 0])), "medium.start"),
            (Box::new(|v| v["medium"]["end"] = serde_json::json!([150, 99])), "medium.end"),
            (Box::new(|v| v["s_ini"] = serde_json::json!([0, 77])), "s_ini"),
            (Box::new(|v| v["s_ini"] = serde_json::json!([0, 0, 0])), "s_ini"),
            (Box::new(|v| v["agent"]["epsilon"] = serde_json::json!(1.5)), "agent.epsilon"),
            (Box::new(|v| v["agent"]["alpha"] = serde_json::json!(0.0)), "agent.alpha"),
            (Box::new(|v| v["agent"]["gamma"] = serde_json::json!(2.0)), "agent.gamma"),
            (Box::new(|v| v["reward_scale"] = serde_json::json!(-3.0)), "reward_scale"),
        ];
        for (mutate, expected) in cases {
            let mut value = paper_json();
            mutate(&mut value);
            let config = parse_config(value).unwrap();
            let error = config.build().unwrap_err().to_string();
            assert!(
                error.contains(expected),
                "expected {expected:?} in {error:?}"
            );
        }
    }

    #[test]
    fn overrides_patch_like_editing_the_file() {
        let mut patched = paper_json();
        apply_override(&mut patched, "agent.alpha=0.3").unwrap();
        apply_override(&mut patched, "medium.indices=[3, 1, 2]").unwrap();
        apply_override(&mut patched, "s_ini=[50, 50]").unwrap();
        apply_override(&mut patched, "outputs.directory=elsewhere").unwrap();
        let from_overrides = parse_config(patched).unwrap();

        let mut edited = paper_json();
        edited["agent"]["alpha"] = serde_json::json!(0.3);
        edited["medium"]["indices"] = serde_json::json!([3, 1, 2]);
        edited["s_ini"] = serde_json::json!([50, 50]);
        edited["outputs"]["directory"] = serde_json::json!("elsewhere");
        let from_editing = parse_config(edited).unwrap();

        assert_eq!(from_overrides, from_editing);
    }

    #[test]
    fn overrides_with_unknown_keys_are_rejected() {
        let mut value = paper_json();
        apply_override(&mut value, "agent.learning_rate=0.5").unwrap();
        let error = parse_config(value).unwrap_err().to_string();
        assert!(error.contains("learning_rate"), "{error}");

        let mut value = paper_json();
        apply_override(&mut value, "agnt.alpha=0.5").unwrap();
        let error = parse_config(value).unwrap_err().to_string();
        assert!(error.contains("agnt"), "{error}");
    }

    #[test]
    fn malformed_overrides_are_rejected_up_front() {
        let mut value = paper_json();
        assert!(apply_override(&mut value, "agent.alpha").is_err());
        assert!(apply_override(&mut value, "=5").is_err());
        assert!(apply_override(&mut value, "agent..alpha=5").is_err());
        // Descending through a non-object is an error, not a silent no-op.
        assert!(apply_override(&mut value, "agent.alpha.deep=5").is_err());
    }

    #[test]
    fn reward_scale_accepts_keyword_or_factor() {
        let mut value = paper_json();
        value["reward_scale"] = serde_json::json!(2.5e6);
        let config = parse_config(value).unwrap();
        assert_eq!(config.reward_scale, RewardScaleMode::Factor(2.5e6));
        let experiment = config.build().unwrap();
        assert!((experiment.scale.log_scale() - (2.5e6f64).ln()).abs() < 1e-12);

        let mut value = paper_json();
        value["reward_scale"] = serde_json::json!("normalised");
        assert!(parse_config(value).is_err());
    }

    #[test]
    fn figure_episode_defaults_cover_every_tenth_and_the_last() {
        let config = parse_config(paper_json()).unwrap();
        let episodes = config.figure_episodes();
        assert_eq!(episodes.first(), Some(&0));
        assert_eq!(episodes.last(), Some(&99));
        assert_eq!(episodes.len(), 11);
        assert!(episodes.contains(&90));
    }

    #[test]
    fn figure_episode_lists_are_deduplicated_and_bounded() {
        let mut value = paper_json();
        value["outputs"]["figure_episodes"] = serde_json::json!([99, 5, 5, 400]);
        let config = parse_config(value).unwrap();
        assert_eq!(config.figure_episodes(), vec![5, 99]);

        // One-episode run: the default list collapses to episode 0.
        let mut value = paper_json();
        value["agent"]["episodes"] = serde_json::json!(1);
        let config = parse_config(value).unwrap();
        assert_eq!(config.figure_episodes(), vec![0]);

        // Zero-episode run: nothing to draw.
        let mut value = paper_json();
        value["agent"]["episodes"] = serde_json::json!(0);
        let config = parse_config(value).unwrap();
        assert!(config.figure_episodes().is_empty());
    }

    #[test]
    fn config_echo_round_trips_through_json() {
        let config = parse_config(paper_json()).unwrap();
        let echoed = serde_json::to_value(&config).unwrap();
        let reparsed = parse_config(echoed).unwrap();
        assert_eq!(config, reparsed);
    }
}
