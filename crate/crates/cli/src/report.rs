use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certificate::{Certificate, Verdict};
use crate::scene::{SceneDocument, FORMAT_VERSION};

/// The document every command prints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub format_version: String,
    pub command: String,
    pub inputs_digest: String,
    pub outcome: Verdict,
    pub result: Value,
    pub certificates: Vec<Certificate>,
    /// Scene derived by the command, which its certificates refer to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<SceneDocument>,
}

impl Report {
    /// Outcome is refuted when `extra_ok` is false or any certificate is refuted.
    pub fn new(command: &str, inputs_digest: &str, result: impl Serialize, certificates: Vec<Certificate>, extra_ok: bool) -> Self {
        let all = extra_ok && certificates.iter().all(|c| c.verdict == Verdict::Verified);
        Report {
            format_version: FORMAT_VERSION.into(),
            command: command.into(),
            inputs_digest: inputs_digest.into(),
            outcome: Verdict::from_bool(all),
            result: serde_json::to_value(result).expect("results serialize"),
            certificates,
            scene: None,
        }
    }

    pub fn with_scene(mut self, scene: SceneDocument) -> Self {
        self.scene = Some(scene);
        self
    }

    /// Pretty JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> u8 {
        match self.outcome {
            Verdict::Verified => 0,
            Verdict::Refuted => 1,
        }
    }
}
