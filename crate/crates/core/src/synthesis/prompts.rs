//! Prompt templates and their rendering.
//!
//! The templates are kept verbatim. Rendering fills the placeholders and
//! then applies [`DSL_SUBSTITUTIONS`], which swap the requested Python
//! code shape for the reward language, and appends the grammar summary to
//! every prompt that asks for code.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::games::{schema_text, Game, PARENT_CLASS_TEXT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateId {
    System,
    Direct,
    RelationalFunctions,
    RelationalReward,
    Rescale,
}

impl TemplateId {
    pub const ALL: [TemplateId; 5] = [
        TemplateId::System,
        TemplateId::Direct,
        TemplateId::RelationalFunctions,
        TemplateId::RelationalReward,
        TemplateId::Rescale,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TemplateId::System => "system",
            TemplateId::Direct => "direct",
            TemplateId::RelationalFunctions => "relational_functions",
            TemplateId::RelationalReward => "relational_reward",
            TemplateId::Rescale => "rescale",
        }
    }

    /// The template text exactly as listed.
    pub fn raw(self) -> &'static str {
        match self {
            TemplateId::System => include_str!("../../templates/system.txt"),
            TemplateId::Direct => include_str!("../../templates/direct.txt"),
            TemplateId::RelationalFunctions => include_str!("../../templates/relational_functions.txt"),
            TemplateId::RelationalReward => include_str!("../../templates/relational_reward.txt"),
            TemplateId::Rescale => include_str!("../../templates/rescale.txt"),
        }
    }

    /// Whether the reply to this prompt is expected to contain code.
    pub fn asks_for_code(self) -> bool {
        matches!(self, TemplateId::Direct | TemplateId::RelationalFunctions | TemplateId::RelationalReward)
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemplateId {
    type Err = PromptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateId::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| PromptError::UnknownTemplate(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("placeholder unsubstituted: {0}")]
    Unsubstituted(&'static str),
}

/// Values for the template placeholders. `None` leaves the placeholder
/// unfilled, which is an error if the template uses it.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PromptContext {
    pub game: Option<String>,
    pub instructions: Option<String>,
    pub parent_class: Option<String>,
    pub object_classes: Option<String>,
}

impl PromptContext {
    /// Title, description and schema from the game registry.
    pub fn for_game(game: Game) -> Self {
        PromptContext {
            game: Some(game.title().to_string()),
            instructions: Some(game.description().to_string()),
            parent_class: Some(PARENT_CLASS_TEXT.to_string()),
            object_classes: Some(schema_text(game)),
        }
    }
}

pub const PLACEHOLDERS: [&str; 4] = ["<GAME>", "<INSTRUCTIONS>", "<PARENT GAME OBJECT CLASS>", "<GAME OBJECT CLASSES>"];

/// Exact replacements that turn the Python code request into a request for
/// the reward language. Applied after placeholder substitution.
pub const DSL_SUBSTITUTIONS: &[(&str, &str)] = &[
    (
        "```python\ndef reward_function(game_objects) -> float:\n    ... \n    return reward\n```",
        "```\nreward(game_objects):\n    ...\n```",
    ),
    ("Please provide a Python file with a reward function", "Please provide a reward program with a reward function"),
    ("just generate the python code", "just generate the code"),
];

pub const GRAMMAR: &str = include_str!("../../templates/dsl_grammar.txt");

pub fn render_prompt(id: TemplateId, ctx: &PromptContext) -> Result<String, PromptError> {
    let values = [&ctx.game, &ctx.instructions, &ctx.parent_class, &ctx.object_classes];
    let mut text = id.raw().to_string();
    for (ph, value) in PLACEHOLDERS.iter().zip(values) {
        if let Some(v) = value {
            text = text.replace(ph, v);
        }
    }
    // Anything still looking like a placeholder was not provided. Checked
    // before the grammar is appended, which contains no placeholders.
    if let Some(ph) = PLACEHOLDERS.iter().find(|ph| text.contains(**ph)) {
        return Err(PromptError::Unsubstituted(ph));
    }
    for (from, to) in DSL_SUBSTITUTIONS {
        text = text.replace(from, to);
    }
    if id.asks_for_code() {
        text.push_str("\n\n");
        text.push_str(GRAMMAR);
    }
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_prompt_is_verbatim() {
        let s = render_prompt(TemplateId::System, &PromptContext::default()).unwrap();
        assert_eq!(s, "You are a helpful assistant that creates reward functions for reinforcement learning researchers.");
    }

    #[test]
    fn direct_prompt_carries_the_description() {
        let s = render_prompt(TemplateId::Direct, &PromptContext::for_game(Game::Freeway)).unwrap();
        assert!(s.contains("cross ten horizontal lanes"));
        assert!(s.contains("class Chicken(GameObject)"));
        assert!(!s.contains("```python"));
        assert!(s.ends_with(GRAMMAR));
    }

    #[test]
    fn missing_schema_is_an_error() {
        let mut ctx = PromptContext::for_game(Game::Freeway);
        ctx.object_classes = None;
        let err = render_prompt(TemplateId::Direct, &ctx).unwrap_err();
        assert_eq!(err, PromptError::Unsubstituted("<GAME OBJECT CLASSES>"));
        assert!(err.to_string().starts_with("placeholder unsubstituted"));
    }

    #[test]
    fn every_substitution_applies_somewhere() {
        let ctx = PromptContext::for_game(Game::Pong);
        let rendered: Vec<String> = TemplateId::ALL.iter().map(|t| render_prompt(*t, &ctx).unwrap()).collect();
        for (from, to) in DSL_SUBSTITUTIONS {
            assert!(TemplateId::ALL.iter().any(|t| t.raw().contains(from)), "{from}");
            assert!(rendered.iter().any(|r| r.contains(to)));
        }
    }

    #[test]
    fn unknown_template_name() {
        assert!(matches!("summary".parse::<TemplateId>(), Err(PromptError::UnknownTemplate(_))));
        assert_eq!("rescale".parse::<TemplateId>().unwrap(), TemplateId::Rescale);
    }
}
