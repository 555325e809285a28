//! Chat-completion clients: a live HTTPS client and an offline player
//! that answers from a stored transcript.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::transcript::Transcript;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        ChatMessage { role, content: content.into() }
    }
}

/// Decoding parameters sent with every request; unset fields are left to
/// the provider.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Decoding {
    pub top_k: Option<u32>,
    pub temperature: Option<f64>,
    pub max_tokens: Option<u32>,
}

impl Default for Decoding {
    fn default() -> Self {
        Decoding { top_k: Some(0), temperature: None, max_tokens: None }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ChatRequest<'a> {
    pub model: &'a str,
    pub messages: &'a [ChatMessage],
    pub seed: u64,
    pub decoding: &'a Decoding,
}

impl ChatRequest<'_> {
    /// JSON body in the common chat-completions shape.
    pub fn to_json(&self) -> serde_json::Value {
        let mut body = serde_json::json!({
            "model": self.model,
            "messages": self.messages,
            "seed": self.seed,
        });
        let d = self.decoding;
        if let Some(k) = d.top_k {
            body["top_k"] = k.into();
        }
        if let Some(t) = d.temperature {
            body["temperature"] = t.into();
        }
        if let Some(m) = d.max_tokens {
            body["max_tokens"] = m.into();
        }
        body
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClientError {
    #[error("environment variable {API_KEY_VAR} is not set")]
    MissingApiKey,
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("unexpected response: {0}")]
    Protocol(String),
    #[error("offline transcript: {0}")]
    Offline(String),
}

pub trait ChatClient {
    /// Sends the conversation so far and returns the assistant's reply.
    fn complete(&mut self, request: &ChatRequest<'_>) -> Result<String, ClientError>;
}

pub const API_KEY_VAR: &str = "REWARD_SYNTH_API_KEY";
pub const ENDPOINT_VAR: &str = "REWARD_SYNTH_ENDPOINT";
pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";

pub struct LiveClient {
    endpoint: String,
    api_key: String,
    agent: ureq::Agent,
    /// Request-rate ceiling: at least this long between two requests.
    min_interval: Duration,
    last: Option<Instant>,
}

impl LiveClient {
    pub fn new(endpoint: impl Into<String>, api_key: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(Duration::from_secs(300))).build().into();
        LiveClient {
            endpoint: endpoint.into(),
            api_key: api_key.into(),
            agent,
            min_interval: Duration::from_secs(1),
            last: None,
        }
    }

    /// Key from `REWARD_SYNTH_API_KEY`; the endpoint from the argument,
    /// else `REWARD_SYNTH_ENDPOINT`, else the default.
    pub fn from_env(endpoint: Option<&str>) -> Result<Self, ClientError> {
        let key = std::env::var(API_KEY_VAR).map_err(|_| ClientError::MissingApiKey)?;
        let endpoint = endpoint
            .map(str::to_string)
            .or_else(|| std::env::var(ENDPOINT_VAR).ok())
            .unwrap_or_else(|| DEFAULT_ENDPOINT.to_string());
        Ok(LiveClient::new(endpoint, key))
    }

    pub fn with_min_interval(mut self, interval: Duration) -> Self {
        self.min_interval = interval;
        self
    }
}

impl ChatClient for LiveClient {
    fn complete(&mut self, request: &ChatRequest<'_>) -> Result<String, ClientError> {
        if let Some(last) = self.last {
            let since = last.elapsed();
            if since < self.min_interval {
                std::thread::sleep(self.min_interval - since);
            }
        }
        self.last = Some(Instant::now());
        let mut response = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(request.to_json())
            .map_err(|e| ClientError::Transport(e.to_string()))?;
        let body: serde_json::Value =
            response.body_mut().read_json().map_err(|e| ClientError::Protocol(e.to_string()))?;
        body["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| ClientError::Protocol("no choices[0].message.content in the response".into()))
    }
}

/// Replays the assistant turns of a stored transcript. Every prompt sent
/// must equal the stored one at the same position.
pub struct OfflinePlayer {
    messages: Vec<ChatMessage>,
}

impl OfflinePlayer {
    pub fn new(messages: Vec<ChatMessage>) -> Self {
        OfflinePlayer { messages }
    }

    pub fn from_transcript(transcript: &Transcript) -> Self {
        OfflinePlayer::new(transcript.messages.iter().map(|m| ChatMessage::new(m.role, m.content.clone())).collect())
    }
}

impl ChatClient for OfflinePlayer {
    fn complete(&mut self, request: &ChatRequest<'_>) -> Result<String, ClientError> {
        let n = request.messages.len();
        for (i, sent) in request.messages.iter().enumerate() {
            let stored = self
                .messages
                .get(i)
                .ok_or_else(|| ClientError::Offline(format!("transcript ends before message {}", i + 1)))?;
            if sent.role != Role::Assistant && sent != stored {
                return Err(ClientError::Offline(format!("message {} differs from the stored prompt", i + 1)));
            }
        }
        match self.messages.get(n) {
            Some(m) if m.role == Role::Assistant => Ok(m.content.clone()),
            Some(_) => Err(ClientError::Offline(format!("message {} is not an assistant reply", n + 1))),
            None => Err(ClientError::Offline(format!("no stored reply for message {}", n + 1))),
        }
    }
}

/// Answers every request with the same text.
pub struct CannedClient(pub String);

impl ChatClient for CannedClient {
    fn complete(&mut self, _: &ChatRequest<'_>) -> Result<String, ClientError> {
        Ok(self.0.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn request_body_shape() {
        let msgs = [ChatMessage::new(Role::System, "s"), ChatMessage::new(Role::User, "u")];
        let d = Decoding::default();
        let body = ChatRequest { model: "m", messages: &msgs, seed: 42, decoding: &d }.to_json();
        assert_eq!(
            body,
            serde_json::json!({"model": "m", "messages": [{"role": "system", "content": "s"}, {"role": "user", "content": "u"}], "seed": 42, "top_k": 0})
        );
    }

    #[test]
    fn offline_player_checks_prompts() {
        let stored = vec![
            ChatMessage::new(Role::System, "s"),
            ChatMessage::new(Role::User, "u"),
            ChatMessage::new(Role::Assistant, "a"),
        ];
        let mut p = OfflinePlayer::new(stored);
        let d = Decoding::default();
        let ok = [ChatMessage::new(Role::System, "s"), ChatMessage::new(Role::User, "u")];
        assert_eq!(p.complete(&ChatRequest { model: "m", messages: &ok, seed: 42, decoding: &d }).unwrap(), "a");
        let bad = [ChatMessage::new(Role::System, "s"), ChatMessage::new(Role::User, "other")];
        assert!(p.complete(&ChatRequest { model: "m", messages: &bad, seed: 42, decoding: &d }).is_err());
        let long = [ok[0].clone(), ok[1].clone(), ChatMessage::new(Role::Assistant, "a"), ChatMessage::new(Role::User, "u")];
        assert!(p.complete(&ChatRequest { model: "m", messages: &long, seed: 42, decoding: &d }).is_err());
    }

    #[test]
    fn missing_key() {
        if std::env::var(API_KEY_VAR).is_err() {
            assert_eq!(LiveClient::from_env(None).err(), Some(ClientError::MissingApiKey));
        }
    }
}
