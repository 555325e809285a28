use std::collections::HashSet;

use super::client::{ChatClient, ChatMessage, ChatRequest, Role};
use super::extract::extract_code;
use super::prompts::{render_prompt, TemplateId};
use super::transcript::{FailureStage, Outcome, Transcript};
use super::{Mode, SynthesisRequest};
use crate::dsl::ast::{Callee, Expr, ExprKind, Helper};
use crate::dsl::diag::codes;
use crate::dsl::parser::{parse_fragment, walk};
use crate::dsl::{compile, lint, pretty_print, static_bounds, Diagnostic, Interval, RewardProgram};

#[derive(Debug, Clone)]
pub struct Synthesized {
    pub program: RewardProgram,
    pub transcript: Transcript,
    pub bounds: Interval,
    /// Warnings such as an unclamped range.
    pub lints: Vec<Diagnostic>,
}

#[derive(Debug, Clone, thiserror::Error)]
#[error("synthesis failed during {stage:?}: {message}")]
pub struct SynthesisFailure {
    pub stage: FailureStage,
    pub message: String,
    pub diagnostics: Vec<Diagnostic>,
    /// Everything exchanged up to the failure.
    pub transcript: Transcript,
}

fn called_helpers(e: &Expr, out: &mut Vec<String>) {
    walk(e, &mut |x: &Expr| {
        if let ExprKind::Call(Callee::Helper(name), _) = &x.kind {
            out.push(name.clone());
        }
    });
}

/// Compiles the final reply. Helpers it calls but does not define are taken
/// from earlier replies (latest first), as the protocol feeds the helper
/// turn into the reward turn.
pub fn assemble(final_code: &str, earlier: &[&str]) -> Result<RewardProgram, Vec<Diagnostic>> {
    let direct = compile(final_code);
    let original_errors = match direct {
        Ok(p) => return Ok(p),
        Err(e) => e,
    };
    if !original_errors.iter().all(|d| d.code == codes::UNKNOWN_FUNCTION) {
        return Err(original_errors);
    }
    let Ok(last) = parse_fragment(final_code) else { return Err(original_errors) };
    let Some(entry) = last.entry else { return Err(original_errors) };
    // Latest turn first.
    let pools: Vec<Vec<Helper>> =
        earlier.iter().rev().filter_map(|src| parse_fragment(src).ok()).map(|f| f.helpers).collect();

    let mut defined: HashSet<String> = last.helpers.iter().map(|h| h.name.clone()).collect();
    let mut pending = Vec::new();
    called_helpers(&entry.body, &mut pending);
    for h in &last.helpers {
        called_helpers(&h.body, &mut pending);
    }
    let mut borrowed: Vec<Helper> = Vec::new();
    while let Some(name) = pending.pop() {
        if defined.contains(&name) {
            continue;
        }
        if let Some(h) = pools.iter().flatten().find(|h| h.name == name) {
            defined.insert(name);
            called_helpers(&h.body, &mut pending);
            borrowed.push(h.clone());
        }
    }
    if borrowed.is_empty() {
        return Err(original_errors);
    }
    // Keep the borrowed helpers in the order they were written.
    let position = |h: &Helper| {
        pools.iter().rev().flatten().position(|p| p.name == h.name && p.body == h.body).unwrap_or(usize::MAX)
    };
    borrowed.sort_by_key(position);
    borrowed.extend(last.helpers);
    let merged = RewardProgram { helpers: borrowed, entry, source_text: String::new(), origin: Default::default() };
    compile(&pretty_print(&merged))
}

fn fail(transcript: &mut Transcript, stage: FailureStage, message: String, diagnostics: Vec<Diagnostic>) -> Box<SynthesisFailure> {
    transcript.outcome = Outcome::Failed { stage, message: message.clone(), diagnostics: diagnostics.clone() };
    Box::new(SynthesisFailure { stage, message, diagnostics, transcript: transcript.clone() })
}

/// One request/reply exchange: the prompt and the reply are both recorded,
/// the reply's code is extracted.
fn turn(
    req: &SynthesisRequest,
    client: &mut dyn ChatClient,
    transcript: &mut Transcript,
    template: TemplateId,
) -> Result<String, Box<SynthesisFailure>> {
    let prompt = render_prompt(template, &req.context)
        .map_err(|e| fail(transcript, FailureStage::Prompt, e.to_string(), Vec::new()))?;
    transcript.push(Role::User, prompt);
    let messages: Vec<ChatMessage> =
        transcript.messages.iter().map(|m| ChatMessage::new(m.role, m.content.clone())).collect();
    let request = ChatRequest { model: &req.model, messages: &messages, seed: req.seed, decoding: &req.decoding };
    let reply = client.complete(&request).map_err(|e| fail(transcript, FailureStage::Transport, e.to_string(), Vec::new()))?;
    transcript.push(Role::Assistant, reply.clone());
    let code = extract_code(&reply).map_err(|d| fail(transcript, FailureStage::Extraction, d.message.clone(), vec![d]))?;
    transcript.messages.last_mut().expect("just pushed").code = Some(code.clone());
    Ok(code)
}

/// Runs the protocol once. There is no retry: any failure is returned with
/// the transcript so far.
pub fn run_pipeline(req: &SynthesisRequest, client: &mut dyn ChatClient) -> Result<Synthesized, Box<SynthesisFailure>> {
    let mut transcript = Transcript::new(req.meta());
    let system = render_prompt(TemplateId::System, &req.context)
        .map_err(|e| fail(&mut transcript, FailureStage::Prompt, e.to_string(), Vec::new()))?;
    transcript.push(Role::System, system);

    let assembled = match req.mode {
        Mode::NoRelations => {
            let code = turn(req, client, &mut transcript, TemplateId::Direct)?;
            compile(&code)
        }
        Mode::Full => {
            let helpers = turn(req, client, &mut transcript, TemplateId::RelationalFunctions)?;
            let reward = turn(req, client, &mut transcript, TemplateId::RelationalReward)?;
            let rescaled = turn(req, client, &mut transcript, TemplateId::Rescale)?;
            assemble(&rescaled, &[&helpers, &reward])
        }
    };
    let program = assembled.map_err(|diags| {
        let first = diags.first().map(|d| d.to_string()).unwrap_or_default();
        fail(&mut transcript, FailureStage::Validation, format!("final program does not compile: {first}"), diags)
    })?;
    let program = program.with_origin(req.mode.origin());
    let bounds = static_bounds(&program);
    let lints = lint(&program);
    transcript.outcome = Outcome::Ok { program: program.source_text.clone() };
    Ok(Synthesized { program, transcript, bounds, lints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::Game;
    use crate::synthesis::CannedClient;

    #[test]
    fn missing_helpers_come_from_earlier_turns() {
        let helpers = "fn near(a: obj, b: obj) -> bool: manhattan(a, b) < 10.0\nfn unused() -> float: 1.0\n";
        let reward = "reward(objs): if exists(o in objs: exists(p in objs: near(o, p))) then 1.0 else 0.0\n";
        let p = assemble(reward, &[helpers]).unwrap();
        assert_eq!(p.helpers.len(), 1);
        assert_eq!(p.helpers[0].name, "near");
    }

    #[test]
    fn later_definitions_win() {
        let first = "fn f() -> float: 1.0\n";
        let second = "fn f() -> float: 2.0\nreward(o): f()\n";
        let p = assemble("reward(o): f() * 3.0\n", &[first, second]).unwrap();
        assert_eq!(crate::dsl::evaluate_objects(&p, &[]).reward, 6.0);
    }

    #[test]
    fn genuine_errors_are_kept() {
        let e = assemble("reward(o): f(\n", &["fn f() -> float: 1.0"]).unwrap_err();
        assert_eq!(e[0].code, codes::SYNTAX);
        let e = assemble("reward(o): g()\n", &["fn f() -> float: 1.0"]).unwrap_err();
        assert_eq!(e[0].code, codes::UNKNOWN_FUNCTION);
    }

    #[test]
    fn prose_reply_fails_once_with_transcript() {
        let req = SynthesisRequest::new(Game::Pong, Mode::Full);
        let mut client = CannedClient("Sorry, I can't do that.".into());
        let err = run_pipeline(&req, &mut client).unwrap_err();
        assert_eq!(err.stage, FailureStage::Extraction);
        // system, first prompt, the prose reply; nothing after it.
        assert_eq!(err.transcript.roles(), vec![Role::System, Role::User, Role::Assistant]);
        assert!(matches!(err.transcript.outcome, Outcome::Failed { .. }));
    }

    #[test]
    fn invalid_program_is_not_retried() {
        struct Counting(usize);
        impl ChatClient for Counting {
            fn complete(&mut self, _: &ChatRequest<'_>) -> Result<String, crate::synthesis::ClientError> {
                self.0 += 1;
                Ok("```\nreward(o): true\n```".into())
            }
        }
        let mut c = Counting(0);
        let err = run_pipeline(&SynthesisRequest::new(Game::Freeway, Mode::NoRelations), &mut c).unwrap_err();
        assert_eq!(err.stage, FailureStage::Validation);
        assert_eq!(c.0, 1);
        assert_eq!(err.transcript.messages.len(), 3);
    }
}
