//! HTTP client for an external scoring service.
//!
//! `POST {endpoint}/score` with body
//! `{"concept": str, "width": int, "height": int, "pixels_b64": str}` where
//! the pixels are raw little-endian `f32` values, RGB channel-major. The
//! response is `{"aesthetic": number, "alignment": number}`; any non-200
//! status is a failure.

use std::time::Duration;

use base64::engine::general_purpose::STANDARD as BASE64;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::scorer::{LocalProxy, Scorer, ScorerSource, Scores, UsabilityContext, SCORE_MAX};
use crate::image::Image;
use crate::{Error, Result};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);
pub const DEFAULT_RETRIES: u32 = 2;

#[derive(Serialize)]
struct ScoreRequest<'a> {
    concept: &'a str,
    width: usize,
    height: usize,
    pixels_b64: String,
}

#[derive(Deserialize)]
struct ScoreResponse {
    aesthetic: f64,
    alignment: f64,
}

/// Encodes the request body for `image`.
pub fn encode_request(image: &Image, concept: &str) -> Result<String> {
    let mut raw = Vec::with_capacity(image.pixels().len() * 4);
    for v in image.pixels().data() {
        raw.extend_from_slice(&v.to_le_bytes());
    }
    Ok(serde_json::to_string(&ScoreRequest {
        concept,
        width: image.size(),
        height: image.size(),
        pixels_b64: BASE64.encode(raw),
    })?)
}

/// Parses a response body, clamping both scores into `[0, 10]`.
pub fn decode_response(body: &str) -> Result<Scores> {
    let r: ScoreResponse =
        serde_json::from_str(body).map_err(|e| Error::Protocol(format!("malformed response: {e}")))?;
    if !r.aesthetic.is_finite() || !r.alignment.is_finite() {
        return Err(Error::Protocol("non-finite score in response".into()));
    }
    Ok(Scores {
        aesthetic: r.aesthetic.clamp(0.0, SCORE_MAX),
        alignment: r.alignment.clamp(0.0, SCORE_MAX),
    })
}

/// Blocking client; cheap to clone and safe to share across threads.
#[derive(Clone, Debug)]
pub struct RemoteClient {
    endpoint: String,
    retries: u32,
    agent: ureq::Agent,
}

impl RemoteClient {
    pub fn new(endpoint: impl Into<String>, timeout: Duration, retries: u32) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(timeout).build();
        Self {
            endpoint: endpoint.into().trim_end_matches('/').to_owned(),
            retries,
            agent,
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    /// Scores one image, retrying network failures and non-200 responses up
    /// to `retries` times before reporting the scorer unavailable.
    pub fn score_remote(&self, image: &Image, concept: &str) -> Result<Scores> {
        let body = encode_request(image, concept)?;
        let url = format!("{}/score", self.endpoint);
        let mut last_error = String::new();
        for _ in 0..=self.retries {
            match self
                .agent
                .post(&url)
                .set("Content-Type", "application/json")
                .send_string(&body)
            {
                Ok(resp) if resp.status() == 200 => {
                    let text = resp
                        .into_string()
                        .map_err(|e| Error::Protocol(format!("unreadable response: {e}")))?;
                    return decode_response(&text);
                }
                Ok(resp) => last_error = format!("status {}", resp.status()),
                Err(ureq::Error::Status(code, _)) => last_error = format!("status {code}"),
                Err(ureq::Error::Transport(t)) => last_error = t.to_string(),
            }
        }
        Err(Error::ScorerUnavailable(format!(
            "{url} failed after {} attempts: {last_error}",
            self.retries + 1
        )))
    }
}

/// Scorer backed by [`RemoteClient`], optionally falling back to the local
/// proxies when the service is unavailable.
#[derive(Clone, Debug)]
pub struct RemoteScorer {
    pub client: RemoteClient,
    pub fallback: Option<LocalProxy>,
}

impl Scorer for RemoteScorer {
    fn score(&self, image: &Image, ctx: &UsabilityContext) -> Result<Scores> {
        match self.client.score_remote(image, &ctx.conditioning.concept) {
            Err(Error::ScorerUnavailable(_)) if self.fallback.is_some() => {
                self.fallback.as_ref().unwrap().score(image, ctx)
            }
            other => other,
        }
    }

    fn source(&self) -> ScorerSource {
        ScorerSource::Remote
    }
}
