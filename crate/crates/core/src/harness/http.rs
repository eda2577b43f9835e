//! Generic text-completion endpoint client.
//!
//! Speaks the de-facto completion API shape: `POST <base>/completions` with
//! body `{model, prompt, max_tokens, temperature}`, completion text read
//! from `choices[0].text`, auth via `Authorization: Bearer <token>` with the
//! token taken from a configurable environment variable.

use std::time::Duration;

use crate::harness::{Corrector, CorrectorError, HarnessError, PromptConfig};

pub const DEFAULT_AUTH_ENV: &str = "GECSTRAT_API_KEY";

#[derive(Debug, Clone, PartialEq)]
pub struct CompletionEndpoint {
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub auth_env: String,
    pub timeout: Duration,
    pub max_in_flight: usize,
    pub max_attempts: usize,
    pub backoff_base: Duration,
}

impl Default for CompletionEndpoint {
    fn default() -> Self {
        CompletionEndpoint {
            base_url: String::new(),
            model: "gpt2-xl".to_string(),
            auth_env: DEFAULT_AUTH_ENV.to_string(),
            timeout: Duration::from_secs(30),
            max_in_flight: 4,
            max_attempts: 3,
            backoff_base: Duration::from_millis(250),
        }
    }
}

impl CompletionEndpoint {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !self.base_url.starts_with("http://") && !self.base_url.starts_with("https://") {
            return Err(HarnessError::BadEndpoint(format!(
                "base_url {:?} must start with http:// or https://",
                self.base_url
            )));
        }
        if self.model.is_empty() {
            return Err(HarnessError::BadEndpoint("model must be nonempty".to_string()));
        }
        if self.max_in_flight < 1 {
            return Err(HarnessError::BadEndpoint(
                "max_in_flight must be at least 1".to_string(),
            ));
        }
        if self.max_attempts < 1 {
            return Err(HarnessError::BadEndpoint(
                "max_attempts must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

pub struct HttpCorrector {
    url: String,
    model: String,
    token: String,
    max_tokens: u64,
    temperature: f64,
    agent: ureq::Agent,
}

impl HttpCorrector {
    /// Validates the endpoint and reads the auth token; both fail before any
    /// request is sent.
    pub fn new(endpoint: &CompletionEndpoint, cfg: &PromptConfig) -> Result<Self, HarnessError> {
        endpoint.validate()?;
        let token = std::env::var(&endpoint.auth_env)
            .ok()
            .filter(|t| !t.is_empty())
            .ok_or_else(|| HarnessError::MissingAuthToken {
                var: endpoint.auth_env.clone(),
            })?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(endpoint.timeout))
            .build()
            .into();
        Ok(HttpCorrector {
            url: format!("{}/completions", endpoint.base_url.trim_end_matches('/')),
            model: endpoint.model.clone(),
            token,
            max_tokens: cfg
                .sampling
                .max_output_tokens
                .unwrap_or(cfg.token_budget() as u64),
            temperature: cfg.sampling.temperature,
            agent,
        })
    }
}

impl Corrector for HttpCorrector {
    fn name(&self) -> &str {
        "http"
    }

    fn complete(&self, prompt: &str) -> Result<String, CorrectorError> {
        let body = serde_json::json!({
            "model": self.model,
            "prompt": prompt,
            "max_tokens": self.max_tokens,
            "temperature": self.temperature,
        });
        let response = self
            .agent
            .post(&self.url)
            .header("Authorization", &format!("Bearer {}", self.token))
            .send_json(&body);
        match response {
            Ok(mut response) => {
                let value: serde_json::Value = response
                    .body_mut()
                    .read_json()
                    .map_err(|e| CorrectorError::Transient(format!("unreadable response body: {e}")))?;
                value["choices"][0]["text"]
                    .as_str()
                    .map(str::to_string)
                    .ok_or_else(|| {
                        CorrectorError::Transient("response body has no choices[0].text".to_string())
                    })
            }
            Err(ureq::Error::StatusCode(code)) if code == 429 || code >= 500 => {
                Err(CorrectorError::Transient(format!("endpoint returned {code}")))
            }
            Err(ureq::Error::StatusCode(code)) => {
                Err(CorrectorError::Fatal(format!("endpoint returned {code}")))
            }
            Err(e) => Err(CorrectorError::Transient(format!("transport error: {e}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_validation_catches_misconfiguration() {
        let mut endpoint = CompletionEndpoint::default();
        assert!(endpoint.validate().is_err());
        endpoint.base_url = "http://localhost:9".to_string();
        assert!(endpoint.validate().is_ok());
        endpoint.max_in_flight = 0;
        assert!(endpoint.validate().is_err());
    }

    #[test]
    fn missing_token_fails_before_any_request() {
        let endpoint = CompletionEndpoint {
            base_url: "http://localhost:9".to_string(),
            auth_env: "GECSTRAT_TEST_TOKEN_UNSET".to_string(),
            ..CompletionEndpoint::default()
        };
        match HttpCorrector::new(&endpoint, &PromptConfig::default()) {
            Err(HarnessError::MissingAuthToken { var }) => {
                assert_eq!(var, "GECSTRAT_TEST_TOKEN_UNSET")
            }
            Err(other) => panic!("expected missing token, got {other:?}"),
            Ok(_) => panic!("expected missing token, got a corrector"),
        }
    }

    #[test]
    fn max_tokens_defaults_to_the_budget() {
        std::env::set_var("GECSTRAT_TEST_TOKEN_SET", "secret");
        let endpoint = CompletionEndpoint {
            base_url: "http://localhost:9".to_string(),
            auth_env: "GECSTRAT_TEST_TOKEN_SET".to_string(),
            ..CompletionEndpoint::default()
        };
        let zero_shot = HttpCorrector::new(&endpoint, &PromptConfig::default()).unwrap();
        assert_eq!(zero_shot.max_tokens, 256);
        let four_shot = HttpCorrector::new(&endpoint, &PromptConfig::with_shots(4)).unwrap();
        assert_eq!(four_shot.max_tokens, 512);
        let mut cfg = PromptConfig::default();
        cfg.sampling.max_output_tokens = Some(64);
        let capped = HttpCorrector::new(&endpoint, &cfg).unwrap();
        assert_eq!(capped.max_tokens, 64);
    }
}
