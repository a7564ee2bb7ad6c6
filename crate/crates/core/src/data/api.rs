//! Champion mastery ingestion from the game API.
//!
//! Live mode resolves a summoner name to its encrypted summoner id and then
//! lists every champion mastery entry for it. Requests go through a client
//! side token bucket, and throttle responses (HTTP 429) are retried with
//! bounded exponential backoff. Fixture mode reads
//! `<fixture_dir>/<summoner name>.json`, a mastery-entry array in the wire
//! format, and never touches the transport.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratings::MasteryRecord;

pub const API_KEY_ENV: &str = "RIOT_API_KEY";
const TOKEN_HEADER: &str = "X-Riot-Token";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApiMode {
    Live,
    Fixture,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApiConfig {
    /// Defaults to `https://<region>.api.riotgames.com` when empty.
    pub base_url: String,
    /// Only ever read from the environment.
    #[serde(skip)]
    pub api_key: Option<String>,
    pub region: String,
    pub mode: ApiMode,
    pub fixture_dir: PathBuf,
    /// Token bucket capacity: requests allowed per `window_secs`.
    pub max_requests: u32,
    pub window_secs: f64,
    pub timeout_secs: f64,
    /// Retries after a throttle response before giving up.
    pub max_retries: u32,
    pub backoff_base_ms: u64,
    pub backoff_max_ms: u64,
}

impl Default for ApiConfig {
    fn default() -> Self {
        Self {
            base_url: String::new(),
            api_key: None,
            region: "na1".into(),
            mode: ApiMode::Fixture,
            fixture_dir: PathBuf::from("fixtures"),
            max_requests: 20,
            window_secs: 1.0,
            timeout_secs: 10.0,
            max_retries: 4,
            backoff_base_ms: 500,
            backoff_max_ms: 16_000,
        }
    }
}

impl ApiConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("api config: {e}")))
    }

    /// Reads the API key from the environment.
    pub fn with_env_key(mut self) -> Self {
        self.api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        self
    }

    pub fn base_url(&self) -> String {
        if self.base_url.is_empty() {
            format!("https://{}.api.riotgames.com", self.region)
        } else {
            self.base_url.trim_end_matches('/').to_string()
        }
    }

    fn backoff(&self, attempt: u32, retry_after: Option<Duration>) -> Duration {
        let exp = self
            .backoff_base_ms
            .saturating_mul(1u64 << attempt.min(32));
        let wait = Duration::from_millis(exp.min(self.backoff_max_ms));
        let cap = Duration::from_millis(self.backoff_max_ms);
        retry_after.map_or(wait, |ra| ra.max(wait)).min(cap)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
    pub retry_after: Option<Duration>,
}

/// A blocking HTTP GET.
pub trait Transport: Send + Sync {
    fn get(&self, url: &str, headers: &[(&str, &str)]) -> Result<HttpResponse>;
}

pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        Self {
            agent: config.into(),
        }
    }
}

impl Transport for UreqTransport {
    fn get(&self, url: &str, headers: &[(&str, &str)]) -> Result<HttpResponse> {
        let mut req = self.agent.get(url);
        for &(k, v) in headers {
            req = req.header(k, v);
        }
        let mut resp = req.call().map_err(|e| Error::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<u64>().ok())
            .map(Duration::from_secs);
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| Error::Transport(e.to_string()))?;
        Ok(HttpResponse {
            status,
            body,
            retry_after,
        })
    }
}

/// Token bucket: `capacity` requests, refilled continuously over `window`.
pub struct RateLimiter {
    capacity: f64,
    refill_per_sec: f64,
    state: Mutex<(f64, Instant)>,
}

impl RateLimiter {
    pub fn new(capacity: u32, window: Duration) -> Self {
        let capacity = f64::from(capacity.max(1));
        Self {
            capacity,
            refill_per_sec: capacity / window.as_secs_f64().max(1e-9),
            state: Mutex::new((capacity, Instant::now())),
        }
    }

    /// Blocks until a token is available and takes it.
    pub fn acquire(&self) {
        let mut state = self.state.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            let now = Instant::now();
            let (tokens, last) = *state;
            let tokens = (tokens + now.duration_since(last).as_secs_f64() * self.refill_per_sec)
                .min(self.capacity);
            if tokens >= 1.0 {
                *state = (tokens - 1.0, now);
                return;
            }
            *state = (tokens, now);
            std::thread::sleep(Duration::from_secs_f64((1.0 - tokens) / self.refill_per_sec));
        }
    }
}

#[derive(Debug, Deserialize)]
struct WireSummoner {
    id: String,
}

#[derive(Debug, Deserialize)]
struct WireMastery {
    #[serde(rename = "championId")]
    champion_id: u32,
    #[serde(rename = "championPoints")]
    champion_points: u64,
}

fn to_records(player: &str, body: &str) -> Result<Vec<MasteryRecord>> {
    let entries: Vec<WireMastery> = serde_json::from_str(body)
        .map_err(|e| Error::Protocol(format!("mastery list: {e}")))?;
    let mut seen = HashSet::new();
    entries
        .into_iter()
        .map(|e| {
            if !seen.insert(e.champion_id) {
                return Err(Error::Protocol(format!(
                    "champion {} listed twice",
                    e.champion_id
                )));
            }
            Ok(MasteryRecord::new(player, e.champion_id, e.champion_points))
        })
        .collect()
}

fn fixture_path(dir: &Path, summoner: &str) -> Result<PathBuf> {
    if summoner.is_empty() || summoner.contains(['/', '\\']) || summoner.starts_with('.') {
        return Err(Error::invalid(format!("summoner name {summoner:?} cannot name a fixture")));
    }
    Ok(dir.join(format!("{summoner}.json")))
}

pub struct ApiClient {
    config: ApiConfig,
    transport: Box<dyn Transport>,
    limiter: RateLimiter,
}

impl ApiClient {
    pub fn new(config: ApiConfig) -> Self {
        let transport = UreqTransport::new(Duration::from_secs_f64(config.timeout_secs.max(0.001)));
        Self::with_transport(config, Box::new(transport))
    }

    pub fn with_transport(config: ApiConfig, transport: Box<dyn Transport>) -> Self {
        let limiter = RateLimiter::new(
            config.max_requests,
            Duration::from_secs_f64(config.window_secs.max(0.0)),
        );
        Self {
            config,
            transport,
            limiter,
        }
    }

    pub fn config(&self) -> &ApiConfig {
        &self.config
    }

    /// Issues a rate-limited GET, retrying throttle responses.
    fn get(&self, url: &str) -> Result<HttpResponse> {
        let key = self
            .config
            .api_key
            .as_deref()
            .ok_or_else(|| Error::invalid(format!("live mode needs {API_KEY_ENV} to be set")))?;
        let mut attempt = 0;
        loop {
            self.limiter.acquire();
            let resp = self.transport.get(url, &[(TOKEN_HEADER, key)])?;
            if resp.status != 429 {
                return Ok(resp);
            }
            if attempt >= self.config.max_retries {
                return Err(Error::RateLimited {
                    attempts: attempt + 1,
                });
            }
            std::thread::sleep(self.config.backoff(attempt, resp.retry_after));
            attempt += 1;
        }
    }

    fn expect_ok(resp: HttpResponse, what: &str) -> Result<String> {
        match resp.status {
            200..=299 => Ok(resp.body),
            s => Err(Error::Protocol(format!("{what}: unexpected HTTP status {s}"))),
        }
    }

    /// Every champion mastery entry of `summoner`, zero-point entries included.
    pub fn fetch_player_masteries(&self, summoner: &str) -> Result<Vec<MasteryRecord>> {
        match self.config.mode {
            ApiMode::Fixture => {
                let path = fixture_path(&self.config.fixture_dir, summoner)?;
                let body = match fs::read_to_string(&path) {
                    Ok(b) => b,
                    Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                        return Err(Error::SummonerNotFound(summoner.to_string()))
                    }
                    Err(e) => return Err(e.into()),
                };
                to_records(summoner, &body)
            }
            ApiMode::Live => {
                let base = self.config.base_url();
                let url = format!(
                    "{base}/lol/summoner/v4/summoners/by-name/{}",
                    encode_path_segment(summoner)
                );
                let resp = self.get(&url)?;
                if resp.status == 404 {
                    return Err(Error::SummonerNotFound(summoner.to_string()));
                }
                let body = Self::expect_ok(resp, "summoner lookup")?;
                let who: WireSummoner = serde_json::from_str(&body)
                    .map_err(|e| Error::Protocol(format!("summoner lookup: {e}")))?;
                let url = format!(
                    "{base}/lol/champion-mastery/v4/champion-masteries/by-summoner/{}",
                    encode_path_segment(&who.id)
                );
                let body = Self::expect_ok(self.get(&url)?, "mastery list")?;
                to_records(summoner, &body)
            }
        }
    }
}

pub fn fetch_player_masteries(summoner: &str, config: &ApiConfig) -> Result<Vec<MasteryRecord>> {
    ApiClient::new(config.clone()).fetch_player_masteries(summoner)
}

fn encode_path_segment(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for b in s.bytes() {
        match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' | b'~' => out.push(b as char),
            _ => out.push_str(&format!("%{b:02X}")),
        }
    }
    out
}
