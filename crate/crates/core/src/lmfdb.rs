//! Weight 2 newform data from the LMFDB, with an on-disk cache and
//! bundled offline fixtures.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::serre_mazur::{LmfdbNewform, NewformRecord};

pub const CACHE_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_BASE_URL: &str = "https://www.lmfdb.org";
pub const BASE_URL_ENV: &str = "LMFDB_BASE_URL";
pub const CACHE_DIR_ENV: &str = "SUNIT_CACHE_DIR";

const FIELDS: &str = "label,level,weight,char_orbit_index,field_poly,hecke_ring_rank,hecke_ring_power_basis,\
hecke_ring_numerators,hecke_ring_denominators,maxp,ap";

macro_rules! bundled {
    ($($n:literal),*) => {
        &[$(($n, include_str!(concat!("../fixtures/newforms/level_", stringify!($n), ".json")))),*]
    };
}

/// Payloads shipped with the crate, keyed by level.
pub const BUNDLED: &[(u64, &str)] = bundled!(2, 6, 10, 14, 22, 26, 34, 38, 46, 58, 62, 74, 82, 86);

#[derive(Clone, Debug)]
pub struct ClientConfig {
    pub base_url: String,
    pub cache_dir: Option<PathBuf>,
    /// Directory of `level_N.json` payloads; the bundled set is used when absent.
    pub fixtures_dir: Option<PathBuf>,
    pub offline: bool,
    pub timeout: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            cache_dir: None,
            fixtures_dir: None,
            offline: false,
            timeout: Duration::from_secs(30),
        }
    }
}

impl ClientConfig {
    /// Defaults overridden by `LMFDB_BASE_URL` and `SUNIT_CACHE_DIR`.
    pub fn from_env() -> Self {
        let mut c = ClientConfig::default();
        if let Ok(u) = std::env::var(BASE_URL_ENV) {
            c.base_url = u;
        }
        if let Ok(d) = std::env::var(CACHE_DIR_ENV) {
            c.cache_dir = Some(PathBuf::from(d));
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub level: u64,
    pub weight: u32,
    /// Unix seconds.
    pub retrieved_at: u64,
    /// SHA-256 of `payload`, hex.
    pub digest: String,
    pub payload: String,
    pub forms: Vec<LmfdbNewform>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Cache,
    Network,
    Fixture,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WarmSummary {
    pub fetched: usize,
    pub hits: usize,
    pub missed: usize,
    /// (level, number of forms) for every level that resolved.
    pub entries: Vec<(u64, usize)>,
}

#[derive(Deserialize)]
struct Payload {
    data: Vec<LmfdbNewform>,
}

pub fn digest(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

/// Parse an API payload into the weight 2, trivial character forms at `level`.
pub fn parse_payload(level: u64, payload: &str) -> Result<(Vec<LmfdbNewform>, Vec<NewformRecord>)> {
    let d = digest(payload);
    let p: Payload = serde_json::from_str(payload).map_err(|e| Error::Parse { digest: d.clone(), message: e.to_string() })?;
    let mut raw: Vec<LmfdbNewform> = p
        .data
        .into_iter()
        .filter(|f| f.level == level && f.weight == 2 && f.char_orbit_index.unwrap_or(1) == 1)
        .collect();
    raw.sort_by(|a, b| a.label.cmp(&b.label));
    let recs = raw
        .iter()
        .map(NewformRecord::from_lmfdb)
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Parse { digest: d.clone(), message: e.to_string() })?;
    Ok((raw, recs))
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

pub struct LmfdbClient {
    cfg: ClientConfig,
}

impl LmfdbClient {
    pub fn new(cfg: ClientConfig) -> Self {
        LmfdbClient { cfg }
    }

    pub fn config(&self) -> &ClientConfig {
        &self.cfg
    }

    fn cache_path(&self, level: u64) -> Option<PathBuf> {
        self.cfg
            .cache_dir
            .as_ref()
            .map(|d| d.join(format!("newforms_w2_l{level}_v{CACHE_SCHEMA_VERSION}.json")))
    }

    pub fn url_for(&self, level: u64) -> String {
        format!(
            "{}/api/mf_hecke_nf/?level={level}&weight=2&char_orbit_index=1&_format=json&_fields={FIELDS}",
            self.cfg.base_url.trim_end_matches('/')
        )
    }

    pub fn fetch_newforms(&self, level: u64) -> Result<Vec<NewformRecord>> {
        Ok(self.fetch_with_source(level)?.0)
    }

    /// Cache, then network (or fixtures when offline); successful fetches
    /// are written back to the cache.
    pub fn fetch_with_source(&self, level: u64) -> Result<(Vec<NewformRecord>, Source)> {
        if level == 0 {
            return Err(Error::Domain("level must be positive".into()));
        }
        if let Some(recs) = self.read_cache(level)? {
            return Ok((recs, Source::Cache));
        }
        let (payload, source) = if self.cfg.offline {
            (self.fixture_payload(level)?, Source::Fixture)
        } else {
            (self.http_get(level)?, Source::Network)
        };
        let (raw, recs) = parse_payload(level, &payload)?;
        self.write_cache(level, payload, raw)?;
        Ok((recs, source))
    }

    fn read_cache(&self, level: u64) -> Result<Option<Vec<NewformRecord>>> {
        let Some(path) = self.cache_path(level) else { return Ok(None) };
        let Ok(text) = fs::read_to_string(&path) else { return Ok(None) };
        let entry: CacheEntry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => {
                warn!("ignoring unreadable cache entry {}: {e}", path.display());
                return Ok(None);
            }
        };
        if entry.schema_version != CACHE_SCHEMA_VERSION || entry.level != level || entry.digest != digest(&entry.payload) {
            warn!("ignoring stale or corrupt cache entry {}", path.display());
            return Ok(None);
        }
        let recs = entry
            .forms
            .iter()
            .map(NewformRecord::from_lmfdb)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Parse { digest: entry.digest.clone(), message: e.to_string() })?;
        debug!("cache hit for level {level}");
        Ok(Some(recs))
    }

    fn write_cache(&self, level: u64, payload: String, forms: Vec<LmfdbNewform>) -> Result<()> {
        let Some(path) = self.cache_path(level) else { return Ok(()) };
        let dir = path.parent().expect("cache file has a parent");
        fs::create_dir_all(dir)?;
        let entry = CacheEntry {
            schema_version: CACHE_SCHEMA_VERSION,
            level,
            weight: 2,
            retrieved_at: now(),
            digest: digest(&payload),
            payload,
            forms,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer_pretty(&mut tmp, &entry)?;
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
        Ok(())
    }

    fn fixture_payload(&self, level: u64) -> Result<String> {
        match &self.cfg.fixtures_dir {
            Some(dir) => {
                let p = dir.join(format!("level_{level}.json"));
                fs::read_to_string(&p).map_err(|_| Error::MissingFixture(format!("no fixture for level {level} in {}", dir.display())))
            }
            None => BUNDLED
                .iter()
                .find(|(l, _)| *l == level)
                .map(|(_, s)| s.to_string())
                .ok_or_else(|| Error::MissingFixture(format!("no bundled fixture for level {level}"))),
        }
    }

    fn http_get(&self, level: u64) -> Result<String> {
        let url = self.url_for(level);
        info!("GET {url}");
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(self.cfg.timeout)).build().into();
        let mut resp = agent.get(&url).call().map_err(|e| Error::Transport(format!("{url}: {e}")))?;
        resp.body_mut()
            .read_to_string()
            .map_err(|e| Error::Transport(format!("{url}: {e}")))
    }

    pub fn warm_cache(&self, levels: &[u64]) -> WarmSummary {
        let mut s = WarmSummary::default();
        for &l in levels {
            match self.fetch_with_source(l) {
                Ok((recs, src)) => {
                    if src == Source::Cache {
                        s.hits += 1;
                    } else {
                        s.fetched += 1;
                    }
                    s.entries.push((l, recs.len()));
                }
                Err(e) => {
                    warn!("level {l}: {e}");
                    s.missed += 1;
                }
            }
        }
        s
    }

    /// Remove every cache entry written by this client; returns the count.
    pub fn purge_cache(&self) -> Result<usize> {
        let Some(dir) = &self.cfg.cache_dir else { return Ok(0) };
        purge_dir(dir)
    }
}

fn purge_dir(dir: &Path) -> Result<usize> {
    let Ok(rd) = fs::read_dir(dir) else { return Ok(0) };
    let mut n = 0;
    for e in rd {
        let p = e?.path();
        let name = p.file_name().and_then(|s| s.to_str()).unwrap_or("");
        if name.starts_with("newforms_w2_l") && name.ends_with(".json") {
            fs::remove_file(&p)?;
            n += 1;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn offline(dir: &Path) -> LmfdbClient {
        LmfdbClient::new(ClientConfig { cache_dir: Some(dir.to_path_buf()), offline: true, ..Default::default() })
    }

    #[test]
    fn bundled_levels_parse() {
        for (l, s) in BUNDLED {
            let (_, recs) = parse_payload(*l, s).unwrap();
            assert!(recs.iter().all(|r| r.level == *l));
        }
    }

    #[test]
    fn warm_then_hit() {
        let tmp = tempfile::tempdir().unwrap();
        let c = offline(tmp.path());
        let first = c.warm_cache(&[2, 6, 10, 22]);
        assert_eq!((first.fetched, first.hits, first.missed), (4, 0, 0));
        assert!(first.entries.iter().all(|e| e.1 == 0));
        let second = c.warm_cache(&[2, 6, 10, 22]);
        assert_eq!((second.fetched, second.hits), (0, 4));
    }

    #[test]
    fn purge_then_missing_fixture() {
        let tmp = tempfile::tempdir().unwrap();
        let c = offline(tmp.path());
        c.fetch_newforms(14).unwrap();
        assert_eq!(c.purge_cache().unwrap(), 1);
        assert!(matches!(c.fetch_newforms(998), Err(Error::MissingFixture(_))));
    }

    #[test]
    fn malformed_payload_reports_digest() {
        let err = parse_payload(14, "{\"data\": 3}").unwrap_err();
        match err {
            Error::Parse { digest: d, .. } => assert_eq!(d, digest("{\"data\": 3}")),
            e => panic!("unexpected {e}"),
        }
    }
}
