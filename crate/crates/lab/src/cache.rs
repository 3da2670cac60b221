//! Binary cache of kernel states keyed by weight, domain, degree and
//! quadrature.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bergkern::bergman::{KernelState, StateKind, StateParts};
use bergkern::geometry::{Domain, Weight};
use bergkern::C64;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "BERGKERN_CACHE";

const MAGIC: &[u8; 8] = b"BKSTATE1";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).with_context(|| format!("creating cache dir {}", dir.display()))?;
        Ok(Self { dir })
    }

    /// `--cache DIR` if given, else `$BERGKERN_CACHE`, else no cache.
    pub fn resolve(flag: Option<&Path>) -> Result<Option<Self>> {
        match flag {
            Some(d) => Ok(Some(Self::new(d)?)),
            None => match std::env::var_os(CACHE_ENV) {
                Some(d) if !d.is_empty() => Ok(Some(Self::new(PathBuf::from(d))?)),
                _ => Ok(None),
            },
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &Key) -> PathBuf {
        self.dir.join(format!("{}.bks", sanitize(&key.to_string())))
    }

    pub fn load(&self, key: &Key, weight: &Weight, domain: &Domain) -> Result<Option<KernelState>> {
        let path = self.path_for(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
        };
        let parts = match decode(&bytes) {
            Ok(p) => p,
            Err(e) => {
                log::warn!("cache file {} is unreadable ({e}); rebuilding", path.display());
                return Ok(None);
            }
        };
        if Key::of_parts(&parts) != *key {
            log::warn!("cache file {} holds a different key; ignoring it", path.display());
            return Ok(None);
        }
        Ok(Some(KernelState::from_parts(parts, weight, domain)?))
    }

    pub fn store(&self, state: &KernelState) -> Result<PathBuf> {
        let parts = state.to_parts();
        let path = self.path_for(&Key::of_parts(&parts));
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, encode(&parts)).with_context(|| format!("writing {}", tmp.display()))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Cached state, building and storing it on a miss.
    pub fn get_or_build(&self, weight: &Weight, domain: &Domain, k: usize) -> Result<KernelState> {
        let key = Key::planned(weight, domain, k);
        if let Some(s) = self.load(&key, weight, domain)? {
            log::debug!("cache hit {key}");
            return Ok(s);
        }
        let s = KernelState::build(weight, domain, k)?;
        self.store(&s)?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Key {
    pub weight_id: String,
    pub domain_id: String,
    pub k: usize,
    pub quadrature_id: String,
}

impl Key {
    pub fn planned(weight: &Weight, domain: &Domain, k: usize) -> Self {
        Self { weight_id: weight.id(), domain_id: domain.id(), k, quadrature_id: KernelState::planned_quadrature_id(weight, domain, k) }
    }

    fn of_parts(p: &StateParts) -> Self {
        Self { weight_id: p.weight_id.clone(), domain_id: p.domain_id.clone(), k: p.k, quadrature_id: p.quadrature_id.clone() }
    }
}

impl std::fmt::Display for Key {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_{}_k{}_{}", self.weight_id, self.domain_id, self.k, self.quadrature_id)
    }
}

fn sanitize(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' }).collect()
}

fn kind_tag(k: StateKind) -> u8 {
    match k {
        StateKind::Radial => 0,
        StateKind::Diagonal => 1,
        StateKind::Cholesky => 2,
        StateKind::EigenFloor => 3,
    }
}

pub fn encode(p: &StateParts) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 8 * p.reals.len() + 16 * p.complexes.len() + 8 * p.indices.len());
    out.extend_from_slice(MAGIC);
    for s in [&p.weight_id, &p.domain_id, &p.quadrature_id] {
        out.extend_from_slice(&(s.len() as u64).to_le_bytes());
        out.extend_from_slice(s.as_bytes());
    }
    out.extend_from_slice(&(p.n as u64).to_le_bytes());
    out.extend_from_slice(&(p.k as u64).to_le_bytes());
    out.push(kind_tag(p.kind));
    out.extend_from_slice(&(p.reals.len() as u64).to_le_bytes());
    for x in &p.reals {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out.extend_from_slice(&(p.complexes.len() as u64).to_le_bytes());
    for c in &p.complexes {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out.extend_from_slice(&(p.indices.len() as u64).to_le_bytes());
    for i in &p.indices {
        out.extend_from_slice(&i.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, len: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let Some(end) = end else { bail!("truncated cache file at byte {}", self.pos) };
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn len(&mut self) -> Result<usize> {
        let l = self.u64()? as usize;
        if l > self.bytes.len() {
            bail!("implausible length {l} in cache file");
        }
        Ok(l)
    }

    fn string(&mut self) -> Result<String> {
        let l = self.len()?;
        Ok(String::from_utf8(self.take(l)?.to_vec())?)
    }
}

pub fn decode(bytes: &[u8]) -> Result<StateParts> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(MAGIC.len())? != MAGIC {
        bail!("not a kernel state file");
    }
    let weight_id = r.string()?;
    let domain_id = r.string()?;
    let quadrature_id = r.string()?;
    let n = r.u64()? as usize;
    let k = r.u64()? as usize;
    let kind = match r.take(1)?[0] {
        0 => StateKind::Radial,
        1 => StateKind::Diagonal,
        2 => StateKind::Cholesky,
        3 => StateKind::EigenFloor,
        t => bail!("unknown state kind {t}"),
    };
    let reals = (0..r.len()?).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let complexes = (0..r.len()?).map(|_| Ok(C64::new(r.f64()?, r.f64()?))).collect::<Result<Vec<_>>>()?;
    let indices = (0..r.len()?).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
    if r.pos != bytes.len() {
        bail!("{} trailing bytes in cache file", bytes.len() - r.pos);
    }
    Ok(StateParts { n, k, weight_id, domain_id, quadrature_id, kind, reals, complexes, indices })
}
