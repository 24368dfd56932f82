//! Named parameter sets and the scheme builders that read them.
//!
//! A profile is a JSON document. Two ship with the crate; more can be put
//! in the directory named by `BOTSIG_PROFILE_DIR` as `<name>.json`, or
//! loaded from any path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bot_hash::BotUowhfSpec;
use crate::bot_prf::TreePrfSpec;
use crate::bot_prg::BotPrgSpec;
use crate::error::{Error, Result};
use crate::signatures::amplify::{AmplifiedSuf, AmplifiedUf};
use crate::signatures::envelope::{AnyScheme, SchemeKind};
use crate::signatures::oms::OmsScheme;
use crate::signatures::oms2::Oms2Scheme;
use crate::signatures::tree::{StatefulScheme, StatelessScheme};

pub const PROFILE_DIR_VAR: &str = "BOTSIG_PROFILE_DIR";

const BUILTIN: [(&str, &str); 2] = [
    ("desk-small", include_str!("../profiles/desk-small.json")),
    ("desk-large", include_str!("../profiles/desk-large.json")),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profile {
    pub name: String,
    /// Hash output length; preimages are `2λ` bits.
    pub lambda: usize,
    /// Depth of the signature tree, i.e. its message length.
    pub n: usize,
    /// Hash key length `ℓ`, shared by every hash in the profile.
    pub hash_key_len: usize,
    pub hash_mu: f64,
    pub master_seed_hex: String,
    /// Message length of the standalone one-message scheme.
    pub oms_q: usize,
    /// Message length of the hash-then-sign scheme, which is also the tree
    /// node scheme.
    pub ot_message_len: usize,
    /// Generator of the tree PRF that derives stateless node keys.
    pub prf_prg: BotPrgSpec,
    /// Generator behind the one-way function.
    pub owf_prg: BotPrgSpec,
    pub amp_base: SchemeKind,
    pub amp_suf_p: usize,
    pub amp_uf_reps: usize,
}

impl Profile {
    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(n, _)| *n)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let p: Profile = serde_json::from_str(json).map_err(|e| Error::Decode(format!("profile: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profiles always serialize")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, json)| Self::from_json(json).expect("built-in profiles are valid"))
    }

    /// A path to a JSON file, then `<name>.json` under the profile
    /// directory, then the built-ins.
    pub fn load(name_or_path: &str) -> Result<Self> {
        let direct = Path::new(name_or_path);
        if direct.extension().is_some_and(|e| e == "json") && direct.is_file() {
            return Self::from_file(direct);
        }
        if let Some(dir) = std::env::var_os(PROFILE_DIR_VAR) {
            let candidate = PathBuf::from(dir).join(format!("{name_or_path}.json"));
            if candidate.is_file() {
                return Self::from_file(&candidate);
            }
        }
        Self::builtin(name_or_path).ok_or_else(|| Error::InvalidParameter(format!("unknown profile {name_or_path:?}")))
    }

    fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Decode(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn seed(&self, purpose: &str) -> Result<Vec<u8>> {
        let mut s = hex::decode(&self.master_seed_hex).map_err(|e| Error::Decode(e.to_string()))?;
        s.push(b'/');
        s.extend_from_slice(purpose.as_bytes());
        Ok(s)
    }

    /// The 2:1 hash `{0,1}^{2λ} → {0,1}^λ` used inside one-message keys.
    pub fn compressing_hash(&self, purpose: &str) -> Result<BotUowhfSpec> {
        BotUowhfSpec::new(
            self.hash_key_len,
            2 * self.lambda,
            self.lambda,
            self.hash_mu,
            self.seed(purpose)?,
        )
    }

    pub fn oms(&self) -> Result<OmsScheme> {
        OmsScheme::new(self.compressing_hash("oms")?, self.oms_q)
    }

    pub fn oms2(&self) -> Result<Oms2Scheme> {
        let outer = BotUowhfSpec::new(
            self.hash_key_len,
            self.ot_message_len,
            self.lambda,
            self.hash_mu,
            self.seed("outer")?,
        )?;
        Oms2Scheme::new(outer, self.compressing_hash("inner")?)
    }

    pub fn stateful(&self) -> Result<StatefulScheme> {
        StatefulScheme::new(self.oms2()?, self.n)
    }

    pub fn tree_prf(&self) -> Result<TreePrfSpec> {
        TreePrfSpec::new(self.prf_prg.clone(), 1)
    }

    pub fn stateless(&self) -> Result<StatelessScheme> {
        StatelessScheme::new(self.oms2()?, self.n, &self.tree_prf()?)
    }

    pub fn amp_base_scheme(&self) -> Result<AnyScheme> {
        match self.amp_base {
            SchemeKind::AmpSuf | SchemeKind::AmpUf => {
                Err(Error::InvalidParameter("amplifier base must be a plain scheme".into()))
            }
            kind => self.build(kind),
        }
    }

    pub fn build(&self, kind: SchemeKind) -> Result<AnyScheme> {
        Ok(match kind {
            SchemeKind::Oms => AnyScheme::Oms(self.oms()?),
            SchemeKind::Oms2 => AnyScheme::Oms2(self.oms2()?),
            SchemeKind::Stateful => AnyScheme::Stateful(self.stateful()?),
            SchemeKind::Stateless => AnyScheme::Stateless(self.stateless()?),
            SchemeKind::AmpSuf => {
                AnyScheme::AmpSuf(Box::new(AmplifiedSuf::new(self.amp_base_scheme()?, self.amp_suf_p)?))
            }
            SchemeKind::AmpUf => {
                AnyScheme::AmpUf(Box::new(AmplifiedUf::new(self.amp_base_scheme()?, self.amp_uf_reps)?))
            }
        })
    }

    /// The analytic correctness lower bound for `kind` under this profile.
    pub fn correctness_bound(&self, kind: SchemeKind) -> Result<f64> {
        let mu = self.hash_mu;
        Ok(match kind {
            SchemeKind::Oms => oms_bound(mu, self.oms_q),
            SchemeKind::Oms2 => oms2_bound(mu, self.hash_key_len + self.lambda),
            SchemeKind::Stateful => tree_bound(mu, self.n, self.lambda),
            SchemeKind::Stateless => tree_bound(mu.max(self.prf_prg.base().mu()), self.n, self.lambda),
            SchemeKind::AmpSuf => 1.0 - (1.0 - self.correctness_bound(self.amp_base)?).powi(3 * self.amp_suf_p as i32),
            SchemeKind::AmpUf => 1.0 - (1.0 - self.correctness_bound(self.amp_base)?).powi(self.amp_uf_reps as i32),
        })
    }

    /// Cross-module constraints; every scheme must build.
    pub fn validate(&self) -> Result<()> {
        if self.lambda == 0 || self.hash_key_len == 0 {
            return Err(Error::InvalidParameter(
                "lambda and hash_key_len must be positive".into(),
            ));
        }
        let owf = &self.owf_prg;
        if owf.out_len() < 3 * owf.composite_key_len() {
            return Err(Error::PreconditionViolated(format!(
                "one-way function needs output {} >= 3 x key {}",
                owf.out_len(),
                owf.composite_key_len()
            )));
        }
        for kind in SchemeKind::ALL {
            self.build(kind)
                .map_err(|e| Error::InvalidParameter(format!("profile {:?}, scheme {kind}: {e}", self.name)))?;
        }
        Ok(())
    }
}

/// `(1 − μ)^{4q}`.
pub fn oms_bound(mu: f64, q: usize) -> f64 {
    (1.0 - mu).powi(4 * q as i32)
}

/// `(1 − μ)^{2q + 3}` for `q` inner message bits.
pub fn oms2_bound(mu: f64, q: usize) -> f64 {
    (1.0 - mu).powi(2 * q as i32 + 3)
}

/// `(1 − μ)^{4nλ + 10n}`.
pub fn tree_bound(mu: f64, n: usize, lambda: usize) -> f64 {
    (1.0 - mu).powi((4 * n * lambda + 10 * n) as i32)
}
