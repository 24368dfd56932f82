//! Key files, signing and verification.
//!
//! Every file is a binary envelope. Key envelopes carry the JSON profile
//! they were generated under, so `sign` and `verify` rebuild the exact
//! scheme without being told which profile to use.

use std::fs;
use std::path::{Path, PathBuf};

use botsig::profile::Profile;
use botsig::signatures::envelope::{
    open_key, open_signature, seal_key, seal_signature, AnyScheme, AnySigningKey, AnyVerifyingKey, SchemeKind, MAGIC,
};
use botsig::signatures::{SignatureScheme, Verdict};
use botsig::{Bits, RandomTape};
use serde_json::json;

use crate::{CliResult, Format, UsageError};

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn with_suffix(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn scheme_for(context: &[u8], kind: SchemeKind, path: &Path) -> CliResult<AnyScheme> {
    let json =
        std::str::from_utf8(context).map_err(|_| UsageError(format!("{}: profile is not UTF-8", path.display())))?;
    let profile = Profile::from_json(json).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    Ok(profile.build(kind)?)
}

fn load_key<K: botsig::codec::Decode>(path: &Path) -> CliResult<(Vec<u8>, K)> {
    open_key(&read(path)?).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

fn parse_message(hex: &str, scheme: &AnyScheme) -> CliResult<Bits> {
    let len = scheme.message_len();
    Bits::from_hex(hex.trim_start_matches("0x"), len)
        .map_err(|e| UsageError(format!("message must be {len} bits of hex: {e}")))
}

fn emit(value: serde_json::Value, format: Format) {
    match format {
        Format::Json => println!("{value}"),
        Format::Table => {
            if let Some(map) = value.as_object() {
                for (k, v) in map {
                    let v = v.as_str().map_or_else(|| v.to_string(), str::to_owned);
                    println!("{k:<10} {v}");
                }
            }
        }
    }
}

pub fn keygen(kind: SchemeKind, profile: &str, out: &Path, format: Format, tape: &mut RandomTape) -> CliResult<bool> {
    let profile = Profile::load(profile)?;
    let scheme = profile.build(kind)?;
    let (sk, vk) = scheme.keygen(tape)?;
    let context = profile.to_json();
    let (sk_path, vk_path) = (with_suffix(out, "sk"), with_suffix(out, "vk"));
    write(&sk_path, &seal_key(&sk, context.as_bytes()))?;
    write(&vk_path, &seal_key(&vk, context.as_bytes()))?;
    emit(
        json!({
            "scheme": kind.name(),
            "profile": profile.name,
            "message_len": scheme.message_len(),
            "sk": sk_path.display().to_string(),
            "vk": vk_path.display().to_string(),
        }),
        format,
    );
    Ok(true)
}

/// An aborted signature is still written, and exits 1.
pub fn sign(key: &Path, msg: &str, out: Option<&Path>, format: Format, tape: &mut RandomTape) -> CliResult<bool> {
    let (context, mut sk): (_, AnySigningKey) = load_key(key)?;
    let scheme = scheme_for(&context, sk.kind(), key)?;
    let m = parse_message(msg, &scheme)?;
    let sig = scheme.sign(&mut sk, &m, tape)?;
    // Stateful signers advance their counter; persist before releasing
    // the signature.
    write(key, &seal_key(&sk, &context))?;
    let out = out.map_or_else(|| key.with_extension("sig"), Path::to_path_buf);
    write(&out, &seal_signature(sig.as_ref()))?;
    emit(
        json!({
            "scheme": sk.kind().name(),
            "signature": if sig.is_some() { "ok" } else { "BOT" },
            "out": out.display().to_string(),
        }),
        format,
    );
    Ok(sig.is_some())
}

pub fn verify(vk_path: &Path, msg: &str, sig_path: &Path, format: Format, tape: &mut RandomTape) -> CliResult<bool> {
    let (context, vk): (_, AnyVerifyingKey) = load_key(vk_path)?;
    let scheme = scheme_for(&context, vk.kind(), vk_path)?;
    let m = parse_message(msg, &scheme)?;
    let bytes = read(sig_path)?;
    if !bytes.starts_with(MAGIC) {
        return Err(UsageError(format!("{}: not a signature file", sig_path.display())));
    }
    // A framed file whose body does not decode is a malformed signature,
    // which the verifier rejects like any other.
    let verdict = match open_signature(&bytes) {
        Ok(sig) => scheme.verify(&vk, &m, sig.as_ref(), tape)?,
        Err(_) => Verdict::Reject,
    };
    let verdict_name = match verdict {
        Verdict::Accept => "accept",
        Verdict::Reject => "reject",
        Verdict::Bot => "BOT",
    };
    emit(json!({ "scheme": vk.kind().name(), "verdict": verdict_name }), format);
    Ok(verdict.is_accept())
}
