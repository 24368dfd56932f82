//! Many-message signatures from an authentication tree of one-message keys.
//!
//! Every node of a depth-`n` binary tree owns a one-message key pair. A
//! node signs the concatenated verification keys of its two children; the
//! leaf reached by the message bits signs the message. A signature is the
//! chain of `n` links from the root plus the leaf signature.
//!
//! The stateful scheme samples node keys lazily and remembers them. The
//! stateless scheme re-derives each node key on demand from ⊥-PRF output,
//! so it needs no memory; any PRF abort aborts the signature.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bits::Bits;
use crate::bot_core::BotValue;
use crate::bot_prf::TreePrfSpec;
use crate::codec::{Decode, Encode, Reader, Writer};
use crate::error::{check_len, Error, Result};
use crate::signatures::oms2::{Oms2Scheme, Oms2Signature, Oms2SigningKey, Oms2VerifyingKey};
use crate::signatures::{SignatureScheme, Verdict};
use crate::tape::{CoinReader, RandomTape};

type KeyPair = (Oms2SigningKey, Oms2VerifyingKey);

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeEntry {
    pub keypair: Option<KeyPair>,
    /// Signature on the two children's verification keys.
    pub child_sig: Option<Oms2Signature>,
}

/// Signer memory, keyed by node label (the path below the root).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeMemory {
    nodes: BTreeMap<Bits, NodeEntry>,
}

impl TreeMemory {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, label: &Bits) -> Option<&NodeEntry> {
        self.nodes.get(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Bits, &NodeEntry)> {
        self.nodes.iter()
    }

    pub fn keypair(&self, label: &Bits) -> Option<&KeyPair> {
        self.nodes.get(label)?.keypair.as_ref()
    }

    pub fn child_sig(&self, label: &Bits) -> Option<&Oms2Signature> {
        self.nodes.get(label)?.child_sig.as_ref()
    }

    fn insert_keypair(&mut self, label: Bits, kp: KeyPair) {
        self.nodes.entry(label).or_default().keypair = Some(kp);
    }

    fn insert_child_sig(&mut self, label: Bits, sig: Oms2Signature) {
        debug_assert!(self.keypair(&child(&label, false)).is_some());
        debug_assert!(self.keypair(&child(&label, true)).is_some());
        self.nodes.entry(label).or_default().child_sig = Some(sig);
    }
}

fn child(label: &Bits, b: bool) -> Bits {
    let mut c = label.clone();
    c.push(b);
    c
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub sig: Oms2Signature,
    pub vks: [Oms2VerifyingKey; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeSignature {
    pub links: Vec<ChainLink>,
    pub leaf: Oms2Signature,
}

/// Supplies the key-generation coins of a tree node; `None` aborts.
pub trait NodeCoins {
    fn coins(&mut self, label: &Bits, tape: &mut RandomTape) -> Result<Option<Bits>>;
}

/// Fresh coins from the tape.
struct FreshCoins(usize);

impl NodeCoins for FreshCoins {
    fn coins(&mut self, _label: &Bits, tape: &mut RandomTape) -> Result<Option<Bits>> {
        Ok(Some(tape.bits(self.0)))
    }
}

/// The tree shape shared by both schemes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeShape {
    ot: Oms2Scheme,
    n: usize,
}

impl TreeShape {
    pub fn new(ot: Oms2Scheme, n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "message length {n} must be even and positive"
            )));
        }
        if ot.message_len() < 2 * ot.vk_bit_len() {
            return Err(Error::PreconditionViolated(format!(
                "one-message scheme signs {} bits, needs at least twice the {}-bit verification key",
                ot.message_len(),
                ot.vk_bit_len()
            )));
        }
        if ot.message_len() < n {
            return Err(Error::PreconditionViolated("leaf messages do not fit".into()));
        }
        Ok(Self { ot, n })
    }

    pub fn ot(&self) -> &Oms2Scheme {
        &self.ot
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `vk0 ‖ vk1`, zero-padded to the one-message length; `None` if
    /// either key is malformed or has a ⊥ image.
    fn children_message(&self, vks: &[Oms2VerifyingKey; 2]) -> Option<Bits> {
        let a = vks[0].to_bits()?;
        let b = vks[1].to_bits()?;
        if a.len() != self.ot.vk_bit_len() || b.len() != self.ot.vk_bit_len() {
            return None;
        }
        a.concat(&b).pad_to(self.ot.message_len()).ok()
    }

    fn leaf_message(&self, m: &Bits) -> Result<Bits> {
        m.pad_to(self.ot.message_len())
    }

    fn node_keypair(&self, label: &Bits, coins: &mut dyn NodeCoins, tape: &mut RandomTape) -> Result<Option<KeyPair>> {
        let Some(c) = coins.coins(label, tape)? else {
            return Ok(None);
        };
        let mut reader = CoinReader::new(&c);
        let kp = self.ot.keygen_from_coins(&mut reader, tape)?;
        reader.finish()?;
        // A node key with a ⊥ image cannot be signed by its parent.
        Ok(kp.1.to_bits().map(|_| kp))
    }

    /// Walks root to leaf, creating missing nodes in `memory`.
    pub fn sign_with(
        &self,
        root: &Oms2SigningKey,
        memory: &mut TreeMemory,
        m: &Bits,
        coins: &mut dyn NodeCoins,
        tape: &mut RandomTape,
    ) -> Result<Option<TreeSignature>> {
        check_len(self.n, m.len())?;
        let mut node = Bits::empty();
        let mut links = Vec::with_capacity(self.n);
        for bit in m.iter() {
            let kids = [child(&node, false), child(&node, true)];
            if memory.child_sig(&node).is_none() {
                for kid in &kids {
                    if memory.keypair(kid).is_none() {
                        match self.node_keypair(kid, coins, tape)? {
                            Some(kp) => memory.insert_keypair(kid.clone(), kp),
                            None => return Ok(None),
                        }
                    }
                }
                let vks = kids.clone().map(|k| memory.keypair(&k).unwrap().1.clone());
                let msg = self.children_message(&vks).expect("stored keys have no ⊥ images");
                let mut sk = match node.is_empty() {
                    true => root.clone(),
                    false => memory.keypair(&node).unwrap().0.clone(),
                };
                match self.ot.sign(&mut sk, &msg, tape)? {
                    Some(sig) => memory.insert_child_sig(node.clone(), sig),
                    None => return Ok(None),
                }
            }
            links.push(ChainLink {
                sig: memory.child_sig(&node).unwrap().clone(),
                vks: kids.clone().map(|k| memory.keypair(&k).unwrap().1.clone()),
            });
            node = kids[bit as usize].clone();
        }
        let mut leaf_sk = memory.keypair(&node).unwrap().0.clone();
        let leaf = self.ot.sign(&mut leaf_sk, &self.leaf_message(m)?, tape)?;
        Ok(leaf.map(|leaf| TreeSignature { links, leaf }))
    }

    pub fn verify(
        &self,
        root: &Oms2VerifyingKey,
        m: &Bits,
        sig: Option<&TreeSignature>,
        tape: &mut RandomTape,
    ) -> Result<Verdict> {
        check_len(self.n, m.len())?;
        let Some(sig) = sig else {
            return Ok(Verdict::Bot);
        };
        if sig.links.len() != self.n {
            return Ok(Verdict::Reject);
        }
        let mut vk = root;
        for (link, bit) in sig.links.iter().zip(m.iter()) {
            let Some(msg) = self.children_message(&link.vks) else {
                return Ok(Verdict::Reject);
            };
            let v = self.ot.verify(vk, &msg, Some(&link.sig), tape)?;
            if !v.is_accept() {
                return Ok(v);
            }
            vk = &link.vks[bit as usize];
        }
        self.ot.verify(vk, &self.leaf_message(m)?, Some(&sig.leaf), tape)
    }

    fn random_vk(&self, tape: &mut RandomTape) -> Oms2VerifyingKey {
        let inner = self.ot.inner();
        let (kl, ol) = (inner.hash().key_len(), inner.hash().out_len());
        let q = self.ot.outer().key_len() + self.ot.outer().out_len();
        Oms2VerifyingKey {
            keys: (0..q).map(|_| [tape.bits(kl), tape.bits(kl)]).collect(),
            images: (0..q)
                .map(|_| [BotValue::Bits(tape.bits(ol)), BotValue::Bits(tape.bits(ol))])
                .collect(),
        }
    }

    pub fn random_signature(&self, tape: &mut RandomTape) -> TreeSignature {
        TreeSignature {
            links: (0..self.n)
                .map(|_| ChainLink {
                    sig: self.ot.random_signature(tape),
                    vks: [self.random_vk(tape), self.random_vk(tape)],
                })
                .collect(),
            leaf: self.ot.random_signature(tape),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatefulScheme {
    shape: TreeShape,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatefulSigningKey {
    pub root: Oms2SigningKey,
    pub memory: TreeMemory,
}

impl StatefulScheme {
    pub fn new(ot: Oms2Scheme, n: usize) -> Result<Self> {
        Ok(Self {
            shape: TreeShape::new(ot, n)?,
        })
    }

    pub fn shape(&self) -> &TreeShape {
        &self.shape
    }

    /// Signs with node coins from `coins` instead of the tape.
    pub fn sign_with(
        &self,
        sk: &mut StatefulSigningKey,
        m: &Bits,
        coins: &mut dyn NodeCoins,
        tape: &mut RandomTape,
    ) -> Result<Option<TreeSignature>> {
        self.shape.sign_with(&sk.root, &mut sk.memory, m, coins, tape)
    }
}

impl SignatureScheme for StatefulScheme {
    type SigningKey = StatefulSigningKey;
    type VerifyingKey = Oms2VerifyingKey;
    type Signature = TreeSignature;

    fn message_len(&self) -> usize {
        self.shape.n
    }

    fn keygen(&self, tape: &mut RandomTape) -> Result<(StatefulSigningKey, Oms2VerifyingKey)> {
        let (root, vk) = self.shape.ot.keygen(tape)?;
        Ok((
            StatefulSigningKey {
                root,
                memory: TreeMemory::default(),
            },
            vk,
        ))
    }

    fn sign(&self, sk: &mut StatefulSigningKey, m: &Bits, tape: &mut RandomTape) -> Result<Option<TreeSignature>> {
        let mut coins = FreshCoins(self.shape.ot.coin_len());
        self.sign_with(sk, m, &mut coins, tape)
    }

    fn verify(
        &self,
        vk: &Oms2VerifyingKey,
        m: &Bits,
        sig: Option<&TreeSignature>,
        tape: &mut RandomTape,
    ) -> Result<Verdict> {
        self.shape.verify(vk, m, sig, tape)
    }

    fn random_signature(&self, tape: &mut RandomTape) -> TreeSignature {
        self.shape.random_signature(tape)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatelessScheme {
    shape: TreeShape,
    /// `prfs[i - 1]` takes `i + coin_len` input bits.
    prfs: Vec<TreePrfSpec>,
}

/// Root key, one PRF key per level, and two input masks per level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatelessSigningKey {
    pub root: Oms2SigningKey,
    pub prf_keys: Vec<Bits>,
    pub masks: Vec<[Bits; 2]>,
}

impl StatelessScheme {
    /// `prf` fixes the generator; its key and output length must equal the
    /// number of coins one node key consumes.
    pub fn new(ot: Oms2Scheme, n: usize, prf: &TreePrfSpec) -> Result<Self> {
        let shape = TreeShape::new(ot, n)?;
        let coins = shape.ot.coin_len();
        if prf.key_len() != coins {
            return Err(Error::InvalidParameter(format!(
                "PRF output length {} must equal the {coins} key-generation coins",
                prf.key_len()
            )));
        }
        let prfs = (1..=n).map(|i| prf.with_input_len(i + coins)).collect::<Result<_>>()?;
        Ok(Self { shape, prfs })
    }

    pub fn shape(&self) -> &TreeShape {
        &self.shape
    }

    pub fn prf(&self, level: usize) -> &TreePrfSpec {
        &self.prfs[level - 1]
    }

    /// PRF input of node `label` at depth `i`: `(label ‖ 0^coins) ⊕ r`.
    pub fn prf_input(&self, sk: &StatelessSigningKey, label: &Bits) -> Result<Bits> {
        let i = label.len();
        if i == 0 || i > self.shape.n {
            return Err(Error::InvalidParameter(format!("no derived key at depth {i}")));
        }
        let tau = label.get(i - 1) as usize;
        let padded = label.pad_to(i + self.shape.ot.coin_len())?;
        padded.xor(&sk.masks[i - 1][tau])
    }

    /// Key-generation coins of node `label`, or `None` if the PRF aborts.
    pub fn node_coins(&self, sk: &StatelessSigningKey, label: &Bits, tape: &mut RandomTape) -> Result<Option<Bits>> {
        let x = self.prf_input(sk, label)?;
        let level = label.len();
        Ok(self.prf(level).eval(&sk.prf_keys[level - 1], &x, tape)?.into_bits())
    }

    fn check_key(&self, sk: &StatelessSigningKey) -> Result<()> {
        check_len(self.shape.n, sk.prf_keys.len())?;
        check_len(self.shape.n, sk.masks.len())?;
        let coins = self.shape.ot.coin_len();
        for (i, (k, masks)) in sk.prf_keys.iter().zip(&sk.masks).enumerate() {
            check_len(coins, k.len())?;
            for r in masks {
                check_len(i + 1 + coins, r.len())?;
            }
        }
        Ok(())
    }
}

/// Node coins derived through a stateless signing key.
pub struct PrfCoins<'a> {
    pub scheme: &'a StatelessScheme,
    pub sk: &'a StatelessSigningKey,
}

impl NodeCoins for PrfCoins<'_> {
    fn coins(&mut self, label: &Bits, tape: &mut RandomTape) -> Result<Option<Bits>> {
        self.scheme.node_coins(self.sk, label, tape)
    }
}

impl SignatureScheme for StatelessScheme {
    type SigningKey = StatelessSigningKey;
    type VerifyingKey = Oms2VerifyingKey;
    type Signature = TreeSignature;

    fn message_len(&self) -> usize {
        self.shape.n
    }

    fn keygen(&self, tape: &mut RandomTape) -> Result<(StatelessSigningKey, Oms2VerifyingKey)> {
        let (root, vk) = self.shape.ot.keygen(tape)?;
        let coins = self.shape.ot.coin_len();
        let prf_keys = (0..self.shape.n).map(|_| tape.bits(coins)).collect();
        let masks = (1..=self.shape.n)
            .map(|i| [tape.bits(i + coins), tape.bits(i + coins)])
            .collect();
        Ok((StatelessSigningKey { root, prf_keys, masks }, vk))
    }

    fn sign(&self, sk: &mut StatelessSigningKey, m: &Bits, tape: &mut RandomTape) -> Result<Option<TreeSignature>> {
        self.check_key(sk)?;
        let mut memory = TreeMemory::default();
        let mut coins = PrfCoins { scheme: self, sk };
        self.shape.sign_with(&sk.root, &mut memory, m, &mut coins, tape)
    }

    fn verify(
        &self,
        vk: &Oms2VerifyingKey,
        m: &Bits,
        sig: Option<&TreeSignature>,
        tape: &mut RandomTape,
    ) -> Result<Verdict> {
        self.shape.verify(vk, m, sig, tape)
    }

    fn random_signature(&self, tape: &mut RandomTape) -> TreeSignature {
        self.shape.random_signature(tape)
    }
}

impl Encode for ChainLink {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.sig);
        w.put(&self.vks[0]);
        w.put(&self.vks[1]);
    }
}

impl Decode for ChainLink {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self {
            sig: r.get()?,
            vks: [r.get()?, r.get()?],
        })
    }
}

impl Encode for TreeSignature {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.links);
        w.put(&self.leaf);
    }
}

impl Decode for TreeSignature {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self {
            links: r.get()?,
            leaf: r.get()?,
        })
    }
}

impl Encode for TreeMemory {
    fn encode(&self, w: &mut Writer) {
        w.put_len(self.nodes.len());
        for (label, entry) in &self.nodes {
            w.put(label);
            w.put(&entry.keypair.as_ref().map(|kp| kp.0.clone()));
            w.put(&entry.keypair.as_ref().map(|kp| kp.1.clone()));
            w.put(&entry.child_sig);
        }
    }
}

impl Decode for TreeMemory {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        let n = r.len()?;
        let mut nodes = BTreeMap::new();
        for _ in 0..n {
            let label: Bits = r.get()?;
            let sk: Option<Oms2SigningKey> = r.get()?;
            let vk: Option<Oms2VerifyingKey> = r.get()?;
            let keypair = match (sk, vk) {
                (Some(sk), Some(vk)) => Some((sk, vk)),
                (None, None) => None,
                _ => return Err(Error::Decode("half a key pair in memory".into())),
            };
            let child_sig = r.get()?;
            if nodes.insert(label, NodeEntry { keypair, child_sig }).is_some() {
                return Err(Error::Decode("duplicate node label".into()));
            }
        }
        Ok(Self { nodes })
    }
}

impl Encode for StatefulSigningKey {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.root);
        w.put(&self.memory);
    }
}

impl Decode for StatefulSigningKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self {
            root: r.get()?,
            memory: r.get()?,
        })
    }
}

impl Encode for StatelessSigningKey {
    fn encode(&self, w: &mut Writer) {
        w.put(&self.root);
        w.put(&self.prf_keys);
        w.put(&self.masks);
    }
}

impl Decode for StatelessSigningKey {
    fn decode(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self {
            root: r.get()?,
            prf_keys: r.get()?,
            masks: r.get()?,
        })
    }
}
