//! Deliberately broken primitives used as positive controls.

use crate::bits::Bits;
use crate::bot_core::BotValue;
use crate::bot_prg::BotGenerator;
use crate::error::{check_len, Result};
use crate::expander::Expander;
use crate::tape::RandomTape;

/// Ignores its key entirely.
#[derive(Clone, Debug)]
pub struct ConstantPrg {
    key_len: usize,
    output: Bits,
}

impl ConstantPrg {
    pub fn new(key_len: usize, output: Bits) -> Self {
        Self { key_len, output }
    }
}

impl BotGenerator for ConstantPrg {
    fn key_len(&self) -> usize {
        self.key_len
    }

    fn out_len(&self) -> usize {
        self.output.len()
    }

    fn eval(&self, key: &Bits, _tape: &mut RandomTape) -> Result<BotValue> {
        check_len(self.key_len, key.len())?;
        Ok(BotValue::Bits(self.output.clone()))
    }
}

/// Per key, returns one of two distinct values or ⊥, each with probability
/// 1/3 — an output support that is not of the form `{y, ⊥}`.
#[derive(Clone, Debug)]
pub struct ThreePointPrg {
    key_len: usize,
    out_len: usize,
    expander: Expander,
}

impl ThreePointPrg {
    pub fn new(key_len: usize, out_len: usize) -> Self {
        Self {
            key_len,
            out_len,
            expander: Expander::new("botsig 2024 three-point plant", b""),
        }
    }
}

impl BotGenerator for ThreePointPrg {
    fn key_len(&self) -> usize {
        self.key_len
    }

    fn out_len(&self) -> usize {
        self.out_len
    }

    fn eval(&self, key: &Bits, tape: &mut RandomTape) -> Result<BotValue> {
        check_len(self.key_len, key.len())?;
        Ok(match tape.below(3) {
            0 => BotValue::Bot,
            pick => {
                let mut y = self.expander.bits(0, &[key], self.out_len);
                if pick == 2 {
                    y.flip(0);
                }
                BotValue::Bits(y)
            }
        })
    }
}
