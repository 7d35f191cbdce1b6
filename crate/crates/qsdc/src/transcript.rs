//! Message bit-strings, efficiency accounting and the stable text format
//! shared by session transcripts.
//!
//! Transcripts render to a key/value text document with a fixed section and
//! field order, so a session replayed with the same configuration and seed
//! produces a byte-identical document.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A message as an explicit bit sequence (two bits ride on each pair).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    bits: Vec<bool>,
}

impl Message {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Message { bits }
    }

    /// Parse hex digits into bits, most significant bit of each digit first.
    pub fn from_hex(hex: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for ch in hex.chars() {
            let v = ch.to_digit(16).ok_or(Error::InvalidHexDigit(ch))? as u8;
            for shift in (0..4).rev() {
                bits.push(v >> shift & 1 == 1);
            }
        }
        Ok(Message { bits })
    }

    /// Hex rendering; `None` unless the bit count is a multiple of 4.
    pub fn to_hex(&self) -> Option<String> {
        if self.bits.len() % 4 != 0 {
            return None;
        }
        let mut out = String::with_capacity(self.bits.len() / 4);
        for chunk in self.bits.chunks(4) {
            let v = chunk
                .iter()
                .fold(0u32, |acc, b| (acc << 1) | u32::from(*b));
            out.push(char::from_digit(v, 16).unwrap());
        }
        Some(out)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// `0`/`1` rendering used in transcripts.
    pub fn bit_string(&self) -> String {
        self.bits.iter().map(|b| if *b { '1' } else { '0' }).collect()
    }
}

/// Useful-over-total qubit accounting for one session, counted in EPR pairs
/// (the per-qubit ratio is identical).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EfficiencyReport {
    /// Pairs available to carry message bits.
    pub q_u: usize,
    /// Pairs prepared for the session.
    pub q_t: usize,
}

impl EfficiencyReport {
    /// Intrinsic qubit efficiency q_u / q_t.
    pub fn eta_q(&self) -> f64 {
        self.q_u as f64 / self.q_t as f64
    }
}

/// Writer for the stable transcript text format.
#[derive(Debug, Default)]
pub struct DocWriter {
    buf: String,
}

impl DocWriter {
    pub fn new(title: &str) -> Self {
        let mut w = DocWriter::default();
        let _ = writeln!(w.buf, "{title}");
        w
    }

    pub fn section(&mut self, name: &str) {
        let _ = writeln!(self.buf, "[{name}]");
    }

    pub fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.buf, "{key}: {value}");
    }

    /// Floats are always written with 12 fractional digits so the rendering
    /// is unambiguous and stable.
    pub fn kv_f64(&mut self, key: &str, value: f64) {
        let _ = writeln!(self.buf, "{key}: {value:.12}");
    }

    pub fn list<T: std::fmt::Display>(&mut self, key: &str, items: impl IntoIterator<Item = T>) {
        let rendered: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
        if rendered.is_empty() {
            let _ = writeln!(self.buf, "{key}: -");
        } else {
            let _ = writeln!(self.buf, "{key}: {}", rendered.join(" "));
        }
    }

    pub fn finish(self) -> String {
        self.buf
    }
}
