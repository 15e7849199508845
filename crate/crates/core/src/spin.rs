//! X-basis spin labels and control patterns.
//!
//! A product configuration of `n` spins is stored as an integer whose most
//! significant of `n` bits belongs to ion 0 (the target). Bit value 0 means
//! `+`, bit value 1 means `−`, so `+` configurations sort first.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    #[inline]
    pub fn sign(self) -> i32 {
        match self {
            Spin::Plus => 1,
            Spin::Minus => -1,
        }
    }

    #[inline]
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Plus => Spin::Minus,
            Spin::Minus => Spin::Plus,
        }
    }

    pub fn from_char(c: char) -> Option<Spin> {
        match c {
            '+' | 'p' | 'P' => Some(Spin::Plus),
            '-' | '−' | 'm' | 'M' => Some(Spin::Minus),
            _ => None,
        }
    }

    fn bit(self) -> usize {
        match self {
            Spin::Plus => 0,
            Spin::Minus => 1,
        }
    }
}

/// Spin of `ion` in configuration `index` of an `n_ions` register.
#[inline]
pub fn spin_at(index: usize, ion: usize, n_ions: usize) -> Spin {
    if (index >> (n_ions - 1 - ion)) & 1 == 0 {
        Spin::Plus
    } else {
        Spin::Minus
    }
}

/// Basis index of a full configuration listed in ion order.
pub fn config_index(spins: &[Spin]) -> usize {
    spins.iter().fold(0, |acc, s| (acc << 1) | s.bit())
}

/// Sign pattern of the control ions, listed in ion order with the target removed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ControlPattern(Vec<Spin>);

impl ControlPattern {
    pub fn new(spins: Vec<Spin>) -> Self {
        Self(spins)
    }

    pub fn uniform(len: usize, spin: Spin) -> Self {
        Self(vec![spin; len])
    }

    pub fn spins(&self) -> &[Spin] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> impl Iterator<Item = i32> + '_ {
        self.0.iter().map(|s| s.sign())
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| s.flipped()).collect())
    }

    /// All `2^len` patterns, `−` sorting before `+` position by position.
    pub fn all(len: usize) -> Vec<ControlPattern> {
        (0..1usize << len)
            .map(|k| {
                Self(
                    (0..len)
                        .map(|i| {
                            if (k >> (len - 1 - i)) & 1 == 0 {
                                Spin::Minus
                            } else {
                                Spin::Plus
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Full configuration with `target_spin` inserted at `target`.
    pub fn with_target(&self, target: usize, target_spin: Spin) -> Result<Vec<Spin>> {
        if target > self.0.len() {
            return Err(Error::IndexOutOfRange {
                index: target,
                len: self.0.len() + 1,
            });
        }
        let mut full = self.0.clone();
        full.insert(target, target_spin);
        Ok(full)
    }

    /// Filename-safe encoding, e.g. `mp` for `−+`.
    pub fn pm_code(&self) -> String {
        self.0
            .iter()
            .map(|s| match s {
                Spin::Plus => 'p',
                Spin::Minus => 'm',
            })
            .collect()
    }

    /// Ket label such as `|−,+⟩`.
    pub fn ket(&self) -> String {
        let inner: Vec<&str> = self
            .0
            .iter()
            .map(|s| match s {
                Spin::Plus => "+",
                Spin::Minus => "−",
            })
            .collect();
        format!("|{}⟩", inner.join(","))
    }
}

impl fmt::Display for ControlPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Spin::Plus => "+",
                Spin::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for ControlPattern {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        s.trim()
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '|' | '⟩' | '>'))
            .map(|c| Spin::from_char(c).ok_or_else(|| format!("invalid spin character `{c}`")))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(ControlPattern)
    }
}
