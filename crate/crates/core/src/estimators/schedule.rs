use crate::error::{Error, Result};

/// Polynomial block lengths `tau_n = floor(c n^a)` with `a > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSchedule {
    c: f64,
    a: f64,
}

/// The `n`-th block covers observations `start..end` (zero-based, half-open).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub index: usize,
    pub len: usize,
    pub start: usize,
    pub end: usize,
}

impl BlockSchedule {
    pub fn new(c: f64, a: f64) -> Result<Self> {
        if !(c.is_finite() && a.is_finite()) || c.floor() < 1.0 || !(a > 1.0) {
            return Err(Error::InvalidSchedule { c, a });
        }
        Ok(Self { c, a })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `tau_n` for `n >= 1`.
    pub fn tau(&self, n: usize) -> usize {
        (self.c * (n as f64).powf(self.a)).floor() as usize
    }

    /// `(tau_n, T_n)` with `T_n = tau_1 + .. + tau_n`.
    pub fn schedule_block(&self, n: usize) -> Result<(usize, usize)> {
        if n == 0 {
            return Err(Error::InvalidConfig("block index starts at 1".into()));
        }
        let total = (1..=n).map(|k| self.tau(k)).sum();
        Ok((self.tau(n), total))
    }

    pub fn blocks(&self) -> impl Iterator<Item = Block> + '_ {
        let mut end = 0;
        (1..).map(move |index| {
            let len = self.tau(index);
            let start = end;
            end += len;
            Block { index, len, start, end }
        })
    }

    /// Number of complete blocks that fit in `budget` observations.
    pub fn blocks_within(&self, budget: usize) -> usize {
        self.blocks().take_while(|b| b.end <= budget).count()
    }
}
