use serde::Serialize;

use crate::error::{invalid, Result};
use crate::statistics::Orders;

/// Sample sizes and cell orders of one test: `m` training (X) values, `n`
/// test (Y) values, `r` precedence cells and `s` exceedance cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Design {
    pub m: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
}

impl Design {
    /// Requires `m >= 1`, `r, s >= 1` and `r + s <= n`.
    pub fn new(m: usize, n: usize, r: usize, s: usize) -> Result<Self> {
        if m == 0 {
            return invalid("m must be at least 1");
        }
        Orders::new(r, s, n)?;
        Ok(Design { m, n, r, s })
    }

    /// Symmetric design `r = s`.
    pub fn symmetric(m: usize, n: usize, r: usize) -> Result<Self> {
        Design::new(m, n, r, r)
    }

    pub fn orders(&self) -> Orders {
        Orders { r: self.r, s: self.s }
    }

    /// Y values strictly between `Y(r)` and `Y(n-s+1)`.
    pub fn middle(&self) -> usize {
        self.n - self.r - self.s
    }

    /// The design with precedence and exceedance orders swapped.
    pub fn swapped(&self) -> Design {
        Design {
            r: self.s,
            s: self.r,
            ..*self
        }
    }
}

impl std::fmt::Display for Design {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "m={} n={} r={} s={}", self.m, self.n, self.r, self.s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Design::new(10, 10, 1, 1).is_ok());
        assert!(Design::new(0, 10, 1, 1).is_err());
        assert!(Design::new(10, 3, 2, 2).is_err());
        assert!(Design::new(1, 2, 1, 1).is_ok());
        assert_eq!(Design::new(5, 9, 3, 2).unwrap().middle(), 4);
    }
}
