/// Witness pair (s[-1], s[+1]) as grid numerators. Scalar witnesses of the
/// fat-shattering and fixed-scale dimensions are stored with `lo == hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WitnessPair {
    pub lo: i64,
    pub hi: i64,
}

impl WitnessPair {
    pub fn new(lo: i64, hi: i64) -> Self {
        Self { lo, hi }
    }

    pub fn scalar(s: i64) -> Self {
        Self { lo: s, hi: s }
    }

    /// s[ε] for ε = ±1.
    pub fn side(&self, sign: i8) -> i64 {
        if sign < 0 {
            self.lo
        } else {
            self.hi
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        Self {
            lo: self.lo * k,
            hi: self.hi * k,
        }
    }
}
