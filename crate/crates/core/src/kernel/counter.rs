use core::ops::{Add, AddAssign};

/// Scalar multiply and add counts accumulated by the instrumented kernels.
///
/// Counters are owned by one call chain; callers merge them with `+=`.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter {
    pub multiplies: u64,
    pub additions: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Multiplies plus additions.
    pub fn total(&self) -> u64 {
        self.multiplies + self.additions
    }

    #[inline]
    pub(crate) fn mul(&mut self, n: usize) {
        self.multiplies += n as u64;
    }

    #[inline]
    pub(crate) fn add(&mut self, n: usize) {
        self.additions += n as u64;
    }

    /// One fused multiply-accumulate per scalar product.
    #[inline]
    pub(crate) fn fma(&mut self, n: usize) {
        self.multiplies += n as u64;
        self.additions += n as u64;
    }
}

impl Add for OpCounter {
    type Output = OpCounter;

    fn add(self, rhs: OpCounter) -> OpCounter {
        OpCounter { multiplies: self.multiplies + rhs.multiplies, additions: self.additions + rhs.additions }
    }
}

impl AddAssign for OpCounter {
    fn add_assign(&mut self, rhs: OpCounter) {
        self.multiplies += rhs.multiplies;
        self.additions += rhs.additions;
    }
}
