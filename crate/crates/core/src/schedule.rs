//! Dynamic chromosome-lengthening schedule.
//!
//! Lengths climb from `min_length` to `max_length` in steps of `interval`;
//! per-level generation budgets grow with the level index so the highest
//! precision levels receive the most generations, and the budgets always sum
//! to the total iteration count exactly.

use crate::error::{Error, Result};

/// The lengthening plan: per-level chromosome lengths and generation budgets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSchedule {
    min_length: usize,
    max_length: usize,
    interval: usize,
    lengths: Vec<usize>,
    repetitions: Vec<usize>,
}

impl LevelSchedule {
    /// Build the schedule for `m` total iterations.
    ///
    /// The level count is `(max_length - min_length) / interval + 1`
    /// (divisibility enforced). Level budgets are proportional to the level
    /// index: `floor((level + 1) * m / (k * (k + 1) / 2))`, with the rounding
    /// remainder added to the final level so the budgets sum to `m` exactly.
    pub fn new(min_length: usize, max_length: usize, interval: usize, m: usize) -> Result<Self> {
        if min_length < 1 {
            return Err(Error::InvalidSchedule("min_length must be >= 1".into()));
        }
        if min_length > max_length {
            return Err(Error::InvalidSchedule(format!(
                "min_length {min_length} exceeds max_length {max_length}"
            )));
        }
        if interval < 1 {
            return Err(Error::InvalidSchedule("interval must be >= 1".into()));
        }
        if !(max_length - min_length).is_multiple_of(interval) {
            return Err(Error::InvalidSchedule(format!(
                "max_length - min_length = {} is not divisible by interval {interval}",
                max_length - min_length
            )));
        }
        let level_max = (max_length - min_length) / interval + 1;
        if m < level_max {
            return Err(Error::InvalidSchedule(format!(
                "m = {m} is smaller than the level count {level_max}"
            )));
        }

        let lengths: Vec<usize> = (0..level_max).map(|l| min_length + l * interval).collect();

        let triangular = level_max * (level_max + 1) / 2;
        let mut repetitions: Vec<usize> =
            (0..level_max).map(|l| (l + 1) * m / triangular).collect();
        let assigned: usize = repetitions.iter().sum();
        *repetitions.last_mut().expect("level_max >= 1") += m - assigned;

        Ok(Self {
            min_length,
            max_length,
            interval,
            lengths,
            repetitions,
        })
    }

    /// Number of accuracy levels.
    pub fn level_max(&self) -> usize {
        self.lengths.len()
    }

    pub fn min_length(&self) -> usize {
        self.min_length
    }

    pub fn max_length(&self) -> usize {
        self.max_length
    }

    pub fn interval(&self) -> usize {
        self.interval
    }

    /// Chromosome length at each level.
    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    /// Generation budget at each level; sums to the configured `m`.
    pub fn repetitions(&self) -> &[usize] {
        &self.repetitions
    }

    /// Total iteration count.
    pub fn total_iterations(&self) -> usize {
        self.repetitions.iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn image_mask_parameters_give_784_levels() {
        let schedule = LevelSchedule::new(1, 784, 1, 80_000).unwrap();
        assert_eq!(schedule.level_max(), 784);
        assert_eq!(schedule.lengths().first(), Some(&1));
        assert_eq!(schedule.lengths().last(), Some(&784));
        assert_eq!(schedule.total_iterations(), 80_000);
    }

    #[test]
    fn single_level_takes_whole_budget() {
        let schedule = LevelSchedule::new(1, 1, 1, 7).unwrap();
        assert_eq!(schedule.level_max(), 1);
        assert_eq!(schedule.repetitions(), &[7]);
    }

    #[test]
    fn three_level_worked_example() {
        // Oracle: k = (10-2)/4 + 1 = 3, triangular = 6, so budgets are
        // floor(100/6) = 16, floor(200/6) = 33, floor(300/6) = 50, and the
        // remainder 100 - 99 = 1 lands on the last level.
        let schedule = LevelSchedule::new(2, 10, 4, 100).unwrap();
        assert_eq!(schedule.level_max(), 3);
        assert_eq!(schedule.lengths(), &[2, 6, 10]);
        assert_eq!(schedule.repetitions(), &[16, 33, 51]);
        assert_eq!(schedule.total_iterations(), 100);
    }

    #[test]
    fn rejects_indivisible_span_and_tiny_budget() {
        assert!(matches!(
            LevelSchedule::new(2, 9, 4, 100),
            Err(Error::InvalidSchedule(_))
        ));
        assert!(matches!(
            LevelSchedule::new(1, 10, 1, 5),
            Err(Error::InvalidSchedule(_))
        ));
        assert!(matches!(
            LevelSchedule::new(0, 4, 1, 10),
            Err(Error::InvalidSchedule(_))
        ));
    }

    proptest! {
        #[test]
        fn budgets_sum_exactly_and_never_decrease(
            min in 1usize..40,
            steps in 0usize..20,
            interval in 1usize..12,
            extra in 0usize..400,
        ) {
            let max = min + steps * interval;
            let levels = steps + 1;
            let m = levels + extra;
            let schedule = LevelSchedule::new(min, max, interval, m).unwrap();
            prop_assert_eq!(schedule.level_max(), levels);
            prop_assert_eq!(schedule.total_iterations(), m);
            let reps = schedule.repetitions();
            for pair in reps.windows(2) {
                prop_assert!(pair[0] <= pair[1], "repetitions decreased: {:?}", reps);
            }
            let lengths = schedule.lengths();
            prop_assert_eq!(lengths[0], min);
            prop_assert_eq!(*lengths.last().unwrap(), max);
        }
    }
}
