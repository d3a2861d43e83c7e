use chrono::NaiveDate;
use infodemic_core::analytics::FractionPoint;
use infodemic_core::{DailyStat, Error, Result};

pub trait Dated {
    fn date(&self) -> NaiveDate;
}

impl Dated for DailyStat {
    fn date(&self) -> NaiveDate {
        self.date
    }
}

impl Dated for FractionPoint {
    fn date(&self) -> NaiveDate {
        self.date
    }
}

/// Items dated within `[from, to]`, in their original order.
pub fn filter_range<T: Dated + Clone>(series: &[T], from: NaiveDate, to: NaiveDate) -> Result<Vec<T>> {
    if from > to {
        return Err(Error::Argument(format!("range start {from} is after end {to}")));
    }
    Ok(series
        .iter()
        .filter(|x| (from..=to).contains(&x.date()))
        .cloned()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use infodemic_core::Platform;

    fn series() -> Vec<DailyStat> {
        (1..=5)
            .map(|d| DailyStat {
                date: NaiveDate::from_ymd_opt(2021, 1, d).unwrap(),
                platform: Platform::Twitter,
                volume: d as u64,
                low_count: 0,
                high_count: 0,
            })
            .collect()
    }

    fn d(day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2021, 1, day).unwrap()
    }

    #[test]
    fn slices() {
        let s = series();
        assert_eq!(filter_range(&s, d(1), d(5)).unwrap(), s);
        assert_eq!(filter_range(&s, d(2), d(3)).unwrap(), &s[1..3]);
        assert!(filter_range(&s, d(20), d(25)).unwrap().is_empty());
        assert!(filter_range(&s, d(3), d(2)).is_err());
    }
}
