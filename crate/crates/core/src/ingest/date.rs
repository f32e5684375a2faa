use chrono::NaiveDate;

use super::IngestError;

/// Parse `M/D/YYYY` (month first, day-first only when month-first is not a
/// valid date) or ISO `YYYY-MM-DD`.
pub fn parse_date(text: &str) -> Result<NaiveDate, IngestError> {
    let s = text.trim();
    let fail = || IngestError::UnparsableDate(text.to_string());

    if let [a, b, y] = s.split('/').collect::<Vec<_>>()[..] {
        let num = |p: &str| -> Option<u32> {
            if p.is_empty() || p.len() > 2 || !p.bytes().all(|c| c.is_ascii_digit()) {
                return None;
            }
            p.parse().ok()
        };
        if y.len() != 4 || !y.bytes().all(|c| c.is_ascii_digit()) {
            return Err(fail());
        }
        let year: i32 = y.parse().map_err(|_| fail())?;
        let (a, b) = (num(a).ok_or_else(fail)?, num(b).ok_or_else(fail)?);
        return NaiveDate::from_ymd_opt(year, a, b)
            .or_else(|| NaiveDate::from_ymd_opt(year, b, a))
            .ok_or_else(fail);
    }

    let parts: Vec<_> = s.split('-').collect();
    if let [y, m, d] = parts[..] {
        if y.len() == 4
            && m.len() == 2
            && d.len() == 2
            && parts.iter().all(|p| p.bytes().all(|c| c.is_ascii_digit()))
        {
            let (y, m, d) = (y.parse().map_err(|_| fail())?, m.parse().map_err(|_| fail())?, d.parse().map_err(|_| fail())?);
            return NaiveDate::from_ymd_opt(y, m, d).ok_or_else(fail);
        }
    }
    Err(fail())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ymd(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn month_first() {
        assert_eq!(parse_date("3/2/2023").unwrap(), ymd(2023, 3, 2));
        assert_eq!(parse_date("3/1/2023").unwrap(), ymd(2023, 3, 1));
        assert_eq!(parse_date("03/02/2023").unwrap(), ymd(2023, 3, 2));
    }

    #[test]
    fn iso_passthrough() {
        assert_eq!(parse_date("2023-03-01").unwrap(), ymd(2023, 3, 1));
    }

    #[test]
    fn day_first_fallback() {
        assert_eq!(parse_date("13/2/2023").unwrap(), ymd(2023, 2, 13));
    }

    #[test]
    fn rejects() {
        for bad in ["", "2023", "13/13/2023", "3/2/23", "2023-3-1", "2023-02-30", "a/b/2023", "3/2/2023/1"] {
            assert!(parse_date(bad).is_err(), "{bad}");
        }
    }

    /// Independent calendar table, no chrono.
    fn days_in_month(year: i32, month: u32) -> u32 {
        let leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
        match month {
            1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
            4 | 6 | 9 | 11 => 30,
            2 if leap => 29,
            2 => 28,
            _ => 0,
        }
    }

    #[test]
    fn exhaustive_slash_readings() {
        for year in [2023, 2024] {
            for a in 1..=31u32 {
                for b in 1..=31u32 {
                    let month_first = a <= 12 && b <= days_in_month(year, a);
                    let day_first = b <= 12 && a <= days_in_month(year, b);
                    let got = parse_date(&format!("{a}/{b}/{year}"));
                    if month_first {
                        assert_eq!(got.unwrap(), ymd(year, a, b));
                    } else if day_first {
                        assert_eq!(got.unwrap(), ymd(year, b, a));
                    } else {
                        assert!(got.is_err(), "{a}/{b}/{year}");
                    }
                }
            }
        }
    }
}
