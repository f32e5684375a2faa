use std::fmt;

use serde::{Deserialize, Serialize};

use super::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Currency {
    #[serde(rename = "EUR")]
    Eur,
}

/// An exact amount in minor units (euro cents).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MoneyAmount {
    #[serde(rename = "cents")]
    pub minor_units: u64,
    pub currency: Currency,
}

impl MoneyAmount {
    pub fn eur_cents(minor_units: u64) -> Self {
        Self {
            minor_units,
            currency: Currency::Eur,
        }
    }
}

/// Canonical form: `€<grouped euros>[.<cents>]`, e.g. `€1,810,000,000` or
/// `€12.05`. Always re-parses to the same amount.
impl fmt::Display for MoneyAmount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let euros = self.minor_units / 100;
        let cents = self.minor_units % 100;
        let digits = euros.to_string();
        let mut grouped = String::with_capacity(digits.len() + digits.len() / 3);
        for (i, ch) in digits.chars().enumerate() {
            if i > 0 && (digits.len() - i).is_multiple_of(3) {
                grouped.push(',');
            }
            grouped.push(ch);
        }
        if cents == 0 {
            write!(f, "€{grouped}")
        } else {
            write!(f, "€{grouped}.{cents:02}")
        }
    }
}

/// Power of ten (in euros) for a scale word, if recognized.
fn scale_exponent(word: &str) -> Option<u32> {
    match word.to_ascii_lowercase().as_str() {
        "" => Some(0),
        "k" | "thousand" | "thousands" => Some(3),
        "m" | "mn" | "million" | "millions" => Some(6),
        "b" | "bn" | "billion" | "billions" => Some(9),
        _ => None,
    }
}

fn is_group_separator(c: char) -> bool {
    matches!(c, ',' | ' ' | '\u{a0}' | '\u{202f}')
}

/// Parse a euro amount such as `€18.1 million`, `€15.47 B` or `€17,569 M`.
///
/// `-` and the empty string mean "no value". Thousands separators (`,` or
/// space) must delimit groups of exactly three digits. Amounts that are not a
/// whole number of cents are rejected rather than rounded.
pub fn parse_money(text: &str) -> Result<Option<MoneyAmount>, IngestError> {
    let s = text.trim();
    if s.is_empty() || s == "-" {
        return Ok(None);
    }
    let fail = || IngestError::UnparsableMoney(text.to_string());

    let mut rest = s.strip_prefix('€').unwrap_or(s).trim_start();
    for suffix in ["euros", "euro", "EUR", "€"] {
        if let Some(r) = rest.strip_suffix(suffix) {
            rest = r.trim_end();
            break;
        }
    }

    // Split into the numeric head and an optional trailing scale word.
    let num_end = rest
        .char_indices()
        .find(|&(_, c)| !(c.is_ascii_digit() || c == '.' || is_group_separator(c)))
        .map(|(i, _)| i)
        .unwrap_or(rest.len());
    let number = rest[..num_end].trim_end();
    let exponent = scale_exponent(rest[num_end..].trim()).ok_or_else(fail)?;
    if number.is_empty() {
        return Err(fail());
    }

    let (int_part, frac_part) = match number.split_once('.') {
        Some((i, f)) => (i, f),
        None => (number, ""),
    };
    if frac_part.chars().any(|c| !c.is_ascii_digit()) || (number.contains('.') && frac_part.is_empty()) {
        return Err(fail());
    }

    let groups: Vec<&str> = int_part.split(is_group_separator).collect();
    if groups[0].is_empty() || groups[0].len() > 3 && groups.len() > 1 {
        return Err(fail());
    }
    if groups[1..].iter().any(|g| g.len() != 3) {
        return Err(fail());
    }
    let int_digits: String = groups.concat();

    // value = int.frac * 10^exponent euros = (int.frac digits) * 10^(exponent + 2 - frac_len) cents
    let mantissa: u128 = format!("{int_digits}{frac_part}").parse().map_err(|_| fail())?;
    let shift = exponent as i64 + 2 - frac_part.len() as i64;
    let cents = if shift >= 0 {
        10u128
            .checked_pow(shift as u32)
            .and_then(|p| mantissa.checked_mul(p))
            .ok_or_else(fail)?
    } else {
        let div = 10u128.checked_pow((-shift) as u32).ok_or_else(fail)?;
        if !mantissa.is_multiple_of(div) {
            return Err(fail());
        }
        mantissa / div
    };
    let cents = u64::try_from(cents).map_err(|_| fail())?;
    Ok(Some(MoneyAmount::eur_cents(cents)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cents(s: &str) -> u64 {
        parse_money(s).unwrap().unwrap().minor_units
    }

    #[test]
    fn figure_amounts() {
        assert_eq!(cents("€18.1 million"), 1_810_000_000);
        assert_eq!(cents("€15.47 B"), 1_547_000_000_000);
        assert_eq!(cents("€15.47 billion"), 1_547_000_000_000);
        assert_eq!(cents("€17,569 M"), 1_756_900_000_000);
        assert_eq!(cents("€17,569 million"), 1_756_900_000_000);
    }

    #[test]
    fn absent_and_zero() {
        assert_eq!(parse_money("-").unwrap(), None);
        assert_eq!(parse_money("  ").unwrap(), None);
        assert_eq!(cents("€0"), 0);
    }

    #[test]
    fn separators_and_suffixes() {
        assert_eq!(cents("€1 234 567"), 123_456_700);
        assert_eq!(cents("1,000 EUR"), 100_000);
        assert_eq!(cents("€2.5k"), 250_000);
        assert_eq!(cents("€12.05"), 1205);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["abc", "€", "€15,47", "€1.2.3", "€3 apples", "€0.001", "€1.", "€,100"] {
            assert!(
                matches!(parse_money(bad), Err(IngestError::UnparsableMoney(_))),
                "{bad} should fail"
            );
        }
    }

    #[test]
    fn display_is_grouped() {
        assert_eq!(MoneyAmount::eur_cents(1_810_000_000).to_string(), "€18,100,000");
        assert_eq!(MoneyAmount::eur_cents(5).to_string(), "€0.05");
        assert_eq!(MoneyAmount::eur_cents(100_000).to_string(), "€1,000");
    }

    #[test]
    fn json_shape() {
        let json = serde_json::to_string(&MoneyAmount::eur_cents(42)).unwrap();
        assert_eq!(json, r#"{"cents":42,"currency":"EUR"}"#);
    }

    proptest! {
        #[test]
        fn canonical_format_reparses(c in any::<u64>()) {
            let m = MoneyAmount::eur_cents(c);
            prop_assert_eq!(parse_money(&m.to_string()).unwrap(), Some(m));
        }
    }
}
