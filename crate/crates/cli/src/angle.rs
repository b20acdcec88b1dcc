//! Angles in radians with a `pi` shorthand: `pi/2`, `3pi/2`, `-pi/4`, `2*pi/3`.

use std::f64::consts::PI;

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect::<String>().to_lowercase();
    let value = match t.split_once("pi") {
        None => t.parse::<f64>().map_err(|_| format!("cannot read '{text}' as an angle"))?,
        Some((coef, rest)) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let k = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| format!("bad coefficient in '{text}'"))?,
            };
            let d = match rest {
                "" => 1.0,
                r => r
                    .strip_prefix('/')
                    .and_then(|d| d.parse::<f64>().ok())
                    .filter(|d| *d != 0.0)
                    .ok_or_else(|| format!("bad divisor in '{text}'"))?,
            };
            k * PI / d
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("angle '{text}' is not finite"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_forms() {
        assert_eq!(parse_angle("pi/2").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("3pi/2").unwrap(), 3.0 * PI / 2.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert_eq!(parse_angle(" 0.5 pi ").unwrap(), 0.5 * PI);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "pie", "pi/0", "xpi", "pi/2/3", "nan", "inf", "1e400"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }
}
