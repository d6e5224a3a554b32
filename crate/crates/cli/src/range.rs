//! Value lists given on the command line: `0.5`, `1,2,5`, `1..4` (integer
//! steps), `0..1:5` (5 linear points) or `1e-3..1e-1:7log`.

use xychain::numerics::{linspace, logspace};

pub fn parse_values(text: &str) -> Result<Vec<f64>, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty value list".into());
    }
    if text.contains(',') {
        return text.split(',').map(|s| parse_number(s.trim())).collect();
    }
    let Some((lo, rest)) = text.split_once("..") else {
        return Ok(vec![parse_number(text)?]);
    };
    let (hi, spec) = match rest.split_once(':') {
        Some((h, s)) => (h, Some(s)),
        None => (rest, None),
    };
    let a = parse_number(lo)?;
    let b = parse_number(hi)?;
    if b < a {
        return Err(format!("range `{text}` is decreasing"));
    }
    match spec {
        None => {
            if a.fract() != 0.0 || b.fract() != 0.0 {
                return Err(format!("range `{text}` needs a point count, e.g. `{text}:10`"));
            }
            Ok((a as i64..=b as i64).map(|v| v as f64).collect())
        }
        Some(s) => {
            let (count, log) = match s.strip_suffix("log") {
                Some(c) => (c, true),
                None => (s, false),
            };
            let n: usize = count.parse().map_err(|_| format!("bad point count `{count}`"))?;
            if n == 0 {
                return Err("point count must be positive".into());
            }
            if log {
                if a <= 0.0 {
                    return Err(format!("log range `{text}` must be positive"));
                }
                Ok(logspace(a, b, n))
            } else {
                Ok(linspace(a, b, n))
            }
        }
    }
}

pub fn parse_integers(text: &str) -> Result<Vec<i64>, String> {
    parse_values(text)?
        .into_iter()
        .map(|v| if v.fract() == 0.0 { Ok(v as i64) } else { Err(format!("`{v}` is not an integer")) })
        .collect()
}

fn parse_number(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|_| format!("cannot parse number `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_values("0.5").unwrap(), vec![0.5]);
        assert_eq!(parse_values("1, 2,5").unwrap(), vec![1.0, 2.0, 5.0]);
        assert_eq!(parse_integers("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_values("0..1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let l = parse_values("1e-3..1e-1:3log").unwrap();
        assert!((l[1] - 1e-2).abs() < 1e-15);
        assert!(parse_values("0.1..0.5").is_err());
        assert!(parse_values("2..1").is_err());
        assert!(parse_integers("0.5").is_err());
    }
}
