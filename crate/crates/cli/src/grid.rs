//! Parameter grids: `lo:hi:step` (inclusive) or comma lists.

use anyhow::{bail, Context, Result};

pub fn floats(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if let Some((lo, rest)) = spec.split_once(':') {
        let (hi, step) = rest.split_once(':').with_context(|| format!("grid {spec:?} must be lo:hi:step"))?;
        let (lo, hi, step): (f64, f64, f64) = (parse(lo)?, parse(hi)?, parse(step)?);
        if !(step > 0.0) || hi < lo {
            bail!("grid {spec:?} needs step > 0 and hi >= lo");
        }
        // count from the rounded ratio so 0.1:0.3:0.1 has three points
        let n = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        if n > 1_000_000 {
            bail!("grid {spec:?} has {n} points");
        }
        return Ok((0..n).map(|i| lo + i as f64 * step).collect());
    }
    spec.split(',').map(parse).collect()
}

fn parse(s: &str) -> Result<f64> {
    let s = s.trim();
    s.parse().with_context(|| format!("{s:?} is not a number"))
}

pub fn ints(spec: &str) -> Result<Vec<u64>> {
    floats(spec)?
        .into_iter()
        .map(|x| {
            let r = x.round();
            if (x - r).abs() > 1e-9 || r < 0.0 {
                bail!("{x} is not a non-negative integer");
            }
            Ok(r as u64)
        })
        .collect()
}

pub fn probabilities(spec: &str) -> Result<Vec<f64>> {
    let v = floats(spec)?;
    if let Some(p) = v.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        bail!("probability {p} outside [0, 1]");
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(floats("0.1:0.3:0.1").unwrap().len(), 3);
        assert_eq!(ints("8:32:8").unwrap(), vec![8, 16, 24, 32]);
        assert_eq!(floats("0.5, 1.5").unwrap(), vec![0.5, 1.5]);
        assert!(floats("1:0:0.1").is_err());
        assert!(probabilities("0.5:1.5:0.5").is_err());
        assert!(ints("1.5").is_err());
    }
}
