//! Threshold grids: `x`, `x,y,z`, `a..b` (unit step) or `a..b:step`, with
//! inclusive end points.

/// Grid points are `a + i * step`, so rounding does not accumulate.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = match rest.split_once(':') {
            Some((b, step)) => (b, number(step)?),
            None => (rest, 1.0),
        };
        let (a, b) = (number(a)?, number(b)?);
        if !(step > 0.0) {
            return Err(format!("step must be positive in `{s}`"));
        }
        if b < a {
            return Err(format!("empty range `{s}`"));
        }
        let count = ((b - a) / step + 1e-9).floor() as usize + 1;
        if count > 1_000_000 {
            return Err(format!("range `{s}` has {count} points"));
        }
        return Ok((0..count).map(|i| a + i as f64 * step).collect());
    }
    s.split(',').map(number).collect()
}

/// A grid of nonnegative integers.
pub fn parse_int_grid(s: &str) -> Result<Vec<usize>, String> {
    parse_grid(s)?
        .into_iter()
        .map(|v| if v >= 0.0 && v.fract() == 0.0 { Ok(v as usize) } else { Err(format!("`{v}` is not a nonnegative integer in `{s}`")) })
        .collect()
}

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}
