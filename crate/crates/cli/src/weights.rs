use qweyl_core::{CartanData, Error, Result, Weight};

/// Accepts `[1,-2]`, `-w2`, `w1-2w2`, `2w1 - 3w2` and `0`.
pub fn parse_weight(cd: &CartanData, text: &str) -> Result<Weight> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad weight `{text}`"));
    if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let c: Vec<i32> = inner.split(',').map(|x| x.parse::<i32>().map_err(|_| bad())).collect::<Result<_>>()?;
        if c.len() != cd.rank() {
            return Err(Error::Parse(format!("weight `{text}` has {} coordinates, rank is {}", c.len(), cd.rank())));
        }
        return Ok(Weight::from_slice(&c));
    }
    let mut wt = cd.zero_weight();
    if t == "0" {
        return Ok(wt);
    }
    let mut rest = t.as_str();
    while !rest.is_empty() {
        let sign = match rest.as_bytes()[0] {
            b'-' => {
                rest = &rest[1..];
                -1
            }
            b'+' => {
                rest = &rest[1..];
                1
            }
            _ => 1,
        };
        let w = rest.find('w').ok_or_else(bad)?;
        let k: i32 = if w == 0 { 1 } else { rest[..w].parse().map_err(|_| bad())? };
        rest = &rest[w + 1..];
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let i: usize = rest[..end].parse().map_err(|_| bad())?;
        cd.check_node(i)?;
        wt.add_scaled(&cd.omega(i), sign * k);
        rest = &rest[end..];
    }
    Ok(wt)
}
