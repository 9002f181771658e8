//! `--n` grid syntax: a single value, a comma list, or `start:stop:xF` for a
//! geometric grid.

pub fn parse_grid(s: &str) -> Result<Vec<usize>, String> {
    let s = s.trim();
    let grid = if s.contains(':') {
        geometric(s)?
    } else {
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad n {part:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err(format!("grid {s:?} is empty"));
    }
    if grid.contains(&0) {
        return Err("n must be positive".into());
    }
    Ok(grid)
}

fn geometric(s: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("expected start:stop:xF, got {s:?}"));
    };
    let start: usize = start
        .parse()
        .map_err(|e| format!("bad grid start {start:?}: {e}"))?;
    let stop: usize = stop
        .parse()
        .map_err(|e| format!("bad grid stop {stop:?}: {e}"))?;
    let factor = step
        .strip_prefix('x')
        .ok_or_else(|| format!("grid step must look like x2, got {step:?}"))?;
    if start == 0 || start > stop {
        return Err(format!("grid needs 0 < start <= stop, got {start}:{stop}"));
    }

    let mut out = Vec::new();
    if let Ok(f) = factor.parse::<usize>() {
        if f < 2 {
            return Err(format!("grid factor must exceed 1, got {f}"));
        }
        let mut n = start;
        while n <= stop {
            out.push(n);
            match n.checked_mul(f) {
                Some(next) => n = next,
                None => break,
            }
        }
        return Ok(out);
    }
    let f: f64 = factor
        .parse()
        .map_err(|e| format!("bad grid factor {factor:?}: {e}"))?;
    if !(f > 1.0 && f.is_finite()) {
        return Err(format!("grid factor must exceed 1, got {f}"));
    }
    for i in 0.. {
        let n = (start as f64 * f.powi(i)).round();
        if n > stop as f64 {
            break;
        }
        let n = n as usize;
        if out.last() != Some(&n) {
            out.push(n);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_grid("8"), Ok(vec![8]));
        assert_eq!(parse_grid("10, 20,40"), Ok(vec![10, 20, 40]));
        assert_eq!(parse_grid("1000:32000:x2").unwrap().len(), 6);
        assert_eq!(parse_grid("1000:32000:x2").unwrap()[5], 32000);
        assert_eq!(
            parse_grid("100:1000:x1.5"),
            Ok(vec![100, 150, 225, 338, 506, 759])
        );
    }

    #[test]
    fn rejects() {
        for bad in [
            "",
            "0",
            "a",
            "10:5:x2",
            "1:10:2",
            "1:10:x1",
            "1:10",
            "1:10:x0.5",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
