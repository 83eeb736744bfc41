//! Parsers for comma lists and parameter grids.

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| format!("cannot parse {:?} as a number", p.trim()))
        })
        .collect()
}

fn exactly_four<T: Copy>(v: Vec<T>) -> Result<[T; 4], String> {
    let n = v.len();
    v.try_into()
        .map_err(|_| format!("expected four comma-separated values, got {n}"))
}

pub fn parse_four(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = parse_list(s)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err("values must be finite".into());
    }
    exactly_four(v)
}

pub fn parse_four_ids(s: &str) -> Result<[u32; 4], String> {
    exactly_four(parse_list(s)?)
}

/// `start:stop:step` with `stop` included when it lies on the grid, or an
/// explicit comma list. An empty grid is an error.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty grid".into());
    }
    let values = if s.contains(':') {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| format!("bad grid bound {p:?}")))
            .collect::<Result<_, String>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(format!("grid {s:?} is not start:stop:step"));
        };
        if step.is_nan() || step <= 0.0 || !start.is_finite() || !stop.is_finite() {
            return Err(format!("grid {s:?} needs finite bounds and a positive step"));
        }
        if stop < start {
            return Err(format!("empty grid: {stop} < {start}"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as u64 + 1;
        if count > 100_000 {
            return Err(format!("grid {s:?} has {count} points (limit 100000)"));
        }
        (0..count).map(|i| start + i as f64 * step).collect()
    } else {
        let v: Vec<f64> = parse_list(s)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err("grid values must be finite".into());
        }
        v
    };
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        let g = parse_grid("0:180:15").unwrap();
        assert_eq!(g.len(), 13);
        assert_eq!(g[12], 180.0);
        assert_eq!(parse_grid("0:1:0.1").unwrap().len(), 11);
        assert_eq!(parse_grid("1").unwrap(), vec![1.0]);
        assert_eq!(parse_grid("1, 0.9").unwrap(), vec![1.0, 0.9]);
    }

    #[test]
    fn bad_grids() {
        for g in ["", "  ", "10:0:5", "0:10:0", "0:10", "a:b:c", "1,,2", "nan"] {
            assert!(parse_grid(g).is_err(), "{g}");
        }
    }

    #[test]
    fn fours() {
        assert_eq!(parse_four("0,90,45,135").unwrap(), [0.0, 90.0, 45.0, 135.0]);
        assert!(parse_four("0,90,45").is_err());
        assert_eq!(parse_four_ids("0,1,0,1").unwrap(), [0, 1, 0, 1]);
        assert!(parse_four_ids("0,1,0,-1").is_err());
    }
}
