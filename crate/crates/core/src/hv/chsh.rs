use super::CorrelationTable;
use crate::error::Result;

/// `S = E(x1,y1) - E(x1,y2) + E(x2,y1) + E(x2,y2)`.
pub fn chsh_value(table: &CorrelationTable, x1: u32, x2: u32, y1: u32, y2: u32) -> Result<f64> {
    Ok(table.get(x1, y1)? - table.get(x1, y2)? + table.get(x2, y1)? + table.get(x2, y2)?)
}

/// CHSH value of the deterministic local strategy
/// `(A(x1), A(x2), B(y1), B(y2))`.
pub fn deterministic_strategy_chsh(strategy: [i8; 4]) -> f64 {
    let [a1, a2, b1, b2] = strategy.map(f64::from);
    a1 * b1 - a1 * b2 + a2 * b1 + a2 * b2
}

/// Largest `|S|` over all 16 deterministic local strategies.
pub fn max_chsh_over_deterministic(x1: u32, x2: u32, y1: u32, y2: u32) -> f64 {
    let sign = |bit: u32| if bit == 0 { 1i8 } else { -1 };
    (0u32..16)
        .map(|mask| {
            let s = [0, 1, 2, 3].map(|k| sign((mask >> k) & 1));
            let table = CorrelationTable::new()
                .with(x1, y1, f64::from(s[0] * s[2]))
                .and_then(|t| t.with(x1, y2, f64::from(s[0] * s[3])))
                .and_then(|t| t.with(x2, y1, f64::from(s[1] * s[2])))
                .and_then(|t| t.with(x2, y2, f64::from(s[1] * s[3])))
                .expect("±1 entries are in range");
            chsh_value(&table, x1, x2, y1, y2)
                .expect("all four entries present")
                .abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::hv::singlet_correlation;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn table(e: [f64; 4]) -> CorrelationTable {
        CorrelationTable::new()
            .with(0, 2, e[0])
            .unwrap()
            .with(0, 3, e[1])
            .unwrap()
            .with(1, 2, e[2])
            .unwrap()
            .with(1, 3, e[3])
            .unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(chsh_value(&table([1.0; 4]), 0, 1, 2, 3).unwrap(), 2.0);
        assert_eq!(chsh_value(&table([0.0; 4]), 0, 1, 2, 3).unwrap(), 0.0);
    }

    #[test]
    fn singlet_standard_angles() {
        let (a1, a2, b1, b2) = (0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4);
        let t = table([
            singlet_correlation(a1, b1),
            singlet_correlation(a1, b2),
            singlet_correlation(a2, b1),
            singlet_correlation(a2, b2),
        ]);
        let s = chsh_value(&t, 0, 1, 2, 3).unwrap();
        assert!((s + 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn missing_entry() {
        let t = CorrelationTable::new().with(0, 2, 0.5).unwrap();
        assert_eq!(chsh_value(&t, 0, 1, 2, 3), Err(Error::MissingEntry(0, 3)));
    }

    #[test]
    fn deterministic_bound_is_two() {
        assert_eq!(max_chsh_over_deterministic(0, 1, 2, 3), 2.0);
        assert_eq!(max_chsh_over_deterministic(7, 9, 11, 13), 2.0);
    }

    #[test]
    fn individual_strategies() {
        assert_eq!(deterministic_strategy_chsh([1, 1, 1, 1]), 2.0);
        // 1·1 - 1·1 + (-1)·1 + (-1)·1
        assert_eq!(deterministic_strategy_chsh([1, -1, 1, 1]), -2.0);
        // every deterministic strategy sits on the bound
        for mask in 0..16u32 {
            let s = [0, 1, 2, 3].map(|k| if (mask >> k) & 1 == 0 { 1 } else { -1 });
            assert_eq!(deterministic_strategy_chsh(s).abs(), 2.0);
        }
    }
}
