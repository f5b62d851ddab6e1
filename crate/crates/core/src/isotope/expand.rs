use libm::lgamma;

use super::table::{Isotope, IsotopeTable};
use super::IsotopeError;

pub const DEFAULT_CONFIGURATION_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpandOptions {
    /// Drop compositions whose log-abundance is more than this far below the
    /// most probable one. `None` enumerates everything.
    pub prune_delta: Option<f64>,
    pub cap: u64,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        Self {
            prune_delta: None,
            cap: DEFAULT_CONFIGURATION_CAP,
        }
    }
}

/// All isotope compositions of `count` atoms of one element.
///
/// Entry `i` has log-probability `log_abundances[i]`, mass `masses[i]` and
/// composition `composition(i)`: how many atoms take each isotope, in table
/// order. Entries are in no particular order.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotopologueVector {
    pub symbol: String,
    pub count: u32,
    pub log_abundances: Vec<f64>,
    pub masses: Vec<f64>,
    isotope_count: usize,
    compositions: Vec<u32>,
}

impl IsotopologueVector {
    pub fn len(&self) -> usize {
        self.log_abundances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_abundances.is_empty()
    }

    pub fn isotope_count(&self) -> usize {
        self.isotope_count
    }

    pub fn composition(&self, entry: usize) -> &[u32] {
        &self.compositions[entry * self.isotope_count..(entry + 1) * self.isotope_count]
    }
}

/// `C(count + isotopes - 1, isotopes - 1)`, saturating.
fn composition_count(count: u32, isotopes: usize) -> u64 {
    let n = u128::from(count) + isotopes as u128 - 1;
    let r = (isotopes - 1).min(count as usize) as u128;
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) / (i + 1);
        if acc > u128::from(u64::MAX) {
            return u64::MAX;
        }
    }
    acc as u64
}

fn ln_factorial(k: u32) -> f64 {
    lgamma(f64::from(k) + 1.0)
}

/// Expands `count` atoms of `symbol` into its multinomial isotope
/// distribution, in natural-log space.
pub fn expand_element(
    symbol: &str,
    count: u32,
    table: &IsotopeTable,
    options: ExpandOptions,
) -> Result<IsotopologueVector, IsotopeError> {
    let isotopes = table
        .isotopes(symbol)
        .ok_or_else(|| IsotopeError::UnknownElement(symbol.to_string()))?;
    if let Some(delta) = options.prune_delta {
        if delta.is_nan() || delta < 0.0 {
            return Err(IsotopeError::InvalidPruneDelta(delta));
        }
    }
    let total = composition_count(count, isotopes.len());
    let too_many = || IsotopeError::TooManyConfigurations {
        element: symbol.to_string(),
        count: total,
        cap: options.cap,
    };
    if options.prune_delta.is_none() && total > options.cap {
        return Err(too_many());
    }

    let mut walk = Walk::new(isotopes, count, options.cap);
    if let Some(delta) = options.prune_delta {
        walk.threshold = Some(walk.greedy_log_abundance() - delta);
    }
    let mut composition = Vec::with_capacity(isotopes.len());
    if !walk.visit(0, count, 0.0, &mut composition) {
        return Err(too_many());
    }

    let mut out = walk.out;
    if let Some(delta) = options.prune_delta {
        let best = out
            .log_abundances
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        out.retain_at_least(best - delta);
    }
    out.symbol = symbol.to_string();
    Ok(out)
}

impl IsotopologueVector {
    fn retain_at_least(&mut self, floor: f64) {
        let e = self.isotope_count;
        let mut kept = 0;
        for i in 0..self.len() {
            if self.log_abundances[i] >= floor {
                self.log_abundances[kept] = self.log_abundances[i];
                self.masses[kept] = self.masses[i];
                self.compositions.copy_within(i * e..(i + 1) * e, kept * e);
                kept += 1;
            }
        }
        self.log_abundances.truncate(kept);
        self.masses.truncate(kept);
        self.compositions.truncate(kept * e);
    }
}

/// Depth-first enumeration of compositions, one isotope per level.
///
/// With a threshold, a subtree is skipped when even its most probable
/// completion falls below it. The bound for a prefix is the exact log
/// marginal probability of that prefix, which no completion can exceed.
struct Walk<'a> {
    isotopes: &'a [Isotope],
    log_p: Vec<f64>,
    /// `ln(sum of abundances from isotope d on)`.
    log_tail: Vec<f64>,
    ln_count_factorial: f64,
    threshold: Option<f64>,
    cap: u64,
    out: IsotopologueVector,
}

impl<'a> Walk<'a> {
    fn new(isotopes: &'a [Isotope], count: u32, cap: u64) -> Self {
        let log_p: Vec<f64> = isotopes.iter().map(|i| i.abundance.ln()).collect();
        let mut log_tail = vec![0.0; isotopes.len()];
        let mut tail = 0.0;
        for d in (0..isotopes.len()).rev() {
            tail += isotopes[d].abundance;
            log_tail[d] = tail.ln();
        }
        Self {
            isotopes,
            log_p,
            log_tail,
            ln_count_factorial: ln_factorial(count),
            threshold: None,
            cap,
            out: IsotopologueVector {
                symbol: String::new(),
                count,
                log_abundances: Vec::new(),
                masses: Vec::new(),
                isotope_count: isotopes.len(),
                compositions: Vec::new(),
            },
        }
    }

    fn last(&self) -> usize {
        self.isotopes.len() - 1
    }

    /// Term contributed by `k` atoms of isotope `d`.
    fn term(&self, d: usize, k: u32) -> f64 {
        f64::from(k) * self.log_p[d] - ln_factorial(k)
    }

    /// Upper bound on any completion after fixing isotopes `..=d` with
    /// `remaining` atoms left for the rest.
    fn bound(&self, d: usize, partial: f64, remaining: u32) -> f64 {
        self.ln_count_factorial + partial - ln_factorial(remaining)
            + f64::from(remaining) * self.log_tail[d + 1]
    }

    /// Most likely count of isotope `d` given `remaining` atoms for `d..`.
    fn conditional_mode(&self, d: usize, remaining: u32) -> u32 {
        let share = (self.log_p[d] - self.log_tail[d]).exp().min(1.0);
        ((f64::from(remaining) + 1.0) * share)
            .floor()
            .min(f64::from(remaining)) as u32
    }

    /// Log-abundance of the composition built from conditional modes; a
    /// lower bound on the best entry.
    fn greedy_log_abundance(&self) -> f64 {
        let mut remaining = self.out.count;
        let mut partial = 0.0;
        for d in 0..self.last() {
            let k = self.conditional_mode(d, remaining);
            partial += self.term(d, k);
            remaining -= k;
        }
        self.ln_count_factorial + partial + self.term(self.last(), remaining)
    }

    /// Returns false if the cap on emitted entries was hit.
    fn visit(
        &mut self,
        d: usize,
        remaining: u32,
        partial: f64,
        composition: &mut Vec<u32>,
    ) -> bool {
        if d == self.last() {
            let log_abundance = self.ln_count_factorial + partial + self.term(d, remaining);
            if self.threshold.is_some_and(|t| log_abundance < t) {
                return true;
            }
            if self.out.log_abundances.len() as u64 >= self.cap {
                return false;
            }
            composition.push(remaining);
            let mass = composition
                .iter()
                .zip(self.isotopes)
                .map(|(&k, iso)| f64::from(k) * iso.mass)
                .sum();
            self.out.log_abundances.push(log_abundance);
            self.out.masses.push(mass);
            self.out.compositions.extend_from_slice(composition);
            composition.pop();
            return true;
        }

        match self.threshold {
            None => {
                for k in 0..=remaining {
                    if !self.descend(d, k, remaining, partial, composition) {
                        return false;
                    }
                }
            }
            Some(threshold) => {
                // the prefix marginal is log-concave in k: walk outward from its mode
                let mode = self.conditional_mode(d, remaining);
                for k in mode..=remaining {
                    let p = partial + self.term(d, k);
                    if self.bound(d, p, remaining - k) < threshold {
                        break;
                    }
                    if !self.descend(d, k, remaining, partial, composition) {
                        return false;
                    }
                }
                for k in (0..mode).rev() {
                    let p = partial + self.term(d, k);
                    if self.bound(d, p, remaining - k) < threshold {
                        break;
                    }
                    if !self.descend(d, k, remaining, partial, composition) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn descend(
        &mut self,
        d: usize,
        k: u32,
        remaining: u32,
        partial: f64,
        composition: &mut Vec<u32>,
    ) -> bool {
        composition.push(k);
        let ok = self.visit(d + 1, remaining - k, partial + self.term(d, k), composition);
        composition.pop();
        ok
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin() -> IsotopeTable {
        IsotopeTable::builtin()
    }

    fn entry_for(v: &IsotopologueVector, composition: &[u32]) -> usize {
        (0..v.len())
            .find(|&i| v.composition(i) == composition)
            .expect("composition present")
    }

    #[test]
    fn carbon_three() {
        let v = expand_element("C", 3, &builtin(), ExpandOptions::default()).unwrap();
        assert_eq!(v.len(), 4);
        let mono = entry_for(&v, &[3, 0]);
        assert!((v.log_abundances[mono] - 3.0 * 0.9892f64.ln()).abs() < 1e-12);
        assert!((v.log_abundances[mono] - (-0.0326)).abs() < 5e-5);
        let one_heavy = entry_for(&v, &[2, 1]);
        let expected = 3f64.ln() + 2.0 * 0.9892f64.ln() + 0.0108f64.ln();
        assert!((v.log_abundances[one_heavy] - expected).abs() < 1e-12);
        assert!((v.log_abundances[one_heavy] - (-3.4513)).abs() < 5e-5);
        assert_eq!(v.masses[one_heavy], 2.0 * 12.0 + 13.0033548378);
    }

    #[test]
    fn single_atom_is_the_isotope_list() {
        let table = builtin();
        for symbol in ["H", "O", "S", "Ne"] {
            let v = expand_element(symbol, 1, &table, ExpandOptions::default()).unwrap();
            let isotopes = table.isotopes(symbol).unwrap();
            assert_eq!(v.len(), isotopes.len());
            for (j, iso) in isotopes.iter().enumerate() {
                let mut comp = vec![0; isotopes.len()];
                comp[j] = 1;
                let i = entry_for(&v, &comp);
                assert!((v.log_abundances[i] - iso.abundance.ln()).abs() < 1e-14);
                assert_eq!(v.masses[i], iso.mass);
            }
        }
    }

    #[test]
    fn single_isotope_element() {
        let v = expand_element("P", 5, &builtin(), ExpandOptions::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.log_abundances[0], 0.0);
        assert_eq!(v.composition(0), &[5]);
    }

    #[test]
    fn stars_and_bars_counts() {
        let table = builtin();
        let s6 = expand_element("S", 6, &table, ExpandOptions::default()).unwrap();
        assert_eq!(s6.len(), 84);
        assert_eq!(composition_count(6, 4), 84);
        assert_eq!(composition_count(800, 3), 321_201);
        assert_eq!(composition_count(800, 1), 1);
        assert_eq!(composition_count(u32::MAX, 40), u64::MAX);
        let o100 = expand_element("O", 100, &table, ExpandOptions::default()).unwrap();
        assert_eq!(o100.len(), 5151);
    }

    #[test]
    fn unpruned_distribution_normalizes() {
        let table = builtin();
        for (symbol, count) in [("C", 3), ("S", 6), ("O", 100), ("Cl", 40), ("H", 8)] {
            let v = expand_element(symbol, count, &table, ExpandOptions::default()).unwrap();
            let total: f64 = v.log_abundances.iter().map(|l| l.exp()).sum();
            assert!((total - 1.0).abs() < 1e-6, "{symbol}{count}: {total}");
            for i in 0..v.len() {
                assert_eq!(v.composition(i).iter().sum::<u32>(), count);
            }
        }
    }

    #[test]
    fn cap_names_the_element() {
        let options = ExpandOptions {
            prune_delta: None,
            cap: 100,
        };
        let err = expand_element("O", 100, &builtin(), options).unwrap_err();
        assert_eq!(
            err,
            IsotopeError::TooManyConfigurations {
                element: "O".into(),
                count: 5151,
                cap: 100
            }
        );
    }

    #[test]
    fn pruning_keeps_exactly_the_entries_above_the_floor() {
        let table = builtin();
        for (symbol, count, delta) in [
            ("S", 30, 6.0),
            ("O", 200, 10.0),
            ("Ne", 150, 3.0),
            ("C", 50, 0.0),
        ] {
            let full = expand_element(symbol, count, &table, ExpandOptions::default()).unwrap();
            let best = full
                .log_abundances
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let mut expected: Vec<Vec<u32>> = (0..full.len())
                .filter(|&i| full.log_abundances[i] >= best - delta)
                .map(|i| full.composition(i).to_vec())
                .collect();
            let options = ExpandOptions {
                prune_delta: Some(delta),
                ..ExpandOptions::default()
            };
            let pruned = expand_element(symbol, count, &table, options).unwrap();
            let mut got: Vec<Vec<u32>> = (0..pruned.len())
                .map(|i| pruned.composition(i).to_vec())
                .collect();
            expected.sort();
            got.sort();
            assert_eq!(got, expected, "{symbol}{count} delta {delta}");
        }
    }

    #[test]
    fn pruning_makes_huge_counts_tractable() {
        let options = ExpandOptions {
            prune_delta: Some(2.0),
            ..ExpandOptions::default()
        };
        let v = expand_element("S", 10_000, &builtin(), options).unwrap();
        assert!(!v.is_empty());
        assert!(v.len() < 1_000_000);
        assert!(matches!(
            expand_element("S", 10_000, &builtin(), ExpandOptions::default()),
            Err(IsotopeError::TooManyConfigurations { .. })
        ));
    }

    #[test]
    fn rejects_negative_delta_and_unknown_element() {
        let options = ExpandOptions {
            prune_delta: Some(-1.0),
            ..ExpandOptions::default()
        };
        assert!(matches!(
            expand_element("C", 2, &builtin(), options),
            Err(IsotopeError::InvalidPruneDelta(_))
        ));
        assert_eq!(
            expand_element("Zz", 2, &builtin(), ExpandOptions::default()),
            Err(IsotopeError::UnknownElement("Zz".into()))
        );
    }
}
