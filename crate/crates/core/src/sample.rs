//! Bivariate samples and rank transforms.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::full_precision;
use crate::rng::SplitMix64;

/// Whether the coordinates are raw observations or already uniform(0,1)
/// probability transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MarginKind {
    Raw,
    Uniform,
}

impl MarginKind {
    pub fn name(self) -> &'static str {
        match self {
            MarginKind::Raw => "raw",
            MarginKind::Uniform => "uniform",
        }
    }
}

/// An ordered collection of bivariate observations.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pairs: Vec<(f64, f64)>,
    margin_kind: MarginKind,
}

impl PairSample {
    pub fn from_pairs(pairs: Vec<(f64, f64)>, margin_kind: MarginKind) -> Self {
        Self { pairs, margin_kind }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn margin_kind(&self) -> MarginKind {
        self.margin_kind
    }

    /// 1-based ranks of the x and y coordinates. Exact ties are an error:
    /// the underlying theory assumes continuous margins.
    pub fn ranks(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        let rx = rank_coordinate(self.pairs.iter().map(|p| p.0), "x")?;
        let ry = rank_coordinate(self.pairs.iter().map(|p| p.1), "y")?;
        Ok((rx, ry))
    }

    /// The rank pairs (R_i/n, S_i/n): the uniform-margin pseudo-observations.
    pub fn pseudo_observations(&self) -> Result<PairSample> {
        let n = self.len() as f64;
        let (rx, ry) = self.ranks()?;
        let pairs = rx
            .iter()
            .zip(&ry)
            .map(|(&r, &s)| (r as f64 / n, s as f64 / n))
            .collect();
        Ok(PairSample::from_pairs(pairs, MarginKind::Uniform))
    }

    /// Pseudo-observations with ties broken by a seeded random permutation:
    /// tied values are ordered by a SplitMix64 key stream, so the result is
    /// reproducible for a fixed seed.
    pub fn pseudo_observations_tiebreak(&self, seed: u64) -> PairSample {
        let n = self.len() as f64;
        let mut rng = SplitMix64::new(seed);
        let keys: Vec<u64> = (0..self.len()).map(|_| rng.next_u64()).collect();
        let rank_with_keys = |coord: fn(&(f64, f64)) -> f64| -> Vec<usize> {
            let mut idx: Vec<usize> = (0..self.len()).collect();
            idx.sort_by(|&a, &b| {
                coord(&self.pairs[a])
                    .total_cmp(&coord(&self.pairs[b]))
                    .then(keys[a].cmp(&keys[b]))
            });
            let mut ranks = vec![0usize; self.len()];
            for (pos, &i) in idx.iter().enumerate() {
                ranks[i] = pos + 1;
            }
            ranks
        };
        let rx = rank_with_keys(|p| p.0);
        let ry = rank_with_keys(|p| p.1);
        let pairs = rx
            .iter()
            .zip(&ry)
            .map(|(&r, &s)| (r as f64 / n, s as f64 / n))
            .collect();
        PairSample::from_pairs(pairs, MarginKind::Uniform)
    }

    /// CSV with header `u,v`, one pair per row, 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "u,v")?;
        for &(u, v) in &self.pairs {
            writeln!(w, "{},{}", full_precision(u), full_precision(v))?;
        }
        Ok(())
    }

    /// Parse the `u,v` CSV format. Lines starting with `#` are skipped.
    pub fn read_csv<R: BufRead>(r: R, margin_kind: MarginKind) -> Result<PairSample> {
        let mut pairs = Vec::new();
        let mut saw_header = false;
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !saw_header {
                saw_header = true;
                if line.eq_ignore_ascii_case("u,v") {
                    continue;
                }
            }
            let mut it = line.split(',');
            let parse = |tok: Option<&str>| -> Result<f64> {
                tok.ok_or_else(|| Error::CsvParse {
                    line: lineno + 1,
                    message: "expected two comma-separated fields".into(),
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::CsvParse {
                    line: lineno + 1,
                    message: e.to_string(),
                })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            pairs.push((u, v));
        }
        Ok(PairSample::from_pairs(pairs, margin_kind))
    }
}

fn rank_coordinate<I: Iterator<Item = f64>>(values: I, axis: &'static str) -> Result<Vec<usize>> {
    let values: Vec<f64> = values.collect();
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    for w in idx.windows(2) {
        if values[w[0]] == values[w[1]] {
            return Err(Error::TiesPresent {
                axis,
                i: w[0],
                j: w[1],
            });
        }
    }
    let mut ranks = vec![0usize; values.len()];
    for (pos, &i) in idx.iter().enumerate() {
        ranks[i] = pos + 1;
    }
    Ok(ranks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pseudo_observations_by_hand() {
        let s = PairSample::from_pairs(vec![(3.2, -1.0), (1.1, 4.0), (2.0, 0.0)], MarginKind::Raw);
        let p = s.pseudo_observations().unwrap();
        let want = [
            (1.0, 1.0 / 3.0),
            (1.0 / 3.0, 1.0),
            (2.0 / 3.0, 2.0 / 3.0),
        ];
        for (got, want) in p.pairs().iter().zip(want.iter()) {
            assert_eq!(got, want);
        }
        assert_eq!(p.margin_kind(), MarginKind::Uniform);
    }

    #[test]
    fn single_observation_has_rank_one() {
        let s = PairSample::from_pairs(vec![(5.0, 5.0)], MarginKind::Raw);
        let p = s.pseudo_observations().unwrap();
        assert_eq!(p.pairs(), &[(1.0, 1.0)]);
    }

    #[test]
    fn uniform_sample_ranks_by_hand() {
        let s = PairSample::from_pairs(vec![(0.2, 0.9), (0.7, 0.1)], MarginKind::Uniform);
        let p = s.pseudo_observations().unwrap();
        assert_eq!(p.pairs(), &[(0.5, 1.0), (1.0, 0.5)]);
    }

    #[test]
    fn ties_are_detected() {
        let s = PairSample::from_pairs(vec![(1.0, 2.0), (1.0, 3.0)], MarginKind::Raw);
        match s.pseudo_observations() {
            Err(Error::TiesPresent { axis: "x", .. }) => {}
            other => panic!("expected x ties, got {other:?}"),
        }
        let s = PairSample::from_pairs(vec![(1.0, 3.0), (2.0, 3.0)], MarginKind::Raw);
        assert!(matches!(
            s.pseudo_observations(),
            Err(Error::TiesPresent { axis: "y", .. })
        ));
    }

    #[test]
    fn tiebreak_is_seeded_and_produces_permutation() {
        let s = PairSample::from_pairs(
            vec![(1.0, 2.0), (1.0, 2.0), (1.0, 2.0), (0.5, 7.0)],
            MarginKind::Raw,
        );
        let a = s.pseudo_observations_tiebreak(9);
        let b = s.pseudo_observations_tiebreak(9);
        assert_eq!(a.pairs(), b.pairs());
        let mut us: Vec<f64> = a.pairs().iter().map(|p| p.0).collect();
        us.sort_by(f64::total_cmp);
        assert_eq!(us, vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn csv_roundtrip() {
        let s = PairSample::from_pairs(
            vec![(0.123456789012345678, 0.9), (1e-17, 0.5)],
            MarginKind::Uniform,
        );
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = PairSample::read_csv(&buf[..], MarginKind::Uniform).unwrap();
        assert_eq!(s.pairs(), back.pairs());
    }
}
