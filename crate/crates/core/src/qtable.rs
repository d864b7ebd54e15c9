//! Candidate-solution representation: a 128-gene real vector holding the
//! luminance table (genes 0..64) followed by the chrominance table (64..128),
//! both row-major.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{QuantTable, QuantTables};
use crate::error::{Error, Result};

pub const GENOTYPE_LEN: usize = 128;

#[rustfmt::skip]
pub const ANNEX_K_LUMA: [u8; 64] = [
    16, 11, 10, 16,  24,  40,  51,  61,
    12, 12, 14, 19,  26,  58,  60,  55,
    14, 13, 16, 24,  40,  57,  69,  56,
    14, 17, 22, 29,  51,  87,  80,  62,
    18, 22, 37, 56,  68, 109, 103,  77,
    24, 35, 55, 64,  81, 104, 113,  92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103,  99,
];

#[rustfmt::skip]
pub const ANNEX_K_CHROMA: [u8; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99,
    18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99,
    47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// Box constraints of the search space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    pub dimension: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            lower: 1.0,
            upper: 255.0,
            dimension: GENOTYPE_LEN,
        }
    }
}

impl Bounds {
    pub fn new(lower: f64, upper: f64, dimension: usize) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
            return Err(Error::InvalidArgument(format!(
                "bounds need finite lower < upper, got [{lower}, {upper}]"
            )));
        }
        if dimension == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        Ok(Self {
            lower,
            upper,
            dimension,
        })
    }

    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }

    #[inline]
    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lower, self.upper)
    }

    pub fn contains(&self, g: &Genotype) -> bool {
        g.len() == self.dimension && g.iter().all(|&v| (self.lower..=self.upper).contains(&v))
    }

    /// Uniform sample of the box.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Genotype {
        Genotype(
            (0..self.dimension)
                .map(|_| rng.random_range(self.lower..=self.upper))
                .collect(),
        )
    }
}

/// Real-valued candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genotype(pub Vec<f64>);

impl Genotype {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn filled(value: f64, len: usize) -> Self {
        Self(vec![value; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    /// Clamps every gene into `bounds`.
    pub fn repair(&mut self, bounds: &Bounds) {
        for v in &mut self.0 {
            *v = bounds.clamp(*v);
        }
    }

    /// Integer-valued genotype encoding the given tables.
    pub fn from_tables(tables: &QuantTables) -> Self {
        Self(
            tables
                .lqt
                .entries()
                .iter()
                .chain(tables.cqt.entries())
                .map(|&e| f64::from(e))
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for Genotype {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Genotype {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

#[inline]
fn gene_to_step(v: f64) -> u16 {
    if v.is_nan() {
        return 1;
    }
    v.round().clamp(1.0, 255.0) as u16
}

/// Rounds (half away from zero) and clamps each gene into `[1, 255]`.
///
/// Panics if the genotype is not 128 genes long.
pub fn decode(g: &Genotype) -> QuantTables {
    assert_eq!(g.len(), GENOTYPE_LEN, "genotype must have 128 genes");
    let lqt: [u16; 64] = std::array::from_fn(|i| gene_to_step(g[i]));
    let cqt: [u16; 64] = std::array::from_fn(|i| gene_to_step(g[64 + i]));
    QuantTables {
        lqt: QuantTable::new(lqt).expect("clamped into range"),
        cqt: QuantTable::new(cqt).expect("clamped into range"),
    }
}

/// The typical luminance and chrominance tables of ITU-T T.81 Annex K.
pub fn annex_k_baseline() -> QuantTables {
    QuantTables {
        lqt: QuantTable::from_u8(ANNEX_K_LUMA).expect("static table"),
        cqt: QuantTable::from_u8(ANNEX_K_CHROMA).expect("static table"),
    }
}

/// `n` genotypes drawn i.i.d. uniformly from `bounds`, reproducible from `seed`.
pub fn random_population(n: usize, bounds: &Bounds, seed: u64) -> Result<Vec<Genotype>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_population_with(n, bounds, &mut rng)
}

pub fn random_population_with<R: Rng + ?Sized>(
    n: usize,
    bounds: &Bounds,
    rng: &mut R,
) -> Result<Vec<Genotype>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "population size must be at least 1".into(),
        ));
    }
    Ok((0..n).map(|_| bounds.sample(rng)).collect())
}

/// IJG-style quality scaling of a table pair.
pub fn quality_scale(tables: &QuantTables, q: u32) -> Result<QuantTables> {
    if !(1..=100).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "quality {q} outside [1, 100]"
        )));
    }
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let scale_table = |t: &QuantTable| {
        let e: [u16; 64] = std::array::from_fn(|i| {
            let v = (u32::from(t.entries()[i]) * scale + 50) / 100;
            v.clamp(1, 255) as u16
        });
        QuantTable::new(e).expect("clamped into range")
    };
    Ok(QuantTables {
        lqt: scale_table(&tables.lqt),
        cqt: scale_table(&tables.cqt),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decode_examples() {
        let t = decode(&Genotype::filled(1.0, 128));
        assert!(t.lqt.entries().iter().all(|&e| e == 1));
        assert!(t.cqt.entries().iter().all(|&e| e == 1));

        let mut g = Genotype::filled(50.0, 128);
        g[3] = 0.4;
        g[70] = 16.6;
        g[71] = 16.5;
        let t = decode(&g);
        assert_eq!(t.lqt.entries()[3], 1);
        assert_eq!(t.cqt.entries()[6], 17);
        assert_eq!(t.cqt.entries()[7], 17);
    }

    #[test]
    fn annex_k_corners() {
        let t = annex_k_baseline();
        assert_eq!(t.lqt.get(0, 0), 16);
        assert_eq!(t.lqt.get(7, 7), 99);
        assert_eq!(t.cqt.get(0, 0), 17);
    }

    #[test]
    fn random_population_contract() {
        let b = Bounds::default();
        let a = random_population(50, &b, 42).unwrap();
        assert_eq!(a, random_population(50, &b, 42).unwrap());
        assert_ne!(a, random_population(50, &b, 43).unwrap());
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|g| g.len() == 128 && b.contains(g)));
        assert!(matches!(
            random_population(0, &b, 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn uniform_mean_per_dimension() {
        // uniform on [1, 255]: mean 128, sd 73.3; 3 sigma of the mean over 1e5 draws is 0.7
        let b = Bounds::default();
        let pop = random_population(100_000, &b, 7).unwrap();
        for d in 0..128 {
            let mean = pop.iter().map(|g| g[d]).sum::<f64>() / pop.len() as f64;
            assert!((mean - 128.0).abs() < 3.0, "dimension {d}: {mean}");
        }
    }

    #[test]
    fn quality_scaling() {
        let base = annex_k_baseline();
        assert_eq!(quality_scale(&base, 50).unwrap(), base);
        let q100 = quality_scale(&base, 100).unwrap();
        assert!(q100.lqt.entries().iter().all(|&e| e == 1));
        // (16 * 500 + 50) / 100 = 80 in integer arithmetic
        assert_eq!(quality_scale(&base, 10).unwrap().lqt.get(0, 0), 80);
        assert!(quality_scale(&base, 0).is_err());
        assert!(quality_scale(&base, 101).is_err());
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(5.0, 5.0, 3).is_err());
        assert!(Bounds::new(1.0, f64::INFINITY, 3).is_err());
        assert!(Bounds::new(1.0, 255.0, 128).is_ok());
    }

    proptest! {
        #[test]
        fn decode_always_in_range(values in proptest::collection::vec(-1e6f64..1e6, 128)) {
            let t = decode(&Genotype(values));
            prop_assert!(t.lqt.entries().iter().chain(t.cqt.entries()).all(|&e| e >= 1));
        }

        #[test]
        fn integer_tables_round_trip(entries in proptest::collection::vec(1u8..=255, 128)) {
            let lqt: [u8; 64] = entries[..64].try_into().unwrap();
            let cqt: [u8; 64] = entries[64..].try_into().unwrap();
            let t = QuantTables {
                lqt: QuantTable::from_u8(lqt).unwrap(),
                cqt: QuantTable::from_u8(cqt).unwrap(),
            };
            prop_assert_eq!(decode(&Genotype::from_tables(&t)), t);
        }
    }
}
