//! Truncated Fock spaces of fermion modes times bounded boson occupations.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::sparse::{SparseOperator, TripletBuilder};
use crate::error::{Error, Result};

/// Default cap on the many-body dimension.
pub const DEFAULT_DIM_CAP: usize = 1 << 20;

/// Which tunnelling link a boson mode controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Species {
    X,
    Z,
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Species::X => "x",
            Species::Z => "z",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BosonMode {
    pub cell: usize,
    pub species: Species,
}

/// Basis: the product of fermion occupation bitmasks (optionally at fixed
/// particle number) and boson occupations `0..=n_max` per mode.
///
/// State index is `fermion_index * boson_dim + boson_index`; boson mode 0
/// is the most significant digit of `boson_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockSpace {
    n_fermion_modes: usize,
    boson_modes: Vec<BosonMode>,
    n_max: usize,
    sector: Option<usize>,
    fermion_states: Vec<u64>,
    boson_dim: usize,
}

impl FockSpace {
    pub fn new(n_fermion_modes: usize, boson_modes: Vec<BosonMode>, n_max: usize, sector: Option<usize>) -> Result<Self> {
        Self::with_cap(n_fermion_modes, boson_modes, n_max, sector, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(
        n_fermion_modes: usize,
        boson_modes: Vec<BosonMode>,
        n_max: usize,
        sector: Option<usize>,
        cap: usize,
    ) -> Result<Self> {
        if n_fermion_modes > 40 {
            return Err(Error::DimensionCap { what: "fermion modes", value: n_fermion_modes, cap: 40 });
        }
        if let Some(n) = sector {
            if n > n_fermion_modes {
                return Err(Error::InvalidParameter {
                    name: "sector",
                    reason: format!("{n} particles in {n_fermion_modes} modes"),
                });
            }
        }
        for (i, m) in boson_modes.iter().enumerate() {
            if boson_modes[..i].contains(m) {
                return Err(Error::InvalidParameter {
                    name: "boson_modes",
                    reason: format!("duplicate mode {}{}", m.species, m.cell),
                });
            }
        }
        let fermion_count = match sector {
            Some(n) => binomial(n_fermion_modes, n),
            None => 1usize.checked_shl(n_fermion_modes as u32).unwrap_or(usize::MAX),
        };
        let boson_dim = (n_max + 1).checked_pow(boson_modes.len() as u32).unwrap_or(usize::MAX);
        let dim = fermion_count.saturating_mul(boson_dim);
        if dim > cap {
            return Err(Error::DimensionCap { what: "Hilbert-space dimension", value: dim, cap });
        }
        let fermion_states: Vec<u64> = (0..1u64 << n_fermion_modes)
            .filter(|s| sector.is_none_or(|n| s.count_ones() as usize == n))
            .collect();
        Ok(Self { n_fermion_modes, boson_modes, n_max, sector, fermion_states, boson_dim })
    }

    pub fn dim(&self) -> usize {
        self.fermion_states.len() * self.boson_dim
    }

    pub fn n_fermion_modes(&self) -> usize {
        self.n_fermion_modes
    }

    pub fn boson_modes(&self) -> &[BosonMode] {
        &self.boson_modes
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn sector(&self) -> Option<usize> {
        self.sector
    }

    pub fn boson_dim(&self) -> usize {
        self.boson_dim
    }

    pub fn boson_index_of(&self, mode: BosonMode) -> Option<usize> {
        self.boson_modes.iter().position(|m| *m == mode)
    }

    /// Fermion bitmask and boson occupations of basis state `i`.
    pub fn decode(&self, i: usize) -> (u64, Vec<usize>) {
        let (f, mut b) = (i / self.boson_dim, i % self.boson_dim);
        let mut occ = vec![0; self.boson_modes.len()];
        for o in occ.iter_mut().rev() {
            *o = b % (self.n_max + 1);
            b /= self.n_max + 1;
        }
        (self.fermion_states[f], occ)
    }

    pub fn encode(&self, fermions: u64, bosons: &[usize]) -> Option<usize> {
        let f = self.fermion_states.binary_search(&fermions).ok()?;
        let mut b = 0;
        for &n in bosons {
            if n > self.n_max {
                return None;
            }
            b = b * (self.n_max + 1) + n;
        }
        Some(f * self.boson_dim + b)
    }

    /// Total boson occupation of basis state `i`.
    pub fn boson_total(&self, i: usize) -> usize {
        self.decode(i).1.iter().sum()
    }

    /// A one-line description of the mode ordering and truncation.
    pub fn manifest(&self) -> String {
        let bos: Vec<String> = self.boson_modes.iter().map(|m| format!("{}{}", m.species, m.cell)).collect();
        format!(
            "fermion_modes={} boson_modes=[{}] n_max={} sector={} dim={}",
            self.n_fermion_modes,
            bos.join(" "),
            self.n_max,
            self.sector.map_or("all".to_string(), |n| n.to_string()),
            self.dim()
        )
    }

    /// `c_i^dag c_j`, which keeps any particle-number sector.
    pub fn hop(&self, i: usize, j: usize) -> Result<SparseOperator> {
        self.fermion_string(&[(i, true), (j, false)])
    }

    /// `n_i = c_i^dag c_i`.
    pub fn number(&self, i: usize) -> Result<SparseOperator> {
        self.hop(i, i)
    }

    /// Product of fermion ladder operators applied right to left, e.g.
    /// `[(i, true), (j, false)]` is `c_i^dag c_j`. Images leaving the space
    /// (wrong sector) are dropped.
    pub fn fermion_string(&self, ops: &[(usize, bool)]) -> Result<SparseOperator> {
        for &(m, _) in ops {
            if m >= self.n_fermion_modes {
                return Err(Error::InvalidParameter { name: "mode", reason: format!("fermion mode {m} out of range") });
            }
        }
        let mut b = TripletBuilder::new(self.dim());
        for (fi, &s) in self.fermion_states.iter().enumerate() {
            let Some((t, sign)) = apply_fermion_string(s, ops) else { continue };
            let Ok(ft) = self.fermion_states.binary_search(&t) else { continue };
            for bi in 0..self.boson_dim {
                b.push(ft * self.boson_dim + bi, fi * self.boson_dim + bi, Complex64::new(sign, 0.0));
            }
        }
        b.build()
    }

    /// Fermion annihilator `c_i` (Jordan-Wigner signs). Needs a space without
    /// a particle-number sector.
    pub fn annihilator(&self, i: usize) -> Result<SparseOperator> {
        self.require_full("single fermion ladder operators")?;
        self.fermion_string(&[(i, false)])
    }

    pub fn creator(&self, i: usize) -> Result<SparseOperator> {
        self.require_full("single fermion ladder operators")?;
        self.fermion_string(&[(i, true)])
    }

    fn require_full(&self, what: &str) -> Result<()> {
        if self.sector.is_some() {
            Err(Error::InvalidParameter { name: "sector", reason: format!("{what} leave a fixed-number sector") })
        } else {
            Ok(())
        }
    }

    /// Truncated ladder `d` on `(n_max + 1)` levels: `d|n> = sqrt(n)|n-1>`.
    pub fn ladder_matrix(n_max: usize) -> DMatrix<Complex64> {
        let mut d = DMatrix::zeros(n_max + 1, n_max + 1);
        for n in 1..=n_max {
            d[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
        }
        d
    }

    /// Embeds a dense operator acting on the listed boson modes (first mode
    /// most significant) into the full space, identity elsewhere.
    pub fn embed_bosons(&self, modes: &[usize], local: &DMatrix<Complex64>) -> Result<SparseOperator> {
        let base = self.n_max + 1;
        let ldim = base.pow(modes.len() as u32);
        if local.nrows() != ldim || local.ncols() != ldim {
            return Err(Error::ShapeMismatch(format!("local operator {}x{} for {ldim} levels", local.nrows(), local.ncols())));
        }
        let mut b = TripletBuilder::new(self.dim());
        for i in 0..self.dim() {
            let (f, mut occ) = self.decode(i);
            let col = modes.iter().fold(0, |acc, &m| acc * base + occ[m]);
            for row in 0..ldim {
                let v = local[(row, col)];
                if v == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut r = row;
                for &m in modes.iter().rev() {
                    occ[m] = r % base;
                    r /= base;
                }
                let target = self.encode(f, &occ).expect("occupations within truncation");
                b.push(target, i, v);
            }
        }
        b.build()
    }

    /// `d` for boson mode `m`.
    pub fn boson_annihilator(&self, m: usize) -> Result<SparseOperator> {
        self.boson_mode_checked(m)?;
        self.embed_bosons(&[m], &Self::ladder_matrix(self.n_max))
    }

    pub fn boson_creator(&self, m: usize) -> Result<SparseOperator> {
        Ok(self.boson_annihilator(m)?.adjoint())
    }

    fn boson_mode_checked(&self, m: usize) -> Result<()> {
        if m < self.boson_modes.len() {
            Ok(())
        } else {
            Err(Error::InvalidParameter { name: "mode", reason: format!("boson mode {m} out of range") })
        }
    }

    /// Total fermion number.
    pub fn fermion_number(&self) -> SparseOperator {
        let d: Vec<Complex64> = (0..self.dim())
            .map(|i| Complex64::new(self.fermion_states[i / self.boson_dim].count_ones() as f64, 0.0))
            .collect();
        SparseOperator::diagonal(&d)
    }
}

/// Applies ladder operators right to left to a bitmask; `None` if the state is annihilated.
pub fn apply_fermion_string(mut s: u64, ops: &[(usize, bool)]) -> Option<(u64, f64)> {
    let mut sign = 1.0;
    for &(m, dagger) in ops.iter().rev() {
        let bit = 1u64 << m;
        if (s & bit != 0) == dagger {
            return None;
        }
        if (s & (bit - 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        s ^= bit;
    }
    Some((s, sign))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Creation and annihilation matrices for every mode of a space without a sector filter.
#[derive(Debug, Clone)]
pub struct OperatorAlgebra {
    pub c: Vec<SparseOperator>,
    pub c_dag: Vec<SparseOperator>,
    pub d: Vec<SparseOperator>,
    pub d_dag: Vec<SparseOperator>,
}

pub fn operator_algebra(space: &FockSpace) -> Result<OperatorAlgebra> {
    let c = (0..space.n_fermion_modes()).map(|i| space.annihilator(i)).collect::<Result<Vec<_>>>()?;
    let d = (0..space.boson_modes().len()).map(|m| space.boson_annihilator(m)).collect::<Result<Vec<_>>>()?;
    Ok(OperatorAlgebra {
        c_dag: c.iter().map(|x| x.adjoint()).collect(),
        d_dag: d.iter().map(|x| x.adjoint()).collect(),
        c,
        d,
    })
}

impl OperatorAlgebra {
    /// Largest deviation from `{c_i, c_j^dag} = delta_ij` and `{c_i, c_j} = 0`.
    pub fn fermion_defect(&self) -> Result<f64> {
        let n = self.c.len();
        let dim = self.c.first().map_or(1, |x| x.dim());
        let id = SparseOperator::identity(dim);
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut ac = self.c[i].anticommutator(&self.c_dag[j])?;
                if i == j {
                    ac = ac.sub(&id)?;
                }
                worst = worst.max(ac.max_abs()).max(self.c[i].anticommutator(&self.c[j])?.max_abs());
            }
        }
        Ok(worst)
    }

    /// Largest deviation from canonical boson commutators on states where
    /// every mode is below the cutoff `n_max`.
    pub fn boson_defect(&self, space: &FockSpace) -> Result<f64> {
        let below: Vec<usize> =
            (0..space.dim()).filter(|&i| space.decode(i).1.iter().all(|&o| o < space.n_max())).collect();
        let id = SparseOperator::identity(space.dim());
        let mut worst = 0.0_f64;
        for m in 0..self.d.len() {
            for n in 0..self.d.len() {
                let mut com = self.d[m].commutator(&self.d_dag[n])?;
                if m == n {
                    com = com.sub(&id)?;
                }
                let r = com.restrict(&below);
                worst = worst.max(r.iter().fold(0.0_f64, |a, z| a.max(z.norm())));
                let r2 = self.d[m].commutator(&self.d[n])?;
                worst = worst.max(r2.max_abs());
            }
        }
        Ok(worst)
    }
}
