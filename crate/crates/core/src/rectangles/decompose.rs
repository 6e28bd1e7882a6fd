use num_rational::BigRational;
use num_traits::Zero;

use super::{mu_mass, Rectangle, WitnessSet};
use crate::combinatorics::MuParams;
use crate::{Error, Result};

/// `R` split into the pieces `R_I = R ∩ {x_i = y_i = 1 for i in I}` over all
/// `|I| = k`, with both sides of
/// `mu_{k+1,n,m}(R) = sum_I mu_{k+1,n,m}(R_I) / (k + 1)`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub distribution: MuParams,
    pub pieces: Vec<(WitnessSet, Rectangle)>,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl Decomposition {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

pub fn decompose_by_witness(rect: &Rectangle, k: usize, n: usize, m: usize) -> Result<Decomposition> {
    if rect.universe() != Some(n) {
        return Err(Error::Dimension(format!(
            "rectangle is not over the {n}-bit communication matrix"
        )));
    }
    let dist = MuParams::new(k + 1, n, m)?;
    let lhs = mu_mass(dist, rect)?;
    let mut pieces = Vec::new();
    let mut total = BigRational::zero();
    for set in WitnessSet::all(n, k) {
        let piece = rect.intersect(&set.fixing_rectangle());
        total += mu_mass(dist, &piece)?;
        pieces.push((set, piece));
    }
    let rhs = total / BigRational::from_integer((k + 1).into());
    Ok(Decomposition {
        distribution: dist,
        pieces,
        lhs,
        rhs,
    })
}
