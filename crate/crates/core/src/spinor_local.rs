//! Relative spinor images H(D^[r] | H) at split places.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branches::{deepen, diameter, BranchShape};
use crate::bt_tree::{distance, Vertex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpinorImage {
    /// All of K_p^*.
    #[serde(rename = "full")]
    FullNormGroup,
    /// O_p^* K_p^{*2}.
    #[serde(rename = "unit_squares")]
    UnitSquares,
    #[serde(rename = "no_embedding")]
    NoEmbedding,
}

/// Spinor image for the genus of D^[r] with D of level d, relative to an
/// order whose branch is `s`.
pub fn spinor_image(s: &BranchShape, d: u32, r: u32) -> SpinorImage {
    let delta = match diameter(&deepen(s, r)) {
        Err(_) => return SpinorImage::NoEmbedding,
        Ok(delta) => delta,
    };
    match delta {
        Some(delta) if delta < d => SpinorImage::NoEmbedding,
        _ if d % 2 == 1 => SpinorImage::FullNormGroup,
        None => SpinorImage::FullNormGroup,
        Some(delta) if d < delta => SpinorImage::FullNormGroup,
        Some(_) => SpinorImage::UnitSquares,
    }
}

/// Whether `set` holds a pair (x, y) at distance d with distance(anchor.0, x)
/// odd. The anchor must itself be such a pair inside the set.
pub fn odd_pair_oracle(set: &BTreeSet<Vertex>, d: u32, anchor: (&Vertex, &Vertex)) -> Result<bool> {
    let (a, b) = anchor;
    if !set.contains(a) || !set.contains(b) || distance(a, b) != d {
        return Err(Error::AnchorInvalid);
    }
    let members: Vec<&Vertex> = set.iter().collect();
    Ok(members
        .par_iter()
        .filter(|x| distance(a, x) % 2 == 1)
        .any(|x| members.iter().any(|y| distance(x, y) == d)))
}

/// Some pair at distance d in the set, if any.
pub fn find_pair(set: &BTreeSet<Vertex>, d: u32) -> Option<(Vertex, Vertex)> {
    set.iter().find_map(|x| set.iter().find(|y| distance(x, y) == d).map(|y| (x.clone(), y.clone())))
}
