//! Published Malagasy reference data: the 23-dialect lexical distance table
//! (entries ×1000) and the numbered dialect registry.

use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::DistanceMatrix;
use crate::phylogeny::{to_separation_times, upgma, PhyloTree, DEFAULT_SCALE};

pub const DIALECT_COUNT: usize = 23;

/// Strict lower triangle, row by row (row 2 col 1, row 3 cols 1-2, ...).
const LOWER_TRIANGLE: [u16; 253] = [
    323, 246, 276, 322, 240, 295, 302, 281, 309, 345, 227, 318, 275, 359, 266, 413, 386, 390, 418, 314, 370, 280, 386,
    342, 401, 356, 245, 436, 366, 424, 379, 412, 405, 375, 450, 409, 411, 396, 416, 440, 318, 366, 249, 456, 482, 207,
    326, 260, 362, 286, 61, 383, 201, 374, 384, 362, 343, 345, 387, 292, 328, 289, 397, 435, 330, 324, 303, 369, 330,
    381, 384, 329, 454, 362, 256, 487, 318, 407, 343, 302, 331, 355, 243, 317, 303, 403, 423, 314, 336, 301, 419, 397,
    453, 394, 462, 392, 375, 342, 463, 485, 304, 383, 405, 471, 388, 368, 391, 385, 416, 392, 390, 448, 406, 320, 474,
    383, 429, 325, 418, 486, 400, 350, 369, 390, 280, 358, 165, 433, 427, 278, 373, 240, 439, 261, 358, 410, 322, 376,
    325, 374, 391, 337, 426, 381, 198, 473, 339, 412, 234, 406, 461, 264, 414, 358, 407, 376, 417, 408, 394, 440, 419,
    292, 481, 387, 431, 325, 422, 472, 161, 408, 243, 297, 388, 359, 430, 356, 299, 400, 346, 386, 433, 275, 375, 363,
    375, 455, 348, 394, 349, 355, 386, 341, 370, 385, 290, 344, 262, 403, 422, 321, 348, 250, 404, 306, 403, 401, 213,
    416, 417, 383, 225, 389, 332, 394, 382, 316, 471, 319, 385, 475, 287, 421, 296, 431, 480, 382, 467, 348, 387, 356,
    441, 379, 424, 407, 424, 398, 380, 443, 433, 315, 466, 380, 412, 351, 420, 472, 203, 395, 288, 202, 351, 409, 406,
];

/// SHA-256 over `LOWER_TRIANGLE` as little-endian u16.
const LOWER_TRIANGLE_SHA256: &str = "422ad52127c46cfa42d62d298e361b5e7100c50da166bb0f0bebbc5c14f28299";

/// Four-way partition of the dialects, obtained by cutting the UPGMA tree of
/// the reference matrix below the root and below each of its two children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionGroup {
    EastCenter,
    North,
    SouthWest,
    South,
}

impl fmt::Display for RegionGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionGroup::EastCenter => "east-center",
            RegionGroup::North => "north",
            RegionGroup::SouthWest => "south-west",
            RegionGroup::South => "south",
        })
    }
}

/// (dialect, town, region group) in table order. Group membership is frozen
/// from [`derive_region_groups`]; a test keeps the two in sync.
const DIALECTS: [(&str, &str, RegionGroup); DIALECT_COUNT] = [
    ("Antambohoaka", "Mananjary", RegionGroup::EastCenter),
    ("Antaisaka", "Vangaindrano", RegionGroup::EastCenter),
    ("Antaimoro", "Manakara", RegionGroup::EastCenter),
    ("Zafisoro", "Farafangana", RegionGroup::EastCenter),
    ("Bara", "Betroka", RegionGroup::SouthWest),
    ("Betsileo", "Fianarantsoa", RegionGroup::EastCenter),
    ("Vezo", "Toliara", RegionGroup::SouthWest),
    ("Sihanaka", "Ambatondranzaka", RegionGroup::EastCenter),
    ("Tsimihety", "Mandritsara", RegionGroup::North),
    ("Mahafaly", "Ampanihy", RegionGroup::SouthWest),
    ("Merina", "Antananarivo", RegionGroup::EastCenter),
    ("Sakalava", "Morondava", RegionGroup::SouthWest),
    ("Betsimisaraka", "Fenoarivo-Est", RegionGroup::North),
    ("Antanosy", "Tolagnaro", RegionGroup::SouthWest),
    ("Antandroy", "Ambovombe", RegionGroup::South),
    ("Antankarana", "Vohemar", RegionGroup::North),
    ("Masikoro", "Miary", RegionGroup::SouthWest),
    ("Antankarana", "Antalaha", RegionGroup::North),
    ("Sakalava", "Ambanja", RegionGroup::North),
    ("Sakalava", "Majunga", RegionGroup::EastCenter),
    ("Sakalava", "Maintirano", RegionGroup::SouthWest),
    ("Betsimisaraka", "Mahanoro", RegionGroup::EastCenter),
    ("Antankarana", "Ambilobe", RegionGroup::North),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dialect {
    /// 1-based position in the published table.
    pub index: usize,
    pub name: String,
    pub town: String,
    pub region: RegionGroup,
}

impl Dialect {
    /// Matrix label, e.g. `Merina (Antananarivo)`.
    pub fn label(&self) -> String {
        format!("{} ({})", self.name, self.town)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DialectRegistry {
    entries: Vec<Dialect>,
}

impl DialectRegistry {
    pub fn entries(&self) -> &[Dialect] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn by_index(&self, index: usize) -> Option<&Dialect> {
        index.checked_sub(1).and_then(|i| self.entries.get(i))
    }

    pub fn by_label(&self, label: &str) -> Option<&Dialect> {
        self.entries.iter().find(|d| d.label() == label)
    }

    pub fn by_town(&self, town: &str) -> Option<&Dialect> {
        self.entries.iter().find(|d| d.town == town)
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(Dialect::label).collect()
    }
}

pub fn load_registry() -> DialectRegistry {
    let entries = DIALECTS
        .iter()
        .enumerate()
        .map(|(i, &(name, town, region))| Dialect {
            index: i + 1,
            name: name.to_owned(),
            town: town.to_owned(),
            region,
        })
        .collect();
    DialectRegistry { entries }
}

fn checksum(values: &[u16]) -> String {
    let mut h = Sha256::new();
    for v in values {
        h.update(v.to_le_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// The published table as a [`DistanceMatrix`] labelled by registry order.
pub fn load_reference_matrix() -> Result<DistanceMatrix> {
    let sum = checksum(&LOWER_TRIANGLE);
    if sum != LOWER_TRIANGLE_SHA256 {
        return Err(Error::Fixture(format!(
            "checksum {sum} does not match {LOWER_TRIANGLE_SHA256}"
        )));
    }
    let lower: Vec<f64> = LOWER_TRIANGLE.iter().map(|&k| f64::from(k) / 1000.0).collect();
    DistanceMatrix::from_lower_triangle(load_registry().labels(), &lower)
}

/// Recomputes the four region groups from a matrix labelled like the registry.
///
/// The UPGMA tree is built on separation times. The root child holding
/// Toliara is the south-west branch, and its child holding Ambovombe is the
/// south group. In the other branch, the child holding Antananarivo is the
/// east-center group and the remaining one is the north.
pub fn derive_region_groups(matrix: &DistanceMatrix) -> Result<Vec<RegionGroup>> {
    let registry = load_registry();
    let anchor = |town: &str| -> Result<usize> {
        let label = registry
            .by_town(town)
            .map(Dialect::label)
            .ok_or_else(|| Error::contract(format!("{town} missing from registry")))?;
        matrix
            .index_of(&label)
            .ok_or_else(|| Error::contract(format!("{label:?} missing from matrix")))
    };
    let (toliara, ambovombe, antananarivo) = (anchor("Toliara")?, anchor("Ambovombe")?, anchor("Antananarivo")?);

    let tree = upgma(to_separation_times(matrix, DEFAULT_SCALE)?.matrix())?;
    let split = |tree: &PhyloTree, node: usize| -> Result<[usize; 2]> {
        tree.children(node)
            .ok_or_else(|| Error::contract("tree too small to cut into four groups"))
    };
    let [a, b] = split(&tree, tree.root())?;
    let (south_west, other) = if tree.leaf_indices(a).contains(&toliara) {
        (a, b)
    } else {
        (b, a)
    };

    let mut groups = vec![RegionGroup::North; matrix.len()];
    for child in split(&tree, south_west)? {
        let leaves = tree.leaf_indices(child);
        let g = if leaves.contains(&ambovombe) {
            RegionGroup::South
        } else {
            RegionGroup::SouthWest
        };
        leaves.into_iter().for_each(|i| groups[i] = g);
    }
    for child in split(&tree, other)? {
        let leaves = tree.leaf_indices(child);
        let g = if leaves.contains(&antananarivo) {
            RegionGroup::EastCenter
        } else {
            RegionGroup::North
        };
        leaves.into_iter().for_each(|i| groups[i] = g);
    }
    Ok(groups)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_entries() {
        let m = load_reference_matrix().unwrap();
        assert_eq!(m.len(), 23);
        assert_eq!(m.pair_count(), 253);
        assert_eq!(m.get(0, 1), 0.323);
        assert_eq!(m.get(5, 10), 0.061);
        assert_eq!(m.get(22, 21), 0.406);
        for k in 0..23 {
            assert_eq!(m.get(k, k), 0.0);
        }
    }

    #[test]
    fn entries_within_published_range() {
        let m = load_reference_matrix().unwrap();
        let off: Vec<f64> = (0..23)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j))
            .collect();
        let min = off.iter().copied().fold(f64::INFINITY, f64::min);
        let max = off.iter().copied().fold(0.0, f64::max);
        assert_eq!(min, 0.061);
        assert_eq!(max, 0.487);
    }

    #[test]
    fn checksum_detects_corruption() {
        let mut corrupted = LOWER_TRIANGLE;
        corrupted[100] += 1;
        assert_ne!(checksum(&corrupted), LOWER_TRIANGLE_SHA256);
        assert_eq!(checksum(&LOWER_TRIANGLE), LOWER_TRIANGLE_SHA256);
    }

    #[test]
    fn registry_entries() {
        let r = load_registry();
        assert_eq!(r.len(), 23);
        let merina = r.by_index(11).unwrap();
        assert_eq!((merina.name.as_str(), merina.town.as_str()), ("Merina", "Antananarivo"));
        let antandroy = r.by_index(15).unwrap();
        assert_eq!(
            (antandroy.name.as_str(), antandroy.town.as_str()),
            ("Antandroy", "Ambovombe")
        );
        assert_eq!(r.by_index(1).unwrap().label(), "Antambohoaka (Mananjary)");
        assert_eq!(r.by_index(23).unwrap().label(), "Antankarana (Ambilobe)");
        assert!(r.by_index(0).is_none() && r.by_index(24).is_none());
    }

    #[test]
    fn towns_unique_names_repeat() {
        let r = load_registry();
        let towns: std::collections::HashSet<_> = r.entries().iter().map(|d| d.town.as_str()).collect();
        assert_eq!(towns.len(), 23);
        let count = |name: &str| r.entries().iter().filter(|d| d.name == name).count();
        assert_eq!(count("Antankarana"), 3);
        assert_eq!(count("Sakalava"), 4);
        assert_eq!(count("Betsimisaraka"), 2);
    }

    #[test]
    fn frozen_region_groups_match_tree_cut() {
        let derived = derive_region_groups(&load_reference_matrix().unwrap()).unwrap();
        let frozen: Vec<RegionGroup> = load_registry().entries().iter().map(|d| d.region).collect();
        assert_eq!(derived, frozen);
    }
}
