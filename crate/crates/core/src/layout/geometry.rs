//! Key geometry and hit testing.
//!
//! Tap coordinates are keyboard-normalized: `x` and `y` in `[0, 1]`. For
//! distances both axes are measured in keyboard widths, so `y` is scaled by
//! the page height (rows × row height).

use serde::{Deserialize, Serialize};

use super::{KeyStates, Layout, Page};
use crate::error::LayoutError;

/// Distances closer than this are treated as equal for tie-breaking.
const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyGeometry {
    pub key_id: String,
    /// Index into `Page::keys`.
    pub index: usize,
    pub row: u32,
    /// Left edge and centre, in keyboard widths.
    pub left: f64,
    pub center_x: f64,
    pub center_y: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageGeometry {
    pub keys: Vec<KeyGeometry>,
    pub rows: u32,
    pub row_height: f64,
}

impl PageGeometry {
    pub fn new(page: &Page, row_height: f64) -> Result<Self, LayoutError> {
        let rows = page.keys.iter().map(|k| k.row + 1).max().unwrap_or(0);
        let mut keys = Vec::with_capacity(page.keys.len());
        for row in 0..rows {
            let mut in_row: Vec<(usize, &super::Key)> =
                page.keys.iter().enumerate().filter(|(_, k)| k.row == row).collect();
            in_row.sort_by_key(|(_, k)| k.col);
            if let Some(w) = in_row.windows(2).find(|w| w[0].1.col == w[1].1.col) {
                return Err(LayoutError::Geometry {
                    element: format!("key {}", w[1].1.key_id),
                    reason: format!("shares row {row} column {} with {}", w[0].1.col, w[0].1.key_id),
                });
            }
            let total: f64 = in_row.iter().map(|(_, k)| k.width).sum();
            if total > 1.0 + 1e-9 {
                return Err(LayoutError::Geometry {
                    element: format!("row {row}"),
                    reason: format!("key widths sum to {total:.4} > 1"),
                });
            }
            let mut left = ((1.0 - total) / 2.0).max(0.0);
            for (index, key) in in_row {
                keys.push(KeyGeometry {
                    key_id: key.key_id.clone(),
                    index,
                    row,
                    left,
                    center_x: left + key.width / 2.0,
                    center_y: (row as f64 + 0.5) * row_height,
                    width: key.width,
                });
                left += key.width;
            }
        }
        keys.sort_by_key(|k| k.index);
        Ok(Self {
            keys,
            rows,
            row_height,
        })
    }

    /// Page height in keyboard widths.
    pub fn height(&self) -> f64 {
        self.rows as f64 * self.row_height
    }

    pub fn to_physical(&self, x: f64, y: f64) -> (f64, f64) {
        (x, y * self.height())
    }

    pub fn to_normalized(&self, px: f64, py: f64) -> (f64, f64) {
        let h = self.height();
        (px, if h > 0.0 { py / h } else { 0.0 })
    }

    /// Normalized coordinates of a key centre.
    pub fn center_normalized(&self, index: usize) -> (f64, f64) {
        let k = &self.keys[index];
        self.to_normalized(k.center_x, k.center_y)
    }

    pub fn squared_distance(&self, index: usize, x: f64, y: f64) -> f64 {
        let (px, py) = self.to_physical(x, y);
        let k = &self.keys[index];
        (px - k.center_x).powi(2) + (py - k.center_y).powi(2)
    }

    /// Nearest key accepted by `active`; ties go to the lower key id.
    pub fn nearest(&self, x: f64, y: f64, active: impl Fn(usize) -> bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, key) in self.keys.iter().enumerate() {
            if !active(i) {
                continue;
            }
            let d = self.squared_distance(i, x, y);
            best = match best {
                None => Some((i, d)),
                Some((j, bd)) => {
                    let closer = d < bd - TIE_EPSILON;
                    let tied = (d - bd).abs() <= TIE_EPSILON;
                    if closer || (tied && key.key_id < self.keys[j].key_id) {
                        Some((i, d))
                    } else {
                        Some((j, bd))
                    }
                }
            };
        }
        best
    }

    /// Narrowest key width on the page, used as the unit for touch noise.
    pub fn unit_width(&self, active: impl Fn(usize) -> bool) -> f64 {
        self.keys
            .iter()
            .enumerate()
            .filter(|(i, _)| active(*i))
            .map(|(_, k)| k.width)
            .fold(f64::INFINITY, f64::min)
    }
}

impl Layout {
    /// Nearest non-blank key to a tap, with its squared distance in
    /// keyboard widths.
    pub fn hit_test(&self, page: usize, x: f64, y: f64) -> Result<(String, f64), LayoutError> {
        let keys = &self.page(page)?.keys;
        let geom = self.geometry(page)?;
        geom.nearest(x, y, |i| !keys[i].is_blank())
            .map(|(i, d)| (geom.keys[i].key_id.clone(), d))
            .ok_or(LayoutError::NoActiveKeys(page))
    }

    /// Like [`Layout::hit_test`] but using dynamic key state, so blank keys
    /// activated by a rule can be hit.
    pub fn hit_test_state(
        &self,
        page: usize,
        x: f64,
        y: f64,
        states: &KeyStates,
    ) -> Result<(String, f64), LayoutError> {
        let geom = self.geometry(page)?;
        let views = states.pages.get(page).ok_or(LayoutError::UnknownPage(page))?;
        geom.nearest(x, y, |i| views[i].is_active())
            .map(|(i, d)| (geom.keys[i].key_id.clone(), d))
            .ok_or(LayoutError::NoActiveKeys(page))
    }
}
