use std::collections::HashMap;

use super::{DecodeConfig, TapEvent, TapKind};
use crate::error::{DecodeError, LayoutError};
use crate::layout::{Layout, PageGeometry};

/// Log-Gaussian touch model over the keys of a layout.
///
/// Every key with a base output emits it; blank keys emit the outputs of
/// the dynamic rules that can activate them; long-press entries are
/// emitted by their host key at an extra cost.
#[derive(Debug, Clone)]
pub struct SpatialModel {
    pages: Vec<PageModel>,
    long_press_penalty: f64,
}

#[derive(Debug, Clone)]
struct PageModel {
    geometry: PageGeometry,
    sigma: f64,
    /// Per key: emitted units and their extra cost.
    units: Vec<Vec<(String, f64)>>,
    /// Per key: long-press entries for selection events.
    long_press: Vec<Vec<String>>,
    /// Keys that take part in hit testing.
    active: Vec<bool>,
}

/// What one tap may have typed.
#[derive(Debug, Clone, PartialEq)]
pub struct Emission {
    /// Unit → best log10 score over the keys emitting it.
    pub units: HashMap<String, f64>,
    /// Output of the nearest active key.
    pub nearest: String,
    pub nearest_score: f64,
}

impl SpatialModel {
    pub fn new(layout: &Layout, config: &DecodeConfig) -> Result<Self, LayoutError> {
        let mut pages = Vec::with_capacity(layout.pages.len());
        for (p, page) in layout.pages.iter().enumerate() {
            let geometry = layout.geometry(p)?;
            let mut units = Vec::with_capacity(page.keys.len());
            let mut active = Vec::with_capacity(page.keys.len());
            let mut long_press = Vec::with_capacity(page.keys.len());
            for key in &page.keys {
                let mut u: Vec<(String, f64)> = Vec::new();
                if !key.is_blank() && key.switch_to_page.is_none() && !key.base_output.is_empty() {
                    u.push((key.base_output.clone(), 0.0));
                }
                for rule in layout.dynamic_rules.iter().filter(|r| r.target_key_id == key.key_id) {
                    if !u.iter().any(|(o, _)| *o == rule.new_output) {
                        u.push((rule.new_output.clone(), 0.0));
                    }
                }
                for lp in &key.long_press {
                    if !u.iter().any(|(o, _)| o == lp) {
                        u.push((lp.clone(), config.long_press_penalty));
                    }
                }
                active.push(u.iter().any(|(_, c)| *c == 0.0));
                long_press.push(key.long_press.clone());
                units.push(u);
            }
            let width = geometry.unit_width(|i| active[i]);
            let sigma = config.sigma_factor * if width.is_finite() { width } else { 0.1 };
            pages.push(PageModel {
                geometry,
                sigma,
                units,
                long_press,
                active,
            });
        }
        Ok(Self {
            pages,
            long_press_penalty: config.long_press_penalty,
        })
    }

    /// Standard deviation of touch noise on a page, in keyboard widths.
    pub fn sigma(&self, page: usize) -> f64 {
        self.pages[page].sigma
    }

    /// log10 of the unnormalized Gaussian at squared distance `d2`.
    pub fn log_score(&self, page: usize, d2: f64) -> f64 {
        let s = self.pages[page].sigma;
        -d2 / (2.0 * s * s) * std::f64::consts::LOG10_E
    }

    pub fn emission(&self, tap: &TapEvent) -> Result<Emission, DecodeError> {
        let page = self
            .pages
            .get(tap.page)
            .ok_or(LayoutError::UnknownPage(tap.page))?;
        let (nearest_key, d2) = page
            .geometry
            .nearest(tap.x, tap.y, |i| page.active[i])
            .ok_or(LayoutError::NoActiveKeys(tap.page))?;
        if let TapKind::LongPressSelect(index) = tap.kind {
            let chosen = page.long_press[nearest_key]
                .get(index)
                .cloned()
                .ok_or(DecodeError::Layout(LayoutError::Schema(format!(
                    "key {} has no long-press entry {index}",
                    page.geometry.keys[nearest_key].key_id
                ))))?;
            return Ok(Emission {
                units: HashMap::from([(chosen.clone(), 0.0)]),
                nearest: chosen,
                nearest_score: 0.0,
            });
        }
        let mut units: HashMap<String, f64> = HashMap::new();
        for (i, key_units) in page.units.iter().enumerate() {
            if key_units.is_empty() {
                continue;
            }
            let s = self.log_score(tap.page, page.geometry.squared_distance(i, tap.x, tap.y));
            for (u, extra) in key_units {
                let v = s + extra;
                let slot = units.entry(u.clone()).or_insert(f64::NEG_INFINITY);
                if v > *slot {
                    *slot = v;
                }
            }
        }
        let nearest = page.units[nearest_key]
            .iter()
            .find(|(_, c)| *c == 0.0)
            .map(|(u, _)| u.clone())
            .unwrap_or_default();
        Ok(Emission {
            units,
            nearest,
            nearest_score: self.log_score(tap.page, d2),
        })
    }

    pub fn long_press_penalty(&self) -> f64 {
        self.long_press_penalty
    }

    /// Normalized centre of the first key on `page` whose output is `unit`.
    pub fn center_of(&self, page: usize, unit: &str) -> Option<(f64, f64)> {
        let p = self.pages.get(page)?;
        let i = p
            .units
            .iter()
            .position(|u| u.first().is_some_and(|(o, c)| o == unit && *c == 0.0))?;
        Some(p.geometry.center_normalized(i))
    }
}
