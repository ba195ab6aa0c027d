//! Gauge-invariant observables.

use rayon::prelude::*;

use super::field::GaugeField;
use super::geometry::{Geometry, NDIM};
use super::update::plaquette_values;
use crate::error::{Error, Result};
use crate::su2::GroupElement;

/// Mean of `½ Re Tr U_p` over all `6 V` plaquettes.
pub fn average_plaquette(field: &GaugeField) -> f64 {
    let v = plaquette_values(field);
    v.iter().sum::<f64>() / v.len() as f64
}

pub(crate) fn check_loop_extent(geom: &Geometry, r: usize, t: usize) -> Result<()> {
    let max = geom.min_extent() / 2;
    if r < 1 || t < 1 || r > max || t > max {
        return Err(Error::Range(format!(
            "{r}x{t} loop outside 1..={max} for lattice {:?}",
            geom.dims()
        )));
    }
    Ok(())
}

/// Ordered products of `len` consecutive links along `mu` starting at every site.
fn line_products(field: &GaugeField, mu: usize, len: usize) -> Vec<GroupElement> {
    let g = field.geometry();
    (0..g.volume())
        .into_par_iter()
        .map(|site| {
            let mut s = site;
            let mut p = GroupElement::IDENTITY;
            for _ in 0..len {
                p = p.multiply(&field.link(s, mu));
                s = g.fwd(s, mu);
            }
            p
        })
        .collect()
}

/// `½ Re Tr` of the `R×T` loop, averaged over all translations, all six
/// planes and both assignments of `(R, T)` to the plane's two axes.
pub fn wilson_loop(field: &GaugeField, r: usize, t: usize) -> Result<f64> {
    check_loop_extent(field.geometry(), r, t)?;
    let mut cache = LineCache::new(field);
    Ok(loop_average(field, &mut cache, r, t))
}

/// `W(R, T)` for `1 ≤ R, T ≤ max_extent`, indexed `[R-1][T-1]`.
pub fn wilson_loop_table(field: &GaugeField, max_extent: usize) -> Result<Vec<Vec<f64>>> {
    check_loop_extent(field.geometry(), max_extent, max_extent)?;
    let mut cache = LineCache::new(field);
    let mut out = vec![vec![0.0; max_extent]; max_extent];
    for r in 1..=max_extent {
        for t in 1..=max_extent {
            out[r - 1][t - 1] = if t < r { out[t - 1][r - 1] } else { loop_average(field, &mut cache, r, t) };
        }
    }
    Ok(out)
}

struct LineCache<'a> {
    field: &'a GaugeField,
    lines: std::collections::HashMap<(usize, usize), Vec<GroupElement>>,
}

impl<'a> LineCache<'a> {
    fn new(field: &'a GaugeField) -> Self {
        Self { field, lines: Default::default() }
    }

    fn get(&mut self, mu: usize, len: usize) -> &Vec<GroupElement> {
        let field = self.field;
        self.lines.entry((mu, len)).or_insert_with(|| line_products(field, mu, len))
    }
}

fn loop_average(field: &GaugeField, cache: &mut LineCache<'_>, r: usize, t: usize) -> f64 {
    let g = field.geometry();
    let mut total = 0.0;
    let mut count = 0usize;
    for mu in 0..NDIM {
        for nu in 0..NDIM {
            if mu == nu || (r == t && nu < mu) {
                continue;
            }
            // R along μ, T along ν. For R = T the two assignments are the same
            // loop set traversed in reverse, which has the same trace.
            let lr = cache.get(mu, r).clone();
            let lt = cache.get(nu, t).clone();
            let vals: Vec<f64> = (0..g.volume())
                .into_par_iter()
                .map(|x| {
                    let x_r = g.shift(x, mu, r);
                    let x_t = g.shift(x, nu, t);
                    let w = lr[x].multiply(&lt[x_r]).multiply(&lr[x_t].dagger()).multiply(&lt[x].dagger());
                    0.5 * w.re_trace()
                })
                .collect();
            let weight = if r == t { 2 } else { 1 };
            total += weight as f64 * vals.iter().sum::<f64>();
            count += weight * vals.len();
        }
    }
    total / count as f64
}
