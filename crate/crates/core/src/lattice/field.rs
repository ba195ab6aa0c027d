use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use super::geometry::{Dims, Geometry, NDIM};
use super::rng::{LinkStreams, HOT_START_EPOCH};
use crate::error::{Error, Result};
use crate::su2::GroupElement;

/// SU(2) link variables on a periodic 4-D lattice, indexed `site * 4 + mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    geom: Arc<Geometry>,
    links: Vec<GroupElement>,
}

impl GaugeField {
    /// All links set to the identity.
    pub fn cold_start(dims: Dims) -> Result<Self> {
        let geom = Arc::new(Geometry::new(dims)?);
        let links = vec![GroupElement::IDENTITY; geom.n_links()];
        Ok(Self { geom, links })
    }

    /// Independent Haar-random links, reproducible for a fixed seed.
    pub fn hot_start(dims: Dims, seed: u64) -> Result<Self> {
        let geom = Arc::new(Geometry::new(dims)?);
        let streams = LinkStreams::new(seed);
        let links = (0..geom.n_links())
            .into_par_iter()
            .map(|l| GroupElement::haar_random(&mut streams.stream(HOT_START_EPOCH, l)))
            .collect();
        Ok(Self { geom, links })
    }

    /// Wraps an existing link array. Links are renormalized.
    pub fn from_links(dims: Dims, links: Vec<GroupElement>) -> Result<Self> {
        let geom = Arc::new(Geometry::new(dims)?);
        if links.len() != geom.n_links() {
            return Err(Error::Config(format!(
                "expected {} links for dims {:?}, got {}",
                geom.n_links(),
                dims,
                links.len()
            )));
        }
        let links = links.into_iter().map(|g| g.normalize()).collect();
        Ok(Self { geom, links })
    }

    pub(crate) fn from_links_exact(dims: Dims, links: Vec<GroupElement>) -> Result<Self> {
        let geom = Arc::new(Geometry::new(dims)?);
        if links.len() != geom.n_links() {
            return Err(Error::Config(format!("expected {} links, got {}", geom.n_links(), links.len())));
        }
        Ok(Self { geom, links })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geom
    }

    pub(crate) fn geometry_arc(&self) -> &Arc<Geometry> {
        &self.geom
    }

    pub fn dims(&self) -> Dims {
        self.geom.dims()
    }

    pub fn volume(&self) -> usize {
        self.geom.volume()
    }

    #[inline]
    pub fn link(&self, site: usize, mu: usize) -> GroupElement {
        self.links[site * NDIM + mu]
    }

    #[inline]
    pub fn set_link(&mut self, site: usize, mu: usize, u: GroupElement) {
        self.links[site * NDIM + mu] = u;
    }

    pub fn links(&self) -> &[GroupElement] {
        &self.links
    }


    /// Largest deviation of any link from unit norm.
    pub fn max_norm_error(&self) -> f64 {
        self.links.iter().map(|g| (g.norm_sqr().sqrt() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Applies `U_μ(x) → g(x) U_μ(x) g†(x+μ̂)` for the given site transforms.
    pub fn gauge_transform(&mut self, g: &[GroupElement]) {
        assert_eq!(g.len(), self.volume(), "one transform per site");
        let geom = Arc::clone(&self.geom);
        self.links.par_chunks_mut(NDIM).enumerate().for_each(|(site, chunk)| {
            for (mu, u) in chunk.iter_mut().enumerate() {
                let up = geom.fwd(site, mu);
                *u = g[site].multiply(u).multiply(&g[up].dagger());
            }
        });
    }

    /// Gauge transform with Haar-random site rotations.
    pub fn random_gauge_transform<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<GroupElement> {
        let g: Vec<GroupElement> =
            (0..self.volume()).map(|_| GroupElement::haar_random(rng)).collect();
        self.gauge_transform(&g);
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cold_lattice_counts() {
        let f = GaugeField::cold_start([2, 2, 2, 2]).unwrap();
        assert_eq!(f.links().len(), 64);
        assert!(f.links().iter().all(|g| *g == GroupElement::IDENTITY));
    }

    #[test]
    fn hot_start_is_seeded() {
        let a = GaugeField::hot_start([4, 4, 4, 4], 1).unwrap();
        let b = GaugeField::hot_start([4, 4, 4, 4], 1).unwrap();
        let c = GaugeField::hot_start([4, 4, 4, 4], 2).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.max_norm_error() < 1e-10);
    }

    #[test]
    fn invalid_dims() {
        assert!(GaugeField::cold_start([4, 4, 4, 1]).is_err());
        assert!(GaugeField::hot_start([0, 4, 4, 4], 1).is_err());
        assert!(GaugeField::from_links([2, 2, 2, 2], vec![GroupElement::IDENTITY; 3]).is_err());
    }

    #[test]
    fn identity_transform_is_noop() {
        let mut f = GaugeField::hot_start([4, 4, 4, 4], 8).unwrap();
        let orig = f.clone();
        f.gauge_transform(&vec![GroupElement::IDENTITY; f.volume()]);
        for (a, b) in f.links().iter().zip(orig.links()) {
            for (x, y) in a.components().iter().zip(b.components()) {
                assert!((x - y).abs() < 1e-15);
            }
        }
    }
}
