use crate::error::{Error, Result};

/// Lattice extents `(Lx, Ly, Lz, Lt)`.
pub type Dims = [usize; 4];

pub const NDIM: usize = 4;

/// Periodic 4-D hypercubic geometry with precomputed neighbor tables.
///
/// Sites are numbered with x fastest: `x + Lx (y + Ly (z + Lz t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    dims: Dims,
    volume: usize,
    fwd: Vec<[u32; NDIM]>,
    bwd: Vec<[u32; NDIM]>,
    even: Vec<u32>,
    odd: Vec<u32>,
    checkerboard: bool,
}

impl Geometry {
    pub fn new(dims: Dims) -> Result<Self> {
        if let Some(mu) = dims.iter().position(|&l| l < 2) {
            return Err(Error::Config(format!(
                "lattice extent {} in direction {mu} is below the minimum of 2",
                dims[mu]
            )));
        }
        let volume: usize = dims.iter().product();
        if volume > u32::MAX as usize {
            return Err(Error::Config(format!("lattice volume {volume} too large")));
        }
        let mut fwd = Vec::with_capacity(volume);
        let mut bwd = Vec::with_capacity(volume);
        let mut even = Vec::with_capacity(volume / 2 + 1);
        let mut odd = Vec::with_capacity(volume / 2 + 1);
        for site in 0..volume {
            let c = coords_of(&dims, site);
            let mut f = [0u32; NDIM];
            let mut b = [0u32; NDIM];
            for mu in 0..NDIM {
                let mut up = c;
                up[mu] = (c[mu] + 1) % dims[mu];
                let mut dn = c;
                dn[mu] = (c[mu] + dims[mu] - 1) % dims[mu];
                f[mu] = index_of(&dims, &up) as u32;
                b[mu] = index_of(&dims, &dn) as u32;
            }
            fwd.push(f);
            bwd.push(b);
            if c.iter().sum::<usize>() % 2 == 0 {
                even.push(site as u32);
            } else {
                odd.push(site as u32);
            }
        }
        let checkerboard = dims.iter().all(|l| l % 2 == 0);
        Ok(Self { dims, volume, fwd, bwd, even, odd, checkerboard })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn volume(&self) -> usize {
        self.volume
    }

    pub fn n_links(&self) -> usize {
        self.volume * NDIM
    }

    #[inline]
    pub fn fwd(&self, site: usize, mu: usize) -> usize {
        self.fwd[site][mu] as usize
    }

    #[inline]
    pub fn bwd(&self, site: usize, mu: usize) -> usize {
        self.bwd[site][mu] as usize
    }

    /// Site reached by `steps` forward hops along `mu`.
    pub fn shift(&self, site: usize, mu: usize, steps: usize) -> usize {
        let mut s = site;
        for _ in 0..steps % self.dims[mu] {
            s = self.fwd(s, mu);
        }
        s
    }

    pub fn coords(&self, site: usize) -> [usize; NDIM] {
        coords_of(&self.dims, site)
    }

    pub fn index(&self, c: &[usize; NDIM]) -> usize {
        index_of(&self.dims, c)
    }

    /// Sites of one checkerboard color. Only meaningful when every extent is even.
    pub fn parity_sites(&self, parity: usize) -> &[u32] {
        if parity == 0 {
            &self.even
        } else {
            &self.odd
        }
    }

    /// True when the even/odd decomposition is consistent across the periodic wrap.
    pub fn has_checkerboard(&self) -> bool {
        self.checkerboard
    }

    #[inline]
    pub fn link(&self, site: usize, mu: usize) -> usize {
        site * NDIM + mu
    }

    pub fn min_extent(&self) -> usize {
        *self.dims.iter().min().unwrap()
    }
}

fn coords_of(dims: &Dims, mut site: usize) -> [usize; NDIM] {
    let mut c = [0; NDIM];
    for mu in 0..NDIM {
        c[mu] = site % dims[mu];
        site /= dims[mu];
    }
    c
}

fn index_of(dims: &Dims, c: &[usize; NDIM]) -> usize {
    c[0] + dims[0] * (c[1] + dims[1] * (c[2] + dims[2] * c[3]))
}
