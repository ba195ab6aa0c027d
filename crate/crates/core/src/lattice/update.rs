//! Heatbath and overrelaxation updates for the Wilson plaquette action
//! `S_W = β Σ_p (1 − ½ Re Tr U_p)`.

use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;

use super::field::GaugeField;
use super::geometry::NDIM;
use super::rng::LinkStreams;
use crate::error::{Error, Result};
use crate::su2::{norm4, quat_product, GroupElement};

/// Sum of the six staples around a link, written as `k · V` with `V ∈ SU(2)`.
///
/// The local action of link `U` is `−(β/2) k Re Tr(U V)` up to a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Staple {
    pub k: f64,
    pub v: GroupElement,
}

/// Unnormalized staple sum `W` such that `U · W` summed over the six
/// plaquettes sharing the link.
pub fn staple_sum(field: &GaugeField, site: usize, mu: usize) -> [f64; 4] {
    let g = field.geometry();
    let x_mu = g.fwd(site, mu);
    let mut w = [0.0; 4];
    for nu in 0..NDIM {
        if nu == mu {
            continue;
        }
        let x_nu = g.fwd(site, nu);
        let x_mnu = g.bwd(site, nu);
        let x_mu_mnu = g.bwd(x_mu, nu);

        // U_ν(x+μ) U_μ†(x+ν) U_ν†(x)
        let up = field
            .link(x_mu, nu)
            .multiply(&field.link(x_nu, mu).dagger())
            .multiply(&field.link(site, nu).dagger());
        // U_ν†(x+μ−ν) U_μ†(x−ν) U_ν(x−ν)
        let down = field
            .link(x_mu_mnu, nu)
            .dagger()
            .multiply(&field.link(x_mnu, mu).dagger())
            .multiply(&field.link(x_mnu, nu));
        for i in 0..4 {
            w[i] += up.components()[i] + down.components()[i];
        }
    }
    w
}

pub fn staple(field: &GaugeField, site: usize, mu: usize) -> Staple {
    let w = staple_sum(field, site, mu);
    let k = norm4(&w);
    let v = if k > 0.0 {
        GroupElement::from_components_unchecked([w[0] / k, w[1] / k, w[2] / k, w[3] / k])
    } else {
        GroupElement::IDENTITY
    };
    Staple { k, v }
}

/// Draws `x0 ∈ [-1, 1]` with density `∝ √(1 − x0²) exp(α x0)`.
///
/// Kennedy–Pendleton for `α ≥ 2`, Creutz's inversion method below that.
pub fn sample_a0<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha >= 2.0 {
        loop {
            let r1: f64 = 1.0 - rng.random::<f64>();
            let r2: f64 = rng.random::<f64>();
            let r3: f64 = 1.0 - rng.random::<f64>();
            let c = (2.0 * PI * r2).cos();
            let lambda2 = -(r1.ln() + c * c * r3.ln()) / (2.0 * alpha);
            let r4: f64 = rng.random::<f64>();
            if r4 * r4 <= 1.0 - lambda2 {
                return 1.0 - 2.0 * lambda2;
            }
        }
    } else {
        loop {
            let u: f64 = rng.random::<f64>();
            let x0 = if alpha < 1e-8 {
                2.0 * u - 1.0
            } else {
                // inverse CDF of exp(α x) on [-1, 1]
                let lo = (-2.0 * alpha).exp();
                (1.0 + (lo + u * (1.0 - lo)).ln() / alpha).clamp(-1.0, 1.0)
            };
            let accept: f64 = rng.random::<f64>();
            if accept <= (1.0 - x0 * x0).max(0.0).sqrt() {
                return x0;
            }
        }
    }
}

/// Draws `X ∈ SU(2)` with density `∝ exp(α a0(X))` relative to Haar measure.
pub fn sample_heatbath_element<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> GroupElement {
    let x0 = sample_a0(alpha, rng);
    let r = (1.0 - x0 * x0).max(0.0).sqrt();
    let cos_t: f64 = 2.0 * rng.random::<f64>() - 1.0;
    let phi: f64 = 2.0 * PI * rng.random::<f64>();
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    GroupElement::new(x0, r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t)
}

fn heatbath_link<R: Rng + ?Sized>(field: &GaugeField, site: usize, mu: usize, beta: f64, rng: &mut R) -> GroupElement {
    let st = staple(field, site, mu);
    if st.k < 1e-12 {
        return GroupElement::haar_random(rng);
    }
    let x = sample_heatbath_element(beta * st.k, rng);
    x.multiply(&st.v.dagger())
}

fn overrelax_link(field: &GaugeField, site: usize, mu: usize) -> GroupElement {
    let st = staple(field, site, mu);
    if st.k < 1e-12 {
        return field.link(site, mu);
    }
    reflect(&field.link(site, mu), &st.v)
}

/// Microcanonical reflection `U → V† U† V†`, which leaves `Re Tr(U V)` fixed.
pub fn reflect(u: &GroupElement, v: &GroupElement) -> GroupElement {
    let vd = v.dagger();
    vd.multiply(&u.dagger()).multiply(&vd)
}

/// Visits every link once. On lattices with all extents even the links of one
/// direction and one checkerboard color are updated together, in parallel;
/// otherwise links are updated one by one in storage order.
fn sweep_with<F>(field: &mut GaugeField, update: F)
where
    F: Fn(&GaugeField, usize, usize) -> GroupElement + Sync,
{
    let geom = field.geometry_arc().clone();
    if geom.has_checkerboard() {
        for mu in 0..NDIM {
            for parity in 0..2 {
                let sites = geom.parity_sites(parity);
                let new: Vec<GroupElement> = {
                    let f: &GaugeField = field;
                    sites.par_iter().map(|&s| update(f, s as usize, mu)).collect()
                };
                for (&s, u) in sites.iter().zip(new) {
                    field.set_link(s as usize, mu, u);
                }
            }
        }
    } else {
        for site in 0..geom.volume() {
            for mu in 0..NDIM {
                let u = update(field, site, mu);
                field.set_link(site, mu, u);
            }
        }
    }
}

/// One heatbath sweep. `epoch` selects the random streams and must differ
/// between sweeps of the same run.
pub fn heatbath_sweep(field: &mut GaugeField, beta: f64, streams: &LinkStreams, epoch: u64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::Config(format!("beta must be finite and non-negative, got {beta}")));
    }
    let geom = field.geometry_arc().clone();
    sweep_with(field, |f, site, mu| {
        let mut rng = streams.stream(epoch, geom.link(site, mu));
        heatbath_link(f, site, mu, beta, &mut rng)
    });
    Ok(())
}

pub fn overrelax_sweep(field: &mut GaugeField) {
    sweep_with(field, overrelax_link);
}

/// Per-plaquette values `½ Re Tr U_p` for the six planes at every site,
/// laid out `site * 6 + plane`.
pub(crate) fn plaquette_values(field: &GaugeField) -> Vec<f64> {
    let g = field.geometry();
    (0..g.volume())
        .into_par_iter()
        .flat_map_iter(|site| {
            let mut out = [0.0; 6];
            let mut p = 0;
            for mu in 0..NDIM {
                for nu in (mu + 1)..NDIM {
                    out[p] = 0.5 * plaquette(field, site, mu, nu).re_trace();
                    p += 1;
                }
            }
            out
        })
        .collect()
}

/// `U_μ(x) U_ν(x+μ) U_μ†(x+ν) U_ν†(x)`.
pub fn plaquette(field: &GaugeField, site: usize, mu: usize, nu: usize) -> GroupElement {
    let g = field.geometry();
    let a = quat_product(&field.link(site, mu).components(), &field.link(g.fwd(site, mu), nu).components());
    let b = quat_product(
        &field.link(g.fwd(site, nu), mu).dagger().components(),
        &field.link(site, nu).dagger().components(),
    );
    GroupElement::from_unnormalized(quat_product(&a, &b))
}

/// Wilson plaquette action `β Σ_p (1 − ½ Re Tr U_p)`.
pub fn wilson_action(field: &GaugeField, beta: f64) -> f64 {
    let v = plaquette_values(field);
    beta * v.iter().map(|p| 1.0 - p).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::observables::average_plaquette;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn direct_staple(field: &GaugeField, site: usize, mu: usize) -> [f64; 4] {
        // independent route: sum U_μ(x)† · (plaquette through the link) over the six
        // plaquettes, each built from explicit coordinates
        let g = field.geometry();
        let c = g.coords(site);
        let hop = |c: [usize; 4], d: usize, s: isize| {
            let mut r = c;
            let l = g.dims()[d] as isize;
            r[d] = ((c[d] as isize + s).rem_euclid(l)) as usize;
            r
        };
        let at = |c: [usize; 4], d: usize| field.link(g.index(&c), d);
        let mut w = [0.0; 4];
        for nu in (0..4).filter(|&n| n != mu) {
            let p_up = at(c, mu) * at(hop(c, mu, 1), nu) * at(hop(c, nu, 1), mu).dagger() * at(c, nu).dagger();
            let xm = hop(c, nu, -1);
            let p_dn = at(c, mu) * at(hop(xm, mu, 1), nu).dagger() * at(xm, mu).dagger() * at(xm, nu);
            for p in [p_up, p_dn] {
                let s = at(c, mu).dagger() * p;
                for i in 0..4 {
                    w[i] += s.components()[i];
                }
            }
        }
        w
    }

    #[test]
    fn cold_staple() {
        let f = GaugeField::cold_start([4, 4, 4, 4]).unwrap();
        let st = staple(&f, 5, 2);
        assert!((st.k - 6.0).abs() < 1e-15);
        assert_eq!(st.v, GroupElement::IDENTITY);
    }

    #[test]
    fn flipped_link_staple_by_hand() {
        // Flip U_1(x) on a cold lattice. For the link U_2(x) only the forward
        // ν = 1 staple contains it, as the factor U_1†(x); the sum is
        // 5·1 + F†, so k = |(5 + f0, −f)| = √(26 + 10 f0).
        let mut f = GaugeField::cold_start([4, 4, 4, 4]).unwrap();
        let flipped = GroupElement::new(0.3, 0.5, -0.2, 0.7);
        let site = f.geometry().index(&[1, 1, 0, 3]);
        f.set_link(site, 1, flipped);
        let st = staple(&f, site, 2);
        assert!((st.k - (26.0 + 10.0 * flipped.a0).sqrt()).abs() < 1e-12);
        let d = direct_staple(&f, site, 2);
        let w = staple_sum(&f, site, 2);
        for i in 0..4 {
            assert!((w[i] - d[i]).abs() < 1e-12);
        }
        assert!((w[0] - (5.0 + flipped.a0)).abs() < 1e-12);
        assert!((w[1] + flipped.a1).abs() < 1e-12);
    }

    #[test]
    fn random_staples_match_direct_products() {
        let f = GaugeField::hot_start([4, 4, 2, 4], 77).unwrap();
        for site in [0usize, 7, 31, 100] {
            for mu in 0..4 {
                let w = staple_sum(&f, site, mu);
                let d = direct_staple(&f, site, mu);
                for i in 0..4 {
                    assert!((w[i] - d[i]).abs() < 1e-12);
                }
                assert!(staple(&f, site, mu).k >= 0.0);
            }
        }
    }

    #[test]
    fn a0_sampler_matches_moments() {
        // E[x0] for density √(1−x²) e^{αx} is I_2(α)/I_1(α); evaluated here by
        // midpoint quadrature.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &alpha in &[0.0, 0.7, 1.9, 2.1, 6.0, 25.0] {
            let n = 200_000;
            let mean = (0..n).map(|_| sample_a0(alpha, &mut rng)).sum::<f64>() / n as f64;
            let m = 20_000;
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..m {
                let x = -1.0 + (i as f64 + 0.5) * 2.0 / m as f64;
                let w = (1.0 - x * x).sqrt() * (alpha * (x - 1.0)).exp();
                num += x * w;
                den += w;
            }
            let exact = num / den;
            assert!((mean - exact).abs() < 5e-3, "alpha {alpha}: {mean} vs {exact}");
        }
    }

    #[test]
    fn overrelaxation_preserves_action() {
        let mut f = GaugeField::hot_start([4, 4, 4, 4], 3).unwrap();
        let streams = LinkStreams::new(3);
        for e in 0..3 {
            heatbath_sweep(&mut f, 2.0, &streams, e).unwrap();
        }
        for _ in 0..3 {
            let before = wilson_action(&f, 2.0);
            overrelax_sweep(&mut f);
            let after = wilson_action(&f, 2.0);
            assert!(((after - before) / before).abs() < 1e-8, "{before} -> {after}");
        }
    }

    #[test]
    fn overrelaxation_fixed_point_and_involution() {
        let mut f = GaugeField::cold_start([4, 4, 4, 4]).unwrap();
        overrelax_sweep(&mut f);
        assert_eq!(average_plaquette(&f), 1.0);

        let h = GaugeField::hot_start([4, 4, 4, 4], 4).unwrap();
        let st = staple(&h, 9, 1);
        let u = h.link(9, 1);
        let twice = reflect(&reflect(&u, &st.v), &st.v);
        for (a, b) in twice.components().iter().zip(u.components()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn strong_coupling_zero_beta_is_haar() {
        let mut f = GaugeField::cold_start([4, 4, 4, 4]).unwrap();
        let streams = LinkStreams::new(21);
        for e in 0..50 {
            heatbath_sweep(&mut f, 0.0, &streams, e).unwrap();
        }
        assert!(average_plaquette(&f).abs() < 0.02);
    }

    #[test]
    fn weak_coupling_stays_ordered() {
        let mut f = GaugeField::cold_start([4, 4, 4, 4]).unwrap();
        let streams = LinkStreams::new(22);
        for e in 0..20 {
            heatbath_sweep(&mut f, 10.0, &streams, e).unwrap();
        }
        let p = average_plaquette(&f);
        assert!(p > 0.9, "plaquette {p}");
        assert!(f.max_norm_error() < 1e-10);
    }

    #[test]
    fn odd_extent_sequential_path() {
        let mut f = GaugeField::cold_start([3, 4, 4, 4]).unwrap();
        let streams = LinkStreams::new(1);
        heatbath_sweep(&mut f, 1.0, &streams, 0).unwrap();
        let before = wilson_action(&f, 1.0);
        overrelax_sweep(&mut f);
        assert!(((wilson_action(&f, 1.0) - before) / before).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_beta() {
        let mut f = GaugeField::cold_start([2, 2, 2, 2]).unwrap();
        let streams = LinkStreams::new(1);
        assert!(heatbath_sweep(&mut f, f64::NAN, &streams, 0).is_err());
        assert!(heatbath_sweep(&mut f, f64::INFINITY, &streams, 0).is_err());
    }
}
