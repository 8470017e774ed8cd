//! Maps from swarm coordinates in the open cube `(-1,1)^D` to per-profile
//! `(direction, offset)` tuples in `R^{d+1}`.
//!
//! A map assigns each of the `d+1` output slots either a fixed value or a
//! warped particle component. The smooth tangent warp covers all of `R`;
//! the affine warp expresses bounded search ranges.

use crate::error::{Error, Result};

/// Scalar 1-d warp applied to a particle component in `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Warp {
    /// `s -> tan(pi/2 s)`, a bijection `(-1,1) -> R`.
    Tan,
    /// Affine `(-1,1) -> (lo,hi)`.
    Affine { lo: f64, hi: f64 },
}

impl Warp {
    pub fn apply(&self, s: f64) -> f64 {
        match self {
            Warp::Tan => (std::f64::consts::FRAC_PI_2 * s).tan(),
            Warp::Affine { lo, hi } => lo + 0.5 * (s + 1.0) * (hi - lo),
        }
    }

    pub fn invert(&self, x: f64) -> f64 {
        match self {
            Warp::Tan => std::f64::consts::FRAC_2_PI * x.atan(),
            Warp::Affine { lo, hi } => 2.0 * (x - lo) / (hi - lo) - 1.0,
        }
    }
}

/// One output slot of a [`ParticleMap`].
#[derive(Debug, Clone, PartialEq)]
pub enum Slot {
    Fixed(f64),
    Free { component: usize, warp: Warp },
}

/// Deterministic map `(-1,1)^D -> R^{d+1}`; the first `d` outputs form the
/// ridge direction, the last is the offset.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleMap {
    input_dim: usize,
    slots: Vec<Slot>,
}

impl ParticleMap {
    /// Builds a template map and validates it: every particle component
    /// must be referenced at least once, `D <= d+1`, and at least one slot
    /// must be free.
    pub fn new(slots: Vec<Slot>) -> Result<Self> {
        if slots.len() < 2 {
            return Err(Error::Config("a map needs d >= 1, i.e. at least 2 slots".into()));
        }
        let mut max_comp = None;
        for slot in &slots {
            match slot {
                Slot::Fixed(v) if !v.is_finite() => {
                    return Err(Error::Config("fixed slot value must be finite".into()))
                }
                Slot::Free { component, warp } => {
                    if let Warp::Affine { lo, hi } = warp {
                        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                            return Err(Error::Config(format!(
                                "affine warp needs lo < hi, got [{lo}, {hi}]"
                            )));
                        }
                    }
                    max_comp = Some(max_comp.map_or(*component, |m: usize| m.max(*component)));
                }
                _ => {}
            }
        }
        let input_dim = match max_comp {
            None => {
                return Err(Error::Config(
                    "all slots are fixed; the map would ignore its particle".into(),
                ))
            }
            Some(m) => m + 1,
        };
        let mut referenced = vec![false; input_dim];
        for slot in &slots {
            if let Slot::Free { component, .. } = slot {
                referenced[*component] = true;
            }
        }
        if let Some(c) = referenced.iter().position(|r| !r) {
            return Err(Error::Config(format!("particle component {c} is never referenced")));
        }
        if input_dim > slots.len() {
            return Err(Error::Config(format!(
                "particle dimension {input_dim} exceeds d+1 = {}",
                slots.len()
            )));
        }
        Ok(Self { input_dim, slots })
    }

    /// The smooth all-components map for `D = d+1`: every slot is
    /// `tan(pi/2 s)` of its own component.
    pub fn full_tan(space_dim: usize) -> Self {
        let slots = (0..=space_dim)
            .map(|c| Slot::Free { component: c, warp: Warp::Tan })
            .collect();
        Self { input_dim: space_dim + 1, slots }
    }

    /// Particle dimension `D` of this map.
    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Spatial dimension `d` of the produced direction.
    pub fn space_dim(&self) -> usize {
        self.slots.len() - 1
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    fn check_particle(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.input_dim {
            return Err(Error::Usage(format!(
                "particle has {} components, map expects {}",
                p.len(),
                self.input_dim
            )));
        }
        for &s in p {
            if !(s.abs() < 1.0) {
                return Err(Error::Domain(format!("component {s} is not strictly inside (-1,1)")));
            }
        }
        Ok(())
    }

    /// Maps a particle block to `(direction, offset)`, writing the
    /// direction into `a`.
    pub fn map_into(&self, p: &[f64], a: &mut [f64]) -> Result<f64> {
        self.check_particle(p)?;
        debug_assert_eq!(a.len(), self.space_dim());
        let eval = |slot: &Slot| match slot {
            Slot::Fixed(v) => *v,
            Slot::Free { component, warp } => warp.apply(p[*component]),
        };
        for (i, out) in a.iter_mut().enumerate() {
            *out = eval(&self.slots[i]);
        }
        Ok(eval(&self.slots[self.space_dim()]))
    }

    /// Maps a particle block to `(direction, offset)`.
    pub fn map(&self, p: &[f64]) -> Result<(Vec<f64>, f64)> {
        let mut a = vec![0.0; self.space_dim()];
        let b = self.map_into(p, &mut a)?;
        Ok((a, b))
    }

    /// Inverts the map where possible: recovers the particle from a
    /// `(direction, offset)` tuple by inverting each free slot's warp.
    /// Returns `None` if a recovered component falls outside `(-1,1)`.
    pub fn unmap(&self, a: &[f64], b: f64) -> Option<Vec<f64>> {
        if a.len() != self.space_dim() {
            return None;
        }
        let mut p = vec![f64::NAN; self.input_dim];
        for (i, slot) in self.slots.iter().enumerate() {
            if let Slot::Free { component, warp } = slot {
                let x = if i < a.len() { a[i] } else { b };
                let s = warp.invert(x);
                if !(s.abs() < 1.0) {
                    return None;
                }
                p[*component] = s;
            }
        }
        if p.iter().any(|v| v.is_nan()) {
            return None;
        }
        Some(p)
    }
}

/// Total particle dimension `P = sum_j D_j` of a map list.
pub fn total_input_dim(maps: &[ParticleMap]) -> usize {
    maps.iter().map(|m| m.input_dim()).sum()
}

/// Applies the maps blockwise: block `j` of `p` feeds map `j`.
pub fn map_all(maps: &[ParticleMap], p: &[f64]) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if p.len() != total_input_dim(maps) {
        return Err(Error::Usage(format!(
            "particle has {} components, maps expect {}",
            p.len(),
            total_input_dim(maps)
        )));
    }
    let mut directions = Vec::with_capacity(maps.len());
    let mut offsets = Vec::with_capacity(maps.len());
    let mut at = 0;
    for m in maps {
        let block = &p[at..at + m.input_dim()];
        at += m.input_dim();
        let (a, b) = m.map(block)?;
        directions.push(a);
        offsets.push(b);
    }
    Ok((directions, offsets))
}

/// Template used by the 1-d transport/wave problems: a single particle
/// component drives the time slope through the tangent warp, the space
/// slope is fixed at 1 and the offset at 0.
pub fn slope_template() -> ParticleMap {
    ParticleMap::new(vec![
        Slot::Free { component: 0, warp: Warp::Tan },
        Slot::Fixed(1.0),
        Slot::Fixed(0.0),
    ])
    .expect("static template is valid")
}

/// Template with the first direction component fixed at 1 and the second
/// driven through the tangent warp; offset 0.
pub fn second_slope_template() -> ParticleMap {
    ParticleMap::new(vec![
        Slot::Fixed(1.0),
        Slot::Free { component: 0, warp: Warp::Tan },
        Slot::Fixed(0.0),
    ])
    .expect("static template is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn full_tan_at_origin() {
        let m = ParticleMap::full_tan(1);
        let (a, b) = m.map(&[0.0, 0.0]).unwrap();
        assert_eq!(a, vec![0.0]);
        assert_eq!(b, 0.0);
    }

    #[test]
    fn full_tan_quarter_turn() {
        let m = ParticleMap::full_tan(1);
        let (a, b) = m.map(&[0.5, 0.0]).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-15);
        assert_eq!(b, 0.0);
    }

    #[test]
    fn transport_template_at_half() {
        let m = slope_template();
        let (a, b) = m.map(&[0.5]).unwrap();
        assert!((a[0] - 1.0).abs() < 1e-15);
        assert_eq!(a[1], 1.0);
        assert_eq!(b, 0.0);
    }

    #[test]
    fn map_all_is_blockwise_and_odd() {
        let maps = [slope_template(), slope_template()];
        let (dirs, offs) = map_all(&maps, &[0.5, -0.5]).unwrap();
        assert!((dirs[0][0] - 1.0).abs() < 1e-15);
        assert!((dirs[1][0] + 1.0).abs() < 1e-15);
        assert_eq!(offs, vec![0.0, 0.0]);

        let m3 = ParticleMap::full_tan(2);
        let (dirs, offs) = map_all(&[m3], &[0.0, 0.0, 0.0]).unwrap();
        assert_eq!(dirs[0], vec![0.0, 0.0]);
        assert_eq!(offs[0], 0.0);
    }

    #[test]
    fn plane_wave_template_recovers_direction() {
        // a free through affine [-2,2], b fixed at -1
        let m = ParticleMap::new(vec![
            Slot::Free { component: 0, warp: Warp::Affine { lo: -2.0, hi: 2.0 } },
            Slot::Free { component: 1, warp: Warp::Affine { lo: -2.0, hi: 2.0 } },
            Slot::Free { component: 2, warp: Warp::Affine { lo: -2.0, hi: 2.0 } },
            Slot::Fixed(-1.0),
        ])
        .unwrap();
        let n1 = [-1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt(), 0.0];
        // invert the affine warp analytically: s = x / 2
        let p: Vec<f64> = n1.iter().map(|x| x / 2.0).collect();
        let (a, b) = m.map(&p).unwrap();
        for (ai, ni) in a.iter().zip(&n1) {
            assert!((ai - ni).abs() < 1e-15);
        }
        assert_eq!(b, -1.0);
    }

    #[test]
    fn out_of_cube_is_domain_error() {
        let m = ParticleMap::full_tan(1);
        assert!(matches!(m.map(&[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(m.map(&[0.0, -1.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn all_fixed_template_rejected() {
        let r = ParticleMap::new(vec![Slot::Fixed(1.0), Slot::Fixed(0.0)]);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn unreferenced_component_rejected() {
        // slots reference component 1 only, leaving 0 unused
        let r = ParticleMap::new(vec![
            Slot::Free { component: 1, warp: Warp::Tan },
            Slot::Fixed(0.0),
        ]);
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn injectivity_of_full_tan() {
        let m = ParticleMap::full_tan(1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.999..0.999)).collect();
            let q: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.999..0.999)).collect();
            if p != q {
                assert_ne!(m.map(&p).unwrap(), m.map(&q).unwrap());
            }
        }
    }

    #[test]
    fn affine_round_trip() {
        let m = ParticleMap::new(vec![
            Slot::Free { component: 0, warp: Warp::Affine { lo: -2.0, hi: 2.0 } },
            Slot::Free { component: 1, warp: Warp::Affine { lo: 0.1, hi: 1.0 } },
            Slot::Fixed(0.0),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p: Vec<f64> = (0..2).map(|_| rng.gen_range(-0.999..0.999)).collect();
            let (a, b) = m.map(&p).unwrap();
            let back = m.unmap(&a, b).unwrap();
            for (x, y) in p.iter().zip(&back) {
                assert!((x - y).abs() <= 1e-12);
            }
        }
    }
}
