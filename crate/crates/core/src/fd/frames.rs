//! Orthogonal lattice frames for the wide stencil.

use crate::error::{Error, Result};

/// A pair of orthogonal lattice vectors `v1 = (p, q)`, `v2 = (-q, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub p: i32,
    pub q: i32,
    /// Angle of `v1` in `[0, pi/2)`.
    pub angle: f64,
}

impl Frame {
    pub fn vectors(&self) -> [(i32, i32); 2] {
        [(self.p, self.q), (-self.q, self.p)]
    }

    /// Length of either vector in lattice units.
    pub fn length(&self) -> f64 {
        ((self.p * self.p + self.q * self.q) as f64).sqrt()
    }
}

fn gcd(a: i32, b: i32) -> i32 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// All frames whose vectors are primitive with `max(|p|, |q|) <= s_w`, sorted by angle.
pub fn lattice_frames(s_w: usize) -> Vec<Frame> {
    let s = s_w as i32;
    let mut out = Vec::new();
    for p in 1..=s {
        for q in 0..=s {
            if gcd(p, q) == 1 {
                out.push(Frame {
                    p,
                    q,
                    angle: (q as f64).atan2(p as f64),
                });
            }
        }
    }
    out.sort_by(|a, b| a.angle.total_cmp(&b.angle));
    out
}

/// `directions` frames spread evenly in angle order; always includes the axis frame.
pub fn select_frames(s_w: usize, directions: usize) -> Result<Vec<Frame>> {
    if s_w == 0 {
        return Err(Error::Config("stencil radius must be >= 1".into()));
    }
    let all = lattice_frames(s_w);
    if directions == 0 || directions > all.len() {
        return Err(Error::Config(format!(
            "stencil radius {s_w} provides {} frames, {directions} requested",
            all.len()
        )));
    }
    Ok((0..directions)
        .map(|k| all[(k * all.len()) / directions])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radius_three_has_eight_frames() {
        let f = lattice_frames(3);
        assert_eq!(f.len(), 8);
        assert_eq!((f[0].p, f[0].q), (1, 0));
        assert_eq!(lattice_frames(1).len(), 2);
    }

    #[test]
    fn selection() {
        let f = select_frames(3, 4).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!((f[0].p, f[0].q), (1, 0));
        assert!(select_frames(3, 9).is_err());
        assert!(select_frames(2, 2).unwrap().iter().any(|f| f.q == 1 && f.p == 1));
    }
}
