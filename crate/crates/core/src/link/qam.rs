use serde::{Deserialize, Serialize};

use crate::{Error, Result, C64};

/// Square Gray-labelled QAM with unit average symbol energy.
///
/// A label packs the Gray code of the in-phase level in its high half and
/// that of the quadrature level in its low half, so horizontally or
/// vertically adjacent points differ in exactly one bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct QamConstellation {
    order: usize,
    side: usize,
    half_bits: u32,
    scale: f64,
    points: Vec<C64>,
}

fn gray(n: usize) -> usize {
    n ^ (n >> 1)
}

fn gray_inverse(mut g: usize) -> usize {
    let mut n = g;
    while g > 0 {
        g >>= 1;
        n ^= g;
    }
    n
}

impl QamConstellation {
    pub fn new(order: usize) -> Result<Self> {
        if ![4, 16, 64, 256].contains(&order) {
            return Err(Error::invalid(format!(
                "QAM order must be one of 4, 16, 64, 256; got {order}"
            )));
        }
        let half_bits = order.trailing_zeros() / 2;
        let side = 1usize << half_bits;
        let scale = (3.0 / (2.0 * (order as f64 - 1.0))).sqrt();
        let mask = side - 1;
        let points = (0..order)
            .map(|label| {
                let li = gray_inverse(label >> half_bits);
                let lq = gray_inverse(label & mask);
                C64::new(Self::amp(li, side) * scale, Self::amp(lq, side) * scale)
            })
            .collect();
        Ok(Self {
            order,
            side,
            half_bits,
            scale,
            points,
        })
    }

    fn amp(level: usize, side: usize) -> f64 {
        2.0 * level as f64 - (side as f64 - 1.0)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.half_bits as usize
    }

    /// Points indexed by label.
    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn map(&self, label: usize) -> C64 {
        self.points[label]
    }

    fn slice_axis(&self, x: f64) -> usize {
        let lvl = ((x / self.scale + (self.side as f64 - 1.0)) / 2.0).round();
        lvl.clamp(0.0, (self.side - 1) as f64) as usize
    }

    /// Label of the nearest constellation point.
    pub fn slice(&self, z: C64) -> usize {
        (gray(self.slice_axis(z.re)) << self.half_bits) | gray(self.slice_axis(z.im))
    }

    /// Bits of a label, most significant first.
    pub fn label_bits(&self, label: usize) -> impl Iterator<Item = u8> + '_ {
        let nb = self.bits_per_symbol();
        (0..nb).rev().map(move |b| ((label >> b) & 1) as u8)
    }

    pub fn bit_errors(&self, sent: usize, detected: usize) -> u32 {
        (sent ^ detected).count_ones()
    }
}

impl TryFrom<usize> for QamConstellation {
    type Error = Error;
    fn try_from(order: usize) -> Result<Self> {
        Self::new(order)
    }
}

impl From<QamConstellation> for usize {
    fn from(q: QamConstellation) -> usize {
        q.order
    }
}
