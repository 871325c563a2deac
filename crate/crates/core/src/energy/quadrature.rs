//! Tensor-product Gauss–Legendre rules on a uniform cell partition of the domain.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::error::{Error, Result};
use crate::field::Domain;
use crate::tensor::Vec2;

pub const MAX_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quadrature {
    pub cells: [usize; 2],
    pub order: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature { cells: [16, 16], order: 4 }
    }
}

impl Quadrature {
    pub fn new(cells: [usize; 2], order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::QuadratureOrderInvalid(order));
        }
        if cells[0] == 0 || cells[1] == 0 {
            return Err(Error::InvalidGrid(format!("{}x{} quadrature cells", cells[0], cells[1])));
        }
        Ok(Quadrature { cells, order })
    }

    pub fn with_order(order: usize) -> Result<Self> {
        Quadrature::new(Quadrature::default().cells, order)
    }

    /// Nodes and weights on `[0, 1]`, ordered by increasing node.
    pub fn unit_rule(order: usize) -> Result<Vec<(f64, f64)>> {
        let n = NonZeroUsize::new(order)
            .filter(|_| order <= MAX_ORDER)
            .ok_or(Error::QuadratureOrderInvalid(order))?;
        let rule = GaussLegendre::new(n);
        let mut pts: Vec<(f64, f64)> = rule.iter().map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(pts)
    }

    /// Points and weights in a fixed order: cell rows, then cell columns, then nodes.
    pub fn points(&self, domain: &Domain) -> Result<Vec<(Vec2, f64)>> {
        Quadrature::new(self.cells, self.order)?;
        let rule = Quadrature::unit_rule(self.order)?;
        let (lo, hi) = (domain.lo(), domain.hi());
        let step = [(hi.x - lo.x) / self.cells[0] as f64, (hi.y - lo.y) / self.cells[1] as f64];
        let mut out = Vec::with_capacity(self.cells[0] * self.cells[1] * rule.len() * rule.len());
        for i in 0..self.cells[0] {
            for j in 0..self.cells[1] {
                for &(s, ws) in &rule {
                    for &(t, wt) in &rule {
                        let x = Vec2::new(lo.x + (i as f64 + s) * step[0], lo.y + (j as f64 + t) * step[1]);
                        out.push((x, ws * wt * step[0] * step[1]));
                    }
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        for n in 1..=MAX_ORDER {
            let rule = Quadrature::unit_rule(n).unwrap();
            for deg in 0..(2 * n) as i32 {
                let s: f64 = rule.iter().map(|(x, w)| w * x.powi(deg)).sum();
                assert!((s - 1.0 / (deg + 1) as f64).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn area_and_errors() {
        let d = Domain::new(0.0, 2.0, -1.0, 0.5).unwrap();
        let pts = Quadrature::new([3, 5], 3).unwrap().points(&d).unwrap();
        assert_eq!(pts.len(), 3 * 5 * 9);
        assert!((pts.iter().map(|p| p.1).sum::<f64>() - 3.0).abs() < 1e-14);
        assert!(pts.iter().all(|(x, _)| d.contains_with_margin(x, 0.0)));
        assert_eq!(Quadrature::new([4, 4], 0), Err(Error::QuadratureOrderInvalid(0)));
        assert_eq!(Quadrature::with_order(13), Err(Error::QuadratureOrderInvalid(13)));
        assert!(matches!(Quadrature::new([0, 4], 2), Err(Error::InvalidGrid(_))));
    }
}
