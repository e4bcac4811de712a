use crate::space::BrokenField;

/// One-sided traces of a field at a skeleton face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceTracePair {
    pub face: usize,
    /// Limit from the left element.
    pub minus: f64,
    /// Limit from the right element.
    pub plus: f64,
}

impl FaceTracePair {
    #[inline]
    pub fn jump(&self) -> f64 {
        self.minus - self.plus
    }

    #[inline]
    pub fn average(&self) -> f64 {
        0.5 * (self.minus + self.plus)
    }
}

pub fn traces(field: &BrokenField) -> Vec<FaceTracePair> {
    field
        .mesh()
        .faces()
        .iter()
        .enumerate()
        .map(|(e, f)| FaceTracePair {
            face: e,
            minus: field.right_trace(f.left),
            plus: field.left_trace(f.right),
        })
        .collect()
}

/// `⟦v⟧` at every skeleton face.
pub fn jumps(field: &BrokenField) -> Vec<f64> {
    traces(field).iter().map(FaceTracePair::jump).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{BoundaryMode, Mesh1D};
    use std::sync::Arc;

    #[test]
    fn indicator_jumps_periodic() {
        let m = Arc::new(Mesh1D::uniform((0.0, 1.0), 2, BoundaryMode::Periodic).unwrap());
        let f = BrokenField::from_coeffs(m.clone(), 0, vec![1.0, 0.0]).unwrap();
        let t = traces(&f);
        // face 0 is the wrap face at x = 0, face 1 sits at x = 1/2
        assert_eq!(t[0].jump(), -1.0);
        assert_eq!(t[1].jump(), 1.0);
        let c = BrokenField::constant(m, 2, 4.0);
        for tp in traces(&c) {
            assert_eq!(tp.jump(), 0.0);
            assert_eq!(tp.average(), 4.0);
        }
    }
}
