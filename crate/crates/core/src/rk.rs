//! Fixed-step explicit Runge-Kutta integration for scalar ODEs.

/// An explicit Butcher tableau with `S` stages.
#[derive(Debug, Clone, Copy)]
pub struct Tableau<const S: usize> {
    pub c: [f64; S],
    /// Strictly lower-triangular stage matrix; `a[i][j]` is used for `j < i`.
    pub a: [[f64; S]; S],
    pub b: [f64; S],
    pub order: u32,
}

/// Seventh-order formula of Fehlberg's 7(8) pair (NASA TR R-287). Only the
/// first eleven stages of the pair contribute to the order-7 solution, so the
/// two extra stages needed by the eighth-order companion are dropped.
pub const FEHLBERG7: Tableau<11> = Tableau {
    c: [
        0.0,
        2.0 / 27.0,
        1.0 / 9.0,
        1.0 / 6.0,
        5.0 / 12.0,
        1.0 / 2.0,
        5.0 / 6.0,
        1.0 / 6.0,
        2.0 / 3.0,
        1.0 / 3.0,
        1.0,
    ],
    a: [
        [0.0; 11],
        [2.0 / 27.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 36.0, 1.0 / 12.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 24.0, 0.0, 1.0 / 8.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [5.0 / 12.0, 0.0, -25.0 / 16.0, 25.0 / 16.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [1.0 / 20.0, 0.0, 0.0, 1.0 / 4.0, 1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [
            -25.0 / 108.0,
            0.0,
            0.0,
            125.0 / 108.0,
            -65.0 / 27.0,
            125.0 / 54.0,
            0.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            31.0 / 300.0,
            0.0,
            0.0,
            0.0,
            61.0 / 225.0,
            -2.0 / 9.0,
            13.0 / 900.0,
            0.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            2.0,
            0.0,
            0.0,
            -53.0 / 6.0,
            704.0 / 45.0,
            -107.0 / 9.0,
            67.0 / 90.0,
            3.0,
            0.0,
            0.0,
            0.0,
        ],
        [
            -91.0 / 108.0,
            0.0,
            0.0,
            23.0 / 108.0,
            -976.0 / 135.0,
            311.0 / 54.0,
            -19.0 / 60.0,
            17.0 / 6.0,
            -1.0 / 12.0,
            0.0,
            0.0,
        ],
        [
            2383.0 / 4100.0,
            0.0,
            0.0,
            -341.0 / 164.0,
            4496.0 / 1025.0,
            -301.0 / 82.0,
            2133.0 / 4100.0,
            45.0 / 82.0,
            45.0 / 164.0,
            18.0 / 41.0,
            0.0,
        ],
    ],
    b: [
        41.0 / 840.0,
        0.0,
        0.0,
        0.0,
        0.0,
        34.0 / 105.0,
        9.0 / 35.0,
        9.0 / 35.0,
        9.0 / 280.0,
        9.0 / 280.0,
        41.0 / 840.0,
    ],
    order: 7,
};

impl<const S: usize> Tableau<S> {
    /// One step of size `h` from `(x, y)`. The first error returned by `rhs`
    /// aborts the step.
    pub fn step<E, F>(&self, rhs: &mut F, x: f64, y: f64, h: f64) -> Result<f64, E>
    where
        F: FnMut(f64, f64) -> Result<f64, E>,
    {
        let mut k = [0.0; S];
        for i in 0..S {
            let incr: f64 = (0..i).map(|j| self.a[i][j] * k[j]).sum();
            k[i] = rhs(x + self.c[i] * h, y + h * incr)?;
        }
        let incr: f64 = self.b.iter().zip(&k).map(|(b, k)| b * k).sum();
        Ok(y + h * incr)
    }

    /// Integrates from `(x0, y0)` over `steps` steps of size `h`, returning
    /// only the final value.
    pub fn integrate<E, F>(&self, mut rhs: F, x0: f64, y0: f64, h: f64, steps: usize) -> Result<f64, E>
    where
        F: FnMut(f64, f64) -> Result<f64, E>,
    {
        let mut y = y0;
        for i in 0..steps {
            y = self.step(&mut rhs, x0 + i as f64 * h, y, h)?;
        }
        Ok(y)
    }
}
