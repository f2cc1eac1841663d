/// Periodic rectangular lattice with per-axis spacing. Sites are flat
/// indices in row-major order; all neighbor access wraps.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub dims: Vec<usize>,
    pub h: Vec<f64>,
    strides: Vec<usize>,
    len: usize,
}

impl Lattice {
    pub fn new(dims: Vec<usize>, h: Vec<f64>) -> Self {
        assert_eq!(dims.len(), h.len(), "dims/spacing rank mismatch");
        assert!(dims.iter().all(|&d| d >= 4), "each extent must be >= 4");
        assert!(h.iter().all(|&x| x > 0.0));
        let mut strides = vec![0usize; dims.len()];
        let mut acc = 1usize;
        for (i, &d) in dims.iter().enumerate().rev() {
            strides[i] = acc;
            acc *= d;
        }
        Lattice {
            dims,
            h,
            strides,
            len: acc,
        }
    }

    pub fn cubic(n_axes: usize, extent: usize, h: f64) -> Self {
        Lattice::new(vec![extent; n_axes], vec![h; n_axes])
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn n_axes(&self) -> usize {
        self.dims.len()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| c * s)
            .sum()
    }

    pub fn coords(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.n_axes()];
        for (i, &s) in self.strides.iter().enumerate() {
            out[i] = idx / s;
            idx %= s;
        }
        out
    }

    /// Neighbor along `axis` displaced by `step` sites, periodic.
    #[inline]
    pub fn shift(&self, idx: usize, axis: usize, step: isize) -> usize {
        let s = self.strides[axis];
        let d = self.dims[axis];
        let c = (idx / s) % d;
        let rest = idx - c * s;
        let nc = (c as isize + step).rem_euclid(d as isize) as usize;
        rest + nc * s
    }

    pub fn sites(&self) -> std::ops::Range<usize> {
        0..self.len
    }

    /// Signed displacement (in sites) from `from` to `to` along `axis`,
    /// wrapped into (-L/2, L/2].
    pub fn wrapped_delta(&self, from: usize, to: usize, axis: usize) -> isize {
        let s = self.strides[axis];
        let d = self.dims[axis] as isize;
        let a = ((from / s) % self.dims[axis]) as isize;
        let b = ((to / s) % self.dims[axis]) as isize;
        let mut delta = b - a;
        if delta > d / 2 {
            delta -= d;
        }
        if delta <= -d / 2 {
            delta += d;
        }
        delta
    }

    pub fn is_interior(&self, idx: usize, margin: usize) -> bool {
        let c = self.coords(idx);
        c.iter()
            .zip(&self.dims)
            .all(|(&x, &d)| x >= margin && x + margin < d)
    }
}
