//! Row-major image container for arbitrary pixel types.

/// Rectangular pixel buffer; `(0, 0)` is the top-left pixel, `u` grows right,
/// `v` grows down.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageBuf<P> {
    width: u32,
    height: u32,
    data: Vec<P>,
}

impl<P: Clone> ImageBuf<P> {
    pub fn filled(width: u32, height: u32, value: P) -> Self {
        Self {
            width,
            height,
            data: vec![value; width as usize * height as usize],
        }
    }

    /// Wraps an existing row-major buffer; `data.len()` must be `width * height`.
    pub fn from_raw(width: u32, height: u32, data: Vec<P>) -> Self {
        assert_eq!(
            data.len(),
            width as usize * height as usize,
            "pixel buffer length does not match dimensions"
        );
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    #[inline]
    fn idx(&self, u: u32, v: u32) -> usize {
        debug_assert!(u < self.width && v < self.height);
        v as usize * self.width as usize + u as usize
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> &P {
        &self.data[self.idx(u, v)]
    }

    #[inline]
    pub fn get_mut(&mut self, u: u32, v: u32) -> &mut P {
        let i = self.idx(u, v);
        &mut self.data[i]
    }

    #[inline]
    pub fn as_slice(&self) -> &[P] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [P] {
        &mut self.data
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, P> {
        self.data.chunks_exact(self.width as usize)
    }

    pub fn rows_mut(&mut self) -> std::slice::ChunksExactMut<'_, P> {
        self.data.chunks_exact_mut(self.width as usize)
    }

    pub fn map<Q>(&self, f: impl Fn(&P) -> Q) -> ImageBuf<Q> {
        ImageBuf {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(f).collect(),
        }
    }
}
