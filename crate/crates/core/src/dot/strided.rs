use crate::error::{Error, Result};

/// A read-only view of `len` elements `data[start + i * stride]`.
///
/// Negative strides walk backwards through `data`; every index is checked
/// once at construction.
#[derive(Debug)]
pub struct Strided<'a, T> {
    data: &'a [T],
    start: usize,
    stride: isize,
    len: usize,
}

impl<T> Clone for Strided<'_, T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Strided<'_, T> {}

impl<'a, T> Strided<'a, T> {
    pub fn new(data: &'a [T], start: usize, stride: isize, len: usize) -> Result<Self> {
        if len > 0 {
            let last = start as i128 + (len as i128 - 1) * stride as i128;
            let n = data.len() as i128;
            if start as i128 >= n || last < 0 || last >= n {
                return Err(Error::StrideOutOfBounds);
            }
        }
        Ok(Strided {
            data,
            start,
            stride,
            len,
        })
    }

    pub fn contiguous(data: &'a [T]) -> Self {
        Strided {
            data,
            start: 0,
            stride: 1,
            len: data.len(),
        }
    }

    /// `data` read from the last element to the first.
    pub fn reversed(data: &'a [T]) -> Self {
        Strided {
            data,
            start: data.len().saturating_sub(1),
            stride: -1,
            len: data.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> &'a T {
        debug_assert!(i < self.len);
        &self.data[(self.start as isize + i as isize * self.stride) as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &'a T> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_strides() {
        let v = [0, 1, 2, 3, 4, 5];
        let s = Strided::new(&v, 5, -2, 3).unwrap();
        assert_eq!(s.iter().copied().collect::<Vec<_>>(), vec![5, 3, 1]);
        assert_eq!(Strided::reversed(&v).get(0), &5);
        assert!(Strided::new(&v, 5, -2, 4).is_err());
        assert!(Strided::new(&v, 0, 3, 3).is_err());
        assert!(Strided::new(&v, 9, 1, 0).is_ok());
    }
}
