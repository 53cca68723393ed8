use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use crate::tensor::{DenseMatrix, DenseVector};

use super::buffer::{BufferRef, Shared};

/// Kind of a kernel parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Param {
    Buffer,
    Scalar,
    Count,
}

/// A bound task argument.
pub enum Arg<T> {
    Buffer(BufferRef<T>),
    Scalar(T),
    Count(usize),
}

impl<T> Arg<T> {
    pub fn param(&self) -> Param {
        match self {
            Arg::Buffer(_) => Param::Buffer,
            Arg::Scalar(_) => Param::Scalar,
            Arg::Count(_) => Param::Count,
        }
    }
}

impl<T: Clone> Clone for Arg<T> {
    fn clone(&self) -> Self {
        match self {
            Arg::Buffer(b) => Arg::Buffer(Arc::clone(b)),
            Arg::Scalar(v) => Arg::Scalar(v.clone()),
            Arg::Count(n) => Arg::Count(*n),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Arg<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Buffer(b) => write!(f, "Buffer({})", b.id()),
            Arg::Scalar(v) => write!(f, "Scalar({v:?})"),
            Arg::Count(n) => write!(f, "Count({n})"),
        }
    }
}

impl<T: crate::Scalar> From<&Shared<DenseMatrix<T>>> for Arg<T> {
    fn from(s: &Shared<DenseMatrix<T>>) -> Self {
        Arg::Buffer(s.handle())
    }
}

impl<T: crate::Scalar> From<&Shared<DenseVector<T>>> for Arg<T> {
    fn from(s: &Shared<DenseVector<T>>) -> Self {
        Arg::Buffer(s.handle())
    }
}

/// Parallel iteration space. Lanes are indexed `(outer, inner)`; a 1D space has
/// a single inner position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterSpace {
    D1(usize),
    D2(usize, usize),
}

impl IterSpace {
    pub fn outer(&self) -> usize {
        match *self {
            IterSpace::D1(n) | IterSpace::D2(n, _) => n,
        }
    }

    pub fn inner(&self) -> usize {
        match *self {
            IterSpace::D1(_) => 1,
            IterSpace::D2(_, m) => m,
        }
    }

    pub fn lanes(&self) -> usize {
        self.outer() * self.inner()
    }
}

type Body<T> = dyn Fn(&Lane<'_, T>) + Send + Sync;

/// A data-parallel kernel: `body` runs once per lane of `space`.
pub struct Kernel<T> {
    name: String,
    params: Vec<Param>,
    space: IterSpace,
    body: Arc<Body<T>>,
}

impl<T> Clone for Kernel<T> {
    fn clone(&self) -> Self {
        Self {
            name: self.name.clone(),
            params: self.params.clone(),
            space: self.space,
            body: Arc::clone(&self.body),
        }
    }
}

impl<T> fmt::Debug for Kernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("space", &self.space)
            .finish()
    }
}

impl<T> Kernel<T> {
    pub fn new<F>(name: impl Into<String>, params: Vec<Param>, space: IterSpace, body: F) -> Self
    where
        F: Fn(&Lane<'_, T>) + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            params,
            space,
            body: Arc::new(body),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn space(&self) -> IterSpace {
        self.space
    }

    pub(crate) fn body(&self) -> &Body<T> {
        &*self.body
    }
}

/// Device-side view of an arena buffer.
pub(crate) struct RawBuffer<T> {
    ptr: *mut T,
    len: usize,
}

// SAFETY: lanes only touch the buffer through `Lane::get`/`Lane::set`, which
// bounds-check every access. Concurrent lanes write disjoint elements under
// the kernel contract, and the arena is not otherwise accessed during dispatch.
unsafe impl<T: Send> Send for RawBuffer<T> {}
unsafe impl<T: Send> Sync for RawBuffer<T> {}

impl<T> RawBuffer<T> {
    pub(crate) fn new(v: &mut Vec<T>) -> Self {
        Self {
            ptr: v.as_mut_ptr(),
            len: v.len(),
        }
    }
}

pub(crate) enum DeviceArg<T> {
    Buffer(RawBuffer<T>),
    Scalar(T),
    Count(usize),
}

/// Handle a kernel body receives for one lane.
pub struct Lane<'a, T> {
    pub(crate) outer: usize,
    pub(crate) inner: usize,
    pub(crate) args: &'a [DeviceArg<T>],
    pub(crate) log: Option<&'a RefCell<Vec<(usize, usize)>>>,
}

impl<T: Copy> Lane<'_, T> {
    #[inline]
    pub fn outer(&self) -> usize {
        self.outer
    }

    #[inline]
    pub fn inner(&self) -> usize {
        self.inner
    }

    #[inline]
    fn buffer(&self, arg: usize) -> &RawBuffer<T> {
        match &self.args[arg] {
            DeviceArg::Buffer(b) => b,
            _ => panic!("kernel argument {arg} is not a buffer"),
        }
    }

    #[inline]
    pub fn len(&self, arg: usize) -> usize {
        self.buffer(arg).len
    }

    #[inline]
    pub fn get(&self, arg: usize, pos: usize) -> T {
        let b = self.buffer(arg);
        assert!(pos < b.len, "read past end of argument {arg}: {pos} >= {}", b.len);
        // SAFETY: in bounds; see `RawBuffer`.
        unsafe { b.ptr.add(pos).read() }
    }

    #[inline]
    pub fn set(&self, arg: usize, pos: usize, value: T) {
        let b = self.buffer(arg);
        assert!(pos < b.len, "write past end of argument {arg}: {pos} >= {}", b.len);
        if let Some(log) = self.log {
            log.borrow_mut().push((arg, pos));
        }
        // SAFETY: in bounds; see `RawBuffer`.
        unsafe { b.ptr.add(pos).write(value) }
    }

    #[inline]
    pub fn scalar(&self, arg: usize) -> T {
        match &self.args[arg] {
            DeviceArg::Scalar(v) => *v,
            _ => panic!("kernel argument {arg} is not a scalar"),
        }
    }

    #[inline]
    pub fn count(&self, arg: usize) -> usize {
        match &self.args[arg] {
            DeviceArg::Count(n) => *n,
            _ => panic!("kernel argument {arg} is not a count"),
        }
    }
}
