use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use parking_lot::{RwLock, RwLockReadGuard, RwLockWriteGuard};

use crate::tensor::Storage;

static NEXT_BUFFER: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BufferId(u64);

impl fmt::Display for BufferId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "buf#{}", self.0)
    }
}

/// Host-side memory a schedule can copy to and from a device arena.
pub trait HostBuffer<T>: Send + Sync {
    fn id(&self) -> BufferId;
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Host to device: overwrite `dst` with the host contents.
    fn copy_to_device(&self, dst: &mut Vec<T>);
    /// Device to host. `src.len()` equals [`HostBuffer::len`].
    fn copy_from_device(&self, src: &[T]);
}

pub type BufferRef<T> = Arc<dyn HostBuffer<T>>;

/// Shared host container with a stable identity.
///
/// Cloning shares the underlying storage and keeps the id, the same way a Java
/// reference would. Use [`Shared::duplicate`] for an independent deep copy.
pub struct Shared<C> {
    id: BufferId,
    inner: Arc<RwLock<C>>,
}

impl<C> Shared<C> {
    pub fn new(value: C) -> Self {
        Self {
            id: BufferId(NEXT_BUFFER.fetch_add(1, Ordering::Relaxed)),
            inner: Arc::new(RwLock::new(value)),
        }
    }

    pub fn id(&self) -> BufferId {
        self.id
    }

    pub fn read(&self) -> RwLockReadGuard<'_, C> {
        self.inner.read()
    }

    pub fn write(&self) -> RwLockWriteGuard<'_, C> {
        self.inner.write()
    }

    pub fn duplicate(&self) -> Self
    where
        C: Clone,
    {
        Self::new(self.read().clone())
    }

    pub fn handle<T>(&self) -> BufferRef<T>
    where
        C: Storage<T> + Send + Sync + 'static,
        T: Copy + Send + Sync + 'static,
    {
        Arc::new(self.clone())
    }
}

impl<C> Clone for Shared<C> {
    fn clone(&self) -> Self {
        Self {
            id: self.id,
            inner: Arc::clone(&self.inner),
        }
    }
}

impl<C: fmt::Debug> fmt::Debug for Shared<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Shared")
            .field("id", &self.id)
            .field("value", &*self.inner.read())
            .finish()
    }
}

impl<C, T> HostBuffer<T> for Shared<C>
where
    C: Storage<T> + Send + Sync,
    T: Copy + Send + Sync,
{
    fn id(&self) -> BufferId {
        self.id
    }

    fn len(&self) -> usize {
        self.inner.read().as_slice().len()
    }

    fn copy_to_device(&self, dst: &mut Vec<T>) {
        let host = self.inner.read();
        dst.clear();
        dst.extend_from_slice(host.as_slice());
    }

    fn copy_from_device(&self, src: &[T]) {
        self.inner.write().as_mut_slice().copy_from_slice(src);
    }
}
