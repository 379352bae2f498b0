//! Labeled mutable references.
//!
//! A reference's label is fixed when it is created. Reading taints like
//! `unlabel`; writing is allowed only upward (`cur ⊑ ref ⊑ clr`) and does not
//! taint the writer. Creation is bounded by clearance, so a context cannot
//! mint storage above what it may read.

use crate::lattice::Label;
use crate::pos::Pos;
use crate::runtime::{EventKind, Lio, LioContext, MonitorError, Payload};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RefHandle {
    store: u64,
    index: usize,
    label: Label,
}

impl RefHandle {
    pub fn label(&self) -> &Label {
        &self.label
    }
}

/// Cells of one context. Grows monotonically; ids are never reused.
#[derive(Debug)]
pub struct RefStore<V> {
    id: u64,
    cells: Vec<V>,
}

impl<V> RefStore<V> {
    pub(crate) fn new(id: u64) -> Self {
        RefStore { id, cells: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub(crate) fn cells(&self) -> &[V] {
        &self.cells
    }

    fn resolve(&self, r: &RefHandle) -> Result<usize, MonitorError> {
        if r.store != self.id || r.index >= self.cells.len() {
            return Err(MonitorError::ForeignRef);
        }
        Ok(r.index)
    }
}

impl<V: Payload> LioContext<V> {
    pub fn new_ref(&mut self, l: &Label, value: V, at: Pos) -> Lio<RefHandle, V> {
        self.check_bounds(l).map_err(|e| self.stop(e, at))?;
        let index = self.store.cells.len();
        self.store.cells.push(value);
        self.record(EventKind::RefNew, l.clone(), at);
        Ok(RefHandle { store: self.store.id, index, label: l.clone() })
    }

    pub fn read_ref(&mut self, r: &RefHandle, at: Pos) -> Lio<V, V> {
        let step = || -> Result<(usize, Label), MonitorError> {
            let index = self.store.resolve(r)?;
            Ok((index, self.raised(&r.label)?))
        };
        let (index, raised) = step().map_err(|e| self.stop(e, at))?;
        self.raise_to(raised.clone());
        self.record(EventKind::RefRead, raised, at);
        Ok(self.store.cells[index].clone())
    }

    pub fn write_ref(&mut self, r: &RefHandle, value: V, at: Pos) -> Lio<(), V> {
        let step = || -> Result<usize, MonitorError> {
            let index = self.store.resolve(r)?;
            self.check_bounds(&r.label)?;
            Ok(index)
        };
        let index = step().map_err(|e| self.stop(e, at))?;
        self.store.cells[index] = value;
        self.record(EventKind::RefWrite, r.label.clone(), at);
        Ok(())
    }

    pub fn store(&self) -> &RefStore<V> {
        &self.store
    }
}

#[cfg(test)]
mod tests {
    use crate::runtime::{Abort, StopKind};

    use super::*;

    #[derive(Debug, Clone, PartialEq)]
    enum P {
        Int(i64),
        Exn,
    }

    impl Payload for P {
        fn from_abort(_: Abort<Self>) -> Self {
            P::Exn
        }
        fn as_abort(&self) -> Option<&Abort<Self>> {
            None
        }
    }

    const L: Label = Label::LOW;
    const H: Label = Label::HIGH;
    const AT: Pos = Pos::NONE;

    fn ctx(cur: Label, clr: Label) -> LioContext<P> {
        LioContext::new(cur, clr).unwrap()
    }

    fn kind<T: std::fmt::Debug>(r: Lio<T, P>) -> StopKind {
        r.unwrap_err().stop_kind().unwrap()
    }

    #[test]
    fn new_ref_examples() {
        let mut c = ctx(L, H);
        let r = c.new_ref(&H, P::Int(0), AT).unwrap();
        assert_eq!(r.label(), &H);
        assert_eq!(kind(ctx(H, H).new_ref(&L, P::Int(0), AT)), StopKind::IfcViolation);
        assert_eq!(kind(ctx(L, L).new_ref(&H, P::Int(0), AT)), StopKind::ClearanceViolation);
    }

    #[test]
    fn read_ref_examples() {
        let mut c = ctx(L, H);
        let r = c.new_ref(&H, P::Int(4), AT).unwrap();
        assert_eq!(c.read_ref(&r, AT).unwrap(), P::Int(4));
        assert_eq!(c.get_label(), &H);

        let mut c = ctx(L, H);
        let r = c.new_ref(&H, P::Int(4), AT).unwrap();
        c.lower_clearance(&L, AT).unwrap();
        assert_eq!(kind(c.read_ref(&r, AT)), StopKind::ClearanceViolation);
        assert_eq!(c.get_label(), &L);

        let mut c = ctx(L, H);
        let r = c.new_ref(&L, P::Int(4), AT).unwrap();
        c.taint(&H, AT).unwrap();
        assert_eq!(c.read_ref(&r, AT).unwrap(), P::Int(4));
        assert_eq!(c.get_label(), &H);
    }

    #[test]
    fn write_ref_examples() {
        let mut c = ctx(L, H);
        let hi = c.new_ref(&H, P::Int(0), AT).unwrap();
        let lo = c.new_ref(&L, P::Int(0), AT).unwrap();
        c.write_ref(&hi, P::Int(9), AT).unwrap();
        assert_eq!(c.get_label(), &L);

        c.lower_clearance(&L, AT).unwrap();
        assert_eq!(kind(c.write_ref(&hi, P::Int(9), AT)), StopKind::ClearanceViolation);

        let mut c = ctx(L, H);
        let lo2 = c.new_ref(&L, P::Int(0), AT).unwrap();
        c.taint(&H, AT).unwrap();
        assert_eq!(kind(c.write_ref(&lo2, P::Int(9), AT)), StopKind::IfcViolation);
        assert_eq!(c.snapshot().cells, vec!["Int(0)".to_string()]);
        drop(lo);
    }

    #[test]
    fn handles_do_not_cross_contexts() {
        let mut a = ctx(L, H);
        let mut b = ctx(L, H);
        let ra = a.new_ref(&L, P::Int(1), AT).unwrap();
        let _rb = b.new_ref(&L, P::Int(2), AT).unwrap();
        assert_eq!(kind(b.read_ref(&ra, AT)), StopKind::InvalidReference);
        assert_eq!(kind(b.write_ref(&ra, P::Int(3), AT)), StopKind::InvalidReference);
        assert_eq!(a.read_ref(&ra, AT).unwrap(), P::Int(1));
    }
}
