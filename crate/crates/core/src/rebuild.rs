//! Navigation pile for inputs whose length is not known up front.
//!
//! The active pile starts with capacity 8. Once half of it is used, a shadow
//! pile of twice the capacity is built next to it and filled two elements per
//! operation, so it has caught up by the time the active pile is full. Then the
//! shadow takes over. Every element is copied a constant number of times overall.

use crate::error::{contract, Result};
use crate::model::{KeySource, WorkspaceMeter};
use crate::navpile::{Mode, NavigationPile};

pub const INITIAL_CAPACITY: usize = 8;
const TRANSFERS_PER_OP: usize = 2;

pub struct RebuildingPile<'a, S: KeySource> {
    src: &'a S,
    s: usize,
    meter: WorkspaceMeter,
    active: NavigationPile<'a, S>,
    shadow: Option<NavigationPile<'a, S>>,
    rebuilds: usize,
    sealed: bool,
}

impl<'a, S: KeySource> RebuildingPile<'a, S> {
    /// `s` is the workspace target handed to every pile built along the way.
    pub fn new(src: &'a S, s: usize, meter: &WorkspaceMeter) -> Self {
        Self {
            src,
            s,
            meter: meter.clone(),
            active: NavigationPile::new(src, INITIAL_CAPACITY, s, Mode::SORTING, meter),
            shadow: None,
            rebuilds: 0,
            sealed: false,
        }
    }

    pub fn rebuild_count(&self) -> usize {
        self.rebuilds
    }

    pub fn capacity(&self) -> usize {
        self.active.capacity()
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn minimum(&self) -> Option<usize> {
        self.active.minimum()
    }

    pub fn active(&self) -> &NavigationPile<'a, S> {
        &self.active
    }

    pub fn has_shadow(&self) -> bool {
        self.shadow.is_some()
    }

    fn advance_transfer(&mut self, budget: usize) -> Result<()> {
        let target = self.active.inserted();
        if let Some(shadow) = &mut self.shadow {
            for _ in 0..budget {
                let next = shadow.inserted();
                if next >= target {
                    break;
                }
                shadow.transfer(next)?;
            }
        }
        Ok(())
    }

    pub fn insert(&mut self, i: usize) -> Result<()> {
        if self.sealed {
            return contract("insert after the input was sealed");
        }
        if self.src.exhausted(i) {
            return contract(format!("insert of {i} past the end of the stream"));
        }
        if i == self.active.capacity() {
            self.advance_transfer(usize::MAX)?;
            let shadow = self.shadow.take().expect("shadow exists once the active pile is half full");
            self.active = shadow;
            self.rebuilds += 1;
        }
        self.active.insert(i)?;
        let cap = self.active.capacity();
        if self.shadow.is_none() && self.active.inserted() > cap / 2 {
            let mut next = NavigationPile::new(self.src, 2 * cap, self.s, Mode::SORTING, &self.meter);
            if let Some(l) = self.active.latest_output() {
                next.observe_output(l);
            }
            self.shadow = Some(next);
        }
        self.advance_transfer(TRANSFERS_PER_OP)
    }

    pub fn extract(&mut self, j: usize) -> Result<()> {
        self.active.extract(j)?;
        if let Some(shadow) = &mut self.shadow {
            if j < shadow.inserted() {
                shadow.extract(j)?;
            } else {
                shadow.observe_output(j);
            }
        }
        self.advance_transfer(TRANSFERS_PER_OP)
    }

    /// Declares the input finished; the shadow is no longer needed.
    pub fn seal(&mut self) {
        self.sealed = true;
        self.shadow = None;
        self.active.settle();
    }

    pub fn settle(&mut self) {
        self.active.settle();
        if let Some(shadow) = &mut self.shadow {
            shadow.settle();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ElementSource;

    #[test]
    fn drains_a_stream_in_order() {
        let n = 77;
        let data: Vec<u64> = (0..n).map(|i| ((i * 31 + 5) % n) as u64).collect();
        let src = ElementSource::streaming(data.clone());
        let m = WorkspaceMeter::new();
        let mut p = RebuildingPile::new(&src, 16, &m);
        let mut i = 0;
        while !src.exhausted(i) {
            p.insert(i).unwrap();
            i += 1;
        }
        p.seal();
        assert_eq!(p.rebuild_count(), 4);
        let mut out = vec![];
        while let Some(j) = p.minimum() {
            p.extract(j).unwrap();
            out.push(data[j]);
        }
        let mut sorted = data;
        sorted.sort();
        assert_eq!(out, sorted);
    }

    #[test]
    fn interleaved_extracts_survive_rebuilds() {
        let n = 200;
        // Each block of three is above everything before it, so inserts stay monotone.
        let data: Vec<u64> = (0..n).map(|i| (i / 3 * 3 + 2 - i % 3) as u64).collect();
        let src = ElementSource::streaming(data.clone());
        let m = WorkspaceMeter::new();
        let mut p = RebuildingPile::new(&src, 8, &m);
        let mut out = vec![];
        for i in 0..n {
            p.insert(i).unwrap();
            if i % 3 == 2 {
                let j = p.minimum().unwrap();
                p.extract(j).unwrap();
                out.push(j);
            }
        }
        p.seal();
        while let Some(j) = p.minimum() {
            p.extract(j).unwrap();
            out.push(j);
        }
        assert_eq!(out.len(), n);
        let mut seen = out.clone();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), n);
        assert_eq!(p.rebuild_count(), 5);
    }
}
