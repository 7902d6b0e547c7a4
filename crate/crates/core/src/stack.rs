//! Push-order stack with O(1) amortized removal of arbitrary entries.
//!
//! Entries live in a slab; the stack itself is a vector of slab indices that
//! may contain dead entries. When dead entries exceed half of the vector it
//! is compacted in place, preserving order. Handles carry a generation so a
//! handle outliving its slot (e.g. still sitting in the other endpoint's
//! queue) resolves to "already gone".

use crate::types::EdgeRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Handle {
    slot: u32,
    generation: u32,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StackEntry {
    pub edge: EdgeRecord,
    pub arrival: u64,
    pub leftover: f64,
    /// Weight as it appeared in the input, before any rounding.
    pub original_w: f64,
}

#[derive(Clone, Debug)]
struct Slot {
    entry: StackEntry,
    generation: u32,
    alive: bool,
}

#[derive(Clone, Debug, Default)]
pub struct EdgeStack {
    slots: Vec<Slot>,
    free: Vec<u32>,
    order: Vec<u32>,
    live: usize,
    dead_in_order: usize,
    work: u64,
}

impl EdgeStack {
    pub fn new() -> Self {
        Self::default()
    }

    /// Live entries.
    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Physical length of the order vector, dead entries included.
    pub fn footprint(&self) -> usize {
        self.order.len()
    }

    /// Elementary operations performed so far.
    pub fn work(&self) -> u64 {
        self.work
    }

    pub fn push(&mut self, entry: StackEntry) -> Handle {
        self.work += 1;
        let slot = match self.free.pop() {
            Some(i) => {
                let s = &mut self.slots[i as usize];
                s.entry = entry;
                s.alive = true;
                i
            }
            None => {
                self.slots.push(Slot {
                    entry,
                    generation: 0,
                    alive: true,
                });
                (self.slots.len() - 1) as u32
            }
        };
        self.order.push(slot);
        self.live += 1;
        Handle {
            slot,
            generation: self.slots[slot as usize].generation,
        }
    }

    pub fn is_live(&self, h: Handle) -> bool {
        self.slots
            .get(h.slot as usize)
            .is_some_and(|s| s.alive && s.generation == h.generation)
    }

    /// Removes the entry behind `h`; `None` if it is no longer on the stack.
    pub fn remove(&mut self, h: Handle) -> Option<StackEntry> {
        self.work += 1;
        if !self.is_live(h) {
            return None;
        }
        let s = &mut self.slots[h.slot as usize];
        s.alive = false;
        let entry = s.entry;
        self.live -= 1;
        self.dead_in_order += 1;
        if self.dead_in_order * 2 > self.order.len() {
            self.compact();
        }
        Some(entry)
    }

    fn compact(&mut self) {
        self.work += self.order.len() as u64;
        let slots = &mut self.slots;
        let free = &mut self.free;
        self.order.retain(|&i| {
            let s = &mut slots[i as usize];
            if s.alive {
                true
            } else {
                s.generation = s.generation.wrapping_add(1);
                free.push(i);
                false
            }
        });
        self.dead_in_order = 0;
    }

    /// Live entries from top (last pushed) to bottom.
    pub fn iter_top_down(&self) -> impl Iterator<Item = &StackEntry> + '_ {
        self.order.iter().rev().filter_map(move |&i| {
            let s = &self.slots[i as usize];
            s.alive.then_some(&s.entry)
        })
    }
}
