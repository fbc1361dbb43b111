//! Crack-edge chain codes: lossless serialization of the segment
//! boundary set and exact label-map reconstruction.
//!
//! Boundaries live between pixels, on the corner lattice
//! `[0, width] x [0, height]`. A chain is a start corner, an initial
//! absolute direction and a sequence of relative moves over the
//! three-symbol alphabet {left, straight, right}.

use std::collections::HashMap;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    N,
    E,
    S,
    W,
}

impl Direction {
    pub const ORDER: [Direction; 4] = [Direction::N, Direction::E, Direction::S, Direction::W];

    pub fn to_byte(self) -> u8 {
        match self {
            Direction::N => 0,
            Direction::E => 1,
            Direction::S => 2,
            Direction::W => 3,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Direction::N),
            1 => Some(Direction::E),
            2 => Some(Direction::S),
            3 => Some(Direction::W),
            _ => None,
        }
    }

    fn turn(self, m: Move) -> Direction {
        let d = self.to_byte() as i8;
        let d = match m {
            Move::Left => (d + 3) % 4,
            Move::Straight => d,
            Move::Right => (d + 1) % 4,
        };
        Direction::from_byte(d as u8).unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Left,
    Straight,
    Right,
}

impl Move {
    pub fn to_byte(self) -> u8 {
        match self {
            Move::Left => 0,
            Move::Straight => 1,
            Move::Right => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<Self> {
        match b {
            0 => Some(Move::Left),
            1 => Some(Move::Straight),
            2 => Some(Move::Right),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub start: (u16, u16),
    pub dir: Direction,
    pub moves: Vec<Move>,
}

impl Chain {
    /// Number of crack edges this chain traverses.
    pub fn edge_count(&self) -> usize {
        self.moves.len() + 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainSet {
    pub width: usize,
    pub height: usize,
    pub chains: Vec<Chain>,
}

impl ChainSet {
    pub fn total_edges(&self) -> usize {
        self.chains.iter().map(Chain::edge_count).sum()
    }
}

/// Crack-edge occupancy on the corner lattice.
/// Vertical edge (x, y): corner (x,y) -> (x,y+1), x in 0..=w, y in 0..h.
/// Horizontal edge (x, y): corner (x,y) -> (x+1,y), x in 0..w, y in 0..=h.
struct EdgeSet {
    w: usize,
    h: usize,
    vert: Vec<bool>,
    horiz: Vec<bool>,
}

impl EdgeSet {
    fn new(w: usize, h: usize) -> Self {
        EdgeSet { w, h, vert: vec![false; (w + 1) * h], horiz: vec![false; w * (h + 1)] }
    }

    #[inline]
    fn vert_idx(&self, x: usize, y: usize) -> usize {
        y * (self.w + 1) + x
    }

    #[inline]
    fn horiz_idx(&self, x: usize, y: usize) -> usize {
        y * self.w + x
    }

    /// Edge leaving corner (cx, cy) in direction d, as (slot, next corner),
    /// or None when it would leave the lattice.
    fn step(&self, cx: usize, cy: usize, d: Direction) -> Option<(EdgeRef, (usize, usize))> {
        match d {
            Direction::N => (cy > 0).then(|| (EdgeRef::V(self.vert_idx(cx, cy - 1)), (cx, cy - 1))),
            Direction::S => {
                (cy < self.h).then(|| (EdgeRef::V(self.vert_idx(cx, cy)), (cx, cy + 1)))
            }
            Direction::E => {
                (cx < self.w).then(|| (EdgeRef::H(self.horiz_idx(cx, cy)), (cx + 1, cy)))
            }
            Direction::W => {
                (cx > 0).then(|| (EdgeRef::H(self.horiz_idx(cx - 1, cy)), (cx - 1, cy)))
            }
        }
    }

    fn get(&self, e: EdgeRef) -> bool {
        match e {
            EdgeRef::V(i) => self.vert[i],
            EdgeRef::H(i) => self.horiz[i],
        }
    }

    fn set(&mut self, e: EdgeRef, v: bool) {
        match e {
            EdgeRef::V(i) => self.vert[i] = v,
            EdgeRef::H(i) => self.horiz[i] = v,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum EdgeRef {
    V(usize),
    H(usize),
}

fn boundary_edges(labels: &[u32], w: usize, h: usize) -> EdgeSet {
    let mut edges = EdgeSet::new(w, h);
    for y in 0..h {
        for x in 1..w {
            if labels[y * w + x - 1] != labels[y * w + x] {
                let i = edges.vert_idx(x, y);
                edges.vert[i] = true;
            }
        }
    }
    for y in 1..h {
        for x in 0..w {
            if labels[(y - 1) * w + x] != labels[y * w + x] {
                let i = edges.horiz_idx(x, y);
                edges.horiz[i] = true;
            }
        }
    }
    edges
}

/// Decomposes all inter-segment crack edges into maximal chains: scan
/// corners row-major, seed a chain on the smallest-direction pending
/// edge (N<E<S<W), then keep walking with preference
/// straight > left > right until no pending edge remains at the corner.
pub fn encode_boundaries(labels: &[u32], width: usize, height: usize) -> ChainSet {
    let mut pending = boundary_edges(labels, width, height);
    let mut chains = Vec::new();
    for cy in 0..=height {
        for cx in 0..=width {
            loop {
                let mut seed = None;
                for d in Direction::ORDER {
                    if let Some((e, next)) = pending.step(cx, cy, d) {
                        if pending.get(e) {
                            seed = Some((d, e, next));
                            break;
                        }
                    }
                }
                let Some((dir, e, mut corner)) = seed else { break };
                pending.set(e, false);
                let mut moves = Vec::new();
                let mut heading = dir;
                'walk: loop {
                    for m in [Move::Straight, Move::Left, Move::Right] {
                        let d = heading.turn(m);
                        if let Some((e, next)) = pending.step(corner.0, corner.1, d) {
                            if pending.get(e) {
                                pending.set(e, false);
                                moves.push(m);
                                heading = d;
                                corner = next;
                                continue 'walk;
                            }
                        }
                    }
                    break;
                }
                chains.push(Chain { start: (cx as u16, cy as u16), dir, moves });
            }
        }
    }
    ChainSet { width, height, chains }
}

/// Replays all chains, marks the traversed crack edges and labels pixels
/// by connected components of 4-adjacency not separated by a marked
/// edge. Region ids are canonical: row-major order of first pixels.
pub fn decode_boundaries(chains: &ChainSet, width: usize, height: usize) -> Result<Vec<u32>> {
    let mut edges = EdgeSet::new(width, height);
    for chain in &chains.chains {
        let (mut cx, mut cy) = (chain.start.0 as usize, chain.start.1 as usize);
        if cx > width || cy > height {
            return Err(Error::ChainOutOfBounds);
        }
        let mut heading = chain.dir;
        let Some((e, next)) = edges.step(cx, cy, heading) else {
            return Err(Error::ChainOutOfBounds);
        };
        edges.set(e, true);
        (cx, cy) = next;
        for &m in &chain.moves {
            heading = heading.turn(m);
            let Some((e, next)) = edges.step(cx, cy, heading) else {
                return Err(Error::ChainOutOfBounds);
            };
            edges.set(e, true);
            (cx, cy) = next;
        }
    }

    // union-find over pixels; unite across unmarked cracks
    let n = width * height;
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut [u32], mut i: u32) -> u32 {
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }
    for y in 0..height {
        for x in 0..width {
            let p = (y * width + x) as u32;
            if x + 1 < width && !edges.vert[edges.vert_idx(x + 1, y)] {
                let (a, b) = (find(&mut parent, p), find(&mut parent, p + 1));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
            if y + 1 < height && !edges.horiz[edges.horiz_idx(x, y + 1)] {
                let q = p + width as u32;
                let (a, b) = (find(&mut parent, p), find(&mut parent, q));
                if a != b {
                    parent[a.max(b) as usize] = a.min(b);
                }
            }
        }
    }
    let mut labels = vec![0u32; n];
    let mut ids: HashMap<u32, u32> = HashMap::new();
    for i in 0..n as u32 {
        let root = find(&mut parent, i);
        let next = ids.len() as u32;
        labels[i as usize] = *ids.entry(root).or_insert(next);
    }
    Ok(labels)
}

/// Canonical relabeling by row-major first pixel, for label-map equality
/// tests that ignore id choice.
pub fn canonicalize(labels: &[u32]) -> Vec<u32> {
    let mut ids: HashMap<u32, u32> = HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = ids.len() as u32;
            *ids.entry(l).or_insert(next)
        })
        .collect()
}
