//! Rooms, houses and object placement on the tile grid.
//!
//! Rooms are values: every edit returns a new room and leaves the receiver
//! untouched. Placements are keyed by tile, so at most one object occupies a
//! tile and placement equality is set equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Catalog;

/// Side length of the rooms used by the experiments.
pub const DEFAULT_ROOM_SIZE: u32 = 7;

/// Seed room layout: a toilet, a bed and a fridge along the second row.
pub const SEED_LAYOUT: [(&str, Position); 3] = [
    ("toilet", Position::new(1, 1)),
    ("bed", Position::new(3, 1)),
    ("fridge", Position::new(5, 1)),
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HouseError {
    #[error("position {0} is outside the room")]
    OutOfBounds(Position),
    #[error("tile {0} is already occupied")]
    Collision(Position),
    #[error("tile {0} is empty")]
    EmptyTile(Position),
    #[error("unknown object id `{0}`")]
    UnknownObject(String),
    #[error("catalog is missing required object `{0}`")]
    MissingObject(String),
    #[error("room dimensions must be positive, got {width}x{height}")]
    InvalidDimensions { width: u32, height: u32 },
    #[error("a house needs at least one room")]
    NoRooms,
    #[error("invalid house document: {0}")]
    Parse(String),
}

/// Tile coordinate: `x` is the column, `y` the row. Ordered row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Position {
    pub x: u32,
    pub y: u32,
}

impl Position {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Position) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    /// Orthogonal neighbors in Up, Down, Left, Right order. Neighbors that
    /// would leave the non-negative quadrant are skipped; callers bound-check
    /// the far edges.
    pub fn neighbors(self) -> impl Iterator<Item = Position> {
        let Position { x, y } = self;
        [
            y.checked_sub(1).map(|y| Position::new(x, y)),
            y.checked_add(1).map(|y| Position::new(x, y)),
            x.checked_sub(1).map(|x| Position::new(x, y)),
            x.checked_add(1).map(|x| Position::new(x, y)),
        ]
        .into_iter()
        .flatten()
    }
}

impl Ord for Position {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Position {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Count of each catalog object in a room, indexed by catalog order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Descriptor(pub Vec<u32>);

impl Descriptor {
    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Room {
    width: u32,
    height: u32,
    objects: BTreeMap<Position, String>,
}

impl Room {
    pub fn new(width: u32, height: u32) -> Result<Self, HouseError> {
        if width == 0 || height == 0 {
            return Err(HouseError::InvalidDimensions { width, height });
        }
        Ok(Self {
            width,
            height,
            objects: BTreeMap::new(),
        })
    }

    /// Empty room of the default experiment size.
    pub fn default_size() -> Self {
        Self::new(DEFAULT_ROOM_SIZE, DEFAULT_ROOM_SIZE).expect("nonzero size")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn area(&self) -> usize {
        (self.width * self.height) as usize
    }

    pub fn contains(&self, pos: Position) -> bool {
        pos.x < self.width && pos.y < self.height
    }

    pub fn occupant(&self, pos: Position) -> Option<&str> {
        self.objects.get(&pos).map(String::as_str)
    }

    pub fn is_occupied(&self, pos: Position) -> bool {
        self.objects.contains_key(&pos)
    }

    /// Placements in row-major order.
    pub fn placements(&self) -> impl Iterator<Item = (Position, &str)> {
        self.objects.iter().map(|(p, id)| (*p, id.as_str()))
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.objects.len() == self.area()
    }

    /// All tiles in row-major order.
    pub fn tiles(&self) -> impl Iterator<Item = Position> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Position::new(x, y)))
    }

    pub fn free_tiles(&self) -> Vec<Position> {
        self.tiles().filter(|p| !self.is_occupied(*p)).collect()
    }

    /// Returns a copy with `id` at `pos`, or [`HouseError::Collision`] if the
    /// tile is taken.
    pub fn place(&self, catalog: &Catalog, id: &str, pos: Position) -> Result<Room, HouseError> {
        if !catalog.contains(id) {
            return Err(HouseError::UnknownObject(id.to_string()));
        }
        self.place_unchecked(id, pos)
    }

    pub(crate) fn place_unchecked(&self, id: &str, pos: Position) -> Result<Room, HouseError> {
        if !self.contains(pos) {
            return Err(HouseError::OutOfBounds(pos));
        }
        if self.is_occupied(pos) {
            return Err(HouseError::Collision(pos));
        }
        let mut next = self.clone();
        next.objects.insert(pos, id.to_string());
        Ok(next)
    }

    pub fn remove(&self, pos: Position) -> Result<Room, HouseError> {
        if !self.contains(pos) {
            return Err(HouseError::OutOfBounds(pos));
        }
        if !self.is_occupied(pos) {
            return Err(HouseError::EmptyTile(pos));
        }
        let mut next = self.clone();
        next.objects.remove(&pos);
        Ok(next)
    }

    /// Moves the object at `from` onto the free tile `to`.
    pub fn relocate(&self, from: Position, to: Position) -> Result<Room, HouseError> {
        let id = self
            .occupant(from)
            .ok_or(HouseError::EmptyTile(from))?
            .to_string();
        self.remove(from)?.place_unchecked(&id, to)
    }

    pub fn descriptor(&self, catalog: &Catalog) -> Descriptor {
        let mut counts = vec![0u32; catalog.len()];
        for id in self.objects.values() {
            if let Some(i) = catalog.index_of(id) {
                counts[i] += 1;
            }
        }
        Descriptor(counts)
    }

    /// Checks every placement id against the catalog.
    pub fn validate(&self, catalog: &Catalog) -> Result<(), HouseError> {
        match self.objects.values().find(|id| !catalog.contains(id)) {
            Some(id) => Err(HouseError::UnknownObject(id.clone())),
            None => Ok(()),
        }
    }

    pub fn render_ascii(&self, catalog: &Catalog) -> String {
        let mut out = String::with_capacity(((self.width + 1) * self.height) as usize);
        for y in 0..self.height {
            for x in 0..self.width {
                let c = match self.occupant(Position::new(x, y)) {
                    Some(id) => catalog.object(id).map_or('?', |o| o.display_char),
                    None => '.',
                };
                out.push(c);
            }
            out.push('\n');
        }
        out
    }
}

/// An ordered list of rooms; the unit of evolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct House {
    rooms: Vec<Room>,
}

impl House {
    pub fn new(rooms: Vec<Room>) -> Result<Self, HouseError> {
        if rooms.is_empty() {
            return Err(HouseError::NoRooms);
        }
        Ok(Self { rooms })
    }

    pub fn single(room: Room) -> Self {
        Self { rooms: vec![room] }
    }

    /// The minimal starting room: toilet, bed and fridge in a 7x7 room.
    pub fn seed(catalog: &Catalog) -> Result<Self, HouseError> {
        let mut room = Room::default_size();
        for (id, pos) in SEED_LAYOUT {
            if !catalog.contains(id) {
                return Err(HouseError::MissingObject(id.to_string()));
            }
            room = room.place(catalog, id, pos)?;
        }
        Ok(Self::single(room))
    }

    pub fn rooms(&self) -> &[Room] {
        &self.rooms
    }

    /// The first room; in-scope experiments use single-room houses.
    pub fn room(&self) -> &Room {
        &self.rooms[0]
    }

    pub fn with_room(&self, index: usize, room: Room) -> House {
        let mut next = self.clone();
        next.rooms[index] = room;
        next
    }

    pub fn object_count(&self) -> usize {
        self.rooms.iter().map(Room::len).sum()
    }

    /// Object counts summed over every room.
    pub fn descriptor(&self, catalog: &Catalog) -> Descriptor {
        let mut counts = vec![0u32; catalog.len()];
        for room in &self.rooms {
            for (c, n) in counts.iter_mut().zip(room.descriptor(catalog).0) {
                *c += n;
            }
        }
        Descriptor(counts)
    }

    pub fn validate(&self, catalog: &Catalog) -> Result<(), HouseError> {
        self.rooms.iter().try_for_each(|r| r.validate(catalog))
    }

    /// One `height`-line grid per room, rooms separated by a blank line.
    pub fn render_ascii(&self, catalog: &Catalog) -> String {
        self.rooms
            .iter()
            .map(|r| r.render_ascii(catalog))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn to_document(&self) -> HouseDocument {
        HouseDocument {
            rooms: self
                .rooms
                .iter()
                .map(|r| RoomDocument {
                    width: r.width,
                    height: r.height,
                    objects: r
                        .placements()
                        .map(|(p, id)| PlacementDocument {
                            id: id.to_string(),
                            x: p.x,
                            y: p.y,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &HouseDocument) -> Result<Self, HouseError> {
        let rooms = doc
            .rooms
            .iter()
            .map(|rd| {
                let mut room = Room::new(rd.width, rd.height)?;
                for p in &rd.objects {
                    room = room.place_unchecked(&p.id, Position::new(p.x, p.y))?;
                }
                Ok(room)
            })
            .collect::<Result<Vec<_>, HouseError>>()?;
        House::new(rooms)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("house serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, HouseError> {
        let doc: HouseDocument =
            serde_json::from_str(text).map_err(|e| HouseError::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }
}

/// Wire format: `{"rooms": [{"width", "height", "objects": [{"id", "x", "y"}]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseDocument {
    pub rooms: Vec<RoomDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomDocument {
    pub width: u32,
    pub height: u32,
    pub objects: Vec<PlacementDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementDocument {
    pub id: String,
    pub x: u32,
    pub y: u32,
}
