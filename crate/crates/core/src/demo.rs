//! The bundled takeover-defense knowledge base and the Mobil–Marathon world.

use crate::dsl::{parse_kb, parse_world};
use crate::knowledge::{KnowledgeBase, World};

pub const KB: &str = include_str!("../data/demo.kb");
pub const WORLD: &str = include_str!("../data/m1.world");

pub fn knowledge_base() -> KnowledgeBase {
    parse_kb(KB).expect("bundled knowledge base parses")
}

pub fn world() -> World {
    parse_world(WORLD).expect("bundled world parses")
}
