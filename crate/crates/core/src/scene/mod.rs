//! Rooms, materials, obstacles and the floorplan generator.

pub mod generate;
pub mod io;
pub mod materials;
pub mod types;
pub mod validate;

pub use generate::{generate_scene, GenerationParams};
pub use io::{read_scene, scene_hash, write_scene};
pub use materials::{material_at_frequency, MaterialSpec};
pub use types::{
    AntennaPattern, Obstacle, ObstacleKind, PlacementRules, ReceiverGrid, Room, Scene, TransmitterSpec,
};
pub use validate::{validate_scene, Rule, Violation};
