//! Scene files: pretty-printed JSON with fixed field order.

use std::path::Path;

use crate::error::{Error, Result};
use crate::formats::{atomic_write, sha256_hex};
use crate::scene::materials;
use crate::scene::types::{Scene, SCENE_VERSION};

pub fn scene_to_string(s: &Scene) -> String {
    let mut text = serde_json::to_string_pretty(s).expect("scene serializes");
    text.push('\n');
    text
}

/// Content hash of the canonical serialization.
pub fn scene_hash(s: &Scene) -> String {
    sha256_hex(scene_to_string(s).as_bytes())
}

pub fn scene_from_str(text: &str, origin: &str) -> Result<Scene> {
    let parse = |message: String| Error::Parse {
        path: origin.to_string(),
        message,
    };
    let s: Scene = serde_json::from_str(text).map_err(|e| parse(e.to_string()))?;
    if s.version != SCENE_VERSION {
        return Err(parse(format!(
            "field `version`: unsupported scene version {} (expected {SCENE_VERSION})",
            s.version
        )));
    }
    let room = [
        ("room.wall_material", &s.room.wall_material),
        ("room.floor_material", &s.room.floor_material),
        ("room.ceiling_material", &s.room.ceiling_material),
    ];
    for (field, name) in room {
        if materials::by_name(name).is_none() {
            return Err(parse(format!("field `{field}`: unknown material '{name}'")));
        }
    }
    for (i, o) in s.obstacles.iter().enumerate() {
        if materials::by_name(&o.material).is_none() {
            return Err(parse(format!(
                "field `obstacles[{i}].material`: unknown material '{}'",
                o.material
            )));
        }
    }
    Ok(s)
}

pub fn write_scene(s: &Scene, path: &Path) -> Result<()> {
    atomic_write(path, scene_to_string(s).as_bytes())
}

pub fn read_scene(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    scene_from_str(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::generate::{generate_scene, GenerationParams};

    #[test]
    fn round_trip_is_identity() {
        let s = generate_scene(11, &GenerationParams::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("scene.json");
        write_scene(&s, &p).unwrap();
        let back = read_scene(&p).unwrap();
        assert_eq!(back, s);
        assert_eq!(scene_to_string(&back), std::fs::read_to_string(&p).unwrap());
    }

    #[test]
    fn truncated_file_is_a_parse_error() {
        let text = scene_to_string(&Scene::empty(5.0));
        let cut = &text[..text.len() / 2];
        match scene_from_str(cut, "cut.json") {
            Err(Error::Parse { message, .. }) => assert!(message.contains("line"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_material_is_named() {
        let s = generate_scene(2, &GenerationParams::default()).unwrap();
        let text = scene_to_string(&s).replacen(&format!("\"{}\"", s.obstacles[0].material), "\"marble\"", 1);
        match scene_from_str(&text, "x.json") {
            Err(Error::Parse { message, .. }) => assert!(message.contains("marble"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_field_is_named() {
        let text = scene_to_string(&Scene::empty(5.0)).replace("\"frequency_ghz\"", "\"freq\"");
        match scene_from_str(&text, "x.json") {
            Err(Error::Parse { message, .. }) => assert!(message.contains("frequency_ghz"), "{message}"),
            other => panic!("{other:?}"),
        }
    }
}
