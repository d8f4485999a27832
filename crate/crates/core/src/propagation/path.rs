use serde::{Deserialize, Serialize};

use crate::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionKind {
    Reflect,
    TransmitIn,
    TransmitOut,
    Diffract,
}

/// Geometry an interaction happens on: a facet id or an edge id of the
/// prepared scene geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    Facet(usize),
    Edge(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub kind: InteractionKind,
    pub point: Vec3,
    pub reference: Reference,
    /// Angle to the surface normal; for diffraction, the angle to the edge.
    pub incidence_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Medium {
    Air,
    Obstacle(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayPath {
    pub tx: Vec3,
    pub rx: Vec3,
    pub interactions: Vec<Interaction>,
    pub total_length: f64,
    /// One entry per segment, `interactions.len() + 1` in total.
    pub segment_media: Vec<Medium>,
}

/// Interaction counts `(reflections, transmissions, diffractions)`; a
/// transmission is one pass through an obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub reflections: usize,
    pub transmissions: usize,
    pub diffractions: usize,
}

impl RayPath {
    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for i in &self.interactions {
            match i.kind {
                InteractionKind::Reflect => c.reflections += 1,
                InteractionKind::TransmitIn => c.transmissions += 1,
                InteractionKind::Diffract => c.diffractions += 1,
                InteractionKind::TransmitOut => {}
            }
        }
        c
    }

    pub fn is_los(&self) -> bool {
        self.interactions.is_empty()
    }

    /// Ordered vertices: transmitter, every interaction point, receiver.
    pub fn vertices(&self) -> Vec<Vec3> {
        let mut v = Vec::with_capacity(self.interactions.len() + 2);
        v.push(self.tx);
        v.extend(self.interactions.iter().map(|i| i.point));
        v.push(self.rx);
        v
    }

    /// Identity of the path: its reflection and diffraction sequence.
    /// Transmissions follow from the geometry and are left out.
    pub fn signature(&self) -> Vec<Reference> {
        self.interactions
            .iter()
            .filter(|i| matches!(i.kind, InteractionKind::Reflect | InteractionKind::Diffract))
            .map(|i| i.reference)
            .collect()
    }

    pub fn delay_s(&self) -> f64 {
        self.total_length / crate::propagation::field::C0
    }
}
