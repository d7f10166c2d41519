//! Lossless 2-D geometry: GLC-L and DSC polylines, scenes and SVG output.

pub mod dsc;
pub mod glcl;
pub mod scene;
pub mod separation;
pub mod svg;

pub use dsc::{dsc_polyline, dsc_reconstruct, DscConfig, DscMode};
pub use glcl::{build_polyline, endpoint_height, reconstruct_point, Polyline};
pub use scene::{build_scene, dsc_scene, scene_to_json, Scene, SceneMode, ScenePolyline};
pub use separation::{separate_hyperblocks, separating_attributes, SeparationTransform};
pub use svg::render_svg;
