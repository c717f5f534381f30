//! Bundled example graphs.
//!
//! `video-example` has four media interfaces (Video1, Video2, Video3, Audio)
//! and six adapters between them. Every adapter lists its full dependency
//! table. Video1toVideo2 maps each `playVideo` container to the codecs it can
//! carry (MOV to MP4; AVI to INDEO and DIVX; MKV to MP4, DIVX and THEORA) and
//! leaves the other Video2 methods unimplementable. The remaining adapters
//! carry hand-written illustrative tables.

use crate::document::parse_document;
use crate::model::AdapterGraph;

pub const VIDEO_EXAMPLE_NAME: &str = "video-example";

pub const VIDEO_EXAMPLE: &str = include_str!("../fixtures/video-example.json");

/// Source text of a bundled graph.
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        VIDEO_EXAMPLE_NAME => Some(VIDEO_EXAMPLE),
        _ => None,
    }
}

pub fn video_example() -> AdapterGraph {
    parse_document(VIDEO_EXAMPLE).expect("bundled fixture is valid")
}
