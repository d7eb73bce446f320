//! Music-driven swarm painting.
//!
//! A symbolic score is reduced to chords and tempo ([`music`]), chords are
//! mapped to emotions, colours and chord-wheel positions ([`emotion`]), and a
//! swarm of differential-drive robots realises the resulting colour densities
//! with heterogeneous Voronoi coverage control ([`coverage`]) while leaving
//! CMY pigment trails on a canvas ([`sim`]).

pub mod coverage;
pub mod emotion;
pub mod geometry;
pub mod music;
pub mod sim;

pub use geometry::Vec2;
