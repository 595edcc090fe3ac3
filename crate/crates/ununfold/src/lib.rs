//! Construction, unfolding, and exhaustive verification of edge-ununfoldable
//! triangulated polyhedra.
//!
//! The library builds a small zoo of triangulated surfaces whose every
//! edge unfolding self-overlaps — "hats" (nine-triangle pyramids with
//! negatively curved shoulder vertices), the caltrop (a tetrahedron with a
//! hat erected on each face), and two parametric families whose minimum
//! piece counts grow with a refinement parameter. It can:
//!
//! * build those surfaces with certified geometric properties
//!   ([`constructions`]),
//! * cut any triangulated surface along a set of edges and develop the
//!   resulting pieces isometrically into the plane ([`unfold`]),
//! * classify planar triangle interactions with float, interval, and exact
//!   rational arithmetic ([`predicates`]), and
//! * prove overlap statements exhaustively by enumerating every dual
//!   spanning tree of a small disk, cross-checked against the matrix-tree
//!   theorem ([`verify`]).
//!
//! Meshes, cut sets, renderings, and machine-readable reports move through
//! the text formats in [`io`].

pub mod constructions;
pub mod io;
pub mod mesh;
pub mod predicates;
pub mod unfold;
pub mod verify;

pub use mesh::{EdgeId, FaceId, HatId, SurfaceMesh, VertexId};
pub use predicates::Mode;
