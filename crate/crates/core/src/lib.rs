//! Combinatorial and algebraic engine for nuclei, log transforms, knot
//! surgery, W-modifications and Stein handlebodies of 4-manifolds, with
//! certificates separating families of homeomorphic, non-diffeomorphic
//! members.

pub mod exotica;
pub mod handlebody;
pub mod intlat;
pub mod legendrian;
pub mod surgery;
pub mod swadj;
