//
// Exception types raised by the engine. Every error derives from
// bsurf::error so callers can catch the whole family at once.
//

#ifndef BSURF_ERRORS_HPP
#define BSURF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bsurf {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input could not be parsed (OBJ, JSON, SVG).
struct parse_error : error {
  using error::error;
};
struct non_manifold_error : error {
  using error::error;
};
struct not_watertight_error : error {
  using error::error;
};
struct invalid_face_error : error {
  using error::error;
};
// A mesh point whose barycentric coordinates are outside the face.
struct invalid_point_error : error {
  using error::error;
};
// The graph search found no route between two points.
struct unreachable_error : error {
  using error::error;
};
struct degenerate_strip_error : error {
  using error::error;
};
struct iteration_cap_error : error {
  using error::error;
};
// A geodesic extension during point insertion grew beyond the polygon scale.
struct extension_unstable_error : error {
  using error::error;
};
struct invalid_argument_error : error {
  using error::error;
};

}  // namespace bsurf

#endif
