#pragma once

#include "czd/geometry.hpp"

namespace czd {

/// A scored detection. Boxes are in global pixel coordinates unless a crop
/// view says otherwise.
struct Detection {
  Box box;
  int category = 0;
  double score = 0.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// An annotated object. Objects flagged ignore take part in matching as
/// non-penalizing targets only.
struct GroundTruth {
  Box box;
  int category = 0;
  bool ignore = false;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

}  // namespace czd
