#pragma once

#include "shellflux/qf15.hpp"

namespace shellflux {

// Frequency directions F and amplitude directions V of the three-wave
// skeleton, together with their images under the two rotations that tilt the
// carrier plane by pi/3 and 2pi/3. Everything is exact in Q(sqrt(15)).
//
// Index convention: F[j][i-1], j in {0,1,2} the rotation, i in {1,2,3} the
// wave. normal[j] is the unit normal of the rotated carrier plane P_j.
struct SkeletonData {
  Vec3X F[3][3];
  Vec3X V[3][3];
  Vec3X normal[3];
  Mat3X rot[3];  // rot[j] = R^j

  const Vec3X& freq(int j, int i) const { return F[j][i - 1]; }
  const Vec3X& amp(int j, int i) const { return V[j][i - 1]; }
};

// Builds the exact skeleton; throws std::logic_error if any structural
// invariant fails (orthogonality F.V = 0, |F| values, closure F1+F2=F3).
SkeletonData make_skeleton(bool rotations_enabled = true);

// The rotation by pi/3 around the line {x1 + 2 x2 = 0, x3 = 0}.
Mat3X rotation_matrix();

}  // namespace shellflux
