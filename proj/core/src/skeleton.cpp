#include "shellflux/skeleton.hpp"

#include <stdexcept>

namespace shellflux {

namespace {

QF15 q(long a10, long b10) {
  // Entry (a10 + b10*sqrt(15)) / 10.
  return {Rat(a10, 10), Rat(b10, 10)};
}

void require(bool ok, const char* what) {
  if (!ok) throw std::logic_error(std::string("skeleton invariant failed: ") + what);
}

}  // namespace

Mat3X rotation_matrix() {
  Mat3X r;
  // Columns of (1/10) [[9,-2,-s],[-2,6,-2s],[s,2s,5]], s = sqrt(15).
  r.col[0] = {q(9, 0), q(-2, 0), q(0, 1)};
  r.col[1] = {q(-2, 0), q(6, 0), q(0, 2)};
  r.col[2] = {q(0, -1), q(0, -2), q(5, 0)};
  return r;
}

SkeletonData make_skeleton(bool rotations_enabled) {
  SkeletonData s;
  const Mat3X R = rotation_matrix();
  s.rot[0] = Mat3X::identity();
  s.rot[1] = rotations_enabled ? R : Mat3X::identity();
  s.rot[2] = rotations_enabled ? R.mul(R) : Mat3X::identity();

  const Vec3X F0[3] = {{QF15(0), QF15(1), QF15(0)},
                       {QF15(2), QF15(0), QF15(0)},
                       {QF15(2), QF15(1), QF15(0)}};
  const Vec3X V0[3] = {{QF15(1), QF15(0), QF15(0)},
                       {QF15(0), QF15(1), QF15(0)},
                       {QF15(-1), QF15(2), QF15(0)}};
  const Vec3X e3 = {QF15(0), QF15(0), QF15(1)};

  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      s.F[j][i] = s.rot[j].apply(F0[i]);
      s.V[j][i] = s.rot[j].apply(V0[i]);
    }
    s.normal[j] = s.rot[j].apply(e3);
  }

  static const long expected_f2[3] = {1, 4, 5};
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      require(dot(s.F[j][i], s.V[j][i]).is_zero(), "F.V = 0");
      require(norm2(s.F[j][i]) == QF15(expected_f2[i]), "|F|^2 in {1,4,5}");
    }
    require(s.F[j][0] + s.F[j][1] - s.F[j][2] == Vec3X{QF15(0), QF15(0), QF15(0)},
            "F1 + F2 = F3");
    require(norm2(s.normal[j]) == QF15(1), "unit plane normal");
  }
  return s;
}

}  // namespace shellflux
