// Copyright 2026 The hmcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HMCAL_SO3_H_
#define HMCAL_SO3_H_

#include <Eigen/Core>

namespace hmcal::so3 {

Eigen::Matrix3d Hat(const Eigen::Vector3d& w);

// Rodrigues' formula. Exp(0) is exactly the identity.
Eigen::Matrix3d Exp(const Eigen::Vector3d& w);

// Axis-angle vector with norm in [0, pi].
Eigen::Vector3d Log(const Eigen::Matrix3d& r);

// Left Jacobian: Exp(w + d) ~= Exp(J_l(w) d) Exp(w) for small d.
Eigen::Matrix3d LeftJacobian(const Eigen::Vector3d& w);

// Geodesic distance between two rotations, radians in [0, pi].
double AngleBetween(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

}  // namespace hmcal::so3

#endif  // HMCAL_SO3_H_
