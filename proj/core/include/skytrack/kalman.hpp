#pragma once

// Constant-velocity Kalman filter over a box state
//   [cx, cy, s, r, vcx, vcy, vs]
// where s is the box area and r the (constant) aspect ratio w/h. The
// measurement is [cx, cy, s, r].

#include <Eigen/Core>

#include "skytrack/geometry.hpp"

namespace skytrack {

using StateVector = Eigen::Matrix<double, 7, 1>;
using StateMatrix = Eigen::Matrix<double, 7, 7>;
using MeasurementVector = Eigen::Matrix<double, 4, 1>;

/// Noise magnitudes. Defaults are the reference SORT constants.
struct KalmanNoise {
  // Diagonal of the initial covariance.
  double init_position_var = 10.0;
  double init_velocity_var = 10000.0;
  // Diagonal of the process noise.
  double process_position_var = 1.0;
  double process_velocity_var = 0.01;
  double process_area_velocity_var = 0.0001;
  // Diagonal of the measurement noise.
  double measurement_center_var = 1.0;
  double measurement_shape_var = 10.0;
  // Floor on the predicted area.
  double min_area = 1e-6;
};

struct KalmanBoxState {
  StateVector mean = StateVector::Zero();
  StateMatrix covariance = StateMatrix::Identity();
};

MeasurementVector box_to_measurement(const BoxCorners& box);

/// Box implied by the state's [cx, cy, s, r]. Requires s > 0 and r > 0.
BoxCorners state_to_box(const StateVector& mean);

/// Fresh state at the observed box with zero velocity.
KalmanBoxState kalman_init(const BoxCorners& box, const KalmanNoise& noise = {});

/// One constant-velocity step. The predicted area is floored at noise.min_area
/// and its velocity zeroed when the floor is hit.
KalmanBoxState kalman_predict(const KalmanBoxState& k, const KalmanNoise& noise = {});

/// Joseph-form correction against an observed box. Throws InvalidArgument on
/// a non-finite observation.
KalmanBoxState kalman_update(const KalmanBoxState& k, const BoxCorners& observation,
                             const KalmanNoise& noise = {});

}  // namespace skytrack
