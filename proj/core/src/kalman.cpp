#include "skytrack/kalman.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "skytrack/error.hpp"

namespace skytrack {

namespace {

using MeasurementMatrix = Eigen::Matrix<double, 4, 7>;
using MeasurementCov = Eigen::Matrix<double, 4, 4>;

StateMatrix transition() {
  StateMatrix f = StateMatrix::Identity();
  f(0, 4) = 1.0;
  f(1, 5) = 1.0;
  f(2, 6) = 1.0;
  return f;
}

MeasurementMatrix observation_model() {
  MeasurementMatrix h = MeasurementMatrix::Zero();
  h.leftCols<4>().setIdentity();
  return h;
}

StateMatrix process_noise(const KalmanNoise& n) {
  StateVector d;
  d << n.process_position_var, n.process_position_var, n.process_position_var,
      n.process_position_var, n.process_velocity_var, n.process_velocity_var,
      n.process_area_velocity_var;
  return d.asDiagonal();
}

MeasurementCov measurement_noise(const KalmanNoise& n) {
  Eigen::Vector4d d(n.measurement_center_var, n.measurement_center_var, n.measurement_shape_var,
                    n.measurement_shape_var);
  return d.asDiagonal();
}

}  // namespace

MeasurementVector box_to_measurement(const BoxCorners& box) {
  const double w = box.width();
  const double h = box.height();
  MeasurementVector z;
  z << box.x1 + 0.5 * w, box.y1 + 0.5 * h, w * h, w / h;
  return z;
}

BoxCorners state_to_box(const StateVector& mean) {
  const double s = mean(2);
  const double r = mean(3);
  if (!(s > 0.0) || !(r > 0.0)) {
    throw InvalidArgument("kalman state has non-positive area or aspect ratio");
  }
  const double w = std::sqrt(s * r);
  const double h = s / w;
  return {mean(0) - 0.5 * w, mean(1) - 0.5 * h, mean(0) + 0.5 * w, mean(1) + 0.5 * h};
}

KalmanBoxState kalman_init(const BoxCorners& box, const KalmanNoise& noise) {
  validate(box);
  KalmanBoxState k;
  k.mean.head<4>() = box_to_measurement(box);
  StateVector d;
  d << noise.init_position_var, noise.init_position_var, noise.init_position_var,
      noise.init_position_var, noise.init_velocity_var, noise.init_velocity_var,
      noise.init_velocity_var;
  k.covariance = d.asDiagonal();
  return k;
}

KalmanBoxState kalman_predict(const KalmanBoxState& k, const KalmanNoise& noise) {
  static const StateMatrix f = transition();
  KalmanBoxState out;
  out.mean = f * k.mean;
  if (out.mean(2) < noise.min_area) {
    out.mean(2) = noise.min_area;
    out.mean(6) = 0.0;
  }
  out.covariance = f * k.covariance * f.transpose() + process_noise(noise);
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

KalmanBoxState kalman_update(const KalmanBoxState& k, const BoxCorners& observation,
                             const KalmanNoise& noise) {
  if (!is_finite(observation)) throw InvalidArgument("invalid observation: non-finite coordinate");
  validate(observation);
  static const MeasurementMatrix h = observation_model();
  const MeasurementCov r = measurement_noise(noise);

  const MeasurementVector innovation = box_to_measurement(observation) - h * k.mean;
  const MeasurementCov s = h * k.covariance * h.transpose() + r;
  // K = P H^T S^-1, solved via S K^T = H P.
  const Eigen::Matrix<double, 7, 4> gain =
      s.ldlt().solve(h * k.covariance).transpose();

  KalmanBoxState out;
  out.mean = k.mean + gain * innovation;
  const StateMatrix i_kh = StateMatrix::Identity() - gain * h;
  out.covariance = i_kh * k.covariance * i_kh.transpose() + gain * r * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

}  // namespace skytrack
