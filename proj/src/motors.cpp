#include "traybot/motors.hpp"

#include <algorithm>
#include <cmath>

namespace traybot::motors {

namespace {

// Absorbs float noise from clock values assembled out of repeated dt adds;
// far below any meaningful tick size.
constexpr double kTimeSlackS = 1e-9;

double target_velocity(const DcMotorModel& model, logic::DriveCommand command) {
  switch (command) {
    case logic::DriveCommand::Forward: return model.target_speed_mm_s;
    case logic::DriveCommand::Reverse: return -model.target_speed_mm_s;
    case logic::DriveCommand::Stop: break;
  }
  return 0.0;
}

}  // namespace

DcTickResult dc_tick(DcMotorState state, const DcMotorModel& model,
                     logic::DriveCommand command, double dt_s) {
  if (!(dt_s > 0.0)) {
    throw InvalidTimestep("dt must be > 0");
  }
  const double v0 = state.velocity_mm_s;
  const double vt = target_velocity(model, command);

  double v1 = vt;
  double displacement_mm = vt * dt_s;
  if (model.time_constant_s > 0.0) {
    const double decay = std::exp(-dt_s / model.time_constant_s);
    v1 = vt + (v0 - vt) * decay;
    displacement_mm = vt * dt_s + (v0 - vt) * model.time_constant_s * (1.0 - decay);
  }

  // Work proxy: drag force times distance travelled (mm -> m), grossed up to
  // electrical joules by the motor efficiency.
  const double work_j = std::abs(displacement_mm) * 1e-3 * model.drag_constant_n;
  return {DcMotorState{v1}, displacement_mm, work_j / model.efficiency};
}

double torque_available(const StepperModel& model, double omega_rad_s) {
  if (omega_rad_s < 0.0) {
    throw NegativeSpeed("angular velocity must be >= 0");
  }
  if (omega_rad_s == 0.0) {
    return model.holding_torque_nm;
  }
  return std::min(model.rated_power_w / omega_rad_s, model.holding_torque_nm);
}

bool step_interval_elapsed(std::optional<double> last_step_time_s, double now_s,
                           const StepperModel& model) noexcept {
  if (!last_step_time_s) {
    return true;
  }
  return now_s - *last_step_time_s + kTimeSlackS >= 1.0 / model.max_step_rate_hz;
}

StepAttempt stepper_step(int current_angle_deg, logic::StepDirection direction,
                         std::optional<double> last_step_time_s, double now_s,
                         const StepperModel& model) {
  if (!logic::is_step_angle(current_angle_deg)) {
    throw NotAStepAngle("arm angle must be one of 0, 90, 180, 270 degrees");
  }
  if (!step_interval_elapsed(last_step_time_s, now_s, model)) {
    return RateLimited{};
  }
  const int delta = direction == logic::StepDirection::Clockwise ? 90 : 270;
  const int angle = (current_angle_deg + delta) % 360;
  return StepResult{angle, logic::phase_for_angle(angle)};
}

}  // namespace traybot::motors
