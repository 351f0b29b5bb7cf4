#pragma once

#include <optional>
#include <stdexcept>
#include <variant>

#include "traybot/drive_logic.hpp"
#include "traybot/errors.hpp"

// Time-domain actuator models: the geared brushed-DC base drive, the
// 90-degree-per-step arm stepper, and the electrical energy ledger.
// All functions are pure state transitions.

namespace traybot::motors {

/// Base drive reduced to a first-order speed response,
///   v' = v_target + (v - v_target) * exp(-dt / tau),
/// solved exactly so results do not depend on how an interval is subdivided.
struct DcMotorModel {
  double target_speed_mm_s = 100.0;  ///< ground speed at full drive, through gearing
  double time_constant_s = 0.5;      ///< tau; 0 means instantaneous response
  double efficiency = 0.775;         ///< electrical -> mechanical, in (0, 1]
  double drag_constant_n = 0.05;     ///< work-proxy force resisting base motion
};

struct DcMotorState {
  double velocity_mm_s = 0.0;  ///< signed; positive = forward
};

struct DcTickResult {
  DcMotorState state;
  double displacement_mm = 0.0;
  double energy_j = 0.0;  ///< electrical joules drawn over the tick
};

/// Advance the base motor by one tick under a drive command.
/// Throws InvalidTimestep when dt <= 0.
DcTickResult dc_tick(DcMotorState state, const DcMotorModel& model,
                     logic::DriveCommand command, double dt_s);

/// Arm motor: four detents per revolution, rate-limited full steps.
struct StepperModel {
  static constexpr double kStepAngleDeg = 90.0;
  double max_step_rate_hz = 2.0;
  double rated_power_w = 10.0;
  double holding_torque_nm = 5.0;
};

/// Torque from the constant-power curve (power = omega * torque), capped at
/// holding torque so the curve stays finite near standstill.
/// Throws NegativeSpeed when omega < 0.
double torque_available(const StepperModel& model, double omega_rad_s);

struct StepResult {
  int angle_deg;
  logic::StepperPhase phase;
};

/// The step-rate interval has not elapsed; the caller retries next tick.
struct RateLimited {};

using StepAttempt = std::variant<RateLimited, StepResult>;

/// True when enough time has passed since the previous step. A motor that
/// has never stepped may always step.
bool step_interval_elapsed(std::optional<double> last_step_time_s, double now_s,
                           const StepperModel& model) noexcept;

/// Try to advance the arm one detent in the given direction. Succeeds only
/// when the step-rate interval has elapsed. Throws NotAStepAngle when the
/// current angle is not a detent.
StepAttempt stepper_step(int current_angle_deg, logic::StepDirection direction,
                         std::optional<double> last_step_time_s, double now_s,
                         const StepperModel& model);

/// Per-consumer electrical energy account. The total is the breakdown sum
/// and can only grow.
class EnergyLedger {
 public:
  void add_base(double joules) { add(base_j_, joules); }
  void add_stepper(double joules) { add(stepper_j_, joules); }
  void add_gripper(double joules) { add(gripper_j_, joules); }

  double base_j() const noexcept { return base_j_; }
  double stepper_j() const noexcept { return stepper_j_; }
  double gripper_j() const noexcept { return gripper_j_; }
  double total_j() const noexcept { return base_j_ + stepper_j_ + gripper_j_; }

 private:
  static void add(double& slot, double joules) {
    if (!(joules >= 0.0)) {
      throw std::invalid_argument("energy increment must be >= 0");
    }
    slot += joules;
  }

  double base_j_ = 0.0;
  double stepper_j_ = 0.0;
  double gripper_j_ = 0.0;
};

}  // namespace traybot::motors
