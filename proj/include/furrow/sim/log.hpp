// Copyright 2026 The Furrow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>
#include <vector>

namespace furrow::sim {

/// One closed-loop sample: ground truth, sensed values, estimates,
/// references and the applied command, plus optional solver telemetry.
struct LogRecord {
  double t = 0.0;

  double x_true = 0.0, y_true = 0.0, theta_true = 0.0;
  double v_actual = 0.0, omega_actual = 0.0;
  double mu_true = 1.0, kappa_true = 1.0;

  double z_x = 0.0, z_y = 0.0, z_v = 0.0, z_omega = 0.0;
  bool valid_gnss = true;

  bool estimator_ready = false;
  double x_hat = 0.0, y_hat = 0.0, theta_hat = 0.0;
  double v_hat = 0.0, mu_hat = 1.0, kappa_hat = 1.0;

  double x_ref = 0.0, y_ref = 0.0, theta_ref = 0.0;
  double omega_cmd = 0.0;

  int mhe_status = 0;
  int mpc_status = 0;

  // telemetry (written only when the scenario enables it)
  double mhe_kkt = 0.0, mpc_kkt = 0.0;
  int mhe_qp_iters = 0, mpc_qp_iters = 0;
  double mhe_prep_ms = 0.0, mhe_fb_ms = 0.0, mpc_prep_ms = 0.0, mpc_fb_ms = 0.0;
};

struct SimLog {
  std::vector<LogRecord> records;
  bool with_telemetry = false;

  void write_csv(const std::string& path) const;
  void write_jsonl(const std::string& path) const;
  static SimLog read_csv(const std::string& path);
};

/// Standalone measurement stream (input of the estimate mode):
/// t,x,y,v,omega,valid_gnss,omega_cmd.
struct MeasurementLog {
  struct Row {
    double t, x, y, v, omega;
    bool valid_gnss;
    double omega_cmd;
  };
  std::vector<Row> rows;

  void write_csv(const std::string& path) const;
  static MeasurementLog read_csv(const std::string& path);
};

}  // namespace furrow::sim
