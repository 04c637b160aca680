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

#include "furrow/sim/log.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "furrow/errors.hpp"

namespace furrow::sim {

namespace {

// Shortest round-trippable decimal form; locale independent and stable, so
// identical runs produce byte-identical files.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  double parsed = 0.0;
  for (int prec = 1; prec <= 16; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof(probe), "%.*g", prec, v);
    std::sscanf(probe, "%lf", &parsed);
    if (parsed == v) {
      return probe;
    }
  }
  return buf;
}

const char* kBaseHeader =
    "t,x_true,y_true,theta_true,v_actual,omega_actual,mu_true,kappa_true,"
    "z_x,z_y,z_v,z_omega,valid_gnss,estimator_ready,"
    "x_hat,y_hat,theta_hat,v_hat,mu_hat,kappa_hat,"
    "x_ref,y_ref,theta_ref,omega_cmd,mhe_status,mpc_status";

const char* kTelemetryHeader =
    ",mhe_kkt,mhe_qp_iters,mhe_prep_ms,mhe_fb_ms,mpc_kkt,mpc_qp_iters,mpc_prep_ms,mpc_fb_ms";

}  // namespace

void SimLog::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out << kBaseHeader;
  if (with_telemetry) {
    out << kTelemetryHeader;
  }
  out << "\n";
  for (const auto& r : records) {
    out << fmt(r.t) << ',' << fmt(r.x_true) << ',' << fmt(r.y_true) << ',' << fmt(r.theta_true)
        << ',' << fmt(r.v_actual) << ',' << fmt(r.omega_actual) << ',' << fmt(r.mu_true) << ','
        << fmt(r.kappa_true) << ',' << fmt(r.z_x) << ',' << fmt(r.z_y) << ',' << fmt(r.z_v)
        << ',' << fmt(r.z_omega) << ',' << (r.valid_gnss ? 1 : 0) << ','
        << (r.estimator_ready ? 1 : 0) << ',' << fmt(r.x_hat) << ',' << fmt(r.y_hat) << ','
        << fmt(r.theta_hat) << ',' << fmt(r.v_hat) << ',' << fmt(r.mu_hat) << ','
        << fmt(r.kappa_hat) << ',' << fmt(r.x_ref) << ',' << fmt(r.y_ref) << ','
        << fmt(r.theta_ref) << ',' << fmt(r.omega_cmd) << ',' << r.mhe_status << ','
        << r.mpc_status;
    if (with_telemetry) {
      out << ',' << fmt(r.mhe_kkt) << ',' << r.mhe_qp_iters << ',' << fmt(r.mhe_prep_ms) << ','
          << fmt(r.mhe_fb_ms) << ',' << fmt(r.mpc_kkt) << ',' << r.mpc_qp_iters << ','
          << fmt(r.mpc_prep_ms) << ',' << fmt(r.mpc_fb_ms);
    }
    out << "\n";
  }
}

void SimLog::write_jsonl(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  for (const auto& r : records) {
    out << "{\"t\":" << fmt(r.t) << ",\"x_true\":" << fmt(r.x_true) << ",\"y_true\":"
        << fmt(r.y_true) << ",\"theta_true\":" << fmt(r.theta_true) << ",\"v_actual\":"
        << fmt(r.v_actual) << ",\"omega_actual\":" << fmt(r.omega_actual) << ",\"mu_true\":"
        << fmt(r.mu_true) << ",\"kappa_true\":" << fmt(r.kappa_true) << ",\"z_x\":" << fmt(r.z_x)
        << ",\"z_y\":" << fmt(r.z_y) << ",\"z_v\":" << fmt(r.z_v) << ",\"z_omega\":"
        << fmt(r.z_omega) << ",\"valid_gnss\":" << (r.valid_gnss ? "true" : "false")
        << ",\"estimator_ready\":" << (r.estimator_ready ? "true" : "false") << ",\"x_hat\":"
        << fmt(r.x_hat) << ",\"y_hat\":" << fmt(r.y_hat) << ",\"theta_hat\":" << fmt(r.theta_hat)
        << ",\"v_hat\":" << fmt(r.v_hat) << ",\"mu_hat\":" << fmt(r.mu_hat) << ",\"kappa_hat\":"
        << fmt(r.kappa_hat) << ",\"x_ref\":" << fmt(r.x_ref) << ",\"y_ref\":" << fmt(r.y_ref)
        << ",\"theta_ref\":" << fmt(r.theta_ref) << ",\"omega_cmd\":" << fmt(r.omega_cmd)
        << ",\"mhe_status\":" << r.mhe_status << ",\"mpc_status\":" << r.mpc_status;
    if (with_telemetry) {
      out << ",\"mhe_kkt\":" << fmt(r.mhe_kkt) << ",\"mhe_qp_iters\":" << r.mhe_qp_iters
          << ",\"mhe_prep_ms\":" << fmt(r.mhe_prep_ms) << ",\"mhe_fb_ms\":" << fmt(r.mhe_fb_ms)
          << ",\"mpc_kkt\":" << fmt(r.mpc_kkt) << ",\"mpc_qp_iters\":" << r.mpc_qp_iters
          << ",\"mpc_prep_ms\":" << fmt(r.mpc_prep_ms) << ",\"mpc_fb_ms\":" << fmt(r.mpc_fb_ms);
    }
    out << "}\n";
  }
}

SimLog SimLog::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open: " + path);
  }
  SimLog log;
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("empty log file: " + path);
  }
  log.with_telemetry = line.find("mhe_kkt") != std::string::npos;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      vals.push_back(std::stod(cell));
    }
    if (vals.size() < 26) {
      throw IoError("malformed log row: " + line);
    }
    LogRecord r;
    int i = 0;
    r.t = vals[i++];
    r.x_true = vals[i++];
    r.y_true = vals[i++];
    r.theta_true = vals[i++];
    r.v_actual = vals[i++];
    r.omega_actual = vals[i++];
    r.mu_true = vals[i++];
    r.kappa_true = vals[i++];
    r.z_x = vals[i++];
    r.z_y = vals[i++];
    r.z_v = vals[i++];
    r.z_omega = vals[i++];
    r.valid_gnss = vals[i++] != 0.0;
    r.estimator_ready = vals[i++] != 0.0;
    r.x_hat = vals[i++];
    r.y_hat = vals[i++];
    r.theta_hat = vals[i++];
    r.v_hat = vals[i++];
    r.mu_hat = vals[i++];
    r.kappa_hat = vals[i++];
    r.x_ref = vals[i++];
    r.y_ref = vals[i++];
    r.theta_ref = vals[i++];
    r.omega_cmd = vals[i++];
    r.mhe_status = static_cast<int>(vals[i++]);
    r.mpc_status = static_cast<int>(vals[i++]);
    if (log.with_telemetry && vals.size() >= 34) {
      r.mhe_kkt = vals[i++];
      r.mhe_qp_iters = static_cast<int>(vals[i++]);
      r.mhe_prep_ms = vals[i++];
      r.mhe_fb_ms = vals[i++];
      r.mpc_kkt = vals[i++];
      r.mpc_qp_iters = static_cast<int>(vals[i++]);
      r.mpc_prep_ms = vals[i++];
      r.mpc_fb_ms = vals[i++];
    }
    log.records.push_back(r);
  }
  return log;
}

void MeasurementLog::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  out << "t,x,y,v,omega,valid_gnss,omega_cmd\n";
  for (const auto& r : rows) {
    out << fmt(r.t) << ',' << fmt(r.x) << ',' << fmt(r.y) << ',' << fmt(r.v) << ','
        << fmt(r.omega) << ',' << (r.valid_gnss ? 1 : 0) << ',' << fmt(r.omega_cmd) << "\n";
  }
}

MeasurementLog MeasurementLog::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open: " + path);
  }
  MeasurementLog log;
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("empty measurement file: " + path);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      vals.push_back(std::stod(cell));
    }
    if (vals.size() < 7) {
      throw IoError("malformed measurement row: " + line);
    }
    log.rows.push_back({vals[0], vals[1], vals[2], vals[3], vals[4], vals[5] != 0.0, vals[6]});
  }
  return log;
}

}  // namespace furrow::sim
