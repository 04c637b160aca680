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

#include "furrow/track/io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "furrow/errors.hpp"

namespace furrow::track {

namespace {
using nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open for writing: " + path);
  }
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open: " + path);
  }
  return in;
}
}  // namespace

void write_detections_jsonl(const std::string& path,
                            const std::vector<FrameDetections>& frames) {
  auto out = open_out(path);
  for (const auto& fd : frames) {
    ordered_json j;
    j["frame"] = fd.frame;
    j["t"] = fd.t;
    auto boxes = ordered_json::array();
    for (const auto& b : fd.boxes) {
      boxes.push_back({{"cx", b.cx}, {"cy", b.cy}, {"w", b.w}, {"h", b.h}, {"score", b.score}});
    }
    j["boxes"] = std::move(boxes);
    out << j.dump() << "\n";
  }
}

std::vector<FrameDetections> read_detections_jsonl(const std::string& path) {
  auto in = open_in(path);
  std::vector<FrameDetections> frames;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError("bad detection JSONL line: " + std::string(e.what()));
    }
    FrameDetections fd;
    fd.frame = j.at("frame").get<int>();
    fd.t = j.value("t", 0.0);
    for (const auto& b : j.at("boxes")) {
      BoundingBox box;
      box.cx = b.at("cx").get<double>();
      box.cy = b.at("cy").get<double>();
      box.w = b.at("w").get<double>();
      box.h = b.at("h").get<double>();
      box.score = b.value("score", 1.0);
      fd.boxes.push_back(box);
    }
    frames.push_back(std::move(fd));
  }
  return frames;
}

void write_truth_jsonl(const std::string& path, const std::vector<TruthFrame>& truth) {
  auto out = open_out(path);
  for (const auto& tf : truth) {
    ordered_json j;
    j["frame"] = tf.frame;
    j["t"] = tf.t;
    auto objs = ordered_json::array();
    for (const auto& o : tf.objects) {
      objs.push_back({{"id", o.id},
                      {"cx", o.box.cx},
                      {"cy", o.box.cy},
                      {"w", o.box.w},
                      {"h", o.box.h},
                      {"dx", o.dx},
                      {"dy", o.dy}});
    }
    j["objects"] = std::move(objs);
    out << j.dump() << "\n";
  }
}

std::vector<TruthFrame> read_truth_jsonl(const std::string& path) {
  auto in = open_in(path);
  std::vector<TruthFrame> truth;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw IoError("bad truth JSONL line: " + std::string(e.what()));
    }
    TruthFrame tf;
    tf.frame = j.at("frame").get<int>();
    tf.t = j.value("t", 0.0);
    for (const auto& o : j.at("objects")) {
      TruthObject ob;
      ob.id = o.at("id").get<int>();
      ob.box.cx = o.at("cx").get<double>();
      ob.box.cy = o.at("cy").get<double>();
      ob.box.w = o.at("w").get<double>();
      ob.box.h = o.at("h").get<double>();
      ob.dx = o.at("dx").get<double>();
      ob.dy = o.at("dy").get<double>();
      tf.objects.push_back(ob);
    }
    truth.push_back(std::move(tf));
  }
  return truth;
}

void write_count_json(const std::string& path, const CountResult& result) {
  auto out = open_out(path);
  ordered_json j;
  j["count"] = result.count;
  auto events = ordered_json::array();
  for (const auto& e : result.events) {
    const char* type = "";
    switch (e.type) {
      case CountEvent::Type::created: type = "created"; break;
      case CountEvent::Type::matched: type = "matched"; break;
      case CountEvent::Type::counted: type = "counted"; break;
      case CountEvent::Type::removed: type = "removed"; break;
    }
    events.push_back({{"type", type},
                      {"frame", e.frame},
                      {"track", e.track_id},
                      {"detection", e.detection_index}});
  }
  j["events"] = std::move(events);
  out << j.dump(2) << "\n";
}

}  // namespace furrow::track
