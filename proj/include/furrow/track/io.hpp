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

#include "furrow/track/counter.hpp"
#include "furrow/track/synth.hpp"

namespace furrow::track {

/// Detection stream JSON Lines: one {"frame", "t", "boxes": [...]} per line.
void write_detections_jsonl(const std::string& path, const std::vector<FrameDetections>& frames);
std::vector<FrameDetections> read_detections_jsonl(const std::string& path);

/// Ground-truth sidecar emitted next to synthetic streams.
void write_truth_jsonl(const std::string& path, const std::vector<TruthFrame>& truth);
std::vector<TruthFrame> read_truth_jsonl(const std::string& path);

/// Count result JSON: {"count": C, "events": [...]}.
void write_count_json(const std::string& path, const CountResult& result);

}  // namespace furrow::track
