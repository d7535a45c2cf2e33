#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lumptrack/filter.hpp"
#include "lumptrack/simulator.hpp"

namespace lumptrack {

/// Line-delimited replay format: one JSON record per timestep carrying the
/// measured joints, the camera-arm joints when present, and the per-camera
/// point/edge detections.
void write_stream_record(std::ostream& out, const StepInput& input);
std::vector<StepInput> read_stream(std::istream& in);
std::vector<StepInput> read_stream_file(const std::string& file);
void write_stream_file(const std::string& file, const std::vector<StepInput>& records);

/// Estimates are emitted line-delimited as {t, w, b, e, ess}.
void write_estimate_record(std::ostream& out, int t, const Estimate& estimate);

struct EstimateRecord {
  int t = 0;
  Estimate estimate;
};
std::vector<EstimateRecord> read_estimates(std::istream& in);

/// Sidecar written next to a simulated stream: the calibration handed to the
/// filter plus per-step ground truth (without the feature batches, which
/// live in the stream itself).
struct SimulationMeta {
  CameraMode camera_mode = CameraMode::Stationary;
  RigidTransform calibrated_base{};
  AxisAnglePose calibration_error;
  std::vector<TruthRow> truth;
};
void write_meta_file(const std::string& file, const SimulationMeta& meta);
SimulationMeta read_meta_file(const std::string& file);

/// Shortest round-trip decimal representation; the CSV and JSONL writers use
/// it so identical runs serialize bit-for-bit identically.
std::string format_double(double value);

}  // namespace lumptrack
