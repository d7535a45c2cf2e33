#include "lumptrack/stream_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lumptrack/config_io.hpp"
#include "lumptrack/errors.hpp"

namespace lumptrack {

namespace {

using nlohmann::json;

json vecx_to_json(const VecX& v) {
  json j = json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

VecX vecx_from_json(const json& j) {
  VecX v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void write_stream_record(std::ostream& out, const StepInput& input) {
  json j;
  j["t"] = input.t;
  j["q"] = vecx_to_json(input.q_meas);
  if (input.q_cam_meas.size() > 0) j["q_cam"] = vecx_to_json(input.q_cam_meas);
  json cameras = json::array();
  for (const auto& cam : input.cameras) {
    json c;
    json points = json::array();
    for (const auto& p : cam.points) {
      points.push_back(json::array({p.uv.x(), p.uv.y(), p.confidence}));
    }
    c["points"] = points;
    if (!cam.point_labels.empty()) c["labels"] = cam.point_labels;
    json edges = json::array();
    for (const auto& e : cam.edges) {
      edges.push_back(json::array({e.rho, e.phi}));
    }
    c["edges"] = edges;
    cameras.push_back(c);
  }
  j["cameras"] = cameras;
  out << j.dump() << "\n";
}

std::vector<StepInput> read_stream(std::istream& in) {
  std::vector<StepInput> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ConfigError("stream line " + std::to_string(line_no) + ": " + e.what());
    }
    StepInput rec;
    rec.t = j.at("t").get<int>();
    rec.q_meas = vecx_from_json(j.at("q"));
    if (j.contains("q_cam")) rec.q_cam_meas = vecx_from_json(j["q_cam"]);
    for (const auto& c : j.at("cameras")) {
      CameraObservations obs;
      for (const auto& p : c.at("points")) {
        PointFeature f;
        f.uv = Vec2(p[0].get<double>(), p[1].get<double>());
        f.confidence = p.size() > 2 ? p[2].get<double>() : 1.0;
        obs.points.push_back(f);
      }
      if (c.contains("labels")) {
        obs.point_labels = c["labels"].get<std::vector<int>>();
      }
      for (const auto& e : c.at("edges")) {
        obs.edges.push_back({e[0].get<double>(), e[1].get<double>()});
      }
      rec.cameras.push_back(std::move(obs));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<StepInput> read_stream_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file);
  return read_stream(in);
}

void write_stream_file(const std::string& file, const std::vector<StepInput>& records) {
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file);
  for (const auto& r : records) write_stream_record(out, r);
}

void write_estimate_record(std::ostream& out, int t, const Estimate& estimate) {
  json j;
  j["t"] = t;
  j["w"] = json::array({estimate.lump.w.x(), estimate.lump.w.y(), estimate.lump.w.z()});
  j["b"] = json::array({estimate.lump.b.x(), estimate.lump.b.y(), estimate.lump.b.z()});
  j["e"] = vecx_to_json(estimate.joint_errors);
  if (estimate.cam_joint_errors.size() > 0) j["e_cam"] = vecx_to_json(estimate.cam_joint_errors);
  j["ess"] = estimate.ess_fraction;
  out << j.dump() << "\n";
}

std::vector<EstimateRecord> read_estimates(std::istream& in) {
  std::vector<EstimateRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    EstimateRecord rec;
    rec.t = j.at("t").get<int>();
    const auto w = j.at("w");
    const auto b = j.at("b");
    rec.estimate.lump.w = Vec3(w[0].get<double>(), w[1].get<double>(), w[2].get<double>());
    rec.estimate.lump.b = Vec3(b[0].get<double>(), b[1].get<double>(), b[2].get<double>());
    rec.estimate.joint_errors = vecx_from_json(j.at("e"));
    if (j.contains("e_cam")) rec.estimate.cam_joint_errors = vecx_from_json(j["e_cam"]);
    rec.estimate.ess_fraction = j.at("ess").get<double>();
    records.push_back(std::move(rec));
  }
  return records;
}

void write_meta_file(const std::string& file, const SimulationMeta& meta) {
  json truth = json::array();
  for (const auto& row : meta.truth) {
    json r;
    r["t"] = row.t;
    r["q_true"] = vecx_to_json(row.q_true);
    r["q_meas"] = vecx_to_json(row.q_meas);
    if (row.q_cam_true.size() > 0) {
      r["q_cam_true"] = vecx_to_json(row.q_cam_true);
      r["q_cam_meas"] = vecx_to_json(row.q_cam_meas);
    }
    r["lump"] = pose_to_json(row.true_lump);
    r["end"] = pose_to_json(row.true_end_pose.to_pose());
    truth.push_back(r);
  }
  json j{{"camera_mode", to_string(meta.camera_mode)},
         {"calibrated_base", transform_to_json(meta.calibrated_base)},
         {"calibration_error", pose_to_json(meta.calibration_error)},
         {"truth", truth}};
  std::ofstream out(file);
  if (!out) throw ConfigError("cannot write " + file);
  out << j.dump(2) << "\n";
}

SimulationMeta read_meta_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file);
  json j;
  in >> j;
  SimulationMeta meta;
  meta.camera_mode = camera_mode_from_string(j.at("camera_mode").get<std::string>());
  meta.calibrated_base = transform_from_json(j.at("calibrated_base"), "meta.calibrated_base");
  meta.calibration_error = pose_from_json(j.at("calibration_error"), "meta.calibration_error");
  for (const auto& r : j.at("truth")) {
    TruthRow row;
    row.t = r.at("t").get<int>();
    row.q_true = vecx_from_json(r.at("q_true"));
    row.q_meas = vecx_from_json(r.at("q_meas"));
    if (r.contains("q_cam_true")) {
      row.q_cam_true = vecx_from_json(r["q_cam_true"]);
      row.q_cam_meas = vecx_from_json(r["q_cam_meas"]);
    }
    row.true_lump = pose_from_json(r.at("lump"), "meta.truth.lump");
    row.true_end_pose = RigidTransform::from_pose(pose_from_json(r.at("end"), "meta.truth.end"));
    meta.truth.push_back(std::move(row));
  }
  return meta;
}

}  // namespace lumptrack
