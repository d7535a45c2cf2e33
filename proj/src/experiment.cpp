#include "lumptrack/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "lumptrack/errors.hpp"
#include "lumptrack/stream_io.hpp"

namespace lumptrack {

namespace {

std::uint64_t trial_seed(std::uint64_t base, int trial, std::uint64_t role) {
  return detail::mix64(detail::mix64(base ^ (0x9e3779b97f4a7c15ULL * (trial + 1))) ^ role);
}

struct TrialOutput {
  std::vector<ResultRow> rows;
  TrialRecord record;
};

TrialOutput run_trial(const ExperimentSpec& spec, int trial) {
  TrialOutput out;
  out.record.trial = trial;
  SceneSimulator simulator(spec.scenario, trial_seed(spec.seed, trial, 0x5157));
  TrackerSetup setup;
  setup.chain = spec.scenario.chain;
  setup.rig = spec.scenario.rig;
  setup.camera_mode = spec.scenario.camera_mode;
  setup.calibrated_base = simulator.calibrated_base();
  setup.camera_chain = spec.scenario.camera_chain;
  ParticleTracker tracker(setup, spec.filter, trial_seed(spec.seed, trial, 0xF117));
  out.record.injected_calibration_error = simulator.calibration_error().to_pose();

  const int n_b = spec.scenario.chain.n_b;
  const int n_j = spec.scenario.chain.joint_count();
  const int tracked_offset = tracker.effective_nb();
  double base_eps_b_sum = 0.0;
  double base_eps_w_sum = 0.0;
  int post_burn_in = 0;

  for (int t = 0; t < spec.scenario.trajectory.steps; ++t) {
    TruthRow row = simulator.step();
    StepInput input;
    input.t = row.t;
    input.q_meas = row.q_meas;
    input.q_cam_meas = row.q_cam_meas;
    input.cameras = row.batches;
    Estimate est;
    try {
      est = tracker.update(input);
    } catch (const DegenerateFilterError&) {
      out.record.degenerate = true;
      break;
    }
    ResultRow r;
    r.trial = trial;
    r.t = t;
    const PoseError pe = pose_error(row.true_end_pose, tracker.estimated_end_pose(est, input));
    r.eps_b = pe.translation_mm;
    r.eps_w = pe.rotation_rad;
    r.eps_q = VecX::Zero(n_j - n_b);
    for (int i = n_b; i < n_j; ++i) {
      double e_hat = 0.0;
      if (tracker.tracked_error_count() > 0) {
        e_hat = est.joint_errors[i - tracked_offset];
      }
      r.eps_q[i - n_b] = std::abs(row.q_meas[i] + e_hat - row.q_true[i]);
    }
    r.ess = est.ess_fraction;
    const auto [n_pts, n_edges] = tracker.count_matches(est, input);
    r.n_points = n_pts;
    r.n_edges = n_edges;
    out.rows.push_back(std::move(r));

    if (t >= spec.burn_in) {
      const PoseError base_err = pose_error(simulator.calibration_error(),
                                            RigidTransform::from_pose(est.lump));
      base_eps_b_sum += base_err.translation_mm;
      base_eps_w_sum += base_err.rotation_rad;
      out.record.base_error_samples.push_back(base_err.translation_mm);
      ++post_burn_in;
    }
  }
  if (post_burn_in > 0) {
    out.record.base_translation_error_mm = base_eps_b_sum / post_burn_in;
    out.record.base_rotation_error_rad = base_eps_w_sum / post_burn_in;
  }
  return out;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (trials < 1) throw ConfigError("experiment: trials must be >= 1");
  if (burn_in < 0) throw ConfigError("experiment: burn_in must be >= 0");
  scenario.validate();
  filter.validate();
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult result;
  result.steps = spec.scenario.trajectory.steps;
  const int n_b = spec.scenario.chain.n_b;
  const int n_j = spec.scenario.chain.joint_count();
  for (int i = n_b; i < n_j; ++i) {
    result.eps_q_names.push_back("eps_q" + std::to_string(i + 1));
  }

  const unsigned workers =
      std::max(1u, std::min(std::thread::hardware_concurrency(), 8u));
  std::vector<std::future<TrialOutput>> futures;
  futures.reserve(spec.trials);
  for (int trial = 0; trial < spec.trials; ++trial) {
    if (workers > 1) {
      futures.push_back(
          std::async(std::launch::async, [&spec, trial] { return run_trial(spec, trial); }));
    } else {
      std::promise<TrialOutput> p;
      p.set_value(run_trial(spec, trial));
      futures.push_back(p.get_future());
    }
  }
  for (auto& f : futures) {
    TrialOutput out = f.get();
    result.trials.push_back(out.record);
    result.rows.insert(result.rows.end(), out.rows.begin(), out.rows.end());
  }
  return result;
}

SummaryStats compute_stats(std::vector<double> values) {
  SummaryStats s;
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  const auto quantile = [&values](double q) {
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - lo;
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  s.median = quantile(0.5);
  s.q25 = quantile(0.25);
  s.q75 = quantile(0.75);
  s.iqr = s.q75 - s.q25;
  return s;
}

ExperimentSummary summarize(const ExperimentResult& result, int burn_in) {
  std::vector<double> eps_b, eps_w;
  std::vector<std::vector<double>> eps_q(result.eps_q_names.size());
  for (const auto& row : result.rows) {
    if (row.t < burn_in) continue;
    eps_b.push_back(row.eps_b);
    eps_w.push_back(row.eps_w);
    for (std::size_t i = 0; i < eps_q.size(); ++i) eps_q[i].push_back(row.eps_q[i]);
  }
  if (eps_b.empty()) {
    throw InvalidInputError("summarize: burn-in leaves no rows (burn_in = " +
                            std::to_string(burn_in) + ", steps = " +
                            std::to_string(result.steps) + ")");
  }
  ExperimentSummary summary;
  summary.rows_used = static_cast<int>(eps_b.size());
  summary.eps_b = compute_stats(std::move(eps_b));
  summary.eps_w = compute_stats(std::move(eps_w));
  for (auto& q : eps_q) summary.eps_q.push_back(compute_stats(std::move(q)));
  std::vector<double> base_errors;
  for (const auto& trial : result.trials) {
    if (trial.degenerate) continue;
    base_errors.insert(base_errors.end(), trial.base_error_samples.begin(),
                       trial.base_error_samples.end());
  }
  summary.base_translation_error = compute_stats(std::move(base_errors));
  return summary;
}

void write_result_csv(std::ostream& out, const ExperimentResult& result) {
  out << "trial,t,eps_b,eps_w";
  for (const auto& name : result.eps_q_names) out << "," << name;
  out << ",ess,n_pts,n_edges\n";
  for (const auto& row : result.rows) {
    out << row.trial << "," << row.t << "," << format_double(row.eps_b) << ","
        << format_double(row.eps_w);
    for (int i = 0; i < row.eps_q.size(); ++i) out << "," << format_double(row.eps_q[i]);
    out << "," << format_double(row.ess) << "," << row.n_points << "," << row.n_edges << "\n";
  }
}

std::string result_csv_string(const ExperimentResult& result) {
  std::ostringstream out;
  write_result_csv(out, result);
  return out.str();
}

void write_summary(std::ostream& out, const ExperimentSummary& summary,
                   const ExperimentResult& result) {
  const auto print = [&out](const char* name, const SummaryStats& s) {
    out << name << ": mean=" << format_double(s.mean) << " median=" << format_double(s.median)
        << " iqr=" << format_double(s.iqr) << "\n";
  };
  out << "rows used: " << summary.rows_used << "\n";
  print("eps_b (mm)", summary.eps_b);
  print("eps_w (rad)", summary.eps_w);
  for (std::size_t i = 0; i < summary.eps_q.size(); ++i) {
    print(result.eps_q_names[i].c_str(), summary.eps_q[i]);
  }
  print("base translation error over trials (mm)", summary.base_translation_error);
  int degenerate = 0;
  for (const auto& t : result.trials) degenerate += t.degenerate ? 1 : 0;
  if (degenerate > 0) out << "degenerate trials: " << degenerate << "\n";
}

}  // namespace lumptrack
