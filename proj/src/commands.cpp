#include "zmd/commands.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "zmd/config.hpp"
#include "zmd/error.hpp"

namespace zmd {

namespace {

std::string vec_str(const Eigen::VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    s += fmt::format("{}{:.9g}", i ? ", " : "", v(i));
  }
  return s + "]";
}

struct JobResult {
  int code = kExitOk;
  std::string out;
  std::string err;
};

JobResult run_one(const std::string& file, const RunOptions& opt) {
  JobResult res;
  ScenarioConfig cfg;
  try {
    cfg = load_scenario_file(file);
  } catch (const Error& e) {
    res.code = kExitBadInput;
    res.err = fmt::format("{}: {}\n", file, e.what());
    return res;
  }
  if (opt.seed) cfg.scenario.seed = *opt.seed;

  std::filesystem::path trace_path;
  if (opt.output) {
    trace_path = *opt.output;
  } else if (cfg.output) {
    trace_path = *cfg.output;
  } else {
    trace_path = std::filesystem::path(file).stem().string() + ".trace.csv";
  }

  SimResult sim;
  try {
    AllocationArtifacts art = analyze_allocation(cfg.platform);
    const double mass = cfg.platform.mass;
    HoverController ctrl(std::move(cfg.platform), std::move(art), cfg.gains, cfg.gravity);
    sim = run_scenario(ctrl, cfg.scenario);

    std::ofstream csv(trace_path);
    if (!csv) {
      res.code = kExitBadInput;
      res.err = fmt::format("{}: cannot write '{}'\n", file, trace_path.string());
      return res;
    }
    write_csv(csv, sim.trace);

    const TraceSummary sum = summarize(sim.trace, mass, cfg.gravity);
    std::string& o = res.out;
    o += fmt::format("scenario: {}\n", file);
    o += fmt::format("mode: {}\n", cfg.mode == SimMode::ideal ? "ideal" : "realistic");
    o += fmt::format("status: {}\n", sim.ok() ? std::string("ok")
                                               : fmt::format("aborted [{}] {}", to_string(*sim.error),
                                                             sim.error_message));
    o += fmt::format("samples: {}\n", sim.trace.records.size());
    o += fmt::format("settling_time_s: {}\n", sum.settling_time
                                                  ? fmt::format("{:.3f}", *sum.settling_time)
                                                  : std::string("not settled"));
    o += fmt::format("thrust_error: {:.6g}\n", sum.thrust_error);
    o += fmt::format("max_rotor_speed_hz: {:.6g}\n", sum.max_rotor_speed);
    if (sum.final_alignment) o += fmt::format("final_reference_alignment: {:.6g}\n", *sum.final_alignment);
    o += fmt::format("trace: {}{}\n", trace_path.string(), sim.ok() ? "" : " (partial)");
    if (!sim.ok()) res.code = kExitFailed;
  } catch (const Error& e) {
    res.code = kExitBadInput;
    res.err = fmt::format("{}: {}\n", file, e.what());
  }
  return res;
}

}  // namespace

int cmd_validate(const std::string& platform_file, std::ostream& out, std::ostream& err) {
  PlatformModel model;
  try {
    model = load_platform_file(platform_file);
  } catch (const Error& e) {
    fmt::print(err, "{}: {}\n", platform_file, e.what());
    return kExitBadInput;
  }
  const Assumption1Report rep = check_assumption1(model.force, model.moment);
  fmt::print(out, "platform: {} ({} rotors, mass {} kg)\n", platform_file, model.rotor_count(),
             model.mass);
  fmt::print(out, "rank(F) = {}\n", rep.rank_force);
  fmt::print(out, "rank(M) = {}\n", rep.rank_moment);
  fmt::print(out, "rank(M F_bar) = {}\n", rep.rank_moment_on_force_null);
  fmt::print(out, "rank(F M_bar) = {}\n", rep.rank_force_on_moment_null);
  if (!rep.holds) {
    fmt::print(out, "assumption1: violated\n");
    return kExitFailed;
  }
  try {
    const AllocationArtifacts art = analyze_allocation(model);
    const double fm = (model.force * art.moment_pinv).cwiseAbs().maxCoeff();
    const double mm = (model.moment * art.moment_pinv - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    fmt::print(out, "d_star = {}\n", vec_str(art.d_star));
    fmt::print(out, "u_bar = {}\n", vec_str(art.u_bar));
    fmt::print(out, "|M u_bar| = {:.3e}\n", (model.moment * art.u_bar).norm());
    fmt::print(out, "max|F M_K+| = {:.3e}\n", fm);
    fmt::print(out, "max|M M_K+ - I| = {:.3e}\n", mm);
    fmt::print(out, "hover inputs m g u_bar = {}\n", vec_str(kStandardGravity * model.mass * art.u_bar));
  } catch (const Error& e) {
    fmt::print(out, "assumption1: violated ({})\n", e.what());
    return kExitFailed;
  }
  fmt::print(out, "assumption1: holds\n");
  return kExitOk;
}

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err) {
  if (options.scenario_files.empty()) {
    fmt::print(err, "run: no scenario given\n");
    return kExitBadInput;
  }
  if (options.output && options.scenario_files.size() > 1) {
    fmt::print(err, "run: --out needs exactly one scenario\n");
    return kExitBadInput;
  }
  const std::size_t count = options.scenario_files.size();
  std::vector<JobResult> results(count);
  const auto workers = static_cast<std::size_t>(std::clamp<long>(options.jobs, 1, static_cast<long>(count)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      results[i] = run_one(options.scenario_files[i], options);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  int code = kExitOk;
  for (const JobResult& r : results) {
    out << r.out;
    err << r.err;
    code = std::max(code, r.code);
  }
  return code;
}

}  // namespace zmd
