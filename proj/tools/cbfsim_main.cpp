// cbfsim: certify barriers, solve h*, simulate scenarios, sweep (eps0, lambda).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "cbfsim/config.hpp"
#include "cbfsim/issf_filter.hpp"
#include "cbfsim/verification.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace cbfsim;

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3, kCertifyFailed = 4 };

struct Options {
  std::string config_path;
  std::string preset_name;
  std::string out_dir;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<double> delta;
  bool no_cross_term = false;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

Config resolve(const Options& o) {
  if (o.config_path.empty() == o.preset_name.empty()) {
    throw CLI::ValidationError("exactly one of --config or --preset is required");
  }
  Config c = o.config_path.empty() ? preset(o.preset_name) : load_config(o.config_path);
  if (o.dt) c.dt = *o.dt;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.delta) c.delta = *o.delta;
  if (o.no_cross_term) c.barrier_form = PendulumBarrierForm::kNoCrossTerm;
  if (!o.out_dir.empty()) c.output_dir = o.out_dir;
  c.validate();
  return c;
}

fs::path output_file(const Config& c, const std::string& stem) {
  fs::create_directories(c.output_dir);
  return fs::path(c.output_dir) / stem;
}

int cmd_certify(const Config& c) {
  CertificationReport rep;
  if (c.plant == PlantKind::kPendulum) {
    rep = certify_pendulum(c.pendulum.a, c.pendulum.b, c.pendulum.alpha_c, c.certify.theta_range, c.barrier_form,
                           c.certify.samples);
  } else {
    rep = certify_truck_grid(c.truck, c.truck.alpha_c, c.certify.d_range, c.certify.vl_range, c.certify.d_points,
                             c.certify.vl_points, Interval{-c.truck.a_under_l, c.truck.a_bar_l});
  }
  nlohmann::json j;
  j["name"] = c.name;
  j["method"] = rep.method;
  j["passed"] = rep.passed;
  j["note"] = rep.note;
  j["min_margin"] = rep.min_margin;
  j["witness"] = std::vector<double>(rep.witness.data(), rep.witness.data() + rep.witness.size());
  j["grid"] = nlohmann::json::array();
  for (const auto& ax : rep.grid) {
    j["grid"].push_back({{"axis", ax.name}, {"range", {ax.range.lower, ax.range.upper}}, {"points", ax.points}});
  }
  const fs::path path = output_file(c, c.name + "_certify.json");
  std::ofstream(path) << j.dump(2) << '\n';

  std::cout << "certify " << rep.method << ": " << (rep.passed ? "PASSED" : "FAILED") << " (" << rep.note
            << "), min_margin = " << fmt(rep.min_margin) << ", witness = [";
  for (Eigen::Index i = 0; i < rep.witness.size(); ++i) std::cout << (i ? ", " : "") << fmt(rep.witness(i));
  std::cout << "]\nreport: " << path.string() << '\n';
  return rep.passed ? kOk : kCertifyFailed;
}

struct HStarRow {
  double eps0;
  double lambda;
  double h_star = 0.0;
  std::string status = "ok";
};

HStarRow hstar_row(double alpha_c, double delta, double eps0, double lambda) {
  HStarRow row{eps0, lambda};
  try {
    row.h_star = solve_h_star(linear_class_kappa(alpha_c), EpsilonFunction::exponential(eps0, lambda), delta);
  } catch (const Error& e) {
    row.h_star = std::numeric_limits<double>::quiet_NaN();
    row.status = std::string("error: ") + e.what();
  }
  return row;
}

int write_hstar_table(const Config& c, const std::vector<HStarRow>& rows, const std::string& stem) {
  const fs::path path = output_file(c, c.name + "_" + stem + ".csv");
  std::ofstream out(path);
  const std::string delta = fmt(c.effective_delta());
  out << "eps0,lambda,delta,h_star,status\n";
  std::cout << "alpha_c = " << fmt(c.alpha_c()) << ", delta = " << delta << '\n';
  bool failed = false;
  for (const auto& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    out << fmt(r.eps0) << ',' << fmt(r.lambda) << ',' << delta << ',' << fmt(r.h_star) << ',' << status << '\n';
    std::cout << "  eps0 = " << fmt(r.eps0) << ", lambda = " << fmt(r.lambda) << "  ->  h* = " << fmt(r.h_star)
              << (r.status == "ok" ? "" : "  [" + r.status + "]") << '\n';
    failed = failed || r.status != "ok";
  }
  std::cout << "table: " << path.string() << '\n';
  return failed ? kRuntime : kOk;
}

int cmd_hstar(const Config& c) {
  std::vector<HStarPoint> points = c.sweep.points;
  if (points.empty()) {
    for (const auto& cc : c.controllers) {
      if (cc.kind == ControllerKind::kIssf) points.push_back({cc.eps0, cc.lambda});
    }
  }
  if (points.empty()) throw ConfigError("$.sweep.points", "no (eps0, lambda) points and no issf controllers");
  std::vector<HStarRow> rows;
  for (const auto& p : points) rows.push_back(hstar_row(c.alpha_c(), c.effective_delta(), p.eps0, p.lambda));
  return write_hstar_table(c, rows, "hstar");
}

int cmd_sweep(const Config& c) {
  if (c.sweep.eps0_grid.empty()) throw ConfigError("$.sweep.eps0_grid", "must not be empty");
  if (c.sweep.lambda_grid.empty()) throw ConfigError("$.sweep.lambda_grid", "must not be empty");
  const std::size_t nl = c.sweep.lambda_grid.size();
  const std::size_t total = c.sweep.eps0_grid.size() * nl;
  std::vector<HStarRow> rows(total);
  const std::size_t workers = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
  std::vector<std::future<void>> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t k = w; k < total; k += workers) {
        rows[k] = hstar_row(c.alpha_c(), c.effective_delta(), c.sweep.eps0_grid[k / nl], c.sweep.lambda_grid[k % nl]);
      }
    }));
  }
  for (auto& f : pool) f.get();
  return write_hstar_table(c, rows, "sweep");
}

void print_summary_line(std::ostream& os, const ScenarioResult& r) {
  os << r.name << ": h_min = " << fmt(r.h_min);
  if (r.h_star) os << ", h* = " << fmt(*r.h_star);
  if (r.d_ss_tilde) os << ", D_ss_tilde = " << fmt(*r.d_ss_tilde);
  if (!r.clamp_events.empty()) os << ", clamp events = " << r.clamp_events.size();
  os << '\n';
  for (const auto& w : r.warnings) os << "  warning: " << w << '\n';
}

int cmd_simulate(const Config& c) {
  if (c.controllers.empty()) throw ConfigError("$.controllers", "must not be empty");
  const std::vector<Scenario> scenarios = build_scenarios(c);

  std::vector<std::future<ScenarioResult>> jobs;
  for (const auto& s : scenarios) jobs.push_back(std::async(std::launch::async, run_scenario, std::cref(s)));

  int status = kOk;
  const fs::path summary_path = output_file(c, c.name + "_summary.csv");
  std::ofstream summary(summary_path);
  summary << "scenario,controller,h_min,h_star,d_ss_tilde,clamp_events,status\n";
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const std::string& label = scenarios[i].controller.label;
    const fs::path path = output_file(c, scenarios[i].name + ".csv");
    try {
      const ScenarioResult r = jobs[i].get();
      std::ofstream out(path);
      write_result_csv(out, r);
      print_summary_line(std::cout, r);
      summary << r.name << ',' << label << ',' << fmt(r.h_min) << ',' << (r.h_star ? fmt(*r.h_star) : "") << ','
              << (r.d_ss_tilde ? fmt(*r.d_ss_tilde) : "") << ',' << r.clamp_events.size() << ",ok\n";
    } catch (const IntegrationError& e) {
      std::ofstream out(path);
      if (e.partial()) write_result_csv(out, *e.partial());
      out << "# error: " << e.what() << '\n';
      std::cerr << scenarios[i].name << ": integration failed: " << e.what() << " (partial log flushed)\n";
      summary << scenarios[i].name << ',' << label << ",,,,,integration error\n";
      status = kRuntime;
    }
    std::cout << "  log: " << path.string() << '\n';
  }
  std::cout << "summary: " << summary_path.string() << '\n';
  return status;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "Scenario JSON file");
  cmd->add_option("--preset", o.preset_name, "Embedded preset name");
  cmd->add_option("--out", o.out_dir, "Output directory (overrides output_dir)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CBF / ISSf safety filter toolkit"};
  app.require_subcommand(0, 1);
  Options o;
  std::string dump_name;
  bool list = false;
  app.add_option("--dump-preset", dump_name, "Print a preset as JSON and exit");
  app.add_flag("--list-presets", list, "List embedded presets and exit");

  CLI::App* certify = app.add_subcommand("certify", "Check L_g h = 0 => L_f h + alpha(h) > 0 on a grid");
  add_common(certify, o);
  certify->add_flag("--no-cross-term", o.no_cross_term, "Pendulum: use h without the cross term");

  CLI::App* hstar = app.add_subcommand("hstar", "Solve h + gamma(h, delta) = 0 for listed (eps0, lambda)");
  add_common(hstar, o);
  hstar->add_option("--delta", o.delta, "Disturbance bound");

  CLI::App* simulate = app.add_subcommand("simulate", "Run the configured scenarios and write CSV logs");
  add_common(simulate, o);
  simulate->add_option("--dt", o.dt, "Integration step [s]");
  simulate->add_option("--horizon", o.horizon, "Horizon [s]");

  CLI::App* sweep = app.add_subcommand("sweep", "h* over the eps0 x lambda grid");
  add_common(sweep, o);
  sweep->add_option("--delta", o.delta, "Disturbance bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (list) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
      return kOk;
    }
    if (!dump_name.empty()) {
      std::cout << dump_config(preset(dump_name)) << '\n';
      return kOk;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return kUsage;
    }
    const Config c = resolve(o);
    if (certify->parsed()) return cmd_certify(c);
    if (hstar->parsed()) return cmd_hstar(c);
    if (simulate->parsed()) return cmd_simulate(c);
    return cmd_sweep(c);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kValidation;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
