#include "aiedet/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "aiedet/config.hpp"
#include "aiedet/dataset_io.hpp"

namespace aiedet {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExperimentConfig resolve_config(const CommandOptions& opt) {
  ExperimentConfig cfg;
  if (opt.config) {
    cfg = load_config(*opt.config);
  } else {
    cfg.validate();
  }
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.workers == 0) throw ConfigError("--workers must be at least 1");
  return cfg;
}

json config_json(const ExperimentConfig& cfg) {
  json det = json::array();
  for (Detector d : cfg.detectors) det.push_back(std::string(to_string(d)));
  return json{
      {"scenario", {{"N", cfg.clutter.n}, {"K", cfg.clutter.k}, {"L", cfg.clutter.l},
                    {"p", cfg.clutter.p}}},
      {"clutter", {{"delta", cfg.clutter.delta}, {"shape_v", cfg.clutter.shape_v},
                   {"scale_u", cfg.clutter.scale_u}}},
      {"signal", {{"scr_db", cfg.scr_db}, {"scattering", std::string(to_string(cfg.scattering))},
                  {"subspace_f0", cfg.subspace.f0}, {"subspace_df", cfg.subspace.df}}},
      {"detection", {{"detectors", det}, {"pfa", cfg.pfa},
                     {"threshold_trials", cfg.threshold_trials}, {"pd_trials", cfg.pd_trials}}},
      {"aie", {{"n_max", cfg.aie.n_max}, {"sigma_floor", cfg.aie.sigma_floor}}},
      {"anmf", {{"re_iterations", cfg.re_iterations}}},
      {"run", {{"seed", cfg.seed}}},
  };
}

class Run {
 public:
  Run(std::string command, const CommandOptions& opt, const ExperimentConfig& cfg)
      : command_(std::move(command)), opt_(opt), cfg_(cfg),
        start_(std::chrono::steady_clock::now()) {
    std::error_code ec;
    fs::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + opt.out_dir.string());
  }

  void write_file(const std::string& name, const std::string& content) {
    const fs::path path = opt_.out_dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw IoError("cannot write " + path.string());
    outputs_.push_back(name);
  }

  json& extra() { return extra_; }

  void finish(std::ostream& log) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m{{"command", command_},
           {"tool_version", AIEDET_VERSION},
           {"seed", cfg_.seed},
           {"workers", opt_.workers},
           {"wall_clock_seconds", seconds},
           {"config_path", opt_.config ? opt_.config->string() : std::string()},
           {"config", config_json(cfg_)},
           {"outputs", outputs_}};
    for (auto& [k, v] : extra_.items()) m[k] = v;
    const std::string name = command_ + "_manifest.json";
    const fs::path path = opt_.out_dir / name;
    std::ofstream out(path, std::ios::binary);
    out << m.dump(2) << '\n';
    if (!out) throw IoError("cannot write " + path.string());
    for (const auto& o : outputs_) log << (opt_.out_dir / o).string() << '\n';
    log << path.string() << '\n';
  }

 private:
  std::string command_;
  const CommandOptions& opt_;
  const ExperimentConfig& cfg_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::string> outputs_;
  json extra_ = json::object();
};

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": '" + s + "' is not a number");
  }
  if (used != s.size()) throw ConfigError(what + ": '" + s + "' is not a number");
  return v;
}

std::string thresholds_csv(const Thresholds& th) {
  std::string out = "detector,threshold,pfa_target,pfa_achieved,trials,seed\n";
  for (const auto& [d, r] : th) {
    out += std::string(to_string(d)) + "," + num17(r.threshold) + "," + num17(r.pfa_target) +
           "," + num17(r.pfa_achieved) + "," + std::to_string(r.trials) + "," +
           std::to_string(r.seed) + "\n";
  }
  return out;
}

Thresholds load_thresholds(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open thresholds file " + path.string());
  std::string line;
  if (!std::getline(in, line) ||
      line != "detector,threshold,pfa_target,pfa_achieved,trials,seed") {
    throw ConfigError(path.string() + ": unexpected thresholds header");
  }
  Thresholds th;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto f = split(line, ',');
    if (f.size() != 6) throw ConfigError(where + ": expected 6 fields");
    const auto d = detector_from_string(f[0]);
    if (!d) throw ConfigError(where + ": unknown detector '" + f[0] + "'");
    ThresholdRecord r;
    r.detector = *d;
    r.threshold = parse_number(f[1], where);
    r.pfa_target = parse_number(f[2], where);
    r.pfa_achieved = parse_number(f[3], where);
    r.trials = static_cast<std::size_t>(parse_number(f[4], where));
    r.seed = std::stoull(f[5]);
    th[*d] = r;
  }
  return th;
}

Thresholds thresholds_for(const ExperimentConfig& cfg, const CommandOptions& opt,
                          std::ostream& log) {
  if (opt.thresholds) {
    Thresholds th = load_thresholds(*opt.thresholds);
    for (Detector d : cfg.detectors) {
      if (!th.contains(d)) {
        throw ConfigError(opt.thresholds->string() + ": no threshold for detector " +
                          std::string(to_string(d)));
      }
    }
    return th;
  }
  log << "calibrating thresholds on " << cfg.threshold_trials << " H0 trials\n";
  return calibrate_thresholds(cfg, RngRoot{cfg.seed, StreamPurpose::Calibration}, opt.workers);
}

json thresholds_json(const Thresholds& th) {
  json out = json::object();
  for (const auto& [d, r] : th) {
    out[std::string(to_string(d))] = {{"threshold", r.threshold},
                                      {"pfa_target", r.pfa_target},
                                      {"pfa_achieved", r.pfa_achieved},
                                      {"trials", r.trials},
                                      {"seed", r.seed}};
  }
  return out;
}

template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidParameter& e) {
    log << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DatasetError& e) {
    log << "dataset error: " << e.what() << '\n';
    return kExitDataset;
  } catch (const MonteCarloFailure& e) {
    log << "numerical failure (detector " << to_string(e.detector()) << ", trial " << e.trial()
        << "): " << e.what() << '\n';
    return kExitNumerical;
  } catch (const FactorizationFailure& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DegenerateSample& e) {
    log << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const IoError& e) {
    log << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    log << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace

std::vector<double> parse_delta_list(std::string_view text) {
  std::vector<double> out;
  const std::string s(text);
  if (s.empty()) throw ConfigError("empty delta list");
  if (s.find(':') != std::string::npos) {
    const auto f = split(s, ':');
    if (f.size() != 3) throw ConfigError("delta range must be start:step:stop");
    const double start = parse_number(f[0], "delta range");
    const double step = parse_number(f[1], "delta range");
    const double stop = parse_number(f[2], "delta range");
    if (!(step > 0.0) || !(stop >= start)) {
      throw ConfigError("delta range needs step > 0 and stop >= start");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    for (const auto& f : split(s, ',')) out.push_back(parse_number(f, "delta list"));
  }
  for (double d : out) {
    if (!(d >= 0.0 && d < 1.0)) {
      throw ConfigError("delta " + num17(d) + " outside [0, 1)");
    }
  }
  return out;
}

int cmd_curve(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig cfg = resolve_config(opt);
    if (cfg.scr_db.empty()) throw ConfigError("signal.scr_db is empty; nothing to sweep");
    Run run("curve", opt, cfg);
    const Curves curves =
        pd_vs_scr_curve(cfg, RngRoot{cfg.seed, StreamPurpose::Calibration}, opt.workers);
    for (const auto& [d, points] : curves) {
      std::string csv = "scr_db,pd,ci_low,ci_high,trials\n";
      for (const auto& p : points) {
        csv += num17(p.scr_db) + "," + num17(p.pd) + "," + num17(p.ci_low) + "," +
               num17(p.ci_high) + "," + std::to_string(p.trials) + "\n";
      }
      run.write_file("curve_" + std::string(to_string(d)) + ".csv", csv);
    }
    run.finish(log);
    return int{kExitOk};
  });
}

int cmd_cfar(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig cfg = resolve_config(opt);
    const std::vector<double> deltas =
        opt.deltas.empty() ? std::vector<double>{cfg.clutter.delta} : parse_delta_list(opt.deltas);
    Run run("cfar", opt, cfg);
    const RngRoot root{cfg.seed, StreamPurpose::Calibration};
    const Thresholds th = thresholds_for(cfg, opt, log);
    const CfarTable table = cfar_sweep(cfg, th, deltas, root.with(StreamPurpose::CfarSweep),
                                       opt.workers);
    std::string csv = "detector,delta,achieved_pfa,ci_low,ci_high\n";
    for (const auto& [d, rows] : table) {
      for (const auto& r : rows) {
        csv += std::string(to_string(d)) + "," + num17(r.delta) + "," + num17(r.rate) + "," +
               num17(r.ci_low) + "," + num17(r.ci_high) + "\n";
      }
    }
    run.write_file("cfar.csv", csv);
    run.extra()["thresholds"] = thresholds_json(th);
    run.finish(log);
    return int{kExitOk};
  });
}

int cmd_calibrate(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig cfg = resolve_config(opt);
    Run run("calibrate", opt, cfg);
    const Thresholds th =
        calibrate_thresholds(cfg, RngRoot{cfg.seed, StreamPurpose::Calibration}, opt.workers);
    run.write_file("thresholds.csv", thresholds_csv(th));
    run.finish(log);
    return int{kExitOk};
  });
}

int cmd_detect(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig cfg = resolve_config(opt);
    if (opt.data.empty()) throw ConfigError("detect needs --data");
    if (!fs::exists(opt.data)) throw IoError("dataset file not found: " + opt.data.string());
    const ExternalDataset ds = load_dataset(opt.data);
    const DetectionInput& in = ds.input;
    const auto& c = cfg.clutter;
    if (in.n() != c.n || in.k() != c.k || in.l() != c.l || in.p() != c.p) {
      std::ostringstream os;
      os << "dataset shape N=" << in.n() << " K=" << in.k() << " L=" << in.l()
         << " P=" << in.p() << " does not match config N=" << c.n << " K=" << c.k
         << " L=" << c.l << " p=" << c.p;
      throw DatasetError(opt.data.string(), 1, 1, os.str());
    }
    Run run("detect", opt, cfg);
    const Thresholds th = thresholds_for(cfg, opt, log);

    bool any_aie = false;
    for (Detector d : cfg.detectors) {
      any_aie = any_aie || d == Detector::AieGlrt || d == Detector::AieRao ||
                d == Detector::AieWald;
    }
    std::optional<EstimationResult> est;
    if (any_aie) est = aie_estimate(in, cfg.aie);

    json results = json::array();
    for (Detector d : cfg.detectors) {
      DetectorStatistic s;
      switch (d) {
        case Detector::AieGlrt: s = aie_glrt(in, *est); break;
        case Detector::AieRao: s = aie_rao(in, *est); break;
        case Detector::AieWald: s = aie_wald(in, *est); break;
        case Detector::AnmfRe: s = anmf_re(in, cfg.re_iterations); break;
        case Detector::EnergyControl: s = energy_control(in); break;
      }
      const double threshold = th.at(d).threshold;
      results.push_back({{"detector", std::string(to_string(d))},
                         {"statistic", s.value},
                         {"log_domain", s.log_domain},
                         {"threshold", threshold},
                         {"decision", s.value >= threshold ? "H1" : "H0"}});
    }
    json report{{"dataset", opt.data.string()},
                {"source", ds.source},
                {"shape", {{"N", in.n()}, {"K", in.k()}, {"L", in.l()}, {"P", in.p()}}},
                {"results", results}};
    if (est) {
      report["aie_iterations"] = {{"n_max", cfg.aie.n_max},
                                  {"delta_r_h1", est->delta_r_h1},
                                  {"delta_r_h0", est->delta_r_h0},
                                  {"delta_r_diff_h1", est->delta_r_diff_h1},
                                  {"delta_r_diff_h0", est->delta_r_diff_h0}};
    }
    run.write_file("detect.json", report.dump(2) + "\n");
    run.extra()["thresholds"] = thresholds_json(th);
    run.finish(log);
    for (const auto& r : results) {
      log << r["detector"].get<std::string>() << ": " << r["decision"].get<std::string>() << '\n';
    }
    return int{kExitOk};
  });
}

int cmd_generate(const CommandOptions& opt, std::ostream& log) {
  return guarded(log, [&] {
    const ExperimentConfig cfg = resolve_config(opt);
    Run run("generate", opt, cfg);
    const SignalSpec spec{db_to_linear(opt.scr_db), cfg.scattering};
    const CMatrix h = cfg.subspace.build(cfg.clutter.n, cfg.clutter.p);
    auto streams = TrialStreams::make(RngRoot{cfg.seed, StreamPurpose::Fixture}, opt.trial);
    const DetectionInput in = generate_dataset(cfg.clutter, h, spec, opt.hypothesis, streams);
    std::ostringstream source;
    source << "synthetic " << (opt.hypothesis == Hypothesis::H1 ? "H1" : "H0")
           << " scr_db=" << num17(opt.scr_db) << " seed=" << cfg.seed << " trial=" << opt.trial;
    std::ostringstream body;
    write_dataset(body, in, source.str());
    run.write_file("dataset.hcd", body.str());
    run.extra()["hypothesis"] = opt.hypothesis == Hypothesis::H1 ? "H1" : "H0";
    run.extra()["scr_db"] = opt.scr_db;
    run.extra()["trial"] = opt.trial;
    run.finish(log);
    return int{kExitOk};
  });
}

int run_command(std::string_view name, const CommandOptions& opt, std::ostream& log) {
  if (name == "curve") return cmd_curve(opt, log);
  if (name == "cfar") return cmd_cfar(opt, log);
  if (name == "calibrate") return cmd_calibrate(opt, log);
  if (name == "detect") return cmd_detect(opt, log);
  if (name == "generate") return cmd_generate(opt, log);
  log << "unknown command '" << name << "'\n";
  return kExitConfig;
}

}  // namespace aiedet
