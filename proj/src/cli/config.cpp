#include "aiedet/config.hpp"

#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <toml.hpp>

namespace aiedet {
namespace {

const std::map<std::string, std::set<std::string, std::less<>>, std::less<>> kSchema{
    {"scenario", {"N", "K", "L", "p"}},
    {"clutter", {"delta", "shape_v", "scale_u"}},
    {"signal", {"scr_db", "scattering", "subspace_f0", "subspace_df"}},
    {"detection", {"detectors", "pfa", "threshold_trials", "pd_trials"}},
    {"aie", {"n_max", "sigma_floor"}},
    {"anmf", {"re_iterations"}},
    {"run", {"seed"}},
};

std::string where(const toml::node& node) {
  const auto& src = node.source();
  std::ostringstream os;
  os << " (line " << src.begin.line << ", column " << src.begin.column << ")";
  return os.str();
}

class Section {
 public:
  Section(const toml::table* tbl, std::string name) : tbl_(tbl), name_(std::move(name)) {}

  const toml::node* find(std::string_view key) const {
    return tbl_ ? tbl_->get(key) : nullptr;
  }

  std::int64_t integer(std::string_view key, std::int64_t fallback) const {
    const toml::node* n = find(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<std::int64_t>()) return *v;
    throw ConfigError(label(key) + " must be an integer" + where(*n));
  }

  std::int64_t positive(std::string_view key, std::int64_t fallback) const {
    const std::int64_t v = integer(key, fallback);
    if (v < 1) throw ConfigError(label(key) + " must be positive");
    return v;
  }

  double real(std::string_view key, double fallback) const {
    const toml::node* n = find(key);
    if (!n) return fallback;
    if (auto v = n->value<double>()) return *v;
    throw ConfigError(label(key) + " must be a number" + where(*n));
  }

  std::string label(std::string_view key) const { return name_ + "." + std::string(key); }

 private:
  const toml::table* tbl_;
  std::string name_;
};

Scattering scattering_from(const std::string& s) {
  if (s == "uniform_deterministic") return Scattering::UniformDeterministic;
  if (s == "uniform_random_phase") return Scattering::UniformRandomPhase;
  throw ConfigError("signal.scattering must be \"uniform_deterministic\" or "
                    "\"uniform_random_phase\", got \"" + s + "\"");
}

ExperimentConfig build(const toml::table& root) {
  for (const auto& [key, node] : root) {
    const auto it = kSchema.find(key.str());
    if (it == kSchema.end()) {
      throw ConfigError("unknown section [" + std::string(key.str()) + "]" + where(node));
    }
    const toml::table* tbl = node.as_table();
    if (!tbl) throw ConfigError("[" + std::string(key.str()) + "] must be a table" + where(node));
    for (const auto& [inner, value] : *tbl) {
      if (!it->second.contains(inner.str())) {
        throw ConfigError("unknown key " + std::string(key.str()) + "." +
                          std::string(inner.str()) + where(value));
      }
    }
  }

  auto section = [&](const char* name) { return Section(root[name].as_table(), name); };
  ExperimentConfig cfg;

  const Section scenario = section("scenario");
  cfg.clutter.n = scenario.positive("N", cfg.clutter.n);
  cfg.clutter.k = scenario.positive("K", cfg.clutter.k);
  cfg.clutter.l = scenario.positive("L", cfg.clutter.l);
  cfg.clutter.p = scenario.positive("p", cfg.clutter.p);

  const Section clutter = section("clutter");
  cfg.clutter.delta = clutter.real("delta", cfg.clutter.delta);
  cfg.clutter.shape_v = clutter.real("shape_v", cfg.clutter.shape_v);
  cfg.clutter.scale_u = clutter.real("scale_u", cfg.clutter.scale_u);

  const Section signal = section("signal");
  if (const toml::node* n = signal.find("scr_db")) {
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError("signal.scr_db must be an array" + where(*n));
    for (const toml::node& e : *arr) {
      auto v = e.value<double>();
      if (!v) throw ConfigError("signal.scr_db entries must be numbers" + where(e));
      cfg.scr_db.push_back(*v);
    }
  }
  if (const toml::node* n = signal.find("scattering")) {
    auto s = n->value<std::string>();
    if (!s) throw ConfigError("signal.scattering must be a string" + where(*n));
    cfg.scattering = scattering_from(*s);
  }
  cfg.subspace.f0 = signal.real("subspace_f0", cfg.subspace.f0);
  cfg.subspace.df = signal.real("subspace_df", cfg.subspace.df);

  const Section detection = section("detection");
  if (const toml::node* n = detection.find("detectors")) {
    const toml::array* arr = n->as_array();
    if (!arr) throw ConfigError("detection.detectors must be an array" + where(*n));
    cfg.detectors.clear();
    for (const toml::node& e : *arr) {
      auto name = e.value<std::string>();
      if (!name) throw ConfigError("detection.detectors entries must be strings" + where(e));
      auto d = detector_from_string(*name);
      if (!d) throw ConfigError("unknown detector \"" + *name + "\"" + where(e));
      cfg.detectors.push_back(*d);
    }
  }
  cfg.pfa = detection.real("pfa", cfg.pfa);
  if (!(cfg.pfa > 0.0 && cfg.pfa < 1.0)) throw ConfigError("detection.pfa must lie in (0, 1)");
  cfg.threshold_trials = static_cast<std::size_t>(
      detection.positive("threshold_trials",
                         static_cast<std::int64_t>(default_threshold_trials(cfg.pfa))));
  cfg.pd_trials = static_cast<std::size_t>(
      detection.positive("pd_trials", static_cast<std::int64_t>(cfg.pd_trials)));

  const Section aie = section("aie");
  cfg.aie.n_max = static_cast<int>(aie.positive("n_max", cfg.aie.n_max));
  cfg.aie.sigma_floor = aie.real("sigma_floor", cfg.aie.sigma_floor);

  const Section anmf = section("anmf");
  cfg.re_iterations = static_cast<int>(anmf.positive("re_iterations", cfg.re_iterations));

  const Section run = section("run");
  const std::int64_t seed = run.integer("seed", static_cast<std::int64_t>(cfg.seed));
  if (seed < 0) throw ConfigError("run.seed must be non-negative");
  cfg.seed = static_cast<std::uint64_t>(seed);

  try {
    cfg.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  return cfg;
}

}  // namespace

std::string_view to_string(Scattering s) {
  return s == Scattering::UniformDeterministic ? "uniform_deterministic"
                                               : "uniform_random_phase";
}

ExperimentConfig parse_config(std::string_view text, const std::string& source_name) {
  toml::table root;
  try {
    root = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source_name << ": " << e.description() << " (line " << e.source().begin.line
       << ", column " << e.source().begin.column << ")";
    throw ConfigError(os.str());
  }
  try {
    return build(root);
  } catch (const ConfigError& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

}  // namespace aiedet
