#include "mfb/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <system_error>

#include "mfb/csv.hpp"

namespace mfb {

namespace {

std::vector<double> even_checkpoints(double budget, int pieces) {
  std::vector<double> out;
  for (int i = 1; i <= pieces; ++i) out.push_back(budget * i / pieces);
  return out;
}

ExperimentConfig synthetic_base(SyntheticPreset which, double gamma, Count s0, double budget) {
  ExperimentConfig c;
  c.family = EnvFamily::Synthetic;
  c.synthetic = synthetic_preset(which, 0.5);
  c.tacc.gamma = gamma;
  c.tacc.s0 = s0;
  c.tacc.eta = 1e-4;
  c.budget = budget;
  c.checkpoints = even_checkpoints(budget, 4);
  c.seed_count = 10;
  return c;
}

ExperimentConfig proxy_base(EnvFamily family, double high_cost) {
  ExperimentConfig c;
  c.family = family;
  c.proxy.high_cost = high_cost;
  if (family == EnvFamily::Vanishing) c.proxy.b = 0.0;
  c.tacc.gamma = 0.025;
  c.tacc.eta = 1e-4;
  c.tacc.s0 = 128;
  // Rewards are Bernoulli, i.e. 1/2-sub-Gaussian: rho = 2 sigma^2.
  c.rho = 0.5;
  c.budget = 128000.0;
  c.checkpoints = even_checkpoints(c.budget, 8);
  c.seed_count = 200;
  return c;
}

const std::map<std::string, std::function<ExperimentConfig()>>& registry() {
  static const std::map<std::string, std::function<ExperimentConfig()>> presets{
      {"set-a", [] { return synthetic_base(SyntheticPreset::SetA, 0.063, 10, 100000.0); }},
      {"set-b", [] { return synthetic_base(SyntheticPreset::SetB, 0.141, 50, 200000.0); }},
      {"residual-200", [] { return proxy_base(EnvFamily::Residual, 200.0); }},
      {"residual-500", [] { return proxy_base(EnvFamily::Residual, 500.0); }},
      {"residual-1000", [] { return proxy_base(EnvFamily::Residual, 1000.0); }},
      {"vanishing-200", [] { return proxy_base(EnvFamily::Vanishing, 200.0); }},
      {"vanishing-500", [] { return proxy_base(EnvFamily::Vanishing, 500.0); }},
      {"vanishing-1000", [] { return proxy_base(EnvFamily::Vanishing, 1000.0); }},
      {"checkpoint5", [] { return proxy_base(EnvFamily::Checkpoint5Arm, 500.0); }},
  };
  return presets;
}

// ---- value parsing -------------------------------------------------------

struct Value {
  std::string raw;
  std::size_t line = 0;
  std::string key;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("line " + std::to_string(line) + ": " + key + ": " + what);
  }

  std::string str() const {
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return raw.substr(1, raw.size() - 2);
    if (raw.empty() || raw.front() == '[') fail("expected a string");
    return raw;
  }

  double real() const {
    double v = 0.0;
    auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (res.ec != std::errc() || res.ptr != raw.data() + raw.size() || !std::isfinite(v)) {
      fail("expected a number, got '" + raw + "'");
    }
    return v;
  }

  std::uint64_t count() const {
    std::uint64_t v = 0;
    auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (res.ec != std::errc() || res.ptr != raw.data() + raw.size()) {
      fail("expected a non-negative integer, got '" + raw + "'");
    }
    return v;
  }

  bool boolean() const {
    if (raw == "true") return true;
    if (raw == "false") return false;
    fail("expected true or false");
  }

  std::vector<Value> list() const {
    if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') fail("expected a [list]");
    std::vector<Value> out;
    std::string inner = raw.substr(1, raw.size() - 2);
    std::istringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) {
        if (inner.find_first_not_of(" \t") == std::string::npos) break;
        fail("empty list element");
      }
      out.push_back({item.substr(b, e - b + 1), line, key});
    }
    return out;
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

EnvFamily parse_family(const Value& v) {
  const std::string s = v.str();
  if (s == "synthetic") return EnvFamily::Synthetic;
  if (s == "residual") return EnvFamily::Residual;
  if (s == "vanishing") return EnvFamily::Vanishing;
  if (s == "checkpoint5") return EnvFamily::Checkpoint5Arm;
  v.fail("unknown family '" + s + "' (synthetic, residual, vanishing, checkpoint5)");
}

std::string family_name(EnvFamily f) {
  switch (f) {
    case EnvFamily::Synthetic: return "synthetic";
    case EnvFamily::Residual: return "residual";
    case EnvFamily::Vanishing: return "vanishing";
    case EnvFamily::Checkpoint5Arm: return "checkpoint5";
  }
  return "?";
}

std::vector<double> reals(const Value& v) {
  std::vector<double> out;
  for (const auto& item : v.list()) out.push_back(item.real());
  return out;
}

struct Pending {
  // Cost fields are gathered and applied together because CostModel
  // validates the pair.
  std::optional<double> cost_low;
  std::optional<double> cost_high;
  bool checkpoints_set = false;
  std::optional<std::string> noise;
  std::optional<bool> clip;
};

using Setter = std::function<void(ExperimentConfig&, Pending&, const Value&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"env.family", [](auto& c, auto&, const Value& v) { c.family = parse_family(v); }},
      {"env.arms", [](auto& c, auto&, const Value& v) { c.synthetic.num_arms = v.count(); }},
      {"env.means.dist",
       [](auto& c, auto&, const Value& v) {
         const std::string s = v.str();
         if (s == "uniform") c.synthetic.means = SyntheticSpec::Means::Uniform;
         else if (s == "normal") c.synthetic.means = SyntheticSpec::Means::Normal;
         else if (s == "fixed") c.synthetic.means = SyntheticSpec::Means::Fixed;
         else v.fail("expected uniform, normal or fixed");
       }},
      {"env.means.lo", [](auto& c, auto&, const Value& v) { c.synthetic.mean_a = v.real(); }},
      {"env.means.hi", [](auto& c, auto&, const Value& v) { c.synthetic.mean_b = v.real(); }},
      {"env.means.mu", [](auto& c, auto&, const Value& v) { c.synthetic.mean_a = v.real(); }},
      {"env.means.sd", [](auto& c, auto&, const Value& v) { c.synthetic.mean_b = v.real(); }},
      {"env.means.values",
       [](auto& c, auto&, const Value& v) {
         const auto xs = reals(v);
         c.synthetic.fixed_means = xs;
         c.proxy.means = xs;
       }},
      {"env.zeta",
       [](auto& c, auto&, const Value& v) {
         c.synthetic.zeta = v.real();
         c.proxy.zeta = c.synthetic.zeta;
       }},
      {"env.r",
       [](auto& c, auto&, const Value& v) {
         c.synthetic.r = v.real();
         c.proxy.r = c.synthetic.r;
       }},
      {"env.b", [](auto& c, auto&, const Value& v) { c.proxy.b = v.real(); }},
      {"env.n0", [](auto& c, auto&, const Value& v) { c.proxy.n0 = v.count(); }},
      {"env.envelope",
       [](auto& c, auto&, const Value& v) {
         const std::string s = v.str();
         if (s == "power") c.synthetic.shape = SyntheticSpec::Shape::PowerLaw;
         else if (s == "constant") c.synthetic.shape = SyntheticSpec::Shape::Constant;
         else v.fail("expected power or constant");
       }},
      {"env.noise", [](auto&, auto& p, const Value& v) { p.noise = v.str(); }},
      {"env.sigma", [](auto& c, auto&, const Value& v) { c.synthetic.sigma = v.real(); }},
      {"env.clip", [](auto&, auto& p, const Value& v) { p.clip = v.boolean(); }},
      {"costs.low", [](auto&, auto& p, const Value& v) { p.cost_low = v.real(); }},
      {"costs.high", [](auto&, auto& p, const Value& v) { p.cost_high = v.real(); }},
      {"algo.gamma", [](auto& c, auto&, const Value& v) { c.tacc.gamma = v.real(); }},
      {"algo.eta", [](auto& c, auto&, const Value& v) { c.tacc.eta = v.real(); }},
      {"algo.s0", [](auto& c, auto&, const Value& v) { c.tacc.s0 = v.count(); }},
      {"algo.rho", [](auto& c, auto&, const Value& v) { c.rho = v.real(); }},
      {"algo.delta", [](auto& c, auto&, const Value& v) { c.delta = v.real(); }},
      {"algo.mfucb_zeta", [](auto& c, auto&, const Value& v) { c.fixed_bias = v.real(); }},
      {"budget.total", [](auto& c, auto&, const Value& v) { c.budget = v.real(); }},
      {"budget.checkpoints",
       [](auto& c, auto& p, const Value& v) {
         c.checkpoints = reals(v);
         p.checkpoints_set = true;
       }},
      {"seeds.first", [](auto& c, auto&, const Value& v) { c.seed_first = v.count(); }},
      {"seeds.count", [](auto& c, auto&, const Value& v) { c.seed_count = v.count(); }},
      {"methods",
       [](auto& c, auto&, const Value& v) {
         c.methods.clear();
         for (const auto& item : v.list()) c.methods.push_back(canonical_method(item.str()));
       }},
      {"output.dir", [](auto& c, auto&, const Value& v) { c.out_dir = v.str(); }},
      {"jobs", [](auto& c, auto&, const Value& v) { c.jobs = static_cast<unsigned>(v.count()); }},
  };
  return table;
}

void finish(ExperimentConfig& c, const Pending& p, double preset_budget) {
  if (c.family == EnvFamily::Synthetic) {
    c.synthetic.costs = CostModel(p.cost_low.value_or(c.synthetic.costs.low()),
                                  p.cost_high.value_or(c.synthetic.costs.high()));
    if (p.noise && *p.noise != "gaussian") throw ConfigError("env.noise: synthetic environments use gaussian noise");
    if (p.clip && *p.clip) throw ConfigError("env.clip: synthetic environments are not clipped");
    if (!(c.synthetic.sigma >= 0.0)) throw ConfigError("env.sigma must be >= 0");
  } else {
    if (p.cost_low && *p.cost_low != 1.0) throw ConfigError("costs.low: proxy-judge environments use costs.low = 1");
    if (p.cost_high) c.proxy.high_cost = *p.cost_high;
    (void)CostModel(1.0, c.proxy.high_cost);
    if (p.noise && *p.noise != "bernoulli") throw ConfigError("env.noise: proxy-judge environments use bernoulli");
    if (p.clip && !*p.clip) throw ConfigError("env.clip: proxy-judge environments require clipping");
    if (c.family == EnvFamily::Vanishing) c.proxy.b = 0.0;
  }
  // A budget override without explicit checkpoints rescales the preset grid.
  if (!p.checkpoints_set && c.budget != preset_budget && !c.checkpoints.empty()) {
    const double scale = c.budget / preset_budget;
    for (double& cp : c.checkpoints) cp *= scale;
    c.checkpoints.back() = c.budget;
  }
  if (c.checkpoints.empty()) c.checkpoints = {c.budget};
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string list(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_number(xs[i]);
  return out + "]";
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, _] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

ExperimentConfig preset_config(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
  }
  ExperimentConfig c = it->second();
  c.preset = name;
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<Value> entries;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::optional<Value> preset;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    Value v{trim(body.substr(eq + 1)), lineno, trim(body.substr(0, eq))};
    if (v.key.empty() || v.raw.empty()) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (auto [it, fresh] = seen.emplace(v.key, lineno); !fresh) {
      v.fail("duplicate key (first set on line " + std::to_string(it->second) + ")");
    }
    if (v.key == "preset") {
      preset = v;
    } else if (!setters().count(v.key)) {
      v.fail("unknown key");
    } else {
      entries.push_back(std::move(v));
    }
  }

  ExperimentConfig c = preset ? preset_config(preset->str()) : ExperimentConfig{};
  if (!preset) c.checkpoints.clear();
  const double preset_budget = c.budget;
  Pending pending;
  for (const auto& v : entries) setters().at(v.key)(c, pending, v);
  finish(c, pending, preset_budget);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const ExperimentConfig& c, bool include_runtime) {
  std::ostringstream o;
  o << "env.family = " << family_name(c.family) << '\n';
  if (c.family == EnvFamily::Synthetic) {
    const auto& s = c.synthetic;
    o << "env.arms = " << s.num_arms << '\n';
    switch (s.means) {
      case SyntheticSpec::Means::Uniform:
        o << "env.means.dist = uniform\nenv.means.lo = " << format_number(s.mean_a)
          << "\nenv.means.hi = " << format_number(s.mean_b) << '\n';
        break;
      case SyntheticSpec::Means::Normal:
        o << "env.means.dist = normal\nenv.means.mu = " << format_number(s.mean_a)
          << "\nenv.means.sd = " << format_number(s.mean_b) << '\n';
        break;
      case SyntheticSpec::Means::Fixed:
        o << "env.means.dist = fixed\nenv.means.values = " << list(s.fixed_means) << '\n';
        break;
    }
    o << "env.envelope = " << (s.shape == SyntheticSpec::Shape::PowerLaw ? "power" : "constant") << '\n';
    o << "env.zeta = " << format_number(s.zeta) << "\nenv.r = " << format_number(s.r) << '\n';
    o << "env.noise = gaussian\nenv.sigma = " << format_number(s.sigma) << "\nenv.clip = false\n";
  } else {
    const auto& p = c.proxy;
    if (c.family != EnvFamily::Checkpoint5Arm && !p.means.empty()) o << "env.means.values = " << list(p.means) << '\n';
    o << "env.zeta = " << format_number(p.zeta) << "\nenv.r = " << format_number(p.r) << '\n';
    if (c.family != EnvFamily::Vanishing) o << "env.b = " << format_number(p.b) << '\n';
    o << "env.n0 = " << p.n0 << "\nenv.noise = bernoulli\nenv.clip = true\n";
  }
  const CostModel costs = c.costs();
  o << "costs.low = " << format_number(costs.low()) << "\ncosts.high = " << format_number(costs.high()) << '\n';
  o << "algo.gamma = " << format_number(c.tacc.gamma) << "\nalgo.eta = " << format_number(c.tacc.eta)
    << "\nalgo.s0 = " << c.tacc.s0 << "\nalgo.rho = " << format_number(c.rho)
    << "\nalgo.delta = " << format_number(c.delta) << '\n';
  if (c.fixed_bias) o << "algo.mfucb_zeta = " << format_number(*c.fixed_bias) << '\n';
  o << "budget.total = " << format_number(c.budget) << "\nbudget.checkpoints = " << list(c.checkpoints) << '\n';
  o << "seeds.first = " << c.seed_first << "\nseeds.count = " << c.seed_count << '\n';
  o << "methods = [";
  for (std::size_t i = 0; i < c.methods.size(); ++i) o << (i ? ", " : "") << c.methods[i];
  o << "]\n";
  if (include_runtime) o << "output.dir = " << quote(c.out_dir) << "\njobs = " << c.jobs << '\n';
  return o.str();
}

void apply_seed_range(ExperimentConfig& config, const std::string& range) {
  const auto dots = range.find("..");
  auto num = [&](const std::string& s) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ConfigError("--seeds expects a..b, got '" + range + "'");
    }
    return v;
  };
  if (dots == std::string::npos) {
    config.seed_first = num(range);
    config.seed_count = 1;
    return;
  }
  const auto a = num(range.substr(0, dots));
  const auto b = num(range.substr(dots + 2));
  if (b < a) throw ConfigError("--seeds range is empty: '" + range + "'");
  config.seed_first = a;
  config.seed_count = b - a + 1;
}

}  // namespace mfb
