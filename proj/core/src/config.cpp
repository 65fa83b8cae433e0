#include "shus/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "shus/csv.hpp"

namespace shus {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  });
}

double to_double(const std::string& section, const std::string& key,
                 const std::string& v) {
  double out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("[" + section + "] " + key + ": not a real number: '" +
                      v + "'");
  return out;
}

std::uint64_t to_u64(const std::string& section, const std::string& key,
                     const std::string& v) {
  std::uint64_t out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError("[" + section + "] " + key +
                      ": not an unsigned integer: '" + v + "'");
  return out;
}

bool to_bool(const std::string& section, const std::string& key,
             const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("[" + section + "] " + key + ": expected true/false, got '" +
                    v + "'");
}

std::vector<double> to_double_list(const std::string& section,
                                   const std::string& key,
                                   const std::string& v) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t comma = v.find(',', pos);
    const std::string item =
        trim(v.substr(pos, comma == std::string::npos ? v.size() - pos
                                                      : comma - pos));
    if (!item.empty()) out.push_back(to_double(section, key, item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// Tracks which keys a resolver consumed so leftovers can be rejected.
class SectionReader {
 public:
  SectionReader(const RawConfig& raw, std::string name)
      : name_(std::move(name)) {
    const auto it = raw.sections.find(name_);
    if (it != raw.sections.end()) kv_ = &it->second;
  }

  bool present() const { return kv_ != nullptr; }

  std::optional<std::string> get(const std::string& key) {
    if (!kv_) return std::nullopt;
    consumed_.insert(key);
    const auto it = kv_->find(key);
    if (it == kv_->end()) return std::nullopt;
    return it->second;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError("[" + name_ + "] missing required key '" + key + "'");
    return *v;
  }

  std::optional<double> get_double(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    return to_double(name_, key, *v);
  }
  std::optional<std::uint64_t> get_u64(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    return to_u64(name_, key, *v);
  }
  std::optional<bool> get_bool(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    return to_bool(name_, key, *v);
  }
  std::optional<std::vector<double>> get_list(const std::string& key) {
    auto v = get(key);
    if (!v) return std::nullopt;
    return to_double_list(name_, key, *v);
  }

  void finish() const {
    if (!kv_) return;
    for (const auto& [key, value] : *kv_)
      if (!consumed_.count(key))
        throw ConfigError("[" + name_ + "] unknown key '" + key + "'");
  }

 private:
  const std::map<std::string, std::string>* kv_ = nullptr;
  std::set<std::string> consumed_;
  std::string name_;
};

}  // namespace

RawConfig parse_raw_config(const std::string& text) {
  RawConfig raw;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!valid_key(section))
        throw ConfigError("line " + std::to_string(lineno) +
                          ": invalid section name");
      raw.sections[section];  // empty sections are legal
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": key outside any [section]");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (!valid_key(key))
      throw ConfigError("line " + std::to_string(lineno) + ": invalid key '" +
                        key + "'");
    auto [it, inserted] = raw.sections[section].emplace(key, value);
    if (!inserted)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "' in [" + section + "]");
  }
  return raw;
}

RawConfig read_raw_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_raw_config(buf.str());
}

namespace {

const std::set<std::string> known_sections = {"model", "bias", "proposal",
                                              "run", "experiment", "output"};

ModelSpec resolve_model(const RawConfig& raw) {
  SectionReader sec(raw, "model");
  if (!sec.present()) throw ConfigError("missing required section [model]");
  ModelSpec model;
  const std::string target = sec.require("target");
  if (target == "toy") {
    model.kind = ModelSpec::Kind::toy;
    model.epsilon = to_double("model", "epsilon", sec.require("epsilon"));
    if (!(model.epsilon > 0.0 && model.epsilon < 1.0))
      throw ConfigError("[model] epsilon must be in (0,1)");
  } else if (target == "two_well") {
    model.kind = ModelSpec::Kind::two_well;
    model.beta = to_double("model", "beta", sec.require("beta"));
    model.R = sec.get_double("R").value_or(1.2);
    model.d = static_cast<int>(sec.get_u64("d").value_or(24));
    if (!(model.beta > 0.0)) throw ConfigError("[model] beta must be > 0");
    if (!(model.R > 0.0)) throw ConfigError("[model] R must be > 0");
    if (model.d < 1) throw ConfigError("[model] d must be >= 1");
  } else {
    throw ConfigError("[model] target must be 'toy' or 'two_well'");
  }
  sec.finish();
  return model;
}

BiasSpec resolve_bias(const RawConfig& raw) {
  SectionReader sec(raw, "bias");
  if (!sec.present()) throw ConfigError("missing required section [bias]");
  RhoSpec rho;
  const std::string family = sec.get("rho.family").value_or("power");
  if (family == "constant") {
    rho.family = RhoFamily::constant;
    sec.get("rho.a");  // tolerated but ignored for the constant family
  } else if (family == "power") {
    rho.family = RhoFamily::power;
    rho.a = sec.get_double("rho.a").value_or(0.5);
  } else if (family == "floored_power") {
    rho.family = RhoFamily::floored_power;
    rho.a = sec.get_double("rho.a").value_or(0.5);
    const auto t0 = sec.get_double("rho.t0");
    if (!t0) throw ConfigError("[bias] rho.t0 required for floored_power");
    rho.t0 = *t0;
  } else {
    throw ConfigError("[bias] rho.family must be constant, power or floored_power");
  }
  const double alpha = sec.get_double("alpha").value_or(1.0);
  const auto mu = sec.get_double("mu");
  const auto gamma = sec.get_double("gamma");
  sec.finish();
  try {
    return BiasSpec::validated(rho, alpha,
                               mu ? std::optional<double>(*mu) : std::nullopt,
                               gamma ? std::optional<double>(*gamma)
                                     : std::nullopt);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("[bias] ") + e.what());
  }
}

ProposalSpec resolve_proposal(const RawConfig& raw) {
  SectionReader sec(raw, "proposal");
  double sigma2 = 0.01;
  if (sec.present()) {
    sigma2 = sec.get_double("sigma2").value_or(0.01);
    sec.finish();
  }
  if (!(sigma2 > 0.0)) throw ConfigError("[proposal] sigma2 must be > 0");
  return ProposalSpec(sigma2);
}

RunSection resolve_run(const RawConfig& raw, const ModelSpec& model,
                       bool required) {
  SectionReader sec(raw, "run");
  RunSection run;
  if (!sec.present()) {
    if (required) throw ConfigError("missing required section [run]");
    return run;
  }
  run.steps = sec.get_u64("steps").value_or(0);
  if (required && run.steps < 1)
    throw ConfigError("[run] steps must be >= 1");
  run.seed = sec.get_u64("seed").value_or(0);
  run.stride = sec.get_u64("stride").value_or(1);
  run.theta_stride = sec.get_u64("theta_stride").value_or(1000);
  if (run.stride < 1 || run.theta_stride < 1)
    throw ConfigError("[run] strides must be >= 1");
  run.verify = sec.get_bool("verify").value_or(false);
  run.record_is_weight = sec.get_bool("record_is_weight").value_or(false);
  const std::string schedule = sec.get("schedule").value_or("shus");
  if (schedule == "shus") {
    run.schedule = Schedule::shus;
    sec.get("powerlaw_c");
  } else if (schedule == "power_law") {
    run.schedule = Schedule::power_law;
    const auto c = sec.get_double("powerlaw_c");
    if (!c) throw ConfigError("[run] powerlaw_c required for power_law schedule");
    run.powerlaw_c = *c;
    if (!(run.powerlaw_c > 0.0))
      throw ConfigError("[run] powerlaw_c must be > 0");
  } else {
    throw ConfigError("[run] schedule must be 'shus' or 'power_law'");
  }
  if (model.kind == ModelSpec::Kind::toy) {
    sec.get("x0");
    const auto s = sec.get_u64("x0_state");
    run.x0_state = s ? static_cast<int>(*s) - 1 : 0;  // 1-based in files
    if (run.x0_state < 0 || run.x0_state >= 3)
      throw ConfigError("[run] x0_state must be 1, 2 or 3");
    const auto ex = sec.get_u64("exit_state");
    if (ex) {
      run.exit_state = static_cast<int>(*ex) - 1;
      if (*run.exit_state < 0 || *run.exit_state >= 3)
        throw ConfigError("[run] exit_state must be 1, 2 or 3");
    }
    sec.get("exit_x1");
  } else {
    sec.get("x0_state");
    sec.get("exit_state");
    const auto x0 = sec.get_list("x0");
    if (x0) {
      if (x0->size() != 2)
        throw ConfigError("[run] x0 must be two comma-separated reals");
      run.x0 = {(*x0)[0], (*x0)[1]};
    }
    run.exit_x1 = sec.get_double("exit_x1");
  }
  sec.finish();
  return run;
}

ExperimentSection resolve_experiment(const RawConfig& raw,
                                     const ModelSpec& model, bool required) {
  SectionReader sec(raw, "experiment");
  ExperimentSection exp;
  exp.fit_x = model.kind == ModelSpec::Kind::toy ? "inverse" : "grid";
  if (!sec.present()) {
    if (required) throw ConfigError("missing required section [experiment]");
    return exp;
  }
  exp.grid = sec.get_list("grid").value_or(std::vector<double>{});
  exp.replicas = static_cast<int>(sec.get_u64("replicas").value_or(100));
  if (exp.replicas < 1) throw ConfigError("[experiment] replicas must be >= 1");
  exp.cap = sec.get_u64("cap").value_or(0);
  exp.fit = sec.get("fit").value_or("none");
  if (exp.fit != "exp" && exp.fit != "loglog" && exp.fit != "none")
    throw ConfigError("[experiment] fit must be exp, loglog or none");
  exp.fit_x = sec.get("fit_x").value_or(exp.fit_x);
  if (exp.fit_x != "grid" && exp.fit_x != "inverse" &&
      exp.fit_x != "log_inverse")
    throw ConfigError("[experiment] fit_x must be grid, inverse or log_inverse");
  exp.a_list = sec.get_list("a_list").value_or(std::vector<double>{});
  exp.a_grid = sec.get_list("a_grid").value_or(std::vector<double>{});
  sec.finish();
  return exp;
}

OutputSection resolve_output(const RawConfig& raw) {
  SectionReader sec(raw, "output");
  OutputSection out;
  if (sec.present()) {
    out.dir = sec.get("dir").value_or("out");
    sec.finish();
  }
  return out;
}

}  // namespace

AppConfig resolve_config(const RawConfig& raw, const SectionNeeds& needs) {
  for (const auto& [name, kv] : raw.sections)
    if (!known_sections.count(name))
      throw ConfigError("unknown section [" + name + "]");
  AppConfig cfg;
  cfg.model = resolve_model(raw);
  cfg.bias = resolve_bias(raw);
  cfg.proposal = resolve_proposal(raw);
  cfg.run = resolve_run(raw, cfg.model, needs.run);
  cfg.has_run = raw.sections.count("run") > 0;
  cfg.experiment = resolve_experiment(raw, cfg.model, needs.experiment);
  cfg.has_experiment = raw.sections.count("experiment") > 0;
  cfg.output = resolve_output(raw);
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path,
                      const SectionNeeds& needs) {
  return resolve_config(read_raw_config(path), needs);
}

std::string echo_config(const AppConfig& cfg) {
  std::ostringstream os;
  os << "[model]\n";
  if (cfg.model.kind == ModelSpec::Kind::toy) {
    os << "target = toy\n";
    os << "epsilon = " << format_double(cfg.model.epsilon) << "\n";
  } else {
    os << "target = two_well\n";
    os << "beta = " << format_double(cfg.model.beta) << "\n";
    os << "R = " << format_double(cfg.model.R) << "\n";
    os << "d = " << cfg.model.d << "\n";
  }
  os << "\n[bias]\n";
  switch (cfg.bias.rho.family) {
    case RhoFamily::constant:
      os << "rho.family = constant\n";
      break;
    case RhoFamily::power:
      os << "rho.family = power\n";
      os << "rho.a = " << format_double(cfg.bias.rho.a) << "\n";
      break;
    case RhoFamily::floored_power:
      os << "rho.family = floored_power\n";
      os << "rho.a = " << format_double(cfg.bias.rho.a) << "\n";
      os << "rho.t0 = " << format_double(cfg.bias.rho.t0) << "\n";
      break;
  }
  os << "alpha = " << format_double(cfg.bias.alpha) << "\n";
  os << "mu = " << format_double(cfg.bias.mu) << "\n";
  os << "gamma = " << format_double(cfg.bias.gamma) << "\n";
  os << "\n[proposal]\n";
  os << "sigma2 = " << format_double(cfg.proposal.sigma2) << "\n";
  if (cfg.has_run) {
    os << "\n[run]\n";
    os << "steps = " << cfg.run.steps << "\n";
    os << "seed = " << cfg.run.seed << "\n";
    os << "stride = " << cfg.run.stride << "\n";
    os << "theta_stride = " << cfg.run.theta_stride << "\n";
    os << "verify = " << (cfg.run.verify ? "true" : "false") << "\n";
    os << "record_is_weight = " << (cfg.run.record_is_weight ? "true" : "false")
       << "\n";
    os << "schedule = "
       << (cfg.run.schedule == Schedule::shus ? "shus" : "power_law") << "\n";
    if (cfg.run.schedule == Schedule::power_law)
      os << "powerlaw_c = " << format_double(cfg.run.powerlaw_c) << "\n";
    if (cfg.model.kind == ModelSpec::Kind::toy) {
      os << "x0_state = " << (cfg.run.x0_state + 1) << "\n";
      if (cfg.run.exit_state)
        os << "exit_state = " << (*cfg.run.exit_state + 1) << "\n";
    } else {
      os << "x0 = " << format_double(cfg.run.x0.x1) << ", "
         << format_double(cfg.run.x0.x2) << "\n";
      if (cfg.run.exit_x1)
        os << "exit_x1 = " << format_double(*cfg.run.exit_x1) << "\n";
    }
  }
  if (cfg.has_experiment) {
    os << "\n[experiment]\n";
    auto list = [&](const std::vector<double>& v) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
      }
      return s;
    };
    if (!cfg.experiment.grid.empty())
      os << "grid = " << list(cfg.experiment.grid) << "\n";
    os << "replicas = " << cfg.experiment.replicas << "\n";
    if (cfg.experiment.cap != 0) os << "cap = " << cfg.experiment.cap << "\n";
    os << "fit = " << cfg.experiment.fit << "\n";
    os << "fit_x = " << cfg.experiment.fit_x << "\n";
    if (!cfg.experiment.a_list.empty())
      os << "a_list = " << list(cfg.experiment.a_list) << "\n";
    if (!cfg.experiment.a_grid.empty())
      os << "a_grid = " << list(cfg.experiment.a_grid) << "\n";
  }
  os << "\n[output]\n";
  os << "dir = " << cfg.output.dir << "\n";
  return os.str();
}

SamplerConfig make_sampler_config(const AppConfig& cfg) {
  SamplerConfig sc;
  sc.model = cfg.model;
  sc.bias = cfg.bias;
  sc.proposal = cfg.proposal;
  sc.schedule = cfg.run.schedule;
  sc.powerlaw_c = cfg.run.powerlaw_c;
  sc.n_steps = cfg.run.steps;
  sc.seed = cfg.run.seed;
  sc.x0 = cfg.run.x0;
  sc.x0_state = cfg.run.x0_state;
  sc.record.scalar_stride = cfg.run.stride;
  sc.record.theta_stride = cfg.run.theta_stride;
  sc.record.verify = cfg.run.verify;
  sc.record.record_is_weight = cfg.run.record_is_weight;
  sc.exit_x1_above = cfg.run.exit_x1;
  sc.exit_state = cfg.run.exit_state;
  return sc;
}

}  // namespace shus
