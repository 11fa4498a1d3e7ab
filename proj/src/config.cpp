#include "qkt/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <type_traits>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "qkt/errors.hpp"
#include "qkt/hash.hpp"

namespace qkt {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(sep, start);
    const auto piece = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (!piece.empty()) out.push_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::int64_t parse_int(std::string_view text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("expected an integer, got '" + s + "'");
  return v;
}

double parse_double(std::string_view text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw ConfigError("expected a number, got '" + s + "'");
  return v;
}

bool parse_bool(std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("expected true/false, got '" + s + "'");
}

std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) out.push_back(parse_double(tok));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

// a..b[/step], pow2:a..b, or a single value; `atom` converts endpoint tokens
template <typename Atom>
void expand_token(const std::string& tok, std::set<std::int64_t>& out, Atom atom) {
  if (tok.rfind("pow2:", 0) == 0) {
    const auto body = tok.substr(5);
    const auto dots = body.find("..");
    const std::int64_t lo = parse_int(body.substr(0, dots));
    const std::int64_t hi = dots == std::string::npos ? lo : parse_int(body.substr(dots + 2));
    if (lo < 0 || hi > 62 || lo > hi) throw ConfigError("bad power-of-two range '" + tok + "'");
    for (std::int64_t e = lo; e <= hi; ++e) out.insert(std::int64_t{1} << e);
    return;
  }
  const auto dots = tok.find("..");
  if (dots == std::string::npos) {
    out.insert(atom(tok));
    return;
  }
  std::string hi_part = tok.substr(dots + 2);
  std::int64_t stride = 1;
  if (const auto slash = hi_part.find('/'); slash != std::string::npos) {
    stride = parse_int(hi_part.substr(slash + 1));
    hi_part = hi_part.substr(0, slash);
  }
  const std::int64_t lo = atom(tok.substr(0, dots));
  const std::int64_t hi = atom(hi_part);
  if (stride < 1 || lo > hi) throw ConfigError("bad range '" + tok + "'");
  for (std::int64_t v = lo; v <= hi; v += stride) out.insert(v);
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

template <typename T> std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

std::vector<int> rescale(const std::vector<int>& qs, int from_n, int to_n) {
  std::set<int> out;
  for (int q : qs) {
    const long v = std::lround(static_cast<double>(q) * to_n / from_n);
    out.insert(static_cast<int>(std::clamp<long>(v, 1, to_n)));
  }
  return {out.begin(), out.end()};
}

} // namespace

std::vector<InitialState> default_states() {
  return {
      {1.5707963267948966, 1.5707963267948966, "equatorial"},
      {1.82, 1.54, "island"},
      {2.20, 2.44, "non-equatorial-island"},
      {2.46, 0.32, "chaotic-sea"},
      {2.56, 2.31, "edge"},
  };
}

ExperimentConfig paper_config() {
  ExperimentConfig cfg;
  cfg.n_qubits = 1000;
  cfg.states = default_states();
  cfg.subsystems = {5, 10, 25, 50, 100, 150, 250, 500, 900, 1000};
  cfg.times = parse_time_grid("0..64, pow2:7..15");
  cfg.scaling_subsystems = parse_subsystem_list("1..900", 1000);
  // exponents back-derived from t_E = 35 (kappa = 3) and t_E = 3 (kappa = 30) at j = 500
  cfg.ehrenfest_lyapunov = {{3.0, std::log(1000.0) / 35.0}, {30.0, std::log(1000.0) / 3.0}};
  cfg.late_time = std::int64_t{1} << 15;
  return cfg;
}

ExperimentConfig desk_config() {
  ExperimentConfig cfg = paper_config();
  cfg.n_qubits = 100;
  cfg.subsystems = scale_subsystems(cfg.subsystems, 100);
  cfg.scaling_subsystems = parse_subsystem_list("1..90", 100);
  cfg.times = parse_time_grid("0..64, pow2:7..12");
  cfg.late_time = std::int64_t{1} << 12;
  return cfg;
}

std::vector<int> scale_subsystems(const std::vector<int>& reference, int n_qubits) {
  return rescale(reference, 1000, n_qubits);
}

std::vector<std::int64_t> parse_time_grid(std::string_view text) {
  std::set<std::int64_t> out;
  for (const auto& tok : split(text, ',')) expand_token(tok, out, [](std::string_view s) { return parse_int(s); });
  if (out.empty()) throw ConfigError("empty time grid");
  if (*out.begin() < 0) throw ConfigError("time grid contains negative times");
  return {out.begin(), out.end()};
}

std::vector<int> parse_subsystem_list(std::string_view text, int n_qubits) {
  std::set<std::int64_t> out;
  const auto atom = [n_qubits](std::string_view s) -> std::int64_t {
    return trim(s) == "N" ? n_qubits : parse_int(s);
  };
  for (const auto& tok : split(text, ',')) expand_token(tok, out, atom);
  if (out.empty()) throw ConfigError("empty subsystem list");
  std::vector<int> qs;
  for (auto q : out) {
    if (q < 1 || q > n_qubits) throw ConfigError(fmt::format("subsystem size {} outside [1, {}]", q, n_qubits));
    qs.push_back(static_cast<int>(q));
  }
  return qs;
}

void ExperimentConfig::validate() const {
  if (n_qubits < 1) throw ConfigError("n_qubits must be >= 1");
  if (kappas.empty()) throw ConfigError("no kappa values");
  for (double k : kappas)
    if (!(k >= 0.0)) throw ConfigError("kappa must be >= 0");
  if (!std::isfinite(alpha)) throw ConfigError("alpha must be finite");
  if (states.empty()) throw ConfigError("no initial states");
  std::set<std::string> labels;
  for (const auto& s : states) {
    if (s.label.empty() || s.label.find_first_of(",\"\n ") != std::string::npos) {
      throw ConfigError("state label '" + s.label + "' must be non-empty without commas, quotes or spaces");
    }
    if (!labels.insert(s.label).second) throw ConfigError("duplicate state label '" + s.label + "'");
    if (!(s.theta >= 0.0 && s.theta <= std::numbers::pi)) throw ConfigError("theta of '" + s.label + "' outside [0, pi]");
    if (!(s.phi >= 0.0 && s.phi < 2.0 * std::numbers::pi)) throw ConfigError("phi of '" + s.label + "' outside [0, 2pi)");
  }
  for (const auto* list : {&subsystems, &scaling_subsystems}) {
    for (int q : *list)
      if (q < 1 || q > n_qubits) throw ConfigError(fmt::format("subsystem size {} outside [1, {}]", q, n_qubits));
  }
  if (times.empty()) throw ConfigError("empty time grid");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0) throw ConfigError("negative sample time");
    if (i > 0 && times[i] <= times[i - 1]) throw ConfigError("sample times must be strictly increasing");
  }
  if (times.back() > (std::int64_t{1} << 32)) throw ConfigError("sample times beyond 2^32 periods");
  if (!(spectral_tol > 0.0)) throw ConfigError("spectral_tol must be positive");
  if (checkpoint_every < 0 || renormalize_every < 0) throw ConfigError("cadences must be >= 0");
  for (const auto& [k, lam] : ehrenfest_lyapunov)
    if (!(lam > 0.0)) throw ConfigError("Ehrenfest exponents must be positive");
  if (late_time < 1) throw ConfigError("late_time must be >= 1");
  if (!(transition_split > 0.0 && transition_split < 1.0)) throw ConfigError("split must lie in (0, 1)");
  if (lyapunov_trajectories < 1 || lyapunov_steps < 1) throw ConfigError("Lyapunov sizes must be >= 1");
  if (portrait_theta < 1 || portrait_phi < 1 || portrait_steps < 0) throw ConfigError("bad portrait grid");
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  os << "n_qubits=" << n_qubits << '\n'
     << "kappas=" << join(kappas) << '\n'
     << "alpha=" << format_double(alpha) << '\n'
     << "seed=" << seed << '\n';
  for (const auto& s : states) {
    os << "state=" << s.label << ':' << format_double(s.theta) << ',' << format_double(s.phi) << '\n';
  }
  os << "subsystems=" << join(subsystems) << '\n'
     << "times=" << join(times) << '\n'
     << "spectral_tol=" << format_double(spectral_tol) << '\n'
     << "checkpoint_every=" << checkpoint_every << '\n'
     << "renormalize_every=" << renormalize_every << '\n'
     << "record_timing=" << (record_timing ? "true" : "false") << '\n'
     << "scaling_subsystems=" << join(scaling_subsystems) << '\n';
  for (const auto& [k, lam] : ehrenfest_lyapunov) {
    os << "ehrenfest_lyapunov=" << format_double(k) << ':' << format_double(lam) << '\n';
  }
  os << "late_time=" << late_time << '\n'
     << "transition_split=" << format_double(transition_split) << '\n'
     << "lyapunov_kappas=" << join(lyapunov_kappas) << '\n'
     << "lyapunov_trajectories=" << lyapunov_trajectories << '\n'
     << "lyapunov_steps=" << lyapunov_steps << '\n'
     << "portrait_kappas=" << join(portrait_kappas) << '\n'
     << "portrait_grid=" << portrait_theta << ',' << portrait_phi << '\n'
     << "portrait_steps=" << portrait_steps << '\n';
  return os.str();
}

std::string ExperimentConfig::hash() const { return fmt::format("{:016x}", fnv1a(canonical_text())); }

ExperimentConfig parse_config(std::string_view text, ExperimentConfig cfg) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  const std::set<std::string> known_sections{"system", "states", "sweep", "q_scaling", "classical"};
  for (const auto& [name, _] : tree) {
    if (!known_sections.contains(name)) throw ConfigError("config: unknown section [" + name + "]");
  }
  const auto section = [&](const std::string& name) -> const pt::ptree* {
    const auto it = tree.find(name);
    return it == tree.not_found() ? nullptr : &it->second;
  };
  const auto reject_unknown = [](const pt::ptree& sec, const std::string& name,
                                 const std::set<std::string>& keys) {
    std::set<std::string> seen;
    for (const auto& [key, _] : sec) {
      if (!keys.contains(key)) throw ConfigError("config: unknown key '" + key + "' in [" + name + "]");
      if (!seen.insert(key).second) throw ConfigError("config: duplicate key '" + key + "' in [" + name + "]");
    }
  };

  // [system] first: list parsing depends on N
  const int old_n = cfg.n_qubits;
  if (const auto* sec = section("system")) {
    reject_unknown(*sec, "system", {"n_qubits", "kappas", "alpha", "seed"});
    for (const auto& [key, node] : *sec) {
      const auto& v = node.data();
      if (key == "n_qubits") cfg.n_qubits = static_cast<int>(parse_int(v));
      else if (key == "kappas") cfg.kappas = parse_double_list(v);
      else if (key == "alpha") cfg.alpha = parse_double(v);
      else if (key == "seed") {
        const auto s = parse_int(v);
        if (s < 0) throw ConfigError("seed must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
      }
    }
  }
  if (cfg.n_qubits < 1) throw ConfigError("n_qubits must be >= 1");
  if (cfg.n_qubits != old_n) {
    cfg.subsystems = rescale(cfg.subsystems, old_n, cfg.n_qubits);
    cfg.scaling_subsystems = rescale(cfg.scaling_subsystems, old_n, cfg.n_qubits);
  }

  if (const auto* sec = section("states")) {
    cfg.states.clear();
    std::set<std::string> seen;
    for (const auto& [label, node] : *sec) {
      if (!seen.insert(label).second) throw ConfigError("config: duplicate state label '" + label + "'");
      const auto parts = parse_double_list(node.data());
      if (parts.size() != 2) throw ConfigError("config: state '" + label + "' needs 'theta, phi'");
      cfg.states.push_back({parts[0], parts[1], label});
    }
  }

  if (const auto* sec = section("sweep")) {
    reject_unknown(*sec, "sweep",
                   {"subsystems", "times", "spectral_tol", "checkpoint_every", "renormalize_every", "record_timing"});
    for (const auto& [key, node] : *sec) {
      const auto& v = node.data();
      if (key == "subsystems") cfg.subsystems = parse_subsystem_list(v, cfg.n_qubits);
      else if (key == "times") cfg.times = parse_time_grid(v);
      else if (key == "spectral_tol") cfg.spectral_tol = parse_double(v);
      else if (key == "checkpoint_every") cfg.checkpoint_every = parse_int(v);
      else if (key == "renormalize_every") cfg.renormalize_every = parse_int(v);
      else if (key == "record_timing") cfg.record_timing = parse_bool(v);
    }
  }

  if (const auto* sec = section("q_scaling")) {
    reject_unknown(*sec, "q_scaling", {"subsystems", "ehrenfest_lyapunov", "late_time", "split"});
    for (const auto& [key, node] : *sec) {
      const auto& v = node.data();
      if (key == "subsystems") cfg.scaling_subsystems = parse_subsystem_list(v, cfg.n_qubits);
      else if (key == "late_time") cfg.late_time = parse_int(v);
      else if (key == "split") cfg.transition_split = parse_double(v);
      else if (key == "ehrenfest_lyapunov") {
        cfg.ehrenfest_lyapunov.clear();
        for (const auto& pair : split(v, ',')) {
          const auto kv = split(pair, ':');
          if (kv.size() != 2) throw ConfigError("config: ehrenfest_lyapunov entries are 'kappa:lambda'");
          cfg.ehrenfest_lyapunov[parse_double(kv[0])] = parse_double(kv[1]);
        }
      }
    }
  }

  if (const auto* sec = section("classical")) {
    reject_unknown(*sec, "classical",
                   {"kappas", "trajectories", "steps", "portrait_kappas", "portrait_grid", "portrait_steps"});
    for (const auto& [key, node] : *sec) {
      const auto& v = node.data();
      if (key == "kappas") cfg.lyapunov_kappas = parse_double_list(v);
      else if (key == "trajectories") cfg.lyapunov_trajectories = static_cast<int>(parse_int(v));
      else if (key == "steps") cfg.lyapunov_steps = parse_int(v);
      else if (key == "portrait_kappas") cfg.portrait_kappas = parse_double_list(v);
      else if (key == "portrait_steps") cfg.portrait_steps = parse_int(v);
      else if (key == "portrait_grid") {
        const auto parts = split(v, ',');
        if (parts.size() != 2) throw ConfigError("config: portrait_grid is 'n_theta, n_phi'");
        cfg.portrait_theta = static_cast<int>(parse_int(parts[0]));
        cfg.portrait_phi = static_cast<int>(parse_int(parts[1]));
      }
    }
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), std::move(base));
}

} // namespace qkt
