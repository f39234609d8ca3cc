#include "qog/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qog/errors.hpp"
#include "qog/output.hpp"
#include "qog/probe_config.hpp"

namespace qog {

namespace {

constexpr std::string_view kWhitespace = " \t";

const std::vector<std::string> kSeriesNames = {"sensitivity", "envelope",
                                               "trajectory", "masteq"};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(kWhitespace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kWhitespace);
  return s.substr(b, e - b + 1);
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    return std::nullopt;
  return v;
}

// Splits on commas; returns each piece with its offset in `s`.
std::vector<std::pair<std::string_view, std::size_t>> split_list(
    std::string_view s) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto piece = s.substr(start, comma == std::string_view::npos
                                           ? std::string_view::npos
                                           : comma - start);
    const auto lead = piece.find_first_not_of(kWhitespace);
    out.emplace_back(trim(piece),
                     start + (lead == std::string_view::npos ? 0 : lead));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Entry {
  std::string_view value;
  int line = 0;
  int value_column = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Scenario run() {
    read_entries();
    Scenario sc;
    sc.name = take_string("run", "name").value_or(sc.name);
    const auto pipeline = take("run", "pipeline");
    if (!pipeline) fail_missing("run", "pipeline");
    sc.pipeline = parse_pipeline(*pipeline);
    sc.kappa = take_number("run", "kappa");
    sc.target_t = take_number("run", "target_t");
    if (const auto series = take("run", "series")) sc.series = parse_series(*series);

    sc.eta = take_number("spectral", "eta");
    sc.omega_c = take_number("spectral", "omega_c");
    sc.s = take_number("spectral", "s").value_or(sc.s);

    sc.omega0 = take_number("probe", "omega0").value_or(sc.omega0);
    sc.Omega = take_number("probe", "Omega").value_or(sc.Omega);
    sc.N = take_number("probe", "N");
    sc.r = take_number("probe", "r");

    const auto t_max = take_number("grid", "t_max");
    if (!t_max) fail_missing("grid", "t_max");
    sc.t_max = *t_max;
    sc.dt = take_number("grid", "dt");
    sc.t_min = take_number("grid", "t_min").value_or(sc.t_min);
    if (const auto stride = take("grid", "output_stride")) {
      const auto v = to_double(stride->value);
      if (!v || *v < 1.0 || std::floor(*v) != *v)
        throw ParseError("output_stride must be a positive integer",
                         stride->line, stride->value_column);
      sc.output_stride = static_cast<std::size_t>(*v);
    }

    const auto param = take("sweep", "param");
    const auto values = take("sweep", "values");
    if (param || values) {
      if (!param) fail_missing("sweep", "param");
      if (!values) fail_missing("sweep", "values");
      SweepSpec sweep;
      sweep.param = std::string(param->value);
      const auto& known = sweepable_parameters();
      if (std::find(known.begin(), known.end(), sweep.param) == known.end())
        throw ParseError("unknown sweep parameter '" + sweep.param + "'",
                         param->line, param->value_column);
      for (const auto& [piece, offset] : split_list(values->value)) {
        const auto v = to_double(piece);
        if (!v)
          throw ParseError("malformed number '" + std::string(piece) + "'",
                           values->line,
                           values->value_column + static_cast<int>(offset));
        sweep.values.push_back(*v);
      }
      sc.sweep = std::move(sweep);
    }
    return sc;
  }

 private:
  void read_entries() {
    std::string section;
    bool skipping = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos < text_.size()) {
      const auto nl = text_.find('\n', pos);
      std::string_view raw = text_.substr(
          pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text_.size() + 1 : nl + 1;
      ++line_no;
      last_line_ = line_no;
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      if (const auto hash = raw.find('#'); hash != std::string_view::npos)
        raw = raw.substr(0, hash);
      const auto first = raw.find_first_not_of(kWhitespace);
      if (first == std::string_view::npos) continue;
      const int column = static_cast<int>(first) + 1;
      const std::string_view body = trim(raw);

      if (body.front() == '[') {
        if (body.back() != ']')
          throw ParseError("unterminated section header", line_no, column);
        section = std::string(trim(body.substr(1, body.size() - 2)));
        skipping = section == "meta" || section == "report";
        if (!skipping && !known_section(section))
          throw ParseError("unknown section [" + section + "]", line_no,
                           column + 1);
        continue;
      }
      if (skipping) continue;
      const auto eq = raw.find('=');
      if (eq == std::string_view::npos)
        throw ParseError("expected key = value", line_no, column);
      if (section.empty())
        throw ParseError("key outside of any section", line_no, column);
      const std::string key(trim(raw.substr(0, eq)));
      if (key.empty()) throw ParseError("empty key", line_no, column);
      if (!known_key(section, key))
        throw ParseError("unknown key '" + key + "' in [" + section + "]",
                         line_no, column);
      const std::string full = section + "." + key;
      if (entries_.count(full))
        throw ParseError("duplicate key '" + key + "'", line_no, column);
      const std::string_view rest = raw.substr(eq + 1);
      const auto vstart = rest.find_first_not_of(kWhitespace);
      Entry e;
      e.value = trim(rest);
      e.line = line_no;
      e.value_column = static_cast<int>(
          eq + 2 + (vstart == std::string_view::npos ? 0 : vstart));
      if (e.value.empty())
        throw ParseError("missing value for '" + key + "'", line_no,
                         e.value_column);
      entries_.emplace(full, e);
    }
  }

  static bool known_section(const std::string& s) {
    return s == "spectral" || s == "probe" || s == "grid" || s == "run" ||
           s == "sweep";
  }

  static bool known_key(const std::string& section, const std::string& key) {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"spectral", {"eta", "omega_c", "s"}},
        {"probe", {"Omega", "N", "r", "omega0"}},
        {"grid", {"t_max", "dt", "t_min", "output_stride"}},
        {"run", {"pipeline", "name", "kappa", "target_t", "series"}},
        {"sweep", {"param", "values"}},
    };
    const auto& list = keys.at(section);
    return std::find(list.begin(), list.end(), key) != list.end();
  }

  std::optional<Entry> take(const std::string& section, const std::string& key) {
    const auto it = entries_.find(section + "." + key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::string> take_string(const std::string& section,
                                         const std::string& key) {
    const auto e = take(section, key);
    if (!e) return std::nullopt;
    for (const char c : e->value) {
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
            c == '-' || c == '.'))
        throw ParseError("name may contain only [A-Za-z0-9_.-]", e->line,
                         e->value_column);
    }
    return std::string(e->value);
  }

  std::optional<double> take_number(const std::string& section,
                                    const std::string& key) {
    const auto e = take(section, key);
    if (!e) return std::nullopt;
    const auto v = to_double(e->value);
    if (!v)
      throw ParseError("malformed number '" + std::string(e->value) + "'",
                       e->line, e->value_column);
    return v;
  }

  static Pipeline parse_pipeline(const Entry& e) {
    if (e.value == "ideal") return Pipeline::kIdeal;
    if (e.value == "markovian") return Pipeline::kMarkovian;
    if (e.value == "exact") return Pipeline::kExact;
    if (e.value == "asymptotic") return Pipeline::kAsymptotic;
    throw ParseError("unknown pipeline '" + std::string(e.value) +
                         "' (ideal, markovian, exact, asymptotic)",
                     e.line, e.value_column);
  }

  static std::vector<std::string> parse_series(const Entry& e) {
    std::vector<std::string> out;
    for (const auto& [piece, offset] : split_list(e.value)) {
      const std::string name(piece);
      if (std::find(kSeriesNames.begin(), kSeriesNames.end(), name) ==
          kSeriesNames.end())
        throw ParseError("unknown series '" + name + "'", e.line,
                         e.value_column + static_cast<int>(offset));
      if (std::find(out.begin(), out.end(), name) == out.end())
        out.push_back(name);
    }
    return out;
  }

  [[noreturn]] void fail_missing(const std::string& section,
                                 const std::string& key) const {
    throw ParseError("missing required key '" + key + "' in [" + section + "]",
                     last_line_ + 1, 1);
  }

  std::string_view text_;
  std::map<std::string, Entry> entries_;
  int last_line_ = 0;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError("scenario: " + what);
}

}  // namespace

const char* to_string(Pipeline p) {
  switch (p) {
    case Pipeline::kIdeal:
      return "ideal";
    case Pipeline::kMarkovian:
      return "markovian";
    case Pipeline::kExact:
      return "exact";
    case Pipeline::kAsymptotic:
      return "asymptotic";
  }
  return "ideal";
}

double Scenario::photon_number() const {
  if (N) return *N;
  if (r) return photon_number_from_squeezing(*r);
  throw DomainError("scenario: [probe] needs N or r");
}

double Scenario::squeezing() const {
  if (r) return *r;
  if (N) return squeezing_from_photon_number(*N);
  throw DomainError("scenario: [probe] needs N or r");
}

void Scenario::validate() const {
  require(N.has_value() != r.has_value(),
          "[probe] needs exactly one of N and r");
  require(!N || *N > 0.0, "N must be > 0");
  require(!r || *r > 0.0, "r must be > 0");
  require(omega0 > 0.0, "omega0 must be > 0");
  require(t_max > 0.0, "t_max must be > 0");
  require(!dt || (*dt > 0.0 && *dt <= t_max), "dt must lie in (0, t_max]");
  require(t_min >= 0.0 && t_min < t_max, "t_min must lie in [0, t_max)");
  require(!eta || *eta >= 0.0, "eta must be >= 0");
  require(!omega_c || *omega_c > 0.0, "omega_c must be > 0");
  require(s > 0.0, "s must be > 0");
  require(eta.has_value() == omega_c.has_value(),
          "[spectral] needs both eta and omega_c");
  require(!target_t || (*target_t > 0.0 && *target_t <= t_max),
          "target_t must lie in (0, t_max]");
  require(!kappa || *kappa >= 0.0, "kappa must be >= 0");
  require(!kappa || pipeline == Pipeline::kMarkovian,
          "kappa applies to the markovian pipeline only");
  switch (pipeline) {
    case Pipeline::kIdeal:
      break;
    case Pipeline::kMarkovian:
      require(kappa || has_spectral(),
              "markovian pipeline needs kappa or [spectral]");
      break;
    case Pipeline::kExact:
    case Pipeline::kAsymptotic:
      require(has_spectral(), std::string(to_string(pipeline)) +
                                  " pipeline needs [spectral] eta and omega_c");
      break;
  }
  for (const auto& name : series) {
    const bool needs_trajectory = name == "trajectory" || name == "masteq";
    require(!needs_trajectory || pipeline == Pipeline::kExact,
            "series '" + name + "' requires the exact pipeline");
  }
  if (sweep) {
    require(!sweep->values.empty(), "sweep needs at least one value");
    const auto& known = sweepable_parameters();
    require(std::find(known.begin(), known.end(), sweep->param) != known.end(),
            "unknown sweep parameter '" + sweep->param + "'");
  }
}

Scenario parse_scenario(std::string_view text) { return Parser(text).run(); }

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names = {
      "eta", "omega_c", "s", "omega0", "Omega", "N", "r",
      "t_max", "dt", "t_min", "kappa", "target_t"};
  return names;
}

void set_parameter(Scenario& sc, const std::string& name, double value) {
  if (name == "eta") sc.eta = value;
  else if (name == "omega_c") sc.omega_c = value;
  else if (name == "s") sc.s = value;
  else if (name == "omega0") sc.omega0 = value;
  else if (name == "Omega") sc.Omega = value;
  else if (name == "N") { sc.N = value; sc.r.reset(); }
  else if (name == "r") { sc.r = value; sc.N.reset(); }
  else if (name == "t_max") sc.t_max = value;
  else if (name == "dt") sc.dt = value;
  else if (name == "t_min") sc.t_min = value;
  else if (name == "kappa") sc.kappa = value;
  else if (name == "target_t") sc.target_t = value;
  else throw DomainError("unknown scenario parameter '" + name + "'");
}

std::string to_text(const Scenario& sc) {
  using output::scalar;
  std::ostringstream out;
  out << "[run]\n";
  out << "name = " << sc.name << '\n';
  out << "pipeline = " << to_string(sc.pipeline) << '\n';
  if (sc.kappa) out << "kappa = " << scalar(*sc.kappa) << '\n';
  if (sc.target_t) out << "target_t = " << scalar(*sc.target_t) << '\n';
  if (!sc.series.empty()) {
    out << "series = ";
    for (std::size_t i = 0; i < sc.series.size(); ++i)
      out << (i ? ", " : "") << sc.series[i];
    out << '\n';
  }
  if (sc.eta || sc.omega_c) {
    out << "\n[spectral]\n";
    if (sc.eta) out << "eta = " << scalar(*sc.eta) << '\n';
    if (sc.omega_c) out << "omega_c = " << scalar(*sc.omega_c) << '\n';
    out << "s = " << scalar(sc.s) << '\n';
  }
  out << "\n[probe]\n";
  out << "omega0 = " << scalar(sc.omega0) << '\n';
  out << "Omega = " << scalar(sc.Omega) << '\n';
  if (sc.N) out << "N = " << scalar(*sc.N) << '\n';
  if (sc.r) out << "r = " << scalar(*sc.r) << '\n';
  out << "\n[grid]\n";
  out << "t_max = " << scalar(sc.t_max) << '\n';
  if (sc.dt) out << "dt = " << scalar(*sc.dt) << '\n';
  out << "t_min = " << scalar(sc.t_min) << '\n';
  out << "output_stride = " << sc.output_stride << '\n';
  if (sc.sweep) {
    out << "\n[sweep]\n";
    out << "param = " << sc.sweep->param << '\n';
    out << "values = ";
    for (std::size_t i = 0; i < sc.sweep->values.size(); ++i)
      out << (i ? ", " : "") << scalar(sc.sweep->values[i]);
    out << '\n';
  }
  return out.str();
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  for (const auto& [piece, offset] : split_list(text)) {
    const auto v = to_double(piece);
    if (!v)
      throw DomainError("malformed number '" + std::string(piece) +
                        "' in list at offset " + std::to_string(offset));
    out.push_back(*v);
  }
  return out;
}

}  // namespace qog
