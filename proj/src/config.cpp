#include "inflection/config.hpp"

#include "inflection/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace inflection::cli {

evolve::RunParams RunConfig::run_params() const {
    evolve::RunParams p;
    p.order = n_expansion;
    p.t_start = t_start;
    p.t_end = t_end;
    p.dt = dt;
    p.dx = dx;
    p.x_max = x_max;
    p.eta_margin = eta_margin;
    p.tail_tol = tail_tol;
    p.snapshot_times = snapshot_times;
    return p;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line, const std::string& key) {
    double d = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(d))
        throw ConfigError("expected a number, got '" + v + "'", line, key);
    return d;
}

int to_int(const std::string& v, int line, const std::string& key) {
    int i = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), i);
    if (ec != std::errc{} || p != v.data() + v.size()) throw ConfigError("expected an integer, got '" + v + "'", line, key);
    return i;
}

template <class T, class F>
std::vector<T> to_list(const std::string& v, F conv) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(conv(item));
    }
    return out;
}

// line where each key was set, for error messages raised after parsing
using LineMap = std::map<std::string, int>;

void check(bool ok, const std::string& msg, const LineMap& lines, const std::string& key) {
    if (ok) return;
    const auto it = lines.find(key);
    throw ConfigError(msg, it == lines.end() ? 0 : it->second, key);
}

void finalize_with(RunConfig& c, const LineMap& lines) {
    check(c.mode_j >= 1 && c.mode_j <= 50, "mode_j must lie in [1, 50]", lines, "mode_j");
    check(c.n_expansion >= 0 && c.n_expansion <= 6, "n_expansion must lie in [0, 6]", lines, "n_expansion");
    check(c.t_start <= -2.0, "t_start must be <= -2", lines, "t_start");
    check(c.t_end > 0.0, "t_end must be > 0", lines, "t_end");
    check(c.dx > 0.0, "dx must be > 0", lines, "dx");
    check(c.dt > 0.0, "dt must be > 0", lines, "dt");
    check(c.dt <= 0.25 * c.dx, "dt must not exceed 0.25*dx", lines, "dt");
    check(c.x_max >= 0.0, "x_max must be >= 0 (0 = auto)", lines, "x_max");
    check(c.eta_margin > 0.0, "eta_margin must be > 0", lines, "eta_margin");
    check(c.tail_tol > 0.0, "tail_tol must be > 0", lines, "tail_tol");
    if (c.x_max == 0.0) {
        c.x_max_auto = true;
        c.x_max = evolve::auto_x_max(c.t_end, c.eta_margin);
    }
    if (c.snapshot_times.empty()) {
        c.snapshot_times.clear();
        for (double t = std::max(1.0, std::ceil(c.t_end - 4.0)); t <= c.t_end + 1e-12; t += 1.0) c.snapshot_times.push_back(t);
    }
    if (c.extraction_times.empty()) {
        c.extraction_times.clear();
        for (int k = 3; k >= 0; --k)
            if (c.t_end - k > 0.5) c.extraction_times.push_back(c.t_end - k);
    }
    for (double t : c.snapshot_times)
        check(t >= c.t_start && t <= c.t_end, fmt::format("snapshot time {} outside [t_start, t_end]", t), lines,
              "snapshot_times");
    for (double t : c.extraction_times)
        check(t > 0.5 && t <= c.t_end, fmt::format("extraction time {} outside (0.5, t_end]", t), lines,
              "extraction_times");
    std::sort(c.snapshot_times.begin(), c.snapshot_times.end());
    std::sort(c.extraction_times.begin(), c.extraction_times.end());
    check(std::adjacent_find(c.extraction_times.begin(), c.extraction_times.end()) == c.extraction_times.end(),
          "extraction_times must be distinct", lines, "extraction_times");
    check(!c.j_list.empty() && c.j_list.size() <= 5, "j_list must hold 1 to 5 modes", lines, "j_list");
    for (std::size_t a = 0; a < c.j_list.size(); ++a) {
        check(c.j_list[a] >= 1 && c.j_list[a] <= 50, "j_list entries must lie in [1, 50]", lines, "j_list");
        for (std::size_t b = a + 1; b < c.j_list.size(); ++b)
            check(c.j_list[a] != c.j_list[b], fmt::format("duplicate mode {}", c.j_list[a]), lines, "j_list");
    }
}

}  // namespace

void finalize(RunConfig& cfg) { finalize_with(cfg, {}); }

RunConfig parse_config_text(const std::string& text) {
    RunConfig c;
    LineMap lines;
    std::stringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key", lineno);
        if (val.empty()) throw ConfigError("missing value", lineno, key);
        if (lines.count(key)) throw ConfigError("key given twice", lineno, key);
        lines[key] = lineno;
        auto dbl = [&](const std::string& s) { return to_double(s, lineno, key); };
        auto itg = [&](const std::string& s) { return to_int(s, lineno, key); };
        if (key == "mode_j") c.mode_j = itg(val);
        else if (key == "n_expansion") c.n_expansion = itg(val);
        else if (key == "t_start") c.t_start = dbl(val);
        else if (key == "t_end") c.t_end = dbl(val);
        else if (key == "dx") c.dx = dbl(val);
        else if (key == "dt") c.dt = dbl(val);
        else if (key == "x_max") {
            c.x_max = dbl(val);
            c.x_max_auto = c.x_max == 0.0;
        } else if (key == "eta_margin") c.eta_margin = dbl(val);
        else if (key == "tail_tol") c.tail_tol = dbl(val);
        else if (key == "snapshot_times") c.snapshot_times = to_list<double>(val, dbl);
        else if (key == "extraction_times") c.extraction_times = to_list<double>(val, dbl);
        else if (key == "output_dir") c.output_dir = val;
        else if (key == "j_list") c.j_list = to_list<int>(val, itg);
        else throw ConfigError("unknown key", lineno, key);
    }
    finalize_with(c, lines);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_reference() {
    return R"(Config file keys (key = value, '#' comments, lists comma separated):
  mode_j           incoming mode index j                         [1]
  n_expansion      modal expansion order N_in, 0..6              [2]
  t_start          initial time, <= -2                           [-6]
  t_end            final time, > 0                               [6]
  dx               grid spacing                                  [0.01]
  dt               time step, <= 0.25*dx                         [5e-4]
  x_max            window length, 0 = t_end^3/6 + eta_margin*t_end [0]
  eta_margin       eta half-width kept beyond the beam centre     [10]
  tail_tol         allowed mass fraction beyond 0.9*x_max        [1e-10]
  snapshot_times   field/searchlight dumps     [integers in max(1,t_end-4)..t_end]
  extraction_times frames used for G0          [t_end-3, ..., t_end]
  output_dir       artifact directory                            [out]
  j_list           modes for 'scatter', at most 5                [1,2,3]
)";
}

}  // namespace inflection::cli
