#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "dcesync/error.hpp"

namespace dcesync::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Shortest text that parses back to the same double.
std::string fmt(double x) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
    return out;
}

int parse_int(std::string_view text) {
    const double v = parse_real(text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError("expected an integer, got '" + std::string(text) + "'");
    return static_cast<int>(v);
}

bool parse_bool(std::string_view text) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
    if (text == "false" || text == "0" || text == "no" || text == "off") return false;
    throw ConfigError("expected a boolean, got '" + std::string(text) + "'");
}

template <class E>
E parse_enum(std::string_view text, std::initializer_list<std::pair<std::string_view, E>> options) {
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (text == name) return value;
        allowed += (allowed.empty() ? "" : ", ") + std::string(name);
    }
    throw ConfigError("expected one of {" + allowed + "}, got '" + std::string(text) + "'");
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

Key real_key(std::string name, double RunConfig::*field) {
    return {std::move(name), [field](RunConfig& c, std::string_view v) { c.*field = parse_real(v); },
            [field](const RunConfig& c) { return fmt(c.*field); }};
}

template <class Owner>
Key nested_real(std::string name, Owner RunConfig::*owner, double Owner::*field) {
    return {std::move(name), [=](RunConfig& c, std::string_view v) { (c.*owner).*field = parse_real(v); },
            [=](const RunConfig& c) { return fmt((c.*owner).*field); }};
}

const std::vector<Key>& registry() {
    using RC = RunConfig;
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        k.push_back(nested_real("omega", &RC::params, &SystemParams::omega));
        k.push_back(nested_real("omega_q1", &RC::params, &SystemParams::omega_q1));
        k.push_back(nested_real("omega_q2", &RC::params, &SystemParams::omega_q2));
        k.push_back(nested_real("g1", &RC::params, &SystemParams::g1));
        k.push_back(nested_real("g2", &RC::params, &SystemParams::g2));
        k.push_back(nested_real("alpha0", &RC::params, &SystemParams::alpha0));
        k.push_back(nested_real("omega_d", &RC::params, &SystemParams::omega_d));
        k.push_back(nested_real("tau", &RC::params, &SystemParams::tau));
        k.push_back(real_key("theta1", &RC::theta1));
        k.push_back(real_key("theta2", &RC::theta2));

        k.push_back(nested_real("dt", &RC::integrator, &IntegratorConfig::dt));
        k.push_back(nested_real("sample_interval", &RC::integrator, &IntegratorConfig::sample_interval));
        k.push_back(nested_real("t_end", &RC::integrator, &IntegratorConfig::t_end));
        k.push_back(nested_real("norm_tol", &RC::integrator, &IntegratorConfig::norm_tol));
        k.push_back(nested_real("max_step_phase", &RC::integrator, &IntegratorConfig::max_step_phase));
        k.push_back({"renormalize", [](RC& c, std::string_view v) { c.integrator.renormalize = parse_bool(v); },
                     [](const RC& c) { return std::string(c.integrator.renormalize ? "true" : "false"); }});
        k.push_back({"auto_extend", [](RC& c, std::string_view v) { c.integrator.auto_extend = parse_bool(v); },
                     [](const RC& c) { return std::string(c.integrator.auto_extend ? "true" : "false"); }});
        k.push_back({"picture",
                     [](RC& c, std::string_view v) {
                         c.integrator.picture = parse_enum<Picture>(
                             v, {{"interaction", Picture::interaction}, {"schrodinger", Picture::schrodinger}});
                     },
                     [](const RC& c) {
                         return std::string(c.integrator.picture == Picture::interaction ? "interaction" : "schrodinger");
                     }});

        k.push_back({"n_max", [](RC& c, std::string_view v) { c.n_max = parse_int(v); },
                     [](const RC& c) { return std::to_string(c.n_max); }});
        k.push_back(real_key("leakage_tol", &RC::leakage_tol));
        k.push_back({"cutoff",
                     [](RC& c, std::string_view v) {
                         c.cutoff = parse_enum<CutoffMode>(v, {{"fixed", CutoffMode::fixed}, {"converge", CutoffMode::converge}});
                     },
                     [](const RC& c) { return std::string(c.cutoff == CutoffMode::fixed ? "fixed" : "converge"); }});
        k.push_back({"max_n_max", [](RC& c, std::string_view v) { c.max_n_max = parse_int(v); },
                     [](const RC& c) { return std::to_string(c.max_n_max); }});
        k.push_back(real_key("cutoff_tol", &RC::cutoff_tol));
        k.push_back(real_key("pearson_tol", &RC::pearson_tol));

        k.push_back(nested_real("window_start", &RC::window, &PearsonWindow::t_start));
        k.push_back(nested_real("window_length", &RC::window, &PearsonWindow::delta_t));
        k.push_back(real_key("profile_length", &RC::profile_length));

        k.push_back({"extract_time", [](RC& c, std::string_view v) { c.extract_time = parse_real(v); },
                     [](const RC& c) { return fmt(c.effective_extract_time()); }});
        k.push_back({"frame",
                     [](RC& c, std::string_view v) {
                         c.frame = parse_enum<Frame>(v, {{"interaction", Frame::interaction}, {"lab", Frame::lab}});
                     },
                     [](const RC& c) { return std::string(c.frame == Frame::interaction ? "interaction" : "lab"); }});
        k.push_back(nested_real("tol_mag", &RC::tolerances, &SyncTolerances::magnitude));
        k.push_back(nested_real("tol_phase", &RC::tolerances, &SyncTolerances::phase));
        k.push_back(real_key("dominant_fraction", &RC::dominant_fraction));

        k.push_back({"sweep_axis",
                     [](RC& c, std::string_view v) {
                         c.sweep_axis = parse_enum<SweepAxis>(
                             v, {{"delta_theta", SweepAxis::delta_theta}, {"delta_g", SweepAxis::delta_g}});
                     },
                     [](const RC& c) { return std::string(to_string(c.sweep_axis)); }});
        k.push_back({"sweep_axis_values", [](RC& c, std::string_view v) { c.sweep_axis_values = parse_real_list(v); },
                     [](const RC& c) { return fmt_list(c.effective_axis_values()); }});
        k.push_back({"sweep_alpha0", [](RC& c, std::string_view v) { c.sweep_alpha0 = parse_real_list(v); },
                     [](const RC& c) { return fmt_list(c.sweep_alpha0); }});

        const auto text_key = [](std::string name, std::string RC::*field) {
            return Key{std::move(name), [field](RC& c, std::string_view v) { c.*field = std::string(v); },
                       [field](const RC& c) { return c.*field; }};
        };
        k.push_back(text_key("out", &RC::out));
        k.push_back(text_key("dump_dir", &RC::dump_dir));
        k.push_back(text_key("coefficients", &RC::coefficients));
        return k;
    }();
    return keys;
}

const Key* find_key(std::string_view name) {
    for (const Key& k : registry())
        if (k.name == name) return &k;
    return nullptr;
}

// Recursive-descent parser for products and quotients of numbers and `pi`.
class RealParser {
public:
    explicit RealParser(std::string_view s) : s_(s) {}

    double parse() {
        skip();
        double v = term();
        skip();
        if (pos_ != s_.size()) fail();
        return v;
    }

private:
    double term() {
        double v = signed_factor();
        while (true) {
            skip();
            if (peek('*')) {
                ++pos_;
                v *= signed_factor();
            } else if (peek('/')) {
                ++pos_;
                const double d = signed_factor();
                if (d == 0.0) throw ConfigError("division by zero in '" + std::string(s_) + "'");
                v /= d;
            } else if (pos_ < s_.size() && (s_.substr(pos_, 2) == "pi")) {
                v *= factor();  // implicit product, e.g. 5pi
            } else {
                return v;
            }
        }
    }

    double signed_factor() {
        skip();
        if (peek('-')) {
            ++pos_;
            return -signed_factor();
        }
        if (peek('+')) ++pos_;
        return factor();
    }

    double factor() {
        skip();
        if (s_.substr(pos_, 2) == "pi") {
            pos_ += 2;
            return std::numbers::pi;
        }
        if (peek('(')) {
            ++pos_;
            const double v = term();
            skip();
            if (!peek(')')) fail();
            ++pos_;
            return v;
        }
        std::size_t end = pos_;
        while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                                   ((s_[end] == 'e' || s_[end] == 'E') && end > pos_) ||
                                   ((s_[end] == '-' || s_[end] == '+') && end > pos_ &&
                                    (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
            ++end;
        if (end == pos_) fail();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + end, v);
        if (ec != std::errc() || ptr != s_.data() + end) fail();
        pos_ = end;
        return v;
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
    [[noreturn]] void fail() const { throw ConfigError("cannot parse number '" + std::string(s_) + "'"); }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

double parse_real(std::string_view text) {
    const double v = RealParser(trim(text)).parse();
    if (!std::isfinite(v)) throw ConfigError("non-finite number '" + std::string(text) + "'");
    return v;
}

std::vector<double> parse_real_list(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ConfigError("empty list");
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        std::vector<std::string_view> parts;
        std::size_t start = 0, colon;
        while ((colon = text.find(':', start)) != std::string_view::npos) {
            parts.push_back(text.substr(start, colon - start));
            start = colon + 1;
        }
        parts.push_back(text.substr(start));
        if (parts.size() != 3) throw ConfigError("range must be start:stop:count, got '" + std::string(text) + "'");
        const double a = parse_real(parts[0]), b = parse_real(parts[1]);
        const int n = parse_int(parts[2]);
        if (n < 1) throw ConfigError("range count must be positive");
        if (n == 1) return {a};
        for (int i = 0; i < n; ++i) out.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        out.push_back(parse_real(text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

RunConfig::RunConfig() {
    integrator.dt = 0.01;
    integrator.sample_interval = 0.5;
    integrator.t_end = 2000.0;
    sweep_alpha0 = parse_real_list("0:0.08:21");
}

void RunConfig::set(std::string_view key, std::string_view value) {
    const Key* k = find_key(key);
    if (!k) throw ConfigError("unknown key '" + std::string(key) + "'");
    value = trim(value);
    if (value.empty()) throw ConfigError("missing value for key '" + std::string(key) + "'");
    try {
        k->set(*this, value);
    } catch (const ConfigError& e) {
        throw ConfigError("key '" + std::string(key) + "': " + e.what());
    }
}

std::string RunConfig::dump() const {
    std::string out;
    for (const Key& k : registry()) {
        const std::string value = k.get(*this);
        out += value.empty() ? "# " + k.name + " =\n" : k.name + " = " + value + '\n';
    }
    return out;
}

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const Key& k : registry()) n.push_back(k.name);
        return n;
    }();
    return names;
}

std::vector<double> RunConfig::effective_axis_values() const {
    if (sweep_axis_values) return *sweep_axis_values;
    return sweep_axis == SweepAxis::delta_theta ? parse_real_list("0:1:11") : parse_real_list("-0.05:0.05:11");
}

void RunConfig::validate() const {
    const auto wrap = [](auto&& fn) {
        try {
            fn();
        } catch (const dcesync::Error& e) {
            throw ConfigError(e.what());
        }
    };
    wrap([&] { params.validate(); });
    wrap([&] { integrator.validate(); });
    wrap([&] { (void)truncation(); });
    if (max_n_max < n_max) throw ConfigError("max_n_max must be at least n_max");
    if (!(cutoff_tol > 0.0) || !(pearson_tol > 0.0)) throw ConfigError("cutoff tolerances must be positive");
    if (!(window.delta_t > 0.0) || window.t_start < 0.0) throw ConfigError("invalid Pearson window");
    if (!(profile_length > 0.0)) throw ConfigError("profile_length must be positive");
    if (!(tolerances.magnitude > 0.0) || !(tolerances.phase > 0.0)) throw ConfigError("sync tolerances must be positive");
    if (!(dominant_fraction > 0.0) || dominant_fraction > 1.0) throw ConfigError("dominant_fraction must lie in (0, 1]");
}

FockTruncation RunConfig::truncation() const { return FockTruncation(n_max, leakage_tol); }

SweepSpec RunConfig::sweep_spec() const {
    SweepSpec spec;
    spec.base = params;
    spec.theta1 = theta1;
    spec.theta2 = theta2;
    spec.axis = sweep_axis;
    spec.axis_values = effective_axis_values();
    spec.alpha0_values = sweep_alpha0;
    spec.window = window;
    spec.integrator = integrator;
    spec.integrator.max_n_max = max_n_max;
    spec.cutoff = cutoff;
    spec.n_max = n_max;
    spec.leakage_tol = leakage_tol;
    spec.pearson_tol = pearson_tol;
    spec.max_n_max = max_n_max;
    return spec;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        const std::string where = "line " + std::to_string(number) + ": ";
        if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
        const std::string key(trim(view.substr(0, eq)));
        if (key.empty()) throw ConfigError(where + "missing key");
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ConfigError(where + "duplicate key '" + key + "'");
        seen.push_back(key);
        try {
            base.set(key, view.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot read config file " + path);
    std::ostringstream buf;
    buf << file.rdbuf();
    try {
        return parse_config(buf.str(), std::move(base));
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

}  // namespace dcesync::cli
