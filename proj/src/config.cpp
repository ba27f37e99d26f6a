#include "msr/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace msr {

double TomlValue::number(const std::string& key) const {
    if (!is_number()) throw ConfigError(key + ": expected a number");
    return std::get<double>(v);
}

bool TomlValue::boolean(const std::string& key) const {
    if (!std::holds_alternative<bool>(v)) throw ConfigError(key + ": expected true or false");
    return std::get<bool>(v);
}

const std::string& TomlValue::string(const std::string& key) const {
    if (!std::holds_alternative<std::string>(v)) throw ConfigError(key + ": expected a string");
    return std::get<std::string>(v);
}

const std::vector<TomlValue>& TomlValue::array(const std::string& key) const {
    if (!is_array()) throw ConfigError(key + ": expected an array");
    return std::get<std::vector<TomlValue>>(v);
}

std::vector<double> TomlValue::numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& x : array(key)) out.push_back(x.number(key));
    return out;
}

namespace {

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    int line = 1;

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "config line " << line << ": " << what;
        throw ConfigError(os.str());
    }
    void skip_ws(bool newlines) {
        while (i < s.size()) {
            char c = s[i];
            if (c == '#') {
                while (i < s.size() && s[i] != '\n') ++i;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++i;
            } else if (c == '\n' && newlines) {
                ++line;
                ++i;
            } else {
                break;
            }
        }
    }
    bool eof() const { return i >= s.size(); }
    char peek() const { return eof() ? '\0' : s[i]; }
};

TomlValue parse_value(Cursor& c) {
    c.skip_ws(false);
    char ch = c.peek();
    TomlValue out;
    if (ch == '"') {
        std::string str;
        ++c.i;
        while (!c.eof() && c.peek() != '"') {
            if (c.peek() == '\n') c.fail("unterminated string");
            if (c.peek() == '\\') {
                ++c.i;
                char e = c.peek();
                str += e == 'n' ? '\n' : e == 't' ? '\t' : e;
            } else {
                str += c.peek();
            }
            ++c.i;
        }
        if (c.eof()) c.fail("unterminated string");
        ++c.i;
        out.v = str;
    } else if (ch == '[') {
        ++c.i;
        std::vector<TomlValue> arr;
        for (;;) {
            c.skip_ws(true);
            if (c.peek() == ']') {
                ++c.i;
                break;
            }
            arr.push_back(parse_value(c));
            c.skip_ws(true);
            if (c.peek() == ',') {
                ++c.i;
            } else if (c.peek() != ']') {
                c.fail("expected ',' or ']' in array");
            }
        }
        out.v = std::move(arr);
    } else {
        std::size_t j = c.i;
        while (j < c.s.size() && !std::isspace(static_cast<unsigned char>(c.s[j])) && c.s[j] != ',' &&
               c.s[j] != ']' && c.s[j] != '#')
            ++j;
        std::string tok = c.s.substr(c.i, j - c.i);
        c.i = j;
        if (tok == "true") {
            out.v = true;
        } else if (tok == "false") {
            out.v = false;
        } else {
            std::string t;
            for (char x : tok)
                if (x != '_') t += x;
            if (t == "inf" || t == "+inf") {
                out.v = std::numeric_limits<double>::infinity();
                return out;
            }
            std::size_t used = 0;
            double d = 0.0;
            try {
                d = std::stod(t, &used);
            } catch (...) {
                c.fail("cannot parse value '" + tok + "'");
            }
            if (used != t.size() || t.empty()) c.fail("cannot parse value '" + tok + "'");
            out.v = d;
        }
    }
    return out;
}

bool key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'; }

} // namespace

std::map<std::string, TomlValue> parse_toml(const std::string& text) {
    std::map<std::string, TomlValue> out;
    Cursor c{text};
    std::string table;
    for (;;) {
        c.skip_ws(true);
        if (c.eof()) break;
        if (c.peek() == '[') {
            ++c.i;
            std::size_t j = c.i;
            while (j < text.size() && key_char(text[j])) ++j;
            if (j >= text.size() || text[j] != ']' || j == c.i) c.fail("bad table header");
            table = text.substr(c.i, j - c.i);
            c.i = j + 1;
        } else {
            std::size_t j = c.i;
            while (j < text.size() && key_char(text[j])) ++j;
            if (j == c.i) c.fail("expected a key");
            std::string key = text.substr(c.i, j - c.i);
            c.i = j;
            c.skip_ws(false);
            if (c.peek() != '=') c.fail("expected '=' after " + key);
            ++c.i;
            std::string full = table.empty() ? key : table + "." + key;
            if (out.count(full)) c.fail("duplicate key " + full);
            out[full] = parse_value(c);
        }
        c.skip_ws(false);
        if (!c.eof() && c.peek() != '\n') c.fail("trailing characters");
    }
    return out;
}

std::string to_string(RunMode m) {
    switch (m) {
    case RunMode::UnitChecks: return "unit-checks";
    case RunMode::Forward: return "forward";
    case RunMode::GoScan: return "go-scan";
    case RunMode::Magnetic: return "magnetic";
    case RunMode::Electric: return "electric";
    case RunMode::Coupled: return "coupled";
    }
    return "?";
}

RunMode parse_run_mode(const std::string& s) {
    for (RunMode m : {RunMode::UnitChecks, RunMode::Forward, RunMode::GoScan, RunMode::Magnetic, RunMode::Electric,
                      RunMode::Coupled})
        if (to_string(m) == s) return m;
    throw ConfigError("unknown mode '" + s + "'");
}

std::string config_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void ExperimentConfig::validate() const {
    grid.validate();
    if (jobs < 1) throw ConfigError("jobs must be >= 1");
    for (double e : magnetic.etas)
        if (!(e >= 0.0) || e >= 1.0) throw ConfigError("magnetic.etas must lie in [0, 1)");
    for (double e : electric.etas)
        if (!(e >= 0.0) || e >= 1.0) throw ConfigError("electric.etas must lie in [0, 1)");
    if (magnetic.sigma_min > magnetic.sigma_cap) throw ConfigError("magnetic.sigma_min exceeds sigma_cap");
    if (magnetic_sigma > magnetic.sigma_cap) throw ConfigError("magnetic.sigma exceeds sigma_cap");
    if (!(magnetic.c_sigma > 0.0) || !(magnetic.c_R > 0.0)) throw ConfigError("magnetic: c_sigma and c_R must be > 0");
    if (!(electric.sigma > 0.0) || !(electric.a > 0.0) || !(electric.alpha_cap > 0.0))
        throw ConfigError("electric: sigma, a and alpha_cap must be > 0");
    if (electric.degree < 0 || electric.degree > electric.max_degree)
        throw ConfigError("electric.degree must lie in [0, max_degree]");
    for (const std::string& f : {magnetic_fixture.file, electric_fixture.file})
        if (!f.empty() && !std::filesystem::exists(f)) throw ConfigError("fixture file not found: " + f);
    for (double s : go_sigmas)
        if (!(s > 0.0)) throw ConfigError("go.sigmas must be positive");
}

void ExperimentConfig::set_seed(std::uint64_t s) {
    seed = s;
    magnetic.seed = s;
    electric.seed = stream_seed(s, 0xe1);
}

void ExperimentConfig::set_jobs(int j) {
    if (j < 1) throw ConfigError("jobs must be >= 1");
    jobs = magnetic.jobs = electric.jobs = j;
}

namespace {

std::string num(double x) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    std::string s = buf;
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string nums(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + "]";
}

std::string vec(const Vec3& v) { return nums({v[0], v[1], v[2]}); }

std::string quoted(const std::string& s) {
    std::string o = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') o += '\\';
        o += ch;
    }
    return o + "\"";
}

void echo_bumps(std::ostringstream& os, const std::vector<Bump>& bs, bool directions) {
    std::string c = "[", r = "[", a = "[", d = "[";
    for (std::size_t i = 0; i < bs.size(); ++i) {
        const char* sep = i ? ", " : "";
        c += sep + vec(bs[i].center);
        r += sep + num(bs[i].radius);
        a += sep + num(bs[i].amplitude);
        d += sep + vec(bs[i].direction);
    }
    os << "centers = " << c << "]\nradii = " << r << "]\namplitudes = " << a << "]\n";
    if (directions) os << "directions = " << d << "]\n";
}

std::string u1_name(U1Mode m) { return m == U1Mode::Go ? "go" : "carrier"; }

} // namespace

std::string echo_toml(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "mode = " << quoted(to_string(c.mode)) << "\n";
    os << "run_id = " << quoted(c.run_id) << "\n";
    os << "out_dir = " << quoted(c.out_dir) << "\n";
    os << "seed = " << c.seed << "\n";
    os << "jobs = " << c.jobs << "\n";
    os << "\n[grid]\nNx = " << c.grid.Nx << "\nNt = " << c.grid.Nt << "\nT = " << num(c.grid.T) << "\n";

    os << "\n[magnetic_fixture]\n";
    echo_bumps(os, c.magnetic_fixture.bumps, true);
    os << "divergence_free = " << (c.magnetic_fixture.divergence_free ? "true" : "false") << "\n";
    if (!c.magnetic_fixture.file.empty()) os << "file = " << quoted(c.magnetic_fixture.file) << "\n";

    const auto& er = c.electric_fixture.recipe;
    os << "\n[electric_fixture]\n";
    echo_bumps(os, er.bumps, false);
    os << "profile = " << quoted(to_string(er.profile)) << "\nt0 = " << num(er.t0) << "\nwidth = " << num(er.width)
       << "\n";
    if (!c.electric_fixture.file.empty()) os << "file = " << quoted(c.electric_fixture.file) << "\n";

    const auto& m = c.magnetic;
    os << "\n[magnetic]\netas = " << nums(m.etas) << "\nc_sigma = " << num(m.c_sigma)
       << "\nsigma_min = " << num(m.sigma_min) << "\nsigma_cap = " << num(m.sigma_cap) << "\nc_R = " << num(m.c_R)
       << "\nxi_margin = " << num(m.xi_margin) << "\nfloor_tol = " << num(m.floor_tol)
       << "\nsigma = " << num(c.magnetic_sigma) << "\nu1 = " << quoted(u1_name(m.sample.probe.u1))
       << "\nsubtract_volume = " << (m.sample.probe.subtract_volume ? "true" : "false") << "\n";

    const auto& e = c.electric;
    os << "\n[electric]\netas = " << nums(e.etas) << "\nsigma = " << num(e.sigma) << "\na = " << num(e.a)
       << "\nalpha_cap = " << num(e.alpha_cap) << "\nfit_radius = " << num(e.fit_radius)
       << "\ndegree = " << e.degree << "\nmax_degree = " << e.max_degree << "\nalpha = " << num(c.electric_alpha)
       << "\nsample_sigma = " << num(c.electric_sigma) << "\nu1 = " << quoted(u1_name(e.probe.u1)) << "\n";

    os << "\n[go]\nsigmas = " << nums(c.go_sigmas) << "\nxi = " << vec(c.go_xi) << "\n";
    return os.str();
}

namespace {

Vec3 vec3(const TomlValue& v, const std::string& key) {
    auto x = v.numbers(key);
    if (x.size() != 3) throw ConfigError(key + ": expected three numbers");
    return {x[0], x[1], x[2]};
}

U1Mode parse_u1(const std::string& s) {
    if (s == "go") return U1Mode::Go;
    if (s == "carrier") return U1Mode::Carrier;
    throw ConfigError("u1 must be \"go\" or \"carrier\"");
}

int as_int(const TomlValue& v, const std::string& key) {
    double d = v.number(key);
    if (d != std::floor(d)) throw ConfigError(key + ": expected an integer");
    return int(d);
}

std::vector<Bump> read_bumps(const std::map<std::string, TomlValue>& kv, const std::string& t, std::vector<Bump> def,
                             std::set<std::string>& used) {
    auto has = [&](const std::string& k) { return kv.count(t + "." + k) > 0; };
    auto get = [&](const std::string& k) -> const TomlValue& {
        used.insert(t + "." + k);
        return kv.at(t + "." + k);
    };
    if (has("centers")) {
        const auto& cs = get("centers").array(t + ".centers");
        std::vector<Bump> out(cs.size(), def.empty() ? Bump{} : def.front());
        for (std::size_t i = 0; i < cs.size(); ++i) out[i].center = vec3(cs[i], t + ".centers");
        auto per = [&](const std::string& k, auto apply) {
            if (!has(k)) return;
            const auto& a = get(k).array(t + "." + k);
            if (a.size() != out.size()) throw ConfigError(t + "." + k + ": length differs from centers");
            for (std::size_t i = 0; i < a.size(); ++i) apply(out[i], a[i]);
        };
        per("radii", [&](Bump& b, const TomlValue& v) { b.radius = v.number(t + ".radii"); });
        per("amplitudes", [&](Bump& b, const TomlValue& v) { b.amplitude = v.number(t + ".amplitudes"); });
        per("directions", [&](Bump& b, const TomlValue& v) { b.direction = vec3(v, t + ".directions"); });
        return out;
    }
    Bump b = def.empty() ? Bump{} : def.front();
    if (has("center")) b.center = vec3(get("center"), t + ".center");
    if (has("radius")) b.radius = get("radius").number(t + ".radius");
    if (has("amplitude")) b.amplitude = get("amplitude").number(t + ".amplitude");
    if (has("direction")) b.direction = vec3(get("direction"), t + ".direction");
    return {b};
}

} // namespace

ExperimentConfig config_from_text(const std::string& text) {
    auto kv = parse_toml(text);
    std::set<std::string> used;
    auto opt = [&](const std::string& k) -> const TomlValue* {
        auto it = kv.find(k);
        if (it == kv.end()) return nullptr;
        used.insert(k);
        return &it->second;
    };
    ExperimentConfig c;
    c.source_text = text;
    if (auto v = opt("mode")) c.mode = parse_run_mode(v->string("mode"));
    if (auto v = opt("run_id")) c.run_id = v->string("run_id");
    if (auto v = opt("out_dir")) c.out_dir = v->string("out_dir");
    if (auto v = opt("seed")) c.seed = std::uint64_t(as_int(*v, "seed"));
    if (auto v = opt("jobs")) c.jobs = as_int(*v, "jobs");

    if (auto v = opt("grid.Nx")) c.grid.Nx = as_int(*v, "grid.Nx");
    if (auto v = opt("grid.Nt")) c.grid.Nt = as_int(*v, "grid.Nt");
    if (auto v = opt("grid.T")) c.grid.T = v->number("grid.T");

    c.magnetic_fixture.bumps = read_bumps(kv, "magnetic_fixture", c.magnetic_fixture.bumps, used);
    if (auto v = opt("magnetic_fixture.divergence_free"))
        c.magnetic_fixture.divergence_free = v->boolean("magnetic_fixture.divergence_free");
    if (auto v = opt("magnetic_fixture.file")) c.magnetic_fixture.file = v->string("magnetic_fixture.file");

    c.electric_fixture.recipe.bumps = read_bumps(kv, "electric_fixture", c.electric_fixture.recipe.bumps, used);
    if (auto v = opt("electric_fixture.profile"))
        c.electric_fixture.recipe.profile = parse_time_profile(v->string("electric_fixture.profile"));
    if (auto v = opt("electric_fixture.t0")) c.electric_fixture.recipe.t0 = v->number("electric_fixture.t0");
    if (auto v = opt("electric_fixture.width")) c.electric_fixture.recipe.width = v->number("electric_fixture.width");
    if (auto v = opt("electric_fixture.file")) c.electric_fixture.file = v->string("electric_fixture.file");

    auto& m = c.magnetic;
    if (auto v = opt("magnetic.etas")) m.etas = v->numbers("magnetic.etas");
    if (auto v = opt("magnetic.c_sigma")) m.c_sigma = v->number("magnetic.c_sigma");
    if (auto v = opt("magnetic.sigma_min")) m.sigma_min = v->number("magnetic.sigma_min");
    if (auto v = opt("magnetic.sigma_cap")) m.sigma_cap = v->number("magnetic.sigma_cap");
    if (auto v = opt("magnetic.c_R")) m.c_R = v->number("magnetic.c_R");
    if (auto v = opt("magnetic.xi_margin")) m.xi_margin = v->number("magnetic.xi_margin");
    if (auto v = opt("magnetic.floor_tol")) m.floor_tol = v->number("magnetic.floor_tol");
    if (auto v = opt("magnetic.sigma")) c.magnetic_sigma = v->number("magnetic.sigma");
    if (auto v = opt("magnetic.u1")) m.sample.probe.u1 = parse_u1(v->string("magnetic.u1"));
    if (auto v = opt("magnetic.subtract_volume")) m.sample.probe.subtract_volume = v->boolean("magnetic.subtract_volume");

    auto& e = c.electric;
    if (auto v = opt("electric.etas")) e.etas = v->numbers("electric.etas");
    if (auto v = opt("electric.sigma")) e.sigma = v->number("electric.sigma");
    if (auto v = opt("electric.a")) e.a = v->number("electric.a");
    if (auto v = opt("electric.alpha_cap")) e.alpha_cap = v->number("electric.alpha_cap");
    if (auto v = opt("electric.fit_radius")) e.fit_radius = v->number("electric.fit_radius");
    if (auto v = opt("electric.degree")) e.degree = as_int(*v, "electric.degree");
    if (auto v = opt("electric.max_degree")) e.max_degree = as_int(*v, "electric.max_degree");
    if (auto v = opt("electric.alpha")) c.electric_alpha = v->number("electric.alpha");
    if (auto v = opt("electric.sample_sigma")) c.electric_sigma = v->number("electric.sample_sigma");
    if (auto v = opt("electric.u1")) e.probe.u1 = parse_u1(v->string("electric.u1"));

    if (auto v = opt("go.sigmas")) c.go_sigmas = v->numbers("go.sigmas");
    if (auto v = opt("go.xi")) c.go_xi = vec3(*v, "go.xi");

    for (const auto& [k, _] : kv)
        if (!used.count(k)) throw ConfigError("unknown config key '" + k + "'");
    c.set_seed(c.seed);
    c.set_jobs(c.jobs);
    if (c.run_id.empty()) c.run_id = to_string(c.mode) + "-" + config_hash(text).substr(0, 8);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return config_from_text(ss.str());
}

} // namespace msr
