#include "msr/fld_io.hpp"

#include <json.hpp>

#include <fstream>

namespace msr {

using nlohmann::json;

namespace {

json header(const Grid& g, const std::string& kind, int comps, int levels, bool cpx) {
    return json{{"n", g.n}, {"N_x", g.Nx}, {"N_t", g.Nt}, {"T", g.T}, {"kind", kind},
                {"components", comps}, {"levels", levels}, {"complex", cpx}};
}

std::ofstream open_out(const std::string& path, const json& h) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw StageError("cannot write " + path);
    os << h.dump() << '\n';
    return os;
}

void put(std::ofstream& os, const double* p, std::size_t n) {
    os.write(reinterpret_cast<const char*>(p), std::streamsize(n * sizeof(double)));
}

struct Reader {
    json h;
    Grid g;
    std::ifstream is;
    explicit Reader(const std::string& path) : is(path, std::ios::binary) {
        if (!is) throw ConfigError("cannot open " + path);
        std::string line;
        std::getline(is, line);
        try {
            h = json::parse(line);
            g.n = h.at("n");
            g.Nx = h.at("N_x");
            g.Nt = h.at("N_t");
            g.T = h.at("T");
        } catch (const std::exception& e) {
            throw ConfigError(path + ": bad .fld header (" + e.what() + ")");
        }
        g.validate();
    }
    void expect(const std::string& kind) {
        if (h.at("kind") != kind)
            throw ConfigError("field kind mismatch: expected " + kind + ", file has " +
                              h.at("kind").get<std::string>());
    }
    void get(double* p, std::size_t n) {
        is.read(reinterpret_cast<char*>(p), std::streamsize(n * sizeof(double)));
        if (!is) throw ConfigError(".fld payload truncated");
    }
};

} // namespace

void write_fld(const std::string& path, const RealField& f) {
    auto os = open_out(path, header(f.grid, "scalar", 1, 1, false));
    put(os, f.v.data(), f.v.size());
}

void write_fld(const std::string& path, const ComplexField& f) {
    auto os = open_out(path, header(f.grid, "complex", 1, 1, true));
    put(os, reinterpret_cast<const double*>(f.v.data()), 2 * f.v.size());
}

void write_fld(const std::string& path, const VectorField& f) {
    auto os = open_out(path, header(f.grid, "vector", 3, 1, false));
    for (const auto& c : f.c) put(os, c.v.data(), c.v.size());
}

void write_fld(const std::string& path, const CurlField& f) {
    auto os = open_out(path, header(f.grid, "curl", 3, 1, false));
    for (const auto& c : f.s) put(os, c.v.data(), c.v.size());
}

void write_fld(const std::string& path, const ScalarSpaceTimeField& f) {
    auto os = open_out(path, header(f.grid, "scalar_spacetime", 1, f.grid.levels(), false));
    put(os, f.v.data(), f.v.size());
}

std::string fld_kind(const std::string& path) { return Reader(path).h.at("kind"); }

RealField read_fld_scalar(const std::string& path) {
    Reader r(path);
    r.expect("scalar");
    RealField f(r.g);
    r.get(f.v.data(), f.v.size());
    return f;
}

ComplexField read_fld_complex(const std::string& path) {
    Reader r(path);
    r.expect("complex");
    ComplexField f(r.g);
    r.get(reinterpret_cast<double*>(f.v.data()), 2 * f.v.size());
    return f;
}

VectorField read_fld_vector(const std::string& path) {
    Reader r(path);
    r.expect("vector");
    VectorField f(r.g);
    for (auto& c : f.c) r.get(c.v.data(), c.v.size());
    return f;
}

CurlField read_fld_curl(const std::string& path) {
    Reader r(path);
    r.expect("curl");
    CurlField f(r.g);
    for (auto& c : f.s) r.get(c.v.data(), c.v.size());
    return f;
}

ScalarSpaceTimeField read_fld_spacetime(const std::string& path) {
    Reader r(path);
    r.expect("scalar_spacetime");
    ScalarSpaceTimeField f(r.g);
    r.get(f.v.data(), f.v.size());
    return f;
}

} // namespace msr
