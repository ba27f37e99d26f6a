#include "msr/dtn_io.hpp"

#include <json.hpp>

#include <fstream>

namespace msr {

using nlohmann::json;

void write_dtn(const std::string& path, const DtnRecord& r) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw StageError("cannot write " + path);
    json h{{"n", r.grid.n},
           {"N_x", r.grid.Nx},
           {"N_t", r.grid.Nt},
           {"T", r.grid.T},
           {"kind", "dtn"},
           {"stencil", to_string(r.stencil)},
           {"sigma", r.meta.sigma},
           {"xi", r.meta.xi},
           {"y", r.meta.y},
           {"side", r.meta.side},
           {"label", r.meta.label},
           {"final_state_values", r.final_state.size()},
           {"trace_levels", r.trace.nlev},
           {"trace_values", r.trace.v.size()}};
    os << h.dump() << '\n';
    os.write(reinterpret_cast<const char*>(r.final_state.v.data()),
             std::streamsize(r.final_state.size() * sizeof(cplx)));
    os.write(reinterpret_cast<const char*>(r.trace.v.data()), std::streamsize(r.trace.v.size() * sizeof(cplx)));
}

DtnRecord read_dtn(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path);
    std::string line;
    std::getline(is, line);
    DtnRecord r;
    try {
        json h = json::parse(line);
        if (h.at("kind") != "dtn") throw ConfigError("not a .dtn file");
        r.grid.n = h.at("n");
        r.grid.Nx = h.at("N_x");
        r.grid.Nt = h.at("N_t");
        r.grid.T = h.at("T");
        r.grid.validate();
        r.stencil = parse_trace_stencil(h.at("stencil"));
        r.meta.sigma = h.at("sigma");
        r.meta.xi = h.at("xi").get<Vec3>();
        r.meta.y = h.at("y").get<Vec3>();
        r.meta.side = h.at("side");
        r.meta.label = h.at("label");
        r.final_state = ComplexField(r.grid);
        r.trace = FaceSeries(r.grid, h.at("trace_levels"));
        if (h.at("final_state_values") != r.final_state.size() || h.at("trace_values") != r.trace.v.size())
            throw ConfigError("block sizes disagree with the grid");
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(path + ": bad .dtn header (" + e.what() + ")");
    }
    is.read(reinterpret_cast<char*>(r.final_state.v.data()), std::streamsize(r.final_state.size() * sizeof(cplx)));
    is.read(reinterpret_cast<char*>(r.trace.v.data()), std::streamsize(r.trace.v.size() * sizeof(cplx)));
    if (!is) throw ConfigError(path + ": payload truncated");
    return r;
}

} // namespace msr
