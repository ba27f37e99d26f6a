#include "msr/curves.hpp"
#include "msr/grid.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace msr {

void CurveTable::add_row(std::vector<double> r) {
    if (r.size() != columns.size())
        throw std::invalid_argument("row of " + std::to_string(r.size()) + " cells for " +
                                    std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(r));
}

std::vector<double> CurveTable::column(const std::string& c) const {
    for (std::size_t j = 0; j < columns.size(); ++j)
        if (columns[j] == c) {
            std::vector<double> out;
            for (const auto& r : rows) out.push_back(r[j]);
            return out;
        }
    throw std::invalid_argument("no column '" + c + "' in " + name);
}

void CurveTable::validate() const {
    if (provenance.empty()) throw std::invalid_argument("curve table " + name + " has no provenance");
    for (const auto& r : rows)
        if (r.size() != columns.size()) throw std::invalid_argument("ragged curve table " + name);
}

std::string to_csv(const CurveTable& t) {
    t.validate();
    std::ostringstream os;
    for (const auto& [k, v] : t.provenance) os << "# " << k << ": " << v << "\n";
    for (std::size_t j = 0; j < t.columns.size(); ++j) os << (j ? "," : "") << t.columns[j];
    os << "\n";
    char buf[32];
    for (const auto& r : t.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.10g", r[j]);
            os << (j ? "," : "") << buf;
        }
        os << "\n";
    }
    return os.str();
}

std::string csv_body(const std::string& csv) {
    std::size_t p = 0;
    while (p < csv.size() && csv[p] == '#') {
        std::size_t nl = csv.find('\n', p);
        if (nl == std::string::npos) return {};
        p = nl + 1;
    }
    return csv.substr(p);
}

void write_csv(const std::string& path, const CurveTable& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << to_csv(t);
}

} // namespace msr
