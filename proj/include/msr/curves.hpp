#pragma once

#include <map>
#include <string>
#include <vector>

namespace msr {

// Named numeric columns plus a provenance block (config hash, seeds, grid).
struct CurveTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::map<std::string, std::string> provenance;

    void add_row(std::vector<double> r);
    std::vector<double> column(const std::string& c) const;
    void validate() const; // equal row lengths, non-empty provenance
};

// "# key: value" provenance lines, then the header and rows with %.10g.
std::string to_csv(const CurveTable& t);
// the part after the provenance lines
std::string csv_body(const std::string& csv);
void write_csv(const std::string& path, const CurveTable& t);

} // namespace msr
