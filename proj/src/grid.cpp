#include "msr/fields.hpp"

#include <string>

namespace msr {

void Grid::validate() const {
    if (n < 3) throw ConfigError("grid dimension must be at least 3, got " + std::to_string(n));
    if (n != 3) throw ConfigError("grid-backed fields are implemented for n = 3 only");
    if (Nx < 8) throw ConfigError("N_x must be at least 8, got " + std::to_string(Nx));
    if (Nx % 2 != 0) throw ConfigError("N_x must be even (the domain centre is a node)");
    if (Nt < 16) throw ConfigError("N_t must be at least 16, got " + std::to_string(Nt));
    if (!(T > 0.0)) throw ConfigError("time horizon must be positive");
}

std::vector<unsigned char> VectorField::support_mask() const {
    std::vector<unsigned char> m(grid.nodes(), 0);
    for (std::size_t p = 0; p < m.size(); ++p)
        m[p] = (c[0][p] != 0.0 || c[1][p] != 0.0 || c[2][p] != 0.0) ? 1 : 0;
    return m;
}

double VectorField::max_abs() const {
    double mx = 0.0;
    for (std::size_t p = 0; p < grid.nodes(); ++p) mx = std::max(mx, norm(at(p)));
    return mx;
}

} // namespace msr
