#include "isopyc/grid.hpp"

#include "isopyc/errors.hpp"

#include <string>

namespace isopyc {

void Grid::validate() const {
    if (d != 1 && d != 2) throw ConfigError("grid.d must be 1 or 2, got " + std::to_string(d));
    if (Nx < 8 || Nx % 2 != 0)
        throw ConfigError("grid.Nx must be even and >= 8, got " + std::to_string(Nx));
    if (Nr < 5) throw ConfigError("grid.Nr must be >= 5, got " + std::to_string(Nr));
    if (!(L > 0.0)) throw ConfigError("grid.L must be positive");
}

} // namespace isopyc
