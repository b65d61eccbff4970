#pragma once

#include "isopyc/field.hpp"
#include "isopyc/grid.hpp"
#include "isopyc/params.hpp"
#include "isopyc/profile.hpp"
#include "isopyc/state.hpp"

namespace isopyc {

/// Fields on the Eulerian strip z in [-1, 0], uniform grid with Nz levels,
/// row index j ordered bottom-up: z_j = -1 + j*dz. Carries the total density.
struct EulerianState {
    int d = 1;
    int Nx = 0;
    double L = 0.0;
    int Nz = 0;
    double t = 0.0;
    std::vector<double> z;  ///< ascending, z[0] = -1, z[Nz-1] = 0
    std::vector<Field> V;   ///< d components, rows indexed by z
    Field w;
    Field rho; ///< total density, strictly decreasing in z

    double dz() const { return 1.0 / (Nz - 1); }
};

/// Column map z(x,r) = -r + eps*eta(x,r); strictly decreasing in r with
/// endpoints exactly 0 and -1 for admissible states.
Field eta_to_z(const FlowState& state, const SimParams& params, const Grid& grid);

/// Change of variables to the Eulerian strip: monotone cubic regridding per
/// column, density reconstructed from rho(x, z(x,r)) = rho(r), and the
/// background-shear compensation applied to the horizontal velocity.
EulerianState to_eulerian(const FlowState& state, const StratificationProfile& prof,
                          const SimParams& params, int Nz);

/// Inverse change of variables: per column, solve rho(x,z) = rho(r) for z(r)
/// by monotone root-finding (bisection + Newton polish), set eps*eta = z + r,
/// regrid the velocities and undo the shear compensation.
FlowState from_eulerian(const EulerianState& eul, const StratificationProfile& prof,
                        const SimParams& params, const Grid& grid);

} // namespace isopyc
