#include "plimit/error.hpp"

#include <fmt/format.h>

namespace plimit {

NonConvergence::NonConvergence(double residual, int iterations,
                               const std::string& what)
    : Error(fmt::format("{}: no convergence after {} iterations (residual {:.3e})",
                        what, iterations, residual)),
      residual_(residual),
      iterations_(iterations) {}

MaxIterations::MaxIterations(double worst_violation, int cycles,
                             const std::string& context)
    : Error(fmt::format("{}: cycle cap {} reached, worst violation {:.3e}", context,
                        cycles, worst_violation)),
      worst_violation_(worst_violation),
      cycles_(cycles) {}

UnbalancedMasses::UnbalancedMasses(double excess)
    : Error(fmt::format("transport: unbalanced masses (excess {:.3e})", excess)),
      excess_(excess) {}

InfeasibleTolerance::InfeasibleTolerance(double gap, double required)
    : Error(fmt::format("transport: duality gap {:.3e} exceeds {:.3e}", gap,
                        required)),
      gap_(gap) {}

}  // namespace plimit
