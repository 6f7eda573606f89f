#pragma once

#include <memory>
#include <vector>

#include "horizonlab/caps.hpp"
#include "horizonlab/desitter.hpp"

namespace hzl {

// Global inverse assembled from the region inverses: cap resolvents, belt
// Duhamel solves and belt/cap Poisson terms, glued through horizon data.
// Sign -1 (retarded) solves in the order X-, X0, X+; sign +1 (advanced) in
// the order X+, X0, X-.
struct BlockSolution {
    int sign = -1;
    CapField cap_plus, cap_minus;
    BeltField belt;
    cplx u(double theta) const;
    cplx pair(const SourceFunction& g) const;
};

BlockSolution assemble_block_inverse(SigmaParam sp, int k, int sign, const SourceFunction& f);

// Max over sources of sup |u_block - u_global| / sup |u_global| on the
// default sample grid, with the global inverse of the same sign.
double block_vs_global(const std::shared_ptr<const ModeSolver>& s, int sign,
                       const std::vector<SourceFunction>& sources);

}  // namespace hzl
