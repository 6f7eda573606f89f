#include "horizonlab/block.hpp"

#include <algorithm>

#include "horizonlab/errors.hpp"

namespace hzl {

cplx BlockSolution::u(double theta) const {
    switch (region_of_theta(theta)) {
        case Region::CapPlus: return cap_plus.u(theta);
        case Region::Belt: return belt.u(theta);
        case Region::CapMinus: return cap_minus.u(theta);
        default: throw DomainError("block solution is not evaluated on a horizon");
    }
}

cplx BlockSolution::pair(const SourceFunction& g) const {
    return cap_plus.pair(g) + belt.pair(g) + cap_minus.pair(g);
}

BlockSolution assemble_block_inverse(SigmaParam sp, int k, int sign, const SourceFunction& f) {
    const SourceFunction fp = restrict_to(f, Region::CapPlus);
    const SourceFunction f0 = restrict_to(f, Region::Belt);
    const SourceFunction fm = restrict_to(f, Region::CapMinus);
    auto R = std::make_shared<const CapResolventMode>(sp, k);
    auto Rneg = std::make_shared<const CapResolventMode>(SigmaParam{-sp.sigma}, k);
    const cplx reg_aminus = R->regular_data().aminus;

    BlockSolution b;
    b.sign = sign > 0 ? 1 : -1;
    b.cap_plus = CapField(+1, sp, k);
    b.cap_minus = CapField(-1, sp, k);
    b.belt = BeltField(sp, k);
    // The first cap sees only its own source; its outgoing data feeds the
    // belt, whose data at the far horizon fixes the regular part of the other cap.
    CapField& first = b.sign < 0 ? b.cap_minus : b.cap_plus;
    CapField& last = b.sign < 0 ? b.cap_plus : b.cap_minus;
    const int near = b.sign < 0 ? -1 : +1;
    first.add_resolvent(1.0, Rneg, b.sign < 0 ? fm : fp);
    const cplx a_first = first.data().aminus;
    b.belt.add_duhamel(1.0, b.sign, f0);
    Eigen::Vector2cd c = b.belt.model().data_basis(near).fullPivLu().solve(Eigen::Vector2cd(0.0, a_first));
    b.belt.add_homogeneous(c[0], c[1]);
    const cplx a_belt = b.belt.data_exact(-near).aminus;
    last.add_resolvent(1.0, R, b.sign < 0 ? fp : fm);
    last.add_regular(a_belt / reg_aminus);
    return b;
}

double block_vs_global(const std::shared_ptr<const ModeSolver>& s, int sign, const std::vector<SourceFunction>& sources) {
    ModeGreens G = build_inverse(s, sign > 0 ? BranchLabel::advanced() : BranchLabel::retarded());
    const std::vector<double> grid = default_grid(*s);
    double worst = 0.0;
    for (const SourceFunction& f : sources) {
        GlobalSolution g = G.solve(f);
        BlockSolution b = assemble_block_inverse(s->sp(), s->k(), sign, f);
        double err = 0.0, nrm = 0.0;
        for (double th : grid) {
            Region r = region_of_theta(th);
            if (r == Region::HorizonPlus || r == Region::HorizonMinus) continue;
            cplx a = g.eval(th).u;
            err = std::max(err, std::abs(b.u(th) - a));
            nrm = std::max(nrm, std::abs(a));
        }
        worst = std::max(worst, nrm > 0 ? err / nrm : err);
    }
    return worst;
}

}  // namespace hzl
