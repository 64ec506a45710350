#pragma once

#include <string>
#include <vector>

#include "sdo/sigmoid.hpp"

namespace sdo {

struct VerificationRow {
    std::string check;
    int samples = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct BlowupVerification {
    std::vector<VerificationRow> rows;
    bool all_pass() const;
    std::string to_csv() const; // columns: check,samples,max_residual,tolerance,pass
};

// Randomized verification of the blow-up geometry at decay order k:
// chart/global round-trips for both cylinder stages, sphere chart changes
// with the cocycle identity (deltabar1 after rbar1->deltabar1 equals the
// direct rbar1->ybar_neg1 change), all to 1e-12 on n_roundtrip samples, and
// pushforward consistency of every desingularized chart field against the
// fast system, to 1e-8 on n_pushforward interior samples per chart.
BlowupVerification verify_blowup_geometry(int k, unsigned seed,
                                          int n_roundtrip = 1000,
                                          int n_pushforward = 100);

// Smooth sigmoid with algebraic tails of order 2 (phiL0 = phiR0 = 1/4):
// phi(z) = (1 + z / sqrt(1 + z^2)) / 2. Used for k = 2 verification runs.
SigmoidSpec algebraic_sigmoid_order2();

} // namespace sdo
