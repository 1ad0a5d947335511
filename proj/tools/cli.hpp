// cli.hpp - command-line front end for the meanforce library

#pragma once

#include <iosfwd>
#include <vector>

#include "config.hpp"

namespace meanforce::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInvalidRegime = 3;  // some validity margin reached the invalid threshold
inline constexpr int kExitUsage = 64;
inline constexpr int kExitConfig = 65;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// One temperature of the V-system figure: weak coefficients scaled by lambda^2
// and the ultrastrong coherence/population shifts.
struct Fig1Row {
    double t;
    double lambda2_g, lambda2_f0, lambda2_f1, lambda2_f2;
    double g, f0, f1, f2;  // G = <1|rho|2> + h.c., F_p = <p|rho - tau_S|p>
    double validity_margin;
};

struct Fig1Summary {
    double window_t_min;    // margin crosses the invalid threshold here (NaN if it never does)
    double marginal_t_min;  // same for the marginal threshold
    double peak_t;          // location of the largest lambda^2 g
    double peak_lambda2_g;
    bool interior_peak;
};

std::vector<Fig1Row> fig1_table(const RunConfig& cfg);
Fig1Summary summarize(const std::vector<Fig1Row>& rows, const ValidityThresholds& t);

}  // namespace meanforce::cli
