#pragma once

#include <cstdint>
#include <vector>

#include "mrid/lifting.hpp"
#include "mrid/lti.hpp"
#include "mrid/signals.hpp"

namespace mrid {

enum class Provenance { identified, analytic, oracle };

/// Nonnegative gain per frequency bin; NaN marks flagged/missing bins.
struct PfgCurve {
    std::vector<double> values;
    std::vector<std::uint8_t> flag;
    Provenance provenance = Provenance::identified;
    Rate rate = Rate::fast;
    double ts = 0.0;

    int size() const { return static_cast<int>(values.size()); }
    double freq_hz(int k) const { return static_cast<double>(k) / (size() * ts); }
};

const char* provenance_name(Provenance p);

/// P(k) = sqrt(sum_f |M[f+1,1](k)|^2); flagged bins propagate as NaN.
PfgCurve pfg_from_lifted(const LiftedFrf& frf);

/// Column-f variant: the column norm read at the bin shifted by -f*M.
/// Equals pfg_from_lifted for an exact lifted closed loop.
PfgCurve pfg_from_column(const LiftedFrf& frf, int f);

/// Analytic PFG from evaluated block FRFs: sqrt(sum_f |c_f(w_k)|^2) with
/// c_0 = G11 + (1/F) G12 I_zoh Q_d G21 at w_k and
/// c_f = (1/F) G12(w_k phi^f) I_zoh(w_k phi^f) Q_d G21(w_k) for f != 0.
PfgCurve pfg_analytic(const MultirateLoop& loop);

/// |1/(1 - K_d G22,l)| on the slow grid [0, ws_slow); for plants wired as
/// G22 = -P this is the classical sensitivity 1/(1 + K_d P_l).
PfgCurve slow_rate_sensitivity(const MultirateLoop& loop);

/// Simulated single-sine power ratio ||z||_P / ||w||_P at steady state;
/// independent of the input amplitude c.
double pfg_time_oracle(const MultirateLoop& loop, double omega_d, cd amplitude,
                       int settle_periods = 2);

} // namespace mrid
