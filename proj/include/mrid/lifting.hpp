#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mrid/lti.hpp"
#include "mrid/signals.hpp"

namespace mrid {

/// Frequency-lifted spectrum: at every bin k the F-vector of spectrum values
/// at the alias partners (k + f*M) mod N, f = 0..F-1. Stored for the full
/// grid (redundant by a factor F; entry 0 reproduces the unlifted spectrum).
struct LiftedSpectrum {
    int fac = 1;
    int n = 0;       // fast-grid length
    double ts = 0.0; // fast sampling time
    std::vector<cd> data; // n*fac, bin-major

    cd& entry(int k, int f) { return data[static_cast<std::size_t>(k) * fac + f]; }
    const cd& entry(int k, int f) const { return data[static_cast<std::size_t>(k) * fac + f]; }

    /// F-vector at bin k.
    Eigen::VectorXcd at(int k) const;
};

LiftedSpectrum lift(const Spectrum& spec, int fac);
Spectrum unlift(const LiftedSpectrum& lifted);

/// Per-bin F x F closed-loop matrix plus F transient vector, with per-bin
/// solver diagnostics when identified from data.
struct LiftedFrf {
    int fac = 1;
    int n = 0;
    double ts = 0.0;
    std::vector<Eigen::MatrixXcd> m;  // n entries, fac x fac
    std::vector<Eigen::VectorXcd> t;  // n entries, fac
    std::vector<double> residual;     // least-squares residual per bin
    std::vector<double> condition;    // regression condition estimate per bin
    std::vector<std::uint8_t> flag;   // 1 = unreliable bin

    double freq_hz(int k) const { return static_cast<double>(k) / (n * ts); }
    int flagged_count() const;
};

/// True lifted closed-loop matrix at bin k, assembled from evaluated block
/// FRFs: entry (i,j) = d_ij G11(w_k phi^i)
///   + (1/F) G12(w_k phi^i) I_zoh(w_k phi^i) Q_d(e^{j w_k tsl}) G21(w_k phi^j).
/// Throws EvalError when the slow-rate return difference is singular at k.
Eigen::MatrixXcd analytic_lifted_m(const MultirateLoop& loop, int k);

/// analytic_lifted_m over the whole grid with zero transients; bins where the
/// evaluation fails are flagged instead of throwing.
LiftedFrf analytic_lifted_frf(const MultirateLoop& loop);

/// Slow-rate return-difference pieces shared by the analytic paths:
/// G22,l(e^{j w tsl}) = (1/F) sum_f G22(w phi^f) I_zoh(w phi^f) and
/// Q_d = (1 - K_d G22,l)^{-1} K_d.
cd downsampled_frf(const StateSpaceModel& block, double omega, const RateConfig& cfg);
cd q_d(const MultirateLoop& loop, double omega);

} // namespace mrid
