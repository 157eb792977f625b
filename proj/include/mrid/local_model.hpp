#pragma once

#include <Eigen/Dense>

#include "mrid/lifting.hpp"
#include "mrid/signals.hpp"

namespace mrid {

enum class DenominatorStructure { full_matrix, scalar, identity };

/// Local rational model settings: window half-width and the polynomial
/// degrees of numerator, transient numerator and denominator.
struct LocalModelConfig {
    int wsize = 60;
    int degree_n = 3;
    int degree_l = 3;
    int degree_d = 3;
    DenominatorStructure denominator = DenominatorStructure::full_matrix;
    /// Optional gate on the equilibrated condition estimate (0 disables it,
    /// the default). Bins are always flagged on rank deficiency; the condition
    /// number is exported as a diagnostic. Healthy bins commonly sit at
    /// 1e6..1e11 because the numerator and denominator blocks trade off
    /// against each other on smooth data.
    double condition_limit = 0.0;

    void validate(int fac) const;
};

struct LocalBinSolution {
    Eigen::MatrixXcd m; // fac x fac center value
    Eigen::VectorXcd t; // fac transient center value
    double residual = 0.0;
    double condition = 0.0;
    bool flagged = false;
};

/// Per-bin weighted least squares over the window r in [-wsize, wsize]
/// (circular bin indexing), minimizing
///   sum_r || D(r) Z(k+r) - N(r) W(k+r) - L(r) ||^2
/// with D(0) = I, N(0) = Mhat, L(0) = That. Rank deficiency flags the bin
/// instead of throwing.
LocalBinSolution solve_local_bin(const LiftedSpectrum& w, const LiftedSpectrum& z, int k,
                                 const LocalModelConfig& cfg);

/// Procedure: DFT both records, lift by F, then solve every bin k in [0, N).
/// threads = 0 picks the hardware concurrency.
LiftedFrf identify_lifted_frf(const Signal& w, const Signal& z, int fac,
                              const LocalModelConfig& cfg, int threads = 0);

/// Single-rate baseline that ignores the multirate structure: the same solver
/// with F forced to 1 (no lifting).
LiftedFrf identify_direct_baseline(const Signal& w, const Signal& z,
                                   const LocalModelConfig& cfg, int threads = 0);

} // namespace mrid
