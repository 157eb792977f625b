#pragma once

#include <vector>

#include "mrid/signals.hpp"

namespace mrid {

enum class WindowKind { hann, rect };

struct PsdEstimate {
    std::vector<double> psd;        // two-sided, one value per segment bin
    double freq_resolution_hz = 0.0;
    double ts = 0.0;
};

/// Averaged modified periodograms. Normalized so that
/// sum_k psd[k] * f_r approximates the squared time-domain power
/// (1/N) sum_n |x(n)|^2.
PsdEstimate welch_psd(const Signal& x, int segment_len, double overlap_frac,
                      WindowKind window = WindowKind::hann);

/// Cumulative power spectrum: CPS(k) = sum_{i<=k} psd(i) * f_r.
std::vector<double> cps(const std::vector<double>& psd, double freq_resolution_hz);

} // namespace mrid
