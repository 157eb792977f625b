#include "mrid/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace mrid {

PsdEstimate welch_psd(const Signal& x, int segment_len, double overlap_frac,
                      WindowKind window) {
    const int n = x.size();
    if (n == 0) throw std::invalid_argument("welch_psd: empty signal");
    if (segment_len < 2 || segment_len > n)
        throw std::invalid_argument("welch_psd: segment length must be in [2, N]");
    if (!(overlap_frac >= 0.0 && overlap_frac < 1.0))
        throw std::invalid_argument("welch_psd: overlap must be in [0, 1)");

    const int hop = std::max(1, static_cast<int>(std::lround(segment_len * (1.0 - overlap_frac))));
    std::vector<double> win(segment_len);
    double wsq = 0.0;
    for (int i = 0; i < segment_len; ++i) {
        win[i] = window == WindowKind::hann
                     ? 0.5 * (1.0 - std::cos(2.0 * kPi * i / segment_len))
                     : 1.0;
        wsq += win[i] * win[i];
    }

    PsdEstimate est;
    est.ts = x.ts;
    est.freq_resolution_hz = 1.0 / (segment_len * x.ts);
    est.psd.assign(segment_len, 0.0);

    int segments = 0;
    for (int start = 0; start + segment_len <= n; start += hop) {
        Signal seg;
        seg.rate = x.rate;
        seg.ts = x.ts;
        seg.samples.resize(segment_len);
        for (int i = 0; i < segment_len; ++i) seg.samples[i] = win[i] * x.samples[start + i];
        const Spectrum spec = dft(seg);
        for (int k = 0; k < segment_len; ++k)
            est.psd[k] += std::norm(spec.bins[k]);
        ++segments;
    }
    if (segments == 0) throw std::invalid_argument("welch_psd: no full segment fits");

    // |X_w(k)|^2 / (L * sum w^2 * f_r), averaged; integrates to the squared power.
    const double scale =
        1.0 / (static_cast<double>(segments) * segment_len * wsq * est.freq_resolution_hz);
    for (auto& v : est.psd) v *= scale;
    return est;
}

std::vector<double> cps(const std::vector<double>& psd, double freq_resolution_hz) {
    std::vector<double> out(psd.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < psd.size(); ++i) {
        acc += psd[i] * freq_resolution_hz;
        out[i] = acc;
    }
    return out;
}

} // namespace mrid
