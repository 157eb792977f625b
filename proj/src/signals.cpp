#include "mrid/signals.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "mrid/errors.hpp"

namespace mrid {

namespace {

int smallest_factor(int n) {
    if (n % 2 == 0) return 2;
    for (int p = 3; p * p <= n; p += 2) {
        if (n % p == 0) return p;
    }
    return n;
}

void dft_naive(std::vector<cd>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<cd> out(n);
    for (int k = 0; k < n; ++k) {
        cd acc = 0.0;
        for (int t = 0; t < n; ++t) {
            // reduce the phase argument mod n to keep sin/cos accurate
            const long long m = (static_cast<long long>(t) * k) % n;
            acc += x[t] * std::polar(1.0, -2.0 * kPi * static_cast<double>(m) / n);
        }
        out[k] = acc;
    }
    x.swap(out);
}

// Recursive mixed-radix Cooley-Tukey; prime lengths fall back to the direct sum.
void fft_rec(std::vector<cd>& x) {
    const int n = static_cast<int>(x.size());
    if (n <= 1) return;
    const int p = smallest_factor(n);
    if (p == n) {
        dft_naive(x);
        return;
    }
    const int m = n / p;
    std::vector<std::vector<cd>> part(p, std::vector<cd>(m));
    for (int t = 0; t < m; ++t) {
        for (int r = 0; r < p; ++r) part[r][t] = x[t * p + r];
    }
    for (int r = 0; r < p; ++r) fft_rec(part[r]);
    // X[k] = sum_r exp(-j 2 pi r k / n) * Part_r[k mod m]
    for (int k = 0; k < n; ++k) {
        cd acc = 0.0;
        for (int r = 0; r < p; ++r) {
            const long long ph = (static_cast<long long>(r) * k) % n;
            acc += std::polar(1.0, -2.0 * kPi * static_cast<double>(ph) / n) * part[r][k % m];
        }
        x[k] = acc;
    }
}

} // namespace

RateConfig RateConfig::make(double tsh, int fac, int n_fast) {
    if (!(tsh > 0.0)) throw std::invalid_argument("RateConfig: tsh must be > 0");
    if (fac < 1) throw std::invalid_argument("RateConfig: downsampling factor must be >= 1");
    if (n_fast < 1) throw std::invalid_argument("RateConfig: record length must be >= 1");
    if (n_fast % fac != 0)
        throw std::invalid_argument("RateConfig: record length " + std::to_string(n_fast) +
                                    " not divisible by factor " + std::to_string(fac));
    RateConfig cfg;
    cfg.tsh = tsh;
    cfg.fac = fac;
    cfg.n_fast = n_fast;
    return cfg;
}

int RateConfig::bin_of(double omega_d, double rel_tol) const {
    const double step = 2.0 * kPi / (n_fast * tsh);
    const double pos = omega_d / step;
    const double rounded = std::round(pos);
    if (std::abs(pos - rounded) > rel_tol * std::max(1.0, std::abs(pos)))
        throw std::invalid_argument("frequency is not on the DFT grid");
    long long k = static_cast<long long>(rounded) % n_fast;
    if (k < 0) k += n_fast;
    return static_cast<int>(k);
}

Spectrum dft(const Signal& x) {
    if (x.samples.empty()) throw std::invalid_argument("dft: empty signal");
    std::vector<cd> bins = x.samples;
    fft_rec(bins);
    return Spectrum(std::move(bins), x.rate, x.ts);
}

Signal idft(const Spectrum& spec) {
    if (spec.bins.empty()) throw std::invalid_argument("idft: empty spectrum");
    const int n = spec.size();
    std::vector<cd> t(n);
    for (int k = 0; k < n; ++k) t[k] = std::conj(spec.bins[k]);
    fft_rec(t);
    for (int i = 0; i < n; ++i) t[i] = std::conj(t[i]) / static_cast<double>(n);
    return Signal(std::move(t), spec.rate, spec.ts);
}

Signal upsample(const Signal& x, int fac) {
    if (fac < 1) throw std::invalid_argument("upsample: factor must be >= 1");
    std::vector<cd> out(x.samples.size() * static_cast<std::size_t>(fac), cd(0.0));
    for (std::size_t m = 0; m < x.samples.size(); ++m) out[m * fac] = x.samples[m];
    return Signal(std::move(out), Rate::fast, x.ts / fac);
}

Signal downsample(const Signal& x, int fac) {
    if (fac < 1) throw std::invalid_argument("downsample: factor must be >= 1");
    if (x.size() % fac != 0)
        throw std::invalid_argument("downsample: length not divisible by factor");
    std::vector<cd> out(x.samples.size() / static_cast<std::size_t>(fac));
    for (std::size_t m = 0; m < out.size(); ++m) out[m] = x.samples[m * fac];
    return Signal(std::move(out), Rate::slow, x.ts * fac);
}

Signal zoh_hold(const Signal& x, int fac) {
    if (fac < 1) throw std::invalid_argument("zoh_hold: factor must be >= 1");
    std::vector<cd> out(x.samples.size() * static_cast<std::size_t>(fac));
    for (std::size_t m = 0; m < x.samples.size(); ++m) {
        for (int f = 0; f < fac; ++f) out[m * fac + f] = x.samples[m];
    }
    return Signal(std::move(out), Rate::fast, x.ts / fac);
}

cd zoh_frf(double omega, double tsh, int fac) {
    cd acc = 0.0;
    for (int f = 0; f < fac; ++f) acc += std::polar(1.0, -omega * f * tsh);
    return acc;
}

Signal multisine(const RateConfig& cfg, int k_min, int k_max, double amplitude,
                 std::uint64_t seed) {
    const int n = cfg.n_fast;
    if (k_min < 1 || k_max > n / 2 - 1 || k_min > k_max)
        throw std::invalid_argument("multisine: band must lie within [1, N/2-1]");
    std::mt19937_64 rng(seed);
    std::vector<cd> bins(n, cd(0.0));
    for (int k = k_min; k <= k_max; ++k) {
        // 53-bit draw -> phase in [0, 2*pi); identical on every platform
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        bins[k] = std::polar(1.0, 2.0 * kPi * u);
        bins[n - k] = std::conj(bins[k]);
    }
    Signal x = idft(Spectrum(std::move(bins), Rate::fast, cfg.tsh));
    for (auto& v : x.samples) v = cd(v.real(), 0.0);
    const double p = power_time(x);
    const double scale = amplitude / p;
    for (auto& v : x.samples) v *= scale;
    return x;
}

Signal single_sine(cd amplitude, double omega_d, const RateConfig& cfg) {
    return single_sine_bin(amplitude, cfg.bin_of(omega_d), cfg);
}

Signal single_sine_bin(cd amplitude, int k, const RateConfig& cfg) {
    const int n = cfg.n_fast;
    if (k < 0 || k >= n) throw std::invalid_argument("single_sine_bin: bin out of range");
    std::vector<cd> out(n);
    for (int t = 0; t < n; ++t) {
        const long long m = (static_cast<long long>(t) * k) % n;
        out[t] = amplitude * std::polar(1.0, 2.0 * kPi * static_cast<double>(m) / n);
    }
    return Signal(std::move(out), Rate::fast, cfg.tsh);
}

double power_time(const Signal& x) {
    if (x.samples.empty()) throw std::invalid_argument("power_time: empty signal");
    double acc = 0.0;
    for (const auto& v : x.samples) acc += std::norm(v);
    return std::sqrt(acc / static_cast<double>(x.samples.size()));
}

double power_freq(const Spectrum& spec) {
    if (spec.bins.empty()) throw std::invalid_argument("power_freq: empty spectrum");
    double acc = 0.0;
    for (const auto& v : spec.bins) acc += std::norm(v);
    return std::sqrt(acc / static_cast<double>(spec.bins.size()));
}

} // namespace mrid
