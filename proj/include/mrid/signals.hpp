#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace mrid {

using cd = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Sampling-rate tag carried by signals and spectra.
enum class Rate { fast, slow };

/// Sampling-rate geometry of one multirate experiment: fast sampling time tsh,
/// downsampling factor F and fast-rate record length N, plus the derived
/// slow-rate quantities and the DFT frequency grid w_k = 2*pi*k/(N*tsh).
struct RateConfig {
    double tsh = 0.0; // fast sampling time [s]
    int fac = 1;      // downsampling factor F
    int n_fast = 0;   // fast-rate record length N

    /// Validates tsh > 0, F >= 1 and F | N.
    static RateConfig make(double tsh, int fac, int n_fast);

    double tsl() const { return fac * tsh; }
    int m_slow() const { return n_fast / fac; }
    double ws_fast() const { return 2.0 * kPi / tsh; }  // [rad/s]
    double ws_slow() const { return ws_fast() / fac; }  // [rad/s]
    double fs_fast_hz() const { return 1.0 / tsh; }
    double fs_slow_hz() const { return 1.0 / tsl(); }

    /// Fast-grid frequency of bin k in rad/s; k in [0, N).
    double omega(int k) const { return 2.0 * kPi * k / (n_fast * tsh); }
    double freq_hz(int k) const { return static_cast<double>(k) / (n_fast * tsh); }

    int length(Rate r) const { return r == Rate::fast ? n_fast : m_slow(); }
    double ts(Rate r) const { return r == Rate::fast ? tsh : tsl(); }

    /// Nearest grid bin for an on-grid frequency; throws if omega_d is off-grid.
    int bin_of(double omega_d, double rel_tol = 1e-9) const;
};

/// Finite complex-valued discrete-time record at one rate.
struct Signal {
    std::vector<cd> samples;
    Rate rate = Rate::fast;
    double ts = 0.0; // sampling time of this record [s]

    Signal() = default;
    Signal(std::vector<cd> s, Rate r, double sampling_time)
        : samples(std::move(s)), rate(r), ts(sampling_time) {}

    int size() const { return static_cast<int>(samples.size()); }
};

/// DFT of a Signal; bins[k] corresponds to w_k = 2*pi*k/(len*ts).
struct Spectrum {
    std::vector<cd> bins;
    Rate rate = Rate::fast;
    double ts = 0.0;

    Spectrum() = default;
    Spectrum(std::vector<cd> b, Rate r, double sampling_time)
        : bins(std::move(b)), rate(r), ts(sampling_time) {}

    int size() const { return static_cast<int>(bins.size()); }
    double freq_hz(int k) const { return static_cast<double>(k) / (size() * ts); }
};

/// X(k) = sum_n x(n) exp(-j 2 pi n k / len). Mixed-radix, any length.
Spectrum dft(const Signal& x);

/// Inverse of dft(); idft(dft(x)) == x to round-off.
Signal idft(const Spectrum& spec);

/// Insert F-1 zeros after each slow sample; output length F*M.
Signal upsample(const Signal& x, int fac);

/// Keep every F-th sample; length must be divisible by F.
Signal downsample(const Signal& x, int fac);

/// Zero-order hold interpolation: each slow sample repeated F times.
/// No 1/F normalization is applied.
Signal zoh_hold(const Signal& x, int fac);

/// Frequency response of the hold filter, sum_{f=0}^{F-1} exp(-j w f tsh).
cd zoh_frf(double omega, double tsh, int fac);

/// Random-phase multisine over bins [k_min, k_max] (and their conjugate
/// mirrors), scaled so power_time(result) == amplitude. Real-valued output,
/// bit-identical for identical seeds (mt19937_64, raw 53-bit phase draws).
Signal multisine(const RateConfig& cfg, int k_min, int k_max, double amplitude,
                 std::uint64_t seed);

/// w(n) = c * exp(j w_d n tsh); w_d must lie on the fast grid.
Signal single_sine(cd amplitude, double omega_d, const RateConfig& cfg);

/// Same, addressed by grid bin k in [0, N).
Signal single_sine_bin(cd amplitude, int k, const RateConfig& cfg);

/// sqrt((1/N) sum_n |x(n)|^2)
double power_time(const Signal& x);

/// sqrt((1/N) sum_k |X(k)|^2); equals sqrt(N) * power_time(idft-mate).
double power_freq(const Spectrum& spec);

} // namespace mrid
