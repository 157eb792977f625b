#include "mrid/pfg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mrid/errors.hpp"

namespace mrid {

namespace {
const double kNan = std::numeric_limits<double>::quiet_NaN();
}

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::identified: return "identified";
        case Provenance::analytic: return "analytic";
        case Provenance::oracle: return "oracle";
    }
    return "unknown";
}

PfgCurve pfg_from_lifted(const LiftedFrf& frf) {
    PfgCurve curve;
    curve.provenance = Provenance::identified;
    curve.rate = Rate::fast;
    curve.ts = frf.ts;
    curve.values.assign(frf.n, kNan);
    curve.flag.assign(frf.n, 0);
    for (int k = 0; k < frf.n; ++k) {
        if (frf.flag[k]) {
            curve.flag[k] = 1;
            continue;
        }
        double acc = 0.0;
        for (int f = 0; f < frf.fac; ++f) acc += std::norm(frf.m[k](f, 0));
        curve.values[k] = std::sqrt(acc);
    }
    return curve;
}

PfgCurve pfg_from_column(const LiftedFrf& frf, int f) {
    if (f < 0 || f >= frf.fac)
        throw std::invalid_argument("pfg_from_column: column outside [0, F)");
    const int m = frf.n / frf.fac;
    PfgCurve curve;
    curve.provenance = Provenance::identified;
    curve.rate = Rate::fast;
    curve.ts = frf.ts;
    curve.values.assign(frf.n, kNan);
    curve.flag.assign(frf.n, 0);
    for (int k = 0; k < frf.n; ++k) {
        const int src = ((k - f * m) % frf.n + frf.n) % frf.n;
        if (frf.flag[src]) {
            curve.flag[k] = 1;
            continue;
        }
        double acc = 0.0;
        for (int i = 0; i < frf.fac; ++i) acc += std::norm(frf.m[src](i, f));
        curve.values[k] = std::sqrt(acc);
    }
    return curve;
}

PfgCurve pfg_analytic(const MultirateLoop& loop) {
    const RateConfig& cfg = loop.rate;
    const int fac = cfg.fac;
    const double shift = cfg.ws_fast() / fac;
    PfgCurve curve;
    curve.provenance = Provenance::analytic;
    curve.rate = Rate::fast;
    curve.ts = cfg.tsh;
    curve.values.assign(cfg.n_fast, kNan);
    curve.flag.assign(cfg.n_fast, 0);
    for (int k = 0; k < cfg.n_fast; ++k) {
        const double wk = cfg.omega(k);
        try {
            const cd qd = q_d(loop, wk);
            const cd g21 = eval_frf(loop.plant.g21, wk);
            double acc = 0.0;
            for (int f = 0; f < fac; ++f) {
                const double wf = wk + f * shift;
                cd cf = eval_frf(loop.plant.g12, wf) * zoh_frf(wf, cfg.tsh, fac) * qd * g21 /
                        static_cast<double>(fac);
                if (f == 0) cf += eval_frf(loop.plant.g11, wk);
                acc += std::norm(cf);
            }
            curve.values[k] = std::sqrt(acc);
        } catch (const EvalError&) {
            curve.flag[k] = 1;
        }
    }
    return curve;
}

PfgCurve slow_rate_sensitivity(const MultirateLoop& loop) {
    const RateConfig& cfg = loop.rate;
    PfgCurve curve;
    curve.provenance = Provenance::analytic;
    curve.rate = Rate::slow;
    curve.ts = cfg.tsl();
    curve.values.assign(cfg.m_slow(), kNan);
    curve.flag.assign(cfg.m_slow(), 0);
    for (int k = 0; k < cfg.m_slow(); ++k) {
        const double wk = cfg.omega(k); // slow grid shares the fast grid's first M bins
        try {
            const cd kd = eval_frf(loop.controller, wk);
            const cd g22l = downsampled_frf(loop.plant.g22, wk, cfg);
            const cd den = 1.0 - kd * g22l;
            if (std::abs(den) < 1e-14) throw EvalError("singular return difference");
            curve.values[k] = 1.0 / std::abs(den);
        } catch (const EvalError&) {
            curve.flag[k] = 1;
        }
    }
    return curve;
}

double pfg_time_oracle(const MultirateLoop& loop, double omega_d, cd amplitude,
                       int settle_periods) {
    if (std::abs(amplitude) <= 0.0)
        throw std::invalid_argument("pfg_time_oracle: amplitude must be nonzero");
    const Signal w = single_sine(amplitude, omega_d, loop.rate);
    const MultirateRecord rec = simulate_multirate_loop(loop, w, settle_periods);
    return power_time(rec.z) / power_time(w);
}

} // namespace mrid
