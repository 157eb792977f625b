#include "mrid/lifting.hpp"

#include <cmath>
#include <stdexcept>

#include "mrid/errors.hpp"

namespace mrid {

Eigen::VectorXcd LiftedSpectrum::at(int k) const {
    Eigen::VectorXcd v(fac);
    for (int f = 0; f < fac; ++f) v(f) = entry(k, f);
    return v;
}

int LiftedFrf::flagged_count() const {
    int count = 0;
    for (auto f : flag) count += f != 0;
    return count;
}

LiftedSpectrum lift(const Spectrum& spec, int fac) {
    const int n = spec.size();
    if (fac < 1) throw std::invalid_argument("lift: factor must be >= 1");
    if (n == 0 || n % fac != 0)
        throw std::invalid_argument("lift: spectrum length not divisible by factor");
    const int m = n / fac;
    LiftedSpectrum out;
    out.fac = fac;
    out.n = n;
    out.ts = spec.ts;
    out.data.resize(static_cast<std::size_t>(n) * fac);
    for (int k = 0; k < n; ++k) {
        for (int f = 0; f < fac; ++f) out.entry(k, f) = spec.bins[(k + f * m) % n];
    }
    return out;
}

Spectrum unlift(const LiftedSpectrum& lifted) {
    std::vector<cd> bins(lifted.n);
    for (int k = 0; k < lifted.n; ++k) bins[k] = lifted.entry(k, 0);
    return Spectrum(std::move(bins), Rate::fast, lifted.ts);
}

cd downsampled_frf(const StateSpaceModel& block, double omega, const RateConfig& cfg) {
    const double shift = cfg.ws_fast() / cfg.fac;
    cd acc = 0.0;
    for (int f = 0; f < cfg.fac; ++f) {
        const double wf = omega + f * shift;
        acc += eval_frf(block, wf) * zoh_frf(wf, cfg.tsh, cfg.fac);
    }
    return acc / static_cast<double>(cfg.fac);
}

cd q_d(const MultirateLoop& loop, double omega) {
    const cd kd = eval_frf(loop.controller, omega);
    const cd g22l = downsampled_frf(loop.plant.g22, omega, loop.rate);
    const cd den = 1.0 - kd * g22l;
    if (std::abs(den) < 1e-14)
        throw EvalError("q_d: singular slow-rate return difference");
    return kd / den;
}

Eigen::MatrixXcd analytic_lifted_m(const MultirateLoop& loop, int k) {
    const RateConfig& cfg = loop.rate;
    const int fac = cfg.fac;
    const double wk = cfg.omega(k);
    const double shift = cfg.ws_fast() / fac;
    const cd qd = q_d(loop, wk);

    Eigen::VectorXcd g11(fac), g12h(fac), g21(fac);
    for (int f = 0; f < fac; ++f) {
        const double wf = wk + f * shift;
        g11(f) = eval_frf(loop.plant.g11, wf);
        g12h(f) = eval_frf(loop.plant.g12, wf) * zoh_frf(wf, cfg.tsh, fac);
        g21(f) = eval_frf(loop.plant.g21, wf);
    }
    Eigen::MatrixXcd m(fac, fac);
    for (int i = 0; i < fac; ++i) {
        for (int j = 0; j < fac; ++j) {
            m(i, j) = g12h(i) * qd * g21(j) / static_cast<double>(fac);
            if (i == j) m(i, j) += g11(i);
        }
    }
    return m;
}

LiftedFrf analytic_lifted_frf(const MultirateLoop& loop) {
    const RateConfig& cfg = loop.rate;
    LiftedFrf out;
    out.fac = cfg.fac;
    out.n = cfg.n_fast;
    out.ts = cfg.tsh;
    out.m.resize(cfg.n_fast);
    out.t.assign(cfg.n_fast, Eigen::VectorXcd::Zero(cfg.fac));
    out.residual.assign(cfg.n_fast, 0.0);
    out.condition.assign(cfg.n_fast, 0.0);
    out.flag.assign(cfg.n_fast, 0);
    for (int k = 0; k < cfg.n_fast; ++k) {
        try {
            out.m[k] = analytic_lifted_m(loop, k);
        } catch (const EvalError&) {
            out.m[k] = Eigen::MatrixXcd::Constant(
                cfg.fac, cfg.fac, cd(std::nan(""), std::nan("")));
            out.flag[k] = 1;
        }
    }
    return out;
}

} // namespace mrid
