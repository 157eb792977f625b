#include "mrid/lti.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mrid/errors.hpp"

namespace mrid {

namespace {

constexpr double kTsTol = 1e-12;

// Controllable canonical realization of
//   H(z) = (b0 z^n + ... + bn) / (z^n + a1 z^{n-1} + ... + an),
// num and den given with descending powers, den monic after normalization.
StateSpaceModel from_tf(std::vector<double> num, std::vector<double> den, Rate rate, double ts) {
    if (den.empty() || den[0] == 0.0) throw std::invalid_argument("from_tf: bad denominator");
    if (num.size() > den.size()) throw std::invalid_argument("from_tf: improper transfer function");
    const double lead = den[0];
    for (auto& v : den) v /= lead;
    for (auto& v : num) v /= lead;
    while (num.size() < den.size()) num.insert(num.begin(), 0.0);
    const int n = static_cast<int>(den.size()) - 1;

    StateSpaceModel sys;
    sys.rate = rate;
    sys.ts = ts;
    sys.a = Eigen::MatrixXd::Zero(n, n);
    sys.b = Eigen::VectorXd::Zero(n);
    sys.c = Eigen::RowVectorXd::Zero(n);
    sys.d = num[0];
    for (int i = 0; i < n; ++i) sys.a(0, i) = -den[i + 1];
    for (int i = 1; i < n; ++i) sys.a(i, i - 1) = 1.0;
    if (n > 0) sys.b(0) = 1.0;
    for (int i = 0; i < n; ++i) sys.c(i) = num[i + 1] - num[0] * den[i + 1];
    return sys;
}

// u -> first -> second -> y
StateSpaceModel series(const StateSpaceModel& first, const StateSpaceModel& second) {
    const int n1 = first.order();
    const int n2 = second.order();
    StateSpaceModel sys;
    sys.rate = first.rate;
    sys.ts = first.ts;
    sys.a = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    sys.a.topLeftCorner(n1, n1) = first.a;
    sys.a.bottomRightCorner(n2, n2) = second.a;
    sys.a.bottomLeftCorner(n2, n1) = second.b * first.c;
    sys.b = Eigen::VectorXd::Zero(n1 + n2);
    sys.b.head(n1) = first.b;
    sys.b.tail(n2) = second.b * first.d;
    sys.c = Eigen::RowVectorXd::Zero(n1 + n2);
    sys.c.head(n1) = second.d * first.c;
    sys.c.tail(n2) = second.c;
    sys.d = second.d * first.d;
    return sys;
}

StateSpaceModel scaled(StateSpaceModel sys, double g) {
    sys.c *= g;
    sys.d *= g;
    return sys;
}

// Bilinear transform of (b2 s^2 + b1 s + b0)/(a2 s^2 + a1 s + a0) with s = K(z-1)/(z+1).
StateSpaceModel biquad_bilinear(double b2, double b1, double b0, double a2, double a1,
                                double a0, double warp_k, Rate rate, double ts) {
    const double k2 = warp_k * warp_k;
    std::vector<double> num = {b2 * k2 + b1 * warp_k + b0, -2.0 * b2 * k2 + 2.0 * b0,
                               b2 * k2 - b1 * warp_k + b0};
    std::vector<double> den = {a2 * k2 + a1 * warp_k + a0, -2.0 * a2 * k2 + 2.0 * a0,
                               a2 * k2 - a1 * warp_k + a0};
    return from_tf(std::move(num), std::move(den), rate, ts);
}

// Exact ZOH discretization of kr/(s+lambda)^2.
StateSpaceModel zoh_leaky_double_integrator(double kr, double lambda, double ts, Rate rate) {
    const double e = std::exp(-lambda * ts);
    StateSpaceModel sys;
    sys.rate = rate;
    sys.ts = ts;
    sys.a = Eigen::MatrixXd(2, 2);
    sys.a << e, ts * e, 0.0, e;
    sys.b = Eigen::VectorXd(2);
    sys.b << kr * (1.0 - (1.0 + lambda * ts) * e) / (lambda * lambda),
        kr * (1.0 - e) / lambda;
    sys.c = Eigen::RowVectorXd(2);
    sys.c << 1.0, 0.0;
    sys.d = 0.0;
    return sys;
}

// Exact ZOH discretization of alpha/(s^2 + 2 zeta wn s + wn^2).
StateSpaceModel zoh_resonance(double alpha, double wn, double zeta, double ts, Rate rate) {
    const double sigma = zeta * wn;
    const double wd = wn * std::sqrt(1.0 - zeta * zeta);
    const double e = std::exp(-sigma * ts);
    const double c = std::cos(wd * ts);
    const double s = std::sin(wd * ts);
    Eigen::Matrix2d phi;
    phi << e * (c + sigma / wd * s), e * (s / wd), e * (-wn * wn / wd * s),
        e * (c - sigma / wd * s);
    // Gamma = A^{-1} (Phi - I) B with A^{-1} B = [-alpha/wn^2; 0]
    Eigen::Vector2d gamma;
    gamma << -(alpha / (wn * wn)) * (phi(0, 0) - 1.0), -(alpha / (wn * wn)) * phi(1, 0);
    StateSpaceModel sys;
    sys.rate = rate;
    sys.ts = ts;
    sys.a = phi;
    sys.b = gamma;
    sys.c = Eigen::RowVectorXd(2);
    sys.c << 1.0, 0.0;
    sys.d = 0.0;
    return sys;
}

StateSpaceModel parallel(const StateSpaceModel& s1, const StateSpaceModel& s2) {
    const int n1 = s1.order();
    const int n2 = s2.order();
    StateSpaceModel sys;
    sys.rate = s1.rate;
    sys.ts = s1.ts;
    sys.a = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    sys.a.topLeftCorner(n1, n1) = s1.a;
    sys.a.bottomRightCorner(n2, n2) = s2.a;
    sys.b = Eigen::VectorXd(n1 + n2);
    sys.b.head(n1) = s1.b;
    sys.b.tail(n2) = s2.b;
    sys.c = Eigen::RowVectorXd(n1 + n2);
    sys.c.head(n1) = s1.c;
    sys.c.tail(n2) = s2.c;
    sys.d = s1.d + s2.d;
    return sys;
}

StateSpaceModel negated(StateSpaceModel sys) { return scaled(std::move(sys), -1.0); }

} // namespace

StateSpaceModel StateSpaceModel::gain(double g, Rate rate, double ts) {
    StateSpaceModel sys;
    sys.a.resize(0, 0);
    sys.b.resize(0);
    sys.c.resize(0);
    sys.d = g;
    sys.rate = rate;
    sys.ts = ts;
    return sys;
}

void StateSpaceModel::validate() const {
    const int n = order();
    if (a.cols() != n) throw std::invalid_argument("StateSpaceModel: A must be square");
    if (b.size() != n) throw std::invalid_argument("StateSpaceModel: B size mismatch");
    if (c.size() != n) throw std::invalid_argument("StateSpaceModel: C size mismatch");
    if (!(ts > 0.0)) throw std::invalid_argument("StateSpaceModel: ts must be > 0");
}

cd eval_frf(const StateSpaceModel& sys, double omega) {
    const int n = sys.order();
    if (n == 0) return cd(sys.d);
    const cd z = std::polar(1.0, omega * sys.ts);
    Eigen::MatrixXcd m = z * Eigen::MatrixXcd::Identity(n, n) - sys.a.cast<cd>();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
    if (!lu.isInvertible())
        throw EvalError("eval_frf: singular resolvent (pole on the unit circle)");
    const Eigen::VectorXcd x = lu.solve(sys.b.cast<cd>());
    return (sys.c.cast<cd>() * x).value() + cd(sys.d);
}

Signal simulate(const StateSpaceModel& sys, const Signal& input) {
    return simulate(sys, input, Eigen::VectorXcd::Zero(sys.order()));
}

Signal simulate(const StateSpaceModel& sys, const Signal& input, const Eigen::VectorXcd& x0) {
    sys.validate();
    if (input.rate != sys.rate)
        throw std::invalid_argument("simulate: input rate does not match system rate");
    if (x0.size() != sys.order())
        throw std::invalid_argument("simulate: initial state size mismatch");
    const Eigen::MatrixXcd a = sys.a.cast<cd>();
    const Eigen::VectorXcd b = sys.b.cast<cd>();
    const Eigen::RowVectorXcd c = sys.c.cast<cd>();
    Eigen::VectorXcd x = x0;
    std::vector<cd> out(input.samples.size());
    for (std::size_t t = 0; t < input.samples.size(); ++t) {
        const cd u = input.samples[t];
        out[t] = (sys.order() > 0 ? (c * x).value() : cd(0.0)) + sys.d * u;
        if (sys.order() > 0) x = a * x + b * u;
    }
    return Signal(std::move(out), sys.rate, sys.ts);
}

void GeneralizedPlant::validate() const {
    for (const auto* blk : {&g11, &g12, &g21, &g22}) {
        blk->validate();
        if (blk->rate != Rate::fast)
            throw std::invalid_argument("GeneralizedPlant: all blocks must be fast-rate");
        if (std::abs(blk->ts - g11.ts) > kTsTol)
            throw std::invalid_argument("GeneralizedPlant: blocks must share the sampling time");
    }
}

void MultirateLoop::validate() const {
    plant.validate();
    controller.validate();
    if (controller.rate != Rate::slow)
        throw std::invalid_argument("MultirateLoop: controller must carry the slow rate tag");
    if (std::abs(plant.tsh() - rate.tsh) > kTsTol)
        throw std::invalid_argument("MultirateLoop: plant sampling time does not match RateConfig");
    if (std::abs(controller.ts - rate.tsl()) > kTsTol)
        throw std::invalid_argument("MultirateLoop: controller sampling time does not match F*tsh");
}

MultirateRecord simulate_multirate_loop(const MultirateLoop& loop, const Signal& w,
                                        int settle_periods, double divergence_threshold) {
    loop.validate();
    if (settle_periods < 0) throw std::invalid_argument("settle_periods must be >= 0");
    const int n = loop.rate.n_fast;
    const int fac = loop.rate.fac;
    if (w.size() != n)
        throw std::invalid_argument("simulate_multirate_loop: input length must equal N");

    struct Block {
        Eigen::MatrixXcd a;
        Eigen::VectorXcd b;
        Eigen::RowVectorXcd c;
        double d;
        Eigen::VectorXcd x;
        cd out_state() const { return a.rows() > 0 ? (c * x).value() : cd(0.0); }
        void step(cd u) {
            if (a.rows() > 0) x = a * x + b * u;
        }
    };
    auto mk = [](const StateSpaceModel& s) {
        return Block{s.a.cast<cd>(), s.b.cast<cd>(), s.c.cast<cd>(), s.d,
                     Eigen::VectorXcd::Zero(s.order())};
    };
    Block g11 = mk(loop.plant.g11);
    Block g12 = mk(loop.plant.g12);
    Block g21 = mk(loop.plant.g21);
    Block g22 = mk(loop.plant.g22);
    Block ctl = mk(loop.controller);

    const double alg_den = 1.0 - ctl.d * g22.d;
    if (std::abs(alg_den) < 1e-12)
        throw EvalError("simulate_multirate_loop: singular algebraic loop (D_K * D22 == 1)");

    const long long total = static_cast<long long>(n) * (settle_periods + 1);
    std::vector<cd> z_all(total), u_all(total), y_all(total);
    cd u_cur = 0.0;
    for (long long t = 0; t < total; ++t) {
        const cd wn = w.samples[static_cast<std::size_t>(t % n)];
        cd yn;
        if (t % fac == 0) {
            const cd y_partial = g21.out_state() + g21.d * wn + g22.out_state();
            const cd eta = (ctl.out_state() + ctl.d * y_partial) / alg_den;
            u_cur = eta;
            yn = y_partial + g22.d * u_cur;
            ctl.step(yn);
        } else {
            yn = g21.out_state() + g21.d * wn + g22.out_state() + g22.d * u_cur;
        }
        const cd zn = g11.out_state() + g11.d * wn + g12.out_state() + g12.d * u_cur;
        g11.step(wn);
        g21.step(wn);
        g12.step(u_cur);
        g22.step(u_cur);
        if (std::abs(zn) > divergence_threshold || std::abs(yn) > divergence_threshold)
            throw InstabilityError("simulate_multirate_loop: output diverged at sample " +
                                   std::to_string(t));
        z_all[t] = zn;
        u_all[t] = u_cur;
        y_all[t] = yn;
    }

    const long long off = total - n;
    auto tail = [&](const std::vector<cd>& v) {
        return Signal(std::vector<cd>(v.begin() + off, v.end()), Rate::fast, loop.rate.tsh);
    };
    return MultirateRecord{tail(z_all), tail(u_all), tail(y_all)};
}

GeneralizedPlant make_demo_plant(const std::string& kind, double tsh) {
    GeneralizedPlant plant;
    if (kind == "two_mass") {
        // Motor-side two-mass FRF: rigid-body mode plus a lightly damped
        // torsional resonance at 55 Hz with positive residue, which places the
        // antiresonance near 13 Hz. The rigid mode leaks at 0.2 Hz so the
        // model stays evaluable on the whole unit circle.
        const double kr = 1.0;
        const double lambda = 2.0 * kPi * 0.2;
        const double fres = 55.0;
        const double zeta = 0.025;
        const double residue = 16.0;
        const StateSpaceModel rigid = zoh_leaky_double_integrator(kr, lambda, tsh, Rate::fast);
        const StateSpaceModel flex =
            zoh_resonance(residue, 2.0 * kPi * fres, zeta, tsh, Rate::fast);
        const StateSpaceModel p = parallel(rigid, flex);
        plant.g11 = StateSpaceModel::gain(-1.0, Rate::fast, tsh);
        plant.g21 = StateSpaceModel::gain(-1.0, Rate::fast, tsh);
        plant.g12 = negated(p);
        plant.g22 = negated(p);
    } else if (kind == "static_gain") {
        const double g = 0.75;
        plant.g11 = StateSpaceModel::gain(-1.0, Rate::fast, tsh);
        plant.g21 = StateSpaceModel::gain(-1.0, Rate::fast, tsh);
        plant.g12 = StateSpaceModel::gain(-g, Rate::fast, tsh);
        plant.g22 = StateSpaceModel::gain(-g, Rate::fast, tsh);
    } else {
        throw std::invalid_argument("make_demo_plant: unknown kind '" + kind + "'");
    }
    plant.validate();
    return plant;
}

StateSpaceModel make_demo_controller(double ts, Rate rate, double resonance_notch_hz) {
    // Lead placing the crossover near 6 Hz.
    const double wz = 2.0 * kPi * 2.0;
    const double wp = 2.0 * kPi * 18.0;
    const double k_lead = 2.0 / ts;
    StateSpaceModel lead = from_tf({(wp / wz) * (k_lead + wz), (wp / wz) * (wz - k_lead)},
                                   {k_lead + wp, wp - k_lead}, rate, ts);
    // Inverse notch boosting disturbance rejection at 20 Hz.
    const double w0 = 2.0 * kPi * 20.0;
    const double k0 = w0 / std::tan(w0 * ts / 2.0);
    StateSpaceModel boost = biquad_bilinear(1.0, 2.0 * 0.5 * w0, w0 * w0, 1.0, 2.0 * 0.10 * w0,
                                            w0 * w0, k0, rate, ts);
    // Suppressing notch on the plant resonance as the controller sees it
    // (folded to 25 Hz on the slow grid for the F=3 demo loop).
    const double w1 = 2.0 * kPi * resonance_notch_hz;
    const double k1 = w1 / std::tan(w1 * ts / 2.0);
    StateSpaceModel damp = biquad_bilinear(1.0, 2.0 * 0.03 * w1, w1 * w1, 1.0, 2.0 * 0.5 * w1,
                                           w1 * w1, k1, rate, ts);
    const double kc = 320.0;
    return scaled(series(series(lead, boost), damp), kc);
}

MultirateLoop make_demo_loop(const RateConfig& cfg) {
    MultirateLoop loop;
    loop.plant = make_demo_plant("two_mass", cfg.tsh);
    loop.controller = make_demo_controller(cfg.tsl());
    loop.rate = cfg;
    loop.validate();
    return loop;
}

void write_state_space(const std::string& path, const StateSpaceModel& sys) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    const int n = sys.order();
    out.precision(17);
    out << "order " << n << "\n";
    out << "rate " << (sys.rate == Rate::fast ? "fast" : "slow") << "\n";
    out << "ts " << sys.ts << "\n";
    out << "A";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out << " " << sys.a(i, j);
    out << "\nB";
    for (int i = 0; i < n; ++i) out << " " << sys.b(i);
    out << "\nC";
    for (int i = 0; i < n; ++i) out << " " << sys.c(i);
    out << "\nD " << sys.d << "\n";
}

StateSpaceModel read_state_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open state-space file '" + path + "'");
    std::map<std::string, std::vector<double>> numeric;
    std::string rate_word = "fast";
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key) || key[0] == '#') continue;
        if (key == "rate") {
            if (!(ls >> rate_word) || (rate_word != "fast" && rate_word != "slow"))
                throw ConfigError(path + ":" + std::to_string(lineno) + ": bad rate");
            continue;
        }
        std::vector<double>& dst = numeric[key];
        double v;
        while (ls >> v) dst.push_back(v);
        if (!ls.eof())
            throw ConfigError(path + ":" + std::to_string(lineno) + ": bad numeric value");
    }
    auto need = [&](const std::string& key) -> const std::vector<double>& {
        auto it = numeric.find(key);
        if (it == numeric.end()) throw ConfigError(path + ": missing key '" + key + "'");
        return it->second;
    };
    const int n = static_cast<int>(need("order").at(0));
    if (n < 0) throw ConfigError(path + ": negative order");
    const auto& va = need("A");
    const auto& vb = need("B");
    const auto& vc = need("C");
    const auto& vd = need("D");
    if (static_cast<int>(va.size()) != n * n || static_cast<int>(vb.size()) != n ||
        static_cast<int>(vc.size()) != n || vd.size() != 1)
        throw ConfigError(path + ": A/B/C/D sizes inconsistent with order " + std::to_string(n));
    StateSpaceModel sys;
    sys.ts = need("ts").at(0);
    sys.rate = rate_word == "fast" ? Rate::fast : Rate::slow;
    sys.a = Eigen::MatrixXd(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sys.a(i, j) = va[static_cast<std::size_t>(i) * n + j];
    sys.b = Eigen::Map<const Eigen::VectorXd>(vb.data(), n);
    sys.c = Eigen::Map<const Eigen::RowVectorXd>(vc.data(), n);
    sys.d = vd[0];
    sys.validate();
    return sys;
}

} // namespace mrid
