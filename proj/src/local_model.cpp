#include "mrid/local_model.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

namespace mrid {

namespace {

int column_count(const LocalModelConfig& cfg, int fac) {
    // Unknowns of one output row: M row, N_s rows, T entry, L_s entries, D_s rows.
    int cols = fac * (1 + cfg.degree_n) + 1 + cfg.degree_l;
    if (cfg.denominator == DenominatorStructure::full_matrix) cols += fac * cfg.degree_d;
    return cols;
}

int stacked_column_count(const LocalModelConfig& cfg, int fac) {
    return fac * fac * (1 + cfg.degree_n) + fac * (1 + cfg.degree_l) + cfg.degree_d;
}

struct QrOutcome {
    Eigen::MatrixXcd solution;
    double residual = 0.0;
    double condition = 0.0;
    bool deficient = false;
};

// Columns are equilibrated to unit norm so the condition estimate reflects
// the regression geometry rather than the mixed scales of spectrum values,
// window powers and the constant transient column.
QrOutcome solve_qr(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const int nc = static_cast<int>(a.cols());
    Eigen::VectorXd colscale(nc);
    Eigen::MatrixXcd an = a;
    bool zero_column = false;
    for (int j = 0; j < nc; ++j) {
        const double norm = an.col(j).norm();
        colscale(j) = norm;
        if (norm > 0.0)
            an.col(j) /= norm;
        else
            zero_column = true;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(an);
    QrOutcome res;
    const auto rdiag = qr.matrixR().diagonal().head(nc);
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nc; ++i) {
        const double v = std::abs(rdiag(i));
        rmax = std::max(rmax, v);
        rmin = std::min(rmin, v);
    }
    res.condition = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
    res.deficient = zero_column || qr.rank() < nc;
    res.solution = qr.solve(b);
    for (int j = 0; j < nc; ++j) {
        if (colscale(j) > 0.0) res.solution.row(j) /= colscale(j);
    }
    res.residual = (a * res.solution - b).norm();
    return res;
}

// Full-matrix (or identity) denominator: the stacked problem decouples into
// one regression per output row, all sharing the same matrix; solve once with
// F right-hand sides.
LocalBinSolution solve_decoupled(const LiftedSpectrum& w, const LiftedSpectrum& z, int k,
                                 const LocalModelConfig& cfg) {
    const int fac = w.fac;
    const int n = w.n;
    const int rows = 2 * cfg.wsize + 1;
    const int cols = column_count(cfg, fac);
    const double rscale = cfg.wsize > 0 ? static_cast<double>(cfg.wsize) : 1.0;

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(rows, cols);
    Eigen::MatrixXcd b(rows, fac);
    for (int r = -cfg.wsize; r <= cfg.wsize; ++r) {
        const int row = r + cfg.wsize;
        const int bin = ((k + r) % n + n) % n;
        const double rho = static_cast<double>(r) / rscale;
        int col = 0;
        double rpow = 1.0;
        for (int s = 0; s <= cfg.degree_n; ++s) {
            for (int j = 0; j < fac; ++j) a(row, col++) = -rpow * w.entry(bin, j);
            rpow *= rho;
        }
        a(row, col++) = -1.0;
        rpow = rho;
        for (int s = 1; s <= cfg.degree_l; ++s) {
            a(row, col++) = -rpow;
            rpow *= rho;
        }
        if (cfg.denominator == DenominatorStructure::full_matrix) {
            rpow = rho;
            for (int s = 1; s <= cfg.degree_d; ++s) {
                for (int j = 0; j < fac; ++j) a(row, col++) = rpow * z.entry(bin, j);
                rpow *= rho;
            }
        }
        for (int i = 0; i < fac; ++i) b(row, i) = -z.entry(bin, i);
    }

    const QrOutcome qr = solve_qr(a, b);
    LocalBinSolution sol;
    sol.m.resize(fac, fac);
    sol.t.resize(fac);
    for (int i = 0; i < fac; ++i) {
        for (int j = 0; j < fac; ++j) sol.m(i, j) = qr.solution(j, i);
        sol.t(i) = qr.solution(fac * (1 + cfg.degree_n), i);
    }
    sol.residual = qr.residual;
    sol.condition = qr.condition;
    sol.flagged = qr.deficient ||
                  (cfg.condition_limit > 0.0 && qr.condition > cfg.condition_limit);
    return sol;
}

// Scalar denominator couples the output rows through the shared d_s
// coefficients; solve the stacked problem.
LocalBinSolution solve_stacked_scalar(const LiftedSpectrum& w, const LiftedSpectrum& z, int k,
                                      const LocalModelConfig& cfg) {
    const int fac = w.fac;
    const int n = w.n;
    const int rows = (2 * cfg.wsize + 1) * fac;
    const int cols = stacked_column_count(cfg, fac);
    const double rscale = cfg.wsize > 0 ? static_cast<double>(cfg.wsize) : 1.0;
    const int m_base = 0;
    const int t_base = fac * fac * (1 + cfg.degree_n);
    const int l0 = t_base + fac;
    const int d0 = l0 + fac * cfg.degree_l;

    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(rows, cols);
    Eigen::MatrixXcd b(rows, 1);
    for (int r = -cfg.wsize; r <= cfg.wsize; ++r) {
        const int bin = ((k + r) % n + n) % n;
        const double rho = static_cast<double>(r) / rscale;
        for (int i = 0; i < fac; ++i) {
            const int row = (r + cfg.wsize) * fac + i;
            double rpow = 1.0;
            for (int s = 0; s <= cfg.degree_n; ++s) {
                for (int j = 0; j < fac; ++j)
                    a(row, m_base + s * fac * fac + i * fac + j) = -rpow * w.entry(bin, j);
                rpow *= rho;
            }
            a(row, t_base + i) = -1.0;
            rpow = rho;
            for (int s = 1; s <= cfg.degree_l; ++s) {
                a(row, l0 + (s - 1) * fac + i) = -rpow;
                rpow *= rho;
            }
            rpow = rho;
            for (int s = 1; s <= cfg.degree_d; ++s) {
                a(row, d0 + (s - 1)) = rpow * z.entry(bin, i);
                rpow *= rho;
            }
            b(row, 0) = -z.entry(bin, i);
        }
    }

    const QrOutcome qr = solve_qr(a, b);
    LocalBinSolution sol;
    sol.m.resize(fac, fac);
    sol.t.resize(fac);
    for (int i = 0; i < fac; ++i) {
        for (int j = 0; j < fac; ++j) sol.m(i, j) = qr.solution(i * fac + j, 0);
        sol.t(i) = qr.solution(t_base + i, 0);
    }
    sol.residual = qr.residual;
    sol.condition = qr.condition;
    sol.flagged = qr.deficient ||
                  (cfg.condition_limit > 0.0 && qr.condition > cfg.condition_limit);
    return sol;
}

} // namespace

void LocalModelConfig::validate(int fac) const {
    if (wsize < 1) throw std::invalid_argument("LocalModelConfig: wsize must be >= 1");
    if (degree_n < 0 || degree_l < 0 || degree_d < 0)
        throw std::invalid_argument("LocalModelConfig: degrees must be >= 0");
    const int rows = denominator == DenominatorStructure::scalar ? (2 * wsize + 1) * fac
                                                                 : 2 * wsize + 1;
    const int cols = denominator == DenominatorStructure::scalar
                         ? stacked_column_count(*this, fac)
                         : column_count(*this, fac);
    if (rows < cols)
        throw std::invalid_argument(
            "LocalModelConfig: window too short for the requested degrees (" +
            std::to_string(rows) + " rows < " + std::to_string(cols) + " unknowns)");
}

LocalBinSolution solve_local_bin(const LiftedSpectrum& w, const LiftedSpectrum& z, int k,
                                 const LocalModelConfig& cfg) {
    if (w.fac != z.fac || w.n != z.n)
        throw std::invalid_argument("solve_local_bin: mismatched lifted spectra");
    if (k < 0 || k >= w.n) throw std::invalid_argument("solve_local_bin: bin out of range");
    cfg.validate(w.fac);
    if (2 * cfg.wsize + 1 > w.n)
        throw std::invalid_argument("solve_local_bin: window longer than the grid");
    if (cfg.denominator == DenominatorStructure::scalar)
        return solve_stacked_scalar(w, z, k, cfg);
    return solve_decoupled(w, z, k, cfg);
}

LiftedFrf identify_lifted_frf(const Signal& w, const Signal& z, int fac,
                              const LocalModelConfig& cfg, int threads) {
    if (w.size() == 0 || w.size() != z.size())
        throw std::invalid_argument("identify_lifted_frf: records must be nonempty and equal length");
    if (fac < 1 || w.size() % fac != 0)
        throw std::invalid_argument("identify_lifted_frf: record length not divisible by F");
    cfg.validate(fac);
    if (2 * cfg.wsize + 1 > w.size())
        throw std::invalid_argument("identify_lifted_frf: window longer than the record grid");

    const LiftedSpectrum wl = lift(dft(w), fac);
    const LiftedSpectrum zl = lift(dft(z), fac);
    const int n = w.size();

    LiftedFrf out;
    out.fac = fac;
    out.n = n;
    out.ts = w.ts;
    out.m.resize(n);
    out.t.resize(n);
    out.residual.assign(n, 0.0);
    out.condition.assign(n, 0.0);
    out.flag.assign(n, 0);

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    if (nthreads < 1) nthreads = 1;
    nthreads = std::min(nthreads, n);

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int k = next.fetch_add(1);
            if (k >= n) return;
            LocalBinSolution sol = solve_local_bin(wl, zl, k, cfg);
            out.m[k] = std::move(sol.m);
            out.t[k] = std::move(sol.t);
            out.residual[k] = sol.residual;
            out.condition[k] = sol.condition;
            out.flag[k] = sol.flagged ? 1 : 0;
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

LiftedFrf identify_direct_baseline(const Signal& w, const Signal& z,
                                   const LocalModelConfig& cfg, int threads) {
    return identify_lifted_frf(w, z, 1, cfg, threads);
}

} // namespace mrid
