#include "mrid/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "mrid/errors.hpp"

namespace mrid {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const std::string& path, int lineno) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str())
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad number '" + s + "'");
    return v;
}

} // namespace

void write_signal_csv(const std::string& path, const Signal& x) {
    std::ofstream out = open_out(path);
    out << "index,real,imag\n";
    for (int i = 0; i < x.size(); ++i)
        out << i << "," << fmt(x.samples[i].real()) << "," << fmt(x.samples[i].imag()) << "\n";
}

void write_spectrum_csv(const std::string& path, const Spectrum& spec) {
    std::ofstream out = open_out(path);
    out << "index,freq_hz,real,imag\n";
    for (int k = 0; k < spec.size(); ++k)
        out << k << "," << fmt(spec.freq_hz(k)) << "," << fmt(spec.bins[k].real()) << ","
            << fmt(spec.bins[k].imag()) << "\n";
}

void write_lifted_frf_csv(const std::string& frf_path, const std::string& transient_path,
                          const LiftedFrf& frf) {
    {
        std::ofstream out = open_out(frf_path);
        out << "k,freq_hz,row,col,real,imag\n";
        for (int k = 0; k < frf.n; ++k) {
            for (int i = 0; i < frf.fac; ++i)
                for (int j = 0; j < frf.fac; ++j)
                    out << k << "," << fmt(frf.freq_hz(k)) << "," << i << "," << j << ","
                        << fmt(frf.m[k](i, j).real()) << "," << fmt(frf.m[k](i, j).imag())
                        << "\n";
        }
    }
    std::ofstream out = open_out(transient_path);
    out << "k,row,real,imag\n";
    for (int k = 0; k < frf.n; ++k)
        for (int i = 0; i < frf.fac; ++i)
            out << k << "," << i << "," << fmt(frf.t[k](i).real()) << ","
                << fmt(frf.t[k](i).imag()) << "\n";
}

void write_diagnostics_csv(const std::string& path, const LiftedFrf& frf) {
    std::ofstream out = open_out(path);
    out << "k,freq_hz,condition,flag\n";
    for (int k = 0; k < frf.n; ++k)
        out << k << "," << fmt(frf.freq_hz(k)) << "," << fmt(frf.condition[k]) << ","
            << int(frf.flag[k]) << "\n";
}

void write_pfg_csv(const std::string& path, const PfgCurve& curve) {
    std::ofstream out = open_out(path);
    out << "k,freq_hz,value,value_db,provenance,flag\n";
    for (int k = 0; k < curve.size(); ++k) {
        const double v = curve.values[k];
        out << k << "," << fmt(curve.freq_hz(k)) << "," << fmt(v) << ","
            << fmt(20.0 * std::log10(v)) << "," << provenance_name(curve.provenance) << ","
            << int(curve.flag[k]) << "\n";
    }
}

void write_psd_csv(const std::string& path, const PsdEstimate& est,
                   const std::vector<double>& cps_curve) {
    if (cps_curve.size() != est.psd.size())
        throw std::invalid_argument("write_psd_csv: psd/cps size mismatch");
    std::ofstream out = open_out(path);
    out << "freq_hz,psd,cps\n";
    for (std::size_t k = 0; k < est.psd.size(); ++k)
        out << fmt(static_cast<double>(k) * est.freq_resolution_hz) << "," << fmt(est.psd[k])
            << "," << fmt(cps_curve[k]) << "\n";
}

Signal read_signal_csv(const std::string& path, Rate rate, double ts) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open signal file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || split_fields(line).size() < 3)
        throw ConfigError(path + ": missing signal CSV header");
    Signal x;
    x.rate = rate;
    x.ts = ts;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() < 3)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected index,real,imag");
        x.samples.emplace_back(parse_double(fields[1], path, lineno),
                               parse_double(fields[2], path, lineno));
    }
    if (x.samples.empty()) throw ConfigError(path + ": no samples");
    return x;
}

PfgCurve read_pfg_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open PFG file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || split_fields(line).size() < 6)
        throw ConfigError(path + ": missing PFG CSV header");
    PfgCurve curve;
    std::vector<double> freqs;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() < 6)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": short PFG row");
        freqs.push_back(parse_double(fields[1], path, lineno));
        curve.values.push_back(parse_double(fields[2], path, lineno));
        curve.flag.push_back(static_cast<std::uint8_t>(
            parse_double(fields[5], path, lineno) != 0.0));
        if (fields[4] == "analytic") curve.provenance = Provenance::analytic;
        else if (fields[4] == "oracle") curve.provenance = Provenance::oracle;
        else curve.provenance = Provenance::identified;
    }
    if (curve.values.empty()) throw ConfigError(path + ": no rows");
    // recover the sampling time from the frequency column: f_k = k / (n * ts)
    if (freqs.size() >= 2 && freqs[1] > 0.0)
        curve.ts = 1.0 / (freqs[1] * static_cast<double>(curve.values.size()));
    return curve;
}

} // namespace mrid
