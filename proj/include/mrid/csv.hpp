#pragma once

#include <string>
#include <vector>

#include "mrid/analysis.hpp"
#include "mrid/lifting.hpp"
#include "mrid/pfg.hpp"
#include "mrid/signals.hpp"

namespace mrid {

// All writers emit round-trip-exact doubles (%.17g) so identical data gives
// byte-identical files.

void write_signal_csv(const std::string& path, const Signal& x);            // index,real,imag
void write_spectrum_csv(const std::string& path, const Spectrum& spec);     // index,freq_hz,real,imag
void write_lifted_frf_csv(const std::string& frf_path, const std::string& transient_path,
                          const LiftedFrf& frf); // k,freq_hz,row,col,real,imag / k,row,real,imag
void write_diagnostics_csv(const std::string& path, const LiftedFrf& frf);  // k,freq_hz,condition,flag
void write_pfg_csv(const std::string& path, const PfgCurve& curve);         // k,freq_hz,value,value_db,provenance,flag
void write_psd_csv(const std::string& path, const PsdEstimate& est,
                   const std::vector<double>& cps_curve);                   // freq_hz,psd,cps

/// Reads index,real,imag; rate and sampling time are supplied by the caller.
Signal read_signal_csv(const std::string& path, Rate rate, double ts);

PfgCurve read_pfg_csv(const std::string& path);

} // namespace mrid
