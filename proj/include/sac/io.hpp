#pragma once

#include <string>
#include <vector>

#include "sac/estimator.hpp"
#include "sac/scenario.hpp"

namespace sac {

void save_bank(const FilterBank& bank, const std::string& path);
FilterBank load_bank(const std::string& path);

/// Samples plus truth as CSV:
/// t_s,y_re,y_im,true_amp_pu,true_phase_rad,true_freq_hz,true_rocof_hz_s,
/// true_damping_1_s,true_rocod_1_s2 (absolute frequency, f0-relative removed).
void write_stream_csv(const SampleStream& stream, const SystemConfig& cfg,
                      const std::string& path);

/// Reads complex baseband samples from CSV. Accepts either t_s,y_re,y_im[,...]
/// or three-phase t_s,ya,yb,yc (converted through the dq front end).
std::vector<cplx> read_samples_csv(const std::string& path, const SystemConfig& cfg);

/// Estimate stream CSV with the reporting columns:
/// t_s,amp_pu,phase_rad,freq_hz,rocof_hz_s,damping_1_s,rocod_1_s2,iterations,adapted
void write_frames_csv(const std::vector<EstimateFrame>& frames, const SystemConfig& cfg,
                      const std::string& path);

} // namespace sac
