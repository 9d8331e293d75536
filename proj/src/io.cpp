#include "sac/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sac {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) out.push_back(field);
    return out;
}

} // namespace

void save_bank(const FilterBank& bank, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << bank_to_json(bank).dump(2) << '\n';
}

FilterBank load_bank(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    is >> j;
    return bank_from_json(j);
}

void write_stream_csv(const SampleStream& stream, const SystemConfig& cfg,
                      const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "t_s,y_re,y_im,true_amp_pu,true_phase_rad,true_freq_hz,true_rocof_hz_s,"
          "true_damping_1_s,true_rocod_1_s2\n";
    os.precision(12);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (size_t i = 0; i < stream.samples.size(); ++i) {
        const double t = static_cast<double>(stream.start_index + static_cast<long>(i)) * cfg.t_s;
        os << t << ',' << stream.samples[i].real() << ',' << stream.samples[i].imag() << ','
           << stream.truth.amp[i] << ',' << stream.truth.phase[i] << ','
           << cfg.f0 + stream.truth.freq[i] / two_pi << ',' << stream.truth.rocof[i] / two_pi
           << ',' << stream.truth.damping[i] << ',' << stream.truth.rocod[i] << '\n';
    }
}

std::vector<cplx> read_samples_csv(const std::string& path, const SystemConfig& cfg) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("empty CSV: " + path);
    const auto cols = split(header, ',');
    bool three_phase = false;
    if (cols.size() >= 3 && cols[1] == "y_re" && cols[2] == "y_im") {
        three_phase = false;
    } else if (cols.size() >= 4 && cols[1] == "ya" && cols[2] == "yb" && cols[3] == "yc") {
        three_phase = true;
    } else {
        throw std::runtime_error("unrecognized CSV header; expected t_s,y_re,y_im or t_s,ya,yb,yc");
    }

    std::vector<cplx> samples;
    std::string line;
    long n = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (three_phase) {
            samples.push_back(
                abc_to_dq(std::stod(f.at(1)), std::stod(f.at(2)), std::stod(f.at(3)), n, cfg));
        } else {
            samples.emplace_back(std::stod(f.at(1)), std::stod(f.at(2)));
        }
        ++n;
    }
    return samples;
}

void write_frames_csv(const std::vector<EstimateFrame>& frames, const SystemConfig& cfg,
                      const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "t_s,amp_pu,phase_rad,freq_hz,rocof_hz_s,damping_1_s,rocod_1_s2,iterations,adapted\n";
    os.precision(12);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (const auto& f : frames) {
        os << static_cast<double>(f.report_index) * cfg.t_s << ',' << std::abs(f.phasor) << ','
           << std::arg(f.phasor) << ',' << cfg.f0 + f.freq / two_pi << ',' << f.rocof / two_pi
           << ',' << f.damping << ',' << f.rocod << ',' << f.iterations << ','
           << (f.adapted_filters ? 1 : 0) << '\n';
    }
}

} // namespace sac
