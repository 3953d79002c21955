#include "synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string_view>

#include "idsfx/data_ingest.hpp"
#include "idsfx/kernels.hpp"
#include "idsfx/random.hpp"

namespace synth {

namespace {

constexpr std::array<std::string_view, 8> kClasses = {
    "normal", "neptune", "smurf", "satan", "ipsweep", "portsweep", "back", "teardrop"};
constexpr std::array<std::string_view, 3> kProtocols = {"tcp", "udp", "icmp"};
constexpr std::array<std::string_view, 6> kServices = {"http", "private", "ecr_i", "domain_u",
                                                       "smtp", "ftp_data"};
constexpr std::array<std::string_view, 4> kFlags = {"SF", "S0", "REJ", "RSTO"};

bool always_zero(std::string_view name) {
    return name == "num_outbound_cmds" || name == "is_host_login";
}

bool rare(std::string_view name) { return name == "land" || name == "urgent"; }

bool is_rate(std::string_view name) { return name.find("rate") != std::string_view::npos; }

bool is_flag(std::string_view name) {
    return name == "logged_in" || name == "is_guest_login" || name == "root_shell" ||
           name == "su_attempted";
}

}  // namespace

std::string kdd_csv(std::size_t rows, std::uint64_t seed, std::size_t classes) {
    classes = std::min(classes, kClasses.size());
    const auto& names = idsfx::kdd_feature_names();
    idsfx::Rng setup(idsfx::mix_seed(seed, 1));
    // Per class and feature: a typical magnitude (or probability for flags).
    std::vector<std::vector<double>> centre(classes, std::vector<double>(names.size()));
    for (auto& row : centre) {
        for (auto& v : row) v = setup.uniform();
    }
    idsfx::Rng rng(idsfx::mix_seed(seed, 2));
    std::string out;
    char buf[64];
    for (std::size_t i = 0; i < rows; ++i) {
        // Class 0 is the majority, like "normal" in the real file.
        const std::size_t c = rng.uniform() < 0.5 ? 0 : 1 + rng.below(classes - 1);
        for (std::size_t j = 0; j < names.size(); ++j) {
            const std::string_view name = names[j];
            const double m = centre[c][j];
            if (name == "protocol_type") {
                out += kProtocols[(c + (rng.uniform() < 0.1 ? rng.below(3) : 0)) % 3];
            } else if (name == "service") {
                out += kServices[(c * 2 + rng.below(2)) % kServices.size()];
            } else if (name == "flag") {
                out += kFlags[rng.uniform() < 0.8 ? c % kFlags.size() : rng.below(kFlags.size())];
            } else {
                double v = 0.0;
                if (always_zero(name)) {
                    v = 0.0;
                } else if (rare(name)) {
                    v = rng.uniform() < 0.0005 ? 1.0 : 0.0;
                } else if (is_flag(name)) {
                    v = rng.uniform() < m ? 1.0 : 0.0;
                } else if (is_rate(name)) {
                    v = std::round(std::clamp(m + 0.15 * rng.normal(), 0.0, 1.0) * 100.0) / 100.0;
                } else if (name == "duration") {
                    v = rng.uniform() < m * 0.3 ? std::floor(rng.uniform() * 2000.0 * m) : 0.0;
                } else if (name == "src_bytes" || name == "dst_bytes") {
                    v = std::floor(std::exp(2.0 + 8.0 * m + rng.normal()));
                } else {
                    v = std::floor(std::max(0.0, 50.0 * m + 10.0 * m * rng.normal()));
                }
                std::snprintf(buf, sizeof buf, "%.17g", v);
                out += buf;
            }
            out += ',';
        }
        out += kClasses[c];
        out += ',';
        out += std::to_string(10 + rng.below(12));
        out += '\n';
    }
    return out;
}

idsfx::Matrix uniform(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    idsfx::Rng rng(seed);
    idsfx::Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.uniform();
    return m;
}

idsfx::Matrix low_rank(std::size_t rows, std::size_t cols, std::size_t rank, std::uint64_t seed) {
    const idsfx::Matrix w = uniform(rows, rank, idsfx::mix_seed(seed, 1));
    const idsfx::Matrix h = uniform(rank, cols, idsfx::mix_seed(seed, 2));
    idsfx::Matrix x;
    idsfx::kernels::serial::gemm(w, h, x);
    return x;
}

std::vector<int> labels(std::size_t rows, int classes, std::uint64_t seed) {
    idsfx::Rng rng(seed);
    std::vector<int> y(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        y[i] = i < static_cast<std::size_t>(classes) ? static_cast<int>(i)
                                                     : static_cast<int>(rng.below(classes));
    }
    return y;
}

}  // namespace synth
