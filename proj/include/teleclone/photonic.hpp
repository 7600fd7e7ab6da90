#pragma once

// Two polarization-encoded photons meeting on a 50:50 beamsplitter (BS_A)
// with partial temporal overlap, followed by polarization analysis of output
// mode 1 through WP_C/PBS_C and a BS_C two-photon counter.
//
// Beamsplitter convention: a_S^+ -> (a_1^+ + a_2^+)/sqrt2,
//                          a_A^+ -> (a_1^+ - a_2^+)/sqrt2.

#include "teleclone/analysis.hpp"
#include "teleclone/quantum.hpp"
#include "teleclone/random.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace teleclone::photonic {

using analysis::CoincidenceTally;
using analysis::fidelity_from_r;
using quantum::DensityMatrix;
using quantum::Qubit;

inline constexpr double kSpeedOfLightUmPerFs = 0.299792458;
inline constexpr std::uint64_t kDefaultSeed = 20030917;

// Stage setting Z = 2 c dt.
double delay_from_stage(double z_um) noexcept;
double stage_from_delay(double delay_fs) noexcept;

// Gaussian overlap exp(-(dt/tau)^2). Rejects tau_coh_fs <= 0.
double overlap_from_delay(double z_um, double tau_coh_fs);

enum class AncillaModel { LinearWaveplate, Haar };

const char* to_string(AncillaModel m) noexcept;
AncillaModel parse_ancilla_model(const std::string& name); // "linear" | "linear-waveplate" | "haar"

// Linear waveplate: cos(chi)|H> + sin(chi)|V>, chi ~ U[0, pi). Haar: Bloch-uniform.
Qubit sample_ancilla(RandomStream& rng, AncillaModel model);

class PhotonPair {
public:
    PhotonPair(Qubit pol_s, Qubit pol_a, double overlap_v);

    const Qubit& pol_S() const noexcept { return pol_s_; }
    const Qubit& pol_A() const noexcept { return pol_a_; }
    double overlap_v() const noexcept { return overlap_v_; }

private:
    Qubit pol_s_;
    Qubit pol_a_;
    double overlap_v_;
};

enum class Routing { BothMode1, BothMode2, SplitModes };

// Content of output mode 1 in the analysis basis {phi = pol_S, phi_perp}.
// Determines the routing: None <-> both in mode 2, one photon <-> split.
enum class Mode1Pols { None, Phi, Perp, PhiPhi, PhiPerp, PerpPerp };

inline constexpr std::array<Mode1Pols, 6> kAllMode1Pols{Mode1Pols::None,   Mode1Pols::Phi,     Mode1Pols::Perp,
                                                        Mode1Pols::PhiPhi, Mode1Pols::PhiPerp, Mode1Pols::PerpPerp};

Routing routing_of(Mode1Pols pols) noexcept;
const char* to_string(Routing r) noexcept;
const char* to_string(Mode1Pols p) noexcept;

class BranchProbabilities {
public:
    double operator()(Mode1Pols pols) const noexcept { return p_[static_cast<std::size_t>(pols)]; }
    double operator()(Routing routing) const noexcept;
    double total() const noexcept;

    double& at(Mode1Pols pols) noexcept { return p_[static_cast<std::size_t>(pols)]; }

private:
    std::array<double, 6> p_{};
};

// Exact output statistics from the second-quantized expansion of the two
// creation operators over 8 modes (2 spatial x 2 polarization x 2 temporal).
BranchProbabilities beamsplitter_branch_probabilities(const PhotonPair& pair);

enum Detector : std::uint8_t { kDA1 = 1u << 0, kDA2 = 1u << 1, kDB = 1u << 2 };

struct DetectionEvent {
    Routing routing = Routing::SplitModes;
    Mode1Pols mode1_pols = Mode1Pols::None;
    std::uint8_t detector_hits = 0; // bitmask of Detector

    bool fired(Detector d) const noexcept { return (detector_hits & d) != 0; }
    bool clone_coincidence() const noexcept { return fired(kDA1) && fired(kDA2); }
    bool anti_coincidence() const noexcept { return fired(kDA2) && fired(kDB); }
};

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    std::vector<std::string> problems_;
};

struct DelayScanConfig {
    std::vector<double> z_values;     // micrometers
    double tau_coh = 80.0;            // femtoseconds
    double wavelength = 532.0;        // nanometers, metadata only
    std::uint64_t trials_per_z = 100000;
    Qubit input_phi = Qubit::zero();
    std::string input_phi_label = "H";
    std::uint64_t seed = kDefaultSeed;
    AncillaModel ancilla_model = AncillaModel::LinearWaveplate;
    double v_max = 1.0;               // mode-match ceiling applied to every overlap
    double baseline_min_delay_tau = 3.0;

    // One "field: problem" entry per violation; empty when valid.
    std::vector<std::string> validate() const;
    double overlap_at(double z_um) const;
    analysis::BaselineWindow baseline_window() const { return {tau_coh, baseline_min_delay_tau}; }
    analysis::ScanMetadata metadata() const;
};

// 21 points spanning dt in [-5 tau, 5 tau], 1e5 trials each.
DelayScanConfig default_scan_config();

// Endpoints included; the midpoint of a symmetric range is exactly 0.
std::vector<double> linspace(double lo, double hi, std::size_t steps);

DetectionEvent run_trial(const Qubit& phi, double z_um, const DelayScanConfig& cfg, RandomStream& rng);

// Trial t at z index k draws from RandomStream(seed, k, t), so tallies do not
// depend on `threads` (0 = hardware concurrency).
std::vector<CoincidenceTally> run_scan(const DelayScanConfig& cfg, unsigned threads = 0);

struct Mode1State {
    DensityMatrix rho; // over photons "p1", "p2" in the H/V basis
    double weight_clone = 0.0;
    double weight_mixed = 0.0;
    double single_clone_fidelity = 0.0;
};

// Two-photon polarization state of mode 1 conditioned on both photons exiting
// there, averaged over a fully mixed ancilla.
Mode1State analytic_mode1_state(const Qubit& phi, double v);

} // namespace teleclone::photonic
