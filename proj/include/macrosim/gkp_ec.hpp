#pragma once

#include "macrosim/gadget.hpp"

#include <cstdint>
#include <random>

namespace macrosim {

/// Qunaught placement within the teleportation gadget.
///   A:  psi = damped 0-momentum eigenstate, phi = damped qunaught
///       (projects sqrt(pi)-periodic momentum).
///   B:  psi = damped qunaught, phi = damped 0-position eigenstate
///       (projects sqrt(pi)-periodic position).
///   AB: both qunaughts (full GKP projector).
struct EcCase {
    enum class Variant { A, B, AB };
    Variant variant = Variant::AB;
    double beta = 0.05;
    double theta_a = M_PI / 2;
    double theta_b = 0.0;

    GadgetConfig gadget(Cutoff cutoff) const;
};

/// A plain teleportation step (squeezed/squeezed ancillae, no comb).
GadgetConfig plain_teleport_gadget(double beta, Cutoff cutoff, double theta_a = M_PI / 2,
                                   double theta_b = 0.0);

struct SyndromeRecord {
    HomodyneOutcome outcome;
    Cx mu;
    std::array<int, 2> shift_bin{0, 0};   // nearest sqrt(pi)-lattice bins of (sqrt2 muR, sqrt2 muI)
    Cx c0, c1;                            // logical coefficients of the output
    double pr_density = 0.0;
};

/// One error-correction step: output = K(outcome) input, normalized, plus the
/// decoded record.  Throws if the outcome density vanishes at this outcome
/// (resample signal).
std::pair<FockState, SyndromeRecord> ec_step(const EcCase& ec, const FockState& input,
                                             const HomodyneOutcome& outcome);

/// Dual-basis (least-squares) logical readout against the damped codewords.
/// Requires codespace projection weight >= 0.9 of the state norm.
std::pair<Cx, Cx> logical_readout(const FockState& state, double beta);
/// Projection weight onto the damped codespace (for the error path / tests).
double codespace_weight(const FockState& state, double beta);

struct SampleGrid {
    double lo = -6.0;
    double hi = 6.0;
    double step = 0.05;
    std::vector<double> points() const;
};

/// Inverse-CDF sample from the discretized joint density.  Deterministic
/// given the rng state.  Throws if the grid carries less than 0.999 of the
/// channel mass (widen-grid error).
HomodyneOutcome sample_outcome(const TeleportEngine& engine, const FockState& input,
                               std::mt19937_64& rng, const SampleGrid& grid);

enum class StepKind { plain, ec_a, ec_b, ec_ab };
enum class CorrectionMode {
    active,   // undo D(mu) (plain) / its lattice part (EC) after each step
    frame,    // no active shifts; track the displacement frame classically
};

struct ChainOptions {
    int cutoff = 60;
    double beta = 0.05;
    SampleGrid grid{-12.0, 12.0, 0.1};
    CorrectionMode correction = CorrectionMode::active;
};

struct ChainReport {
    int steps = 0;
    std::vector<SyndromeRecord> records;
    double logical_fidelity = 1.0;   // vs the ideal qubit trajectory re-encoded at beta
    double squeezing_db = 0.0;
    std::uint64_t seed = 0;
    double beta = 0.0;               // config echo
    int cutoff = 0;
    std::string correction;
    std::string to_json() const;
};

/// Run a macronode chain: alternating gadget steps with sampled outcomes.
/// input qubit (c0, c1) is encoded as c0|0bar> + c1|1bar> at opts.beta.
ChainReport run_chain(const std::vector<StepKind>& schedule, Cx c0, Cx c1,
                      std::uint64_t seed, const ChainOptions& opts);

struct SweepPoint {
    double squeezing_db;
    double beta;
    int steps;
    int ec_period;       // 0 = no EC
    double mean_fidelity;
    double stderr_fidelity;
    int n_seeds;
};

/// Monte-Carlo sweep over seeds for one configuration; seeds are
/// seed0 .. seed0 + n_seeds - 1, aggregated order-independently.
SweepPoint run_sweep_point(int steps, int ec_period, Cx c0, Cx c1, int n_seeds,
                           std::uint64_t seed0, const ChainOptions& opts);

/// CSV with header "squeezing_db,beta,steps,ec_period,mean_fidelity,stderr,n_seeds".
std::string sweep_csv(const std::vector<SweepPoint>& points);
extern const char* kSweepCsvHeader;

}  // namespace macrosim
