#include "macrosim/gkp_ec.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

namespace macrosim {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

std::array<int, 2> decode_bin(Cx mu_v) {
    // Position/momentum shifts of D(mu) are (sqrt2 muR, sqrt2 muI); bin to
    // the sqrt(pi) lattice.
    return {int(std::lround(std::sqrt(2.0) * mu_v.real() / kSqrtPi)),
            int(std::lround(std::sqrt(2.0) * mu_v.imag() / kSqrtPi))};
}

std::pair<Cx, Cx> readout_unchecked(const FockState& state, double beta) {
    Cutoff c(int(state.dim()));
    FockState g0 = gkp_codeword(0, beta, c);
    FockState g1 = gkp_codeword(1, beta, c);
    Cx b0 = overlap(g0, state), b1 = overlap(g1, state);
    Cx g01 = overlap(g0, g1);
    // Solve the 2x2 Gram system [[1, g],[g*, 1]] c = b.
    Cx det = 1.0 - g01 * std::conj(g01);
    Cx c0 = (b0 - g01 * b1) / det;
    Cx c1 = (b1 - std::conj(g01) * b0) / det;
    double norm = std::sqrt(std::norm(c0) + std::norm(c1));
    if (norm == 0.0) return {0.0, 0.0};
    return {c0 / norm, c1 / norm};
}

}  // namespace

GadgetConfig EcCase::gadget(Cutoff cutoff) const {
    AncillaSpec psi, phi;
    switch (variant) {
        case Variant::A:
            psi = AncillaSpec::p_eig(0.0, beta);
            phi = AncillaSpec::qunaught_spec(beta);
            break;
        case Variant::B:
            psi = AncillaSpec::qunaught_spec(beta);
            phi = AncillaSpec::q_eig(0.0, beta);
            break;
        case Variant::AB:
            psi = AncillaSpec::qunaught_spec(beta);
            phi = AncillaSpec::qunaught_spec(beta);
            break;
    }
    return GadgetConfig{theta_a, theta_b, psi, phi, cutoff};
}

GadgetConfig plain_teleport_gadget(double beta, Cutoff cutoff, double theta_a,
                                   double theta_b) {
    return GadgetConfig{theta_a, theta_b, AncillaSpec::p_eig(0.0, beta),
                        AncillaSpec::q_eig(0.0, beta), cutoff};
}

std::pair<FockState, SyndromeRecord> ec_step(const EcCase& ec, const FockState& input,
                                             const HomodyneOutcome& outcome) {
    Cutoff cutoff(int(input.dim()));
    TeleportEngine engine(ec.gadget(cutoff));
    Vec out = engine.apply(input, outcome);
    const double n2 = out.squaredNorm();
    if (n2 < 1e-280)
        throw std::runtime_error("ec_step: vanishing outcome density, resample");
    FockState result(out / std::sqrt(n2), input.mode_dims(), NormKind::unit);
    SyndromeRecord rec;
    rec.outcome = outcome;
    rec.mu = mu(ec.theta_a, ec.theta_b, outcome.m_a, outcome.m_b);
    rec.shift_bin = decode_bin(rec.mu);
    std::tie(rec.c0, rec.c1) = readout_unchecked(result, ec.beta);
    rec.pr_density = n2 / input.amps().squaredNorm();
    return {std::move(result), rec};
}

double codespace_weight(const FockState& state, double beta) {
    Cutoff c(int(state.dim()));
    FockState g0 = gkp_codeword(0, beta, c);
    FockState g1 = gkp_codeword(1, beta, c);
    Cx b0 = overlap(g0, state), b1 = overlap(g1, state);
    Cx g01 = overlap(g0, g1);
    Cx det = 1.0 - g01 * std::conj(g01);
    Cx c0 = (b0 - g01 * b1) / det;
    Cx c1 = (b1 - std::conj(g01) * b0) / det;
    // b^dag G^{-1} b = Re(conj(b) . c)
    double w = (std::conj(b0) * c0 + std::conj(b1) * c1).real();
    return w / state.amps().squaredNorm();
}

std::pair<Cx, Cx> logical_readout(const FockState& state, double beta) {
    double w = codespace_weight(state, beta);
    if (w < 0.9)
        throw std::runtime_error("logical_readout: codespace weight " + std::to_string(w) +
                                 " below 0.9");
    return readout_unchecked(state, beta);
}

std::vector<double> SampleGrid::points() const {
    std::vector<double> pts;
    for (double x = lo; x <= hi + 1e-12; x += step) pts.push_back(x);
    return pts;
}

HomodyneOutcome sample_outcome(const TeleportEngine& engine, const FockState& input,
                               std::mt19937_64& rng, const SampleGrid& grid) {
    auto pts = grid.points();
    RMat dens = engine.density_grid(input, pts);
    const double mass = dens.sum() * grid.step * grid.step / input.amps().squaredNorm();
    if (mass < 0.999)
        throw std::runtime_error("sample_outcome: grid mass " + std::to_string(mass) +
                                 " < 0.999, widen the grid");
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double target = uni(rng) * dens.sum();
    double acc = 0.0;
    const int g = int(pts.size());
    for (int ia = 0; ia < g; ++ia)
        for (int jb = 0; jb < g; ++jb) {
            acc += dens(ia, jb);
            if (acc >= target) return {pts[ia], pts[jb]};
        }
    return {pts[g - 1], pts[g - 1]};
}

namespace {

struct StepEngines {
    std::map<int, std::unique_ptr<TeleportEngine>> engines;
    const TeleportEngine& get(StepKind kind, double beta, Cutoff cutoff) {
        auto& slot = engines[int(kind)];
        if (!slot) {
            GadgetConfig cfg = (kind == StepKind::plain)
                                   ? plain_teleport_gadget(beta, cutoff)
                                   : EcCase{kind == StepKind::ec_a   ? EcCase::Variant::A
                                            : kind == StepKind::ec_b ? EcCase::Variant::B
                                                                     : EcCase::Variant::AB,
                                            beta}
                                         .gadget(cutoff);
            slot.reset(new TeleportEngine(cfg));
        }
        return *slot;
    }
};

Vec displace(const Vec& v, Cx alpha) {
    return QuadratureEigen::get(int(v.size())).apply_displacement(alpha, v);
}

}  // namespace

ChainReport run_chain(const std::vector<StepKind>& schedule, Cx c0, Cx c1,
                      std::uint64_t seed, const ChainOptions& opts) {
    Cutoff cutoff(opts.cutoff);
    const int n = opts.cutoff;
    FockState g0 = gkp_codeword(0, opts.beta, cutoff);
    FockState g1 = gkp_codeword(1, opts.beta, cutoff);
    Vec enc = c0 * g0.amps() + c1 * g1.amps();
    enc /= enc.norm();
    FockState state(enc, {n}, NormKind::unit);
    FockState reference = state;

    std::mt19937_64 rng(seed);
    StepEngines engines;
    ChainReport report;
    report.seed = seed;
    report.steps = int(schedule.size());
    report.squeezing_db = -10.0 * std::log10(opts.beta);
    report.beta = opts.beta;
    report.cutoff = opts.cutoff;
    report.correction = (opts.correction == CorrectionMode::active) ? "active" : "frame";

    // Pending displacement frame (frame mode): D(f) yet to be undone.
    Cx frame = 0.0;
    for (StepKind kind : schedule) {
        const TeleportEngine& engine = engines.get(kind, opts.beta, cutoff);
        HomodyneOutcome m = sample_outcome(engine, state, rng, opts.grid);
        Vec out = engine.apply(state, m);
        const double n2 = out.squaredNorm();
        if (n2 < 1e-280) throw std::runtime_error("run_chain: vanishing outcome density");

        SyndromeRecord rec;
        rec.outcome = m;
        rec.mu = mu(engine.config().theta_a, engine.config().theta_b, m.m_a, m.m_b);
        rec.shift_bin = decode_bin(rec.mu);
        rec.pr_density = n2;

        if (kind == StepKind::plain) {
            if (opts.correction == CorrectionMode::active) {
                out = displace(out, -rec.mu);
            } else {
                frame += rec.mu;   // V = I at the default angles; D phases drop in fidelity
            }
        } else {
            // EC steps correct the sqrt(pi)-lattice part of the accumulated
            // displacement; fold any pending frame in first.
            if (frame != Cx(0.0)) {
                out = displace(out, -frame);
                frame = 0.0;
            }
            Cx lattice(rec.shift_bin[0] * kSqrtPi / std::sqrt(2.0),
                       rec.shift_bin[1] * kSqrtPi / std::sqrt(2.0));
            out = displace(out, -lattice);
        }
        out /= out.norm();
        state = FockState(out, {n}, NormKind::unit);
        std::tie(rec.c0, rec.c1) = readout_unchecked(state, opts.beta);
        report.records.push_back(rec);
    }
    if (frame != Cx(0.0)) {
        Vec fin = displace(state.amps(), -frame);
        state = FockState(fin / fin.norm(), {n}, NormKind::unit);
    }
    report.logical_fidelity = fidelity_up_to_phase(reference, state);
    return report;
}

std::string ChainReport::to_json() const {
    nlohmann::json j;
    j["config"]["beta"] = beta;
    j["config"]["cutoff"] = cutoff;
    j["config"]["correction"] = correction;
    j["steps"] = steps;
    j["seed"] = seed;
    j["squeezing_db"] = squeezing_db;
    j["logical_fidelity"] = logical_fidelity;
    j["records"] = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json rj;
        rj["m_a"] = r.outcome.m_a;
        rj["m_b"] = r.outcome.m_b;
        rj["mu_re"] = r.mu.real();
        rj["mu_im"] = r.mu.imag();
        rj["shift_bin"] = {r.shift_bin[0], r.shift_bin[1]};
        rj["c0_re"] = r.c0.real();
        rj["c0_im"] = r.c0.imag();
        rj["c1_re"] = r.c1.real();
        rj["c1_im"] = r.c1.imag();
        rj["pr_density"] = r.pr_density;
        j["records"].push_back(rj);
    }
    return j.dump(2);
}

SweepPoint run_sweep_point(int steps, int ec_period, Cx c0, Cx c1, int n_seeds,
                           std::uint64_t seed0, const ChainOptions& opts) {
    std::vector<StepKind> schedule;
    for (int s = 1; s <= steps; ++s) {
        if (ec_period > 0 && s % ec_period == 0)
            schedule.push_back(StepKind::ec_ab);
        else
            schedule.push_back(StepKind::plain);
    }
    // Seeds are independent chains; run them on a small pool and aggregate
    // order-independently.
    int n_threads = 2;
    if (const char* env = std::getenv("MACROSIM_THREADS")) n_threads = std::max(1, std::atoi(env));
    n_threads = std::min(n_threads, n_seeds);
    std::vector<double> fid(n_seeds, 0.0);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int s = next.fetch_add(1);
            if (s >= n_seeds) return;
            fid[s] = run_chain(schedule, c0, c1, seed0 + s, opts).logical_fidelity;
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    double sum = 0.0, sum2 = 0.0;
    for (double f : fid) {
        sum += f;
        sum2 += f * f;
    }
    const double mean = sum / n_seeds;
    const double var = std::max(0.0, sum2 / n_seeds - mean * mean);
    return {-10.0 * std::log10(opts.beta), opts.beta,     steps,
            ec_period,                     mean,          std::sqrt(var / n_seeds),
            n_seeds};
}

const char* kSweepCsvHeader = "squeezing_db,beta,steps,ec_period,mean_fidelity,stderr,n_seeds";

std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::ostringstream os;
    os << "# macrosim-sweep-v1\n" << kSweepCsvHeader << "\n";
    os.precision(10);
    for (const auto& p : points)
        os << p.squeezing_db << ',' << p.beta << ',' << p.steps << ',' << p.ec_period << ','
           << p.mean_fidelity << ',' << p.stderr_fidelity << ',' << p.n_seeds << "\n";
    return os.str();
}

}  // namespace macrosim
