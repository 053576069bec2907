#include "macrosim/states.hpp"

#include "macrosim/hermite.hpp"
#include "macrosim/operators.hpp"

#include <cmath>

namespace macrosim {

namespace {

constexpr Cx kI{0.0, 1.0};

Cx minus_i_pow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1, 0};
        case 1: return {0, -1};
        case 2: return {-1, 0};
        default: return {0, 1};
    }
}

Vec squeezed_amps(double zeta, bool alternate_sign, int n_max) {
    if (zeta <= 0) throw std::invalid_argument("squeezed vacuum: zeta must be > 0");
    Vec amps = Vec::Zero(n_max);
    const double pref = std::sqrt(2.0 * zeta / (1.0 + zeta * zeta));
    const double ratio = (1.0 - zeta * zeta) / (1.0 + zeta * zeta);
    double c = pref;
    amps(0) = c;
    for (int m = 1; 2 * m < n_max; ++m) {
        c *= (alternate_sign ? -ratio : ratio) * std::sqrt((2.0 * m - 1.0) / (2.0 * m));
        amps(2 * m) = c;
    }
    return amps;
}

FockState finish_squeezed(Vec amps, int n_max, double norm_tol) {
    const double n2 = amps.squaredNorm();
    if (1.0 - n2 > norm_tol)
        throw std::runtime_error("squeezed vacuum: norm deficit " +
                                 std::to_string(1.0 - n2) + " exceeds tolerance at cutoff");
    amps /= std::sqrt(n2);
    return FockState(std::move(amps), {n_max}, NormKind::unit);
}

}  // namespace

FockState squeezed_vacuum_q(double zeta, Cutoff cutoff, double norm_tol) {
    return finish_squeezed(squeezed_amps(zeta, true, cutoff.n_max), cutoff.n_max, norm_tol);
}

FockState squeezed_vacuum_p(double zeta, Cutoff cutoff, double norm_tol) {
    return finish_squeezed(squeezed_amps(zeta, false, cutoff.n_max), cutoff.n_max, norm_tol);
}

FockState ideal_q_eigenstate(double value, Cutoff cutoff) {
    RVec h = hermite_values(cutoff.n_max, value);
    return FockState(h.cast<Cx>(), {cutoff.n_max}, NormKind::density);
}

FockState ideal_p_eigenstate(double value, Cutoff cutoff) {
    RVec h = hermite_values(cutoff.n_max, value);
    Vec amps(cutoff.n_max);
    for (int n = 0; n < cutoff.n_max; ++n) amps(n) = std::conj(minus_i_pow(n)) * h(n);
    return FockState(std::move(amps), {cutoff.n_max}, NormKind::density);
}

DampedState damp_and_normalize(const FockState& ideal, double beta, double tail_tol) {
    if (beta <= 0) throw std::invalid_argument("damp_and_normalize: beta must be > 0");
    const int n = int(ideal.dim());
    Vec amps = ideal.amps();
    for (int k = 0; k < n; ++k) amps(k) *= std::exp(-beta * k);
    const double n2 = amps.squaredNorm();
    if (n2 == 0.0) throw std::runtime_error("damp_and_normalize: zero norm");
    // Convergence gate: relative weight in the top Fock levels.  The window
    // spans at least 6 levels so comb states (support every 2nd or 4th level)
    // always contribute.
    const int top = std::max(6, n / 10);
    const double tail = amps.tail(top).squaredNorm() / n2;
    if (tail > tail_tol)
        throw std::runtime_error("damp_and_normalize: cutoff too small for beta (tail mass " +
                                 std::to_string(tail) + ")");
    return {FockState(amps / std::sqrt(n2), ideal.mode_dims(), NormKind::unit), n2};
}

FockState damped_quadrature_eigenstate(QuadKind kind, double value, double beta,
                                       Cutoff cutoff) {
    FockState ideal = (kind == QuadKind::q) ? ideal_q_eigenstate(value, cutoff)
                                            : ideal_p_eigenstate(value, cutoff);
    return damp_and_normalize(ideal, beta).state;
}

FockState fock_epr(Cutoff cutoff) {
    const int n = cutoff.n_max;
    Vec amps = Vec::Zero(Eigen::Index(n) * n);
    const double c = 1.0 / std::sqrt(2.0 * M_PI);
    for (int k = 0; k < n; ++k) amps(Eigen::Index(k) * n + k) = c;
    return FockState(std::move(amps), {n, n}, NormKind::density);
}

std::vector<double> comb_sites(double spacing, double offset, double beta, double eps) {
    const double radius = std::sqrt(2.0 * std::log(1.0 / eps) / std::max(beta, 1e-9));
    std::vector<double> sites;
    for (int k = 0;; ++k) {
        bool any = false;
        const double s1 = offset + k * spacing;
        if (std::abs(s1) <= radius) {
            sites.push_back(s1);
            any = true;
        }
        if (k > 0) {
            const double s2 = offset - k * spacing;
            if (std::abs(s2) <= radius) {
                sites.push_back(s2);
                any = true;
            }
        }
        if (!any && k > 0) break;
    }
    std::sort(sites.begin(), sites.end());
    return sites;
}

namespace {

/// Sum h_n over symmetric comb sites, exploiting parity so odd-n (for
/// integer-parity combs) are exact structural zeros:  the site sets used
/// here are symmetric about 0, so sum_k h_n = 2 sum_{x>0} h_n (n even) plus
/// the x = 0 term, and 0 for odd n.
Vec symmetric_comb_sum(const std::vector<double>& positive_sites, bool has_zero_site,
                       int n_max, int support_modulus) {
    Vec amps = Vec::Zero(n_max);
    RVec acc = RVec::Zero(n_max);
    for (double x : positive_sites) acc += hermite_values(n_max, x);
    RVec zero = has_zero_site ? hermite_values(n_max, 0.0) : RVec::Zero(n_max);
    for (int n = 0; n < n_max; ++n) {
        if (n % support_modulus != 0) continue;   // structural zero
        amps(n) = 2.0 * acc(n) + zero(n);
    }
    return amps;
}

}  // namespace

FockState gkp_codeword_ideal(int j, Cutoff cutoff, double site_beta) {
    if (j != 0 && j != 1) throw std::invalid_argument("gkp_codeword: j must be 0 or 1");
    const double spacing = 2.0 * std::sqrt(M_PI);
    const double offset = j * std::sqrt(M_PI);
    auto sites = comb_sites(spacing, offset, site_beta);
    std::vector<double> positive;
    bool has_zero = false;
    for (double s : sites) {
        if (s > 1e-12)
            positive.push_back(s);
        else if (std::abs(s) <= 1e-12)
            has_zero = true;
    }
    Vec amps = symmetric_comb_sum(positive, has_zero, cutoff.n_max, 2);
    amps *= std::sqrt(2.0 * std::sqrt(M_PI));
    return FockState(std::move(amps), {cutoff.n_max}, NormKind::density);
}

FockState gkp_codeword(int j, double beta, Cutoff cutoff) {
    return damp_and_normalize(gkp_codeword_ideal(j, cutoff, beta), beta).state;
}

FockState qunaught_ideal(Cutoff cutoff, double site_beta) {
    const double spacing = std::sqrt(2.0 * M_PI);
    auto sites = comb_sites(spacing, 0.0, site_beta);
    std::vector<double> positive;
    for (double s : sites)
        if (s > 1e-12) positive.push_back(s);
    // Fourier invariance F|o> = |o> forces support on n = 0 (mod 4).
    Vec amps = symmetric_comb_sum(positive, true, cutoff.n_max, 4);
    amps *= std::pow(2.0 * M_PI, 0.25);
    return FockState(std::move(amps), {cutoff.n_max}, NormKind::density);
}

FockState qunaught(double beta, Cutoff cutoff) {
    return damp_and_normalize(qunaught_ideal(cutoff, beta), beta).state;
}

FockState gkp_bell_pair(double beta, Cutoff cutoff) {
    const int n = cutoff.n_max;
    Vec c0 = gkp_codeword_ideal(0, cutoff, beta).amps();
    Vec c1 = gkp_codeword_ideal(1, cutoff, beta).amps();
    RVec damp = damping_diag(beta, n);
    Vec amps(Eigen::Index(n) * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            amps(Eigen::Index(a) * n + b) =
                damp(a) * damp(b) * (c0(a) * c0(b) + c1(a) * c1(b));
    const double norm = amps.norm();
    if (norm == 0.0) throw std::runtime_error("gkp_bell_pair: zero norm");
    return FockState(amps / norm, {n, n}, NormKind::unit);
}

GkpQuality GkpQuality::from_beta(double beta) {
    if (beta <= 0) throw std::invalid_argument("GkpQuality: beta must be > 0");
    return {beta, beta, beta, -10.0 * std::log10(beta)};
}

GkpQuality GkpQuality::from_db(double s_gkp_db) {
    return from_beta(std::pow(10.0, -s_gkp_db / 10.0));
}

std::vector<Cx> wavefunction(const FockState& state, QuadKind basis,
                             const std::vector<double>& grid) {
    if (state.n_modes() != 1)
        throw std::invalid_argument("wavefunction: single-mode states only");
    const int n = int(state.dim());
    std::vector<Cx> out(grid.size());
    Vec coeff = state.amps();
    if (basis == QuadKind::p)
        for (int k = 0; k < n; ++k) coeff(k) *= minus_i_pow(k);
    // Grid points beyond the classical turning point sqrt(2 n_max + 1) carry
    // only the exponentially small Hermite tails; values there are returned
    // but not meaningful at this cutoff.
    for (size_t g = 0; g < grid.size(); ++g) {
        RVec h = hermite_values(n, grid[g]);
        Cx v = 0;
        for (int k = 0; k < n; ++k) v += coeff(k) * h(k);
        out[g] = v;
    }
    return out;
}

std::vector<double> gkp_wavefunction_analytic(int j, double beta,
                                              const std::vector<double>& grid) {
    if (j != 0 && j != 1) throw std::invalid_argument("gkp_wavefunction_analytic: j in {0,1}");
    const double delta_sq = beta, kappa_sq = beta;
    const double spacing = 2.0 * std::sqrt(M_PI);
    const double pref = std::sqrt(2.0) * std::pow(M_PI, -0.25);
    std::vector<double> out(grid.size(), 0.0);
    for (size_t g = 0; g < grid.size(); ++g) {
        const double s = grid[g];
        double comb = 0.0;
        const int k0 = int(std::floor((s - j * std::sqrt(M_PI)) / spacing));
        for (int k = k0 - 8; k <= k0 + 8; ++k) {
            const double site = k * spacing + j * std::sqrt(M_PI);
            comb += std::exp(-(s - site) * (s - site) / (2.0 * delta_sq));
        }
        out[g] = pref * std::exp(-0.5 * kappa_sq * s * s) * comb;
    }
    return out;
}

// ---------------------------------------------------------------------------
// AncillaSpec

AncillaSpec AncillaSpec::q_eig(double s, double beta) {
    AncillaSpec a;
    a.kind = Kind::q_eigenstate;
    a.param = s;
    a.beta = beta;
    return a;
}

AncillaSpec AncillaSpec::p_eig(double t, double beta) {
    AncillaSpec a;
    a.kind = Kind::p_eigenstate;
    a.param = t;
    a.beta = beta;
    return a;
}

AncillaSpec AncillaSpec::squeezed_q_spec(double zeta) {
    AncillaSpec a;
    a.kind = Kind::squeezed_q;
    a.param = zeta;
    return a;
}

AncillaSpec AncillaSpec::squeezed_p_spec(double zeta) {
    AncillaSpec a;
    a.kind = Kind::squeezed_p;
    a.param = zeta;
    return a;
}

AncillaSpec AncillaSpec::qunaught_spec(double beta) {
    AncillaSpec a;
    a.kind = Kind::qunaught;
    a.beta = beta;
    return a;
}

AncillaSpec AncillaSpec::gkp(int j, double beta) {
    AncillaSpec a;
    a.kind = Kind::gkp_codeword;
    a.j = j;
    a.beta = beta;
    return a;
}

AncillaSpec AncillaSpec::gkp_pm(int sign_plus, double beta) {
    AncillaSpec a;
    a.kind = Kind::gkp_plus_minus;
    a.j = sign_plus ? 0 : 1;
    a.beta = beta;
    return a;
}

AncillaSpec AncillaSpec::custom_spec(Vec amps, double beta) {
    AncillaSpec a;
    a.kind = Kind::custom;
    a.custom_amps = std::move(amps);
    a.beta = beta;
    return a;
}

double AncillaSpec::effective_beta() const {
    if (kind == Kind::squeezed_q || kind == Kind::squeezed_p) {
        double zeta = param;
        if (zeta <= 0.0) throw std::invalid_argument("AncillaSpec: zeta must be > 0");
        if (zeta >= 1.0)
            throw std::invalid_argument("AncillaSpec: squeezed kinds need zeta < 1 "
                                        "(use the conjugate quadrature for zeta > 1)");
        // tanh r = e^{-2 beta}, zeta = e^{-r}.
        const double r = -std::log(zeta);
        return 0.5 * std::log(1.0 / std::tanh(r));
    }
    return beta;
}

Vec AncillaSpec::ideal_vector(Cutoff cutoff) const {
    switch (kind) {
        case Kind::q_eigenstate:
            return ideal_q_eigenstate(param, cutoff).amps();
        case Kind::p_eigenstate:
            return ideal_p_eigenstate(param, cutoff).amps();
        case Kind::squeezed_q:
            return ideal_q_eigenstate(0.0, cutoff).amps();
        case Kind::squeezed_p:
            return ideal_p_eigenstate(0.0, cutoff).amps();
        case Kind::qunaught:
            return qunaught_ideal(cutoff, std::max(beta, 1e-3)).amps();
        case Kind::gkp_codeword:
            return gkp_codeword_ideal(j, cutoff, std::max(beta, 1e-3)).amps();
        case Kind::gkp_plus_minus: {
            Vec c0 = gkp_codeword_ideal(0, cutoff, std::max(beta, 1e-3)).amps();
            Vec c1 = gkp_codeword_ideal(1, cutoff, std::max(beta, 1e-3)).amps();
            return (j == 0) ? Vec((c0 + c1) / std::sqrt(2.0))
                            : Vec((c0 - c1) / std::sqrt(2.0));
        }
        case Kind::custom: {
            if (!custom_amps) throw std::invalid_argument("AncillaSpec: missing custom amps");
            Vec v = *custom_amps;
            if (v.size() > cutoff.n_max) throw std::invalid_argument("AncillaSpec: custom too long");
            Vec out = Vec::Zero(cutoff.n_max);
            out.head(v.size()) = v;
            return out;
        }
    }
    throw std::logic_error("AncillaSpec: unknown kind");
}

DampedState AncillaSpec::damped_unit(Cutoff cutoff) const {
    const double b = effective_beta();
    if (b <= 0)
        throw std::invalid_argument("AncillaSpec: beta > 0 required for a normalizable state");
    FockState ideal(ideal_vector(cutoff), {cutoff.n_max}, NormKind::density);
    return damp_and_normalize(ideal, b);
}

AncillaSpec AncillaSpec::parse(const std::string& text) {
    auto next_field = [](const std::string& s, size_t& pos) -> std::string {
        size_t colon = s.find(':', pos);
        std::string f = (colon == std::string::npos) ? s.substr(pos) : s.substr(pos, colon - pos);
        pos = (colon == std::string::npos) ? s.size() : colon + 1;
        return f;
    };
    size_t pos = 0;
    std::string kind = next_field(text, pos);
    auto num = [&](double fallback) {
        if (pos >= text.size()) return fallback;
        return std::stod(next_field(text, pos));
    };
    if (kind == "squeezed_q") {
        AncillaSpec a;
        a.kind = Kind::q_eigenstate;
        a.param = 0.0;
        a.beta = num(0.05);
        return a;
    }
    if (kind == "squeezed_p") {
        AncillaSpec a;
        a.kind = Kind::p_eigenstate;
        a.param = 0.0;
        a.beta = num(0.05);
        return a;
    }
    if (kind == "q_eig") {
        double v = num(0.0);
        return q_eig(v, num(0.05));
    }
    if (kind == "p_eig") {
        double v = num(0.0);
        return p_eig(v, num(0.05));
    }
    if (kind == "qunaught") return qunaught_spec(num(0.05));
    if (kind == "gkp0") return gkp(0, num(0.05));
    if (kind == "gkp1") return gkp(1, num(0.05));
    if (kind == "gkp+") return gkp_pm(1, num(0.05));
    if (kind == "gkp-") return gkp_pm(0, num(0.05));
    throw std::invalid_argument("AncillaSpec::parse: unknown kind '" + kind + "'");
}

}  // namespace macrosim
