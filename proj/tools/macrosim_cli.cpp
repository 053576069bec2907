// macrosim: command-line front end for the teleportation-gadget simulator.
//
// Subcommands:
//   identities    run the circuit-identity suite, write a JSON report
//   kraus-compare dual-pipeline Kraus comparison for one gadget
//   ec-sweep      Monte-Carlo chains with periodic GKP error correction, CSV out
//   wavefunction  export position/momentum wavefunction data, CSV out

#include <CLI11.hpp>
#include <json.hpp>

#include "macrosim/gadget.hpp"
#include "macrosim/gkp_ec.hpp"
#include "macrosim/identities.hpp"

#include <fstream>
#include <iostream>

using namespace macrosim;
using nlohmann::json;

namespace {

// Flat JSON config support: keys mirror long option names, optionally
// prefixed "subcommand.option".  CLI flags override file values.
class JsonConfig : public CLI::Config {
  public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override {
        return "{}\n";
    }
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j = json::parse(input);
        std::vector<CLI::ConfigItem> out;
        for (auto& [key, value] : j.items()) {
            CLI::ConfigItem item;
            std::string name = key;
            auto dot = name.rfind('.');
            if (dot != std::string::npos) {
                std::string parents = name.substr(0, dot);
                name = name.substr(dot + 1);
                size_t pos = 0;
                while ((pos = parents.find('.')) != std::string::npos) {
                    item.parents.push_back(parents.substr(0, pos));
                    parents.erase(0, pos + 1);
                }
                item.parents.push_back(parents);
            }
            item.name = name;
            if (value.is_array())
                for (auto& v : value) item.inputs.push_back(v.dump());
            else if (value.is_string())
                item.inputs.push_back(value.get<std::string>());
            else
                item.inputs.push_back(value.dump());
            out.push_back(item);
        }
        return out;
    }
};

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
}

int cmd_identities(const std::vector<std::string>& ids, bool all, int cutoff,
                   std::vector<double> betas, const std::string& out) {
    if (betas.empty()) betas = default_beta_schedule();
    std::vector<std::string> todo = all ? std::vector<std::string>{} : ids;
    auto reports = run_identities(todo, cutoff, betas);
    json doc;
    doc["cutoff"] = cutoff;
    doc["betas"] = betas;
    doc["identities"] = json::array();
    bool ok = true;
    for (const auto& r : reports) {
        doc["identities"].push_back(json::parse(r.to_json()));
        ok = ok && r.pass;
        std::cerr << (r.pass ? "pass " : "FAIL ") << r.id << "  residuals:";
        for (double v : r.residuals) std::cerr << " " << v;
        std::cerr << "\n";
    }
    doc["all_pass"] = ok;
    write_or_print(out, doc.dump(2) + "\n");
    return ok ? 0 : 2;
}

int cmd_kraus_compare(double theta_a, double theta_b, const std::string& psi,
                      const std::string& phi, double ma, double mb, int cutoff,
                      int interior) {
    GadgetConfig cfg{theta_a, theta_b, AncillaSpec::parse(psi), AncillaSpec::parse(phi),
                     Cutoff(cutoff)};
    if (interior <= 0) interior = cfg.interior_box();
    HomodyneOutcome m{ma, mb};
    FockOperator direct = kraus_direct(cfg, m);
    KrausResult analytic = kraus_analytic(cfg, m);
    double dist = op_distance_box(direct, analytic.op, interior);
    json doc;
    doc["theta_a"] = theta_a;
    doc["theta_b"] = theta_b;
    doc["cutoff"] = cutoff;
    doc["interior"] = interior;
    doc["mu"] = {analytic.mu.real(), analytic.mu.imag()};
    doc["mu_prime"] = {analytic.mu_prime.real(), analytic.mu_prime.imag()};
    doc["distance"] = dist;
    std::cout << doc.dump(2) << "\n";
    return 0;
}

int cmd_ec_sweep(const std::string& variant, double beta, int steps, int ec_period,
                 int seeds, std::uint64_t seed0, int cutoff, const std::string& input,
                 const std::string& out) {
    if (variant != "AB")
        throw std::runtime_error("ec-sweep: only the AB schedule is wired into sweeps");
    ChainOptions opts;
    opts.beta = beta;
    opts.cutoff = cutoff;
    Cx c0 = 1.0, c1 = 0.0;
    if (input == "+") {
        c0 = c1 = 1 / std::sqrt(2.0);
    } else if (input == "-") {
        c0 = 1 / std::sqrt(2.0);
        c1 = -c0;
    } else if (input == "1") {
        c0 = 0.0;
        c1 = 1.0;
    } else if (input != "0") {
        throw std::runtime_error("ec-sweep: input must be one of 0, 1, +, -");
    }
    std::vector<SweepPoint> points;
    points.push_back(run_sweep_point(steps, ec_period, c0, c1, seeds, seed0, opts));
    points.push_back(run_sweep_point(steps, 0, c0, c1, seeds, seed0, opts));
    write_or_print(out, sweep_csv(points));
    std::cerr << "ec mean fidelity " << points[0].mean_fidelity << " vs no-ec baseline "
              << points[1].mean_fidelity << " over " << seeds << " seeds\n";
    return 0;
}

std::vector<double> parse_grid(const std::string& spec) {
    auto c1 = spec.find(':');
    auto c2 = spec.find(':', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::runtime_error("grid must be lo:hi:step");
    double lo = std::stod(spec.substr(0, c1));
    double hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    double step = std::stod(spec.substr(c2 + 1));
    std::vector<double> g;
    for (double x = lo; x <= hi + 1e-12; x += step) g.push_back(x);
    return g;
}

int cmd_wavefunction(const std::string& state, double beta, const std::string& basis,
                     const std::string& grid_spec, int cutoff, const std::string& method,
                     const std::string& out) {
    auto grid = parse_grid(grid_spec);
    std::ostringstream os;
    os << "# macrosim-wavefunction-v1\nx,re,im,abs2\n";
    os.precision(12);
    if (method == "analytic") {
        int j = (state == "gkp1") ? 1 : 0;
        if (state != "gkp0" && state != "gkp1")
            throw std::runtime_error("analytic method supports gkp0 and gkp1 only");
        if (basis != "q") throw std::runtime_error("analytic method is position-basis only");
        auto wf = gkp_wavefunction_analytic(j, beta, grid);
        for (size_t i = 0; i < grid.size(); ++i)
            os << grid[i] << ',' << wf[i] << ",0," << wf[i] * wf[i] << "\n";
    } else if (method == "fock") {
        Cutoff c(cutoff);
        FockState st = [&]() -> FockState {
            if (state == "gkp0") return gkp_codeword(0, beta, c);
            if (state == "gkp1") return gkp_codeword(1, beta, c);
            if (state == "qunaught") return qunaught(beta, c);
            if (state == "vacuum") {
                Vec v = Vec::Zero(cutoff);
                v(0) = 1.0;
                return FockState(v, {cutoff}, NormKind::unit);
            }
            return AncillaSpec::parse(state).damped_unit(c).state;
        }();
        QuadKind qk = (basis == "p") ? QuadKind::p : QuadKind::q;
        auto wf = wavefunction(st, qk, grid);
        for (size_t i = 0; i < grid.size(); ++i)
            os << grid[i] << ',' << wf[i].real() << ',' << wf[i].imag() << ','
               << std::norm(wf[i]) << "\n";
    } else {
        throw std::runtime_error("method must be fock or analytic");
    }
    write_or_print(out, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"truncated-Fock simulator for CV gate teleportation and GKP error correction"};
    app.require_subcommand(1);
    app.set_config("--config")->check(CLI::ExistingFile);
    app.config_formatter(std::make_shared<JsonConfig>());

    auto* id_cmd = app.add_subcommand("identities", "run the circuit-identity suite");
    std::vector<std::string> ids;
    bool all = false;
    int cutoff = 60;
    std::vector<double> betas;
    std::string out;
    id_cmd->add_flag("--all", all, "run the full registry");
    id_cmd->add_option("--id", ids, "identity ids to run");
    id_cmd->add_option("--cutoff", cutoff, "comparison-window cutoff")->capture_default_str();
    id_cmd->add_option("--betas", betas, "damping schedule (default 0.1 0.05 0.02)");
    id_cmd->add_option("--out", out, "JSON report path (default stdout)");

    auto* kc = app.add_subcommand("kraus-compare", "dual-pipeline Kraus comparison");
    double theta_a = M_PI / 2, theta_b = 0.0, ma = 0.0, mb = 0.0;
    std::string psi = "squeezed_p:0.05", phi = "squeezed_q:0.05";
    int kc_cutoff = 60, interior = -1;
    kc->add_option("--theta-a", theta_a)->capture_default_str();
    kc->add_option("--theta-b", theta_b)->capture_default_str();
    kc->add_option("--ancilla-psi", psi, "kind[:x[:y]]")->capture_default_str();
    kc->add_option("--ancilla-phi", phi, "kind[:x[:y]]")->capture_default_str();
    kc->add_option("--ma", ma)->capture_default_str();
    kc->add_option("--mb", mb)->capture_default_str();
    kc->add_option("--cutoff", kc_cutoff)->capture_default_str();
    kc->add_option("--interior", interior, "comparison box (default cutoff/4)");

    auto* ec = app.add_subcommand("ec-sweep", "Monte-Carlo EC chains, CSV output");
    std::string variant = "AB", input = "+", ec_out;
    double ec_beta = 0.05;
    int steps = 8, ec_period = 2, seeds = 50, ec_cutoff = 60;
    std::uint64_t seed0 = 1000;
    ec->add_option("--case", variant, "qunaught placement (AB)")->capture_default_str();
    ec->add_option("--beta", ec_beta)->capture_default_str();
    ec->add_option("--steps", steps)->capture_default_str();
    ec->add_option("--ec-period", ec_period)->capture_default_str();
    ec->add_option("--seeds", seeds)->capture_default_str();
    ec->add_option("--seed0", seed0)->capture_default_str();
    ec->add_option("--cutoff", ec_cutoff)->capture_default_str();
    ec->add_option("--input", input, "logical input: 0, 1, + or -")->capture_default_str();
    ec->add_option("--out", ec_out, "CSV path (default stdout)");

    auto* wf = app.add_subcommand("wavefunction", "export wavefunction data");
    std::string wf_state = "gkp0", wf_basis = "q", wf_grid = "-6:6:0.01", wf_out,
                wf_method = "fock";
    double wf_beta = 0.05;
    int wf_cutoff = 100;
    wf->add_option("--state", wf_state, "gkp0|gkp1|qunaught|vacuum|<ancilla spec>")
        ->capture_default_str();
    wf->add_option("--beta", wf_beta)->capture_default_str();
    wf->add_option("--basis", wf_basis, "q or p")->capture_default_str();
    wf->add_option("--grid", wf_grid, "lo:hi:step")->capture_default_str();
    wf->add_option("--cutoff", wf_cutoff)->capture_default_str();
    wf->add_option("--method", wf_method, "fock or analytic")->capture_default_str();
    wf->add_option("--out", wf_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
        if (*id_cmd) return cmd_identities(ids, all, cutoff, betas, out);
        if (*kc) return cmd_kraus_compare(theta_a, theta_b, psi, phi, ma, mb, kc_cutoff, interior);
        if (*ec) return cmd_ec_sweep(variant, ec_beta, steps, ec_period, seeds, seed0,
                                     ec_cutoff, input, ec_out);
        if (*wf) return cmd_wavefunction(wf_state, wf_beta, wf_basis, wf_grid, wf_cutoff,
                                         wf_method, wf_out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        nlohmann::json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 0;
}
