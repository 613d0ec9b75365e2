// Command-line front end: channel construction, entanglement reports,
// teleportation fidelities, network optimization and the numerical oracle.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cvqt/channels.hpp"
#include "cvqt/entanglement.hpp"
#include "cvqt/json_io.hpp"
#include "cvqt/network.hpp"
#include "cvqt/opt.hpp"
#include "cvqt/oracle.hpp"
#include "cvqt/teleport.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
    std::string out_path;        // empty means stdout
    std::uint64_t seed = 12345;  // default documented in --help
    unsigned jobs = 1;
    double tol_invariant = 0.0;  // 0 keeps the built-in default
    double tol_symmetry = 0.0;
};

std::string fmt12(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void emit(const RunConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out_path);
    if (!out) throw cvqt::Error(cvqt::Errc::invalid_input, "cannot write " + cfg.out_path);
    out << text;
}

// Ordered parallel map: results land by index no matter which worker ran them.
template <typename Fn>
std::vector<std::string> pooled_rows(std::size_t count, unsigned jobs, Fn&& row_fn) {
    std::vector<std::string> rows(count);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) rows[i] = row_fn(i);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
            rows[i] = row_fn(i);
    };
    std::vector<std::thread> threads;
    const unsigned n_threads =
        std::max(1u, std::min<unsigned>(jobs, std::thread::hardware_concurrency()));
    for (unsigned t = 0; t < n_threads; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return rows;
}

cvqt::GaussianState parse_input_state(const std::string& kind, double alpha_re,
                                      double alpha_im, double in_r, double in_phi) {
    if (kind == "coherent")
        return cvqt::input_state(cvqt::InputKind::coherent, {alpha_re, alpha_im});
    if (kind == "squeezed")
        return cvqt::input_state(cvqt::InputKind::squeezed, {alpha_re, alpha_im}, in_r,
                                 in_phi);
    throw cvqt::Error(cvqt::Errc::invalid_input, "unknown input kind: " + kind);
}

struct RangeSpec {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;

    std::vector<double> values() const {
        std::vector<double> v;
        for (double x = lo; x <= hi + 1e-12; x += step) v.push_back(x);
        if (v.empty())
            throw cvqt::Error(cvqt::Errc::invalid_input, "empty parameter range");
        return v;
    }
};

RangeSpec parse_range(const std::string& text) {
    RangeSpec r;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> r.lo >> c1 >> r.hi >> c2 >> r.step) || c1 != ':' || c2 != ':' ||
        r.step <= 0.0 || r.hi < r.lo)
        throw cvqt::Error(cvqt::Errc::invalid_input,
                          "range must be min:max:step with step > 0");
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian continuous-variable teleportation toolkit"};
    app.set_config("--config", "", "key=value config file; flags take precedence");
    app.require_subcommand(1);

    RunConfig cfg;
    app.add_option("--jobs", cfg.jobs, "worker threads for sweeps")->capture_default_str();
    app.add_option("--seed", cfg.seed, "RNG seed (default 12345)")->capture_default_str();
    app.add_option("--tol-invariant", cfg.tol_invariant,
                   "override the bona-fide tolerance");
    app.add_option("--tol-symmetry", cfg.tol_symmetry, "override the symmetry tolerance");

    // channel build
    auto* channel = app.add_subcommand("channel", "channel constructors");
    auto* build = channel->add_subcommand("build", "construct a channel state");
    std::string kind = "tmsv";
    double r = 0.0, n_a = 0.5, n_b = 0.5;
    std::size_t n_modes = 2;
    build->add_option("--kind", kind, "tmsv | thermal | nmsv | cheap")
        ->capture_default_str();
    build->add_option("--r", r, "squeezing factor")->capture_default_str();
    build->add_option("--na", n_a, "thermal noise, mode a");
    build->add_option("--nb", n_b, "thermal noise, mode b");
    build->add_option("--modes", n_modes, "mode count (nmsv)");
    build->add_option("--out", cfg.out_path, "output file (default stdout)");

    // entangle report
    auto* entangle = app.add_subcommand("entangle", "entanglement tests");
    auto* report = entangle->add_subcommand("report", "two-mode entanglement report");
    std::string state_path;
    report->add_option("--state", state_path, "two-mode state JSON")->required();
    report->add_option("--out", cfg.out_path, "output file (default stdout)");

    // teleport fidelity / sweep
    auto* teleport_cmd = app.add_subcommand("teleport", "teleportation fidelity");
    auto* fid = teleport_cmd->add_subcommand("fidelity", "closed-form fidelity report");
    std::string channel_path, input_kind = "coherent";
    double alpha_re = 0.0, alpha_im = 0.0, in_r = 0.0, in_phi = 0.0;
    std::vector<double> delta_opt;
    fid->add_option("--channel", channel_path, "two-mode channel JSON")->required();
    fid->add_option("--input", input_kind, "coherent | squeezed")->capture_default_str();
    fid->add_option("--alpha-re", alpha_re, "input displacement, real part");
    fid->add_option("--alpha-im", alpha_im, "input displacement, imaginary part");
    fid->add_option("--in-r", in_r, "input squeezing factor");
    fid->add_option("--in-phi", in_phi, "input squeezing phase");
    fid->add_option("--delta", delta_opt, "explicit receiver compensation (two reals)")
        ->expected(2);
    fid->add_option("--out", cfg.out_path, "output file (default stdout)");

    auto* sweep = teleport_cmd->add_subcommand("sweep", "twin-beam fidelity sweep (CSV)");
    double r_min = 0.0, r_max = 2.0;
    std::size_t steps = 21, resolution = 64;
    sweep->add_option("--r-min", r_min)->capture_default_str();
    sweep->add_option("--r-max", r_max)->capture_default_str();
    sweep->add_option("--steps", steps)->capture_default_str();
    sweep->add_option("--resolution", resolution, "oracle grid points per axis")
        ->capture_default_str();
    sweep->add_option("--out", cfg.out_path, "output file (default stdout)");

    // network optimize / sweep
    auto* network_cmd = app.add_subcommand("network", "three-mode network protocols");
    auto* opt_cmd = network_cmd->add_subcommand("optimize", "optimal assistant measurement");
    std::string net_path;
    std::string net_input = "coherent";
    double net_in_r = 0.0, net_in_phi = 0.0;
    opt_cmd->add_option("--state", net_path, "three-mode state JSON")->required();
    opt_cmd->add_option("--input", net_input, "coherent | squeezed")->capture_default_str();
    opt_cmd->add_option("--in-r", net_in_r, "input squeezing factor");
    opt_cmd->add_option("--in-phi", net_in_phi, "input squeezing phase");
    opt_cmd->add_option("--out", cfg.out_path, "output file (default stdout)");

    auto* nsweep = network_cmd->add_subcommand("sweep", "network fidelity sweep (CSV)");
    std::string net_kind = "cheap";
    std::string range_text = "0:2:0.05";
    nsweep->add_option("--kind", net_kind, "cheap | nmsv")->capture_default_str();
    nsweep->add_option("--r", range_text, "squeezing range min:max:step")
        ->capture_default_str();
    nsweep->add_option("--out", cfg.out_path, "output file (default stdout)");

    // oracle verify
    auto* oracle_cmd = app.add_subcommand("oracle", "numerical oracle");
    auto* verify = oracle_cmd->add_subcommand("verify", "closed form vs grid quadrature");
    std::string verify_path;
    std::size_t verify_resolution = 128;
    std::size_t mc_samples = 0;
    verify->add_option("--channel", verify_path, "two-mode channel JSON")->required();
    verify->add_option("--resolution", verify_resolution, "grid points per axis")
        ->capture_default_str();
    verify->add_option("--mc-samples", mc_samples,
                       "also run the Monte-Carlo protocol with this many samples");
    verify->add_option("--out", cfg.out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (cfg.tol_invariant > 0.0) cvqt::default_tolerances().invariant = cfg.tol_invariant;
        if (cfg.tol_symmetry > 0.0) cvqt::default_tolerances().symmetry = cfg.tol_symmetry;

        if (build->parsed()) {
            cvqt::ChannelSpec spec;
            spec.kind = cvqt::channel_kind_from_string(kind);
            spec.r = r;
            spec.n_a = n_a;
            spec.n_b = n_b;
            spec.n_modes = n_modes;
            emit(cfg, cvqt::to_json(cvqt::build_channel(spec)).dump(2) + "\n");
            return 0;
        }

        if (report->parsed()) {
            cvqt::GaussianState state = cvqt::load_state(state_path);
            if (state.n_modes() != 2)
                throw cvqt::Error(cvqt::Errc::invalid_cm,
                                  "entanglement report needs a two-mode state");
            emit(cfg, cvqt::to_json(cvqt::entanglement_report(state.cm)).dump(2) + "\n");
            return 0;
        }

        if (fid->parsed()) {
            cvqt::GaussianState channel_state = cvqt::load_state(channel_path);
            cvqt::GaussianState in =
                parse_input_state(input_kind, alpha_re, alpha_im, in_r, in_phi);
            std::optional<std::array<double, 2>> delta;
            if (!delta_opt.empty()) delta = {{delta_opt[0], delta_opt[1]}};
            cvqt::FidelityReport rep =
                cvqt::fidelity(in.cm.matrix(), channel_state, delta);
            emit(cfg, cvqt::to_json(rep).dump(2) + "\n");
            return 0;
        }

        if (sweep->parsed()) {
            if (steps < 2)
                throw cvqt::Error(cvqt::Errc::invalid_input, "sweep needs at least 2 steps");
            const cvqt::Mat coherent_in = 0.5 * cvqt::Mat::identity(2);
            auto row = [&](std::size_t i) {
                const double rr = r_min + (r_max - r_min) * static_cast<double>(i) /
                                              static_cast<double>(steps - 1);
                cvqt::GaussianState ch = cvqt::tmsv(rr);
                const double closed = cvqt::fidelity(coherent_in, ch).fidelity;
                cvqt::PhaseGrid grid = cvqt::grid_for({&ch}, resolution);
                const double oracle =
                    cvqt::kernel_fidelity(cvqt::wigner_of(ch, grid), coherent_in);
                return fmt12(rr) + "," + fmt12(closed) + "," + fmt12(oracle);
            };
            std::vector<std::string> rows = pooled_rows(steps, cfg.jobs, row);
            std::string text = "# cvqt " + std::string(kVersion) +
                               " teleport-sweep r-min=" + fmt12(r_min) +
                               " r-max=" + fmt12(r_max) + " steps=" + std::to_string(steps) +
                               " resolution=" + std::to_string(resolution) +
                               " seed=" + std::to_string(cfg.seed) + "\n";
            text += "r,F_closed_form,F_oracle\n";
            for (const std::string& line : rows) text += line + "\n";
            emit(cfg, text);
            return 0;
        }

        if (opt_cmd->parsed()) {
            cvqt::GaussianState net_state = cvqt::load_state(net_path);
            cvqt::ThreeModeBlocks net = cvqt::ThreeModeBlocks::from_state(net_state);
            cvqt::GaussianState in =
                parse_input_state(net_input, 0.0, 0.0, net_in_r, net_in_phi);
            cvqt::OptimizerResult res = cvqt::optimize_measurement(net, in.cm.matrix());
            emit(cfg, cvqt::to_json(res).dump(2) + "\n");
            return 0;
        }

        if (nsweep->parsed()) {
            RangeSpec range = parse_range(range_text);
            std::vector<double> rs = range.values();
            const cvqt::Mat coherent_in = 0.5 * cvqt::Mat::identity(2);
            auto row = [&](std::size_t i) {
                const double rr = rs[i];
                cvqt::GaussianState state = net_kind == "nmsv" ? cvqt::nmsv(3, rr)
                                                               : cvqt::cheap_three_mode(rr);
                cvqt::ThreeModeBlocks net = cvqt::ThreeModeBlocks::from_state(state);
                const double f_tr = cvqt::traced_fidelity(net, coherent_in);
                cvqt::OptimizerResult res = cvqt::optimize_measurement(net, coherent_in);
                const std::string xi = std::isinf(res.xi_star) ? "inf" : fmt12(res.xi_star);
                return fmt12(rr) + "," + fmt12(f_tr) + "," + fmt12(res.f_star) + "," + xi +
                       "," + fmt12(res.phi_star);
            };
            std::vector<std::string> rows = pooled_rows(rs.size(), cfg.jobs, row);
            std::string text = "# cvqt " + std::string(kVersion) + " network-sweep kind=" +
                               net_kind + " r=" + range_text +
                               " seed=" + std::to_string(cfg.seed) + "\n";
            text += "r,F_tr,F_assisted,xi_star,phi_star\n";
            for (const std::string& line : rows) text += line + "\n";
            emit(cfg, text);
            return 0;
        }

        if (verify->parsed()) {
            cvqt::GaussianState ch = cvqt::load_state(verify_path);
            if (ch.n_modes() != 2)
                throw cvqt::Error(cvqt::Errc::invalid_cm,
                                  "oracle verify needs a two-mode channel");
            const cvqt::Mat coherent_in = 0.5 * cvqt::Mat::identity(2);
            const double closed = cvqt::fidelity(coherent_in, ch).fidelity;
            cvqt::PhaseGrid grid = cvqt::grid_for({&ch}, verify_resolution);
            const double oracle =
                cvqt::kernel_fidelity(cvqt::wigner_of(ch, grid), coherent_in);
            cvqt::json out{{"closed_form", closed},
                           {"oracle", oracle},
                           {"abs_gap", std::abs(closed - oracle)},
                           {"resolution", verify_resolution}};
            if (mc_samples > 0) {
                cvqt::McEstimate est = cvqt::montecarlo_protocol(
                    ch, cvqt::input_state(cvqt::InputKind::coherent), mc_samples, cfg.seed);
                out["monte_carlo"] = {{"fidelity", est.fidelity},
                                      {"std_error", est.std_error},
                                      {"samples", est.n_samples},
                                      {"seed", cfg.seed}};
            }
            emit(cfg, out.dump(2) + "\n");
            return 0;
        }

        throw cvqt::Error(cvqt::Errc::invalid_input, "no subcommand selected");
    } catch (const cvqt::Error& err) {
        cvqt::json msg{{"error", err.code_name()}, {"message", err.what()}};
        std::cerr << msg.dump() << "\n";
        return 1;
    } catch (const std::exception& err) {
        cvqt::json msg{{"error", "Internal"}, {"message", err.what()}};
        std::cerr << msg.dump() << "\n";
        return 1;
    }
}
