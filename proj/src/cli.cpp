// cli.cpp

#include "spinboson/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinboson/acceptance.hpp"
#include "spinboson/config.hpp"
#include "spinboson/errors.hpp"
#include "spinboson/fock.hpp"
#include "spinboson/ising_mc.hpp"
#include "spinboson/kernel.hpp"
#include "spinboson/model.hpp"

#ifndef SPINBOSON_VERSION
#define SPINBOSON_VERSION "dev"
#endif

namespace spinboson {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Globals {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string format;
    std::optional<unsigned> threads;
};

unsigned resolve_thread_flag(const Globals& g) {
    if (g.threads) return *g.threads;
    if (const char* env = std::getenv("SPINBOSON_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v < 0) throw std::invalid_argument("negative");
            return static_cast<unsigned>(v);
        } catch (const std::exception&) {
            throw ConfigError(std::string("SPINBOSON_THREADS must be a nonnegative integer, got '") + env + "'");
        }
    }
    return 0;
}

RunConfig load(const Globals& g) {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& s : g.sets) overrides.push_back(split_override(s));
    if (g.seed) overrides.emplace_back("mc.seed", std::to_string(*g.seed));
    if (!g.out_dir.empty()) overrides.emplace_back("output.dir", g.out_dir);
    if (!g.format.empty()) overrides.emplace_back("output.format", g.format);
    RunConfig cfg = g.config_path.empty() ? parse_config_text("", overrides) : load_config(g.config_path, overrides);
    cfg.mc.threads = resolve_thread_flag(g);
    return cfg;
}

Json stamp(const RunConfig& cfg, const std::string& command) {
    Json j;
    j["command"] = command;
    j["version"] = SPINBOSON_VERSION;
    j["config_digest"] = config_digest(cfg);
    return j;
}

Json estimate_json(const Estimate& e) {
    Json j;
    j["value"] = e.value;
    j["stderr"] = e.error;
    j["tau_int"] = e.tau_int;
    j["n_eff"] = e.n_eff;
    j["samples"] = e.samples;
    j["warnings"] = e.warnings;
    return j;
}

std::string csv_cell(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

// Scalar fields as a two-line CSV; nested values are skipped.
std::string flat_csv(const Json& j) {
    std::string head, row;
    for (const auto& [key, value] : j.items()) {
        if (value.is_structured()) continue;
        head += (head.empty() ? "" : ",") + key;
        row += (row.empty() ? "" : ",") + csv_cell(value);
    }
    return head + "\n" + row + "\n";
}

class Emitter {
public:
    Emitter(const RunConfig& cfg, std::ostream& out) : cfg_(cfg), out_(out) {}

    void record(const std::string& name, const Json& j) {
        const bool csv = cfg_.output.format == "csv";
        const std::string text = csv ? flat_csv(j) : j.dump(2) + "\n";
        out_ << text;
        write_file(name + (csv ? ".csv" : ".json"), text);
    }

    void table(const std::string& name, const std::string& csv, const Json& summary) {
        if (cfg_.output.format == "csv") {
            out_ << csv;
        } else {
            out_ << summary.dump(2) << "\n";
        }
        write_file(name + ".csv", csv);
        write_file(name + ".json", summary.dump(2) + "\n");
    }

    void write_file(const std::string& file, const std::string& text) const {
        if (cfg_.output.dir.empty()) return;
        std::filesystem::create_directories(cfg_.output.dir);
        const auto path = std::filesystem::path(cfg_.output.dir) / file;
        std::ofstream f(path);
        if (!f) throw ConfigError("cannot write " + path.string());
        f << text;
    }

private:
    const RunConfig& cfg_;
    std::ostream& out_;
};

KernelTable table_for(const RunConfig& cfg, double horizon) {
    return build_table(cfg.kernel_source(), std::max(cfg.kernel.t_max, horizon), cfg.kernel.tolerance);
}

void cmd_model_info(const RunConfig& cfg, Emitter& emit) {
    const ModelSpec& spec = cfg.model;
    Json j = stamp(cfg, "model info");
    j["dimension"] = spec.dimension;
    j["dispersion"] = to_string(spec.dispersion.kind);
    j["mass"] = spec.dispersion.mass;
    j["alpha"] = spec.alpha;
    j["cutoff"] = to_string(spec.cutoff.kind);
    j["cutoff_parameter"] = spec.cutoff.parameter;
    j["classification"] = to_string(ir_classify(spec));
    const double norm = weighted_norm(spec, 0.5);
    j["norm_inv_sqrt_omega"] = std::isfinite(norm) ? Json(norm) : Json("inf");
    if (std::isfinite(norm)) {
        const double lc = critical_coupling(spec);
        j["lambda_c"] = lc;
        j["lambda"] = spec.lambda;
        j["lambda_over_lambda_c"] = spec.lambda / lc;
        j["kernel_l1"] = 0.5 * norm * norm;
    } else {
        j["lambda_c"] = nullptr;
        j["lambda_c_note"] = "||omega^{-1/2} v|| diverges; model class not defined";
    }
    emit.record("model_info", j);
}

void cmd_kernel_table(const RunConfig& cfg, Emitter& emit) {
    const auto start = Clock::now();
    const KernelTable table = build_table(cfg.kernel_source(), cfg.kernel.t_max, cfg.kernel.tolerance);
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,W,Phi,V\n";
    for (const auto& n : table.nodes()) csv << n.t << "," << n.w << "," << n.phi << "," << n.v << "\n";
    Json j = stamp(cfg, "kernel table");
    j["source"] = to_string(cfg.kernel.source);
    j["t_max"] = table.t_max();
    j["nodes"] = table.size();
    j["refinements"] = table.refinements();
    j["max_probe_error"] = table.max_probe_error();
    j["tail"] = to_string(table.tail().kind);
    j["W0"] = table.W(0.0);
    try {
        const L1Norm l1 = l1_norm(table.source());
        j["l1_fubini"] = l1.fubini;
        j["l1_time_quadrature"] = l1.time_quadrature;
        j["l1_relative_difference"] = l1.relative_difference;
    } catch (const Error& e) {
        j["l1_error"] = e.what();
    }
    j["seconds"] = seconds_since(start);
    emit.table("kernel_table", csv.str(), j);
}

struct EdSetup {
    DiscreteModes modes;
    FockBasis basis;
};

EdSetup ed_setup(const RunConfig& cfg) {
    DiscreteModes modes = cfg.modes();
    FockBasis basis = build_basis(modes, cfg.discretization.n_max, cfg.discretization.N_max);
    return {std::move(modes), std::move(basis)};
}

Json caps_json(const RunConfig& cfg, const EdSetup& s) {
    Json j;
    j["n_modes"] = s.modes.size();
    j["n_max"] = cfg.discretization.n_max;
    j["N_max"] = cfg.discretization.N_max;
    j["dimension"] = s.basis.dimension();
    return j;
}

void cmd_ed_ground(const RunConfig& cfg, Emitter& emit, const std::string& dump) {
    auto t0 = Clock::now();
    const EdSetup s = ed_setup(cfg);
    const SparseOperator h = hamiltonian(s.basis, s.modes, cfg.model.lambda, cfg.model.mu);
    const double t_assembly = seconds_since(t0);
    t0 = Clock::now();
    const GroundStateResult gs = ground_state(h, cfg.ed.tolerance);
    const double t_solve = seconds_since(t0);
    Json j = stamp(cfg, "ed ground");
    j["energy"] = gs.energy;
    j["gap"] = gs.gap;
    j["second_energy"] = gs.second_energy;
    j["residual"] = gs.residual;
    j["degenerate"] = gs.degenerate;
    j["sigma_x"] = sigma_x_expectation(s.basis, gs.state);
    j["dimension"] = s.basis.dimension();
    j["caps"] = caps_json(cfg, s);
    j["timings"] = {{"assembly_s", t_assembly}, {"solve_s", t_solve}};
    if (!dump.empty()) {
        std::ofstream f(dump, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + dump);
        write_eigenvector(f, gs.state);
        j["eigenvector_dump"] = dump;
    }
    emit.record("ed_ground", j);
}

void cmd_ed_semigroup(const RunConfig& cfg, Emitter& emit) {
    const EdSetup s = ed_setup(cfg);
    const SparseOperator h = hamiltonian(s.basis, s.modes, cfg.model.lambda, cfg.model.mu);
    const double t = cfg.mc.horizon;
    const SemigroupResult r = semigroup_amplitude_detail(h, s.basis, t);
    Json j = stamp(cfg, "ed semigroup");
    j["T"] = t;
    j["amplitude"] = r.value;
    j["log_amplitude"] = std::log(r.value);
    j["partition"] = std::exp(-t) * r.value;
    j["energy_estimate"] = -std::log(r.value) / t;
    j["error_estimate"] = r.error_estimate;
    j["krylov_dimension"] = r.krylov_dimension;
    j["caps"] = caps_json(cfg, s);
    emit.record("ed_semigroup", j);
}

void cmd_ed_susceptibility(const RunConfig& cfg, Emitter& emit) {
    const EdSetup s = ed_setup(cfg);
    const double lambda = cfg.model.lambda;
    const SusceptibilityFd fd =
        susceptibility_fd(s.modes, lambda, cfg.ed.fd_step, cfg.discretization.n_max, cfg.discretization.N_max);
    const SparseOperator h = hamiltonian(s.basis, s.modes, lambda, 0.0);
    const GroundStateResult gs = ground_state(h, cfg.ed.tolerance);
    Json j = stamp(cfg, "ed susceptibility");
    j["lambda"] = lambda;
    j["d2E_dmu2"] = fd.value;
    j["chi"] = -fd.value;
    j["error_estimate"] = fd.error_estimate;
    j["low_confidence"] = fd.low_confidence;
    j["step"] = cfg.ed.fd_step;
    j["energy"] = fd.energy0;
    const double chi = std::max(0.0, -fd.value);
    Json modes = Json::array();
    const auto checks = resolvent_norm_check(h, gs.energy, gs.state, s.basis, s.modes, chi);
    const PullThrough pt = pull_through_residual(h, gs.energy, gs.state, s.basis, s.modes, lambda);
    for (std::size_t m = 0; m < s.modes.size(); ++m) {
        modes.push_back({{"omega", s.modes.omega[m]},
                         {"v", s.modes.v[m]},
                         {"resolvent_norm", checks[m].lhs},
                         {"bound", checks[m].rhs},
                         {"bound_holds", checks[m].passes},
                         {"lowest_shifted", checks[m].lowest_shifted},
                         {"standard_bound_holds", checks[m].standard_bound},
                         {"pull_through_residual", pt.residuals[m]}});
    }
    j["modes"] = modes;
    j["caps"] = caps_json(cfg, s);
    emit.record("ed_susceptibility", j);
}

void cmd_mc(const RunConfig& cfg, Emitter& emit, const std::string& which) {
    const auto start = Clock::now();
    const KernelTable table = table_for(cfg, cfg.mc.horizon);
    Estimate e;
    Json extra;
    if (which == "partition") {
        const PartitionResult r = estimate_partition_detail(cfg.model.lambda, cfg.model.mu, table, cfg.mc);
        e = r.estimate;
        extra["max_weight_fraction"] = r.max_weight_fraction;
    } else if (which == "energy") {
        e = estimate_energy(cfg.model.lambda, cfg.model.mu, table, cfg.mc);
    } else {
        if (cfg.model.mu != 0.0) throw ConfigError("mc susceptibility is defined at mu = 0");
        e = estimate_susceptibility(cfg.model.lambda, table, cfg.mc);
    }
    Json j = stamp(cfg, "mc " + which);
    const Json fields = estimate_json(e);
    for (const auto& [k, v] : fields.items()) j[k] = v;
    j["seed"] = cfg.mc.seed;
    j["lambda"] = cfg.model.lambda;
    j["mu"] = cfg.model.mu;
    j["T"] = cfg.mc.horizon;
    j["convention"] = to_string(cfg.mc.convention);
    for (const auto& [k, v] : extra.items()) j[k] = v;
    j["seconds"] = seconds_since(start);
    emit.record("mc_" + which, j);
}

void cmd_xcheck_fkn(const RunConfig& cfg, Emitter& emit, bool grid) {
    const DiscreteModes modes = cfg.modes();
    const FockBasis basis = build_basis(modes, cfg.discretization.n_max, cfg.discretization.N_max);
    const std::vector<double> lambdas = grid ? cfg.scan.lambdas : std::vector<double>{cfg.model.lambda};
    const std::vector<double> horizons = grid ? cfg.scan.horizons : std::vector<double>{cfg.mc.horizon};
    double t_max = cfg.kernel.t_max;
    for (double t : horizons) t_max = std::max(t_max, t);
    const KernelTable table = build_table(KernelSource(modes), t_max, cfg.kernel.tolerance);
    std::ostringstream csv;
    csv.precision(12);
    csv << "lambda,T,ed,mc,mc_err,sigma\n";
    Json cells = Json::array();
    double worst = 0.0;
    for (double lambda : lambdas) {
        const SparseOperator h = hamiltonian(basis, modes, lambda, cfg.model.mu);
        for (double t : horizons) {
            McConfig mc = cfg.mc;
            mc.horizon = t;
            const Estimate z = estimate_partition(lambda, cfg.model.mu, table, mc);
            const double ed = std::exp(-t) * semigroup_amplitude(h, basis, t);
            const double sigma = sigma_distance(z.value, z.error, ed, 0.0);
            worst = std::max(worst, sigma);
            csv << lambda << "," << t << "," << ed << "," << z.value << "," << z.error << "," << sigma << "\n";
            cells.push_back({{"lambda", lambda}, {"T", t}, {"ed", ed}, {"mc", z.value}, {"mc_stderr", z.error},
                             {"sigma", sigma}, {"warnings", z.warnings}});
        }
    }
    Json j = stamp(cfg, "xcheck fkn");
    j["seed"] = cfg.mc.seed;
    j["mu"] = cfg.model.mu;
    j["max_sigma"] = worst;
    j["within_3_sigma"] = worst <= 3.0;
    j["cells"] = cells;
    emit.table("xcheck_fkn", csv.str(), j);
}

void cmd_scan_lambda(const RunConfig& cfg, Emitter& emit) {
    double scale = 1.0;
    if (cfg.scan.lambda_units == LambdaUnits::critical) scale = critical_coupling(cfg.model);
    std::vector<double> lambdas;
    for (double l : cfg.scan.lambdas) lambdas.push_back(l * scale);
    double t_max = cfg.kernel.t_max;
    for (double t : cfg.scan.horizons) t_max = std::max(t_max, t);
    const KernelTable table = build_table(cfg.kernel_source(), t_max, cfg.kernel.tolerance);
    const ScanResult scan = coupling_scan(lambdas, table, cfg.mc, cfg.scan.horizons);
    std::ostringstream csv;
    csv.precision(12);
    csv << "lambda,T,chi,chi_err,l1_diag\n";
    Json cells = Json::array();
    for (const ScanCell& c : scan.cells) {
        if (c.error.empty()) {
            csv << c.lambda << "," << c.horizon << "," << c.chi.value << "," << c.chi.error << "," << c.l1_diag << "\n";
        } else {
            csv << c.lambda << "," << c.horizon << ",nan,nan," << c.l1_diag << "\n";
        }
        Json cell = {{"lambda", c.lambda}, {"T", c.horizon}, {"l1_diag", c.l1_diag}};
        if (c.error.empty()) {
            cell["chi"] = c.chi.value;
            cell["chi_err"] = c.chi.error;
            cell["tau_int"] = c.chi.tau_int;
        } else {
            cell["error"] = c.error;
        }
        cells.push_back(cell);
    }
    Json slopes = Json::array();
    for (const ScanSlope& s : scan.slopes) {
        Json entry = {{"lambda", s.lambda},
                      {"slope", std::isfinite(s.slope) ? Json(s.slope) : Json(nullptr)},
                      {"slope_err", std::isfinite(s.slope_error) ? Json(s.slope_error) : Json(nullptr)}};
        entry["extrapolated"] = s.extrapolated;
        entry["extrapolated_err"] = s.extrapolated_error;
        slopes.push_back(entry);
    }
    Json j = stamp(cfg, "scan lambda");
    j["seed"] = cfg.mc.seed;
    j["small_coupling_threshold"] = kSmallCouplingThreshold;
    j["cells"] = cells;
    j["slopes"] = slopes;
    emit.table("scan_lambda", csv.str(), j);
}

int cmd_reproduce(const RunConfig& cfg, Emitter& emit, std::ostream& out, const std::vector<int>& only,
                  bool seed_given) {
    AcceptanceOptions opts;
    opts.threads = cfg.mc.threads;
    opts.only = only;
    if (seed_given) opts.seed = cfg.mc.seed;
    opts.on_result = [&](const CriterionResult& r) {
        out << format_result(r) << "\n";
        for (const auto& n : r.notes) out << "    " << n << "\n";
        out.flush();
    };
    const auto results = run_acceptance(opts);
    Json j = stamp(cfg, "reproduce");
    j["seed"] = opts.seed;
    Json rows = Json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        rows.push_back({{"id", r.id},
                        {"title", r.title},
                        {"passed", r.passed},
                        {"measured", r.measured},
                        {"threshold", r.threshold},
                        {"seconds", r.seconds},
                        {"notes", r.notes}});
    }
    j["criteria"] = rows;
    j["all_passed"] = all;
    emit.write_file("acceptance.json", j.dump(2) + "\n");
    out << (all ? "all criteria passed" : "some criteria FAILED") << "\n";
    return all ? kExitOk : kExitNumerical;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spin-boson exact diagonalization and path-integral Monte Carlo"};
    app.set_version_flag("--version", SPINBOSON_VERSION);
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "INI configuration file");
    app.add_option("--set", g.sets, "Override SECTION.KEY=VALUE (repeatable)");
    app.add_option("--seed", g.seed, "Monte Carlo seed (overrides mc.seed)");
    app.add_option("--out", g.out_dir, "Directory for result files");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", g.threads, "Worker threads (default: SPINBOSON_THREADS or all cores)");

    auto* model = app.add_subcommand("model", "Continuum model quantities")->require_subcommand(1);
    auto* model_info = model->add_subcommand("info", "Norms, classification and critical coupling");
    auto* kernel = app.add_subcommand("kernel", "Ising kernel")->require_subcommand(1);
    auto* kernel_table = kernel->add_subcommand("table", "Tabulate W, Phi, V");
    auto* ed = app.add_subcommand("ed", "Exact diagonalization")->require_subcommand(1);
    std::string dump;
    auto* ed_ground = ed->add_subcommand("ground", "Ground state energy and gap");
    ed_ground->add_option("--dump", dump, "Write the eigenvector to this file");
    auto* ed_semigroup = ed->add_subcommand("semigroup", "<vacuum, exp(-TH) vacuum>");
    auto* ed_susc = ed->add_subcommand("susceptibility", "Finite-difference susceptibility and resolvent checks");
    auto* mc = app.add_subcommand("mc", "Path-integral Monte Carlo")->require_subcommand(1);
    auto* mc_partition = mc->add_subcommand("partition", "Partition function Z_T");
    auto* mc_energy = mc->add_subcommand("energy", "Ground energy from Z_T");
    auto* mc_susc = mc->add_subcommand("susceptibility", "(1/T)<<M^2>> at mu = 0");
    auto* xcheck = app.add_subcommand("xcheck", "Cross-engine checks")->require_subcommand(1);
    bool grid = false;
    auto* xcheck_fkn = xcheck->add_subcommand("fkn", "Monte Carlo Z_T against exact diagonalization");
    xcheck_fkn->add_flag("--grid", grid, "Use the scan.lambdas x scan.horizons grid");
    auto* scan = app.add_subcommand("scan", "Parameter scans")->require_subcommand(1);
    auto* scan_lambda = scan->add_subcommand("lambda", "Susceptibility over a coupling/horizon grid");
    std::vector<int> only;
    auto* reproduce = app.add_subcommand("reproduce", "Run the acceptance criteria");
    reproduce->add_option("--only", only, "Criterion ids to run")->delimiter(',');

    for (CLI::App* sub : {model, kernel, ed, mc, xcheck, scan}) sub->fallthrough();
    for (CLI::App* sub : {model_info, kernel_table, ed_ground, ed_semigroup, ed_susc, mc_partition, mc_energy,
                          mc_susc, xcheck_fkn, scan_lambda, reproduce})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        const RunConfig cfg = load(g);
        Emitter emit(cfg, out);
        if (*model_info) cmd_model_info(cfg, emit);
        else if (*kernel_table) cmd_kernel_table(cfg, emit);
        else if (*ed_ground) cmd_ed_ground(cfg, emit, dump);
        else if (*ed_semigroup) cmd_ed_semigroup(cfg, emit);
        else if (*ed_susc) cmd_ed_susceptibility(cfg, emit);
        else if (*mc_partition) cmd_mc(cfg, emit, "partition");
        else if (*mc_energy) cmd_mc(cfg, emit, "energy");
        else if (*mc_susc) cmd_mc(cfg, emit, "susceptibility");
        else if (*xcheck_fkn) cmd_xcheck_fkn(cfg, emit, grid);
        else if (*scan_lambda) cmd_scan_lambda(cfg, emit);
        else if (*reproduce) return cmd_reproduce(cfg, emit, out, only, g.seed.has_value());
        return kExitOk;
    } catch (const Error& e) {
        err << "error [" << e.reason() << "]: " << e.what() << "\n";
        return e.category() == ErrorCategory::validation ? kExitValidation : kExitNumerical;
    } catch (const std::exception& e) {
        err << "error [internal]: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace spinboson
