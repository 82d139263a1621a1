// config.cpp

#include "spinboson/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "spinboson/errors.hpp"

namespace spinboson {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& allowed_keys() {
    static const std::map<std::string, std::set<std::string>> keys = {
        {"model", {"dimension", "dispersion", "mass", "alpha", "cutoff", "cutoff_parameter", "lambda", "mu"}},
        {"discretization",
         {"n_modes", "scheme", "omega", "v", "n_max", "N_max", "regularize_mass", "regularize_scheme"}},
        {"kernel", {"source", "t_max", "tolerance"}},
        {"mc",
         {"T", "samples", "sweeps", "burn_in", "seed", "thinning", "chains", "block_size", "convention",
          "w_insert", "w_delete", "w_shift", "w_flip", "w_tail"}},
        {"ed", {"tolerance", "fd_step"}},
        {"scan", {"lambdas", "horizons", "lambda_units"}},
        {"output", {"dir", "format"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(key + ": expected a number, got '" + raw + "'");
    return value;
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& raw) {
    const std::string text = trim(raw);
    Int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ConfigError(key + ": expected an integer, got '" + raw + "'");
    return value;
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    if (trim(raw).empty()) return out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_double(xs[i]);
    }
    return out;
}

// Wraps the enum parsers from other modules so their errors read as config errors.
template <class F>
auto parse_enum(const std::string& key, const std::string& raw, F&& f) {
    try {
        return f(trim(raw));
    } catch (const Error& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

class Reader {
public:
    explicit Reader(const pt::ptree& tree) : tree_(tree) {}

    template <class F>
    void with(const std::string& section, const std::string& key, F&& f) const {
        const auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '/'));
        if (!sec) return;
        const auto value = sec->get_optional<std::string>(pt::ptree::path_type(key, '/'));
        if (value) f(section + "." + key, *value);
    }

private:
    const pt::ptree& tree_;
};

}  // namespace

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) throw NumericalError("format", "cannot format number");
    return {buf, ptr};
}

std::string to_string(KernelSourceKind kind) {
    return kind == KernelSourceKind::discrete ? "discrete" : "continuum";
}

std::string to_string(LambdaUnits units) {
    return units == LambdaUnits::absolute ? "absolute" : "critical";
}

std::pair<std::string, std::string> split_override(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + text + "' is not KEY=VALUE");
    return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

RunConfig parse_config(std::istream& in, const std::vector<std::pair<std::string, std::string>>& overrides) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    for (const auto& [key, value] : overrides) {
        const auto dot = key.find('.');
        if (dot == std::string::npos || key.find('.', dot + 1) != std::string::npos)
            throw ConfigError("override key '" + key + "' must be SECTION.KEY");
        const std::string section = key.substr(0, dot);
        const std::string name = key.substr(dot + 1);
        auto& sec = tree.get_child_optional(pt::ptree::path_type(section, '/'))
                        ? tree.get_child(pt::ptree::path_type(section, '/'))
                        : tree.put_child(pt::ptree::path_type(section, '/'), pt::ptree());
        sec.put(pt::ptree::path_type(name, '/'), value);
    }

    const auto& allowed = allowed_keys();
    for (const auto& [section, body] : tree) {
        const auto it = allowed.find(section);
        if (it == allowed.end()) throw ConfigError("unknown section [" + section + "]");
        if (!body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
        for (const auto& [key, leaf] : body) {
            if (!it->second.count(key)) throw ConfigError("unknown key '" + section + "." + key + "'");
        }
    }

    RunConfig cfg;
    const Reader r(tree);
    auto& m = cfg.model;
    r.with("model", "dimension", [&](const auto& k, const auto& v) { m.dimension = parse_integer<int>(k, v); });
    r.with("model", "dispersion", [&](const auto& k, const auto& v) { m.dispersion.kind = parse_enum(k, v, parse_dispersion); });
    r.with("model", "mass", [&](const auto& k, const auto& v) { m.dispersion.mass = parse_double(k, v); });
    r.with("model", "alpha", [&](const auto& k, const auto& v) { m.alpha = parse_double(k, v); });
    r.with("model", "cutoff", [&](const auto& k, const auto& v) { m.cutoff.kind = parse_enum(k, v, parse_cutoff); });
    r.with("model", "cutoff_parameter", [&](const auto& k, const auto& v) { m.cutoff.parameter = parse_double(k, v); });
    r.with("model", "lambda", [&](const auto& k, const auto& v) { m.lambda = parse_double(k, v); });
    r.with("model", "mu", [&](const auto& k, const auto& v) { m.mu = parse_double(k, v); });

    auto& d = cfg.discretization;
    r.with("discretization", "n_modes", [&](const auto& k, const auto& v) { d.n_modes = parse_integer<std::size_t>(k, v); });
    r.with("discretization", "scheme", [&](const auto& k, const auto& v) { d.scheme = parse_enum(k, v, parse_discretization); });
    r.with("discretization", "omega", [&](const auto& k, const auto& v) { d.omega = parse_list(k, v); });
    r.with("discretization", "v", [&](const auto& k, const auto& v) { d.v = parse_list(k, v); });
    r.with("discretization", "n_max", [&](const auto& k, const auto& v) { d.n_max = parse_integer<int>(k, v); });
    r.with("discretization", "N_max", [&](const auto& k, const auto& v) { d.N_max = parse_integer<int>(k, v); });
    r.with("discretization", "regularize_mass", [&](const auto& k, const auto& v) { d.regularize_mass = parse_double(k, v); });
    r.with("discretization", "regularize_scheme",
           [&](const auto& k, const auto& v) { d.regularize_scheme = parse_enum(k, v, parse_mass_scheme); });

    auto& kn = cfg.kernel;
    r.with("kernel", "source", [&](const auto& k, const auto& v) {
        const std::string s = trim(v);
        if (s == "discrete") kn.source = KernelSourceKind::discrete;
        else if (s == "continuum") kn.source = KernelSourceKind::continuum;
        else throw ConfigError(k + ": expected discrete or continuum");
    });
    r.with("kernel", "t_max", [&](const auto& k, const auto& v) { kn.t_max = parse_double(k, v); });
    r.with("kernel", "tolerance", [&](const auto& k, const auto& v) { kn.tolerance = parse_double(k, v); });

    auto& mc = cfg.mc;
    r.with("mc", "T", [&](const auto& k, const auto& v) { mc.horizon = parse_double(k, v); });
    r.with("mc", "samples", [&](const auto& k, const auto& v) { mc.samples = parse_integer<std::size_t>(k, v); });
    r.with("mc", "sweeps", [&](const auto& k, const auto& v) { mc.sweeps = parse_integer<std::size_t>(k, v); });
    r.with("mc", "burn_in", [&](const auto& k, const auto& v) { mc.burn_in = parse_double(k, v); });
    r.with("mc", "seed", [&](const auto& k, const auto& v) { mc.seed = parse_integer<std::uint64_t>(k, v); });
    r.with("mc", "thinning", [&](const auto& k, const auto& v) { mc.thinning = parse_integer<std::size_t>(k, v); });
    r.with("mc", "chains", [&](const auto& k, const auto& v) { mc.chains = parse_integer<std::size_t>(k, v); });
    r.with("mc", "block_size", [&](const auto& k, const auto& v) { mc.block_size = parse_integer<std::size_t>(k, v); });
    r.with("mc", "convention", [&](const auto& k, const auto& v) { mc.convention = parse_enum(k, v, parse_field_convention); });
    r.with("mc", "w_insert", [&](const auto& k, const auto& v) { mc.moves.insert_pair = parse_double(k, v); });
    r.with("mc", "w_delete", [&](const auto& k, const auto& v) { mc.moves.delete_pair = parse_double(k, v); });
    r.with("mc", "w_shift", [&](const auto& k, const auto& v) { mc.moves.shift = parse_double(k, v); });
    r.with("mc", "w_flip", [&](const auto& k, const auto& v) { mc.moves.global_flip = parse_double(k, v); });
    r.with("mc", "w_tail", [&](const auto& k, const auto& v) { mc.moves.tail = parse_double(k, v); });

    r.with("ed", "tolerance", [&](const auto& k, const auto& v) { cfg.ed.tolerance = parse_double(k, v); });
    r.with("ed", "fd_step", [&](const auto& k, const auto& v) { cfg.ed.fd_step = parse_double(k, v); });

    r.with("scan", "lambdas", [&](const auto& k, const auto& v) { cfg.scan.lambdas = parse_list(k, v); });
    r.with("scan", "horizons", [&](const auto& k, const auto& v) { cfg.scan.horizons = parse_list(k, v); });
    r.with("scan", "lambda_units", [&](const auto& k, const auto& v) {
        const std::string s = trim(v);
        if (s == "absolute") cfg.scan.lambda_units = LambdaUnits::absolute;
        else if (s == "critical") cfg.scan.lambda_units = LambdaUnits::critical;
        else throw ConfigError(k + ": expected absolute or critical");
    });

    r.with("output", "dir", [&](const auto&, const auto& v) { cfg.output.dir = trim(v); });
    r.with("output", "format", [&](const auto&, const auto& v) { cfg.output.format = trim(v); });

    cfg.validate();
    return cfg;
}

RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::istringstream in(text);
    return parse_config(in, overrides);
}

RunConfig load_config(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, overrides);
}

void RunConfig::validate() const {
    try {
        model.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    mc.validate();
    const auto& d = discretization;
    if (d.n_modes == 0) throw ConfigError("discretization.n_modes must be positive");
    if (d.n_max < 0 || d.N_max < 0) throw ConfigError("occupation caps must be nonnegative");
    if (d.regularize_mass < 0.0) throw ConfigError("discretization.regularize_mass must be nonnegative");
    if (d.scheme == DiscretizationScheme::manual) {
        if (d.omega.empty() || d.omega.size() != d.v.size())
            throw ConfigError("manual discretization needs omega and v lists of equal nonzero length");
        for (double w : d.omega)
            if (!(w > 0.0)) throw ConfigError("manual mode frequencies must be positive");
    }
    if (!(kernel.t_max > 0.0) || !(kernel.tolerance > 0.0))
        throw ConfigError("kernel.t_max and kernel.tolerance must be positive");
    if (!(ed.tolerance > 0.0) || !(ed.fd_step > 0.0))
        throw ConfigError("ed.tolerance and ed.fd_step must be positive");
    if (scan.lambdas.empty() || scan.horizons.empty()) throw ConfigError("scan grids must be nonempty");
    for (double t : scan.horizons)
        if (!(t > 0.0)) throw ConfigError("scan.horizons must be positive");
    if (output.format != "json" && output.format != "csv") throw ConfigError("output.format must be json or csv");
}

DiscreteModes RunConfig::modes() const {
    const auto& d = discretization;
    if (d.scheme == DiscretizationScheme::manual) return DiscreteModes::manual(d.omega, d.v);
    ModelSpec spec = model;
    if (d.regularize_mass > 0.0) spec = regularize_mass(spec, d.regularize_mass, d.regularize_scheme);
    return discretize(spec, d.n_modes, d.scheme);
}

KernelSource RunConfig::kernel_source() const {
    if (kernel.source == KernelSourceKind::discrete) return modes();
    ModelSpec spec = model;
    if (discretization.regularize_mass > 0.0)
        spec = regularize_mass(spec, discretization.regularize_mass, discretization.regularize_scheme);
    return spec;
}

namespace {

std::string emit_sections(const RunConfig& c, bool with_output) {
    std::ostringstream os;
    const auto& m = c.model;
    os << "[model]\n"
       << "dimension = " << m.dimension << "\n"
       << "dispersion = " << to_string(m.dispersion.kind) << "\n"
       << "mass = " << format_double(m.dispersion.mass) << "\n"
       << "alpha = " << format_double(m.alpha) << "\n"
       << "cutoff = " << to_string(m.cutoff.kind) << "\n"
       << "cutoff_parameter = " << format_double(m.cutoff.parameter) << "\n"
       << "lambda = " << format_double(m.lambda) << "\n"
       << "mu = " << format_double(m.mu) << "\n\n";
    const auto& d = c.discretization;
    os << "[discretization]\n"
       << "n_modes = " << d.n_modes << "\n"
       << "scheme = " << to_string(d.scheme) << "\n"
       << "omega = " << join(d.omega) << "\n"
       << "v = " << join(d.v) << "\n"
       << "n_max = " << d.n_max << "\n"
       << "N_max = " << d.N_max << "\n"
       << "regularize_mass = " << format_double(d.regularize_mass) << "\n"
       << "regularize_scheme = " << to_string(d.regularize_scheme) << "\n\n";
    os << "[kernel]\n"
       << "source = " << to_string(c.kernel.source) << "\n"
       << "t_max = " << format_double(c.kernel.t_max) << "\n"
       << "tolerance = " << format_double(c.kernel.tolerance) << "\n\n";
    const auto& mc = c.mc;
    os << "[mc]\n"
       << "T = " << format_double(mc.horizon) << "\n"
       << "samples = " << mc.samples << "\n"
       << "sweeps = " << mc.sweeps << "\n"
       << "burn_in = " << format_double(mc.burn_in) << "\n"
       << "seed = " << mc.seed << "\n"
       << "thinning = " << mc.thinning << "\n"
       << "chains = " << mc.chains << "\n"
       << "block_size = " << mc.block_size << "\n"
       << "convention = " << to_string(mc.convention) << "\n"
       << "w_insert = " << format_double(mc.moves.insert_pair) << "\n"
       << "w_delete = " << format_double(mc.moves.delete_pair) << "\n"
       << "w_shift = " << format_double(mc.moves.shift) << "\n"
       << "w_flip = " << format_double(mc.moves.global_flip) << "\n"
       << "w_tail = " << format_double(mc.moves.tail) << "\n\n";
    os << "[ed]\n"
       << "tolerance = " << format_double(c.ed.tolerance) << "\n"
       << "fd_step = " << format_double(c.ed.fd_step) << "\n\n";
    os << "[scan]\n"
       << "lambdas = " << join(c.scan.lambdas) << "\n"
       << "horizons = " << join(c.scan.horizons) << "\n"
       << "lambda_units = " << to_string(c.scan.lambda_units) << "\n";
    if (with_output) {
        os << "\n[output]\n"
           << "dir = " << c.output.dir << "\n"
           << "format = " << c.output.format << "\n";
    }
    return os.str();
}

}  // namespace

std::string emit_config(const RunConfig& cfg) { return emit_sections(cfg, true); }

std::string config_digest(const RunConfig& cfg) {
    // Output location and format do not change results, so they are left out.
    const std::string text = emit_sections(cfg, false);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace spinboson
