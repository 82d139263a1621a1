// ising_mc.cpp

#include "spinboson/ising_mc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "spinboson/errors.hpp"
#include "spinboson/parallel.hpp"
#include "spinboson/quadrature.hpp"

namespace spinboson {

double coupling_factor(FieldConvention convention) noexcept {
    return convention == FieldConvention::standard ? 2.0 : 1.0;
}

std::string to_string(FieldConvention convention) {
    return convention == FieldConvention::standard ? "standard" : "symmetrized";
}

FieldConvention parse_field_convention(const std::string& text) {
    if (text == "standard") return FieldConvention::standard;
    if (text == "symmetrized") return FieldConvention::symmetrized;
    throw ConfigError("unknown field convention '" + text + "'");
}

int SpinPath::spin_at(double t) const {
    const auto flips = std::upper_bound(jumps.begin(), jumps.end(), t) - jumps.begin();
    return flips % 2 == 0 ? initial_spin : -initial_spin;
}

void SpinPath::validate() const {
    if (!(horizon > 0.0)) throw ArgumentError("path horizon must be positive");
    if (initial_spin != 1 && initial_spin != -1) throw ArgumentError("initial spin must be ±1");
    double prev = 0.0;
    for (double t : jumps) {
        if (!(t > prev) || !(t < horizon)) throw ArgumentError("jump times must be increasing inside (0, T)");
        prev = t;
    }
}

SpinPath sample_free_path(double horizon, Philox& rng) {
    if (!(horizon > 0.0)) throw ArgumentError("sample_free_path: T must be positive");
    SpinPath path;
    path.horizon = horizon;
    path.initial_spin = rng.sign();
    // Exponential gaps give the Poisson count and sorted times together.
    double t = rng.exponential();
    while (t < horizon) {
        path.jumps.push_back(t);
        t += rng.exponential();
    }
    return path;
}

namespace {

void check_range(const SpinPath& path, const KernelTable& table) {
    if (path.horizon > table.t_max())
        throw RangeError("path horizon " + std::to_string(path.horizon) + " exceeds kernel table range " +
                         std::to_string(table.t_max()));
}

// Σ_k s_k ∫_a^b ∫_{seg_k} W, using the telescoped form
// s_0 G(0) + 2 Σ_{k≥1} s_k G(t_k) − s_n G(T) with G(x) = V(b − x) − V(a − x).
double overlap_with_path(const KernelTable& table, int x0, const std::vector<double>& jumps,
                         double horizon, double a, double b) noexcept {
    const auto g = [&](double x) { return table.V(b - x) - table.V(a - x); };
    double sum = x0 * g(0.0);
    int s = x0;
    for (double t : jumps) {
        s = -s;
        sum += 2.0 * s * g(t);
    }
    sum -= s * g(horizon);
    return sum;
}

}  // namespace

double interaction_integral(const SpinPath& path, const KernelTable& table) {
    check_range(path, table);
    const std::size_t n = path.segment_count();
    std::vector<double> lo(n), hi(n);
    std::vector<int> spin(n);
    int s = path.initial_spin;
    for (std::size_t k = 0; k < n; ++k) {
        lo[k] = k == 0 ? 0.0 : path.jumps[k - 1];
        hi[k] = k + 1 == n ? path.horizon : path.jumps[k];
        spin[k] = s;
        s = -s;
    }
    double q = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        q += 2.0 * table.V(hi[i] - lo[i]);
        for (std::size_t j = i + 1; j < n; ++j)
            q += 2.0 * spin[i] * spin[j] * segment_pair_integral_unchecked(table, lo[i], hi[i], lo[j], hi[j]);
    }
    return q;
}

double magnetization(const SpinPath& path) {
    double m = 0.0;
    double prev = 0.0;
    int s = path.initial_spin;
    for (double t : path.jumps) {
        m += s * (t - prev);
        prev = t;
        s = -s;
    }
    return m + s * (path.horizon - prev);
}

double action(const SpinPath& path, double lambda, double mu, const KernelTable& table,
              FieldConvention convention) {
    return coupling_factor(convention) * lambda * lambda * interaction_integral(path, table) -
           mu * magnetization(path);
}

void McConfig::validate() const {
    if (!(horizon > 0.0)) throw ConfigError("mc.T must be positive");
    if (samples < 2) throw ConfigError("mc.samples must be at least 2");
    if (sweeps < 2) throw ConfigError("mc.sweeps must be at least 2");
    if (!(burn_in >= 0.0 && burn_in < 10.0)) throw ConfigError("mc.burn_in must be in [0, 10)");
    if (thinning == 0) throw ConfigError("mc.thinning must be positive");
    if (sweeps / thinning < 2) throw ConfigError("mc.sweeps / mc.thinning must be at least 2");
    if (chains == 0) throw ConfigError("mc.chains must be positive");
    if (block_size == 0) throw ConfigError("mc.block_size must be positive");
    const double w[] = {moves.insert_pair, moves.delete_pair, moves.shift, moves.global_flip, moves.tail};
    double total = 0.0;
    for (double x : w) {
        if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("move weights must be nonnegative");
        total += x;
    }
    if (!(total > 0.0)) throw ConfigError("move weights must not all be zero");
    if ((moves.insert_pair > 0.0) != (moves.delete_pair > 0.0))
        throw ConfigError("pair insertion and deletion weights must both be zero or both positive");
}

std::size_t McConfig::moves_per_sweep() const noexcept {
    return std::max<std::size_t>(10, 2 * static_cast<std::size_t>(std::ceil(horizon)));
}

PartitionResult estimate_partition_detail(double lambda, double mu, const KernelTable& table,
                                          const McConfig& cfg) {
    cfg.validate();
    if (cfg.horizon > table.t_max()) throw RangeError("mc.T exceeds kernel table range");
    const double c = coupling_factor(cfg.convention) * lambda * lambda;
    struct Block {
        double sum{0.0}, sum_sq{0.0}, max{0.0};
    };
    const std::size_t n_blocks = (cfg.samples + cfg.block_size - 1) / cfg.block_size;
    std::vector<Block> blocks(n_blocks);
    parallel_for(n_blocks, cfg.threads, [&](std::size_t b) {
        Philox rng(cfg.seed, stream_id(StreamKind::partition_block, b));
        const std::size_t count = std::min(cfg.block_size, cfg.samples - b * cfg.block_size);
        Block acc;
        for (std::size_t i = 0; i < count; ++i) {
            const SpinPath path = sample_free_path(cfg.horizon, rng);
            const double s = (c != 0.0 ? c * interaction_integral(path, table) : 0.0) -
                             (mu != 0.0 ? mu * magnetization(path) : 0.0);
            const double w = std::exp(s);
            acc.sum += w;
            acc.sum_sq += w * w;
            acc.max = std::max(acc.max, w);
        }
        blocks[b] = acc;
    });
    double sum = 0.0, sum_sq = 0.0, max = 0.0;
    for (const Block& b : blocks) {
        sum += b.sum;
        sum_sq += b.sum_sq;
        max = std::max(max, b.max);
    }
    PartitionResult out;
    out.estimate = estimate_iid(sum, sum_sq, cfg.samples);
    out.max_weight_fraction = sum > 0.0 ? max / sum : 0.0;
    out.heavy_tail = out.max_weight_fraction > kHeavyTailFraction;
    if (out.heavy_tail)
        out.estimate.warnings.push_back("heavy-tailed weights: largest weight is " +
                                        std::to_string(100.0 * out.max_weight_fraction) + "% of total");
    return out;
}

Estimate estimate_partition(double lambda, double mu, const KernelTable& table, const McConfig& cfg) {
    return estimate_partition_detail(lambda, mu, table, cfg).estimate;
}

Estimate estimate_energy(double lambda, double mu, const KernelTable& table, const McConfig& cfg) {
    const Estimate z = estimate_partition(lambda, mu, table, cfg);
    if (!(z.value > 0.0)) throw NumericalError("estimation", "nonpositive partition estimate; increase samples");
    Estimate e = z;
    e.value = -1.0 - std::log(z.value) / cfg.horizon;
    e.error = z.error / (z.value * cfg.horizon);
    return e;
}

namespace {

class Chain {
public:
    Chain(double lambda, double mu, const KernelTable& table, const McConfig& cfg, std::size_t index)
        : table_(table),
          coupling_(coupling_factor(cfg.convention) * lambda * lambda),
          mu_(mu),
          horizon_(cfg.horizon),
          rng_(cfg.seed, stream_id(StreamKind::chain, index)) {
        const double w[] = {cfg.moves.insert_pair, cfg.moves.delete_pair, cfg.moves.shift,
                            cfg.moves.global_flip, cfg.moves.tail};
        double total = 0.0;
        for (double x : w) total += x;
        double acc = 0.0;
        for (std::size_t i = 0; i < cumulative_.size(); ++i) {
            prob_[i] = w[i] / total;
            acc += prob_[i];
            cumulative_[i] = acc;
        }
        path_ = sample_free_path(horizon_, rng_);
        m_ = magnetization(path_);
    }

    void step() {
        const double u = rng_.uniform();
        std::size_t move = 0;
        while (move + 1 < cumulative_.size() && u >= cumulative_[move]) ++move;
        ++attempts_[move];
        bool accepted = false;
        switch (static_cast<Move>(move)) {
            case Move::insert_pair: accepted = insert_pair(); break;
            case Move::delete_pair: accepted = delete_pair(); break;
            case Move::shift: accepted = shift(); break;
            case Move::global_flip: accepted = global_flip(); break;
            case Move::tail: accepted = tail(); break;
            case Move::count: break;
        }
        if (accepted) ++accepts_[move];
    }

    const SpinPath& path() const noexcept { return path_; }
    std::size_t attempts(std::size_t m) const noexcept { return attempts_[m]; }
    std::size_t accepts(std::size_t m) const noexcept { return accepts_[m]; }

private:
    int spin_of_segment(std::size_t k) const noexcept {
        return k % 2 == 0 ? path_.initial_spin : -path_.initial_spin;
    }
    double lower(std::size_t k) const noexcept { return k == 0 ? 0.0 : path_.jumps[k - 1]; }
    double upper(std::size_t k) const noexcept {
        return k == path_.jumps.size() ? horizon_ : path_.jumps[k];
    }

    // Change of S when the spin on [a, b] (currently s throughout) is reversed.
    double flip_delta(double a, double b, int s) const noexcept {
        double d = 2.0 * mu_ * s * (b - a);
        if (coupling_ != 0.0) {
            const double cross = overlap_with_path(table_, path_.initial_spin, path_.jumps, horizon_, a, b);
            d += coupling_ * (-4.0 * s * cross + 8.0 * table_.V(b - a));
        }
        return d;
    }

    bool accept(double log_ratio) { return std::log(rng_.uniform()) < log_ratio; }

    bool insert_pair() {
        const double u1 = rng_.uniform(0.0, horizon_);
        const auto k = static_cast<std::size_t>(
            std::upper_bound(path_.jumps.begin(), path_.jumps.end(), u1) - path_.jumps.begin());
        const double lo = lower(k), hi = upper(k);
        const double u2 = rng_.uniform(lo, hi);
        const double a = std::min(u1, u2), b = std::max(u1, u2);
        if (!(a > lo && b < hi && a < b)) return false;
        const int s = spin_of_segment(k);
        const double n = static_cast<double>(path_.jumps.size());
        const double log_ratio = flip_delta(a, b, s) +
                                 std::log(horizon_ * (hi - lo) * prob_[1] / (2.0 * (n + 1.0) * prob_[0]));
        if (!accept(log_ratio)) return false;
        path_.jumps.insert(path_.jumps.begin() + static_cast<std::ptrdiff_t>(k), {a, b});
        m_ -= 2.0 * s * (b - a);
        return true;
    }

    bool delete_pair() {
        const std::size_t n = path_.jumps.size();
        if (n < 2) return false;
        const std::size_t i = rng_.below(n - 1);
        const double a = path_.jumps[i], b = path_.jumps[i + 1];
        const int s = spin_of_segment(i + 1);
        const double merged = upper(i + 2) - lower(i);
        const double log_ratio =
            flip_delta(a, b, s) +
            std::log(2.0 * static_cast<double>(n - 1) * prob_[0] / (horizon_ * merged * prob_[1]));
        if (!accept(log_ratio)) return false;
        path_.jumps.erase(path_.jumps.begin() + static_cast<std::ptrdiff_t>(i),
                          path_.jumps.begin() + static_cast<std::ptrdiff_t>(i + 2));
        m_ -= 2.0 * s * (b - a);
        return true;
    }

    bool shift() {
        const std::size_t n = path_.jumps.size();
        if (n == 0) return false;
        const std::size_t i = rng_.below(n);
        const double lo = lower(i), hi = upper(i + 1);
        const double u = rng_.uniform(lo, hi);
        const double old = path_.jumps[i];
        if (!(u > lo && u < hi) || u == old) return false;
        // Moving the jump right reverses [old, u], which had the spin after it.
        const double a = std::min(u, old), b = std::max(u, old);
        const int s = u > old ? spin_of_segment(i + 1) : spin_of_segment(i);
        if (!accept(flip_delta(a, b, s))) return false;
        path_.jumps[i] = u;
        m_ -= 2.0 * s * (b - a);
        return true;
    }

    bool global_flip() {
        if (!accept(2.0 * mu_ * m_)) return false;
        path_.initial_spin = -path_.initial_spin;
        m_ = -m_;
        return true;
    }

    bool tail() {
        const std::size_t n = path_.jumps.size();
        const int s = spin_of_segment(n);
        if (rng_.uniform() < 0.5) {
            const double lo = lower(n);
            const double u = rng_.uniform(lo, horizon_);
            if (!(u > lo && u < horizon_)) return false;
            if (!accept(flip_delta(u, horizon_, s) + std::log(horizon_ - lo))) return false;
            path_.jumps.push_back(u);
            m_ -= 2.0 * s * (horizon_ - u);
            return true;
        }
        if (n == 0) return false;
        const double t = path_.jumps.back();
        const double merged = horizon_ - lower(n - 1);
        if (!accept(flip_delta(t, horizon_, s) - std::log(merged))) return false;
        path_.jumps.pop_back();
        m_ -= 2.0 * s * (horizon_ - t);
        return true;
    }

    const KernelTable& table_;
    double coupling_;
    double mu_;
    double horizon_;
    Philox rng_;
    SpinPath path_;
    double m_{0.0};
    std::array<double, static_cast<std::size_t>(Move::count)> prob_{};
    std::array<double, static_cast<std::size_t>(Move::count)> cumulative_{};
    std::array<std::size_t, static_cast<std::size_t>(Move::count)> attempts_{};
    std::array<std::size_t, static_cast<std::size_t>(Move::count)> accepts_{};
};

}  // namespace

McmcResult mcmc_run(const std::vector<Observable>& observables, double lambda, double mu,
                    const KernelTable& table, const McConfig& cfg) {
    cfg.validate();
    if (observables.empty()) throw ArgumentError("mcmc_run: no observables");
    if (cfg.horizon > table.t_max()) throw RangeError("mc.T exceeds kernel table range");

    constexpr std::size_t n_moves = static_cast<std::size_t>(Move::count);
    struct ChainOut {
        std::vector<Estimate> estimates;
        std::array<std::size_t, n_moves> attempts{};
        std::array<std::size_t, n_moves> accepts{};
        double mean_jumps{0.0};
    };
    std::vector<ChainOut> outs(cfg.chains);
    const std::size_t per_sweep = cfg.moves_per_sweep();
    const auto burn = static_cast<std::size_t>(std::ceil(cfg.burn_in * static_cast<double>(cfg.sweeps)));

    parallel_for(cfg.chains, cfg.threads, [&](std::size_t c) {
        Chain chain(lambda, mu, table, cfg, c);
        for (std::size_t i = 0; i < burn * per_sweep; ++i) chain.step();
        std::vector<std::vector<double>> series(observables.size());
        for (auto& s : series) s.reserve(cfg.sweeps / cfg.thinning);
        double jumps = 0.0;
        for (std::size_t sweep = 0; sweep < cfg.sweeps; ++sweep) {
            for (std::size_t i = 0; i < per_sweep; ++i) chain.step();
            if (sweep % cfg.thinning != 0) continue;
            for (std::size_t o = 0; o < observables.size(); ++o) series[o].push_back(observables[o](chain.path()));
            jumps += static_cast<double>(chain.path().jumps.size());
        }
        ChainOut& out = outs[c];
        for (const auto& s : series) out.estimates.push_back(estimate_series(s));
        out.mean_jumps = jumps / static_cast<double>(series[0].size());
        for (std::size_t m = 0; m < n_moves; ++m) {
            out.attempts[m] = chain.attempts(m);
            out.accepts[m] = chain.accepts(m);
        }
    });

    McmcResult result;
    std::array<std::size_t, n_moves> attempts{}, accepts{};
    for (std::size_t o = 0; o < observables.size(); ++o) {
        std::vector<Estimate> parts;
        for (const auto& out : outs) parts.push_back(out.estimates[o]);
        result.estimates.push_back(combine_independent(parts));
    }
    std::size_t total_attempts = 0, total_accepts = 0;
    for (const auto& out : outs) {
        result.mean_jumps += out.mean_jumps / static_cast<double>(outs.size());
        for (std::size_t m = 0; m < n_moves; ++m) {
            attempts[m] += out.attempts[m];
            accepts[m] += out.accepts[m];
        }
    }
    for (std::size_t m = 0; m < n_moves; ++m) {
        total_attempts += attempts[m];
        total_accepts += accepts[m];
        result.move_acceptance[m] =
            attempts[m] > 0 ? static_cast<double>(accepts[m]) / static_cast<double>(attempts[m]) : 0.0;
    }
    result.acceptance_rate =
        total_attempts > 0 ? static_cast<double>(total_accepts) / static_cast<double>(total_attempts) : 0.0;
    if (result.acceptance_rate < kMinAcceptance || result.acceptance_rate > kMaxAcceptance)
        result.warnings.push_back("acceptance rate " + std::to_string(result.acceptance_rate) +
                                  " outside [0.05, 0.95]");
    for (auto& e : result.estimates) e.warnings.insert(e.warnings.end(), result.warnings.begin(), result.warnings.end());
    return result;
}

Estimate mcmc_expectation(const Observable& observable, double lambda, double mu,
                          const KernelTable& table, const McConfig& cfg) {
    return mcmc_run({observable}, lambda, mu, table, cfg).estimates.front();
}

Estimate estimate_susceptibility(double lambda, const KernelTable& table, const McConfig& cfg) {
    const double t = cfg.horizon;
    return mcmc_expectation(
        [t](const SpinPath& p) {
            const double m = magnetization(p);
            return m * m / t;
        },
        lambda, 0.0, table, cfg);
}

BruteForceResult brute_force_partition(double lambda, double mu, const KernelTable& table,
                                       double horizon, int jump_cap, double tolerance,
                                       FieldConvention convention) {
    if (!(horizon > 0.0)) throw ArgumentError("brute_force_partition: T must be positive");
    if (jump_cap < 0 || jump_cap > kMaxBruteForceJumps)
        throw ArgumentError("brute_force_partition: jump_cap must be in [0, " +
                            std::to_string(kMaxBruteForceJumps) + "]");
    if (horizon > table.t_max()) throw RangeError("brute_force_partition: T exceeds kernel table range");
    const double c = coupling_factor(convention) * lambda * lambda;

    // Omitted sectors: Poisson tail times the largest possible weight.
    double tail = 0.0;
    double term = std::exp(-horizon);
    for (int n = 1; n < 400; ++n) {
        term *= horizon / n;
        if (n > jump_cap) tail += term;
        if (n > jump_cap && term < 1e-300) break;
    }
    const double max_action = c * 2.0 * table.V(horizon) + std::abs(mu) * horizon;
    BruteForceResult out;
    out.truncation_bound = tail * std::exp(max_action);
    if (out.truncation_bound > tolerance)
        throw NumericalError("truncation", "omitted jump sectors may contribute up to " +
                                               std::to_string(out.truncation_bound) + " > tolerance " +
                                               std::to_string(tolerance));

    constexpr double kEvaluationBudget = 1e6;
    const double prefactor = std::exp(-horizon);
    SpinPath path;
    path.horizon = horizon;
    path.initial_spin = 1;
    for (int n = 0; n <= jump_cap; ++n) {
        if (n == 0) {
            path.jumps.clear();
            const double q = c * interaction_integral(path, table);
            const double m = magnetization(path);
            out.sector_weights.push_back(prefactor * 0.5 * (std::exp(q - mu * m) + std::exp(q + mu * m)));
            out.nodes_per_axis.push_back(0);
            continue;
        }
        const int m = std::clamp(static_cast<int>(std::floor(std::pow(kEvaluationBudget, 1.0 / n))), 4, 24);
        const quad::Rule rule = quad::gauss_legendre(m, 0.0, 1.0);
        std::vector<int> idx(static_cast<std::size_t>(n), 0);
        path.jumps.assign(static_cast<std::size_t>(n), 0.0);
        double sum = 0.0;
        while (true) {
            // Collapsed coordinates: t_k = t_{k-1} + (T − t_{k-1}) u_k.
            double prev = 0.0, jac = 1.0, weight = 1.0;
            bool valid = true;
            for (int k = 0; k < n; ++k) {
                const double span = horizon - prev;
                const double t = prev + span * rule.nodes[static_cast<std::size_t>(idx[k])];
                jac *= span;
                weight *= rule.weights[static_cast<std::size_t>(idx[k])];
                if (!(t > prev)) valid = false;
                path.jumps[static_cast<std::size_t>(k)] = t;
                prev = t;
            }
            if (valid && prev < horizon) {
                const double q = c != 0.0 ? c * interaction_integral(path, table) : 0.0;
                const double mag = magnetization(path);
                sum += weight * jac * 0.5 * (std::exp(q - mu * mag) + std::exp(q + mu * mag));
            }
            int k = n - 1;
            while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == m) idx[static_cast<std::size_t>(k--)] = 0;
            if (k < 0) break;
        }
        out.sector_weights.push_back(prefactor * sum);
        out.nodes_per_axis.push_back(m);
    }
    for (double w : out.sector_weights) out.value += w;
    return out;
}

std::pair<double, double> weighted_slope(const std::vector<double>& x, const std::vector<double>& y,
                                         const std::vector<double>& sigma) {
    if (x.size() != y.size() || x.size() != sigma.size() || x.size() < 2)
        throw ArgumentError("weighted_slope: need at least two matching points");
    double sw = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = sigma[i] > 0.0 ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
        sw += w;
        sx += w * x[i];
        sy += w * y[i];
    }
    const double xm = sx / sw, ym = sy / sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = sigma[i] > 0.0 ? 1.0 / (sigma[i] * sigma[i]) : 1.0;
        sxx += w * (x[i] - xm) * (x[i] - xm);
        sxy += w * (x[i] - xm) * (y[i] - ym);
    }
    if (sxx == 0.0) throw ArgumentError("weighted_slope: x values must differ");
    return {sxy / sxx, 1.0 / std::sqrt(sxx)};
}

ScanResult coupling_scan(const std::vector<double>& lambdas, const KernelTable& table,
                         const McConfig& cfg, const std::vector<double>& horizons) {
    if (lambdas.empty() || horizons.empty()) throw ArgumentError("coupling_scan: grids must be nonempty");
    const double l1 = table.source().l1_fubini();
    ScanResult out;
    for (double lambda : lambdas) {
        std::vector<double> ts, chis, errs;
        std::map<double, std::pair<double, double>> by_t;
        for (double t : horizons) {
            ScanCell cell;
            cell.lambda = lambda;
            cell.horizon = t;
            cell.l1_diag = coupling_factor(cfg.convention) * lambda * lambda * l1;
            try {
                McConfig local = cfg;
                local.horizon = t;
                cell.chi = estimate_susceptibility(lambda, table, local);
                ts.push_back(t);
                chis.push_back(cell.chi.value);
                errs.push_back(cell.chi.error);
                by_t[t] = {cell.chi.value, cell.chi.error};
            } catch (const Error& e) {
                cell.error = e.reason() + ": " + e.what();
            }
            out.cells.push_back(std::move(cell));
        }
        ScanSlope slope;
        slope.lambda = lambda;
        if (ts.size() >= 2) {
            const auto [s, se] = weighted_slope(ts, chis, errs);
            slope.slope = s;
            slope.slope_error = se;
        } else {
            slope.slope = std::numeric_limits<double>::quiet_NaN();
            slope.slope_error = std::numeric_limits<double>::quiet_NaN();
        }
        for (const auto& [t, v] : by_t) {
            const auto it = by_t.find(2.0 * t);
            if (it == by_t.end()) continue;
            slope.extrapolated.push_back(2.0 * it->second.first - v.first);
            slope.extrapolated_error.push_back(std::hypot(2.0 * it->second.second, v.second));
        }
        out.slopes.push_back(std::move(slope));
    }
    return out;
}

}  // namespace spinboson
