#include "benign/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "benign/errors.hpp"
#include "benign/krr.hpp"
#include "benign/rng.hpp"

namespace benign::experiments {

std::string_view to_string(ModelFamily model) noexcept {
    return model == ModelFamily::nn ? "nn" : "krr";
}

ModelFamily parse_model(std::string_view text) {
    if (text == "nn") return ModelFamily::nn;
    if (text == "krr") return ModelFamily::krr;
    throw InvalidArgument("unknown model family '" + std::string(text) + "'");
}

CrossingPoint detect_crossing(const RiskCurve& curve) {
    CrossingPoint cp;
    const std::size_t len = curve.size();
    if (len == 0 || curve.empirical.size() != len || curve.excess.size() != len) return cp;
    std::size_t start = len;
    while (start > 0 && curve.excess[start - 1] >= curve.empirical[start - 1]) --start;
    if (start == len) return cp;
    cp.found = true;
    cp.index = start;
    cp.iteration = curve.iterations[start];
    cp.risk_at_cross = curve.excess[start];
    return cp;
}

std::map<std::size_t, CrossingStats> aggregate_crossings(
    const std::map<std::size_t, std::vector<CrossingPoint>>& groups) {
    std::map<std::size_t, CrossingStats> out;
    for (const auto& [n, points] : groups) {
        if (points.empty()) throw InvalidArgument("crossing group for n=" + std::to_string(n) + " is empty");
        CrossingStats s;
        s.runs = points.size();
        std::vector<double> iters;
        std::vector<double> risks;
        for (const auto& p : points) {
            if (!p.found) continue;
            iters.push_back(static_cast<double>(p.iteration));
            risks.push_back(p.risk_at_cross);
        }
        s.found_fraction = static_cast<double>(iters.size()) / static_cast<double>(points.size());
        if (!iters.empty()) {
            const auto mean_std = [](const std::vector<double>& v) {
                const double k = static_cast<double>(v.size());
                double mean = 0.0;
                for (double x : v) mean += x;
                mean /= k;
                double var = 0.0;
                for (double x : v) var += (x - mean) * (x - mean);
                return std::pair{mean, std::sqrt(var / k)};
            };
            std::tie(s.mean_iteration, s.std_iteration) = mean_std(iters);
            std::tie(s.mean_risk, s.std_risk) = mean_std(risks);
        }
        out.emplace(n, s);
    }
    return out;
}

ScheduleQuantities schedule_quantities(double eps, int d, const std::vector<ntk::SpectrumEntry>& spectrum,
                                       std::size_t L_eps) {
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    if (d < 2) throw InvalidArgument("d must be >= 2");
    if (L_eps < 1) throw InvalidArgument("L_eps must be >= 1");

    std::vector<ntk::SpectrumEntry> sorted;
    for (const auto& e : spectrum) {
        if (e.eigenvalue > 0.0) sorted.push_back(e);
    }
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.eigenvalue > b.eigenvalue; });
    std::size_t seen = 0;
    double lambda = 0.0;
    for (const auto& e : sorted) {
        if (L_eps <= seen + e.multiplicity) {
            lambda = e.eigenvalue;
            break;
        }
        seen += e.multiplicity;
    }
    if (lambda <= 0.0) {
        throw InvalidArgument("L_eps=" + std::to_string(L_eps) + " exceeds the " + std::to_string(seen) +
                              " positive eigenvalues in the computed spectrum");
    }

    ScheduleQuantities q;
    q.eps = eps;
    q.L_eps = L_eps;
    q.lambda_eps = lambda;
    q.T_eps = 2.0 / lambda * std::log(2.0 / std::sqrt(eps));
    const double log_base = std::log(8.0 * q.T_eps / d);
    const double log_bound = std::log(std::sqrt(eps) / 14.0);
    constexpr std::size_t kCap = 100'000'000;
    for (std::size_t u = 0; u < kCap; ++u) {
        if (static_cast<double>(u) * log_base - std::lgamma(static_cast<double>(u) + 1.0) <= log_bound) {
            q.U_eps = u;
            return q;
        }
    }
    throw NumericError("U_eps search exceeded its cap");
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t n_index, std::size_t seed_index, std::string_view stage) {
    return derive_seed(base, stage, {n_index, seed_index});
}

CellData prepare_cell(const ExperimentConfig& cfg, std::size_t n_index, std::size_t seed_index) {
    if (n_index >= cfg.n_list.size()) throw InvalidArgument("n index out of range");
    const std::size_t n = cfg.n_list[n_index];
    // nn cells share the training sample across seeds; krr has no other randomness.
    const std::size_t data_seed_index = cfg.model == ModelFamily::nn ? 0 : seed_index;
    const std::uint64_t data_seed = cell_seed(cfg.base_seed, n_index, data_seed_index, "data");

    CellData cell;
    cell.eval_seed = cell_seed(cfg.base_seed, n_index, seed_index, "eval");
    cell.init_seed = cell_seed(cfg.base_seed, n_index, seed_index, "init");
    cell.eval.mc_samples = cfg.mc_samples;
    cell.eval.dim = cfg.d;
    if (cfg.dataset == datasets::DatasetKind::synthetic) {
        cell.train = datasets::make_synthetic(cfg.d, n, cfg.noise_std, data_seed);
    } else {
        if (!cfg.raw) throw InvalidArgument("real-data experiment without a loaded table");
        auto split = datasets::prepare_real(*cfg.raw, n, cfg.n_test, cfg.noise_std, data_seed);
        cell.train = std::move(split.train);
        cell.eval.test = std::make_shared<const datasets::LabeledDataset>(std::move(split.test));
    }
    return cell;
}

namespace {

RiskCurve run_cell(const ExperimentConfig& cfg, std::size_t n_index, std::size_t seed_index) {
    const std::size_t n = cfg.n_list[n_index];
    CellData cell = prepare_cell(cfg, n_index, seed_index);
    const datasets::LabeledDataset& train_set = cell.train;
    const EvalConfig& eval = cell.eval;
    const std::uint64_t eval_seed = cell.eval_seed;

    RiskCurve curve;
    if (cfg.model == ModelFamily::nn) {
        auto init = relu_net::init_antisymmetric(cfg.m, train_set.d(), cell.init_seed);
        relu_net::TrainConfig tc;
        tc.lr = cfg.lr;
        tc.iters = cfg.iterations;
        tc.schedule = cfg.schedule;
        tc.eval = eval;
        curve = relu_net::train(init.net, init.snapshot, train_set, tc, eval_seed).curve;
    } else {
        const auto records = krr::krr_complexity_sweep(train_set, cfg.gammas, eval, eval_seed);
        for (std::size_t r = 0; r < records.size(); ++r) {
            curve.push(r, records[r].empirical_risk, records[r].excess_risk);
        }
        curve.meta.m_or_gammas = cfg.gammas.size();
    }
    curve.meta.dataset = cfg.dataset;
    curve.meta.model = cfg.model;
    curve.meta.n = n;
    curve.meta.seed_index = seed_index;
    curve.meta.seed = cell.init_seed;
    curve.meta.lr = cfg.model == ModelFamily::nn ? cfg.lr : 0.0;
    curve.meta.noise_std = cfg.noise_std;
    return curve;
}

}  // namespace

ExperimentResult run_risk_curves(const ExperimentConfig& cfg, std::size_t jobs) {
    if (cfg.n_list.empty()) throw InvalidArgument("experiment needs at least one n");
    if (cfg.seeds == 0) throw InvalidArgument("experiment needs at least one seed");
    if (cfg.model == ModelFamily::krr && cfg.gammas.empty()) throw InvalidArgument("krr experiment needs gammas");

    // Canonical order: sorted by n, then seed index.
    std::vector<std::size_t> n_order(cfg.n_list.size());
    for (std::size_t i = 0; i < n_order.size(); ++i) n_order[i] = i;
    std::stable_sort(n_order.begin(), n_order.end(),
                     [&](std::size_t a, std::size_t b) { return cfg.n_list[a] < cfg.n_list[b]; });
    struct Cell {
        std::size_t n_index;
        std::size_t seed_index;
    };
    std::vector<Cell> cells;
    for (std::size_t ni : n_order) {
        for (std::size_t s = 0; s < cfg.seeds; ++s) cells.push_back({ni, s});
    }

    std::vector<std::optional<RiskCurve>> curves(cells.size());
    std::vector<std::string> errors(cells.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t c = next++; c < cells.size(); c = next++) {
            try {
                curves[c] = run_cell(cfg, cells[c].n_index, cells[c].seed_index);
            } catch (const std::exception& e) {
                errors[c] = e.what();
            }
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(jobs, 1, cells.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentResult result;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        if (curves[c]) {
            result.curves.push_back(std::move(*curves[c]));
        } else {
            result.failures.push_back({cfg.n_list[cells[c].n_index], cells[c].seed_index, errors[c]});
        }
    }
    return result;
}

std::map<std::size_t, std::vector<CrossingPoint>> crossings_by_n(const std::vector<RiskCurve>& curves) {
    std::map<std::size_t, std::vector<CrossingPoint>> groups;
    for (const auto& c : curves) groups[c.meta.n].push_back(detect_crossing(c));
    return groups;
}

void write_curves_csv(std::ostream& out, const std::vector<RiskCurve>& curves) {
    out << "dataset,model,n,m_or_gamma_rank,seed,iteration,empirical_risk,excess_risk\n";
    const auto old_precision = out.precision(17);
    for (const auto& c : curves) {
        for (std::size_t k = 0; k < c.size(); ++k) {
            const std::size_t m_or_rank = c.meta.model == ModelFamily::nn ? c.meta.m_or_gammas : c.iterations[k];
            out << datasets::to_string(c.meta.dataset) << ',' << to_string(c.meta.model) << ',' << c.meta.n << ','
                << m_or_rank << ',' << c.meta.seed_index << ',' << c.iterations[k] << ',' << c.empirical[k] << ','
                << c.excess[k] << '\n';
        }
    }
    out.precision(old_precision);
}

namespace {

template <typename T>
T parse_field(std::string_view s, std::size_t line) {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) {
        throw ParseError("bad field '" + std::string(s) + "'", line);
    }
    return v;
}

}  // namespace

std::vector<RiskCurve> read_curves_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<RiskCurve> curves;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "dataset,model,n,m_or_gamma_rank,seed,iteration,empirical_risk,excess_risk") {
                throw FormatError("unexpected curves header '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        std::vector<std::string_view> f;
        std::string_view rest(line);
        while (true) {
            const auto pos = rest.find(',');
            f.push_back(rest.substr(0, pos));
            if (pos == std::string_view::npos) break;
            rest.remove_prefix(pos + 1);
        }
        if (f.size() != 8) throw FormatError("curves line " + std::to_string(line_no) + " needs 8 fields");
        CurveMeta meta;
        meta.dataset = datasets::parse_kind(f[0]);
        meta.model = parse_model(f[1]);
        meta.n = parse_field<std::size_t>(f[2], line_no);
        const auto m_or_rank = parse_field<std::size_t>(f[3], line_no);
        meta.seed_index = parse_field<std::size_t>(f[4], line_no);
        const auto iteration = parse_field<std::size_t>(f[5], line_no);
        const double emp = parse_field<double>(f[6], line_no);
        const double exc = parse_field<double>(f[7], line_no);

        const bool same_curve = !curves.empty() && curves.back().meta.dataset == meta.dataset &&
                                curves.back().meta.model == meta.model && curves.back().meta.n == meta.n &&
                                curves.back().meta.seed_index == meta.seed_index &&
                                curves.back().iterations.back() < iteration;
        if (!same_curve) {
            curves.emplace_back();
            curves.back().meta = meta;
            if (meta.model == ModelFamily::nn) curves.back().meta.m_or_gammas = m_or_rank;
        }
        curves.back().push(iteration, emp, exc);
        if (meta.model == ModelFamily::krr) curves.back().meta.m_or_gammas = curves.back().size();
    }
    if (!header_seen) throw FormatError("curves CSV is empty");
    return curves;
}

std::vector<CrossingRow> summarize_crossings(const std::vector<RiskCurve>& curves) {
    using Key = std::pair<datasets::DatasetKind, ModelFamily>;
    std::map<Key, std::vector<RiskCurve>> grouped;
    for (const auto& c : curves) grouped[{c.meta.dataset, c.meta.model}].push_back(c);
    std::vector<CrossingRow> rows;
    for (const auto& [key, group] : grouped) {
        for (const auto& [n, stats] : aggregate_crossings(crossings_by_n(group))) {
            rows.push_back({key.first, key.second, n, stats});
        }
    }
    return rows;
}

void write_crossings_csv(std::ostream& out, const std::vector<CrossingRow>& rows) {
    out << "# std columns use the population convention (divide by the number of found crossings)\n";
    out << "dataset,model,n,runs,found_fraction,mean_cross_iter,std_cross_iter,mean_cross_risk,std_cross_risk\n";
    const auto old_precision = out.precision(17);
    const auto opt = [&](const std::optional<double>& v) {
        if (v) out << *v;
    };
    for (const auto& row : rows) {
        const auto& s = row.stats;
        out << datasets::to_string(row.dataset) << ',' << to_string(row.model) << ',' << row.n << ',' << s.runs
            << ',' << s.found_fraction << ',';
        opt(s.mean_iteration);
        out << ',';
        opt(s.std_iteration);
        out << ',';
        opt(s.mean_risk);
        out << ',';
        opt(s.std_risk);
        out << '\n';
    }
    out.precision(old_precision);
}

void write_failures_csv(std::ostream& out, const std::vector<CellFailure>& failures) {
    out << "n,seed,error\n";
    for (const auto& f : failures) {
        std::string msg = f.message;
        std::replace(msg.begin(), msg.end(), '"', '\'');
        out << f.n << ',' << f.seed_index << ",\"" << msg << "\"\n";
    }
}

}  // namespace benign::experiments
