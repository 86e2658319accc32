#ifndef AAPP_BENCH_HPP
#define AAPP_BENCH_HPP

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aapp/aa.hpp"
#include "aapp/error.hpp"
#include "aapp/init.hpp"
#include "aapp/matrix.hpp"
#include "aapp/rng.hpp"

namespace aapp {

inline constexpr std::string_view kMethodNames[] = {
    "uniform", "furthest-first", "furthest-sum", "aapp", "kmeanspp", "aapp-mc",
};
inline constexpr std::string_view kMcPrefix = "aapp-mc-";

inline bool is_known_method(std::string_view name) {
    for (std::string_view m : kMethodNames) {
        if (name == m) return true;
    }
    return false;
}

/// One benchmark grid: every listed method runs for every k and every seed
/// index. `aapp-mc` expands into one method id per chain fraction. When
/// `seed_list` is non-empty it replaces the 0..seeds-1 index range.
struct ExperimentConfig {
    std::string dataset_id = "data";
    std::vector<std::string> methods;
    std::vector<std::size_t> k_list;
    std::size_t iters = 10;
    std::size_t seeds = 50;
    std::vector<std::uint64_t> seed_list;
    std::vector<double> chain_fractions = {0.01, 0.05, 0.1, 0.2};
    std::uint64_t base_seed = 1;
    // Zeroes both time columns so output files are byte-reproducible.
    bool omit_times = false;
};

/// One output row; `stage` is "init", "iter-1", ..., or "error" for an
/// isolated cell failure (then `mse` is NaN and `flags` carries the reason).
struct ResultRecord {
    std::string dataset;
    std::string method;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::string stage;
    double mse = 0.0;
    double init_time_s = 0.0;
    double iter_time_s = 0.0;
    std::string flags;
};

inline constexpr std::string_view kRecordsHeader =
    "dataset,method,k,seed,stage,mse,init_time_s,iter_time_s,flags";

namespace detail {

/// Shortest round-trippable decimal form.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_fraction(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// CSV cells and flag tokens must stay delimiter-free.
inline std::string sanitize_cell(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return out;
}

inline std::vector<std::string_view> split_line(std::string_view line, char delim) {
    std::vector<std::string_view> cells;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(delim, pos);
        cells.push_back(line.substr(pos, next == std::string_view::npos
                                             ? std::string_view::npos
                                             : next - pos));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return cells;
}

inline double parse_record_double(std::string_view cell, std::size_t line_no,
                                  std::size_t col) {
    if (cell == "nan" || cell == "-nan") return std::nan("");
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw parse_error("records: bad number '" + std::string(cell) + "'", line_no,
                          col);
    }
    return v;
}

inline std::uint64_t parse_record_uint(std::string_view cell, std::size_t line_no,
                                       std::size_t col) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw parse_error("records: bad count '" + std::string(cell) + "'", line_no,
                          col);
    }
    return v;
}

}  // namespace detail

inline void validate(const ExperimentConfig& cfg) {
    if (cfg.methods.empty()) throw config_error("config: no methods requested");
    for (std::size_t i = 0; i < cfg.methods.size(); ++i) {
        const std::string& m = cfg.methods[i];
        if (!is_known_method(m)) throw config_error("config: unknown method '" + m + "'");
        for (std::size_t j = i + 1; j < cfg.methods.size(); ++j) {
            if (cfg.methods[j] == m) {
                throw config_error("config: method '" + m + "' listed twice");
            }
        }
    }
    if (cfg.k_list.empty()) throw config_error("config: empty k list");
    for (std::size_t k : cfg.k_list) {
        if (k < 1) throw config_error("config: k must be >= 1");
    }
    if (cfg.seed_list.empty() && cfg.seeds < 1) {
        throw config_error("config: need at least one seed");
    }
    for (double f : cfg.chain_fractions) {
        if (!(f > 0.0) || f > 1.0) {
            throw config_error("config: chain fraction " + detail::fmt_fraction(f) +
                               " outside (0, 1]");
        }
    }
}

/// Expands "aapp-mc" into one id per chain fraction ("aapp-mc-0.05", ...);
/// all other names pass through unchanged, order preserved.
inline std::vector<std::string> expand_methods(const std::vector<std::string>& methods,
                                               const std::vector<double>& fractions) {
    std::vector<std::string> ids;
    for (const std::string& m : methods) {
        if (m == "aapp-mc") {
            if (fractions.empty()) {
                throw config_error("config: aapp-mc requested but no chain fractions");
            }
            for (double f : fractions) {
                ids.push_back(std::string(kMcPrefix) + detail::fmt_fraction(f));
            }
        } else {
            ids.push_back(m);
        }
    }
    return ids;
}

/// Dispatches an expanded method id to its initializer.
inline ArchetypeSet run_init(std::string_view method_id, const Matrix& x, std::size_t k,
                             RngStream& rng) {
    if (method_id == "uniform") return init_uniform(x, k, rng);
    if (method_id == "furthest-first") return init_furthest_first(x, k, rng);
    if (method_id == "furthest-sum") return init_furthest_sum(x, k, rng);
    if (method_id == "aapp") return init_aapp(x, k, rng);
    if (method_id == "kmeanspp") return init_kmeanspp(x, k, rng);
    if (method_id.starts_with(kMcPrefix)) {
        const std::string_view suffix = method_id.substr(kMcPrefix.size());
        double f = 0.0;
        const auto [ptr, ec] = std::from_chars(suffix.data(), suffix.data() + suffix.size(), f);
        if (ec != std::errc{} || ptr != suffix.data() + suffix.size()) {
            throw config_error("bad chain fraction in method id '" +
                               std::string(method_id) + "'");
        }
        ChainConfig chain;
        chain.fraction = f;
        return init_aapp_mc(x, k, chain, rng);
    }
    throw config_error("unknown method id '" + std::string(method_id) + "'");
}

/// Per-cell stream seed: mixes the base seed with the method id, k, and seed
/// index so every cell owns an independent, reproducible stream.
inline std::uint64_t cell_seed(std::uint64_t base, std::string_view method_id,
                               std::size_t k, std::uint64_t seed_index) {
    std::uint64_t h = hash_mix(base, fnv1a64(method_id));
    h = hash_mix(h, static_cast<std::uint64_t>(k));
    return hash_mix(h, seed_index);
}

/// Runs the full grid serially in method-major, then k, then seed order.
/// A cell that throws contributes one "error" record instead of its trace;
/// the rest of the grid is unaffected.
inline std::vector<ResultRecord> run_grid(const ExperimentConfig& cfg, const Matrix& x) {
    validate(cfg);
    const std::vector<std::string> ids = expand_methods(cfg.methods, cfg.chain_fractions);

    std::vector<std::uint64_t> seeds = cfg.seed_list;
    if (seeds.empty()) {
        seeds.resize(cfg.seeds);
        for (std::size_t i = 0; i < cfg.seeds; ++i) seeds[i] = i;
    }

    std::vector<ResultRecord> out;
    out.reserve(ids.size() * cfg.k_list.size() * seeds.size() * (cfg.iters + 1));
    for (const std::string& id : ids) {
        for (std::size_t k : cfg.k_list) {
            for (std::uint64_t s : seeds) {
                ResultRecord base;
                base.dataset = cfg.dataset_id;
                base.method = id;
                base.k = k;
                base.seed = s;
                try {
                    RngStream rng(cell_seed(cfg.base_seed, id, k, s));
                    const auto t0 = std::chrono::steady_clock::now();
                    const ArchetypeSet z0 = run_init(id, x, k, rng);
                    const auto t1 = std::chrono::steady_clock::now();
                    const FitResult fr = fit(x, z0, cfg.iters);
                    base.init_time_s = std::chrono::duration<double>(t1 - t0).count();
                    base.iter_time_s = fr.trace.iter_time;
                    if (cfg.omit_times) base.init_time_s = base.iter_time_s = 0.0;
                    if (z0.degenerate_fallback) base.flags = "degenerate-fallback";
                    for (const auto& [stage, m] : fr.trace.stage_mse) {
                        ResultRecord rec = base;
                        rec.stage = stage;
                        rec.mse = m;
                        out.push_back(std::move(rec));
                    }
                } catch (const error& e) {
                    base.stage = "error";
                    base.mse = std::nan("");
                    base.init_time_s = base.iter_time_s = 0.0;
                    base.flags = "error:" + detail::sanitize_cell(e.what());
                    out.push_back(std::move(base));
                }
            }
        }
    }
    return out;
}

inline void write_records(std::ostream& os, const std::vector<ResultRecord>& records) {
    os << kRecordsHeader << '\n';
    for (const ResultRecord& r : records) {
        os << detail::sanitize_cell(r.dataset) << ',' << r.method << ',' << r.k << ','
           << r.seed << ',' << r.stage << ',' << detail::fmt_double(r.mse) << ','
           << detail::fmt_double(r.init_time_s) << ','
           << detail::fmt_double(r.iter_time_s) << ',' << r.flags << '\n';
    }
}

inline void write_records(const std::string& path,
                          const std::vector<ResultRecord>& records) {
    std::ofstream os(path);
    if (!os) throw input_error("cannot write '" + path + "'");
    write_records(os, records);
}

inline std::vector<ResultRecord> read_records(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw parse_error("records: empty file", 1, 0);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kRecordsHeader) throw parse_error("records: wrong header", 1, 0);
    std::vector<ResultRecord> records;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = detail::split_line(line, ',');
        if (cells.size() != 9) {
            throw parse_error("records: expected 9 cells, got " +
                                  std::to_string(cells.size()),
                              line_no, cells.size());
        }
        ResultRecord r;
        r.dataset = std::string(cells[0]);
        r.method = std::string(cells[1]);
        r.k = detail::parse_record_uint(cells[2], line_no, 3);
        r.seed = detail::parse_record_uint(cells[3], line_no, 4);
        r.stage = std::string(cells[4]);
        r.mse = detail::parse_record_double(cells[5], line_no, 6);
        r.init_time_s = detail::parse_record_double(cells[6], line_no, 7);
        r.iter_time_s = detail::parse_record_double(cells[7], line_no, 8);
        r.flags = std::string(cells[8]);
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<ResultRecord> read_records(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw input_error("cannot open '" + path + "'");
    return read_records(is);
}

/// Linear-interpolation quantile of an ascending sample (R type 7).
inline double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw input_error("quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw input_error("quantile level outside [0, 1]");
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

struct QuantileRow {
    std::string dataset;
    std::string method;
    std::size_t k = 0;
    std::string stage;
    std::size_t count = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

/// Per-(dataset, method, k, stage) seed quantiles, groups in first-seen
/// order. Error records are excluded; cells that errored entirely are
/// reported on `warn` and skipped.
inline std::vector<QuantileRow> aggregate_quantiles(
    const std::vector<ResultRecord>& records, std::ostream& warn = std::cerr) {
    std::vector<QuantileRow> rows;
    std::vector<std::vector<double>> groups;
    auto find_group = [&](const ResultRecord& r) -> std::vector<double>& {
        for (std::size_t g = 0; g < rows.size(); ++g) {
            if (rows[g].k == r.k && rows[g].stage == r.stage &&
                rows[g].method == r.method && rows[g].dataset == r.dataset) {
                return groups[g];
            }
        }
        rows.push_back({r.dataset, r.method, r.k, r.stage, 0, 0.0, 0.0, 0.0});
        groups.emplace_back();
        return groups.back();
    };
    for (const ResultRecord& r : records) {
        if (r.stage == "error" || !std::isfinite(r.mse)) {
            warn << "aggregate: skipping error record (" << r.dataset << ", " << r.method
                 << ", k=" << r.k << ", seed=" << r.seed << ")\n";
            continue;
        }
        find_group(r).push_back(r.mse);
    }
    for (std::size_t g = 0; g < rows.size(); ++g) {
        std::sort(groups[g].begin(), groups[g].end());
        rows[g].count = groups[g].size();
        rows[g].q25 = quantile_sorted(groups[g], 0.25);
        rows[g].median = quantile_sorted(groups[g], 0.50);
        rows[g].q75 = quantile_sorted(groups[g], 0.75);
    }
    return rows;
}

inline void write_quantiles(std::ostream& os, const std::vector<QuantileRow>& rows) {
    os << "dataset,method,k,stage,count,median,q25,q75\n";
    for (const QuantileRow& r : rows) {
        os << detail::sanitize_cell(r.dataset) << ',' << r.method << ',' << r.k << ','
           << r.stage << ',' << r.count << ',' << detail::fmt_double(r.median) << ','
           << detail::fmt_double(r.q25) << ',' << detail::fmt_double(r.q75) << '\n';
    }
}

enum class WinStat { best, median };
enum class WinStage { initialization, overall };

struct WinCount {
    std::string method;
    std::size_t k = 0;
    std::size_t wins = 0;
    std::size_t ties = 0;
};

inline constexpr double kWinTieTol = 1e-12;

/// Counts, per (method, k), how often the method attains the lowest score
/// across datasets. `initialization` scores the init-stage MSE, `overall`
/// each seed's best MSE across all stages; `best` takes the per-cell
/// minimum over seeds and `median` the per-cell median. Chain-sampling
/// variants (aapp-mc-*) are excluded. Scores within 1e-12 of the minimum
/// all win and are flagged as ties.
inline std::vector<WinCount> win_table(const std::vector<ResultRecord>& records,
                                       WinStat stat, WinStage stage) {
    std::vector<std::string> methods;
    std::vector<std::size_t> ks;
    std::vector<std::string> datasets;
    auto note = [](auto& list, const auto& v) {
        if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
    };
    for (const ResultRecord& r : records) {
        if (r.method.starts_with(kMcPrefix)) continue;
        if (r.stage == "error" || !std::isfinite(r.mse)) continue;
        note(methods, r.method);
        note(ks, r.k);
        note(datasets, r.dataset);
    }
    if (methods.empty()) throw config_error("win_table: no usable records");

    std::vector<WinCount> table;
    for (const std::string& m : methods) {
        for (std::size_t k : ks) table.push_back({m, k, 0, 0});
    }
    auto cell = [&](const std::string& m, std::size_t k) -> WinCount& {
        for (WinCount& c : table) {
            if (c.k == k && c.method == m) return c;
        }
        throw config_error("win_table: internal lookup failure");
    };

    for (const std::string& ds : datasets) {
        for (std::size_t k : ks) {
            std::vector<double> scores(methods.size());
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                // seed → score of this (dataset, method, k) cell
                std::map<std::uint64_t, double> per_seed;
                for (const ResultRecord& r : records) {
                    if (r.dataset != ds || r.method != methods[mi] || r.k != k) continue;
                    if (r.stage == "error" || !std::isfinite(r.mse)) continue;
                    if (stage == WinStage::initialization && r.stage != "init") continue;
                    auto [it, fresh] = per_seed.try_emplace(r.seed, r.mse);
                    if (!fresh) it->second = std::min(it->second, r.mse);
                }
                if (per_seed.empty()) {
                    throw config_error("win_table: method '" + methods[mi] +
                                       "' has no records for dataset '" + ds + "', k=" +
                                       std::to_string(k));
                }
                std::vector<double> vals;
                vals.reserve(per_seed.size());
                for (const auto& [seed, v] : per_seed) vals.push_back(v);
                std::sort(vals.begin(), vals.end());
                scores[mi] = stat == WinStat::best ? vals.front()
                                                   : quantile_sorted(vals, 0.5);
            }
            const double lowest = *std::min_element(scores.begin(), scores.end());
            std::size_t winners = 0;
            for (double s : scores) winners += (s <= lowest + kWinTieTol);
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                if (scores[mi] <= lowest + kWinTieTol) {
                    WinCount& c = cell(methods[mi], k);
                    c.wins += 1;
                    if (winners > 1) c.ties += 1;
                }
            }
        }
    }
    return table;
}

inline std::string_view win_stat_name(WinStat s) {
    return s == WinStat::best ? "best" : "median";
}

inline std::string_view win_stage_name(WinStage s) {
    return s == WinStage::initialization ? "initialization" : "overall";
}

/// Writes all four (stat × stage) tables into one CSV.
inline void write_win_tables(std::ostream& os, const std::vector<ResultRecord>& records) {
    os << "stat,stage,method,k,wins,ties\n";
    for (WinStat stat : {WinStat::best, WinStat::median}) {
        for (WinStage stage : {WinStage::initialization, WinStage::overall}) {
            for (const WinCount& c : win_table(records, stat, stage)) {
                os << win_stat_name(stat) << ',' << win_stage_name(stage) << ','
                   << c.method << ',' << c.k << ',' << c.wins << ',' << c.ties << '\n';
            }
        }
    }
}

}  // namespace aapp

#endif  // AAPP_BENCH_HPP
