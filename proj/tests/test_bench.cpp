#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aapp/bench.hpp"
#include "aapp/dataio.hpp"
#include "aapp/error.hpp"
#include "aapp/matrix.hpp"
#include "aapp/rng.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using aapp::ExperimentConfig;
using aapp::Matrix;
using aapp::ResultRecord;
using aapp::RngStream;

namespace {

Matrix small_dataset() {
    RngStream rng(601);
    return aapp::gen_synthetic(aapp::SyntheticShape::ring, 40, 2, rng, 0.05);
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.dataset_id = "ring-small";
    cfg.methods = {"uniform"};
    cfg.k_list = {3};
    cfg.iters = 10;
    cfg.seeds = 1;
    cfg.omit_times = true;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_config();
    cfg.methods = {};
    REQUIRE_THROWS_AS(aapp::validate(cfg), aapp::config_error);
    cfg.methods = {"uniform", "uniform"};
    REQUIRE_THROWS_AS(aapp::validate(cfg), aapp::config_error);
    cfg.methods = {"no-such-method"};
    REQUIRE_THROWS_AS(aapp::validate(cfg), aapp::config_error);

    cfg = small_config();
    cfg.k_list = {};
    REQUIRE_THROWS_AS(aapp::validate(cfg), aapp::config_error);
    cfg = small_config();
    cfg.k_list = {0};
    REQUIRE_THROWS_AS(aapp::validate(cfg), aapp::config_error);
    cfg = small_config();
    cfg.seeds = 0;
    REQUIRE_THROWS_AS(aapp::validate(cfg), aapp::config_error);
    cfg = small_config();
    cfg.chain_fractions = {0.5, 1.5};
    REQUIRE_THROWS_AS(aapp::validate(cfg), aapp::config_error);
    cfg.chain_fractions = {0.0};
    REQUIRE_THROWS_AS(aapp::validate(cfg), aapp::config_error);
    REQUIRE_NOTHROW(aapp::validate(small_config()));
}

TEST_CASE("expand_methods maps chain fractions to method ids") {
    const std::vector<std::string> methods{"uniform", "aapp-mc", "aapp"};
    const std::vector<double> fracs{0.05, 0.2};
    const auto ids = aapp::expand_methods(methods, fracs);
    REQUIRE(ids == std::vector<std::string>{"uniform", "aapp-mc-0.05", "aapp-mc-0.2",
                                            "aapp"});
    REQUIRE_THROWS_AS(aapp::expand_methods({"aapp-mc"}, {}), aapp::config_error);
}

TEST_CASE("one cell with ten iterations yields eleven records") {
    const Matrix x = small_dataset();
    const auto records = aapp::run_grid(small_config(), x);
    REQUIRE(records.size() == 11);
    REQUIRE(records[0].stage == "init");
    REQUIRE(records[10].stage == "iter-10");
    for (const auto& r : records) {
        REQUIRE(r.dataset == "ring-small");
        REQUIRE(r.method == "uniform");
        REQUIRE(r.k == 3);
        REQUIRE(r.seed == 0);
        REQUIRE(std::isfinite(r.mse));
        REQUIRE(r.mse >= 0.0);
    }
}

TEST_CASE("grid covers methods, ks, and seeds in order") {
    const Matrix x = small_dataset();
    ExperimentConfig cfg = small_config();
    cfg.methods = {"uniform", "aapp-mc"};
    cfg.chain_fractions = {0.05, 0.2};
    cfg.k_list = {2, 3};
    cfg.iters = 1;
    cfg.seeds = 2;
    const auto records = aapp::run_grid(cfg, x);
    // 3 expanded methods x 2 ks x 2 seeds x 2 stages
    REQUIRE(records.size() == 3 * 2 * 2 * 2);

    std::set<std::string> methods;
    for (const auto& r : records) methods.insert(r.method);
    REQUIRE(methods ==
            std::set<std::string>{"uniform", "aapp-mc-0.05", "aapp-mc-0.2"});

    // method-major, then k, then seed, then stage
    REQUIRE(records[0].method == "uniform");
    REQUIRE(records[0].k == 2);
    REQUIRE(records[0].seed == 0);
    REQUIRE(records[1].stage == "iter-1");
    REQUIRE(records[2].seed == 1);
    REQUIRE(records[4].k == 3);
    REQUIRE(records[8].method == "aapp-mc-0.05");
}

TEST_CASE("run_grid is deterministic end to end") {
    const Matrix x = small_dataset();
    ExperimentConfig cfg = small_config();
    cfg.methods = {"uniform", "furthest-sum", "aapp"};
    cfg.seeds = 3;
    cfg.iters = 2;
    const auto a = aapp::run_grid(cfg, x);
    const auto b = aapp::run_grid(cfg, x);
    std::ostringstream sa;
    std::ostringstream sb;
    aapp::write_records(sa, a);
    aapp::write_records(sb, b);
    REQUIRE(sa.str() == sb.str());
}

TEST_CASE("explicit seed list replaces the index range") {
    const Matrix x = small_dataset();
    ExperimentConfig cfg = small_config();
    cfg.iters = 0;
    cfg.seed_list = {7, 40000};
    const auto records = aapp::run_grid(cfg, x);
    REQUIRE(records.size() == 2);
    REQUIRE(records[0].seed == 7);
    REQUIRE(records[1].seed == 40000);
}

TEST_CASE("cell failures are isolated as error records") {
    const Matrix x = small_dataset();  // n = 40
    ExperimentConfig cfg = small_config();
    cfg.k_list = {3, 50};  // k = 50 > n must fail per cell
    cfg.iters = 2;
    cfg.seeds = 2;
    const auto records = aapp::run_grid(cfg, x);

    std::size_t good = 0;
    std::size_t bad = 0;
    for (const auto& r : records) {
        if (r.stage == "error") {
            ++bad;
            REQUIRE(r.k == 50);
            REQUIRE(std::isnan(r.mse));
            REQUIRE(r.flags.rfind("error:", 0) == 0);
            REQUIRE(r.flags.find(',') == std::string::npos);
        } else {
            ++good;
            REQUIRE(r.k == 3);
        }
    }
    REQUIRE(bad == 2);        // one error record per failed cell
    REQUIRE(good == 2 * 3);   // surviving cells keep their full traces
}

TEST_CASE("degenerate data is flagged, not failed") {
    Matrix x(10, 2);
    for (double& v : x.values()) v = 1.0;  // identical points
    ExperimentConfig cfg = small_config();
    cfg.methods = {"aapp"};
    cfg.k_list = {2};
    cfg.iters = 1;
    const auto records = aapp::run_grid(cfg, x);
    REQUIRE(records.size() == 2);
    for (const auto& r : records) {
        REQUIRE(r.stage != "error");
        REQUIRE(r.flags == "degenerate-fallback");
    }
}

TEST_CASE("cell_seed separates methods, ks, and seed indices") {
    std::set<std::uint64_t> seen;
    for (const std::string m : {"uniform", "aapp"}) {
        for (std::size_t k : {2, 3}) {
            for (std::uint64_t s : {0, 1}) {
                seen.insert(aapp::cell_seed(1, m, k, s));
            }
        }
    }
    REQUIRE(seen.size() == 8);
    REQUIRE(aapp::cell_seed(1, "aapp", 2, 0) == aapp::cell_seed(1, "aapp", 2, 0));
}

TEST_CASE("records round-trip through CSV") {
    const Matrix x = small_dataset();
    ExperimentConfig cfg = small_config();
    cfg.methods = {"uniform", "aapp"};
    cfg.iters = 1;
    cfg.seeds = 2;
    cfg.omit_times = false;
    const auto records = aapp::run_grid(cfg, x);

    std::ostringstream os;
    aapp::write_records(os, records);
    std::istringstream is(os.str());
    const auto back = aapp::read_records(is);

    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        REQUIRE(back[i].dataset == records[i].dataset);
        REQUIRE(back[i].method == records[i].method);
        REQUIRE(back[i].k == records[i].k);
        REQUIRE(back[i].seed == records[i].seed);
        REQUIRE(back[i].stage == records[i].stage);
        REQUIRE(back[i].mse == records[i].mse);  // %.17g round-trips exactly
        REQUIRE(back[i].init_time_s == records[i].init_time_s);
        REQUIRE(back[i].iter_time_s == records[i].iter_time_s);
    }
}

TEST_CASE("read_records rejects malformed input") {
    std::istringstream bad_header("nope\n1,2,3\n");
    REQUIRE_THROWS_AS(aapp::read_records(bad_header), aapp::parse_error);

    std::istringstream short_row(std::string(aapp::kRecordsHeader) + "\nd,m,1,0,init\n");
    REQUIRE_THROWS_AS(aapp::read_records(short_row), aapp::parse_error);

    std::istringstream bad_num(std::string(aapp::kRecordsHeader) +
                               "\nd,m,x,0,init,0.5,0,0,\n");
    REQUIRE_THROWS_AS(aapp::read_records(bad_num), aapp::parse_error);
}

TEST_CASE("quantile_sorted matches the reference on the pinned cases") {
    const std::vector<double> tiny{1.0, 2.0, 3.0};
    REQUIRE(aapp::quantile_sorted(tiny, 0.5) == 2.0);
    const std::vector<double> one{4.2};
    REQUIRE(aapp::quantile_sorted(one, 0.25) == 4.2);
    REQUIRE(aapp::quantile_sorted(one, 0.75) == 4.2);

    RngStream rng(607);
    std::vector<double> sample = testutil::random_vector(rng, 50, 0.0, 10.0);
    std::sort(sample.begin(), sample.end());
    for (double p : {0.25, 0.5, 0.75, 0.0, 1.0}) {
        REQUIRE(aapp::quantile_sorted(sample, p) ==
                Catch::Approx(oracle::quantile_type7(sample, p)).margin(1e-12));
    }
    REQUIRE_THROWS_AS(aapp::quantile_sorted(std::vector<double>{}, 0.5),
                      aapp::input_error);
    REQUIRE_THROWS_AS(aapp::quantile_sorted(tiny, 1.5), aapp::input_error);
}

TEST_CASE("aggregate_quantiles groups by dataset, method, k, and stage") {
    std::vector<ResultRecord> records;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        ResultRecord r;
        r.dataset = "d1";
        r.method = "uniform";
        r.k = 2;
        r.seed = seed;
        r.stage = "init";
        r.mse = static_cast<double>(seed + 1);  // 1, 2, 3
        records.push_back(r);
    }
    ResultRecord err = records[0];
    err.stage = "error";
    err.mse = std::nan("");
    records.push_back(err);

    std::ostringstream warn;
    const auto rows = aapp::aggregate_quantiles(records, warn);
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0].count == 3);
    REQUIRE(rows[0].median == 2.0);
    REQUIRE(rows[0].q25 == 1.5);
    REQUIRE(rows[0].q75 == 2.5);
    REQUIRE(warn.str().find("skipping") != std::string::npos);
}

TEST_CASE("aggregate matches the oracle on a real grid") {
    const Matrix x = small_dataset();
    ExperimentConfig cfg = small_config();
    cfg.methods = {"uniform", "kmeanspp"};
    cfg.iters = 2;
    cfg.seeds = 7;
    const auto records = aapp::run_grid(cfg, x);
    std::ostringstream warn;
    const auto rows = aapp::aggregate_quantiles(records, warn);
    REQUIRE(rows.size() == 2 * 3);  // 2 methods x 3 stages
    for (const auto& row : rows) {
        std::vector<double> vals;
        for (const auto& r : records) {
            if (r.method == row.method && r.stage == row.stage && r.k == row.k) {
                vals.push_back(r.mse);
            }
        }
        REQUIRE(row.count == vals.size());
        REQUIRE(row.median ==
                Catch::Approx(oracle::quantile_type7(vals, 0.5)).margin(1e-12));
        REQUIRE(row.q25 ==
                Catch::Approx(oracle::quantile_type7(vals, 0.25)).margin(1e-12));
        REQUIRE(row.q75 ==
                Catch::Approx(oracle::quantile_type7(vals, 0.75)).margin(1e-12));
    }
}

namespace {

ResultRecord make_record(const std::string& dataset, const std::string& method,
                         std::size_t k, std::uint64_t seed, const std::string& stage,
                         double mse) {
    ResultRecord r;
    r.dataset = dataset;
    r.method = method;
    r.k = k;
    r.seed = seed;
    r.stage = stage;
    r.mse = mse;
    return r;
}

}  // namespace

TEST_CASE("win_table counts a strict winner once per dataset and k") {
    std::vector<ResultRecord> records;
    records.push_back(make_record("d1", "alpha", 2, 0, "init", 1.0));
    records.push_back(make_record("d1", "beta", 2, 0, "init", 2.0));
    const auto table = aapp::win_table(records, aapp::WinStat::best,
                                       aapp::WinStage::initialization);
    REQUIRE(table.size() == 2);
    REQUIRE(table[0].method == "alpha");
    REQUIRE(table[0].wins == 1);
    REQUIRE(table[0].ties == 0);
    REQUIRE(table[1].wins == 0);
}

TEST_CASE("win_table counts exact ties for every tied method") {
    std::vector<ResultRecord> records;
    records.push_back(make_record("d1", "alpha", 2, 0, "init", 1.0));
    records.push_back(make_record("d1", "beta", 2, 0, "init", 1.0));
    records.push_back(make_record("d1", "gamma", 2, 0, "init", 1.5));
    const auto table = aapp::win_table(records, aapp::WinStat::best,
                                       aapp::WinStage::initialization);
    REQUIRE(table[0].wins == 1);
    REQUIRE(table[0].ties == 1);
    REQUIRE(table[1].wins == 1);
    REQUIRE(table[1].ties == 1);
    REQUIRE(table[2].wins == 0);
    REQUIRE(table[2].ties == 0);
}

TEST_CASE("win_table hand-computed over three planted datasets") {
    // per dataset, two seeds; alpha init {1, 3}, beta init {2, 2}
    //   best(init):   alpha 1 < beta 2   -> alpha wins every dataset
    //   median(init): alpha 2 = beta 2   -> tie, both win every dataset
    // overall stage uses each seed's best across stages; alpha's iter-1
    // improves to {0.5, 2.5}, beta stays {2, 2}
    //   best(overall):   alpha 0.5 -> alpha
    //   median(overall): alpha 1.5 < beta 2 -> alpha
    std::vector<ResultRecord> records;
    for (const std::string ds : {"d1", "d2", "d3"}) {
        records.push_back(make_record(ds, "alpha", 2, 0, "init", 1.0));
        records.push_back(make_record(ds, "alpha", 2, 0, "iter-1", 0.5));
        records.push_back(make_record(ds, "alpha", 2, 1, "init", 3.0));
        records.push_back(make_record(ds, "alpha", 2, 1, "iter-1", 2.5));
        records.push_back(make_record(ds, "beta", 2, 0, "init", 2.0));
        records.push_back(make_record(ds, "beta", 2, 0, "iter-1", 2.0));
        records.push_back(make_record(ds, "beta", 2, 1, "init", 2.0));
        records.push_back(make_record(ds, "beta", 2, 1, "iter-1", 2.0));
    }

    auto get = [](const std::vector<aapp::WinCount>& t, const std::string& m) {
        for (const auto& c : t) {
            if (c.method == m) return c;
        }
        throw std::runtime_error("method missing");
    };

    auto best_init = aapp::win_table(records, aapp::WinStat::best,
                                     aapp::WinStage::initialization);
    REQUIRE(get(best_init, "alpha").wins == 3);
    REQUIRE(get(best_init, "beta").wins == 0);

    auto median_init = aapp::win_table(records, aapp::WinStat::median,
                                       aapp::WinStage::initialization);
    REQUIRE(get(median_init, "alpha").wins == 3);
    REQUIRE(get(median_init, "alpha").ties == 3);
    REQUIRE(get(median_init, "beta").wins == 3);
    REQUIRE(get(median_init, "beta").ties == 3);

    auto best_overall =
        aapp::win_table(records, aapp::WinStat::best, aapp::WinStage::overall);
    REQUIRE(get(best_overall, "alpha").wins == 3);
    REQUIRE(get(best_overall, "beta").wins == 0);

    auto median_overall =
        aapp::win_table(records, aapp::WinStat::median, aapp::WinStage::overall);
    REQUIRE(get(median_overall, "alpha").wins == 3);
    REQUIRE(get(median_overall, "beta").wins == 0);
}

TEST_CASE("win_table excludes chain-sampling variants") {
    std::vector<ResultRecord> records;
    records.push_back(make_record("d1", "alpha", 2, 0, "init", 2.0));
    records.push_back(make_record("d1", "aapp-mc-0.05", 2, 0, "init", 0.5));
    const auto table = aapp::win_table(records, aapp::WinStat::best,
                                       aapp::WinStage::initialization);
    REQUIRE(table.size() == 1);
    REQUIRE(table[0].method == "alpha");
    REQUIRE(table[0].wins == 1);
}

TEST_CASE("win_table demands full method coverage") {
    std::vector<ResultRecord> records;
    records.push_back(make_record("d1", "alpha", 2, 0, "init", 1.0));
    records.push_back(make_record("d1", "beta", 2, 0, "init", 2.0));
    records.push_back(make_record("d2", "alpha", 2, 0, "init", 1.0));
    // beta missing on d2
    REQUIRE_THROWS_AS(
        aapp::win_table(records, aapp::WinStat::best, aapp::WinStage::initialization),
        aapp::config_error);
}

TEST_CASE("win table CSV carries all four modes") {
    std::vector<ResultRecord> records;
    records.push_back(make_record("d1", "alpha", 2, 0, "init", 1.0));
    records.push_back(make_record("d1", "alpha", 2, 0, "iter-1", 0.5));
    records.push_back(make_record("d1", "beta", 2, 0, "init", 2.0));
    records.push_back(make_record("d1", "beta", 2, 0, "iter-1", 0.4));
    std::ostringstream os;
    aapp::write_win_tables(os, records);
    const std::string out = os.str();
    REQUIRE(out.find("stat,stage,method,k,wins,ties") == 0);
    REQUIRE(out.find("best,initialization,alpha,2,1,0") != std::string::npos);
    REQUIRE(out.find("best,overall,beta,2,1,0") != std::string::npos);
    REQUIRE(out.find("median,initialization") != std::string::npos);
    REQUIRE(out.find("median,overall") != std::string::npos);
}
