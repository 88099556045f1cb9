// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// when any hard criterion fails; the soft criterion only reports.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "fixtures.hpp"
#include "json.hpp"
#include "omvcdr/cli.hpp"
#include "omvcdr/metrics.hpp"
#include "omvcdr/svd.hpp"
#include "oracle.hpp"

using namespace omvcdr;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skip, soft_fail };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) {
    return {ok ? Status::pass : Status::fail, std::move(detail)};
}

std::string num(double x) {
    std::ostringstream ss;
    ss << std::setprecision(4) << x;
    return ss.str();
}

double relative_gap(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool trace_non_increasing(double start, const std::vector<double>& trace) {
    double prev = start;
    for (double f : trace) {
        if (f > prev + monotone_slack(prev)) return false;
        prev = f;
    }
    return true;
}

bool substeps_non_increasing(double start, const std::vector<SubstepObjectives>& steps) {
    double prev = start;
    for (const auto& s : steps)
        for (double f : {s.after_embeddings, s.after_factors, s.after_partition, s.after_weights}) {
            if (f > prev + monotone_slack(prev)) return false;
            prev = f;
        }
    return true;
}

// 1
Outcome monotone_convergence() {
    const auto start = std::chrono::steady_clock::now();
    const double lambdas[] = {0.25, 1.0, 4.0};
    int bad_trace = 0;
    int bad_steps = 0;
    std::mt19937_64 rng(101);
    for (int i = 0; i < 20; ++i) {
        MultiViewDataset ds;
        if (i % 2 == 0) {
            ds = generate_synthetic({500, 5, {20, 30, 40}, 2.0 + i, 1.0, static_cast<std::uint64_t>(i)});
        } else {
            ds = testing::random_dataset(500, {20, 30, 40}, rng);
        }
        SolverConfig cfg;
        cfg.k = 5;
        cfg.lambda = lambdas[i % 3];
        cfg.seed = static_cast<std::uint64_t>(i);
        cfg.track_substeps = true;
        const FitResult r = fit(ds, cfg);
        if (!trace_non_increasing(r.initial_objective, r.objective_trace)) ++bad_trace;
        if (!substeps_non_increasing(r.initial_objective, r.substep_trace)) ++bad_steps;
    }
    const double t = seconds_since(start);
    return verdict(bad_trace == 0 && bad_steps == 0 && t < 120.0,
                   "20 fits, trace violations " + std::to_string(bad_trace) + ", sub-step violations " +
                       std::to_string(bad_steps) + ", " + num(t) + " s");
}

// 2
Outcome oracle_equivalence() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(102);
    std::uniform_int_distribution<int> pick_k(2, 6);
    std::uniform_int_distribution<int> pick_m(1, 3);
    std::uniform_int_distribution<std::size_t> pick_n(20, 200);
    int label_mismatch = 0;
    double worst_alpha = 0.0;
    double worst_objective = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int k = pick_k(rng);
        const std::size_t n = pick_n(rng);
        const std::vector<std::size_t> dims{static_cast<std::size_t>(3 * k), static_cast<std::size_t>(3 * k + 4)};
        const double lambda = std::pow(2.0, static_cast<int>(trial % 7) - 3);
        testing::RandomState rs = testing::random_state(n, dims, k, pick_m(rng), lambda, rng);
        if (trial % 2 == 1) {
            // A state reached by the solver rather than drawn at random.
            SolverConfig cfg = rs.config;
            cfg.max_iters = 2;
            cfg.seed = static_cast<std::uint64_t>(trial);
            rs.state = fit(rs.dataset, cfg).state;
        }

        worst_objective = std::max(worst_objective,
                                   relative_gap(objective(rs.state, rs.dataset, rs.config),
                                                oracle::naive_objective(rs.state, rs.dataset, rs.config)));

        const Partition expected = oracle::naive_partition_step(rs.state);
        update_partition(rs.state);
        if (!(rs.state.partition == expected)) ++label_mismatch;

        refresh_cluster_sums(rs.state);
        const Weights naive = oracle::naive_weights(rs.state);
        update_weights(rs.state);
        for (std::size_t p = 0; p < naive.alpha.size(); ++p)
            worst_alpha = std::max(worst_alpha,
                                   std::abs(rs.state.weights.alpha[p] - naive.alpha[p]) / naive.alpha[p]);

        worst_objective = std::max(worst_objective,
                                   relative_gap(objective(rs.state, rs.dataset, rs.config),
                                                oracle::naive_objective(rs.state, rs.dataset, rs.config)));
    }
    const double t = seconds_since(start);
    return verdict(label_mismatch == 0 && worst_alpha <= 1e-9 && worst_objective <= 1e-8 && t < 120.0,
                   "50 states, label mismatches " + std::to_string(label_mismatch) + ", max α rel err " +
                       num(worst_alpha) + ", max objective rel err " + num(worst_objective) + ", " + num(t) +
                       " s");
}

// 3
Outcome procrustes_optimality() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(103);
    std::uniform_int_distribution<std::size_t> pick_cols(1, 15);
    std::uniform_int_distribution<std::size_t> pick_extra(0, 25);
    double worst_trace = 0.0;
    double worst_orth = 0.0;
    int beaten = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t cols = pick_cols(rng);
        const std::size_t rows = cols + pick_extra(rng);
        const MatrixD b = testing::random_matrix(rows, cols, rng);
        const MatrixD h = procrustes_factor(b);
        const double value = trace(matmul_at_b(h, b));
        worst_trace = std::max(worst_trace, std::abs(value - oracle::nuclear_norm(b)));
        worst_orth = std::max(worst_orth, orthonormality_error(h));
        for (int c = 0; c < 1000; ++c) {
            const MatrixD q = testing::random_orthonormal(rows, cols, rng);
            if (trace(matmul_at_b(q, b)) > value) ++beaten;
        }
    }
    const double t = seconds_since(start);
    return verdict(worst_trace <= 1e-8 && worst_orth <= 1e-10 && beaten == 0 && t < 60.0,
                   "100 matrices, max |Tr - Σσ| " + num(worst_trace) + ", max orthonormality err " +
                       num(worst_orth) + ", candidates beating H " + std::to_string(beaten) + ", " + num(t) +
                       " s");
}

// 4
Outcome weights_optimality() {
    std::mt19937_64 rng(104);
    std::uniform_real_distribution<double> log_r(-3.0, 3.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> r(3);
        for (double& x : r) x = std::pow(10.0, log_r(rng));
        const double closed = oracle::simplex_value(weights_from_scatter(r).alpha, r);
        const double grid = oracle::simplex_value(oracle::simplex_grid_min(r, 1e-3).alpha, r);
        worst = std::max(worst, closed - grid);
    }
    return verdict(worst <= 1e-6, "100 vectors, max (closed form - grid min) " + num(worst));
}

// 5
Outcome embedding_stationarity() {
    std::mt19937_64 rng(105);
    std::uniform_int_distribution<std::size_t> pick_n(20, 60);
    std::uniform_int_distribution<int> pick_k(2, 4);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int k = pick_k(rng);
        const std::vector<std::size_t> dims{static_cast<std::size_t>(2 * k + 1), static_cast<std::size_t>(2 * k + 3)};
        auto rs = testing::random_state(pick_n(rng), dims, k, 2, std::pow(2.0, trial % 5 - 2), rng);
        const SolverState before = rs.state;
        update_embeddings(rs.state, rs.dataset, rs.config, [&](std::size_t p, std::size_t i, const MatrixD& z) {
            const double h = 1e-5;
            std::vector<double> point(z.col(i).begin(), z.col(i).end());
            double norm_sq = 0.0;
            for (std::size_t r = 0; r < point.size(); ++r) {
                auto plus = point;
                auto minus = point;
                plus[r] += h;
                minus[r] -= h;
                const double g = (oracle::column_objective(before, rs.dataset, rs.config, p, i, z, plus) -
                                  oracle::column_objective(before, rs.dataset, rs.config, p, i, z, minus)) /
                                 (2.0 * h);
                norm_sq += g * g;
            }
            worst = std::max(worst, std::sqrt(norm_sq));
        });
    }
    return verdict(worst < 1e-6, "20 instances, max finite-difference gradient norm " + num(worst));
}

// 6
Outcome metric_oracles() {
    std::mt19937_64 rng(106);
    int acc_mismatch = 0;
    int f_mismatch = 0;
    bool nmi_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        std::uniform_int_distribution<int> pick_kt(1, 6);
        std::uniform_int_distribution<int> pick_kp(1, 6);
        std::uniform_int_distribution<std::size_t> pick_n(1, 300);
        const std::size_t n = pick_n(rng);
        std::uniform_int_distribution<int> yt(0, pick_kt(rng) - 1);
        std::uniform_int_distribution<int> yp(0, pick_kp(rng) - 1);
        std::vector<int> t(n);
        std::vector<int> p(n);
        for (auto& v : t) v = yt(rng);
        for (auto& v : p) v = yp(rng);
        if (accuracy(t, p) != oracle::exhaustive_accuracy(t, p)) ++acc_mismatch;
        if (fscore(t, p) != oracle::pair_enumeration_fscore(t, p)) ++f_mismatch;
        const double score = nmi(t, p);
        if (!(score >= 0.0 && score <= 1.0)) nmi_ok = false;
        if (std::abs(nmi(t, t) - 1.0) > 1e-12) nmi_ok = false;
    }
    const std::vector<int> a{0, 0, 1, 1};
    const std::vector<int> b{0, 1, 0, 1};
    if (nmi(a, b) != 0.0) nmi_ok = false;
    return verdict(acc_mismatch == 0 && f_mismatch == 0 && nmi_ok,
                   "200 pairs, accuracy mismatches " + std::to_string(acc_mismatch) + ", fscore mismatches " +
                       std::to_string(f_mismatch) + ", nmi checks " + (nmi_ok ? "ok" : "failed"));
}

// 7
Outcome end_to_end_recovery() {
    const auto start = std::chrono::steady_clock::now();
    const MultiViewDataset ds = generate_synthetic({500, 5, {20, 30, 40}, 100.0, 0.01, 7});
    double worst = 1.0;
    for (double lambda : {0.25, 1.0, 4.0})
        for (Variant v : {Variant::full, Variant::omvc, Variant::omvcdr2, Variant::equal_alpha}) {
            SolverConfig cfg;
            cfg.k = 5;
            cfg.lambda = lambda;
            const FitResult r = fit(ds, cfg, v);
            worst = std::min(worst, accuracy(*ds.labels, r.partition().labels));
        }
    const double t = seconds_since(start);
    return verdict(worst >= 0.99 && t < 30.0, "12 fits, min ACC " + num(worst) + ", " + num(t) + " s");
}

// 8
Outcome ablation_tendency() {
    double full = 0.0;
    double omvc = 0.0;
    double equal = 0.0;
    const int seeds = 10;
    for (int s = 0; s < seeds; ++s) {
        const MultiViewDataset ds =
            generate_synthetic({500, 5, {10, 40, 160}, 6.0, 1.5, static_cast<std::uint64_t>(1000 + s)});
        SolverConfig cfg;
        cfg.k = 5;
        cfg.seed = static_cast<std::uint64_t>(s);
        full += accuracy(*ds.labels, fit(ds, cfg, Variant::full).partition().labels);
        omvc += accuracy(*ds.labels, fit(ds, cfg, Variant::omvc).partition().labels);
        equal += accuracy(*ds.labels, fit(ds, cfg, Variant::equal_alpha).partition().labels);
    }
    full /= seeds;
    omvc /= seeds;
    equal /= seeds;
    const bool ok = full >= omvc && full >= equal;
    return {ok ? Status::pass : Status::soft_fail,
            "mean ACC full " + num(full) + ", omvc " + num(omvc) + ", equal_alpha " + num(equal)};
}

// 9
Outcome linear_scaling() {
    const auto start = std::chrono::steady_clock::now();
    auto best_time = [](std::size_t n) {
        const MultiViewDataset ds = generate_synthetic({n, 5, {20, 40}, 10.0, 1.0, 9});
        SolverConfig cfg;
        cfg.k = 5;
        cfg.max_iters = 10;
        cfg.rel_tol = 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (int r = 0; r < 3; ++r) {
            const auto t0 = std::chrono::steady_clock::now();
            fit(ds, cfg);
            best = std::min(best, seconds_since(t0));
        }
        return best;
    };
    const double small = best_time(10000);
    const double large = best_time(20000);
    const double ratio = large / small;
    const double t = seconds_since(start);
    return verdict(ratio <= 2.5 && t < 300.0, "t(10000) " + num(small) + " s, t(20000) " + num(large) +
                                                  " s, ratio " + num(ratio) + ", " + num(t) + " s total");
}

// 10
Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / ("omvcdr_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ostringstream sink;
    auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
    const std::string data = (dir / "data").string();
    bool ok = run({"synth", "--n", "400", "--k", "4", "--view-dims", "15,25", "--separation", "5",
                   "--noise", "1", "--seed", "11", "--out", data}) == 0;
    for (const char* name : {"a", "b"})
        ok = ok && run({"fit", "--data", data + "/manifest.toml", "--k", "4", "--seed", "3", "--out",
                        (dir / (std::string(name) + ".json")).string()}) == 0;
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool same_labels = false;
    bool same_report = false;
    if (ok) {
        same_labels = slurp(dir / "a.labels.csv") == slurp(dir / "b.labels.csv") &&
                      !slurp(dir / "a.labels.csv").empty();
        auto a = nlohmann::ordered_json::parse(slurp(dir / "a.json"));
        auto b = nlohmann::ordered_json::parse(slurp(dir / "b.json"));
        a.erase("wall_time_seconds");
        b.erase("wall_time_seconds");
        same_report = a.dump() == b.dump();
    }
    fs::remove_all(dir);
    return verdict(ok && same_labels && same_report,
                   std::string("labels ") + (same_labels ? "identical" : "differ") + ", report " +
                       (same_report ? "identical" : "differs"));
}

// 11
Outcome handwritten() {
    const char* manifest = std::getenv("OMVCDR_HANDWRITTEN_MANIFEST");
    if (manifest == nullptr || !fs::exists(manifest)) {
        return {Status::skip, "set OMVCDR_HANDWRITTEN_MANIFEST to a dataset manifest to run"};
    }
    const MultiViewDataset ds = load_dataset(manifest);
    if (!ds.labels) return {Status::fail, "dataset has no labels"};
    double best = 0.0;
    double best_lambda = 0.0;
    for (double lambda : cli::default_lambda_grid()) {
        SolverConfig cfg;
        cfg.k = 10;
        cfg.lambda = lambda;
        const double acc = accuracy(*ds.labels, fit(ds, cfg).partition().labels);
        if (acc > best) {
            best = acc;
            best_lambda = lambda;
        }
    }
    return verdict(best >= 0.87, "best ACC " + num(best) + " at lambda " + num(best_lambda));
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 monotone convergence", monotone_convergence},
        {"2 oracle equivalence", oracle_equivalence},
        {"3 H-step optimality", procrustes_optimality},
        {"4 alpha-step optimality", weights_optimality},
        {"5 Z-step stationarity", embedding_stationarity},
        {"6 metric oracles", metric_oracles},
        {"7 end-to-end recovery", end_to_end_recovery},
        {"8 ablation tendency (soft)", ablation_tendency},
        {"9 linear scaling", linear_scaling},
        {"10 determinism", determinism},
        {"11 handwritten accuracy (optional)", handwritten},
    };
    int failures = 0;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const char* tag = "PASS";
        switch (o.status) {
            case Status::pass: tag = "PASS"; break;
            case Status::fail: tag = "FAIL"; ++failures; break;
            case Status::skip: tag = "SKIP"; break;
            case Status::soft_fail: tag = "SOFT-FAIL"; break;
        }
        std::cout << tag << "  " << name << ": " << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all hard criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
