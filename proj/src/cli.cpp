#include "omvcdr/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "omvcdr/dataset.hpp"
#include "omvcdr/metrics.hpp"
#include "omvcdr/report.hpp"
#include "omvcdr/solver.hpp"
#include "omvcdr/svd.hpp"

namespace omvcdr::cli {

namespace fs = std::filesystem;

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int e = -5; e <= 5; ++e) grid.push_back(std::ldexp(1.0, e));
    return grid;
}

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitOptions {
    std::string data;
    int k = 0;
    int m = 3;
    std::vector<std::size_t> dims;
    std::string variant = "full";
    bool normalize = false;
    int max_iters = 100;
    double tol = 1e-6;
};

void add_fit_options(CLI::App& cmd, FitOptions& o, CLI::Option*& m_opt) {
    cmd.add_option("--data", o.data, "Dataset manifest")->required();
    cmd.add_option("--k", o.k, "Number of clusters")->required()->check(CLI::Range(2, 1 << 30));
    m_opt = cmd.add_option("--m", o.m, "Number of latent spaces")->check(CLI::Range(1, 1 << 20));
    cmd.add_option("--dims", o.dims, "Latent dimensions d_1..d_m")->delimiter(',');
    cmd.add_flag("--normalize", o.normalize, "Z-score every feature row before fitting");
    cmd.add_option("--max-iters", o.max_iters, "Outer iteration cap")->check(CLI::PositiveNumber);
    cmd.add_option("--tol", o.tol, "Relative objective change that stops the loop (<= 0: never)");
}

std::string fmt(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

fs::path with_suffix(const fs::path& base, const std::string& suffix) {
    fs::path p = base;
    p.replace_extension();
    return fs::path(p.string() + suffix);
}

Variant variant_or_throw(const std::string& name) {
    auto v = parse_variant(name);
    if (!v) throw UsageError("unknown variant '" + name + "' (full, omvc, omvcdr2, equal_alpha)");
    return *v;
}

MultiViewDataset load(const FitOptions& o) {
    MultiViewDataset ds = load_dataset(o.data);
    return o.normalize ? zscore_normalize(ds) : ds;
}

SolverConfig make_config(const FitOptions& o, bool m_given, double lambda, std::uint64_t seed) {
    SolverConfig cfg;
    cfg.k = o.k;
    cfg.m = o.m;
    cfg.latent_dims = o.dims;
    if (!o.dims.empty() && !m_given) cfg.m = static_cast<int>(o.dims.size());
    cfg.lambda = lambda;
    cfg.max_iters = o.max_iters;
    cfg.rel_tol = o.tol;
    cfg.seed = seed;
    return cfg;
}

struct Job {
    SolverConfig config;
    Variant variant = Variant::full;
};

struct JobOutcome {
    RunReport report;
    std::vector<int> labels;
    std::vector<std::string> warnings;
};

unsigned worker_slots() {
    unsigned slots = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("OMVCDR_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) slots = std::min(slots, static_cast<unsigned>(cap));
    }
    return slots;
}

JobOutcome run_one(const MultiViewDataset& ds, const Job& job, bool normalized) {
    const auto start = std::chrono::steady_clock::now();
    FitResult result = fit(ds, job.config, job.variant);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {make_report(result, ds, seconds, normalized), result.partition().labels,
            result.warnings};
}

// Fits are independent; outcomes come back in job order regardless of scheduling.
std::vector<JobOutcome> run_jobs(const MultiViewDataset& ds, const std::vector<Job>& jobs,
                                 bool normalized) {
    std::vector<JobOutcome> outcomes(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                outcomes[i] = run_one(ds, jobs[i], normalized);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned slots = std::min<std::size_t>(worker_slots(), jobs.size());
    if (slots <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned s = 0; s < slots; ++s) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return outcomes;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

struct Means {
    double acc = 0, nmi = 0, purity = 0, fscore = 0, iterations = 0, objective = 0;
    bool has_metrics = false;
};

Means mean_of(const std::vector<const JobOutcome*>& rows) {
    Means m;
    const double count = static_cast<double>(rows.size());
    for (const JobOutcome* r : rows) {
        if (r->report.metrics) {
            m.has_metrics = true;
            m.acc += r->report.metrics->acc / count;
            m.nmi += r->report.metrics->nmi / count;
            m.purity += r->report.metrics->purity / count;
            m.fscore += r->report.metrics->fscore / count;
        }
        m.iterations += r->report.iterations / count;
        if (!r->report.objective_trace.empty()) m.objective += r->report.objective_trace.back() / count;
    }
    return m;
}

std::string metric_cells(const Means& m) {
    if (!m.has_metrics) return ",,,";
    return fmt(m.acc) + "," + fmt(m.nmi) + "," + fmt(m.purity) + "," + fmt(m.fscore);
}

nlohmann::ordered_json batch_json(const std::string& command,
                                  const std::vector<JobOutcome>& outcomes) {
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["command"] = command;
    j["runs"] = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) j["runs"].push_back(to_json(o.report));
    return j;
}

int cmd_fit(const FitOptions& o, bool m_given, double lambda, std::uint64_t seed,
            const std::string& out_path, std::string labels_path, std::ostream& out,
            std::ostream& err) {
    const Variant variant = variant_or_throw(o.variant);
    const MultiViewDataset ds = load(o);
    const JobOutcome outcome = run_one(ds, {make_config(o, m_given, lambda, seed), variant}, o.normalize);
    print_warnings(outcome.warnings, err);

    if (labels_path.empty()) labels_path = with_suffix(out_path, ".labels.csv").string();
    write_text(out_path, to_json(outcome.report).dump(2) + "\n");
    write_labels(labels_path, outcome.labels);
    out << "fit: " << outcome.report.iterations << " iterations, objective "
        << (outcome.report.objective_trace.empty() ? 0.0 : outcome.report.objective_trace.back());
    if (outcome.report.metrics) {
        out << ", ACC " << outcome.report.metrics->acc << ", NMI " << outcome.report.metrics->nmi;
    }
    out << "\nreport: " << out_path << "\nlabels: " << labels_path << '\n';
    return kExitOk;
}

int cmd_grid(const FitOptions& o, bool m_given, std::vector<double> lambdas,
             const std::vector<std::uint64_t>& seeds, const std::string& out_path,
             std::string csv_path, std::ostream& out, std::ostream& err) {
    const Variant variant = variant_or_throw(o.variant);
    if (lambdas.empty()) lambdas = default_lambda_grid();
    const MultiViewDataset ds = load(o);
    std::vector<Job> jobs;
    for (double lambda : lambdas)
        for (std::uint64_t seed : seeds) jobs.push_back({make_config(o, m_given, lambda, seed), variant});
    const auto outcomes = run_jobs(ds, jobs, o.normalize);
    print_warnings(outcomes.front().warnings, err);

    std::string csv = "lambda,runs,acc,nmi,purity,fscore,iterations,objective\n";
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        std::vector<const JobOutcome*> rows;
        for (std::size_t s = 0; s < seeds.size(); ++s) rows.push_back(&outcomes[l * seeds.size() + s]);
        const Means m = mean_of(rows);
        csv += fmt(lambdas[l]) + "," + std::to_string(rows.size()) + "," + metric_cells(m) + "," +
               fmt(m.iterations) + "," + fmt(m.objective) + "\n";
    }
    if (csv_path.empty()) csv_path = with_suffix(out_path, ".csv").string();
    write_text(out_path, batch_json("grid", outcomes).dump(2) + "\n");
    write_text(csv_path, csv);
    out << "grid: " << lambdas.size() << " lambdas x " << seeds.size() << " seeds\nreport: "
        << out_path << "\nsummary: " << csv_path << '\n';
    return kExitOk;
}

int cmd_ablate(const FitOptions& o, bool m_given, double lambda,
               const std::vector<std::uint64_t>& seeds, const std::string& out_path,
               std::string csv_path, std::ostream& out, std::ostream& err) {
    const MultiViewDataset ds = load(o);
    const Variant order[] = {Variant::omvc, Variant::omvcdr2, Variant::equal_alpha, Variant::full};
    std::vector<Job> jobs;
    for (Variant v : order)
        for (std::uint64_t seed : seeds) jobs.push_back({make_config(o, m_given, lambda, seed), v});
    const auto outcomes = run_jobs(ds, jobs, o.normalize);
    for (const auto& oc : outcomes) print_warnings(oc.warnings, err);

    std::string csv = "variant,runs,acc,nmi,purity,fscore,iterations,objective,dataset_id\n";
    for (std::size_t v = 0; v < std::size(order); ++v) {
        std::vector<const JobOutcome*> rows;
        for (std::size_t s = 0; s < seeds.size(); ++s) rows.push_back(&outcomes[v * seeds.size() + s]);
        const Means m = mean_of(rows);
        csv += std::string(to_string(order[v])) + "," + std::to_string(rows.size()) + "," +
               metric_cells(m) + "," + fmt(m.iterations) + "," + fmt(m.objective) + "," +
               outcomes.front().report.dataset_id + "\n";
    }
    if (csv_path.empty()) csv_path = with_suffix(out_path, ".csv").string();
    write_text(out_path, batch_json("ablate", outcomes).dump(2) + "\n");
    write_text(csv_path, csv);
    out << "ablate: 4 variants x " << seeds.size() << " seeds\nreport: " << out_path
        << "\nsummary: " << csv_path << '\n';
    return kExitOk;
}

int cmd_synth(const SyntheticSpec& spec, const std::string& dir, std::ostream& out) {
    if (spec.k < 2) throw UsageError("--k must be at least 2");
    if (spec.n < static_cast<std::size_t>(spec.k)) throw UsageError("--n must be at least --k");
    if (spec.view_dims.empty()) throw UsageError("--view-dims must list at least one view");
    if (!(spec.noise_sigma > 0.0)) throw UsageError("--noise must be positive");
    if (!(spec.separation >= 0.0)) throw UsageError("--separation must be non-negative");
    const fs::path manifest = save_dataset(generate_synthetic(spec), dir);
    out << "manifest: " << manifest.string() << '\n';
    return kExitOk;
}

struct BenchOptions {
    std::vector<std::size_t> ns{2500, 5000, 10000, 20000};
    int k = 5;
    std::vector<std::size_t> view_dims{20, 40};
    int iters = 10;
    int repeats = 1;
    double lambda = 1.0;
    double separation = 4.0;
    double noise = 1.0;
    std::uint64_t seed = 0;
};

int cmd_bench(const BenchOptions& b, const std::string& out_path, std::ostream& out) {
    std::string csv = "n,seconds,iterations\n";
    for (std::size_t n : b.ns) {
        SyntheticSpec spec{n, b.k, b.view_dims, b.separation, b.noise, b.seed};
        const MultiViewDataset ds = generate_synthetic(spec);
        SolverConfig cfg;
        cfg.k = b.k;
        cfg.lambda = b.lambda;
        cfg.max_iters = b.iters;
        cfg.rel_tol = 0.0;
        cfg.seed = b.seed;
        double best = std::numeric_limits<double>::infinity();
        int iterations = 0;
        for (int r = 0; r < b.repeats; ++r) {
            const auto start = std::chrono::steady_clock::now();
            const FitResult result = fit(ds, cfg);
            best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
            iterations = result.iterations_run;
        }
        csv += std::to_string(n) + "," + fmt(best) + "," + std::to_string(iterations) + "\n";
        out << "n=" << n << " seconds=" << best << '\n';
    }
    if (out_path.empty()) {
        out << csv;
    } else {
        write_text(out_path, csv);
    }
    return kExitOk;
}

int cmd_evaluate(const std::string& truth_path, const std::string& pred_path,
                 const std::string& out_path, std::ostream& out) {
    const auto truth = read_label_file(truth_path);
    const auto pred = read_label_file(pred_path);
    if (truth.size() != pred.size() || truth.empty()) {
        throw UsageError("label files differ in length or are empty");
    }
    const ClusteringScores s = evaluate(truth, pred);
    nlohmann::ordered_json j;
    j["schema"] = kReportSchema;
    j["n"] = truth.size();
    j["metrics"] = {{"acc", s.acc}, {"nmi", s.nmi}, {"purity", s.purity}, {"fscore", s.fscore}};
    if (out_path.empty()) {
        out << j.dump(2) << '\n';
    } else {
        write_text(out_path, j.dump(2) + "\n");
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"One-step multi-view clustering with diverse latent representations"};
    app.require_subcommand(1);

    // fit
    FitOptions fit_opts;
    CLI::Option* fit_m = nullptr;
    double fit_lambda = 1.0;
    std::uint64_t fit_seed = 0;
    std::string fit_out;
    std::string fit_labels;
    auto* fit_cmd = app.add_subcommand("fit", "Cluster one dataset");
    add_fit_options(*fit_cmd, fit_opts, fit_m);
    fit_cmd->add_option("--lambda", fit_lambda, "Trade-off weight λ")->check(CLI::PositiveNumber);
    fit_cmd->add_option("--variant", fit_opts.variant, "full | omvc | omvcdr2 | equal_alpha");
    fit_cmd->add_option("--seed", fit_seed, "Seed for the initial k-means");
    fit_cmd->add_option("--out", fit_out, "JSON report path")->required();
    fit_cmd->add_option("--labels-out", fit_labels, "Predicted labels (default: <out>.labels.csv)");

    // grid
    FitOptions grid_opts;
    CLI::Option* grid_m = nullptr;
    std::vector<double> grid_lambdas;
    std::vector<std::uint64_t> grid_seeds{0};
    std::string grid_out;
    std::string grid_csv;
    auto* grid_cmd = app.add_subcommand("grid", "Sweep λ (default 2^-5..2^5)");
    add_fit_options(*grid_cmd, grid_opts, grid_m);
    grid_cmd->add_option("--lambdas", grid_lambdas, "Comma-separated λ values")->delimiter(',');
    grid_cmd->add_option("--variant", grid_opts.variant, "full | omvc | omvcdr2 | equal_alpha");
    grid_cmd->add_option("--seeds,--seed", grid_seeds, "Comma-separated seeds")->delimiter(',');
    grid_cmd->add_option("--out", grid_out, "JSON report path")->required();
    grid_cmd->add_option("--csv", grid_csv, "CSV summary (default: <out>.csv)");

    // ablate
    FitOptions abl_opts;
    CLI::Option* abl_m = nullptr;
    double abl_lambda = 1.0;
    std::vector<std::uint64_t> abl_seeds{0};
    std::string abl_out;
    std::string abl_csv;
    auto* abl_cmd = app.add_subcommand("ablate", "Compare omvc, omvcdr2, equal_alpha and full");
    add_fit_options(*abl_cmd, abl_opts, abl_m);
    abl_cmd->add_option("--lambda", abl_lambda, "Trade-off weight λ")->check(CLI::PositiveNumber);
    abl_cmd->add_option("--seeds,--seed", abl_seeds, "Comma-separated seeds")->delimiter(',');
    abl_cmd->add_option("--out", abl_out, "JSON report path")->required();
    abl_cmd->add_option("--csv", abl_csv, "CSV summary (default: <out>.csv)");

    // synth
    SyntheticSpec spec;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic labelled dataset");
    synth_cmd->add_option("--n", spec.n, "Samples");
    synth_cmd->add_option("--k", spec.k, "Clusters");
    synth_cmd->add_option("--view-dims", spec.view_dims, "Per-view dimensions")->delimiter(',');
    synth_cmd->add_option("--separation", spec.separation, "Distance between centroids");
    synth_cmd->add_option("--noise", spec.noise_sigma, "Noise standard deviation");
    synth_cmd->add_option("--seed", spec.seed, "Generator seed");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    // bench
    BenchOptions bench;
    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Time fixed-iteration fits against n");
    bench_cmd->add_option("--ns", bench.ns, "Sample counts")->delimiter(',');
    bench_cmd->add_option("--k", bench.k, "Clusters")->check(CLI::Range(2, 1 << 30));
    bench_cmd->add_option("--view-dims", bench.view_dims, "Per-view dimensions")->delimiter(',');
    bench_cmd->add_option("--iters", bench.iters, "Outer iterations per fit")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--repeats", bench.repeats, "Best-of repeats")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--lambda", bench.lambda, "Trade-off weight λ")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "Seed");
    bench_cmd->add_option("--out", bench_out, "CSV path (default: stdout)");

    // evaluate
    std::string eval_truth;
    std::string eval_pred;
    std::string eval_out;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score predicted labels against truth");
    eval_cmd->add_option("--truth", eval_truth, "Ground-truth label file")->required();
    eval_cmd->add_option("--pred", eval_pred, "Predicted label file")->required();
    eval_cmd->add_option("--out", eval_out, "JSON output (default: stdout)");

    std::vector<std::string> argv_storage{"omvcdr"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*fit_cmd)
            return cmd_fit(fit_opts, fit_m->count() > 0, fit_lambda, fit_seed, fit_out, fit_labels,
                           out, err);
        if (*grid_cmd)
            return cmd_grid(grid_opts, grid_m->count() > 0, grid_lambdas, grid_seeds, grid_out,
                            grid_csv, out, err);
        if (*abl_cmd)
            return cmd_ablate(abl_opts, abl_m->count() > 0, abl_lambda, abl_seeds, abl_out, abl_csv,
                              out, err);
        if (*synth_cmd) return cmd_synth(spec, synth_out, out);
        if (*bench_cmd) return cmd_bench(bench, bench_out, out);
        if (*eval_cmd) return cmd_evaluate(eval_truth, eval_pred, eval_out, out);
    } catch (const DatasetError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
    return kExitUsage;
}

}  // namespace omvcdr::cli
