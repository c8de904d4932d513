// Command-line harness for tensor generation, completion, decomposition,
// evaluation and benchmark sweeps. Data goes to files/stdout; progress and
// diagnostics go to stderr.

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "roid/datagen.hpp"
#include "roid/evalio.hpp"
#include "roid/matrix_ops.hpp"
#include "roid/solvers.hpp"
#include "roid/tensor.hpp"

namespace {

using namespace roid;

Dims3 parse_dims(const std::string& s) {
    Dims3 d;
    char sep1 = 0, sep2 = 0;
    std::istringstream is(s);
    if (!(is >> d.i1 >> sep1 >> d.i2 >> sep2 >> d.i3) || (sep1 != ',' && sep1 != 'x') ||
        (sep2 != ',' && sep2 != 'x'))
        throw ConfigError("expected a triple like 40,40,40: got \"" + s + "\"");
    return d;
}

Dims3 parse_rank(const std::string& s) {
    if (s.find(',') == std::string::npos && s.find('x') == std::string::npos) {
        const Index r = std::stoll(s);
        return Dims3{r, r, r};
    }
    return parse_dims(s);
}

std::array<double, 3> parse_weights(const std::string& s) {
    std::array<double, 3> w{};
    char sep1 = 0, sep2 = 0;
    std::istringstream is(s);
    if (!(is >> w[0] >> sep1 >> w[1] >> sep2 >> w[2]) || sep1 != ',' || sep2 != ',')
        throw ConfigError("expected weights like 0.4,0.4,0.2: got \"" + s + "\"");
    return w;
}

FactorInit parse_init(const std::string& s) {
    if (s == "hosvd") return FactorInit::HosvdOfFilled;
    if (s == "random") return FactorInit::RandomOrthonormal;
    throw ConfigError("init must be hosvd or random");
}

Matrix read_matrix(const std::filesystem::path& path) {
    DenseTensor3 t = read_dense(path);
    if (t.dims().i3 != 1) throw InputError(path.string() + ": expected an n x m x 1 tensor");
    return unfold(t, 1);
}

// Derived sub-seeds keep the data, mask and noise streams decoupled.
std::uint64_t mask_seed(std::uint64_t s) { return s ^ 0x6d61736bull; }
std::uint64_t noise_seed(std::uint64_t s) { return s ^ 0x6e6f6973ull; }

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

struct SolveSpec {
    std::string method;
    SolverConfig config;
    std::array<Matrix, 3> laplacians;  // GROID only
};

struct SolveOutcome {
    SolverResult result;
    double seconds = 0.0;
};

SolveOutcome run_solver(const SolveSpec& spec, const ObservationSet* omega,
                        const DenseTensor3* full, const DenseTensor3* reference) {
    const auto t0 = std::chrono::steady_clock::now();
    SolverResult res;
    if (spec.method == "roid") {
        res = solve_roid(*omega, spec.config, reference);
    } else if (spec.method == "groid") {
        res = solve_groid(*omega, spec.laplacians, spec.config, reference);
    } else if (spec.method == "shooi") {
        res = solve_shooi(*omega, spec.config, reference);
    } else if (spec.method == "full") {
        res = solve_full(*full, spec.config, reference);
    } else if (spec.method == "hooi") {
        TuckerModel model =
            solve_hooi(*full, spec.config.rank, spec.config.tol, spec.config.maxiter);
        res.completed = model.reconstruct();
        res.model = std::move(model);
        res.converged = true;
        res.iterations = 0;
    } else {
        throw ConfigError("unknown method: " + spec.method);
    }
    const auto t1 = std::chrono::steady_clock::now();
    return SolveOutcome{std::move(res), std::chrono::duration<double>(t1 - t0).count()};
}

void add_solver_options(CLI::App* cmd, std::map<std::string, std::string>& opt) {
    cmd->add_option("--lambda", opt["lambda"], "trace-norm regularization weight");
    cmd->add_option("--mu", opt["mu"], "graph regularization weight");
    cmd->add_option("--weights", opt["weights"], "mode weights a1,a2,a3");
    cmd->add_option("--tol", opt["tol"], "convergence tolerance");
    cmd->add_option("--maxiter", opt["maxiter"], "iteration cap");
    cmd->add_option("--rho0", opt["rho0"], "initial penalty");
    cmd->add_option("--gamma", opt["gamma"], "penalty adaptation factor");
    cmd->add_option("--rho-max", opt["rho_max"], "penalty upper clamp");
    cmd->add_option("--rho-min", opt["rho_min"], "penalty lower clamp");
    cmd->add_option("--init", opt["init"], "factor init: hosvd | random");
    cmd->add_option("--seed", opt["seed"], "seed for seeded initializations");
}

void apply_solver_options(const std::map<std::string, std::string>& opt, SolverConfig& cfg) {
    const auto get = [&](const char* k) -> std::optional<std::string> {
        const auto it = opt.find(k);
        if (it == opt.end() || it->second.empty()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("lambda")) cfg.lambda = std::stod(*v);
    if (auto v = get("mu")) cfg.mu = std::stod(*v);
    if (auto v = get("weights")) cfg.weights = parse_weights(*v);
    if (auto v = get("tol")) cfg.tol = std::stod(*v);
    if (auto v = get("maxiter")) cfg.maxiter = std::stoi(*v);
    if (auto v = get("rho0")) cfg.rho0 = std::stod(*v);
    if (auto v = get("gamma")) cfg.gamma = std::stod(*v);
    if (auto v = get("rho_max")) cfg.rho_max = std::stod(*v);
    if (auto v = get("rho_min")) cfg.rho_min = std::stod(*v);
    if (auto v = get("init")) cfg.init = parse_init(*v);
    if (auto v = get("seed")) cfg.seed = std::stoull(*v);
}

void write_report(const std::filesystem::path& path, const ResultRow& row) {
    std::ofstream out(path);
    if (!out) throw ParseError(path.string() + ": cannot open file for writing");
    std::vector<ResultRow> rows{row};
    write_results_csv(out, rows);
}

void write_trace(const std::filesystem::path& path, const IterationTrace& trace) {
    std::ofstream out(path);
    if (!out) throw ParseError(path.string() + ": cannot open file for writing");
    trace.write_csv(out);
}

// ---- bench ----

struct BenchSpec {
    Dims3 dims{40, 40, 40};
    Dims3 rank_true{3, 3, 3};
    std::vector<std::string> methods;
    std::vector<Dims3> ranks;
    std::vector<double> ratios;
    std::vector<double> lambdas;
    std::vector<double> nfs;
    int reps = 1;
    std::uint64_t seed_base = 0;
    SolverConfig base;  // tol/maxiter/rho/etc.
    std::string canonical;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

BenchSpec read_bench_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::istringstream probe(line);
            std::string rest;
            if (probe >> rest)
                throw ParseError(path.string() + ":" + std::to_string(lineno) +
                                 ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    BenchSpec spec;
    const auto get = [&](const char* k) -> std::optional<std::string> {
        const auto it = kv.find(k);
        if (it == kv.end() || it->second.empty()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("dims")) spec.dims = parse_dims(*v);
    if (auto v = get("rank_true")) spec.rank_true = parse_rank(*v);
    spec.methods = split_list(get("method").value_or("roid"));
    for (const std::string& r : split_list(get("rank").value_or("3")))
        spec.ranks.push_back(parse_rank(r));
    for (const std::string& r : split_list(get("ratio").value_or("1")))
        spec.ratios.push_back(std::stod(r));
    for (const std::string& l : split_list(get("lambda").value_or("100")))
        spec.lambdas.push_back(std::stod(l));
    for (const std::string& n : split_list(get("nf").value_or("0")))
        spec.nfs.push_back(std::stod(n));
    if (auto v = get("reps")) spec.reps = std::stoi(*v);
    if (auto v = get("seed_base")) spec.seed_base = std::stoull(*v);
    if (auto v = get("tol")) spec.base.tol = std::stod(*v);
    if (auto v = get("maxiter")) spec.base.maxiter = std::stoi(*v);
    if (auto v = get("rho0")) spec.base.rho0 = std::stod(*v);
    if (auto v = get("gamma")) spec.base.gamma = std::stod(*v);
    if (auto v = get("mu")) spec.base.mu = std::stod(*v);
    if (auto v = get("weights")) spec.base.weights = parse_weights(*v);
    if (auto v = get("init")) spec.base.init = parse_init(*v);
    if (spec.methods.empty() || spec.ranks.empty() || spec.ratios.empty() ||
        spec.lambdas.empty() || spec.nfs.empty() || spec.reps < 1)
        throw ConfigError("bench spec: every grid must be non-empty");

    std::ostringstream canon;
    for (const auto& [k, v] : kv) canon << k << '=' << v << ';';
    spec.canonical = canon.str();
    return spec;
}

struct BenchCell {
    std::string method;
    Dims3 rank;
    double ratio;
    double lambda;
    double nf;
    std::uint64_t seed;
};

int run_bench(const std::filesystem::path& spec_path, const std::filesystem::path& out_path,
              int jobs, bool strict) {
    const BenchSpec spec = read_bench_spec(spec_path);
    std::vector<BenchCell> grid;
    for (const std::string& method : spec.methods)
        for (const Dims3& rank : spec.ranks)
            for (double ratio : spec.ratios)
                for (double lambda : spec.lambdas)
                    for (double nf : spec.nfs)
                        for (int rep = 0; rep < spec.reps; ++rep)
                            grid.push_back({method, rank, ratio, lambda, nf,
                                            spec.seed_base + static_cast<std::uint64_t>(rep)});

    const std::uint64_t hash = fnv1a64(spec.canonical);
    char hashbuf[32];
    std::snprintf(hashbuf, sizeof(hashbuf), "%016llx", static_cast<unsigned long long>(hash));

    std::ofstream out(out_path);
    if (!out) throw ParseError(out_path.string() + ": cannot open file for writing");
    out << "# config_hash=" << hashbuf << "\n" << results_csv_header() << "\n" << std::flush;

    std::vector<ResultRow> rows(grid.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> any_failed{false};
    std::mutex io_mutex;

    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size()) return;
            const BenchCell& cell = grid[i];
            ResultRow row;
            row.method = cell.method;
            row.dims = spec.dims;
            row.rank = cell.rank;
            row.ratio = cell.ratio;
            row.lambda = cell.lambda;
            row.seed = cell.seed;
            try {
                const DenseTensor3 truth = gen_tucker(spec.dims, spec.rank_true, cell.seed);
                DenseTensor3 data =
                    cell.nf > 0 ? add_noise(truth, cell.nf, noise_seed(cell.seed)) : truth;
                SolveSpec ss;
                ss.method = cell.method;
                ss.config = spec.base;
                ss.config.rank = cell.rank;
                ss.config.lambda = cell.lambda;
                ss.config.seed = cell.seed;
                SolveOutcome outcome;
                if (cell.method == "full" || cell.method == "hooi") {
                    outcome = run_solver(ss, nullptr, &data, nullptr);
                } else {
                    const ObservationSet obs =
                        sample_mask(spec.dims, cell.ratio, mask_seed(cell.seed)).valued_from(data);
                    outcome = run_solver(ss, &obs, nullptr, nullptr);
                }
                row.rse = rse(outcome.result.completed, truth);
                row.iters = outcome.result.iterations;
                row.seconds = outcome.seconds;
                row.converged = outcome.result.converged;
                if (!outcome.result.converged) any_failed = true;
            } catch (const std::exception& e) {
                // A failed cell is recorded, not fatal to the sweep.
                row.rse = std::numeric_limits<double>::quiet_NaN();
                row.converged = false;
                any_failed = true;
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << "bench cell " << i << " failed: " << e.what() << "\n";
            }
            std::lock_guard<std::mutex> lock(io_mutex);
            rows[i] = row;
            out << format_result_row(row) << "\n" << std::flush;
            std::cerr << "bench [" << i + 1 << "/" << grid.size() << "] " << cell.method
                      << " rank=" << cell.rank.i1 << " ratio=" << cell.ratio
                      << " lambda=" << cell.lambda << " seed=" << cell.seed << " rse=" << row.rse
                      << "\n";
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    // Rows were appended in completion order; rewrite sorted by grid index.
    out.close();
    std::ofstream fin(out_path);
    if (!fin) throw ParseError(out_path.string() + ": cannot rewrite file");
    fin << "# config_hash=" << hashbuf << "\n";
    write_results_csv(fin, rows);
    return strict && any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"core-trace-norm regularized orthogonal tensor decomposition toolkit"};
    app.require_subcommand(1);

    std::string dims_s, rank_s = "3", in_path, out_path, obs_path, method, ref_path, report_path,
                trace_path, x_path, labels_path, spec_path;
    std::string aff1, aff2, aff3;
    std::uint64_t seed = 0;
    double ratio = 0.1, nf = 0.0;
    bool strict = false;
    std::map<std::string, std::string> sopt;

    auto* gen = app.add_subcommand("generate", "write an exact low multi-linear rank tensor");
    gen->add_option("--dims", dims_s, "tensor dims I1,I2,I3")->required();
    gen->add_option("--rank", rank_s, "multi-linear rank r or r1,r2,r3")->required();
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--nf", nf, "Gaussian noise factor added after generation");
    gen->add_option("--out", out_path, "output dense tensor file")->required();

    auto* mask = app.add_subcommand("mask", "sample observed entries from a tensor");
    mask->add_option("--in", in_path, "source dense tensor file")->required();
    mask->add_option("--ratio", ratio, "fraction of observed entries")->required();
    mask->add_option("--seed", seed, "sampling seed");
    mask->add_option("--out", out_path, "output COO observation file")->required();

    auto* noise = app.add_subcommand("noise", "add scaled Gaussian noise to a tensor");
    noise->add_option("--in", in_path, "source dense tensor file")->required();
    noise->add_option("--nf", nf, "noise factor")->required();
    noise->add_option("--seed", seed, "noise seed");
    noise->add_option("--out", out_path, "output dense tensor file")->required();

    auto* complete = app.add_subcommand("complete", "recover a tensor from observed entries");
    complete->add_option("--method", method, "roid | groid | shooi")->required();
    complete->add_option("--obs", obs_path, "COO observation file")->required();
    complete->add_option("--rank", rank_s, "given multi-linear rank")->required();
    complete->add_option("--out", out_path, "recovered dense tensor file");
    complete->add_option("--report", report_path, "one-row results CSV");
    complete->add_option("--trace", trace_path, "per-iteration trace CSV");
    complete->add_option("--ref", ref_path, "reference tensor for RSE");
    complete->add_option("--affinity1", aff1, "mode-1 affinity matrix (n x n x 1 dense file)");
    complete->add_option("--affinity2", aff2, "mode-2 affinity matrix");
    complete->add_option("--affinity3", aff3, "mode-3 affinity matrix");
    complete->add_flag("--strict", strict, "exit 2 when the solver does not converge");
    add_solver_options(complete, sopt);

    auto* decompose = app.add_subcommand("decompose", "decompose a fully observed tensor");
    decompose->add_option("--method", method, "full | hooi")->required();
    decompose->add_option("--in", in_path, "dense tensor file")->required();
    decompose->add_option("--rank", rank_s, "given multi-linear rank")->required();
    decompose->add_option("--out", out_path, "reconstruction dense tensor file");
    decompose->add_option("--report", report_path, "one-row results CSV");
    decompose->add_option("--trace", trace_path, "per-iteration trace CSV");
    decompose->add_option("--ref", ref_path, "reference tensor for RSE");
    decompose->add_flag("--strict", strict, "exit 2 when the solver does not converge");
    add_solver_options(decompose, sopt);

    auto* evaluate = app.add_subcommand("evaluate", "compute RSE (and AUC) for a recovery");
    evaluate->add_option("--x", x_path, "recovered dense tensor file")->required();
    evaluate->add_option("--ref", ref_path, "reference dense tensor file")->required();
    evaluate->add_option("--labels", labels_path,
                         "COO file of binary labels; scores are the recovered entries");

    auto* bench = app.add_subcommand("bench", "run a parameter sweep and emit a results CSV");
    bench->add_option("--spec", spec_path, "flat key=value sweep spec")->required();
    bench->add_option("--out", out_path, "results CSV path")->required();
    int jobs = 0;
    bench->add_option("--jobs", jobs, "concurrent grid cells (default $ROID_JOBS or 1)");
    bench->add_flag("--strict", strict, "exit 2 when any cell fails to converge");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) {
            DenseTensor3 t = gen_tucker(parse_dims(dims_s), parse_rank(rank_s), seed);
            if (nf > 0) t = add_noise(t, nf, noise_seed(seed));
            write_dense(out_path, t);
            return 0;
        }
        if (mask->parsed()) {
            const DenseTensor3 t = read_dense(in_path);
            write_coo(out_path, sample_mask(t.dims(), ratio, seed).valued_from(t));
            return 0;
        }
        if (noise->parsed()) {
            write_dense(out_path, add_noise(read_dense(in_path), nf, seed));
            return 0;
        }
        if (complete->parsed() || decompose->parsed()) {
            SolveSpec ss;
            ss.method = method;
            ss.config.rank = parse_rank(rank_s);
            ss.config.record_trace = !trace_path.empty();
            apply_solver_options(sopt, ss.config);

            std::optional<ObservationSet> obs;
            std::optional<DenseTensor3> full;
            Dims3 dims;
            double obs_ratio = 1.0;
            if (complete->parsed()) {
                obs = read_coo(obs_path);
                dims = obs->dims();
                obs_ratio = static_cast<double>(obs->count()) / static_cast<double>(dims.count());
                if (method == "groid") {
                    const auto load = [&](const std::string& p, int mode) {
                        if (p.empty())
                            return Matrix::Zero(dims.extent(mode), dims.extent(mode)).eval();
                        return laplacian_from_affinity(read_matrix(p)).matrix;
                    };
                    ss.laplacians = {load(aff1, 1), load(aff2, 2), load(aff3, 3)};
                }
            } else {
                full = read_dense(in_path);
                dims = full->dims();
            }
            std::optional<DenseTensor3> ref;
            if (!ref_path.empty()) ref = read_dense(ref_path);

            const SolveOutcome outcome =
                run_solver(ss, obs ? &*obs : nullptr, full ? &*full : nullptr,
                           ref ? &*ref : nullptr);
            if (!out_path.empty()) write_dense(out_path, outcome.result.completed);
            if (!trace_path.empty()) write_trace(trace_path, outcome.result.trace);
            if (!report_path.empty()) {
                ResultRow row;
                row.method = method;
                row.dims = dims;
                row.rank = ss.config.rank;
                row.ratio = obs_ratio;
                row.lambda = ss.config.lambda;
                row.seed = ss.config.seed;
                row.rse = ref ? rse(outcome.result.completed, *ref)
                              : std::numeric_limits<double>::quiet_NaN();
                row.iters = outcome.result.iterations;
                row.seconds = outcome.seconds;
                row.converged = outcome.result.converged;
                write_report(report_path, row);
            }
            std::cerr << "iterations=" << outcome.result.iterations
                      << " converged=" << (outcome.result.converged ? "true" : "false")
                      << " seconds=" << outcome.seconds << "\n";
            if (strict && !outcome.result.converged) return 2;
            return 0;
        }
        if (evaluate->parsed()) {
            const DenseTensor3 x = read_dense(x_path);
            const DenseTensor3 ref = read_dense(ref_path);
            std::printf("rse=%.17g\n", rse(x, ref));
            if (!labels_path.empty()) {
                const ObservationSet labels = read_coo(labels_path);
                if (!(labels.dims() == x.dims()))
                    throw DimensionError("labels dims must match the recovered tensor");
                ScoredLabels data;
                for (std::size_t k = 0; k < labels.entries().size(); ++k) {
                    data.scores.push_back(x.values()[labels.linear_indices()[k]]);
                    data.labels.push_back(labels.entries()[k].value != 0.0 ? 1 : 0);
                }
                std::printf("auc=%.17g\n", auc(data));
            }
            return 0;
        }
        if (bench->parsed()) {
            if (jobs <= 0) {
                if (const char* env = std::getenv("ROID_JOBS")) jobs = std::atoi(env);
                if (jobs <= 0) jobs = 1;
            }
            return run_bench(spec_path, out_path, jobs, strict);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
