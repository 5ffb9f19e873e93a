// cocsp command line tool: generate instances, learn constraint weights,
// run MAC searches and seeded benchmark experiments, and compare result
// columns statistically.
//
// Exit codes: 0 ok, 1 usage error, 2 input error, 3 internal error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cocsp/bench.hpp"
#include "cocsp/coevo.hpp"
#include "cocsp/csp.hpp"
#include "cocsp/generators.hpp"
#include "cocsp/learners.hpp"
#include "cocsp/native_io.hpp"
#include "cocsp/search.hpp"
#include "cocsp/stats.hpp"
#include "cocsp/xcsp.hpp"

namespace {

using nlohmann::json;

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t parse_seed(const std::string& s) {
    if (s == "random") {
        std::random_device rd;
        return (static_cast<std::uint64_t>(rd()) << 32) ^
               static_cast<std::uint64_t>(
                   std::chrono::steady_clock::now().time_since_epoch().count());
    }
    try {
        return std::stoull(s);
    } catch (const std::exception&) {
        throw InputError("invalid seed '" + s + "' (number or 'random')");
    }
}

std::string resolve_input(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path))
        return path;
    if (const char* dir = std::getenv("COCSP_DATA_DIR")) {
        const fs::path candidate = fs::path(dir) / path;
        if (fs::exists(candidate))
            return candidate.string();
    }
    throw InputError("cannot find input file '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path + "'");
    out << content;
}

cocsp::CspInstance load_instance(const std::string& path) {
    const std::string resolved = resolve_input(path);
    const std::string text = read_file(resolved);
    if (resolved.size() >= 4 && resolved.substr(resolved.size() - 4) == ".xml")
        return cocsp::parse_xcsp(text);
    return cocsp::parse_native(text);
}

std::string sanitize_label(const std::string& label) {
    std::string out;
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_')
            out.push_back(c);
        else if (!out.empty() && out.back() != '_')
            out.push_back('_');
    }
    while (!out.empty() && out.back() == '_')
        out.pop_back();
    return out;
}

// ---------------------------------------------------------------- generate

struct GenerateOpts {
    std::string model;
    int n = 0, d = 0, e = 0;
    double tightness = 0.0;
    double alpha = 0.0, r = 0.0;
    double distance = 0.0;
    bool forced = false;
    std::string seed = "1";
    std::string out_path;
    std::string planted_out;
};

int cmd_generate(const GenerateOpts& opts) {
    const std::uint64_t seed = parse_seed(opts.seed);
    std::optional<cocsp::CspInstance> inst;
    std::optional<cocsp::Assignment> planted;
    if (opts.model == "d") {
        inst = cocsp::gen_model_d({opts.n, opts.d, opts.e, opts.tightness, seed});
    } else if (opts.model == "rb") {
        auto rb = cocsp::gen_model_rb({opts.n, opts.alpha, opts.r, opts.tightness, opts.forced, seed});
        inst = std::move(rb.instance);
        planted = std::move(rb.planted);
    } else if (opts.model == "geo") {
        inst = cocsp::gen_geo({opts.n, opts.d, opts.distance, opts.tightness, seed});
    } else {
        throw InputError("unknown model '" + opts.model + "' (d, rb or geo)");
    }
    const std::string text = cocsp::serialize_native(*inst);
    if (opts.out_path.empty())
        std::cout << text;
    else
        write_file(opts.out_path, text);
    if (!opts.planted_out.empty()) {
        if (!planted)
            throw InputError("--planted-out needs --model rb with --forced");
        std::ostringstream out;
        for (cocsp::VarId v = 0; v < inst->num_vars(); ++v)
            out << v << " " << *planted->value(v) << "\n";
        write_file(opts.planted_out, out.str());
    }
    if (!opts.out_path.empty())
        std::cerr << "wrote " << inst->name() << " (" << inst->num_vars() << " vars, "
                  << inst->num_constraints() << " constraints) to " << opts.out_path << "\n";
    return 0;
}

// ------------------------------------------------------------------- solve

struct PipelineOpts {
    std::string method = "plain-mac";
    std::string heuristic = "wdeg";
    std::string seed = "1";
    // coevo
    int generations = 10, pop_size = 50, history = 10, encounters = 20, tournament = 2;
    double crossover = 0.9, mutation = 0.01, bias = 2.0;
    // rndi
    int restarts = 5, cap_factor = 10;
    std::string final_heuristic = "wdeg";
    // hc
    std::uint64_t iterations = 50;
    int cutoff = 50;

    cocsp::MethodConfig to_config(std::uint64_t seed_value) const {
        cocsp::MethodConfig cfg;
        cfg.method = cocsp::parse_method(method);
        cfg.heuristic = cocsp::parse_heuristic(heuristic);
        cfg.coevo = {pop_size, history,   encounters, crossover, mutation,
                     bias,     tournament, generations, seed_value};
        cfg.rndi = {restarts, cap_factor, cocsp::parse_heuristic(final_heuristic), seed_value};
        cfg.hc = {iterations, cutoff, seed_value};
        return cfg;
    }
};

struct SolveOpts {
    PipelineOpts pipeline;
    std::string instance_path;
    double timeout = 1200.0;
    std::uint64_t node_cap = 0;
    bool show_solution = false;
};

int cmd_solve(const SolveOpts& opts) {
    const cocsp::CspInstance inst = load_instance(opts.instance_path);
    const std::uint64_t seed = parse_seed(opts.pipeline.seed);
    cocsp::MethodConfig method = opts.pipeline.to_config(seed);

    // Same pipeline as the bench harness, but with a visible node cap knob.
    const auto learn_started = std::chrono::steady_clock::now();
    cocsp::ConstraintWeights weights = cocsp::unit_weights(inst);
    switch (method.method) {
    case cocsp::Method::plain_mac:
        break;
    case cocsp::Method::coevo_mac:
        weights = cocsp::learn_weights(inst, method.coevo);
        break;
    case cocsp::Method::rndi_mac:
        weights = cocsp::rndi_learn(inst, method.rndi).weights;
        break;
    case cocsp::Method::hc_mac:
        weights = cocsp::hc_learn(inst, method.hc).weights;
        break;
    }
    const double learn_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - learn_started).count();

    cocsp::SearchLimits limits;
    limits.timeout_secs = std::max(0.0, opts.timeout - learn_seconds);
    if (opts.node_cap > 0)
        limits.node_cap = opts.node_cap;
    const cocsp::Heuristic h = method.method == cocsp::Method::rndi_mac
                                   ? method.rndi.final_heuristic
                                   : method.heuristic;
    const cocsp::SearchStats stats =
        cocsp::mac_search(inst, h, weights, limits, cocsp::derive_seed(seed, 104));

    std::cout << "instance " << inst.name() << "\n";
    std::cout << "method " << method.label() << "\n";
    std::cout << "seed " << seed << "\n";
    std::cout << "outcome " << cocsp::to_string(stats.outcome) << "\n";
    std::cout << "learn_seconds " << learn_seconds << "\n";
    std::cout << "search_seconds " << stats.elapsed << "\n";
    std::cout << "t " << learn_seconds + stats.elapsed << "\n";
    std::cout << "n " << stats.nodes << "\n";
    std::cout << "wipeouts " << stats.wipeouts << "\n";
    if (opts.show_solution && stats.solution) {
        std::cout << "solution";
        for (cocsp::VarId v = 0; v < inst.num_vars(); ++v)
            std::cout << " x" << v << "=" << *stats.solution->value(v);
        std::cout << "\n";
    }
    return 0;
}

// ----------------------------------------------------------- learn-weights

struct LearnOpts {
    PipelineOpts pipeline;
    std::string instance_path;
    bool print_order = false;
};

int cmd_learn_weights(const LearnOpts& opts) {
    const cocsp::CspInstance inst = load_instance(opts.instance_path);
    const std::uint64_t seed = parse_seed(opts.pipeline.seed);
    cocsp::MethodConfig method = opts.pipeline.to_config(seed);
    cocsp::ConstraintWeights weights = cocsp::unit_weights(inst);
    switch (method.method) {
    case cocsp::Method::plain_mac:
        throw InputError("learn-weights needs --method coevo, rndi or hc");
    case cocsp::Method::coevo_mac:
        weights = cocsp::learn_weights(inst, method.coevo);
        break;
    case cocsp::Method::rndi_mac:
        weights = cocsp::rndi_learn(inst, method.rndi).weights;
        break;
    case cocsp::Method::hc_mac:
        weights = cocsp::hc_learn(inst, method.hc).weights;
        break;
    }
    std::cout << "# seed " << seed << "\n";
    for (std::size_t c = 0; c < weights.w.size(); ++c)
        std::cout << c << " " << weights.w[c] << "\n";
    if (opts.print_order) {
        std::cout << "order";
        for (cocsp::VarId v : cocsp::static_order_by_wdeg(inst, weights))
            std::cout << " " << v;
        std::cout << "\n";
    }
    return 0;
}

// ------------------------------------------------------------------- bench

struct BenchOpts {
    std::string config_path;
    std::string out_dir = "bench-out";
    int runs = 0;          // 0: keep the config value
    double timeout = 0.0;  // idem
    std::string seed;      // idem
    int jobs = 0;          // idem
};

cocsp::CspInstance instance_from_json(const json& j) {
    if (j.is_string())
        return load_instance(j.get<std::string>());
    const std::string model = j.at("model").get<std::string>();
    const std::uint64_t seed = j.value("seed", std::uint64_t{1});
    if (model == "d")
        return cocsp::gen_model_d({j.at("n").get<int>(), j.at("d").get<int>(),
                                   j.at("e").get<int>(), j.at("tightness").get<double>(), seed});
    if (model == "rb") {
        auto rb = cocsp::gen_model_rb({j.at("n").get<int>(), j.at("alpha").get<double>(),
                                       j.at("r").get<double>(), j.at("tightness").get<double>(),
                                       j.value("forced", false), seed});
        return std::move(rb.instance);
    }
    if (model == "geo")
        return cocsp::gen_geo({j.at("n").get<int>(), j.at("d").get<int>(),
                               j.at("distance").get<double>(), j.at("tightness").get<double>(),
                               seed});
    throw InputError("unknown generator model '" + model + "' in config");
}

cocsp::MethodConfig method_from_json(const json& j) {
    cocsp::MethodConfig cfg;
    cfg.method = cocsp::parse_method(j.at("method").get<std::string>());
    cfg.heuristic = cocsp::parse_heuristic(j.value("heuristic", std::string("wdeg")));
    cfg.coevo.pop_size = j.value("pop_size", cfg.coevo.pop_size);
    cfg.coevo.history_len = j.value("history", cfg.coevo.history_len);
    cfg.coevo.encounters_per_gen = j.value("encounters", cfg.coevo.encounters_per_gen);
    cfg.coevo.crossover_rate = j.value("crossover", cfg.coevo.crossover_rate);
    cfg.coevo.mutation_rate = j.value("mutation", cfg.coevo.mutation_rate);
    cfg.coevo.ranking_bias = j.value("bias", cfg.coevo.ranking_bias);
    cfg.coevo.tournament_size = j.value("tournament", cfg.coevo.tournament_size);
    cfg.coevo.generations = j.value("generations", cfg.coevo.generations);
    cfg.rndi.restarts = j.value("restarts", cfg.rndi.restarts);
    cfg.rndi.node_cap_factor = j.value("node_cap_factor", cfg.rndi.node_cap_factor);
    cfg.rndi.final_heuristic =
        cocsp::parse_heuristic(j.value("final_heuristic", std::string("wdeg")));
    cfg.hc.iterations_total = j.value("iterations", cfg.hc.iterations_total);
    cfg.hc.cutoff = j.value("cutoff", cfg.hc.cutoff);
    return cfg;
}

int cmd_bench(const BenchOpts& opts) {
    json config;
    try {
        config = json::parse(read_file(resolve_input(opts.config_path)));
    } catch (const json::exception& e) {
        throw InputError("config parse failed: " + std::string(e.what()));
    }
    try {
        const cocsp::CspInstance inst = instance_from_json(config.at("instance"));
        cocsp::RunConfig run_cfg;
        run_cfg.runs = opts.runs > 0 ? opts.runs : config.value("runs", 50);
        run_cfg.timeout_secs = opts.timeout > 0 ? opts.timeout : config.value("timeout_secs", 1200.0);
        run_cfg.base_seed =
            !opts.seed.empty() ? parse_seed(opts.seed) : config.value("base_seed", std::uint64_t{1});
        run_cfg.jobs = opts.jobs > 0 ? opts.jobs : config.value("jobs", 1);

        std::filesystem::create_directories(opts.out_dir);
        std::vector<std::pair<std::string, std::vector<cocsp::RunRecord>>> by_method;
        for (const json& mj : config.at("methods")) {
            const cocsp::MethodConfig method = method_from_json(mj);
            std::vector<cocsp::RunRecord> records = cocsp::run_experiment(inst, method, run_cfg);
            const std::string path =
                (std::filesystem::path(opts.out_dir) / (sanitize_label(method.label()) + ".csv"))
                    .string();
            write_file(path, cocsp::runs_csv(inst, method.label(), run_cfg, records));
            by_method.emplace_back(method.label(), std::move(records));
        }
        const cocsp::Summary summary = cocsp::summarize(by_method);
        write_file((std::filesystem::path(opts.out_dir) / "comparison.csv").string(),
                   cocsp::comparison_csv(summary));
        std::cout << "instance " << inst.name() << " runs " << run_cfg.runs << " base_seed "
                  << run_cfg.base_seed << "\n\n";
        std::cout << cocsp::summary_table(summary);
        return 0;
    } catch (const json::exception& e) {
        throw InputError("config error: " + std::string(e.what()));
    }
}

// ------------------------------------------------------------------- stats

int cmd_stats(const std::string& a_path, const std::string& b_path, const std::string& column) {
    std::vector<double> a, b;
    try {
        a = cocsp::read_csv_column(resolve_input(a_path), column);
        b = cocsp::read_csv_column(resolve_input(b_path), column);
    } catch (const std::runtime_error& e) {
        throw InputError(e.what());
    }
    const cocsp::MwuResult mwu = cocsp::mann_whitney_u(a, b);
    const double A = cocsp::vargha_delaney_a(a, b);
    std::cout << "n_a " << a.size() << "\n";
    std::cout << "n_b " << b.size() << "\n";
    std::cout << "U " << mwu.u << "\n";
    std::cout << "p " << mwu.p << "\n";
    std::cout << "A " << A << "\n";
    std::cout << "significant " << (mwu.p < 0.05 ? "yes" : "no") << "\n";
    return 0;
}

// ----------------------------------------------------------------- convert

int cmd_convert(const std::string& in_path, const std::string& out_path) {
    const std::string text = read_file(resolve_input(in_path));
    const cocsp::CspInstance inst = cocsp::parse_xcsp(text);
    write_file(out_path, cocsp::serialize_native(inst));
    std::cerr << "wrote " << inst.name() << " (" << inst.num_vars() << " vars, "
              << inst.num_constraints() << " constraints) to " << out_path << "\n";
    return 0;
}

void add_pipeline_flags(CLI::App* cmd, PipelineOpts& p, bool with_method = true) {
    if (with_method)
        cmd->add_option("--method", p.method, "plain-mac, coevo, rndi or hc")
            ->default_val(p.method);
    cmd->add_option("--heuristic", p.heuristic,
                    "lex, random, dom, deg, ddeg, dom_ddeg, wdeg or dom_wdeg")
        ->default_val(p.heuristic);
    cmd->add_option("--seed", p.seed, "RNG seed (number or 'random')")->default_val(p.seed);
    cmd->add_option("--generations", p.generations, "coevo: generations")->default_val(p.generations);
    cmd->add_option("--pop-size", p.pop_size, "coevo: solution population size")
        ->default_val(p.pop_size);
    cmd->add_option("--history", p.history, "coevo: encounter history length")
        ->default_val(p.history);
    cmd->add_option("--encounters", p.encounters, "coevo: encounters per generation")
        ->default_val(p.encounters);
    cmd->add_option("--crossover", p.crossover, "coevo: crossover rate (typically 0.7 or 0.9)")
        ->default_val(p.crossover);
    cmd->add_option("--mutation", p.mutation, "coevo: per-bit mutation rate (0.01 or 0.2)")
        ->default_val(p.mutation);
    cmd->add_option("--bias", p.bias, "coevo: linear ranking bias in [1,2]")->default_val(p.bias);
    cmd->add_option("--tournament", p.tournament, "coevo: tournament size")
        ->default_val(p.tournament);
    cmd->add_option("--restarts", p.restarts, "rndi: R (presets 5, 25, 50, 100, 150, 500)")
        ->default_val(p.restarts);
    cmd->add_option("--cap-factor", p.cap_factor, "rndi: per-probe node cap factor (C = factor*n)")
        ->default_val(p.cap_factor);
    cmd->add_option("--final-heuristic", p.final_heuristic, "rndi: heuristic for the final run")
        ->default_val(p.final_heuristic);
    cmd->add_option("--iterations", p.iterations, "hc: step budget (presets 5, 10, 25, 50, 100, 500)")
        ->default_val(p.iterations);
    cmd->add_option("--cutoff", p.cutoff, "hc: per-climb step cutoff")->default_val(p.cutoff);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary CSP toolkit: coevolutionary constraint-weight learning + MAC search"};
    app.require_subcommand(1);

    GenerateOpts gen;
    CLI::App* generate = app.add_subcommand("generate", "generate a random instance (native format)");
    generate->add_option("--model", gen.model, "d, rb or geo")->required();
    generate->add_option("--n", gen.n, "variables");
    generate->add_option("--d", gen.d, "domain size (models d, geo)");
    generate->add_option("--e", gen.e, "constraints (model d)");
    generate->add_option("--t,--tightness", gen.tightness, "tightness: fraction of forbidden pairs");
    generate->add_option("--alpha", gen.alpha, "rb: d = round(n^alpha)");
    generate->add_option("--r", gen.r, "rb: e = round(r*n*ln n)");
    generate->add_flag("--forced", gen.forced, "rb: plant a solution");
    generate->add_option("--distance", gen.distance, "geo: connection distance <= sqrt(2)");
    generate->add_option("--seed", gen.seed, "RNG seed (number or 'random')")->default_val("1");
    generate->add_option("-o,--out", gen.out_path, "output path (default: stdout)");
    generate->add_option("--planted-out", gen.planted_out, "rb --forced: write the planted solution");

    SolveOpts solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "run one learn+search pipeline on an instance");
    solve_cmd->add_option("instance", solve.instance_path, "instance file (.xml or native)")
        ->required();
    add_pipeline_flags(solve_cmd, solve.pipeline);
    solve_cmd->add_option("--timeout", solve.timeout, "wall-clock budget in seconds")
        ->default_val(solve.timeout);
    solve_cmd->add_option("--node-cap", solve.node_cap, "stop after this many nodes (0 = off)");
    solve_cmd->add_flag("--show-solution", solve.show_solution, "print the solution when sat");

    LearnOpts learn;
    CLI::App* learn_cmd =
        app.add_subcommand("learn-weights", "print the learned per-constraint weight vector");
    learn_cmd->add_option("instance", learn.instance_path, "instance file (.xml or native)")
        ->required();
    learn.pipeline.method = "coevo";
    add_pipeline_flags(learn_cmd, learn.pipeline);
    learn_cmd->add_flag("--print-order", learn.print_order,
                        "also print the static weighted-degree variable order");

    BenchOpts bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "run a multi-method experiment, write CSVs");
    bench_cmd->add_option("--config", bench.config_path, "experiment config (JSON)")->required();
    bench_cmd->add_option("--out", bench.out_dir, "output directory")->default_val(bench.out_dir);
    bench_cmd->add_option("--runs", bench.runs, "override: runs per method");
    bench_cmd->add_option("--timeout", bench.timeout, "override: per-run timeout seconds");
    bench_cmd->add_option("--seed", bench.seed, "override: base seed");
    bench_cmd->add_option("--jobs", bench.jobs, "override: parallel runs");

    std::string stats_a, stats_b, stats_col = "n";
    CLI::App* stats_cmd =
        app.add_subcommand("stats", "Mann-Whitney U / Vargha-Delaney A between two CSV columns");
    stats_cmd->add_option("a", stats_a, "first CSV file")->required();
    stats_cmd->add_option("b", stats_b, "second CSV file")->required();
    stats_cmd->add_option("--col", stats_col, "column name (t, n, ...)")->default_val(stats_col);

    std::string convert_in, convert_out;
    CLI::App* convert_cmd = app.add_subcommand("convert", "transcode XCSP 2.1 XML to the native format");
    convert_cmd->add_option("input", convert_in, "XCSP .xml file")->required();
    convert_cmd->add_option("output", convert_out, "native output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (generate->parsed())
            return cmd_generate(gen);
        if (solve_cmd->parsed())
            return cmd_solve(solve);
        if (learn_cmd->parsed())
            return cmd_learn_weights(learn);
        if (bench_cmd->parsed())
            return cmd_bench(bench);
        if (stats_cmd->parsed())
            return cmd_stats(stats_a, stats_b, stats_col);
        if (convert_cmd->parsed())
            return cmd_convert(convert_in, convert_out);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cocsp::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
