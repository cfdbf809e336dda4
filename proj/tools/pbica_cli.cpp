// Benchmark and separation CLI.
//
//   pbica separate   one dataset, one nonlinearity; prints W and the Amari error
//   pbica bench      Monte-Carlo campaign from a JSON config; writes trials.csv
//                    and summary.csv
//   pbica score-dump tabulate the learned score for a dataset and dump it as CSV

#include <CLI11.hpp>
#include <json.hpp>

#include <pbica/pbica.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace pbica;
using nlohmann::json;

namespace {

struct DatasetOpts {
    std::string family = "ggd";
    double beta = 1.6;
    double lambda = 0.5;
    int m = 8;
    int N = 1000;
    std::uint64_t seed = 1;
    std::string input;  // CSV path; when set, overrides the synthetic options
};

void add_dataset_options(CLI::App* cmd, DatasetOpts& o) {
    cmd->add_option("--family", o.family, "source family: ggd | poisson")
        ->check(CLI::IsMember({"ggd", "poisson"}));
    cmd->add_option("--beta", o.beta, "GGD shape (default 1.6)");
    cmd->add_option("--lambda", o.lambda, "Poisson rate (default 0.5)");
    cmd->add_option("-m,--channels", o.m, "source count (default 8)");
    cmd->add_option("-N,--samples", o.N, "sample count (default 1000)");
    cmd->add_option("--seed", o.seed, "dataset seed (default 1)");
    cmd->add_option("--input", o.input,
                    "CSV file of observations (rows = channels); replaces the synthetic source");
}

SourceFamily family_of(const DatasetOpts& o) {
    return o.family == "ggd" ? SourceFamily::ggd(o.beta) : SourceFamily::poisson(o.lambda);
}

DataMatrix read_csv_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open input file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw input_error("ragged CSV row in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw input_error("empty input file: " + path);
    Matrix X(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) X(i, j) = rows[i][j];
    return DataMatrix{X};
}

// dataset + ground truth when synthetic
struct LoadedData {
    DataMatrix X;
    std::optional<Matrix> A;
};

LoadedData load_data(const DatasetOpts& o) {
    if (!o.input.empty()) return {read_csv_matrix(o.input), std::nullopt};
    Scenario sc{"cli", family_of(o), o.m, o.N, o.seed};
    Dataset ds = make_dataset(sc);
    return {std::move(ds.X), std::move(ds.A)};
}

ScoreParams score_params_from_json(const json& j) {
    ScoreParams p;
    p.ecf.R = j.value("R", p.ecf.R);
    p.ecf.B = j.value("B", p.ecf.B);
    p.ecf.c = j.value("c", p.ecf.c);
    p.ecf.delta = j.value("delta", p.ecf.delta);
    p.ecf.L = j.value("L", p.ecf.L);
    std::string mode = j.value("mode", std::string("equal_width"));
    if (mode != "equal_width" && mode != "equal_occupancy")
        throw input_error("config: unknown bin mode " + mode);
    p.ecf.mode = mode == "equal_width" ? BinMode::equal_width : BinMode::equal_occupancy;
    p.J = j.value("J", p.J);
    p.q = j.value("q", p.q);
    p.floor_frac = j.value("floor_frac", p.floor_frac);
    return p;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    if (j.contains("scenarios")) {
        for (const json& s : j.at("scenarios")) {
            Scenario sc;
            sc.id = s.at("id").get<std::string>();
            std::string fam = s.value("family", std::string("ggd"));
            sc.family = fam == "ggd" ? SourceFamily::ggd(s.value("beta", 1.6))
                                     : SourceFamily::poisson(s.value("lambda", 0.5));
            sc.m = s.value("m", 8);
            sc.N = s.value("N", 1000);
            cfg.scenarios.push_back(std::move(sc));
        }
    } else {
        cfg.scenarios = {Scenario{"ggd", SourceFamily::ggd(1.6), 8, 1000, 0},
                         Scenario{"pois", SourceFamily::poisson(0.5), 8, 1000, 0}};
    }
    if (j.contains("nonlinearities"))
        for (const json& n : j.at("nonlinearities"))
            cfg.nonlinearities.push_back(parse_nl_kind(n.get<std::string>()));
    else
        cfg.nonlinearities = {NlKind::tanh, NlKind::pow3, NlKind::skew, NlKind::gauss,
                              NlKind::learned};
    cfg.n_trials = j.value("n_trials", 100);
    cfg.master_seed = j.value("master_seed", std::uint64_t{1});
    if (j.contains("pbecf")) cfg.pbecf = score_params_from_json(j.at("pbecf"));
    if (j.contains("fastica")) {
        cfg.fastica.K_max = j.at("fastica").value("K_max", 300);
        cfg.fastica.tau = j.at("fastica").value("tau", 1e-6);
    }
    cfg.output_dir = j.value("output_dir", std::string("."));
    return cfg;
}

int cmd_separate(const DatasetOpts& data_opts, const std::string& nl_name,
                 std::uint64_t run_seed) {
    LoadedData data = load_data(data_opts);
    auto [Xc, mean] = center(data.X);
    auto [Xw, model] = whiten(Xc);

    NlKind kind = parse_nl_kind(nl_name);
    Nonlinearity nl;
    if (kind == NlKind::learned)
        nl = Nonlinearity::learned(
            tabulate_score(Xw, ScoreParams{}, derive_seed(run_seed, "score")));
    else
        nl = Nonlinearity::fixed(kind);

    SeparationResult res =
        run_fastica(Xw, nl, FasticaConfig{300, 1e-6, derive_seed(run_seed, "w0")});
    std::cout << "iterations: " << res.iterations
              << "  converged: " << (res.converged ? "yes" : "no") << "\n";
    std::cout << "W (orthogonal demixer on whitened data):\n" << res.W << "\n";
    std::cout << "total demixing map W*V:\n" << res.W * model.V << "\n";
    if (data.A) {
        double ea = amari_error(gain_matrix(res.W, model.V, *data.A));
        std::cout << "amari_error: " << ea << "\n";
    } else {
        std::cout << "amari_error: n/a (no ground-truth mixing for file input)\n";
    }
    return 0;
}

int cmd_bench(const std::string& config_path, const std::string& output_override,
              int trials_override, long long seed_override) {
    json j = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw input_error("cannot open config file: " + config_path);
        in >> j;
    }
    ExperimentConfig cfg = config_from_json(j);
    if (!output_override.empty()) cfg.output_dir = output_override;
    if (trials_override > 0) cfg.n_trials = trials_override;
    if (seed_override >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed_override);

    {  // fail on an unwritable output dir before any compute
        std::ofstream probe(cfg.output_dir + "/trials.csv");
        if (!probe) throw input_error("cannot write to output dir: " + cfg.output_dir);
    }

    CampaignResult res = run_campaign(cfg);
    write_campaign(res, cfg.output_dir);

    std::ostringstream os;
    write_summary_csv(res.summary, os);
    std::cout << os.str();
    std::cout << "wrote " << cfg.output_dir << "/trials.csv and " << cfg.output_dir
              << "/summary.csv\n";
    return 0;
}

int cmd_score_dump(const DatasetOpts& data_opts, const std::string& out_path,
                   std::uint64_t run_seed) {
    LoadedData data = load_data(data_opts);
    auto [Xc, mean] = center(data.X);
    auto [Xw, model] = whiten(Xc);
    ScoreTable t = tabulate_score(Xw, ScoreParams{}, derive_seed(run_seed, "score"));
    if (out_path.empty()) {
        dump_score_table(t, std::cout);
    } else {
        std::ofstream out(out_path);
        if (!out) throw input_error("cannot write score table to " + out_path);
        dump_score_table(t, out);
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symmetric FastICA with fixed or ECF-learned nonlinearities"};
    app.require_subcommand(1);

    DatasetOpts sep_data;
    std::string sep_nl = "tanh";
    std::uint64_t sep_seed = 1;
    CLI::App* separate = app.add_subcommand("separate", "separate one dataset");
    add_dataset_options(separate, sep_data);
    separate->add_option("--nonlinearity", sep_nl, "tanh | pow3 | skew | gauss | pbecf")
        ->check(CLI::IsMember({"tanh", "pow3", "skew", "gauss", "pbecf"}));
    separate->add_option("--run-seed", sep_seed, "seed for W0 / score learning");

    std::string cfg_path, out_dir;
    int trials_override = -1;
    long long seed_override = -1;
    CLI::App* bench = app.add_subcommand("bench", "run a Monte-Carlo campaign");
    bench->add_option("--config", cfg_path, "JSON config file (defaults reproduce the paper protocol)");
    bench->add_option("--output", out_dir, "output directory for trials.csv / summary.csv");
    bench->add_option("--trials", trials_override, "override n_trials");
    bench->add_option("--master-seed", seed_override, "override master seed");

    DatasetOpts dump_data;
    std::string dump_out;
    std::uint64_t dump_seed = 1;
    CLI::App* dump = app.add_subcommand("score-dump", "write the learned score table as CSV");
    add_dataset_options(dump, dump_data);
    dump->add_option("--output", dump_out, "output CSV path (default: stdout)");
    dump->add_option("--run-seed", dump_seed, "seed for score learning");

    CLI11_PARSE(app, argc, argv);

    try {
        if (separate->parsed()) return cmd_separate(sep_data, sep_nl, sep_seed);
        if (bench->parsed()) return cmd_bench(cfg_path, out_dir, trials_override, seed_override);
        if (dump->parsed()) return cmd_score_dump(dump_data, dump_out, dump_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
