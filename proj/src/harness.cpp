#include "gramml/harness.hpp"

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace gramml::harness {

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || p != value.data() + value.size())
        throw std::invalid_argument("config key '" + key + "': expected an integer, got '" +
                                    value + "'");
    return v;
}

double parse_real(const std::string& key, const std::string& value) {
    const char* begin = value.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (value.empty() || end != begin + value.size())
        throw std::invalid_argument("config key '" + key + "': expected a number, got '" + value +
                                    "'");
    return v;
}

constexpr std::uint64_t kInnerFoldTag = 0x1f01d5;

} // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "grammar") grammar_path = value;
    else if (key == "dataset") dataset_path = value;
    else if (key == "label") label_column = value;
    else if (key == "missing_token") missing_token = value;
    else if (key == "out") output_dir = value;
    else if (key == "seed") {
        seed = parse_u64(key, value);
        evolution.master_seed = seed;
    } else if (key == "outer_split_seed") outer_split_seed = parse_u64(key, value);
    else if (key == "inner_k") inner_k = parse_u64(key, value);
    else if (key == "outer_holdout") {
        outer_holdout = parse_real(key, value);
        outer_fold.reset();
    } else if (key == "outer_fold") {
        auto slash = value.find('/');
        if (slash == std::string::npos)
            throw std::invalid_argument("config key 'outer_fold': expected 'index/k', got '" +
                                        value + "'");
        outer_fold = {parse_u64(key, value.substr(0, slash)),
                      parse_u64(key, value.substr(slash + 1))};
        outer_holdout.reset();
    } else if (key == "population") evolution.population_size = parse_u64(key, value);
    else if (key == "generations") evolution.max_generations = parse_u64(key, value);
    else if (key == "tournament_size") evolution.tournament_size = parse_u64(key, value);
    else if (key == "crossover_rate") evolution.crossover_rate = parse_real(key, value);
    else if (key == "mutation_rate") evolution.mutation_rate = parse_real(key, value);
    else if (key == "elites") evolution.elite_count = parse_u64(key, value);
    else if (key == "stall_generations") evolution.stall_generations = parse_u64(key, value);
    else if (key == "budget_secs")
        evolution.eval_time_budget = std::chrono::duration<double>(parse_real(key, value));
    else if (key == "max_depth") evolution.max_depth = parse_u64(key, value);
    else if (key == "workers") evolution.workers = parse_u64(key, value);
    else if (key == "freq_top_k") evolution.freq_top_k = parse_u64(key, value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
    if (grammar_path.empty()) throw std::invalid_argument("config: 'grammar' is required");
    if (dataset_path.empty()) throw std::invalid_argument("config: 'dataset' is required");
    if (label_column.empty()) throw std::invalid_argument("config: 'label' is required");
    if (inner_k < 2) throw std::invalid_argument("config: inner_k must be at least 2");
    if (outer_holdout && !(*outer_holdout > 0.0 && *outer_holdout < 1.0))
        throw std::invalid_argument("config: outer_holdout must be in (0, 1)");
    if (outer_fold && outer_fold->first >= outer_fold->second)
        throw std::invalid_argument("config: outer_fold index must be below k");
    evolution.validate();
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected 'key = value'");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

SplitData make_outer_split(const ml::Dataset& ds, const RunConfig& cfg) {
    SplitData split;
    Rng rng(cfg.outer_split_seed);
    if (cfg.outer_fold) {
        const auto [fold, k] = *cfg.outer_fold;
        const ml::FoldPlan plan = ml::stratified_folds(ds.labels, ds.n_classes(), k, rng);
        split.test_indices = plan.fold_indices(fold);
        split.train_indices = plan.complement_indices(fold);
        split.mode = "fold";
    } else {
        const double fraction = cfg.outer_holdout.value_or(RunConfig::kDefaultHoldout);
        std::tie(split.train_indices, split.test_indices) =
            ml::stratified_holdout(ds.labels, ds.n_classes(), fraction, rng);
        split.mode = "holdout";
    }
    split.train = ds.subset(split.train_indices);
    split.test = ds.subset(split.test_indices);
    return split;
}

std::vector<int> fit_on_split(const pipeline::Spec& spec, const SplitData& split) {
    return pipeline::fit_predict(spec, ml::default_registry(), split.train, split.test,
                                 CancelToken::never());
}

namespace {

nlohmann::ordered_json config_json(const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["grammar"] = cfg.grammar_path;
    j["dataset"] = cfg.dataset_path;
    j["label"] = cfg.label_column;
    j["missing_token"] = cfg.missing_token;
    j["out"] = cfg.output_dir;
    j["seed"] = cfg.seed;
    j["outer_split_seed"] = cfg.outer_split_seed;
    j["inner_k"] = cfg.inner_k;
    if (cfg.outer_fold)
        j["outer_fold"] = std::to_string(cfg.outer_fold->first) + "/" +
                          std::to_string(cfg.outer_fold->second);
    else
        j["outer_holdout"] = cfg.outer_holdout.value_or(RunConfig::kDefaultHoldout);
    j["population"] = cfg.evolution.population_size;
    j["generations"] = cfg.evolution.max_generations;
    j["tournament_size"] = cfg.evolution.tournament_size;
    j["crossover_rate"] = cfg.evolution.crossover_rate;
    j["mutation_rate"] = cfg.evolution.mutation_rate;
    j["elites"] = cfg.evolution.elite_count;
    j["stall_generations"] = cfg.evolution.stall_generations;
    j["budget_secs"] = cfg.evolution.eval_time_budget.count();
    j["max_depth"] = cfg.evolution.max_depth;
    j["workers"] = cfg.evolution.workers;
    j["freq_top_k"] = cfg.evolution.freq_top_k;
    return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) cfg.set(key, value.get<std::string>());
        else cfg.set(key, nlohmann::json(value).dump());
    }
    return cfg;
}

evo::Evaluator make_cv_evaluator(const ml::Dataset& train, const ml::FoldPlan& plan) {
    return [&train, &plan](const dsge::Phenotype& phenotype,
                           const CancelToken& cancel) -> evo::EvalResult {
        const auto& registry = ml::default_registry();
        pipeline::Spec spec;
        try {
            spec = pipeline::compile(phenotype, registry);
        } catch (const pipeline::CompileError&) {
            return {evo::kWorstFitness, evo::EvalStatus::compile_failure};
        }
        // NumericError / Cancelled propagate; evaluate_with_budget maps them.
        return {ml::cv_fitness(spec, registry, train, plan, cancel), evo::EvalStatus::ok};
    };
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << contents;
}

} // namespace

nlohmann::ordered_json run(const RunConfig& input) {
    RunConfig cfg = input;
    cfg.evolution.master_seed = cfg.seed; // single source of randomness
    cfg.validate();
    const auto t_start = std::chrono::steady_clock::now();

    const Grammar grammar = parse_grammar_file(cfg.grammar_path);
    const ml::Dataset ds = ml::load_csv(cfg.dataset_path, cfg.label_column, cfg.missing_token);
    const SplitData split = make_outer_split(ds, cfg);

    Rng inner_rng(stream_seed(cfg.seed, kInnerFoldTag, 0));
    const ml::FoldPlan inner_plan =
        ml::stratified_folds(split.train.labels, ds.n_classes(), cfg.inner_k, inner_rng);

    const auto t_evolve = std::chrono::steady_clock::now();
    const evo::Evaluator evaluator = make_cv_evaluator(split.train, inner_plan);
    const evo::EvolveResult evolved = evolve(grammar, cfg.evolution, evaluator);
    const double evolve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_evolve).count();

    nlohmann::ordered_json report;
    report["config"] = config_json(cfg);
    report["dataset"] = {{"rows", ds.size()},
                         {"features", ds.features.cols},
                         {"classes", ds.class_names}};

    // Inner fold membership in original row ids, for the leakage check.
    std::vector<std::vector<std::size_t>> inner_fold_rows(cfg.inner_k);
    for (std::size_t row = 0; row < inner_plan.assignments.size(); ++row)
        inner_fold_rows[inner_plan.assignments[row]].push_back(split.train_indices[row]);
    report["split"] = {{"mode", split.mode},
                       {"outer_test_indices", split.test_indices},
                       {"inner_k", cfg.inner_k},
                       {"inner_fold_indices", inner_fold_rows}};

    report["generations"] = nlohmann::ordered_json::array();
    for (const auto& g : evolved.generations)
        report["generations"].push_back(generation_stats_json(g));
    report["evaluations"] = evolved.evaluations;

    nlohmann::ordered_json best;
    best["generation"] = evolved.best_generation;
    best["cv_fitness"] = evolved.best.fitness;
    best["status"] = std::string(evo::to_string(evolved.best.status));
    best["phenotype"] = evolved.best.phenotype.text();
    best["genotype"] = dsge::genotype_to_json(evolved.best.genotype);

    nlohmann::ordered_json pipeline_json;
    if (evolved.best.status == evo::EvalStatus::ok) {
        const auto& registry = ml::default_registry();
        const pipeline::Spec spec = pipeline::compile(evolved.best.phenotype, registry);
        pipeline_json = pipeline::to_json(spec);
        best["pipeline"] = pipeline_json;
        const std::vector<int> predicted = fit_on_split(spec, split);
        report["best"] = best;
        report["test"] = test_metrics_json(split.test.labels, predicted, ds.n_classes());
    } else {
        best["pipeline"] = nullptr;
        report["best"] = best;
        report["test"] = nullptr;
    }

    report["timings"] = {
        {"evolve_seconds", evolve_seconds},
        {"total_seconds",
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count()}};

    if (!cfg.output_dir.empty()) {
        std::filesystem::path dir(cfg.output_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "report.json", report.dump(2) + "\n");
        write_file(dir / "generations.csv", generations_csv(evolved.generations));
        write_file(dir / "best_pipeline.json", pipeline_json.dump(2) + "\n");
    }
    return report;
}

nlohmann::ordered_json replay(const std::string& report_path) {
    std::ifstream in(report_path);
    if (!in) throw std::runtime_error("cannot open report: " + report_path);
    nlohmann::json report = nlohmann::json::parse(in);

    RunConfig cfg = config_from_json(report.at("config"));
    cfg.validate();

    const Grammar grammar = parse_grammar_file(cfg.grammar_path);
    const dsge::Genotype genotype = dsge::genotype_from_json(report.at("best").at("genotype"));
    dsge::validate_genotype(grammar, genotype);

    const dsge::MapResult mapped = dsge::map_genotype(grammar, genotype, cfg.evolution.max_depth);
    if (!mapped.ok) throw std::runtime_error("replay: stored genotype fails to map: " + mapped.error);

    // Token-for-token comparison against the stored phenotype.
    const std::string stored_text = report.at("best").at("phenotype").get<std::string>();
    std::vector<std::string> stored_tokens;
    {
        std::istringstream ss(stored_text);
        std::string token;
        while (ss >> token) stored_tokens.push_back(token);
    }
    const auto& remapped_tokens = mapped.phenotype.tokens;
    const std::size_t common = std::min(stored_tokens.size(), remapped_tokens.size());
    for (std::size_t i = 0; i < common; ++i) {
        if (stored_tokens[i] != remapped_tokens[i])
            throw std::runtime_error("replay: phenotype diverges at token " + std::to_string(i) +
                                     ": stored '" + stored_tokens[i] + "' vs remapped '" +
                                     remapped_tokens[i] + "'");
    }
    if (stored_tokens.size() != remapped_tokens.size())
        throw std::runtime_error(
            "replay: phenotype diverges at token " + std::to_string(common) + ": stored has " +
            std::to_string(stored_tokens.size()) + " tokens, remapped has " +
            std::to_string(remapped_tokens.size()));

    const ml::Dataset ds = ml::load_csv(cfg.dataset_path, cfg.label_column, cfg.missing_token);
    const SplitData split = make_outer_split(ds, cfg);
    const auto& registry = ml::default_registry();
    const pipeline::Spec spec = pipeline::compile(mapped.phenotype, registry);
    const std::vector<int> predicted = fit_on_split(spec, split);

    nlohmann::ordered_json out;
    out["phenotype"] = mapped.phenotype.text();
    out["pipeline"] = pipeline::to_json(spec);
    out["test"] = test_metrics_json(split.test.labels, predicted, ds.n_classes());
    return out;
}

} // namespace gramml::harness
