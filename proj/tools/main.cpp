#include "gramml/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int cmd_run(const std::string& config_path,
            const std::vector<std::pair<std::string, std::string>>& overrides) {
    gramml::harness::RunConfig cfg;
    if (!config_path.empty()) cfg = gramml::harness::load_config_file(config_path);
    for (const auto& [key, value] : overrides) cfg.set(key, value);
    auto report = gramml::harness::run(cfg);
    const auto& best = report.at("best");
    std::cout << "best phenotype: " << best.at("phenotype").get<std::string>() << "\n"
              << "cv fitness:     " << best.at("cv_fitness").dump() << "\n";
    if (!report.at("test").is_null())
        std::cout << "test macro-F:   " << report.at("test").at("macro_f").dump() << "\n";
    if (!cfg.output_dir.empty()) std::cout << "report written to " << cfg.output_dir << "\n";
    return 0;
}

int cmd_grammar_check(const std::string& path) {
    const gramml::Grammar g = gramml::parse_grammar_file(path);
    std::size_t productions = 0;
    for (std::size_t nt = 0; nt < g.nonterminals().size(); ++nt)
        productions += g.expansion_count(nt);
    std::cout << "grammar OK: " << g.nonterminals().size() << " nonterminals, " << productions
              << " productions, start symbol <" << g.start() << ">\n";
    const auto combinations = gramml::combination_count(g);
    if (combinations)
        std::cout << "combinations: " << *combinations << "\n";
    else
        std::cout << "combinations: non-finite (recursive grammar)\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"grammar-driven evolution of ML classification pipelines"};
    app.require_subcommand(1);

    // run -------------------------------------------------------------
    auto* run = app.add_subcommand("run", "evolve pipelines on a dataset and write a run report");
    std::string config_path;
    run->add_option("--config", config_path, "key = value config file; flags override it");
    // Every config key is exposed as a flag of the same name.
    std::map<std::string, std::string> values;
    for (const char* key :
         {"grammar", "dataset", "label", "missing-token", "seed", "out", "population",
          "generations", "tournament-size", "crossover-rate", "mutation-rate", "elites",
          "stall-generations", "budget-secs", "max-depth", "inner-k", "outer-holdout",
          "outer-fold", "outer-split-seed", "workers", "freq-top-k"}) {
        values[key] = {};
        run->add_option("--" + std::string(key), values[key]);
    }

    // replay ----------------------------------------------------------
    auto* replay = app.add_subcommand("replay", "re-map, retrain and re-evaluate a run report");
    std::string report_path;
    replay->add_option("--report", report_path, "path to report.json")->required();

    // grammar-check -----------------------------------------------------
    auto* check = app.add_subcommand("grammar-check", "validate a grammar and count its search space");
    std::string grammar_path;
    check->add_option("--grammar", grammar_path, "grammar file to validate")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            std::vector<std::pair<std::string, std::string>> overrides;
            for (auto& [key, value] : values) {
                if (run->count("--" + key) == 0) continue;
                std::string config_key = key;
                for (char& c : config_key)
                    if (c == '-') c = '_';
                overrides.emplace_back(config_key, value);
            }
            return cmd_run(config_path, overrides);
        }
        if (replay->parsed()) {
            std::cout << gramml::harness::replay(report_path).dump(2) << "\n";
            return 0;
        }
        if (check->parsed()) return cmd_grammar_check(grammar_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
