#include "gramml/report.hpp"

#include "gramml/metrics.hpp"

#include <sstream>

namespace gramml::harness {

nlohmann::ordered_json generation_stats_json(const evo::GenerationStats& stats) {
    nlohmann::ordered_json j;
    j["generation"] = stats.generation;
    j["best"] = stats.best;
    j["mean"] = stats.mean;
    j["worst"] = stats.worst;
    j["evaluations"] = nlohmann::ordered_json::object();
    for (const char* status : {"ok", "timeout", "resource_failure", "compile_failure",
                               "depth_failure"}) {
        auto it = stats.status_counts.find(status);
        j["evaluations"][status] = it == stats.status_counts.end() ? 0 : it->second;
    }
    j["preprocessing_frequency"] = stats.preprocessing_frequency;
    j["classifier_frequency"] = stats.classifier_frequency;
    return j;
}

std::string generations_csv(const std::vector<evo::GenerationStats>& generations) {
    std::ostringstream out;
    out << "generation,best,mean,worst,ok,timeout,resource_failure,compile_failure,depth_failure\n";
    out.precision(17);
    for (const auto& g : generations) {
        out << g.generation << ',' << g.best << ',' << g.mean << ',' << g.worst;
        for (const char* status : {"ok", "timeout", "resource_failure", "compile_failure",
                                   "depth_failure"}) {
            auto it = g.status_counts.find(status);
            out << ',' << (it == g.status_counts.end() ? 0 : it->second);
        }
        out << '\n';
    }
    return out.str();
}

nlohmann::ordered_json test_metrics_json(const std::vector<int>& truth,
                                         const std::vector<int>& predicted,
                                         std::size_t n_classes) {
    nlohmann::ordered_json j;
    j["macro_f"] = ml::f_measure(truth, predicted, n_classes);
    j["per_class_f"] = ml::per_class_f1(truth, predicted, n_classes);
    j["confusion"] = ml::confusion_matrix(truth, predicted, n_classes);
    return j;
}

} // namespace gramml::harness
