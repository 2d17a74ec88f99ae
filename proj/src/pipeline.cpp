#include "gramml/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace gramml::pipeline {

namespace {

constexpr std::string_view kPrepTag = "preprocessing:";
constexpr std::string_view kClassifierTag = "classifier:";

ParamValue parse_value(const std::string& text) {
    if (text == "None") return std::monostate{};
    if (text == "True") return true;
    if (text == "False") return false;
    {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec == std::errc{} && p == text.data() + text.size()) return v;
    }
    {
        const char* begin = text.c_str();
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin + text.size() && !text.empty()) return v;
    }
    return text;
}

std::string kind_name(ParamSpec::Kind kind) {
    switch (kind) {
    case ParamSpec::Kind::int_range: return "integer";
    case ParamSpec::Kind::optional_int_range: return "integer or None";
    case ParamSpec::Kind::float_range: return "float";
    case ParamSpec::Kind::choice: return "choice";
    }
    return "?";
}

void check_value(const std::string& component, const ParamSpec& spec, const ParamValue& value) {
    auto fail = [&](const std::string& why) {
        throw CompileError("parameter '" + spec.name + "' of '" + component + "': " + why);
    };
    switch (spec.kind) {
    case ParamSpec::Kind::optional_int_range:
        if (std::holds_alternative<std::monostate>(value)) return;
        [[fallthrough]];
    case ParamSpec::Kind::int_range: {
        const auto* v = std::get_if<std::int64_t>(&value);
        if (!v) fail("expected " + kind_name(spec.kind) + ", got '" + render_param_value(value) + "'");
        if (static_cast<double>(*v) < spec.lo || static_cast<double>(*v) > spec.hi)
            fail("value " + std::to_string(*v) + " outside [" + std::to_string((long long)spec.lo) +
                 ", " + std::to_string((long long)spec.hi) + "]");
        return;
    }
    case ParamSpec::Kind::float_range: {
        double v;
        if (const auto* d = std::get_if<double>(&value)) v = *d;
        else if (const auto* i = std::get_if<std::int64_t>(&value)) v = static_cast<double>(*i);
        else { fail("expected a number, got '" + render_param_value(value) + "'"); return; }
        if (v < spec.lo || v > spec.hi)
            fail("value " + std::to_string(v) + " outside [" + std::to_string(spec.lo) + ", " +
                 std::to_string(spec.hi) + "]");
        return;
    }
    case ParamSpec::Kind::choice: {
        const auto* s = std::get_if<std::string>(&value);
        if (!s) fail("expected one of the named choices, got '" + render_param_value(value) + "'");
        for (const auto& c : spec.choices)
            if (c == *s) return;
        fail("'" + *s + "' is not an allowed choice");
        return;
    }
    }
}

void finalize_component(const Registry& registry, ComponentSpec& spec) {
    const ComponentInfo& info = registry.at(spec.name);
    for (const auto& [pname, pvalue] : spec.params) {
        const ParamSpec* pspec = nullptr;
        for (const auto& candidate : info.params)
            if (candidate.name == pname) pspec = &candidate;
        if (!pspec)
            throw CompileError("component '" + spec.name + "' does not accept parameter '" +
                               pname + "'");
        check_value(spec.name, *pspec, pvalue);
    }
    for (const auto& pspec : info.params) {
        if (!spec.find(pspec.name))
            spec.params.emplace_back(pspec.name, pspec.default_value);
    }
}

} // namespace

std::string render_param_value(const ParamValue& v) {
    if (std::holds_alternative<std::monostate>(v)) return "None";
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "True" : "False";
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    if (const auto* d = std::get_if<double>(&v)) {
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), *d);
        return std::string(buf, p);
    }
    return std::get<std::string>(v);
}

const ParamValue* ComponentSpec::find(const std::string& param) const {
    for (const auto& [name, value] : params)
        if (name == param) return &value;
    return nullptr;
}

std::int64_t ComponentSpec::get_int(const std::string& param) const {
    const ParamValue* v = find(param);
    if (!v || !std::holds_alternative<std::int64_t>(*v))
        throw CompileError("component '" + name + "': missing integer parameter '" + param + "'");
    return std::get<std::int64_t>(*v);
}

double ComponentSpec::get_double(const std::string& param) const {
    const ParamValue* v = find(param);
    if (v && std::holds_alternative<double>(*v)) return std::get<double>(*v);
    if (v && std::holds_alternative<std::int64_t>(*v))
        return static_cast<double>(std::get<std::int64_t>(*v));
    throw CompileError("component '" + name + "': missing numeric parameter '" + param + "'");
}

std::string ComponentSpec::get_text(const std::string& param) const {
    const ParamValue* v = find(param);
    if (!v || !std::holds_alternative<std::string>(*v))
        throw CompileError("component '" + name + "': missing text parameter '" + param + "'");
    return std::get<std::string>(*v);
}

std::optional<std::int64_t> ComponentSpec::get_optional_int(const std::string& param) const {
    const ParamValue* v = find(param);
    if (!v) throw CompileError("component '" + name + "': missing parameter '" + param + "'");
    if (std::holds_alternative<std::monostate>(*v)) return std::nullopt;
    if (std::holds_alternative<std::int64_t>(*v)) return std::get<std::int64_t>(*v);
    throw CompileError("component '" + name + "': parameter '" + param + "' is neither None nor an integer");
}

void Registry::add(ComponentInfo info) {
    std::string key = info.name;
    entries_.emplace(std::move(key), std::move(info));
}

const ComponentInfo* Registry::find(const std::string& name) const {
    auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
}

const ComponentInfo& Registry::at(const std::string& name) const {
    const ComponentInfo* info = find(name);
    if (!info) throw CompileError("unknown component '" + name + "'");
    return *info;
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, info] : entries_) out.push_back(name);
    return out;
}

Spec compile(const dsge::Phenotype& phenotype, const Registry& registry) {
    Spec spec;
    std::optional<ComponentSpec> open;
    bool saw_classifier = false;

    auto close_open = [&]() {
        if (!open) return;
        finalize_component(registry, *open);
        if (open->role == Role::preprocessing) spec.preprocessors.push_back(std::move(*open));
        else spec.classifier = std::move(*open);
        open.reset();
    };

    for (const std::string& token : phenotype.tokens) {
        Role role;
        std::string_view rest;
        if (token.compare(0, kPrepTag.size(), kPrepTag) == 0) {
            role = Role::preprocessing;
            rest = std::string_view(token).substr(kPrepTag.size());
        } else if (token.compare(0, kClassifierTag.size(), kClassifierTag) == 0) {
            role = Role::classifier;
            rest = std::string_view(token).substr(kClassifierTag.size());
        } else {
            auto colon = token.find(':');
            if (colon == std::string::npos || colon == 0 || colon + 1 > token.size())
                throw CompileError("token '" + token + "' is neither a component nor 'param:value'");
            if (!open)
                throw CompileError("parameter token '" + token + "' appears before any component");
            std::string pname = token.substr(0, colon);
            ParamValue value = parse_value(token.substr(colon + 1));
            if (open->find(pname))
                throw CompileError("duplicate parameter '" + pname + "' for component '" +
                                   open->name + "'");
            open->params.emplace_back(std::move(pname), std::move(value));
            continue;
        }

        if (saw_classifier)
            throw CompileError("component token '" + token + "' after the classifier; "
                               "the classifier must be the final component");
        close_open();
        ComponentSpec component;
        component.role = role;
        component.name = std::string(rest);
        const ComponentInfo& info = registry.at(component.name);
        if (info.role != role)
            throw CompileError("component '" + component.name + "' used under the wrong tag");
        open = std::move(component);
        if (role == Role::classifier) saw_classifier = true;
    }
    close_open();

    if (!saw_classifier) throw CompileError("phenotype contains no classifier component");
    return spec;
}

dsge::Phenotype render(const Spec& spec) {
    dsge::Phenotype pheno;
    auto emit = [&](const ComponentSpec& c) {
        pheno.tokens.push_back((c.role == Role::preprocessing ? std::string(kPrepTag)
                                                              : std::string(kClassifierTag)) +
                               c.name);
        for (const auto& [pname, pvalue] : c.params)
            pheno.tokens.push_back(pname + ':' + render_param_value(pvalue));
    };
    for (const auto& prep : spec.preprocessors) emit(prep);
    emit(spec.classifier);
    return pheno;
}

std::vector<int> fit_predict(const Spec& spec, const Registry& registry, const ml::Dataset& train,
                             const ml::Dataset& test, const CancelToken& cancel) {
    ml::Matrix train_x = train.features;
    ml::Matrix test_x = test.features;
    const std::size_t n_classes = train.n_classes();

    for (const auto& prep : spec.preprocessors) {
        throw_if_cancelled(cancel);
        const ComponentInfo& info = registry.at(prep.name);
        auto transformer = info.make_transformer(prep);
        transformer->fit(train_x, train.labels, n_classes, cancel);
        train_x = transformer->transform(train_x);
        test_x = transformer->transform(test_x);
        if (train_x.cols == 0)
            throw ml::NumericError("preprocessor '" + prep.name + "' removed every feature");
    }

    throw_if_cancelled(cancel);
    const ComponentInfo& info = registry.at(spec.classifier.name);
    auto classifier = info.make_classifier(spec.classifier);
    classifier->fit(train_x, train.labels, n_classes, cancel);
    return classifier->predict(test_x, cancel);
}

nlohmann::ordered_json to_json(const Spec& spec) {
    nlohmann::ordered_json j;
    auto component_json = [](const ComponentSpec& c) {
        nlohmann::ordered_json cj;
        cj["role"] = c.role == Role::preprocessing ? "preprocessing" : "classifier";
        cj["name"] = c.name;
        cj["params"] = nlohmann::ordered_json::object();
        for (const auto& [pname, pvalue] : c.params) {
            if (std::holds_alternative<std::monostate>(pvalue)) cj["params"][pname] = nullptr;
            else if (const auto* b = std::get_if<bool>(&pvalue)) cj["params"][pname] = *b;
            else if (const auto* i = std::get_if<std::int64_t>(&pvalue)) cj["params"][pname] = *i;
            else if (const auto* d = std::get_if<double>(&pvalue)) cj["params"][pname] = *d;
            else cj["params"][pname] = std::get<std::string>(pvalue);
        }
        return cj;
    };
    j["preprocessors"] = nlohmann::ordered_json::array();
    for (const auto& prep : spec.preprocessors) j["preprocessors"].push_back(component_json(prep));
    j["classifier"] = component_json(spec.classifier);
    return j;
}

} // namespace gramml::pipeline
