#pragma once

#include "gramml/cancel.hpp"
#include "gramml/dataset.hpp"
#include "gramml/dsge.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gramml::ml {

/// fit/transform preprocessing component. fit receives labels so
/// supervised selectors (ANOVA percentile) can score features.
class Transformer {
public:
    virtual ~Transformer() = default;
    virtual void fit(const Matrix& x, const std::vector<int>& labels, std::size_t n_classes,
                     const CancelToken& cancel) = 0;
    virtual Matrix transform(const Matrix& x) const = 0;
};

/// fit/predict classification component.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual void fit(const Matrix& x, const std::vector<int>& labels, std::size_t n_classes,
                     const CancelToken& cancel) = 0;
    virtual std::vector<int> predict(const Matrix& x, const CancelToken& cancel) const = 0;
};

} // namespace gramml::ml

namespace gramml::pipeline {

/// None maps to monostate; integers are recognized before floats, floats
/// before text; True/False parse as bool.
using ParamValue = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

std::string render_param_value(const ParamValue& v);

enum class Role { preprocessing, classifier };

struct ComponentSpec {
    Role role = Role::classifier;
    std::string name;
    std::vector<std::pair<std::string, ParamValue>> params; // ordered

    const ParamValue* find(const std::string& param) const;
    std::int64_t get_int(const std::string& param) const;
    double get_double(const std::string& param) const; // accepts integer values
    std::string get_text(const std::string& param) const;
    std::optional<std::int64_t> get_optional_int(const std::string& param) const; // None -> nullopt

    bool operator==(const ComponentSpec&) const = default;
};

/// Compiled pipeline: ordered preprocessors, exactly one classifier, last.
struct Spec {
    std::vector<ComponentSpec> preprocessors;
    ComponentSpec classifier;

    bool operator==(const Spec&) const = default;
};

struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameter contract for one registry entry. Compilation validates the
/// value against it and fills the default when the token is absent.
struct ParamSpec {
    enum class Kind { int_range, optional_int_range, float_range, choice };
    std::string name;
    Kind kind = Kind::choice;
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::string> choices;
    ParamValue default_value;
};

struct ComponentInfo {
    Role role = Role::classifier;
    std::string name;
    std::vector<ParamSpec> params;
    std::function<std::unique_ptr<ml::Transformer>(const ComponentSpec&)> make_transformer;
    std::function<std::unique_ptr<ml::Classifier>(const ComponentSpec&)> make_classifier;
};

class Registry {
public:
    void add(ComponentInfo info);
    const ComponentInfo* find(const std::string& name) const;
    const ComponentInfo& at(const std::string& name) const; // throws CompileError
    std::vector<std::string> names() const;

private:
    std::map<std::string, ComponentInfo> entries_;
};

/// Scan the phenotype left to right: a `preprocessing:` or `classifier:`
/// token opens a component, subsequent `param:value` tokens attach to it.
/// Values parse as None/True/False, then integer, then float, then text.
/// Defaults are filled for omitted parameters; out-of-range values are
/// errors (grammar/registry drift should surface, not be clamped).
Spec compile(const dsge::Phenotype& phenotype, const Registry& registry);

/// Inverse of compile for specs over the given registry.
dsge::Phenotype render(const Spec& spec);

/// Fit the preprocessors in order on the (progressively transformed) train
/// data, apply them to both sides, fit the classifier, return test
/// predictions. Throws ml::NumericError on degenerate data (e.g. a selector
/// that removed every feature) and Cancelled on budget expiry.
std::vector<int> fit_predict(const Spec& spec, const Registry& registry, const ml::Dataset& train,
                             const ml::Dataset& test, const CancelToken& cancel);

nlohmann::ordered_json to_json(const Spec& spec);

} // namespace gramml::pipeline
