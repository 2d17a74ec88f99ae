#pragma once

#include "gramml/grammar.hpp"
#include "gramml/rng.hpp"

#include <json.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gramml::dsge {

/// Random-value tuple stored alongside the codons: (rand-type, rand-min,
/// rand-max, rand-value). Mutation needs the type and the allowed range to
/// re-sample the value.
struct RandValue {
    bool is_integer = false;
    double lo = 0.0;
    double hi = 0.0;
    double value = 0.0;

    bool operator==(const RandValue&) const = default;
};

/// DSGE genotype: one ordered codon list per nonterminal plus the
/// random-value tuples, keyed by the nonterminal whose production contains
/// the RAND terminal, in consumption order. Holds only the codons a mapping
/// pass actually consumes.
struct Genotype {
    std::map<std::string, std::vector<std::size_t>> codons;
    std::map<std::string, std::vector<RandValue>> rand_values;

    bool operator==(const Genotype&) const = default;
};

/// Decoded terminal token stream; RAND terminals are rendered as their
/// concrete values behind the parameter tag ("radius:17.25").
struct Phenotype {
    std::vector<std::string> tokens;

    std::string text() const;
    bool operator==(const Phenotype&) const = default;
};

struct MapResult {
    bool ok = false;
    std::string error;
    Phenotype phenotype;
    Genotype genotype; // grown/truncated to exactly the consumed entries
    std::map<std::string, std::size_t> consumed_codons;
    std::map<std::string, std::size_t> consumed_rand_values;
};

/// Sample a genotype whose mapping terminates within max_depth. Codons are
/// chosen uniformly among depth-feasible productions; every RAND terminal
/// gets a fresh value uniform in [lo, hi]. Throws std::invalid_argument if
/// no complete derivation fits within max_depth.
Genotype random_genotype(const Grammar& g, Rng& rng, std::size_t max_depth);

/// Leftmost derivation from the start symbol. Exhausted codon lists grow
/// deterministically (lowest-index feasible production; midpoint RAND
/// value); surplus trailing entries are truncated. A stored codon whose
/// production cannot complete within the remaining depth budget is replaced
/// by the lowest-index feasible one. Fails (ok = false) only when the depth
/// bound leaves no feasible production.
MapResult map_genotype(const Grammar& g, const Genotype& geno, std::size_t max_depth);

/// Per-codon mutation: each codon flips to a uniformly chosen different
/// valid codon with probability per_codon_rate (no-op for single-production
/// nonterminals); each RandValue re-samples its value within [lo, hi] with
/// the same probability. The result is re-mapped.
Genotype mutate(const Grammar& g, const Genotype& geno, Rng& rng, double per_codon_rate,
                std::size_t max_depth);

/// Uniform per-nonterminal exchange: a random binary mask over the
/// grammar's nonterminals decides which parent donates each full codon list
/// (with its aligned rand values) to child one; child two gets the
/// complement. Both children are re-mapped.
std::pair<Genotype, Genotype> crossover(const Grammar& g, const Genotype& a, const Genotype& b,
                                        Rng& rng, std::size_t max_depth);

/// Render a RAND value the way phenotypes and reports show it: integers
/// without a decimal point, floats in shortest round-trip form.
std::string render_rand_value(const RandValue& rv);

nlohmann::ordered_json genotype_to_json(const Genotype& geno);
Genotype genotype_from_json(const nlohmann::json& j);

/// Check codon bounds and RandValue invariants against a grammar; used when
/// loading genotypes from reports. Throws std::invalid_argument on violation.
void validate_genotype(const Grammar& g, const Genotype& geno);

} // namespace gramml::dsge
