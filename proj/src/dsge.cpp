#include "gramml/dsge.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gramml::dsge {

std::string Phenotype::text() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::string render_rand_value(const RandValue& rv) {
    char buf[64];
    if (rv.is_integer) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), static_cast<long long>(rv.value));
        return std::string(buf, p);
    }
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), rv.value);
    return std::string(buf, p);
}

namespace {

std::string rand_token(const Symbol& sym, const RandValue& rv) {
    if (sym.name.empty()) return render_rand_value(rv);
    return sym.name + ':' + render_rand_value(rv);
}

RandValue sample_rand_value(const Symbol& sym, Rng& rng) {
    RandValue rv;
    rv.is_integer = sym.kind == SymbolKind::rand_int;
    rv.lo = sym.lo;
    rv.hi = sym.hi;
    rv.value = rv.is_integer
                   ? static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(sym.lo),
                                                         static_cast<std::int64_t>(sym.hi)))
                   : rng.uniform_real(sym.lo, sym.hi);
    return rv;
}

// Deterministic growth value: the range midpoint (mapping takes no RNG).
RandValue midpoint_rand_value(const Symbol& sym) {
    RandValue rv;
    rv.is_integer = sym.kind == SymbolKind::rand_int;
    rv.lo = sym.lo;
    rv.hi = sym.hi;
    rv.value = rv.is_integer ? std::floor((sym.lo + sym.hi) / 2.0) : (sym.lo + sym.hi) / 2.0;
    return rv;
}

} // namespace

Genotype random_genotype(const Grammar& g, Rng& rng, std::size_t max_depth) {
    const std::size_t start = g.index_of(g.start());
    if (g.min_depth(start) == Grammar::infinite() || g.min_depth(start) > max_depth)
        throw std::invalid_argument("max_depth " + std::to_string(max_depth) +
                                    " admits no complete derivation of <" + g.start() + ">");

    Genotype geno;
    std::vector<std::size_t> feasible;

    auto expand = [&](auto&& self, std::size_t nt, std::size_t depth) -> void {
        const auto& productions = g.productions(nt);
        const std::size_t budget = max_depth - depth;
        feasible.clear();
        for (std::size_t p = 0; p < productions.size(); ++p) {
            if (g.completion_depth(nt, p) <= budget) feasible.push_back(p);
        }
        // The caller only expands nonterminals whose min_depth fits the
        // remaining budget, so there is always at least one choice.
        const std::size_t choice = feasible[rng.below(feasible.size())];
        const std::string& name = g.nonterminals()[nt];
        geno.codons[name].push_back(choice);
        for (const Symbol& sym : productions[choice].rhs) {
            switch (sym.kind) {
            case SymbolKind::nonterminal:
                self(self, static_cast<std::size_t>(sym.nt_index), depth + 1);
                break;
            case SymbolKind::rand_int:
            case SymbolKind::rand_float:
                geno.rand_values[name].push_back(sample_rand_value(sym, rng));
                break;
            case SymbolKind::terminal: break;
            }
        }
    };
    expand(expand, start, 0);
    return geno;
}

MapResult map_genotype(const Grammar& g, const Genotype& geno, std::size_t max_depth) {
    MapResult result;
    std::map<std::string, std::size_t> codon_cursor;
    std::map<std::string, std::size_t> rand_cursor;

    auto expand = [&](auto&& self, std::size_t nt, std::size_t depth) -> bool {
        const auto& productions = g.productions(nt);
        const std::string& name = g.nonterminals()[nt];
        const std::size_t budget = max_depth >= depth ? max_depth - depth : 0;

        auto first_feasible = [&]() -> std::optional<std::size_t> {
            for (std::size_t p = 0; p < productions.size(); ++p)
                if (g.completion_depth(nt, p) <= budget) return p;
            return std::nullopt;
        };

        std::size_t choice;
        const std::size_t idx = codon_cursor[name]++;
        auto stored = geno.codons.find(name);
        if (stored != geno.codons.end() && idx < stored->second.size()) {
            choice = stored->second[idx];
            if (choice >= productions.size())
                throw std::invalid_argument("codon " + std::to_string(choice) + " out of range for <" +
                                            name + "> (" + std::to_string(productions.size()) +
                                            " productions)");
            if (g.completion_depth(nt, choice) > budget) {
                auto repaired = first_feasible();
                if (!repaired) {
                    result.error = "depth bound " + std::to_string(max_depth) +
                                   " exceeded at <" + name + ">";
                    return false;
                }
                choice = *repaired;
            }
        } else {
            auto grown = first_feasible();
            if (!grown) {
                result.error = "depth bound " + std::to_string(max_depth) + " exceeded at <" +
                               name + ">";
                return false;
            }
            choice = *grown;
        }

        result.genotype.codons[name].push_back(choice);
        for (const Symbol& sym : productions[choice].rhs) {
            switch (sym.kind) {
            case SymbolKind::nonterminal:
                if (!self(self, static_cast<std::size_t>(sym.nt_index), depth + 1)) return false;
                break;
            case SymbolKind::rand_int:
            case SymbolKind::rand_float: {
                const std::size_t ridx = rand_cursor[name]++;
                auto stored_rv = geno.rand_values.find(name);
                RandValue rv = (stored_rv != geno.rand_values.end() && ridx < stored_rv->second.size())
                                   ? stored_rv->second[ridx]
                                   : midpoint_rand_value(sym);
                result.genotype.rand_values[name].push_back(rv);
                result.phenotype.tokens.push_back(rand_token(sym, rv));
                break;
            }
            case SymbolKind::terminal:
                result.phenotype.tokens.push_back(sym.name);
                break;
            }
        }
        return true;
    };

    if (!expand(expand, g.index_of(g.start()), 0)) {
        result.ok = false;
        result.phenotype = Phenotype{};
        result.genotype = Genotype{};
        return result;
    }
    result.ok = true;
    result.consumed_codons = std::move(codon_cursor);
    result.consumed_rand_values = std::move(rand_cursor);
    return result;
}

Genotype mutate(const Grammar& g, const Genotype& geno, Rng& rng, double per_codon_rate,
                std::size_t max_depth) {
    Genotype mutated = geno;
    for (auto& [name, codons] : mutated.codons) {
        const std::size_t options = g.expansion_count(name);
        for (auto& codon : codons) {
            if (options <= 1 || !rng.bernoulli(per_codon_rate)) continue;
            std::size_t pick = static_cast<std::size_t>(rng.below(options - 1));
            if (pick >= codon) ++pick; // uniform over the other productions
            codon = pick;
        }
    }
    for (auto& [name, values] : mutated.rand_values) {
        for (auto& rv : values) {
            if (!rng.bernoulli(per_codon_rate)) continue;
            rv.value = rv.is_integer
                           ? static_cast<double>(rng.uniform_int(static_cast<std::int64_t>(rv.lo),
                                                                 static_cast<std::int64_t>(rv.hi)))
                           : rng.uniform_real(rv.lo, rv.hi);
        }
    }
    MapResult remapped = map_genotype(g, mutated, max_depth);
    if (!remapped.ok)
        throw std::logic_error("mutation produced an unmappable genotype: " + remapped.error);
    return std::move(remapped.genotype);
}

std::pair<Genotype, Genotype> crossover(const Grammar& g, const Genotype& a, const Genotype& b,
                                        Rng& rng, std::size_t max_depth) {
    Genotype child1, child2;
    for (const std::string& name : g.nonterminals()) {
        const Genotype& donor1 = rng.bernoulli(0.5) ? a : b;
        const Genotype& donor2 = &donor1 == &a ? b : a;
        if (auto it = donor1.codons.find(name); it != donor1.codons.end() && !it->second.empty())
            child1.codons[name] = it->second;
        if (auto it = donor1.rand_values.find(name); it != donor1.rand_values.end() && !it->second.empty())
            child1.rand_values[name] = it->second;
        if (auto it = donor2.codons.find(name); it != donor2.codons.end() && !it->second.empty())
            child2.codons[name] = it->second;
        if (auto it = donor2.rand_values.find(name); it != donor2.rand_values.end() && !it->second.empty())
            child2.rand_values[name] = it->second;
    }
    MapResult r1 = map_genotype(g, child1, max_depth);
    MapResult r2 = map_genotype(g, child2, max_depth);
    if (!r1.ok || !r2.ok)
        throw std::logic_error("crossover produced an unmappable genotype");
    return {std::move(r1.genotype), std::move(r2.genotype)};
}

nlohmann::ordered_json genotype_to_json(const Genotype& geno) {
    nlohmann::ordered_json j;
    j["codons"] = nlohmann::ordered_json::object();
    for (const auto& [name, codons] : geno.codons) j["codons"][name] = codons;
    j["rand_values"] = nlohmann::ordered_json::object();
    for (const auto& [name, values] : geno.rand_values) {
        auto arr = nlohmann::ordered_json::array();
        for (const RandValue& rv : values) {
            nlohmann::ordered_json quad = nlohmann::ordered_json::array();
            quad.push_back(rv.is_integer ? "integer" : "float");
            if (rv.is_integer) {
                quad.push_back(static_cast<std::int64_t>(rv.lo));
                quad.push_back(static_cast<std::int64_t>(rv.hi));
                quad.push_back(static_cast<std::int64_t>(rv.value));
            } else {
                quad.push_back(rv.lo);
                quad.push_back(rv.hi);
                quad.push_back(rv.value);
            }
            arr.push_back(std::move(quad));
        }
        j["rand_values"][name] = std::move(arr);
    }
    return j;
}

Genotype genotype_from_json(const nlohmann::json& j) {
    Genotype geno;
    for (const auto& [name, codons] : j.at("codons").items())
        geno.codons[name] = codons.get<std::vector<std::size_t>>();
    for (const auto& [name, values] : j.at("rand_values").items()) {
        for (const auto& quad : values) {
            if (!quad.is_array() || quad.size() != 4)
                throw std::invalid_argument("rand_values entries must be [type, min, max, value]");
            RandValue rv;
            const std::string type = quad[0].get<std::string>();
            if (type == "integer") rv.is_integer = true;
            else if (type == "float") rv.is_integer = false;
            else throw std::invalid_argument("unknown rand type '" + type + "'");
            rv.lo = quad[1].get<double>();
            rv.hi = quad[2].get<double>();
            rv.value = quad[3].get<double>();
            geno.rand_values[name].push_back(rv);
        }
    }
    return geno;
}

void validate_genotype(const Grammar& g, const Genotype& geno) {
    for (const auto& [name, codons] : geno.codons) {
        if (!g.has_nonterminal(name))
            throw std::invalid_argument("genotype references unknown nonterminal <" + name + ">");
        const std::size_t bound = g.expansion_count(name);
        for (std::size_t codon : codons) {
            if (codon >= bound)
                throw std::invalid_argument("codon " + std::to_string(codon) + " out of range for <" +
                                            name + "> (" + std::to_string(bound) + " productions)");
        }
    }
    for (const auto& [name, values] : geno.rand_values) {
        if (!g.has_nonterminal(name))
            throw std::invalid_argument("genotype references unknown nonterminal <" + name + ">");
        for (const RandValue& rv : values) {
            if (!(rv.lo <= rv.value && rv.value <= rv.hi))
                throw std::invalid_argument("rand value " + render_rand_value(rv) +
                                            " outside [" + std::to_string(rv.lo) + ", " +
                                            std::to_string(rv.hi) + "] in <" + name + ">");
            if (rv.is_integer &&
                (rv.value != std::floor(rv.value) || rv.lo != std::floor(rv.lo) ||
                 rv.hi != std::floor(rv.hi)))
                throw std::invalid_argument("integer rand value with non-integer fields in <" +
                                            name + ">");
        }
    }
}

} // namespace gramml::dsge
